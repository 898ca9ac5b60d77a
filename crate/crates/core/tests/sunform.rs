use hml::defalg::{CMat, FormType};
use hml::poly::HolomorphicPoly;
use hml::sunform::*;
use hml::{Error, C64};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn p(cs: &[f64]) -> HolomorphicPoly {
    HolomorphicPoly::from_real(cs)
}

fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0, |a, v| a.max(v.norm()))
}

fn block_field() -> PolyMatrix {
    Block::ramified(HolomorphicPoly::zero()).matrix()
}

/// The rank-three model whose three eigenvalues are the cube roots of `z`.
fn triple_model() -> PolyMatrix {
    let mut m = PolyMatrix::zeros(3, 3);
    m.set(0, 2, p(&[0.0, 1.0]));
    m.set(1, 0, p(&[1.0]));
    m.set(2, 1, p(&[1.0]));
    m
}

/// Independent pointwise check: least squares for every off-block entry of
/// `gamma` straight from the full `n^2 x n^2` commutator matrix.
fn kron_oracle_offblock(phi: &BlockHiggsField, pd: &PolyMatrix, z: C64) -> CMat {
    let n = phi.n;
    let a = phi.eval(z);
    let owner: Vec<usize> = phi
        .blocks
        .iter()
        .enumerate()
        .flat_map(|(i, b)| std::iter::repeat(i).take(b.size()))
        .collect();
    let off: Vec<(usize, usize)> =
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|&(i, j)| owner[i] != owner[j]).collect();
    if off.is_empty() {
        return CMat::zeros(n, n);
    }
    let l = DMatrix::from_fn(off.len(), off.len(), |r, s| {
        let mut e = CMat::zeros(n, n);
        e[off[s]] = c(1.0, 0.0);
        (&a * &e - &e * &a)[off[r]]
    });
    let dz = pd.eval(z);
    let rhs = DVector::from_iterator(off.len(), off.iter().map(|&ij| -dz[ij]));
    let x = l.svd(true, true).solve(&rhs, 1e-14).unwrap();
    let mut g = CMat::zeros(n, n);
    for (k, &ij) in off.iter().enumerate() {
        g[ij] = x[k];
    }
    g
}

#[test]
fn discriminant_of_ramified_block_is_four_z() {
    let m = block_field();
    for z in [c(0.3, 0.1), c(-0.5, 0.4), c(0.9, 0.0)] {
        let d = discriminant(&m.eval(z)).unwrap();
        assert!((d - 4.0 * z).norm() < 1e-14, "{d} vs {}", 4.0 * z);
    }
    let dp = discriminant_poly(&m, 1.0).unwrap();
    assert_eq!(dp.degree(), Some(1));
    assert!((dp.coeff(1) - 4.0).norm() < 1e-13 && dp.coeff(0).norm() < 1e-13);
}

#[test]
fn discriminant_constant_for_distinct_diagonal() {
    let phi = BlockHiggsField::new(vec![Block::simple(p(&[1.0])), Block::simple(p(&[-2.0])), Block::simple(p(&[0.5]))])
        .unwrap()
        .matrix();
    let want = (3.0f64 * 0.5 * 2.5).powi(2);
    for z in [c(0.0, 0.0), c(0.4, -0.3)] {
        let d = discriminant(&phi.eval(z)).unwrap();
        assert!((d - want).norm() < 1e-12 * want);
    }
}

#[test]
fn discriminant_vanishes_at_repeated_eigenvalue() {
    let m = CMat::from_row_slice(3, 3, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)]);
    assert!(discriminant(&m).unwrap().norm() < 1e-14);
}

#[test]
fn simple_crossing_accepts_block_forms() {
    let s = crossing_samples(1.0);
    assert!(check_simple_crossing(&block_field(), &s));
    let diag = BlockHiggsField::new(vec![Block::simple(p(&[1.0])), Block::simple(p(&[-1.0])), Block::simple(p(&[3.0]))]).unwrap();
    assert!(check_simple_crossing(&diag.matrix(), &s));
    let mixed = BlockHiggsField::new(vec![Block::ramified(p(&[0.0])), Block::simple(p(&[3.0]))]).unwrap();
    assert!(check_simple_crossing(&mixed.matrix(), &s));
}

#[test]
fn simple_crossing_rejects_triple_ramification() {
    assert!(!check_simple_crossing(&triple_model(), &crossing_samples(1.0)));
    // Off-centre samples only: the discriminant zero is still found.
    let ring: Vec<C64> = (0..12).map(|k| C64::from_polar(0.7, 0.5 * k as f64)).collect();
    assert!(!check_simple_crossing(&triple_model(), &ring));
}

#[test]
fn single_block_normal_form() {
    let phi = BlockHiggsField::new(vec![Block::ramified(HolomorphicPoly::zero())]).unwrap();
    let (p1, p2, p3) = (p(&[0.3, -1.0]), p(&[1.0, 0.5, 0.25]), p(&[-0.7, 2.0]));
    let mut pd = PolyMatrix::zeros(2, 2);
    pd.set(0, 0, p1.clone());
    pd.set(0, 1, p2.clone());
    pd.set(1, 0, p3.clone());
    pd.set(1, 1, p1.scale(c(-1.0, 0.0)));
    let r = gauge_fix(&phi, &pd).unwrap();
    assert!(r.residual <= 1e-13, "residual {}", r.residual);
    let want = p2.add(&p3.mul(&HolomorphicPoly::z()));
    assert_eq!(r.normal_phi_dot.get(0, 1), &want);
    for (i, j) in [(0, 0), (1, 0), (1, 1)] {
        assert!(r.normal_phi_dot.get(i, j).is_zero());
    }
}

#[test]
fn zero_deformation_gives_zero_gauge() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (phi, _) = random_instance(&mut rng, 4, 1, false).unwrap();
    let r = gauge_fix(&phi, &PolyMatrix::zeros(4, 4)).unwrap();
    assert_eq!(r.residual, 0.0);
    assert!(r.gamma_dot.entries.iter().all(|e| e.num.is_zero()));
}

#[test]
fn two_blocks_constant_separation() {
    let phi = BlockHiggsField::new(vec![Block::ramified(p(&[1.5])), Block::ramified(p(&[-1.5]))]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(20240611);
    let (_, pd) = random_instance(&mut rng, 4, 0, false).unwrap();
    let r = gauge_fix(&phi, &pd).unwrap();
    assert!(r.residual <= 1e-10, "residual {}", r.residual);
    let pts = sample_points(1.0);
    assert_eq!(pts.len(), 25);
    let dev = oracle_deviation(&phi, &pd, &r, &pts).unwrap();
    assert!(dev <= 1e-9, "oracle deviation {dev}");
    for &z in &pts {
        let g = r.gamma_dot.eval(z);
        let o = kron_oracle_offblock(&phi, &pd, z);
        for i in 0..2 {
            for j in 2..4 {
                assert!((g[(i, j)] - o[(i, j)]).norm() <= 1e-9);
                assert!((g[(j, i)] - o[(j, i)]).norm() <= 1e-9);
            }
        }
    }
}

#[test]
fn explicit_two_by_two_off_diagonal_entries() {
    // Entry formulas for the upper-right block between two ramified blocks
    // in one coordinate, with denominator delta^3 - 4 z delta.
    let phi = BlockHiggsField::new(vec![Block::ramified(p(&[1.0, 0.2])), Block::ramified(p(&[-2.0]))]).unwrap();
    let mut pd = PolyMatrix::zeros(4, 4);
    let ps = [p(&[0.3, 1.0]), p(&[-1.0, 0.5]), p(&[0.7]), p(&[0.1, 0.0, 1.0])];
    pd.set(0, 2, ps[0].clone());
    pd.set(0, 3, ps[1].clone());
    pd.set(1, 2, ps[2].clone());
    pd.set(1, 3, ps[3].clone());
    let r = gauge_fix(&phi, &pd).unwrap();
    for z in sample_points(1.0) {
        let (p13, p14, p23, p24) = (ps[0].eval(z), ps[1].eval(z), ps[2].eval(z), ps[3].eval(z));
        let d = c(3.0, 0.0) + 0.2 * z;
        let den = -4.0 * z * d + d * d * d;
        let two = c(2.0, 0.0);
        let want = [
            (0, 2, (two * p24 * z + p13 * (two * z - d * d) - (p14 - p23 * z) * d) / den),
            (0, 3, (two * p23 * z * z + p14 * (two * z - d * d) - (p13 - p24) * z * d) / den),
            (1, 2, (two * p14 + p23 * (two * z - d * d) + (p13 - p24) * d) / den),
            (1, 3, (two * p13 * z + p24 * (two * z - d * d) + (p14 - p23 * z) * d) / den),
        ];
        let g = r.gamma_dot.eval(z);
        for (i, j, w) in want {
            assert!((g[(i, j)] - w).norm() <= 1e-12 * (1.0 + w.norm()), "({i},{j}) {} vs {w}", g[(i, j)]);
        }
    }
}

#[test]
fn seeded_instances_match_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let configs: Vec<(usize, usize, bool)> = vec![
        (2, 0, false),
        (2, 1, false),
        (3, 0, false),
        (3, 1, false),
        (4, 0, false),
        (4, 1, false),
        (4, 2, false),
        (4, 2, true),
    ];
    let mut count = 0;
    let pts = sample_points(1.0);
    while count < 100 {
        let (n, ell, two) = configs[count % configs.len()];
        let (phi, pd) = random_instance(&mut rng, n, ell, two).unwrap();
        assert!(phi.is_trace_free());
        let r = gauge_fix(&phi, &pd).unwrap();
        assert!(r.residual <= 1e-10, "n={n} ell={ell}: residual {}", r.residual);
        let dev = oracle_deviation(&phi, &pd, &r, &pts).unwrap();
        assert!(dev <= 1e-9, "n={n} ell={ell}: oracle {dev}");
        count += 1;
    }
}

#[test]
fn two_coordinate_blocks_use_quartic_denominator() {
    let f = p(&[0.0, 1.0, 0.15]);
    let phi = BlockHiggsField::new(vec![
        Block::ramified(p(&[2.0])),
        Block::Ramified { lhat: p(&[-2.0]), coord: f.clone() },
    ])
    .unwrap();
    let sep = phi.separation().unwrap();
    let q = sep.iter().find(|d| d.kind == DenKind::TwoCoordinate).unwrap();
    // Product of the four eigenvalue differences.
    for z in sample_points(1.0) {
        let (fz, fp) = (f.eval(z), f.derivative().eval(z));
        let d = c(4.0, 0.0);
        let want = -2.0 * fz * fp * fp * (d * d + z) + fz * fz * fp.powi(4) + (z - d * d).powi(2);
        let sj = z.sqrt();
        let sk = fz.sqrt() * fp;
        let prod = (d + sj - sk) * (d + sj + sk) * (d - sj - sk) * (d - sj + sk);
        assert!((q.den.eval(z) - want).norm() < 1e-11 * want.norm());
        assert!((prod - want).norm() < 1e-11 * want.norm());
    }
}

#[test]
fn separation_violation_names_pair() {
    let phi = BlockHiggsField::new(vec![Block::ramified(p(&[0.5])), Block::simple(p(&[0.0]))]).unwrap();
    match gauge_fix(&phi, &PolyMatrix::zeros(3, 3)) {
        Err(Error::Separation { pair, .. }) => assert_eq!(pair, (0, 1)),
        other => panic!("expected separation error, got {other:?}"),
    }
}

#[test]
fn gauge_is_holomorphic() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (phi, pd) = random_instance(&mut rng, 4, 1, false).unwrap();
    let r = gauge_fix(&phi, &pd).unwrap();
    for e in &r.gamma_dot.entries {
        for q in [&e.num, &e.den] {
            let mut m = PolyMatrix::zeros(1, 1);
            m.set(0, 0, q.clone());
            assert!(m.to_field(FormType::Scalar).d_zbar().is_zero());
        }
    }
}

#[test]
fn commuting_gauge_commutes() {
    let phi = BlockHiggsField::new(vec![Block::ramified(p(&[1.0])), Block::simple(p(&[-2.0]))]).unwrap();
    let g = commuting_gauge(&phi, &[p(&[0.3, 1.0]), p(&[0.0, 0.0, 2.0])]).unwrap();
    let a = phi.matrix();
    assert!(a.mul(&g).sub(&g.mul(&a)).is_zero());
}

#[test]
fn nu_inf_of_single_block() {
    let phi = BlockHiggsField::new(vec![Block::ramified(HolomorphicPoly::zero())]).unwrap();
    let mut pd = PolyMatrix::zeros(2, 2);
    pd.set(0, 1, p(&[1.0]));
    let r = gauge_fix(&phi, &pd).unwrap();
    let z = c(0.3, 0.4);
    let nu = r.nu_inf(&phi, z).unwrap();
    assert!((nu[(0, 0)] + 1.0 / (4.0 * z)).norm() < 1e-15);
    assert!((nu[(1, 1)] - 1.0 / (4.0 * z)).norm() < 1e-15);
    assert!(r.nu_inf(&phi, c(0.0, 0.0)).is_err());
}

#[test]
fn roots_to_coeffs_examples() {
    let v = roots_to_coeffs_deriv(&[c(1.0, 0.0), c(-1.0, 0.0)], &[c(1.0, 0.0), c(-1.0, 0.0)]).unwrap();
    assert_eq!(v.len(), 3);
    assert!(v[0].norm() < 1e-15 && v[1].norm() < 1e-15 && (v[2] + 2.0).norm() < 1e-15);
    let z = roots_to_coeffs_deriv(&[c(1.0, 2.0), c(0.0, 1.0), c(3.0, 0.0)], &[c(0.0, 0.0); 3]).unwrap();
    assert!(z.iter().all(|x| x.norm() == 0.0));
}

#[test]
fn roots_to_coeffs_matches_finite_difference() {
    let lam = [c(0.2, 0.1), c(-1.0, 0.5), c(0.7, -0.9)];
    let dot = [c(1.0, -0.3), c(0.4, 0.4), c(-0.2, 1.0)];
    let coeffs = |eps: f64| {
        let roots: Vec<C64> = lam.iter().zip(&dot).map(|(l, d)| l + d * eps).collect();
        let mut q = HolomorphicPoly::constant(c(1.0, 0.0));
        for r in roots {
            q = q.mul(&HolomorphicPoly::new(vec![-r, c(1.0, 0.0)]));
        }
        let mut v: Vec<C64> = (0..=3).map(|k| q.coeff(k)).collect();
        v.reverse();
        v
    };
    let h = 1e-6;
    let (a, b) = (coeffs(h), coeffs(-h));
    let v = roots_to_coeffs_deriv(&lam, &dot).unwrap();
    for k in 0..4 {
        let fd = (a[k] - b[k]) / (2.0 * h);
        assert!((fd - v[k]).norm() < 1e-8, "{k}: {fd} vs {}", v[k]);
    }
}

#[test]
fn vertical_matrix_nonsingular_for_distinct_roots() {
    let lam = [c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 2.0)];
    let probes = [c(0.5, 0.5), c(-0.3, 1.1), c(2.0, -1.0)];
    let det = vertical_matrix(&lam, &probes).determinant();
    assert!(det.norm() > 1e-3);
}

#[test]
fn gauge_report_serializes() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (phi, pd) = random_instance(&mut rng, 3, 1, false).unwrap();
    let r = gauge_fix(&phi, &pd).unwrap();
    let rep = report(&phi, &pd, &r).unwrap();
    let js = serde_json::to_string(&rep).unwrap();
    assert!(js.contains("\"residual\"") && js.contains("\"denominators\""));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn closed_form_agrees_with_oracle(seed in any::<u64>(), n in 2usize..=4, ell_pick in 0usize..3, two in any::<bool>()) {
        let ell = ell_pick.min(n / 2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (phi, pd) = random_instance(&mut rng, n, ell, two).unwrap();
        let r = gauge_fix(&phi, &pd).unwrap();
        prop_assert!(r.residual <= 1e-10);
        let pts = sample_points(1.0);
        prop_assert!(oracle_deviation(&phi, &pd, &r, &pts).unwrap() <= 1e-9);
        for &z in pts.iter().take(5) {
            let g = r.gamma_dot.eval(z);
            let o = kron_oracle_offblock(&phi, &pd, z);
            let owner: Vec<usize> = phi.blocks.iter().enumerate().flat_map(|(i, b)| std::iter::repeat(i).take(b.size())).collect();
            for i in 0..n {
                for j in 0..n {
                    if owner[i] != owner[j] {
                        prop_assert!((g[(i, j)] - o[(i, j)]).norm() <= 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn difference_factorization(lj in -3.0f64..3.0, lk in -3.0f64..3.0, zr in -1.0f64..1.0, zi in -1.0f64..1.0) {
        let z = c(zr, zi);
        let s = z.sqrt();
        let d = c(lj - lk, 0.0);
        let lhs = d * d - 4.0 * z;
        let rhs = ((lj + s) - (lk - s)) * ((lj - s) - (lk + s));
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + lhs.norm()));
        let mixed = d * d - z;
        let rhs2 = ((lj + s) - lk) * ((lj - s) - lk);
        prop_assert!((mixed - rhs2).norm() <= 1e-12 * (1.0 + mixed.norm()));
    }

    #[test]
    fn vertical_kernel_trivial(seed in any::<u64>(), n in 2usize..=5) {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lam: Vec<C64> = (0..n).map(|k| c(k as f64 + rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3))).collect();
        let probes: Vec<C64> = (0..n).map(|k| C64::from_polar(n as f64 + 1.0, k as f64)).collect();
        let m = vertical_matrix(&lam, &probes);
        let sv = m.clone().svd(false, false).singular_values;
        let smin = sv.iter().fold(f64::INFINITY, |a, &b| a.min(b));
        prop_assert!(smin > 1e-8 * max_abs(&m));
    }
}
