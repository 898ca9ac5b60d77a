//! SU(n) local normal forms near a simple eigenvalue crossing.
//!
//! In a local frame the Higgs field is a direct sum of ramified `2 x 2`
//! blocks `(l, f f'; f', l) dz` (with `z_j = f(z)` the block coordinate) and
//! `1 x 1` blocks `l dz`. [`gauge_fix`] produces the holomorphic
//! infinitesimal gauge transformation that brings a deformation `phi_dot`
//! to block upper-triangular normal form, block by block, with closed-form
//! rational entries whose denominators are certified zero-free on the disk.

mod crossing;
pub mod rational;

pub use crossing::{
    char_poly, check_simple_crossing, crossing_samples, discriminant, discriminant_poly, roots_to_coeffs_deriv,
    triple_root_indicator, vertical_matrix,
};
pub use rational::{certify, Certificate, PolyMatrix, Rational, RationalMatrix, MIN_MODULUS};

use crate::defalg::CMat;
use crate::poly::HolomorphicPoly;
use crate::{Error, Result, C64};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::Serialize;

/// A diagonal block of the Higgs field.
#[derive(Debug, Clone, PartialEq)]
pub enum Block {
    /// `(lhat, f f'; f', lhat)`, the model `(lhat, z_j dz_j; dz_j, lhat)` in
    /// the block coordinate `z_j = f(z)`.
    Ramified { lhat: HolomorphicPoly, coord: HolomorphicPoly },
    /// `l`.
    Simple { l: HolomorphicPoly },
}

impl Block {
    pub fn ramified(lhat: HolomorphicPoly) -> Self {
        Block::Ramified { lhat, coord: HolomorphicPoly::z() }
    }

    pub fn simple(l: HolomorphicPoly) -> Self {
        Block::Simple { l }
    }

    pub fn size(&self) -> usize {
        match self {
            Block::Ramified { .. } => 2,
            Block::Simple { .. } => 1,
        }
    }

    /// Scalar part.
    pub fn base(&self) -> &HolomorphicPoly {
        match self {
            Block::Ramified { lhat, .. } => lhat,
            Block::Simple { l } => l,
        }
    }

    /// Nilpotent part `(0, f f'; f', 0)`; `None` for simple blocks.
    pub fn nilpotent(&self) -> Option<PolyMatrix> {
        match self {
            Block::Ramified { coord, .. } => {
                let d = coord.derivative();
                let mut n = PolyMatrix::zeros(2, 2);
                n.set(0, 1, coord.mul(&d));
                n.set(1, 0, d);
                Some(n)
            }
            Block::Simple { .. } => None,
        }
    }

    /// `N^2 = w I` with `w = f f'^2`.
    pub fn nilpotent_square(&self) -> HolomorphicPoly {
        match self {
            Block::Ramified { coord, .. } => {
                let d = coord.derivative();
                coord.mul(&d).mul(&d)
            }
            Block::Simple { .. } => HolomorphicPoly::zero(),
        }
    }

    pub fn matrix(&self) -> PolyMatrix {
        let k = self.size();
        let mut m = PolyMatrix::identity(k).scale(self.base());
        if let Some(n) = self.nilpotent() {
            m = m.add(&n);
        }
        m
    }

    fn coord(&self) -> Option<&HolomorphicPoly> {
        match self {
            Block::Ramified { coord, .. } => Some(coord),
            Block::Simple { .. } => None,
        }
    }

    fn shifted(&self, s: &HolomorphicPoly) -> Self {
        match self {
            Block::Ramified { lhat, coord } => Block::Ramified { lhat: lhat.sub(s), coord: coord.clone() },
            Block::Simple { l } => Block::Simple { l: l.sub(s) },
        }
    }
}

/// Which closed form a denominator belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DenKind {
    /// `f'` of a ramified diagonal block.
    Coordinate,
    /// `l_j - l_k`.
    Difference,
    /// `delta^2 - f f'^2` between a ramified and a simple block.
    Mixed,
    /// `delta (delta^2 - 4 f f'^2)` between ramified blocks in one coordinate.
    Ramified,
    /// Determinant of the Sylvester operator between ramified blocks in
    /// different coordinates.
    TwoCoordinate,
}

/// A certified denominator attached to a pair of blocks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairDenominator {
    pub pair: (usize, usize),
    pub kind: DenKind,
    #[serde(skip)]
    pub den: HolomorphicPoly,
    pub min_modulus: f64,
    pub winding: i64,
}

/// Block-diagonal Higgs field on the disk `|z| <= radius`, as the
/// coefficient of `dz`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockHiggsField {
    pub n: usize,
    pub blocks: Vec<Block>,
    pub radius: f64,
}

impl BlockHiggsField {
    pub fn new(blocks: Vec<Block>) -> Result<Self> {
        for (i, b) in blocks.iter().enumerate() {
            if let Some(f) = b.coord() {
                if f.coeff(0).norm() > 1e-14 {
                    return Err(Error::Invalid(format!("block {i}: coordinate map must vanish at 0")));
                }
                if f.coeff(1).norm() == 0.0 {
                    return Err(Error::Invalid(format!("block {i}: coordinate map must have f'(0) != 0")));
                }
            }
        }
        let n = blocks.iter().map(Block::size).sum();
        if n == 0 {
            return Err(Error::Invalid("empty block list".into()));
        }
        Ok(Self { n, blocks, radius: 1.0 })
    }

    pub fn with_radius(mut self, radius: f64) -> Self {
        self.radius = radius;
        self
    }

    /// Number of ramified blocks.
    pub fn ell(&self) -> usize {
        self.blocks.iter().filter(|b| b.size() == 2).count()
    }

    pub fn offsets(&self) -> Vec<usize> {
        self.blocks
            .iter()
            .scan(0, |o, b| {
                let cur = *o;
                *o += b.size();
                Some(cur)
            })
            .collect()
    }

    pub fn matrix(&self) -> PolyMatrix {
        let mut m = PolyMatrix::zeros(self.n, self.n);
        for (b, o) in self.blocks.iter().zip(self.offsets()) {
            m.set_block(o, o, &b.matrix());
        }
        m
    }

    pub fn eval(&self, z: C64) -> CMat {
        self.matrix().eval(z)
    }

    pub fn is_trace_free(&self) -> bool {
        self.matrix().trace().coeffs.iter().all(|c| c.norm() <= 1e-14)
    }

    /// Shift by a multiple of the identity so that the trace vanishes.
    pub fn sl_normalized(&self) -> Self {
        let s = self.matrix().trace().scale(C64::new(1.0 / self.n as f64, 0.0));
        Self { n: self.n, blocks: self.blocks.iter().map(|b| b.shifted(&s)).collect(), radius: self.radius }
    }

    /// Denominators of every closed form used by [`gauge_fix`], certified
    /// on the closed disk.
    pub fn separation(&self) -> Result<Vec<PairDenominator>> {
        let mut out = Vec::new();
        for (j, b) in self.blocks.iter().enumerate() {
            if let Some(f) = b.coord() {
                out.push(self.certified((j, j), DenKind::Coordinate, f.derivative())?);
            }
        }
        for j in 0..self.blocks.len() {
            for k in j + 1..self.blocks.len() {
                let (bj, bk) = (&self.blocks[j], &self.blocks[k]);
                let delta = bj.base().sub(bk.base());
                match (bj.size(), bk.size()) {
                    (1, 1) => out.push(self.certified((j, k), DenKind::Difference, delta)?),
                    (2, 1) | (1, 2) => {
                        let w = if bj.size() == 2 { bj.nilpotent_square() } else { bk.nilpotent_square() };
                        out.push(self.certified((j, k), DenKind::Mixed, delta.mul(&delta).sub(&w))?);
                    }
                    _ if bj.coord() == bk.coord() => {
                        // Certify both factors: a cancellation in the product
                        // would hide a zero of either.
                        let four_w = bj.nilpotent_square().scale(C64::new(4.0, 0.0));
                        self.certified((j, k), DenKind::Difference, delta.clone())?;
                        self.certified((j, k), DenKind::Mixed, delta.mul(&delta).sub(&four_w))?;
                        out.push(self.certified((j, k), DenKind::Ramified, ramified_den(&delta, &four_w))?);
                    }
                    _ => {
                        let m = sylvester_operator(bj, bk);
                        out.push(self.certified((j, k), DenKind::TwoCoordinate, m.det())?);
                    }
                }
            }
        }
        Ok(out)
    }

    fn certified(&self, pair: (usize, usize), kind: DenKind, den: HolomorphicPoly) -> Result<PairDenominator> {
        let c = certify(&den, self.radius);
        if !c.ok() {
            return Err(Error::Separation {
                pair,
                modulus: if c.winding != 0 { 0.0 } else { c.min_modulus },
                witness: format!("{}", c.witness),
            });
        }
        Ok(PairDenominator { pair, kind, den, min_modulus: c.min_modulus, winding: c.winding })
    }
}

fn ramified_den(delta: &HolomorphicPoly, four_w: &HolomorphicPoly) -> HolomorphicPoly {
    delta.mul(&delta.mul(delta).sub(four_w))
}

/// `4 x 4` matrix of `X -> A X - X B` on column-major `vec X` for two
/// ramified blocks.
fn sylvester_operator(a: &Block, b: &Block) -> PolyMatrix {
    let am = a.matrix();
    let bm = b.matrix();
    let mut m = PolyMatrix::zeros(4, 4);
    // vec(A X) = (I (x) A) vec X, vec(X B) = (B^T (x) I) vec X.
    for c in 0..2 {
        for i in 0..2 {
            for k in 0..2 {
                let row = c * 2 + i;
                let cur = m.get(row, c * 2 + k).add(am.get(i, k));
                m.set(row, c * 2 + k, cur);
                let cur = m.get(row, k * 2 + i).sub(bm.get(k, c));
                m.set(row, k * 2 + i, cur);
            }
        }
    }
    m
}

/// Output of [`gauge_fix`].
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeFixResult {
    pub gamma_dot: RationalMatrix,
    pub normal_phi_dot: PolyMatrix,
    /// Sup over samples of `|phi_dot + [phi, gamma_dot] - normal|`.
    pub residual: f64,
    pub denominators: Vec<PairDenominator>,
}

impl GaugeFixResult {
    /// `P_hat_j`: upper-right entry of the `j`-th ramified block of the
    /// normal form, as a coefficient of `dz_j`.
    pub fn pdot_hat(&self, phi: &BlockHiggsField, z: C64) -> Vec<C64> {
        phi.blocks
            .iter()
            .zip(phi.offsets())
            .filter_map(|(b, o)| {
                b.coord().map(|f| self.normal_phi_dot.get(o, o + 1).eval(z) / f.derivative().eval(z))
            })
            .collect()
    }

    /// Normalized limiting metric variation `(+) -P_hat_j / (4 z_j) sigma_3 (+) 0`.
    pub fn nu_inf(&self, phi: &BlockHiggsField, z: C64) -> Result<CMat> {
        let mut m = CMat::zeros(phi.n, phi.n);
        for (b, o) in phi.blocks.iter().zip(phi.offsets()) {
            if let Some(f) = b.coord() {
                let zj = f.eval(z);
                if zj.norm() == 0.0 {
                    return Err(Error::SingularPoint(format!("{z}")));
                }
                let p = self.normal_phi_dot.get(o, o + 1).eval(z) / f.derivative().eval(z);
                let v = -p / (4.0 * zj);
                m[(o, o)] = v;
                m[(o + 1, o + 1)] = -v;
            }
        }
        Ok(m)
    }
}

/// `gamma` of a ramified diagonal block: `(-P3/(2f'), P1/f'; 0, P3/(2f'))`
/// with `P1 = (p11 - p22)/2`, `P3 = p21`. Returns `(numerators, f')`.
pub fn diagonal_block_gamma(coord: &HolomorphicPoly, p: &PolyMatrix) -> (PolyMatrix, HolomorphicPoly) {
    let half = C64::new(0.5, 0.0);
    let p1 = p.get(0, 0).sub(p.get(1, 1)).scale(half);
    let p3 = p.get(1, 0).clone();
    let mut g = PolyMatrix::zeros(2, 2);
    g.set(0, 0, p3.scale(-half));
    g.set(0, 1, p1);
    g.set(1, 1, p3.scale(half));
    (g, coord.derivative())
}

/// Normal form of a ramified diagonal block: `(P, P2 + P3 f; 0, P)`.
pub fn diagonal_block_normal(coord: &HolomorphicPoly, p: &PolyMatrix) -> PolyMatrix {
    let pm = p.get(0, 0).add(p.get(1, 1)).scale(C64::new(0.5, 0.0));
    let mut n = PolyMatrix::zeros(2, 2);
    n.set(0, 0, pm.clone());
    n.set(1, 1, pm);
    n.set(0, 1, p.get(0, 1).add(&p.get(1, 0).mul(coord)));
    n
}

/// Solution `X = num / den` of `A X - X B = -P` for the off-diagonal block
/// between diagonal blocks `a` (rows) and `b` (columns).
pub fn off_diagonal_gamma(a: &Block, b: &Block, p: &PolyMatrix) -> (PolyMatrix, HolomorphicPoly) {
    let minus = C64::new(-1.0, 0.0);
    let delta = a.base().sub(b.base());
    match (a, b) {
        (Block::Simple { .. }, Block::Simple { .. }) => (p.scale(&HolomorphicPoly::constant(minus)), delta),
        (Block::Ramified { .. }, Block::Simple { .. }) => {
            // (delta + N)^{-1} = (delta - N) / (delta^2 - w)
            let n = a.nilpotent().unwrap();
            let inv = PolyMatrix::identity(2).scale(&delta).sub(&n);
            let den = delta.mul(&delta).sub(&a.nilpotent_square());
            (inv.mul(p).scale(&HolomorphicPoly::constant(minus)), den)
        }
        (Block::Simple { .. }, Block::Ramified { .. }) => {
            let n = b.nilpotent().unwrap();
            let inv = PolyMatrix::identity(2).scale(&delta).add(&n);
            let den = delta.mul(&delta).sub(&b.nilpotent_square());
            (p.mul(&inv).scale(&HolomorphicPoly::constant(minus)), den)
        }
        (Block::Ramified { coord: fa, .. }, Block::Ramified { coord: fb, .. }) if fa == fb => {
            // (delta + ad_N)^{-1} = ((delta^2 - 4w) - delta ad_N + ad_N^2) / (delta (delta^2 - 4w))
            let n = a.nilpotent().unwrap();
            let ad = |x: &PolyMatrix| n.mul(x).sub(&x.mul(&n));
            let four_w = a.nilpotent_square().scale(C64::new(4.0, 0.0));
            let d2 = delta.mul(&delta).sub(&four_w);
            let ap = ad(p);
            let num = p.scale(&d2).sub(&ap.scale(&delta)).add(&ad(&ap));
            (num.scale(&HolomorphicPoly::constant(minus)), ramified_den(&delta, &four_w))
        }
        _ => {
            let m = sylvester_operator(a, b);
            let adj = m.adjugate();
            let mut v = PolyMatrix::zeros(4, 1);
            for c in 0..2 {
                for i in 0..2 {
                    v.set(c * 2 + i, 0, p.get(i, c).scale(minus));
                }
            }
            let x = adj.mul(&v);
            let mut num = PolyMatrix::zeros(2, 2);
            for c in 0..2 {
                for i in 0..2 {
                    num.set(i, c, x.get(c * 2 + i, 0).clone());
                }
            }
            (num, m.det())
        }
    }
}

/// Closed-form gauge fixing of `phi_dot` (coefficient of `dz`, holomorphic
/// polynomial entries).
pub fn gauge_fix(phi: &BlockHiggsField, phi_dot: &PolyMatrix) -> Result<GaugeFixResult> {
    if phi_dot.rows != phi.n || phi_dot.cols != phi.n {
        return Err(Error::Invalid(format!("phi_dot must be {0} x {0}", phi.n)));
    }
    let denominators = phi.separation()?;
    let offs = phi.offsets();
    let mut gamma = RationalMatrix::zeros(phi.n);
    let mut normal = PolyMatrix::zeros(phi.n, phi.n);
    for (j, bj) in phi.blocks.iter().enumerate() {
        let (oj, sj) = (offs[j], bj.size());
        for (k, bk) in phi.blocks.iter().enumerate() {
            let (ok, sk) = (offs[k], bk.size());
            let p = phi_dot.block(oj, ok, sj, sk);
            if j == k {
                match bj {
                    Block::Ramified { coord, .. } => {
                        let (num, den) = diagonal_block_gamma(coord, &p);
                        gamma.set_block(oj, oj, &num, &den);
                        normal.set_block(oj, oj, &diagonal_block_normal(coord, &p));
                    }
                    Block::Simple { .. } => normal.set_block(oj, oj, &p),
                }
            } else if !p.is_zero() {
                let (num, den) = off_diagonal_gamma(bj, bk, &p);
                gamma.set_block(oj, ok, &num, &den);
            }
        }
    }
    let mut res = GaugeFixResult { gamma_dot: gamma, normal_phi_dot: normal, residual: 0.0, denominators };
    res.residual = normal_form_residual(phi, phi_dot, &res, &sample_points(phi.radius));
    Ok(res)
}

/// `max |phi_dot + [phi, gamma] - normal|` over `samples`.
pub fn normal_form_residual(phi: &BlockHiggsField, phi_dot: &PolyMatrix, r: &GaugeFixResult, samples: &[C64]) -> f64 {
    samples
        .iter()
        .map(|&z| {
            let p = phi.eval(z);
            let g = r.gamma_dot.eval(z);
            let d = phi_dot.eval(z) + (&p * &g - &g * &p) - r.normal_phi_dot.eval(z);
            d.iter().fold(0.0f64, |a, c| a.max(c.norm()))
        })
        .fold(0.0, f64::max)
}

/// Twenty-five points spread uniformly by area over the disk.
pub fn sample_points(radius: f64) -> Vec<C64> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..25)
        .map(|i| C64::from_polar(radius * ((i as f64 + 0.5) / 25.0).sqrt(), golden * i as f64))
        .collect()
}

/// Pointwise dense least-squares solve for `gamma` at `z`.
///
/// Off-diagonal blocks solve `[phi(z), gamma]_{jk} = -phi_dot(z)_{jk}`; a
/// ramified diagonal block takes `gamma = a (E11 - E22) + b E12` and kills
/// the lower-left entry and the traceless diagonal part.
pub fn oracle_gamma(phi: &BlockHiggsField, phi_dot: &PolyMatrix, z: C64) -> Result<CMat> {
    let n = phi.n;
    let pz = phi.eval(z);
    let dz = phi_dot.eval(z);
    let offs = phi.offsets();
    let mut gamma = CMat::zeros(n, n);
    let one = C64::new(1.0, 0.0);
    for (j, bj) in phi.blocks.iter().enumerate() {
        for (k, bk) in phi.blocks.iter().enumerate() {
            let (oj, ok, sj, sk) = (offs[j], offs[k], bj.size(), bk.size());
            let (basis, probe): (Vec<CMat>, Box<dyn Fn(&CMat) -> Vec<C64>>) = if j != k {
                let basis = (0..sj * sk)
                    .map(|e| {
                        let mut m = CMat::zeros(n, n);
                        m[(oj + e / sk, ok + e % sk)] = one;
                        m
                    })
                    .collect();
                let probe = move |m: &CMat| (0..sj * sk).map(|e| m[(oj + e / sk, ok + e % sk)]).collect();
                (basis, Box::new(probe))
            } else if sj == 2 {
                let mut a = CMat::zeros(n, n);
                a[(oj, oj)] = one;
                a[(oj + 1, oj + 1)] = -one;
                let mut b = CMat::zeros(n, n);
                b[(oj, oj + 1)] = one;
                let probe = move |m: &CMat| vec![m[(oj + 1, oj)], m[(oj, oj)] - m[(oj + 1, oj + 1)]];
                (vec![a, b], Box::new(probe))
            } else {
                continue;
            };
            let cols: Vec<Vec<C64>> = basis.iter().map(|e| probe(&(&pz * e - e * &pz))).collect();
            let rows = cols[0].len();
            let l = DMatrix::from_fn(rows, cols.len(), |r, c| cols[c][r]);
            let rhs = DVector::from_vec(probe(&dz).into_iter().map(|v| -v).collect());
            let x = l
                .svd(true, true)
                .solve(&rhs, 1e-14)
                .map_err(|e| Error::SingularOperator(format!("oracle block ({j},{k}): {e}")))?;
            for (c, e) in basis.iter().enumerate() {
                gamma += e * x[c];
            }
        }
    }
    Ok(gamma)
}

/// `max |gamma_closed(z) - gamma_oracle(z)|` over `samples`.
pub fn oracle_deviation(phi: &BlockHiggsField, phi_dot: &PolyMatrix, r: &GaugeFixResult, samples: &[C64]) -> Result<f64> {
    let mut worst = 0.0f64;
    for &z in samples {
        let d = r.gamma_dot.eval(z) - oracle_gamma(phi, phi_dot, z)?;
        worst = d.iter().fold(worst, |a, c| a.max(c.norm()));
    }
    Ok(worst)
}

/// Holomorphic gauge `-(+) c_j Id` removing diagonal residues; commutes
/// with `phi`.
pub fn commuting_gauge(phi: &BlockHiggsField, residues: &[HolomorphicPoly]) -> Result<PolyMatrix> {
    if residues.len() != phi.blocks.len() {
        return Err(Error::Invalid("one residue per block expected".into()));
    }
    let mut g = PolyMatrix::zeros(phi.n, phi.n);
    for ((b, o), c) in phi.blocks.iter().zip(phi.offsets()).zip(residues) {
        for i in 0..b.size() {
            g.set(o + i, o + i, c.scale(C64::new(-1.0, 0.0)));
        }
    }
    Ok(g)
}

/// Summary suitable for JSON output.
#[derive(Debug, Clone, Serialize)]
pub struct GaugeFixReport {
    pub n: usize,
    pub ell: usize,
    pub blocks: Vec<String>,
    pub residual: f64,
    pub oracle_deviation: f64,
    pub denominators: Vec<PairDenominator>,
}

pub fn report(phi: &BlockHiggsField, phi_dot: &PolyMatrix, r: &GaugeFixResult) -> Result<GaugeFixReport> {
    let blocks = phi
        .blocks
        .iter()
        .map(|b| match b {
            Block::Ramified { coord, .. } if *coord == HolomorphicPoly::z() => "ramified".to_string(),
            Block::Ramified { .. } => "ramified_coord".to_string(),
            Block::Simple { .. } => "simple".to_string(),
        })
        .collect();
    Ok(GaugeFixReport {
        n: phi.n,
        ell: phi.ell(),
        blocks,
        residual: r.residual,
        oracle_deviation: oracle_deviation(phi, phi_dot, r, &sample_points(phi.radius))?,
        denominators: r.denominators.clone(),
    })
}

fn rand_c<R: Rng>(rng: &mut R, s: f64) -> C64 {
    C64::new(rng.gen_range(-s..s), rng.gen_range(-s..s))
}

/// A random separated block field with `ell` ramified blocks and a random
/// trace-free degree-2 deformation.
///
/// Base eigenvalues sit near `4k` with small constant and linear
/// perturbations; with `two_coordinate`, ramified blocks after the first
/// use `f(z) = z + c z^2`.
pub fn random_instance<R: Rng>(rng: &mut R, n: usize, ell: usize, two_coordinate: bool) -> Result<(BlockHiggsField, PolyMatrix)> {
    if 2 * ell > n {
        return Err(Error::Invalid(format!("{ell} ramified blocks do not fit in rank {n}")));
    }
    let mut blocks = Vec::new();
    for k in 0..n - ell {
        let l = HolomorphicPoly::new(vec![C64::new(4.0 * k as f64, 0.0) + rand_c(rng, 0.3), rand_c(rng, 0.2)]);
        if k < ell {
            let coord = if two_coordinate && k > 0 {
                HolomorphicPoly::new(vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0), rand_c(rng, 0.2)])
            } else {
                HolomorphicPoly::z()
            };
            blocks.push(Block::Ramified { lhat: l, coord });
        } else {
            blocks.push(Block::Simple { l });
        }
    }
    let phi = BlockHiggsField::new(blocks)?.sl_normalized();
    let mut pd = PolyMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            pd.set(i, j, HolomorphicPoly::new((0..3).map(|_| rand_c(rng, 1.0)).collect()));
        }
    }
    let tr = pd.trace().scale(C64::new(1.0 / n as f64, 0.0));
    for i in 0..n {
        let d = pd.get(i, i).sub(&tr);
        pd.set(i, i, d);
    }
    Ok((phi, pd))
}
