//! Piecewise quintic Hermite interpolation on a uniform grid in `s`.

/// Value and `s`-derivative on `[s_a, s_a + d]` at fraction `tau` from
/// endpoint data `(y, y_s, y_ss)`.
#[allow(clippy::too_many_arguments)]
pub fn quintic_hermite(tau: f64, d: f64, a: [f64; 3], b: [f64; 3]) -> (f64, f64) {
    let (t2, t3, t4, t5) = (tau * tau, tau.powi(3), tau.powi(4), tau.powi(5));
    let h0 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
    let h1 = tau - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
    let h2 = 0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5;
    let h3 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
    let h4 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
    let h5 = 0.5 * t3 - t4 + 0.5 * t5;
    let d0 = -30.0 * t2 + 60.0 * t3 - 30.0 * t4;
    let d1 = 1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4;
    let d2 = tau - 4.5 * t2 + 6.0 * t3 - 2.5 * t4;
    let d3 = -d0;
    let d4 = -12.0 * t2 + 28.0 * t3 - 15.0 * t4;
    let d5 = 1.5 * t2 - 4.0 * t3 + 2.5 * t4;
    let dd = d * d;
    let y = h0 * a[0] + d * h1 * a[1] + dd * h2 * a[2] + h3 * b[0] + d * h4 * b[1] + dd * h5 * b[2];
    let ys = (d0 * a[0] + d * d1 * a[1] + dd * d2 * a[2] + d3 * b[0] + d * d4 * b[1] + dd * d5 * b[2]) / d;
    (y, ys)
}

/// Locate `x` in the increasing `grid`: `Ok(i)` on an exact node hit,
/// otherwise `Err(i)` with `grid[i] < x < grid[i + 1]`.
pub fn locate(grid: &[f64], x: f64) -> std::result::Result<usize, usize> {
    let n = grid.len();
    match grid.binary_search_by(|g| g.partial_cmp(&x).unwrap()) {
        Ok(i) => Ok(i),
        Err(i) => Err(i.clamp(1, n - 1) - 1),
    }
}
