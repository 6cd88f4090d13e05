//! Sums over the full frequency lattice `m ∈ ℤ` and bounds on the part a
//! finite grid discards.

use num_complex::Complex64;

use crate::error::Result;
use crate::symbols::quadrature::half_line_integral;

/// Frequencies `|m| ≤ DEFAULT_DIRECT_BAND` are summed term by term.
pub const DEFAULT_DIRECT_BAND: usize = 1 << 14;

const TAIL_TOL: f64 = 1e-13;

/// A lattice sum with a bound on its tail-completion error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeSum {
    pub value: Complex64,
    pub error_bound: f64,
}

/// `Σ_{m∈ℤ} g(m)` for `|g(m)| ≲ |m|^d`, `d < -1`.
///
/// Terms with `|m| ≤ band` are added directly. Each tail `Σ_{m>M} g(±m)` is
/// replaced by the midpoint-corrected integral
/// `∫_{M+½}^∞ g + g'(M+½)/24`, whose next Euler-Maclaurin term
/// `7 g'''/5760` gives the reported error bound.
pub fn lattice_sum<G>(g: G, decay_degree: f64, band: usize) -> Result<LatticeSum>
where
    G: Fn(f64) -> Complex64,
{
    let mut direct = Complex64::new(0.0, 0.0);
    for m in (1..=band).rev() {
        let x = m as f64;
        direct += g(x) + g(-x);
    }
    direct += g(0.0);

    let start = band as f64 + 0.5;
    let d = decay_degree;
    let mut value = direct;
    let mut error_bound = f64::EPSILON * direct.norm() * 4.0;
    for side in [1.0, -1.0] {
        let h = |x: f64| g(side * x);
        let integral = half_line_integral(h, start, d, TAIL_TOL)?;
        let step = 0.25;
        let slope = (h(start + step) - h(start - step)) / (2.0 * step);
        value += integral + slope / 24.0;
        let third = (d * (d - 1.0) * (d - 2.0)).abs() * h(start).norm() / start.powi(3);
        error_bound +=
            2.0 * 7.0 / 5760.0 * third + third * step * step / 144.0 + TAIL_TOL * integral.norm();
    }
    Ok(LatticeSum { value, error_bound })
}

/// Upper bound on `Σ_{m ∉ [-N/2, N/2)} g(m)` for an even `g ≥ 0` that is
/// non-increasing on `[N/2, ∞)`: `2·(g(N/2) + ∫_{N/2}^∞ g)`.
pub fn band_tail_bound<G>(g: G, n_y: usize, decay_degree: f64) -> Result<f64>
where
    G: Fn(f64) -> f64,
{
    let start = (n_y / 2) as f64;
    let integral =
        half_line_integral(|x| Complex64::new(g(x), 0.0), start, decay_degree, TAIL_TOL)?;
    Ok(2.0 * (g(start) + integral.re) * (1.0 + 1e-9))
}
