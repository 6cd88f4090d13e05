//! Adaptive Gauss-Kronrod quadrature over the real line for integrands with
//! algebraic decay.
//!
//! The integrand is folded onto the half line as `g(η) = f(η) + f(-η)`, so odd
//! integrands vanish identically before any node is summed. The half line is
//! split at a radius `R`; `[0, R]` is integrated by globally adaptive 15-point
//! Gauss-Kronrod bisection. On `[R, ∞)` the leading power law `c·η^d`, with `c`
//! read off `g(R)`, is integrated in closed form and the remainder
//! `g(η) - c·η^d` is integrated after the substitution `η = R/t`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Kronrod abscissae on `[0, 1]` in decreasing order; the last one is the center.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// 7-point Gauss weights matching `XGK[1]`, `XGK[3]`, `XGK[5]` and the center.
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Maximum number of bisections of a single panel.
pub const MAX_DEPTH: u32 = 60;
/// Maximum number of panels held by one adaptive integration.
pub const MAX_PANELS: usize = 4000;

/// Radius of the adaptive core for a given frequency scale.
pub fn core_radius(scale: f64) -> f64 {
    (8.0 * scale.abs()).max(32.0)
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    depth: u32,
    value: Complex64,
    error: f64,
    abs: f64,
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err;
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 {
            res_asc * scale
        } else {
            res_asc
        };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

fn kronrod15<F>(f: &F, a: f64, b: f64, depth: u32) -> Panel
where
    F: Fn(f64) -> Complex64,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);

    let mut fv1 = [Complex64::new(0.0, 0.0); 7];
    let mut fv2 = [Complex64::new(0.0, 0.0); 7];
    let mut res_k = f_center * WGK[7];
    let mut res_g = f_center * WG[3];
    let mut res_abs = f_center.norm() * WGK[7];

    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv1[j] = f1;
        fv2[j] = f2;
        let sum = f1 + f2;
        res_k += sum * WGK[j];
        res_abs += WGK[j] * (f1.norm() + f2.norm());
        if j % 2 == 1 {
            res_g += sum * WG[j / 2];
        }
    }

    let mean = res_k * 0.5;
    let mut res_asc = WGK[7] * (f_center - mean).norm();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).norm() + (fv2[j] - mean).norm());
    }

    let len = half.abs();
    let value = res_k * half;
    let err = ((res_k - res_g) * half).norm();
    let error = rescale_error(err, res_abs * len, res_asc * len);
    Panel {
        a,
        b,
        depth,
        value,
        error,
        abs: res_abs * len,
    }
}

/// Result of one adaptive integration over a finite interval.
#[derive(Debug, Clone, Copy)]
struct Adaptive {
    value: Complex64,
    error: f64,
    abs: f64,
}

/// Globally adaptive bisection: always split the panel with the largest error
/// estimate until the summed estimate falls below `tol · ∫|f|`.
fn adaptive<F>(f: &F, a: f64, b: f64, rel_tol: f64, abs_floor: f64) -> Result<Adaptive>
where
    F: Fn(f64) -> Complex64,
{
    if a == b {
        return Ok(Adaptive {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
            abs: 0.0,
        });
    }
    // Four initial panels so that a narrow feature near the middle is not missed.
    let mut panels: Vec<Panel> = (0..4)
        .map(|k| {
            let lo = a + (b - a) * k as f64 / 4.0;
            let hi = if k == 3 {
                b
            } else {
                a + (b - a) * (k + 1) as f64 / 4.0
            };
            kronrod15(f, lo, hi, 0)
        })
        .collect();

    loop {
        let total_err: f64 = panels.iter().map(|p| p.error).sum();
        let total_abs: f64 = panels.iter().map(|p| p.abs).sum();
        let target = (rel_tol * total_abs).max(abs_floor);
        if total_err <= target {
            let value = panels.iter().map(|p| p.value).sum();
            return Ok(Adaptive {
                value,
                error: total_err,
                abs: total_abs,
            });
        }
        if panels.len() >= MAX_PANELS {
            return Err(Error::NonConvergent(format!(
                "{} panels on [{a}, {b}], error estimate {total_err:e} > target {target:e}",
                panels.len()
            )));
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("panel list is never empty");
        let p = panels.swap_remove(worst);
        if p.depth >= MAX_DEPTH {
            return Err(Error::NonConvergent(format!(
                "depth bound {MAX_DEPTH} reached near [{}, {}]",
                p.a, p.b
            )));
        }
        let mid = 0.5 * (p.a + p.b);
        panels.push(kronrod15(f, p.a, mid, p.depth + 1));
        panels.push(kronrod15(f, mid, p.b, p.depth + 1));
    }
}

fn check_decay(decay_degree: f64) -> Result<()> {
    if !(decay_degree < -1.0) {
        return Err(Error::DegreeTooHigh {
            degree: decay_degree,
            constraint: "integrand decay degree must be < -1 for the tail to be integrable",
        });
    }
    Ok(())
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "quadrature tolerance must be > 0, got {tol}"
        )));
    }
    Ok(())
}

/// `∫_R^∞ g(η) dη` for `g(η) ≈ c·η^d`, `d < -1`.
fn tail<F>(g: &F, radius: f64, decay_degree: f64, rel_tol: f64, abs_floor: f64) -> Result<Adaptive>
where
    F: Fn(f64) -> Complex64,
{
    let g_r = g(radius);
    let leading = g_r * (radius / (-decay_degree - 1.0));
    // Remainder after removing the fitted power law, mapped onto t ∈ (0, 1].
    let remainder = |t: f64| {
        let eta = radius / t;
        let fitted = g_r * t.powf(-decay_degree);
        let value = (g(eta) - fitted) * (radius / (t * t));
        if value.re.is_finite() && value.im.is_finite() {
            value
        } else {
            Complex64::new(0.0, 0.0)
        }
    };
    let rest = adaptive(&remainder, 0.0, 1.0, rel_tol, abs_floor)?;
    Ok(Adaptive {
        value: leading + rest.value,
        error: rest.error,
        abs: leading.norm() + rest.abs,
    })
}

/// `∫_ℝ f(η) dη` for an integrand bounded by `C|η|^d` at infinity.
///
/// Uses the default core radius `R = 32`. See [`quadrature_with_tail_scaled`].
pub fn quadrature_with_tail<F>(f: F, decay_degree: f64, tol: f64) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    quadrature_with_tail_scaled(f, decay_degree, tol, 0.0)
}

/// `∫_ℝ f(η) dη` with the adaptive core on `[-R, R]`, `R = max(8·scale, 32)`.
///
/// `scale` is the frequency at which the integrand turns into its power-law
/// regime (for symbols, `‖ζ‖`). The relative error is controlled against
/// `∫|f|`, so integrals with heavy cancellation are accurate in absolute terms.
pub fn quadrature_with_tail_scaled<F>(
    f: F,
    decay_degree: f64,
    tol: f64,
    scale: f64,
) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    check_decay(decay_degree)?;
    check_tol(tol)?;
    let folded = |eta: f64| f(eta) + f(-eta);
    half_line(&folded, 0.0, decay_degree, tol, scale)
}

/// `∫_a^∞ f(η) dη` for an integrand with algebraic decay of degree `d < -1`.
pub fn half_line_integral<F>(f: F, start: f64, decay_degree: f64, tol: f64) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    check_decay(decay_degree)?;
    check_tol(tol)?;
    half_line(&f, start, decay_degree, tol, start)
}

fn half_line<F>(g: &F, start: f64, decay_degree: f64, tol: f64, scale: f64) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    let radius = start.max(0.0) + core_radius(scale);
    let core = adaptive(g, start, radius, tol * 0.5, 0.0)?;
    let floor = (tol * 0.5 * core.abs).max(f64::MIN_POSITIVE);
    let tail = tail(g, radius, decay_degree, tol * 0.5, floor)?;
    let total = core.value + tail.value;
    let err = core.error + tail.error;
    let scale_abs = core.abs + tail.abs;
    if err > tol * scale_abs.max(f64::MIN_POSITIVE) * 1.000_001 {
        return Err(Error::NonConvergent(format!(
            "error estimate {err:e} above requested relative tolerance {tol:e}"
        )));
    }
    Ok(total)
}

/// `∫_a^b f` by the same adaptive engine, for finite intervals.
pub fn finite_integral<F>(f: F, a: f64, b: f64, tol: f64) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    check_tol(tol)?;
    Ok(adaptive(&f, a, b, tol, 0.0)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn lorentzian_gives_pi() {
        let v = quadrature_with_tail(|e| c(1.0 / (1.0 + e * e)), -2.0, 1e-10).unwrap();
        assert!((v.re - PI).abs() / PI <= 1e-10, "{v}");
        assert_eq!(v.im, 0.0);
    }

    #[test]
    fn odd_integrand_is_exactly_zero() {
        let v = quadrature_with_tail(|e| c(e / (1.0 + e * e).powi(2)), -3.0, 1e-10).unwrap();
        assert_eq!(v, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn squared_lorentzian() {
        // ∫ (4+η²)⁻² dη = π/(2·2³)
        let v = quadrature_with_tail(|e| c((4.0 + e * e).powi(-2)), -4.0, 1e-10).unwrap();
        let exact = PI / 16.0;
        assert!((v.re - exact).abs() / exact <= 1e-10);
    }

    #[test]
    fn fractional_decay() {
        // ∫ (1+η²)^{-3/4} dη = √π Γ(1/4) / Γ(3/4)
        let exact = PI.sqrt() * 3.625_609_908_221_908 / 1.225_416_702_465_177_6;
        let v = quadrature_with_tail(|e| c((1.0 + e * e).powf(-0.75)), -1.5, 1e-10).unwrap();
        assert!((v.re - exact).abs() / exact <= 1e-9, "{} vs {exact}", v.re);
    }

    #[test]
    fn large_scale_uses_wide_core() {
        let z = 250.0_f64;
        let v = quadrature_with_tail_scaled(|e| c(1.0 / (z * z + e * e)), -2.0, 1e-11, z).unwrap();
        assert!((v.re - PI / z).abs() / (PI / z) <= 1e-11);
    }

    #[test]
    fn half_line_tail() {
        // ∫_3^∞ η⁻² dη = 1/3
        let v = half_line_integral(|e| c(1.0 / (e * e)), 3.0, -2.0, 1e-12).unwrap();
        assert!((v.re - 1.0 / 3.0).abs() <= 1e-14);
    }

    #[test]
    fn rejects_slow_decay() {
        let err = quadrature_with_tail(|e| c(1.0 / (1.0 + e.abs())), -1.0, 1e-8).unwrap_err();
        assert!(matches!(err, Error::DegreeTooHigh { .. }));
        assert!(quadrature_with_tail(|_| c(1.0), -2.0, 0.0).is_err());
    }

    #[test]
    fn nonconvergence_is_reported() {
        // Integrand that is not integrable at the origin.
        let r = quadrature_with_tail(|e| c(1.0 / e.abs().max(1e-300)), -2.0, 1e-10);
        assert!(matches!(r, Err(Error::NonConvergent(_))), "{r:?}");
    }

    #[test]
    fn complex_integrand() {
        // ∫ (1 + iη)/(1+η²)² dη = π/2 (imaginary part odd)
        let v = quadrature_with_tail(
            |e| Complex64::new(1.0, e) / (1.0 + e * e).powi(2),
            -3.0,
            1e-12,
        )
        .unwrap();
        assert!((v.re - PI / 2.0).abs() < 1e-12 && v.im == 0.0);
    }

    #[test]
    fn finite_interval() {
        let v = finite_integral(|x| c(x.cos()), 0.0, PI / 2.0, 1e-13).unwrap();
        assert!((v.re - 1.0).abs() < 1e-13);
    }
}
