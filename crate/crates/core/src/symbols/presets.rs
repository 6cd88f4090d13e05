//! Named symbols used by the verification harness and the CLI.

use num_complex::Complex64;

use super::{ClassicalSymbol, HomogeneousComponent, MAX_COMPONENTS};

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `a = 1`, the identity.
pub fn one() -> ClassicalSymbol {
    ClassicalSymbol::from_components(vec![HomogeneousComponent::new(0.0, |_, _, _, _| re(1.0))])
        .expect("single component")
        .x_independent(true)
        .described("one")
}

/// `a = ζ² + η²`, the flat Laplacian.
pub fn laplace() -> ClassicalSymbol {
    ClassicalSymbol::from_components(vec![HomogeneousComponent::new(2.0, |_, _, s, e| {
        re(s * s + e * e)
    })])
    .expect("single component")
    .x_independent(true)
    .described("laplace")
}

/// `binom(-k, j)`
fn negative_binomial(k: u32, j: u32) -> f64 {
    let mut c = 1.0;
    for i in 0..j {
        c *= -(k as f64 + i as f64) / (i as f64 + 1.0);
    }
    c
}

/// Homogeneous expansion of `(1+r²)^{-k} = Σ_j binom(-k, j) r^{-2k-2j}`,
/// truncated to [`MAX_COMPONENTS`] terms of consecutive degree.
fn resolvent_components(k: u32, modulated: bool) -> Vec<HomogeneousComponent> {
    (0..MAX_COMPONENTS as u32)
        .map(|l| {
            let degree = -((2 * k + l) as f64);
            if l % 2 == 1 {
                return HomogeneousComponent::zero(degree);
            }
            let coeff = negative_binomial(k, l / 2);
            let power = -((k + l / 2) as i32);
            HomogeneousComponent::new(degree, move |z, _, s, e| {
                let m = if modulated { 2.0 + z.cos() } else { 1.0 };
                re(m * coeff * (s * s + e * e).powi(power))
            })
        })
        .collect()
}

/// `a = (1 + ζ² + η²)^{-k}`.
pub fn resolvent(k: u32) -> ClassicalSymbol {
    assert!(k >= 1, "resolvent power must be positive");
    let power = -(k as i32);
    ClassicalSymbol::from_components(resolvent_components(k, false))
        .expect("consecutive degrees")
        .with_full(move |_, _, s, e| re((1.0 + s * s + e * e).powi(power)))
        .x_independent(true)
        .described(format!("resolvent({k})"))
}

/// `a = (2 + cos z)(1 + ζ² + η²)^{-k}`.
pub fn modulated_resolvent(k: u32) -> ClassicalSymbol {
    assert!(k >= 1, "resolvent power must be positive");
    let power = -(k as i32);
    ClassicalSymbol::from_components(resolvent_components(k, true))
        .expect("consecutive degrees")
        .with_full(move |z, _, s, e| re((2.0 + z.cos()) * (1.0 + s * s + e * e).powi(power)))
        .described(format!("modulated-resolvent({k})"))
}

/// `a = (1+ζ²+η²)^{1/2} + i·η·(1+ζ²+η²)^{-1/2}`: degree one, with an η-odd
/// part that breaks the transmission property.
pub fn odd_correction() -> ClassicalSymbol {
    let components = vec![
        HomogeneousComponent::new(1.0, |_, _, s, e| re((s * s + e * e).sqrt())),
        HomogeneousComponent::new(0.0, |_, _, s, e| {
            Complex64::new(0.0, e / (s * s + e * e).sqrt())
        }),
        HomogeneousComponent::new(-1.0, |_, _, s, e| re(0.5 / (s * s + e * e).sqrt())),
    ];
    ClassicalSymbol::from_components(components)
        .expect("consecutive degrees")
        .with_full(|_, _, s, e| {
            let q = 1.0 + s * s + e * e;
            Complex64::new(q.sqrt(), e / q.sqrt())
        })
        .x_independent(true)
        .described("odd-correction")
}
