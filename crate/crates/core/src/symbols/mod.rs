//! Classical symbols on a chart `(z, y; ζ, η)` with `Z = {y = 0}`, and the
//! maps that integrate them along the conormal frequency `η`.
//!
//! A [`ClassicalSymbol`] carries its homogeneous components `a_d, a_{d-1}, ...`
//! and optionally a closed-form full symbol. Evaluation multiplies by a smooth
//! cutoff in `‖(ζ, η)‖` so the homogeneous components never hit their
//! singularity at the origin.
//!
//! Integration along `η` produces a [`BoundarySymbol`] on `Z`, with a full
//! symbol (integral of the full cut-off symbol) and componentwise integrals of
//! the homogeneous terms.

pub mod presets;
pub mod quadrature;

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
pub use quadrature::{quadrature_with_tail, quadrature_with_tail_scaled};

/// Evaluator `(z, y, ζ, η) ↦ a(z, y; ζ, η)`.
pub type SymbolFn = Arc<dyn Fn(f64, f64, f64, f64) -> Complex64 + Send + Sync>;

/// Evaluator `(z, ζ) ↦ b(z; ζ)` on the hypersurface. Fallible because the
/// values are produced by quadrature.
pub type BoundaryFn = Arc<dyn Fn(f64, f64) -> Result<Complex64> + Send + Sync>;

/// Default radius beyond which the cutoff is identically one.
pub const DEFAULT_CUTOFF_RADIUS: f64 = 1.0;

/// Default relative tolerance of the η-quadrature.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Largest number of homogeneous components kept in an expansion.
pub const MAX_COMPONENTS: usize = 5;

/// Smooth cutoff: 0 for `r ≤ r₀/2`, 1 for `r ≥ r₀`, quintic blend in between.
pub fn cutoff(r: f64, radius: f64) -> f64 {
    let lo = 0.5 * radius;
    if r <= lo {
        0.0
    } else if r >= radius {
        1.0
    } else {
        let t = (r - lo) / (radius - lo);
        t * t * t * (10.0 - 15.0 * t + 6.0 * t * t)
    }
}

/// One homogeneous term `a_j` of a classical expansion.
#[derive(Clone)]
pub struct HomogeneousComponent {
    pub degree: f64,
    eval: SymbolFn,
}

impl HomogeneousComponent {
    pub fn new<F>(degree: f64, f: F) -> Self
    where
        F: Fn(f64, f64, f64, f64) -> Complex64 + Send + Sync + 'static,
    {
        Self {
            degree,
            eval: Arc::new(f),
        }
    }

    pub fn zero(degree: f64) -> Self {
        Self::new(degree, |_, _, _, _| Complex64::new(0.0, 0.0))
    }

    #[inline]
    pub fn eval(&self, z: f64, y: f64, zeta: f64, eta: f64) -> Complex64 {
        (self.eval)(z, y, zeta, eta)
    }
}

impl fmt::Debug for HomogeneousComponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HomogeneousComponent")
            .field("degree", &self.degree)
            .finish_non_exhaustive()
    }
}

/// A classical symbol `a ∼ Σ a_{d-l}` of degree `d`.
#[derive(Clone)]
pub struct ClassicalSymbol {
    degree: f64,
    cutoff_radius: f64,
    components: Vec<HomogeneousComponent>,
    full: Option<SymbolFn>,
    x_independent: bool,
    description: String,
}

impl fmt::Debug for ClassicalSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ClassicalSymbol")
            .field("degree", &self.degree)
            .field("cutoff_radius", &self.cutoff_radius)
            .field("components", &self.components)
            .field("has_full", &self.full.is_some())
            .field("x_independent", &self.x_independent)
            .field("description", &self.description)
            .finish()
    }
}

impl ClassicalSymbol {
    /// Symbol given by its homogeneous expansion only; evaluation sums the
    /// components.
    pub fn from_components(components: Vec<HomogeneousComponent>) -> Result<Self> {
        let first = components.first().ok_or_else(|| {
            Error::InvalidSymbol("a classical symbol needs at least one component".into())
        })?;
        if components.len() > MAX_COMPONENTS {
            return Err(Error::InvalidSymbol(format!(
                "at most {MAX_COMPONENTS} homogeneous components are supported, got {}",
                components.len()
            )));
        }
        for pair in components.windows(2) {
            if (pair[0].degree - pair[1].degree - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidSymbol(format!(
                    "component degrees must decrease by exactly 1 ({} then {})",
                    pair[0].degree, pair[1].degree
                )));
            }
        }
        Ok(Self {
            degree: first.degree,
            cutoff_radius: DEFAULT_CUTOFF_RADIUS,
            components,
            full: None,
            x_independent: false,
            description: String::new(),
        })
    }

    /// Symbol known through a closed-form full evaluator of the given degree,
    /// with no homogeneous expansion attached.
    pub fn from_full<F>(degree: f64, f: F) -> Self
    where
        F: Fn(f64, f64, f64, f64) -> Complex64 + Send + Sync + 'static,
    {
        Self {
            degree,
            cutoff_radius: DEFAULT_CUTOFF_RADIUS,
            components: Vec::new(),
            full: Some(Arc::new(f)),
            x_independent: false,
            description: String::new(),
        }
    }

    /// Attaches a closed-form full symbol whose expansion is `self.components`.
    pub fn with_full<F>(mut self, f: F) -> Self
    where
        F: Fn(f64, f64, f64, f64) -> Complex64 + Send + Sync + 'static,
    {
        self.full = Some(Arc::new(f));
        self
    }

    pub fn with_cutoff_radius(mut self, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidSymbol(format!(
                "cutoff radius must be > 0, got {radius}"
            )));
        }
        self.cutoff_radius = radius;
        Ok(self)
    }

    /// Marks the symbol as independent of `(z, y)`, i.e. a Fourier multiplier.
    pub fn x_independent(mut self, yes: bool) -> Self {
        self.x_independent = yes;
        self
    }

    pub fn described(mut self, text: impl Into<String>) -> Self {
        self.description = text.into();
        self
    }

    pub fn degree(&self) -> f64 {
        self.degree
    }

    pub fn cutoff_radius(&self) -> f64 {
        self.cutoff_radius
    }

    pub fn components(&self) -> &[HomogeneousComponent] {
        &self.components
    }

    pub fn is_x_independent(&self) -> bool {
        self.x_independent
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    /// `a(z, y; ζ, η)` including the cutoff.
    pub fn eval(&self, z: f64, y: f64, zeta: f64, eta: f64) -> Complex64 {
        let chi = cutoff(zeta.hypot(eta), self.cutoff_radius);
        if chi == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let raw = match &self.full {
            Some(f) => f(z, y, zeta, eta),
            None => self
                .components
                .iter()
                .map(|c| c.eval(z, y, zeta, eta))
                .sum(),
        };
        raw * chi
    }

    /// Shareable evaluator for the quantization routines.
    pub fn evaluator(&self) -> impl Fn(f64, f64, f64, f64) -> Complex64 + Send + Sync + '_ {
        move |z, y, zeta, eta| self.eval(z, y, zeta, eta)
    }

    /// `α·self + β·other`; both symbols must have the same degree.
    pub fn linear_combination(
        &self,
        alpha: Complex64,
        other: &Self,
        beta: Complex64,
    ) -> Result<Self> {
        if (self.degree - other.degree).abs() > 1e-12
            || self.components.len() != other.components.len()
        {
            return Err(Error::InvalidSymbol(
                "linear combinations need matching degrees and expansion lengths".into(),
            ));
        }
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(p, q)| {
                let (p, q) = (p.clone(), q.clone());
                HomogeneousComponent::new(p.degree, move |z, y, s, e| {
                    alpha * p.eval(z, y, s, e) + beta * q.eval(z, y, s, e)
                })
            })
            .collect();
        let full: Option<SymbolFn> = match (&self.full, &other.full) {
            (None, None) => None,
            _ => {
                let (p, q) = (self.clone(), other.clone());
                Some(Arc::new(move |z, y, s, e| {
                    alpha * p.raw_full(z, y, s, e) + beta * q.raw_full(z, y, s, e)
                }))
            }
        };
        Ok(Self {
            degree: self.degree,
            cutoff_radius: self.cutoff_radius,
            components,
            full,
            x_independent: self.x_independent && other.x_independent,
            description: format!(
                "({alpha})*[{}] + ({beta})*[{}]",
                self.description, other.description
            ),
        })
    }

    fn raw_full(&self, z: f64, y: f64, zeta: f64, eta: f64) -> Complex64 {
        match &self.full {
            Some(f) => f(z, y, zeta, eta),
            None => self
                .components
                .iter()
                .map(|c| c.eval(z, y, zeta, eta))
                .sum(),
        }
    }
}

/// `eval_symbol`: the cut-off full symbol at a point.
pub fn eval_symbol(s: &ClassicalSymbol, z: f64, y: f64, zeta: f64, eta: f64) -> Complex64 {
    s.eval(z, y, zeta, eta)
}

/// A homogeneous component of a boundary symbol, in `(z, ζ)`.
#[derive(Clone)]
pub struct BoundaryComponent {
    pub degree: f64,
    eval: BoundaryFn,
}

impl BoundaryComponent {
    pub fn eval(&self, z: f64, zeta: f64) -> Result<Complex64> {
        (self.eval)(z, zeta)
    }
}

impl fmt::Debug for BoundaryComponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BoundaryComponent")
            .field("degree", &self.degree)
            .finish_non_exhaustive()
    }
}

/// Symbol of an operator on `Z`: full symbol plus homogeneous components.
#[derive(Clone)]
pub struct BoundarySymbol {
    degree: f64,
    full: BoundaryFn,
    components: Vec<BoundaryComponent>,
}

impl fmt::Debug for BoundarySymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BoundarySymbol")
            .field("degree", &self.degree)
            .field("components", &self.components)
            .finish_non_exhaustive()
    }
}

impl BoundarySymbol {
    pub fn degree(&self) -> f64 {
        self.degree
    }

    pub fn components(&self) -> &[BoundaryComponent] {
        &self.components
    }

    /// `b(z; ζ)`.
    pub fn eval(&self, z: f64, zeta: f64) -> Result<Complex64> {
        (self.full)(z, zeta)
    }

    /// Sum of the homogeneous components; undefined at `ζ = 0`.
    pub fn eval_expansion(&self, z: f64, zeta: f64) -> Result<Complex64> {
        self.components.iter().map(|c| c.eval(z, zeta)).sum()
    }

    /// `c·b`, used for the `1/2π` normalization.
    pub fn scaled(&self, c: f64) -> Self {
        let full = self.full.clone();
        Self {
            degree: self.degree,
            full: Arc::new(move |z, zeta| Ok(full(z, zeta)? * c)),
            components: self
                .components
                .iter()
                .map(|comp| {
                    let inner = comp.eval.clone();
                    BoundaryComponent {
                        degree: comp.degree,
                        eval: Arc::new(move |z, zeta| Ok(inner(z, zeta)? * c)),
                    }
                })
                .collect(),
        }
    }
}

fn zero_frequency_guard(zeta: f64) -> Result<()> {
    if zeta == 0.0 {
        Err(Error::ZeroFrequency)
    } else {
        Ok(())
    }
}

/// `b(z; ζ) = ∫_ℝ a(z, 0; ζ, η) dη`, a symbol of degree `d + 1`, with
/// components `b_l = ∫ a_{l-1} dη`. Requires `d < -1`.
pub fn integrate_eta(s: &ClassicalSymbol, tol: f64) -> Result<BoundarySymbol> {
    if !(s.degree < -1.0) {
        return Err(Error::DegreeTooHigh {
            degree: s.degree,
            constraint: "η-integration needs a symbol of degree < -1",
        });
    }
    let degree = s.degree;
    let sym = s.clone();
    let full: BoundaryFn = Arc::new(move |z, zeta| {
        quadrature_with_tail_scaled(|eta| sym.eval(z, 0.0, zeta, eta), degree, tol, zeta)
    });
    let components = s
        .components
        .iter()
        .map(|comp| {
            let comp = comp.clone();
            let d = comp.degree;
            BoundaryComponent {
                degree: d + 1.0,
                eval: Arc::new(move |z, zeta| {
                    zero_frequency_guard(zeta)?;
                    if !(d < -1.0) {
                        return Err(Error::DegreeTooHigh {
                            degree: d,
                            constraint: "η-integration needs a component of degree < -1",
                        });
                    }
                    quadrature_with_tail_scaled(|eta| comp.eval(z, 0.0, zeta, eta), d, tol, zeta)
                }),
            }
        })
        .collect();
    Ok(BoundarySymbol {
        degree: degree + 1.0,
        full,
        components,
    })
}

/// Symbol of `T∘A∘E` on `Z`: `(1/2π) ∫_ℝ a(z, 0; ζ, η) dη`.
pub fn trace_symbol(s: &ClassicalSymbol, tol: f64) -> Result<BoundarySymbol> {
    Ok(integrate_eta(s, tol)?.scaled(1.0 / (2.0 * PI)))
}

/// Symbol of `P*∘A∘P` on `Z`:
/// `(2/π) ‖ζ‖² ∫_ℝ a(z, 0; ζ, η) / (‖ζ‖² + η²)² dη`, of degree `d - 1`.
/// Requires `d < 3`.
pub fn poisson_conjugation_symbol(a: &ClassicalSymbol, tol: f64) -> Result<BoundarySymbol> {
    if !(a.degree < 3.0) {
        return Err(Error::DegreeTooHigh {
            degree: a.degree,
            constraint: "Poisson conjugation needs an operator of degree < 3",
        });
    }
    let degree = a.degree;
    let sym = a.clone();
    let full: BoundaryFn = Arc::new(move |z, zeta| {
        let z2 = zeta * zeta;
        if z2 == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let integral = quadrature_with_tail_scaled(
            |eta| sym.eval(z, 0.0, zeta, eta) / (z2 + eta * eta).powi(2),
            degree - 4.0,
            tol,
            zeta,
        )?;
        Ok(integral * (2.0 / PI * z2))
    });
    let components = a
        .components
        .iter()
        .map(|comp| {
            let comp = comp.clone();
            let d = comp.degree;
            BoundaryComponent {
                degree: d - 1.0,
                eval: Arc::new(move |z, zeta| {
                    zero_frequency_guard(zeta)?;
                    let z2 = zeta * zeta;
                    let integral = quadrature_with_tail_scaled(
                        |eta| comp.eval(z, 0.0, zeta, eta) / (z2 + eta * eta).powi(2),
                        d - 4.0,
                        tol,
                        zeta,
                    )?;
                    Ok(integral * (2.0 / PI * z2))
                }),
            }
        })
        .collect();
    Ok(BoundarySymbol {
        degree: degree - 1.0,
        full,
        components,
    })
}
