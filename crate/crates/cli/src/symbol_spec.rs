//! `--symbol` values: named presets or expressions with a declared degree.

use std::sync::Arc;

use torus_pdo::symbols::{presets, ClassicalSymbol, HomogeneousComponent};
use torus_pdo::Complex64;

use crate::expr::{self, Node};

/// Radius at which an expression is sampled to build its principal part.
const PRINCIPAL_RADIUS: f64 = 1e6;

const PROBE_RADIUS: f64 = 1e3;
const PROBE_SLACK: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub enum SymbolSpec {
    One,
    Laplace,
    Resolvent(u32),
    ModulatedResolvent(u32),
    Expression { source: String, degree: f64 },
}

fn preset_power(src: &str, name: &str) -> Option<Result<u32, String>> {
    let rest = src.strip_prefix(name)?.trim_start();
    let inner = rest.strip_prefix('(')?.strip_suffix(')')?.trim();
    Some(match inner.parse::<u32>() {
        Ok(k) if k >= 1 => Ok(k),
        _ => Err(format!("{name}(k) needs an integer k >= 1, got '{inner}'")),
    })
}

impl SymbolSpec {
    /// Parses a preset name, or an expression when `degree` is given.
    pub fn parse(src: &str, degree: Option<f64>) -> Result<Self, String> {
        let s = src.trim();
        let preset = match s {
            "one" => Some(Ok(SymbolSpec::One)),
            "laplace" => Some(Ok(SymbolSpec::Laplace)),
            _ => preset_power(s, "modulated-resolvent")
                .map(|r| r.map(SymbolSpec::ModulatedResolvent))
                .or_else(|| preset_power(s, "resolvent").map(|r| r.map(SymbolSpec::Resolvent))),
        };
        if let Some(p) = preset {
            return p;
        }
        expr::parse(s).map_err(|e| format!("cannot parse symbol '{s}' {e}"))?;
        match degree {
            Some(d) if d.is_finite() => Ok(SymbolSpec::Expression {
                source: s.to_string(),
                degree: d,
            }),
            Some(d) => Err(format!("declared degree {d} is not finite")),
            None => Err(format!("symbol expression '{s}' needs a declared --degree")),
        }
    }

    pub fn build(&self) -> Result<ClassicalSymbol, String> {
        Ok(match self {
            SymbolSpec::One => presets::one(),
            SymbolSpec::Laplace => presets::laplace(),
            SymbolSpec::Resolvent(k) => presets::resolvent(*k),
            SymbolSpec::ModulatedResolvent(k) => presets::modulated_resolvent(*k),
            SymbolSpec::Expression { source, degree } => {
                let ast = Arc::new(expr::parse(source).map_err(|e| e.to_string())?);
                expression_symbol(source, ast, *degree)?
            }
        })
    }
}

fn expression_symbol(source: &str, ast: Arc<Node>, degree: f64) -> Result<ClassicalSymbol, String> {
    let full = ast.clone();
    let lead = ast.clone();
    let principal = HomogeneousComponent::new(degree, move |z, _, s, e| {
        let k = PRINCIPAL_RADIUS / s.hypot(e);
        Complex64::new(lead.eval(z, s * k, e * k) * k.powf(-degree), 0.0)
    });
    let symbol = ClassicalSymbol::from_components(vec![principal])
        .map_err(|e| e.to_string())?
        .with_full(move |z, _, s, e| Complex64::new(full.eval(z, s, e), 0.0))
        .x_independent(!ast.uses_z())
        .described(source);
    Ok(symbol)
}

/// Degree estimated from `|a(2Rω)|/|a(Rω)|` over a few directions `ω`.
pub fn probe_degree(ast: &Node) -> Option<f64> {
    let mut estimates = Vec::new();
    for k in 0..8 {
        let theta = 0.3 + k as f64 * std::f64::consts::PI / 8.0;
        let (s, e) = (theta.cos(), theta.sin());
        for z in [0.0, 1.3] {
            let a1 = ast.eval(z, PROBE_RADIUS * s, PROBE_RADIUS * e).abs();
            let a2 = ast
                .eval(z, 2.0 * PROBE_RADIUS * s, 2.0 * PROBE_RADIUS * e)
                .abs();
            if a1 > 0.0 && a2 > 0.0 && a1.is_finite() && a2.is_finite() {
                estimates.push((a2 / a1).log2());
            }
        }
    }
    if estimates.is_empty() {
        return None;
    }
    Some(estimates.iter().copied().fold(f64::NEG_INFINITY, f64::max))
}

/// A warning when the declared degree of an expression disagrees with the
/// sampled growth.
pub fn homogeneity_warning(spec: &SymbolSpec) -> Option<String> {
    let SymbolSpec::Expression { source, degree } = spec else {
        return None;
    };
    let ast = expr::parse(source).ok()?;
    match probe_degree(&ast) {
        Some(est) if (est - degree).abs() > PROBE_SLACK => Some(format!(
            "warning: symbol '{source}' declared with degree {degree} but grows like degree {est:.3} at |ξ| ~ {PROBE_RADIUS}"
        )),
        None => Some(format!("warning: symbol '{source}' vanishes or is not finite at |ξ| ~ {PROBE_RADIUS}; degree unchecked")),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets() {
        assert_eq!(SymbolSpec::parse("one", None).unwrap(), SymbolSpec::One);
        assert_eq!(
            SymbolSpec::parse("laplace", None).unwrap(),
            SymbolSpec::Laplace
        );
        assert_eq!(
            SymbolSpec::parse("resolvent(2)", None).unwrap(),
            SymbolSpec::Resolvent(2)
        );
        assert_eq!(
            SymbolSpec::parse("modulated-resolvent(1)", None).unwrap(),
            SymbolSpec::ModulatedResolvent(1)
        );
        assert!(SymbolSpec::parse("resolvent(0)", None).is_err());
        assert!(SymbolSpec::parse("resolvent(x)", None).is_err());
    }

    #[test]
    fn expression_needs_degree() {
        assert!(SymbolSpec::parse("(1+zeta^2+eta^2)^-1", None).is_err());
        let s = SymbolSpec::parse("(1+zeta^2+eta^2)^-1", Some(-2.0)).unwrap();
        let a = s.build().unwrap();
        assert_eq!(a.degree(), -2.0);
        assert!(a.is_x_independent());
        let v = a.eval(0.0, 0.0, 3.0, 4.0).re;
        assert!((v - 1.0 / 26.0).abs() < 1e-16);
    }

    #[test]
    fn principal_part_of_expression() {
        let a = SymbolSpec::parse("(2+cos(z))*(1+zeta^2+eta^2)^-2", Some(-4.0))
            .unwrap()
            .build()
            .unwrap();
        assert!(!a.is_x_independent());
        let p = a.components()[0].eval(0.5, 0.0, 3.0, 4.0).re;
        let exact = (2.0 + 0.5_f64.cos()) / 625.0;
        assert!((p / exact - 1.0).abs() < 1e-9);
    }

    #[test]
    fn probe() {
        let spec = SymbolSpec::parse("zeta^2 + eta^2", Some(2.0)).unwrap();
        assert!(homogeneity_warning(&spec).is_none());
        let spec = SymbolSpec::parse("zeta^2 + eta^2", Some(1.0)).unwrap();
        assert!(homogeneity_warning(&spec).unwrap().contains("degree 1"));
        let est = probe_degree(&expr::parse("(1+zeta^2+eta^2)^-1").unwrap()).unwrap();
        assert!((est + 2.0).abs() < 1e-5);
    }
}
