use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use super::lattice::band_tail_bound;
use super::*;
use crate::symbols::presets;
use crate::symbols::quadrature::finite_integral;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn grid(n: usize) -> TorusGrid {
    TorusGrid::new(n, n).unwrap()
}

#[test]
fn grid_validation_and_indexing() {
    assert!(TorusGrid::new(6, 8).is_err());
    assert!(TorusGrid::new(8, 9).is_err());
    let g = TorusGrid::new(8, 16).unwrap();
    assert_eq!(
        g.z_frequencies().collect::<Vec<_>>(),
        vec![0, 1, 2, 3, -4, -3, -2, -1]
    );
    assert_eq!(TorusGrid::index(-4, 8), Some(4));
    assert_eq!(TorusGrid::index(4, 8), None);
    assert_eq!(TorusGrid::default().n_y(), 256);
}

#[test]
fn extend_constant_and_single_mode() {
    let g = grid(16);
    let e = extend(&CircleField::mode(16, 0).unwrap(), g).unwrap();
    for m in -8..8 {
        assert_eq!(e.coeff(0, m), c(1.0 / (2.0 * PI)));
        assert_eq!(e.coeff(1, m), c(0.0));
    }
    let e = extend(&CircleField::mode(16, 3).unwrap(), g).unwrap();
    for n in -8..8 {
        for m in -8..8 {
            let expected = if n == 3 { 1.0 / (2.0 * PI) } else { 0.0 };
            assert_eq!(e.coeff(n, m), c(expected));
        }
    }
    assert!(matches!(
        extend(&CircleField::mode(32, 0).unwrap(), g),
        Err(Error::SizeMismatch { .. })
    ));
}

#[test]
fn extension_and_trace_are_adjoint() {
    let g = grid(32);
    let f = random_circle_field(32, 8, 11);
    let phi = random_grid_field(g, 8, 12);
    let lhs = inner_x(&extend(&f, g).unwrap(), &phi).unwrap();
    let rhs = inner_z(&f, &trace(&phi)).unwrap();
    assert!((lhs - rhs).norm() <= 1e-13 * norm_z(&f) * norm_x(&phi));
}

#[test]
fn trace_of_single_mode() {
    let g = grid(16);
    let t = trace(&GridField::mode(g, 2, 5).unwrap());
    assert_eq!(t, CircleField::mode(16, 2).unwrap());
}

#[test]
fn trace_of_delta_grows_with_grid() {
    // E f has no trace; on a grid the row sum is N_y f̂/2π.
    for n in [16, 64] {
        let f = CircleField::mode(n, 1).unwrap();
        let t = trace(&extend(&f, grid(n)).unwrap());
        assert!((t.coeff(1).re - n as f64 / (2.0 * PI)).abs() < 1e-12 * n as f64);
    }
}

#[test]
fn trace_of_green_function_row() {
    // (1/2π) Σ_m 1/(1+m²) = coth(π)/2 up to the discarded band.
    let g = grid(64);
    let f = CircleField::mode(64, 1).unwrap();
    let t = trace(&laplace_quasi_inverse(&extend(&f, g).unwrap()));
    let exact = 0.5 / PI.tanh();
    let tail = band_tail_bound(|m| 1.0 / (1.0 + m * m), 64, -2.0).unwrap();
    let err = (t.coeff(1).re - exact).abs();
    assert!(err <= 2.0 * tail, "{err} vs {tail}");
    assert!(err > 0.1 * tail / (2.0 * PI));
}

#[test]
fn quasi_inverse_examples() {
    let g = grid(16);
    let u = GridField::mode(g, 1, 1).unwrap();
    assert_eq!(laplace_quasi_inverse(&u), u.scale(c(0.5)));
    let one = GridField::mode(g, 0, 0).unwrap();
    assert_eq!(laplace_quasi_inverse(&one), GridField::zeros(g));

    let f = random_grid_field(g, 4, 3);
    let back = laplacian(&laplace_quasi_inverse(&f));
    let expected = f.map(|n, m, v| if n == 0 && m == 0 { c(0.0) } else { v });
    assert!(back.sub(&expected).unwrap().max_abs() < 1e-15);
}

#[test]
fn harmonic_extension_of_constant() {
    let g = grid(16);
    let f = CircleField::mode(16, 0).unwrap();
    assert_eq!(
        harmonic_extension(&f, g).unwrap(),
        GridField::mode(g, 0, 0).unwrap()
    );
}

#[test]
fn harmonic_extension_coefficients_match_profile() {
    // (1/2π) ∫ cosh(n(y-π))/cosh(nπ) e^{-imy} dy by adaptive quadrature.
    for n in [1_i64, 3] {
        for m in [0_i64, 1, 5, -7, 40] {
            let integral = finite_integral(
                |y| c(harmonic_profile(n, y) * (m as f64 * y).cos()),
                0.0,
                2.0 * PI,
                1e-12,
            )
            .unwrap();
            let coeff = integral.re / (2.0 * PI);
            let expected = harmonic_extension_coeff(n, m);
            assert!(
                (coeff - expected).abs() < 1e-13,
                "n={n} m={m}: {coeff} vs {expected}"
            );
        }
    }
}

#[test]
fn harmonic_extension_physical_values() {
    let g = grid(256);
    let f = CircleField::mode(256, 1).unwrap();
    let values = harmonic_extension(&f, g).unwrap().to_physical();
    let zs = TorusGrid::nodes(256);
    let ys = TorusGrid::nodes(256);
    // Band-limited grid values differ from the profile by at most the
    // discarded coefficients.
    let tail = band_tail_bound(
        |m| harmonic_extension_coeff(1, 0) / (1.0 + m * m),
        256,
        -2.0,
    )
    .unwrap();
    let mut worst: f64 = 0.0;
    for (k, z) in zs.iter().enumerate() {
        for (l, y) in ys.iter().enumerate() {
            let exact = Complex64::from_polar(harmonic_profile(1, *y), *z);
            worst = worst.max((values[k * 256 + l] - exact).norm());
        }
    }
    assert!(worst <= tail, "{worst} vs {tail}");
}

#[test]
fn trace_of_harmonic_extension() {
    let g = grid(128);
    let f = random_circle_field(128, 12, 5);
    let t = trace(&harmonic_extension(&f, g).unwrap());
    for (n, fhat) in f.frequencies() {
        let bound = if n == 0 {
            0.0
        } else {
            let p = harmonic_extension_coeff(n, 0) * (n * n) as f64;
            band_tail_bound(|m| p / ((n * n) as f64 + m * m), 128, -2.0).unwrap()
        };
        assert!(
            (t.coeff(n) - fhat).norm() <= bound * fhat.norm() + 1e-14,
            "n={n}"
        );
    }
}

#[test]
fn dn_kernel_and_values() {
    let one = CircleField::mode(32, 0).unwrap();
    assert_eq!(dirichlet_to_neumann(&one), CircleField::zeros(32));
    let f = CircleField::mode(32, 5).unwrap();
    let out = dirichlet_to_neumann(&f);
    assert!((out.coeff(5).re - 10.0 * (5.0 * PI).tanh()).abs() < 1e-14);
    for n in [10_i64, 20, 40] {
        assert!((dn_eigenvalue(n) / (2.0 * n as f64) - 1.0).abs() < 1e-15);
    }
}

#[test]
fn dn_matches_normal_derivatives_of_profile() {
    // DN = -(∂_y F(0⁺) - ∂_y F(2π⁻)), one-sided finite differences.
    for n in [1_i64, 2, 5] {
        let h = 1e-5;
        let d0 = (-3.0 * harmonic_profile(n, 0.0) + 4.0 * harmonic_profile(n, h)
            - harmonic_profile(n, 2.0 * h))
            / (2.0 * h);
        let top = 2.0 * PI;
        let d1 = (3.0 * harmonic_profile(n, top) - 4.0 * harmonic_profile(n, top - h)
            + harmonic_profile(n, top - 2.0 * h))
            / (2.0 * h);
        let dn = -(d0 - d1);
        assert!(
            (dn - dn_eigenvalue(n)).abs() < 1e-6 * dn_eigenvalue(n),
            "n={n}: {dn}"
        );
    }
}

#[test]
fn poisson_and_factorization() {
    let g = grid(64);
    let mut f = random_circle_field(64, 16, 9);
    let p = poisson(&f, g).unwrap();
    // Δ P f = E DN f, exactly on coefficients.
    let lhs = laplacian(&p);
    let rhs = extend(&dirichlet_to_neumann(&f), g).unwrap();
    assert!(lhs.sub(&rhs).unwrap().max_abs() <= 1e-15 * f.max_abs());

    f = f.map(|n, v| if n == 0 { c(0.0) } else { v });
    let diff = poisson(&f, g)
        .unwrap()
        .sub(&poisson_factorized(&f, g).unwrap())
        .unwrap();
    assert!(diff.max_abs() <= 1e-13 * f.max_abs());

    let one = CircleField::mode(64, 0).unwrap();
    assert_eq!(poisson(&one, g).unwrap(), GridField::mode(g, 0, 0).unwrap());
    assert_eq!(poisson_factorized(&one, g).unwrap(), GridField::zeros(g));
}

#[test]
fn poisson_adjoint_is_adjoint() {
    let g = grid(32);
    let f = random_circle_field(32, 10, 1);
    let big = random_grid_field(g, 15, 2);
    let lhs = inner_x(&poisson(&f, g).unwrap(), &big).unwrap();
    let rhs = inner_z(&f, &poisson_adjoint(&big)).unwrap();
    assert!((lhs - rhs).norm() < 1e-12 * lhs.norm().max(1.0));
}

#[test]
fn apply_pdo_examples() {
    let g = grid(16);
    let u = random_grid_field(g, 5, 4);
    let id = apply_pdo(|_, _, _, _| c(1.0), &u).unwrap();
    assert!(id.sub(&u).unwrap().max_abs() < 1e-13);

    let mode = GridField::mode(g, 2, 1).unwrap();
    let out = apply_pdo(|_, _, s, e| c(1.0 / (1.0 + s * s + e * e)), &mode).unwrap();
    assert!(out.sub(&mode.scale(c(1.0 / 6.0))).unwrap().max_abs() < 1e-15);

    let g = grid(32);
    let mode = GridField::mode(g, 0, 1).unwrap();
    let a = presets::modulated_resolvent(1);
    let out = apply_pdo(|z, y, s, e| a.eval(z, y, s, e), &mode)
        .unwrap()
        .to_physical();
    let zs = TorusGrid::nodes(32);
    let ys = TorusGrid::nodes(32);
    for (k, z) in zs.iter().enumerate() {
        for (l, y) in ys.iter().enumerate() {
            let exact = Complex64::from_polar(0.5 * (2.0 + z.cos()), *y);
            assert!((out[k * 32 + l] - exact).norm() <= 1e-12 * exact.norm());
        }
    }
}

#[test]
fn pdo_composition_of_multipliers() {
    let g = grid(32);
    let u = random_grid_field(g, 10, 8);
    let a1 = |_: f64, _: f64, s: f64, e: f64| c(1.0 / (1.0 + s * s + e * e));
    let a2 = |_: f64, _: f64, s: f64, e: f64| Complex64::new(s, e * e);
    let two_steps = apply_pdo(a1, &apply_pdo(a2, &u).unwrap()).unwrap();
    let product = apply_fourier_multiplier(|s, e| a1(0.0, 0.0, s, e) * a2(0.0, 0.0, s, e), &u);
    assert!(two_steps.sub(&product).unwrap().max_abs() <= 1e-12 * product.max_abs());
}

#[test]
fn multiplier_on_circle() {
    let f = random_circle_field(16, 5, 2);
    assert_eq!(apply_multiplier_z(&FourierMultiplierZ::identity(), &f), f);
    assert_eq!(
        apply_multiplier_z(&FourierMultiplierZ::dirichlet_to_neumann(), &f),
        dirichlet_to_neumann(&f)
    );
    let shift = FourierMultiplierZ::new(|n| c(n as f64));
    let e1 = CircleField::mode(16, 1).unwrap();
    assert_eq!(apply_multiplier_z(&shift, &e1), e1);
}

#[test]
fn pdo_on_z_matches_multiplier() {
    let f = random_circle_field(32, 8, 7);
    let out = apply_pdo_on_z(|_, s| Ok(c(dn_eigenvalue(s as i64))), &f).unwrap();
    assert!(out.sub(&dirichlet_to_neumann(&f)).unwrap().max_abs() < 1e-12);
}

#[test]
fn inner_products_and_forms() {
    let g = grid(16);
    let one = GridField::mode(g, 0, 0).unwrap();
    assert!((inner_x(&one, &one).unwrap() - c(4.0 * PI * PI)).norm() < 1e-12);
    let u = random_grid_field(g, 6, 1);
    let q = quadratic_form(|f| Ok(f.clone()), &u).unwrap();
    assert!(q.re >= 0.0 && q.im.abs() < 1e-12 * q.re);
    assert!((q.re - norm_x(&u).powi(2)).abs() < 1e-12 * q.re);
}

#[test]
fn dirichlet_energy_of_poisson_extension() {
    // Q_Δ(P e^{inz}) = ⟨DN e^{inz}, e^{inz}⟩_Z up to the discarded band.
    let g = grid(256);
    for n in [1_i64, 4, 9] {
        let f = CircleField::mode(256, n).unwrap();
        let q = quadratic_form(|u| Ok(laplacian(u)), &poisson(&f, g).unwrap()).unwrap();
        let target = inner_z(&dirichlet_to_neumann(&f), &f).unwrap();
        let p0 = harmonic_extension_coeff(n, 0) * (n * n) as f64;
        let nn = (n * n) as f64;
        let tail = band_tail_bound(|m| p0 * p0 / (nn + m * m), 256, -2.0).unwrap() * 4.0 * PI * PI;
        assert!((q - target).norm() <= tail, "n={n}");
        assert!(q.re <= target.re);
    }
}

#[test]
fn dn_and_green_multiplier_are_even_and_inverse() {
    let dn = FourierMultiplierZ::dirichlet_to_neumann();
    let b = FourierMultiplierZ::trace_green();
    for n in 1..=64_i64 {
        assert_eq!(dn.eval(n), dn.eval(-n));
        assert_eq!(b.eval(n), b.eval(-n));
        assert_eq!(dn.eval(n).im, 0.0);
        assert!((b.eval(n) * dn.eval(n) - c(1.0)).norm() <= 1e-14);
    }
    assert_eq!(b.eval(0), c(0.0));
}

#[test]
fn trace_pdo_extension_is_grid_independent() {
    let a = presets::modulated_resolvent(2);
    let f = CircleField::mode(32, 3).unwrap();
    let (out, err) = trace_pdo_extension(|z, y, s, e| a.eval(z, y, s, e), -4.0, &f, 2048).unwrap();
    // (1/2π) Σ_m (10+m²)⁻² in closed form.
    let s = 10.0_f64.sqrt();
    let csch = 1.0 / (PI * s).sinh();
    let lattice = PI / (PI * s).tanh() / (2.0 * s.powi(3)) + PI * PI * csch * csch / (2.0 * s * s);
    let values = out.to_physical();
    for (k, z) in TorusGrid::nodes(32).iter().enumerate() {
        let exact = Complex64::from_polar((2.0 + z.cos()) * lattice / (2.0 * PI), 3.0 * z);
        assert!((values[k] - exact).norm() <= err + 1e-15, "{k}");
    }
    assert!(trace_pdo_extension(|_, _, _, _| c(1.0), 0.0, &f, 16).is_err());
}

#[test]
fn physical_round_trip() {
    let g = TorusGrid::new(16, 8).unwrap();
    let u = random_grid_field(g, 3, 21);
    let back = GridField::from_physical(g, u.to_physical()).unwrap();
    assert!(back.sub(&u).unwrap().max_abs() < 1e-14);
    let f = random_circle_field(16, 7, 22);
    let back = CircleField::from_physical(f.to_physical()).unwrap();
    assert!(back.sub(&f).unwrap().max_abs() < 1e-14);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn adjointness_holds_for_random_fields(seed_f in any::<u64>(), seed_phi in any::<u64>(), band in 1_i64..8) {
        let g = grid(16);
        let f = random_circle_field(16, band, seed_f);
        let phi = random_grid_field(g, band, seed_phi);
        let lhs = inner_x(&extend(&f, g).unwrap(), &phi).unwrap();
        let rhs = inner_z(&f, &trace(&phi)).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-13 * norm_z(&f) * norm_x(&phi));
    }

    #[test]
    fn lemma_identity_for_random_data(seed in any::<u64>(), band in 1_i64..12) {
        let g = grid(32);
        let f = random_circle_field(32, band, seed);
        let lhs = laplacian(&harmonic_extension(&f, g).unwrap());
        let rhs = extend(&dirichlet_to_neumann(&f), g).unwrap();
        prop_assert!(lhs.sub(&rhs).unwrap().coeff_norm() <= 1e-13 * f.coeff_norm());
    }
}
