//! Acceptance criteria 1-10, one PASS/FAIL line each.
//!
//! `cargo test -p torus-pdo-cli --test acceptance -- --nocapture --test-threads=1`

use std::f64::consts::PI;
use std::process::Command;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use torus_pdo::symbols::quadrature::quadrature_with_tail;
use torus_pdo::symbols::{
    integrate_eta, poisson_conjugation_symbol, presets, BoundarySymbol, ClassicalSymbol,
};
use torus_pdo::torus::lattice::DEFAULT_DIRECT_BAND;
use torus_pdo::torus::{
    dirichlet_to_neumann, extend, harmonic_extension, laplacian, random_circle_field, CircleField,
    TorusGrid,
};
use torus_pdo::verify::{
    convergence_slope, mu_lattice, trace_green_grid, trace_green_lattice,
    validate_mu_normalization, verify_lemma_ext, verify_theorem1, verify_theorem2, verify_theorem3,
    VerifyConfig,
};
use torus_pdo::{Complex64, Error};

fn report(id: u32, ok: bool, detail: String) {
    println!(
        "criterion {id:>2}: {} | {detail}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "criterion {id} failed: {detail}");
}

fn cfg() -> VerifyConfig {
    VerifyConfig::default()
}

// Σ_{m∈ℤ} (s²+m²)⁻¹ = (π/s) coth(πs)
fn inv_square_sum(s: f64) -> f64 {
    PI / s / (PI * s).tanh()
}

// Σ_{m∈ℤ} (s²+m²)⁻² = π coth(πs)/(2s³) + π² csch²(πs)/(2s²)
fn inv_fourth_sum(s: f64) -> f64 {
    let csch = 1.0 / (PI * s).sinh();
    PI / (PI * s).tanh() / (2.0 * s.powi(3)) + PI * PI * csch * csch / (2.0 * s * s)
}

// Σ over the grid band m ∈ [-N/2, N/2)
fn band_sum(g: impl Fn(f64) -> f64, n_y: usize) -> f64 {
    let h = (n_y / 2) as i64;
    (-h..h).map(|m| g(m as f64)).sum()
}

#[test]
fn criterion_01_dn_principal_symbol() {
    let n_z = 256;
    let f = CircleField::from_fn(n_z, |_| Complex64::new(1.0, 0.0));
    let dn = dirichlet_to_neumann(&f);
    let mut worst = 0.0_f64;
    let mut ok = true;
    for n in (-20..=-3_i64).chain(3..=20) {
        let a = n.unsigned_abs() as f64;
        let err = (dn.coeff(n).re / (2.0 * a) - 1.0).abs();
        let tol = 5.0 * (-2.0 * PI * a).exp() + 1e-12;
        ok &= err <= tol;
        worst = worst.max(err / tol);
    }
    let constant = dirichlet_to_neumann(
        &CircleField::mode(n_z, 0)
            .unwrap()
            .scale(Complex64::new(2.5, 1.0)),
    );
    let kernel = constant.max_abs();
    ok &= kernel == 0.0;
    let r = verify_theorem2(&(-20..=-3).chain(3..=20).collect::<Vec<_>>(), &cfg()).unwrap();
    ok &= r.passed;
    report(
        1,
        ok,
        format!(
            "max err/tol {worst:.3}, DN(constant) = {kernel}, thm2 report passed = {}",
            r.passed
        ),
    );
}

#[test]
fn criterion_02_b_dn_inverse() {
    let grid = TorusGrid::default();
    let n_y = grid.n_y();
    let mut exact = 0.0_f64;
    let mut worst_ratio = 0.0_f64;
    let mut ok = true;
    for n in (-64..=64_i64).filter(|&n| n != 0) {
        let a = n.unsigned_abs() as f64;
        let dn = 2.0 * a * (PI * a).tanh();
        let b = trace_green_lattice(n, 1 << 12).unwrap().value.re;
        exact = exact.max((b * dn - 1.0).abs());
        let (bg, _) = trace_green_grid(n, grid).unwrap();
        // Σ_{|m| > N_y/2} (n²+m²)⁻¹, from the closed form minus the |m| ≤ N_y/2 terms
        let h = (n_y / 2) as i64;
        let inner: f64 = (-h..=h).map(|m| 1.0 / (a * a + (m * m) as f64)).sum();
        let tail = inv_square_sum(a) - inner;
        let bound = dn * tail / PI;
        let err = (bg * dn - 1.0).abs();
        ok &= err <= bound;
        worst_ratio = worst_ratio.max(err / bound);
    }
    ok &= exact <= 1e-13;
    report(
        2,
        ok,
        format!(
            "exact B: max|B·DN - 1| = {exact:.2e}; truncated B: max err/bound = {worst_ratio:.3}"
        ),
    );
}

#[test]
fn criterion_03_lemma_identity() {
    let grid = TorusGrid::default();
    let mut worst_coeff = 0.0_f64;
    let mut worst_pair = 0.0_f64;
    let mut ok = true;
    for seed in 0..10 {
        let f = random_circle_field(grid.n_z(), (grid.n_z() / 4) as i64, 1000 + seed);
        let lhs = laplacian(&harmonic_extension(&f, grid).unwrap());
        let rhs = extend(&dirichlet_to_neumann(&f), grid).unwrap();
        let direct = lhs.sub(&rhs).unwrap().max_abs() / f.coeff_norm();
        let r = verify_lemma_ext(&f, &VerifyConfig { seed, ..cfg() }).unwrap();
        let coeff = r.errors.iter().copied().fold(direct, f64::max);
        let pairs: Vec<f64> = r
            .metadata
            .checks
            .iter()
            .filter(|c| c.name.starts_with("pairing"))
            .map(|c| c.value)
            .collect();
        ok &= pairs.len() == 3 && coeff <= 1e-13 && pairs.iter().all(|&p| p <= 1e-11) && r.passed;
        worst_coeff = worst_coeff.max(coeff);
        worst_pair = pairs.iter().copied().fold(worst_pair, f64::max);
    }
    report(
        3,
        ok,
        format!("10 fields: coefficient residual/‖f‖ ≤ {worst_coeff:.2e}, pairing residual/(‖f‖‖φ‖) ≤ {worst_pair:.2e}"),
    );
}

#[test]
fn criterion_04_theorem1_multiplier() {
    let grid = TorusGrid::default();
    let modes: Vec<i64> = (1..=20).collect();
    let r = verify_theorem1(&presets::resolvent(1), &modes, &cfg()).unwrap();
    let mut ok = r.passed;
    let mut worst_exact = 0.0_f64;
    let mut worst_ratio = 0.0_f64;
    for (i, &n) in modes.iter().enumerate() {
        let s = ((1 + n * n) as f64).sqrt();
        let emp = r.metadata.empirical[i];
        let exact = 1.0 / (PI * s).tanh() / (2.0 * s);
        let discarded = inv_square_sum(s) - band_sum(|m| 1.0 / (s * s + m * m), grid.n_y());
        let truncation = discarded / (2.0 * PI);
        let e1 = (emp - exact).abs();
        ok &= e1 <= 1e-12 + truncation;

        worst_exact = worst_exact.max(e1 / (1e-12 + truncation));
        let pred = r.metadata.predicted[i];
        let quad = (pred * 2.0 * s - 1.0).abs();
        ok &= quad <= 1e-11;
        let e2 = (emp / pred - 1.0).abs();
        let tol = 3.0 * (-2.0 * PI * s).exp() + (truncation + 1e-12) * 2.0 * s + quad;
        ok &= e2 <= tol;
        worst_ratio = worst_ratio.max(e2 / tol);
    }
    report(
        4,
        ok,
        format!("n = 1..20: max |emp - coth/2s|/tol = {worst_exact:.3}, max |emp/pred - 1|/tol = {worst_ratio:.3}"),
    );
}

#[test]
fn criterion_05_theorem1_z_dependent() {
    let modes = [4_i64, 8, 16, 32];
    let r = verify_theorem1(&presets::modulated_resolvent(2), &modes, &cfg()).unwrap();
    let slope = r.fitted_slope.unwrap_or(f64::NAN);
    // (2+cos z) e^{inz} (1/2π) Σ_m (1+n²+m²)⁻² against (2+cos z) e^{inz} / (4n³)
    let oracle: Vec<f64> = modes
        .iter()
        .map(|&n| {
            let s = ((1 + n * n) as f64).sqrt();
            (inv_fourth_sum(s) / (2.0 * PI) * 4.0 * (n as f64).powi(3) - 1.0).abs()
        })
        .collect();
    let oracle_slope = convergence_slope(
        &modes.iter().map(|&n| n as f64).collect::<Vec<_>>(),
        &oracle,
    )
    .unwrap();
    let agree = r
        .errors
        .iter()
        .zip(&oracle)
        .all(|(e, o)| (e / o - 1.0).abs() < 1e-6);
    let ok = slope <= -1.0 && agree && r.passed;
    report(
        5,
        ok,
        format!(
            "fitted slope {slope:.4} (oracle {oracle_slope:.4}), errors {:?}",
            r.errors
        ),
    );
}

#[test]
fn criterion_06_theorem3_identity() {
    let modes: Vec<i64> = (5..=20).collect();
    let r = verify_theorem3(&presets::one(), &modes, &cfg()).unwrap();
    let mut ok = r.passed;
    let mut worst = 0.0_f64;
    for (i, &n) in modes.iter().enumerate() {
        let mu = r.metadata.empirical[i];
        let e = (mu * n as f64 - 1.0).abs();
        ok &= e <= 1e-6;
        worst = worst.max(e);
    }
    // ∫_0^{2π} cosh²(n(y-π)) dy / cosh²(nπ) = (π + sinh(2πn)/(2n)) / cosh²(πn)
    let n = 5_i64;
    let x = n as f64;
    let analytic = (PI + (2.0 * PI * x).sinh() / (2.0 * x)) / (PI * x).cosh().powi(2);
    let check = validate_mu_normalization(n, 1e-13, DEFAULT_DIRECT_BAND).unwrap();
    let norm_err = (check.identity_quadrature / analytic - 1.0)
        .abs()
        .max((check.identity_lattice / analytic - 1.0).abs())
        .max(check.max_rel_diff());
    ok &= norm_err <= 1e-11;
    report(
        6,
        ok,
        format!("n = 5..20: max |μ_n·n - 1| = {worst:.2e}; normalization vs quadrature and closed form: {norm_err:.2e}"),
    );
}

#[test]
fn criterion_07_theorem3_laplace() {
    let modes: Vec<i64> = (3..=20).collect();
    let a = presets::laplace();
    let r = verify_theorem3(&a, &modes, &cfg()).unwrap();
    let mut ok = r.passed;
    let mut worst = 0.0_f64;
    for (i, &n) in modes.iter().enumerate() {
        let x = n as f64;
        let mu = mu_lattice(&a, n, DEFAULT_DIRECT_BAND).unwrap();
        let e = (mu.value.re / (2.0 * x) - 1.0).abs();
        let tol = 3.0 * (-2.0 * PI * x).exp() + mu.error_bound / (2.0 * x) + 1e-15;
        ok &= e <= tol && (r.metadata.empirical[i] - mu.value.re).abs() == 0.0;
        ok &= (r.metadata.predicted[i] / (2.0 * x) - 1.0).abs() <= 1e-11;
        worst = worst.max(e / tol);
    }
    report(
        7,
        ok,
        format!("n = 3..20: max |μ_n/2n - 1| / tol = {worst:.3}"),
    );
}

#[test]
fn criterion_08_quadrature() {
    let mut ok = true;
    let mut worst = 0.0_f64;
    for a in [1.0_f64, 2.5, 10.0] {
        let v = quadrature_with_tail(
            |e| Complex64::new((a * a + e * e).powi(-2), 0.0),
            -4.0,
            1e-10,
        )
        .unwrap();
        let exact = PI / (2.0 * a.powi(3));
        let rel = (v.re / exact - 1.0).abs();
        ok &= rel <= 1e-10;
        worst = worst.max(rel);
    }
    let odd = [
        quadrature_with_tail(
            |e| Complex64::new(e / (1.0 + e * e).powi(2), 0.0),
            -3.0,
            1e-10,
        )
        .unwrap(),
        quadrature_with_tail(
            |e| Complex64::new(e.powi(3) / (4.0 + e * e).powi(3), 0.0),
            -3.0,
            1e-10,
        )
        .unwrap(),
        quadrature_with_tail(
            |e| Complex64::new(e.sin() / (1.0 + e * e), 0.0),
            -2.0,
            1e-10,
        )
        .unwrap(),
    ];
    let odd_max = odd.iter().map(|v| v.norm()).fold(0.0, f64::max);
    ok &= odd_max <= 1e-14;
    report(
        8,
        ok,
        format!("max rel err {worst:.2e}, max |odd| {odd_max:.1e}"),
    );
}

fn run_cli(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_torus-pdo"))
        .args(args)
        .output()
        .unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn criterion_09_degree_guards() {
    let cases: [(&[&str], &str); 5] = [
        (&["verify", "thm1", "--symbol", "one"], "m < -1"),
        (&["verify", "thm1", "--symbol", "laplace"], "m < -1"),
        (
            &[
                "verify",
                "thm1",
                "--symbol",
                "sqrt(1+zeta^2+eta^2)^-1",
                "--degree",
                "-1",
            ],
            "m < -1",
        ),
        (
            &[
                "verify",
                "thm3",
                "--symbol",
                "(zeta^2+eta^2)^2",
                "--degree",
                "4",
            ],
            "d < 3",
        ),
        (
            &[
                "verify",
                "thm3",
                "--symbol",
                "sqrt(1+zeta^2+eta^2)^3",
                "--degree",
                "3",
            ],
            "d < 3",
        ),
    ];
    let mut ok = true;
    let mut codes = Vec::new();
    for (args, needle) in cases {
        let (code, err) = run_cli(args);
        ok &= code == 2 && err.contains(needle);
        codes.push(code);
    }
    let lib1 = verify_theorem1(&presets::one(), &[1, 2, 3], &cfg());
    let lib3 = verify_theorem3(
        &ClassicalSymbol::from_full(3.0, |_, _, s, e| {
            Complex64::new((s * s + e * e).powf(1.5), 0.0)
        }),
        &[1, 2, 3],
        &cfg(),
    );
    ok &= matches!(lib1, Err(Error::DegreeTooHigh { .. }))
        && matches!(lib3, Err(Error::DegreeTooHigh { .. }));
    report(
        9,
        ok,
        format!("exit codes {codes:?}; library guards return DegreeTooHigh"),
    );
}

fn homogeneity_probes(
    b: &BoundarySymbol,
    expected_degree: f64,
    rng: &mut ChaCha8Rng,
    count: usize,
) -> (bool, f64) {
    let mut worst = 0.0_f64;
    let mut ok = (b.components()[0].degree - expected_degree).abs() < 1e-12;
    for _ in 0..count {
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let zeta: f64 = sign * rng.gen_range(1.0..10.0);
        let z: f64 = rng.gen_range(0.0..2.0 * PI);
        let t = [2.0, 4.0, 8.0][rng.gen_range(0..3)];
        for comp in b.components() {
            let v1 = comp.eval(z, zeta).unwrap();
            let v2 = comp.eval(z, t * zeta).unwrap();
            let expect = v1 * t.powf(comp.degree);
            let scale = expect.norm();
            let rel = if scale == 0.0 {
                v2.norm()
            } else {
                (v2 - expect).norm() / scale
            };
            ok &= rel <= 1e-8;
            worst = worst.max(rel);
        }
    }
    (ok, worst)
}

#[test]
fn criterion_10_homogeneity() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let tol = 1e-12;
    let mut ok = true;
    let mut worst = 0.0_f64;
    let mut probes = 0;
    for a in [
        presets::resolvent(1),
        presets::modulated_resolvent(2),
        presets::resolvent(3),
    ] {
        let b = integrate_eta(&a, tol).unwrap();
        let (o, w) = homogeneity_probes(&b, a.degree() + 1.0, &mut rng, 100);
        ok &= o;
        worst = worst.max(w);
        probes += 100;
    }
    for a in [
        presets::one(),
        presets::laplace(),
        presets::resolvent(1),
        presets::modulated_resolvent(1),
    ] {
        let b = poisson_conjugation_symbol(&a, tol).unwrap();
        let (o, w) = homogeneity_probes(&b, a.degree() - 1.0, &mut rng, 100);
        ok &= o;
        worst = worst.max(w);
        probes += 100;
    }
    report(
        10,
        ok,
        format!("{probes} probes over 7 symbols, max rel deviation {worst:.2e}"),
    );
}
