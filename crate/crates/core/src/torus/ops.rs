use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::lattice::{lattice_sum, LatticeSum};
use super::{dn_eigenvalue, CircleField, GridField, TorusGrid};
use crate::error::{Error, Result};

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// `E f = f·δ(y = 0)`: `ĉ(n, m) = f̂(n)/2π` for every retained `m`.
pub fn extend(f: &CircleField, grid: TorusGrid) -> Result<GridField> {
    if f.n_z() != grid.n_z() {
        return Err(Error::SizeMismatch {
            expected: grid.n_z(),
            actual: f.n_z(),
        });
    }
    let inv = 1.0 / (2.0 * PI);
    Ok(GridField::from_fn(grid, |n, _| f.coeff(n) * inv))
}

/// `T F = F(·, 0)`: `f̂(n) = Σ_m ĉ(n, m)` over the retained `m`.
///
/// Only meaningful for fields whose coefficients are summable in `m`; for a
/// distribution such as `E f` the result grows linearly with `N_y`.
pub fn trace(field: &GridField) -> CircleField {
    let grid = field.grid();
    CircleField::from_fn(grid.n_z(), |n| {
        field
            .row(n)
            .map(|row| row.iter().rev().sum())
            .unwrap_or_default()
    })
}

/// Flat Laplacian with the geometers' sign: `ĉ ↦ (n² + m²) ĉ`.
pub fn laplacian(field: &GridField) -> GridField {
    field.map(|n, m, c| c * (n * n + m * m) as f64)
}

/// Quasi-inverse: `ĉ ↦ ĉ/(n² + m²)` off the zero mode, which is sent to 0.
pub fn laplace_quasi_inverse(field: &GridField) -> GridField {
    field.map(|n, m, c| {
        if n == 0 && m == 0 {
            zero()
        } else {
            c / (n * n + m * m) as f64
        }
    })
}

/// Coefficient `ĉ(n, m)/f̂(n)` of the harmonic extension of `e^{inz}`.
pub fn harmonic_extension_coeff(n: i64, m: i64) -> f64 {
    if n == 0 {
        return if m == 0 { 1.0 } else { 0.0 };
    }
    let a = n.unsigned_abs() as f64;
    a * (PI * a).tanh() / (PI * (a * a + (m * m) as f64))
}

/// Harmonic extension of `f` off `Z` with equal traces from both sides.
///
/// On the cut cylinder `y ∈ (0, 2π)` the mode `n` is
/// `f̂(n) cosh(n(y - π))/cosh(nπ)`; its Fourier coefficients in `y` are
/// `f̂(n) |n| tanh(π|n|) / (π(n² + m²))`. Constants extend to constants.
pub fn harmonic_extension(f: &CircleField, grid: TorusGrid) -> Result<GridField> {
    if f.n_z() != grid.n_z() {
        return Err(Error::SizeMismatch {
            expected: grid.n_z(),
            actual: f.n_z(),
        });
    }
    Ok(GridField::from_fn(grid, |n, m| {
        f.coeff(n) * harmonic_extension_coeff(n, m)
    }))
}

/// Closed form `cosh(n(y - π))/cosh(nπ)` of the `y`-profile of a harmonic
/// extension, for `y ∈ [0, 2π]`.
pub fn harmonic_profile(n: i64, y: f64) -> f64 {
    let a = n.unsigned_abs() as f64;
    let y = y.rem_euclid(2.0 * PI);
    // cosh(a(y-π))/cosh(aπ) written with decaying exponentials.
    let u = (-a * y).exp();
    let v = (-a * (2.0 * PI - y)).exp();
    (u + v) / (1.0 + (-2.0 * PI * a).exp())
}

/// Bilateral Dirichlet-to-Neumann map: `f̂(n) ↦ 2|n| tanh(π|n|) f̂(n)`.
pub fn dirichlet_to_neumann(f: &CircleField) -> CircleField {
    f.map(|n, c| c * dn_eigenvalue(n))
}

/// Poisson operator. Defined as the exact harmonic extension, so constants
/// are reproduced.
pub fn poisson(f: &CircleField, grid: TorusGrid) -> Result<GridField> {
    harmonic_extension(f, grid)
}

/// `Δ⁻¹∘E∘DN f`. Agrees with [`poisson`] on mean-zero data; sends constants to 0.
pub fn poisson_factorized(f: &CircleField, grid: TorusGrid) -> Result<GridField> {
    Ok(laplace_quasi_inverse(&extend(
        &dirichlet_to_neumann(f),
        grid,
    )?))
}

/// Adjoint of [`poisson`] for `⟨·,·⟩_X` and `⟨·,·⟩_Z`:
/// `(P*G)^(n) = 2π Σ_m p(n, m) Ĝ(n, m)`.
pub fn poisson_adjoint(field: &GridField) -> CircleField {
    let grid = field.grid();
    let n_y = grid.n_y();
    CircleField::from_fn(grid.n_z(), |n| {
        let Some(row) = field.row(n) else {
            return zero();
        };
        let s: Complex64 = row
            .iter()
            .enumerate()
            .map(|(ky, &c)| c * harmonic_extension_coeff(n, TorusGrid::frequency(ky, n_y)))
            .sum();
        s * (2.0 * PI)
    })
}

/// `û(n, m) ↦ a(n, m) û(n, m)` for a symbol independent of `(z, y)`.
pub fn apply_fourier_multiplier<A>(a: A, u: &GridField) -> GridField
where
    A: Fn(f64, f64) -> Complex64,
{
    u.map(|n, m, c| {
        if c == zero() {
            c
        } else {
            a(n as f64, m as f64) * c
        }
    })
}

/// `e^{2πij/N}` for `j = 0..N`.
fn twiddles(n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|j| Complex64::from_polar(1.0, 2.0 * PI * j as f64 / n as f64))
        .collect()
}

/// Kohn-Nirenberg quantization on the grid:
/// `Au(z_k, y_l) = Σ_{n,m} e^{i(n z_k + m y_l)} a(z_k, y_l; n, m) û(n, m)`.
///
/// The sum runs over the nonzero coefficients of `u` only; the output is the
/// trigonometric interpolant of the grid values.
pub fn apply_pdo<A>(a: A, u: &GridField) -> Result<GridField>
where
    A: Fn(f64, f64, f64, f64) -> Complex64 + Sync,
{
    let grid = u.grid();
    let (n_z, n_y) = (grid.n_z(), grid.n_y());
    let support: Vec<(i64, i64, Complex64)> = u
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != zero())
        .map(|(i, &c)| {
            (
                TorusGrid::frequency(i / n_y, n_z),
                TorusGrid::frequency(i % n_y, n_y),
                c,
            )
        })
        .collect();
    let tz = twiddles(n_z);
    let ty = twiddles(n_y);
    let zs = TorusGrid::nodes(n_z);
    let ys = TorusGrid::nodes(n_y);

    let mut values = vec![zero(); grid.len()];
    values.par_chunks_mut(n_y).enumerate().for_each(|(k, row)| {
        let z = zs[k];
        for (l, out) in row.iter_mut().enumerate() {
            let y = ys[l];
            let mut acc = zero();
            for &(n, m, c) in &support {
                let jz = (n * k as i64).rem_euclid(n_z as i64) as usize;
                let jy = (m * l as i64).rem_euclid(n_y as i64) as usize;
                acc += tz[jz] * ty[jy] * a(z, y, n as f64, m as f64) * c;
            }
            *out = acc;
        }
    });
    GridField::from_physical(grid, values)
}

/// Kohn-Nirenberg quantization on `Z`:
/// `Bf(z_k) = Σ_n e^{i n z_k} b(z_k; n) f̂(n)`.
pub fn apply_pdo_on_z<B>(b: B, f: &CircleField) -> Result<CircleField>
where
    B: Fn(f64, f64) -> Result<Complex64> + Sync,
{
    let n_z = f.n_z();
    let support: Vec<(i64, Complex64)> = f.frequencies().filter(|(_, c)| *c != zero()).collect();
    let tz = twiddles(n_z);
    let zs = TorusGrid::nodes(n_z);
    let values = (0..n_z)
        .into_par_iter()
        .map(|k| {
            let mut acc = zero();
            for &(n, c) in &support {
                let j = (n * k as i64).rem_euclid(n_z as i64) as usize;
                acc += tz[j] * b(zs[k], n as f64)? * c;
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>>>()?;
    CircleField::from_physical(values)
}

/// `T∘A∘E f` on `Z` with the `m`-sum taken over all of `ℤ`:
/// `(TAEf)(z_k) = Σ_n e^{i n z_k} f̂(n) (1/2π) Σ_{m∈ℤ} a(z_k, 0; n, m)`.
///
/// Unlike `trace(apply_pdo(a, extend(f)))`, the result does not depend on
/// `N_y`. Returns the field and a bound on the tail-completion error of its
/// physical values.
pub fn trace_pdo_extension<A>(
    a: A,
    decay_degree: f64,
    f: &CircleField,
    band: usize,
) -> Result<(CircleField, f64)>
where
    A: Fn(f64, f64, f64, f64) -> Complex64 + Sync,
{
    if !(decay_degree < -1.0) {
        return Err(Error::DegreeTooHigh {
            degree: decay_degree,
            constraint: "T∘A∘E needs a symbol of degree < -1",
        });
    }
    let n_z = f.n_z();
    let support: Vec<(i64, Complex64)> = f.frequencies().filter(|(_, c)| *c != zero()).collect();
    let tz = twiddles(n_z);
    let zs = TorusGrid::nodes(n_z);
    let rows = (0..n_z)
        .into_par_iter()
        .map(|k| {
            let z = zs[k];
            let mut acc = zero();
            let mut err = 0.0;
            for &(n, c) in &support {
                let LatticeSum { value, error_bound } =
                    lattice_sum(|m| a(z, 0.0, n as f64, m), decay_degree, band)?;
                let j = (n * k as i64).rem_euclid(n_z as i64) as usize;
                acc += tz[j] * value * c / (2.0 * PI);
                err += error_bound * c.norm() / (2.0 * PI);
            }
            Ok((acc, err))
        })
        .collect::<Result<Vec<_>>>()?;
    let err = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    let field = CircleField::from_physical(rows.into_iter().map(|r| r.0).collect())?;
    Ok((field, err))
}

/// Fixed-seed band-limited field on `X` with `|n|, |m| ≤ band`.
pub fn random_grid_field(grid: TorusGrid, band: i64, seed: u64) -> GridField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    GridField::from_fn(grid, |n, m| {
        let re: f64 = rng.gen_range(-1.0..1.0);
        let im: f64 = rng.gen_range(-1.0..1.0);
        if n.abs() <= band && m.abs() <= band {
            Complex64::new(re, im)
        } else {
            zero()
        }
    })
}

/// Fixed-seed band-limited function on `Z` with `|n| ≤ band`.
pub fn random_circle_field(n_z: usize, band: i64, seed: u64) -> CircleField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    CircleField::from_fn(n_z, |n| {
        let re: f64 = rng.gen_range(-1.0..1.0);
        let im: f64 = rng.gen_range(-1.0..1.0);
        if n.abs() <= band {
            Complex64::new(re, im)
        } else {
            zero()
        }
    })
}
