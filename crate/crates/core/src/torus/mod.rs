//! Spectral model of the flat torus `X = (ℝ/2πℤ)²` with coordinates `(z, y)`
//! and the circle `Z = {y = 0}`.
//!
//! Fields are stored as Fourier coefficients with the synthesis convention
//! `u(z, y) = Σ ĉ(n, m) e^{i(nz + my)}`; frequencies run over
//! `n ∈ [-N_z/2, N_z/2)`, `m ∈ [-N_y/2, N_y/2)` and are laid out in FFT order.
//! Every operator that is a Fourier multiplier on this torus is applied
//! exactly on the coefficients.

pub mod lattice;
mod ops;

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use ops::*;

#[cfg(test)]
mod tests;

/// Default number of grid points per direction.
pub const DEFAULT_GRID: usize = 256;

/// `N_z × N_y` tensor grid on the torus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusGrid {
    n_z: usize,
    n_y: usize,
}

impl Default for TorusGrid {
    fn default() -> Self {
        Self {
            n_z: DEFAULT_GRID,
            n_y: DEFAULT_GRID,
        }
    }
}

impl TorusGrid {
    pub fn new(n_z: usize, n_y: usize) -> Result<Self> {
        if n_z < 8 || n_y < 8 || !n_z.is_multiple_of(2) || !n_y.is_multiple_of(2) {
            return Err(Error::InvalidGrid { n_z, n_y });
        }
        Ok(Self { n_z, n_y })
    }

    pub fn n_z(&self) -> usize {
        self.n_z
    }

    pub fn n_y(&self) -> usize {
        self.n_y
    }

    pub fn len(&self) -> usize {
        self.n_z * self.n_y
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Frequency stored at FFT index `k` of a length-`n` axis.
    #[inline]
    pub fn frequency(k: usize, n: usize) -> i64 {
        if k < n / 2 {
            k as i64
        } else {
            k as i64 - n as i64
        }
    }

    /// FFT index of frequency `freq`, if it is retained on a length-`n` axis.
    #[inline]
    pub fn index(freq: i64, n: usize) -> Option<usize> {
        let half = (n / 2) as i64;
        if freq < -half || freq >= half {
            None
        } else if freq >= 0 {
            Some(freq as usize)
        } else {
            Some((freq + n as i64) as usize)
        }
    }

    /// Grid nodes `2πk/N`.
    pub fn nodes(n: usize) -> Vec<f64> {
        (0..n).map(|k| 2.0 * PI * k as f64 / n as f64).collect()
    }

    /// Retained z-frequencies in FFT order.
    pub fn z_frequencies(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.n_z).map(|k| Self::frequency(k, self.n_z))
    }

    pub fn y_frequencies(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.n_y).map(|k| Self::frequency(k, self.n_y))
    }
}

/// Field on the torus, stored as Fourier coefficients `ĉ(n, m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    grid: TorusGrid,
    coeffs: Vec<Complex64>,
}

impl GridField {
    pub fn zeros(grid: TorusGrid) -> Self {
        Self {
            grid,
            coeffs: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    /// Coefficients in FFT order, `n`-major.
    pub fn from_coeffs(grid: TorusGrid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::SizeMismatch {
                expected: grid.len(),
                actual: coeffs.len(),
            });
        }
        if coeffs
            .iter()
            .any(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(Error::InvalidArgument(
                "field coefficients must be finite".into(),
            ));
        }
        Ok(Self { grid, coeffs })
    }

    /// Builds a field from `(n, m) ↦ ĉ(n, m)` over the retained frequencies.
    pub fn from_fn<F>(grid: TorusGrid, mut f: F) -> Self
    where
        F: FnMut(i64, i64) -> Complex64,
    {
        let mut coeffs = Vec::with_capacity(grid.len());
        for kz in 0..grid.n_z {
            let n = TorusGrid::frequency(kz, grid.n_z);
            for ky in 0..grid.n_y {
                coeffs.push(f(n, TorusGrid::frequency(ky, grid.n_y)));
            }
        }
        Self { grid, coeffs }
    }

    /// The single mode `e^{i(nz + my)}`.
    pub fn mode(grid: TorusGrid, n: i64, m: i64) -> Result<Self> {
        let (kz, ky) = Self::indices(&grid, n, m)?;
        let mut field = Self::zeros(grid);
        field.coeffs[kz * grid.n_y + ky] = Complex64::new(1.0, 0.0);
        Ok(field)
    }

    fn indices(grid: &TorusGrid, n: i64, m: i64) -> Result<(usize, usize)> {
        let kz = TorusGrid::index(n, grid.n_z).ok_or_else(|| {
            Error::InvalidArgument(format!("z-frequency {n} not on a {}-point grid", grid.n_z))
        })?;
        let ky = TorusGrid::index(m, grid.n_y).ok_or_else(|| {
            Error::InvalidArgument(format!("y-frequency {m} not on a {}-point grid", grid.n_y))
        })?;
        Ok((kz, ky))
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `ĉ(n, m)`, zero for frequencies outside the grid.
    pub fn coeff(&self, n: i64, m: i64) -> Complex64 {
        match Self::indices(&self.grid, n, m) {
            Ok((kz, ky)) => self.coeffs[kz * self.grid.n_y + ky],
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    /// Row of coefficients `m ↦ ĉ(n, m)` in FFT order.
    pub fn row(&self, n: i64) -> Option<&[Complex64]> {
        let kz = TorusGrid::index(n, self.grid.n_z)?;
        Some(&self.coeffs[kz * self.grid.n_y..(kz + 1) * self.grid.n_y])
    }

    /// Coefficient-wise map `ĉ(n, m) ↦ h(n, m, ĉ)`.
    pub fn map<F>(&self, h: F) -> Self
    where
        F: Fn(i64, i64, Complex64) -> Complex64,
    {
        let n_y = self.grid.n_y;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let n = TorusGrid::frequency(i / n_y, self.grid.n_z);
                let m = TorusGrid::frequency(i % n_y, n_y);
                h(n, m, c)
            })
            .collect();
        Self {
            grid: self.grid,
            coeffs,
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_grid(other)?;
        Ok(Self {
            grid: self.grid,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_grid(other)?;
        Ok(Self {
            grid: self.grid,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            grid: self.grid,
            coeffs: self.coeffs.iter().map(|v| v * c).collect(),
        }
    }

    fn check_same_grid(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::SizeMismatch {
                expected: self.grid.len(),
                actual: other.grid.len(),
            });
        }
        Ok(())
    }

    /// ℓ² norm of the coefficient array.
    pub fn coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Values `u(z_k, y_l)` at the grid nodes, `z`-major.
    pub fn to_physical(&self) -> Vec<Complex64> {
        let mut data = self.coeffs.clone();
        fft2(&mut data, self.grid.n_z, self.grid.n_y, true);
        data
    }

    /// Coefficients of the trigonometric interpolant of grid values.
    pub fn from_physical(grid: TorusGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::SizeMismatch {
                expected: grid.len(),
                actual: values.len(),
            });
        }
        let mut data = values;
        fft2(&mut data, grid.n_z, grid.n_y, false);
        let scale = 1.0 / grid.len() as f64;
        data.iter_mut().for_each(|c| *c *= scale);
        Self::from_coeffs(grid, data)
    }
}

/// In-place 2-D FFT on a `rows × cols` row-major array. `inverse` applies the
/// unnormalized `e^{+i}` synthesis.
fn fft2(data: &mut [Complex64], rows: usize, cols: usize, inverse: bool) {
    let mut planner = FftPlanner::new();
    let (row_fft, col_fft) = if inverse {
        (
            planner.plan_fft_inverse(cols),
            planner.plan_fft_inverse(rows),
        )
    } else {
        (
            planner.plan_fft_forward(cols),
            planner.plan_fft_forward(rows),
        )
    };
    for row in data.chunks_exact_mut(cols) {
        row_fft.process(row);
    }
    let mut column = vec![Complex64::new(0.0, 0.0); rows];
    for c in 0..cols {
        for r in 0..rows {
            column[r] = data[r * cols + c];
        }
        col_fft.process(&mut column);
        for r in 0..rows {
            data[r * cols + c] = column[r];
        }
    }
}

/// Function on `Z`, stored as Fourier coefficients `f̂(n)` in FFT order.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleField {
    coeffs: Vec<Complex64>,
}

impl CircleField {
    pub fn zeros(n_z: usize) -> Self {
        Self {
            coeffs: vec![Complex64::new(0.0, 0.0); n_z],
        }
    }

    pub fn from_coeffs(coeffs: Vec<Complex64>) -> Result<Self> {
        let n = coeffs.len();
        if n < 8 || !n.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "circle fields need an even number (≥ 8) of coefficients, got {n}"
            )));
        }
        if coeffs
            .iter()
            .any(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(Error::InvalidArgument(
                "field coefficients must be finite".into(),
            ));
        }
        Ok(Self { coeffs })
    }

    pub fn from_fn<F>(n_z: usize, mut f: F) -> Self
    where
        F: FnMut(i64) -> Complex64,
    {
        Self {
            coeffs: (0..n_z).map(|k| f(TorusGrid::frequency(k, n_z))).collect(),
        }
    }

    /// `e^{inz}`.
    pub fn mode(n_z: usize, n: i64) -> Result<Self> {
        let k = TorusGrid::index(n, n_z).ok_or_else(|| {
            Error::InvalidArgument(format!("frequency {n} not on a {n_z}-point circle"))
        })?;
        let mut f = Self::zeros(n_z);
        f.coeffs[k] = Complex64::new(1.0, 0.0);
        Ok(f)
    }

    pub fn n_z(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, n: i64) -> Complex64 {
        TorusGrid::index(n, self.coeffs.len())
            .map(|k| self.coeffs[k])
            .unwrap_or_default()
    }

    pub fn frequencies(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let n_z = self.coeffs.len();
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(k, &c)| (TorusGrid::frequency(k, n_z), c))
    }

    pub fn map<F>(&self, h: F) -> Self
    where
        F: Fn(i64, Complex64) -> Complex64,
    {
        Self {
            coeffs: self.frequencies().map(|(n, c)| h(n, c)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.n_z() != other.n_z() {
            return Err(Error::SizeMismatch {
                expected: self.n_z(),
                actual: other.n_z(),
            });
        }
        Ok(Self {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|v| v * c).collect(),
        }
    }

    pub fn coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Values at `z_k = 2πk/N_z`.
    pub fn to_physical(&self) -> Vec<Complex64> {
        let mut data = self.coeffs.clone();
        FftPlanner::new()
            .plan_fft_inverse(data.len())
            .process(&mut data);
        data
    }

    pub fn from_physical(values: Vec<Complex64>) -> Result<Self> {
        let mut data = values;
        let n = data.len();
        FftPlanner::new().plan_fft_forward(n).process(&mut data);
        let scale = 1.0 / n as f64;
        data.iter_mut().for_each(|c| *c *= scale);
        Self::from_coeffs(data)
    }
}

/// Diagonal operator `f̂(n) ↦ λ(n) f̂(n)` on `Z`.
#[derive(Clone)]
pub struct FourierMultiplierZ {
    eigenvalue: Arc<dyn Fn(i64) -> Complex64 + Send + Sync>,
}

impl fmt::Debug for FourierMultiplierZ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FourierMultiplierZ").finish_non_exhaustive()
    }
}

impl FourierMultiplierZ {
    pub fn new<F>(f: F) -> Self
    where
        F: Fn(i64) -> Complex64 + Send + Sync + 'static,
    {
        Self {
            eigenvalue: Arc::new(f),
        }
    }

    pub fn identity() -> Self {
        Self::new(|_| Complex64::new(1.0, 0.0))
    }

    /// `λ(n) = 2|n| tanh(π|n|)`.
    pub fn dirichlet_to_neumann() -> Self {
        Self::new(|n| Complex64::new(dn_eigenvalue(n), 0.0))
    }

    /// Exact `B = T∘Δ⁻¹∘E`: `λ(n) = coth(π|n|)/(2|n|)`, zero at `n = 0`.
    pub fn trace_green() -> Self {
        Self::new(|n| Complex64::new(trace_green_eigenvalue(n), 0.0))
    }

    pub fn eval(&self, n: i64) -> Complex64 {
        (self.eigenvalue)(n)
    }
}

/// `apply_multiplier_Z`
pub fn apply_multiplier_z(lambda: &FourierMultiplierZ, f: &CircleField) -> CircleField {
    f.map(|n, c| lambda.eval(n) * c)
}

/// Eigenvalue `2|n| tanh(π|n|)` of the bilateral Dirichlet-to-Neumann map.
pub fn dn_eigenvalue(n: i64) -> f64 {
    let a = n.unsigned_abs() as f64;
    2.0 * a * (PI * a).tanh()
}

/// `(1/2π) Σ_{m∈ℤ} 1/(n² + m²) = coth(π|n|)/(2|n|)`, zero at `n = 0`.
pub fn trace_green_eigenvalue(n: i64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let a = n.unsigned_abs() as f64;
    1.0 / ((PI * a).tanh() * 2.0 * a)
}

/// `⟨F, G⟩_X = (2π)² Σ ĉ_F conj(ĉ_G)`.
pub fn inner_x(f: &GridField, g: &GridField) -> Result<Complex64> {
    f.check_same_grid(g)?;
    let s: Complex64 = f
        .coeffs
        .iter()
        .zip(&g.coeffs)
        .map(|(a, b)| a * b.conj())
        .sum();
    Ok(s * (4.0 * PI * PI))
}

/// `⟨f, g⟩_Z = 2π Σ f̂ conj(ĝ)`.
pub fn inner_z(f: &CircleField, g: &CircleField) -> Result<Complex64> {
    if f.n_z() != g.n_z() {
        return Err(Error::SizeMismatch {
            expected: f.n_z(),
            actual: g.n_z(),
        });
    }
    let s: Complex64 = f
        .coeffs
        .iter()
        .zip(&g.coeffs)
        .map(|(a, b)| a * b.conj())
        .sum();
    Ok(s * (2.0 * PI))
}

pub fn norm_x(f: &GridField) -> f64 {
    2.0 * PI * f.coeff_norm()
}

pub fn norm_z(f: &CircleField) -> f64 {
    (2.0 * PI).sqrt() * f.coeff_norm()
}

/// `Q_A(F) = ⟨AF, F⟩_X`.
pub fn quadratic_form<A>(op: A, f: &GridField) -> Result<Complex64>
where
    A: Fn(&GridField) -> Result<GridField>,
{
    inner_x(&op(f)?, f)
}
