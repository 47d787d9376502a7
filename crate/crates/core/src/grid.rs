//! Uniform grids on `[-L, L)`, complex grid functions and the norms used by
//! the smoothing functionals.
//!
//! Node `j` sits at `x_j = -L + jΔx`, `Δx = 2L/n`. Operators impose Dirichlet
//! conditions at `x = ±L`: node 0 is the (identified) endpoint and carries
//! the boundary value, the interior nodes `1..n` are the unknowns. The
//! interior is symmetric about `x = 0`, which is node `n/2`.
//!
//! Fourier multipliers treat the grid as one period of length `2L`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::cutoff;
use crate::error::{Error, Result};

/// Relative tail size above which a function is rejected by the checked
/// Fourier routines.
pub const PERIODIZATION_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    half_length: f64,
    n: usize,
}

impl Grid1D {
    pub fn new(half_length: f64, n: usize) -> Result<Self> {
        if !(half_length > 0.0) || !half_length.is_finite() {
            return Err(Error::InvalidGrid(format!("half length must be positive, got {half_length}")));
        }
        if n < 16 || n % 2 != 0 {
            return Err(Error::InvalidGrid(format!("point count must be even and >= 16, got {n}")));
        }
        Ok(Self { half_length, n })
    }

    /// Smallest even point count (rounded up to a multiple of 16) with
    /// spacing at most `max_dx`.
    pub fn with_max_spacing(half_length: f64, max_dx: f64) -> Result<Self> {
        if !(max_dx > 0.0) {
            return Err(Error::InvalidGrid(format!("spacing must be positive, got {max_dx}")));
        }
        let raw = (2.0 * half_length / max_dx).ceil() as usize;
        let n = raw.max(16).div_ceil(16) * 16;
        Self::new(half_length, n)
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_length / self.n as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        -self.half_length + j as f64 * self.dx()
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |j| self.x(j))
    }

    /// Number of unknowns of a Dirichlet operator on this grid.
    pub fn interior_len(&self) -> usize {
        self.n - 1
    }

    /// Discrete frequency of DFT bin `j` for period `2L`.
    pub fn frequency(&self, j: usize) -> f64 {
        let signed = if j <= self.n / 2 { j as f64 } else { j as f64 - self.n as f64 };
        PI * signed / self.half_length
    }
}

/// `⟨x⟩ = (1 + x²)^{1/2}`.
pub fn japanese(x: f64) -> f64 {
    x.hypot(1.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Grid1D,
    values: Vec<Complex64>,
}

impl GridFunction {
    pub fn zeros(grid: Grid1D) -> Self {
        Self { grid, values: vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    pub fn from_values(grid: Grid1D, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidParameter(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid1D, f: impl Fn(f64) -> Complex64) -> Self {
        Self { grid, values: grid.nodes().map(f).collect() }
    }

    /// Lift a vector of interior unknowns; the endpoint value is zero.
    pub fn from_interior(grid: Grid1D, interior: &[Complex64]) -> Result<Self> {
        if interior.len() != grid.interior_len() {
            return Err(Error::InvalidParameter(format!(
                "{} interior values for a grid of {} points",
                interior.len(),
                grid.len()
            )));
        }
        let mut values = Vec::with_capacity(grid.len());
        values.push(Complex64::new(0.0, 0.0));
        values.extend_from_slice(interior);
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn interior(&self) -> &[Complex64] {
        &self.values[1..]
    }

    pub fn norm(&self) -> f64 {
        l2_norm(&self.values, self.grid.dx())
    }

    /// `(Δx Σ ⟨x_j⟩^{-2s} |f_j|²)^{1/2}`.
    pub fn weighted_norm(&self, s: f64) -> f64 {
        self.norm_with_weight(|x| japanese(x).powf(-s))
    }

    /// `(Δx Σ w(x_j)² |f_j|²)^{1/2}`.
    pub fn norm_with_weight(&self, w: impl Fn(f64) -> f64) -> f64 {
        let dx = self.grid.dx();
        let sum: f64 = self
            .grid
            .nodes()
            .zip(&self.values)
            .map(|(x, v)| w(x).powi(2) * v.norm_sqr())
            .sum();
        (dx * sum).sqrt()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest of the two outermost values at each end, relative to the
    /// peak. Zero for the zero function.
    pub fn relative_tail(&self) -> f64 {
        let peak = self.sup_norm();
        if peak == 0.0 {
            return 0.0;
        }
        let n = self.values.len();
        let tail = [0, 1, n - 2, n - 1]
            .iter()
            .map(|&j| self.values[j].norm())
            .fold(0.0, f64::max);
        tail / peak
    }

    pub fn check_periodizable(&self) -> Result<()> {
        let tail = self.relative_tail();
        if tail > PERIODIZATION_TOLERANCE {
            return Err(Error::NotPeriodizable { tail, limit: PERIODIZATION_TOLERANCE });
        }
        Ok(())
    }

    /// `‖⟨D⟩^s f‖` through the DFT. Rejects functions whose values at the
    /// ends have not decayed.
    pub fn fractional_deriv_norm(&self, s: f64) -> Result<f64> {
        self.check_periodizable()?;
        Ok(self.fractional_deriv_norm_periodic(s))
    }

    /// As [`Self::fractional_deriv_norm`] for data known to be exactly
    /// periodic on the grid.
    pub fn fractional_deriv_norm_periodic(&self, s: f64) -> f64 {
        let spectrum = FourierTransform::new(self.grid).forward(&self.values);
        let g = &self.grid;
        let sum: f64 = spectrum
            .iter()
            .enumerate()
            .map(|(j, c)| (1.0 + g.frequency(j).powi(2)).powf(s) * c.norm_sqr())
            .sum();
        (g.dx() * sum / g.len() as f64).sqrt()
    }

    /// `ψ(D/scale) f` with the standard cutoff `ψ`. Rejects functions whose
    /// values at the ends have not decayed.
    pub fn frequency_cutoff(&self, scale: f64) -> Result<GridFunction> {
        self.check_periodizable()?;
        Ok(self.frequency_cutoff_periodic(scale))
    }

    pub fn frequency_cutoff_periodic(&self, scale: f64) -> GridFunction {
        let mult = FourierMultiplier::cutoff(self.grid, scale);
        let mut out = self.clone();
        mult.apply_in_place(&mut out.values);
        out
    }
}

pub fn l2_norm(values: &[Complex64], dx: f64) -> f64 {
    (dx * values.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt()
}

/// Unnormalised forward/inverse DFT pair for one grid size.
#[derive(Clone)]
pub struct FourierTransform {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    n: usize,
}

impl FourierTransform {
    pub fn new(grid: Grid1D) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            forward: planner.plan_fft_forward(grid.len()),
            inverse: planner.plan_fft_inverse(grid.len()),
            n: grid.len(),
        }
    }

    pub fn forward(&self, values: &[Complex64]) -> Vec<Complex64> {
        let mut buf = values.to_vec();
        self.forward.process(&mut buf);
        buf
    }

    /// Inverse transform including the `1/n` factor.
    pub fn inverse_in_place(&self, buf: &mut [Complex64]) {
        self.inverse.process(buf);
        let s = 1.0 / self.n as f64;
        buf.iter_mut().for_each(|v| *v *= s);
    }
}

/// A real, even Fourier multiplier sampled on the DFT frequencies of a grid,
/// with its FFT plans. Building one is the expensive part; applying it is
/// two FFTs.
#[derive(Clone)]
pub struct FourierMultiplier {
    fft: FourierTransform,
    symbol: Vec<f64>,
}

impl FourierMultiplier {
    pub fn new(grid: Grid1D, symbol: impl Fn(f64) -> f64) -> Self {
        Self {
            fft: FourierTransform::new(grid),
            symbol: (0..grid.len()).map(|j| symbol(grid.frequency(j))).collect(),
        }
    }

    /// `ψ(ξ/scale)`.
    pub fn cutoff(grid: Grid1D, scale: f64) -> Self {
        Self::new(grid, |xi| cutoff::bump(xi / scale))
    }

    pub fn apply_in_place(&self, values: &mut [Complex64]) {
        self.fft.forward.process(values);
        for (v, s) in values.iter_mut().zip(&self.symbol) {
            *v *= *s;
        }
        self.fft.inverse_in_place(values);
    }

    /// Whether the multiplier takes only the values 0 and 1.
    pub fn is_projection(&self) -> bool {
        self.symbol.iter().all(|&s| s == 0.0 || s == 1.0)
    }
}

/// Strength of the standard layer. With the cubic profile on `L = 10` the
/// reflection of an energy-1 wave stays below `1e-4` for `h <= 1/8`.
pub const DEFAULT_LAYER_STRENGTH: f64 = 0.1;

/// Negative imaginary potential `-iη((|x| - x₀)₊)^p` near the ends of the
/// grid, a surrogate for outgoing boundary conditions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AbsorbingLayer {
    pub onset: f64,
    pub strength: f64,
    pub power: i32,
}

impl AbsorbingLayer {
    pub fn new(onset: f64, strength: f64, power: i32) -> Result<Self> {
        if !(onset > 0.0) || !(strength > 0.0) || power < 2 {
            return Err(Error::InvalidParameter(format!(
                "absorbing layer needs onset > 0, strength > 0, power >= 2 (got {onset}, {strength}, {power})"
            )));
        }
        Ok(Self { onset, strength, power })
    }

    /// Layer starting at `0.7 L` with cubic profile.
    pub fn standard(grid: &Grid1D, strength: f64) -> Result<Self> {
        Self::new(0.7 * grid.half_length(), strength, 3)
    }

    /// Magnitude of the (negative) imaginary part at `x`.
    pub fn absorption(&self, x: f64) -> f64 {
        let d = x.abs() - self.onset;
        if d > 0.0 {
            self.strength * d.powi(self.power)
        } else {
            0.0
        }
    }

    pub fn validate_for(&self, grid: &Grid1D) -> Result<()> {
        if self.onset >= grid.half_length() {
            return Err(Error::InvalidParameter(format!(
                "layer onset {} outside the grid half length {}",
                self.onset,
                grid.half_length()
            )));
        }
        Ok(())
    }
}
