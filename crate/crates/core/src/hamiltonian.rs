//! Assembly of the discrete separated Hamiltonians.
//!
//! `-c∂²` is discretised by the fourth-order centred stencil
//! `(-u_{j-2} + 16u_{j-1} - 30u_j + 16u_{j+1} - u_{j+2}) / 12Δx²` on the
//! interior nodes, with the ghost value beyond each Dirichlet end taken as
//! the odd reflection. That keeps the matrix symmetric and makes the
//! boundary rows consistent with the sine series of the box.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::banded::{count_eigenvalues_below, BandLu, BandMatrix};
use crate::error::{Error, Result};
use crate::geometry::ModePotentialSpec;
use crate::grid::{AbsorbingLayer, Grid1D, GridFunction};

/// Points per resolved wavelength required by [`assemble`].
pub const POINTS_PER_WAVELENGTH: f64 = 8.0;

/// Pure-power model `-h²∂² + c·x^{2m}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelOperator {
    pub m: u32,
    pub h: f64,
    pub coefficient: f64,
}

impl ModelOperator {
    /// `-h²∂² + x^{2m}`.
    pub fn oscillator(m: u32, h: f64) -> Self {
        Self { m, h, coefficient: 1.0 }
    }

    /// `-h²∂² + x^{2m}/m`, the complex-rotated barrier.
    pub fn rotated(m: u32, h: f64) -> Self {
        Self { m, h, coefficient: 1.0 / f64::from(m) }
    }

    /// `-h²∂² - x^{2m}/m`, the barrier top.
    pub fn barrier(m: u32, h: f64) -> Self {
        Self { m, h, coefficient: -1.0 / f64::from(m) }
    }

    /// `-h²∂²`.
    pub fn free(h: f64) -> Self {
        Self { m: 1, h, coefficient: 0.0 }
    }

    pub fn potential(&self, x: f64) -> f64 {
        self.coefficient * x.powi(2 * self.m as i32)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum OperatorSpec {
    Mode(ModePotentialSpec),
    Model(ModelOperator),
}

impl OperatorSpec {
    pub fn kinetic(&self) -> f64 {
        match self {
            OperatorSpec::Mode(s) => s.kinetic(),
            OperatorSpec::Model(m) => m.h * m.h,
        }
    }

    pub fn wavelength(&self) -> f64 {
        match self {
            OperatorSpec::Mode(s) => s.wavelength(),
            // a pure multiplication operator resolves nothing
            OperatorSpec::Model(m) if m.h == 0.0 => f64::INFINITY,
            OperatorSpec::Model(m) => m.h,
        }
    }

    /// Degeneracy parameter of the underlying profile or model.
    pub fn m(&self) -> u32 {
        match self {
            OperatorSpec::Mode(s) => s.profile.m(),
            OperatorSpec::Model(s) => s.m,
        }
    }

    pub fn potential(&self, x: f64) -> f64 {
        match self {
            OperatorSpec::Mode(s) => s.potential(x),
            OperatorSpec::Model(m) => m.potential(x),
        }
    }
}

impl From<ModePotentialSpec> for OperatorSpec {
    fn from(s: ModePotentialSpec) -> Self {
        OperatorSpec::Mode(s)
    }
}

impl From<ModelOperator> for OperatorSpec {
    fn from(m: ModelOperator) -> Self {
        OperatorSpec::Model(m)
    }
}

/// Pentadiagonal discrete Hamiltonian on the interior nodes of a grid.
#[derive(Debug, Clone)]
pub struct BandedOperator {
    grid: Grid1D,
    spec: OperatorSpec,
    layer: Option<AbsorbingLayer>,
    /// `c / 12Δx²`
    stencil: f64,
    /// real diagonal: stencil centre plus potential
    diag_re: Vec<f64>,
    /// imaginary diagonal from the layer (≤ 0)
    diag_im: Vec<f64>,
}

/// Grid spacing needed to resolve `spec`.
pub fn required_spacing(spec: &OperatorSpec) -> f64 {
    spec.wavelength() / POINTS_PER_WAVELENGTH
}

pub fn assemble(
    spec: impl Into<OperatorSpec>,
    grid: Grid1D,
    layer: Option<AbsorbingLayer>,
) -> Result<BandedOperator> {
    let spec = spec.into();
    let need = required_spacing(&spec);
    if grid.dx() > need * (1.0 + 1e-12) {
        return Err(Error::Resolution(format!(
            "spacing {:.3e} exceeds wavelength/{} = {:.3e}",
            grid.dx(),
            POINTS_PER_WAVELENGTH,
            need
        )));
    }
    if let Some(l) = &layer {
        l.validate_for(&grid)?;
    }
    let dx = grid.dx();
    let stencil = spec.kinetic() / (12.0 * dx * dx);
    let n = grid.interior_len();
    let diag_re: Vec<f64> = (0..n)
        .map(|i| {
            let centre = if i == 0 || i == n - 1 { 29.0 } else { 30.0 };
            centre * stencil + spec.potential(grid.x(i + 1))
        })
        .collect();
    let diag_im = match &layer {
        Some(l) => (0..n).map(|i| -l.absorption(grid.x(i + 1))).collect(),
        None => vec![0.0; n],
    };
    Ok(BandedOperator { grid, spec, layer, stencil, diag_re, diag_im })
}

impl BandedOperator {
    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn spec(&self) -> &OperatorSpec {
        &self.spec
    }

    pub fn layer(&self) -> Option<&AbsorbingLayer> {
        self.layer.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.diag_re.len()
    }

    pub fn bandwidth(&self) -> usize {
        2
    }

    /// True iff no absorbing layer is attached; the potential is always real.
    pub fn is_hermitian(&self) -> bool {
        self.layer.is_none()
    }

    pub fn diagonal(&self, i: usize) -> Complex64 {
        Complex64::new(self.diag_re[i], self.diag_im[i])
    }

    /// Entry `(i, j)` of the interior matrix.
    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        match i.abs_diff(j) {
            0 => self.diagonal(i),
            1 => Complex64::new(-16.0 * self.stencil, 0.0),
            2 => Complex64::new(self.stencil, 0.0),
            _ => Complex64::new(0.0, 0.0),
        }
    }

    /// `H v` on interior vectors.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim();
        assert_eq!(v.len(), n);
        let s = self.stencil;
        let at = |k: isize| if k >= 0 && (k as usize) < n { v[k as usize] } else { Complex64::new(0.0, 0.0) };
        (0..n)
            .map(|i| {
                let k = i as isize;
                self.diagonal(i) * v[i] - 16.0 * s * (at(k - 1) + at(k + 1)) + s * (at(k - 2) + at(k + 2))
            })
            .collect()
    }

    pub fn apply_grid(&self, f: &GridFunction) -> Result<GridFunction> {
        GridFunction::from_interior(self.grid, &self.apply(f.interior()))
    }

    /// `H - z` as a band matrix ready for factoring.
    pub fn shifted(&self, z: Complex64) -> BandMatrix {
        let n = self.dim();
        let mut a = BandMatrix::zeros(n, 2, 2);
        for i in 0..n {
            for j in i.saturating_sub(2)..=(i + 2).min(n - 1) {
                let v = if i == j { self.diagonal(i) - z } else { self.entry(i, j) };
                a.set(i, j, v);
            }
        }
        a
    }

    pub fn factor_shifted(&self, z: Complex64) -> Result<BandLu> {
        self.shifted(z).factor()
    }

    /// Gershgorin bound on `‖H‖`.
    pub fn gershgorin_norm(&self) -> f64 {
        (0..self.dim())
            .map(|i| self.diagonal(i).norm() + 34.0 * self.stencil)
            .fold(0.0, f64::max)
    }

    /// Gershgorin lower bound on the spectrum of the Hermitian part.
    pub fn spectrum_lower_bound(&self) -> f64 {
        // the stencil part is positive semidefinite
        let n = self.dim();
        self.diag_re
            .iter()
            .enumerate()
            .map(|(i, d)| d - if i == 0 || i == n - 1 { 29.0 } else { 30.0 } * self.stencil)
            .fold(f64::INFINITY, f64::min)
    }

    /// Real symmetric band rows `A[i][i + d]`, for inertia counts.
    pub(crate) fn symmetric_rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim())
            .map(|i| vec![self.diag_re[i], -16.0 * self.stencil, self.stencil])
            .collect()
    }

    /// Number of eigenvalues below `shift` (Hermitian operators only).
    pub fn count_below(&self, shift: f64) -> Result<usize> {
        if !self.is_hermitian() {
            return Err(Error::Precondition("inertia count needs a Hermitian operator".into()));
        }
        Ok(count_eigenvalues_below(&self.symmetric_rows(), 2, shift))
    }

    /// `max |H - Hᴴ|` over all entries.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i.saturating_sub(2)..=(i + 2).min(n - 1) {
                worst = worst.max((self.entry(i, j) - self.entry(j, i).conj()).norm());
            }
        }
        worst
    }
}
