//! Complex WKB quasimodes for the barrier top `-h²∂² - x^{2m}/m`.
//!
//! With `E = (α + iβ) h^{2m/(m+1)}` and `ϖ(x) = ∫₀ˣ (E + y^{2m}/m)^{1/2} dy`
//! the function `u = (ϖ')^{-1/2} e^{iϖ/h}` solves
//! `(hD)²u = (ϖ')²u + f u` exactly. Cutting off at the natural scale
//! `γ = h^{1/(m+1)}` gives `ũ = χ(x/γ) u`, whose residual
//! `R = ((hD)² - (ϖ')²) ũ = f ũ + [(hD)², χ(x/γ)] u` is `O(h^{2m/(m+1)}) ‖ũ‖`.

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cutoff::bump_with_derivatives;
use crate::error::{Error, Result};
use crate::grid::{l2_norm, Grid1D};
use crate::quadrature::{integrate_adaptive, GaussLegendre};

pub const PHASE_TOLERANCE: f64 = 1e-10;
/// Agreement required between the analytic and finite-difference residuals.
pub const CROSS_CHECK_TOLERANCE: f64 = 1e-6;
/// Points required across the support `[-2γ, 2γ]`.
pub const MIN_SUPPORT_POINTS: usize = 64;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralParamE {
    pub alpha: f64,
    pub beta: f64,
    pub h: f64,
    pub m: u32,
}

impl SpectralParamE {
    pub fn new(alpha: f64, beta: f64, h: f64, m: u32) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidParameter(format!("quasimodes need m >= 2, got {m}")));
        }
        if !(alpha > 0.0 && beta > 0.0) {
            return Err(Error::InvalidParameter(format!("need alpha, beta > 0, got {alpha}, {beta}")));
        }
        if !(h > 0.0 && h <= 1.0) {
            return Err(Error::InvalidParameter(format!("need 0 < h <= 1, got {h}")));
        }
        Ok(Self { alpha, beta, h, m })
    }

    /// `h^{2m/(m+1)}`.
    pub fn energy_scale(&self) -> f64 {
        self.h.powf(2.0 * f64::from(self.m) / f64::from(self.m + 1))
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.alpha, self.beta) * self.energy_scale()
    }

    /// `γ = h^{1/(m+1)}`.
    pub fn gamma(&self) -> f64 {
        self.h.powf(1.0 / f64::from(self.m + 1))
    }

    fn power(&self, x: f64) -> f64 {
        x.powi(2 * self.m as i32) / f64::from(self.m)
    }
}

/// `ϖ'(x) = (E + x^{2m}/m)^{1/2}`, principal branch (`Im > 0`).
pub fn phase_derivative(e: &SpectralParamE, x: f64) -> Complex64 {
    (e.value() + e.power(x)).sqrt()
}

/// `ϖ''(x) = x^{2m-1} / ϖ'(x)`.
pub fn phase_second_derivative(e: &SpectralParamE, x: f64) -> Complex64 {
    x.powi(2 * e.m as i32 - 1) / phase_derivative(e, x)
}

/// `ϖ(x)` by adaptive Gauss–Legendre, with panel breaks at `±γ`.
pub fn phase(e: &SpectralParamE, x: f64) -> Result<Complex64> {
    if x == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let a = x.abs();
    let g = e.gamma();
    let mut breaks = vec![0.0];
    breaks.extend([g, 2.0 * g].into_iter().filter(|&b| b < a));
    breaks.push(a);
    let rule = GaussLegendre::new(16);
    let v = integrate_adaptive(&rule, &breaks, |y| phase_derivative(e, y), PHASE_TOLERANCE)?;
    Ok(if x < 0.0 { -v } else { v })
}

/// `f = -h² x^{2m-2} ((1/4 + 1/(2m)) x^{2m} - (m - 1/2) E) (ϖ')^{-4}`.
pub fn amplitude_f(e: &SpectralParamE, x: f64) -> Complex64 {
    let m = f64::from(e.m);
    let x2m = x.powi(2 * e.m as i32);
    let w2 = e.value() + x2m / m;
    let bracket = (0.25 + 0.5 / m) * x2m - (m - 0.5) * e.value();
    -e.h * e.h * x.powi(2 * e.m as i32 - 2) * bracket / (w2 * w2)
}

#[derive(Debug, Clone)]
pub struct Quasimode {
    pub e: SpectralParamE,
    pub gamma: f64,
    pub grid: Grid1D,
    /// Whether `ũ` carries the cutoff `χ(x/γ)` (otherwise `ũ = u`).
    pub cut: bool,
    pub phase: Vec<Complex64>,
    pub phase_prime: Vec<Complex64>,
    pub u: Vec<Complex64>,
    pub u_tilde: Vec<Complex64>,
    pub norm: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ResidualReport {
    /// `‖R‖ / ‖ũ‖` from the analytic formula.
    pub relative: f64,
    pub residual_norm: f64,
    /// `‖[(hD)², χ(x/γ)] u‖`.
    pub commutator_norm: f64,
    /// `‖R_analytic − R_fd‖ / ‖R_analytic‖`.
    pub cross_check: f64,
}

/// Grid used when the caller does not supply one: `[-2.5γ, 2.5γ]` with
/// 2048 points, fine enough for the finite-difference cross-check.
pub fn standard_grid(e: &SpectralParamE) -> Result<Grid1D> {
    Grid1D::new(2.5 * e.gamma(), 2048)
}

pub fn build_quasimode(e: SpectralParamE, grid: Grid1D) -> Result<Quasimode> {
    build(e, grid, true)
}

/// As [`build_quasimode`] without the cutoff, `ũ = u` on the whole grid.
pub fn build_uncut(e: SpectralParamE, grid: Grid1D) -> Result<Quasimode> {
    build(e, grid, false)
}

fn build(e: SpectralParamE, grid: Grid1D, cut: bool) -> Result<Quasimode> {
    let gamma = e.gamma();
    if cut && grid.half_length() < 2.0 * gamma {
        return Err(Error::Resolution(format!(
            "grid half length {} does not contain the support [-2γ, 2γ], γ = {gamma}",
            grid.half_length()
        )));
    }
    let across = 4.0 * gamma / grid.dx();
    if across < MIN_SUPPORT_POINTS as f64 {
        return Err(Error::Resolution(format!(
            "{across:.1} points across [-2γ, 2γ], need {MIN_SUPPORT_POINTS}"
        )));
    }
    let phase = grid_phase(&e, &grid);
    let n = grid.len();
    let phase_prime: Vec<Complex64> = grid.nodes().map(|x| phase_derivative(&e, x)).collect();
    let u: Vec<Complex64> = (0..n)
        .map(|j| (I * phase[j] / e.h).exp() / phase_prime[j].sqrt())
        .collect();
    let u_tilde: Vec<Complex64> = if cut {
        grid.nodes().zip(&u).map(|(x, v)| bump_with_derivatives(x / gamma)[0] * v).collect()
    } else {
        u.clone()
    };
    let norm = l2_norm(&u_tilde, grid.dx());
    Ok(Quasimode { e, gamma, grid, cut, phase, phase_prime, u, u_tilde, norm })
}

/// `ϖ` at every node, accumulated cell by cell outward from `x = 0` with an
/// 8-point rule per cell and extended to `x < 0` by oddness.
fn grid_phase(e: &SpectralParamE, grid: &Grid1D) -> Vec<Complex64> {
    let n = grid.len();
    let centre = n / 2;
    let rule = GaussLegendre::new(8);
    let dx = grid.dx();
    // right[i] = ϖ(i dx), i = 0..=n/2
    let mut right = vec![Complex64::new(0.0, 0.0); centre + 1];
    for i in 1..=centre {
        let a = (i - 1) as f64 * dx;
        right[i] = right[i - 1] + rule.integrate(a, a + dx, |y| phase_derivative(e, y));
    }
    (0..n)
        .map(|j| if j >= centre { right[j - centre] } else { -right[centre - j] })
        .collect()
}

impl Quasimode {
    /// `hD u` from the closed form `(-(h/2i) ϖ''/ϖ' + ϖ') u`.
    fn h_d_u(&self, j: usize) -> Complex64 {
        let x = self.grid.x(j);
        let w1 = self.phase_prime[j];
        let w2 = phase_second_derivative(&self.e, x);
        (-(self.e.h / (2.0 * I)) * w2 / w1 + w1) * self.u[j]
    }

    /// `[(hD)², χ(x/γ)] u = -h²γ^{-2}χ''u + 2(h/i)γ^{-1}χ'(hD u)` at node `j`.
    pub fn commutator_at(&self, j: usize) -> Complex64 {
        if !self.cut {
            return Complex64::new(0.0, 0.0);
        }
        let h = self.e.h;
        let g = self.gamma;
        let [_, c1, c2] = bump_with_derivatives(self.grid.x(j) / g);
        if c1 == 0.0 && c2 == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        -h * h / (g * g) * c2 * self.u[j] + 2.0 * (h / I) / g * c1 * self.h_d_u(j)
    }

    /// `R` at every node from the closed-form pieces.
    pub fn residual_analytic(&self) -> Vec<Complex64> {
        self.grid
            .nodes()
            .enumerate()
            .map(|(j, x)| amplitude_f(&self.e, x) * self.u_tilde[j] + self.commutator_at(j))
            .collect()
    }

    /// `((hD)² − (ϖ')²) ũ` by fourth-order differences; zero on the two
    /// nodes nearest each end.
    pub fn residual_finite_difference(&self) -> Vec<Complex64> {
        let n = self.grid.len();
        let v = &self.u_tilde;
        let c = self.e.h * self.e.h / (12.0 * self.grid.dx().powi(2));
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for j in 2..n - 2 {
            let lap = -v[j - 2] + 16.0 * v[j - 1] - 30.0 * v[j] + 16.0 * v[j + 1] - v[j + 2];
            out[j] = -c * lap - self.phase_prime[j] * self.phase_prime[j] * v[j];
        }
        out
    }

    /// Residual norms with the analytic/finite-difference cross-check.
    /// A disagreement above [`CROSS_CHECK_TOLERANCE`] is an error.
    pub fn residual(&self) -> Result<ResidualReport> {
        if !self.cut {
            return Err(Error::Precondition("the residual report needs a cut-off quasimode".into()));
        }
        let dx = self.grid.dx();
        let analytic = self.residual_analytic();
        let fd = self.residual_finite_difference();
        let residual_norm = l2_norm(&analytic, dx);
        let diff: Vec<Complex64> = analytic.iter().zip(&fd).map(|(a, b)| a - b).collect();
        let cross_check = l2_norm(&diff, dx) / residual_norm;
        if !(cross_check <= CROSS_CHECK_TOLERANCE) {
            return Err(Error::CrossCheck(format!(
                "analytic and finite-difference residuals differ by {cross_check:.3e} (relative)"
            )));
        }
        let commutator: Vec<Complex64> = (0..self.grid.len()).map(|j| self.commutator_at(j)).collect();
        Ok(ResidualReport {
            relative: residual_norm / self.norm,
            residual_norm,
            commutator_norm: l2_norm(&commutator, dx),
            cross_check,
        })
    }

    /// Largest `|Im ϖ|` on `supp ũ`.
    pub fn max_imag_phase_on_support(&self) -> f64 {
        self.grid
            .nodes()
            .zip(&self.phase)
            .filter(|(x, _)| x.abs() <= 2.0 * self.gamma)
            .map(|(_, p)| p.im.abs())
            .fold(0.0, f64::max)
    }

    /// `(min, max)` of `|u| |ϖ'|^{1/2}` on `supp ũ`.
    pub fn amplitude_ratio_range(&self) -> (f64, f64) {
        self.grid
            .nodes()
            .enumerate()
            .filter(|(_, x)| x.abs() <= 2.0 * self.gamma)
            .map(|(j, _)| self.u[j].norm() * self.phase_prime[j].norm().sqrt())
            .fold((f64::INFINITY, 0.0), |(lo, hi), r| (lo.min(r), hi.max(r)))
    }

    /// Write `x,re,im` rows of `ũ`.
    pub fn write_csv(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(w, "x,re,im")?;
        for (x, v) in self.grid.nodes().zip(&self.u_tilde) {
            writeln!(w, "{x:.12e},{:.12e},{:.12e}", v.re, v.im)?;
        }
        Ok(())
    }
}

/// One point of a quasimode scan over `h`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct QuasimodeSample {
    pub h: f64,
    pub gamma: f64,
    pub norm_sq: f64,
    /// `‖ũ‖² / h^{(1-m)/(1+m)}`.
    pub compensated_norm_sq: f64,
    pub residual: ResidualReport,
    /// `sup |Im ϖ|` on `supp ũ`.
    pub max_imag_phase: f64,
    pub amplitude_ratio: (f64, f64),
}

/// Build `ũ` on the standard grid for each `h` and collect its diagnostics.
pub fn quasimode_scan(alpha: f64, beta: f64, m: u32, hs: &[f64]) -> Result<Vec<QuasimodeSample>> {
    crate::par_map(hs, |&h| {
        let e = SpectralParamE::new(alpha, beta, h, m)?;
        let q = build_quasimode(e, standard_grid(&e)?)?;
        let mf = f64::from(m);
        let norm_sq = q.norm * q.norm;
        Ok(QuasimodeSample {
            h,
            gamma: q.gamma,
            norm_sq,
            compensated_norm_sq: norm_sq / h.powf((1.0 - mf) / (1.0 + mf)),
            residual: q.residual()?,
            max_imag_phase: q.max_imag_phase_on_support(),
            amplitude_ratio: q.amplitude_ratio_range(),
        })
    })
    .into_iter()
    .collect()
}
