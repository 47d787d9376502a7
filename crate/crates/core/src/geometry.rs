//! Closed-form profile of the surface of revolution `ds² = dx² + A(x)² dθ²`
//! with `A(x) = (1 + x^{2m})^{1/(2m)}`, and the potentials that appear after
//! conjugating the Laplacian to flat measure and separating the angle.
//!
//! Every function here works from hand-derived derivatives of the power law.
//! For `|x| > 1` the evaluation is rearranged in terms of `t = |x|^{-2m}`, so
//! `x^{2m}` is never formed and nothing overflows.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The one-parameter family of warped profiles. `m` is the degeneracy of the
/// trapped orbit at `x = 0`; `m = 1` is the non-degenerate hyperbolic case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceProfile {
    m: u32,
}

/// Split of `1 + x^{2m}` used by the overflow-free evaluations.
///
/// For `|x| <= 1` we keep `s = x^{2m}`; beyond that we keep `t = |x|^{-2m}`
/// so that `1 + x^{2m} = (1 + t) / t`.
#[derive(Debug, Clone, Copy)]
enum Split {
    Inner { s: f64 },
    Outer { t: f64 },
}

impl SurfaceProfile {
    pub fn new(m: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameter("degeneracy m must be >= 1".into()));
        }
        Ok(Self { m })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    fn two_m(&self) -> i32 {
        2 * self.m as i32
    }

    fn split(&self, x: f64) -> Split {
        let ax = x.abs();
        if ax <= 1.0 {
            Split::Inner { s: ax.powi(self.two_m()) }
        } else {
            Split::Outer { t: ax.powi(-self.two_m()) }
        }
    }

    /// `A(x) = (1 + x^{2m})^{1/(2m)}`.
    pub fn a(&self, x: f64) -> f64 {
        let inv = 1.0 / f64::from(2 * self.m);
        match self.split(x) {
            Split::Inner { s } => (inv * s.ln_1p()).exp(),
            Split::Outer { t } => x.abs() * (inv * t.ln_1p()).exp(),
        }
    }

    /// `A^{-2}(x) = (1 + x^{2m})^{-1/m}`, the principal part of the
    /// semiclassical potential. Maximum 1 at the trapped orbit.
    pub fn a_inv_sq(&self, x: f64) -> f64 {
        let inv_m = 1.0 / f64::from(self.m);
        match self.split(x) {
            Split::Inner { s } => (-inv_m * s.ln_1p()).exp(),
            Split::Outer { t } => (1.0 / x.abs()).powi(2) * (-inv_m * t.ln_1p()).exp(),
        }
    }

    /// `A'(x) = x^{2m-1} (1 + x^{2m})^{1/(2m) - 1}`.
    pub fn a_prime(&self, x: f64) -> f64 {
        // A'/A = x^{2m-1} / (1 + x^{2m})
        self.a(x) * self.log_derivative(x)
    }

    /// `A''(x) = (2m-1) x^{2m-2} (1 + x^{2m})^{1/(2m) - 2}`.
    pub fn a_second(&self, x: f64) -> f64 {
        self.a(x) * self.a_second_over_a(x)
    }

    /// `A'/A = x^{2m-1} / (1 + x^{2m})`.
    fn log_derivative(&self, x: f64) -> f64 {
        let two_m = self.two_m();
        match self.split(x) {
            Split::Inner { s } => x.powi(two_m - 1) / (1.0 + s),
            // x^{2m-1} t / (1 + t) = x^{-1} / (1 + t)
            Split::Outer { t } => 1.0 / (x * (1.0 + t)),
        }
    }

    /// `A''/A = (2m-1) x^{2m-2} / (1 + x^{2m})^2`.
    fn a_second_over_a(&self, x: f64) -> f64 {
        let two_m = self.two_m();
        let c = f64::from(2 * self.m - 1);
        match self.split(x) {
            Split::Inner { s } => c * x.powi(two_m - 2) / ((1.0 + s) * (1.0 + s)),
            // x^{2m-2} t^2 / (1 + t)^2 = |x|^{-2m-2} / (1 + t)^2
            Split::Outer { t } => {
                c * x.abs().powi(-two_m - 2) / ((1.0 + t) * (1.0 + t))
            }
        }
    }

    /// `V₁ = ½ A''/A − ¼ (A'/A)²`, the potential produced by conjugating
    /// the Laplacian with `A^{1/2}`.
    pub fn v1(&self, x: f64) -> f64 {
        let ld = self.log_derivative(x);
        0.5 * self.a_second_over_a(x) - 0.25 * ld * ld
    }

    /// Gaussian curvature `K = -A''/A = -(2m-1) x^{2m-2} (1 + x^{2m})^{-2}`,
    /// evaluated directly from the closed form.
    pub fn curvature(&self, x: f64) -> f64 {
        let two_m = self.two_m();
        let c = f64::from(2 * self.m - 1);
        match self.split(x) {
            Split::Inner { s } => -c * x.powi(two_m - 2) * (1.0 + s).powi(-2),
            Split::Outer { t } => {
                -c * x.abs().powi(-two_m - 2) * (1.0 + t).powi(-2)
            }
        }
    }

    /// `|A^{-2}(x) − (1 − x^{2m}/m)|` on `|x| <= 1/2`. The Taylor remainder
    /// of the barrier top is `O(x^{4m})`.
    pub fn barrier_taylor_remainder(&self, x: f64) -> Result<f64> {
        if !(x.abs() <= 0.5) {
            return Err(Error::Precondition(format!(
                "barrier Taylor check needs |x| <= 1/2, got {x}"
            )));
        }
        let m = f64::from(self.m);
        let s = x.abs().powi(self.two_m());
        Ok((self.a_inv_sq(x) - (1.0 - s / m)).abs())
    }
}

/// Fixed Fourier mode or semiclassical scaling of the separated operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Mode {
    /// `P_k = -∂² + k² A^{-2} + V₁`.
    Fourier { k: i64 },
    /// `-h²∂² + height·A^{-2} + h² V₁`; `height = 1` is the trapping form,
    /// `height = k²/λ²` the non-trapping low-mode form.
    Semiclassical { h: f64, height: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModePotentialSpec {
    pub profile: SurfaceProfile,
    pub mode: Mode,
    pub include_v1: bool,
}

impl ModePotentialSpec {
    pub fn fourier(profile: SurfaceProfile, k: i64) -> Self {
        Self { profile, mode: Mode::Fourier { k }, include_v1: true }
    }

    pub fn semiclassical(profile: SurfaceProfile, h: f64) -> Self {
        Self {
            profile,
            mode: Mode::Semiclassical { h, height: 1.0 },
            include_v1: true,
        }
    }

    /// `-h²∂² + height·A^{-2} + h²V₁`.
    pub fn semiclassical_with_height(profile: SurfaceProfile, h: f64, height: f64) -> Self {
        Self { profile, mode: Mode::Semiclassical { h, height }, include_v1: true }
    }

    pub fn without_v1(mut self) -> Self {
        self.include_v1 = false;
        self
    }

    /// Coefficient of `-∂²` in the operator: 1 for Fourier modes, `h²` in
    /// semiclassical form.
    pub fn kinetic(&self) -> f64 {
        match self.mode {
            Mode::Fourier { .. } => 1.0,
            Mode::Semiclassical { h, .. } => h * h,
        }
    }

    /// Shortest wavelength the discretisation must resolve.
    pub fn wavelength(&self) -> f64 {
        match self.mode {
            Mode::Fourier { k } => 1.0 / (k.unsigned_abs().max(1) as f64),
            Mode::Semiclassical { h, .. } => h,
        }
    }

    pub fn potential(&self, x: f64) -> f64 {
        let p = &self.profile;
        let (barrier, v1_weight) = match self.mode {
            Mode::Fourier { k } => ((k * k) as f64 * p.a_inv_sq(x), 1.0),
            Mode::Semiclassical { h, height } => (height * p.a_inv_sq(x), h * h),
        };
        if self.include_v1 {
            barrier + v1_weight * p.v1(x)
        } else {
            barrier
        }
    }
}

/// Free function form of [`ModePotentialSpec::potential`].
pub fn mode_potential(spec: &ModePotentialSpec, x: f64) -> f64 {
    spec.potential(x)
}
