//! Crank–Nicolson evolution of a single Fourier mode, the local smoothing
//! functionals, and the saturation experiment on the weak semiclassical
//! time scale `|k|^{-2/(m+1)}`.
//!
//! Each step solves `(I + isΔt(H - σ)/2) u_{j+1} = (I - isΔt(H - σ)/2) u_j`
//! with one banded factorisation per run. `s = 1` is `∂_t u = -iHu`, `s = -1`
//! is `∂_t u = iHu`. The real shift `σ` only changes a global phase
//! `e^{∓iσt}`, so norms are unaffected, but removing the bulk energy `k²`
//! keeps the rational phase error small.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cutoff::bump;
use crate::error::{Error, Result};
use crate::geometry::{ModePotentialSpec, SurfaceProfile};
use crate::grid::{japanese, l2_norm, Grid1D, GridFunction};
use crate::hamiltonian::{assemble, required_spacing, BandedOperator, OperatorSpec};
use crate::quasimode::{build_quasimode, SpectralParamE};
use crate::vector;

/// Runs whose mass in `|x| > 0.9L` ever exceeds this fraction are invalid.
pub const BOUNDARY_MASS_LIMIT: f64 = 1e-8;
/// Minimum number of steps per run.
pub const MIN_STEPS: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TimeDirection {
    /// `∂_t u = -iHu`.
    Forward,
    /// `∂_t u = iHu`.
    Reverse,
}

impl TimeDirection {
    fn sign(self) -> f64 {
        match self {
            TimeDirection::Forward => 1.0,
            TimeDirection::Reverse => -1.0,
        }
    }
}

/// Extra quantities recorded at every step.
#[derive(Debug, Clone)]
pub enum Observable {
    /// `Δx Σ w_j |u_j|²`.
    WeightedMass(Vec<f64>),
    /// `‖u(t) - e^{iωt} v‖`, with `u` the shifted state.
    DistanceTo { reference: Vec<Complex64>, omega: Complex64 },
}

#[derive(Debug, Clone)]
pub struct RunSpec {
    pub operator: BandedOperator,
    pub initial: GridFunction,
    /// Fourier mode, used by the `∂_θ` functionals.
    pub k: i64,
    pub final_time: f64,
    /// Overrides the default step; must not exceed it.
    pub time_step: Option<f64>,
    pub direction: TimeDirection,
    pub energy_shift: f64,
    pub observables: Vec<Observable>,
}

impl RunSpec {
    pub fn new(operator: BandedOperator, initial: GridFunction, k: i64, final_time: f64) -> Self {
        Self {
            operator,
            initial,
            k,
            final_time,
            time_step: None,
            direction: TimeDirection::Forward,
            energy_shift: 0.0,
            observables: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvolutionRun {
    pub k: i64,
    pub m: u32,
    pub grid: Grid1D,
    pub dt: f64,
    pub steps: usize,
    pub final_time: f64,
    pub direction: TimeDirection,
    pub energy_shift: f64,
    pub times: Vec<f64>,
    pub initial_norm: f64,
    /// `max_j |‖u(t_j)‖/‖u(0)‖ - 1|`.
    pub max_norm_drift: f64,
    /// `max_j Δx Σ_{|x|>0.9L} |u_j|²`, relative to `‖u(0)‖²`.
    pub boundary_mass: f64,
    pub valid: bool,
    /// `‖⟨x⟩^{-3/2} u‖²` per step.
    pub theta_density: Vec<f64>,
    /// `‖⟨x⟩^{-1} ∂_x u‖²` per step.
    pub gradient_density: Vec<f64>,
    /// `‖|x|^m ⟨x⟩^{-m-3/2} u‖²` per step.
    pub away_density: Vec<f64>,
    pub observables: Vec<Vec<f64>>,
    /// Interior values at the last step (in the shifted frame).
    #[serde(skip)]
    pub final_state: Vec<Complex64>,
}

impl EvolutionRun {
    /// Final state in the unshifted frame.
    pub fn final_grid_function(&self) -> Result<GridFunction> {
        let phase = Complex64::from_polar(1.0, -self.direction.sign() * self.energy_shift * self.final_time);
        let v: Vec<Complex64> = self.final_state.iter().map(|x| x * phase).collect();
        GridFunction::from_interior(self.grid, &v)
    }
}

/// `Δt = min(1/(10 E), T/2000)` with `E = ‖(H - σ)u₀‖/‖u₀‖`, rounded down
/// to divide `T` evenly.
pub fn default_time_step(op: &BandedOperator, u0: &[Complex64], shift: f64, final_time: f64) -> f64 {
    let hu = op.apply(u0);
    let shifted: Vec<Complex64> = hu.iter().zip(u0).map(|(a, b)| a - shift * b).collect();
    let energy = vector::norm(&shifted) / vector::norm(u0);
    let dt = (final_time / MIN_STEPS as f64).min(if energy > 0.0 { 0.1 / energy } else { f64::INFINITY });
    final_time / (final_time / dt).ceil()
}

/// `Δx Σ w_j |∂u_j|²` with `∂` the fourth-order centred difference and odd
/// reflection beyond the Dirichlet ends.
fn gradient_mass(u: &[Complex64], weights: &[f64], dx: f64) -> f64 {
    // nodes -1..=n+1; interior index i is node i + 1, nodes 0 and n vanish
    let n = u.len() + 1;
    let zero = Complex64::new(0.0, 0.0);
    let mut padded = Vec::with_capacity(n + 3);
    padded.push(-u[0]);
    padded.push(zero);
    padded.extend_from_slice(u);
    padded.push(zero);
    padded.push(-u[n - 2]);
    let mut sum = 0.0;
    for (i, w) in weights.iter().enumerate() {
        let c = i + 2;
        let d = (-padded[c + 2] + 8.0 * padded[c + 1] - 8.0 * padded[c - 1] + padded[c - 2]) / (12.0 * dx);
        sum += w * d.norm_sqr();
    }
    dx * sum
}

fn weighted_mass(u: &[Complex64], weights: &[f64], dx: f64) -> f64 {
    dx * u.iter().zip(weights).map(|(v, w)| w * v.norm_sqr()).sum::<f64>()
}

/// Evolve `spec.initial` to `spec.final_time`.
pub fn propagate(spec: &RunSpec) -> Result<EvolutionRun> {
    let op = &spec.operator;
    if !op.is_hermitian() {
        return Err(Error::Precondition("propagation needs a Hermitian operator".into()));
    }
    if spec.initial.grid() != op.grid() {
        return Err(Error::InvalidParameter("initial data lives on a different grid".into()));
    }
    if !(spec.final_time > 0.0) {
        return Err(Error::InvalidParameter(format!("final time must be positive, got {}", spec.final_time)));
    }
    let grid = *op.grid();
    let dx = grid.dx();
    let mut u = spec.initial.interior().to_vec();
    let initial_norm = l2_norm(&u, dx);
    if initial_norm == 0.0 {
        return Err(Error::InvalidParameter("initial data is zero".into()));
    }
    let rule = default_time_step(op, &u, spec.energy_shift, spec.final_time);
    let dt = match spec.time_step {
        Some(dt) if dt > rule * (1.0 + 1e-12) => {
            return Err(Error::Precondition(format!("time step {dt:.3e} exceeds the stability rule {rule:.3e}")));
        }
        Some(dt) if !(dt > 0.0) => {
            return Err(Error::InvalidParameter(format!("time step must be positive, got {dt}")));
        }
        Some(dt) => dt,
        None => rule,
    };
    let steps = (spec.final_time / dt).round().max(1.0) as usize;
    let s = spec.direction.sign();
    let sigma = spec.energy_shift;
    // I + isΔt(H-σ)/2 = (isΔt/2)(H - z), z = σ + 2i/(sΔt)
    let z = Complex64::new(sigma, 2.0 / (s * dt));
    let lu = op.factor_shifted(z)?;
    let pre = Complex64::new(0.0, s * dt / 2.0);
    let inv_pre = 1.0 / pre;

    let xs: Vec<f64> = (1..grid.len()).map(|j| grid.x(j)).collect();
    let m = op.spec().m();
    let theta_w: Vec<f64> = xs.iter().map(|&x| japanese(x).powi(-3)).collect();
    let grad_w: Vec<f64> = xs.iter().map(|&x| japanese(x).powi(-2)).collect();
    let away_w: Vec<f64> = xs
        .iter()
        .map(|&x| x.abs().powi(2 * m as i32) * japanese(x).powf(-2.0 * f64::from(m) - 3.0))
        .collect();
    let boundary_w: Vec<f64> = xs.iter().map(|&x| if x.abs() > 0.9 * grid.half_length() { 1.0 } else { 0.0 }).collect();

    let mut times = Vec::with_capacity(steps + 1);
    let mut theta_density = Vec::with_capacity(steps + 1);
    let mut gradient_density = Vec::with_capacity(steps + 1);
    let mut away_density = Vec::with_capacity(steps + 1);
    let mut observables = vec![Vec::with_capacity(steps + 1); spec.observables.len()];
    let mut max_norm_drift: f64 = 0.0;
    let mut boundary_mass: f64 = 0.0;
    let n0 = initial_norm * initial_norm;

    let mut record = |t: f64, u: &[Complex64]| {
        times.push(t);
        theta_density.push(weighted_mass(u, &theta_w, dx));
        gradient_density.push(gradient_mass(u, &grad_w, dx));
        away_density.push(weighted_mass(u, &away_w, dx));
        for (obs, series) in spec.observables.iter().zip(observables.iter_mut()) {
            series.push(match obs {
                Observable::WeightedMass(w) => weighted_mass(u, w, dx),
                Observable::DistanceTo { reference, omega } => {
                    let phase = (Complex64::new(0.0, 1.0) * omega * t).exp();
                    let diff: Vec<Complex64> = u.iter().zip(reference).map(|(a, b)| a - phase * b).collect();
                    l2_norm(&diff, dx)
                }
            });
        }
        let norm = l2_norm(u, dx);
        max_norm_drift = max_norm_drift.max((norm / initial_norm - 1.0).abs());
        boundary_mass = boundary_mass.max(weighted_mass(u, &boundary_w, dx) / n0);
    };

    record(0.0, &u);
    for j in 1..=steps {
        let hu = op.apply(&u);
        // rhs = (isΔt/2)^{-1} (u - isΔt/2 (H - σ) u)
        for (v, hv) in u.iter_mut().zip(&hu) {
            *v = inv_pre * (*v - pre * (hv - sigma * *v));
        }
        lu.solve_in_place(&mut u);
        record(j as f64 * dt, &u);
    }

    let valid = boundary_mass < BOUNDARY_MASS_LIMIT;
    Ok(EvolutionRun {
        k: spec.k,
        m,
        grid,
        dt,
        steps,
        final_time: steps as f64 * dt,
        direction: spec.direction,
        energy_shift: sigma,
        times,
        initial_norm,
        max_norm_drift,
        boundary_mass,
        valid,
        theta_density,
        gradient_density,
        away_density,
        observables,
        final_state: u,
    })
}

/// Composite trapezoid rule on a uniform time grid.
pub fn trapezoid(values: &[f64], dt: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => dt * (values[1..n - 1].iter().sum::<f64>() + 0.5 * (values[0] + values[n - 1])),
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SmoothingReport {
    pub k: i64,
    pub final_time: f64,
    /// `∫₀ᵀ ‖⟨x⟩^{-3/2} k u‖² dt`.
    pub j_theta: f64,
    /// `∫₀ᵀ ‖⟨x⟩^{-1} ∂_x u‖² dt`.
    pub j_x: f64,
    /// `∫₀ᵀ ‖|x|^m ⟨x⟩^{-m-3/2} k u‖² dt`.
    pub j_away: f64,
    /// `⟨k⟩^{2m/(m+1)} ‖u₀‖² + ‖⟨D_x⟩^{1/2} u₀‖²`.
    pub data_norm: f64,
    /// `⟨k⟩ ‖u₀‖² + ‖⟨D_x⟩^{1/2} u₀‖²`, the `H^{1/2}` norm of the mode.
    pub h_half_norm: f64,
    pub theta_ratio: f64,
    pub x_ratio: f64,
    pub away_ratio: f64,
    pub valid: bool,
}

/// Smoothing functionals of a run started from `initial`.
pub fn smoothing_report(run: &EvolutionRun, initial: &GridFunction, m: u32) -> Result<SmoothingReport> {
    if !run.valid {
        return Err(Error::InvalidRun(format!(
            "boundary mass {:.3e} exceeds {BOUNDARY_MASS_LIMIT:.0e}",
            run.boundary_mass
        )));
    }
    let k2 = (run.k * run.k) as f64;
    let jk = (1.0 + k2).sqrt();
    let j_theta = k2 * trapezoid(&run.theta_density, run.dt);
    let j_x = trapezoid(&run.gradient_density, run.dt);
    let j_away = k2 * trapezoid(&run.away_density, run.dt);
    let mass = initial.norm().powi(2);
    let half = initial.fractional_deriv_norm(0.5)?.powi(2);
    let mf = f64::from(m);
    let data_norm = jk.powf(2.0 * mf / (mf + 1.0)) * mass + half;
    let h_half_norm = jk * mass + half;
    Ok(SmoothingReport {
        k: run.k,
        final_time: run.final_time,
        j_theta,
        j_x,
        j_away,
        data_norm,
        h_half_norm,
        theta_ratio: j_theta / data_norm,
        x_ratio: j_x / data_norm,
        away_ratio: j_away / h_half_norm,
        valid: run.valid,
    })
}

/// Mode operator `P_k` on a grid of half length `half_length` at the
/// resolution limit.
pub fn mode_operator(profile: SurfaceProfile, k: i64, half_length: f64) -> Result<BandedOperator> {
    let spec = OperatorSpec::Mode(ModePotentialSpec::fourier(profile, k));
    let grid = Grid1D::with_max_spacing(half_length, required_spacing(&spec))?;
    assemble(spec, grid, None)
}

/// Evolve `u0` under `P_k` for time `t` and report the smoothing functionals.
pub fn smoothing_run(profile: SurfaceProfile, k: i64, u0: &GridFunction, t: f64) -> Result<SmoothingReport> {
    let op = mode_operator(profile, k, u0.grid().half_length())?;
    if op.grid() != u0.grid() {
        return Err(Error::Resolution(format!(
            "initial data grid has {} points, mode {k} needs {}",
            u0.grid().len(),
            op.grid().len()
        )));
    }
    let mut spec = RunSpec::new(op, u0.clone(), k, t);
    spec.energy_shift = (k * k) as f64;
    let run = propagate(&spec)?;
    smoothing_report(&run, u0, profile.m())
}

/// Sum of three seeded Gaussian wave packets `e^{-(x-x_i)²/(2σ_i²)} e^{iξ_i x}`
/// with `x_i ∈ [-2, 2]`, `σ_i ∈ [0.3, 0.8]`, `ξ_i ∈ [-4, 4]`.
pub fn wave_packets(grid: Grid1D, seed: u64) -> GridFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let packets: Vec<(f64, f64, f64)> = (0..3)
        .map(|_| {
            (rng.random_range(-2.0..2.0), rng.random_range(0.3..0.8), rng.random_range(-4.0..4.0))
        })
        .collect();
    GridFunction::from_fn(grid, |x| {
        packets
            .iter()
            .map(|&(x0, w, xi)| (-(x - x0).powi(2) / (2.0 * w * w)).exp() * Complex64::from_polar(1.0, xi * x))
            .sum()
    })
}

/// Seeded packets supported in `|x| ≥ 2`: centres in `±[3, 5]`, widths in
/// `[0.3, 0.5]`, multiplied by `1 - χ(x/2)`.
pub fn away_packets(grid: Grid1D, seed: u64) -> GridFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let packets: Vec<(f64, f64, f64)> = (0..3)
        .map(|_| {
            let side = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            (side * rng.random_range(3.0..5.0), rng.random_range(0.3..0.5), rng.random_range(-4.0..4.0))
        })
        .collect();
    GridFunction::from_fn(grid, |x| {
        let envelope = 1.0 - bump(x / 2.0);
        packets
            .iter()
            .map(|&(x0, w, xi)| (-(x - x0).powi(2) / (2.0 * w * w)).exp() * Complex64::from_polar(envelope, xi * x))
            .sum()
    })
}

/// A fixed set of seeded initial data dealt round-robin over the modes `ks`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothingSuite {
    pub m: u32,
    pub ks: Vec<i64>,
    pub data_count: usize,
    pub seed: u64,
    pub final_time: f64,
    pub half_length: f64,
    /// Use [`away_packets`] instead of [`wave_packets`].
    pub away: bool,
}

impl SmoothingSuite {
    pub fn new(m: u32) -> Self {
        Self {
            m,
            ks: vec![0, 1, 4, 16, 64],
            data_count: 20,
            seed: 0,
            final_time: 0.02,
            half_length: 10.0,
            away: false,
        }
    }

    /// `(k, seed)` of datum `i`.
    pub fn jobs(&self) -> Vec<(i64, u64)> {
        (0..self.data_count).map(|i| (self.ks[i % self.ks.len()], self.seed + i as u64)).collect()
    }

    /// One report per datum, in job order.
    pub fn run(&self) -> Result<Vec<SmoothingReport>> {
        if self.ks.is_empty() || self.data_count == 0 {
            return Err(Error::InvalidParameter("smoothing suite is empty".into()));
        }
        let profile = SurfaceProfile::new(self.m)?;
        crate::par_map(&self.jobs(), |&(k, seed)| {
            let grid = *mode_operator(profile, k, self.half_length)?.grid();
            let u0 = if self.away { away_packets(grid, seed) } else { wave_packets(grid, seed) };
            smoothing_run(profile, k, &u0, self.final_time)
        })
        .into_iter()
        .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SaturationConfig {
    pub m: u32,
    pub k: i64,
    /// Time-scale divisor `A`: `T = |k|^{-2/(m+1)}/A`.
    pub a: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Defaults to `2rγ + 2`, with `r` the radius of `χ` in units of `γ`.
    pub half_length: Option<f64>,
    /// Radius of `χ` in units of `γ`.
    pub chi_radius: f64,
}

impl SaturationConfig {
    pub fn new(m: u32, k: i64) -> Self {
        Self { m, k, a: 10.0, alpha: 1.0, beta: 1.0, half_length: None, chi_radius: 4.0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SaturationReport {
    pub k: i64,
    pub h: f64,
    pub gamma: f64,
    pub final_time: f64,
    /// `∫₀ᵀ (1+k²) ‖χψ‖² dt / ((1+k²)^{m/(m+1)} ‖φ₀‖²)`.
    pub rho: f64,
    /// `∫₀ᵀ (1+k²) ‖χψ‖² dt`.
    pub evolved_integral: f64,
    /// `∫₀ᵀ ‖⟨D_θ⟩ e^{itτ} φ₀‖² dt` by the trapezoid rule.
    pub ansatz_integral: f64,
    /// `B ‖|D_θ|^{-1/(m+1)} ⟨D_θ⟩ φ₀‖²`.
    pub closed_form: f64,
    pub b: f64,
    /// `max_t ‖ψ(t) - e^{itτ} φ₀‖ / ‖φ₀‖`.
    pub fidelity: f64,
    pub boundary_mass: f64,
    pub max_norm_drift: f64,
    pub steps: usize,
    /// `(t, ‖χψ(t)‖²)`, thinned to at most [`SERIES_POINTS`] + 1 samples.
    pub chi_mass: Vec<(f64, f64)>,
}

pub const SERIES_POINTS: usize = 200;

/// `B = (1 - e^{-2β/A}) / (2β)`.
pub fn saturation_b(beta: f64, a: f64) -> f64 {
    (1.0 - (-2.0 * beta / a).exp()) / (2.0 * beta)
}

/// Evolve the quasimode `φ₀ = ũ(·; h = 1/|k|)` under the full `P_k` with
/// `∂_t ψ = iP_k ψ` for `T = |k|^{-2/(m+1)}/A` and measure how much of the
/// smoothing budget it uses.
pub fn saturation_experiment(cfg: &SaturationConfig) -> Result<SaturationReport> {
    if cfg.m < 2 {
        return Err(Error::InvalidParameter(format!("saturation needs m >= 2, got {}", cfg.m)));
    }
    if cfg.k.unsigned_abs() < 8 {
        return Err(Error::InvalidParameter(format!("saturation needs |k| >= 8, got {}", cfg.k)));
    }
    if !(cfg.a > 0.0) {
        return Err(Error::InvalidParameter(format!("A must be positive, got {}", cfg.a)));
    }
    if cfg.chi_radius < 2.0 {
        return Err(Error::InvalidRun(format!(
            "χ radius {}γ does not cover the quasimode support 2γ",
            cfg.chi_radius
        )));
    }
    let profile = SurfaceProfile::new(cfg.m)?;
    let kabs = cfg.k.unsigned_abs() as f64;
    let h = 1.0 / kabs;
    let e = SpectralParamE::new(cfg.alpha, cfg.beta, h, cfg.m)?;
    let gamma = e.gamma();
    let half_length = cfg.half_length.unwrap_or(2.0 * cfg.chi_radius * gamma + 2.0);
    let op = mode_operator(profile, cfg.k, half_length)?;
    let grid = *op.grid();
    if cfg.chi_radius * gamma * 2.0 >= 0.9 * grid.half_length() {
        return Err(Error::InvalidRun(format!(
            "χ support {} does not fit inside the grid",
            2.0 * cfg.chi_radius * gamma
        )));
    }
    let q = build_quasimode(e, grid)?;
    let phi0 = GridFunction::from_values(grid, q.u_tilde.clone())?;
    let phi0_norm2 = phi0.norm().powi(2);

    let mf = f64::from(cfg.m);
    let t_final = kabs.powf(-2.0 / (mf + 1.0)) / cfg.a;
    let k2 = kabs * kabs;
    // τ = k²(1 + E/h²) = k² + k²E
    let tau = k2 + k2 * e.value();
    let chi: Vec<f64> = (1..grid.len()).map(|j| bump(grid.x(j) / (cfg.chi_radius * gamma))).collect();

    let mut spec = RunSpec::new(op, phi0.clone(), cfg.k, t_final);
    spec.direction = TimeDirection::Reverse;
    spec.energy_shift = k2;
    spec.observables = vec![
        Observable::WeightedMass(chi.iter().map(|c| c * c).collect()),
        Observable::DistanceTo { reference: phi0.interior().to_vec(), omega: tau - k2 },
    ];
    let run = propagate(&spec)?;
    if !run.valid {
        return Err(Error::InvalidRun(format!(
            "boundary mass {:.3e} exceeds {BOUNDARY_MASS_LIMIT:.0e}",
            run.boundary_mass
        )));
    }

    let jk2 = 1.0 + k2;
    let evolved_integral = jk2 * trapezoid(&run.observables[0], run.dt);
    let rho = evolved_integral / (jk2.powf(mf / (mf + 1.0)) * phi0_norm2);
    let decay: Vec<f64> = run.times.iter().map(|t| (-2.0 * tau.im * t).exp() * jk2 * phi0_norm2).collect();
    let ansatz_integral = trapezoid(&decay, run.dt);
    let b = saturation_b(cfg.beta, cfg.a);
    let closed_form = b * kabs.powf(-2.0 / (mf + 1.0)) * jk2 * phi0_norm2;
    let fidelity = run.observables[1].iter().fold(0.0, |a: f64, &d| a.max(d)) / phi0_norm2.sqrt();

    Ok(SaturationReport {
        k: cfg.k,
        h,
        gamma,
        final_time: run.final_time,
        rho,
        evolved_integral,
        ansatz_integral,
        closed_form,
        b,
        fidelity,
        boundary_mass: run.boundary_mass,
        max_norm_drift: run.max_norm_drift,
        steps: run.steps,
        chi_mass: thin(&run.times, &run.observables[0]),
    })
}

fn thin(times: &[f64], values: &[f64]) -> Vec<(f64, f64)> {
    let stride = times.len().div_ceil(SERIES_POINTS).max(1);
    let mut out: Vec<(f64, f64)> = times.iter().zip(values).step_by(stride).map(|(&t, &v)| (t, v)).collect();
    if (times.len() - 1) % stride != 0 {
        out.push((times[times.len() - 1], values[values.len() - 1]));
    }
    out
}
