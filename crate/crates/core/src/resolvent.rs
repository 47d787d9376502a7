//! Limiting-absorption resolvents and cutoff-resolvent norm probes.
//!
//! The boundary value `(H - (z ± i0))^{-1}` is replaced by
//! `(H - (z ± iε))^{-1}` on a grid carrying an absorbing layer, with `ε`
//! halved until the probed norm settles. Norms of
//! `M = ψ(hD/s) χ(x/r) R χ(x/r) ψ(hD/s)` come from power iteration on `M*M`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::banded::BandLu;
use crate::cutoff::bump;
use crate::error::{Error, Result};
use crate::geometry::{ModePotentialSpec, SurfaceProfile};
use crate::grid::{AbsorbingLayer, FourierMultiplier, Grid1D, GridFunction, DEFAULT_LAYER_STRENGTH};
use crate::hamiltonian::{assemble, required_spacing, BandedOperator, OperatorSpec};
use crate::vector;

pub const POWER_TOLERANCE: f64 = 1e-4;
pub const POWER_MAX_ITERATIONS: usize = 1000;
/// Successive `ε` values must change the norm by less than this.
pub const EPSILON_STABILITY: f64 = 0.01;
pub const MAX_HALVINGS: usize = 16;
pub const APPLY_RESIDUAL_TOLERANCE: f64 = 1e-10;

const SEED: u64 = 0x5eed_0002;

/// Which boundary value: `z + iε` (outgoing for the layer `-iηW`) or
/// `z - iε` (incoming, computed through complex conjugation).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

#[derive(Debug, Clone)]
pub struct ResolventProbe {
    pub operator: BandedOperator,
    pub z: f64,
    pub epsilon: f64,
    /// Radius `r` of `χ(x/r)`; `0` makes the cutoff identically zero and
    /// `None` drops it.
    pub cutoff_radius: Option<f64>,
    /// Scale `s` of `ψ(hD/s)`; `None` drops the frequency cutoff.
    pub frequency_scale: Option<f64>,
    pub sign: Sign,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NormEstimate {
    pub value: f64,
    /// `ε` at which `value` was obtained.
    pub epsilon: f64,
    pub iterations: usize,
    pub last_increment: f64,
    pub epsilon_trace: Vec<(f64, f64)>,
}

/// Knobs shared by the semiclassical probes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeSettings {
    pub half_length: f64,
    pub layer_strength: f64,
    pub cutoff_radius: f64,
    pub frequency_scale: Option<f64>,
    /// Initial `ε` in units of `h^{2m/(m+1)}`.
    pub epsilon_factor: f64,
}

impl Default for ProbeSettings {
    fn default() -> Self {
        Self {
            half_length: 10.0,
            layer_strength: DEFAULT_LAYER_STRENGTH,
            cutoff_radius: 1.0,
            frequency_scale: Some(1.0),
            epsilon_factor: 1e-2,
        }
    }
}

impl ResolventProbe {
    pub fn new(operator: BandedOperator, z: f64, epsilon: f64) -> Result<Self> {
        let p = Self { operator, z, epsilon, cutoff_radius: None, frequency_scale: None, sign: Sign::Plus };
        p.validate()?;
        Ok(p)
    }

    pub fn with_cutoffs(mut self, radius: Option<f64>, scale: Option<f64>) -> Result<Self> {
        self.cutoff_radius = radius;
        self.frequency_scale = scale;
        self.validate()?;
        Ok(self)
    }

    pub fn with_sign(mut self, sign: Sign) -> Self {
        self.sign = sign;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidParameter(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if let Some(r) = self.cutoff_radius {
            let l = self.operator.grid().half_length();
            if !(r >= 0.0) || 2.0 * r >= l {
                return Err(Error::InvalidParameter(format!(
                    "cutoff radius {r} must satisfy 0 <= 2r < L = {l}"
                )));
            }
        }
        if let Some(s) = self.frequency_scale {
            if !(s > 0.0) {
                return Err(Error::InvalidParameter(format!("frequency scale must be positive, got {s}")));
            }
        }
        Ok(())
    }

    /// Semiclassical operator `-h²∂² + A^{-2} + h²V₁` with the standard
    /// layer, probed at `z`, with `ε = epsilon_factor · h^{2m/(m+1)}`.
    pub fn microlocal(profile: SurfaceProfile, h: f64, z: f64, settings: &ProbeSettings) -> Result<Self> {
        let spec = ModePotentialSpec::semiclassical(profile, h);
        Self::for_spec(spec, h, z, settings)
    }

    fn for_spec(spec: ModePotentialSpec, h: f64, z: f64, settings: &ProbeSettings) -> Result<Self> {
        let spec = OperatorSpec::Mode(spec);
        let grid = Grid1D::with_max_spacing(settings.half_length, required_spacing(&spec))?;
        let layer = AbsorbingLayer::standard(&grid, settings.layer_strength)?;
        let op = assemble(spec, grid, Some(layer))?;
        let m = f64::from(spec.m());
        let eps = settings.epsilon_factor * h.powf(2.0 * m / (m + 1.0));
        Self::new(op, z, eps)?.with_cutoffs(Some(settings.cutoff_radius), settings.frequency_scale)
    }

    fn shift(&self) -> Complex64 {
        Complex64::new(self.z, self.epsilon)
    }

    /// Semiclassical parameter used by `ψ(hD/s)`.
    fn h(&self) -> f64 {
        self.operator.spec().kinetic().sqrt()
    }
}

/// Factored `H - (z + iε)` plus the cutoffs, for repeated application.
struct Factored<'a> {
    probe: &'a ResolventProbe,
    lu: BandLu,
    chi: Option<Vec<f64>>,
    psi: Option<FourierMultiplier>,
}

impl<'a> Factored<'a> {
    fn new(probe: &'a ResolventProbe) -> Result<Self> {
        let lu = probe.operator.factor_shifted(probe.shift())?;
        let grid = *probe.operator.grid();
        let chi = probe.cutoff_radius.map(|r| {
            (1..grid.len())
                .map(|j| if r == 0.0 { 0.0 } else { bump(grid.x(j) / r) })
                .collect()
        });
        let h = probe.h();
        let psi = probe.frequency_scale.map(|s| FourierMultiplier::cutoff(grid, s / h));
        Ok(Self { probe, lu, chi, psi })
    }

    /// `R f` on interior vectors, honouring the sign.
    fn resolve(&self, f: &mut [Complex64], adjoint: bool) {
        match (self.probe.sign, adjoint) {
            (Sign::Plus, false) => self.lu.solve_in_place(f),
            (Sign::Plus, true) => self.lu.solve_adjoint_in_place(f),
            // R₋ f = conj(R₊ conj f)
            (Sign::Minus, adj) => {
                f.iter_mut().for_each(|v| *v = v.conj());
                if adj {
                    self.lu.solve_adjoint_in_place(f);
                } else {
                    self.lu.solve_in_place(f);
                }
                f.iter_mut().for_each(|v| *v = v.conj());
            }
        }
    }

    fn apply_psi(&self, v: &mut [Complex64]) {
        if let Some(psi) = &self.psi {
            let mut full = Vec::with_capacity(v.len() + 1);
            full.push(Complex64::new(0.0, 0.0));
            full.extend_from_slice(v);
            psi.apply_in_place(&mut full);
            v.copy_from_slice(&full[1..]);
        }
    }

    fn apply_chi(&self, v: &mut [Complex64]) {
        if let Some(chi) = &self.chi {
            v.iter_mut().zip(chi).for_each(|(a, c)| *a *= *c);
        }
    }

    /// `M v` or `M* v`.
    fn apply_m(&self, v: &mut [Complex64], adjoint: bool) {
        self.apply_psi(v);
        self.apply_chi(v);
        self.resolve(v, adjoint);
        self.apply_chi(v);
        self.apply_psi(v);
    }

    /// Power iteration on `M*M` from `start`; returns `(‖M‖, iterations,
    /// last relative increment)` and leaves the top vector in `start`.
    fn norm(&self, start: &mut Vec<Complex64>) -> Result<(f64, usize, f64)> {
        if vector::normalize(start) == 0.0 {
            return Ok((0.0, 0, 0.0));
        }
        let mut previous = 0.0;
        let mut increment = f64::INFINITY;
        for it in 1..=POWER_MAX_ITERATIONS {
            let mut w = start.clone();
            self.apply_m(&mut w, false);
            let sigma = vector::norm(&w);
            if sigma == 0.0 {
                return Ok((0.0, it, 0.0));
            }
            self.apply_m(&mut w, true);
            vector::normalize(&mut w);
            *start = w;
            increment = ((sigma - previous) / sigma).abs();
            if increment < POWER_TOLERANCE {
                return Ok((sigma, it, increment));
            }
            previous = sigma;
        }
        Err(Error::NoConvergence { what: "power iteration", iterations: POWER_MAX_ITERATIONS, last_change: increment })
    }
}

/// Solve `(H - (z ± iε)) u = f`.
pub fn apply_resolvent(probe: &ResolventProbe, f: &GridFunction) -> Result<GridFunction> {
    if f.grid() != probe.operator.grid() {
        return Err(Error::InvalidParameter("right-hand side lives on a different grid".into()));
    }
    let factored = Factored::new(probe)?;
    let mut u = f.interior().to_vec();
    factored.resolve(&mut u, false);
    // residual against the operator that was actually inverted
    let op = &probe.operator;
    let z = match probe.sign {
        Sign::Plus => probe.shift(),
        Sign::Minus => probe.shift().conj(),
    };
    let hu = match probe.sign {
        Sign::Plus => op.apply(&u),
        Sign::Minus => {
            let conj_u: Vec<Complex64> = u.iter().map(|v| v.conj()).collect();
            op.apply(&conj_u).into_iter().map(|v| v.conj()).collect()
        }
    };
    let res: Vec<Complex64> = hu.iter().zip(&u).zip(f.interior()).map(|((a, b), c)| a - z * b - c).collect();
    let fnorm = vector::norm(f.interior());
    if fnorm > 0.0 && vector::norm(&res) > APPLY_RESIDUAL_TOLERANCE * fnorm {
        return Err(Error::NoConvergence {
            what: "resolvent solve",
            iterations: 1,
            last_change: vector::norm(&res) / fnorm,
        });
    }
    GridFunction::from_interior(*op.grid(), &u)
}

/// `‖M‖` at the probe's own `ε`, without extrapolation.
pub fn cutoff_resolvent_norm_fixed(probe: &ResolventProbe) -> Result<NormEstimate> {
    let factored = Factored::new(probe)?;
    let mut v = vector::seeded_random(probe.operator.dim(), SEED);
    let (value, iterations, last_increment) = factored.norm(&mut v)?;
    Ok(NormEstimate {
        value,
        epsilon: probe.epsilon,
        iterations,
        last_increment,
        epsilon_trace: vec![(probe.epsilon, value)],
    })
}

/// `‖M‖` with `ε` halved from the probe's value until two successive norms
/// agree to [`EPSILON_STABILITY`].
pub fn cutoff_resolvent_norm(probe: &ResolventProbe) -> Result<NormEstimate> {
    let mut p = probe.clone();
    let mut v = vector::seeded_random(p.operator.dim(), SEED);
    let mut trace = Vec::new();
    let mut iterations = 0;
    let mut previous: Option<f64> = None;
    for _ in 0..=MAX_HALVINGS {
        let factored = Factored::new(&p)?;
        let (value, its, inc) = factored.norm(&mut v)?;
        iterations += its;
        trace.push((p.epsilon, value));
        if value == 0.0 {
            return Ok(NormEstimate { value, epsilon: p.epsilon, iterations, last_increment: inc, epsilon_trace: trace });
        }
        if let Some(prev) = previous {
            if ((value - prev) / value).abs() < EPSILON_STABILITY {
                return Ok(NormEstimate { value, epsilon: p.epsilon, iterations, last_increment: inc, epsilon_trace: trace });
            }
        }
        previous = Some(value);
        p.epsilon *= 0.5;
    }
    Err(Error::EpsilonExtrapolation { halvings: MAX_HALVINGS })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    NonTrapping,
    Trapping,
}

/// Rescaling of Fourier mode `k` at frequency `λ` into semiclassical form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeSplit {
    pub regime: Regime,
    pub h: f64,
    pub z: f64,
    /// Coefficient of `A^{-2}`.
    pub height: f64,
    /// Factor converting the rescaled resolvent norm back: `λ^{-2}` or `k^{-2}`.
    pub prefactor: f64,
}

impl ModeSplit {
    pub fn spec(&self, profile: SurfaceProfile) -> ModePotentialSpec {
        ModePotentialSpec::semiclassical_with_height(profile, self.h, self.height)
    }
}

pub fn mode_split(lambda: f64, k: i64) -> Result<ModeSplit> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidParameter(format!("lambda must be positive, got {lambda}")));
    }
    let k2 = (k * k) as f64;
    let l2 = lambda * lambda;
    Ok(if k2 <= 0.5 * l2 {
        ModeSplit { regime: Regime::NonTrapping, h: 1.0 / lambda, z: 1.0, height: k2 / l2, prefactor: 1.0 / l2 }
    } else {
        ModeSplit { regime: Regime::Trapping, h: 1.0 / k.unsigned_abs() as f64, z: l2 / k2, height: 1.0, prefactor: 1.0 / k2 }
    })
}

/// Default mode truncation `⌈2λ⌉`.
pub fn default_k_max(lambda: f64) -> i64 {
    (2.0 * lambda).ceil() as i64
}

/// `‖ψχ R(z - i0) χψ‖` of the semiclassical operator for each `h`, in order.
pub fn microlocal_scan(m: u32, z: f64, hs: &[f64], settings: &ProbeSettings) -> Result<Vec<NormEstimate>> {
    let profile = SurfaceProfile::new(m)?;
    crate::par_map(hs, |&h| cutoff_resolvent_norm(&ResolventProbe::microlocal(profile, h, z, settings)?))
        .into_iter()
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModeNorm {
    pub k: i64,
    pub split: ModeSplit,
    /// Prefactored norm `prefactor · ‖χ(L̃_k − z_k)^{-1}χ‖`.
    pub value: f64,
    pub estimate: NormEstimate,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FullResolventNorm {
    pub lambda: f64,
    pub value: f64,
    pub argmax_k: i64,
    pub modes: Vec<ModeNorm>,
}

/// `‖χ R(λ - i0) χ‖` on the surface as the largest prefactored mode norm
/// over `0 <= k <= k_max` (the norms are even in `k`).
pub fn full_resolvent_norm(
    lambda: f64,
    m: u32,
    radius: f64,
    k_max: i64,
    settings: &ProbeSettings,
) -> Result<FullResolventNorm> {
    if (k_max as f64) < 2.0 * lambda {
        return Err(Error::Precondition(format!("k_max = {k_max} must be at least 2λ = {}", 2.0 * lambda)));
    }
    let profile = SurfaceProfile::new(m)?;
    let settings = ProbeSettings { cutoff_radius: radius, frequency_scale: None, ..*settings };
    let ks: Vec<i64> = (0..=k_max).collect();
    let modes = crate::par_map(&ks, |&k| -> Result<ModeNorm> {
        let split = mode_split(lambda, k)?;
        let probe = ResolventProbe::for_spec(split.spec(profile), split.h, split.z, &settings)?;
        let estimate = cutoff_resolvent_norm(&probe)?;
        Ok(ModeNorm { k, split, value: split.prefactor * estimate.value, estimate })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let best = modes
        .iter()
        .max_by(|a, b| a.value.total_cmp(&b.value))
        .expect("at least one mode");
    Ok(FullResolventNorm { lambda, value: best.value, argmax_k: best.k, modes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::ModelOperator;
    use crate::spectral::ground_energy;

    fn oscillator() -> BandedOperator {
        assemble(ModelOperator::oscillator(1, 1.0), Grid1D::new(10.0, 1024).unwrap(), None).unwrap()
    }

    #[test]
    fn hermitian_far_below_spectrum() {
        let op = oscillator();
        let probe = ResolventProbe::new(op.clone(), -5.0, 1e-3).unwrap();
        let f = GridFunction::from_fn(*op.grid(), |x| Complex64::new((-x * x).exp(), x.sin()));
        let u = apply_resolvent(&probe, &f).unwrap();
        assert!(u.norm() <= f.norm() / 6.0 * (1.0 + 1e-12));
        let zero = apply_resolvent(&probe, &GridFunction::zeros(*op.grid())).unwrap();
        assert!(zero.values().iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn eigenvector_relation() {
        let op = oscillator();
        let r = ground_energy(&op, 2).unwrap();
        let (lam, v) = (r.eigenvalues[1], &r.eigenvectors[1]);
        let f = GridFunction::from_interior(*op.grid(), v).unwrap();
        let z = 2.9;
        let eps = 0.05;
        for (sign, s) in [(Sign::Plus, 1.0), (Sign::Minus, -1.0)] {
            let probe = ResolventProbe::new(op.clone(), z, eps).unwrap().with_sign(sign);
            let u = apply_resolvent(&probe, &f).unwrap();
            let factor = 1.0 / Complex64::new(lam - z, -s * eps);
            let expect: Vec<Complex64> = v.iter().map(|a| a * factor).collect();
            assert!(vector::max_abs_diff(u.interior(), &expect) < 1e-8);
        }
    }

    #[test]
    fn zero_cutoff_gives_zero() {
        let probe = ResolventProbe::new(oscillator(), 1.0, 0.1).unwrap().with_cutoffs(Some(0.0), None).unwrap();
        assert_eq!(cutoff_resolvent_norm(&probe).unwrap().value, 0.0);
    }

    #[test]
    fn hermitian_norm_is_inverse_distance() {
        let op = oscillator();
        // no cutoffs: ‖(H - z - iε)^{-1}‖ = 1/|λ_j - z - iε| at the closest level
        for &(z, eps) in &[(2.0, 0.5), (3.5, 0.1), (0.2, 0.2)] {
            let probe = ResolventProbe::new(op.clone(), z, eps).unwrap();
            let est = cutoff_resolvent_norm_fixed(&probe).unwrap();
            let levels = ground_energy(&op, 3).unwrap().eigenvalues;
            let want = levels.iter().map(|l| 1.0 / Complex64::new(l - z, -eps).norm()).fold(0.0, f64::max);
            assert!(((est.value - want) / want).abs() < 1e-3, "z={z}: {} vs {want}", est.value);
        }
    }

    #[test]
    fn norm_nonincreasing_in_epsilon() {
        let op = oscillator();
        let mut prev = f64::INFINITY;
        for eps in [0.05, 0.1, 0.2, 0.4, 0.8] {
            let probe = ResolventProbe::new(op.clone(), 2.2, eps)
                .unwrap()
                .with_cutoffs(Some(2.0), None)
                .unwrap();
            let v = cutoff_resolvent_norm_fixed(&probe).unwrap().value;
            assert!(v <= prev * (1.0 + 1e-4));
            prev = v;
        }
    }

    #[test]
    fn sign_symmetry() {
        let p = SurfaceProfile::new(2).unwrap();
        let settings = ProbeSettings::default();
        let plus = ResolventProbe::microlocal(p, 0.125, 1.0, &settings).unwrap();
        let minus = plus.clone().with_sign(Sign::Minus);
        let a = cutoff_resolvent_norm_fixed(&plus).unwrap().value;
        let b = cutoff_resolvent_norm_fixed(&minus).unwrap().value;
        assert!(((a - b) / a).abs() < 1e-6, "{a} vs {b}");
    }

    #[test]
    fn mode_split_cases() {
        let s = mode_split(100.0, 10).unwrap();
        assert_eq!(s.regime, Regime::NonTrapping);
        assert!((s.h - 0.01).abs() < 1e-15 && s.z == 1.0);
        let s = mode_split(100.0, 100).unwrap();
        assert_eq!(s.regime, Regime::Trapping);
        assert!((s.h - 0.01).abs() < 1e-15 && (s.z - 1.0).abs() < 1e-15);
        let s = mode_split(100.0, 0).unwrap();
        assert_eq!(s.regime, Regime::NonTrapping);
        assert_eq!(s.height, 0.0);
        let spec = s.spec(SurfaceProfile::new(2).unwrap());
        let p = SurfaceProfile::new(2).unwrap();
        assert!((spec.potential(0.7) - 1e-4 * p.v1(0.7)).abs() < 1e-18);
        assert!(mode_split(0.0, 1).is_err());
        assert_eq!(mode_split(100.0, -100).unwrap(), mode_split(100.0, 100).unwrap());
    }

    /// Reflection coefficient of the standard layer for the free operator
    /// `-h²∂²` at energy 1: fit `a e^{iθj} + b e^{-iθj}` with the exact
    /// discrete wavenumber on `2 <= x <= 6` and return `|b/a|`.
    fn reflection(h: f64) -> f64 {
        let grid = Grid1D::with_max_spacing(10.0, h / 8.0).unwrap();
        let layer = AbsorbingLayer::standard(&grid, DEFAULT_LAYER_STRENGTH).unwrap();
        let op = assemble(ModelOperator::free(h), grid, Some(layer)).unwrap();
        let probe = ResolventProbe::new(op, 1.0, 1e-12).unwrap();
        let f = GridFunction::from_fn(grid, |x| Complex64::new(bump(x / 0.5), 0.0));
        let u = apply_resolvent(&probe, &f).unwrap();
        let dx = grid.dx();
        // (30 - 32 cos θ + 2 cos 2θ)/12 = dx²/h²
        let q = 12.0 * dx * dx / (h * h);
        let c = (32.0 - (1024.0 - 16.0 * (28.0 - q)).sqrt()) / 8.0;
        let theta = c.acos();
        let (mut g11, mut g12, mut g22) = (0.0, Complex64::new(0.0, 0.0), 0.0);
        let (mut r1, mut r2) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        for (j, x) in grid.nodes().enumerate() {
            if !(2.0..=6.0).contains(&x) {
                continue;
            }
            let e1 = Complex64::from_polar(1.0, theta * j as f64);
            let e2 = e1.conj();
            g11 += 1.0;
            g22 += 1.0;
            g12 += e1.conj() * e2;
            r1 += e1.conj() * u.values()[j];
            r2 += e2.conj() * u.values()[j];
        }
        let det = g11 * g22 - g12.norm_sqr();
        let a = (g22 * r1 - g12 * r2) / det;
        let b = (g11 * r2 - g12.conj() * r1) / det;
        (b / a).norm()
    }

    #[test]
    fn layer_reflection_is_small() {
        for h in [1.0 / 8.0, 1.0 / 32.0, 1.0 / 128.0] {
            let r = reflection(h);
            assert!(r < 1e-4, "h={h}: reflection {r:.3e}");
        }
    }

    #[test]
    fn invalid_probes() {
        let op = oscillator();
        assert!(ResolventProbe::new(op.clone(), 1.0, 0.0).is_err());
        assert!(ResolventProbe::new(op, 1.0, 0.1).unwrap().with_cutoffs(Some(6.0), None).is_err());
    }
}
