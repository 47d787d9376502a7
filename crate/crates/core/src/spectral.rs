//! Eigenvalue and singular-value oracles.
//!
//! Low eigenvalues of Hermitian operators come from bisection on the LDLᵀ
//! inertia count (to isolate each level) followed by shifted inverse
//! iteration with deflation. The smallest singular value of `H - z` comes
//! from inverse power iteration on `(H - z)ᴴ(H - z)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::{fit_exponent, ScalingFit};
use crate::grid::{AbsorbingLayer, Grid1D};
use crate::hamiltonian::{assemble, required_spacing, BandedOperator, ModelOperator, OperatorSpec};
use crate::vector;

pub const MAX_ITERATIONS: usize = 500;
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;
/// Largest residual `‖Hv − λv‖/‖v‖` ever reported.
pub const ACCEPTED_RESIDUAL: f64 = 1e-8;

const SEED: u64 = 0x5eed_0001;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectralResult {
    pub description: String,
    pub eigenvalues: Vec<f64>,
    /// Normalised eigenvectors on the interior nodes (Euclidean norm 1).
    #[serde(skip)]
    pub eigenvectors: Vec<Vec<Complex64>>,
    /// `‖Hv − λv‖` per eigenpair, relative to `max(1, |λ|)`.
    pub residuals: Vec<f64>,
    pub iterations: usize,
}

fn describe(op: &BandedOperator) -> String {
    format!(
        "{:?} on [-{}, {}] with {} points{}",
        op.spec(),
        op.grid().half_length(),
        op.grid().half_length(),
        op.grid().len(),
        if op.layer().is_some() { " and absorbing layer" } else { "" }
    )
}

/// Lowest `count` eigenvalues of a Hermitian operator.
pub fn ground_energy(op: &BandedOperator, count: usize) -> Result<SpectralResult> {
    if !op.is_hermitian() {
        return Err(Error::Precondition("ground_energy needs a Hermitian operator".into()));
    }
    if count == 0 || count > op.dim() {
        return Err(Error::InvalidParameter(format!("cannot compute {count} eigenvalues")));
    }
    let mut lo = op.spectrum_lower_bound();
    lo -= 1e-12 * lo.abs().max(1.0);
    let mut eigenvalues = Vec::with_capacity(count);
    let mut eigenvectors: Vec<Vec<Complex64>> = Vec::with_capacity(count);
    let mut residuals = Vec::with_capacity(count);
    let mut iterations = 0;

    for j in 0..count {
        let (a, b) = isolate(op, j, lo)?;
        lo = a;
        let shift = 0.5 * (a + b);
        let (lambda, v, res, its) = inverse_iteration(op, shift, &eigenvectors, j)?;
        iterations += its;
        eigenvalues.push(lambda);
        eigenvectors.push(v);
        residuals.push(res);
    }
    Ok(SpectralResult { description: describe(op), eigenvalues, eigenvectors, residuals, iterations })
}

/// Bracket `[a, b]` containing exactly eigenvalue `j`, narrowed until its
/// width is a tiny fraction of the eigenvalue scale.
fn isolate(op: &BandedOperator, j: usize, lower: f64) -> Result<(f64, f64)> {
    let mut a = lower;
    let mut step = a.abs().max(1e-6);
    let mut b = a + step;
    while op.count_below(b)? <= j {
        a = b;
        step *= 2.0;
        b = a + step;
        if !b.is_finite() {
            return Err(Error::NoConvergence { what: "eigenvalue bracketing", iterations: 0, last_change: step });
        }
    }
    // now count(a) <= j < count(b)
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b || b - a <= 1e-11 * a.abs().max(b.abs()) {
            break;
        }
        if op.count_below(mid)? <= j {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok((a, b))
}

fn inverse_iteration(
    op: &BandedOperator,
    shift: f64,
    previous: &[Vec<Complex64>],
    j: usize,
) -> Result<(f64, Vec<Complex64>, f64, usize)> {
    let n = op.dim();
    let lu = match op.factor_shifted(Complex64::new(shift, 0.0)) {
        Ok(lu) => lu,
        // the shift hit an eigenvalue exactly; nudge it
        Err(Error::Singular { .. }) => {
            op.factor_shifted(Complex64::new(shift * (1.0 + 1e-13) + 1e-300, 0.0))?
        }
        Err(e) => return Err(e),
    };
    let mut v = vector::seeded_random(n, SEED + j as u64);
    vector::normalize(&mut v);
    let mut best = f64::INFINITY;
    let mut stalled = 0;
    for it in 1..=MAX_ITERATIONS {
        lu.solve_in_place(&mut v);
        for p in previous {
            let c = vector::dot(p, &v);
            vector::sub_scaled(&mut v, c, p);
        }
        vector::normalize(&mut v);
        let hv = op.apply(&v);
        let lambda = vector::dot(&v, &hv).re;
        let res = hv
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - lambda * b).norm_sqr())
            .sum::<f64>()
            .sqrt()
            / lambda.abs().max(1.0);
        if res <= RESIDUAL_TOLERANCE {
            return Ok((lambda, v, res, it));
        }
        if res < 0.5 * best {
            best = res;
            stalled = 0;
        } else {
            stalled += 1;
            best = best.min(res);
            // rounding floor reached
            if stalled >= 3 && best <= ACCEPTED_RESIDUAL {
                return Ok((lambda, v, best, it));
            }
        }
    }
    Err(Error::NoConvergence { what: "inverse iteration", iterations: MAX_ITERATIONS, last_change: best })
}

/// Smallest singular value of `H − z`; 0 when the factorisation is singular.
pub fn sigma_min(op: &BandedOperator, z: Complex64) -> Result<f64> {
    let lu = match op.factor_shifted(z) {
        Ok(lu) => lu,
        Err(Error::Singular { .. }) => return Ok(0.0),
        Err(e) => return Err(e),
    };
    let mut v = vector::seeded_random(op.dim(), SEED);
    vector::normalize(&mut v);
    let mut previous = 0.0;
    let mut change = f64::INFINITY;
    for _ in 0..MAX_ITERATIONS {
        // ‖A⁻ᴴ v‖² is the Rayleigh quotient of (AᴴA)⁻¹ at v
        lu.solve_adjoint_in_place(&mut v);
        let mu = vector::norm(&v).powi(2);
        lu.solve_in_place(&mut v);
        vector::normalize(&mut v);
        if !mu.is_finite() {
            return Ok(0.0);
        }
        change = ((mu - previous) / mu).abs();
        if change < 1e-12 {
            return Ok(1.0 / mu.sqrt());
        }
        previous = mu;
    }
    Err(Error::NoConvergence { what: "smallest singular value", iterations: MAX_ITERATIONS, last_change: change })
}

/// `2m/(m+1)`, the exponent of the semiclassical oscillator lower bound.
pub fn oscillator_exponent(m: u32) -> f64 {
    2.0 * f64::from(m) / f64::from(m + 1)
}

/// Grid for a model oscillator at semiclassical parameter `h`: half-length
/// `half_length`, spacing at the resolution limit.
pub fn model_grid(model: &ModelOperator, half_length: f64) -> Result<Grid1D> {
    Grid1D::with_max_spacing(half_length, required_spacing(&OperatorSpec::Model(*model)))
}

/// Default half-length for oscillator scans.
pub const OSCILLATOR_HALF_LENGTH: f64 = 10.0;

/// `λ₀(h)` of `−h²∂² + x^{2m}` over `hs`, fitted in log-log.
pub fn rescaling_check(m: u32, hs: &[f64]) -> Result<ScalingFit> {
    if hs.len() < 4 {
        return Err(Error::InvalidParameter("rescaling check needs at least 4 values of h".into()));
    }
    let samples = crate::par_map(hs, |&h| -> Result<(f64, f64)> {
        let model = ModelOperator::oscillator(m, h);
        let grid = model_grid(&model, OSCILLATOR_HALF_LENGTH)?;
        let op = assemble(model, grid, None)?;
        Ok((h, ground_energy(&op, 1)?.eigenvalues[0]))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    fit_exponent(&samples)
}

/// Half-length for barrier scans; the barrier top is all that matters.
pub const BARRIER_HALF_LENGTH: f64 = 2.0;
/// Layer strength for barrier scans. The layer on `[1.4, 2]` is thin, so it
/// needs a far larger coefficient than the resolvent layer on `L = 10`.
pub const BARRIER_LAYER_STRENGTH: f64 = 100.0;

/// `σ_min(−h²∂² + x^{2m})` at `z = 0` over `hs`, fitted in log-log. For
/// this positive operator it coincides with `λ₀(h)`.
pub fn oscillator_lower_bound(m: u32, hs: &[f64]) -> Result<ScalingFit> {
    sigma_min_scan(hs, |h| {
        let model = ModelOperator::oscillator(m, h);
        assemble(model, model_grid(&model, OSCILLATOR_HALF_LENGTH)?, None)
    })
}

/// `σ_min(−h²∂² − x^{2m}/m)` at `z = 0` with an absorbing layer, fitted in
/// log-log over `hs`.
pub fn barrier_lower_bound(m: u32, hs: &[f64]) -> Result<ScalingFit> {
    sigma_min_scan(hs, |h| {
        let model = ModelOperator::barrier(m, h);
        let grid = model_grid(&model, BARRIER_HALF_LENGTH)?;
        let layer = AbsorbingLayer::standard(&grid, BARRIER_LAYER_STRENGTH)?;
        assemble(model, grid, Some(layer))
    })
}

fn sigma_min_scan(hs: &[f64], build: impl Fn(f64) -> Result<BandedOperator> + Sync + Send) -> Result<ScalingFit> {
    if hs.len() < 4 {
        return Err(Error::InvalidParameter("a σ_min scan needs at least 4 values of h".into()));
    }
    let samples = crate::par_map(hs, |&h| -> Result<(f64, f64)> {
        Ok((h, sigma_min(&build(h)?, Complex64::new(0.0, 0.0))?))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    fit_exponent(&samples)
}

/// Low eigenvalues `μ_j` of `−∂² + X^{2m}/m` on a grid fine enough for
/// ~1e-9 accuracy.
pub fn rotated_oscillator_levels(m: u32, count: usize) -> Result<Vec<f64>> {
    let model = ModelOperator::rotated(m, 1.0);
    let grid = Grid1D::new(8.0, 4096)?;
    Ok(ground_energy(&assemble(model, grid, None)?, count)?.eigenvalues)
}

/// Heuristic resonances `e^{−iπ/(m+1)} μ_j h^{2m/(m+1)}` of the barrier
/// `−h²∂² − x^{2m}/m`, from complex scaling onto the oscillator.
pub fn rotated_resonance(m: u32, h: f64, count: usize) -> Result<Vec<Complex64>> {
    if m == 0 || !(h > 0.0) {
        return Err(Error::InvalidParameter(format!("rotated resonance needs m >= 1, h > 0 (got {m}, {h})")));
    }
    let rotation = Complex64::from_polar(1.0, -PI / f64::from(m + 1));
    let scale = h.powf(oscillator_exponent(m));
    Ok(rotated_oscillator_levels(m, count)?
        .into_iter()
        .map(|mu| rotation * mu * scale)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Ground state of the quartic oscillator `−∂² + x⁴`, reproduced by the
    /// dense oracle in the integration tests.
    const QUARTIC_GROUND: f64 = 1.060_362_090_484_182_9;

    #[test]
    fn harmonic_levels() {
        let model = ModelOperator::oscillator(1, 1.0);
        let op = assemble(model, Grid1D::new(10.0, 2048).unwrap(), None).unwrap();
        let r = ground_energy(&op, 3).unwrap();
        for (e, want) in r.eigenvalues.iter().zip([1.0, 3.0, 5.0]) {
            assert!((e - want).abs() < 1e-6, "{e}");
        }
        assert!(r.residuals.iter().all(|&x| x <= ACCEPTED_RESIDUAL));
    }

    #[test]
    fn semiclassical_harmonic() {
        let h = 0.05;
        let model = ModelOperator::oscillator(1, h);
        let op = assemble(model, model_grid(&model, 10.0).unwrap(), None).unwrap();
        let e = ground_energy(&op, 1).unwrap().eigenvalues[0];
        assert!((e - h).abs() < 1e-6);
    }

    #[test]
    fn quartic_ground_state() {
        let op = assemble(ModelOperator::oscillator(2, 1.0), Grid1D::new(8.0, 4096).unwrap(), None).unwrap();
        let e = ground_energy(&op, 1).unwrap().eigenvalues[0];
        assert!((e - QUARTIC_GROUND).abs() < 1e-8, "{e}");
    }

    #[test]
    fn refinement_stability() {
        let h = 2f64.powi(-6);
        let model = ModelOperator::oscillator(2, h);
        let g = model_grid(&model, 10.0).unwrap();
        let fine = Grid1D::new(10.0, 2 * g.len()).unwrap();
        let e1 = ground_energy(&assemble(model, g, None).unwrap(), 1).unwrap().eigenvalues[0];
        let e2 = ground_energy(&assemble(model, fine, None).unwrap(), 1).unwrap().eigenvalues[0];
        assert!(((e1 - e2) / e2).abs() < 1e-6);
    }

    #[test]
    fn non_hermitian_rejected() {
        let g = Grid1D::new(4.0, 256).unwrap();
        let op = assemble(ModelOperator::oscillator(1, 1.0), g, Some(AbsorbingLayer::standard(&g, 1.0).unwrap())).unwrap();
        assert!(ground_energy(&op, 1).is_err());
    }

    #[test]
    fn sigma_min_is_distance_to_spectrum() {
        let op = assemble(ModelOperator::oscillator(1, 1.0), Grid1D::new(10.0, 2048).unwrap(), None).unwrap();
        let levels = ground_energy(&op, 4).unwrap().eigenvalues;
        for &z in &[-2.0, 0.0, 2.4, 3.3, 6.2] {
            let dist = levels.iter().map(|l| (l - z).abs()).fold(f64::INFINITY, f64::min);
            let s = sigma_min(&op, Complex64::new(z, 0.0)).unwrap();
            assert!(((s - dist) / dist).abs() < 1e-6, "z={z}: {s} vs {dist}");
        }
        // positive operator at z = 0
        let s0 = sigma_min(&op, Complex64::new(0.0, 0.0)).unwrap();
        assert!(((s0 - levels[0]) / levels[0]).abs() < 1e-6);
    }

    #[test]
    fn rotated_resonances() {
        let r = rotated_resonance(1, 1.0, 2).unwrap();
        assert!((r[0] - Complex64::new(0.0, -1.0)).norm() < 1e-7);
        assert!((r[1] - Complex64::new(0.0, -3.0)).norm() < 1e-6);
        // −∂² + X⁴/2 = 2^{-1/3}(−∂_Y² + Y⁴) under X = 2^{1/6} Y
        let h: f64 = 0.1;
        let r = rotated_resonance(2, h, 3).unwrap();
        let mu0 = 2f64.powf(-1.0 / 3.0) * QUARTIC_GROUND;
        assert!((r[0].norm() - mu0 * h.powf(4.0 / 3.0)).abs() < 1e-9);
        assert!((r[0].arg() + PI / 3.0).abs() < 1e-12);
        assert!(r.iter().all(|z| z.im < 0.0));
    }
}
