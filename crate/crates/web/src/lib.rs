//! wasm-bindgen bindings for the browser demo in `www/`.
//!
//! Each export returns a flat `Float64Array`; the page slices it into
//! columns.

use traplab_core::hamiltonian::required_spacing;
use traplab_core::quasimode::{build_quasimode, standard_grid, SpectralParamE};
use traplab_core::spectral::ground_energy;
use traplab_core::{assemble, Error, Grid1D, ModePotentialSpec, ModelOperator, OperatorSpec, SurfaceProfile};
use wasm_bindgen::prelude::*;

fn js(e: traplab_core::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// Interleaved `(x, V_k(x))` for the mode potential `k² A^{-2} + V₁` on
/// `[-half_length, half_length]`.
#[wasm_bindgen]
pub fn mode_potential(m: u32, k: i32, half_length: f64, points: usize) -> Result<Vec<f64>, JsError> {
    potential_samples(m, k, half_length, points).map_err(js)
}

/// Interleaved `(x, Re ũ, Im ũ)` for the cut-off quasimode, followed by the
/// relative residual `‖R‖/‖ũ‖` as the last entry.
#[wasm_bindgen]
pub fn quasimode(m: u32, h: f64, alpha: f64, beta: f64) -> Result<Vec<f64>, JsError> {
    quasimode_samples(m, h, alpha, beta).map_err(js)
}

/// Lowest `count` eigenvalues of `-h²∂² + x^{2m}` on `[-4, 4]`.
#[wasm_bindgen]
pub fn oscillator_levels(m: u32, h: f64, count: usize) -> Result<Vec<f64>, JsError> {
    levels(m, h, count).map_err(js)
}

fn potential_samples(m: u32, k: i32, half_length: f64, points: usize) -> traplab_core::Result<Vec<f64>> {
    let spec = ModePotentialSpec::fourier(SurfaceProfile::new(m)?, i64::from(k));
    let grid = Grid1D::new(half_length, points)?;
    Ok(grid.nodes().flat_map(|x| [x, spec.potential(x)]).collect())
}

fn quasimode_samples(m: u32, h: f64, alpha: f64, beta: f64) -> traplab_core::Result<Vec<f64>> {
    let e = SpectralParamE::new(alpha, beta, h, m)?;
    let q = build_quasimode(e, standard_grid(&e)?)?;
    let residual = q.residual()?.relative;
    let mut out: Vec<f64> = q.grid.nodes().zip(&q.u_tilde).flat_map(|(x, v)| [x, v.re, v.im]).collect();
    out.push(residual);
    Ok(out)
}

fn levels(m: u32, h: f64, count: usize) -> traplab_core::Result<Vec<f64>> {
    if !(1.0 / 64.0..=1.0).contains(&h) {
        return Err(Error::InvalidParameter("h must lie in [1/64, 1]".into()));
    }
    let model = ModelOperator::oscillator(m, h);
    let grid = Grid1D::with_max_spacing(4.0, required_spacing(&OperatorSpec::Model(model)) / 4.0)?;
    let op = assemble(model, grid, None)?;
    Ok(ground_energy(&op, count.clamp(1, 8))?.eigenvalues)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples() {
        let v = potential_samples(2, 3, 5.0, 100).unwrap();
        assert_eq!(v.len(), 2 * 100);
        assert!((v[100] - 0.0).abs() < 1e-12 && (v[101] - 9.0).abs() < 1e-12);
        assert!(potential_samples(0, 3, 5.0, 100).is_err());
        let q = quasimode_samples(2, 0.05, 1.0, 1.0).unwrap();
        assert_eq!(q.len() % 3, 1);
        assert!(q[q.len() - 1] > 0.0);
        let levels = levels(1, 0.25, 3).unwrap();
        for (e, n) in levels.iter().zip([1.0, 3.0, 5.0]) {
            assert!((e - 0.25 * n).abs() < 1e-6);
        }
    }
}
