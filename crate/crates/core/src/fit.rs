//! Log-log least squares for scaling laws `value ≈ C·parameter^slope`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_SAMPLES: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    /// `(parameter, value)` pairs as given.
    pub samples: Vec<(f64, f64)>,
    pub slope: f64,
    /// Intercept of the fit in log space, `ln C`.
    pub intercept: f64,
    /// `max |value / fitted − 1|` over the samples.
    pub max_relative_residual: f64,
}

impl ScalingFit {
    pub fn prefactor(&self) -> f64 {
        self.intercept.exp()
    }

    pub fn predict(&self, parameter: f64) -> f64 {
        (self.intercept + self.slope * parameter.ln()).exp()
    }

    /// Ratio of the largest to the smallest `value / parameter^exponent`.
    pub fn compensated_spread(&self, exponent: f64) -> f64 {
        let (lo, hi) = self
            .samples
            .iter()
            .map(|&(p, v)| v / p.powf(exponent))
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), r| (lo.min(r), hi.max(r)));
        hi / lo
    }
}

/// Ordinary least squares of `ln value` on `ln parameter`.
pub fn fit_exponent(samples: &[(f64, f64)]) -> Result<ScalingFit> {
    if samples.len() < MIN_SAMPLES {
        return Err(Error::InvalidParameter(format!(
            "a scaling fit needs at least {MIN_SAMPLES} samples, got {}",
            samples.len()
        )));
    }
    if let Some(&(p, v)) = samples.iter().find(|&&(p, v)| !(p > 0.0 && v > 0.0 && p.is_finite() && v.is_finite())) {
        return Err(Error::InvalidParameter(format!("non-positive sample ({p}, {v})")));
    }
    let n = samples.len() as f64;
    let xs: Vec<f64> = samples.iter().map(|s| s.0.ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("all parameters coincide".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_relative_residual = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| ((y - intercept - slope * x).exp() - 1.0).abs())
        .fold(0.0, f64::max);
    Ok(ScalingFit { samples: samples.to_vec(), slope, intercept, max_relative_residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dyadic(p: f64, c: f64, count: i32) -> Vec<(f64, f64)> {
        (0..count).map(|i| {
            let h = 2f64.powi(-4 - i);
            (h, c * h.powf(p))
        }).collect()
    }

    #[test]
    fn exact_power_law() {
        let fit = fit_exponent(&dyadic(4.0 / 3.0, 2.5, 6)).unwrap();
        assert!((fit.slope - 4.0 / 3.0).abs() < 1e-12);
        assert!((fit.prefactor() - 2.5).abs() < 1e-10);
        assert!(fit.max_relative_residual < 1e-12);
    }

    #[test]
    fn too_few_or_nonpositive() {
        assert!(fit_exponent(&dyadic(1.0, 1.0, 3)).is_err());
        let mut s = dyadic(1.0, 1.0, 5);
        s[2].1 = 0.0;
        assert!(fit_exponent(&s).is_err());
        s[2].1 = -1.0;
        assert!(fit_exponent(&s).is_err());
    }

    #[test]
    fn one_percent_perturbation() {
        // Independent sensitivity: d slope = (x_i - x̄) δ / Σ (x - x̄)² for a
        // log perturbation δ at sample i.
        let p = -2.0 / 3.0;
        for count in 4..=6 {
            for i in 0..count as usize {
                let mut s = dyadic(p, 1.0, count);
                s[i].1 *= 1.01;
                let fit = fit_exponent(&s).unwrap();
                let xs: Vec<f64> = s.iter().map(|v| v.0.ln()).collect();
                let mx = xs.iter().sum::<f64>() / xs.len() as f64;
                let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
                let predicted = p + (xs[i] - mx) * 1.01f64.ln() / sxx;
                assert!((fit.slope - predicted).abs() < 1e-12);
                assert!((fit.slope - p).abs() < 0.02);
            }
        }
    }

    proptest! {
        #[test]
        fn recovers_any_power_law(p in -3.0f64..3.0, c in 1e-3f64..1e3, start in 1e-3f64..10.0, ratio in 1.1f64..4.0) {
            let s: Vec<(f64, f64)> = (0..5).map(|i| {
                let x = start * ratio.powi(i);
                (x, c * x.powf(p))
            }).collect();
            let fit = fit_exponent(&s).unwrap();
            prop_assert!((fit.slope - p).abs() < 1e-9);
            prop_assert_eq!(fit_exponent(&s).unwrap(), fit);
        }
    }
}
