//! Exponent reproduction for lower bounds, resolvent growth and WKB
//! quasimodes.

use traplab_core::fit::fit_exponent;
use traplab_core::quasimode::quasimode_scan;
use traplab_core::resolvent::{microlocal_scan, ProbeSettings};
use traplab_core::spectral::{barrier_lower_bound, oscillator_exponent, rescaling_check};

fn dyadic(lo: i32, hi: i32) -> Vec<f64> {
    (lo..=hi).map(|j| 2f64.powi(-j)).collect()
}

#[test]
fn oscillator_ground_state_exponent() {
    let hs = dyadic(4, 9);
    for m in 1..=3 {
        let fit = rescaling_check(m, &hs).unwrap();
        assert!((fit.slope - oscillator_exponent(m)).abs() < 0.02, "m={m}: {}", fit.slope);
        if m == 1 {
            for &(h, e) in &fit.samples {
                assert!(((e - h) / h).abs() < 1e-5, "h={h}: {e}");
            }
        }
    }
}

#[test]
fn barrier_singular_value_exponent() {
    let hs = dyadic(4, 9);
    for m in 2..=3 {
        let fit = barrier_lower_bound(m, &hs).unwrap();
        assert!((fit.slope - oscillator_exponent(m)).abs() < 0.1, "m={m}: {}", fit.slope);
        assert!(fit.compensated_spread(oscillator_exponent(m)) < 1.5);
    }
}

#[test]
fn nondegenerate_barrier_has_logarithmic_loss() {
    let hs = dyadic(4, 9);
    let fit = barrier_lower_bound(1, &hs).unwrap();
    assert!(fit.slope > 1.0 && fit.slope < 1.15, "{}", fit.slope);
    let corrected: Vec<f64> = fit.samples.iter().map(|&(h, s)| s * (1.0 / h).ln().sqrt() / h).collect();
    let lo = corrected.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = corrected.iter().cloned().fold(0.0, f64::max);
    assert!(hi / lo < 1.1, "{corrected:?}");
}

#[test]
fn microlocal_resolvent_growth() {
    let settings = ProbeSettings::default();
    let hs = dyadic(3, 7);
    for (m, want) in [(2, -4.0 / 3.0), (3, -1.5)] {
        let est = microlocal_scan(m, 1.0, &hs, &settings).unwrap();
        let fit = fit_exponent(&hs.iter().zip(&est).map(|(&h, e)| (h, e.value)).collect::<Vec<_>>()).unwrap();
        assert!((fit.slope - want).abs() < 0.1, "m={m}: {}", fit.slope);
    }
}

#[test]
fn non_trapping_energy_is_bounded() {
    let settings = ProbeSettings { frequency_scale: Some(0.25), ..ProbeSettings::default() };
    let hs = dyadic(3, 7);
    let est = microlocal_scan(2, 1.5, &hs, &settings).unwrap();
    let fit = fit_exponent(&hs.iter().zip(&est).map(|(&h, e)| (h, e.value)).collect::<Vec<_>>()).unwrap();
    assert!(fit.slope.abs() < 0.3, "{}", fit.slope);
}

#[test]
fn quasimode_estimates() {
    let hs = dyadic(4, 10);
    for m in [2, 3] {
        let scan = quasimode_scan(1.0, 1.0, m, &hs).unwrap();
        let spread = |f: &dyn Fn(&traplab_core::quasimode::QuasimodeSample) -> f64| {
            let v: Vec<f64> = scan.iter().map(f).collect();
            v.iter().cloned().fold(0.0, f64::max) / v.iter().cloned().fold(f64::INFINITY, f64::min)
        };
        assert!(spread(&|s| s.compensated_norm_sq) < 2.0);
        assert!(spread(&|s| s.max_imag_phase / s.h) < 2.0);
        let residual = fit_exponent(&scan.iter().map(|s| (s.h, s.residual.relative)).collect::<Vec<_>>()).unwrap();
        assert!(residual.slope >= oscillator_exponent(m) - 0.1, "m={m}: {}", residual.slope);
        let mf = f64::from(m);
        let commutator =
            fit_exponent(&scan.iter().map(|s| (s.h, s.residual.commutator_norm)).collect::<Vec<_>>()).unwrap();
        assert!(commutator.slope >= (3.0 * mf + 1.0) / (2.0 * (mf + 1.0)) - 0.05, "{}", commutator.slope);
        assert!(scan.iter().all(|s| s.residual.cross_check < 1e-6));
        assert!(scan.iter().all(|s| s.amplitude_ratio.0 > 0.1 && s.amplitude_ratio.1 < 10.0));
    }
}
