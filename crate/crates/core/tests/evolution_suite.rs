//! Smoothing functionals on seeded data and the saturation experiment.

use traplab_core::evolution::{
    mode_operator, propagate, saturation_b, saturation_experiment, smoothing_report, smoothing_run, wave_packets,
    RunSpec, SaturationConfig, SmoothingSuite,
};
use traplab_core::{assemble, Grid1D, ModePotentialSpec, OperatorSpec, SurfaceProfile};

/// Maxima of `J_θ/D` and `J_x/D` over the default suite for `m = 2`,
/// pinned from the first full run.
const GOLDEN_THETA_RATIO: f64 = 1.954_399_714_6e-1;
const GOLDEN_X_RATIO: f64 = 2.839_559_765_3e-2;

fn max_of(values: impl Iterator<Item = f64>) -> f64 {
    values.fold(0.0, f64::max)
}

#[test]
fn default_suite_matches_golden_maxima() {
    let reports = SmoothingSuite::new(2).run().unwrap();
    assert_eq!(reports.len(), 20);
    for r in &reports {
        for v in [r.j_theta, r.j_x, r.j_away, r.data_norm, r.theta_ratio, r.x_ratio] {
            assert!(v.is_finite() && v >= 0.0);
        }
    }
    let theta = max_of(reports.iter().map(|r| r.theta_ratio));
    let x = max_of(reports.iter().map(|r| r.x_ratio));
    assert!(((theta - GOLDEN_THETA_RATIO) / GOLDEN_THETA_RATIO).abs() < 1e-6, "{theta:.10e}");
    assert!(((x - GOLDEN_X_RATIO) / GOLDEN_X_RATIO).abs() < 1e-6, "{x:.10e}");
}

#[test]
fn zero_modes_in_suite_have_no_angular_part() {
    let reports = SmoothingSuite::new(3).run().unwrap();
    for r in reports.iter().filter(|r| r.k == 0) {
        assert_eq!(r.j_theta, 0.0);
        assert!(r.j_x / r.h_half_norm < 1.0);
    }
}

#[test]
fn data_away_from_the_orbit_smooth_perfectly() {
    for m in [2, 3] {
        let suite = SmoothingSuite { away: true, ..SmoothingSuite::new(m) };
        let reports = suite.run().unwrap();
        let worst = max_of(reports.iter().map(|r| r.away_ratio));
        assert!(worst < 0.1, "m={m}: {worst}");
    }
}

#[test]
fn functionals_are_converged_in_time_and_space() {
    let p = SurfaceProfile::new(2).unwrap();
    let k = 16;
    let coarse = mode_operator(p, k, 10.0).unwrap();
    let u0 = wave_packets(*coarse.grid(), 3);
    let base = smoothing_run(p, k, &u0, 0.02).unwrap();

    let mut halved = RunSpec::new(coarse, u0.clone(), k, 0.02);
    halved.energy_shift = (k * k) as f64;
    halved.time_step = Some(0.02 / 4000.0);
    let halved = smoothing_report(&propagate(&halved).unwrap(), &u0, 2).unwrap();
    assert!(((halved.j_theta - base.j_theta) / base.j_theta).abs() < 1e-4);
    assert!(((halved.j_x - base.j_x) / base.j_x).abs() < 1e-4);

    let fine_grid = Grid1D::new(10.0, 2 * u0.grid().len()).unwrap();
    let fine_op = assemble(OperatorSpec::Mode(ModePotentialSpec::fourier(p, k)), fine_grid, None).unwrap();
    let fine_u0 = wave_packets(fine_grid, 3);
    let mut fine = RunSpec::new(fine_op, fine_u0.clone(), k, 0.02);
    fine.energy_shift = (k * k) as f64;
    let fine = smoothing_report(&propagate(&fine).unwrap(), &fine_u0, 2).unwrap();
    assert!(((fine.j_theta - base.j_theta) / base.j_theta).abs() < 1e-4);
    assert!(((fine.j_x - base.j_x) / base.j_x).abs() < 1e-4);
}

#[test]
fn saturation_scan() {
    let reports: Vec<_> = [16, 32, 64, 128]
        .iter()
        .map(|&k| saturation_experiment(&SaturationConfig::new(2, k)).unwrap())
        .collect();
    let b = saturation_b(1.0, 10.0);
    let lo = reports.iter().map(|r| r.rho).fold(f64::INFINITY, f64::min);
    let hi = max_of(reports.iter().map(|r| r.rho));
    assert!(lo > 0.5 * b && hi / lo <= 4.0, "{lo} {hi}");
    for r in &reports {
        assert!(((r.ansatz_integral - r.closed_form) / r.closed_form).abs() < 0.02);
        assert!(r.boundary_mass < 1e-8 && r.max_norm_drift < 1e-10);
        assert!(r.fidelity < 0.5);
    }
    let f_lo = reports.iter().map(|r| r.fidelity).fold(f64::INFINITY, f64::min);
    let f_hi = max_of(reports.iter().map(|r| r.fidelity));
    assert!(f_hi / f_lo < 1.01);
}
