//! Acceptance suite: one pass/fail line per criterion, run through the same
//! pipeline as the `traplab` binary.

use std::process::ExitCode;
use std::time::Instant;

use traplab_cli::config::RawConfig;
use traplab_cli::{run, Experiment, ExperimentConfig, Report};
use traplab_core::evolution::{mode_operator, propagate, RunSpec, TimeDirection};
use traplab_core::grid::l2_norm;
use traplab_core::{Complex64, GridFunction, SurfaceProfile};

/// Maxima over the default smoothing suite for `m = 2`, pinned from the
/// first full run.
const GOLDEN_THETA_RATIO: f64 = 1.954_399_714_6e-1;
const GOLDEN_X_RATIO: f64 = 2.839_559_765_3e-2;

type Outcome = Result<String, String>;

fn report(experiment: Experiment, pairs: &[(&str, &str)]) -> Result<Report, String> {
    let raw: RawConfig = pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
    let config = ExperimentConfig::resolve(experiment, &raw, &[]).map_err(|e| e.to_string())?;
    run(&config).map_err(|e| e.to_string())
}

fn get(r: &Report, key: &str) -> f64 {
    r.summary.get(key).copied().unwrap_or(f64::NAN)
}

fn require(ok: bool, what: String) -> Result<String, String> {
    if ok {
        Ok(what)
    } else {
        Err(what)
    }
}

fn oscillator_lower_bound() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    for m in 1..=3u32 {
        let r = report(Experiment::Spectrum, &[("m", &m.to_string())])?;
        let slope = get(&r, "slope");
        let target = get(&r, "target_slope");
        ok &= (slope - target).abs() <= 0.02;
        notes.push(format!("m={m} slope {slope:.4} (target {target:.4})"));
        if m == 1 {
            let err = get(&r, "max_relative_error_vs_h");
            ok &= err <= 1e-5;
            notes.push(format!("m=1 max |λ₀/h - 1| {err:.1e}"));
        }
    }
    require(ok, notes.join(", "))
}

fn microlocal_growth() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    for (m, target) in [(2u32, -4.0 / 3.0), (3, -1.5)] {
        let slope = get(&report(Experiment::MicrolocalResolvent, &[("m", &m.to_string())])?, "slope");
        ok &= (slope - target).abs() <= 0.1;
        notes.push(format!("m={m} slope {slope:.4} (target {target:.4})"));
    }
    let bounded = report(Experiment::MicrolocalResolvent, &[("z", "1.5"), ("frequency_scale", "0.25")])?;
    let slope = get(&bounded, "slope");
    ok &= slope > -0.3 && slope < 0.3;
    notes.push(format!("z=1.5 slope {slope:.4}"));
    require(ok, notes.join(", "))
}

fn global_resolvent() -> Outcome {
    let r = report(Experiment::FullResolvent, &[("m", "2"), ("lambda", "8:128:dyadic")])?;
    let slope = get(&r, "slope");
    let ratio = get(&r, "min_argmax_ratio_top_two");
    require(
        (slope + 2.0 / 3.0).abs() <= 0.1 && ratio > 0.5,
        format!("slope {slope:.4} (target -0.6667), min k²/λ² at the two largest λ {ratio:.3}"),
    )
}

fn quasimode_construction() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    for m in [2u32, 3] {
        let r = report(Experiment::Quasimode, &[("m", &m.to_string())])?;
        let (norm, slope, target, imag, cross) = (
            get(&r, "norm_spread"),
            get(&r, "slope"),
            get(&r, "target_slope"),
            get(&r, "imag_phase_spread"),
            get(&r, "max_cross_check"),
        );
        ok &= norm < 2.0 && slope >= target - 0.1 && imag < 2.0 && cross <= 1e-6;
        notes.push(format!(
            "m={m}: norm spread {norm:.3}, residual slope {slope:.4} (>= {:.4}), Im ϖ/h spread {imag:.3}, cross-check {cross:.1e}",
            target - 0.1
        ));
    }
    require(ok, notes.join("; "))
}

fn smoothing_upper_bound() -> Outcome {
    let r = report(Experiment::Smoothing, &[("m", "2")])?;
    let theta = get(&r, "max_theta_ratio");
    let x = get(&r, "max_x_ratio");
    let within = |v: f64, g: f64| v.is_finite() && ((v - g) / g).abs() <= 0.05;
    require(
        within(theta, GOLDEN_THETA_RATIO) && within(x, GOLDEN_X_RATIO) && r.rows.iter().all(|row| row.valid),
        format!(
            "max J_θ/D {theta:.5} (golden {GOLDEN_THETA_RATIO:.5}), max J_x/D {x:.5} (golden {GOLDEN_X_RATIO:.5}), {} data",
            r.rows.iter().filter(|row| row.quantity == "seed").count()
        ),
    )
}

fn saturation() -> Outcome {
    let r = report(Experiment::Saturation, &[("m", "2"), ("a", "10"), ("alpha", "1"), ("beta", "1")])?;
    let (lo, spread, ansatz, b) = (get(&r, "rho_min"), get(&r, "rho_spread"), get(&r, "max_ansatz_error"), get(&r, "b"));
    require(
        lo > 0.0 && spread <= 4.0 && ansatz <= 0.02,
        format!("min ρ {lo:.5}, max/min {spread:.4}, ansatz vs closed form {ansatz:.1e}, B {b:.5}"),
    )
}

fn infrastructure() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    let p = SurfaceProfile::new(2).unwrap();

    let defect = [0i64, 4, 64]
        .iter()
        .map(|&k| mode_operator(p, k, 10.0).map(|op| (op.is_hermitian(), op.hermiticity_defect())))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    ok &= defect.iter().all(|&(h, d)| h && d == 0.0);
    notes.push(format!("Hermiticity defect {:.1e}", defect.iter().map(|d| d.1).fold(0.0, f64::max)));

    let op = mode_operator(p, 4, 8.0).map_err(|e| e.to_string())?;
    let grid = *op.grid();
    let u0 = GridFunction::from_fn(grid, |x| (-2.0 * (x - 0.5).powi(2)).exp() * Complex64::from_polar(1.0, 3.0 * x));
    let mut spec = RunSpec::new(op.clone(), u0.clone(), 4, 0.5);
    spec.time_step = Some(0.5 / 10_000.0);
    let run10k = propagate(&spec).map_err(|e| e.to_string())?;
    ok &= run10k.steps == 10_000 && run10k.max_norm_drift < 1e-9;
    notes.push(format!("drift over {} steps {:.1e}", run10k.steps, run10k.max_norm_drift));

    let fwd = propagate(&RunSpec::new(op.clone(), u0.clone(), 4, 0.1)).map_err(|e| e.to_string())?;
    let mut back = RunSpec::new(op, fwd.final_grid_function().map_err(|e| e.to_string())?, 4, 0.1);
    back.direction = TimeDirection::Reverse;
    back.time_step = Some(fwd.dt);
    let back = propagate(&back).map_err(|e| e.to_string())?;
    let u = back.final_grid_function().map_err(|e| e.to_string())?;
    let diff: Vec<Complex64> = u.values().iter().zip(u0.values()).map(|(a, b)| a - b).collect();
    let reversal = l2_norm(&diff, grid.dx()) / u0.norm();
    ok &= reversal < 1e-8;
    notes.push(format!("time reversal {reversal:.1e}"));

    let dirs = [tempfile::tempdir().map_err(|e| e.to_string())?, tempfile::tempdir().map_err(|e| e.to_string())?];
    let mut bytes = Vec::new();
    for d in &dirs {
        let out = d.path().to_string_lossy().to_string();
        let r = report(Experiment::Smoothing, &[("m", "3"), ("seed", "7"), ("data_count", "10"), ("out", &out)])?;
        r.write().map_err(|e| e.to_string())?;
        bytes.push((
            std::fs::read(d.path().join("smoothing.csv")).map_err(|e| e.to_string())?,
            std::fs::read(d.path().join("smoothing.json")).map_err(|e| e.to_string())?,
        ));
    }
    let csv_same = bytes[0].0 == bytes[1].0;
    let json_same = {
        let strip = |b: &[u8]| String::from_utf8_lossy(b).replace(&dirs[0].path().to_string_lossy().to_string(), "").replace(&dirs[1].path().to_string_lossy().to_string(), "");
        strip(&bytes[0].1) == strip(&bytes[1].1)
    };
    ok &= csv_same && json_same;
    notes.push(format!("CSV byte-identical {csv_same}, JSON identical up to output path {json_same}"));
    require(ok, notes.join(", "))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("oscillator lower-bound scaling", oscillator_lower_bound),
        ("microlocal resolvent growth", microlocal_growth),
        ("global resolvent decay and sharpness", global_resolvent),
        ("quasimode construction", quasimode_construction),
        ("smoothing upper bound", smoothing_upper_bound),
        ("saturation", saturation),
        ("infrastructure invariants", infrastructure),
    ];
    let mut failures = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {} ({name}): PASS [{secs:.1}s] {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("criterion {} ({name}): FAIL [{secs:.1}s] {detail}", i + 1);
            }
        }
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
