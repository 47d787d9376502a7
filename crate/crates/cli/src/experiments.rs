//! The seven experiments, each turning a config into a [`Report`].

use std::collections::BTreeMap;

use traplab_core::evolution::{saturation_b, saturation_experiment, SaturationConfig, SmoothingSuite};
use traplab_core::fit::{fit_exponent, ScalingFit};
use traplab_core::quasimode::{build_quasimode, quasimode_scan, SpectralParamE};
use traplab_core::resolvent::{default_k_max, full_resolvent_norm, microlocal_scan, ProbeSettings, EPSILON_STABILITY};
use traplab_core::spectral::{barrier_lower_bound, oscillator_exponent, oscillator_lower_bound, rescaling_check, rotated_resonance};
use traplab_core::Grid1D;

use crate::check::evaluate;
use crate::config::{Experiment, ExperimentConfig};
use crate::report::{Report, Row, Table};
use crate::RunError;

struct Builder {
    report: Report,
}

impl Builder {
    fn new(config: &ExperimentConfig) -> Self {
        Self {
            report: Report {
                experiment: config.experiment.name().to_string(),
                version: env!("CARGO_PKG_VERSION"),
                config: config.clone(),
                provenance: BTreeMap::new(),
                fits: BTreeMap::new(),
                summary: BTreeMap::new(),
                checks: Vec::new(),
                rows: Vec::new(),
                tables: Vec::new(),
                primary_fit: None,
            },
        }
    }

    fn row(&mut self, module: &'static str, param_name: &'static str, param_value: f64, quantity: &str, value: f64, valid: bool) {
        self.report.provenance.entry(quantity.to_string()).or_insert(module);
        self.report.rows.push(Row {
            experiment: self.report.experiment.clone(),
            m: self.report.config.m,
            param_name,
            param_value,
            quantity: quantity.to_string(),
            value,
            valid,
            module,
        });
    }

    fn fit(&mut self, name: &str, fit: ScalingFit, primary: bool) {
        let key = if primary { "slope".to_string() } else { format!("{name}_slope") };
        self.report.summary.insert(key, fit.slope);
        if primary {
            self.report.primary_fit = Some(name.to_string());
        }
        self.report.fits.insert(name.to_string(), fit);
    }

    fn summary(&mut self, name: &str, value: f64) {
        self.report.summary.insert(name.to_string(), value);
    }

    fn finish(mut self) -> Report {
        self.report.checks = evaluate(&self.report.config.checks, &self.report.summary);
        self.report
    }
}

fn spread(values: impl Iterator<Item = f64>) -> f64 {
    let (lo, hi) = values.fold((f64::INFINITY, 0.0f64), |(lo, hi), v| (lo.min(v), hi.max(v)));
    hi / lo
}

pub fn run(config: &ExperimentConfig) -> Result<Report, RunError> {
    let mut b = Builder::new(config);
    match config.experiment {
        Experiment::Spectrum => spectrum(config, &mut b)?,
        Experiment::LowerBound => lower_bound(config, &mut b)?,
        Experiment::MicrolocalResolvent => microlocal(config, &mut b)?,
        Experiment::FullResolvent => full_resolvent(config, &mut b)?,
        Experiment::Quasimode => quasimode(config, &mut b)?,
        Experiment::Smoothing => smoothing(config, &mut b)?,
        Experiment::Saturation => saturation(config, &mut b)?,
    }
    Ok(b.finish())
}

fn spectrum(c: &ExperimentConfig, b: &mut Builder) -> Result<(), RunError> {
    let fit = rescaling_check(c.m, &c.h)?;
    let p = oscillator_exponent(c.m);
    let mut worst_exact = 0.0f64;
    for &(h, e) in &fit.samples {
        b.row("spectral", "h", h, "lambda0", e, true);
        b.row("spectral", "h", h, "lambda0_compensated", e / h.powf(p), true);
        if c.m == 1 {
            worst_exact = worst_exact.max(((e - h) / h).abs());
        }
        for (j, r) in rotated_resonance(c.m, h, 2)?.iter().enumerate() {
            b.row("spectral", "h", h, &format!("resonance{j}_re"), r.re, true);
            b.row("spectral", "h", h, &format!("resonance{j}_im"), r.im, true);
        }
    }
    b.summary("compensated_spread", fit.compensated_spread(p));
    if c.m == 1 {
        b.summary("max_relative_error_vs_h", worst_exact);
    }
    b.summary("target_slope", p);
    b.fit("lambda0", fit, true);
    Ok(())
}

fn lower_bound(c: &ExperimentConfig, b: &mut Builder) -> Result<(), RunError> {
    let p = oscillator_exponent(c.m);
    let oscillator = oscillator_lower_bound(c.m, &c.h)?;
    let barrier = barrier_lower_bound(c.m, &c.h)?;
    for (&(h, s), &(_, t)) in oscillator.samples.iter().zip(&barrier.samples) {
        b.row("spectral", "h", h, "sigma_min_oscillator", s, true);
        b.row("spectral", "h", h, "sigma_min_barrier", t, true);
    }
    b.summary("target_slope", p);
    b.summary("barrier_compensated_spread", barrier.compensated_spread(p));
    b.fit("oscillator", oscillator, true);
    b.fit("barrier", barrier, false);
    Ok(())
}

fn probe_settings(c: &ExperimentConfig) -> ProbeSettings {
    ProbeSettings {
        half_length: c.half_length.unwrap_or(ProbeSettings::default().half_length),
        layer_strength: c.layer_strength,
        cutoff_radius: c.radius,
        frequency_scale: c.frequency_scale,
        epsilon_factor: c.epsilon_factor,
    }
}

fn microlocal(c: &ExperimentConfig, b: &mut Builder) -> Result<(), RunError> {
    let estimates = microlocal_scan(c.m, c.z, &c.h, &probe_settings(c))?;
    let mut samples = Vec::new();
    for (&h, e) in c.h.iter().zip(&estimates) {
        let valid = e.last_increment < EPSILON_STABILITY;
        b.row("resolvent", "h", h, "norm", e.value, valid);
        b.row("resolvent", "h", h, "epsilon", e.epsilon, valid);
        b.row("resolvent", "h", h, "power_iterations", e.iterations as f64, valid);
        samples.push((h, e.value));
    }
    b.summary("target_slope", -oscillator_exponent(c.m));
    b.fit("norm", fit_exponent(&samples)?, true);
    Ok(())
}

fn full_resolvent(c: &ExperimentConfig, b: &mut Builder) -> Result<(), RunError> {
    let settings = probe_settings(c);
    let mut samples = Vec::new();
    let mut ratios = Vec::new();
    for &lambda in &c.lambda {
        let k_max = c.k_max.unwrap_or_else(|| default_k_max(lambda));
        let r = full_resolvent_norm(lambda, c.m, c.radius, k_max, &settings)?;
        for mode in &r.modes {
            let valid = mode.estimate.last_increment < EPSILON_STABILITY;
            b.row("resolvent", "lambda", lambda, &format!("mode_norm[k={}]", mode.k), mode.value, valid);
        }
        b.row("resolvent", "lambda", lambda, "norm", r.value, true);
        b.row("resolvent", "lambda", lambda, "argmax_k", r.argmax_k as f64, true);
        let ratio = (r.argmax_k * r.argmax_k) as f64 / (lambda * lambda);
        b.row("resolvent", "lambda", lambda, "argmax_k2_over_lambda2", ratio, true);
        samples.push((lambda, r.value));
        ratios.push((lambda, ratio));
    }
    ratios.sort_by(|a, b| b.0.total_cmp(&a.0));
    let top_two = ratios.iter().take(2).map(|r| r.1).fold(f64::INFINITY, f64::min);
    b.summary("min_argmax_ratio_top_two", top_two);
    b.summary("target_slope", -2.0 / f64::from(c.m + 1));
    b.fit("norm", fit_exponent(&samples)?, true);
    Ok(())
}

fn quasimode(c: &ExperimentConfig, b: &mut Builder) -> Result<(), RunError> {
    let scan = quasimode_scan(c.alpha, c.beta, c.m, &c.h)?;
    for s in &scan {
        let h = s.h;
        b.row("quasimode", "h", h, "norm_sq_compensated", s.compensated_norm_sq, true);
        b.row("quasimode", "h", h, "residual_relative", s.residual.relative, true);
        b.row("quasimode", "h", h, "commutator_norm", s.residual.commutator_norm, true);
        b.row("quasimode", "h", h, "cross_check", s.residual.cross_check, true);
        b.row("quasimode", "h", h, "max_imag_phase_over_h", s.max_imag_phase / h, true);
        b.row("quasimode", "h", h, "amplitude_ratio_min", s.amplitude_ratio.0, true);
        b.row("quasimode", "h", h, "amplitude_ratio_max", s.amplitude_ratio.1, true);
    }
    b.summary("norm_spread", spread(scan.iter().map(|s| s.compensated_norm_sq)));
    b.summary("imag_phase_spread", spread(scan.iter().map(|s| s.max_imag_phase / s.h)));
    b.summary("max_cross_check", scan.iter().map(|s| s.residual.cross_check).fold(0.0, f64::max));
    b.summary("target_slope", oscillator_exponent(c.m));
    let mf = f64::from(c.m);
    b.summary("target_commutator_slope", (3.0 * mf + 1.0) / (2.0 * (mf + 1.0)));
    let residual = fit_exponent(&scan.iter().map(|s| (s.h, s.residual.relative)).collect::<Vec<_>>())?;
    let commutator = fit_exponent(&scan.iter().map(|s| (s.h, s.residual.commutator_norm)).collect::<Vec<_>>())?;
    b.fit("residual", residual, true);
    b.fit("commutator", commutator, false);

    let e = SpectralParamE::new(c.alpha, c.beta, c.h[0], c.m)?;
    let q = build_quasimode(e, Grid1D::new(2.5 * e.gamma(), c.n)?)?;
    b.report.tables.push(Table {
        name: "quasimode_samples".into(),
        header: vec!["x".into(), "re".into(), "im".into()],
        rows: q.grid.nodes().zip(&q.u_tilde).map(|(x, v)| vec![x, v.re, v.im]).collect(),
    });
    Ok(())
}

fn smoothing(c: &ExperimentConfig, b: &mut Builder) -> Result<(), RunError> {
    let suite = SmoothingSuite {
        m: c.m,
        ks: c.k.clone(),
        data_count: c.data_count,
        seed: c.seed,
        final_time: c.time,
        half_length: c.half_length.unwrap_or(10.0),
        away: c.away,
    };
    let reports = suite.run()?;
    for ((k, seed), r) in suite.jobs().into_iter().zip(&reports) {
        let k = k as f64;
        b.row("evolution", "k", k, "seed", seed as f64, r.valid);
        b.row("evolution", "k", k, "j_theta", r.j_theta, r.valid);
        b.row("evolution", "k", k, "j_x", r.j_x, r.valid);
        b.row("evolution", "k", k, "j_away", r.j_away, r.valid);
        b.row("evolution", "k", k, "data_norm", r.data_norm, r.valid);
        b.row("evolution", "k", k, "theta_ratio", r.theta_ratio, r.valid);
        b.row("evolution", "k", k, "x_ratio", r.x_ratio, r.valid);
        b.row("evolution", "k", k, "away_ratio", r.away_ratio, r.valid);
    }
    let max = |f: fn(&traplab_core::evolution::SmoothingReport) -> f64| reports.iter().map(f).fold(0.0, f64::max);
    b.summary("max_theta_ratio", max(|r| r.theta_ratio));
    b.summary("max_x_ratio", max(|r| r.x_ratio));
    b.summary("max_away_ratio", max(|r| r.away_ratio));
    Ok(())
}

fn saturation(c: &ExperimentConfig, b: &mut Builder) -> Result<(), RunError> {
    let configs: Vec<SaturationConfig> = c
        .k
        .iter()
        .map(|&k| SaturationConfig {
            m: c.m,
            k,
            a: c.a,
            alpha: c.alpha,
            beta: c.beta,
            half_length: c.half_length,
            chi_radius: c.chi_radius,
        })
        .collect();
    let reports = traplab_core::par_map(&configs, saturation_experiment)
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    let mut series = Vec::new();
    for r in &reports {
        let k = r.k as f64;
        b.row("evolution", "k", k, "rho", r.rho, true);
        b.row("evolution", "k", k, "evolved_integral", r.evolved_integral, true);
        b.row("evolution", "k", k, "ansatz_integral", r.ansatz_integral, true);
        b.row("evolution", "k", k, "closed_form", r.closed_form, true);
        b.row("evolution", "k", k, "ansatz_fidelity", r.fidelity, true);
        b.row("evolution", "k", k, "boundary_mass", r.boundary_mass, true);
        b.row("evolution", "k", k, "norm_drift", r.max_norm_drift, true);
        series.extend(r.chi_mass.iter().map(|&(t, v)| vec![k, t, v]));
    }
    let rho_min = reports.iter().map(|r| r.rho).fold(f64::INFINITY, f64::min);
    b.summary("rho_min", rho_min);
    b.summary("rho_max", reports.iter().map(|r| r.rho).fold(0.0, f64::max));
    b.summary("rho_spread", spread(reports.iter().map(|r| r.rho)));
    b.summary(
        "max_ansatz_error",
        reports.iter().map(|r| ((r.ansatz_integral - r.closed_form) / r.closed_form).abs()).fold(0.0, f64::max),
    );
    b.summary("max_fidelity", reports.iter().map(|r| r.fidelity).fold(0.0, f64::max));
    b.summary("b", saturation_b(c.beta, c.a));
    b.report.tables.push(Table {
        name: "saturation_series".into(),
        header: vec!["k".into(), "t".into(), "chi_mass".into()],
        rows: series,
    });
    Ok(())
}
