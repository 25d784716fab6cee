//! One function per subcommand. Each writes its tables and `summary.toml`
//! into the plan's output directory and returns the paths written.

use std::path::PathBuf;

use num_complex::Complex64;
use pcoct::signatures::{
    dispersion_experiment, resolution_table, two_pass_equivalence, DispersionReport, DispersionSetup,
    ResolutionReport,
};
use pcoct::snr::{
    classify_regime, cross_spectrum_gap, snr_c_oct, snr_pc_oct, snr_pc_oct_high_gain, snr_pc_oct_shot_limited,
    RegimeReport, SnrReport,
};
use pcoct::stats::SnrEstimate;
use pcoct::stochastic::{run_snr_experiment, ChainSetup, MonteCarlo, SnrExperimentSetup};
use pcoct::{eval_sample_response, eval_spectrum, AmpResponse, Modality, OctSetup, SnrOperatingPoint, Sweep};
use serde::Serialize;

use crate::config::{MonteCarloMode, Plan};
use crate::error::CliError;
use crate::output::{num, write_csv, write_summary};

fn oct_setup(plan: &Plan) -> OctSetup {
    OctSetup {
        spectrum: plan.spectrum.clone(),
        sample: plan.sample.clone(),
        conjugator: Some(plan.conjugator),
        amplifier: Some(plan.amplifier),
        detection: plan.detection,
        grid: plan.grid,
    }
}

/// Optional spectrum and sample-response tables.
fn exports(plan: &Plan) -> Result<Vec<PathBuf>, CliError> {
    let mut files = Vec::new();
    let omegas = plan.grid.omegas();
    if plan.export_spectrum {
        let s = eval_spectrum(&plan.spectrum, &plan.grid)?;
        let rows: Vec<Vec<String>> = omegas.iter().zip(&s).map(|(w, v)| vec![num(*w), num(*v), num(0.0)]).collect();
        files.push(write_csv(&plan.out_dir, "spectrum.csv", &["omega", "value_re", "value_im"], &rows)?);
    }
    if plan.export_response {
        let h = eval_sample_response(&plan.sample, &plan.grid);
        let rows: Vec<Vec<String>> = omegas.iter().zip(&h).map(|(w, v)| vec![num(*w), num(v.re), num(v.im)]).collect();
        files.push(write_csv(&plan.out_dir, "sample_response.csv", &["omega", "value_re", "value_im"], &rows)?);
    }
    Ok(files)
}

#[derive(Debug, Serialize)]
pub struct SignatureSummary {
    pub modality: Modality,
    pub points: usize,
    pub envelope_peak_delay: f64,
    pub envelope_peak: f64,
    /// Coincidence background, `q_oct` only.
    pub background: Option<f64>,
    pub min_trace: f64,
    pub max_trace: f64,
    pub warnings: Vec<String>,
}

pub fn signature(plan: &Plan) -> Result<Vec<PathBuf>, CliError> {
    let delays = plan.delays.points();
    let trace = oct_setup(plan).signature(plan.modality, &delays)?;
    let envelope = trace.envelope();
    let rows: Vec<Vec<String>> = (0..delays.len())
        .map(|i| {
            vec![
                num(delays[i]),
                num(trace.values[i].re),
                num(trace.values[i].im),
                num(envelope[i]),
                num(trace.trace[i]),
            ]
        })
        .collect();
    let mut files = vec![write_csv(
        &plan.out_dir,
        "signature.csv",
        &["T", "z_re", "z_im", "envelope", "trace"],
        &rows,
    )?];
    files.extend(exports(plan)?);
    let (peak_index, peak_delay) = trace.envelope_peak().unwrap_or((0, f64::NAN));
    let mut warnings = trace.warnings.clone();
    warnings.extend(plan.bandwidth_warnings(&[plan.modality]));
    let summary = SignatureSummary {
        modality: plan.modality,
        points: delays.len(),
        envelope_peak_delay: peak_delay,
        envelope_peak: envelope.get(peak_index).copied().unwrap_or(f64::NAN),
        background: trace.background,
        min_trace: trace.trace.iter().copied().fold(f64::INFINITY, f64::min),
        max_trace: trace.trace.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        warnings,
    };
    files.push(write_summary(&plan.out_dir, "signature", &plan.config, &files, &summary)?);
    Ok(files)
}

#[derive(Debug, Serialize)]
pub struct ResolutionSummary {
    pub reference_delay: f64,
    pub reports: Vec<ResolutionReport>,
    pub warnings: Vec<String>,
}

pub fn resolution(plan: &Plan) -> Result<Vec<PathBuf>, CliError> {
    let mirror = plan.mirror()?;
    let reports = resolution_table(&plan.modalities, &mirror, plan.resolution_reference, &plan.resolution_sweep)?;
    let rows: Vec<Vec<String>> = reports
        .iter()
        .map(|r| {
            vec![
                r.modality.name().to_string(),
                num(r.full_width),
                num(r.left_crossing),
                num(r.right_crossing),
                num(r.peak_mirror_delay),
                num(r.ratio_to_c_oct.unwrap_or(f64::NAN)),
            ]
        })
        .collect();
    let mut files = vec![write_csv(
        &plan.out_dir,
        "resolution.csv",
        &[
            "modality",
            "full_width",
            "left_crossing",
            "right_crossing",
            "peak_mirror_delay",
            "ratio_to_c_oct",
        ],
        &rows,
    )?];
    files.extend(exports(plan)?);
    let summary = ResolutionSummary {
        reference_delay: plan.resolution_reference,
        reports,
        warnings: plan.bandwidth_warnings(&plan.modalities),
    };
    files.push(write_summary(&plan.out_dir, "resolution", &plan.config, &files, &summary)?);
    Ok(files)
}

#[derive(Debug, Serialize)]
pub struct TwoPassCheck {
    pub set: usize,
    /// Largest deviation of the two-pass trace from single-pass C-OCT on the doubled mirror.
    pub max_relative_deviation: f64,
}

#[derive(Debug, Serialize)]
pub struct DispersionSummary {
    pub reports: Vec<DispersionReport>,
    pub two_pass_equivalence: Vec<TwoPassCheck>,
    pub warnings: Vec<String>,
}

pub fn dispersion(plan: &Plan) -> Result<Vec<PathBuf>, CliError> {
    if plan.dispersion_sets.is_empty() {
        return Err(CliError::missing("dispersion.sets"));
    }
    let mirror = plan.mirror()?;
    let omega_s = plan.spectrum.bandwidth();
    let t0 = mirror.mirror_delay;
    // widen the width sweep to hold the most broadened envelope
    let spread = plan
        .dispersion_sets
        .iter()
        .map(|set| {
            set.iter()
                .enumerate()
                .map(|(i, b)| 2.0 * b.abs() * omega_s.powi(i as i32 + 1))
                .sum::<f64>()
        })
        .fold(0.0, f64::max);
    let mut reports = Vec::new();
    for &modality in &plan.modalities {
        let centre = modality.peak_delay_factor() * t0;
        let setup = DispersionSetup {
            mirror: mirror.clone(),
            delays: Sweep::centered(centre, plan.dispersion_window, plan.dispersion_window_steps).points(),
            tolerance: plan.dispersion_tolerance,
            width: plan
                .dispersion_width_ratio
                .then(|| (centre, Sweep::centered(t0, (8.0 + 2.0 * spread) / omega_s, 801))),
        };
        reports.extend(dispersion_experiment(modality, &setup, &plan.dispersion_sets)?);
    }
    let mut two_pass = Vec::new();
    if plan.modalities.contains(&Modality::TwoPassCOct) {
        let centre = 2.0 * t0;
        let delays = Sweep::centered(centre, plan.dispersion_window, plan.dispersion_window_steps).points();
        for (i, set) in plan.dispersion_sets.iter().enumerate() {
            two_pass.push(TwoPassCheck {
                set: i,
                max_relative_deviation: two_pass_equivalence(&mirror.with_dispersion(set.clone()), &delays)?,
            });
        }
    }
    let mut rows = Vec::new();
    for r in &reports {
        let set = plan
            .dispersion_sets
            .iter()
            .position(|s| *s == r.coefficients)
            .unwrap_or(usize::MAX);
        for o in &r.orders {
            rows.push(vec![
                r.modality.name().to_string(),
                set.to_string(),
                o.order.to_string(),
                num(o.coefficient),
                num(o.effective),
                num(o.deviation),
                match o.status {
                    pcoct::signatures::OrderStatus::Cancelled => "cancelled".into(),
                    pcoct::signatures::OrderStatus::Active => "active".into(),
                },
                num(r.width_ratio.unwrap_or(f64::NAN)),
            ]);
        }
    }
    let mut files = vec![write_csv(
        &plan.out_dir,
        "dispersion.csv",
        &[
            "modality",
            "set",
            "order",
            "coefficient",
            "effective",
            "deviation",
            "status",
            "width_ratio",
        ],
        &rows,
    )?];
    files.extend(exports(plan)?);
    let summary = DispersionSummary {
        reports,
        two_pass_equivalence: two_pass,
        warnings: plan.bandwidth_warnings(&plan.modalities),
    };
    files.push(write_summary(&plan.out_dir, "dispersion", &plan.config, &files, &summary)?);
    Ok(files)
}

/// The operating point of the plan's single mirror with the amplifier `modality` uses.
fn operating_point(plan: &Plan, modality: Modality) -> Result<SnrOperatingPoint, CliError> {
    let mirror = plan.mirror()?;
    let amp: AmpResponse = match modality {
        Modality::PcOct => plan.conjugator,
        Modality::TwoPassCOct => plan.amplifier,
        // the C-OCT closed form does not involve an amplifier
        Modality::COct => AmpResponse::conjugator(Complex64::new(1.0, 0.0), plan.spectrum.bandwidth())?,
        Modality::QOct => {
            return Err(CliError::invalid(
                "modality",
                "SNR experiments cover pc_oct, two_pass_c_oct and c_oct".into(),
            ))
        }
    };
    Ok(SnrOperatingPoint::new(
        &plan.spectrum,
        mirror.reflectivity.norm(),
        amp,
        plan.detection,
    )?)
}

#[derive(Debug, Serialize)]
pub struct SnrSummary {
    pub modality: Modality,
    pub report: SnrReport,
    pub regime: RegimeReport,
    pub high_gain_limit: f64,
    pub shot_limited_limit: f64,
    pub c_oct_snr: f64,
    /// Relative excess of the quantum-maximum cross-spectrum over the classical one at Ω = 0.
    pub cross_spectrum_gap_at_zero: f64,
}

pub fn snr(plan: &Plan) -> Result<Vec<PathBuf>, CliError> {
    if !matches!(plan.modality, Modality::PcOct | Modality::TwoPassCOct) {
        return Err(CliError::invalid(
            "modality",
            format!("snr needs pc_oct or two_pass_c_oct, got {}", plan.modality),
        ));
    }
    let op = operating_point(plan, plan.modality)?;
    let report = snr_pc_oct(&op);
    let rows: Vec<Vec<String>> = report
        .budget
        .shares()
        .iter()
        .map(|(term, value, share)| vec![term.name().to_string(), num(*value), num(*share)])
        .collect();
    let mut files = vec![write_csv(&plan.out_dir, "snr_budget.csv", &["term", "value", "share"], &rows)?];
    files.extend(exports(plan)?);
    let summary = SnrSummary {
        modality: plan.modality,
        regime: classify_regime(&op),
        high_gain_limit: snr_pc_oct_high_gain(&op),
        shot_limited_limit: snr_pc_oct_shot_limited(&op),
        c_oct_snr: snr_c_oct(&op),
        cross_spectrum_gap_at_zero: cross_spectrum_gap(&plan.spectrum, &plan.grid)?.gap_at_zero,
        report,
    };
    files.push(write_summary(&plan.out_dir, "snr", &plan.config, &files, &summary)?);
    Ok(files)
}

#[derive(Debug, Serialize)]
pub struct MonteCarloSnrSummary {
    pub modality: Modality,
    pub trials: usize,
    pub seed: u64,
    pub delay: f64,
    pub integration_time: f64,
    pub estimate: SnrEstimate,
    pub oracle_snr: f64,
    pub relative_error: f64,
}

#[derive(Debug, Serialize)]
pub struct MonteCarloTraceSummary {
    pub modality: Modality,
    pub trials: usize,
    pub seed: u64,
    /// Largest distance of the trial mean from the quadrature trace, in standard errors.
    pub max_deviation_sigmas: f64,
}

pub fn montecarlo(plan: &Plan) -> Result<Vec<PathBuf>, CliError> {
    match plan.mc_mode {
        MonteCarloMode::Snr => montecarlo_snr(plan),
        MonteCarloMode::Trace => montecarlo_trace(plan),
    }
}

fn montecarlo_snr(plan: &Plan) -> Result<Vec<PathBuf>, CliError> {
    let mirror = plan.mirror()?;
    let setup = SnrExperimentSetup {
        modality: plan.modality,
        op: operating_point(plan, plan.modality)?,
        mirror_delay: mirror.mirror_delay,
        carrier: mirror.carrier,
        grid: plan.grid,
        noise: plan.noise,
    };
    let result = run_snr_experiment(&setup, plan.trials, plan.seed, plan.ci_tolerance)?;
    let rows: Vec<Vec<String>> = result
        .trials
        .iter()
        .map(|t| vec![t.trial_id.to_string(), t.seed.to_string(), num(t.records[0].i_avg)])
        .collect();
    let mut files = vec![write_csv(&plan.out_dir, "trials.csv", &["trial_id", "seed", "i_avg"], &rows)?];
    files.extend(exports(plan)?);
    let summary = MonteCarloSnrSummary {
        modality: plan.modality,
        trials: plan.trials,
        seed: plan.seed,
        delay: result.delay,
        integration_time: result.integration_time,
        estimate: result.estimate,
        oracle_snr: result.oracle,
        relative_error: result.relative_error,
    };
    files.push(write_summary(&plan.out_dir, "montecarlo", &plan.config, &files, &summary)?);
    Ok(files)
}

fn montecarlo_trace(plan: &Plan) -> Result<Vec<PathBuf>, CliError> {
    let chain = ChainSetup {
        modality: plan.modality,
        spectrum: plan.spectrum.clone(),
        sample: plan.sample.clone(),
        conjugator: Some(plan.conjugator),
        amplifier: Some(plan.amplifier),
        detection: plan.detection,
        grid: plan.grid,
        guard: Some(plan.guard),
    };
    let delays = plan.delays.points();
    let analytic = chain.analytic_mean(&delays)?;
    let ensemble = MonteCarlo::new(chain, delays.clone(), plan.noise)?.run(plan.trials, plan.seed)?;
    let mut rows = Vec::with_capacity(plan.trials * delays.len());
    for t in &ensemble.trials {
        for (d, r) in delays.iter().zip(&t.records) {
            rows.push(vec![t.trial_id.to_string(), t.seed.to_string(), num(*d), num(r.i_avg)]);
        }
    }
    let mut files = vec![write_csv(&plan.out_dir, "trials.csv", &["trial_id", "seed", "T", "i_avg"], &rows)?];
    let means = ensemble.mean_trace();
    let mean_rows: Vec<Vec<String>> = (0..delays.len())
        .map(|i| {
            let se = means[i].std_error();
            vec![
                num(delays[i]),
                num(means[i].mean),
                num(se),
                num(analytic[i]),
                num((means[i].mean - analytic[i]) / se),
            ]
        })
        .collect();
    files.push(write_csv(
        &plan.out_dir,
        "mean_trace.csv",
        &["T", "mean", "std_error", "analytic", "deviation_sigmas"],
        &mean_rows,
    )?);
    files.extend(exports(plan)?);
    let summary = MonteCarloTraceSummary {
        modality: plan.modality,
        trials: plan.trials,
        seed: plan.seed,
        max_deviation_sigmas: ensemble.max_deviation_sigmas(&analytic),
    };
    files.push(write_summary(&plan.out_dir, "montecarlo", &plan.config, &files, &summary)?);
    Ok(files)
}
