//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits non-zero
//! if any criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use num_complex::Complex64;
use pcoct::signatures::{dispersion_experiment, two_pass_equivalence, DispersionSetup, MirrorSetup};
use pcoct::snr::{snr_pc_oct, snr_pc_oct_high_gain, snr_pc_oct_shot_limited};
use pcoct::stochastic::{
    run_snr_experiment, ChainSetup, CorrelationStudy, FieldEngine, MonteCarlo, NoiseSwitches, SnrExperimentSetup,
    SourceKind,
};
use pcoct::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = std::result::Result<String, String>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn broadband_mirror(t0: f64, points: usize) -> MirrorSetup {
    MirrorSetup {
        spectrum: Spectrum::gaussian(1.0, 1.0).unwrap(),
        reflectivity: c(0.1, 0.0),
        mirror_delay: t0,
        dispersion: Vec::new(),
        carrier: 30.0,
        conjugator: Some(AmpResponse::conjugator(c(1.0, 0.0), f64::INFINITY).unwrap()),
        amplifier: Some(AmpResponse::phase_insensitive(c(1.0, 0.0), f64::INFINITY).unwrap()),
        detection: DetectionChain::new(1.0, 1.0, 0.0, 1.0, 1.0).unwrap(),
        grid: FreqGrid::with_omega_max(points, 12.0).unwrap(),
    }
}

fn pcoct(args: &[&str], config: &Path, out: &Path, threads: &str) -> std::result::Result<(), String> {
    let output = Command::new(env!("CARGO_BIN_EXE_pcoct"))
        .args(args)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .env("RAYON_NUM_THREADS", threads)
        .output()
        .map_err(|e| e.to_string())?;
    if output.status.success() {
        Ok(())
    } else {
        Err(String::from_utf8_lossy(&output.stderr).into_owned())
    }
}

fn resolution_factor_of_two() -> Outcome {
    let tmp = tempfile::TempDir::new().map_err(|e| e.to_string())?;
    let cfg = tmp.path().join("res.toml");
    let config = "[spectrum]\npower = 1.0\nbandwidth = 1.0\n[sample]\ncarrier = 30.0\n[[sample.layers]]\nreflectivity = 0.1\ndelay = 2.0\n";
    std::fs::write(&cfg, config).map_err(|e| e.to_string())?;
    let start = Instant::now();
    pcoct(&["resolution"], &cfg, tmp.path(), "1")?;
    let elapsed = start.elapsed().as_secs_f64();
    let table = std::fs::read_to_string(tmp.path().join("resolution.csv")).map_err(|e| e.to_string())?;
    let mut detail = Vec::new();
    let mut ok = elapsed < 10.0;
    for (line, (name, width)) in table.lines().skip(1).zip([
        ("pc_oct", 2.0),
        ("q_oct", 2.0),
        ("c_oct", 4.0),
        ("two_pass_c_oct", 2.0),
    ]) {
        let cols: Vec<&str> = line.split(',').collect();
        let w: f64 = cols[1].parse().map_err(|_| line.to_string())?;
        let ratio: f64 = cols[5].parse().map_err(|_| line.to_string())?;
        let expected_ratio = width / 4.0;
        ok &= cols[0] == name && (w - width).abs() < 1e-3 && (ratio - expected_ratio).abs() < 1e-3;
        detail.push(format!("{name} {w:.6}"));
    }
    check(ok, format!("{} (ratio pc/c 0.5), {elapsed:.2} s", detail.join(", ")))
}

fn envelope_shapes() -> Outcome {
    let start = Instant::now();
    let t = 3.0;
    let mut detail = Vec::new();
    let mut ok = true;
    for (modality, curvature, center) in [
        (Modality::PcOct, -2.0, t / 2.0),
        (Modality::QOct, -2.0, t),
        (Modality::COct, -0.5, t),
    ] {
        let half = if modality == Modality::COct { 2.0 } else { 1.0 };
        let t0s: Vec<f64> = (0..41).map(|i| center - half + half * i as f64 / 20.0).collect();
        let mut logs = Vec::with_capacity(t0s.len());
        for &t0 in &t0s {
            let trace = broadband_mirror(t0, 1 << 13)
                .oct_setup()
                .and_then(|s| s.signature(modality, &[t]))
                .map_err(|e| e.to_string())?;
            logs.push(trace.values[0].norm().ln());
        }
        let fit = pcoct::fit::poly_fit(&t0s, &logs, 2).map_err(|e| e.to_string())?;
        let (a, b) = (fit[2], fit[1]);
        let fitted_center = -b / (2.0 * a);
        let good = (a / curvature - 1.0).abs() < 1e-4 && (fitted_center / center - 1.0).abs() < 1e-4;
        ok &= good;
        detail.push(format!("{modality} curvature {a:.8} center {fitted_center:.8}"));
    }
    let elapsed = start.elapsed().as_secs_f64();
    check(ok && elapsed < 10.0, format!("{}, {elapsed:.2} s", detail.join("; ")))
}

fn even_order_cancellation() -> Outcome {
    let start = Instant::now();
    let b = 3f64.sqrt();
    let mirror = broadband_mirror(0.5, 1 << 13);
    let setup = DispersionSetup {
        mirror: mirror.clone(),
        delays: (0..81).map(|i| -4.0 + 0.1 * i as f64).collect(),
        tolerance: 1e-9,
        width: Some((0.0, Sweep::centered(0.0, 12.0, 241))),
    };
    let sets = [vec![0.0, b], vec![0.0, 0.0, 0.0, b]];
    let mut ok = true;
    let mut detail = Vec::new();
    for modality in [Modality::PcOct, Modality::QOct] {
        let reports = dispersion_experiment(modality, &setup, &sets).map_err(|e| e.to_string())?;
        let worst = reports.iter().map(|r| r.max_deviation).fold(0.0, f64::max);
        ok &= worst < 1e-9;
        detail.push(format!("{modality} deviation {worst:.1e}"));
    }
    let c_oct = dispersion_experiment(Modality::COct, &setup, &sets[..1]).map_err(|e| e.to_string())?;
    let ratio = c_oct[0].width_ratio.ok_or("no width ratio")?;
    ok &= (ratio - 2.0).abs() < 1e-3;
    detail.push(format!("c_oct width ratio {ratio:.6}"));
    let delays: Vec<f64> = (0..81).map(|i| -3.0 + 0.1 * i as f64).collect();
    let mut worst = 0.0f64;
    for set in &sets {
        worst = worst.max(two_pass_equivalence(&mirror.with_dispersion(set.clone()), &delays).map_err(|e| e.to_string())?);
    }
    ok &= worst < 1e-9;
    detail.push(format!("two-pass vs doubled single-pass {worst:.1e}"));
    let elapsed = start.elapsed().as_secs_f64();
    check(ok && elapsed < 30.0, format!("{}, {elapsed:.2} s", detail.join(", ")))
}

fn q_oct_dip() -> Outcome {
    let setup = broadband_mirror(2.0, 1 << 13);
    let delays: Vec<f64> = (0..41).map(|i| 1.0 + 0.05 * i as f64).collect();
    let trace = setup
        .oct_setup()
        .and_then(|s| s.signature(Modality::QOct, &delays))
        .map_err(|e| e.to_string())?;
    let background = trace.background.ok_or("no background")?;
    let at_mirror = trace.trace[20];
    let min = trace.trace.iter().cloned().fold(f64::INFINITY, f64::min);
    check(
        (at_mirror / background).abs() < 1e-9 && min >= -1e-9 * background,
        format!("C(T0) = {at_mirror:.3e}, background {background:.6}"),
    )
}

fn snr_algebra() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst_high = 0.0f64;
    let mut worst_shot = 0.0f64;
    for _ in 0..100 {
        let p = 10f64.powf(rng.random_range(0.0..8.0));
        let r = 10f64.powf(rng.random_range(-4.0..-0.5));
        let gain = 10f64.powf(rng.random_range(0.0..4.0));
        let omega_v = rng.random_range(0.1..20.0);
        let eta = rng.random_range(0.05..1.0);
        let s_th = rng.random_range(0.0..1e3);
        let t_i = 10f64.powf(rng.random_range(0.0..4.0));
        let g_a = 10f64.powf(rng.random_range(-1.0..2.0));
        let op = operating_point(p, r, gain, omega_v, eta, s_th, t_i, g_a)?;
        let report = snr_pc_oct(&op);
        let high = report.numerator / report.budget.partial(&[NoiseTerm::Intrinsic]);
        let shot = report.numerator / report.budget.partial(&[NoiseTerm::RefShot]);
        worst_high = worst_high.max((high / snr_pc_oct_high_gain(&op) - 1.0).abs());
        worst_shot = worst_shot.max((shot / snr_pc_oct_shot_limited(&op) - 1.0).abs());
    }
    let op = operating_point(50.0, 0.02, 1e3, 1e4, 1.0, 0.0, 7.0, 1.0)?;
    let limit = 2.0 * 7.0 * 0.02f64.powi(2) * 50.0;
    let approach = (snr_pc_oct_high_gain(&op) / limit - 1.0).abs();
    check(
        worst_high < 1e-12 && worst_shot < 1e-12 && approach < 1e-3,
        format!("high-gain {worst_high:.1e}, shot-limited {worst_shot:.1e}, wide-conjugator limit {approach:.1e}"),
    )
}

#[allow(clippy::too_many_arguments)]
fn operating_point(
    p: f64,
    r: f64,
    gain: f64,
    omega_v: f64,
    eta: f64,
    s_th: f64,
    t_i: f64,
    g_a: f64,
) -> std::result::Result<SnrOperatingPoint, String> {
    SnrOperatingPoint::new(
        &Spectrum::gaussian(p, 1.0).map_err(|e| e.to_string())?,
        r,
        AmpResponse::conjugator(c(gain, 0.0), omega_v).map_err(|e| e.to_string())?,
        DetectionChain::new(eta, g_a, s_th, 1.0, t_i).map_err(|e| e.to_string())?,
    )
    .map_err(|e| e.to_string())
}

fn mean_signature_oracle() -> Outcome {
    let start = Instant::now();
    let grid = FreqGrid::with_omega_max(1 << 14, 12.0).map_err(|e| e.to_string())?;
    let sample = LayeredSample::new(
        3.0,
        vec![
            Layer::mirror(c(0.3, 0.1), 20.0).with_dispersion(vec![0.4, 0.8]),
            Layer::mirror(c(0.0, -0.2), 21.5),
        ],
    )
    .map_err(|e| e.to_string())?;
    let setup = ChainSetup {
        modality: Modality::PcOct,
        spectrum: Spectrum::gaussian(4.0, 1.0).map_err(|e| e.to_string())?,
        sample,
        conjugator: Some(AmpResponse::conjugator(c(1.5, 0.5), 2.0).map_err(|e| e.to_string())?),
        amplifier: None,
        detection: DetectionChain::new(0.9, 1.5, 0.3, 1.0, grid.record_length()).map_err(|e| e.to_string())?,
        grid,
        guard: None,
    };
    let delays: Vec<f64> = (0..21).map(|i| 38.0 + 0.35 * i as f64).collect();
    let expected = setup.analytic_mean(&delays).map_err(|e| e.to_string())?;
    let mc = MonteCarlo::new(setup, delays, NoiseSwitches::ALL).map_err(|e| e.to_string())?;
    let ensemble = mc.run(10_000, 2024).map_err(|e| e.to_string())?;
    let worst = ensemble.max_deviation_sigmas(&expected);
    let elapsed = start.elapsed().as_secs_f64();
    check(
        worst < 5.0 && elapsed < 300.0,
        format!("21 delays, worst {worst:.2} standard errors, {elapsed:.1} s"),
    )
}

fn snr_setup(modality: Modality, power: f64, r2: f64, gain2: f64, points: usize) -> std::result::Result<SnrExperimentSetup, String> {
    let grid = FreqGrid::with_omega_max(points, 12.0).map_err(|e| e.to_string())?;
    let detection = DetectionChain::new(1.0, 1.0, 0.0, 1.0, grid.record_length()).map_err(|e| e.to_string())?;
    let amp = AmpResponse::conjugator(c(gain2.sqrt(), 0.0), 1.0).map_err(|e| e.to_string())?;
    let spectrum = Spectrum::gaussian(power, 1.0).map_err(|e| e.to_string())?;
    let op = SnrOperatingPoint::new(&spectrum, r2.sqrt(), amp, detection).map_err(|e| e.to_string())?;
    Ok(SnrExperimentSetup {
        modality,
        op,
        mirror_delay: 30.0,
        carrier: 5.0,
        grid,
        noise: NoiseSwitches::ALL,
    })
}

fn snr_oracle() -> Outcome {
    let points = [
        ("intrinsic", Modality::PcOct, 100.0, 1e-5, 1e9, Some(NoiseTerm::Intrinsic)),
        ("reference-shot", Modality::PcOct, 1000.0, 1e-6, 1e5, Some(NoiseTerm::RefShot)),
        ("c_oct", Modality::COct, 100.0, 1e-4, 1.0, None),
    ];
    let mut ok = true;
    let mut detail = Vec::new();
    for (i, (name, modality, power, r2, gain2, dominant)) in points.into_iter().enumerate() {
        let setup = snr_setup(modality, power, r2, gain2, 1 << 14)?;
        let result = run_snr_experiment(&setup, 10_000, 700 + i as u64, None).map_err(|e| e.to_string())?;
        if let Some(term) = dominant {
            let report = result.oracle_report.ok_or("missing oracle report")?;
            ok &= report.budget.dominant() == term;
        }
        ok &= result.relative_error.abs() < 0.15;
        detail.push(format!(
            "{name} {:.4} vs {:.4} ({:+.1}%)",
            result.estimate.snr,
            result.oracle,
            100.0 * result.relative_error
        ));
    }
    check(ok, detail.join(", "))
}

fn source_statistics() -> Outcome {
    let engine = FieldEngine::new(FreqGrid::with_omega_max(1 << 10, 12.0).map_err(|e| e.to_string())?);
    let power = 2.0;
    let dt = engine.time_step();
    let spectrum = Spectrum::gaussian(power, 1.0).map_err(|e| e.to_string())?;
    let lags = [0isize, 1, 4, -6, 15, 60];
    let study = CorrelationStudy::run(&engine, &spectrum, SourceKind::PhaseSensitive, &lags, 10_000, 99)
        .map_err(|e| e.to_string())?;
    let mut worst = [0.0f64; 3];
    for lag in &study.lags {
        let tau = lag.lag as f64 * dt;
        let expected = c(power * (-0.5 * tau * tau).exp(), 0.0);
        worst[0] = worst[0].max(lag.auto.sigmas_from(expected));
        worst[1] = worst[1].max(lag.phase_sensitive.sigmas_from(expected));
        worst[2] = worst[2].max(lag.phase_insensitive.sigmas_from(c(0.0, 0.0)));
    }
    check(
        worst.iter().all(|&w| w < 3.0),
        format!(
            "{} lags, worst auto {:.2}σ, phase-sensitive {:.2}σ, phase-insensitive {:.2}σ",
            lags.len(),
            worst[0],
            worst[1],
            worst[2]
        ),
    )
}

fn determinism() -> Outcome {
    let tmp = tempfile::TempDir::new().map_err(|e| e.to_string())?;
    let base = "modality = \"pc_oct\"\n[spectrum]\npower = 100.0\nbandwidth = 1.0\n[sample]\ncarrier = 5.0\n\
                [[sample.layers]]\nreflectivity = 0.003\ndelay = 30.0\n[conjugator]\ngain = 300.0\nbandwidth = 1.0\n\
                [grid]\npoints = 4096\n[signature]\ndelays = { start = 59.0, stop = 61.0, steps = 5 }\n";
    let mut detail = Vec::new();
    let mut ok = true;
    for mode in ["snr", "trace"] {
        let cfg = tmp.path().join(format!("{mode}.toml"));
        std::fs::write(&cfg, format!("{base}[montecarlo]\nmode = \"{mode}\"\n")).map_err(|e| e.to_string())?;
        let mut files = Vec::new();
        for threads in ["1", "4"] {
            let out = tmp.path().join(format!("{mode}-{threads}"));
            pcoct(&["montecarlo", "--seed", "123", "--trials", "300"], &cfg, &out, threads)?;
            files.push(std::fs::read(out.join("trials.csv")).map_err(|e| e.to_string())?);
        }
        let same = files[0] == files[1];
        ok &= same;
        detail.push(format!("{mode}: {} bytes {}", files[0].len(), if same { "identical" } else { "differ" }));
    }
    check(ok, format!("1 vs 4 threads, {}", detail.join(", ")))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("resolution factor of two", resolution_factor_of_two),
        ("envelope shapes", envelope_shapes),
        ("even-order cancellation", even_order_cancellation),
        ("q_oct complete dip", q_oct_dip),
        ("snr algebra", snr_algebra),
        ("monte carlo mean signature", mean_signature_oracle),
        ("monte carlo snr", snr_oracle),
        ("source statistics", source_statistics),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
