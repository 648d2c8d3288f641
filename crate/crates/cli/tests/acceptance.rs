//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails. Tolerances and runtime budgets are fixed here;
//! oracles are computed independently of the library where possible.

use std::path::Path;
use std::process::Command as Proc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use emglink::cavity::{quadrature, q_factors, stored_energies, wall_loss, CavitySpec, FieldSolution};
use emglink::channel::ChannelConfig;
use emglink::emg::{
    classify, extract_features, fall_monitor, generate_corpus, preprocess, CommandSet, FallAction, SafetyState,
    SynthProfile,
};
use emglink::harness::{
    evaluate_classifier, qpsk_awgn_ber, run_burst, train_database, CavityScenario, ExperimentConfig, TrialResult,
};
use emglink::rx::frame_sync_decode;
use emglink::signal::{design_rrc, dft, fir_filter, fwht, SampleBuffer, TapSet, WhtOrdering};
use emglink::tx::{preamble_symbols, TxConfig};
use emglink::Complex;

type Check = fn() -> Result<String, String>;

fn main() {
    let checks: [(&str, f64, Check); 9] = [
        ("kernel oracles", 10.0, kernels),
        ("rrc nyquist", f64::INFINITY, rrc_nyquist),
        ("cavity", 60.0, cavity),
        ("cfo estimator", 30.0, cfo),
        ("end-to-end ber", 300.0, ber),
        ("robust lock", f64::INFINITY, robust_lock),
        ("strobe duty", f64::INFINITY, strobe),
        ("emg pipeline", f64::INFINITY, emg),
        ("cli determinism", f64::INFINITY, determinism),
    ];
    let mut failed = 0;
    for (name, budget_s, f) in checks {
        let t = Instant::now();
        let out = f();
        let secs = t.elapsed().as_secs_f64();
        let out = match out {
            Ok(d) if secs > budget_s => Err(format!("{d}; took {secs:.1} s, budget {budget_s} s")),
            other => other,
        };
        match out {
            Ok(d) => println!("PASS  {name:<16} {d} ({secs:.1} s)"),
            Err(d) => {
                failed += 1;
                println!("FAIL  {name:<16} {d} ({secs:.1} s)");
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn crandn(r: &mut ChaCha8Rng, n: usize) -> Vec<Complex<f64>> {
    (0..n)
        .map(|_| Complex::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)))
        .collect()
}

fn kernels() -> Result<String, String> {
    let mut r = rng(100);
    let mut fir_err: f64 = 0.0;
    for &(n, taps) in &[(1, 1), (50, 7), (1000, 41), (4096, 129)] {
        let x = crandn(&mut r, n);
        let h: Vec<f64> = (0..taps).map(|_| r.random_range(-1.0..1.0)).collect();
        let y = fir_filter(&SampleBuffer::new(x.clone(), 1.0).unwrap(), &TapSet::new(h.clone())).unwrap();
        for k in 0..n {
            let mut want = Complex::new(0.0, 0.0);
            for (j, hj) in h.iter().enumerate().take(k + 1) {
                want += x[k - j] * hj;
            }
            fir_err = fir_err.max((y.samples()[k] - want).norm());
        }
    }
    ensure(fir_err <= 1e-12, || format!("fir error {fir_err:e} > 1e-12"))?;

    let mut wht_err: f64 = 0.0;
    for bits in 0..=10u32 {
        let n = 1usize << bits;
        let x: Vec<f64> = (0..n).map(|_| r.random_range(-1.0..1.0)).collect();
        let y = fwht(&x, WhtOrdering::Natural).unwrap();
        for (i, yi) in y.iter().enumerate() {
            // Sylvester Hadamard entry: (-1)^popcount(i & j)
            let want: f64 = x
                .iter()
                .enumerate()
                .map(|(j, xj)| if (i & j).count_ones() % 2 == 0 { *xj } else { -*xj })
                .sum();
            wht_err = wht_err.max((yi - want).abs());
        }
    }
    ensure(wht_err <= 1e-9, || format!("fwht error {wht_err:e} > 1e-9"))?;

    let mut dft_err: f64 = 0.0;
    for &(n, nfft) in &[(1, 1), (7, 7), (60, 64), (100, 100), (300, 512), (1000, 1024)] {
        let x = crandn(&mut r, n);
        let y = dft(&SampleBuffer::new(x.clone(), 1.0).unwrap(), nfft).unwrap();
        for (k, yk) in y.iter().enumerate() {
            let want: Complex<f64> = x
                .iter()
                .enumerate()
                .map(|(m, xm)| {
                    let ph = -std::f64::consts::TAU * ((k * m) % nfft) as f64 / nfft as f64;
                    xm * Complex::new(ph.cos(), ph.sin())
                })
                .sum();
            dft_err = dft_err.max((yk - want).norm());
        }
    }
    ensure(dft_err <= 1e-9, || format!("dft error {dft_err:e} > 1e-9"))?;
    Ok(format!("fir {fir_err:.1e}, fwht {wht_err:.1e}, dft {dft_err:.1e}"))
}

fn rrc_nyquist() -> Result<String, String> {
    let sps = 2;
    let h = design_rrc(0.5f64, 10, sps).map_err(|e| e.to_string())?.taps;
    let mut g = vec![0.0; 2 * h.len() - 1];
    for (i, a) in h.iter().enumerate() {
        for (j, b) in h.iter().enumerate() {
            g[i + j] += a * b;
        }
    }
    let c = h.len() - 1;
    let worst = (1..=c / sps)
        .flat_map(|k| [g[c - k * sps], g[c + k * sps]])
        .map(|v| (v / g[c]).abs())
        .fold(0.0, f64::max);
    ensure(worst <= 1e-3, || format!("worst off-centre ISI {worst:e} > 1e-3"))?;
    Ok(format!("{} taps, worst off-centre ISI {worst:.2e}", h.len()))
}

fn cavity() -> Result<String, String> {
    let sc = CavityScenario::default();
    let modes = sc.mode_indices().map_err(|e| e.to_string())?;
    let cells: Vec<_> = sc.specs.iter().flat_map(|s| modes.iter().map(move |&m| (*s, m))).collect();
    let rows: Vec<Result<(f64, f64, f64), String>> = cells
        .par_iter()
        .map(|&(spec, m)| -> Result<(f64, f64, f64), String> {
            let sol = FieldSolution::resonant(m, &spec, sc.e0).map_err(|e| e.to_string())?;
            let omega = sol.omega(&spec);
            let (ue, um) = stored_energies(&sol, &spec, m).map_err(|e| e.to_string())?;
            let balance = (ue - um).abs() / ue;
            let p = wall_loss(&sol, &spec, m).map_err(|e| e.to_string())?;
            let pq = quadrature::wall_loss(&sol, &spec, m, 256).map_err(|e| e.to_string())?;
            let ueq = quadrature::electric_energy(&sol, &spec, m, 64).map_err(|e| e.to_string())?;
            let rep = q_factors(&sol, &spec, m, omega).map_err(|e| e.to_string())?;
            let q_num = 2.0 * omega * ueq / pq;
            let p_err = (p - pq).abs() / pq;
            let q_err = (rep.q_tx - q_num).abs() / q_num;

            // Q_rx and the parallel combination, with and without dielectric loss
            for tan_delta in [spec.tan_delta, 1e-3, 2.5e-4] {
                let s = CavitySpec { tan_delta, ..spec };
                let r = q_factors(&sol, &s, m, omega).map_err(|e| e.to_string())?;
                if tan_delta > 0.0 {
                    ensure(r.q_rx == 1.0 / tan_delta, || format!("Q_rx {} ≠ 1/tanδ", r.q_rx))?;
                    let want = 1.0 / (1.0 / r.q_tx + 1.0 / r.q_rx);
                    ensure(r.q_total == want, || format!("Q_total {} ≠ {want}", r.q_total))?;
                } else {
                    ensure(r.q_rx.is_infinite() && r.q_total == r.q_tx, || {
                        format!("lossless dielectric: Q_rx {} Q_total {} Q_tx {}", r.q_rx, r.q_total, r.q_tx)
                    })?;
                }
            }
            Ok((balance, p_err, q_err))
        })
        .collect();
    let mut worst = (0.0f64, 0.0f64, 0.0f64);
    for r in rows {
        let (b, p, q) = r?;
        worst = (worst.0.max(b), worst.1.max(p), worst.2.max(q));
    }
    ensure(worst.0 <= 1e-9, || format!("U_E/U_M mismatch {:e} > 1e-9", worst.0))?;
    ensure(worst.1 <= 0.01, || format!("wall loss vs quadrature {:e} > 1%", worst.1))?;
    ensure(worst.2 <= 0.01, || format!("Q_tx vs quadrature {:e} > 1%", worst.2))?;
    Ok(format!(
        "{} cells: energy balance {:.1e}, wall loss {:.1e}, Q_tx {:.1e}; Q_rx and Q_total exact",
        cells.len(),
        worst.0,
        worst.1,
        worst.2
    ))
}

fn link_cfg(seed: u64, trials: usize, frames: usize, channel: ChannelConfig<f64>) -> ExperimentConfig {
    ExperimentConfig {
        seed,
        trials,
        frames_per_trial: frames,
        tx: TxConfig {
            payload_bits: 2048,
            ..Default::default()
        },
        channel,
        ..Default::default()
    }
}

fn trials(cfg: &ExperimentConfig) -> Result<Vec<TrialResult>, String> {
    (0..cfg.trials)
        .into_par_iter()
        .map(|t| run_burst(cfg, t, None).map(|(_, _, r)| r).map_err(|e| e.to_string()))
        .collect()
}

/// Nearest-rank percentile.
fn percentile(v: &mut [f64], p: f64) -> f64 {
    v.sort_by(f64::total_cmp);
    let rank = ((p / 100.0) * v.len() as f64).ceil() as usize;
    v[rank.clamp(1, v.len()) - 1]
}

fn cfo() -> Result<String, String> {
    let ch = ChannelConfig {
        ebn0_db: 10.0,
        cfo_hz: 1000.0,
        seed: 17,
        ..ChannelConfig::identity()
    };
    let mut cfg = link_cfg(31, 100, 10, ch);
    cfg.rx.cfc_nfft = 4096;
    cfg.rx.cfc_blocks = 1;
    let fs = cfg.tx.sample_rate_hz();
    ensure(fs == 200e3, || format!("sample rate {fs}"))?;
    let rs = trials(&cfg)?;
    let mut errs = Vec::with_capacity(rs.len());
    for (t, r) in rs.iter().enumerate() {
        let est = r.cfc_estimate_hz.ok_or_else(|| format!("trial {t}: no coarse estimate"))?;
        errs.push((est - 1000.0).abs());
    }
    let p95 = percentile(&mut errs, 95.0);
    ensure(p95 <= 15.0, || format!("p95 error {p95:.2} Hz > 15 Hz"))?;
    Ok(format!("100 trials, p95 |error| {p95:.2} Hz, max {:.2} Hz", errs[errs.len() - 1]))
}

struct Counts {
    sent: usize,
    detected: usize,
    bits: u64,
    errors: u64,
    /// Bits and errors over detected frames only.
    locked_bits: u64,
    locked_errors: u64,
    strobe_dev: f64,
}

fn count(cfg: &ExperimentConfig, rs: &[TrialResult]) -> Counts {
    let payload = cfg.tx.payload_bits as u64;
    let mut c = Counts {
        sent: 0,
        detected: 0,
        bits: 0,
        errors: 0,
        locked_bits: 0,
        locked_errors: 0,
        strobe_dev: 0.0,
    };
    for r in rs {
        let missed = (r.frames_sent - r.frames_detected) as u64;
        c.sent += r.frames_sent;
        c.detected += r.frames_detected;
        c.bits += r.bits;
        c.errors += r.bit_errors;
        c.locked_bits += r.bits - missed * payload;
        c.locked_errors += r.bit_errors - missed * payload;
        c.strobe_dev = c.strobe_dev.max(r.strobe_duty_worst_deviation);
    }
    c
}

fn awgn_only(ebn0_db: f64, seed: u64) -> ChannelConfig<f64> {
    ChannelConfig {
        ebn0_db,
        seed,
        ..ChannelConfig::identity()
    }
}

fn ber() -> Result<String, String> {
    let mut parts = Vec::new();
    for (i, ebn0) in [4.0, 6.0, 8.0].into_iter().enumerate() {
        let cfg = link_cfg(40 + i as u64, 25, 20, awgn_only(ebn0, 3));
        let c = count(&cfg, &trials(&cfg)?);
        ensure(c.bits >= 1_000_000, || format!("{ebn0} dB: only {} bits", c.bits))?;
        let measured = c.errors as f64 / c.bits as f64;
        let ratio = measured / qpsk_awgn_ber(ebn0);
        ensure((0.5..=2.0).contains(&ratio), || {
            format!("{ebn0} dB: ber {measured:e} is {ratio:.3}× the AWGN oracle")
        })?;
        parts.push(format!("{ebn0} dB {ratio:.3}×"));
    }
    Ok(format!("ber/oracle over ≥1e6 bits: {}", parts.join(", ")))
}

fn robust_cfg() -> ExperimentConfig {
    let symbol_rate = TxConfig::<f64>::default().symbol_rate_hz;
    let ch = ChannelConfig {
        ebn0_db: 10.0,
        cfo_hz: 0.02 * symbol_rate,
        drift_ppm: 50.0,
        phase_offset_rad: 60f64.to_radians(),
        delay_samples: 0.0,
        seed: 9,
    };
    link_cfg(50, 40, 50, ch)
}

fn robust_lock() -> Result<String, String> {
    let cfg = robust_cfg();
    let c = count(&cfg, &trials(&cfg)?);
    ensure(c.sent >= 500, || format!("only {} frames", c.sent))?;
    let detection = c.detected as f64 / c.sent as f64;
    ensure(detection >= 0.99, || format!("detection {detection:.4} < 0.99"))?;

    let reference = qpsk_awgn_ber(10.0);
    let locked = c.locked_errors as f64 / c.locked_bits as f64;
    ensure(locked <= 3.0 * reference, || {
        format!("post-lock ber {locked:e} > 3 × {reference:e}")
    })?;

    // measured AWGN-only BER on the same payloads and noise seeds, reported
    let plain = ExperimentConfig {
        channel: awgn_only(10.0, 9),
        ..cfg.clone()
    };
    let p = count(&plain, &trials(&plain)?);
    Ok(format!(
        "{}/{} frames, post-lock ber {locked:.2e} = {:.2}× oracle {reference:.2e} ({} errors / {} bits; awgn-only run {} errors)",
        c.detected,
        c.sent,
        locked / reference,
        c.locked_errors,
        c.locked_bits,
        p.errors
    ))
}

fn strobe() -> Result<String, String> {
    let mut worst: f64 = 0.0;
    for cfg in [robust_cfg(), link_cfg(60, 8, 20, awgn_only(6.0, 4))] {
        let c = count(&cfg, &trials(&cfg)?);
        worst = worst.max(c.strobe_dev);
    }
    ensure(worst <= 0.01, || format!("|duty − 0.5| reached {worst:e}"))?;
    Ok(format!("worst 1000-symbol window |duty − 0.5| = {worst:.1e}"))
}

fn emg() -> Result<String, String> {
    let mut cfg = ExperimentConfig::default();
    cfg.emg.command_set = CommandSet::Basic;
    cfg.emg.test_per_class = 500;
    let db = train_database(&cfg).map_err(|e| e.to_string())?;
    let eval = evaluate_classifier(&cfg, &db).map_err(|e| e.to_string())?;
    ensure(eval.windows == 1500, || format!("{} held-out windows", eval.windows))?;
    ensure(eval.accuracy >= 0.95, || format!("accuracy {:.4} < 0.95", eval.accuracy))?;

    // scale invariance: same decision for every positive scale
    let sc = &cfg.emg;
    let band = (sc.band_hz[0], sc.band_hz[1]);
    let raw = generate_corpus(&SynthProfile::default(), sc.command_set.commands(), 40, sc.window_len, sc.sample_rate_hz, 77)
        .map_err(|e| e.to_string())?;
    let mut r = rng(5);
    let mut feat_dev: f64 = 0.0;
    for w in &raw {
        let f0 = extract_features(&preprocess(w, sc.gain, band).unwrap(), sc.n_coeffs).unwrap();
        let d0 = classify(&f0, &db).unwrap();
        for c in [1e-6, 0.37, 3.0, 1e6, 10f64.powf(r.random_range(-4.0..4.0))] {
            let f = extract_features(&preprocess(&w.scaled(c), sc.gain, band).unwrap(), sc.n_coeffs).unwrap();
            let d = classify(&f, &db).unwrap();
            ensure(d.command == d0.command, || format!("scale {c} changed {:?} to {:?}", d0.command, d.command))?;
            feat_dev = f.iter().zip(&f0).map(|(a, b)| (a - b).abs()).fold(feat_dev, f64::max);
        }
    }
    ensure(feat_dev <= 1e-12, || format!("feature deviation under scaling {feat_dev:e}"))?;

    // fall_monitor: strict threshold and monotone in |tilt|
    for _ in 0..10_000 {
        let thr = r.random_range(0.1..60.0);
        let t1: f64 = r.random_range(-90.0..90.0);
        let t2: f64 = if r.random_bool(0.1) { thr } else { r.random_range(-90.0..90.0) };
        let act = |t: f64| fall_monitor(&SafetyState::new(t, thr, 0.0, 0.0).unwrap());
        let (a1, a2) = (act(t1), act(t2));
        ensure((a1 == FallAction::Decelerate) == (t1.abs() > thr), || format!("tilt {t1}, threshold {thr}"))?;
        ensure((a2 == FallAction::Decelerate) == (t2.abs() > thr), || format!("tilt {t2}, threshold {thr}"))?;
        if a1 == FallAction::Decelerate && t2.abs() > t1.abs() {
            ensure(a2 == FallAction::Decelerate, || format!("not monotone at {t1} → {t2}"))?;
        }
    }

    // valid gating: bits never asserted while valid is low
    let pre = preamble_symbols::<f64>();
    for case in 0..10_000 {
        let payload = r.random_range(1..64);
        let n = r.random_range(0..400);
        let noise = r.random_range(0.0..1.5);
        let mut sym: Vec<Complex<f64>> = crandn(&mut r, n).into_iter().map(|v| v * noise).collect();
        let rot = Complex::new(0.0, 1.0).powu(r.random_range(0..4));
        let mut at = r.random_range(0..50);
        while at + pre.len() + payload <= sym.len() {
            for (k, p) in pre.iter().enumerate() {
                sym[at + k] += p * rot;
            }
            at += pre.len() + payload + r.random_range(0..30);
        }
        let out = frame_sync_decode(&sym, &pre, payload, 0.6).map_err(|e| e.to_string())?;
        ensure(out.valid.len() == out.bit1.len() && out.valid.len() == out.bit2.len(), || {
            format!("case {case}: stream lengths differ")
        })?;
        let leak = out.valid.iter().zip(out.bit1.iter().zip(&out.bit2)).any(|(&v, (&b1, &b2))| !v && (b1 || b2));
        ensure(!leak, || format!("case {case}: bit asserted while valid is low"))?;
    }
    Ok(format!(
        "accuracy {:.4} on {} windows; scale deviation {feat_dev:.1e}; 10k fall and 10k gating cases hold",
        eval.accuracy, eval.windows
    ))
}

const DETERMINISM_CONFIG: &str = r#"
seed = 4242
trials = 3
frames_per_trial = 6

[tx]
payload_bits = 512

[channel]
ebn0_db = 5.0
cfo_hz = 800.0
phase_offset_rad = 0.4
drift_ppm = 10.0

[sweep]
points_db = [0.0, 3.0, 6.0]

[emg]
train_per_class = 40
test_per_class = 40
demo_windows = 30
"#;

fn run_cli(dir: &Path, threads: usize, args: &[&str]) -> Result<(), String> {
    let out = Proc::new(env!("CARGO_BIN_EXE_emglink"))
        .arg("--config")
        .arg(dir.join("cfg.toml"))
        .arg("--output-dir")
        .arg(dir.join("out"))
        .arg("--threads")
        .arg(threads.to_string())
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || {
        format!("{args:?} exited {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr))
    })
}

/// File contents with host-dependent fields removed.
fn numeric_content(path: &Path) -> Result<String, String> {
    let s = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    if path.extension().is_some_and(|e| e == "json") {
        let mut v: serde_json::Value = serde_json::from_str(&s).map_err(|e| e.to_string())?;
        if let Some(o) = v.as_object_mut() {
            o.remove("wall_clock_s");
        }
        return Ok(v.to_string());
    }
    Ok(s)
}

fn determinism() -> Result<String, String> {
    let verbs: [&[&str]; 5] = [&["link"], &["sweep"], &["qos"], &["emg"], &["validate-config", "--print"]];
    let runs: Vec<tempfile::TempDir> = (0..2).map(|_| tempfile::tempdir().unwrap()).collect();
    for (i, d) in runs.iter().enumerate() {
        std::fs::write(d.path().join("cfg.toml"), DETERMINISM_CONFIG).map_err(|e| e.to_string())?;
        // different worker counts must not change results
        for v in verbs {
            run_cli(d.path(), 1 + 3 * i, v)?;
        }
    }
    let mut names: Vec<_> = std::fs::read_dir(runs[0].path().join("out"))
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    ensure(names.len() >= 9, || format!("only {} artifacts: {names:?}", names.len()))?;
    for n in &names {
        let a = numeric_content(&runs[0].path().join("out").join(n))?;
        let b = numeric_content(&runs[1].path().join("out").join(n))?;
        ensure(a == b, || format!("{} differs between runs", n.to_string_lossy()))?;
    }
    Ok(format!("{} artifacts identical across runs with 1 and 4 workers", names.len()))
}
