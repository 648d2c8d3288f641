//! `emglink`: run link simulations, Eb/N0 sweeps, cavity Q sweeps and the
//! EMG command demo from one TOML configuration.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 configuration error,
//! 3 a requested check failed.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use emglink::harness::{
    blocks_csv, evaluate_classifier, meta_line, qos_csv, qos_sweep, resolve_database, run_emg_demo, run_link_blocks,
    sweep_ebn0, BlockRecord, ExperimentConfig, LinkReport, QOS_SCHEMA,
};

const EXIT_RUNTIME: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_CHECK: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "emglink", version, about = "Deterministic EMG-to-actuator link simulator")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Args, Debug)]
struct Common {
    /// TOML configuration; built-in defaults when omitted.
    #[arg(short, long, global = true)]
    config: Option<PathBuf>,
    /// Override `seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override `output_dir`.
    #[arg(short, long, global = true)]
    output_dir: Option<PathBuf>,
    /// Worker threads for Monte Carlo trials [default: all cores]. Results
    /// do not depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Verb {
    /// TX → channel → RX Monte Carlo at the configured Eb/N0, with a
    /// per-frame BER/EVM table.
    Link(LinkArgs),
    /// One link run per Eb/N0 point, with Wilson intervals.
    Sweep(SweepArgs),
    /// Cavity Q factors over every geometry and mode.
    Qos(QosArgs),
    /// Classify synthetic EMG and carry each decision over the link.
    Emg(EmgArgs),
    /// Parse and validate the configuration, then print its hash.
    ValidateConfig(ValidateArgs),
}

#[derive(Args, Debug)]
struct LinkArgs {
    /// Override `channel.ebn0_db`.
    #[arg(long)]
    ebn0_db: Option<f64>,
    /// Override `trials`.
    #[arg(long)]
    trials: Option<usize>,
    /// Override `frames_per_trial`.
    #[arg(long)]
    frames: Option<usize>,
    /// Fail (exit 3) when BER exceeds this.
    #[arg(long)]
    max_ber: Option<f64>,
    /// Fail (exit 3) when the detected fraction of frames is below this.
    #[arg(long)]
    min_detection: Option<f64>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Comma-separated Eb/N0 points in dB; overrides `sweep.points_db`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    points: Option<Vec<f64>>,
    /// Override `trials`.
    #[arg(long)]
    trials: Option<usize>,
    /// Fail (exit 3) unless BER is non-increasing within its 95% intervals.
    #[arg(long)]
    check_monotone: bool,
}

#[derive(Args, Debug)]
struct QosArgs {
    /// Fail (exit 3) when closed form and quadrature differ by more than
    /// this relative amount, or a row breaks Q_total ≤ min(Q_tx, Q_rx).
    #[arg(long)]
    max_oracle_err: Option<f64>,
}

#[derive(Args, Debug)]
struct EmgArgs {
    /// Fail (exit 3) when held-out classifier accuracy is below this.
    #[arg(long)]
    min_accuracy: Option<f64>,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    /// Also print the fully resolved configuration as TOML.
    #[arg(long)]
    print: bool,
}

/// A requested check failed; the run itself completed.
#[derive(Debug)]
struct CheckFailed(String);

impl std::fmt::Display for CheckFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "check failed: {}", self.0)
    }
}

impl std::error::Error for CheckFailed {}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("emglink: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<CheckFailed>().is_some() {
        return EXIT_CHECK;
    }
    match e.downcast_ref::<emglink::Error>() {
        Some(emglink::Error::Config(_)) => EXIT_CONFIG,
        _ => EXIT_RUNTIME,
    }
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.common.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("starting worker pool")?;
    }
    let mut cfg = match &cli.common.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = cli.common.seed {
        cfg.seed = s;
    }
    if let Some(d) = &cli.common.output_dir {
        cfg.output_dir = d.clone();
    }
    match cli.verb {
        Verb::Link(a) => link(cfg, a),
        Verb::Sweep(a) => sweep(cfg, a),
        Verb::Qos(a) => qos(cfg, a),
        Verb::Emg(a) => emg(cfg, a),
        Verb::ValidateConfig(a) => validate(cfg, a),
    }
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn to_json(v: &impl serde::Serialize) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(CheckFailed(msg()).into())
    }
}

fn link(mut cfg: ExperimentConfig, a: LinkArgs) -> Result<()> {
    if let Some(v) = a.ebn0_db {
        cfg.channel.ebn0_db = v;
    }
    if let Some(v) = a.trials {
        cfg.trials = v;
    }
    if let Some(v) = a.frames {
        cfg.frames_per_trial = v;
    }
    cfg.validate()?;
    let (r, blocks) = run_link_blocks(&cfg)?;
    let csv = format!(
        "{}\n{}\n{}\n",
        meta_line(LinkReport::CSV_SCHEMA, &cfg),
        LinkReport::CSV_HEADER,
        r.csv_row()
    );
    write(&cfg.output_dir, "link.csv", &csv)?;
    write(
        &cfg.output_dir,
        "link_blocks.csv",
        &blocks_csv(&blocks, &meta_line(BlockRecord::CSV_SCHEMA, &cfg)),
    )?;
    write(&cfg.output_dir, "link.json", &to_json(&r)?)?;
    println!(
        "Eb/N0 {} dB: ber {:e} (awgn {:e}), fer {:e}, frames {}/{} detected, {:.2} s",
        r.ebn0_db, r.ber, r.awgn_reference_ber, r.fer, r.frames_detected, r.frames_sent, r.wall_clock_s
    );
    if let Some(max) = a.max_ber {
        check(r.ber <= max, || format!("ber {:e} > {max:e}", r.ber))?;
    }
    if let Some(min) = a.min_detection {
        let frac = r.frames_detected as f64 / r.frames_sent.max(1) as f64;
        check(frac >= min, || format!("detected fraction {frac} < {min}"))?;
    }
    Ok(())
}

fn sweep(mut cfg: ExperimentConfig, a: SweepArgs) -> Result<()> {
    if let Some(p) = a.points {
        cfg.sweep.points_db = p;
    }
    if let Some(v) = a.trials {
        cfg.trials = v;
    }
    cfg.validate()?;
    let t = sweep_ebn0(&cfg, &cfg.sweep.points_db)?;
    write(&cfg.output_dir, "sweep.csv", &t.to_csv()?)?;
    write(&cfg.output_dir, "sweep.json", &to_json(&t)?)?;
    for r in &t.rows {
        println!(
            "{:>6} dB  ber {:e} [{:e}, {:e}]  awgn {:e}{}",
            r.ebn0_db,
            r.ber,
            r.ber_ci_low,
            r.ber_ci_high,
            r.awgn_reference_ber,
            if r.monotone_ok { "" } else { "  NOT MONOTONE" }
        );
    }
    if a.check_monotone {
        check(t.monotone(), || "BER increases beyond its confidence interval".into())?;
    }
    Ok(())
}

fn qos(cfg: ExperimentConfig, a: QosArgs) -> Result<()> {
    let rows = qos_sweep(&cfg.cavity)?;
    write(&cfg.output_dir, "qos.csv", &qos_csv(&rows, &meta_line(QOS_SCHEMA, &cfg)))?;
    let doc = json!({
        "schema": QOS_SCHEMA,
        "config_hash": cfg.hash(),
        "seed": cfg.seed,
        "rows": rows,
    });
    write(&cfg.output_dir, "qos.json", &to_json(&doc)?)?;
    let worst = rows.iter().map(|r| r.oracle_rel_err).fold(0.0, f64::max);
    println!("{} cells, worst closed-form vs quadrature error {worst:e}", rows.len());
    if let Some(max) = a.max_oracle_err {
        check(worst <= max, || format!("oracle error {worst:e} > {max:e}"))?;
        check(rows.iter().all(|r| r.bound_ok), || "Q_total exceeds min(Q_tx, Q_rx)".into())?;
    }
    Ok(())
}

fn emg(cfg: ExperimentConfig, a: EmgArgs) -> Result<()> {
    let db = resolve_database(&cfg)?;
    let eval = evaluate_classifier(&cfg, &db)?;
    let report = run_emg_demo(&cfg, &db)?;
    if cfg.emg.train_in_run {
        write(&cfg.output_dir, "emg_database.json", &(db.to_json()? + "\n"))?;
    }
    write(&cfg.output_dir, "emg_demo.csv", &report.to_csv())?;
    let doc = json!({
        "schema": emglink::harness::EMG_SCHEMA,
        "config_hash": report.config_hash,
        "seed": report.seed,
        "classifier": eval,
        "classifier_accuracy_demo": report.classifier_accuracy,
        "link_accuracy_demo": report.link_accuracy,
        "payload_bits": report.payload_bits,
        "payload_bit_errors": report.payload_bit_errors,
        "frames_lost": report.frames_lost,
        "decelerate_windows": report.decelerate_windows,
    });
    write(&cfg.output_dir, "emg.json", &to_json(&doc)?)?;
    println!(
        "held-out accuracy {:.4} over {} windows; demo link accuracy {:.4}; decelerate at {:?}",
        eval.accuracy, eval.windows, report.link_accuracy, report.decelerate_windows
    );
    if let Some(min) = a.min_accuracy {
        check(eval.accuracy >= min, || format!("accuracy {} < {min}", eval.accuracy))?;
    }
    Ok(())
}

fn validate(cfg: ExperimentConfig, a: ValidateArgs) -> Result<()> {
    cfg.validate()?;
    println!("ok config_hash={} seed={}", cfg.hash(), cfg.seed);
    if a.print {
        print!("{}", cfg.to_toml()?);
    }
    Ok(())
}
