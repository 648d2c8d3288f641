//! EMG command demo: classify a synthetic command sequence, carry each
//! decision over the simulated link, and drive the safety loop with what
//! arrives.

use serde::{Deserialize, Serialize};

use super::config::{EmgScenario, ExperimentConfig};
use super::link::run_burst;
use crate::emg::{
    angle_feedback_correct, classify, extract_features, fall_monitor, generate_corpus, preprocess, train_templates,
    Command, CommandDatabase, CommandDecision, EmgWindow, FallAction, SafetyState, SynthProfile,
};
use crate::error::{config_err, Error, Result};
use crate::seed::derive_seed;
use crate::tx::{generate_frame, FramePayload, HEADER_BITS};

pub const EMG_SCHEMA: &str = "emglink.emg.v1";
/// Bits of the decision code at the head of each payload.
pub const CODE_BITS: usize = 8;
const CODE_NONE: u8 = 0xFF;

const STREAM_TRAIN: u64 = 10;
const STREAM_TEST: u64 = 11;
const STREAM_DEMO: u64 = 12;

/// Joint target commanded by each posture, degrees.
pub fn posture_target_deg(c: Command) -> f64 {
    match c {
        Command::Sit => 90.0,
        Command::Stand => 0.0,
        Command::Sleep => 10.0,
        Command::RollUp => 45.0,
        Command::RollDown => -45.0,
    }
}

pub fn encode_decision(c: Option<Command>) -> [bool; CODE_BITS] {
    let code = c.map_or(CODE_NONE, |c| c.index() as u8);
    std::array::from_fn(|i| (code >> (CODE_BITS - 1 - i)) & 1 == 1)
}

/// What the receiving side made of a decision.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkDecision {
    Command(Command),
    None,
    /// Frame missed or code unreadable.
    Lost,
}

impl LinkDecision {
    pub fn label(&self) -> &'static str {
        match self {
            LinkDecision::Command(c) => c.name(),
            LinkDecision::None => "none",
            LinkDecision::Lost => "lost",
        }
    }

    pub fn command(&self) -> Option<Command> {
        match self {
            LinkDecision::Command(c) => Some(*c),
            _ => None,
        }
    }
}

pub fn decode_decision(bits: &[bool]) -> LinkDecision {
    if bits.len() < CODE_BITS {
        return LinkDecision::Lost;
    }
    let code = bits[..CODE_BITS].iter().fold(0u8, |acc, &b| (acc << 1) | u8::from(b));
    match code {
        CODE_NONE => LinkDecision::None,
        c => Command::from_index(c as usize).map_or(LinkDecision::Lost, LinkDecision::Command),
    }
}

fn prepared(sc: &EmgScenario, per_class: usize, seed: u64) -> Result<Vec<EmgWindow<f64>>> {
    generate_corpus(
        &SynthProfile::default(),
        sc.command_set.commands(),
        per_class,
        sc.window_len,
        sc.sample_rate_hz,
        seed,
    )?
    .iter()
    .map(|w| preprocess(w, sc.gain, (sc.band_hz[0], sc.band_hz[1])))
    .collect()
}

/// Trains on the scenario's training corpus.
pub fn train_database(cfg: &ExperimentConfig) -> Result<CommandDatabase<f64>> {
    let sc = &cfg.emg;
    train_templates(
        &prepared(sc, sc.train_per_class, derive_seed(cfg.seed, STREAM_TRAIN))?,
        sc.n_coeffs,
    )
}

/// The database the demo uses: trained now, or loaded from `emg.database`.
pub fn resolve_database(cfg: &ExperimentConfig) -> Result<CommandDatabase<f64>> {
    if cfg.emg.train_in_run {
        return train_database(cfg);
    }
    let path = cfg.emg.database.as_ref().ok_or_else(|| {
        Error::Training("no trained command database: set emg.train_in_run = true or emg.database".into())
    })?;
    let db = CommandDatabase::from_json(&std::fs::read_to_string(path)?)?;
    if db.feature_dim != cfg.emg.n_coeffs {
        return Err(config_err(format!(
            "emg.n_coeffs is {} but the database has feature_dim {}",
            cfg.emg.n_coeffs, db.feature_dim
        )));
    }
    Ok(db)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifierEval {
    pub windows: usize,
    pub correct: usize,
    pub rejected: usize,
    pub accuracy: f64,
}

/// Held-out accuracy on `test_per_class` fresh windows per command.
pub fn evaluate_classifier(cfg: &ExperimentConfig, db: &CommandDatabase<f64>) -> Result<ClassifierEval> {
    let sc = &cfg.emg;
    let test = prepared(sc, sc.test_per_class, derive_seed(cfg.seed, STREAM_TEST))?;
    let mut correct = 0;
    let mut rejected = 0;
    for w in &test {
        let d = classify(&extract_features(w, sc.n_coeffs)?, db)?;
        correct += usize::from(d.command == w.label);
        rejected += usize::from(d.command.is_none());
    }
    Ok(ClassifierEval {
        windows: test.len(),
        correct,
        rejected,
        accuracy: correct as f64 / test.len().max(1) as f64,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DemoRow {
    pub window: usize,
    pub true_label: Command,
    pub decision: CommandDecision<f64>,
    pub link_decision: LinkDecision,
    pub tilt_deg: f64,
    pub fall_action: FallAction,
    pub joint_target_deg: f64,
    pub joint_angle_deg: f64,
    pub correction_deg: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmgDemoReport {
    pub rows: Vec<DemoRow>,
    pub classifier_accuracy: f64,
    pub link_accuracy: f64,
    pub payload_bits: u64,
    pub payload_bit_errors: u64,
    pub frames_lost: usize,
    pub decelerate_windows: Vec<usize>,
    pub config_hash: String,
    pub seed: u64,
}

impl EmgDemoReport {
    pub const CSV_HEADER: &'static str = "window,true_label,decision,distance,confidence,link_decision,tilt_deg,fall_action,joint_target_deg,joint_angle_deg,correction_deg";

    pub fn to_csv(&self) -> String {
        let mut out = format!(
            "# schema={EMG_SCHEMA} config_hash={} seed={}\n{}\n",
            self.config_hash,
            self.seed,
            Self::CSV_HEADER
        );
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{:e},{:e},{},{:?},{},{:?},{:?},{:?}\n",
                r.window,
                r.true_label,
                r.decision.label(),
                r.decision.distance,
                r.decision.confidence,
                r.link_decision.label(),
                r.tilt_deg,
                if r.fall_action == FallAction::Decelerate { "decelerate" } else { "normal" },
                r.joint_target_deg,
                r.joint_angle_deg,
                r.correction_deg
            ));
        }
        out
    }
}

/// Body tilt seen by the accelerometer at window `i`: a small sway plus
/// the configured excursion.
fn tilt_at(sc: &EmgScenario, i: usize) -> f64 {
    if sc.tilt_excursion_window == Some(i) {
        return sc.tilt_excursion_deg;
    }
    3.0 * (std::f64::consts::TAU * i as f64 / 20.0).sin()
}

pub fn run_emg_demo(cfg: &ExperimentConfig, db: &CommandDatabase<f64>) -> Result<EmgDemoReport> {
    cfg.validate()?;
    cfg.require_link_mode()?;
    let sc = &cfg.emg;
    if cfg.tx.payload_bits < CODE_BITS {
        return Err(config_err(format!("tx.payload_bits must be at least {CODE_BITS} for the EMG demo")));
    }
    if db.feature_dim != sc.n_coeffs {
        return Err(config_err(format!(
            "emg.n_coeffs is {} but the database has feature_dim {}",
            sc.n_coeffs, db.feature_dim
        )));
    }
    let commands = sc.command_set.commands();
    let demo_seed = derive_seed(cfg.seed, STREAM_DEMO);
    let profile = SynthProfile::default();
    let duration = sc.window_len as f64 / sc.sample_rate_hz;

    let mut labels = Vec::with_capacity(sc.demo_windows);
    let mut decisions = Vec::with_capacity(sc.demo_windows);
    let mut frames = Vec::with_capacity(sc.demo_windows);
    for i in 0..sc.demo_windows {
        let label = commands[i % commands.len()];
        let raw = profile.synthesize(label, duration, sc.sample_rate_hz, derive_seed(demo_seed, i as u64))?;
        let w = preprocess(&raw, sc.gain, (sc.band_hz[0], sc.band_hz[1]))?;
        let d = classify(&extract_features(&w, sc.n_coeffs)?, db)?;
        let mut payload = generate_frame(demo_seed, i as u64, cfg.tx.payload_bits)?.payload_bits;
        payload[..CODE_BITS].copy_from_slice(&encode_decision(d.command));
        frames.push(FramePayload {
            header_bits: HEADER_BITS.to_vec(),
            payload_bits: payload,
            frame_index: i as u64,
        });
        labels.push(label);
        decisions.push(d);
    }

    let (_, _, link) = run_burst(cfg, 0, Some(frames))?;

    let mut rows = Vec::with_capacity(sc.demo_windows);
    let mut target = 0.0;
    let mut angle = 0.0;
    for (i, ((label, d), got)) in labels.iter().zip(&decisions).zip(&link.decoded).enumerate() {
        let ld = got.as_deref().map_or(LinkDecision::Lost, decode_decision);
        if let Some(c) = ld.command() {
            target = posture_target_deg(c);
        }
        let state = SafetyState::new(tilt_at(sc, i), sc.tilt_threshold_deg, angle, target)?;
        let fall = fall_monitor(&state);
        let correction = angle_feedback_correct(&state, sc.k_p);
        angle += correction;
        rows.push(DemoRow {
            window: i,
            true_label: *label,
            decision: *d,
            link_decision: ld,
            tilt_deg: state.tilt_deg,
            fall_action: fall,
            joint_target_deg: target,
            joint_angle_deg: angle,
            correction_deg: correction,
        });
    }
    let n = rows.len().max(1) as f64;
    Ok(EmgDemoReport {
        classifier_accuracy: rows.iter().filter(|r| r.decision.command == Some(r.true_label)).count() as f64 / n,
        link_accuracy: rows
            .iter()
            .filter(|r| r.link_decision == LinkDecision::Command(r.true_label))
            .count() as f64
            / n,
        payload_bits: link.bits,
        payload_bit_errors: link.bit_errors,
        frames_lost: link.frames_sent - link.frames_detected,
        decelerate_windows: rows
            .iter()
            .filter(|r| r.fall_action == FallAction::Decelerate)
            .map(|r| r.window)
            .collect(),
        rows,
        config_hash: cfg.hash(),
        seed: cfg.seed,
    })
}
