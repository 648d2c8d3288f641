//! EMG command pipeline: synthetic corpus, band-pass preprocessing, WHT
//! features, template training, nearest-template classification with a
//! reject class, and the two-level safety feedback (joint angle and tilt).

mod classifier;
mod corpus;
mod features;
mod preprocess;
mod safety;
mod synth;

pub use classifier::{classify, train_templates, CommandDatabase, CommandDecision, DB_VERSION, DEFAULT_MARGIN};
pub use corpus::{generate_corpus, read_corpus_csv, write_corpus_csv};
pub use features::extract_features;
pub use preprocess::{bandpass_taps, preprocess, DEFAULT_BAND_HZ, DEFAULT_FILTER_TAPS};
pub use safety::{angle_feedback_correct, angle_feedback_correct_limited, fall_monitor, FallAction, SafetyState, DEFAULT_CORRECTION_LIMIT_DEG};
pub use synth::{synthesize_emg, SynthProfile, GENERATOR_VERSION};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Commands in tie-break order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Sit,
    Stand,
    Sleep,
    RollUp,
    RollDown,
}

impl Command {
    pub const ALL: [Command; 5] = [Command::Sit, Command::Stand, Command::Sleep, Command::RollUp, Command::RollDown];
    /// The offline training set: sitting, standing, sleeping.
    pub const BASIC: [Command; 3] = [Command::Sit, Command::Stand, Command::Sleep];
    /// The hand-gesture evaluation set.
    pub const HAND: [Command; 2] = [Command::RollUp, Command::RollDown];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Command::Sit => "sit",
            Command::Stand => "stand",
            Command::Sleep => "sleep",
            Command::RollUp => "roll_up",
            Command::RollDown => "roll_down",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown command '{s}'")))
    }
}

impl std::fmt::Display for Command {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Named command sets.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CommandSet {
    #[default]
    Basic,
    Hand,
    All,
}

impl CommandSet {
    pub fn commands(self) -> &'static [Command] {
        match self {
            CommandSet::Basic => &Command::BASIC,
            CommandSet::Hand => &Command::HAND,
            CommandSet::All => &Command::ALL,
        }
    }
}

/// A window of real EMG samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmgWindow<T> {
    samples: Vec<T>,
    sample_rate_hz: T,
    pub label: Option<Command>,
}

impl<T: Real> EmgWindow<T> {
    pub fn new(samples: Vec<T>, sample_rate_hz: T, label: Option<Command>) -> Result<Self> {
        if !(sample_rate_hz > T::zero()) || !sample_rate_hz.is_finite() {
            return Err(Error::Config(format!("sample rate must be positive, got {sample_rate_hz}")));
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return Err(Error::Domain(format!("EMG sample {i} is not finite")));
        }
        Ok(Self {
            samples,
            sample_rate_hz,
            label,
        })
    }

    pub fn samples(&self) -> &[T] {
        &self.samples
    }

    pub fn sample_rate_hz(&self) -> T {
        self.sample_rate_hz
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Copy scaled by `c`.
    pub fn scaled(&self, c: T) -> Self {
        Self {
            samples: self.samples.iter().map(|&v| v * c).collect(),
            sample_rate_hz: self.sample_rate_hz,
            label: self.label,
        }
    }

    /// Splits into consecutive non-overlapping windows of `len` samples
    /// (a power of two), dropping the remainder.
    pub fn frames(&self, len: usize) -> Result<Vec<Self>> {
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::Config(format!("frame length must be a power of two, got {len}")));
        }
        Ok(self
            .samples
            .chunks_exact(len)
            .map(|c| Self {
                samples: c.to_vec(),
                sample_rate_hz: self.sample_rate_hz,
                label: self.label,
            })
            .collect())
    }
}
