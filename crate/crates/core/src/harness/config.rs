use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cavity::{CavitySpec, ModeIndices};
use crate::channel::ChannelConfig;
use crate::emg::CommandSet;
use crate::error::{config_err, Error, Result};
use crate::rx::RxConfig;
use crate::tx::{TxConfig, TxMode};

/// Complete description of a run. Loaded from TOML; every field has a
/// default, unknown keys are rejected, and [`ExperimentConfig::validate`]
/// reports problems by dotted field path.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Root of every derived seed.
    pub seed: u64,
    /// Independent bursts; they run in parallel.
    pub trials: usize,
    pub frames_per_trial: usize,
    /// Random symbols ahead of the first frame, for loop acquisition.
    pub lead_in_symbols: usize,
    pub tail_symbols: usize,
    pub output_dir: PathBuf,
    pub tx: TxConfig<f64>,
    pub channel: ChannelConfig<f64>,
    pub rx: RxConfig<f64>,
    pub sweep: SweepConfig,
    pub emg: EmgScenario,
    pub cavity: CavityScenario,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            trials: 10,
            frames_per_trial: 50,
            lead_in_symbols: 256,
            tail_symbols: 64,
            output_dir: PathBuf::from("out"),
            tx: TxConfig::default(),
            channel: ChannelConfig::default(),
            rx: RxConfig::default(),
            sweep: SweepConfig::default(),
            emg: EmgScenario::default(),
            cavity: CavityScenario::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub points_db: Vec<f64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            points_db: vec![0.0, 4.0, 8.0, 12.0],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmgScenario {
    pub command_set: CommandSet,
    pub sample_rate_hz: f64,
    /// Samples per analysis window; a power of two.
    pub window_len: usize,
    pub n_coeffs: usize,
    pub gain: f64,
    pub band_hz: [f64; 2],
    pub train_per_class: usize,
    pub test_per_class: usize,
    /// Train a database at the start of the demo. When false, `database`
    /// must name a JSON database.
    pub train_in_run: bool,
    pub database: Option<PathBuf>,
    pub demo_windows: usize,
    pub tilt_threshold_deg: f64,
    /// Window at which a tilt excursion is injected, if any.
    pub tilt_excursion_window: Option<usize>,
    pub tilt_excursion_deg: f64,
    pub k_p: f64,
}

impl Default for EmgScenario {
    fn default() -> Self {
        Self {
            command_set: CommandSet::Basic,
            sample_rate_hz: 1000.0,
            window_len: 256,
            n_coeffs: 128,
            gain: 1000.0,
            band_hz: [20.0, 450.0],
            train_per_class: 200,
            test_per_class: 500,
            train_in_run: true,
            database: None,
            demo_windows: 60,
            tilt_threshold_deg: 15.0,
            tilt_excursion_window: Some(30),
            tilt_excursion_deg: 25.0,
            k_p: 0.5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CavityScenario {
    pub specs: Vec<CavitySpec<f64>>,
    /// `[m, n, l]` triples; TE10l and TE01l have closed-form Q.
    pub modes: Vec<[u32; 3]>,
    /// Field amplitude E₀ in V/m.
    pub e0: f64,
    /// Midpoint-rule points per axis for the wall-loss oracle.
    pub quadrature_points: usize,
}

impl Default for CavityScenario {
    fn default() -> Self {
        let base = |a, c, b, rs| CavitySpec {
            rs,
            ..CavitySpec::vacuum(a, c, b)
        };
        Self {
            specs: vec![
                base(0.1, 0.1, 0.1, 0.026),
                base(0.1, 0.05, 0.2, 0.01),
                base(0.02286, 0.01016, 0.05, 0.05),
                CavitySpec {
                    eps_r: 2.1,
                    tan_delta: 4e-4,
                    ..base(0.03, 0.015, 0.04, 0.02)
                },
            ],
            modes: vec![[1, 0, 1], [1, 0, 2], [1, 0, 3]],
            e0: 100.0,
            quadrature_points: 256,
        }
    }
}

impl CavityScenario {
    pub fn mode_indices(&self) -> Result<Vec<ModeIndices>> {
        self.modes
            .iter()
            .enumerate()
            .map(|(i, &[m, n, l])| ModeIndices::new(m, n, l).map_err(|e| at(&format!("cavity.modes[{i}]"), e)))
            .collect()
    }
}

fn at(path: &str, e: Error) -> Error {
    match e {
        Error::Config(m) if m.starts_with(path) => Error::Config(m),
        Error::Config(m) => Error::Config(format!("{path}: {m}")),
        other => other,
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let de = toml::Deserializer::parse(s).map_err(|e| config_err(format!("TOML syntax: {e}")))?;
        let cfg: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            config_err(format!("{path}: {}", e.into_inner().message()))
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path)
            .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&s)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Format(e.to_string()))
    }

    /// Checks every section; errors name the offending field path.
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(config_err("trials must be positive"));
        }
        if self.frames_per_trial == 0 {
            return Err(config_err("frames_per_trial must be positive"));
        }
        self.tx.validate().map_err(|e| at("tx", e))?;
        self.channel.validate().map_err(|e| at("channel", e))?;
        self.rx.validate().map_err(|e| at("rx", e))?;
        if self.sweep.points_db.iter().any(|p| !p.is_finite()) {
            return Err(config_err("sweep.points_db must be finite"));
        }
        let e = &self.emg;
        if !(e.sample_rate_hz > 0.0) {
            return Err(config_err("emg.sample_rate_hz must be positive"));
        }
        if e.window_len < 2 || !e.window_len.is_power_of_two() {
            return Err(config_err(format!("emg.window_len must be a power of two, got {}", e.window_len)));
        }
        if e.n_coeffs == 0 || e.n_coeffs > e.window_len {
            return Err(config_err(format!("emg.n_coeffs must lie in 1..={}, got {}", e.window_len, e.n_coeffs)));
        }
        if !(e.gain > 0.0) {
            return Err(config_err("emg.gain must be positive"));
        }
        let [lo, hi] = e.band_hz;
        if !(lo > 0.0 && lo < hi && hi < e.sample_rate_hz / 2.0) {
            return Err(config_err(format!(
                "emg.band_hz must satisfy 0 < lo < hi < sample_rate_hz/2, got [{lo}, {hi}]"
            )));
        }
        if e.train_in_run && e.train_per_class < 2 {
            return Err(config_err("emg.train_per_class must be at least 2"));
        }
        if !(e.tilt_threshold_deg > 0.0) {
            return Err(config_err("emg.tilt_threshold_deg must be positive"));
        }
        if !(e.k_p > 0.0) {
            return Err(config_err("emg.k_p must be positive"));
        }
        for (i, s) in self.cavity.specs.iter().enumerate() {
            s.validate().map_err(|e| at(&format!("cavity.specs[{i}]"), e))?;
        }
        self.cavity.mode_indices()?;
        if self.cavity.quadrature_points < 2 {
            return Err(config_err("cavity.quadrature_points must be at least 2"));
        }
        if !(self.cavity.e0 > 0.0) {
            return Err(config_err("cavity.e0 must be positive"));
        }
        Ok(())
    }

    /// Checks that the link simulation can run this configuration.
    pub fn require_link_mode(&self) -> Result<()> {
        if self.tx.mode != TxMode::SingleCarrier {
            return Err(config_err(
                "tx.mode: the synchronizing receiver is single-carrier; cp_ofdm has a clean round-trip path only",
            ));
        }
        Ok(())
    }

    /// First 16 hex digits of SHA-256 over the canonical JSON form.
    /// `output_dir` is left out: it does not affect any result.
    pub fn hash(&self) -> String {
        let canon = serde_json::to_vec(&Self {
            output_dir: PathBuf::new(),
            ..self.clone()
        })
        .expect("config serializes");
        hex::encode(Sha256::digest(&canon))[..16].to_string()
    }
}
