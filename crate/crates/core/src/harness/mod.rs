//! Experiment orchestration: configuration, link Monte Carlo, Eb/N0 and
//! cavity sweeps, and the EMG command demo. Every artifact carries the
//! configuration hash and seed; only `wall_clock_s` depends on the host.

mod config;
mod emg_demo;
mod link;
mod qos;
mod sweep;

pub use config::{CavityScenario, EmgScenario, ExperimentConfig, SweepConfig};
pub use emg_demo::{
    decode_decision, encode_decision, evaluate_classifier, posture_target_deg, resolve_database, run_emg_demo,
    train_database, ClassifierEval, DemoRow, EmgDemoReport, LinkDecision, CODE_BITS, EMG_SCHEMA,
};
pub use link::{
    aggregate, blocks_csv, decoded_payload, match_frames, payload_evm, qpsk_awgn_ber, run_burst, run_link, run_link_blocks,
    strobe_duty_worst_deviation, trial_seeds, tx_symbol_at, BlockRecord, LinkReport, LockFlags, TrialResult,
    MATCH_TOLERANCE_SYMBOLS,
};
pub use qos::{qos_cell, qos_csv, qos_sweep, QosRow, QOS_SCHEMA};
pub use sweep::{
    meta_line, parse_meta, sweep_ebn0, wilson_interval, ArtifactMeta, SweepRow, SweepTable, SWEEP_COLUMNS,
    SWEEP_SCHEMA,
};
