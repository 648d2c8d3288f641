//! Link Monte Carlo: TX burst → channel → RX per trial, with transmitted
//! and detected frames matched by timing.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::channel::{apply_channel, ChannelConfig};
use crate::error::Result;
use crate::rx::{Receiver, RxOutput};
use crate::seed::derive_seed;
use crate::tx::{Burst, FramePayload, Transmitter, BITS_PER_SYMBOL, HEADER_LEN};
use crate::Complex;

/// Largest timing disagreement, in symbols, for a detection to count as a
/// given transmitted frame.
pub const MATCH_TOLERANCE_SYMBOLS: f64 = 2.0;

/// Stream labels under the experiment seed.
const STREAM_TX: u64 = 0;
const STREAM_NOISE: u64 = 1;

/// Aggregated link metrics. Only `wall_clock_s` depends on the host.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinkReport {
    pub ebn0_db: f64,
    pub frames_sent: usize,
    /// Detections matched to a transmitted frame.
    pub frames_detected: usize,
    /// Detections that match no transmitted frame.
    pub spurious_frames: usize,
    pub frames_in_error: usize,
    pub bits: u64,
    pub bit_errors: u64,
    pub ber: f64,
    pub fer: f64,
    /// `0.5·erfc(√(Eb/N0))`.
    pub awgn_reference_ber: f64,
    /// Power mean of the per-frame payload EVM over detected frames.
    pub evm_rms: Option<f64>,
    /// Mean over trials of the carrier PLL's final frequency, Hz.
    pub residual_cfo_hz: f64,
    /// Mean coarse estimate over trials that produced one, Hz.
    pub cfc_estimate_hz: Option<f64>,
    pub lock: LockFlags,
    /// Largest |duty − 0.5| over any steady-state 1000-symbol window.
    pub strobe_duty_worst_deviation: f64,
    pub config_hash: String,
    pub seed: u64,
    pub wall_clock_s: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LockFlags {
    pub timing_locked_trials: usize,
    pub timing_lock_lost_trials: usize,
    pub carrier_locked_trials: usize,
    pub trials: usize,
}

impl LinkReport {
    pub const CSV_SCHEMA: &'static str = "emglink.link.v1";
    pub const CSV_HEADER: &'static str = "ebn0_db,frames_sent,frames_detected,spurious_frames,frames_in_error,bits,bit_errors,ber,fer,awgn_reference_ber,evm_rms,residual_cfo_hz,cfc_estimate_hz,timing_locked_trials,carrier_locked_trials,strobe_duty_worst_deviation";

    pub fn csv_row(&self) -> String {
        format!(
            "{:?},{},{},{},{},{},{},{:e},{:e},{:e},{},{:e},{},{},{},{:e}",
            self.ebn0_db,
            self.frames_sent,
            self.frames_detected,
            self.spurious_frames,
            self.frames_in_error,
            self.bits,
            self.bit_errors,
            self.ber,
            self.fer,
            self.awgn_reference_ber,
            opt(self.evm_rms),
            self.residual_cfo_hz,
            opt(self.cfc_estimate_hz),
            self.lock.timing_locked_trials,
            self.lock.carrier_locked_trials,
            self.strobe_duty_worst_deviation
        )
    }

    /// The report with the host-dependent field cleared, for comparisons.
    pub fn without_timing(&self) -> Self {
        Self {
            wall_clock_s: 0.0,
            ..self.clone()
        }
    }
}

fn opt(v: Option<f64>) -> String {
    v.map_or("nan".to_string(), |v| format!("{v:e}"))
}

/// One transmitted frame's outcome: the per-block BER/FER/EVM record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockRecord {
    pub trial: usize,
    pub frame: usize,
    pub detected: bool,
    pub bits: u64,
    pub bit_errors: u64,
    /// Payload EVM relative to the RMS constellation amplitude, after
    /// scaling the received payload to the transmitted power.
    pub evm_rms: Option<f64>,
}

impl BlockRecord {
    pub const CSV_SCHEMA: &'static str = "emglink.blocks.v1";
    pub const CSV_HEADER: &'static str = "trial,frame,detected,bits,bit_errors,evm_rms";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.trial,
            self.frame,
            self.detected,
            self.bits,
            self.bit_errors,
            opt(self.evm_rms)
        )
    }
}

/// Meta line, header and one row per block.
pub fn blocks_csv(blocks: &[BlockRecord], meta: &str) -> String {
    let mut out = format!("{meta}\n{}\n", BlockRecord::CSV_HEADER);
    for b in blocks {
        out.push_str(&b.csv_row());
        out.push('\n');
    }
    out
}

/// Data-aided EVM of detection `di` against the transmitted payload
/// symbols, with the ambiguity rotation undone. `None` for an empty payload.
pub fn payload_evm(rx: &RxOutput<f64>, di: usize, ideal: &[Complex<f64>]) -> Option<f64> {
    let f = &rx.frames[di];
    let n = f.payload_len.min(ideal.len());
    if n == 0 {
        return None;
    }
    let derot = Complex::new(0.0, -1.0).powu(u32::from(f.quadrant));
    let got: Vec<Complex<f64>> = rx.symbols[f.payload_start..f.payload_start + n]
        .iter()
        .map(|&v| v * derot)
        .collect();
    let p_ref = ideal[..n].iter().map(|v| v.norm_sqr()).sum::<f64>() / n as f64;
    let p_got = got.iter().map(|v| v.norm_sqr()).sum::<f64>() / n as f64;
    if !(p_got > 0.0) {
        return None;
    }
    let g = (p_ref / p_got).sqrt();
    let err = got.iter().zip(ideal).map(|(r, s)| (r * g - s).norm_sqr()).sum::<f64>() / n as f64;
    Some((err / p_ref).sqrt())
}

/// `0.5·erfc(√(Eb/N0))`, the Gray-QPSK bit error probability on AWGN.
pub fn qpsk_awgn_ber(ebn0_db: f64) -> f64 {
    0.5 * libm::erfc(10f64.powf(ebn0_db / 10.0).sqrt())
}

/// Per-trial raw counts, merged in trial order.
#[derive(Clone, Debug, Default)]
pub struct TrialResult {
    pub frames_sent: usize,
    pub frames_detected: usize,
    pub spurious_frames: usize,
    pub frames_in_error: usize,
    pub bits: u64,
    pub bit_errors: u64,
    pub residual_cfo_hz: f64,
    pub cfc_estimate_hz: Option<f64>,
    pub timing_locked: bool,
    pub timing_lock_lost: bool,
    pub carrier_locked: bool,
    pub strobe_duty_worst_deviation: f64,
    /// Decoded payload per transmitted frame, `None` if not detected.
    pub decoded: Vec<Option<Vec<bool>>>,
    pub blocks: Vec<BlockRecord>,
}

/// Seeds for trial `t`: the TX payload stream and the channel noise.
pub fn trial_seeds(cfg: &ExperimentConfig, trial: usize) -> (u64, u64) {
    let tx = derive_seed(derive_seed(cfg.seed, STREAM_TX), trial as u64);
    let noise = derive_seed(derive_seed(cfg.seed ^ cfg.channel.seed, STREAM_NOISE), trial as u64);
    (tx, noise)
}

/// Transmitted symbol index of a detection at matched-filter sample time
/// `t`. Symbol `k` leaves the TX filter at sample `D + sps·k`, the channel
/// maps input time `(n − delay)·r` to output sample `n`, and the matched
/// filter adds another `D`.
pub fn tx_symbol_at(t: f64, filter_delay: f64, sps: usize, channel: &ChannelConfig<f64>) -> f64 {
    let r = 1.0 + channel.drift_ppm * 1e-6;
    ((t - filter_delay - channel.delay_samples) * r - filter_delay) / sps as f64
}

/// For each transmitted frame start, the index of the detected frame that
/// lines up with it. Unmatched detections are spurious.
pub fn match_frames(
    tx_starts: &[usize],
    rx: &RxOutput<f64>,
    filter_delay: f64,
    sps: usize,
    channel: &ChannelConfig<f64>,
) -> (Vec<Option<usize>>, usize) {
    let mut matched = vec![None; tx_starts.len()];
    let mut spurious = 0;
    for (di, f) in rx.frames.iter().enumerate() {
        let k = tx_symbol_at(rx.symbol_times[f.start], filter_delay, sps, channel);
        // tx_starts is sorted, so the nearest start brackets k
        let pos = tx_starts.partition_point(|&s| (s as f64) < k);
        let best = [pos.checked_sub(1), Some(pos)]
            .into_iter()
            .flatten()
            .filter(|&i| i < tx_starts.len())
            .min_by(|&a, &b| {
                (tx_starts[a] as f64 - k)
                    .abs()
                    .total_cmp(&(tx_starts[b] as f64 - k).abs())
            });
        match best {
            Some(i) if (tx_starts[i] as f64 - k).abs() <= MATCH_TOLERANCE_SYMBOLS && matched[i].is_none() => {
                matched[i] = Some(di);
            }
            _ => spurious += 1,
        }
    }
    (matched, spurious)
}

/// Decoded payload bits of detection `di`, interleaved bit1/bit2.
pub fn decoded_payload(rx: &RxOutput<f64>, di: usize) -> Vec<bool> {
    let f = &rx.frames[di];
    (f.payload_start..f.payload_start + f.payload_len)
        .flat_map(|i| [rx.bit1[i], rx.bit2[i]])
        .collect()
}

/// Worst |duty − 0.5| of the strobe stream over sliding windows of
/// `window_symbols` symbols, after skipping the first `skip_symbols`.
pub fn strobe_duty_worst_deviation(strobes: &[bool], sps: usize, window_symbols: usize, skip_symbols: usize) -> f64 {
    let w = window_symbols * sps;
    let s = (skip_symbols * sps).min(strobes.len());
    let x = &strobes[s..];
    if x.len() < w || w == 0 {
        return f64::NAN;
    }
    let mut count = x[..w].iter().filter(|&&b| b).count() as i64;
    let mut worst = (count as f64 / w as f64 - 0.5).abs();
    for i in w..x.len() {
        count += i64::from(x[i]) - i64::from(x[i - w]);
        worst = worst.max((count as f64 / w as f64 - 0.5).abs());
    }
    worst
}

/// Runs one burst of `frames` through the configured channel and receiver.
pub fn run_burst(
    cfg: &ExperimentConfig,
    trial: usize,
    frames: Option<Vec<FramePayload>>,
) -> Result<(Burst<f64>, RxOutput<f64>, TrialResult)> {
    let (tx_seed, noise_seed) = trial_seeds(cfg, trial);
    let tx = Transmitter::new(cfg.tx.clone())?;
    let burst = match frames {
        Some(f) => tx.burst_from_frames(tx_seed, f, cfg.lead_in_symbols, cfg.tail_symbols)?,
        None => tx.burst(tx_seed, cfg.frames_per_trial, cfg.lead_in_symbols, cfg.tail_symbols)?,
    };
    let ch = ChannelConfig {
        seed: noise_seed,
        ..cfg.channel.clone()
    };
    let y = apply_channel(&burst.waveform, &ch, BITS_PER_SYMBOL, cfg.tx.sps)?;
    let rx = Receiver::new(&cfg.tx, cfg.rx.clone())?.process(&y)?;

    let delay = tx.taps().group_delay() as f64;
    let (matched, spurious) = match_frames(&burst.frame_starts, &rx, delay, cfg.tx.sps, &cfg.channel);
    let mut r = TrialResult {
        frames_sent: burst.frames.len(),
        spurious_frames: spurious,
        residual_cfo_hz: rx.residual_cfo_hz,
        cfc_estimate_hz: rx.diagnostics.cfc_estimate_hz,
        timing_locked: rx.diagnostics.timing_locked,
        timing_lock_lost: rx.diagnostics.timing_lock_lost,
        carrier_locked: rx.diagnostics.carrier_locked,
        strobe_duty_worst_deviation: strobe_duty_worst_deviation(&rx.strobes, cfg.tx.sps, 1000, cfg.lead_in_symbols),
        ..Default::default()
    };
    for (fi, (frame, m)) in burst.frames.iter().zip(&matched).enumerate() {
        let sent = &frame.payload_bits;
        let mut block = BlockRecord {
            trial,
            frame: fi,
            detected: m.is_some(),
            bits: sent.len() as u64,
            // a missed frame loses every payload bit
            bit_errors: sent.len() as u64,
            evm_rms: None,
        };
        match m {
            Some(di) => {
                r.frames_detected += 1;
                let got = decoded_payload(&rx, *di);
                // truncated payloads count the missing bits as errors
                block.bit_errors = sent
                    .iter()
                    .enumerate()
                    .filter(|&(i, b)| got.get(i) != Some(b))
                    .count() as u64;
                let first = burst.frame_starts[fi] + HEADER_LEN;
                let ideal = &burst.symbols[first..first + sent.len() / BITS_PER_SYMBOL];
                block.evm_rms = payload_evm(&rx, *di, ideal);
                r.decoded.push(Some(got));
            }
            None => r.decoded.push(None),
        }
        r.bits += block.bits;
        r.bit_errors += block.bit_errors;
        r.frames_in_error += usize::from(block.bit_errors > 0);
        r.blocks.push(block);
    }
    Ok((burst, rx, r))
}

/// Runs `cfg.trials` bursts in parallel and aggregates them in trial order.
pub fn run_link(cfg: &ExperimentConfig) -> Result<LinkReport> {
    run_link_blocks(cfg).map(|(r, _)| r)
}

/// [`run_link`] plus the per-frame records, in trial then frame order.
pub fn run_link_blocks(cfg: &ExperimentConfig) -> Result<(LinkReport, Vec<BlockRecord>)> {
    cfg.validate()?;
    cfg.require_link_mode()?;
    let start = Instant::now();
    let trials: Vec<TrialResult> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| run_burst(cfg, t, None).map(|(_, _, r)| r))
        .collect::<Result<_>>()?;
    let mut report = aggregate(cfg, &trials);
    report.wall_clock_s = start.elapsed().as_secs_f64();
    let blocks = trials.into_iter().flat_map(|t| t.blocks).collect();
    Ok((report, blocks))
}

pub fn aggregate(cfg: &ExperimentConfig, trials: &[TrialResult]) -> LinkReport {
    let sum = |f: fn(&TrialResult) -> usize| trials.iter().map(f).sum::<usize>();
    let frames_sent = sum(|t| t.frames_sent);
    let bits: u64 = trials.iter().map(|t| t.bits).sum();
    let bit_errors: u64 = trials.iter().map(|t| t.bit_errors).sum();
    let frames_in_error = sum(|t| t.frames_in_error);
    let estimates: Vec<f64> = trials.iter().filter_map(|t| t.cfc_estimate_hz).collect();
    let evms: Vec<f64> = trials
        .iter()
        .flat_map(|t| t.blocks.iter().filter_map(|b| b.evm_rms))
        .collect();
    let n = trials.len().max(1) as f64;
    LinkReport {
        ebn0_db: cfg.channel.ebn0_db,
        frames_sent,
        frames_detected: sum(|t| t.frames_detected),
        spurious_frames: sum(|t| t.spurious_frames),
        frames_in_error,
        bits,
        bit_errors,
        ber: if bits > 0 { bit_errors as f64 / bits as f64 } else { 0.0 },
        fer: if frames_sent > 0 { frames_in_error as f64 / frames_sent as f64 } else { 0.0 },
        awgn_reference_ber: qpsk_awgn_ber(cfg.channel.ebn0_db),
        evm_rms: (!evms.is_empty()).then(|| (evms.iter().map(|e| e * e).sum::<f64>() / evms.len() as f64).sqrt()),
        residual_cfo_hz: trials.iter().map(|t| t.residual_cfo_hz).sum::<f64>() / n,
        cfc_estimate_hz: (!estimates.is_empty()).then(|| estimates.iter().sum::<f64>() / estimates.len() as f64),
        lock: LockFlags {
            timing_locked_trials: sum(|t| usize::from(t.timing_locked)),
            timing_lock_lost_trials: sum(|t| usize::from(t.timing_lock_lost)),
            carrier_locked_trials: sum(|t| usize::from(t.carrier_locked)),
            trials: trials.len(),
        },
        strobe_duty_worst_deviation: trials
            .iter()
            .map(|t| t.strobe_duty_worst_deviation)
            .filter(|v| v.is_finite())
            .fold(0.0, f64::max),
        config_hash: cfg.hash(),
        seed: cfg.seed,
        wall_clock_s: 0.0,
    }
}
