//! Receiver: AGC → matched filter → coarse frequency compensation → timing
//! recovery → carrier PLL → frame synchronization and demapping.
//!
//! Every stage except frame synchronization is a sequential state machine;
//! [`RxStream`] feeds them chunk by chunk and produces the same output for
//! any chunking. The coarse frequency estimate is taken once, over the
//! first `cfc_nfft · cfc_blocks` matched-filter samples, which are held
//! back until the window is full. Frame synchronization runs over the whole
//! symbol stream at [`RxStream::finish`].

mod agc;
mod cfc;
mod ffc;
mod framesync;
mod loop_filter;
mod matched;
mod output;
mod timing;

pub use agc::{agc, Agc, AgcState};
pub use cfc::{coarse_freq_correct, coarse_freq_estimate, DEFAULT_PROMINENCE};
pub use ffc::{ffc_pll, CarrierPll, PllState, CARRIER_LOCK_THRESHOLD};
pub use framesync::{frame_sync_decode, preamble_correlation, DetectedFrame, FrameSyncOutput, DEFAULT_THRESHOLD};
pub use loop_filter::pi_loop_gains;
pub use matched::{matched_filter, MatchedFilter};
pub use output::{RxDiagnostics, RxOutput, RxReport, TapDump};
pub use timing::{
    ted_gain, timing_recovery, TedKind, TimedSymbol, TimingOutput, TimingRecovery, TimingState,
    DEFAULT_LOCK_THRESHOLD,
};

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{config_err, Result};
use crate::scalar::Real;
use crate::signal::SampleBuffer;
use crate::tx::TxConfig;

/// Receiver loop parameters. Pulse shape, preamble and frame length come
/// from the matching [`TxConfig`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RxConfig<T> {
    /// AGC output mean amplitude; `1/sps`.
    pub agc_target: T,
    pub agc_step: T,
    pub agc_window: usize,
    pub cfc_enabled: bool,
    pub cfc_nfft: usize,
    /// Number of `cfc_nfft` blocks averaged for the estimate.
    pub cfc_blocks: usize,
    pub cfc_prominence: T,
    pub timing_bandwidth: T,
    pub timing_damping: T,
    pub ted: TedKind,
    pub timing_lock_threshold: T,
    pub timing_lock_window: usize,
    pub ffc_bandwidth: T,
    pub ffc_damping: T,
    pub frame_threshold: T,
    /// Keep per-stage signals for CSV dumps.
    pub dump_taps: bool,
}

impl<T: Real> Default for RxConfig<T> {
    fn default() -> Self {
        Self {
            agc_target: T::lit(0.5),
            agc_step: T::lit(0.01),
            agc_window: 32,
            cfc_enabled: true,
            cfc_nfft: 4096,
            cfc_blocks: 4,
            cfc_prominence: T::lit(DEFAULT_PROMINENCE),
            timing_bandwidth: T::lit(0.005),
            timing_damping: T::one(),
            ted: TedKind::ZeroCrossing,
            timing_lock_threshold: T::lit(DEFAULT_LOCK_THRESHOLD),
            timing_lock_window: 1000,
            ffc_bandwidth: T::lit(0.01),
            ffc_damping: T::lit(0.707),
            frame_threshold: T::lit(DEFAULT_THRESHOLD),
            dump_taps: false,
        }
    }
}

impl<T: Real> RxConfig<T> {
    pub fn validate(&self) -> Result<()> {
        AgcState::new(self.agc_target, self.agc_step).map_err(|e| prefix("rx", e))?;
        if self.agc_window == 0 {
            return Err(config_err("rx.agc_window must be positive"));
        }
        if self.cfc_enabled {
            if self.cfc_nfft < 64 || !self.cfc_nfft.is_power_of_two() {
                return Err(config_err(format!(
                    "rx.cfc_nfft must be a power of two ≥ 64, got {}",
                    self.cfc_nfft
                )));
            }
            if self.cfc_blocks == 0 {
                return Err(config_err("rx.cfc_blocks must be positive"));
            }
            if !(self.cfc_prominence > T::zero()) {
                return Err(config_err("rx.cfc_prominence must be positive"));
            }
        }
        TimingRecovery::new(T::lit(0.5), self.timing_bandwidth, self.timing_damping, self.ted)
            .map_err(|e| prefix("rx", e))?;
        PllState::new(self.ffc_bandwidth, self.ffc_damping).map_err(|e| prefix("rx", e))?;
        if !(self.frame_threshold > T::zero() && self.frame_threshold <= T::one()) {
            return Err(config_err(format!(
                "rx.frame_threshold must lie in (0, 1], got {}",
                self.frame_threshold
            )));
        }
        if !(self.timing_lock_threshold > T::zero()) || self.timing_lock_window == 0 {
            return Err(config_err("rx.timing_lock_threshold and rx.timing_lock_window must be positive"));
        }
        Ok(())
    }
}

fn prefix(path: &str, e: crate::Error) -> crate::Error {
    match e {
        crate::Error::Config(m) => crate::Error::Config(format!("{path}: {m}")),
        other => other,
    }
}

#[derive(Clone, Debug)]
pub struct Receiver<T> {
    cfg: RxConfig<T>,
    rolloff: T,
    span_symbols: usize,
    sps: usize,
    preamble: Vec<Complex<T>>,
    payload_symbols: usize,
}

impl<T: Real> Receiver<T> {
    pub fn new(tx: &TxConfig<T>, cfg: RxConfig<T>) -> Result<Self> {
        tx.validate()?;
        cfg.validate()?;
        Ok(Self {
            rolloff: tx.rolloff,
            span_symbols: tx.span_symbols,
            sps: tx.sps,
            preamble: tx.preamble(),
            payload_symbols: tx.payload_symbols(),
            cfg,
        })
    }

    pub fn config(&self) -> &RxConfig<T> {
        &self.cfg
    }

    pub fn stream(&self, sample_rate_hz: T) -> Result<RxStream<T>> {
        RxStream::new(self.clone(), sample_rate_hz)
    }

    pub fn process(&self, x: &SampleBuffer<T>) -> Result<RxOutput<T>> {
        let mut s = self.stream(x.sample_rate_hz())?;
        s.push(x.samples());
        s.finish()
    }
}

/// Incremental receiver. Output is independent of how the input is split.
#[derive(Clone, Debug)]
pub struct RxStream<T> {
    rx: Receiver<T>,
    fs: T,
    agc: Agc<T>,
    mf: MatchedFilter<T>,
    cfc_pending: Vec<Complex<T>>,
    cfc: Option<Option<T>>,
    corrected: usize,
    timing: TimingRecovery<T>,
    pll: CarrierPll<T>,
    symbols: Vec<Complex<T>>,
    times: Vec<T>,
    strobes: Vec<bool>,
    taps: Option<TapDump<T>>,
}

impl<T: Real> RxStream<T> {
    fn new(rx: Receiver<T>, fs: T) -> Result<Self> {
        if !(fs > T::zero()) {
            return Err(config_err("sample rate must be positive"));
        }
        let c = &rx.cfg;
        let agc = Agc::new(AgcState::new(c.agc_target, c.agc_step)?, c.agc_window)?;
        let mf = MatchedFilter::new(rx.rolloff, rx.span_symbols, rx.sps)?;
        let timing = TimingRecovery::new(rx.rolloff, c.timing_bandwidth, c.timing_damping, c.ted)?
            .with_lock_detector(c.timing_lock_threshold, c.timing_lock_window);
        let pll = CarrierPll::new(PllState::new(c.ffc_bandwidth, c.ffc_damping)?)?;
        let taps = c.dump_taps.then(TapDump::default);
        let cfc = if c.cfc_enabled { None } else { Some(None) };
        Ok(Self {
            rx,
            fs,
            agc,
            mf,
            cfc_pending: Vec::new(),
            cfc,
            corrected: 0,
            timing,
            pll,
            symbols: Vec::new(),
            times: Vec::new(),
            strobes: Vec::new(),
            taps,
        })
    }

    pub fn push(&mut self, x: &[Complex<T>]) {
        let a = self.agc.process(x);
        let m = self.mf.process(&a);
        if let Some(t) = self.taps.as_mut() {
            t.agc.extend_from_slice(&a);
            t.matched.extend_from_slice(&m);
        }
        if self.cfc.is_some() {
            self.downstream(&m);
            return;
        }
        self.cfc_pending.extend(m);
        if self.cfc_pending.len() >= self.rx.cfg.cfc_nfft * self.rx.cfg.cfc_blocks {
            self.decide_cfc();
        }
    }

    fn decide_cfc(&mut self) {
        let pending = std::mem::take(&mut self.cfc_pending);
        let c = &self.rx.cfg;
        let window = (c.cfc_nfft * c.cfc_blocks).min(pending.len());
        let mut nfft = c.cfc_nfft;
        while nfft > window && nfft > 256 {
            nfft /= 2;
        }
        let est = if window >= nfft {
            coarse_freq_estimate(&pending[..window], nfft, self.fs, c.cfc_prominence)
                .ok()
                .flatten()
        } else {
            None
        };
        self.cfc = Some(est);
        self.downstream(&pending);
    }

    fn downstream(&mut self, m: &[Complex<T>]) {
        let f = self.cfc.flatten().unwrap_or(T::zero());
        let c = coarse_freq_correct(m, f, self.fs, self.corrected);
        self.corrected += m.len();
        for &v in &c {
            let (strobe, sym) = self.timing.push(v);
            if let Some(st) = strobe {
                self.strobes.push(st);
            }
            if let Some(s) = sym {
                let (d, e) = self.pll.push(s.value);
                self.timing.set_carrier_phase(self.pll.state().phase);
                self.symbols.push(d);
                self.times.push(s.time);
                if let Some(tp) = self.taps.as_mut() {
                    tp.timing.push(s);
                    tp.ffc.push(d);
                    tp.ped.push(e);
                }
            }
        }
        if let Some(tp) = self.taps.as_mut() {
            tp.cfc.extend(c);
        }
    }

    pub fn finish(mut self) -> Result<RxOutput<T>> {
        if self.cfc.is_none() {
            self.decide_cfc();
        }
        let fsync = frame_sync_decode(
            &self.symbols,
            &self.rx.preamble,
            self.rx.payload_symbols,
            self.rx.cfg.frame_threshold,
        )?;
        let symbol_rate = self.fs / T::from_usize_lossy(self.rx.sps);
        let pll = self.pll.state();
        let residual = pll.freq / T::TAU() * symbol_rate;
        let strobe_count = self.strobes.iter().filter(|&&s| s).count();
        let diagnostics = RxDiagnostics {
            cfc_estimate_hz: self.cfc.flatten(),
            agc_gain: self.agc.state().current_gain,
            timing_locked: self.timing.is_locked(),
            timing_lock_lost: self.timing.lock_lost(),
            timing_error_variance: self.timing.error_variance(),
            carrier_locked: self.pll.is_locked(),
            carrier_phase_rad: pll.phase,
            frames_detected: fsync.frames.len(),
            frames_dropped_estimate: fsync.dropped_estimate,
            symbols: self.symbols.len(),
            strobe_duty: if self.strobes.is_empty() {
                T::zero()
            } else {
                T::from_usize_lossy(strobe_count) / T::from_usize_lossy(self.strobes.len())
            },
            final_mu: self.timing.state().mu,
        };
        Ok(RxOutput {
            frame_starts: fsync.frames.iter().map(|f| f.start).collect(),
            bit1: fsync.bit1,
            bit2: fsync.bit2,
            valid: fsync.valid,
            frames: fsync.frames,
            residual_cfo_hz: residual,
            diagnostics,
            symbols: self.symbols,
            symbol_times: self.times,
            strobes: self.strobes,
            taps: self.taps,
        })
    }
}
