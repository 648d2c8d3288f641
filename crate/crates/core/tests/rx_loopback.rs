use emglink::channel::{apply_channel, ChannelConfig};
use emglink::harness::{run_burst, run_link, ExperimentConfig};
use emglink::rx::Receiver;
use emglink::tx::{Transmitter, TxConfig, BITS_PER_SYMBOL};

fn base(trials: usize, frames: usize, channel: ChannelConfig<f64>) -> ExperimentConfig {
    ExperimentConfig {
        seed: 7,
        trials,
        frames_per_trial: frames,
        tx: TxConfig {
            payload_bits: 1024,
            ..Default::default()
        },
        channel,
        ..Default::default()
    }
}

#[test]
fn hundred_frames_through_all_impairments() {
    let ch = ChannelConfig {
        ebn0_db: 20.0,
        cfo_hz: 750.0,
        phase_offset_rad: 0.7,
        delay_samples: 0.37,
        drift_ppm: 20.0,
        seed: 3,
    };
    let r = run_link(&base(2, 60, ch)).unwrap();
    assert_eq!(r.frames_sent, 120);
    assert_eq!(r.frames_detected, 120, "{r:?}");
    assert_eq!(r.spurious_frames, 0);
    assert_eq!(r.bit_errors, 0, "{r:?}");
    assert!(r.lock.carrier_locked_trials == 2 && r.lock.timing_locked_trials == 2);
}

#[test]
fn quarter_turn_rotation_is_resolved_by_the_preamble() {
    for k in 1..4 {
        let ch = ChannelConfig {
            phase_offset_rad: k as f64 * std::f64::consts::FRAC_PI_2,
            ..ChannelConfig::identity()
        };
        let r = run_link(&base(1, 20, ch)).unwrap();
        assert_eq!(r.frames_detected, 20, "rotation {k}·90°");
        assert_eq!(r.bit_errors, 0, "rotation {k}·90°");
    }
}

#[test]
fn streaming_matches_batch_for_irregular_chunks() {
    let cfg = base(1, 8, ChannelConfig {
        ebn0_db: 12.0,
        cfo_hz: 1500.0,
        phase_offset_rad: -1.1,
        delay_samples: 0.8,
        drift_ppm: -30.0,
        seed: 11,
    });
    let tx = Transmitter::new(cfg.tx.clone()).unwrap();
    let burst = tx.burst(5, cfg.frames_per_trial, cfg.lead_in_symbols, cfg.tail_symbols).unwrap();
    let y = apply_channel(&burst.waveform, &cfg.channel, BITS_PER_SYMBOL, cfg.tx.sps).unwrap();
    let rx = Receiver::new(&cfg.tx, cfg.rx.clone()).unwrap();
    let batch = rx.process(&y).unwrap();

    let mut s = rx.stream(y.sample_rate_hz()).unwrap();
    let xs = y.samples();
    let mut i = 0;
    let mut n = 1;
    while i < xs.len() {
        let end = (i + n).min(xs.len());
        s.push(&xs[i..end]);
        i = end;
        n = n * 7 % 997 + 1;
    }
    let streamed = s.finish().unwrap();

    assert_eq!(batch.symbols, streamed.symbols);
    assert_eq!(batch.symbol_times, streamed.symbol_times);
    assert_eq!(batch.strobes, streamed.strobes);
    assert_eq!(batch.bit1, streamed.bit1);
    assert_eq!(batch.bit2, streamed.bit2);
    assert_eq!(batch.valid, streamed.valid);
    assert_eq!(batch.frame_starts, streamed.frame_starts);
    assert_eq!(batch.diagnostics, streamed.diagnostics);
    assert_eq!(batch.frame_starts.len(), 8);
}

#[test]
fn runs_are_deterministic_and_seed_sensitive() {
    let ch = ChannelConfig {
        ebn0_db: 4.0,
        cfo_hz: 300.0,
        ..ChannelConfig::identity()
    };
    let cfg = base(4, 10, ch);
    let a = run_link(&cfg).unwrap().without_timing();
    let b = run_link(&cfg).unwrap().without_timing();
    assert_eq!(a, b);
    assert_eq!(a.csv_row(), b.csv_row());

    let other = run_link(&ExperimentConfig { seed: 8, ..cfg }).unwrap();
    assert_ne!(a.bit_errors, other.bit_errors);
    assert_ne!(a.config_hash, other.config_hash);
}

#[test]
fn trial_outcome_does_not_depend_on_trial_count() {
    let ch = ChannelConfig {
        ebn0_db: 6.0,
        ..ChannelConfig::identity()
    };
    let (_, _, alone) = run_burst(&base(1, 6, ch.clone()), 0, None).unwrap();
    let (_, _, within) = run_burst(&base(5, 6, ch), 0, None).unwrap();
    assert_eq!(alone.bit_errors, within.bit_errors);
    assert_eq!(alone.decoded, within.decoded);
}
