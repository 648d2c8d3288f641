//! Labelled corpora: generation and the CSV exchange format
//! (`label,sample_rate_hz,s0,s1,...`, one window per row, header line
//! optional and skipped when it starts with `label`).

use std::io::{BufRead, Write};

use super::synth::SynthProfile;
use super::{Command, EmgWindow};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::seed::derive_seed;

/// `per_class` windows of `window_len` samples for each command. Window
/// `i` of the corpus uses seed `derive_seed(seed, i)`.
pub fn generate_corpus<T: Real>(
    profile: &SynthProfile,
    commands: &[Command],
    per_class: usize,
    window_len: usize,
    fs: T,
    seed: u64,
) -> Result<Vec<EmgWindow<T>>> {
    let duration = T::from_usize_lossy(window_len) / fs;
    let mut out = Vec::with_capacity(commands.len() * per_class);
    for (ci, &c) in commands.iter().enumerate() {
        for i in 0..per_class {
            let idx = (ci * per_class + i) as u64;
            let w = profile.synthesize(c, duration, fs, derive_seed(seed, idx))?;
            debug_assert_eq!(w.len(), window_len);
            out.push(w);
        }
    }
    Ok(out)
}

pub fn write_corpus_csv<T: Real, W: Write>(windows: &[EmgWindow<T>], mut out: W) -> Result<()> {
    writeln!(out, "label,sample_rate_hz,samples...")?;
    for w in windows {
        let label = w.label.map_or("none", Command::name);
        write!(out, "{label},{}", w.sample_rate_hz())?;
        for s in w.samples() {
            write!(out, ",{s}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

pub fn read_corpus_csv<T: Real, R: BufRead>(input: R) -> Result<Vec<EmgWindow<T>>> {
    let mut out = Vec::new();
    for (ln, line) in input.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with("label") || line.starts_with('#') {
            continue;
        }
        let bad = |what: &str| Error::Format(format!("corpus line {}: {what}", ln + 1));
        let mut fields = line.split(',');
        let label = fields.next().ok_or_else(|| bad("missing label"))?;
        let label = if label == "none" {
            None
        } else {
            Some(Command::parse(label).map_err(|_| bad(&format!("unknown label '{label}'")))?)
        };
        let parse = |s: &str| -> Result<T> {
            s.trim()
                .parse::<f64>()
                .map(T::lit)
                .map_err(|_| bad(&format!("bad number '{s}'")))
        };
        let fs = parse(fields.next().ok_or_else(|| bad("missing sample rate"))?)?;
        let samples = fields.map(parse).collect::<Result<Vec<T>>>()?;
        out.push(EmgWindow::new(samples, fs, label).map_err(|e| bad(&e.to_string()))?);
    }
    Ok(out)
}
