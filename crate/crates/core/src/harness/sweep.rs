//! Eb/N0 sweeps and the versioned sweep CSV format.
//!
//! ```text
//! # schema=emglink.sweep.v1 config_hash=<16 hex> seed=<u64>
//! ebn0_db,frames_sent,frames_detected,bits,bit_errors,ber,ber_ci_low,ber_ci_high,fer,awgn_reference_ber,monotone_ok
//! ```

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::link::run_link;
use crate::error::{config_err, Error, Result};

pub const SWEEP_SCHEMA: &str = "emglink.sweep.v1";
pub const SWEEP_COLUMNS: [&str; 11] = [
    "ebn0_db",
    "frames_sent",
    "frames_detected",
    "bits",
    "bit_errors",
    "ber",
    "ber_ci_low",
    "ber_ci_high",
    "fer",
    "awgn_reference_ber",
    "monotone_ok",
];

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub ebn0_db: f64,
    pub frames_sent: usize,
    pub frames_detected: usize,
    pub bits: u64,
    pub bit_errors: u64,
    pub ber: f64,
    pub ber_ci_low: f64,
    pub ber_ci_high: f64,
    pub fer: f64,
    pub awgn_reference_ber: f64,
    /// BER interval overlaps or lies below the previous point's.
    pub monotone_ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub config_hash: String,
    pub seed: u64,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    /// Every point passes the non-increasing check.
    pub fn monotone(&self) -> bool {
        self.rows.iter().all(|r| r.monotone_ok)
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(SWEEP_COLUMNS).map_err(csv_err)?;
        for r in &self.rows {
            w.write_record([
                format!("{:?}", r.ebn0_db),
                r.frames_sent.to_string(),
                r.frames_detected.to_string(),
                r.bits.to_string(),
                r.bit_errors.to_string(),
                format!("{:e}", r.ber),
                format!("{:e}", r.ber_ci_low),
                format!("{:e}", r.ber_ci_high),
                format!("{:e}", r.fer),
                format!("{:e}", r.awgn_reference_ber),
                r.monotone_ok.to_string(),
            ])
            .map_err(csv_err)?;
        }
        let body = String::from_utf8(w.into_inner().map_err(|e| Error::Format(e.to_string()))?)
            .map_err(|e| Error::Format(e.to_string()))?;
        Ok(format!(
            "# schema={SWEEP_SCHEMA} config_hash={} seed={}\n{body}",
            self.config_hash, self.seed
        ))
    }

    /// Parses the format written by [`SweepTable::to_csv`], checking the
    /// schema tag and the column order.
    pub fn from_csv(s: &str) -> Result<Self> {
        let first = s.lines().next().ok_or_else(|| Error::Format("empty sweep file".into()))?;
        let meta = parse_meta(first)?;
        if meta.schema != SWEEP_SCHEMA {
            return Err(Error::Format(format!("schema {} is not {SWEEP_SCHEMA}", meta.schema)));
        }
        let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(s.as_bytes());
        let header: Vec<String> = r.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
        if header != SWEEP_COLUMNS {
            return Err(Error::Format(format!("unexpected sweep columns {header:?}")));
        }
        let rows = r
            .deserialize()
            .collect::<std::result::Result<Vec<SweepRow>, _>>()
            .map_err(csv_err)?;
        Ok(Self {
            config_hash: meta.config_hash,
            seed: meta.seed,
            rows,
        })
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Format(format!("CSV: {e}"))
}

/// Fields of a `# schema=… config_hash=… seed=…` line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArtifactMeta {
    pub schema: String,
    pub config_hash: String,
    pub seed: u64,
}

pub fn meta_line(schema: &str, cfg: &ExperimentConfig) -> String {
    format!("# schema={schema} config_hash={} seed={}", cfg.hash(), cfg.seed)
}

pub fn parse_meta(line: &str) -> Result<ArtifactMeta> {
    let body = line
        .strip_prefix('#')
        .ok_or_else(|| Error::Format("missing '# schema=' line".into()))?;
    let mut schema = None;
    let mut hash = None;
    let mut seed = None;
    for kv in body.split_whitespace() {
        match kv.split_once('=') {
            Some(("schema", v)) => schema = Some(v.to_string()),
            Some(("config_hash", v)) => hash = Some(v.to_string()),
            Some(("seed", v)) => seed = v.parse().ok(),
            _ => {}
        }
    }
    match (schema, hash, seed) {
        (Some(schema), Some(config_hash), Some(seed)) => Ok(ArtifactMeta {
            schema,
            config_hash,
            seed,
        }),
        _ => Err(Error::Format(format!("malformed metadata line '{line}'"))),
    }
}

/// Wilson score interval at 95% for `k` successes in `n` trials.
pub fn wilson_interval(k: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let (k, n) = (k as f64, n as f64);
    let p = k / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // The endpoints are exact at k = 0 and k = n; avoid cancellation residue.
    let lo = if k == 0.0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if k == n { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

/// One [`run_link`] per point, in the given order.
pub fn sweep_ebn0(cfg: &ExperimentConfig, points_db: &[f64]) -> Result<SweepTable> {
    if points_db.len() < 2 {
        return Err(config_err(format!(
            "sweep.points_db needs at least 2 points, got {}",
            points_db.len()
        )));
    }
    let mut rows: Vec<SweepRow> = Vec::with_capacity(points_db.len());
    for &p in points_db {
        let mut c = cfg.clone();
        c.channel.ebn0_db = p;
        let r = run_link(&c)?;
        let (lo, hi) = wilson_interval(r.bit_errors, r.bits);
        let monotone_ok = rows.last().is_none_or(|prev| lo <= prev.ber_ci_high);
        rows.push(SweepRow {
            ebn0_db: p,
            frames_sent: r.frames_sent,
            frames_detected: r.frames_detected,
            bits: r.bits,
            bit_errors: r.bit_errors,
            ber: r.ber,
            ber_ci_low: lo,
            ber_ci_high: hi,
            fer: r.fer,
            awgn_reference_ber: r.awgn_reference_ber,
            monotone_ok,
        });
    }
    Ok(SweepTable {
        config_hash: cfg.hash(),
        seed: cfg.seed,
        rows,
    })
}
