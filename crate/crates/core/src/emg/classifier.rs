//! Offline template database and nearest-template classification.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::features::extract_features;
use super::{Command, EmgWindow};
use crate::error::{dim_err, Error, Result};
use crate::scalar::Real;

/// Serialized database format version.
pub const DB_VERSION: u32 = 1;

/// Reject threshold = margin × largest training distance to own template.
pub const DEFAULT_MARGIN: f64 = 1.5;

/// Per-command feature templates. `commands`, `templates` and `spreads`
/// are parallel and ordered by command index.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommandDatabase<T> {
    pub version: u32,
    pub feature_dim: usize,
    pub commands: Vec<Command>,
    pub templates: Vec<Vec<T>>,
    pub spreads: Vec<Vec<T>>,
    pub reject_threshold: T,
    pub margin: T,
}

/// Outcome of classifying one feature vector. `command` is `None` when the
/// nearest template is farther than the reject threshold.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommandDecision<T> {
    #[serde(with = "decision_label")]
    pub command: Option<Command>,
    pub nearest: Command,
    pub distance: T,
    pub confidence: T,
}

impl<T> CommandDecision<T> {
    /// Command name, or `"none"` for a rejection.
    pub fn label(&self) -> &'static str {
        self.command.map_or("none", Command::name)
    }
}

mod decision_label {
    use super::Command;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(c: &Option<Command>, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(c.map_or("none", Command::name))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Command>, D::Error> {
        let s = String::deserialize(d)?;
        if s == "none" {
            return Ok(None);
        }
        Command::parse(&s).map(Some).map_err(serde::de::Error::custom)
    }
}

impl<T: Real> CommandDatabase<T> {
    /// Assembles and validates a database.
    pub fn new(
        commands: Vec<Command>,
        templates: Vec<Vec<T>>,
        spreads: Vec<Vec<T>>,
        reject_threshold: T,
        margin: T,
    ) -> Result<Self> {
        let db = Self {
            version: DB_VERSION,
            feature_dim: templates.first().map_or(0, Vec::len),
            commands,
            templates,
            spreads,
            reject_threshold,
            margin,
        };
        db.validate()?;
        Ok(db)
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != DB_VERSION {
            return Err(Error::Format(format!("database version {} (expected {DB_VERSION})", self.version)));
        }
        if self.commands.is_empty() || self.feature_dim == 0 {
            return Err(Error::Format("database has no templates".into()));
        }
        if self.templates.len() != self.commands.len() || self.spreads.len() != self.commands.len() {
            return Err(dim_err("commands, templates and spreads differ in length"));
        }
        if self.commands.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Format("commands must be unique and in index order".into()));
        }
        for (c, (t, s)) in self.commands.iter().zip(self.templates.iter().zip(&self.spreads)) {
            if t.len() != self.feature_dim || s.len() != self.feature_dim {
                return Err(dim_err(format!("template for {c} has the wrong dimension")));
            }
            if s.iter().any(|&v| !(v >= T::zero())) || t.iter().any(|v| !v.is_finite()) {
                return Err(Error::Format(format!("template for {c} has invalid values")));
            }
        }
        if !(self.reject_threshold >= T::zero()) || !self.reject_threshold.is_finite() {
            return Err(Error::Format(format!("reject threshold {} is invalid", self.reject_threshold)));
        }
        Ok(())
    }

    /// Builds templates from labelled feature vectors. Commands are ordered
    /// by index; every command present needs at least two vectors.
    pub fn from_features(labeled: &[(Command, Vec<T>)], margin: T) -> Result<Self> {
        if !(margin > T::zero()) {
            return Err(Error::Config(format!("margin must be positive, got {margin}")));
        }
        let dim = labeled.first().map_or(0, |(_, f)| f.len());
        if dim == 0 {
            return Err(Error::Training("no training features".into()));
        }
        if let Some((c, f)) = labeled.iter().find(|(_, f)| f.len() != dim) {
            return Err(dim_err(format!("feature vector for {c} has length {} (expected {dim})", f.len())));
        }
        let mut commands: Vec<Command> = labeled.iter().map(|(c, _)| *c).collect();
        commands.sort();
        commands.dedup();

        let mut templates = Vec::with_capacity(commands.len());
        let mut spreads = Vec::with_capacity(commands.len());
        let mut max_own = T::zero();
        for &c in &commands {
            let rows: Vec<&Vec<T>> = labeled.iter().filter(|(l, _)| *l == c).map(|(_, f)| f).collect();
            if rows.len() < 2 {
                return Err(Error::Training(format!(
                    "command '{c}' has {} training window(s); at least 2 are required",
                    rows.len()
                )));
            }
            let n = T::from_usize_lossy(rows.len());
            // shifted sum keeps the mean exact when every row is identical
            let mean: Vec<T> = (0..dim)
                .map(|j| rows[0][j] + rows.iter().map(|r| r[j] - rows[0][j]).sum::<T>() / n)
                .collect();
            let std: Vec<T> = (0..dim)
                .map(|j| {
                    let ss: T = rows.iter().map(|r| (r[j] - mean[j]).powi(2)).sum();
                    (ss / (n - T::one())).sqrt()
                })
                .collect();
            for r in &rows {
                max_own = max_own.max(euclidean(r, &mean));
            }
            templates.push(mean);
            spreads.push(std);
        }
        Self::new(commands, templates, spreads, margin * max_own, margin)
    }

}

impl<T: Real + Serialize + DeserializeOwned> CommandDatabase<T> {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let db: Self = serde_json::from_str(s)?;
        db.validate()?;
        Ok(db)
    }
}

fn euclidean<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| (x - y) * (x - y)).sum::<T>().sqrt()
}

/// Extracts features from every labelled window and builds the database
/// with [`DEFAULT_MARGIN`].
pub fn train_templates<T: Real>(labeled: &[EmgWindow<T>], n_coeffs: usize) -> Result<CommandDatabase<T>> {
    let mut rows = Vec::with_capacity(labeled.len());
    for (i, w) in labeled.iter().enumerate() {
        let c = w
            .label
            .ok_or_else(|| Error::Training(format!("training window {i} has no label")))?;
        rows.push((c, extract_features(w, n_coeffs)?));
    }
    CommandDatabase::from_features(&rows, T::lit(DEFAULT_MARGIN))
}

/// Nearest template by Euclidean distance; ties go to the lower command
/// index. Rejects when the distance exceeds the threshold.
pub fn classify<T: Real>(features: &[T], db: &CommandDatabase<T>) -> Result<CommandDecision<T>> {
    if features.len() != db.feature_dim {
        return Err(dim_err(format!(
            "feature vector has length {} but the database expects {}",
            features.len(),
            db.feature_dim
        )));
    }
    let mut best = (db.commands[0], euclidean(features, &db.templates[0]));
    for (&c, t) in db.commands.iter().zip(&db.templates).skip(1) {
        let d = euclidean(features, t);
        if d < best.1 {
            best = (c, d);
        }
    }
    let (nearest, distance) = best;
    let thr = db.reject_threshold;
    let confidence = if thr > T::zero() {
        (-distance / thr).exp().max(T::zero()).min(T::one())
    } else if distance == T::zero() {
        T::one()
    } else {
        T::zero()
    };
    Ok(CommandDecision {
        command: (distance <= thr).then_some(nearest),
        nearest,
        distance,
        confidence,
    })
}
