//! Two-level safety feedback: joint-angle correction and tilt (fall)
//! monitoring.

use serde::{Deserialize, Serialize};

use crate::error::{config_err, Result};
use crate::scalar::Real;

/// Largest correction a single feedback step may command, in degrees.
pub const DEFAULT_CORRECTION_LIMIT_DEG: f64 = 10.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SafetyState<T> {
    pub tilt_deg: T,
    pub tilt_threshold_deg: T,
    pub joint_angle_deg: T,
    pub joint_target_deg: T,
}

impl<T: Real> SafetyState<T> {
    pub fn new(tilt_deg: T, tilt_threshold_deg: T, joint_angle_deg: T, joint_target_deg: T) -> Result<Self> {
        if !(tilt_threshold_deg > T::zero()) {
            return Err(config_err(format!("tilt threshold must be positive, got {tilt_threshold_deg}")));
        }
        Ok(Self {
            tilt_deg,
            tilt_threshold_deg,
            joint_angle_deg,
            joint_target_deg,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FallAction {
    Normal,
    Decelerate,
}

/// `k_p·(target − measured)`, clamped to ±[`DEFAULT_CORRECTION_LIMIT_DEG`].
pub fn angle_feedback_correct<T: Real>(s: &SafetyState<T>, k_p: T) -> T {
    angle_feedback_correct_limited(s, k_p, T::lit(DEFAULT_CORRECTION_LIMIT_DEG))
}

pub fn angle_feedback_correct_limited<T: Real>(s: &SafetyState<T>, k_p: T, limit: T) -> T {
    let raw = k_p * (s.joint_target_deg - s.joint_angle_deg);
    raw.max(-limit).min(limit)
}

/// Decelerate strictly above the threshold; a tilt exactly at the
/// threshold is still normal.
pub fn fall_monitor<T: Real>(s: &SafetyState<T>) -> FallAction {
    if s.tilt_deg.abs() > s.tilt_threshold_deg {
        FallAction::Decelerate
    } else {
        FallAction::Normal
    }
}
