//! Multi-task loss kernels with hand-derived analytic gradients.
//!
//! Four heads: detection (Hungarian-matched classification + box regression),
//! segmentation (dice + focal on soft masks), action (binary cross entropy)
//! and the spatio-temporal contrastive pair. Every kernel returns its scalar
//! value, a per-term breakdown that sums to the value, and partial
//! derivatives with respect to each real-valued input, checkable against
//! central finite differences via [`gradcheck`].

mod action;
mod contrastive;
mod detection;
pub mod gradcheck;
mod segmentation;

pub use action::action_loss;
pub use contrastive::{dissimilarity_loss, similarity_loss, stc_loss};
pub use detection::{detection_loss, DetGrad, DetPrediction};
pub use segmentation::{dice_loss, focal_loss, SoftMask};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Probabilities are clamped into [LOG_EPS, 1 - LOG_EPS] before any log.
pub const LOG_EPS: f64 = 1e-12;

/// Scalar loss with per-term breakdown and gradient container `G`.
#[derive(Debug, Clone, PartialEq)]
pub struct LossValue<G> {
    pub value: f64,
    /// Named breakdown; the term values sum to `value`.
    pub terms: Vec<(&'static str, f64)>,
    pub grad: G,
}

/// Weights and window sizes for the spatio-temporal contrastive loss.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ContrastiveConfig {
    pub lambda_s: f64,
    pub lambda_ds: f64,
    /// Window length in frames for the dissimilarity term.
    pub tau: usize,
    /// Batch size K when frame pairs are drawn batch-wise for
    /// re-identification training; pairs per pig = C(K, 2).
    pub batch_k: usize,
}

impl Default for ContrastiveConfig {
    fn default() -> Self {
        Self {
            lambda_s: 1.0,
            lambda_ds: 1.0,
            tau: 3,
            batch_k: 5,
        }
    }
}

impl ContrastiveConfig {
    pub fn validate(&self) -> Result<()> {
        if self.lambda_s < 0.0 || self.lambda_ds < 0.0 {
            return Err(Error::InvalidConfig("contrastive weights must be >= 0".into()));
        }
        if self.tau < 2 {
            return Err(Error::InvalidConfig("tau must be >= 2".into()));
        }
        if self.batch_k < 2 {
            return Err(Error::InvalidConfig("batch_k must be >= 2".into()));
        }
        Ok(())
    }
}

/// Term weights for the detection loss (DETR-style defaults).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectionLossConfig {
    pub w_class: f64,
    pub w_l1: f64,
    pub w_giou: f64,
}

impl Default for DetectionLossConfig {
    fn default() -> Self {
        Self {
            w_class: 1.0,
            w_l1: 5.0,
            w_giou: 2.0,
        }
    }
}

impl DetectionLossConfig {
    pub fn validate(&self) -> Result<()> {
        if self.w_class < 0.0 || self.w_l1 < 0.0 || self.w_giou < 0.0 {
            return Err(Error::InvalidConfig("detection weights must be >= 0".into()));
        }
        if self.w_class == 0.0 && self.w_l1 == 0.0 && self.w_giou == 0.0 {
            return Err(Error::InvalidConfig("detection weights must not all be zero".into()));
        }
        Ok(())
    }
}

/// Dice smoothing and focal modulation parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SegLossConfig {
    pub dice_eps: f64,
    pub focal_alpha: f64,
    pub focal_gamma: f64,
}

impl Default for SegLossConfig {
    fn default() -> Self {
        Self {
            dice_eps: 1.0,
            focal_alpha: 0.25,
            focal_gamma: 2.0,
        }
    }
}

impl SegLossConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dice_eps <= 0.0 {
            return Err(Error::InvalidConfig("dice_eps must be > 0".into()));
        }
        if !(0.0..=1.0).contains(&self.focal_alpha) {
            return Err(Error::InvalidConfig("focal_alpha must lie in [0, 1]".into()));
        }
        if self.focal_gamma < 0.0 {
            return Err(Error::InvalidConfig("focal_gamma must be >= 0".into()));
        }
        Ok(())
    }
}
