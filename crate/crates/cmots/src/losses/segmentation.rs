//! Per-instance segmentation losses: dice and focal over soft masks.

use crate::error::{Error, Result};
use crate::mask::Mask;

use super::{LossValue, SegLossConfig, LOG_EPS};

/// Soft prediction mask: per-pixel foreground probabilities, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SoftMask {
    width: u32,
    height: u32,
    probs: Vec<f64>,
}

impl SoftMask {
    pub fn new(width: u32, height: u32, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != width as usize * height as usize {
            return Err(Error::DimensionMismatch(format!(
                "soft mask with {} probs for {}x{}",
                probs.len(),
                width,
                height
            )));
        }
        for &p in &probs {
            if !(0.0..=1.0).contains(&p) || !p.is_finite() {
                return Err(Error::OutOfRange(format!("probability {p} outside [0, 1]")));
            }
        }
        Ok(Self {
            width,
            height,
            probs,
        })
    }

    /// Hard 0/1 view of a binary mask.
    pub fn from_mask(mask: &Mask) -> Self {
        Self {
            width: mask.width(),
            height: mask.height(),
            probs: mask.bits().iter().map(|&b| if b { 1.0 } else { 0.0 }).collect(),
        }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    fn check_shape(&self, gt: &Mask) -> Result<()> {
        if self.width != gt.width() || self.height != gt.height() {
            return Err(Error::DimensionMismatch(format!(
                "soft mask {}x{} vs ground truth {}x{}",
                self.width,
                self.height,
                gt.width(),
                gt.height()
            )));
        }
        Ok(())
    }
}

/// Dice loss: 1 - (2 Σ p·g + ε) / (Σ p + Σ g + ε), with gradients w.r.t.
/// every prediction probability.
pub fn dice_loss(pred: &SoftMask, gt: &Mask, cfg: &SegLossConfig) -> Result<LossValue<Vec<f64>>> {
    cfg.validate()?;
    pred.check_shape(gt)?;
    let eps = cfg.dice_eps;

    let mut dot = 0.0;
    let mut p_sum = 0.0;
    let mut g_sum = 0.0;
    for (&p, &g) in pred.probs.iter().zip(gt.bits()) {
        let gv = if g { 1.0 } else { 0.0 };
        dot += p * gv;
        p_sum += p;
        g_sum += gv;
    }
    let num = 2.0 * dot + eps;
    let den = p_sum + g_sum + eps;
    let value = 1.0 - num / den;

    let grad = pred
        .probs
        .iter()
        .zip(gt.bits())
        .map(|(_, &g)| {
            let gv = if g { 1.0 } else { 0.0 };
            -(2.0 * gv * den - num) / (den * den)
        })
        .collect();

    Ok(LossValue {
        value,
        terms: vec![("dice", value)],
        grad,
    })
}

/// Focal loss: mean over pixels of -α_t (1 - p_t)^γ log(p_t), with
/// p_t = p for foreground pixels and 1 - p otherwise. Probabilities are
/// clamped into [1e-12, 1 - 1e-12] before the log; gradients are zero in
/// the clamped region.
pub fn focal_loss(pred: &SoftMask, gt: &Mask, cfg: &SegLossConfig) -> Result<LossValue<Vec<f64>>> {
    cfg.validate()?;
    pred.check_shape(gt)?;
    let alpha = cfg.focal_alpha;
    let gamma = cfg.focal_gamma;
    let count = pred.probs.len() as f64;

    let mut total = 0.0;
    let mut grad = vec![0.0; pred.probs.len()];
    for (k, (&p_raw, &g)) in pred.probs.iter().zip(gt.bits()).enumerate() {
        let clamped = p_raw.clamp(LOG_EPS, 1.0 - LOG_EPS);
        let in_clamp = p_raw != clamped;
        let p = clamped;
        let (pixel, d_pixel) = if g {
            let one_minus = 1.0 - p;
            let modulation = one_minus.powf(gamma);
            let value = -alpha * modulation * p.ln();
            let mut d = -alpha * modulation / p;
            if gamma > 0.0 {
                d += alpha * gamma * one_minus.powf(gamma - 1.0) * p.ln();
            }
            (value, d)
        } else {
            let modulation = p.powf(gamma);
            let value = -(1.0 - alpha) * modulation * (1.0 - p).ln();
            let mut d = (1.0 - alpha) * modulation / (1.0 - p);
            if gamma > 0.0 {
                d -= (1.0 - alpha) * gamma * p.powf(gamma - 1.0) * (1.0 - p).ln();
            }
            (value, d)
        };
        total += pixel;
        grad[k] = if in_clamp { 0.0 } else { d_pixel / count };
    }

    let value = total / count;
    Ok(LossValue {
        value,
        terms: vec![("focal", value)],
        grad,
    })
}
