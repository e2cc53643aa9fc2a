//! Hungarian-matched detection loss: classification + L1 + generalised IoU.

use crate::assignment::{hungarian_min, CostMatrix};
use crate::bbox::{bbox_giou, BBox};
use crate::error::{Error, Result};

use super::{DetectionLossConfig, LossValue, LOG_EPS};

/// One prediction slot: a box in normalized coordinates plus the foreground
/// (pig vs background) probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetPrediction {
    pub bbox: BBox,
    pub prob: f64,
}

/// Gradients of the detection loss with respect to the prediction slots.
#[derive(Debug, Clone, PartialEq)]
pub struct DetGrad {
    /// d loss / d prob, per slot.
    pub d_prob: Vec<f64>,
    /// d loss / d (x, y, w, h), per slot.
    pub d_bbox: Vec<[f64; 4]>,
}

fn clamped_log(p: f64) -> (f64, f64) {
    if p < LOG_EPS {
        (LOG_EPS.ln(), 0.0)
    } else if p > 1.0 - LOG_EPS {
        ((1.0 - LOG_EPS).ln(), 0.0)
    } else {
        (p.ln(), 1.0 / p)
    }
}

/// GIoU of (pred, gt) plus d GIoU / d pred (x, y, w, h).
///
/// Piecewise smooth; the Iverson brackets below pick a side at ties, which
/// only matters on a measure-zero set.
fn giou_with_grad(p: &BBox, g: &BBox) -> Result<(f64, [f64; 4])> {
    let (l1, r1, t1, b1) = (p.x, p.x + p.w, p.y, p.y + p.h);
    let (l2, r2, t2, b2) = (g.x, g.x + g.w, g.y, g.y + g.h);

    let iw = r1.min(r2) - l1.max(l2);
    let ih = b1.min(b2) - t1.max(t2);
    let (iw, ih, inter_active) = if iw > 0.0 && ih > 0.0 {
        (iw, ih, true)
    } else {
        (0.0, 0.0, false)
    };
    let inter = iw * ih;
    let a1 = p.w * p.h;
    let a2 = g.w * g.h;
    let union = a1 + a2 - inter;

    let cw = r1.max(r2) - l1.min(l2);
    let ch = b1.max(b2) - t1.min(t2);
    let c = cw * ch;
    if c <= 0.0 {
        return Err(Error::OutOfRange(
            "GIoU of two degenerate boxes is undefined".into(),
        ));
    }
    let iou = if union > 0.0 { inter / union } else { 0.0 };
    let giou = iou - (c - union) / c;

    // Partials of iw/ih, union, and enclosing-box sides w.r.t. (x, y, w, h).
    let (mut d_iw, mut d_ih) = ([0.0f64; 4], [0.0f64; 4]);
    if inter_active {
        let right_active = if r1 < r2 { 1.0 } else { 0.0 };
        let left_active = if l1 > l2 { 1.0 } else { 0.0 };
        d_iw[0] = right_active - left_active;
        d_iw[2] = right_active;
        let bottom_active = if b1 < b2 { 1.0 } else { 0.0 };
        let top_active = if t1 > t2 { 1.0 } else { 0.0 };
        d_ih[1] = bottom_active - top_active;
        d_ih[3] = bottom_active;
    }
    let mut d_cw = [0.0f64; 4];
    let cw_right = if r1 > r2 { 1.0 } else { 0.0 };
    let cw_left = if l1 < l2 { 1.0 } else { 0.0 };
    d_cw[0] = cw_right - cw_left;
    d_cw[2] = cw_right;
    let mut d_ch = [0.0f64; 4];
    let ch_bottom = if b1 > b2 { 1.0 } else { 0.0 };
    let ch_top = if t1 < t2 { 1.0 } else { 0.0 };
    d_ch[1] = ch_bottom - ch_top;
    d_ch[3] = ch_bottom;

    let d_a1 = [0.0, 0.0, p.h, p.w];

    let mut grad = [0.0f64; 4];
    for k in 0..4 {
        let d_inter = d_iw[k] * ih + iw * d_ih[k];
        let d_union = d_a1[k] - d_inter;
        let d_c = d_cw[k] * ch + cw * d_ch[k];
        let d_iou = if union > 0.0 {
            (d_inter * union - inter * d_union) / (union * union)
        } else {
            0.0
        };
        // giou = iou - 1 + union / c
        grad[k] = d_iou + (d_union * c - union * d_c) / (c * c);
    }
    Ok((giou, grad))
}

/// Set-prediction detection loss with a single foreground class.
///
/// Ground truths are matched to prediction slots by minimum-cost assignment
/// over `w_class * (-prob) + w_l1 * L1 + w_giou * (1 - GIoU)`. The loss sums
/// `w_class * CE(pig) + w_l1 * L1 + w_giou * (1 - GIoU)` over matched pairs
/// and `w_class * CE(background)` over the unmatched slots. Gradients treat
/// the matching as locally constant.
pub fn detection_loss(
    preds: &[DetPrediction],
    gts: &[BBox],
    cfg: &DetectionLossConfig,
) -> Result<LossValue<DetGrad>> {
    cfg.validate()?;
    if preds.is_empty() || gts.is_empty() {
        return Err(Error::EmptyInput("detection loss inputs"));
    }
    if preds.len() < gts.len() {
        return Err(Error::CountMismatch {
            expected: gts.len(),
            actual: preds.len(),
        });
    }
    for p in preds {
        if !(0.0..=1.0).contains(&p.prob) {
            return Err(Error::OutOfRange(format!(
                "class probability {} outside [0, 1]",
                p.prob
            )));
        }
    }

    let mut data = Vec::with_capacity(gts.len() * preds.len());
    for gt in gts {
        for pred in preds {
            let l1: f64 = (pred.bbox.x - gt.x).abs()
                + (pred.bbox.y - gt.y).abs()
                + (pred.bbox.w - gt.w).abs()
                + (pred.bbox.h - gt.h).abs();
            let (giou, _) = giou_with_grad(&pred.bbox, gt)?;
            data.push(cfg.w_class * (-pred.prob) + cfg.w_l1 * l1 + cfg.w_giou * (1.0 - giou));
        }
    }
    let cost = CostMatrix::new(gts.len(), preds.len(), data)?;
    let matching = hungarian_min(&cost)?;

    let mut class_term = 0.0;
    let mut l1_term = 0.0;
    let mut giou_term = 0.0;
    let mut d_prob = vec![0.0; preds.len()];
    let mut d_bbox = vec![[0.0f64; 4]; preds.len()];
    let mut matched_slot = vec![false; preds.len()];

    for &(gi, pi) in &matching.pairs {
        matched_slot[pi] = true;
        let pred = &preds[pi];
        let gt = &gts[gi];

        let (log_p, dlog_p) = clamped_log(pred.prob);
        class_term += cfg.w_class * (-log_p);
        d_prob[pi] += cfg.w_class * (-dlog_p);

        let deltas = [
            pred.bbox.x - gt.x,
            pred.bbox.y - gt.y,
            pred.bbox.w - gt.w,
            pred.bbox.h - gt.h,
        ];
        for (k, d) in deltas.iter().enumerate() {
            l1_term += cfg.w_l1 * d.abs();
            d_bbox[pi][k] += cfg.w_l1 * d.signum();
        }

        let (giou, d_giou) = giou_with_grad(&pred.bbox, gt)?;
        giou_term += cfg.w_giou * (1.0 - giou);
        for k in 0..4 {
            d_bbox[pi][k] += cfg.w_giou * (-d_giou[k]);
        }
    }

    for (pi, pred) in preds.iter().enumerate() {
        if !matched_slot[pi] {
            let (log_q, dlog_q) = clamped_log(1.0 - pred.prob);
            class_term += cfg.w_class * (-log_q);
            d_prob[pi] += cfg.w_class * dlog_q;
        }
    }

    Ok(LossValue {
        value: class_term + l1_term + giou_term,
        terms: vec![
            ("class", class_term),
            ("l1", l1_term),
            ("giou", giou_term),
        ],
        grad: DetGrad { d_prob, d_bbox },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> DetectionLossConfig {
        DetectionLossConfig::default()
    }

    #[test]
    fn perfect_predictions_give_zero_loss() {
        let gts = vec![BBox::new(0.1, 0.1, 0.2, 0.3), BBox::new(0.5, 0.4, 0.2, 0.2)];
        let preds: Vec<DetPrediction> = gts
            .iter()
            .map(|&bbox| DetPrediction { bbox, prob: 1.0 })
            .collect();
        let loss = detection_loss(&preds, &gts, &cfg()).unwrap();
        // CE at prob 1 hits the log clamp: bounded by -ln(1 - 1e-12) ~ 1e-12.
        assert!(loss.value < 1e-10, "loss {}", loss.value);
    }

    #[test]
    fn l1_term_is_four_delta_for_uniform_offset() {
        let delta = 0.03;
        let gt = BBox::new(0.2, 0.2, 0.3, 0.3);
        let pred = DetPrediction {
            bbox: BBox::new(gt.x + delta, gt.y + delta, gt.w + delta, gt.h + delta),
            prob: 0.9,
        };
        let loss = detection_loss(&[pred], &[gt], &cfg()).unwrap();
        let l1 = loss
            .terms
            .iter()
            .find(|(name, _)| *name == "l1")
            .map(|(_, v)| *v)
            .unwrap();
        assert!((l1 - cfg().w_l1 * 4.0 * delta).abs() < 1e-12);
    }

    #[test]
    fn invariant_under_prediction_permutation() {
        let gts = vec![
            BBox::new(0.1, 0.1, 0.2, 0.2),
            BBox::new(0.6, 0.2, 0.15, 0.25),
            BBox::new(0.3, 0.6, 0.2, 0.2),
        ];
        let preds = vec![
            DetPrediction { bbox: BBox::new(0.12, 0.09, 0.2, 0.21), prob: 0.95 },
            DetPrediction { bbox: BBox::new(0.58, 0.22, 0.16, 0.24), prob: 0.8 },
            DetPrediction { bbox: BBox::new(0.31, 0.62, 0.19, 0.18), prob: 0.7 },
            DetPrediction { bbox: BBox::new(0.9, 0.9, 0.05, 0.05), prob: 0.2 },
        ];
        let base = detection_loss(&preds, &gts, &cfg()).unwrap().value;
        let permuted = vec![preds[3], preds[1], preds[0], preds[2]];
        let perm = detection_loss(&permuted, &gts, &cfg()).unwrap().value;
        assert!((base - perm).abs() < 1e-12);
    }

    #[test]
    fn fewer_predictions_than_gts_rejected() {
        let gts = vec![BBox::new(0.0, 0.0, 0.1, 0.1), BBox::new(0.5, 0.5, 0.1, 0.1)];
        let preds = vec![DetPrediction { bbox: gts[0], prob: 0.9 }];
        assert!(detection_loss(&preds, &gts, &cfg()).is_err());
    }

    #[test]
    fn giou_gradient_matches_finite_differences() {
        let g = BBox::new(0.2, 0.25, 0.3, 0.35);
        let p = BBox::new(0.27, 0.19, 0.33, 0.31);
        let (_, grad) = giou_with_grad(&p, &g).unwrap();
        let h = 1e-6;
        for k in 0..4 {
            let mut lo = p;
            let mut hi = p;
            match k {
                0 => { lo.x -= h; hi.x += h; }
                1 => { lo.y -= h; hi.y += h; }
                2 => { lo.w -= h; hi.w += h; }
                _ => { lo.h -= h; hi.h += h; }
            }
            let f_lo = giou_with_grad(&lo, &g).unwrap().0;
            let f_hi = giou_with_grad(&hi, &g).unwrap().0;
            let numeric = (f_hi - f_lo) / (2.0 * h);
            assert!(
                (grad[k] - numeric).abs() < 1e-6,
                "coord {k}: analytic {} vs numeric {numeric}",
                grad[k]
            );
        }
    }

    #[test]
    fn giou_with_grad_matches_bbox_giou() {
        let a = BBox::new(0.0, 0.0, 1.0, 1.0);
        let b = BBox::new(2.0, 0.0, 1.0, 1.0);
        let (g, _) = giou_with_grad(&a, &b).unwrap();
        assert!((g - bbox_giou(&a, &b).unwrap()).abs() < 1e-15);
    }
}
