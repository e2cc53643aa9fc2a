//! Axis-aligned bounding boxes, IoU and generalised IoU.

use crate::error::{Error, Result};

/// Top-left corner plus extents, in pixels (or normalized units).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BBox {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl BBox {
    pub fn new(x: f64, y: f64, w: f64, h: f64) -> Self {
        Self { x, y, w, h }
    }

    pub fn area(&self) -> f64 {
        self.w * self.h
    }

    fn right(&self) -> f64 {
        self.x + self.w
    }

    fn bottom(&self) -> f64 {
        self.y + self.h
    }
}

fn intersection_area(a: &BBox, b: &BBox) -> f64 {
    let iw = (a.right().min(b.right()) - a.x.max(b.x)).max(0.0);
    let ih = (a.bottom().min(b.bottom()) - a.y.max(b.y)).max(0.0);
    iw * ih
}

/// Rectangle IoU; 0 when the union is degenerate (both boxes zero-area).
pub fn bbox_iou(a: &BBox, b: &BBox) -> f64 {
    let inter = intersection_area(a, b);
    let union = a.area() + b.area() - inter;
    if union <= 0.0 {
        return 0.0;
    }
    inter / union
}

/// Generalised IoU: IoU(a, b) - |C \ (a ∪ b)| / |C| with C the smallest
/// enclosing box. Ranges over [-1, 1]; errors when both boxes are degenerate
/// (the enclosing box has zero area).
pub fn bbox_giou(a: &BBox, b: &BBox) -> Result<f64> {
    let cw = a.right().max(b.right()) - a.x.min(b.x);
    let ch = a.bottom().max(b.bottom()) - a.y.min(b.y);
    let enclosing = cw * ch;
    if enclosing <= 0.0 {
        return Err(Error::OutOfRange(
            "GIoU of two degenerate boxes is undefined".into(),
        ));
    }
    let inter = intersection_area(a, b);
    let union = a.area() + b.area() - inter;
    let iou = if union > 0.0 { inter / union } else { 0.0 };
    Ok(iou - (enclosing - union) / enclosing)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn iou_identical_box() {
        let b = BBox::new(1.0, 2.0, 3.0, 4.0);
        assert_eq!(bbox_iou(&b, &b), 1.0);
    }

    #[test]
    fn iou_disjoint() {
        let a = BBox::new(0.0, 0.0, 1.0, 1.0);
        let b = BBox::new(5.0, 5.0, 1.0, 1.0);
        assert_eq!(bbox_iou(&a, &b), 0.0);
    }

    #[test]
    fn iou_offset_squares() {
        // (0,0,2,2) vs (1,1,2,2): intersection 1, union 7 by area arithmetic.
        let a = BBox::new(0.0, 0.0, 2.0, 2.0);
        let b = BBox::new(1.0, 1.0, 2.0, 2.0);
        let inter = 1.0;
        let union = a.area() + b.area() - inter;
        assert_eq!(union, 7.0);
        assert!((bbox_iou(&a, &b) - 1.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn giou_identical_box() {
        let b = BBox::new(0.0, 0.0, 2.0, 3.0);
        assert_eq!(bbox_giou(&b, &b).unwrap(), 1.0);
    }

    #[test]
    fn giou_separated_unit_boxes() {
        // (0,0,1,1) vs (2,0,1,1): IoU 0, enclosing area 3, union 2 -> -1/3.
        let a = BBox::new(0.0, 0.0, 1.0, 1.0);
        let b = BBox::new(2.0, 0.0, 1.0, 1.0);
        let g = bbox_giou(&a, &b).unwrap();
        assert!((g - (-1.0 / 3.0)).abs() < 1e-15);
    }

    #[test]
    fn giou_limit_is_minus_one() {
        let a = BBox::new(0.0, 0.0, 1.0, 1.0);
        let b = BBox::new(1000.0, 0.0, 1.0, 1.0);
        assert!(bbox_giou(&a, &b).unwrap() < -0.99);
    }

    #[test]
    fn giou_degenerate_errors() {
        let a = BBox::new(1.0, 1.0, 0.0, 0.0);
        assert!(bbox_giou(&a, &a).is_err());
    }

    #[test]
    fn giou_never_exceeds_iou() {
        let cases = [
            (BBox::new(0.0, 0.0, 2.0, 2.0), BBox::new(1.0, 1.0, 2.0, 2.0)),
            (BBox::new(0.0, 0.0, 1.0, 1.0), BBox::new(3.0, 3.0, 2.0, 2.0)),
            (BBox::new(0.0, 0.0, 4.0, 4.0), BBox::new(1.0, 1.0, 1.0, 1.0)),
        ];
        for (a, b) in cases {
            assert!(bbox_giou(&a, &b).unwrap() <= bbox_iou(&a, &b) + 1e-15);
        }
    }
}
