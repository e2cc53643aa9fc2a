//! Binary instance masks and the run-length codec.
//!
//! Masks are stored one raster per instance, never as a shared label map:
//! instances in the same frame are allowed to overlap, so per-pixel
//! exclusivity cannot be assumed anywhere in this crate.
//!
//! The RLE convention is fixed so fixtures stay portable: the pixel grid is
//! scanned column-major (column by column, top to bottom within a column)
//! and the first run counts zeros, possibly zero of them, alternating
//! 0-runs and 1-runs thereafter.

use crate::error::{Error, Result};

/// Per-instance binary occupancy grid, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    width: u32,
    height: u32,
    bits: Vec<bool>,
}

impl Mask {
    /// All-zero mask of the given dimensions.
    pub fn zeros(width: u32, height: u32) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::DimensionMismatch(format!(
                "mask dimensions must be positive, got {width}x{height}"
            )));
        }
        Ok(Self {
            width,
            height,
            bits: vec![false; width as usize * height as usize],
        })
    }

    /// Build from a row-major bit vector; `bits.len()` must equal `width * height`.
    pub fn from_bits(width: u32, height: u32, bits: Vec<bool>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::DimensionMismatch(format!(
                "mask dimensions must be positive, got {width}x{height}"
            )));
        }
        if bits.len() != width as usize * height as usize {
            return Err(Error::DimensionMismatch(format!(
                "bit count {} does not equal {}x{}",
                bits.len(),
                width,
                height
            )));
        }
        Ok(Self {
            width,
            height,
            bits,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> bool {
        self.bits[y as usize * self.width as usize + x as usize]
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, value: bool) {
        self.bits[y as usize * self.width as usize + x as usize] = value;
    }

    /// Row-major bits.
    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Number of foreground pixels.
    pub fn area(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    /// Tight bounding box of the foreground, or `None` for an empty mask.
    pub fn tight_bbox(&self) -> Option<crate::bbox::BBox> {
        let (mut x0, mut y0) = (u32::MAX, u32::MAX);
        let (mut x1, mut y1) = (0u32, 0u32);
        let mut any = false;
        for y in 0..self.height {
            for x in 0..self.width {
                if self.get(x, y) {
                    any = true;
                    x0 = x0.min(x);
                    y0 = y0.min(y);
                    x1 = x1.max(x);
                    y1 = y1.max(y);
                }
            }
        }
        if !any {
            return None;
        }
        Some(crate::bbox::BBox::new(
            x0 as f64,
            y0 as f64,
            (x1 - x0 + 1) as f64,
            (y1 - y0 + 1) as f64,
        ))
    }
}

/// Mask IoU: |a ∩ b| / |a ∪ b|.
///
/// Both masks empty yields 0 by convention (an empty prediction never
/// matches anything). Errors when dimensions differ.
pub fn mask_iou(a: &Mask, b: &Mask) -> Result<f64> {
    if a.width != b.width || a.height != b.height {
        return Err(Error::DimensionMismatch(format!(
            "mask IoU on {}x{} vs {}x{}",
            a.width, a.height, b.width, b.height
        )));
    }
    let mut inter = 0usize;
    let mut union = 0usize;
    for (&pa, &pb) in a.bits.iter().zip(&b.bits) {
        if pa && pb {
            inter += 1;
        }
        if pa || pb {
            union += 1;
        }
    }
    if union == 0 {
        return Ok(0.0);
    }
    Ok(inter as f64 / union as f64)
}

/// Run-length encoding of a mask: column-major scan, first run counts zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rle {
    pub runs: Vec<u32>,
}

/// Encode a mask into RLE (column-major, zero-run first).
pub fn rle_encode(mask: &Mask) -> Rle {
    let mut runs = Vec::new();
    let mut current = false; // first run counts zeros
    let mut count = 0u32;
    for x in 0..mask.width {
        for y in 0..mask.height {
            let bit = mask.get(x, y);
            if bit == current {
                count += 1;
            } else {
                runs.push(count);
                current = bit;
                count = 1;
            }
        }
    }
    runs.push(count);
    Rle { runs }
}

/// Decode an RLE back into a `width` x `height` mask.
///
/// Errors when the run lengths do not sum to `width * height`.
pub fn rle_decode(rle: &Rle, width: u32, height: u32) -> Result<Mask> {
    let total: usize = rle.runs.iter().map(|&r| r as usize).sum();
    let expected = width as usize * height as usize;
    if total != expected {
        return Err(Error::MalformedRle {
            line: 0,
            expected,
            actual: total,
        });
    }
    let mut mask = Mask::zeros(width, height)?;
    let mut idx = 0usize;
    let mut value = false;
    for &run in &rle.runs {
        for _ in 0..run {
            if value {
                let x = (idx / height as usize) as u32;
                let y = (idx % height as usize) as u32;
                mask.set(x, y, true);
            }
            idx += 1;
        }
        value = !value;
    }
    Ok(mask)
}
