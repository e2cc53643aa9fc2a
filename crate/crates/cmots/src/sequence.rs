//! Frame and sequence records shared by the tracker, metrics and simulator.

use crate::bbox::BBox;
use crate::embedding::Embedding;
use crate::error::{Error, Result};
use crate::mask::Mask;

/// One observed (or predicted) animal instance in a frame.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceRecord {
    /// Ground-truth identity, or prediction slot index for raw detections.
    pub instance_id: u32,
    pub mask: Mask,
    pub bbox: BBox,
    pub embedding: Embedding,
    /// Binary activity label: active (standing) = true, inactive = false.
    pub action: bool,
    /// Probability of being active, in [0, 1].
    pub action_score: f64,
    /// Detection confidence, in [0, 1].
    pub det_score: f64,
}

impl InstanceRecord {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.action_score) {
            return Err(Error::OutOfRange(format!(
                "action_score {} outside [0, 1]",
                self.action_score
            )));
        }
        if !(0.0..=1.0).contains(&self.det_score) {
            return Err(Error::OutOfRange(format!(
                "det_score {} outside [0, 1]",
                self.det_score
            )));
        }
        Ok(())
    }
}

/// One video frame: all instances observed at `frame_index`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameRecord {
    pub frame_index: u64,
    pub instances: Vec<InstanceRecord>,
}

impl FrameRecord {
    /// Instance ids must be unique within a frame.
    pub fn validate(&self) -> Result<()> {
        let mut ids: Vec<u32> = self.instances.iter().map(|i| i.instance_id).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidConfig(format!(
                "duplicate instance id in frame {}",
                self.frame_index
            )));
        }
        for inst in &self.instances {
            inst.validate()?;
        }
        Ok(())
    }

    pub fn instance_by_id(&self, id: u32) -> Option<&InstanceRecord> {
        self.instances.iter().find(|i| i.instance_id == id)
    }
}

/// Sequence-level metadata carried in file headers.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceMeta {
    /// Fixed population size N.
    pub n: usize,
    pub fps: f64,
    pub width: u32,
    pub height: u32,
    pub embed_dim: usize,
}

/// A full video: metadata plus per-frame records.
///
/// Ground-truth sequences keep exactly `meta.n` instances in every frame
/// (no animal leaves or enters the scene); prediction sequences may deviate
/// per frame after drops or duplications.
#[derive(Debug, Clone, PartialEq)]
pub struct VideoSequence {
    pub meta: SequenceMeta,
    pub frames: Vec<FrameRecord>,
}

impl VideoSequence {
    /// Structural validation: strictly increasing frame indices, unique ids,
    /// consistent embedding dimension, masks matching the frame dimensions.
    pub fn validate(&self) -> Result<()> {
        for w in self.frames.windows(2) {
            if w[1].frame_index <= w[0].frame_index {
                return Err(Error::InvalidConfig(format!(
                    "frame indices not strictly increasing at {}",
                    w[1].frame_index
                )));
            }
        }
        for frame in &self.frames {
            frame.validate()?;
            for inst in &frame.instances {
                if inst.embedding.dim() != self.meta.embed_dim {
                    return Err(Error::EmbeddingDim {
                        line: 0,
                        expected: self.meta.embed_dim,
                        actual: inst.embedding.dim(),
                    });
                }
                if inst.mask.width() != self.meta.width || inst.mask.height() != self.meta.height {
                    return Err(Error::DimensionMismatch(format!(
                        "mask {}x{} in a {}x{} sequence",
                        inst.mask.width(),
                        inst.mask.height(),
                        self.meta.width,
                        self.meta.height
                    )));
                }
            }
        }
        Ok(())
    }

    /// Additionally require the fixed-population invariant of ground truth.
    pub fn validate_ground_truth(&self) -> Result<()> {
        self.validate()?;
        for frame in &self.frames {
            if frame.instances.len() != self.meta.n {
                return Err(Error::CountMismatch {
                    expected: self.meta.n,
                    actual: frame.instances.len(),
                });
            }
        }
        Ok(())
    }
}
