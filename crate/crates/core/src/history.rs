use serde::{Deserialize, Serialize};

use crate::mesh::Mesh;
use crate::quality::QualitySummary;

/// State of the mesh after one smoothing iteration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iter: usize,
    pub quality: QualitySummary,
    /// Largest node displacement of this iteration.
    pub max_disp: f64,
    /// Surface only: moves rejected because they inverted a face.
    pub inversions_recovered: usize,
    /// Surface only: relocations with no hit on the original surface.
    pub projection_misses: usize,
}

impl IterationRecord {
    pub fn baseline(quality: QualitySummary) -> IterationRecord {
        IterationRecord {
            iter: 0,
            quality,
            max_disp: 0.0,
            inversions_recovered: 0,
            projection_misses: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SmoothResult {
    pub mesh: Mesh,
    pub iterations: usize,
    pub converged: bool,
    /// Quality of the input mesh.
    pub initial: QualitySummary,
    /// One record per iteration; `history.len() == iterations`.
    pub history: Vec<IterationRecord>,
    /// Elements left inverted by a planar run (never populated for surfaces).
    pub inverted_elements: Vec<usize>,
}

impl SmoothResult {
    pub fn final_quality(&self) -> QualitySummary {
        self.history.last().map_or(self.initial, |r| r.quality)
    }
}
