use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::grid::{Grid, Mask};
use crate::scalar::Real;

/// Side of the square structuring element for the visible band.
pub const DEFAULT_DILATION: usize = 31;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelevanceWeights {
    /// Visible object area and its dilated neighbourhood.
    pub visible: f64,
    /// Object pixels hidden in the input view.
    pub occluded: f64,
    pub background: f64,
}

impl Default for RelevanceWeights {
    fn default() -> Self {
        Self {
            visible: 0.7,
            occluded: 1.5,
            background: 0.2,
        }
    }
}

/// Per-pixel loss weight gamma.
#[derive(Debug, Clone, PartialEq)]
pub struct RelevanceMap<T> {
    pub weights: Grid<T>,
}

impl<T: Real> RelevanceMap<T> {
    pub fn uniform(width: usize, height: usize, value: T) -> Self {
        Self {
            weights: Grid::filled(width, height, value),
        }
    }

    pub fn scaled(&self, k: T) -> Self {
        Self {
            weights: self.weights.map(|&w| w * k),
        }
    }
}

/// Occluded (`gt \ visible`) pixels get `occluded`; the visible mask dilated by
/// a `dilation`-sided square gets `visible` except where occluded; the rest
/// gets `background`.
pub fn relevance_map<T: Real>(
    gt_mask: &Mask,
    visible_mask: &Mask,
    dilation: usize,
    weights: &RelevanceWeights,
) -> Result<RelevanceMap<T>> {
    gt_mask.check_same_dims(visible_mask)?;
    let occluded = gt_mask.and_not(visible_mask)?;
    let band = visible_mask.dilate_square(dilation);
    let (wo, wv, wb) = (
        T::of(weights.occluded),
        T::of(weights.visible),
        T::of(weights.background),
    );
    let data = occluded
        .as_slice()
        .iter()
        .zip(band.as_slice())
        .map(|(&o, &b)| if o { wo } else if b { wv } else { wb })
        .collect();
    Ok(RelevanceMap {
        weights: Grid::from_vec(gt_mask.width(), gt_mask.height(), data),
    })
}
