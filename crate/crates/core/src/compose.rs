//! Minimum depth pooling and the depth-displacement re-composition terms.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{Grid, Mask};
use crate::image::{Rgbad, RgbadImage};
use crate::layers::LayerStack;
use crate::scalar::Real;

/// Alpha a layer must reach at a pixel to take part in pooling.
pub const DEFAULT_ALPHA_MIN: f64 = 0.5;

/// Pooled first layer and the per-pixel index of the layer it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct ComposeResult<T> {
    pub image: RgbadImage<T>,
    /// `None` where no layer is present.
    pub index_map: Grid<Option<usize>>,
}

/// Per-pixel depth prior (e.g. a monocular prediction of the first layer).
#[derive(Debug, Clone, PartialEq)]
pub struct DepthPrior<T> {
    pub depth: Grid<T>,
    pub valid: Mask,
}

/// Picks, at each pixel, the present layer with the smallest depth. Ties go to
/// the smaller layer index; the layout is last.
pub fn min_depth_pool<T: Real>(stack: &LayerStack<T>, alpha_min: T) -> Result<ComposeResult<T>> {
    stack.check_dims()?;
    let (w, h) = stack.dims();
    let n = stack.num_layers();
    type Row<T> = Vec<(Option<Rgbad<T>>, Option<usize>)>;
    let rows: Vec<Row<T>> = (0..h)
        .into_par_iter()
        .map(|y| {
            (0..w)
                .map(|x| {
                    let mut best: Option<(usize, Rgbad<T>)> = None;
                    for l in 0..n {
                        let Some(p) = stack.layer_image(l).sample(x, y) else {
                            continue;
                        };
                        if p.rgba[3] < alpha_min {
                            continue;
                        }
                        if best.is_none_or(|(_, b)| p.depth < b.depth) {
                            best = Some((l, *p));
                        }
                    }
                    (best.map(|b| b.1), best.map(|b| b.0))
                })
                .collect()
        })
        .collect();
    let mut pixels = Vec::with_capacity(w * h);
    let mut index = Vec::with_capacity(w * h);
    for (p, i) in rows.into_iter().flatten() {
        pixels.push(p);
        index.push(i);
    }
    Ok(ComposeResult {
        image: RgbadImage::from_pixels(w, h, pixels),
        index_map: Grid::from_vec(w, h, index),
    })
}

/// `m_l`: pixels whose pooled value came from layer `layer_index`.
pub fn front_mask<T>(result: &ComposeResult<T>, layer_index: usize) -> Mask {
    result.index_map.map(|i| *i == Some(layer_index))
}

fn masked_sum<T: Real>(mask: &Mask, values: &Grid<T>) -> T {
    // Row-major accumulation keeps the reduction order fixed.
    mask.as_slice()
        .iter()
        .zip(values.as_slice())
        .filter(|(m, _)| **m)
        .fold(T::zero(), |acc, (_, v)| acc + *v)
}

/// `delta = mean_m(gt) - mean_m(pred)`.
pub fn depth_displacement<T: Real>(mask: &Mask, gt_depth: &Grid<T>, pred_depth: &Grid<T>) -> Result<T> {
    mask.check_same_dims(gt_depth)?;
    mask.check_same_dims(pred_depth)?;
    let n = mask.count();
    if n == 0 {
        return Err(Error::EmptyMask);
    }
    let n = T::of_usize(n);
    Ok(masked_sum(mask, gt_depth) / n - masked_sum(mask, pred_depth) / n)
}

/// Result of shifting a layer's depth.
#[derive(Debug, Clone, PartialEq)]
pub struct Displaced<T> {
    pub depth: Grid<T>,
    /// Valid pixels that would have gone negative and were clamped to zero.
    pub clamped: usize,
}

/// Adds `delta` on valid pixels, clamping at zero.
pub fn apply_displacement<T: Real>(depth: &Grid<T>, valid: &Mask, delta: T) -> Result<Displaced<T>> {
    depth.check_same_dims(valid)?;
    let mut clamped = 0;
    let out = depth
        .as_slice()
        .iter()
        .zip(valid.as_slice())
        .map(|(&d, &v)| {
            if !v {
                return d;
            }
            let s = d + delta;
            if s < T::zero() {
                clamped += 1;
                T::zero()
            } else {
                s
            }
        })
        .collect();
    Ok(Displaced {
        depth: Grid::from_vec(depth.width(), depth.height(), out),
        clamped,
    })
}

/// Shifts a whole layer by the displacement measured on its front region.
pub fn displace_layer<T: Real>(
    layer: &RgbadImage<T>,
    front: &Mask,
    prior: &DepthPrior<T>,
) -> Result<(RgbadImage<T>, T, usize)> {
    let region = front.and(&prior.valid)?;
    let delta = depth_displacement(&region, &prior.depth, &layer.depth_grid())?;
    let shifted = apply_displacement(&layer.depth_grid(), layer.valid_mask(), delta)?;
    // Clamped pixels would violate depth > 0 and drop out of the layer.
    let mut img = layer.with_depth(&shifted.depth)?;
    for y in 0..img.height() {
        for x in 0..img.width() {
            if img.is_valid(x, y) && img.depth(x, y) <= T::zero() {
                img.clear(x, y);
            }
        }
    }
    Ok((img, delta, shifted.clamped))
}

/// Mean absolute depth difference over `valid`.
pub fn recompose_loss<T: Real>(target: &Grid<T>, refined: &Grid<T>, valid: &Mask) -> Result<T> {
    target.check_same_dims(refined)?;
    target.check_same_dims(valid)?;
    let n = valid.count();
    if n == 0 {
        return Err(Error::EmptyMask);
    }
    let sum = valid
        .as_slice()
        .iter()
        .zip(target.as_slice().iter().zip(refined.as_slice()))
        .filter(|(m, _)| **m)
        .fold(T::zero(), |acc, (_, (a, b))| acc + (*a - *b).abs());
    Ok(sum / T::of_usize(n))
}
