use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::generate::DetectionNoise;
use crate::error::{Error, Result};
use crate::grid::{Grid, Mask};
use crate::layers::LayerStack;
use crate::scalar::Real;

/// Simulated detector output for one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Detection<T> {
    pub confidence_mask: Grid<T>,
    pub class_scores: Vec<T>,
}

/// Mean over the in-bounds part of a `(2r+1)^2` window.
fn box_blur<T: Real>(src: &Grid<T>, radius: usize) -> Grid<T> {
    if radius == 0 {
        return src.clone();
    }
    let (w, h) = src.dims();
    let r = radius as isize;
    Grid::from_fn(w, h, |x, y| {
        let mut sum = T::zero();
        let mut n = 0usize;
        for yy in (y as isize - r).max(0)..=(y as isize + r).min(h as isize - 1) {
            for xx in (x as isize - r).max(0)..=(x as isize + r).min(w as isize - 1) {
                sum += *src.get(xx as usize, yy as usize);
                n += 1;
            }
        }
        sum / T::of_usize(n)
    })
}

fn perturb_mask(mask: &Mask, radius: i32) -> Mask {
    let side = 2 * radius.unsigned_abs() as usize + 1;
    match radius.signum() {
        1 => mask.dilate_square(side),
        -1 => mask.erode_square(side),
        _ => mask.clone(),
    }
}

/// Perturbs each visibility mask by a seeded erosion or dilation, blurs it and
/// smooths the one-hot class vector: `(1 - s) * onehot + s / K`.
pub fn simulate_detections<T: Real>(
    stack: &LayerStack<T>,
    noise: &DetectionNoise,
    num_classes: usize,
    seed: u64,
) -> Result<Vec<Detection<T>>> {
    if noise.radius_min > noise.radius_max || !(0.0..=1.0).contains(&noise.smoothing) {
        return Err(Error::Config("degenerate detection noise".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = T::of(noise.smoothing);
    let k = T::of_usize(num_classes);
    stack
        .instances
        .iter()
        .map(|inst| {
            let radius = rng.gen_range(noise.radius_min..=noise.radius_max);
            let m = perturb_mask(&inst.visibility_mask, radius);
            let soft = m.map(|&b| if b { T::one() } else { T::zero() });
            let confidence_mask = box_blur(&soft, noise.blur_radius)
                .map(|v| v.max(T::zero()).min(T::one()));
            if inst.class_id as usize >= num_classes {
                return Err(Error::Config(format!("class id {} not in table", inst.class_id)));
            }
            let class_scores = (0..num_classes)
                .map(|c| {
                    let onehot = if c == inst.class_id as usize { T::one() } else { T::zero() };
                    (T::one() - s) * onehot + s / k
                })
                .collect();
            Ok(Detection {
                confidence_mask,
                class_scores,
            })
        })
        .collect()
}

/// Copies detections into the stack's instance layers.
pub fn apply_detections<T: Real>(stack: &LayerStack<T>, detections: &[Detection<T>]) -> Result<LayerStack<T>> {
    if detections.len() != stack.instances.len() {
        return Err(Error::Config(format!(
            "{} detections for {} instances",
            detections.len(),
            stack.instances.len()
        )));
    }
    let mut out = stack.clone();
    for (inst, det) in out.instances.iter_mut().zip(detections) {
        inst.confidence_mask.check_same_dims(&det.confidence_mask)?;
        inst.confidence_mask = det.confidence_mask.clone();
        inst.class_scores = det.class_scores.clone();
    }
    Ok(out)
}
