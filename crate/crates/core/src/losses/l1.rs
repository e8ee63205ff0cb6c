use super::features::FeatureExtractor;
use super::relevance::RelevanceMap;
use crate::error::{check_dims, Result};
use crate::grid::Grid;
use crate::image::RgbadImage;
use crate::planes::Planes;
use crate::scalar::Real;

/// Gradient with respect to the five RGBA-D channels of each predicted pixel.
pub type ChannelGrad<T> = Grid<[T; 5]>;

#[inline]
fn sign<T: Real>(v: T) -> T {
    if v > T::zero() {
        T::one()
    } else if v < T::zero() {
        -T::one()
    } else {
        T::zero()
    }
}

/// `mean_{p,c} gamma(p) |gt - pred|` over all pixels and the five channels,
/// with gradient `-gamma sign(gt - pred) / (5N)`.
pub fn completion_loss<T: Real>(
    gt: &RgbadImage<T>,
    pred: &RgbadImage<T>,
    gamma: &RelevanceMap<T>,
) -> Result<(T, ChannelGrad<T>)> {
    check_dims(gt.dims(), pred.dims())?;
    check_dims(gt.dims(), gamma.weights.dims())?;
    let (w, h) = gt.dims();
    let denom = T::of_usize(5 * w * h);
    let mut sum = T::zero();
    let mut grad = Grid::filled(w, h, [T::zero(); 5]);
    for y in 0..h {
        for x in 0..w {
            let (a, b) = (gt.pixel(x, y), pred.pixel(x, y));
            let g = *gamma.weights.get(x, y);
            let cell = grad.get_mut(x, y);
            for (c, out) in cell.iter_mut().enumerate() {
                let diff = a.channel(c) - b.channel(c);
                sum += g * diff.abs();
                *out = -g * sign(diff) / denom;
            }
        }
    }
    Ok((sum / denom, grad))
}

/// Unweighted completion loss used for auto-encoder training.
pub fn auto_loss<T: Real>(x: &RgbadImage<T>, x_hat: &RgbadImage<T>) -> Result<(T, ChannelGrad<T>)> {
    let (w, h) = x.dims();
    completion_loss(x, x_hat, &RelevanceMap::uniform(w, h, T::one()))
}

fn mean_abs<T: Real>(a: &[T], b: &[T]) -> (T, Vec<T>) {
    let n = T::of_usize(a.len());
    let mut sum = T::zero();
    let grad = a
        .iter()
        .zip(b)
        .map(|(&x, &y)| {
            let d = x - y;
            sum += d.abs();
            -sign(d) / n
        })
        .collect();
    (sum / n, grad)
}

/// Gradients of the reconstruction loss with respect to the predictions.
#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionGrad<T> {
    pub color: Planes<T>,
    pub depth: Grid<T>,
}

/// `mean|y_c - y_c_hat| + mean|y_d - y_d_hat|`.
pub fn reconstruction_loss<T: Real>(
    gt_color: &Planes<T>,
    pred_color: &Planes<T>,
    gt_depth: &Grid<T>,
    pred_depth: &Grid<T>,
) -> Result<(T, ReconstructionGrad<T>)> {
    gt_color.check_same_shape(pred_color)?;
    gt_depth.check_same_dims(pred_depth)?;
    check_dims(gt_color.dims(), gt_depth.dims())?;
    let (lc, gc) = mean_abs(gt_color.as_slice(), pred_color.as_slice());
    let (ld, gd) = mean_abs(gt_depth.as_slice(), pred_depth.as_slice());
    let grad = ReconstructionGrad {
        color: Planes::from_vec(pred_color.channels(), pred_color.width(), pred_color.height(), gc),
        depth: Grid::from_vec(pred_depth.width(), pred_depth.height(), gd),
    };
    Ok((lc + ld, grad))
}

/// `mean |phi(gt) - phi(pred)|` over feature pixels and channels.
pub fn perceptual_loss<T: Real>(
    gt_color: &Planes<T>,
    pred_color: &Planes<T>,
    phi: &dyn FeatureExtractor<T>,
) -> Result<T> {
    gt_color.check_same_shape(pred_color)?;
    let (fa, fb) = (phi.extract(gt_color), phi.extract(pred_color));
    fa.check_same_shape(&fb)?;
    let n = T::of_usize(fa.as_slice().len().max(1));
    let sum = fa
        .as_slice()
        .iter()
        .zip(fb.as_slice())
        .fold(T::zero(), |acc, (a, b)| acc + (*a - *b).abs());
    Ok(sum / n)
}
