//! Evaluation protocol: masked MPE/RMSE, SSIM, per-layer scores with the
//! migration rule, and the layer-frequency histogram.
//!
//! Colour errors are reported on the 0-255 scale, depth errors in metres.
//! Colour metrics are computed per RGB channel and then averaged.

use serde::{Deserialize, Serialize};

use crate::error::{check_dims, Error, Result};
use crate::grid::Mask;
use crate::image::RgbadImage;
use crate::ldi::{Ldi, LdiSample};
use crate::planes::Planes;
use crate::scalar::Real;

/// A rank-`l` ground-truth sample counts as novel content when it lies this
/// far (metres) behind rank `l - 1`.
pub const NOVEL_DEPTH_EPS: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quantity {
    Color,
    Depth,
}

/// MPE and RMSE over one pixel set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorPair {
    pub mpe: f64,
    pub rmse: f64,
}

fn channels(quantity: Quantity) -> &'static [(usize, f64)] {
    match quantity {
        Quantity::Color => &[(0, 255.0), (1, 255.0), (2, 255.0)],
        Quantity::Depth => &[(4, 1.0)],
    }
}

/// MPE and RMSE of `a` against `b` over `mask`, per channel then averaged.
pub fn masked_errors<T: Real>(
    a: &RgbadImage<T>,
    b: &RgbadImage<T>,
    mask: &Mask,
    quantity: Quantity,
) -> Result<ErrorPair> {
    check_dims(a.dims(), b.dims())?;
    check_dims(a.dims(), mask.dims())?;
    let n = mask.count();
    if n == 0 {
        return Err(Error::EmptyMask);
    }
    let chans = channels(quantity);
    let (mut mpe, mut rmse) = (0.0, 0.0);
    for &(c, scale) in chans {
        let (mut abs, mut sq) = (0.0, 0.0);
        for (i, &m) in mask.as_slice().iter().enumerate() {
            if !m {
                continue;
            }
            let pa = &a.pixels().as_slice()[i];
            let pb = &b.pixels().as_slice()[i];
            let d = (pa.channel(c).to64() - pb.channel(c).to64()) * scale;
            abs += d.abs();
            sq += d * d;
        }
        mpe += abs / n as f64;
        rmse += (sq / n as f64).sqrt();
    }
    let k = chans.len() as f64;
    Ok(ErrorPair {
        mpe: mpe / k,
        rmse: rmse / k,
    })
}

pub fn mpe<T: Real>(a: &RgbadImage<T>, b: &RgbadImage<T>, mask: &Mask, q: Quantity) -> Result<f64> {
    Ok(masked_errors(a, b, mask, q)?.mpe)
}

pub fn rmse<T: Real>(a: &RgbadImage<T>, b: &RgbadImage<T>, mask: &Mask, q: Quantity) -> Result<f64> {
    Ok(masked_errors(a, b, mask, q)?.rmse)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SsimParams {
    /// Side of the uniform square window.
    pub window: usize,
    pub k1: f64,
    pub k2: f64,
    pub data_range: f64,
}

impl Default for SsimParams {
    fn default() -> Self {
        Self {
            window: 8,
            k1: 0.01,
            k2: 0.03,
            data_range: 255.0,
        }
    }
}

/// Mean local SSIM over every window position (stride 1), averaged over
/// channels. Inputs are in `[0, 1]` and scaled by `data_range`.
pub fn ssim<T: Real>(a: &Planes<T>, b: &Planes<T>, params: &SsimParams) -> Result<f64> {
    a.check_same_shape(b)?;
    let (w, h) = a.dims();
    let win = params.window;
    if win == 0 || w < win || h < win {
        return Err(Error::TooSmall {
            width: w,
            height: h,
            window: win,
        });
    }
    let c1 = (params.k1 * params.data_range).powi(2);
    let c2 = (params.k2 * params.data_range).powi(2);
    let area = (win * win) as f64;
    let r = params.data_range;
    let mut total = 0.0;
    for c in 0..a.channels() {
        let mut acc = 0.0;
        for y0 in 0..=h - win {
            for x0 in 0..=w - win {
                let (mut sa, mut sb, mut saa, mut sbb, mut sab) = (0.0, 0.0, 0.0, 0.0, 0.0);
                for y in y0..y0 + win {
                    for x in x0..x0 + win {
                        let va = a.get(c, x, y).to64() * r;
                        let vb = b.get(c, x, y).to64() * r;
                        sa += va;
                        sb += vb;
                        saa += va * va;
                        sbb += vb * vb;
                        sab += va * vb;
                    }
                }
                let (ma, mb) = (sa / area, sb / area);
                let va = saa / area - ma * ma;
                let vb = sbb / area - mb * mb;
                let cov = sab / area - ma * mb;
                let num = (2.0 * (ma * mb) + c1) * (2.0 * cov + c2);
                let den = (ma * ma + mb * mb + c1) * (va + vb + c2);
                acc += num / den;
            }
        }
        total += acc / ((w - win + 1) * (h - win + 1)) as f64;
    }
    Ok(total / a.channels() as f64)
}

/// SSIM of the RGB channels of two RGBA-D rasters.
pub fn ssim_rgb<T: Real>(a: &RgbadImage<T>, b: &RgbadImage<T>, params: &SsimParams) -> Result<f64> {
    ssim(&Planes::rgb_of(a), &Planes::rgb_of(b), params)
}

/// Scores of one LDI layer; absent when no pixel is evaluable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LayerEval {
    /// 1-based layer number.
    pub layer: usize,
    pub pixels: usize,
    pub color: Option<ErrorPair>,
    pub depth: Option<ErrorPair>,
}

fn effective_sample<T: Real>(samples: &[LdiSample<T>], rank: usize) -> Option<&LdiSample<T>> {
    // Migration: missing rank l falls back to the deepest available rank.
    samples.get(rank).or_else(|| samples.last())
}

/// Pixels and rasters compared at layer `l` (1-based).
pub fn layer_eval_inputs<T: Real>(
    pred: &Ldi<T>,
    gt: &Ldi<T>,
    layer: usize,
) -> Result<(RgbadImage<T>, RgbadImage<T>, Mask)> {
    check_dims(gt.dims(), pred.dims())?;
    assert!(layer >= 1, "layers are 1-based");
    let rank = layer - 1;
    let (w, h) = gt.dims();
    let eps = T::of(NOVEL_DEPTH_EPS);
    let mask = Mask::from_fn(w, h, |x, y| {
        let s = gt.samples_at(x, y);
        match (rank, s.get(rank)) {
            (_, None) => false,
            (0, Some(_)) => true,
            (_, Some(cur)) => cur.depth - s[rank - 1].depth > eps,
        }
    });
    let gt_img = RgbadImage::from_fn(w, h, |x, y| gt.samples_at(x, y).get(rank).map(LdiSample::rgbad));
    let pred_img = RgbadImage::from_fn(w, h, |x, y| {
        effective_sample(pred.samples_at(x, y), rank).map(LdiSample::rgbad)
    });
    Ok((pred_img, gt_img, mask))
}

/// Per-layer colour and depth errors under the migration rule: a predicted
/// pixel without a rank-`l` sample reuses its deepest sample, and layer `l`
/// is scored only where ground truth reveals new content at rank `l`.
pub fn per_layer_eval<T: Real>(pred: &Ldi<T>, gt: &Ldi<T>, max_layers: usize) -> Result<Vec<LayerEval>> {
    check_dims(gt.dims(), pred.dims())?;
    let mut out = Vec::with_capacity(max_layers);
    for layer in 1..=max_layers {
        let (p, g, mask) = layer_eval_inputs(pred, gt, layer)?;
        let pixels = mask.count();
        let (color, depth) = if pixels == 0 {
            (None, None)
        } else {
            (
                Some(masked_errors(&p, &g, &mask, Quantity::Color)?),
                Some(masked_errors(&p, &g, &mask, Quantity::Depth)?),
            )
        };
        out.push(LayerEval {
            layer,
            pixels,
            color,
            depth,
        });
    }
    Ok(out)
}

/// Entry `l - 1` is the fraction of LDIs that have at least one pixel with
/// `l` or more samples.
pub fn layer_histogram<T: Real>(ldis: &[Ldi<T>]) -> Vec<f64> {
    let maxes: Vec<usize> = ldis.iter().map(Ldi::max_depth_complexity).collect();
    let top = maxes.iter().copied().max().unwrap_or(0);
    let n = ldis.len() as f64;
    (1..=top)
        .map(|l| maxes.iter().filter(|&&m| m >= l).count() as f64 / n)
        .collect()
}
