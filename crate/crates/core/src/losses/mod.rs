//! Object-completion, layout and adversarial loss terms as exact scalar
//! evaluators, with subgradients for the L1 terms.
//!
//! All L1 norms are per-element means so values are comparable across image
//! sizes.

mod features;
mod l1;
mod matching;
mod relevance;

pub use features::{FeatureExtractor, KernelBank};
pub use l1::{
    auto_loss, completion_loss, perceptual_loss, reconstruction_loss, ChannelGrad,
    ReconstructionGrad,
};
pub use matching::{iou, iou_match, iou_match_scored, MaskMatch, MIN_MATCH_IOU};
pub use relevance::{relevance_map, RelevanceMap, RelevanceWeights, DEFAULT_DILATION};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Clamp applied to discriminator scores before taking logs.
pub const ADVERSARIAL_EPS: f64 = 1e-7;

/// `mean log D(real) + mean log(1 - D(fake))` with scores clamped to `[eps, 1 - eps]`.
pub fn adversarial_value<T: Real>(d_real: &[T], d_fake: &[T]) -> Result<T> {
    if d_real.is_empty() || d_fake.is_empty() {
        return Err(Error::EmptyInput("discriminator scores"));
    }
    let eps = T::of(ADVERSARIAL_EPS);
    let clamp = |v: T| v.max(eps).min(T::one() - eps);
    let mean_log = |it: &mut dyn Iterator<Item = T>, n: usize| {
        it.fold(T::zero(), |acc, v| acc + clamp(v).ln()) / T::of_usize(n)
    };
    let real = mean_log(&mut d_real.iter().copied(), d_real.len());
    let fake = mean_log(&mut d_fake.iter().map(|&v| T::one() - v), d_fake.len());
    Ok(real + fake)
}

/// Weights of the reconstruction and perceptual layout terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossWeights {
    pub reconstruction: f64,
    pub perceptual: f64,
}

impl Default for LossWeights {
    fn default() -> Self {
        Self {
            reconstruction: 100.0,
            perceptual: 25.0,
        }
    }
}

impl LossWeights {
    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v >= 0.0;
        if ok(self.reconstruction) && ok(self.perceptual) {
            Ok(())
        } else {
            Err(Error::Config("loss weights must be finite and >= 0".into()))
        }
    }
}

/// Per-term values and the weighted layout total.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossBreakdown {
    pub reconstruction: f64,
    pub perceptual: f64,
    /// `None` when the adversarial term is disabled.
    pub adversarial: Option<f64>,
    pub total: f64,
}

impl LossBreakdown {
    /// Term name to value, for JSON reports.
    pub fn to_record(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("plain struct serializes")
    }
}

/// `lambda_r * L_r + lambda_p * L_p + L_a`, the last term optional.
pub fn layout_loss<T: Real>(
    reconstruction: T,
    perceptual: T,
    adversarial: Option<T>,
    weights: &LossWeights,
) -> Result<LossBreakdown> {
    weights.validate()?;
    let (r, p) = (reconstruction.to64(), perceptual.to64());
    let a = adversarial.map(Real::to64);
    let total = weights.reconstruction * r + weights.perceptual * p + a.unwrap_or(0.0);
    Ok(LossBreakdown {
        reconstruction: r,
        perceptual: p,
        adversarial: a,
        total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adversarial_half_scores() {
        let v = adversarial_value(&[0.5f64; 4], &[0.5; 3]).unwrap();
        assert!((v - 2.0 * 0.5f64.ln()).abs() < 1e-15);
        assert!((v + 1.3863).abs() < 1e-4);
    }

    #[test]
    fn adversarial_optimum_is_near_zero() {
        let v = adversarial_value(&[1.0f64], &[0.0]).unwrap();
        assert!((v - 2.0 * (1.0 - ADVERSARIAL_EPS).ln()).abs() < 1e-15);
        assert!(v <= 0.0 && v > -1e-6);
        assert!(adversarial_value::<f64>(&[], &[0.5]).is_err());
    }

    #[test]
    fn layout_loss_default_weights() {
        let b = layout_loss(0.1f64, 0.04, None, &LossWeights::default()).unwrap();
        assert!((b.total - 11.0).abs() < 1e-12);
        let rec = b.to_record();
        assert_eq!(rec["adversarial"], serde_json::Value::Null);
    }

    #[test]
    fn layout_loss_adversarial_difference() {
        let w = LossWeights::default();
        let off = layout_loss(0.2f64, 0.3, None, &w).unwrap();
        let on = layout_loss(0.2f64, 0.3, Some(-1.25), &w).unwrap();
        assert_eq!(on.total - off.total, -1.25);
        assert!(layout_loss(0.0f64, 0.0, None, &LossWeights { reconstruction: -1.0, perceptual: 0.0 }).is_err());
    }
}
