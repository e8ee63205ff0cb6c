use std::cmp::Ordering;

use crate::error::{check_dims, Result};
use crate::grid::Mask;

/// Matches below this IoU are discarded.
pub const MIN_MATCH_IOU: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaskMatch {
    pub gt: usize,
    pub pred: usize,
    pub iou: f64,
}

/// Intersection over union; two empty masks have IoU 0.
pub fn iou(a: &Mask, b: &Mask) -> Result<f64> {
    a.check_same_dims(b)?;
    let (mut inter, mut union) = (0usize, 0usize);
    for (&x, &y) in a.as_slice().iter().zip(b.as_slice()) {
        inter += (x && y) as usize;
        union += (x || y) as usize;
    }
    Ok(if union == 0 { 0.0 } else { inter as f64 / union as f64 })
}

/// Greedy one-to-one matching by descending IoU, dropping pairs below `min_iou`.
/// Equal IoUs are ordered by gt index, then by mask content, so the result
/// does not depend on the order of `pred`.
pub fn iou_match_scored(pred: &[Mask], gt: &[Mask], min_iou: f64) -> Result<Vec<MaskMatch>> {
    let dims = gt.first().or(pred.first()).map(|m| m.dims());
    if let Some(d) = dims {
        for m in pred.iter().chain(gt) {
            check_dims(d, m.dims())?;
        }
    }
    let mut cands = Vec::new();
    for (g, gm) in gt.iter().enumerate() {
        for (p, pm) in pred.iter().enumerate() {
            let v = iou(gm, pm)?;
            if v >= min_iou && v > 0.0 {
                cands.push(MaskMatch { gt: g, pred: p, iou: v });
            }
        }
    }
    cands.sort_by(|a, b| {
        b.iou
            .partial_cmp(&a.iou)
            .unwrap_or(Ordering::Equal)
            .then(a.gt.cmp(&b.gt))
            .then_with(|| pred[a.pred].as_slice().cmp(pred[b.pred].as_slice()))
            .then(a.pred.cmp(&b.pred))
    });
    let mut gt_used = vec![false; gt.len()];
    let mut pred_used = vec![false; pred.len()];
    let mut out = Vec::new();
    for c in cands {
        if !gt_used[c.gt] && !pred_used[c.pred] {
            gt_used[c.gt] = true;
            pred_used[c.pred] = true;
            out.push(c);
        }
    }
    out.sort_by_key(|m| m.gt);
    Ok(out)
}

/// `(gt_index, pred_index)` pairs with IoU of at least 0.3.
pub fn iou_match(pred: &[Mask], gt: &[Mask]) -> Result<Vec<(usize, usize)>> {
    Ok(iou_match_scored(pred, gt, MIN_MATCH_IOU)?
        .into_iter()
        .map(|m| (m.gt, m.pred))
        .collect())
}
