mod common;

use common::{random_grid, random_image, rng};
use ldi_core::losses::{
    adversarial_value, auto_loss, completion_loss, iou, iou_match, iou_match_scored, layout_loss,
    perceptual_loss, reconstruction_loss, relevance_map, FeatureExtractor, KernelBank, LossWeights,
    RelevanceMap, RelevanceWeights, DEFAULT_DILATION, MIN_MATCH_IOU,
};
use ldi_core::planes::Planes;
use ldi_core::{Grid, Mask, RgbadImage};
use proptest::prelude::*;
use rand::Rng;

const H: f64 = 1e-5;

fn random_rgbad(r: &mut rand_chacha::ChaCha8Rng) -> RgbadImage<f64> {
    RgbadImage::from_fn(3, 3, |_, _| {
        Some(ldi_core::Rgbad::new([r.gen(), r.gen(), r.gen(), r.gen()], r.gen_range(0.5..6.0)))
    })
}

fn far_from_kinks(a: &RgbadImage<f64>, b: &RgbadImage<f64>) -> bool {
    a.pixels()
        .as_slice()
        .iter()
        .zip(b.pixels().as_slice())
        .all(|(p, q)| (0..5).all(|c| (p.channel(c) - q.channel(c)).abs() > 10.0 * H))
}

fn check_channel_grad(
    gt: &RgbadImage<f64>,
    pred: &RgbadImage<f64>,
    f: impl Fn(&RgbadImage<f64>) -> f64,
    grad: &Grid<[f64; 5]>,
) {
    let (w, h) = pred.dims();
    for y in 0..h {
        for x in 0..w {
            for c in 0..5 {
                let bump = |s: f64| {
                    let mut p = pred.clone();
                    let mut px = *p.pixel(x, y);
                    *px.channel_mut(c) += s;
                    p.set(x, y, px);
                    f(&p)
                };
                let fd = (bump(H) - bump(-H)) / (2.0 * H);
                let an = grad.get(x, y)[c];
                assert!((fd - an).abs() < 1e-4, "({x},{y},{c}) fd {fd} analytic {an}");
            }
        }
    }
    let _ = gt;
}

#[test]
fn completion_and_auto_gradients_match_finite_differences() {
    let mut checked = 0;
    let mut r = rng(17);
    while checked < 100 {
        let gt = random_rgbad(&mut r);
        let pred = random_rgbad(&mut r);
        if !far_from_kinks(&gt, &pred) {
            continue;
        }
        let gamma = RelevanceMap {
            weights: random_grid(&mut r, 3, 3, 0.1, 2.0),
        };
        let (_, g) = completion_loss(&gt, &pred, &gamma).unwrap();
        check_channel_grad(&gt, &pred, |p| completion_loss(&gt, p, &gamma).unwrap().0, &g);
        let (_, g) = auto_loss(&gt, &pred).unwrap();
        check_channel_grad(&gt, &pred, |p| auto_loss(&gt, p).unwrap().0, &g);
        checked += 1;
    }
}

#[test]
fn reconstruction_gradient_matches_finite_differences() {
    let mut checked = 0;
    let mut r = rng(23);
    while checked < 100 {
        let gc = Planes::from_fn(3, 3, 3, |_, _, _| r.gen::<f64>());
        let pc = Planes::from_fn(3, 3, 3, |_, _, _| r.gen::<f64>());
        let gd = random_grid(&mut r, 3, 3, 1.0, 5.0);
        let pd = random_grid(&mut r, 3, 3, 1.0, 5.0);
        let kink = gc.as_slice().iter().zip(pc.as_slice()).any(|(a, b)| (a - b).abs() < 10.0 * H)
            || gd.as_slice().iter().zip(pd.as_slice()).any(|(a, b)| (a - b).abs() < 10.0 * H);
        if kink {
            continue;
        }
        let (_, g) = reconstruction_loss(&gc, &pc, &gd, &pd).unwrap();
        for i in 0..pc.as_slice().len() {
            let bump = |s: f64| {
                let mut p = pc.clone();
                p.as_mut_slice()[i] += s;
                reconstruction_loss(&gc, &p, &gd, &pd).unwrap().0
            };
            let fd = (bump(H) - bump(-H)) / (2.0 * H);
            assert!((fd - g.color.as_slice()[i]).abs() < 1e-4);
        }
        for i in 0..pd.len() {
            let bump = |s: f64| {
                let mut p = pd.clone();
                p.as_mut_slice()[i] += s;
                reconstruction_loss(&gc, &pc, &gd, &p).unwrap().0
            };
            let fd = (bump(H) - bump(-H)) / (2.0 * H);
            assert!((fd - g.depth.as_slice()[i]).abs() < 1e-4);
        }
        checked += 1;
    }
}

proptest! {
    #[test]
    fn completion_is_homogeneous_in_gamma(seed in any::<u64>(), k in prop::sample::select(vec![0.25, 0.5, 2.0, 4.0, 8.0])) {
        let mut r = rng(seed);
        let gt = random_image(&mut r, 4, 3);
        let pred = random_image(&mut r, 4, 3);
        let gamma = RelevanceMap { weights: random_grid(&mut r, 4, 3, 0.1, 2.0) };
        let (l1, g1) = completion_loss(&gt, &pred, &gamma).unwrap();
        let (lk, gk) = completion_loss(&gt, &pred, &gamma.scaled(k)).unwrap();
        prop_assert_eq!(lk, k * l1);
        for (a, b) in g1.as_slice().iter().zip(gk.as_slice()) {
            for c in 0..5 {
                prop_assert_eq!(b[c], k * a[c]);
            }
        }
    }

    #[test]
    fn losses_are_non_negative_and_zero_on_equal(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_image(&mut r, 3, 4);
        let b = random_image(&mut r, 3, 4);
        prop_assert!(auto_loss(&a, &b).unwrap().0 >= 0.0);
        prop_assert_eq!(auto_loss(&a, &a).unwrap().0, 0.0);
        let pa = Planes::rgb_of(&a);
        let pb = Planes::rgb_of(&b);
        let bank = KernelBank::edges();
        prop_assert!(perceptual_loss(&pa, &pb, &bank).unwrap() >= 0.0);
        prop_assert_eq!(perceptual_loss(&pa, &pa, &bank).unwrap(), 0.0);
    }

    #[test]
    fn kernel_bank_matches_direct_convolution(seed in any::<u64>(), w in 1usize..6, h in 1usize..6) {
        let mut r = rng(seed);
        let img = Planes::from_fn(2, w, h, |_, _, _| r.gen::<f64>());
        let bank = KernelBank::<f64>::seeded(3, seed);
        let out = bank.extract(&img);
        prop_assert_eq!(out.channels(), 6);
        // Explicitly padded copy of each channel.
        for c in 0..2 {
            let pw = w + 2;
            let padded: Vec<f64> = (0..(h + 2) * pw)
                .map(|i| {
                    let (px, py) = (i % pw, i / pw);
                    let sx = px.saturating_sub(1).min(w - 1);
                    let sy = py.saturating_sub(1).min(h - 1);
                    img.get(c, sx, sy)
                })
                .collect();
            for (k, kern) in bank.kernels.iter().enumerate() {
                for y in 0..h {
                    for x in 0..w {
                        let mut acc = 0.0;
                        for j in 0..3 {
                            for i in 0..3 {
                                acc += kern[j][i] * padded[(y + j) * pw + x + i];
                            }
                        }
                        prop_assert!((out.get(c * 3 + k, x, y) - acc.abs()).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn matching_is_one_to_one_and_above_threshold(seed in any::<u64>(), np in 0usize..5, ng in 0usize..5) {
        let mut r = rng(seed);
        let pred: Vec<Mask> = (0..np).map(|_| common::random_mask(&mut r, 5, 5, 0.4)).collect();
        let gt: Vec<Mask> = (0..ng).map(|_| common::random_mask(&mut r, 5, 5, 0.4)).collect();
        let m = iou_match_scored(&pred, &gt, MIN_MATCH_IOU).unwrap();
        let mut gs: Vec<_> = m.iter().map(|x| x.gt).collect();
        let mut ps: Vec<_> = m.iter().map(|x| x.pred).collect();
        gs.dedup();
        ps.sort();
        ps.dedup();
        prop_assert_eq!(gs.len(), m.len());
        prop_assert_eq!(ps.len(), m.len());
        for x in &m {
            prop_assert!(x.iou >= MIN_MATCH_IOU);
            prop_assert_eq!(x.iou, iou(&gt[x.gt], &pred[x.pred]).unwrap());
        }
        // Reversing the prediction order relabels but does not change the pairing.
        let rev: Vec<Mask> = pred.iter().rev().cloned().collect();
        let m2 = iou_match(&rev, &gt).unwrap();
        let m1: Vec<_> = m.iter().map(|x| (x.gt, np - 1 - x.pred)).collect();
        prop_assert_eq!(m2, m1);
    }
}

fn strip(w: usize, lo: usize, hi: usize) -> Mask {
    Grid::from_fn(w, 1, |x, _| (lo..hi).contains(&x))
}

#[test]
fn iou_threshold_boundary() {
    // gt covers 10 pixels; a 4-pixel prediction inside it has IoU 0.4.
    let gt = vec![strip(20, 0, 10)];
    assert_eq!(iou(&gt[0], &strip(20, 0, 4)).unwrap(), 0.4);
    assert_eq!(iou_match(&[strip(20, 0, 4)], &gt).unwrap(), vec![(0, 0)]);
    // 2 of 8 pixels: IoU 0.25, discarded.
    let gt8 = vec![strip(20, 0, 8)];
    assert_eq!(iou(&gt8[0], &strip(20, 0, 2)).unwrap(), 0.25);
    assert!(iou_match(&[strip(20, 0, 2)], &gt8).unwrap().is_empty());
    // Exactly 0.3 is kept.
    assert_eq!(iou(&gt[0], &strip(20, 0, 3)).unwrap(), 0.3);
    assert_eq!(iou_match(&[strip(20, 0, 3)], &gt).unwrap().len(), 1);
}

#[test]
fn greedy_takes_best_pair_first() {
    let gt = vec![strip(20, 0, 10), strip(20, 5, 15)];
    let pred = vec![strip(20, 5, 14), strip(20, 0, 9)];
    assert_eq!(iou_match(&pred, &gt).unwrap(), vec![(0, 1), (1, 0)]);
}

#[test]
fn relevance_weights_and_band() {
    let (w, h) = (41, 41);
    let visible = Grid::from_fn(w, h, |x, y| (x, y) == (20, 20));
    let gt = Grid::from_fn(w, h, |x, y| (x, y) == (20, 20) || (x, y) == (21, 20) || (x, y) == (40, 40));
    let m = relevance_map::<f64>(&gt, &visible, DEFAULT_DILATION, &RelevanceWeights::default()).unwrap();
    let at = |x, y| *m.weights.get(x, y);
    assert_eq!(at(20, 20), 0.7);
    assert_eq!(at(21, 20), 1.5);
    assert_eq!(at(40, 40), 1.5);
    // 31x31 square: offsets -15..=15.
    assert_eq!(at(5, 5), 0.7);
    assert_eq!(at(35, 35), 0.7);
    assert_eq!(at(4, 20), 0.2);
    assert_eq!(at(20, 36), 0.2);
    assert_eq!(at(0, 0), 0.2);
    let mut vals: Vec<f64> = m.weights.as_slice().to_vec();
    vals.sort_by(f64::total_cmp);
    vals.dedup();
    assert_eq!(vals, vec![0.2, 0.7, 1.5]);
    let n07 = m.weights.as_slice().iter().filter(|&&v| v == 0.7).count();
    assert_eq!(n07, 31 * 31 - 1);
}

#[test]
fn layout_weights() {
    let w = LossWeights::default();
    assert_eq!((w.reconstruction, w.perceptual), (100.0, 25.0));
    let b = layout_loss(0.1, 0.04, None, &w).unwrap();
    assert!((b.total - 11.0).abs() < 1e-12);
    let b = layout_loss(0.1, 0.04, Some(-1.0), &w).unwrap();
    assert!((b.total - 10.0).abs() < 1e-12);
    let rec = b.to_record();
    assert_eq!(rec["adversarial"], -1.0);
    assert!(layout_loss(0.1, 0.1, None, &LossWeights { reconstruction: -1.0, perceptual: 1.0 }).is_err());
}

#[test]
fn adversarial_clamps() {
    let v: f64 = adversarial_value(&[1.0, 0.5], &[0.0]).unwrap();
    let eps: f64 = 1e-7;
    let want = ((1.0 - eps).ln() + 0.5f64.ln()) / 2.0 + (1.0 - eps).ln();
    assert!((v - want).abs() < 1e-15);
    assert!(adversarial_value::<f64>(&[], &[0.5]).is_err());
    assert!(adversarial_value::<f64>(&[0.0], &[1.0]).unwrap().is_finite());
}
