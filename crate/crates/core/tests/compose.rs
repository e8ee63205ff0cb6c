mod common;

use common::{mdp_oracle, random_grid, random_mask, random_stack, rng};
use ldi_core::compose::{apply_displacement, depth_displacement, front_mask, min_depth_pool, recompose_loss};
use ldi_core::{Error, Grid, Mask};
use proptest::prelude::*;

proptest! {
    #[test]
    fn pooling_matches_exhaustive_scan(seed in any::<u64>(), w in 1usize..7, h in 1usize..7, alpha in prop::sample::select(vec![0.0, 0.5, 0.95])) {
        let stack = random_stack(seed, w, h, 4);
        let r = min_depth_pool(&stack, alpha).unwrap();
        let (img, idx) = mdp_oracle(&stack, alpha);
        prop_assert_eq!(r.index_map.as_slice(), &idx[..]);
        for (i, want) in img.iter().enumerate() {
            let (x, y) = (i % w, i / w);
            prop_assert_eq!(r.image.sample(x, y), want.as_ref());
        }
    }

    #[test]
    fn front_masks_partition_valid_pixels(seed in any::<u64>()) {
        let stack = random_stack(seed, 6, 5, 4);
        let r = min_depth_pool(&stack, 0.5).unwrap();
        let mut covered = Mask::filled(6, 5, false);
        for l in 0..stack.num_layers() {
            let m = front_mask(&r, l);
            prop_assert_eq!(m.and(&covered).unwrap().count(), 0);
            covered = covered.or(&m).unwrap();
        }
        prop_assert_eq!(&covered, r.image.valid_mask());
    }

    #[test]
    fn pooled_depth_is_minimum(seed in any::<u64>()) {
        let stack = random_stack(seed, 5, 5, 4);
        let r = min_depth_pool(&stack, 0.5).unwrap();
        for y in 0..5 {
            for x in 0..5 {
                let Some(p) = r.image.sample(x, y) else { continue };
                for l in 0..stack.num_layers() {
                    if let Some(q) = stack.layer_image(l).sample(x, y) {
                        if q.rgba[3] >= 0.5 {
                            prop_assert!(p.depth <= q.depth);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn constant_shift_gives_negated_displacement(seed in any::<u64>(), c in -3.0f64..3.0) {
        let mut r = rng(seed);
        let (w, h) = (7, 6);
        let mut mask = random_mask(&mut r, w, h, 0.5);
        mask.set(0, 0, true);
        let gt = random_grid(&mut r, w, h, 1.0, 5.0);
        let pred = gt.map(|v| v + c);
        let d = depth_displacement(&mask, &gt, &pred).unwrap();
        prop_assert!((d + c).abs() < 1e-12, "{} vs {}", d, -c);
    }

    #[test]
    fn apply_then_measure_is_zero(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (w, h) = (6, 6);
        let mut mask = random_mask(&mut r, w, h, 0.4);
        mask.set(3, 3, true);
        let gt = random_grid(&mut r, w, h, 2.0, 6.0);
        let pred = random_grid(&mut r, w, h, 1.0, 4.0);
        let valid = Mask::filled(w, h, true);
        let d = depth_displacement(&mask, &gt, &pred).unwrap();
        let moved = apply_displacement(&pred, &valid, d).unwrap();
        prop_assert_eq!(moved.clamped, 0);
        let again = depth_displacement(&mask, &gt, &moved.depth).unwrap();
        prop_assert!(again.abs() < 1e-12);
    }

    #[test]
    fn displacement_undoes_constant_offset(seed in any::<u64>(), c in -1.0f64..1.0) {
        let mut r = rng(seed);
        let (w, h) = (5, 7);
        let mut mask = random_mask(&mut r, w, h, 0.5);
        mask.set(1, 1, true);
        let gt = random_grid(&mut r, w, h, 2.0, 6.0);
        let pred = gt.map(|v| v + c);
        let valid = Mask::filled(w, h, true);
        let d = depth_displacement(&mask, &gt, &pred).unwrap();
        let fixed = apply_displacement(&pred, &valid, d).unwrap().depth;
        prop_assert!(recompose_loss(&gt, &fixed, &valid).unwrap() < 1e-12);
    }

    #[test]
    fn apply_never_goes_negative(seed in any::<u64>(), delta in -5.0f64..5.0) {
        let mut r = rng(seed);
        let d = random_grid(&mut r, 4, 4, 0.0, 4.0);
        let v = random_mask(&mut r, 4, 4, 0.7);
        let out = apply_displacement(&d, &v, delta).unwrap();
        let expected_clamped = d.as_slice().iter().zip(v.as_slice()).filter(|(x, m)| **m && **x + delta < 0.0).count();
        prop_assert_eq!(out.clamped, expected_clamped);
        for i in 0..16 {
            let want = if v.as_slice()[i] { (d.as_slice()[i] + delta).max(0.0) } else { d.as_slice()[i] };
            prop_assert_eq!(out.depth.as_slice()[i], want);
        }
    }
}

#[test]
fn empty_stack_pools_to_nothing() {
    let mut s = random_stack(3, 4, 3, 1);
    s.instances.clear();
    s.layout.image = ldi_core::RgbadImage::empty(4, 3);
    let r = min_depth_pool(&s, 0.5).unwrap();
    assert_eq!(r.image.valid_count(), 0);
    assert!(r.index_map.as_slice().iter().all(Option::is_none));
}

#[test]
fn mismatched_layer_is_rejected() {
    let mut s = random_stack(5, 4, 4, 3);
    s.layout.image = ldi_core::RgbadImage::empty(4, 5);
    assert!(matches!(min_depth_pool(&s, 0.5), Err(Error::Dimension { .. })));
}

#[test]
fn empty_mask_is_an_error() {
    let g = Grid::filled(3, 3, 1.0);
    let m = Mask::filled(3, 3, false);
    assert!(matches!(depth_displacement(&m, &g, &g), Err(Error::EmptyMask)));
}
