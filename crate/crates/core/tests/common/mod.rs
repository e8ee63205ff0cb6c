#![allow(dead_code)]

use ldi_core::layers::{InstanceLayer, LayerStack, LayoutLayer};
use ldi_core::{Camera, Grid, Ldi, LdiSample, Pose, Rgbad, RgbadImage};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// Few distinct depths so ties are common.
const DEPTHS: [f64; 4] = [1.0, 1.5, 2.0, 2.5];
const ALPHAS: [f64; 4] = [0.2, 0.5, 0.9, 1.0];

pub fn random_layer(r: &mut ChaCha8Rng, w: usize, h: usize, fill: f64) -> RgbadImage<f64> {
    RgbadImage::from_fn(w, h, |_, _| {
        r.gen_bool(fill).then(|| {
            let c = [r.gen::<f64>(), r.gen::<f64>(), r.gen::<f64>()];
            Rgbad::new(
                [c[0], c[1], c[2], ALPHAS[r.gen_range(0..4)]],
                DEPTHS[r.gen_range(0..4)],
            )
        })
    })
}

/// Up to `max_layers` layers in total, the layout included.
pub fn random_stack(seed: u64, w: usize, h: usize, max_layers: usize) -> LayerStack<f64> {
    let mut r = rng(seed);
    let n_inst = r.gen_range(0..max_layers);
    let instances = (0..n_inst)
        .map(|i| {
            let img = random_layer(&mut r, w, h, 0.6);
            let vis = img.valid_mask().clone();
            InstanceLayer::new(img, 3 + (i as u32 % 6), 9, vis, i)
        })
        .collect();
    let layout = random_layer(&mut r, w, h, 0.8);
    LayerStack {
        instances,
        layout: LayoutLayer {
            image: layout,
            structural_classes: vec![0, 1, 2],
        },
        camera: Camera::new(4.0, 4.0, w as f64 / 2.0, h as f64 / 2.0, w, h).unwrap(),
        view_pose: Pose::identity(),
    }
}

/// Exhaustive scan: the nearest present layer, earliest index on ties.
pub fn mdp_oracle(stack: &LayerStack<f64>, alpha_min: f64) -> (Vec<Option<Rgbad<f64>>>, Vec<Option<usize>>) {
    let (w, h) = stack.dims();
    let mut img = vec![None; w * h];
    let mut idx = vec![None; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut cands: Vec<(f64, usize, Rgbad<f64>)> = Vec::new();
            for l in 0..stack.num_layers() {
                if let Some(p) = stack.layer_image(l).sample(x, y) {
                    if p.rgba[3] >= alpha_min {
                        cands.push((p.depth, l, *p));
                    }
                }
            }
            if let Some(best) = cands
                .iter()
                .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)))
            {
                img[y * w + x] = Some(best.2);
                idx[y * w + x] = Some(best.1);
            }
        }
    }
    (img, idx)
}

/// Insertion sort of each pixel's samples by depth, stable in layer order.
pub fn ldi_oracle(stack: &LayerStack<f64>) -> Vec<Vec<LdiSample<f64>>> {
    let (w, h) = stack.dims();
    let mut out = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            let mut list: Vec<LdiSample<f64>> = Vec::new();
            for l in 0..stack.num_layers() {
                let Some(p) = stack.layer_image(l).sample(x, y) else { continue };
                let s = LdiSample {
                    rgba: p.rgba,
                    depth: p.depth,
                    layer: l as u16,
                };
                let mut i = list.len();
                while i > 0 && list[i - 1].depth > s.depth {
                    i -= 1;
                }
                list.insert(i, s);
            }
            out.push(list);
        }
    }
    out
}

pub fn random_ldi(seed: u64, w: usize, h: usize, max_per_pixel: usize) -> Ldi<f64> {
    let mut r = rng(seed);
    let lists = (0..w * h)
        .map(|_| {
            let n = r.gen_range(0..=max_per_pixel);
            let mut d: f64 = r.gen_range(0.5..2.0);
            (0..n)
                .map(|l| {
                    d += r.gen_range(0.0..1.0);
                    LdiSample {
                        rgba: [0; 4].map(|_| r.gen_range(0..=255) as f64 / 255.0),
                        depth: d,
                        layer: l as u16,
                    }
                })
                .collect()
        })
        .collect();
    Ldi::from_lists(w, h, lists).unwrap()
}

pub fn random_grid(r: &mut ChaCha8Rng, w: usize, h: usize, lo: f64, hi: f64) -> Grid<f64> {
    Grid::from_fn(w, h, |_, _| r.gen_range(lo..hi))
}

pub fn random_mask(r: &mut ChaCha8Rng, w: usize, h: usize, p: f64) -> Grid<bool> {
    Grid::from_fn(w, h, |_, _| r.gen_bool(p))
}

pub fn random_image(r: &mut ChaCha8Rng, w: usize, h: usize) -> RgbadImage<f64> {
    RgbadImage::from_fn(w, h, |_, _| {
        Some(Rgbad::new(
            [r.gen(), r.gen(), r.gen(), 1.0],
            r.gen_range(0.5..6.0),
        ))
    })
}
