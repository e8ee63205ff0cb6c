//! View synthesis from layered depth images and object removal.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::compose::{min_depth_pool, ComposeResult, DEFAULT_ALPHA_MIN};
use crate::error::{check_dims, Error, Result};
use crate::geometry::{Camera, Pose};
use crate::grid::Mask;
use crate::image::{Rgbad, RgbadImage};
use crate::layers::LayerStack;
use crate::ldi::Ldi;
use crate::scalar::Real;
use crate::scene::ClassTable;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WarpConfig {
    /// A splat replaces an occupied target pixel only if nearer by more than this (metres).
    pub z_test_epsilon: f64,
    /// Maximum depth spread among neighbours used to fill a crack (metres).
    pub fill_depth_tolerance: f64,
    pub max_fill_passes: usize,
}

impl Default for WarpConfig {
    fn default() -> Self {
        Self {
            z_test_epsilon: 1e-4,
            fill_depth_tolerance: 0.05,
            max_fill_passes: 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct WarpStats {
    pub written: usize,
    pub out_of_bounds: usize,
    pub behind_camera: usize,
}

impl std::ops::AddAssign for WarpStats {
    fn add_assign(&mut self, o: Self) {
        self.written += o.written;
        self.out_of_bounds += o.out_of_bounds;
        self.behind_camera += o.behind_camera;
    }
}

enum Splat<T> {
    Hit { target: usize, px: Rgbad<T> },
    OutOfBounds,
    Behind,
}

fn project_layer<T: Real>(layer: &RgbadImage<T>, camera: &Camera<T>, rel: &Pose<T>) -> Vec<Option<Splat<T>>> {
    let (w, h) = layer.dims();
    let half = T::of(0.5);
    (0..h)
        .into_par_iter()
        .flat_map_iter(|y| (0..w).map(move |x| (x, y)))
        .map(|(x, y)| {
            let p = layer.sample(x, y)?;
            let q = rel.apply(camera.unproject(T::of_usize(x), T::of_usize(y), p.depth));
            if q.z <= T::zero() {
                return Some(Splat::Behind);
            }
            let (u, v, z) = camera.project(q);
            let (ui, vi) = ((u + half).floor(), (v + half).floor());
            if !(ui >= T::zero() && vi >= T::zero())
                || ui >= T::of_usize(camera.width)
                || vi >= T::of_usize(camera.height)
            {
                return Some(Splat::OutOfBounds);
            }
            let (ui, vi) = (ui.to_usize().unwrap_or(0), vi.to_usize().unwrap_or(0));
            Some(Splat::Hit {
                target: vi * camera.width + ui,
                px: Rgbad::new(p.rgba, z),
            })
        })
        .collect()
}

fn splat_into<T: Real>(
    layer: &RgbadImage<T>,
    camera: &Camera<T>,
    rel: &Pose<T>,
    target: &mut RgbadImage<T>,
    locked: Option<&Mask>,
    config: &WarpConfig,
) -> Result<WarpStats> {
    check_dims(layer.dims(), (camera.width, camera.height))?;
    check_dims(layer.dims(), target.dims())?;
    let eps = T::of(config.z_test_epsilon);
    let w = camera.width;
    let mut stats = WarpStats::default();
    // Candidates arrive in source row-major order whatever the thread count,
    // so the sequential z-test below is scheduling independent.
    for splat in project_layer(layer, camera, rel).into_iter().flatten() {
        match splat {
            Splat::Behind => stats.behind_camera += 1,
            Splat::OutOfBounds => stats.out_of_bounds += 1,
            Splat::Hit { target: t, px } => {
                let (x, y) = (t % w, t / w);
                if locked.is_some_and(|m| *m.get(x, y)) {
                    continue;
                }
                let wins = match target.sample(x, y) {
                    None => true,
                    Some(cur) => px.depth < cur.depth - eps,
                };
                if wins {
                    target.set(x, y, px);
                    stats.written += 1;
                }
            }
        }
    }
    Ok(stats)
}

/// Forward-warps the valid pixels of `layer` into `target` by nearest-pixel
/// splatting with a z-test. `relative_pose` maps source to target camera
/// coordinates; both views share `camera`.
pub fn warp_layer<T: Real>(
    layer: &RgbadImage<T>,
    camera: &Camera<T>,
    relative_pose: &Pose<T>,
    target: &mut RgbadImage<T>,
    config: &WarpConfig,
) -> Result<WarpStats> {
    splat_into(layer, camera, relative_pose, target, None, config)
}

/// Fills pixel-discretization cracks: an invalid pixel with at least three
/// valid 4-neighbours whose depths agree within the tolerance takes their
/// mean colour and depth. Larger holes stay invalid.
pub fn fill_cracks<T: Real>(image: &RgbadImage<T>, config: &WarpConfig) -> RgbadImage<T> {
    let tol = T::of(config.fill_depth_tolerance);
    let mut cur = image.clone();
    let (w, h) = cur.dims();
    for _ in 0..config.max_fill_passes {
        let snapshot = cur.clone();
        let mut changed = false;
        for y in 0..h {
            for x in 0..w {
                if snapshot.is_valid(x, y) {
                    continue;
                }
                let mut nb: [Option<&Rgbad<T>>; 4] = [None; 4];
                if x > 0 {
                    nb[0] = snapshot.sample(x - 1, y);
                }
                if x + 1 < w {
                    nb[1] = snapshot.sample(x + 1, y);
                }
                if y > 0 {
                    nb[2] = snapshot.sample(x, y - 1);
                }
                if y + 1 < h {
                    nb[3] = snapshot.sample(x, y + 1);
                }
                let valid: Vec<&Rgbad<T>> = nb.iter().flatten().copied().collect();
                if valid.len() < 3 {
                    continue;
                }
                let (lo, hi) = valid.iter().fold((T::infinity(), T::neg_infinity()), |(l, u), p| {
                    (l.min(p.depth), u.max(p.depth))
                });
                if hi - lo > tol {
                    continue;
                }
                // Neighbours sit at unit distance, so the weights are equal.
                let n = T::of_usize(valid.len());
                let mut acc = Rgbad::zero();
                for p in &valid {
                    for c in 0..5 {
                        *acc.channel_mut(c) += p.channel(c);
                    }
                }
                for c in 0..5 {
                    *acc.channel_mut(c) /= n;
                }
                cur.set(x, y, acc);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    cur
}

/// Synthesized view and its bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthResult<T> {
    pub image: RgbadImage<T>,
    pub stats: WarpStats,
}

impl<T: Real> SynthResult<T> {
    pub fn fill_ratio(&self) -> f64 {
        let (w, h) = self.image.dims();
        if w * h == 0 {
            return 0.0;
        }
        self.image.valid_count() as f64 / (w * h) as f64
    }
}

/// Largest per-channel colour spread inside a block that is still blended.
const SMOOTH_COLOR_STEP: f64 = 8.0 / 255.0;

/// Solves `p = bilerp(q00, q10, q01, q11; s, t)` for `(s, t)`.
fn inverse_bilinear(p: [f64; 2], q: [[f64; 2]; 4]) -> Option<(f64, f64)> {
    let [a, b, c, d] = q; // (0,0) (1,0) (0,1) (1,1)
    let e = [b[0] - a[0], b[1] - a[1]];
    let f = [c[0] - a[0], c[1] - a[1]];
    let g = [a[0] - b[0] - c[0] + d[0], a[1] - b[1] - c[1] + d[1]];
    let h = [p[0] - a[0], p[1] - a[1]];
    let cross = |u: [f64; 2], v: [f64; 2]| u[0] * v[1] - u[1] * v[0];
    let k2 = cross(g, f);
    let k1 = cross(e, f) + cross(h, g);
    let k0 = cross(h, e);
    let v = if k2.abs() < 1e-12 {
        if k1.abs() < 1e-18 {
            return None;
        }
        -k0 / k1
    } else {
        let disc = k1 * k1 - 4.0 * k0 * k2;
        if disc < 0.0 {
            return None;
        }
        let r = disc.sqrt();
        let v1 = (-k1 - r) / (2.0 * k2);
        let v2 = (-k1 + r) / (2.0 * k2);
        if (-1e-9..=1.0 + 1e-9).contains(&v1) {
            v1
        } else {
            v2
        }
    };
    let den_x = e[0] + g[0] * v;
    let den_y = e[1] + g[1] * v;
    let u = if den_x.abs() > den_y.abs() {
        (h[0] - f[0] * v) / den_x
    } else if den_y.abs() > 0.0 {
        (h[1] - f[1] * v) / den_y
    } else {
        return None;
    };
    const TOL: f64 = 1e-9;
    ((-TOL..=1.0 + TOL).contains(&u) && (-TOL..=1.0 + TOL).contains(&v)).then_some((u, v))
}

/// Resamples one LDI rank by inverse bilinear interpolation over 2x2 source
/// blocks whose samples all come from the same stack layer (one continuous
/// surface). Writes into `buf` with the same z-test as splatting.
fn quad_fill<T: Real>(
    ldi: &Ldi<T>,
    rank: usize,
    camera: &Camera<T>,
    rel: &Pose<T>,
    buf: &mut RgbadImage<T>,
    config: &WarpConfig,
) {
    let (w, h) = ldi.dims();
    if w < 2 || h < 2 {
        return;
    }
    let eps = config.z_test_epsilon;
    let project = |x: usize, y: usize| {
        let s = ldi.samples_at(x, y).get(rank)?;
        let q = rel.apply(camera.unproject(T::of_usize(x), T::of_usize(y), s.depth));
        if q.z <= T::zero() {
            return None;
        }
        let (u, v, z) = camera.project(q);
        Some(([u.to64(), v.to64()], z.to64(), s))
    };
    let projected: Vec<_> = (0..h)
        .into_par_iter()
        .flat_map_iter(|y| (0..w).map(move |x| (x, y)))
        .map(|(x, y)| project(x, y))
        .collect();
    for y in 0..h - 1 {
        for x in 0..w - 1 {
            let idx = [y * w + x, y * w + x + 1, (y + 1) * w + x, (y + 1) * w + x + 1];
            let (Some(c00), Some(c10), Some(c01), Some(c11)) = (
                projected[idx[0]],
                projected[idx[1]],
                projected[idx[2]],
                projected[idx[3]],
            ) else {
                continue;
            };
            let corners = [c00, c10, c01, c11];
            if corners.iter().any(|c| c.2.layer != c00.2.layer) {
                continue;
            }
            let q = corners.map(|c| c.0);
            let smooth = (0..4).all(|ch| {
                let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
                for c in &corners {
                    lo = lo.min(c.2.rgba[ch].to64());
                    hi = hi.max(c.2.rgba[ch].to64());
                }
                hi - lo <= SMOOTH_COLOR_STEP
            });
            let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
            for p in &q {
                for k in 0..2 {
                    lo[k] = lo[k].min(p[k]);
                    hi[k] = hi[k].max(p[k]);
                }
            }
            // A block stretched over many pixels is a grazing or degenerate view.
            if hi[0] - lo[0] > 8.0 || hi[1] - lo[1] > 8.0 {
                continue;
            }
            let x0 = lo[0].ceil().max(0.0) as usize;
            let y0 = lo[1].ceil().max(0.0) as usize;
            let x1 = hi[0].floor().min(w as f64 - 1.0);
            let y1 = hi[1].floor().min(h as f64 - 1.0);
            if x1 < 0.0 || y1 < 0.0 {
                continue;
            }
            for ty in y0..=y1 as usize {
                for tx in x0..=x1 as usize {
                    let Some((s, t)) = inverse_bilinear([tx as f64, ty as f64], q) else {
                        continue;
                    };
                    let wts = [(1.0 - s) * (1.0 - t), s * (1.0 - t), (1.0 - s) * t, s * t];
                    let z: f64 = corners.iter().zip(wts).map(|(c, wt)| c.1 * wt).sum();
                    let wins = match buf.sample(tx, ty) {
                        None => true,
                        Some(cur) => z < cur.depth.to64() - eps,
                    };
                    if !wins {
                        continue;
                    }
                    let rgba = if smooth {
                        let mut rgba = [T::zero(); 4];
                        for (ch, out) in rgba.iter_mut().enumerate() {
                            let v: f64 = corners.iter().zip(wts).map(|(c, wt)| c.2.rgba[ch].to64() * wt).sum();
                            *out = T::of(v);
                        }
                        rgba
                    } else {
                        // Texture edge inside the block: take the nearest corner.
                        let k = usize::from(s >= 0.5) + 2 * usize::from(t >= 0.5);
                        corners[k].2.rgba
                    };
                    buf.set(tx, ty, Rgbad::new(rgba, T::of(z)));
                }
            }
        }
    }
}

/// Renders the LDI from a new viewpoint. Rank 1 is warped first; each deeper
/// rank only fills pixels still empty after the nearer ranks. Within a rank,
/// nearest-pixel splats are completed by inverse bilinear resampling of
/// same-surface pixel blocks, so discretization cracks in a near rank are not
/// mistaken for holes that a farther rank should fill. Remaining cracks are
/// filled at the end; dis-occlusions no rank covers stay invalid.
pub fn synthesize_view<T: Real>(
    ldi: &Ldi<T>,
    camera: &Camera<T>,
    relative_pose: &Pose<T>,
    config: &WarpConfig,
) -> Result<SynthResult<T>> {
    check_dims(ldi.dims(), (camera.width, camera.height))?;
    let (w, h) = ldi.dims();
    let mut target = RgbadImage::empty(w, h);
    let mut stats = WarpStats::default();
    for rank in 0..ldi.max_depth_complexity() {
        let mut buf = RgbadImage::empty(w, h);
        stats += warp_layer(&ldi.layer(rank), camera, relative_pose, &mut buf, config)?;
        quad_fill(ldi, rank, camera, relative_pose, &mut buf, config);
        for y in 0..h {
            for x in 0..w {
                if !target.is_valid(x, y) {
                    if let Some(p) = buf.sample(x, y) {
                        target.set(x, y, *p);
                    }
                }
            }
        }
    }
    Ok(SynthResult {
        image: fill_cracks(&target, config),
        stats,
    })
}

/// Minimum depth pooling after deleting every instance of the given classes.
pub fn remove_objects<T: Real>(
    stack: &LayerStack<T>,
    class_ids: &[u32],
    classes: &ClassTable,
) -> Result<ComposeResult<T>> {
    if let Some(bad) = class_ids.iter().find(|id| !classes.contains(**id)) {
        return Err(Error::Config(format!("unknown class id {bad}")));
    }
    let kept = stack.retain_instances(|inst| !class_ids.contains(&inst.class_id));
    min_depth_pool(&kept, T::of(DEFAULT_ALPHA_MIN))
}
