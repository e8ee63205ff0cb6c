use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::render::{render_composite, render_layout, render_object, visibility_of};
use super::{
    ClassTable, Room, SceneObject, SceneSpec, Shape, Texture, CLASS_CEILING, CLASS_FLOOR,
    CLASS_WALL,
};
use crate::error::{Error, Result};
use crate::geometry::{Camera, Mat3, Pose, Vec3};
use crate::layers::{InstanceLayer, LayerStack};
use crate::ldi::ldi_from_stack;
use crate::scalar::Real;

/// Maximum camera motion between a source view and its target view.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PosePerturbation {
    pub max_translation: f64,
    pub max_rotation_deg: f64,
}

impl Default for PosePerturbation {
    fn default() -> Self {
        Self {
            max_translation: 0.3,
            max_rotation_deg: 10.0,
        }
    }
}

/// Simulated instance-detector noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionNoise {
    /// Morphology radius range; negative erodes, positive dilates.
    pub radius_min: i32,
    pub radius_max: i32,
    pub blur_radius: usize,
    /// Label smoothing factor in `[0, 1]`.
    pub smoothing: f64,
}

impl Default for DetectionNoise {
    fn default() -> Self {
        Self {
            radius_min: -2,
            radius_max: 2,
            blur_radius: 1,
            smoothing: 0.1,
        }
    }
}

impl DetectionNoise {
    pub fn none() -> Self {
        Self {
            radius_min: 0,
            radius_max: 0,
            blur_radius: 0,
            smoothing: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationConfig {
    pub width: usize,
    pub height: usize,
    pub hfov_deg: f64,
    pub min_objects: usize,
    pub max_objects: usize,
    pub classes: ClassTable,
    /// Minimum fraction of pixels with two or more layers for a view to be kept.
    pub overlap_threshold: f64,
    pub pose_perturbation: PosePerturbation,
    pub detection_noise: DetectionNoise,
}

impl Default for GenerationConfig {
    fn default() -> Self {
        Self {
            width: 256,
            height: 256,
            hfov_deg: 60.0,
            min_objects: 2,
            max_objects: 5,
            classes: ClassTable::default(),
            overlap_threshold: 0.02,
            pose_perturbation: PosePerturbation::default(),
            detection_noise: DetectionNoise::default(),
        }
    }
}

impl GenerationConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.width < 2 || self.height < 2 {
            return bad("image must be at least 2x2");
        }
        if !(self.hfov_deg > 0.0 && self.hfov_deg < 170.0) {
            return bad("hfov_deg must be in (0, 170)");
        }
        if self.min_objects > self.max_objects {
            return bad("min_objects exceeds max_objects");
        }
        if !(0.0..=1.0).contains(&self.overlap_threshold) {
            return bad("overlap_threshold must be in [0, 1]");
        }
        let p = &self.pose_perturbation;
        if !(p.max_translation >= 0.0 && p.max_rotation_deg >= 0.0) {
            return bad("pose perturbation magnitudes must be >= 0");
        }
        let n = &self.detection_noise;
        if n.radius_min > n.radius_max || !(0.0..=1.0).contains(&n.smoothing) {
            return bad("detection noise ranges are degenerate");
        }
        if self.classes.object_classes().is_empty() {
            return bad("class table has no object classes");
        }
        for id in [CLASS_WALL, CLASS_FLOOR, CLASS_CEILING] {
            if !self.classes.contains(id) {
                return bad("class table lacks the structural wall/floor/ceiling ids 0-2");
            }
        }
        Ok(())
    }
}

fn rgb<T: Real>(rng: &mut impl Rng, lo: f64, hi: f64) -> [T; 3] {
    [0; 3].map(|_| T::of(rng.gen_range(lo..hi)))
}

fn shifted<T: Real>(c: [T; 3], by: f64) -> [T; 3] {
    c.map(|v| (v + T::of(by)).max(T::zero()).min(T::one()))
}

fn random_texture<T: Real>(rng: &mut impl Rng, lo: Vec3<f64>, hi: Vec3<f64>) -> Texture<T> {
    let base = rgb::<T>(rng, 0.15, 0.85);
    match rng.gen_range(0..10) {
        0..=4 => Texture::Solid(base),
        5..=7 => {
            let axis = rng.gen_range(0..3);
            Texture::Gradient {
                a: base,
                b: rgb(rng, 0.15, 0.85),
                axis,
                lo: T::of(lo.axis(axis)),
                hi: T::of(hi.axis(axis)),
            }
        }
        _ => Texture::Checker {
            a: base,
            b: shifted(base, rng.gen_range(-0.12..0.12)),
            cell: T::of(rng.gen_range(0.25..0.5)),
        },
    }
}

/// Samples a room, a camera near one wall looking inward, and objects in front of it.
pub fn random_scene<T: Real>(config: &GenerationConfig, seed: u64) -> Result<SceneSpec<T>> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (w, h, d) = (
        rng.gen_range(4.0..7.0),
        rng.gen_range(2.6..3.2),
        rng.gen_range(5.0..8.0),
    );
    let min = Vec3::new(-w / 2.0, -h, 0.0);
    let max = Vec3::new(w / 2.0, 0.0, d);
    let wall_tex = |rng: &mut ChaCha8Rng| -> Texture<T> {
        let a = rgb(rng, 0.45, 0.9);
        Texture::Gradient {
            a,
            b: shifted(a, rng.gen_range(-0.2..0.2)),
            axis: 1,
            lo: T::of(-h),
            hi: T::zero(),
        }
    };
    let floor_tex = {
        let a = rgb::<T>(&mut rng, 0.25, 0.6);
        Texture::Checker {
            a,
            b: shifted(a, rng.gen_range(-0.08..0.08)),
            cell: T::of(rng.gen_range(0.6..1.0)),
        }
    };
    let ceiling_tex = Texture::Solid(rgb(&mut rng, 0.8, 0.95));
    let face_textures = [
        wall_tex(&mut rng),
        wall_tex(&mut rng),
        ceiling_tex,
        floor_tex,
        wall_tex(&mut rng),
        wall_tex(&mut rng),
    ];
    let room = Room {
        min: Vec3::from_array(min.to_array().map(T::of)),
        max: Vec3::from_array(max.to_array().map(T::of)),
        face_classes: [
            CLASS_WALL,
            CLASS_WALL,
            CLASS_CEILING,
            CLASS_FLOOR,
            CLASS_WALL,
            CLASS_WALL,
        ],
        face_textures,
    };

    let cam_pos = Vec3::new(
        rng.gen_range(-(w / 2.0 - 1.0)..(w / 2.0 - 1.0)),
        -rng.gen_range(1.2..1.7),
        rng.gen_range(0.6..1.0),
    );
    let yaw = rng.gen_range(-20.0f64..20.0).to_radians();
    let pitch = -rng.gen_range(3.0f64..12.0).to_radians();
    let rot = Mat3::<f64>::from_yaw_pitch_roll(yaw, pitch, 0.0);
    let pose64 = Pose {
        rotation: rot,
        translation: cam_pos,
    };
    let camera = Camera::<f64>::centered(config.width, config.height, config.hfov_deg)?;

    let classes = config.classes.object_classes();
    let n_obj = rng.gen_range(config.min_objects..=config.max_objects);
    let mut objects = Vec::with_capacity(n_obj);
    let margin = 0.02;
    let mut attempts = 0;
    while objects.len() < n_obj && attempts < 200 * (n_obj + 1) {
        attempts += 1;
        // Aim at a random pixel of the central region and place the object there.
        let u = rng.gen_range(0.15..0.85) * config.width as f64;
        let v = rng.gen_range(0.3..0.9) * config.height as f64;
        let depth = rng.gen_range(1.8..5.5);
        let target = pose64.apply(camera.unproject(u, v, depth));
        let class_id = classes[rng.gen_range(0..classes.len())];
        let shape = if rng.gen_bool(0.7) {
            let size = Vec3::new(
                rng.gen_range(0.35..1.1),
                rng.gen_range(0.35..1.2),
                rng.gen_range(0.35..1.1),
            );
            let grounded = rng.gen_bool(0.6);
            let y_max = if grounded { -margin } else { target.y + size.y / 2.0 };
            let lo = Vec3::new(target.x - size.x / 2.0, y_max - size.y, target.z - size.z / 2.0);
            Shape::Cuboid {
                min: lo,
                max: lo + size,
            }
        } else {
            Shape::Sphere {
                center: target,
                radius: rng.gen_range(0.2..0.5),
            }
        };
        let inner_lo = min + Vec3::new(margin, margin, margin);
        let inner_hi = max - Vec3::new(margin, margin, margin);
        if !shape.inside(inner_lo, inner_hi) {
            continue;
        }
        // Keep clear of the camera so perturbed target views stay outside objects.
        if shape.distance(cam_pos) < 0.8 {
            continue;
        }
        let (blo, bhi) = shape.bounds();
        let texture = random_texture(&mut rng, blo, bhi);
        objects.push(SceneObject {
            shape: match shape {
                Shape::Cuboid { min, max } => Shape::Cuboid {
                    min: Vec3::from_array(min.to_array().map(T::of)),
                    max: Vec3::from_array(max.to_array().map(T::of)),
                },
                Shape::Sphere { center, radius } => Shape::Sphere {
                    center: Vec3::from_array(center.to_array().map(T::of)),
                    radius: T::of(radius),
                },
            },
            class_id,
            texture,
        });
    }
    let scene = SceneSpec {
        room,
        objects,
        camera: camera.cast(),
        pose: pose64.cast(),
        seed,
    };
    scene.validate()?;
    Ok(scene)
}

/// Renders every object in full plus the layout; objects not visible anywhere
/// in the view are left out.
pub fn generate_view<T: Real>(scene: &SceneSpec<T>, num_classes: usize) -> Result<LayerStack<T>> {
    scene.validate()?;
    let layout = render_layout(scene)?;
    let composite = render_composite(scene)?;
    let mut instances = Vec::new();
    for idx in 0..scene.objects.len() {
        let vis = visibility_of(&composite, idx);
        if !vis.any() {
            continue;
        }
        let image = render_object(scene, idx)?;
        instances.push(InstanceLayer::new(
            image,
            scene.objects[idx].class_id,
            num_classes,
            vis,
            idx,
        ));
    }
    Ok(LayerStack {
        instances,
        layout,
        camera: scene.camera,
        view_pose: scene.pose,
    })
}

/// Fraction of pixels covered by two or more layers.
pub fn overlap_fraction<T: Real>(stack: &LayerStack<T>) -> Result<f64> {
    let ldi = ldi_from_stack(stack)?;
    let total = ldi.width() * ldi.height();
    if total == 0 {
        return Ok(0.0);
    }
    let multi = ldi.counts().filter(|&c| c >= 2).count();
    Ok(multi as f64 / total as f64)
}

/// Keeps a view when its multiply-covered fraction reaches `threshold`.
pub fn overlap_filter<T: Real>(stack: &LayerStack<T>, threshold: f64) -> Result<bool> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::Config(format!("overlap threshold {threshold} outside [0, 1]")));
    }
    Ok(overlap_fraction(stack)? >= threshold)
}

/// Camera motion expressed in the source camera frame: metres and degrees,
/// rotation applied as yaw (ry), pitch (rx), roll (rz).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PoseDelta {
    pub tx: f64,
    pub ty: f64,
    pub tz: f64,
    pub rx: f64,
    pub ry: f64,
    pub rz: f64,
}

impl PoseDelta {
    pub fn to_pose<T: Real>(&self) -> Pose<T> {
        Pose::from_euler_deg(
            [T::of(self.tx), T::of(self.ty), T::of(self.tz)],
            T::of(self.rx),
            T::of(self.ry),
            T::of(self.rz),
        )
    }

    pub fn is_zero(&self) -> bool {
        *self == Self::default()
    }
}

pub fn sample_perturbation(config: &PosePerturbation, seed: u64) -> PoseDelta {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sym = |m: f64| if m > 0.0 { rng.gen_range(-m..=m) } else { 0.0 };
    let (t, r) = (config.max_translation, config.max_rotation_deg);
    PoseDelta {
        tx: sym(t),
        ty: sym(t),
        tz: sym(t),
        rx: sym(r),
        ry: sym(r),
        rz: sym(r),
    }
}

/// Moves the camera by a seeded random delta in its own frame.
pub fn perturb_pose<T: Real>(pose: &Pose<T>, config: &PosePerturbation, seed: u64) -> Pose<T> {
    let delta = sample_perturbation(config, seed);
    if delta.is_zero() {
        return *pose;
    }
    pose.compose(&delta.to_pose())
}
