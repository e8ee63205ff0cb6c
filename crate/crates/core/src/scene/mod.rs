//! Procedural ground-truth scenes: a textured room holding boxes and spheres,
//! ray cast exactly so every layer of a view is known.

mod detect;
mod generate;
mod render;

pub use detect::{apply_detections, simulate_detections, Detection};
pub use generate::{
    generate_view, overlap_filter, overlap_fraction, perturb_pose, random_scene,
    sample_perturbation, DetectionNoise, GenerationConfig, PoseDelta, PosePerturbation,
};
pub use render::{
    render_composite, render_instance, render_layout, render_object, Composite,
};

use serde::{Deserialize, Serialize};

use crate::geometry::{Camera, Pose, Vec3};
use crate::scalar::Real;

/// Category table shared by instances and layout faces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassTable {
    pub classes: Vec<ClassInfo>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassInfo {
    pub id: u32,
    pub name: String,
    /// Structural classes belong to the layout layer.
    pub structural: bool,
}

pub const CLASS_WALL: u32 = 0;
pub const CLASS_FLOOR: u32 = 1;
pub const CLASS_CEILING: u32 = 2;

impl Default for ClassTable {
    fn default() -> Self {
        let names = [
            ("wall", true),
            ("floor", true),
            ("ceiling", true),
            ("cabinet", false),
            ("table", false),
            ("chair", false),
            ("sofa", false),
            ("lamp", false),
            ("ball", false),
        ];
        Self {
            classes: names
                .iter()
                .enumerate()
                .map(|(i, (n, s))| ClassInfo {
                    id: i as u32,
                    name: n.to_string(),
                    structural: *s,
                })
                .collect(),
        }
    }
}

impl ClassTable {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn contains(&self, id: u32) -> bool {
        self.classes.iter().any(|c| c.id == id)
    }

    pub fn by_name(&self, name: &str) -> Option<&ClassInfo> {
        self.classes.iter().find(|c| c.name == name)
    }

    pub fn name(&self, id: u32) -> Option<&str> {
        self.classes.iter().find(|c| c.id == id).map(|c| c.name.as_str())
    }

    pub fn object_classes(&self) -> Vec<u32> {
        self.classes.iter().filter(|c| !c.structural).map(|c| c.id).collect()
    }
}

/// Albedo evaluated at the 3D hit point, so a surface point has one colour
/// from every viewpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Texture<T> {
    Solid([T; 3]),
    /// Alternating cells of side `cell` metres.
    Checker { a: [T; 3], b: [T; 3], cell: T },
    /// Linear blend from `a` at `lo` to `b` at `hi` along world `axis`.
    Gradient {
        a: [T; 3],
        b: [T; 3],
        axis: usize,
        lo: T,
        hi: T,
    },
}

impl<T: Real> Texture<T> {
    /// Colour at `p`. `flat_axis` names the constant coordinate of an
    /// axis-aligned face; it is left out of checker parity so points on the
    /// plane do not flicker between cells.
    pub fn eval(&self, p: Vec3<T>, flat_axis: Option<usize>) -> [T; 3] {
        let c = match *self {
            Texture::Solid(c) => c,
            Texture::Checker { a, b, cell } => {
                let mut parity = 0i64;
                for ax in 0..3 {
                    if Some(ax) == flat_axis {
                        continue;
                    }
                    parity += (p.axis(ax) / cell).floor().to_i64().unwrap_or(0);
                }
                if parity.rem_euclid(2) == 0 {
                    a
                } else {
                    b
                }
            }
            Texture::Gradient { a, b, axis, lo, hi } => {
                let t = ((p.axis(axis) - lo) / (hi - lo)).max(T::zero()).min(T::one());
                [0, 1, 2].map(|i| a[i] + (b[i] - a[i]) * t)
            }
        };
        c.map(quantize8)
    }
}

/// Snaps a channel to the nearest multiple of 1/255.
#[inline]
pub fn quantize8<T: Real>(v: T) -> T {
    let s = T::of(255.0);
    (v.max(T::zero()).min(T::one()) * s).round() / s
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape<T> {
    /// Axis-aligned box.
    Cuboid { min: Vec3<T>, max: Vec3<T> },
    Sphere { center: Vec3<T>, radius: T },
}

impl<T: Real> Shape<T> {
    /// Smallest positive ray parameter of the surface, and the axis of the
    /// box face hit (for spheres `None`).
    pub fn intersect(&self, o: Vec3<T>, d: Vec3<T>) -> Option<(T, Option<usize>)> {
        match *self {
            Shape::Cuboid { min, max } => {
                let (mut t_near, mut t_far) = (T::neg_infinity(), T::infinity());
                let mut axis = 0;
                for ax in 0..3 {
                    let (oa, da, lo, hi) = (o.axis(ax), d.axis(ax), min.axis(ax), max.axis(ax));
                    if da == T::zero() {
                        if oa < lo || oa > hi {
                            return None;
                        }
                        continue;
                    }
                    let (t1, t2) = ((lo - oa) / da, (hi - oa) / da);
                    let (a, b) = if t1 < t2 { (t1, t2) } else { (t2, t1) };
                    if a > t_near {
                        t_near = a;
                        axis = ax;
                    }
                    if b < t_far {
                        t_far = b;
                    }
                }
                if t_near <= t_far && t_near > T::zero() {
                    Some((t_near, Some(axis)))
                } else {
                    None
                }
            }
            Shape::Sphere { center, radius } => {
                let oc = o - center;
                let a = d.dot(d);
                let b = oc.dot(d);
                let c = oc.dot(oc) - radius * radius;
                let disc = b * b - a * c;
                if disc < T::zero() {
                    return None;
                }
                let t = (-b - disc.sqrt()) / a;
                if t > T::zero() {
                    Some((t, None))
                } else {
                    None
                }
            }
        }
    }

    /// True if the shape lies strictly inside the box `[lo, hi]`.
    pub fn inside(&self, lo: Vec3<T>, hi: Vec3<T>) -> bool {
        let (a, b) = self.bounds();
        (0..3).all(|i| a.axis(i) > lo.axis(i) && b.axis(i) < hi.axis(i))
    }

    pub fn bounds(&self) -> (Vec3<T>, Vec3<T>) {
        match *self {
            Shape::Cuboid { min, max } => (min, max),
            Shape::Sphere { center, radius } => {
                let r = Vec3::new(radius, radius, radius);
                (center - r, center + r)
            }
        }
    }

    /// Euclidean distance from `p` to the solid (0 inside).
    pub fn distance(&self, p: Vec3<T>) -> T {
        match *self {
            Shape::Cuboid { min, max } => {
                let q = Vec3::from_array([0, 1, 2].map(|i| {
                    let v = p.axis(i);
                    (min.axis(i) - v).max(v - max.axis(i)).max(T::zero())
                }));
                q.norm()
            }
            Shape::Sphere { center, radius } => ((p - center).norm() - radius).max(T::zero()),
        }
    }

    fn is_valid(&self) -> bool {
        match *self {
            Shape::Cuboid { min, max } => (0..3).all(|i| max.axis(i) > min.axis(i)),
            Shape::Sphere { radius, .. } => radius > T::zero(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SceneObject<T> {
    pub shape: Shape<T>,
    pub class_id: u32,
    pub texture: Texture<T>,
}

/// Room faces in order `-x, +x, -y, +y, -z, +z`. With y pointing down,
/// `-y` is the ceiling and `+y` the floor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Room<T> {
    pub min: Vec3<T>,
    pub max: Vec3<T>,
    pub face_classes: [u32; 6],
    pub face_textures: [Texture<T>; 6],
}

impl<T: Real> Room<T> {
    pub fn contains(&self, p: Vec3<T>) -> bool {
        (0..3).all(|i| p.axis(i) > self.min.axis(i) && p.axis(i) < self.max.axis(i))
    }

    /// Exit parameter and face index of a ray starting inside the room.
    pub fn exit(&self, o: Vec3<T>, d: Vec3<T>) -> (T, usize) {
        let mut best = (T::infinity(), 0);
        for ax in 0..3 {
            let da = d.axis(ax);
            let (t, face) = if da > T::zero() {
                ((self.max.axis(ax) - o.axis(ax)) / da, 2 * ax + 1)
            } else if da < T::zero() {
                ((self.min.axis(ax) - o.axis(ax)) / da, 2 * ax)
            } else {
                continue;
            };
            if t < best.0 {
                best = (t, face);
            }
        }
        best
    }
}

/// Everything needed to render one view of a procedural scene.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneSpec<T> {
    pub room: Room<T>,
    pub objects: Vec<SceneObject<T>>,
    pub camera: Camera<T>,
    /// Camera-to-world pose.
    pub pose: Pose<T>,
    pub seed: u64,
}

impl<T: Real> SceneSpec<T> {
    pub fn validate(&self) -> crate::Result<()> {
        use crate::Error;
        self.camera.validate()?;
        if !self.room.contains(self.pose.translation) {
            return Err(Error::Geometry("camera outside the room".into()));
        }
        for (i, o) in self.objects.iter().enumerate() {
            if !o.shape.is_valid() {
                return Err(Error::Geometry(format!("object {i} has non-positive size")));
            }
            if !o.shape.inside(self.room.min, self.room.max) {
                return Err(Error::Geometry(format!("object {i} leaves the room")));
            }
        }
        Ok(())
    }

    /// Copy keeping only the objects for which `keep(index, object)` holds.
    pub fn filter_objects(&self, mut keep: impl FnMut(usize, &SceneObject<T>) -> bool) -> Self {
        Self {
            objects: self
                .objects
                .iter()
                .enumerate()
                .filter(|(i, o)| keep(*i, o))
                .map(|(_, o)| *o)
                .collect(),
            ..self.clone()
        }
    }

    /// Same scene seen from another camera pose.
    pub fn with_pose(&self, pose: Pose<T>) -> Self {
        Self {
            pose,
            ..self.clone()
        }
    }

    /// World-space ray through pixel `(u, v)`; the parameter equals z-depth.
    #[inline]
    pub fn ray(&self, u: usize, v: usize) -> (Vec3<T>, Vec3<T>) {
        let dir = self.camera.ray_dir(T::of_usize(u), T::of_usize(v));
        (self.pose.translation, self.pose.rotation * dir)
    }
}
