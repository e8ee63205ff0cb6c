use rayon::prelude::*;

use super::{SceneSpec, Shape};
use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::grid::{Grid, Mask};
use crate::image::{Rgbad, RgbadImage};
use crate::layers::{InstanceLayer, LayoutLayer};
use crate::scalar::Real;

/// Renders rows in parallel; each pixel depends only on its own ray.
pub(crate) fn par_render<V: Send>(
    width: usize,
    height: usize,
    f: impl Fn(usize, usize) -> V + Sync,
) -> Vec<V> {
    (0..height)
        .into_par_iter()
        .flat_map_iter(|y| (0..width).map(move |x| (x, y)))
        .map(|(x, y)| f(x, y))
        .collect()
}

#[inline]
fn shade<T: Real>(rgb: [T; 3], depth: T) -> Rgbad<T> {
    Rgbad::new([rgb[0], rgb[1], rgb[2], T::one()], depth)
}

#[inline]
fn object_sample<T: Real>(scene: &SceneSpec<T>, idx: usize, o: Vec3<T>, d: Vec3<T>) -> Option<Rgbad<T>> {
    let obj = &scene.objects[idx];
    let (s, flat) = obj.shape.intersect(o, d)?;
    let flat = match obj.shape {
        Shape::Cuboid { .. } => flat,
        Shape::Sphere { .. } => None,
    };
    Some(shade(obj.texture.eval(o + d.scale(s), flat), s))
}

#[inline]
fn layout_sample<T: Real>(scene: &SceneSpec<T>, o: Vec3<T>, d: Vec3<T>) -> Rgbad<T> {
    let (s, face) = scene.room.exit(o, d);
    shade(
        scene.room.face_textures[face].eval(o + d.scale(s), Some(face / 2)),
        s,
    )
}

/// Full-visibility render of one object: its primitive alone, nothing occludes it.
pub fn render_object<T: Real>(scene: &SceneSpec<T>, idx: usize) -> Result<RgbadImage<T>> {
    if idx >= scene.objects.len() {
        return Err(Error::IndexOutOfRange {
            index: idx,
            len: scene.objects.len(),
        });
    }
    let cam = &scene.camera;
    let px = par_render(cam.width, cam.height, |x, y| {
        let (o, d) = scene.ray(x, y);
        object_sample(scene, idx, o, d)
    });
    Ok(RgbadImage::from_pixels(cam.width, cam.height, px))
}

/// Nearest room face per pixel; hole-free.
pub fn render_layout<T: Real>(scene: &SceneSpec<T>) -> Result<LayoutLayer<T>> {
    if !scene.room.contains(scene.pose.translation) {
        return Err(Error::Geometry("camera outside the room".into()));
    }
    let cam = &scene.camera;
    let px = par_render(cam.width, cam.height, |x, y| {
        let (o, d) = scene.ray(x, y);
        Some(layout_sample(scene, o, d))
    });
    let mut structural: Vec<u32> = scene.room.face_classes.to_vec();
    structural.sort_unstable();
    structural.dedup();
    Ok(LayoutLayer {
        image: RgbadImage::from_pixels(cam.width, cam.height, px),
        structural_classes: structural,
    })
}

/// Single-pass render of the whole scene.
#[derive(Debug, Clone, PartialEq)]
pub struct Composite<T> {
    pub image: RgbadImage<T>,
    /// Object index of the visible surface; `objects.len()` for the room.
    pub index_map: Grid<usize>,
}

/// Nearest surface among all objects and the room. Equal depths go to the
/// lower object index, and objects win ties against the room.
pub fn render_composite<T: Real>(scene: &SceneSpec<T>) -> Result<Composite<T>> {
    if !scene.room.contains(scene.pose.translation) {
        return Err(Error::Geometry("camera outside the room".into()));
    }
    let cam = &scene.camera;
    let n = scene.objects.len();
    let px = par_render(cam.width, cam.height, |x, y| {
        let (o, d) = scene.ray(x, y);
        let mut best: Option<(T, usize)> = None;
        for (i, obj) in scene.objects.iter().enumerate() {
            if let Some((s, _)) = obj.shape.intersect(o, d) {
                if best.is_none_or(|(b, _)| s < b) {
                    best = Some((s, i));
                }
            }
        }
        let room = layout_sample(scene, o, d);
        match best {
            Some((s, i)) if s <= room.depth => {
                (object_sample(scene, i, o, d).expect("hit re-evaluates"), i)
            }
            _ => (room, n),
        }
    });
    let (pixels, index): (Vec<_>, Vec<_>) = px.into_iter().map(|(p, i)| (Some(p), i)).unzip();
    Ok(Composite {
        image: RgbadImage::from_pixels(cam.width, cam.height, pixels),
        index_map: Grid::from_vec(cam.width, cam.height, index),
    })
}

pub(crate) fn visibility_of(composite: &Composite<impl Real>, idx: usize) -> Mask {
    composite.index_map.map(|&i| i == idx)
}

/// Full-visibility layer of object `idx` with its visibility mask in the
/// composite view.
pub fn render_instance<T: Real>(
    scene: &SceneSpec<T>,
    idx: usize,
    num_classes: usize,
) -> Result<InstanceLayer<T>> {
    let image = render_object(scene, idx)?;
    let composite = render_composite(scene)?;
    let vis = visibility_of(&composite, idx);
    Ok(InstanceLayer::new(
        image,
        scene.objects[idx].class_id,
        num_classes,
        vis,
        idx,
    ))
}
