use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::png::{
    load_gray_png, load_mask_png, load_rgba_depth, save_gray_png, save_mask_png, save_rgba_depth,
};
use super::{io_err, read_json, require, write_json};
use crate::compose::{min_depth_pool, DEFAULT_ALPHA_MIN};
use crate::error::{check_dims, Error, Result};
use crate::geometry::{Camera, Mat3, Pose, Vec3};
use crate::layers::{InstanceLayer, LayerStack, LayoutLayer};
use crate::scalar::Real;
use crate::scene::{ClassTable, Detection, PoseDelta};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraRecord {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoseRecord {
    /// Row-major camera-to-world rotation.
    pub rotation: [[f64; 3]; 3],
    pub translation: [f64; 3],
}

impl PoseRecord {
    pub fn from_pose<T: Real>(p: &Pose<T>) -> Self {
        Self {
            rotation: p.rotation.m.map(|r| r.map(Real::to64)),
            translation: p.translation.to_array().map(Real::to64),
        }
    }

    pub fn to_pose<T: Real>(&self) -> Pose<T> {
        Pose {
            rotation: Mat3 {
                m: self.rotation.map(|r| r.map(T::of)),
            },
            translation: Vec3::from_array(self.translation.map(T::of)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceMeta {
    pub dir: String,
    pub object_index: usize,
    pub class_id: u32,
    pub class_scores: Vec<f64>,
    pub touches_border: bool,
}

/// Contents of `manifest.json`. Field order is the on-disk key order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format_version: u32,
    pub width: usize,
    pub height: usize,
    pub camera: CameraRecord,
    pub view_pose: PoseRecord,
    pub classes: ClassTable,
    pub layout_classes: Vec<u32>,
    pub seed: u64,
    /// Fraction of pixels covered by two or more layers.
    pub overlap: f64,
    pub instances: Vec<InstanceMeta>,
    /// Camera motion of the stored target view, if one was written.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<PoseDelta>,
}

/// Dataset-level facts stored next to a stack.
#[derive(Debug, Clone, PartialEq)]
pub struct StackMetadata {
    pub classes: ClassTable,
    pub seed: u64,
    pub overlap: f64,
    pub target: Option<PoseDelta>,
}

/// A stack read back from disk with its detections and manifest.
#[derive(Debug, Clone)]
pub struct LoadedStack<T> {
    pub stack: LayerStack<T>,
    pub detections: Vec<Detection<T>>,
    pub manifest: Manifest,
}

fn mkdir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(io_err(path))
}

/// Writes a stack directory. `detections`, when given, replace the stack's
/// own confidence masks and class scores.
pub fn save_stack<T: Real>(
    stack: &LayerStack<T>,
    detections: Option<&[Detection<T>]>,
    meta: &StackMetadata,
    dir: &Path,
) -> Result<Manifest> {
    stack.check_dims()?;
    if let Some(d) = detections {
        if d.len() != stack.instances.len() {
            return Err(Error::Config(format!(
                "{} detections for {} instances",
                d.len(),
                stack.instances.len()
            )));
        }
    }
    for inst in &stack.instances {
        if !meta.classes.contains(inst.class_id) {
            return Err(Error::Config(format!("class id {} not in table", inst.class_id)));
        }
    }
    mkdir(dir)?;
    let full = min_depth_pool(stack, T::of(DEFAULT_ALPHA_MIN))?;
    mkdir(&dir.join("full"))?;
    save_rgba_depth(&dir.join("full"), &full.image)?;
    mkdir(&dir.join("layout"))?;
    save_rgba_depth(&dir.join("layout"), &stack.layout.image)?;

    let mut instances = Vec::with_capacity(stack.instances.len());
    for (i, inst) in stack.instances.iter().enumerate() {
        let name = format!("{i:03}");
        let idir = dir.join("instances").join(&name);
        mkdir(&idir)?;
        save_rgba_depth(&idir, &inst.image)?;
        save_mask_png(&idir.join("mask.png"), &inst.visibility_mask)?;
        let (conf, scores) = match detections {
            Some(d) => (&d[i].confidence_mask, &d[i].class_scores),
            None => (&inst.confidence_mask, &inst.class_scores),
        };
        save_gray_png(&idir.join("conf.png"), conf)?;
        let m = InstanceMeta {
            dir: name,
            object_index: inst.object_index,
            class_id: inst.class_id,
            class_scores: scores.iter().map(|s| s.to64()).collect(),
            touches_border: inst.touches_border,
        };
        write_json(&idir.join("meta.json"), &m)?;
        instances.push(m);
    }
    let cam = &stack.camera;
    let manifest = Manifest {
        format_version: FORMAT_VERSION,
        width: stack.width(),
        height: stack.height(),
        camera: CameraRecord {
            fx: cam.fx.to64(),
            fy: cam.fy.to64(),
            cx: cam.cx.to64(),
            cy: cam.cy.to64(),
        },
        view_pose: PoseRecord::from_pose(&stack.view_pose),
        classes: meta.classes.clone(),
        layout_classes: stack.layout.structural_classes.clone(),
        seed: meta.seed,
        overlap: meta.overlap,
        instances,
        target: meta.target,
    };
    write_json(&dir.join("manifest.json"), &manifest)?;
    Ok(manifest)
}

pub fn load_manifest(dir: &Path) -> Result<Manifest> {
    let manifest: Manifest = read_json(&dir.join("manifest.json"))?;
    if manifest.format_version != FORMAT_VERSION {
        return Err(Error::Version {
            found: manifest.format_version,
            expected: FORMAT_VERSION,
        });
    }
    Ok(manifest)
}

/// Reads a directory written by [`save_stack`]. Colours come back quantized
/// to 1/255 and depths to millimetres.
pub fn load_stack<T: Real>(dir: &Path) -> Result<LoadedStack<T>> {
    let manifest = load_manifest(dir)?;
    let dims = (manifest.width, manifest.height);
    let c = &manifest.camera;
    let camera = Camera::new(
        T::of(c.fx),
        T::of(c.fy),
        T::of(c.cx),
        T::of(c.cy),
        manifest.width,
        manifest.height,
    )?;
    let layout_img = load_rgba_depth::<T>(&dir.join("layout"))?;
    check_dims(dims, layout_img.dims())?;
    let mut instances = Vec::with_capacity(manifest.instances.len());
    let mut detections = Vec::with_capacity(manifest.instances.len());
    for m in &manifest.instances {
        if !manifest.classes.contains(m.class_id) {
            return Err(Error::Config(format!("class id {} not in table", m.class_id)));
        }
        let idir = dir.join("instances").join(&m.dir);
        require(&idir)?;
        let image = load_rgba_depth::<T>(&idir)?;
        check_dims(dims, image.dims())?;
        let visibility_mask = load_mask_png(&idir.join("mask.png"))?;
        check_dims(dims, visibility_mask.dims())?;
        let confidence_mask = load_gray_png::<T>(&idir.join("conf.png"))?;
        check_dims(dims, confidence_mask.dims())?;
        let class_scores: Vec<T> = m.class_scores.iter().map(|&s| T::of(s)).collect();
        detections.push(Detection {
            confidence_mask: confidence_mask.clone(),
            class_scores: class_scores.clone(),
        });
        instances.push(InstanceLayer {
            image,
            class_id: m.class_id,
            class_scores,
            visibility_mask,
            confidence_mask,
            object_index: m.object_index,
            touches_border: m.touches_border,
        });
    }
    let stack = LayerStack {
        instances,
        layout: LayoutLayer {
            image: layout_img,
            structural_classes: manifest.layout_classes.clone(),
        },
        camera,
        view_pose: manifest.view_pose.to_pose(),
    };
    Ok(LoadedStack {
        stack,
        detections,
        manifest,
    })
}
