//! Layered depth image engine.
//!
//! Builds per-object layer stacks from procedural scenes, recomposes them by
//! minimum depth pooling, evaluates the completion/layout/re-composition
//! losses, synthesizes novel views from layered depth images and scores the
//! results.
//!
//! Every numeric type is generic over [`Real`] (`f32` or `f64`); the aliases
//! at the crate root fix the scalar for common use.

pub mod compose;
pub mod error;
pub mod geometry;
pub mod grid;
pub mod image;
pub mod io;
pub mod layers;
pub mod ldi;
pub mod losses;
pub mod metrics;
pub mod planes;
pub mod render;
pub mod scalar;
pub mod scene;

pub use compose::{
    apply_displacement, depth_displacement, front_mask, min_depth_pool, recompose_loss,
    ComposeResult, DepthPrior, DEFAULT_ALPHA_MIN,
};
pub use error::{Error, Result};
pub use geometry::{Camera, Mat3, Pose, Vec3};
pub use grid::{Grid, Mask};
pub use image::{Rgbad, RgbadImage};
pub use layers::{
    crop_borders, pad_borders, pad_borders_default, InstanceLayer, LayerStack, LayoutLayer,
};
pub use ldi::{first_layer, ldi_from_image, ldi_from_stack, Ldi, LdiSample};
pub use scalar::Real;

pub type RgbadImageF64 = RgbadImage<f64>;
pub type RgbadImageF32 = RgbadImage<f32>;
pub type LayerStackF64 = LayerStack<f64>;
pub type LayerStackF32 = LayerStack<f32>;
pub type LdiF64 = Ldi<f64>;
pub type LdiF32 = Ldi<f32>;
pub type CameraF64 = Camera<f64>;
pub type CameraF32 = Camera<f32>;
pub type PoseF64 = Pose<f64>;
pub type PoseF32 = Pose<f32>;
pub type SceneSpecF64 = scene::SceneSpec<f64>;
pub type SceneSpecF32 = scene::SceneSpec<f32>;
pub type ComposeResultF64 = ComposeResult<f64>;
pub type ComposeResultF32 = ComposeResult<f32>;
