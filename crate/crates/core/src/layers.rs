//! Per-object layer decomposition of a single view.

use crate::error::{check_dims, Error, Result};
use crate::geometry::{Camera, Pose};
use crate::grid::{Grid, Mask};
use crate::image::RgbadImage;
use crate::scalar::Real;

/// Padding used around network inputs: 16 px top/bottom, 12 px left/right.
pub const DEFAULT_PAD_TOP_BOTTOM: usize = 16;
pub const DEFAULT_PAD_LEFT_RIGHT: usize = 12;

/// One object rendered in full, including the parts hidden in the composite.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceLayer<T> {
    pub image: RgbadImage<T>,
    pub class_id: u32,
    pub class_scores: Vec<T>,
    /// Pixels where this instance is the front-most surface of the view.
    pub visibility_mask: Mask,
    /// Soft detector mask in `[0, 1]`.
    pub confidence_mask: Grid<T>,
    /// Index of the primitive in the scene description it was rendered from.
    pub object_index: usize,
    /// True when the full-visibility silhouette reaches the image border.
    pub touches_border: bool,
}

impl<T: Real> InstanceLayer<T> {
    /// Layer with ground-truth detector fields: confidence equals visibility, one-hot scores.
    pub fn new(
        image: RgbadImage<T>,
        class_id: u32,
        num_classes: usize,
        visibility_mask: Mask,
        object_index: usize,
    ) -> Self {
        let touches_border = image.valid_mask().touches_border();
        let confidence_mask = visibility_mask.map(|&v| if v { T::one() } else { T::zero() });
        let mut class_scores = vec![T::zero(); num_classes];
        if let Some(s) = class_scores.get_mut(class_id as usize) {
            *s = T::one();
        }
        Self {
            image,
            class_id,
            class_scores,
            visibility_mask,
            confidence_mask,
            object_index,
            touches_border,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.image.validate()?;
        check_dims(self.image.dims(), self.visibility_mask.dims())?;
        check_dims(self.image.dims(), self.confidence_mask.dims())?;
        if self
            .visibility_mask
            .and_not(self.image.valid_mask())?
            .any()
        {
            return Err(Error::Invariant(
                "visibility mask extends outside the layer".into(),
            ));
        }
        let sum: f64 = self.class_scores.iter().map(|s| s.to64()).sum();
        if self.class_scores.iter().any(|s| *s < T::zero()) || (sum - 1.0).abs() > 1e-6 {
            return Err(Error::Invariant(format!(
                "class scores must be a probability vector (sum {sum})"
            )));
        }
        Ok(())
    }
}

/// The object-free room shell merged into one hole-free layer.
#[derive(Debug, Clone, PartialEq)]
pub struct LayoutLayer<T> {
    pub image: RgbadImage<T>,
    pub structural_classes: Vec<u32>,
}

/// Instance layers plus layout for one view. Instance order is the tie-break order.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerStack<T> {
    pub instances: Vec<InstanceLayer<T>>,
    pub layout: LayoutLayer<T>,
    pub camera: Camera<T>,
    pub view_pose: Pose<T>,
}

impl<T: Real> LayerStack<T> {
    pub fn width(&self) -> usize {
        self.layout.image.width()
    }

    pub fn height(&self) -> usize {
        self.layout.image.height()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.layout.image.dims()
    }

    /// Instances followed by the layout.
    pub fn num_layers(&self) -> usize {
        self.instances.len() + 1
    }

    /// Layer `i`; `i == instances.len()` is the layout.
    pub fn layer_image(&self, i: usize) -> &RgbadImage<T> {
        if i < self.instances.len() {
            &self.instances[i].image
        } else {
            &self.layout.image
        }
    }

    pub fn layout_index(&self) -> usize {
        self.instances.len()
    }

    /// Every raster and the camera must match the layout size.
    pub fn check_dims(&self) -> Result<()> {
        let d = self.dims();
        check_dims(d, (self.camera.width, self.camera.height))?;
        for inst in &self.instances {
            check_dims(d, inst.image.dims())?;
            check_dims(d, inst.visibility_mask.dims())?;
            check_dims(d, inst.confidence_mask.dims())?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.check_dims()?;
        self.layout.image.validate()?;
        for inst in &self.instances {
            inst.validate()?;
        }
        self.camera.validate()?;
        self.view_pose.validate(T::of(1e-9))
    }

    /// Same stack without the instances rejected by `keep`.
    pub fn retain_instances(&self, mut keep: impl FnMut(&InstanceLayer<T>) -> bool) -> Self {
        Self {
            instances: self.instances.iter().filter(|i| keep(i)).cloned().collect(),
            ..self.clone()
        }
    }
}

/// Enlarges every raster with invalid bands and shifts the principal point.
pub fn pad_borders<T: Real>(stack: &LayerStack<T>, top_bottom: usize, left_right: usize) -> LayerStack<T> {
    let (tb, lr) = (top_bottom, left_right);
    let pad_mask = |m: &Mask| -> Mask {
        Grid::from_fn(m.width() + 2 * lr, m.height() + 2 * tb, |x, y| {
            x >= lr && y >= tb && x - lr < m.width() && y - tb < m.height() && *m.get(x - lr, y - tb)
        })
    };
    let pad_grid = |g: &Grid<T>| -> Grid<T> {
        Grid::from_fn(g.width() + 2 * lr, g.height() + 2 * tb, |x, y| {
            if x >= lr && y >= tb && x - lr < g.width() && y - tb < g.height() {
                *g.get(x - lr, y - tb)
            } else {
                T::zero()
            }
        })
    };
    LayerStack {
        instances: stack
            .instances
            .iter()
            .map(|inst| InstanceLayer {
                image: inst.image.pad(tb, tb, lr, lr),
                visibility_mask: pad_mask(&inst.visibility_mask),
                confidence_mask: pad_grid(&inst.confidence_mask),
                ..inst.clone()
            })
            .collect(),
        layout: LayoutLayer {
            image: stack.layout.image.pad(tb, tb, lr, lr),
            structural_classes: stack.layout.structural_classes.clone(),
        },
        camera: stack.camera.padded(tb, lr),
        view_pose: stack.view_pose,
    }
}

/// [`pad_borders`] with the default 16/12 bands.
pub fn pad_borders_default<T: Real>(stack: &LayerStack<T>) -> LayerStack<T> {
    pad_borders(stack, DEFAULT_PAD_TOP_BOTTOM, DEFAULT_PAD_LEFT_RIGHT)
}

/// Removes bands added by [`pad_borders`].
pub fn crop_borders<T: Real>(
    stack: &LayerStack<T>,
    top_bottom: usize,
    left_right: usize,
) -> Result<LayerStack<T>> {
    let (tb, lr) = (top_bottom, left_right);
    let (w, h) = stack.dims();
    if w < 2 * lr || h < 2 * tb {
        return Err(Error::Geometry(format!("cannot crop {lr}/{tb} bands from {w}x{h}")));
    }
    let (cw, ch) = (w - 2 * lr, h - 2 * tb);
    let crop_img = |img: &RgbadImage<T>| img.crop(lr, tb, cw, ch);
    let mut instances = Vec::with_capacity(stack.instances.len());
    for inst in &stack.instances {
        instances.push(InstanceLayer {
            image: crop_img(&inst.image)?,
            visibility_mask: Grid::from_fn(cw, ch, |x, y| *inst.visibility_mask.get(x + lr, y + tb)),
            confidence_mask: Grid::from_fn(cw, ch, |x, y| *inst.confidence_mask.get(x + lr, y + tb)),
            ..inst.clone()
        });
    }
    let camera = Camera {
        cx: stack.camera.cx - T::of_usize(lr),
        cy: stack.camera.cy - T::of_usize(tb),
        width: cw,
        height: ch,
        ..stack.camera
    };
    Ok(LayerStack {
        instances,
        layout: LayoutLayer {
            image: crop_img(&stack.layout.image)?,
            structural_classes: stack.layout.structural_classes.clone(),
        },
        camera,
        view_pose: stack.view_pose,
    })
}
