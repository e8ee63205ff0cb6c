//! Layered depth images: per-pixel sample lists ordered near to far.

use crate::error::{Error, Result};
use crate::image::{Rgbad, RgbadImage};
use crate::layers::LayerStack;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LdiSample<T> {
    pub rgba: [T; 4],
    pub depth: T,
    /// Stack layer the sample came from (instances first, layout last).
    pub layer: u16,
}

impl<T: Real> LdiSample<T> {
    pub fn rgbad(&self) -> Rgbad<T> {
        Rgbad::new(self.rgba, self.depth)
    }
}

/// Ragged per-pixel sample lists in compressed row storage.
#[derive(Debug, Clone, PartialEq)]
pub struct Ldi<T> {
    width: usize,
    height: usize,
    /// `offsets[i]..offsets[i + 1]` indexes the samples of pixel `i`.
    offsets: Vec<usize>,
    samples: Vec<LdiSample<T>>,
}

impl<T: Real> Ldi<T> {
    pub fn empty(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            offsets: vec![0; width * height + 1],
            samples: Vec::new(),
        }
    }

    /// Builds from per-pixel lists, checking depth order.
    pub fn from_lists(width: usize, height: usize, lists: Vec<Vec<LdiSample<T>>>) -> Result<Self> {
        if lists.len() != width * height {
            return Err(Error::dims((width * height, 1), (lists.len(), 1)));
        }
        let mut offsets = Vec::with_capacity(lists.len() + 1);
        offsets.push(0);
        let mut samples = Vec::new();
        for list in lists {
            samples.extend(list);
            offsets.push(samples.len());
        }
        let ldi = Self {
            width,
            height,
            offsets,
            samples,
        };
        ldi.validate()?;
        Ok(ldi)
    }

    /// Builds from per-pixel counts and the flat sample array.
    pub fn from_counts(
        width: usize,
        height: usize,
        counts: &[usize],
        samples: Vec<LdiSample<T>>,
    ) -> Result<Self> {
        if counts.len() != width * height {
            return Err(Error::dims((width * height, 1), (counts.len(), 1)));
        }
        let mut offsets = Vec::with_capacity(counts.len() + 1);
        offsets.push(0);
        let mut acc = 0;
        for &c in counts {
            acc += c;
            offsets.push(acc);
        }
        if acc != samples.len() {
            return Err(Error::Truncated(format!(
                "counts sum to {acc} but {} samples present",
                samples.len()
            )));
        }
        let ldi = Self {
            width,
            height,
            offsets,
            samples,
        };
        ldi.validate()?;
        Ok(ldi)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn samples_at(&self, x: usize, y: usize) -> &[LdiSample<T>] {
        let i = y * self.width + x;
        &self.samples[self.offsets[i]..self.offsets[i + 1]]
    }

    #[inline]
    pub fn count_at(&self, x: usize, y: usize) -> usize {
        let i = y * self.width + x;
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn counts(&self) -> impl Iterator<Item = usize> + '_ {
        self.offsets.windows(2).map(|w| w[1] - w[0])
    }

    pub fn samples(&self) -> &[LdiSample<T>] {
        &self.samples
    }

    pub fn total_samples(&self) -> usize {
        self.samples.len()
    }

    /// Largest per-pixel sample count.
    pub fn max_depth_complexity(&self) -> usize {
        self.counts().max().unwrap_or(0)
    }

    /// The `rank`-th (0-based) samples as a raster.
    pub fn layer(&self, rank: usize) -> RgbadImage<T> {
        RgbadImage::from_fn(self.width, self.height, |x, y| {
            self.samples_at(x, y).get(rank).map(LdiSample::rgbad)
        })
    }

    /// Depths must be non-decreasing within each pixel.
    pub fn validate(&self) -> Result<()> {
        for i in 0..self.width * self.height {
            let px = &self.samples[self.offsets[i]..self.offsets[i + 1]];
            if px.iter().any(|s| !s.depth.is_finite() || s.rgba.iter().any(|c| !c.is_finite())) {
                return Err(Error::Invariant(format!("non-finite LDI sample at pixel {i}")));
            }
            if px.windows(2).any(|w| w[1].depth < w[0].depth) {
                return Err(Error::Invariant(format!("LDI depths out of order at pixel {i}")));
            }
        }
        Ok(())
    }

    pub fn cast<U: Real>(&self) -> Ldi<U> {
        Ldi {
            width: self.width,
            height: self.height,
            offsets: self.offsets.clone(),
            samples: self
                .samples
                .iter()
                .map(|s| LdiSample {
                    rgba: s.rgba.map(|v| U::of(v.to64())),
                    depth: U::of(s.depth.to64()),
                    layer: s.layer,
                })
                .collect(),
        }
    }
}

/// One-layer LDI holding the valid pixels of `image`.
pub fn ldi_from_image<T: Real>(image: &RgbadImage<T>, layer: u16) -> Ldi<T> {
    let (w, h) = image.dims();
    let mut offsets = Vec::with_capacity(w * h + 1);
    let mut samples = Vec::new();
    offsets.push(0);
    for y in 0..h {
        for x in 0..w {
            if let Some(p) = image.sample(x, y) {
                samples.push(LdiSample {
                    rgba: p.rgba,
                    depth: p.depth,
                    layer,
                });
            }
            offsets.push(samples.len());
        }
    }
    Ldi {
        width: w,
        height: h,
        offsets,
        samples,
    }
}

/// Sorts every valid layer sample near to far. Equal depths keep layer order,
/// so smaller instance indices come first and the layout comes last.
pub fn ldi_from_stack<T: Real>(stack: &LayerStack<T>) -> Result<Ldi<T>> {
    ldi_from_stack_thresholded(stack, T::zero())
}

/// [`ldi_from_stack`] keeping only samples whose alpha reaches `alpha_min`.
pub fn ldi_from_stack_thresholded<T: Real>(stack: &LayerStack<T>, alpha_min: T) -> Result<Ldi<T>> {
    stack.check_dims()?;
    let (w, h) = stack.dims();
    let n = stack.num_layers();
    let mut offsets = Vec::with_capacity(w * h + 1);
    let mut samples = Vec::new();
    offsets.push(0);
    let mut scratch: Vec<LdiSample<T>> = Vec::with_capacity(n);
    for y in 0..h {
        for x in 0..w {
            scratch.clear();
            for l in 0..n {
                if let Some(p) = stack.layer_image(l).sample(x, y) {
                    if p.rgba[3] >= alpha_min {
                        scratch.push(LdiSample {
                            rgba: p.rgba,
                            depth: p.depth,
                            layer: l as u16,
                        });
                    }
                }
            }
            // Stable sort keeps layer order among equal depths.
            scratch.sort_by(|a, b| a.depth.partial_cmp(&b.depth).expect("finite depths"));
            samples.extend_from_slice(&scratch);
            offsets.push(samples.len());
        }
    }
    Ok(Ldi {
        width: w,
        height: h,
        offsets,
        samples,
    })
}

/// Front-most sample per pixel.
pub fn first_layer<T: Real>(ldi: &Ldi<T>) -> RgbadImage<T> {
    ldi.layer(0)
}
