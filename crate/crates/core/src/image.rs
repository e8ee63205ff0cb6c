//! Five-channel RGBA + depth rasters with per-pixel validity.

use crate::error::{check_dims, Error, Result};
use crate::grid::{Grid, Mask};
use crate::scalar::Real;

/// One pixel's content: colour and alpha in `[0, 1]`, z-depth in metres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rgbad<T> {
    pub rgba: [T; 4],
    pub depth: T,
}

impl<T: Real> Rgbad<T> {
    pub fn new(rgba: [T; 4], depth: T) -> Self {
        Self { rgba, depth }
    }

    pub fn zero() -> Self {
        Self {
            rgba: [T::zero(); 4],
            depth: T::zero(),
        }
    }

    #[inline]
    pub fn channel(&self, c: usize) -> T {
        if c < 4 {
            self.rgba[c]
        } else {
            self.depth
        }
    }

    #[inline]
    pub fn channel_mut(&mut self, c: usize) -> &mut T {
        if c < 4 {
            &mut self.rgba[c]
        } else {
            &mut self.depth
        }
    }
}

/// RGBA-D raster. Invalid pixels always hold the zero sentinel.
#[derive(Debug, Clone, PartialEq)]
pub struct RgbadImage<T> {
    pixels: Grid<Rgbad<T>>,
    valid: Mask,
}

impl<T: Real> RgbadImage<T> {
    /// All-invalid raster.
    pub fn empty(width: usize, height: usize) -> Self {
        Self {
            pixels: Grid::filled(width, height, Rgbad::zero()),
            valid: Mask::filled(width, height, false),
        }
    }

    /// Builds a raster from per-pixel optional content.
    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> Option<Rgbad<T>>,
    ) -> Self {
        let mut img = Self::empty(width, height);
        for y in 0..height {
            for x in 0..width {
                if let Some(px) = f(x, y) {
                    img.set(x, y, px);
                }
            }
        }
        img
    }

    /// Builds from row-major optional pixels.
    pub fn from_pixels(width: usize, height: usize, pixels: Vec<Option<Rgbad<T>>>) -> Self {
        assert_eq!(pixels.len(), width * height, "pixel count");
        let valid = Grid::from_vec(width, height, pixels.iter().map(Option::is_some).collect());
        let pixels = Grid::from_vec(
            width,
            height,
            pixels.into_iter().map(|p| p.unwrap_or_else(Rgbad::zero)).collect(),
        );
        Self { pixels, valid }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.pixels.width()
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.pixels.height()
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        self.pixels.dims()
    }

    #[inline]
    pub fn is_valid(&self, x: usize, y: usize) -> bool {
        *self.valid.get(x, y)
    }

    #[inline]
    pub fn pixel(&self, x: usize, y: usize) -> &Rgbad<T> {
        self.pixels.get(x, y)
    }

    /// The pixel if valid.
    #[inline]
    pub fn sample(&self, x: usize, y: usize) -> Option<&Rgbad<T>> {
        if self.is_valid(x, y) {
            Some(self.pixels.get(x, y))
        } else {
            None
        }
    }

    #[inline]
    pub fn depth(&self, x: usize, y: usize) -> T {
        self.pixels.get(x, y).depth
    }

    pub fn set(&mut self, x: usize, y: usize, px: Rgbad<T>) {
        self.pixels.set(x, y, px);
        self.valid.set(x, y, true);
    }

    pub fn clear(&mut self, x: usize, y: usize) {
        self.pixels.set(x, y, Rgbad::zero());
        self.valid.set(x, y, false);
    }

    pub fn pixels(&self) -> &Grid<Rgbad<T>> {
        &self.pixels
    }

    pub fn valid_mask(&self) -> &Mask {
        &self.valid
    }

    pub fn valid_count(&self) -> usize {
        self.valid.count()
    }

    /// Depth channel as a raster (zero where invalid).
    pub fn depth_grid(&self) -> Grid<T> {
        self.pixels.map(|p| p.depth)
    }

    /// Channel `c` (0..=3 colour/alpha, 4 depth) as a raster.
    pub fn channel_grid(&self, c: usize) -> Grid<T> {
        self.pixels.map(|p| p.channel(c))
    }

    /// Replaces depths on valid pixels; invalid pixels keep the sentinel.
    pub fn with_depth(&self, depth: &Grid<T>) -> Result<Self> {
        check_dims(self.dims(), depth.dims())?;
        let mut out = self.clone();
        for (i, px) in out.pixels.as_mut_slice().iter_mut().enumerate() {
            if self.valid.as_slice()[i] {
                px.depth = depth.as_slice()[i];
            }
        }
        Ok(out)
    }

    /// Valid pixels whose alpha reaches `alpha_min`.
    pub fn present_mask(&self, alpha_min: T) -> Mask {
        Grid::from_vec(
            self.width(),
            self.height(),
            self.pixels
                .as_slice()
                .iter()
                .zip(self.valid.as_slice())
                .map(|(p, &v)| v && p.rgba[3] >= alpha_min)
                .collect(),
        )
    }

    /// Copy with every pixel outside `mask` invalidated.
    pub fn masked(&self, mask: &Mask) -> Result<Self> {
        self.valid.check_same_dims(mask)?;
        let mut out = self.clone();
        for y in 0..self.height() {
            for x in 0..self.width() {
                if !*mask.get(x, y) {
                    out.clear(x, y);
                }
            }
        }
        Ok(out)
    }

    /// Places this raster inside a larger invalid canvas.
    pub fn pad(&self, top: usize, bottom: usize, left: usize, right: usize) -> Self {
        let (w, h) = self.dims();
        let mut out = Self::empty(w + left + right, h + top + bottom);
        for y in 0..h {
            for x in 0..w {
                if let Some(px) = self.sample(x, y) {
                    out.set(x + left, y + top, *px);
                }
            }
        }
        out
    }

    /// Window `[x0, x0+w) x [y0, y0+h)`.
    pub fn crop(&self, x0: usize, y0: usize, w: usize, h: usize) -> Result<Self> {
        if x0 + w > self.width() || y0 + h > self.height() {
            return Err(Error::Geometry(format!(
                "crop {w}x{h}+{x0}+{y0} exceeds {}x{}",
                self.width(),
                self.height()
            )));
        }
        Ok(Self::from_fn(w, h, |x, y| self.sample(x + x0, y + y0).copied()))
    }

    pub fn cast<U: Real>(&self) -> RgbadImage<U> {
        let conv = |p: &Rgbad<T>| Rgbad {
            rgba: p.rgba.map(|v| U::of(v.to64())),
            depth: U::of(p.depth.to64()),
        };
        RgbadImage {
            pixels: self.pixels.map(conv),
            valid: self.valid.clone(),
        }
    }

    /// Checks the sentinel, range and finiteness invariants.
    pub fn validate(&self) -> Result<()> {
        for (i, (p, &v)) in self
            .pixels
            .as_slice()
            .iter()
            .zip(self.valid.as_slice())
            .enumerate()
        {
            let finite = p.rgba.iter().all(|c| c.is_finite()) && p.depth.is_finite();
            if !finite {
                return Err(Error::Invariant(format!("non-finite value at pixel {i}")));
            }
            if v {
                if p.depth <= T::zero() {
                    return Err(Error::Invariant(format!("valid pixel {i} has depth <= 0")));
                }
                if p.rgba[3] < T::zero() || p.rgba[3] > T::one() {
                    return Err(Error::Invariant(format!("alpha out of range at pixel {i}")));
                }
            } else if *p != Rgbad::zero() {
                return Err(Error::Invariant(format!(
                    "invalid pixel {i} does not hold the zero sentinel"
                )));
            }
        }
        Ok(())
    }
}
