//! Channel-major multi-channel rasters (colour images, feature maps).

use crate::error::{check_dims, Error, Result};
use crate::grid::Grid;
use crate::image::RgbadImage;
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct Planes<T> {
    channels: usize,
    width: usize,
    height: usize,
    data: Vec<T>,
}

impl<T: Real> Planes<T> {
    pub fn zeros(channels: usize, width: usize, height: usize) -> Self {
        Self {
            channels,
            width,
            height,
            data: vec![T::zero(); channels * width * height],
        }
    }

    pub fn from_vec(channels: usize, width: usize, height: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), channels * width * height, "planes data length");
        Self {
            channels,
            width,
            height,
            data,
        }
    }

    pub fn from_fn(
        channels: usize,
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize, usize) -> T,
    ) -> Self {
        let mut data = Vec::with_capacity(channels * width * height);
        for c in 0..channels {
            for y in 0..height {
                for x in 0..width {
                    data.push(f(c, x, y));
                }
            }
        }
        Self::from_vec(channels, width, height, data)
    }

    /// RGB channels of an RGBA-D raster (zero where invalid).
    pub fn rgb_of(image: &RgbadImage<T>) -> Self {
        let (w, h) = image.dims();
        Self::from_fn(3, w, h, |c, x, y| image.pixel(x, y).rgba[c])
    }

    /// Single-channel planes from a grid.
    pub fn from_grid(grid: &Grid<T>) -> Self {
        Self::from_vec(1, grid.width(), grid.height(), grid.as_slice().to_vec())
    }

    pub fn channels(&self) -> usize {
        self.channels
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
    pub fn get(&self, c: usize, x: usize, y: usize) -> T {
        self.data[(c * self.height + y) * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, c: usize, x: usize, y: usize, v: T) {
        self.data[(c * self.height + y) * self.width + x] = v;
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn check_same_shape(&self, other: &Self) -> Result<()> {
        check_dims(self.dims(), other.dims())?;
        if self.channels != other.channels {
            return Err(Error::Config(format!(
                "channel count {} vs {}",
                self.channels, other.channels
            )));
        }
        Ok(())
    }
}
