use std::path::Path;

use image::{GrayImage, ImageBuffer, Luma, Rgba, RgbaImage};

use super::require;
use crate::error::{check_dims, Error, Result};
use crate::grid::{Grid, Mask};
use crate::image::{Rgbad, RgbadImage};
use crate::scalar::Real;

/// Largest depth the 16-bit millimetre encoding can hold.
pub const MAX_DEPTH_M: f64 = 65.535;

fn png_err(path: &Path) -> impl FnOnce(image::ImageError) -> Error + '_ {
    move |e| Error::Png {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

#[inline]
fn to_u8<T: Real>(v: T) -> u8 {
    (v.to64().clamp(0.0, 1.0) * 255.0).round() as u8
}

#[inline]
fn from_u8<T: Real>(v: u8) -> T {
    T::of(v as f64) / T::of(255.0)
}

/// Millimetres for a valid depth; zero is reserved for "no data".
pub fn depth_to_mm(depth: f64) -> Result<u16> {
    let mm = (depth * 1000.0).round();
    if !(1.0..=65535.0).contains(&mm) || !depth.is_finite() {
        return Err(Error::DepthRange(depth));
    }
    Ok(mm as u16)
}

pub fn save_rgba_png<T: Real>(path: &Path, image: &RgbadImage<T>) -> Result<()> {
    let (w, h) = image.dims();
    let buf = RgbaImage::from_fn(w as u32, h as u32, |x, y| {
        Rgba(image.pixel(x as usize, y as usize).rgba.map(to_u8))
    });
    buf.save(path).map_err(png_err(path))
}

/// 16-bit millimetre depth; invalid pixels are written as 0.
pub fn save_depth_png<T: Real>(path: &Path, image: &RgbadImage<T>) -> Result<()> {
    let (w, h) = image.dims();
    let mut buf: ImageBuffer<Luma<u16>, Vec<u16>> = ImageBuffer::new(w as u32, h as u32);
    for y in 0..h {
        for x in 0..w {
            if let Some(p) = image.sample(x, y) {
                buf.put_pixel(x as u32, y as u32, Luma([depth_to_mm(p.depth.to64())?]));
            }
        }
    }
    buf.save(path).map_err(png_err(path))
}

pub fn save_rgba_depth<T: Real>(dir: &Path, image: &RgbadImage<T>) -> Result<()> {
    save_rgba_png(&dir.join("rgba.png"), image)?;
    save_depth_png(&dir.join("depth.png"), image)
}

/// 8-bit grayscale of values in `[0, 1]`.
pub fn save_gray_png<T: Real>(path: &Path, values: &Grid<T>) -> Result<()> {
    let (w, h) = values.dims();
    let buf = GrayImage::from_fn(w as u32, h as u32, |x, y| {
        Luma([to_u8(*values.get(x as usize, y as usize))])
    });
    buf.save(path).map_err(png_err(path))
}

pub fn save_mask_png(path: &Path, mask: &Mask) -> Result<()> {
    let (w, h) = mask.dims();
    let buf = GrayImage::from_fn(w as u32, h as u32, |x, y| {
        Luma([if *mask.get(x as usize, y as usize) { 255 } else { 0 }])
    });
    buf.save(path).map_err(png_err(path))
}

fn open(path: &Path) -> Result<image::DynamicImage> {
    require(path)?;
    image::open(path).map_err(png_err(path))
}

pub fn load_rgba_png<T: Real>(path: &Path) -> Result<Grid<[T; 4]>> {
    let img = open(path)?.to_rgba8();
    let (w, h) = (img.width() as usize, img.height() as usize);
    Ok(Grid::from_fn(w, h, |x, y| {
        img.get_pixel(x as u32, y as u32).0.map(from_u8)
    }))
}

/// Depth in metres; `None` where the file holds 0.
pub fn load_depth_png<T: Real>(path: &Path) -> Result<Grid<Option<T>>> {
    let img = open(path)?.to_luma16();
    let (w, h) = (img.width() as usize, img.height() as usize);
    Ok(Grid::from_fn(w, h, |x, y| {
        let mm = img.get_pixel(x as u32, y as u32).0[0];
        (mm > 0).then(|| T::of(mm as f64) / T::of(1000.0))
    }))
}

/// Grayscale values scaled to `[0, 1]`.
pub fn load_gray_png<T: Real>(path: &Path) -> Result<Grid<T>> {
    let img = open(path)?.to_luma8();
    let (w, h) = (img.width() as usize, img.height() as usize);
    Ok(Grid::from_fn(w, h, |x, y| from_u8(img.get_pixel(x as u32, y as u32).0[0])))
}

pub fn load_mask_png(path: &Path) -> Result<Mask> {
    let img = open(path)?.to_luma8();
    let (w, h) = (img.width() as usize, img.height() as usize);
    Ok(Grid::from_fn(w, h, |x, y| img.get_pixel(x as u32, y as u32).0[0] >= 128))
}

/// Reads `rgba.png` + `depth.png`; validity comes from the depth file.
pub fn load_rgba_depth<T: Real>(dir: &Path) -> Result<RgbadImage<T>> {
    let rgba = load_rgba_png::<T>(&dir.join("rgba.png"))?;
    let depth = load_depth_png::<T>(&dir.join("depth.png"))?;
    check_dims(rgba.dims(), depth.dims())?;
    let (w, h) = rgba.dims();
    Ok(RgbadImage::from_fn(w, h, |x, y| {
        depth.get(x, y).map(|d| Rgbad::new(*rgba.get(x, y), d))
    }))
}
