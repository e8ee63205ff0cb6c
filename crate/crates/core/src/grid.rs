//! Dense row-major 2D grids and boolean masks.

use crate::error::{check_dims, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Grid<V> {
    width: usize,
    height: usize,
    data: Vec<V>,
}

pub type Mask = Grid<bool>;

impl<V: Clone> Grid<V> {
    pub fn filled(width: usize, height: usize, value: V) -> Self {
        Self {
            width,
            height,
            data: vec![value; width * height],
        }
    }
}

impl<V> Grid<V> {
    /// Wraps row-major data. Panics if the length does not match.
    pub fn from_vec(width: usize, height: usize, data: Vec<V>) -> Self {
        assert_eq!(data.len(), width * height, "grid data length");
        Self {
            width,
            height,
            data,
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> V) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            data,
        }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize) -> usize {
        debug_assert!(x < self.width && y < self.height);
        y * self.width + x
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> &V {
        &self.data[y * self.width + x]
    }

    #[inline]
    pub fn get_mut(&mut self, x: usize, y: usize) -> &mut V {
        &mut self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: V) {
        self.data[y * self.width + x] = value;
    }

    pub fn as_slice(&self) -> &[V] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [V] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<V> {
        self.data
    }

    pub fn map<W>(&self, f: impl FnMut(&V) -> W) -> Grid<W> {
        Grid {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn check_same_dims<W>(&self, other: &Grid<W>) -> Result<()> {
        check_dims(self.dims(), other.dims())
    }
}

impl Mask {
    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }

    pub fn any(&self) -> bool {
        self.data.iter().any(|&b| b)
    }

    pub fn and(&self, other: &Mask) -> Result<Mask> {
        self.check_same_dims(other)?;
        Ok(Grid::from_vec(
            self.width,
            self.height,
            self.data.iter().zip(&other.data).map(|(a, b)| *a && *b).collect(),
        ))
    }

    pub fn or(&self, other: &Mask) -> Result<Mask> {
        self.check_same_dims(other)?;
        Ok(Grid::from_vec(
            self.width,
            self.height,
            self.data.iter().zip(&other.data).map(|(a, b)| *a || *b).collect(),
        ))
    }

    pub fn and_not(&self, other: &Mask) -> Result<Mask> {
        self.check_same_dims(other)?;
        Ok(Grid::from_vec(
            self.width,
            self.height,
            self.data.iter().zip(&other.data).map(|(a, b)| *a && !*b).collect(),
        ))
    }

    /// True if the mask has a set pixel on the outermost row or column.
    pub fn touches_border(&self) -> bool {
        let (w, h) = self.dims();
        if w == 0 || h == 0 {
            return false;
        }
        (0..w).any(|x| *self.get(x, 0) || *self.get(x, h - 1))
            || (0..h).any(|y| *self.get(0, y) || *self.get(w - 1, y))
    }

    /// Square-window max filter. The window spans offsets `-(side-1)/2 ..= side/2`.
    pub fn dilate_square(&self, side: usize) -> Mask {
        self.square_filter(side, true)
    }

    /// Square-window min filter; pixels outside the raster count as unset.
    pub fn erode_square(&self, side: usize) -> Mask {
        self.square_filter(side, false)
    }

    fn square_filter(&self, side: usize, dilate: bool) -> Mask {
        if side <= 1 {
            return self.clone();
        }
        let lo = (side - 1) / 2;
        let hi = side / 2;
        let (w, h) = self.dims();
        // Separable: rows, then columns.
        let pass = |src: &Mask, horizontal: bool| -> Mask {
            Grid::from_fn(w, h, |x, y| {
                let (pos, extent) = if horizontal { (x, w) } else { (y, h) };
                let mut acc = !dilate;
                for p in pos as isize - hi as isize..=pos as isize + lo as isize {
                    let v = if p < 0 || p >= extent as isize {
                        false
                    } else if horizontal {
                        *src.get(p as usize, y)
                    } else {
                        *src.get(x, p as usize)
                    };
                    if dilate {
                        acc |= v;
                    } else {
                        acc &= v;
                    }
                }
                acc
            })
        };
        let rows = pass(self, true);
        pass(&rows, false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dilate_single_pixel_gives_clipped_square() {
        let mut m = Mask::filled(9, 7, false);
        m.set(1, 1, true);
        let d = m.dilate_square(5);
        for y in 0..7 {
            for x in 0..9 {
                assert_eq!(*d.get(x, y), x <= 3 && y <= 3, "({x},{y})");
            }
        }
    }

    #[test]
    fn erode_then_border() {
        let m = Mask::filled(5, 5, true);
        let e = m.erode_square(3);
        assert_eq!(e.count(), 9);
        assert!(!e.touches_border());
        assert!(m.touches_border());
    }
}
