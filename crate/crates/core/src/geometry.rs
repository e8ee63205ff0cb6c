//! Pinhole camera, rigid poses and the small 3D vector algebra they need.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> Vec3<T> {
    pub const fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    pub fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn scale(self, s: T) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }

    pub fn norm(self) -> T {
        self.dot(self).sqrt()
    }

    pub fn axis(self, i: usize) -> T {
        match i {
            0 => self.x,
            1 => self.y,
            _ => self.z,
        }
    }

    pub fn to_array(self) -> [T; 3] {
        [self.x, self.y, self.z]
    }

    pub fn from_array(a: [T; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }
}

impl<T: Real> Add for Vec3<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<T: Real> Sub for Vec3<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<T: Real> Neg for Vec3<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

/// Row-major 3x3 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat3<T> {
    pub m: [[T; 3]; 3],
}

impl<T: Real> Mat3<T> {
    pub fn identity() -> Self {
        let (o, z) = (T::one(), T::zero());
        Self {
            m: [[o, z, z], [z, o, z], [z, z, o]],
        }
    }

    pub fn transpose(&self) -> Self {
        let m = &self.m;
        Self {
            m: [
                [m[0][0], m[1][0], m[2][0]],
                [m[0][1], m[1][1], m[2][1]],
                [m[0][2], m[1][2], m[2][2]],
            ],
        }
    }

    pub fn det(&self) -> T {
        let m = &self.m;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    pub fn rot_x(angle: T) -> Self {
        let (s, c) = angle.sin_cos();
        let (o, z) = (T::one(), T::zero());
        Self {
            m: [[o, z, z], [z, c, -s], [z, s, c]],
        }
    }

    pub fn rot_y(angle: T) -> Self {
        let (s, c) = angle.sin_cos();
        let (o, z) = (T::one(), T::zero());
        Self {
            m: [[c, z, s], [z, o, z], [-s, z, c]],
        }
    }

    pub fn rot_z(angle: T) -> Self {
        let (s, c) = angle.sin_cos();
        let (o, z) = (T::one(), T::zero());
        Self {
            m: [[c, -s, z], [s, c, z], [z, z, o]],
        }
    }

    /// Yaw (about y), then pitch (about x), then roll (about z), angles in radians:
    /// `R = Ry(yaw) * Rx(pitch) * Rz(roll)`.
    pub fn from_yaw_pitch_roll(yaw: T, pitch: T, roll: T) -> Self {
        Self::rot_y(yaw) * Self::rot_x(pitch) * Self::rot_z(roll)
    }
}

impl<T: Real> Mul for Mat3<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut m = [[T::zero(); 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.m[i][0] * o.m[0][j] + self.m[i][1] * o.m[1][j] + self.m[i][2] * o.m[2][j];
            }
        }
        Self { m }
    }
}

impl<T: Real> Mul<Vec3<T>> for Mat3<T> {
    type Output = Vec3<T>;
    fn mul(self, v: Vec3<T>) -> Vec3<T> {
        let m = &self.m;
        Vec3::new(
            m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
            m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
            m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z,
        )
    }
}

/// Pinhole intrinsics. Pixel `(u, v)` is addressed at its centre, so column `u`
/// has image coordinate `u` exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Camera<T> {
    pub fx: T,
    pub fy: T,
    pub cx: T,
    pub cy: T,
    pub width: usize,
    pub height: usize,
}

impl<T: Real> Camera<T> {
    pub fn new(fx: T, fy: T, cx: T, cy: T, width: usize, height: usize) -> Result<Self> {
        let cam = Self {
            fx,
            fy,
            cx,
            cy,
            width,
            height,
        };
        cam.validate()?;
        Ok(cam)
    }

    /// Principal point at `(width/2, height/2)` and the given horizontal field of view.
    pub fn centered(width: usize, height: usize, hfov_deg: T) -> Result<Self> {
        let half = T::of(0.5);
        let f = T::of_usize(width) * half / (hfov_deg.to_radians() * half).tan();
        Self::new(
            f,
            f,
            T::of_usize(width / 2),
            T::of_usize(height / 2),
            width,
            height,
        )
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.fx > T::zero()
            && self.fy > T::zero()
            && self.cx >= T::zero()
            && self.cx < T::of_usize(self.width)
            && self.cy >= T::zero()
            && self.cy < T::of_usize(self.height);
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid camera intrinsics {self:?}")))
        }
    }

    /// Ray direction through pixel `(u, v)` with unit z component, so a hit at
    /// parameter `s` has z-depth `s`.
    #[inline]
    pub fn ray_dir(&self, u: T, v: T) -> Vec3<T> {
        Vec3::new((u - self.cx) / self.fx, (v - self.cy) / self.fy, T::one())
    }

    /// `d * K^-1 [u, v, 1]`.
    #[inline]
    pub fn unproject(&self, u: T, v: T, depth: T) -> Vec3<T> {
        self.ray_dir(u, v).scale(depth)
    }

    /// Continuous image coordinates and z of a camera-frame point.
    #[inline]
    pub fn project(&self, p: Vec3<T>) -> (T, T, T) {
        (
            self.fx * p.x / p.z + self.cx,
            self.fy * p.y / p.z + self.cy,
            p.z,
        )
    }

    /// Same intrinsics on a raster padded by the given bands.
    pub fn padded(&self, top_bottom: usize, left_right: usize) -> Self {
        Self {
            cx: self.cx + T::of_usize(left_right),
            cy: self.cy + T::of_usize(top_bottom),
            width: self.width + 2 * left_right,
            height: self.height + 2 * top_bottom,
            ..*self
        }
    }

    pub fn cast<U: Real>(&self) -> Camera<U> {
        Camera {
            fx: U::of(self.fx.to64()),
            fy: U::of(self.fy.to64()),
            cx: U::of(self.cx.to64()),
            cy: U::of(self.cy.to64()),
            width: self.width,
            height: self.height,
        }
    }
}

/// Rigid transform `p -> R p + t`. A camera pose maps camera coordinates
/// (x right, y down, z forward) to world coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose<T> {
    pub rotation: Mat3<T>,
    pub translation: Vec3<T>,
}

impl<T: Real> Pose<T> {
    pub fn identity() -> Self {
        Self {
            rotation: Mat3::identity(),
            translation: Vec3::zero(),
        }
    }

    pub fn new(rotation: Mat3<T>, translation: Vec3<T>) -> Result<Self> {
        let pose = Self {
            rotation,
            translation,
        };
        pose.validate(T::of(1e-9))?;
        Ok(pose)
    }

    /// Pose from a translation in metres and yaw/pitch/roll in degrees.
    pub fn from_euler_deg(t: [T; 3], rx_deg: T, ry_deg: T, rz_deg: T) -> Self {
        Self {
            rotation: Mat3::from_yaw_pitch_roll(
                ry_deg.to_radians(),
                rx_deg.to_radians(),
                rz_deg.to_radians(),
            ),
            translation: Vec3::from_array(t),
        }
    }

    pub fn validate(&self, tol: T) -> Result<()> {
        let rtr = self.rotation.transpose() * self.rotation;
        let id = Mat3::<T>::identity();
        for i in 0..3 {
            for j in 0..3 {
                if (rtr.m[i][j] - id.m[i][j]).abs() > tol {
                    return Err(Error::Geometry("rotation is not orthonormal".into()));
                }
            }
        }
        if (self.rotation.det() - T::one()).abs() > tol {
            return Err(Error::Geometry("rotation determinant is not 1".into()));
        }
        Ok(())
    }

    #[inline]
    pub fn apply(&self, p: Vec3<T>) -> Vec3<T> {
        self.rotation * p + self.translation
    }

    pub fn inverse(&self) -> Self {
        let rt = self.rotation.transpose();
        Self {
            rotation: rt,
            translation: -(rt * self.translation),
        }
    }

    /// `self ∘ other`: applies `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            rotation: self.rotation * other.rotation,
            translation: self.rotation * other.translation + self.translation,
        }
    }

    /// Transform taking source-camera coordinates to target-camera coordinates,
    /// both poses being camera-to-world.
    pub fn relative(source: &Self, target: &Self) -> Self {
        target.inverse().compose(source)
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }

    pub fn cast<U: Real>(&self) -> Pose<U> {
        Pose {
            rotation: Mat3 {
                m: self.rotation.m.map(|r| r.map(|v| U::of(v.to64()))),
            },
            translation: Vec3::from_array(self.translation.to_array().map(|v| U::of(v.to64()))),
        }
    }
}
