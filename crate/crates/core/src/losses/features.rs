use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::planes::Planes;
use crate::scalar::Real;

/// Maps a colour image to a feature map; stands behind the perceptual loss.
pub trait FeatureExtractor<T: Real>: Send + Sync {
    fn extract(&self, image: &Planes<T>) -> Planes<T>;
}

/// Fixed 3x3 filters applied to each input channel with replicated borders
/// and an absolute-value activation. Output channel `c * K + k` holds filter
/// `k` on input channel `c`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelBank<T> {
    pub kernels: Vec<[[T; 3]; 3]>,
}

impl<T: Real> KernelBank<T> {
    /// Zero-sum edge detectors: Sobel x, Sobel y and a 4-neighbour Laplacian.
    pub fn edges() -> Self {
        let k = |m: [[f64; 3]; 3]| m.map(|r| r.map(T::of));
        Self {
            kernels: vec![
                k([[-1.0, 0.0, 1.0], [-2.0, 0.0, 2.0], [-1.0, 0.0, 1.0]]),
                k([[-1.0, -2.0, -1.0], [0.0, 0.0, 0.0], [1.0, 2.0, 1.0]]),
                k([[0.0, 1.0, 0.0], [1.0, -4.0, 1.0], [0.0, 1.0, 0.0]]),
            ],
        }
    }

    /// `count` filters with entries uniform in `[-1, 1]`.
    pub fn seeded(count: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self {
            kernels: (0..count)
                .map(|_| [[0; 3]; 3].map(|r| r.map(|_| T::of(rng.gen_range(-1.0..=1.0)))))
                .collect(),
        }
    }
}

impl<T: Real> FeatureExtractor<T> for KernelBank<T> {
    fn extract(&self, image: &Planes<T>) -> Planes<T> {
        let (w, h) = image.dims();
        let k = self.kernels.len();
        let clamp = |v: isize, n: usize| v.clamp(0, n as isize - 1) as usize;
        Planes::from_fn(image.channels() * k, w, h, |oc, x, y| {
            let (c, kern) = (oc / k, &self.kernels[oc % k]);
            let mut acc = T::zero();
            for (dy, row) in kern.iter().enumerate() {
                for (dx, &kv) in row.iter().enumerate() {
                    let sx = clamp(x as isize + dx as isize - 1, w);
                    let sy = clamp(y as isize + dy as isize - 1, h);
                    acc += kv * image.get(c, sx, sy);
                }
            }
            acc.abs()
        })
    }
}
