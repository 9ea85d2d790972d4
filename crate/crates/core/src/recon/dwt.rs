//! Periodic orthonormal separable wavelet transform (Haar, Daubechies-4).
//!
//! Coefficients use the Mallat layout: after each level the coarse band
//! occupies the top-left quarter of the active region.

use std::ops::{Add, Mul};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WaveletFilter {
    Haar,
    D4,
}

impl std::str::FromStr for WaveletFilter {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "haar" => Ok(WaveletFilter::Haar),
            "d4" | "db2" => Ok(WaveletFilter::D4),
            _ => Err(Error::InvalidParameter(format!("unknown wavelet {s:?}"))),
        }
    }
}

impl WaveletFilter {
    pub fn lowpass(self) -> Vec<f64> {
        match self {
            WaveletFilter::Haar => vec![std::f64::consts::FRAC_1_SQRT_2; 2],
            WaveletFilter::D4 => {
                let s3 = 3f64.sqrt();
                let d = 4.0 * 2f64.sqrt();
                vec![(1.0 + s3) / d, (3.0 + s3) / d, (3.0 - s3) / d, (1.0 - s3) / d]
            }
        }
    }

    pub fn highpass(self) -> Vec<f64> {
        let h = self.lowpass();
        let l = h.len();
        (0..l).map(|k| if k % 2 == 0 { h[l - 1 - k] } else { -h[l - 1 - k] }).collect()
    }
}

pub trait Sample: Copy + Default + Add<Output = Self> + Mul<f64, Output = Self> {}
impl Sample for f64 {}
impl Sample for Complex64 {}

#[derive(Debug, Clone)]
pub struct Dwt2 {
    nx: usize,
    ny: usize,
    levels: usize,
    h: Vec<f64>,
    g: Vec<f64>,
}

impl Dwt2 {
    pub fn new(nx: usize, ny: usize, levels: usize, filter: WaveletFilter) -> Result<Self> {
        if !nx.is_power_of_two() || !ny.is_power_of_two() {
            return Err(Error::InvalidSize { nx, ny });
        }
        let max = nx.min(ny).trailing_zeros() as usize;
        if levels > max {
            return Err(Error::InvalidLevels { levels, nx, ny });
        }
        Ok(Dwt2 { nx, ny, levels, h: filter.lowpass(), g: filter.highpass() })
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    fn analyze_1d<T: Sample>(&self, x: &[T], out: &mut [T]) {
        let n = x.len();
        let half = n / 2;
        for k in 0..half {
            let mut a = T::default();
            let mut d = T::default();
            for (i, (&hi, &gi)) in self.h.iter().zip(&self.g).enumerate() {
                let v = x[(2 * k + i) % n];
                a = a + v * hi;
                d = d + v * gi;
            }
            out[k] = a;
            out[half + k] = d;
        }
    }

    fn synthesize_1d<T: Sample>(&self, c: &[T], out: &mut [T]) {
        let n = c.len();
        let half = n / 2;
        out.iter_mut().for_each(|o| *o = T::default());
        for k in 0..half {
            for (i, (&hi, &gi)) in self.h.iter().zip(&self.g).enumerate() {
                let j = (2 * k + i) % n;
                out[j] = out[j] + c[k] * hi + c[half + k] * gi;
            }
        }
    }

    fn pass<T: Sample>(&self, data: &mut [T], w: usize, h: usize, inverse: bool) {
        let nx = self.nx;
        let mut src = vec![T::default(); w.max(h)];
        let mut dst = vec![T::default(); w.max(h)];
        let rows = |data: &mut [T], src: &mut [T], dst: &mut [T]| {
            for y in 0..h {
                src[..w].copy_from_slice(&data[y * nx..y * nx + w]);
                if inverse {
                    self.synthesize_1d(&src[..w], &mut dst[..w]);
                } else {
                    self.analyze_1d(&src[..w], &mut dst[..w]);
                }
                data[y * nx..y * nx + w].copy_from_slice(&dst[..w]);
            }
        };
        let cols = |data: &mut [T], src: &mut [T], dst: &mut [T]| {
            for x in 0..w {
                for y in 0..h {
                    src[y] = data[y * nx + x];
                }
                if inverse {
                    self.synthesize_1d(&src[..h], &mut dst[..h]);
                } else {
                    self.analyze_1d(&src[..h], &mut dst[..h]);
                }
                for y in 0..h {
                    data[y * nx + x] = dst[y];
                }
            }
        };
        if inverse {
            cols(data, &mut src, &mut dst);
            rows(data, &mut src, &mut dst);
        } else {
            rows(data, &mut src, &mut dst);
            cols(data, &mut src, &mut dst);
        }
    }

    /// In-place forward transform of a row-major `nx × ny` array.
    pub fn forward<T: Sample>(&self, data: &mut [T]) {
        assert_eq!(data.len(), self.nx * self.ny);
        for l in 0..self.levels {
            self.pass(data, self.nx >> l, self.ny >> l, false);
        }
    }

    pub fn inverse<T: Sample>(&self, data: &mut [T]) {
        assert_eq!(data.len(), self.nx * self.ny);
        for l in (0..self.levels).rev() {
            self.pass(data, self.nx >> l, self.ny >> l, true);
        }
    }
}

pub fn dwt2(pixels: &[f64], nx: usize, ny: usize, levels: usize, filter: WaveletFilter) -> Result<Vec<f64>> {
    if pixels.len() != nx * ny {
        return Err(Error::DimensionMismatch { expected: nx * ny, got: pixels.len() });
    }
    let t = Dwt2::new(nx, ny, levels, filter)?;
    let mut out = pixels.to_vec();
    t.forward(&mut out);
    Ok(out)
}

pub fn idwt2(coeffs: &[f64], nx: usize, ny: usize, levels: usize, filter: WaveletFilter) -> Result<Vec<f64>> {
    if coeffs.len() != nx * ny {
        return Err(Error::DimensionMismatch { expected: nx * ny, got: coeffs.len() });
    }
    let t = Dwt2::new(nx, ny, levels, filter)?;
    let mut out = coeffs.to_vec();
    t.inverse(&mut out);
    Ok(out)
}
