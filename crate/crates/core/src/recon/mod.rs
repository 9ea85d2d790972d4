//! Undersampled multi-channel Fourier reconstruction on synthetic phantoms.

pub mod digital_shearlet;
pub mod dwt;
pub mod experiment;
pub mod fft;
pub mod fista;
pub mod io;
pub mod mask;
pub mod phantom;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Real image stored row-major, `pixels[y * nx + x]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    pub nx: usize,
    pub ny: usize,
    pub pixels: Vec<f64>,
}

impl Image {
    pub fn zeros(nx: usize, ny: usize) -> Self {
        Image { nx, ny, pixels: vec![0.0; nx * ny] }
    }

    pub fn norm(&self) -> f64 {
        self.pixels.iter().map(|p| p * p).sum::<f64>().sqrt()
    }

    pub fn max(&self) -> f64 {
        self.pixels.iter().copied().fold(0.0, f64::max)
    }

    pub fn from_magnitude(nx: usize, ny: usize, data: &[Complex64]) -> Self {
        Image { nx, ny, pixels: data.iter().map(|z| z.norm()).collect() }
    }
}

/// Per-channel k-space, each channel the unitary 2-D DFT of a channel image.
#[derive(Debug, Clone, PartialEq)]
pub struct KSpace {
    pub nx: usize,
    pub ny: usize,
    pub data: Vec<Vec<Complex64>>,
}

impl KSpace {
    pub fn channels(&self) -> usize {
        self.data.len()
    }

    /// Whether `X[-k] = conj X[k]` holds to the tolerance on every channel,
    /// i.e. whether the channel images are real.
    pub fn is_conjugate_symmetric(&self, tol: f64) -> bool {
        let (nx, ny) = (self.nx, self.ny);
        self.data.iter().all(|ch| {
            let scale = ch.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
            (0..ny).all(|y| {
                (0..nx).all(|x| {
                    let mirror = ((ny - y) % ny) * nx + (nx - x) % nx;
                    (ch[y * nx + x] - ch[mirror].conj()).norm() <= tol * scale
                })
            })
        })
    }
}

/// Pixelwise `sqrt(Σ_k |I_k|²)`.
pub fn sum_of_squares(channels: &[Image]) -> Result<Image> {
    let first = channels.first().ok_or(Error::InvalidParameter("no channels".into()))?;
    let (nx, ny) = (first.nx, first.ny);
    let mut out = Image::zeros(nx, ny);
    for ch in channels {
        if ch.nx != nx || ch.ny != ny {
            return Err(Error::DimensionMismatch { expected: nx * ny, got: ch.nx * ch.ny });
        }
        for (o, p) in out.pixels.iter_mut().zip(&ch.pixels) {
            *o += p * p;
        }
    }
    for o in &mut out.pixels {
        *o = o.sqrt();
    }
    Ok(out)
}

/// `‖recon - reference‖_F / ‖reference‖_F`.
pub fn relative_error(recon: &Image, reference: &Image) -> Result<f64> {
    if recon.nx != reference.nx || recon.ny != reference.ny {
        return Err(Error::DimensionMismatch { expected: reference.pixels.len(), got: recon.pixels.len() });
    }
    let den = reference.norm();
    if den == 0.0 {
        return Err(Error::ZeroReference);
    }
    let num: f64 = recon.pixels.iter().zip(&reference.pixels).map(|(a, b)| (a - b).powi(2)).sum();
    Ok(num.sqrt() / den)
}
