//! Frequency-domain digital shearlet transform built from the compactly
//! supported generators.
//!
//! Each band multiplies the image DFT by a sampled window
//! `ĝ((S_k A_j)^{-T} ξ)` and returns to the pixel domain. Windows are divided
//! pointwise by `sqrt(Σ |W|²)`, which makes the transform Parseval.

use num_complex::Complex64;

use super::fft::{signed_freq, Fft2};
use crate::error::{Error, Result};
use crate::generators::{Generator, GeneratorSpec};
use crate::system::{mat_inv, mat_mul, mat_transpose, mat_vec, max_shear, scaling_matrix, shear_matrix, Cone};

/// Band descriptor: `None` for the low-pass band, else `(cone, j, k)`.
pub type Band = Option<(Cone, u32, i64)>;

pub struct DigitalShearlet {
    nx: usize,
    ny: usize,
    scales: usize,
    bands: Vec<Band>,
    windows: Vec<Vec<Complex64>>,
    raw_bounds: (f64, f64),
    fft: Fft2,
}

impl DigitalShearlet {
    /// Largest admissible number of scales for an `nx × ny` grid.
    pub fn max_scales(nx: usize, ny: usize) -> usize {
        (nx.min(ny).trailing_zeros() as usize).saturating_sub(3)
    }

    pub fn new(nx: usize, ny: usize, scales: usize, spec: &GeneratorSpec) -> Result<Self> {
        if nx < 2 || ny < 2 || !nx.is_power_of_two() || !ny.is_power_of_two() {
            return Err(Error::InvalidSize { nx, ny });
        }
        if scales == 0 || scales > Self::max_scales(nx, ny) {
            return Err(Error::InvalidScales { scales, nx, ny });
        }
        let mut bands: Vec<Band> = vec![None];
        for j in 0..scales as u32 {
            let kmax = max_shear(j);
            for cone in [Cone::Horizontal, Cone::Vertical] {
                for k in -kmax..=kmax {
                    bands.push(Some((cone, j, k)));
                }
            }
        }
        // continuous frequency of bin i is signed_freq(i) / rho
        let rho = [nx as f64 / (4 << scales) as f64, ny as f64 / (4 << scales) as f64];
        let n = nx * ny;
        let mut windows: Vec<Vec<Complex64>> = Vec::with_capacity(bands.len());
        for band in &bands {
            let (which, m) = match *band {
                None => (Generator::Scaling, [[1.0, 0.0], [0.0, 1.0]]),
                Some((cone, j, k)) => {
                    let b = mat_mul(shear_matrix(k, cone), scaling_matrix(j, cone));
                    let g = if cone == Cone::Horizontal { Generator::Cone1 } else { Generator::Cone2 };
                    (g, mat_transpose(mat_inv(b)))
                }
            };
            let mut w = vec![Complex64::new(0.0, 0.0); n];
            for y in 0..ny {
                for x in 0..nx {
                    let xi = [signed_freq(x, nx) as f64 / rho[0], signed_freq(y, ny) as f64 / rho[1]];
                    w[y * nx + x] = spec.generator_ft(which, mat_vec(&m, xi));
                }
            }
            windows.push(w);
        }
        let mut total = vec![0.0; n];
        for w in &windows {
            for (t, z) in total.iter_mut().zip(w) {
                *t += z.norm_sqr();
            }
        }
        let lo = total.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = total.iter().copied().fold(0.0, f64::max);
        if !(lo > 0.0) {
            return Err(Error::InvalidScales { scales, nx, ny });
        }
        for w in &mut windows {
            for (z, t) in w.iter_mut().zip(&total) {
                *z /= t.sqrt();
            }
        }
        Ok(DigitalShearlet { nx, ny, scales, bands, windows, raw_bounds: (lo, hi), fft: Fft2::new(nx, ny) })
    }

    pub fn scales(&self) -> usize {
        self.scales
    }

    pub fn bands(&self) -> &[Band] {
        &self.bands
    }

    pub fn num_bands(&self) -> usize {
        self.bands.len()
    }

    pub fn image_len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn coeff_len(&self) -> usize {
        self.bands.len() * self.image_len()
    }

    /// Extremes of `Σ|W|²` over the DFT grid before normalization.
    pub fn raw_window_bounds(&self) -> (f64, f64) {
        self.raw_bounds
    }

    /// Extremes of `Σ|W|²` after normalization; these are the digital frame
    /// bounds `(A_d, B_d)`.
    pub fn frame_bounds(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for i in 0..self.image_len() {
            let s: f64 = self.windows.iter().map(|w| w[i].norm_sqr()).sum();
            lo = lo.min(s);
            hi = hi.max(s);
        }
        (lo, hi)
    }

    /// `T u`: band-major coefficients, each band `nx · ny` long.
    pub fn forward(&self, u: &[Complex64], out: &mut [Complex64]) {
        let n = self.image_len();
        assert_eq!(u.len(), n);
        assert_eq!(out.len(), self.coeff_len());
        let mut spec = u.to_vec();
        self.fft.forward(&mut spec);
        for (w, band) in self.windows.iter().zip(out.chunks_mut(n)) {
            for ((b, s), wi) in band.iter_mut().zip(&spec).zip(w) {
                *b = s * wi;
            }
            self.fft.inverse(band);
        }
    }

    /// `T* c = F⁻¹ Σ conj(W_i) F c_i`.
    pub fn adjoint(&self, c: &[Complex64], out: &mut [Complex64]) {
        let n = self.image_len();
        assert_eq!(c.len(), self.coeff_len());
        assert_eq!(out.len(), n);
        let mut acc = vec![Complex64::new(0.0, 0.0); n];
        let mut tmp = vec![Complex64::new(0.0, 0.0); n];
        for (w, band) in self.windows.iter().zip(c.chunks(n)) {
            tmp.copy_from_slice(band);
            self.fft.forward(&mut tmp);
            for ((a, t), wi) in acc.iter_mut().zip(&tmp).zip(w) {
                *a += t * wi.conj();
            }
        }
        self.fft.inverse(&mut acc);
        out.copy_from_slice(&acc);
    }

    pub fn forward_real(&self, pixels: &[f64]) -> Vec<Complex64> {
        let u: Vec<Complex64> = pixels.iter().map(|&p| Complex64::new(p, 0.0)).collect();
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeff_len()];
        self.forward(&u, &mut out);
        out
    }

    pub fn adjoint_real(&self, coeffs: &[Complex64]) -> Vec<f64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.image_len()];
        self.adjoint(coeffs, &mut out);
        out.iter().map(|z| z.re).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(n: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
        (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
    }

    fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
        a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
    }

    #[test]
    fn band_count_and_bounds() {
        let t = DigitalShearlet::new(128, 128, 4, &GeneratorSpec::default()).unwrap();
        assert_eq!(t.num_bands(), 41);
        let (a, b) = t.frame_bounds();
        assert!((a - 1.0).abs() < 1e-12 && (b - 1.0).abs() < 1e-12);
        assert!(t.raw_window_bounds().0 > 0.0);
        assert!(matches!(
            DigitalShearlet::new(128, 128, 5, &GeneratorSpec::default()),
            Err(Error::InvalidScales { .. })
        ));
    }

    #[test]
    fn adjoint_and_parseval() {
        let t = DigitalShearlet::new(32, 32, 2, &GeneratorSpec::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = random(t.image_len(), &mut rng);
        let y = random(t.coeff_len(), &mut rng);
        let mut tx = vec![Complex64::new(0.0, 0.0); t.coeff_len()];
        let mut ty = vec![Complex64::new(0.0, 0.0); t.image_len()];
        t.forward(&x, &mut tx);
        t.adjoint(&y, &mut ty);
        let lhs = dot(&tx, &y);
        let rhs = dot(&x, &ty);
        let scale = dot(&x, &x).re.sqrt() * dot(&y, &y).re.sqrt();
        assert!((lhs - rhs).norm() < 1e-8 * scale);
        assert!((dot(&tx, &tx).re - dot(&x, &x).re).abs() < 1e-10 * dot(&x, &x).re);
        let mut back = vec![Complex64::new(0.0, 0.0); t.image_len()];
        t.adjoint(&tx, &mut back);
        assert!(x.iter().zip(&back).all(|(a, b)| (a - b).norm() < 1e-12));
    }

    #[test]
    fn zero_in_zero_out() {
        let t = DigitalShearlet::new(16, 16, 1, &GeneratorSpec::default()).unwrap();
        let c = t.forward_real(&vec![0.0; 256]);
        assert!(c.iter().all(|z| z.norm() == 0.0));
    }
}
