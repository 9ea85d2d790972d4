//! Synthetic cartoon phantoms with smooth coil sensitivities.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::fft::Fft2;
use super::{Image, KSpace};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhantomKind {
    Cartoon,
    SheppLike,
}

impl std::str::FromStr for PhantomKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cartoon" => Ok(PhantomKind::Cartoon),
            "shepp_like" | "shepp-like" => Ok(PhantomKind::SheppLike),
            _ => Err(Error::InvalidParameter(format!("unknown phantom kind {s:?}"))),
        }
    }
}

/// Ellipse with a smooth interior profile `value · (1 - bump·ρ²)`, where
/// `ρ` is the normalized elliptic radius.
#[derive(Debug, Clone, Copy)]
struct Ellipse {
    center: [f64; 2],
    axes: [f64; 2],
    angle: f64,
    value: f64,
    bump: f64,
}

impl Ellipse {
    fn eval(&self, p: [f64; 2]) -> f64 {
        let (s, c) = self.angle.sin_cos();
        let dx = p[0] - self.center[0];
        let dy = p[1] - self.center[1];
        let u = (c * dx + s * dy) / self.axes[0];
        let v = (-s * dx + c * dy) / self.axes[1];
        let rho2 = u * u + v * v;
        if rho2 <= 1.0 {
            self.value * (1.0 - self.bump * rho2)
        } else {
            0.0
        }
    }
}

fn cartoon_ellipses(seed: u64) -> Vec<Ellipse> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![Ellipse { center: [0.0, 0.0], axes: [0.72, 0.9], angle: 0.0, value: 0.55, bump: 0.25 }];
    for _ in 0..6 {
        let r = rng.gen_range(0.0..0.4);
        let t = rng.gen_range(0.0..std::f64::consts::TAU);
        out.push(Ellipse {
            center: [r * t.cos(), r * t.sin()],
            axes: [rng.gen_range(0.06..0.28), rng.gen_range(0.06..0.28)],
            angle: rng.gen_range(0.0..std::f64::consts::PI),
            value: rng.gen_range(-0.3..0.45),
            bump: rng.gen_range(-0.4..0.6),
        });
    }
    out
}

fn shepp_ellipses() -> Vec<Ellipse> {
    let table: [[f64; 6]; 10] = [
        [0.0, 0.0, 0.69, 0.92, 0.0, 1.0],
        [0.0, -0.0184, 0.6624, 0.874, 0.0, -0.8],
        [0.22, 0.0, 0.11, 0.31, -18.0, -0.2],
        [-0.22, 0.0, 0.16, 0.41, 18.0, -0.2],
        [0.0, 0.35, 0.21, 0.25, 0.0, 0.1],
        [0.0, 0.1, 0.046, 0.046, 0.0, 0.1],
        [0.0, -0.1, 0.046, 0.046, 0.0, 0.1],
        [-0.08, -0.605, 0.046, 0.023, 0.0, 0.1],
        [0.0, -0.606, 0.023, 0.023, 0.0, 0.1],
        [0.06, -0.605, 0.023, 0.046, 0.0, 0.1],
    ];
    table
        .iter()
        .map(|r| Ellipse {
            center: [r[0], r[1]],
            axes: [r[2], r[3]],
            angle: r[4].to_radians(),
            value: r[5],
            bump: 0.2,
        })
        .collect()
}

fn check_size(nx: usize, ny: usize) -> Result<()> {
    if nx < 2 || ny < 2 || !nx.is_power_of_two() || !ny.is_power_of_two() {
        return Err(Error::InvalidSize { nx, ny });
    }
    Ok(())
}

/// Pixel centre of `(x, y)` in `[-1, 1]²`, `y` pointing up.
fn pixel_center(x: usize, y: usize, nx: usize, ny: usize) -> [f64; 2] {
    [(2 * x + 1) as f64 / nx as f64 - 1.0, 1.0 - (2 * y + 1) as f64 / ny as f64]
}

/// Reference image with values in `[0, 1]` and maximum exactly 1.
pub fn reference_image(kind: PhantomKind, nx: usize, ny: usize, seed: u64) -> Result<Image> {
    check_size(nx, ny)?;
    let ellipses = match kind {
        PhantomKind::Cartoon => cartoon_ellipses(seed),
        PhantomKind::SheppLike => shepp_ellipses(),
    };
    let mut img = Image::zeros(nx, ny);
    for y in 0..ny {
        for x in 0..nx {
            let p = pixel_center(x, y, nx, ny);
            let v: f64 = ellipses.iter().map(|e| e.eval(p)).sum();
            img.pixels[y * nx + x] = v.max(0.0);
        }
    }
    let max = img.max();
    if max > 0.0 {
        for p in &mut img.pixels {
            *p /= max;
        }
    }
    Ok(img)
}

/// Coil profiles `s_k = w_k / sqrt(Σ w²)` from Gaussians placed around the
/// field of view, so that `Σ s_k² ≡ 1`. One channel gives `s ≡ 1`.
pub fn coil_sensitivities(nx: usize, ny: usize, channels: usize) -> Result<Vec<Image>> {
    if channels == 0 {
        return Err(Error::InvalidParameter("channels must be positive".into()));
    }
    let centers: Vec<[f64; 2]> = (0..channels)
        .map(|k| {
            let t = std::f64::consts::TAU * k as f64 / channels as f64 + std::f64::consts::FRAC_PI_4;
            [1.2 * t.cos(), 1.2 * t.sin()]
        })
        .collect();
    let mut raw: Vec<Image> = vec![Image::zeros(nx, ny); channels];
    for y in 0..ny {
        for x in 0..nx {
            let p = pixel_center(x, y, nx, ny);
            let w: Vec<f64> = if channels == 1 {
                vec![1.0]
            } else {
                centers
                    .iter()
                    .map(|c| (-((p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2)) / 1.5).exp())
                    .collect()
            };
            let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
            for (ch, wk) in raw.iter_mut().zip(&w) {
                ch.pixels[y * nx + x] = wk / norm;
            }
        }
    }
    Ok(raw)
}

pub struct Phantom {
    pub reference: Image,
    pub channel_images: Vec<Image>,
    pub kspace: KSpace,
}

/// Reference image, per-channel images and their unitary DFTs.
pub fn phantom(kind: PhantomKind, nx: usize, ny: usize, channels: usize, seed: u64) -> Result<Phantom> {
    let reference = reference_image(kind, nx, ny, seed)?;
    let sens = coil_sensitivities(nx, ny, channels)?;
    let fft = Fft2::new(nx, ny);
    let mut channel_images = Vec::with_capacity(channels);
    let mut data = Vec::with_capacity(channels);
    for s in &sens {
        let pixels: Vec<f64> = reference.pixels.iter().zip(&s.pixels).map(|(r, s)| r * s).collect();
        let mut k: Vec<Complex64> = pixels.iter().map(|&p| Complex64::new(p, 0.0)).collect();
        fft.forward(&mut k);
        channel_images.push(Image { nx, ny, pixels });
        data.push(k);
    }
    Ok(Phantom { reference, channel_images, kspace: KSpace { nx, ny, data } })
}
