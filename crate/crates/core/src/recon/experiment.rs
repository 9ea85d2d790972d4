//! Reconstruction pipeline: phantom, masks, per-channel reconstruction,
//! sum-of-squares combination and the relative-error table.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::digital_shearlet::DigitalShearlet;
use super::dwt::{Dwt2, WaveletFilter};
use super::fft::Fft2;
use super::fista::{fista, masked, FistaOptions, Sparsifier};
use super::io::{fmt_f64, write_csv, write_json, write_kspace, write_pgm, write_raw_f64};
use super::mask::{make_mask, Mask, MaskKind};
use super::phantom::{phantom, PhantomKind};
use super::{relative_error, sum_of_squares, Image, KSpace};
use crate::error::{Error, Result};
use crate::generators::GeneratorSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ShearletL1,
    WaveletL1,
    FourierInversion,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::ShearletL1, Method::WaveletL1, Method::FourierInversion];

    pub fn name(self) -> &'static str {
        match self {
            Method::ShearletL1 => "shearlet_l1",
            Method::WaveletL1 => "wavelet_l1",
            Method::FourierInversion => "fourier_inversion",
        }
    }
}

/// Zero-filled inverse DFT, magnitude per channel.
pub fn fourier_inversion(kspace: &KSpace, mask: &Mask) -> Result<Vec<Image>> {
    check_dims(kspace, mask)?;
    let fft = Fft2::new(kspace.nx, kspace.ny);
    kspace
        .data
        .iter()
        .map(|ch| {
            let mut z = masked(ch, mask)?;
            fft.inverse(&mut z);
            Ok(Image::from_magnitude(kspace.nx, kspace.ny, &z))
        })
        .collect()
}

fn check_dims(kspace: &KSpace, mask: &Mask) -> Result<()> {
    if kspace.nx != mask.nx || kspace.ny != mask.ny {
        return Err(Error::DimensionMismatch { expected: mask.nx * mask.ny, got: kspace.nx * kspace.ny });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct L1Options {
    /// `λ = lambda_rel · ‖b‖_∞` per channel, for the objective written with
    /// the unnormalized DFT. In the unitary form solved here this becomes
    /// `lambda_rel · ‖b_u‖_∞ / sqrt(nx·ny)`.
    pub lambda_rel: f64,
    pub iterations: usize,
    pub shearlet_scales: usize,
    pub wavelet: WaveletFilter,
    pub wavelet_levels: usize,
}

impl Default for L1Options {
    fn default() -> Self {
        L1Options { lambda_rel: 5e-3, iterations: 200, shearlet_scales: 4, wavelet: WaveletFilter::D4, wavelet_levels: 4 }
    }
}

fn l1_channels<S: Sparsifier>(kspace: &KSpace, mask: &Mask, t: &S, opts: &L1Options) -> Result<Vec<Image>> {
    kspace
        .data
        .iter()
        .map(|ch| {
            let b = masked(ch, mask)?;
            let bmax = b.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let lambda = unitary_lambda(opts.lambda_rel, bmax, kspace.nx * kspace.ny);
            if !(lambda > 0.0) {
                return Ok(Image::zeros(kspace.nx, kspace.ny));
            }
            let r = fista(ch, mask, t, FistaOptions { lambda, iterations: opts.iterations })?;
            Ok(Image::from_magnitude(kspace.nx, kspace.ny, &r.image))
        })
        .collect()
}

/// Weight of the unitary-form objective equivalent to
/// `½‖F̃u − b‖² + λ_rel‖b‖_∞‖Tu‖₁` with the unnormalized DFT `F̃ = √n F`.
pub fn unitary_lambda(lambda_rel: f64, unitary_bmax: f64, n: usize) -> f64 {
    lambda_rel * unitary_bmax / (n as f64).sqrt()
}

/// Per-channel magnitude images for one method.
pub fn reconstruct(kspace: &KSpace, mask: &Mask, method: Method, opts: &L1Options) -> Result<Vec<Image>> {
    check_dims(kspace, mask)?;
    match method {
        Method::FourierInversion => fourier_inversion(kspace, mask),
        Method::ShearletL1 => {
            let t = DigitalShearlet::new(kspace.nx, kspace.ny, opts.shearlet_scales, &GeneratorSpec::default())?;
            l1_channels(kspace, mask, &t, opts)
        }
        Method::WaveletL1 => {
            let w = Dwt2::new(kspace.nx, kspace.ny, opts.wavelet_levels, opts.wavelet)?;
            l1_channels(kspace, mask, &w, opts)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaskSpec {
    pub kind: MaskKind,
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub phantom: PhantomKind,
    pub nx: usize,
    pub ny: usize,
    pub channels: usize,
    pub masks: Vec<MaskSpec>,
    pub l1: L1Options,
    pub write_images: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 7,
            phantom: PhantomKind::Cartoon,
            nx: 128,
            ny: 128,
            channels: 4,
            masks: vec![
                MaskSpec { kind: MaskKind::SpiralPhyllotaxis, fraction: 0.2037 },
                MaskSpec { kind: MaskKind::Radial, fraction: 0.2074 },
            ],
            l1: L1Options::default(),
            write_images: true,
        }
    }
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentRow {
    pub mask: MaskKind,
    pub fraction: f64,
    pub shearlet_l1: f64,
    pub wavelet_l1: f64,
    pub fourier_inversion: f64,
}

impl ExperimentRow {
    pub fn error(&self, m: Method) -> f64 {
        match m {
            Method::ShearletL1 => self.shearlet_l1,
            Method::WaveletL1 => self.wavelet_l1,
            Method::FourierInversion => self.fourier_inversion,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub rows: Vec<ExperimentRow>,
}

impl ExperimentReport {
    pub fn table_rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                vec![
                    r.mask.name().to_string(),
                    fmt_f64(r.fraction),
                    fmt_f64(r.shearlet_l1),
                    fmt_f64(r.wavelet_l1),
                    fmt_f64(r.fourier_inversion),
                ]
            })
            .collect()
    }
}

pub const TABLE_HEADER: [&str; 5] = ["mask", "fraction", "shearlet_l1", "wavelet_l1", "fourier_inversion"];

fn mask_image(mask: &Mask) -> Image {
    Image { nx: mask.nx, ny: mask.ny, pixels: mask.centered().iter().map(|&b| if b { 1.0 } else { 0.0 }).collect() }
}

fn save_image(out: &Path, stem: &str, img: &Image) -> Result<()> {
    write_pgm(&out.join(format!("{stem}.pgm")), img)?;
    write_raw_f64(&out.join(format!("{stem}.f64")), img)
}

/// Runs the whole pipeline. With an output directory, writes the table,
/// the phantom k-space and every image.
pub fn run_experiment(config: &ExperimentConfig, out: Option<&Path>) -> Result<ExperimentReport> {
    let ph = phantom(config.phantom, config.nx, config.ny, config.channels, config.seed).map_err(|e| e.at("phantom"))?;
    if let (Some(dir), true) = (out, config.write_images) {
        save_image(dir, "reference", &ph.reference).map_err(|e| e.at("write reference"))?;
        write_kspace(dir, "kspace", &ph.kspace).map_err(|e| e.at("write k-space"))?;
    }
    let mut rows = Vec::new();
    for spec in &config.masks {
        let stage = format!("{} mask", spec.kind.name());
        let mask = make_mask(spec.kind, config.nx, config.ny, spec.fraction).map_err(|e| e.at(&stage))?;
        let mut errs = [0.0; 3];
        for (slot, method) in errs.iter_mut().zip(Method::ALL) {
            let stage = format!("{} reconstruction, {} mask", method.name(), spec.kind.name());
            let channels = reconstruct(&ph.kspace, &mask, method, &config.l1).map_err(|e| e.at(&stage))?;
            let combined = sum_of_squares(&channels).map_err(|e| e.at(&stage))?;
            *slot = relative_error(&combined, &ph.reference).map_err(|e| e.at(&stage))?;
            if let (Some(dir), true) = (out, config.write_images) {
                save_image(dir, &format!("{}_{}", spec.kind.name(), method.name()), &combined)
                    .map_err(|e| e.at("write image"))?;
            }
        }
        if let (Some(dir), true) = (out, config.write_images) {
            write_pgm(&dir.join(format!("mask_{}.pgm", spec.kind.name())), &mask_image(&mask))
                .map_err(|e| e.at("write mask"))?;
        }
        rows.push(ExperimentRow {
            mask: spec.kind,
            fraction: mask.fraction(),
            shearlet_l1: errs[0],
            wavelet_l1: errs[1],
            fourier_inversion: errs[2],
        });
    }
    let report = ExperimentReport { rows };
    if let Some(dir) = out {
        write_csv(&dir.join("table.csv"), &TABLE_HEADER, &report.table_rows()).map_err(|e| e.at("write table"))?;
        write_json(&dir.join("config.json"), config).map_err(|e| e.at("write config"))?;
    }
    Ok(report)
}

/// Complex channel images from k-space, for inspection.
pub fn channel_images(kspace: &KSpace) -> Vec<Vec<Complex64>> {
    let fft = Fft2::new(kspace.nx, kspace.ny);
    kspace
        .data
        .iter()
        .map(|ch| {
            let mut z = ch.clone();
            fft.inverse(&mut z);
            z
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_mask_inversion_is_exact() {
        let ph = phantom(PhantomKind::Cartoon, 32, 32, 1, 3).unwrap();
        let imgs = fourier_inversion(&ph.kspace, &Mask::full(32, 32)).unwrap();
        let sos = sum_of_squares(&imgs).unwrap();
        assert!(relative_error(&sos, &ph.reference).unwrap() < 1e-10);
        let ph4 = phantom(PhantomKind::Cartoon, 32, 32, 4, 3).unwrap();
        let imgs = fourier_inversion(&ph4.kspace, &Mask::full(32, 32)).unwrap();
        for (a, b) in imgs.iter().zip(&ph4.channel_images) {
            assert!(relative_error(a, b).unwrap() < 1e-12);
        }
    }

    #[test]
    fn zero_kspace_gives_zero_images() {
        let k = KSpace { nx: 8, ny: 8, data: vec![vec![Complex64::new(0.0, 0.0); 64]] };
        let imgs = fourier_inversion(&k, &Mask::full(8, 8)).unwrap();
        assert!(imgs[0].pixels.iter().all(|&p| p == 0.0));
        assert!(fourier_inversion(&k, &Mask::full(4, 4)).is_err());
    }

    #[test]
    fn small_experiment_is_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let config = ExperimentConfig {
            nx: 32,
            ny: 32,
            masks: vec![MaskSpec { kind: MaskKind::Radial, fraction: 0.35 }],
            l1: L1Options { iterations: 20, shearlet_scales: 2, wavelet_levels: 3, ..L1Options::default() },
            ..ExperimentConfig::default()
        };
        let a = run_experiment(&config, Some(dir.path())).unwrap();
        let first = std::fs::read(dir.path().join("table.csv")).unwrap();
        run_experiment(&config, Some(dir.path())).unwrap();
        assert_eq!(first, std::fs::read(dir.path().join("table.csv")).unwrap());
        assert_eq!(a.rows.len(), 1);
        assert!(dir.path().join("radial_shearlet_l1.pgm").exists());
        let err = run_experiment(&ExperimentConfig { nx: 30, ..config }, None).unwrap_err();
        assert!(err.to_string().starts_with("phantom"));
    }
}
