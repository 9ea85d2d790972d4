//! Monotone FISTA for `min_u ½‖M F u − b‖² + λ‖T u‖₁` with a unitary DFT
//! `F`, a sampling mask `M` and a Parseval or orthonormal transform `T`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::digital_shearlet::DigitalShearlet;
use super::dwt::Dwt2;
use super::fft::Fft2;
use super::mask::Mask;
use crate::error::{Error, Result};

/// Sparsifying analysis operator with `T* T = I`.
pub trait Sparsifier {
    fn coeff_len(&self) -> usize;
    fn analysis(&self, u: &[Complex64], out: &mut [Complex64]);
    fn synthesis(&self, c: &[Complex64], out: &mut [Complex64]);
}

impl Sparsifier for DigitalShearlet {
    fn coeff_len(&self) -> usize {
        DigitalShearlet::coeff_len(self)
    }
    fn analysis(&self, u: &[Complex64], out: &mut [Complex64]) {
        self.forward(u, out);
    }
    fn synthesis(&self, c: &[Complex64], out: &mut [Complex64]) {
        self.adjoint(c, out);
    }
}

impl Sparsifier for Dwt2 {
    fn coeff_len(&self) -> usize {
        self.len()
    }
    fn analysis(&self, u: &[Complex64], out: &mut [Complex64]) {
        out.copy_from_slice(u);
        self.forward(out);
    }
    fn synthesis(&self, c: &[Complex64], out: &mut [Complex64]) {
        out.copy_from_slice(c);
        self.inverse(out);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransformKind {
    Shearlet,
    Wavelet,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FistaOptions {
    pub lambda: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone)]
pub struct FistaResult {
    pub image: Vec<Complex64>,
    /// Objective of the accepted iterate after each step, starting with the
    /// zero-filled initial guess.
    pub objective: Vec<f64>,
    /// Relative objective change at the last iteration exceeded `1e-3`.
    pub not_converged: bool,
}

/// Zero-filled measurements: `b` on the mask, 0 elsewhere.
pub fn masked(kspace: &[Complex64], mask: &Mask) -> Result<Vec<Complex64>> {
    if kspace.len() != mask.pattern.len() {
        return Err(Error::DimensionMismatch { expected: mask.pattern.len(), got: kspace.len() });
    }
    Ok(kspace
        .iter()
        .zip(&mask.pattern)
        .map(|(&z, &m)| if m { z } else { Complex64::new(0.0, 0.0) })
        .collect())
}

fn shrink(c: &mut [Complex64], tau: f64) {
    for z in c {
        let a = z.norm();
        *z = if a > tau { *z * (1.0 - tau / a) } else { Complex64::new(0.0, 0.0) };
    }
}

struct Problem<'a, S: Sparsifier> {
    fft: &'a Fft2,
    mask: &'a [bool],
    b: &'a [Complex64],
    t: &'a S,
    lambda: f64,
    n_coeff: usize,
}

impl<S: Sparsifier> Problem<'_, S> {
    fn objective(&self, u: &[Complex64]) -> f64 {
        let mut k = u.to_vec();
        self.fft.forward(&mut k);
        let data: f64 = k
            .iter()
            .zip(self.mask)
            .zip(self.b)
            .filter(|((_, &m), _)| m)
            .map(|((z, _), b)| (z - b).norm_sqr())
            .sum();
        let mut c = vec![Complex64::new(0.0, 0.0); self.n_coeff];
        self.t.analysis(u, &mut c);
        0.5 * data + self.lambda * c.iter().map(|z| z.norm()).sum::<f64>()
    }

    /// `prox(y − ∇f(y))` with unit step.
    fn step(&self, y: &[Complex64]) -> Vec<Complex64> {
        let mut k = y.to_vec();
        self.fft.forward(&mut k);
        for ((z, &m), b) in k.iter_mut().zip(self.mask).zip(self.b) {
            if m {
                *z = *b;
            }
        }
        self.fft.inverse(&mut k);
        let mut c = vec![Complex64::new(0.0, 0.0); self.n_coeff];
        self.t.analysis(&k, &mut c);
        shrink(&mut c, self.lambda);
        let mut out = vec![Complex64::new(0.0, 0.0); k.len()];
        self.t.synthesis(&c, &mut out);
        out
    }
}

/// Reconstructs one channel from masked k-space `b` (unitary DFT scaling).
pub fn fista<S: Sparsifier>(
    b_full: &[Complex64],
    mask: &Mask,
    transform: &S,
    opts: FistaOptions,
) -> Result<FistaResult> {
    if !(opts.lambda > 0.0) {
        return Err(Error::InvalidParameter(format!("lambda must be positive, got {}", opts.lambda)));
    }
    if opts.iterations == 0 {
        return Err(Error::InvalidParameter("iterations must be at least 1".into()));
    }
    let b = masked(b_full, mask)?;
    let n = b.len();
    let n_coeff = transform.coeff_len();
    let fft = Fft2::new(mask.nx, mask.ny);
    let p = Problem { fft: &fft, mask: &mask.pattern, b: &b, t: transform, lambda: opts.lambda, n_coeff };

    let mut x = b.clone();
    fft.inverse(&mut x);
    let mut fx = p.objective(&x);
    let mut y = x.clone();
    let mut t = 1.0f64;
    let mut history = vec![fx];
    for _ in 0..opts.iterations {
        let z = p.step(&y);
        let fz = p.objective(&z);
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let accepted = fz <= fx;
        let x_new = if accepted { z.clone() } else { x.clone() };
        // y = x_new + (t / t_next)(z - x_new) + ((t - 1) / t_next)(x_new - x)
        let a = t / t_next;
        let c = (t - 1.0) / t_next;
        for i in 0..n {
            y[i] = x_new[i] + (z[i] - x_new[i]) * a + (x_new[i] - x[i]) * c;
        }
        x = x_new;
        if accepted {
            fx = fz;
        }
        t = t_next;
        history.push(fx);
    }
    let last = history[history.len() - 1];
    let before = history[history.len() - 2];
    let rel = (before - last).abs() / last.abs().max(f64::MIN_POSITIVE);
    let not_converged = rel > 1e-3;
    if not_converged {
        log::warn!("FISTA relative objective change {rel:.3e} at final iteration");
    }
    Ok(FistaResult { image: x, objective: history, not_converged })
}
