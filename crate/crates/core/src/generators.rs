//! Compactly supported spline generators for the shearlet system.
//!
//! The scaling function is a tensor product of cardinal B-splines, and the
//! shearlet generator replaces the first factor by a difference-filtered
//! B-spline so that it carries `alpha` vanishing moments. Both are dilated
//! by an integer factor so that the support fits a small square, and both
//! have closed-form Fourier transforms under the convention
//! `f̂(ξ) = ∫ f(x) exp(-2πi⟨x, ξ⟩) dx`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::PiecewisePoly;

/// Which generator of the cone-adapted system to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Generator {
    /// `φ(x) = b(x₁) b(x₂)`.
    Scaling,
    /// `ψ(x) = w(x₁) b(x₂)`, the horizontal-cone generator.
    Cone1,
    /// `ψ̃(x₁, x₂) = ψ(x₂, x₁)`, the vertical-cone generator.
    Cone2,
}

/// `sin(πx)/(πx)` with the removable singularity handled by its series.
pub fn sinc(x: f64) -> f64 {
    let t = PI * x;
    if t.abs() < 1e-4 {
        let t2 = t * t;
        1.0 - t2 / 6.0 + t2 * t2 / 120.0
    } else {
        t.sin() / t
    }
}

/// Fourier transform of the cardinal B-spline of the given order, supported
/// on `[0, order]`.
pub fn bspline_ft(order: usize, xi: f64) -> Complex64 {
    assert!(order >= 1, "B-spline order must be positive");
    let mag = sinc(xi).powi(order as i32);
    Complex64::from_polar(mag, -PI * order as f64 * xi)
}

/// Order of the zero of `P(z) = Σ hₙ zⁿ` at `z = 1`, found from the discrete
/// moments `Σ nᵖ hₙ`.
///
/// A moment counts as zero when it is below `1e-10` times the sum of the
/// absolute terms that produced it.
pub fn vanishing_moments(filter: &[f64]) -> usize {
    if filter.iter().all(|&h| h == 0.0) {
        return 0;
    }
    let mut p = 0usize;
    loop {
        let (sum, scale) = filter.iter().enumerate().fold((0.0, 0.0), |(s, a), (n, &h)| {
            let term = (n as f64).powi(p as i32) * h;
            (s + term, a + term.abs())
        });
        if sum.abs() > 1e-10 * scale.max(f64::MIN_POSITIVE) {
            return p;
        }
        p += 1;
        if p > filter.len() {
            // only the zero filter has more vanishing moments than taps
            return p;
        }
    }
}

/// Binomial `n`-th order difference filter `(1, -n, …, (-1)ⁿ)`.
pub fn difference_filter(order: usize) -> Vec<f64> {
    let mut taps = vec![1.0];
    for _ in 0..order {
        let mut next = vec![0.0; taps.len() + 1];
        for (i, &t) in taps.iter().enumerate() {
            next[i] += t;
            next[i + 1] -= t;
        }
        taps = next;
    }
    taps
}

/// Parameters of the spline generator family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GeneratorConfig", into = "GeneratorConfig")]
pub struct GeneratorSpec {
    spline_order: usize,
    moment_filter: Vec<f64>,
    alpha: usize,
    decay_r: f64,
    dilation: usize,
    bspline: PiecewisePoly,
    wavelet: PiecewisePoly,
}

/// Serialized form of [`GeneratorSpec`]; validated on conversion.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub spline_order: usize,
    pub moment_filter: Vec<f64>,
    pub alpha: usize,
    pub decay_r: f64,
    /// Checked against the derived value when present.
    #[serde(default)]
    pub support_len: Option<usize>,
    #[serde(default)]
    pub dilation: Option<usize>,
}

impl TryFrom<GeneratorConfig> for GeneratorSpec {
    type Error = Error;

    fn try_from(c: GeneratorConfig) -> Result<Self> {
        let dilation = c
            .dilation
            .unwrap_or(c.spline_order + c.moment_filter.len().saturating_sub(1));
        let spec = GeneratorSpec::new(c.spline_order, c.moment_filter, c.alpha, c.decay_r, dilation)?;
        if let Some(a) = c.support_len {
            if a != spec.support_len() {
                return Err(Error::InvalidSpec(format!(
                    "support_len {a} disagrees with the derived value {}",
                    spec.support_len()
                )));
            }
        }
        Ok(spec)
    }
}

impl From<GeneratorSpec> for GeneratorConfig {
    fn from(s: GeneratorSpec) -> Self {
        let support_len = Some(s.support_len());
        GeneratorConfig {
            spline_order: s.spline_order,
            moment_filter: s.moment_filter,
            alpha: s.alpha,
            decay_r: s.decay_r,
            support_len,
            dilation: Some(s.dilation),
        }
    }
}

impl Default for GeneratorSpec {
    /// Order-4 B-splines with the 4th-order difference filter, `r = 3.5`,
    /// dilated onto the unit square.
    fn default() -> Self {
        GeneratorSpec::new(4, difference_filter(4), 4, 3.5, 8).expect("default generator is valid")
    }
}

impl GeneratorSpec {
    /// Validates and builds a generator family.
    ///
    /// `dilation` compresses the raw spline support `[0, a]²` (with
    /// `a = spline_order + filter_len - 1`) by an integer factor, which must
    /// divide `a`. The frame hypothesis `alpha > r > 3` is enforced.
    pub fn new(
        spline_order: usize,
        moment_filter: Vec<f64>,
        alpha: usize,
        decay_r: f64,
        dilation: usize,
    ) -> Result<Self> {
        if spline_order == 0 {
            return Err(Error::InvalidSpec("spline order must be at least 1".into()));
        }
        if moment_filter.is_empty() || moment_filter.iter().any(|h| !h.is_finite()) {
            return Err(Error::InvalidSpec("moment filter must be a finite nonempty sequence".into()));
        }
        let moments = vanishing_moments(&moment_filter);
        if moments != alpha {
            return Err(Error::InvalidSpec(format!(
                "filter has {moments} vanishing moments but alpha = {alpha} was requested"
            )));
        }
        if !(decay_r > 3.0 && (alpha as f64) > decay_r) {
            return Err(Error::InvalidSpec(format!(
                "frame hypothesis alpha > r > 3 violated (alpha = {alpha}, r = {decay_r})"
            )));
        }
        let support_len = spline_order + moment_filter.len() - 1;
        if dilation == 0 || support_len % dilation != 0 {
            return Err(Error::InvalidSpec(format!(
                "dilation {dilation} must divide the raw support length {support_len}"
            )));
        }
        let bspline = PiecewisePoly::bspline(spline_order);
        let wavelet = bspline.filtered(&moment_filter);
        Ok(GeneratorSpec {
            spline_order,
            moment_filter,
            alpha,
            decay_r,
            dilation,
            bspline,
            wavelet,
        })
    }

    pub fn spline_order(&self) -> usize {
        self.spline_order
    }

    pub fn moment_filter(&self) -> &[f64] {
        &self.moment_filter
    }

    pub fn alpha(&self) -> usize {
        self.alpha
    }

    pub fn decay_r(&self) -> f64 {
        self.decay_r
    }

    pub fn dilation(&self) -> usize {
        self.dilation
    }

    /// Raw support side `a` of the undilated generators.
    pub fn support_len(&self) -> usize {
        self.spline_order + self.moment_filter.len() - 1
    }

    /// Side of the square `[0, s]²` containing every dilated generator.
    pub fn box_side(&self) -> i64 {
        (self.support_len() / self.dilation) as i64
    }

    /// Knot spacing of the dilated splines.
    pub fn knot_spacing(&self) -> f64 {
        1.0 / self.dilation as f64
    }

    pub fn vanishing_moments(&self) -> usize {
        vanishing_moments(&self.moment_filter)
    }

    /// Raw (undilated) 1-D factors of a generator along each axis, so that
    /// `gen(x) = d² p₀(d x₁) p₁(d x₂)`.
    pub(crate) fn axis_profiles(&self, which: Generator) -> [&PiecewisePoly; 2] {
        match which {
            Generator::Scaling => [&self.bspline, &self.bspline],
            Generator::Cone1 => [&self.wavelet, &self.bspline],
            Generator::Cone2 => [&self.bspline, &self.wavelet],
        }
    }

    /// Side lengths of the true support rectangle `[0, w₀] × [0, w₁]`.
    pub fn generator_extent(&self, which: Generator) -> [f64; 2] {
        let [p, q] = self.axis_profiles(which);
        let d = self.dilation as f64;
        [p.num_pieces() as f64 / d, q.num_pieces() as f64 / d]
    }

    /// `P(e^{-2πiξ})` for a raw frequency `ξ`.
    fn filter_symbol(&self, xi: f64) -> Complex64 {
        let step = Complex64::from_polar(1.0, -2.0 * PI * xi);
        // Horner in z from the highest tap
        self.moment_filter
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &h| acc * step + h)
    }

    /// Fourier transform of the dilated 1-D B-spline `b`.
    pub fn scaling_ft_1d(&self, xi: f64) -> Complex64 {
        bspline_ft(self.spline_order, xi / self.dilation as f64)
    }

    /// Fourier transform of the dilated 1-D wavelet factor `w`.
    pub fn wavelet_ft_1d(&self, xi: f64) -> Complex64 {
        let raw = xi / self.dilation as f64;
        self.filter_symbol(raw) * bspline_ft(self.spline_order, raw)
    }

    /// Closed-form Fourier transform of a generator.
    pub fn generator_ft(&self, which: Generator, xi: [f64; 2]) -> Complex64 {
        match which {
            Generator::Scaling => self.scaling_ft_1d(xi[0]) * self.scaling_ft_1d(xi[1]),
            Generator::Cone1 => self.wavelet_ft_1d(xi[0]) * self.scaling_ft_1d(xi[1]),
            Generator::Cone2 => self.scaling_ft_1d(xi[0]) * self.wavelet_ft_1d(xi[1]),
        }
    }

    /// Dilated 1-D B-spline `b(x) = d·B(d x)`.
    pub fn scaling_1d(&self, x: f64) -> f64 {
        let d = self.dilation as f64;
        d * self.bspline.eval(d * x)
    }

    /// Dilated 1-D wavelet factor `w(x) = d·Σ hₙ B(d x - n)`.
    pub fn wavelet_1d(&self, x: f64) -> f64 {
        let d = self.dilation as f64;
        d * self.wavelet.eval(d * x)
    }

    /// Pointwise value of a generator; exactly zero outside `[0, s]²`.
    pub fn generator_space(&self, which: Generator, x: [f64; 2]) -> f64 {
        match which {
            Generator::Scaling => self.scaling_1d(x[0]) * self.scaling_1d(x[1]),
            Generator::Cone1 => self.wavelet_1d(x[0]) * self.scaling_1d(x[1]),
            Generator::Cone2 => self.scaling_1d(x[0]) * self.wavelet_1d(x[1]),
        }
    }

    /// Squared L² norm of a generator, integrated exactly from the splines.
    pub fn generator_norm_sq(&self, which: Generator) -> f64 {
        let d = self.dilation as f64;
        let b = d * self.bspline.norm_sq();
        let w = d * self.wavelet.norm_sq();
        match which {
            Generator::Scaling => b * b,
            Generator::Cone1 | Generator::Cone2 => w * b,
        }
    }
}

/// Empirical decay constants of a generator family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayReport {
    /// `sup |φ̂(ξ)| (1+|ξ₁|)^r (1+|ξ₂|)^r` over the probes.
    pub max_ratio_phi: f64,
    /// `sup |ψ̂(ξ)| / [min(1,|ξ₁|^α)(1+|ξ₁|)^{-r}(1+|ξ₂|)^{-r}]` over the probes.
    pub max_ratio_psi: f64,
    pub pass: bool,
}

/// Probe frequencies on dyadic shells up to radius `2^max_exp`, along the
/// axes and diagonals, with eight log-spaced radii per octave. The origin is
/// included.
pub fn dyadic_probe_grid(min_exp: i32, max_exp: i32) -> Vec<[f64; 2]> {
    let mut probes = vec![[0.0, 0.0]];
    let dirs: [[f64; 2]; 8] = [
        [1.0, 0.0],
        [0.0, 1.0],
        [1.0, 1.0],
        [1.0, -1.0],
        [-1.0, 0.0],
        [0.0, -1.0],
        [2.0, 1.0],
        [1.0, 2.0],
    ];
    for e in min_exp..max_exp {
        for q in 0..8 {
            let radius = 2f64.powf(e as f64 + q as f64 / 8.0 + 0.0625);
            for d in &dirs {
                let n = (d[0] * d[0] + d[1] * d[1]).sqrt();
                probes.push([radius * d[0] / n, radius * d[1] / n]);
            }
        }
    }
    probes
}

fn decay_ratios(spec: &GeneratorSpec, r: f64, alpha: f64, xi: [f64; 2]) -> (f64, f64) {
    let env = (1.0 + xi[0].abs()).powf(-r) * (1.0 + xi[1].abs()).powf(-r);
    let phi = spec.generator_ft(Generator::Scaling, xi).norm() / env;
    let psi_num = spec.generator_ft(Generator::Cone1, xi).norm();
    let psi_den = xi[0].abs().powf(alpha).min(1.0) * env;
    let psi = if psi_den == 0.0 {
        if psi_num == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        psi_num / psi_den
    };
    (phi, psi)
}

/// Measures the constants `C₁`, `C₂` of the decay envelopes on a probe grid.
///
/// Probes are grouped into dyadic radius shells. The check passes when both
/// suprema are finite and the outermost shell does not exceed the maximum
/// over all inner shells, i.e. the ratio shows no growth toward the far
/// field. A grid with a single shell passes on finiteness alone.
pub fn verify_decay(
    spec: &GeneratorSpec,
    r: f64,
    alpha: f64,
    probe_grid: &[[f64; 2]],
) -> Result<DecayReport> {
    if probe_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let shell = |xi: &[f64; 2]| -> i32 {
        let rad = xi[0].hypot(xi[1]);
        if rad < 1.0 {
            i32::MIN
        } else {
            rad.log2().floor() as i32
        }
    };
    let outer = probe_grid.iter().map(shell).max().unwrap_or(i32::MIN);
    let (mut phi_in, mut psi_in, mut phi_out, mut psi_out) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut inner_count = 0usize;
    for xi in probe_grid {
        let (p, q) = decay_ratios(spec, r, alpha, *xi);
        if shell(xi) == outer {
            phi_out = phi_out.max(p);
            psi_out = psi_out.max(q);
        } else {
            inner_count += 1;
            phi_in = phi_in.max(p);
            psi_in = psi_in.max(q);
        }
    }
    let max_ratio_phi = phi_in.max(phi_out);
    let max_ratio_psi = psi_in.max(psi_out);
    let finite = max_ratio_phi.is_finite() && max_ratio_psi.is_finite();
    let no_growth = inner_count == 0 || (phi_out <= phi_in && psi_out <= psi_in);
    Ok(DecayReport {
        max_ratio_phi,
        max_ratio_psi,
        pass: finite && no_growth,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bspline_ft_normalization_and_zeros() {
        assert_eq!(bspline_ft(2, 0.0), Complex64::new(1.0, 0.0));
        assert!(bspline_ft(1, 1.0).norm() < 1e-15);
        assert!((bspline_ft(2, 0.5).norm() - 0.405_284_734_569_351).abs() < 1e-12);
    }

    #[test]
    fn sinc_series_branch_is_continuous() {
        let x = 0.999e-4 / PI;
        let y = 1.001e-4 / PI;
        assert!((sinc(x) - sinc(y)).abs() < 1e-9);
        assert_eq!(sinc(0.0), 1.0);
    }

    #[test]
    fn moments_of_difference_filters() {
        assert_eq!(vanishing_moments(&[1.0, -1.0]), 1);
        assert_eq!(vanishing_moments(&[1.0, -2.0, 1.0]), 2);
        assert_eq!(vanishing_moments(&[1.0, -4.0, 6.0, -4.0, 1.0]), 4);
        assert_eq!(vanishing_moments(&[1.0, 1.0]), 0);
        assert_eq!(difference_filter(4), vec![1.0, -4.0, 6.0, -4.0, 1.0]);
    }

    #[test]
    fn moments_exact_rational_oracle() {
        // integer arithmetic: Σ n^p h_n for the 4th difference
        let h: [i128; 5] = [1, -4, 6, -4, 1];
        let moments: Vec<i128> = (0..=4u32)
            .map(|p| h.iter().enumerate().map(|(n, &c)| (n as i128).pow(p) * c).sum())
            .collect();
        assert_eq!(&moments[..4], &[0, 0, 0, 0]);
        assert_ne!(moments[4], 0);
        assert_eq!(vanishing_moments(&[1.0, -4.0, 6.0, -4.0, 1.0]), 4);
    }

    #[test]
    fn construction_rejects_bad_parameters() {
        assert!(GeneratorSpec::new(4, vec![1.0, -1.0], 1, 3.5, 4).is_err());
        assert!(GeneratorSpec::new(4, difference_filter(4), 3, 3.5, 8).is_err());
        assert!(GeneratorSpec::new(4, difference_filter(4), 4, 2.5, 8).is_err());
        assert!(GeneratorSpec::new(4, difference_filter(4), 4, 3.5, 3).is_err());
        assert!(GeneratorSpec::new(0, difference_filter(4), 4, 3.5, 1).is_err());
        assert!(GeneratorSpec::new(4, difference_filter(4), 4, 3.5, 1).is_ok());
    }

    #[test]
    fn support_length_is_derived() {
        let s = GeneratorSpec::default();
        assert_eq!(s.support_len(), 8);
        assert_eq!(s.box_side(), 1);
        let raw = GeneratorSpec::new(4, difference_filter(4), 4, 3.5, 1).unwrap();
        assert_eq!(raw.box_side(), 8);
    }

    #[test]
    fn generator_ft_examples() {
        let s = GeneratorSpec::default();
        assert!((s.generator_ft(Generator::Scaling, [0.0, 0.0]) - 1.0).norm() < 1e-15);
        for t in [-3.0, 0.0, 0.7, 12.5] {
            assert_eq!(s.generator_ft(Generator::Cone1, [0.0, t]).norm(), 0.0);
        }
        for (u, v) in [(0.3, -1.7), (5.0, 2.0), (-9.25, 0.125)] {
            assert_eq!(
                s.generator_ft(Generator::Cone2, [u, v]),
                s.generator_ft(Generator::Cone1, [v, u])
            );
        }
    }

    #[test]
    fn spatial_support_is_exact() {
        let s = GeneratorSpec::default();
        for which in [Generator::Scaling, Generator::Cone1, Generator::Cone2] {
            for x in [[-1e-9, 0.5], [0.5, 1.0 + 1e-9], [1.2, 0.3], [0.4, -0.2]] {
                assert_eq!(s.generator_space(which, x), 0.0);
            }
            assert!(s.generator_space(which, [0.23, 0.31]) != 0.0);
        }
    }

    #[test]
    fn default_spec_decay_passes() {
        let s = GeneratorSpec::default();
        let report = verify_decay(&s, 3.5, 4.0, &dyadic_probe_grid(-6, 10)).unwrap();
        assert!(report.pass, "{report:?}");
        assert!(report.max_ratio_phi.is_finite() && report.max_ratio_psi.is_finite());
    }

    #[test]
    fn low_order_spline_fails_high_decay_claim() {
        // order 2 decays like |ξ|^-2, far below a claimed r = 5
        let s = GeneratorSpec::new(2, difference_filter(6), 6, 5.0, 1).unwrap();
        let report = verify_decay(&s, 5.0, 6.0, &dyadic_probe_grid(-6, 10)).unwrap();
        assert!(!report.pass, "{report:?}");
    }

    #[test]
    fn origin_only_grid_passes() {
        let s = GeneratorSpec::default();
        let report = verify_decay(&s, 3.5, 4.0, &[[0.0, 0.0]]).unwrap();
        assert!(report.pass);
        assert_eq!(report.max_ratio_psi, 0.0);
        assert!(matches!(verify_decay(&s, 3.5, 4.0, &[]), Err(Error::EmptyGrid)));
    }
}
