//! Uniform Fourier sampling of compactly supported functions.
//!
//! The sampling vectors are `s_ℓ = ε e^{2πiε⟨ℓ,·⟩}` restricted to a box of
//! side `1/ε`, which makes them an orthonormal family. A measurement of `f`
//! is `⟨f, s_ℓ⟩ = ε f̂(εℓ)`.

use std::f64::consts::PI;

use faer::{Accum, Mat, Par};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::generators::GeneratorSpec;
use crate::system::{mat_vec, Atom, Mat2, Rect, ShearletIndex, SystemLayout};

/// Density `ε`, index extent `(M₁, M₂)` and the box `[-T₁, T₂]²` that must
/// contain every measured atom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingGrid {
    epsilon: f64,
    m: [usize; 2],
    t: [f64; 2],
    ratio: usize,
}

impl SamplingGrid {
    /// Requires `1/ε` to be an integer multiple of `T₁ + T₂`. The
    /// sampling box is then enlarged by that multiple so that the family
    /// `{s_ℓ}` is exactly orthonormal on it.
    pub fn new(epsilon: f64, m: [usize; 2], t: [f64; 2]) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::InvalidGrid(format!("epsilon = {epsilon} is outside (0, 1]")));
        }
        if !(t[0] > 0.0 && t[1] > 0.0 && t[0].is_finite() && t[1].is_finite()) {
            return Err(Error::InvalidGrid(format!("box extents {t:?} must be positive")));
        }
        let q = 1.0 / (epsilon * (t[0] + t[1]));
        let ratio = q.round();
        if ratio < 1.0 || (q - ratio).abs() > 1e-9 * q {
            return Err(Error::InvalidGrid(format!(
                "1/epsilon = {} is not an integer multiple of T1 + T2 = {}",
                1.0 / epsilon,
                t[0] + t[1]
            )));
        }
        Ok(SamplingGrid { epsilon, m, t, ratio: ratio as usize })
    }

    /// Smallest half-integer `T₁ = T₂` whose box holds every nominal atom
    /// support of the layout, with `ε = 1/(T₁ + T₂)`.
    pub fn covering(layout: &SystemLayout, m: [usize; 2]) -> Result<Self> {
        let t = covering_extent(layout);
        SamplingGrid::new(1.0 / (2.0 * t), m, [t, t])
    }

    /// Grid of density `ε` whose symmetric box `[-T, T]²` holds the layout,
    /// with `T = 1/(2εk)` for the largest integer `k` that still covers it.
    pub fn for_epsilon(layout: &SystemLayout, epsilon: f64, m: [usize; 2]) -> Result<Self> {
        let ext = covering_extent(layout);
        let k = (1.0 / (2.0 * epsilon * ext) + 1e-9).floor();
        if !(k >= 1.0) {
            return Err(Error::InvalidGrid(format!(
                "epsilon = {epsilon} is too coarse for supports in [-{ext}, {ext}]^2"
            )));
        }
        let t = 1.0 / (2.0 * epsilon * k);
        SamplingGrid::new(epsilon, m, [t, t])
    }

    pub fn with_m(&self, m: [usize; 2]) -> Self {
        SamplingGrid { m, ..*self }
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn m(&self) -> [usize; 2] {
        self.m
    }

    pub fn t(&self) -> [f64; 2] {
        self.t
    }

    /// `[-T₁, T₂]²`, the region atoms must live in.
    pub fn support_region(&self) -> Rect {
        Rect { lo: [-self.t[0], -self.t[0]], hi: [self.t[1], self.t[1]] }
    }

    /// The box of side `1/ε` on which the sampling vectors are orthonormal.
    pub fn sampling_box(&self) -> [f64; 2] {
        let r = self.ratio as f64;
        [r * self.t[0], r * self.t[1]]
    }

    pub fn num_samples(&self) -> usize {
        (2 * self.m[0] + 1) * (2 * self.m[1] + 1)
    }

    /// `I_M` in lexicographic order, first coordinate major.
    pub fn indices(&self) -> Vec<[i64; 2]> {
        let (m0, m1) = (self.m[0] as i64, self.m[1] as i64);
        let mut out = Vec::with_capacity(self.num_samples());
        for a in -m0..=m0 {
            for b in -m1..=m1 {
                out.push([a, b]);
            }
        }
        out
    }

    pub fn frequency(&self, l: [i64; 2]) -> [f64; 2] {
        [self.epsilon * l[0] as f64, self.epsilon * l[1] as f64]
    }

    pub fn check_support(&self, spec: &GeneratorSpec, atom: &Atom) -> Result<()> {
        let bx = atom.tight_support_box(spec);
        if self.support_region().contains_rect(&bx, 1e-12) {
            Ok(())
        } else {
            Err(Error::SupportViolation { support: [bx.lo, bx.hi], t1: self.t[0], t2: self.t[1] })
        }
    }
}

/// Smallest half-integer bounding every nominal support box of the layout.
pub fn covering_extent(layout: &SystemLayout) -> f64 {
    let side = layout.spec().box_side() as f64;
    let mut ext: f64 = 0.5;
    for a in layout.atoms() {
        let b = a.support_box(side);
        ext = ext.max(-b.lo[0]).max(-b.lo[1]).max(b.hi[0]).max(b.hi[1]);
    }
    (2.0 * ext - 1e-12).ceil() / 2.0
}

/// `⟨r_idx, s_ℓ⟩ = ε r̂_idx(εℓ)`.
pub fn measure_atom(layout: &SystemLayout, idx: &ShearletIndex, grid: &SamplingGrid, l: [i64; 2]) -> Result<Complex64> {
    let pos = layout.position(idx).ok_or(Error::IndexOutOfLayout)?;
    let atom = layout.atom(pos);
    grid.check_support(layout.spec(), atom)?;
    Ok(atom.ft(layout.spec(), grid.frequency(l)) * grid.epsilon)
}

/// Maximum deviation of `⟨s_ℓ, s_ℓ'⟩` from `δ_{ℓℓ'}` over the probe pairs,
/// integrating the exponentials in closed form over `[-T₁, T₂]²`.
pub fn orthonormality_check(epsilon: f64, t: [f64; 2], probes: &[([i64; 2], [i64; 2])]) -> f64 {
    let axis = |n: i64| -> Complex64 {
        if n == 0 {
            return Complex64::new(t[0] + t[1], 0.0);
        }
        let w = 2.0 * PI * epsilon * n as f64;
        (Complex64::from_polar(1.0, w * t[1]) - Complex64::from_polar(1.0, -w * t[0])) / Complex64::new(0.0, w)
    };
    probes
        .iter()
        .map(|(l, lp)| {
            let v = axis(l[0] - lp[0]) * axis(l[1] - lp[1]) * epsilon * epsilon;
            let target = if l == lp { 1.0 } else { 0.0 };
            (v - target).norm()
        })
        .fold(0.0, f64::max)
}

impl SamplingGrid {
    /// [`orthonormality_check`] on this grid's sampling box.
    pub fn orthonormality(&self, probes: &[([i64; 2], [i64; 2])]) -> f64 {
        orthonormality_check(self.epsilon, self.sampling_box(), probes)
    }
}

struct BlockEval {
    b_inv_t: Mat2,
    amp_inv: f64,
    which: crate::generators::Generator,
    start: usize,
    m_lo: [i64; 2],
    len: [usize; 2],
    offsets: Vec<(u32, u32)>,
}

/// Fast evaluation of rows `(ε r̂_λ(εℓ))_λ` for a layout prefix.
///
/// Atoms in a block share `B`, so the envelope `ĝ(B^{-T}ξ)` is evaluated
/// once per block and the translation phases come from short power tables.
pub struct RowEvaluator<'a> {
    spec: &'a GeneratorSpec,
    blocks: Vec<BlockEval>,
    n: usize,
    epsilon: f64,
}

impl<'a> RowEvaluator<'a> {
    pub fn new(layout: &'a SystemLayout, grid: &SamplingGrid, n: usize) -> Result<Self> {
        if n > layout.len() {
            return Err(Error::DimensionMismatch { expected: layout.len(), got: n });
        }
        for a in &layout.atoms()[..n] {
            grid.check_support(layout.spec(), a)?;
        }
        let mut blocks = Vec::new();
        for blk in layout.blocks() {
            if blk.start >= n {
                break;
            }
            let end = blk.end.min(n);
            let atoms = &layout.atoms()[blk.start..end];
            let ms: Vec<[i64; 2]> = atoms.iter().map(|a| a.index.translation()).collect();
            let lo = [ms.iter().map(|m| m[0]).min().unwrap(), ms.iter().map(|m| m[1]).min().unwrap()];
            let hi = [ms.iter().map(|m| m[0]).max().unwrap(), ms.iter().map(|m| m[1]).max().unwrap()];
            blocks.push(BlockEval {
                b_inv_t: atoms[0].b_inv_t,
                amp_inv: 1.0 / atoms[0].amplitude,
                which: atoms[0].generator(),
                start: blk.start,
                m_lo: lo,
                len: [(hi[0] - lo[0] + 1) as usize, (hi[1] - lo[1] + 1) as usize],
                offsets: ms.iter().map(|m| ((m[0] - lo[0]) as u32, (m[1] - lo[1]) as u32)).collect(),
            });
        }
        Ok(RowEvaluator { spec: layout.spec(), blocks, n, epsilon: grid.epsilon })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Writes `ε r̂_λ(εℓ)` for every atom of the prefix into `out`.
    pub fn row(&self, l: [i64; 2], out: &mut [Complex64]) {
        let xi = [self.epsilon * l[0] as f64, self.epsilon * l[1] as f64];
        let mut t0: Vec<Complex64> = Vec::new();
        let mut t1: Vec<Complex64> = Vec::new();
        for b in &self.blocks {
            let eta = mat_vec(&b.b_inv_t, xi);
            let env = self.spec.generator_ft(b.which, eta) * (b.amp_inv * self.epsilon);
            phase_table(eta[0], b.m_lo[0], b.len[0], &mut t0);
            phase_table(eta[1], b.m_lo[1], b.len[1], &mut t1);
            for (i, &(o0, o1)) in b.offsets.iter().enumerate() {
                out[b.start + i] = env * t0[o0 as usize] * t1[o1 as usize];
            }
        }
    }
}

/// `e^{-2πi m η}` for `m = lo, lo+1, …`, re-anchored every 32 steps.
fn phase_table(eta: f64, lo: i64, len: usize, out: &mut Vec<Complex64>) {
    out.clear();
    let step = Complex64::from_polar(1.0, -2.0 * PI * eta);
    let mut cur = Complex64::new(0.0, 0.0);
    for i in 0..len {
        if i % 32 == 0 {
            cur = Complex64::from_polar(1.0, -2.0 * PI * eta * (lo + i as i64) as f64);
        } else {
            cur *= step;
        }
        out.push(cur);
    }
}

/// Dense cross-Gramian `U[row(ℓ), λ] = ⟨r_λ, s_ℓ⟩` for the first `n` atoms.
pub fn cross_gramian(layout: &SystemLayout, grid: &SamplingGrid, n: usize) -> Result<Mat<Complex64>> {
    let ev = RowEvaluator::new(layout, grid, n)?;
    let ells = grid.indices();
    let mut u = Mat::<Complex64>::zeros(ells.len(), n);
    let mut row = vec![Complex64::new(0.0, 0.0); n];
    for (r, &l) in ells.iter().enumerate() {
        ev.row(l, &mut row);
        for (c, v) in row.iter().enumerate() {
            u[(r, c)] = *v;
        }
    }
    Ok(u)
}

/// `U x`: the measurements of `Σ x_λ r_λ`, in the order of `grid.indices()`.
pub fn measure_function(layout: &SystemLayout, grid: &SamplingGrid, coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let ev = RowEvaluator::new(layout, grid, coeffs.len())?;
    let mut row = vec![Complex64::new(0.0, 0.0); coeffs.len()];
    Ok(grid
        .indices()
        .into_iter()
        .map(|l| {
            ev.row(l, &mut row);
            row.iter().zip(coeffs).map(|(a, b)| a * b).sum()
        })
        .collect())
}

/// Measurements `ε f̂(εℓ)` of an arbitrary function given by its transform.
pub fn measure_transform(grid: &SamplingGrid, f_hat: impl Fn([f64; 2]) -> Complex64) -> Vec<Complex64> {
    grid.indices().into_iter().map(|l| f_hat(grid.frequency(l)) * grid.epsilon).collect()
}

/// `U* m` without materializing `U`.
pub fn adjoint_apply(layout: &SystemLayout, grid: &SamplingGrid, n: usize, meas: &[Complex64]) -> Result<Vec<Complex64>> {
    let ells = grid.indices();
    if meas.len() != ells.len() {
        return Err(Error::DimensionMismatch { expected: ells.len(), got: meas.len() });
    }
    let ev = RowEvaluator::new(layout, grid, n)?;
    let mut row = vec![Complex64::new(0.0, 0.0); n];
    let mut acc = vec![Complex64::new(0.0, 0.0); n];
    for (&l, &y) in ells.iter().zip(meas) {
        ev.row(l, &mut row);
        for (a, r) in acc.iter_mut().zip(&row) {
            *a += r.conj() * y;
        }
    }
    Ok(acc)
}

/// Running `U*U` for square grids `M₁ = M₂ = M`, grown ring by ring.
///
/// Atoms are real, so `r̂(-ξ) = conj r̂(ξ)` and `U*U` is real symmetric: each
/// pair `±ℓ` contributes `2 (aᵀa + bᵀb)` with `a + ib` the row at `ℓ`.
#[derive(Debug, Clone)]
pub struct SampledGram {
    h: Mat<f64>,
    m: Option<usize>,
}

const CHUNK: usize = 256;

impl SampledGram {
    pub fn empty(n: usize) -> Self {
        SampledGram { h: Mat::zeros(n, n), m: None }
    }

    /// `U*U` for an arbitrary grid extent `(M₁, M₂)`.
    pub fn for_grid(ev: &RowEvaluator, m: [usize; 2]) -> Self {
        let mut g = SampledGram::empty(ev.n());
        let (m0, m1) = (m[0] as i64, m[1] as i64);
        let ells: Vec<[i64; 2]> = (0..=m0)
            .flat_map(|a| (-m1..=m1).map(move |b| [a, b]))
            .filter(|l| l[0] > 0 || l[1] >= 0)
            .collect();
        g.accumulate(ev, &ells);
        if m0 == m1 {
            g.m = Some(m[0]);
        }
        g
    }

    pub fn h(&self) -> &Mat<f64> {
        &self.h
    }

    pub fn into_h(self) -> Mat<f64> {
        self.h
    }

    /// Current square extent, `None` before any row was added.
    pub fn m(&self) -> Option<usize> {
        self.m
    }

    /// Adds the rings up to `M = m` (square grid).
    pub fn grow_to(&mut self, ev: &RowEvaluator, m: usize) {
        let start = match self.m {
            Some(cur) if cur >= m => return,
            Some(cur) => cur as i64 + 1,
            None => 0,
        };
        let mut ells = Vec::new();
        for r in start..=(m as i64) {
            half_ring(r, &mut ells);
        }
        self.accumulate(ev, &ells);
        self.m = Some(m);
    }

    /// Adds the rows of `ells`, each taken to stand for the pair `±ℓ`
    /// (the origin only for itself).
    fn accumulate(&mut self, ev: &RowEvaluator, ells: &[[i64; 2]]) {
        let n = ev.n();
        let mut row = vec![Complex64::new(0.0, 0.0); n];
        let mut y = Mat::<f64>::zeros(n, 2 * CHUNK);
        for chunk in ells.chunks(CHUNK) {
            for (c, &l) in chunk.iter().enumerate() {
                ev.row(l, &mut row);
                let w = if l == [0, 0] { 1.0 } else { std::f64::consts::SQRT_2 };
                for (i, v) in row.iter().enumerate() {
                    y[(i, 2 * c)] = w * v.re;
                    y[(i, 2 * c + 1)] = w * v.im;
                }
            }
            let cols = 2 * chunk.len();
            let yv = y.as_ref().subcols(0, cols);
            faer::linalg::matmul::matmul(self.h.as_mut(), Accum::Add, yv, yv.transpose(), 1.0, Par::Seq);
        }
    }
}

/// Half of the square ring `max(|ℓ₁|,|ℓ₂|) = r`, one of each `±ℓ` pair.
fn half_ring(r: i64, out: &mut Vec<[i64; 2]>) {
    if r == 0 {
        out.push([0, 0]);
        return;
    }
    for b in -r..=r {
        out.push([r, b]);
    }
    for a in 1..r {
        out.push([a, r]);
        out.push([a, -r]);
    }
    out.push([0, r]);
}
