//! Generalized sampling: Gramian, cosine angle, stable sampling rate and
//! the consistent reconstruction.
//!
//! Everything is expressed in coefficient space. With `G` the Gramian of the
//! prefix and `H = U*U` the sampled Gramian, `‖Σ x_λ r_λ‖² = x*Gx` and
//! `‖P_S Σ x_λ r_λ‖² = x*Hx`, so the cosine angle is the square root of the
//! smallest generalized eigenvalue of `(H, G)` on the range of `G`.

use std::time::Instant;

use faer::{Mat, MatRef, Side};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gramian::spatial_gramian;
use crate::sampling::{RowEvaluator, SampledGram, SamplingGrid};
use crate::system::SystemLayout;

pub const DEFAULT_RANK_TOL: f64 = 1e-10;
pub const ILL_CONDITIONED: f64 = 1e8;

/// Symmetric eigen-decomposition, eigenvalues in descending order.
pub(crate) fn sym_eigen(a: MatRef<f64>) -> (Vec<f64>, Mat<f64>) {
    let n = a.nrows();
    if n == 0 {
        return (Vec::new(), Mat::zeros(0, 0));
    }
    let e = a.self_adjoint_eigen(Side::Lower).expect("symmetric eigensolver converges");
    let s = e.S().column_vector();
    let u = e.U();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| s[j].total_cmp(&s[i]));
    let vals = order.iter().map(|&i| s[i]).collect();
    let vecs = Mat::from_fn(n, n, |r, c| u[(r, order[c])]);
    (vals, vecs)
}

/// Hermitian eigen-decomposition, eigenvalues in ascending order.
fn herm_eigen(a: MatRef<Complex64>) -> (Vec<f64>, Mat<Complex64>) {
    let e = a.self_adjoint_eigen(Side::Lower).expect("hermitian eigensolver converges");
    let s = e.S().column_vector();
    let n = a.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| s[i].re.total_cmp(&s[j].re));
    let u = e.U();
    (order.iter().map(|&i| s[i].re).collect(), Mat::from_fn(n, n, |r, c| u[(r, order[c])]))
}

/// Gramian of a finite atom family together with its spectrum.
#[derive(Debug, Clone)]
pub struct Gramian {
    g: Mat<f64>,
    eigenvalues: Vec<f64>,
    eigenvectors: Mat<f64>,
    rank_tol: f64,
    rank: usize,
}

impl Gramian {
    pub fn from_matrix(g: Mat<f64>, rank_tol: f64) -> Result<Self> {
        let n = g.nrows();
        if n == 0 || g.ncols() != n {
            return Err(Error::DegenerateGramian);
        }
        // symmetrize by averaging
        let g = Mat::from_fn(n, n, |i, j| 0.5 * (g[(i, j)] + g[(j, i)]));
        let (eigenvalues, eigenvectors) = sym_eigen(g.as_ref());
        let top = eigenvalues[0];
        if !(top > 0.0) {
            return Err(Error::DegenerateGramian);
        }
        let rank = eigenvalues.iter().take_while(|&&l| l > rank_tol * top).count();
        Ok(Gramian { g, eigenvalues, eigenvectors, rank_tol, rank })
    }

    /// Exact Gramian of the first `n` atoms of the layout.
    pub fn build(layout: &SystemLayout, n: usize) -> Result<Self> {
        if n == 0 || n > layout.len() {
            return Err(Error::DimensionMismatch { expected: layout.len(), got: n });
        }
        Gramian::from_matrix(spatial_gramian(layout, n), DEFAULT_RANK_TOL)
    }

    pub fn matrix(&self) -> &Mat<f64> {
        &self.g
    }

    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    /// Descending eigenvalues.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn rank_tol(&self) -> f64 {
        self.rank_tol
    }

    /// Smallest eigenvalue above the rank tolerance: the lower frame bound
    /// of the family on its span.
    pub fn a_n(&self) -> f64 {
        self.eigenvalues[self.rank - 1]
    }

    pub fn b_n(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// `W = V_r Λ_r^{-1/2}`, so that `Wᵀ G W = I` on the range of `G`.
    pub fn whitening(&self) -> Mat<f64> {
        let n = self.dim();
        Mat::from_fn(n, self.rank, |i, c| self.eigenvectors[(i, c)] / self.eigenvalues[c].sqrt())
    }

    /// `x* G x`.
    pub fn energy(&self, x: &[Complex64]) -> f64 {
        let n = self.dim();
        let mut s = 0.0;
        for j in 0..n {
            let mut col = Complex64::new(0.0, 0.0);
            for i in 0..n {
                col += x[i].conj() * self.g[(i, j)];
            }
            s += (col * x[j]).re;
        }
        s
    }

    /// `G x`.
    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim();
        (0..n).map(|i| (0..n).map(|j| x[j] * self.g[(i, j)]).sum()).collect()
    }
}

/// Infimum cosine angle between the reconstruction and sampling spaces.
#[derive(Debug, Clone, Serialize)]
pub struct AngleResult {
    pub c: f64,
    pub n: usize,
    pub m: [usize; 2],
    /// Coefficients of a unit-norm function attaining the infimum.
    pub witness: Vec<Complex64>,
}

/// `c_{N,M}` from a dense cross-Gramian.
pub fn cosine_angle(u: MatRef<Complex64>, g: &Gramian, m: [usize; 2]) -> Result<AngleResult> {
    if u.ncols() != g.dim() {
        return Err(Error::DimensionMismatch { expected: g.dim(), got: u.ncols() });
    }
    let h = u.adjoint() * u;
    angle_hermitian(h.as_ref(), g, m)
}

fn angle_hermitian(h: MatRef<Complex64>, g: &Gramian, m: [usize; 2]) -> Result<AngleResult> {
    let w = g.whitening();
    let wc = Mat::from_fn(w.nrows(), w.ncols(), |i, j| Complex64::new(w[(i, j)], 0.0));
    let k = wc.adjoint() * h * &wc;
    let k = Mat::from_fn(k.nrows(), k.ncols(), |i, j| 0.5 * (k[(i, j)] + k[(j, i)].conj()));
    let (vals, vecs) = herm_eigen(k.as_ref());
    let y = vecs.col(0);
    let witness = (0..wc.nrows()).map(|i| (0..wc.ncols()).map(|c| wc[(i, c)] * y[c]).sum()).collect();
    Ok(AngleResult { c: vals[0].max(0.0).sqrt(), n: g.dim(), m, witness })
}

/// `c_{N,M}` from a real symmetric sampled Gramian `H = U*U`.
pub fn cosine_angle_from_gram(h: MatRef<f64>, g: &Gramian, m: [usize; 2]) -> Result<AngleResult> {
    if h.nrows() != g.dim() {
        return Err(Error::DimensionMismatch { expected: g.dim(), got: h.nrows() });
    }
    let w = g.whitening();
    let k = w.transpose() * h * &w;
    let k = Mat::from_fn(k.nrows(), k.ncols(), |i, j| 0.5 * (k[(i, j)] + k[(j, i)]));
    let (vals, vecs) = sym_eigen(k.as_ref());
    let last = vals.len() - 1;
    let y = vecs.col(last);
    let witness = (0..w.nrows())
        .map(|i| Complex64::new((0..w.ncols()).map(|c| w[(i, c)] * y[c]).sum(), 0.0))
        .collect();
    Ok(AngleResult { c: vals[last].max(0.0).sqrt(), n: g.dim(), m, witness })
}

/// `c_{N,M}` for the prefix of a layout, streaming the sampled Gramian.
pub fn angle_for_grid(layout: &SystemLayout, grid: &SamplingGrid, g: &Gramian) -> Result<AngleResult> {
    let ev = RowEvaluator::new(layout, grid, g.dim())?;
    let h = SampledGram::for_grid(&ev, grid.m());
    cosine_angle_from_gram(h.h().as_ref(), g, grid.m())
}

/// Doubling-then-bisection parameters for the stable sampling rate.
#[derive(Debug, Clone, Copy)]
pub struct SsrSearch {
    pub start: usize,
    pub growth: f64,
    pub max_m: usize,
}

impl Default for SsrSearch {
    fn default() -> Self {
        SsrSearch { start: 4, growth: 2.0, max_m: 4096 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SsrResult {
    /// Least square extent `M` with `c_{N,M} > 1/θ`.
    pub m: usize,
    pub c: f64,
    pub theta: f64,
    pub n: usize,
    /// Every `(M, c)` evaluated, in order.
    pub trace: Vec<(usize, f64)>,
    pub wall_time_ms: f64,
}

impl SsrResult {
    pub fn num_samples(&self) -> usize {
        (2 * self.m + 1) * (2 * self.m + 1)
    }
}

/// Stable sampling rate `Θ(N, θ)` over square grids.
///
/// The sampled Gramian grows ring by ring and a snapshot at the last
/// failing extent seeds each bisection step, so no row is computed twice
/// along the accepted path.
pub fn stable_sampling_rate(
    layout: &SystemLayout,
    grid: &SamplingGrid,
    g: &Gramian,
    theta: f64,
    search: SsrSearch,
) -> Result<SsrResult> {
    if !(theta > 1.0) {
        return Err(Error::InvalidParameter(format!("theta must exceed 1, got {theta}")));
    }
    if !(search.growth > 1.0) {
        return Err(Error::InvalidParameter("search growth factor must exceed 1".into()));
    }
    let t0 = Instant::now();
    let threshold = 1.0 / theta;
    let ev = RowEvaluator::new(layout, grid, g.dim())?;
    let mut trace = Vec::new();
    let eval = |acc: &SampledGram, m: usize, trace: &mut Vec<(usize, f64)>| -> Result<f64> {
        let c = cosine_angle_from_gram(acc.h().as_ref(), g, [m, m])?.c;
        trace.push((m, c));
        log::debug!("N = {}, M = {m}: c = {c}", g.dim());
        Ok(c)
    };

    let mut lo: Option<(usize, SampledGram)> = None;
    let mut acc = SampledGram::empty(g.dim());
    let mut m = search.start;
    let (mut hi, mut c_hi);
    loop {
        acc.grow_to(&ev, m);
        let c = eval(&acc, m, &mut trace)?;
        if c > threshold {
            hi = m;
            c_hi = c;
            break;
        }
        if m >= search.max_m {
            return Err(Error::SearchBudgetExceeded { m, c });
        }
        lo = Some((m, acc.clone()));
        m = ((m as f64 * search.growth).ceil() as usize).max(m + 1).min(search.max_m);
    }
    loop {
        let (lo_m, base) = match &lo {
            Some((lm, snap)) => (Some(*lm), snap.clone()),
            None => (None, SampledGram::empty(g.dim())),
        };
        let mid = match lo_m {
            Some(l) if hi - l <= 1 => break,
            Some(l) => l + (hi - l) / 2,
            None if hi == 0 => break,
            None => hi / 2,
        };
        let mut probe = base;
        probe.grow_to(&ev, mid);
        let c = eval(&probe, mid, &mut trace)?;
        if c > threshold {
            hi = mid;
            c_hi = c;
            if lo.is_none() && mid == 0 {
                break;
            }
        } else {
            lo = Some((mid, probe));
        }
    }
    Ok(SsrResult {
        m: hi,
        c: c_hi,
        theta,
        n: g.dim(),
        trace,
        wall_time_ms: t0.elapsed().as_secs_f64() * 1e3,
    })
}

/// Result of the consistent reconstruction.
#[derive(Debug, Clone, Serialize)]
pub struct GsSolution {
    pub coefficients: Vec<Complex64>,
    pub residual: f64,
    /// Condition number of `U` restricted to the range of `G`, squared.
    pub condition: f64,
    pub ill_conditioned: bool,
}

/// Solves `min ‖U x - m‖` over the range of `G` with minimum-norm
/// coefficients, given `H = U*U`, `U* m` and `‖m‖²`.
pub fn gs_solve_normal(h: MatRef<f64>, ustar_m: &[Complex64], meas_norm_sq: f64, g: &Gramian) -> Result<GsSolution> {
    if h.nrows() != g.dim() || ustar_m.len() != g.dim() {
        return Err(Error::DimensionMismatch { expected: g.dim(), got: ustar_m.len() });
    }
    let w = g.whitening();
    let k = w.transpose() * h * &w;
    let k = Mat::from_fn(k.nrows(), k.ncols(), |i, j| 0.5 * (k[(i, j)] + k[(j, i)]));
    let (vals, vecs) = sym_eigen(k.as_ref());
    let top = vals[0];
    let r = w.ncols();
    // rhs in whitened coordinates
    let rhs: Vec<Complex64> = (0..r).map(|c| (0..w.nrows()).map(|i| ustar_m[i] * w[(i, c)]).sum()).collect();
    let mut y = vec![Complex64::new(0.0, 0.0); r];
    let mut smallest = f64::INFINITY;
    for (q, &lam) in vals.iter().enumerate() {
        if !(lam > 1e-14 * top) {
            continue;
        }
        smallest = smallest.min(lam);
        let proj: Complex64 = (0..r).map(|i| vecs[(i, q)] * rhs[i]).sum::<Complex64>() / lam;
        for i in 0..r {
            y[i] += proj * vecs[(i, q)];
        }
    }
    let x: Vec<Complex64> = (0..w.nrows()).map(|i| (0..r).map(|c| y[c] * w[(i, c)]).sum()).collect();
    // ‖Ux - m‖² = x*Hx - 2 Re x*U*m + ‖m‖²
    let mut xhx = 0.0;
    for i in 0..x.len() {
        let mut s = Complex64::new(0.0, 0.0);
        for j in 0..x.len() {
            s += h[(i, j)] * x[j];
        }
        xhx += (x[i].conj() * s).re;
    }
    let cross: f64 = x.iter().zip(ustar_m).map(|(a, b)| (a.conj() * b).re).sum();
    let residual = (xhx - 2.0 * cross + meas_norm_sq).max(0.0).sqrt();
    let condition = top / smallest;
    let ill_conditioned = !(condition <= ILL_CONDITIONED);
    if ill_conditioned {
        log::warn!("generalized sampling system is ill-conditioned (condition {condition:.3e})");
    }
    Ok(GsSolution { coefficients: x, residual, condition, ill_conditioned })
}

/// Consistent reconstruction from a dense cross-Gramian.
pub fn gs_solve(u: MatRef<Complex64>, g: &Gramian, meas: &[Complex64]) -> Result<GsSolution> {
    if u.nrows() != meas.len() {
        return Err(Error::DimensionMismatch { expected: u.nrows(), got: meas.len() });
    }
    if u.ncols() != g.dim() {
        return Err(Error::DimensionMismatch { expected: g.dim(), got: u.ncols() });
    }
    let hc = u.adjoint() * u;
    let h = Mat::from_fn(hc.nrows(), hc.ncols(), |i, j| hc[(i, j)].re);
    let ustar_m: Vec<Complex64> =
        (0..u.ncols()).map(|c| (0..u.nrows()).map(|r| u[(r, c)].conj() * meas[r]).sum()).collect();
    let mnorm: f64 = meas.iter().map(|z| z.norm_sqr()).sum();
    let mut sol = gs_solve_normal(h.as_ref(), &ustar_m, mnorm, g)?;
    // exact residual from U
    let resid: f64 = (0..u.nrows())
        .map(|r| {
            let v: Complex64 = (0..u.ncols()).map(|c| u[(r, c)] * sol.coefficients[c]).sum();
            (v - meas[r]).norm_sqr()
        })
        .sum();
    sol.residual = resid.sqrt();
    Ok(sol)
}

/// Coefficients of `P_{R_N} f` from the inner products `b_λ = ⟨f, r_λ⟩`,
/// minimum-norm on the range of `G`.
pub fn project_onto_rn(b: &[Complex64], g: &Gramian) -> Result<Vec<Complex64>> {
    if b.len() != g.dim() {
        return Err(Error::DimensionMismatch { expected: g.dim(), got: b.len() });
    }
    let n = g.dim();
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for q in 0..g.rank() {
        let v = g.eigenvectors.col(q);
        let proj: Complex64 = (0..n).map(|i| v[i] * b[i]).sum::<Complex64>() / g.eigenvalues[q];
        for i in 0..n {
            x[i] += proj * v[i];
        }
    }
    Ok(x)
}

/// `‖f - Σ x_λ r_λ‖` from `‖f‖²`, `b = ⟨f, r_λ⟩` and `G`.
pub fn distance(f_norm_sq: f64, b: &[Complex64], x: &[Complex64], g: &Gramian) -> f64 {
    let cross: f64 = x.iter().zip(b).map(|(xi, bi)| (xi.conj() * bi).re).sum();
    (f_norm_sq - 2.0 * cross + g.energy(x)).max(0.0).sqrt()
}
