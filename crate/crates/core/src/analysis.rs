//! Numerical checks of the asymptotic stability statements: tail energy
//! outside the sampled region, frame bounds, the oversampling function and
//! best N-term approximation rates.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::generators::{dyadic_probe_grid, verify_decay, DecayReport, Generator, GeneratorSpec};
use crate::gs::Gramian;
use crate::system::{mat_inv, mat_transpose, mat_vec, max_shear, scaling_matrix, shear_matrix, Cone, Mat2, SystemLayout};

/// Energy of the layout's atoms at lattice frequencies outside `I_M`.
#[derive(Debug, Clone, Serialize)]
pub struct TailReport {
    #[serde(rename = "J")]
    pub j: u32,
    #[serde(rename = "S")]
    pub s: f64,
    pub delta: f64,
    pub m: usize,
    /// `Σ_{ℓ ∉ I_M, |εℓ|_∞ ≤ R} Σ_λ |⟨r_λ, s_ℓ⟩|²`, summed exactly.
    pub tail: f64,
    /// Upper bound on the same sum over `|εℓ|_∞ > R`.
    pub remainder: f64,
    pub truncation_radius: f64,
}

struct BlockEnvelope {
    b_inv_t: Mat2,
    weight: f64,
    which: Generator,
    sigma_min: f64,
}

fn envelopes(layout: &SystemLayout) -> Vec<BlockEnvelope> {
    layout
        .blocks()
        .iter()
        .map(|b| {
            let a = &layout.atoms()[b.start];
            let count = (b.end - b.start) as f64;
            BlockEnvelope {
                b_inv_t: a.b_inv_t,
                weight: count / (a.amplitude * a.amplitude),
                which: a.generator(),
                sigma_min: 1.0 / sigma_max(&a.b),
            }
        })
        .collect()
}

fn sigma_max(b: &Mat2) -> f64 {
    let (p, q, r, s) = (b[0][0], b[0][1], b[1][0], b[1][1]);
    let f = p * p + q * q + r * r + s * s;
    let det = p * s - q * r;
    (0.5 * (f + (f * f - 4.0 * det * det).max(0.0).sqrt())).sqrt()
}

/// `E[n] = Σ_{|ℓ|_∞ = n} Σ_λ |ε r̂_λ(εℓ)|²` for `n = 0..=radius_index`.
///
/// The magnitude of an atom's transform does not depend on its translation,
/// so each block contributes its count times one envelope value.
pub fn ring_energies(layout: &SystemLayout, epsilon: f64, radius_index: usize) -> Vec<f64> {
    let env = envelopes(layout);
    let spec = layout.spec();
    let eps2 = epsilon * epsilon;
    let point = |l: [i64; 2]| -> f64 {
        let xi = [epsilon * l[0] as f64, epsilon * l[1] as f64];
        env.iter()
            .map(|b| b.weight * spec.generator_ft(b.which, mat_vec(&b.b_inv_t, xi)).norm_sqr())
            .sum::<f64>()
            * eps2
    };
    let mut out = Vec::with_capacity(radius_index + 1);
    out.push(point([0, 0]));
    for n in 1..=radius_index as i64 {
        // every atom is real, so |r̂(-ξ)| = |r̂(ξ)|: sum half the ring twice
        let mut e = 0.0;
        for b in -n..=n {
            e += point([n, b]);
        }
        for a in 1..n {
            e += point([a, n]) + point([a, -n]);
        }
        e += point([0, n]);
        out.push(2.0 * e);
    }
    out
}

/// `∫_L^∞ 8(x+1)(1+a x)^{-2r} dx`, which dominates `Σ_{n>L} 8n(1+a n)^{-2r}`.
fn ring_tail_integral(a: f64, l: f64, r: f64) -> f64 {
    let u0 = 1.0 + a * l;
    let p = 2.0 * r;
    8.0 / (a * a) * (u0.powf(2.0 - p) / (p - 2.0) + (a - 1.0) * u0.powf(1.0 - p) / (p - 1.0))
}

/// Bound on the energy beyond the truncation square from the decay
/// certificates `|ĝ(η)| ≤ C (1+|η₁|)^{-r}(1+|η₂|)^{-r}`.
pub fn remainder_bound(layout: &SystemLayout, epsilon: f64, radius_index: usize, decay: &DecayReport, r: f64) -> f64 {
    env_remainder(&envelopes(layout), epsilon, radius_index, decay, r)
}

fn env_remainder(env: &[BlockEnvelope], epsilon: f64, radius_index: usize, decay: &DecayReport, r: f64) -> f64 {
    env.iter()
        .map(|b| {
            let c = match b.which {
                Generator::Scaling => decay.max_ratio_phi,
                _ => decay.max_ratio_psi,
            };
            // |η|_∞ ≥ σ_min |ξ|_∞ / √2
            let a = b.sigma_min / std::f64::consts::SQRT_2 * epsilon;
            b.weight * c * c * epsilon * epsilon * ring_tail_integral(a, radius_index as f64, r)
        })
        .sum()
}

/// Tail energy for one grid extent `M` (square grids).
pub fn tail_energy(
    layout: &SystemLayout,
    epsilon: f64,
    m: usize,
    truncation_radius: f64,
    decay: &DecayReport,
) -> Result<TailReport> {
    let inner = epsilon * m as f64;
    if !(truncation_radius > inner) {
        return Err(Error::RadiusTooSmall { radius: truncation_radius, inner });
    }
    let l = (truncation_radius / epsilon + 1e-9).floor() as usize;
    let rings = ring_energies(layout, epsilon, l);
    let tail = rings[m + 1..].iter().sum();
    Ok(TailReport {
        j: layout.j_max(),
        s: f64::NAN,
        delta: f64::NAN,
        m,
        tail,
        remainder: remainder_bound(layout, epsilon, l, decay, layout.spec().decay_r()),
        truncation_radius,
    })
}

/// `M_S = ⌈S 2^{J(1+δ)} / ε⌉`.
pub fn grid_for_multiplier(j: u32, s: f64, delta: f64, epsilon: f64) -> usize {
    (s * 2f64.powf(j as f64 * (1.0 + delta)) / epsilon - 1e-9).ceil() as usize
}

/// Tail energies for several multipliers `S`, sharing one truncation square
/// of `radius_factor` times the largest `M_S`, so the summation regions are
/// nested and the tails are exactly monotone.
pub fn tail_sweep(
    layout: &SystemLayout,
    epsilon: f64,
    multipliers: &[f64],
    delta: f64,
    radius_factor: f64,
) -> Result<Vec<TailReport>> {
    let spec = layout.spec();
    let r = spec.decay_r();
    let decay = verify_decay(spec, r, spec.alpha() as f64, &dyadic_probe_grid(-8, 12))?;
    let ms: Vec<usize> = multipliers.iter().map(|&s| grid_for_multiplier(layout.j_max(), s, delta, epsilon)).collect();
    let m_max = *ms.iter().max().ok_or(Error::EmptyGrid)?;
    let l = ((m_max as f64) * radius_factor).ceil() as usize;
    if l <= m_max {
        return Err(Error::RadiusTooSmall { radius: epsilon * l as f64, inner: epsilon * m_max as f64 });
    }
    let rings = ring_energies(layout, epsilon, l);
    // suffix sums: tail(M) = Σ_{n > M} E[n]
    let mut suffix = vec![0.0; l + 2];
    for n in (0..=l).rev() {
        suffix[n] = suffix[n + 1] + rings[n];
    }
    let remainder = remainder_bound(layout, epsilon, l, &decay, r);
    Ok(multipliers
        .iter()
        .zip(&ms)
        .map(|(&s, &m)| TailReport {
            j: layout.j_max(),
            s,
            delta,
            m,
            tail: suffix[m + 1],
            remainder,
            truncation_radius: epsilon * l as f64,
        })
        .collect())
}

/// Least-squares slope of `log y` against `log x`, ignoring non-positive `y`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> =
        x.iter().zip(y).filter(|(a, b)| **a > 0.0 && **b > 0.0).map(|(a, b)| (a.ln(), b.ln())).collect();
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return f64::NAN;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct FrameBounds {
    pub a_n: f64,
    pub b_n: f64,
}

pub fn frame_bounds_finite(g: &Gramian) -> FrameBounds {
    FrameBounds { a_n: g.a_n(), b_n: g.b_n() }
}

/// Value of `|φ̂(ξ)|² + Σ_j Σ_k |ψ̂(S_kᵀ A_j^{-1} ξ)|² + (vertical)` at `ξ`.
pub fn frame_function(spec: &GeneratorSpec, j_max: u32, xi: [f64; 2]) -> f64 {
    let mut total = spec.generator_ft(Generator::Scaling, xi).norm_sqr();
    for j in 0..j_max {
        let kmax = max_shear(j);
        for k in -kmax..=kmax {
            for (cone, which) in [(Cone::Horizontal, Generator::Cone1), (Cone::Vertical, Generator::Cone2)] {
                let b = crate::system::mat_mul(shear_matrix(k, cone), scaling_matrix(j, cone));
                let eta = mat_vec(&mat_transpose(mat_inv(b)), xi);
                total += spec.generator_ft(which, eta).norm_sqr();
            }
        }
    }
    total
}

#[derive(Debug, Clone, Serialize)]
pub struct FrameLowerCheck {
    pub estimate: f64,
    pub argmin: [f64; 2],
    pub values: Vec<f64>,
}

/// Minimum of the frame function over the probes: an estimate of the lower
/// frame constant of the full system restricted to `|ξ| ≲ 2^{J_max}`.
pub fn full_frame_lower_check(spec: &GeneratorSpec, j_max: u32, probes: &[[f64; 2]]) -> Result<FrameLowerCheck> {
    if probes.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let values: Vec<f64> = probes.iter().map(|&xi| frame_function(spec, j_max, xi)).collect();
    let (i, &estimate) = values.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).unwrap();
    Ok(FrameLowerCheck { estimate, argmin: probes[i], values })
}

/// Square-grid probes of `|ξ|_∞ ≤ radius` with `per_axis` points per side.
pub fn square_probes(radius: f64, per_axis: usize) -> Vec<[f64; 2]> {
    let mut out = Vec::with_capacity(per_axis * per_axis);
    for a in 0..per_axis {
        for b in 0..per_axis {
            let t = |i: usize| -radius + 2.0 * radius * (i as f64 + 0.5) / per_axis as f64;
            out.push([t(a), t(b)]);
        }
    }
    out
}

/// Oversampling function `⌈N^{1+δ} A_N^{-2/(2r-1)}⌉`.
pub fn sigma(n: u64, a_n: f64, delta: f64, r: f64) -> Result<u64> {
    if !(a_n > 0.0) || !a_n.is_finite() {
        return Err(Error::NonPositiveFrameBound(a_n));
    }
    if !(delta >= 0.0) || !(r > 0.5) {
        return Err(Error::InvalidParameter(format!("need delta >= 0 and r > 1/2, got delta = {delta}, r = {r}")));
    }
    let v = (n as f64).powf(1.0 + delta) * a_n.powf(-2.0 / (2.0 * r - 1.0));
    Ok(v.ceil() as u64)
}

#[derive(Debug, Clone, Serialize)]
pub struct AsymptoticsRow {
    #[serde(rename = "J")]
    pub j: u32,
    /// Nominal `2^{2J}`.
    pub n_nominal: u64,
    /// Exact prefix cardinality used in the critical function.
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "A_N")]
    pub a_n: f64,
    pub delta: f64,
    pub critical: f64,
    pub bound: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct AsymptoticsTable {
    pub r: f64,
    /// Constant fitted on the smallest scale of the table.
    pub c: f64,
    pub rows: Vec<AsymptoticsRow>,
}

/// `N^{-(1-δ)/2} (log N)^{3/2}`.
pub fn critical_function(n: f64, delta: f64) -> f64 {
    n.powf(-(1.0 - delta) / 2.0) * n.ln().powf(1.5)
}

/// Compares the critical function with `A_N^{1/(2r-1)}` for each `(J, δ)`.
///
/// `frame_bounds` lists `(J, N_J, A_N)`. The single constant `C` is the
/// largest ratio `critical / bound` at the smallest `J`; a row holds when
/// `critical ≤ C · bound`, so the table tests whether the ratio stays below
/// its initial level as `J` grows.
pub fn asymptotics_table(frame_bounds: &[(u32, usize, f64)], deltas: &[f64], r: f64) -> Result<AsymptoticsTable> {
    let j0 = frame_bounds.iter().map(|f| f.0).min().ok_or(Error::EmptyGrid)?;
    let mut rows = Vec::new();
    for &(j, n, a_n) in frame_bounds {
        if !(a_n > 0.0) {
            return Err(Error::NonPositiveFrameBound(a_n));
        }
        for &delta in deltas {
            rows.push(AsymptoticsRow {
                j,
                n_nominal: 1u64 << (2 * j),
                n,
                a_n,
                delta,
                critical: critical_function(n as f64, delta),
                bound: a_n.powf(1.0 / (2.0 * r - 1.0)),
                holds: false,
            });
        }
    }
    let c = rows.iter().filter(|row| row.j == j0).map(|row| row.critical / row.bound).fold(0.0, f64::max);
    for row in &mut rows {
        row.holds = row.critical <= c * row.bound * (1.0 + 1e-12);
    }
    Ok(AsymptoticsTable { r, c, rows })
}

/// Frame bounds `(J, N_J, A_N)` for `J` in the range, from exact Gramians.
pub fn frame_bound_sweep(spec: &GeneratorSpec, js: impl IntoIterator<Item = u32>) -> Result<Vec<(u32, usize, f64, f64)>> {
    js.into_iter()
        .map(|j| {
            let layout = SystemLayout::build(j, spec.clone())?;
            let g = Gramian::build(&layout, layout.len())?;
            Ok((j, layout.len(), g.a_n(), g.b_n()))
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayCurve {
    pub n: Vec<usize>,
    pub error: Vec<f64>,
    pub slope: f64,
}

/// Best N-term approximation of `f = Σ x_λ r_λ` from the layout.
///
/// Atoms are ranked by the magnitude of the minimum-norm coefficients of `f`
/// weighted by the atom norms, and `f` is projected onto the span of each
/// leading subset. The subsets are nested and each error is an orthogonal
/// projection error, so the curve is non-increasing.
pub fn best_nterm_decay_layout(g: &Gramian, coeffs: &[f64], n_list: &[usize]) -> Result<DecayCurve> {
    let n = g.dim();
    if coeffs.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: coeffs.len() });
    }
    let gm = g.matrix();
    let b: Vec<f64> = (0..n).map(|i| (0..n).map(|j| gm[(i, j)] * coeffs[j]).sum()).collect();
    let f_norm_sq: f64 = coeffs.iter().zip(&b).map(|(x, y)| x * y).sum();
    let bc: Vec<num_complex::Complex64> = b.iter().map(|&v| num_complex::Complex64::new(v, 0.0)).collect();
    let canon = crate::gs::project_onto_rn(&bc, g)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        let wi = canon[i].norm() * gm[(i, i)].sqrt();
        let wj = canon[j].norm() * gm[(j, j)].sqrt();
        wj.total_cmp(&wi).then(i.cmp(&j))
    });
    let mut errs = Vec::with_capacity(n_list.len());
    for &k in n_list {
        let k = k.min(n);
        if k == 0 {
            errs.push(f_norm_sq.max(0.0).sqrt());
            continue;
        }
        let sel = &order[..k];
        let sub = faer::Mat::from_fn(k, k, |i, j| gm[(sel[i], sel[j])]);
        let (vals, vecs) = crate::gs::sym_eigen(sub.as_ref());
        let top = vals[0];
        // b* G_S^+ b restricted to the selected atoms
        let mut captured = 0.0;
        for (q, &lam) in vals.iter().enumerate() {
            if lam > 1e-12 * top {
                let p: f64 = (0..k).map(|i| vecs[(i, q)] * b[sel[i]]).sum();
                captured += p * p / lam;
            }
        }
        errs.push((f_norm_sq - captured).max(0.0).sqrt());
    }
    let xs: Vec<f64> = n_list.iter().map(|&k| k as f64).collect();
    Ok(DecayCurve { n: n_list.to_vec(), slope: loglog_slope(&xs, &errs), error: errs })
}

/// Best N-term approximation with a Parseval or orthonormal transform given
/// as analysis and synthesis closures on flattened images.
pub fn best_nterm_decay_transform(
    image: &[f64],
    analysis: impl Fn(&[f64]) -> Vec<num_complex::Complex64>,
    synthesis: impl Fn(&[num_complex::Complex64]) -> Vec<f64>,
    n_list: &[usize],
) -> DecayCurve {
    let coeffs = analysis(image);
    let mut order: Vec<usize> = (0..coeffs.len()).collect();
    order.sort_by(|&i, &j| coeffs[j].norm().total_cmp(&coeffs[i].norm()).then(i.cmp(&j)));
    let errs: Vec<f64> = n_list
        .iter()
        .map(|&k| {
            let mut kept = vec![num_complex::Complex64::new(0.0, 0.0); coeffs.len()];
            for &i in order.iter().take(k) {
                kept[i] = coeffs[i];
            }
            let rec = synthesis(&kept);
            rec.iter().zip(image).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()
        })
        .collect();
    let xs: Vec<f64> = n_list.iter().map(|&k| k as f64).collect();
    DecayCurve { n: n_list.to_vec(), slope: loglog_slope(&xs, &errs), error: errs }
}
