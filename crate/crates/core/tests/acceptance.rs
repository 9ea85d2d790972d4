//! Acceptance runner. Prints one PASS/FAIL line per criterion.
//!
//! Pass criterion numbers as arguments to run a subset. The process exits
//! non-zero when a criterion fails that is not listed in `KNOWN_FAILURES`.

use std::f64::consts::PI;
use std::time::Instant;

use astro_float::{BigFloat, Consts, RoundingMode};
use faer::Mat;
use num_complex::Complex64;
use proptest::prelude::*;
use proptest::test_runner::{Config as PropConfig, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use shearlet_gs::analysis::{asymptotics_table, frame_bound_sweep, sigma, tail_sweep};
use shearlet_gs::generators::GeneratorSpec;
use shearlet_gs::gramian::{cross_inner, gramian_of, spatial_gramian};
use shearlet_gs::gs::{
    cosine_angle_from_gram, distance, gs_solve_normal, project_onto_rn, stable_sampling_rate, Gramian, SsrSearch,
};
use shearlet_gs::recon::dwt::{Dwt2, WaveletFilter};
use shearlet_gs::recon::digital_shearlet::DigitalShearlet;
use shearlet_gs::recon::experiment::{run_experiment, ExperimentConfig};
use shearlet_gs::recon::mask::MaskKind;
use shearlet_gs::sampling::{
    adjoint_apply, measure_atom, measure_function, measure_transform, RowEvaluator, SampledGram, SamplingGrid,
};
use shearlet_gs::system::{mat_det, mat_vec, Atom, SystemLayout};

/// Criteria that fail for reasons analysed in the project's decision log.
const KNOWN_FAILURES: &[u32] = &[4, 6];

const EPS: f64 = 0.125;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let v: f64 = rng.gen();
    (-2.0 * u.ln()).sqrt() * (2.0 * PI * v).cos()
}

fn layout(j: u32) -> SystemLayout {
    SystemLayout::build(j, GeneratorSpec::default()).expect("layout")
}

fn sampled_h(layout: &SystemLayout, grid: &SamplingGrid, n: usize, m: usize) -> Mat<f64> {
    let ev = RowEvaluator::new(layout, &grid.with_m([m, m]), n).expect("row evaluator");
    SampledGram::for_grid(&ev, [m, m]).into_h()
}

fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

fn quad_form(a: &Mat<f64>, x: &[Complex64]) -> Complex64 {
    let n = x.len();
    let mut s = c64(0.0, 0.0);
    for i in 0..n {
        let mut row = c64(0.0, 0.0);
        for j in 0..n {
            row += a[(i, j)] * x[j];
        }
        s += x[i].conj() * row;
    }
    s
}

fn sandwich() -> Outcome {
    let l2 = layout(2);
    let l3 = layout(3);
    let spec = l2.spec().clone();
    let n = l2.len();
    let g = Gramian::build(&l2, n).expect("gramian");
    let outside: Vec<Atom> = l3.atoms().iter().filter(|a| a.index.scale() == Some(2)).cloned().collect();
    let base = SamplingGrid::for_epsilon(&l3, EPS, [1, 1]).expect("grid");
    let mut m = 72;
    let (h, c) = loop {
        let h = sampled_h(&l2, &base, n, m);
        let c = cosine_angle_from_gram(h.as_ref(), &g, [m, m]).expect("angle").c;
        if c >= 0.5 {
            break (h, c);
        }
        m += 8;
    };
    let grid = base.with_m([m, m]);
    let mut worst_lower = f64::NEG_INFINITY;
    let mut worst_upper = f64::NEG_INFINITY;
    for trial in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + trial);
        let density: f64 = rng.gen_range(0.0..0.6);
        let x: Vec<Complex64> = (0..n)
            .map(|_| if rng.gen_bool(density) { c64(gaussian(&mut rng), gaussian(&mut rng)) } else { c64(0.0, 0.0) })
            .collect();
        let k = rng.gen_range(if trial % 5 == 0 { 0..1 } else { 1..7 });
        let q: Vec<Atom> = (0..k).map(|_| outside[rng.gen_range(0..outside.len())].clone()).collect();
        let y: Vec<Complex64> = (0..k).map(|_| c64(gaussian(&mut rng), gaussian(&mut rng))).collect();

        let cq = cross_inner(&spec, &q, l2.atoms());
        let gq = gramian_of(&spec, &q);
        let gx: Vec<Complex64> = (0..n).map(|i| (0..n).map(|j| g.matrix()[(i, j)] * x[j]).sum()).collect();
        let b: Vec<Complex64> =
            (0..n).map(|l| gx[l] + (0..k).map(|a| y[a] * cq[(a, l)]).sum::<Complex64>()).collect();
        let mut f_norm_sq = quad_form(g.matrix(), &x).re + quad_form(&gq, &y).re;
        for l in 0..n {
            for a in 0..k {
                f_norm_sq += 2.0 * (x[l].conj() * y[a] * cq[(a, l)]).re;
            }
        }

        // unit-norm test function
        let scale = f_norm_sq.sqrt();
        let x: Vec<Complex64> = x.iter().map(|v| v / scale).collect();
        let y: Vec<Complex64> = y.iter().map(|v| v / scale).collect();
        let b: Vec<Complex64> = b.iter().map(|v| v / scale).collect();
        let f_norm_sq = 1.0;

        let mut meas = measure_function(&l2, &grid, &x).expect("measurements");
        let extra = measure_transform(&grid, |xi| (0..k).map(|a| y[a] * q[a].ft(&spec, xi)).sum());
        for (mv, e) in meas.iter_mut().zip(extra) {
            *mv += e;
        }
        let ustar = adjoint_apply(&l2, &grid, n, &meas).expect("adjoint");
        let mnorm: f64 = meas.iter().map(|z| z.norm_sqr()).sum();
        let sol = gs_solve_normal(h.as_ref(), &ustar, mnorm, &g).expect("solve");
        let p = project_onto_rn(&b, &g).expect("projection");
        let d_p = distance(f_norm_sq, &b, &p, &g);
        let d_gs = distance(f_norm_sq, &b, &sol.coefficients, &g);
        worst_lower = worst_lower.max(d_p - d_gs);
        worst_upper = worst_upper.max(d_gs - d_p / c);
    }
    outcome(
        worst_lower <= 1e-6 && worst_upper <= 1e-6,
        format!("J=2 N={n} M={m} c={c:.4}; max(lower violation)={worst_lower:.2e}, max(upper violation)={worst_upper:.2e}"),
    )
}

fn in_space_recovery() -> Outcome {
    let mut parts = Vec::new();
    let mut worst: f64 = 0.0;
    for j in 1..=3 {
        let l = layout(j);
        let n = l.len();
        let g = Gramian::build(&l, n).expect("gramian");
        let grid = SamplingGrid::for_epsilon(&l, EPS, [1, 1]).expect("grid");
        let ssr = stable_sampling_rate(&l, &grid, &g, 2.0, SsrSearch::default()).expect("ssr");
        let m = ssr.m;
        let h = sampled_h(&l, &grid, n, m);
        let grid = grid.with_m([m, m]);
        let mut rng = ChaCha8Rng::seed_from_u64(20 + j as u64);
        let x: Vec<Complex64> = (0..n).map(|_| c64(gaussian(&mut rng), gaussian(&mut rng))).collect();
        let meas = measure_function(&l, &grid, &x).expect("measurements");
        let ustar = adjoint_apply(&l, &grid, n, &meas).expect("adjoint");
        let mnorm: f64 = meas.iter().map(|z| z.norm_sqr()).sum();
        let sol = gs_solve_normal(h.as_ref(), &ustar, mnorm, &g).expect("solve");
        let e: Vec<Complex64> = x.iter().zip(&sol.coefficients).map(|(a, b)| a - b).collect();
        let rel = (g.energy(&e) / g.energy(&x)).sqrt();
        worst = worst.max(rel);
        parts.push(format!("J={j} N={n} M={m} rel={rel:.2e}"));
    }
    outcome(worst < 1e-8, parts.join("; "))
}

/// Smallest generalized eigenpair of a 3×3 pencil `(h, g)` with `g` SPD.
fn small_pencil_min(h: [[f64; 3]; 3], g: [[f64; 3]; 3], dim: usize) -> Option<(f64, [f64; 3])> {
    let mut l = [[0.0; 3]; 3];
    for i in 0..dim {
        for j in 0..=i {
            let mut s = g[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            if i == j {
                if !(s > 1e-14 * g[i][i].abs().max(1e-300)) {
                    return None;
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    // K = L⁻¹ H L⁻ᵀ
    let mut linv = [[0.0; 3]; 3];
    for c in 0..dim {
        for i in 0..dim {
            let mut s = if i == c { 1.0 } else { 0.0 };
            for k in 0..i {
                s -= l[i][k] * linv[k][c];
            }
            linv[i][c] = s / l[i][i];
        }
    }
    let mut k = [[0.0; 3]; 3];
    for i in 0..dim {
        for j in 0..dim {
            let mut s = 0.0;
            for a in 0..dim {
                for b in 0..dim {
                    s += linv[i][a] * h[a][b] * linv[j][b];
                }
            }
            k[i][j] = s;
        }
    }
    let mut v = [[0.0; 3]; 3];
    for i in 0..dim {
        v[i][i] = 1.0;
    }
    for _ in 0..60 {
        let mut off = 0.0;
        for p in 0..dim {
            for q in p + 1..dim {
                off += k[p][q] * k[p][q];
            }
        }
        if off < 1e-30 {
            break;
        }
        for p in 0..dim {
            for q in p + 1..dim {
                if k[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (k[q][q] - k[p][p]) / (2.0 * k[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                for r in 0..dim {
                    let (a, b) = (k[r][p], k[r][q]);
                    k[r][p] = cs * a - sn * b;
                    k[r][q] = sn * a + cs * b;
                }
                for r in 0..dim {
                    let (a, b) = (k[p][r], k[q][r]);
                    k[p][r] = cs * a - sn * b;
                    k[q][r] = sn * a + cs * b;
                }
                for r in 0..dim {
                    let (a, b) = (v[r][p], v[r][q]);
                    v[r][p] = cs * a - sn * b;
                    v[r][q] = sn * a + cs * b;
                }
            }
        }
    }
    let best = (0..dim).min_by(|&a, &b| k[a][a].total_cmp(&k[b][b]))?;
    // back to pencil coordinates: z = L⁻ᵀ w
    let mut z = [0.0; 3];
    for i in 0..dim {
        z[i] = (0..dim).map(|a| linv[a][i] * v[a][best]).sum();
    }
    Some((k[best][best], z))
}

fn angle_oracle() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for (j, m) in [(1u32, 27usize), (2, 72)] {
        let l = layout(j);
        let spec = l.spec();
        let n = l.len();
        let g = Gramian::build(&l, n).expect("gramian");
        let grid = SamplingGrid::for_epsilon(&l, EPS, [m, m]).expect("grid");
        let ells = grid.indices();
        let u = Mat::<Complex64>::from_fn(ells.len(), n, |r, c| l.atoms()[c].ft(spec, grid.frequency(ells[r])) * EPS);
        let hc = u.adjoint() * &u;
        let h = Mat::<f64>::from_fn(n, n, |a, b| hc[(a, b)].re);
        let c = cosine_angle_from_gram(h.as_ref(), &g, [m, m]).expect("angle").c;
        let gm = g.matrix();

        let mat_vec_r = |a: &Mat<f64>, x: &[f64]| -> Vec<f64> { (0..n).map(|i| (0..n).map(|k| a[(i, k)] * x[k]).sum()).collect() };
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>();
        let mut rng = ChaCha8Rng::seed_from_u64(300 + j as u64);
        let mut x: Vec<f64> = (0..n).map(|_| gaussian(&mut rng)).collect();
        let mut prev: Vec<f64> = vec![0.0; n];
        let mut lowest = f64::INFINITY;
        let mut running_min = f64::INFINITY;
        for _ in 0..10_000 {
            let d: Vec<f64> = (0..n).map(|_| gaussian(&mut rng)).collect();
            let hd = mat_vec_r(&h, &d);
            let gd = mat_vec_r(gm, &d);
            lowest = lowest.min((dot(&d, &hd) / dot(&d, &gd)).sqrt());
            let basis = [x.clone(), d, prev.clone()];
            let hb: Vec<Vec<f64>> = basis.iter().map(|v| mat_vec_r(&h, v)).collect();
            let gb: Vec<Vec<f64>> = basis.iter().map(|v| mat_vec_r(gm, v)).collect();
            let mut hs = [[0.0; 3]; 3];
            let mut gs = [[0.0; 3]; 3];
            for a in 0..3 {
                for b in 0..3 {
                    hs[a][b] = dot(&basis[a], &hb[b]);
                    gs[a][b] = dot(&basis[a], &gb[b]);
                }
            }
            let (_, z) = match small_pencil_min(hs, gs, 3).or_else(|| small_pencil_min(hs, gs, 2)) {
                Some(v) => v,
                None => continue,
            };
            let new: Vec<f64> = (0..n).map(|i| z[0] * basis[0][i] + z[1] * basis[1][i] + z[2] * basis[2][i]).collect();
            let hx = mat_vec_r(&h, &new);
            let gx = mat_vec_r(gm, &new);
            let val = (dot(&new, &hx) / dot(&new, &gx)).sqrt();
            lowest = lowest.min(val);
            running_min = running_min.min(val);
            let scale = dot(&new, &gx).sqrt();
            let new: Vec<f64> = new.iter().map(|v| v / scale).collect();
            prev = new.iter().zip(&x).map(|(a, b)| a - z[0] * b / scale).collect();
            x = new;
        }
        let ok = lowest >= c - 1e-9 && (running_min - c) / c <= 0.05;
        pass &= ok;
        parts.push(format!("J={j} N={n} M={m} c={c:.6} brute min={running_min:.6} (gap {:.2}%) lowest={lowest:.6}", 100.0 * (running_min - c) / c));
    }
    outcome(pass, parts.join("; "))
}

fn ssr_scaling() -> Outcome {
    let mut ns = Vec::new();
    let mut samples = Vec::new();
    let mut parts = Vec::new();
    for j in 1..=4 {
        let l = layout(j);
        let n = l.len();
        let g = Gramian::build(&l, n).expect("gramian");
        let grid = SamplingGrid::for_epsilon(&l, EPS, [1, 1]).expect("grid");
        let ssr = stable_sampling_rate(&l, &grid, &g, 2.0, SsrSearch::default()).expect("ssr");
        ns.push(n as f64);
        samples.push(ssr.num_samples() as f64);
        parts.push(format!("J={j} N={n} M={} c={:.4}", ssr.m, ssr.c));
    }
    let s = slope(&ns, &samples);
    let delta = 2.0 / (2.0 * 3.5 - 1.0);
    let (lo, hi) = (0.9 * 2.0, (1.0 + delta) * 2.0 + 0.3);
    let in_single = (0.9..=1.0 + delta + 0.3).contains(&s);
    outcome(
        (lo..=hi).contains(&s),
        format!(
            "{}; slope of total samples vs N = {s:.3}, required [{lo:.3}, {hi:.3}] (undoubled window [0.9, {:.3}] {})",
            parts.join(", "),
            1.0 + delta + 0.3,
            if in_single { "met" } else { "not met" }
        ),
    )
}

fn tail_decay() -> Outcome {
    let l = layout(1);
    let r = l.spec().decay_r();
    let delta = 2.0 / (2.0 * r - 1.0);
    let ss = [1.0, 2.0, 4.0, 8.0];
    let rep = tail_sweep(&l, EPS, &ss, delta, 2.0).expect("tail sweep");
    let tails: Vec<f64> = rep.iter().map(|t| t.tail).collect();
    let monotone = tails.windows(2).all(|w| w[1] <= w[0]);
    let exponent = -slope(&ss, &tails);
    let ms: Vec<usize> = rep.iter().map(|t| t.m).collect();
    outcome(
        monotone && exponent >= r,
        format!("M={ms:?} tails={:?} exponent={exponent:.3} (need >= {r}), monotone={monotone}", tails.iter().map(|t| format!("{t:.3e}")).collect::<Vec<_>>()),
    )
}

fn frame_asymptotics() -> Outcome {
    let r = 4.0;
    let deltas = [0.3, 0.4, 0.5];
    let fb = frame_bound_sweep(&GeneratorSpec::default(), 2..=4).expect("frame bounds");
    let rows: Vec<(u32, usize, f64)> = fb.iter().map(|f| (f.0, f.1, f.2)).collect();
    let table = asymptotics_table(&rows, &deltas, r).expect("table");
    // recompute the comparison independently
    let crit = |n: f64, d: f64| n.powf(-(1.0 - d) / 2.0) * n.ln().powf(1.5);
    let mut c: f64 = 0.0;
    for &(j, n, a) in &rows {
        if j == 2 {
            for &d in &deltas {
                c = c.max(crit(n as f64, d) / a.powf(1.0 / (2.0 * r - 1.0)));
            }
        }
    }
    let mut failing = Vec::new();
    for &(j, n, a) in &rows {
        for &d in &deltas {
            let lhs = crit(n as f64, d);
            let rhs = c * a.powf(1.0 / (2.0 * r - 1.0));
            let holds = lhs <= rhs * (1.0 + 1e-12);
            let row = table.rows.iter().find(|x| x.j == j && x.delta == d).expect("row");
            assert_eq!(row.holds, holds, "table disagrees with recomputation at J={j}, delta={d}");
            if !holds {
                failing.push(format!("J={j} delta={d}: {lhs:.4} > {rhs:.4}"));
            }
        }
    }
    let a_list: Vec<String> = rows.iter().map(|(j, n, a)| format!("J={j} N={n} A_N={a:.4}")).collect();
    outcome(
        failing.is_empty(),
        format!("C={c:.4}; {}; failing rows: [{}]", a_list.join(", "), failing.join("; ")),
    )
}

/// `N^{1+δ} A^{-2/(2r-1)}` in 320-bit arithmetic.
fn sigma_oracle(n: u64, a: f64, delta: f64, r: f64, cc: &mut Consts) -> BigFloat {
    let p = 320;
    let rm = RoundingMode::ToEven;
    let nb = BigFloat::from_u64(n, p);
    let one = BigFloat::from_u64(1, p);
    let e1 = one.add(&BigFloat::from_f64(delta, p), p, rm);
    let two = BigFloat::from_u64(2, p);
    let denom = two.mul(&BigFloat::from_f64(r, p), p, rm).sub(&one, p, rm);
    let e2 = BigFloat::from_u64(0, p).sub(&two.div(&denom, p, rm), p, rm);
    nb.pow(&e1, p, rm, cc).mul(&BigFloat::from_f64(a, p).pow(&e2, p, rm, cc), p, rm)
}

fn sigma_arithmetic() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    for n in [1u64, 2, 3, 75, 231, 1175, 65_536, 1 << 40] {
        if sigma(n, 1.0, 0.0, 3.5).expect("sigma") != n {
            pass = false;
            notes.push(format!("sigma({n}, 1, 0) != {n}"));
        }
    }
    let mut runner = TestRunner::new(PropConfig { cases: 512, failure_persistence: None, ..PropConfig::default() });
    let mono = runner.run(
        &(1u64..1_000_000, 0.01f64..100.0, 0.0f64..1.0, 0.6f64..8.0, 0.0f64..1.0),
        |(n, a, d, r, t)| {
            let s = sigma(n, a, d, r).unwrap();
            prop_assert!(sigma(n + 1 + (t * 1000.0) as u64, a, d, r).unwrap() >= s);
            prop_assert!(sigma(n, a * (1.0 + t), d, r).unwrap() <= s);
            prop_assert!(sigma(n, a, d + t, r).unwrap() >= s);
            Ok(())
        },
    );
    if let Err(e) = mono {
        pass = false;
        notes.push(format!("monotonicity: {e}"));
    }
    let mut cc = Consts::new().expect("constants");
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut mismatches = 0;
    for _ in 0..1000 {
        let n = rng.gen_range(1..=2_000_000u64);
        let a = 10f64.powf(rng.gen_range(-2.0..2.0));
        let delta = rng.gen_range(0.0..1.0);
        let r = rng.gen_range(0.75..8.0);
        let k = sigma(n, a, delta, r).expect("sigma");
        let v = sigma_oracle(n, a, delta, r, &mut cc);
        let hi = BigFloat::from_u64(k, 320);
        let lo = BigFloat::from_u64(k - 1, 320);
        if !(v > lo && v <= hi) {
            mismatches += 1;
        }
    }
    if mismatches > 0 {
        pass = false;
    }
    notes.push(format!("1000 randomized cases, {mismatches} ceiling mismatches against 320-bit oracle"));
    outcome(pass, notes.join("; "))
}

fn pipeline_ordering() -> Outcome {
    let config = ExperimentConfig { write_images: false, ..ExperimentConfig::default() };
    let report = run_experiment(&config, None).expect("experiment");
    let mut pass = true;
    let mut parts = Vec::new();
    for row in &report.rows {
        let target = match row.mask {
            MaskKind::SpiralPhyllotaxis => 0.2037,
            MaskKind::Radial => 0.2074,
            MaskKind::Full => 1.0,
        };
        let ok = (row.fraction - target).abs() <= 0.006 && row.shearlet_l1 < row.fourier_inversion;
        pass &= ok;
        parts.push(format!(
            "{} fraction={:.4} (target {target}) shearlet={:.4} wavelet={:.4} inversion={:.4}",
            row.mask.name(),
            row.fraction,
            row.shearlet_l1,
            row.wavelet_l1,
            row.fourier_inversion
        ));
    }
    outcome(pass && report.rows.len() == 2, parts.join("; "))
}

fn transforms() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut dwt_err: f64 = 0.0;
    for size in [64usize, 128] {
        for f in [WaveletFilter::Haar, WaveletFilter::D4] {
            let t = Dwt2::new(size, size, size.trailing_zeros() as usize, f).expect("dwt");
            let x: Vec<f64> = (0..size * size).map(|_| gaussian(&mut rng)).collect();
            let mut y = x.clone();
            t.forward(&mut y);
            t.inverse(&mut y);
            dwt_err = dwt_err.max(x.iter().zip(&y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
        }
    }
    let spec = GeneratorSpec::default();
    let ds = DigitalShearlet::new(128, 128, 4, &spec).expect("shearlet");
    let mut dot_err: f64 = 0.0;
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for trial in 0..20 {
        let u: Vec<Complex64> = (0..ds.image_len()).map(|_| c64(gaussian(&mut rng), gaussian(&mut rng))).collect();
        let cf: Vec<Complex64> = (0..ds.coeff_len()).map(|_| c64(gaussian(&mut rng), gaussian(&mut rng))).collect();
        let mut tu = vec![c64(0.0, 0.0); ds.coeff_len()];
        ds.forward(&u, &mut tu);
        let mut tc = vec![c64(0.0, 0.0); ds.image_len()];
        ds.adjoint(&cf, &mut tc);
        let lhs: Complex64 = tu.iter().zip(&cf).map(|(a, b)| b.conj() * a).sum();
        let rhs: Complex64 = u.iter().zip(&tc).map(|(a, b)| b.conj() * a).sum();
        let nrm = |v: &[Complex64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        dot_err = dot_err.max((lhs - rhs).norm() / (nrm(&tu) * nrm(&cf)));
        // energy ratios on random and structured inputs
        let probe: Vec<Complex64> = match trial {
            0 => (0..ds.image_len()).map(|i| c64(if i == 0 { 1.0 } else { 0.0 }, 0.0)).collect(),
            1 => vec![c64(1.0, 0.0); ds.image_len()],
            _ => u,
        };
        ds.forward(&probe, &mut tu);
        let ratio = nrm(&tu).powi(2) / nrm(&probe).powi(2);
        lo = lo.min(ratio);
        hi = hi.max(ratio);
    }
    let (a_d, b_d) = ds.frame_bounds();
    let ratio = (b_d / a_d).max(hi / lo);
    outcome(
        dwt_err < 1e-10 && dot_err < 1e-8 && ratio <= 1.2,
        format!(
            "wavelet round trip {dwt_err:.2e}; shearlet adjoint mismatch {dot_err:.2e}; window bounds A_d={a_d:.6} B_d={b_d:.6}, energy ratios [{lo:.6}, {hi:.6}]"
        ),
    )
}

fn gauss_legendre(k: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = Vec::with_capacity(k);
    let mut weights = Vec::with_capacity(k);
    for i in 0..k {
        let mut x = (PI * (i as f64 + 0.75) / (k as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for m in 2..=k {
                let p2 = ((2 * m - 1) as f64 * x * p1 - (m - 1) as f64 * p0) / m as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = k as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes.push(x);
        weights.push(2.0 / ((1.0 - x * x) * dp * dp));
    }
    (nodes, weights)
}

fn oracle_agreement() -> Outcome {
    // measurements against tensor quadrature in generator coordinates
    let l = layout(2);
    let spec = l.spec().clone();
    let grid = SamplingGrid::for_epsilon(&l, EPS, [24, 24]).expect("grid");
    let (gx, gw) = gauss_legendre(12);
    let h = spec.knot_spacing();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    let mut smallest: f64 = f64::INFINITY;
    let mut floored = 0;
    for _ in 0..50 {
        let atom = &l.atoms()[rng.gen_range(0..l.len())];
        let ell = [rng.gen_range(-24..=24i64), rng.gen_range(-24..=24i64)];
        let analytic = measure_atom(&l, &atom.index, &grid, ell).expect("measure");
        let xi = grid.frequency(ell);
        let ext = spec.generator_extent(atom.generator());
        let m = atom.index.translation();
        let (cx, cy) = ((ext[0] / h).round() as usize, (ext[1] / h).round() as usize);
        let mut acc = c64(0.0, 0.0);
        for a in 0..cx {
            for b in 0..cy {
                for (&u, &wu) in gx.iter().zip(&gw) {
                    for (&v, &wv) in gx.iter().zip(&gw) {
                        let z = [h * (a as f64 + 0.5 * (u + 1.0)), h * (b as f64 + 0.5 * (v + 1.0))];
                        let gval = spec.generator_space(atom.generator(), z);
                        let x = mat_vec(&atom.b_inv, [z[0] + m[0] as f64, z[1] + m[1] as f64]);
                        let phase = -2.0 * PI * (xi[0] * x[0] + xi[1] * x[1]);
                        acc += Complex64::from_polar(gval * wu * wv * 0.25 * h * h, phase);
                    }
                }
            }
        }
        let jac = atom.amplitude / mat_det(atom.b).abs() * EPS;
        let reference = acc * jac;
        // largest possible |measurement| of this atom: ε ‖r‖₁
        let mut l1_norm = 0.0;
        for a in 0..cx {
            for b in 0..cy {
                for (&u, &wu) in gx.iter().zip(&gw) {
                    for (&v, &wv) in gx.iter().zip(&gw) {
                        let z = [h * (a as f64 + 0.5 * (u + 1.0)), h * (b as f64 + 0.5 * (v + 1.0))];
                        l1_norm += spec.generator_space(atom.generator(), z).abs() * wu * wv * 0.25 * h * h;
                    }
                }
            }
        }
        let floor = 1e-8 * l1_norm * jac;
        if reference.norm() < floor {
            floored += 1;
        }
        smallest = smallest.min(reference.norm());
        let rel = (analytic - reference).norm() / reference.norm().max(floor);
        if std::env::var_os("ACCEPTANCE_VERBOSE").is_some() {
            println!("    {:?} l={ell:?} analytic={analytic:.6e} quadrature={reference:.6e} rel={rel:.2e}", atom.index);
        }
        worst = worst.max(rel);
    }

    // Gramian: exact spatial integrals against the frequency lattice sum
    let l1 = layout(1);
    let n = l1.len();
    let spatial = spatial_gramian(&l1, n);
    let big = 640i64;
    let spec1 = l1.spec().clone();
    let _ = SamplingGrid::for_epsilon(&l1, EPS, [1, 1]).expect("supports fit the lattice box");
    let mut freq = Mat::<f64>::zeros(n, n);
    let ells: Vec<[i64; 2]> =
        (0..=big).flat_map(|a| (-big..=big).map(move |b| [a, b])).filter(|l| l[0] > 0 || l[1] >= 0).collect();
    for chunk in ells.chunks(4096) {
        let u = Mat::<Complex64>::from_fn(chunk.len(), n, |r, c| {
            let l = chunk[r];
            l1.atoms()[c].ft(&spec1, [EPS * l[0] as f64, EPS * l[1] as f64]) * EPS
        });
        let hc = u.adjoint() * &u;
        for a in 0..n {
            for b in 0..n {
                let w = hc[(a, b)].re;
                freq[(a, b)] += 2.0 * w;
            }
        }
    }
    // ℓ = 0 was counted twice
    let zero = Mat::<Complex64>::from_fn(1, n, |_, c| l1.atoms()[c].ft(&spec1, [0.0, 0.0]) * EPS);
    let mut gram_err: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            let f = freq[(a, b)] - (zero[(0, a)].conj() * zero[(0, b)]).re;
            gram_err = gram_err.max((f - spatial[(a, b)]).abs());
        }
    }
    outcome(
        worst < 1e-6 && gram_err < 1e-6,
        format!(
            "measure_atom vs quadrature: max rel err {worst:.2e} over 50 pairs (smallest |value| {smallest:.2e}, {floored} below the 1e-8 eps*|r|_1 floor); J=1 Gramian spatial vs lattice (|l|<= {big}): max entry diff {gram_err:.2e}"
        ),
    )
}

fn main() {
    let selected: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let criteria: [(u32, &str, fn() -> Outcome); 10] = [
        (1, "sandwich inequality", sandwich),
        (2, "in-space recovery", in_space_recovery),
        (3, "angle oracle", angle_oracle),
        (4, "stable sampling rate scaling", ssr_scaling),
        (5, "tail energy decay", tail_decay),
        (6, "frame bound asymptotics", frame_asymptotics),
        (7, "oversampling arithmetic", sigma_arithmetic),
        (8, "reconstruction ordering", pipeline_ordering),
        (9, "transform suites", transforms),
        (10, "oracle agreement", oracle_agreement),
    ];
    let mut unexpected = Vec::new();
    for (id, name, run) in criteria {
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        let t0 = Instant::now();
        let o = run();
        let secs = t0.elapsed().as_secs_f64();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        let note = if !o.pass && KNOWN_FAILURES.contains(&id) { " [known failure]" } else { "" };
        println!("{tag} {id:>2} {name} ({secs:.1} s){note}: {}", o.detail);
        if !o.pass && !KNOWN_FAILURES.contains(&id) {
            unexpected.push(id);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
