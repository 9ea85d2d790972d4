//! Command-line surface. Settings come from an optional JSON config whose
//! keys are the long flag names; flags given on the command line win.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::analysis::{asymptotics_table, best_nterm_decay_transform, frame_bound_sweep, tail_sweep};
use crate::error::{Error, Result};
use crate::generators::GeneratorSpec;
use crate::gs::{angle_for_grid, distance, gs_solve_normal, stable_sampling_rate, Gramian, SsrSearch};
use crate::recon::digital_shearlet::DigitalShearlet;
use crate::recon::dwt::{Dwt2, WaveletFilter};
use crate::recon::experiment::{run_experiment, ExperimentConfig, L1Options, MaskSpec};
use crate::recon::io::{fmt_f64, write_csv, write_json, write_kspace, write_pgm, write_raw_f64};
use crate::recon::mask::{make_mask, MaskKind};
use crate::recon::phantom::{phantom, PhantomKind};
use crate::recon::Image;
use crate::sampling::{adjoint_apply, measure_function, RowEvaluator, SampledGram, SamplingGrid};
use crate::system::SystemLayout;

#[derive(Debug, Parser)]
#[command(name = "shearlet-gs", version, about = "Generalized sampling with compactly supported shearlets")]
pub struct Cli {
    #[command(flatten)]
    pub flags: Flags,
    #[command(subcommand)]
    pub command: Command,
}

/// Global settings. Every field may also come from the JSON config.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case", deny_unknown_fields)]
pub struct Flags {
    /// JSON file mapping flag names to values
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Finest scale J of the reconstruction space
    #[arg(long, global = true)]
    pub scale: Option<u32>,
    /// Sampling density
    #[arg(long, global = true)]
    pub epsilon: Option<f64>,
    /// Stability threshold of the stable sampling rate
    #[arg(long, global = true)]
    pub theta: Option<f64>,
    /// Oversampling exponent; repeat for several values
    #[arg(long, global = true, num_args = 1)]
    pub delta: Vec<f64>,
    /// Decay exponent of the generators
    #[arg(long, global = true)]
    pub r: Option<f64>,
    /// Sampling grid extent, `M1xM2`
    #[arg(long, global = true)]
    pub grid: Option<String>,
    /// Relative l1 weight
    #[arg(long, global = true)]
    pub lambda: Option<f64>,
    #[arg(long, global = true)]
    pub iters: Option<usize>,
    /// radial, spiral or full
    #[arg(long = "mask-kind", global = true)]
    pub mask_kind: Option<String>,
    #[arg(long, global = true)]
    pub fraction: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Multi-channel phantom, its coil images and k-space
    Phantom(Out),
    /// Undersampling mask
    Mask(Out),
    /// Shearlet/wavelet l1 and Fourier-inversion reconstructions with the error table
    Recon(Out),
    /// Stable sampling rate for J = 1..=scale
    Ssr(Out),
    /// Cosine of the subspace angle for one grid
    Angle(Out),
    /// Generalized sampling reconstruction of a random element of R_N
    Gs(Out),
    /// Tail energy outside the sampled square
    Tail(Out),
    /// Finite frame bounds for J = 1..=scale
    Framebounds(Out),
    /// Lower-frame-bound asymptotics table
    Asymptotics(Out),
    /// Best N-term approximation curves
    Decay(Out),
}

#[derive(Debug, Args)]
pub struct Out {
    /// Output directory
    #[arg(long)]
    pub out: PathBuf,
    /// Image side for image-domain commands
    #[arg(long, default_value_t = 128)]
    pub size: usize,
    /// Coil channels for the phantom
    #[arg(long, default_value_t = 4)]
    pub channels: usize,
    /// cartoon or shepp_like
    #[arg(long, default_value = "cartoon")]
    pub phantom: String,
}

impl Flags {
    /// Values from `self` override those of `base`.
    pub fn merged_over(self, base: Flags) -> Flags {
        Flags {
            config: self.config,
            seed: self.seed.or(base.seed),
            scale: self.scale.or(base.scale),
            epsilon: self.epsilon.or(base.epsilon),
            theta: self.theta.or(base.theta),
            delta: if self.delta.is_empty() { base.delta } else { self.delta },
            r: self.r.or(base.r),
            grid: self.grid.or(base.grid),
            lambda: self.lambda.or(base.lambda),
            iters: self.iters.or(base.iters),
            mask_kind: self.mask_kind.or(base.mask_kind),
            fraction: self.fraction.or(base.fraction),
        }
    }

    pub fn resolve(self) -> Result<Flags> {
        match &self.config {
            Some(path) => {
                let base: Flags = serde_json::from_str(&std::fs::read_to_string(path)?)?;
                Ok(self.merged_over(base))
            }
            None => Ok(self),
        }
    }

    fn seed(&self) -> u64 {
        self.seed.unwrap_or(7)
    }
    fn scale(&self) -> u32 {
        self.scale.unwrap_or(2)
    }
    fn epsilon(&self) -> f64 {
        self.epsilon.unwrap_or(0.125)
    }
    fn theta(&self) -> f64 {
        self.theta.unwrap_or(2.0)
    }
    fn r(&self) -> f64 {
        self.r.unwrap_or(GeneratorSpec::default().decay_r())
    }
    fn deltas(&self, default: &[f64]) -> Vec<f64> {
        if self.delta.is_empty() {
            default.to_vec()
        } else {
            self.delta.clone()
        }
    }
    fn grid(&self) -> Result<[usize; 2]> {
        parse_grid(self.grid.as_deref().unwrap_or("32x32"))
    }
}

/// Parses `M1xM2` (or a single `M` for a square grid).
pub fn parse_grid(s: &str) -> Result<[usize; 2]> {
    let bad = || Error::InvalidParameter(format!("grid {s:?} is not of the form M1xM2"));
    let parts: Vec<&str> = s.split(['x', 'X']).collect();
    let nums: Vec<usize> = parts.iter().map(|p| p.trim().parse().map_err(|_| bad())).collect::<Result<_>>()?;
    match nums.as_slice() {
        [m] => Ok([*m, *m]),
        [a, b] => Ok([*a, *b]),
        _ => Err(bad()),
    }
}

pub fn run(cli: Cli) -> Result<()> {
    let flags = cli.flags.resolve()?;
    match cli.command {
        Command::Phantom(o) => cmd_phantom(&flags, &o),
        Command::Mask(o) => cmd_mask(&flags, &o),
        Command::Recon(o) => cmd_recon(&flags, &o),
        Command::Ssr(o) => cmd_ssr(&flags, &o.out),
        Command::Angle(o) => cmd_angle(&flags, &o.out),
        Command::Gs(o) => cmd_gs(&flags, &o.out),
        Command::Tail(o) => cmd_tail(&flags, &o.out),
        Command::Framebounds(o) => cmd_framebounds(&flags, &o.out),
        Command::Asymptotics(o) => cmd_asymptotics(&flags, &o.out),
        Command::Decay(o) => cmd_decay(&flags, &o),
    }
}

fn spec(flags: &Flags) -> Result<GeneratorSpec> {
    let d = GeneratorSpec::default();
    match flags.r {
        Some(r) => GeneratorSpec::new(d.spline_order(), d.moment_filter().to_vec(), d.alpha(), r, d.dilation()),
        None => Ok(d),
    }
}

fn layout(flags: &Flags, j: u32) -> Result<SystemLayout> {
    SystemLayout::build(j, spec(flags)?)
}

fn mask_kind(flags: &Flags) -> Result<Option<MaskKind>> {
    flags.mask_kind.as_deref().map(str::parse).transpose()
}

fn default_fraction(kind: MaskKind) -> f64 {
    match kind {
        MaskKind::Radial => 0.2074,
        MaskKind::SpiralPhyllotaxis => 0.2037,
        MaskKind::Full => 1.0,
    }
}

fn cmd_phantom(flags: &Flags, o: &Out) -> Result<()> {
    let kind: PhantomKind = o.phantom.parse()?;
    let ph = phantom(kind, o.size, o.size, o.channels, flags.seed())?;
    write_pgm(&o.out.join("reference.pgm"), &ph.reference)?;
    write_raw_f64(&o.out.join("reference.f64"), &ph.reference)?;
    for (k, img) in ph.channel_images.iter().enumerate() {
        write_pgm(&o.out.join(format!("channel_{k}.pgm")), img)?;
    }
    let header = write_kspace(&o.out, "kspace", &ph.kspace)?;
    println!("wrote {} channels of {}x{} k-space to {}", o.channels, o.size, o.size, header.display());
    Ok(())
}

fn cmd_mask(flags: &Flags, o: &Out) -> Result<()> {
    let kind = mask_kind(flags)?.unwrap_or(MaskKind::Radial);
    let target = flags.fraction.unwrap_or_else(|| default_fraction(kind));
    let mask = make_mask(kind, o.size, o.size, target)?;
    let img = Image { nx: o.size, ny: o.size, pixels: mask.centered().iter().map(|&b| f64::from(u8::from(b))).collect() };
    write_pgm(&o.out.join(format!("mask_{}.pgm", kind.name())), &img)?;
    write_json(
        &o.out.join(format!("mask_{}.json", kind.name())),
        &json!({ "kind": kind.name(), "nx": o.size, "ny": o.size, "target": target,
                 "fraction": mask.fraction(), "count": mask.count(), "parameter": mask.parameter }),
    )?;
    println!("{} mask: fraction {:.4} (target {target})", kind.name(), mask.fraction());
    Ok(())
}

fn cmd_recon(flags: &Flags, o: &Out) -> Result<()> {
    let mut config = ExperimentConfig {
        seed: flags.seed(),
        phantom: o.phantom.parse()?,
        nx: o.size,
        ny: o.size,
        channels: o.channels,
        ..ExperimentConfig::default()
    };
    config.l1 = L1Options {
        lambda_rel: flags.lambda.unwrap_or(config.l1.lambda_rel),
        iterations: flags.iters.unwrap_or(config.l1.iterations),
        shearlet_scales: config.l1.shearlet_scales.min(DigitalShearlet::max_scales(o.size, o.size)),
        wavelet_levels: config.l1.wavelet_levels.min(o.size.trailing_zeros() as usize),
        ..config.l1
    };
    if let Some(kind) = mask_kind(flags)? {
        config.masks = vec![MaskSpec { kind, fraction: flags.fraction.unwrap_or_else(|| default_fraction(kind)) }];
    } else if let Some(f) = flags.fraction {
        config.masks.iter_mut().for_each(|m| m.fraction = f);
    }
    let report = run_experiment(&config, Some(&o.out))?;
    for row in &report.rows {
        println!(
            "{:<7} fraction {:.4}: shearlet {:.4}, wavelet {:.4}, inversion {:.4}",
            row.mask.name(),
            row.fraction,
            row.shearlet_l1,
            row.wavelet_l1,
            row.fourier_inversion
        );
    }
    Ok(())
}

fn cmd_ssr(flags: &Flags, out: &Path) -> Result<()> {
    let mut rows = Vec::new();
    let mut trace_rows = Vec::new();
    let mut results = Vec::new();
    for j in 1..=flags.scale() {
        let l = layout(flags, j)?;
        let g = Gramian::build(&l, l.len())?;
        let grid = SamplingGrid::for_epsilon(&l, flags.epsilon(), [0, 0])?;
        let r = stable_sampling_rate(&l, &grid, &g, flags.theta(), SsrSearch::default())?;
        println!("J = {j}: N = {}, M = {}, samples = {}, c = {:.5}", r.n, r.m, r.num_samples(), r.c);
        rows.push(vec![
            j.to_string(),
            r.n.to_string(),
            r.m.to_string(),
            r.num_samples().to_string(),
            fmt_f64(r.c),
            fmt_f64(g.a_n()),
            fmt_f64(r.wall_time_ms),
        ]);
        for &(m, c) in &r.trace {
            trace_rows.push(vec![j.to_string(), m.to_string(), fmt_f64(c)]);
        }
        results.push(r);
    }
    write_csv(&out.join("ssr.csv"), &["J", "N", "M", "samples", "c", "A_N", "wall_time_ms"], &rows)?;
    write_csv(&out.join("ssr_trace.csv"), &["J", "M", "c"], &trace_rows)?;
    write_json(&out.join("ssr.json"), &results)
}

fn cmd_angle(flags: &Flags, out: &Path) -> Result<()> {
    let l = layout(flags, flags.scale())?;
    let g = Gramian::build(&l, l.len())?;
    let grid = SamplingGrid::for_epsilon(&l, flags.epsilon(), flags.grid()?)?;
    let a = angle_for_grid(&l, &grid, &g)?;
    println!("J = {}, N = {}, M = {:?}: c = {:.6}", flags.scale(), a.n, a.m, a.c);
    write_json(&out.join("angle.json"), &a)
}

fn cmd_gs(flags: &Flags, out: &Path) -> Result<()> {
    let l = layout(flags, flags.scale())?;
    let g = Gramian::build(&l, l.len())?;
    let m = flags.grid()?;
    let grid = SamplingGrid::for_epsilon(&l, flags.epsilon(), m)?;
    let mut rng = ChaCha8Rng::seed_from_u64(flags.seed());
    let x: Vec<Complex64> =
        (0..l.len()).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let meas = measure_function(&l, &grid, &x)?;
    let ev = RowEvaluator::new(&l, &grid, l.len())?;
    let h = SampledGram::for_grid(&ev, m);
    let ustar_m = adjoint_apply(&l, &grid, l.len(), &meas)?;
    let mnorm: f64 = meas.iter().map(|z| z.norm_sqr()).sum();
    let sol = gs_solve_normal(h.h().as_ref(), &ustar_m, mnorm, &g)?;
    let f_norm_sq = g.energy(&x);
    let err = distance(f_norm_sq, &g.apply(&x), &sol.coefficients, &g) / f_norm_sq.sqrt();
    println!("N = {}, M = {m:?}: relative error {err:.3e}, residual {:.3e}", l.len(), sol.residual);
    write_json(
        &out.join("gs.json"),
        &json!({ "J": flags.scale(), "N": l.len(), "M": m, "epsilon": grid.epsilon(),
                 "relative_error": err, "residual": sol.residual, "condition": sol.condition,
                 "ill_conditioned": sol.ill_conditioned, "coefficients": sol.coefficients }),
    )
}

fn cmd_tail(flags: &Flags, out: &Path) -> Result<()> {
    let l = layout(flags, flags.scale())?;
    let r = flags.r();
    let deltas = flags.deltas(&[2.0 / (2.0 * r - 1.0)]);
    let mut rows = Vec::new();
    for delta in deltas {
        for t in tail_sweep(&l, flags.epsilon(), &[1.0, 2.0, 4.0, 8.0], delta, 2.0)? {
            println!("J = {} S = {} delta = {delta}: M = {}, tail = {:.4e}", t.j, t.s, t.m, t.tail);
            rows.push(vec![t.j.to_string(), fmt_f64(t.s), fmt_f64(t.delta), fmt_f64(t.tail), fmt_f64(t.remainder)]);
        }
    }
    write_csv(&out.join("tail.csv"), &["J", "S", "delta", "tail", "remainder"], &rows)
}

fn cmd_framebounds(flags: &Flags, out: &Path) -> Result<()> {
    let sweep = frame_bound_sweep(&spec(flags)?, 1..=flags.scale())?;
    let rows: Vec<Vec<String>> = sweep
        .iter()
        .map(|&(j, n, a, b)| {
            println!("J = {j}: N = {n}, A_N = {a:.6}, B_N = {b:.4}");
            vec![j.to_string(), n.to_string(), fmt_f64(a), fmt_f64(b)]
        })
        .collect();
    write_csv(&out.join("framebounds.csv"), &["J", "N", "A_N", "B_N"], &rows)
}

fn cmd_asymptotics(flags: &Flags, out: &Path) -> Result<()> {
    // --r sets the exponent of the comparison, not the generators
    let spec = GeneratorSpec::default();
    let j_max = flags.scale.unwrap_or(4);
    let sweep = frame_bound_sweep(&spec, 2..=j_max)?;
    let fb: Vec<(u32, usize, f64)> = sweep.iter().map(|&(j, n, a, _)| (j, n, a)).collect();
    let r = flags.r.unwrap_or(4.0);
    let table = asymptotics_table(&fb, &flags.deltas(&[0.3, 0.4, 0.5]), r)?;
    let rows: Vec<Vec<String>> = table
        .rows
        .iter()
        .map(|row| {
            println!("J = {} delta = {}: critical {:.5} vs C*bound {:.5}: {}", row.j, row.delta, row.critical, table.c * row.bound, row.holds);
            vec![
                row.j.to_string(),
                row.n.to_string(),
                row.n_nominal.to_string(),
                fmt_f64(row.a_n),
                fmt_f64(row.delta),
                fmt_f64(row.critical),
                fmt_f64(row.bound),
                row.holds.to_string(),
            ]
        })
        .collect();
    write_csv(&out.join("asymptotics.csv"), &["J", "N", "N_nominal", "A_N", "delta", "critical", "bound", "holds"], &rows)?;
    write_json(&out.join("asymptotics.json"), &table)
}

fn cmd_decay(flags: &Flags, o: &Out) -> Result<()> {
    let kind: PhantomKind = o.phantom.parse()?;
    let n = o.size;
    let img = crate::recon::phantom::reference_image(kind, n, n, flags.seed())?;
    let total = n * n;
    let n_list: Vec<usize> = (6..).map(|e| 1usize << e).take_while(|&k| k <= total).collect();
    let sh = DigitalShearlet::new(n, n, DigitalShearlet::max_scales(n, n).min(4), &GeneratorSpec::default())?;
    let shear = best_nterm_decay_transform(&img.pixels, |u| sh.forward_real(u), |c| sh.adjoint_real(c), &n_list);
    let w = Dwt2::new(n, n, (n.trailing_zeros() as usize).min(4), WaveletFilter::D4)?;
    let wave = best_nterm_decay_transform(
        &img.pixels,
        |u| {
            let mut c: Vec<Complex64> = u.iter().map(|&p| Complex64::new(p, 0.0)).collect();
            w.forward(&mut c);
            c
        },
        |c| {
            let mut u = c.to_vec();
            w.inverse(&mut u);
            u.iter().map(|z| z.re).collect()
        },
        &n_list,
    );
    for (name, curve) in [("shearlet", &shear), ("wavelet", &wave)] {
        let rows: Vec<Vec<String>> =
            curve.n.iter().zip(&curve.error).map(|(k, e)| vec![k.to_string(), fmt_f64(*e)]).collect();
        write_csv(&o.out.join(format!("decay_{name}.csv")), &["N", "error"], &rows)?;
        println!("{name}: fitted slope {:.4}", curve.slope);
    }
    Ok(())
}
