//! Tail energy outside the sampled square, the oversampling function and
//! the lower-frame-bound asymptotics table.

use shearlet_gs::analysis::{asymptotics_table, frame_bound_sweep, loglog_slope, sigma, tail_sweep};
use shearlet_gs::generators::GeneratorSpec;
use shearlet_gs::system::SystemLayout;

fn main() -> shearlet_gs::Result<()> {
    let spec = GeneratorSpec::default();
    let layout = SystemLayout::build(1, spec.clone())?;
    let ss = [1.0, 2.0, 4.0, 8.0];
    let tails = tail_sweep(&layout, 0.125, &ss, 1.0 / 3.0, 2.0)?;
    for t in &tails {
        println!("S = {}: M = {}, tail = {:.3e}, remainder <= {:.3e}", t.s, t.m, t.tail, t.remainder);
    }
    let ys: Vec<f64> = tails.iter().map(|t| t.tail).collect();
    println!("tail decay exponent {:.2}", -loglog_slope(&ss, &ys));

    let bounds = frame_bound_sweep(&spec, 1..=3)?;
    for &(j, n, a, b) in &bounds {
        println!("J = {j}: N = {n}, A_N = {a:.5}, B_N = {b:.3}, sigma = {}", sigma(n as u64, a, 1.0 / 3.0, 3.5)?);
    }
    let fb: Vec<(u32, usize, f64)> = bounds.iter().skip(1).map(|&(j, n, a, _)| (j, n, a)).collect();
    let table = asymptotics_table(&fb, &[0.3, 0.4, 0.5], 4.0)?;
    println!("C = {:.4}", table.c);
    for row in &table.rows {
        println!("J = {} delta = {}: critical {:.4} vs bound {:.4} -> {}", row.j, row.delta, row.critical, row.bound, row.holds);
    }
    Ok(())
}
