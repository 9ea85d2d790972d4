//! Stable sampling rate: least grid with cosine angle above 1/θ.
//!
//! Usage: `cargo run --release --example stable_sampling_rate [J_MAX]`

use shearlet_gs::generators::GeneratorSpec;
use shearlet_gs::gs::{stable_sampling_rate, Gramian, SsrSearch};
use shearlet_gs::sampling::SamplingGrid;
use shearlet_gs::system::SystemLayout;

fn main() -> shearlet_gs::Result<()> {
    let j_max: u32 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let grid = SamplingGrid::new(0.125, [0, 0], [4.0, 4.0])?;
    println!("{:>2} {:>6} {:>10} {:>6} {:>10} {:>9}", "J", "N", "A_N", "M", "samples", "c");
    for j in 1..=j_max {
        let layout = SystemLayout::build(j, GeneratorSpec::default())?;
        let g = Gramian::build(&layout, layout.len())?;
        let r = stable_sampling_rate(&layout, &grid, &g, 2.0, SsrSearch::default())?;
        println!("{j:>2} {:>6} {:>10.5} {:>6} {:>10} {:>9.5}", r.n, g.a_n(), r.m, r.num_samples(), r.c);
    }
    Ok(())
}
