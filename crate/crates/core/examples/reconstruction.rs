//! Four-channel phantom, spiral and radial masks, three reconstructions.
//!
//! Usage: `cargo run --release --example reconstruction [OUT_DIR]`

use std::path::PathBuf;

use shearlet_gs::recon::experiment::{run_experiment, ExperimentConfig, Method};

fn main() -> shearlet_gs::Result<()> {
    let out = std::env::args().nth(1).map(PathBuf::from);
    let config = ExperimentConfig { write_images: out.is_some(), ..ExperimentConfig::default() };
    let t0 = std::time::Instant::now();
    let report = run_experiment(&config, out.as_deref())?;
    println!("{:<8} {:>9} {:>12} {:>12} {:>18}", "mask", "fraction", "shearlet_l1", "wavelet_l1", "fourier_inversion");
    for row in &report.rows {
        println!(
            "{:<8} {:>9.4} {:>12.4} {:>12.4} {:>18.4}",
            row.mask.name(),
            row.fraction,
            row.error(Method::ShearletL1),
            row.error(Method::WaveletL1),
            row.error(Method::FourierInversion)
        );
    }
    println!("elapsed {:.1} s", t0.elapsed().as_secs_f64());
    Ok(())
}
