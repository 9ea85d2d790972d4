//! Generalized sampling: recover a function in the reconstruction space from
//! its Fourier samples and compare with the orthogonal projection.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shearlet_gs::generators::GeneratorSpec;
use shearlet_gs::gs::{angle_for_grid, distance, gs_solve, Gramian};
use shearlet_gs::sampling::{cross_gramian, measure_function, SamplingGrid};
use shearlet_gs::system::SystemLayout;

fn main() -> shearlet_gs::Result<()> {
    let layout = SystemLayout::build(1, GeneratorSpec::default())?;
    let g = Gramian::build(&layout, layout.len())?;
    let grid = SamplingGrid::new(0.125, [32, 32], [4.0, 4.0])?;
    let angle = angle_for_grid(&layout, &grid, &g)?;
    println!("N = {}, M = 32: c = {:.4}", g.dim(), angle.c);

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let x: Vec<Complex64> = (0..g.dim()).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), 0.0)).collect();
    let meas = measure_function(&layout, &grid, &x)?;
    let u = cross_gramian(&layout, &grid, g.dim())?;
    let sol = gs_solve(u.as_ref(), &g, &meas)?;
    let f_norm_sq = g.energy(&x);
    let b = g.apply(&x);
    let err = distance(f_norm_sq, &b, &sol.coefficients, &g) / f_norm_sq.sqrt();
    println!("relative reconstruction error {err:.2e}, residual {:.2e}, condition {:.2}", sol.residual, sol.condition);
    Ok(())
}
