//! Fourier sampling: grid construction, orthonormality and atom measurements.

use shearlet_gs::generators::GeneratorSpec;
use shearlet_gs::sampling::{covering_extent, measure_atom, SamplingGrid};
use shearlet_gs::system::SystemLayout;

fn main() -> shearlet_gs::Result<()> {
    let layout = SystemLayout::build(2, GeneratorSpec::default())?;
    let t = covering_extent(&layout);
    println!("nominal supports fit in [-{t}, {t}]^2");
    let grid = SamplingGrid::new(0.125, [16, 16], [4.0, 4.0])?;
    println!("epsilon = {}, samples = {}, sampling box {:?}", grid.epsilon(), grid.num_samples(), grid.sampling_box());
    let probes = [([0, 0], [0, 0]), ([1, 0], [0, 0]), ([3, -2], [3, -2]), ([5, 1], [-4, 7])];
    println!("max deviation from orthonormality: {:.2e}", grid.orthonormality(&probes));
    let idx = layout.atom(layout.len() - 1).index.clone();
    for l in [[0, 0], [4, 1], [16, -3]] {
        println!("<r_{idx:?}, s_{l:?}> = {:.6e}", measure_atom(&layout, &idx, &grid, l)?);
    }
    Ok(())
}
