//! Finite shearlet systems: atom counts per scale and the ordering.
//!
//! Usage: `cargo run --release --example shearlet_system [J]`

use shearlet_gs::generators::GeneratorSpec;
use shearlet_gs::system::SystemLayout;

fn main() -> shearlet_gs::Result<()> {
    let j_max: u32 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2);
    let layout = SystemLayout::build(j_max, GeneratorSpec::default())?;
    println!("J = {j_max}: N = {} atoms in {} blocks", layout.len(), layout.blocks().len());
    for j in 0..j_max {
        println!("  scale {j}: {} atoms", layout.count_at_scale(j));
    }
    for block in layout.blocks().iter().take(6) {
        println!("  block {:?} j={} k={} -> atoms {}..{}", block.cone, block.j, block.k, block.start, block.end);
    }
    let csv = layout.to_csv();
    println!("{}", csv.lines().take(4).collect::<Vec<_>>().join("\n"));
    Ok(())
}
