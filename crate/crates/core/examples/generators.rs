//! Spline generators: vanishing moments, supports and certified decay.

use shearlet_gs::generators::{dyadic_probe_grid, verify_decay, Generator, GeneratorSpec};

fn main() -> shearlet_gs::Result<()> {
    let spec = GeneratorSpec::default();
    println!("spline order {}, filter {:?}", spec.spline_order(), spec.moment_filter());
    println!("vanishing moments {}, decay r = {}", spec.vanishing_moments(), spec.decay_r());
    for which in [Generator::Scaling, Generator::Cone1, Generator::Cone2] {
        println!(
            "{which:?}: support [0, {:?}], squared norm {:.6}",
            spec.generator_extent(which),
            spec.generator_norm_sq(which)
        );
    }
    let report = verify_decay(&spec, spec.decay_r(), spec.alpha() as f64, &dyadic_probe_grid(-8, 12))?;
    println!(
        "decay constants: C1 = {:.4}, C2 = {:.4}, certified = {}",
        report.max_ratio_phi, report.max_ratio_psi, report.pass
    );
    for xi in [0.0, 1.0, 4.0, 16.0, 64.0] {
        println!("|psi^({xi}, 0.5)| = {:.3e}", spec.generator_ft(Generator::Cone1, [xi, 0.5]).norm());
    }
    Ok(())
}
