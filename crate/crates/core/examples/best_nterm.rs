//! Best N-term approximation of the cartoon phantom with the digital
//! shearlet transform and an orthonormal wavelet basis.

use num_complex::Complex64;
use shearlet_gs::analysis::best_nterm_decay_transform;
use shearlet_gs::generators::GeneratorSpec;
use shearlet_gs::recon::digital_shearlet::DigitalShearlet;
use shearlet_gs::recon::dwt::{Dwt2, WaveletFilter};
use shearlet_gs::recon::phantom::{reference_image, PhantomKind};

fn main() -> shearlet_gs::Result<()> {
    let img = reference_image(PhantomKind::Cartoon, 128, 128, 7)?;
    let n_list: Vec<usize> = (8..=14).map(|e| 1usize << e).collect();
    let sh = DigitalShearlet::new(128, 128, 4, &GeneratorSpec::default())?;
    let shear = best_nterm_decay_transform(&img.pixels, |u| sh.forward_real(u), |c| sh.adjoint_real(c), &n_list);
    let w = Dwt2::new(128, 128, 4, WaveletFilter::D4)?;
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
    println!("{:>6} {:>12} {:>12}", "N", "shearlet", "wavelet");
    for (i, n) in n_list.iter().enumerate() {
        println!("{n:>6} {:>12.4e} {:>12.4e}", shear.error[i], wave.error[i]);
    }
    println!("slopes: shearlet {:.3}, wavelet {:.3}", shear.slope, wave.slope);
    Ok(())
}
