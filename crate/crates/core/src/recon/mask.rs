//! Radial and phyllotaxis k-space undersampling masks.
//!
//! Patterns are built in centred coordinates (DC at `(nx/2, ny/2)`) and
//! stored in DFT order, so `pattern[0]` is the DC sample.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const GOLDEN_ANGLE_DEG: f64 = 137.508;
const FRACTION_TOL: f64 = 0.005;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaskKind {
    Radial,
    SpiralPhyllotaxis,
    Full,
}

impl MaskKind {
    pub fn name(self) -> &'static str {
        match self {
            MaskKind::Radial => "radial",
            MaskKind::SpiralPhyllotaxis => "spiral",
            MaskKind::Full => "full",
        }
    }
}

impl std::str::FromStr for MaskKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "radial" => Ok(MaskKind::Radial),
            "spiral" | "spiral_phyllotaxis" | "phyllotaxis" => Ok(MaskKind::SpiralPhyllotaxis),
            "full" => Ok(MaskKind::Full),
            _ => Err(Error::InvalidParameter(format!("unknown mask kind {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mask {
    pub kind: MaskKind,
    pub nx: usize,
    pub ny: usize,
    pub pattern: Vec<bool>,
    /// Size of the generating point set: spokes or spiral points.
    pub parameter: usize,
}

impl Mask {
    pub fn full(nx: usize, ny: usize) -> Self {
        Mask { kind: MaskKind::Full, nx, ny, pattern: vec![true; nx * ny], parameter: 0 }
    }

    pub fn count(&self) -> usize {
        self.pattern.iter().filter(|&&b| b).count()
    }

    pub fn fraction(&self) -> f64 {
        self.count() as f64 / self.pattern.len() as f64
    }

    pub fn includes_dc(&self) -> bool {
        self.pattern[0]
    }

    /// Pattern in centred order for display, row-major with DC in the middle.
    pub fn centered(&self) -> Vec<bool> {
        let (nx, ny) = (self.nx, self.ny);
        let mut out = vec![false; nx * ny];
        for cy in 0..ny {
            for cx in 0..nx {
                out[cy * nx + cx] = self.pattern[dft_index(cx, cy, nx, ny)];
            }
        }
        out
    }
}

fn dft_index(cx: usize, cy: usize, nx: usize, ny: usize) -> usize {
    ((cy + ny / 2) % ny) * nx + (cx + nx / 2) % nx
}

struct Raster {
    nx: usize,
    ny: usize,
    pattern: Vec<bool>,
}

impl Raster {
    fn new(nx: usize, ny: usize) -> Self {
        let mut r = Raster { nx, ny, pattern: vec![false; nx * ny] };
        r.pattern[0] = true;
        r
    }

    /// Marks the pixel nearest to the centred offset `(u, v)` if inside.
    fn mark(&mut self, u: f64, v: f64) {
        let cx = (self.nx / 2) as f64 + u;
        let cy = (self.ny / 2) as f64 + v;
        let (x, y) = (cx.round(), cy.round());
        if x >= 0.0 && y >= 0.0 && (x as usize) < self.nx && (y as usize) < self.ny {
            let i = dft_index(x as usize, y as usize, self.nx, self.ny);
            self.pattern[i] = true;
        }
    }
}

/// Equiangular full lines through the centre.
pub fn radial_pattern(nx: usize, ny: usize, spokes: usize) -> Vec<bool> {
    let mut r = Raster::new(nx, ny);
    let reach = (nx.max(ny) as f64) * 0.75;
    let steps = (4.0 * reach).ceil() as i64;
    for s in 0..spokes {
        let theta = std::f64::consts::PI * s as f64 / spokes as f64;
        let (sn, cs) = theta.sin_cos();
        for t in -steps..=steps {
            let rho = t as f64 * 0.25;
            r.mark(rho * cs, rho * sn);
        }
    }
    r.pattern
}

/// Golden-angle phyllotaxis: point `t` at radius `R·sqrt(t / P)` and angle
/// `t · 137.508°`, with `R` the half-diagonal of the grid.
pub fn spiral_pattern(nx: usize, ny: usize, points: usize) -> Vec<bool> {
    let mut r = Raster::new(nx, ny);
    let radius = 0.5 * ((nx * nx + ny * ny) as f64).sqrt();
    let step = GOLDEN_ANGLE_DEG.to_radians();
    for t in 0..points {
        let rho = radius * (t as f64 / points as f64).sqrt();
        let (sn, cs) = (t as f64 * step).sin_cos();
        r.mark(rho * cs, rho * sn);
    }
    r.pattern
}

fn frac(p: &[bool]) -> f64 {
    p.iter().filter(|&&b| b).count() as f64 / p.len() as f64
}

/// Builds a mask whose sampled fraction lies within half a percentage point
/// of `target`, choosing the closest achievable generator count.
pub fn make_mask(kind: MaskKind, nx: usize, ny: usize, target: f64) -> Result<Mask> {
    if !(target > 0.0 && target <= 1.0) {
        return Err(Error::InvalidParameter(format!("target fraction {target} outside (0, 1]")));
    }
    if nx == 0 || ny == 0 {
        return Err(Error::InvalidSize { nx, ny });
    }
    if kind == MaskKind::Full || target == 1.0 {
        return Ok(Mask { kind, ..Mask::full(nx, ny) });
    }
    let build = |p: usize| match kind {
        MaskKind::Radial => radial_pattern(nx, ny, p),
        _ => spiral_pattern(nx, ny, p),
    };
    let upper = match kind {
        MaskKind::Radial => 4 * nx.max(ny),
        _ => 8 * nx * ny,
    };
    // bisection on the (nearly monotone) fraction, then a local scan
    let (mut lo, mut hi) = (1usize, upper);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if frac(&build(mid)) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let window = match kind {
        MaskKind::Radial => 4,
        _ => 64,
    };
    let mut best: Option<(f64, usize, Vec<bool>)> = None;
    for p in lo.saturating_sub(window).max(1)..=(hi + window).min(upper) {
        let pat = build(p);
        let err = (frac(&pat) - target).abs();
        if best.as_ref().map_or(true, |b| err < b.0) {
            best = Some((err, p, pat));
        }
    }
    let (err, parameter, pattern) = best.expect("non-empty scan");
    if err > FRACTION_TOL {
        return Err(Error::UnreachableFraction { target, achieved: frac(&pattern) });
    }
    Ok(Mask { kind, nx, ny, pattern, parameter })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_mask() {
        let m = make_mask(MaskKind::Radial, 16, 16, 1.0).unwrap();
        assert!(m.pattern.iter().all(|&b| b));
        assert_eq!(m.fraction(), 1.0);
    }

    #[test]
    fn fig4_fractions() {
        let s = make_mask(MaskKind::SpiralPhyllotaxis, 128, 128, 0.2037).unwrap();
        assert!((0.198..=0.209).contains(&s.fraction()), "{}", s.fraction());
        assert!(s.includes_dc());
        let r = make_mask(MaskKind::Radial, 128, 128, 0.2074).unwrap();
        assert!((0.202..=0.213).contains(&r.fraction()), "{}", r.fraction());
        assert!(r.includes_dc());
    }

    #[test]
    fn fraction_accounting() {
        let m = make_mask(MaskKind::Radial, 64, 32, 0.3).unwrap();
        assert_eq!(m.fraction(), m.count() as f64 / (64.0 * 32.0));
        assert_eq!(m.centered().iter().filter(|&&b| b).count(), m.count());
        assert!(m.centered()[16 * 64 + 32]);
    }

    #[test]
    fn rejects_bad_target() {
        assert!(make_mask(MaskKind::Radial, 16, 16, 0.0).is_err());
        assert!(make_mask(MaskKind::Radial, 16, 16, 1.5).is_err());
        assert!(matches!(
            make_mask(MaskKind::Radial, 4, 4, 0.01),
            Err(Error::UnreachableFraction { .. })
        ));
    }
}
