//! The finite cone-adapted shearlet system spanning the reconstruction space.
//!
//! Atoms are `2^{3j/4} ψ(B x - m)` with `B = S_k A_j` on the horizontal cone
//! and `B = S_kᵀ Ã_j` on the vertical cone, plus the translates `φ(x - m)` of
//! the scaling function. Translations use the unit sampling constant.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::{Generator, GeneratorSpec};

pub type Mat2 = [[f64; 2]; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Cone {
    Scaling,
    Horizontal,
    Vertical,
}

impl Cone {
    pub fn name(self) -> &'static str {
        match self {
            Cone::Scaling => "scaling",
            Cone::Horizontal => "horizontal",
            Cone::Vertical => "vertical",
        }
    }
}

/// Position of one atom in the system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ShearletIndex {
    Scaling { m: [i64; 2] },
    Horizontal { j: u32, k: i64, m: [i64; 2] },
    Vertical { j: u32, k: i64, m: [i64; 2] },
}

impl ShearletIndex {
    pub fn cone(&self) -> Cone {
        match self {
            ShearletIndex::Scaling { .. } => Cone::Scaling,
            ShearletIndex::Horizontal { .. } => Cone::Horizontal,
            ShearletIndex::Vertical { .. } => Cone::Vertical,
        }
    }

    pub fn scale(&self) -> Option<u32> {
        match *self {
            ShearletIndex::Scaling { .. } => None,
            ShearletIndex::Horizontal { j, .. } | ShearletIndex::Vertical { j, .. } => Some(j),
        }
    }

    pub fn shear(&self) -> Option<i64> {
        match *self {
            ShearletIndex::Scaling { .. } => None,
            ShearletIndex::Horizontal { k, .. } | ShearletIndex::Vertical { k, .. } => Some(k),
        }
    }

    pub fn translation(&self) -> [i64; 2] {
        match *self {
            ShearletIndex::Scaling { m }
            | ShearletIndex::Horizontal { m, .. }
            | ShearletIndex::Vertical { m, .. } => m,
        }
    }

    pub fn generator(&self) -> Generator {
        match self.cone() {
            Cone::Scaling => Generator::Scaling,
            Cone::Horizontal => Generator::Cone1,
            Cone::Vertical => Generator::Cone2,
        }
    }

    /// The linear part `B` of the affine map `x ↦ B x - m`.
    pub fn matrix(&self) -> Mat2 {
        match *self {
            ShearletIndex::Scaling { .. } => [[1.0, 0.0], [0.0, 1.0]],
            ShearletIndex::Horizontal { j, k, .. } => {
                mat_mul(shear_matrix(k, Cone::Horizontal), scaling_matrix(j, Cone::Horizontal))
            }
            ShearletIndex::Vertical { j, k, .. } => {
                mat_mul(shear_matrix(k, Cone::Vertical), scaling_matrix(j, Cone::Vertical))
            }
        }
    }

    /// `2^{3j/4}`, or 1 for the scaling cone.
    pub fn amplitude(&self) -> f64 {
        self.scale().map_or(1.0, |j| 2f64.powf(0.75 * j as f64))
    }
}

/// Parabolic scaling matrix `diag(2^j, 2^{j/2})` or its swapped version.
pub fn scaling_matrix(j: u32, cone: Cone) -> Mat2 {
    let a = 2f64.powi(j as i32);
    let b = 2f64.powf(j as f64 / 2.0);
    match cone {
        Cone::Vertical => [[b, 0.0], [0.0, a]],
        _ => [[a, 0.0], [0.0, b]],
    }
}

/// `S_k = [[1, k], [0, 1]]`, transposed for the vertical cone.
pub fn shear_matrix(k: i64, cone: Cone) -> Mat2 {
    let k = k as f64;
    match cone {
        Cone::Vertical => [[1.0, 0.0], [k, 1.0]],
        _ => [[1.0, k], [0.0, 1.0]],
    }
}

pub fn mat_mul(a: Mat2, b: Mat2) -> Mat2 {
    [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]
}

pub fn mat_det(a: Mat2) -> f64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

pub fn mat_inv(a: Mat2) -> Mat2 {
    let d = mat_det(a);
    [[a[1][1] / d, -a[0][1] / d], [-a[1][0] / d, a[0][0] / d]]
}

pub fn mat_transpose(a: Mat2) -> Mat2 {
    [[a[0][0], a[1][0]], [a[0][1], a[1][1]]]
}

#[inline]
pub fn mat_vec(a: &Mat2, x: [f64; 2]) -> [f64; 2] {
    [a[0][0] * x[0] + a[0][1] * x[1], a[1][0] * x[0] + a[1][1] * x[1]]
}

/// Axis-aligned rectangle `[lo₀, hi₀] × [lo₁, hi₁]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rect {
    pub lo: [f64; 2],
    pub hi: [f64; 2],
}

impl Rect {
    pub fn intersects(&self, other: &Rect, tol: f64) -> bool {
        (0..2).all(|i| self.lo[i] <= other.hi[i] + tol && other.lo[i] <= self.hi[i] + tol)
    }

    pub fn contains_rect(&self, other: &Rect, tol: f64) -> bool {
        (0..2).all(|i| other.lo[i] >= self.lo[i] - tol && other.hi[i] <= self.hi[i] + tol)
    }

    pub fn contains(&self, x: [f64; 2]) -> bool {
        (0..2).all(|i| x[i] >= self.lo[i] && x[i] <= self.hi[i])
    }

    /// Bounding box of the image of `[0,w₀]×[0,w₁] + shift` under `a`.
    fn of_parallelogram(a: &Mat2, w: [f64; 2], shift: [f64; 2]) -> Rect {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for c in [[0.0, 0.0], [w[0], 0.0], [0.0, w[1]], [w[0], w[1]]] {
            let p = mat_vec(a, [c[0] + shift[0], c[1] + shift[1]]);
            for i in 0..2 {
                lo[i] = lo[i].min(p[i]);
                hi[i] = hi[i].max(p[i]);
            }
        }
        Rect { lo, hi }
    }
}

/// An index together with its precomputed affine data.
#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub index: ShearletIndex,
    pub b: Mat2,
    pub b_inv: Mat2,
    pub b_inv_t: Mat2,
    pub amplitude: f64,
}

impl Atom {
    pub fn new(index: ShearletIndex) -> Self {
        let b = index.matrix();
        let b_inv = mat_inv(b);
        Atom { index, b, b_inv, b_inv_t: mat_transpose(b_inv), amplitude: index.amplitude() }
    }

    pub fn generator(&self) -> Generator {
        self.index.generator()
    }

    fn m_f64(&self) -> [f64; 2] {
        let m = self.index.translation();
        [m[0] as f64, m[1] as f64]
    }

    /// Fourier transform `2^{-3j/4} e^{-2πi⟨m, B^{-T}ξ⟩} ĝ(B^{-T}ξ)`.
    pub fn ft(&self, spec: &GeneratorSpec, xi: [f64; 2]) -> Complex64 {
        let eta = mat_vec(&self.b_inv_t, xi);
        let m = self.m_f64();
        let phase = Complex64::from_polar(1.0, -2.0 * PI * (m[0] * eta[0] + m[1] * eta[1]));
        phase * spec.generator_ft(self.generator(), eta) / self.amplitude
    }

    /// Pointwise value `2^{3j/4} g(B x - m)`.
    pub fn space(&self, spec: &GeneratorSpec, x: [f64; 2]) -> f64 {
        let y = mat_vec(&self.b, x);
        let m = self.m_f64();
        self.amplitude * spec.generator_space(self.generator(), [y[0] - m[0], y[1] - m[1]])
    }

    /// Bounding box of `B^{-1}([0,s]² + m)`.
    pub fn support_box(&self, side: f64) -> Rect {
        Rect::of_parallelogram(&self.b_inv, [side, side], self.m_f64())
    }

    /// Bounding box of the true support `B^{-1}(supp g + m)`.
    pub fn tight_support_box(&self, spec: &GeneratorSpec) -> Rect {
        Rect::of_parallelogram(&self.b_inv, spec.generator_extent(self.generator()), self.m_f64())
    }
}

/// A run of atoms sharing cone, scale and shear; they differ only in `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub cone: Cone,
    pub j: u32,
    pub k: i64,
    pub start: usize,
    pub end: usize,
}

/// The ordered finite system of scales `0..J-1` plus the scaling cone.
#[derive(Debug, Clone)]
pub struct SystemLayout {
    j_max: u32,
    spec: GeneratorSpec,
    atoms: Vec<Atom>,
    blocks: Vec<Block>,
}

/// Largest shear at scale `j`, `⌈2^{j/2}⌉`.
pub fn max_shear(j: u32) -> i64 {
    if j % 2 == 0 {
        1i64 << (j / 2)
    } else {
        2f64.powf(j as f64 / 2.0).ceil() as i64
    }
}

const BOX_TOL: f64 = 1e-12;

/// All translations `m` for which the bounding box of `B^{-1}([0,s]² + m)`
/// meets `[0,s]²`, in lexicographic order.
pub fn admissible_translations(b: Mat2, side: f64) -> Vec<[i64; 2]> {
    let b_inv = mat_inv(b);
    let unit = Rect::of_parallelogram(&b_inv, [side, side], [0.0, 0.0]);
    // B^{-1} m must lie in [-hi, s - lo]; enumerate m over B of that box
    let region = Rect {
        lo: [-unit.hi[0] - BOX_TOL, -unit.hi[1] - BOX_TOL],
        hi: [side - unit.lo[0] + BOX_TOL, side - unit.lo[1] + BOX_TOL],
    };
    let cand = Rect::of_parallelogram(
        &b,
        [region.hi[0] - region.lo[0], region.hi[1] - region.lo[1]],
        region.lo,
    );
    let target = Rect { lo: [0.0, 0.0], hi: [side, side] };
    let mut out = Vec::new();
    for m0 in (cand.lo[0].floor() as i64 - 1)..=(cand.hi[0].ceil() as i64 + 1) {
        for m1 in (cand.lo[1].floor() as i64 - 1)..=(cand.hi[1].ceil() as i64 + 1) {
            let bx = Rect::of_parallelogram(&b_inv, [side, side], [m0 as f64, m1 as f64]);
            if bx.intersects(&target, BOX_TOL) {
                out.push([m0, m1]);
            }
        }
    }
    out
}

impl SystemLayout {
    pub fn build(j_max: u32, spec: GeneratorSpec) -> Result<Self> {
        if j_max == 0 {
            return Err(Error::InvalidSpec("the number of scales J must be at least 1".into()));
        }
        if j_max > 12 {
            return Err(Error::InvalidSpec(format!("J = {j_max} is beyond the supported range")));
        }
        let s = spec.box_side();
        let mut atoms = Vec::new();
        let mut blocks = Vec::new();
        let start = atoms.len();
        for m0 in -s..=s {
            for m1 in -s..=s {
                atoms.push(Atom::new(ShearletIndex::Scaling { m: [m0, m1] }));
            }
        }
        blocks.push(Block { cone: Cone::Scaling, j: 0, k: 0, start, end: atoms.len() });
        for j in 0..j_max {
            let kmax = max_shear(j);
            for k in -kmax..=kmax {
                for cone in [Cone::Horizontal, Cone::Vertical] {
                    let make = |m| match cone {
                        Cone::Horizontal => ShearletIndex::Horizontal { j, k, m },
                        _ => ShearletIndex::Vertical { j, k, m },
                    };
                    let b = make([0, 0]).matrix();
                    let start = atoms.len();
                    for m in admissible_translations(b, s as f64) {
                        atoms.push(Atom::new(make(m)));
                    }
                    blocks.push(Block { cone, j, k, start, end: atoms.len() });
                }
            }
        }
        Ok(SystemLayout { j_max, spec, atoms, blocks })
    }

    pub fn j_max(&self) -> u32 {
        self.j_max
    }

    pub fn spec(&self) -> &GeneratorSpec {
        &self.spec
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn atom(&self, i: usize) -> &Atom {
        &self.atoms[i]
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn indices(&self) -> impl Iterator<Item = &ShearletIndex> {
        self.atoms.iter().map(|a| &a.index)
    }

    pub fn position(&self, idx: &ShearletIndex) -> Option<usize> {
        self.atoms.iter().position(|a| a.index == *idx)
    }

    fn lookup(&self, idx: &ShearletIndex) -> Result<&Atom> {
        self.position(idx).map(|p| &self.atoms[p]).ok_or(Error::IndexOutOfLayout)
    }

    /// Number of translations in each cone-atom block at scale `j`.
    pub fn count_at_scale(&self, j: u32) -> usize {
        self.blocks
            .iter()
            .filter(|b| b.cone != Cone::Scaling && b.j == j)
            .map(|b| b.end - b.start)
            .sum()
    }

    pub fn atom_ft(&self, idx: &ShearletIndex, xi: [f64; 2]) -> Result<Complex64> {
        Ok(self.lookup(idx)?.ft(&self.spec, xi))
    }

    pub fn atom_space(&self, idx: &ShearletIndex, x: [f64; 2]) -> Result<f64> {
        Ok(self.lookup(idx)?.space(&self.spec, x))
    }

    /// Nominal support box `B^{-1}([0,s]² + m)` used by the enumeration.
    pub fn support_box(&self, idx: &ShearletIndex) -> Rect {
        Atom::new(*idx).support_box(self.spec.box_side() as f64)
    }

    /// Layout summary with columns `ordinal,cone,j,k,m1,m2`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("ordinal,cone,j,k,m1,m2\n");
        for (i, a) in self.atoms.iter().enumerate() {
            let m = a.index.translation();
            let j = a.index.scale().map_or(String::new(), |j| j.to_string());
            let k = a.index.shear().map_or(String::new(), |k| k.to_string());
            let _ = writeln!(out, "{i},{},{j},{k},{},{}", a.index.cone().name(), m[0], m[1]);
        }
        out
    }
}
