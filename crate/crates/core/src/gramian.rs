//! Exact spatial inner products between shearlet atoms.
//!
//! Every atom is `c · P(z₀) Q(z₁)` with `z = D x - t` an affine image of `x`
//! and `P`, `Q` piecewise polynomials on unit cells. The product of two atoms
//! is therefore a polynomial on each cell of the overlay of two lattices.
//! Cells of the finer atom are mapped into the coarser atom's coordinates,
//! clipped against its cells and integrated with a collapsed Gauss rule of
//! sufficient degree, which makes every entry exact up to rounding.

use faer::Mat;

use crate::generators::GeneratorSpec;
use crate::poly::PiecewisePoly;
use crate::quad::{clip_to_rect, TriangleRule};
use crate::system::{mat_det, mat_inv, mat_vec, Atom, Mat2, SystemLayout};

struct Local<'a> {
    d: Mat2,
    t: [f64; 2],
    scale: f64,
    prof: [&'a PiecewisePoly; 2],
}

impl<'a> Local<'a> {
    fn new(spec: &'a GeneratorSpec, atom: &Atom) -> Self {
        let dil = spec.dilation() as f64;
        let d = [
            [dil * atom.b[0][0], dil * atom.b[0][1]],
            [dil * atom.b[1][0], dil * atom.b[1][1]],
        ];
        let m = atom.index.translation();
        Local {
            d,
            t: [dil * m[0] as f64, dil * m[1] as f64],
            scale: atom.amplitude * dil * dil,
            prof: spec.axis_profiles(atom.generator()),
        }
    }

    fn extent(&self) -> [usize; 2] {
        [self.prof[0].num_pieces(), self.prof[1].num_pieces()]
    }
}

/// Inner-product engine shared across many atom pairs.
pub struct InnerProduct<'a> {
    spec: &'a GeneratorSpec,
    rule: TriangleRule,
}

impl<'a> InnerProduct<'a> {
    pub fn new(spec: &'a GeneratorSpec) -> Self {
        // product of two pieces has total degree 4(m-1); the collapsed rule
        // with n points per direction is exact to degree 2n - 2
        let n = 2 * spec.spline_order() - 1;
        InnerProduct { spec, rule: TriangleRule::new(n) }
    }

    /// `⟨a, b⟩` for any two atoms, in or out of a layout.
    pub fn inner(&self, a: &Atom, b: &Atom) -> f64 {
        if !a.tight_support_box(self.spec).intersects(&b.tight_support_box(self.spec), 0.0) {
            return 0.0;
        }
        let la = Local::new(self.spec, a);
        let lb = Local::new(self.spec, b);
        // iterate over the cells of the atom with the smaller cells
        if mat_det(la.d).abs() >= mat_det(lb.d).abs() {
            self.overlay(&la, &lb)
        } else {
            self.overlay(&lb, &la)
        }
    }

    pub fn norm_sq(&self, a: &Atom) -> f64 {
        self.inner(a, a)
    }

    fn overlay(&self, fine: &Local, coarse: &Local) -> f64 {
        // z_c = C z_f + e
        let c = mat_mul2(coarse.d, mat_inv(fine.d));
        let ct = mat_vec(&c, fine.t);
        let e = [ct[0] - coarse.t[0], ct[1] - coarse.t[1]];
        let c_inv = mat_inv(c);
        let to_fine = |z: [f64; 2]| mat_vec(&c_inv, [z[0] - e[0], z[1] - e[1]]);
        let [nf0, nf1] = fine.extent();
        let [nc0, nc1] = coarse.extent();
        let mut quad = [[0.0; 2]; 4];
        let mut poly = Vec::with_capacity(12);
        let mut total = 0.0;
        for i in 0..nf0 {
            for k in 0..nf1 {
                let corners = [[i, k], [i + 1, k], [i + 1, k + 1], [i, k + 1]];
                let mut lo = [f64::INFINITY; 2];
                let mut hi = [f64::NEG_INFINITY; 2];
                for (q, cn) in quad.iter_mut().zip(corners) {
                    let z = mat_vec(&c, [cn[0] as f64, cn[1] as f64]);
                    *q = [z[0] + e[0], z[1] + e[1]];
                    for a in 0..2 {
                        lo[a] = lo[a].min(q[a]);
                        hi[a] = hi[a].max(q[a]);
                    }
                }
                let r0 = (lo[0].floor().max(0.0) as usize)..(hi[0].ceil().min(nc0 as f64).max(0.0) as usize);
                let r1 = (lo[1].floor().max(0.0) as usize)..(hi[1].ceil().min(nc1 as f64).max(0.0) as usize);
                let pf0 = fine.prof[0].piece(i);
                let pf1 = fine.prof[1].piece(k);
                for ic in r0.clone() {
                    for kc in r1.clone() {
                        clip_to_rect(&quad, [ic as f64, kc as f64], [ic as f64 + 1.0, kc as f64 + 1.0], &mut poly);
                        if poly.len() < 3 {
                            continue;
                        }
                        let pc0 = coarse.prof[0].piece(ic);
                        let pc1 = coarse.prof[1].piece(kc);
                        let f = |z: [f64; 2]| {
                            let y = to_fine(z);
                            crate::poly::horner(pf0, y[0] - i as f64)
                                * crate::poly::horner(pf1, y[1] - k as f64)
                                * crate::poly::horner(pc0, z[0] - ic as f64)
                                * crate::poly::horner(pc1, z[1] - kc as f64)
                        };
                        for t in 1..poly.len() - 1 {
                            total += self.rule.integrate(poly[0], poly[t], poly[t + 1], f);
                        }
                    }
                }
            }
        }
        // dx = dz_c / |det D_c|
        total * fine.scale * coarse.scale / mat_det(coarse.d).abs()
    }
}

fn mat_mul2(a: Mat2, b: Mat2) -> Mat2 {
    crate::system::mat_mul(a, b)
}

/// Gramian `G[λ, μ] = ⟨r_λ, r_μ⟩` of the first `n` atoms of a layout.
pub fn spatial_gramian(layout: &SystemLayout, n: usize) -> Mat<f64> {
    let atoms = &layout.atoms()[..n];
    gramian_of(layout.spec(), atoms)
}

/// Gramian of an arbitrary list of atoms.
pub fn gramian_of(spec: &GeneratorSpec, atoms: &[Atom]) -> Mat<f64> {
    let n = atoms.len();
    let ip = InnerProduct::new(spec);
    let boxes: Vec<_> = atoms.iter().map(|a| a.tight_support_box(spec)).collect();
    let mut g = Mat::<f64>::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            if !boxes[i].intersects(&boxes[j], 0.0) {
                continue;
            }
            let v = ip.inner(&atoms[i], &atoms[j]);
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    g
}

/// Cross inner products `⟨f_a, r_λ⟩` between extra atoms and a prefix.
pub fn cross_inner(spec: &GeneratorSpec, extra: &[Atom], atoms: &[Atom]) -> Mat<f64> {
    let ip = InnerProduct::new(spec);
    Mat::from_fn(extra.len(), atoms.len(), |i, j| ip.inner(&extra[i], &atoms[j]))
}
