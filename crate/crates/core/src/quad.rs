//! Gauss-Legendre rules, convex polygon clipping and exact polynomial
//! integration over triangles.

use std::f64::consts::PI;

/// Gauss-Legendre nodes and weights mapped to `[0, 1]`.
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    /// `n`-point rule, exact for polynomials of degree `2n - 1`. Nodes come
    /// from Newton iteration on the Legendre recurrence.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..(n + 1) / 2 {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = 0.5 * (1.0 - x);
            nodes[n - 1 - i] = 0.5 * (1.0 + x);
            weights[i] = 0.5 * w;
            weights[n - 1 - i] = 0.5 * w;
        }
        GaussRule { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `∫_a^b f` with the rule mapped to `[a, b]`.
    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let h = b - a;
        self.nodes.iter().zip(&self.weights).map(|(&t, &w)| w * f(a + h * t)).sum::<f64>() * h
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Quadrature points on a triangle obtained by collapsing the unit square.
///
/// With an `n`-point Gauss rule per direction it integrates polynomials of
/// total degree `2n - 2` exactly.
#[derive(Debug, Clone)]
pub struct TriangleRule {
    /// Barycentric-like coordinates `(s, s·t)` and weights on the reference
    /// triangle with vertices `(0,0)`, `(1,0)`, `(1,1)`.
    pts: Vec<(f64, f64, f64)>,
}

impl TriangleRule {
    pub fn new(n: usize) -> Self {
        let g = GaussRule::new(n);
        let mut pts = Vec::with_capacity(n * n);
        for (&s, &ws) in g.nodes.iter().zip(&g.weights) {
            for (&t, &wt) in g.nodes.iter().zip(&g.weights) {
                pts.push((s, s * t, ws * wt * s));
            }
        }
        TriangleRule { pts }
    }

    /// `∫_T f` over the triangle `(a, b, c)`.
    #[inline]
    pub fn integrate(&self, a: [f64; 2], b: [f64; 2], c: [f64; 2], mut f: impl FnMut([f64; 2]) -> f64) -> f64 {
        let e1 = [b[0] - a[0], b[1] - a[1]];
        let e2 = [c[0] - b[0], c[1] - b[1]];
        let jac = (e1[0] * e2[1] - e1[1] * e2[0]).abs();
        if jac == 0.0 {
            return 0.0;
        }
        let mut sum = 0.0;
        for &(u, v, w) in &self.pts {
            sum += w * f([a[0] + u * e1[0] + v * e2[0], a[1] + u * e1[1] + v * e2[1]]);
        }
        sum * jac
    }
}

/// Clips a convex polygon to an axis-aligned rectangle.
pub fn clip_to_rect(poly: &[[f64; 2]], lo: [f64; 2], hi: [f64; 2], out: &mut Vec<[f64; 2]>) {
    let mut cur: Vec<[f64; 2]> = poly.to_vec();
    let mut next = Vec::with_capacity(poly.len() + 4);
    for axis in 0..2 {
        for (bound, keep_above) in [(lo[axis], true), (hi[axis], false)] {
            next.clear();
            let n = cur.len();
            if n == 0 {
                break;
            }
            let inside = |p: &[f64; 2]| if keep_above { p[axis] >= bound } else { p[axis] <= bound };
            for i in 0..n {
                let p = cur[i];
                let q = cur[(i + 1) % n];
                let (pin, qin) = (inside(&p), inside(&q));
                if pin {
                    next.push(p);
                }
                if pin != qin {
                    let t = (bound - p[axis]) / (q[axis] - p[axis]);
                    let mut x = [p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])];
                    x[axis] = bound;
                    next.push(x);
                }
            }
            std::mem::swap(&mut cur, &mut next);
        }
    }
    out.clear();
    out.extend_from_slice(&cur);
}

pub fn polygon_area(poly: &[[f64; 2]]) -> f64 {
    let n = poly.len();
    let mut a = 0.0;
    for i in 0..n {
        let p = poly[i];
        let q = poly[(i + 1) % n];
        a += p[0] * q[1] - p[1] * q[0];
    }
    0.5 * a.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_rule_exactness() {
        for n in 1..10 {
            let g = GaussRule::new(n);
            assert!((g.weights.iter().sum::<f64>() - 1.0).abs() < 1e-14);
            for p in 0..(2 * n) {
                let v = g.integrate(0.0, 1.0, |x| x.powi(p as i32));
                assert!((v - 1.0 / (p + 1) as f64).abs() < 1e-14, "n={n} p={p}");
            }
        }
    }

    #[test]
    fn triangle_rule_monomials() {
        // ∫_T x^a y^b over (0,0),(1,0),(0,1) equals a! b! / (a+b+2)!
        let fact = |n: u32| (1..=n).map(|k| k as f64).product::<f64>();
        let r = TriangleRule::new(7);
        for a in 0..=6u32 {
            for b in 0..=(12 - a).min(6) {
                let v = r.integrate([0.0, 0.0], [1.0, 0.0], [0.0, 1.0], |x| x[0].powi(a as i32) * x[1].powi(b as i32));
                let exact = fact(a) * fact(b) / fact(a + b + 2);
                assert!((v - exact).abs() < 1e-15 * exact.max(1e-3) * 1e2, "a={a} b={b} {v} {exact}");
            }
        }
    }

    #[test]
    fn clipping_a_rotated_square() {
        let diamond = [[0.5, -0.5], [1.5, 0.5], [0.5, 1.5], [-0.5, 0.5]];
        let mut out = Vec::new();
        clip_to_rect(&diamond, [0.0, 0.0], [1.0, 1.0], &mut out);
        assert!((polygon_area(&out) - 1.0).abs() < 1e-15);
        clip_to_rect(&diamond, [2.0, 2.0], [3.0, 3.0], &mut out);
        assert!(out.is_empty() || polygon_area(&out) == 0.0);
        clip_to_rect(&diamond, [0.5, 0.5], [2.0, 2.0], &mut out);
        assert!((polygon_area(&out) - 0.5).abs() < 1e-15);
    }
}
