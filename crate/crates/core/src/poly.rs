//! Piecewise polynomials on unit-spaced integer knots.

/// A function on `[0, n)` whose restriction to `[i, i+1)` is
/// `Σ_p c[i][p] (x - i)^p`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PiecewisePoly {
    coeffs: Vec<f64>,
    stride: usize,
}

impl PiecewisePoly {
    fn from_pieces(pieces: Vec<Vec<f64>>, stride: usize) -> Self {
        let mut coeffs = Vec::with_capacity(pieces.len() * stride);
        for p in pieces {
            let mut row = p;
            row.resize(stride, 0.0);
            coeffs.extend(row);
        }
        PiecewisePoly { coeffs, stride }
    }

    /// Cardinal B-spline of the given order, supported on `[0, order]`,
    /// built by the Cox-de Boor recursion in local piece coordinates.
    pub fn bspline(order: usize) -> Self {
        assert!(order >= 1);
        let mut pieces: Vec<Vec<f64>> = vec![vec![1.0]];
        for m in 2..=order {
            let mut next = Vec::with_capacity(m);
            for i in 0..m {
                // x B(x) + (m - x) B(x - 1), with x = i + t
                let mut p = vec![0.0; m];
                if i < pieces.len() {
                    for (d, &c) in pieces[i].iter().enumerate() {
                        p[d] += i as f64 * c;
                        p[d + 1] += c;
                    }
                }
                if i >= 1 {
                    for (d, &c) in pieces[i - 1].iter().enumerate() {
                        p[d] += (m - i) as f64 * c;
                        p[d + 1] -= c;
                    }
                }
                let scale = 1.0 / (m - 1) as f64;
                next.push(p.into_iter().map(|c| c * scale).collect());
            }
            pieces = next;
        }
        PiecewisePoly::from_pieces(pieces, order)
    }

    /// `Σ_n h_n f(x - n)`.
    pub fn filtered(&self, taps: &[f64]) -> Self {
        let n = self.num_pieces() + taps.len() - 1;
        let mut pieces = vec![vec![0.0; self.stride]; n];
        for (shift, &h) in taps.iter().enumerate() {
            for i in 0..self.num_pieces() {
                for (d, c) in self.piece(i).iter().enumerate() {
                    pieces[i + shift][d] += h * c;
                }
            }
        }
        PiecewisePoly::from_pieces(pieces, self.stride)
    }

    pub fn num_pieces(&self) -> usize {
        if self.stride == 0 {
            0
        } else {
            self.coeffs.len() / self.stride
        }
    }

    /// Coefficients of piece `i`, lowest degree first.
    #[inline]
    pub fn piece(&self, i: usize) -> &[f64] {
        &self.coeffs[i * self.stride..(i + 1) * self.stride]
    }

    #[inline]
    pub fn eval_piece(&self, i: usize, t: f64) -> f64 {
        horner(self.piece(i), t)
    }

    pub fn eval(&self, x: f64) -> f64 {
        if !(x >= 0.0) || x >= self.num_pieces() as f64 {
            return 0.0;
        }
        let i = x.floor() as usize;
        self.eval_piece(i, x - i as f64)
    }

    pub fn integral(&self) -> f64 {
        (0..self.num_pieces())
            .map(|i| self.piece(i).iter().enumerate().map(|(d, c)| c / (d + 1) as f64).sum::<f64>())
            .sum()
    }

    pub fn norm_sq(&self) -> f64 {
        let mut total = 0.0;
        for i in 0..self.num_pieces() {
            let p = self.piece(i);
            for (a, ca) in p.iter().enumerate() {
                for (b, cb) in p.iter().enumerate() {
                    total += ca * cb / (a + b + 1) as f64;
                }
            }
        }
        total
    }
}

#[inline]
pub(crate) fn horner(c: &[f64], t: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * t + a)
}
