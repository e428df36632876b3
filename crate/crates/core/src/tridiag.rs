//! Symmetric tridiagonal eigenpairs: Sturm-sequence bisection for the
//! eigenvalues, inverse iteration for the eigenvectors.

/// Symmetric tridiagonal matrix with diagonal `diag` and off-diagonal `off`
/// (`off[i]` couples rows `i` and `i + 1`).
#[derive(Debug, Clone)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    fn norm_bound(&self) -> f64 {
        let n = self.len();
        (0..n)
            .map(|i| {
                let l = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
                let r = if i + 1 < n { self.off[i].abs() } else { 0.0 };
                self.diag[i].abs() + l + r
            })
            .fold(0.0, f64::max)
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn count_below(&self, x: f64) -> usize {
        let tiny = f64::MIN_POSITIVE.sqrt();
        let mut count = 0;
        let mut q = self.diag[0] - x;
        for i in 0..self.len() {
            if i > 0 {
                let e = self.off[i - 1];
                q = self.diag[i] - x - e * e / q;
            }
            if q == 0.0 {
                q = -tiny;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `k`-th smallest eigenvalue (0-based) by bisection.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        let norm = self.norm_bound();
        let (mut lo, mut hi) = (-norm - 1.0, norm + 1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 2.0 * f64::EPSILON * (lo.abs().max(hi.abs()) + 1e-3 * norm) {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    /// Unit-norm eigenvector for the eigenvalue `lambda`.
    pub fn eigenvector(&self, lambda: f64) -> Vec<f64> {
        let n = self.len();
        let norm = self.norm_bound();
        let shift = lambda + 4.0 * f64::EPSILON * norm;
        let lu = PivotedLu::factor(self, shift, f64::EPSILON * norm);
        // Deterministic, non-special start vector.
        let mut x: Vec<f64> = (0..n)
            .map(|i| 1.0 + 0.5 * ((i as f64) * 0.618_033_988_749_894_9).fract())
            .collect();
        for _ in 0..3 {
            lu.solve(&mut x);
            let s = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            x.iter_mut().for_each(|v| *v /= s);
        }
        x
    }
}

/// LU factorization of `T - shift I` with partial pivoting; `U` carries two
/// super-diagonals of fill.
struct PivotedLu {
    upper: Vec<[f64; 3]>,
    multipliers: Vec<f64>,
    swapped: Vec<bool>,
}

impl PivotedLu {
    fn factor(t: &SymTridiagonal, shift: f64, tiny: f64) -> Self {
        let n = t.len();
        let mut upper = vec![[0.0; 3]; n];
        let mut multipliers = vec![0.0; n.saturating_sub(1)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        let mut cur = [t.diag[0] - shift, if n > 1 { t.off[0] } else { 0.0 }, 0.0];
        for k in 0..n.saturating_sub(1) {
            let next = [
                t.off[k],
                t.diag[k + 1] - shift,
                if k + 2 < n { t.off[k + 1] } else { 0.0 },
            ];
            let (mut pivot, other) = if next[0].abs() > cur[0].abs() {
                swapped[k] = true;
                (next, cur)
            } else {
                (cur, next)
            };
            if pivot[0] == 0.0 {
                pivot[0] = tiny;
            }
            let m = other[0] / pivot[0];
            multipliers[k] = m;
            upper[k] = pivot;
            cur = [other[1] - m * pivot[1], other[2] - m * pivot[2], 0.0];
        }
        if cur[0] == 0.0 {
            cur[0] = tiny;
        }
        upper[n - 1] = cur;
        PivotedLu {
            upper,
            multipliers,
            swapped,
        }
    }

    fn solve(&self, b: &mut [f64]) {
        let n = b.len();
        for k in 0..n - 1 {
            if self.swapped[k] {
                b.swap(k, k + 1);
            }
            b[k + 1] -= self.multipliers[k] * b[k];
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            if i + 1 < n {
                s -= self.upper[i][1] * b[i + 1];
            }
            if i + 2 < n {
                s -= self.upper[i][2] * b[i + 2];
            }
            b[i] = s / self.upper[i][0];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian(n: usize) -> SymTridiagonal {
        SymTridiagonal {
            diag: vec![2.0; n],
            off: vec![-1.0; n - 1],
        }
    }

    #[test]
    fn dirichlet_laplacian_spectrum() {
        let n = 50;
        let t = laplacian(n);
        for k in 0..n {
            let exact = 2.0 - 2.0 * (std::f64::consts::PI * (k + 1) as f64 / (n + 1) as f64).cos();
            assert!((t.eigenvalue(k) - exact).abs() < 1e-13, "k={k}");
        }
    }

    #[test]
    fn eigenvectors_satisfy_equation() {
        let t = laplacian(40);
        for k in [0, 7, 39] {
            let lam = t.eigenvalue(k);
            let v = t.eigenvector(lam);
            let n = v.len();
            for i in 0..n {
                let mut av = t.diag[i] * v[i];
                if i > 0 {
                    av += t.off[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    av += t.off[i] * v[i + 1];
                }
                assert!((av - lam * v[i]).abs() < 1e-10);
            }
        }
    }
}
