//! Symmetric banded matrices: Sturm-count bisection and inverse iteration.
//!
//! Matter-only grid Hamiltonians have half-bandwidth 1 or 2 (periodic wraps
//! excluded), so an unpivoted LDL^T of `A - s I` is O(n) and its negative
//! pivots count the eigenvalues below `s`.

use alloc::vec;
use alloc::vec::Vec;

use super::{fix_sign, normalize, residual_norm, Eigenpair, SymmetricOperator};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct BandedSymmetric {
    n: usize,
    bw: usize,
    // bands[d][i] = A[i][i + d]
    bands: Vec<Vec<f64>>,
}

struct Ldl {
    d: Vec<f64>,
    // l[i][k] = L[i][i - 1 - k]
    l: Vec<Vec<f64>>,
    negatives: usize,
}

impl BandedSymmetric {
    pub fn zeros(n: usize, bw: usize) -> Self {
        let bands = (0..=bw).map(|d| vec![0.0; n.saturating_sub(d)]).collect();
        Self { n, bw, bands }
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        let d = j - i;
        if d > self.bw {
            0.0
        } else {
            self.bands[d][i]
        }
    }

    /// Adds `v` to `A[i][j]` (and its mirror).
    pub fn add(&mut self, i: usize, j: usize, v: f64) -> Result<()> {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        let d = j - i;
        if d > self.bw || j >= self.n {
            return Err(Error::Assembly("entry outside band".into()));
        }
        self.bands[d][i] += v;
        Ok(())
    }

    pub fn add_diagonal(&mut self, diag: &[f64]) {
        for (a, b) in self.bands[0].iter_mut().zip(diag) {
            *a += b;
        }
    }

    fn gershgorin(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..self.n {
            let mut r = 0.0;
            for d in 1..=self.bw {
                if i + d < self.n {
                    r += libm::fabs(self.bands[d][i]);
                }
                if i >= d {
                    r += libm::fabs(self.bands[d][i - d]);
                }
            }
            let c = self.bands[0][i];
            lo = lo.min(c - r);
            hi = hi.max(c + r);
        }
        (lo, hi)
    }

    fn factor(&self, shift: f64) -> Ldl {
        let n = self.n;
        let bw = self.bw;
        let (glo, ghi) = self.gershgorin();
        let tiny = f64::EPSILON * (glo.abs().max(ghi.abs()).max(1.0)) * 1e-3;
        let mut d = vec![0.0; n];
        let mut l = vec![vec![0.0; bw]; n];
        let mut negatives = 0;
        for j in 0..n {
            let mut djj = self.bands[0][j] - shift;
            for k in j.saturating_sub(bw)..j {
                let ljk = l[j][j - 1 - k];
                djj -= ljk * ljk * d[k];
            }
            if djj == 0.0 || libm::fabs(djj) < tiny {
                djj = -tiny;
            }
            if djj < 0.0 {
                negatives += 1;
            }
            d[j] = djj;
            for i in (j + 1)..n.min(j + bw + 1) {
                let mut a = self.bands[i - j][j];
                for k in i.saturating_sub(bw)..j {
                    a -= l[i][i - 1 - k] * l[j][j - 1 - k] * d[k];
                }
                l[i][i - 1 - j] = a / djj;
            }
        }
        Ldl { d, l, negatives }
    }

    /// Number of eigenvalues strictly below `shift`.
    pub fn count_below(&self, shift: f64) -> usize {
        self.factor(shift).negatives
    }

    fn solve_factored(&self, f: &Ldl, rhs: &mut [f64]) {
        let n = self.n;
        let bw = self.bw;
        for i in 0..n {
            let mut s = rhs[i];
            for k in i.saturating_sub(bw)..i {
                s -= f.l[i][i - 1 - k] * rhs[k];
            }
            rhs[i] = s;
        }
        for i in 0..n {
            rhs[i] /= f.d[i];
        }
        for i in (0..n).rev() {
            let mut s = rhs[i];
            for k in (i + 1)..n.min(i + bw + 1) {
                s -= f.l[k][k - 1 - i] * rhs[k];
            }
            rhs[i] = s;
        }
    }

    /// The `index`-th eigenvalue (0 = lowest) by bisection on the inertia.
    pub fn eigenvalue(&self, index: usize) -> Result<f64> {
        if index >= self.n {
            return Err(Error::InvalidParameter("eigenvalue index out of range".into()));
        }
        let (mut lo, mut hi) = self.gershgorin();
        let scale = lo.abs().max(hi.abs()).max(1.0);
        lo -= 1e-8 * scale;
        hi += 1e-8 * scale;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi || hi - lo <= 2.0 * f64::EPSILON * scale {
                break;
            }
            if self.count_below(mid) > index {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// The `index`-th eigenpair; the vector comes from inverse iteration.
    pub fn eigenpair(&self, index: usize) -> Result<Eigenpair> {
        let lambda = self.eigenvalue(index)?;
        let (glo, ghi) = self.gershgorin();
        let scale = glo.abs().max(ghi.abs()).max(1.0);
        // a shift just off the eigenvalue keeps the factorization finite
        let f = self.factor(lambda - 64.0 * f64::EPSILON * scale);
        let mut v: Vec<f64> = (0..self.n)
            .map(|i| 1.0 + 0.25 * libm::sin(0.7 * i as f64 + 0.3))
            .collect();
        normalize(&mut v);
        let mut value = lambda;
        let mut residual = f64::INFINITY;
        let mut iterations = 0;
        for it in 0..8 {
            self.solve_factored(&f, &mut v);
            normalize(&mut v);
            let mut av = vec![0.0; self.n];
            self.apply(&v, &mut av);
            value = super::dot(&v, &av);
            residual = residual_norm(self, &v, value);
            iterations = it + 1;
            if residual <= 1e-13 * scale {
                break;
            }
        }
        fix_sign(&mut v);
        Ok(Eigenpair {
            value,
            vector: v,
            residual,
            iterations,
        })
    }
}

impl SymmetricOperator for BandedSymmetric {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let n = self.n;
        for i in 0..n {
            y[i] = self.bands[0][i] * x[i];
        }
        for d in 1..=self.bw {
            let band = &self.bands[d];
            for i in 0..n.saturating_sub(d) {
                let a = band[i];
                y[i] += a * x[i + d];
                y[i + d] += a * x[i];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dense_lowest;

    fn chain(n: usize) -> BandedSymmetric {
        let mut m = BandedSymmetric::zeros(n, 1);
        for i in 0..n {
            m.add(i, i, 2.0).unwrap();
            if i + 1 < n {
                m.add(i, i + 1, -1.0).unwrap();
            }
        }
        m
    }

    #[test]
    fn chain_eigenvalues_are_analytic() {
        // eigenvalues of tridiag(-1, 2, -1): 2 - 2 cos(k pi / (n + 1))
        let n = 50;
        let m = chain(n);
        for k in [0usize, 1, 7, 49] {
            let exact = 2.0 - 2.0 * libm::cos((k + 1) as f64 * core::f64::consts::PI / (n + 1) as f64);
            let got = m.eigenvalue(k).unwrap();
            assert!((got - exact).abs() < 1e-13, "{k}: {got} vs {exact}");
        }
    }

    #[test]
    fn pentadiagonal_matches_dense() {
        let n = 80;
        let mut m = BandedSymmetric::zeros(n, 2);
        for i in 0..n {
            let x = i as f64 - 40.0;
            m.add(i, i, 2.5 + 0.001 * x * x).unwrap();
            if i + 1 < n {
                m.add(i, i + 1, -4.0 / 3.0).unwrap();
            }
            if i + 2 < n {
                m.add(i, i + 2, 1.0 / 12.0).unwrap();
            }
        }
        let d = dense_lowest(&m);
        let b = m.eigenpair(0).unwrap();
        assert!((d.value - b.value).abs() < 1e-12);
        assert!(b.residual < 1e-11);
        let ov: f64 = d.vector.iter().zip(&b.vector).map(|(a, c)| a * c).sum();
        assert!((ov - 1.0).abs() < 1e-10);
    }

    #[test]
    fn rejects_out_of_band_entries() {
        let mut m = BandedSymmetric::zeros(5, 1);
        assert!(m.add(0, 2, 1.0).is_err());
        assert!(m.eigenvalue(5).is_err());
    }
}
