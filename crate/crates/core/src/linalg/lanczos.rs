//! Thick-restart Lanczos for the lowest eigenpair of a real symmetric operator.
//!
//! The Krylov basis is kept fully orthogonal (classical Gram-Schmidt, applied
//! twice) and the images `A v` are stored next to it, so the projected matrix
//! and the Ritz residuals are formed directly instead of through the
//! three-term recurrence. On restart the basis is contracted onto the lowest
//! Ritz vectors.

use alloc::vec;
use alloc::vec::Vec;
use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{dot, fix_sign, normalize, Eigenpair, SymmetricOperator};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LanczosOptions {
    /// Maximum basis size before a restart.
    pub max_basis: usize,
    /// Ritz vectors kept across a restart.
    pub keep: usize,
    /// Convergence when `||A v - e v|| <= tol * max(1, |e|, norm estimate)`.
    pub tol: f64,
    pub max_matvecs: usize,
    pub seed: u64,
    /// Optional start vector; a seeded random vector otherwise.
    pub start: Option<Vec<f64>>,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self {
            max_basis: 60,
            keep: 12,
            tol: 1e-10,
            max_matvecs: 40_000,
            seed: 0x5eed_0001,
            start: None,
        }
    }
}

struct Basis {
    v: Vec<Vec<f64>>,
    av: Vec<Vec<f64>>,
    // lower triangle of the projected matrix, row j holds columns 0..=j
    t: Vec<Vec<f64>>,
}

impl Basis {
    fn orthogonalize(&self, w: &mut [f64]) {
        for _ in 0..2 {
            let coeffs: Vec<f64> = self.v.iter().map(|vi| dot(vi, w)).collect();
            for (c, vi) in coeffs.iter().zip(&self.v) {
                for (x, y) in w.iter_mut().zip(vi) {
                    *x -= c * y;
                }
            }
        }
    }

    fn push(&mut self, v: Vec<f64>, av: Vec<f64>) {
        self.v.push(v);
        self.av.push(av);
        self.extend_projection();
    }

    fn extend_projection(&mut self) {
        let j = self.t.len();
        let row = (0..=j)
            .map(|i| 0.5 * (dot(&self.v[i], &self.av[j]) + dot(&self.v[j], &self.av[i])))
            .collect();
        self.t.push(row);
    }

    fn projected(&self) -> DMatrix<f64> {
        let m = self.v.len();
        DMatrix::from_fn(m, m, |i, j| if i >= j { self.t[i][j] } else { self.t[j][i] })
    }

    fn combine(rows: &[Vec<f64>], coeffs: &[f64], n: usize) -> Vec<f64> {
        let mut out = vec![0.0; n];
        for (c, r) in coeffs.iter().zip(rows) {
            if *c != 0.0 {
                for (o, x) in out.iter_mut().zip(r) {
                    *o += c * x;
                }
            }
        }
        out
    }
}

fn random_vector(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n).map(|_| rng.random::<f64>() - 0.5).collect()
}

/// Lowest eigenpair by thick-restart Lanczos.
pub fn lanczos_lowest<A: SymmetricOperator + ?Sized>(
    op: &A,
    opts: &LanczosOptions,
) -> Result<Eigenpair> {
    let n = op.dim();
    if n == 0 {
        return Err(Error::InvalidParameter("empty operator".into()));
    }
    let max_basis = opts.max_basis.clamp(2, n.max(2));
    let keep = opts.keep.clamp(1, max_basis - 1);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    let mut basis = Basis {
        v: Vec::with_capacity(max_basis),
        av: Vec::with_capacity(max_basis),
        t: Vec::with_capacity(max_basis),
    };
    let mut next = match &opts.start {
        Some(s) if s.len() == n && s.iter().any(|x| *x != 0.0) => s.clone(),
        _ => random_vector(n, &mut rng),
    };
    normalize(&mut next);

    let mut matvecs = 0usize;
    let mut norm_est = 0.0_f64;
    let mut best = (f64::INFINITY, f64::INFINITY, Vec::new());

    loop {
        // expand
        let mut av = vec![0.0; n];
        op.apply(&next, &mut av);
        matvecs += 1;
        norm_est = norm_est.max(libm::sqrt(dot(&av, &av)));
        basis.push(next, av);

        let m = basis.v.len();
        let full = m >= max_basis || m >= n;
        let check = full || m % 8 == 0 || matvecs >= opts.max_matvecs;

        let mut candidate = basis.av[m - 1].clone();
        basis.orthogonalize(&mut candidate);
        let cand_norm = normalize(&mut candidate);
        let breakdown = cand_norm <= 1e-13 * norm_est.max(1.0);

        if check || breakdown {
            let eig = SymmetricEigen::new(basis.projected());
            let mut order: Vec<usize> = (0..m).collect();
            order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
            let i0 = order[0];
            let theta = eig.eigenvalues[i0];
            let y: Vec<f64> = eig.eigenvectors.column(i0).iter().copied().collect();
            let x = Basis::combine(&basis.v, &y, n);
            let ax = Basis::combine(&basis.av, &y, n);
            let xn = libm::sqrt(dot(&x, &x));
            let res = libm::sqrt(
                x.iter()
                    .zip(&ax)
                    .map(|(xi, axi)| {
                        let d = axi - theta * xi;
                        d * d
                    })
                    .sum::<f64>(),
            ) / xn;
            let target = opts.tol * norm_est.max(theta.abs()).max(1.0);
            if res < best.1 {
                best = (theta, res, x.clone());
            }
            if res <= target {
                let mut vector: Vec<f64> = x.iter().map(|v| v / xn).collect();
                fix_sign(&mut vector);
                return Ok(Eigenpair {
                    value: theta,
                    vector,
                    residual: res,
                    iterations: matvecs,
                });
            }
            if matvecs >= opts.max_matvecs {
                log::warn!("lanczos stopped at {matvecs} matvecs, residual {res:e}");
                return Err(Error::NotConverged {
                    iterations: matvecs,
                    residual: best.1,
                    target,
                });
            }
            if full {
                let k = keep.min(m - 1).max(1);
                let mut new_v = Vec::with_capacity(max_basis);
                let mut new_av = Vec::with_capacity(max_basis);
                for &idx in order.iter().take(k) {
                    let yk: Vec<f64> = eig.eigenvectors.column(idx).iter().copied().collect();
                    new_v.push(Basis::combine(&basis.v, &yk, n));
                    new_av.push(Basis::combine(&basis.av, &yk, n));
                }
                basis.v = new_v;
                basis.av = new_av;
                // re-orthogonalize the contracted basis against drift
                for i in 0..basis.v.len() {
                    for j in 0..i {
                        let c = dot(&basis.v[j], &basis.v[i]);
                        let (head, tail) = basis.v.split_at_mut(i);
                        for (a, b) in tail[0].iter_mut().zip(&head[j]) {
                            *a -= c * b;
                        }
                        let (head_av, tail_av) = basis.av.split_at_mut(i);
                        for (a, b) in tail_av[0].iter_mut().zip(&head_av[j]) {
                            *a -= c * b;
                        }
                    }
                    let nrm = libm::sqrt(dot(&basis.v[i], &basis.v[i]));
                    basis.v[i].iter_mut().for_each(|a| *a /= nrm);
                    basis.av[i].iter_mut().for_each(|a| *a /= nrm);
                }
                basis.t.clear();
                for _ in 0..basis.v.len() {
                    basis.extend_projection();
                }
                // the last Lanczos direction stays orthogonal to the kept Ritz vectors
                if breakdown {
                    candidate = random_vector(n, &mut rng);
                }
                basis.orthogonalize(&mut candidate);
                if normalize(&mut candidate) <= 1e-300 {
                    candidate = random_vector(n, &mut rng);
                    basis.orthogonalize(&mut candidate);
                    normalize(&mut candidate);
                }
            } else if breakdown {
                candidate = random_vector(n, &mut rng);
                basis.orthogonalize(&mut candidate);
                normalize(&mut candidate);
            }
        }
        next = candidate;
    }
}
