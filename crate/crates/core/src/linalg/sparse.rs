//! Compressed sparse row matrices and sums of Kronecker products.

use alloc::vec;
use alloc::vec::Vec;

use super::{Scalar, SymmetricOperator};
use crate::{Error, Result};

/// Real sparse matrix in CSR layout.
#[derive(Debug, Clone, PartialEq)]
pub struct Csr {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl Csr {
    /// Builds from `(row, col, value)` triplets; duplicates are summed and
    /// exact zeros dropped.
    pub fn from_triplets(rows: usize, cols: usize, mut t: Vec<(usize, usize, f64)>) -> Result<Self> {
        if t.iter().any(|&(r, c, _)| r >= rows || c >= cols) {
            return Err(Error::Assembly("triplet outside matrix".into()));
        }
        t.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_ptr = vec![0usize; rows + 1];
        let mut col_idx = Vec::with_capacity(t.len());
        let mut values: Vec<f64> = Vec::with_capacity(t.len());
        let mut last: Option<(usize, usize)> = None;
        let mut row_of = Vec::with_capacity(t.len());
        for (r, c, v) in t {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(c);
                values.push(v);
                row_of.push(r);
                last = Some((r, c));
            }
        }
        let mut keep_c = Vec::with_capacity(col_idx.len());
        let mut keep_v = Vec::with_capacity(values.len());
        for ((r, c), v) in row_of.into_iter().zip(col_idx).zip(values) {
            if v != 0.0 {
                row_ptr[r + 1] += 1;
                keep_c.push(c);
                keep_v.push(v);
            }
        }
        for i in 0..rows {
            row_ptr[i + 1] += row_ptr[i];
        }
        Ok(Self {
            rows,
            cols,
            row_ptr,
            col_idx: keep_c,
            values: keep_v,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![1.0; n])
    }

    pub fn diagonal(d: &[f64]) -> Self {
        let t = d.iter().enumerate().map(|(i, &v)| (i, i, v)).collect();
        Self::from_triplets(d.len(), d.len(), t).expect("diagonal triplets are in range")
    }

    pub fn from_dense(m: &nalgebra::DMatrix<f64>, drop_below: f64) -> Self {
        let mut t = Vec::new();
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let v = m[(i, j)];
                if libm::fabs(v) > drop_below {
                    t.push((i, j, v));
                }
            }
        }
        Self::from_triplets(m.nrows(), m.ncols(), t).expect("dense entries are in range")
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut m = nalgebra::DMatrix::zeros(self.rows, self.cols);
        for (i, j, v) in self.iter() {
            m[(i, j)] += v;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[r.clone()].iter().copied().zip(self.values[r].iter().copied())
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.rows).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.row(i).filter(|&(c, _)| c == j).map(|(_, v)| v).sum()
    }

    pub fn transpose(&self) -> Self {
        let t = self.iter().map(|(i, j, v)| (j, i, v)).collect();
        Self::from_triplets(self.cols, self.rows, t).expect("transpose stays in range")
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= s);
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Assembly("shape mismatch in sparse add".into()));
        }
        let t = self.iter().chain(other.iter()).collect();
        Self::from_triplets(self.rows, self.cols, t)
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Assembly("shape mismatch in sparse product".into()));
        }
        let mut t = Vec::new();
        for i in 0..self.rows {
            for (k, a) in self.row(i) {
                for (j, b) in other.row(k) {
                    t.push((i, j, a * b));
                }
            }
        }
        Self::from_triplets(self.rows, other.cols, t)
    }

    /// Largest `|A - A^T|` entry.
    pub fn asymmetry(&self) -> f64 {
        self.iter()
            .map(|(i, j, v)| libm::fabs(v - self.get(j, i)))
            .fold(0.0, f64::max)
    }

    /// `y += s * A x`
    pub fn mul_add<T: Scalar>(&self, x: &[T], s: T, y: &mut [T]) {
        for i in 0..self.rows {
            let mut acc = T::zero();
            for (j, v) in self.row(i) {
                acc += x[j] * v;
            }
            y[i] += s.times(acc);
        }
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let mut t = Vec::with_capacity(self.nnz() * other.nnz());
        for (i, j, a) in self.iter() {
            for (k, l, b) in other.iter() {
                t.push((i * other.rows + k, j * other.cols + l, a * b));
            }
        }
        Self::from_triplets(self.rows * other.rows, self.cols * other.cols, t)
            .expect("kron stays in range")
    }
}

impl SymmetricOperator for Csr {
    fn dim(&self) -> usize {
        self.rows
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        self.mul_add(x, 1.0, y);
    }
}

/// One `A ⊗ B` term; `None` stands for the identity on that factor.
#[derive(Debug, Clone, PartialEq)]
pub struct KronTerm {
    pub matter: Option<Csr>,
    pub photon: Option<Csr>,
}

/// Operator `diag + Σ_t A_t ⊗ B_t` on a matter-major tensor layout,
/// index = matter * photon_dim + photon.
#[derive(Debug, Clone, PartialEq)]
pub struct KronSum {
    matter_dim: usize,
    photon_dim: usize,
    diagonal: Vec<f64>,
    terms: Vec<KronTerm>,
}

impl KronSum {
    pub fn new(matter_dim: usize, photon_dim: usize) -> Self {
        Self {
            matter_dim,
            photon_dim,
            diagonal: vec![0.0; matter_dim * photon_dim],
            terms: Vec::new(),
        }
    }

    pub fn matter_dim(&self) -> usize {
        self.matter_dim
    }

    pub fn photon_dim(&self) -> usize {
        self.photon_dim
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    pub fn terms(&self) -> &[KronTerm] {
        &self.terms
    }

    /// Adds `d_m ⊗ 1 + 1 ⊗ e_f` to the diagonal.
    pub fn add_separable_diagonal(&mut self, matter: Option<&[f64]>, photon: Option<&[f64]>) {
        let pd = self.photon_dim;
        for m in 0..self.matter_dim {
            for f in 0..pd {
                let mut v = 0.0;
                if let Some(d) = matter {
                    v += d[m];
                }
                if let Some(e) = photon {
                    v += e[f];
                }
                self.diagonal[m * pd + f] += v;
            }
        }
    }

    pub fn add_constant(&mut self, c: f64) {
        self.diagonal.iter_mut().for_each(|d| *d += c);
    }

    pub fn add_term(&mut self, matter: Option<Csr>, photon: Option<Csr>) -> Result<()> {
        if let Some(a) = &matter {
            if a.rows() != self.matter_dim || a.cols() != self.matter_dim {
                return Err(Error::Assembly("matter factor has wrong shape".into()));
            }
        }
        if let Some(b) = &photon {
            if b.rows() != self.photon_dim || b.cols() != self.photon_dim {
                return Err(Error::Assembly("photon factor has wrong shape".into()));
            }
        }
        if matter.is_none() && photon.is_none() {
            return Err(Error::Assembly("identity term belongs on the diagonal".into()));
        }
        self.terms.push(KronTerm { matter, photon });
        Ok(())
    }

    /// Largest asymmetry over all factors; zero for a correctly assembled
    /// Hermitian operator since every term is a product of symmetric or of
    /// two antisymmetric factors.
    pub fn check_symmetric(&self, tol: f64) -> Result<()> {
        for t in &self.terms {
            let sym = |c: &Option<Csr>| -> Option<(f64, f64)> {
                c.as_ref().map(|m| {
                    let s = m.asymmetry();
                    let a = m.iter().map(|(i, j, v)| libm::fabs(v + m.get(j, i))).fold(0.0, f64::max);
                    (s, a)
                })
            };
            let ok = match (sym(&t.matter), sym(&t.photon)) {
                (None, Some((s, _))) | (Some((s, _)), None) => s <= tol,
                (Some((s1, a1)), Some((s2, a2))) => (s1 <= tol && s2 <= tol) || (a1 <= tol && a2 <= tol),
                (None, None) => true,
            };
            if !ok {
                return Err(Error::Assembly("operator term is not Hermitian".into()));
            }
        }
        Ok(())
    }

    /// `y = H x` for real or complex amplitudes.
    pub fn apply_generic<T: Scalar>(&self, x: &[T], y: &mut [T]) {
        let pd = self.photon_dim;
        for ((yi, xi), d) in y.iter_mut().zip(x).zip(&self.diagonal) {
            *yi = *xi * *d;
        }
        let mut z = vec![T::zero(); pd];
        for term in &self.terms {
            match (&term.matter, &term.photon) {
                (Some(a), None) => {
                    for m in 0..self.matter_dim {
                        let yb = &mut y[m * pd..(m + 1) * pd];
                        for (mp, v) in a.row(m) {
                            let xb = &x[mp * pd..(mp + 1) * pd];
                            for (yy, xx) in yb.iter_mut().zip(xb) {
                                *yy += *xx * v;
                            }
                        }
                    }
                }
                (None, Some(b)) => {
                    for m in 0..self.matter_dim {
                        let xb = &x[m * pd..(m + 1) * pd];
                        let yb = &mut y[m * pd..(m + 1) * pd];
                        b.mul_add(xb, T::from_real(1.0), yb);
                    }
                }
                (Some(a), Some(b)) => {
                    for m in 0..self.matter_dim {
                        z.iter_mut().for_each(|v| *v = T::zero());
                        let mut any = false;
                        for (mp, v) in a.row(m) {
                            any = true;
                            let xb = &x[mp * pd..(mp + 1) * pd];
                            for (zz, xx) in z.iter_mut().zip(xb) {
                                *zz += *xx * v;
                            }
                        }
                        if any {
                            b.mul_add(&z, T::from_real(1.0), &mut y[m * pd..(m + 1) * pd]);
                        }
                    }
                }
                (None, None) => {}
            }
        }
    }

    /// Full sparse matrix; only for tests and small problems.
    pub fn to_csr(&self) -> Csr {
        let n = self.matter_dim * self.photon_dim;
        let mut acc = Csr::diagonal(&self.diagonal);
        for t in &self.terms {
            let a = t.matter.clone().unwrap_or_else(|| Csr::identity(self.matter_dim));
            let b = t.photon.clone().unwrap_or_else(|| Csr::identity(self.photon_dim));
            acc = acc.add(&a.kron(&b)).expect("kron terms share the full shape");
        }
        debug_assert_eq!(acc.rows(), n);
        acc
    }
}

impl SymmetricOperator for KronSum {
    fn dim(&self) -> usize {
        self.matter_dim * self.photon_dim
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.apply_generic(x, y)
    }
}
