use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::Csr;
use crate::{Error, Result};

/// Product Fock space with a per-mode cap `max_n` (inclusive).
///
/// Index layout is mixed radix with mode 0 most significant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FockSpace {
    pub n_modes: usize,
    pub max_n: usize,
}

impl FockSpace {
    pub fn new(n_modes: usize, max_n: usize) -> Self {
        Self { n_modes, max_n }
    }

    pub fn levels(&self) -> usize {
        self.max_n + 1
    }

    pub fn dim(&self) -> usize {
        let mut d = 1usize;
        for _ in 0..self.n_modes {
            d = d.saturating_mul(self.levels());
        }
        d
    }

    pub fn checked_dim(&self, matter_dim: usize) -> Result<usize> {
        let mut d = matter_dim;
        for _ in 0..self.n_modes {
            d = d
                .checked_mul(self.levels())
                .ok_or_else(|| Error::InvalidParameter("coupled dimension overflows".into()))?;
        }
        Ok(d)
    }

    fn stride(&self, mode: usize) -> usize {
        let mut s = 1;
        for _ in mode + 1..self.n_modes {
            s *= self.levels();
        }
        s
    }

    pub fn occupation(&self, index: usize, mode: usize) -> usize {
        (index / self.stride(mode)) % self.levels()
    }

    pub fn occupations(&self, index: usize) -> Vec<usize> {
        (0..self.n_modes).map(|m| self.occupation(index, m)).collect()
    }

    pub fn total(&self, index: usize) -> usize {
        (0..self.n_modes).map(|m| self.occupation(index, m)).sum()
    }

    pub fn index(&self, occ: &[usize]) -> usize {
        occ.iter().fold(0, |acc, &n| acc * self.levels() + n)
    }

    /// `b_mode` on the truncated space.
    pub fn annihilation(&self, mode: usize) -> Csr {
        let d = self.dim();
        let s = self.stride(mode);
        let mut t = Vec::new();
        for i in 0..d {
            let n = self.occupation(i, mode);
            if n > 0 {
                t.push((i - s, i, libm::sqrt(n as f64)));
            }
        }
        Csr::from_triplets(d, d, t).expect("ladder entries are in range")
    }

    pub fn creation(&self, mode: usize) -> Csr {
        self.annihilation(mode).transpose()
    }

    /// `b + b†`
    pub fn quadrature(&self, mode: usize) -> Csr {
        let a = self.annihilation(mode);
        a.add(&a.transpose()).expect("same shape")
    }

    /// `b† - b`, real antisymmetric.
    pub fn antisymmetric_quadrature(&self, mode: usize) -> Csr {
        let a = self.annihilation(mode);
        a.transpose().add(&a.scale(-1.0)).expect("same shape")
    }

    /// `Σ_β ω_β n_β` on the diagonal (no zero-point).
    pub fn energies(&self, omegas: &[f64]) -> Vec<f64> {
        (0..self.dim())
            .map(|i| (0..self.n_modes).map(|m| omegas[m] * self.occupation(i, m) as f64).sum())
            .collect()
    }

    pub fn number_diagonal(&self, mode: usize) -> Vec<f64> {
        (0..self.dim()).map(|i| self.occupation(i, mode) as f64).collect()
    }

    /// The same modes with one extra level, used to hold `b†ψ` exactly.
    pub fn extended(&self) -> Self {
        Self::new(self.n_modes, self.max_n + 1)
    }

    /// Index of a state of `self` inside `other` (which must be at least as large).
    pub fn embed(&self, index: usize, other: &Self) -> usize {
        other.index(&self.occupations(index))
    }

    pub fn vacuum_vector(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.dim()];
        v[0] = 1.0;
        v
    }
}
