use alloc::vec::Vec;

use crate::grid::{self, FdOrder, Grid1D, PlaneWaveBasis, Potential1D};
use crate::linalg::{self, Csr, Eigenpair, LanczosOptions};
use crate::Result;

/// Representation of the single-electron Hilbert space.
///
/// Dirichlet grids use finite differences in real space. Periodic grids use
/// the plane waves of their k-points, so the momentum is diagonal and the
/// kinetic energy is exactly `k²/2`.
#[derive(Debug, Clone, PartialEq)]
pub enum MatterSpace {
    RealSpace { grid: Grid1D, order: FdOrder },
    PlaneWaves { grid: Grid1D, basis: PlaneWaveBasis },
}

/// The momentum operator in a given representation.
#[derive(Debug, Clone, PartialEq)]
pub enum Momentum {
    /// `p = -i D` with `D` real antisymmetric.
    Derivative(Csr),
    /// `p` real symmetric (diagonal in plane waves).
    Real(Csr),
}

impl MatterSpace {
    pub fn new(grid: &Grid1D, order: FdOrder) -> Result<Self> {
        if grid.is_periodic() {
            Ok(MatterSpace::PlaneWaves {
                grid: grid.clone(),
                basis: PlaneWaveBasis::new(grid)?,
            })
        } else {
            Ok(MatterSpace::RealSpace {
                grid: grid.clone(),
                order,
            })
        }
    }

    pub fn grid(&self) -> &Grid1D {
        match self {
            MatterSpace::RealSpace { grid, .. } | MatterSpace::PlaneWaves { grid, .. } => grid,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            MatterSpace::RealSpace { grid, .. } => grid.n_points(),
            MatterSpace::PlaneWaves { basis, .. } => basis.len(),
        }
    }

    pub fn is_real_space(&self) -> bool {
        matches!(self, MatterSpace::RealSpace { .. })
    }

    /// `-(scale/2) ∂²`
    pub fn kinetic(&self, scale: f64) -> Csr {
        match self {
            MatterSpace::RealSpace { grid, order } => grid::laplacian(grid, *order).scale(-0.5 * scale),
            MatterSpace::PlaneWaves { basis, .. } => {
                Csr::diagonal(&basis.k().iter().map(|k| 0.5 * scale * k * k).collect::<Vec<_>>())
            }
        }
    }

    /// `p²` in the representation (the discrete `-∂²` on grids).
    pub fn momentum_squared(&self) -> Csr {
        self.kinetic(2.0)
    }

    pub fn momentum(&self) -> Momentum {
        match self {
            MatterSpace::RealSpace { grid, order } => Momentum::Derivative(grid::first_derivative(grid, *order)),
            MatterSpace::PlaneWaves { basis, .. } => Momentum::Real(Csr::diagonal(basis.k())),
        }
    }

    /// Potential operator: diagonal on grids, `v̂(k - k')` in plane waves.
    pub fn potential(&self, v: &Potential1D) -> Result<Csr> {
        match self {
            MatterSpace::RealSpace { .. } => Ok(Csr::diagonal(&v.values)),
            MatterSpace::PlaneWaves { grid, basis } => {
                let vq = basis.potential_fourier(grid, v)?;
                let n = basis.len();
                let mut t = Vec::with_capacity(n * n);
                for i in 0..n {
                    for j in 0..n {
                        t.push((i, j, vq[i + n - 1 - j]));
                    }
                }
                Csr::from_triplets(n, n, t)
            }
        }
    }

    /// Position on grid points; `None` for plane waves.
    pub fn position(&self) -> Option<Vec<f64>> {
        match self {
            MatterSpace::RealSpace { grid, .. } => Some(grid.coordinates()),
            MatterSpace::PlaneWaves { .. } => None,
        }
    }

    /// `-(s/2)∂² + v`
    pub fn hamiltonian(&self, v: &Potential1D, kinetic_scale: f64) -> Result<Csr> {
        self.kinetic(kinetic_scale).add(&self.potential(v)?)
    }

    /// Lowest eigenpair of `-(s/2)∂² + v`; dirichlet grids use the banded solver.
    pub fn ground_state(&self, v: &Potential1D, kinetic_scale: f64) -> Result<Eigenpair> {
        self.eigenpair(v, kinetic_scale, 0)
    }

    /// `index`-th eigenpair of `-(s/2)∂² + v`.
    pub fn eigenpair(&self, v: &Potential1D, kinetic_scale: f64, index: usize) -> Result<Eigenpair> {
        match self {
            MatterSpace::RealSpace { grid, order } if !grid.is_periodic() => {
                grid::kinetic_plus_potential_banded(grid, *order, kinetic_scale, &v.values)?.eigenpair(index)
            }
            _ => {
                let h = self.hamiltonian(v, kinetic_scale)?;
                if index == 0 {
                    linalg::lowest_eigenpair(&h, &LanczosOptions::default())
                } else {
                    Ok(linalg::dense_eigenpair(&h, index))
                }
            }
        }
    }
}
