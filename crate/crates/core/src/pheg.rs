//! Basis of the photon-coupled homogeneous electron gas: plane waves times
//! number states of the shifted dressed ladders `c_β = b_β + β_β(k)`.

use alloc::vec;
use alloc::vec::Vec;

use crate::exact_qed::{ladder_norm, FockSpace, ModeSet, SolveOptions};
use crate::grid::{Grid1D, PlaneWaveBasis, Potential1D};
use crate::linalg::{lowest_eigenpair, Csr};
use crate::{Error, Result};

/// Treatment of the external potential.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum PotentialMode {
    /// Full displaced-number-state overlaps in every photon sector.
    #[default]
    Raw,
    /// Vacuum sector only, `v̂(k-k')` damped by `exp(-δ²/2)`.
    Mollified00,
    /// Vacuum sector only with the bare `v̂(k-k')` (the photon-free limit).
    Unmollified00,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhegElement {
    pub k: f64,
    pub n: Vec<usize>,
    /// `β_β(k)` of every dressed mode.
    pub beta: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhegBasis {
    pub k: Vec<f64>,
    pub fock: FockSpace,
    /// `β_β(k) = shift[β] k`.
    pub shift: Vec<f64>,
}

impl PhegBasis {
    pub fn len(&self) -> usize {
        self.k.len() * self.fock.dim()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn element(&self, index: usize) -> PhegElement {
        let pd = self.fock.dim();
        let k = self.k[index / pd];
        PhegElement {
            k,
            n: self.fock.occupations(index % pd),
            beta: self.shift.iter().map(|s| s * k).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhegHamiltonian {
    pub basis: PhegBasis,
    pub matrix: Csr,
    /// Real Fourier coefficients `v̂(q)` for `q` offsets `-(N-1)..=N-1`.
    pub potential_fourier: Vec<f64>,
    pub modes: ModeSet,
    pub mode: PotentialMode,
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| libm::log(k as f64)).sum()
}

/// Generalized Laguerre polynomial `L_n^{(a)}(x)` by the three-term recurrence.
fn laguerre(n: usize, a: usize, x: f64) -> f64 {
    let a = a as f64;
    let (mut l0, mut l1) = (1.0, 1.0 + a - x);
    if n == 0 {
        return l0;
    }
    for k in 1..n {
        let kf = k as f64;
        let l2 = ((2.0 * kf + 1.0 + a - x) * l1 - (kf + a) * l0) / (kf + 1.0);
        l0 = l1;
        l1 = l2;
    }
    l1
}

/// `⟨n| D(δ) |n'⟩` for a real displacement `δ`.
pub fn displaced_overlap(n: usize, n_prime: usize, delta: f64) -> f64 {
    if n < n_prime {
        // ⟨n|D(δ)|n'⟩ = ⟨n'|D(-δ)|n⟩ for real matrix elements
        return displaced_overlap(n_prime, n, -delta);
    }
    let m = n - n_prime;
    let x = delta * delta;
    let lag = laguerre(n_prime, m, x);
    if delta == 0.0 {
        return if m == 0 { lag } else { 0.0 };
    }
    let mag = libm::exp(0.5 * (ln_factorial(n_prime) - ln_factorial(n)) + m as f64 * libm::log(libm::fabs(delta)) - 0.5 * x);
    let sign = if delta < 0.0 && m % 2 == 1 { -1.0 } else { 1.0 };
    sign * mag * lag
}

/// Hamiltonian in the pHEG basis on the k-points of a periodic grid.
///
/// `Mollified00` and `Unmollified00` use the vacuum sector only and ignore `max_n`.
pub fn build_pheg_hamiltonian(
    grid: &Grid1D,
    v: &Potential1D,
    modes: &ModeSet,
    max_n: usize,
    mode: PotentialMode,
) -> Result<PhegHamiltonian> {
    grid.require_periodic("the pHEG basis")?;
    if modes.n_electrons != 1 {
        return Err(Error::Unsupported("the pHEG basis is implemented for one particle".into()));
    }
    let pw = PlaneWaveBasis::new(grid)?;
    let vq = pw.potential_fourier(grid, v)?;
    let nk = pw.len();
    let max_n = if mode == PotentialMode::Raw { max_n } else { 0 };
    let fock = FockSpace::new(modes.len(), max_n);
    let pd = fock.checked_dim(1)?;
    fock.checked_dim(nk)?;
    let shift = modes.shift_coefficients();
    let k = pw.k().to_vec();
    let occ: Vec<Vec<usize>> = (0..pd).map(|i| fock.occupations(i)).collect();
    let mut trip = Vec::new();
    for (a, &ka) in k.iter().enumerate() {
        for (b, &kb) in k.iter().enumerate() {
            let vab = vq[a + nk - 1 - b];
            let deltas: Vec<f64> = shift.iter().map(|s| s * (ka - kb)).collect();
            for i in 0..pd {
                for j in 0..pd {
                    let f = match mode {
                        PotentialMode::Unmollified00 => 1.0,
                        _ => occ[i]
                            .iter()
                            .zip(&occ[j])
                            .zip(&deltas)
                            .map(|((n, np), d)| displaced_overlap(*n, *np, *d))
                            .product(),
                    };
                    let mut h = vab * f;
                    if a == b && i == j {
                        h += 0.5 * ka * ka;
                        for (beta, (s, w)) in shift.iter().zip(&modes.dressed_omegas).enumerate() {
                            let bk = s * ka;
                            h += w * (occ[i][beta] as f64 + 0.5) - w * bk * bk;
                        }
                    }
                    if h != 0.0 {
                        trip.push((a * pd + i, b * pd + j, h));
                    }
                }
            }
        }
    }
    let matrix = Csr::from_triplets(nk * pd, nk * pd, trip)?;
    Ok(PhegHamiltonian {
        basis: PhegBasis { k, fock, shift },
        matrix,
        potential_fourier: vq,
        modes: modes.clone(),
        mode,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhegGroundState {
    pub energy: f64,
    pub raw_energy: f64,
    pub amplitudes: Vec<f64>,
    pub residual: f64,
}

pub fn pheg_ground_state(h: &PhegHamiltonian, opts: &SolveOptions) -> Result<PhegGroundState> {
    let pair = lowest_eigenpair(&h.matrix, &opts.lanczos)?;
    let energy = if opts.include_zero_point {
        pair.value
    } else {
        pair.value - h.modes.zero_point_dressed()
    };
    Ok(PhegGroundState {
        energy,
        raw_energy: pair.value,
        amplitudes: pair.vector,
        residual: pair.residual,
    })
}

/// Photon-number evaluation in the pHEG basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum PhotonNumberMode {
    /// Full back transformation `a_α = Σ_β U_βα (s₊ c + s₋ c† - (s₊+s₋) β)`.
    #[default]
    BackTransform,
    /// The coherent part `(ω/ω̃)⟨β̂²⟩` alone.
    Adiabatic,
}

/// Physical photon number of every bare mode.
pub fn pheg_photon_number(h: &PhegHamiltonian, amplitudes: &[f64], mode: PhotonNumberMode) -> Result<Vec<f64>> {
    if amplitudes.len() != h.basis.len() {
        return Err(Error::InvalidParameter("amplitudes do not match the basis".into()));
    }
    let modes = &h.modes;
    let nk = h.basis.k.len();
    let pd = h.basis.fock.dim();
    Ok((0..modes.len())
        .map(|alpha| {
            let mix = modes.ladder_mixing(alpha);
            let d: Vec<f64> = h
                .basis
                .k
                .iter()
                .map(|k| -mix.iter().zip(&h.basis.shift).map(|((p, m), s)| (p + m) * s * k).sum::<f64>())
                .collect();
            match mode {
                PhotonNumberMode::BackTransform => ladder_norm(amplitudes, nk, &h.basis.fock, &mix, Some(&d)),
                PhotonNumberMode::Adiabatic => (0..nk)
                    .map(|m| d[m] * d[m] * amplitudes[m * pd..(m + 1) * pd].iter().map(|c| c * c).sum::<f64>())
                    .sum(),
            }
        })
        .collect())
}

/// Probability of each total excitation number of the shifted ladders.
pub fn pheg_excitation_distribution(h: &PhegHamiltonian, amplitudes: &[f64]) -> Vec<f64> {
    let f = &h.basis.fock;
    let pd = f.dim();
    let mut out = vec![0.0; f.n_modes * f.max_n + 1];
    for (i, c) in amplitudes.iter().enumerate() {
        out[f.total(i % pd)] += c * c;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Boundary;
    use nalgebra::DMatrix;

    /// `exp(δ (b† - b))` on a truncated oscillator by scaling and squaring.
    fn displacement_matrix(levels: usize, delta: f64) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(levels, levels);
        for n in 1..levels {
            let s = libm::sqrt(n as f64);
            a[(n, n - 1)] = delta * s;
            a[(n - 1, n)] = -delta * s;
        }
        let squarings = 8;
        let a = a / libm::pow(2.0, squarings as f64);
        let mut term = DMatrix::identity(levels, levels);
        let mut sum = term.clone();
        for k in 1..30 {
            term = &term * &a / k as f64;
            sum += &term;
        }
        for _ in 0..squarings {
            sum = &sum * &sum;
        }
        sum
    }

    #[test]
    fn overlaps_match_matrix_exponential() {
        let d = displacement_matrix(60, 0.3);
        assert!((displaced_overlap(1, 0, 0.3) - d[(1, 0)]).abs() < 1e-10);
        for (n, m) in [(0, 0), (3, 1), (1, 3), (5, 5), (7, 2)] {
            assert!((displaced_overlap(n, m, 0.3) - d[(n, m)]).abs() < 1e-10, "{n} {m}");
        }
        let d = displacement_matrix(80, -1.7);
        for (n, m) in [(0, 4), (4, 0), (6, 3), (10, 10)] {
            assert!((displaced_overlap(n, m, -1.7) - d[(n, m)]).abs() < 1e-10, "{n} {m}");
        }
    }

    #[test]
    fn zero_displacement_is_identity() {
        assert_eq!(displaced_overlap(0, 0, 0.0), 1.0);
        assert_eq!(displaced_overlap(4, 4, 0.0), 1.0);
        assert_eq!(displaced_overlap(4, 2, 0.0), 0.0);
        assert!((displaced_overlap(0, 0, 0.8) - libm::exp(-0.32)).abs() < 1e-15);
    }

    #[test]
    fn free_gas_is_diagonal() {
        let g = Grid1D::new(15, 0.5, Boundary::Periodic).unwrap();
        let modes = ModeSet::single(0.5, 0.7).unwrap();
        let h = build_pheg_hamiltonian(&g, &Potential1D::zero(&g), &modes, 3, PotentialMode::Raw).unwrap();
        for (i, j, _) in h.matrix.iter() {
            assert_eq!(i, j);
        }
        let gs = pheg_ground_state(&h, &SolveOptions::default()).unwrap();
        assert!(gs.energy.abs() < 1e-12);
    }

    #[test]
    fn vacuum_sector_modes_share_the_kinetic_part() {
        let g = Grid1D::new(21, 0.4, Boundary::Periodic).unwrap();
        let v = Potential1D::soft_coulomb(&g, 1.0).unwrap();
        let modes = ModeSet::single(0.4, 0.5).unwrap();
        let raw0 = build_pheg_hamiltonian(&g, &v, &modes, 0, PotentialMode::Raw).unwrap();
        let mol = build_pheg_hamiltonian(&g, &v, &modes, 5, PotentialMode::Mollified00).unwrap();
        assert_eq!(mol.basis.len(), 21);
        assert!(raw0.matrix.add(&mol.matrix.scale(-1.0)).unwrap().iter().all(|(_, _, x)| x.abs() < 1e-15));
    }

    #[test]
    fn rejects_dirichlet_grid() {
        let g = Grid1D::new(21, 0.4, Boundary::Dirichlet).unwrap();
        let r = build_pheg_hamiltonian(&g, &Potential1D::zero(&g), &ModeSet::single(0.4, 0.5).unwrap(), 1, PotentialMode::Raw);
        assert!(matches!(r, Err(Error::BoundaryMismatch(_))));
    }
}
