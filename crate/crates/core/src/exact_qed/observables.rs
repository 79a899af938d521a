use alloc::vec;
use alloc::vec::Vec;

use super::fock::FockSpace;
use super::hamiltonian::{CoupledHamiltonian, PhotonFrame};
use crate::linalg::Scalar;
use crate::{Error, Result};

/// `‖Σ_β (c₊_β b_β + c₋_β b_β†) ψ + d(m) ψ‖²` for a state on `matter ⊗ fock`.
///
/// `b†ψ` is built in a Fock space with one extra level, so the result is
/// exact for the truncated state.
pub fn ladder_norm<T: Scalar>(
    psi: &[T],
    matter_dim: usize,
    fock: &FockSpace,
    mixing: &[(f64, f64)],
    shift: Option<&[f64]>,
) -> f64 {
    let pd = fock.dim();
    let ext = fock.extended();
    let ed = ext.dim();
    let strides: Vec<usize> = (0..fock.n_modes)
        .map(|b| (b + 1..fock.n_modes).fold(1, |s, _| s * ext.levels()))
        .collect();
    let mut out = vec![T::zero(); matter_dim * ed];
    for m in 0..matter_dim {
        let d = shift.map_or(0.0, |s| s[m]);
        for i in 0..pd {
            let c = psi[m * pd + i];
            let base = m * ed + fock.embed(i, &ext);
            if d != 0.0 {
                out[base] += c * d;
            }
            for (b, &(cp, cm)) in mixing.iter().enumerate() {
                let n = fock.occupation(i, b);
                if n > 0 && cp != 0.0 {
                    out[base - strides[b]] += c * (cp * libm::sqrt(n as f64));
                }
                if cm != 0.0 {
                    out[base + strides[b]] += c * (cm * libm::sqrt((n + 1) as f64));
                }
            }
        }
    }
    crate::linalg::norm_sqr(&out)
}

/// Physical photon number `⟨a_α† a_α⟩` of bare mode α.
pub fn photon_number<T: Scalar>(h: &CoupledHamiltonian, psi: &[T], alpha: usize) -> Result<f64> {
    if alpha >= h.modes.len() {
        return Err(Error::InvalidParameter("mode index out of range".into()));
    }
    check_len(h, psi.len())?;
    let md = h.op.matter_dim();
    let n = h.modes.len();
    match h.frame {
        PhotonFrame::Bare => {
            let mut mix = vec![(0.0, 0.0); n];
            mix[alpha] = (1.0, 0.0);
            Ok(ladder_norm(psi, md, &h.fock, &mix, None))
        }
        PhotonFrame::Dressed { phased } => {
            let mut mix = h.modes.ladder_mixing(alpha);
            if phased {
                mix.iter_mut().for_each(|m| m.1 = -m.1);
            }
            Ok(ladder_norm(psi, md, &h.fock, &mix, None))
        }
        PhotonFrame::LengthGauge => {
            let mode = h.modes.modes[alpha];
            let x = h
                .matter
                .position()
                .ok_or_else(|| Error::BoundaryMismatch("length gauge needs positions".into()))?;
            let c = mode.lambda * mode.polarization / libm::sqrt(2.0 * mode.omega);
            let shift: Vec<f64> = x.iter().map(|x| c * x).collect();
            let mut mix = vec![(0.0, 0.0); n];
            mix[alpha] = (1.0, 0.0);
            Ok(ladder_norm(psi, md, &h.fock, &mix, Some(&shift)))
        }
    }
}

/// Total physical photon number over all modes.
pub fn total_photon_number<T: Scalar>(h: &CoupledHamiltonian, psi: &[T]) -> Result<f64> {
    (0..h.modes.len()).map(|a| photon_number(h, psi, a)).sum()
}

fn check_len(h: &CoupledHamiltonian, len: usize) -> Result<()> {
    if len != h.dim() {
        return Err(Error::InvalidParameter("state does not match the Hamiltonian".into()));
    }
    Ok(())
}

/// Matter probabilities per basis function (grid point or plane wave).
pub fn matter_probabilities<T: Scalar>(psi: &[T], matter_dim: usize) -> Vec<f64> {
    let pd = psi.len() / matter_dim;
    (0..matter_dim)
        .map(|m| psi[m * pd..(m + 1) * pd].iter().map(|c| c.norm_sqr()).sum())
        .collect()
}

/// Electron density on a real-space grid, normalized to one electron.
pub fn density<T: Scalar>(h: &CoupledHamiltonian, psi: &[T]) -> Result<Vec<f64>> {
    check_len(h, psi.len())?;
    if !h.matter.is_real_space() {
        return Err(Error::Unsupported("density needs a real-space representation".into()));
    }
    let p = matter_probabilities(psi, h.op.matter_dim());
    let total: f64 = p.iter().sum();
    let dx = h.matter.grid().spacing();
    Ok(p.iter().map(|q| q / (total * dx)).collect())
}

/// `(⟨x⟩, ⟨x²⟩ - ⟨x⟩²)` on a real-space grid.
pub fn dipole_and_variance<T: Scalar>(h: &CoupledHamiltonian, psi: &[T]) -> Result<(f64, f64)> {
    check_len(h, psi.len())?;
    let x = h
        .matter
        .position()
        .ok_or_else(|| Error::Unsupported("dipole needs a real-space representation".into()))?;
    let p = matter_probabilities(psi, h.op.matter_dim());
    let total: f64 = p.iter().sum();
    let m1: f64 = p.iter().zip(&x).map(|(p, x)| p * x).sum::<f64>() / total;
    let m2: f64 = p.iter().zip(&x).map(|(p, x)| p * x * x).sum::<f64>() / total;
    Ok((m1, m2 - m1 * m1))
}

/// Probability of each total ladder excitation number `0..=n_modes·max_n`.
pub fn excitation_distribution<T: Scalar>(h: &CoupledHamiltonian, psi: &[T]) -> Result<Vec<f64>> {
    check_len(h, psi.len())?;
    let pd = h.fock.dim();
    let mut out = vec![0.0; h.fock.n_modes * h.fock.max_n + 1];
    for (i, c) in psi.iter().enumerate() {
        out[h.fock.total(i % pd)] += c.norm_sqr();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn ladder_norm_of_fock_states() {
        let f = FockSpace::new(1, 3);
        // |2⟩: ‖b|2⟩‖² = 2, ‖b†|2⟩‖² = 3
        let mut psi = vec![0.0; 4];
        psi[2] = 1.0;
        assert!((ladder_norm(&psi, 1, &f, &[(1.0, 0.0)], None) - 2.0).abs() < 1e-14);
        assert!((ladder_norm(&psi, 1, &f, &[(0.0, 1.0)], None) - 3.0).abs() < 1e-14);
        // the top level is not lost
        psi[2] = 0.0;
        psi[3] = 1.0;
        assert!((ladder_norm(&psi, 1, &f, &[(0.0, 1.0)], None) - 4.0).abs() < 1e-14);
    }

    #[test]
    fn ladder_norm_with_shift_and_phase() {
        let f = FockSpace::new(1, 2);
        // two matter points in the vacuum, shifts ±0.5
        let psi = vec![
            Complex64::new(0.6, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.8),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
        ];
        let n = ladder_norm(&psi, 2, &f, &[(1.0, 0.0)], Some(&[0.5, -0.5]));
        assert!((n - 0.25).abs() < 1e-14);
    }
}
