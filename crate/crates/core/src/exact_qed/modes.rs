use alloc::format;
use alloc::vec::Vec;
use nalgebra::{DMatrix, SymmetricEigen};

use crate::{Error, Result};

/// A single cavity mode projected on the 1D polarization axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityMode {
    pub omega: f64,
    pub lambda: f64,
    /// ±1
    pub polarization: f64,
}

impl CavityMode {
    pub fn new(omega: f64, lambda: f64, polarization: f64) -> Result<Self> {
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::InvalidParameter(format!("mode frequency must be positive, got {omega}")));
        }
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidParameter(format!("coupling must be non-negative, got {lambda}")));
        }
        if polarization != 1.0 && polarization != -1.0 {
            return Err(Error::InvalidParameter(format!("1D polarization must be ±1, got {polarization}")));
        }
        Ok(Self {
            omega,
            lambda,
            polarization,
        })
    }

    /// Mode with `λ` fixed by the ratio `g/ω`, where `g = sqrt(ω/2) λ`.
    pub fn from_ratio(omega: f64, g_over_omega: f64) -> Result<Self> {
        Self::new(omega, lambda_from_ratio(omega, g_over_omega), 1.0)
    }

    pub fn g(&self) -> f64 {
        libm::sqrt(0.5 * self.omega) * self.lambda
    }
}

/// `λ = (g/ω) sqrt(2ω)`.
pub fn lambda_from_ratio(omega: f64, g_over_omega: f64) -> f64 {
    g_over_omega * libm::sqrt(2.0 * omega)
}

/// Bare modes together with their normal-mode (dressed) description.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSet {
    pub modes: Vec<CavityMode>,
    pub n_electrons: usize,
    pub dressed_omegas: Vec<f64>,
    /// `ε̃_β = Σ_α U_βα ε_α`
    pub dressed_polarizations: Vec<f64>,
    /// `ω_d,α² = N_e λ_α²`
    pub diamagnetic_freqs: Vec<f64>,
    /// Coupling of dressed mode β to the total momentum: `g̃_β = Σ_α U_βα λ_α ε_α`.
    pub dressed_couplings: Vec<f64>,
    /// Orthogonal `U` with `U W Uᵀ = diag(ω̃²)`; row β is dressed mode β.
    pub bogoliubov: DMatrix<f64>,
}

/// Normal-mode transformation of the bare modes including the diamagnetic term.
pub fn dress_modes(modes: &[CavityMode], n_electrons: usize) -> Result<ModeSet> {
    if n_electrons == 0 {
        return Err(Error::InvalidParameter("need at least one electron".into()));
    }
    for m in modes {
        CavityMode::new(m.omega, m.lambda, m.polarization)?;
    }
    let mp = modes.len();
    let ne = n_electrons as f64;
    let w = DMatrix::from_fn(mp, mp, |a, b| {
        let diag = if a == b { modes[a].omega * modes[a].omega } else { 0.0 };
        diag + ne * modes[a].lambda * modes[b].lambda * modes[a].polarization * modes[b].polarization
    });
    let scale = w.iter().fold(0.0_f64, |s, v| s.max(libm::fabs(*v))).max(1e-300);
    let asym = (0..mp)
        .flat_map(|a| (0..mp).map(move |b| (a, b)))
        .map(|(a, b)| libm::fabs(w[(a, b)] - w[(b, a)]))
        .fold(0.0, f64::max);
    if asym > 1e-14 * scale {
        return Err(Error::Assembly(format!("mode coupling matrix is not symmetric ({asym:e})")));
    }
    let off_diagonal = (0..mp).any(|a| (0..mp).any(|b| a != b && w[(a, b)] != 0.0));
    let (u, omega2) = if !off_diagonal {
        (DMatrix::identity(mp, mp), (0..mp).map(|a| w[(a, a)]).collect::<Vec<_>>())
    } else {
        let eig = SymmetricEigen::new(w.clone());
        let mut order: Vec<usize> = (0..mp).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let mut u = DMatrix::zeros(mp, mp);
        let mut om2 = Vec::with_capacity(mp);
        for (row, &idx) in order.iter().enumerate() {
            let col = eig.eigenvectors.column(idx);
            // deterministic sign: largest component positive
            let mut best = 0usize;
            for i in 0..mp {
                if libm::fabs(col[i]) > libm::fabs(col[best]) + 1e-14 {
                    best = i;
                }
            }
            let s = if col[best] < 0.0 { -1.0 } else { 1.0 };
            for i in 0..mp {
                u[(row, i)] = s * col[i];
            }
            om2.push(eig.eigenvalues[idx]);
        }
        (u, om2)
    };
    if omega2.iter().any(|&o| !(o > 0.0)) {
        return Err(Error::Assembly("dressed frequencies must be positive".into()));
    }
    let dressed_omegas = omega2.iter().map(|o| libm::sqrt(*o)).collect();
    let dressed_polarizations = (0..mp)
        .map(|b| (0..mp).map(|a| u[(b, a)] * modes[a].polarization).sum())
        .collect();
    let dressed_couplings = (0..mp)
        .map(|b| (0..mp).map(|a| u[(b, a)] * modes[a].lambda * modes[a].polarization).sum())
        .collect();
    Ok(ModeSet {
        modes: modes.to_vec(),
        n_electrons,
        dressed_omegas,
        dressed_polarizations,
        diamagnetic_freqs: modes.iter().map(|m| ne * m.lambda * m.lambda).collect(),
        dressed_couplings,
        bogoliubov: u,
    })
}

impl ModeSet {
    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn bare_omegas(&self) -> Vec<f64> {
        self.modes.iter().map(|m| m.omega).collect()
    }

    /// `g̃_β² / ω̃_β²` per dressed mode; for one mode this is `ω_d²/(N_e ω̃²)`.
    pub fn mass_weights(&self) -> Vec<f64> {
        self.dressed_couplings
            .iter()
            .zip(&self.dressed_omegas)
            .map(|(g, w)| g * g / (w * w))
            .collect()
    }

    /// Fraction of the kinetic energy removed along the polarization axis.
    pub fn mass_fraction(&self) -> f64 {
        self.mass_weights().iter().sum()
    }

    /// Coefficient of the coherent shift `β_β(k) = coeff_β k`.
    pub fn shift_coefficients(&self) -> Vec<f64> {
        self.dressed_couplings
            .iter()
            .zip(&self.dressed_omegas)
            .map(|(g, w)| g / libm::sqrt(2.0 * w * w * w))
            .collect()
    }

    /// Gaussian parameter `a_β = ω̃³ / g̃²` of `m^{0,0}`; infinite when uncoupled.
    pub fn mollifier_parameters(&self) -> Vec<f64> {
        self.dressed_couplings
            .iter()
            .zip(&self.dressed_omegas)
            .map(|(g, w)| if *g == 0.0 { f64::INFINITY } else { w * w * w / (g * g) })
            .collect()
    }

    pub fn zero_point_dressed(&self) -> f64 {
        0.5 * self.dressed_omegas.iter().sum::<f64>()
    }

    pub fn zero_point_bare(&self) -> f64 {
        0.5 * self.modes.iter().map(|m| m.omega).sum::<f64>()
    }

    /// Coefficients `(s₊, s₋)` of `a_α = Σ_β U_βα (s₊ b_β + s₋ b_β†)`.
    pub fn ladder_mixing(&self, alpha: usize) -> Vec<(f64, f64)> {
        let w = self.modes[alpha].omega;
        (0..self.len())
            .map(|b| {
                let wt = self.dressed_omegas[b];
                let u = self.bogoliubov[(b, alpha)];
                let r = libm::sqrt(w / wt);
                (u * 0.5 * (r + 1.0 / r), u * 0.5 * (r - 1.0 / r))
            })
            .collect()
    }

    /// Photon number of the dressed vacuum in bare mode α.
    pub fn vacuum_photon_number(&self, alpha: usize) -> f64 {
        self.ladder_mixing(alpha).iter().map(|(_, sm)| sm * sm).sum()
    }

    pub fn uncoupled(&self) -> bool {
        self.modes.iter().all(|m| m.lambda == 0.0)
    }

    pub fn single(omega: f64, lambda: f64) -> Result<Self> {
        dress_modes(&[CavityMode::new(omega, lambda, 1.0)?], 1)
    }

    pub fn none() -> Self {
        ModeSet {
            modes: Vec::new(),
            n_electrons: 1,
            dressed_omegas: Vec::new(),
            dressed_polarizations: Vec::new(),
            diamagnetic_freqs: Vec::new(),
            dressed_couplings: Vec::new(),
            bogoliubov: DMatrix::zeros(0, 0),
        }
    }

    /// Same modes with the electron count changed.
    pub fn with_electrons(&self, n_electrons: usize) -> Result<Self> {
        if self.modes.is_empty() {
            let mut m = Self::none();
            m.n_electrons = n_electrons;
            return Ok(m);
        }
        dress_modes(&self.modes, n_electrons)
    }

}
