//! Photon-free effective Hamiltonian on the matter space.
//!
//! For one electron along the polarization axis the adiabatic fluctuation
//! term reduces to `-Σ γ_β Ĵ²/2` with `γ_β = g̃_β²/ω̃_β²`, i.e. the kinetic
//! energy is rescaled by `1 - Σ γ_β`.

use alloc::vec;
use alloc::vec::Vec;

use crate::exact_qed::{MatterSpace, ModeSet, Momentum};
use crate::dynamics::{propagate, MeanFieldKind, MeanFieldSystem, PropagationOptions, Trajectory};
use crate::grid::{FdOrder, Grid1D, Potential1D};
use crate::linalg::{Csr, Scalar};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum HistoryMode {
    /// Sine-kernel integral over the recorded current, trapezoidal rule.
    MemoryIntegral,
    /// `M̈ + ω̃² M = ω̃² J` integrated with the wavefunction.
    #[default]
    AuxiliaryOde,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhotonFreeConfig {
    pub modes: ModeSet,
    pub include_zero_point: bool,
    pub history_mode: HistoryMode,
}

impl PhotonFreeConfig {
    pub fn new(modes: ModeSet) -> Self {
        Self {
            modes,
            include_zero_point: false,
            history_mode: HistoryMode::default(),
        }
    }
}

/// `1 - Σ γ_β`, the kinetic prefactor along the polarization axis.
pub fn kinetic_scale(modes: &ModeSet) -> Result<f64> {
    let s = 1.0 - modes.mass_fraction();
    if !(s > 0.0) {
        return Err(Error::InvalidParameter(alloc::format!(
            "photon-free kinetic prefactor must stay positive, got {s}"
        )));
    }
    Ok(s)
}

fn check_one_electron(modes: &ModeSet) -> Result<()> {
    if modes.n_electrons != 1 {
        return Err(Error::Unsupported("the grid photon-free solver handles one electron".into()));
    }
    Ok(())
}

/// Static photon-free Hamiltonian `-(1 - Σγ)/2 ∂² + v` (no zero point).
pub fn build_static_pf_free_hamiltonian(matter: &MatterSpace, v: &Potential1D, modes: &ModeSet) -> Result<Csr> {
    check_one_electron(modes)?;
    matter.hamiltonian(v, kinetic_scale(modes)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhotonFreeGroundState {
    pub energy: f64,
    /// Unit-norm coefficients in the matter representation.
    pub state: Vec<f64>,
    pub residual: f64,
}

pub fn static_ground_state(matter: &MatterSpace, v: &Potential1D, config: &PhotonFreeConfig) -> Result<PhotonFreeGroundState> {
    check_one_electron(&config.modes)?;
    let pair = matter.ground_state(v, kinetic_scale(&config.modes)?)?;
    let zp = if config.include_zero_point {
        config.modes.zero_point_dressed()
    } else {
        0.0
    };
    Ok(PhotonFreeGroundState {
        energy: pair.value + zp,
        state: pair.vector,
        residual: pair.residual,
    })
}

/// `(⟨Ĵ⟩, ⟨Ĵ²⟩)` for a single-electron state, with `Ĵ = p`.
pub fn current_moments<T: Scalar>(matter: &MatterSpace, psi: &[T]) -> (f64, f64) {
    let norm = crate::linalg::norm_sqr(psi);
    let mut tmp = vec![T::zero(); psi.len()];
    let j = match matter.momentum() {
        Momentum::Derivative(d) => {
            d.mul_add(psi, T::from_real(1.0), &mut tmp);
            psi.iter().zip(&tmp).map(|(a, b)| a.conj().times(*b).imag()).sum::<f64>()
        }
        Momentum::Real(p) => {
            p.mul_add(psi, T::from_real(1.0), &mut tmp);
            psi.iter().zip(&tmp).map(|(a, b)| a.conj().times(*b).real()).sum::<f64>()
        }
    };
    tmp.iter_mut().for_each(|x| *x = T::zero());
    matter.momentum_squared().mul_add(psi, T::from_real(1.0), &mut tmp);
    let j2: f64 = psi.iter().zip(&tmp).map(|(a, b)| a.conj().times(*b).real()).sum();
    (j / norm, j2 / norm)
}

/// How photon observables are rebuilt from the matter state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Reconstruction {
    /// `a_α ≈ -Σ_β U_βα β_β(Ĵ)`: only the adiabatic field fluctuations.
    #[default]
    Adiabatic,
    /// Back-transform of the shifted dressed vacuum: keeps the squeezing
    /// `Σ (U s₋)²` of the dressed vacuum and weights the shift by `sqrt(ω/ω̃)`.
    ShiftedVacuum,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonObservables {
    pub photon_number: f64,
    /// `⟨a_α⟩`, real for the real polarization used here.
    pub amplitude: f64,
}

/// Photon number and field amplitude of every bare mode.
pub fn reconstruct_photon_observables<T: Scalar>(
    matter: &MatterSpace,
    psi: &[T],
    modes: &ModeSet,
    recon: Reconstruction,
) -> Vec<PhotonObservables> {
    let (j, j2) = current_moments(matter, psi);
    let shift = modes.shift_coefficients();
    (0..modes.len())
        .map(|alpha| {
            let w = modes.modes[alpha].omega;
            let mut c = 0.0;
            let mut vac = 0.0;
            for (b, kb) in shift.iter().enumerate() {
                let u = modes.bogoliubov[(b, alpha)];
                match recon {
                    Reconstruction::Adiabatic => c += u * kb,
                    Reconstruction::ShiftedVacuum => c += u * libm::sqrt(w / modes.dressed_omegas[b]) * kb,
                }
            }
            if recon == Reconstruction::ShiftedVacuum {
                vac = modes.vacuum_photon_number(alpha);
            }
            PhotonObservables {
                photon_number: vac + c * c * j2,
                amplitude: -c * j,
            }
        })
        .collect()
}

/// `M(t_n) = ω ∫_0^{t_n} sin(ω(t_n - t')) J(t') dt'` on uniform samples of `J`
/// by the trapezoidal rule.
pub fn memory_integral(j: &[f64], dt: f64, omega: f64) -> Vec<f64> {
    // sin(ω(t-t')) = sin ωt cos ωt' - cos ωt sin ωt'
    let mut out = Vec::with_capacity(j.len());
    let (mut c, mut s) = (0.0, 0.0);
    let mut prev: Option<(f64, f64)> = None;
    for (n, &jn) in j.iter().enumerate() {
        let t = n as f64 * dt;
        let fc = libm::cos(omega * t) * jn;
        let fs = libm::sin(omega * t) * jn;
        if let Some((pc, ps)) = prev {
            c += 0.5 * dt * (pc + fc);
            s += 0.5 * dt * (ps + fs);
        }
        prev = Some((fc, fs));
        out.push(omega * (libm::sin(omega * t) * c - libm::cos(omega * t) * s));
    }
    out
}

/// The same history from `M̈ + ω² M = ω² J`, `M(0) = Ṁ(0) = 0`, by RK4.
pub fn auxiliary_history<F: Fn(f64) -> f64>(j: F, dt: f64, n_steps: usize, omega: f64) -> Vec<f64> {
    let w2 = omega * omega;
    let f = |t: f64, m: f64, p: f64| (p, w2 * (j(t) - m));
    let (mut m, mut p) = (0.0, 0.0);
    let mut out = Vec::with_capacity(n_steps + 1);
    out.push(0.0);
    for n in 0..n_steps {
        let t = n as f64 * dt;
        let k1 = f(t, m, p);
        let k2 = f(t + 0.5 * dt, m + 0.5 * dt * k1.0, p + 0.5 * dt * k1.1);
        let k3 = f(t + 0.5 * dt, m + 0.5 * dt * k2.0, p + 0.5 * dt * k2.1);
        let k4 = f(t + dt, m + dt * k3.0, p + dt * k3.1);
        m += dt / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        p += dt / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        out.push(m);
    }
    out
}

/// Per-mode history variables `M_β`, `Ṁ_β`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CurrentHistory {
    pub m: Vec<f64>,
    pub m_dot: Vec<f64>,
}

impl CurrentHistory {
    pub fn zeros(n_modes: usize) -> Self {
        Self {
            m: vec![0.0; n_modes],
            m_dot: vec![0.0; n_modes],
        }
    }

    /// Mean vector potential `A_β/c = -γ_β M_β` of each dressed mode.
    pub fn vector_potential(&self, modes: &ModeSet) -> Vec<f64> {
        modes.mass_weights().iter().zip(&self.m).map(|(g, m)| -g * m).collect()
    }
}

/// Time-dependent photon-free propagation of a single-electron state on a
/// dirichlet grid, with the optional kick of `opts`.
///
/// The trajectory records `⟨J_p⟩` and the mean `A_β/c = -γ_β M_β`.
pub fn propagate_pf_free(
    state: &[num_complex::Complex64],
    grid: &Grid1D,
    order: FdOrder,
    v: &Potential1D,
    config: &PhotonFreeConfig,
    opts: &PropagationOptions,
) -> Result<Trajectory> {
    let mut sys = MeanFieldSystem::new(MeanFieldKind::PhotonFree, grid, order, v, &config.modes, config.history_mode)?;
    let aux = sys.initial_aux();
    propagate(&mut sys, state.to_vec(), aux, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Boundary;

    fn hydrogen() -> (MatterSpace, Potential1D) {
        let g = Grid1D::new(201, 0.1, Boundary::Dirichlet).unwrap();
        let v = Potential1D::soft_coulomb(&g, 1.0).unwrap();
        (MatterSpace::new(&g, FdOrder::Fourth).unwrap(), v)
    }

    #[test]
    fn decoupled_limit_is_bare_matter() {
        let (m, v) = hydrogen();
        let modes = ModeSet::single(0.4, 0.0).unwrap();
        let pf = static_ground_state(&m, &v, &PhotonFreeConfig::new(modes)).unwrap();
        let bare = m.ground_state(&v, 1.0).unwrap();
        assert!((pf.energy - bare.value).abs() < 1e-12);
    }

    #[test]
    fn kinetic_prefactor_is_bare_over_dressed_frequency() {
        let modes = ModeSet::single(0.5, 0.2).unwrap();
        assert!((kinetic_scale(&modes).unwrap() - 0.25 / 0.29).abs() < 1e-14);
        // λ → ∞ leaves a vanishing but positive prefactor
        let strong = ModeSet::single(0.5, 1e4).unwrap();
        let s = kinetic_scale(&strong).unwrap();
        assert!(s > 0.0 && s < 1e-8);
    }

    #[test]
    fn coupling_binds_more_strongly() {
        let (m, v) = hydrogen();
        let mut last = f64::INFINITY;
        for l in [0.0, 0.1, 0.3, 1.0] {
            let modes = ModeSet::single(0.4, l).unwrap();
            let e = static_ground_state(&m, &v, &PhotonFreeConfig::new(modes)).unwrap().energy;
            assert!(e < last);
            last = e;
        }
    }

    #[test]
    fn real_ground_state_has_fluctuations_but_no_field() {
        let (m, v) = hydrogen();
        let modes = ModeSet::single(0.4, 0.3).unwrap();
        let gs = static_ground_state(&m, &v, &PhotonFreeConfig::new(modes.clone())).unwrap();
        let obs = reconstruct_photon_observables(&m, &gs.state, &modes, Reconstruction::Adiabatic);
        assert!(obs[0].amplitude.abs() < 1e-14);
        assert!(obs[0].photon_number > 0.0);
        let none = reconstruct_photon_observables(&m, &gs.state, &ModeSet::single(0.4, 0.0).unwrap(), Reconstruction::ShiftedVacuum);
        assert_eq!(none[0].photon_number, 0.0);
    }

    #[test]
    fn history_forms_agree() {
        let j = |t: f64| libm::sin(0.37 * t) * libm::exp(-0.01 * t) + 0.2 * libm::cos(1.3 * t);
        let dt = 1e-3;
        let n = 100_000;
        let samples: Vec<f64> = (0..=n).map(|k| j(k as f64 * dt)).collect();
        let a = memory_integral(&samples, dt, 0.6);
        let b = auxiliary_history(j, dt, n, 0.6);
        let scale = b.iter().fold(0.0_f64, |s, x| s.max(x.abs()));
        let err = a.iter().zip(&b).fold(0.0_f64, |s, (x, y)| s.max((x - y).abs()));
        assert!(err < 1e-6 * scale, "{err} vs {scale}");
    }
}
