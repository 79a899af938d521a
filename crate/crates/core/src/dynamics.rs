//! Real-time propagation and delta-kick spectroscopy.
//!
//! All propagators use classical RK4 on the combined state of the complex
//! wavefunction and any real auxiliary variables (classical mode
//! coordinates). The external kick enters as `f(t) x`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::exact_qed::{
    build_pf_hamiltonian, build_pzw_hamiltonian, ground_state, CoupledHamiltonian, FockTruncation, MatterSpace,
    ModeSet, PfForm, SolveOptions,
};
use crate::grid::{FdOrder, Grid1D, Potential1D};
use crate::linalg::{Csr, KronSum};
use crate::photon_free::{static_ground_state, HistoryMode, PhotonFreeConfig};
use crate::qedft::{pxlda_energy, scf_solve, v_pxlda, Functional, ScfOptions, XcConfig};
use crate::{Error, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Lorentzian delta kick `v(x, t) = f(t) x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KickProtocol {
    pub strength: f64,
    pub t0: f64,
    pub width: f64,
}

impl Default for KickProtocol {
    fn default() -> Self {
        Self {
            strength: 1e-4,
            t0: 1.0,
            width: 1e-2,
        }
    }
}

impl KickProtocol {
    pub fn field(&self, t: f64) -> f64 {
        let u = t - self.t0;
        -(self.strength / core::f64::consts::PI) * self.width / (u * u + self.width * self.width)
    }

    /// Time after which the kick is treated as over.
    pub fn settled(&self) -> f64 {
        self.t0 + 100.0 * self.width
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub dipole: f64,
    /// Energy of the undriven system.
    pub energy: f64,
    pub current: Option<f64>,
    /// Mean `A_β/c` of each mode, empty when no classical field is carried.
    pub vector_potential: Vec<f64>,
}

/// A system that can be propagated by [`propagate`].
pub trait Evolution {
    fn dim(&self) -> usize;

    fn n_aux(&self) -> usize {
        0
    }

    /// `dψ = -i H(t) ψ` with `H(t)` including `field · x`, and the
    /// derivative of the auxiliary variables.
    fn derivative(&self, t: f64, field: f64, psi: &[Complex64], aux: &[f64], dpsi: &mut [Complex64], daux: &mut [f64]);

    fn observe(&self, t: f64, psi: &[Complex64], aux: &[f64]) -> Observation;

    /// Called at the start and after every completed step.
    fn sync(&mut self, _t: f64, _psi: &[Complex64], _aux: &[f64]) {}
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropagationOptions {
    pub dt: f64,
    pub t_end: f64,
    /// Record every `stride` steps.
    pub stride: usize,
    /// Abort once `|‖ψ‖² - 1|` exceeds this.
    pub norm_limit: f64,
    pub kick: Option<KickProtocol>,
}

impl Default for PropagationOptions {
    fn default() -> Self {
        Self {
            dt: 5e-4,
            t_end: 1000.0,
            stride: 20,
            norm_limit: 1e-6,
            kick: Some(KickProtocol::default()),
        }
    }
}

impl PropagationOptions {
    fn validate(&self) -> Result<usize> {
        if !(self.dt > 0.0) || !(self.t_end >= 0.0) || self.stride == 0 {
            return Err(Error::InvalidParameter(format!(
                "need dt > 0, t_end >= 0 and stride > 0 (got {}, {}, {})",
                self.dt, self.t_end, self.stride
            )));
        }
        Ok(libm::round(self.t_end / self.dt) as usize)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub dipole: Vec<f64>,
    pub energy: Vec<f64>,
    /// `⟨J_p⟩`, recorded only by systems that track it.
    pub current: Vec<f64>,
    pub vector_potential: Vec<Vec<f64>>,
    /// Largest `|‖ψ‖² - 1|` over the recorded samples.
    pub max_norm_drift: f64,
    /// Largest relative energy change after the kick has settled.
    pub energy_drift: f64,
    pub final_state: Vec<Complex64>,
    pub final_aux: Vec<f64>,
}

fn norm_sqr(psi: &[Complex64]) -> f64 {
    psi.iter().map(|c| c.norm_sqr()).sum()
}

/// RK4 propagation of `psi` (and `aux`) from `t = 0` to `opts.t_end`.
pub fn propagate<S: Evolution + ?Sized>(
    system: &mut S,
    psi: Vec<Complex64>,
    aux: Vec<f64>,
    opts: &PropagationOptions,
) -> Result<Trajectory> {
    let n_steps = opts.validate()?;
    let (n, na) = (system.dim(), system.n_aux());
    if psi.len() != n || aux.len() != na {
        return Err(Error::InvalidParameter("initial state does not match the system".into()));
    }
    let norm0 = norm_sqr(&psi);
    if libm::fabs(norm0 - 1.0) > opts.norm_limit {
        return Err(Error::InvalidParameter(format!("initial state is not normalized (‖ψ‖² = {norm0})")));
    }
    let dt = opts.dt;
    let field = |t: f64| opts.kick.map_or(0.0, |k| k.field(t));
    let settled = opts.kick.map_or(0.0, |k| k.settled());

    let (mut y, mut ya) = (psi, aux);
    let mut acc = vec![Complex64::new(0.0, 0.0); n];
    let mut tmp = acc.clone();
    let mut k = acc.clone();
    let mut acca = vec![0.0; na];
    let mut tmpa = acca.clone();
    let mut ka = acca.clone();

    let mut traj = Trajectory::default();
    let mut e_ref: Option<f64> = None;
    let mut record = |traj: &mut Trajectory, system: &S, step: usize, y: &[Complex64], ya: &[f64]| -> Result<()> {
        let t = step as f64 * dt;
        let drift = libm::fabs(norm_sqr(y) - 1.0);
        if drift > opts.norm_limit {
            return Err(Error::NormDrift {
                step,
                drift,
                limit: opts.norm_limit,
            });
        }
        traj.max_norm_drift = traj.max_norm_drift.max(drift);
        let obs = system.observe(t, y, ya);
        if t >= settled {
            match e_ref {
                None => e_ref = Some(obs.energy),
                Some(e0) => {
                    let rel = libm::fabs(obs.energy - e0) / libm::fabs(e0).max(f64::MIN_POSITIVE);
                    traj.energy_drift = traj.energy_drift.max(rel);
                }
            }
        }
        traj.times.push(t);
        traj.dipole.push(obs.dipole);
        traj.energy.push(obs.energy);
        if let Some(j) = obs.current {
            traj.current.push(j);
        }
        if !obs.vector_potential.is_empty() {
            traj.vector_potential.push(obs.vector_potential);
        }
        Ok(())
    };

    system.sync(0.0, &y, &ya);
    record(&mut traj, system, 0, &y, &ya)?;
    for step in 0..n_steps {
        let t = step as f64 * dt;
        // stage 1
        system.derivative(t, field(t), &y, &ya, &mut k, &mut ka);
        axpy_into(&mut acc, &y, dt / 6.0, &k);
        axpy_into(&mut tmp, &y, 0.5 * dt, &k);
        axpy_real(&mut acca, &ya, dt / 6.0, &ka);
        axpy_real(&mut tmpa, &ya, 0.5 * dt, &ka);
        // stage 2
        let th = t + 0.5 * dt;
        system.derivative(th, field(th), &tmp, &tmpa, &mut k, &mut ka);
        add_scaled(&mut acc, dt / 3.0, &k);
        add_scaled_real(&mut acca, dt / 3.0, &ka);
        axpy_into(&mut tmp, &y, 0.5 * dt, &k);
        axpy_real(&mut tmpa, &ya, 0.5 * dt, &ka);
        // stage 3
        system.derivative(th, field(th), &tmp, &tmpa, &mut k, &mut ka);
        add_scaled(&mut acc, dt / 3.0, &k);
        add_scaled_real(&mut acca, dt / 3.0, &ka);
        axpy_into(&mut tmp, &y, dt, &k);
        axpy_real(&mut tmpa, &ya, dt, &ka);
        // stage 4
        let t1 = t + dt;
        system.derivative(t1, field(t1), &tmp, &tmpa, &mut k, &mut ka);
        add_scaled(&mut acc, dt / 6.0, &k);
        add_scaled_real(&mut acca, dt / 6.0, &ka);
        core::mem::swap(&mut y, &mut acc);
        core::mem::swap(&mut ya, &mut acca);

        system.sync(t1, &y, &ya);
        if (step + 1) % opts.stride == 0 || step + 1 == n_steps {
            record(&mut traj, system, step + 1, &y, &ya)?;
        }
    }
    traj.final_state = y;
    traj.final_aux = ya;
    Ok(traj)
}

fn axpy_into(out: &mut [Complex64], y: &[Complex64], s: f64, k: &[Complex64]) {
    for ((o, a), b) in out.iter_mut().zip(y).zip(k) {
        *o = a + b * s;
    }
}

fn add_scaled(out: &mut [Complex64], s: f64, k: &[Complex64]) {
    for (o, b) in out.iter_mut().zip(k) {
        *o += b * s;
    }
}

fn axpy_real(out: &mut [f64], y: &[f64], s: f64, k: &[f64]) {
    for ((o, a), b) in out.iter_mut().zip(y).zip(k) {
        *o = a + s * b;
    }
}

fn add_scaled_real(out: &mut [f64], s: f64, k: &[f64]) {
    for (o, b) in out.iter_mut().zip(k) {
        *o += s * b;
    }
}

fn expectation(op_psi: &[Complex64], psi: &[Complex64]) -> f64 {
    psi.iter().zip(op_psi).map(|(a, b)| (a.conj() * b).re).sum::<f64>() / norm_sqr(psi)
}

fn real_space_positions(matter: &MatterSpace) -> Result<Vec<f64>> {
    match matter {
        MatterSpace::RealSpace { grid, .. } if !grid.is_periodic() => Ok(grid.coordinates()),
        _ => Err(Error::BoundaryMismatch(
            "propagation with a dipole kick needs a dirichlet real-space grid".into(),
        )),
    }
}

/// A time-independent Hamiltonian on `matter ⊗ photons` plus the kick.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    op: KronSum,
    x: Vec<f64>,
}

impl LinearSystem {
    pub fn from_coupled(h: &CoupledHamiltonian) -> Result<Self> {
        Ok(Self {
            op: h.op.clone(),
            x: real_space_positions(&h.matter)?,
        })
    }

    /// Uncoupled matter with kinetic prefactor `scale`.
    pub fn from_matter(matter: &MatterSpace, v: &Potential1D, scale: f64) -> Result<Self> {
        let x = real_space_positions(matter)?;
        let mut op = KronSum::new(matter.dim(), 1);
        op.add_term(Some(matter.hamiltonian(v, scale)?), None)?;
        Ok(Self { op, x })
    }
}

impl Evolution for LinearSystem {
    fn dim(&self) -> usize {
        self.op.matter_dim() * self.op.photon_dim()
    }

    fn derivative(&self, _t: f64, field: f64, psi: &[Complex64], _aux: &[f64], dpsi: &mut [Complex64], _daux: &mut [f64]) {
        self.op.apply_generic(psi, dpsi);
        let pd = self.op.photon_dim();
        for (m, x) in self.x.iter().enumerate() {
            let fx = field * x;
            for i in m * pd..(m + 1) * pd {
                dpsi[i] = -I * (dpsi[i] + psi[i] * fx);
            }
        }
    }

    fn observe(&self, _t: f64, psi: &[Complex64], _aux: &[f64]) -> Observation {
        let mut h = vec![Complex64::new(0.0, 0.0); psi.len()];
        self.op.apply_generic(psi, &mut h);
        let pd = self.op.photon_dim();
        let norm = norm_sqr(psi);
        let dipole = self
            .x
            .iter()
            .enumerate()
            .map(|(m, x)| x * psi[m * pd..(m + 1) * pd].iter().map(|c| c.norm_sqr()).sum::<f64>())
            .sum::<f64>()
            / norm;
        Observation {
            dipole,
            energy: expectation(&h, psi),
            current: None,
            vector_potential: Vec::new(),
        }
    }
}

/// Mean-field treatment of the modes on the matter space.
#[derive(Debug, Clone, PartialEq)]
pub enum MeanFieldKind {
    /// Photon-free Hamiltonian with fluctuation and memory terms.
    PhotonFree,
    /// Bare matter driven by classical modes.
    Maxwell,
    /// Kohn-Sham with the adiabatic pxLDA potential and classical modes.
    PxldaMaxwell(XcConfig),
}

/// Running sine/cosine sums of the memory-integral history of one mode.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
struct MemorySums {
    c: f64,
    s: f64,
    prev: Option<(f64, f64, f64)>,
}

/// One electron on a dirichlet grid coupled to the modes through `⟨Ĵ⟩`.
///
/// `H(t) = h₀ + Σ_β γ_β (κ ⟨Ĵ⟩/2 - M_β) Ĵ (+ v_pxLDA[ρ])` with `κ = 1` for the
/// photon-free fluctuation term and 0 otherwise, and `M̈ + ω̃² M = ω̃² ⟨Ĵ⟩`.
#[derive(Debug, Clone)]
pub struct MeanFieldSystem {
    kind: MeanFieldKind,
    grid: Grid1D,
    modes: ModeSet,
    h0: Csr,
    d: Csr,
    x: Vec<f64>,
    gamma: Vec<f64>,
    omega: Vec<f64>,
    history: HistoryMode,
    sums: Vec<MemorySums>,
    frozen: Vec<(f64, f64)>,
}

impl MeanFieldSystem {
    pub fn new(
        kind: MeanFieldKind,
        grid: &Grid1D,
        order: FdOrder,
        v: &Potential1D,
        modes: &ModeSet,
        history: HistoryMode,
    ) -> Result<Self> {
        if modes.n_electrons != 1 {
            return Err(Error::Unsupported("mean-field propagation handles one electron".into()));
        }
        if let MeanFieldKind::PxldaMaxwell(c) = &kind {
            c.validate()?;
        }
        let matter = MatterSpace::RealSpace {
            grid: grid.clone(),
            order,
        };
        let x = real_space_positions(&matter)?;
        let scale = match kind {
            MeanFieldKind::PhotonFree => crate::photon_free::kinetic_scale(modes)?,
            _ => 1.0,
        };
        let d = match matter.momentum() {
            crate::exact_qed::Momentum::Derivative(d) => d,
            crate::exact_qed::Momentum::Real(_) => unreachable!("real-space grids have a derivative momentum"),
        };
        Ok(Self {
            h0: matter.hamiltonian(v, scale)?,
            d,
            x,
            gamma: modes.mass_weights(),
            omega: modes.dressed_omegas.clone(),
            sums: vec![MemorySums::default(); modes.len()],
            frozen: vec![(0.0, 0.0); modes.len()],
            kind,
            grid: grid.clone(),
            modes: modes.clone(),
            history,
        })
    }

    /// Auxiliary variables carried by RK4: `(M_β, Ṁ_β)` per mode.
    fn ode_history(&self) -> bool {
        self.history == HistoryMode::AuxiliaryOde
    }

    fn fluctuation(&self) -> f64 {
        if self.kind == MeanFieldKind::PhotonFree {
            1.0
        } else {
            0.0
        }
    }

    fn history_at(&self, aux: &[f64], beta: usize) -> (f64, f64) {
        if self.ode_history() {
            (aux[2 * beta], aux[2 * beta + 1])
        } else {
            self.frozen[beta]
        }
    }

    /// `⟨Ĵ⟩ = Im Σ ψ* D ψ` for a normalized state.
    fn current(&self, psi: &[Complex64], buf: &mut [Complex64]) -> f64 {
        buf.iter_mut().for_each(|b| *b = Complex64::new(0.0, 0.0));
        self.d.mul_add(psi, Complex64::new(1.0, 0.0), buf);
        psi.iter().zip(buf.iter()).map(|(a, b)| (a.conj() * b).im).sum::<f64>() / norm_sqr(psi)
    }

    fn density(&self, psi: &[Complex64]) -> Vec<f64> {
        let dx = self.grid.spacing();
        let n = norm_sqr(psi);
        psi.iter().map(|c| c.norm_sqr() / (n * dx)).collect()
    }

    fn xc_potential(&self, psi: &[Complex64]) -> Option<Vec<f64>> {
        match &self.kind {
            MeanFieldKind::PxldaMaxwell(c) => Some(v_pxlda(&self.density(psi), &self.modes, c).expect("validated config")),
            _ => None,
        }
    }

    /// Initial auxiliary state: modes at rest.
    pub fn initial_aux(&self) -> Vec<f64> {
        vec![0.0; self.n_aux()]
    }
}

impl Evolution for MeanFieldSystem {
    fn dim(&self) -> usize {
        self.x.len()
    }

    fn n_aux(&self) -> usize {
        if self.ode_history() {
            2 * self.gamma.len()
        } else {
            0
        }
    }

    fn derivative(&self, _t: f64, field: f64, psi: &[Complex64], aux: &[f64], dpsi: &mut [Complex64], daux: &mut [f64]) {
        let j = self.current(psi, dpsi);
        let mut a = 0.0;
        for b in 0..self.gamma.len() {
            let (m, md) = self.history_at(aux, b);
            a += self.gamma[b] * (0.5 * self.fluctuation() * j - m);
            if self.ode_history() {
                let w2 = self.omega[b] * self.omega[b];
                daux[2 * b] = md;
                daux[2 * b + 1] = w2 * (j - m);
            }
        }
        // dpsi = -i[(h0 + f x + v_xc) ψ] - a D ψ, with Ĵ = -i D
        let mut jpsi = vec![Complex64::new(0.0, 0.0); psi.len()];
        if a != 0.0 {
            self.d.mul_add(psi, Complex64::new(1.0, 0.0), &mut jpsi);
        }
        dpsi.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
        self.h0.mul_add(psi, Complex64::new(1.0, 0.0), dpsi);
        let vxc = self.xc_potential(psi);
        for i in 0..psi.len() {
            let mut diag = field * self.x[i];
            if let Some(v) = &vxc {
                diag += v[i];
            }
            dpsi[i] = -I * (dpsi[i] + psi[i] * diag) - jpsi[i] * a;
        }
    }

    fn observe(&self, _t: f64, psi: &[Complex64], aux: &[f64]) -> Observation {
        let mut buf = vec![Complex64::new(0.0, 0.0); psi.len()];
        let j = self.current(psi, &mut buf);
        buf.iter_mut().for_each(|b| *b = Complex64::new(0.0, 0.0));
        self.h0.mul_add(psi, Complex64::new(1.0, 0.0), &mut buf);
        let mut energy = expectation(&buf, psi);
        if let MeanFieldKind::PxldaMaxwell(c) = &self.kind {
            energy += pxlda_energy(&self.density(psi), &self.grid, &self.modes, c).expect("validated config");
        }
        let mut vector_potential = Vec::with_capacity(self.gamma.len());
        for b in 0..self.gamma.len() {
            let (g, w) = (self.gamma[b], self.omega[b]);
            let (m, md) = self.history_at(aux, b);
            energy += 0.25 * self.fluctuation() * g * j * j - g * m * j + 0.5 * g / (w * w) * (md * md + w * w * m * m);
            vector_potential.push(-g * m);
        }
        let norm = norm_sqr(psi);
        let dipole = psi.iter().zip(&self.x).map(|(c, x)| c.norm_sqr() * x).sum::<f64>() / norm;
        Observation {
            dipole,
            energy,
            current: Some(j),
            vector_potential,
        }
    }

    fn sync(&mut self, t: f64, psi: &[Complex64], _aux: &[f64]) {
        if self.ode_history() {
            return;
        }
        let mut buf = vec![Complex64::new(0.0, 0.0); psi.len()];
        let j = self.current(psi, &mut buf);
        for b in 0..self.gamma.len() {
            let w = self.omega[b];
            let (sn, cs) = (libm::sin(w * t), libm::cos(w * t));
            let s = &mut self.sums[b];
            let (fc, fs) = (cs * j, sn * j);
            if let Some((pc, ps, tp)) = s.prev {
                s.c += 0.5 * (t - tp) * (pc + fc);
                s.s += 0.5 * (t - tp) * (ps + fs);
            }
            s.prev = Some((fc, fs, t));
            let m = w * (sn * s.c - cs * s.s);
            let md = w * w * (cs * s.c + sn * s.s);
            self.frozen[b] = (m, md);
        }
    }
}

/// Damped Fourier modulus `|Σ (d_n - d_0) e^{-η t_n} e^{iω t_n} Δt|` of a
/// uniformly sampled dipole trace.
pub fn dipole_spectrum(times: &[f64], dipole: &[f64], damping: f64, omegas: &[f64]) -> Result<Vec<f64>> {
    if times.len() != dipole.len() || times.len() < 2 {
        return Err(Error::InvalidParameter("need at least two matching samples".into()));
    }
    let h = times[1] - times[0];
    let d0 = dipole[0];
    let weights: Vec<f64> = times
        .iter()
        .zip(dipole)
        .map(|(t, d)| (d - d0) * libm::exp(-damping * t) * h)
        .collect();
    Ok(omegas
        .iter()
        .map(|w| {
            let step = Complex64::new(libm::cos(w * h), libm::sin(w * h));
            let mut phase = Complex64::new(libm::cos(w * times[0]), libm::sin(w * times[0]));
            let mut acc = Complex64::new(0.0, 0.0);
            for (i, x) in weights.iter().enumerate() {
                acc += phase * x;
                phase *= step;
                if i % 4096 == 4095 {
                    phase /= phase.norm();
                }
            }
            acc.norm()
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub omega: f64,
    pub height: f64,
}

/// Local maxima above `min_relative` of the global maximum, highest first.
/// Positions are refined by a parabola through the three top samples.
pub fn find_peaks(omegas: &[f64], amplitude: &[f64], min_relative: f64) -> Vec<Peak> {
    let top = amplitude.iter().fold(0.0_f64, |m, a| m.max(*a));
    let mut peaks = Vec::new();
    for i in 1..amplitude.len().saturating_sub(1) {
        let (a, b, c) = (amplitude[i - 1], amplitude[i], amplitude[i + 1]);
        if b > a && b >= c && b >= min_relative * top {
            let den = a - 2.0 * b + c;
            let off = if den != 0.0 { 0.5 * (a - c) / den } else { 0.0 };
            let h = omegas[i + 1] - omegas[i];
            peaks.push(Peak {
                omega: omegas[i] + off * h,
                height: b - 0.25 * (a - c) * off,
            });
        }
    }
    peaks.sort_by(|p, q| q.height.total_cmp(&p.height));
    peaks
}

/// The system whose linear response is computed.
#[derive(Debug, Clone, PartialEq)]
pub enum SpectrumSystem {
    /// Length-gauge coupled electron-photon system.
    ExactPzw { max_n: usize },
    /// Coulomb-gauge coupled system in the dressed bilinear form.
    ExactPf { max_n: usize },
    PhotonFree,
    Maxwell,
    PxldaMaxwell(XcConfig),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumParams {
    pub grid: Grid1D,
    pub order: FdOrder,
    pub potential: Potential1D,
    pub modes: ModeSet,
    pub history: HistoryMode,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumRun {
    pub kick: KickProtocol,
    pub dt: f64,
    pub t_end: f64,
    pub stride: usize,
    /// Exponential damping rate `η` of the dipole trace.
    pub damping: f64,
    pub omega_min: f64,
    pub omega_max: f64,
    pub n_omega: usize,
}

impl Default for SpectrumRun {
    fn default() -> Self {
        Self {
            kick: KickProtocol::default(),
            dt: 5e-4,
            t_end: 1000.0,
            stride: 20,
            damping: 5e-3,
            omega_min: 0.0,
            omega_max: 1.5,
            n_omega: 1501,
        }
    }
}

impl SpectrumRun {
    pub fn omegas(&self) -> Vec<f64> {
        match self.n_omega {
            0 => Vec::new(),
            1 => vec![self.omega_min],
            n => (0..n)
                .map(|i| self.omega_min + (self.omega_max - self.omega_min) * i as f64 / (n - 1) as f64)
                .collect(),
        }
    }

    fn propagation(&self) -> PropagationOptions {
        PropagationOptions {
            dt: self.dt,
            t_end: self.t_end,
            stride: self.stride,
            norm_limit: 1e-6,
            kick: Some(self.kick),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    pub omega: Vec<f64>,
    pub amplitude: Vec<f64>,
    pub ground_energy: f64,
    pub max_norm_drift: f64,
    pub energy_drift: f64,
    pub times: Vec<f64>,
    pub dipole: Vec<f64>,
}

fn to_complex(v: &[f64]) -> Vec<Complex64> {
    v.iter().map(|x| Complex64::new(*x, 0.0)).collect()
}

fn exact_run(h: &CoupledHamiltonian, opts: &PropagationOptions) -> Result<(f64, Trajectory)> {
    let gs = ground_state(h, &SolveOptions::default())?;
    let mut sys = LinearSystem::from_coupled(h)?;
    let traj = propagate(&mut sys, to_complex(&gs.vector), Vec::new(), opts)?;
    Ok((gs.energy, traj))
}

/// Prepares the ground state of `system`, kicks it and propagates.
pub fn kick_and_trajectory(
    system: &SpectrumSystem,
    params: &SpectrumParams,
    opts: &PropagationOptions,
) -> Result<(f64, Trajectory)> {
    let matter = MatterSpace::new(&params.grid, params.order)?;
    let v = &params.potential;
    let modes = &params.modes;
    let mean_field = |kind: MeanFieldKind, state: &[f64], energy: f64| -> Result<(f64, Trajectory)> {
        let mut sys = MeanFieldSystem::new(kind, &params.grid, params.order, v, modes, params.history)?;
        let aux = sys.initial_aux();
        Ok((energy, propagate(&mut sys, to_complex(state), aux, opts)?))
    };
    match system {
        SpectrumSystem::ExactPzw { max_n } => {
            exact_run(&build_pzw_hamiltonian(&matter, v, modes, FockTruncation { max_n: *max_n })?, opts)
        }
        SpectrumSystem::ExactPf { max_n } => exact_run(
            &build_pf_hamiltonian(&matter, v, modes, FockTruncation { max_n: *max_n }, PfForm::DressedBilinear)?,
            opts,
        ),
        SpectrumSystem::PhotonFree => {
            let gs = static_ground_state(&matter, v, &PhotonFreeConfig::new(modes.clone()))?;
            mean_field(MeanFieldKind::PhotonFree, &gs.state, gs.energy)
        }
        SpectrumSystem::Maxwell => {
            let gs = matter.ground_state(v, 1.0)?;
            mean_field(MeanFieldKind::Maxwell, &gs.vector, gs.value)
        }
        SpectrumSystem::PxldaMaxwell(config) => {
            let mut config = config.clone();
            config.functional = Functional::PxLda;
            let scf = ScfOptions {
                order: params.order,
                ..ScfOptions::default()
            };
            let ks = scf_solve(&params.grid, v, modes, &config, &scf)?;
            mean_field(MeanFieldKind::PxldaMaxwell(config), &ks.orbital, ks.energy)
        }
    }
}

/// Delta-kick linear-response spectrum of `system`.
pub fn kick_and_spectrum(system: &SpectrumSystem, params: &SpectrumParams, run: &SpectrumRun) -> Result<SpectrumResult> {
    let (ground_energy, traj) = kick_and_trajectory(system, params, &run.propagation())?;
    let omega = run.omegas();
    let amplitude = dipole_spectrum(&traj.times, &traj.dipole, run.damping, &omega)?;
    Ok(SpectrumResult {
        omega,
        amplitude,
        ground_energy,
        max_norm_drift: traj.max_norm_drift,
        energy_drift: traj.energy_drift,
        times: traj.times,
        dipole: traj.dipole,
    })
}

/// The sweep point at cavity frequency `omega` with `λ` fixed by `g/ω`.
pub fn sweep_params(base: &SpectrumParams, omega: f64, g_over_omega: f64) -> Result<SpectrumParams> {
    let mode = crate::exact_qed::CavityMode::from_ratio(omega, g_over_omega)?;
    Ok(SpectrumParams {
        modes: crate::exact_qed::dress_modes(&[mode], base.modes.n_electrons)?,
        ..base.clone()
    })
}

/// One spectrum per cavity frequency; failures are kept per point.
pub fn spectrum_sweep(
    system: &SpectrumSystem,
    base: &SpectrumParams,
    omegas: &[f64],
    g_over_omega: f64,
    run: &SpectrumRun,
) -> Result<Vec<Result<SpectrumResult>>> {
    if omegas.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameter("sweep frequencies must be strictly ascending".into()));
    }
    Ok(omegas
        .iter()
        .map(|&w| sweep_params(base, w, g_over_omega).and_then(|p| kick_and_spectrum(system, &p, run)))
        .collect())
}
