//! Kohn-Sham QEDFT for one occupied orbital: photon-exchange potentials,
//! the pxLDA, mollified external potentials and the self-consistent loop.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::exact_qed::{MatterSpace, ModeSet};
use crate::grid::{self, FdOrder, Grid1D, Potential1D, PotentialKind};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Functional {
    /// No coupling contribution (plain Kohn-Sham).
    None,
    #[default]
    PxOrbital,
    PxLda,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum SpinFactor {
    #[default]
    ClosedShell,
    /// Doubles the pxLDA prefactor (single electron without a spin partner).
    SingleElectronX2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct XcConfig {
    pub functional: Functional,
    pub kappa: f64,
    /// Dimension of the electron gas behind the pxLDA, 1 to 3.
    pub dimension: u32,
    pub spin_factor: SpinFactor,
    pub mollify_external: bool,
    /// Softening of a soft-Coulomb electron-electron interaction (two electrons only).
    pub interaction: Option<f64>,
    pub include_zero_point: bool,
}

impl Default for XcConfig {
    fn default() -> Self {
        Self {
            functional: Functional::PxOrbital,
            kappa: 1.0,
            dimension: 1,
            spin_factor: SpinFactor::ClosedShell,
            mollify_external: false,
            interaction: None,
            include_zero_point: false,
        }
    }
}

impl XcConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.kappa >= 0.0) || !self.kappa.is_finite() {
            return Err(Error::InvalidParameter(format!("kappa must be non-negative, got {}", self.kappa)));
        }
        if !(1..=3).contains(&self.dimension) {
            return Err(Error::InvalidParameter(format!("dimension must be 1, 2 or 3, got {}", self.dimension)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScfOptions {
    pub mixing: f64,
    pub max_iter: usize,
    pub density_tol: f64,
    pub energy_tol: f64,
    pub order: FdOrder,
}

impl Default for ScfOptions {
    fn default() -> Self {
        Self {
            mixing: 0.3,
            max_iter: 2000,
            density_tol: 1e-9,
            energy_tol: 1e-10,
            order: FdOrder::Fourth,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KsState {
    /// Unit-norm orbital coefficients on the grid (`Σ φ² = 1`).
    pub orbital: Vec<f64>,
    /// `occ φ²/dx`, integrates to the electron number.
    pub density: Vec<f64>,
    pub occupation: usize,
    pub eigenvalue: f64,
    /// External potential as used in the solve (mollified if configured).
    pub v_ext: Vec<f64>,
    pub v_xc: Vec<f64>,
    pub v_hx: Option<Vec<f64>>,
    pub energy: f64,
    pub iterations: usize,
}

/// Per-mode `ω_d²/(2ω̃²)` for the orbital px potential.
fn px_weight(modes: &ModeSet) -> f64 {
    0.5 * modes.n_electrons as f64 * modes.mass_fraction()
}

/// Orbital photon-exchange potential of a single real orbital.
///
/// `v = c (∂²√ρ)/√ρ` with the grid Laplacian, minus the linear function
/// through its edge values so that it vanishes at both box edges. Points with
/// `ρ < 1e-12 max ρ` take the linear extrapolation of the neighbouring
/// interior values.
pub fn v_px_orbital(orbital: &[f64], grid: &Grid1D, modes: &ModeSet, order: FdOrder) -> Result<Vec<f64>> {
    grid.require_dirichlet("the orbital px potential")?;
    let n = grid.n_points();
    if orbital.len() != n {
        return Err(Error::InvalidParameter("orbital does not match the grid".into()));
    }
    let c = px_weight(modes);
    if c == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let phi: Vec<f64> = orbital.iter().map(|x| libm::fabs(*x)).collect();
    let max = phi.iter().fold(0.0_f64, |m, x| m.max(*x));
    if !(max > 0.0) || !max.is_finite() {
        return Err(Error::EmptyDensity);
    }
    let floor = 1e-6 * max; // ρ > 1e-12 max ρ
    let lphi = grid::apply(&grid::laplacian(grid, order), &phi);
    let mut v = vec![0.0; n];
    let inside: Vec<bool> = phi.iter().map(|p| *p > floor).collect();
    for i in 0..n {
        if inside[i] {
            v[i] = c * lphi[i] / phi[i];
        }
    }
    let first = inside.iter().position(|b| *b).ok_or(Error::EmptyDensity)?;
    let last = inside.iter().rposition(|b| *b).ok_or(Error::EmptyDensity)?;
    extrapolate_tails(&mut v, first, last);
    remove_edge_line(&mut v);
    Ok(v)
}

fn extrapolate_tails(v: &mut [f64], first: usize, last: usize) {
    let n = v.len();
    let slope_left = if first + 1 <= last { v[first + 1] - v[first] } else { 0.0 };
    for i in 0..first {
        v[i] = v[first] - slope_left * (first - i) as f64;
    }
    let slope_right = if last >= first + 1 { v[last] - v[last - 1] } else { 0.0 };
    for i in last + 1..n {
        v[i] = v[last] + slope_right * (i - last) as f64;
    }
}

/// Subtracts the line through the two edge values.
fn remove_edge_line(v: &mut [f64]) {
    let n = v.len();
    let (a, b) = (v[0], v[n - 1]);
    for (i, x) in v.iter_mut().enumerate() {
        let t = i as f64 / (n - 1) as f64;
        *x -= a + (b - a) * t;
    }
}

/// Source `∂²v` of the orbital px potential from the current form,
/// `-c ∂[∂[(φ')² - φ''φ]/φ²]`, with spectral derivatives.
pub fn px_source_current_form(phi: &[f64], dx: f64, weight: f64) -> Vec<f64> {
    let d1 = grid::spectral_derivative(phi, dx, 1);
    let d2 = grid::spectral_derivative(phi, dx, 2);
    let num: Vec<f64> = d1.iter().zip(&d2).zip(phi).map(|((a, b), p)| a * a - b * p).collect();
    let dnum = grid::spectral_derivative(&num, dx, 1);
    let q: Vec<f64> = dnum.iter().zip(phi).map(|(a, p)| a / (p * p)).collect();
    grid::spectral_derivative(&q, dx, 1).iter().map(|x| -weight * x).collect()
}

/// The same source from the density form, `c ∂²[∂²√ρ/√ρ]`.
pub fn px_source_density_form(phi: &[f64], dx: f64, weight: f64) -> Vec<f64> {
    let d2 = grid::spectral_derivative(phi, dx, 2);
    let q: Vec<f64> = d2.iter().zip(phi).map(|(a, p)| a / p).collect();
    grid::spectral_derivative(&q, dx, 2).iter().map(|x| weight * x).collect()
}

/// Volume of the unit sphere in `d` dimensions.
pub fn unit_sphere_volume(d: u32) -> f64 {
    match d {
        1 => 2.0,
        2 => core::f64::consts::PI,
        _ => 4.0 * core::f64::consts::PI / 3.0,
    }
}

fn pxlda_prefactor(modes: &ModeSet, config: &XcConfig) -> f64 {
    let spin = match config.spin_factor {
        SpinFactor::ClosedShell => 1.0,
        SpinFactor::SingleElectronX2 => 2.0,
    };
    // ω_d²/(N_e ω̃²) summed over modes
    2.0 * config.kappa * core::f64::consts::PI * core::f64::consts::PI * modes.mass_fraction() * spin
}

fn lda_gas_term(rho: f64, d: u32) -> f64 {
    libm::pow(libm::fmax(rho, 0.0) / (2.0 * unit_sphere_volume(d)), 2.0 / d as f64)
}

/// pxLDA potential, isotropic closed form `-C (ρ/2V_d)^{2/d} / d`.
pub fn v_pxlda(density: &[f64], modes: &ModeSet, config: &XcConfig) -> Result<Vec<f64>> {
    config.validate()?;
    let c = pxlda_prefactor(modes, config) / config.dimension as f64;
    Ok(density.iter().map(|r| -c * lda_gas_term(*r, config.dimension)).collect())
}

/// pxLDA potential from the polarization-projected Poisson equation
/// `∂²v = -C ∂²(ρ/2V_d)^{2/d}`, zero at both box edges.
pub fn v_pxlda_poisson(density: &[f64], grid: &Grid1D, modes: &ModeSet, config: &XcConfig) -> Result<Vec<f64>> {
    config.validate()?;
    let c = pxlda_prefactor(modes, config);
    let f: Vec<f64> = density.iter().map(|r| lda_gas_term(*r, config.dimension)).collect();
    let lf = grid::apply(&grid::laplacian(grid, FdOrder::Second), &f);
    // laplacian(v) = -source with source = C ∂² f
    let source: Vec<f64> = lf.iter().map(|x| c * x).collect();
    grid::poisson_solve_1d(&source, grid)
}

/// pxLDA energy density integral `∫ e(ρ)` with `de/dρ = v_pxLDA`.
pub fn pxlda_energy(density: &[f64], grid: &Grid1D, modes: &ModeSet, config: &XcConfig) -> Result<f64> {
    config.validate()?;
    let d = config.dimension as f64;
    let c = pxlda_prefactor(modes, config) / d;
    let p = 2.0 / d;
    let e: Vec<f64> = density
        .iter()
        .map(|r| -c * libm::fmax(*r, 0.0) * lda_gas_term(*r, config.dimension) / (p + 1.0))
        .collect();
    Ok(grid.integrate(&e))
}

/// External potential convolved with the normalized Gaussian `m^{0,0}` of
/// every mode, by direct quadrature truncated at 10σ. Outside the box the
/// potential is continued analytically when its form is known and by its
/// edge value otherwise.
pub fn mollify_external(v: &Potential1D, grid: &Grid1D, modes: &ModeSet) -> Result<Potential1D> {
    // a product of Gaussians along one axis is a Gaussian with Σ 1/a
    let inv: f64 = modes.mollifier_parameters().iter().map(|a| 1.0 / a).sum();
    let n = grid.n_points();
    if inv == 0.0 {
        return Ok(v.clone());
    }
    let a = 1.0 / inv;
    let sigma = libm::sqrt(0.5 / a);
    let dx = grid.spacing();
    let half = libm::ceil(10.0 * sigma / dx) as isize;
    let weights: Vec<f64> = (-half..=half).map(|j| libm::exp(-a * (j as f64 * dx) * (j as f64 * dx))).collect();
    let total: f64 = weights.iter().sum();
    let at = |i: isize| -> f64 {
        if (0..n as isize).contains(&i) {
            v.values[i as usize]
        } else {
            let x = grid.x(0) + i as f64 * dx;
            match v.kind {
                PotentialKind::Tabulated => v.values[if i < 0 { 0 } else { n - 1 }],
                _ => v.eval(x).unwrap_or(0.0),
            }
        }
    };
    let out: Vec<f64> = (0..n as isize)
        .map(|i| {
            (-half..=half)
                .zip(&weights)
                .map(|(j, w)| w * at(i + j))
                .sum::<f64>()
                / total
        })
        .collect();
    Potential1D::tabulated(grid, out)
}

fn soft_coulomb_derivative(x: f64, softening: f64) -> f64 {
    // d/dx (x² + ξ²)^{-1/2}
    let r2 = x * x + softening * softening;
    -x / (r2 * libm::sqrt(r2))
}

/// Interaction force density `F_W(x) = -ρ(x) ∫ ρ(x')/2 ∂_x w(x - x') dx'`
/// of a doubly occupied orbital.
pub fn interaction_force(density: &[f64], grid: &Grid1D, softening: f64) -> Vec<f64> {
    let n = grid.n_points();
    let dx = grid.spacing();
    (0..n)
        .map(|i| {
            let s: f64 = (0..n)
                .map(|j| 0.5 * density[j] * soft_coulomb_derivative(grid.x(i) - grid.x(j), softening))
                .sum();
            -density[i] * s * dx
        })
        .collect()
}

/// Hartree-exchange potential from `∂²v = -∂(F_W/ρ)`, zero at the box edges.
/// One electron has no interaction partner and gets a zero potential.
pub fn v_hx(orbital: &[f64], grid: &Grid1D, n_electrons: usize, softening: Option<f64>) -> Result<Vec<f64>> {
    grid.require_dirichlet("the Hartree-exchange potential")?;
    let n = grid.n_points();
    let Some(xi) = softening else {
        return Ok(vec![0.0; n]);
    };
    if n_electrons < 2 {
        log::warn!("v_hx requested for one electron; the interaction force vanishes");
        return Ok(vec![0.0; n]);
    }
    if n_electrons > 2 {
        return Err(Error::Unsupported("one doubly occupied orbital holds at most two electrons".into()));
    }
    let dx = grid.spacing();
    let density: Vec<f64> = orbital.iter().map(|c| 2.0 * c * c / dx).collect();
    // F_W/ρ without the division: -∫ ρ'/2 ∂w
    let g: Vec<f64> = (0..n)
        .map(|i| {
            -(0..n)
                .map(|j| 0.5 * density[j] * soft_coulomb_derivative(grid.x(i) - grid.x(j), xi))
                .sum::<f64>()
                * dx
        })
        .collect();
    let dg = grid::apply(&grid::first_derivative(grid, FdOrder::Fourth), &g);
    grid::poisson_solve_1d(&dg, grid)
}

/// `(⟨T⟩, ⟨v_ext⟩)` of the occupied orbital, per electron.
fn one_body_terms(state: &KsState, grid: &Grid1D, order: FdOrder) -> (f64, f64) {
    let matter = MatterSpace::RealSpace {
        grid: grid.clone(),
        order,
    };
    let phi = &state.orbital;
    let t = grid::apply(&matter.kinetic(1.0), phi);
    let kin: f64 = phi.iter().zip(&t).map(|(a, b)| a * b).sum();
    let pot: f64 = phi.iter().zip(&state.v_ext).map(|(a, v)| a * a * v).sum();
    (kin, pot)
}

/// Hartree plus exchange energy of a doubly occupied orbital.
fn hx_energy(state: &KsState, grid: &Grid1D, config: &XcConfig) -> f64 {
    let (Some(xi), 2) = (config.interaction, state.occupation) else {
        return 0.0;
    };
    let rho = &state.density;
    let dx = grid.spacing();
    let mut pair = 0.0;
    for i in 0..rho.len() {
        for j in 0..rho.len() {
            pair -= rho[i] * rho[j] * grid::soft_coulomb_value(grid.x(i) - grid.x(j), xi);
        }
    }
    // Hartree minus closed-shell exchange is a quarter of the pair sum
    0.25 * pair * dx * dx
}

/// Total energy from the explicit expression
/// `occ [⟨T⟩ + ⟨v⟩ - Σ γ_β ⟨p²⟩/2] + E_Hx (+ Σ ω̃/2)`.
pub fn total_energy_mx(state: &KsState, grid: &Grid1D, modes: &ModeSet, config: &XcConfig, order: FdOrder) -> Result<f64> {
    let (kin, pot) = one_body_terms(state, grid, order);
    let occ = state.occupation as f64;
    let mut e = occ * (kin + pot - modes.mass_fraction() * kin) + hx_energy(state, grid, config);
    if config.include_zero_point {
        e += modes.zero_point_dressed();
    }
    Ok(e)
}

/// Energy of a Kohn-Sham state with the coupling term of its functional:
/// the orbital expression for px, the local energy density whose derivative
/// is `v_pxLDA` for the pxLDA, and none for plain Kohn-Sham.
pub fn ks_total_energy(state: &KsState, grid: &Grid1D, modes: &ModeSet, config: &XcConfig, order: FdOrder) -> Result<f64> {
    if config.functional == Functional::PxOrbital {
        return total_energy_mx(state, grid, modes, config, order);
    }
    let (kin, pot) = one_body_terms(state, grid, order);
    let mut e = state.occupation as f64 * (kin + pot) + hx_energy(state, grid, config);
    if config.functional == Functional::PxLda {
        e += pxlda_energy(&state.density, grid, modes, config)?;
    }
    if config.include_zero_point {
        e += modes.zero_point_dressed();
    }
    Ok(e)
}

/// Self-consistent Kohn-Sham ground state with linear density mixing.
pub fn scf_solve(
    grid: &Grid1D,
    v_ext: &Potential1D,
    modes: &ModeSet,
    config: &XcConfig,
    opts: &ScfOptions,
) -> Result<KsState> {
    grid.require_dirichlet("the Kohn-Sham solver")?;
    config.validate()?;
    let occ = modes.n_electrons;
    if !(1..=2).contains(&occ) {
        return Err(Error::Unsupported(format!("one orbital holds one or two electrons, got {occ}")));
    }
    let v = if config.mollify_external {
        mollify_external(v_ext, grid, modes)?
    } else {
        v_ext.clone()
    };
    let matter = MatterSpace::RealSpace {
        grid: grid.clone(),
        order: opts.order,
    };
    let dx = grid.spacing();
    let solve = |v_eff: &[f64]| -> Result<(f64, Vec<f64>)> {
        let p = Potential1D::tabulated(grid, v_eff.to_vec())?;
        let pair = matter.ground_state(&p, 1.0)?;
        Ok((pair.value, pair.vector))
    };
    let (_, orbital) = solve(&v.values)?;
    let mut rho: Vec<f64> = orbital.iter().map(|c| occ as f64 * c * c / dx).collect();
    let mut last_energy = f64::INFINITY;
    let mut history = Vec::new();
    let uncoupled = modes.uncoupled() && config.interaction.is_none();
    for it in 1..=opts.max_iter {
        let phi_in: Vec<f64> = rho.iter().map(|r| libm::sqrt(libm::fmax(*r, 0.0) * dx / occ as f64)).collect();
        let v_xc = xc_potential(&phi_in, &rho, grid, modes, config, opts.order)?;
        let v_hx = v_hx(&phi_in, grid, occ, config.interaction)?;
        let v_eff: Vec<f64> = v.values.iter().zip(&v_xc).zip(&v_hx).map(|((a, b), c)| a + b + c).collect();
        let (eig, orbital) = solve(&v_eff)?;
        let rho_out: Vec<f64> = orbital.iter().map(|c| occ as f64 * c * c / dx).collect();
        let change = rho.iter().zip(&rho_out).fold(0.0_f64, |m, (a, b)| m.max(libm::fabs(a - b)));
        let mut state = KsState {
            orbital: orbital.clone(),
            density: rho_out.clone(),
            occupation: occ,
            eigenvalue: eig,
            v_ext: v.values.clone(),
            v_xc: v_xc.clone(),
            v_hx: config.interaction.map(|_| v_hx.clone()),
            energy: 0.0,
            iterations: it,
        };
        let energy = ks_total_energy(&state, grid, modes, config, opts.order)?;
        history.push(change);
        if uncoupled || (change <= opts.density_tol && libm::fabs(energy - last_energy) <= opts.energy_tol) {
            state.energy = energy;
            log::debug!("scf converged after {it} iterations");
            return Ok(state);
        }
        last_energy = energy;
        for (r, o) in rho.iter_mut().zip(&rho_out) {
            *r = (1.0 - opts.mixing) * *r + opts.mixing * o;
        }
    }
    Err(Error::ScfNotConverged {
        iterations: opts.max_iter,
        last_change: history.last().copied().unwrap_or(f64::NAN),
        history,
    })
}

fn xc_potential(
    phi: &[f64],
    rho: &[f64],
    grid: &Grid1D,
    modes: &ModeSet,
    config: &XcConfig,
    order: FdOrder,
) -> Result<Vec<f64>> {
    match config.functional {
        Functional::None => Ok(vec![0.0; grid.n_points()]),
        Functional::PxOrbital => v_px_orbital(phi, grid, modes, order),
        Functional::PxLda => v_pxlda(rho, modes, config),
    }
}
