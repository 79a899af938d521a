use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use nalgebra::SymmetricEigen;

use super::fock::FockSpace;
use super::matter::{MatterSpace, Momentum};
use super::modes::ModeSet;
use crate::grid::{FdStencil, Potential1D};
use crate::linalg::{lowest_eigenpair, Csr, KronSum, LanczosOptions, DENSE_LIMIT};
use crate::{Error, Result};

/// Photon truncation: `max_n` excitations per mode, inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FockTruncation {
    pub max_n: usize,
}

/// Discretization of the Coulomb-gauge Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PfForm {
    /// Bare modes, `p·A` coupling and the diamagnetic `A²/2` term.
    BareWithA2,
    /// Dressed normal modes with a purely bilinear `p·A` coupling.
    DressedBilinear,
    /// Bare modes with the vector potential entering as a phase on the
    /// finite-difference hoppings (lattice minimal coupling). Its expansion
    /// to second order in `A` is the `p·A + A²/2` form; unlike the naive
    /// expansion it is unitarily equivalent to the length-gauge grid
    /// Hamiltonian for an untruncated photon space.
    Peierls,
}

/// How the photon operators of the representation relate to the physical
/// annihilators `a_α` of the bare modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PhotonFrame {
    /// Ladders are the bare `a_α`.
    Bare,
    /// Ladders are the dressed normal modes. `phased` marks the `iⁿ`
    /// relabelling that makes real-space couplings real.
    Dressed { phased: bool },
    /// Length gauge: `a_α = a'_α + λ_α ε_α x / sqrt(2 ω_α)` up to a phase.
    LengthGauge,
}

/// A coupled electron-photon Hamiltonian on `matter ⊗ Fock`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledHamiltonian {
    pub op: KronSum,
    pub matter: MatterSpace,
    pub fock: FockSpace,
    pub modes: ModeSet,
    pub frame: PhotonFrame,
    /// Frequencies of the ladder operators used in `op`.
    pub ladder_omegas: Vec<f64>,
}

impl CoupledHamiltonian {
    pub fn dim(&self) -> usize {
        self.op.matter_dim() * self.op.photon_dim()
    }

    /// Zero-point energy `Σ ω/2` of the ladders, contained in `op`.
    pub fn ladder_zero_point(&self) -> f64 {
        0.5 * self.ladder_omegas.iter().sum::<f64>()
    }
}

fn check_single_electron(modes: &ModeSet) -> Result<()> {
    if modes.n_electrons != 1 {
        return Err(Error::Unsupported(format!(
            "exact coupled solvers handle one electron, got {}",
            modes.n_electrons
        )));
    }
    Ok(())
}

fn check_potential(matter: &MatterSpace, v: &Potential1D) -> Result<()> {
    if v.values.len() != matter.grid().n_points() {
        return Err(Error::InvalidParameter("potential does not match the grid".into()));
    }
    Ok(())
}

/// Adds the matter Hamiltonian: diagonal parts go on the operator diagonal.
fn add_matter(op: &mut KronSum, matter: &MatterSpace, v: &Potential1D, extra_diag: Option<&[f64]>) -> Result<()> {
    match matter {
        MatterSpace::RealSpace { .. } => {
            let mut d = v.values.clone();
            if let Some(e) = extra_diag {
                d.iter_mut().zip(e).for_each(|(a, b)| *a += b);
            }
            op.add_separable_diagonal(Some(&d), None);
            op.add_term(Some(matter.kinetic(1.0)), None)?;
        }
        MatterSpace::PlaneWaves { .. } => {
            op.add_term(Some(matter.hamiltonian(v, 1.0)?), None)?;
        }
    }
    Ok(())
}

/// `Σ_β c_β Q_β` with `Q = b + b†` (or `b† - b` when antisymmetric).
fn field(fock: &FockSpace, coeffs: &[f64], antisymmetric: bool) -> Result<Csr> {
    let d = fock.dim();
    let mut acc = Csr::from_triplets(d, d, Vec::new())?;
    for (b, &c) in coeffs.iter().enumerate() {
        if c != 0.0 {
            let q = if antisymmetric {
                fock.antisymmetric_quadrature(b)
            } else {
                fock.quadrature(b)
            };
            acc = acc.add(&q.scale(c))?;
        }
    }
    Ok(acc)
}

/// Coulomb-gauge Hamiltonian of one electron coupled to the modes.
///
/// The operator contains the ladder zero-point energy `Σ ω/2` of the
/// frequencies it is written in; see [`CoupledHamiltonian::ladder_zero_point`].
pub fn build_pf_hamiltonian(
    matter: &MatterSpace,
    v: &Potential1D,
    modes: &ModeSet,
    trunc: FockTruncation,
    form: PfForm,
) -> Result<CoupledHamiltonian> {
    check_single_electron(modes)?;
    check_potential(matter, v)?;
    let fock = FockSpace::new(modes.len(), trunc.max_n);
    fock.checked_dim(matter.dim())?;
    let mut op = KronSum::new(matter.dim(), fock.dim());

    let bare = modes.bare_omegas();
    let (ladder_omegas, frame) = match form {
        PfForm::DressedBilinear => (
            modes.dressed_omegas.clone(),
            PhotonFrame::Dressed {
                phased: matter.is_real_space(),
            },
        ),
        PfForm::BareWithA2 | PfForm::Peierls => (bare.clone(), PhotonFrame::Bare),
    };
    let zp: Vec<f64> = fock.energies(&ladder_omegas);
    let zp0 = 0.5 * ladder_omegas.iter().sum::<f64>();
    op.add_separable_diagonal(None, Some(&zp.iter().map(|e| e + zp0).collect::<Vec<_>>()));

    // coefficient of each ladder quadrature in A/c
    let coeffs: Vec<f64> = match form {
        PfForm::DressedBilinear => modes
            .dressed_couplings
            .iter()
            .zip(&modes.dressed_omegas)
            .map(|(g, w)| g / libm::sqrt(2.0 * w))
            .collect(),
        _ => modes
            .modes
            .iter()
            .map(|m| m.lambda * m.polarization / libm::sqrt(2.0 * m.omega))
            .collect(),
    };
    let coupled = coeffs.iter().any(|c| *c != 0.0);
    if coupled && form == PfForm::BareWithA2 {
        op.add_separable_diagonal(None, Some(&a2_truncation_correction(&fock, &coeffs)));
    }

    if form == PfForm::Peierls {
        let (grid, order) = match matter {
            MatterSpace::RealSpace { grid, order } => (grid, *order),
            MatterSpace::PlaneWaves { .. } => {
                return Err(Error::Unsupported(
                    "hopping phases need a real-space grid; plane waves couple through p directly".into(),
                ))
            }
        };
        op.add_separable_diagonal(Some(&v.values), None);
        let stencil = FdStencil::laplacian(order);
        let h = grid.spacing();
        let n = grid.n_points();
        let t0 = -0.5 * stencil.coefficients[0] / (h * h);
        op.add_separable_diagonal(Some(&vec![t0; n]), None);
        let phases = if coupled {
            Some(HoppingPhases::new(&fock, &coeffs))
        } else {
            None
        };
        for (dist, &c) in stencil.coefficients.iter().enumerate().skip(1) {
            let t = -0.5 * c / (h * h);
            let mut trip = Vec::with_capacity(n);
            for i in 0..n {
                let j = i + dist;
                if j < n {
                    trip.push((i, j, t));
                } else if grid.is_periodic() {
                    trip.push((i, j - n, t));
                }
            }
            // S⊗R + Sᵀ⊗Rᵀ split into symmetric and antisymmetric parts
            let s = Csr::from_triplets(n, n, trip)?;
            let st = s.transpose();
            match &phases {
                None => op.add_term(Some(s.add(&st)?), None)?,
                Some(p) => {
                    let r = p.matrix(dist as f64 * h)?;
                    let rt = r.transpose();
                    op.add_term(Some(s.add(&st)?.scale(0.5)), Some(r.add(&rt)?))?;
                    op.add_term(Some(s.add(&st.scale(-1.0))?.scale(0.5)), Some(r.add(&rt.scale(-1.0))?))?;
                }
            }
        }
    } else {
        add_matter(&mut op, matter, v, None)?;
        if coupled {
            match matter.momentum() {
                Momentum::Derivative(dm) => {
                    // iⁿ relabelling: q -> -i (b† - b)/sqrt(2ω), p = -i D
                    op.add_term(Some(dm.scale(-1.0)), Some(field(&fock, &coeffs, true)?))?;
                    if form == PfForm::BareWithA2 {
                        let k = field(&fock, &coeffs, true)?;
                        op.add_term(None, Some(k.matmul(&k)?.scale(-0.5)))?;
                    }
                }
                Momentum::Real(p) => {
                    op.add_term(Some(p), Some(field(&fock, &coeffs, false)?))?;
                    if form == PfForm::BareWithA2 {
                        let q = field(&fock, &coeffs, false)?;
                        op.add_term(None, Some(q.matmul(&q)?.scale(0.5)))?;
                    }
                }
            }
        }
    }
    op.check_symmetric(1e-12)?;
    let frame = if form == PfForm::Peierls { PhotonFrame::Bare } else { frame };
    Ok(CoupledHamiltonian {
        op,
        matter: matter.clone(),
        fock,
        modes: modes.clone(),
        frame,
        ladder_omegas,
    })
}

/// Top-level part of `½ P A² P` lost by squaring the truncated field, which
/// keeps the truncated Hamiltonian a variational projection.
fn a2_truncation_correction(fock: &FockSpace, coeffs: &[f64]) -> Vec<f64> {
    (0..fock.dim())
        .map(|i| {
            coeffs
                .iter()
                .enumerate()
                .filter(|&(b, _)| fock.occupation(i, b) == fock.max_n)
                .map(|(_, c)| 0.5 * c * c * (fock.max_n + 1) as f64)
                .sum()
        })
        .collect()
}

/// `exp(i θ Â)` for `Â = Σ c_α (a_α + a_α†)` in the `iⁿ`-relabelled basis,
/// where it is real orthogonal.
struct HoppingPhases {
    vectors: nalgebra::DMatrix<f64>,
    values: Vec<f64>,
    totals: Vec<usize>,
}

impl HoppingPhases {
    fn new(fock: &FockSpace, coeffs: &[f64]) -> Self {
        let a = field(fock, coeffs, false).expect("field shape").to_dense();
        let eig = SymmetricEigen::new(a);
        Self {
            values: eig.eigenvalues.iter().copied().collect(),
            vectors: eig.eigenvectors,
            totals: (0..fock.dim()).map(|i| fock.total(i)).collect(),
        }
    }

    fn matrix(&self, theta: f64) -> Result<Csr> {
        let d = self.values.len();
        let (c, s): (Vec<f64>, Vec<f64>) = self
            .values
            .iter()
            .map(|mu| (libm::cos(theta * mu), libm::sin(theta * mu)))
            .unzip();
        let mut out = nalgebra::DMatrix::zeros(d, d);
        let mut max_imag = 0.0_f64;
        for m in 0..d {
            for n in 0..d {
                let (mut re, mut im) = (0.0, 0.0);
                for k in 0..d {
                    let w = self.vectors[(m, k)] * self.vectors[(n, k)];
                    re += w * c[k];
                    im += w * s[k];
                }
                // multiply by i^(N_n - N_m)
                let p = (self.totals[n] as isize - self.totals[m] as isize).rem_euclid(4);
                let (r, i) = match p {
                    0 => (re, im),
                    1 => (-im, re),
                    2 => (-re, -im),
                    _ => (im, -re),
                };
                out[(m, n)] = r;
                max_imag = max_imag.max(libm::fabs(i));
            }
        }
        if max_imag > 1e-10 {
            return Err(Error::Assembly(format!("hopping phase is not real after relabelling ({max_imag:e})")));
        }
        Ok(Csr::from_dense(&out, 1e-300))
    }
}

fn selfpol_diagonal(matter: &MatterSpace, modes: &ModeSet) -> Result<Vec<f64>> {
    let x = matter
        .position()
        .ok_or_else(|| Error::BoundaryMismatch("length gauge needs a dirichlet real-space grid".into()))?;
    let l2: f64 = modes.modes.iter().map(|m| m.lambda * m.lambda).sum();
    Ok(x.iter().map(|x| 0.5 * l2 * x * x).collect())
}

fn require_length_gauge_grid(matter: &MatterSpace) -> Result<()> {
    if matter.grid().is_periodic() || !matter.is_real_space() {
        return Err(Error::BoundaryMismatch(
            "length-gauge Hamiltonians break periodicity and need a dirichlet grid".into(),
        ));
    }
    Ok(())
}

/// Length-gauge (PZW) Hamiltonian with bare modes, the `x ⊗ q` coupling and
/// the self-polarization term `Σ ½ λ² x²`.
pub fn build_pzw_hamiltonian(
    matter: &MatterSpace,
    v: &Potential1D,
    modes: &ModeSet,
    trunc: FockTruncation,
) -> Result<CoupledHamiltonian> {
    check_single_electron(modes)?;
    require_length_gauge_grid(matter)?;
    check_potential(matter, v)?;
    let fock = FockSpace::new(modes.len(), trunc.max_n);
    fock.checked_dim(matter.dim())?;
    let mut op = KronSum::new(matter.dim(), fock.dim());
    let bare = modes.bare_omegas();
    let e = fock.energies(&bare);
    let zp0 = 0.5 * bare.iter().sum::<f64>();
    op.add_separable_diagonal(None, Some(&e.iter().map(|x| x + zp0).collect::<Vec<_>>()));
    let sp = selfpol_diagonal(matter, modes)?;
    add_matter(&mut op, matter, v, Some(&sp))?;
    let coeffs: Vec<f64> = modes
        .modes
        .iter()
        .map(|m| m.lambda * m.polarization * libm::sqrt(0.5 * m.omega))
        .collect();
    if coeffs.iter().any(|c| *c != 0.0) {
        let x = matter.position().expect("checked real space");
        op.add_term(Some(Csr::diagonal(&x)), Some(field(&fock, &coeffs, false)?))?;
    }
    op.check_symmetric(1e-12)?;
    Ok(CoupledHamiltonian {
        op,
        matter: matter.clone(),
        fock,
        modes: modes.clone(),
        frame: PhotonFrame::LengthGauge,
        ladder_omegas: bare,
    })
}

/// Length-gauge Hamiltonian with the photons dropped: `T + v + Σ ½ λ² x²`.
pub fn build_pzw_selfpol_hamiltonian(matter: &MatterSpace, v: &Potential1D, modes: &ModeSet) -> Result<Csr> {
    require_length_gauge_grid(matter)?;
    check_potential(matter, v)?;
    let sp = selfpol_diagonal(matter, modes)?;
    matter.kinetic(1.0).add(&Csr::diagonal(
        &v.values.iter().zip(&sp).map(|(a, b)| a + b).collect::<Vec<_>>(),
    ))
}

/// The self-polarization potential `v + Σ ½ λ² x²` as a tabulated potential.
pub fn selfpol_potential(matter: &MatterSpace, v: &Potential1D, modes: &ModeSet) -> Result<Potential1D> {
    require_length_gauge_grid(matter)?;
    check_potential(matter, v)?;
    let sp = selfpol_diagonal(matter, modes)?;
    Potential1D::tabulated(matter.grid(), v.values.iter().zip(&sp).map(|(a, b)| a + b).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    /// Keep `Σ ω̃/2` in reported energies.
    pub include_zero_point: bool,
    pub lanczos: LanczosOptions,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            include_zero_point: false,
            lanczos: LanczosOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoupledGroundState {
    /// Energy with the convention of [`SolveOptions::include_zero_point`].
    pub energy: f64,
    /// Lowest eigenvalue of the operator itself.
    pub raw_energy: f64,
    pub vector: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

/// Lowest eigenstate; Lanczos starts from the uncoupled product state.
pub fn ground_state(h: &CoupledHamiltonian, opts: &SolveOptions) -> Result<CoupledGroundState> {
    let mut lanczos = opts.lanczos.clone();
    if lanczos.start.is_none() && h.dim() > DENSE_LIMIT {
        let mut diag = vec![0.0; h.op.matter_dim()];
        let d = h.op.diagonal();
        let pd = h.op.photon_dim();
        for (m, x) in diag.iter_mut().enumerate() {
            *x = d[m * pd];
        }
        let v = Potential1D::tabulated(h.matter.grid(), match &h.matter {
            MatterSpace::RealSpace { .. } => diag,
            MatterSpace::PlaneWaves { .. } => vec![0.0; h.matter.grid().n_points()],
        })?;
        if let Ok(g) = h.matter.ground_state(&v, 1.0) {
            let mut start = vec![0.0; h.dim()];
            for (m, c) in g.vector.iter().enumerate() {
                start[m * pd] = *c;
            }
            lanczos.start = Some(start);
        }
    }
    let pair = lowest_eigenpair(&h.op, &lanczos)?;
    let energy = if opts.include_zero_point {
        pair.value
    } else {
        pair.value - h.modes.zero_point_dressed()
    };
    Ok(CoupledGroundState {
        energy,
        raw_energy: pair.value,
        vector: pair.vector,
        residual: pair.residual,
        iterations: pair.iterations,
    })
}

/// Ground state of `T + v + Σ ½ λ² x²` with the photons in their vacuum.
///
/// The reported energy is that of the length-gauge product state, i.e. the
/// matter energy plus `Σ ω/2`, referenced like [`ground_state`].
pub fn selfpol_ground_state(
    matter: &MatterSpace,
    v: &Potential1D,
    modes: &ModeSet,
    opts: &SolveOptions,
) -> Result<CoupledGroundState> {
    let vs = selfpol_potential(matter, v, modes)?;
    let pair = matter.ground_state(&vs, 1.0)?;
    let full = pair.value + modes.zero_point_bare();
    let energy = if opts.include_zero_point {
        full
    } else {
        full - modes.zero_point_dressed()
    };
    Ok(CoupledGroundState {
        energy,
        raw_energy: pair.value,
        vector: pair.vector,
        residual: pair.residual,
        iterations: pair.iterations,
    })
}
