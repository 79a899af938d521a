//! Ground-state sweeps.

use std::collections::HashMap;
use std::sync::Mutex;

use qedlab_core::exact_qed::{
    build_pf_hamiltonian, build_pzw_hamiltonian, dipole_and_variance, excitation_distribution, ground_state,
    selfpol_ground_state, total_photon_number, CoupledHamiltonian, FockTruncation, MatterSpace, SolveOptions,
};
use qedlab_core::pheg::{build_pheg_hamiltonian, pheg_excitation_distribution, pheg_ground_state, pheg_photon_number};
use qedlab_core::photon_free::{reconstruct_photon_observables, static_ground_state, PhotonFreeConfig};
use qedlab_core::qedft::{scf_solve, Functional, ScfOptions, XcConfig};
use rayon::prelude::*;

use crate::config::{Method, PfFormSpec, ReferenceSpec, RunConfig};
use crate::error::CliError;
use crate::points::{expand, setup, Point, Setup};

/// Ground-state observables of one method at one point.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Observables {
    pub energy: f64,
    pub dipole_variance: Option<f64>,
    pub photon_number: Option<f64>,
    pub excitation_distribution: Option<Vec<f64>>,
    pub scf_iterations: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub point: Point,
    pub outcome: Result<Observables, String>,
    pub reference: Option<Result<Observables, String>>,
}

/// Settings a single solve needs beyond the physical point.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Solver {
    method: Method,
    max_n: usize,
    pf_form: PfFormSpec,
}

fn grid_variance(x: &[f64], probabilities: impl Iterator<Item = f64>) -> f64 {
    let (mut n, mut m1, mut m2) = (0.0, 0.0, 0.0);
    for (p, x) in probabilities.zip(x) {
        n += p;
        m1 += p * x;
        m2 += p * x * x;
    }
    m2 / n - (m1 / n) * (m1 / n)
}

fn coupled(h: &CoupledHamiltonian) -> Result<Observables, CliError> {
    let gs = ground_state(h, &SolveOptions::default())?;
    Ok(Observables {
        energy: gs.energy,
        dipole_variance: dipole_and_variance(h, &gs.vector).ok().map(|(_, v)| v),
        photon_number: Some(total_photon_number(h, &gs.vector)?),
        excitation_distribution: Some(excitation_distribution(h, &gs.vector)?),
        scf_iterations: None,
    })
}

pub(crate) fn xc_config(run: &RunConfig, functional: Functional, kappa: f64) -> XcConfig {
    XcConfig {
        functional,
        kappa,
        dimension: run.functional.dimension,
        spin_factor: run.functional.spin_factor.into(),
        mollify_external: run.functional.mollify,
        ..XcConfig::default()
    }
}

fn solve(run: &RunConfig, solver: Solver, s: &Setup, p: &Point) -> Result<Observables, CliError> {
    let matter = MatterSpace::new(&s.grid, s.order)?;
    let x = s.grid.coordinates();
    let real_space = matter.is_real_space();
    let trunc = FockTruncation { max_n: solver.max_n };
    let recon = run.solver.photon_number.reconstruction();
    match solver.method {
        Method::ExactPf => coupled(&build_pf_hamiltonian(
            &matter,
            &s.potential,
            &s.modes,
            trunc,
            solver.pf_form.into(),
        )?),
        Method::ExactPzw => coupled(&build_pzw_hamiltonian(&matter, &s.potential, &s.modes, trunc)?),
        Method::PzwSelfpol => {
            let gs = selfpol_ground_state(&matter, &s.potential, &s.modes, &SolveOptions::default())?;
            let x2: f64 = gs.vector.iter().zip(&x).map(|(c, x)| c * c * x * x).sum();
            // length-gauge vacuum: a = a' + λ x / sqrt(2ω)
            let n: f64 = s.modes.modes.iter().map(|m| m.lambda * m.lambda * x2 / (2.0 * m.omega)).sum();
            Ok(Observables {
                energy: gs.energy,
                dipole_variance: Some(grid_variance(&x, gs.vector.iter().map(|c| c * c))),
                photon_number: Some(n),
                ..Observables::default()
            })
        }
        Method::PhotonFree => {
            let gs = static_ground_state(&matter, &s.potential, &PhotonFreeConfig::new(s.modes.clone()))?;
            let obs = reconstruct_photon_observables(&matter, &gs.state, &s.modes, recon);
            Ok(Observables {
                energy: gs.energy,
                dipole_variance: real_space.then(|| grid_variance(&x, gs.state.iter().map(|c| c * c))),
                photon_number: Some(obs.iter().map(|o| o.photon_number).sum()),
                ..Observables::default()
            })
        }
        Method::Pheg => {
            let h = build_pheg_hamiltonian(
                &s.grid,
                &s.potential,
                &s.modes,
                solver.max_n,
                run.solver.pheg_potential.into(),
            )?;
            let gs = pheg_ground_state(&h, &SolveOptions::default())?;
            let n = pheg_photon_number(&h, &gs.amplitudes, run.solver.photon_number.pheg())?;
            Ok(Observables {
                energy: gs.energy,
                dipole_variance: None,
                photon_number: Some(n.iter().sum()),
                excitation_distribution: Some(pheg_excitation_distribution(&h, &gs.amplitudes)),
                scf_iterations: None,
            })
        }
        Method::QedftPx | Method::QedftPxlda | Method::PxldaMaxwell => {
            let functional = if solver.method == Method::QedftPx {
                Functional::PxOrbital
            } else {
                Functional::PxLda
            };
            let opts = ScfOptions {
                order: s.order,
                ..ScfOptions::default()
            };
            let ks = scf_solve(&s.grid, &s.potential, &s.modes, &xc_config(run, functional, p.kappa), &opts)?;
            let obs = reconstruct_photon_observables(&matter, &ks.orbital, &s.modes, recon);
            Ok(Observables {
                energy: ks.energy,
                dipole_variance: Some(grid_variance(&x, ks.orbital.iter().map(|c| c * c))),
                photon_number: Some(obs.iter().map(|o| o.photon_number).sum()),
                excitation_distribution: None,
                scf_iterations: Some(ks.iterations),
            })
        }
        Method::Maxwell => {
            // a classical field stays zero in a real ground state
            let gs = matter.ground_state(&s.potential, 1.0)?;
            Ok(Observables {
                energy: gs.value,
                dipole_variance: real_space.then(|| grid_variance(&x, gs.vector.iter().map(|c| c * c))),
                photon_number: Some(0.0),
                ..Observables::default()
            })
        }
    }
}

fn reference_solver(r: &ReferenceSpec, run: &RunConfig) -> Solver {
    Solver {
        method: r.method,
        max_n: r.max_n.unwrap_or(run.solver.max_n),
        pf_form: r.pf_form.unwrap_or(run.solver.pf_form),
    }
}

/// Reference solutions shared by the runs of one configuration, keyed by
/// the physical point.
#[derive(Debug, Default)]
pub struct ReferenceCache {
    solved: Mutex<HashMap<[u64; 3], Result<Observables, String>>>,
}

impl ReferenceCache {
    fn get_or_solve(&self, p: &Point, solve: impl FnOnce() -> Result<Observables, String>) -> Result<Observables, String> {
        let key = [p.lambda.to_bits(), p.omega.to_bits(), p.softening.to_bits()];
        if let Some(r) = self.solved.lock().expect("reference cache").get(&key) {
            return r.clone();
        }
        let r = solve();
        self.solved.lock().expect("reference cache").insert(key, r.clone());
        r
    }
}

fn run_point(run: &RunConfig, p: &Point, cache: &ReferenceCache) -> ResultRow {
    let solver = Solver {
        method: run.method,
        max_n: run.solver.max_n,
        pf_form: run.solver.pf_form,
    };
    let attempt = |solver: Solver| -> Result<Observables, String> {
        setup(run, p)
            .and_then(|s| solve(run, solver, &s, p))
            .map_err(|e| e.to_string())
    };
    let outcome = attempt(solver);
    if let Err(e) = &outcome {
        log::warn!("{} at {p:?}: {e}", run.label);
    }
    let reference = run
        .reference
        .as_ref()
        .map(|r| cache.get_or_solve(p, || attempt(reference_solver(r, run))));
    ResultRow {
        point: *p,
        outcome,
        reference,
    }
}

/// Solves every sweep point on `pool`; rows keep the sweep order.
pub fn run_ground(run: &RunConfig, pool: &rayon::ThreadPool, cache: &ReferenceCache) -> Result<Vec<ResultRow>, CliError> {
    let points = expand(run)?;
    log::info!("{}: {} points", run.file_stem(), points.len());
    Ok(pool.install(|| points.par_iter().map(|p| run_point(run, p, cache)).collect()))
}
