//! Expansion of sweep axes into parameter points and per-point setup.

use qedlab_core::exact_qed::{dress_modes, lambda_from_ratio, CavityMode, MatterSpace, ModeSet};
use qedlab_core::grid::{FdOrder, Grid1D, Potential1D};
use serde::Serialize;

use crate::config::{OmegaSpec, RunConfig};
use crate::error::CliError;

/// One point of a sweep with every axis resolved.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Point {
    pub lambda: f64,
    pub omega: f64,
    pub softening: f64,
    pub kappa: f64,
}

#[derive(Debug, Clone)]
pub struct Setup {
    pub grid: Grid1D,
    pub order: FdOrder,
    pub potential: Potential1D,
    pub modes: ModeSet,
}

pub fn grid(run: &RunConfig) -> Result<Grid1D, CliError> {
    Ok(Grid1D::new(run.grid.points, run.grid.spacing, run.grid.boundary.into())?)
}

pub fn potential(run: &RunConfig, grid: &Grid1D, softening: f64) -> Result<Potential1D, CliError> {
    if run.potential.free {
        Ok(Potential1D::zero(grid))
    } else {
        Ok(Potential1D::soft_coulomb(grid, softening)?)
    }
}

/// First bare excitation energy `E₁ - E₀` of the configured system.
pub fn resonance(run: &RunConfig, softening: f64) -> Result<f64, CliError> {
    if run.potential.free {
        return Err(CliError::Config("`resonance` needs a binding potential".into()));
    }
    let g = grid(run)?;
    let v = potential(run, &g, softening)?;
    let m = MatterSpace::new(&g, run.grid.fd_order()?)?;
    Ok(m.eigenpair(&v, 1.0, 1)?.value - m.eigenpair(&v, 1.0, 0)?.value)
}

fn resolve_omega(run: &RunConfig, w: OmegaSpec, softening: f64) -> Result<f64, CliError> {
    match w {
        OmegaSpec::Value(w) => Ok(w),
        OmegaSpec::Keyword(_) => resonance(run, softening),
    }
}

fn axis(values: &Option<Vec<f64>>, fallback: f64) -> Vec<f64> {
    values.clone().unwrap_or_else(|| vec![fallback])
}

/// All points, softening outermost and λ innermost.
pub fn expand(run: &RunConfig) -> Result<Vec<Point>, CliError> {
    let softening = axis(&run.sweep.softening, run.potential.softening);
    let kappa = axis(&run.sweep.kappa, run.functional.kappa);
    let omegas = run.omega_axis();
    let mut out = Vec::new();
    for &xi in &softening {
        let resolved: Vec<f64> = omegas
            .iter()
            .map(|w| resolve_omega(run, *w, xi))
            .collect::<Result<_, _>>()?;
        for &k in &kappa {
            for &w in &resolved {
                let lambdas = match run.modes.ratio {
                    Some(r) => vec![lambda_from_ratio(w, r)],
                    None => axis(&run.sweep.lambda, run.modes.lambda.unwrap_or(0.0)),
                };
                for l in lambdas {
                    out.push(Point {
                        lambda: l,
                        omega: w,
                        softening: xi,
                        kappa: k,
                    });
                }
            }
        }
    }
    Ok(out)
}

pub fn setup(run: &RunConfig, p: &Point) -> Result<Setup, CliError> {
    let grid = grid(run)?;
    let potential = potential(run, &grid, p.softening)?;
    let mode = CavityMode::new(p.omega, p.lambda, 1.0)?;
    let modes = dress_modes(&vec![mode; run.modes.count], 1)?;
    Ok(Setup {
        order: run.grid.fd_order()?,
        grid,
        potential,
        modes,
    })
}
