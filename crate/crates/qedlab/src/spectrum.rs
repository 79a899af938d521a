//! Linear-response spectra over a sweep of cavity frequencies.

use qedlab_core::dynamics::{find_peaks, kick_and_spectrum, KickProtocol, Peak, SpectrumParams, SpectrumRun, SpectrumSystem};
use qedlab_core::qedft::Functional;
use rayon::prelude::*;

use crate::config::{Method, RunConfig};
use crate::error::CliError;
use crate::ground::xc_config;
use crate::points::{expand, setup, Point};

/// Peaks below this fraction of the highest one are not reported.
const PEAK_THRESHOLD: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumColumn {
    pub amplitude: Vec<f64>,
    pub ground_energy: f64,
    pub max_norm_drift: f64,
    pub energy_drift: f64,
    pub peaks: Vec<Peak>,
}

/// `|d(ω)|` on the response grid `omega`, one column per cavity point.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumMap {
    pub omega: Vec<f64>,
    pub cavity: Vec<Point>,
    pub columns: Vec<Result<SpectrumColumn, String>>,
}

impl SpectrumMap {
    pub fn failures(&self) -> usize {
        self.columns.iter().filter(|c| c.is_err()).count()
    }
}

pub fn system(run: &RunConfig, kappa: f64) -> Result<SpectrumSystem, CliError> {
    let max_n = run.solver.max_n;
    Ok(match run.method {
        Method::ExactPzw => SpectrumSystem::ExactPzw { max_n },
        Method::ExactPf => SpectrumSystem::ExactPf { max_n },
        Method::PhotonFree => SpectrumSystem::PhotonFree,
        Method::Maxwell => SpectrumSystem::Maxwell,
        Method::PxldaMaxwell => SpectrumSystem::PxldaMaxwell(xc_config(run, Functional::PxLda, kappa)),
        m => return Err(CliError::Config(format!("method `{m}` has no time propagation"))),
    })
}

pub fn spectrum_run(run: &RunConfig) -> SpectrumRun {
    let d = &run.dynamics;
    SpectrumRun {
        kick: KickProtocol {
            strength: d.kick_strength,
            t0: d.kick_t0,
            width: d.kick_width,
        },
        dt: d.dt,
        t_end: d.t_end,
        stride: d.stride,
        damping: d.damping,
        omega_min: d.omega_min,
        omega_max: d.omega_max,
        n_omega: d.n_omega,
    }
}

fn column(run: &RunConfig, p: &Point, r: &SpectrumRun) -> Result<SpectrumColumn, CliError> {
    let s = setup(run, p)?;
    let params = SpectrumParams {
        grid: s.grid,
        order: s.order,
        potential: s.potential,
        modes: s.modes,
        history: run.dynamics.history.into(),
    };
    let out = kick_and_spectrum(&system(run, p.kappa)?, &params, r)?;
    Ok(SpectrumColumn {
        peaks: find_peaks(&out.omega, &out.amplitude, PEAK_THRESHOLD),
        amplitude: out.amplitude,
        ground_energy: out.ground_energy,
        max_norm_drift: out.max_norm_drift,
        energy_drift: out.energy_drift,
    })
}

/// Propagates every cavity point on `pool`; failed points keep their message.
pub fn run_spectrum(run: &RunConfig, pool: &rayon::ThreadPool) -> Result<SpectrumMap, CliError> {
    system(run, run.functional.kappa)?;
    let cavity = expand(run)?;
    let r = spectrum_run(run);
    log::info!("{}: {} cavity points", run.file_stem(), cavity.len());
    let columns = pool.install(|| {
        cavity
            .par_iter()
            .map(|p| {
                let c = column(run, p, &r).map_err(|e| e.to_string());
                match &c {
                    Ok(c) => log::info!("{} at omega {:.4}: norm drift {:.1e}", run.label, p.omega, c.max_norm_drift),
                    Err(e) => log::warn!("{} at {p:?}: {e}", run.label),
                }
                c
            })
            .collect()
    });
    Ok(SpectrumMap {
        omega: r.omegas(),
        cavity,
        columns,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ConfigFile;

    #[test]
    fn static_methods_are_rejected() {
        let text = r#"
            kind = "spectrum"
            method = "pheg"
            [grid]
            points = 11
            spacing = 0.5
            boundary = "periodic"
            [modes]
            omega = 0.4
        "#;
        let run = &ConfigFile::parse(text).unwrap().resolve().unwrap()[0];
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        assert!(matches!(run_spectrum(run, &pool), Err(CliError::Config(_))));
    }

    #[test]
    fn short_free_run_has_no_failures() {
        let text = r#"
            kind = "spectrum"
            method = "photon-free"
            [grid]
            points = 41
            spacing = 0.25
            [modes]
            omega = 0.4
            ratio = 0.1
            [dynamics]
            t_end = 5.0
            dt = 1e-3
            n_omega = 11
            [sweep]
            omega = [0.3, 0.5]
        "#;
        let run = &ConfigFile::parse(text).unwrap().resolve().unwrap()[0];
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let map = run_spectrum(run, &pool).unwrap();
        assert_eq!(map.failures(), 0);
        assert_eq!(map.columns.len(), 2);
        assert_eq!(map.omega.len(), 11);
    }
}
