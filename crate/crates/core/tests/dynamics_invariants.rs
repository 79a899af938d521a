use proptest::prelude::*;
use proptest::test_runner::RngSeed;
use qedlab_core::dynamics::{
    find_peaks, kick_and_spectrum, KickProtocol, SpectrumParams, SpectrumResult, SpectrumRun, SpectrumSystem,
};
use qedlab_core::exact_qed::{dress_modes, CavityMode};
use qedlab_core::grid::{Boundary, FdOrder, Grid1D, Potential1D};
use qedlab_core::photon_free::HistoryMode;
use qedlab_core::qedft::XcConfig;

/// Fixed seed and no regression files: the suite is reproducible.
fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        rng_seed: RngSeed::Fixed(0x0051_ED00),
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

fn params(omega: f64, ratio: f64, history: HistoryMode) -> SpectrumParams {
    let grid = Grid1D::new(101, 0.2, Boundary::Dirichlet).unwrap();
    let potential = Potential1D::soft_coulomb(&grid, 1.0).unwrap();
    let modes = dress_modes(&[CavityMode::from_ratio(omega, ratio).unwrap()], 1).unwrap();
    SpectrumParams {
        grid,
        order: FdOrder::Fourth,
        potential,
        modes,
        history,
    }
}

fn run(strength: f64, t_end: f64) -> SpectrumRun {
    SpectrumRun {
        kick: KickProtocol {
            strength,
            ..KickProtocol::default()
        },
        dt: 5e-3,
        t_end,
        stride: 4,
        damping: 2e-2,
        omega_min: 0.0,
        omega_max: 1.2,
        n_omega: 601,
    }
}

fn system(kind: u8) -> SpectrumSystem {
    match kind {
        0 => SpectrumSystem::PhotonFree,
        1 => SpectrumSystem::Maxwell,
        2 => SpectrumSystem::PxldaMaxwell(XcConfig::default()),
        _ => SpectrumSystem::ExactPzw { max_n: 6 },
    }
}

fn spectrum(kind: u8, omega: f64, ratio: f64, strength: f64, t_end: f64) -> SpectrumResult {
    kick_and_spectrum(&system(kind), &params(omega, ratio, HistoryMode::AuxiliaryOde), &run(strength, t_end)).unwrap()
}

proptest! {
    #![proptest_config(config(8))]

    #[test]
    fn propagation_conserves_norm_and_energy(kind in 0u8..4, omega in 0.1f64..1.0, ratio in 0.0f64..0.3) {
        let s = spectrum(kind, omega, ratio, 1e-3, 60.0);
        prop_assert!(s.max_norm_drift <= 1e-8, "norm {}", s.max_norm_drift);
        prop_assert!(s.energy_drift <= 1e-7, "energy {}", s.energy_drift);
    }

    #[test]
    fn response_is_linear_in_the_kick(kind in 0u8..3, omega in 0.2f64..0.8) {
        let full = spectrum(kind, omega, 0.136, 1e-4, 300.0);
        let half = spectrum(kind, omega, 0.136, 5e-5, 300.0);
        let peaks = find_peaks(&full.omega, &full.amplitude, 0.05);
        prop_assert!(!peaks.is_empty());
        for p in peaks {
            let i = full.omega.iter().position(|w| *w >= p.omega).unwrap();
            let ratio = half.amplitude[i] / full.amplitude[i];
            prop_assert!((ratio - 0.5).abs() <= 0.5e-3, "peak {}: ratio {}", p.omega, ratio);
        }
    }
}
