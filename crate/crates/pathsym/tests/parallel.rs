use pathsym::parallel;
use pathsym_core::metrology::{self, phase_grid};
use pathsym_core::simulate::{crb_trial_suite, TrialConfig, TrialSuite};
use pathsym_core::states;

#[test]
fn parallel_trials_match_sequential() {
    let state = states::squeezed_coherent(1.2, 0.4, &Default::default()).unwrap();
    let config = TrialConfig {
        phi_true: 0.7,
        samples: 2_000,
        trials: 24,
        seed: 99,
        window: 0.1,
        grid_points: 101,
    };
    let sequential = crb_trial_suite(&state, config).unwrap();
    let parallel = parallel::run_trials(&TrialSuite::new(&state, config).unwrap()).unwrap();
    assert_eq!(sequential, parallel);
}

#[test]
fn parallel_scan_matches_direct_sum() {
    let state = states::pair_state(0.6, &Default::default()).unwrap();
    let grid = phase_grid(16);
    let scan = parallel::cfi_scan(&state, &grid);
    let report = metrology::report(&state, &grid, 1e-9).unwrap();
    for (p, (phi, cfi)) in scan.iter().zip(&report.cfi_scan) {
        assert_eq!(p.phi, *phi);
        assert!((p.cfi - cfi).abs() <= 1e-12 * cfi);
    }
}

#[test]
fn linspace_includes_both_ends() {
    assert_eq!(parallel::linspace(0.0, 1.0, 4), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    assert_eq!(parallel::linspace(2.0, 3.0, 0), vec![2.0]);
}
