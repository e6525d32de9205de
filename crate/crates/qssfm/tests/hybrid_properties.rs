//! Cross-module properties of the hybrid loop on the soliton benchmark.

use qssfm::diagnostics::relative_l2_error;
use qssfm::hybrid::{evolve_hybrid, FilterSpec};
use qssfm::scenarios::{soliton_1d, SolitonForm};
use qssfm::ssfm::evolve;

#[test]
fn filtering_error_is_monotone_in_retained_qubits() {
    let s = soliton_1d(SolitonForm::Sech);
    let init = s.normalized_initial().unwrap();
    let classical = evolve(&init, &s.ssfm_config(), 5.0, 1000).unwrap();
    let mut errors = Vec::new();
    for m in [2u32, 3, 4] {
        let mut cfg = s.hybrid_config();
        cfg.filter = FilterSpec::new(&[m]).unwrap();
        let (traj, _) = evolve_hybrid(&init, &cfg, 5.0, 1000).unwrap();
        errors.push(relative_l2_error(classical.last(), traj.last()).unwrap());
    }
    assert!(
        errors[0] >= errors[1] && errors[1] >= errors[2],
        "errors not monotone in m: {errors:?}"
    );
}

#[test]
fn skipping_renormalization_is_strictly_worse() {
    let s = soliton_1d(SolitonForm::Sech);
    let init = s.normalized_initial().unwrap();
    let classical = evolve(&init, &s.ssfm_config(), 5.0, 1000).unwrap();
    let run = |normalize: bool| {
        let mut cfg = s.hybrid_config();
        cfg.normalize_reconstruction = normalize;
        let (traj, _) = evolve_hybrid(&init, &cfg, 5.0, 1000).unwrap();
        relative_l2_error(classical.last(), traj.last()).unwrap()
    };
    let err_on = run(true);
    let err_off = run(false);
    assert!(
        err_off > err_on,
        "unnormalized run should be strictly worse: {err_off} vs {err_on}"
    );
}
