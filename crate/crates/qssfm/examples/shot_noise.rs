//! Hadamard-test readout under a finite shot budget: the estimator is
//! unbiased and its RMS error falls off as 1/sqrt(shots).
//!
//! ```bash
//! cargo run --release --example shot_noise
//! ```

use qssfm::hybrid::{retained_indices, FilterSpec};
use qssfm::qsim::{encode, hadamard_test, GateCostLedger, MeasurePart, ShotBudget};
use qssfm::scenarios::{soliton_1d, SolitonForm};

fn main() -> qssfm::Result<()> {
    let scenario = soliton_1d(SolitonForm::Sech);
    let initial = scenario.normalized_initial()?;
    let mut state = encode(&initial)?;
    let mut ledger = GateCostLedger::new();
    state.apply_qft(&mut ledger);

    let modes = retained_indices(&FilterSpec::new(&[3])?, &scenario.grid)?;
    println!("reading {} spectral modes of the soliton register\n", modes.len());
    println!("{:>9} {:>12} {:>14}", "shots", "rms error", "1/sqrt(shots)");
    for shots in [100u64, 1_000, 10_000, 100_000, 1_000_000] {
        let mut sum_sq = 0.0;
        let mut count = 0usize;
        for seed in 0..100u64 {
            let budget = ShotBudget::with_shots(shots, seed)?;
            for (k, &mode) in modes.iter().enumerate() {
                for (p, part) in [MeasurePart::Real, MeasurePart::Imag].into_iter().enumerate() {
                    let est = hadamard_test(&state, mode, part, &budget.derive((2 * k + p) as u64))?;
                    let truth = hadamard_test(&state, mode, part, &ShotBudget::exact())?;
                    sum_sq += (est - truth) * (est - truth);
                    count += 1;
                }
            }
        }
        let rms = (sum_sq / count as f64).sqrt();
        println!("{shots:>9} {rms:>12.3e} {:>14.3e}", 1.0 / (shots as f64).sqrt());
    }
    Ok(())
}
