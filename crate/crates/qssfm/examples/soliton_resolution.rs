//! Resolution sweep: the retained window m = 4 is fixed while the register
//! size n varies, showing that filtering quality depends on m, not n.
//!
//! ```bash
//! cargo run --release --example soliton_resolution
//! ```

use qssfm::diagnostics::relative_l2_error;
use qssfm::grid::dft_forward;
use qssfm::hybrid::{evolve_hybrid, retained_indices, FilterSpec};
use qssfm::scenarios::{soliton_1d_with_qubits, SolitonForm};
use qssfm::ssfm::evolve;

fn main() -> qssfm::Result<()> {
    let filter = FilterSpec::new(&[4])?;
    let mut reference_coeffs: Option<Vec<num_complex::Complex64>> = None;

    for n in [5u32, 8, 11] {
        let scenario = soliton_1d_with_qubits(SolitonForm::Sech, n)?;
        let initial = scenario.normalized_initial()?;

        // the retained coefficients at t = 0 depend only on m
        let spectrum = dft_forward(&initial)?;
        let coeffs: Vec<_> = retained_indices(&filter, &scenario.grid)?
            .iter()
            .map(|&l| spectrum.values()[l])
            .collect();
        if let Some(base) = &reference_coeffs {
            let peak = base.iter().map(|c| c.norm()).fold(0.0, f64::max);
            let worst = coeffs
                .iter()
                .zip(base.iter())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            println!("n = {n}: retained coefficients differ from n = 5 by {:.2e} (relative)", worst / peak);
        } else {
            reference_coeffs = Some(coeffs.clone());
        }

        let (traj, _) = evolve_hybrid(&initial, &scenario.hybrid_config(), scenario.t_end, 1000)?;
        let classical = evolve(&initial, &scenario.ssfm_config(), scenario.t_end, 1000)?;
        let err = relative_l2_error(classical.last(), traj.last())?;
        println!(
            "n = {n:2}: {} grid points, final filtered-vs-classical error {err:.4e}",
            scenario.grid.shape()[0]
        );
    }
    Ok(())
}
