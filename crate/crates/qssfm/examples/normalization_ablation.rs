//! Renormalization ablation: evolve the filtered soliton with and without
//! renormalizing the reconstruction before building the nonlinear gate, and
//! track the per-step reconstruction norm (the band deficit the filter
//! induces).
//!
//! ```bash
//! cargo run --release --example normalization_ablation
//! ```

use std::path::PathBuf;

use qssfm::diagnostics::relative_l2_error;
use qssfm::hybrid::evolve_hybrid;
use qssfm::scenarios::{soliton_1d, SolitonForm};
use qssfm::ssfm::evolve;

fn out_dir() -> PathBuf {
    std::env::var_os(qssfm::cli::OUT_ROOT_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("qssfm-runs"))
        .join("normalization-ablation")
}

fn main() -> qssfm::Result<()> {
    let out = out_dir();
    std::fs::create_dir_all(&out)?;

    let scenario = soliton_1d(SolitonForm::Sech);
    let initial = scenario.normalized_initial()?;
    let classical = evolve(&initial, &scenario.ssfm_config(), scenario.t_end, 1000)?;

    for normalize in [true, false] {
        let mut cfg = scenario.hybrid_config();
        cfg.normalize_reconstruction = normalize;
        let (traj, cost) = evolve_hybrid(&initial, &cfg, scenario.t_end, 1000)?;
        let err = relative_l2_error(classical.last(), traj.last())?;
        let min_norm = cost
            .per_step
            .iter()
            .map(|c| c.recon_norm)
            .fold(1.0, f64::min);
        println!(
            "normalize = {normalize:5}: final error {err:.4e}, worst per-step reconstruction norm {min_norm:.6}"
        );
        let name = if normalize { "normalized" } else { "unnormalized" };
        let mut csv = String::from("step,recon_norm\n");
        for c in &cost.per_step {
            csv.push_str(&format!("{},{:?}\n", c.step, c.recon_norm));
        }
        std::fs::write(out.join(format!("recon_norms_{name}.csv")), csv)?;
    }
    println!("wrote reconstruction-norm series to {}", out.display());
    Ok(())
}
