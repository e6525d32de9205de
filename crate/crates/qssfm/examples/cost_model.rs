//! Resource model: the three-method complexity table and the closed-form
//! runtime of the filtered hybrid loop.
//!
//! ```bash
//! cargo run --release --example cost_model
//! ```

use qssfm::cli::cost_table;
use qssfm::hybrid::predicted_runtime;

fn main() -> qssfm::Result<()> {
    // the soliton benchmark: n = 8 qubits, m = 4, 5000 steps
    println!("soliton benchmark (N_t = 5000, n = 8, m = 4, eps = 0.01):\n");
    let table = cost_table(5000, &[4], &[8], 0.01)?;
    print!("{}", table.render());

    println!("\ncylinder benchmark (N_t = 10000, n = (9,7), m = (7,5), eps = 0.01):\n");
    let table = cost_table(10_000, &[7, 5], &[9, 7], 0.01)?;
    print!("{}", table.render());

    println!("\nre-preparation overhead is quadratic in the step count:");
    for n_t in [10u64, 100, 1_000, 10_000] {
        let units = predicted_runtime(n_t, 16, 8, 1_000);
        println!("  N_t = {n_t:>6}: {units:.3e} runtime units");
    }
    let r = predicted_runtime(20_000, 16, 8, 1_000) / predicted_runtime(10_000, 16, 8, 1_000);
    println!("  doubling N_t at 10^4 steps multiplies the cost by {r:.4}");
    Ok(())
}
