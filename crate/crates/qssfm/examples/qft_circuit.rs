//! Gate-level QFT on the statevector register: equivalence with the
//! classical unitary DFT and the gate-cost accounting of one split step.
//!
//! ```bash
//! cargo run --release --example qft_circuit
//! ```

use qssfm::grid::{dft_forward, Grid};
use qssfm::qsim::{decode, encode, gate_units, GateCostLedger};
use qssfm::scenarios::{soliton_1d, SolitonForm};
use qssfm::ssfm::nonlinear_phase;

fn main() -> qssfm::Result<()> {
    let scenario = soliton_1d(SolitonForm::Sech);
    let grid: Grid = scenario.grid.clone();
    let initial = scenario.normalized_initial()?;
    let n = grid.total_qubits() as usize;

    // the circuit QFT realizes the same unitary as the spectral transform
    let mut state = encode(&initial)?;
    let mut ledger = GateCostLedger::new();
    state.apply_qft(&mut ledger);
    let spectral = dft_forward(&initial)?;
    let worst = state
        .amplitudes()
        .iter()
        .zip(spectral.values().iter())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    println!("gate-level QFT vs classical DFT on {n} qubits: max amplitude diff {worst:.3e}");
    println!(
        "one QFT costs {} basic-gate units (n(n+1)/2 = {})",
        ledger.basic_gate_units,
        gate_units(n)
    );
    state.apply_iqft(&mut ledger);

    // a full split step: two kinetic sandwiches around the nonlinear gate
    let mut ledger = GateCostLedger::new();
    let mut state = encode(&initial)?;
    state.apply_kinetic(&grid, scenario.tau, &mut ledger)?;
    let intermediate = decode(&state, &grid)?;
    let phases = nonlinear_phase(&intermediate, &scenario.ssfm_config(), 0.0)?;
    state.apply_potential(&phases, grid.total_points(), &mut ledger)?;
    state.apply_kinetic(&grid, scenario.tau, &mut ledger)?;

    let snap = ledger.snapshot();
    println!("\none split step on the register:");
    println!("  qft_count            = {}", snap.qft_count);
    println!("  diag_kinetic_count   = {}", snap.diag_kinetic_count);
    println!("  diag_potential_count = {}", snap.diag_potential_count);
    println!("  basic_gate_units     = {}", snap.basic_gate_units);
    println!("  circuit_depth_units  = {}", snap.circuit_depth_units);
    println!("  register norm        = {:.12}", state.norm());
    Ok(())
}
