//! Command-line front end: scenario runs, run comparison, and the cost model.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qssfm::cli;

#[derive(Parser)]
#[command(name = "qssfm", about = "Hybrid quantum-classical NLSE solver", version)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve a scenario and write snapshots, manifest, and reports.
    Run {
        /// Flat key = value config file; flags override file values.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        scenario: Option<String>,
        /// classical | ideal-qssfm | filtered-ideal | filtered-shots
        #[arg(long)]
        solver: Option<String>,
        /// Per-axis retained qubits, e.g. "4" or "3,3".
        #[arg(long)]
        m: Option<String>,
        /// Renormalize the reconstruction before building the phase gate.
        #[arg(long)]
        normalize: Option<String>,
        #[arg(long)]
        shots: Option<String>,
        #[arg(long)]
        seed: Option<String>,
        #[arg(long)]
        tau: Option<String>,
        #[arg(long)]
        t_end: Option<String>,
        /// Per-axis qubit override (soliton only), e.g. "11".
        #[arg(long)]
        qubits: Option<String>,
        #[arg(long)]
        sample_every: Option<String>,
        #[arg(long)]
        merge: Option<String>,
        /// Also write CSV snapshots for plotting.
        #[arg(long)]
        csv: Option<String>,
        /// Also run the classical reference and write an error report.
        #[arg(long)]
        reference: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Extra key=value overrides.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// Compare two run directories (the first is the reference).
    Compare {
        run_a: PathBuf,
        run_b: PathBuf,
        /// Output directory for the error report (default: RUN_B/compare).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the complexity table for the three methods.
    Cost {
        #[arg(long)]
        steps: u64,
        /// Per-axis retained qubits, e.g. "4" or "7,5".
        #[arg(long)]
        m: String,
        /// Per-axis register qubits, e.g. "8" or "9,7".
        #[arg(long)]
        qubits: String,
        #[arg(long, default_value = "0.01")]
        epsilon: f64,
    },
    /// List the built-in scenarios and their defaults.
    ListScenarios,
}

fn parse_axis_list(s: &str) -> Result<Vec<u32>, String> {
    s.split(',')
        .map(|p| p.trim().parse().map_err(|_| format!("bad axis list '{s}'")))
        .collect()
}

fn run_command(args: Args) -> Result<(), qssfm::Error> {
    match args.command {
        Command::Run {
            config,
            scenario,
            solver,
            m,
            normalize,
            shots,
            seed,
            tau,
            t_end,
            qubits,
            sample_every,
            merge,
            csv,
            reference,
            out,
            set,
        } => {
            let mut overrides: Vec<(String, String)> = Vec::new();
            let mut push = |key: &str, value: Option<String>| {
                if let Some(v) = value {
                    overrides.push((key.to_string(), v));
                }
            };
            push("scenario", scenario);
            push("solver", solver);
            push("m", m);
            push("normalize", normalize);
            push("shots", shots);
            push("seed", seed);
            push("tau", tau);
            push("t_end", t_end);
            push("qubits", qubits);
            push("sample_every", sample_every);
            push("merge", merge);
            push("csv", csv);
            push("reference", reference);
            push("out", out.map(|p| p.display().to_string()));
            for pair in set {
                let (k, v) = pair
                    .split_once('=')
                    .ok_or_else(|| qssfm::Error::Config(format!("--set expects KEY=VALUE, got '{pair}'")))?;
                overrides.push((k.trim().to_string(), v.trim().to_string()));
            }
            let summary = cli::cmd_run(config.as_deref(), &overrides)?;
            println!(
                "wrote {} snapshots over {} steps to {}",
                summary.snapshots,
                summary.steps,
                summary.out_dir.display()
            );
            Ok(())
        }
        Command::Compare { run_a, run_b, out } => {
            let out_dir = out.unwrap_or_else(|| run_b.join("compare"));
            let report = cli::cmd_compare(&run_a, &run_b, &out_dir)?;
            println!(
                "final relative L2 density error = {:.6e} (report in {})",
                report.relative_l2_density_error,
                out_dir.display()
            );
            Ok(())
        }
        Command::Cost {
            steps,
            m,
            qubits,
            epsilon,
        } => {
            let m = parse_axis_list(&m).map_err(qssfm::Error::Config)?;
            let qubits = parse_axis_list(&qubits).map_err(qssfm::Error::Config)?;
            let table = cli::cost_table(steps, &m, &qubits, epsilon)?;
            print!("{}", table.render());
            Ok(())
        }
        Command::ListScenarios => {
            print!("{}", cli::list_scenarios());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run_command(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(cli::exit_code(&e) as u8)
        }
    }
}
