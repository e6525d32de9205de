//! Run orchestration behind the `qssfm` binary: config resolution, solver
//! dispatch, artifact layout, run comparison, and the cost-model table.
//!
//! Config files are flat `key = value` text; command-line overrides win over
//! file values, and every resolved default is echoed back into the run
//! manifest so artifacts are diffable.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::diagnostics::{self, ErrorReport, DEFAULT_DENSITY_FLOOR_REL};
use crate::error::{Error, Result};
use crate::hybrid::{self, FidelityMode, FilterSpec, HybridConfig};
use crate::io;
use crate::qsim::ShotBudget;
use crate::scenarios::{self, Scenario, SolitonForm};
use crate::ssfm::{self, Trajectory};

/// Environment variable naming the default output root.
pub const OUT_ROOT_ENV: &str = "QSSFM_OUT";

const KNOWN_KEYS: &[&str] = &[
    "scenario",
    "solver",
    "soliton_form",
    "qubits",
    "m",
    "normalize",
    "shots",
    "seed",
    "tau",
    "t_end",
    "sample_every",
    "merge",
    "csv",
    "reference",
    "out",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Solver {
    Classical,
    IdealQssfm,
    FilteredIdeal,
    FilteredShots,
}

impl Solver {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "classical" => Ok(Solver::Classical),
            "ideal-qssfm" => Ok(Solver::IdealQssfm),
            "filtered-ideal" => Ok(Solver::FilteredIdeal),
            "filtered-shots" => Ok(Solver::FilteredShots),
            other => Err(Error::Config(format!(
                "solver '{other}' unknown; expected classical | ideal-qssfm | filtered-ideal | filtered-shots"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Solver::Classical => "classical",
            Solver::IdealQssfm => "ideal-qssfm",
            Solver::FilteredIdeal => "filtered-ideal",
            Solver::FilteredShots => "filtered-shots",
        }
    }

}

/// Fully resolved run parameters.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub scenario: String,
    pub soliton_form: SolitonForm,
    pub solver: Solver,
    pub qubits: Option<Vec<u32>>,
    pub m: Option<Vec<u32>>,
    pub normalize: bool,
    pub shots: Option<u64>,
    pub seed: u64,
    pub tau: Option<f64>,
    pub t_end: Option<f64>,
    pub sample_every: Option<usize>,
    pub merge: bool,
    pub csv: bool,
    pub reference: bool,
    pub out: PathBuf,
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "on" | "yes" => Ok(true),
        "false" | "off" | "no" => Ok(false),
        _ => Err(Error::Config(format!("{key} = '{value}' is not a boolean"))),
    }
}

fn parse_u64(key: &str, value: &str) -> Result<u64> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("{key} = '{value}' is not an unsigned integer")))
}

fn parse_f64(key: &str, value: &str) -> Result<f64> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("{key} = '{value}' is not a number")))
}

fn parse_u32_list(key: &str, value: &str) -> Result<Vec<u32>> {
    value
        .split(',')
        .map(|part| {
            part.trim()
                .parse()
                .map_err(|_| Error::Config(format!("{key} = '{value}' is not a comma list of integers")))
        })
        .collect()
}

fn default_out_root() -> PathBuf {
    std::env::var_os(OUT_ROOT_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("qssfm-runs"))
}

/// Merge a config file with command-line overrides and validate the schema.
pub fn resolve_run_config(
    file: Option<&Path>,
    overrides: &[(String, String)],
) -> Result<RunConfig> {
    let mut map = match file {
        Some(path) => io::read_manifest(path)?,
        None => BTreeMap::new(),
    };
    for (k, v) in overrides {
        map.insert(k.clone(), v.clone());
    }
    for key in map.keys() {
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(Error::Config(format!("unknown key '{key}'")));
        }
    }

    let scenario = map
        .get("scenario")
        .ok_or_else(|| Error::Config("missing 'scenario'".into()))?
        .clone();
    let solver = Solver::parse(
        map.get("solver")
            .ok_or_else(|| Error::Config("missing 'solver'".into()))?,
    )?;
    let soliton_form = match map.get("soliton_form").map(String::as_str) {
        None | Some("sech") => SolitonForm::Sech,
        Some("paper-cosh") => SolitonForm::PaperCosh,
        Some(other) => {
            return Err(Error::Config(format!(
                "soliton_form '{other}' unknown; expected sech | paper-cosh"
            )))
        }
    };

    let shots = map.get("shots").map(|v| parse_u64("shots", v)).transpose()?;
    if solver == Solver::FilteredShots {
        match shots {
            Some(s) if s >= 1 => {}
            Some(_) => return Err(Error::Config("shots must be >= 1".into())),
            None => return Err(Error::Config("filtered-shots needs 'shots'".into())),
        }
    }

    let out = map.get("out").map(PathBuf::from).unwrap_or_else(|| {
        default_out_root().join(format!("{scenario}-{}", solver.name()))
    });

    Ok(RunConfig {
        scenario,
        soliton_form,
        solver,
        qubits: map.get("qubits").map(|v| parse_u32_list("qubits", v)).transpose()?,
        m: map.get("m").map(|v| parse_u32_list("m", v)).transpose()?,
        normalize: map
            .get("normalize")
            .map(|v| parse_bool("normalize", v))
            .transpose()?
            .unwrap_or(true),
        shots,
        seed: map.get("seed").map(|v| parse_u64("seed", v)).transpose()?.unwrap_or(0),
        tau: map.get("tau").map(|v| parse_f64("tau", v)).transpose()?,
        t_end: map.get("t_end").map(|v| parse_f64("t_end", v)).transpose()?,
        sample_every: map
            .get("sample_every")
            .map(|v| parse_u64("sample_every", v).map(|n| n as usize))
            .transpose()?,
        merge: map
            .get("merge")
            .map(|v| parse_bool("merge", v))
            .transpose()?
            .unwrap_or(true),
        csv: map
            .get("csv")
            .map(|v| parse_bool("csv", v))
            .transpose()?
            .unwrap_or(false),
        reference: map
            .get("reference")
            .map(|v| match v.as_str() {
                "classical" => Ok(true),
                other => parse_bool("reference", other),
            })
            .transpose()?
            .unwrap_or(false),
        out,
    })
}

fn build_scenario(config: &RunConfig) -> Result<Scenario> {
    let mut scenario = match config.scenario.as_str() {
        "soliton" => {
            let n = match config.qubits.as_deref() {
                None => 8,
                Some([n]) => *n,
                Some(other) => {
                    return Err(Error::Config(format!(
                        "soliton takes one qubit count, got {other:?}"
                    )))
                }
            };
            scenarios::soliton_1d_with_qubits(config.soliton_form, n)
                .map_err(|e| Error::Config(e.to_string()))?
        }
        "gaussian" => {
            if config.qubits.is_some() {
                return Err(Error::Config("gaussian has a fixed 7+7 qubit grid".into()));
            }
            scenarios::gaussian_2d()
        }
        "cylinder" => {
            if config.qubits.is_some() {
                return Err(Error::Config("cylinder has a fixed 9+7 qubit grid".into()));
            }
            scenarios::cylinder_wake_2d()
        }
        other => {
            return Err(Error::Config(format!(
                "scenario '{other}' unknown; see list-scenarios"
            )))
        }
    };
    if let Some(tau) = config.tau {
        if !tau.is_finite() || tau <= 0.0 {
            return Err(Error::Config(format!("tau = {tau} must be > 0")));
        }
        scenario.tau = tau;
    }
    if let Some(t_end) = config.t_end {
        if !t_end.is_finite() || t_end < 0.0 {
            return Err(Error::Config(format!("t_end = {t_end} must be >= 0")));
        }
        scenario.t_end = t_end;
    }
    if let Some(every) = config.sample_every {
        if every == 0 {
            return Err(Error::Config("sample_every must be >= 1".into()));
        }
        scenario.sample_every = every;
    }
    if let Some(m) = &config.m {
        FilterSpec::new(m).map_err(|e| Error::Config(e.to_string()))?;
        scenario.filter_m = m.clone();
    }
    Ok(scenario)
}

fn hybrid_config_for(config: &RunConfig, scenario: &Scenario) -> Result<HybridConfig> {
    let filter = match config.solver {
        Solver::IdealQssfm => FilterSpec::full(&scenario.grid),
        _ => FilterSpec::new(&scenario.filter_m)?,
    };
    let (fidelity_mode, shot_budget) = match config.solver {
        Solver::FilteredShots => (
            FidelityMode::EmulatedHardware,
            ShotBudget::with_shots(config.shots.expect("validated"), config.seed)?,
        ),
        _ => (FidelityMode::Ideal, ShotBudget::exact()),
    };
    Ok(HybridConfig {
        tau: scenario.tau,
        g: scenario.g,
        density_scale: scenario.density_scale,
        potential: scenario.potential.clone(),
        filter,
        normalize_reconstruction: config.normalize,
        fidelity_mode,
        shot_budget,
        merge_halves: config.merge,
    })
}

fn list_to_string<T: std::fmt::Display>(items: &[T]) -> String {
    items
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn manifest_for(
    config: &RunConfig,
    scenario: &Scenario,
    trajectory: &Trajectory,
) -> BTreeMap<String, String> {
    let mut m = BTreeMap::new();
    m.insert("scenario".into(), config.scenario.clone());
    m.insert("scenario.name".into(), scenario.name.clone());
    m.insert("solver".into(), config.solver.name().into());
    if config.scenario == "soliton" {
        m.insert(
            "soliton_form".into(),
            match config.soliton_form {
                SolitonForm::Sech => "sech".into(),
                SolitonForm::PaperCosh => "paper-cosh".into(),
            },
        );
    }
    m.insert("seed".into(), config.seed.to_string());
    m.insert("normalize".into(), config.normalize.to_string());
    m.insert("merge".into(), config.merge.to_string());
    m.insert("csv".into(), config.csv.to_string());
    m.insert("reference".into(), config.reference.to_string());
    if let Some(shots) = config.shots {
        m.insert("shots".into(), shots.to_string());
    }
    m.insert("tau".into(), format!("{:?}", scenario.tau));
    m.insert("t_end".into(), format!("{:?}", scenario.t_end));
    m.insert("sample_every".into(), scenario.sample_every.to_string());
    m.insert("filter.m".into(), list_to_string(&scenario.filter_m));
    m.insert("grid.shape".into(), list_to_string(scenario.grid.shape()));
    m.insert(
        "grid.lengths".into(),
        scenario
            .grid
            .lengths()
            .iter()
            .map(|v| format!("{v:?}"))
            .collect::<Vec<_>>()
            .join(","),
    );
    m.insert(
        "grid.origins".into(),
        scenario
            .grid
            .origins()
            .iter()
            .map(|v| format!("{v:?}"))
            .collect::<Vec<_>>()
            .join(","),
    );
    m.insert(
        "grid.qubits".into(),
        list_to_string(
            &(0..scenario.grid.ndim())
                .map(|a| scenario.grid.qubits(a))
                .collect::<Vec<_>>(),
        ),
    );
    m.insert("physics.g".into(), format!("{:?}", scenario.g));
    m.insert(
        "physics.density_scale".into(),
        format!("{:?}", scenario.density_scale),
    );
    m.insert(
        "diagnostics.density_floor_rel".into(),
        format!("{DEFAULT_DENSITY_FLOOR_REL:?}"),
    );
    m.insert("run.steps".into(), scenario.steps().to_string());
    m.insert(
        "run.snapshot_times".into(),
        trajectory
            .times
            .iter()
            .map(|t| format!("{t:?}"))
            .collect::<Vec<_>>()
            .join(","),
    );
    m
}

/// Outcome of a run command.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub out_dir: PathBuf,
    pub steps: usize,
    pub snapshots: usize,
}

/// Execute a run: resolve the scenario, evolve with the requested solver, and
/// write the manifest, snapshots, and cost/error reports into the out dir.
pub fn cmd_run(file: Option<&Path>, overrides: &[(String, String)]) -> Result<RunSummary> {
    let config = resolve_run_config(file, overrides)?;
    let scenario = build_scenario(&config)?;
    let initial = scenario.normalized_initial()?;

    let (trajectory, cost) = match config.solver {
        Solver::Classical => {
            let mut ssfm_config = scenario.ssfm_config();
            ssfm_config.merge_halves = config.merge;
            (
                ssfm::evolve(&initial, &ssfm_config, scenario.t_end, scenario.sample_every)?,
                None,
            )
        }
        _ => {
            let hybrid_config = hybrid_config_for(&config, &scenario)?;
            let (traj, report) = hybrid::evolve_hybrid(
                &initial,
                &hybrid_config,
                scenario.t_end,
                scenario.sample_every,
            )?;
            (traj, Some(report))
        }
    };

    std::fs::create_dir_all(&config.out)?;
    io::write_manifest(
        &config.out.join("manifest.txt"),
        &manifest_for(&config, &scenario, &trajectory),
    )?;
    for (i, field) in trajectory.fields.iter().enumerate() {
        io::write_field(&config.out.join(format!("snapshot_{i:04}.bin")), field)?;
        if config.csv {
            io::write_field_csv(&config.out.join(format!("snapshot_{i:04}.csv")), field)?;
        }
    }
    if let Some(report) = &cost {
        io::write_cost_report(&config.out, report)?;
    }

    if config.reference && config.solver != Solver::Classical {
        let reference = ssfm::evolve(
            &initial,
            &scenario.ssfm_config(),
            scenario.t_end,
            scenario.sample_every,
        )?;
        let report = diagnostics::compare_trajectories(&reference, &trajectory)?;
        io::write_error_report(&config.out.join("error_report.txt"), &report)?;
        for (i, (ref_field, test_field)) in reference
            .fields
            .iter()
            .zip(trajectory.fields.iter())
            .enumerate()
        {
            let err = diagnostics::density_error_field(ref_field, test_field)?;
            io::write_scalar_csv(
                &config.out.join(format!("error_field_{i:04}.csv")),
                ref_field.grid(),
                "density_error",
                &err,
            )?;
        }
    }

    Ok(RunSummary {
        out_dir: config.out.clone(),
        steps: scenario.steps(),
        snapshots: trajectory.fields.len(),
    })
}

/// Load the snapshot series a run wrote.
pub fn load_trajectory(dir: &Path) -> Result<Trajectory> {
    let manifest = io::read_manifest(&dir.join("manifest.txt"))?;
    let times: Vec<f64> = manifest
        .get("run.snapshot_times")
        .ok_or_else(|| Error::Format("manifest lacks run.snapshot_times".into()))?
        .split(',')
        .map(|t| {
            t.parse()
                .map_err(|_| Error::Format(format!("bad snapshot time '{t}'")))
        })
        .collect::<Result<_>>()?;
    let mut fields = Vec::with_capacity(times.len());
    for i in 0..times.len() {
        fields.push(io::read_field(&dir.join(format!("snapshot_{i:04}.bin")))?);
    }
    Ok(Trajectory { times, fields })
}

/// Compare two run directories (the first is the reference); writes the error
/// report and per-snapshot signed error fields into `out_dir`.
pub fn cmd_compare(run_a: &Path, run_b: &Path, out_dir: &Path) -> Result<ErrorReport> {
    let a = load_trajectory(run_a)?;
    let b = load_trajectory(run_b)?;
    if a.fields.first().map(|f| f.grid().clone()) != b.fields.first().map(|f| f.grid().clone()) {
        return Err(Error::GridMismatch);
    }
    let report = diagnostics::compare_trajectories(&a, &b)?;
    std::fs::create_dir_all(out_dir)?;
    io::write_error_report(&out_dir.join("error_report.txt"), &report)?;
    for (i, (fa, fb)) in a.fields.iter().zip(b.fields.iter()).enumerate() {
        let err = diagnostics::density_error_field(fa, fb)?;
        io::write_scalar_csv(
            &out_dir.join(format!("error_field_{i:04}.csv")),
            fa.grid(),
            "density_error",
            &err,
        )?;
    }
    Ok(report)
}

/// One row of the complexity table.
#[derive(Debug, Clone)]
pub struct CostRow {
    pub method: &'static str,
    pub formula: &'static str,
    pub value: f64,
}

/// The three-method complexity comparison at concrete parameters.
#[derive(Debug, Clone)]
pub struct CostTable {
    pub rows: Vec<CostRow>,
    /// Filtered / tomography cost ratio, equal to M/N.
    pub filtered_vs_tomography: f64,
}

impl CostTable {
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{:<18} {:<34} {:>16}\n",
            "method", "scaling", "value"
        ));
        for row in &self.rows {
            out.push_str(&format!(
                "{:<18} {:<34} {:>16.6e}\n",
                row.method, row.formula, row.value
            ));
        }
        out.push_str(&format!(
            "filtered / tomography = {:.6e} (= M/N)\n",
            self.filtered_vs_tomography
        ));
        out
    }
}

/// Evaluate the per-method cost scalings: classical `N_t N log2 N`,
/// tomography-based `N_t^2 N log2^2 N / eps^2`, filtered
/// `N_t^2 M log2^2 N / eps^2`.
pub fn cost_table(
    n_t: u64,
    m: &[u32],
    qubits: &[u32],
    epsilon: f64,
) -> Result<CostTable> {
    if n_t == 0 {
        return Err(Error::Config("steps must be >= 1".into()));
    }
    if m.len() != qubits.len() || m.is_empty() {
        return Err(Error::Config(
            "m and qubits need the same (non-zero) number of axes".into(),
        ));
    }
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::Config(format!("epsilon = {epsilon} must lie in (0, 1]")));
    }
    for (axis, (&md, &nd)) in m.iter().zip(qubits.iter()).enumerate() {
        if md > nd {
            return Err(Error::Config(format!(
                "m[{axis}] = {md} exceeds qubits[{axis}] = {nd}"
            )));
        }
    }
    let n: u32 = qubits.iter().sum();
    let big_n = (1u128 << n) as f64;
    let big_m = (1u128 << m.iter().sum::<u32>()) as f64;
    let nt = n_t as f64;
    let logn = n as f64;
    let eps2 = epsilon * epsilon;

    let classical = nt * big_n * logn;
    let tomography = nt * nt * big_n * logn * logn / eps2;
    let filtered = nt * nt * big_m * logn * logn / eps2;
    Ok(CostTable {
        rows: vec![
            CostRow {
                method: "ssfm",
                formula: "N_t * N * log2(N)",
                value: classical,
            },
            CostRow {
                method: "qssfm-tomography",
                formula: "N_t^2 * N * log2(N)^2 / eps^2",
                value: tomography,
            },
            CostRow {
                method: "filtered-qssfm",
                formula: "N_t^2 * M * log2(N)^2 / eps^2",
                value: filtered,
            },
        ],
        filtered_vs_tomography: filtered / tomography,
    })
}

/// Human-readable scenario catalogue.
pub fn list_scenarios() -> String {
    let mut out = String::new();
    for s in [
        scenarios::soliton_1d(SolitonForm::Sech),
        scenarios::gaussian_2d(),
        scenarios::cylinder_wake_2d(),
    ] {
        out.push_str(&format!(
            "{:<12} grid {:?} over lengths {:?}, tau = {}, t_end = {}, default m = {:?}, g = {:.6}\n",
            s.name.split('-').next().unwrap_or(&s.name),
            s.grid.shape(),
            s.grid.lengths(),
            s.tau,
            s.t_end,
            s.filter_m,
            s.g,
        ));
    }
    out
}

/// Exit code mapping: 0 ok, 2 config error, 3 numerical failure, 4 I/O.
pub fn exit_code(error: &Error) -> i32 {
    match error {
        Error::Numerical { .. } => 3,
        Error::Io(_) | Error::Format(_) => 4,
        _ => 2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn overrides(pairs: &[(&str, &str)]) -> Vec<(String, String)> {
        pairs
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect()
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = resolve_run_config(None, &overrides(&[("scnario", "soliton")])).unwrap_err();
        assert!(matches!(err, Error::Config(_)), "{err}");
    }

    #[test]
    fn zero_shots_is_a_schema_error() {
        let err = resolve_run_config(
            None,
            &overrides(&[
                ("scenario", "soliton"),
                ("solver", "filtered-shots"),
                ("shots", "0"),
            ]),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Config(_)));
        assert_eq!(exit_code(&err), 2);
    }

    #[test]
    fn missing_shots_for_shot_solver_is_rejected() {
        let err = resolve_run_config(
            None,
            &overrides(&[("scenario", "soliton"), ("solver", "filtered-shots")]),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn defaults_are_filled_in() {
        let cfg = resolve_run_config(
            None,
            &overrides(&[("scenario", "soliton"), ("solver", "classical")]),
        )
        .unwrap();
        assert!(cfg.normalize);
        assert!(cfg.merge);
        assert!(!cfg.csv);
        assert_eq!(cfg.seed, 0);
    }

    #[test]
    fn cost_table_scales_as_documented() {
        let t = cost_table(100, &[4], &[8], 0.01).unwrap();
        // M/N ratio
        assert!((t.filtered_vs_tomography - (16.0 / 256.0)).abs() < 1e-12);
        // doubling N_t multiplies the filtered cost by 4 exactly
        let t2 = cost_table(200, &[4], &[8], 0.01).unwrap();
        assert!((t2.rows[2].value / t.rows[2].value - 4.0).abs() < 1e-12);
        // classical row: N_t * N * log2 N
        assert!((t.rows[0].value - 100.0 * 256.0 * 8.0).abs() < 1e-9);
        // table renders all three methods
        let text = t.render();
        assert!(text.contains("ssfm") && text.contains("filtered-qssfm"));
    }

    #[test]
    fn cost_table_validates_inputs() {
        assert!(cost_table(0, &[4], &[8], 0.1).is_err());
        assert!(cost_table(10, &[9], &[8], 0.1).is_err());
        assert!(cost_table(10, &[4], &[8], 0.0).is_err());
        assert!(cost_table(10, &[4], &[8], 1.5).is_err());
        assert!(cost_table(10, &[4, 4], &[8], 0.1).is_err());
    }

    #[test]
    fn list_scenarios_names_all_three() {
        let text = list_scenarios();
        assert!(text.contains("soliton"));
        assert!(text.contains("gaussian"));
        assert!(text.contains("cylinder"));
    }

    #[test]
    fn scenario_overrides_apply() {
        let cfg = resolve_run_config(
            None,
            &overrides(&[
                ("scenario", "soliton"),
                ("solver", "filtered-ideal"),
                ("qubits", "5"),
                ("m", "3"),
                ("tau", "0.002"),
                ("t_end", "0.1"),
                ("sample_every", "10"),
            ]),
        )
        .unwrap();
        let scenario = build_scenario(&cfg).unwrap();
        assert_eq!(scenario.grid.shape(), &[32]);
        assert_eq!(scenario.filter_m, vec![3]);
        assert_eq!(scenario.tau, 0.002);
        assert_eq!(scenario.t_end, 0.1);
        assert_eq!(scenario.sample_every, 10);
    }

    #[test]
    fn bad_scenario_and_solver_are_config_errors() {
        let err = resolve_run_config(
            None,
            &overrides(&[("scenario", "soliton"), ("solver", "warp-drive")]),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Config(_)));

        let cfg = resolve_run_config(
            None,
            &overrides(&[("scenario", "vortex-street"), ("solver", "classical")]),
        )
        .unwrap();
        assert!(matches!(build_scenario(&cfg), Err(Error::Config(_))));
    }
}
