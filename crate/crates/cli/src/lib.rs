//! Batch experiment runner for hierarchical random walks.
//!
//! A run reads an [`ExperimentConfig`], checks it with [`validate`], executes
//! one experiment and writes a JSON summary plus, for tabular experiments, a
//! TSV file. Every artifact is written to a temporary file and renamed into
//! place, so a file in the output directory is either complete or absent.

// `!(x > 0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fmt;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use hrw_core::distance_chain::{timescale_probability, DistanceChain, DEFAULT_LEVEL_CAP};
use hrw_core::group::parse_element;
use hrw_core::kernel::{build_tables, DEFAULT_EPS};
use hrw_core::montecarlo::{self, occupation_normalizer, Scheme, SimConfig};
use hrw_core::potential::{
    asymptotic_benchmark, degree_classify, g2g, g_t_zeta, green_power, incomplete_powers, last_exit_integral,
    return_tail_solve,
};
use hrw_core::{Error as CoreError, GroupElement, Tables, WalkSpec};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value as Json};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    KernelTable,
    Transition,
    Degree,
    Green,
    IncompleteSweep,
    AsymptoticBenchmark,
    LastExit,
    ReturnTail,
    ChainAnalytics,
    MaxProcess,
    Timescale,
    Simulate,
    Occupation,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::KernelTable => "kernel-table",
            Experiment::Transition => "transition",
            Experiment::Degree => "degree",
            Experiment::Green => "green",
            Experiment::IncompleteSweep => "incomplete-sweep",
            Experiment::AsymptoticBenchmark => "asymptotic-benchmark",
            Experiment::LastExit => "last-exit",
            Experiment::ReturnTail => "return-tail",
            Experiment::ChainAnalytics => "chain-analytics",
            Experiment::MaxProcess => "max-process",
            Experiment::Timescale => "timescale",
            Experiment::Simulate => "simulate",
            Experiment::Occupation => "occupation",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Weight of the occupation functional at one group element.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointWeight {
    /// Comma-separated digits, least significant first; empty for the origin.
    pub x: String,
    pub w: f64,
}

/// Experiment parameters; which ones are required depends on the experiment.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Params {
    pub levels: Option<usize>,
    pub n: Option<u32>,
    pub t: Option<f64>,
    pub rad: Option<usize>,
    pub zeta: Option<f64>,
    pub t_grid: Option<Vec<f64>>,
    pub mu: Option<f64>,
    pub radius: Option<usize>,
    pub horizon: Option<f64>,
    pub steps: Option<usize>,
    pub eta: Option<f64>,
    pub replicas: Option<usize>,
    pub scheme: Option<Scheme>,
    pub track_full: Option<bool>,
    pub weights: Option<Vec<PointWeight>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Optional; must agree with the subcommand when both are given.
    pub experiment: Option<Experiment>,
    pub walk: WalkSpec,
    pub seed: Option<u64>,
    /// Kernel truncation tolerance.
    pub eps: Option<f64>,
    #[serde(default)]
    pub params: Params,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    fn eps(&self) -> f64 {
        self.eps.unwrap_or(DEFAULT_EPS)
    }

    fn tables(&self) -> Result<Tables, CoreError> {
        build_tables(&self.walk, self.eps())
    }

    /// SHA-256 of the canonical JSON form of the walk.
    pub fn walk_hash(&self) -> String {
        let canonical = serde_json::to_vec(&self.walk).expect("walk serializes");
        Sha256::digest(&canonical).iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// A problem found before execution, naming the offending field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub field: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

fn diag(field: &str, message: impl Into<String>) -> Diagnostic {
    Diagnostic { field: field.to_string(), message: message.into() }
}

fn required(experiment: Experiment) -> &'static [&'static str] {
    match experiment {
        Experiment::KernelTable | Experiment::Degree | Experiment::ChainAnalytics => &[],
        Experiment::Transition => &["rad"],
        Experiment::Green => &["zeta"],
        Experiment::IncompleteSweep => &["zeta", "tGrid"],
        Experiment::AsymptoticBenchmark => &["tGrid"],
        Experiment::LastExit => &["radius"],
        Experiment::ReturnTail => &["horizon", "steps"],
        Experiment::MaxProcess => &["n"],
        Experiment::Timescale => &["mu", "eta"],
        Experiment::Simulate => &["seed", "replicas", "horizon"],
        Experiment::Occupation => &["seed", "replicas", "t"],
    }
}

fn is_present(config: &ExperimentConfig, field: &str) -> bool {
    let p = &config.params;
    match field {
        "seed" => config.seed.is_some(),
        "rad" => p.rad.is_some(),
        "zeta" => p.zeta.is_some(),
        "tGrid" => p.t_grid.is_some(),
        "radius" => p.radius.is_some(),
        "horizon" => p.horizon.is_some(),
        "steps" => p.steps.is_some(),
        "n" => p.n.is_some(),
        "mu" => p.mu.is_some(),
        "eta" => p.eta.is_some(),
        "replicas" => p.replicas.is_some(),
        "t" => p.t.is_some(),
        _ => true,
    }
}

/// Schema and cross-field checks without running the experiment.
pub fn validate(config: &ExperimentConfig, experiment: Experiment) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    if let Some(declared) = config.experiment {
        if declared != experiment {
            out.push(diag("experiment", format!("config declares {declared} but {experiment} was requested")));
        }
    }
    if let Err(e) = config.walk.validate() {
        out.push(diag("walk", e.to_string()));
        return out;
    }
    if let Some(eps) = config.eps {
        if !(eps > 0.0 && eps <= 1e-6) {
            out.push(diag("eps", "must lie in (0, 1e-6]"));
        }
    }
    for field in required(experiment) {
        if !is_present(config, field) {
            let path = if *field == "seed" { "seed".to_string() } else { format!("params.{field}") };
            out.push(diag(&path, format!("{experiment} requires field {path}")));
        }
    }
    let p = &config.params;
    let positive = |name: &str, v: Option<f64>, out: &mut Vec<Diagnostic>| {
        if let Some(v) = v {
            if !(v > 0.0 && v.is_finite()) {
                out.push(diag(&format!("params.{name}"), "must be positive and finite"));
            }
        }
    };
    positive("t", p.t, &mut out);
    positive("zeta", p.zeta, &mut out);
    positive("horizon", p.horizon, &mut out);
    positive("eta", p.eta, &mut out);
    if let Some(mu) = p.mu {
        if !(mu >= 1.0 && mu.is_finite()) {
            out.push(diag("params.mu", "must be at least 1"));
        }
    }
    if let Some(grid) = &p.t_grid {
        if grid.is_empty() || grid.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
            out.push(diag("params.tGrid", "must be a non-empty list of positive times"));
        }
    }
    if p.replicas == Some(0) {
        out.push(diag("params.replicas", "must be at least 1"));
    }
    if let Some(steps) = p.steps {
        if steps < 100 {
            out.push(diag("params.steps", "must be at least 100"));
        }
    }
    if experiment == Experiment::Transition && p.n.is_some() == p.t.is_some() {
        out.push(diag("params.n", "transition requires exactly one of params.n and params.t"));
    }
    if experiment == Experiment::AsymptoticBenchmark && p.t_grid.iter().flatten().any(|t| *t <= 1.0) {
        out.push(diag("params.tGrid", "benchmark times must exceed 1"));
    }
    if experiment == Experiment::Occupation {
        if let Some(t) = p.t {
            if t <= 1.0 {
                out.push(diag("params.t", "must exceed 1"));
            }
        }
        match occupation_weights(config) {
            Err(e) => out.push(diag("params.weights", e.to_string())),
            Ok(weights) => {
                let total: f64 = weights.iter().map(|(_, w)| w).sum();
                if let Ok(tables) = config.tables() {
                    if occupation_normalizer(&tables, total.max(1.0), 10.0).is_err() {
                        out.push(diag("walk", "occupation requires recurrent walk with mu = 1"));
                    }
                }
            }
        }
    }
    if out.is_empty() {
        if let Err(e) = config.tables() {
            out.push(diag("walk", e.to_string()));
        }
    }
    out
}

fn occupation_weights(config: &ExperimentConfig) -> Result<Vec<(GroupElement, f64)>, CoreError> {
    let order = config.walk.order;
    match &config.params.weights {
        None => Ok(vec![(GroupElement::origin(order)?, 1.0)]),
        Some(list) => {
            if list.is_empty() {
                return Err(CoreError::InvalidArgument("weights must not be empty".into()));
            }
            list.iter()
                .map(|pw| {
                    if !(pw.w >= 0.0 && pw.w.is_finite()) {
                        return Err(CoreError::InvalidArgument(format!("weight at {:?} must be non-negative", pw.x)));
                    }
                    Ok((parse_element(order, &pw.x)?, pw.w))
                })
                .collect()
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("invalid config:\n{}", .0.iter().map(|d| format!("  {d}")).collect::<Vec<_>>().join("\n"))]
    Validation(Vec<Diagnostic>),
    #[error("{0}")]
    Core(#[from] CoreError),
    #[error("no convergence certificate: {0}")]
    Certificate(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Validation(_) => 2,
            CliError::Certificate(_) => 3,
            CliError::Io(_) => 1,
            CliError::Core(e) => match e {
                CoreError::Indeterminate(_) => 3,
                CoreError::SolverFailure { .. } => 4,
                _ => 2,
            },
        }
    }
}

/// Files written and the one-line summary of a run.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub summary: String,
    pub artifacts: Vec<PathBuf>,
}

/// Tab-separated table with a leading comment line.
struct Table {
    comment: String,
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn new(comment: impl Into<String>, header: Vec<&'static str>) -> Self {
        Self { comment: comment.into(), header, rows: Vec::new() }
    }

    fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    fn to_bytes(&self) -> Result<Vec<u8>, CliError> {
        let mut buf = Vec::new();
        writeln!(buf, "# {}", self.comment).map_err(|e| CliError::Io(e.to_string()))?;
        let mut w = csv::WriterBuilder::new().delimiter(b'\t').from_writer(buf);
        let io = |e: csv::Error| CliError::Io(e.to_string());
        w.write_record(&self.header).map_err(io)?;
        for row in &self.rows {
            w.write_record(row).map_err(io)?;
        }
        w.into_inner().map_err(|e| CliError::Io(e.to_string()))
    }
}

fn num(x: f64) -> String {
    format!("{x}")
}

struct Output {
    summary: String,
    json: Json,
    table: Option<Table>,
}

fn certified(value: &hrw_core::Value, what: &str) -> Result<(), CliError> {
    if value.certified {
        Ok(())
    } else {
        Err(CliError::Certificate(format!("{what}: partial sum {} after {} terms", value.value, value.terms)))
    }
}

fn show(v: &hrw_core::Value) -> String {
    if v.divergent {
        "inf".to_string()
    } else {
        format!("{}", v.value)
    }
}

fn execute(config: &ExperimentConfig, experiment: Experiment) -> Result<Output, CliError> {
    let p = &config.params;
    let tables = config.tables()?;
    let out = match experiment {
        Experiment::KernelTable => {
            let levels = p.levels.unwrap_or(20).max(1);
            let mut table = Table::new("jump law r_j, Fourier modes f_j and h_j, scale sequences s_j, d_j", vec!["j", "r", "f", "h", "s", "d"]);
            for j in 1..=levels {
                table.push(vec![
                    j.to_string(),
                    num(tables.r(j)),
                    num(tables.f(j)),
                    num(tables.h(j)),
                    num(tables.s(j)),
                    num(tables.d(j)),
                ]);
            }
            Output {
                summary: format!("kernel tables: truncation={} normalizer={}", tables.truncation(), tables.normalizer()),
                json: json!({
                    "truncation": tables.truncation(),
                    "normalizer": tables.normalizer(),
                    "mu": tables.mu(),
                    "tailBound": tables.tail_bound(),
                    "levels": levels,
                }),
                table: Some(table),
            }
        }
        Experiment::Transition => {
            let rad = p.rad.expect("validated");
            let (value, label) = match (p.n, p.t) {
                (Some(n), _) => (tables.pn(n, rad), format!("n-step transition p^({n})(0, y), |y| = {rad}")),
                (_, Some(t)) => (tables.pt(t, rad), format!("continuous-time transition p_{t}(0, y), |y| = {rad}")),
                _ => unreachable!("validated"),
            };
            Output {
                summary: format!("{label}: {}", value.value),
                json: serde_json::to_value(value).expect("serializable"),
                table: None,
            }
        }
        Experiment::Degree => {
            let report = degree_classify::<f64>(&config.walk)?;
            Output {
                summary: format!("gamma={} decoration={}", report.gamma, report.decoration),
                json: serde_json::to_value(report).expect("serializable"),
                table: None,
            }
        }
        Experiment::Green => {
            let zeta = p.zeta.expect("validated");
            let v = green_power(&tables, zeta)?;
            certified(&v, "Green power")?;
            Output {
                summary: format!("Green power G^{zeta}(0,0) = {}", show(&v)),
                json: serde_json::to_value(v).expect("serializable"),
                table: None,
            }
        }
        Experiment::IncompleteSweep => {
            let zeta = p.zeta.expect("validated");
            let grid = p.t_grid.as_ref().expect("validated");
            let mut table = Table::new(
                format!("incomplete potentials at exponent {zeta}: g_t, G_t^1, G_t^2 and G_t^2 G at the origin"),
                vec!["t", "g_t_zeta", "G_t", "G_t2", "G_t2_G"],
            );
            let mut rows = Vec::new();
            for &t in grid {
                let g = g_t_zeta(&tables, zeta, t)?;
                let g1 = incomplete_powers(&tables, 1, t)?;
                let g2 = incomplete_powers(&tables, 2, t)?;
                let gg = g2g(&tables, t)?;
                certified(&g, "incomplete potential")?;
                table.push(vec![num(t), num(g.value), num(g1.value), num(g2.value), show(&gg)]);
                rows.push(json!({"t": t, "gTZeta": g, "gT": g1, "gT2": g2, "gT2G": gg}));
            }
            let last = table.rows.last().map(|r| r[1].clone()).unwrap_or_default();
            Output {
                summary: format!("incomplete potential sweep at exponent {zeta}: last value {last}"),
                json: json!({ "zeta": zeta, "rows": rows }),
                table: Some(table),
            }
        }
        Experiment::AsymptoticBenchmark => {
            let mu = p.mu.unwrap_or_else(|| config.walk.mu());
            let grid = p.t_grid.as_ref().expect("validated");
            let mut table = Table::new(
                format!("incomplete potential at exponent {mu} against its leading growth"),
                vec!["t", "measured", "predicted", "ratio"],
            );
            let mut last_ratio = f64::NAN;
            for &t in grid {
                let measured = g_t_zeta(&tables, mu, t)?;
                certified(&measured, "incomplete potential")?;
                let predicted = asymptotic_benchmark(&tables, mu, t)?;
                last_ratio = measured.value / predicted;
                table.push(vec![num(t), num(measured.value), num(predicted), num(last_ratio)]);
            }
            Output {
                summary: format!("incomplete potential vs leading growth: final ratio {last_ratio}"),
                json: json!({ "mu": mu, "finalRatio": last_ratio, "points": grid.len() }),
                table: Some(table),
            }
        }
        Experiment::LastExit => {
            let radius = p.radius.expect("validated");
            let mu = p.mu.unwrap_or_else(|| config.walk.mu());
            let v = last_exit_integral(&tables, mu, radius)?;
            certified(&v.series, "last-exit integral")?;
            Output {
                summary: format!("last-exit integral of B_{radius} at exponent {mu}: {}", show(&v.series)),
                json: serde_json::to_value(v).expect("serializable"),
                table: None,
            }
        }
        Experiment::ReturnTail => {
            let horizon = p.horizon.expect("validated");
            let steps = p.steps.expect("validated");
            let tail = return_tail_solve(&tables, horizon, steps)?;
            let survival = tail.first_return_survival();
            let mut table = Table::new(
                "excursion-length survival and first-return survival from the renewal identity",
                vec!["t", "excursion_survival", "first_return_survival"],
            );
            let stride = (steps / 1000).max(1);
            for i in (0..tail.grid.len()).step_by(stride) {
                table.push(vec![num(tail.grid[i]), num(tail.rho[i]), num(survival[i])]);
            }
            Output {
                summary: format!("return-time tail: residual {} clip {}", tail.residual, tail.clip),
                json: json!({ "residual": tail.residual, "clip": tail.clip, "horizon": horizon, "steps": steps }),
                table: Some(table),
            }
        }
        Experiment::ChainAnalytics => {
            let levels = p.levels.unwrap_or(10).min(DEFAULT_LEVEL_CAP);
            let chain = DistanceChain::new(tables);
            let mut table = Table::new(
                "distance chain: row sums, expected next distance, holding and passage laws",
                vec!["i", "row_sum", "expected_next", "stay", "mean_holding", "passage_success", "mean_passage"],
            );
            for i in 0..=levels {
                let drift = chain.drift(i)?;
                let hold = chain.exit(i);
                let pass = chain.hitting(i + 1)?;
                table.push(vec![
                    i.to_string(),
                    num(chain.row_sum(i)),
                    num(drift.value),
                    num(hold.stay),
                    num(hold.mean),
                    num(pass.success),
                    num(pass.mean),
                ]);
            }
            Output {
                summary: format!("distance chain analytics for levels 0..={levels}"),
                json: json!({ "levels": levels }),
                table: Some(table),
            }
        }
        Experiment::MaxProcess => {
            let n = p.n.expect("validated");
            let levels = p.levels.unwrap_or(16).min(DEFAULT_LEVEL_CAP);
            let chain = DistanceChain::new(tables);
            let power = chain.max_matrix(levels + 1).power(n);
            let mut table = Table::new(
                format!("running maximum after {n} steps: matrix power and direct law"),
                vec!["j", "matrix_power", "direct"],
            );
            // Z*_n >= 1 once n >= 1
            for j in 1..=levels {
                table.push(vec![j.to_string(), num(power.get(0, j)), num(chain.max_dist(n, j)?.pmf)]);
            }
            Output {
                summary: format!("law of the running maximum after {n} steps on levels 1..={levels}"),
                json: json!({ "n": n, "levels": levels }),
                table: Some(table),
            }
        }
        Experiment::Timescale => {
            let mu = p.mu.expect("validated");
            let eta = p.eta.expect("validated");
            let levels = p.levels.unwrap_or(8).max(1);
            let mut table = Table::new(
                format!("running maximum on the time scale N^(j/{mu}) with eta = {eta}"),
                vec!["j", "steps", "at_most", "exactly", "large_order_limit"],
            );
            for j in 1..=levels {
                let ts = timescale_probability(config.walk.order, mu, eta, j)?;
                table.push(vec![j.to_string(), ts.steps.to_string(), num(ts.at_most), num(ts.exactly), num(ts.order_limit.0)]);
            }
            Output {
                summary: format!("time-scale separation table for levels 1..={levels}"),
                json: json!({ "mu": mu, "eta": eta, "levels": levels }),
                table: Some(table),
            }
        }
        Experiment::Simulate => {
            let mut sim = SimConfig::new(
                config.seed.expect("validated"),
                p.replicas.expect("validated"),
                p.horizon.expect("validated"),
                p.scheme.unwrap_or(Scheme::Continuous),
            );
            sim.track_full = p.track_full.unwrap_or(false);
            let paths = montecarlo::simulate(&tables, &sim)?;
            let mut header = vec!["replica", "final_distance", "max_distance", "jumps"];
            if sim.track_full {
                header.push("final_position");
            }
            let mut table = Table::new("simulated paths from the origin", header);
            for s in &paths {
                let mut row =
                    vec![s.replica.to_string(), s.final_distance.to_string(), s.max_distance.to_string(), s.jumps.to_string()];
                if let Some(pos) = &s.final_position {
                    row.push(pos.clone());
                }
                table.push(row);
            }
            let finals: Vec<f64> = paths.iter().map(|s| s.final_distance as f64).collect();
            let stats = montecarlo::EmpiricalStats::from_samples(&finals);
            Output {
                summary: format!(
                    "simulated {} paths: mean final distance {}",
                    paths.len(),
                    stats.map(|s| s.mean).unwrap_or(f64::NAN)
                ),
                json: json!({ "config": sim, "finalDistance": stats }),
                table: Some(table),
            }
        }
        Experiment::Occupation => {
            let weights = occupation_weights(config)?;
            let t = p.t.expect("validated");
            let sim = SimConfig::new(config.seed.expect("validated"), p.replicas.expect("validated"), t, Scheme::Continuous);
            let report = montecarlo::occupation_statistic(&tables, &weights, t, &sim)?;
            let mut table = Table::new("normalized occupation integrals, one per replica", vec!["replica", "statistic"]);
            for (k, v) in report.samples.iter().enumerate() {
                table.push(vec![k.to_string(), num(*v)]);
            }
            Output {
                summary: format!("occupation statistic: KS distance to Exp(1) = {}", report.ks),
                json: json!({ "t": t, "normalizer": report.normalizer, "ks": report.ks, "stats": report.stats }),
                table: Some(table),
            }
        }
    };
    Ok(out)
}

fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", dir.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    let target = dir.join(name);
    tmp.persist(&target).map_err(|e| io(e.error))?;
    Ok(target)
}

/// Validates, runs and writes artifacts under `out_dir`.
pub fn run(config: &ExperimentConfig, experiment: Experiment, out_dir: &Path) -> Result<RunOutcome, CliError> {
    let diagnostics = validate(config, experiment);
    if !diagnostics.is_empty() {
        return Err(CliError::Validation(diagnostics));
    }
    let output = execute(config, experiment)?;
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::Io(format!("{}: {e}", out_dir.display())))?;
    let summary = json!({
        "experiment": experiment.name(),
        "walk": config.walk,
        "walkHash": config.walk_hash(),
        "seed": config.seed,
        "summary": output.summary,
        "result": output.json,
    });
    let mut artifacts = Vec::new();
    let mut bytes = serde_json::to_vec_pretty(&summary).expect("serializable");
    bytes.push(b'\n');
    artifacts.push(write_atomic(out_dir, &format!("{}.json", experiment.name()), &bytes)?);
    if let Some(table) = &output.table {
        artifacts.push(write_atomic(out_dir, &format!("{}.tsv", experiment.name()), &table.to_bytes()?)?);
    }
    Ok(RunOutcome { summary: output.summary, artifacts })
}
