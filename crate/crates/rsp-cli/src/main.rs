//! Command-line front end for the replicator-dynamics toolkit.
//!
//! Subcommands:
//!
//! * `network`  — the quotient network (nodes, connections, cycles) as JSON;
//! * `maps`     — a basic or composite transition matrix as JSON;
//! * `indices`  — stability indices and classification as JSON or CSV;
//! * `regions`  — classification of all five cycles over a parameter grid, CSV;
//! * `simulate` — integrate the flow, writing trajectory and itinerary CSVs;
//! * `basin`    — Monte Carlo estimate of a cycle's local basin fraction, JSON.
//!
//! Exit codes: 0 on success, 2 on a validation error, 3 on an IO error.
//! Every JSON document carries a top-level `"version": 1` field.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use rsp_dynamics::flow::{self, DEFAULT_DT, DEFAULT_NEAR_THRESHOLD};
use rsp_dynamics::game::{GameState, PayoffParams};
use rsp_dynamics::harness;
use rsp_dynamics::maps::{basic_transition_matrix, cycle_transition_matrix, TransitionMatrix};
use rsp_dynamics::network::{build_quotient_network, CycleId, NodeLabel, Player, Vertex};
use rsp_dynamics::stability::{classify, classify_matrix_path, Classification, StabilityReport};

#[derive(Parser)]
#[command(
    name = "rsp",
    version,
    about = "Replicator dynamics of the parametrised rock-scissors-paper game"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the quotient network of pure-strategy saddles as JSON.
    Network,
    /// Print a basic or composite transition matrix as JSON.
    Maps(MapsArgs),
    /// Compute stability indices and classifications at one parameter point.
    Indices(IndicesArgs),
    /// Classify every cycle over a parameter grid and emit the map as CSV.
    Regions(RegionsArgs),
    /// Integrate the flow from an initial state and write CSV artefacts.
    Simulate(SimulateArgs),
    /// Estimate the fraction of nearby seeds attracted to a cycle.
    Basin(BasinArgs),
}

/// Tie payoffs shared by every parameterised subcommand.
#[derive(Args)]
struct ParamArgs {
    /// Tie payoff of player X, in (-1, 1).
    #[arg(long, allow_negative_numbers = true)]
    eps_x: f64,
    /// Tie payoff of player Y, in (-1, 1).
    #[arg(long, allow_negative_numbers = true)]
    eps_y: f64,
}

impl ParamArgs {
    fn build(&self) -> Result<PayoffParams, AppError> {
        PayoffParams::new(self.eps_x, self.eps_y)
            .map_err(|e| AppError::Validation(e.to_string()))
    }
}

#[derive(Args)]
struct MapsArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Cycle the matrix belongs to (C0..C4).
    #[arg(long)]
    cycle: String,
    /// Node whose basic map is requested, or the base node of the composite.
    #[arg(long)]
    node: String,
    /// Single-passage matrix or the full product around the cycle.
    #[arg(long, value_enum, default_value_t = MatrixChoice::Composite)]
    kind: MatrixChoice,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MatrixChoice {
    Basic,
    Composite,
}

#[derive(Args)]
struct IndicesArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Cycle to evaluate (C0..C4), or "all".
    #[arg(long, default_value = "all")]
    cycle: String,
    /// Closed-form route, transition-matrix route, or both.  The matrix
    /// route rejects parameters inside a boundary band.
    #[arg(long, value_enum, default_value_t = PathChoice::Closed)]
    path: PathChoice,
    #[arg(long, value_enum, default_value_t = FormatChoice::Json)]
    format: FormatChoice,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PathChoice {
    Closed,
    Matrix,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatChoice {
    Json,
    Csv,
}

#[derive(Args)]
struct RegionsArgs {
    /// Cells per axis of the parameter grid (at least 11).
    #[arg(long, default_value_t = 201)]
    resolution: usize,
    /// Write the CSV here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Initial state as six comma-separated frequencies "x1,x2,x3,y1,y2,y3".
    #[arg(long)]
    initial: String,
    /// Integration horizon.
    #[arg(long, default_value_t = 100.0)]
    t_max: f64,
    /// Fixed integrator step.
    #[arg(long, default_value_t = DEFAULT_DT)]
    dt: f64,
    /// Distance below which a state counts as visiting a vertex, in (0, 0.5).
    #[arg(long, default_value_t = DEFAULT_NEAR_THRESHOLD)]
    near_threshold: f64,
    /// Output prefix; writes <out>.trajectory.csv and <out>.itinerary.csv.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BasinArgs {
    /// Cycle whose basin is sampled (C0..C4).
    #[arg(long)]
    cycle: String,
    #[command(flatten)]
    params: ParamArgs,
    /// Seeding distance from the cycle's connecting faces, in (0, 0.2).
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    /// Number of Monte Carlo seeds (at least 100).
    #[arg(long, default_value_t = 500)]
    samples: usize,
    /// Per-sample integration horizon.
    #[arg(long, default_value_t = 500.0)]
    horizon: f64,
    /// RNG seed; each sample uses a substream derived from its index.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Write the JSON here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
enum AppError {
    Validation(String),
    Io { path: PathBuf, source: io::Error },
}

impl std::fmt::Display for AppError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AppError::Validation(msg) => f.write_str(msg),
            AppError::Io { path, source } => {
                write!(f, "{}: {}", path.display(), source)
            }
        }
    }
}

impl AppError {
    fn exit_code(&self) -> i32 {
        match self {
            AppError::Validation(_) => 2,
            AppError::Io { .. } => 3,
        }
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(err) = run(cli) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}

fn run(cli: Cli) -> Result<(), AppError> {
    match cli.command {
        Command::Network => run_network(),
        Command::Maps(args) => run_maps(args),
        Command::Indices(args) => run_indices(args),
        Command::Regions(args) => run_regions(args),
        Command::Simulate(args) => run_simulate(args),
        Command::Basin(args) => run_basin(args),
    }
}

// ---------------------------------------------------------------------------
// Shared helpers
// ---------------------------------------------------------------------------

fn parse_cycle(name: &str) -> Result<CycleId, AppError> {
    CycleId::from_name(name).ok_or_else(|| {
        AppError::Validation(format!("unknown cycle {name:?}; expected one of C0..C4"))
    })
}

fn parse_node(name: &str) -> Result<NodeLabel, AppError> {
    NodeLabel::from_name(name).ok_or_else(|| {
        AppError::Validation(format!("unknown node {name:?}; expected xi0, xi1 or xi2"))
    })
}

fn vertex_code(v: Vertex) -> String {
    format!("{}{}", v.x.letter(), v.y.letter())
}

/// Write to the given file, or to standard output when no path is given.
fn emit(out: Option<&Path>, contents: &str) -> Result<(), AppError> {
    match out {
        Some(path) => fs::write(path, contents).map_err(|source| AppError::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => io::stdout()
            .lock()
            .write_all(contents.as_bytes())
            .map_err(|source| AppError::Io { path: PathBuf::from("<stdout>"), source }),
    }
}

fn pretty(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values serialise");
    s.push('\n');
    s
}

// ---------------------------------------------------------------------------
// network
// ---------------------------------------------------------------------------

fn run_network() -> Result<(), AppError> {
    let net = build_quotient_network();
    let nodes: Vec<_> = net
        .nodes
        .iter()
        .map(|n| {
            json!({
                "label": n.name(),
                "members": n.members().map(vertex_code),
            })
        })
        .collect();
    let connections: Vec<_> = net
        .connections
        .iter()
        .map(|c| {
            json!({
                "from": c.from.name(),
                "to": c.to.name(),
                "representative": [vertex_code(c.representative.0), vertex_code(c.representative.1)],
                "moving_player": match c.moving_player() { Player::X => "x", Player::Y => "y" },
                "face": c.face_pattern(),
                "span": c.span_pattern(),
            })
        })
        .collect();
    let cycles: Vec<_> = net
        .cycles
        .iter()
        .map(|c| {
            json!({
                "id": c.id.name(),
                "nodes": c.nodes.iter().map(|n| n.name()).collect::<Vec<_>>(),
            })
        })
        .collect();
    let doc = json!({
        "version": 1,
        "nodes": nodes,
        "connections": connections,
        "cycles": cycles,
    });
    emit(None, &pretty(&doc))
}

// ---------------------------------------------------------------------------
// maps
// ---------------------------------------------------------------------------

/// Fifteen significant digits; scientific notation is valid JSON.
fn num15(v: f64) -> String {
    format!("{v:.14e}")
}

fn matrix_document(
    kind: &str,
    cycle: CycleId,
    node: NodeLabel,
    params: &PayoffParams,
    tm: &TransitionMatrix,
) -> String {
    let e = tm.entries();
    let mut rows = String::new();
    for (i, row) in e.iter().enumerate() {
        let _ = write!(
            rows,
            "[{}, {}, {}]{}",
            num15(row[0]),
            num15(row[1]),
            num15(row[2]),
            if i < 2 { ", " } else { "" }
        );
    }
    format!(
        "{{\n  \"version\": 1,\n  \"kind\": \"{kind}\",\n  \"cycle\": \"{}\",\n  \"node\": \"{}\",\n  \"eps_x\": {},\n  \"eps_y\": {},\n  \"rows\": [{rows}]\n}}\n",
        cycle.name(),
        node.name(),
        num15(params.eps_x()),
        num15(params.eps_y()),
    )
}

fn run_maps(args: MapsArgs) -> Result<(), AppError> {
    let params = args.params.build()?;
    let cycle = parse_cycle(&args.cycle)?;
    let node = parse_node(&args.node)?;
    let (kind, tm) = match args.kind {
        MatrixChoice::Basic => ("basic", basic_transition_matrix(cycle, node, &params)),
        MatrixChoice::Composite => ("composite", cycle_transition_matrix(cycle, node, &params)),
    };
    let tm = tm.map_err(|e| AppError::Validation(e.to_string()))?;
    emit(None, &matrix_document(kind, cycle, node, &params, &tm))
}

// ---------------------------------------------------------------------------
// indices
// ---------------------------------------------------------------------------

fn requested_cycles(flag: &str) -> Result<Vec<CycleId>, AppError> {
    if flag == "all" {
        Ok(CycleId::ALL.to_vec())
    } else {
        Ok(vec![parse_cycle(flag)?])
    }
}

fn report_json(report: &StabilityReport, path: &str) -> serde_json::Value {
    let sigma: serde_json::Map<String, serde_json::Value> =
        if report.classification == Classification::Boundary {
            serde_json::Map::new()
        } else {
            report
                .sigma
                .iter()
                .map(|(n, v)| {
                    (n.name().to_string(), serde_json::to_value(v).expect("index serialises"))
                })
                .collect()
        };
    json!({
        "cycle": report.cycle.name(),
        "eps_x": report.eps_x,
        "eps_y": report.eps_y,
        "path": path,
        "sigma": sigma,
        "classification": report.classification.tag(),
    })
}

fn report_csv(buf: &mut String, report: &StabilityReport, path: &str) {
    use rsp_dynamics::stability::StabilityIndexValue;
    let head = format!(
        "{},{},{:.16e},{:.16e}",
        report.cycle.name(),
        path,
        report.eps_x,
        report.eps_y
    );
    for (node, value) in &report.sigma {
        let sigma = if report.classification == Classification::Boundary {
            String::new()
        } else {
            match value {
                StabilityIndexValue::PosInf => "inf".to_string(),
                StabilityIndexValue::NegInf => "-inf".to_string(),
                StabilityIndexValue::Finite(v) => format!("{v:.16e}"),
            }
        };
        let _ = writeln!(
            buf,
            "{head},{},{sigma},{}",
            node.name(),
            report.classification.tag()
        );
    }
}

fn run_indices(args: IndicesArgs) -> Result<(), AppError> {
    let params = args.params.build()?;
    let cycles = requested_cycles(&args.cycle)?;
    let mut reports: Vec<(StabilityReport, &'static str)> = Vec::new();
    for cycle in cycles {
        if matches!(args.path, PathChoice::Closed | PathChoice::Both) {
            reports.push((classify(cycle, &params), "closed"));
        }
        if matches!(args.path, PathChoice::Matrix | PathChoice::Both) {
            let report = classify_matrix_path(cycle, &params)
                .map_err(|e| AppError::Validation(e.to_string()))?;
            reports.push((report, "matrix"));
        }
    }
    let rendered = match args.format {
        FormatChoice::Json => {
            let results: Vec<_> =
                reports.iter().map(|(r, path)| report_json(r, path)).collect();
            pretty(&json!({ "version": 1, "results": results }))
        }
        FormatChoice::Csv => {
            let mut buf = String::from("cycle,path,eps_x,eps_y,node,sigma,classification\n");
            for (report, path) in &reports {
                report_csv(&mut buf, report, path);
            }
            buf
        }
    };
    emit(None, &rendered)
}

// ---------------------------------------------------------------------------
// regions
// ---------------------------------------------------------------------------

fn run_regions(args: RegionsArgs) -> Result<(), AppError> {
    if args.resolution < 11 {
        return Err(AppError::Validation(format!(
            "grid resolution must be at least 11, got {}",
            args.resolution
        )));
    }
    let grid = harness::run_region_sweep(args.resolution);
    let mut buf = Vec::new();
    harness::write_regions_csv(&grid, &mut buf).expect("in-memory writes succeed");
    let text = String::from_utf8(buf).expect("CSV is ASCII");
    emit(args.out.as_deref(), &text)
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

fn parse_initial(text: &str) -> Result<GameState, AppError> {
    let fields: Vec<&str> = text.split(',').map(str::trim).collect();
    if fields.len() != 6 {
        return Err(AppError::Validation(format!(
            "initial state needs six comma-separated frequencies, got {}",
            fields.len()
        )));
    }
    let mut coords = [0.0; 6];
    for (slot, field) in coords.iter_mut().zip(&fields) {
        *slot = field.parse::<f64>().map_err(|_| {
            AppError::Validation(format!("not a frequency: {field:?}"))
        })?;
    }
    GameState::from_array(coords).map_err(|e| AppError::Validation(e.to_string()))
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut os = prefix.as_os_str().to_os_string();
    os.push(suffix);
    os.into()
}

fn run_simulate(args: SimulateArgs) -> Result<(), AppError> {
    let params = args.params.build()?;
    let initial = parse_initial(&args.initial)?;
    if !(args.t_max > 0.0 && args.t_max.is_finite()) {
        return Err(AppError::Validation("t-max must be positive and finite".into()));
    }
    if !(args.dt > 0.0 && args.dt.is_finite()) {
        return Err(AppError::Validation("dt must be positive and finite".into()));
    }
    if !(args.near_threshold > 0.0 && args.near_threshold < 0.5) {
        return Err(AppError::Validation("near-threshold must lie in (0, 0.5)".into()));
    }
    let traj = flow::integrate(&initial, &params, args.t_max, args.dt)
        .map_err(|e| AppError::Validation(e.to_string()))?;
    let itin = flow::itinerary(&traj, args.near_threshold);

    let mut buf = Vec::new();
    harness::write_trajectory_csv(&traj, &mut buf).expect("in-memory writes succeed");
    let path = with_suffix(&args.out, ".trajectory.csv");
    fs::write(&path, &buf).map_err(|source| AppError::Io { path, source })?;

    buf.clear();
    harness::write_itinerary_csv(&itin, &mut buf).expect("in-memory writes succeed");
    let path = with_suffix(&args.out, ".itinerary.csv");
    fs::write(&path, &buf).map_err(|source| AppError::Io { path, source })?;
    Ok(())
}

// ---------------------------------------------------------------------------
// basin
// ---------------------------------------------------------------------------

fn run_basin(args: BasinArgs) -> Result<(), AppError> {
    let params = args.params.build()?;
    let cycle = parse_cycle(&args.cycle)?;
    if !(args.delta > 0.0 && args.delta < 0.2) {
        return Err(AppError::Validation("delta must lie in (0, 0.2)".into()));
    }
    if args.samples < 100 {
        return Err(AppError::Validation(format!(
            "basin estimates need at least 100 samples, got {}",
            args.samples
        )));
    }
    if !(args.horizon > 0.0 && args.horizon.is_finite()) {
        return Err(AppError::Validation("horizon must be positive and finite".into()));
    }
    let estimate = harness::estimate_basin_fraction(
        cycle,
        &params,
        args.delta,
        args.samples,
        args.horizon,
        args.seed,
    );
    let mut doc = serde_json::to_value(&estimate).expect("estimates serialise");
    doc.as_object_mut()
        .expect("estimate serialises as an object")
        .insert("version".into(), json!(1));
    emit(args.out.as_deref(), &pretty(&doc))
}
