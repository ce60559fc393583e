mod config;
mod output;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};
use univalent::acceptance;
use univalent::analytic::Analytic;
use univalent::constants::ConstantsReport;
use univalent::funclang::parse_complex;
use univalent::loewner::{criteria_report, ExtensionGrid, ExtensionOptions, ExtensionSummary, SpirallikeExtension};
use univalent::norms::{norm, FieldKind};
use univalent::subordination::subordination_check;
use univalent::transforms::{TransformOp, Transformed, TransformRequest, Representation};
use univalent::{Error, ErrorClass, FunctionSpec};

use crate::config::CliConfig;

#[derive(Parser)]
#[command(name = "univalent", version, about = "Transforms, norms and quasiconformal extensions of univalent functions")]
struct Cli {
    /// JSON configuration file; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (JSON, or CSV for `extend`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for the randomized suites.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Solver tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Series truncation order.
    #[arg(long, global = true)]
    trunc: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
enum What {
    #[value(name = "T")]
    T,
    #[value(name = "S")]
    S,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
enum OpArg {
    #[value(name = "J")]
    J,
    #[value(name = "I")]
    I,
    #[value(name = "alexander")]
    Alexander,
}

impl OpArg {
    fn op(self) -> TransformOp {
        match self {
            OpArg::J => TransformOp::JAlpha,
            OpArg::I => TransformOp::IAlpha,
            OpArg::Alexander => TransformOp::Alexander,
        }
    }
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
enum ReprArg {
    Series,
    Pointwise,
}

#[derive(Subcommand)]
enum Command {
    /// The sharp constants r0, h(r0), theta0, beta0, alpha0 and their deviations.
    Constants,
    /// Hyperbolic norm of T_f or S_f, optionally of J_alpha[f] or I_alpha[f].
    Norm {
        #[arg(long)]
        what: What,
        #[arg(long)]
        function: String,
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long)]
        transform: Option<OpArg>,
    },
    /// Value of J_alpha[f], I_alpha[f] or J[f] at a point.
    Transform {
        #[arg(long)]
        op: OpArg,
        #[arg(long, default_value = "1")]
        alpha: String,
        #[arg(long)]
        function: String,
        #[arg(long)]
        eval: String,
        #[arg(long, value_enum, default_value = "pointwise")]
        repr: ReprArg,
    },
    /// Univalence and extension criteria report card.
    Criteria {
        #[arg(long)]
        function: String,
        #[arg(long, default_value = "1")]
        alpha: String,
    },
    /// Explicit quasiconformal extension of a spirallike map on an exterior grid.
    Extend {
        #[arg(long)]
        function: String,
        #[arg(long, default_value = "0")]
        lambda: String,
        /// Radial x angular cell counts.
        #[arg(long, default_value = "50x180")]
        grid: String,
        #[arg(long, default_value_t = 3.0)]
        rout: f64,
        #[arg(long, default_value_t = 1e-4)]
        fd_step: f64,
    },
    /// Range containment of f in a convex dominant with matched centres.
    Subord {
        #[arg(long)]
        function: String,
        #[arg(long, default_value = "catalog:q-dominant")]
        dominant: String,
        #[arg(long, default_value_t = 4096)]
        samples: usize,
    },
    /// Runs the acceptance suite and prints a pass/fail table.
    Selftest {
        /// Restrict to these criterion numbers.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
    },
}

enum CliError {
    Core(Error),
    Input(String),
    Failed(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) => match e.class() {
                ErrorClass::Solver => 2,
                ErrorClass::Evaluation => 3,
                ErrorClass::Input => 4,
            },
            CliError::Input(_) => 4,
            CliError::Failed(_) => 1,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Core(e) => e.to_string(),
            CliError::Input(s) | CliError::Failed(s) => s.clone(),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn spec(text: &str) -> CliResult<FunctionSpec> {
    Ok(text.parse::<FunctionSpec>()?)
}

fn complex(text: &str) -> CliResult<Complex64> {
    Ok(parse_complex(text)?)
}

fn real(text: &str, what: &str) -> CliResult<f64> {
    let c = complex(text)?;
    if c.im != 0.0 {
        return Err(CliError::Input(format!("{what} must be real, got {text}")));
    }
    Ok(c.re)
}

fn pair(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn resolve_config(cli: &Cli) -> CliResult<CliConfig> {
    let mut cfg = match &cli.config {
        Some(path) => CliConfig::load(path).map_err(CliError::Input)?,
        None => CliConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(t) = cli.tol {
        cfg.solver_tol = t;
    }
    if let Some(n) = cli.trunc {
        cfg.truncation_order = n;
    }
    if let Some(o) = &cli.out {
        cfg.output_path = Some(o.display().to_string());
    }
    cfg.validate().map_err(CliError::Input)?;
    Ok(cfg)
}

/// The output document: command, config echo, input hash, request and result.
fn document(command: &str, cfg: &CliConfig, request: Value, result: Value) -> CliResult<Value> {
    let input = json!({ "command": command, "config": cfg, "request": request });
    let hash = output::content_hash(&input).map_err(|e| CliError::Input(e.to_string()))?;
    Ok(json!({
        "command": command,
        "config": cfg,
        "input_sha256": hash,
        "request": request,
        "result": result,
    }))
}

fn emit(doc: &Value, path: Option<&Path>) -> CliResult<()> {
    let text = output::render(doc).map_err(|e| CliError::Input(e.to_string()))?;
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Input(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> CliResult<Value> {
    serde_json::to_value(v).map_err(|e| CliError::Input(e.to_string()))
}

fn run(cli: Cli) -> CliResult<()> {
    let cfg = resolve_config(&cli)?;
    let out = cfg.output_path.as_ref().map(PathBuf::from);
    match &cli.command {
        Command::Constants => {
            let report = ConstantsReport::compute(cfg.solver_tol)?;
            let doc = document("constants", &cfg, json!({}), to_value(&report)?)?;
            emit(&doc, out.as_deref())
        }
        Command::Norm { what, function, alpha, transform } => {
            let f = spec(function)?;
            let kind = match what {
                What::T => FieldKind::PreSchwarzian,
                What::S => FieldKind::Schwarzian,
            };
            let alpha = alpha.as_deref().map(complex).transpose()?;
            let op = match (alpha, transform) {
                (None, None) => None,
                (_, Some(t)) => Some(t.op()),
                (Some(_), None) => Some(TransformOp::JAlpha),
            };
            let alpha = alpha.unwrap_or(Complex64::new(1.0, 0.0));
            let opts = cfg.norm_options();
            let result = match op {
                None => norm(&f.compile()?, kind, &opts)?,
                Some(op) => norm(&Transformed::from_spec(&f, alpha, op)?, kind, &opts)?,
            };
            let request = json!({
                "what": what,
                "function": f,
                "alpha": op.map(|_| pair(alpha)),
                "transform": op,
            });
            emit(&document("norm", &cfg, request, to_value(&result)?)?, out.as_deref())
        }
        Command::Transform { op, alpha, function, eval, repr } => {
            let f = spec(function)?;
            let alpha = complex(alpha)?;
            let z = complex(eval)?;
            let representation = match repr {
                ReprArg::Series => Representation::Series,
                ReprArg::Pointwise => Representation::Pointwise,
            };
            let req = TransformRequest { f, alpha, op: op.op(), representation };
            if !(z.norm() < 1.0) {
                return Err(Error::domain(z, "transforms are evaluated inside the unit disk").into());
            }
            let series = req.series(cfg.truncation_order)?.eval(z);
            let pointwise = req.pointwise()?.value(z)?;
            let value = match representation {
                Representation::Series => series,
                Representation::Pointwise => pointwise,
            };
            let result = json!({
                "value": pair(value),
                "series_value": pair(series),
                "pointwise_value": pair(pointwise),
                "difference": (series - pointwise).norm(),
            });
            let request = json!({ "transform": req, "z": pair(z) });
            emit(&document("transform", &cfg, request, result)?, out.as_deref())
        }
        Command::Criteria { function, alpha } => {
            let f = spec(function)?;
            let alpha = complex(alpha)?;
            let report = criteria_report(&f.compile()?, alpha, &cfg.norm_options());
            let request = json!({ "function": f, "alpha": pair(alpha) });
            emit(&document("criteria", &cfg, request, to_value(&report)?)?, out.as_deref())
        }
        Command::Extend { function, lambda, grid, rout, fd_step } => {
            let f = spec(function)?;
            let lambda = real(lambda, "lambda")?;
            let (n_r, n_theta) = grid
                .split_once('x')
                .and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)))
                .ok_or_else(|| CliError::Input(format!("--grid `{grid}`: expected NRxNTHETA")))?;
            let opts = ExtensionOptions { r_out_max: *rout, n_r, n_theta, fd_step: *fd_step, ..Default::default() };
            let ext = SpirallikeExtension::from_spec(&f, lambda)?;
            let g = ExtensionGrid::compute(&ext, &opts)?;
            if let Some(path) = &out {
                write_csv(&g, path)?;
            }
            let request = json!({ "function": f, "lambda": lambda, "options": opts });
            let doc = document("extend", &cfg, request, to_value(&g.summary)?)?;
            if let Some(path) = &out {
                emit(&doc, Some(&path.with_extension("json")))?;
            }
            emit(&doc, None)?;
            too_many_failures(&g.summary)
        }
        Command::Subord { function, dominant, samples } => {
            let f = spec(function)?;
            let q = spec(dominant)?;
            let check = subordination_check(&f.compile()?, &q.compile()?, *samples)?;
            let request = json!({ "function": f, "dominant": q, "samples": samples });
            emit(&document("subord", &cfg, request, to_value(&check)?)?, out.as_deref())
        }
        Command::Selftest { only } => {
            let ids: Vec<u8> = if only.is_empty() {
                acceptance::CRITERIA.iter().map(|c| c.0).collect()
            } else {
                only.clone()
            };
            let mut rows = Vec::new();
            for id in ids {
                let o = acceptance::run(id, cfg.seed);
                println!("{o}");
                rows.push(json!({ "id": o.id, "title": o.title, "passed": o.passed, "detail": o.detail }));
            }
            let failed: Vec<u64> =
                rows.iter().filter(|r| r["passed"] == false).filter_map(|r| r["id"].as_u64()).collect();
            let n = rows.len();
            println!("{} of {n} criteria passed", n - failed.len());
            if let Some(path) = &out {
                let doc = document("selftest", &cfg, json!({ "criteria": rows.len() }), Value::Array(rows))?;
                emit(&doc, Some(path))?;
            }
            if failed.is_empty() {
                Ok(())
            } else {
                Err(CliError::Failed(format!("criteria {failed:?} failed")))
            }
        }
    }
}

fn too_many_failures(s: &ExtensionSummary) -> CliResult<()> {
    if s.failures * 100 > s.total {
        return Err(Error::TooManyFailures {
            failed: s.failures,
            total: s.total,
            first: s.first_failure.clone().unwrap_or_default(),
        }
        .into());
    }
    Ok(())
}

fn write_csv(g: &ExtensionGrid, path: &Path) -> CliResult<()> {
    let io = |e: csv::Error| CliError::Input(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(["x", "y", "u", "v", "mu_abs", "t", "theta", "ok"]).map_err(io)?;
    let num = |x: f64| if x.is_nan() { "NaN".to_string() } else { format!("{x:.16e}") };
    for p in &g.points {
        w.write_record([
            num(p.z.re),
            num(p.z.im),
            num(p.phi.re),
            num(p.phi.im),
            num(p.mu_abs),
            num(p.t),
            num(p.theta),
            p.ok.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 4 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
