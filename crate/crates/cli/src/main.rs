//! `scexp`: Rényi divergences, channel information, strong converse exponent
//! curves, code simulation and property suites.
//!
//! Exit codes: 0 success, 2 validation failure (bad input or a violated
//! invariant), 3 solver failure.

mod input;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use scexp_core::coding::{
    build_ea_code, empirical_exponent, success_probability, CodebookSampling, EncodingSide, SimulationPoint,
    SimulationResult, SharedState,
};
use scexp_core::divergence::{log_euclidean_divergence, sandwiched_divergence, RenyiOrder, EXTRAPOLATION_TOL};
use scexp_core::optimize::{
    channel_renyi_info_with, feedback_exponent, quantum_exponent, strong_converse_exponent, ExponentQuery,
    ExponentResult, InputOptions,
};
use scexp_core::suites::{self, SuiteReport};
use scexp_core::{Error as CoreError, QuantumChannel};

use output::{Format, Sink};

#[derive(Parser)]
#[command(name = "scexp", version, about = "Strong converse exponents of entanglement-assisted communication")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sandwiched and log-Euclidean Rényi divergences of a state pair.
    Divergence(DivergenceArgs),
    /// Sandwiched Rényi channel information I*_α(N); α = 1 gives the EA capacity.
    ChannelInfo(ChannelInfoArgs),
    /// Strong converse exponent over a grid of rates.
    ExponentCurve(CurveArgs),
    /// Random Heisenberg–Weyl codes with square-root decoding.
    Simulate(SimulateArgs),
    /// Runs a seeded property suite (or `all`).
    Verify(VerifyArgs),
}

#[derive(Args)]
struct OutputArgs {
    /// Output file (standard output when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

impl OutputArgs {
    fn sink(&self, default: Format) -> Result<Sink> {
        Sink::open(self.out.as_deref(), self.format.unwrap_or(default))
    }
}

#[derive(Args)]
struct SolverArgs {
    /// Residual tolerance of the input maximization.
    #[arg(long, env = "SCEXP_GRAD_TOL", default_value_t = 1e-6)]
    tolerance: f64,
    /// Residual tolerance of the inner σ_B minimization.
    #[arg(long, env = "SCEXP_INNER_GRAD_TOL", default_value_t = 1e-7)]
    inner_tolerance: f64,
}

impl SolverArgs {
    fn options(&self) -> Result<InputOptions> {
        for (name, v) in [("tolerance", self.tolerance), ("inner-tolerance", self.inner_tolerance)] {
            if !(v > 0.0 && v.is_finite()) {
                bail!("{name} must be positive, got {v}");
            }
        }
        let mut o = InputOptions::default();
        o.outer.grad_tol = self.tolerance;
        o.inner.grad_tol = self.inner_tolerance;
        Ok(o)
    }
}

#[derive(Args)]
struct DivergenceArgs {
    /// State ρ: `diag:p1,p2,..`, `mixed:<d>`, `basis:<d>:<k>` or a JSON matrix file.
    #[arg(long)]
    rho: String,
    /// Positive operator σ, same forms as `--rho`.
    #[arg(long)]
    sigma: String,
    /// Orders, as a list `a,b,..` or a grid `start:stop:step`; 1 is the relative entropy.
    #[arg(long, default_value = "2")]
    alpha: String,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct ChannelInfoArgs {
    /// `preset:<kind>[:<param>[:<dim>]]` or a JSON channel file.
    #[arg(long)]
    channel: String,
    #[arg(long, default_value = "1.5,2,5")]
    alpha: String,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ExponentKind {
    /// Classical communication with entanglement assistance.
    Ea,
    /// Quantum communication with entanglement assistance.
    Quantum,
    /// Classical communication with quantum feedback.
    Feedback,
}

#[derive(Args)]
struct CurveArgs {
    #[arg(long)]
    channel: String,
    /// Rates in bits per channel use: a list or `start:stop:step`.
    #[arg(long)]
    rates: String,
    #[arg(long, value_enum, default_value_t = ExponentKind::Ea)]
    kind: ExponentKind,
    /// δ: the search runs over λ ∈ [δ, 1-δ].
    #[arg(long, env = "SCEXP_LAMBDA_DELTA", default_value_t = 1e-4)]
    lambda_window: f64,
    /// Golden-section stopping width in λ.
    #[arg(long, env = "SCEXP_LAMBDA_TOL", default_value_t = 1e-5)]
    lambda_tol: f64,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Sampling {
    Independent,
    WithoutReplacement,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    channel: String,
    #[arg(long)]
    rate: f64,
    /// A list `1,2,3` or an inclusive range `1:5`.
    #[arg(long, default_value = "1:4")]
    blocklengths: String,
    /// First seed; blocklength n of seed s draws its codebook from s + n.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Number of consecutive seeds.
    #[arg(long, default_value_t = 1)]
    seeds: u64,
    #[arg(long, value_enum, default_value_t = Sampling::Independent)]
    sampling: Sampling,
    /// Skip computing sc(N, R) for the fit records.
    #[arg(long)]
    no_exponent: bool,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct VerifyArgs {
    /// One of identity, commuting, properties, dominance, variational, threshold, simulator, pinching, all.
    suite: String,
    #[arg(long, default_value_t = suites::DEFAULT_SEED)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// `jsonl` emits one report per suite; the default is a text summary.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

/// A failure with its exit code.
#[derive(Debug)]
enum Failure {
    Validation(anyhow::Error),
    Solver(anyhow::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 2,
            Failure::Solver(_) => 3,
        }
    }
}

fn is_solver_error(e: &CoreError) -> bool {
    match e {
        CoreError::NotConverged { .. } | CoreError::MultiModal { .. } | CoreError::Extrapolation { .. } => true,
        CoreError::AtLambda { source, .. } => is_solver_error(source),
        _ => false,
    }
}

fn classify(e: anyhow::Error) -> Failure {
    let solver = e.chain().any(|c| c.downcast_ref::<CoreError>().is_some_and(is_solver_error));
    if solver {
        Failure::Solver(e)
    } else {
        Failure::Validation(e)
    }
}

/// Status column and exit code for a per-record result.
fn status_of(e: &anyhow::Error) -> String {
    let kind = if e.chain().any(|c| c.downcast_ref::<CoreError>().is_some_and(is_solver_error)) {
        "solver_failure"
    } else {
        "invalid"
    };
    format!("{kind}: {e:#}")
}

fn order_of(alpha: f64) -> Result<RenyiOrder> {
    if alpha == 1.0 {
        Ok(RenyiOrder::limit())
    } else {
        Ok(RenyiOrder::new(alpha)?)
    }
}

#[derive(Serialize)]
struct DivergenceRecord {
    alpha: f64,
    lambda: f64,
    sandwiched: f64,
    log_euclidean: f64,
    extrapolation_tol: f64,
}

fn cmd_divergence(a: &DivergenceArgs) -> Result<(), Failure> {
    let rho = input::parse_state(&a.rho).map_err(Failure::Validation)?;
    let sigma = input::parse_positive(&a.sigma).map_err(Failure::Validation)?;
    let alphas = input::parse_grid(&a.alpha).map_err(Failure::Validation)?;
    let records = alphas
        .iter()
        .map(|&alpha| -> Result<DivergenceRecord> {
            let o = order_of(alpha)?;
            Ok(DivergenceRecord {
                alpha,
                lambda: o.lambda(),
                sandwiched: sandwiched_divergence(&rho, &sigma, o)?.value(),
                log_euclidean: log_euclidean_divergence(&rho, &sigma, o)?.value(),
                extrapolation_tol: EXTRAPOLATION_TOL,
            })
        })
        .collect::<Result<Vec<_>>>()
        .map_err(classify)?;
    let mut sink = a.output.sink(Format::Csv).map_err(Failure::Validation)?;
    for r in &records {
        sink.write(r).map_err(Failure::Validation)?;
    }
    sink.finish().map_err(Failure::Validation)
}

#[derive(Serialize)]
struct ChannelInfoRecord {
    alpha: f64,
    lambda: f64,
    information: Option<f64>,
    iterations: Option<usize>,
    residual: Option<f64>,
    restart_spread: Option<f64>,
    status: String,
    grad_tol: f64,
    inner_grad_tol: f64,
    spread_tol: f64,
}

fn parse_channel(arg: &str) -> Result<QuantumChannel, Failure> {
    input::parse_channel(arg).map_err(Failure::Validation)
}

/// Writes the records and turns the worst record status into the exit code.
fn emit<T: Serialize>(output: &OutputArgs, default: Format, records: &[(T, Option<Failure>)]) -> Result<(), Failure> {
    let mut sink = output.sink(default).map_err(Failure::Validation)?;
    for (r, _) in records {
        sink.write(r).map_err(Failure::Validation)?;
    }
    sink.finish().map_err(Failure::Validation)?;
    let worst = records.iter().filter_map(|(_, f)| f.as_ref()).max_by_key(|f| f.code());
    match worst {
        Some(Failure::Solver(e)) => Err(Failure::Solver(anyhow::anyhow!("{e:#}"))),
        Some(Failure::Validation(e)) => Err(Failure::Validation(anyhow::anyhow!("{e:#}"))),
        None => Ok(()),
    }
}

fn cmd_channel_info(a: &ChannelInfoArgs) -> Result<(), Failure> {
    let ch = parse_channel(&a.channel)?;
    let alphas = input::parse_grid(&a.alpha).map_err(Failure::Validation)?;
    let opts = a.solver.options().map_err(Failure::Validation)?;
    let orders = alphas.iter().map(|&x| order_of(x)).collect::<Result<Vec<_>>>().map_err(Failure::Validation)?;
    let records: Vec<_> = orders
        .par_iter()
        .zip(alphas.par_iter())
        .map(|(&o, &alpha)| {
            let base = ChannelInfoRecord {
                alpha,
                lambda: o.lambda(),
                information: None,
                iterations: None,
                residual: None,
                restart_spread: None,
                status: "ok".into(),
                grad_tol: opts.outer.grad_tol,
                inner_grad_tol: opts.inner.grad_tol,
                spread_tol: opts.spread_tol,
            };
            match channel_renyi_info_with(&ch, o, &opts, None) {
                Ok(info) => {
                    let lo = info.restart_values.iter().cloned().fold(f64::INFINITY, f64::min);
                    let hi = info.restart_values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                    let rec = ChannelInfoRecord {
                        information: Some(info.value),
                        iterations: Some(info.iterations),
                        residual: Some(info.residual),
                        restart_spread: Some(if hi >= lo { hi - lo } else { 0.0 }),
                        ..base
                    };
                    (rec, None)
                }
                Err(e) => {
                    let e = anyhow::Error::new(e);
                    let rec = ChannelInfoRecord { status: status_of(&e), ..base };
                    (rec, Some(classify(e)))
                }
            }
        })
        .collect();
    emit(&a.output, Format::Csv, &records)
}

#[derive(Serialize)]
struct CurveRecord {
    #[serde(rename = "R")]
    rate: f64,
    sc: Option<f64>,
    lambda_star: Option<f64>,
    alpha_star: Option<f64>,
    truncation_bound: Option<f64>,
    inner_iterations: Option<usize>,
    status: String,
    lambda_delta: f64,
    grad_tol: f64,
    lambda_tol: f64,
}

fn exponent(ch: &QuantumChannel, kind: ExponentKind, q: &ExponentQuery) -> scexp_core::Result<ExponentResult> {
    match kind {
        ExponentKind::Ea => strong_converse_exponent(ch, q),
        ExponentKind::Quantum => quantum_exponent(ch, q),
        ExponentKind::Feedback => feedback_exponent(ch, q),
    }
}

fn query(rate: f64, delta: f64, lambda_tol: f64, solver: &SolverArgs) -> Result<ExponentQuery> {
    let mut q = ExponentQuery::with_delta(rate, delta)?;
    q.lambda_tol = lambda_tol;
    q.solver = solver.options()?;
    q.validate()?;
    Ok(q)
}

fn cmd_exponent_curve(a: &CurveArgs) -> Result<(), Failure> {
    let ch = parse_channel(&a.channel)?;
    let rates = input::parse_grid(&a.rates).map_err(Failure::Validation)?;
    let queries = rates
        .iter()
        .map(|&r| query(r, a.lambda_window, a.lambda_tol, &a.solver))
        .collect::<Result<Vec<_>>>()
        .map_err(Failure::Validation)?;
    let records: Vec<_> = queries
        .par_iter()
        .map(|q| {
            let base = CurveRecord {
                rate: q.rate,
                sc: None,
                lambda_star: None,
                alpha_star: None,
                truncation_bound: None,
                inner_iterations: None,
                status: "ok".into(),
                lambda_delta: q.delta,
                grad_tol: q.solver.outer.grad_tol,
                lambda_tol: q.lambda_tol,
            };
            match exponent(&ch, a.kind, q) {
                Ok(r) => {
                    let rec = CurveRecord {
                        sc: Some(r.value),
                        lambda_star: Some(r.lambda_star),
                        alpha_star: Some(r.alpha_star),
                        truncation_bound: Some(r.truncation_bound),
                        inner_iterations: Some(r.inner_iterations()),
                        ..base
                    };
                    (rec, None)
                }
                Err(e) => {
                    let e = anyhow::Error::new(e);
                    let rec = CurveRecord { status: status_of(&e), ..base };
                    (rec, Some(classify(e)))
                }
            }
        })
        .collect();
    emit(&a.output, Format::Csv, &records)
}

#[derive(Serialize, Default)]
struct SimulationRecord {
    record: &'static str,
    seed: u64,
    rate: f64,
    n: Option<usize>,
    messages: Option<usize>,
    success_probability: Option<f64>,
    exponent: Option<f64>,
    slope: Option<f64>,
    intercept: Option<f64>,
    fit_residual: Option<f64>,
    dropped: Option<String>,
    sc: Option<f64>,
    sc_truncation_bound: Option<f64>,
    sampling: &'static str,
    evaluation: &'static str,
    status: String,
}

fn cmd_simulate(a: &SimulateArgs) -> Result<(), Failure> {
    let ch = parse_channel(&a.channel)?;
    let ns = input::parse_blocklengths(&a.blocklengths).map_err(Failure::Validation)?;
    if !(a.rate.is_finite() && a.rate >= 0.0) {
        return Err(Failure::Validation(anyhow::anyhow!("rate must be nonnegative, got {}", a.rate)));
    }
    if a.seeds == 0 {
        return Err(Failure::Validation(anyhow::anyhow!("--seeds must be positive")));
    }
    let (sampling, sampling_name) = match a.sampling {
        Sampling::Independent => (CodebookSampling::Independent, "independent"),
        Sampling::WithoutReplacement => (CodebookSampling::WithoutReplacement, "without_replacement"),
    };
    let shared = SharedState::maximally_entangled(ch.input_dim());
    let seeds: Vec<u64> = (0..a.seeds).map(|k| a.seed.wrapping_add(k)).collect();
    let jobs: Vec<(u64, usize)> = seeds.iter().flat_map(|&s| ns.iter().map(move |&n| (s, n))).collect();
    let points = jobs
        .par_iter()
        .map(|&(seed, n)| -> scexp_core::Result<SimulationPoint> {
            let code = build_ea_code(&ch, n, &shared, a.rate, seed.wrapping_add(n as u64), sampling)?;
            let p = success_probability(&ch, &code, EncodingSide::Sender)?;
            Ok(SimulationPoint {
                n,
                messages: code.size,
                success_probability: p,
                exponent: 0.0 - p.log2() / n as f64,
            })
        })
        .collect::<scexp_core::Result<Vec<_>>>()
        .map_err(|e| classify(e.into()))?;
    let sc = if a.no_exponent || a.rate <= 0.0 {
        None
    } else {
        let q = query(a.rate, 1e-4, 1e-5, &a.solver).map_err(Failure::Validation)?;
        Some(strong_converse_exponent(&ch, &q).map_err(|e| classify(e.into()))?)
    };
    let mut sink = a.output.sink(Format::Jsonl).map_err(Failure::Validation)?;
    for (k, &seed) in seeds.iter().enumerate() {
        let chunk = &points[k * ns.len()..(k + 1) * ns.len()];
        for p in chunk {
            let rec = SimulationRecord {
                record: "point",
                seed,
                rate: a.rate,
                n: Some(p.n),
                messages: Some(p.messages),
                success_probability: Some(p.success_probability),
                exponent: Some(p.exponent),
                sampling: sampling_name,
                evaluation: "exact",
                status: "ok".into(),
                ..Default::default()
            };
            sink.write(&rec).map_err(Failure::Validation)?;
        }
        let result = SimulationResult {
            rate: a.rate,
            seed,
            points: chunk.to_vec(),
        };
        let mut fit = SimulationRecord {
            record: "fit",
            seed,
            rate: a.rate,
            sc: sc.as_ref().map(|r| r.value),
            sc_truncation_bound: sc.as_ref().map(|r| r.truncation_bound),
            sampling: sampling_name,
            evaluation: "exact",
            status: "ok".into(),
            ..Default::default()
        };
        match empirical_exponent(&result) {
            Ok(f) => {
                fit.slope = Some(f.slope);
                fit.intercept = Some(f.intercept);
                fit.fit_residual = Some(f.residual);
                fit.dropped = Some(f.dropped.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(" "));
            }
            Err(e) => fit.status = format!("no_fit: {e}"),
        }
        sink.write(&fit).map_err(Failure::Validation)?;
    }
    sink.finish().map_err(Failure::Validation)
}

#[derive(Serialize)]
struct PropertyLine<'a> {
    property: &'a str,
    checks: usize,
    worst_margin: f64,
    slack: f64,
}

#[derive(Serialize)]
struct ViolationLine<'a> {
    property: &'a str,
    case: usize,
    margin: f64,
    slack: f64,
    detail: &'a str,
}

#[derive(Serialize)]
struct ReportLine<'a> {
    suite: &'a str,
    seed: u64,
    passed: bool,
    cases: usize,
    checks: usize,
    properties: Vec<PropertyLine<'a>>,
    violations: Vec<ViolationLine<'a>>,
}

fn report_line(r: &SuiteReport) -> ReportLine<'_> {
    ReportLine {
        suite: r.name,
        seed: r.seed,
        passed: r.passed(),
        cases: r.cases,
        checks: r.checks,
        properties: r
            .properties
            .iter()
            .map(|p| PropertyLine {
                property: p.property,
                checks: p.checks,
                worst_margin: p.worst_margin,
                slack: p.slack,
            })
            .collect(),
        violations: r
            .violations
            .iter()
            .map(|v| ViolationLine {
                property: v.property,
                case: v.case,
                margin: v.margin,
                slack: v.slack,
                detail: &v.detail,
            })
            .collect(),
    }
}

fn write_text(w: &mut dyn std::io::Write, r: &SuiteReport) -> std::io::Result<()> {
    let verdict = if r.passed() { "PASS" } else { "FAIL" };
    writeln!(
        w,
        "{verdict} {} seed={} cases={} checks={} violations={}",
        r.name,
        r.seed,
        r.cases,
        r.checks,
        r.violations.len()
    )?;
    for p in &r.properties {
        writeln!(w, "  {}: checks={} worst_margin={:e} slack={:e}", p.property, p.checks, p.worst_margin, p.slack)?;
    }
    for v in &r.violations {
        writeln!(w, "  violated {} (case {}): margin {:e} < -{:e}; {}", v.property, v.case, v.margin, v.slack, v.detail)?;
    }
    Ok(())
}

fn cmd_verify(a: &VerifyArgs) -> Result<(), Failure> {
    let names: Vec<&str> = if a.suite == "all" {
        suites::SUITE_NAMES.to_vec()
    } else if suites::SUITE_NAMES.contains(&a.suite.as_str()) {
        vec![a.suite.as_str()]
    } else {
        return Err(Failure::Validation(anyhow::anyhow!(
            "unknown suite {:?}; expected one of {:?} or all",
            a.suite,
            suites::SUITE_NAMES
        )));
    };
    let reports = names
        .par_iter()
        .map(|name| suites::run(name, a.seed))
        .collect::<scexp_core::Result<Vec<_>>>()
        .map_err(|e| classify(e.into()))?;
    match a.format {
        Some(Format::Csv) => {
            return Err(Failure::Validation(anyhow::anyhow!("verify writes text or jsonl")));
        }
        Some(Format::Jsonl) => {
            let mut sink = Sink::open(a.out.as_deref(), Format::Jsonl).map_err(Failure::Validation)?;
            for r in &reports {
                sink.write(&report_line(r)).map_err(Failure::Validation)?;
            }
            sink.finish().map_err(Failure::Validation)?;
        }
        None => {
            let mut w: Box<dyn std::io::Write> = match &a.out {
                Some(p) => Box::new(std::fs::File::create(p).map_err(|e| Failure::Validation(e.into()))?),
                None => Box::new(std::io::stdout()),
            };
            for r in &reports {
                write_text(&mut *w, r).map_err(|e| Failure::Validation(e.into()))?;
            }
            w.flush().map_err(|e| Failure::Validation(e.into()))?;
        }
    }
    let failed: Vec<String> = reports
        .iter()
        .flat_map(|r| r.violations.iter().map(move |v| format!("{}: {}", r.name, v.property)))
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Validation(anyhow::anyhow!("invariants violated: {}", failed.join(", "))))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Divergence(a) => cmd_divergence(a),
        Command::ChannelInfo(a) => cmd_channel_info(a),
        Command::ExponentCurve(a) => cmd_exponent_curve(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (kind, e) = match &f {
                Failure::Validation(e) => ("validation error", e),
                Failure::Solver(e) => ("solver failure", e),
            };
            eprintln!("scexp: {kind}: {e:#}");
            ExitCode::from(f.code())
        }
    }
}
