//! Command-line front end: run experiments, emit reports, and execute the
//! verification suite.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage/config error,
//! 3 numeric non-convergence. The `JAIN_APPROX_THREADS` environment
//! variable caps the worker count (0 = automatic); reports are
//! byte-identical regardless of the setting.

use clap::{Args, Parser, Subcommand, ValueEnum};
use jain_approx::abel::{normalization_defect, weight, AbelParams, TruncationPolicy};
use jain_approx::bounds::{compare_schemes, m1_constant, modulus_bound, rho_bound, Winner};
use jain_approx::error::{Error, Result};
use jain_approx::functions::{builtin, parse_expr, TestFunction};
use jain_approx::moments::{extract_lambda, moment_report, xi};
use jain_approx::operators::{evaluate, OperatorConfig, OperatorKind};
use jain_approx::report::{
    emit_report, render_report, run_experiment, ExperimentSpec, ReportFormat,
};
use jain_approx::sequences::parse_scheme;
use jain_approx::verify::{verify_suite, VerifyLevel};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "jain-approx",
    version,
    about = "Evaluate modified Jain / Kantorovich operators, their moment identities, and convergence experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Function selector shared by the evaluation subcommands.
#[derive(Args)]
struct FnArgs {
    /// Registry function name (see `--function help` for the list).
    #[arg(long, conflicts_with = "expr")]
    function: Option<String>,
    /// Expression source, e.g. "exp(-x)*(1+x^2)".
    #[arg(long)]
    expr: Option<String>,
}

impl FnArgs {
    fn resolve(&self) -> Result<TestFunction<f64>> {
        match (&self.function, &self.expr) {
            (Some(name), None) => builtin(name),
            (None, Some(src)) => Ok(TestFunction::from_expr(parse_expr(src)?)),
            _ => Err(Error::InvalidParameter(
                "exactly one of --function or --expr is required".into(),
            )),
        }
    }
}

/// Sequence-scheme selector shared by the evaluation subcommands.
#[derive(Args)]
struct SchemeArgs {
    /// Scheme: `identity` | `power-shift:<r>` | `table:<path>`.
    #[arg(long, default_value = "identity")]
    scheme: String,
    /// Beta rule: `const:<v>` | `inv-n` | `table:<path>`.
    #[arg(long, default_value = "const:0")]
    beta: String,
}

#[derive(Subcommand)]
enum Command {
    /// Print the generalized-Poisson weights w(k, α, β) and their
    /// normalization defect.
    Weights {
        /// Rate parameter α ≥ 0.
        #[arg(long)]
        alpha: f64,
        /// Dispersion parameter β in [0, 1).
        #[arg(long, default_value_t = 0.0)]
        beta: f64,
        /// Number of leading weights to print.
        #[arg(long, default_value_t = 10)]
        count: u64,
    },
    /// Evaluate one raw moment J(t^r; x) by every route (closed form,
    /// direct series, factorial expansion).
    Moment {
        /// Moment order r ≤ 6 (closed forms exist for r ≤ 4).
        #[arg(long, default_value_t = 2)]
        order: u32,
        /// Rate dilation a_n.
        #[arg(long)]
        a: f64,
        /// Sample dilation b_n.
        #[arg(long)]
        b: f64,
        /// Dispersion parameter β in [0, 1).
        #[arg(long, default_value_t = 0.0)]
        beta: f64,
        /// Evaluation point x ≥ 0.
        #[arg(long, default_value_t = 1.0)]
        x: f64,
    },
    /// Evaluate the point-sample operator J(f; x).
    Approx {
        #[command(flatten)]
        f: FnArgs,
        #[command(flatten)]
        scheme: SchemeArgs,
        /// Sequence indices, comma-separated.
        #[arg(long, value_delimiter = ',', default_value = "10")]
        n: Vec<u32>,
        /// Evaluation points, comma-separated.
        #[arg(long, value_delimiter = ',', default_value = "1")]
        x: Vec<f64>,
    },
    /// Evaluate the cell-average (integral) operator K(f; x).
    Kantorovich {
        #[command(flatten)]
        f: FnArgs,
        #[command(flatten)]
        scheme: SchemeArgs,
        /// Sequence indices, comma-separated.
        #[arg(long, value_delimiter = ',', default_value = "10")]
        n: Vec<u32>,
        /// Evaluation points, comma-separated.
        #[arg(long, value_delimiter = ',', default_value = "1")]
        x: Vec<f64>,
    },
    /// Print the rate functional and error bounds at one cell.
    Bounds {
        #[command(flatten)]
        f: FnArgs,
        #[command(flatten)]
        scheme: SchemeArgs,
        /// Sequence index.
        #[arg(long, default_value_t = 10)]
        n: u32,
        /// Evaluation point x > 0.
        #[arg(long, default_value_t = 1.0)]
        x: f64,
        /// Constant applied to the smoothness term.
        #[arg(long, default_value_t = 1.0)]
        constant: f64,
        /// Weight index for the norm constant; defaults to the function's
        /// growth class.
        #[arg(long)]
        p: Option<u32>,
    },
    /// Compare the identity scheme against the shifted-power scheme.
    Compare {
        /// Exponent of the shifted-power scheme.
        #[arg(long, default_value_t = 2.0)]
        r: f64,
        /// Sequence indices, comma-separated.
        #[arg(long, value_delimiter = ',', default_value = "5,10,20")]
        n: Vec<u32>,
        /// Evaluation points, comma-separated.
        #[arg(long, value_delimiter = ',', default_value = "0,0.25,0.5,0.75,1")]
        x: Vec<f64>,
    },
    /// Run a full experiment from a JSON config (flags override fields)
    /// and emit the report.
    Experiment {
        /// JSON config file mirroring the experiment spec.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Registry function name.
        #[arg(long)]
        function: Option<String>,
        /// Expression source (clears any `function` from the config).
        #[arg(long, conflicts_with = "function")]
        expr: Option<String>,
        /// Scheme selector.
        #[arg(long)]
        scheme: Option<String>,
        /// Beta rule selector.
        #[arg(long)]
        beta: Option<String>,
        /// Sequence indices, comma-separated.
        #[arg(long, value_delimiter = ',')]
        n: Option<Vec<u32>>,
        /// Explicit evaluation points, comma-separated.
        #[arg(long, value_delimiter = ',')]
        x: Option<Vec<f64>>,
        /// Weight index override.
        #[arg(long)]
        p: Option<u32>,
        /// Operator to run.
        #[arg(long, value_enum)]
        operator: Option<OperatorArg>,
        /// Output format.
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
        /// Output file; omitted = stdout.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Constant applied to the smoothness term of the bound column.
        #[arg(long)]
        bound_constant: Option<f64>,
    },
    /// Run the self-verification suite.
    Verify {
        /// Depth: quick identity checks, or full with limit and rate
        /// experiments.
        #[arg(long, value_enum, default_value_t = LevelArg::Quick)]
        level: LevelArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OperatorArg {
    Jain,
    Kantorovich,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Quick,
    Full,
}

fn main() -> ExitCode {
    // Restore the default SIGPIPE disposition so that piping report output
    // into a pager or `head` terminates the process quietly instead of
    // panicking on a closed stdout. Rust masks the signal by default.
    #[cfg(unix)]
    // SAFETY: resetting a signal disposition before any threads are spawned.
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successes; anything else is a
            // usage error.
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    let threads = match std::env::var("JAIN_APPROX_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(t) => t,
            Err(_) => {
                eprintln!("error: JAIN_APPROX_THREADS must be a nonnegative integer, got {v:?}");
                return ExitCode::from(2);
            }
        },
        Err(_) => 0,
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot build worker pool: {e}");
            return ExitCode::from(2);
        }
    };

    match pool.install(|| run(cli.command)) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(classify(&e))
        }
    }
}

/// Maps an error to the documented exit codes: numeric non-convergence is
/// 3, everything else (configuration, selection, parsing, I/O) is 2.
fn classify(err: &Error) -> u8 {
    match err {
        Error::TruncationNotConverged { .. }
        | Error::QuadratureNotConverged { .. }
        | Error::NonFiniteFunctionValue { .. }
        | Error::IllConditionedFit { .. }
        | Error::DegenerateXi
        | Error::DomainError(_)
        | Error::Batch(_) => 3,
        _ => 2,
    }
}

fn run(cmd: Command) -> Result<u8> {
    match cmd {
        Command::Weights { alpha, beta, count } => {
            let params = AbelParams::new(alpha, beta)?;
            let pol = TruncationPolicy::default();
            println!("k,weight");
            for k in 0..count {
                println!("{k},{}", weight(k, &params));
            }
            let defect = normalization_defect(&params, &pol)?;
            eprintln!("normalization defect: {defect:e}");
            Ok(0)
        }
        Command::Moment { order, a, b, beta, x } => {
            let cfg = OperatorConfig::new(1, a, b, beta)?;
            let rep = moment_report(order, &cfg, x)?;
            match rep.closed_value {
                Some(v) => println!("closed:   {v}"),
                None => println!("closed:   (no closed form above order 4)"),
            }
            println!("series:   {}", rep.series_value);
            if let Some(v) = rep.stirling_value {
                println!("stirling: {v}");
            }
            if let Some(g) = rep.abs_gap {
                println!("abs gap:  {g:e}");
            }
            Ok(0)
        }
        Command::Approx { f, scheme, n, x } => {
            eval_table(OperatorKind::Jain, &f, &scheme, &n, &x)
        }
        Command::Kantorovich { f, scheme, n, x } => {
            eval_table(OperatorKind::Kantorovich, &f, &scheme, &n, &x)
        }
        Command::Bounds {
            f,
            scheme,
            n,
            x,
            constant,
            p,
        } => {
            let f = f.resolve()?;
            let scheme = parse_scheme::<f64>(&scheme.scheme, &scheme.beta)?;
            let cfg = OperatorConfig::from_scheme(&scheme, n)?;
            let p = p.unwrap_or_else(|| f.p_class());
            println!("xi:            {}", xi(&cfg, x));
            let b_1 = scheme.values(1)?.1;
            let m1 = if p == 0 {
                1.0
            } else {
                let lambdas = extract_lambda(p, cfg.beta, &cfg)?;
                m1_constant(b_1, p, cfg.beta, &lambdas)?
            };
            println!("m1 constant:   {m1}");
            let b = modulus_bound(&f, &cfg, x, constant)?;
            println!("drift term:    {}", b.drift_term);
            println!("smooth term:   {}", b.smooth_term);
            println!("pointwise:     {}", b.total);
            println!("rho weighted:  {}", rho_bound(&f, &scheme, n, constant)?);
            Ok(0)
        }
        Command::Compare { r, n, x } => {
            let rows = compare_schemes(|t: f64| t * t, &n, r, &x)?;
            println!("n,original_error,modified_error,winner");
            for row in rows {
                let winner = match row.winner {
                    Winner::Original => "original",
                    Winner::Modified => "modified",
                    Winner::Tie => "tie",
                };
                println!(
                    "{},{},{},{winner}",
                    row.n, row.original_error, row.modified_error
                );
            }
            Ok(0)
        }
        Command::Experiment {
            config,
            function,
            expr,
            scheme,
            beta,
            n,
            x,
            p,
            operator,
            format,
            output,
            bound_constant,
        } => {
            let mut spec: ExperimentSpec = match config {
                Some(path) => {
                    let text = std::fs::read_to_string(&path)?;
                    serde_json::from_str(&text).map_err(|e| {
                        Error::InvalidParameter(format!("config {}: {e}", path.display()))
                    })?
                }
                None => ExperimentSpec::default(),
            };
            if let Some(name) = function {
                spec.function = Some(name);
                spec.expr = None;
            }
            if let Some(src) = expr {
                spec.expr = Some(src);
                spec.function = None;
            }
            if let Some(s) = scheme {
                spec.scheme = s;
            }
            if let Some(b) = beta {
                spec.beta = b;
            }
            if let Some(ns) = n {
                spec.n_list = ns;
            }
            if let Some(xs) = x {
                spec.x_list = Some(xs);
            }
            if let Some(pv) = p {
                spec.p = Some(pv);
            }
            if let Some(op) = operator {
                spec.operator = match op {
                    OperatorArg::Jain => OperatorKind::Jain,
                    OperatorArg::Kantorovich => OperatorKind::Kantorovich,
                };
            }
            if let Some(fm) = format {
                spec.format = match fm {
                    FormatArg::Csv => ReportFormat::Csv,
                    FormatArg::Json => ReportFormat::Json,
                };
            }
            if let Some(path) = output {
                spec.output = Some(path);
            }
            if let Some(c) = bound_constant {
                spec.bound_constant = c;
            }

            let (diag, rows) = run_experiment(&spec)?;
            // The diagnostics header goes to stderr so stdout stays pure
            // report data.
            eprintln!(
                "scheme diagnostics: {}",
                serde_json::to_string(&diag)
                    .map_err(|e| Error::Io(format!("diagnostics serialization: {e}")))?
            );
            match &spec.output {
                Some(path) => {
                    emit_report(&rows, spec.format, path)?;
                    eprintln!("wrote {} rows to {}", rows.len(), path.display());
                }
                None => print!("{}", render_report(&rows, spec.format)?),
            }
            Ok(0)
        }
        Command::Verify { level } => {
            let level = match level {
                LevelArg::Quick => VerifyLevel::Quick,
                LevelArg::Full => VerifyLevel::Full,
            };
            let summary = verify_suite(level)?;
            for c in &summary.checks {
                println!(
                    "{:26} residual {:12.5e}  tolerance {:8.1e}  {}",
                    c.name,
                    c.residual,
                    c.tolerance,
                    if c.passed { "pass" } else { "FAIL" }
                );
            }
            if summary.passed {
                println!("verification passed ({} checks)", summary.checks.len());
                Ok(0)
            } else {
                println!(
                    "verification FAILED ({} of {} checks)",
                    summary.checks.iter().filter(|c| !c.passed).count(),
                    summary.checks.len()
                );
                Ok(1)
            }
        }
    }
}

/// Prints an evaluation table for the point-sample or cell-average operator.
fn eval_table(
    kind: OperatorKind,
    f: &FnArgs,
    scheme: &SchemeArgs,
    n_list: &[u32],
    x_list: &[f64],
) -> Result<u8> {
    let f = f.resolve()?;
    let scheme = parse_scheme::<f64>(&scheme.scheme, &scheme.beta)?;
    let eval = f.evaluator();
    let growth = f.p_class();
    println!("n,x,op_value,f_value,abs_error");
    for &n in n_list {
        let cfg = OperatorConfig::from_scheme(&scheme, n)?;
        for &x in x_list {
            let v = evaluate(kind, &*eval, &cfg, x, growth)?;
            let fx = eval(x);
            println!("{n},{x},{v},{fx},{:e}", (v - fx).abs());
        }
    }
    Ok(0)
}
