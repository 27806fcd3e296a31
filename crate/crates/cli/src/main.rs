use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use altseq::asymptotics::{
    count_saddles, k_limit, limit_pv_integral, trace_descent, Branch, DescentOptions, LimitQuery, PhaseParams,
};
use altseq::contour::{batch_to_csv, parse_batch_csv, run_batch, BatchQuery, ContourParams, ContourShape};
use altseq::exactgf::{build_b_series, dist_table, exact_row, DistCache, DistTable, CACHE_ENV_VAR};
use altseq::perms::sample_summary;
use altseq::verify::{
    convergence_table, render_report, ConvergenceRow, Verifier, VerifyConfig, CONVERGENCE_N, CONVERGENCE_T,
    DEFAULT_SEED, EXACT_LIMIT_N,
};
use altseq::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Longest alternating subsequences of random permutations: exact tables,
/// Monte Carlo, contour integrals and the Gaussian limit.
#[derive(Debug, Parser)]
#[command(name = "altseq", version)]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalOpts {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    format: Format,
    /// Write the result here (atomically) instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Directory for cached exact rows.
    #[arg(long, env = CACHE_ENV_VAR, global = true)]
    cache_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact distribution row P(as_n <= k), k = 0..n, from the generating function.
    Exact {
        n: usize,
        /// x-truncation N of the series (default: n).
        #[arg(long = "max-degree", short = 'N')]
        max_degree: Option<usize>,
        /// y-truncation D of the series (default: N).
        #[arg(long = "y-degree", short = 'D')]
        y_degree: Option<usize>,
    },
    /// Monte Carlo histogram of as_n over m seeded permutations.
    Sample { n: usize, m: u64, seed: u64 },
    /// P(as_n <= k) by numerical contour integration.
    Contour {
        /// Permutation length (omit with --batch).
        #[arg(required_unless_present = "batch")]
        n: Option<usize>,
        #[arg(long, conflicts_with = "t")]
        k: Option<usize>,
        /// Fluctuation: k = floor(2n/3 + t sqrt n), clamped to [0, n].
        #[arg(long, allow_hyphen_values = true)]
        t: Option<f64>,
        /// CSV with columns n and k or t.
        #[arg(long, conflicts_with_all = ["n", "k", "t"])]
        batch: Option<PathBuf>,
        #[command(flatten)]
        contour: ContourOpts,
    },
    /// Zeros of sigma' in the region |Re u| <= R, |Im u| <= pi - delta.
    Saddle {
        #[arg(long, default_value_t = 2.0 / 3.0)]
        alpha: f64,
        #[arg(long, default_value_t = 5.0)]
        half_width: f64,
        #[arg(long, default_value_t = 0.2)]
        delta: f64,
    },
    /// Steepest-descent curve from the saddle at 0 (alpha = 2/3).
    Descent {
        #[arg(long, value_enum, default_value_t = BranchArg::Upper)]
        branch: BranchArg,
        /// Starting radius on the ray arg u = +-pi/4.
        #[arg(long, default_value_t = 1e-2)]
        r0: f64,
        #[arg(long, default_value_t = 200_000)]
        max_steps: usize,
    },
    /// Limit K(t) and its principal-value integral form.
    Limit {
        #[arg(required = true, allow_hyphen_values = true)]
        t: Vec<f64>,
    },
    /// Table of |p_n(floor(2n/3 + t sqrt n)) - K(t)|.
    Converge {
        /// Values of n (exact for n <= 64, contour beyond).
        #[arg(long, value_delimiter = ',', default_values_t = CONVERGENCE_N)]
        n: Vec<usize>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = CONVERGENCE_T)]
        t: Vec<f64>,
        #[command(flatten)]
        contour: ContourOpts,
    },
    /// Run the acceptance suite; exit 3 if any criterion fails.
    Verify {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Monte Carlo trials for the moment check.
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BranchArg {
    Upper,
    Lower,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ShapeArg {
    Adaptive,
    Vertical,
    Hyperbolic,
}

#[derive(Debug, Args)]
struct ContourOpts {
    /// Contour crossing of the real axis.
    #[arg(long, short = 'a', default_value_t = 1.0)]
    a: f64,
    #[arg(long, value_enum, default_value_t = ShapeArg::Adaptive)]
    shape: ShapeArg,
    /// Initial quadrature nodes M (doubled until converged).
    #[arg(long, short = 'M', default_value_t = 64)]
    nodes: usize,
    /// Initial j-sum truncation J (doubled until the tail is certified).
    #[arg(long, short = 'J', default_value_t = 4)]
    truncation: usize,
    #[arg(long, default_value_t = 1e-11)]
    tol: f64,
}

impl ContourOpts {
    fn params(&self) -> altseq::Result<ContourParams> {
        let shape = match self.shape {
            ShapeArg::Adaptive => ContourShape::Adaptive,
            ShapeArg::Vertical => ContourShape::Vertical,
            ShapeArg::Hyperbolic => ContourShape::Hyperbolic,
        };
        let p = ContourParams { a: self.a, shape, nodes: self.nodes, truncation: self.truncation, tol: self.tol };
        p.validate()?;
        Ok(p)
    }
}

/// What a command produced: the artifact and whether it counts as success.
struct Output {
    text: String,
    exit: u8,
}

impl Output {
    fn ok(text: String) -> Self {
        Self { text, exit: 0 }
    }
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

fn exact_table(n: usize, n_max: Option<usize>, d_max: Option<usize>, cache: Option<&Path>) -> altseq::Result<DistTable> {
    if n_max.is_some() || d_max.is_some() {
        let nn = n_max.unwrap_or(n);
        let dd = d_max.unwrap_or(nn);
        if nn < n {
            return Err(Error::OutOfTruncation { n, k: n as i64, need_n: n, need_d: n });
        }
        return dist_table(&build_b_series(nn, dd)?, n);
    }
    match cache {
        Some(dir) => DistCache::new(dir).get_or_compute(n, || exact_row(n)),
        None => exact_row(n),
    }
}

fn convergence_csv(rows: &[ConvergenceRow]) -> String {
    let mut out = String::from("n,t,k,p,K,error,source\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{:.12e},{:.12e},{:.6e},{}\n",
            r.n, r.t, r.k, r.p, r.k_limit, r.error, r.source
        ));
    }
    out
}

fn json(v: &impl serde::Serialize) -> altseq::Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn run(cli: &Cli) -> altseq::Result<Output> {
    let fmt = cli.global.format;
    let text = match &cli.command {
        Command::Exact { n, max_degree, y_degree } => {
            let table = exact_table(*n, *max_degree, *y_degree, cli.global.cache_dir.as_deref())?;
            match fmt {
                Format::Csv => table.to_csv(),
                Format::Json => table.to_json()? + "\n",
            }
        }
        Command::Sample { n, m, seed } => {
            let s = sample_summary(*n, *m, *seed)?;
            match fmt {
                Format::Json => s.to_json()? + "\n",
                Format::Csv => {
                    let mut out = String::from("k,count\n");
                    for (k, c) in &s.histogram {
                        out.push_str(&format!("{k},{c}\n"));
                    }
                    out
                }
            }
        }
        Command::Contour { n, k, t, batch, contour } => {
            let params = contour.params()?;
            let queries = match (batch, n) {
                (Some(path), _) => parse_batch_csv(&std::fs::read_to_string(path)?)?,
                (None, Some(n)) => vec![match (k, t) {
                    (Some(k), None) => BatchQuery::K { n: *n, k: *k },
                    (None, Some(t)) => BatchQuery::T { n: *n, t: *t },
                    _ => return Err(invalid("contour needs exactly one of --k, --t")),
                }],
                (None, None) => return Err(invalid("contour needs n or --batch")),
            };
            let rows = run_batch(&queries, &params)?;
            match fmt {
                Format::Csv => batch_to_csv(&rows),
                Format::Json => {
                    let v: Vec<_> = rows
                        .iter()
                        .map(|r| serde_json::json!({"n": r.n, "k": r.k, "result": r.result}))
                        .collect();
                    json(&v)?
                }
            }
        }
        Command::Saddle { alpha, half_width, delta } => {
            let report = count_saddles(&PhaseParams { alpha: *alpha, half_width: *half_width, delta: *delta })?;
            report.to_json()? + "\n"
        }
        Command::Descent { branch, r0, max_steps } => {
            let b = match branch {
                BranchArg::Upper => Branch::Upper,
                BranchArg::Lower => Branch::Lower,
            };
            let opts = DescentOptions { r0: *r0, max_steps: *max_steps, ..Default::default() };
            let path = trace_descent(b, &opts)?;
            match fmt {
                Format::Csv => path.to_csv()?,
                Format::Json => path.to_json()? + "\n",
            }
        }
        Command::Limit { t } => {
            let mut rows = Vec::with_capacity(t.len());
            for &t in t {
                let q = LimitQuery::new(t)?;
                rows.push((t, k_limit(q), limit_pv_integral(q)?));
            }
            match fmt {
                Format::Csv => {
                    let mut out = String::from("t,K,pv\n");
                    for (t, k, pv) in rows {
                        out.push_str(&format!("{t},{k:.16e},{pv:.16e}\n"));
                    }
                    out
                }
                Format::Json => json(
                    &rows
                        .iter()
                        .map(|(t, k, pv)| serde_json::json!({"t": t, "K": k, "pv": pv}))
                        .collect::<Vec<_>>(),
                )?,
            }
        }
        Command::Converge { n, t, contour } => {
            let params = contour.params()?;
            if n.is_empty() || t.is_empty() {
                return Err(invalid("converge needs at least one n and one t"));
            }
            if let Some(&bad) = n.iter().find(|&&v| v == 0) {
                return Err(invalid(format!("n must be >= 1, got {bad}")));
            }
            let small = n.iter().copied().filter(|&v| v <= EXACT_LIMIT_N).max();
            let series = small.map(|m| build_b_series(m, m)).transpose()?;
            let rows = convergence_table(n, t, &params, series.as_ref())?;
            match fmt {
                Format::Csv => convergence_csv(&rows),
                Format::Json => json(&rows)?,
            }
        }
        Command::Verify { seed, trials } => {
            let outcomes = Verifier::new(VerifyConfig { seed: *seed, mc_trials: *trials }).run_all();
            let exit = if outcomes.iter().all(|o| o.passed) { 0 } else { 3 };
            let text = match fmt {
                Format::Csv => render_report(&outcomes),
                Format::Json => json(&outcomes)?,
            };
            return Ok(Output { text, exit });
        }
    };
    Ok(Output::ok(text))
}

/// Write via a sibling temporary file and rename, so a failed run never
/// leaves a partial artifact behind.
fn emit(text: &str, path: Option<&Path>) -> std::io::Result<()> {
    match path {
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()
        }
        Some(path) => {
            let dir = match path.parent() {
                Some(p) if !p.as_os_str().is_empty() => p,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
            tmp.write_all(text.as_bytes())?;
            tmp.as_file().sync_all()?;
            tmp.persist(path).map_err(|e| e.error)?;
            Ok(())
        }
    }
}

fn error_record(kind: &str, message: &str, exit: u8) -> ExitCode {
    let rec = serde_json::json!({"error": kind, "message": message, "exit_code": exit});
    eprintln!("{rec}");
    ExitCode::from(exit)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            return error_record("usage", e.to_string().trim_end(), 1);
        }
    };
    match run(&cli) {
        Ok(out) => match emit(&out.text, cli.global.output.as_deref()) {
            Ok(()) => ExitCode::from(out.exit),
            Err(e) => error_record("io", &e.to_string(), 2),
        },
        Err(e) => {
            let code = if e.is_validation() { 1 } else { 2 };
            error_record(e.kind(), &e.to_string(), code)
        }
    }
}
