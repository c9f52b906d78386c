//! `mfc` — batch front-end for the sample-complexity workbench.
//!
//! Subcommands wire scenario configurations (JSON) to the bound calculus
//! and the Monte Carlo verification harness and emit machine-readable
//! reports. Exit codes: 0 on success/pass, 2 when a verification check
//! fails, 1 on configuration or usage errors.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use mfc_core::bounds::{self, OutputFormat, ScenarioConfig, WorkedExample};
use mfc_core::dict::Dictionary;
use mfc_core::ext::ExtReal;
use mfc_core::penalty::{GridSpec, PenaltySpec, Regime};
use mfc_core::verify::{self, LipschitzPath, TrialReport};
use mfc_core::{Error, Result};

const CSV_HELP: &str = "\
CSV columns:
  bounds reports:  scenario,n,eta,valid,threshold,x_max,failure_probability
  verify reports:  check,param,observed,bound,slack,valid,pass
                   (param is τ for concentration, t for tail, n otherwise)
  examples table:  name,h,C,L,c,beta_formula,beta_generic,is_upper_bound";

#[derive(Parser)]
#[command(
    name = "mfc",
    about = "Sample-complexity bounds for matrix factorizations, with Monte Carlo verification",
    after_long_help = CSV_HELP,
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// RNG seed; falls back to $MFC_SEED, then the config file's seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Report format.
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
    /// Worker threads for verification trials (default: available cores).
    /// Results are independent of this value.
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => OutputFormat::Json,
            FormatArg::Csv => OutputFormat::Csv,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Assemble the sample-complexity report (β and the η_n curve) for a
    /// scenario config.
    Bounds {
        #[arg(long)]
        config: PathBuf,
    },
    /// Print the worked closed-form β table for the given dimensions,
    /// cross-checked against the generic β pipeline.
    Examples(ExamplesArgs),
    /// Evaluate the penalty envelope ḡ(t), optionally against the grid
    /// oracle.
    Gbar {
        /// Penalty spec as inline JSON, e.g.
        /// '{"variant":"LpBallIndicator","p":2,"lambda":1.0,"d":4}'.
        #[arg(long)]
        penalty: String,
        #[arg(long)]
        t: f64,
        /// Regime-B constant; omit for regime A.
        #[arg(long)]
        kappa: Option<f64>,
        /// Also run the brute-force oracle at this grid resolution.
        #[arg(long)]
        oracle_grid: Option<usize>,
    },
    /// Monte Carlo verification checks; exit code 2 if a check fails.
    Verify {
        #[command(subcommand)]
        check: VerifyCmd,
    },
}

#[derive(Args)]
struct ExamplesArgs {
    /// Signal dimension m.
    #[arg(long)]
    m: usize,
    /// Number of atoms d.
    #[arg(long)]
    d: Option<usize>,
    /// Number of K-means centers.
    #[arg(long = "K")]
    big_k: Option<usize>,
    /// Coefficient sparsity k (k-sparse rows).
    #[arg(long)]
    k: Option<usize>,
    /// Lower-RIP constant δ (k-sparse rows).
    #[arg(long, default_value_t = 0.5)]
    delta: f64,
    /// Dictionary sparsity s (doubly sparse rows).
    #[arg(long)]
    s: Option<usize>,
    /// Penalty scale λ.
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    /// Sub-Gaussian tail scale A (sub-Gaussian rows).
    #[arg(long)]
    a: Option<f64>,
    /// Stiefel tensor factors as "m1xd1,m2xd2,…" (HOSVD row).
    #[arg(long)]
    factors: Option<String>,
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Lipschitz inequality over random dictionary pairs.
    Lipschitz {
        #[arg(long)]
        config: PathBuf,
        /// Training sample size.
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        pairs: usize,
        /// global: |ΔF| ≤ L‖ΔD‖; local: the κ-corrected bound for
        /// non-convex regime-B classes.
        #[arg(long, value_enum, default_value = "global")]
        path: PathArg,
        /// Draw pairs as ambient Gaussian perturbations instead of class
        /// members (norm-like penalties only).
        #[arg(long)]
        ambient: bool,
    },
    /// Concentration of F_X(D) at a fixed dictionary.
    Concentration {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 100)]
        n: usize,
        /// Comma-separated deviation levels τ.
        #[arg(long, default_value = "0.1,0.2,0.4", value_delimiter = ',')]
        taus: Vec<f64>,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
    },
    /// Uniform-deviation envelope over the scenario's n grid.
    Deviation {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 200)]
        ensemble: usize,
    },
    /// Sub-Gaussian norm-tail inequality.
    Tail {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated tail levels t ≥ 1.
        #[arg(long, default_value = "1,2,4", value_delimiter = ',')]
        ts: Vec<f64>,
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
    },
    /// Alternating minimization followed by the generalization-gap check.
    Minimizer {
        #[arg(long)]
        config: PathBuf,
        /// Training sample size.
        #[arg(long, default_value_t = 1000)]
        n: u64,
        #[arg(long, default_value_t = 50)]
        iters: usize,
        #[arg(long, default_value_t = 5)]
        restarts: usize,
        /// Random reference candidates for the gap check.
        #[arg(long, default_value_t = 20)]
        gap_ensemble: usize,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PathArg {
    Global,
    Local,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        // Trial results are reduced in fixed order, so the thread count
        // never changes reported numbers.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
    match run(&cli) {
        Ok(Outcome { report, pass }) => {
            let format = resolve_format(&cli, &report);
            let rendered = match render(&report, format) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(1);
                }
            };
            let destination = cli.out.clone().or_else(|| report.config_output());
            if let Err(e) = emit(&rendered, destination.as_deref()) {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

/// Everything a subcommand can produce.
enum Report {
    Bound(Box<bounds::BoundReport>, Option<PathBuf>, Option<OutputFormat>),
    Trial(Box<TrialReport>, Option<PathBuf>, Option<OutputFormat>),
    Examples(Vec<bounds::WorkedBetaRow>),
    Gbar(serde_json::Value),
    Minimizer(serde_json::Value, Box<TrialReport>, Option<PathBuf>, Option<OutputFormat>),
}

impl Report {
    fn config_output(&self) -> Option<PathBuf> {
        match self {
            Report::Bound(_, out, _) | Report::Trial(_, out, _) | Report::Minimizer(_, _, out, _) => {
                out.clone()
            }
            _ => None,
        }
    }

    fn config_format(&self) -> Option<OutputFormat> {
        match self {
            Report::Bound(_, _, f) | Report::Trial(_, _, f) | Report::Minimizer(_, _, _, f) => *f,
            _ => None,
        }
    }
}

struct Outcome {
    report: Report,
    pass: bool,
}

fn resolve_format(cli: &Cli, report: &Report) -> OutputFormat {
    cli.format
        .map(OutputFormat::from)
        .or_else(|| report.config_format())
        .unwrap_or(OutputFormat::Json)
}

fn render(report: &Report, format: OutputFormat) -> Result<String> {
    let out = match (report, format) {
        (Report::Bound(r, _, _), OutputFormat::Json) => serde_json::to_string_pretty(r)? + "\n",
        (Report::Bound(r, _, _), OutputFormat::Csv) => r.to_csv(),
        (Report::Trial(r, _, _), OutputFormat::Json) => serde_json::to_string_pretty(r)? + "\n",
        (Report::Trial(r, _, _), OutputFormat::Csv) => r.to_csv(),
        (Report::Examples(rows), OutputFormat::Json) => {
            serde_json::to_string_pretty(rows)? + "\n"
        }
        (Report::Examples(rows), OutputFormat::Csv) => {
            let mut s =
                String::from("name,h,C,L,c,beta_formula,beta_generic,is_upper_bound\n");
            for row in rows {
                s.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    row.name,
                    row.parts.h,
                    row.parts.c_cov,
                    row.parts.l,
                    row.parts.c_conc,
                    row.beta_formula,
                    row.beta_generic,
                    row.parts.is_upper_bound
                ));
            }
            s
        }
        (Report::Gbar(v), _) => serde_json::to_string_pretty(v)? + "\n",
        (Report::Minimizer(min, gap, _, _), OutputFormat::Json) => {
            serde_json::to_string_pretty(&serde_json::json!({
                "minimizer": min,
                "gap": gap,
            }))? + "\n"
        }
        (Report::Minimizer(_, gap, _, _), OutputFormat::Csv) => gap.to_csv(),
    };
    Ok(out)
}

fn emit(rendered: &str, out: Option<&std::path::Path>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, rendered)?,
        None => std::io::stdout().write_all(rendered.as_bytes())?,
    }
    Ok(())
}

fn load_config(path: &PathBuf, cli: &Cli) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        Error::Config(format!("cannot read config {}: {e}", path.display()))
    })?;
    let mut config: ScenarioConfig = serde_json::from_str(&text).map_err(|e| {
        // serde_json reports line/column positions for malformed configs.
        Error::Config(format!("{}: {e}", path.display()))
    })?;
    if let Some(seed) = cli.seed {
        config.seed = seed;
    } else if let Ok(env_seed) = std::env::var("MFC_SEED") {
        config.seed = env_seed
            .parse()
            .map_err(|_| Error::Config(format!("MFC_SEED is not a u64: {env_seed:?}")))?;
    }
    config.validated()
}

fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Bounds { config } => {
            let config = load_config(config, cli)?;
            let report = bounds::assemble(&config)?;
            Ok(Outcome {
                report: Report::Bound(Box::new(report), config.output.clone(), config.format),
                pass: true,
            })
        }
        Command::Examples(args) => {
            let rows = examples_table(args)?;
            Ok(Outcome {
                report: Report::Examples(rows),
                pass: true,
            })
        }
        Command::Gbar {
            penalty,
            t,
            kappa,
            oracle_grid,
        } => {
            let spec: PenaltySpec = serde_json::from_str(penalty)
                .map_err(|e| Error::Config(format!("penalty JSON: {e}")))?;
            let regime = match kappa {
                Some(k) => Regime::b(*k)?,
                None => Regime::A,
            };
            let value = spec.gbar(*t, regime)?;
            let oracle = oracle_grid
                .map(|g| mfc_core::penalty::gbar_oracle(&spec, *t, &GridSpec::new(g)))
                .transpose()?;
            Ok(Outcome {
                report: Report::Gbar(serde_json::json!({
                    "penalty": spec,
                    "t": t,
                    "regime": regime,
                    "gbar": value,
                    "oracle": oracle,
                })),
                pass: true,
            })
        }
        Command::Verify { check } => run_verify(check, cli),
    }
}

fn run_verify(check: &VerifyCmd, cli: &Cli) -> Result<Outcome> {
    match check {
        VerifyCmd::Lipschitz {
            config,
            n,
            pairs,
            path,
            ambient,
        } => {
            let config = load_config(config, cli)?;
            let path = match path {
                PathArg::Global => LipschitzPath::Global,
                PathArg::Local => LipschitzPath::Local,
            };
            let report = verify::check_lipschitz(&config, *n, *pairs, path, *ambient)?;
            Ok(trial_outcome(report, &config))
        }
        VerifyCmd::Concentration {
            config,
            n,
            taus,
            trials,
        } => {
            let config = load_config(config, cli)?;
            let report = verify::check_concentration(&config, None, *n, taus, *trials)?;
            Ok(trial_outcome(report, &config))
        }
        VerifyCmd::Deviation { config, ensemble } => {
            let config = load_config(config, cli)?;
            let report = verify::check_deviation(&config, *ensemble)?;
            Ok(trial_outcome(report, &config))
        }
        VerifyCmd::Tail { config, ts, trials } => {
            let config = load_config(config, cli)?;
            let report = verify::check_tail(&config.distribution, ts, *trials, config.seed)?;
            Ok(trial_outcome(report, &config))
        }
        VerifyCmd::Minimizer {
            config,
            n,
            iters,
            restarts,
            gap_ensemble,
        } => {
            let config = load_config(config, cli)?;
            let data = config.distribution.sample(
                *n as usize,
                &mut mfc_core::rng::stream(config.seed, mfc_core::rng::streams::DATA),
            );
            let outcome = verify::empirical_minimizer(
                &config.class,
                &config.penalty,
                &data,
                *iters,
                *restarts,
                config.seed,
            )?;
            let eta = eta_at(&config, *n)?;
            let inject: Vec<Dictionary> = Vec::new();
            let gap = verify::generalization_gap(
                &outcome.dictionary,
                &config,
                *n,
                eta,
                &inject,
                *gap_ensemble,
            )?;
            let pass = gap.pass;
            let min_json = serde_json::json!({
                "objective": outcome.objective,
                "non_monotone_steps": outcome.non_monotone_steps,
                "restarts": outcome.restarts,
                "iterations_run": outcome.iterations_run,
            });
            Ok(Outcome {
                report: Report::Minimizer(
                    min_json,
                    Box::new(gap),
                    config.output.clone(),
                    config.format,
                ),
                pass,
            })
        }
    }
}

fn trial_outcome(report: TrialReport, config: &ScenarioConfig) -> Outcome {
    let pass = report.pass;
    Outcome {
        report: Report::Trial(Box::new(report), config.output.clone(), config.format),
        pass,
    }
}

/// η_n for a single n, with the scenario's x and flavor.
fn eta_at(config: &ScenarioConfig, n: u64) -> Result<f64> {
    let mut single = config.clone();
    single.n_grid = vec![n];
    let report = bounds::assemble(&single)?;
    Ok(report.rows[0].eta)
}

fn examples_table(args: &ExamplesArgs) -> Result<Vec<bounds::WorkedBetaRow>> {
    let mut examples: Vec<WorkedExample> = Vec::new();
    let m = args.m;
    if let Some(d) = args.d {
        if d <= m {
            examples.push(WorkedExample::PcaBall { m, d });
            if let Some(a) = args.a {
                examples.push(WorkedExample::PcaSubGaussian { m, d, a });
            }
        }
        for p in [ExtReal::Finite(1.0), ExtReal::Finite(2.0), ExtReal::Inf] {
            examples.push(WorkedExample::SparseLpBall {
                m,
                d,
                p,
                lambda: args.lambda,
            });
        }
        if let Some(k) = args.k {
            examples.push(WorkedExample::SparseKSparse {
                m,
                d,
                k,
                delta: args.delta,
            });
        }
        examples.push(WorkedExample::SparseL1 {
            m,
            d,
            lambda: args.lambda,
        });
        examples.push(WorkedExample::SparseL1Squared {
            m,
            d,
            lambda: args.lambda,
        });
        if let Some(s) = args.s {
            examples.push(WorkedExample::DoublySparseL1Ball {
                m,
                d,
                s,
                lambda: args.lambda,
            });
            if let Some(k) = args.k {
                examples.push(WorkedExample::DoublySparseKSparse {
                    m,
                    d,
                    s,
                    k,
                    delta: args.delta,
                });
            }
        }
        examples.push(WorkedExample::Nmf { m, d });
        if let Some(a) = args.a {
            examples.push(WorkedExample::SubGaussianL1Squared {
                m,
                d,
                lambda: args.lambda,
                a,
            });
        }
    }
    if let Some(k) = args.big_k {
        examples.push(WorkedExample::KMeans { m, k });
    }
    if let Some(factors) = &args.factors {
        let parsed: Result<Vec<(usize, usize)>> = factors
            .split(',')
            .map(|part| {
                let (a, b) = part
                    .split_once('x')
                    .ok_or_else(|| Error::Config(format!("factor {part:?} is not MxD")))?;
                Ok((
                    a.trim()
                        .parse()
                        .map_err(|_| Error::Config(format!("bad factor dim {a:?}")))?,
                    b.trim()
                        .parse()
                        .map_err(|_| Error::Config(format!("bad factor dim {b:?}")))?,
                ))
            })
            .collect();
        examples.push(WorkedExample::Hosvd { factors: parsed? });
    }
    if examples.is_empty() {
        return Err(Error::Config(
            "no example rows selected; pass --d for dictionary rows or --K for K-means".into(),
        ));
    }
    examples.iter().map(|e| e.row()).collect()
}
