//! Command-line surface: enumeration, counts, bounds, inequality export,
//! KS tables, symmetry classes, simulation, threshold scans, and the
//! scaling report.
//!
//! Every run echoes its resolved configuration into the output (a `config`
//! object in JSON, a leading `#` comment in CSV) so results are
//! reproducible from the artifact alone. Exit codes: 0 success, 1
//! invariant/capability failure, 2 usage error.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use contextium::context::{classify_contexts, enumerate_contexts, enumerate_tables};
use contextium::inequality::{
    full_inequality, peres_mermin_inequality, table2_inequality, two_qubit_15_inequality,
    Inequality,
};
use contextium::report::{
    epsilon_limit_check, report_scaling, write_counts_csv, write_scaling_csv,
};
use contextium::sim::{
    locate_crossing, random_state, run_experiment, threshold_scan, FlipGrid, NoiseModel,
    StateKind,
};
use contextium::solver::{
    solve_branch_and_bound, solve_exact, solve_local_search, LocalSearchConfig,
};
use contextium::Error;

#[derive(Parser)]
#[command(name = "contextium", version, about = "State-independent contextuality \
inequalities over n-qubit Pauli observables", max_term_width = 100)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum OutputFormat {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum InequalityName {
    /// Six-context Peres-Mermin inequality (bound 4).
    Pm,
    /// Single-negative-column variant of the Peres-Mermin square (bound 4).
    Table2,
    /// All 15 two-qubit contexts (bound 9).
    #[value(name = "two-qubit-15")]
    #[serde(rename = "two-qubit-15")]
    TwoQubit15,
    /// Every context on n qubits (bound 2S - N).
    Full,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum SolveMethodArg {
    Exact,
    Bnb,
    Local,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum StateArg {
    Pure,
    Mixed,
    Basis,
}

impl From<StateArg> for StateKind {
    fn from(arg: StateArg) -> StateKind {
        match arg {
            StateArg::Pure => StateKind::Pure,
            StateArg::Mixed => StateKind::Mixed,
            StateArg::Basis => StateKind::Basis,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate all contexts on n qubits.
    Enumerate {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
        format: OutputFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Context count table for n = 2..=n_max.
    Counts {
        #[arg(long)]
        n_max: usize,
        /// Cross-check closed forms against enumeration up to this n.
        #[arg(long, default_value_t = 5)]
        verify_up_to: usize,
        #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
        format: OutputFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Noncontextual bound of an inequality.
    Bound {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = InequalityName::Full)]
        name: InequalityName,
        #[arg(long, value_enum)]
        method: SolveMethodArg,
        #[arg(long, default_value_t = 100)]
        restarts: u32,
        /// 0 means the default of 20 flips per term.
        #[arg(long, default_value_t = 0)]
        max_flips: u32,
        #[arg(long, default_value_t = 0.3)]
        noise: f64,
        #[arg(long, default_value_t = 100_000_000)]
        node_budget: u64,
        #[arg(long, env = "CONTEXTIUM_SEED", default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Export an inequality as JSON.
    Inequality {
        #[arg(long, value_enum)]
        name: InequalityName,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The ten 3x3 KS tables at n=2.
    Tables {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Symmetry classes of the n=3 contexts.
    Classify {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate sequential measurement of an inequality with readout noise.
    Simulate {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = InequalityName::Full)]
        name: InequalityName,
        #[arg(long, value_enum, default_value_t = StateArg::Pure)]
        state: StateArg,
        #[arg(long, default_value_t = 10_000)]
        shots: u64,
        #[arg(long, default_value_t = 0.0)]
        flip_p: f64,
        /// Aggregate compatibility correction added to the bound.
        #[arg(long, default_value_t = 0.0)]
        bound_shift: f64,
        #[arg(long, env = "CONTEXTIUM_SEED", default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Scan chi across a flip-probability grid and locate the threshold.
    Scan {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = InequalityName::Full)]
        name: InequalityName,
        /// Grid start:end:step over flip probabilities.
        #[arg(long)]
        flip_p_grid: FlipGrid,
        #[arg(long, value_enum, default_value_t = StateArg::Pure)]
        state: StateArg,
        #[arg(long, default_value_t = 10_000)]
        shots: u64,
        #[arg(long, env = "CONTEXTIUM_SEED", default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Scaling report (n, epsilon, D) for n = 2..=n_max.
    Report {
        #[arg(long)]
        n_max: usize,
        #[arg(long, default_value_t = 5)]
        verify_up_to: usize,
        /// Also check epsilon/D monotonicity and fail if violated.
        #[arg(long)]
        limit_check: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}

fn write_output(out: Option<&PathBuf>, content: &str) -> Result<(), Error> {
    match out {
        Some(path) => fs::write(path, content)?,
        None => print!("{content}"),
    }
    Ok(())
}

fn json_with_config<T: Serialize, C: Serialize>(config: &C, payload: &T) -> Result<String, Error> {
    let value = serde_json::json!({
        "config": config,
        "result": payload,
    });
    Ok(format!("{}\n", serde_json::to_string_pretty(&value)?))
}

fn csv_config_comment<C: Serialize>(config: &C) -> Result<String, Error> {
    Ok(format!("# config: {}\n", serde_json::to_string(config)?))
}

fn build_inequality(name: InequalityName, n: usize) -> Result<Inequality, Error> {
    match name {
        InequalityName::Full => full_inequality(n),
        InequalityName::Pm | InequalityName::Table2 | InequalityName::TwoQubit15 => {
            if n != 2 {
                return Err(Error::Capability {
                    operation: "named two-qubit inequality",
                    n,
                    min: 2,
                    max: 2,
                });
            }
            Ok(match name {
                InequalityName::Pm => peres_mermin_inequality(),
                InequalityName::Table2 => table2_inequality(),
                _ => two_qubit_15_inequality(),
            })
        }
    }
}

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::Enumerate { n, format, out } => {
            let contexts = enumerate_contexts(n)?;
            #[derive(Serialize)]
            struct Config {
                subcommand: &'static str,
                n: usize,
                format: OutputFormat,
            }
            let config = Config {
                subcommand: "enumerate",
                n,
                format,
            };
            let content = match format {
                OutputFormat::Json => json_with_config(&config, &contexts)?,
                OutputFormat::Csv => {
                    let mut text = csv_config_comment(&config)?;
                    text.push_str("member1,member2,member3,sign\n");
                    for ctx in &contexts {
                        let m = ctx.members();
                        writeln!(text, "{},{},{},{}", m[0], m[1], m[2], ctx.sign())
                            .expect("string write");
                    }
                    text
                }
            };
            write_output(out.as_ref(), &content)
        }
        Command::Counts {
            n_max,
            verify_up_to,
            format,
            out,
        } => {
            let rows = report_scaling(n_max, verify_up_to.min(n_max))?;
            #[derive(Serialize)]
            struct Config {
                subcommand: &'static str,
                n_max: usize,
                verify_up_to: usize,
            }
            let config = Config {
                subcommand: "counts",
                n_max,
                verify_up_to,
            };
            let content = match format {
                OutputFormat::Json => json_with_config(&config, &rows)?,
                OutputFormat::Csv => {
                    let mut buffer = Vec::new();
                    write_counts_csv(&rows, &mut buffer)?;
                    format!(
                        "{}{}",
                        csv_config_comment(&config)?,
                        String::from_utf8(buffer).expect("csv is utf-8")
                    )
                }
            };
            write_output(out.as_ref(), &content)
        }
        Command::Bound {
            n,
            name,
            method,
            restarts,
            max_flips,
            noise,
            node_budget,
            seed,
            out,
        } => {
            let ineq = build_inequality(name, n)?;
            let report = match method {
                SolveMethodArg::Exact => solve_exact(&ineq)?,
                SolveMethodArg::Bnb => solve_branch_and_bound(&ineq, node_budget)?,
                SolveMethodArg::Local => {
                    let mut config = LocalSearchConfig::new(restarts, max_flips, seed);
                    config.noise = noise;
                    solve_local_search(&ineq, config)?
                }
            };
            if report.exceeds_counting_ceiling {
                eprintln!(
                    "WARNING: found an assignment satisfying {} predictions, above the \
                     claimed ceiling S({}) = {}; the counting bound 2S - N is not the \
                     true noncontextual maximum for this inequality",
                    report.s,
                    ineq.n,
                    report.counting_ceiling.unwrap_or_default(),
                );
            }
            #[derive(Serialize)]
            struct Config {
                subcommand: &'static str,
                n: usize,
                name: InequalityName,
                method: SolveMethodArg,
                restarts: u32,
                max_flips: u32,
                noise: f64,
                node_budget: u64,
                seed: u64,
            }
            let config = Config {
                subcommand: "bound",
                n,
                name,
                method,
                restarts,
                max_flips,
                noise,
                node_budget,
                seed,
            };
            write_output(out.as_ref(), &json_with_config(&config, &report)?)
        }
        Command::Inequality { name, n, out } => {
            let ineq = build_inequality(name, n)?;
            #[derive(Serialize)]
            struct Config {
                subcommand: &'static str,
                name: InequalityName,
                n: usize,
            }
            let config = Config {
                subcommand: "inequality",
                name,
                n,
            };
            write_output(out.as_ref(), &json_with_config(&config, &ineq)?)
        }
        Command::Tables { out } => {
            let tables = enumerate_tables()?;
            #[derive(Serialize)]
            struct Config {
                subcommand: &'static str,
                n: usize,
            }
            let config = Config {
                subcommand: "tables",
                n: 2,
            };
            write_output(out.as_ref(), &json_with_config(&config, &tables)?)
        }
        Command::Classify { n, out } => {
            let classes = classify_contexts(n)?;
            #[derive(Serialize)]
            struct Config {
                subcommand: &'static str,
                n: usize,
            }
            let config = Config {
                subcommand: "classify",
                n,
            };
            write_output(out.as_ref(), &json_with_config(&config, &classes)?)
        }
        Command::Simulate {
            n,
            name,
            state,
            shots,
            flip_p,
            bound_shift,
            seed,
            out,
        } => {
            let ineq = build_inequality(name, n)?;
            let quantum_state = random_state(n, state.into(), seed)?;
            let noise = NoiseModel::new(flip_p)?;
            let result = run_experiment(&quantum_state, &ineq, noise, shots, seed, bound_shift)?;
            #[derive(Serialize)]
            struct Config {
                subcommand: &'static str,
                n: usize,
                name: InequalityName,
                state: StateArg,
                shots: u64,
                flip_p: f64,
                bound_shift: f64,
                seed: u64,
            }
            let config = Config {
                subcommand: "simulate",
                n,
                name,
                state,
                shots,
                flip_p,
                bound_shift,
                seed,
            };
            write_output(out.as_ref(), &json_with_config(&config, &result)?)
        }
        Command::Scan {
            n,
            name,
            flip_p_grid,
            state,
            shots,
            seed,
            out,
        } => {
            let ineq = build_inequality(name, n)?;
            let quantum_state = random_state(n, state.into(), seed)?;
            let rows = threshold_scan(&quantum_state, &ineq, &flip_p_grid.values(), shots, seed)?;
            #[derive(Serialize)]
            struct Config {
                subcommand: &'static str,
                n: usize,
                name: InequalityName,
                flip_p_grid: FlipGrid,
                state: StateArg,
                shots: u64,
                seed: u64,
                bound: i64,
            }
            let config = Config {
                subcommand: "scan",
                n,
                name,
                flip_p_grid,
                state,
                shots,
                seed,
                bound: ineq.bound,
            };
            let mut text = csv_config_comment(&config)?;
            text.push_str("eps_corr,chi_mean,chi_stderr,violated\n");
            for row in &rows {
                writeln!(
                    text,
                    "{:.6},{:.6},{:.6},{}",
                    row.eps_corr, row.chi, row.chi_stderr, row.violated
                )
                .expect("string write");
            }
            if let Some(crossing) = locate_crossing(&rows, ineq.bound as f64) {
                writeln!(text, "# chi = bound crossing at eps_corr = {crossing:.4}")
                    .expect("string write");
            }
            write_output(out.as_ref(), &text)
        }
        Command::Report {
            n_max,
            verify_up_to,
            limit_check,
            out,
        } => {
            let rows = report_scaling(n_max, verify_up_to.min(n_max))?;
            #[derive(Serialize)]
            struct Config {
                subcommand: &'static str,
                n_max: usize,
                verify_up_to: usize,
                limit_check: bool,
            }
            let config = Config {
                subcommand: "report",
                n_max,
                verify_up_to,
                limit_check,
            };
            let mut buffer = Vec::new();
            write_scaling_csv(&rows, &mut buffer)?;
            let content = format!(
                "{}{}",
                csv_config_comment(&config)?,
                String::from_utf8(buffer).expect("csv is utf-8")
            );
            write_output(out.as_ref(), &content)?;
            if limit_check {
                let check = epsilon_limit_check(n_max)?;
                if !check.ok() {
                    return Err(Error::Invariant(format!(
                        "monotonicity check failed: {}",
                        serde_json::to_string(&check)?
                    )));
                }
                eprintln!(
                    "limit check ok: epsilon strictly increasing, D ratios all > 1, \
                     negative fraction below 1/2 for n = 2..={n_max}"
                );
            }
            Ok(())
        }
    }
}
