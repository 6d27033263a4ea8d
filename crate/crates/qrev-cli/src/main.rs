//! `qrev`: analyze complete quantum measurement sets.
//!
//! Subcommands load a measurement set (JSON file or built-in example), report
//! information gain / reversibility / trade-off slack, scan random ensembles,
//! cross-check the Schur twirl, simulate measure-then-reverse experiments,
//! and verify unitary dilations.
//!
//! Conventions: outcome indices are 0-based; all randomness derives from
//! `--seed`, so outputs are byte-identical on re-run. Exit codes: 0 success,
//! 2 input or configuration error, 3 internal theorem-violation alarm (the
//! trade-off bound is a theorem, so a violation signals a software defect).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use qrev::dilation::{dilate, information_report};
use qrev::infogain::{
    estimation_fidelity_mc, twirl_exact, twirl_mc, twirl_reconstruction,
    GuessStrategy,
};
use qrev::json::MeasurementSetDoc;
use qrev::measurement::{example_von_neumann, example_weak_eta, MeasurementSet};
use qrev::qlin::{frobenius_distance, ginibre, identity, random_pure_state, RandomSource};
use qrev::reversal::{reversibility, simulate_measure_and_reverse_with_threshold};
use qrev::swap_operator;
use qrev::tradeoff::{aggregate, ensemble_scan, is_saturating, tradeoff_report};

const EXIT_CONFIG: u8 = 2;
const EXIT_ALARM: u8 = 3;

#[derive(Parser)]
#[command(name = "qrev", version, about = "Information gain and reversibility of weak quantum measurements")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Report information gain, reversibility, and trade-off slack of a set.
    Analyze {
        /// Measurement-set JSON file.
        #[arg(long = "in", value_name = "PATH")]
        input: Option<PathBuf>,
        /// Built-in example: `von-neumann:D` or `weak-eta:VALUE`.
        #[arg(long, value_name = "NAME")]
        example: Option<String>,
        #[arg(long = "out", value_name = "PATH")]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Completeness validation tolerance.
        #[arg(long, default_value_t = qrev::measurement::COMPLETENESS_TOL)]
        tol_completeness: f64,
    },
    /// Sweep the weak-measurement strength over a uniform grid in [0, 1].
    /// CSV columns: eta, info_gain, reversibility, lhs, slack, mc_info_gain,
    /// mc_std_error.
    SweepEta {
        /// Number of grid points (>= 2).
        #[arg(long)]
        steps: usize,
        /// Monte Carlo samples per grid point for the fidelity column.
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long = "out", value_name = "PATH")]
        output: Option<PathBuf>,
    },
    /// Verify the trade-off bound on Haar-random measurement ensembles.
    RandomScan {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        outcomes: usize,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long = "out", value_name = "PATH")]
        output: Option<PathBuf>,
    },
    /// Cross-check the Haar two-copy twirl against its closed form.
    SchurCheck {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long = "out", value_name = "PATH")]
        output: Option<PathBuf>,
    },
    /// Run the stochastic measure-then-reverse experiment on a seeded
    /// Haar-random input state.
    SimulateReverse {
        #[arg(long = "in", value_name = "PATH")]
        input: Option<PathBuf>,
        #[arg(long, value_name = "NAME")]
        example: Option<String>,
        #[arg(long)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = qrev::measurement::COMPLETENESS_TOL)]
        tol_completeness: f64,
        /// Smallest singular value still treated as reversible.
        #[arg(long, default_value_t = qrev::reversal::REVERSIBLE_THRESHOLD)]
        tol_reversible: f64,
        #[arg(long = "out", value_name = "PATH")]
        output: Option<PathBuf>,
    },
    /// Dilate a set to a system-ancilla unitary and verify consistency.
    DilateCheck {
        #[arg(long = "in", value_name = "PATH")]
        input: Option<PathBuf>,
        #[arg(long, value_name = "NAME")]
        example: Option<String>,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = qrev::measurement::COMPLETENESS_TOL)]
        tol_completeness: f64,
        #[arg(long = "out", value_name = "PATH")]
        output: Option<PathBuf>,
    },
}

struct AppError {
    code: u8,
    message: String,
}

impl AppError {
    fn config(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_CONFIG,
            message: message.into(),
        }
    }

    fn alarm(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_ALARM,
            message: message.into(),
        }
    }
}

impl From<qrev::Error> for AppError {
    fn from(e: qrev::Error) -> Self {
        AppError::config(e.to_string())
    }
}

impl From<std::io::Error> for AppError {
    fn from(e: std::io::Error) -> Self {
        AppError::config(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), AppError> {
    match output {
        Some(path) => fs::write(path, text)?,
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

fn load_set(
    input: Option<&Path>,
    example: Option<&str>,
    tol_completeness: f64,
) -> Result<MeasurementSet, AppError> {
    match (input, example) {
        (Some(path), None) => {
            let text = fs::read_to_string(path)?;
            let doc: MeasurementSetDoc = serde_json::from_str(&text)
                .map_err(|e| AppError::config(format!("malformed JSON in {}: {e}", path.display())))?;
            Ok(doc.into_set_with_tolerance(tol_completeness)?)
        }
        (None, Some(name)) => parse_example(name),
        (None, None) => Err(AppError::config("provide --in PATH or --example NAME")),
        (Some(_), Some(_)) => Err(AppError::config("--in and --example are mutually exclusive")),
    }
}

fn parse_example(name: &str) -> Result<MeasurementSet, AppError> {
    if let Some(dim) = name.strip_prefix("von-neumann:") {
        let d: usize = dim
            .parse()
            .map_err(|_| AppError::config(format!("bad dimension in example `{name}`")))?;
        return Ok(example_von_neumann(d)?);
    }
    if let Some(eta) = name.strip_prefix("weak-eta:") {
        let eta: f64 = eta
            .parse()
            .map_err(|_| AppError::config(format!("bad eta in example `{name}`")))?;
        return Ok(example_weak_eta(eta)?);
    }
    Err(AppError::config(format!(
        "unknown example `{name}`; use von-neumann:D or weak-eta:VALUE"
    )))
}

#[derive(Serialize)]
struct OutcomeInfo {
    index: usize,
    singular_values: Vec<f64>,
    reversible: bool,
}

#[derive(Serialize)]
struct AnalyzeOutput {
    dimension: usize,
    n_outcomes: usize,
    info_gain: f64,
    reversibility: f64,
    lhs: f64,
    slack: f64,
    saturated: bool,
    structurally_saturating: bool,
    outcomes: Vec<OutcomeInfo>,
}

fn run(command: Command) -> Result<(), AppError> {
    match command {
        Command::Analyze {
            input,
            example,
            output,
            format,
            tol_completeness,
        } => {
            let set = load_set(input.as_deref(), example.as_deref(), tol_completeness)?;
            let report = tradeoff_report(&set);
            if report.slack < -1e-9 {
                return Err(AppError::alarm(format!(
                    "trade-off bound violated (slack {:.3e}); this indicates a software defect",
                    report.slack
                )));
            }
            let outcomes = set
                .operators()
                .iter()
                .enumerate()
                .map(|(index, op)| OutcomeInfo {
                    index,
                    singular_values: op.svd().singular_values.clone(),
                    reversible: op.lambda_min() > qrev::reversal::REVERSIBLE_THRESHOLD,
                })
                .collect();
            let out = AnalyzeOutput {
                dimension: report.dimension,
                n_outcomes: report.n_outcomes,
                info_gain: report.info_gain,
                reversibility: report.reversibility,
                lhs: report.lhs,
                slack: report.slack,
                saturated: report.saturated,
                structurally_saturating: is_saturating(&set, 1e-9),
                outcomes,
            };
            let text = match format {
                Format::Json => serde_json::to_string_pretty(&out).unwrap() + "\n",
                Format::Csv => {
                    let mut s = String::from(
                        "dimension,n_outcomes,info_gain,reversibility,lhs,slack,saturated\n",
                    );
                    s.push_str(&format!(
                        "{},{},{:.17e},{:.17e},{:.17e},{:.17e},{}\n",
                        out.dimension,
                        out.n_outcomes,
                        out.info_gain,
                        out.reversibility,
                        out.lhs,
                        out.slack,
                        out.saturated
                    ));
                    s
                }
            };
            emit(output.as_deref(), &text)
        }

        Command::SweepEta {
            steps,
            samples,
            seed,
            output,
        } => {
            if steps < 2 {
                return Err(AppError::config("--steps must be >= 2"));
            }
            if samples < 100 {
                return Err(AppError::config("--samples must be >= 100"));
            }
            let mut text =
                String::from("eta,info_gain,reversibility,lhs,slack,mc_info_gain,mc_std_error\n");
            for k in 0..steps {
                let eta = k as f64 / (steps - 1) as f64;
                let set = example_weak_eta(eta)?;
                let report = tradeoff_report(&set);
                let rng = RandomSource::with_stream(seed, k as u64);
                let est =
                    estimation_fidelity_mc(&set, &GuessStrategy::optimal(&set), samples, &rng)?;
                text.push_str(&format!(
                    "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}\n",
                    eta,
                    report.info_gain,
                    report.reversibility,
                    report.lhs,
                    report.slack,
                    est.mean,
                    est.std_error
                ));
            }
            emit(output.as_deref(), &text)
        }

        Command::RandomScan {
            dim,
            outcomes,
            count,
            seed,
            format,
            output,
        } => {
            if count == 0 {
                return Err(AppError::config("--count must be >= 1"));
            }
            if dim == 0 || outcomes == 0 {
                return Err(AppError::config("--dim and --outcomes must be >= 1"));
            }
            let rng = RandomSource::new(seed);
            let reports = ensemble_scan(dim, outcomes, count, &rng)?;
            let agg = aggregate(&reports);
            let text = match format {
                Format::Json => {
                    #[derive(Serialize)]
                    struct ScanOutput<'a> {
                        reports: &'a [qrev::TradeoffReport],
                        aggregate: &'a qrev::ScanAggregate,
                    }
                    serde_json::to_string_pretty(&ScanOutput {
                        reports: &reports,
                        aggregate: &agg,
                    })
                    .unwrap()
                        + "\n"
                }
                Format::Csv => {
                    let mut s = String::from(
                        "dimension,n_outcomes,info_gain,reversibility,lhs,slack,saturated\n",
                    );
                    for r in &reports {
                        s.push_str(&format!(
                            "{},{},{:.17e},{:.17e},{:.17e},{:.17e},{}\n",
                            r.dimension, r.n_outcomes, r.info_gain, r.reversibility, r.lhs,
                            r.slack, r.saturated
                        ));
                    }
                    s
                }
            };
            emit(output.as_deref(), &text)?;
            let qubit_ok = agg
                .max_abs_residual_d2
                .map(|res| res < 1e-9)
                .unwrap_or(true);
            if agg.min_slack <= -1e-9 || !qubit_ok {
                return Err(AppError::alarm(format!(
                    "trade-off bound violated over the scan (min slack {:.3e})",
                    agg.min_slack
                )));
            }
            Ok(())
        }

        Command::SchurCheck {
            dim,
            samples,
            seed,
            output,
        } => {
            if dim == 0 {
                return Err(AppError::config("--dim must be >= 1"));
            }
            if samples < 100 {
                return Err(AppError::config("--samples must be >= 100"));
            }
            let rng = RandomSource::new(seed);
            let id = identity(dim * dim);
            let identity_distance = frobenius_distance(&twirl_mc(&id, dim, samples, &rng)?, &id);
            let s = swap_operator(dim);
            let swap_distance = frobenius_distance(&twirl_mc(&s, dim, samples, &rng)?, &s);

            let mut gen = RandomSource::with_stream(seed, 1);
            let g = ginibre(dim * dim, dim * dim, &mut gen);
            let herm = (&g + g.adjoint()) * Complex64::new(0.5, 0.0);
            let target = twirl_reconstruction(twirl_exact(&herm, dim)?, dim);
            let random_distance =
                frobenius_distance(&twirl_mc(&herm, dim, samples, &rng)?, &target);
            let expected_error = herm.norm() / (samples as f64).sqrt();

            #[derive(Serialize)]
            struct SchurOutput {
                dim: usize,
                samples: usize,
                identity_distance: f64,
                swap_distance: f64,
                random_distance: f64,
                expected_error: f64,
                passed: bool,
            }
            let passed = identity_distance < 1e-10
                && swap_distance < 1e-10
                && random_distance < 5.0 * expected_error;
            let out = SchurOutput {
                dim,
                samples,
                identity_distance,
                swap_distance,
                random_distance,
                expected_error,
                passed,
            };
            emit(
                output.as_deref(),
                &(serde_json::to_string_pretty(&out).unwrap() + "\n"),
            )?;
            if !passed {
                return Err(AppError::alarm("twirl check outside statistical tolerance"));
            }
            Ok(())
        }

        Command::SimulateReverse {
            input,
            example,
            trials,
            seed,
            tol_completeness,
            tol_reversible,
            output,
        } => {
            if trials < 100 {
                return Err(AppError::config("--trials must be >= 100"));
            }
            let set = load_set(input.as_deref(), example.as_deref(), tol_completeness)?;
            let mut state_rng = RandomSource::with_stream(seed, u64::MAX);
            let psi = random_pure_state(set.dimension(), &mut state_rng)?;
            let rng = RandomSource::new(seed);
            let est =
                simulate_measure_and_reverse_with_threshold(&set, &psi, trials, &rng, tol_reversible)?;
            let closed_form = reversibility(&set);
            let z = est.z_score(closed_form);

            #[derive(Serialize)]
            struct SimulateOutput {
                trials: usize,
                empirical_rate: f64,
                closed_form: f64,
                z_score: f64,
            }
            emit(
                output.as_deref(),
                &(serde_json::to_string_pretty(&SimulateOutput {
                    trials,
                    empirical_rate: est.mean,
                    closed_form,
                    z_score: z,
                })
                .unwrap()
                    + "\n"),
            )?;
            if z.abs() > 4.0 {
                return Err(AppError::alarm(format!(
                    "empirical undo rate {:.6} deviates from closed form {:.6} by {z:.1} sigma",
                    est.mean, closed_form
                )));
            }
            Ok(())
        }

        Command::DilateCheck {
            input,
            example,
            samples,
            seed,
            tol_completeness,
            output,
        } => {
            if samples < 10 {
                return Err(AppError::config("--samples must be >= 10"));
            }
            let set = load_set(input.as_deref(), example.as_deref(), tol_completeness)?;
            let dilated = dilate(&set);
            let unitarity_residual = dilated.unitarity_residual();
            let mut probe = RandomSource::with_stream(seed, 2);
            let mut probability_residual = 0.0_f64;
            for _ in 0..samples {
                let psi = random_pure_state(set.dimension(), &mut probe)?;
                for r in 0..set.n_outcomes() {
                    let delta = (dilated.projected_probability(r, &psi)?
                        - set.outcome_probability(r, &psi)?)
                    .abs();
                    probability_residual = probability_residual.max(delta);
                }
            }
            let report = information_report(&dilated, samples, &RandomSource::new(seed))?;
            let retrieval_fidelity_deficit = if report.information_free {
                let mut worst = 0.0_f64;
                for _ in 0..10 {
                    let psi = random_pure_state(set.dimension(), &mut probe)?;
                    for r in 0..set.n_outcomes() {
                        let residual = dilated.projected_state(r, &psi)?;
                        let recovered = dilated.deterministic_retrieval(r, &residual)?;
                        worst = worst.max(1.0 - recovered.overlap_sq(&psi));
                    }
                }
                Some(worst)
            } else {
                None
            };

            #[derive(Serialize)]
            struct DilateOutput {
                unitarity_residual: f64,
                probability_consistency_residual: f64,
                information_free: bool,
                retrieval_fidelity_deficit: Option<f64>,
            }
            let passed = unitarity_residual < 1e-9
                && probability_residual < 1e-9
                && retrieval_fidelity_deficit.map(|d| d < 1e-9).unwrap_or(true);
            emit(
                output.as_deref(),
                &(serde_json::to_string_pretty(&DilateOutput {
                    unitarity_residual,
                    probability_consistency_residual: probability_residual,
                    information_free: report.information_free,
                    retrieval_fidelity_deficit,
                })
                .unwrap()
                    + "\n"),
            )?;
            if !passed {
                return Err(AppError::alarm("dilation residuals exceed tolerance"));
            }
            Ok(())
        }
    }
}
