use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use tripartite::classify::{canonical_form, classification_report, random_member, tensor_rank};
use tripartite::measures::measure_report_with;
use tripartite::multiparty::{
    average_squared_concurrence, class_count_lower_bound, etau_gap_polynomial, etau_haar_sampling,
    formation_average_sampling, grid_max_etau_gap, residual_report, wn_conjecture_search, wn_pair_concurrence,
    wn_pair_concurrence_reduced, PairMeasure,
};
use tripartite::rng::rng_from_seed;
use tripartite::slocc::trials::{ilo_invariance_suite, projection_rank_suite, tangle_monotone_suite, DEFAULT_ETAS};
use tripartite::slocc::epr_conversion_probability;
use tripartite::states::{random_pure, StateFile};
use tripartite::{classify, ClassLabel, PureState, Tolerances};

mod text;

#[derive(Parser)]
#[command(name = "tripartite", version, about = "Entanglement classification of pure three-qubit states")]
struct Cli {
    /// Seed for randomized commands; derived from the clock and printed when absent.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for parallel suites (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Determinant threshold below which a local rank counts as one.
    #[arg(long, global = true, env = "TRIPARTITE_EPS_RANK", default_value_t = 1e-9)]
    eps_rank: f64,
    /// 3-tangle threshold separating GHZ from W.
    #[arg(long, global = true, env = "TRIPARTITE_EPS_TAU", default_value_t = 1e-10)]
    eps_tau: f64,
    /// Relative discriminant below which the two product vectors merge.
    #[arg(long, global = true, env = "TRIPARTITE_EPS_DISC", default_value_t = 1e-9)]
    eps_disc: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// SLOCC class, local ranks, 3-tangle, tensor rank and canonical form.
    Classify { file: PathBuf },
    /// Entropies, concurrences, 3-tangle and residual entanglement.
    Measures { file: PathBuf },
    /// Canonical form and a minimal product decomposition.
    Canonical { file: PathBuf },
    /// Average and worst-case pairwise entanglement.
    Residual {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = MeasureArg::C2)]
        measure: MeasureArg,
    },
    /// Writes a random state of the requested class.
    Random {
        #[arg(long = "class", value_enum)]
        class: ClassArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Runs a verification suite; exits with status 3 on a violation.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, default_value_t = 201)]
        resolution: usize,
        /// Largest N for the W_N suite.
        #[arg(long, default_value_t = 10)]
        max_n: usize,
    },
    /// Descriptive sampling experiments (no pass/fail).
    Sample {
        #[arg(long, value_enum)]
        experiment: Experiment,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 2_000)]
        refine_steps: usize,
        /// Number of qubits for the W_N search.
        #[arg(long, default_value_t = 4)]
        n: usize,
    },
    /// Parameter-count lower bound for the given party dimensions.
    Dimcount {
        #[arg(required = true, num_args = 2..)]
        dims: Vec<usize>,
    },
    /// Single-copy EPR conversion of a two-qubit state.
    Epr { file: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum MeasureArg {
    C2,
    Ef,
    E2,
}

impl From<MeasureArg> for PairMeasure {
    fn from(m: MeasureArg) -> Self {
        match m {
            MeasureArg::C2 => PairMeasure::Concurrence2,
            MeasureArg::Ef => PairMeasure::Formation,
            MeasureArg::E2 => PairMeasure::E2,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ClassArg {
    Ghz,
    W,
    #[value(name = "a-bc")]
    ABc,
    #[value(name = "b-ac")]
    BAc,
    #[value(name = "c-ab")]
    CAb,
    #[value(name = "a-b-c")]
    Product,
    Generic,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    TangleMonotone,
    RankMonotone,
    EtauBound,
    FGrid,
    Wn,
}

#[derive(Clone, Copy, ValueEnum)]
enum Experiment {
    Etau,
    EfAverage,
    WnSearch,
}

enum Failure {
    Parse(String),
    Module(tripartite::Error),
    Violation,
}

impl From<tripartite::Error> for Failure {
    fn from(e: tripartite::Error) -> Self {
        Failure::Module(e)
    }
}

type Outcome = std::result::Result<(), Failure>;

struct Ctx {
    format: Format,
    workers: usize,
    tol: Tolerances,
    seed: Option<u64>,
}

impl Ctx {
    fn seed(&self) -> u64 {
        self.seed.unwrap_or_else(|| {
            let s = SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_nanos() as u64)
                .unwrap_or(0);
            eprintln!("seed: {s}");
            s
        })
    }

    fn emit<T: Serialize>(&self, report: &T) {
        let value = serde_json::to_value(report).expect("reports serialize");
        let out = match self.format {
            Format::Json => serde_json::to_string_pretty(&value).expect("json") + "\n",
            Format::Text => text::render(&value),
        };
        // a closed pipe downstream is not an error of ours
        let _ = std::io::stdout().lock().write_all(out.as_bytes());
    }
}

fn load(path: &Path) -> std::result::Result<PureState, Failure> {
    let raw = fs::read_to_string(path).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))?;
    let file: StateFile =
        serde_json::from_str(&raw).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))?;
    file.into_state()
        .map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let tol = Tolerances {
        eps_rank: cli.eps_rank,
        eps_tau: cli.eps_tau,
        eps_disc: cli.eps_disc,
    };
    if let Err(e) = tol.validate() {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    let ctx = Ctx {
        format: cli.format,
        workers: cli.workers,
        tol,
        seed: cli.seed,
    };
    match run(&ctx, cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Parse(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Module(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Violation) => {
            eprintln!("verification failed");
            ExitCode::from(3)
        }
    }
}

fn run(ctx: &Ctx, command: Command) -> Outcome {
    match command {
        Command::Classify { file } => {
            let psi = load(&file)?;
            ctx.emit(&classification_report(&psi, &ctx.tol)?);
        }
        Command::Measures { file } => {
            let psi = load(&file)?;
            ctx.emit(&measure_report_with(&psi, ctx.tol.eps_rank)?);
        }
        Command::Canonical { file } => {
            let psi = load(&file)?;
            let class = classify(&psi, &ctx.tol)?;
            let canonical = canonical_form(&psi, &ctx.tol)?;
            let rank = tensor_rank(&psi, &ctx.tol)?;
            ctx.emit(&json!({
                "class": class.label,
                "canonical": canonical,
                "tensor_rank": rank.rank,
                "terms": rank.terms,
            }));
        }
        Command::Residual { file, measure } => {
            let psi = load(&file)?;
            ctx.emit(&residual_report(&psi, measure.into())?);
        }
        Command::Random { class, out } => random_state(ctx, class, out)?,
        Command::Verify {
            suite,
            trials,
            resolution,
            max_n,
        } => verify(ctx, suite, trials, resolution, max_n)?,
        Command::Sample {
            experiment,
            samples,
            refine_steps,
            n,
        } => {
            let seed = ctx.seed();
            let report = match experiment {
                Experiment::Etau => {
                    serde_json::to_value(etau_haar_sampling(samples, seed, ctx.workers, refine_steps)?)
                }
                Experiment::EfAverage => {
                    serde_json::to_value(formation_average_sampling(samples, seed, ctx.workers, refine_steps)?)
                }
                Experiment::WnSearch => {
                    serde_json::to_value(wn_conjecture_search(n, samples, seed, ctx.workers, refine_steps)?)
                }
            }
            .expect("reports serialize");
            ctx.emit(&json!({ "seed": seed, "report": report }));
        }
        Command::Dimcount { dims } => {
            let c = class_count_lower_bound(&dims)?;
            ctx.emit(&c);
        }
        Command::Epr { file } => {
            let psi = load(&file)?;
            let r = epr_conversion_probability(&psi)?;
            ctx.emit(&json!({
                "e2_lambda2": r.e2,
                "optimal_probability": r.probability,
            }));
        }
    }
    Ok(())
}

fn random_state(ctx: &Ctx, class: ClassArg, out: Option<PathBuf>) -> Outcome {
    let seed = ctx.seed();
    let (psi, expected) = match class {
        ClassArg::Generic => (random_pure(&[2, 2, 2], seed)?, ClassLabel::Ghz),
        other => {
            let label = match other {
                ClassArg::Ghz => ClassLabel::Ghz,
                ClassArg::W => ClassLabel::W,
                ClassArg::ABc => ClassLabel::SeparableA,
                ClassArg::BAc => ClassLabel::SeparableB,
                ClassArg::CAb => ClassLabel::SeparableC,
                _ => ClassLabel::Product,
            };
            (random_member(label, &mut rng_from_seed(seed)), label)
        }
    };
    let found = classify(&psi, &ctx.tol)?.label;
    if found != expected {
        return Err(Failure::Module(tripartite::Error::Inconclusive(format!(
            "sampled state classifies as {found}, expected {expected}"
        ))));
    }
    let body = serde_json::to_string_pretty(&psi.to_file()).expect("state serializes");
    match out {
        Some(path) => fs::write(&path, body + "\n").map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))?,
        None => ctx.emit(&psi.to_file()),
    }
    Ok(())
}

fn verify(ctx: &Ctx, suite: Suite, trials: Option<usize>, resolution: usize, max_n: usize) -> Outcome {
    let (name, passed, report): (&str, bool, Value) = match suite {
        Suite::TangleMonotone => {
            let seed = ctx.seed();
            let r = tangle_monotone_suite(trials.unwrap_or(10_000), seed, ctx.workers, &DEFAULT_ETAS)?;
            let v = json!({ "seed": seed, "reports": r.reports, "scaling_identity": r.scaling_identity,
                            "equal_case": r.equal_case });
            ("tangle-monotone", r.passes(), v)
        }
        Suite::RankMonotone => {
            let seed = ctx.seed();
            let n = trials.unwrap_or(1_000);
            let ilo = ilo_invariance_suite(n, seed, ctx.workers, &ctx.tol)?;
            let proj = projection_rank_suite(n, seed ^ 0x5bd1_e995, ctx.workers, ctx.tol.eps_rank)?;
            let passed = ilo.passes() && proj.passes(0.0);
            ("rank-monotone", passed, json!({ "seed": seed, "ilo": ilo, "projection": proj }))
        }
        Suite::EtauBound => {
            let seed = ctx.seed();
            let r = etau_haar_sampling(trials.unwrap_or(100_000), seed, ctx.workers, 2_000)?;
            let w = residual_report(&PureState::w(), PairMeasure::Concurrence2)?.e_tau;
            let passed = r.within_bounds(1e-9) && r.argmax_nearer_w() && (w - 4.0 / 3.0).abs() <= 1e-12;
            ("etau-bound", passed, json!({ "seed": seed, "w_e_tau": w, "sampling": r }))
        }
        Suite::FGrid => {
            let g = grid_max_etau_gap(resolution, ctx.workers)?;
            let origin = etau_gap_polynomial(0.0, 0.0, 0.0)?;
            let passed = g.max < 0.0 && origin == -4.0;
            ("f-grid", passed, json!({ "grid": g, "origin_value": origin }))
        }
        Suite::Wn => {
            if max_n < 3 {
                return Err(Failure::Parse("--max-n must be at least 3".into()));
            }
            let mut rows = Vec::new();
            let mut worst = 0.0f64;
            for n in 3..=max_n {
                let target = 2.0 / n as f64;
                let analytic = wn_pair_concurrence(n)?;
                let reduced = wn_pair_concurrence_reduced(n, 0, n - 1)?;
                let avg = average_squared_concurrence(&PureState::w_n(n)?)?;
                let dev = (analytic - target)
                    .abs()
                    .max((reduced - target).abs())
                    .max((avg - target * target).abs());
                worst = worst.max(dev);
                rows.push(json!({ "n": n, "analytic": analytic, "reduced": reduced,
                                  "average_squared": avg, "max_deviation": dev }));
            }
            ("wn", worst <= 1e-12, json!({ "rows": rows, "max_deviation": worst }))
        }
    };
    ctx.emit(&json!({ "suite": name, "passed": passed, "report": report }));
    if passed {
        Ok(())
    } else {
        Err(Failure::Violation)
    }
}
