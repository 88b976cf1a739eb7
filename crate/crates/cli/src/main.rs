//! `stablearn`: generate stabilizer states, learn them from simulated Bell
//! samples, run failure-rate experiments and timing benchmarks.
//!
//! Exit status: 0 success, 1 algorithmic failure, 2 usage error, 3 I/O or
//! parse error.

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use stabilizer_learn::learner::{learn, learn_with_retries, spanning_failure_probability, Backend, LearnReport};
use stabilizer_learn::{Error, StabilizerTableau};

#[derive(Parser)]
#[command(name = "stablearn", version, about = "Learn stabilizer states from Bell samples")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a uniformly random n-qubit stabilizer state.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Learn one state and write a JSON report.
    Learn(LearnArgs),
    /// Failure-rate experiment over a range of n; writes CSV.
    Experiment(ExperimentArgs),
    /// Exit 0 iff two tableau files describe the same state.
    Verify { truth: PathBuf, learned: PathBuf },
    /// Time learn() with the coset backend; writes CSV.
    Bench {
        #[arg(long, value_delimiter = ',', default_values_t = [64, 128, 256, 512])]
        n: Vec<usize>,
        #[arg(long, default_value_t = 5)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct LearnArgs {
    /// Tableau file holding the state to learn.
    #[arg(required_unless_present = "random", conflicts_with = "random")]
    state: Option<PathBuf>,
    /// Learn a random n-qubit state instead of a file.
    #[arg(long, value_name = "N")]
    random: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "coset")]
    backend: Backend,
    /// JSON report destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the learned tableau here.
    #[arg(long)]
    tableau_out: Option<PathBuf>,
    /// Rerun on spanning failure, up to this many attempts in total.
    #[arg(long, default_value_t = 1)]
    retry: usize,
    /// Report zero durations so output is byte-reproducible.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long, default_value_t = 2)]
    n_min: usize,
    #[arg(long, default_value_t = 10)]
    n_max: usize,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "coset")]
    backend: Backend,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; 0 uses the available parallelism.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    #[arg(long)]
    no_timing: bool,
}

enum Failure {
    Algorithm(String),
    Usage(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Algorithm(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Io(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Algorithm(m) | Failure::Usage(m) | Failure::Io(m) => f.write_str(m),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. } => Failure::Io(e.to_string()),
            Error::NotStabilizerState(_) => Failure::Algorithm(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

/// Per-trial stream: root seed, then stream id `(n << 32) | trial`.
fn trial_rng(seed: u64, n: usize, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((n as u64) << 32) | trial);
    rng
}

fn child_rng(rng: &mut ChaCha8Rng) -> ChaCha8Rng {
    ChaCha8Rng::from_rng(rng).expect("ChaCha never fails to seed")
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => {
            Box::new(io::BufWriter::new(fs::File::create(p).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?))
        }
        None => Box::new(io::stdout().lock()),
    })
}

fn read_tableau(path: &Path) -> Result<StabilizerTableau, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    text.parse().map_err(|e: Error| Failure::Io(format!("{}: {e}", path.display())))
}

fn require_qubits(n: usize) -> Result<(), Failure> {
    if n == 0 {
        return Err(Failure::Usage("n must be at least 1".into()));
    }
    Ok(())
}

fn require_backend(backend: Backend, n: usize) -> Result<(), Failure> {
    if n > backend.max_qubits() {
        return Err(Failure::Usage(format!(
            "backend {backend} supports at most {} qubits, got {n}",
            backend.max_qubits()
        )));
    }
    Ok(())
}

fn cmd_gen(n: usize, seed: u64, out: Option<&Path>) -> Result<(), Failure> {
    require_qubits(n)?;
    let state = StabilizerTableau::random_state(n, &mut trial_rng(seed, n, 0))?;
    let mut w = open_out(out)?;
    write!(w, "{state}")?;
    w.flush()?;
    Ok(())
}

fn cmd_learn(args: &LearnArgs) -> Result<(), Failure> {
    let (truth, mut rng) = match (&args.state, args.random) {
        (Some(path), _) => {
            let t = read_tableau(path)?;
            let rng = trial_rng(args.seed, t.num_qubits(), 0);
            (t, rng)
        }
        (None, Some(n)) => {
            require_qubits(n)?;
            let mut rng = trial_rng(args.seed, n, 0);
            (StabilizerTableau::random_state(n, &mut rng)?, rng)
        }
        (None, None) => return Err(Failure::Usage("give a state file or --random N".into())),
    };
    require_backend(args.backend, truth.num_qubits())?;

    let start = Instant::now();
    let report: LearnReport = learn_with_retries(|| args.backend.access(&truth, child_rng(&mut rng)), args.retry)?;
    let elapsed = if args.no_timing { 0.0 } else { start.elapsed().as_secs_f64() };

    let mut w = open_out(args.out.as_deref())?;
    serde_json::to_writer_pretty(&mut w, &report.to_record(elapsed)).map_err(|e| Failure::Io(e.to_string()))?;
    writeln!(w)?;
    w.flush()?;

    let Some(learned) = &report.tableau else {
        return Err(Failure::Algorithm(format!(
            "spanning failure: Bell samples span {} of {} dimensions",
            report.basis_rank, report.n
        )));
    };
    if let Some(path) = &args.tableau_out {
        fs::write(path, learned.to_string()).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    }
    if !learned.same_state(&truth) {
        return Err(Failure::Algorithm("learned state differs from the input state".into()));
    }
    Ok(())
}

#[derive(Default)]
struct Tally {
    failures: u64,
    wrong: u64,
    copies_on_success: u64,
    seconds: f64,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        self.failures += other.failures;
        self.wrong += other.wrong;
        self.copies_on_success += other.copies_on_success;
        self.seconds += other.seconds;
        self
    }
}

fn run_trial(n: usize, trial: u64, args: &ExperimentArgs) -> Result<Tally, Error> {
    let mut rng = trial_rng(args.seed, n, trial);
    let truth = StabilizerTableau::random_state(n, &mut rng)?;
    let mut access = args.backend.access(&truth, child_rng(&mut rng))?;
    let start = Instant::now();
    let report = learn(&mut access)?;
    let seconds = if args.no_timing { 0.0 } else { start.elapsed().as_secs_f64() };
    Ok(match &report.tableau {
        Some(t) => Tally {
            wrong: u64::from(!t.same_state(&truth)),
            copies_on_success: report.copies_used as u64,
            seconds,
            ..Tally::default()
        },
        None => Tally { failures: 1, seconds, ..Tally::default() },
    })
}

fn cmd_experiment(args: &ExperimentArgs) -> Result<(), Failure> {
    require_qubits(args.n_min)?;
    if args.n_max < args.n_min {
        return Err(Failure::Usage(format!("n-max {} is below n-min {}", args.n_max, args.n_min)));
    }
    if args.trials == 0 {
        return Err(Failure::Usage("trials must be at least 1".into()));
    }
    if args.backend == Backend::Dense && args.n_max > 5 {
        return Err(Failure::Usage(format!("dense experiments need n-max <= 5, got {}", args.n_max)));
    }
    let pool =
        rayon::ThreadPoolBuilder::new().num_threads(args.jobs).build().map_err(|e| Failure::Usage(e.to_string()))?;

    let mut csv = csv::Writer::from_writer(open_out(args.out.as_deref())?);
    csv.write_record([
        "n",
        "trials",
        "failures",
        "failure_rate",
        "bound_2^-n",
        "exact_failure_prob",
        "mean_copies_on_success",
        "mean_duration_seconds",
    ])?;
    let mut wrong = 0;
    for n in args.n_min..=args.n_max {
        let tally = pool.install(|| {
            (0..args.trials)
                .into_par_iter()
                .map(|trial| run_trial(n, trial, args))
                .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))
        })?;
        wrong += tally.wrong;
        let successes = args.trials - tally.failures;
        let mean_copies = if successes == 0 {
            String::new()
        } else {
            (tally.copies_on_success as f64 / successes as f64).to_string()
        };
        csv.write_record([
            n.to_string(),
            args.trials.to_string(),
            tally.failures.to_string(),
            (tally.failures as f64 / args.trials as f64).to_string(),
            0.5f64.powi(n as i32).to_string(),
            spanning_failure_probability(n, 2 * n).to_string(),
            mean_copies,
            (tally.seconds / args.trials as f64).to_string(),
        ])?;
        csv.flush()?;
    }
    if wrong > 0 {
        return Err(Failure::Algorithm(format!("{wrong} successful trials learned the wrong state")));
    }
    Ok(())
}

fn cmd_verify(truth: &Path, learned: &Path) -> Result<(), Failure> {
    let a = read_tableau(truth)?.canonical_form();
    let b = read_tableau(learned)?.canonical_form();
    if a == b {
        println!("same state");
        return Ok(());
    }
    println!("states differ\n--- {}\n{a}--- {}\n{b}", truth.display(), learned.display());
    Err(Failure::Algorithm("canonical forms differ".into()))
}

fn cmd_bench(ns: &[usize], trials: u64, seed: u64, out: Option<&Path>) -> Result<(), Failure> {
    if trials == 0 {
        return Err(Failure::Usage("trials must be at least 1".into()));
    }
    let mut csv = csv::Writer::from_writer(open_out(out)?);
    csv.write_record(["n", "trials", "mean_learn_seconds", "ratio"])?;
    let mut previous: Option<f64> = None;
    for &n in ns {
        require_qubits(n)?;
        let mut total = 0.0;
        for trial in 0..trials {
            let mut rng = trial_rng(seed, n, trial);
            let truth = StabilizerTableau::random_state(n, &mut rng)?;
            let mut access = Backend::Coset.access(&truth, child_rng(&mut rng))?;
            let start = Instant::now();
            learn(&mut access)?;
            total += start.elapsed().as_secs_f64();
        }
        let mean = total / trials as f64;
        let ratio = previous.map(|p| (mean / p).to_string()).unwrap_or_default();
        csv.write_record([n.to_string(), trials.to_string(), mean.to_string(), ratio])?;
        csv.flush()?;
        previous = Some(mean);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Gen { n, seed, out } => cmd_gen(*n, *seed, out.as_deref()),
        Command::Learn(args) => cmd_learn(args),
        Command::Experiment(args) => cmd_experiment(args),
        Command::Verify { truth, learned } => cmd_verify(truth, learned),
        Command::Bench { n, trials, seed, out } => cmd_bench(n, *trials, *seed, out.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("stablearn: {failure}");
            ExitCode::from(failure.code())
        }
    }
}
