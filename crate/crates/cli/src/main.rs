use std::path::PathBuf;
use std::process::ExitCode;

use arithsupport::experiments::Route;
use arithsupport::job::{run_job, selftest, JobConfig, JobError, JobKind, Report, Task};
use clap::{Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "arithsupport", version, about = "Exact checks of modular operator determinants and monodromy")]
struct Cli {
    /// Job file (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for random-mode checks; overrides the job file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Include per-stage timings in the report.
    #[arg(long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Trace and determinant checks of the modular representation.
    Verify {
        #[command(subcommand)]
        what: VerifyCmd,
    },
    /// Monodromy polynomial by two independent routes.
    Monodromy,
    /// q-difference trace and determinant checks.
    Qverify,
    /// q-difference monodromy polynomial by two routes.
    Qmonodromy,
    /// Quantum torus determinant formula (built-in operator without a config).
    Torus {
        #[arg(long, value_delimiter = ',')]
        levels: Vec<u64>,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Coefficient experiments.
    Experiment {
        #[command(subcommand)]
        what: ExperimentCmd,
    },
    /// Built-in identity corpus.
    Selftest,
}

#[derive(Subcommand, Debug)]
enum VerifyCmd {
    Trace,
    Det,
}

#[derive(Subcommand, Debug)]
enum ExperimentCmd {
    /// Arithmetic series coefficients and their denominators.
    Arith {
        #[arg(long)]
        max_n: Option<u32>,
        #[arg(long)]
        route: Option<Route>,
        /// Prime for the ratio analysis.
        #[arg(long)]
        ratio_p: Option<u64>,
    },
    /// q-deformed series coefficients and their denominators.
    Qdef {
        #[arg(long)]
        max_k: Option<u32>,
    },
}

fn load(path: &Option<PathBuf>, fallback: Option<JobKind>) -> Result<JobConfig, JobError> {
    match (path, fallback) {
        (Some(p), _) => {
            let src = std::fs::read_to_string(p).map_err(|e| JobError::Config(format!("{}: {e}", p.display())))?;
            JobConfig::from_toml(&src)
        }
        (None, Some(kind)) => Ok(JobConfig::new(kind)),
        (None, None) => Err(JobError::Config("--config is required for this command".into())),
    }
}

fn run(cli: &Cli) -> Result<Report, JobError> {
    let cfg = |kind| load(&cli.config, kind);
    let job = |cfg: JobConfig, task| run_job(&cfg, task, cli.seed, cli.verbose);
    match &cli.command {
        None => job(cfg(None)?, Task::All),
        Some(Command::Selftest) => Ok(selftest(cli.verbose)),
        Some(Command::Verify { what: VerifyCmd::Trace }) => job(cfg(None)?, Task::VerifyTrace),
        Some(Command::Verify { what: VerifyCmd::Det }) => job(cfg(None)?, Task::VerifyDet),
        Some(Command::Monodromy) => job(cfg(None)?, Task::Monodromy),
        Some(Command::Qverify) => job(cfg(None)?, Task::QVerify),
        Some(Command::Qmonodromy) => job(cfg(None)?, Task::QMonodromy),
        Some(Command::Torus { levels, depth }) => {
            let mut c = cfg(Some(JobKind::Torus))?;
            if !levels.is_empty() {
                c.levels = levels.clone();
            }
            c.depth = depth.or(c.depth);
            job(c, Task::Torus)
        }
        Some(Command::Experiment { what: ExperimentCmd::Arith { max_n, route, ratio_p } }) => {
            let mut c = cfg(Some(JobKind::ExperimentArith))?;
            c.max_n = max_n.or(c.max_n);
            c.route = route.or(c.route);
            c.ratio_p = ratio_p.or(c.ratio_p);
            job(c, Task::ExperimentArith)
        }
        Some(Command::Experiment { what: ExperimentCmd::Qdef { max_k } }) => {
            let mut c = cfg(Some(JobKind::ExperimentQ))?;
            c.max_k = max_k.or(c.max_k);
            job(c, Task::ExperimentQ)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(k) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    let report = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let json = report.to_json() + "\n";
    let written = match &cli.out {
        Some(p) => std::fs::write(p, &json).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            print!("{json}");
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    ExitCode::from(report.exit_code() as u8)
}
