use std::path::PathBuf;
use std::process::ExitCode as ProcessExit;

use clap::{Args, Parser, Subcommand};

use retroscat_cli::commands::{
    cmd_forward, cmd_image, cmd_levelset, cmd_validate, CommandError, ExitCode,
};

/// Phaseless two-line backscatter simulation and topological-derivative
/// imaging.
#[derive(Parser)]
#[command(name = "retroscat", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ThreadsArg {
    /// Worker threads: a number or `auto`.
    #[arg(long, default_value = "auto")]
    threads: String,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize the monostatic measurement CSV from a config.
    Forward {
        #[arg(long)]
        config: PathBuf,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        threads: ThreadsArg,
    },
    /// Scan the probe grid and write the derivative map (CSV + PGM).
    Image {
        #[arg(long)]
        config: PathBuf,
        /// Output prefix; writes `<prefix>.csv` and `<prefix>.pgm`.
        #[arg(long)]
        out: PathBuf,
        /// Measurement CSV produced by `forward`.
        measurements: PathBuf,
        #[command(flatten)]
        threads: ThreadsArg,
    },
    /// Extract a level-set contour from a stored derivative map.
    Levelset {
        /// Level value; negative levels select the reconstruction region.
        #[arg(long, allow_hyphen_values = true)]
        level: f64,
        /// Output contour CSV path.
        #[arg(long)]
        out: PathBuf,
        /// Derivative-map CSV produced by `image`.
        map: PathBuf,
    },
    /// Run the built-in oracle suite.
    Validate {
        #[command(flatten)]
        threads: ThreadsArg,
    },
}

fn parse_threads(spec: &str) -> Result<Option<usize>, CommandError> {
    if spec == "auto" {
        return Ok(None);
    }
    spec.parse::<usize>()
        .ok()
        .filter(|&n| n > 0)
        .map(Some)
        .ok_or_else(|| CommandError {
            code: ExitCode::BadInput,
            message: format!("--threads expects a positive number or `auto`, got `{spec}`"),
        })
}

fn in_pool<T: Send>(
    threads: Option<usize>,
    run: impl FnOnce() -> T + Send,
) -> Result<T, CommandError> {
    match threads {
        None => Ok(run()),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CommandError {
                code: ExitCode::BadInput,
                message: format!("thread pool: {e}"),
            })
            .map(|pool| pool.install(run)),
    }
}

fn run() -> Result<ExitCode, CommandError> {
    let cli = Cli::parse();
    match cli.command {
        Command::Forward {
            config,
            out,
            threads,
        } => {
            let threads = parse_threads(&threads.threads)?;
            let summary = in_pool(threads, || cmd_forward(&config, &out))??;
            println!("{summary}");
            Ok(ExitCode::Ok)
        }
        Command::Image {
            config,
            out,
            measurements,
            threads,
        } => {
            let threads = parse_threads(&threads.threads)?;
            let summary = in_pool(threads, || cmd_image(&config, &measurements, &out))??;
            println!("{summary}");
            Ok(ExitCode::Ok)
        }
        Command::Levelset { level, out, map } => {
            let summary = cmd_levelset(&map, level, &out)?;
            println!("{summary}");
            Ok(ExitCode::Ok)
        }
        Command::Validate { threads } => {
            let threads = parse_threads(&threads.threads)?;
            let (report, code) = in_pool(threads, cmd_validate)?;
            print!("{}", report.render());
            Ok(code)
        }
    }
}

fn main() -> ProcessExit {
    match run() {
        Ok(code) => ProcessExit::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ProcessExit::from(e.code as u8)
        }
    }
}
