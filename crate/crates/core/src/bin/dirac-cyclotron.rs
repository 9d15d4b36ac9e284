use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use dirac_cyclotron::cli::{parse_config, run_all, validation_report, write_report, RunOptions};
use dirac_cyclotron::exec::{with_threads, Execution};
use dirac_cyclotron::Error;

#[derive(Parser)]
#[command(name = "dirac-cyclotron", version, about = "Dirac wave packets in a uniform magnetic field")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every scenario of a config file.
    Run {
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        no_timestamp: bool,
    },
    /// Compare closed forms against the reference routes.
    Validate {
        #[arg(long)]
        quick: bool,
        #[arg(long)]
        threads: Option<usize>,
        /// Write the table here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            config,
            out,
            threads,
            no_timestamp,
        } => with_threads(threads, || -> Result<bool, Error> {
            let text = fs::read_to_string(&config).map_err(|source| Error::Io {
                path: config.clone(),
                source,
            })?;
            let scenarios = parse_config(&text)?;
            let opts = RunOptions {
                exec: Execution::Parallel,
                timestamp: !no_timestamp,
            };
            let (paths, ok) = run_all(&scenarios, &out, opts)?;
            for p in paths {
                eprintln!("wrote {}", p.display());
            }
            Ok(ok)
        }),
        Command::Validate {
            quick,
            threads,
            out,
        } => with_threads(threads, || -> Result<bool, Error> {
            let rows = validation_report(quick, Execution::Parallel)?;
            let table = write_report(&rows);
            match out {
                Some(path) => fs::write(&path, &table).map_err(|source| Error::Io { path, source })?,
                None => print!("{table}"),
            }
            Ok(rows.iter().all(|r| r.pass))
        }),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: numeric: validation checks failed");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
