use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use gpa_core::analysis::{Options, VarianceMethod};
use gpa_core::runner::{load_model, run_model, RunConfig};
use gpa_core::GpaError;

#[derive(Parser)]
#[command(name = "gpa", version, about = "Grouped PEPA analyser")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every analysis in a model file and write CSV outputs.
    Run {
        file: PathBuf,
        /// Directory for outputs and relative redirect targets.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        /// Master seed for simulation random streams.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Worker threads for simulation (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long, value_enum, default_value_t = Method::Closure)]
        variance_method: Method,
        /// Print the transition classes.
        #[arg(long)]
        dump_classes: bool,
        /// Print the generated ODE system.
        #[arg(long)]
        dump_odes: bool,
        /// Allow plotSwitchpoints in simulation analyses.
        #[arg(long)]
        simulation_switchpoints: bool,
    },
    /// Parse and validate a model file without running it.
    Check { file: PathBuf },
    /// Print a gnuplot script for a CSV output.
    Gnuplot { csv: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Closure,
    Lna,
}

fn located(path: &Path, e: GpaError) -> anyhow::Error {
    match e {
        GpaError::Parse(p) => anyhow::anyhow!("{}:{p}", path.display()),
        GpaError::Validation(v) if v.pos.is_some() => anyhow::anyhow!("{}:{v}", path.display()),
        other => anyhow::anyhow!("{}: {other}", path.display()),
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Run {
            file,
            out_dir,
            seed,
            threads,
            variance_method,
            dump_classes,
            dump_odes,
            simulation_switchpoints,
        } => {
            let model = load_model(&read(&file)?).map_err(|e| located(&file, e))?;
            let cfg = RunConfig {
                input: file.clone(),
                out_dir,
                options: Options {
                    seed,
                    threads,
                    variance_method: match variance_method {
                        Method::Closure => VarianceMethod::Closure,
                        Method::Lna => VarianceMethod::Lna,
                    },
                    simulation_switchpoints,
                },
                dump_classes,
                dump_odes,
            };
            let report = run_model(&model, &cfg).map_err(|e| located(&file, e))?;
            print!("{}", report.dumps);
            for p in &report.written {
                eprintln!("wrote {}", p.display());
            }
        }
        Command::Check { file } => {
            let model = load_model(&read(&file)?).map_err(|e| located(&file, e))?;
            println!(
                "{}: ok ({} dimensions, {} transition classes, {} analyses)",
                file.display(),
                model.idx.len(),
                model.classes.len(),
                model.vm.analyses.len()
            );
        }
        Command::Gnuplot { csv } => {
            print!("{}", gpa_core::output::gnuplot_script(&csv).map_err(|e| located(&csv, e))?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
