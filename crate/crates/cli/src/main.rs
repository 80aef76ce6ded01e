//! Command-line entry point: construction, simulation and analysis
//! subcommands with reproducible run manifests.
//!
//! Every run writes a JSON manifest next to its primary output (or to
//! `--manifest`); `lorentz replay --manifest <file>` re-executes the
//! recorded parameters and byte-reproduces every numeric artifact,
//! regardless of `--workers`.

use std::path::PathBuf;
use std::time::Instant;

use clap::Parser;

use lorentz_cli::commands::Command;
use lorentz_cli::manifest::{self, RunManifest};
use lorentz_cli::runner;

#[derive(Parser)]
#[command(name = "lorentz", version, about = "Aperiodic Lorentz tube and gas laboratory")]
struct Cli {
    /// Parallel workers for the estimators; outputs do not depend on it.
    /// Defaults to $LORENTZ_WORKERS, then 1.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Manifest path; defaults to "<out>.manifest.json".
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    #[command(subcommand)]
    action: Action,
}

#[derive(clap::Subcommand)]
enum Action {
    #[command(flatten)]
    Run(Command),
    /// Re-execute a recorded run; outputs are byte-identical.
    Replay {
        #[arg(long)]
        manifest: PathBuf,
    },
}

fn main() {
    let cli = Cli::parse();
    let workers = runner::resolve_workers(cli.workers);
    let code = match cli.action {
        Action::Run(cmd) => execute(cmd, workers, cli.manifest),
        Action::Replay { manifest } => replay(&manifest, cli.workers),
    };
    std::process::exit(code);
}

fn execute(cmd: Command, workers: usize, manifest_path: Option<PathBuf>) -> i32 {
    let started = Instant::now();
    let mut record = RunManifest::new(cmd.clone(), workers);
    match cmd.run(workers) {
        Ok(artifacts) => {
            for input in &artifacts.inputs {
                if let Err(e) = record.record_input(input) {
                    eprintln!("error: {e:#}");
                    return 5;
                }
            }
            for output in &artifacts.outputs {
                record.record_output(output);
            }
            record.elapsed_seconds = started.elapsed().as_secs_f64();
            let path = manifest_path
                .unwrap_or_else(|| default_manifest_path(&cmd));
            if let Err(e) = record.write(&path) {
                eprintln!("error: {e:#}");
                return 5;
            }
            0
        }
        Err(e) => {
            eprintln!("error: {:#}", e.message());
            e.exit_code()
        }
    }
}

fn default_manifest_path(cmd: &Command) -> PathBuf {
    let out = cmd.out_path();
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    out.with_file_name(name)
}

fn replay(path: &std::path::Path, workers_override: Option<usize>) -> i32 {
    let record = match RunManifest::load(path) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return 5;
        }
    };
    // Inputs must be unchanged for byte reproduction to mean anything.
    for input in &record.inputs {
        match manifest::sha256_file(&input.path) {
            Ok(h) if h == input.sha256 => {}
            Ok(h) => {
                eprintln!(
                    "error: input {} hash {} differs from recorded {}",
                    input.path.display(),
                    h,
                    input.sha256
                );
                return 3;
            }
            Err(e) => {
                eprintln!("error: {e:#}");
                return 5;
            }
        }
    }
    let workers = runner::resolve_workers(workers_override.or(Some(record.workers)));
    execute(record.command, workers, None)
}
