//! Command-line front end for the spectral network identification pipeline.
//!
//! Exit codes: 0 success, 2 usage/file/validation error, 3 numerical
//! failure. Thread count is controlled only through the BLAS environment
//! (e.g. `OPENBLAS_NUM_THREADS`).

use clap::{Parser, Subcommand, ValueEnum};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use netspectra::pipeline::{
    reproduce, render_report, run_pipeline, stage_analyze, stage_gen_graph, stage_identify,
    stage_simulate, ArtifactPaths, BundledScenario, RunReport,
};
use netspectra::scenario::Scenario;
use netspectra::Error;

#[derive(Parser)]
#[command(name = "netspectra", version, about = "Identify Laplacian spectra of networked linear systems from sparse measurements")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OutputFormat {
    /// Human-readable report.
    Text,
    /// Machine-readable JSON report.
    Json,
    /// One-line CSV summary.
    Csv,
}

#[derive(clap::Args)]
struct CommonArgs {
    /// Scenario JSON document.
    #[arg(long)]
    scenario: PathBuf,
    /// Output directory for artifacts.
    #[arg(long)]
    out: PathBuf,
    /// Replace every seed in the scenario with values derived from this.
    #[arg(long)]
    seed_override: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate (or load) the scenario's graph and write graph.json.
    GenGraph(CommonArgs),
    /// Simulate the scenario against graph.json and write trajectory.csv.
    Simulate(CommonArgs),
    /// Identify the spectrum from trajectory.csv and write eigenvalue artifacts.
    Identify(CommonArgs),
    /// Derive network statistics from eigenvalues.json and write summary.json.
    Analyze {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        format: OutputFormat,
    },
    /// Run the full pipeline: gen-graph, simulate, identify, analyze.
    Run {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        format: OutputFormat,
    },
    /// Run bundled scenarios (table1, table2, table3, clustering, all).
    Reproduce {
        /// Which bundled scenario to run.
        #[arg(default_value = "all")]
        which: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed_override: Option<u64>,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        format: OutputFormat,
    },
}

fn load_scenario(args: &CommonArgs) -> Result<(Scenario, PathBuf), Error> {
    let mut scenario = Scenario::load(&args.scenario)?;
    if let Some(seed) = args.seed_override {
        scenario.override_seeds(seed);
    }
    let base_dir = args
        .scenario
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));
    Ok((scenario, base_dir))
}

fn print_report(report: &RunReport, format: OutputFormat) -> Result<(), Error> {
    match format {
        OutputFormat::Text => print!("{}", render_report(report)),
        OutputFormat::Json => println!("{}", serde_json::to_string_pretty(report)?),
        OutputFormat::Csv => {
            println!("name,mode,m1,m2,d2_lower,d2_upper,lambda2,lambda_n,dmin_bound,dmax_bound");
            let s = &report.summary;
            println!(
                "{},{:?},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                report.name,
                s.mode,
                s.m1,
                s.m2,
                s.d2_bounds[0],
                s.d2_bounds[1],
                s.lambda2,
                s.lambda_n,
                s.dmin_bound,
                s.dmax_bound
            );
        }
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::GenGraph(args) => {
            let (scenario, base_dir) = load_scenario(&args)?;
            let paths = ArtifactPaths::new(&args.out)?;
            let graph = stage_gen_graph(&scenario, &base_dir, &paths)?;
            eprintln!(
                "wrote {} ({} nodes, {} edges)",
                paths.graph().display(),
                graph.node_count(),
                graph.edge_count()
            );
            Ok(())
        }
        Command::Simulate(args) => {
            let (scenario, _) = load_scenario(&args)?;
            let paths = ArtifactPaths::new(&args.out)?;
            let traj = stage_simulate(&scenario, &paths)?;
            eprintln!(
                "wrote {} ({} samples, {} signals)",
                paths.trajectory().display(),
                traj.len(),
                traj.q()
            );
            Ok(())
        }
        Command::Identify(args) => {
            let (scenario, _) = load_scenario(&args)?;
            let paths = ArtifactPaths::new(&args.out)?;
            let doc = stage_identify(&scenario, &paths)?;
            eprintln!(
                "wrote {} ({} eigenvalues, residual {:.2e})",
                paths.eigenvalues_json().display(),
                doc.lambdas.len(),
                doc.residual
            );
            Ok(())
        }
        Command::Analyze { common, format } => {
            let (scenario, _) = load_scenario(&common)?;
            let paths = ArtifactPaths::new(&common.out)?;
            let name = common
                .scenario
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "scenario".into());
            let report = stage_analyze(&scenario, &name, &paths)?;
            print_report(&report, format)
        }
        Command::Run { common, format } => {
            let (scenario, base_dir) = load_scenario(&common)?;
            let name = common
                .scenario
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "scenario".into());
            let report = run_pipeline(&scenario, &name, &base_dir, &common.out)?;
            print_report(&report, format)
        }
        Command::Reproduce { which, out, seed_override, format } => {
            let targets: Vec<BundledScenario> = if which == "all" {
                BundledScenario::all().to_vec()
            } else {
                match BundledScenario::from_id(&which) {
                    Some(b) => vec![b],
                    None => {
                        return Err(Error::Parameter(format!(
                            "unknown scenario `{which}`; expected table1, table2, table3, clustering or all"
                        )))
                    }
                }
            };
            let reports = reproduce(&targets, &out, seed_override)?;
            for report in &reports {
                print_report(report, format)?;
                if matches!(format, OutputFormat::Text) {
                    println!();
                }
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            if err.is_usage() {
                ExitCode::from(2)
            } else {
                ExitCode::from(3)
            }
        }
    }
}
