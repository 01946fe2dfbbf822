use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use tagflow::io::{parse_scenario, write_outputs, RunSummary, Scenario};
use tagflow::roundabout::{build_roundabout, RoundaboutParams};
use tagflow::{CoefficientMode, Network, SimConfig, Simulator};

const INVALID_INPUT: u8 = 2;
const RUNTIME_FAILURE: u8 = 3;

/// Default entry density: free-flow density carrying flux 0.1 in the unit model.
const DEFAULT_RHO: f64 = 0.11270166537925831;

#[derive(Parser)]
#[command(name = "tagflow", version, about = "Macroscopic tag flow on directed networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a scenario file and write CSV/JSON results.
    Run {
        scenario: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Simulate the two-entry roundabout.
    Roundabout {
        /// Share of S1 traffic bound for S3.
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        /// Share of S2 traffic bound for S4.
        #[arg(long, default_value_t = 0.5)]
        beta: f64,
        #[arg(long, default_value_t = DEFAULT_RHO)]
        rho1: f64,
        #[arg(long, default_value_t = DEFAULT_RHO)]
        rho2: f64,
        #[arg(long, default_value_t = 50)]
        cells: usize,
        #[arg(long, default_value_t = 100.0)]
        t_end: f64,
        /// Adapt exit coefficients to the arriving traffic (default).
        #[arg(long, conflicts_with = "static_coefficients")]
        dynamic: bool,
        /// Keep the initial exit coefficients.
        #[arg(long = "static")]
        static_coefficients: bool,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Check a scenario file without running it.
    Validate { scenario: PathBuf },
    /// Time a synthetic chain-of-diamonds network.
    Bench {
        #[arg(long, default_value_t = 2000)]
        arcs: usize,
        #[arg(long, default_value_t = 25)]
        cells: usize,
        #[arg(long, default_value_t = 500)]
        steps: usize,
    },
}

enum Failure {
    Input(String),
    Runtime(String),
}

fn load(path: &Path) -> Result<Scenario, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    parse_scenario(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn simulate(net: &Network, config: &SimConfig, out: &Path) -> Result<(), Failure> {
    let start = Instant::now();
    let traj = Simulator::new(net, config.coefficient_mode)
        .and_then(|mut sim| sim.run(config))
        .map_err(|e| Failure::Runtime(e.to_string()))?;
    let wall = start.elapsed();
    write_outputs(out, net, &traj).map_err(|e| Failure::Runtime(format!("{}: {e}", out.display())))?;
    let summary = RunSummary::new(net, &traj);
    match summary.equilibrium_time {
        Some(t) => println!("equilibrium at t = {t}"),
        None => println!("no equilibrium by t = {}", summary.t_end),
    }
    for (id, c) in &summary.exit_coefficients {
        println!("exit coefficient {id} = {c:.6}");
    }
    println!(
        "{} steps in {:.3} s, max mass residual {:.2e}, results in {}",
        summary.steps,
        wall.as_secs_f64(),
        summary.max_mass_residual,
        out.display()
    );
    Ok(())
}

fn execute(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Run { scenario, out } => {
            let sc = load(&scenario)?;
            simulate(&sc.network, &sc.config, &out)
        }
        Command::Roundabout {
            alpha,
            beta,
            rho1,
            rho2,
            cells,
            t_end,
            dynamic: _,
            static_coefficients,
            out,
        } => {
            let net = build_roundabout(&RoundaboutParams::new(alpha, beta, rho1, rho2, cells))
                .map_err(|e| Failure::Input(e.to_string()))?;
            let config = SimConfig {
                t_end,
                coefficient_mode: if static_coefficients {
                    CoefficientMode::Static
                } else {
                    CoefficientMode::Dynamic
                },
                ..SimConfig::default()
            };
            config.check().map_err(|e| Failure::Input(e.to_string()))?;
            simulate(&net, &config, &out)
        }
        Command::Validate { scenario } => {
            let sc = load(&scenario)?;
            println!(
                "{}: ok ({} arcs, {} junctions, {} cells)",
                scenario.display(),
                sc.network.arcs.len(),
                sc.network.junctions.len(),
                sc.network.total_cells()
            );
            Ok(())
        }
        Command::Bench { arcs, cells, steps } => {
            if arcs == 0 || cells == 0 {
                return Err(Failure::Input("arcs and cells must be positive".into()));
            }
            let r = tagflow::bench::bench(arcs, cells, steps).map_err(|e| Failure::Runtime(e.to_string()))?;
            println!(
                "{arcs} arcs x {cells} cells x {steps} steps: {:.3} s, {:.3e} cell updates/s, max mass residual {:.2e}",
                r.wall_time.as_secs_f64(),
                r.cell_updates_per_sec,
                r.max_mass_residual
            );
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(INVALID_INPUT)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(RUNTIME_FAILURE)
        }
    }
}
