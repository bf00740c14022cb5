mod config;
mod expr;
mod pipeline;
mod selftest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::Config;

/// Solver and diagnostics front end for variable-exponent p(x)-harmonic
/// systems on simplicial meshes.
#[derive(Parser)]
#[command(name = "pxforms", version)]
struct Cli {
    /// Worker thread count (default: PXFORMS_THREADS or all cores); must not
    /// change any result.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config end to end and write its report tree.
    Run {
        config: PathBuf,
        /// Override the [output] dir of the config.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run the deterministic property battery (inequalities + operator identities).
    Selftest {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Negative control: corrupt one constant so the battery must fail.
        #[arg(long, hide = true)]
        inject_violation: bool,
    },
    /// Emit plot-ready CSV tables from a run's report directory.
    Plots { report_dir: PathBuf },
    /// Mesh utilities.
    Mesh {
        #[command(subcommand)]
        command: MeshCommand,
    },
}

#[derive(Subcommand)]
enum MeshCommand {
    /// Generate a structured mesh (interval:m | square:m | cube:m | disk:rings,
    /// optional bounds like square:8:0,2,0,1) and write it as a mesh file.
    Gen { spec: String, out: PathBuf },
}

fn init_threads(requested: Option<usize>) {
    let n = requested.or_else(|| {
        std::env::var("PXFORMS_THREADS")
            .ok()
            .and_then(|v| v.parse::<usize>().ok())
    });
    if let Some(n) = n {
        if n > 0 {
            // ignore failure: the global pool can be built only once
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_threads(cli.threads);
    match cli.command {
        Command::Run { config, output } => {
            let text = match std::fs::read_to_string(&config) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: cannot read {}: {e}", config.display());
                    return ExitCode::from(1);
                }
            };
            let cfg = match Config::parse(&text) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(1);
                }
            };
            match pipeline::run(&cfg, output.as_deref()) {
                Ok(artifacts) => {
                    println!("report written to {}", artifacts.report_dir.display());
                    println!(
                        "converged = {} energy = {} gauge_residual = {} k0 = {}",
                        artifacts.solution.converged,
                        artifacts.solution.energy,
                        artifacts.coulomb.gauge_residual,
                        artifacts.regularity.k0
                    );
                    if !artifacts.solution.converged {
                        eprintln!("error: solver did not converge");
                        return ExitCode::from(2);
                    }
                    if let Some(a) = &artifacts.algebra {
                        if !a.pass {
                            eprintln!("error: algebraic inequality battery reported violations");
                            return ExitCode::from(3);
                        }
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
            }
        }
        Command::Selftest {
            seed,
            inject_violation,
        } => {
            let outcome = selftest::selftest(seed, inject_violation);
            print!("{}", outcome.report);
            if outcome.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(3)
            }
        }
        Command::Plots { report_dir } => match pipeline::emit_plot_data(&report_dir) {
            Ok(files) => {
                for f in files {
                    println!("wrote {}", f.display());
                }
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(1)
            }
        },
        Command::Mesh { command } => match command {
            MeshCommand::Gen { spec, out } => match pipeline::build_mesh_from_spec(&spec) {
                Ok(mesh) => match pxforms::io::write_mesh(&out, &mesh) {
                    Ok(()) => {
                        println!(
                            "wrote {} (dim {}, {} vertices, {} cells)",
                            out.display(),
                            mesh.dim(),
                            mesh.num_vertices(),
                            mesh.num_cells()
                        );
                        ExitCode::SUCCESS
                    }
                    Err(e) => {
                        eprintln!("error: {e}");
                        ExitCode::from(1)
                    }
                },
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
            },
        },
    }
}
