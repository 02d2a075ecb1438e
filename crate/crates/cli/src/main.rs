use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use finsmooth_cli::{run, Command, ExperimentConfig};

#[derive(Parser)]
#[command(name = "finsmooth", about = "Smoothing of asymmetric norms and extremals on Lie groups")]
struct Args {
    #[command(subcommand)]
    cmd: Sub,
    /// Experiment file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides [output] dir)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Also write SVG charts
    #[arg(long, global = true)]
    svg: bool,
    /// Sampling seed (overrides [output] seed)
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Clone, Copy)]
enum Sub {
    /// Tabulate the norm on the unit sphere and check its basic inequalities
    NormTable,
    /// Build the smoothed norms for every eps
    Smooth,
    /// Dual norm, maximizer and coadjoint field on the dual shell
    Dual,
    /// Integrate the vertical extremal and reconstruct the group curve
    Extremal,
    /// Run the eps sweep
    Converge,
    /// Run every suite
    Certify,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let Some(path) = args.config else {
        eprintln!("error: --config PATH is required");
        return ExitCode::from(3);
    };
    let mut cfg = match ExperimentConfig::load(&path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(3);
        }
    };
    if let Some(out) = args.out {
        cfg.out_dir = out;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    cfg.svg |= args.svg;
    eprint!("{}", cfg.to_ini());
    let cmd = match args.cmd {
        Sub::NormTable => Command::NormTable,
        Sub::Smooth => Command::Smooth,
        Sub::Dual => Command::Dual,
        Sub::Extremal => Command::Extremal,
        Sub::Converge => Command::Converge,
        Sub::Certify => Command::Certify,
    };
    match run(cmd, &cfg) {
        Ok(outcome) => {
            for line in outcome.summary_lines() {
                println!("{line}");
            }
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(e) => {
            println!("FAIL\t{}\t{e}", cmd.name());
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
