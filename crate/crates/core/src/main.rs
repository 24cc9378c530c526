use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use antibp::experiment::{
    cmd_ablation, cmd_compare, cmd_export, cmd_gradvar, cmd_run, cmd_sweep_depth, ExpResult,
    ExperimentConfig, ExperimentError, ExportKind, SummaryTable,
};

#[derive(Parser)]
#[command(name = "antibp", version, about = "Gated-circuit VQE experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Config file of `key = value` lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Single seed (replaces the config's seed list).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Comma-separated seed list.
    #[arg(long, global = true)]
    seeds: Option<String>,
    #[arg(long, global = true)]
    depth: Option<usize>,
    /// vanilla, idblock, antibp or randomprune.
    #[arg(long, global = true)]
    method: Option<String>,
    /// Depolarizing probability for every gate.
    #[arg(long, global = true)]
    noise_p: Option<f64>,
    /// Trajectories per noisy training step.
    #[arg(long, global = true)]
    trajectories: Option<usize>,
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// `h2`, `tfim:<n>:<J>:<h>`, or a Pauli-sum file.
    #[arg(long, global = true)]
    hamiltonian: Option<String>,
    /// Comma-separated depth list.
    #[arg(long, global = true)]
    depths: Option<String>,
    /// Comma-separated method list.
    #[arg(long, global = true)]
    methods: Option<String>,
    /// Any config key, e.g. `--set optimizer.lr=0.02`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one method for every seed.
    Run,
    /// Run methods across depths and aggregate medians.
    SweepDepth,
    /// Gradient variance against depth.
    Gradvar {
        #[arg(long)]
        samples: Option<usize>,
    },
    /// AntiBP against matched random pruning.
    Ablation,
    /// Table of all methods under one noise setting.
    Compare,
    /// Write a circuit, Hamiltonian or SVG plot.
    Export {
        #[arg(value_enum)]
        kind: Kind,
        /// Sweep CSV for `svg` (default `<out_dir>/sweep_depth.csv`).
        #[arg(long)]
        input: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Circuit,
    Hamiltonian,
    Svg,
}

fn build_config(c: &Common) -> ExpResult<ExperimentConfig> {
    let mut cfg = ExperimentConfig::default();
    if let Some(path) = &c.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ExperimentError::Config(format!("{}: {e}", path.display())))?;
        cfg.apply_text(&text)?;
    }
    let flags = [
        ("seed", c.seed.map(|v| v.to_string())),
        ("seeds", c.seeds.clone()),
        ("depth", c.depth.map(|v| v.to_string())),
        ("method", c.method.clone()),
        ("noise.p", c.noise_p.map(|v| v.to_string())),
        ("noise.trajectories", c.trajectories.map(|v| v.to_string())),
        ("hamiltonian", c.hamiltonian.clone()),
        ("depths", c.depths.clone()),
        ("methods", c.methods.clone()),
    ];
    for (k, v) in flags {
        if let Some(v) = v {
            cfg.set(k, &v)?;
        }
    }
    for kv in &c.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| ExperimentError::Config(format!("--set expects KEY=VALUE, got {kv:?}")))?;
        cfg.set(k.trim(), v.trim())?;
    }
    if let Some(dir) = &c.out_dir {
        cfg.out_dir = dir.clone();
    }
    Ok(cfg)
}

fn execute(cli: Cli) -> ExpResult<()> {
    let mut cfg = build_config(&cli.common)?;
    match cli.command {
        Command::Run => print!("{}", SummaryTable(&cmd_run(&cfg)?)),
        Command::SweepDepth => {
            for r in cmd_sweep_depth(&cfg)? {
                println!(
                    "depth {:>4}  {:<12} median energy {:.6}  gap {:.6}",
                    r.depth,
                    r.method.name(),
                    r.median_energy,
                    r.median_gap
                );
            }
        }
        Command::Gradvar { samples } => {
            if let Some(s) = samples {
                cfg.samples = s;
            }
            for r in cmd_gradvar(&cfg)? {
                println!("depth {:>4}  variance {:.6e}", r.depth, r.variance);
            }
        }
        Command::Ablation => {
            for r in cmd_ablation(&cfg)? {
                println!(
                    "seed {:>3}  gates {}/{}  antibp {:.6}  randomprune {:.6}",
                    r.seed, r.n_1q, r.n_2q, r.antibp_energy, r.randomprune_energy
                );
            }
        }
        Command::Compare => print!("{}", SummaryTable(&cmd_compare(&cfg)?)),
        Command::Export { kind, input } => {
            let kind = match kind {
                Kind::Circuit => ExportKind::Circuit,
                Kind::Hamiltonian => ExportKind::Hamiltonian,
                Kind::Svg => ExportKind::Svg,
            };
            for p in cmd_export(&cfg, kind, input.as_deref())? {
                println!("{}", p.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
