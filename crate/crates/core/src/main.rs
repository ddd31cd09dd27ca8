use bellwave::config::{find_preset, SimConfig, PRESETS};
use bellwave::experiment::run_experiment;
use clap::Parser;
use std::path::PathBuf;
use std::process::ExitCode;

/// Simulates a pair of distant qubits relaxing into a shared waveguide,
/// under photon counting or homodyne monitoring of the output ports.
#[derive(Parser)]
#[command(name = "bellwave", version, about)]
struct Cli {
    /// Path to a `key = value` configuration file.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,

    /// Named preset; see --list-presets.
    #[arg(long)]
    preset: Option<String>,

    /// Output directory (defaults to the configuration's output_dir;
    /// multi-run presets append a per-run subdirectory).
    #[arg(long)]
    out: Option<PathBuf>,

    /// Master seed override (multi-run presets offset it by the run index).
    #[arg(long)]
    seed: Option<u64>,

    /// Worker threads, 0 = all cores. Output is identical for any value.
    #[arg(long, default_value_t = 0)]
    workers: usize,

    /// Keep only observables in trajectory records, not full states.
    #[arg(long)]
    observables_only: bool,

    /// List the available presets and exit.
    #[arg(long)]
    list_presets: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    if cli.list_presets {
        for preset in &PRESETS {
            println!("{:-10} {}", preset.name, preset.summary);
        }
        return ExitCode::SUCCESS;
    }

    let runs: Vec<(String, SimConfig)> = if let Some(name) = &cli.preset {
        match find_preset(name) {
            Ok(preset) => {
                preset.configs().into_iter().map(|(sub, cfg)| (sub.to_string(), cfg)).collect()
            }
            Err(e) => {
                eprintln!("error: {e}");
                eprintln!("available presets: use --list-presets");
                return ExitCode::from(2);
            }
        }
    } else if let Some(path) = &cli.config {
        let text = match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: cannot read {}: {e}", path.display());
                return ExitCode::from(2);
            }
        };
        match SimConfig::parse(&text) {
            Ok(cfg) => vec![(String::new(), cfg)],
            Err(e) => {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
    } else {
        eprintln!("error: choose a run with --config <FILE> or --preset <NAME>");
        return ExitCode::from(2);
    };

    for (index, (sub, mut cfg)) in runs.into_iter().enumerate() {
        if let Some(seed) = cli.seed {
            cfg.master_seed = seed + index as u64;
        }
        if cli.observables_only {
            cfg.store_states = false;
        }
        let base = cli.out.clone().unwrap_or_else(|| PathBuf::from(&cfg.output_dir));
        let dir = if sub.is_empty() { base } else { base.join(&sub) };

        let label = if sub.is_empty() { "run".to_string() } else { format!("run {sub}") };
        println!("[bellwave] {label} -> {}", dir.display());
        match run_experiment(&cfg, &dir, cli.workers) {
            Ok(summary) => print!("{}", summary.report),
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::FAILURE;
            }
        }
    }
    ExitCode::SUCCESS
}
