//! Runs a configured experiment and writes its outputs: per-trajectory
//! CSV files, the ensemble summary, terminal classifications, and a
//! manifest that reproduces the run.
//!
//! All numeric CSV fields are printed with 12 significant digits, so two
//! runs of the same configuration produce byte-identical files regardless
//! of worker count.

use crate::config::{RunMode, SimConfig};
use crate::ensemble::{run_ensemble, EnsembleError, EnsembleOptions, EnsembleResult};
use crate::lindblad::{evolve, steady_state_residual, DensityMatrix, LindbladError};
use crate::measures::observables;
use crate::model::{named_state, WaveguideModel};
use crate::oracles::{homodyne_mean_concurrence, no_click_concurrence, no_click_state, steady_state_rho};
use crate::qmat::QmatError;
use crate::trajectories::{derive_seed, TrajectoryRecord, UnravelingMode};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Config(#[from] crate::config::ConfigError),
    #[error(transparent)]
    Ensemble(#[from] EnsembleError),
    #[error(transparent)]
    Lindblad(#[from] LindbladError),
    #[error(transparent)]
    Numeric(#[from] QmatError),
}

/// Files written plus a short human-readable report.
#[derive(Debug)]
pub struct RunSummary {
    pub files: Vec<PathBuf>,
    pub report: String,
}

/// Formats with 12 significant digits; `-0` normalizes to `0` so equal
/// values always print identically.
fn sig12(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.11e}")
}

const BASE_HEADER: &str = "t,concurrence,p00,p11,p22,p33,re_rho03,im_rho03,re_rho12,im_rho12,\
                           f_psi_plus,f_psi_minus,f_phi_plus,f_phi_minus,purity";

/// Executes `cfg`, writing everything into `out_dir` (created if missing).
/// `workers = 0` uses the default thread pool; any positive count gives
/// byte-identical output.
pub fn run_experiment(
    cfg: &SimConfig,
    out_dir: &Path,
    workers: usize,
) -> Result<RunSummary, ExperimentError> {
    cfg.validate()?;
    std::fs::create_dir_all(out_dir)?;
    let model = cfg.model();
    let mut files = Vec::new();
    let mut report = format!("mode = {}\n", cfg.mode);

    let manifest = format!(
        "# bellwave {}\n# run manifest: parses back into the configuration that produced this directory\n{}",
        env!("CARGO_PKG_VERSION"),
        cfg.to_config_text()
    );
    files.push(write_file(out_dir, "manifest.txt", &manifest)?);

    match cfg.mode {
        RunMode::OracleCheck => {
            files.push(write_oracle_table(cfg, &model, out_dir)?);
            report.push_str("wrote the closed-form reference curves\n");
        }
        RunMode::Lindblad => {
            let rho0 = DensityMatrix::from_pure(&named_state(cfg.initial));
            let flow = evolve(&model, &rho0, cfg.dt, cfg.t_max)?;
            files.push(write_lindblad_trajectory(&flow, out_dir)?);
            files.push(write_lindblad_ensemble(&flow, out_dir)?);
            let last = &flow.last().expect("nonempty flow").1;
            let c = observables(last)?.concurrence;
            writeln!(report, "final concurrence = {}", sig12(c)).unwrap();
            writeln!(
                report,
                "steady-state residual of the final state = {}",
                sig12(steady_state_residual(&model, last))
            )
            .unwrap();
        }
        RunMode::Jump | RunMode::Homodyne => {
            let mode = cfg.mode.unraveling().expect("trajectory mode");
            let rho0 = DensityMatrix::from_pure(&named_state(cfg.initial));
            let options = EnsembleOptions {
                mode,
                dt: cfg.dt,
                t_max: cfg.t_max,
                n_trajectories: cfg.n_traj,
                master_seed: cfg.master_seed,
                workers,
                thresholds: cfg.thresholds(),
                store_states: cfg.store_states,
            };
            let result = run_ensemble(&model, &rho0, &options)?;
            for (k, record) in result.kept_records.iter().enumerate() {
                files.push(write_trajectory(record, mode, k, out_dir)?);
            }
            files.push(write_ensemble_summary(&result, out_dir)?);
            files.push(write_terminal_table(&result, out_dir)?);
            writeln!(report, "trajectories = {}", result.n_trajectories).unwrap();
            writeln!(
                report,
                "dark-state fraction = {:.4} (95% bootstrap {:.4}..{:.4})",
                result.psi_minus_fraction, result.psi_minus_ci.0, result.psi_minus_ci.1
            )
            .unwrap();
            let last = result.mean_concurrence.last().unwrap();
            writeln!(report, "mean final concurrence = {}", sig12(*last)).unwrap();
        }
    }

    writeln!(report, "wrote {} files to {}", files.len(), out_dir.display()).unwrap();
    Ok(RunSummary { files, report })
}

fn write_file(dir: &Path, name: &str, content: &str) -> Result<PathBuf, ExperimentError> {
    let path = dir.join(name);
    std::fs::write(&path, content)?;
    Ok(path)
}

fn base_row(t: f64, obs: &crate::measures::ObservableSet) -> String {
    let mut row = String::with_capacity(300);
    row.push_str(&sig12(t));
    for v in [obs.concurrence] {
        row.push(',');
        row.push_str(&sig12(v));
    }
    for p in obs.populations {
        row.push(',');
        row.push_str(&sig12(p));
    }
    for z in [obs.rho03, obs.rho12] {
        row.push(',');
        row.push_str(&sig12(z.re));
        row.push(',');
        row.push_str(&sig12(z.im));
    }
    for f in obs.bell_fidelities {
        row.push(',');
        row.push_str(&sig12(f));
    }
    row.push(',');
    row.push_str(&sig12(obs.purity));
    row
}

fn write_trajectory(
    record: &TrajectoryRecord,
    mode: UnravelingMode,
    index: usize,
    dir: &Path,
) -> Result<PathBuf, ExperimentError> {
    let n_rows = record.times.len();
    let mut out = String::with_capacity(n_rows * 320);
    match mode {
        UnravelingMode::Jump => {
            out.push_str(BASE_HEADER);
            out.push_str(",click_left,click_right\n");
            let mut flags = vec![(false, false); n_rows];
            for click in &record.clicks {
                let row = (click.t / record.dt).round() as usize;
                let slot = &mut flags[row.min(n_rows - 1)];
                match click.channel {
                    crate::trajectories::Channel::Left => slot.0 = true,
                    crate::trajectories::Channel::Right => slot.1 = true,
                }
            }
            for (i, (t, obs)) in record.times.iter().zip(&record.observables).enumerate() {
                out.push_str(&base_row(*t, obs));
                let (l, r) = flags[i];
                out.push_str(if l { ",1" } else { ",0" });
                out.push_str(if r { ",1" } else { ",0" });
                out.push('\n');
            }
        }
        UnravelingMode::Homodyne => {
            out.push_str(BASE_HEADER);
            out.push_str(",current_left,current_right\n");
            for (i, (t, obs)) in record.times.iter().zip(&record.observables).enumerate() {
                out.push_str(&base_row(*t, obs));
                // currents belong to the interval starting at this row;
                // the final grid point starts none, so its fields stay empty
                if let Some(sample) = record.currents.get(i) {
                    out.push(',');
                    out.push_str(&sig12(sample.left));
                    out.push(',');
                    out.push_str(&sig12(sample.right));
                } else {
                    out.push_str(",,");
                }
                out.push('\n');
            }
        }
    }
    write_file(dir, &format!("trajectory_{index}.csv"), &out)
}

fn write_lindblad_trajectory(
    flow: &[(f64, DensityMatrix)],
    dir: &Path,
) -> Result<PathBuf, ExperimentError> {
    let mut out = String::with_capacity(flow.len() * 300);
    out.push_str(BASE_HEADER);
    out.push('\n');
    for (t, state) in flow {
        let obs = observables(state).map_err(ExperimentError::Numeric)?;
        out.push_str(&base_row(*t, &obs));
        out.push('\n');
    }
    write_file(dir, "trajectory_0.csv", &out)
}

fn write_lindblad_ensemble(
    flow: &[(f64, DensityMatrix)],
    dir: &Path,
) -> Result<PathBuf, ExperimentError> {
    let mut out = String::from("t,mean_concurrence,stderr_concurrence\n");
    for (t, state) in flow {
        let c = observables(state).map_err(ExperimentError::Numeric)?.concurrence;
        out.push_str(&sig12(*t));
        out.push(',');
        out.push_str(&sig12(c));
        out.push_str(",0.00000000000e0\n");
    }
    write_file(dir, "ensemble.csv", &out)
}

fn write_ensemble_summary(
    result: &EnsembleResult,
    dir: &Path,
) -> Result<PathBuf, ExperimentError> {
    let mut out = String::from("t,mean_concurrence,stderr_concurrence\n");
    for (g, t) in result.times.iter().enumerate() {
        out.push_str(&sig12(*t));
        out.push(',');
        out.push_str(&sig12(result.mean_concurrence[g]));
        out.push(',');
        out.push_str(&sig12(result.stderr_concurrence[g]));
        out.push('\n');
    }
    write_file(dir, "ensemble.csv", &out)
}

fn write_terminal_table(result: &EnsembleResult, dir: &Path) -> Result<PathBuf, ExperimentError> {
    let mut out = String::from("index,seed,class,convergence_time,terminal_concurrence\n");
    for i in 0..result.n_trajectories {
        let conv = match result.convergence_times[i] {
            Some(t) => sig12(t),
            None => String::new(),
        };
        writeln!(
            out,
            "{i},{},{},{},{}",
            derive_seed(result.master_seed, i as u64),
            result.classifications[i],
            conv,
            sig12(result.terminal_concurrence[i]),
        )
        .unwrap();
    }
    write_file(dir, "terminal.csv", &out)
}

/// Long-format table of the closed-form references on the configured grid,
/// one `(quantity, t, value)` row per sample.
fn write_oracle_table(
    cfg: &SimConfig,
    model: &WaveguideModel,
    dir: &Path,
) -> Result<PathBuf, ExperimentError> {
    let n = (cfg.t_max / cfg.dt).round() as usize;
    let grid: Vec<f64> = (0..=n).map(|i| i as f64 * cfg.dt).collect();
    let mut out = String::from("quantity,t,value\n");
    // the analytic curves are expressed in physical time; the grid is in
    // units of T₁, so scale by 1/γ
    let gamma = model.gamma;
    for t in &grid {
        let psi = no_click_state(gamma, t / gamma);
        let amps = psi.amplitudes();
        writeln!(out, "no_click_state_gg,{},{}", sig12(*t), sig12(amps[0].re)).unwrap();
        writeln!(out, "no_click_state_ee,{},{}", sig12(*t), sig12(amps[3].re)).unwrap();
    }
    for t in &grid {
        writeln!(
            out,
            "no_click_concurrence,{},{}",
            sig12(*t),
            sig12(no_click_concurrence(gamma, t / gamma))
        )
        .unwrap();
    }
    for t in &grid {
        writeln!(
            out,
            "homodyne_mean_concurrence,{},{}",
            sig12(*t),
            sig12(homodyne_mean_concurrence(gamma, t / gamma))
        )
        .unwrap();
    }
    let rho0 = DensityMatrix::from_pure(&named_state(cfg.initial));
    let pinched = steady_state_rho(model, &rho0);
    writeln!(
        out,
        "steady_state_residual,{},{}",
        sig12(cfg.t_max),
        sig12(steady_state_residual(model, &pinched))
    )
    .unwrap();
    write_file(dir, "oracle.csv", &out)
}
