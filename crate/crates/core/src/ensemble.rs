//! Trajectory ensembles: deterministic parallel batches with streaming
//! statistics, terminal classification, and a bootstrap interval for the
//! dark-state fraction.
//!
//! Reproducibility contract: trajectory `i` always runs on the stream
//! `derive_seed(master_seed, i)`, work is split into fixed 32-trajectory
//! chunks processed in index order within each chunk, and chunk aggregates
//! are merged sequentially in chunk order. Floating-point accumulation
//! order is therefore a function of `n` alone — results are bit-identical
//! for any worker count.

use crate::lindblad::DensityMatrix;
use crate::measures::{classify_terminal, convergence_time, ClassifyThresholds, MeasureError, TerminalClass};
use crate::model::WaveguideModel;
use crate::qmat::CMatrix;
use crate::trajectories::{
    derive_seed, simulate_trajectory, RngStream, TrajectoryError, TrajectoryRecord, UnravelingMode,
};
use rayon::prelude::*;
use thiserror::Error;

/// Trajectories per work chunk. Fixed by the determinism contract — do not
/// derive it from the worker count.
const CHUNK: usize = 32;
/// Full records kept for per-trajectory output when `n` is large.
const KEEP_MAX: usize = 64;
/// Bootstrap resample count for the dark-state-fraction interval.
const BOOTSTRAP_RESAMPLES: usize = 200;
/// Stream index of the bootstrap generator under the master seed ("bootstra"
/// in ASCII) — far outside any realistic trajectory index.
const BOOTSTRAP_TAG: u64 = 0x626F_6F74_7374_7261;

#[derive(Debug, Error)]
pub enum EnsembleError {
    #[error("trajectory {index} failed: {source}")]
    Trajectory { index: usize, source: TrajectoryError },
    #[error("classification of trajectory {index} failed: {source}")]
    Classify { index: usize, source: MeasureError },
    #[error("record {index} carries no stored states")]
    MissingStates { index: usize },
    #[error("record {index} is on a different time grid")]
    MismatchedGrids { index: usize },
    #[error("ensemble needs at least one trajectory")]
    Empty,
    #[error("failed to build a worker pool: {0}")]
    Pool(String),
}

/// How to run a batch; see [`run_ensemble`].
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleOptions {
    pub mode: UnravelingMode,
    /// Step and grid spacing, `T₁` units.
    pub dt: f64,
    pub t_max: f64,
    pub n_trajectories: usize,
    pub master_seed: u64,
    /// Worker threads; 0 means the global default pool.
    pub workers: usize,
    pub thresholds: ClassifyThresholds,
    /// Whether kept records retain their full state history (the streaming
    /// statistics are unaffected — they always see every state).
    pub store_states: bool,
}

/// Aggregated outcome of an ensemble run. Vectors indexed by grid point run
/// over `times`; vectors indexed by trajectory run over `0..n_trajectories`.
#[derive(Debug, Clone)]
pub struct EnsembleResult {
    pub times: Vec<f64>,
    pub mean_concurrence: Vec<f64>,
    /// Standard error of the mean concurrence, per grid point.
    pub stderr_concurrence: Vec<f64>,
    /// Ensemble-averaged conditioned state, per grid point (plain average;
    /// each sample has unit trace already).
    pub mean_state: Vec<CMatrix>,
    /// Frobenius-aggregated standard error of `mean_state`, per grid point:
    /// `√(Σ_entries Var(entry)/n)`. An upper bound for the trace-distance
    /// uncertainty of the mean.
    pub stderr_frobenius: Vec<f64>,
    pub classifications: Vec<TerminalClass>,
    pub convergence_times: Vec<Option<f64>>,
    pub terminal_concurrence: Vec<f64>,
    /// Fraction of trajectories classified [`TerminalClass::PsiMinusLike`].
    pub psi_minus_fraction: f64,
    /// Percentile bootstrap 95% interval for that fraction
    /// ([`BOOTSTRAP_RESAMPLES`] resamples, nearest-rank 2.5%/97.5%).
    pub psi_minus_ci: (f64, f64),
    /// Full records for the first `min(n, 64)` trajectories.
    pub kept_records: Vec<TrajectoryRecord>,
    pub n_trajectories: usize,
    pub master_seed: u64,
}

impl EnsembleResult {
    pub fn count(&self, class: TerminalClass) -> usize {
        self.classifications.iter().filter(|c| **c == class).count()
    }
}

struct ChunkAgg {
    sum_c: Vec<f64>,
    sum_c2: Vec<f64>,
    sum_state: Vec<CMatrix>,
    sum_abs2: Vec<Vec<f64>>,
    per_traj: Vec<(TerminalClass, Option<f64>, f64)>,
    kept: Vec<TrajectoryRecord>,
    times: Option<Vec<f64>>,
}

impl ChunkAgg {
    fn new(grid: usize, dim: usize) -> Self {
        ChunkAgg {
            sum_c: vec![0.0; grid],
            sum_c2: vec![0.0; grid],
            sum_state: vec![CMatrix::zeros(dim); grid],
            sum_abs2: vec![vec![0.0; dim * dim]; grid],
            per_traj: Vec::new(),
            kept: Vec::new(),
            times: None,
        }
    }

    fn absorb(
        &mut self,
        record: TrajectoryRecord,
        keep: bool,
        strip_states: bool,
        thresholds: &ClassifyThresholds,
    ) -> Result<(), MeasureError> {
        let states = record.states.as_ref().expect("ensemble always simulates with states");
        for (g, (obs, state)) in record.observables.iter().zip(states).enumerate() {
            let c = obs.concurrence;
            self.sum_c[g] += c;
            self.sum_c2[g] += c * c;
            self.sum_state[g] = self.sum_state[g].add(state.matrix());
            for (slot, z) in self.sum_abs2[g].iter_mut().zip(state.matrix().data()) {
                *slot += z.norm_sqr();
            }
        }
        // a record too short to classify counts as unconverged: no verdict
        // is possible, and aborting the whole batch over it helps no one
        let class = match classify_terminal(&record, thresholds) {
            Ok(c) => c,
            Err(MeasureError::RecordTooShort { .. }) => TerminalClass::Unconverged,
            Err(e) => return Err(e),
        };
        let conv = convergence_time(&record);
        let terminal_c = record.observables.last().expect("nonempty record").concurrence;
        self.per_traj.push((class, conv, terminal_c));
        if self.times.is_none() {
            self.times = Some(record.times.clone());
        }
        if keep {
            let mut kept = record;
            if strip_states {
                kept.states = None;
            }
            self.kept.push(kept);
        }
        Ok(())
    }

    fn merge(&mut self, other: ChunkAgg) {
        for g in 0..self.sum_c.len() {
            self.sum_c[g] += other.sum_c[g];
            self.sum_c2[g] += other.sum_c2[g];
            self.sum_state[g] = self.sum_state[g].add(&other.sum_state[g]);
            for (a, b) in self.sum_abs2[g].iter_mut().zip(&other.sum_abs2[g]) {
                *a += b;
            }
        }
        self.per_traj.extend(other.per_traj);
        self.kept.extend(other.kept);
        if self.times.is_none() {
            self.times = other.times;
        }
    }
}

/// Runs `n` independent trajectories and aggregates them. Fail-fast: the
/// first failing trajectory (lowest index) aborts the run with its index.
pub fn run_ensemble(
    model: &WaveguideModel,
    rho0: &DensityMatrix,
    options: &EnsembleOptions,
) -> Result<EnsembleResult, EnsembleError> {
    let n = options.n_trajectories;
    if n == 0 {
        return Err(EnsembleError::Empty);
    }
    let grid = (options.t_max / options.dt).round() as usize + 1;
    let dim = rho0.dim();
    let keep_k = n.min(KEEP_MAX);

    let chunk_bounds: Vec<(usize, usize)> =
        (0..n).step_by(CHUNK).map(|s| (s, (s + CHUNK).min(n))).collect();

    let run_chunk = |&(start, end): &(usize, usize)| -> Result<ChunkAgg, EnsembleError> {
        let mut agg = ChunkAgg::new(grid, dim);
        for i in start..end {
            let record = simulate_trajectory(
                model,
                rho0,
                options.mode,
                options.dt,
                options.t_max,
                derive_seed(options.master_seed, i as u64),
                true,
            )
            .map_err(|source| EnsembleError::Trajectory { index: i, source })?;
            agg.absorb(record, i < keep_k, !options.store_states, &options.thresholds)
                .map_err(|source| EnsembleError::Classify { index: i, source })?;
        }
        Ok(agg)
    };

    let chunk_results: Vec<Result<ChunkAgg, EnsembleError>> = if options.workers == 0 {
        chunk_bounds.par_iter().map(run_chunk).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(options.workers)
            .build()
            .map_err(|e| EnsembleError::Pool(e.to_string()))?;
        pool.install(|| chunk_bounds.par_iter().map(run_chunk).collect())
    };

    // merge in chunk order: deterministic, and the first error reported is
    // the one with the lowest trajectory index
    let mut total = ChunkAgg::new(grid, dim);
    for result in chunk_results {
        total.merge(result?);
    }

    let nf = n as f64;
    let mean_concurrence: Vec<f64> = total.sum_c.iter().map(|s| s / nf).collect();
    let stderr_concurrence: Vec<f64> = total
        .sum_c2
        .iter()
        .zip(&mean_concurrence)
        .map(|(s2, m)| sample_stderr(*s2, *m, n))
        .collect();
    let mean_state: Vec<CMatrix> =
        total.sum_state.iter().map(|s| s.scale_re(1.0 / nf)).collect();
    let stderr_frobenius: Vec<f64> = total
        .sum_abs2
        .iter()
        .zip(&mean_state)
        .map(|(abs2, mean)| {
            if n < 2 {
                return 0.0;
            }
            let var_sum: f64 = abs2
                .iter()
                .zip(mean.data())
                .map(|(s2, m)| ((s2 - nf * m.norm_sqr()) / (nf - 1.0)).max(0.0))
                .sum();
            (var_sum / nf).sqrt()
        })
        .collect();

    let classifications: Vec<TerminalClass> = total.per_traj.iter().map(|p| p.0).collect();
    let convergence_times: Vec<Option<f64>> = total.per_traj.iter().map(|p| p.1).collect();
    let terminal_concurrence: Vec<f64> = total.per_traj.iter().map(|p| p.2).collect();

    let dark = classifications.iter().filter(|c| **c == TerminalClass::PsiMinusLike).count();
    let psi_minus_fraction = dark as f64 / nf;
    let psi_minus_ci = bootstrap_fraction_ci(&classifications, options.master_seed);

    Ok(EnsembleResult {
        times: total.times.expect("n ≥ 1 guarantees a grid"),
        mean_concurrence,
        stderr_concurrence,
        mean_state,
        stderr_frobenius,
        classifications,
        convergence_times,
        terminal_concurrence,
        psi_minus_fraction,
        psi_minus_ci,
        kept_records: total.kept,
        n_trajectories: n,
        master_seed: options.master_seed,
    })
}

fn sample_stderr(sum2: f64, mean: f64, n: usize) -> f64 {
    if n < 2 {
        return 0.0;
    }
    let nf = n as f64;
    let var = ((sum2 - nf * mean * mean) / (nf - 1.0)).max(0.0);
    (var / nf).sqrt()
}

/// Percentile bootstrap for the `PsiMinusLike` fraction. Uses its own
/// deterministic stream at index [`BOOTSTRAP_TAG`] under the master seed.
fn bootstrap_fraction_ci(classifications: &[TerminalClass], master_seed: u64) -> (f64, f64) {
    let n = classifications.len();
    let mut rng = RngStream::new(derive_seed(master_seed, BOOTSTRAP_TAG));
    let mut fractions: Vec<f64> = (0..BOOTSTRAP_RESAMPLES)
        .map(|_| {
            let mut dark = 0usize;
            for _ in 0..n {
                let idx = ((rng.uniform() * n as f64) as usize).min(n - 1);
                dark += (classifications[idx] == TerminalClass::PsiMinusLike) as usize;
            }
            dark as f64 / n as f64
        })
        .collect();
    fractions.sort_by(|a, b| a.partial_cmp(b).expect("fractions are finite"));
    // nearest-rank percentiles: 2.5% → 5th of 200, 97.5% → 195th of 200
    let lo = fractions[(0.025f64 * BOOTSTRAP_RESAMPLES as f64).ceil() as usize - 1];
    let hi = fractions[(0.975f64 * BOOTSTRAP_RESAMPLES as f64).ceil() as usize - 1];
    (lo, hi)
}

/// Pointwise average of the stored states of a record batch. Fails if any
/// record lacks states or sits on a different grid.
pub fn mean_state_series(records: &[TrajectoryRecord]) -> Result<Vec<CMatrix>, EnsembleError> {
    let first = records.first().ok_or(EnsembleError::Empty)?;
    let grid = first.times.len();
    let dim = first
        .states
        .as_ref()
        .and_then(|s| s.first())
        .ok_or(EnsembleError::MissingStates { index: 0 })?
        .dim();
    let mut sums: Vec<CMatrix> = vec![CMatrix::zeros(dim); grid];
    for (index, record) in records.iter().enumerate() {
        if record.times != first.times {
            return Err(EnsembleError::MismatchedGrids { index });
        }
        let states = record.states.as_ref().ok_or(EnsembleError::MissingStates { index })?;
        for (g, s) in states.iter().enumerate() {
            sums[g] = sums[g].add(s.matrix());
        }
    }
    let nf = records.len() as f64;
    Ok(sums.into_iter().map(|s| s.scale_re(1.0 / nf)).collect())
}
