//! Conditional evolution under continuous monitoring of the two waveguide
//! ports: photon counting (quantum jumps) and balanced homodyne detection.
//!
//! Both unravelings advance by completely positive Kraus steps built from
//! the exact exponentials `U₀ = e^{−iH̃₀dt/γ}` and `E = e^{−J²dt}` (times in
//! `T₁ = 1/γ` units), so states stay physical for any step size the
//! validator accepts; the first-order expansion of each step reproduces the
//! usual conditional master equations.
//!
//! Randomness comes from a counter-based generator: every trajectory owns a
//! stream derived from `(master_seed, trajectory_index)` and consumes draws
//! in a fixed documented order, which makes every run reproducible to the
//! byte regardless of thread count.

use crate::lindblad::{DensityMatrix, StateError};
use crate::measures;
use crate::model::WaveguideModel;
use crate::qmat::{herm_eig, herm_exp, CMatrix, QmatError, StateVector, C64};
use thiserror::Error;

/// Largest accepted step, in `T₁` units (same cap as the unconditional
/// integrator).
pub const MAX_STEP_T1: f64 = 0.01;
/// Hard ceiling on the per-step click probability; beyond this the
/// first-order counting statistics are meaningless.
pub const MAX_CLICK_PROBABILITY: f64 = 0.1;
/// Homodyne positivity guard. The Kraus construction keeps states positive
/// to rounding; a dip past this floor means the step is being misused.
const HOMODYNE_EIG_FLOOR: f64 = -1e-4;

#[derive(Debug, Error, PartialEq)]
pub enum TrajectoryError {
    #[error("step {dt} T₁ out of range: must be positive and ≤ {MAX_STEP_T1} T₁")]
    StepTooLarge { dt: f64 },
    #[error(
        "click probability {p_click:.3} at t = {t} T₁ exceeds {MAX_CLICK_PROBABILITY} — reduce dt"
    )]
    DtTooLarge { p_click: f64, t: f64 },
    #[error("conditioned state lost positivity at t = {t} T₁ (min eigenvalue {min_eigenvalue:.3e})")]
    PositivityLost { min_eigenvalue: f64, t: f64 },
    #[error(transparent)]
    Numeric(#[from] QmatError),
    #[error(transparent)]
    State(#[from] StateError),
}

// ---------------------------------------------------------------------------
// Deterministic random stream

const GOLDEN: u64 = 0x9E3779B97F4A7C15;

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Counter-based uniform/Gaussian source. Output `i` is a pure function of
/// `(seed, i)`, so streams can be recreated, split, and compared across
/// runs and platforms.
#[derive(Debug, Clone, PartialEq)]
pub struct RngStream {
    seed: u64,
    counter: u64,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        RngStream { seed, counter: 0 }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.counter += 1;
        mix64(self.seed.wrapping_add(self.counter.wrapping_mul(GOLDEN)))
    }

    /// Uniform in `[0, 1)` with 53-bit resolution.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal via the cosine Box–Muller branch. Always consumes
    /// exactly two uniforms and never caches, keeping draw counts static.
    pub fn normal(&mut self) -> f64 {
        let u1 = self.uniform();
        let u2 = self.uniform();
        (-2.0 * (1.0 - u1).ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    pub fn draws(&self) -> u64 {
        self.counter
    }
}

/// Stream seed for trajectory `index` under a master seed. Deterministic and
/// collision-resistant: two mixing rounds keep nearby indices statistically
/// independent.
pub fn derive_seed(master_seed: u64, index: u64) -> u64 {
    mix64(master_seed ^ mix64(index.wrapping_add(1).wrapping_mul(GOLDEN)))
}

// ---------------------------------------------------------------------------
// Records

/// Output port of the waveguide.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    Left,
    Right,
}

impl std::fmt::Display for Channel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Channel::Left => "left",
            Channel::Right => "right",
        })
    }
}

/// A photon detection. `t` is the grid time at which the post-click state
/// first appears (the end of the step during which the detector fired).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClickEvent {
    pub t: f64,
    pub channel: Channel,
}

/// One step of homodyne photocurrent, `I_λ = dy_λ/dt`, labeled by the start
/// of its integration interval. Unmonitored channels read exactly zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurrentSample {
    pub t: f64,
    pub left: f64,
    pub right: f64,
}

/// Which conditional evolution to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnravelingMode {
    /// Photon counting on both ports.
    Jump,
    /// Balanced homodyne detection of the port quadratures.
    Homodyne,
}

impl std::fmt::Display for UnravelingMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            UnravelingMode::Jump => "jump",
            UnravelingMode::Homodyne => "homodyne",
        })
    }
}

/// Everything one monitored run produces. `times` holds the full sample grid
/// `t_i = i·dt`; `observables` has one entry per grid point; `states` is
/// kept when requested (the derived observables are always enough for the
/// shipped outputs). Clicks and currents are filled according to the mode.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub mode: UnravelingMode,
    pub dt: f64,
    pub seed: u64,
    pub times: Vec<f64>,
    pub observables: Vec<measures::ObservableSet>,
    pub states: Option<Vec<DensityMatrix>>,
    pub clicks: Vec<ClickEvent>,
    pub currents: Vec<CurrentSample>,
}

// ---------------------------------------------------------------------------
// Step kernels

/// Precomputed step operators for one `(model, dt)` pair. Building these
/// costs two eigendecompositions; every step after that is plain matrix
/// arithmetic.
#[derive(Debug, Clone)]
pub struct StepContext {
    dt: f64,
    /// `J`
    j: CMatrix,
    /// `J²`
    jsq: CMatrix,
    /// `U₀ = e^{−iH̃₀dt/γ}` — the step's Hamiltonian rotation
    u0: CMatrix,
    /// `K = U₀·e^{−J²dt}` — the no-click / deterministic Kraus factor
    k: CMatrix,
    /// `K·J` — feed and readout operator (J commutes with `e^{−J²dt}`)
    kj: CMatrix,
    /// detector efficiencies (left, right)
    eta: [f64; 2],
    /// homodyne gains `b_λ = √η_λ`
    b: [f64; 2],
}

impl StepContext {
    pub fn new(model: &WaveguideModel, dt: f64) -> Result<Self, TrajectoryError> {
        if !(dt > 0.0 && dt.is_finite()) || dt > MAX_STEP_T1 {
            return Err(TrajectoryError::StepTooLarge { dt });
        }
        let j = model.jump_operator();
        let jsq = j.matmul(&j);
        let h_t1 = model.hamiltonian().scale_re(1.0 / model.gamma);
        let u0 = herm_exp(&h_t1, C64::new(0.0, -dt))?;
        let decay = herm_exp(&jsq, C64::new(-dt, 0.0))?;
        let k = u0.matmul(&decay);
        let kj = k.matmul(&j);
        let eta = model.efficiencies();
        Ok(StepContext { dt, j, jsq, u0, k, kj, eta, b: [eta[0].sqrt(), eta[1].sqrt()] })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// One photon-counting step. Consumes exactly two uniforms (left then
    /// right). On a click the state jumps through `J` — simultaneous clicks
    /// compose left-then-right — and then rotates by `U₀`; otherwise the
    /// no-click Kraus map with the unmonitored-photon feed applies.
    pub fn jump_step(
        &self,
        rho: &CMatrix,
        t: f64,
        rng: &mut RngStream,
    ) -> Result<(CMatrix, [bool; 2]), TrajectoryError> {
        let rate = real_expect(&self.jsq, rho); // Tr(J²ρ) = Σ_λ click rate / η_λ
        let mut clicks = [false; 2];
        for (lam, click) in clicks.iter_mut().enumerate() {
            let p = self.eta[lam] * rate * self.dt;
            if p >= MAX_CLICK_PROBABILITY {
                return Err(TrajectoryError::DtTooLarge { p_click: p, t });
            }
            *click = rng.uniform() < p;
        }
        let next = if clicks[0] || clicks[1] {
            let mut s = rho.clone();
            for &fired in &clicks {
                if fired {
                    s = self.j.matmul(&s).matmul(&self.j);
                    s = s.scale_re(1.0 / s.trace().re);
                }
            }
            // the step's Hamiltonian rotation still happens on click steps
            self.u0.matmul(&s).matmul(&self.u0.adjoint())
        } else {
            let main = self.k.matmul(rho).matmul(&self.k.adjoint());
            let feed = self.kj.matmul(rho).matmul(&self.kj.adjoint());
            let feed_weight = ((1.0 - self.eta[0]) + (1.0 - self.eta[1])) * self.dt;
            main.add(&feed.scale_re(feed_weight))
        };
        let sym = next.symmetrize();
        Ok((sym.scale_re(1.0 / sym.trace().re), clicks))
    }

    /// One homodyne step. Draws one Gaussian increment per *monitored*
    /// channel (η > 0), left then right; unmonitored channels contribute the
    /// averaged feed instead. Returns the new state and the two measurement
    /// increments `dy_λ` (zero on unmonitored channels).
    pub fn homodyne_step(
        &self,
        rho: &CMatrix,
        t: f64,
        rng: &mut RngStream,
    ) -> Result<(CMatrix, [f64; 2]), TrajectoryError> {
        let mean_j = real_expect(&self.j, rho);
        let mut dy = [0.0; 2];
        let mut gain = 0.0;
        for lam in 0..2 {
            if self.eta[lam] > 0.0 {
                let dw = rng.normal() * self.dt.sqrt();
                dy[lam] = 2.0 * self.b[lam] * mean_j * self.dt + dw;
                gain += self.b[lam] * dy[lam];
            }
        }
        let m = self.k.add(&self.kj.scale_re(gain));
        let main = m.matmul(rho).matmul(&m.adjoint());
        let feed = self.kj.matmul(rho).matmul(&self.kj.adjoint());
        let feed_weight = ((1.0 - self.eta[0]) + (1.0 - self.eta[1])) * self.dt;
        let sym = main.add(&feed.scale_re(feed_weight)).symmetrize();
        let next = sym.scale_re(1.0 / sym.trace().re);
        if min_eigenvalue_below(&next, HOMODYNE_EIG_FLOOR) {
            let (w, _) = herm_eig(&next)?;
            return Err(TrajectoryError::PositivityLost {
                min_eigenvalue: *w.last().expect("nonempty spectrum"),
                t,
            });
        }
        Ok((next, dy))
    }
}

/// `Tr(op·ρ)` for Hermitian `op`, Hermitian `ρ` — real by construction.
fn real_expect(op: &CMatrix, rho: &CMatrix) -> f64 {
    let n = op.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            let a = op.get(i, j);
            let b = rho.get(j, i);
            s += a.re * b.re - a.im * b.im;
        }
    }
    s
}

/// Fast check that the minimum eigenvalue is below `floor`, via Cholesky of
/// `m − floor·1` (PSD ⟺ min eig ≥ floor). Costs O(n³/3) with no iteration.
fn min_eigenvalue_below(m: &CMatrix, floor: f64) -> bool {
    let n = m.dim();
    let mut l = vec![C64::new(0.0, 0.0); n * n];
    for k in 0..n {
        let mut pivot = m.get(k, k).re - floor;
        for j in 0..k {
            pivot -= l[k * n + j].norm_sqr();
        }
        if pivot <= 0.0 {
            return true;
        }
        let root = pivot.sqrt();
        l[k * n + k] = C64::new(root, 0.0);
        for i in k + 1..n {
            let mut v = m.get(i, k);
            for j in 0..k {
                v -= l[i * n + j] * l[k * n + j].conj();
            }
            l[i * n + k] = v / root;
        }
    }
    false
}

// ---------------------------------------------------------------------------
// Public step functions (convenience wrappers building a one-shot context)

/// Single counting step; see [`StepContext::jump_step`]. For loops, build a
/// [`StepContext`] once instead.
pub fn jump_step(
    model: &WaveguideModel,
    rho: &DensityMatrix,
    dt: f64,
    rng: &mut RngStream,
) -> Result<(DensityMatrix, [bool; 2]), TrajectoryError> {
    let ctx = StepContext::new(model, dt)?;
    let (m, clicks) = ctx.jump_step(rho.matrix(), 0.0, rng)?;
    Ok((DensityMatrix::from_matrix_unchecked(m), clicks))
}

/// Single homodyne step; see [`StepContext::homodyne_step`].
pub fn homodyne_step(
    model: &WaveguideModel,
    rho: &DensityMatrix,
    dt: f64,
    rng: &mut RngStream,
) -> Result<(DensityMatrix, [f64; 2]), TrajectoryError> {
    let ctx = StepContext::new(model, dt)?;
    let (m, dy) = ctx.homodyne_step(rho.matrix(), 0.0, rng)?;
    Ok((DensityMatrix::from_matrix_unchecked(m), dy))
}

/// Deterministic no-click evolution of a pure state: repeated application
/// of `U₀·e^{−J²dt}` with renormalization. Because the factors are exact
/// exponentials this reproduces the closed-form no-click state to rounding
/// accuracy when `ω̃ = 0`. Returns the state at every grid point.
pub fn no_jump_propagate(
    model: &WaveguideModel,
    psi0: &StateVector,
    dt: f64,
    t_max: f64,
) -> Result<Vec<(f64, StateVector)>, TrajectoryError> {
    let ctx = StepContext::new(model, dt)?;
    let n_steps = (t_max / dt).round() as usize;
    let mut out = Vec::with_capacity(n_steps + 1);
    let mut psi = psi0.normalized();
    out.push((0.0, psi.clone()));
    for i in 0..n_steps {
        psi = ctx.k.apply(&psi).normalized();
        out.push(((i + 1) as f64 * dt, psi.clone()));
    }
    Ok(out)
}

/// Runs one conditioned trajectory on the grid `t_i = i·dt`, `i = 0..=n`,
/// with `n = round(t_max/dt)`. The random stream is `RngStream::new(seed)`
/// and is consumed in a fixed order (jump: two uniforms per step; homodyne:
/// one Gaussian per monitored channel per step, left before right).
pub fn simulate_trajectory(
    model: &WaveguideModel,
    rho0: &DensityMatrix,
    mode: UnravelingMode,
    dt: f64,
    t_max: f64,
    seed: u64,
    store_states: bool,
) -> Result<TrajectoryRecord, TrajectoryError> {
    let ctx = StepContext::new(model, dt)?;
    let n_steps = (t_max / dt).round() as usize;
    let mut rng = RngStream::new(seed);

    let mut times = Vec::with_capacity(n_steps + 1);
    let mut observables = Vec::with_capacity(n_steps + 1);
    let mut states = store_states.then(|| Vec::with_capacity(n_steps + 1));
    let mut clicks = Vec::new();
    let mut currents = Vec::with_capacity(if mode == UnravelingMode::Homodyne {
        n_steps
    } else {
        0
    });

    let mut rho = rho0.matrix().clone();
    let record_point =
        |t: f64,
         rho: &CMatrix,
         times: &mut Vec<f64>,
         observables: &mut Vec<measures::ObservableSet>,
         states: &mut Option<Vec<DensityMatrix>>|
         -> Result<(), TrajectoryError> {
            let dm = DensityMatrix::from_matrix_unchecked(rho.clone());
            observables.push(measures::observables(&dm)?);
            if let Some(v) = states {
                v.push(dm);
            }
            times.push(t);
            Ok(())
        };

    record_point(0.0, &rho, &mut times, &mut observables, &mut states)?;
    for i in 0..n_steps {
        let t_start = i as f64 * dt;
        let t_end = (i + 1) as f64 * dt;
        match mode {
            UnravelingMode::Jump => {
                let (next, fired) = ctx.jump_step(&rho, t_start, &mut rng)?;
                rho = next;
                for (lam, channel) in [(0, Channel::Left), (1, Channel::Right)] {
                    if fired[lam] {
                        clicks.push(ClickEvent { t: t_end, channel });
                    }
                }
            }
            UnravelingMode::Homodyne => {
                let (next, dy) = ctx.homodyne_step(&rho, t_start, &mut rng)?;
                rho = next;
                currents.push(CurrentSample {
                    t: t_start,
                    left: dy[0] / dt,
                    right: dy[1] / dt,
                });
            }
        }
        record_point(t_end, &rho, &mut times, &mut observables, &mut states)?;
    }

    Ok(TrajectoryRecord { mode, dt, seed, times, observables, states, clicks, currents })
}
