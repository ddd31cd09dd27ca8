//! Run configuration: a flat `key = value` format, validated defaults, and
//! the named presets the CLI exposes.
//!
//! The same serialization round-trips through run manifests — a manifest
//! written by one run parses back into the identical configuration, so any
//! output directory carries everything needed to reproduce it.

use crate::measures::ClassifyThresholds;
use crate::model::{build_model, NamedState, Parity, WaveguideModel};
use crate::trajectories::UnravelingMode;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Malformed { line: usize, text: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key `{key}` given twice")]
    Duplicate { line: usize, key: String },
    #[error("line {line}: `{key}` cannot take the value `{value}`")]
    BadValue { line: usize, key: String, value: String },
    #[error("`{key}` out of range: {requirement}")]
    Range { key: &'static str, requirement: &'static str },
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
}

/// What the run computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunMode {
    /// Unconditioned master equation, one deterministic solution.
    Lindblad,
    /// Photon-counting trajectories.
    Jump,
    /// Homodyne trajectories.
    Homodyne,
    /// Tabulate the closed-form reference curves instead of simulating.
    OracleCheck,
}

impl RunMode {
    pub fn unraveling(self) -> Option<UnravelingMode> {
        match self {
            RunMode::Jump => Some(UnravelingMode::Jump),
            RunMode::Homodyne => Some(UnravelingMode::Homodyne),
            _ => None,
        }
    }
}

impl FromStr for RunMode {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "lindblad" => Ok(RunMode::Lindblad),
            "jump" => Ok(RunMode::Jump),
            "homodyne" => Ok(RunMode::Homodyne),
            "oracle_check" => Ok(RunMode::OracleCheck),
            _ => Err(()),
        }
    }
}

impl fmt::Display for RunMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RunMode::Lindblad => "lindblad",
            RunMode::Jump => "jump",
            RunMode::Homodyne => "homodyne",
            RunMode::OracleCheck => "oracle_check",
        })
    }
}

/// A complete, validated run description. Times are in units of `T₁ = 1/γ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub mode: RunMode,
    pub gamma: f64,
    pub omega_tilde: f64,
    pub kd_parity: Parity,
    pub eta_l: f64,
    pub eta_r: f64,
    pub dt: f64,
    pub t_max: f64,
    pub initial: NamedState,
    pub n_traj: usize,
    pub master_seed: u64,
    pub output_dir: String,
    pub store_states: bool,
    pub bell_threshold: f64,
    pub separable_threshold: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            mode: RunMode::Jump,
            gamma: 1.0,
            omega_tilde: 0.0,
            kd_parity: Parity::Even,
            eta_l: 1.0,
            eta_r: 1.0,
            dt: 0.005,
            t_max: default_t_max(RunMode::Jump),
            initial: NamedState::GG,
            n_traj: 1,
            master_seed: 1,
            output_dir: "out".to_string(),
            store_states: true,
            bell_threshold: 0.98,
            separable_threshold: 0.02,
        }
    }
}

fn default_t_max(mode: RunMode) -> f64 {
    match mode {
        RunMode::Jump => 6.0,
        RunMode::Homodyne | RunMode::Lindblad => 15.0,
        RunMode::OracleCheck => 10.0,
    }
}

impl SimConfig {
    /// Parses `key = value` text over the defaults. `#` starts a comment,
    /// blank lines are skipped, every key may appear once.
    pub fn parse(text: &str) -> Result<SimConfig, ConfigError> {
        let mut cfg = SimConfig::default();
        let mut seen: Vec<&str> = Vec::new();
        let mut t_max_given = false;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| ConfigError::Malformed {
                line,
                text: content.to_string(),
            })?;
            let key = key.trim();
            let value = value.trim();
            let canonical = KEYS
                .iter()
                .copied()
                .find(|k| *k == key)
                .ok_or_else(|| ConfigError::UnknownKey { line, key: key.to_string() })?;
            if seen.contains(&canonical) {
                return Err(ConfigError::Duplicate { line, key: key.to_string() });
            }
            seen.push(canonical);
            let bad = || ConfigError::BadValue {
                line,
                key: key.to_string(),
                value: value.to_string(),
            };
            match canonical {
                "mode" => cfg.mode = value.parse().map_err(|_| bad())?,
                "gamma" => cfg.gamma = value.parse().map_err(|_| bad())?,
                "omega_tilde" => cfg.omega_tilde = value.parse().map_err(|_| bad())?,
                "kd_parity" => cfg.kd_parity = value.parse().map_err(|_| bad())?,
                "eta_l" => cfg.eta_l = value.parse().map_err(|_| bad())?,
                "eta_r" => cfg.eta_r = value.parse().map_err(|_| bad())?,
                "dt" => cfg.dt = value.parse().map_err(|_| bad())?,
                "t_max" => {
                    cfg.t_max = value.parse().map_err(|_| bad())?;
                    t_max_given = true;
                }
                "initial" => cfg.initial = value.parse().map_err(|_| bad())?,
                "n_traj" => cfg.n_traj = value.parse().map_err(|_| bad())?,
                "master_seed" => cfg.master_seed = value.parse().map_err(|_| bad())?,
                "output_dir" => cfg.output_dir = value.to_string(),
                "store_states" => cfg.store_states = value.parse().map_err(|_| bad())?,
                "bell_threshold" => cfg.bell_threshold = value.parse().map_err(|_| bad())?,
                "separable_threshold" => {
                    cfg.separable_threshold = value.parse().map_err(|_| bad())?
                }
                _ => unreachable!("KEYS is exhaustive"),
            }
        }
        if !t_max_given {
            cfg.t_max = default_t_max(cfg.mode);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        build_model(self.gamma, self.omega_tilde, self.kd_parity, self.eta_l, self.eta_r)
            .map_err(|_| ConfigError::Range {
            key: "gamma/omega_tilde/eta_l/eta_r",
            requirement: "gamma finite and positive, omega_tilde finite, efficiencies in [0, 1]",
        })?;
        if !(self.dt.is_finite() && self.dt > 0.0 && self.dt <= 0.01) {
            return Err(ConfigError::Range { key: "dt", requirement: "0 < dt <= 0.01 (units of T1)" });
        }
        if !(self.t_max.is_finite() && self.t_max >= self.dt) {
            return Err(ConfigError::Range { key: "t_max", requirement: "at least one step long" });
        }
        if self.n_traj == 0 {
            return Err(ConfigError::Range { key: "n_traj", requirement: "at least 1" });
        }
        if self.output_dir.is_empty() {
            return Err(ConfigError::Range { key: "output_dir", requirement: "nonempty path" });
        }
        if !(self.bell_threshold > 0.0 && self.bell_threshold <= 1.0) {
            return Err(ConfigError::Range { key: "bell_threshold", requirement: "in (0, 1]" });
        }
        if !(0.0..1.0).contains(&self.separable_threshold) {
            return Err(ConfigError::Range {
                key: "separable_threshold",
                requirement: "in [0, 1)",
            });
        }
        Ok(())
    }

    /// Serializes every key in a fixed order; `parse` of the result yields
    /// an identical configuration, byte for byte on re-serialization.
    pub fn to_config_text(&self) -> String {
        let mut out = String::new();
        for key in KEYS {
            let value = match key {
                "mode" => self.mode.to_string(),
                "gamma" => self.gamma.to_string(),
                "omega_tilde" => self.omega_tilde.to_string(),
                "kd_parity" => self.kd_parity.to_string(),
                "eta_l" => self.eta_l.to_string(),
                "eta_r" => self.eta_r.to_string(),
                "dt" => self.dt.to_string(),
                "t_max" => self.t_max.to_string(),
                "initial" => self.initial.to_string(),
                "n_traj" => self.n_traj.to_string(),
                "master_seed" => self.master_seed.to_string(),
                "output_dir" => self.output_dir.clone(),
                "store_states" => self.store_states.to_string(),
                "bell_threshold" => self.bell_threshold.to_string(),
                "separable_threshold" => self.separable_threshold.to_string(),
                _ => unreachable!("KEYS is exhaustive"),
            };
            out.push_str(key);
            out.push_str(" = ");
            out.push_str(&value);
            out.push('\n');
        }
        out
    }

    pub fn model(&self) -> WaveguideModel {
        build_model(self.gamma, self.omega_tilde, self.kd_parity, self.eta_l, self.eta_r)
            .expect("validated configuration")
    }

    pub fn thresholds(&self) -> ClassifyThresholds {
        ClassifyThresholds {
            bell_fidelity: self.bell_threshold,
            separable_concurrence: self.separable_threshold,
            ..ClassifyThresholds::default()
        }
    }
}

const KEYS: [&str; 15] = [
    "mode",
    "gamma",
    "omega_tilde",
    "kd_parity",
    "eta_l",
    "eta_r",
    "dt",
    "t_max",
    "initial",
    "n_traj",
    "master_seed",
    "output_dir",
    "store_states",
    "bell_threshold",
    "separable_threshold",
];

/// A named preset: one or more runs, each with a subdirectory suffix
/// (empty for single-run presets).
pub struct Preset {
    pub name: &'static str,
    pub summary: &'static str,
    runs: &'static [(&'static str, &'static str)],
}

impl Preset {
    pub fn configs(&self) -> Vec<(&'static str, SimConfig)> {
        self.runs
            .iter()
            .map(|(sub, text)| {
                (*sub, SimConfig::parse(text).expect("presets are validated by tests"))
            })
            .collect()
    }
}

pub const PRESETS: [Preset; 9] = [
    Preset {
        name: "fig2a",
        summary: "12 photon-counting trajectories, perfect detection, 6 T1",
        runs: &[("", "mode = jump\neta_l = 1\neta_r = 1\nn_traj = 12\nt_max = 6\nmaster_seed = 20\n")],
    },
    Preset {
        name: "fig2b",
        summary: "12 photon-counting trajectories, 90% efficient detectors",
        runs: &[("", "mode = jump\neta_l = 0.9\neta_r = 0.9\nn_traj = 12\nt_max = 6\nmaster_seed = 21\n")],
    },
    Preset {
        name: "fig4",
        summary: "a single homodyne trajectory pinning into the dark state",
        runs: &[(
            "",
            "mode = homodyne\neta_l = 0\neta_r = 1\nn_traj = 1\nt_max = 15\nmaster_seed = 40\n",
        )],
    },
    Preset {
        name: "fig5a",
        summary: "2000 homodyne trajectories, right port fully monitored",
        runs: &[("", FIG5_BASE[0])],
    },
    Preset {
        name: "fig5b",
        summary: "2000 homodyne trajectories, 90% monitoring",
        runs: &[("", FIG5_BASE[1])],
    },
    Preset {
        name: "fig5c",
        summary: "2000 homodyne trajectories, 75% monitoring",
        runs: &[("", FIG5_BASE[2])],
    },
    Preset {
        name: "fig5d",
        summary: "2000 homodyne trajectories, 50% monitoring",
        runs: &[("", FIG5_BASE[3])],
    },
    Preset {
        name: "fig6",
        summary: "homodyne batches from each computational initial state",
        runs: &[
            ("gg", "mode = homodyne\neta_l = 0\neta_r = 1\nn_traj = 200\nt_max = 15\ninitial = gg\nmaster_seed = 60\nstore_states = false\n"),
            ("ge", "mode = homodyne\neta_l = 0\neta_r = 1\nn_traj = 200\nt_max = 15\ninitial = ge\nmaster_seed = 61\nstore_states = false\n"),
            ("eg", "mode = homodyne\neta_l = 0\neta_r = 1\nn_traj = 200\nt_max = 15\ninitial = eg\nmaster_seed = 62\nstore_states = false\n"),
            ("ee", "mode = homodyne\neta_l = 0\neta_r = 1\nn_traj = 200\nt_max = 15\ninitial = ee\nmaster_seed = 63\nstore_states = false\n"),
        ],
    },
    Preset {
        name: "oracle",
        summary: "tabulate the closed-form reference curves",
        runs: &[("", "mode = oracle_check\nt_max = 10\n")],
    },
];

const FIG5_BASE: [&str; 4] = [
    "mode = homodyne\neta_l = 0\neta_r = 1\nn_traj = 2000\nt_max = 15\nmaster_seed = 50\nstore_states = false\n",
    "mode = homodyne\neta_l = 0\neta_r = 0.9\nn_traj = 2000\nt_max = 15\nmaster_seed = 51\nstore_states = false\n",
    "mode = homodyne\neta_l = 0\neta_r = 0.75\nn_traj = 2000\nt_max = 15\nmaster_seed = 52\nstore_states = false\n",
    "mode = homodyne\neta_l = 0\neta_r = 0.5\nn_traj = 2000\nt_max = 15\nmaster_seed = 53\nstore_states = false\n",
];

pub fn find_preset(name: &str) -> Result<&'static Preset, ConfigError> {
    PRESETS
        .iter()
        .find(|p| p.name == name)
        .ok_or_else(|| ConfigError::UnknownPreset(name.to_string()))
}
