//! Structured run configuration.
//!
//! Configs are TOML with flat sections and unit-suffixed key names; no
//! unit inference ever happens. Frequencies are ordinary frequencies in
//! Hz and are converted to angular rad/s here, at ingestion. Alternative
//! keys (`q_m` vs `gamma_m_hz`, `kappa_c_hz` vs `q_c`, `kappa_ex_hz` vs
//! `eta`, `wavelength_nm` vs `omega_cav_hz`, `power_w` vs
//! `power_rel_pmin_db`) must be given exactly one at a time; unknown keys
//! are rejected.

use serde::{Deserialize, Serialize};

use omnoise::{
    db_to_squeeze_r, minimum_sql_power, validate_system, ForcePsd, ModelError, ProbeConfig,
    SystemParams, ValidatedSystem, SPEED_OF_LIGHT,
};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("config parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("config keys `{a}` and `{b}` are mutually exclusive; give exactly one")]
    MutuallyExclusive { a: &'static str, b: &'static str },
    #[error("one of `{a}` or `{b}` is required")]
    MissingAlternative { a: &'static str, b: &'static str },
    #[error("config key `{key}`: {message}")]
    Invalid { key: &'static str, message: String },
    #[error("invalid system parameters: {0}")]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub system: SystemSection,
    pub probe: ProbeSection,
    #[serde(default)]
    pub run: RunSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimize: Option<OptimizeSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub figures: Option<FiguresSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifySection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    pub omega_m_hz: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_m_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa_c_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa_ex_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    pub g0_hz: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wavelength_nm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_cav_hz: Option<f64>,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass_kg: Option<f64>,
}

fn default_epsilon() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power_w: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power_rel_pmin_db: Option<f64>,
    #[serde(default)]
    pub detuning_hz: f64,
    #[serde(default)]
    pub squeeze_db: f64,
    #[serde(default)]
    pub squeeze_angle_deg: f64,
    /// Anti-squeezing in dB for impure states; omit for a pure state.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub antisqueeze_db: Option<f64>,
    #[serde(default)]
    pub loss_port_squeeze_db: f64,
    /// Constant external force PSD S_ex, zero-point force units per (rad/s).
    #[serde(default)]
    pub s_ext: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
#[derive(Default)]
pub enum Engine {
    #[default]
    Closedform,
    Solver,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
#[derive(Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    #[serde(default)]
    pub engine: Engine,
    #[serde(default)]
    pub format: Format,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub min_hz: f64,
    pub max_hz: f64,
    pub count: usize,
    #[serde(default = "default_spacing")]
    pub spacing: Spacing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

fn default_spacing() -> Spacing {
    Spacing::Log
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    /// One of eta | power | squeeze_r | sideband_resolution.
    pub variable: String,
    pub min: f64,
    pub max: f64,
    pub count: usize,
    #[serde(default = "default_spacing")]
    pub spacing: Spacing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeSection {
    /// "power" or "coupling".
    pub target: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiguresSection {
    /// fig1 | fig2 | fig3 | fig4 | all.
    pub id: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub draws: Option<usize>,
}

/// Fully resolved inputs in base units (rad/s, W).
#[derive(Debug, Clone)]
pub struct Resolved {
    pub system: ValidatedSystem,
    pub probe: ProbeConfig,
}

pub fn load(path: &str) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_string(),
        source,
    })?;
    Ok(toml::from_str(&text)?)
}

fn exactly_one<T: Copy>(
    a: (&'static str, Option<T>),
    b: (&'static str, Option<T>),
) -> Result<(bool, T), ConfigError> {
    match (a.1, b.1) {
        (Some(_), Some(_)) => Err(ConfigError::MutuallyExclusive { a: a.0, b: b.0 }),
        (Some(v), None) => Ok((true, v)),
        (None, Some(v)) => Ok((false, v)),
        (None, None) => Err(ConfigError::MissingAlternative { a: a.0, b: b.0 }),
    }
}

pub fn resolve(config: &RunConfig) -> Result<Resolved, ConfigError> {
    let tau = std::f64::consts::TAU;
    let s = &config.system;
    let omega_m = tau * s.omega_m_hz;

    let (direct, v) = exactly_one(("q_m", s.q_m), ("gamma_m_hz", s.gamma_m_hz))?;
    let gamma_m = if direct { omega_m / v } else { tau * v };

    let (direct, v) = exactly_one(
        ("wavelength_nm", s.wavelength_nm),
        ("omega_cav_hz", s.omega_cav_hz),
    )?;
    let omega_cav = if direct {
        if v <= 0.0 {
            return Err(ConfigError::Invalid {
                key: "wavelength_nm",
                message: format!("must be positive, got {v}"),
            });
        }
        tau * SPEED_OF_LIGHT / (v * 1e-9)
    } else {
        tau * v
    };

    let (direct, v) = exactly_one(("kappa_c_hz", s.kappa_c_hz), ("q_c", s.q_c))?;
    let kappa_c = if direct {
        tau * v
    } else {
        if v <= 0.0 {
            return Err(ConfigError::Invalid {
                key: "q_c",
                message: format!("must be positive, got {v}"),
            });
        }
        omega_cav / v
    };

    let (direct, v) = exactly_one(("kappa_ex_hz", s.kappa_ex_hz), ("eta", s.eta))?;
    let kappa_ex = if direct {
        tau * v
    } else {
        if !(v > 0.0 && v < 1.0) {
            return Err(ConfigError::Invalid {
                key: "eta",
                message: format!(
                    "must lie strictly inside (0, 1), got {v}; \
                     give kappa_ex_hz directly for a lossless cavity"
                ),
            });
        }
        v / (1.0 - v) * kappa_c
    };

    let system = validate_system(SystemParams {
        omega_m,
        gamma_m,
        kappa_c,
        kappa_ex,
        g0: tau * s.g0_hz,
        omega_cav,
        epsilon: s.epsilon,
        mass: s.mass_kg,
    })?;

    let p = &config.probe;
    let (direct, v) = exactly_one(
        ("power_w", p.power_w),
        ("power_rel_pmin_db", p.power_rel_pmin_db),
    )?;
    let power = if direct {
        v
    } else {
        let p_min = minimum_sql_power(&system).map_err(|_| ConfigError::Invalid {
            key: "power_rel_pmin_db",
            message: "needs g0_hz > 0 so that a minimum SQL power exists".into(),
        })?;
        p_min * 10f64.powf(v / 10.0)
    };
    let probe = ProbeConfig {
        power,
        detuning: tau * p.detuning_hz,
        squeeze_r: db_to_squeeze_r(p.squeeze_db),
        squeeze_angle: p.squeeze_angle_deg.to_radians(),
        antisqueeze_r: p.antisqueeze_db.map(db_to_squeeze_r),
        loss_port_squeeze_r: db_to_squeeze_r(p.loss_port_squeeze_db),
        external_force_psd: ForcePsd::Constant(p.s_ext),
    };
    omnoise::validate_probe(&probe)?;

    Ok(Resolved { system, probe })
}

/// Budget grid from the config/flag override, or the default three-decade
/// log grid about Ω_m.
pub fn budget_grid(grid: Option<&GridSection>, omega_m: f64) -> Result<Vec<f64>, ConfigError> {
    match grid {
        None => Ok(omnoise::grid::default_budget_grid(omega_m)),
        Some(g) => {
            let tau = std::f64::consts::TAU;
            if !(g.max_hz > g.min_hz && g.count >= 2) {
                return Err(ConfigError::Invalid {
                    key: "run.grid",
                    message: "need max_hz > min_hz and count >= 2".into(),
                });
            }
            let (lo, hi) = (tau * g.min_hz, tau * g.max_hz);
            let mut grid = match g.spacing {
                Spacing::Linear => omnoise::grid::linspace(lo, hi, g.count),
                Spacing::Log => {
                    if g.min_hz <= 0.0 {
                        return Err(ConfigError::Invalid {
                            key: "run.grid.min_hz",
                            message: "log spacing needs min_hz > 0".into(),
                        });
                    }
                    omnoise::grid::logspace(lo, hi, g.count)
                }
            };
            // the sideband decomposition is reported at Ω_m; keep it exact
            if lo <= omega_m && omega_m <= hi && !grid.contains(&omega_m) {
                let i = grid.partition_point(|&w| w < omega_m);
                grid.insert(i, omega_m);
            }
            Ok(grid)
        }
    }
}
