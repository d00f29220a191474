//! Subcommand implementations.

use serde::Serialize;

use omnoise::analysis::{
    self, figure_dataset, optimize_coupling, optimize_power, run_sweep,
    squeezing_power_equivalence, AnalysisError, FigureData, FigureDataset, FigureId, SweepSpec,
};
use omnoise::closedform::NoiseBudget;
use omnoise::solver;
use omnoise::verify::{run_suite, CheckStatus, VerifyOptions};

use crate::config::{
    budget_grid, ConfigError, Engine, Format, GridSection, Resolved, Spacing, SweepSection,
    VerifySection,
};
use crate::envelope::wrap;
use crate::output::{json_pretty, num, to_destination, write_csv};

/// Failures mapped to process exit codes: config 2, physics 3,
/// verification 4, I/O 1.
#[derive(Debug)]
pub enum CmdError {
    Config(ConfigError),
    Physics(String),
    VerifyFailed,
    Io(std::io::Error),
}

impl CmdError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CmdError::Io(_) => 1,
            CmdError::Config(_) => 2,
            CmdError::Physics(_) => 3,
            CmdError::VerifyFailed => 4,
        }
    }
}

impl std::fmt::Display for CmdError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CmdError::Config(e) => write!(f, "config error: {e}"),
            CmdError::Physics(m) => write!(f, "{m}"),
            CmdError::VerifyFailed => write!(f, "verification failed"),
            CmdError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<ConfigError> for CmdError {
    fn from(e: ConfigError) -> Self {
        CmdError::Config(e)
    }
}

impl From<std::io::Error> for CmdError {
    fn from(e: std::io::Error) -> Self {
        CmdError::Io(e)
    }
}

fn physics(e: impl std::fmt::Display, hint: &str) -> CmdError {
    if hint.is_empty() {
        CmdError::Physics(e.to_string())
    } else {
        CmdError::Physics(format!("{e}\nhint: {hint}"))
    }
}

#[derive(Serialize)]
struct Empty {}

pub fn cmd_derive(resolved: &Resolved, format: Format, out: Option<&str>) -> Result<(), CmdError> {
    let envelope = wrap(resolved, Empty {}).map_err(|e| physics(e, ""))?;
    let body = match format {
        Format::Json => json_pretty(&envelope),
        Format::Csv => {
            // two-column key,value listing of the echo and derived blocks
            let value = serde_json::to_value(&envelope).expect("serializable");
            let mut rows = Vec::new();
            flatten_json("", &value, &mut rows);
            let mut buf = Vec::new();
            write_csv(&mut buf, &["key", "value"], rows.into_iter())?;
            String::from_utf8(buf).expect("utf-8")
        }
    };
    to_destination(out, &body)?;
    Ok(())
}

fn flatten_json(prefix: &str, value: &serde_json::Value, rows: &mut Vec<Vec<String>>) {
    match value {
        serde_json::Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten_json(&key, v, rows);
            }
        }
        serde_json::Value::Null => rows.push(vec![prefix.to_string(), String::new()]),
        serde_json::Value::Number(n) => {
            let rendered = n.as_f64().map(num).unwrap_or_else(|| n.to_string());
            rows.push(vec![prefix.to_string(), rendered]);
        }
        other => rows.push(vec![prefix.to_string(), other.to_string()]),
    }
}

#[derive(Serialize)]
struct BudgetPayload {
    engine: Engine,
    columns: [&'static str; 6],
    rows: Vec<[f64; 6]>,
    s_total_at_sideband: f64,
    sql: f64,
}

const BUDGET_COLUMNS: [&str; 6] = [
    "omega_rad_s",
    "s_imp",
    "s_qba",
    "s_ext_contrib",
    "s_total",
    "sql_ref",
];

pub fn cmd_budget(
    resolved: &Resolved,
    engine: Engine,
    grid: Option<&GridSection>,
    format: Format,
    out: Option<&str>,
) -> Result<(), CmdError> {
    let grid = budget_grid(grid, resolved.system.params().omega_m)?;
    let budget: NoiseBudget = match engine {
        Engine::Closedform => NoiseBudget::closed_form(&resolved.system, &resolved.probe, &grid)
            .map_err(|e| {
                physics(
                    e,
                    "the closed-form engine needs detuning_hz = 0 and g0_hz, power_w, \
                     kappa_ex_hz all nonzero; --engine solver handles detuned probing",
                )
            })?,
        Engine::Solver => {
            solver::noise_budget(&resolved.system, &resolved.probe, &grid).map_err(|e| {
                physics(
                    e,
                    "transduction requires g0_hz, power_w and kappa_ex_hz > 0",
                )
            })?
        }
    };
    let rows: Vec<[f64; 6]> = (0..budget.omega.len())
        .map(|i| {
            [
                budget.omega[i],
                budget.s_imp[i],
                budget.s_qba[i],
                budget.s_ext[i],
                budget.s_total[i],
                budget.sql,
            ]
        })
        .collect();
    let body = match format {
        Format::Csv => {
            let mut buf = Vec::new();
            write_csv(
                &mut buf,
                &BUDGET_COLUMNS,
                rows.iter().map(|r| r.iter().map(|&v| num(v)).collect()),
            )?;
            String::from_utf8(buf).expect("utf-8")
        }
        Format::Json => {
            let payload = BudgetPayload {
                engine,
                columns: BUDGET_COLUMNS,
                rows,
                s_total_at_sideband: budget.s_total_at_sideband,
                sql: budget.sql,
            };
            json_pretty(&wrap(resolved, payload).map_err(|e| physics(e, ""))?)
        }
    };
    to_destination(out, &body)?;
    Ok(())
}

fn map_analysis_err(e: AnalysisError) -> CmdError {
    match e {
        AnalysisError::BadSweep(_) => CmdError::Config(ConfigError::Invalid {
            key: "sweep",
            message: e.to_string(),
        }),
        other => physics(other, ""),
    }
}

pub fn cmd_sweep(
    resolved: &Resolved,
    section: &SweepSection,
    format: Format,
    out: Option<&str>,
) -> Result<(), CmdError> {
    let variable = section
        .variable
        .parse()
        .map_err(|message| ConfigError::Invalid {
            key: "sweep.variable",
            message,
        })?;
    if !(section.max > section.min && section.count >= 2) {
        return Err(ConfigError::Invalid {
            key: "sweep",
            message: "need max > min and count >= 2".into(),
        }
        .into());
    }
    let grid = match section.spacing {
        Spacing::Linear => omnoise::grid::linspace(section.min, section.max, section.count),
        Spacing::Log => {
            if section.min <= 0.0 {
                return Err(ConfigError::Invalid {
                    key: "sweep.min",
                    message: "log spacing needs min > 0".into(),
                }
                .into());
            }
            omnoise::grid::logspace(section.min, section.max, section.count)
        }
    };
    let spec = SweepSpec {
        variable,
        grid,
        system: resolved.system.clone(),
        probe: resolved.probe.clone(),
    };
    let rows = run_sweep(&spec).map_err(map_analysis_err)?;
    let body = match format {
        Format::Csv => {
            let mut buf = Vec::new();
            write_csv(
                &mut buf,
                &["value", "s_imp", "s_qba", "s_total", "db_over_sql"],
                rows.iter().map(|r| {
                    vec![
                        num(r.value),
                        num(r.s_imp),
                        num(r.s_qba),
                        num(r.s_total),
                        num(r.db_over_sql),
                    ]
                }),
            )?;
            String::from_utf8(buf).expect("utf-8")
        }
        Format::Json => json_pretty(&wrap(resolved, &rows).map_err(|e| physics(e, ""))?),
    };
    to_destination(out, &body)?;
    Ok(())
}

#[derive(Serialize)]
#[serde(untagged)]
enum OptimizePayload {
    Power(analysis::PowerOptimum),
    Coupling(analysis::CouplingOptimum),
}

pub fn cmd_optimize(
    resolved: &Resolved,
    target: &str,
    format: Format,
    out: Option<&str>,
) -> Result<(), CmdError> {
    let payload = match target {
        "power" => OptimizePayload::Power(
            optimize_power(&resolved.system, &resolved.probe, resolved.system.eta())
                .map_err(map_analysis_err)?,
        ),
        "coupling" => OptimizePayload::Coupling(
            optimize_coupling(&resolved.system, &resolved.probe).map_err(map_analysis_err)?,
        ),
        other => {
            return Err(ConfigError::Invalid {
                key: "optimize.target",
                message: format!("unknown target `{other}` (expected power|coupling)"),
            }
            .into())
        }
    };
    emit_key_value_or_json(resolved, payload, format, out)
}

#[derive(Serialize)]
struct EquivalencePayload {
    found: bool,
    equivalence: Option<analysis::Equivalence>,
    squeezed_noise: f64,
    coherent_floor: f64,
}

pub fn cmd_equivalence(
    resolved: &Resolved,
    format: Format,
    out: Option<&str>,
) -> Result<(), CmdError> {
    let eta = resolved.system.eta();
    let payload = match squeezing_power_equivalence(
        &resolved.system,
        eta,
        resolved.probe.power,
        resolved.probe.squeeze_r,
    ) {
        Ok(eq) => EquivalencePayload {
            found: true,
            squeezed_noise: eq.squeezed_noise,
            coherent_floor: eq.coherent_floor,
            equivalence: Some(eq),
        },
        Err(AnalysisError::NoEquivalent {
            squeezed_noise,
            coherent_floor,
        }) => EquivalencePayload {
            found: false,
            equivalence: None,
            squeezed_noise,
            coherent_floor,
        },
        Err(e) => return Err(map_analysis_err(e)),
    };
    emit_key_value_or_json(resolved, payload, format, out)
}

fn emit_key_value_or_json<T: Serialize>(
    resolved: &Resolved,
    payload: T,
    format: Format,
    out: Option<&str>,
) -> Result<(), CmdError> {
    let envelope = wrap(resolved, payload).map_err(|e| physics(e, ""))?;
    let body = match format {
        Format::Json => json_pretty(&envelope),
        Format::Csv => {
            let value = serde_json::to_value(&envelope).expect("serializable");
            let mut rows = Vec::new();
            flatten_json("", &value, &mut rows);
            let mut buf = Vec::new();
            write_csv(&mut buf, &["key", "value"], rows.into_iter())?;
            String::from_utf8(buf).expect("utf-8")
        }
    };
    to_destination(out, &body)?;
    Ok(())
}

pub fn cmd_figures(resolved: &Resolved, id: &str, out_dir: Option<&str>) -> Result<(), CmdError> {
    let ids: Vec<FigureId> = if id == "all" {
        FigureId::ALL.to_vec()
    } else {
        vec![id.parse().map_err(|message| ConfigError::Invalid {
            key: "figures.id",
            message,
        })?]
    };
    let dir = std::path::Path::new(out_dir.unwrap_or("."));
    std::fs::create_dir_all(dir)?;
    for id in ids {
        let dataset = figure_dataset(id, &resolved.system).map_err(map_analysis_err)?;
        let csv_path = dir.join(format!("{}.csv", id.name()));
        std::fs::write(csv_path, figure_csv(&dataset))?;
        let sidecar = dir.join(format!("{}.params.json", id.name()));
        std::fs::write(sidecar, json_pretty(&dataset.provenance))?;
    }
    Ok(())
}

fn figure_csv(dataset: &FigureDataset) -> String {
    let mut buf = String::new();
    match &dataset.data {
        FigureData::Curves {
            x_label,
            y_label,
            series,
        } => {
            buf.push_str(&format!("series,{x_label},{y_label},is_marker\n"));
            for s in series {
                for (x, y) in s.x.iter().zip(&s.y) {
                    buf.push_str(&format!("{},{},{},0\n", s.name, num(*x), num(*y)));
                }
                if let Some((mx, my)) = s.marker {
                    buf.push_str(&format!("{},{},{},1\n", s.name, num(mx), num(my)));
                }
            }
        }
        FigureData::Grid {
            x_label,
            y_label,
            z_label,
            x,
            y,
            z,
            ..
        } => {
            buf.push_str(&format!("{x_label},{y_label},{z_label},contour_flag_db\n"));
            for (i, xv) in x.iter().enumerate() {
                for (j, yv) in y.iter().enumerate() {
                    let flag = dataset
                        .data
                        .contour_flag(i, j)
                        .map(|l| format!("{l}"))
                        .unwrap_or_default();
                    buf.push_str(&format!(
                        "{},{},{},{}\n",
                        num(*xv),
                        num(*yv),
                        num(z[i][j]),
                        flag
                    ));
                }
            }
        }
    }
    buf
}

pub fn cmd_verify(
    resolved: &Resolved,
    section: Option<&VerifySection>,
    format: Format,
    out: Option<&str>,
    inject_imprecision_scale: Option<f64>,
) -> Result<(), CmdError> {
    let defaults = VerifyOptions::default();
    let opts = VerifyOptions {
        seed: section.and_then(|s| s.seed).unwrap_or(defaults.seed),
        draws: section.and_then(|s| s.draws).unwrap_or(defaults.draws),
        squeeze_r: resolved.probe.squeeze_r,
        imprecision_scale: inject_imprecision_scale.unwrap_or(1.0),
        ..defaults
    };
    let report = run_suite(&resolved.system, &opts);
    let body = match format {
        Format::Json => json_pretty(&report),
        Format::Csv => {
            let mut text = String::new();
            for c in &report.checks {
                let tag = match c.status {
                    CheckStatus::Pass => "PASS",
                    CheckStatus::Fail => "FAIL",
                    CheckStatus::Skipped => "SKIP",
                };
                text.push_str(&format!("{tag}  {} — {}\n", c.name, c.detail));
            }
            let summary = if report.passed() { "passed" } else { "FAILED" };
            text.push_str(&format!(
                "verification {summary} in {:.2} s ({} checks)\n",
                report.seconds,
                report.checks.len()
            ));
            text
        }
    };
    to_destination(out, &body)?;
    if report.passed() {
        Ok(())
    } else {
        Err(CmdError::VerifyFailed)
    }
}
