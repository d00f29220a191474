//! Optimization and sweep layer.
//!
//! Finds the probe power and cavity coupling minimizing the total
//! measurement noise, quantifies the squeezing-vs-power trade-off, and
//! generates the standard sweep datasets (imprecision and QBA noise
//! against coupling for several sideband resolutions, total noise against
//! power and squeezing, total noise against coupling for several powers).

use serde::Serialize;

use crate::closedform::{self, ClosedFormError};
use crate::grid::linspace;
use crate::model::{
    db_to_squeeze_r, derive, minimum_sql_power, validate_system, ModelError, ProbeConfig,
    SystemParams, ValidatedSystem,
};

/// Coupling sweeps stay clear of the open endpoints η ∈ {0, 1}, where the
/// transduction vanishes and the imprecision diverges.
pub const ETA_MIN: f64 = 1e-3;
pub const ETA_MAX: f64 = 1.0 - 1e-3;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AnalysisError {
    /// The squeezed probe beats every coherent power: no coherent
    /// equivalent exists.
    #[error(
        "no coherent power matches the squeezed noise {squeezed_noise:e} \
         below the coherent floor {coherent_floor:e}"
    )]
    NoEquivalent {
        squeezed_noise: f64,
        coherent_floor: f64,
    },
    #[error("invalid sweep: {0}")]
    BadSweep(String),
    #[error(transparent)]
    ClosedForm(#[from] ClosedFormError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Golden-section search for the minimum of `f` on `[a, b]`, followed by a
/// symmetric three-point parabolic refinement that recovers the digits a
/// pure comparison search loses to function-value roundoff.
///
/// Returns `(x_min, f_min)`.
fn golden_section_minimize(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    const RESP: f64 = 2.0 - 1.618_033_988_749_895; // 2 - φ
    let span = (b - a).abs();
    let mut x1 = a + RESP * (b - a);
    let mut x2 = b - RESP * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while (b - a).abs() > tol {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = a + RESP * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = b - RESP * (b - a);
            f2 = f(x2);
        }
    }
    let (mut x0, mut f0) = if f1 < f2 { (x1, f1) } else { (x2, f2) };
    // parabolic polish: vertex of the parabola through x0 ± h. The golden
    // bracket alone resolves the minimizer only to ~sqrt(eps) relative,
    // where comparisons drown in roundoff; the vertex restores it.
    let h = 1e-6 * span;
    let (fl, fr) = (f(x0 - h), f(x0 + h));
    let denom = fl - 2.0 * f0 + fr;
    if denom > 0.0 {
        let step = 0.5 * h * (fl - fr) / denom;
        if step.abs() < h {
            x0 += step;
            f0 = f(x0).min(f0);
        }
    }
    (x0, f0)
}

/// Result of a probe-power optimization at fixed coupling.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerOptimum {
    /// Optimal probe power, W.
    pub power_w: f64,
    /// Optimal normalized power 𝒫*.
    pub p_norm_star: f64,
    /// Total noise at the optimum, zero-point units²/(rad/s).
    pub s_min: f64,
}

/// Minimizes the total noise at the mechanical sideband over probe power,
/// at escape efficiency `eta` (intrinsic loss κ_c fixed).
///
/// Coherent probing returns the analytic optimum 𝒫* = 1 exactly; squeezed
/// probing runs a golden-section search on ln 𝒫 to relative 1e−10.
pub fn optimize_power(
    sys: &ValidatedSystem,
    probe_template: &ProbeConfig,
    eta: f64,
) -> Result<PowerOptimum, AnalysisError> {
    let sys = sys.with_escape_efficiency(eta)?;
    let d = derive(&sys, probe_template)?;
    let p_sql = d
        .p_sql
        .filter(|p| p.is_finite())
        .ok_or(ClosedFormError::ZeroTransduction)?;
    let gamma_m = sys.params().gamma_m;
    let coherent = probe_template.squeeze_r == 0.0
        && probe_template.loss_port_squeeze_r == 0.0
        && probe_template.antisqueeze_r.unwrap_or(0.0) == 0.0;
    if coherent {
        return Ok(PowerOptimum {
            power_w: p_sql,
            p_norm_star: 1.0,
            s_min: 2.0 / (eta.sqrt() * gamma_m),
        });
    }
    let total = |u: f64| {
        let probe = probe_template.with_power(u.exp() * p_sql);
        closedform::total_noise_at_sideband(&sys, &probe).expect("resonant, nonzero power")
    };
    // ln𝒫* is bounded by the strongest squeeze degree in play
    let r_max = probe_template
        .squeeze_r
        .max(probe_template.loss_port_squeeze_r)
        .max(probe_template.antisqueeze_r.unwrap_or(0.0));
    let reach = 2.0 * r_max + 4.0;
    let (u_star, s_min) = golden_section_minimize(total, -reach, reach, 1e-11);
    Ok(PowerOptimum {
        power_w: u_star.exp() * p_sql,
        p_norm_star: u_star.exp(),
        s_min,
    })
}

/// Result of a coupling optimization at fixed probe power.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CouplingOptimum {
    pub eta_star: f64,
    pub s_min: f64,
    /// True when the optimum sits within ~1e−3 of η = 1, i.e. the search
    /// is attracted to the overcoupled boundary of its domain.
    pub boundary_attracted: bool,
}

/// Minimizes the total noise at the mechanical sideband over the escape
/// efficiency η ∈ [1e−3, 1−1e−3] at fixed physical probe power. Both the
/// coupling g and the normalized power 𝒫 change along the sweep, since
/// κ_ex moves against the fixed intrinsic loss κ_c.
pub fn optimize_coupling(
    sys: &ValidatedSystem,
    probe: &ProbeConfig,
) -> Result<CouplingOptimum, AnalysisError> {
    let total = |eta: f64| -> Result<f64, AnalysisError> {
        let recoupled = sys.with_escape_efficiency(eta)?;
        Ok(closedform::total_noise_at_sideband(&recoupled, probe)?)
    };
    let grid = linspace(ETA_MIN, ETA_MAX, 399);
    let mut best = (0usize, f64::INFINITY);
    for (i, &eta) in grid.iter().enumerate() {
        let v = total(eta)?;
        if v < best.1 {
            best = (i, v);
        }
    }
    let lo = grid[best.0.saturating_sub(1)];
    let hi = grid[(best.0 + 1).min(grid.len() - 1)];
    let (eta_star, s_min) =
        golden_section_minimize(|eta| total(eta).unwrap_or(f64::INFINITY), lo, hi, 1e-12);
    Ok(CouplingOptimum {
        eta_star,
        s_min,
        boundary_attracted: 1.0 - eta_star <= 1.1e-3,
    })
}

/// Coherent power matched to a squeezed probe.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Equivalence {
    /// Coherent power with the same total noise, W.
    pub matched_power_w: f64,
    /// matched_power / probe power.
    pub ratio: f64,
    /// ratio/e^{2r} − 1.
    pub deviation: f64,
    pub squeezed_noise: f64,
    pub coherent_floor: f64,
}

/// Finds the coherent probe power P′ whose total noise equals that of the
/// phase-squeezed probe (P, r) at escape efficiency `eta`, by bisection on
/// the coherent noise curve.
///
/// The coherent curve is U-shaped in power, so a matching noise level has
/// two preimages; the root nearer (in log power) to the expected e^{2r}·P
/// is returned, which makes the η = 1 identity exact on either branch.
/// When the squeezed noise lies below the coherent minimum
/// 2/(√ηΓ_m) there is no match and [`AnalysisError::NoEquivalent`] is
/// returned — the regime where squeezing beats any power increase.
pub fn squeezing_power_equivalence(
    sys: &ValidatedSystem,
    eta: f64,
    power_w: f64,
    r: f64,
) -> Result<Equivalence, AnalysisError> {
    let sys = sys.with_escape_efficiency(eta)?;
    let squeezed_noise =
        closedform::total_noise_at_sideband(&sys, &ProbeConfig::phase_squeezed(power_w, r))?;
    let p_sql = derive(&sys, &ProbeConfig::coherent(power_w))?
        .p_sql
        .filter(|p| p.is_finite())
        .ok_or(ClosedFormError::ZeroTransduction)?;
    let coherent_floor = 2.0 / (eta.sqrt() * sys.params().gamma_m);
    if squeezed_noise < coherent_floor * (1.0 - 1e-12) {
        return Err(AnalysisError::NoEquivalent {
            squeezed_noise,
            coherent_floor,
        });
    }
    let coherent = |p: f64| {
        closedform::total_noise_at_sideband(&sys, &ProbeConfig::coherent(p))
            .expect("resonant, positive power")
    };
    // descending branch (below p_sql)
    let mut lo = p_sql * 1e-9;
    while coherent(lo) < squeezed_noise {
        lo *= 0.1;
    }
    let descending = bisect_to_level(coherent, lo, p_sql, squeezed_noise);
    // ascending branch (above p_sql)
    let mut hi = p_sql * 1e9;
    while coherent(hi) < squeezed_noise {
        hi *= 10.0;
    }
    let ascending = bisect_to_level(coherent, p_sql, hi, squeezed_noise);
    let expected = (2.0 * r).exp() * power_w;
    let matched_power_w = if (descending / expected).ln().abs() <= (ascending / expected).ln().abs()
    {
        descending
    } else {
        ascending
    };
    let ratio = matched_power_w / power_w;
    Ok(Equivalence {
        matched_power_w,
        ratio,
        deviation: ratio / (2.0 * r).exp() - 1.0,
        squeezed_noise,
        coherent_floor,
    })
}

/// Bisects `f` (monotone on `[a, b]`) to `f(p) = level`, relative 1e−13.
fn bisect_to_level(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, level: f64) -> f64 {
    let falling = f(a) > f(b);
    for _ in 0..200 {
        if (b - a) <= 1e-13 * b {
            break;
        }
        let mid = 0.5 * (a + b);
        let high_side = f(mid) > level;
        if high_side == falling {
            a = mid;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

/// Swept quantity of a [`SweepSpec`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    /// Escape efficiency η at fixed κ_c.
    Eta,
    /// Probe power, W.
    Power,
    /// Squeezing degree r of the drive.
    SqueezeR,
    /// Sideband resolution Ω_m/κ_c at fixed η.
    SidebandResolution,
}

impl std::str::FromStr for SweepVariable {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "eta" => Ok(SweepVariable::Eta),
            "power" => Ok(SweepVariable::Power),
            "squeeze_r" => Ok(SweepVariable::SqueezeR),
            "sideband_resolution" => Ok(SweepVariable::SidebandResolution),
            other => Err(format!(
                "unknown sweep variable `{other}` \
                 (expected eta|power|squeeze_r|sideband_resolution)"
            )),
        }
    }
}

/// A one-dimensional sweep of the sideband noise decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    /// Strictly increasing, within the variable's physical bounds.
    pub grid: Vec<f64>,
    pub system: ValidatedSystem,
    pub probe: ProbeConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub s_imp: f64,
    pub s_qba: f64,
    pub s_total: f64,
    pub db_over_sql: f64,
}

/// Evaluates the sideband noise decomposition across the sweep grid.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>, AnalysisError> {
    validate_sweep(spec)?;
    let mut rows = Vec::with_capacity(spec.grid.len());
    for &value in &spec.grid {
        let (sys, probe) = sweep_point(spec, value)?;
        let omega_m = sys.params().omega_m;
        let s_imp = closedform::imprecision_psd(&sys, &probe, omega_m)?;
        let s_qba = closedform::qba_psd(&sys, &probe, omega_m)?;
        let s_total = closedform::total_noise_at_sideband(&sys, &probe)?;
        rows.push(SweepRow {
            value,
            s_imp,
            s_qba,
            s_total,
            db_over_sql: 10.0 * (s_total / closedform::sql(&sys)).log10(),
        });
    }
    Ok(rows)
}

fn validate_sweep(spec: &SweepSpec) -> Result<(), AnalysisError> {
    if spec.grid.is_empty() {
        return Err(AnalysisError::BadSweep("empty grid".into()));
    }
    if !spec.grid.windows(2).all(|w| w[0] < w[1]) {
        return Err(AnalysisError::BadSweep(
            "grid must be strictly increasing".into(),
        ));
    }
    let ok = match spec.variable {
        SweepVariable::Eta => spec.grid.iter().all(|&v| v > 0.0 && v < 1.0),
        SweepVariable::Power => spec.grid.iter().all(|&v| v > 0.0),
        SweepVariable::SqueezeR => spec.grid.iter().all(|&v| v >= 0.0),
        SweepVariable::SidebandResolution => spec.grid.iter().all(|&v| v > 0.0),
    };
    if !ok {
        return Err(AnalysisError::BadSweep(format!(
            "grid leaves the physical bounds of {:?}",
            spec.variable
        )));
    }
    Ok(())
}

fn sweep_point(
    spec: &SweepSpec,
    value: f64,
) -> Result<(ValidatedSystem, ProbeConfig), AnalysisError> {
    match spec.variable {
        SweepVariable::Eta => Ok((
            spec.system.with_escape_efficiency(value)?,
            spec.probe.clone(),
        )),
        SweepVariable::Power => Ok((spec.system.clone(), spec.probe.with_power(value))),
        SweepVariable::SqueezeR => {
            let probe = ProbeConfig {
                squeeze_r: value,
                ..spec.probe.clone()
            };
            Ok((spec.system.clone(), probe))
        }
        SweepVariable::SidebandResolution => {
            let eta = spec.system.eta();
            if eta >= 1.0 {
                return Err(AnalysisError::BadSweep(
                    "sideband-resolution sweep needs kappa_c > 0".into(),
                ));
            }
            let mut p = spec.system.params().clone();
            p.kappa_c = p.omega_m / value;
            p.kappa_ex = eta / (1.0 - eta) * p.kappa_c;
            Ok((validate_system(p)?, spec.probe.clone()))
        }
    }
}

// ----------------------------------------------------------------------
// figure datasets
// ----------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FigureId {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
}

impl FigureId {
    pub const ALL: [FigureId; 4] = [
        FigureId::Fig1,
        FigureId::Fig2,
        FigureId::Fig3,
        FigureId::Fig4,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            FigureId::Fig1 => "fig1",
            FigureId::Fig2 => "fig2",
            FigureId::Fig3 => "fig3",
            FigureId::Fig4 => "fig4",
        }
    }
}

impl std::str::FromStr for FigureId {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "fig1" => Ok(FigureId::Fig1),
            "fig2" => Ok(FigureId::Fig2),
            "fig3" => Ok(FigureId::Fig3),
            "fig4" => Ok(FigureId::Fig4),
            other => Err(format!("unknown figure id `{other}` (expected fig1..fig4)")),
        }
    }
}

/// One named curve with an optional extremum marker.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Series {
    pub name: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// Refined extremum (x, y), the figure's star, when meaningful.
    pub marker: Option<(f64, f64)>,
}

/// The dataset payload: sets of curves, or a 2-D grid with contour levels.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum FigureData {
    Curves {
        x_label: &'static str,
        y_label: &'static str,
        series: Vec<Series>,
    },
    Grid {
        x_label: &'static str,
        y_label: &'static str,
        z_label: &'static str,
        x: Vec<f64>,
        y: Vec<f64>,
        /// z[i][j] at (x[i], y[j]).
        z: Vec<Vec<f64>>,
        contour_levels: Vec<f64>,
    },
}

impl FigureData {
    /// Smallest contour level crossed between (i, j) and its +x/+y
    /// neighbors, if any — the flag column of the grid CSV.
    pub fn contour_flag(&self, i: usize, j: usize) -> Option<f64> {
        let FigureData::Grid {
            z, contour_levels, ..
        } = self
        else {
            return None;
        };
        let here = z[i][j];
        let mut flagged: Option<f64> = None;
        for &level in contour_levels {
            let crosses = |other: f64| (here - level) * (other - level) <= 0.0;
            let right = i + 1 < z.len() && crosses(z[i + 1][j]);
            let up = j + 1 < z[i].len() && crosses(z[i][j + 1]);
            if right || up {
                flagged = Some(flagged.map_or(level, |f: f64| f.min(level)));
            }
        }
        flagged
    }
}

/// Full parameter echo carried by every dataset; re-running the generator
/// with the same echo reproduces the dataset bit-identically.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FigureProvenance {
    pub system_template: SystemParams,
    pub p_min_w: f64,
    pub eta_grid: Option<(f64, f64, usize)>,
    pub sideband_resolutions: Option<Vec<f64>>,
    pub squeeze_r: Option<f64>,
    pub eta: Option<f64>,
    pub power_axis_db_rel_pmin: Option<(f64, f64, usize)>,
    pub squeeze_axis_db: Option<(f64, f64, usize)>,
    pub powers_db_rel_pmin: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FigureDataset {
    pub id: FigureId,
    pub data: FigureData,
    pub provenance: FigureProvenance,
}

const ETA_POINTS: usize = 199;
const RESOLUTIONS: [f64; 4] = [0.1, 1.0, 10.0, 100.0];

/// Generates the dataset behind one of the four standard figures.
/// `sys_template` supplies Ω_m, Γ_m, g_0 and ω_cav; the cavity coupling
/// rates are set per figure (fixed Ω_m/κ_c per curve, η from the sweep).
pub fn figure_dataset(
    id: FigureId,
    sys_template: &ValidatedSystem,
) -> Result<FigureDataset, AnalysisError> {
    let p_min = minimum_sql_power(sys_template)?;
    match id {
        FigureId::Fig1 | FigureId::Fig2 => sideband_noise_vs_eta(id, sys_template, p_min),
        FigureId::Fig3 => total_noise_power_squeeze_grid(sys_template, p_min),
        FigureId::Fig4 => total_noise_vs_eta(sys_template, p_min),
    }
}

fn at_resolution(
    template: &ValidatedSystem,
    resolution: f64,
    eta: f64,
) -> Result<ValidatedSystem, AnalysisError> {
    let mut p = template.params().clone();
    p.kappa_c = p.omega_m / resolution;
    p.kappa_ex = eta / (1.0 - eta) * p.kappa_c;
    Ok(validate_system(p)?)
}

fn sideband_noise_vs_eta(
    id: FigureId,
    template: &ValidatedSystem,
    p_min: f64,
) -> Result<FigureDataset, AnalysisError> {
    let etas = linspace(ETA_MIN, ETA_MAX, ETA_POINTS);
    let squeeze_r = 1.0;
    let mut series = Vec::new();
    for &resolution in &RESOLUTIONS {
        for (mode, r) in [("coherent", 0.0), ("squeezed", squeeze_r)] {
            let probe = ProbeConfig::phase_squeezed(p_min, r);
            let value = |eta: f64| -> Result<f64, AnalysisError> {
                let sys = at_resolution(template, resolution, eta)?;
                let omega_m = sys.params().omega_m;
                Ok(match id {
                    FigureId::Fig1 => closedform::imprecision_psd(&sys, &probe, omega_m)?,
                    _ => closedform::qba_psd(&sys, &probe, omega_m)?,
                })
            };
            let y: Vec<f64> = etas.iter().map(|&e| value(e)).collect::<Result<_, _>>()?;
            // grid extremum, then local golden refinement between neighbors
            let sign = if id == FigureId::Fig1 { 1.0 } else { -1.0 };
            let best = (0..y.len())
                .min_by(|&a, &b| (sign * y[a]).total_cmp(&(sign * y[b])))
                .unwrap();
            let lo = etas[best.saturating_sub(1)];
            let hi = etas[(best + 1).min(etas.len() - 1)];
            let (x_star, v_star) = golden_section_minimize(
                |e| sign * value(e).unwrap_or(f64::INFINITY),
                lo,
                hi,
                1e-10,
            );
            series.push(Series {
                name: format!("{mode}_res{resolution}"),
                x: etas.clone(),
                y,
                marker: Some((x_star, sign * v_star)),
            });
        }
    }
    Ok(FigureDataset {
        id,
        data: FigureData::Curves {
            x_label: "eta",
            y_label: if id == FigureId::Fig1 {
                "s_imp_at_sideband"
            } else {
                "s_qba_at_sideband"
            },
            series,
        },
        provenance: FigureProvenance {
            system_template: template.params().clone(),
            p_min_w: p_min,
            eta_grid: Some((ETA_MIN, ETA_MAX, ETA_POINTS)),
            sideband_resolutions: Some(RESOLUTIONS.to_vec()),
            squeeze_r: Some(squeeze_r),
            eta: None,
            power_axis_db_rel_pmin: None,
            squeeze_axis_db: None,
            powers_db_rel_pmin: None,
        },
    })
}

fn total_noise_power_squeeze_grid(
    template: &ValidatedSystem,
    p_min: f64,
) -> Result<FigureDataset, AnalysisError> {
    let eta = 0.8;
    let resolution = 22.0;
    let power_axis = (-20.0, 20.0, 81);
    let squeeze_axis = (0.0, 15.0, 61);
    let sys = at_resolution(template, resolution, eta)?;
    let sql = closedform::sql(&sys);
    let x = linspace(power_axis.0, power_axis.1, power_axis.2);
    let y = linspace(squeeze_axis.0, squeeze_axis.1, squeeze_axis.2);
    let mut z = Vec::with_capacity(x.len());
    for &p_db in &x {
        let power = p_min * 10f64.powf(p_db / 10.0);
        let mut row = Vec::with_capacity(y.len());
        for &s_db in &y {
            let probe = ProbeConfig::phase_squeezed(power, db_to_squeeze_r(s_db));
            let total = closedform::total_noise_at_sideband(&sys, &probe)?;
            row.push(10.0 * (total / sql).log10());
        }
        z.push(row);
    }
    Ok(FigureDataset {
        id: FigureId::Fig3,
        data: FigureData::Grid {
            x_label: "power_db_rel_pmin",
            y_label: "squeeze_db",
            z_label: "total_db_over_sql",
            x,
            y,
            z,
            contour_levels: vec![3.0, 10.0, 20.0],
        },
        provenance: FigureProvenance {
            system_template: template.params().clone(),
            p_min_w: p_min,
            eta_grid: None,
            sideband_resolutions: Some(vec![resolution]),
            squeeze_r: None,
            eta: Some(eta),
            power_axis_db_rel_pmin: Some(power_axis),
            squeeze_axis_db: Some(squeeze_axis),
            powers_db_rel_pmin: None,
        },
    })
}

fn total_noise_vs_eta(
    template: &ValidatedSystem,
    p_min: f64,
) -> Result<FigureDataset, AnalysisError> {
    let resolution = 22.0;
    let powers_db = [-6.0, 0.0, 6.0];
    let squeeze_db = 6.0;
    let etas = linspace(ETA_MIN, ETA_MAX, ETA_POINTS);
    let mut series = Vec::new();
    for &p_db in &powers_db {
        let power = p_min * 10f64.powf(p_db / 10.0);
        for (mode, r) in [("coherent", 0.0), ("squeezed", db_to_squeeze_r(squeeze_db))] {
            let probe = ProbeConfig::phase_squeezed(power, r);
            let y: Vec<f64> = etas
                .iter()
                .map(|&eta| {
                    let sys = at_resolution(template, resolution, eta)?;
                    Ok(closedform::total_noise_at_sideband(&sys, &probe)?)
                })
                .collect::<Result<_, AnalysisError>>()?;
            series.push(Series {
                name: format!("{mode}_{p_db:+}db"),
                x: etas.clone(),
                y,
                marker: None,
            });
        }
    }
    let sql = 2.0 / template.params().gamma_m;
    series.push(Series {
        name: "sql".into(),
        x: etas.clone(),
        y: vec![sql; etas.len()],
        marker: None,
    });
    Ok(FigureDataset {
        id: FigureId::Fig4,
        data: FigureData::Curves {
            x_label: "eta",
            y_label: "s_total_at_sideband",
            series,
        },
        provenance: FigureProvenance {
            system_template: template.params().clone(),
            p_min_w: p_min,
            eta_grid: Some((ETA_MIN, ETA_MAX, ETA_POINTS)),
            sideband_resolutions: Some(vec![resolution]),
            squeeze_r: Some(db_to_squeeze_r(squeeze_db)),
            eta: None,
            power_axis_db_rel_pmin: None,
            squeeze_axis_db: None,
            powers_db_rel_pmin: Some(powers_db.to_vec()),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::microtoroid;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn coherent_power_optimum_is_exact() {
        let sys = microtoroid();
        for eta in [0.3, 0.8, 1.0] {
            let opt = optimize_power(&sys, &ProbeConfig::coherent(1e-7), eta).unwrap();
            assert_eq!(opt.p_norm_star, 1.0);
            assert_relative_eq!(
                opt.s_min,
                2.0 / (eta.sqrt() * sys.params().gamma_m),
                max_relative = 1e-14
            );
            let d = derive(
                &sys.with_escape_efficiency(eta).unwrap(),
                &ProbeConfig::coherent(opt.power_w),
            )
            .unwrap();
            assert_relative_eq!(d.p_norm, 1.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn pure_squeezing_optimum_lossless() {
        // η = 1: 𝒫* = e^{−2r}, minimum back at the SQL.
        let sys = microtoroid();
        let r = 1.0;
        let opt = optimize_power(&sys, &ProbeConfig::phase_squeezed(1e-7, r), 1.0).unwrap();
        assert_relative_eq!(opt.p_norm_star, (-2.0 * r).exp(), max_relative = 1e-8);
        assert_relative_eq!(opt.s_min, 2.0 / sys.params().gamma_m, max_relative = 1e-12);
    }

    #[test]
    fn squeezed_power_optimum_matches_bracket_formula() {
        // r = 1, η = 0.8 on the microtoroid: frozen independent evaluation
        // 𝒫* = 0.15264239199063316, s_min·Γ_m = 2.085882553168523.
        let sys = microtoroid();
        let opt = optimize_power(&sys, &ProbeConfig::phase_squeezed(1e-7, 1.0), 0.8).unwrap();
        assert_relative_eq!(opt.p_norm_star, 0.15264239199063316, max_relative = 1e-8);
        assert_relative_eq!(
            opt.s_min * sys.params().gamma_m,
            2.085882553168523,
            max_relative = 1e-10
        );
    }

    #[test]
    fn coupling_optimum_resolved_sideband_is_highly_overcoupled() {
        let sys = microtoroid(); // Ω_m/κ_c = 22
        let p_min = minimum_sql_power(&sys).unwrap();
        let opt = optimize_coupling(&sys, &ProbeConfig::coherent(p_min)).unwrap();
        assert!(
            opt.eta_star > 0.9,
            "expected overcoupled optimum, got {}",
            opt.eta_star
        );
        // independently located minimum (grid scan at 2e3 resolution): 0.93912
        assert_relative_eq!(opt.eta_star, 0.93912, max_relative = 1e-3);
    }

    #[test]
    fn coupling_optimum_bad_cavity_squeezed_is_near_critical() {
        let sys = microtoroid();
        let mut p = sys.params().clone();
        p.kappa_c = p.omega_m / 0.1; // Ω_m/κ_c = 0.1
        let sys = validate_system(p).unwrap();
        let p_min = minimum_sql_power(&sys).unwrap();
        let opt = optimize_coupling(&sys, &ProbeConfig::phase_squeezed(p_min, 1.0)).unwrap();
        assert!(
            (opt.eta_star - 0.5).abs() < 0.05,
            "expected near-critical optimum, got {}",
            opt.eta_star
        );
        assert!(!opt.boundary_attracted);
    }

    #[test]
    fn coupling_optimum_propagates_zero_transduction() {
        let mut p = microtoroid().params().clone();
        p.g0 = 0.0;
        let sys = validate_system(p).unwrap();
        let e = optimize_coupling(&sys, &ProbeConfig::coherent(1e-7));
        assert!(matches!(
            e,
            Err(AnalysisError::ClosedForm(ClosedFormError::ZeroTransduction))
        ));
    }

    #[test]
    fn ten_db_equivalence_is_exact_when_lossless() {
        let sys = microtoroid();
        let r = 10f64.ln() / 2.0; // 10 dB
        for p_rel in [0.03, 0.3, 3.0] {
            let p_min = minimum_sql_power(&sys).unwrap();
            let eq = squeezing_power_equivalence(&sys, 1.0, p_rel * p_min, r).unwrap();
            assert_relative_eq!(eq.ratio, 10.0, max_relative = 1e-9);
            assert!(eq.deviation.abs() < 1e-9);
        }
    }

    #[test]
    fn equivalence_microtoroid_overcoupled() {
        // η = 0.8, P = P_min/4, r = 0.69: the matched root was frozen from
        // an independent evaluation of the two-root closed form.
        let sys = microtoroid();
        let p_min = minimum_sql_power(&sys).unwrap();
        let eq = squeezing_power_equivalence(&sys, 0.8, p_min / 4.0, 0.69).unwrap();
        assert_relative_eq!(eq.ratio, 4.471455639577437, max_relative = 1e-9);
        assert_relative_eq!(eq.deviation, 0.12492233987577968, max_relative = 1e-7);
    }

    #[test]
    fn undercoupled_high_power_squeezing_beats_any_power() {
        let sys = microtoroid();
        let p_min = minimum_sql_power(&sys).unwrap();
        match squeezing_power_equivalence(&sys, 0.2, 4.0 * p_min, 1.0) {
            Err(AnalysisError::NoEquivalent { .. }) => {}
            Ok(eq) => assert!(eq.ratio > 2.0f64.exp()),
            Err(other) => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn equivalence_deviation_shrinks_monotonically_toward_lossless() {
        // At fixed sideband resolution Ω_m/κ the matched-power deviation
        // decays monotonically to zero as η → 1. Each point keeps the
        // total linewidth and splits it between κ_ex and κ_c.
        let template = microtoroid();
        let r = 0.8;
        let mut last = f64::INFINITY;
        for eta in [0.6, 0.8, 0.9, 0.95, 0.99, 1.0] {
            let mut p = template.params().clone();
            let kappa = template.kappa();
            p.kappa_ex = eta * kappa;
            p.kappa_c = (1.0 - eta) * kappa;
            let sys = validate_system(p).unwrap();
            let p_sql = derive(&sys, &ProbeConfig::coherent(1e-9))
                .unwrap()
                .p_sql
                .unwrap();
            let eq = squeezing_power_equivalence(&sys, eta, 0.05 * p_sql, r).unwrap();
            let dev = eq.deviation.abs();
            assert!(dev < last, "deviation not shrinking at eta = {eta}");
            last = dev;
        }
        assert!(last < 1e-9);
    }

    #[test]
    fn sweep_rejects_bad_grids() {
        let sys = microtoroid();
        let spec = SweepSpec {
            variable: SweepVariable::Eta,
            grid: vec![0.2, 0.2],
            system: sys.clone(),
            probe: ProbeConfig::coherent(1e-7),
        };
        assert!(matches!(run_sweep(&spec), Err(AnalysisError::BadSweep(_))));
        let spec = SweepSpec {
            variable: SweepVariable::Eta,
            grid: vec![0.5, 1.0],
            system: sys,
            probe: ProbeConfig::coherent(1e-7),
        };
        assert!(matches!(run_sweep(&spec), Err(AnalysisError::BadSweep(_))));
    }

    #[test]
    fn eta_sweep_decomposes() {
        let sys = microtoroid();
        let p_min = minimum_sql_power(&sys).unwrap();
        let spec = SweepSpec {
            variable: SweepVariable::Eta,
            grid: linspace(0.1, 0.9, 17),
            system: sys,
            probe: ProbeConfig::phase_squeezed(p_min, 0.5),
        };
        let rows = run_sweep(&spec).unwrap();
        assert_eq!(rows.len(), 17);
        for row in rows {
            assert_relative_eq!(row.s_total, row.s_imp + row.s_qba, max_relative = 1e-12);
        }
    }

    #[test]
    fn figure_datasets_are_finite_and_deterministic() {
        let sys = microtoroid();
        for id in FigureId::ALL {
            let a = figure_dataset(id, &sys).unwrap();
            let b = figure_dataset(id, &sys).unwrap();
            assert_eq!(a, b);
            match &a.data {
                FigureData::Curves { series, .. } => {
                    assert!(!series.is_empty());
                    for s in series {
                        assert!(s.y.iter().all(|v| v.is_finite()));
                    }
                }
                FigureData::Grid { z, .. } => {
                    assert!(z.iter().flatten().all(|v| v.is_finite()));
                }
            }
        }
    }

    #[test]
    fn fig1_min_imprecision_decreases_with_resolution() {
        let data = figure_dataset(FigureId::Fig1, &microtoroid()).unwrap();
        let FigureData::Curves { series, .. } = &data.data else {
            panic!("fig1 is curves")
        };
        for mode in ["coherent", "squeezed"] {
            let mins: Vec<f64> = series
                .iter()
                .filter(|s| s.name.starts_with(mode))
                .map(|s| s.marker.unwrap().1)
                .collect();
            assert_eq!(mins.len(), 4);
            assert!(
                mins.windows(2).all(|w| w[1] < w[0]),
                "{mode} minima not decreasing: {mins:?}"
            );
        }
    }

    #[test]
    fn fig2_max_qba_increases_with_resolution() {
        let data = figure_dataset(FigureId::Fig2, &microtoroid()).unwrap();
        let FigureData::Curves { series, .. } = &data.data else {
            panic!("fig2 is curves")
        };
        for mode in ["coherent", "squeezed"] {
            let maxs: Vec<f64> = series
                .iter()
                .filter(|s| s.name.starts_with(mode))
                .map(|s| s.marker.unwrap().1)
                .collect();
            assert!(
                maxs.windows(2).all(|w| w[1] > w[0]),
                "{mode} maxima not increasing: {maxs:?}"
            );
        }
    }

    #[test]
    fn fig4_reference_power_trace_touches_sql_band() {
        let data = figure_dataset(FigureId::Fig4, &microtoroid()).unwrap();
        let FigureData::Curves { series, .. } = &data.data else {
            panic!("fig4 is curves")
        };
        assert_eq!(series.len(), 7);
        let sql = 2.0 / microtoroid().params().gamma_m;
        let cyan = series.iter().find(|s| s.name == "coherent_+0db").unwrap();
        let min_db = cyan
            .y
            .iter()
            .map(|&v| 10.0 * (v / sql).log10())
            .fold(f64::INFINITY, f64::min);
        assert!(
            min_db < 3.0,
            "coherent P_min trace stays {min_db} dB above SQL"
        );
    }

    #[test]
    fn fig3_grid_has_contour_crossings() {
        let data = figure_dataset(FigureId::Fig3, &microtoroid()).unwrap();
        let FigureData::Grid { x, y, .. } = &data.data else {
            panic!("fig3 is a grid")
        };
        let mut found = [false; 3];
        for i in 0..x.len() {
            for j in 0..y.len() {
                if let Some(level) = data.data.contour_flag(i, j) {
                    for (k, l) in [3.0, 10.0, 20.0].iter().enumerate() {
                        if level == *l {
                            found[k] = true;
                        }
                    }
                }
            }
        }
        assert_eq!(found, [true; 3]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn golden_section_matches_analytic_bracket_ratio(
            eta in 0.05f64..1.0,
            resolution in 0.1f64..100.0,
            r in 0.05f64..2.0,
        ) {
            let mut p = microtoroid().params().clone();
            p.kappa_c = p.omega_m / resolution;
            let sys = validate_system(p).unwrap();
            let opt = optimize_power(&sys, &ProbeConfig::phase_squeezed(1e-7, r), eta).unwrap();
            let recoupled = sys.with_escape_efficiency(eta).unwrap();
            let obm = recoupled.params().omega_m / recoupled.kappa();
            let admix = 4.0 * eta * (1.0 - eta) / (1.0 + 4.0 * obm * obm);
            let (e2r, em2r) = ((2.0 * r).exp(), (-2.0 * r).exp());
            let bracket_p = em2r + admix * (1.0 - em2r);
            let bracket_x = e2r + (1.0 - eta) * (1.0 - e2r);
            let expect = (bracket_p / bracket_x).sqrt();
            prop_assert!(
                (opt.p_norm_star / expect - 1.0).abs() < 1e-8,
                "got {} want {}", opt.p_norm_star, expect
            );
        }
    }
}
