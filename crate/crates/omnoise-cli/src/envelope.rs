//! Result envelope: schema version, resolved parameter echo in base
//! units, the derived-quantities block and the command payload. Re-running
//! a command from the echoed parameters reproduces the payload
//! bit-identically.

use serde::Serialize;

use omnoise::{derive, minimum_sql_power, ProbeConfig, ValidatedSystem};

use crate::config::Resolved;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct SystemEcho {
    pub omega_m_rad_s: f64,
    pub gamma_m_rad_s: f64,
    pub kappa_c_rad_s: f64,
    pub kappa_ex_rad_s: f64,
    pub g0_rad_s: f64,
    pub omega_cav_rad_s: f64,
    pub epsilon: f64,
    pub mass_kg: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeEcho {
    pub power_w: f64,
    pub detuning_rad_s: f64,
    pub squeeze_r: f64,
    pub squeeze_angle_rad: f64,
    pub antisqueeze_r: Option<f64>,
    pub loss_port_squeeze_r: f64,
    pub s_ext: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResolvedEcho {
    pub system: SystemEcho,
    pub probe: ProbeEcho,
}

#[derive(Debug, Clone, Serialize)]
pub struct DerivedEcho {
    pub kappa_rad_s: f64,
    pub eta: f64,
    pub photon_flux_amp: f64,
    pub n_cav: f64,
    pub g_rad_s: f64,
    pub omega_m_bar: f64,
    pub p_norm: f64,
    pub p_min_w: Option<f64>,
    /// P_min relative to the probe power, dB.
    pub p_min_rel_probe_db: Option<f64>,
    pub p_sql_w: Option<f64>,
    pub sql_zp2_per_rad_s: f64,
    pub phi_d_rad: f64,
    pub phi_out_rad: f64,
    pub x_zpf_m: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResultEnvelope<T: Serialize> {
    pub schema_version: u32,
    pub resolved: ResolvedEcho,
    pub derived: DerivedEcho,
    pub result: T,
}

pub fn derived_echo(
    system: &ValidatedSystem,
    probe: &ProbeConfig,
) -> Result<DerivedEcho, omnoise::ModelError> {
    let d = derive(system, probe)?;
    let p_min = minimum_sql_power(system).ok();
    Ok(DerivedEcho {
        kappa_rad_s: d.kappa,
        eta: d.eta,
        photon_flux_amp: d.photon_flux_amp,
        n_cav: d.n_cav,
        g_rad_s: d.g_eff,
        omega_m_bar: d.omega_m_bar,
        p_norm: d.p_norm,
        p_min_w: p_min,
        p_min_rel_probe_db: p_min
            .and_then(|pm| (probe.power > 0.0).then(|| 10.0 * (pm / probe.power).log10())),
        p_sql_w: d.p_sql,
        sql_zp2_per_rad_s: 2.0 / system.params().gamma_m,
        phi_d_rad: d.phi_d,
        phi_out_rad: d.phi_out,
        x_zpf_m: system.x_zpf(),
    })
}

pub fn wrap<T: Serialize>(
    resolved: &Resolved,
    result: T,
) -> Result<ResultEnvelope<T>, omnoise::ModelError> {
    let p = resolved.system.params();
    Ok(ResultEnvelope {
        schema_version: SCHEMA_VERSION,
        resolved: ResolvedEcho {
            system: SystemEcho {
                omega_m_rad_s: p.omega_m,
                gamma_m_rad_s: p.gamma_m,
                kappa_c_rad_s: p.kappa_c,
                kappa_ex_rad_s: p.kappa_ex,
                g0_rad_s: p.g0,
                omega_cav_rad_s: p.omega_cav,
                epsilon: p.epsilon,
                mass_kg: p.mass,
            },
            probe: ProbeEcho {
                power_w: resolved.probe.power,
                detuning_rad_s: resolved.probe.detuning,
                squeeze_r: resolved.probe.squeeze_r,
                squeeze_angle_rad: resolved.probe.squeeze_angle,
                antisqueeze_r: resolved.probe.antisqueeze_r,
                loss_port_squeeze_r: resolved.probe.loss_port_squeeze_r,
                s_ext: match resolved.probe.external_force_psd {
                    omnoise::ForcePsd::Constant(v) => v,
                    omnoise::ForcePsd::Table { .. } => f64::NAN,
                },
            },
        },
        derived: derived_echo(&resolved.system, &resolved.probe)?,
        result,
    })
}
