//! Closed-form noise expressions for resonant probing (Δ = 0).
//!
//! Implements the analytic results for a cavity optomechanical system
//! probed on resonance: optical and mechanical susceptibilities, the
//! output-quadrature coefficients, the output phase PSD, the imprecision
//! and quantum back-action displacement PSDs, the total measurement noise
//! at the mechanical sideband and the standard quantum limit 2/Γ_m.
//!
//! The expressions assume the drive and loss ports carry no X–P
//! cross-correlation (squeeze angles at multiples of π/2); the
//! [`crate::solver`] module handles arbitrary angles and detunings
//! numerically. Detuned closed forms do not exist here at all: every
//! operation checks Δ = 0 and reports [`ClosedFormError::NotResonant`]
//! otherwise.

use num_complex::Complex64;
use serde::Serialize;

use crate::model::{derive, ProbeConfig, ValidatedSystem};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ClosedFormError {
    /// The closed forms hold only at zero detuning.
    #[error("closed-form engine requires resonant probing, got detuning = {0:e} rad/s")]
    NotResonant(f64),
    /// No transduction (g_0, drive flux or κ_ex vanish): imprecision noise
    /// is infinite and reported as an error, not an IEEE infinity.
    #[error("zero optomechanical transduction: imprecision noise is unbounded")]
    ZeroTransduction,
    #[error(transparent)]
    Model(#[from] crate::model::ModelError),
}

/// Optical susceptibility χ_c(Ω) = 1/((κ/2 − iΩ)² + Δ²), units 1/(rad/s)².
pub fn chi_c(sys: &ValidatedSystem, detuning: f64, omega: f64) -> Complex64 {
    let half_kappa = 0.5 * sys.kappa();
    let a = Complex64::new(half_kappa, -omega);
    1.0 / (a * a + detuning * detuning)
}

/// Mechanical susceptibility χ_m(Ω) = 1/(Ω_m² − Ω² − iΩΓ_m), units 1/(rad/s)².
pub fn chi_m(sys: &ValidatedSystem, omega: f64) -> Complex64 {
    let p = sys.params();
    1.0 / Complex64::new(p.omega_m * p.omega_m - omega * omega, -omega * p.gamma_m)
}

/// Coefficients mapping input quadratures and mechanical position onto the
/// output quadratures at resonance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OutputCoefficients {
    /// Loss-port coefficient 2√(η(1−η))/(1−2iΩ̄) on either quadrature.
    pub c_vac: Complex64,
    /// Drive coefficient (2η−1+2iΩ̄)/(1−2iΩ̄) on either quadrature.
    pub c_d: Complex64,
    /// Transduction coefficient −2g√(η/κ)/(1−2iΩ̄), phase quadrature only,
    /// (rad/s)^{1/2} per zero-point unit.
    pub c_x: Complex64,
}

/// Resonant state shared by the closed-form operations.
///
/// Precomputes η, Ω̄_m, the drive flux and the port spectra once; the
/// per-frequency operations below are then plain arithmetic.
struct Resonant {
    eta: f64,
    kappa: f64,
    omega_m: f64,
    gamma_m: f64,
    g0: f64,
    sd2: f64,
    g_eff: f64,
    p_norm: f64,
    /// Drive-port (S^X, S^P); cross-spectra are zero by assumption here.
    drive: (f64, f64),
    /// Loss-port (S^X, S^P).
    loss: (f64, f64),
}

impl Resonant {
    fn new(sys: &ValidatedSystem, probe: &ProbeConfig) -> Result<Self, ClosedFormError> {
        if probe.detuning != 0.0 {
            return Err(ClosedFormError::NotResonant(probe.detuning));
        }
        let d = derive(sys, probe)?;
        let p = sys.params();
        let ds = probe.drive_spectrum();
        let ls = probe.loss_spectrum();
        Ok(Resonant {
            eta: d.eta,
            kappa: d.kappa,
            omega_m: p.omega_m,
            gamma_m: p.gamma_m,
            g0: p.g0,
            sd2: d.photon_flux_amp * d.photon_flux_amp,
            g_eff: d.g_eff,
            p_norm: d.p_norm,
            drive: (ds.sxx, ds.spp),
            loss: (ls.sxx, ls.spp),
        })
    }

    fn omega_bar(&self, omega: f64) -> f64 {
        omega / self.kappa
    }

    /// Loss-port admixture 4η(1−η)/(1+4Ω̄²) at sideband frequency Ω.
    fn loss_admixture(&self, omega: f64) -> f64 {
        let ob = self.omega_bar(omega);
        4.0 * self.eta * (1.0 - self.eta) / (1.0 + 4.0 * ob * ob)
    }

    /// Phase-noise bracket S_d^P + A(Ω)·(S_vac^P − S_d^P).
    fn bracket_phase(&self, omega: f64) -> f64 {
        self.drive.1 + self.loss_admixture(omega) * (self.loss.1 - self.drive.1)
    }

    /// Amplitude-noise bracket S_d^X + (1−η)·(S_vac^X − S_d^X).
    fn bracket_amp(&self) -> f64 {
        self.drive.0 + (1.0 - self.eta) * (self.loss.0 - self.drive.0)
    }

    fn transduction_is_zero(&self) -> bool {
        self.g0 == 0.0 || self.sd2 == 0.0 || self.eta == 0.0
    }

    /// Transduction gain (4g²η/κ)/(1+4Ω̄²) from displacement PSD to output
    /// phase PSD.
    fn gain(&self, omega: f64) -> f64 {
        let ob = self.omega_bar(omega);
        4.0 * self.g_eff * self.g_eff * self.eta / self.kappa / (1.0 + 4.0 * ob * ob)
    }

    /// Force-level QBA spectrum (4g²/κ)·bracket_X/(1+4Ω̄²).
    fn qba_force(&self, omega: f64) -> f64 {
        let ob = self.omega_bar(omega);
        4.0 * self.g_eff * self.g_eff / self.kappa / (1.0 + 4.0 * ob * ob) * self.bracket_amp()
    }
}

/// Output coefficients at sideband frequency Ω for resonant probing.
pub fn output_coefficients(
    sys: &ValidatedSystem,
    probe: &ProbeConfig,
    omega: f64,
) -> Result<OutputCoefficients, ClosedFormError> {
    let r = Resonant::new(sys, probe)?;
    let den = Complex64::new(1.0, -2.0 * r.omega_bar(omega));
    Ok(OutputCoefficients {
        c_vac: 2.0 * (r.eta * (1.0 - r.eta)).sqrt() / den,
        c_d: Complex64::new(2.0 * r.eta - 1.0, 2.0 * r.omega_bar(omega)) / den,
        c_x: -2.0 * r.g_eff * (r.eta / r.kappa).sqrt() / den,
    })
}

/// Output phase-quadrature PSD given the displacement PSD value `s_x` at Ω:
///
/// S_out^P = (1 − A)·S_d^P + A·S_vac^P + (4g²η/κ)/(1+4Ω̄²)·S_x,
/// with A = 4η(1−η)/(1+4Ω̄²).
pub fn output_phase_psd(
    sys: &ValidatedSystem,
    probe: &ProbeConfig,
    omega: f64,
    s_x: f64,
) -> Result<f64, ClosedFormError> {
    let r = Resonant::new(sys, probe)?;
    let a = r.loss_admixture(omega);
    Ok((1.0 - a) * r.drive.1 + a * r.loss.1 + r.gain(omega) * s_x)
}

/// Imprecision noise PSD in zero-point units²/(rad/s):
///
/// S_x^imp = (1+4Ω̄²)κ²/(64η²g_0²s̄_d²) · [S_d^P + A·(S_vac^P − S_d^P)].
pub fn imprecision_psd(
    sys: &ValidatedSystem,
    probe: &ProbeConfig,
    omega: f64,
) -> Result<f64, ClosedFormError> {
    let r = Resonant::new(sys, probe)?;
    if r.transduction_is_zero() {
        return Err(ClosedFormError::ZeroTransduction);
    }
    let ob = r.omega_bar(omega);
    let prefactor =
        (1.0 + 4.0 * ob * ob) * r.kappa * r.kappa / (64.0 * r.eta * r.eta * r.g0 * r.g0 * r.sd2);
    Ok(prefactor * r.bracket_phase(omega))
}

/// Quantum back-action displacement PSD in zero-point units²/(rad/s):
///
/// S_x^qba = |χ_m|²·64ηg_0²s̄_d²Ω̄_m²/(1+4Ω̄²) · [S_d^X + (1−η)(S_vac^X − S_d^X)].
pub fn qba_psd(
    sys: &ValidatedSystem,
    probe: &ProbeConfig,
    omega: f64,
) -> Result<f64, ClosedFormError> {
    let r = Resonant::new(sys, probe)?;
    Ok(r.omega_m * r.omega_m * chi_m(sys, omega).norm_sqr() * r.qba_force(omega))
}

/// Driven displacement PSD Ω_m²|χ_m|²(S_ex + S_qba), zero-point units²/(rad/s).
pub fn displacement_psd(
    sys: &ValidatedSystem,
    probe: &ProbeConfig,
    omega: f64,
) -> Result<f64, ClosedFormError> {
    let r = Resonant::new(sys, probe)?;
    let force = probe.external_force_psd.at(omega) + r.qba_force(omega);
    Ok(r.omega_m * r.omega_m * chi_m(sys, omega).norm_sqr() * force)
}

/// Total quantum measurement noise at the mechanical sideband:
///
/// S_x^tot[Ω_m] = (1/(√ηΓ_m𝒫))·[S_d^P + A_m(S_vac^P − S_d^P)]
///              + (𝒫/(√ηΓ_m))·[S_d^X + (1−η)(S_vac^X − S_d^X)].
pub fn total_noise_at_sideband(
    sys: &ValidatedSystem,
    probe: &ProbeConfig,
) -> Result<f64, ClosedFormError> {
    let r = Resonant::new(sys, probe)?;
    if r.transduction_is_zero() {
        return Err(ClosedFormError::ZeroTransduction);
    }
    let root_eta_gamma = r.eta.sqrt() * r.gamma_m;
    Ok(r.bracket_phase(r.omega_m) / (root_eta_gamma * r.p_norm)
        + r.p_norm / root_eta_gamma * r.bracket_amp())
}

/// The standard quantum limit 2/Γ_m, zero-point units²/(rad/s).
pub fn sql(sys: &ValidatedSystem) -> f64 {
    2.0 / sys.params().gamma_m
}

/// Frequency-resolved noise budget over a caller-supplied grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoiseBudget {
    /// Sideband frequencies, rad/s.
    pub omega: Vec<f64>,
    /// Imprecision PSD per grid point.
    pub s_imp: Vec<f64>,
    /// QBA-driven displacement PSD per grid point.
    pub s_qba: Vec<f64>,
    /// External-force-driven displacement PSD per grid point.
    pub s_ext: Vec<f64>,
    /// Total s_imp + s_qba + s_ext per grid point.
    pub s_total: Vec<f64>,
    /// Total noise at the mechanical sideband from the normalized-power
    /// expression (external forces excluded).
    pub s_total_at_sideband: f64,
    /// SQL reference 2/Γ_m.
    pub sql: f64,
}

impl NoiseBudget {
    /// Evaluates the closed-form budget on `grid`.
    pub fn closed_form(
        sys: &ValidatedSystem,
        probe: &ProbeConfig,
        grid: &[f64],
    ) -> Result<NoiseBudget, ClosedFormError> {
        let r = Resonant::new(sys, probe)?;
        if r.transduction_is_zero() {
            return Err(ClosedFormError::ZeroTransduction);
        }
        let mut s_imp = Vec::with_capacity(grid.len());
        let mut s_qba = Vec::with_capacity(grid.len());
        let mut s_ext = Vec::with_capacity(grid.len());
        let mut s_total = Vec::with_capacity(grid.len());
        for &omega in grid {
            let imp = imprecision_psd(sys, probe, omega)?;
            let qba = qba_psd(sys, probe, omega)?;
            let filter = r.omega_m * r.omega_m * chi_m(sys, omega).norm_sqr();
            let ext = filter * probe.external_force_psd.at(omega);
            s_imp.push(imp);
            s_qba.push(qba);
            s_ext.push(ext);
            s_total.push(imp + qba + ext);
        }
        Ok(NoiseBudget {
            omega: grid.to_vec(),
            s_imp,
            s_qba,
            s_ext,
            s_total,
            s_total_at_sideband: total_noise_at_sideband(sys, probe)?,
            sql: sql(sys),
        })
    }
}
