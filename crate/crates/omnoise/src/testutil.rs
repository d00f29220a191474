//! Shared unit-test fixtures.

use crate::model::{validate_system, SystemParams, ValidatedSystem};

/// Microtoroid parameters of the worked example: Ω_m = 2π·78 MHz,
/// Q_m = 9600, g_0 = 2π·1.7 kHz, Q_c = 5.5e7, κ_c = Ω_m/22, critically
/// coupled unless recoupled.
pub(crate) fn microtoroid() -> ValidatedSystem {
    let tau = std::f64::consts::TAU;
    let omega_m = tau * 78e6;
    let kappa_c = omega_m / 22.0;
    validate_system(SystemParams {
        omega_m,
        gamma_m: omega_m / 9600.0,
        kappa_c,
        kappa_ex: kappa_c,
        g0: tau * 1.7e3,
        omega_cav: 5.5e7 * kappa_c,
        epsilon: -1.0,
        mass: None,
    })
    .unwrap()
}

/// Unit-scale cavity with Ω_m = 1, Γ_m = 0.01 and no optomechanical
/// coupling; handy for checking the optical algebra in isolation.
pub(crate) fn bare_cavity(kappa_c: f64, kappa_ex: f64) -> ValidatedSystem {
    validate_system(SystemParams {
        omega_m: 1.0,
        gamma_m: 0.01,
        kappa_c,
        kappa_ex,
        g0: 0.0,
        omega_cav: 1e15,
        epsilon: 1.0,
        mass: None,
    })
    .unwrap()
}
