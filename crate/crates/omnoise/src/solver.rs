//! Independent frequency-domain solver of the linearized dynamics.
//!
//! For each sideband frequency Ω the linearized quantum Langevin equations
//! for the quadratures (X_a, P_a) of the intracavity field and the
//! mechanical (x, p) form a 4×4 complex linear system driven by five
//! inputs: the drive and loss-port quadratures and an external force. The
//! solver assembles that system verbatim from the equations of motion,
//! solves it by pivoted Gaussian elimination per frequency, applies the
//! input–output relation and the boundary-phase frame rotations, and
//! assembles output spectra from arbitrary port spectra.
//!
//! Nothing here shares algebra with [`crate::closedform`]; at Δ = 0 the
//! two engines are cross-checked against each other to 1e−9 relative by
//! [`verify_against_closedform`] (no closed forms exist off resonance,
//! where this module is the only engine).

use num_complex::Complex64;
use serde::Serialize;

use crate::closedform::{self, ClosedFormError, NoiseBudget};
use crate::model::{derive, ForcePsd, PortSpectrum, ProbeConfig, ValidatedSystem};

/// Input column order of every transfer row.
pub const INPUTS: [&str; 5] = ["x_drive", "p_drive", "x_loss", "p_loss", "force"];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolverError {
    /// The assembled system was numerically singular at `omega`. Not
    /// expected for physical parameters (Γ_m > 0, κ > 0).
    #[error("singular linearized system at omega = {omega:e} rad/s")]
    SingularSystem { omega: f64 },
    /// Port spectra with X–P cross-correlations have no closed-form
    /// counterpart to verify against.
    #[error("closed-form comparison requires ports without X-P cross-correlation")]
    CorrelatedQuadratures,
    /// The closed-form engine only exists at Δ = 0.
    #[error(transparent)]
    ClosedForm(#[from] ClosedFormError),
    #[error(transparent)]
    Model(#[from] crate::model::ModelError),
}

/// Real 2×2 rotation acting on (X, P) quadrature pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameRotation {
    pub angle: f64,
}

impl FrameRotation {
    /// [[cos, −sin], [sin, cos]].
    pub fn matrix(&self) -> [[f64; 2]; 2] {
        let (s, c) = self.angle.sin_cos();
        [[c, -s], [s, c]]
    }
}

/// Transfer coefficients at one frequency.
///
/// `out_x`/`out_p` hold ε·(X_out, P_out) per unit input, expressed in the
/// lab output frame with drive columns in the drive field's own frame;
/// `position` is the mechanical response x per unit input. Spectra are
/// insensitive to the ε convention; [`TransferPoint::output_row`] restores
/// the signed amplitudes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransferPoint {
    pub omega: f64,
    pub out_x: [Complex64; 5],
    pub out_p: [Complex64; 5],
    pub position: [Complex64; 5],
}

impl TransferPoint {
    /// Output amplitude row with the cavity-geometry sign ε applied.
    pub fn output_row(&self, epsilon: f64, phase_quadrature: bool) -> [Complex64; 5] {
        let row = if phase_quadrature {
            &self.out_p
        } else {
            &self.out_x
        };
        row.map(|c| epsilon * c)
    }

    /// Transfer row of the output quadrature at angle θ in the lab frame.
    pub fn quadrature_row(&self, theta: f64) -> [Complex64; 5] {
        let (s, c) = theta.sin_cos();
        std::array::from_fn(|j| c * self.out_x[j] + s * self.out_p[j])
    }
}

/// Frequency-indexed transfer coefficients.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransferSet {
    pub points: Vec<TransferPoint>,
}

/// Spectral description of all five inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct PortInputs {
    /// Drive-port spectrum in the drive field's own frame.
    pub drive: PortSpectrum,
    /// Loss-port spectrum in the intracavity frame.
    pub loss: PortSpectrum,
    /// External force spectrum.
    pub force: ForcePsd,
}

impl PortInputs {
    pub fn from_probe(probe: &ProbeConfig) -> Self {
        PortInputs {
            drive: probe.drive_spectrum(),
            loss: probe.loss_spectrum(),
            force: probe.external_force_psd.clone(),
        }
    }

    pub fn all_vacuum() -> Self {
        PortInputs {
            drive: PortSpectrum::vacuum(),
            loss: PortSpectrum::vacuum(),
            force: ForcePsd::Constant(0.0),
        }
    }
}

/// 4×4 system matrix on the unknowns (X_a, P_a, x, p) plus the 4×5 map
/// from the inputs (X_d′, P_d′, X_vac′, P_vac′, F_ex) to the equation
/// right-hand sides.
pub type AssembledSystem = ([[Complex64; 4]; 4], [[f64; 5]; 4]);

/// Assembles the frequency-domain system at Ω.
///
/// Equations (time-derivative → −iΩ):
///   (κ/2 − iΩ)X_a + ΔP_a            = √κ_ex X_d′ + √κ_c X_vac′
///   −ΔX_a + (κ/2 − iΩ)P_a + g x     = √κ_ex P_d′ + √κ_c P_vac′
///   −iΩ x − Ω_m p                   = 0
///   g X_a + Ω_m x + (Γ_m − iΩ) p    = F_ex
pub fn assemble_system(
    sys: &ValidatedSystem,
    probe: &ProbeConfig,
    omega: f64,
) -> Result<AssembledSystem, SolverError> {
    let d = derive(sys, probe)?;
    Ok(assemble_with_g(sys, probe.detuning, d.g_eff, omega))
}

fn assemble_with_g(sys: &ValidatedSystem, detuning: f64, g: f64, omega: f64) -> AssembledSystem {
    let p = sys.params();
    let zero = Complex64::new(0.0, 0.0);
    let decay = Complex64::new(0.5 * sys.kappa(), -omega);
    let delta = Complex64::new(detuning, 0.0);
    let matrix = [
        [decay, delta, zero, zero],
        [-delta, decay, Complex64::new(g, 0.0), zero],
        [
            zero,
            zero,
            Complex64::new(0.0, -omega),
            Complex64::new(-p.omega_m, 0.0),
        ],
        [
            Complex64::new(g, 0.0),
            zero,
            Complex64::new(p.omega_m, 0.0),
            Complex64::new(p.gamma_m, -omega),
        ],
    ];
    let (rex, rc) = (p.kappa_ex.sqrt(), p.kappa_c.sqrt());
    let inputs = [
        [rex, 0.0, rc, 0.0, 0.0],
        [0.0, rex, 0.0, rc, 0.0],
        [0.0; 5],
        [0.0, 0.0, 0.0, 0.0, 1.0],
    ];
    (matrix, inputs)
}

/// Solves M·Z = B for a 4×4 complex M and 4×5 B by Gaussian elimination
/// with partial pivoting.
#[allow(clippy::needless_range_loop)] // index form mirrors the elimination
fn solve4(
    mut m: [[Complex64; 4]; 4],
    mut b: [[Complex64; 5]; 4],
    omega: f64,
) -> Result<[[Complex64; 5]; 4], SolverError> {
    let scale: f64 = m.iter().flatten().map(|c| c.norm()).fold(0.0, f64::max);
    for col in 0..4 {
        let pivot_row = (col..4)
            .max_by(|&a, &b| m[a][col].norm().total_cmp(&m[b][col].norm()))
            .unwrap();
        if m[pivot_row][col].norm() <= scale * 1e-300 {
            return Err(SolverError::SingularSystem { omega });
        }
        m.swap(col, pivot_row);
        b.swap(col, pivot_row);
        let inv_pivot = 1.0 / m[col][col];
        for row in col + 1..4 {
            let factor = m[row][col] * inv_pivot;
            if factor == Complex64::new(0.0, 0.0) {
                continue;
            }
            for k in col..4 {
                let sub = factor * m[col][k];
                m[row][k] -= sub;
            }
            for k in 0..5 {
                let sub = factor * b[col][k];
                b[row][k] -= sub;
            }
        }
    }
    let mut z = [[Complex64::new(0.0, 0.0); 5]; 4];
    for row in (0..4).rev() {
        for k in 0..5 {
            let mut acc = b[row][k];
            for col in row + 1..4 {
                acc -= m[row][col] * z[col][k];
            }
            z[row][k] = acc / m[row][row];
        }
    }
    Ok(z)
}

/// Solves the transfer coefficients over `omega_grid`.
///
/// Per frequency the linear system is solved once per input column, the
/// input–output relation ε·s_out = √κ_ex·a − s_d is applied, drive columns
/// are rotated from the drive frame by φ_d and output rows into the lab
/// frame by −φ_out, so the returned quantities refer to externally defined
/// quadratures.
pub fn solve_transfer(
    sys: &ValidatedSystem,
    probe: &ProbeConfig,
    omega_grid: &[f64],
) -> Result<TransferSet, SolverError> {
    let d = derive(sys, probe)?;
    solve_transfer_with_g(sys, probe.detuning, d.g_eff, omega_grid)
}

/// As [`solve_transfer`] with an explicit effective coupling, used
/// internally to freeze the oscillator (g = 0) for imprecision floors.
fn solve_transfer_with_g(
    sys: &ValidatedSystem,
    detuning: f64,
    g: f64,
    omega_grid: &[f64],
) -> Result<TransferSet, SolverError> {
    let p = sys.params();
    let (phi_d, phi_out) = crate::model::boundary_phases(sys, detuning);
    let rot_d = FrameRotation { angle: phi_d }.matrix();
    let rot_out = FrameRotation { angle: -phi_out }.matrix();
    let rex = p.kappa_ex.sqrt();
    let mut points = Vec::with_capacity(omega_grid.len());
    for &omega in omega_grid {
        let (m, inputs) = assemble_with_g(sys, detuning, g, omega);
        let b: [[Complex64; 5]; 4] =
            std::array::from_fn(|r| std::array::from_fn(|c| Complex64::new(inputs[r][c], 0.0)));
        let z = solve4(m, b, omega)?;
        // ε·s_out = √κ_ex·a − s_d, column-wise
        let mut out_x: [Complex64; 5] = std::array::from_fn(|j| rex * z[0][j]);
        let mut out_p: [Complex64; 5] = std::array::from_fn(|j| rex * z[1][j]);
        out_x[0] -= 1.0;
        out_p[1] -= 1.0;
        let mut position: [Complex64; 5] = std::array::from_fn(|j| z[2][j]);
        // drive columns: own frame -> intracavity frame is R(φ_d)
        for row in [&mut out_x, &mut out_p, &mut position] {
            let (c0, c1) = (row[0], row[1]);
            row[0] = rot_d[0][0] * c0 + rot_d[1][0] * c1;
            row[1] = rot_d[0][1] * c0 + rot_d[1][1] * c1;
        }
        // output rows: intracavity frame -> lab frame is R(−φ_out)
        for j in 0..5 {
            let (x, p_) = (out_x[j], out_p[j]);
            out_x[j] = rot_out[0][0] * x + rot_out[0][1] * p_;
            out_p[j] = rot_out[1][0] * x + rot_out[1][1] * p_;
        }
        points.push(TransferPoint {
            omega,
            out_x,
            out_p,
            position,
        });
    }
    Ok(TransferSet { points })
}

fn row_psd(row: &[Complex64; 5], ports: &PortInputs, omega: f64) -> f64 {
    pair_psd(row[0], row[1], &ports.drive)
        + pair_psd(row[2], row[3], &ports.loss)
        + row[4].norm_sqr() * ports.force.at(omega)
}

fn pair_psd(tx: Complex64, tp: Complex64, s: &PortSpectrum) -> f64 {
    tx.norm_sqr() * s.sxx + tp.norm_sqr() * s.spp + 2.0 * (tx * tp.conj() * s.sxp).re
}

/// Output PSD of the quadrature at angle θ (lab frame), per grid point:
///
/// S_θ(Ω) = Σ_ports |T_Xθ|²·S^X + |T_Pθ|²·S^P + 2Re(T_Xθ·T_Pθ*·S^XP),
/// plus |T_Fθ|²·S_ex for the force column. Ports are mutually independent.
pub fn psd_from_transfers(
    transfers: &TransferSet,
    ports: &PortInputs,
    quadrature_angle: f64,
) -> Vec<f64> {
    transfers
        .points
        .iter()
        .map(|pt| row_psd(&pt.quadrature_row(quadrature_angle), ports, pt.omega))
        .collect()
}

/// Displacement PSD (zero-point units²/(rad/s)) per grid point, from the
/// position row.
pub fn position_psd_from_transfers(transfers: &TransferSet, ports: &PortInputs) -> Vec<f64> {
    transfers
        .points
        .iter()
        .map(|pt| row_psd(&pt.position, ports, pt.omega))
        .collect()
}

fn position_psd_optical(pt: &TransferPoint, ports: &PortInputs) -> f64 {
    pair_psd(pt.position[0], pt.position[1], &ports.drive)
        + pair_psd(pt.position[2], pt.position[3], &ports.loss)
}

/// Noise budget via the solver engine, valid at any detuning.
///
/// The decomposition referred to displacement is:
/// * `s_imp` — output phase PSD of the same cavity with the oscillator
///   frozen (g = 0), divided by the transduction gain |T_P,F/x_F|²;
/// * `s_qba` — position PSD driven by the optical ports;
/// * `s_ext` — position PSD driven by the external force;
/// * `s_total` — the full output phase PSD divided by the gain. On
///   resonance it equals the sum of the parts; off resonance it also
///   carries the correlations between direct and transduced paths.
pub fn noise_budget(
    sys: &ValidatedSystem,
    probe: &ProbeConfig,
    grid: &[f64],
) -> Result<NoiseBudget, SolverError> {
    let d = derive(sys, probe)?;
    if d.g_eff == 0.0 || d.eta == 0.0 {
        return Err(SolverError::ClosedForm(ClosedFormError::ZeroTransduction));
    }
    let ports = PortInputs::from_probe(probe);
    let omega_m = sys.params().omega_m;
    let mut full_grid = grid.to_vec();
    let sideband_index = match full_grid.iter().position(|&w| w == omega_m) {
        Some(i) => i,
        None => {
            full_grid.push(omega_m);
            full_grid.len() - 1
        }
    };
    let full = solve_transfer(sys, probe, &full_grid)?;
    let frozen = solve_transfer_with_g(sys, probe.detuning, 0.0, &full_grid)?;
    let theta = std::f64::consts::FRAC_PI_2;
    let mut budget = NoiseBudget {
        omega: grid.to_vec(),
        s_imp: Vec::with_capacity(grid.len()),
        s_qba: Vec::with_capacity(grid.len()),
        s_ext: Vec::with_capacity(grid.len()),
        s_total: Vec::with_capacity(grid.len()),
        s_total_at_sideband: 0.0,
        sql: closedform::sql(sys),
    };
    for (i, (pt, fz)) in full.points.iter().zip(&frozen.points).enumerate() {
        let gain = (pt.out_p[4] / pt.position[4]).norm_sqr();
        if gain == 0.0 {
            return Err(SolverError::ClosedForm(ClosedFormError::ZeroTransduction));
        }
        let s_imp = row_psd(&fz.quadrature_row(theta), &ports, pt.omega) / gain;
        let s_qba = position_psd_optical(pt, &ports);
        let s_ext = pt.position[4].norm_sqr() * ports.force.at(pt.omega);
        let s_total = row_psd(&pt.quadrature_row(theta), &ports, pt.omega) / gain;
        if i == sideband_index {
            budget.s_total_at_sideband = s_total - s_ext;
        }
        if i < grid.len() {
            budget.s_imp.push(s_imp);
            budget.s_qba.push(s_qba);
            budget.s_ext.push(s_ext);
            budget.s_total.push(s_total);
        }
    }
    Ok(budget)
}

/// Maximum relative deviations between the solver and the closed forms at
/// Δ = 0. `max_rel_imprecision` is `None` when the closed form reports
/// zero transduction and the comparison is skipped.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub max_rel_coefficients: f64,
    pub max_rel_output_psd: f64,
    pub max_rel_imprecision: Option<f64>,
    pub max_rel_qba: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl ComparisonReport {
    pub fn worst(&self) -> f64 {
        self.max_rel_coefficients
            .max(self.max_rel_output_psd)
            .max(self.max_rel_imprecision.unwrap_or(0.0))
            .max(self.max_rel_qba)
    }
}

/// Cross-validates the solver against every closed form on `omega_grid`.
///
/// Compares output coefficients, the output phase PSD, the imprecision
/// PSD (through the common transduction gain) and the QBA PSD; passes iff
/// every relative deviation stays below 1e−9.
pub fn verify_against_closedform(
    sys: &ValidatedSystem,
    probe: &ProbeConfig,
    omega_grid: &[f64],
) -> Result<ComparisonReport, SolverError> {
    verify_against_closedform_scaled(sys, probe, omega_grid, 1.0)
}

/// Test-hook variant: the closed-form imprecision is scaled by
/// `imprecision_scale` before comparison, so the harness can prove the
/// check trips on an injected discrepancy. Production callers use
/// [`verify_against_closedform`] (scale 1).
pub fn verify_against_closedform_scaled(
    sys: &ValidatedSystem,
    probe: &ProbeConfig,
    omega_grid: &[f64],
    imprecision_scale: f64,
) -> Result<ComparisonReport, SolverError> {
    const TOL: f64 = 1e-9;
    if probe.detuning != 0.0 {
        return Err(SolverError::ClosedForm(ClosedFormError::NotResonant(
            probe.detuning,
        )));
    }
    let ports = PortInputs::from_probe(probe);
    if ports.drive.sxp.norm() != 0.0 || ports.loss.sxp.norm() != 0.0 {
        return Err(SolverError::CorrelatedQuadratures);
    }
    let transfers = solve_transfer(sys, probe, omega_grid)?;
    let d = derive(sys, probe)?;
    let omega_m = sys.params().omega_m;
    let transduction_alive = !(sys.params().g0 == 0.0 || d.photon_flux_amp == 0.0 || d.eta == 0.0);

    let mut rel_coeff: f64 = 0.0;
    let mut rel_psd: f64 = 0.0;
    let mut rel_imp: f64 = 0.0;
    let mut rel_qba: f64 = 0.0;
    for pt in &transfers.points {
        let omega = pt.omega;
        let c = closedform::output_coefficients(sys, probe, omega)?;
        // passive scattering coefficients (unit scale: |c_d|²+|c_vac|² = 1)
        for (got, want) in [
            (pt.out_x[0], c.c_d),
            (pt.out_p[1], c.c_d),
            (pt.out_x[2], c.c_vac),
            (pt.out_p[3], c.c_vac),
            (pt.out_x[1], Complex64::new(0.0, 0.0)),
            (pt.out_x[3], Complex64::new(0.0, 0.0)),
        ] {
            rel_coeff = rel_coeff.max((got - want).norm());
        }
        // transduction chain: P_out per unit force is c_x·Ω_m·χ_m
        let x_per_force = omega_m * closedform::chi_m(sys, omega);
        rel_coeff = rel_coeff.max(
            (pt.out_p[4] - c.c_x * x_per_force).norm() / (c.c_x * x_per_force).norm().max(1.0),
        );

        let s_x = closedform::displacement_psd(sys, probe, omega)?;
        let want_psd = closedform::output_phase_psd(sys, probe, omega, s_x)?;
        let got_psd = row_psd(
            &pt.quadrature_row(std::f64::consts::FRAC_PI_2),
            &ports,
            omega,
        );
        rel_psd = rel_psd.max((got_psd - want_psd).abs() / want_psd.abs());

        let want_qba = closedform::qba_psd(sys, probe, omega)?;
        let got_qba = position_psd_optical(pt, &ports);
        let denom = if want_qba == 0.0 { 1.0 } else { want_qba };
        rel_qba = rel_qba.max((got_qba - want_qba).abs() / denom);

        if transduction_alive {
            let want_imp = imprecision_scale * closedform::imprecision_psd(sys, probe, omega)?;
            let obar = omega / d.kappa;
            let gain = 4.0 * d.g_eff * d.g_eff * d.eta / d.kappa / (1.0 + 4.0 * obar * obar);
            let floor =
                pt.out_p[1].norm_sqr() * ports.drive.spp + pt.out_p[3].norm_sqr() * ports.loss.spp;
            let got_imp = floor / gain;
            rel_imp = rel_imp.max((got_imp - want_imp).abs() / want_imp.abs());
        }
    }
    let max_rel_imprecision = transduction_alive.then_some(rel_imp);
    let pass = rel_coeff < TOL
        && rel_psd < TOL
        && max_rel_imprecision.unwrap_or(0.0) < TOL
        && rel_qba < TOL;
    Ok(ComparisonReport {
        max_rel_coefficients: rel_coeff,
        max_rel_output_psd: rel_psd,
        max_rel_imprecision,
        max_rel_qba: rel_qba,
        tolerance: TOL,
        pass,
    })
}
