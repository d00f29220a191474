//! Acceptance suite: one test per release criterion, each printing a
//! single PASS/FAIL line (run with `--nocapture` to see them all).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use omnoise::analysis::{
    figure_dataset, optimize_power, squeezing_power_equivalence, AnalysisError, FigureData,
    FigureId,
};
use omnoise::closedform::total_noise_at_sideband;
use omnoise::grid::log_grid_about;
use omnoise::solver::{psd_from_transfers, solve_transfer, verify_against_closedform, PortInputs};
use omnoise::verify::{run_suite, VerifyOptions};
use omnoise::{derive, validate_system, ProbeConfig, SystemParams, ValidatedSystem};

fn microtoroid() -> ValidatedSystem {
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
        epsilon: 1.0,
        mass: None,
    })
    .unwrap()
}

/// η ∈ [0.01, 0.999], Ω̄_m ∈ [0.01, 100] log-uniform, random quality
/// factor; probe power within ±20 dB of the SQL power.
fn random_draw(rng: &mut ChaCha8Rng, r: f64) -> (ValidatedSystem, ProbeConfig) {
    let tau = std::f64::consts::TAU;
    let eta: f64 = rng.random_range(0.01..=0.999);
    let omega_m_bar = 10f64.powf(rng.random_range(-2.0..=2.0));
    let omega_m = tau * 10f64.powf(rng.random_range(5.0..=8.0));
    let kappa = omega_m / omega_m_bar;
    let sys = validate_system(SystemParams {
        omega_m,
        gamma_m: omega_m / 10f64.powf(rng.random_range(2.0..=6.0)),
        kappa_c: (1.0 - eta) * kappa,
        kappa_ex: eta * kappa,
        g0: tau * 10f64.powf(rng.random_range(2.0..=4.0)),
        omega_cav: tau * 1.935e14,
        epsilon: 1.0,
        mass: None,
    })
    .unwrap();
    let p_sql = derive(&sys, &ProbeConfig::coherent(1e-9))
        .unwrap()
        .p_sql
        .unwrap();
    let probe = ProbeConfig::phase_squeezed(p_sql * 10f64.powf(rng.random_range(-2.0..=2.0)), r);
    (sys, probe)
}

fn report(criterion: &str, pass: bool, detail: String) {
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("ACCEPTANCE {tag}: {criterion} — {detail}");
    assert!(pass, "{criterion}: {detail}");
}

#[test]
fn criterion_1_minimum_sql_power_reproduction() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("run.toml");
    std::fs::write(
        &config_path,
        r#"
[system]
omega_m_hz = 78e6
q_m = 9600
kappa_c_hz = 3.5454545454545454e6
omega_cav_hz = 1.95e14
eta = 0.5
g0_hz = 1.7e3

[probe]
power_rel_pmin_db = 0.0
"#,
    )
    .unwrap();
    let started = std::time::Instant::now();
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_omnoise"))
        .args([
            "derive",
            "--config",
            config_path.to_str().unwrap(),
            "--format",
            "json",
        ])
        .output()
        .unwrap();
    let elapsed = started.elapsed();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let p_min = v["derived"]["p_min_w"].as_f64().unwrap();
    let rel = (p_min - 860e-9).abs() / 860e-9;
    report(
        "P_min reproduction",
        rel <= 0.02,
        format!(
            "derive reports P_min = {p_min:.4e} W, {:.2}% from 860 nW (limit 2%), {:?}",
            rel * 100.0,
            elapsed
        ),
    );
}

#[test]
fn criterion_2_sql_identity_at_unit_normalized_power() {
    let sys = microtoroid().with_escape_efficiency(1.0).unwrap();
    let p_sql = derive(&sys, &ProbeConfig::coherent(1e-9))
        .unwrap()
        .p_sql
        .unwrap();
    let total = total_noise_at_sideband(&sys, &ProbeConfig::coherent(p_sql)).unwrap();
    let sql = 2.0 / sys.params().gamma_m;
    let rel = (total / sql - 1.0).abs();
    report(
        "SQL identity",
        rel < 1e-12,
        format!("coherent total at P = 1, eta = 1 deviates {rel:.2e} from 2/Gamma_m (tol 1e-12)"),
    );
}

#[test]
fn criterion_3_oracle_equivalence_over_random_draws() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let started = std::time::Instant::now();
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let r = rng.random_range(0.0..=2.0);
        let (sys, probe) = random_draw(&mut rng, r);
        let grid = log_grid_about(sys.params().omega_m, 1e3, 201);
        let rep = verify_against_closedform(&sys, &probe, &grid).unwrap();
        worst = worst.max(rep.worst());
    }
    let elapsed = started.elapsed();
    report(
        "Oracle equivalence",
        worst < 1e-9 && elapsed.as_secs_f64() < 10.0,
        format!(
            "solver vs closed form worst rel dev {worst:.2e} (tol 1e-9) over 100 draws x 201 frequencies in {elapsed:?} (limit 10 s)"
        ),
    );
}

#[test]
fn criterion_4_shot_noise_normalization_any_detuning() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (sys, _) = random_draw(&mut rng, 0.0);
        let kappa = sys.kappa();
        let probe = ProbeConfig {
            detuning: rng.random_range(-5.0..=5.0) * kappa,
            ..ProbeConfig::coherent(0.0) // no power: g = 0
        };
        let grid = [0.0, 0.2 * kappa, kappa, 30.0 * kappa];
        let transfers = solve_transfer(&sys, &probe, &grid).unwrap();
        for theta in [0.0, 0.37, 1.0, std::f64::consts::FRAC_PI_2, 2.9] {
            for v in psd_from_transfers(&transfers, &PortInputs::all_vacuum(), theta) {
                worst = worst.max((v - 1.0).abs());
            }
        }
    }
    report(
        "Shot-noise normalization",
        worst < 1e-12,
        format!("all-vacuum output PSD deviates {worst:.2e} from 1 (tol 1e-12) over 100 detuned draws x 5 angles"),
    );
}

#[test]
fn criterion_5_squeezing_power_equivalence() {
    let sys = microtoroid();
    let lossless = sys.with_escape_efficiency(1.0).unwrap();
    let p_sql = derive(&lossless, &ProbeConfig::coherent(1e-9))
        .unwrap()
        .p_sql
        .unwrap();
    let mut worst: f64 = 0.0;
    for r in [0.5, 1.0, 10f64.ln() / 2.0] {
        for p_norm in [0.05, 0.4, 1.5] {
            let power = p_norm * p_sql;
            let squeezed =
                total_noise_at_sideband(&lossless, &ProbeConfig::phase_squeezed(power, r)).unwrap();
            let boosted =
                total_noise_at_sideband(&lossless, &ProbeConfig::coherent(power * (2.0 * r).exp()))
                    .unwrap();
            worst = worst.max((squeezed / boosted - 1.0).abs());
        }
    }
    let p_min = omnoise::minimum_sql_power(&sys).unwrap();
    let undercoupled = squeezing_power_equivalence(&sys, 0.2, 4.0 * p_min, 1.0);
    let undercoupled_ok = match &undercoupled {
        Err(AnalysisError::NoEquivalent { .. }) => true,
        Ok(eq) => eq.ratio > (2.0f64).exp(),
        Err(_) => false,
    };
    report(
        "Squeezing-power equivalence",
        worst < 1e-12 && undercoupled_ok,
        format!(
            "eta = 1 identity deviates {worst:.2e} (tol 1e-12) for r in {{0.5, 1, ln10/2}}; undercoupled case reports {}",
            match &undercoupled {
                Err(AnalysisError::NoEquivalent { .. }) => "NoEquivalent".to_string(),
                Ok(eq) => format!("ratio {:.3} > e^2", eq.ratio),
                Err(e) => format!("unexpected {e}"),
            }
        ),
    );
}

#[test]
fn criterion_6_critical_coupling_no_benefit() {
    let sys = microtoroid(); // κ_ex = κ_c: critically coupled
    let omega = 1e-4 * sys.kappa();
    let power = 1e-7;
    let plain =
        omnoise::closedform::imprecision_psd(&sys, &ProbeConfig::coherent(power), omega).unwrap();
    let squeezed =
        omnoise::closedform::imprecision_psd(&sys, &ProbeConfig::phase_squeezed(power, 1.0), omega)
            .unwrap();
    let rel = (squeezed / plain - 1.0).abs();
    report(
        "Critical-coupling no-benefit",
        rel < 1e-3,
        format!("imprecision changes {rel:.2e} between r = 0 and r = 1 at eta = 0.5, omega_bar = 1e-4 (tol 1e-3)"),
    );
}

#[test]
fn criterion_7_figure_trends() {
    let sys = microtoroid();
    let fig1 = figure_dataset(FigureId::Fig1, &sys).unwrap();
    let fig2 = figure_dataset(FigureId::Fig2, &sys).unwrap();
    let extrema = |data: &FigureData, mode: &str| -> Vec<f64> {
        let FigureData::Curves { series, .. } = data else {
            unreachable!()
        };
        series
            .iter()
            .filter(|s| s.name.starts_with(mode))
            .map(|s| s.marker.unwrap().1)
            .collect()
    };
    let mut pass = true;
    let mut detail = String::new();
    for mode in ["coherent", "squeezed"] {
        let mins = extrema(&fig1.data, mode);
        let maxs = extrema(&fig2.data, mode);
        let dec = mins.len() == 4 && mins.windows(2).all(|w| w[1] < w[0]);
        let inc = maxs.len() == 4 && maxs.windows(2).all(|w| w[1] > w[0]);
        pass &= dec && inc;
        detail.push_str(&format!(
            "{mode}: min(imp) strictly decreasing = {dec}, max(QBA) strictly increasing = {inc}; "
        ));
    }
    report("Figure trends", pass, detail);
}

#[test]
fn criterion_8_optimizer_correctness() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    let mut coherent_exact = true;
    for _ in 0..1000 {
        let (sys, _) = random_draw(&mut rng, 0.0);
        let eta = rng.random_range(0.05..=1.0);
        let r = rng.random_range(0.05..=2.0);
        let opt = optimize_power(&sys, &ProbeConfig::phase_squeezed(1e-7, r), eta).unwrap();
        let recoupled = sys.with_escape_efficiency(eta).unwrap();
        let obm = recoupled.params().omega_m / recoupled.kappa();
        let admix = 4.0 * eta * (1.0 - eta) / (1.0 + 4.0 * obm * obm);
        let (e2r, em2r) = ((2.0 * r).exp(), (-2.0 * r).exp());
        let expect = ((em2r + admix * (1.0 - em2r)) / (e2r + (1.0 - eta) * (1.0 - e2r))).sqrt();
        worst = worst.max((opt.p_norm_star / expect - 1.0).abs());
        if rng.random_bool(0.05) {
            let coh = optimize_power(&sys, &ProbeConfig::coherent(1e-7), eta).unwrap();
            coherent_exact &= coh.p_norm_star == 1.0;
        }
    }
    report(
        "Optimizer correctness",
        worst < 1e-8 && coherent_exact,
        format!("golden-section vs analytic worst rel dev {worst:.2e} (tol 1e-8) over 1000 draws; coherent optimum exactly 1 = {coherent_exact}"),
    );
}

#[test]
fn criterion_9_verify_suite_runtime() {
    let started = std::time::Instant::now();
    let rep = run_suite(&microtoroid(), &VerifyOptions::default());
    let elapsed = started.elapsed();
    report(
        "Verify-suite runtime",
        rep.passed() && elapsed.as_secs_f64() < 60.0,
        format!(
            "full suite ({} checks) passed = {} in {elapsed:?} single-threaded (limit 60 s)",
            rep.checks.len(),
            rep.passed()
        ),
    );
}
