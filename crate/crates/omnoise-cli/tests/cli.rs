//! End-to-end runs of the `omnoise` binary.

use std::path::Path;
use std::process::{Command, Output};

const MICROTOROID: &str = r#"
[system]
omega_m_hz = 78e6
q_m = 9600
kappa_c_hz = 3.5454545454545454e6
omega_cav_hz = 1.95e14
eta = 0.5
g0_hz = 1.7e3

[probe]
power_rel_pmin_db = 0.0
"#;

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("run.toml");
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

fn omnoise(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_omnoise"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid json on stdout")
}

#[test]
fn derive_reports_minimum_sql_power_in_envelope() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), MICROTOROID);
    let out = omnoise(&["derive", "--config", &config, "--format", "json"]);
    let v = stdout_json(&out);
    let p_min = v["derived"]["p_min_w"].as_f64().unwrap();
    assert!((p_min - 860e-9).abs() / 860e-9 < 0.02, "p_min = {p_min}");
    assert_eq!(v["derived"]["p_min_rel_probe_db"].as_f64().unwrap(), 0.0);
    // unit honesty: Hz keys equal rad/s echo divided by 2π
    let tau = std::f64::consts::TAU;
    let om = v["resolved"]["system"]["omega_m_rad_s"].as_f64().unwrap();
    assert!((om / tau / 78e6 - 1.0).abs() < 1e-12);
    let kc = v["resolved"]["system"]["kappa_c_rad_s"].as_f64().unwrap();
    assert!((kc / tau / 3.5454545454545454e6 - 1.0).abs() < 1e-12);
}

#[test]
fn derive_csv_lists_key_value_pairs() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), MICROTOROID);
    let out = omnoise(&["derive", "--config", &config]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("key,value\n"));
    assert!(text.contains("derived.p_min_w,8.67891147350e-7"));
}

#[test]
fn exclusive_keys_exit_2_naming_both() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        &MICROTOROID.replace("eta = 0.5", "eta = 0.5\nkappa_ex_hz = 1e6"),
    );
    let out = omnoise(&["derive", "--config", &config]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr).to_string();
    assert!(err.contains("kappa_ex_hz") && err.contains("eta"), "{err}");
}

#[test]
fn zero_coupling_budget_exits_3_with_hint() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        &MICROTOROID
            .replace("g0_hz = 1.7e3", "g0_hz = 0.0")
            .replace("power_rel_pmin_db = 0.0", "power_w = 1e-6"),
    );
    let out = omnoise(&["budget", "--config", &config]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr).to_string();
    assert!(err.contains("transduction"), "{err}");
}

#[test]
fn budget_csv_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), MICROTOROID);
    let a = omnoise(&["budget", "--config", &config]);
    let b = omnoise(&["budget", "--config", &config]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "omega_rad_s,s_imp,s_qba,s_ext_contrib,s_total,sql_ref"
    );
    assert_eq!(text.lines().count(), 202); // header + 201 grid points
}

#[test]
fn overcoupled_budget_at_pmin_sits_within_3db_of_sql() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), &MICROTOROID.replace("eta = 0.5", "eta = 0.8"));
    let out = omnoise(&["budget", "--config", &config]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let omega_m = std::f64::consts::TAU * 78e6;
    let row: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| {
            l.split(',')
                .map(|x| x.parse().unwrap())
                .collect::<Vec<f64>>()
        })
        .find(|r| (r[0] / omega_m - 1.0).abs() < 1e-9)
        .expect("grid contains the mechanical sideband");
    let (s_total, sql_ref) = (row[4], row[5]);
    let db_over_sql = 10.0 * (s_total / sql_ref).log10();
    assert!(
        db_over_sql > 0.0 && db_over_sql < 3.0,
        "total at the sideband is {db_over_sql} dB over the SQL"
    );
}

#[test]
fn detuned_budget_needs_the_solver_engine() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        &MICROTOROID.replace("[probe]", "[probe]\ndetuning_hz = 1e6"),
    );
    let refused = omnoise(&["budget", "--config", &config]);
    assert_eq!(refused.status.code(), Some(3));
    let solved = omnoise(&["budget", "--config", &config, "--engine", "solver"]);
    assert!(
        solved.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&solved.stderr)
    );
}

#[test]
fn solver_and_closedform_budgets_agree_on_resonance() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), MICROTOROID);
    let a = omnoise(&["budget", "--config", &config, "--engine", "closedform"]);
    let b = omnoise(&["budget", "--config", &config, "--engine", "solver"]);
    let parse = |out: &Output| -> Vec<Vec<f64>> {
        String::from_utf8(out.stdout.clone())
            .unwrap()
            .lines()
            .skip(1)
            .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
            .collect()
    };
    for (ra, rb) in parse(&a).iter().zip(parse(&b).iter()) {
        for (va, vb) in ra.iter().zip(rb) {
            assert!(
                (va - vb).abs() <= 1e-9 * va.abs().max(1e-300),
                "{va} vs {vb}"
            );
        }
    }
}

#[test]
fn figures_emit_csv_and_sidecars() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), MICROTOROID);
    let out_dir = dir.path().join("figs");
    let out = omnoise(&[
        "figures",
        "--config",
        &config,
        "--id",
        "all",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    for id in ["fig1", "fig2", "fig3", "fig4"] {
        assert!(out_dir.join(format!("{id}.csv")).exists());
        assert!(out_dir.join(format!("{id}.params.json")).exists());
    }
    let fig4 = std::fs::read_to_string(out_dir.join("fig4.csv")).unwrap();
    let mut names: Vec<&str> = fig4
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap())
        .collect();
    names.dedup();
    assert_eq!(
        names,
        vec![
            "coherent_-6db",
            "squeezed_-6db",
            "coherent_+0db",
            "squeezed_+0db",
            "coherent_+6db",
            "squeezed_+6db",
            "sql"
        ]
    );
    let fig1 = std::fs::read_to_string(out_dir.join("fig1.csv")).unwrap();
    assert_eq!(
        fig1.lines().next().unwrap(),
        "series,eta,s_imp_at_sideband,is_marker"
    );
    assert_eq!(fig1.lines().filter(|l| l.ends_with(",1")).count(), 8);
    let fig3 = std::fs::read_to_string(out_dir.join("fig3.csv")).unwrap();
    assert_eq!(
        fig3.lines().next().unwrap(),
        "power_db_rel_pmin,squeeze_db,total_db_over_sql,contour_flag_db"
    );
    for level in [",3", ",10", ",20"] {
        assert!(fig3.lines().any(|l| l.ends_with(level)), "missing {level}");
    }
}

#[test]
fn sweep_command_emits_rows() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        &format!(
            "{MICROTOROID}\n[sweep]\nvariable = \"eta\"\nmin = 0.1\nmax = 0.9\ncount = 9\nspacing = \"linear\"\n"
        ),
    );
    let out = omnoise(&["sweep", "--config", &config]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "value,s_imp,s_qba,s_total,db_over_sql"
    );
    assert_eq!(text.lines().count(), 10);
}

#[test]
fn optimize_and_equivalence_envelopes() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        &format!("{MICROTOROID}\n[optimize]\ntarget = \"power\"\n"),
    );
    let out = omnoise(&["optimize", "--config", &config, "--format", "json"]);
    let v = stdout_json(&out);
    assert_eq!(v["result"]["p_norm_star"].as_f64().unwrap(), 1.0);

    let config2 = write_config(
        dir.path(),
        &MICROTOROID.replace("[probe]", "[probe]\nsqueeze_db = 8.7"),
    );
    let out = omnoise(&["equivalence", "--config", &config2, "--format", "json"]);
    let v = stdout_json(&out);
    assert!(v["result"]["found"].is_boolean());
    assert!(v["result"]["squeezed_noise"].as_f64().unwrap() > 0.0);
}

#[test]
fn verify_passes_and_injected_perturbation_fails() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), &format!("{MICROTOROID}\n[verify]\ndraws = 4\n"));
    let ok = omnoise(&["verify", "--config", &config]);
    assert!(
        ok.status.success(),
        "stderr: {} stdout: {}",
        String::from_utf8_lossy(&ok.stderr),
        String::from_utf8_lossy(&ok.stdout)
    );
    let text = String::from_utf8(ok.stdout).unwrap();
    assert!(text.contains("PASS  solver vs closed form: output phase PSD"));
    assert!(text.lines().last().unwrap().contains("verification passed"));

    let bad = omnoise(&[
        "verify",
        "--config",
        &config,
        "--inject-imprecision-scale",
        "1.01",
    ]);
    assert_eq!(bad.status.code(), Some(4));
    let text = String::from_utf8(bad.stdout).unwrap();
    assert!(text.contains("FAIL  solver vs closed form: imprecision PSD"));
}

#[test]
fn verify_reports_squeezing_checks_skipped_for_coherent_config() {
    let dir = tempfile::tempdir().unwrap();
    // squeeze_db defaults to 0: squeezing-specific checks must be skipped
    let config = write_config(dir.path(), &format!("{MICROTOROID}\n[verify]\ndraws = 2\n"));
    let out = omnoise(&["verify", "--config", &config]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("SKIP  squeezing-power equivalence at eta = 1"));
    assert!(text.contains("SKIP  critical-coupling imprecision indifference"));
}

#[test]
fn verify_json_report_is_machine_readable() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), &format!("{MICROTOROID}\n[verify]\ndraws = 2\n"));
    let out = omnoise(&["verify", "--config", &config, "--format", "json"]);
    let v = stdout_json(&out);
    assert!(v["checks"].as_array().unwrap().len() >= 15);
    assert!(v["seconds"].as_f64().unwrap() < 60.0);
}

#[test]
fn grid_flag_overrides_budget_grid() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), MICROTOROID);
    let out = omnoise(&["budget", "--config", &config, "--grid", "1e6:1e9:50:log"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 52); // header + 50 + inserted Ω_m
}
