use std::collections::BTreeMap;
use std::process::Command;

use proptest::prelude::*;

use rasec::harness::trial::{design_region, ROTATION_ERROR_PARAMETER};
use rasec::harness::{
    export_beam_pattern, generate_scene, rotation_error_study, run_experiment, run_sweep,
    run_trial, sense, solve_scheme, summarize, trial_seed, write_csv, write_jsonl,
    write_summary_csv, ExperimentConfig, SchemeTag, SweepSpec,
};

fn small(trials: usize) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::default();
    cfg.experiment.n_trials = trials;
    cfg
}

fn csv(records: &[rasec::harness::ResultRecord]) -> String {
    let mut out = Vec::new();
    write_csv(&mut out, records, false).unwrap();
    String::from_utf8(out).unwrap()
}

#[test]
fn scenes_are_deterministic_and_inside_the_configured_box() {
    let cfg = ExperimentConfig::default();
    assert_eq!(generate_scene(&cfg, 5).unwrap(), generate_scene(&cfg, 5).unwrap());
    for t in 0..1000 {
        let s = generate_scene(&cfg, trial_seed(1, t)).unwrap();
        assert_eq!(s.users.len(), 3);
        for u in &s.users {
            assert!((30.0..=50.0).contains(&u.range));
            let a = u.azimuth.to_degrees();
            assert!((-80.0 - 1e-9..=80.0 + 1e-9).contains(&a));
        }
        assert_eq!(s.eavesdropper.range, 30.0);
    }
}

#[test]
fn user_ranges_average_to_the_interval_midpoint() {
    let mut cfg = ExperimentConfig::default();
    cfg.scene.n_users = 1000;
    let mut sum = 0.0;
    let mut n = 0usize;
    for t in 0..100 {
        for u in generate_scene(&cfg, trial_seed(2, t)).unwrap().users {
            sum += u.range;
            n += 1;
        }
    }
    assert!((sum / n as f64 - 40.0).abs() < 0.1);
}

#[test]
fn seeds_ignore_scheme_and_sweep_value() {
    let cfg = small(1);
    let a = sense(&cfg, 0).unwrap();
    let b = sense(&cfg.with_parameter("link.tx_power_dbm", 20.0).unwrap(), 0).unwrap();
    assert_eq!(a.theta_hat.to_bits(), b.theta_hat.to_bits());
    assert_eq!(a.scene, b.scene);
    assert_ne!(trial_seed(7, 0), trial_seed(7, 1));
    assert_ne!(trial_seed(7, 0), trial_seed(8, 0));
}

#[test]
fn schemes_of_a_trial_share_the_sensing_result() {
    let cfg = small(2);
    let records = run_experiment(&cfg);
    assert_eq!(records.len(), 12);
    for chunk in records.chunks(6) {
        assert!(chunk.iter().all(|r| r.theta_hat.to_bits() == chunk[0].theta_hat.to_bits()));
        assert!(chunk.iter().all(|r| r.trial == chunk[0].trial));
        let tags: Vec<_> = chunk.iter().map(|r| r.scheme).collect();
        assert_eq!(tags, SchemeTag::IMPLEMENTED.to_vec());
    }
    assert!(records.iter().all(|r| r.is_ok() && r.secrecy >= 0.0));
}

#[test]
fn fixed_array_scheme_keeps_zero_rotations() {
    let cfg = small(1);
    let r = run_trial(&cfg, SchemeTag::Fpa, 0);
    assert_eq!(r.phi_arr, 0.0);
    assert!(r.varphi.iter().all(|v| *v == 0.0));
    let r = run_trial(&cfg, SchemeTag::Era, 0);
    assert_eq!(r.phi_arr, 0.0);
    let r = run_trial(&cfg, SchemeTag::Gra, 0);
    assert!(r.varphi.iter().all(|v| *v == 0.0));
}

#[test]
fn collapsed_uncertainty_reproduces_the_point_estimate_model() {
    let mut cfg = small(3);
    cfg.sensing.crb_override = Some(1e-12);
    for t in 0..3 {
        let sensed = sense(&cfg, t).unwrap();
        let pe = solve_scheme(&cfg, &sensed, SchemeTag::TraPe).unwrap();
        let tra = solve_scheme(&cfg, &sensed, SchemeTag::Tra).unwrap();
        // Both problems score every iterate of the point-estimate run alike.
        let s = &pe.outcome.solution;
        let rot = s.rotation();
        for beta in [5.0, 1e4] {
            let a = pe.problem.objective(&s.w, &rot, beta);
            let b = tra.problem.objective(&s.w, &rot, beta);
            assert!((a - b).abs() <= 1e-6, "trial {t}: {a} vs {b}");
        }
        let a = pe.problem.surrogate_min(&s.w, &rot);
        assert!((a - tra.problem.surrogate_min(&s.w, &rot)).abs() <= 1e-6);
        let first = |r: &rasec::harness::SchemeRun| r.outcome.trace[0].objective_start;
        assert!((first(&pe) - first(&tra)).abs() <= 1e-6);
    }
}

#[test]
fn point_estimate_region_is_a_single_sample() {
    let cfg = small(1);
    let sensed = sense(&cfg, 0).unwrap();
    let pe = design_region(&cfg, &sensed, SchemeTag::TraPe).unwrap();
    assert_eq!(pe.sampled_angles.len(), 1);
    let tra = design_region(&cfg, &sensed, SchemeTag::Tra).unwrap();
    assert_eq!(tra.sampled_angles.len(), cfg.sensing.n_samples);
}

#[test]
fn rotation_errors_leave_fixed_arrays_untouched() {
    let mut cfg = small(3);
    cfg.experiment.schemes = vec![SchemeTag::Fpa, SchemeTag::Tra];
    cfg.experiment.rotation_error_bounds_deg = vec![0.0, 1.0, 2.0, 4.0];
    let records = rotation_error_study(&cfg).unwrap();
    assert_eq!(records.len(), 3 * 2 * 4);
    let mut by_scheme: BTreeMap<(usize, SchemeTag), Vec<&rasec::harness::ResultRecord>> = BTreeMap::new();
    for r in &records {
        assert_eq!(r.sweep_parameter.as_deref(), Some(ROTATION_ERROR_PARAMETER));
        by_scheme.entry((r.trial, r.scheme)).or_default().push(r);
    }
    for ((trial, scheme), rs) in by_scheme {
        let base = run_trial(&small(3), scheme, trial);
        assert_eq!(rs[0].secrecy.to_bits(), base.secrecy.to_bits(), "bound 0 equals the plain run");
        if scheme == SchemeTag::Fpa {
            assert!(rs.iter().all(|r| r.secrecy.to_bits() == rs[0].secrecy.to_bits()));
        } else {
            let shifted = rs.iter().filter(|r| r.varphi != rs[0].varphi).count();
            assert!(shifted >= 1);
            for r in &rs {
                assert!(r.phi_arr.abs() <= 15f64.to_radians() + 1e-15);
                assert!(r.varphi.iter().all(|v| v.abs() <= 15f64.to_radians() + 1e-15));
            }
        }
    }
}

#[test]
fn sweep_orders_cells_and_summaries_recompute() {
    let mut cfg = small(2);
    cfg.experiment.schemes = vec![SchemeTag::Fpa, SchemeTag::Tra];
    cfg.sweep = Some(SweepSpec { parameter: "link.tx_power_dbm".into(), values: vec![0.0, 20.0] });
    let records = run_sweep(&cfg).unwrap();
    assert_eq!(records.len(), 2 * 2 * 2);
    assert!(records[..4].iter().all(|r| r.sweep_value == Some(0.0)));
    assert!(records[4..].iter().all(|r| r.sweep_value == Some(20.0)));

    let summary = summarize(&records);
    assert_eq!(summary.len(), 4);
    for row in &summary {
        let xs: Vec<f64> = records
            .iter()
            .filter(|r| r.sweep_value == row.sweep_value && r.scheme == row.scheme)
            .map(|r| r.secrecy)
            .collect();
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let sd = (xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)).sqrt();
        assert_eq!(row.n, xs.len());
        assert!((row.mean_secrecy - mean).abs() <= 1e-12);
        assert!((row.stderr_secrecy - sd / n.sqrt()).abs() <= 1e-12);
    }
    let mut out = Vec::new();
    write_summary_csv(&mut out, &summary, false).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert!(text.starts_with("sweep_parameter,sweep_value,scheme,n,failed,mean_secrecy,stderr_secrecy"));
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn sweep_requires_a_sweep_section() {
    assert!(run_sweep(&small(1)).is_err());
}

#[test]
fn csv_and_json_lines_carry_the_same_records() {
    let cfg = small(1);
    let records = run_experiment(&cfg);
    let text = csv(&records);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "trial,scheme,sweep_parameter,sweep_value,theta_true,theta_hat,crb,secrecy,surrogate,ao_iterations,converged,phi_arr,varphi,status"
    );
    assert_eq!(lines.count(), records.len());

    let mut out = Vec::new();
    write_jsonl(&mut out, &records, true).unwrap();
    let text = String::from_utf8(out).unwrap();
    for (line, r) in text.lines().zip(&records) {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["scheme"], r.scheme.as_str());
        assert!((v["secrecy"].as_f64().unwrap() - r.secrecy).abs() <= 1e-11 * (1.0 + r.secrecy));
        assert!(v.get("wall_ms").is_some());
    }
}

#[test]
fn repeated_runs_are_byte_identical() {
    let cfg = small(2);
    assert_eq!(csv(&run_experiment(&cfg)), csv(&run_experiment(&cfg)));
}

#[test]
fn beam_pattern_has_one_row_per_degree() {
    let cfg = small(1);
    let sensed = sense(&cfg, 0).unwrap();
    let run = solve_scheme(&cfg, &sensed, SchemeTag::TraPe).unwrap();
    let rows = export_beam_pattern(&run.problem.array, &run.outcome.solution, &sensed.scene, &run.region, 1.0);
    assert_eq!(rows.len(), 181);
    assert_eq!(rows[0].angle_deg, -90.0);
    assert_eq!(rows[180].angle_deg, 90.0);
    assert_eq!(rows.iter().filter(|r| r.estimate).count(), 1);
    assert!(rows.iter().filter(|r| r.user).count() >= 1);
    // The point-estimate design notches the estimate relative to the users.
    let at_estimate = rows.iter().find(|r| r.estimate).unwrap().gain_db;
    let users: Vec<f64> = rows.iter().filter(|r| r.user).map(|r| r.gain_db).collect();
    let user_mean = users.iter().sum::<f64>() / users.len() as f64;
    assert!(at_estimate <= user_mean - 10.0, "estimate {at_estimate} dB vs users {user_mean} dB");
}

#[test]
fn config_rejects_bad_values() {
    for text in [
        "array.n_tx = 0",
        "sensing.n_beams = 4",
        "scene.user_range_m = [50.0, 30.0]",
        "experiment.schemes = [\"TRA-ABF-SCA\"]",
        "experiment.schemes = [\"XYZ\"]",
        "sweep.parameter = \"link.tx_power_dbm\"\nsweep.values = []",
        "sweep.parameter = \"link.nothing\"\nsweep.values = [1.0]",
        "solver.beta_sm_growth = 1.0",
        "array.varphi_max_deg = 120.0",
    ] {
        assert!(ExperimentConfig::from_toml_str(text).is_err(), "accepted: {text}");
    }
}

fn cli() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rasec"))
}

#[test]
fn cli_run_is_reproducible_and_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let a = cli().args(["run", "--config", "defaults", "--trials", "1", "--seed", "7"]).output().unwrap();
    let b = cli().args(["run", "--config", "defaults", "--trials", "1", "--seed", "7"]).output().unwrap();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(String::from_utf8_lossy(&a.stdout).lines().count(), 7);

    let out = dir.path().join("res");
    let st = cli()
        .args(["run", "--trials", "1", "--scheme", "FPA-ABF,TRA-ABF", "--format", "json", "--manifest", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(st.success());
    let manifest = std::fs::read_to_string(out.join("manifest.toml")).unwrap();
    let resolved = ExperimentConfig::from_toml_str(&manifest).unwrap();
    assert_eq!(resolved.experiment.schemes, vec![SchemeTag::Fpa, SchemeTag::Tra]);
    assert_eq!(std::fs::read_to_string(out.join("records.jsonl")).unwrap().lines().count(), 2);
    assert!(out.join("summary.csv").exists());
}

#[test]
fn cli_reports_configuration_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "array.n_tx = \"eight\"").unwrap();
    let cases: Vec<Vec<std::ffi::OsString>> = vec![
        vec!["run".into(), "--scheme".into(), "XYZ".into()],
        vec!["run".into(), "--scheme".into(), "TRA-ABF-SCA".into()],
        vec!["run".into(), "--config".into(), bad.into_os_string()],
        vec!["run".into(), "--config".into(), "/nonexistent/cfg.toml".into()],
        vec!["sweep".into()],
    ];
    for args in cases {
        let o = cli().args(&args).output().unwrap();
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn cli_beam_pattern_export() {
    let dir = tempfile::tempdir().unwrap();
    let st = cli()
        .args(["beampattern", "--scheme", "TRA-ABF,TRA-ABF-PE", "--out"])
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(st.success());
    let text = std::fs::read_to_string(dir.path().join("beampattern.csv")).unwrap();
    assert_eq!(text.lines().next().unwrap(), "scheme,angle_deg,gain_db,user,estimate,region");
    assert_eq!(text.lines().count(), 1 + 2 * 181);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn any_float_key_round_trips_through_the_setter(v in -30.0f64..30.0) {
        let cfg = ExperimentConfig::default();
        let c = cfg.with_parameter("link.tx_power_dbm", v).unwrap();
        prop_assert_eq!(c.link.tx_power_dbm, v);
        let c = cfg.with_parameter("sensing.power_dbm", v).unwrap();
        prop_assert_eq!(c.sensing.power_dbm, v);
    }
}
