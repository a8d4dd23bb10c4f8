use std::fs;
use std::process::Command;

use etdms::{read_snapshot, write_snapshot, EpsilonConvention, Field, SpectralGrid};
use etdms_cli::{
    cmd_coarsen, convergence_csv, parse_schedule, AValue, CommandKind, ConvergenceRow, ModelKind, PValue,
    RunConfig,
};

fn small_coarsen(out: &std::path::Path) -> RunConfig {
    let mut cfg = RunConfig::defaults(CommandKind::Coarsen);
    cfg.apply_text(&format!(
        "N = 32\nT = 0.2\nseries_every = 5\nsnapshot_every = 100\nmonitor_etilde = 10\nout = {}\n",
        out.display()
    ))
    .unwrap();
    cfg
}

#[test]
fn empty_config_plus_settings_equals_settings() {
    let mut from_file = RunConfig::defaults(CommandKind::Coarsen);
    from_file.apply_text("").unwrap();
    let settings = [("model", "linear"), ("N", "48"), ("L", "2pi"), ("eps", "0.02"), ("tau", "5e-4"), ("A", "7.5")];
    for (k, v) in settings {
        from_file.set(k, v).unwrap();
    }
    assert_eq!(from_file.model, ModelKind::Linear);
    assert_eq!(from_file.n, 48);
    assert_eq!(from_file.length, 2.0 * std::f64::consts::PI);
    assert_eq!(from_file.epsilon, 0.02);
    assert_eq!(from_file.tau, vec![5e-4]);
    assert_eq!(from_file.a, vec![AValue::Value(7.5)]);
}

#[test]
fn resolved_config_round_trips_through_text() {
    let mut cfg = RunConfig::defaults(CommandKind::Convergence);
    cfg.set("A", "auto,reference,3").unwrap();
    cfg.set("p", "1.5,auto").unwrap();
    cfg.set("monitor_etilde", "25").unwrap();
    let mut back = RunConfig::defaults(CommandKind::Coarsen);
    back.apply_text(&cfg.to_config_text()).unwrap();
    assert_eq!(back, cfg);
}

#[test]
fn config_errors_name_the_line() {
    let mut cfg = RunConfig::defaults(CommandKind::Coarsen);
    let err = cfg.apply_text("# comment\nN = 32\nbogus = 1\n").unwrap_err();
    let msg = format!("{err:#}");
    assert!(msg.contains("line 3") && msg.contains("bogus"), "{msg}");

    let err = cfg.apply_text("N = 32\n\nthis line has no equals sign\n").unwrap_err();
    assert!(format!("{err:#}").contains("line 3"));

    assert!(cfg.apply_text("T = -1").is_err());
    assert!(cfg.apply_text("series_every = 0").is_err());
    assert!(cfg.apply_text("A = maybe").is_err());
}

#[test]
fn full_horizon_sets_published_times() {
    let mut cfg = RunConfig::defaults(CommandKind::Coarsen);
    assert_eq!(cfg.t_end, 50.0);
    cfg.set("full_horizon", "true").unwrap();
    assert_eq!(cfg.t_end, 30000.0);
    assert_eq!(cfg.snapshot_times, vec![1.0, 5000.0, 10000.0, 15000.0, 20000.0, 30000.0]);
}

#[test]
fn convention_defaults_differ_by_command() {
    assert_eq!(RunConfig::defaults(CommandKind::Convergence).convention, EpsilonConvention::Linear);
    assert_eq!(RunConfig::defaults(CommandKind::Coarsen).convention, EpsilonConvention::Squared);
}

#[test]
fn variable_step_schedule_parses() {
    let s = parse_schedule("# variable steps\n1 1e-6\n10 1e-5\n100 1e-4\n30000 1e-3\n").unwrap();
    let segs: Vec<(f64, f64)> = s.segments().iter().map(|s| (s.t_end, s.tau)).collect();
    assert_eq!(segs, vec![(1.0, 1e-6), (10.0, 1e-5), (100.0, 1e-4), (30000.0, 1e-3)]);
    assert!(parse_schedule("1 1e-3 extra\n").is_err());
    assert!(parse_schedule("10 1e-3\n5 1e-3\n").is_err());
}

#[test]
fn schedule_is_cut_at_the_horizon() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("schedule");
    fs::write(&path, "0.1 1e-3\n10 1e-2\n").unwrap();
    let mut cfg = RunConfig::defaults(CommandKind::Coarsen);
    cfg.set("schedule", path.to_str().unwrap()).unwrap();
    cfg.set("T", "0.5").unwrap();
    let s = cfg.run_schedule().unwrap();
    assert_eq!(s.t_end(), 0.5);
    assert_eq!(s.step_counts(0.0).unwrap(), vec![100, 40]);
    cfg.set("T", "20").unwrap();
    assert!(cfg.run_schedule().is_err());
}

#[test]
fn snapshot_round_trip_is_bitwise() {
    let g = SpectralGrid::shared(16, 12.8, false).unwrap();
    let f = etdms::random_field(g.clone(), 3, 0.7);
    let mut buf = Vec::new();
    write_snapshot(&mut buf, &f, 2.5).unwrap();
    let snap = read_snapshot(buf.as_slice()).unwrap();
    assert_eq!(snap.t, 2.5);
    let back: Field = snap.to_field(g).unwrap();
    let same = f.values().iter().zip(back.values()).all(|(a, b)| a.to_bits() == b.to_bits());
    assert!(same);
}

#[test]
fn coarsen_is_deterministic_and_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let sa = cmd_coarsen(&small_coarsen(&a)).unwrap();
    cmd_coarsen(&small_coarsen(&b)).unwrap();

    let series = fs::read_to_string(a.join("series.csv")).unwrap();
    assert_eq!(series, fs::read_to_string(b.join("series.csv")).unwrap());
    assert!(series.starts_with("t,E,h,m,E_mod\n"));
    assert_eq!(sa.rows, 41);
    assert_eq!(sa.steps, 200);
    assert_eq!(sa.monitor.as_ref().unwrap().violations, 0);

    let names: Vec<String> = sa.snapshots.iter().map(|p| p.file_name().unwrap().to_string_lossy().into()).collect();
    assert_eq!(names, vec!["snap_t0.etds", "snap_t0.1.etds", "snap_t0.2.etds"]);
    for n in &names {
        assert_eq!(fs::read(a.join(n)).unwrap(), fs::read(b.join(n)).unwrap());
    }
    let fits = fs::read_to_string(a.join("fits.txt")).unwrap();
    assert!(fits.contains("unavailable"), "window [1, 400] is past T = 0.2:\n{fits}");

    let meta = fs::read_to_string(a.join("run_meta")).unwrap();
    let mut rerun = RunConfig::defaults(CommandKind::Coarsen);
    rerun.apply_text(&meta).unwrap();
    assert_eq!(rerun, small_coarsen(&a));
}

#[test]
fn convergence_csv_marks_blow_up() {
    let row = |tau, error, order| ConvergenceRow { a_label: AValue::Auto, a: 1.0, p: 2.0, tau, error, order };
    let csv = convergence_csv(&[row(0.01, None, None), row(0.005, Some(0.25), None)]);
    assert_eq!(csv, "A,p,tau,error,order\n1,2,0.01,blowup,\n1,2,0.005,2.5000000000000000e-1,\n");
}

#[test]
fn p_values_parse() {
    let mut cfg = RunConfig::defaults(CommandKind::Convergence);
    cfg.set("p", "auto, 2.5").unwrap();
    assert_eq!(cfg.p, vec![PValue::Auto, PValue::Value(2.5)]);
    assert!(cfg.set("p", "-1").is_err());
}

#[test]
fn binary_constants_and_flag_overrides() {
    let exe = env!("CARGO_BIN_EXE_etdms");
    let out = Command::new(exe).args(["constants", "--order", "4"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("C*_1^2 = 9143/3780"));
    assert!(text.contains("C*_3^2 = 212/945"));

    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.cfg");
    fs::write(&config, "N = 16\nT = 0.05\nseries_every = 10\n").unwrap();
    let out_dir = dir.path().join("out");
    let status = Command::new(exe)
        .args(["coarsen", "--config"])
        .arg(&config)
        .args(["--T", "0.02", "--seed", "9", "--out"])
        .arg(&out_dir)
        .status()
        .unwrap();
    assert!(status.success());
    let meta = fs::read_to_string(out_dir.join("run_meta")).unwrap();
    assert!(meta.contains("\nN = 16\n") && meta.contains("\nT = 0.02\n") && meta.contains("\nseed = 9\n"));
    assert_eq!(fs::read_to_string(out_dir.join("series.csv")).unwrap().lines().count(), 4);

    let bad = Command::new(exe).args(["coarsen", "--N", "abc"]).output().unwrap();
    assert!(!bad.status.success());
}
