use std::path::Path;
use std::process::Command as Process;

use cll_cli::*;
use proptest::prelude::*;

fn cll(args: &[&str]) -> std::process::Output {
    Process::new(env!("CARGO_BIN_EXE_cll")).args(args).env_remove("CLL_THREADS").output().unwrap()
}

fn moment_z(samples: u64) -> ExperimentConfig {
    ExperimentConfig::new(Command::MomentZ { n: 3, ell: 3, class: 2, h: "cyclic:3".into(), samples, seed: 9 })
}

#[test]
fn cyclic_z_record_carries_the_target() {
    let rec = run(&moment_z(300)).unwrap();
    assert_eq!(rec.target, Some(1.0));
    assert_eq!(rec.samples, Some(300));
    assert!(rec.stderr.unwrap() > 0.0);
    let exact = rec.details["finite_n_exact"].as_f64().unwrap();
    assert!((exact - 26.0 / 28.0).abs() < 1e-12);
}

#[test]
fn odd_degree_cover_count_is_zero() {
    for n in [1u64, 3, 5, 7] {
        let cfg = ExperimentConfig::new(Command::HurwitzB { group: "cyclic:2".into(), cset: "nontrivial".into(), q: 5, n });
        let rec = run(&cfg).unwrap();
        assert_eq!(rec.exact, Some(serde_json::json!(0)));
        assert_eq!(rec.target, Some(0.0));
        assert!(rec.stderr.is_none());
    }
}

#[test]
fn malformed_spec_is_a_structured_error() {
    let cfg = ExperimentConfig::new(Command::Schur { group: "cyclic:x".into(), ell: 3 });
    let err = run(&cfg).unwrap_err();
    assert_eq!(exit_code(&err), 1);
    let out = cll(&["schur", "--group", "nonsense:3", "--ell", "3"]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(v["config"]["group"], "nonsense:3");
    assert!(v["message"].as_str().unwrap().contains("nonsense"));
}

#[test]
fn exit_codes_follow_the_convention() {
    assert_eq!(cll(&["schur", "--ell", "3"]).status.code(), Some(1));
    assert_eq!(cll(&["moment-y", "--n", "2", "--ell", "3", "--q", "6", "--H", "inversion:3^1", "--samples", "5"]).status.code(), Some(2));
    let ok = cll(&["relator-matrix", "--relator", "[x1,x2][x3,x4]"]);
    assert_eq!(ok.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(v["exact"], serde_json::json!([[0, 2, 0, 0], [1, 0, 0, 0], [0, 0, 0, 2], [0, 0, 1, 0]]));
}

#[test]
fn all_inverses_relator_has_unit_coefficients() {
    let cfg = ExperimentConfig::new(Command::RelatorMatrix { relator: cll_core::nilpotent::Word::all_inverses(4).to_string(), gens: 4, ell: 3 });
    let m: Vec<Vec<u64>> = serde_json::from_value(run(&cfg).unwrap().exact.unwrap()).unwrap();
    for i in 0..4 {
        for j in i + 1..4 {
            assert_eq!(m[j][i], 1, "entry ({i}, {j})");
        }
    }
}

#[test]
fn records_are_deterministic_across_threads() {
    let mut a = moment_z(200);
    a.threads = Some(1);
    let mut b = moment_z(200);
    b.threads = Some(3);
    assert_eq!(run(&a).unwrap().payload(), run(&b).unwrap().payload());
    let out1 = cll(&["moment-y", "--n", "2", "--ell", "3", "--q", "7", "--H", "inversion:3^1", "--samples", "150", "--threads", "1"]);
    let out2 = Process::new(env!("CARGO_BIN_EXE_cll"))
        .args(["moment-y", "--n", "2", "--ell", "3", "--q", "7", "--H", "inversion:3^1", "--samples", "150", "--threads", "1"])
        .env("CLL_THREADS", "2")
        .output()
        .unwrap();
    let strip = |o: &[u8]| {
        let mut v: serde_json::Value = serde_json::from_slice(o).unwrap();
        v["timestamp"] = serde_json::json!(0);
        v
    };
    assert_eq!(strip(&out1.stdout), strip(&out2.stdout));
}

#[test]
fn records_append_as_json_lines_and_export_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("runs.jsonl");
    let rec = run(&ExperimentConfig::new(Command::Schur { group: "elem_abelian:3^2".into(), ell: 3 })).unwrap();
    append_record(&path, &rec).unwrap();
    append_record(&path, &rec).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<ResultRecord> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines, vec![rec.clone(), rec.clone()]);
    let csv = to_csv(&lines).unwrap();
    assert_eq!(csv.lines().count(), 3);
    assert!(csv.lines().nth(1).unwrap().starts_with("schur,"));
    // Only the target file exists afterwards: no temporaries are left behind.
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn cli_output_flag_writes_the_record() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.jsonl");
    let csv = dir.path().join("r.csv");
    let o = cll(&["cover", "--group", "elem_abelian:3^2", "--ell", "3", "--output", out.to_str().unwrap(), "--csv", csv.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let rec: ResultRecord = serde_json::from_str(std::fs::read_to_string(&out).unwrap().trim()).unwrap();
    assert_eq!(rec.exact, Some(serde_json::json!(27)));
    assert!(std::fs::read_to_string(&csv).unwrap().starts_with("command,"));
}

#[test]
fn empty_manifest_passes() {
    let rep = regression_suite(&Manifest::default(), None);
    assert!(rep.all_pass());
    assert!(rep.entries.is_empty());
}

#[test]
fn wrong_target_fails_only_its_entry() {
    let schur = ExperimentConfig::new(Command::Schur { group: "heisenberg:3".into(), ell: 3 });
    let entries = vec![
        ManifestEntry { name: "right".into(), config: schur.clone(), exact: Some(serde_json::json!([3, 3])), target: None, sigmas: 3.0 },
        ManifestEntry { name: "wrong".into(), config: schur, exact: Some(serde_json::json!([9])), target: None, sigmas: 3.0 },
        ManifestEntry { name: "estimate".into(), config: moment_z(300), exact: None, target: Some(50.0), sigmas: 3.0 },
    ];
    let rep = regression_suite(&Manifest { entries }, None);
    assert_eq!((rep.passed, rep.failed), (1, 2));
    assert!(rep.entries[0].pass);
    assert!(!rep.entries[1].pass);
    assert!(!rep.entries[2].pass);
}

#[test]
fn shipped_manifest_passes() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("manifests/regression.json");
    let m = read_manifest(&path).unwrap();
    assert!(!m.entries.is_empty());
    let rep = regression_suite(&m, None);
    let failures: Vec<_> = rep.entries.iter().filter(|e| !e.pass).map(|e| (&e.name, &e.detail)).collect();
    assert!(rep.all_pass(), "{failures:?}");
}

#[test]
fn regress_exits_three_on_failures() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("m.json");
    let bad = Manifest {
        entries: vec![ManifestEntry {
            name: "bad".into(),
            config: ExperimentConfig::new(Command::Cover { group: "cyclic:3".into(), ell: 3 }),
            exact: Some(serde_json::json!(9)),
            target: None,
            sigmas: 3.0,
        }],
    };
    std::fs::write(&manifest, serde_json::to_vec(&bad).unwrap()).unwrap();
    let report = dir.path().join("report.json");
    let o = cll(&["regress", "--manifest", manifest.to_str().unwrap(), "--report", report.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    let rep: RegressionReport = serde_json::from_slice(&std::fs::read(report).unwrap()).unwrap();
    assert_eq!(rep.failed, 1);
}

fn command_strategy() -> impl Strategy<Value = Command> {
    prop_oneof![
        ("[a-z]{1,8}", 2u64..50).prop_map(|(group, ell)| Command::Schur { group, ell }),
        (1usize..6, 2u64..9, 1u64..20, 0u64..1000, any::<u64>()).prop_map(|(n, ell, q, samples, seed)| Command::MomentY {
            n,
            ell,
            q,
            class: 2,
            h: "inversion:3^1".into(),
            delta: vec![q % 3],
            samples,
            seed
        }),
        (1usize..6, proptest::option::of(0usize..100), any::<u64>()).prop_map(|(n, pairs, seed)| Command::OrbitCheck {
            n,
            ell: 3,
            q: 7,
            h: "inversion:3^2".into(),
            delta: vec![],
            pairs,
            seed
        }),
    ]
}

proptest! {
    #[test]
    fn configs_round_trip(cmd in command_strategy(), threads in proptest::option::of(1usize..8)) {
        let cfg = ExperimentConfig { command: cmd, threads, output: None };
        let text = serde_json::to_string(&cfg).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back, &cfg);
        prop_assert_eq!(back.hash(), cfg.hash());
        prop_assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }
}
