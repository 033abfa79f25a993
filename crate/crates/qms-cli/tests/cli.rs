use std::fs;
use std::path::Path;
use std::process::Command;

use proptest::prelude::*;
use qms::arith::qf;
use qms::coset::{GramTriple, IndexPair};
use qms::lifts::{QuatTable, SiegelTable};
use qms::orbits::{self, SplitLattice};
use qms::quadspace::GaussRational;
use qms_cli::{run, synth_table, Kind, Report, Status, Table, TableFile};
use serde_json::Value;
use tempfile::TempDir;

fn qms(args: &[&str]) -> (i32, Report) {
    let argv = std::iter::once("qms").chain(args.iter().copied());
    run(argv).expect("not a help request")
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).display().to_string()
}

fn first_detail(r: &Report) -> &Value {
    &r.details[0]
}

#[test]
fn quick_suites_pass() {
    for args in [&["oct-check", "--bound", "20"][..], &["triality-verify", "--bound", "2", "--seed", "5"]] {
        let (code, r) = qms(args);
        assert_eq!((code, r.status), (0, Status::Pass), "{r:?}");
    }
}

#[test]
fn lift_then_maass_check_passes() {
    let dir = TempDir::new().unwrap();
    let (c, f) = (path(&dir, "c.json"), path(&dir, "F.json"));
    let (code, _) = qms(&["synth", "--kind", "halfintegral", "--weight", "10", "--bound", "100", "--out", &c]);
    assert_eq!(code, 0);
    let (code, r) = qms(&["lift", "--in", &c, "--weight", "10", "--bound", "100", "--out", &f]);
    assert_eq!(code, 0, "{r:?}");
    let Table::Siegel(t) = qms_cli::table::read_table(Path::new(&f)).unwrap() else { panic!("not a siegel table") };
    assert_eq!(t.weight, 10);
    assert!(t.entries.keys().all(|k| k.disc() <= 100));
    let (code, r) = qms(&["maass-check", "--in", &f]);
    assert_eq!((code, r.status), (0, Status::Pass), "{r:?}");
}

#[test]
fn theta_star_pipeline_passes_and_round_trips_through_fj() {
    let dir = TempDir::new().unwrap();
    let (s, phi, back) = (path(&dir, "S.json"), path(&dir, "phi.json"), path(&dir, "back.json"));
    assert_eq!(qms(&["synth", "--kind", "siegel", "--bound", "60", "--weight", "8", "--out", &s]).0, 0);
    let (code, r) = qms(&["theta-star", "--in", &s, "--bound", "8", "--threads", "2", "--out", &phi]);
    assert_eq!(code, 0, "{r:?}");
    let (code, r) = qms(&["maass-check", "--in", &phi]);
    assert_eq!((code, r.status), (0, Status::Pass), "{r:?}");
    let (code, r) = qms(&["fj", "--in", &phi, "--out", &back]);
    assert_eq!(code, 0, "{r:?}");
    let Table::Siegel(orig) = qms_cli::table::read_table(Path::new(&s)).unwrap() else { panic!() };
    let Table::Siegel(got) = qms_cli::table::read_table(Path::new(&back)).unwrap() else { panic!() };
    assert!(!got.entries.is_empty());
    for (k, v) in &got.entries {
        assert_eq!(&orig.entries[k], v, "coefficient at {k}");
    }
}

#[test]
fn random_quaternionic_table_fails_with_counterexample() {
    let dir = TempDir::new().unwrap();
    let phi = path(&dir, "phi.json");
    assert_eq!(qms(&["synth", "--kind", "quaternionic", "--bound", "6", "--seed", "3", "--out", &phi]).0, 0);
    let (code, r) = qms(&["maass-check", "--in", &phi]);
    assert_eq!((code, r.status), (1, Status::Fail));
    let ce = first_detail(&r)["counterexample"].as_str().expect("counterexample present");
    assert!(ce.contains('['), "counterexample names a key: {ce}");
}

#[test]
fn dirichlet_factorization_on_a_lift() {
    let dir = TempDir::new().unwrap();
    let (s, phi) = (path(&dir, "S.json"), path(&dir, "phi.json"));
    let lambda = "1,0,0,1,0,-1,1,0";
    assert_eq!(qms(&["synth", "--kind", "siegel", "--bound", "400", "--out", &s]).0, 0);
    let (code, r) = qms(&["theta-star", "--in", &s, "--lambda", lambda, "--bound", "8", "--out", &phi]);
    assert_eq!(code, 0, "{r:?}");
    let (code, r) = qms(&["dirichlet", "--in", &phi, "--lambda", lambda, "--bound", "8"]);
    assert_eq!((code, r.status), (0, Status::Pass), "{r:?}");
    let (code, r) = qms(&["dirichlet", "--in", &phi, "--lambda", lambda, "--bound", "8", "--exclude", "2"]);
    assert_eq!(code, 0, "{r:?}");
    let coeffs = r.details[1]["coefficients"].as_object().unwrap();
    assert!(coeffs.keys().all(|n| n.parse::<u64>().unwrap() % 2 == 1));
}

#[test]
fn dirichlet_rejects_a_bad_pair() {
    let dir = TempDir::new().unwrap();
    let phi = path(&dir, "phi.json");
    assert_eq!(qms(&["synth", "--kind", "quaternionic", "--bound", "4", "--out", &phi]).0, 0);
    let (code, r) = qms(&["dirichlet", "--in", &phi, "--lambda", "1,2,3"]);
    assert_eq!((code, r.status), (2, Status::Error));
    let (code, _) = qms(&["dirichlet", "--in", &phi, "--lambda", "2,0,0,2,0,-2,2,0"]);
    assert_eq!(code, 2);
}

fn csv_int(v: &[i128]) -> String {
    v.iter().map(i128::to_string).collect::<Vec<_>>().join(",")
}

#[test]
fn reduce_finds_the_canonical_pair() {
    let l = SplitLattice::new(4).unwrap();
    let s = GramTriple::new(1, 1, 1);
    let (c1, c2) = orbits::canonical_pair(&l, &s);
    let g = orbits::word_isometry(&l, [5, 300, 77, 2100, 1031, 18]).unwrap();
    let (t1, t2) = (g.apply(&c1).unwrap(), g.apply(&c2).unwrap());
    let (code, r) = qms(&["reduce", "--t1", &csv_int(&t1), "--t2", &csv_int(&t2)]);
    assert_eq!((code, r.status), (0, Status::Pass), "{r:?}");
    assert_eq!(first_detail(&r)["gram"], serde_json::json!([1, 1, 1]));
}

#[test]
fn reduce_reports_hypothesis_violations() {
    let (code, r) = qms(&["reduce", "--t1", "1,0,0,0,0,0,0,1", "--t2", "0,1,0,0,0,0,1,0"]);
    assert_eq!((code, r.status), (2, Status::Error));
    let (code, _) = qms(&["reduce", "--t1", "1,0,0", "--t2", "0,1"]);
    assert_eq!(code, 2);
}

fn significant_digits(field: &str) -> usize {
    let mantissa = field.trim_start_matches('-').split('e').next().unwrap();
    mantissa.chars().filter(char::is_ascii_digit).count()
}

#[test]
fn whittaker_writes_full_precision_csv() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "w.csv");
    let (code, r) = qms(&["whittaker", "--t", "1", "--angle", "0.2", "--weight", "4", "--out", &out]);
    assert_eq!((code, r.status), (0, Status::Pass), "{r:?}");
    let mut rd = csv::Reader::from_path(&out).unwrap();
    assert_eq!(rd.headers().unwrap().len(), 7);
    let rows: Vec<csv::StringRecord> = rd.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 9);
    for row in &rows {
        for (i, f) in row.iter().enumerate() {
            if i != 2 {
                assert_eq!(significant_digits(f), 17, "{f}");
                f.parse::<f64>().unwrap();
            }
        }
    }
}

#[test]
fn whittaker_tolerance_controls_the_verdict() {
    let (code, r) = qms(&["whittaker", "--t", "1", "--angle", "0", "--tol", "1e-30"]);
    assert_eq!((code, r.status), (1, Status::Fail));
    assert!(r.details.iter().any(|d| d.get("counterexample").is_some()));
}

#[test]
fn poincare_writes_csv_and_checks_hypotheses() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "p.csv");
    let (code, r) = qms(&["poincare", "--triple", "1,1,1", "--weight", "16", "--bound", "1", "--out", &out]);
    assert_eq!(code, 0, "{r:?}");
    assert!(first_detail(&r)["terms"].as_u64().unwrap() > 0);
    assert_eq!(csv::Reader::from_path(&out).unwrap().records().count(), 33);
    assert_eq!(qms(&["poincare", "--weight", "6"]).0, 2);
    assert_eq!(qms(&["poincare", "--triple", "1,0,-1"]).0, 2);
}

#[test]
fn usage_and_data_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let bad = path(&dir, "bad.json");
    fs::write(&bad, "{ not json").unwrap();
    let float_entry = path(&dir, "float.json");
    fs::write(&float_entry, r#"{"kind":"siegel","weight":10,"entries":[{"key":[1,0,1],"re":"0.25","im":"0"}]}"#).unwrap();
    let wrong_kind = path(&dir, "kind.json");
    fs::write(&wrong_kind, r#"{"kind":"halfintegral","weight":10,"entries":[{"key":[1,0,1],"re":"1","im":"0"}]}"#)
        .unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["no-such-command"],
        vec![],
        vec!["lift"],
        vec!["lift", "--in", "/nonexistent/c.json"],
        vec!["maass-check", "--in", &bad],
        vec!["maass-check", "--in", &float_entry],
        vec!["maass-check", "--in", &wrong_kind],
        vec!["theta-star", "--in", &wrong_kind],
        vec!["oct-check", "--bound", "-3"],
        vec!["oct-check", "--threads", "0"],
        vec!["synth", "--kind", "cubic"],
    ];
    for args in cases {
        let (code, r) = qms(&args);
        assert_eq!((code, r.status), (2, Status::Error), "{args:?}: {r:?}");
        assert!(first_detail(&r)["error"].is_string());
    }
}

#[test]
fn help_is_not_a_report() {
    assert!(run(["qms", "--help"]).is_err());
    assert!(run(["qms", "lift", "--help"]).is_err());
}

#[test]
fn synth_is_deterministic() {
    let dir = TempDir::new().unwrap();
    for kind in ["halfintegral", "siegel", "quaternionic"] {
        let (a, b, c) = (path(&dir, "a.json"), path(&dir, "b.json"), path(&dir, "c.json"));
        for (out, seed) in [(&a, "9"), (&b, "9"), (&c, "10")] {
            assert_eq!(qms(&["synth", "--kind", kind, "--seed", seed, "--bound", "8", "--out", out]).0, 0);
        }
        let (a, b, c) = (fs::read(a).unwrap(), fs::read(b).unwrap(), fs::read(c).unwrap());
        assert_eq!(a, b, "{kind}");
        assert_ne!(a, c, "{kind}");
    }
}

#[test]
fn synth_honors_support_rules() {
    let Table::HalfIntegral(h) = synth_table(Kind::Halfintegral, 4, 10, 200).unwrap() else { panic!() };
    assert!(h.entries.keys().all(|n| matches!(n % 4, 0 | 3)));
    assert!(h.entries.contains_key(&0) && h.entries.contains_key(&3));
    let Table::Siegel(s) = synth_table(Kind::Siegel, 4, 10, 200).unwrap() else { panic!() };
    for k in s.entries.keys() {
        assert_eq!(k.reduce().unwrap(), *k);
        assert!(k.is_pos_def() && k.disc() <= 200);
    }
    let Table::Quaternionic(q) = synth_table(Kind::Quaternionic, 4, 10, 8).unwrap() else { panic!() };
    assert!(q.entries.keys().all(|k| qms::coset::gram(k).is_pos_def()));
}

#[test]
fn report_json_round_trips_through_the_binary() {
    let out = Command::new(env!("CARGO_BIN_EXE_qms")).args(["oct-check", "--bound", "5", "--seed", "42"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let r: Report = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!((r.command.as_str(), r.status, r.seed), ("oct-check", Status::Pass, Some(42)));
    assert!(r.timings.contains_key("octonion"));

    let out = Command::new(env!("CARGO_BIN_EXE_qms")).args(["lift", "--in", "/nonexistent"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let r: Report = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r.status, Status::Error);
}

fn gauss() -> impl Strategy<Value = GaussRational> {
    (-50i64..50, 1i64..20, -50i64..50, 1i64..20).prop_map(|(a, b, c, d)| GaussRational::new(qf(a, b), qf(c, d)))
}

fn mat() -> impl Strategy<Value = [[i64; 2]; 2]> {
    prop::array::uniform2(prop::array::uniform2(-5i64..6))
}

fn assert_round_trip(t: Table) {
    let json = TableFile::from_table(&t).to_json();
    let back = TableFile::from_json(&json).unwrap().to_table().unwrap();
    assert_eq!(back, t);
}

proptest! {
    #[test]
    fn halfintegral_tables_round_trip(w in -4i64..30, m in prop::collection::btree_map(0i64..500, gauss(), 0..20)) {
        let mut t = qms::lifts::HalfIntegralTable::new(w);
        for (n, v) in m {
            let n = 4 * n + if n % 2 == 0 { 0 } else { 3 };
            t.insert(n, v).unwrap();
        }
        assert_round_trip(Table::HalfIntegral(t));
    }

    #[test]
    fn siegel_tables_round_trip(
        w in 2i64..30,
        keys in prop::collection::vec((1i64..20, -20i64..20, 1i64..20), 0..20),
        vals in prop::collection::vec(gauss(), 20),
    ) {
        let mut t = SiegelTable::new(w, true);
        for ((a, b, c), v) in keys.into_iter().zip(vals) {
            let k = GramTriple::new(a, b, c);
            if k.is_pos_def() {
                t.insert(&k, v).unwrap();
            }
        }
        assert_round_trip(Table::Siegel(t));
    }

    #[test]
    fn quaternionic_tables_round_trip(w in 2i64..30, entries in prop::collection::vec((mat(), mat(), gauss()), 0..20)) {
        let mut t = QuatTable::new(w);
        for (t1, t2, v) in entries {
            let k = IndexPair::new(t1, t2);
            if qms::coset::gram(&k).is_pos_def() {
                t.insert(k, v).unwrap();
            }
        }
        assert_round_trip(Table::Quaternionic(t));
    }
}
