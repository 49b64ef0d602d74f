use std::collections::BTreeSet;
use std::process::{Command, Output};

use lbgame::cli::{self, GridSpec};
use lbgame::report::ReportDocument;
use lbgame::{oracle, Framework, Params, Profile, Rational};

fn lbgame(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lbgame")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn analyze_json_round_trips() {
    let o = lbgame(&["analyze", "--a", "10", "--b", "3", "--n", "30", "--framework", "f4", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: ReportDocument = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc.schema_version, 1);
    assert_eq!(doc.instance.framework, "f4");
    let eq: Vec<(u32, u32)> = doc.equilibria.iter().map(|e| (e.n_abc, e.n_bac)).collect();
    assert_eq!(eq, vec![(2, 3), (3, 2)]);
    assert_eq!(doc.equilibria[0].f_bac, Rational::frac(1, 10));
    let again = serde_json::to_string(&doc).unwrap();
    let back: ReportDocument = serde_json::from_str(&again).unwrap();
    assert_eq!(back, doc);
}

#[test]
fn analyze_f3_corollary_example() {
    let o = lbgame(&["analyze", "--a", "1", "--b", "4", "--n", "4", "--framework", "f3", "--json"]);
    let doc: ReportDocument = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc.count, 3);
    assert_eq!(doc.pos, Some(Rational::ONE));
}

#[test]
fn rational_flags_accept_fractions() {
    let o = lbgame(&["analyze", "--a", "7/2", "--b", "1", "--n", "3", "--framework", "f4", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: ReportDocument = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc.instance.a, Rational::frac(7, 2));
}

#[test]
fn exit_codes() {
    assert_eq!(lbgame(&["analyze", "--a", "0", "--b", "1", "--n", "2"]).status.code(), Some(2));
    assert_eq!(lbgame(&["analyze", "--a", "-3", "--b", "1", "--n", "2"]).status.code(), Some(2));
    assert_eq!(lbgame(&["analyze", "--a", "1.5", "--b", "1", "--n", "2"]).status.code(), Some(2));
    assert_eq!(lbgame(&["analyze", "--a", "1", "--b", "1", "--n", "0"]).status.code(), Some(2));
    assert_eq!(lbgame(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(lbgame(&["modes", "--a", "2", "--b", "1", "--n-max", "5"]).status.code(), Some(2));
    assert_eq!(lbgame(&["sweep", "--a", "1", "--b", "1", "--n-min", "5", "--n-max", "4"]).status.code(), Some(2));
    assert_eq!(lbgame(&["matrix", "--a", "1", "--b", "1", "--n", "65"]).status.code(), Some(2));
    assert_eq!(lbgame(&["matrix", "--a", "1", "--b", "1", "--n", "65", "--limit", "65"]).status.code(), Some(0));
    assert_eq!(lbgame(&["verify", "--grid-spec", "a=1..2;b=1..2;n=1..6"]).status.code(), Some(0));
    assert_eq!(lbgame(&["verify", "--grid-spec", "zz=1"]).status.code(), Some(2));
}

#[test]
fn unwritable_output_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("missing").join("out.csv");
    let o = lbgame(&["sweep", "--a", "1", "--b", "4", "--n-max", "3", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("out.csv"));
}

#[test]
fn sweep_csv_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.csv");
    let second = dir.path().join("second.csv");
    for path in [&first, &second] {
        let o = lbgame(&["sweep", "--a", "2", "--b", "1", "--n-max", "64", "--framework", "f4", "--out", path.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    let a = std::fs::read(&first).unwrap();
    assert_eq!(a, std::fs::read(&second).unwrap());
    let text = String::from_utf8(a).unwrap();
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "N,eqCount,equilibria,poaExact,poaFormula,pos,mode,poaExactApprox,poaFormulaApprox,posApprox"
    );
    for (i, line) in lines.enumerate() {
        let n = i + 1;
        let count: usize = line.split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(count == 4, n % 8 == 4, "N={n}");
        assert!(line.starts_with(&format!("{n},")));
    }
}

#[test]
fn sweep_f3_count_stabilises() {
    let o = lbgame(&["sweep", "--a", "1", "--b", "4", "--n-max", "10"]);
    let counts: Vec<String> = stdout(&o).lines().skip(1).map(|l| l.split(',').nth(1).unwrap().to_string()).collect();
    assert_eq!(counts[0], "2");
    assert!(counts[1..].iter().all(|c| c == "3"));
}

#[test]
fn sweep_f3_poa_decreases() {
    let o = lbgame(&["sweep", "--a", "2", "--b", "4", "--n-max", "20"]);
    let mut rdr = csv::Reader::from_reader(o.stdout.as_slice());
    let mut last: Option<Rational> = None;
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.unwrap();
        let n = (i + 1) as i128;
        let poa: Rational = rec[3].parse().unwrap();
        assert_eq!(poa, Rational::ONE + Rational::frac(1, n * n));
        if let Some(prev) = last {
            assert!(poa < prev);
        }
        last = Some(poa);
    }
}

#[test]
fn modes_timeline_bands() {
    let o = lbgame(&["modes", "--a", "3", "--b", "1", "--n-max", "22"]);
    let mut rdr = csv::Reader::from_reader(o.stdout.as_slice());
    for rec in rdr.records() {
        let rec = rec.unwrap();
        let n: u32 = rec[0].parse().unwrap();
        let expected = match n {
            5 | 16 => "3-A",
            6 | 17 => "3-B",
            _ => "1",
        };
        assert_eq!(&rec[4], expected, "N={n}");
        assert_eq!(&rec[6], "true");
        let alpha: Rational = rec[7].parse().unwrap();
        let beta: Rational = rec[8].parse().unwrap();
        assert!(alpha < beta);
    }
}

#[test]
fn matrix_dumps_are_transposes() {
    let a = lbgame(&["matrix", "--a", "1", "--b", "3", "--n", "4", "--scaled", "--player", "a", "--csv"]);
    let b = lbgame(&["matrix", "--a", "1", "--b", "3", "--n", "4", "--scaled", "--player", "b", "--csv"]);
    let read = |o: &Output| {
        let mut rdr = csv::Reader::from_reader(o.stdout.as_slice());
        rdr.records()
            .map(|r| {
                let r = r.unwrap();
                ((r[1].parse::<u32>().unwrap(), r[2].parse::<u32>().unwrap()), (r[3].to_string(), r[4].to_string()))
            })
            .collect::<std::collections::BTreeMap<_, _>>()
    };
    let (ma, mb) = (read(&a), read(&b));
    assert_eq!(ma.len(), 25);
    for (&(x, y), v) in &ma {
        assert_eq!(&mb[&(y, x)], v);
    }
    assert_eq!(ma[&(1, 1)], ("50/1".to_string(), "true".to_string()));
    assert_eq!(ma[&(4, 0)].0, "112/1");
}

#[test]
fn limits_json() {
    let o = lbgame(&["limits", "--a", "1", "--b", "3", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["limits"]["f3Hessian"], serde_json::json!([["7/1", "-5/1"], ["-5/1", "7/1"]]));
    assert_eq!(v["limits"]["f3HessianPositiveDefinite"], true);
    assert_eq!(v["limits"]["f3Equilibrium"], serde_json::json!(["0/1", "0/1"]));
}

#[test]
fn verify_reports_corrupted_predictor() {
    let spec = GridSpec::parse("a=1..3;b=1..3;n=1..8;extra=").unwrap();
    let corrupt = |fw: Framework, p: &Params| {
        let mut set = oracle::default_predictor(fw)(p);
        if p.n() == 5 {
            set.insert(Profile::new(p.n(), 0));
        }
        set
    };
    let mut out = Vec::new();
    let ok = cli::verify_with(&[Framework::F3, Framework::F4], Some(&spec), corrupt, &mut out).unwrap();
    assert!(!ok);
    let text = String::from_utf8(out).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("MISMATCH")).count(), 18);
    assert!(text.contains("MISMATCH framework=f4 a=1 b=1 N=5"), "{text}");

    let mut out = Vec::new();
    let honest = |fw: Framework, p: &Params| -> BTreeSet<Profile> { oracle::default_predictor(fw)(p) };
    assert!(cli::verify_with(&[Framework::F4], Some(&spec), honest, &mut out).unwrap());
}

#[test]
fn verify_empty_grid() {
    let o = lbgame(&["verify", "--framework", "f4", "--grid-spec", "a=3..2;extra="]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("0 instances"));
}
