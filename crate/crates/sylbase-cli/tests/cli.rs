use std::process::{Command, Output};

fn sylbase(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sylbase")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn lemmas_default_and_small_grid() {
    let o = sylbase(&["lemmas"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("lemmas ok: 7360 cells"));
    let small = sylbase(&["lemmas", "--qmax", "3"]);
    assert_eq!(small.status.code(), Some(0));
    assert_eq!(stdout(&small).lines().count(), 1);
}

#[test]
fn injected_fault_reports_a_counterexample() {
    let o = sylbase(&["lemmas", "--q-max", "3", "--inject-fault"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("counterexample (q,d,eps) = (3,2,+)"));
}

#[test]
fn sylow_table_detail_and_filter() {
    let o = sylbase(&["sylow-table"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("detail PSp4(3): |H0| = 64"));
    let sub = sylbase(&["sylow-table", "--families", "orthogonal-plus", "--n", "8..16", "--format", "csv"]);
    assert_eq!(sub.status.code(), Some(0));
    let text = stdout(&sub);
    // n = 8, 10, 12, 14, 16 at eight values of q.
    assert_eq!(text.lines().count(), 1 + 5 * 8);
    assert!(text.lines().skip(1).all(|l| l.contains(",orthogonal-plus,") && l.ends_with(",true")));
}

#[test]
fn verify_exceptional_and_symplectic() {
    let ex = sylbase(&["verify", "--driver", "ex"]);
    assert_eq!(ex.status.code(), Some(0));
    let text = stdout(&ex);
    assert!(text.contains("delegated: G2(3)"));
    assert!(text.contains("excluded: F4(3) G2(5)"));
    assert!(text.contains("diff against expected tables: empty"));
    let psp = sylbase(&["verify", "--driver", "psp"]);
    assert_eq!(psp.status.code(), Some(0));
    let text = stdout(&psp);
    assert!(text.contains("stage 1 fails in psp/case1/large: (10,3)"));
    assert!(text.contains("delegated: (6,3) (8,3) (10,3)"));
}

#[test]
fn verify_all_drivers_reports_the_two_known_differences() {
    let o = sylbase(&["verify", "--jobs", "4"]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("verify: 5 of 7 drivers match the expected tables"));
    assert!(text.contains("fail psu/case2 2: missing [(15,3)] unexpected []"));
    assert!(text.contains("open: missing [] unexpected [(5,3)]"));
}

#[test]
fn csv_writes_one_file_per_driver() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("reports");
    let o = sylbase(&["verify", "--driver", "psp", "--driver", "ex", "--format", "csv", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    for name in ["psp", "ex"] {
        let text = std::fs::read_to_string(out.join(format!("{name}.csv"))).unwrap();
        assert!(text.starts_with("driver,case_id,"));
        assert!(text.lines().skip(1).all(|l| l.starts_with(&format!("{name},"))));
    }
}

#[test]
fn jsonl_is_byte_identical_across_thread_counts() {
    let args = |jobs: &'static str| ["verify", "--driver", "o_even_plus", "--n-max", "20", "--format", "jsonl", "--jobs", jobs];
    let one = sylbase(&args("1"));
    let four = sylbase(&args("4"));
    assert!(!one.stdout.is_empty());
    assert_eq!(one.stdout, four.stdout);
    assert!(stdout(&one).contains("2279214355760562960"));
}

#[test]
fn permcheck_catalog_groups() {
    for (name, b) in [("pgl2_7", 3), ("aut_a6", 3), ("psp4_3.2", 2)] {
        let o = sylbase(&["permcheck", name]);
        assert_eq!(o.status.code(), Some(0), "{name}");
        assert!(stdout(&o).contains(&format!("b(G,H) = {b}")), "{name}");
    }
    assert_eq!(sylbase(&["permcheck", "psl2_11"]).status.code(), Some(2));
    assert_eq!(sylbase(&["permcheck", "s8", "--index-cap", "10"]).status.code(), Some(3));
}

#[test]
fn oracle_count_examples() {
    let cases = [
        ("gl1-wr n=4 q=5 t1", "closed form 28 vs enumeration 28"),
        ("quat-wr q=5 square-identity", "closed form 11 vs enumeration 11"),
        ("gu1-wr n=4 q=3 t2", "closed form 102 vs enumeration 102"),
    ];
    for (spec, want) in cases {
        let o = sylbase(&["oracle-count", spec]);
        assert_eq!(o.status.code(), Some(0), "{spec}");
        assert!(stdout(&o).contains(want), "{spec}");
    }
    assert_eq!(sylbase(&["oracle-count", "gl1-wr", "n=9", "q=9", "t1"]).status.code(), Some(3));
    assert_eq!(sylbase(&["oracle-count", "heap-wr q=5"]).status.code(), Some(2));
}

#[test]
fn usage_errors_and_config_precedence() {
    assert_eq!(sylbase(&["verify", "--driver", "e8"]).status.code(), Some(2));
    assert_eq!(sylbase(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(sylbase(&["lemmas", "--format", "xml"]).status.code(), Some(2));
    assert_eq!(sylbase(&["lemmas", "--n-max", "0"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    std::fs::write(&conf, "# small grid\nq_max = 3\nformat = csv\n").unwrap();
    let c = conf.to_str().unwrap();
    let from_file = sylbase(&["lemmas", "--config", c]);
    assert_eq!(from_file.status.code(), Some(0));
    assert!(stdout(&from_file).starts_with("q_max,d_max"));
    assert!(stdout(&from_file).contains("\n3,20,10000,40,0,0"));
    let flag_wins = sylbase(&["lemmas", "--config", c, "--format", "text", "--q-max", "5"]);
    assert!(stdout(&flag_wins).starts_with("lemmas ok: 80 cells"));
    std::fs::write(&conf, "jobs = none\n").unwrap();
    assert_eq!(sylbase(&["lemmas", "--config", c]).status.code(), Some(2));
}
