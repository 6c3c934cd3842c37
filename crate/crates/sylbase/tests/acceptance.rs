//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Exits non-zero when a criterion fails, except for the documented table differences of
//! criterion 5, which are reported as FAIL but tolerated as long as nothing else differs.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use sylbase::arith::{int, lemma_oracle_grid, Integer};
use sylbase::orders::Family;
use sylbase::permgrp::{
    base_size_two_or_three, coset_action, lookup_group, oracle_grid, orbits_of, sylow2, OracleQuery, SylowOptions,
};
use sylbase::qhat::{
    compare_exceptions, expected_tables, final_sets, monotone_spot_check, run_driver, stage_failures, to_json_lines,
    CaseReport, Cell, Disposition, Driver, Grid, Verdict, GRID_NOTICE,
};
use sylbase::sylow::master_consistency;

/// Differences between the sweep and the quoted exception sets that stand after checking
/// the text. L5(3) is deferred to direct computation but is missing from the certified
/// list; U15(3) already passes the second psu stage.
const KNOWN_DIFFS: [(&str, &str); 4] = [
    ("psl", "fail psl/case2 1: missing [] unexpected [(5,3)]"),
    ("psl", "delegated: missing [(5,3)] unexpected []"),
    ("psl", "open: missing [] unexpected [(5,3)]"),
    ("psu", "fail psu/case2 2: missing [(15,3)] unexpected []"),
];

const SEED: u64 = 2024;
const JOBS: usize = 4;

struct Outcome {
    pass: bool,
    /// FAIL that matches the documented differences exactly.
    tolerated: bool,
    detail: Vec<String>,
}

impl Outcome {
    fn new(pass: bool, detail: Vec<String>) -> Self {
        Outcome { pass, tolerated: false, detail }
    }
}

fn report(k: u32, title: &str, limit: Duration, f: impl FnOnce() -> Outcome) -> (bool, bool) {
    let start = Instant::now();
    let mut out = f();
    let took = start.elapsed();
    if took > limit {
        out.pass = false;
        out.tolerated = false;
        out.detail.push(format!("runtime {took:.2?} exceeds {limit:?}"));
    }
    let tag = if out.pass { "PASS" } else { "FAIL" };
    println!("criterion {k} {tag}: {title} ({took:.2?})");
    for d in &out.detail {
        println!("    {d}");
    }
    (out.pass, out.tolerated)
}

fn c1() -> Outcome {
    let mut detail = Vec::new();
    let r = lemma_oracle_grid(1000, 20, 10_000, false).expect("lemma grid");
    // 167 odd primes below 1000 and 17 odd proper prime powers: 3^2..3^6, 5^2..5^4, 7^2, 7^3,
    // 11^2, 13^2, 17^2, 19^2, 23^2, 29^2, 31^2.
    let cells_ok = r.power_cells == (167 + 17) * 20 * 2;
    detail.push(format!(
        "{} power cells, {} mismatches; factorial identity and bound: {} failures for m <= {}",
        r.power_cells,
        r.power_mismatches.len(),
        r.factorial_failures.len(),
        r.m_max
    ));
    let faulty = lemma_oracle_grid(1000, 20, 0, true).expect("fault grid");
    let caught = !faulty.power_mismatches.is_empty();
    detail.push(format!("injected fault detected: {caught}"));
    Outcome::new(r.passed() && cells_ok && caught, detail)
}

fn c2() -> Outcome {
    let qs: Vec<Integer> = [3, 5, 7, 9, 17, 31, 127, 257].into_iter().map(int).collect();
    let rows = master_consistency(&Family::ALL, 2..=30, &qs).expect("consistency");
    let bad: Vec<String> =
        rows.iter().filter(|r| !r.agrees()).map(|r| format!("{}({}): {} vs {}", r.group, r.q, r.table, r.catalog)).collect();
    let families: BTreeSet<Family> = rows.iter().map(|r| r.group.family).collect();
    let psp43 = rows
        .iter()
        .find(|r| r.group.family == Family::Symplectic && r.group.n == 4 && r.q == int(3))
        .map(|r| r.table.clone());
    let mut detail = vec![format!("{} rows over {} families, {} mismatches", rows.len(), families.len(), bad.len())];
    detail.extend(bad.iter().take(10).cloned());
    detail.push(format!("PSp4(3): {:?}", psp43.as_ref().map(ToString::to_string)));
    // 2G2 needs q an odd power of 3 above 3, which the list does not contain.
    let expected_families = Family::ALL.len() - 1;
    Outcome::new(bad.is_empty() && families.len() == expected_families && psp43 == Some(int(64)), detail)
}

fn c3() -> Outcome {
    let cap = 1_000_000;
    let grid = oracle_grid(&[3, 5, 7, 9], cap).expect("oracle grid");
    let mut bad = Vec::new();
    for q in &grid {
        let out = q.run(cap).expect("oracle run");
        if !out.agrees() {
            bad.push(format!("{}: {:?} vs {:?}", out.query, out.closed_form, out.brute_force));
        }
    }
    let named = [
        (OracleQuery::CyclicT1 { n: 4, q: 5, eps: sylbase::arith::Sign::Plus }, "28"),
        (OracleQuery::QuaternionI2 { q: 5 }, "11"),
        (OracleQuery::UnitaryT2 { n: 4, q: 3 }, "102"),
    ];
    let mut detail = vec![format!("{} configurations, {} disagreements", grid.len(), bad.len())];
    let mut named_ok = true;
    for (q, want) in named {
        let out = q.run(cap).expect("named oracle");
        let ok = out.closed_form == [want] && out.brute_force == [want] && grid.contains(&q);
        named_ok &= ok;
        detail.push(format!("{}: {} = {} (expected {want})", out.query, out.closed_form[0], out.brute_force[0]));
    }
    detail.extend(bad.iter().take(10).cloned());
    Outcome::new(bad.is_empty() && named_ok, detail)
}

fn cells(list: &[(Family, u64, i64)]) -> BTreeSet<Cell> {
    list.iter().map(|&(family, n, q)| Cell { family, n, q: int(q) }).collect()
}

fn show(set: &BTreeSet<Cell>) -> String {
    set.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ")
}

fn c4() -> Outcome {
    let grid = Grid::default();
    let reports = run_driver(Driver::Ex, &grid, JOBS).expect("ex sweep");
    let not_proved: BTreeSet<Cell> = final_sets(&reports)
        .into_iter()
        .filter(|(d, _)| *d != Disposition::Proved)
        .flat_map(|(_, v)| v)
        .collect();
    let want = cells(&[(Family::F4, 0, 3), (Family::G2, 0, 5), (Family::G2, 0, 3)]);
    let diff = compare_exceptions(Driver::Ex, &reports, expected_tables(), &grid);
    let detail = vec![
        format!("{} reports; not proved: {}", reports.len(), show(&not_proved)),
        format!("diff against expected table: {} cells", diff.cell_count()),
    ];
    Outcome::new(not_proved == want && diff.is_empty(), detail)
}

fn stage1(failures: &BTreeMap<(String, u32), Vec<Cell>>, case: &str) -> BTreeSet<Cell> {
    failures.get(&(case.to_string(), 1)).map(|v| v.iter().cloned().collect()).unwrap_or_default()
}

fn c5(all: &BTreeMap<Driver, Vec<CaseReport>>) -> Outcome {
    let grid = Grid::default();
    let mut detail = Vec::new();
    let mut ok = true;
    let mut check = |label: &str, cond: bool, what: String| {
        ok &= cond;
        detail.push(format!("{} {label}: {what}", if cond { "ok  " } else { "BAD " }));
    };

    let psl = &all[&Driver::Psl];
    let psl_fail = stage1(&stage_failures(psl), "psl/case4/n4");
    let mersenne = cells(&[(Family::Linear, 4, 3), (Family::Linear, 4, 7), (Family::Linear, 4, 31), (Family::Linear, 4, 127)]);
    let n4: Vec<&CaseReport> = psl.iter().filter(|r| r.case_id == "psl/case4/n4" && r.is_final()).collect();
    let delegated_ok = n4.iter().filter(|r| mersenne.contains(&r.cell())).all(|r| r.disposition == Disposition::Delegated);
    let beyond_ok = n4.iter().filter(|r| r.q > int(127)).all(|r| r.verdict == Verdict::Pass);
    let beyond = n4.iter().filter(|r| r.q > int(127)).count();
    check(
        "psl case4 n=4",
        psl_fail == mersenne && delegated_ok && beyond_ok && beyond > 0,
        format!("stage-1 failures {}; delegated {delegated_ok}; {beyond} cells with q > 127 pass", show(&psl_fail)),
    );

    let psp_fail: BTreeSet<Cell> = stage1(&stage_failures(&all[&Driver::Psp]), "psp/case1/large");
    check("psp stage 1 (large n)", psp_fail == cells(&[(Family::Symplectic, 10, 3)]), show(&psp_fail));

    let plus = &all[&Driver::OEvenPlus];
    let plus_fail = stage1(&stage_failures(plus), "o_even_plus/case2/m-even");
    let want = cells(&[(Family::OrthogonalPlus, 12, 3), (Family::OrthogonalPlus, 16, 3), (Family::OrthogonalPlus, 20, 3)]);
    check("o_even_plus case2 stage 1", plus_fail == want, show(&plus_fail));
    let sixteen: Vec<CaseReport> =
        plus.iter().filter(|r| r.n == 16 && r.q == int(3) && r.stage == 2).cloned().collect();
    let trace = to_json_lines(&sixteen).expect("jsonl");
    let refined = sixteen.len() == 1
        && sixteen[0].terms.len() == 4
        && sixteen[0].verdict == Verdict::Pass
        && trace.contains("\"2279214355760562960\"");
    check(
        "(16,3) refinement",
        refined,
        format!("{} terms, b3 traced verbatim: {}", sixteen.first().map_or(0, |r| r.terms.len()), trace.contains("2279214355760562960")),
    );

    let minus_fail = stage1(&stage_failures(&all[&Driver::OEvenMinus]), "o_even_minus/case2/m-odd");
    let want = cells(&[(Family::OrthogonalMinus, 10, 3), (Family::OrthogonalMinus, 14, 3), (Family::OrthogonalMinus, 18, 3)]);
    check("o_even_minus m-odd stage 1", minus_fail == want, show(&minus_fail));

    let mut seen = Vec::new();
    for (d, reports) in all {
        let diff = compare_exceptions(*d, reports, expected_tables(), &grid);
        for e in &diff.entries {
            seen.push((d.name().to_string(), e.to_string()));
        }
    }
    let known: Vec<(String, String)> = KNOWN_DIFFS.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
    detail.push(format!("diff against expected tables: {} entries across {} drivers", seen.len(), all.len()));
    for (d, line) in &seen {
        detail.push(format!("    [{d}] {line}"));
    }
    let diff_empty = seen.is_empty();
    let tolerated = ok && !diff_empty && seen == known;
    if tolerated {
        detail.push("the diff consists exactly of the documented L5(3) and U15(3) differences".into());
    }
    Outcome { pass: ok && diff_empty, tolerated, detail }
}

fn c6() -> Outcome {
    let mut detail = Vec::new();
    let mut ok = true;
    for (name, want) in [("pgl2_7", 3u8), ("aut_a6", 3), ("s8", 3), ("psp4_3.2", 2), ("pgl2_9", 2), ("m10", 2)] {
        let start = Instant::now();
        let entry = lookup_group(name).expect("catalog");
        let g = entry.build().expect("build");
        let h = sylow2(&g, SylowOptions { seed: SEED, ..SylowOptions::default() }).expect("sylow");
        let rep = base_size_two_or_three(&g, &h, 100_000).expect("base size");
        // Independent confirmation on the coset space.
        let act = coset_action(&g, &h, 100_000).expect("action");
        let hs = act.image_group(&h).expect("image");
        let h_order = h.order_u128() as usize;
        let regular = orbits_of(hs.degree(), hs.generators()).iter().any(|o| o.len() == h_order);
        let confirmed = if want == 2 {
            let gs = act.image_group(&g).expect("image");
            let fix = rep.witness.iter().try_fold(gs, |s, &p| s.stabilizer(p)).expect("stabilizer");
            regular && fix.order_u128() == 1 && rep.witness.len() == 2
        } else {
            !regular
        };
        let took = start.elapsed();
        let good = rep.base_size == want && entry.base_size == want && confirmed && took < Duration::from_secs(120);
        ok &= good;
        detail.push(format!(
            "{} {name}: b = {} (expected {want}), witness {:?}, degree {}, |H| = {}, confirmed {confirmed}, {took:.2?}",
            if good { "ok  " } else { "BAD " },
            rep.base_size,
            rep.witness,
            rep.degree,
            h_order
        ));
    }
    Outcome::new(ok, detail)
}

fn c7(all: &BTreeMap<Driver, Vec<CaseReport>>) -> Outcome {
    let mut detail = vec![
        "substituted: the claim for every q and every member of the certified list is not run at this scale".to_string(),
        "evidence: criteria 1-6 plus the monotone spot-check of a_j^2/b_j along the q ladder below".to_string(),
        format!("note: {GRID_NOTICE}"),
    ];
    let mut pairs = 0;
    let mut increases = Vec::new();
    for (d, reports) in all {
        let m = monotone_spot_check(reports);
        detail.push(format!("[{d}] {} pairs, {} increases", m.pairs_checked, m.increases.len()));
        pairs += m.pairs_checked;
        increases.extend(m.increases);
    }
    detail.extend(increases.iter().take(10).cloned());
    Outcome::new(pairs > 0 && increases.is_empty(), detail)
}

fn main() {
    let mut results = Vec::new();
    results.push(report(1, "lemma oracle suite", Duration::from_secs(10), c1));
    results.push(report(2, "Sylow order table against order catalog", Duration::from_secs(60), c2));
    results.push(report(3, "counting formulas against wreath enumeration", Duration::from_secs(120), c3));
    results.push(report(4, "exceptional driver final set", Duration::from_secs(30), c4));

    let start = Instant::now();
    let all: BTreeMap<Driver, Vec<CaseReport>> =
        Driver::ALL.iter().map(|&d| (d, run_driver(d, &Grid::default(), JOBS).expect("sweep"))).collect();
    let sweep = start.elapsed();
    results.push(report(5, "classical exception sets", Duration::from_secs(600).saturating_sub(sweep), || {
        let mut o = c5(&all);
        o.detail.insert(0, format!("full sweep with {JOBS} jobs: {sweep:.2?}"));
        o
    }));
    results.push(report(6, "permutation-engine base sizes", Duration::from_secs(6 * 120), c6));
    results.push(report(7, "full-scale claim substitution", Duration::from_secs(60), || c7(&all)));

    let passed = results.iter().filter(|(p, _)| *p).count();
    let tolerated = results.iter().filter(|(p, t)| !*p && *t).count();
    let failed = results.len() - passed - tolerated;
    println!("acceptance: {passed} PASS, {} FAIL ({tolerated} documented)", results.len() - passed);
    if failed > 0 {
        std::process::exit(1);
    }
}
