use sylbase::permgrp::{oracle_grid, OracleQuery};

#[test]
fn closed_forms_match_wreath_enumeration() {
    let grid = oracle_grid(&[3, 5, 7, 9], 1_000_000).unwrap();
    assert!(grid.len() > 60);
    let mut failures = Vec::new();
    for query in &grid {
        let out = query.run(1_000_000).unwrap();
        if !out.agrees() {
            failures.push(format!("{}: {:?} vs {:?}", out.query, out.closed_form, out.brute_force));
        }
    }
    assert!(failures.is_empty(), "{failures:#?}");
}

#[test]
fn grid_covers_every_query_shape() {
    let grid = oracle_grid(&[5], 1_000_000).unwrap();
    let has = |f: fn(&OracleQuery) -> bool| grid.iter().any(f);
    assert!(has(|q| matches!(q, OracleQuery::CyclicT1 { .. })));
    assert!(has(|q| matches!(q, OracleQuery::UnitaryT2 { .. })));
    assert!(has(|q| matches!(q, OracleQuery::Rank2T1 { plus_point: true, .. })));
    assert!(has(|q| matches!(q, OracleQuery::Orthogonal { k: 2, .. })));
    assert!(has(|q| matches!(q, OracleQuery::Psp4Lifts { .. })));
    assert!(has(|q| matches!(q, OracleQuery::SymplecticT1 { m: 2, .. })));
}
