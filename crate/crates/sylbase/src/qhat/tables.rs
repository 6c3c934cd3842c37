//! Data tables for the sweeps: the certified list, `|Out|` parities and the exception sets
//! against which a sweep is compared.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::OnceLock;

use num_traits::ToPrimitive;
use serde::Serialize;

use super::{final_sets, stage_failures, CaseReport, Cell, Disposition, Driver, Grid};
use crate::arith::{exact_sqrt, is_small_prime, Integer};
use crate::error::{Error, Result};
use crate::orders::Family;

const A_LIST: &str = include_str!("../../data/qhat/a_list.txt");
const OUT_PARITY: &str = include_str!("../../data/qhat/out_parity.txt");
const EXPECTED: &str = include_str!("../../data/qhat/expected.txt");

fn perr<T>(offset: usize, message: impl Into<String>) -> Result<T> {
    Err(Error::Parse { offset, message: message.into() })
}

/// Non-comment lines with their byte offsets, after checking the `version = 1` header.
fn content_lines(text: &str) -> Result<Vec<(usize, &str)>> {
    let mut out = Vec::new();
    let mut offset = 0;
    for raw in text.split_inclusive('\n') {
        let line = raw.trim();
        if !line.is_empty() && !line.starts_with('#') {
            out.push((offset, line));
        }
        offset += raw.len();
    }
    match out.first() {
        Some((_, l)) if l.replace(' ', "") == "version=1" => Ok(out.split_off(1)),
        Some((o, _)) => perr(*o, "expected 'version = 1'"),
        None => perr(0, "empty table"),
    }
}

fn parse_q(tok: &str, offset: usize) -> Result<Integer> {
    match tok.parse::<Integer>() {
        Ok(q) if q >= Integer::from(3) => Ok(q),
        _ => perr(offset, format!("bad q '{tok}'")),
    }
}

/// Groups certified by direct computation.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AList {
    cells: BTreeSet<Cell>,
}

impl AList {
    pub fn contains(&self, cell: &Cell) -> bool {
        self.cells.contains(cell)
    }

    pub fn cells(&self) -> impl Iterator<Item = &Cell> {
        self.cells.iter()
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
}

pub fn parse_a_list(text: &str) -> Result<AList> {
    let mut cells = BTreeSet::new();
    for (offset, line) in content_lines(text)? {
        let Some((head, qs)) = line.split_once('=') else { return perr(offset, "expected 'family n = q ...'") };
        let mut head = head.split_whitespace();
        let (Some(fam), Some(n), None) = (head.next(), head.next(), head.next()) else {
            return perr(offset, "expected 'family n'");
        };
        let family = Family::from_key(fam).or_else(|_| perr(offset, format!("unknown family '{fam}'")))?;
        let n: u64 = n.parse().or_else(|_| perr(offset, format!("bad dimension '{n}'")))?;
        for tok in qs.split_whitespace() {
            if !cells.insert(Cell { family, n, q: parse_q(tok, offset)? }) {
                return perr(offset, format!("duplicate entry {fam} {n} {tok}"));
            }
        }
    }
    Ok(AList { cells })
}

pub fn a_list() -> &'static AList {
    static CELL: OnceLock<AList> = OnceLock::new();
    CELL.get_or_init(|| parse_a_list(A_LIST).expect("shipped list parses"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Selector {
    Exact(Integer),
    Prime,
    PrimeSquare,
}

impl Selector {
    fn matches(&self, q: &Integer) -> bool {
        let prime = |x: &Integer| x.to_u64().is_some_and(|v| v % 2 == 1 && is_small_prime(v));
        match self {
            Selector::Exact(v) => v == q,
            Selector::Prime => prime(q),
            Selector::PrimeSquare => exact_sqrt(q).is_some_and(|r| prime(&r)),
        }
    }
}

/// Parity of `|Out(G₀)|`, looked up by family and `q`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OutParity {
    rules: Vec<(Option<Family>, Selector, Parity)>,
}

impl OutParity {
    /// The first matching rule, or `None` when the table is silent.
    pub fn parity(&self, family: Family, q: &Integer) -> Option<Parity> {
        self.rules
            .iter()
            .find(|(f, s, _)| f.map_or(true, |f| f == family) && s.matches(q))
            .map(|(_, _, p)| *p)
    }
}

pub fn parse_out_parity(text: &str) -> Result<OutParity> {
    let mut rules = Vec::new();
    for (offset, line) in content_lines(text)? {
        let body = line.split_once('|').map_or(line, |(b, _)| b);
        let Some((head, parity)) = body.split_once('=') else { return perr(offset, "expected 'family q = parity'") };
        let mut head = head.split_whitespace();
        let (Some(fam), Some(sel), None) = (head.next(), head.next(), head.next()) else {
            return perr(offset, "expected 'family selector'");
        };
        let family = match fam {
            "*" => None,
            k => Some(Family::from_key(k).or_else(|_| perr(offset, format!("unknown family '{k}'")))?),
        };
        let selector = match sel {
            "prime" => Selector::Prime,
            "square" => Selector::PrimeSquare,
            v => Selector::Exact(parse_q(v, offset)?),
        };
        let parity = match parity.trim() {
            "even" => Parity::Even,
            "odd" => Parity::Odd,
            p => return perr(offset, format!("bad parity '{p}'")),
        };
        rules.push((family, selector, parity));
    }
    Ok(OutParity { rules })
}

pub fn out_parity() -> &'static OutParity {
    static CELL: OnceLock<OutParity> = OnceLock::new();
    CELL.get_or_init(|| parse_out_parity(OUT_PARITY).expect("shipped parity table parses"))
}

/// Exception sets expected of one driver.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ExpectedSection {
    /// `(case_id, stage)` to the cells whose bound fails there.
    pub fails: BTreeMap<(String, u32), BTreeSet<Cell>>,
    pub delegated: BTreeSet<Cell>,
    pub excluded: BTreeSet<Cell>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ExpectedTable {
    pub sections: BTreeMap<Driver, ExpectedSection>,
}

fn parse_cell(driver: Driver, tok: &str, offset: usize) -> Result<Cell> {
    fn bad<T>(tok: &str, offset: usize) -> Result<T> {
        perr(offset, format!("bad cell '{tok}'"))
    }
    let bad_cell = || bad::<Cell>(tok, offset);
    let Some((head, rest)) = tok.split_once('(') else { return bad_cell() };
    let Some(body) = rest.strip_suffix(')') else { return bad_cell() };
    if head.is_empty() {
        let Some((n, q)) = body.split_once(',') else { return bad_cell() };
        let family = match driver.families() {
            [f] if f.is_classical() => *f,
            _ => return bad_cell(),
        };
        let n: u64 = n.trim().parse().or_else(|_| bad(tok, offset))?;
        return Ok(Cell { family, n, q: parse_q(q.trim(), offset)? });
    }
    let family = Family::from_key(head).or_else(|_| bad(tok, offset))?;
    if !driver.families().contains(&family) || family.is_classical() {
        return bad_cell();
    }
    Ok(Cell { family, n: 0, q: parse_q(body, offset)? })
}

pub fn parse_expected(text: &str) -> Result<ExpectedTable> {
    let mut table = ExpectedTable::default();
    let mut current: Option<Driver> = None;
    for (offset, line) in content_lines(text)? {
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            let d: Driver = name.trim().parse().or_else(|_| perr(offset, format!("unknown driver '{name}'")))?;
            if table.sections.insert(d, ExpectedSection::default()).is_some() {
                return perr(offset, format!("duplicate section [{name}]"));
            }
            current = Some(d);
            continue;
        }
        let Some(d) = current else { return perr(offset, "line before any [driver] section") };
        let body = line.split_once('|').map_or(line, |(b, _)| b);
        let Some((key, cells)) = body.split_once('=') else { return perr(offset, "expected 'key = cells'") };
        let cells = cells
            .split_whitespace()
            .map(|t| parse_cell(d, t, offset))
            .collect::<Result<BTreeSet<_>>>()?;
        let section = table.sections.get_mut(&d).expect("section inserted above");
        let words: Vec<&str> = key.split_whitespace().collect();
        match words.as_slice() {
            ["delegated"] => section.delegated.extend(cells),
            ["excluded"] => section.excluded.extend(cells),
            ["fail", case, stage] => {
                let stage: u32 = stage.parse().or_else(|_| perr(offset, format!("bad stage '{stage}'")))?;
                section.fails.entry((case.to_string(), stage)).or_default().extend(cells);
            }
            _ => return perr(offset, format!("unknown key '{}'", key.trim())),
        }
    }
    Ok(table)
}

pub fn expected_tables() -> &'static ExpectedTable {
    static CELL: OnceLock<ExpectedTable> = OnceLock::new();
    CELL.get_or_init(|| parse_expected(EXPECTED).expect("shipped exception table parses"))
}

/// One exception set that differs between a sweep and the table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiffEntry {
    /// `fail <case> <stage>`, `delegated`, `excluded` or `open`.
    pub set: String,
    /// Expected but not produced by the sweep.
    pub missing: Vec<Cell>,
    /// Produced by the sweep but not expected.
    pub unexpected: Vec<Cell>,
}

impl fmt::Display for DiffEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[Cell]| v.iter().map(Cell::to_string).collect::<Vec<_>>().join(" ");
        write!(f, "{}: missing [{}] unexpected [{}]", self.set, join(&self.missing), join(&self.unexpected))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ExceptionDiff {
    pub entries: Vec<DiffEntry>,
}

impl ExceptionDiff {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Total number of cells on either side of every difference.
    pub fn cell_count(&self) -> usize {
        self.entries.iter().map(|e| e.missing.len() + e.unexpected.len()).sum()
    }
}

/// Compares a sweep against the expected exception sets, restricted to `grid`.
///
/// Fail sets ignore cells that were delegated before any bound was needed; the open set is
/// expected to be empty.
pub fn compare_exceptions(driver: Driver, reports: &[CaseReport], expected: &ExpectedTable, grid: &Grid) -> ExceptionDiff {
    let empty = ExpectedSection::default();
    let want = expected.sections.get(&driver).unwrap_or(&empty);
    let in_grid = |s: &BTreeSet<Cell>| s.iter().filter(|c| grid.contains(c)).cloned().collect::<BTreeSet<_>>();
    let mut pairs: Vec<(String, BTreeSet<Cell>, BTreeSet<Cell>)> = Vec::new();

    let got_fails = stage_failures(reports);
    let keys: BTreeSet<(String, u32)> = got_fails.keys().chain(want.fails.keys()).cloned().collect();
    for key in keys {
        let got = got_fails.get(&key).map(|v| v.iter().cloned().collect()).unwrap_or_default();
        let exp = want.fails.get(&key).map(in_grid).unwrap_or_default();
        pairs.push((format!("fail {} {}", key.0, key.1), exp, got));
    }
    let finals = final_sets(reports);
    let got = |d: Disposition| finals.get(&d).map(|v| v.iter().cloned().collect()).unwrap_or_default();
    let mut delegated: BTreeSet<Cell> = got(Disposition::Delegated);
    delegated.extend(got(Disposition::PreDelegated));
    pairs.push(("delegated".into(), in_grid(&want.delegated), delegated));
    pairs.push(("excluded".into(), in_grid(&want.excluded), got(Disposition::Excluded)));
    pairs.push(("open".into(), BTreeSet::new(), got(Disposition::Open)));

    let entries = pairs
        .into_iter()
        .filter(|(_, e, g)| e != g)
        .map(|(set, e, g)| DiffEntry {
            set,
            missing: e.difference(&g).cloned().collect(),
            unexpected: g.difference(&e).cloned().collect(),
        })
        .collect();
    ExceptionDiff { entries }
}
