//! The `Q̂` estimator and per-family verification drivers.
//!
//! A driver sweeps admissible `(n, q)`, builds the bound terms `(a_j, b_j)` for the case the
//! cell falls into and certifies `Σ a_j²/b_j < 1` with exact rationals. Cells that fail every
//! stage of their case are delegated to direct computation when the socle lies in the list of
//! certified groups, excluded when `|Out(G₀)|` is odd, and otherwise left open.
//!
//! Every sweep covers a finite grid only; the tails `q → ∞` are not proved here.

mod cases;
mod tables;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer as _;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{int, is_small_prime, pow2, Integer, Rational};
use crate::error::{domain, Error, Result};
use crate::orders::{Family, GroupId};

pub use tables::{
    a_list, compare_exceptions, expected_tables, out_parity, parse_a_list, parse_expected, parse_out_parity,
    AList, DiffEntry, ExceptionDiff, ExpectedTable, OutParity, Parity,
};

/// Disclaimer carried by every report header.
pub const GRID_NOTICE: &str =
    "finite grid only: the analytic tails (all q beyond the sweep bound) are not verified; see the monotone spot-check";

/// One `(a, b)` pair: at most `a` elements of `H` lie in classes of size at least `b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundTerm {
    pub a: Integer,
    pub b: Rational,
    pub a_src: String,
    pub b_src: String,
}

impl BoundTerm {
    pub fn new(a: Integer, b: Rational, a_src: impl Into<String>, b_src: impl Into<String>) -> Result<BoundTerm> {
        if a < Integer::zero() {
            return domain("bound term count must be non-negative");
        }
        if b < Rational::one() {
            return domain(format!("class-size bound {b} is below 1"));
        }
        Ok(BoundTerm { a, b, a_src: a_src.into(), b_src: b_src.into() })
    }

    /// `a²/b`.
    pub fn contribution(&self) -> Rational {
        Rational::from_integer(&self.a * &self.a) / &self.b
    }
}

/// `Σ a_j²/b_j`, exactly.
pub fn qhat_upper(terms: &[BoundTerm]) -> Result<Rational> {
    if terms.is_empty() {
        return domain("qhat needs at least one term");
    }
    Ok(terms.iter().map(BoundTerm::contribution).fold(Rational::zero(), |acc, x| acc + x))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    /// No bound was evaluated (delegated cell outside the range of the closed forms).
    Skipped,
}

/// What became of the cell after this stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Disposition {
    /// The bound is below 1.
    Proved,
    /// The bound failed and the next stage of the case was tried.
    Refined,
    /// Handed to the direct computation before any bound was needed.
    PreDelegated,
    /// Every stage failed and the socle is in the certified list.
    Delegated,
    /// Every stage failed and `|Out(G₀)|` is odd, so no almost simple `G` with `|G:G₀|` even exists.
    Excluded,
    /// Every stage failed with no way out.
    Open,
}

impl fmt::Display for Disposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Disposition::Proved => "proved",
            Disposition::Refined => "refined",
            Disposition::PreDelegated => "pre-delegated",
            Disposition::Delegated => "delegated",
            Disposition::Excluded => "excluded",
            Disposition::Open => "open",
        })
    }
}

/// Verdict record for one `(driver, case, n, q, stage)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseReport {
    pub driver: Driver,
    pub case_id: String,
    pub group: GroupId,
    pub n: u64,
    pub q: Integer,
    pub stage: u32,
    pub terms: Vec<BoundTerm>,
    /// `None` when no stage was evaluated.
    pub qhat_bound: Option<Rational>,
    pub verdict: Verdict,
    pub disposition: Disposition,
}

impl CaseReport {
    pub fn cell(&self) -> Cell {
        Cell { family: self.group.family, n: self.n, q: self.q.clone() }
    }

    fn sort_key(&self) -> (&str, u64, &Integer, u32) {
        (&self.case_id, self.n, &self.q, self.stage)
    }

    /// Whether this is the last report of its cell.
    pub fn is_final(&self) -> bool {
        self.disposition != Disposition::Refined
    }
}

/// A grid point: family, dimension (0 for exceptional groups) and `q`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    pub family: Family,
    pub n: u64,
    pub q: Integer,
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.family.is_classical() {
            write!(f, "({},{})", self.n, self.q)
        } else {
            write!(f, "{}({})", self.family.key(), self.q)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum QKind {
    Nine,
    Mersenne,
    Fermat,
}

/// `q = 9`, a Mersenne prime or a Fermat prime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdmissibleQ {
    pub value: Integer,
    pub kind: QKind,
}

/// Lucas–Lehmer: whether `2^p − 1` is prime, for an odd prime `p`.
pub fn lucas_lehmer(p: u64) -> bool {
    if p == 2 {
        return true;
    }
    let m = pow2(p) - 1;
    let mut s = int(4);
    for _ in 0..p - 2 {
        s = (&s * &s - 2) % &m;
    }
    s.is_zero()
}

/// Pépin: whether `2^{2^k} + 1` is prime, for `k ≥ 1`.
pub fn pepin(k: u32) -> bool {
    let f = pow2(1u64 << k) + 1;
    let e: Integer = (&f - 1) / 2;
    int(3).modpow(&e, &f) == &f - 1
}

/// `{9}` together with the Mersenne and Fermat primes up to `bound`, sorted.
pub fn admissible_q(bound: &Integer) -> Vec<AdmissibleQ> {
    let mut out = Vec::new();
    if *bound >= int(9) {
        out.push(AdmissibleQ { value: int(9), kind: QKind::Nine });
    }
    for p in 2u64.. {
        let m = pow2(p) - 1;
        if m > *bound {
            break;
        }
        if is_small_prime(p) && lucas_lehmer(p) {
            out.push(AdmissibleQ { value: m, kind: QKind::Mersenne });
        }
    }
    // F_0 = 3 is already listed as the Mersenne prime 2^2 - 1.
    for k in 1u32.. {
        let f = pow2(1u64 << k) + 1;
        if f > *bound {
            break;
        }
        if pepin(k) {
            out.push(AdmissibleQ { value: f, kind: QKind::Fermat });
        }
    }
    out.retain(|a| a.value >= int(3));
    out.sort_by(|a, b| a.value.cmp(&b.value));
    out
}

/// The seven sweeps, one per socle type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Driver {
    #[serde(rename = "ex")]
    Ex,
    #[serde(rename = "psl")]
    Psl,
    #[serde(rename = "psu")]
    Psu,
    #[serde(rename = "psp")]
    Psp,
    #[serde(rename = "o_odd")]
    OOdd,
    #[serde(rename = "o_even_plus")]
    OEvenPlus,
    #[serde(rename = "o_even_minus")]
    OEvenMinus,
}

impl Driver {
    pub const ALL: [Driver; 7] =
        [Driver::Ex, Driver::Psl, Driver::Psu, Driver::Psp, Driver::OOdd, Driver::OEvenPlus, Driver::OEvenMinus];

    pub fn name(self) -> &'static str {
        match self {
            Driver::Ex => "ex",
            Driver::Psl => "psl",
            Driver::Psu => "psu",
            Driver::Psp => "psp",
            Driver::OOdd => "o_odd",
            Driver::OEvenPlus => "o_even_plus",
            Driver::OEvenMinus => "o_even_minus",
        }
    }

    /// Families swept by the driver.
    pub fn families(self) -> &'static [Family] {
        use Family::*;
        match self {
            Driver::Ex => &[E8, E7, E6, TwistedE6, F4, ThreeD4, G2],
            Driver::Psl => &[Linear],
            Driver::Psu => &[Unitary],
            Driver::Psp => &[Symplectic],
            Driver::OOdd => &[OrthogonalOdd],
            Driver::OEvenPlus => &[OrthogonalPlus],
            Driver::OEvenMinus => &[OrthogonalMinus],
        }
    }

    /// Dimensions swept up to `n_max`.
    pub fn dimensions(self, n_max: u64) -> Vec<u64> {
        match self {
            Driver::Ex => vec![0],
            Driver::Psl | Driver::Psu => (4..=n_max).collect(),
            Driver::Psp => (4..=n_max).step_by(2).collect(),
            Driver::OOdd => (7..=n_max).step_by(2).collect(),
            Driver::OEvenPlus | Driver::OEvenMinus => (8..=n_max).step_by(2).collect(),
        }
    }
}

impl fmt::Display for Driver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Driver {
    type Err = Error;

    fn from_str(s: &str) -> Result<Driver> {
        Driver::ALL
            .into_iter()
            .find(|d| d.name() == s)
            .ok_or_else(|| Error::Usage(format!("unknown driver '{s}'")))
    }
}

/// Sweep bounds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grid {
    pub n_max: u64,
    pub q_max: Integer,
}

impl Default for Grid {
    fn default() -> Self {
        Grid { n_max: 40, q_max: int(2_147_483_647) }
    }
}

impl Grid {
    pub fn contains(&self, cell: &Cell) -> bool {
        cell.n <= self.n_max && cell.q <= self.q_max && cell.q >= int(3)
    }

    pub fn qs(&self) -> Vec<Integer> {
        admissible_q(&self.q_max).into_iter().map(|a| a.value).collect()
    }
}

fn evaluate_cell(driver: Driver, group: GroupId, n: u64, q: &Integer) -> Result<Vec<CaseReport>> {
    let Some(plan) = cases::plan(driver, group, n, q)? else {
        return Ok(Vec::new());
    };
    let in_a = a_list().contains(&Cell { family: group.family, n, q: q.clone() });
    let pre = plan.pre_delegated && in_a;
    let report = |stage: u32, terms, qhat_bound, verdict, disposition| CaseReport {
        driver,
        case_id: plan.case_id.clone(),
        group,
        n,
        q: q.clone(),
        stage,
        terms,
        qhat_bound,
        verdict,
        disposition,
    };
    if plan.stages.is_empty() {
        let disposition = if pre { Disposition::PreDelegated } else { Disposition::Open };
        return Ok(vec![report(0, Vec::new(), None, Verdict::Skipped, disposition)]);
    }
    let mut out = Vec::new();
    let total = plan.stages.len();
    for (i, terms) in plan.stages.iter().enumerate() {
        let qhat_bound = qhat_upper(terms)?;
        let verdict = if qhat_bound < Rational::one() { Verdict::Pass } else { Verdict::Fail };
        let disposition = if pre {
            Disposition::PreDelegated
        } else if verdict == Verdict::Pass {
            Disposition::Proved
        } else if i + 1 < total {
            Disposition::Refined
        } else if out_parity().parity(group.family, q) == Some(Parity::Odd) {
            Disposition::Excluded
        } else if in_a {
            Disposition::Delegated
        } else {
            Disposition::Open
        };
        out.push(report(i as u32 + 1, terms.clone(), Some(qhat_bound), verdict, disposition));
        if disposition != Disposition::Refined {
            break;
        }
    }
    Ok(out)
}

/// Runs one driver over the grid with `jobs` worker threads.
///
/// The output is sorted by `(case_id, n, q, stage)` and does not depend on `jobs`.
pub fn run_driver(driver: Driver, grid: &Grid, jobs: usize) -> Result<Vec<CaseReport>> {
    let qs = grid.qs();
    let mut cells = Vec::new();
    for &family in driver.families() {
        for n in driver.dimensions(grid.n_max) {
            let group = if family.is_classical() { GroupId::simple(family, n)? } else { GroupId::exceptional(family)? };
            for q in &qs {
                cells.push((group, n, q.clone()));
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Resource(format!("thread pool: {e}")))?;
    let chunks: Vec<Vec<CaseReport>> = pool.install(|| {
        cells
            .par_iter()
            .map(|(g, n, q)| evaluate_cell(driver, *g, *n, q))
            .collect::<Result<Vec<_>>>()
    })?;
    let mut reports: Vec<CaseReport> = chunks.into_iter().flatten().collect();
    reports.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    Ok(reports)
}

/// Final cells grouped by disposition.
pub fn final_sets(reports: &[CaseReport]) -> BTreeMap<Disposition, Vec<Cell>> {
    let mut out: BTreeMap<Disposition, Vec<Cell>> = BTreeMap::new();
    for r in reports.iter().filter(|r| r.is_final()) {
        out.entry(r.disposition).or_default().push(r.cell());
    }
    for v in out.values_mut() {
        v.sort();
        v.dedup();
    }
    out
}

/// Cells whose bound fails at `stage` of `case_id`, ignoring cells delegated up front.
pub fn stage_failures(reports: &[CaseReport]) -> BTreeMap<(String, u32), Vec<Cell>> {
    let mut out: BTreeMap<(String, u32), Vec<Cell>> = BTreeMap::new();
    for r in reports {
        if r.verdict == Verdict::Fail && r.disposition != Disposition::PreDelegated {
            out.entry((r.case_id.clone(), r.stage)).or_default().push(r.cell());
        }
    }
    for v in out.values_mut() {
        v.sort();
    }
    out
}

/// Heuristic check that each `a_j²/b_j` decreases along the `q` ladder past the last exception.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MonotoneReport {
    pub pairs_checked: usize,
    /// `case_id n=.. term j: q -> q'` for every increase.
    pub increases: Vec<String>,
}

pub fn monotone_spot_check(reports: &[CaseReport]) -> MonotoneReport {
    let mut by_case: BTreeMap<&str, Vec<&CaseReport>> = BTreeMap::new();
    for r in reports.iter().filter(|r| r.stage == 1) {
        by_case.entry(&r.case_id).or_default().push(r);
    }
    let mut pairs_checked = 0;
    let mut increases = Vec::new();
    for (case, rows) in by_case {
        let last_exception = rows
            .iter()
            .filter(|r| r.verdict == Verdict::Fail || r.disposition != Disposition::Proved)
            .map(|r| r.q.clone())
            .max();
        // Ladders follow one residue class of q mod 4; q = 9 carries an extra field automorphism.
        let mut by_n: BTreeMap<(u64, bool), Vec<&CaseReport>> = BTreeMap::new();
        for r in rows {
            if r.q != int(9) && last_exception.as_ref().map_or(true, |e| r.q > *e) {
                by_n.entry((r.n, r.q.is_odd() && (&r.q % 4u32) == int(1))).or_default().push(r);
            }
        }
        for ((n, _), mut ladder) in by_n {
            ladder.sort_by(|a, b| a.q.cmp(&b.q));
            for w in ladder.windows(2) {
                if w[0].terms.len() != w[1].terms.len() {
                    continue;
                }
                for (j, (s, t)) in w[0].terms.iter().zip(&w[1].terms).enumerate() {
                    pairs_checked += 1;
                    if t.contribution().cmp(&s.contribution()) == Ordering::Greater {
                        increases.push(format!("{case} n={n} term {}: q {} -> {}", j + 1, w[0].q, w[1].q));
                    }
                }
            }
        }
    }
    MonotoneReport { pairs_checked, increases }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TermRecord {
    pub a: String,
    pub b: String,
    pub a_src: String,
    pub b_src: String,
}

/// Flat form of a [`CaseReport`] used for JSON lines.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReportRecord {
    pub driver: String,
    pub case_id: String,
    pub family: String,
    pub n: u64,
    pub q: String,
    pub stage: u32,
    pub terms: Vec<TermRecord>,
    pub qhat_num: Option<String>,
    pub qhat_den: Option<String>,
    pub verdict: Verdict,
    pub disposition: Disposition,
}

impl From<&CaseReport> for ReportRecord {
    fn from(r: &CaseReport) -> Self {
        ReportRecord {
            driver: r.driver.name().to_string(),
            case_id: r.case_id.clone(),
            family: r.group.family.key().to_string(),
            n: r.n,
            q: r.q.to_string(),
            stage: r.stage,
            terms: r
                .terms
                .iter()
                .map(|t| TermRecord { a: t.a.to_string(), b: t.b.to_string(), a_src: t.a_src.clone(), b_src: t.b_src.clone() })
                .collect(),
            qhat_num: r.qhat_bound.as_ref().map(|v| v.numer().to_string()),
            qhat_den: r.qhat_bound.as_ref().map(|v| v.denom().to_string()),
            verdict: r.verdict,
            disposition: r.disposition,
        }
    }
}

/// One JSON object per line.
pub fn to_json_lines(reports: &[CaseReport]) -> Result<String> {
    let mut out = String::new();
    for r in reports {
        let line = serde_json::to_string(&ReportRecord::from(r)).map_err(|e| Error::Resource(e.to_string()))?;
        out.push_str(&line);
        out.push('\n');
    }
    Ok(out)
}

/// CSV projection: one row per report, term details collapsed into a count.
pub fn to_csv(reports: &[CaseReport]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Resource(e.to_string());
    w.write_record(["driver", "case_id", "family", "n", "q", "stage", "terms", "qhat_num", "qhat_den", "verdict", "disposition"])
        .map_err(io)?;
    for r in reports {
        let rec = ReportRecord::from(r);
        let disposition = serde_json::to_value(rec.disposition).map_err(|e| Error::Resource(e.to_string()))?;
        let verdict = serde_json::to_value(rec.verdict).map_err(|e| Error::Resource(e.to_string()))?;
        w.write_record([
            rec.driver,
            rec.case_id,
            rec.family,
            rec.n.to_string(),
            rec.q,
            rec.stage.to_string(),
            rec.terms.len().to_string(),
            rec.qhat_num.unwrap_or_default(),
            rec.qhat_den.unwrap_or_default(),
            verdict.as_str().unwrap_or_default().to_string(),
            disposition.as_str().unwrap_or_default().to_string(),
        ])
        .map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Resource(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Resource(e.to_string()))
}
