//! The `sylbase` command-line tool.
//!
//! [`run`] parses arguments, dispatches to a subcommand and returns the process exit code:
//! 0 on agreement, 1 on a mismatch with the expected tables, 2 on a usage error and 3 when
//! a size threshold is exceeded.

pub mod config;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use sylbase::arith::{int, lemma_oracle_grid, Integer};
use sylbase::orders::Family;
use sylbase::permgrp::{base_size_two_or_three, group_catalog, lookup_group, sylow2, OracleQuery, SylowOptions};
use sylbase::qhat::{
    compare_exceptions, expected_tables, final_sets, monotone_spot_check, run_driver, stage_failures, to_csv,
    to_json_lines, Disposition, Driver, Grid, GRID_NOTICE,
};
use sylbase::sylow::master_consistency;
use sylbase::{Error, Result};

use config::{read_config, Format, Overrides, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

/// Lemma grid sizes: `d ≤ 20` for the power check, `m ≤ 10⁴` for the factorial check.
const LEMMA_D_MAX: u64 = 20;
const LEMMA_M_MAX: u64 = 10_000;
const LEMMA_Q_DEFAULT: u64 = 1000;
const TABLE_N_DEFAULT: u64 = 30;
const TABLE_QS: [u64; 8] = [3, 5, 7, 9, 17, 31, 127, 257];

#[derive(Debug, Parser)]
#[command(name = "sylbase", version, about = "Exact checks of base-size bounds for Sylow 2-subgroups")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// `key = value` file; command-line flags take precedence over it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    n_max: Option<u64>,
    #[arg(long, alias = "qmax", global = true, value_parser = clap::value_parser!(u64).range(1..))]
    q_max: Option<u64>,
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    jobs: Option<u64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// text, jsonl or csv.
    #[arg(long, global = true)]
    format: Option<String>,
    /// Report destination; a directory for `verify --format csv`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Largest wreath model enumerated by oracle-count.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    enum_cap: Option<u64>,
    /// Largest coset space built by permcheck.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    index_cap: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the 2-adic lemmas against direct computation.
    Lemmas {
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
    /// Compare the Sylow 2-subgroup order table with the group order catalog.
    SylowTable {
        /// Comma-separated family keys, e.g. linear,orthogonal-plus,E6.
        #[arg(long, value_delimiter = ',')]
        families: Vec<String>,
        /// Dimension range such as 8..16 (inclusive) or a single value.
        #[arg(long = "n")]
        n: Option<String>,
    },
    /// Run the per-family sweeps and compare them with the expected exception tables.
    Verify {
        /// Driver name; repeat for several. All drivers when absent.
        #[arg(long = "driver")]
        drivers: Vec<String>,
    },
    /// Compute the base size of a catalog group on the cosets of a Sylow 2-subgroup.
    Permcheck {
        /// Catalog name; lists the catalog when absent.
        name: Option<String>,
    },
    /// Compare a closed-form involution count with a wreath-model enumeration.
    OracleCount {
        /// Model spec, e.g. "gl1-wr n=4 q=5 t1".
        #[arg(required = true, num_args = 1..)]
        spec: Vec<String>,
    },
}

/// What a command produced: human-readable lines, machine records, and an exit code.
struct Outcome {
    lines: Vec<String>,
    /// `(name, body)` pairs in the requested machine format.
    records: Vec<(String, String)>,
    code: i32,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Usage(_) | Error::Catalog(_) | Error::Domain(_) | Error::Parse { .. } => EXIT_USAGE,
        Error::Resource(_) => EXIT_RESOURCE,
        Error::Consistency(_) | Error::SearchFailed(_) => EXIT_MISMATCH,
    }
}

fn flags_of(g: &GlobalArgs) -> Result<Overrides> {
    Ok(Overrides {
        n_max: g.n_max,
        q_max: g.q_max,
        jobs: g.jobs.map(|j| j as usize),
        seed: g.seed,
        enum_cap: g.enum_cap.map(u128::from),
        index_cap: g.index_cap.map(u128::from),
        format: g.format.as_deref().map(str::parse).transpose()?,
        out: g.out.clone(),
    })
}

/// Runs the tool on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(stdout, "{text}");
                EXIT_OK
            };
        }
    };
    match execute(&cli).and_then(|(cfg, outcome)| emit(&cfg, &outcome, stdout, stderr).map(|_| outcome.code)) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "sylbase: {e}");
            exit_code(&e)
        }
    }
}

fn execute(cli: &Cli) -> Result<(RunConfig, Outcome)> {
    let file = match &cli.global.config {
        Some(path) => read_config(path)?,
        None => Overrides::default(),
    };
    let cfg = RunConfig::resolve(&file, &flags_of(&cli.global)?);
    let outcome = match &cli.command {
        Command::Lemmas { inject_fault } => cmd_lemmas(&cfg, *inject_fault)?,
        Command::SylowTable { families, n } => cmd_sylow_table(&cfg, families, n.as_deref())?,
        Command::Verify { drivers } => cmd_verify(&cfg, drivers)?,
        Command::Permcheck { name } => cmd_permcheck(&cfg, name.as_deref())?,
        Command::OracleCount { spec } => cmd_oracle_count(&cfg, &spec.join(" "))?,
    };
    Ok((cfg, outcome))
}

fn io_err(e: std::io::Error) -> Error {
    Error::Usage(format!("output: {e}"))
}

/// Text goes to `--out` or stdout. Machine formats go there instead, with the text on stderr.
fn emit(cfg: &RunConfig, outcome: &Outcome, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let text: String = outcome.lines.iter().map(|l| format!("{l}\n")).collect();
    let (body, side) = match cfg.format {
        Format::Text => (vec![(String::from("report"), text)], None),
        _ => (outcome.records.clone(), Some(text)),
    };
    if let Some(side) = side {
        stderr.write_all(side.as_bytes()).map_err(io_err)?;
    }
    match &cfg.out {
        None => {
            for (_, b) in &body {
                stdout.write_all(b.as_bytes()).map_err(io_err)?;
            }
        }
        Some(dir) if cfg.format == Format::Csv && body.len() > 1 => {
            std::fs::create_dir_all(dir).map_err(io_err)?;
            for (name, b) in &body {
                std::fs::write(dir.join(format!("{name}.csv")), b).map_err(io_err)?;
            }
        }
        Some(path) => {
            let all: String = body.iter().map(|(_, b)| b.as_str()).collect();
            std::fs::write(path, all).map_err(io_err)?;
        }
    }
    Ok(())
}

fn csv_text(header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let wrap = |e: csv::Error| Error::Usage(format!("csv: {e}"));
    w.write_record(header).map_err(wrap)?;
    for r in rows {
        w.write_record(r).map_err(wrap)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Usage(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Usage(format!("csv: {e}")))
}

fn json_line(v: &serde_json::Value) -> Result<String> {
    Ok(format!("{v}\n"))
}

fn json_err(e: serde_json::Error) -> Error {
    Error::Usage(format!("json: {e}"))
}

fn cmd_lemmas(cfg: &RunConfig, fault: bool) -> Result<Outcome> {
    let q_max = cfg.q_max.unwrap_or(LEMMA_Q_DEFAULT);
    let r = lemma_oracle_grid(q_max, LEMMA_D_MAX, LEMMA_M_MAX, fault)?;
    let mut lines = Vec::new();
    let scope = format!(
        "{} cells (odd prime powers q <= {q_max}, d <= {}, both signs); factorial check m <= {}",
        r.power_cells, r.d_max, r.m_max
    );
    if r.passed() {
        lines.push(format!("lemmas ok: {scope}"));
    } else {
        lines.push(format!(
            "lemmas MISMATCH: {} power cells and {} factorial values disagree over {scope}",
            r.power_mismatches.len(),
            r.factorial_failures.len()
        ));
        lines.extend(r.power_mismatches.iter().take(10).map(|m| format!("  counterexample {m}")));
        lines.extend(r.factorial_failures.iter().take(10).map(|m| format!("  factorial check fails at m = {m}")));
    }
    let records = match cfg.format {
        Format::Csv => csv_text(
            &["q_max", "d_max", "m_max", "power_cells", "power_mismatches", "factorial_failures"],
            &[vec![
                q_max.to_string(),
                r.d_max.to_string(),
                r.m_max.to_string(),
                r.power_cells.to_string(),
                r.power_mismatches.len().to_string(),
                r.factorial_failures.len().to_string(),
            ]],
        )?,
        _ => json_line(&serde_json::to_value(&r).map_err(json_err)?)?,
    };
    let code = if r.passed() { EXIT_OK } else { EXIT_MISMATCH };
    Ok(Outcome { lines, records: vec![("lemmas".into(), records)], code })
}

/// `8..16`, `8..=16` or `8`, all inclusive.
fn parse_range(text: &str) -> Result<std::ops::RangeInclusive<u64>> {
    let bad = || Error::Usage(format!("bad dimension range '{text}'"));
    let num = |s: &str| s.trim().parse::<u64>().map_err(|_| bad());
    let (lo, hi) = match text.split_once("..") {
        Some((a, b)) => (num(a)?, num(b.trim_start_matches('='))?),
        None => (num(text)?, num(text)?),
    };
    if lo > hi {
        return Err(bad());
    }
    Ok(lo..=hi)
}

fn cmd_sylow_table(cfg: &RunConfig, families: &[String], n: Option<&str>) -> Result<Outcome> {
    let fams: Vec<Family> = if families.is_empty() {
        Family::ALL.to_vec()
    } else {
        families.iter().map(|f| Family::from_key(f.trim())).collect::<Result<_>>()?
    };
    let range = match n {
        Some(t) => parse_range(t)?,
        None => 2..=cfg.n_max.unwrap_or(TABLE_N_DEFAULT),
    };
    let q_cap = cfg.q_max.unwrap_or(u64::MAX);
    let qs: Vec<Integer> = TABLE_QS.iter().filter(|&&q| q <= q_cap).map(|&q| Integer::from(q)).collect();
    if qs.is_empty() {
        return Err(Error::Usage(format!("no table q at or below {q_cap}")));
    }
    let rows = master_consistency(&fams, range.clone(), &qs)?;
    let bad: Vec<_> = rows.iter().filter(|r| !r.agrees()).collect();
    let mut lines = vec![format!(
        "sylow-table: {} rows over {} families, n in {}..={}, q in {:?}: {} mismatches",
        rows.len(),
        fams.len(),
        range.start(),
        range.end(),
        TABLE_QS.iter().filter(|&&q| q <= q_cap).collect::<Vec<_>>(),
        bad.len()
    )];
    for r in &bad {
        lines.push(format!("  MISMATCH {}({}): table {} vs order 2-part {}", r.group, r.q, r.table, r.catalog));
    }
    if let Some(r) = rows.iter().find(|r| r.group.family == Family::Symplectic && r.group.n == 4 && r.q == int(3)) {
        lines.push(format!("  detail {}({}): |H0| = {}", r.group, r.q, r.table));
    }
    let records = match cfg.format {
        Format::Csv => {
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.group.to_string(),
                        r.group.family.key().to_string(),
                        r.group.n.to_string(),
                        r.q.to_string(),
                        r.table.to_string(),
                        r.catalog.to_string(),
                        r.agrees().to_string(),
                    ]
                })
                .collect();
            csv_text(&["group", "family", "n", "q", "table", "catalog", "agrees"], &body)?
        }
        _ => rows
            .iter()
            .map(|r| {
                json_line(&json!({
                    "group": r.group.to_string(),
                    "family": r.group.family.key(),
                    "n": r.group.n,
                    "q": r.q.to_string(),
                    "table": r.table.to_string(),
                    "catalog": r.catalog.to_string(),
                    "agrees": r.agrees(),
                }))
            })
            .collect::<Result<String>>()?,
    };
    let code = if bad.is_empty() { EXIT_OK } else { EXIT_MISMATCH };
    Ok(Outcome { lines, records: vec![("sylow-table".into(), records)], code })
}

fn cell_list<T: std::fmt::Display>(cells: &[T]) -> String {
    cells.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ")
}

fn cmd_verify(cfg: &RunConfig, names: &[String]) -> Result<Outcome> {
    let mut drivers: Vec<Driver> = Vec::new();
    for name in names {
        let d: Driver = name.parse()?;
        if !drivers.contains(&d) {
            drivers.push(d);
        }
    }
    if drivers.is_empty() {
        drivers = Driver::ALL.to_vec();
    }
    let grid = Grid {
        n_max: cfg.n_max.unwrap_or(Grid::default().n_max),
        q_max: cfg.q_max.map(Integer::from).unwrap_or_else(|| Grid::default().q_max),
    };
    let mut lines = vec![format!("verify: n <= {}, q <= {}, {} jobs", grid.n_max, grid.q_max, cfg.jobs)];
    let mut records = Vec::new();
    let mut differing = 0;
    for &d in &drivers {
        let reports = run_driver(d, &grid, cfg.jobs)?;
        let diff = compare_exceptions(d, &reports, expected_tables(), &grid);
        let finals = final_sets(&reports);
        let cells: usize = finals.values().map(Vec::len).sum();
        lines.push(format!("[{d}] {} reports over {cells} cells", reports.len()));
        for (disp, cs) in finals.iter().filter(|(k, _)| **k != Disposition::Proved) {
            lines.push(format!("  {disp}: {}", cell_list(cs)));
        }
        for ((case, stage), cs) in stage_failures(&reports) {
            lines.push(format!("  stage {stage} fails in {case}: {}", cell_list(&cs)));
        }
        let mono = monotone_spot_check(&reports);
        lines.push(format!("  monotone spot-check: {} pairs, {} increases", mono.pairs_checked, mono.increases.len()));
        lines.extend(mono.increases.iter().map(|i| format!("    increase {i}")));
        if diff.is_empty() {
            lines.push("  diff against expected tables: empty".into());
        } else {
            differing += 1;
            lines.push(format!("  diff against expected tables: {} cells", diff.cell_count()));
            lines.extend(diff.entries.iter().map(|e| format!("    {e}")));
        }
        let body = match cfg.format {
            Format::Csv => to_csv(&reports)?,
            _ => to_json_lines(&reports)?,
        };
        records.push((d.name().to_string(), body));
    }
    lines.push(format!("note: {GRID_NOTICE}"));
    lines.push(format!("verify: {} of {} drivers match the expected tables", drivers.len() - differing, drivers.len()));
    let code = if differing == 0 { EXIT_OK } else { EXIT_MISMATCH };
    Ok(Outcome { lines, records, code })
}

fn cmd_permcheck(cfg: &RunConfig, name: Option<&str>) -> Result<Outcome> {
    let Some(name) = name else {
        let lines = group_catalog()
            .iter()
            .map(|e| format!("{:<10} b = {}  {}", e.name, e.base_size, e.description))
            .collect();
        let rows: Vec<Vec<String>> =
            group_catalog().iter().map(|e| vec![e.name.clone(), e.base_size.to_string(), e.description.clone()]).collect();
        let records = match cfg.format {
            Format::Csv => csv_text(&["name", "base_size", "description"], &rows)?,
            _ => rows
                .iter()
                .map(|r| json_line(&json!({"name": r[0], "base_size": r[1], "description": r[2]})))
                .collect::<Result<String>>()?,
        };
        return Ok(Outcome { lines, records: vec![("catalog".into(), records)], code: EXIT_OK });
    };
    let entry = lookup_group(name).map_err(|e| Error::Usage(e.to_string()))?;
    let g = entry.build()?;
    let h = sylow2(&g, SylowOptions { seed: cfg.seed, ..SylowOptions::default() })?;
    let rep = base_size_two_or_three(&g, &h, cfg.index_cap)?;
    let ok = rep.base_size == entry.base_size;
    let lines = vec![format!(
        "permcheck {name}: |G| = {}, |H| = {}, degree {}, b(G,H) = {} with base {:?} (expected {}): {}",
        entry.order,
        rep.sylow_order,
        rep.degree,
        rep.base_size,
        rep.witness,
        entry.base_size,
        if ok { "ok" } else { "MISMATCH" }
    )];
    let records = match cfg.format {
        Format::Csv => csv_text(
            &["name", "order", "sylow_order", "degree", "base_size", "expected", "witness"],
            &[vec![
                name.to_string(),
                entry.order.to_string(),
                rep.sylow_order.to_string(),
                rep.degree.to_string(),
                rep.base_size.to_string(),
                entry.base_size.to_string(),
                cell_list(&rep.witness),
            ]],
        )?,
        _ => json_line(&json!({
            "name": name,
            "order": entry.order.to_string(),
            "report": rep,
            "expected": entry.base_size,
            "agrees": ok,
        }))?,
    };
    Ok(Outcome { lines, records: vec![(name.into(), records)], code: if ok { EXIT_OK } else { EXIT_MISMATCH } })
}

fn cmd_oracle_count(cfg: &RunConfig, spec: &str) -> Result<Outcome> {
    let query: OracleQuery = spec.parse()?;
    let out = query.run(cfg.enum_cap)?;
    let ok = out.agrees();
    let lines = vec![format!(
        "{}: closed form {} vs enumeration {} over {} ({} elements): {}",
        out.query,
        out.closed_form.join(","),
        out.brute_force.join(","),
        out.model,
        out.model_size,
        if ok { "agree" } else { "DISAGREE" }
    )];
    let records = match cfg.format {
        Format::Csv => csv_text(
            &["query", "model", "model_size", "closed_form", "brute_force", "agrees"],
            &[vec![
                out.query.clone(),
                out.model.clone(),
                out.model_size.to_string(),
                out.closed_form.join(" "),
                out.brute_force.join(" "),
                ok.to_string(),
            ]],
        )?,
        _ => json_line(&serde_json::to_value(&out).map_err(json_err)?)?,
    };
    Ok(Outcome { lines, records: vec![("oracle-count".into(), records)], code: if ok { EXIT_OK } else { EXIT_MISMATCH } })
}
