//! Batch front-end: scenario generation, monitor runs, oracle cross-checks,
//! fuzzing and exports.
//!
//! Every command writes its report to the given writer and returns a
//! [`Status`]; errors are usage or input problems (exit status 2).

mod dot;
mod table;

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};

use pastctl::events::{self, EventId, EventStructure, ScenarioConfig};
use pastctl::formula::{expand, parse, CoreFormula};
use pastctl::fuzz::{fuzz, FuzzParams};
use pastctl::logic6::TruthValue6;
use pastctl::monitor::{compile, run, Mode, Verdicts};
use pastctl::oracle::{declarative_divergences, eval2, eval6};

pub use dot::export_dot;
pub use table::{write_csv, Row, RunReport};

/// Named formulas for the standard backup/functional scenario.
pub const PRESETS: [(&str, &str); 3] = [
    ("backup-made", "EP b"),
    ("always-functional", "AH f"),
    ("backup-since-functional", "(EP b) S (AH f)"),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    CheckFailed,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::CheckFailed => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// Resolves a preset name or parses formula text.
pub fn formula(text: &str) -> Result<(String, CoreFormula)> {
    let source = PRESETS
        .iter()
        .find(|(name, _)| *name == text)
        .map_or(text, |(_, f)| *f);
    let parsed = parse(source).with_context(|| format!("cannot parse formula `{source}`"))?;
    Ok((source.to_string(), expand(&parsed)))
}

pub fn load_structure(path: &Path) -> Result<EventStructure> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let e: EventStructure = serde_json::from_str(&text)
        .with_context(|| format!("{} is not an event structure", path.display()))?;
    if let Err(errors) = e.validate() {
        let list: Vec<String> = errors.iter().map(ToString::to_string).collect();
        bail!("{} is invalid:\n  {}", path.display(), list.join("\n  "));
    }
    Ok(e)
}

pub fn load_config(path: &Path) -> Result<ScenarioConfig> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let cfg: ScenarioConfig = serde_json::from_str(&text)
        .with_context(|| format!("{} is not a scenario config", path.display()))?;
    cfg.validate()
        .with_context(|| format!("bad config {}", path.display()))?;
    Ok(cfg)
}

fn write_structure(e: &EventStructure, out: Option<&Path>, stdout: &mut dyn Write) -> Result<()> {
    let mut json = serde_json::to_string_pretty(e)?;
    json.push('\n');
    match out {
        Some(path) => {
            fs::write(path, json).with_context(|| format!("cannot write {}", path.display()))
        }
        None => Ok(stdout.write_all(json.as_bytes())?),
    }
}

pub fn cmd_scenario(
    config: &Path,
    seed: u64,
    out: Option<&Path>,
    stdout: &mut dyn Write,
) -> Result<Status> {
    let cfg = load_config(config)?;
    let e = events::generate(&cfg, seed)?;
    write_structure(&e, out, stdout)?;
    Ok(Status::Ok)
}

pub fn cmd_extend(
    base: &Path,
    config: &Path,
    seed: u64,
    rounds: u32,
    out: Option<&Path>,
    stdout: &mut dyn Write,
) -> Result<Status> {
    if rounds == 0 {
        bail!("--rounds must be at least 1");
    }
    let e = load_structure(base)?;
    let cfg = load_config(config)?;
    let extended = events::extend(&e, &cfg, seed, rounds)?;
    write_structure(&extended, out, stdout)?;
    Ok(Status::Ok)
}

pub struct RunArgs<'a> {
    pub formula: &'a str,
    pub events: &'a Path,
    pub mode: Mode,
    pub format: Format,
    pub out: Option<&'a Path>,
    pub dot: Option<&'a Path>,
}

pub fn cmd_run(args: &RunArgs<'_>, stdout: &mut dyn Write) -> Result<Status> {
    let (text, f) = formula(args.formula)?;
    let e = load_structure(args.events)?;
    let verdicts = run(&compile(&f, args.mode), &e)?;
    let report = RunReport::new(&text, &e, &verdicts)?;

    let mut body = Vec::new();
    match args.format {
        Format::Csv => write_csv(&report.verdicts, &mut body)?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut body, &report)?;
            body.push(b'\n');
        }
    }
    match args.out {
        Some(path) => {
            fs::write(path, body).with_context(|| format!("cannot write {}", path.display()))?
        }
        None => stdout.write_all(&body)?,
    }
    if let Some(path) = args.dot {
        fs::write(path, export_dot(&e, &verdicts)?)
            .with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(Status::Ok)
}

pub fn cmd_compile(text: &str, mode: Mode, json: bool, stdout: &mut dyn Write) -> Result<Status> {
    let (_, f) = formula(text)?;
    let p = compile(&f, mode);
    if json {
        serde_json::to_writer_pretty(&mut *stdout, &p)?;
        writeln!(stdout)?;
        return Ok(Status::Ok);
    }
    writeln!(stdout, "formula: {f}")?;
    writeln!(
        stdout,
        "mode: {}",
        if mode == Mode::Six { "six" } else { "two" }
    )?;
    for (i, node) in p.nodes().iter().enumerate() {
        let children: String = node.children.iter().map(|c| format!(" #{c}")).collect();
        let slot = p.broadcast_layout().iter().position(|&n| n == i);
        writeln!(
            stdout,
            "#{i} {}{}{}",
            node.kind,
            children,
            slot.map_or(String::new(), |s| format!(" [slot {s}]"))
        )?;
    }
    writeln!(stdout, "root: #{}", p.root())?;
    writeln!(stdout, "payload size: {}", p.broadcast_layout().len())?;
    Ok(Status::Ok)
}

/// A deliberate corruption of the six-valued monitor verdicts, for testing
/// that `check` notices disagreements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fault {
    pub event: EventId,
}

pub fn cmd_check(
    text: &str,
    events: &Path,
    fault: Option<&Fault>,
    stdout: &mut dyn Write,
) -> Result<Status> {
    let (source, f) = formula(text)?;
    let e = load_structure(events)?;
    let two = run(&compile(&f, Mode::Two), &e)?;
    let mut six = run(&compile(&f, Mode::Six), &e)?;
    if let Some(fault) = fault {
        inject(&mut six, fault)?;
    }
    let (o2, o6) = (eval2(&e, &f)?, eval6(&e, &f)?);

    let mut failures = Vec::new();
    if let Some((id, want, got)) = two.collapse().first_difference(&o2) {
        failures.push(format!(
            "two-valued monitor differs from oracle at {id}: {want} vs {got:?}"
        ));
    }
    let six = six.as_six().expect("six-valued run");
    if let Some((id, got, want)) = six.first_difference(&o6) {
        failures.push(format!(
            "six-valued monitor differs from oracle at {id}: monitor {got}, oracle {}",
            want.map_or("missing".into(), |v| v.to_string())
        ));
    }
    if let Some((id, want, got)) = o2.first_difference(&o6.collapse()) {
        failures.push(format!("collapse mismatch at {id}: {want} vs {got:?}"));
    }
    if let Some((id, want, got)) = two.collapse().first_difference(&six.collapse()) {
        failures.push(format!("monitor modes disagree at {id}: {want} vs {got:?}"));
    }

    for d in declarative_divergences(&e, &f)? {
        writeln!(
            stdout,
            "warning: {}: declarative rule gives {} for `{}`, translation gives {}",
            d.event, d.rule, d.subformula, d.translation
        )?;
    }
    if failures.is_empty() {
        writeln!(
            stdout,
            "ok: `{source}` agrees on {} events (monitor = oracle, both modes; collapse coherent)",
            e.len()
        )?;
        Ok(Status::Ok)
    } else {
        writeln!(stdout, "FAILED: {}", failures[0])?;
        for more in &failures[1..] {
            writeln!(stdout, "  also: {more}")?;
        }
        Ok(Status::CheckFailed)
    }
}

fn inject(verdicts: &mut Verdicts, fault: &Fault) -> Result<()> {
    let Verdicts::Six(map) = verdicts else {
        unreachable!("faults target six-valued runs")
    };
    let old = map
        .get(&fault.event)
        .with_context(|| format!("cannot inject fault: no event `{}`", fault.event))?;
    let flipped = if old == TruthValue6::True {
        TruthValue6::CurrentTrue
    } else {
        old.neg()
    };
    map.set(&fault.event, flipped);
    Ok(())
}

pub fn cmd_fuzz(
    iterations: usize,
    seed: u64,
    params: &FuzzParams,
    stdout: &mut dyn Write,
) -> Result<Status> {
    if params.max_events == 0 || params.max_devices == 0 || params.max_depth == 0 {
        bail!("fuzz bounds must be positive");
    }
    let report = fuzz(iterations, seed, params);
    for v in &report.violations {
        writeln!(stdout, "violation: {v}")?;
    }
    let per: Vec<String> = report
        .checks
        .iter()
        .map(|(p, n)| format!("{p}={n}"))
        .collect();
    writeln!(
        stdout,
        "{} iterations from seed {seed}: {} checks ({}), {} violations",
        report.iterations,
        report.total_checks(),
        if per.is_empty() {
            "none".into()
        } else {
            per.join(", ")
        },
        report.violations.len()
    )?;
    if let Some(first) = report.violations.first() {
        writeln!(
            stdout,
            "reproduce with: pastctl fuzz --iterations 1 --seed {} --max-events {} --max-depth {}",
            first.seed, params.max_events, params.max_depth
        )?;
        return Ok(Status::CheckFailed);
    }
    Ok(Status::Ok)
}
