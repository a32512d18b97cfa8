//! Differential fuzzing of monitors against the oracles.
//!
//! Each iteration draws a random scenario and formula from its own seed
//! (`seed + index`), so any reported violation replays in isolation.

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::events::{
    extend, generate, AtomModel, Churn, Connectivity, DeviceId, DeviceSpec, EventId,
    EventStructure, ScenarioConfig,
};
use crate::formula::{expand, random_formula_with, CoreFormula, Formula};
use crate::logic6::TruthValue6;
use crate::monitor::{compile, run, Mode};
use crate::oracle::{eval2, eval2_bruteforce, eval6, BRUTEFORCE_LIMIT};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FuzzParams {
    pub max_events: usize,
    pub max_devices: usize,
    pub max_depth: usize,
    pub atoms: Vec<String>,
    /// Rounds appended for the prediction-soundness extension (at least 1).
    pub max_extension_rounds: u32,
}

impl Default for FuzzParams {
    fn default() -> Self {
        FuzzParams {
            max_events: 40,
            max_devices: 6,
            max_depth: 5,
            atoms: ["a", "b", "c"].map(String::from).to_vec(),
            max_extension_rounds: 3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Property {
    /// Two-valued monitor equals `eval2`.
    MonitorTwo,
    /// Six-valued monitor equals `eval6`.
    MonitorSix,
    /// `eval6` collapses to `eval2`.
    Collapse,
    /// Six-valued monitor collapses to the two-valued monitor.
    ModeCoherence,
    /// Path-enumeration semantics equals `eval2`.
    BruteForce,
    /// Final and locally final verdicts persist in an extension.
    Soundness,
    /// Verdicts of old events are unchanged in an extension.
    Stability,
    /// A run never shows both `T` and `F`.
    NeverBoth,
}

impl Property {
    pub fn name(self) -> &'static str {
        match self {
            Property::MonitorTwo => "monitor-two",
            Property::MonitorSix => "monitor-six",
            Property::Collapse => "collapse",
            Property::ModeCoherence => "mode-coherence",
            Property::BruteForce => "brute-force",
            Property::Soundness => "soundness",
            Property::Stability => "stability",
            Property::NeverBoth => "never-both",
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One failed check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Finding {
    pub property: Property,
    pub event: Option<EventId>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub seed: u64,
    pub formula: String,
    #[serde(flatten)]
    pub finding: Finding,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "seed {}: {} violated for `{}`",
            self.seed, self.finding.property, self.formula
        )?;
        if let Some(e) = &self.finding.event {
            write!(f, " at {e}")?;
        }
        write!(f, ": {}", self.finding.detail)
    }
}

#[derive(Clone, Debug)]
pub struct Case {
    pub seed: u64,
    pub config: ScenarioConfig,
    pub structure: EventStructure,
    pub formula: Formula,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FuzzReport {
    pub iterations: usize,
    /// Checks executed, per property.
    pub checks: BTreeMap<Property, usize>,
    pub violations: Vec<Violation>,
}

impl FuzzReport {
    pub fn total_checks(&self) -> usize {
        self.checks.values().sum()
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// A random scenario with at most `max_events` events over at most
/// `max_devices` devices.
pub fn random_config<R: Rng + ?Sized>(
    rng: &mut R,
    max_events: usize,
    max_devices: usize,
    atoms: &[String],
) -> ScenarioConfig {
    assert!(
        max_events >= 1 && max_devices >= 1,
        "bounds must be positive"
    );
    let devices = rng.gen_range(1..=max_devices.min(max_events));
    let rounds = rng.gen_range(1..=(max_events / devices).max(1)) as u32;
    let (connectivity, drop_prob) = random_network(rng);
    let ids: Vec<DeviceId> = (0..devices).map(crate::events::device_name).collect();
    let mut churn = BTreeMap::new();
    for d in &ids {
        if rounds > 1 && rng.gen_bool(0.2) {
            let join = rng.gen_range(1..=rounds);
            let leave = rng.gen_range(join..=rounds);
            churn.insert(
                d.clone(),
                Churn {
                    join_round: join,
                    leave_round: Some(leave),
                },
            );
        }
    }
    let atom_models = atoms
        .iter()
        .map(|a| (a.clone(), random_model(rng, &ids, rounds)))
        .collect();
    ScenarioConfig {
        devices: DeviceSpec::Count(devices),
        rounds,
        connectivity,
        drop_prob,
        churn,
        atom_models,
    }
}

fn random_network<R: Rng + ?Sized>(rng: &mut R) -> (Connectivity, f64) {
    let connectivity = match rng.gen_range(0..3) {
        0 => Connectivity::Complete,
        1 => Connectivity::Chain,
        _ => Connectivity::Random {
            p: rng.gen_range(0.2..0.9),
        },
    };
    let drop_prob = if rng.gen_bool(0.5) {
        0.0
    } else {
        rng.gen_range(0.0..0.5)
    };
    (connectivity, drop_prob)
}

fn random_model<R: Rng + ?Sized>(rng: &mut R, ids: &[DeviceId], rounds: u32) -> AtomModel {
    match rng.gen_range(0..6) {
        0 => AtomModel::Const(rng.gen()),
        1 => AtomModel::Pulse {
            device: ids[rng.gen_range(0..ids.len())].clone(),
            round: rng.gen_range(1..=rounds),
            value: rng.gen(),
        },
        _ => AtomModel::Bernoulli {
            p: rng.gen_range(0.1..0.9),
        },
    }
}

/// The structure and formula of one fuzz iteration.
pub fn generate_case(seed: u64, params: &FuzzParams) -> Case {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let config = random_config(
        &mut rng,
        params.max_events,
        params.max_devices,
        &params.atoms,
    );
    let structure = generate(&config, rng.gen()).expect("random configs are valid");
    let formula = random_formula_with(&mut rng, params.max_depth, &params.atoms);
    Case {
        seed,
        config,
        structure,
        formula,
    }
}

/// A random extension of `e` by 1 to `max_rounds` rounds over `e`'s devices.
pub fn random_extension<R: Rng + ?Sized>(
    rng: &mut R,
    e: &EventStructure,
    max_rounds: u32,
) -> EventStructure {
    let extra = rng.gen_range(1..=max_rounds.max(1));
    let ids = e.devices().to_vec();
    let (connectivity, drop_prob) = random_network(rng);
    let atom_models = e
        .atoms()
        .iter()
        .map(|a| (a.clone(), random_model(rng, &ids, extra)))
        .collect();
    let cfg = ScenarioConfig {
        devices: DeviceSpec::Ids(ids),
        rounds: extra,
        connectivity,
        drop_prob,
        churn: BTreeMap::new(),
        atom_models,
    };
    extend(e, &cfg, rng.gen(), extra).expect("extension of a valid structure")
}

/// Monitors in both modes against both oracles, plus collapse coherence.
pub fn check_equivalence(e: &EventStructure, f: &CoreFormula) -> Vec<Finding> {
    let mut out = Vec::new();
    let (Ok(m2), Ok(m6)) = (eval2(e, f), eval6(e, f)) else {
        out.push(Finding {
            property: Property::MonitorTwo,
            event: None,
            detail: "oracle rejected the case".into(),
        });
        return out;
    };
    let r2 = run(&compile(f, Mode::Two), e);
    let r6 = run(&compile(f, Mode::Six), e);
    match r2.as_ref().map(|r| r.as_two()) {
        Ok(Some(r2)) => {
            if let Some((id, want, got)) = m2.first_difference(r2) {
                out.push(mismatch(Property::MonitorTwo, id, want, got));
            }
        }
        other => out.push(Finding {
            property: Property::MonitorTwo,
            event: None,
            detail: format!("monitor failed: {other:?}"),
        }),
    }
    match r6.as_ref().map(|r| r.as_six()) {
        Ok(Some(r6)) => {
            if let Some((id, want, got)) = m6.first_difference(r6) {
                out.push(mismatch(Property::MonitorSix, id, want, got));
            }
        }
        other => out.push(Finding {
            property: Property::MonitorSix,
            event: None,
            detail: format!("monitor failed: {other:?}"),
        }),
    }
    if let Some((id, want, got)) = m2.first_difference(&m6.collapse()) {
        out.push(mismatch(Property::Collapse, id, want, got));
    }
    if let (Ok(r2), Ok(r6)) = (&r2, &r6) {
        if let Some((id, want, got)) = r2.collapse().first_difference(&r6.collapse()) {
            out.push(mismatch(Property::ModeCoherence, id, want, got));
        }
    }
    out
}

/// Path-enumeration semantics against the recursion; `None` if `e` is too
/// large to enumerate.
pub fn check_bruteforce(e: &EventStructure, f: &CoreFormula) -> Option<Vec<Finding>> {
    if e.len() > BRUTEFORCE_LIMIT {
        return None;
    }
    let brute = eval2_bruteforce(e, f).ok()?;
    let rec = eval2(e, f).ok()?;
    Some(
        rec.first_difference(&brute)
            .map(|(id, want, got)| mismatch(Property::BruteForce, id, want, got))
            .into_iter()
            .collect(),
    )
}

/// Impartiality of six-valued verdicts of `f` on `e` when `e` grows to
/// `extended`.
pub fn check_soundness(
    e: &EventStructure,
    extended: &EventStructure,
    f: &CoreFormula,
) -> Vec<Finding> {
    use TruthValue6 as V;
    let mut out = Vec::new();
    let (Ok(old), Ok(new6), Ok(new2), Ok(t)) = (
        eval6(e, f),
        eval6(extended, f),
        eval2(extended, f),
        extended.topology(),
    ) else {
        out.push(Finding {
            property: Property::Soundness,
            event: None,
            detail: "oracle rejected the case".into(),
        });
        return out;
    };

    if let Some((id, was, now)) = old.first_difference(&new6) {
        out.push(Finding {
            property: Property::Stability,
            event: Some(id),
            detail: format!(
                "was {was}, now {}",
                now.map_or("missing".into(), |v| v.to_string())
            ),
        });
    }

    let futures = t.causal_futures();
    let mut later_on_device: Vec<Vec<usize>> = vec![Vec::new(); t.len()];
    for p in 0..t.len() {
        let mut q = p;
        while let Some(prev) = t.device_pred(q) {
            later_on_device[prev].push(p);
            q = prev;
        }
    }

    for (id, v) in old.iter() {
        let p = t.position(id).expect("extension keeps events");
        let (targets, ok): (Vec<usize>, fn(V) -> bool) = match v {
            V::True => (futures[p].iter().copied().collect(), |w| w == V::True),
            V::False => (futures[p].iter().copied().collect(), |w| w == V::False),
            V::LocalTrue => (later_on_device[p].clone(), |w| w >= V::LocalTrue),
            V::LocalFalse => (later_on_device[p].clone(), |w| w <= V::LocalFalse),
            _ => continue,
        };
        for q in targets {
            let later = &t.event(q).id;
            let (w, b) = (new6.get(later).unwrap(), new2.get(later).unwrap());
            if !ok(w) || b != v.to_bool() {
                out.push(Finding {
                    property: Property::Soundness,
                    event: Some(id.clone()),
                    detail: format!("{v} at {id} but {w} ({b}) at later {later}"),
                });
                break;
            }
        }
    }

    let top = new6.iter().find(|(_, v)| *v == V::True);
    let bottom = new6.iter().find(|(_, v)| *v == V::False);
    if let (Some((x, _)), Some((y, _))) = (top, bottom) {
        out.push(Finding {
            property: Property::NeverBoth,
            event: Some(x.clone()),
            detail: format!("T at {x} and F at {y}"),
        });
    }
    out
}

/// Runs every check on one case; returns the per-property check counts and
/// the violations found.
pub fn check_case(case: &Case, params: &FuzzParams) -> (BTreeMap<Property, usize>, Vec<Violation>) {
    let f = expand(&case.formula);
    let mut counts = BTreeMap::new();
    let mut findings = Vec::new();

    for p in [
        Property::MonitorTwo,
        Property::MonitorSix,
        Property::Collapse,
        Property::ModeCoherence,
    ] {
        *counts.entry(p).or_insert(0) += 1;
    }
    findings.extend(check_equivalence(&case.structure, &f));

    if let Some(found) = check_bruteforce(&case.structure, &f) {
        *counts.entry(Property::BruteForce).or_insert(0) += 1;
        findings.extend(found);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(case.seed);
    rng.set_stream(1);
    let extended = random_extension(&mut rng, &case.structure, params.max_extension_rounds);
    for p in [
        Property::Soundness,
        Property::Stability,
        Property::NeverBoth,
    ] {
        *counts.entry(p).or_insert(0) += 1;
    }
    findings.extend(check_soundness(&case.structure, &extended, &f));

    let formula = case.formula.to_string();
    let violations = findings
        .into_iter()
        .map(|finding| Violation {
            seed: case.seed,
            formula: formula.clone(),
            finding,
        })
        .collect();
    (counts, violations)
}

/// `iterations` cases with seeds `seed, seed + 1, ...`.
pub fn fuzz(iterations: usize, seed: u64, params: &FuzzParams) -> FuzzReport {
    let mut report = FuzzReport {
        iterations,
        ..FuzzReport::default()
    };
    for i in 0..iterations {
        let case = generate_case(seed.wrapping_add(i as u64), params);
        let (counts, violations) = check_case(&case, params);
        for (p, n) in counts {
            *report.checks.entry(p).or_insert(0) += n;
        }
        report.violations.extend(violations);
    }
    report
}

fn mismatch<V: fmt::Debug>(property: Property, id: EventId, want: V, got: Option<V>) -> Finding {
    Finding {
        property,
        event: Some(id),
        detail: format!("expected {want:?}, got {got:?}"),
    }
}
