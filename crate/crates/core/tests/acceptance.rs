//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pastctl::events::EventStructure;
use pastctl::formula::{expand, parse, random_formula_with, CoreFormula};
use pastctl::fuzz::{
    check_bruteforce, check_equivalence, check_soundness, generate_case, random_config,
    random_extension, FuzzParams, Property,
};
use pastctl::logic6::TruthValue6;
use pastctl::monitor::{compile, payload_size, run, Mode};
use pastctl::oracle::eval6;

const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

struct Outcome {
    pass: bool,
    detail: String,
}

fn main() -> ExitCode {
    let corpus = Corpus::build(1000, 0xC0FFEE);
    let criteria: [Criterion; 7] = [
        (
            "monitor/oracle equivalence",
            Box::new(|| monitor_equivalence(&corpus)),
        ),
        (
            "collapse coherence",
            Box::new(|| collapse_coherence(&corpus)),
        ),
        ("brute-force agreement", Box::new(bruteforce_agreement)),
        ("prediction soundness", Box::new(prediction_soundness)),
        ("scenario timelines", Box::new(scenario_timelines)),
        ("complexity", Box::new(|| complexity(&corpus))),
        ("lattice laws", Box::new(lattice_laws)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = check();
        let status = if outcome.pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {} ({name}): {status} - {}",
            i + 1,
            outcome.detail
        );
        failed += usize::from(!outcome.pass);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}

/// Structures and formulas shared by criteria 1, 2 and 6, with the findings
/// of one equivalence pass over them.
struct Corpus {
    formulas: Vec<CoreFormula>,
    findings: Vec<(u64, pastctl::fuzz::Finding)>,
    max_events: usize,
    max_devices: usize,
    elapsed: Duration,
}

impl Corpus {
    fn build(iterations: u64, seed: u64) -> Corpus {
        let params = FuzzParams::default();
        let start = Instant::now();
        let mut corpus = Corpus {
            formulas: Vec::new(),
            findings: Vec::new(),
            max_events: 0,
            max_devices: 0,
            elapsed: Duration::ZERO,
        };
        for i in 0..iterations {
            let case = generate_case(seed + i, &params);
            let f = expand(&case.formula);
            corpus.max_events = corpus.max_events.max(case.structure.len());
            corpus.max_devices = corpus.max_devices.max(case.structure.devices().len());
            for finding in check_equivalence(&case.structure, &f) {
                corpus.findings.push((case.seed, finding));
            }
            corpus.formulas.push(f);
        }
        corpus.elapsed = start.elapsed();
        corpus
    }

    fn count(&self, properties: &[Property]) -> usize {
        self.findings
            .iter()
            .filter(|(_, f)| properties.contains(&f.property))
            .count()
    }
}

fn monitor_equivalence(c: &Corpus) -> Outcome {
    let mismatches = c.count(&[Property::MonitorTwo, Property::MonitorSix]);
    let fast = c.elapsed < Duration::from_secs(60);
    Outcome {
        pass: mismatches == 0 && fast && c.max_events <= 40 && c.max_devices <= 6,
        detail: format!(
            "{} cases (<= {} events, <= {} devices), {mismatches} mismatches, {:.1?}",
            c.formulas.len(),
            c.max_events,
            c.max_devices,
            c.elapsed
        ),
    }
}

fn collapse_coherence(c: &Corpus) -> Outcome {
    let oracle = c.count(&[Property::Collapse]);
    let monitor = c.count(&[Property::ModeCoherence]);
    Outcome {
        pass: oracle + monitor == 0,
        detail: format!(
            "{} cases, {oracle} oracle and {monitor} monitor mismatches",
            c.formulas.len()
        ),
    }
}

fn bruteforce_agreement() -> Outcome {
    let atoms = FuzzParams::default().atoms;
    let templates: Vec<CoreFormula> = ["a S b", "a AS b", "a ES b", "Y a", "EY a"]
        .iter()
        .map(|t| expand(&parse(t).unwrap()))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let (mut checks, mut mismatches) = (0, Vec::new());
    for _ in 0..200 {
        let cfg = random_config(&mut rng, 10, 4, &atoms);
        let e = pastctl::events::generate(&cfg, rng.gen()).unwrap();
        let mut formulas = templates.clone();
        for _ in 0..2 {
            formulas.push(expand(&random_formula_with(&mut rng, 4, &atoms)));
        }
        for f in &formulas {
            checks += 1;
            match check_bruteforce(&e, f) {
                Some(found) => mismatches.extend(found.into_iter().map(|x| (f.to_string(), x))),
                None => mismatches.push((f.to_string(), oversized(&e))),
            }
        }
    }
    Outcome {
        pass: mismatches.is_empty(),
        detail: match mismatches.first() {
            None => format!("200 structures, {checks} formulas, 0 mismatches"),
            Some((f, x)) => format!("{} mismatches, first `{f}`: {x:?}", mismatches.len()),
        },
    }
}

fn oversized(e: &EventStructure) -> pastctl::fuzz::Finding {
    pastctl::fuzz::Finding {
        property: Property::BruteForce,
        event: None,
        detail: format!("{} events exceed the enumeration limit", e.len()),
    }
}

fn prediction_soundness() -> Outcome {
    let params = FuzzParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(4242);
    let mut violations = Vec::new();
    let mut decided = 0;
    for i in 0..300 {
        let case = generate_case(90_000 + i, &params);
        let f = expand(&case.formula);
        let e2 = random_extension(&mut rng, &case.structure, 3);
        decided += eval6(&case.structure, &f)
            .unwrap()
            .iter()
            .filter(|(_, v)| v.is_final() || v.is_locally_final())
            .count();
        violations.extend(check_soundness(&case.structure, &e2, &f));
    }
    Outcome {
        pass: violations.is_empty(),
        detail: match violations.first() {
            None => format!("300 triples, {decided} decided verdicts checked, 0 violations"),
            Some(v) => format!("{} violations, first {v:?}", violations.len()),
        },
    }
}

fn load(name: &str) -> EventStructure {
    let text = std::fs::read_to_string(format!("{FIXTURES}/{name}")).unwrap();
    serde_json::from_str(&text).unwrap()
}

fn golden(name: &str) -> Vec<(String, TruthValue6)> {
    let text = std::fs::read_to_string(format!("{FIXTURES}/golden/{name}")).unwrap();
    text.lines()
        .skip(1)
        .map(|line| {
            let cols: Vec<&str> = line.split(',').collect();
            (cols[0].to_string(), cols[3].parse().unwrap())
        })
        .collect()
}

fn scenario_timelines() -> Outcome {
    use TruthValue6 as V;
    let cases = [
        ("bk.json", "EP b", "bk_backup_made.csv"),
        ("bk.json", "AH f", "bk_always_functional.csv"),
        (
            "bk.json",
            "(EP b) S (AH f)",
            "bk_backup_since_functional.csv",
        ),
        (
            "bk2.json",
            "(EP b) S (AH f)",
            "bk2_backup_since_functional.csv",
        ),
    ];
    let mut problems = Vec::new();
    for (structure, text, expected) in cases {
        let e = load(structure);
        let f = expand(&parse(text).unwrap());
        let monitor = run(&compile(&f, Mode::Six), &e).unwrap();
        let got: Vec<(String, V)> = monitor
            .as_six()
            .unwrap()
            .iter()
            .map(|(id, v)| (id.to_string(), v))
            .collect();
        if got != golden(expected) {
            problems.push(format!("{text} on {structure}: {got:?}"));
        }
        if monitor.as_six() != Some(&eval6(&e, &f).unwrap()) {
            problems.push(format!(
                "{text} on {structure}: monitor differs from oracle"
            ));
        }
    }

    // the shapes the goldens encode
    let at = |rows: &[(String, V)], id: &str| rows.iter().find(|(e, _)| e == id).unwrap().1;
    let backup = golden("bk_backup_made.csv");
    let witness_lag = ["A1", "B1", "A2"]
        .iter()
        .all(|e| at(&backup, e) == V::CurrentFalse)
        && at(&backup, "B2") == V::CurrentTrue
        && ["A3", "B3", "A4", "B4"]
            .iter()
            .all(|e| at(&backup, e) == V::True);
    let functional = golden("bk_always_functional.csv");
    let failure_lag = at(&functional, "A3") == V::CurrentFalse
        && ["A4", "B4"].iter().all(|e| at(&functional, e) == V::False);
    let since = golden("bk_backup_since_functional.csv");
    let since2 = golden("bk2_backup_since_functional.csv");
    let local = since.iter().any(|(_, v)| *v == V::LocalTrue)
        && since2
            .iter()
            .any(|(e, v)| e.starts_with('A') && *v == V::LocalFalse);
    if !(witness_lag && failure_lag && local) {
        problems.push("timeline shape differs".into());
    }

    Outcome {
        pass: problems.is_empty(),
        detail: if problems.is_empty() {
            "4 golden traces reproduced by monitor and oracle".into()
        } else {
            problems.join("; ")
        },
    }
}

fn complexity(c: &Corpus) -> Outcome {
    let mut bad = Vec::new();
    for f in &c.formulas {
        for mode in [Mode::Two, Mode::Six] {
            let p = compile(f, mode);
            if p.nodes().len() > f.connective_count() + f.leaf_count()
                || payload_size(&p) != f.temporal_count()
            {
                bad.push(f.to_string());
            }
        }
    }
    Outcome {
        pass: bad.is_empty(),
        detail: match bad.first() {
            None => format!("{} formulas x 2 modes within bounds", c.formulas.len()),
            Some(f) => format!("{} programs out of bounds, first `{f}`", bad.len()),
        },
    }
}

fn lattice_laws() -> Outcome {
    let start = Instant::now();
    let all = TruthValue6::ALL;
    let mut failures = 0;
    let mut check = |ok: bool| failures += usize::from(!ok);
    for a in all {
        check(a.neg().neg() == a);
        check(TruthValue6::from_bool(a.to_bool()).to_bool() == a.to_bool());
        check(a.neg().to_bool() == !a.to_bool());
        for b in all {
            check(a.conj(b).neg() == a.neg().disj(b.neg()));
            check(a.disj(b).neg() == a.neg().conj(b.neg()));
            check(a.conj(a.disj(b)) == a);
            check(a.disj(a.conj(b)) == a);
            check(a.conj(b).to_bool() == (a.to_bool() && b.to_bool()));
            check(a.disj(b).to_bool() == (a.to_bool() || b.to_bool()));
            check(a.conj(b) == b.conj(a) && a.disj(b) == b.disj(a));
            for c in all {
                check(a.conj(b.conj(c)) == a.conj(b).conj(c));
                check(a.disj(b.disj(c)) == a.disj(b).disj(c));
                check(a.conj(b.disj(c)) == a.conj(b).disj(a.conj(c)));
                check(a.disj(b.conj(c)) == a.disj(b).conj(a.disj(c)));
            }
        }
    }
    let elapsed = start.elapsed();
    Outcome {
        pass: failures == 0 && elapsed < Duration::from_secs(1),
        detail: format!("6/36/216 tuples, {failures} failures, {elapsed:.1?}"),
    }
}
