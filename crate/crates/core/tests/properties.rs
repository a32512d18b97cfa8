use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pastctl::events::{EventId, EventStructure};
use pastctl::formula::{expand, parse, random_formula, CoreFormula, Formula};
use pastctl::fuzz::{generate_case, random_extension, FuzzParams};
use pastctl::logic6::TruthValue6;
use pastctl::monitor::{compile, resume, run, run_in_order, trace, Mode};
use pastctl::oracle::{eval2, eval6};

fn atoms() -> Vec<String> {
    FuzzParams::default().atoms
}

fn small() -> FuzzParams {
    FuzzParams {
        max_events: 24,
        ..FuzzParams::default()
    }
}

fn value() -> impl Strategy<Value = TruthValue6> {
    (0u8..6).prop_map(|r| TruthValue6::from_rank(r).unwrap())
}

fn core(text: &str) -> CoreFormula {
    expand(&parse(text).unwrap())
}

/// A random valid linearization: repeatedly pick any event whose
/// predecessors are all placed.
fn shuffled_order(e: &EventStructure, seed: u64) -> Vec<EventId> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut placed: Vec<EventId> = Vec::new();
    let mut pending: Vec<_> = e.events().iter().collect();
    while !pending.is_empty() {
        let ready: Vec<usize> = (0..pending.len())
            .filter(|&i| pending[i].preds.values().all(|p| placed.contains(p)))
            .collect();
        let pick = ready[rng.gen_range(0..ready.len())];
        placed.push(pending.swap_remove(pick).id.clone());
    }
    placed
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn connectives_are_lattice_operations(a in value(), b in value(), c in value()) {
        prop_assert_eq!(a.conj(b), a.min(b));
        prop_assert_eq!(a.disj(b), a.max(b));
        prop_assert_eq!(a.neg().neg(), a);
        prop_assert_eq!(a.conj(b.disj(c)), a.conj(b).disj(a.conj(c)));
        prop_assert_eq!(a.conj(b).to_bool(), a.to_bool() && b.to_bool());
        prop_assert_eq!(a.neg().to_bool(), !a.to_bool());
    }

    #[test]
    fn token_and_rank_round_trip(a in value()) {
        prop_assert_eq!(a.token().parse::<TruthValue6>().unwrap(), a);
        let json = serde_json::to_string(&a).unwrap();
        prop_assert_eq!(serde_json::from_str::<TruthValue6>(&json).unwrap(), a);
    }

    #[test]
    fn render_parse_round_trip(seed: u64, depth in 1usize..7) {
        let f = random_formula(seed, depth, &atoms());
        let text = f.to_string();
        prop_assert_eq!(parse(&text).unwrap(), f, "{}", text);
    }

    #[test]
    fn formula_json_round_trip(seed: u64) {
        let f = random_formula(seed, 5, &atoms());
        let json = serde_json::to_string(&f).unwrap();
        prop_assert_eq!(serde_json::from_str::<Formula>(&json).unwrap(), f);
    }

    #[test]
    fn expansion_is_idempotent(seed: u64) {
        let g = expand(&random_formula(seed, 5, &atoms()));
        prop_assert_eq!(expand(&Formula::from(g.clone())), g.clone());
        prop_assert_eq!(Formula::from(g.clone()).to_core(), Some(g));
    }

    #[test]
    fn generated_structures_validate(seed: u64) {
        let case = generate_case(seed, &FuzzParams::default());
        prop_assert!(case.structure.validate().is_ok());
        prop_assert!(case.structure.len() <= 40);
    }

    #[test]
    fn monitors_match_oracles(seed: u64) {
        let case = generate_case(seed, &small());
        let f = expand(&case.formula);
        let e = &case.structure;
        let six = run(&compile(&f, Mode::Six), e).unwrap();
        let two = run(&compile(&f, Mode::Two), e).unwrap();
        prop_assert_eq!(six.as_six().unwrap(), &eval6(e, &f).unwrap());
        prop_assert_eq!(two.as_two().unwrap(), &eval2(e, &f).unwrap());
        prop_assert_eq!(six.collapse(), two.collapse());
    }

    #[test]
    fn linearization_does_not_matter(seed: u64, order_seed: u64) {
        let case = generate_case(seed, &small());
        let p = compile(&expand(&case.formula), Mode::Six);
        let order = shuffled_order(&case.structure, order_seed);
        prop_assert_eq!(
            run_in_order(&p, &case.structure, &order).unwrap(),
            run(&p, &case.structure).unwrap()
        );
    }

    #[test]
    fn resuming_equals_rerunning(seed: u64) {
        let case = generate_case(seed, &small());
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let e2 = random_extension(&mut rng, &case.structure, 3);
        for mode in [Mode::Two, Mode::Six] {
            let p = compile(&expand(&case.formula), mode);
            let first = trace(&p, &case.structure).unwrap();
            prop_assert_eq!(resume(&p, &e2, &first).unwrap(), trace(&p, &e2).unwrap());
        }
    }

    #[test]
    fn quantifiers_are_monotone(seed: u64) {
        let case = generate_case(seed, &small());
        let e = &case.structure;
        let all = eval2(e, &core("a AS b")).unwrap();
        let own = eval2(e, &core("a S b")).unwrap();
        let some = eval2(e, &core("a ES b")).unwrap();
        let y = eval2(e, &core("Y a")).unwrap();
        let ey = eval2(e, &core("EY a")).unwrap();
        for (id, v) in all.iter() {
            prop_assert!(!v || own.get(id).unwrap(), "AS => S at {}", id);
            prop_assert!(!own.get(id).unwrap() || some.get(id).unwrap(), "S => ES at {}", id);
            prop_assert!(!y.get(id).unwrap() || ey.get(id).unwrap(), "Y => EY at {}", id);
        }
    }

    #[test]
    fn gossip_is_monotone_along_causality(seed: u64) {
        let case = generate_case(seed, &small());
        let e = &case.structure;
        let t = e.topology().unwrap();
        let ever = eval2(e, &core("EP b")).unwrap();
        let always = eval2(e, &core("AH b")).unwrap();
        for (p, later) in t.causal_futures().iter().enumerate() {
            let id = &t.event(p).id;
            for &q in later {
                let succ = &t.event(q).id;
                prop_assert!(!ever.get(id).unwrap() || ever.get(succ).unwrap());
                prop_assert!(always.get(id).unwrap() || !always.get(succ).unwrap());
            }
        }
    }

    #[test]
    fn payload_is_bounded_by_connectives(seed: u64) {
        let f = expand(&random_formula(seed, 6, &atoms()));
        let p = compile(&f, Mode::Six);
        prop_assert!(pastctl::monitor::payload_size(&p) <= f.connective_count());
        prop_assert_eq!(p.nodes().len(), f.connective_count() + f.leaf_count());
    }
}
