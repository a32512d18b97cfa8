use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{BinaryOp, Formula, UnaryOp};

/// Deterministic random formula of depth at most `max_depth` over `atoms`.
///
/// Panics if `max_depth == 0` or `atoms` is empty.
pub fn random_formula(seed: u64, max_depth: usize, atoms: &[String]) -> Formula {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_formula_with(&mut rng, max_depth, atoms)
}

pub fn random_formula_with<R: Rng + ?Sized>(
    rng: &mut R,
    max_depth: usize,
    atoms: &[String],
) -> Formula {
    assert!(max_depth >= 1, "max_depth must be at least 1");
    assert!(!atoms.is_empty(), "at least one atom is required");
    gen(rng, max_depth, atoms)
}

fn gen<R: Rng + ?Sized>(rng: &mut R, depth: usize, atoms: &[String]) -> Formula {
    if depth == 1 || rng.gen_bool(0.3) {
        return match rng.gen_range(0..6) {
            0 => Formula::Const(true),
            1 => Formula::Const(false),
            _ => Formula::Atom(atoms[rng.gen_range(0..atoms.len())].clone()),
        };
    }
    let pick = rng.gen_range(0..UnaryOp::ALL.len() + BinaryOp::ALL.len());
    if pick < UnaryOp::ALL.len() {
        Formula::unary(UnaryOp::ALL[pick], gen(rng, depth - 1, atoms))
    } else {
        let op = BinaryOp::ALL[pick - UnaryOp::ALL.len()];
        let lhs = gen(rng, depth - 1, atoms);
        let rhs = gen(rng, depth - 1, atoms);
        Formula::binary(op, lhs, rhs)
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;

    fn atoms() -> Vec<String> {
        vec!["q".to_string(), "r".to_string()]
    }

    #[test]
    fn depth_one_is_a_leaf() {
        for seed in 0..50 {
            let f = random_formula(seed, 1, &["q".to_string()]);
            assert!(matches!(f, Formula::Const(_) | Formula::Atom(_)));
        }
    }

    #[test]
    fn deterministic() {
        assert_eq!(
            random_formula(42, 5, &atoms()),
            random_formula(42, 5, &atoms())
        );
    }

    #[test]
    fn respects_depth() {
        for seed in 0..300 {
            assert!(random_formula(seed, 4, &atoms()).depth() <= 4);
        }
    }

    fn kind(f: &Formula, out: &mut BTreeSet<String>) {
        match f {
            Formula::Const(b) => {
                out.insert(format!("const {b}"));
            }
            Formula::Atom(_) => {
                out.insert("atom".into());
            }
            Formula::Unary(op, g) => {
                out.insert(op.symbol().into());
                kind(g, out);
            }
            Formula::Binary(op, l, r) => {
                out.insert(op.symbol().into());
                kind(l, out);
                kind(r, out);
            }
        }
    }

    #[test]
    fn every_constructor_is_reachable() {
        let mut seen = BTreeSet::new();
        for seed in 0..1000 {
            kind(&random_formula(seed, 5, &atoms()), &mut seen);
        }
        assert_eq!(
            seen.len(),
            3 + UnaryOp::ALL.len() + BinaryOp::ALL.len(),
            "{seen:?}"
        );
    }
}
