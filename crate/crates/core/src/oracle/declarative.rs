//! The declarative refinement rules for temporal operators, evaluated as a
//! diagnostic next to the normative recursion.
//!
//! Each rule fires at an event when its side condition holds and then fixes
//! the value of the temporal subformula:
//!
//! | operator   | condition                          | rule value |
//! |------------|------------------------------------|------------|
//! | `f1 AS f2` | `f2 <= F-`, AS false               | `f2`       |
//! | `f1 ES f2` | `f1 >= T-`, ES true                | `f1`       |
//! | `f1 S f2`  | `f2 <= F-`, S false                | `F-`       |
//! | `f1 S f2`  | `f2 >= T-`, S true                 | `T-`       |
//! | `AY f`     | `f <= F-`, AY false                | `f`        |
//! | `EY f`     | `f >= T-`, EY true                 | `f`        |
//! | `Y f`      | `f <= F-`, Y false                 | `F-`       |
//! | `Y f`      | `f >= T-`, Y true                  | `T-`       |
//!
//! `AY f` has no core node of its own; the rule is applied to its expansion
//! `!EY !f`. Children are valued by the recursion, truth by the two-valued
//! semantics. A divergence is an event where a rule fires and disagrees
//! with the recursion.

use serde::Serialize;

use crate::events::{EventId, EventStructure, Topology};
use crate::formula::CoreFormula;
use crate::logic6::TruthValue6;

use super::{prepare, values2, values6, OracleError};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Divergence {
    pub event: EventId,
    pub subformula: CoreFormula,
    pub rule: TruthValue6,
    pub translation: TruthValue6,
}

/// Divergences in topological order of events, subformulas bottom-up.
pub fn declarative_divergences(
    e: &EventStructure,
    f: &CoreFormula,
) -> Result<Vec<Divergence>, OracleError> {
    let t = prepare(e, f)?;
    let mut subformulas = Vec::new();
    collect(f, &mut subformulas);

    let mut found = Vec::new();
    for p in 0..t.len() {
        for g in &subformulas {
            for (node, rule) in rules(&t, g, p) {
                let translation = values6(&t, node)[p];
                if rule != translation {
                    found.push(Divergence {
                        event: t.event(p).id.clone(),
                        subformula: node.clone(),
                        rule,
                        translation,
                    });
                }
            }
        }
    }
    Ok(found)
}

/// Distinct subformulas, children before parents.
fn collect<'a>(f: &'a CoreFormula, out: &mut Vec<&'a CoreFormula>) {
    for c in f.children() {
        collect(c, out);
    }
    if !out.contains(&f) {
        out.push(f);
    }
}

/// Rules firing for `g` at position `p`, keyed by the node they constrain.
fn rules<'a>(
    t: &Topology<'_>,
    g: &'a CoreFormula,
    p: usize,
) -> Vec<(&'a CoreFormula, TruthValue6)> {
    use CoreFormula as C;
    use TruthValue6 as V;
    let sem = |h: &CoreFormula| values6(t, h)[p];
    let holds = values2(t, g)[p];
    let mut out = Vec::new();
    match g {
        C::AS(_, f2) => {
            let v = sem(f2);
            if v <= V::LocalFalse && !holds {
                out.push((g, v));
            }
        }
        C::ES(f1, _) => {
            let v = sem(f1);
            if v >= V::LocalTrue && holds {
                out.push((g, v));
            }
        }
        C::S(_, f2) | C::Y(f2) => {
            let v = sem(f2);
            if v <= V::LocalFalse && !holds {
                out.push((g, V::LocalFalse));
            } else if v >= V::LocalTrue && holds {
                out.push((g, V::LocalTrue));
            }
        }
        C::EY(f1) => {
            let v = sem(f1);
            if v >= V::LocalTrue && holds {
                out.push((g, v));
            }
        }
        C::Not(inner) => {
            if let C::EY(body) = inner.as_ref() {
                if let C::Not(h) = body.as_ref() {
                    let v = sem(h);
                    if v <= V::LocalFalse && !holds {
                        out.push((g, v));
                    }
                }
            }
        }
        _ => {}
    }
    out
}
