//! Two-valued semantics straight from the path-quantified definitions.
//!
//! * `f1 S f2`: some earlier-or-current event on the device chain satisfies
//!   `f2`, and every later chain event up to now satisfies `f1`.
//! * `f1 ES f2`: some message path `e1 ~> ... ~> en = e` has `f2` at `e1`
//!   and `f1` at `e2..en`.
//! * `f1 AS f2`: every grounded path (one starting at a first-round event)
//!   ending at `e` has such a witness position.
//!
//! Exponential in the structure size; only used as a cross-check.

use crate::events::{EventStructure, Topology};
use crate::formula::CoreFormula;

use super::{prepare, OracleError, VerdictMap, VerdictMap2};

pub const BRUTEFORCE_LIMIT: usize = 12;

pub fn eval2_bruteforce(e: &EventStructure, f: &CoreFormula) -> Result<VerdictMap2, OracleError> {
    if e.len() > BRUTEFORCE_LIMIT {
        return Err(OracleError::TooLarge {
            events: e.len(),
            limit: BRUTEFORCE_LIMIT,
        });
    }
    let t = prepare(e, f)?;
    Ok(VerdictMap::from_topology(&t, f, values(&t, f)))
}

fn values(t: &Topology<'_>, f: &CoreFormula) -> Vec<bool> {
    use CoreFormula as C;
    let n = t.len();
    match f {
        C::Const(b) => vec![*b; n],
        C::Atom(a) => (0..n).map(|p| t.event(p).obs[a]).collect(),
        C::Not(g) => values(t, g).iter().map(|v| !v).collect(),
        C::And(l, r) => {
            let (a, b) = (values(t, l), values(t, r));
            (0..n).map(|p| a[p] && b[p]).collect()
        }
        C::Or(l, r) => {
            let (a, b) = (values(t, l), values(t, r));
            (0..n).map(|p| a[p] || b[p]).collect()
        }
        C::Y(g) => {
            let v = values(t, g);
            (0..n)
                .map(|p| t.device_pred(p).is_some_and(|q| v[q]))
                .collect()
        }
        C::EY(g) => {
            let v = values(t, g);
            (0..n)
                .map(|p| t.preds(p).iter().any(|&(_, q)| v[q]))
                .collect()
        }
        C::S(l, r) => {
            let (a, b) = (values(t, l), values(t, r));
            (0..n)
                .map(|p| {
                    let mut chain = vec![p];
                    while let Some(q) = t.device_pred(*chain.last().unwrap()) {
                        chain.push(q);
                    }
                    chain.reverse();
                    has_witness(&chain, &a, &b)
                })
                .collect()
        }
        C::ES(l, r) => {
            let (a, b) = (values(t, l), values(t, r));
            (0..n)
                .map(|p| paths_to(t, p).iter().any(|path| has_witness(path, &a, &b)))
                .collect()
        }
        C::AS(l, r) => {
            let (a, b) = (values(t, l), values(t, r));
            (0..n)
                .map(|p| {
                    paths_to(t, p)
                        .iter()
                        .filter(|path| t.event(path[0]).seq == 1)
                        .all(|path| has_witness(path, &a, &b))
                })
                .collect()
        }
    }
}

/// `exists i. f2(path[i]) && forall j > i. f1(path[j])`
fn has_witness(path: &[usize], f1: &[bool], f2: &[bool]) -> bool {
    (0..path.len()).any(|i| f2[path[i]] && path[i + 1..].iter().all(|&q| f1[q]))
}

/// Every message path ending at `end`, the single-event path included.
fn paths_to(t: &Topology<'_>, end: usize) -> Vec<Vec<usize>> {
    fn walk(t: &Topology<'_>, rev: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let mut path = rev.clone();
        path.reverse();
        out.push(path);
        let head = *rev.last().unwrap();
        for &(_, q) in t.preds(head) {
            rev.push(q);
            walk(t, rev, out);
            rev.pop();
        }
    }
    let mut out = Vec::new();
    walk(t, &mut vec![end], &mut out);
    out
}
