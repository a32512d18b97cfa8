//! Whole-structure reference semantics.
//!
//! [`eval2`] and [`eval6`] evaluate a core formula by a single pass over the
//! structure in topological order, one vector of verdicts per subformula.
//! They are the ground truth that compiled monitors are checked against.
//! [`eval2_bruteforce`] recomputes the two-valued semantics from its
//! path-quantified definition, independently of the recursions.
//!
//! Fold conventions: `Y`/`S` look at the device predecessor only; `EY`/`ES`
//! fold over every message predecessor; `AS` folds over every message
//! predecessor and, at a device's first event, also over the default value
//! (`false` / `F.`) standing in for the missing own entry. Hence `f1 AS f2`
//! equals `f2` at first-round events.

mod bruteforce;
mod declarative;

use indexmap::IndexMap;
use serde::Serialize;
use thiserror::Error;

use crate::events::{EventId, EventStructure, InvalidStructure, Topology};
use crate::formula::CoreFormula;
use crate::logic6::TruthValue6;

pub use bruteforce::{eval2_bruteforce, BRUTEFORCE_LIMIT};
pub use declarative::{declarative_divergences, Divergence};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error(transparent)]
    InvalidStructure(#[from] InvalidStructure),
    #[error("atom `{0}` is not observed by the event structure")]
    UnknownAtom(String),
    #[error("structure has {events} events; brute force is limited to {limit}")]
    TooLarge { events: usize, limit: usize },
}

/// Verdicts of one formula at every event, in topological order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerdictMap<V> {
    formula: CoreFormula,
    values: IndexMap<EventId, V>,
}

pub type VerdictMap2 = VerdictMap<bool>;
pub type VerdictMap6 = VerdictMap<TruthValue6>;

impl<V: Copy> VerdictMap<V> {
    pub fn new(formula: CoreFormula, values: IndexMap<EventId, V>) -> Self {
        VerdictMap { formula, values }
    }

    pub(crate) fn from_topology(t: &Topology<'_>, formula: &CoreFormula, values: Vec<V>) -> Self {
        VerdictMap {
            formula: formula.clone(),
            values: t.ids().cloned().zip(values).collect(),
        }
    }

    pub fn formula(&self) -> &CoreFormula {
        &self.formula
    }

    pub fn get(&self, id: &EventId) -> Option<V> {
        self.values.get(id).copied()
    }

    /// Overwrites one verdict (used to inject faults in checks).
    pub fn set(&mut self, id: &EventId, value: V) -> Option<V> {
        self.values
            .get_mut(id)
            .map(|slot| std::mem::replace(slot, value))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&EventId, V)> + '_ {
        self.values.iter().map(|(k, v)| (k, *v))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map<W: Copy>(&self, f: impl Fn(V) -> W) -> VerdictMap<W> {
        VerdictMap {
            formula: self.formula.clone(),
            values: self
                .values
                .iter()
                .map(|(k, v)| (k.clone(), f(*v)))
                .collect(),
        }
    }
}

impl<V: Copy + PartialEq> VerdictMap<V> {
    /// First event (in this map's order) where the two maps disagree, with
    /// both values. Events missing from `other` count as disagreements.
    pub fn first_difference(&self, other: &VerdictMap<V>) -> Option<(EventId, V, Option<V>)> {
        self.iter().find_map(|(id, v)| match other.get(id) {
            Some(w) if w == v => None,
            w => Some((id.clone(), v, w)),
        })
    }
}

impl VerdictMap6 {
    pub fn collapse(&self) -> VerdictMap2 {
        self.map(TruthValue6::to_bool)
    }
}

pub(crate) fn prepare<'a>(
    e: &'a EventStructure,
    f: &CoreFormula,
) -> Result<Topology<'a>, OracleError> {
    let t = e.topology()?;
    if let Some(missing) = f.atoms().into_iter().find(|a| !e.atoms().contains(a)) {
        return Err(OracleError::UnknownAtom(missing));
    }
    Ok(t)
}

/// Two-valued semantics.
pub fn eval2(e: &EventStructure, f: &CoreFormula) -> Result<VerdictMap2, OracleError> {
    let t = prepare(e, f)?;
    Ok(VerdictMap::from_topology(&t, f, values2(&t, f)))
}

/// Six-valued predictive semantics.
pub fn eval6(e: &EventStructure, f: &CoreFormula) -> Result<VerdictMap6, OracleError> {
    let t = prepare(e, f)?;
    Ok(VerdictMap::from_topology(&t, f, values6(&t, f)))
}

pub(crate) fn values2(t: &Topology<'_>, f: &CoreFormula) -> Vec<bool> {
    use CoreFormula as C;
    let n = t.len();
    match f {
        C::Const(b) => vec![*b; n],
        C::Atom(a) => (0..n).map(|p| t.event(p).obs[a]).collect(),
        C::Not(g) => values2(t, g).into_iter().map(|v| !v).collect(),
        C::And(l, r) => zip_with(values2(t, l), values2(t, r), |a, b| a && b),
        C::Or(l, r) => zip_with(values2(t, l), values2(t, r), |a, b| a || b),
        C::Y(g) => {
            let v = values2(t, g);
            (0..n)
                .map(|p| t.device_pred(p).is_some_and(|q| v[q]))
                .collect()
        }
        C::EY(g) => {
            let v = values2(t, g);
            (0..n)
                .map(|p| t.preds(p).iter().any(|&(_, q)| v[q]))
                .collect()
        }
        C::S(l, r) => {
            let (a, b) = (values2(t, l), values2(t, r));
            let mut out = vec![false; n];
            for p in 0..n {
                let before = t.device_pred(p).is_some_and(|q| out[q]);
                out[p] = b[p] || (a[p] && before);
            }
            out
        }
        C::AS(l, r) => {
            let (a, b) = (values2(t, l), values2(t, r));
            let mut out = vec![false; n];
            for p in 0..n {
                let all = t.device_pred(p).is_some() && t.preds(p).iter().all(|&(_, q)| out[q]);
                out[p] = b[p] || (a[p] && all);
            }
            out
        }
        C::ES(l, r) => {
            let (a, b) = (values2(t, l), values2(t, r));
            let mut out = vec![false; n];
            for p in 0..n {
                let any = t.preds(p).iter().any(|&(_, q)| out[q]);
                out[p] = b[p] || (a[p] && any);
            }
            out
        }
    }
}

pub(crate) fn values6(t: &Topology<'_>, f: &CoreFormula) -> Vec<TruthValue6> {
    use CoreFormula as C;
    use TruthValue6 as V;
    let n = t.len();
    // folds over predecessors, with the default standing in for a missing
    // own entry at first-round events
    let own = |out: &[V], p: usize| t.device_pred(p).map_or(V::CurrentFalse, |q| out[q]);
    let fold = |out: &[V], p: usize, init: V, op: fn(V, V) -> V| {
        let start = if t.device_pred(p).is_some() {
            None
        } else {
            Some(V::CurrentFalse)
        };
        t.preds(p)
            .iter()
            .map(|&(_, q)| out[q])
            .chain(start)
            .fold(init, op)
    };
    match f {
        C::Const(true) => vec![V::True; n],
        C::Const(false) => vec![V::False; n],
        C::Atom(a) => (0..n).map(|p| V::from_bool(t.event(p).obs[a])).collect(),
        C::Not(g) => values6(t, g).into_iter().map(V::neg).collect(),
        C::And(l, r) => zip_with(values6(t, l), values6(t, r), V::conj),
        C::Or(l, r) => zip_with(values6(t, l), values6(t, r), V::disj),
        C::Y(g) => {
            let v = values6(t, g);
            (0..n)
                .map(|p| {
                    if own(&v, p) >= V::CurrentTrue {
                        V::CurrentTrue.disj(v[p].conj(V::LocalTrue))
                    } else {
                        V::LocalFalse.disj(v[p].conj(V::CurrentFalse))
                    }
                })
                .collect()
        }
        C::EY(g) => {
            let v = values6(t, g);
            (0..n)
                .map(|p| {
                    if fold(&v, p, V::False, V::disj) >= V::CurrentTrue {
                        V::CurrentTrue.disj(v[p])
                    } else {
                        V::CurrentFalse
                    }
                })
                .collect()
        }
        C::S(l, r) => {
            let (a, b) = (values6(t, l), values6(t, r));
            let mut out = vec![V::CurrentFalse; n];
            for p in 0..n {
                let branch = if own(&out, p) >= V::CurrentTrue {
                    V::LocalTrue
                } else {
                    V::LocalFalse
                };
                out[p] = b[p].disj(a[p].conj(branch));
            }
            out
        }
        C::AS(l, r) => {
            let (a, b) = (values6(t, l), values6(t, r));
            let mut out = vec![V::CurrentFalse; n];
            for p in 0..n {
                let branch = if fold(&out, p, V::True, V::conj) >= V::CurrentTrue {
                    V::CurrentTrue
                } else {
                    V::False
                };
                out[p] = b[p].disj(a[p].conj(branch));
            }
            out
        }
        C::ES(l, r) => {
            let (a, b) = (values6(t, l), values6(t, r));
            let mut out = vec![V::CurrentFalse; n];
            for p in 0..n {
                let branch = if fold(&out, p, V::False, V::disj) >= V::CurrentTrue {
                    V::True
                } else {
                    V::CurrentFalse
                };
                out[p] = b[p].disj(a[p].conj(branch));
            }
            out
        }
    }
}

fn zip_with<V: Copy>(a: Vec<V>, b: Vec<V>, f: impl Fn(V, V) -> V) -> Vec<V> {
    a.into_iter().zip(b).map(|(x, y)| f(x, y)).collect()
}
