use std::collections::{BTreeMap, BTreeSet, HashSet};

use thiserror::Error;

use super::{DeviceId, EventId, EventStructure};
use crate::formula::is_atom_name;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ValidationError {
    #[error("duplicate device `{0}`")]
    DuplicateDevice(DeviceId),
    #[error("invalid or duplicate atom `{0}`")]
    BadAtom(String),
    #[error("duplicate event id `{0}`")]
    DuplicateEvent(EventId),
    #[error("event `{event}` belongs to undeclared device `{device}`")]
    UnknownDevice { event: EventId, device: DeviceId },
    #[error("broken chain on device `{device}`: {detail}")]
    BrokenChain { device: DeviceId, detail: String },
    #[error("event `{event}` has self edge {found:?}, expected {expected:?}")]
    SelfEdge {
        event: EventId,
        expected: Option<EventId>,
        found: Option<EventId>,
    },
    #[error("event `{event}` receives from unknown event `{target}`")]
    DanglingEdge { event: EventId, target: EventId },
    #[error("event `{event}` lists `{target}` under sender `{key}`")]
    SenderMismatch {
        event: EventId,
        key: DeviceId,
        target: EventId,
    },
    #[error("event `{event}` has more than one incoming edge from device `{device}`")]
    DuplicateSender { event: EventId, device: DeviceId },
    #[error("cycle through {}", .0.iter().map(|e| e.0.as_str()).collect::<Vec<_>>().join(" ~> "))]
    Cycle(Vec<EventId>),
    #[error("event `{event}` has no observation for {missing:?}")]
    PartialObs {
        event: EventId,
        missing: Vec<String>,
    },
    #[error("event `{event}` observes undeclared atom `{atom}`")]
    UnknownAtom { event: EventId, atom: String },
}

impl ValidationError {
    /// Short category name.
    pub fn kind(&self) -> &'static str {
        match self {
            ValidationError::DuplicateDevice(_) => "duplicate device",
            ValidationError::BadAtom(_) => "bad atom",
            ValidationError::DuplicateEvent(_) => "duplicate event",
            ValidationError::UnknownDevice { .. } => "unknown device",
            ValidationError::BrokenChain { .. } => "broken chain",
            ValidationError::SelfEdge { .. } => "self edge",
            ValidationError::DanglingEdge { .. } => "dangling edge",
            ValidationError::SenderMismatch { .. } => "sender mismatch",
            ValidationError::DuplicateSender { .. } => "duplicate sender",
            ValidationError::Cycle(_) => "cycle",
            ValidationError::PartialObs { .. } => "partial obs",
            ValidationError::UnknownAtom { .. } => "unknown atom",
        }
    }
}

impl EventStructure {
    /// Checks every structural invariant and returns all violations.
    pub fn validate(&self) -> Result<(), Vec<ValidationError>> {
        let mut errors = Vec::new();

        let mut devices = HashSet::new();
        for d in &self.devices {
            if !devices.insert(d) {
                errors.push(ValidationError::DuplicateDevice(d.clone()));
            }
        }
        let mut atoms = BTreeSet::new();
        for a in &self.atoms {
            if !is_atom_name(a) || !atoms.insert(a.as_str()) {
                errors.push(ValidationError::BadAtom(a.clone()));
            }
        }

        let mut ids = HashSet::new();
        let mut chains: BTreeMap<&DeviceId, BTreeMap<u32, &EventId>> = BTreeMap::new();
        for e in &self.events {
            if !ids.insert(&e.id) {
                errors.push(ValidationError::DuplicateEvent(e.id.clone()));
            }
            if !devices.contains(&e.device) {
                errors.push(ValidationError::UnknownDevice {
                    event: e.id.clone(),
                    device: e.device.clone(),
                });
            }
            let chain = chains.entry(&e.device).or_default();
            if chain.insert(e.seq, &e.id).is_some() {
                errors.push(ValidationError::BrokenChain {
                    device: e.device.clone(),
                    detail: format!("round {} occurs twice", e.seq),
                });
            }
        }
        for (device, chain) in &chains {
            for (expected, seq) in (1u32..).zip(chain.keys()) {
                if *seq != expected {
                    errors.push(ValidationError::BrokenChain {
                        device: (*device).clone(),
                        detail: format!("round {expected} missing"),
                    });
                    break;
                }
            }
        }

        for e in &self.events {
            let mut senders = BTreeSet::new();
            for (key, target) in &e.preds {
                match self.event(target) {
                    None => errors.push(ValidationError::DanglingEdge {
                        event: e.id.clone(),
                        target: target.clone(),
                    }),
                    Some(t) => {
                        if t.device != *key {
                            errors.push(ValidationError::SenderMismatch {
                                event: e.id.clone(),
                                key: key.clone(),
                                target: target.clone(),
                            });
                        }
                        if !senders.insert(&t.device) {
                            errors.push(ValidationError::DuplicateSender {
                                event: e.id.clone(),
                                device: t.device.clone(),
                            });
                        }
                    }
                }
            }

            let expected = if e.seq > 1 {
                chains
                    .get(&e.device)
                    .and_then(|c| c.get(&(e.seq - 1)))
                    .map(|id| (*id).clone())
            } else {
                None
            };
            let found = e.preds.get(&e.device).cloned();
            if found != expected || (e.seq > 1 && expected.is_none()) {
                errors.push(ValidationError::SelfEdge {
                    event: e.id.clone(),
                    expected,
                    found,
                });
            }

            let missing: Vec<String> = self
                .atoms
                .iter()
                .filter(|a| !e.obs.contains_key(*a))
                .cloned()
                .collect();
            if !missing.is_empty() {
                errors.push(ValidationError::PartialObs {
                    event: e.id.clone(),
                    missing,
                });
            }
            for a in e.obs.keys() {
                if !atoms.contains(a.as_str()) {
                    errors.push(ValidationError::UnknownAtom {
                        event: e.id.clone(),
                        atom: a.clone(),
                    });
                }
            }
        }

        if let Some(cycle) = self.find_cycle() {
            errors.push(ValidationError::Cycle(cycle));
        }

        if errors.is_empty() {
            Ok(())
        } else {
            Err(errors)
        }
    }

    /// A witness cycle `e1 ~> e2 ~> ... ~> e1` (listed without repeating e1).
    fn find_cycle(&self) -> Option<Vec<EventId>> {
        if self.topological_indices().is_ok() {
            return None;
        }
        // Peel off every event not on or behind a cycle, then walk
        // predecessors inside the remainder until an event repeats.
        let n = self.events.len();
        let mut removed = vec![false; n];
        loop {
            let mut changed = false;
            for i in 0..n {
                if removed[i] {
                    continue;
                }
                let blocked = self.events[i]
                    .preds
                    .values()
                    .filter_map(|p| self.index_of(p))
                    .any(|j| !removed[j]);
                if !blocked {
                    removed[i] = true;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let start = (0..n).find(|&i| !removed[i])?;
        let mut path = vec![start];
        let mut cur = start;
        loop {
            let next = self.events[cur]
                .preds
                .values()
                .filter_map(|p| self.index_of(p))
                .find(|&j| !removed[j])?;
            if let Some(at) = path.iter().position(|&x| x == next) {
                // path follows edges backwards; reverse to read in ~> direction
                let mut cycle: Vec<EventId> = path[at..]
                    .iter()
                    .map(|&i| self.events[i].id.clone())
                    .collect();
                cycle.reverse();
                return Some(cycle);
            }
            path.push(next);
            cur = next;
        }
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::super::tests::bk;
    use super::super::Event;
    use super::*;

    fn ev(id: &str, device: &str, seq: u32, preds: &[(&str, &str)]) -> Event {
        Event {
            id: id.into(),
            device: device.into(),
            seq,
            preds: preds
                .iter()
                .map(|(d, e)| ((*d).into(), (*e).into()))
                .collect(),
            obs: BTreeMap::new(),
        }
    }

    fn structure(devices: &[&str], events: Vec<Event>) -> EventStructure {
        EventStructure::new(
            devices.iter().map(|d| (*d).into()).collect(),
            vec![],
            events,
        )
    }

    #[test]
    fn bk_fixture_is_valid() {
        assert_eq!(bk().validate(), Ok(()));
    }

    #[test]
    fn two_event_cycle() {
        let e = structure(
            &["A", "B"],
            vec![
                ev("A1", "A", 1, &[("B", "B1")]),
                ev("B1", "B", 1, &[("A", "A1")]),
            ],
        );
        let errs = e.validate().unwrap_err();
        let cycle = errs
            .iter()
            .find_map(|err| match err {
                ValidationError::Cycle(c) => Some(c.clone()),
                _ => None,
            })
            .expect("cycle reported");
        let mut sorted = cycle.clone();
        sorted.sort();
        assert_eq!(sorted, vec![EventId::from("A1"), EventId::from("B1")]);
        assert_eq!(e.topological_order(), Err(super::super::EventError::Cyclic));
    }

    #[test]
    fn missing_round() {
        let e = structure(
            &["A"],
            vec![ev("A1", "A", 1, &[]), ev("A3", "A", 3, &[("A", "A1")])],
        );
        let errs = e.validate().unwrap_err();
        assert!(errs.iter().any(|x| x.kind() == "broken chain"), "{errs:?}");
    }

    #[test]
    fn self_edge_rules() {
        // seq 2 without its device predecessor
        let e = structure(&["A"], vec![ev("A1", "A", 1, &[]), ev("A2", "A", 2, &[])]);
        assert!(e
            .validate()
            .unwrap_err()
            .iter()
            .any(|x| x.kind() == "self edge"));
        // first round with a self entry
        let e = structure(&["A"], vec![ev("A1", "A", 1, &[("A", "A1")])]);
        assert!(e
            .validate()
            .unwrap_err()
            .iter()
            .any(|x| x.kind() == "self edge"));
    }

    #[test]
    fn edges_must_name_their_sender() {
        let e = structure(
            &["A", "B"],
            vec![
                ev("A1", "A", 1, &[]),
                ev("B1", "B", 1, &[]),
                ev("B2", "B", 2, &[("B", "B1"), ("C", "A1")]),
            ],
        );
        let kinds: Vec<_> = e.validate().unwrap_err().iter().map(|x| x.kind()).collect();
        assert!(kinds.contains(&"sender mismatch"), "{kinds:?}");

        let e = structure(
            &["A", "B"],
            vec![
                ev("A1", "A", 1, &[]),
                ev("A2", "A", 2, &[("A", "A1")]),
                ev("B1", "B", 1, &[("A", "A1"), ("X", "A2")]),
            ],
        );
        let kinds: Vec<_> = e.validate().unwrap_err().iter().map(|x| x.kind()).collect();
        assert!(kinds.contains(&"duplicate sender"), "{kinds:?}");
    }

    #[test]
    fn dangling_edges_and_observations() {
        let mut a1 = ev("A1", "A", 1, &[]);
        a1.obs.insert("zz".into(), true);
        let e = EventStructure::new(
            vec!["A".into()],
            vec!["q".into()],
            vec![a1, ev("A2", "A", 2, &[("A", "A1"), ("B", "B7")])],
        );
        let kinds: Vec<_> = e.validate().unwrap_err().iter().map(|x| x.kind()).collect();
        assert!(kinds.contains(&"dangling edge"));
        assert!(kinds.contains(&"partial obs"));
        assert!(kinds.contains(&"unknown atom"));
    }

    #[test]
    fn undeclared_device_and_duplicates() {
        let e = structure(
            &["A", "A"],
            vec![ev("B1", "B", 1, &[]), ev("B1", "B", 1, &[])],
        );
        let kinds: Vec<_> = e.validate().unwrap_err().iter().map(|x| x.kind()).collect();
        assert!(kinds.contains(&"duplicate device"));
        assert!(kinds.contains(&"duplicate event"));
        assert!(kinds.contains(&"unknown device"));
    }
}
