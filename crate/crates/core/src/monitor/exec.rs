//! Reference executor: steps every event once, feeding it the payloads its
//! predecessors broadcast.

use std::collections::{BTreeMap, HashMap};

use indexmap::IndexMap;
use serde::Serialize;
use thiserror::Error;

use crate::events::{EventId, EventStructure, InvalidStructure};
use crate::oracle::{VerdictMap, VerdictMap2, VerdictMap6};

use super::{step, Inbox, Mode, MonitorProgram, Payload, StepError, Verdict};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RunError {
    #[error(transparent)]
    InvalidStructure(#[from] InvalidStructure),
    #[error("atom `{0}` is not observed by the event structure")]
    UnknownAtom(String),
    #[error("not a linearization of the structure: {0}")]
    NotALinearization(String),
    #[error("retained event `{0}` is missing from the structure")]
    NotAnExtension(EventId),
    #[error("retained payloads are {found:?}-valued, program is {expected:?}-valued")]
    ModeMismatch { expected: Mode, found: Mode },
    #[error("at event `{event}`: {source}")]
    Step {
        event: EventId,
        #[source]
        source: StepError,
    },
}

/// Root verdicts per event, in the structure's topological order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Verdicts {
    Two(VerdictMap2),
    Six(VerdictMap6),
}

impl Verdicts {
    pub fn mode(&self) -> Mode {
        match self {
            Verdicts::Two(_) => Mode::Two,
            Verdicts::Six(_) => Mode::Six,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Verdicts::Two(m) => m.len(),
            Verdicts::Six(m) => m.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, id: &EventId) -> Option<Verdict> {
        match self {
            Verdicts::Two(m) => m.get(id).map(Verdict::Two),
            Verdicts::Six(m) => m.get(id).map(Verdict::Six),
        }
    }

    pub fn iter(&self) -> Box<dyn Iterator<Item = (&EventId, Verdict)> + '_> {
        match self {
            Verdicts::Two(m) => Box::new(m.iter().map(|(k, v)| (k, Verdict::Two(v)))),
            Verdicts::Six(m) => Box::new(m.iter().map(|(k, v)| (k, Verdict::Six(v)))),
        }
    }

    /// Two-valued view.
    pub fn collapse(&self) -> VerdictMap2 {
        match self {
            Verdicts::Two(m) => m.clone(),
            Verdicts::Six(m) => m.collapse(),
        }
    }

    pub fn as_two(&self) -> Option<&VerdictMap2> {
        match self {
            Verdicts::Two(m) => Some(m),
            Verdicts::Six(_) => None,
        }
    }

    pub fn as_six(&self) -> Option<&VerdictMap6> {
        match self {
            Verdicts::Six(m) => Some(m),
            Verdicts::Two(_) => None,
        }
    }
}

/// Everything a run produced: verdicts and the payload each event broadcast.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Trace {
    verdicts: Verdicts,
    payloads: IndexMap<EventId, Payload>,
}

impl Trace {
    pub fn verdicts(&self) -> &Verdicts {
        &self.verdicts
    }

    pub fn into_verdicts(self) -> Verdicts {
        self.verdicts
    }

    pub fn payload(&self, id: &EventId) -> Option<&Payload> {
        self.payloads.get(id)
    }

    pub fn payloads(&self) -> impl Iterator<Item = (&EventId, &Payload)> + '_ {
        self.payloads.iter()
    }
}

/// Runs `p` over `e` in topological order.
pub fn run(p: &MonitorProgram, e: &EventStructure) -> Result<Verdicts, RunError> {
    trace(p, e).map(Trace::into_verdicts)
}

/// Like [`run`], keeping the payloads.
pub fn trace(p: &MonitorProgram, e: &EventStructure) -> Result<Trace, RunError> {
    let order: Vec<EventId> = e.topology()?.ids().cloned().collect();
    execute(p, e, &order, None)
}

/// Runs `p` visiting events in the given order, which must respect causality.
pub fn run_in_order(
    p: &MonitorProgram,
    e: &EventStructure,
    order: &[EventId],
) -> Result<Verdicts, RunError> {
    execute(p, e, order, None).map(Trace::into_verdicts)
}

/// Continues an earlier run on an extension of its structure: events already
/// in `previous` keep their verdicts and payloads, only new events are
/// stepped.
pub fn resume(
    p: &MonitorProgram,
    extended: &EventStructure,
    previous: &Trace,
) -> Result<Trace, RunError> {
    if previous.verdicts.mode() != p.mode() {
        return Err(RunError::ModeMismatch {
            expected: p.mode(),
            found: previous.verdicts.mode(),
        });
    }
    let order: Vec<EventId> = extended.topology()?.ids().cloned().collect();
    if let Some(id) = previous
        .payloads
        .keys()
        .find(|id| extended.event(id).is_none())
    {
        return Err(RunError::NotAnExtension(id.clone()));
    }
    execute(p, extended, &order, Some(previous))
}

fn execute(
    p: &MonitorProgram,
    e: &EventStructure,
    order: &[EventId],
    retained: Option<&Trace>,
) -> Result<Trace, RunError> {
    let canonical = e.topology()?;
    if let Some(missing) = p
        .formula()
        .atoms()
        .into_iter()
        .find(|a| !e.atoms().contains(a))
    {
        return Err(RunError::UnknownAtom(missing));
    }
    if order.len() != e.len() {
        return Err(RunError::NotALinearization(format!(
            "{} events listed, structure has {}",
            order.len(),
            e.len()
        )));
    }

    let mut payloads: HashMap<&EventId, Payload> = HashMap::with_capacity(e.len());
    let mut verdicts: HashMap<&EventId, Verdict> = HashMap::with_capacity(e.len());
    for id in order {
        let event = e
            .event(id)
            .ok_or_else(|| RunError::NotALinearization(format!("unknown event `{id}`")))?;
        if payloads.contains_key(&event.id) {
            return Err(RunError::NotALinearization(format!("`{id}` listed twice")));
        }
        let kept = retained.and_then(|t| Some((t.verdicts.get(id)?, t.payloads.get(id)?)));
        let (verdict, payload) = match kept {
            Some((v, payload)) => (v, payload.clone()),
            None => {
                let mut inbox = Inbox::new(event.device.clone());
                for (sender, pred) in &event.preds {
                    let payload = payloads.get(pred).ok_or_else(|| {
                        RunError::NotALinearization(format!("`{id}` comes before `{pred}`"))
                    })?;
                    inbox.entries.insert(sender.clone(), payload.clone());
                }
                step(p, &inbox, &event.obs).map_err(|source| RunError::Step {
                    event: id.clone(),
                    source,
                })?
            }
        };
        verdicts.insert(&event.id, verdict);
        payloads.insert(&event.id, payload);
    }

    let ids: Vec<&EventId> = canonical.ids().collect();
    let formula = p.formula().clone();
    let verdicts = match p.mode() {
        Mode::Two => Verdicts::Two(VerdictMap::new(
            formula,
            ids.iter()
                .map(|id| match verdicts[*id] {
                    Verdict::Two(b) => ((*id).clone(), b),
                    Verdict::Six(v) => ((*id).clone(), v.to_bool()),
                })
                .collect(),
        )),
        Mode::Six => Verdicts::Six(VerdictMap::new(
            formula,
            ids.iter()
                .map(|id| match verdicts[*id] {
                    Verdict::Six(v) => ((*id).clone(), v),
                    Verdict::Two(_) => unreachable!("six-valued program"),
                })
                .collect(),
        )),
    };
    let mut payloads: BTreeMap<&EventId, Payload> = payloads.into_iter().collect();
    let payloads = ids
        .iter()
        .map(|id| {
            (
                (*id).clone(),
                payloads.remove(id).expect("every event stepped"),
            )
        })
        .collect();
    Ok(Trace { verdicts, payloads })
}
