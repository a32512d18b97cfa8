//! Streaming per-device monitors.
//!
//! A [`MonitorProgram`] is a core formula flattened into a node list, children
//! before parents. Every device runs the same program once per event: it
//! reads the payloads broadcast by the events it heard from (its [`Inbox`]),
//! evaluates all nodes against its own observations, and broadcasts a new
//! [`Payload`]. There is no other per-device state.
//!
//! Payload slots follow `broadcast_layout`, one per temporal node. `Y`/`EY`
//! slots carry the child's current value (what the neighbours will read as
//! "yesterday"); `S`/`AS`/`ES` slots carry the node's own output, which the
//! next round folds over.

mod domain;
mod exec;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::events::DeviceId;
use crate::formula::CoreFormula;
use crate::logic6::TruthValue6;

use domain::Domain;

pub use exec::{resume, run, run_in_order, trace, RunError, Trace, Verdicts};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Two,
    Six,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum NodeKind {
    Const {
        value: bool,
    },
    Atom {
        name: String,
    },
    Not,
    And,
    Or,
    #[serde(rename = "Y")]
    Y,
    #[serde(rename = "EY")]
    EY,
    #[serde(rename = "S")]
    S,
    #[serde(rename = "AS")]
    AS,
    #[serde(rename = "ES")]
    ES,
}

impl NodeKind {
    pub fn arity(&self) -> usize {
        match self {
            NodeKind::Const { .. } | NodeKind::Atom { .. } => 0,
            NodeKind::Not | NodeKind::Y | NodeKind::EY => 1,
            _ => 2,
        }
    }

    /// Nodes whose values travel in payloads.
    pub fn is_temporal(&self) -> bool {
        matches!(
            self,
            NodeKind::Y | NodeKind::EY | NodeKind::S | NodeKind::AS | NodeKind::ES
        )
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeKind::Const { value } => write!(f, "{value}"),
            NodeKind::Atom { name } => f.write_str(name),
            NodeKind::Not => f.write_str("!"),
            NodeKind::And => f.write_str("&"),
            NodeKind::Or => f.write_str("|"),
            NodeKind::Y => f.write_str("Y"),
            NodeKind::EY => f.write_str("EY"),
            NodeKind::S => f.write_str("S"),
            NodeKind::AS => f.write_str("AS"),
            NodeKind::ES => f.write_str("ES"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonitorNode {
    #[serde(flatten)]
    pub kind: NodeKind,
    pub children: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonitorProgram {
    mode: Mode,
    formula: CoreFormula,
    nodes: Vec<MonitorNode>,
    root: usize,
    broadcast_layout: Vec<usize>,
}

impl MonitorProgram {
    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn formula(&self) -> &CoreFormula {
        &self.formula
    }

    pub fn nodes(&self) -> &[MonitorNode] {
        &self.nodes
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn broadcast_layout(&self) -> &[usize] {
        &self.broadcast_layout
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("program serializes")
    }

    /// Payload whose every slot holds the mode's default.
    pub fn default_payload(&self) -> Payload {
        match self.mode {
            Mode::Two => Payload::Two(vec![bool::DEFAULT; self.broadcast_layout.len()]),
            Mode::Six => Payload::Six(vec![TruthValue6::DEFAULT; self.broadcast_layout.len()]),
        }
    }

    fn slot(&self, node: usize) -> usize {
        self.broadcast_layout
            .binary_search(&node)
            .expect("temporal node has a slot")
    }
}

/// Values shared per broadcast: one per layout slot. Serializes as a bare
/// array of booleans or verdict ranks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Payload {
    Two(Vec<bool>),
    Six(Vec<TruthValue6>),
}

impl Payload {
    pub fn mode(&self) -> Mode {
        match self {
            Payload::Two(_) => Mode::Two,
            Payload::Six(_) => Mode::Six,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Payload::Two(v) => v.len(),
            Payload::Six(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Verdict {
    Two(bool),
    Six(TruthValue6),
}

impl Verdict {
    pub fn to_bool(self) -> bool {
        match self {
            Verdict::Two(b) => b,
            Verdict::Six(v) => v.to_bool(),
        }
    }
}

/// Payloads received by one event, keyed by sender. The entry under
/// `device` itself, if any, is the device's own previous broadcast.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Inbox {
    pub device: DeviceId,
    pub entries: BTreeMap<DeviceId, Payload>,
}

impl Inbox {
    pub fn new(device: DeviceId) -> Self {
        Inbox {
            device,
            entries: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StepError {
    #[error("payload from `{sender}` is {found:?}-valued, program is {expected:?}-valued")]
    ModeMismatch {
        sender: DeviceId,
        expected: Mode,
        found: Mode,
    },
    #[error("payload from `{sender}` has {found} slots, layout has {expected}")]
    LayoutMismatch {
        sender: DeviceId,
        expected: usize,
        found: usize,
    },
    #[error("no observation for atom `{0}`")]
    MissingObservation(String),
}

/// One node per formula node, children first.
pub fn compile(f: &CoreFormula, mode: Mode) -> MonitorProgram {
    fn go(f: &CoreFormula, nodes: &mut Vec<MonitorNode>) -> usize {
        use CoreFormula as C;
        let children: Vec<usize> = f.children().into_iter().map(|c| go(c, nodes)).collect();
        let kind = match f {
            C::Const(value) => NodeKind::Const { value: *value },
            C::Atom(name) => NodeKind::Atom { name: name.clone() },
            C::Not(_) => NodeKind::Not,
            C::And(..) => NodeKind::And,
            C::Or(..) => NodeKind::Or,
            C::Y(_) => NodeKind::Y,
            C::EY(_) => NodeKind::EY,
            C::S(..) => NodeKind::S,
            C::AS(..) => NodeKind::AS,
            C::ES(..) => NodeKind::ES,
        };
        nodes.push(MonitorNode { kind, children });
        nodes.len() - 1
    }
    let mut nodes = Vec::new();
    let root = go(f, &mut nodes);
    let broadcast_layout = (0..nodes.len())
        .filter(|&i| nodes[i].kind.is_temporal())
        .collect();
    MonitorProgram {
        mode,
        formula: f.clone(),
        nodes,
        root,
        broadcast_layout,
    }
}

/// Values exchanged per round; the per-round message cost.
pub fn payload_size(p: &MonitorProgram) -> usize {
    p.broadcast_layout.len()
}

/// Runs one round of `p` on one device.
pub fn step(
    p: &MonitorProgram,
    inbox: &Inbox,
    obs: &BTreeMap<String, bool>,
) -> Result<(Verdict, Payload), StepError> {
    for (sender, payload) in &inbox.entries {
        if payload.mode() != p.mode {
            return Err(StepError::ModeMismatch {
                sender: sender.clone(),
                expected: p.mode,
                found: payload.mode(),
            });
        }
        if payload.len() != p.broadcast_layout.len() {
            return Err(StepError::LayoutMismatch {
                sender: sender.clone(),
                expected: p.broadcast_layout.len(),
                found: payload.len(),
            });
        }
    }
    match p.mode {
        Mode::Two => {
            let (v, out) = step_in::<bool>(p, inbox, obs)?;
            Ok((Verdict::Two(v), Payload::Two(out)))
        }
        Mode::Six => {
            let (v, out) = step_in::<TruthValue6>(p, inbox, obs)?;
            Ok((Verdict::Six(v), Payload::Six(out)))
        }
    }
}

fn step_in<D: Domain>(
    p: &MonitorProgram,
    inbox: &Inbox,
    obs: &BTreeMap<String, bool>,
) -> Result<(D, Vec<D>), StepError> {
    let received: Vec<(bool, &[D])> = inbox
        .entries
        .iter()
        .map(|(sender, payload)| {
            let values = D::unwrap(payload).expect("mode checked by caller");
            (*sender == inbox.device, values)
        })
        .collect();
    let own = received
        .iter()
        .find(|(is_self, _)| *is_self)
        .map(|(_, v)| *v);
    // hood folds: every received entry, plus the default standing in for the
    // missing own entry on a device's first round
    let fold = |slot: usize, init: D, op: fn(D, D) -> D| {
        let first = own.is_none().then_some(D::DEFAULT);
        received
            .iter()
            .map(|(_, v)| v[slot])
            .chain(first)
            .fold(init, op)
    };

    let mut value: Vec<D> = Vec::with_capacity(p.nodes.len());
    let mut out = vec![D::DEFAULT; p.broadcast_layout.len()];
    for (i, node) in p.nodes.iter().enumerate() {
        let arg = |k: usize| value[node.children[k]];
        let v = match &node.kind {
            NodeKind::Const { value } => D::constant(*value),
            NodeKind::Atom { name } => match obs.get(name) {
                Some(&b) => D::observed(b),
                None => return Err(StepError::MissingObservation(name.clone())),
            },
            NodeKind::Not => arg(0).not(),
            NodeKind::And => arg(0).and(arg(1)),
            NodeKind::Or => arg(0).or(arg(1)),
            NodeKind::Y => {
                let slot = p.slot(i);
                out[slot] = arg(0);
                D::yesterday(own.map_or(D::DEFAULT, |v| v[slot]), arg(0))
            }
            NodeKind::EY => {
                let slot = p.slot(i);
                out[slot] = arg(0);
                D::exists_yesterday(fold(slot, D::BOTTOM, D::or), arg(0))
            }
            NodeKind::S => {
                let slot = p.slot(i);
                let prev = own.map_or(D::DEFAULT, |v| v[slot]);
                let v = D::since(arg(0), arg(1), prev);
                out[slot] = v;
                v
            }
            NodeKind::AS => {
                let slot = p.slot(i);
                let v = D::all_since(arg(0), arg(1), fold(slot, D::TOP, D::and));
                out[slot] = v;
                v
            }
            NodeKind::ES => {
                let slot = p.slot(i);
                let v = D::exists_since(arg(0), arg(1), fold(slot, D::BOTTOM, D::or));
                out[slot] = v;
                v
            }
        };
        value.push(v);
    }
    Ok((value[p.root], out))
}
