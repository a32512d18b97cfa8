//! Event structures: devices executing rounds, linked by message edges.
//!
//! An edge `e' ~> e` (stored as `e.preds[device(e')] = e'`) means that `e`
//! received the value broadcast at `e'`. Every device's events form a chain
//! `d1 ~> d2 ~> ...` through mandatory self edges; cross-device edges may be
//! missing (lost messages, churn). Causality is the transitive closure of
//! `~>`.

mod scenario;
mod validate;

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashMap, VecDeque};
use std::fmt;

use serde::de::{MapAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize};
use thiserror::Error;

pub use scenario::{
    device_name, extend, generate, AtomModel, Churn, ConfigError, Connectivity, DeviceSpec,
    ScenarioConfig, ScenarioError,
};
pub use validate::ValidationError;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DeviceId(pub String);

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EventId(pub String);

impl DeviceId {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl EventId {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// The conventional id `<device><seq>`.
    pub fn for_round(device: &DeviceId, seq: u32) -> Self {
        EventId(format!("{}{}", device.0, seq))
    }
}

impl fmt::Display for DeviceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for EventId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for DeviceId {
    fn from(s: &str) -> Self {
        DeviceId(s.to_string())
    }
}

impl From<&str> for EventId {
    fn from(s: &str) -> Self {
        EventId(s.to_string())
    }
}

/// One round of one device.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Event {
    pub id: EventId,
    pub device: DeviceId,
    /// 1-based round index on `device`.
    pub seq: u32,
    /// Latest event received from each sender, self edge included.
    #[serde(default, deserialize_with = "unique_keys")]
    pub preds: BTreeMap<DeviceId, EventId>,
    #[serde(default, deserialize_with = "unique_keys")]
    pub obs: BTreeMap<String, bool>,
}

// serde_json silently keeps the last of repeated keys; a repeated sender in
// `preds` would hide a second edge, so reject it at load time.
fn unique_keys<'de, D, K, V>(deserializer: D) -> Result<BTreeMap<K, V>, D::Error>
where
    D: Deserializer<'de>,
    K: Deserialize<'de> + Ord + fmt::Debug,
    V: Deserialize<'de>,
{
    struct UniqueVisitor<K, V>(std::marker::PhantomData<(K, V)>);

    impl<'de, K, V> Visitor<'de> for UniqueVisitor<K, V>
    where
        K: Deserialize<'de> + Ord + fmt::Debug,
        V: Deserialize<'de>,
    {
        type Value = BTreeMap<K, V>;

        fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
            f.write_str("a map without repeated keys")
        }

        fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> Result<Self::Value, A::Error> {
            let mut out = BTreeMap::new();
            while let Some((k, v)) = access.next_entry::<K, V>()? {
                if out.contains_key(&k) {
                    return Err(serde::de::Error::custom(format!("repeated key {k:?}")));
                }
                out.insert(k, v);
            }
            Ok(out)
        }
    }

    deserializer.deserialize_map(UniqueVisitor(std::marker::PhantomData))
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EventError {
    #[error("unknown event `{0}`")]
    UnknownEvent(EventId),
    #[error("event structure contains a cycle")]
    Cyclic,
}

/// Rejected structure, with every violated invariant.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("invalid event structure: {}", .0.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; "))]
pub struct InvalidStructure(pub Vec<ValidationError>);

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStructure {
    devices: Vec<DeviceId>,
    atoms: Vec<String>,
    events: Vec<Event>,
}

impl From<RawStructure> for EventStructure {
    fn from(raw: RawStructure) -> Self {
        EventStructure::new(raw.devices, raw.atoms, raw.events)
    }
}

/// A finite event structure. Immutable once built.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(from = "RawStructure")]
pub struct EventStructure {
    devices: Vec<DeviceId>,
    atoms: Vec<String>,
    events: Vec<Event>,
    #[serde(skip)]
    index: HashMap<EventId, usize>,
}

impl PartialEq for EventStructure {
    fn eq(&self, other: &Self) -> bool {
        self.devices == other.devices && self.atoms == other.atoms && self.events == other.events
    }
}

impl Eq for EventStructure {}

impl EventStructure {
    /// Builds a structure without checking it; see [`EventStructure::validate`].
    pub fn new(devices: Vec<DeviceId>, atoms: Vec<String>, events: Vec<Event>) -> Self {
        let mut index = HashMap::with_capacity(events.len());
        for (i, e) in events.iter().enumerate() {
            index.entry(e.id.clone()).or_insert(i);
        }
        EventStructure {
            devices,
            atoms,
            events,
            index,
        }
    }

    pub fn empty(atoms: Vec<String>) -> Self {
        Self::new(Vec::new(), atoms, Vec::new())
    }

    pub fn devices(&self) -> &[DeviceId] {
        &self.devices
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn event(&self, id: &EventId) -> Option<&Event> {
        self.index.get(id).map(|&i| &self.events[i])
    }

    pub(crate) fn index_of(&self, id: &EventId) -> Option<usize> {
        self.index.get(id).copied()
    }

    fn get(&self, id: &EventId) -> Result<&Event, EventError> {
        self.event(id)
            .ok_or_else(|| EventError::UnknownEvent(id.clone()))
    }

    /// Number of `~>` edges, self edges included.
    pub fn edge_count(&self) -> usize {
        self.events.iter().map(|e| e.preds.len()).sum()
    }

    /// Every event after all of its predecessors. Ties are broken by
    /// `(seq, device, id)`, so the order is reproducible.
    pub fn topological_order(&self) -> Result<Vec<EventId>, EventError> {
        Ok(self
            .topological_indices()?
            .into_iter()
            .map(|i| self.events[i].id.clone())
            .collect())
    }

    pub(crate) fn topological_indices(&self) -> Result<Vec<usize>, EventError> {
        let n = self.events.len();
        let mut indegree = vec![0usize; n];
        let mut succs: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, e) in self.events.iter().enumerate() {
            for p in e.preds.values() {
                if let Some(j) = self.index_of(p) {
                    indegree[i] += 1;
                    succs[j].push(i);
                }
            }
        }
        let key = |i: usize| {
            let e = &self.events[i];
            Reverse((e.seq, e.device.clone(), e.id.clone(), i))
        };
        let mut ready: BinaryHeap<_> = (0..n).filter(|&i| indegree[i] == 0).map(key).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(Reverse((_, _, _, i))) = ready.pop() {
            order.push(i);
            for &s in &succs[i] {
                indegree[s] -= 1;
                if indegree[s] == 0 {
                    ready.push(key(s));
                }
            }
        }
        if order.len() == n {
            Ok(order)
        } else {
            Err(EventError::Cyclic)
        }
    }

    /// All events causally before `id`, excluding `id` itself.
    pub fn causal_past(&self, id: &EventId) -> Result<BTreeSet<EventId>, EventError> {
        let start = self.get(id)?;
        let mut seen = BTreeSet::new();
        let mut queue: VecDeque<&Event> = VecDeque::from([start]);
        while let Some(e) = queue.pop_front() {
            for p in e.preds.values() {
                if let Some(pe) = self.event(p) {
                    if seen.insert(p.clone()) {
                        queue.push_back(pe);
                    }
                }
            }
        }
        seen.remove(id);
        Ok(seen)
    }

    /// The previous event of the same device, if any.
    pub fn device_predecessor(&self, id: &EventId) -> Result<Option<EventId>, EventError> {
        let e = self.get(id)?;
        Ok(e.preds.get(&e.device).cloned())
    }

    /// True if `other` keeps every event of `self` unchanged (same device,
    /// round, incoming edges and observations), and hence adds no edge into
    /// an old event.
    pub fn is_extension_of(&self, base: &EventStructure) -> bool {
        base.atoms.iter().all(|a| self.atoms.contains(a))
            && base.devices.iter().all(|d| self.devices.contains(d))
            && base
                .events
                .iter()
                .all(|e| self.event(&e.id).is_some_and(|mine| mine == e))
    }

    /// Validated, index-based view used by the evaluators.
    pub fn topology(&self) -> Result<Topology<'_>, InvalidStructure> {
        self.validate().map_err(InvalidStructure)?;
        let order = self
            .topological_indices()
            .expect("validated structures are acyclic");
        let mut position = vec![0; order.len()];
        for (pos, &i) in order.iter().enumerate() {
            position[i] = pos;
        }
        let mut preds = Vec::with_capacity(order.len());
        let mut device_pred = Vec::with_capacity(order.len());
        for &i in &order {
            let e = &self.events[i];
            preds.push(
                e.preds
                    .iter()
                    .map(|(d, p)| (d.clone(), position[self.index[p]]))
                    .collect(),
            );
            device_pred.push(e.preds.get(&e.device).map(|p| position[self.index[p]]));
        }
        Ok(Topology {
            structure: self,
            order,
            position,
            preds,
            device_pred,
        })
    }
}

/// True if `extended` extends `base`: see [`EventStructure::is_extension_of`].
pub fn is_extension(base: &EventStructure, extended: &EventStructure) -> bool {
    extended.is_extension_of(base)
}

/// A validated structure laid out in topological order. Positions index
/// events in that order.
#[derive(Clone, Debug)]
pub struct Topology<'a> {
    structure: &'a EventStructure,
    order: Vec<usize>,
    position: Vec<usize>,
    preds: Vec<Vec<(DeviceId, usize)>>,
    device_pred: Vec<Option<usize>>,
}

impl<'a> Topology<'a> {
    pub fn structure(&self) -> &'a EventStructure {
        self.structure
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn event(&self, pos: usize) -> &'a Event {
        &self.structure.events[self.order[pos]]
    }

    pub fn ids(&self) -> impl Iterator<Item = &'a EventId> + '_ {
        self.order.iter().map(|&i| &self.structure.events[i].id)
    }

    /// Positions of all message predecessors (self edge included), keyed by
    /// sender device.
    pub fn preds(&self, pos: usize) -> &[(DeviceId, usize)] {
        &self.preds[pos]
    }

    pub fn device_pred(&self, pos: usize) -> Option<usize> {
        self.device_pred[pos]
    }

    /// Position of `id`, if present.
    pub fn position(&self, id: &EventId) -> Option<usize> {
        self.structure.index_of(id).map(|i| self.position[i])
    }

    /// For every position, the positions strictly causally after it.
    pub fn causal_futures(&self) -> Vec<BTreeSet<usize>> {
        let n = self.len();
        let mut futures: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
        for pos in (0..n).rev() {
            for &(_, p) in &self.preds[pos] {
                let mut inherited = futures[pos].clone();
                inherited.insert(pos);
                futures[p].extend(inherited);
            }
        }
        futures
    }
}
