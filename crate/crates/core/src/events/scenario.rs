//! Seeded generation of event structures from dynamic-network scenarios.
//!
//! Rounds are global. In round `r` every alive device executes one event.
//! That event always receives its own previous event, and receives the
//! round `r - 1` event of each neighbour that is connected to it in round
//! `r` and alive in both rounds, unless the message is dropped.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{DeviceId, Event, EventId, EventStructure, InvalidStructure};
use crate::formula::is_atom_name;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DeviceSpec {
    /// `n` devices named `A`, `B`, ..., `Z`, `AA`, ...
    Count(usize),
    Ids(Vec<DeviceId>),
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Connectivity {
    #[default]
    Complete,
    /// Every pair of devices is linked in a round with probability `p`,
    /// independently per round.
    Random { p: f64 },
    /// Devices linked to their neighbours in declaration order.
    Chain,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Churn {
    #[serde(default = "one")]
    pub join_round: u32,
    /// Last round the device is present; defaults to the final round.
    #[serde(default)]
    pub leave_round: Option<u32>,
}

fn one() -> u32 {
    1
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AtomModel {
    Const(bool),
    Bernoulli {
        p: f64,
    },
    /// `value` at the given device and round, `!value` everywhere else.
    Pulse {
        device: DeviceId,
        round: u32,
        #[serde(default = "yes")]
        value: bool,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub devices: DeviceSpec,
    pub rounds: u32,
    #[serde(default)]
    pub connectivity: Connectivity,
    #[serde(default)]
    pub drop_prob: f64,
    #[serde(default)]
    pub churn: BTreeMap<DeviceId, Churn>,
    #[serde(default)]
    pub atom_models: BTreeMap<String, AtomModel>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("rounds must be at least 1")]
    NoRounds,
    #[error("at least one device is required")]
    NoDevices,
    #[error("invalid device id `{0}` (letters and `_` only)")]
    BadDevice(String),
    #[error("duplicate device `{0}`")]
    DuplicateDevice(DeviceId),
    #[error("{what} = {value} is not a probability")]
    BadProbability { what: String, value: f64 },
    #[error("churn refers to unknown device `{0}`")]
    UnknownChurnDevice(DeviceId),
    #[error("churn for `{device}` needs 1 <= join_round <= leave_round <= rounds")]
    BadChurn { device: DeviceId },
    #[error("invalid atom name `{0}`")]
    BadAtom(String),
    #[error("pulse for atom `{atom}` targets missing device or round")]
    BadPulse { atom: String },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScenarioError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    InvalidBase(#[from] InvalidStructure),
    #[error("atom models {config:?} do not match the structure's atoms {structure:?}")]
    AtomMismatch {
        config: Vec<String>,
        structure: Vec<String>,
    },
    #[error("generated event id `{0}` collides with an existing event")]
    IdCollision(EventId),
}

/// Spreadsheet-style device names: `A`..`Z`, `AA`, `AB`, ...
pub fn device_name(mut i: usize) -> DeviceId {
    let mut out = Vec::new();
    loop {
        out.push(b'A' + (i % 26) as u8);
        if i < 26 {
            break;
        }
        i = i / 26 - 1;
    }
    out.reverse();
    DeviceId(String::from_utf8(out).expect("ascii"))
}

fn check_probability(what: &str, value: f64) -> Result<(), ConfigError> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(ConfigError::BadProbability {
            what: what.to_string(),
            value,
        })
    }
}

impl ScenarioConfig {
    pub fn device_ids(&self) -> Vec<DeviceId> {
        match &self.devices {
            DeviceSpec::Count(n) => (0..*n).map(device_name).collect(),
            DeviceSpec::Ids(ids) => ids.clone(),
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.rounds == 0 {
            return Err(ConfigError::NoRounds);
        }
        let devices = self.device_ids();
        if devices.is_empty() {
            return Err(ConfigError::NoDevices);
        }
        let mut seen = BTreeSet::new();
        for d in &devices {
            let ok = !d.0.is_empty() && d.0.chars().all(|c| c.is_ascii_alphabetic() || c == '_');
            if !ok {
                return Err(ConfigError::BadDevice(d.0.clone()));
            }
            if !seen.insert(d) {
                return Err(ConfigError::DuplicateDevice(d.clone()));
            }
        }
        if let Connectivity::Random { p } = self.connectivity {
            check_probability("connectivity.random.p", p)?;
        }
        check_probability("drop_prob", self.drop_prob)?;
        for (device, churn) in &self.churn {
            if !seen.contains(device) {
                return Err(ConfigError::UnknownChurnDevice(device.clone()));
            }
            let leave = churn.leave_round.unwrap_or(self.rounds);
            if churn.join_round < 1 || churn.join_round > leave || leave > self.rounds {
                return Err(ConfigError::BadChurn {
                    device: device.clone(),
                });
            }
        }
        for (atom, model) in &self.atom_models {
            if !is_atom_name(atom) {
                return Err(ConfigError::BadAtom(atom.clone()));
            }
            match model {
                AtomModel::Const(_) => {}
                AtomModel::Bernoulli { p } => check_probability(&format!("{atom}.p"), *p)?,
                AtomModel::Pulse { device, round, .. } => {
                    if !seen.contains(device) || *round < 1 || *round > self.rounds {
                        return Err(ConfigError::BadPulse { atom: atom.clone() });
                    }
                }
            }
        }
        Ok(())
    }

    fn alive(&self, device: &DeviceId, round: u32) -> bool {
        match self.churn.get(device) {
            None => true,
            Some(c) => c.join_round <= round && round <= c.leave_round.unwrap_or(u32::MAX),
        }
    }
}

/// Builds a fresh structure with `cfg.rounds` rounds.
pub fn generate(cfg: &ScenarioConfig, seed: u64) -> Result<EventStructure, ConfigError> {
    cfg.validate()?;
    let base = EventStructure::empty(cfg.atom_models.keys().cloned().collect());
    match grow(&base, cfg, seed, cfg.rounds) {
        Ok(e) => Ok(e),
        Err(ScenarioError::Config(c)) => Err(c),
        Err(other) => unreachable!("fresh generation cannot fail with {other}"),
    }
}

/// Appends `extra_rounds` rounds to `base`. Round numbers in `cfg` (churn,
/// pulses) count from the first appended round; the last event of each
/// device in `base` acts as round zero.
pub fn extend(
    base: &EventStructure,
    cfg: &ScenarioConfig,
    seed: u64,
    extra_rounds: u32,
) -> Result<EventStructure, ScenarioError> {
    cfg.validate()?;
    base.validate().map_err(InvalidStructure)?;
    let structure_atoms: BTreeSet<&String> = base.atoms().iter().collect();
    let config_atoms: BTreeSet<&String> = cfg.atom_models.keys().collect();
    if structure_atoms != config_atoms {
        return Err(ScenarioError::AtomMismatch {
            config: cfg.atom_models.keys().cloned().collect(),
            structure: base.atoms().to_vec(),
        });
    }
    grow(base, cfg, seed, extra_rounds)
}

fn grow(
    base: &EventStructure,
    cfg: &ScenarioConfig,
    seed: u64,
    rounds: u32,
) -> Result<EventStructure, ScenarioError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let configured = cfg.device_ids();

    let mut devices = base.devices().to_vec();
    for d in &configured {
        if !devices.contains(d) {
            devices.push(d.clone());
        }
    }

    let mut last: BTreeMap<DeviceId, (EventId, u32)> = BTreeMap::new();
    for e in base.events() {
        let slot = last.entry(e.device.clone()).or_insert((e.id.clone(), 0));
        if e.seq >= slot.1 {
            *slot = (e.id.clone(), e.seq);
        }
    }
    let mut previous: BTreeMap<DeviceId, EventId> = last
        .iter()
        .map(|(d, (id, _))| (d.clone(), id.clone()))
        .collect();

    let mut events = base.events().to_vec();
    let mut taken: BTreeSet<EventId> = events.iter().map(|e| e.id.clone()).collect();

    for round in 1..=rounds {
        let links = sample_links(cfg, &devices, &mut rng);
        let alive: Vec<&DeviceId> = devices
            .iter()
            .filter(|d| configured.contains(d) && cfg.alive(d, round))
            .collect();
        let mut current = BTreeMap::new();
        for &device in &alive {
            let seq = last.get(device).map_or(1, |(_, s)| s + 1);
            let id = EventId::for_round(device, seq);
            if !taken.insert(id.clone()) {
                return Err(ScenarioError::IdCollision(id));
            }
            let mut preds = BTreeMap::new();
            if let Some((own, _)) = last.get(device) {
                preds.insert(device.clone(), own.clone());
            }
            for &other in &alive {
                if other == device || !links.contains(&ordered(device, other)) {
                    continue;
                }
                let Some(sent) = previous.get(other) else {
                    continue;
                };
                let dropped = rng.gen_bool(cfg.drop_prob);
                if !dropped {
                    preds.insert(other.clone(), sent.clone());
                }
            }
            let mut obs = BTreeMap::new();
            for (atom, model) in &cfg.atom_models {
                let value = match model {
                    AtomModel::Const(v) => *v,
                    AtomModel::Bernoulli { p } => rng.gen_bool(*p),
                    AtomModel::Pulse {
                        device: target,
                        round: at,
                        value,
                    } => {
                        if target == device && *at == round {
                            *value
                        } else {
                            !*value
                        }
                    }
                };
                obs.insert(atom.clone(), value);
            }
            current.insert(device.clone(), id.clone());
            events.push(Event {
                id,
                device: device.clone(),
                seq,
                preds,
                obs,
            });
        }
        for (device, id) in &current {
            let seq = last.get(device).map_or(1, |(_, s)| s + 1);
            last.insert(device.clone(), (id.clone(), seq));
        }
        previous = current;
    }

    Ok(EventStructure::new(devices, base.atoms().to_vec(), events))
}

fn ordered<'a>(a: &'a DeviceId, b: &'a DeviceId) -> (&'a DeviceId, &'a DeviceId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Undirected links active in one round.
fn sample_links<'a>(
    cfg: &ScenarioConfig,
    devices: &'a [DeviceId],
    rng: &mut ChaCha8Rng,
) -> BTreeSet<(&'a DeviceId, &'a DeviceId)> {
    let mut links = BTreeSet::new();
    for (i, a) in devices.iter().enumerate() {
        for (j, b) in devices.iter().enumerate().skip(i + 1) {
            let linked = match cfg.connectivity {
                Connectivity::Complete => true,
                Connectivity::Chain => j == i + 1,
                Connectivity::Random { p } => rng.gen_bool(p),
            };
            if linked {
                links.insert(ordered(a, b));
            }
        }
    }
    links
}
