//! Past-CTL monitoring over event structures.
//!
//! Formulas are parsed and expanded into a small core ([`formula`]), evaluated
//! over causal event structures ([`events`]) by reference semantics
//! ([`oracle`]), and compiled into streaming per-device monitors
//! ([`monitor`]) whose verdicts live in a six-valued predictive domain
//! ([`logic6`]).

pub mod events;
pub mod formula;
pub mod fuzz;
pub mod logic6;
pub mod monitor;
pub mod oracle;
