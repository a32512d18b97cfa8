//! The six-valued verdict chain used by predictive monitors.
//!
//! Values are ordered `F < F- < F. < T. < T- < T`:
//!
//! * `F` / `T` are final for the whole causal future of the event,
//! * `F-` / `T-` are final for the future of the event's own device,
//! * `F.` / `T.` only describe the current event.
//!
//! Conjunction is the minimum, disjunction the maximum and negation mirrors
//! the rank (`5 - rank`).

use std::fmt;
use std::ops::{BitAnd, BitOr, Not};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(u8)]
pub enum TruthValue6 {
    /// `F`: false in every causally later event.
    False = 0,
    /// `F-`: false in every later event of the same device.
    LocalFalse = 1,
    /// `F.`: false now, nothing known about the future.
    CurrentFalse = 2,
    /// `T.`: true now, nothing known about the future.
    CurrentTrue = 3,
    /// `T-`: true in every later event of the same device.
    LocalTrue = 4,
    /// `T`: true in every causally later event.
    True = 5,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TruthValueError {
    #[error("unknown verdict token `{0}` (expected one of F, F-, F., T., T-, T)")]
    Token(String),
    #[error("verdict rank {0} out of range 0..=5")]
    Rank(u64),
}

impl TruthValue6 {
    pub const ALL: [TruthValue6; 6] = [
        TruthValue6::False,
        TruthValue6::LocalFalse,
        TruthValue6::CurrentFalse,
        TruthValue6::CurrentTrue,
        TruthValue6::LocalTrue,
        TruthValue6::True,
    ];

    pub fn rank(self) -> u8 {
        self as u8
    }

    pub fn from_rank(rank: u8) -> Option<Self> {
        Self::ALL.get(rank as usize).copied()
    }

    pub fn conj(self, other: Self) -> Self {
        self.min(other)
    }

    pub fn disj(self, other: Self) -> Self {
        self.max(other)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(self) -> Self {
        Self::ALL[5 - self.rank() as usize]
    }

    /// Collapses onto the two-valued domain: the three upper values are true.
    pub fn to_bool(self) -> bool {
        self >= TruthValue6::CurrentTrue
    }

    /// Atom injection. Observations carry no prediction, so they map to the
    /// non-final values.
    pub fn from_bool(b: bool) -> Self {
        if b {
            TruthValue6::CurrentTrue
        } else {
            TruthValue6::CurrentFalse
        }
    }

    /// `!a | b`
    pub fn implies(self, other: Self) -> Self {
        self.neg().disj(other)
    }

    pub fn iff(self, other: Self) -> Self {
        self.implies(other).conj(other.implies(self))
    }

    /// True for `F`/`T`.
    pub fn is_final(self) -> bool {
        matches!(self, TruthValue6::False | TruthValue6::True)
    }

    /// True for `F-`/`T-`.
    pub fn is_locally_final(self) -> bool {
        matches!(self, TruthValue6::LocalFalse | TruthValue6::LocalTrue)
    }

    pub fn token(self) -> &'static str {
        match self {
            TruthValue6::False => "F",
            TruthValue6::LocalFalse => "F-",
            TruthValue6::CurrentFalse => "F.",
            TruthValue6::CurrentTrue => "T.",
            TruthValue6::LocalTrue => "T-",
            TruthValue6::True => "T",
        }
    }
}

impl fmt::Display for TruthValue6 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for TruthValue6 {
    type Err = TruthValueError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|v| v.token() == s)
            .ok_or_else(|| TruthValueError::Token(s.to_string()))
    }
}

impl From<bool> for TruthValue6 {
    fn from(b: bool) -> Self {
        Self::from_bool(b)
    }
}

impl BitAnd for TruthValue6 {
    type Output = Self;
    fn bitand(self, rhs: Self) -> Self {
        self.conj(rhs)
    }
}

impl BitOr for TruthValue6 {
    type Output = Self;
    fn bitor(self, rhs: Self) -> Self {
        self.disj(rhs)
    }
}

impl Not for TruthValue6 {
    type Output = Self;
    fn not(self) -> Self {
        self.neg()
    }
}

// Machine formats carry the rank.
impl Serialize for TruthValue6 {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_u8(self.rank())
    }
}

impl<'de> Deserialize<'de> for TruthValue6 {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let rank = u64::deserialize(deserializer)?;
        u8::try_from(rank)
            .ok()
            .and_then(Self::from_rank)
            .ok_or_else(|| serde::de::Error::custom(TruthValueError::Rank(rank)))
    }
}

#[cfg(test)]
mod tests {
    use super::TruthValue6 as V;

    #[test]
    fn conj_is_min() {
        assert_eq!(V::True.conj(V::CurrentTrue), V::CurrentTrue);
        assert_eq!(V::LocalFalse.conj(V::LocalTrue), V::LocalFalse);
        for v in V::ALL {
            assert_eq!(v.conj(V::True), v);
        }
    }

    #[test]
    fn disj_is_max() {
        assert_eq!(V::CurrentFalse.disj(V::LocalFalse), V::CurrentFalse);
        assert_eq!(V::CurrentTrue.disj(V::LocalTrue), V::LocalTrue);
        for v in V::ALL {
            assert_eq!(v.disj(V::False), v);
        }
    }

    #[test]
    fn negation_mirrors_rank() {
        assert_eq!(V::CurrentFalse.neg(), V::CurrentTrue);
        assert_eq!(V::LocalTrue.neg(), V::LocalFalse);
        for v in V::ALL {
            assert_eq!(v.neg().neg(), v);
            assert_eq!(v.neg().rank(), 5 - v.rank());
        }
    }

    #[test]
    fn bool_conversions() {
        assert!(V::CurrentTrue.to_bool());
        assert!(!V::LocalFalse.to_bool());
        assert_eq!(V::from_bool(true), V::CurrentTrue);
        assert_eq!(V::from_bool(false), V::CurrentFalse);
        for b in [false, true] {
            assert_eq!(V::from_bool(b).to_bool(), b);
        }
        for v in V::ALL {
            assert_eq!(v.neg().to_bool(), !v.to_bool());
        }
    }

    #[test]
    fn tokens_round_trip() {
        for v in V::ALL {
            assert_eq!(v.token().parse::<V>().unwrap(), v);
            assert_eq!(V::from_rank(v.rank()), Some(v));
        }
        assert!("X".parse::<V>().is_err());
        assert_eq!(V::from_rank(6), None);
    }

    #[test]
    fn serde_uses_ranks() {
        assert_eq!(serde_json::to_string(&V::LocalTrue).unwrap(), "4");
        assert_eq!(serde_json::from_str::<V>("0").unwrap(), V::False);
        assert!(serde_json::from_str::<V>("6").is_err());
    }

    #[test]
    fn derived_connectives() {
        assert_eq!(V::True.implies(V::False), V::False);
        assert_eq!(V::False.implies(V::CurrentFalse), V::True);
        assert_eq!(V::CurrentTrue.iff(V::CurrentTrue), V::CurrentTrue);
        for a in V::ALL {
            for b in V::ALL {
                assert_eq!(a.implies(b).to_bool(), !a.to_bool() || b.to_bool());
                assert_eq!(a.iff(b).to_bool(), a.to_bool() == b.to_bool());
            }
        }
    }
}
