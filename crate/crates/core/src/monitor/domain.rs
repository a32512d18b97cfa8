//! Node equations for both verdict domains.

use crate::logic6::TruthValue6;

use super::Payload;

pub(super) trait Domain: Copy + Ord + Sized {
    /// Default of `nbr`/`share`; stands in for a missing own entry.
    const DEFAULT: Self;
    const BOTTOM: Self;
    const TOP: Self;

    fn constant(b: bool) -> Self;
    fn observed(b: bool) -> Self;
    fn not(self) -> Self;
    fn and(self, other: Self) -> Self;
    fn or(self, other: Self) -> Self;

    /// `prev`: the child's value shared by this device last round.
    fn yesterday(prev: Self, now: Self) -> Self;
    /// `any`: disjunction of the child's shared values.
    fn exists_yesterday(any: Self, now: Self) -> Self;
    /// `prev`: this node's own previous output.
    fn since(f1: Self, f2: Self, prev: Self) -> Self;
    /// `all`: conjunction of the node's outputs shared by neighbours.
    fn all_since(f1: Self, f2: Self, all: Self) -> Self;
    /// `any`: disjunction of the node's outputs shared by neighbours.
    fn exists_since(f1: Self, f2: Self, any: Self) -> Self;

    fn unwrap(p: &Payload) -> Option<&[Self]>;
}

impl Domain for bool {
    const DEFAULT: Self = false;
    const BOTTOM: Self = false;
    const TOP: Self = true;

    fn constant(b: bool) -> Self {
        b
    }

    fn observed(b: bool) -> Self {
        b
    }

    fn not(self) -> Self {
        !self
    }

    fn and(self, other: Self) -> Self {
        self && other
    }

    fn or(self, other: Self) -> Self {
        self || other
    }

    fn yesterday(prev: Self, _now: Self) -> Self {
        prev
    }

    fn exists_yesterday(any: Self, _now: Self) -> Self {
        any
    }

    fn since(f1: Self, f2: Self, prev: Self) -> Self {
        f2 || (f1 && prev)
    }

    fn all_since(f1: Self, f2: Self, all: Self) -> Self {
        f2 || (f1 && all)
    }

    fn exists_since(f1: Self, f2: Self, any: Self) -> Self {
        f2 || (f1 && any)
    }

    fn unwrap(p: &Payload) -> Option<&[Self]> {
        match p {
            Payload::Two(v) => Some(v),
            Payload::Six(_) => None,
        }
    }
}

// The extra disjuncts/conjuncts only adjust strength: collapsing every
// value to bool turns each equation into its two-valued counterpart.
impl Domain for TruthValue6 {
    const DEFAULT: Self = TruthValue6::CurrentFalse;
    const BOTTOM: Self = TruthValue6::False;
    const TOP: Self = TruthValue6::True;

    fn constant(b: bool) -> Self {
        if b {
            TruthValue6::True
        } else {
            TruthValue6::False
        }
    }

    fn observed(b: bool) -> Self {
        TruthValue6::from_bool(b)
    }

    fn not(self) -> Self {
        self.neg()
    }

    fn and(self, other: Self) -> Self {
        self.conj(other)
    }

    fn or(self, other: Self) -> Self {
        self.disj(other)
    }

    fn yesterday(prev: Self, now: Self) -> Self {
        use TruthValue6 as V;
        if prev.to_bool() {
            V::CurrentTrue | (now & V::LocalTrue)
        } else {
            V::LocalFalse | (now & V::CurrentFalse)
        }
    }

    fn exists_yesterday(any: Self, now: Self) -> Self {
        use TruthValue6 as V;
        if any.to_bool() {
            V::CurrentTrue | now
        } else {
            V::CurrentFalse
        }
    }

    fn since(f1: Self, f2: Self, prev: Self) -> Self {
        use TruthValue6 as V;
        let branch = if prev.to_bool() {
            V::LocalTrue
        } else {
            V::LocalFalse
        };
        f2 | (f1 & branch)
    }

    fn all_since(f1: Self, f2: Self, all: Self) -> Self {
        use TruthValue6 as V;
        let branch = if all.to_bool() {
            V::CurrentTrue
        } else {
            V::False
        };
        f2 | (f1 & branch)
    }

    fn exists_since(f1: Self, f2: Self, any: Self) -> Self {
        use TruthValue6 as V;
        let branch = if any.to_bool() {
            V::True
        } else {
            V::CurrentFalse
        };
        f2 | (f1 & branch)
    }

    fn unwrap(p: &Payload) -> Option<&[Self]> {
        match p {
            Payload::Six(v) => Some(v),
            Payload::Two(_) => None,
        }
    }
}
