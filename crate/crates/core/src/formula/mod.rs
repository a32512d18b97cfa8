//! Past-CTL syntax.
//!
//! [`Formula`] is the full surface language. [`CoreFormula`] is the primitive
//! fragment (`Y`, `EY`, `S`, `AS`, `ES` plus the lattice connectives) that the
//! evaluators and the monitor compiler consume; [`expand`] maps one onto the
//! other.
//!
//! Derived modalities expand as
//!
//! ```text
//! AY f  = !EY !f
//! P f   = true S f      AP f = true AS f      EP f = true ES f
//! H f   = !P !f         AH f = !EP !f         EH f = !AP !f
//! ```
//!
//! Note the quantifier swap in the last row: `AH` is defined through `EP`,
//! and `EH` through `AP`.

mod json;
mod parse;
mod random;
mod render;

use std::collections::BTreeSet;
use std::fmt;

pub use json::FormulaJsonError;
pub use parse::{parse, ParseError};
pub use random::{random_formula, random_formula_with};

pub const KEYWORDS: [&str; 14] = [
    "true", "false", "Y", "AY", "EY", "P", "AP", "EP", "H", "AH", "EH", "S", "AS", "ES",
];

/// Returns true if `name` is a legal atom name: `[a-z][a-z0-9_]*` and not a
/// keyword.
pub fn is_atom_name(name: &str) -> bool {
    let mut chars = name.chars();
    let Some(first) = chars.next() else {
        return false;
    };
    first.is_ascii_lowercase()
        && chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
        && !is_keyword(name)
}

pub fn is_keyword(word: &str) -> bool {
    KEYWORDS.contains(&word)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum UnaryOp {
    Not,
    Y,
    AY,
    EY,
    P,
    AP,
    EP,
    H,
    AH,
    EH,
}

impl UnaryOp {
    pub const ALL: [UnaryOp; 10] = [
        UnaryOp::Not,
        UnaryOp::Y,
        UnaryOp::AY,
        UnaryOp::EY,
        UnaryOp::P,
        UnaryOp::AP,
        UnaryOp::EP,
        UnaryOp::H,
        UnaryOp::AH,
        UnaryOp::EH,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            UnaryOp::Not => "!",
            UnaryOp::Y => "Y",
            UnaryOp::AY => "AY",
            UnaryOp::EY => "EY",
            UnaryOp::P => "P",
            UnaryOp::AP => "AP",
            UnaryOp::EP => "EP",
            UnaryOp::H => "H",
            UnaryOp::AH => "AH",
            UnaryOp::EH => "EH",
        }
    }

    pub fn from_keyword(word: &str) -> Option<Self> {
        Self::ALL
            .into_iter()
            .filter(|op| *op != UnaryOp::Not)
            .find(|op| op.symbol() == word)
    }

    pub fn is_temporal(self) -> bool {
        self != UnaryOp::Not
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BinaryOp {
    And,
    Or,
    Implies,
    Iff,
    S,
    AS,
    ES,
}

impl BinaryOp {
    pub const ALL: [BinaryOp; 7] = [
        BinaryOp::And,
        BinaryOp::Or,
        BinaryOp::Implies,
        BinaryOp::Iff,
        BinaryOp::S,
        BinaryOp::AS,
        BinaryOp::ES,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::And => "&",
            BinaryOp::Or => "|",
            BinaryOp::Implies => "->",
            BinaryOp::Iff => "<->",
            BinaryOp::S => "S",
            BinaryOp::AS => "AS",
            BinaryOp::ES => "ES",
        }
    }

    pub fn from_keyword(word: &str) -> Option<Self> {
        match word {
            "S" => Some(BinaryOp::S),
            "AS" => Some(BinaryOp::AS),
            "ES" => Some(BinaryOp::ES),
            _ => None,
        }
    }

    /// Binding strength, higher binds tighter.
    pub(crate) fn precedence(self) -> u8 {
        match self {
            BinaryOp::And => 5,
            BinaryOp::Or => 4,
            BinaryOp::S | BinaryOp::AS | BinaryOp::ES => 3,
            BinaryOp::Implies => 2,
            BinaryOp::Iff => 1,
        }
    }

    pub(crate) fn right_assoc(self) -> bool {
        self == BinaryOp::Implies
    }
}

/// A past-CTL formula over the full surface syntax.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Const(bool),
    Atom(String),
    Unary(UnaryOp, Box<Formula>),
    Binary(BinaryOp, Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Self {
        Formula::Atom(name.into())
    }

    pub fn unary(op: UnaryOp, f: Formula) -> Self {
        Formula::Unary(op, Box::new(f))
    }

    pub fn binary(op: BinaryOp, lhs: Formula, rhs: Formula) -> Self {
        Formula::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Self::unary(UnaryOp::Not, f)
    }

    pub fn depth(&self) -> usize {
        match self {
            Formula::Const(_) | Formula::Atom(_) => 1,
            Formula::Unary(_, f) => 1 + f.depth(),
            Formula::Binary(_, l, r) => 1 + l.depth().max(r.depth()),
        }
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Const(_) => {}
            Formula::Atom(a) => {
                out.insert(a.clone());
            }
            Formula::Unary(_, f) => f.collect_atoms(out),
            Formula::Binary(_, l, r) => {
                l.collect_atoms(out);
                r.collect_atoms(out);
            }
        }
    }

    /// Converts to the core fragment if no derived operator occurs.
    pub fn to_core(&self) -> Option<CoreFormula> {
        use CoreFormula as C;
        Some(match self {
            Formula::Const(b) => C::Const(*b),
            Formula::Atom(a) => C::Atom(a.clone()),
            Formula::Unary(op, f) => {
                let f = Box::new(f.to_core()?);
                match op {
                    UnaryOp::Not => C::Not(f),
                    UnaryOp::Y => C::Y(f),
                    UnaryOp::EY => C::EY(f),
                    _ => return None,
                }
            }
            Formula::Binary(op, l, r) => {
                let (l, r) = (Box::new(l.to_core()?), Box::new(r.to_core()?));
                match op {
                    BinaryOp::And => C::And(l, r),
                    BinaryOp::Or => C::Or(l, r),
                    BinaryOp::S => C::S(l, r),
                    BinaryOp::AS => C::AS(l, r),
                    BinaryOp::ES => C::ES(l, r),
                    BinaryOp::Implies | BinaryOp::Iff => return None,
                }
            }
        })
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render::render(self))
    }
}

/// The primitive fragment evaluated by the oracle and compiled into monitors.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CoreFormula {
    Const(bool),
    Atom(String),
    Not(Box<CoreFormula>),
    And(Box<CoreFormula>, Box<CoreFormula>),
    Or(Box<CoreFormula>, Box<CoreFormula>),
    /// Held at the previous event of the same device.
    Y(Box<CoreFormula>),
    /// Held at some neighbouring (message-predecessor) event.
    EY(Box<CoreFormula>),
    /// `f1 S f2` along the device's own chain.
    S(Box<CoreFormula>, Box<CoreFormula>),
    /// `f1 AS f2` on every message path reaching the event.
    AS(Box<CoreFormula>, Box<CoreFormula>),
    /// `f1 ES f2` on some message path reaching the event.
    ES(Box<CoreFormula>, Box<CoreFormula>),
}

impl CoreFormula {
    /// Number of internal nodes; constants and atoms count zero.
    pub fn connective_count(&self) -> usize {
        match self {
            CoreFormula::Const(_) | CoreFormula::Atom(_) => 0,
            CoreFormula::Not(f) | CoreFormula::Y(f) | CoreFormula::EY(f) => {
                1 + f.connective_count()
            }
            CoreFormula::And(l, r)
            | CoreFormula::Or(l, r)
            | CoreFormula::S(l, r)
            | CoreFormula::AS(l, r)
            | CoreFormula::ES(l, r) => 1 + l.connective_count() + r.connective_count(),
        }
    }

    /// Number of constant and atom leaves.
    pub fn leaf_count(&self) -> usize {
        match self {
            CoreFormula::Const(_) | CoreFormula::Atom(_) => 1,
            CoreFormula::Not(f) | CoreFormula::Y(f) | CoreFormula::EY(f) => f.leaf_count(),
            CoreFormula::And(l, r)
            | CoreFormula::Or(l, r)
            | CoreFormula::S(l, r)
            | CoreFormula::AS(l, r)
            | CoreFormula::ES(l, r) => l.leaf_count() + r.leaf_count(),
        }
    }

    /// Number of `Y`, `EY`, `S`, `AS` and `ES` nodes.
    pub fn temporal_count(&self) -> usize {
        match self {
            CoreFormula::Const(_) | CoreFormula::Atom(_) => 0,
            CoreFormula::Not(f) => f.temporal_count(),
            CoreFormula::Y(f) | CoreFormula::EY(f) => 1 + f.temporal_count(),
            CoreFormula::And(l, r) | CoreFormula::Or(l, r) => {
                l.temporal_count() + r.temporal_count()
            }
            CoreFormula::S(l, r) | CoreFormula::AS(l, r) | CoreFormula::ES(l, r) => {
                1 + l.temporal_count() + r.temporal_count()
            }
        }
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        Formula::from(self.clone()).atoms()
    }

    /// Direct subformulas in argument order.
    pub fn children(&self) -> Vec<&CoreFormula> {
        match self {
            CoreFormula::Const(_) | CoreFormula::Atom(_) => vec![],
            CoreFormula::Not(f) | CoreFormula::Y(f) | CoreFormula::EY(f) => vec![f],
            CoreFormula::And(l, r)
            | CoreFormula::Or(l, r)
            | CoreFormula::S(l, r)
            | CoreFormula::AS(l, r)
            | CoreFormula::ES(l, r) => vec![l, r],
        }
    }
}

impl From<CoreFormula> for Formula {
    fn from(f: CoreFormula) -> Self {
        use CoreFormula as C;
        let b = |f: Box<CoreFormula>| Formula::from(*f);
        match f {
            C::Const(v) => Formula::Const(v),
            C::Atom(a) => Formula::Atom(a),
            C::Not(f) => Formula::unary(UnaryOp::Not, b(f)),
            C::Y(f) => Formula::unary(UnaryOp::Y, b(f)),
            C::EY(f) => Formula::unary(UnaryOp::EY, b(f)),
            C::And(l, r) => Formula::binary(BinaryOp::And, b(l), b(r)),
            C::Or(l, r) => Formula::binary(BinaryOp::Or, b(l), b(r)),
            C::S(l, r) => Formula::binary(BinaryOp::S, b(l), b(r)),
            C::AS(l, r) => Formula::binary(BinaryOp::AS, b(l), b(r)),
            C::ES(l, r) => Formula::binary(BinaryOp::ES, b(l), b(r)),
        }
    }
}

impl fmt::Display for CoreFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        Formula::from(self.clone()).fmt(f)
    }
}

/// Rewrites every derived operator into the primitive fragment.
pub fn expand(f: &Formula) -> CoreFormula {
    use CoreFormula as C;
    let not = |f: CoreFormula| C::Not(Box::new(f));
    let top = || Box::new(C::Const(true));
    match f {
        Formula::Const(b) => C::Const(*b),
        Formula::Atom(a) => C::Atom(a.clone()),
        Formula::Unary(op, inner) => {
            let g = expand(inner);
            match op {
                UnaryOp::Not => not(g),
                UnaryOp::Y => C::Y(Box::new(g)),
                UnaryOp::EY => C::EY(Box::new(g)),
                UnaryOp::AY => not(C::EY(Box::new(not(g)))),
                UnaryOp::P => C::S(top(), Box::new(g)),
                UnaryOp::AP => C::AS(top(), Box::new(g)),
                UnaryOp::EP => C::ES(top(), Box::new(g)),
                UnaryOp::H => not(C::S(top(), Box::new(not(g)))),
                UnaryOp::AH => not(C::ES(top(), Box::new(not(g)))),
                UnaryOp::EH => not(C::AS(top(), Box::new(not(g)))),
            }
        }
        Formula::Binary(op, l, r) => {
            let (a, b) = (expand(l), expand(r));
            match op {
                BinaryOp::And => C::And(Box::new(a), Box::new(b)),
                BinaryOp::Or => C::Or(Box::new(a), Box::new(b)),
                BinaryOp::S => C::S(Box::new(a), Box::new(b)),
                BinaryOp::AS => C::AS(Box::new(a), Box::new(b)),
                BinaryOp::ES => C::ES(Box::new(a), Box::new(b)),
                BinaryOp::Implies => C::Or(Box::new(not(a)), Box::new(b)),
                BinaryOp::Iff => {
                    let ab = C::Or(Box::new(not(a.clone())), Box::new(b.clone()));
                    let ba = C::Or(Box::new(not(b)), Box::new(a));
                    C::And(Box::new(ab), Box::new(ba))
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use CoreFormula as C;

    fn atom(a: &str) -> Box<CoreFormula> {
        Box::new(C::Atom(a.into()))
    }

    fn top() -> Box<CoreFormula> {
        Box::new(C::Const(true))
    }

    #[test]
    fn atom_names() {
        assert!(is_atom_name("q"));
        assert!(is_atom_name("b_2"));
        assert!(!is_atom_name("true"));
        assert!(!is_atom_name("Q"));
        assert!(!is_atom_name("2q"));
        assert!(!is_atom_name(""));
    }

    #[test]
    fn expand_previously_and_historically() {
        let ep = parse("EP b").unwrap();
        assert_eq!(expand(&ep), C::ES(top(), atom("b")));

        let ah = parse("AH f").unwrap();
        assert_eq!(
            expand(&ah),
            C::Not(Box::new(C::ES(top(), Box::new(C::Not(atom("f"))))))
        );

        let ay = parse("AY q").unwrap();
        assert_eq!(
            expand(&ay),
            C::Not(Box::new(C::EY(Box::new(C::Not(atom("q"))))))
        );

        let eh = parse("EH q").unwrap();
        assert_eq!(
            expand(&eh),
            C::Not(Box::new(C::AS(top(), Box::new(C::Not(atom("q"))))))
        );
    }

    #[test]
    fn expand_implication() {
        let f = parse("a -> b").unwrap();
        assert_eq!(expand(&f), C::Or(Box::new(C::Not(atom("a"))), atom("b")));
    }

    #[test]
    fn connective_counts() {
        assert_eq!(C::Atom("q".into()).connective_count(), 0);
        assert_eq!(C::ES(top(), atom("b")).connective_count(), 1);
        let f = expand(&parse("(EP b) S (AH f)").unwrap());
        assert_eq!(f.connective_count(), 5);
        assert_eq!(f.temporal_count(), 3);
        assert_eq!(f.leaf_count(), 4);
    }

    #[test]
    fn expand_is_identity_on_core() {
        let f = parse("Y a & EY (b S c) | !(a AS b) ES false").unwrap();
        let core = f.to_core().expect("already core");
        assert_eq!(expand(&f), core);
    }

    #[test]
    fn to_core_rejects_derived() {
        assert!(parse("EP b").unwrap().to_core().is_none());
        assert!(parse("a -> b").unwrap().to_core().is_none());
    }
}
