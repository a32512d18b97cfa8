//! Nested JSON form: `{"op":"ES","args":[{"op":"true"},{"op":"atom","name":"b"}]}`.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Value};
use thiserror::Error;

use super::{is_atom_name, BinaryOp, CoreFormula, Formula, UnaryOp};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormulaJsonError {
    #[error("expected a JSON object with an `op` field")]
    NotAnObject,
    #[error("unknown operator `{0}`")]
    UnknownOp(String),
    #[error("operator `{op}` takes {expected} argument(s)")]
    Arity { op: String, expected: usize },
    #[error("invalid atom name in JSON formula")]
    BadAtom,
    #[error("formula uses derived operators; a core formula was expected")]
    NotCore,
}

fn op_name_unary(op: UnaryOp) -> &'static str {
    match op {
        UnaryOp::Not => "not",
        other => other.symbol(),
    }
}

fn op_name_binary(op: BinaryOp) -> &'static str {
    match op {
        BinaryOp::And => "and",
        BinaryOp::Or => "or",
        BinaryOp::Implies => "implies",
        BinaryOp::Iff => "iff",
        other => other.symbol(),
    }
}

impl Formula {
    pub fn to_json(&self) -> Value {
        match self {
            Formula::Const(true) => json!({"op": "true"}),
            Formula::Const(false) => json!({"op": "false"}),
            Formula::Atom(a) => json!({"op": "atom", "name": a}),
            Formula::Unary(op, f) => json!({"op": op_name_unary(*op), "args": [f.to_json()]}),
            Formula::Binary(op, l, r) => {
                json!({"op": op_name_binary(*op), "args": [l.to_json(), r.to_json()]})
            }
        }
    }

    pub fn from_json(value: &Value) -> Result<Formula, FormulaJsonError> {
        let obj = value.as_object().ok_or(FormulaJsonError::NotAnObject)?;
        let op = obj
            .get("op")
            .and_then(Value::as_str)
            .ok_or(FormulaJsonError::NotAnObject)?;
        let args: &[Value] = obj
            .get("args")
            .and_then(Value::as_array)
            .map(Vec::as_slice)
            .unwrap_or(&[]);
        let arity = |expected: usize| {
            if args.len() == expected {
                Ok(())
            } else {
                Err(FormulaJsonError::Arity {
                    op: op.to_string(),
                    expected,
                })
            }
        };
        match op {
            "true" | "false" => {
                arity(0)?;
                Ok(Formula::Const(op == "true"))
            }
            "atom" => {
                let name = obj
                    .get("name")
                    .and_then(Value::as_str)
                    .filter(|n| is_atom_name(n))
                    .ok_or(FormulaJsonError::BadAtom)?;
                Ok(Formula::atom(name))
            }
            _ => {
                if let Some(u) = UnaryOp::ALL.into_iter().find(|u| op_name_unary(*u) == op) {
                    arity(1)?;
                    return Ok(Formula::unary(u, Formula::from_json(&args[0])?));
                }
                if let Some(b) = BinaryOp::ALL.into_iter().find(|b| op_name_binary(*b) == op) {
                    arity(2)?;
                    return Ok(Formula::binary(
                        b,
                        Formula::from_json(&args[0])?,
                        Formula::from_json(&args[1])?,
                    ));
                }
                Err(FormulaJsonError::UnknownOp(op.to_string()))
            }
        }
    }
}

impl CoreFormula {
    pub fn to_json(&self) -> Value {
        Formula::from(self.clone()).to_json()
    }

    pub fn from_json(value: &Value) -> Result<CoreFormula, FormulaJsonError> {
        Formula::from_json(value)?
            .to_core()
            .ok_or(FormulaJsonError::NotCore)
    }
}

impl Serialize for Formula {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Formula {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let v = Value::deserialize(deserializer)?;
        Formula::from_json(&v).map_err(D::Error::custom)
    }
}

impl Serialize for CoreFormula {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CoreFormula {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let v = Value::deserialize(deserializer)?;
        CoreFormula::from_json(&v).map_err(D::Error::custom)
    }
}
