//! Precedence-climbing parser for the textual formula syntax.
//!
//! Binding, tightest first: prefix operators (`!`, `Y`, `AY`, `EY`, `P`,
//! `AP`, `EP`, `H`, `AH`, `EH`), `&`, `|`, the since family (`S`, `AS`,
//! `ES`, left-associative), `->` (right-associative), `<->`.

use thiserror::Error;

use super::{is_atom_name, BinaryOp, Formula, UnaryOp};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at {position}: expected {}, found {found}", .expected.join(" or "))]
    Syntax {
        position: usize,
        expected: Vec<String>,
        found: String,
    },
    #[error("reserved word `{word}` at {position} cannot be used as an atom")]
    ReservedWord { word: String, position: usize },
    #[error("invalid atom name `{name}` at {position} (atoms match [a-z][a-z0-9_]*)")]
    InvalidAtom { name: String, position: usize },
    #[error("unexpected character `{ch}` at {position}")]
    UnexpectedChar { ch: char, position: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Token {
    Word(String),
    Bang,
    Amp,
    Bar,
    Arrow,
    DoubleArrow,
    LParen,
    RParen,
    End,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Word(w) => format!("`{w}`"),
            Token::Bang => "`!`".into(),
            Token::Amp => "`&`".into(),
            Token::Bar => "`|`".into(),
            Token::Arrow => "`->`".into(),
            Token::DoubleArrow => "`<->`".into(),
            Token::LParen => "`(`".into(),
            Token::RParen => "`)`".into(),
            Token::End => "end of input".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Token, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'!' => Token::Bang,
            b'&' => Token::Amp,
            b'|' => Token::Bar,
            b'(' => Token::LParen,
            b')' => Token::RParen,
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                i += 1;
                Token::Arrow
            }
            b'<' if text[i..].starts_with("<->") => {
                i += 2;
                Token::DoubleArrow
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Token::Word(text[start..i].to_string()), start));
                continue;
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(ParseError::UnexpectedChar { ch, position: i });
            }
        };
        i += 1;
        out.push((tok, start));
    }
    out.push((Token::End, text.len()));
    Ok(out)
}

struct Parser {
    tokens: Vec<(Token, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos].0
    }

    fn position(&self) -> usize {
        self.tokens[self.pos].1
    }

    fn bump(&mut self) -> (Token, usize) {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        ParseError::Syntax {
            position: self.position(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().describe(),
        }
    }

    fn peek_binary(&self) -> Option<BinaryOp> {
        match self.peek() {
            Token::Amp => Some(BinaryOp::And),
            Token::Bar => Some(BinaryOp::Or),
            Token::Arrow => Some(BinaryOp::Implies),
            Token::DoubleArrow => Some(BinaryOp::Iff),
            Token::Word(w) => BinaryOp::from_keyword(w),
            _ => None,
        }
    }

    fn expr(&mut self, min_prec: u8) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.peek_binary() {
            let prec = op.precedence();
            if prec < min_prec {
                break;
            }
            self.bump();
            let next = if op.right_assoc() { prec } else { prec + 1 };
            let rhs = self.expr(next)?;
            lhs = Formula::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        let op = match self.peek() {
            Token::Bang => Some(UnaryOp::Not),
            Token::Word(w) => UnaryOp::from_keyword(w),
            _ => None,
        };
        match op {
            Some(op) => {
                self.bump();
                Ok(Formula::unary(op, self.unary()?))
            }
            None => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        const OPERAND: &[&str] = &["atom", "`true`", "`false`", "`(`", "prefix operator"];
        match self.peek().clone() {
            Token::LParen => {
                self.bump();
                let f = self.expr(0)?;
                if *self.peek() != Token::RParen {
                    return Err(self.error(&["`)`", "binary operator"]));
                }
                self.bump();
                Ok(f)
            }
            Token::Word(w) => {
                let position = self.position();
                match w.as_str() {
                    "true" => {
                        self.bump();
                        Ok(Formula::Const(true))
                    }
                    "false" => {
                        self.bump();
                        Ok(Formula::Const(false))
                    }
                    _ if BinaryOp::from_keyword(&w).is_some() => {
                        Err(ParseError::ReservedWord { word: w, position })
                    }
                    _ if is_atom_name(&w) => {
                        self.bump();
                        Ok(Formula::Atom(w))
                    }
                    _ => Err(ParseError::InvalidAtom { name: w, position }),
                }
            }
            _ => Err(self.error(OPERAND)),
        }
    }
}

/// Parses the textual syntax. Whitespace is insignificant.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let mut parser = Parser {
        tokens: lex(text)?,
        pos: 0,
    };
    let f = parser.expr(0)?;
    if *parser.peek() != Token::End {
        return Err(parser.error(&["binary operator", "end of input"]));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atom(a: &str) -> Formula {
        Formula::atom(a)
    }

    #[test]
    fn single_modality() {
        assert_eq!(
            parse("EP b").unwrap(),
            Formula::unary(UnaryOp::EP, atom("b"))
        );
    }

    #[test]
    fn combined_scenario_formula() {
        let expected = Formula::binary(
            BinaryOp::S,
            Formula::unary(UnaryOp::EP, atom("b")),
            Formula::unary(UnaryOp::AH, atom("f")),
        );
        assert_eq!(parse("(EP b) S (AH f)").unwrap(), expected);
        assert_eq!(parse("EP b S AH f").unwrap(), expected);
    }

    #[test]
    fn precedence() {
        assert_eq!(
            parse("a & b | c").unwrap(),
            Formula::binary(
                BinaryOp::Or,
                Formula::binary(BinaryOp::And, atom("a"), atom("b")),
                atom("c")
            )
        );
        assert_eq!(
            parse("Y !q").unwrap(),
            Formula::unary(UnaryOp::Y, Formula::not(atom("q")))
        );
        // since binds looser than | but tighter than ->
        assert_eq!(
            parse("a | b S c -> d").unwrap(),
            Formula::binary(
                BinaryOp::Implies,
                Formula::binary(
                    BinaryOp::S,
                    Formula::binary(BinaryOp::Or, atom("a"), atom("b")),
                    atom("c")
                ),
                atom("d")
            )
        );
    }

    #[test]
    fn associativity() {
        assert_eq!(
            parse("a S b ES c").unwrap(),
            Formula::binary(
                BinaryOp::ES,
                Formula::binary(BinaryOp::S, atom("a"), atom("b")),
                atom("c")
            )
        );
        assert_eq!(
            parse("a -> b -> c").unwrap(),
            Formula::binary(
                BinaryOp::Implies,
                atom("a"),
                Formula::binary(BinaryOp::Implies, atom("b"), atom("c"))
            )
        );
        assert_eq!(
            parse("a <-> b <-> c").unwrap(),
            Formula::binary(
                BinaryOp::Iff,
                Formula::binary(BinaryOp::Iff, atom("a"), atom("b")),
                atom("c")
            )
        );
    }

    #[test]
    fn whitespace_insensitive() {
        assert_eq!(parse("  a&b  ").unwrap(), parse("a & b").unwrap());
        assert_eq!(
            parse("(EP b)S(AH f)").unwrap(),
            parse("(EP b) S (AH f)").unwrap()
        );
        assert_eq!(parse("!(a|b)").unwrap(), parse("! ( a | b )").unwrap());
    }

    #[test]
    fn constants() {
        assert_eq!(parse("true").unwrap(), Formula::Const(true));
        assert_eq!(parse("false & q").unwrap().depth(), 2);
    }

    #[test]
    fn syntax_errors_report_position_and_expectations() {
        match parse("a & ").unwrap_err() {
            ParseError::Syntax {
                position, expected, ..
            } => {
                assert_eq!(position, 4);
                assert!(expected.iter().any(|e| e == "atom"));
            }
            other => panic!("unexpected {other:?}"),
        }
        match parse("(a | b").unwrap_err() {
            ParseError::Syntax { position, .. } => assert_eq!(position, 6),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse("a b"),
            Err(ParseError::Syntax { position: 2, .. })
        ));
        assert!(matches!(
            parse(""),
            Err(ParseError::Syntax { position: 0, .. })
        ));
        assert!(matches!(
            parse("a # b"),
            Err(ParseError::UnexpectedChar {
                ch: '#',
                position: 2
            })
        ));
    }

    #[test]
    fn reserved_words() {
        assert_eq!(
            parse("S & q").unwrap_err(),
            ParseError::ReservedWord {
                word: "S".into(),
                position: 0
            }
        );
        assert!(matches!(
            parse("a & ES"),
            Err(ParseError::ReservedWord { .. })
        ));
        assert!(matches!(parse("Foo"), Err(ParseError::InvalidAtom { .. })));
    }
}
