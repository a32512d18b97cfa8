use super::{Formula, UnaryOp};

const UNARY_PREC: u8 = 6;
const ATOMIC_PREC: u8 = 7;

fn precedence(f: &Formula) -> u8 {
    match f {
        Formula::Const(_) | Formula::Atom(_) => ATOMIC_PREC,
        Formula::Unary(..) => UNARY_PREC,
        Formula::Binary(op, ..) => op.precedence(),
    }
}

/// Prints `f` in the concrete syntax accepted by [`super::parse`].
///
/// Parentheses are only emitted where precedence or associativity demands
/// them, except that keyword modalities appearing as an operand of a binary
/// operator are always bracketed (`(EP b) S (AH f)`).
pub fn render(f: &Formula) -> String {
    let mut out = String::new();
    write(f, &mut out);
    out
}

fn write(f: &Formula, out: &mut String) {
    match f {
        Formula::Const(true) => out.push_str("true"),
        Formula::Const(false) => out.push_str("false"),
        Formula::Atom(a) => out.push_str(a),
        Formula::Unary(op, inner) => {
            out.push_str(op.symbol());
            if *op != UnaryOp::Not {
                out.push(' ');
            }
            write_wrapped(inner, precedence(inner) < UNARY_PREC, out);
        }
        Formula::Binary(op, lhs, rhs) => {
            let prec = op.precedence();
            let lp = precedence(lhs);
            let rp = precedence(rhs);
            let left_parens = lp < prec || (lp == prec && op.right_assoc()) || keyword_unary(lhs);
            let right_parens = rp < prec || (rp == prec && !op.right_assoc()) || keyword_unary(rhs);
            write_wrapped(lhs, left_parens, out);
            out.push(' ');
            out.push_str(op.symbol());
            out.push(' ');
            write_wrapped(rhs, right_parens, out);
        }
    }
}

fn keyword_unary(f: &Formula) -> bool {
    matches!(f, Formula::Unary(op, _) if op.is_temporal())
}

fn write_wrapped(f: &Formula, parens: bool, out: &mut String) {
    if parens {
        out.push('(');
        write(f, out);
        out.push(')');
    } else {
        write(f, out);
    }
}

#[cfg(test)]
mod tests {
    use super::super::{parse, BinaryOp};
    use super::*;

    #[test]
    fn renders_scenario_formula() {
        let f = Formula::binary(
            BinaryOp::S,
            Formula::unary(UnaryOp::EP, Formula::atom("b")),
            Formula::unary(UnaryOp::AH, Formula::atom("f")),
        );
        assert_eq!(render(&f), "(EP b) S (AH f)");
    }

    #[test]
    fn minimal_parentheses() {
        assert_eq!(render(&Formula::atom("q")), "q");
        let f = Formula::not(Formula::binary(
            BinaryOp::Or,
            Formula::atom("a"),
            Formula::atom("b"),
        ));
        assert_eq!(render(&f), "!(a | b)");
        for text in [
            "a & b | c",
            "a & (b | c)",
            "a S b ES c",
            "a S (b ES c)",
            "a -> b -> c",
            "(a -> b) -> c",
            "a <-> b <-> c",
            "!Y q",
            "Y !q",
            "EY EY (a & b)",
            "!!a",
        ] {
            let f = parse(text).unwrap();
            assert_eq!(render(&f), text, "render of {text}");
        }
    }

    #[test]
    fn redundant_parentheses_are_dropped() {
        assert_eq!(render(&parse("((a)) & (b)").unwrap()), "a & b");
        assert_eq!(render(&parse("(a & b) | c").unwrap()), "a & b | c");
    }
}
