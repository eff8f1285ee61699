//! Printing in the text grammar accepted by the parser. Parentheses are
//! emitted only where precedence requires them, so `parse(print(c)) == c`.

use std::fmt::{self, Display, Formatter};

use super::{Concept, Formula};
use crate::rational::{format_rational, Rational};

/// Recognises the desugared truncated addition `~(~C - q)`.
fn as_trunc_add(c: &Concept) -> Option<(&Concept, &Rational)> {
    match c {
        Concept::Neg(inner) => match inner.as_ref() {
            Concept::TruncSub(x, q) => match x.as_ref() {
                Concept::Neg(base) => Some((base.as_ref(), q)),
                _ => None,
            },
            _ => None,
        },
        _ => None,
    }
}

fn concept_level(c: &Concept) -> u8 {
    if as_trunc_add(c).is_some() {
        return 3;
    }
    match c {
        Concept::Or(..) => 0,
        Concept::And(..) => 1,
        Concept::Neg(_) | Concept::Dia(..) => 2,
        Concept::TruncSub(..) => 3,
        Concept::Const(_) | Concept::Atom(_) => 4,
    }
}

fn write_concept(f: &mut Formatter<'_>, c: &Concept, min_level: u8) -> fmt::Result {
    let paren = concept_level(c) < min_level;
    if paren {
        f.write_str("(")?;
    }
    if let Some((base, q)) = as_trunc_add(c) {
        write_concept(f, base, 3)?;
        write!(f, " + {}", format_rational(q))?;
        if paren {
            f.write_str(")")?;
        }
        return Ok(());
    }
    match c {
        Concept::Const(q) => f.write_str(&format_rational(q))?,
        Concept::Atom(a) => f.write_str(a)?,
        Concept::TruncSub(inner, q) => {
            write_concept(f, inner, 3)?;
            write!(f, " - {}", format_rational(q))?;
        }
        Concept::Neg(inner) => {
            f.write_str("~")?;
            write_concept(f, inner, 2)?;
        }
        Concept::Dia(role, inner) => {
            write!(f, "<{role}> ")?;
            write_concept(f, inner, 2)?;
        }
        Concept::And(l, r) => {
            write_concept(f, l, 1)?;
            f.write_str(" & ")?;
            write_concept(f, r, 2)?;
        }
        Concept::Or(l, r) => {
            write_concept(f, l, 0)?;
            f.write_str(" | ")?;
            write_concept(f, r, 1)?;
        }
    }
    if paren {
        f.write_str(")")?;
    }
    Ok(())
}

impl Display for Concept {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write_concept(f, self, 0)
    }
}

fn as_formula_trunc_add(phi: &Formula) -> Option<(&Formula, &Rational)> {
    match phi {
        Formula::Neg(inner) => match inner.as_ref() {
            Formula::TruncSub(x, q) => match x.as_ref() {
                Formula::Neg(base) => Some((base.as_ref(), q)),
                _ => None,
            },
            _ => None,
        },
        _ => None,
    }
}

// binders scope to the right, so they sit at the lowest level
fn formula_level(phi: &Formula) -> u8 {
    if as_formula_trunc_add(phi).is_some() {
        return 3;
    }
    match phi {
        Formula::Exists(..) | Formula::DiaBind(..) => 0,
        Formula::And(..) => 1,
        Formula::Neg(_) => 2,
        Formula::TruncSub(..) => 3,
        Formula::Const(_) | Formula::Atom(..) | Formula::Eq(..) => 4,
    }
}

fn write_formula(f: &mut Formatter<'_>, phi: &Formula, min_level: u8) -> fmt::Result {
    let paren = formula_level(phi) < min_level;
    if paren {
        f.write_str("(")?;
    }
    if let Some((base, q)) = as_formula_trunc_add(phi) {
        write_formula(f, base, 3)?;
        write!(f, " + {}", format_rational(q))?;
        if paren {
            f.write_str(")")?;
        }
        return Ok(());
    }
    match phi {
        Formula::Const(q) => f.write_str(&format_rational(q))?,
        Formula::Atom(a, x) => write!(f, "{a}({x})")?,
        Formula::Eq(x, y) => write!(f, "{x} = {y}")?,
        Formula::TruncSub(inner, q) => {
            write_formula(f, inner, 3)?;
            write!(f, " - {}", format_rational(q))?;
        }
        Formula::Neg(inner) => {
            f.write_str("~")?;
            write_formula(f, inner, 2)?;
        }
        Formula::And(l, r) => {
            write_formula(f, l, 1)?;
            f.write_str(" & ")?;
            write_formula(f, r, 2)?;
        }
        Formula::Exists(v, body) => {
            write!(f, "E {v}. ")?;
            write_formula(f, body, 0)?;
        }
        Formula::DiaBind(x, y, body) => {
            write!(f, "P {x} {y}. ")?;
            write_formula(f, body, 0)?;
        }
    }
    if paren {
        f.write_str(")")?;
    }
    Ok(())
}

impl Display for Formula {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write_formula(f, self, 0)
    }
}
