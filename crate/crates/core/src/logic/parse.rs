//! Text grammar for concepts and formulas.
//!
//! ```text
//! concept  := and ('|' and)*
//! and      := unary ('&' unary)*
//! unary    := '~' unary | '<' role '>' unary | postfix
//! postfix  := primary (('-' | '+') rational)*
//! primary  := rational | Atom | '(' concept ')'
//! ```
//!
//! Formulas reuse the connectives and add `E x. φ` (existential),
//! `P x y. φ` (expectation over successors `y` of `x`), `x = y` and
//! `A(x)`. Binder bodies extend as far right as possible. `C + q` is sugar
//! for `~(~C - q)`, and in formulas `φ | ψ` for `~(~φ & ~ψ)`.

use std::sync::Arc;

use thiserror::Error;

use super::{Concept, Formula};
use crate::rational::{in_unit_interval, parse_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at offset {position}: expected {expected}, found {found}")]
pub struct SyntaxError {
    pub position: usize,
    pub expected: String,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    LParen,
    RParen,
    Lt,
    Gt,
    Tilde,
    Amp,
    Bar,
    Minus,
    Plus,
    Dot,
    Equals,
    Number(String),
    Ident(String),
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Number(n) => format!("number {n}"),
            Tok::Ident(i) => format!("identifier {i:?}"),
            Tok::End => "end of input".into(),
            other => format!("{:?}", other.symbol()),
        }
    }

    fn symbol(&self) -> &'static str {
        match self {
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Lt => "<",
            Tok::Gt => ">",
            Tok::Tilde => "~",
            Tok::Amp => "&",
            Tok::Bar => "|",
            Tok::Minus => "-",
            Tok::Plus => "+",
            Tok::Dot => ".",
            Tok::Equals => "=",
            _ => "",
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, SyntaxError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let simple = match c {
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            b'<' => Some(Tok::Lt),
            b'>' => Some(Tok::Gt),
            b'~' => Some(Tok::Tilde),
            b'&' => Some(Tok::Amp),
            b'|' => Some(Tok::Bar),
            b'-' => Some(Tok::Minus),
            b'+' => Some(Tok::Plus),
            b'.' => Some(Tok::Dot),
            b'=' => Some(Tok::Equals),
            _ => None,
        };
        if let Some(tok) = simple {
            out.push((start, tok));
            i += 1;
        } else if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i + 1 < bytes.len() && bytes[i] == b'/' && bytes[i + 1].is_ascii_digit() {
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
            out.push((start, Tok::Number(text[start..i].to_string())));
        } else if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(text[start..i].to_string())));
        } else {
            let found = text[start..].chars().next().map(|ch| format!("{ch:?}")).unwrap_or_default();
            return Err(SyntaxError {
                position: start,
                expected: "a token".into(),
                found,
            });
        }
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

fn is_atom_name(s: &str) -> bool {
    s.starts_with(|c: char| c.is_ascii_uppercase())
}

fn is_var_name(s: &str) -> bool {
    s.starts_with(|c: char| c.is_ascii_lowercase())
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser {
    fn new(text: &str) -> Result<Self, SyntaxError> {
        Ok(Self { toks: lex(text)?, pos: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, expected: &str) -> Result<T, SyntaxError> {
        Err(SyntaxError {
            position: self.offset(),
            expected: expected.to_string(),
            found: self.peek().describe(),
        })
    }

    fn expect(&mut self, tok: Tok) -> Result<(), SyntaxError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.error(&format!("{:?}", tok.symbol()))
        }
    }

    fn finish(&self) -> Result<(), SyntaxError> {
        match self.peek() {
            Tok::End => Ok(()),
            _ => self.error("end of input"),
        }
    }

    fn unit_rational(&mut self) -> Result<Rational, SyntaxError> {
        let at = self.offset();
        match self.peek().clone() {
            Tok::Number(text) => {
                let q = parse_rational(&text).map_err(|e| SyntaxError {
                    position: at,
                    expected: "a rational p/q".into(),
                    found: e.to_string(),
                })?;
                if !in_unit_interval(&q) {
                    return Err(SyntaxError {
                        position: at,
                        expected: "a constant in [0,1]".into(),
                        found: text,
                    });
                }
                self.bump();
                Ok(q)
            }
            _ => self.error("a rational constant"),
        }
    }

    fn variable(&mut self) -> Result<String, SyntaxError> {
        match self.peek().clone() {
            Tok::Ident(v) if is_var_name(&v) => {
                self.bump();
                Ok(v)
            }
            _ => self.error("a variable (lower-case identifier)"),
        }
    }

    // ---- concepts ----

    fn concept_or(&mut self) -> Result<Arc<Concept>, SyntaxError> {
        let mut left = self.concept_and()?;
        while *self.peek() == Tok::Bar {
            self.bump();
            let right = self.concept_and()?;
            left = Concept::or(left, right);
        }
        Ok(left)
    }

    fn concept_and(&mut self) -> Result<Arc<Concept>, SyntaxError> {
        let mut left = self.concept_unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let right = self.concept_unary()?;
            left = Concept::and(left, right);
        }
        Ok(left)
    }

    fn concept_unary(&mut self) -> Result<Arc<Concept>, SyntaxError> {
        match self.peek() {
            Tok::Tilde => {
                self.bump();
                Ok(Concept::neg(self.concept_unary()?))
            }
            Tok::Lt => {
                self.bump();
                let role = match self.peek().clone() {
                    Tok::Ident(r) => {
                        self.bump();
                        r
                    }
                    _ => return self.error("a role name"),
                };
                self.expect(Tok::Gt)?;
                Ok(Concept::dia(&role, self.concept_unary()?))
            }
            _ => self.concept_postfix(),
        }
    }

    fn concept_postfix(&mut self) -> Result<Arc<Concept>, SyntaxError> {
        let mut c = self.concept_primary()?;
        loop {
            match self.peek() {
                Tok::Minus => {
                    self.bump();
                    c = Concept::trunc_sub(c, self.unit_rational()?);
                }
                Tok::Plus => {
                    self.bump();
                    c = Concept::trunc_add(c, self.unit_rational()?);
                }
                _ => return Ok(c),
            }
        }
    }

    fn concept_primary(&mut self) -> Result<Arc<Concept>, SyntaxError> {
        match self.peek().clone() {
            Tok::Number(_) => Ok(Concept::constant(self.unit_rational()?)),
            Tok::Ident(name) if is_atom_name(&name) => {
                self.bump();
                Ok(Concept::atom(&name))
            }
            Tok::LParen => {
                self.bump();
                let c = self.concept_or()?;
                self.expect(Tok::RParen)?;
                Ok(c)
            }
            _ => self.error("a constant, an atomic concept (capitalized), '~', '<role>' or '('"),
        }
    }

    // ---- formulas ----

    fn formula_or(&mut self) -> Result<Formula, SyntaxError> {
        let mut left = self.formula_and()?;
        while *self.peek() == Tok::Bar {
            self.bump();
            let right = self.formula_and()?;
            left = Formula::or(left, right);
        }
        Ok(left)
    }

    fn formula_and(&mut self) -> Result<Formula, SyntaxError> {
        let mut left = self.formula_unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let right = self.formula_unary()?;
            left = Formula::and(left, right);
        }
        Ok(left)
    }

    fn binder_ahead(&self, keyword: &str, vars: usize) -> bool {
        if !matches!(self.peek(), Tok::Ident(k) if k == keyword) {
            return false;
        }
        (1..=vars).all(|k| matches!(self.peek_at(k), Tok::Ident(v) if is_var_name(v)))
            && *self.peek_at(vars + 1) == Tok::Dot
    }

    fn formula_unary(&mut self) -> Result<Formula, SyntaxError> {
        if *self.peek() == Tok::Tilde {
            self.bump();
            return Ok(Formula::neg(self.formula_unary()?));
        }
        if self.binder_ahead("E", 1) {
            self.bump();
            let v = self.variable()?;
            self.expect(Tok::Dot)?;
            return Ok(Formula::exists(&v, self.formula_or()?));
        }
        if self.binder_ahead("P", 2) {
            self.bump();
            let x = self.variable()?;
            let y = self.variable()?;
            self.expect(Tok::Dot)?;
            return Ok(Formula::dia_bind(&x, &y, self.formula_or()?));
        }
        self.formula_postfix()
    }

    fn formula_postfix(&mut self) -> Result<Formula, SyntaxError> {
        let mut f = self.formula_primary()?;
        loop {
            match self.peek() {
                Tok::Minus => {
                    self.bump();
                    f = Formula::trunc_sub(f, self.unit_rational()?);
                }
                Tok::Plus => {
                    self.bump();
                    let q = self.unit_rational()?;
                    f = Formula::neg(Formula::trunc_sub(Formula::neg(f), q));
                }
                _ => return Ok(f),
            }
        }
    }

    fn formula_primary(&mut self) -> Result<Formula, SyntaxError> {
        match self.peek().clone() {
            Tok::Number(_) => Ok(Formula::Const(self.unit_rational()?)),
            Tok::Ident(name) if is_atom_name(&name) => {
                self.bump();
                self.expect(Tok::LParen)?;
                let v = self.variable()?;
                self.expect(Tok::RParen)?;
                Ok(Formula::atom(&name, &v))
            }
            Tok::Ident(name) if is_var_name(&name) => {
                self.bump();
                self.expect(Tok::Equals)?;
                let y = self.variable()?;
                Ok(Formula::eq(&name, &y))
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula_or()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            _ => self.error("a constant, A(x), x = y, '~', 'E x.', 'P x y.' or '('"),
        }
    }
}

pub fn parse_concept(text: &str) -> Result<Arc<Concept>, SyntaxError> {
    let mut p = Parser::new(text)?;
    let c = p.concept_or()?;
    p.finish()?;
    Ok(c)
}

pub fn parse_formula(text: &str) -> Result<Formula, SyntaxError> {
    let mut p = Parser::new(text)?;
    let f = p.formula_or()?;
    p.finish()?;
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn atom(a: &str) -> Arc<Concept> {
        Concept::atom(a)
    }

    #[test]
    fn diamond_atom() {
        assert_eq!(parse_concept("<r> A").unwrap(), Concept::dia("r", atom("A")));
    }

    #[test]
    fn truncated_subtraction_and_negation() {
        assert_eq!(
            parse_concept("(A - 1/4) & ~B").unwrap(),
            Concept::and(Concept::trunc_sub(atom("A"), ratio(1, 4)), Concept::neg(atom("B")))
        );
    }

    #[test]
    fn diamond_binds_tighter_than_and() {
        assert_eq!(
            parse_concept("<r> <r> A & <r> B").unwrap(),
            Concept::and(
                Concept::dia("r", Concept::dia("r", atom("A"))),
                Concept::dia("r", atom("B"))
            )
        );
    }

    #[test]
    fn and_binds_tighter_than_or() {
        assert_eq!(
            parse_concept("A | B & 1/2").unwrap(),
            Concept::or(atom("A"), Concept::and(atom("B"), Concept::constant(ratio(1, 2))))
        );
    }

    #[test]
    fn plus_is_sugar() {
        assert_eq!(
            parse_concept("A + 1/4").unwrap(),
            Concept::neg(Concept::trunc_sub(Concept::neg(atom("A")), ratio(1, 4)))
        );
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_concept("A & ").unwrap_err();
        assert_eq!(e.position, 4);
        let e = parse_concept("A & x").unwrap_err();
        assert_eq!(e.position, 4);
        let e = parse_concept("3/2").unwrap_err();
        assert_eq!(e.expected, "a constant in [0,1]");
        assert!(parse_concept("(A").is_err());
        assert!(parse_concept("A B").is_err());
        assert!(parse_concept("<r A").is_err());
        assert!(parse_concept("A $").is_err());
        assert!(parse_concept("1/0").is_err());
    }

    #[test]
    fn formulas() {
        assert_eq!(
            parse_formula("P x y. x = y").unwrap(),
            Formula::dia_bind("x", "y", Formula::eq("x", "y"))
        );
        assert_eq!(
            parse_formula("E y. P x z. z = y").unwrap(),
            Formula::exists("y", Formula::dia_bind("x", "z", Formula::eq("z", "y")))
        );
        assert_eq!(
            parse_formula("E x. A(x) & B(x)").unwrap(),
            Formula::exists("x", Formula::and(Formula::atom("A", "x"), Formula::atom("B", "x")))
        );
        assert_eq!(
            parse_formula("E(x)").unwrap(),
            Formula::atom("E", "x")
        );
        assert!(parse_formula("E x A(x)").is_err());
        assert!(parse_formula("x").is_err());
        assert!(parse_formula("A(X)").is_err());
    }
}
