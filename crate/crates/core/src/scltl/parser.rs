//! Concrete syntax, tightest binding first: `!`, prefix `X`/`F`, right-associative
//! `U`, `&`, `|`. Chains of `&` or `|` build balanced trees. `X` and `F` are
//! operators when an operand follows them and plain propositions otherwise, so
//! `!(B | F) U A` reads `F` as a proposition.

use super::{Alphabet, Formula};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("undeclared proposition {name:?} at {pos}")]
    Undeclared { name: String, pos: usize },
    #[error("negated temporal operator at {pos} is outside the co-safe fragment")]
    NegatedTemporal { pos: usize },
    #[error("negated constant at {pos}")]
    NegatedConstant { pos: usize },
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    True,
    Bang,
    Amp,
    Pipe,
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let mut out = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            c if c.is_whitespace() => i += 1,
            '!' => {
                out.push((Tok::Bang, i));
                i += 1;
            }
            '&' => {
                out.push((Tok::Amp, i));
                i += if bytes.get(i + 1) == Some(&b'&') { 2 } else { 1 };
            }
            '|' => {
                out.push((Tok::Pipe, i));
                i += if bytes.get(i + 1) == Some(&b'|') { 2 } else { 1 };
            }
            '(' => {
                out.push((Tok::LParen, i));
                i += 1;
            }
            ')' => {
                out.push((Tok::RParen, i));
                i += 1;
            }
            c if c.is_ascii_alphanumeric() || c == '_' => {
                let start = i;
                while i < bytes.len() && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                let word = &text[start..i];
                match word {
                    "true" => out.push((Tok::True, start)),
                    "false" => {
                        return Err(ParseError::Syntax {
                            pos: start,
                            msg: "`false` is not part of the input syntax".into(),
                        })
                    }
                    _ => out.push((Tok::Ident(word.to_string()), start)),
                }
            }
            other => {
                return Err(ParseError::Syntax {
                    pos: i,
                    msg: format!("unexpected character {other:?}"),
                })
            }
        }
    }
    Ok(out)
}

/// Surface tree before negations are pushed to the literals.
#[derive(Debug)]
enum Raw {
    True,
    Prop(String),
    Not(Box<Raw>, usize),
    And(Vec<Raw>),
    Or(Vec<Raw>),
    Next(Box<Raw>),
    Eventually(Box<Raw>),
    Until(Box<Raw>, Box<Raw>),
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
    alphabet: &'a Alphabet,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|(t, _)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(_, p)| *p)
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        self.pos += 1;
        t
    }

    fn starts_operand(t: Option<&Tok>) -> bool {
        match t {
            Some(Tok::Ident(w)) => w != "U",
            Some(Tok::True) | Some(Tok::Bang) | Some(Tok::LParen) => true,
            _ => false,
        }
    }

    fn or_expr(&mut self) -> Result<Raw, ParseError> {
        let mut items = vec![self.and_expr()?];
        while self.peek() == Some(&Tok::Pipe) {
            self.bump();
            items.push(self.and_expr()?);
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { Raw::Or(items) })
    }

    fn and_expr(&mut self) -> Result<Raw, ParseError> {
        let mut items = vec![self.until_expr()?];
        while self.peek() == Some(&Tok::Amp) {
            self.bump();
            items.push(self.until_expr()?);
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { Raw::And(items) })
    }

    fn until_expr(&mut self) -> Result<Raw, ParseError> {
        let lhs = self.prefix()?;
        if matches!(self.peek(), Some(Tok::Ident(w)) if w == "U") {
            self.bump();
            let rhs = self.until_expr()?;
            return Ok(Raw::Until(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn prefix(&mut self) -> Result<Raw, ParseError> {
        match self.peek() {
            Some(Tok::Bang) => {
                let (_, at) = self.bump();
                Ok(Raw::Not(Box::new(self.prefix()?), at))
            }
            Some(Tok::Ident(w)) if (w == "X" || w == "F") && Self::starts_operand(self.peek_at(1)) => {
                let is_next = w == "X";
                self.bump();
                let body = Box::new(self.prefix()?);
                Ok(if is_next { Raw::Next(body) } else { Raw::Eventually(body) })
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Raw, ParseError> {
        let at = self.here();
        match self.peek().cloned() {
            Some(Tok::True) => {
                self.bump();
                Ok(Raw::True)
            }
            Some(Tok::Ident(w)) if w != "U" => {
                self.bump();
                if !self.alphabet.contains(&w) {
                    return Err(ParseError::Undeclared { name: w, pos: at });
                }
                Ok(Raw::Prop(w))
            }
            Some(Tok::LParen) => {
                self.bump();
                let inner = self.or_expr()?;
                match self.peek() {
                    Some(Tok::RParen) => {
                        self.bump();
                        Ok(inner)
                    }
                    _ => Err(ParseError::Syntax { pos: self.here(), msg: "expected `)`".into() }),
                }
            }
            Some(t) => Err(ParseError::Syntax { pos: at, msg: format!("unexpected token {t:?}") }),
            None => Err(ParseError::Syntax { pos: at, msg: "unexpected end of input".into() }),
        }
    }
}

/// `neg` carries the position of the innermost pending negation, if any.
fn nnf(raw: Raw, neg: Option<usize>) -> Result<Formula, ParseError> {
    Ok(match (raw, neg) {
        (Raw::True, None) => Formula::True,
        (Raw::True, Some(pos)) => return Err(ParseError::NegatedConstant { pos }),
        (Raw::Prop(p), None) => Formula::Atom(p),
        (Raw::Prop(p), Some(_)) => Formula::NegAtom(p),
        (Raw::Not(inner, at), neg) => nnf(*inner, if neg.is_some() { None } else { Some(at) })?,
        (Raw::And(items), neg) => {
            let parts = items.into_iter().map(|r| nnf(r, neg)).collect::<Result<Vec<_>, _>>()?;
            if neg.is_some() { Formula::balanced_or(parts) } else { Formula::balanced_and(parts) }
                .expect("nonempty chain")
        }
        (Raw::Or(items), neg) => {
            let parts = items.into_iter().map(|r| nnf(r, neg)).collect::<Result<Vec<_>, _>>()?;
            if neg.is_some() { Formula::balanced_and(parts) } else { Formula::balanced_or(parts) }
                .expect("nonempty chain")
        }
        (Raw::Next(..) | Raw::Eventually(..) | Raw::Until(..), Some(pos)) => {
            return Err(ParseError::NegatedTemporal { pos })
        }
        (Raw::Next(f), None) => Formula::next(nnf(*f, None)?),
        (Raw::Eventually(f), None) => Formula::eventually(nnf(*f, None)?),
        (Raw::Until(l, r), None) => Formula::until(nnf(*l, None)?, nnf(*r, None)?),
    })
}

/// Parse `text` into an NNF formula over `alphabet`.
pub fn parse(text: &str, alphabet: &Alphabet) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    if toks.is_empty() {
        return Err(ParseError::Syntax { pos: 0, msg: "empty formula".into() });
    }
    let mut p = Parser { toks, pos: 0, end: text.len(), alphabet };
    let raw = p.or_expr()?;
    if p.pos != p.toks.len() {
        return Err(ParseError::Syntax { pos: p.here(), msg: "trailing input".into() });
    }
    nnf(raw, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab(names: &[&str]) -> Alphabet {
        Alphabet::new(names.iter().copied()).unwrap()
    }

    #[test]
    fn eventually_maps_to_constructor() {
        let f = parse("F A", &ab(&["A"])).unwrap();
        assert_eq!(f, Formula::eventually(Formula::atom("A")));
    }

    #[test]
    fn negated_disjunction_with_f_as_proposition() {
        let a = ab(&["A", "B", "C", "D", "F"]);
        let f = parse("!(B | C | D | F) U A", &a).unwrap();
        let guard = Formula::and_raw(
            Formula::and_raw(Formula::neg_atom("B"), Formula::neg_atom("C")),
            Formula::and_raw(Formula::neg_atom("D"), Formula::neg_atom("F")),
        );
        assert_eq!(f, Formula::until(guard, Formula::atom("A")));
    }

    #[test]
    fn negated_next_is_rejected() {
        assert!(matches!(parse("!(X A)", &ab(&["A"])), Err(ParseError::NegatedTemporal { pos: 0 })));
        assert!(matches!(parse("!(a U b)", &ab(&["a", "b"])), Err(ParseError::NegatedTemporal { .. })));
        assert!(matches!(parse("!F a", &ab(&["a"])), Err(ParseError::NegatedTemporal { .. })));
    }

    #[test]
    fn precedence_and_associativity() {
        let a = ab(&["a", "b", "c"]);
        assert_eq!(parse("a & b U c", &a).unwrap().to_string(), "(a & (b U c))");
        assert_eq!(parse("a U b U c", &a).unwrap().to_string(), "(a U (b U c))");
        assert_eq!(parse("X a U b", &a).unwrap().to_string(), "(X a U b)");
        assert_eq!(parse("a | b & c", &a).unwrap().to_string(), "(a | (b & c))");
        assert_eq!(parse("!!a", &a).unwrap(), Formula::atom("a"));
        assert_eq!(parse("!(a & !b)", &a).unwrap().to_string(), "(!a | b)");
    }

    #[test]
    fn contextual_keywords() {
        let a = ab(&["F", "X", "A"]);
        assert_eq!(parse("F F", &a).unwrap(), Formula::eventually(Formula::atom("F")));
        assert_eq!(parse("X", &a).unwrap(), Formula::atom("X"));
        assert_eq!(parse("F U A", &a).unwrap(), Formula::until(Formula::atom("F"), Formula::atom("A")));
        assert_eq!(parse("X F", &a).unwrap(), Formula::next(Formula::atom("F")));
    }

    #[test]
    fn errors_are_positioned() {
        let a = ab(&["a"]);
        assert_eq!(parse("a & b", &a), Err(ParseError::Undeclared { name: "b".into(), pos: 4 }));
        assert!(matches!(parse("(a", &a), Err(ParseError::Syntax { pos: 2, .. })));
        assert!(matches!(parse("a a", &a), Err(ParseError::Syntax { pos: 2, .. })));
        assert!(matches!(parse("", &a), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse("a # a", &a), Err(ParseError::Syntax { pos: 2, .. })));
        assert!(matches!(parse("false", &a), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse("!true", &a), Err(ParseError::NegatedConstant { pos: 0 })));
        assert!(matches!(parse("a U", &a), Err(ParseError::Syntax { .. })));
    }

    #[test]
    fn display_reparses_to_same_tree() {
        let a = ab(&["a", "b", "F"]);
        for text in ["F (a & X b)", "(a | b) U F", "X X a", "!a U (b | F a)", "a & b & F & !b"] {
            let f = parse(text, &a).unwrap();
            assert_eq!(parse(&f.to_string(), &a).unwrap(), f, "{text}");
        }
    }
}
