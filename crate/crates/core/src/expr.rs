//! Text syntax for path-algebra elements.
//!
//! ```text
//! element  := ['+'|'-'] term (('+'|'-') term)*
//! term     := [rational] factor+
//! factor   := arrowName ['\''] | 'e' vertexId | '[' element ',' element ']' | '(' element ')'
//! rational := integer ['/' positiveInteger]
//! ```
//!
//! Juxtaposition is the concatenation product, `[P,Q]` expands to
//! `PQ - QP` and an apostrophe marks the dual arrow. The single token `0`
//! denotes the zero element.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::coeff::{self, Coeff};
use crate::error::{Error, Result};
use crate::path_algebra::{FreeElement, Word};
use crate::quiver::{Letter, Quiver};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    Prime,
    Slash,
    Plus,
    Minus,
    LBrack,
    RBrack,
    Comma,
    LParen,
    RParen,
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let tok = if c.is_ascii_alphabetic() {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((start, Tok::Ident(chars[start..i].iter().collect())));
            continue;
        } else if c.is_ascii_digit() {
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push((start, Tok::Int(s.parse().expect("digits"))));
            continue;
        } else {
            match c {
                '\'' => Tok::Prime,
                '/' => Tok::Slash,
                '+' => Tok::Plus,
                '-' => Tok::Minus,
                '[' => Tok::LBrack,
                ']' => Tok::RBrack,
                ',' => Tok::Comma,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                _ => {
                    return Err(Error::Parse {
                        line: 1,
                        msg: format!("unexpected character `{c}` at column {}", start + 1),
                    })
                }
            }
        };
        out.push((start, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    quiver: &'a Arc<Quiver>,
}

/// A factor before multiplication: a single letter is kept apart so that runs
/// of letters can be checked for composability.
enum Factor {
    Letter(Letter),
    Element(FreeElement),
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        let col = self.toks.get(self.pos).map_or(0, |(c, _)| c + 1);
        Error::Parse {
            line: 1,
            msg: format!("{} (column {col})", msg.into()),
        }
    }

    fn expect(&mut self, t: Tok) -> Result<()> {
        if self.peek() == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected {t:?}")))
        }
    }

    fn element(&mut self) -> Result<FreeElement> {
        let mut acc = FreeElement::zero(self.quiver.clone());
        let mut negate = match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                true
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                false
            }
            _ => false,
        };
        loop {
            let t = self.term()?;
            acc = if negate { &acc - &t } else { &acc + &t };
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    negate = false;
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    negate = true;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn starts_factor(&self) -> bool {
        matches!(self.peek(), Some(Tok::Ident(_) | Tok::LBrack | Tok::LParen))
    }

    fn term(&mut self) -> Result<FreeElement> {
        let mut scalar = coeff::one();
        if let Some(Tok::Int(n)) = self.peek().cloned() {
            self.pos += 1;
            let mut den = BigInt::one();
            if self.peek() == Some(&Tok::Slash) {
                self.pos += 1;
                match self.peek().cloned() {
                    Some(Tok::Int(d)) if d.is_positive() => {
                        den = d;
                        self.pos += 1;
                    }
                    _ => return Err(self.err("malformed rational: expected a positive denominator")),
                }
            }
            scalar = Coeff::new(n, den);
        }
        if !self.starts_factor() {
            return Err(self.err("expected a factor"));
        }
        let mut factors = Vec::new();
        while self.starts_factor() {
            factors.push(self.factor()?);
        }
        let q = self.quiver.clone();
        let mut acc: Option<FreeElement> = None;
        let mut run: Vec<Letter> = Vec::new();
        let flush = |run: &mut Vec<Letter>, acc: &mut Option<FreeElement>| -> Result<()> {
            if run.is_empty() {
                return Ok(());
            }
            q.word_endpoints(run)?;
            let w = FreeElement::monomial(q.clone(), Word::Path(std::mem::take(run)), coeff::one())?;
            *acc = Some(match acc.take() {
                None => w,
                Some(a) => &a * &w,
            });
            Ok(())
        };
        for f in factors {
            match f {
                Factor::Letter(l) => run.push(l),
                Factor::Element(e) => {
                    flush(&mut run, &mut acc)?;
                    acc = Some(match acc.take() {
                        None => e,
                        Some(a) => &a * &e,
                    });
                }
            }
        }
        flush(&mut run, &mut acc)?;
        Ok(acc.expect("at least one factor").scale(&scalar))
    }

    fn factor(&mut self) -> Result<Factor> {
        match self.peek().cloned() {
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if let Some(i) = self.quiver.arrow_index(&name) {
                    if self.peek() == Some(&Tok::Prime) {
                        self.pos += 1;
                        return Ok(Factor::Letter(Letter::Dual(i)));
                    }
                    return Ok(Factor::Letter(Letter::Arrow(i)));
                }
                if let Some(v) = self.idempotent_vertex(&name)? {
                    return Ok(Factor::Element(FreeElement::idempotent(self.quiver.clone(), v)?));
                }
                Err(Error::UnknownArrow(name))
            }
            Some(Tok::LBrack) => {
                self.pos += 1;
                let a = self.element()?;
                self.expect(Tok::Comma)?;
                let b = self.element()?;
                self.expect(Tok::RBrack)?;
                Ok(Factor::Element(a.commutator(&b)?))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let a = self.element()?;
                self.expect(Tok::RParen)?;
                Ok(Factor::Element(a))
            }
            _ => Err(self.err("expected a factor")),
        }
    }

    /// `e3` as one token, or `e` followed by an integer token.
    fn idempotent_vertex(&mut self, name: &str) -> Result<Option<usize>> {
        let Some(rest) = name.strip_prefix('e') else {
            return Ok(None);
        };
        let v: usize = if rest.is_empty() {
            match self.peek().cloned() {
                Some(Tok::Int(n)) => {
                    self.pos += 1;
                    n.try_into().map_err(|_| self.err("vertex id out of range"))?
                }
                _ => return Ok(None),
            }
        } else if rest.chars().all(|c| c.is_ascii_digit()) {
            rest.parse().map_err(|_| self.err("vertex id out of range"))?
        } else {
            return Ok(None);
        };
        if v == 0 || v > self.quiver.num_vertices() {
            return Err(self.err(format!("no vertex {v}")));
        }
        Ok(Some(v))
    }
}

/// Parses an element expression against a quiver.
pub fn parse_element(src: &str, quiver: &Arc<Quiver>) -> Result<FreeElement> {
    let toks = lex(src)?;
    if toks.len() == 1 && toks[0].1 == Tok::Int(BigInt::zero()) {
        return Ok(FreeElement::zero(quiver.clone()));
    }
    let mut p = Parser { toks, pos: 0, quiver };
    let e = p.element()?;
    if p.pos != p.toks.len() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}

/// Renders terms as `c w + c w - ...`, omitting unit coefficients.
pub fn format_terms<'a>(q: &Quiver, terms: impl IntoIterator<Item = (&'a Word, &'a Coeff)>) -> String {
    let mut out = String::new();
    for (i, (w, c)) in terms.into_iter().enumerate() {
        let neg = c.is_negative();
        let mag = c.abs();
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        if !mag.is_one() {
            out.push_str(&coeff::format(&mag));
            out.push(' ');
        }
        out.push_str(&w.display(q));
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// JSON form `{"schema": 1, "terms": [{"word": [...], "coeff": "p/q"}]}`.
pub fn terms_to_json<'a>(q: &Quiver, terms: impl IntoIterator<Item = (&'a Word, &'a Coeff)>) -> Value {
    let terms: Vec<Value> = terms
        .into_iter()
        .map(|(w, c)| json!({ "word": w.tokens(q), "coeff": coeff::format(c) }))
        .collect();
    json!({ "schema": 1, "terms": terms })
}

/// Reads the JSON form back.
pub fn terms_from_json(q: &Arc<Quiver>, v: &Value) -> Result<BTreeMap<Word, Coeff>> {
    let bad = |m: &str| Error::Parse {
        line: 0,
        msg: m.to_string(),
    };
    let terms = v.get("terms").and_then(Value::as_array).ok_or_else(|| bad("missing `terms`"))?;
    let mut out = BTreeMap::new();
    for t in terms {
        let word = t.get("word").and_then(Value::as_array).ok_or_else(|| bad("missing `word`"))?;
        let c = t
            .get("coeff")
            .and_then(Value::as_str)
            .and_then(coeff::parse)
            .ok_or_else(|| bad("bad `coeff`"))?;
        let src = word
            .iter()
            .map(|x| x.as_str().map(str::to_string))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| bad("word tokens must be strings"))?
            .join(" ");
        let e = parse_element(&src, q)?;
        let (w, _) = e.terms().iter().next().ok_or_else(|| bad("empty word"))?;
        coeff::accumulate(&mut out, w.clone(), c);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{int, ratio};

    fn loops() -> Arc<Quiver> {
        Arc::new(Quiver::new(1, &[("x", 1, 1), ("y", 1, 1)]).unwrap())
    }

    fn kron() -> Arc<Quiver> {
        Arc::new(Quiver::new(2, &[("x", 1, 2), ("y", 1, 2)]).unwrap())
    }

    #[test]
    fn commutator_expands() {
        let q = loops();
        let e = parse_element("[x y', x x']", &q).unwrap();
        let expected = parse_element("x y' x x' - x x' x y'", &q).unwrap();
        assert_eq!(e, expected);
        assert_eq!(e.len(), 2);
    }

    #[test]
    fn rationals_and_idempotents() {
        let q = kron();
        let e = parse_element("3/2 e1", &q).unwrap();
        assert_eq!(e.coeff(&Word::Idempotent(1)), ratio(3, 2));
        let e = parse_element("e 2 x", &q).unwrap();
        assert_eq!(e, parse_element("x", &q).unwrap());
        assert!(parse_element("e1 x", &q).unwrap().is_zero());
        assert!(matches!(parse_element("e3", &q), Err(Error::Parse { .. })));
    }

    #[test]
    fn errors() {
        let q = kron();
        assert_eq!(parse_element("w", &q), Err(Error::UnknownArrow("w".into())));
        assert_eq!(parse_element("x y' x x", &q), Err(Error::NonComposable { position: 3 }));
        assert!(matches!(parse_element("1/0 x", &q), Err(Error::Parse { .. })));
        assert!(matches!(parse_element("2", &q), Err(Error::Parse { .. })));
        assert!(matches!(parse_element("[x, y", &q), Err(Error::Parse { .. })));
    }

    #[test]
    fn signs_and_parentheses() {
        let q = loops();
        let e = parse_element("-(x + y) x' + 2 y y'", &q).unwrap();
        let f = parse_element("-x x' - y x' + 2 y y'", &q).unwrap();
        assert_eq!(e, f);
        assert_eq!(e.coeff(&Word::Path(vec![Letter::Arrow(1), Letter::Dual(1)])), int(2));
    }

    #[test]
    fn display_round_trips() {
        let q = loops();
        let e = parse_element("-1/3 y x y y' + [x x', x'] + 5 e1", &q).unwrap();
        let s = e.to_string();
        assert_eq!(parse_element(&s, &q).unwrap(), e);
        assert_eq!(FreeElement::zero(q.clone()).to_string(), "0");
        assert!(parse_element("0", &q).unwrap().is_zero());
    }

    #[test]
    fn json_round_trips() {
        let q = loops();
        let e = parse_element("x y' - 1/2 e1", &q).unwrap();
        let v = terms_to_json(&q, e.sorted_terms());
        assert_eq!(v["schema"], 1);
        assert_eq!(v["terms"][0]["word"][0], "e1");
        assert_eq!(v["terms"][0]["coeff"], "-1/2");
        let back = terms_from_json(&q, &v).unwrap();
        assert_eq!(&back, e.terms());
    }
}
