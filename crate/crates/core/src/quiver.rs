//! Quivers, their doubles, and dimension vectors.
//!
//! Vertices are numbered `1..=k`. A word `x1 x2 ... xn` is read as a
//! composition written right to left: `xn` is applied first, so the word is
//! composable when `t(x_i) = h(x_{i+1})` for every adjacent pair.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Arrow {
    pub name: String,
    pub tail: usize,
    pub head: usize,
}

impl Arrow {
    pub fn is_loop(&self) -> bool {
        self.tail == self.head
    }
}

/// A letter of the doubled quiver: a base arrow or the dual of one.
///
/// The derived order puts every base arrow before every dual, each group in
/// declaration order. Canonical necklace rotations are minimal in this order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    Arrow(usize),
    Dual(usize),
}

impl Letter {
    pub fn arrow(&self) -> usize {
        match *self {
            Letter::Arrow(i) | Letter::Dual(i) => i,
        }
    }

    pub fn is_dual(&self) -> bool {
        matches!(self, Letter::Dual(_))
    }

    pub fn dual(&self) -> Letter {
        match *self {
            Letter::Arrow(i) => Letter::Dual(i),
            Letter::Dual(i) => Letter::Arrow(i),
        }
    }

    /// Sort key used for serialization: each dual directly after its arrow.
    pub fn serial_key(&self) -> (usize, bool) {
        (self.arrow(), self.is_dual())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quiver {
    num_vertices: usize,
    arrows: Vec<Arrow>,
    by_name: HashMap<String, usize>,
}

fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Quiver {
    /// Builds a quiver from `(name, tail, head)` triples.
    pub fn new<S: AsRef<str>>(num_vertices: usize, arrows: &[(S, usize, usize)]) -> Result<Self> {
        let mut q = Quiver {
            num_vertices,
            arrows: Vec::with_capacity(arrows.len()),
            by_name: HashMap::new(),
        };
        for (name, tail, head) in arrows {
            q.push_arrow(name.as_ref(), *tail, *head)?;
        }
        Ok(q)
    }

    fn push_arrow(&mut self, name: &str, tail: usize, head: usize) -> Result<()> {
        if !valid_name(name) {
            return Err(Error::Usage(format!("invalid arrow name `{name}`")));
        }
        if self.by_name.contains_key(name) {
            return Err(Error::DuplicateArrow(name.to_string()));
        }
        for v in [tail, head] {
            if v == 0 || v > self.num_vertices {
                return Err(Error::UndeclaredVertex {
                    arrow: name.to_string(),
                    vertex: v,
                });
            }
        }
        self.by_name.insert(name.to_string(), self.arrows.len());
        self.arrows.push(Arrow {
            name: name.to_string(),
            tail,
            head,
        });
        Ok(())
    }

    /// Parses the line-based quiver format:
    ///
    /// ```text
    /// vertices: 2
    /// arrow x 1 -> 2   # comment
    /// ```
    pub fn parse(src: &str) -> Result<Self> {
        let mut quiver: Option<Quiver> = None;
        for (idx, raw) in src.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: &str| Error::Parse {
                line: line_no,
                msg: msg.to_string(),
            };
            if let Some(rest) = line.strip_prefix("vertices") {
                let rest = rest.trim_start();
                let rest = rest.strip_prefix(':').ok_or_else(|| err("expected `vertices: <k>`"))?;
                if quiver.is_some() {
                    return Err(err("vertex count declared twice"));
                }
                let k: usize = rest
                    .trim()
                    .parse()
                    .map_err(|_| err("vertex count must be a nonnegative integer"))?;
                quiver = Some(Quiver {
                    num_vertices: k,
                    arrows: Vec::new(),
                    by_name: HashMap::new(),
                });
            } else if let Some(rest) = line.strip_prefix("arrow") {
                if !rest.starts_with(char::is_whitespace) {
                    return Err(err("expected `arrow <name> <i> -> <j>`"));
                }
                let q = quiver
                    .as_mut()
                    .ok_or_else(|| err("`vertices:` must precede arrows"))?;
                let rest = rest.trim();
                let (name, ends) = rest
                    .split_once(char::is_whitespace)
                    .ok_or_else(|| err("expected `arrow <name> <i> -> <j>`"))?;
                let (tail, head) = ends
                    .split_once("->")
                    .ok_or_else(|| err("expected `<i> -> <j>`"))?;
                let tail: usize = tail.trim().parse().map_err(|_| err("bad tail vertex"))?;
                let head: usize = head.trim().parse().map_err(|_| err("bad head vertex"))?;
                q.push_arrow(name, tail, head).map_err(|e| match e {
                    Error::Usage(m) => Error::Parse { line: line_no, msg: m },
                    other => other,
                })?;
            } else {
                return Err(err("unrecognized line"));
            }
        }
        quiver.ok_or(Error::Parse {
            line: 0,
            msg: "missing `vertices:` declaration".into(),
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn vertices(&self) -> impl Iterator<Item = usize> {
        1..=self.num_vertices
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn num_arrows(&self) -> usize {
        self.arrows.len()
    }

    pub fn arrow(&self, idx: usize) -> &Arrow {
        &self.arrows[idx]
    }

    pub fn arrow_index(&self, name: &str) -> Option<usize> {
        self.by_name.get(name).copied()
    }

    pub fn tail(&self, l: Letter) -> usize {
        match l {
            Letter::Arrow(i) => self.arrows[i].tail,
            Letter::Dual(i) => self.arrows[i].head,
        }
    }

    pub fn head(&self, l: Letter) -> usize {
        match l {
            Letter::Arrow(i) => self.arrows[i].head,
            Letter::Dual(i) => self.arrows[i].tail,
        }
    }

    pub fn letter_name(&self, l: Letter) -> String {
        match l {
            Letter::Arrow(i) => self.arrows[i].name.clone(),
            Letter::Dual(i) => format!("{}'", self.arrows[i].name),
        }
    }

    /// `(tail, head)` of a nonempty word, or the first failing position.
    pub fn word_endpoints(&self, word: &[Letter]) -> Result<(usize, usize)> {
        let (first, last) = match (word.first(), word.last()) {
            (Some(f), Some(l)) => (*f, *l),
            _ => return Err(Error::Usage("empty word has no endpoints".into())),
        };
        for (i, pair) in word.windows(2).enumerate() {
            if self.tail(pair[0]) != self.head(pair[1]) {
                return Err(Error::NonComposable { position: i + 1 });
            }
        }
        Ok((self.tail(last), self.head(first)))
    }

    pub fn is_closed(&self, word: &[Letter]) -> bool {
        matches!(self.word_endpoints(word), Ok((t, h)) if t == h)
    }

    pub fn double(&self) -> DoubledQuiver {
        DoubledQuiver {
            base: Arc::new(self.clone()),
        }
    }

    /// Arrows ending at `v` (the set S_v).
    pub fn arrows_into(&self, v: usize) -> Vec<usize> {
        (0..self.arrows.len()).filter(|&i| self.arrows[i].head == v).collect()
    }

    /// Arrows starting at `v` (the set T_v).
    pub fn arrows_out_of(&self, v: usize) -> Vec<usize> {
        (0..self.arrows.len()).filter(|&i| self.arrows[i].tail == v).collect()
    }
}

impl fmt::Display for Quiver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "vertices: {}", self.num_vertices)?;
        for a in &self.arrows {
            writeln!(f, "arrow {} {} -> {}", a.name, a.tail, a.head)?;
        }
        Ok(())
    }
}

/// The double of a quiver: every arrow `a` gets a dual `a'` with the
/// endpoints swapped.
#[derive(Debug, Clone)]
pub struct DoubledQuiver {
    base: Arc<Quiver>,
}

impl DoubledQuiver {
    pub fn base(&self) -> &Arc<Quiver> {
        &self.base
    }

    /// All letters: base arrows in declaration order, then their duals.
    pub fn letters(&self) -> Vec<Letter> {
        let n = self.base.num_arrows();
        (0..n).map(Letter::Arrow).chain((0..n).map(Letter::Dual)).collect()
    }

    pub fn num_letters(&self) -> usize {
        2 * self.base.num_arrows()
    }

    /// `(tail, head)` of a letter.
    pub fn endpoints(&self, l: Letter) -> (usize, usize) {
        (self.base.tail(l), self.base.head(l))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DimensionVector {
    alpha: Vec<usize>,
}

impl DimensionVector {
    pub fn new(alpha: Vec<usize>) -> Self {
        DimensionVector { alpha }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let alpha = s
            .split(',')
            .map(|t| t.trim().parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| Error::Usage(format!("bad dimension vector `{s}`")))?;
        Ok(DimensionVector { alpha })
    }

    pub fn entries(&self) -> &[usize] {
        &self.alpha
    }

    /// Dimension at vertex `v` (1-based).
    pub fn at(&self, v: usize) -> usize {
        self.alpha[v - 1]
    }

    pub fn total(&self) -> usize {
        self.alpha.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    /// Row offset of the diagonal block belonging to vertex `v`.
    pub fn offset(&self, v: usize) -> usize {
        self.alpha[..v - 1].iter().sum()
    }

    pub fn check(&self, q: &Quiver) -> Result<()> {
        if self.alpha.len() != q.num_vertices() {
            return Err(Error::Shape(format!(
                "dimension vector has {} entries, quiver has {} vertices",
                self.alpha.len(),
                q.num_vertices()
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kronecker3() -> Quiver {
        Quiver::parse("vertices:2\narrow x 1->2\narrow y 1->2\narrow z 1->2\n").unwrap()
    }

    #[test]
    fn parses_kronecker_and_loops() {
        let q = kronecker3();
        assert_eq!(q.num_vertices(), 2);
        assert_eq!(q.num_arrows(), 3);
        assert_eq!(q.arrow(2).name, "z");
        assert_eq!((q.arrow(0).tail, q.arrow(0).head), (1, 2));

        let free = Quiver::parse("vertices: 1\narrow x 1 -> 1\narrow y 1 -> 1 # loop\n").unwrap();
        assert!(free.arrows().iter().all(Arrow::is_loop));

        let trivial = Quiver::parse("vertices: 1\n").unwrap();
        assert_eq!(trivial.num_arrows(), 0);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let e = Quiver::parse("vertices: 2\narrow x 1 -> 2\narrow x 2 -> 1\n").unwrap_err();
        assert_eq!(e, Error::DuplicateArrow("x".into()));
        let e = Quiver::parse("vertices: 2\narrow x 1 -> 3\n").unwrap_err();
        assert!(matches!(e, Error::UndeclaredVertex { vertex: 3, .. }));
        let e = Quiver::parse("vertices: 2\n\narrow x 1 2\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }));
        let e = Quiver::parse("vertices: 2\nbogus\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
        let e = Quiver::parse("vertices: 2\narrow 9x 1 -> 2\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn display_round_trips() {
        let q = kronecker3();
        assert_eq!(Quiver::parse(&q.to_string()).unwrap(), q);
    }

    #[test]
    fn doubling() {
        let q = Quiver::new(2, &[("x", 1, 2), ("y", 1, 2)]).unwrap();
        let d = q.double();
        assert_eq!(d.endpoints(Letter::Dual(0)), (2, 1));
        assert_eq!(d.endpoints(Letter::Arrow(1)), (1, 2));
        let l = Quiver::new(1, &[("a", 1, 1)]).unwrap().double();
        assert_eq!(l.endpoints(Letter::Dual(0)), (1, 1));
        assert_eq!(kronecker3().double().num_letters(), 6);
    }

    #[test]
    fn endpoints_of_words() {
        let q = Quiver::new(2, &[("x", 1, 2), ("y", 1, 2)]).unwrap();
        // x y': apply y' (2 -> 1), then x (1 -> 2)
        assert_eq!(q.word_endpoints(&[Letter::Arrow(0), Letter::Dual(1)]), Ok((2, 2)));
        assert!(q.is_closed(&[Letter::Arrow(0), Letter::Dual(1)]));
        assert_eq!(
            q.word_endpoints(&[Letter::Arrow(0), Letter::Arrow(0)]),
            Err(Error::NonComposable { position: 1 })
        );
        let l = Quiver::new(1, &[("a", 1, 1)]).unwrap();
        assert_eq!(l.word_endpoints(&[Letter::Arrow(0)]), Ok((1, 1)));
    }

    #[test]
    fn dimension_vectors() {
        let a = DimensionVector::parse("2, 3").unwrap();
        assert_eq!(a.total(), 5);
        assert_eq!(a.offset(2), 2);
        assert!(a.check(&kronecker3()).is_ok());
        assert!(DimensionVector::new(vec![1]).check(&kronecker3()).is_err());
    }
}
