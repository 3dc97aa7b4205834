//! The path algebra of the doubled quiver: noncommutative polynomials in
//! arrows and dual arrows, with exact rational coefficients.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::Zero;

use crate::coeff::{self, Coeff};
use crate::error::{Error, Result};
use crate::matrix::QMatrix;
use crate::quiver::{DimensionVector, Letter, Quiver};

/// A composable word in the doubled quiver, or the trivial path at a vertex.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Word {
    Idempotent(usize),
    Path(Vec<Letter>),
}

impl Word {
    pub fn letters(&self) -> &[Letter] {
        match self {
            Word::Idempotent(_) => &[],
            Word::Path(l) => l,
        }
    }

    pub fn len(&self) -> usize {
        self.letters().len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters().is_empty()
    }

    /// Number of dual letters.
    pub fn grade(&self) -> usize {
        self.letters().iter().filter(|l| l.is_dual()).count()
    }

    /// `(tail, head)`; the word must be composable.
    pub fn endpoints(&self, q: &Quiver) -> (usize, usize) {
        match self {
            Word::Idempotent(v) => (*v, *v),
            Word::Path(l) => (q.tail(*l.last().unwrap()), q.head(l[0])),
        }
    }

    pub fn is_closed(&self, q: &Quiver) -> bool {
        let (t, h) = self.endpoints(q);
        t == h
    }

    /// Builds a word from letters, turning an empty list into the trivial
    /// path at `vertex`.
    pub fn from_letters(letters: Vec<Letter>, vertex: usize) -> Word {
        if letters.is_empty() {
            Word::Idempotent(vertex)
        } else {
            Word::Path(letters)
        }
    }

    /// Concatenation `self · other`, `None` when the product vanishes.
    pub fn concat(&self, other: &Word, q: &Quiver) -> Option<Word> {
        let (t, _) = self.endpoints(q);
        let (_, h) = other.endpoints(q);
        if t != h {
            return None;
        }
        Some(match (self, other) {
            (Word::Idempotent(_), w) | (w, Word::Idempotent(_)) => w.clone(),
            (Word::Path(a), Word::Path(b)) => {
                let mut l = Vec::with_capacity(a.len() + b.len());
                l.extend_from_slice(a);
                l.extend_from_slice(b);
                Word::Path(l)
            }
        })
    }

    pub fn display(&self, q: &Quiver) -> String {
        match self {
            Word::Idempotent(v) => format!("e{v}"),
            Word::Path(l) => l.iter().map(|x| q.letter_name(*x)).collect::<Vec<_>>().join(" "),
        }
    }

    /// Tokens used by the JSON serialization.
    pub fn tokens(&self, q: &Quiver) -> Vec<String> {
        match self {
            Word::Idempotent(v) => vec![format!("e{v}")],
            Word::Path(l) => l.iter().map(|x| q.letter_name(*x)).collect(),
        }
    }
}

/// Serialization order: by length, then letter by letter with each dual right
/// after its base arrow. Trivial paths come first, ordered by vertex.
pub fn serial_cmp(a: &Word, b: &Word) -> Ordering {
    match (a, b) {
        (Word::Idempotent(u), Word::Idempotent(v)) => u.cmp(v),
        (Word::Idempotent(_), Word::Path(_)) => Ordering::Less,
        (Word::Path(_), Word::Idempotent(_)) => Ordering::Greater,
        (Word::Path(x), Word::Path(y)) => x
            .len()
            .cmp(&y.len())
            .then_with(|| x.iter().map(Letter::serial_key).cmp(y.iter().map(Letter::serial_key))),
    }
}

pub(crate) fn same_quiver(a: &Arc<Quiver>, b: &Arc<Quiver>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// A finite linear combination of composable words.
#[derive(Debug, Clone)]
pub struct FreeElement {
    quiver: Arc<Quiver>,
    terms: BTreeMap<Word, Coeff>,
}

impl PartialEq for FreeElement {
    fn eq(&self, other: &Self) -> bool {
        same_quiver(&self.quiver, &other.quiver) && self.terms == other.terms
    }
}

impl FreeElement {
    pub fn zero(quiver: Arc<Quiver>) -> Self {
        FreeElement {
            quiver,
            terms: BTreeMap::new(),
        }
    }

    /// `c · word`, validating composability.
    pub fn monomial(quiver: Arc<Quiver>, word: Word, c: Coeff) -> Result<Self> {
        match &word {
            Word::Idempotent(v) => {
                if *v == 0 || *v > quiver.num_vertices() {
                    return Err(Error::Usage(format!("no vertex {v}")));
                }
            }
            Word::Path(l) => {
                quiver.word_endpoints(l)?;
            }
        }
        let mut e = Self::zero(quiver);
        coeff::accumulate(&mut e.terms, word, c);
        Ok(e)
    }

    pub fn letter(quiver: Arc<Quiver>, l: Letter) -> Self {
        Self::monomial(quiver, Word::Path(vec![l]), coeff::one()).expect("single letters compose")
    }

    pub fn idempotent(quiver: Arc<Quiver>, v: usize) -> Result<Self> {
        Self::monomial(quiver, Word::Idempotent(v), coeff::one())
    }

    /// The unit `Σ e_i`.
    pub fn unit(quiver: Arc<Quiver>) -> Self {
        let mut e = Self::zero(quiver.clone());
        for v in quiver.vertices() {
            e.terms.insert(Word::Idempotent(v), coeff::one());
        }
        e
    }

    pub(crate) fn from_terms_unchecked(quiver: Arc<Quiver>, terms: BTreeMap<Word, Coeff>) -> Self {
        FreeElement { quiver, terms }
    }

    pub fn quiver(&self) -> &Arc<Quiver> {
        &self.quiver
    }

    pub fn terms(&self) -> &BTreeMap<Word, Coeff> {
        &self.terms
    }

    pub fn into_terms(self) -> BTreeMap<Word, Coeff> {
        self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, w: &Word) -> Coeff {
        self.terms.get(w).cloned().unwrap_or_else(Coeff::zero)
    }

    pub fn add_term(&mut self, w: Word, c: Coeff) {
        coeff::accumulate(&mut self.terms, w, c);
    }

    pub fn scale(&self, c: &Coeff) -> Self {
        if c.is_zero() {
            return Self::zero(self.quiver.clone());
        }
        FreeElement {
            quiver: self.quiver.clone(),
            terms: self.terms.iter().map(|(w, x)| (w.clone(), x * c)).collect(),
        }
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if same_quiver(&self.quiver, &other.quiver) {
            Ok(())
        } else {
            Err(Error::QuiverMismatch)
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (w, c) in &other.terms {
            coeff::accumulate(&mut out.terms, w.clone(), c.clone());
        }
        Ok(out)
    }

    /// Bilinear extension of concatenation; non-composable products vanish.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = Self::zero(self.quiver.clone());
        for (u, a) in &self.terms {
            for (v, b) in &other.terms {
                if let Some(w) = u.concat(v, &self.quiver) {
                    coeff::accumulate(&mut out.terms, w, a * b);
                }
            }
        }
        Ok(out)
    }

    /// Commutator `PQ - QP`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        let pq = self.multiply(other)?;
        let qp = other.multiply(self)?;
        Ok(&pq - &qp)
    }

    /// Grades present among the monomials.
    pub fn grades(&self) -> Vec<usize> {
        let mut g: Vec<usize> = self.terms.keys().map(Word::grade).collect();
        g.sort_unstable();
        g.dedup();
        g
    }

    /// Terms in serialization order.
    pub fn sorted_terms(&self) -> Vec<(&Word, &Coeff)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| serial_cmp(a.0, b.0));
        v
    }

    /// Block-embedded value at a representation.
    ///
    /// Without covectors every monomial must be dual-free. With covectors,
    /// the i-th dual letter of each monomial is replaced by the block of
    /// `covectors[i]` for that arrow, and every monomial must contain exactly
    /// `covectors.len()` duals.
    pub fn evaluate(&self, point: &MatrixPoint, covectors: &[Covector]) -> Result<BlockMatrix> {
        point.check(&self.quiver)?;
        for y in covectors {
            y.check(&self.quiver, &point.dims)?;
        }
        let mut out = BlockMatrix::new(point.dims.clone());
        for (w, c) in &self.terms {
            if w.grade() != covectors.len() {
                return Err(Error::Usage(format!(
                    "monomial `{}` has {} dual letters but {} covectors were supplied",
                    w.display(&self.quiver),
                    w.grade(),
                    covectors.len()
                )));
            }
            let (t, h) = w.endpoints(&self.quiver);
            let block = match w {
                Word::Idempotent(v) => QMatrix::identity(point.dims.at(*v)),
                Word::Path(letters) => {
                    let mut slot = 0;
                    let mut acc: Option<QMatrix> = None;
                    for l in letters {
                        let m = match l {
                            Letter::Arrow(i) => &point.mats[*i],
                            Letter::Dual(i) => {
                                slot += 1;
                                &covectors[slot - 1].mats[*i]
                            }
                        };
                        acc = Some(match acc {
                            None => m.clone(),
                            Some(a) => &a * m,
                        });
                    }
                    acc.expect("nonempty path")
                }
            };
            out.add_block(h, t, &block.scale(c));
        }
        Ok(out)
    }
}

impl fmt::Display for FreeElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::expr::format_terms(&self.quiver, self.sorted_terms()))
    }
}

impl Add for &FreeElement {
    type Output = FreeElement;
    fn add(self, rhs: &FreeElement) -> FreeElement {
        self.checked_add(rhs).expect("sum of elements over different quivers")
    }
}

impl Neg for &FreeElement {
    type Output = FreeElement;
    fn neg(self) -> FreeElement {
        self.scale(&-coeff::one())
    }
}

impl Sub for &FreeElement {
    type Output = FreeElement;
    fn sub(self, rhs: &FreeElement) -> FreeElement {
        self + &(-rhs)
    }
}

impl Mul for &FreeElement {
    type Output = FreeElement;
    fn mul(self, rhs: &FreeElement) -> FreeElement {
        self.multiply(rhs).expect("product of elements over different quivers")
    }
}

/// A point of `Rep(Q, α)`: one `α_{h(a)} × α_{t(a)}` matrix per arrow.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixPoint {
    pub dims: DimensionVector,
    pub mats: Vec<QMatrix>,
}

impl MatrixPoint {
    pub fn new(q: &Quiver, dims: DimensionVector, mats: Vec<QMatrix>) -> Result<Self> {
        let p = MatrixPoint { dims, mats };
        p.check(q)?;
        Ok(p)
    }

    pub fn check(&self, q: &Quiver) -> Result<()> {
        self.dims.check(q)?;
        if self.mats.len() != q.num_arrows() {
            return Err(Error::Shape(format!(
                "{} matrices for {} arrows",
                self.mats.len(),
                q.num_arrows()
            )));
        }
        for (a, m) in q.arrows().iter().zip(&self.mats) {
            let want = (self.dims.at(a.head), self.dims.at(a.tail));
            if m.shape() != want {
                return Err(Error::Shape(format!(
                    "arrow `{}` needs a {}x{} matrix, got {}x{}",
                    a.name,
                    want.0,
                    want.1,
                    m.rows(),
                    m.cols()
                )));
            }
        }
        Ok(())
    }
}

/// A cotangent vector: one `α_{t(a)} × α_{h(a)}` matrix per arrow.
#[derive(Debug, Clone, PartialEq)]
pub struct Covector {
    pub mats: Vec<QMatrix>,
}

impl Covector {
    pub fn check(&self, q: &Quiver, dims: &DimensionVector) -> Result<()> {
        if self.mats.len() != q.num_arrows() {
            return Err(Error::Shape("covector arity".into()));
        }
        for (a, m) in q.arrows().iter().zip(&self.mats) {
            if m.shape() != (dims.at(a.tail), dims.at(a.head)) {
                return Err(Error::Shape(format!("covector block for `{}`", a.name)));
            }
        }
        Ok(())
    }
}

/// A `|α| × |α|` matrix stored by nonzero vertex blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockMatrix {
    dims: DimensionVector,
    blocks: BTreeMap<(usize, usize), QMatrix>,
}

impl BlockMatrix {
    pub fn new(dims: DimensionVector) -> Self {
        BlockMatrix {
            dims,
            blocks: BTreeMap::new(),
        }
    }

    pub fn add_block(&mut self, row_vertex: usize, col_vertex: usize, m: &QMatrix) {
        let entry = self
            .blocks
            .entry((row_vertex, col_vertex))
            .or_insert_with(|| QMatrix::zeros(m.rows(), m.cols()));
        *entry = &*entry + m;
    }

    pub fn block(&self, row_vertex: usize, col_vertex: usize) -> QMatrix {
        self.blocks.get(&(row_vertex, col_vertex)).cloned().unwrap_or_else(|| {
            QMatrix::zeros(self.dims.at(row_vertex), self.dims.at(col_vertex))
        })
    }

    pub fn to_dense(&self) -> QMatrix {
        let n = self.dims.total();
        let mut out = QMatrix::zeros(n, n);
        for ((i, j), b) in &self.blocks {
            let (r0, c0) = (self.dims.offset(*i), self.dims.offset(*j));
            for r in 0..b.rows() {
                for c in 0..b.cols() {
                    out[(r0 + r, c0 + c)] = b[(r, c)].clone();
                }
            }
        }
        out
    }

    /// `Σ λ_i tr Z_ii`.
    pub fn trace_weighted(&self, lambda: &[Coeff]) -> Coeff {
        let mut s = Coeff::zero();
        for ((i, j), b) in &self.blocks {
            if i == j {
                s += &lambda[i - 1] * b.trace();
            }
        }
        s
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.values().all(QMatrix::is_zero)
    }
}
