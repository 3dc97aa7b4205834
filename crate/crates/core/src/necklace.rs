//! The graded necklace Lie algebra: closed words modulo signed cyclic
//! rotation, superderivatives and the Schouten bracket.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::Arc;

use num_traits::Zero;

use crate::coeff::{self, Coeff};
use crate::error::{Error, Result};
use crate::expr;
use crate::path_algebra::{same_quiver, FreeElement, Word};
use crate::quiver::{Letter, Quiver};

/// Canonical rotation of a closed word together with the sign picked up on
/// the way. `None` when the word is open or its class is forced to vanish.
pub fn canonical_rotation(word: &Word, q: &Quiver) -> Option<(Word, bool)> {
    let letters = match word {
        Word::Idempotent(_) => return Some((word.clone(), false)),
        Word::Path(l) => l,
    };
    if !q.is_closed(letters) {
        return None;
    }
    let n = letters.len();
    let total = word.grade();
    let mut best: Option<(Vec<Letter>, bool)> = None;
    let mut conflict = false;
    let mut prefix_grade = 0;
    for k in 0..n {
        let neg = (prefix_grade * (total - prefix_grade)) % 2 == 1;
        let rotated: Vec<Letter> = letters[k..].iter().chain(&letters[..k]).copied().collect();
        match &best {
            Some((b, s)) if rotated == *b => conflict |= *s != neg,
            Some((b, _)) if rotated > *b => {}
            _ => {
                best = Some((rotated, neg));
                conflict = false;
            }
        }
        if letters[k].is_dual() {
            prefix_grade += 1;
        }
    }
    let (w, neg) = best?;
    if conflict {
        None
    } else {
        Some((Word::Path(w), neg))
    }
}

/// An element of the necklace space: canonical closed words with nonzero
/// coefficients.
#[derive(Debug, Clone)]
pub struct NecklaceElement {
    quiver: Arc<Quiver>,
    terms: BTreeMap<Word, Coeff>,
}

impl PartialEq for NecklaceElement {
    fn eq(&self, other: &Self) -> bool {
        same_quiver(&self.quiver, &other.quiver) && self.terms == other.terms
    }
}

/// Reduces a path-algebra element to its necklace class.
pub fn normalize(f: &FreeElement) -> NecklaceElement {
    let mut out = NecklaceElement::zero(f.quiver().clone());
    for (w, c) in f.terms() {
        out.add_word(w, c.clone());
    }
    out
}

impl NecklaceElement {
    pub fn zero(quiver: Arc<Quiver>) -> Self {
        NecklaceElement {
            quiver,
            terms: BTreeMap::new(),
        }
    }

    /// Parses an element expression and normalizes it.
    pub fn parse(src: &str, quiver: &Arc<Quiver>) -> Result<Self> {
        Ok(normalize(&expr::parse_element(src, quiver)?))
    }

    pub fn quiver(&self) -> &Arc<Quiver> {
        &self.quiver
    }

    pub fn terms(&self) -> &BTreeMap<Word, Coeff> {
        &self.terms
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

    /// Adds `c` times the class of an arbitrary word.
    pub fn add_word(&mut self, w: &Word, c: Coeff) {
        if let Some((canon, neg)) = canonical_rotation(w, &self.quiver) {
            let c = if neg { -c } else { c };
            coeff::accumulate(&mut self.terms, canon, c);
        }
    }

    pub fn scale(&self, c: &Coeff) -> Self {
        if c.is_zero() {
            return Self::zero(self.quiver.clone());
        }
        NecklaceElement {
            quiver: self.quiver.clone(),
            terms: self.terms.iter().map(|(w, x)| (w.clone(), x * c)).collect(),
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        if !same_quiver(&self.quiver, &other.quiver) {
            return Err(Error::QuiverMismatch);
        }
        let mut out = self.clone();
        for (w, c) in &other.terms {
            coeff::accumulate(&mut out.terms, w.clone(), c.clone());
        }
        Ok(out)
    }

    /// The canonical representatives as a path-algebra element.
    pub fn to_free(&self) -> FreeElement {
        FreeElement::from_terms_unchecked(self.quiver.clone(), self.terms.clone())
    }

    /// Grades present among the monomials.
    pub fn grades(&self) -> Vec<usize> {
        let mut g: Vec<usize> = self.terms.keys().map(Word::grade).collect();
        g.sort_unstable();
        g.dedup();
        g
    }

    /// The homogeneous component of grade `r`.
    pub fn grade_part(&self, r: usize) -> Self {
        self.filter(|w| w.grade() == r)
    }

    fn filter(&self, keep: impl Fn(&Word) -> bool) -> Self {
        NecklaceElement {
            quiver: self.quiver.clone(),
            terms: self.terms.iter().filter(|(w, _)| keep(w)).map(|(w, c)| (w.clone(), c.clone())).collect(),
        }
    }

    /// Terms in serialization order.
    pub fn sorted_terms(&self) -> Vec<(&Word, &Coeff)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| crate::path_algebra::serial_cmp(a.0, b.0));
        v
    }

    pub fn to_json(&self) -> serde_json::Value {
        expr::terms_to_json(&self.quiver, self.sorted_terms())
    }

    /// Splits by word length: each part is labelled by `length - 2`, the
    /// polynomial degree of a grade-two structure.
    pub fn homogeneous_parts(&self) -> Vec<(i64, NecklaceElement)> {
        let mut lengths: Vec<usize> = self.terms.keys().map(Word::len).collect();
        lengths.sort_unstable();
        lengths.dedup();
        lengths
            .into_iter()
            .map(|n| (n as i64 - 2, self.filter(|w| w.len() == n)))
            .collect()
    }
}

impl fmt::Display for NecklaceElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&expr::format_terms(&self.quiver, self.sorted_terms()))
    }
}

impl Add for &NecklaceElement {
    type Output = NecklaceElement;
    fn add(self, rhs: &NecklaceElement) -> NecklaceElement {
        self.checked_add(rhs).expect("necklace elements over different quivers")
    }
}

impl Neg for &NecklaceElement {
    type Output = NecklaceElement;
    fn neg(self) -> NecklaceElement {
        self.scale(&coeff::int(-1))
    }
}

impl Sub for &NecklaceElement {
    type Output = NecklaceElement;
    fn sub(self, rhs: &NecklaceElement) -> NecklaceElement {
        self + &(-rhs)
    }
}

/// Signed cyclic derivative: for each occurrence of `w` in a monomial
/// `x_1 ... x_n`, the word `x_{i+1} ... x_n x_1 ... x_{i-1}`.
pub fn superderivative(w: Letter, gamma: &NecklaceElement) -> FreeElement {
    let q = gamma.quiver();
    let mut out = FreeElement::zero(q.clone());
    for (word, c) in gamma.terms() {
        derive_word(w, word, c, q, &mut out);
    }
    out
}

fn derive_word(w: Letter, word: &Word, c: &Coeff, q: &Quiver, out: &mut FreeElement) {
    let letters = word.letters();
    let total = word.grade();
    let mut upto = 0;
    for (i, &x) in letters.iter().enumerate() {
        if x.is_dual() {
            upto += 1;
        }
        if x != w {
            continue;
        }
        let after = total - upto;
        let rest: Vec<Letter> = letters[i + 1..].iter().chain(&letters[..i]).copied().collect();
        let c = if (after * upto) % 2 == 1 { -c.clone() } else { c.clone() };
        out.add_term(Word::from_letters(rest, q.tail(x)), c);
    }
}

/// Schouten bracket, extended bilinearly over grade components.
pub fn schouten(gamma: &NecklaceElement, delta: &NecklaceElement) -> Result<NecklaceElement> {
    if !same_quiver(gamma.quiver(), delta.quiver()) {
        return Err(Error::QuiverMismatch);
    }
    let q = gamma.quiver().clone();
    let mut acc = FreeElement::zero(q.clone());
    for r in gamma.grades() {
        let g = gamma.grade_part(r);
        for s in delta.grades() {
            let d = delta.grade_part(s);
            let sign_neg = ((r as i64 - 1) * (s as i64 - 1)).rem_euclid(2) == 1;
            for a in 0..q.num_arrows() {
                let da_dual_g = superderivative(Letter::Dual(a), &g);
                let da_d = superderivative(Letter::Arrow(a), &d);
                let first = da_dual_g.multiply(&da_d)?;
                let da_dual_d = superderivative(Letter::Dual(a), &d);
                let da_g = superderivative(Letter::Arrow(a), &g);
                let second = da_dual_d.multiply(&da_g)?;
                acc = acc.checked_add(&first)?;
                acc = if sign_neg {
                    acc.checked_add(&second)?
                } else {
                    &acc - &second
                };
            }
        }
    }
    Ok(normalize(&acc))
}

/// `[Π, Π]` and whether it vanishes.
#[derive(Debug, Clone)]
pub struct PoissonReport {
    pub residual: NecklaceElement,
    pub holds: bool,
}

fn require_grade_two(pi: &NecklaceElement) -> Result<()> {
    if let Some((w, _)) = pi.sorted_terms().into_iter().find(|(w, _)| w.grade() != 2) {
        return Err(Error::Usage(format!(
            "monomial `{}` has grade {}, expected a bivector",
            w.display(pi.quiver()),
            w.grade()
        )));
    }
    Ok(())
}

pub fn is_poisson(pi: &NecklaceElement) -> Result<PoissonReport> {
    require_grade_two(pi)?;
    let residual = schouten(pi, pi)?;
    Ok(PoissonReport {
        holds: residual.is_zero(),
        residual,
    })
}

/// Whether all brackets among the two structures vanish.
pub fn compatible_pair_check(p1: &NecklaceElement, p2: &NecklaceElement) -> Result<bool> {
    require_grade_two(p1)?;
    require_grade_two(p2)?;
    Ok(schouten(p1, p1)?.is_zero() && schouten(p1, p2)?.is_zero() && schouten(p2, p2)?.is_zero())
}

/// One way of reading a bivector monomial as `κ · P a' R b'`.
///
/// Every monomial yields two readings, `(P, a, R, b, κ)` and
/// `(R, b, P, a, -κ)`, with `κ` half the coefficient of the rotated word,
/// so that the monomial equals the sum of `κ/2 · [P a', R b']` over both.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reading {
    pub left: Word,
    pub first: usize,
    pub right: Word,
    pub second: usize,
    pub weight: Coeff,
    /// Head of the canonical representative, where the trace is taken.
    pub trace_vertex: usize,
}

/// All readings of a bivector.
pub fn readings(pi: &NecklaceElement) -> Result<Vec<Reading>> {
    require_grade_two(pi)?;
    let q = pi.quiver();
    let half = coeff::ratio(1, 2);
    let mut out = Vec::new();
    for (w, c) in pi.terms() {
        let letters = w.letters();
        let n = letters.len();
        let trace_vertex = w.endpoints(q).1;
        for k in 0..n {
            // the rotation starting at k + 1 ends with letters[k]
            if !letters[k].is_dual() {
                continue;
            }
            let start = (k + 1) % n;
            let rot: Vec<Letter> = letters[start..].iter().chain(&letters[..start]).copied().collect();
            let rot_neg = rotation_sign(letters, start);
            let j = rot[..n - 1].iter().position(|l| l.is_dual()).expect("two duals");
            let a = rot[j];
            let b = rot[n - 1];
            let left = Word::from_letters(rot[..j].to_vec(), q.head(a));
            let right = Word::from_letters(rot[j + 1..n - 1].to_vec(), q.head(b));
            let weight = if rot_neg { -(c * &half) } else { c * &half };
            out.push(Reading {
                left,
                first: a.arrow(),
                right,
                second: b.arrow(),
                weight,
                trace_vertex,
            });
        }
    }
    Ok(out)
}

/// Sign of moving the first `k` letters to the end.
pub(crate) fn rotation_sign(letters: &[Letter], k: usize) -> bool {
    let total = letters.iter().filter(|l| l.is_dual()).count();
    let p = letters[..k].iter().filter(|l| l.is_dual()).count();
    (p * (total - p)) % 2 == 1
}

/// Plain cyclic derivative of a dual-free necklace, the grade-zero case of
/// the superderivative.
pub fn cyclic_derivative(a: usize, f: &NecklaceElement) -> FreeElement {
    superderivative(Letter::Arrow(a), f)
}

fn require_grade_zero(f: &NecklaceElement) -> Result<()> {
    if f.grades().iter().any(|&g| g != 0) {
        return Err(Error::Usage("expected a dual-free element".into()));
    }
    Ok(())
}

fn word_element(q: &Arc<Quiver>, w: &Word) -> FreeElement {
    FreeElement::from_terms_unchecked(q.clone(), BTreeMap::from([(w.clone(), coeff::one())]))
}

/// Bracket on cyclic words induced by a bivector:
/// `{f, g} = Σ κ P D_a(f) R D_b(g)` modulo commutators.
pub fn h0_bracket(f: &NecklaceElement, g: &NecklaceElement, pi: &NecklaceElement) -> Result<NecklaceElement> {
    require_grade_zero(f)?;
    require_grade_zero(g)?;
    let q = pi.quiver().clone();
    let mut acc = FreeElement::zero(q.clone());
    for rd in readings(pi)? {
        let df = cyclic_derivative(rd.first, f);
        let dg = cyclic_derivative(rd.second, g);
        if df.is_zero() || dg.is_zero() {
            continue;
        }
        let p = word_element(&q, &rd.left);
        let r = word_element(&q, &rd.right);
        let term = p.multiply(&df)?.multiply(&r)?.multiply(&dg)?;
        acc = acc.checked_add(&term.scale(&rd.weight))?;
    }
    Ok(normalize(&acc))
}

/// The derivation inducing `{f, ·}`, as its values on the arrows.
pub fn induced_derivation(f: &NecklaceElement, pi: &NecklaceElement) -> Result<Vec<FreeElement>> {
    require_grade_zero(f)?;
    let q = pi.quiver().clone();
    let mut out = vec![FreeElement::zero(q.clone()); q.num_arrows()];
    for rd in readings(pi)? {
        let df = cyclic_derivative(rd.first, f);
        if df.is_zero() {
            continue;
        }
        let p = word_element(&q, &rd.left);
        let r = word_element(&q, &rd.right);
        let term = p.multiply(&df)?.multiply(&r)?.scale(&rd.weight);
        out[rd.second] = out[rd.second].checked_add(&term)?;
    }
    Ok(out)
}

/// Applies a derivation given on arrows to a dual-free path-algebra element.
pub fn apply_derivation(values: &[FreeElement], f: &FreeElement) -> Result<FreeElement> {
    let q = f.quiver().clone();
    let mut out = FreeElement::zero(q.clone());
    for (w, c) in f.terms() {
        let letters = w.letters();
        for (i, l) in letters.iter().enumerate() {
            if l.is_dual() {
                return Err(Error::Usage("derivations act on dual-free elements".into()));
            }
            let head = Word::from_letters(letters[..i].to_vec(), q.head(*l));
            let tail = Word::from_letters(letters[i + 1..].to_vec(), q.tail(*l));
            let term = word_element(&q, &head)
                .multiply(&values[l.arrow()])?
                .multiply(&word_element(&q, &tail))?;
            out = out.checked_add(&term.scale(c))?;
        }
    }
    Ok(out)
}

/// An element of the tensor square of the path algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor2 {
    pub terms: BTreeMap<(Word, Word), Coeff>,
}

impl Tensor2 {
    pub fn zero() -> Self {
        Tensor2 { terms: BTreeMap::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Swaps the tensor factors.
    pub fn flip(&self) -> Self {
        Tensor2 {
            terms: self.terms.iter().map(|((u, v), c)| ((v.clone(), u.clone()), c.clone())).collect(),
        }
    }

    pub fn scale(&self, c: &Coeff) -> Self {
        let mut out = Tensor2::zero();
        for (k, x) in &self.terms {
            coeff::accumulate(&mut out.terms, k.clone(), x * c);
        }
        out
    }

    pub fn display(&self, q: &Quiver) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut s = String::new();
        for (i, ((u, v), c)) in self.terms.iter().enumerate() {
            let neg = c < &Coeff::zero();
            let mag = if neg { -c.clone() } else { c.clone() };
            if i == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            if mag != coeff::one() {
                s.push_str(&coeff::format(&mag));
                s.push(' ');
            }
            s.push_str(&format!("({}) ⊗ ({})", u.display(q), v.display(q)));
        }
        s
    }
}

/// `{{a, b}} = Σ κ P ⊗ R` over readings of the form `P a' R b'`.
pub fn double_bracket(pi: &NecklaceElement, a: usize, b: usize) -> Result<Tensor2> {
    let mut out = Tensor2::zero();
    for rd in readings(pi)? {
        if rd.first == a && rd.second == b {
            coeff::accumulate(&mut out.terms, (rd.left, rd.right), rd.weight);
        }
    }
    Ok(out)
}
