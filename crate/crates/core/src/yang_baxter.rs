//! Uniform quadratic bivectors as skew r-matrices, the associative
//! Yang-Baxter equation, and linear bivectors as associative algebras.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::Zero;

use crate::coeff::{self, Coeff};
use crate::error::{Error, Result};
use crate::necklace::NecklaceElement;
use crate::path_algebra::Word;
use crate::quiver::{Letter, Quiver};

/// The generator `x a'` of the algebra spanned by arrow-dual pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Gen {
    pub arrow: usize,
    pub dual: usize,
}

impl Gen {
    pub fn new(arrow: usize, dual: usize) -> Self {
        Gen { arrow, dual }
    }

    pub fn is_valid(&self, q: &Quiver) -> bool {
        self.arrow < q.num_arrows() && self.dual < q.num_arrows() && q.arrow(self.arrow).tail == q.arrow(self.dual).tail
    }

    pub fn display(&self, q: &Quiver) -> String {
        format!("{} {}'", q.arrow(self.arrow).name, q.arrow(self.dual).name)
    }
}

/// `(x a')(y b') = δ_{ay} x b'`.
pub fn aq_multiply(u: Gen, v: Gen) -> Option<Gen> {
    (u.dual == v.arrow).then_some(Gen::new(u.arrow, v.dual))
}

/// Whether `x a' y b'` is a closed path.
fn closes(q: &Quiver, u: Gen, v: Gen) -> bool {
    let word = [
        Letter::Arrow(u.arrow),
        Letter::Dual(u.dual),
        Letter::Arrow(v.arrow),
        Letter::Dual(v.dual),
    ];
    q.word_endpoints(&word).map(|(t, h)| t == h).unwrap_or(false)
}

/// A two-tensor over the generators.
#[derive(Debug, Clone)]
pub struct RMatrix {
    quiver: Arc<Quiver>,
    terms: BTreeMap<(Gen, Gen), Coeff>,
}

impl PartialEq for RMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms && *self.quiver == *other.quiver
    }
}

impl RMatrix {
    pub fn zero(quiver: Arc<Quiver>) -> Self {
        RMatrix {
            quiver,
            terms: BTreeMap::new(),
        }
    }

    pub fn quiver(&self) -> &Arc<Quiver> {
        &self.quiver
    }

    pub fn terms(&self) -> &BTreeMap<(Gen, Gen), Coeff> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `c · u ⊗ v`, rejecting pairs that do not close up.
    pub fn add(&mut self, u: Gen, v: Gen, c: Coeff) -> Result<()> {
        let q = &self.quiver;
        if !u.is_valid(q) || !v.is_valid(q) || !closes(q, u, v) {
            return Err(Error::Admissibility(format!(
                "{} ⊗ {} is not a closed path",
                display_gen(q, u),
                display_gen(q, v)
            )));
        }
        coeff::accumulate(&mut self.terms, (u, v), c);
        Ok(())
    }

    /// Adds `c · (u ⊗ v - v ⊗ u)`.
    pub fn add_wedge(&mut self, u: Gen, v: Gen, c: Coeff) -> Result<()> {
        self.add(u, v, c.clone())?;
        self.add(v, u, -c)
    }

    pub fn coeff(&self, u: Gen, v: Gen) -> Coeff {
        self.terms.get(&(u, v)).cloned().unwrap_or_else(Coeff::zero)
    }

    pub fn is_skew(&self) -> bool {
        self.terms.iter().all(|(&(u, v), c)| self.coeff(v, u) == -c.clone())
    }

    /// Parses lines `R x a y b p/q` meaning `p/q · x a' ⊗ y b'`.
    pub fn parse(src: &str, quiver: Arc<Quiver>) -> Result<Self> {
        let mut r = RMatrix::zero(quiver.clone());
        for (n, raw) in src.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Parse { line: n + 1, msg };
            let tok: Vec<&str> = line.split_whitespace().collect();
            if tok.len() != 6 || tok[0] != "R" {
                return Err(err(format!("expected `R x a y b p/q`, found `{line}`")));
            }
            let idx = |name: &str| quiver.arrow_index(name).ok_or_else(|| Error::UnknownArrow(name.to_string()));
            let u = Gen::new(idx(tok[1])?, idx(tok[2])?);
            let v = Gen::new(idx(tok[3])?, idx(tok[4])?);
            let c = coeff::parse(tok[5]).ok_or_else(|| err(format!("malformed rational `{}`", tok[5])))?;
            r.add(u, v, c)?;
        }
        Ok(r)
    }

    /// Inverse of [`RMatrix::parse`].
    pub fn to_file(&self) -> String {
        let q = &self.quiver;
        let name = |i: usize| q.arrow(i).name.as_str();
        self.terms
            .iter()
            .map(|(&(u, v), c)| {
                format!(
                    "R {} {} {} {} {}\n",
                    name(u.arrow),
                    name(u.dual),
                    name(v.arrow),
                    name(v.dual),
                    coeff::format(c)
                )
            })
            .collect()
    }
}

fn display_gen(q: &Quiver, g: Gen) -> String {
    if g.arrow < q.num_arrows() && g.dual < q.num_arrows() {
        g.display(q)
    } else {
        format!("({}, {})", g.arrow, g.dual)
    }
}

impl fmt::Display for RMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (&(u, v), c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{} ({}) ⊗ ({})", coeff::format(c), u.display(&self.quiver), v.display(&self.quiver))?;
        }
        Ok(())
    }
}

/// A three-tensor over generators, keyed by `(p u', q v', r w')`.
pub type Tensor3 = BTreeMap<(Gen, Gen, Gen), Coeff>;

/// Result of an associative or classical Yang-Baxter check.
#[derive(Debug, Clone)]
pub struct YbReport {
    pub residual: Tensor3,
    pub holds: bool,
}

fn products(r: &RMatrix) -> Vec<(Gen, Gen, Gen, Gen, Coeff)> {
    let mut out = Vec::with_capacity(r.terms.len() * r.terms.len());
    for (&(u, v), a) in &r.terms {
        for (&(w, z), b) in &r.terms {
            out.push((u, v, w, z, a * b));
        }
    }
    out
}

fn push(t: &mut Tensor3, a: Option<Gen>, b: Option<Gen>, c: Option<Gen>, x: Coeff) {
    if let (Some(a), Some(b), Some(c)) = (a, b, c) {
        coeff::accumulate(t, (a, b, c), x);
    }
}

/// `r12 r23 + r31 r12 + r23 r31`.
pub fn ayb_check(r: &RMatrix) -> YbReport {
    let mut t = Tensor3::new();
    for (u, v, w, z, c) in products(r) {
        // (u⊗v⊗1)(1⊗w⊗z)
        push(&mut t, Some(u), aq_multiply(v, w), Some(z), c.clone());
        // (v⊗1⊗u)(w⊗z⊗1)
        push(&mut t, aq_multiply(v, w), Some(z), Some(u), c.clone());
        // (1⊗u⊗v)(z⊗1⊗w)
        push(&mut t, Some(z), Some(u), aq_multiply(v, w), c);
    }
    YbReport { holds: t.is_empty(), residual: t }
}

/// `[r12, r23] + [r31, r12] + [r23, r31]`.
pub fn classical_yb_check(r: &RMatrix) -> YbReport {
    let mut t = Tensor3::new();
    for (u, v, w, z, c) in products(r) {
        let m = -c.clone();
        push(&mut t, Some(u), aq_multiply(v, w), Some(z), c.clone());
        push(&mut t, Some(w), aq_multiply(u, z), Some(v), m.clone());
        push(&mut t, aq_multiply(v, w), Some(z), Some(u), c.clone());
        push(&mut t, aq_multiply(w, v), Some(z), Some(u), m.clone());
        push(&mut t, Some(z), Some(u), aq_multiply(v, w), c);
        push(&mut t, Some(v), Some(w), aq_multiply(u, z), m);
    }
    YbReport { holds: t.is_empty(), residual: t }
}

/// The n-arrow Kronecker quiver whose generator algebra is `Mat_n`.
pub fn kronecker(n: usize) -> Quiver {
    let names: Vec<(String, usize, usize)> = (1..=n).map(|i| (format!("x{i}"), 1, 2)).collect();
    Quiver::new(2, &names).expect("valid quiver")
}

/// The r-matrix `Σ_{i,j<m} Σ_{k≤max(i,j)} e_{i,i+j-k+1} ∧ e_{j,k}` in
/// `Mat_m`, with `e_{ij} ↦ x_i x_j'` over the first `m` arrows of `quiver`.
/// Elementary matrices with a column index beyond `m` are zero.
pub fn aguiar(m: usize, quiver: Arc<Quiver>) -> Result<RMatrix> {
    if m < 2 {
        return Err(Error::Usage("the construction needs m ≥ 2".into()));
    }
    if quiver.num_arrows() < m {
        return Err(Error::Usage(format!("quiver has fewer than {m} arrows")));
    }
    let mut r = RMatrix::zero(quiver);
    for i in 1..m {
        for j in 1..m {
            for k in 1..=i.max(j) {
                let col = i + j + 1 - k;
                if col > m {
                    continue;
                }
                r.add_wedge(Gen::new(i - 1, col - 1), Gen::new(j - 1, k - 1), coeff::one())?;
            }
        }
    }
    Ok(r)
}

/// `Π = Σ R^{xa'}_{yb'} x a' y b'`.
pub fn rmatrix_to_bivector(r: &RMatrix) -> NecklaceElement {
    let q = r.quiver().clone();
    let mut pi = NecklaceElement::zero(q);
    for (&(u, v), c) in r.terms() {
        let w = Word::Path(vec![
            Letter::Arrow(u.arrow),
            Letter::Dual(u.dual),
            Letter::Arrow(v.arrow),
            Letter::Dual(v.dual),
        ]);
        pi.add_word(&w, c.clone());
    }
    pi
}

/// Recovers the skew r-matrix of a uniform quadratic bivector.
pub fn bivector_to_rmatrix(pi: &NecklaceElement) -> Result<RMatrix> {
    let q = pi.quiver().clone();
    let mut r = RMatrix::zero(q.clone());
    let half = coeff::ratio(1, 2);
    for (w, c) in pi.terms() {
        let l = w.letters();
        let uniform = l.len() == 4 && (0..4).any(|k| (0..4).all(|i| l[(k + i) % 4].is_dual() == (i % 2 == 1)));
        if !uniform {
            return Err(Error::Admissibility(format!("`{}` is not of the form x a' y b'", w.display(&q))));
        }
        let rot = if l[0].is_dual() {
            vec![l[1], l[2], l[3], l[0]]
        } else {
            l.to_vec()
        };
        // moving a single dual to the end of a grade-two word flips the sign
        let c = if l[0].is_dual() { -c.clone() } else { c.clone() };
        let u = Gen::new(rot[0].arrow(), rot[1].arrow());
        let v = Gen::new(rot[2].arrow(), rot[3].arrow());
        r.add_wedge(u, v, c * &half)?;
    }
    Ok(r)
}

/// Coefficients `J^x_{ab}` of a linear bivector `Σ J^x_{ab} x a' b'`.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureConstants {
    pub num_arrows: usize,
    pub entries: BTreeMap<(usize, usize, usize), Coeff>,
}

impl StructureConstants {
    pub fn get(&self, x: usize, a: usize, b: usize) -> Coeff {
        self.entries.get(&(x, a, b)).cloned().unwrap_or_else(Coeff::zero)
    }

    /// Basis products `e_a e_b = Σ_x J^x_{ab} e_x`.
    pub fn product(&self, a: usize, b: usize) -> BTreeMap<usize, Coeff> {
        self.entries
            .iter()
            .filter(|((_, p, q), _)| *p == a && *q == b)
            .map(|((x, _, _), c)| (*x, c.clone()))
            .collect()
    }

    /// Builds the bivector `Σ J^x_{ab} x a' b'`.
    pub fn to_bivector(&self, quiver: Arc<Quiver>) -> Result<NecklaceElement> {
        let mut pi = NecklaceElement::zero(quiver.clone());
        for (&(x, a, b), c) in &self.entries {
            let w = vec![Letter::Arrow(x), Letter::Dual(a), Letter::Dual(b)];
            if !quiver.is_closed(&w) {
                return Err(Error::Admissibility(format!(
                    "`{}` is not a closed path",
                    Word::Path(w).display(&quiver)
                )));
            }
            pi.add_word(&Word::Path(w), c.clone());
        }
        Ok(pi)
    }
}

/// Reads off `J^x_{ab}`; every monomial must have one arrow and two duals.
pub fn linear_to_algebra(pi: &NecklaceElement) -> Result<StructureConstants> {
    let q = pi.quiver();
    let mut entries = BTreeMap::new();
    for (w, c) in pi.terms() {
        let l = w.letters();
        if l.len() != 3 || w.grade() != 2 {
            return Err(Error::Usage(format!("`{}` is not a linear bivector monomial", w.display(q))));
        }
        // canonical rotations put the single arrow first
        debug_assert!(!l[0].is_dual());
        entries.insert((l[0].arrow(), l[1].arrow(), l[2].arrow()), c.clone());
    }
    Ok(StructureConstants {
        num_arrows: q.num_arrows(),
        entries,
    })
}

/// `Σ_y J^y_{ab} J^x_{yc} = Σ_y J^x_{ay} J^y_{bc}` for all `a, b, c, x`.
pub fn associativity_check(j: &StructureConstants) -> bool {
    let n = j.num_arrows;
    for a in 0..n {
        for b in 0..n {
            let ab = j.product(a, b);
            for c in 0..n {
                let mut lhs: BTreeMap<usize, Coeff> = BTreeMap::new();
                for (y, u) in &ab {
                    for (x, v) in j.product(*y, c) {
                        coeff::accumulate(&mut lhs, x, u * &v);
                    }
                }
                let mut rhs: BTreeMap<usize, Coeff> = BTreeMap::new();
                for (y, u) in j.product(b, c) {
                    for (x, v) in j.product(a, y) {
                        coeff::accumulate(&mut rhs, x, &u * &v);
                    }
                }
                if lhs != rhs {
                    return false;
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::int;
    use crate::necklace::is_poisson;

    fn loops2() -> Arc<Quiver> {
        Arc::new(Quiver::new(1, &[("x", 1, 1), ("y", 1, 1)]).unwrap())
    }

    #[test]
    fn generator_products() {
        let u = Gen::new(0, 1);
        assert_eq!(aq_multiply(u, Gen::new(1, 2)), Some(Gen::new(0, 2)));
        assert_eq!(aq_multiply(u, Gen::new(2, 2)), None);
    }

    #[test]
    fn generators_of_kronecker_form_matrix_units() {
        let n = 3;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let p = aq_multiply(Gen::new(i, j), Gen::new(k, l));
                        let expected = (j == k).then_some(Gen::new(i, l));
                        assert_eq!(p, expected);
                    }
                }
            }
        }
    }

    #[test]
    fn aguiar_two_is_gl2_structure() {
        let q = loops2();
        let r = aguiar(2, q.clone()).unwrap();
        let mut printed = RMatrix::zero(q.clone());
        printed.add_wedge(Gen::new(0, 1), Gen::new(0, 0), int(1)).unwrap();
        assert_eq!(r, printed);
        let pi = rmatrix_to_bivector(&r);
        assert_eq!(pi, NecklaceElement::parse("x y' x x' - x x' x y'", &q).unwrap());
        assert!(ayb_check(&r).holds);
        assert_eq!(bivector_to_rmatrix(&pi).unwrap(), r);
    }

    #[test]
    fn diagonal_wedge_fails() {
        let q = Arc::new(kronecker(2));
        let mut r = RMatrix::zero(q);
        r.add_wedge(Gen::new(0, 0), Gen::new(1, 1), int(1)).unwrap();
        let rep = ayb_check(&r);
        assert!(!rep.holds);
        // r12 r23 gives e11 ⊗ e11·e22 ⊗ e11 = 0, so the residual comes from
        // mixed middle products only
        assert!(rep.residual.keys().all(|(a, b, c)| a.is_valid(r.quiver()) && b.is_valid(r.quiver()) && c.is_valid(r.quiver())));
    }

    #[test]
    fn inadmissible_terms_are_rejected() {
        let q = Arc::new(Quiver::new(2, &[("x", 1, 2), ("y", 2, 1)]).unwrap());
        let mut r = RMatrix::zero(q.clone());
        assert!(matches!(r.add(Gen::new(0, 0), Gen::new(1, 0), int(1)), Err(Error::Admissibility(_))));
        let pi = NecklaceElement::parse("x' y'", &q).unwrap();
        assert!(matches!(bivector_to_rmatrix(&pi), Err(Error::Admissibility(_))));
    }

    #[test]
    fn r_file_round_trips() {
        let q = Arc::new(kronecker(3));
        let r = aguiar(3, q.clone()).unwrap();
        assert_eq!(RMatrix::parse(&r.to_file(), q.clone()).unwrap(), r);
        assert!(matches!(RMatrix::parse("R x1 x2 x1\n", q.clone()), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(RMatrix::parse("R x1 x2 x1 w 1", q), Err(Error::UnknownArrow(_))));
    }

    #[test]
    fn free_algebra_examples() {
        let q = loops2();
        for src in ["x x' x' + y x' y'", "x x' x' + y x' y' + y y' x'"] {
            let pi = NecklaceElement::parse(src, &q).unwrap();
            let j = linear_to_algebra(&pi).unwrap();
            assert!(associativity_check(&j));
            assert!(is_poisson(&pi).unwrap().holds);
            assert_eq!(j.to_bivector(q.clone()).unwrap(), pi);
        }
    }

    #[test]
    fn non_linear_monomial_is_rejected() {
        let q = loops2();
        let pi = NecklaceElement::parse("x x' y y' + x' y'", &q).unwrap();
        assert!(linear_to_algebra(&pi).is_err());
    }
}
