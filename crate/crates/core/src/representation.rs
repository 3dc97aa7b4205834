//! Trace map from the necklace algebra to invariant polyvector fields on
//! representation spaces, with the commutative Schouten-Nijenhuis bracket.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};
use rand::Rng;
use serde_json::{json, Value};

use crate::coeff::{self, Coeff};
use crate::error::{Error, Result};
use crate::matrix::QMatrix;
use crate::necklace::{readings, rotation_sign, schouten, NecklaceElement};
use crate::path_algebra::Word;
use crate::poly::{Poly, PolyMatrix};
use crate::quiver::{DimensionVector, Letter, Quiver};

/// Default cap on intermediate terms in symbolic expansion.
pub const DEFAULT_BUDGET: usize = 1_000_000;

/// Counts intermediate terms and refuses to go past a limit.
#[derive(Debug, Clone)]
pub struct Budget {
    limit: usize,
    used: usize,
}

impl Budget {
    pub fn new(limit: usize) -> Self {
        Budget { limit, used: 0 }
    }

    pub fn spend(&mut self, n: usize) -> Result<()> {
        self.used += n;
        if self.used > self.limit {
            Err(Error::BudgetExceeded { budget: self.limit })
        } else {
            Ok(())
        }
    }

    pub fn used(&self) -> usize {
        self.used
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::new(DEFAULT_BUDGET)
    }
}

/// Per-vertex weights of the trace.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceWeights(pub Vec<Coeff>);

impl TraceWeights {
    pub fn ones(k: usize) -> Self {
        TraceWeights(vec![Coeff::one(); k])
    }

    pub fn uniform(k: usize, c: Coeff) -> Self {
        TraceWeights(vec![c; k])
    }

    pub fn parse(s: &str) -> Result<Self> {
        s.split(',')
            .map(|t| coeff::parse(t).ok_or_else(|| Error::Usage(format!("bad weight `{t}`"))))
            .collect::<Result<Vec<_>>>()
            .map(TraceWeights)
    }

    pub fn at(&self, v: usize) -> &Coeff {
        &self.0[v - 1]
    }
}

/// The coordinate functions `(X_a)_{ij}` of a representation space, ordered
/// by arrow, then row, then column.
#[derive(Debug, Clone, PartialEq)]
pub struct Coordinates {
    quiver: Arc<Quiver>,
    dims: DimensionVector,
    list: Vec<(usize, usize, usize)>,
    offsets: Vec<usize>,
}

impl Coordinates {
    pub fn new(quiver: Arc<Quiver>, dims: DimensionVector) -> Result<Self> {
        dims.check(&quiver)?;
        let mut list = Vec::new();
        let mut offsets = Vec::new();
        for a in quiver.arrows() {
            offsets.push(list.len());
            for i in 0..dims.at(a.head) {
                for j in 0..dims.at(a.tail) {
                    list.push((offsets.len() - 1, i, j));
                }
            }
        }
        Ok(Coordinates {
            quiver,
            dims,
            list,
            offsets,
        })
    }

    pub fn quiver(&self) -> &Arc<Quiver> {
        &self.quiver
    }

    pub fn dims(&self) -> &DimensionVector {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.list.len()
    }

    pub fn is_empty(&self) -> bool {
        self.list.is_empty()
    }

    /// `(arrow, row, col)` of a coordinate.
    pub fn coord(&self, idx: usize) -> (usize, usize, usize) {
        self.list[idx]
    }

    /// Shape `(rows, cols)` of the block of an arrow.
    pub fn shape(&self, a: usize) -> (usize, usize) {
        let arrow = self.quiver.arrow(a);
        (self.dims.at(arrow.head), self.dims.at(arrow.tail))
    }

    pub fn index(&self, a: usize, i: usize, j: usize) -> usize {
        self.offsets[a] + i * self.shape(a).1 + j
    }

    pub fn name(&self, idx: usize) -> String {
        let (a, i, j) = self.list[idx];
        let name = &self.quiver.arrow(a).name;
        if self.shape(a) == (1, 1) {
            name.clone()
        } else {
            format!("{name}[{},{}]", i + 1, j + 1)
        }
    }

    pub fn names(&self) -> Vec<String> {
        (0..self.len()).map(|i| self.name(i)).collect()
    }

    fn arrow_matrix(&self, a: usize) -> PolyMatrix {
        let (rows, cols) = self.shape(a);
        let n = self.len();
        PolyMatrix {
            rows,
            cols,
            entries: (0..rows * cols).map(|k| Poly::var(n, self.offsets[a] + k)).collect(),
        }
    }

    /// Polynomial matrix of a dual-free word.
    pub fn word_matrix(&self, w: &Word) -> PolyMatrix {
        match w {
            Word::Idempotent(v) => PolyMatrix::identity(self.dims.at(*v), self.len()),
            Word::Path(l) => {
                let mut m = self.arrow_matrix(l[0].arrow());
                for x in &l[1..] {
                    debug_assert!(!x.is_dual());
                    m = m.mul(&self.arrow_matrix(x.arrow()));
                }
                m
            }
        }
    }

    /// Flattens per-arrow matrices into coordinate values.
    pub fn flatten(&self, mats: &[QMatrix]) -> Vec<Coeff> {
        self.list.iter().map(|&(a, i, j)| mats[a][(i, j)].clone()).collect()
    }

    /// Per-arrow matrices from coordinate values.
    pub fn unflatten(&self, values: &[Coeff]) -> Vec<QMatrix> {
        (0..self.quiver.num_arrows())
            .map(|a| {
                let (r, c) = self.shape(a);
                QMatrix::from_fn(r, c, |i, j| values[self.index(a, i, j)].clone())
            })
            .collect()
    }

    /// A covector given by blocks `Y_a` of shape `α_{t(a)} × α_{h(a)}`,
    /// pairing with tangent vectors through `Σ tr(Y_a V_a)`.
    pub fn covector(&self, blocks: &[QMatrix]) -> Vec<Coeff> {
        self.list.iter().map(|&(a, i, j)| blocks[a][(j, i)].clone()).collect()
    }
}

/// Sorts a wedge of coordinates; `None` when a coordinate repeats.
fn sort_wedge(mut v: Vec<usize>) -> Option<(Vec<usize>, bool)> {
    let mut neg = false;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            neg = !neg;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((v, neg))
}

/// A polyvector field with polynomial coefficients:
/// `Σ f_I ∂_{i_1} ∧ ... ∧ ∂_{i_r}` over strictly increasing `I`.
#[derive(Debug, Clone)]
pub struct PolyField {
    coords: Arc<Coordinates>,
    terms: BTreeMap<Vec<usize>, Poly>,
}

impl PartialEq for PolyField {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms && *self.coords == *other.coords
    }
}

impl PolyField {
    pub fn zero(coords: Arc<Coordinates>) -> Self {
        PolyField {
            coords,
            terms: BTreeMap::new(),
        }
    }

    pub fn coords(&self) -> &Arc<Coordinates> {
        &self.coords
    }

    pub fn terms(&self) -> &BTreeMap<Vec<usize>, Poly> {
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

    /// Adds `p · ∂_{w_1} ∧ ... ∧ ∂_{w_r}` for an unsorted wedge.
    pub fn add_term(&mut self, wedge: Vec<usize>, p: &Poly) {
        if p.is_zero() {
            return;
        }
        let Some((w, neg)) = sort_wedge(wedge) else {
            return;
        };
        let entry = self.terms.entry(w.clone()).or_insert_with(|| Poly::zero(p.nvars()));
        if neg {
            entry.add_assign(&-p);
        } else {
            entry.add_assign(p);
        }
        if entry.is_zero() {
            self.terms.remove(&w);
        }
    }

    pub fn add(&self, other: &PolyField) -> PolyField {
        let mut out = self.clone();
        for (w, p) in &other.terms {
            out.add_term(w.clone(), p);
        }
        out
    }

    pub fn scale(&self, c: &Coeff) -> PolyField {
        let mut out = PolyField::zero(self.coords.clone());
        for (w, p) in &self.terms {
            out.add_term(w.clone(), &p.scale(c));
        }
        out
    }

    pub fn sub(&self, other: &PolyField) -> PolyField {
        self.add(&other.scale(&coeff::int(-1)))
    }

    /// Degrees of the wedge parts present.
    pub fn grades(&self) -> Vec<usize> {
        let mut g: Vec<usize> = self.terms.keys().map(Vec::len).collect();
        g.sort_unstable();
        g.dedup();
        g
    }

    /// Coefficient of `∂_a ∧ ∂_b` read as an antisymmetric pairing.
    pub fn pair2(&self, a: usize, b: usize) -> Poly {
        let n = self.coords.len();
        match a.cmp(&b) {
            std::cmp::Ordering::Equal => Poly::zero(n),
            std::cmp::Ordering::Less => self.terms.get(&vec![a, b]).cloned().unwrap_or_else(|| Poly::zero(n)),
            std::cmp::Ordering::Greater => -&self.terms.get(&vec![b, a]).cloned().unwrap_or_else(|| Poly::zero(n)),
        }
    }

    /// Value on covectors at a point; only the part whose degree equals the
    /// number of covectors contributes.
    pub fn eval(&self, point: &[Coeff], covectors: &[Vec<Coeff>]) -> Coeff {
        let r = covectors.len();
        let mut total = Coeff::zero();
        for (w, p) in self.terms.iter().filter(|(w, _)| w.len() == r) {
            let m = QMatrix::from_fn(r, r, |i, j| covectors[i][w[j]].clone());
            total += p.eval(point) * det(&m);
        }
        total
    }

    pub fn display(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let names = self.coords.names();
        self.terms
            .iter()
            .map(|(w, p)| {
                let wedge: Vec<String> = w.iter().map(|&i| format!("∂{}", names[i])).collect();
                if wedge.is_empty() {
                    p.display(&names)
                } else {
                    format!("({}) {}", p.display(&names), wedge.join("∧"))
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }

    /// `{"schema": 1, "terms": [{"wedge": [[arrow,row,col],...], "poly": [...]}]}`
    /// with 1-based rows and columns.
    pub fn to_json(&self) -> Value {
        let names = self.coords.names();
        let q = self.coords.quiver();
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(w, p)| {
                let wedge: Vec<Value> = w
                    .iter()
                    .map(|&i| {
                        let (a, r, c) = self.coords.coord(i);
                        json!([q.arrow(a).name, r + 1, c + 1])
                    })
                    .collect();
                let poly: Vec<Value> = p
                    .terms()
                    .iter()
                    .rev()
                    .map(|(m, c)| {
                        let mono: serde_json::Map<String, Value> = m
                            .exps()
                            .iter()
                            .enumerate()
                            .filter(|(_, &e)| e > 0)
                            .map(|(v, &e)| (names[v].clone(), json!(e)))
                            .collect();
                        json!({ "mono": mono, "coeff": coeff::format(c) })
                    })
                    .collect();
                json!({ "wedge": wedge, "poly": poly })
            })
            .collect();
        json!({ "schema": 1, "terms": terms })
    }
}

fn det(m: &QMatrix) -> Coeff {
    let n = m.rows();
    let mut a = m.clone();
    let mut d = Coeff::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !a[(r, col)].is_zero()) else {
            return Coeff::zero();
        };
        if p != col {
            for j in 0..n {
                let t = a[(p, j)].clone();
                a[(p, j)] = a[(col, j)].clone();
                a[(col, j)] = t;
            }
            d = -d;
        }
        let piv = a[(col, col)].clone();
        d *= &piv;
        for r in col + 1..n {
            let f = &a[(r, col)] / &piv;
            if f.is_zero() {
                continue;
            }
            for j in col..n {
                let t = &f * &a[(col, j)];
                a[(r, j)] -= t;
            }
        }
    }
    d
}

/// The trace map: each monomial `P_1 a_1' ... P_r a_r'` becomes
/// `Σ P_1(X)_{m_1 n_1} ... P_r(X)_{m_r n_r} ∂a_1^{m_2 n_1} ∧ ... ∧ ∂a_r^{m_1 n_r}`
/// weighted by `λ` at the head of its canonical representative.
pub fn psi(gamma: &NecklaceElement, coords: &Arc<Coordinates>, lambda: &TraceWeights, budget: &mut Budget) -> Result<PolyField> {
    let q = gamma.quiver();
    if **q != **coords.quiver() {
        return Err(Error::QuiverMismatch);
    }
    if lambda.0.len() != q.num_vertices() {
        return Err(Error::Shape(format!(
            "{} trace weights for {} vertices",
            lambda.0.len(),
            q.num_vertices()
        )));
    }
    let mut out = PolyField::zero(coords.clone());
    for (w, c) in gamma.terms() {
        let weight = c * lambda.at(w.endpoints(q).1);
        if weight.is_zero() {
            continue;
        }
        let letters = w.letters();
        if w.grade() == 0 {
            let m = coords.word_matrix(w);
            let mut tr = Poly::zero(coords.len());
            for i in 0..m.rows {
                tr.add_assign(m.at(i, i));
            }
            budget.spend(tr.len())?;
            out.add_term(vec![], &tr.scale(&weight));
            continue;
        }
        let n = letters.len();
        let first_dual = letters.iter().position(|l| l.is_dual()).expect("positive grade");
        let start = (first_dual + 1) % n;
        let weight = if rotation_sign(letters, start) { -weight } else { weight };
        let rot: Vec<Letter> = letters[start..].iter().chain(&letters[..start]).copied().collect();
        let mut segments: Vec<(PolyMatrix, usize)> = Vec::new();
        let mut seg = Vec::new();
        for l in rot {
            if l.is_dual() {
                let p = Word::from_letters(std::mem::take(&mut seg), q.head(l));
                segments.push((coords.word_matrix(&p), l.arrow()));
            } else {
                seg.push(l);
            }
        }
        let scalar = Poly::constant(coords.len(), weight);
        for m1 in 0..segments[0].0.rows {
            expand(&segments, coords, 0, m1, m1, &scalar, &mut Vec::new(), &mut out, budget)?;
        }
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn expand(
    segments: &[(PolyMatrix, usize)],
    coords: &Coordinates,
    i: usize,
    m1: usize,
    m: usize,
    acc: &Poly,
    wedge: &mut Vec<usize>,
    out: &mut PolyField,
    budget: &mut Budget,
) -> Result<()> {
    if i == segments.len() {
        budget.spend(acc.len())?;
        out.add_term(wedge.clone(), acc);
        return Ok(());
    }
    let (p, a) = &segments[i];
    let next_rows: Vec<usize> = if i + 1 == segments.len() {
        vec![m1]
    } else {
        (0..segments[i + 1].0.rows).collect()
    };
    for n in 0..p.cols {
        let entry = p.at(m, n);
        if entry.is_zero() {
            continue;
        }
        let prod = acc * entry;
        for &mn in &next_rows {
            wedge.push(coords.index(*a, mn, n));
            expand(segments, coords, i + 1, m1, mn, &prod, wedge, out, budget)?;
            wedge.pop();
        }
    }
    Ok(())
}

fn without(v: &[usize], k: usize) -> Vec<usize> {
    v.iter().enumerate().filter(|(i, _)| *i != k).map(|(_, &x)| x).collect()
}

fn sign(neg: bool) -> Coeff {
    coeff::sign(neg)
}

/// The Schouten-Nijenhuis bracket on polyvector fields, computed on
/// decomposable terms `f ∂_{I_1} ∧ ... ∧ ∂_{I_r}` by
/// `Σ (-1)^{i+j} [X_i, Y_j] ∧ X_1..X̂_i..X_r ∧ Y_1..Ŷ_j..Y_s`,
/// with `[f, G] = -ι_{df} G` and `[F, g] = (-1)^{r-1} ι_{dg} F` on functions.
pub fn comm_schouten(f_field: &PolyField, g_field: &PolyField, budget: &mut Budget) -> Result<PolyField> {
    if *f_field.coords != *g_field.coords {
        return Err(Error::QuiverMismatch);
    }
    let mut out = PolyField::zero(f_field.coords.clone());
    for (ii, f) in &f_field.terms {
        for (jj, g) in &g_field.terms {
            budget.spend(f.len() * g.len() * (ii.len() + 1) * (jj.len() + 1))?;
            let (r, s) = (ii.len(), jj.len());
            if r == 0 && s == 0 {
                continue;
            }
            if r == 0 {
                for j in 0..s {
                    let c = &f.derivative(jj[j]) * g;
                    out.add_term(without(jj, j), &c.scale(&sign(j % 2 == 0)));
                }
                continue;
            }
            if s == 0 {
                for i in 0..r {
                    let c = &g.derivative(ii[i]) * f;
                    out.add_term(without(ii, i), &c.scale(&sign((i + r - 1) % 2 == 1)));
                }
                continue;
            }
            let i_rest = &ii[1..];
            let j_rest = &jj[1..];
            // i = j = 1
            let mut w = vec![jj[0]];
            w.extend_from_slice(i_rest);
            w.extend_from_slice(j_rest);
            out.add_term(w, &(f * &g.derivative(ii[0])));
            let mut w = vec![ii[0]];
            w.extend_from_slice(i_rest);
            w.extend_from_slice(j_rest);
            out.add_term(w, &-&(g * &f.derivative(jj[0])));
            // i = 1, j > 1: [f ∂_{I_1}, ∂_{J_j}] = -(∂_{J_j} f) ∂_{I_1}
            for j in 1..s {
                let c = &f.derivative(jj[j]) * g;
                let mut w = ii.clone();
                w.extend(without(jj, j));
                // (-1)^{1+j} with 1-based j, times the minus sign
                out.add_term(w, &c.scale(&sign(j % 2 == 0)));
            }
            // i > 1, j = 1: [∂_{I_i}, g ∂_{J_1}] = (∂_{I_i} g) ∂_{J_1}
            for i in 1..r {
                let c = &g.derivative(ii[i]) * f;
                let mut w = vec![jj[0]];
                w.extend(without(ii, i));
                w.extend_from_slice(j_rest);
                out.add_term(w, &c.scale(&sign(i % 2 == 1)));
            }
        }
    }
    Ok(out)
}

/// `{A_ij, B_kl} = Σ 2 κ λ P(X)_{kj} R(X)_{il}` over the readings
/// `κ P a' R b'` of the bivector, as a matrix over all coordinate pairs.
pub fn bracket_matrix(pi: &NecklaceElement, coords: &Coordinates, lambda: &TraceWeights) -> Result<Vec<Vec<Poly>>> {
    let n = coords.len();
    let mut out = vec![vec![Poly::zero(n); n]; n];
    for rd in readings(pi)? {
        let c = &rd.weight * coeff::int(2) * lambda.at(rd.trace_vertex);
        if c.is_zero() {
            continue;
        }
        let p = coords.word_matrix(&rd.left);
        let r = coords.word_matrix(&rd.right);
        for k in 0..p.rows {
            for j in 0..p.cols {
                let pk = p.at(k, j);
                if pk.is_zero() {
                    continue;
                }
                for i in 0..r.rows {
                    for l in 0..r.cols {
                        let rl = r.at(i, l);
                        if rl.is_zero() {
                            continue;
                        }
                        let a = coords.index(rd.first, i, j);
                        let b = coords.index(rd.second, k, l);
                        out[a][b].add_assign(&(pk * rl).scale(&c));
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Single entry of [`bracket_matrix`].
pub fn induced_bracket(pi: &NecklaceElement, coords: &Coordinates, lambda: &TraceWeights, a: usize, b: usize) -> Result<Poly> {
    let (arrow_a, i, j) = coords.coord(a);
    let (arrow_b, k, l) = coords.coord(b);
    let mut out = Poly::zero(coords.len());
    for rd in readings(pi)? {
        if rd.first != arrow_a || rd.second != arrow_b {
            continue;
        }
        let c = &rd.weight * coeff::int(2) * lambda.at(rd.trace_vertex);
        let p = coords.word_matrix(&rd.left);
        let r = coords.word_matrix(&rd.right);
        out.add_assign(&(p.at(k, j) * r.at(i, l)).scale(&c));
    }
    Ok(out)
}

/// Both sides of `Ψ([γ, δ]) = [Ψγ, Ψδ]`.
#[derive(Debug, Clone)]
pub struct HomReport {
    pub lhs: PolyField,
    pub rhs: PolyField,
    pub holds: bool,
}

pub fn bracket_homomorphism_check(
    gamma: &NecklaceElement,
    delta: &NecklaceElement,
    coords: &Arc<Coordinates>,
    lambda: &TraceWeights,
    budget: &mut Budget,
) -> Result<HomReport> {
    let lhs = psi(&schouten(gamma, delta)?, coords, lambda, budget)?;
    let pg = psi(gamma, coords, lambda, budget)?;
    let pd = psi(delta, coords, lambda, budget)?;
    let rhs = comm_schouten(&pg, &pd, budget)?;
    Ok(HomReport {
        holds: lhs == rhs,
        lhs,
        rhs,
    })
}

/// `[Ψ(Π), Ψ(Π)]`.
pub fn jacobi_residual(pi: &NecklaceElement, coords: &Arc<Coordinates>, lambda: &TraceWeights, budget: &mut Budget) -> Result<PolyField> {
    let f = psi(pi, coords, lambda, budget)?;
    comm_schouten(&f, &f, budget)
}

fn random_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize, range: i64) -> QMatrix {
    QMatrix::from_fn(rows, cols, |_, _| coeff::int(rng.gen_range(-range..=range)))
}

fn random_invertible<R: Rng>(rng: &mut R, n: usize) -> (QMatrix, QMatrix) {
    loop {
        let m = random_matrix(rng, n, n, 3);
        if let Some(inv) = m.inverse() {
            return (m, inv);
        }
    }
}

/// Compares `F(g·X)(Y)` with `F(X)(g^*Y)` at random integer points, group
/// elements and covectors, where `(g·X)_a = g_{h(a)} X_a g_{t(a)}^{-1}`.
pub fn invariance_check<R: Rng>(field: &PolyField, samples: usize, rng: &mut R) -> Result<bool> {
    let coords = field.coords();
    let q = coords.quiver();
    let dims = coords.dims();
    for _ in 0..samples {
        let mats: Vec<QMatrix> = (0..q.num_arrows())
            .map(|a| {
                let (r, c) = coords.shape(a);
                random_matrix(rng, r, c, 4)
            })
            .collect();
        let group: Vec<(QMatrix, QMatrix)> = q.vertices().map(|v| random_invertible(rng, dims.at(v))).collect();
        let g = |v: usize| &group[v - 1];
        let moved: Vec<QMatrix> = q
            .arrows()
            .iter()
            .zip(&mats)
            .map(|(a, x)| &(&g(a.head).0 * x) * &g(a.tail).1)
            .collect();
        let point = coords.flatten(&mats);
        let moved_point = coords.flatten(&moved);
        for r in field.grades() {
            let mut ys = Vec::new();
            let mut pulled = Vec::new();
            for _ in 0..r {
                let blocks: Vec<QMatrix> = (0..q.num_arrows())
                    .map(|a| {
                        let (rows, cols) = coords.shape(a);
                        random_matrix(rng, cols, rows, 4)
                    })
                    .collect();
                let back: Vec<QMatrix> = q
                    .arrows()
                    .iter()
                    .zip(&blocks)
                    .map(|(a, y)| &(&g(a.tail).1 * y) * &g(a.head).0)
                    .collect();
                ys.push(coords.covector(&blocks));
                pulled.push(coords.covector(&back));
            }
            if field.eval(&moved_point, &ys) != field.eval(&point, &pulled) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
