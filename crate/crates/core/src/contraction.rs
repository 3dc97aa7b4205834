//! Contracting arrows of a quiver and pushing bivectors along.
//!
//! An invertible block `X_a` is normalized to the identity using the group
//! at one of its endpoints; that vertex disappears and the dual `a'` is
//! replaced by the solution of the moment condition at the vertex.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::coeff::{self, Coeff};
use crate::error::{Error, Result};
use crate::necklace::{normalize, NecklaceElement};
use crate::path_algebra::{FreeElement, Word};
use crate::quiver::{Letter, Quiver};

/// Which endpoint's group is used in a single contraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Normalize with the group at the head; the tail vertex survives.
    Tail,
    /// Normalize with the group at the tail; the head vertex survives.
    Head,
}

impl std::str::FromStr for Side {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tail" => Ok(Side::Tail),
            "head" => Ok(Side::Head),
            _ => Err(Error::Usage(format!("side must be `head` or `tail`, not `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Mode {
    Single(Side),
    /// Several arrows into one vertex, with per-arrow scalars.
    Multi(Vec<Coeff>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContractionPlan {
    pub mode: Mode,
    pub arrows: Vec<usize>,
    /// The vertex that disappears.
    pub removed: usize,
}

impl ContractionPlan {
    pub fn single(q: &Quiver, arrow: &str, side: Side) -> Result<Self> {
        let a = q.arrow_index(arrow).ok_or_else(|| Error::UnknownArrow(arrow.to_string()))?;
        let ar = q.arrow(a);
        if ar.is_loop() {
            return Err(Error::InvalidPlan(format!("`{arrow}` is a loop")));
        }
        let removed = match side {
            Side::Tail => ar.head,
            Side::Head => ar.tail,
        };
        Ok(ContractionPlan {
            mode: Mode::Single(side),
            arrows: vec![a],
            removed,
        })
    }

    pub fn multi(q: &Quiver, arrows: &[&str], eps: Option<Vec<Coeff>>) -> Result<Self> {
        if arrows.is_empty() {
            return Err(Error::InvalidPlan("no arrows given".into()));
        }
        let idx: Vec<usize> = arrows
            .iter()
            .map(|n| q.arrow_index(n).ok_or_else(|| Error::UnknownArrow(n.to_string())))
            .collect::<Result<_>>()?;
        let j = q.arrow(idx[0]).head;
        let mut tails = Vec::new();
        for &a in &idx {
            let ar = q.arrow(a);
            if ar.head != j {
                return Err(Error::InvalidPlan(format!("`{}` does not end at vertex {j}", ar.name)));
            }
            if ar.tail == j {
                return Err(Error::InvalidPlan(format!("`{}` is a loop", ar.name)));
            }
            if tails.contains(&ar.tail) {
                return Err(Error::InvalidPlan(format!("two arrows start at vertex {}", ar.tail)));
            }
            tails.push(ar.tail);
        }
        let eps = eps.unwrap_or_else(|| vec![Coeff::one(); idx.len()]);
        if eps.len() != idx.len() {
            return Err(Error::InvalidPlan(format!("{} scalars for {} arrows", eps.len(), idx.len())));
        }
        if eps.iter().any(Zero::is_zero) {
            return Err(Error::InvalidPlan("scalars must be nonzero".into()));
        }
        Ok(ContractionPlan {
            mode: Mode::Multi(eps),
            arrows: idx,
            removed: j,
        })
    }
}

/// The contracted quiver together with the arrow and vertex correspondence.
#[derive(Debug, Clone)]
pub struct Contraction {
    pub quiver: Arc<Quiver>,
    /// New arrows each old arrow decomposes into; empty for contracted ones.
    pub components: Vec<Vec<usize>>,
    /// New vertex of each old vertex other than the removed one.
    pub vertex_map: Vec<Option<usize>>,
    /// New vertices the removed vertex splits into.
    pub split: Vec<usize>,
}

pub fn contract(q: &Quiver, plan: &ContractionPlan) -> Result<Contraction> {
    let j = plan.removed;
    let k = q.num_vertices();
    let vertex_map: Vec<Option<usize>> = (1..=k).map(|v| (v != j).then(|| if v < j { v } else { v - 1 })).collect();
    let nv = |v: usize| vertex_map[v - 1].expect("surviving vertex");
    let mut names: Vec<(String, usize, usize)> = Vec::new();
    let mut components = vec![Vec::new(); q.num_arrows()];
    let split: Vec<usize>;
    match &plan.mode {
        Mode::Single(_) => {
            let a = q.arrow(plan.arrows[0]);
            let survivor = if a.head == j { a.tail } else { a.head };
            let fused = nv(survivor);
            split = vec![fused];
            let map = |v: usize| if v == j { fused } else { nv(v) };
            for (b, ar) in q.arrows().iter().enumerate() {
                if b == plan.arrows[0] {
                    continue;
                }
                components[b].push(names.len());
                names.push((ar.name.clone(), map(ar.tail), map(ar.head)));
            }
        }
        Mode::Multi(_) => {
            let v: Vec<usize> = plan.arrows.iter().map(|&a| nv(q.arrow(a).tail)).collect();
            split = v.clone();
            for (b, ar) in q.arrows().iter().enumerate() {
                if plan.arrows.contains(&b) {
                    continue;
                }
                let mut push = |name: String, t: usize, h: usize, comps: &mut Vec<usize>| {
                    comps.push(names.len());
                    names.push((name, t, h));
                };
                match (ar.tail == j, ar.head == j) {
                    (false, false) => push(ar.name.clone(), nv(ar.tail), nv(ar.head), &mut components[b]),
                    (true, false) => {
                        for (m, &vm) in v.iter().enumerate() {
                            push(format!("{}_{}", ar.name, m + 1), vm, nv(ar.head), &mut components[b]);
                        }
                    }
                    (false, true) => {
                        for (m, &vm) in v.iter().enumerate() {
                            push(format!("{}_{}", ar.name, m + 1), nv(ar.tail), vm, &mut components[b]);
                        }
                    }
                    (true, true) => {
                        for (m, &vm) in v.iter().enumerate() {
                            for (mp, &vmp) in v.iter().enumerate() {
                                push(format!("{}_{}_{}", ar.name, m + 1, mp + 1), vmp, vm, &mut components[b]);
                            }
                        }
                    }
                }
            }
        }
    }
    let mut seen = std::collections::BTreeSet::new();
    for (n, _, _) in &names {
        if !seen.insert(n.clone()) {
            return Err(Error::InvalidPlan(format!("derived arrow name `{n}` collides with an existing arrow")));
        }
    }
    let quiver = Arc::new(Quiver::new(k - 1, &names)?);
    Ok(Contraction {
        quiver,
        components,
        vertex_map,
        split,
    })
}

pub fn contract_quiver(q: &Quiver, plan: &ContractionPlan) -> Result<Quiver> {
    Ok((*contract(q, plan)?.quiver).clone())
}

impl Contraction {
    fn sum_of(&self, comps: &[usize], dual: bool) -> FreeElement {
        let mut f = FreeElement::zero(self.quiver.clone());
        for &c in comps {
            let l = if dual { Letter::Dual(c) } else { Letter::Arrow(c) };
            f.add_term(Word::Path(vec![l]), Coeff::one());
        }
        f
    }

    fn idempotent(&self, v: usize) -> FreeElement {
        FreeElement::idempotent(self.quiver.clone(), v).expect("vertex exists")
    }
}

/// Image of each letter of the original doubled quiver.
fn substitution(q: &Quiver, plan: &ContractionPlan, c: &Contraction) -> Result<BTreeMap<Letter, FreeElement>> {
    let j = plan.removed;
    let mut map = BTreeMap::new();
    for b in 0..q.num_arrows() {
        if plan.arrows.contains(&b) {
            continue;
        }
        map.insert(Letter::Arrow(b), c.sum_of(&c.components[b], false));
        map.insert(Letter::Dual(b), c.sum_of(&c.components[b], true));
    }
    // Σ_{b out of j} σ(b') σ(b) - Σ_{b into j, not contracted} σ(b) σ(b')
    let mut moment = FreeElement::zero(c.quiver.clone());
    for b in q.arrows_out_of(j) {
        if plan.arrows.contains(&b) {
            continue;
        }
        let t = map[&Letter::Dual(b)].multiply(&map[&Letter::Arrow(b)])?;
        moment = moment.checked_add(&t)?;
    }
    for b in q.arrows_into(j) {
        if plan.arrows.contains(&b) {
            continue;
        }
        let t = map[&Letter::Arrow(b)].multiply(&map[&Letter::Dual(b)])?;
        moment = &moment - &t;
    }
    match &plan.mode {
        Mode::Single(side) => {
            let a = plan.arrows[0];
            let e = c.idempotent(c.split[0]);
            let dual = match side {
                Side::Tail => moment,
                Side::Head => -&moment,
            };
            map.insert(Letter::Arrow(a), e);
            map.insert(Letter::Dual(a), dual);
        }
        Mode::Multi(eps) => {
            for (m, &a) in plan.arrows.iter().enumerate() {
                let e = c.idempotent(c.split[m]);
                map.insert(Letter::Arrow(a), e.scale(&eps[m]));
                let inv = coeff::one() / &eps[m];
                map.insert(Letter::Dual(a), e.multiply(&moment)?.scale(&inv));
            }
        }
    }
    Ok(map)
}

/// Substitutes the plan into a necklace element and renormalizes.
pub fn contract_bivector(pi: &NecklaceElement, plan: &ContractionPlan) -> Result<(Arc<Quiver>, NecklaceElement)> {
    let q = pi.quiver();
    let c = contract(q, plan)?;
    let map = substitution(q, plan, &c)?;
    let mut acc = FreeElement::zero(c.quiver.clone());
    for (w, coef) in pi.terms() {
        let image = match w {
            Word::Idempotent(v) if *v == plan.removed => {
                let mut f = FreeElement::zero(c.quiver.clone());
                for &s in &c.split {
                    f = f.checked_add(&c.idempotent(s))?;
                }
                f
            }
            Word::Idempotent(v) => c.idempotent(c.vertex_map[v - 1].expect("surviving vertex")),
            Word::Path(letters) => {
                let mut f = map[&letters[0]].clone();
                for l in &letters[1..] {
                    f = f.multiply(&map[l])?;
                    if f.is_zero() {
                        break;
                    }
                }
                f
            }
        };
        acc = acc.checked_add(&image.scale(coef))?;
    }
    Ok((c.quiver.clone(), normalize(&acc)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kron() -> Arc<Quiver> {
        Arc::new(Quiver::new(2, &[("x", 1, 2), ("y", 1, 2)]).unwrap())
    }

    #[test]
    fn single_contraction_quiver() {
        let q = kron();
        let plan = ContractionPlan::single(&q, "x", Side::Tail).unwrap();
        let qa = contract_quiver(&q, &plan).unwrap();
        assert_eq!(qa.num_vertices(), 1);
        assert_eq!(qa.num_arrows(), 1);
        assert!(qa.arrow(0).is_loop());
        assert_eq!(qa.arrow(0).name, "y");
    }

    #[test]
    fn loops_cannot_be_contracted() {
        let q = Quiver::new(1, &[("x", 1, 1)]).unwrap();
        assert!(matches!(ContractionPlan::single(&q, "x", Side::Tail), Err(Error::InvalidPlan(_))));
        let q = Quiver::new(3, &[("a", 1, 3), ("b", 1, 3)]).unwrap();
        assert!(matches!(ContractionPlan::multi(&q, &["a", "b"], None), Err(Error::InvalidPlan(_))));
    }

    #[test]
    fn multi_contraction_builds_butterfly() {
        let q = Quiver::new(3, &[("a1", 1, 3), ("b1", 1, 3), ("a2", 2, 3), ("b2", 2, 3)]).unwrap();
        let plan = ContractionPlan::multi(&q, &["a1", "a2"], None).unwrap();
        let qp = contract_quiver(&q, &plan).unwrap();
        assert_eq!(qp.num_vertices(), 2);
        let ends: Vec<(usize, usize)> = qp.arrows().iter().map(|a| (a.tail, a.head)).collect();
        assert_eq!(ends, vec![(1, 1), (1, 2), (2, 1), (2, 2)]);
    }

    #[test]
    fn loops_at_the_removed_vertex_split_into_blocks() {
        let q = Quiver::new(3, &[("a1", 1, 3), ("a2", 2, 3), ("c", 3, 3)]).unwrap();
        let plan = ContractionPlan::multi(&q, &["a1", "a2"], None).unwrap();
        let qp = contract_quiver(&q, &plan).unwrap();
        let names: Vec<(String, usize, usize)> = qp.arrows().iter().map(|a| (a.name.clone(), a.tail, a.head)).collect();
        assert_eq!(
            names,
            vec![
                ("c_1_1".to_string(), 1, 1),
                ("c_1_2".to_string(), 2, 1),
                ("c_2_1".to_string(), 1, 2),
                ("c_2_2".to_string(), 2, 2)
            ]
        );
    }

    #[test]
    fn name_collisions_are_reported() {
        let q = Quiver::new(3, &[("a1", 1, 3), ("a2", 2, 3), ("c", 3, 1), ("c_1", 1, 2)]).unwrap();
        let plan = ContractionPlan::multi(&q, &["a1", "a2"], None).unwrap();
        assert!(matches!(contract_quiver(&q, &plan), Err(Error::InvalidPlan(_))));
    }
}
