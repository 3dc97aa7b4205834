mod common;

use std::sync::Arc;

use common::*;
use proptest::prelude::*;
use quiver_poisson::coeff::{self, Coeff};
use quiver_poisson::matrix::QMatrix;
use quiver_poisson::necklace::{
    apply_derivation, h0_bracket, is_poisson, normalize, schouten, superderivative, NecklaceElement,
};
use quiver_poisson::path_algebra::{Covector, MatrixPoint};
use quiver_poisson::representation::{induced_bracket, psi, Budget, Coordinates, TraceWeights};
use quiver_poisson::yang_baxter::{
    aguiar, associativity_check, ayb_check, classical_yb_check, kronecker, linear_to_algebra, rmatrix_to_bivector,
    Gen, RMatrix, StructureConstants,
};
use quiver_poisson::{DimensionVector, FreeElement, Letter, Quiver, Word};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn sign(p: i64) -> Coeff {
    if p.rem_euclid(2) == 0 {
        coeff::one()
    } else {
        coeff::int(-1)
    }
}

fn shift(e: &NecklaceElement) -> i64 {
    *e.grades().first().unwrap_or(&0) as i64 - 1
}

fn quiver_for(pick: usize) -> Arc<Quiver> {
    match pick % 3 {
        0 => loops2(),
        1 => butterfly(),
        _ => Arc::new(Quiver::new(2, &[("x", 1, 1), ("y", 1, 2), ("z", 2, 1)]).unwrap()),
    }
}

fn butterfly() -> Arc<Quiver> {
    Arc::new(Quiver::new(2, &[("a", 1, 1), ("b", 2, 2), ("x", 1, 2), ("y", 2, 1)]).unwrap())
}

fn element<R: Rng>(q: &Arc<Quiver>, grade: usize, max_len: usize, rng: &mut R) -> NecklaceElement {
    random_necklace(q, grade, max_len, 3, rng)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn graded_antisymmetry(seed in any::<u64>(), pick in 0usize..3, r in 0usize..=3, s in 0usize..=3) {
        let mut rng = rng(seed);
        let q = quiver_for(pick);
        let a = element(&q, r, 6, &mut rng);
        let b = element(&q, s, 6, &mut rng);
        let ab = schouten(&a, &b).unwrap();
        let ba = schouten(&b, &a).unwrap();
        prop_assert!((&ab + &ba.scale(&sign(shift(&a) * shift(&b)))).is_zero());
    }

    #[test]
    fn graded_jacobi(seed in any::<u64>(), pick in 0usize..3, grades in (0usize..=3, 0usize..=3, 0usize..=3)) {
        let mut rng = rng(seed);
        let q = quiver_for(pick);
        let a = element(&q, grades.0, 5, &mut rng);
        let b = element(&q, grades.1, 5, &mut rng);
        let c = element(&q, grades.2, 5, &mut rng);
        let (da, db, dc) = (shift(&a), shift(&b), shift(&c));
        let br = |u: &NecklaceElement, v: &NecklaceElement| schouten(u, v).unwrap();
        let total = &(&br(&a, &br(&b, &c)).scale(&sign(da * dc)) + &br(&b, &br(&c, &a)).scale(&sign(db * da)))
            + &br(&c, &br(&a, &b)).scale(&sign(dc * db));
        prop_assert!(total.is_zero(), "{}", total);
    }

    // Moving the first k letters to the back costs the Koszul sign of
    // passing p duals across the remaining total - p.
    #[test]
    fn signed_rotations_represent_the_same_necklace(
        seed in any::<u64>(), pick in 0usize..3, grade in 0usize..=3, len in 1usize..=6, k in 0usize..6,
        other_grade in 0usize..=2,
    ) {
        let mut rng = rng(seed);
        let q = quiver_for(pick);
        prop_assume!(grade <= len);
        let Some(w) = random_closed_word(&q, len, grade, &mut rng) else { return Ok(()) };
        let k = k % len;
        let p = w[..k].iter().filter(|l| l.is_dual()).count();
        let rotated: Vec<Letter> = w[k..].iter().chain(&w[..k]).copied().collect();
        let original = normalize(&FreeElement::monomial(q.clone(), Word::Path(w.clone()), coeff::one()).unwrap());
        let moved = normalize(
            &FreeElement::monomial(q.clone(), Word::Path(rotated), sign((p * (grade - p)) as i64)).unwrap(),
        );
        prop_assert_eq!(&original, &moved);
        let other = element(&q, other_grade, 4, &mut rng);
        prop_assert_eq!(schouten(&original, &other).unwrap(), schouten(&moved, &other).unwrap());
    }

    // A grade-one element Σ P_a a' is the derivation a ↦ P_a.
    #[test]
    fn grade_one_bracket_is_the_derivation_commutator(seed in any::<u64>(), pick in 0usize..3) {
        let mut rng = rng(seed);
        let q = quiver_for(pick);
        let g = element(&q, 1, 4, &mut rng);
        let d = element(&q, 1, 4, &mut rng);
        let bracket = schouten(&g, &d).unwrap();
        let values = |e: &NecklaceElement| -> Vec<FreeElement> {
            (0..q.num_arrows()).map(|a| superderivative(Letter::Dual(a), e)).collect()
        };
        let (vg, vd, vb) = (values(&g), values(&d), values(&bracket));
        for a in 0..q.num_arrows() {
            let gd = apply_derivation(&vg, &vd[a]).unwrap();
            let dg = apply_derivation(&vd, &vg[a]).unwrap();
            prop_assert_eq!(&vb[a], &(&gd - &dg));
        }
    }

    #[test]
    fn evaluation_is_an_algebra_map(seed in any::<u64>(), dims in (1usize..=2, 1usize..=2), l1 in 1usize..=4, l2 in 1usize..=4) {
        let mut rng = rng(seed);
        let q = butterfly();
        let dims = DimensionVector::new(vec![dims.0, dims.1]);
        let mats = q
            .arrows()
            .iter()
            .map(|a| random_matrix(dims.at(a.head), dims.at(a.tail), &mut rng))
            .collect();
        let point = MatrixPoint::new(&q, dims, mats).unwrap();
        let f = random_path_element(&q, l1, &mut rng);
        let g = random_path_element(&q, l2, &mut rng);
        let fg = f.multiply(&g).unwrap().evaluate(&point, &[]).unwrap().to_dense();
        let prod = &f.evaluate(&point, &[]).unwrap().to_dense() * &g.evaluate(&point, &[]).unwrap().to_dense();
        prop_assert_eq!(fg, prod);
    }

    #[test]
    fn idempotents_resolve_the_identity(seed in any::<u64>(), d1 in 1usize..=3, d2 in 1usize..=3) {
        let mut rng = rng(seed);
        let q = butterfly();
        let dims = DimensionVector::new(vec![d1, d2]);
        let mats = q.arrows().iter().map(|a| random_matrix(dims.at(a.head), dims.at(a.tail), &mut rng)).collect();
        let point = MatrixPoint::new(&q, dims, mats).unwrap();
        let e: Vec<QMatrix> = (1..=2)
            .map(|v| FreeElement::idempotent(q.clone(), v).unwrap().evaluate(&point, &[]).unwrap().to_dense())
            .collect();
        prop_assert_eq!(&e[0] + &e[1], QMatrix::identity(d1 + d2));
        prop_assert!((&e[0] * &e[1]).is_zero());
        prop_assert_eq!(&e[0] * &e[0], e[0].clone());
    }

    #[test]
    fn ayb_agrees_with_poisson_and_implies_classical(seed in any::<u64>(), pick in 0usize..4, solution in any::<bool>()) {
        let mut rng = rng(seed);
        let r = if solution { relabelled_solution(2 + pick % 2, &mut rng) } else { random_skew_r(&small_quiver(pick), &mut rng) };
        let ayb = ayb_check(&r).holds;
        prop_assert_eq!(ayb, is_poisson(&rmatrix_to_bivector(&r)).unwrap().holds);
        if ayb {
            prop_assert!(classical_yb_check(&r).holds);
        }
    }

    #[test]
    fn linear_poisson_iff_associative(seed in any::<u64>(), loops in 1usize..=3, nnz in 1usize..=4) {
        let mut rng = rng(seed);
        let names: Vec<(String, usize, usize)> = (1..=loops).map(|i| (format!("x{i}"), 1, 1)).collect();
        let q = Arc::new(Quiver::new(1, &names).unwrap());
        let mut j = StructureConstants { num_arrows: loops, entries: Default::default() };
        for _ in 0..nnz {
            let key = (rng.gen_range(0..loops), rng.gen_range(0..loops), rng.gen_range(0..loops));
            j.entries.insert(key, small_coeff(&mut rng));
        }
        let pi = j.to_bivector(q).unwrap();
        prop_assert_eq!(associativity_check(&linear_to_algebra(&pi).unwrap()), is_poisson(&pi).unwrap().holds);
    }

    #[test]
    fn printed_elements_parse_back(seed in any::<u64>(), pick in 0usize..3, grade in 0usize..=3) {
        let mut rng = rng(seed);
        let q = quiver_for(pick);
        let e = element(&q, grade, 6, &mut rng);
        prop_assert_eq!(NecklaceElement::parse(&e.to_string(), &q).unwrap(), e);
    }

    #[test]
    fn psi_preserves_grade(seed in any::<u64>(), grade in 0usize..=2, dim in 1usize..=2) {
        let mut rng = rng(seed);
        let q = loops2();
        let e = element(&q, grade, 4, &mut rng);
        prop_assume!(!e.is_zero());
        let coords = Arc::new(Coordinates::new(q.clone(), DimensionVector::new(vec![dim])).unwrap());
        let field = psi(&e, &coords, &TraceWeights::ones(1), &mut Budget::default()).unwrap();
        prop_assert!(field.grades().iter().all(|g| *g == grade));
    }
}

fn random_matrix<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> QMatrix {
    QMatrix::from_fn(rows, cols, |_, _| coeff::ratio(rng.gen_range(-4..=4), rng.gen_range(1..=3)))
}

/// Random sum of composable dual-free paths of the given length.
fn random_path_element<R: Rng>(q: &Arc<Quiver>, len: usize, rng: &mut R) -> FreeElement {
    let mut f = FreeElement::zero(q.clone());
    for _ in 0..3 {
        let mut word: Vec<Letter> = Vec::new();
        for _ in 0..len {
            let options: Vec<Letter> = (0..q.num_arrows())
                .map(Letter::Arrow)
                .filter(|l| word.last().is_none_or(|prev| q.tail(*prev) == q.head(*l)))
                .collect();
            word.push(*options.choose(rng).unwrap());
        }
        f.add_term(Word::Path(word), small_coeff(rng));
    }
    f
}

fn small_quiver(pick: usize) -> Arc<Quiver> {
    match pick {
        0 => loops2(),
        1 => Arc::new(kronecker(2)),
        2 => Arc::new(kronecker(3)),
        _ => Arc::new(Quiver::new(1, &[("x", 1, 1), ("y", 1, 1), ("z", 1, 1)]).unwrap()),
    }
}

fn random_skew_r<R: Rng>(q: &Arc<Quiver>, rng: &mut R) -> RMatrix {
    let n = q.num_arrows();
    let gens: Vec<Gen> = (0..n)
        .flat_map(|a| (0..n).map(move |b| Gen::new(a, b)))
        .filter(|g| g.is_valid(q))
        .collect();
    let mut r = RMatrix::zero(q.clone());
    for _ in 0..rng.gen_range(1..=3) {
        let _ = r.add_wedge(*gens.choose(rng).unwrap(), *gens.choose(rng).unwrap(), small_coeff(rng));
    }
    r
}

fn relabelled_solution<R: Rng>(m: usize, rng: &mut R) -> RMatrix {
    let q = Arc::new(kronecker(m));
    let mut perm: Vec<usize> = (0..m).collect();
    perm.shuffle(rng);
    let c = small_coeff(rng);
    let mut r = RMatrix::zero(q.clone());
    for ((u, v), x) in aguiar(m, q).unwrap().terms() {
        r.add(Gen::new(perm[u.arrow], perm[u.dual]), Gen::new(perm[v.arrow], perm[v.dual]), x * &c)
            .unwrap();
    }
    r
}

// Cyclic derivative computed letter by letter on dual-free words.
fn cyclic_derivative_oracle(q: &Arc<Quiver>, f: &NecklaceElement, arrow: usize) -> FreeElement {
    let mut out = FreeElement::zero(q.clone());
    for (w, c) in f.terms() {
        let letters = w.letters();
        for i in 0..letters.len() {
            if letters[i] == Letter::Arrow(arrow) {
                let rest: Vec<Letter> = letters[i + 1..].iter().chain(&letters[..i]).copied().collect();
                out.add_term(Word::from_letters(rest, q.tail(letters[i])), c.clone());
            }
        }
    }
    out
}

// With the constant bracket [x', y'] the induced bracket on cyclic words is
// the symplectic necklace bracket Σ ∂_x f ∂_y g - ∂_y f ∂_x g.
#[test]
fn constant_symplectic_bracket_on_cyclic_words() {
    let q = loops2();
    let pi = nk("[x', y']", &q);
    let mut rng = rng(3);
    let mut nonzero = 0;
    for _ in 0..40 {
        let f = element(&q, 0, 4, &mut rng);
        let g = element(&q, 0, 4, &mut rng);
        let d = |e: &NecklaceElement, a: usize| cyclic_derivative_oracle(&q, e, a);
        let expected = normalize(&(&(&d(&f, 0) * &d(&g, 1)) - &(&d(&f, 1) * &d(&g, 0))));
        let got = h0_bracket(&f, &g, &pi).unwrap();
        assert_eq!(got, expected, "f = {f}, g = {g}");
        if !got.is_zero() {
            nonzero += 1;
        }
    }
    assert!(nonzero > 10);
}

#[test]
fn induced_bracket_matches_the_field() {
    let q = q3();
    let pi = nk("[x y', x x'] + [x z', y x'] + [y z', x x'] + [y z', y y']", &q);
    for dims in [vec![1, 1], vec![2, 1], vec![2, 2]] {
        let coords = Arc::new(Coordinates::new(q.clone(), DimensionVector::new(dims)).unwrap());
        let lambda = TraceWeights::ones(2);
        let field = psi(&pi, &coords, &lambda, &mut Budget::default()).unwrap();
        for a in 0..coords.len() {
            for b in 0..coords.len() {
                assert_eq!(induced_bracket(&pi, &coords, &lambda, a, b).unwrap(), field.pair2(a, b));
            }
        }
    }
}

#[test]
fn covector_evaluation_pairs_each_dual_slot() {
    let q = loops2();
    let dims = DimensionVector::new(vec![2]);
    let mut rng = rng(5);
    let mats: Vec<QMatrix> = (0..2).map(|_| random_matrix(2, 2, &mut rng)).collect();
    let point = MatrixPoint::new(&q, dims, mats.clone()).unwrap();
    let cov = Covector {
        mats: (0..2).map(|_| random_matrix(2, 2, &mut rng)).collect(),
    };
    let f = FreeElement::monomial(q.clone(), Word::Path(vec![Letter::Arrow(0), Letter::Dual(1)]), coeff::one()).unwrap();
    let got = f.evaluate(&point, std::slice::from_ref(&cov)).unwrap().to_dense();
    assert_eq!(got, &mats[0] * &cov.mats[1]);
}
