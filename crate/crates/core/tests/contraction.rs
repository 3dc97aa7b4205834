mod common;

use std::sync::Arc;

use common::*;
use quiver_poisson::coeff::{self, Coeff};
use quiver_poisson::contraction::*;
use quiver_poisson::matrix::QMatrix;
use quiver_poisson::necklace::{is_poisson, NecklaceElement};
use quiver_poisson::representation::{psi, Budget, Coordinates, TraceWeights};
use quiver_poisson::yang_baxter::{aguiar, rmatrix_to_bivector};
use quiver_poisson::{DimensionVector, Quiver};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GL3: &str = "[x y', x x'] + [x z', y x'] + [y z', x x'] + [y z', y y']";

fn contracted(pi: &NecklaceElement, arrow: &str, side: Side) -> (Arc<Quiver>, NecklaceElement) {
    let plan = ContractionPlan::single(pi.quiver(), arrow, side).unwrap();
    contract_bivector(pi, &plan).unwrap()
}

#[test]
fn three_arrow_contractions_match_the_printed_brackets() {
    let q = q3();
    let pi = nk(GL3, &q);
    let expected = [
        ("x", "-[y', y y' + z z'] - [z', y y y' + y z z'] - [y z', z z']"),
        ("y", "-[x x x' + x z z', x x'] + [z', x' x - z z']"),
        ("z", "[x y', x x'] - [x x x' + x y y', y x'] - [y x x' + y y y', x x' + y y']"),
    ];
    for (a, src) in expected {
        let (qa, got) = contracted(&pi, a, Side::Tail);
        assert_eq!(qa.num_vertices(), 1);
        assert_eq!(got, nk(src, &qa), "contracting {a}");
        assert!(is_poisson(&got).unwrap().holds);
    }
}

#[test]
fn kronecker_contraction_at_y_is_cubic() {
    let k = kronecker2();
    let (qa, got) = contracted(&nk("[x y', x x']", &k), "y", Side::Tail);
    assert_eq!(got, nk("[x x', x x x']", &qa));
}

#[test]
fn kronecker_contraction_at_x_is_the_restriction_of_the_three_arrow_case() {
    let k = kronecker2();
    let (qa, got) = contracted(&nk("[x y', x x']", &k), "x", Side::Tail);
    assert_eq!(got, nk("-[y', y y']", &qa));
    assert_eq!(got, nk("2 y y' y'", &qa));
}

#[test]
fn head_side_preserves_poisson() {
    let q = q3();
    let pi = nk(GL3, &q);
    for a in ["x", "y", "z"] {
        let (_, got) = contracted(&pi, a, Side::Head);
        assert!(!got.is_zero());
        assert!(is_poisson(&got).unwrap().holds, "head side at {a}");
    }
}

fn butterfly_source() -> Arc<Quiver> {
    Arc::new(Quiver::new(3, &[("a1", 1, 3), ("b1", 1, 3), ("a2", 2, 3), ("b2", 2, 3)]).unwrap())
}

#[test]
fn multi_contraction_preserves_poisson() {
    let q = butterfly_source();
    let pi = rmatrix_to_bivector(&aguiar(2, q.clone()).unwrap());
    assert!(is_poisson(&pi).unwrap().holds);
    for eps in [None, Some(vec![coeff::int(2), coeff::ratio(-1, 3)])] {
        let plan = ContractionPlan::multi(&q, &["a1", "a2"], eps).unwrap();
        let (qp, got) = contract_bivector(&pi, &plan).unwrap();
        assert_eq!(qp.num_vertices(), 2);
        assert!(!got.is_zero());
        assert!(is_poisson(&got).unwrap().holds);
    }
}

#[test]
fn multi_contraction_with_loops_and_outgoing_arrows() {
    let q = Arc::new(
        Quiver::new(3, &[("a1", 1, 3), ("a2", 2, 3), ("c", 3, 1), ("d", 3, 2), ("l", 3, 3)]).unwrap(),
    );
    let pi = nk("a1' c' + 2 a2' d'", &q);
    assert!(is_poisson(&pi).unwrap().holds);
    let plan = ContractionPlan::multi(&q, &["a1", "a2"], Some(vec![coeff::int(1), coeff::int(-2)])).unwrap();
    let (qp, got) = contract_bivector(&pi, &plan).unwrap();
    assert_eq!(qp.num_arrows(), 2 + 2 + 4);
    assert!(!got.is_zero());
    assert!(is_poisson(&got).unwrap().holds);
}

fn random_matrix<R: Rng>(n: usize, rng: &mut R) -> QMatrix {
    QMatrix::from_fn(n, n, |_, _| coeff::ratio(rng.gen_range(-5..=5), rng.gen_range(1..=3)))
}

fn coords(q: &Arc<Quiver>, dims: Vec<usize>) -> Arc<Coordinates> {
    Arc::new(Coordinates::new(q.clone(), DimensionVector::new(dims)).unwrap())
}

// Ψ(Π) restricted to X_x = 1 on covectors annihilating the group at the
// removed vertex agrees with Ψ of the contracted bracket.
#[test]
fn contraction_agrees_with_restriction_on_representations() {
    let k = kronecker2();
    let pi = nk("[x y', x x']", &k);
    let (qa, pa) = contracted(&pi, "x", Side::Tail);
    let big = coords(&k, vec![2, 2]);
    let small = coords(&qa, vec![2]);
    let field = psi(&pi, &big, &TraceWeights::ones(2), &mut Budget::default()).unwrap();
    let reduced = psi(&pa, &small, &TraceWeights::ones(1), &mut Budget::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut nonzero = 0;
    for _ in 0..10 {
        let xy = random_matrix(2, &mut rng);
        let point = big.flatten(&[QMatrix::identity(2), xy.clone()]);
        let covs: Vec<(Vec<Coeff>, Vec<Coeff>)> = (0..2)
            .map(|_| {
                let yy = random_matrix(2, &mut rng);
                let yx = (&xy * &yy).scale(&coeff::int(-1));
                (big.covector(&[yx, yy.clone()]), small.covector(&[yy]))
            })
            .collect();
        let lhs = field.eval(&point, &[covs[0].0.clone(), covs[1].0.clone()]);
        let rhs = reduced.eval(&small.flatten(&[xy]), &[covs[0].1.clone(), covs[1].1.clone()]);
        assert_eq!(lhs, rhs);
        if lhs != coeff::zero() {
            nonzero += 1;
        }
    }
    assert!(nonzero > 5);
}
