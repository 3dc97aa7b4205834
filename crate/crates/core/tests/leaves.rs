mod common;

use common::*;
use quiver_poisson::coeff;
use quiver_poisson::leaves::*;
use quiver_poisson::necklace::NecklaceElement;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn brackets() -> Vec<(&'static str, NecklaceElement)> {
    let q = two_loops();
    vec![
        ("linear", nk(LINEAR_BRACKET, &q)),
        ("cubic", nk(CUBIC_BRACKET, &q)),
        ("deformed by 1", deformed_bracket(&coeff::one())),
        ("deformed by 1/2", deformed_bracket(&coeff::ratio(1, 2))),
    ]
}

#[test]
fn bivectors_are_antisymmetric_with_even_rank() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for (name, pi) in brackets() {
        for k in [1, 2, 3] {
            for _ in 0..5 {
                let p = NumericPoint::random(k, 2, &mut rng);
                let b = bivector_at(&pi, &p).unwrap();
                let scale = b.matrix().amax().max(1.0);
                assert!(b.antisymmetry_defect() <= 1e-12 * scale, "{name}");
                assert_eq!(leaf_rank(&b) % 2, 0, "{name}");
            }
        }
    }
}

#[test]
fn induced_brackets_satisfy_jacobi() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for (name, pi) in brackets() {
        let nb = NumericBivector::new(&pi).unwrap();
        for _ in 0..5 {
            let p = NumericPoint::random(2, 2, &mut rng);
            let r = nb.jacobi_residual(&p).unwrap();
            assert!(r < 1e-8, "{name}: {r:e}");
        }
    }
}

#[test]
fn non_poisson_bivector_fails_jacobi() {
    let q = two_loops();
    let pi = nk("x x' y' + y x' x'", &q);
    let nb = NumericBivector::new(&pi).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let p = NumericPoint::random(2, 2, &mut rng);
    assert!(nb.jacobi_residual(&p).unwrap() > 1e-3);
}

// The flow of Γ = (0, YXY) carries the linear bracket to B₀ - εB∞.
#[test]
fn flow_pushes_the_linear_bracket_along_the_pencil() {
    let q = two_loops();
    let p0 = nk(LINEAR_BRACKET, &q);
    let pinf = nk(CUBIC_BRACKET, &q);
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    for k in [2, 3] {
        for eps in [1.0, 0.5, -0.3] {
            let p = NumericPoint::sample(k, 2, &mut rng, |p| {
                well_conditioned(p.y()) && flow(eps, p).is_ok_and(|q| well_conditioned(q.y()))
            });
            let r = pushforward_check(&p0, &-&pinf, eps, &p).unwrap();
            assert!(r < 1e-9, "k={k} ε={eps}: {r:e}");
        }
    }
}

#[test]
fn lie_derivative_of_the_linear_bracket_is_the_cubic_one() {
    let q = two_loops();
    let p0 = nk(LINEAR_BRACKET, &q);
    let pinf = nk(CUBIC_BRACKET, &q);
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    for _ in 0..5 {
        let p = NumericPoint::random(2, 2, &mut rng);
        let r = deformation_consistency(&p0, &pinf, &p, 1e-4).unwrap();
        assert_eq!(r.sign, 1.0);
        assert!(r.residual < 1e-6, "{r:?}");
    }
}

#[test]
fn inverse_form_is_minus_the_quadratic_bracket() {
    let q = two_loops();
    let pi = nk(QUADRATIC_BRACKET, &q);
    let mut rng = ChaCha8Rng::seed_from_u64(26);
    for k in [2, 3] {
        let p = NumericPoint::sample(k, 2, &mut rng, |p| Form::Inverse.regular(p));
        let r = symplectic_check(Form::Inverse, &pi, &p).unwrap();
        assert_eq!(r.sign, -1.0);
        assert!(r.residual < 1e-8);
    }
}
