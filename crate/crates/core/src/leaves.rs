//! Floating-point probes of induced Poisson structures on `Mat_k ⊕ Mat_k`
//! (more generally on tuples of `k × k` matrices for a one-vertex quiver):
//! bracket matrices, ranks, symplectic forms, the deformation flow and
//! commuting Hamiltonians.

use std::str::FromStr;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::coeff::{self, Coeff};
use crate::error::{Error, Result};
use crate::necklace::{readings, NecklaceElement};
use crate::path_algebra::Word;
use crate::quiver::Quiver;

pub type Mat = DMatrix<f64>;

/// Linear bracket with symplectic form `tr dY ∧ d(X Y⁻¹)`.
pub const LINEAR_BRACKET: &str = "[x x', x'] + [y x', y']";
/// Cubic bracket with symplectic form `tr d(Y X)⁻¹ ∧ dX`.
pub const CUBIC_BRACKET: &str = "[y y', y x x' + y y y']";
/// Quadratic bracket with symplectic form `tr d(X⁻¹) ∧ dY`.
pub const QUADRATIC_BRACKET: &str = "[x y', x x']";

/// One vertex with loops `x` and `y`.
pub fn two_loops() -> Arc<Quiver> {
    Arc::new(Quiver::new(1, &[("x", 1, 1), ("y", 1, 1)]).expect("valid quiver"))
}

/// `LINEAR_BRACKET + ε CUBIC_BRACKET` on [`two_loops`].
pub fn deformed_bracket(eps: &Coeff) -> NecklaceElement {
    let q = two_loops();
    let lin = NecklaceElement::parse(LINEAR_BRACKET, &q).expect("valid element");
    let cub = NecklaceElement::parse(CUBIC_BRACKET, &q).expect("valid element");
    &lin + &cub.scale(eps)
}

/// Conditioning threshold for matrices that must be invertible.
pub const MIN_CONDITIONING: f64 = 1e-3;

/// One `k × k` matrix per loop.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericPoint {
    mats: Vec<Mat>,
}

impl NumericPoint {
    pub fn new(mats: Vec<Mat>) -> Result<Self> {
        let k = mats.first().map_or(0, Mat::nrows);
        if mats.iter().any(|m| m.nrows() != k || m.ncols() != k) {
            return Err(Error::Shape("all matrices must be k × k".into()));
        }
        if mats.iter().any(|m| m.iter().any(|v| !v.is_finite())) {
            return Err(Error::NonFinite);
        }
        Ok(NumericPoint { mats })
    }

    /// Entries uniform in `[-1, 1]`.
    pub fn random<R: Rng>(k: usize, count: usize, rng: &mut R) -> Self {
        let mats = (0..count).map(|_| Mat::from_fn(k, k, |_, _| rng.gen_range(-1.0..=1.0))).collect();
        NumericPoint { mats }
    }

    /// Redraws until `accept` holds.
    pub fn sample<R: Rng>(k: usize, count: usize, rng: &mut R, accept: impl Fn(&NumericPoint) -> bool) -> Self {
        loop {
            let p = Self::random(k, count, rng);
            if accept(&p) {
                return p;
            }
        }
    }

    pub fn k(&self) -> usize {
        self.mats.first().map_or(0, Mat::nrows)
    }

    pub fn mats(&self) -> &[Mat] {
        &self.mats
    }

    pub fn x(&self) -> &Mat {
        &self.mats[0]
    }

    pub fn y(&self) -> &Mat {
        &self.mats[1]
    }

    pub fn dim(&self) -> usize {
        self.mats.len() * self.k() * self.k()
    }

    /// Coordinates ordered by (matrix, row, column).
    pub fn flatten(mats: &[Mat]) -> DVector<f64> {
        let k = mats.first().map_or(0, Mat::nrows);
        DVector::from_fn(mats.len() * k * k, |c, _| {
            let (a, r) = (c / (k * k), c % (k * k));
            mats[a][(r / k, r % k)]
        })
    }

    pub fn unflatten(&self, v: &[f64]) -> Vec<Mat> {
        let k = self.k();
        (0..self.mats.len())
            .map(|a| Mat::from_fn(k, k, |i, j| v[a * k * k + i * k + j]))
            .collect()
    }

    fn basis_tangent(&self, c: usize) -> Vec<Mat> {
        let mut v = vec![0.0; self.dim()];
        v[c] = 1.0;
        self.unflatten(&v)
    }

    fn shifted(&self, dir: &[Mat], h: f64) -> NumericPoint {
        NumericPoint {
            mats: self.mats.iter().zip(dir).map(|(m, d)| m + d * h).collect(),
        }
    }
}

/// `σ_min / σ_max`; zero for the zero matrix.
pub fn conditioning(m: &Mat) -> f64 {
    let s = m.clone().singular_values();
    let max = s.max();
    if max == 0.0 {
        0.0
    } else {
        s.min() / max
    }
}

pub fn well_conditioned(m: &Mat) -> bool {
    conditioning(m) > MIN_CONDITIONING
}

fn inverse(m: &Mat, what: &str) -> Result<Mat> {
    if conditioning(m) < 1e-13 {
        return Err(Error::Domain(format!("{what} is singular")));
    }
    m.clone().try_inverse().ok_or_else(|| Error::Domain(format!("{what} is singular")))
}

fn trace_product(a: &Mat, b: &Mat) -> f64 {
    a.component_mul(&b.transpose()).sum()
}

fn max_abs(m: &Mat) -> f64 {
    m.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

/// The antisymmetric matrix of brackets between coordinates at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct BivectorMatrix(pub Mat);

impl BivectorMatrix {
    pub fn matrix(&self) -> &Mat {
        &self.0
    }

    /// Largest entry of `B + Bᵀ` relative to the largest entry of `B`.
    pub fn antisymmetry_defect(&self) -> f64 {
        let scale = max_abs(&self.0).max(1.0);
        max_abs(&(&self.0 + self.0.transpose())) / scale
    }

    /// `{f, g}` for gradients `df`, `dg`.
    pub fn pair(&self, df: &DVector<f64>, dg: &DVector<f64>) -> f64 {
        df.dot(&(&self.0 * dg))
    }
}

/// Numerical rank with singular-value threshold `1e-9 σ_max`.
pub fn leaf_rank(b: &BivectorMatrix) -> usize {
    let s = b.0.clone().singular_values();
    let max = s.max();
    if max == 0.0 {
        return 0;
    }
    s.iter().filter(|&&v| v > 1e-9 * max).count()
}

struct NumericReading {
    left: Word,
    first: usize,
    right: Word,
    second: usize,
    weight: f64,
}

/// A bivector on a one-vertex quiver prepared for repeated evaluation.
///
/// The bracket is `{(X_a)_ij, (X_b)_kl} = Σ κ P(X)_kj R(X)_il` over the
/// readings `(P, a, R, b, κ)`.
pub struct NumericBivector {
    readings: Vec<NumericReading>,
    loops: usize,
}

impl NumericBivector {
    pub fn new(pi: &NecklaceElement) -> Result<Self> {
        let q = pi.quiver();
        if q.num_vertices() != 1 {
            return Err(Error::Usage("numeric evaluation needs a one-vertex quiver".into()));
        }
        let readings = readings(pi)?
            .into_iter()
            .map(|r| NumericReading {
                left: r.left,
                first: r.first,
                right: r.right,
                second: r.second,
                weight: coeff::to_f64(&r.weight),
            })
            .collect();
        Ok(NumericBivector {
            readings,
            loops: q.num_arrows(),
        })
    }

    fn check(&self, p: &NumericPoint) -> Result<()> {
        if p.mats.len() != self.loops {
            return Err(Error::Shape(format!("{} matrices for {} loops", p.mats.len(), self.loops)));
        }
        Ok(())
    }

    fn assemble(&self, k: usize, mut factors: impl FnMut(&NumericReading) -> (Mat, Mat, Mat, Mat)) -> Mat {
        let n = self.loops * k * k;
        let mut b = Mat::zeros(n, n);
        for rd in &self.readings {
            // (P, R, dP, dR): accumulates P dR + dP R
            let (p, r, dp, dr) = factors(rd);
            for i in 0..k {
                for j in 0..k {
                    let row = rd.first * k * k + i * k + j;
                    for kk in 0..k {
                        for l in 0..k {
                            let col = rd.second * k * k + kk * k + l;
                            b[(row, col)] += rd.weight * (p[(kk, j)] * dr[(i, l)] + dp[(kk, j)] * r[(i, l)]);
                        }
                    }
                }
            }
        }
        b
    }

    pub fn at(&self, p: &NumericPoint) -> Result<BivectorMatrix> {
        self.check(p)?;
        let k = p.k();
        let zero = Mat::zeros(k, k);
        let b = self.assemble(k, |rd| {
            let pm = eval_word(&rd.left, &p.mats, k);
            let rm = eval_word(&rd.right, &p.mats, k);
            (pm, zero.clone(), zero.clone(), rm)
        });
        finite(BivectorMatrix(b))
    }

    /// Directional derivative of the bracket matrix.
    pub fn derivative(&self, p: &NumericPoint, dir: &[Mat]) -> Result<Mat> {
        self.check(p)?;
        let k = p.k();
        let b = self.assemble(k, |rd| {
            (
                eval_word(&rd.left, &p.mats, k),
                eval_word(&rd.right, &p.mats, k),
                d_word(&rd.left, &p.mats, dir, k),
                d_word(&rd.right, &p.mats, dir, k),
            )
        });
        Ok(b)
    }

    /// Largest Jacobiator entry over all coordinate triples, relative to
    /// the squared scale of the bracket.
    pub fn jacobi_residual(&self, p: &NumericPoint) -> Result<f64> {
        let b = self.at(p)?.0;
        let n = b.nrows();
        let derivs: Vec<Mat> = (0..n)
            .map(|i| {
                let row: Vec<f64> = b.row(i).iter().copied().collect();
                self.derivative(p, &p.unflatten(&row))
            })
            .collect::<Result<_>>()?;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let v = derivs[i][(j, k)] + derivs[j][(k, i)] + derivs[k][(i, j)];
                    worst = worst.max(v.abs());
                }
            }
        }
        Ok(worst / (1.0 + max_abs(&b).powi(2)))
    }
}

fn finite(b: BivectorMatrix) -> Result<BivectorMatrix> {
    if b.0.iter().all(|v| v.is_finite()) {
        Ok(b)
    } else {
        Err(Error::NonFinite)
    }
}

fn eval_word(w: &Word, mats: &[Mat], k: usize) -> Mat {
    let mut m = Mat::identity(k, k);
    for l in w.letters() {
        m = &m * &mats[l.arrow()];
    }
    m
}

fn d_word(w: &Word, mats: &[Mat], dir: &[Mat], k: usize) -> Mat {
    let letters = w.letters();
    let mut out = Mat::zeros(k, k);
    for pos in 0..letters.len() {
        let mut m = Mat::identity(k, k);
        for (i, l) in letters.iter().enumerate() {
            m = &m * if i == pos { &dir[l.arrow()] } else { &mats[l.arrow()] };
        }
        out += m;
    }
    out
}

pub fn bivector_at(pi: &NecklaceElement, p: &NumericPoint) -> Result<BivectorMatrix> {
    NumericBivector::new(pi)?.at(p)
}

/// Closed two-forms `tr dF ∧ dG` on pairs `(X, Y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Form {
    /// `tr dY ∧ d(X Y⁻¹)`
    I,
    /// `tr d(Y X)⁻¹ ∧ dX`
    II,
    /// `tr dM⁻¹ ∧ d(X M)` with `M = Y⁻¹ - εX`
    Bb(f64),
    /// `tr d(X⁻¹) ∧ dY`
    Inverse,
}

impl FromStr for Form {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "i" => Ok(Form::I),
            "ii" => Ok(Form::II),
            "bb" => Ok(Form::Bb(1.0)),
            "inverse" => Ok(Form::Inverse),
            _ => Err(Error::Usage(format!("unknown form `{s}`; expected i, ii, bb or inverse"))),
        }
    }
}

impl Form {
    /// Whether the point is comfortably inside the form's domain.
    pub fn regular(&self, p: &NumericPoint) -> bool {
        let (x, y) = (p.x(), p.y());
        match self {
            Form::I => well_conditioned(y),
            Form::II => well_conditioned(x) && well_conditioned(y),
            Form::Inverse => well_conditioned(x),
            Form::Bb(eps) => {
                well_conditioned(y) && y.clone().try_inverse().is_some_and(|yi| well_conditioned(&(yi - x * *eps)))
            }
        }
    }

    /// `(dF, dG)` along each tangent direction.
    fn differentials(&self, p: &NumericPoint) -> Result<Differential> {
        let (x, y) = (p.x().clone(), p.y().clone());
        Ok(match *self {
            Form::I => {
                let yi = inverse(&y, "Y")?;
                Box::new(move |u, v| (v.clone(), u * &yi - &x * &yi * v * &yi))
            }
            Form::II => {
                let yxi = inverse(&(&y * &x), "YX")?;
                Box::new(move |u, v| (-(&yxi * (v * &x + &y * u) * &yxi), u.clone()))
            }
            Form::Bb(eps) => {
                let yi = inverse(&y, "Y")?;
                let m = &yi - &x * eps;
                let mi = inverse(&m, "Y⁻¹ - εX")?;
                Box::new(move |u, v| {
                    let dm = -(&yi * v * &yi) - u * eps;
                    (-(&mi * &dm * &mi), u * &m + &x * &dm)
                })
            }
            Form::Inverse => {
                let xi = inverse(&x, "X")?;
                Box::new(move |u, v| (-(&xi * u * &xi), v.clone()))
            }
        })
    }

    /// `ω(e_c, e_d)` over coordinate basis vectors.
    pub fn matrix(&self, p: &NumericPoint) -> Result<Mat> {
        if p.mats.len() != 2 {
            return Err(Error::Shape("forms live on pairs (X, Y)".into()));
        }
        let diff = self.differentials(p)?;
        let n = p.dim();
        let d: Vec<(Mat, Mat)> = (0..n)
            .map(|c| {
                let t = p.basis_tangent(c);
                diff(&t[0], &t[1])
            })
            .collect();
        let omega = Mat::from_fn(n, n, |c, e| trace_product(&d[c].0, &d[e].1) - trace_product(&d[e].0, &d[c].1));
        Ok(omega)
    }
}

type Differential = Box<dyn Fn(&Mat, &Mat) -> (Mat, Mat)>;

/// Outcome of comparing a two-form with the inverse of a bivector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymplecticReport {
    /// Largest entry of `ω B ∓ 1` over `‖ω‖ ‖B‖` (Frobenius norms).
    pub residual: f64,
    /// `+1` when `ω B ≈ 1`, `-1` when `ω B ≈ -1`.
    pub sign: f64,
}

pub fn symplectic_check(form: Form, pi: &NecklaceElement, p: &NumericPoint) -> Result<SymplecticReport> {
    let omega = form.matrix(p)?;
    let b = bivector_at(pi, p)?;
    let prod = &omega * &b.0;
    let id = Mat::identity(prod.nrows(), prod.ncols());
    let scale = (omega.norm() * b.0.norm()).max(1.0);
    let plus = max_abs(&(&prod - &id)) / scale;
    let minus = max_abs(&(&prod + &id)) / scale;
    let (residual, sign) = if plus <= minus { (plus, 1.0) } else { (minus, -1.0) };
    Ok(SymplecticReport { residual, sign })
}

/// `(X, Y) ↦ (X, (Y⁻¹ - tX)⁻¹)`.
pub fn flow(t: f64, p: &NumericPoint) -> Result<NumericPoint> {
    let yi = inverse(p.y(), "Y")?;
    let m = yi - p.x() * t;
    let y = inverse(&m, "Y⁻¹ - tX")?;
    NumericPoint::new(vec![p.x().clone(), y])
}

/// Jacobian of [`flow`] in coordinates.
pub fn flow_jacobian(t: f64, p: &NumericPoint) -> Result<Mat> {
    let yi = inverse(p.y(), "Y")?;
    let mi = inverse(&(&yi - p.x() * t), "Y⁻¹ - tX")?;
    let n = p.dim();
    let mut jac = Mat::zeros(n, n);
    for c in 0..n {
        let tan = p.basis_tangent(c);
        let dy = &mi * (&yi * &tan[1] * &yi + &tan[0] * t) * &mi;
        jac.set_column(c, &NumericPoint::flatten(&[tan[0].clone(), dy]));
    }
    Ok(jac)
}

/// Largest entry of `(φ_s ∘ φ_t)(p) - φ_{s+t}(p)`.
pub fn group_law_residual(s: f64, t: f64, p: &NumericPoint) -> Result<f64> {
    let a = flow(s, &flow(t, p)?)?;
    let b = flow(s + t, p)?;
    let d = NumericPoint::flatten(a.mats()) - NumericPoint::flatten(b.mats());
    Ok(d.amax())
}

/// Relative difference between `(φ_ε)_* B₀` and `B₀ + ε B_∞` at `φ_ε(p)`.
pub fn pushforward_check(pi0: &NecklaceElement, pi_inf: &NecklaceElement, eps: f64, p: &NumericPoint) -> Result<f64> {
    let b0 = bivector_at(pi0, p)?.0;
    let jac = flow_jacobian(eps, p)?;
    let pushed = &jac * b0 * jac.transpose();
    let q = flow(eps, p)?;
    let target = bivector_at(pi0, &q)?.0 + bivector_at(pi_inf, &q)?.0 * eps;
    Ok(max_abs(&(pushed - &target)) / max_abs(&target).max(1.0))
}

/// The vector field `(0, Y X Y)` of the deforming derivation.
pub fn vector_field_gamma(p: &NumericPoint) -> Vec<Mat> {
    let k = p.k();
    vec![Mat::zeros(k, k), p.y() * p.x() * p.y()]
}

/// Outcome of the finite-difference Lie derivative comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeformationReport {
    pub residual: f64,
    /// `+1` when `L_Γ B₀ ≈ B_∞`, `-1` when `L_Γ B₀ ≈ -B_∞`.
    pub sign: f64,
}

/// Lie derivative of a bivector along a vector field by central differences:
/// `Γ(B) - (∂Γ) B - B (∂Γ)ᵀ`. The field is differentiated along the columns
/// of `B` rather than along coordinate axes, so `(∂Γ) B` comes from one
/// difference quotient per column.
pub fn lie_derivative_fd(
    pi: &NumericBivector,
    field: impl Fn(&NumericPoint) -> Vec<Mat>,
    p: &NumericPoint,
    h: f64,
) -> Result<Mat> {
    let g = field(p);
    let b = pi.at(p)?.0;
    let along = (pi.at(&p.shifted(&g, h))?.0 - pi.at(&p.shifted(&g, -h))?.0) / (2.0 * h);
    let n = p.dim();
    let mut jb = Mat::zeros(n, n);
    for c in 0..n {
        let col: Vec<f64> = b.column(c).iter().copied().collect();
        let v = p.unflatten(&col);
        let d = (NumericPoint::flatten(&field(&p.shifted(&v, h))) - NumericPoint::flatten(&field(&p.shifted(&v, -h))))
            / (2.0 * h);
        jb.set_column(c, &d);
    }
    // B antisymmetric: B (∂Γ)ᵀ = -((∂Γ) B)ᵀ
    Ok(along - &jb + jb.transpose())
}

pub fn deformation_consistency(
    pi0: &NecklaceElement,
    pi_inf: &NecklaceElement,
    p: &NumericPoint,
    h: f64,
) -> Result<DeformationReport> {
    let lie = lie_derivative_fd(&NumericBivector::new(pi0)?, vector_field_gamma, p, h)?;
    let target = bivector_at(pi_inf, p)?.0;
    let scale = max_abs(&target).max(1.0);
    let plus = max_abs(&(&lie - &target)) / scale;
    let minus = max_abs(&(&lie + &target)) / scale;
    let (residual, sign) = if plus <= minus { (plus, 1.0) } else { (minus, -1.0) };
    Ok(DeformationReport { residual, sign })
}

/// Gradient of `tr M^i` where `M` is the given loop.
pub fn trace_power_gradient(p: &NumericPoint, which: usize, i: u32) -> DVector<f64> {
    let k = p.k();
    let m = &p.mats[which];
    let mut pow = Mat::identity(k, k);
    for _ in 1..i {
        pow = &pow * m;
    }
    let mut blocks = vec![Mat::zeros(k, k); p.mats.len()];
    blocks[which] = pow.transpose() * f64::from(i);
    NumericPoint::flatten(&blocks)
}

/// Largest `|{tr X^i, tr X^j}|` over `1 ≤ i < j ≤ k`.
pub fn commuting_hamiltonians_check(pi: &NecklaceElement, p: &NumericPoint) -> Result<f64> {
    let b = bivector_at(pi, p)?;
    let k = p.k() as u32;
    let grads: Vec<DVector<f64>> = (1..=k).map(|i| trace_power_gradient(p, 0, i)).collect();
    let mut worst: f64 = 0.0;
    for i in 0..grads.len() {
        for j in i + 1..grads.len() {
            worst = worst.max(b.pair(&grads[i], &grads[j]).abs());
        }
    }
    Ok(worst)
}
