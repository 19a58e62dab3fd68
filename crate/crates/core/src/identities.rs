//! Evaluators for the generalized Cayley–Hamilton identity, the star
//! products and the scalar identities that follow from it.
//!
//! Every evaluator returns the residual (expected to vanish) together with the
//! largest magnitude among the terms that were summed, so float runs can be
//! judged relative to the size of the computation.

use std::collections::BTreeMap;

use crate::combinatorics::{is_even, permutations};
use crate::error::{Error, Result};
use crate::exterior::ExteriorElement;
use crate::hs_series::{
    integration_by_parts_residual, ElementSeries, EndoTuple, IbpForm, MultiIndex, OperatorSeries,
};
use crate::matrix::Matrix;
use crate::scalars::Scalar;
use crate::traces::{classical_invariants, trace_tensor_of_family, trace_tensor_via_hs, TraceTensor};

/// Relative tolerance used for float reports unless overridden.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Clone, PartialEq, Debug)]
pub enum Residual<S> {
    Scalar(S),
    Matrix(Matrix<S>),
    /// Several matrix residuals that must all vanish.
    Matrices(Vec<Matrix<S>>),
    Tensor(TraceTensor<S>),
    Series(Vec<ElementSeries<S>>),
}

impl<S: Scalar> Residual<S> {
    pub fn is_exact_zero(&self) -> bool {
        match self {
            Residual::Scalar(s) => s.is_zero(),
            Residual::Matrix(m) => m.is_zero(),
            Residual::Matrices(ms) => ms.iter().all(Matrix::is_zero),
            Residual::Tensor(t) => t.is_zero(),
            Residual::Series(ss) => ss.iter().all(ElementSeries::is_zero),
        }
    }

    pub fn max_magnitude(&self) -> f64 {
        match self {
            Residual::Scalar(s) => s.magnitude(),
            Residual::Matrix(m) => m.max_magnitude(),
            Residual::Matrices(ms) => ms.iter().map(Matrix::max_magnitude).fold(0.0, f64::max),
            Residual::Tensor(t) => t.max_magnitude(),
            Residual::Series(ss) => ss.iter().map(ElementSeries::max_magnitude).fold(0.0, f64::max),
        }
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct IdentityReport<S> {
    pub identity: String,
    pub n: usize,
    pub residual: Residual<S>,
    pub is_zero: bool,
    /// Largest residual entry; recorded in float mode only.
    pub max_abs: Option<f64>,
    /// Largest magnitude among the summed terms.
    pub scale: f64,
    pub seed: Option<u64>,
}

impl<S: Scalar> IdentityReport<S> {
    pub fn new(identity: &str, n: usize, residual: Residual<S>, scale: f64) -> Self {
        let mut report = IdentityReport {
            identity: identity.to_string(),
            n,
            is_zero: false,
            max_abs: (!S::EXACT).then(|| residual.max_magnitude()),
            residual,
            scale,
            seed: None,
        };
        report.is_zero = report.passes(DEFAULT_TOLERANCE);
        report
    }

    /// Exact zero in exact mode; `max_abs ≤ tol · scale` otherwise.
    pub fn passes(&self, tol: f64) -> bool {
        match self.max_abs {
            None => self.residual.is_exact_zero(),
            Some(err) => err <= tol * self.scale,
        }
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.is_zero = self.passes(tol);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }
}

/// Running matrix sum that remembers the largest term it has seen (float
/// mode only; exact residuals are judged without a scale).
struct MatrixSum<S> {
    acc: Matrix<S>,
    scale: f64,
}

impl<S: Scalar> MatrixSum<S> {
    fn new(n: usize) -> Self {
        MatrixSum {
            acc: Matrix::zeros(n, n),
            scale: 0.0,
        }
    }

    fn add(&mut self, coeff: &S, term: &Matrix<S>) {
        if coeff.is_zero() {
            return;
        }
        let scaled = term.scale(coeff);
        if !S::EXACT {
            self.scale = self.scale.max(scaled.max_magnitude());
        }
        self.acc = &self.acc + &scaled;
    }
}

fn ensure_shape<S: Scalar>(m: &Matrix<S>, n: usize) -> Result<()> {
    let k = m.ensure_square()?;
    if k != n {
        return Err(Error::DimensionMismatch { expected: n, found: k });
    }
    Ok(())
}

/// `Σ_{k=0}^n (-1)^k/k! Σ_{σ∈S_n} τ_{e_σ(1)+⋯+e_σ(k)} A_σ(k+1)⋯A_σ(n)`,
/// evaluated term by term.
pub fn generalized_ch_residual<S: Scalar>(
    tuple: &EndoTuple<S>,
    tensor: &TraceTensor<S>,
) -> Result<IdentityReport<S>> {
    let n = tuple.dim();
    tuple.require_len(n)?;
    if tensor.dim() != n || tensor.vars() != n {
        return Err(Error::TensorMismatch("tensor shape differs from the tuple"));
    }
    let weights: Vec<S> = (0..=n).map(|k| S::sign(k) * S::inverse_factorial(k as u32)).collect();
    let mut sum = MatrixSum::new(n);
    for sigma in permutations(n) {
        // suffix[k] = A_σ(k+1) ⋯ A_σ(n), with suffix[n] = I
        let mut suffix = vec![Matrix::identity(n); n + 1];
        for k in (0..n).rev() {
            suffix[k] = tuple.get(sigma[k]) * &suffix[k + 1];
        }
        for (k, weight) in weights.iter().enumerate() {
            let tau = tensor.get(&MultiIndex::indicator(n, &sigma[..k]));
            sum.add(&(tau * weight), &suffix[k]);
        }
    }
    Ok(IdentityReport::new("thm48", n, Residual::Matrix(sum.acc), sum.scale))
}

/// Computes the trace tensor of `tuple` and evaluates the generalized identity.
pub fn generalized_ch_report<S: Scalar>(tuple: &EndoTuple<S>) -> Result<IdentityReport<S>> {
    generalized_ch_residual(tuple, &trace_tensor_via_hs(tuple)?)
}

/// `Σ_{k=0}^n (-1)^k e_k A^{n-k}` for a single `n × n` matrix.
pub fn classical_ch_residual<S: Scalar>(a: &Matrix<S>) -> Result<IdentityReport<S>> {
    let n = a.ensure_square()?;
    let e = classical_invariants(a)?;
    let mut sum = MatrixSum::new(n);
    let mut power = Matrix::identity(n);
    // power runs upward: A^0 pairs with e_n, A^n with e_0 = 1
    for k in (0..=n).rev() {
        let ek = if k == 0 { S::one() } else { e[k - 1].clone() };
        sum.add(&(S::sign(k) * ek), &power);
        power = &power * a;
    }
    Ok(IdentityReport::new("classical-ch", n, Residual::Matrix(sum.acc), sum.scale))
}

/// `A⋆B = AB - a₁₁B - b₂₂A + det(C₁(A), C₂(B))·I` on `2 × 2` matrices.
pub fn star2<S: Scalar>(a: &Matrix<S>, b: &Matrix<S>) -> Result<Matrix<S>> {
    ensure_shape(a, 2)?;
    ensure_shape(b, 2)?;
    let cross = Matrix::from_columns(&[a.column(0), b.column(1)])?.determinant()?;
    let mut sum = MatrixSum::new(2);
    sum.add(&S::one(), &(a * b));
    sum.add(&-a.get(0, 0).clone(), b);
    sum.add(&-b.get(1, 1).clone(), a);
    sum.add(&cross, &Matrix::identity(2));
    Ok(sum.acc)
}

/// Residuals `A⋆B + B⋆A` and `A⋆A`.
pub fn star2_report<S: Scalar>(a: &Matrix<S>, b: &Matrix<S>) -> Result<IdentityReport<S>> {
    let ab = star2(a, b)?;
    let ba = star2(b, a)?;
    let aa = star2(a, a)?;
    let scale = [&ab, &ba, &aa].iter().map(|m| m.max_magnitude()).fold(0.0, f64::max);
    Ok(IdentityReport::new(
        "star2",
        2,
        Residual::Matrices(vec![&ab + &ba, aa]),
        scale,
    ))
}

/// `det` of the identity with column `j` replaced by `A_j e_j` wherever `i_j = 1`.
pub fn delta_det<S: Scalar>(tuple: &EndoTuple<S>, index: &MultiIndex) -> Result<S> {
    let n = tuple.dim();
    tuple.require_len(n)?;
    index.ensure_vars(n)?;
    if !index.is_square_free() {
        return Err(Error::NotSquareFree(index.exponents().to_vec()));
    }
    let identity = Matrix::<S>::identity(n);
    let columns: Vec<Vec<S>> = index
        .exponents()
        .iter()
        .enumerate()
        .map(|(j, &e)| if e == 1 { tuple.get(j).column(j) } else { identity.column(j) })
        .collect();
    Matrix::from_columns(&columns)?.determinant()
}

/// An additive change to one δ coefficient of the trilinear star product.
#[derive(Clone, Debug, PartialEq)]
pub struct DeltaPerturbation<S> {
    pub index: MultiIndex,
    pub by: S,
}

/// `A⋆B⋆C` on `3 × 3` matrices.
pub fn star3<S: Scalar>(a: &Matrix<S>, b: &Matrix<S>, c: &Matrix<S>) -> Result<Matrix<S>> {
    star3_perturbed(a, b, c, None)
}

/// `A⋆B⋆C` with one δ coefficient shifted; used as a negative control.
pub fn star3_perturbed<S: Scalar>(
    a: &Matrix<S>,
    b: &Matrix<S>,
    c: &Matrix<S>,
    perturbation: Option<&DeltaPerturbation<S>>,
) -> Result<Matrix<S>> {
    Ok(star3_terms(a, b, c, perturbation)?.acc)
}

fn star3_terms<S: Scalar>(
    a: &Matrix<S>,
    b: &Matrix<S>,
    c: &Matrix<S>,
    perturbation: Option<&DeltaPerturbation<S>>,
) -> Result<MatrixSum<S>> {
    for m in [a, b, c] {
        ensure_shape(m, 3)?;
    }
    if let Some(p) = perturbation {
        p.index.ensure_vars(3)?;
    }
    let tuple = EndoTuple::new(vec![a.clone(), b.clone(), c.clone()])?;
    let delta = |e: [u32; 3]| -> Result<S> {
        let i = MultiIndex::new(e.to_vec());
        let mut d = delta_det(&tuple, &i)?;
        if let Some(p) = perturbation.filter(|p| p.index == i) {
            d += &p.by;
        }
        Ok(d)
    };
    let mut sum = MatrixSum::new(3);
    sum.add(&S::one(), &(&(a * b) * c));
    sum.add(&-delta([1, 0, 0])?, &(b * c));
    sum.add(&-delta([0, 1, 0])?, &(c * a));
    sum.add(&-delta([0, 0, 1])?, &(a * b));
    sum.add(&delta([1, 1, 0])?, c);
    sum.add(&delta([0, 1, 1])?, a);
    sum.add(&delta([1, 0, 1])?, b);
    sum.add(&-delta([1, 1, 1])?, &Matrix::identity(3));
    Ok(sum)
}

/// `s(A)⋆s(B)⋆s(C) - sign(s)·(A⋆B⋆C)` for each of the six permutations `s`.
pub fn star3_antisymmetry_report<S: Scalar>(
    a: &Matrix<S>,
    b: &Matrix<S>,
    c: &Matrix<S>,
) -> Result<IdentityReport<S>> {
    let args = [a, b, c];
    let base = star3_terms(a, b, c, None)?;
    let mut scale = base.scale;
    let mut residuals = Vec::new();
    for s in permutations(3) {
        let permuted = star3_terms(args[s[0]], args[s[1]], args[s[2]], None)?;
        scale = scale.max(permuted.scale);
        let sign = if is_even(&s) { S::one() } else { -S::one() };
        residuals.push(&permuted.acc - &base.acc.scale(&sign));
    }
    Ok(IdentityReport::new(
        "star3-antisymmetry",
        3,
        Residual::Matrices(residuals),
        scale,
    ))
}

/// The vanishing combinations of the trilinear star product:
/// `Σ_{s∈S₃} s(A)⋆s(B)⋆s(C)`, `A⋆A⋆A`, and `A⋆A⋆B + B⋆A⋆A + A⋆B⋆A`.
pub fn star3_report<S: Scalar>(
    a: &Matrix<S>,
    b: &Matrix<S>,
    c: &Matrix<S>,
    perturbation: Option<&DeltaPerturbation<S>>,
) -> Result<IdentityReport<S>> {
    let args = [a, b, c];
    let mut scale = 0.0f64;
    let mut eval = |x: &Matrix<S>, y: &Matrix<S>, z: &Matrix<S>| -> Result<Matrix<S>> {
        let t = star3_terms(x, y, z, perturbation)?;
        scale = scale.max(t.scale);
        Ok(t.acc)
    };
    let mut symmetrized = Matrix::zeros(3, 3);
    for s in permutations(3) {
        symmetrized = &symmetrized + &eval(args[s[0]], args[s[1]], args[s[2]])?;
    }
    let cube = eval(a, a, a)?;
    let fin = &(&eval(a, a, b)? + &eval(b, a, a)?) + &eval(a, b, a)?;
    Ok(IdentityReport::new(
        "star3",
        3,
        Residual::Matrices(vec![symmetrized, cube, fin]),
        scale,
    ))
}

/// `(A²B + ABA + BA²) - τ₁₀(AB + BA) - τ₀₁A² + τ₂₀B + τ₁₁A - τ₂₁I` on `K³`,
/// where `τ` is the trace tensor of the pair `(A, B)`.
pub fn eq17_residual<S: Scalar>(
    a: &Matrix<S>,
    b: &Matrix<S>,
    tensor: &TraceTensor<S>,
) -> Result<IdentityReport<S>> {
    ensure_shape(a, 3)?;
    ensure_shape(b, 3)?;
    if tensor.dim() != 3 || tensor.vars() != 2 {
        return Err(Error::TensorMismatch("expected the pair tensor on a 3-dimensional space"));
    }
    let tau = |i: u32, j: u32| tensor.get(&MultiIndex::new(vec![i, j]));
    let aa = a * a;
    let ab = a * b;
    let ba = b * a;
    let mut sum = MatrixSum::new(3);
    let one = S::one();
    sum.add(&one, &(&aa * b));
    sum.add(&one, &(&ab * a));
    sum.add(&one, &(b * &aa));
    sum.add(&-tau(1, 0), &(&ab + &ba));
    sum.add(&-tau(0, 1), &aa);
    sum.add(&tau(2, 0), b);
    sum.add(&tau(1, 1), a);
    sum.add(&-tau(2, 1), &Matrix::identity(3));
    Ok(IdentityReport::new("eq17", 3, Residual::Matrix(sum.acc), sum.scale))
}

/// Computes the pair tensor of `(A, B)` and evaluates [`eq17_residual`].
pub fn eq17_report<S: Scalar>(a: &Matrix<S>, b: &Matrix<S>) -> Result<IdentityReport<S>> {
    let tensor = trace_tensor_of_family(&EndoTuple::new(vec![a.clone(), b.clone()])?)?;
    eq17_residual(a, b, &tensor)
}

/// `tr(A²) + 2det(A) - tr(A)²` for a `2 × 2` matrix.
pub fn tr_square_identity<S: Scalar>(a: &Matrix<S>) -> Result<IdentityReport<S>> {
    ensure_shape(a, 2)?;
    let tr = a.trace();
    let terms = [
        (a * a).trace(),
        S::from_i64(2) * a.determinant()?,
        -(tr.clone() * &tr),
    ];
    let scale = terms.iter().map(S::magnitude).fold(0.0, f64::max);
    let value = terms.into_iter().fold(S::zero(), |acc, t| acc + t);
    Ok(IdentityReport::new("trsq", 2, Residual::Scalar(value), scale))
}

/// Difference between the trace tensors of `φ` and `PφP⁻¹`.
pub fn conjugacy_invariance_check<S: Scalar>(
    tuple: &EndoTuple<S>,
    p: &Matrix<S>,
) -> Result<IdentityReport<S>> {
    let conjugated = tuple.conjugate(p)?;
    let before = trace_tensor_via_hs(tuple)?;
    let after = trace_tensor_via_hs(&conjugated)?;
    let scale = before.max_magnitude().max(after.max_magnitude());
    Ok(IdentityReport::new(
        "conjugacy",
        tuple.dim(),
        Residual::Tensor(before.try_sub(&after)?),
        scale,
    ))
}

/// Both integration-by-parts residuals for the series built from `tuple`,
/// truncated at `n`.
pub fn integration_by_parts_report<S: Scalar>(
    tuple: &EndoTuple<S>,
    u: &ExteriorElement<S>,
    v: &ExteriorElement<S>,
) -> Result<IdentityReport<S>> {
    let n = tuple.dim();
    let d_bar = OperatorSeries::from_tuple(tuple, n as u32)?;
    let d = d_bar.inverse()?;
    let mut residuals = Vec::new();
    for form in [IbpForm::Direct, IbpForm::Dual] {
        residuals.push(integration_by_parts_residual(&d, &d_bar, u, v, form)?);
    }
    let scale = d.coefficients().map(|(_, op)| op.max_magnitude()).fold(0.0, f64::max)
        * u.max_magnitude()
        * v.max_magnitude();
    Ok(IdentityReport::new("ibp", n, Residual::Series(residuals), scale))
}

/// The restriction of the inverse series to `V`, paired with the closed form,
/// as a map from multi-index to the difference.
pub fn inverse_vs_geometric<S: Scalar>(
    tuple: &EndoTuple<S>,
    truncation: u32,
) -> Result<BTreeMap<MultiIndex, Matrix<S>>> {
    let n = tuple.dim();
    let d = OperatorSeries::from_tuple(tuple, truncation)?.inverse()?;
    let generic = d.restriction_to_v();
    let closed = crate::hs_series::geometric_restriction(tuple, truncation);
    let mut diff = BTreeMap::new();
    for i in MultiIndex::all_up_to(tuple.len(), truncation) {
        let zero = Matrix::zeros(n, n);
        let g = generic.get(&i).unwrap_or(&zero);
        let c = closed.get(&i).unwrap_or(&zero);
        let delta = g - c;
        if !delta.is_zero() {
            diff.insert(i, delta);
        }
    }
    Ok(diff)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;
    use crate::scalars::Rational;
    use rand::Rng;

    type Q = Rational;

    fn m(rows: &[&[i64]]) -> Matrix<Q> {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Q::integer(x)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn generalized_ch_vanishes() {
        let mut rng = random::trial_rng(31, 0);
        for n in 1..=4 {
            for _ in 0..3 {
                let tuple = random::tuple::<Q>(&mut rng, n, n);
                let r = generalized_ch_report(&tuple).unwrap();
                assert!(r.is_zero, "n = {n}: {:?}", r.residual);
            }
        }
    }

    #[test]
    fn repeated_pair_gives_twice_classical() {
        let a = m(&[&[1, 2], &[3, 4]]);
        let tuple = EndoTuple::repeated(&a, 2).unwrap();
        let tensor = trace_tensor_via_hs(&tuple).unwrap();
        assert_eq!(tensor.get(&MultiIndex::new(vec![1, 1])), Q::integer(-4));
        assert!(generalized_ch_residual(&tuple, &tensor).unwrap().is_zero);
    }

    #[test]
    fn plane_instance_expanded_by_hand() {
        let mut rng = random::trial_rng(32, 0);
        for _ in 0..20 {
            let tuple = random::tuple::<Q>(&mut rng, 2, 2);
            let (a, b) = (tuple.get(0), tuple.get(1));
            let tensor = trace_tensor_via_hs(&tuple).unwrap();
            let t11 = tensor.get(&MultiIndex::new(vec![1, 1]));
            let by_hand = &(&(&(a * b) + &(b * a)) - &b.scale(&a.trace())) - &a.scale(&b.trace());
            let by_hand = &by_hand + &Matrix::identity(2).scale(&t11);
            assert!(by_hand.is_zero());
            // the skew sum of the star product is the same combination
            assert_eq!(&star2(a, b).unwrap() + &star2(b, a).unwrap(), by_hand);
        }
    }

    #[test]
    fn tensor_must_match() {
        let tuple = EndoTuple::repeated(&Matrix::<Q>::identity(3), 3).unwrap();
        let other = trace_tensor_of_family(&EndoTuple::repeated(&Matrix::<Q>::identity(3), 2).unwrap()).unwrap();
        assert!(matches!(
            generalized_ch_residual(&tuple, &other),
            Err(Error::TensorMismatch(_))
        ));
    }

    #[test]
    fn classical_ch_for_single_matrices() {
        let mut rng = random::trial_rng(33, 0);
        for n in 1..=5 {
            let a = random::matrix::<Q>(&mut rng, n);
            assert!(classical_ch_residual(&a).unwrap().is_zero);
        }
    }

    #[test]
    fn star2_hand_example() {
        let a = m(&[&[1, 0], &[0, 0]]);
        let b = m(&[&[0, 0], &[0, 1]]);
        assert!(star2(&a, &b).unwrap().is_zero());
        assert!(star2(&Matrix::<Q>::identity(3), &b).is_err());
    }

    #[test]
    fn star2_square_is_classical() {
        let mut rng = random::trial_rng(34, 0);
        for _ in 0..20 {
            let a = random::matrix::<Q>(&mut rng, 2);
            let classical = &(&(&a * &a) - &a.scale(&a.trace())) + &Matrix::identity(2).scale(&a.determinant().unwrap());
            assert_eq!(star2(&a, &a).unwrap(), classical);
            assert!(classical.is_zero());
        }
    }

    #[test]
    fn star2_is_bilinear_and_skew() {
        let mut rng = random::trial_rng(35, 0);
        for _ in 0..50 {
            let (a, a2, b) = (
                random::matrix::<Q>(&mut rng, 2),
                random::matrix::<Q>(&mut rng, 2),
                random::matrix::<Q>(&mut rng, 2),
            );
            let lambda = random::rational(&mut rng);
            let lhs = star2(&(&a.scale(&lambda) + &a2), &b).unwrap();
            let rhs = &star2(&a, &b).unwrap().scale(&lambda) + &star2(&a2, &b).unwrap();
            assert_eq!(lhs, rhs);
            let lhs = star2(&b, &(&a.scale(&lambda) + &a2)).unwrap();
            let rhs = &star2(&b, &a).unwrap().scale(&lambda) + &star2(&b, &a2).unwrap();
            assert_eq!(lhs, rhs);
            assert!(star2_report(&a, &b).unwrap().is_zero);
        }
    }

    #[test]
    fn star2_violates_jacobi() {
        let mut rng = random::trial_rng(36, 0);
        let found = (0..100).any(|_| {
            let (a, b, c) = (
                random::matrix::<Q>(&mut rng, 2),
                random::matrix::<Q>(&mut rng, 2),
                random::matrix::<Q>(&mut rng, 2),
            );
            let s = |x: &Matrix<Q>, y: &Matrix<Q>| star2(x, y).unwrap();
            let jacobi = &(&s(&s(&a, &b), &c) + &s(&s(&b, &c), &a)) + &s(&s(&c, &a), &b);
            !jacobi.is_zero()
        });
        assert!(found);
    }

    #[test]
    fn delta_examples() {
        let mut rng = random::trial_rng(37, 0);
        let tuple = random::tuple::<Q>(&mut rng, 3, 3);
        let d = |e: &[u32]| delta_det(&tuple, &MultiIndex::new(e.to_vec())).unwrap();
        assert_eq!(d(&[1, 0, 0]), tuple.get(0).get(0, 0).clone());
        assert_eq!(d(&[0, 0, 0]), Q::one());
        let cols = vec![tuple.get(0).column(0), tuple.get(1).column(1), tuple.get(2).column(2)];
        assert_eq!(d(&[1, 1, 1]), Matrix::from_columns(&cols).unwrap().determinant().unwrap());
        assert_eq!(
            delta_det(&tuple, &MultiIndex::new(vec![2, 0, 0])),
            Err(Error::NotSquareFree(vec![2, 0, 0]))
        );
    }

    #[test]
    fn star3_vanishing_combinations() {
        let mut rng = random::trial_rng(38, 0);
        for _ in 0..20 {
            let t = random::tuple::<Q>(&mut rng, 3, 3);
            let r = star3_report(t.get(0), t.get(1), t.get(2), None).unwrap();
            assert!(r.is_zero, "{:?}", r.residual);
        }
    }

    #[test]
    fn star3_is_trilinear() {
        let mut rng = random::trial_rng(39, 0);
        let t = random::tuple::<Q>(&mut rng, 3, 3);
        let x = random::matrix::<Q>(&mut rng, 3);
        let lambda = random::rational(&mut rng);
        let (a, b, c) = (t.get(0), t.get(1), t.get(2));
        let mixed = &b.scale(&lambda) + &x;
        let lhs = star3(a, &mixed, c).unwrap();
        let rhs = &star3(a, b, c).unwrap().scale(&lambda) + &star3(a, &x, c).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn star3_cube_matches_classical_shape() {
        let mut rng = random::trial_rng(40, 0);
        let a = random::matrix::<Q>(&mut rng, 3);
        let tensor = trace_tensor_via_hs(&EndoTuple::repeated(&a, 3).unwrap()).unwrap();
        let t200 = tensor.get(&MultiIndex::new(vec![2, 0, 0]));
        let expected = &(&(&a.pow(3) - &(&a * &a).scale(&a.trace())) + &a.scale(&t200))
            - &Matrix::identity(3).scale(&a.determinant().unwrap());
        assert_eq!(star3(&a, &a, &a).unwrap(), expected);
        assert!(expected.is_zero());
    }

    #[test]
    fn perturbed_delta_breaks_star3() {
        let mut rng = random::trial_rng(41, 0);
        let t = random::tuple::<Q>(&mut rng, 3, 3);
        let p = DeltaPerturbation {
            index: MultiIndex::new(vec![1, 1, 1]),
            by: Q::one(),
        };
        let r = star3_report(t.get(0), t.get(1), t.get(2), Some(&p)).unwrap();
        assert!(!r.is_zero);
    }

    #[test]
    fn eq17_cases() {
        let mut rng = random::trial_rng(42, 0);
        for _ in 0..10 {
            let a = random::matrix::<Q>(&mut rng, 3);
            let b = random::matrix::<Q>(&mut rng, 3);
            assert!(eq17_report(&a, &b).unwrap().is_zero);
            assert!(eq17_report(&Matrix::identity(3), &b).unwrap().is_zero);
            let same = eq17_report(&a, &a).unwrap();
            assert!(same.is_zero);
        }
    }

    #[test]
    fn eq17_pair_tensor_on_repeated_matrix() {
        let mut rng = random::trial_rng(43, 0);
        let a = random::matrix::<Q>(&mut rng, 3);
        let e = classical_invariants(&a).unwrap();
        let tensor = trace_tensor_of_family(&EndoTuple::repeated(&a, 2).unwrap()).unwrap();
        let tau = |i: u32, j: u32| tensor.get(&MultiIndex::new(vec![i, j]));
        assert_eq!(tau(1, 0), e[0]);
        assert_eq!(tau(1, 1), Q::integer(2) * &e[1]);
        assert_eq!(tau(2, 1), Q::integer(3) * &e[2]);
    }

    #[test]
    fn tr_square_examples() {
        assert!(tr_square_identity(&Matrix::<Q>::identity(2)).unwrap().is_zero);
        assert!(tr_square_identity(&m(&[&[0, 1], &[0, 0]])).unwrap().is_zero);
        let mut rng = random::trial_rng(44, 0);
        for _ in 0..20 {
            assert!(tr_square_identity(&random::matrix::<Q>(&mut rng, 2)).unwrap().is_zero);
        }
    }

    #[test]
    fn conjugacy_examples() {
        let mut rng = random::trial_rng(45, 0);
        let t = random::tuple::<Q>(&mut rng, 3, 3);
        assert!(conjugacy_invariance_check(&t, &Matrix::identity(3)).unwrap().is_zero);
        let perm = m(&[&[0, 1, 0], &[0, 0, 1], &[1, 0, 0]]);
        let ident = EndoTuple::repeated(&Matrix::<Q>::identity(3), 3).unwrap();
        assert!(conjugacy_invariance_check(&ident, &perm).unwrap().is_zero);
        let p = random::invertible_matrix::<Q>(&mut rng, 3);
        assert!(conjugacy_invariance_check(&t, &p).unwrap().is_zero);
        assert_eq!(
            conjugacy_invariance_check(&t, &m(&[&[1, 2, 3], &[2, 4, 6], &[0, 0, 1]])),
            Err(Error::Singular)
        );
    }

    #[test]
    fn ibp_report_vanishes() {
        let mut rng = random::trial_rng(46, 0);
        let t = random::tuple::<Q>(&mut rng, 3, 3);
        for _ in 0..5 {
            let u = random::element::<Q>(&mut rng, 3, None, 3);
            let v = random::element::<Q>(&mut rng, 3, None, 3);
            assert!(integration_by_parts_report(&t, &u, &v).unwrap().is_zero);
        }
    }

    #[test]
    fn inverse_agrees_with_closed_form() {
        let mut rng = random::trial_rng(47, 0);
        let t = random::tuple::<Q>(&mut rng, 2, 2);
        assert!(inverse_vs_geometric(&t, 2).unwrap().is_empty());
    }

    #[test]
    fn float_reports_use_relative_tolerance() {
        let mut rng = random::trial_rng(48, 0);
        let t = random::tuple::<f64>(&mut rng, 3, 3);
        let r = generalized_ch_report(&t).unwrap();
        assert!(r.max_abs.is_some());
        assert!(r.is_zero, "max_abs {:?} scale {}", r.max_abs, r.scale);
        assert!(!r.clone().with_tolerance(0.0).is_zero || r.max_abs == Some(0.0));
        let big: f64 = rng.random_range(1e3..1e4);
        let a = Matrix::from_fn(2, 2, |i, j| big * (i + 2 * j + 1) as f64);
        assert!(tr_square_identity(&a).unwrap().is_zero);
    }
}
