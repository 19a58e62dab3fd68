//! Trace tensors of endomorphism families.
//!
//! For a family `(φ_1, …, φ_m)` on `K^n`, `τ_i` is the eigenvalue of the
//! coefficient of `z^i` in the derivation `D̄(z)` with `D̄(z)|_V = 1 - Σ φ_k z_k`,
//! acting on the line `⋀^n V`, corrected by the sign `(-1)^{|i|}`. Two
//! independent evaluations are provided: through the series, and by summing
//! determinants over column labelings.

use std::collections::BTreeMap;

use crate::combinatorics::for_each_multiset_permutation;
use crate::error::{Error, Result};
use crate::exterior::Blade;
use crate::hs_series::{EndoTuple, MultiIndex, OperatorSeries};
use crate::matrix::Matrix;
use crate::scalars::Scalar;

/// The values `τ_i` for `|i| ≤ n`. Zero entries are not stored.
#[derive(Clone, PartialEq, Debug)]
pub struct TraceTensor<S> {
    dim: usize,
    vars: usize,
    entries: BTreeMap<MultiIndex, S>,
}

impl<S: Scalar> TraceTensor<S> {
    /// Builds a tensor from explicit entries, dropping zeros.
    pub fn from_entries(
        dim: usize,
        vars: usize,
        entries: impl IntoIterator<Item = (MultiIndex, S)>,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (i, value) in entries {
            i.ensure_vars(vars)?;
            if i.degree() as usize > dim {
                return Err(Error::TensorMismatch("entry beyond total degree n"));
            }
            if !value.is_zero() {
                map.insert(i, value);
            }
        }
        Ok(TraceTensor {
            dim,
            vars,
            entries: map,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of endomorphisms in the family, i.e. the multi-index length.
    pub fn vars(&self) -> usize {
        self.vars
    }

    /// `τ_i`, zero when not stored (in particular for `|i| > n`).
    pub fn get(&self, index: &MultiIndex) -> S {
        self.entries.get(index).cloned().unwrap_or_else(S::zero)
    }

    pub fn nonzero_entries(&self) -> impl Iterator<Item = (&MultiIndex, &S)> {
        self.entries.iter()
    }

    /// Every entry with `|i| ≤ n`, zeros included, in graded-lex order.
    pub fn all_entries(&self) -> Vec<(MultiIndex, S)> {
        MultiIndex::all_up_to(self.vars, self.dim as u32)
            .into_iter()
            .map(|i| {
                let v = self.get(&i);
                (i, v)
            })
            .collect()
    }

    /// Entrywise `self - other`.
    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        if self.vars != other.vars {
            return Err(Error::MultiIndexLength {
                expected: self.vars,
                found: other.vars,
            });
        }
        let mut entries = self.entries.clone();
        for (i, v) in &other.entries {
            let d = entries.remove(i).unwrap_or_else(S::zero) - v;
            if !d.is_zero() {
                entries.insert(i.clone(), d);
            }
        }
        Ok(TraceTensor {
            dim: self.dim,
            vars: self.vars,
            entries,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn max_magnitude(&self) -> f64 {
        self.entries.values().map(S::magnitude).fold(0.0, f64::max)
    }
}

/// The trace tensor of an `n`-tuple on `K^n`.
pub fn trace_tensor_via_hs<S: Scalar>(tuple: &EndoTuple<S>) -> Result<TraceTensor<S>> {
    tuple.require_len(tuple.dim())?;
    trace_tensor_of_family(tuple)
}

/// The trace tensor of a family of any length `m` on `K^n`, indexed by `ℕ^m`.
pub fn trace_tensor_of_family<S: Scalar>(tuple: &EndoTuple<S>) -> Result<TraceTensor<S>> {
    let n = tuple.dim();
    let d_bar = OperatorSeries::from_tuple(tuple, n as u32)?;
    let top = Blade::top(n);
    let entries = d_bar.coefficients().map(|(i, op)| {
        let raw = op.image(top).top_form_coefficient();
        (i.clone(), S::sign(i.degree() as usize) * raw)
    });
    TraceTensor::from_entries(n, tuple.len(), entries)
}

/// `τ_i` as the sum of `det(M_f)` over labelings `f : {1..n} → {0..m}` with
/// `|f⁻¹(k)| = i_k`, where column `j` of `M_f` is `e_j` for label 0 and
/// `φ_k e_j` for label `k`. Returns zero when `|i| > n`.
pub fn trace_via_determinant_oracle<S: Scalar>(tuple: &EndoTuple<S>, index: &MultiIndex) -> Result<S> {
    index.ensure_vars(tuple.len())?;
    let n = tuple.dim();
    let degree = index.degree() as usize;
    if degree > n {
        return Ok(S::zero());
    }
    let mut word = vec![0usize; n - degree];
    for (k, &e) in index.exponents().iter().enumerate() {
        word.extend(std::iter::repeat_n(k + 1, e as usize));
    }
    let mut total = S::zero();
    for_each_multiset_permutation(&word, |labels| {
        // Columns labelled 0 are standard basis vectors, so det(M_f) is the
        // minor on the remaining rows and columns.
        let kept: Vec<(usize, usize)> = labels
            .iter()
            .enumerate()
            .filter(|(_, &label)| label != 0)
            .map(|(j, &label)| (j, label - 1))
            .collect();
        let minor = Matrix::from_fn(kept.len(), kept.len(), |r, c| {
            let (col, k) = kept[c];
            tuple.get(k).get(kept[r].0, col).clone()
        });
        total += minor.determinant().expect("minor is square");
    });
    Ok(total)
}

/// Coefficients `(e_1, …, e_n)` of `det(tI - A) = Σ_k (-1)^k e_k t^{n-k}`,
/// read off the univariate derivation with `D̄(z)|_V = 1 - Az`.
pub fn classical_invariants<S: Scalar>(a: &Matrix<S>) -> Result<Vec<S>> {
    let n = a.ensure_square()?;
    let tensor = trace_tensor_of_family(&EndoTuple::new(vec![a.clone()])?)?;
    Ok((1..=n as u32).map(|k| tensor.get(&MultiIndex::new(vec![k]))).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;
    use crate::scalars::Rational;

    type Q = Rational;

    fn m(rows: &[&[i64]]) -> Matrix<Q> {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Q::integer(x)).collect())
                .collect(),
        )
        .unwrap()
    }

    fn idx(e: &[u32]) -> MultiIndex {
        MultiIndex::new(e.to_vec())
    }

    fn det_of_columns(cols: &[Vec<Q>]) -> Q {
        Matrix::from_columns(cols).unwrap().determinant().unwrap()
    }

    #[test]
    fn plane_pair_entries() {
        let a = m(&[&[1, 2], &[3, 4]]);
        let b = m(&[&[-2, 5], &[7, 11]]);
        let t = trace_tensor_via_hs(&EndoTuple::new(vec![a.clone(), b.clone()]).unwrap()).unwrap();
        assert_eq!(t.get(&idx(&[0, 0])), Q::one());
        assert_eq!(t.get(&idx(&[1, 0])), Q::integer(5));
        assert_eq!(t.get(&idx(&[0, 1])), Q::integer(9));
        assert_eq!(t.get(&idx(&[2, 0])), a.determinant().unwrap());
        assert_eq!(t.get(&idx(&[0, 2])), b.determinant().unwrap());
        let mixed = det_of_columns(&[a.column(0), b.column(1)]) + det_of_columns(&[b.column(0), a.column(1)]);
        assert_eq!(t.get(&idx(&[1, 1])), mixed);
        assert_eq!(t.get(&idx(&[2, 1])), Q::zero());
    }

    #[test]
    fn identity_pair() {
        let i = Matrix::<Q>::identity(2);
        let t = trace_tensor_via_hs(&EndoTuple::repeated(&i, 2).unwrap()).unwrap();
        assert_eq!(t.get(&idx(&[1, 1])), Q::integer(2));
    }

    #[test]
    fn square_free_top_entry_of_repeated_triple() {
        let a = m(&[&[2, -1, 0], &[1, 3, 4], &[0, 5, -2]]);
        let t = trace_tensor_via_hs(&EndoTuple::repeated(&a, 3).unwrap()).unwrap();
        assert_eq!(t.get(&idx(&[1, 1, 1])), Q::integer(6) * a.determinant().unwrap());
    }

    #[test]
    fn oracle_on_named_entries() {
        let mut rng = random::trial_rng(21, 0);
        let tuple = random::tuple::<Q>(&mut rng, 3, 3);
        let (a, b) = (tuple.get(0), tuple.get(1));
        assert_eq!(trace_via_determinant_oracle(&tuple, &idx(&[0, 0, 0])).unwrap(), Q::one());
        assert_eq!(
            trace_via_determinant_oracle(&tuple, &idx(&[3, 0, 0])).unwrap(),
            a.determinant().unwrap()
        );
        let want = det_of_columns(&[b.column(0), a.column(1), a.column(2)])
            + det_of_columns(&[a.column(0), a.column(1), b.column(2)])
            + det_of_columns(&[a.column(0), b.column(1), a.column(2)]);
        assert_eq!(trace_via_determinant_oracle(&tuple, &idx(&[2, 1, 0])).unwrap(), want);
        assert_eq!(trace_via_determinant_oracle(&tuple, &idx(&[2, 1, 1])).unwrap(), Q::zero());
    }

    #[test]
    fn series_matches_oracle_on_full_table() {
        let mut rng = random::trial_rng(22, 0);
        let tuple = random::tuple::<Q>(&mut rng, 3, 3);
        let t = trace_tensor_via_hs(&tuple).unwrap();
        for (i, v) in t.all_entries() {
            assert_eq!(v, trace_via_determinant_oracle(&tuple, &i).unwrap(), "{i:?}");
        }
    }

    #[test]
    fn wrong_length_is_rejected() {
        let tuple = EndoTuple::new(vec![Matrix::<Q>::identity(3); 2]).unwrap();
        assert_eq!(
            trace_tensor_via_hs(&tuple),
            Err(Error::TupleLength { expected: 3, found: 2 })
        );
        assert!(trace_tensor_of_family(&tuple).is_ok());
        assert!(matches!(
            trace_via_determinant_oracle(&tuple, &idx(&[1, 0, 0])),
            Err(Error::MultiIndexLength { .. })
        ));
    }

    #[test]
    fn classical_examples() {
        assert_eq!(
            classical_invariants(&Matrix::<Q>::identity(2)).unwrap(),
            vec![Q::integer(2), Q::one()]
        );
        assert_eq!(
            classical_invariants(&m(&[&[0, 1], &[0, 0]])).unwrap(),
            vec![Q::zero(), Q::zero()]
        );
    }

    /// Characteristic polynomial coefficients by evaluating `det(tI - A)` at
    /// `t = 0..n` and solving the Vandermonde system.
    fn char_poly_oracle(a: &Matrix<Q>) -> Vec<Q> {
        let n = a.rows();
        let values: Vec<Q> = (0..=n as i64)
            .map(|t| {
                let shifted = &Matrix::identity(n).scale(&Q::integer(t)) - a;
                shifted.determinant().unwrap()
            })
            .collect();
        let vander = Matrix::from_fn(n + 1, n + 1, |r, c| Q::integer((r as i64).pow(c as u32)));
        // power-basis coefficients c_0..c_n of p(t) = Σ c_p t^p
        let c = vander.inverse().unwrap().mat_vec(&values);
        (1..=n).map(|k| Q::sign(k) * &c[n - k]).collect()
    }

    #[test]
    fn classical_matches_char_poly() {
        let mut rng = random::trial_rng(23, 0);
        for n in 1..=4 {
            for _ in 0..5 {
                let a = random::matrix::<Q>(&mut rng, n);
                let e = classical_invariants(&a).unwrap();
                assert_eq!(e, char_poly_oracle(&a));
                assert_eq!(e[0], a.trace());
                assert_eq!(e[n - 1], a.determinant().unwrap());
            }
        }
    }

    #[test]
    fn collapse_to_classical() {
        let mut rng = random::trial_rng(24, 0);
        for n in 2..=4 {
            let a = random::matrix::<Q>(&mut rng, n);
            let e = classical_invariants(&a).unwrap();
            let t = trace_tensor_via_hs(&EndoTuple::repeated(&a, n).unwrap()).unwrap();
            for (i, v) in t.all_entries() {
                let k = i.degree() as usize;
                let mut multinomial = crate::combinatorics::factorial(k as u64);
                for &e in i.exponents() {
                    multinomial /= crate::combinatorics::factorial(e as u64);
                }
                let ek = if k == 0 { Q::one() } else { e[k - 1].clone() };
                assert_eq!(v, Q::integer(multinomial as i64) * ek, "{i:?}");
            }
        }
    }

    #[test]
    fn slot_homogeneity() {
        let mut rng = random::trial_rng(25, 0);
        let tuple = random::tuple::<Q>(&mut rng, 3, 3);
        let lambda = Q::new(-3, 2).unwrap();
        let mut maps = tuple.maps().to_vec();
        maps[1] = maps[1].scale(&lambda);
        let scaled = trace_tensor_via_hs(&EndoTuple::new(maps).unwrap()).unwrap();
        let base = trace_tensor_via_hs(&tuple).unwrap();
        for (i, v) in base.all_entries() {
            let mut factor = Q::one();
            for _ in 0..i.exponents()[1] {
                factor = factor * &lambda;
            }
            assert_eq!(scaled.get(&i), v * factor);
        }
    }

    #[test]
    fn conjugation_leaves_tensor_unchanged() {
        let mut rng = random::trial_rng(26, 0);
        let tuple = random::tuple::<Q>(&mut rng, 3, 3);
        let p = random::invertible_matrix::<Q>(&mut rng, 3);
        assert_eq!(
            trace_tensor_via_hs(&tuple).unwrap(),
            trace_tensor_via_hs(&tuple.conjugate(&p).unwrap()).unwrap()
        );
    }

    #[test]
    fn entries_beyond_degree_are_rejected() {
        assert!(TraceTensor::<Q>::from_entries(2, 2, [(idx(&[2, 1]), Q::one())]).is_err());
        let t = TraceTensor::<Q>::from_entries(2, 2, [(idx(&[1, 1]), Q::zero())]).unwrap();
        assert!(t.is_zero());
        assert_eq!(t.all_entries().len(), 6);
    }
}
