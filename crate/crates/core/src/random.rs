//! Seeded generators for randomized checks.
//!
//! Each trial draws from its own ChaCha stream keyed by `(root seed, trial)`,
//! so results do not depend on how trials are scheduled.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exterior::{Blade, ExteriorElement};
use crate::hs_series::EndoTuple;
use crate::matrix::Matrix;
use crate::scalars::{Rational, Scalar};

pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// `p/q` with `p` uniform in `[-9, 9]` and `q` uniform in `[-9, 9] \ {0}`.
pub fn rational(rng: &mut impl Rng) -> Rational {
    let p = rng.random_range(-9i64..=9);
    let mut q = 0;
    while q == 0 {
        q = rng.random_range(-9i64..=9);
    }
    Rational::new(p, q).expect("nonzero denominator")
}

pub fn scalar<S: Scalar>(rng: &mut impl Rng) -> S {
    S::from_rational(&rational(rng))
}

pub fn matrix<S: Scalar>(rng: &mut impl Rng, n: usize) -> Matrix<S> {
    Matrix::from_fn(n, n, |_, _| scalar(rng))
}

/// `len` random `n × n` matrices.
pub fn tuple<S: Scalar>(rng: &mut impl Rng, n: usize, len: usize) -> EndoTuple<S> {
    EndoTuple::new((0..len).map(|_| matrix(rng, n)).collect()).expect("n >= 1, len >= 1")
}

pub fn invertible_matrix<S: Scalar>(rng: &mut impl Rng, n: usize) -> Matrix<S> {
    loop {
        let m = matrix::<S>(rng, n);
        if m.determinant().map(|d| !d.is_zero()).unwrap_or(false) {
            return m;
        }
    }
}

/// Random element with up to `terms` terms, restricted to `grade` if given.
pub fn element<S: Scalar>(
    rng: &mut impl Rng,
    dim: usize,
    grade: Option<usize>,
    terms: usize,
) -> ExteriorElement<S> {
    let blades: Vec<Blade> = Blade::all(dim)
        .filter(|b| grade.is_none_or(|g| b.grade() == g))
        .collect();
    let mut out = ExteriorElement::zero(dim);
    if blades.is_empty() {
        return out;
    }
    for _ in 0..terms {
        let b = blades[rng.random_range(0..blades.len())];
        out.add_term(b, scalar(rng));
    }
    out
}
