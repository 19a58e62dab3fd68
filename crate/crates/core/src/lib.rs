//! Multivariate Hasse–Schmidt derivations on exterior algebras, trace tensors
//! of endomorphism tuples, and exact verification of the generalized
//! Cayley–Hamilton identity.

pub mod combinatorics;
pub mod error;
pub mod exterior;
pub mod hs_series;
pub mod identities;
pub mod matrix;
pub mod random;
pub mod scalars;
pub mod traces;
pub mod wire;

pub use error::{Error, Result};
pub use exterior::{Blade, ExteriorElement};
pub use hs_series::{EndoTuple, MultiIndex, OperatorSeries};
pub use matrix::Matrix;
pub use scalars::{Rational, Scalar};
pub use traces::TraceTensor;
