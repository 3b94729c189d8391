//! Scalar requirements for coefficients and stability parameters.
//!
//! Every computation in this crate is exact. Coefficients of motives live in an
//! integer ring ([`Scalar`]), stability parameters in an ordered field
//! ([`Field`]). Floating point types satisfy neither trait on purpose: they are
//! not `Eq`/`Ord`.

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::str::FromStr;

use num_traits::{FromPrimitive, Num, Signed};

/// Exact integer scalar used as the coefficient ring of motives.
///
/// Implemented for `BigInt`, `i128` and `i64`. Machine integers are accepted for
/// quick experiments; overflow is not checked, so `BigInt` is the default.
pub trait Scalar:
    Clone + Debug + Display + FromStr + Eq + Ord + Hash + Num + Signed + FromPrimitive + Send + Sync + 'static
{
    fn from_i64_exact(v: i64) -> Self {
        Self::from_i64(v).expect("scalar must represent every i64")
    }
}

impl<T> Scalar for T where
    T: Clone
        + Debug
        + Display
        + FromStr
        + Eq
        + Ord
        + Hash
        + Num
        + Signed
        + FromPrimitive
        + Send
        + Sync
        + 'static
{
}

/// Exact ordered field used for stability parameters (`BigRational`, `Rational64`).
pub trait Field: Clone + Debug + Display + Ord + Num + Signed + FromPrimitive + Send + Sync + 'static {
    fn from_i64_exact(v: i64) -> Self {
        Self::from_i64(v).expect("field must represent every i64")
    }
}

impl<T> Field for T where T: Clone + Debug + Display + Ord + Num + Signed + FromPrimitive + Send + Sync + 'static {}

/// `(-1)^k` for a signed exponent.
pub(crate) fn sign_pow(k: i64) -> i64 {
    if k.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Coefficients of `(1 - x)^e` up to `x^kmax`: `(-1)^k binom(e, k)`.
///
/// Works for negative `e` (binomial series); all entries are integers.
pub(crate) fn binomial_series<C: Scalar>(e: i64, kmax: usize) -> Vec<C> {
    let mut out = Vec::with_capacity(kmax + 1);
    let mut cur = C::one();
    out.push(cur.clone());
    for k in 1..=kmax {
        let k_i = k as i64;
        // a_k = a_{k-1} * (k - 1 - e) / k
        cur = cur * C::from_i64_exact(k_i - 1 - e) / C::from_i64_exact(k_i);
        if cur.is_zero() {
            // e >= 0 and k > e: the expansion is a polynomial
            break;
        }
        out.push(cur.clone());
    }
    out
}
