//! Plethystic exponentials, Euler products and the motivic power structure.
//!
//! Everything is kept in product form `∏ (1 - L^(t/2) y^m)^(-c)` with integer
//! exponents `c`, which is exact because `σ_n(L^(t/2) y^m) = L^(nt/2) y^(nm)`.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::motive::MotiveLaurent;
use crate::scalar::Scalar;
use crate::torus::{Monomial, PairingMatrix, TruncationPolicy, TwistedSeries};

/// One factor `(1 - L^(half/2) y^exps)^(-exponent)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct EulerFactor {
    pub exps: Vec<u32>,
    pub half_l: i64,
    pub exponent: i64,
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct EulerProduct {
    pub factors: Vec<EulerFactor>,
}

impl EulerProduct {
    /// Merges repeated `(exps, half_l)` pairs and drops zero exponents.
    fn canonical(factors: impl IntoIterator<Item = EulerFactor>) -> Self {
        let mut merged: BTreeMap<(u32, Vec<u32>, i64), i64> = BTreeMap::new();
        for f in factors {
            let deg = f.exps.iter().sum();
            *merged.entry((deg, f.exps, f.half_l)).or_insert(0) += f.exponent;
        }
        let factors = merged
            .into_iter()
            .filter(|(_, c)| *c != 0)
            .map(|((_, exps, half_l), exponent)| EulerFactor { exps, half_l, exponent })
            .collect();
        Self { factors }
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn expand<C: Scalar>(&self, policy: TruncationPolicy, pairing: Arc<PairingMatrix>) -> Result<TwistedSeries<C>> {
        let mut acc = TwistedSeries::one(policy, pairing.clone());
        for f in &self.factors {
            let base = MotiveLaurent::term(f.half_l, C::one());
            let factor = TwistedSeries::binomial_factor(&Monomial::new(f.exps.clone()), &base, -f.exponent, policy, pairing.clone())?;
            acc = acc.mul(&factor)?;
        }
        Ok(acc)
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.factors
                .iter()
                .map(|f| json!({ "exps": f.exps, "halfL": f.half_l, "exponent": f.exponent }))
                .collect(),
        )
    }
}

fn check_plain<C: Scalar>(f: &TwistedSeries<C>) -> Result<()> {
    if f.is_floored() {
        return Err(Error::FlooredSeries);
    }
    if f.is_framed() || !f.pairing().unframed_is_zero() {
        return Err(Error::FramedDivision);
    }
    Ok(())
}

/// `Exp(Σ c L^(t/2) y^m) = ∏ (1 - L^(t/2) y^m)^(-c)`.
pub fn plethystic_exp<C: Scalar>(f: &TwistedSeries<C>) -> Result<TwistedSeries<C>> {
    check_plain(f)?;
    if !f.constant_term().is_zero() {
        return Err(Error::NonzeroConstantTerm);
    }
    let mut factors = Vec::new();
    for (m, c) in f.terms() {
        for (t, k) in c.terms() {
            let exponent = k.to_string().parse::<i64>().map_err(|_| Error::NonIntegerExponent(m.dims.clone()))?;
            factors.push(EulerFactor { exps: m.dims.clone(), half_l: t, exponent });
        }
    }
    EulerProduct::canonical(factors).expand(f.policy(), f.pairing().clone())
}

/// Writes a series with constant term `1` as an Euler product, peeling the
/// lowest-degree terms one degree at a time.
pub fn euler_product_decompose<C: Scalar>(a: &TwistedSeries<C>) -> Result<EulerProduct> {
    check_plain(a)?;
    if !a.constant_term().is_one() {
        return Err(Error::NonUnitConstantTerm(a.constant_term().to_string()));
    }
    let policy = a.policy();
    let pairing = a.pairing().clone();
    let mut rest = a.clone();
    let mut factors = Vec::new();
    for deg in 1..=policy.max_total_degree {
        let layer: Vec<(Monomial, MotiveLaurent<C>)> =
            rest.terms().filter(|(m, _)| m.degree() == deg).map(|(m, c)| (m.clone(), c.clone())).collect();
        for (m, c) in layer {
            for (t, k) in c.terms() {
                let exponent = k.to_string().parse::<i64>().map_err(|_| Error::NonIntegerExponent(m.dims.clone()))?;
                let base = MotiveLaurent::term(t, C::one());
                // divide out (1 - x)^(-c) by multiplying with (1 - x)^c
                let inverse = TwistedSeries::binomial_factor(&m, &base, exponent, policy, pairing.clone())?;
                rest = rest.mul(&inverse)?;
                factors.push(EulerFactor { exps: m.dims.clone(), half_l: t, exponent });
            }
        }
    }
    debug_assert!(rest.terms().all(|(m, _)| m.is_unit()));
    Ok(EulerProduct::canonical(factors))
}

/// `A^X` for `X` a Laurent polynomial in `L^(1/2)`:
/// `(1 - L^(t/2) y^m)^(-c)` raised to `d L^(t'/2)` is `(1 - L^((t+t')/2) y^m)^(-cd)`.
pub fn motive_power<C: Scalar>(a: &TwistedSeries<C>, x: &MotiveLaurent<C>) -> Result<TwistedSeries<C>> {
    if x.is_floored() {
        return Err(Error::FlooredValue);
    }
    let decomposition = euler_product_decompose(a)?;
    let mut factors = Vec::new();
    for f in &decomposition.factors {
        for (t, d) in x.terms() {
            let d = d.to_string().parse::<i64>().map_err(|_| Error::NonIntegerExponent(f.exps.clone()))?;
            factors.push(EulerFactor { exps: f.exps.clone(), half_l: f.half_l + t, exponent: f.exponent * d });
        }
    }
    EulerProduct::canonical(factors).expand(a.policy(), a.pairing().clone())
}

/// `A^X` computed in the variable `u = sign·y_v`: substitute, raise, substitute back.
pub fn motive_power_signed<C: Scalar>(
    a: &TwistedSeries<C>,
    x: &MotiveLaurent<C>,
    vertex: usize,
    sign: i64,
) -> Result<TwistedSeries<C>> {
    let flip = MotiveLaurent::constant(C::from_i64_exact(sign));
    motive_power(&a.scale_variable(vertex, &flip)?, x)?.scale_variable(vertex, &flip)
}
