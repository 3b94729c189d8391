//! Laurent polynomials in `L^(1/2)` with exact integer coefficients.
//!
//! Exponents are stored doubled: the half-exponent `t` stands for `L^(t/2)`.
//! A value may carry a *floor* `F`: every term with `t < F` has been discarded
//! and is unknown. This models the completion of the coefficient ring in
//! descending powers of `L`, where most infinite products live.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::scalar::{sign_pow, Scalar};

/// Exact element of `Z[L^(1/2), L^(-1/2)]`, optionally known only above a floor.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MotiveLaurent<C> {
    // half-exponent of coeffs[0]
    low: i64,
    // trimmed: empty, or first and last entries nonzero
    coeffs: Vec<C>,
    floor: Option<i64>,
}

impl<C: Scalar> Default for MotiveLaurent<C> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<C: Scalar> MotiveLaurent<C> {
    pub fn zero() -> Self {
        Self { low: 0, coeffs: Vec::new(), floor: None }
    }

    pub fn one() -> Self {
        Self::constant(C::one())
    }

    pub fn constant(c: C) -> Self {
        Self::term(0, c)
    }

    /// `c * L^(t/2)`.
    pub fn term(t: i64, c: C) -> Self {
        let mut m = Self { low: t, coeffs: vec![c], floor: None };
        m.normalize();
        m
    }

    /// `L^(1/2)`.
    pub fn sqrt_l() -> Self {
        Self::term(1, C::one())
    }

    /// `L`.
    pub fn l() -> Self {
        Self::term(2, C::one())
    }

    /// `(-L^(1/2))^k` for any integer `k`.
    pub fn minus_sqrt_l_pow(k: i64) -> Self {
        Self::term(k, C::from_i64_exact(sign_pow(k)))
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, C)>>(terms: I) -> Self {
        let mut acc = Self::zero();
        for (t, c) in terms {
            acc = acc + Self::term(t, c);
        }
        acc
    }

    /// Builds a value from terms and declares it known only from `floor` up.
    pub fn from_terms_floored<I: IntoIterator<Item = (i64, C)>>(terms: I, floor: i64) -> Self {
        Self::from_terms(terms).with_floor(floor)
    }

    fn normalize(&mut self) {
        if let Some(f) = self.floor {
            if self.low < f {
                let cut = ((f - self.low) as usize).min(self.coeffs.len());
                self.coeffs.drain(..cut);
                self.low = f;
            }
        }
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.low += lead as i64;
        }
        if self.coeffs.is_empty() {
            self.low = 0;
        }
    }

    pub fn floor(&self) -> Option<i64> {
        self.floor
    }

    pub fn is_floored(&self) -> bool {
        self.floor.is_some()
    }

    /// Exactly zero: no known terms and nothing unknown.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty() && self.floor.is_none()
    }

    pub fn is_one(&self) -> bool {
        self.floor.is_none() && self.low == 0 && self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// Nonzero terms as `(half-exponent, coefficient)`, ascending.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &C)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, c)| (self.low + i as i64, c))
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.iter().filter(|c| !c.is_zero()).count()
    }

    pub fn coefficient(&self, t: i64) -> C {
        if t < self.low {
            return C::zero();
        }
        self.coeffs.get((t - self.low) as usize).cloned().unwrap_or_else(C::zero)
    }

    /// Highest stored half-exponent.
    pub fn top(&self) -> Option<i64> {
        (!self.coeffs.is_empty()).then(|| self.low + self.coeffs.len() as i64 - 1)
    }

    /// Lowest stored half-exponent.
    pub fn lowest(&self) -> Option<i64> {
        (!self.coeffs.is_empty()).then_some(self.low)
    }

    // Upper bound on the half-exponent of any term, known or not.
    fn top_bound(&self) -> Option<i64> {
        match (self.top(), self.floor) {
            (Some(t), Some(f)) => Some(t.max(f - 1)),
            (Some(t), None) => Some(t),
            (None, Some(f)) => Some(f - 1),
            (None, None) => None,
        }
    }

    /// Declares the value known only from `f` upwards, discarding lower terms.
    pub fn with_floor(mut self, f: i64) -> Self {
        self.floor = Some(self.floor.map_or(f, |g| g.max(f)));
        self.normalize();
        self
    }

    /// Truncates at `f`. Unlike [`with_floor`](Self::with_floor), an exact value
    /// with no terms below `f` stays exact.
    pub fn clip(self, f: i64) -> Self {
        let needs = self.floor.is_some_and(|g| g < f) || self.lowest().is_some_and(|l| l < f);
        if needs {
            self.with_floor(f)
        } else {
            self
        }
    }

    /// Multiplies by `sign * L^(shift/2)`.
    pub fn mul_unit(mut self, sign: i64, shift: i64) -> Self {
        if !self.coeffs.is_empty() {
            self.low += shift;
        }
        if let Some(f) = self.floor.as_mut() {
            *f += shift;
        }
        if sign < 0 {
            for c in self.coeffs.iter_mut() {
                *c = -c.clone();
            }
        }
        self
    }

    /// `Some((sign, t))` when the value is exactly `±L^(t/2)`.
    pub fn as_unit(&self) -> Option<(i64, i64)> {
        if self.floor.is_some() || self.coeffs.len() != 1 {
            return None;
        }
        let c = &self.coeffs[0];
        if c.is_one() {
            Some((1, self.low))
        } else if (-c.clone()).is_one() {
            Some((-1, self.low))
        } else {
            None
        }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Euler-number specialization `L^(1/2) -> 1`.
    pub fn euler_specialize(&self) -> Result<C> {
        if self.floor.is_some() {
            return Err(Error::FlooredValue);
        }
        Ok(self.coeffs.iter().fold(C::zero(), |acc, c| acc + c.clone()))
    }

    /// `L^(1/2) <-> -L^(1/2)`: negates odd half-exponents.
    pub fn convention_flip(&self) -> Self {
        let mut out = self.clone();
        for (i, c) in out.coeffs.iter_mut().enumerate() {
            if (self.low + i as i64).rem_euclid(2) == 1 {
                *c = -c.clone();
            }
        }
        out
    }

    /// Adams-type substitution `L^(t/2) -> L^(n t/2)`.
    pub fn adams_twist(&self, n: u32) -> Result<Self> {
        if self.floor.is_some() {
            return Err(Error::FlooredValue);
        }
        let n = n as i64;
        Ok(Self::from_terms(self.terms().map(|(t, c)| (n * t, c.clone()))))
    }

    /// Class of `GL_k`: `prod_{i<k} (L^k - L^i)`.
    pub fn gl_motive(k: u32) -> Self {
        let k = k as i64;
        (0..k).fold(Self::one(), |acc, i| {
            let f = Self::term(2 * k, C::one()) - Self::term(2 * i, C::one());
            &acc * &f
        })
    }

    /// Virtual class `(-L^(1/2))^(-k^2) [GL_k]`.
    pub fn gl_motive_vir(k: u32) -> Self {
        let k2 = (k as i64) * (k as i64);
        Self::gl_motive(k).mul_unit(sign_pow(k2), -k2)
    }

    /// First half-exponent where the two values differ, looking only at
    /// exponents both know exactly.
    pub fn first_difference(&self, other: &Self) -> Option<(i64, C, C)> {
        let lo = match (self.floor, other.floor) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
        let mut ts: Vec<i64> = self.terms().map(|(t, _)| t).chain(other.terms().map(|(t, _)| t)).collect();
        ts.sort_unstable();
        ts.dedup();
        ts.into_iter()
            .filter(|t| lo.is_none_or(|f| *t >= f))
            .map(|t| (t, self.coefficient(t), other.coefficient(t)))
            .find(|(_, a, b)| a != b)
    }

    /// Equal on every exponent both sides know.
    pub fn agrees_with(&self, other: &Self) -> bool {
        self.first_difference(other).is_none()
    }

    /// `[[t, "c"], ...]`.
    pub fn terms_json(&self) -> Value {
        Value::Array(self.terms().map(|(t, c)| json!([t, c.to_string()])).collect())
    }

    pub fn to_json(&self) -> Value {
        match self.floor {
            Some(f) => json!({ "terms": self.terms_json(), "floor": f }),
            None => json!({ "terms": self.terms_json() }),
        }
    }
}

fn render_exponent(t: i64) -> String {
    if t % 2 == 0 {
        format!("{}", t / 2)
    } else {
        format!("{}/2", t)
    }
}

impl<C: Scalar> fmt::Display for MotiveLaurent<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> =
            self.terms().map(|(t, c)| format!("{}*L^({})", c, render_exponent(t))).collect();
        if let Some(fl) = self.floor {
            parts.push(format!("O(L^({}))", render_exponent(fl)));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

impl<C: Scalar> Add for &MotiveLaurent<C> {
    type Output = MotiveLaurent<C>;
    fn add(self, rhs: Self) -> MotiveLaurent<C> {
        if rhs.coeffs.is_empty() && rhs.floor.is_none() {
            return self.clone();
        }
        if self.coeffs.is_empty() && self.floor.is_none() {
            return rhs.clone();
        }
        let floor = match (self.floor, rhs.floor) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
        let (low, coeffs) = match (self.lowest(), rhs.lowest()) {
            (None, None) => (0, Vec::new()),
            (Some(_), None) => (self.low, self.coeffs.clone()),
            (None, Some(_)) => (rhs.low, rhs.coeffs.clone()),
            (Some(a), Some(b)) => {
                let low = a.min(b);
                let high = self.top().unwrap().max(rhs.top().unwrap());
                let mut v = vec![C::zero(); (high - low + 1) as usize];
                for (i, c) in self.coeffs.iter().enumerate() {
                    let k = (self.low - low) as usize + i;
                    v[k] = v[k].clone() + c.clone();
                }
                for (i, c) in rhs.coeffs.iter().enumerate() {
                    let k = (rhs.low - low) as usize + i;
                    v[k] = v[k].clone() + c.clone();
                }
                (low, v)
            }
        };
        let mut out = MotiveLaurent { low, coeffs, floor };
        out.normalize();
        out
    }
}

impl<C: Scalar> Neg for &MotiveLaurent<C> {
    type Output = MotiveLaurent<C>;
    fn neg(self) -> MotiveLaurent<C> {
        self.clone().mul_unit(-1, 0)
    }
}

impl<C: Scalar> Sub for &MotiveLaurent<C> {
    type Output = MotiveLaurent<C>;
    fn sub(self, rhs: Self) -> MotiveLaurent<C> {
        self + &(-rhs)
    }
}

impl<C: Scalar> Mul for &MotiveLaurent<C> {
    type Output = MotiveLaurent<C>;
    fn mul(self, rhs: Self) -> MotiveLaurent<C> {
        if self.is_zero() || rhs.is_zero() {
            return MotiveLaurent::zero();
        }
        // unknown part of one factor times everything the other may contain
        let mut floor: Option<i64> = None;
        if let (Some(fa), Some(tb)) = (self.floor, rhs.top_bound()) {
            floor = Some(fa + tb);
        }
        if let (Some(fb), Some(ta)) = (rhs.floor, self.top_bound()) {
            let cand = fb + ta;
            floor = Some(floor.map_or(cand, |f| f.max(cand)));
        }
        let (low, coeffs) = if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            (0, Vec::new())
        } else {
            let n = self.coeffs.len() + rhs.coeffs.len() - 1;
            let mut v = vec![C::zero(); n];
            for (i, a) in self.coeffs.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for (j, b) in rhs.coeffs.iter().enumerate() {
                    if b.is_zero() {
                        continue;
                    }
                    v[i + j] = v[i + j].clone() + a.clone() * b.clone();
                }
            }
            (self.low + rhs.low, v)
        };
        let mut out = MotiveLaurent { low, coeffs, floor };
        out.normalize();
        out
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl<C: Scalar> $tr for MotiveLaurent<C> {
            type Output = MotiveLaurent<C>;
            fn $m(self, rhs: Self) -> MotiveLaurent<C> {
                (&self).$m(&rhs)
            }
        }
        impl<C: Scalar> $tr<&MotiveLaurent<C>> for MotiveLaurent<C> {
            type Output = MotiveLaurent<C>;
            fn $m(self, rhs: &MotiveLaurent<C>) -> MotiveLaurent<C> {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl<C: Scalar> Neg for MotiveLaurent<C> {
    type Output = MotiveLaurent<C>;
    fn neg(self) -> MotiveLaurent<C> {
        self.mul_unit(-1, 0)
    }
}
