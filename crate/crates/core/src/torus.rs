//! Truncated series in the motivic quantum torus.
//!
//! Generators `y^α` are indexed by dimension vectors over the vertices
//! `0..N` plus an optional framing component. The product is twisted by the
//! skew form: `y^α · y^β = (-L^(1/2))^<α,β> y^(α+β)`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::motive::MotiveLaurent;
use crate::scalar::{binomial_series, sign_pow, Scalar};

/// Dimension vector with framing component `0` or `1`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Monomial {
    pub dims: Vec<u32>,
    pub framing: u8,
}

impl Monomial {
    pub fn new(dims: Vec<u32>) -> Self {
        Self { dims, framing: 0 }
    }

    pub fn framed(dims: Vec<u32>) -> Self {
        Self { dims, framing: 1 }
    }

    pub fn unit(n: usize) -> Self {
        Self::new(vec![0; n])
    }

    /// `y_v` for a vertex `v < n`.
    pub fn vertex(n: usize, v: usize) -> Self {
        let mut dims = vec![0; n];
        dims[v] = 1;
        Self::new(dims)
    }

    /// Total degree `|α|`; the framing does not count.
    pub fn degree(&self) -> u32 {
        self.dims.iter().sum()
    }

    pub fn is_unit(&self) -> bool {
        self.framing == 0 && self.dims.iter().all(|&d| d == 0)
    }

    pub fn scaled(&self, k: u32) -> Self {
        Self { dims: self.dims.iter().map(|d| d * k).collect(), framing: self.framing * k as u8 }
    }

    fn checked_add(&self, other: &Self) -> Result<Self> {
        if self.framing + other.framing >= 2 {
            return Err(Error::FramingOverflow);
        }
        Ok(Self {
            dims: self.dims.iter().zip(&other.dims).map(|(a, b)| a + b).collect(),
            framing: self.framing + other.framing,
        })
    }

    fn divides(&self, other: &Self) -> bool {
        self.framing <= other.framing && self.dims.iter().zip(&other.dims).all(|(a, b)| a <= b)
    }

    fn minus(&self, other: &Self) -> Self {
        Self {
            dims: self.dims.iter().zip(&other.dims).map(|(a, b)| a - b).collect(),
            framing: self.framing - other.framing,
        }
    }

    fn extended(&self) -> impl Iterator<Item = i64> + '_ {
        self.dims.iter().map(|&d| d as i64).chain(std::iter::once(self.framing as i64))
    }
}

/// Skew form `<α,β>` on framed dimension vectors; the last index is `∞`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct PairingMatrix {
    n: usize,
    entries: Vec<i64>,
}

impl PairingMatrix {
    /// The zero form on `n` unframed vertices plus `∞`.
    pub fn zero(n: usize) -> Self {
        Self { n, entries: vec![0; (n + 1) * (n + 1)] }
    }

    /// Builds the form from an `(n+1) x (n+1)` skew-symmetric matrix.
    pub fn from_rows(rows: Vec<Vec<i64>>) -> Self {
        let size = rows.len();
        assert!(size >= 1, "pairing needs at least the framing row");
        assert!(rows.iter().all(|r| r.len() == size), "pairing matrix must be square");
        for i in 0..size {
            for j in 0..size {
                assert_eq!(rows[i][j], -rows[j][i], "pairing matrix must be skew-symmetric");
            }
        }
        Self { n: size - 1, entries: rows.into_iter().flatten().collect() }
    }

    /// Number of unframed vertices.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.entries[i * (self.n + 1) + j]
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.entries.chunks(self.n + 1).map(|r| r.to_vec()).collect()
    }

    /// True when the form vanishes on unframed vectors.
    pub fn unframed_is_zero(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| self.entry(i, j) == 0))
    }

    fn is_zero(&self) -> bool {
        self.entries.iter().all(|&e| e == 0)
    }

    pub fn pair(&self, a: &Monomial, b: &Monomial) -> i64 {
        let bv: Vec<i64> = b.extended().collect();
        a.extended()
            .enumerate()
            .filter(|(_, ai)| *ai != 0)
            .map(|(i, ai)| ai * bv.iter().enumerate().map(|(j, bj)| self.entry(i, j) * bj).sum::<i64>())
            .sum()
    }
}

/// Total-degree truncation plus an optional L-floor for coefficients.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct TruncationPolicy {
    pub max_total_degree: u32,
    /// Floor in powers of `L` (not half powers).
    pub l_floor: Option<i64>,
}

impl TruncationPolicy {
    pub fn new(max_total_degree: u32) -> Self {
        Self { max_total_degree, l_floor: None }
    }

    pub fn with_l_floor(self, l_floor: i64) -> Self {
        Self { l_floor: Some(l_floor), ..self }
    }

    /// Floor in half-exponent units.
    pub fn coeff_floor(&self) -> Option<i64> {
        self.l_floor.map(|f| 2 * f)
    }

    pub fn admits(&self, m: &Monomial) -> bool {
        m.degree() <= self.max_total_degree
    }
}

/// Sparse truncated series over [`MotiveLaurent`] with the twisted product.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TwistedSeries<C> {
    policy: TruncationPolicy,
    pairing: Arc<PairingMatrix>,
    terms: BTreeMap<Monomial, MotiveLaurent<C>>,
}

impl<C: Scalar> TwistedSeries<C> {
    pub fn zero(policy: TruncationPolicy, pairing: Arc<PairingMatrix>) -> Self {
        Self { policy, pairing, terms: BTreeMap::new() }
    }

    pub fn one(policy: TruncationPolicy, pairing: Arc<PairingMatrix>) -> Self {
        let n = pairing.n();
        Self::monomial(Monomial::unit(n), MotiveLaurent::one(), policy, pairing)
    }

    /// `c · y^m`, or zero if `m` exceeds the truncation degree.
    pub fn monomial(m: Monomial, c: MotiveLaurent<C>, policy: TruncationPolicy, pairing: Arc<PairingMatrix>) -> Self {
        Self::from_terms([(m, c)], policy, pairing)
    }

    /// Sums the given terms, dropping monomials above the truncation degree.
    pub fn from_terms<I>(terms: I, policy: TruncationPolicy, pairing: Arc<PairingMatrix>) -> Self
    where
        I: IntoIterator<Item = (Monomial, MotiveLaurent<C>)>,
    {
        let mut out = Self::zero(policy, pairing);
        for (m, c) in terms {
            assert_eq!(m.dims.len(), out.pairing.n(), "monomial has wrong number of vertices");
            if policy.admits(&m) {
                out.add_term(m, c);
            }
        }
        out.finish()
    }

    fn add_term(&mut self, m: Monomial, c: MotiveLaurent<C>) {
        match self.terms.get_mut(&m) {
            Some(v) => *v = &*v + &c,
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    fn finish(mut self) -> Self {
        let floor = self.policy.coeff_floor();
        self.terms = std::mem::take(&mut self.terms)
            .into_iter()
            .map(|(m, c)| (m, match floor { Some(f) => c.clip(f), None => c }))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        self
    }

    pub fn policy(&self) -> TruncationPolicy {
        self.policy
    }

    pub fn pairing(&self) -> &Arc<PairingMatrix> {
        &self.pairing
    }

    pub fn n(&self) -> usize {
        self.pairing.n()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &MotiveLaurent<C>)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> MotiveLaurent<C> {
        self.terms.get(m).cloned().unwrap_or_else(MotiveLaurent::zero)
    }

    pub fn constant_term(&self) -> MotiveLaurent<C> {
        self.coefficient(&Monomial::unit(self.n()))
    }

    pub fn is_framed(&self) -> bool {
        self.terms.keys().any(|m| m.framing > 0)
    }

    pub fn is_floored(&self) -> bool {
        self.terms.values().any(|c| c.is_floored())
    }

    /// Re-truncates to a different policy on the same pairing.
    pub fn with_policy(&self, policy: TruncationPolicy) -> Self {
        Self::from_terms(self.terms.clone(), policy, self.pairing.clone())
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.policy != other.policy || self.pairing != other.pairing {
            return Err(Error::PolicyMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out.finish())
    }

    pub fn neg(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
            ..self.clone()
        }
    }

    /// Twisted product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let d = self.policy.max_total_degree;
        let twisted = !self.pairing.is_zero();
        let rhs: Vec<(&Monomial, &MotiveLaurent<C>, u32)> =
            other.terms.iter().map(|(m, c)| (m, c, m.degree())).collect();
        let partial = |chunk: &[(&Monomial, &MotiveLaurent<C>)]| -> Result<HashMap<Monomial, MotiveLaurent<C>>> {
            let mut acc: HashMap<Monomial, MotiveLaurent<C>> = HashMap::new();
            for &(ma, ca) in chunk {
                let da = ma.degree();
                for &(mb, cb, db) in &rhs {
                    if da + db > d {
                        continue;
                    }
                    let m = ma.checked_add(mb)?;
                    let mut c = ca * cb;
                    if twisted {
                        let p = self.pairing.pair(ma, mb);
                        c = c.mul_unit(sign_pow(p), p);
                    }
                    match acc.get_mut(&m) {
                        Some(v) => *v = &*v + &c,
                        None => {
                            acc.insert(m, c);
                        }
                    }
                }
            }
            Ok(acc)
        };
        let lhs: Vec<(&Monomial, &MotiveLaurent<C>)> = self.terms.iter().collect();
        let work = lhs.len() * rhs.len();
        let parts: Vec<HashMap<Monomial, MotiveLaurent<C>>> = if work > 4096 && lhs.len() > 1 {
            let chunk = lhs.len().div_ceil(rayon::current_num_threads().max(1) * 4).max(1);
            lhs.par_chunks(chunk).map(partial).collect::<Result<_>>()?
        } else {
            vec![partial(&lhs)?]
        };
        let mut out = Self::zero(self.policy, self.pairing.clone());
        for part in parts {
            for (m, c) in part {
                out.add_term(m, c);
            }
        }
        Ok(out.finish())
    }

    /// Left-to-right product of a list of series.
    ///
    /// The order is fixed so that floors, which depend on parenthesization,
    /// are reproducible.
    pub fn product<'a, I>(policy: TruncationPolicy, pairing: Arc<PairingMatrix>, factors: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a Self>,
    {
        let mut acc = Self::one(policy, pairing);
        for f in factors {
            acc = acc.mul(f)?;
        }
        Ok(acc)
    }

    /// `(1 - c·y^m)^e`, truncated.
    pub fn binomial_factor(
        m: &Monomial,
        c: &MotiveLaurent<C>,
        e: i64,
        policy: TruncationPolicy,
        pairing: Arc<PairingMatrix>,
    ) -> Result<Self> {
        if m.is_unit() {
            return Err(Error::EmptyMonomial);
        }
        let deg = m.degree();
        let mut kmax = if deg == 0 { usize::MAX } else { (policy.max_total_degree / deg) as usize };
        if m.framing > 0 {
            if !(0..=1).contains(&e) {
                return Err(Error::FramingOverflow);
            }
            kmax = kmax.min(1);
        }
        if kmax == usize::MAX {
            // pure framing with e in {0, 1}
            kmax = 1;
        }
        let coeffs: Vec<C> = binomial_series(e, kmax);
        let mut power = MotiveLaurent::one();
        let mut terms = Vec::with_capacity(coeffs.len());
        for (k, b) in coeffs.into_iter().enumerate() {
            if k > 0 {
                power = &power * c;
            }
            terms.push((m.scaled(k as u32), power.clone() * MotiveLaurent::constant(b)));
        }
        Ok(Self::from_terms(terms, policy, pairing))
    }

    /// `self · other^(-1)` in the commutative unframed regime.
    pub fn div(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        if !self.pairing.unframed_is_zero() || self.is_framed() || other.is_framed() {
            return Err(Error::FramedDivision);
        }
        let b0 = other.constant_term();
        let Some((sign, shift)) = b0.as_unit() else {
            return Err(Error::NonUnitConstantTerm(b0.to_string()));
        };
        let d = self.policy.max_total_degree;
        let gens: Vec<(&Monomial, &MotiveLaurent<C>)> = other.terms.iter().filter(|(m, _)| !m.is_unit()).collect();

        // all monomials reachable from supp(self) by adding supports of `other`
        let mut support: BTreeSet<Monomial> = self.terms.keys().cloned().collect();
        let mut frontier: Vec<Monomial> = support.iter().cloned().collect();
        while let Some(m) = frontier.pop() {
            for (g, _) in &gens {
                if m.degree() + g.degree() > d {
                    continue;
                }
                let next = m.checked_add(g)?;
                if support.insert(next.clone()) {
                    frontier.push(next);
                }
            }
        }
        let mut order: Vec<Monomial> = support.into_iter().collect();
        order.sort_by_key(|m| m.degree());

        let mut quotient: BTreeMap<Monomial, MotiveLaurent<C>> = BTreeMap::new();
        let floor = self.policy.coeff_floor();
        for m in order {
            let mut acc = self.coefficient(&m);
            for (g, c) in &gens {
                if g.divides(&m) {
                    if let Some(q) = quotient.get(&m.minus(g)) {
                        acc = &acc - &(*c * q);
                    }
                }
            }
            let mut q = acc.mul_unit(sign, -shift);
            if let Some(f) = floor {
                q = q.clip(f);
            }
            if !q.is_zero() {
                quotient.insert(m, q);
            }
        }
        Ok(Self { policy: self.policy, pairing: self.pairing.clone(), terms: quotient })
    }

    pub fn inverse(&self) -> Result<Self> {
        Self::one(self.policy, self.pairing.clone()).div(self)
    }

    /// Substitutes `y_v -> c·y_v` for a unit `c = ±L^(t/2)`; `v = N` is the framing.
    pub fn scale_variable(&self, v: usize, c: &MotiveLaurent<C>) -> Result<Self> {
        let n = self.n();
        if v > n {
            return Err(Error::BadVertex { index: v, n });
        }
        let Some((sign, shift)) = c.as_unit() else {
            return Err(Error::NonUnitScalar(c.to_string()));
        };
        Ok(self.scale_by_unit(v, sign, shift))
    }

    pub(crate) fn scale_by_unit(&self, v: usize, sign: i64, shift: i64) -> Self {
        let n = self.n();
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let k = if v == n { m.framing as i64 } else { m.dims[v] as i64 };
                let s = if sign < 0 { sign_pow(k) } else { 1 };
                (m.clone(), c.clone().mul_unit(s, shift * k))
            })
            .collect();
        Self { terms, ..self.clone() }.finish()
    }

    /// First monomial where the two series differ above their floors.
    pub fn first_difference(&self, other: &Self) -> Option<(Monomial, MotiveLaurent<C>, MotiveLaurent<C>)> {
        let keys: BTreeSet<&Monomial> = self.terms.keys().chain(other.terms.keys()).collect();
        keys.into_iter().find_map(|m| {
            let a = self.coefficient(m);
            let b = other.coefficient(m);
            (!a.agrees_with(&b)).then(|| (m.clone(), a, b))
        })
    }

    /// Number of `(monomial, exponent)` coefficient pairs known on both sides.
    pub fn compared_terms(&self, other: &Self) -> usize {
        let keys: BTreeSet<&Monomial> = self.terms.keys().chain(other.terms.keys()).collect();
        keys.into_iter()
            .map(|m| {
                let a = self.coefficient(m);
                let b = other.coefficient(m);
                let lo = match (a.floor(), b.floor()) {
                    (Some(x), Some(y)) => Some(x.max(y)),
                    (x, y) => x.or(y),
                };
                let ts: BTreeSet<i64> = a.terms().chain(b.terms()).map(|(t, _)| t).collect();
                ts.into_iter().filter(|t| lo.is_none_or(|f| *t >= f)).count()
            })
            .sum()
    }

    /// Applies `L^(1/2) -> 1` to every coefficient.
    pub fn euler_specialize(&self) -> Result<BTreeMap<Monomial, C>> {
        self.terms
            .iter()
            .map(|(m, c)| Ok((m.clone(), c.euler_specialize()?)))
            .filter(|r| !matches!(r, Ok((_, c)) if c.is_zero()))
            .collect()
    }

    /// Rewrites in `s = y_0⋯y_{N-1}`, `T_i = y_i`.
    pub fn to_st(&self) -> SeriesST<C> {
        let n = self.n();
        let framed = self.is_framed();
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let s = m.dims[0] as i64;
                let mut exps = vec![s];
                exps.extend(m.dims[1..].iter().map(|&d| d as i64 - s));
                if framed {
                    exps.push(m.framing as i64);
                }
                (exps, c.clone())
            })
            .collect();
        SeriesST { n, framed, policy: self.policy, terms }
    }

    pub fn variable_names(&self) -> Vec<String> {
        let mut names: Vec<String> = (0..self.n()).map(|i| format!("y{i}")).collect();
        names.push("yinf".into());
        names
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut exps: Vec<i64> = m.dims.iter().map(|&d| d as i64).collect();
                exps.push(m.framing as i64);
                term_json(exps, c)
            })
            .collect();
        json!({
            "variables": self.variable_names(),
            "maxTotalDegree": self.policy.max_total_degree,
            "lFloor": self.policy.l_floor,
            "terms": terms,
        })
    }
}

fn term_json<C: Scalar>(exps: Vec<i64>, c: &MotiveLaurent<C>) -> Value {
    let mut obj = json!({ "exps": exps, "coeff": c.terms_json() });
    if let Some(f) = c.floor() {
        obj["floor"] = json!(f);
    }
    obj
}

/// A series rewritten in the variables `s, T_1, ..., T_{N-1}` (and `yinf` when framed).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SeriesST<C> {
    n: usize,
    framed: bool,
    policy: TruncationPolicy,
    terms: BTreeMap<Vec<i64>, MotiveLaurent<C>>,
}

impl<C: Scalar> SeriesST<C> {
    pub fn variable_names(&self) -> Vec<String> {
        let mut names = vec!["s".to_string()];
        names.extend((1..self.n).map(|i| format!("T{i}")));
        if self.framed {
            names.push("yinf".into());
        }
        names
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &MotiveLaurent<C>)> {
        self.terms.iter()
    }

    /// Coefficient of `s^e[0] T_1^e[1] ⋯`.
    pub fn coefficient(&self, exps: &[i64]) -> MotiveLaurent<C> {
        self.terms.get(exps).cloned().unwrap_or_else(MotiveLaurent::zero)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "variables": self.variable_names(),
            "maxTotalDegree": self.policy.max_total_degree,
            "lFloor": self.policy.l_floor,
            "terms": self.terms.iter().map(|(e, c)| term_json(e.clone(), c)).collect::<Vec<_>>(),
        })
    }

    /// JSON with every coefficient specialized at `L^(1/2) = 1`.
    pub fn euler_json(&self) -> Result<Value> {
        let mut terms = Vec::new();
        for (e, c) in &self.terms {
            let v = c.euler_specialize()?;
            if !v.is_zero() {
                terms.push(json!({ "exps": e, "coeff": v.to_string() }));
            }
        }
        Ok(json!({
            "variables": self.variable_names(),
            "maxTotalDegree": self.policy.max_total_degree,
            "lFloor": self.policy.l_floor,
            "euler": true,
            "terms": terms,
        }))
    }

    fn monomial_text(&self, exps: &[i64]) -> String {
        let names = self.variable_names();
        let parts: Vec<String> = exps
            .iter()
            .zip(&names)
            .filter(|(e, _)| **e != 0)
            .map(|(e, name)| format!("{name}^{e}"))
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join(" ")
        }
    }

    /// One line per monomial, `s^m T1^a1 ... : coefficient`.
    pub fn to_text(&self) -> String {
        self.terms.iter().map(|(e, c)| format!("{} : {}\n", self.monomial_text(e), c)).collect()
    }

    pub fn euler_text(&self) -> Result<String> {
        let mut out = String::new();
        for (e, c) in &self.terms {
            let v = c.euler_specialize()?;
            if !v.is_zero() {
                out.push_str(&format!("{} : {}\n", self.monomial_text(e), v));
            }
        }
        Ok(out)
    }
}

impl<C: Scalar> fmt::Display for SeriesST<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}
