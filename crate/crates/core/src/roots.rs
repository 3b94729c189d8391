//! Positive roots of affine type `A_{N-1}` and stability chambers.
//!
//! Stability parameters take values `q + e·ε` for a symbolic infinitesimal
//! `ε > 0`, so signs are decided exactly.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::str::FromStr;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::quiver::Quiver;
use crate::scalar::Field;

/// `q + e·ε`, ordered lexicographically.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct InfinitesimalRational<Q> {
    pub q: Q,
    pub e: Q,
}

impl<Q: Field> InfinitesimalRational<Q> {
    pub fn new(q: Q, e: Q) -> Self {
        Self { q, e }
    }

    pub fn zero() -> Self {
        Self::new(Q::zero(), Q::zero())
    }

    pub fn rational(q: Q) -> Self {
        Self::new(q, Q::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.q.is_zero() && self.e.is_zero()
    }

    /// Sign in the ordered field `Q(ε)`.
    pub fn sign(&self) -> i8 {
        let s = if self.q.is_zero() { &self.e } else { &self.q };
        if s.is_positive() {
            1
        } else if s.is_negative() {
            -1
        } else {
            0
        }
    }

    pub fn scale(&self, k: &Q) -> Self {
        Self::new(self.q.clone() * k.clone(), self.e.clone() * k.clone())
    }
}

impl<Q: Field> Add for InfinitesimalRational<Q> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.q + rhs.q, self.e + rhs.e)
    }
}

impl<Q: Field> Sub for InfinitesimalRational<Q> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.q - rhs.q, self.e - rhs.e)
    }
}

impl<Q: Field> Mul<Q> for InfinitesimalRational<Q> {
    type Output = Self;
    fn mul(self, k: Q) -> Self {
        self.scale(&k)
    }
}

impl<Q: Field> PartialOrd for InfinitesimalRational<Q> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<Q: Field> Ord for InfinitesimalRational<Q> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.q.cmp(&other.q).then_with(|| self.e.cmp(&other.e))
    }
}

impl<Q: Field> fmt::Display for InfinitesimalRational<Q> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.e.is_zero() {
            write!(f, "{}", self.q)
        } else if self.e.is_negative() {
            write!(f, "{}-{}*eps", self.q, -self.e.clone())
        } else {
            write!(f, "{}+{}*eps", self.q, self.e)
        }
    }
}

/// Parses `q`, `q+e*eps`, `q-e*eps`, `e*eps` or `eps` (with optional sign).
impl<Q: Field + FromStr> FromStr for InfinitesimalRational<Q> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::Parse(format!("bad stability entry {s:?}"));
        let num = |t: &str| t.parse::<Q>().map_err(|_| bad());
        let eps_coeff = |t: &str| -> Result<Q> {
            let body = t.strip_suffix("eps").ok_or_else(bad)?;
            let body = body.strip_suffix('*').unwrap_or(body);
            match body {
                "" | "+" => Ok(Q::one()),
                "-" => Ok(-Q::one()),
                b => num(b.strip_prefix('+').unwrap_or(b)),
            }
        };
        if !s.ends_with("eps") {
            return Ok(Self::rational(num(&s)?));
        }
        // split at the last sign that is not at the start and not inside an exponent
        let split = s.char_indices().skip(1).filter(|&(_, c)| c == '+' || c == '-').map(|(i, _)| i).last();
        match split {
            Some(i) => Ok(Self::new(num(&s[..i])?, eps_coeff(&s[i..])?)),
            None => Ok(Self::new(Q::zero(), eps_coeff(&s)?)),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum RootKind {
    /// `α_[a,b] + nδ`, `n >= 0`.
    RealPlus { a: usize, b: usize, n: u32 },
    /// `nδ - α_[a,b]`, `n >= 1`.
    RealMinus { a: usize, b: usize, n: u32 },
    /// `nδ`, `n >= 1`.
    Imaginary { n: u32 },
}

impl RootKind {
    fn rank(&self) -> u8 {
        match self {
            RootKind::RealPlus { .. } => 0,
            RootKind::RealMinus { .. } => 1,
            RootKind::Imaginary { .. } => 2,
        }
    }

    fn interval(&self) -> (usize, usize) {
        match *self {
            RootKind::RealPlus { a, b, .. } | RootKind::RealMinus { a, b, .. } => (a, b),
            RootKind::Imaginary { .. } => (0, 0),
        }
    }
}

/// Positive root together with its dimension vector.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Root {
    kind: RootKind,
    dims: Vec<u32>,
}

impl Root {
    pub fn new(kind: RootKind, n: usize) -> Result<Self> {
        let mut dims = vec![0u32; n];
        let fill = |dims: &mut Vec<u32>, k: u32| dims.iter_mut().for_each(|d| *d = k);
        let check = |a: usize, b: usize| {
            if a < 1 || a > b || b + 1 > n {
                Err(Error::BadInterval { a, b, max: n.saturating_sub(1) })
            } else {
                Ok(())
            }
        };
        match kind {
            RootKind::RealPlus { a, b, n: k } => {
                check(a, b)?;
                fill(&mut dims, k);
                dims[a..=b].iter_mut().for_each(|d| *d += 1);
            }
            RootKind::RealMinus { a, b, n: k } => {
                check(a, b)?;
                if k == 0 {
                    return Err(Error::Parse("nδ - α needs n >= 1".into()));
                }
                fill(&mut dims, k);
                dims[a..=b].iter_mut().for_each(|d| *d -= 1);
            }
            RootKind::Imaginary { n: k } => {
                if k == 0 {
                    return Err(Error::Parse("nδ needs n >= 1".into()));
                }
                fill(&mut dims, k);
            }
        }
        Ok(Self { kind, dims })
    }

    pub fn kind(&self) -> RootKind {
        self.kind
    }

    pub fn dims(&self) -> &[u32] {
        &self.dims
    }

    pub fn degree(&self) -> u32 {
        self.dims.iter().sum()
    }

    /// Multiplicity of `δ`, which equals `α_0`.
    pub fn delta_multiplicity(&self) -> u32 {
        match self.kind {
            RootKind::RealPlus { n, .. } | RootKind::RealMinus { n, .. } | RootKind::Imaginary { n } => n,
        }
    }

    pub fn is_imaginary(&self) -> bool {
        matches!(self.kind, RootKind::Imaginary { .. })
    }

    /// Real root whose entries off the loop vertices sum to an odd number.
    pub fn is_odd(&self, q: &Quiver) -> bool {
        let s: u32 = self.dims.iter().enumerate().filter(|(k, _)| !q.has_loop(*k)).map(|(_, d)| d).sum();
        s % 2 == 1
    }

    pub fn to_json(&self) -> Value {
        let (kind, a, b, n) = match self.kind {
            RootKind::RealPlus { a, b, n } => ("realPlus", a, b, n),
            RootKind::RealMinus { a, b, n } => ("realMinus", a, b, n),
            RootKind::Imaginary { n } => ("imaginary", 0, 0, n),
        };
        if self.is_imaginary() {
            json!({ "kind": kind, "n": n, "dims": self.dims })
        } else {
            json!({ "kind": kind, "a": a, "b": b, "n": n, "dims": self.dims })
        }
    }

    fn sort_key(&self) -> (u32, u32, u8, (usize, usize)) {
        (self.delta_multiplicity(), self.degree(), self.kind.rank(), self.kind.interval())
    }
}

impl fmt::Display for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            RootKind::RealPlus { a, b, n: 0 } => write!(f, "a[{a},{b}]"),
            RootKind::RealPlus { a, b, n } => write!(f, "a[{a},{b}]+{n}d"),
            RootKind::RealMinus { a, b, n } => write!(f, "{n}d-a[{a},{b}]"),
            RootKind::Imaginary { n } => write!(f, "{n}d"),
        }
    }
}

/// Positive roots with `δ`-multiplicity at most `n_max`, ordered by
/// `(multiplicity, |α|, kind, interval)`.
pub fn enumerate_roots(n: usize, n_max: u32) -> Vec<Root> {
    let intervals: Vec<(usize, usize)> =
        (1..n).flat_map(|a| (a..n).map(move |b| (a, b))).collect();
    let mut out = Vec::new();
    for k in 0..=n_max {
        for &(a, b) in &intervals {
            out.push(Root::new(RootKind::RealPlus { a, b, n: k }, n).expect("valid interval"));
            if k >= 1 {
                out.push(Root::new(RootKind::RealMinus { a, b, n: k }, n).expect("valid interval"));
            }
        }
        if k >= 1 {
            out.push(Root::new(RootKind::Imaginary { n: k }, n).expect("valid root"));
        }
    }
    out.sort_by_key(|r| r.sort_key());
    out
}

/// Roots with `|α| <= max_degree`.
pub fn roots_up_to_degree(n: usize, max_degree: u32) -> Vec<Root> {
    let n_max = (max_degree as usize + n) / n;
    enumerate_roots(n, n_max as u32).into_iter().filter(|r| r.degree() <= max_degree).collect()
}

/// Vector of `q + e·ε` values, one per vertex.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct StabilityParam<Q> {
    entries: Vec<InfinitesimalRational<Q>>,
}

impl<Q: Field> StabilityParam<Q> {
    pub fn new(entries: Vec<InfinitesimalRational<Q>>) -> Self {
        Self { entries }
    }

    pub fn entries(&self) -> &[InfinitesimalRational<Q>] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `(1-N+ε, 1, ..., 1)`.
    pub fn pt(n: usize) -> Self {
        Self::standard(n, Q::one())
    }

    /// `(1-N-ε, 1, ..., 1)`.
    pub fn dt(n: usize) -> Self {
        Self::standard(n, -Q::one())
    }

    fn standard(n: usize, e: Q) -> Self {
        let mut entries = vec![InfinitesimalRational::rational(Q::one()); n];
        entries[0] = InfinitesimalRational::new(Q::from_i64_exact(1 - n as i64), e);
        Self { entries }
    }

    /// `ζ·α`.
    pub fn pair(&self, dims: &[u32]) -> InfinitesimalRational<Q> {
        self.entries
            .iter()
            .zip(dims)
            .fold(InfinitesimalRational::zero(), |acc, (z, &d)| acc + z.scale(&Q::from_i64_exact(d as i64)))
    }

    /// Slope `ζ·α / |α|`.
    pub fn slope(&self, dims: &[u32]) -> InfinitesimalRational<Q> {
        let total: u32 = dims.iter().sum();
        assert!(total > 0, "slope of the zero vector");
        let inv = Q::one() / Q::from_i64_exact(total as i64);
        self.pair(dims).scale(&inv)
    }

    /// Compares phases of the central charges `Z(α) = -ζ·α + i|α|`.
    pub fn phase_cmp(&self, alpha: &[u32], beta: &[u32]) -> Ordering {
        let da = Q::from_i64_exact(alpha.iter().sum::<u32>() as i64);
        let db = Q::from_i64_exact(beta.iter().sum::<u32>() as i64);
        // arg Z(α) < arg Z(β) iff the cross product |α| ζ·β - |β| ζ·α is positive
        let cross = self.pair(beta).scale(&da) - self.pair(alpha).scale(&db);
        match cross.sign() {
            1 => Ordering::Less,
            -1 => Ordering::Greater,
            _ => Ordering::Equal,
        }
    }

    /// Parses comma-separated entries such as `"-1+eps,1"`.
    pub fn parse(s: &str) -> Result<Self>
    where
        Q: FromStr,
    {
        let entries = s.split(',').map(|e| e.parse()).collect::<Result<Vec<_>>>()?;
        Ok(Self { entries })
    }
}

impl<Q: Field> fmt::Display for StabilityParam<Q> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(|e| e.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Chamber side of a root: the sign of `ζ·α` with the rational part reversed.
///
/// This fixes the orientation under which the standard PT chamber's negative
/// side is exactly the `α_[a,b] + nδ` family.
pub fn chamber_side<Q: Field>(v: &InfinitesimalRational<Q>) -> i8 {
    if v.q.is_zero() {
        v.sign()
    } else {
        -v.sign()
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ChamberEntry<Q> {
    pub root: Root,
    pub value: InfinitesimalRational<Q>,
    pub side: i8,
    pub slope: InfinitesimalRational<Q>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ChamberReport<Q> {
    pub entries: Vec<ChamberEntry<Q>>,
}

impl<Q: Field> ChamberReport<Q> {
    pub fn negative(&self) -> Vec<Root> {
        self.entries.iter().filter(|e| e.side < 0).map(|e| e.root.clone()).collect()
    }

    pub fn positive(&self) -> Vec<Root> {
        self.entries.iter().filter(|e| e.side > 0).map(|e| e.root.clone()).collect()
    }

    pub fn non_generic(&self) -> Vec<Root> {
        self.entries.iter().filter(|e| e.side == 0).map(|e| e.root.clone()).collect()
    }

    pub fn is_generic(&self) -> bool {
        self.entries.iter().all(|e| e.side != 0)
    }

    /// Errors with the first root on a wall.
    pub fn require_generic(&self) -> Result<()> {
        match self.entries.iter().find(|e| e.side == 0) {
            Some(e) => Err(Error::NonGenericZeta(e.root.dims().to_vec())),
            None => Ok(()),
        }
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .entries
            .iter()
            .map(|e| {
                json!({
                    "root": e.root.to_json(),
                    "q": e.value.q.to_string(),
                    "eps": e.value.e.to_string(),
                    "sign": e.value.sign(),
                    "side": e.side,
                    "slope": e.slope.to_string(),
                })
            })
            .collect();
        json!({ "generic": self.is_generic(), "roots": rows })
    }
}

/// Splits roots by chamber side; roots on a wall are reported, not rejected.
pub fn chamber_split<Q: Field>(roots: &[Root], zeta: &StabilityParam<Q>) -> Result<ChamberReport<Q>> {
    if let Some(r) = roots.first() {
        if r.dims().len() != zeta.len() {
            return Err(Error::ZetaLength { expected: r.dims().len(), found: zeta.len() });
        }
    }
    let entries = roots
        .par_iter()
        .map(|r| {
            let value = zeta.pair(r.dims());
            ChamberEntry { root: r.clone(), side: chamber_side(&value), slope: zeta.slope(r.dims()), value }
        })
        .collect();
    Ok(ChamberReport { entries })
}
