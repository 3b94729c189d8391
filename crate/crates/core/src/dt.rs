//! Generating functions of framed quiver representations and the identities
//! between them.
//!
//! All products are over roots of the affine type A root system attached to
//! `Q_σ`. Factors are expanded as univariate series in `u = y^α` and then
//! embedded into the quantum torus. Series built here are unframed, so the
//! twisted product reduces to the commutative one.

use std::sync::Arc;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::motive::MotiveLaurent;
use crate::quiver::{Partition, Quiver};
use crate::roots::{chamber_split, roots_up_to_degree, Root, RootKind, StabilityParam};
use crate::scalar::{binomial_series, sign_pow, Field, Scalar};
use crate::torus::{Monomial, PairingMatrix, TruncationPolicy, TwistedSeries};

/// Floor used for the universal factorization when the policy has none.
pub const DEFAULT_L_FLOOR: i64 = -4;

/// One factor `(1 - sign·L^(h/2) u)^e` of a univariate product.
#[derive(Clone, Copy, Debug)]
struct Factor {
    sign: i64,
    half: i64,
    exponent: i64,
}

fn uni_factor<C: Scalar>(f: Factor, kmax: usize) -> Vec<MotiveLaurent<C>> {
    binomial_series::<C>(f.exponent, kmax)
        .into_iter()
        .enumerate()
        .map(|(k, b)| {
            let k = k as i64;
            MotiveLaurent::term(k * f.half, b).mul_unit(sign_pow(k * (f.sign < 0) as i64), 0)
        })
        .collect()
}

fn uni_mul<C: Scalar>(a: &[MotiveLaurent<C>], b: &[MotiveLaurent<C>], kmax: usize) -> Vec<MotiveLaurent<C>> {
    let len = (a.len() + b.len() - 1).min(kmax + 1);
    let mut out = vec![MotiveLaurent::zero(); len];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate().take(len.saturating_sub(i)) {
            out[i + j] = &out[i + j] + &(x * y);
        }
    }
    out
}

/// Exact product of the factors in the variable `u`, through `u^kmax`.
fn uni_product<C: Scalar>(factors: &[Factor], kmax: usize) -> Vec<MotiveLaurent<C>> {
    factors
        .iter()
        .filter(|f| f.exponent != 0)
        .fold(vec![MotiveLaurent::one()], |acc, &f| uni_mul(&acc, &uni_factor(f, kmax), kmax))
}

/// Substitutes `u = y^dims`.
fn embed<C: Scalar>(
    coeffs: Vec<MotiveLaurent<C>>,
    dims: &[u32],
    policy: TruncationPolicy,
    pairing: Arc<PairingMatrix>,
) -> TwistedSeries<C> {
    let base = Monomial::new(dims.to_vec());
    TwistedSeries::from_terms(
        coeffs.into_iter().enumerate().map(|(k, c)| (base.scaled(k as u32), c)),
        policy,
        pairing,
    )
}

fn max_power(dims: &[u32], policy: TruncationPolicy) -> usize {
    let d: u32 = dims.iter().sum();
    (policy.max_total_degree / d) as usize
}

fn product<C: Scalar>(
    policy: TruncationPolicy,
    pairing: &Arc<PairingMatrix>,
    factors: &[TwistedSeries<C>],
) -> Result<TwistedSeries<C>> {
    TwistedSeries::product(policy, pairing.clone(), factors)
}

/// `A_α`: the infinite product attached to a root, truncated at the L-floor.
pub fn a_alpha_factor<C: Scalar>(root: &Root, q: &Quiver, policy: TruncationPolicy) -> Result<TwistedSeries<C>> {
    let floor = policy.coeff_floor().ok_or(Error::MissingFloor)?;
    let pairing = q.pairing();
    let kmax = max_power(root.dims(), policy);
    if kmax == 0 {
        return Ok(TwistedSeries::one(policy, pairing));
    }
    // (start, exponent) of each family; the j-th member has half-exponent start - 2j
    let n = q.n() as i64;
    let families: Vec<(i64, i64)> = if root.is_imaginary() {
        vec![(0, 1 - n), (2, -1)]
    } else if root.is_odd(q) {
        vec![(-1, 1)]
    } else {
        vec![(0, -1)]
    };
    // a factor matters while its linear term, times the highest possible
    // contribution of the others, can reach the floor
    let top = families.iter().map(|&(s, _)| s).max().unwrap().max(0);
    let reach = (kmax as i64 - 1) * top;
    let mut factors = Vec::new();
    for &(start, exponent) in &families {
        let mut h = start;
        while h + reach >= floor {
            factors.push(Factor { sign: 1, half: h, exponent });
            h -= 2;
        }
    }
    let coeffs: Vec<MotiveLaurent<C>> = uni_product(&factors, kmax)
        .into_iter()
        .enumerate()
        .map(|(k, c)| if k == 0 { c } else { c.with_floor(floor) })
        .collect();
    Ok(embed(coeffs, root.dims(), policy, pairing))
}

fn product_over_roots<C: Scalar>(roots: &[Root], q: &Quiver, policy: TruncationPolicy) -> Result<TwistedSeries<C>> {
    let factors = roots
        .par_iter()
        .map(|r| a_alpha_factor(r, q, policy))
        .collect::<Result<Vec<_>>>()?;
    product(policy, &q.pairing(), &factors)
}

/// `A_U = ∏ A_α` over all positive roots.
pub fn universal_series<C: Scalar>(q: &Quiver, policy: TruncationPolicy) -> Result<TwistedSeries<C>> {
    if policy.l_floor.is_none() {
        return Err(Error::MissingFloor);
    }
    product_over_roots(&roots_up_to_degree(q.n(), policy.max_total_degree), q, policy)
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum ChamberSign {
    Plus,
    Minus,
}

/// Roots on one side of `ζ`, failing if any root is on a wall.
pub fn chamber_roots<Q: Field>(
    n: usize,
    zeta: &StabilityParam<Q>,
    sign: ChamberSign,
    max_degree: u32,
) -> Result<Vec<Root>> {
    let report = chamber_split(&roots_up_to_degree(n, max_degree), zeta)?;
    report.require_generic()?;
    Ok(match sign {
        ChamberSign::Minus => report.negative(),
        ChamberSign::Plus => report.positive(),
    })
}

/// `A_ζ^±`.
pub fn chamber_factor_series<C: Scalar, Q: Field>(
    q: &Quiver,
    zeta: &StabilityParam<Q>,
    sign: ChamberSign,
    policy: TruncationPolicy,
) -> Result<TwistedSeries<C>> {
    if policy.l_floor.is_none() {
        return Err(Error::MissingFloor);
    }
    let roots = chamber_roots(q.n(), zeta, sign, policy.max_total_degree)?;
    product_over_roots(&roots, q, policy)
}

/// `Z_α^(r)`, the telescoped ratio `A_α((-L^(1/2))^r y_0, ..) / A_α((-L^(-1/2))^r y_0, ..)`,
/// as an exact finite product in the original variables.
pub fn z_alpha_r<C: Scalar>(root: &Root, r: u32, q: &Quiver, policy: TruncationPolicy) -> TwistedSeries<C> {
    let pairing = q.pairing();
    let m = root.delta_multiplicity() as i64;
    let kmax = max_power(root.dims(), policy);
    if m == 0 || kmax == 0 {
        return TwistedSeries::one(policy, pairing);
    }
    let rm = r as i64 * m;
    let sign = sign_pow(rm);
    let n = q.n() as i64;
    let mut factors = Vec::new();
    for k in 0..rm {
        if root.is_imaginary() {
            factors.push(Factor { sign, half: 2 * k + 2 - rm, exponent: 1 - n });
            factors.push(Factor { sign, half: 2 * k + 4 - rm, exponent: -1 });
        } else if root.is_odd(q) {
            factors.push(Factor { sign, half: 2 * k + 1 - rm, exponent: 1 });
        } else {
            factors.push(Factor { sign, half: 2 * k + 2 - rm, exponent: -1 });
        }
    }
    embed(uni_product(&factors, kmax), root.dims(), policy, pairing)
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Strategy {
    /// Product of the exact factors `Z_α^(r)`.
    Closed,
    /// Literal ratio of rescaled `A_ζ^-`, with floored coefficients.
    Ratio,
    /// Closed product, checked against the ratio above the floor.
    Both,
}

#[derive(Clone, Debug)]
pub struct ChamberSeriesRequest<Q> {
    pub partition: Partition,
    pub r: u32,
    pub zeta: StabilityParam<Q>,
    pub policy: TruncationPolicy,
    pub strategy: Strategy,
}

impl<Q: Field> ChamberSeriesRequest<Q> {
    pub fn pt(partition: &Partition, r: u32, policy: TruncationPolicy) -> Self {
        let zeta = StabilityParam::pt(partition.n());
        Self { partition: partition.clone(), r, zeta, policy, strategy: Strategy::Closed }
    }

    pub fn dt(partition: &Partition, r: u32, policy: TruncationPolicy) -> Self {
        let zeta = StabilityParam::dt(partition.n());
        Self { partition: partition.clone(), r, zeta, policy, strategy: Strategy::Closed }
    }

    pub fn with_strategy(self, strategy: Strategy) -> Self {
        Self { strategy, ..self }
    }
}

fn closed_chamber_product<C: Scalar, Q: Field>(req: &ChamberSeriesRequest<Q>, q: &Quiver) -> Result<TwistedSeries<C>> {
    if req.zeta.len() != q.n() {
        return Err(Error::ZetaLength { expected: q.n(), found: req.zeta.len() });
    }
    let roots = chamber_roots(q.n(), &req.zeta, ChamberSign::Minus, req.policy.max_total_degree)?;
    let factors: Vec<TwistedSeries<C>> = roots.par_iter().map(|a| z_alpha_r(a, req.r, q, req.policy)).collect();
    product(req.policy, &q.pairing(), &factors)
}

fn ratio_chamber_product<C: Scalar, Q: Field>(req: &ChamberSeriesRequest<Q>, q: &Quiver) -> Result<TwistedSeries<C>> {
    if req.zeta.len() != q.n() {
        return Err(Error::ZetaLength { expected: q.n(), found: req.zeta.len() });
    }
    let Some(target) = req.policy.l_floor else {
        return ratio_at(req, q, req.policy);
    };
    // Work below the requested floor until every coefficient is known down to it.
    let r = req.r as i64;
    let mut working = target - r;
    loop {
        let ratio = ratio_at(req, q, req.policy.with_l_floor(working))?;
        let covered = ratio.terms().all(|(_, c)| c.floor().is_none_or(|f| f <= 2 * target));
        if covered || working < target - RATIO_HEADROOM_LIMIT {
            return Ok(ratio.with_policy(req.policy));
        }
        working -= r + 1;
    }
}

/// Maximum extra depth, in powers of `L`, the ratio strategy works below the requested floor.
const RATIO_HEADROOM_LIMIT: i64 = 64;

fn ratio_at<C: Scalar, Q: Field>(req: &ChamberSeriesRequest<Q>, q: &Quiver, policy: TruncationPolicy) -> Result<TwistedSeries<C>> {
    let a_minus: TwistedSeries<C> = chamber_factor_series(q, &req.zeta, ChamberSign::Minus, policy)?;
    let r = req.r as i64;
    let num = a_minus.scale_by_unit(0, sign_pow(r), r);
    let den = a_minus.scale_by_unit(0, sign_pow(r), -r);
    num.div(&den)
}

/// Both strategies side by side.
#[derive(Clone, Debug)]
pub struct StrategyComparison<C> {
    pub closed: TwistedSeries<C>,
    pub ratio: TwistedSeries<C>,
    /// Number of coefficients known on both sides.
    pub compared: usize,
    pub witness: Option<(Monomial, MotiveLaurent<C>, MotiveLaurent<C>)>,
}

pub fn compare_strategies<C: Scalar, Q: Field>(req: &ChamberSeriesRequest<Q>) -> Result<StrategyComparison<C>> {
    let q = Quiver::build(&req.partition, req.r);
    let (closed, ratio) = rayon::join(|| closed_chamber_product(req, &q), || ratio_chamber_product(req, &q));
    let (closed, ratio) = (closed?, ratio?);
    let compared = closed.compared_terms(&ratio);
    let witness = closed.first_difference(&ratio);
    Ok(StrategyComparison { closed, ratio, compared, witness })
}

fn monomial_exps(m: &Monomial) -> Vec<i64> {
    m.dims.iter().map(|&d| d as i64).chain([m.framing as i64]).collect()
}

/// `Z_ζ` for the `r`-framed quiver, in the variables `y_0, ..., y_{N-1}`.
pub fn framed_partition_function<C: Scalar, Q: Field>(req: &ChamberSeriesRequest<Q>) -> Result<TwistedSeries<C>> {
    let q = Quiver::build(&req.partition, req.r);
    match req.strategy {
        Strategy::Closed => closed_chamber_product(req, &q),
        Strategy::Ratio => ratio_chamber_product(req, &q),
        Strategy::Both => {
            let cmp = compare_strategies(req)?;
            match cmp.witness {
                Some((m, closed, ratio)) => Err(Error::StrategyMismatch {
                    monomial: monomial_exps(&m),
                    closed: closed.to_string(),
                    ratio: ratio.to_string(),
                }),
                None => Ok(cmp.closed),
            }
        }
    }
}

/// The closed rank-one factors.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Rank1Form {
    /// `Z_[a,b](s, T_[a,b])`.
    Interval { a: usize, b: usize },
    /// `Z_im(s)`.
    Imaginary,
}

/// Expands a closed rank-one factor, written in the torus variables via
/// `s^m T_[a,b] = y^(mδ + α_[a,b])`.
pub fn closed_rank1_form<C: Scalar>(form: Rank1Form, q: &Quiver, policy: TruncationPolicy) -> Result<TwistedSeries<C>> {
    let n = q.n();
    let pairing = q.pairing();
    let d = policy.max_total_degree;
    let mut pieces = Vec::new();
    match form {
        Rank1Form::Interval { a, b } => {
            let odd = q.curve_profile().c(a, b)? % 2 == 1;
            for m in 1.. {
                let root = Root::new(RootKind::RealPlus { a, b, n: m as u32 }, n)?;
                if root.degree() > d {
                    break;
                }
                let sign = sign_pow(m);
                let factors: Vec<Factor> = (0..m)
                    .map(|j| {
                        if odd {
                            Factor { sign, half: 2 * j + 1 - m, exponent: 1 }
                        } else {
                            Factor { sign, half: 2 * j + 2 - m, exponent: -1 }
                        }
                    })
                    .collect();
                let kmax = max_power(root.dims(), policy);
                pieces.push(embed(uni_product(&factors, kmax), root.dims(), policy, pairing.clone()));
            }
        }
        Rank1Form::Imaginary => {
            for m in 1..=(d as i64 / n as i64) {
                let dims = vec![m as u32; n];
                let sign = sign_pow(m);
                let factors: Vec<Factor> = (0..m)
                    .flat_map(|j| {
                        [
                            Factor { sign, half: 2 * j + 2 - m, exponent: 1 - n as i64 },
                            Factor { sign, half: 2 * j + 4 - m, exponent: -1 },
                        ]
                    })
                    .collect();
                let kmax = max_power(&dims, policy);
                pieces.push(embed(uni_product(&factors, kmax), &dims, policy, pairing.clone()));
            }
        }
    }
    product(policy, &pairing, &pieces)
}

/// `PT_1 = ∏_{a<=b} Z_[a,b]`.
pub fn pt1_closed<C: Scalar>(q: &Quiver, policy: TruncationPolicy) -> Result<TwistedSeries<C>> {
    let n = q.n();
    let forms: Vec<Rank1Form> = (1..n).flat_map(|a| (a..n).map(move |b| Rank1Form::Interval { a, b })).collect();
    let pieces = forms.par_iter().map(|&f| closed_rank1_form(f, q, policy)).collect::<Result<Vec<_>>>()?;
    product(policy, &q.pairing(), &pieces)
}

/// `DT_1 = Z_im · PT_1`.
pub fn dt1_closed<C: Scalar>(q: &Quiver, policy: TruncationPolicy) -> Result<TwistedSeries<C>> {
    closed_rank1_form::<C>(Rank1Form::Imaginary, q, policy)?.mul(&pt1_closed(q, policy)?)
}

/// `∏_{i=1}^r f(s -> (-1)^(r+1) L^((-r-1)/2 + i) s)`, scaling `y_0`.
pub fn shifted_product<C: Scalar>(f: &TwistedSeries<C>, r: u32) -> Result<TwistedSeries<C>> {
    let r = r as i64;
    let pieces: Vec<TwistedSeries<C>> = (1..=r).map(|i| f.scale_by_unit(0, sign_pow(r + 1), -r - 1 + 2 * i)).collect();
    TwistedSeries::product(f.policy(), f.pairing().clone(), &pieces)
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Geometry {
    /// Affine 3-space.
    Affine3,
    /// `Y_σ` for a partition with `N` triangles; depends only on `N`.
    Resolution(usize),
}

/// The points series `DT_r^points` as a series in the single variable `s`,
/// truncated at `s^(max_total_degree)`.
pub fn points_series<C: Scalar>(geometry: Geometry, r: u32, policy: TruncationPolicy) -> TwistedSeries<C> {
    let pairing = Arc::new(PairingMatrix::zero(1));
    let r = r as i64;
    let d = policy.max_total_degree as i64;
    let pieces: Vec<TwistedSeries<C>> = (1..=d)
        .map(|m| {
            let rm = r * m;
            let sign = sign_pow(rm);
            let mut factors = Vec::new();
            for k in 0..rm {
                factors.push(Factor { sign, half: 2 * k + 4 - rm, exponent: -1 });
                if let Geometry::Resolution(n) = geometry {
                    factors.push(Factor { sign, half: 2 * k + 2 - rm, exponent: 1 - n as i64 });
                }
            }
            let kmax = (d / m) as usize;
            embed(uni_product(&factors, kmax), &[m as u32], policy, pairing.clone())
        })
        .collect();
    TwistedSeries::product(policy, pairing.clone(), &pieces).expect("series share a policy")
}

/// `∏_{i=1}^r DT_1^points(s -> (-1)^(r+1) L^((-r-1)/2 + i) s)`.
pub fn points_series_shifted<C: Scalar>(geometry: Geometry, r: u32, policy: TruncationPolicy) -> TwistedSeries<C> {
    shifted_product(&points_series(geometry, 1, policy), r).expect("series share a policy")
}

/// Rewrites a series in `s` in the torus variables via `s^m = y^(mδ)`.
pub fn embed_points<C: Scalar>(f: &TwistedSeries<C>, q: &Quiver, policy: TruncationPolicy) -> TwistedSeries<C> {
    let n = q.n();
    TwistedSeries::from_terms(
        f.terms().map(|(m, c)| (Monomial::new(vec![m.dims[0]; n]), c.clone())),
        policy,
        q.pairing(),
    )
}

/// `(PT_r, DT_r)` in the torus variables, from the standard chambers.
pub fn pt_dt_series<C: Scalar>(
    partition: &Partition,
    r: u32,
    policy: TruncationPolicy,
) -> Result<(TwistedSeries<C>, TwistedSeries<C>)> {
    let pt = ChamberSeriesRequest::<num_rational::BigRational>::pt(partition, r, policy);
    let dt = ChamberSeriesRequest::<num_rational::BigRational>::dt(partition, r, policy);
    let (a, b) = rayon::join(|| framed_partition_function(&pt), || framed_partition_function(&dt));
    Ok((a?, b?))
}

/// `(PT_r, DT_r)` in the variables `s, T_1, ..., T_{N-1}`.
pub fn pt_dt<C: Scalar>(
    partition: &Partition,
    r: u32,
    policy: TruncationPolicy,
) -> Result<(crate::torus::SeriesST<C>, crate::torus::SeriesST<C>)> {
    let (pt, dt) = pt_dt_series::<C>(partition, r, policy)?;
    Ok((pt.to_st(), dt.to_st()))
}

/// Disagreement between the two sides of an identity.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Witness {
    pub monomial: Vec<i64>,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct VerificationReport {
    pub identity: String,
    pub params: Value,
    pub pass: bool,
    /// Number of coefficients compared.
    pub compared: usize,
    pub witness: Option<Witness>,
}

impl VerificationReport {
    fn compare<C: Scalar>(identity: String, params: &Value, lhs: &TwistedSeries<C>, rhs: &TwistedSeries<C>) -> Self {
        let witness = lhs.first_difference(rhs).map(|(m, a, b)| Witness {
            monomial: monomial_exps(&m),
            lhs: a.to_string(),
            rhs: b.to_string(),
        });
        Self { identity, params: params.clone(), pass: witness.is_none(), compared: lhs.compared_terms(rhs), witness }
    }

    fn error(identity: String, params: &Value, err: &Error) -> Self {
        Self {
            identity,
            params: params.clone(),
            pass: false,
            compared: 0,
            witness: Some(Witness { monomial: Vec::new(), lhs: err.code().into(), rhs: err.to_string() }),
        }
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "identity": self.identity,
            "params": self.params,
            "pass": self.pass,
            "compared": self.compared,
        });
        if let Some(w) = &self.witness {
            v["witness"] = json!({ "monomial": w.monomial, "lhs": w.lhs, "rhs": w.rhs });
        }
        v
    }
}

/// Universal series and its split for one chamber.
#[derive(Clone, Debug)]
pub struct UniversalSplit<C> {
    pub chamber: String,
    pub plus: TwistedSeries<C>,
    pub minus: TwistedSeries<C>,
}

/// Every series entering the main factorization theorem for one `(σ, r)`.
///
/// Fields are public so a caller can perturb one ingredient and watch the
/// corresponding check fail.
#[derive(Clone, Debug)]
pub struct TheoremInputs<C> {
    pub partition: Partition,
    pub r: u32,
    pub policy: TruncationPolicy,
    pub floored_policy: TruncationPolicy,
    pub pt_r: TwistedSeries<C>,
    pub dt_r: TwistedSeries<C>,
    /// Chamber products for `r = 1`.
    pub pt_1_chamber: TwistedSeries<C>,
    pub dt_1_chamber: TwistedSeries<C>,
    /// Closed rank-one products.
    pub pt_1: TwistedSeries<C>,
    pub dt_1: TwistedSeries<C>,
    pub z_im: TwistedSeries<C>,
    pub points_1: TwistedSeries<C>,
    pub points_r: TwistedSeries<C>,
    /// `(α, Z_α^(r), Z_α^(1))` for every root up to the truncation degree.
    pub per_root: Vec<(Root, TwistedSeries<C>, TwistedSeries<C>)>,
    pub universal: TwistedSeries<C>,
    pub splits: Vec<UniversalSplit<C>>,
}

impl<C: Scalar> TheoremInputs<C> {
    /// `policy.l_floor` (or [`DEFAULT_L_FLOOR`]) is used only for the universal
    /// series; everything else is exact.
    pub fn compute(partition: &Partition, r: u32, policy: TruncationPolicy) -> Result<Self> {
        let exact = TruncationPolicy { l_floor: None, ..policy };
        let floored = exact.with_l_floor(policy.l_floor.unwrap_or(DEFAULT_L_FLOOR));
        let q = Quiver::build(partition, r);
        let n = partition.n();
        let s_policy = TruncationPolicy::new(exact.max_total_degree / n as u32);

        let (rank_r, rank_1) =
            rayon::join(|| pt_dt_series::<C>(partition, r, exact), || pt_dt_series::<C>(partition, 1, exact));
        let ((pt_r, dt_r), (pt_1_chamber, dt_1_chamber)) = (rank_r?, rank_1?);
        let pt_1 = pt1_closed(&q, exact)?;
        let z_im = closed_rank1_form(Rank1Form::Imaginary, &q, exact)?;
        let dt_1 = z_im.mul(&pt_1)?;
        let points_1 = embed_points(&points_series(Geometry::Resolution(n), 1, s_policy), &q, exact);
        let points_r = embed_points(&points_series(Geometry::Resolution(n), r, s_policy), &q, exact);
        let per_root = roots_up_to_degree(n, exact.max_total_degree)
            .into_par_iter()
            .map(|a| {
                let zr = z_alpha_r(&a, r, &q, exact);
                let z1 = z_alpha_r(&a, 1, &q, exact);
                (a, zr, z1)
            })
            .collect();

        let universal = universal_series(&q, floored)?;
        let zetas = [("pt", StabilityParam::<num_rational::BigRational>::pt(n)), ("dt", StabilityParam::dt(n))];
        let splits = zetas
            .par_iter()
            .map(|(name, z)| {
                let plus = chamber_factor_series(&q, z, ChamberSign::Plus, floored)?;
                let minus = chamber_factor_series(&q, z, ChamberSign::Minus, floored)?;
                Ok(UniversalSplit { chamber: name.to_string(), plus, minus })
            })
            .collect::<Result<Vec<_>>>()?;

        Ok(Self {
            partition: partition.clone(),
            r,
            policy: exact,
            floored_policy: floored,
            pt_r,
            dt_r,
            pt_1_chamber,
            dt_1_chamber,
            pt_1,
            dt_1,
            z_im,
            points_1,
            points_r,
            per_root,
            universal,
            splits,
        })
    }

    fn params(&self) -> Value {
        json!({
            "partition": self.partition.to_string(),
            "r": self.r,
            "maxTotalDegree": self.policy.max_total_degree,
        })
    }

    pub fn check(&self) -> Vec<VerificationReport> {
        let params = self.params();
        let mut out = Vec::new();
        let mut push = |name: String, res: Result<(TwistedSeries<C>, TwistedSeries<C>)>, params: &Value| {
            out.push(match res {
                Ok((lhs, rhs)) => VerificationReport::compare(name, params, &lhs, &rhs),
                Err(e) => VerificationReport::error(name, params, &e),
            })
        };
        push("pt-factorization".into(), shifted_product(&self.pt_1, self.r).map(|rhs| (self.pt_r.clone(), rhs)), &params);
        push("dt-factorization".into(), shifted_product(&self.dt_1, self.r).map(|rhs| (self.dt_r.clone(), rhs)), &params);
        push("dt-pt-correspondence".into(), self.points_r.mul(&self.pt_r).map(|rhs| (self.dt_r.clone(), rhs)), &params);
        push("rank1-pt".into(), Ok((self.pt_1_chamber.clone(), self.pt_1.clone())), &params);
        push("rank1-dt".into(), Ok((self.dt_1_chamber.clone(), self.dt_1.clone())), &params);
        push("rank1-points".into(), Ok((self.z_im.clone(), self.points_1.clone())), &params);
        push("points-shifted".into(), shifted_product(&self.points_1, self.r).map(|rhs| (self.points_r.clone(), rhs)), &params);
        for (root, zr, z1) in &self.per_root {
            let r = self.r as i64;
            let lhs = zr.scale_by_unit(0, sign_pow(r), 0);
            // Z^(1)(-L^((-r-1)/2+i) y_0)
            let pieces: Vec<TwistedSeries<C>> = (1..=r).map(|i| z1.scale_by_unit(0, -1, -r - 1 + 2 * i)).collect();
            let rhs = TwistedSeries::product(self.policy, zr.pairing().clone(), &pieces).map(|rhs| (lhs, rhs));
            push(format!("root-factorization[{root}]"), rhs, &params);
        }
        let mut fparams = params.clone();
        fparams["lFloor"] = json!(self.floored_policy.l_floor);
        for s in &self.splits {
            let rhs = s.plus.mul(&s.minus).map(|rhs| (self.universal.clone(), rhs));
            push(format!("universal-split[{}]", s.chamber), rhs, &fparams);
        }
        out
    }
}

/// Runs every check of the main theorem for one `(σ, r)`.
pub fn verify_theorem<C: Scalar>(partition: &Partition, r: u32, policy: TruncationPolicy) -> Result<Vec<VerificationReport>> {
    Ok(TheoremInputs::<C>::compute(partition, r, policy)?.check())
}

/// Checks `A_U = A_ζ^+ · A_ζ^-` for an arbitrary generic `ζ`.
pub fn verify_universal_split<C: Scalar, Q: Field>(
    q: &Quiver,
    zeta: &StabilityParam<Q>,
    policy: TruncationPolicy,
) -> Result<VerificationReport> {
    let universal: TwistedSeries<C> = universal_series(q, policy)?;
    let plus: TwistedSeries<C> = chamber_factor_series(q, zeta, ChamberSign::Plus, policy)?;
    let minus = chamber_factor_series(q, zeta, ChamberSign::Minus, policy)?;
    let params = json!({
        "partition": q.partition().to_string(),
        "zeta": zeta.to_string(),
        "maxTotalDegree": policy.max_total_degree,
        "lFloor": policy.l_floor,
    });
    Ok(VerificationReport::compare("universal-split".into(), &params, &universal, &plus.mul(&minus)?))
}
