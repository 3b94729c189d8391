//! End-to-end acceptance suite. Each test prints one `PASS`/`FAIL` line.

use std::io::Write;
use std::time::{Duration, Instant};

use motivic_dtpt::dt::{
    closed_rank1_form, compare_strategies, points_series, pt_dt, verify_universal_split, ChamberSeriesRequest, Geometry,
    Rank1Form, TheoremInputs,
};
use motivic_dtpt::plethystic::{euler_product_decompose, motive_power_signed, plethystic_exp};
use motivic_dtpt::roots::{chamber_split, enumerate_roots, RootKind};
use motivic_dtpt::{
    InfinitesimalRational, Monomial, Motive, PairingMatrix, Partition, Quiver, Root, Series, TruncationPolicy, Zeta,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

fn report(id: u32, name: &str, outcome: Result<String, String>) {
    let line = match &outcome {
        Ok(detail) => format!("PASS criterion {id}: {name} ({detail})"),
        Err(detail) => format!("FAIL criterion {id}: {name} ({detail})"),
    };
    let mut out = std::io::stdout().lock();
    writeln!(out, "{line}").unwrap();
    out.flush().unwrap();
    if let Err(detail) = outcome {
        panic!("criterion {id} failed: {detail}");
    }
}

fn partitions_up_to(max_n: usize) -> Vec<Partition> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        for n1 in 0..=n / 2 {
            out.extend(Partition::enumerate(n - n1, n1).unwrap());
        }
    }
    out
}

fn grid(max_n: usize, rs: &[u32]) -> Vec<(Partition, u32)> {
    partitions_up_to(max_n).into_iter().flat_map(|p| rs.iter().map(move |&r| (p.clone(), r))).collect()
}

/// Runs the theorem checks on the grid and keeps the reports whose identity matches.
fn theorem_grid(identities: &[&str]) -> (Result<String, String>, Duration) {
    let start = Instant::now();
    let results: Vec<Result<usize, String>> = grid(4, &[1, 2, 3])
        .par_iter()
        .map(|(p, r)| {
            let policy = TruncationPolicy::new(4 * p.n() as u32);
            let inputs = TheoremInputs::<BigInt>::compute(p, *r, policy).map_err(|e| format!("{p} r={r}: {e}"))?;
            let mut compared = 0;
            for rep in inputs.check().iter().filter(|rep| identities.contains(&rep.identity.as_str())) {
                if !rep.pass {
                    return Err(format!("{p} r={r}: {} failed: {:?}", rep.identity, rep.witness));
                }
                compared += rep.compared;
            }
            Ok(compared)
        })
        .collect();
    let elapsed = start.elapsed();
    let outcome = results.into_iter().collect::<Result<Vec<_>, _>>().map(|counts| {
        format!("{} configurations, {} coefficients compared", counts.len(), counts.iter().sum::<usize>())
    });
    (outcome, elapsed)
}

#[test]
fn criterion_01_theorem_factorizations() {
    let (outcome, elapsed) = theorem_grid(&["pt-factorization", "dt-factorization"]);
    let outcome = outcome.and_then(|s| {
        if elapsed < Duration::from_secs(300) {
            Ok(format!("{s}, {:.1}s", elapsed.as_secs_f64()))
        } else {
            Err(format!("took {:.1}s, limit 300s", elapsed.as_secs_f64()))
        }
    });
    report(1, "PT_r and DT_r equal shifted products of rank-one series, N <= 4, r <= 3, s-degree <= 4", outcome);
}

#[test]
fn criterion_02_dt_pt_correspondence() {
    let (outcome, _) = theorem_grid(&["dt-pt-correspondence"]);
    report(2, "DT_r = DT_r^points * PT_r on the same grid", outcome);
}

#[test]
fn criterion_03_per_root_factorization() {
    let results: Vec<Result<usize, String>> = grid(4, &[1, 2, 3])
        .par_iter()
        .map(|(p, r)| {
            let n = p.n();
            let q = Quiver::build(p, *r);
            let roots = enumerate_roots(n, 4);
            let d = roots.iter().map(Root::degree).max().unwrap_or(0);
            let policy = TruncationPolicy::new(d);
            let r = *r as i64;
            let mut checked = 0;
            for a in &roots {
                let zr: Series = motivic_dtpt::dt::z_alpha_r(a, r as u32, &q, policy);
                let z1: Series = motivic_dtpt::dt::z_alpha_r(a, 1, &q, policy);
                let lhs = zr.scale_variable(0, &Motive::constant(BigInt::from(if r % 2 == 0 { 1 } else { -1 }))).unwrap();
                let pieces: Vec<Series> = (1..=r)
                    .map(|i| z1.scale_variable(0, &Motive::term(-r - 1 + 2 * i, BigInt::from(-1))).unwrap())
                    .collect();
                let rhs = Series::product(policy, q.pairing(), &pieces).unwrap();
                if let Some((m, x, y)) = lhs.first_difference(&rhs) {
                    return Err(format!("{p} r={r} root {a}: {:?} {x} vs {y}", m.dims));
                }
                checked += 1;
            }
            Ok(checked)
        })
        .collect();
    let outcome = results
        .into_iter()
        .collect::<Result<Vec<_>, _>>()
        .map(|v| format!("{} root identities", v.iter().sum::<usize>()));
    report(3, "per-root rank-r factorization, alpha_0 <= 4, r <= 3", outcome);
}

fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(num.into(), den.into())
}

/// Random stability parameters, generic on every root up to `max_degree`.
fn random_generic_zetas(n: usize, count: usize, max_degree: u32, rng: &mut StdRng) -> Vec<Zeta> {
    let roots = motivic_dtpt::roots::roots_up_to_degree(n, max_degree);
    let mut out = Vec::new();
    while out.len() < count {
        let entries = (0..n)
            .map(|_| {
                let q = rat(rng.random_range(-12..=12), rng.random_range(1..=4));
                let e = rat(rng.random_range(-3..=3), 1);
                InfinitesimalRational::new(q, e)
            })
            .collect();
        let z = Zeta::new(entries);
        if chamber_split(&roots, &z).unwrap().is_generic() {
            out.push(z);
        }
    }
    out
}

fn chamber_grid(rng: &mut StdRng) -> Vec<(Partition, Zeta)> {
    let mut out = Vec::new();
    for p in partitions_up_to(3) {
        let n = p.n();
        out.push((p.clone(), Zeta::pt(n)));
        out.push((p.clone(), Zeta::dt(n)));
        for z in random_generic_zetas(n, 20, 3 * n as u32, rng) {
            out.push((p.clone(), z));
        }
    }
    out
}

#[test]
fn criterion_04_universal_split() {
    let mut rng = StdRng::seed_from_u64(4);
    let cases = chamber_grid(&mut rng);
    let results: Vec<Result<usize, String>> = cases
        .par_iter()
        .map(|(p, z)| {
            let q = Quiver::build(p, 0);
            let policy = TruncationPolicy::new(3 * p.n() as u32).with_l_floor(-12);
            let rep = verify_universal_split::<BigInt, _>(&q, z, policy).map_err(|e| e.to_string())?;
            if rep.pass && rep.compared > 0 {
                Ok(rep.compared)
            } else {
                Err(format!("{p} zeta={z}: {:?}", rep.witness))
            }
        })
        .collect();
    let outcome = results.into_iter().collect::<Result<Vec<_>, _>>().map(|v| {
        format!("{} chambers, {} coefficients compared", v.len(), v.iter().sum::<usize>())
    });
    report(4, "A_U = A^+ A^- for standard and 20 random generic zeta, N <= 3, degree <= 3N, floor -12", outcome);
}

#[test]
fn criterion_05_strategy_agreement() {
    let mut rng = StdRng::seed_from_u64(5);
    let cases: Vec<(Partition, Zeta, u32)> = chamber_grid(&mut rng)
        .into_iter()
        .flat_map(|(p, z)| (1..=3).map(move |r| (p.clone(), z.clone(), r)))
        .collect();
    let results: Vec<Result<usize, String>> = cases
        .par_iter()
        .map(|(p, z, r)| {
            let policy = TruncationPolicy::new(3 * p.n() as u32).with_l_floor(-12);
            let req = ChamberSeriesRequest {
                partition: p.clone(),
                r: *r,
                zeta: z.clone(),
                policy,
                strategy: motivic_dtpt::dt::Strategy::Both,
            };
            let cmp = compare_strategies::<BigInt, _>(&req).map_err(|e| e.to_string())?;
            if let Some((m, a, b)) = cmp.witness {
                return Err(format!("{p} r={r} zeta={z}: {:?} closed {a} ratio {b}", m.dims));
            }
            let known: usize = cmp.closed.terms().map(|(_, c)| c.num_terms()).sum();
            if cmp.compared < known {
                return Err(format!("{p} r={r} zeta={z}: closed terms fell below the floor"));
            }
            Ok(cmp.compared)
        })
        .collect();
    let outcome = results.into_iter().collect::<Result<Vec<_>, _>>().map(|v| {
        format!("{} cases, {} coefficients compared", v.len(), v.iter().sum::<usize>())
    });
    report(5, "closed product equals truncated ratio above the floor", outcome);
}

#[test]
fn criterion_06_power_structure() {
    let mut checked = 0;
    let mut outcome = Ok(());
    // [Y_σ] = L^3 + (N-1) L^2, so L^-3 [Y_σ] = 1 + (N-1) L^-1
    'grid: for n in 1..=4i64 {
        let y_class = Motive::from_terms([(6, BigInt::from(1)), (4, BigInt::from(n - 1))]);
        let exponent = &y_class * &Motive::term(-6, BigInt::from(1));
        for r in 1..=3u32 {
            let policy = TruncationPolicy::new(6);
            let affine: Series = points_series(Geometry::Affine3, r, policy);
            let sign = if r % 2 == 0 { 1 } else { -1 };
            let lhs = motive_power_signed(&affine, &exponent, 0, sign).unwrap();
            let rhs: Series = points_series(Geometry::Resolution(n as usize), r, policy);
            if lhs != rhs {
                outcome = Err(format!("N={n} r={r}: {:?}", lhs.first_difference(&rhs)));
                break 'grid;
            }
            checked += 1;
        }
    }
    report(6, "points(A^3, r)^(1+(N-1)/L) = points(Y, r), N <= 4, r <= 3, s-degree <= 6", outcome.map(|_| format!("{checked} cases")));
}

// Plane partitions of n, by brute-force enumeration of stacked rows.
fn plane_partitions(n: usize) -> usize {
    fn partitions_below(total: usize, max_part: usize, bound: &[usize], idx: usize, out: &mut Vec<Vec<usize>>, cur: &mut Vec<usize>) {
        if total == 0 {
            out.push(cur.clone());
            return;
        }
        let limit = bound.get(idx).copied().unwrap_or(0).min(max_part).min(total);
        for part in (1..=limit).rev() {
            cur.push(part);
            partitions_below(total - part, part, bound, idx + 1, out, cur);
            cur.pop();
        }
    }
    fn count(remaining: usize, prev: &[usize]) -> usize {
        if remaining == 0 {
            return 1;
        }
        let mut total = 0;
        for size in 1..=remaining {
            let mut rows = Vec::new();
            partitions_below(size, usize::MAX, prev, 0, &mut rows, &mut Vec::new());
            for row in rows {
                total += count(remaining - size, &row);
            }
        }
        total
    }
    count(n, &[usize::MAX; 64])
}

#[test]
fn criterion_07_euler_specializations() {
    let mut problems = Vec::new();

    let plane: Vec<i64> = (0..=5).map(|n| plane_partitions(n) as i64).collect();
    if plane != [1, 1, 3, 6, 13, 24] {
        problems.push(format!("plane partition oracle gave {plane:?}"));
    }
    let points: Series = points_series(Geometry::Affine3, 1, TruncationPolicy::new(5));
    let points_y: Series = points_series(Geometry::Resolution(1), 1, TruncationPolicy::new(5));
    for k in 0..=5u32 {
        let c = points.coefficient(&Monomial::new(vec![k])).euler_specialize().unwrap();
        let expect = BigInt::from(if k % 2 == 0 { plane[k as usize] } else { -plane[k as usize] });
        if c != expect {
            problems.push(format!("points s^{k}: {c} vs {expect}"));
        }
        if points_y.coefficient(&Monomial::new(vec![k])) != points.coefficient(&Monomial::new(vec![k])) {
            problems.push(format!("N = 1 resolution differs from affine space at s^{k}"));
        }
    }
    let q1 = Quiver::build(&Partition::parse(1, 0, "B").unwrap(), 1);
    let z_im: Series = closed_rank1_form(Rank1Form::Imaginary, &q1, TruncationPolicy::new(5)).unwrap();
    if z_im.first_difference(&points).is_some() {
        problems.push("Z_im differs from the points series for N = 1".into());
    }

    // ∏_m (1 - (-s)^m T)^m, expanded over integers as a map (a, b) -> coefficient of s^a T^b
    let max_s = 5i64;
    let mut classical = std::collections::BTreeMap::from([((0i64, 0i64), BigInt::from(1))]);
    for m in 1..=max_s {
        let sign = if m % 2 == 0 { 1 } else { -1 };
        for _ in 0..m {
            let mut next = classical.clone();
            for (&(a, b), c) in &classical {
                if a + m <= max_s {
                    *next.entry((a + m, b + 1)).or_insert_with(|| BigInt::from(0)) -= c * BigInt::from(sign);
                }
            }
            classical = next;
        }
    }
    let conifold = Partition::parse(1, 1, "BT").unwrap();
    let degree = 2 * max_s as u32 + max_s as u32;
    let (pt, _) = pt_dt::<BigInt>(&conifold, 1, TruncationPolicy::new(degree)).unwrap();
    let mut compared = 0;
    for a in 0..=max_s {
        for b in 0..=max_s {
            let got = pt.coefficient(&[a, b]).euler_specialize().unwrap();
            let want = classical.get(&(a, b)).cloned().unwrap_or_default();
            if got != want {
                problems.push(format!("conifold PT s^{a} T^{b}: {got} vs {want}"));
            }
            compared += 1;
        }
    }
    let outcome = if problems.is_empty() {
        Ok(format!("6 points coefficients, {compared} PT coefficients"))
    } else {
        Err(problems.join("; "))
    };
    report(7, "Euler specializations match plane partitions and the classical conifold product", outcome);
}

#[test]
fn criterion_08_parity_pinning() {
    let mut checked = 0;
    let mut problems = Vec::new();
    for p in partitions_up_to(6) {
        let n = p.n();
        let q = Quiver::build(&p, 0);
        let profile = q.curve_profile();
        for a in 1..n {
            for b in a..n {
                let c = profile.c(a, b).unwrap();
                for k in 0..=6u32 {
                    let mut kinds = vec![RootKind::RealPlus { a, b, n: k }];
                    if k >= 1 {
                        kinds.push(RootKind::RealMinus { a, b, n: k });
                    }
                    for kind in kinds {
                        let root = Root::new(kind, n).unwrap();
                        let off_loop: u32 = root.dims().iter().enumerate().filter(|(v, _)| !q.has_loop(*v)).map(|(_, d)| d).sum();
                        if off_loop % 2 != (c % 2) as u32 || root.is_odd(&q) != (c % 2 == 1) {
                            problems.push(format!("{p} root {root}: parity {off_loop} vs c = {c}"));
                        }
                        checked += 1;
                    }
                }
            }
        }
    }
    let mut counted = 0;
    for p in partitions_up_to(8) {
        let non_loop = p.n() - p.loop_vertices().len();
        if non_loop % 2 != 0 {
            problems.push(format!("{p}: {non_loop} non-loop vertices"));
        }
        counted += 1;
    }
    let outcome = if problems.is_empty() {
        Ok(format!("{checked} root parities, {counted} partitions"))
    } else {
        Err(problems.join("; "))
    };
    report(8, "parity pinning for N <= 6, even non-loop count for N <= 8", outcome);
}

#[test]
fn criterion_09_plethystic_round_trip() {
    let mut rng = StdRng::seed_from_u64(9);
    let policy = TruncationPolicy::new(6);
    let pairing = std::sync::Arc::new(PairingMatrix::zero(2));
    let mut problems = Vec::new();
    for case in 0..50 {
        let terms: Vec<(Monomial, Motive)> = (0..rng.random_range(1..6))
            .map(|_| {
                let a = rng.random_range(0..4u32);
                let b = rng.random_range(if a == 0 { 1 } else { 0 }..4u32);
                let coeff = Motive::from_terms(
                    (0..rng.random_range(1..3)).map(|_| (rng.random_range(-4..5i64), BigInt::from(rng.random_range(-3..4i64)))),
                );
                (Monomial::new(vec![a, b]), coeff)
            })
            .collect();
        let f = Series::from_terms(terms, policy, pairing.clone());
        let exp = plethystic_exp(&f).unwrap();
        let d = euler_product_decompose(&exp).unwrap();
        let log = Series::from_terms(
            d.factors.iter().map(|x| (Monomial::new(x.exps.clone()), Motive::term(x.half_l, BigInt::from(x.exponent)))),
            policy,
            pairing.clone(),
        );
        if log != f {
            problems.push(format!("case {case}: decompose(Exp f) != f"));
        }
        if plethystic_exp(&log).unwrap() != exp {
            problems.push(format!("case {case}: Exp(decompose A) != A"));
        }
    }
    let outcome = if problems.is_empty() { Ok("50 series".to_string()) } else { Err(problems.join("; ")) };
    report(9, "decompose and Exp are mutually inverse, degree <= 6", outcome);
}

#[test]
fn criterion_10_standard_chambers() {
    let mut problems = Vec::new();
    let mut checked = 0;
    for n in 1..=8 {
        let roots = enumerate_roots(n, 8);
        let plus: Vec<Root> = roots.iter().filter(|r| matches!(r.kind(), RootKind::RealPlus { .. })).cloned().collect();
        let plus_im: Vec<Root> = roots
            .iter()
            .filter(|r| matches!(r.kind(), RootKind::RealPlus { .. } | RootKind::Imaginary { .. }))
            .cloned()
            .collect();
        let pt = chamber_split(&roots, &Zeta::pt(n)).unwrap();
        let dt = chamber_split(&roots, &Zeta::dt(n)).unwrap();
        if !pt.is_generic() || !dt.is_generic() {
            problems.push(format!("N={n}: standard parameter on a wall"));
        }
        if pt.negative() != plus {
            problems.push(format!("N={n}: PT chamber set differs"));
        }
        if dt.negative() != plus_im {
            problems.push(format!("N={n}: DT chamber set differs"));
        }
        checked += roots.len();
    }
    let outcome = if problems.is_empty() { Ok(format!("{checked} roots")) } else { Err(problems.join("; ")) };
    report(10, "standard PT/DT chamber sets, N <= 8, nMax = 8", outcome);
}
