//! First-order equations `ρ(y) = a y + b`: standard forms, telescopers, the
//! multiplicative criterion and the complete rational/hypertranscendental decision.

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::json;

use crate::arith::dispersion::{dispersion, sigma_poly_inverse, strip_x};
use crate::arith::linalg::solve_particular;
use crate::arith::rat::{fmt_q, qpow};
use crate::arith::{CaseTag, Poly, RatFunc, Q};
use crate::error::{Error, Result};
use crate::ore::DiffOperator;
use crate::rationality::{
    hankel_profile, mahler_bounds_at_valuation, member_of, pade_match, rational_solution_space,
    SpaceConfig,
};
use crate::series::{expand_ratfunc, TruncatedSeries};
use crate::solver::{cleared, extend_prefix, minimal_prefix_order};
use crate::verdict::{Certificate, CertificateKind, Exactness, Outcome, Verdict};

/// `a = a_star · ρ(e)/e` with `a_star` standard.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StandardDecomposition {
    pub a_star: RatFunc,
    pub e: RatFunc,
}

fn no_mahler(case: &CaseTag) -> Result<()> {
    if case.is_mahler() {
        return Err(Error::UnsupportedCase(
            "Mahler first-order equations use the multiplicative criterion".into(),
        ));
    }
    Ok(())
}

fn orbit_product(u: &Poly, case: &CaseTag, l: u64) -> Poly {
    (1..=l).fold(Poly::one(), |acc, j| &acc * &sigma_poly_inverse(u, case, j))
}

/// First `l >= 1` with `gcd(f, σ^l g)` nonconstant (ignoring `x` in the q case).
fn first_clash(f: &Poly, g: &Poly, case: &CaseTag) -> Result<Option<(u64, Poly)>> {
    for l in dispersion(f, g, case)? {
        if l == 0 {
            continue;
        }
        let mut u = f.gcd(&case.sigma_poly(g, l as u32));
        if case.fixes_origin() {
            u = strip_x(&u);
        }
        if u.deg() > 0 {
            return Ok(Some((l, u)));
        }
    }
    Ok(None)
}

/// Whether no zero of `a` is a pole of `ρ^l(a)` and vice versa, for every `l >= 1`.
pub fn is_standard(a: &RatFunc, case: &CaseTag) -> Result<bool> {
    no_mahler(case)?;
    Ok(first_clash(a.num(), a.den(), case)?.is_none()
        && first_clash(a.den(), a.num(), case)?.is_none())
}

pub fn standard_decompose(a: &RatFunc, case: &CaseTag) -> Result<StandardDecomposition> {
    no_mahler(case)?;
    if a.is_zero() {
        return Err(Error::Semantic("standard decomposition of zero".into()));
    }
    let mut a_star = a.clone();
    let mut e = RatFunc::one();
    loop {
        if let Some((l, u)) = first_clash(a_star.num(), a_star.den(), case)? {
            // u | num, σ^{-l}(u) | den: a = (u / σ^{-l}u) · rest
            let w = RatFunc::from_poly(orbit_product(&u, case, l));
            e = &e * &w;
            a_star = (&a_star * &RatFunc::from_poly(sigma_poly_inverse(&u, case, l)))
                .checked_div(&RatFunc::from_poly(u))?;
            continue;
        }
        if let Some((l, u)) = first_clash(a_star.den(), a_star.num(), case)? {
            let w = RatFunc::from_poly(orbit_product(&u, case, l));
            e = e.checked_div(&w)?;
            a_star = (&a_star * &RatFunc::from_poly(u.clone()))
                .checked_div(&RatFunc::from_poly(sigma_poly_inverse(&u, case, l)))?;
            continue;
        }
        break;
    }
    if a * &e != &a_star * &e.sigma(case) {
        return Err(Error::Internal(
            "standard decomposition failed verification".into(),
        ));
    }
    Ok(StandardDecomposition { a_star, e })
}

/// `b = ρ(h) - a_star·h + d·x^r`; `r` is set only when `a_star = q^r` in the q case.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Telescoper {
    pub h: RatFunc,
    pub d: Q,
    pub r: Option<i64>,
}

/// Integer `r` with `q^r = c`, if any.
fn q_log(qv: &Q, c: &Q) -> Option<i64> {
    if !c.is_positive() && qv.is_positive() {
        return None;
    }
    let lq = qv.abs().to_f64()?.ln();
    let lc = c.abs().to_f64()?.ln();
    let r0 = (lc / lq).round() as i64;
    (r0 - 1..=r0 + 1).find(|r| qpow(qv, *r) == *c)
}

pub fn telescope_solve(
    a_star: &RatFunc,
    b: &RatFunc,
    case: &CaseTag,
) -> Result<Option<Telescoper>> {
    no_mahler(case)?;
    if b.is_zero() {
        return Ok(Some(Telescoper {
            h: RatFunc::zero(),
            d: Q::zero(),
            r: None,
        }));
    }
    let cfg = SpaceConfig::default();
    let op = DiffOperator::first_order(case.clone(), a_star.clone());
    let sp = rational_solution_space(&op, Some(b), &cfg)?;
    let resonant = match (case, a_star.as_constant()) {
        (CaseTag::QDiff { q: qv }, Some(c)) => q_log(qv, &c),
        _ => None,
    };
    if let Some(h) = sp.particular {
        return Ok(Some(Telescoper {
            h,
            d: Q::zero(),
            r: resonant,
        }));
    }
    let Some(r) = resonant else {
        return Ok(None);
    };
    // x^r spans the kernel of ρ - q^r; kill it and solve the composed equation
    let qr = qpow(&case_q(case), r);
    let m = DiffOperator::first_order(case.clone(), RatFunc::constant(qr.clone()));
    let b2 = &b.sigma(case) - &b.scale(&qr);
    let h = if b2.is_zero() {
        RatFunc::zero()
    } else {
        let op2 = m.mul(&op)?;
        match rational_solution_space(&op2, Some(&b2), &cfg)?.particular {
            Some(h) => h,
            None => return Ok(None),
        }
    };
    let rest = (b - &op.apply(&h)).checked_div(&RatFunc::x_pow(r))?;
    let d = rest
        .as_constant()
        .ok_or_else(|| Error::Internal("telescoper residual is not a monomial".into()))?;
    Ok(Some(Telescoper { h, d, r: Some(r) }))
}

fn case_q(case: &CaseTag) -> Q {
    match case {
        CaseTag::QDiff { q } => q.clone(),
        _ => unreachable!(),
    }
}

/// `a = c·x^α·ρ(g)/g` with `g` monic and coprime to `x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultWitness {
    pub c: Q,
    pub alpha: i64,
    pub g: RatFunc,
}

impl MultWitness {
    pub fn verify(&self, a: &RatFunc, case: &CaseTag) -> bool {
        a * &self.g == (&RatFunc::x_pow(self.alpha) * &self.g.sigma(case)).scale(&self.c)
    }
}

/// Mahler case. With `g` coprime to `x`, `α = val_0(a)`, `c` is the leading coefficient
/// and `deg g = (deg a - α)/(p - 1)` exactly, so the linear system below is the whole
/// search space.
pub fn mahler_mult_criterion(a: &RatFunc, p: u64) -> Result<Option<MultWitness>> {
    if a.is_zero() {
        return Err(Error::Semantic("multiplicative criterion for zero".into()));
    }
    let case = CaseTag::mahler(p)?;
    let (alpha, rest) = a.split_x_power();
    let deg = rest.degree().unwrap();
    if deg < 0 || deg % (p as i64 - 1) != 0 {
        return Ok(None);
    }
    let dg = (deg / (p as i64 - 1)) as usize;
    let c = rest.leading_coefficient();
    let n = rest.num();
    let dn = rest.den().scale(&c);
    // n·g(x) - c·den·g(x^p) = 0 with g monic of degree dg
    let col = |j: usize| -> Poly { &n.shift_up(j) - &dn.shift_up(p as usize * j) };
    let cols: Vec<Poly> = (0..=dg).map(col).collect();
    let rows = cols.iter().map(|c| c.coeffs().len()).max().unwrap_or(0);
    let m: Vec<Vec<Q>> = (0..rows)
        .map(|k| cols[..dg].iter().map(|c| c.coeff(k)).collect())
        .collect();
    let rhs: Vec<Q> = (0..rows).map(|k| -cols[dg].coeff(k)).collect();
    let Some(sol) = solve_particular(&m, &rhs, dg) else {
        return Ok(None);
    };
    let mut gc = sol;
    gc.push(Q::one());
    let w = MultWitness {
        c,
        alpha,
        g: RatFunc::from_poly(Poly::new(gc)),
    };
    if !w.verify(a, &case) {
        return Err(Error::Internal(
            "multiplicative witness failed verification".into(),
        ));
    }
    Ok(Some(w))
}

/// Multiplicative criterion in every case; shift and q go through the standard form,
/// which must be a constant (shift) or a monomial (q).
pub fn mult_criterion(a: &RatFunc, case: &CaseTag) -> Result<Option<MultWitness>> {
    if let CaseTag::Mahler { p } = case {
        return mahler_mult_criterion(a, *p);
    }
    let sd = standard_decompose(a, case)?;
    let (alpha, rest) = sd.a_star.split_x_power();
    let Some(c) = rest.as_constant() else {
        return Ok(None);
    };
    if case.is_shift() && alpha != 0 {
        return Ok(None);
    }
    // normalize g monic; constants cancel in ρ(g)/g
    let g = sd.e.scale(&sd.e.leading_coefficient().recip());
    let w = MultWitness { c, alpha, g };
    debug_assert!(w.verify(a, case));
    Ok(Some(w))
}

fn sigma_inverse_checked(b: &RatFunc, case: &CaseTag) -> Option<RatFunc> {
    match case {
        CaseTag::Mahler { p } => {
            let n = b.num().deflate(*p as usize)?;
            let d = b.den().deflate(*p as usize)?;
            Some(RatFunc::new(n, d))
        }
        _ => b.sigma_inverse(case),
    }
}

/// Options for the order-one decision.
#[derive(Clone, Debug)]
pub struct OrderOneConfig {
    pub truncation: i64,
    pub orbit_bound: i64,
}

impl Default for OrderOneConfig {
    fn default() -> Self {
        OrderOneConfig {
            truncation: 64,
            orbit_bound: 8,
        }
    }
}

fn rf(f: &RatFunc) -> String {
    f.render("x")
}

/// Checks that `w` reproduces `f` to its full truncation.
fn matches_prefix(w: &RatFunc, f: &TruncatedSeries) -> Result<bool> {
    let e = expand_ratfunc(w, f.case(), f.order())?;
    Ok(e.sub(f)?.is_zero())
}

/// Decides whether the solution of `ρ(y) = a y + b` fixed by `prefix` is rational.
///
/// Without a prefix (meromorphic shift case) the verdict concerns every solution and is
/// reported as conditional.
pub fn classify_order_one(
    a: &RatFunc,
    b: &RatFunc,
    case: &CaseTag,
    prefix: Option<&TruncatedSeries>,
    cfg: &OrderOneConfig,
) -> Result<Verdict> {
    let mut trace = vec![format!("order-one: case {}", case.spec_string())];
    if a.is_zero() {
        let w = sigma_inverse_checked(b, case).ok_or_else(|| {
            Error::Semantic("ρ(y) = b has no rational solution: b is not a σ-image".into())
        })?;
        if let Some(f) = prefix {
            let f = if f.order() > 0 {
                f.clone()
            } else {
                f.truncate(1)
            };
            if !matches_prefix(&w, &f)? {
                return Err(Error::InconsistentPrefix(f.start()));
            }
        }
        trace.push("a = 0: y = σ^{-1}(b)".into());
        return Ok(Verdict::rational(w, trace));
    }
    let op = DiffOperator::first_order(case.clone(), a.clone());
    let rhs = if b.is_zero() { None } else { Some(b) };
    let Some(prefix) = prefix else {
        return meromorphic(a, b, case, &op, trace);
    };
    if case.is_mahler() {
        return mahler_order_one(a, b, case, &op, prefix, cfg, trace);
    }
    let n = cfg
        .truncation
        .max(minimal_prefix_order(&op)? + 1)
        .max(prefix.order());
    let f = extend_prefix(&op, rhs, prefix, n)?;
    trace.push(format!("series-solver: extended to order {n}"));
    let sd = standard_decompose(a, case)?;
    let bt = b.checked_div(&sd.e.sigma(case))?;
    let tel = telescope_solve(&sd.a_star, &bt, case)?;
    trace.push(format!(
        "standard form: a* = {}, e = {}",
        rf(&sd.a_star),
        rf(&sd.e)
    ));
    let space = rational_solution_space(&op, rhs, &SpaceConfig::default())?;
    trace.push(format!(
        "rational solutions: particular {}, kernel dim {}",
        space.particular.as_ref().map_or("none".into(), rf),
        space.basis.len()
    ));
    if let Some(w) = member_of(&space, &f)? {
        if op.apply(&w) != *b || !matches_prefix(&w, &f)? {
            return Err(Error::Internal(
                "order-one witness failed verification".into(),
            ));
        }
        return Ok(Verdict::rational(w, trace));
    }
    let kind = if tel.is_none() {
        CertificateKind::TelescoperAbsent
    } else {
        CertificateKind::Order1Exact
    };
    let payload = json!({
        "a": rf(a),
        "b": rf(b),
        "a_star": rf(&sd.a_star),
        "e": rf(&sd.e),
        "b_tilde": rf(&bt),
        "telescoper": tel.as_ref().map(|t| json!({
            "h": rf(&t.h), "d": fmt_q(&t.d), "r": t.r,
        })),
        "rational_particular": space.particular.as_ref().map(rf),
        "rational_kernel": space.basis.iter().map(rf).collect::<Vec<_>>(),
        "universal_denominator": space.bounds.denominator,
        "exponent_range": [space.bounds.exponent_lo, space.bounds.exponent_hi],
        "membership_rows": f.order() - f.start(),
        "truncation": f.order(),
    });
    trace.push(format!("certificate {}", kind.as_str()));
    Ok(Verdict {
        outcome: Outcome::Hypertranscendental {
            certificate: Certificate { kind, payload },
        },
        exactness: Exactness::Exact,
        provenance: trace,
        ell: 1,
    })
}

/// Meromorphic shift case: no series, only the `K`-side analysis.
fn meromorphic(
    a: &RatFunc,
    b: &RatFunc,
    case: &CaseTag,
    op: &DiffOperator,
    mut trace: Vec<String>,
) -> Result<Verdict> {
    let sd = standard_decompose(a, case)?;
    let bt = b.checked_div(&sd.e.sigma(case))?;
    let tel = telescope_solve(&sd.a_star, &bt, case)?;
    let rhs = if b.is_zero() { None } else { Some(b) };
    let space = rational_solution_space(op, rhs, &SpaceConfig::default())?;
    let mult = mult_criterion(a, case)?;
    trace.push("prefix-free analysis over K".into());
    let payload = json!({
        "a_star": rf(&sd.a_star),
        "e": rf(&sd.e),
        "telescoper": tel.as_ref().map(|t| rf(&t.h)),
        "rational_particular": space.particular.as_ref().map(rf),
        "rational_kernel": space.basis.iter().map(rf).collect::<Vec<_>>(),
        "multiplicative_witness": mult.as_ref().map(|w| json!({"c": fmt_q(&w.c), "alpha": w.alpha, "g": rf(&w.g)})),
    });
    let cond = Exactness::Conditional(vec!["solution in an admissible meromorphic field".into()]);
    if tel.is_none() {
        return Ok(Verdict {
            outcome: Outcome::Hypertranscendental {
                certificate: Certificate {
                    kind: CertificateKind::TelescoperAbsent,
                    payload,
                },
            },
            exactness: cond,
            provenance: trace,
            ell: 1,
        });
    }
    if b.is_zero() && mult.is_none() {
        return Ok(Verdict {
            outcome: Outcome::Hypertranscendental {
                certificate: Certificate {
                    kind: CertificateKind::MahlerMultFail,
                    payload,
                },
            },
            exactness: cond,
            provenance: trace,
            ell: 1,
        });
    }
    Ok(Verdict {
        outcome: Outcome::Inconclusive { report: payload },
        exactness: cond,
        provenance: trace,
        ell: 1,
    })
}

#[allow(clippy::too_many_arguments)]
fn mahler_order_one(
    a: &RatFunc,
    b: &RatFunc,
    case: &CaseTag,
    op: &DiffOperator,
    prefix: &TruncatedSeries,
    cfg: &OrderOneConfig,
    mut trace: Vec<String>,
) -> Result<Verdict> {
    let rhs = if b.is_zero() { None } else { Some(b) };
    let n0 = cfg
        .truncation
        .max(minimal_prefix_order(op)? + 1)
        .max(prefix.order());
    let f = extend_prefix(op, rhs, prefix, n0)?;
    let Some(v) = f.valuation() else {
        if b.is_zero() {
            return Ok(Verdict::rational(RatFunc::zero(), trace));
        }
        return Err(Error::InconsistentPrefix(f.order()));
    };
    let (dd, dn) = mahler_bounds_at_valuation(op, rhs, v);
    let (c, _) = cleared(op);
    let cap = cfg.orbit_bound * c.last().unwrap().deg().max(1);
    let dd_used = dd.min(cap);
    let need = v + dn + dd_used + 2;
    let f = if f.order() < need {
        extend_prefix(op, rhs, prefix, need)?
    } else {
        f
    };
    trace.push(format!(
        "series-solver: extended to order {}; degree bounds den <= {dd}, num <= {dn}",
        f.order()
    ));
    let mult = if b.is_zero() {
        mult_criterion(a, case)?
    } else {
        None
    };
    if let Some(w) = pade_match(&f, dn as usize, dd_used as usize)? {
        if op.apply(&w) == *b {
            return Ok(Verdict::rational(w, trace));
        }
    }
    let hank = hankel_profile(&f, ((f.order() - v + 1) / 2).min(8) as usize).ok();
    let mut payload = json!({
        "a": rf(a),
        "b": rf(b),
        "valuation": v,
        "denominator_degree_bound": dd,
        "numerator_degree_bound": dn,
        "searched_denominator_degree": dd_used,
        "pade_system": {"unknowns": dd_used + 1, "equations": f.order() - v - dn - 1},
        "truncation": f.order(),
        "hankel_singular": hank.as_ref().map(|h| h.sizes.iter().map(|s| s.1).collect::<Vec<_>>()),
    });
    if b.is_zero() {
        payload["multiplicative_witness"] = json!(mult
            .as_ref()
            .map(|w| json!({"c": fmt_q(&w.c), "alpha": w.alpha, "g": rf(&w.g)})));
    }
    let (kind, exactness) = if b.is_zero() && mult.is_none() {
        (CertificateKind::MahlerMultFail, Exactness::Exact)
    } else if dd <= cap {
        (CertificateKind::Order1Exact, Exactness::Exact)
    } else {
        (
            CertificateKind::NoRationalMatch,
            Exactness::Conditional(vec![
                format!("B={}", cfg.orbit_bound),
                format!("N={}", f.order()),
            ]),
        )
    };
    trace.push(format!("certificate {}", kind.as_str()));
    Ok(Verdict {
        outcome: Outcome::Hypertranscendental {
            certificate: Certificate { kind, payload },
        },
        exactness,
        provenance: trace,
        ell: 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat::{q, qf};

    fn p(c: &[i64]) -> RatFunc {
        RatFunc::from_poly(Poly::from_i64(c))
    }

    #[test]
    fn decompositions() {
        let s = CaseTag::shift(q(1)).unwrap();
        let a = RatFunc::new(Poly::x(), Poly::from_i64(&[2, 1]));
        let d = standard_decompose(&a, &s).unwrap();
        assert_eq!(d.a_star, RatFunc::one());
        assert_eq!(d.e, RatFunc::new(Poly::one(), Poly::from_i64(&[0, 1, 1])));
        let d = standard_decompose(&RatFunc::x(), &s).unwrap();
        assert_eq!((d.a_star, d.e), (RatFunc::x(), RatFunc::one()));
        let q2 = CaseTag::qdiff(q(2)).unwrap();
        let d = standard_decompose(&RatFunc::constant(qf(1, 4)), &q2).unwrap();
        assert_eq!(d.e, RatFunc::one());
        assert!(matches!(
            standard_decompose(&a, &CaseTag::mahler(2).unwrap()),
            Err(Error::UnsupportedCase(_))
        ));
        // a product mixing both directions
        let a = RatFunc::new(Poly::from_i64(&[3, 1]), Poly::from_i64(&[0, 1]));
        let d = standard_decompose(&a, &s).unwrap();
        assert!(is_standard(&d.a_star, &s).unwrap());
        assert!(d.a_star.is_constant());
    }

    #[test]
    fn telescopers() {
        let s = CaseTag::shift(q(1)).unwrap();
        let t = telescope_solve(&RatFunc::one(), &p(&[1]), &s)
            .unwrap()
            .unwrap();
        assert_eq!(t.h, RatFunc::x());
        let t = telescope_solve(&RatFunc::one(), &p(&[0, 1]), &s)
            .unwrap()
            .unwrap();
        assert_eq!(
            t.h,
            RatFunc::from_poly(Poly::new(vec![q(0), qf(-1, 2), qf(1, 2)]))
        );
        assert_eq!(
            telescope_solve(&RatFunc::one(), &RatFunc::x_pow(-1), &s).unwrap(),
            None
        );
        // q case with a* = q: x is not reachable, so b = x needs d = 1
        let q2 = CaseTag::qdiff(q(2)).unwrap();
        let t = telescope_solve(&RatFunc::from_i64(2), &p(&[1, 1]), &q2)
            .unwrap()
            .unwrap();
        assert_eq!(t.r, Some(1));
        assert_eq!(t.d, q(1));
        assert_eq!(t.h, RatFunc::from_i64(-1));
    }

    #[test]
    fn multiplicative() {
        let w = mahler_mult_criterion(&RatFunc::x(), 2).unwrap().unwrap();
        assert_eq!(
            (w.c.clone(), w.alpha, w.g.clone()),
            (q(1), 1, RatFunc::one())
        );
        let w = mahler_mult_criterion(&p(&[1, 1]), 2).unwrap().unwrap();
        assert_eq!((w.c.clone(), w.alpha, w.g.clone()), (q(1), 0, p(&[-1, 1])));
        assert_eq!(mahler_mult_criterion(&p(&[-3, 1]), 2).unwrap(), None);
        let q2 = CaseTag::qdiff(q(2)).unwrap();
        let w = mult_criterion(&p(&[0, 2]), &q2).unwrap().unwrap();
        assert_eq!(
            (w.c.clone(), w.alpha, w.g.clone()),
            (q(2), 1, RatFunc::one())
        );
    }

    #[test]
    fn order_one_verdicts() {
        let cfg = OrderOneConfig::default();
        let m = CaseTag::mahler(2).unwrap();
        let pre = TruncatedSeries::from_terms(m.clone(), 1, &[(1, q(1))], 2).unwrap();
        let v = classify_order_one(&RatFunc::one(), &p(&[0, -1]), &m, Some(&pre), &cfg).unwrap();
        assert!(v.is_hypertranscendental());
        assert_eq!(v.exactness, Exactness::Exact);
        let pre = TruncatedSeries::from_terms(m.clone(), 1, &[(0, q(5))], 1).unwrap();
        let v =
            classify_order_one(&RatFunc::one(), &RatFunc::zero(), &m, Some(&pre), &cfg).unwrap();
        assert_eq!(v.witness(), Some(&RatFunc::from_i64(5)));
        let s = CaseTag::shift(q(1)).unwrap();
        let pre = expand_ratfunc(&RatFunc::x(), &s, 3).unwrap();
        let v = classify_order_one(&RatFunc::one(), &p(&[1]), &s, Some(&pre), &cfg).unwrap();
        assert_eq!(v.witness(), Some(&RatFunc::x()));
        // Δy = 1/x^2 at infinity: a trigamma-type series
        let pre = TruncatedSeries::from_terms(s.clone(), 1, &[(1, q(-1))], 2).unwrap();
        let v =
            classify_order_one(&RatFunc::one(), &RatFunc::x_pow(-2), &s, Some(&pre), &cfg).unwrap();
        assert!(v.is_hypertranscendental());
        assert_eq!(
            v.certificate().unwrap().kind,
            CertificateKind::TelescoperAbsent
        );
        // a = 0
        let v = classify_order_one(&RatFunc::zero(), &p(&[1, 1]), &s, None, &cfg).unwrap();
        assert_eq!(v.witness(), Some(&RatFunc::x()));
    }
}
