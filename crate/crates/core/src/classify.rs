//! The top-level decision: is the solution pinned by a prefix rational, or
//! hypertranscendental? Plus rigorous evaluation of Mahler functions.

use num_traits::{One, Signed, Zero};
use serde_json::json;

use crate::arith::rat::{fmt_q, q, to_decimal};
use crate::arith::{CaseTag, RatFunc, Q};
use crate::error::{Error, Result};
use crate::order_one::{classify_order_one, OrderOneConfig};
use crate::ore::DiffOperator;
use crate::rationality::{
    hankel_profile, homogenize, mahler_bounds_at_valuation, member_of, pade_match, rational_match,
    rational_solution_space, SpaceConfig,
};
use crate::series::{expand_ratfunc, TruncatedSeries};
use crate::solver::{cleared, deramified, extend_prefix, minimal_prefix_order};
use crate::verdict::{Certificate, CertificateKind, Exactness, Outcome, Verdict};

#[derive(Clone, Debug)]
pub struct ClassifyConfig {
    /// Series truncation `N`.
    pub truncation: i64,
    /// Degree `d` of the Padé cross-check.
    pub degree_bound: usize,
    /// Mahler denominator cap multiplier `B`.
    pub orbit_bound: i64,
    /// Iterates `ρ^r` whose verdicts must agree.
    pub iterate: Vec<u32>,
    pub seed: u64,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig {
            truncation: 64,
            degree_bound: 16,
            orbit_bound: 8,
            iterate: vec![1, 2],
            seed: 0,
        }
    }
}

impl ClassifyConfig {
    fn space(&self) -> SpaceConfig {
        SpaceConfig {
            degree_cap: 4 * self.truncation.max(16),
            orbit_bound: self.orbit_bound,
            truncation: self.truncation,
        }
    }

    fn order_one(&self) -> OrderOneConfig {
        OrderOneConfig {
            truncation: self.truncation,
            orbit_bound: self.orbit_bound,
        }
    }
}

fn rf(f: &RatFunc) -> String {
    f.render("x")
}

/// Classifies the solution of `op y = rhs` whose expansion starts with `prefix`.
pub fn classify_equation(
    op: &DiffOperator,
    rhs: Option<&RatFunc>,
    prefix: &TruncatedSeries,
    cfg: &ClassifyConfig,
) -> Result<Verdict> {
    if op.is_zero() {
        return Err(Error::Semantic("zero operator".into()));
    }
    let ell = prefix.ell();
    let (zop, zrhs, zpre) = deramified(op, rhs, prefix)?;
    let rhs = zrhs.filter(|b| !b.is_zero());
    let mut verdict = classify_core(&zop, rhs.as_ref(), &zpre, cfg)?;
    if ell > 1 {
        verdict
            .provenance
            .insert(0, format!("de-ramified with x = z^{ell}"));
    }
    verdict.ell = ell;
    let base = verdict.outcome.label();
    let witness = match &verdict.outcome {
        Outcome::Rational { witness } => Some(witness.clone()),
        _ => None,
    };
    for &r in cfg.iterate.iter().filter(|&&r| r > 1) {
        match iterated(&zop, rhs.as_ref(), &zpre, r, witness.as_ref(), cfg) {
            Ok(v) => {
                let other = v.outcome.label();
                if base != "INCONCLUSIVE" && other != "INCONCLUSIVE" && base != other {
                    return Err(Error::Internal(format!(
                        "verdicts disagree between ρ ({base}) and ρ^{r} ({other})"
                    )));
                }
                verdict.provenance.push(format!("iterate r={r}: {other}"));
            }
            Err(e @ Error::Internal(_)) => return Err(e),
            Err(e) => verdict
                .provenance
                .push(format!("iterate r={r}: skipped ({e})")),
        }
    }
    Ok(verdict)
}

/// Re-classifies against a homogeneous operator in `ρ^r` annihilating the same series.
fn iterated(
    op: &DiffOperator,
    rhs: Option<&RatFunc>,
    prefix: &TruncatedSeries,
    r: u32,
    witness: Option<&RatFunc>,
    cfg: &ClassifyConfig,
) -> Result<Verdict> {
    let (stripped, k) = op.strip_rho_power();
    if k > 0 {
        return Err(Error::UnsupportedCase(
            "iteration after stripping ρ-powers".into(),
        ));
    }
    let h = match rhs {
        Some(b) => homogenize(&stripped, b)?,
        None => stripped,
    };
    let sys = h.companion_matrix()?.iterate(r);
    let mut e1 = vec![RatFunc::zero(); sys.dim()];
    e1[0] = RatFunc::one();
    let lr = sys.minimal_operator(&e1)?;
    if let Some(w) = witness {
        // a verified rational solution settles ρ^r too; only its annihilation is checked
        return if lr.apply(w).is_zero() {
            Ok(Verdict::rational(
                w.clone(),
                vec![format!("witness annihilated by the ρ^{r} operator")],
            ))
        } else {
            Err(Error::Internal(format!(
                "witness not annihilated by the ρ^{r} operator"
            )))
        };
    }
    let n = cfg
        .truncation
        .max(minimal_prefix_order(&lr)? + 1)
        .max(minimal_prefix_order(op)? + 1);
    let f = extend_prefix(op, rhs, prefix, n)?;
    let f = TruncatedSeries::new(
        lr.case().clone(),
        1,
        f.start(),
        f.coeffs().to_vec(),
        f.order(),
    )?;
    let mut sub = cfg.clone();
    sub.iterate = vec![1];
    classify_core(&lr, None, &f, &sub)
}

/// Extra terms past the pinned order used for the membership test.
const MEMBERSHIP_SLACK: i64 = 8;

fn classify_core(
    op: &DiffOperator,
    rhs: Option<&RatFunc>,
    prefix: &TruncatedSeries,
    cfg: &ClassifyConfig,
) -> Result<Verdict> {
    let case = op.case().clone();
    let (stripped, k) = op.strip_rho_power();
    if k > 0 {
        // L = L'ρ^k: classify g = σ^k(f), then pull back
        let n = cfg.truncation.max(prefix.order());
        let f = extend_prefix(op, rhs, prefix, n + minimal_prefix_order(&stripped)?.max(0))?;
        let g = f.sigma_pow(k as u32)?;
        let mut v = classify_core(&stripped, rhs, &g, cfg)?;
        v.provenance.insert(0, format!("stripped ρ^{k}"));
        if let Outcome::Rational { witness } = &v.outcome {
            let mut w = witness.clone();
            for _ in 0..k {
                w = pull_back(&w, &case)
                    .ok_or_else(|| Error::Internal("rational σ^k(f) without rational f".into()))?;
            }
            verify_witness(op, rhs, &w, &f)?;
            v.outcome = Outcome::Rational { witness: w };
        }
        return Ok(v);
    }
    if op.order() == 1 {
        let c = op.coeffs();
        let a = -&c[0].checked_div(&c[1])?;
        let b = rhs
            .map(|b| b.checked_div(&c[1]))
            .transpose()?
            .unwrap_or_else(RatFunc::zero);
        let mut v = classify_order_one(&a, &b, &case, Some(prefix), &cfg.order_one())?;
        v.provenance
            .insert(0, "order one: first-order certificates".into());
        if let Outcome::Rational { witness } = &v.outcome {
            let f = extend_prefix(op, rhs, prefix, cfg.truncation.max(prefix.order()))?;
            verify_witness(op, rhs, witness, &f)?;
        }
        return Ok(v);
    }
    let pinned = (minimal_prefix_order(op)? + 1).max(prefix.order());
    let n = cfg.truncation.max(pinned);
    if case.is_mahler() {
        let f = extend_prefix(op, rhs, prefix, n)?;
        let trace = vec![format!("series-solver: extended to order {n}")];
        return mahler_general(op, rhs, prefix, f, cfg, trace);
    }
    let mut trace = Vec::new();
    let space = match rational_solution_space(op, rhs, &cfg.space()) {
        Ok(s) => s,
        Err(Error::DegreeBoundExceeded { needed, cap }) => {
            trace.push(format!(
                "rational solutions: degree range {needed} exceeds cap {cap}"
            ));
            return Ok(Verdict {
                outcome: Outcome::Inconclusive {
                    report: json!({"reason": "degree bound exceeded", "needed": needed, "cap": cap}),
                },
                exactness: Exactness::Conditional(vec![format!("degree cap {cap}")]),
                provenance: trace,
                ell: 1,
            });
        }
        Err(e) => return Err(e),
    };
    trace.push(format!(
        "rational solutions: particular {}, kernel dim {}, denominator {}",
        space.particular.as_ref().map_or("none".into(), rf),
        space.basis.len(),
        space.bounds.denominator
    ));
    // Past `pinned` the solution is determined by its prefix, so a verified element of the
    // space matching there is the solution; and no match there means no match at all.
    let short = n.min(pinned + MEMBERSHIP_SLACK);
    let f = extend_prefix(op, rhs, prefix, short)?;
    if let Some(w) = member_of(&space, &f)? {
        verify_witness(op, rhs, &w, &f)?;
        trace.push(format!("membership decided at order {short}"));
        return Ok(Verdict::rational(w, trace));
    }
    let f = extend_prefix(op, rhs, prefix, n)?;
    trace.push(format!("series-solver: extended to order {n}"));
    let member = member_of(&space, &f)?;
    let pade = cross_check(op, rhs, &f, cfg)?;
    match (member, pade) {
        (Some(w), _) => Err(Error::Internal(format!(
            "{} matches at order {n} but not at order {short}",
            rf(&w)
        ))),
        (None, Some(w)) => Err(Error::Internal(format!(
            "Padé found {} outside the complete rational solution space",
            rf(&w)
        ))),
        (None, None) => {
            let payload = json!({
                "search": "complete",
                "rational_particular": space.particular.as_ref().map(rf),
                "rational_kernel": space.basis.iter().map(rf).collect::<Vec<_>>(),
                "universal_denominator": space.bounds.denominator,
                "exponent_range": [space.bounds.exponent_lo, space.bounds.exponent_hi],
                "membership_system": {"unknowns": space.basis.len(), "equations": f.order() - f.start()},
                "pade_degree": cfg.degree_bound,
                "truncation": f.order(),
            });
            trace.push("certificate NO_RATIONAL_MATCH".into());
            Ok(Verdict {
                outcome: Outcome::Hypertranscendental {
                    certificate: Certificate {
                        kind: CertificateKind::NoRationalMatch,
                        payload,
                    },
                },
                exactness: Exactness::Exact,
                provenance: trace,
                ell: 1,
            })
        }
    }
}

fn pull_back(w: &RatFunc, case: &CaseTag) -> Option<RatFunc> {
    match case {
        CaseTag::Mahler { p } => Some(RatFunc::new(
            w.num().deflate(*p as usize)?,
            w.den().deflate(*p as usize)?,
        )),
        _ => w.sigma_inverse(case),
    }
}

/// Degree-`d` Padé on the series, when it has enough terms.
fn cross_check(
    op: &DiffOperator,
    rhs: Option<&RatFunc>,
    f: &TruncatedSeries,
    cfg: &ClassifyConfig,
) -> Result<Option<RatFunc>> {
    let zero = RatFunc::zero();
    match rational_match(f, cfg.degree_bound, Some((op, Some(rhs.unwrap_or(&zero))))) {
        Ok(w) => Ok(w),
        Err(Error::TruncationTooShort) => Ok(None),
        Err(e) => Err(e),
    }
}

fn verify_witness(
    op: &DiffOperator,
    rhs: Option<&RatFunc>,
    w: &RatFunc,
    f: &TruncatedSeries,
) -> Result<()> {
    let b = rhs.cloned().unwrap_or_else(RatFunc::zero);
    if op.apply(w) != b {
        return Err(Error::Internal(
            "witness does not solve the equation".into(),
        ));
    }
    let e = expand_ratfunc(w, f.case(), f.order())?;
    if !e.sub(f)?.is_zero() {
        return Err(Error::Internal(
            "witness does not reproduce the prefix".into(),
        ));
    }
    Ok(())
}

fn mahler_general(
    op: &DiffOperator,
    rhs: Option<&RatFunc>,
    prefix: &TruncatedSeries,
    f: TruncatedSeries,
    cfg: &ClassifyConfig,
    mut trace: Vec<String>,
) -> Result<Verdict> {
    let Some(v) = f.valuation() else {
        if rhs.is_none() {
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
        "Padé with proven bounds: den <= {dd} (searched {dd_used}), num <= {dn}, order {}",
        f.order()
    ));
    let b = rhs.cloned().unwrap_or_else(RatFunc::zero);
    if let Some(w) = pade_match(&f, dn as usize, dd_used as usize)? {
        if op.apply(&w) == b {
            verify_witness(op, rhs, &w, &f)?;
            return Ok(Verdict::rational(w, trace));
        }
    }
    if let Some(w) = cross_check(op, rhs, &f, cfg)? {
        if dd <= cap {
            return Err(Error::Internal(format!(
                "Padé cross-check found {} beyond the proven bounds",
                rf(&w)
            )));
        }
        verify_witness(op, rhs, &w, &f)?;
        return Ok(Verdict::rational(w, trace));
    }
    let hank = hankel_profile(&f, ((f.order() - v + 1) / 2).min(8) as usize).ok();
    let payload = json!({
        "search": if dd <= cap { "complete" } else { "bounded" },
        "valuation": v,
        "denominator_degree_bound": dd,
        "numerator_degree_bound": dn,
        "searched_denominator_degree": dd_used,
        "pade_system": {"unknowns": dd_used + 1, "equations": f.order() - v - dn - 1},
        "pade_degree": cfg.degree_bound,
        "truncation": f.order(),
        "hankel_singular": hank.as_ref().map(|h| h.sizes.iter().map(|s| s.1).collect::<Vec<_>>()),
    });
    let exactness = if dd <= cap {
        Exactness::Exact
    } else {
        Exactness::Conditional(vec![
            format!("B={}", cfg.orbit_bound),
            format!("N={}", f.order()),
        ])
    };
    trace.push("certificate NO_RATIONAL_MATCH".into());
    Ok(Verdict {
        outcome: Outcome::Hypertranscendental {
            certificate: Certificate {
                kind: CertificateKind::NoRationalMatch,
                payload,
            },
        },
        exactness,
        provenance: trace,
        ell: 1,
    })
}

/// An exact enclosure `[lo, hi]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: Q,
    pub hi: Q,
}

impl Interval {
    pub fn contains(&self, x: &Q) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn width(&self) -> Q {
        &self.hi - &self.lo
    }

    pub fn render(&self, digits: usize) -> (String, String) {
        (
            to_decimal(&self.lo, digits, false),
            to_decimal(&self.hi, digits, true),
        )
    }
}

/// Enclosures of `f(α), f'(α), ..., f^{(r)}(α)` and the verdict on `f`.
#[derive(Clone, Debug)]
pub struct Evaluation {
    pub values: Vec<Interval>,
    pub terms: i64,
    pub verdict: Verdict,
}

/// Largest number of series terms tried before giving up on a precision target.
pub const MAX_EVAL_TERMS: i64 = 1 << 14;

/// Evaluates a Mahler solution of `ρ(y) = a y + b`, written as `f = A·f(x^p) + B` with
/// polynomial `A = 1/a` and `B = -b/a`. Tails are bounded through the coefficient
/// majorant `|c_k| <= S·max_{m<=k/p}|c_m| + β` with `S = ||A||_1`, `β = max|B_k|`.
pub fn evaluate_mahler_derivatives(
    op: &DiffOperator,
    rhs: Option<&RatFunc>,
    prefix: &TruncatedSeries,
    alpha: &Q,
    r: usize,
    eps: &Q,
    cfg: &ClassifyConfig,
) -> Result<Evaluation> {
    let CaseTag::Mahler { p } = op.case().clone() else {
        return Err(Error::UnsupportedCase(
            "evaluation is implemented for Mahler equations".into(),
        ));
    };
    if alpha.abs() >= q(1) {
        return Err(Error::OutsideDisc);
    }
    let (stripped, k) = op.strip_rho_power();
    if stripped.order() != 1 || k > 0 || prefix.ell() != 1 {
        return Err(Error::UnsupportedCase(
            "evaluation needs an unramified first-order equation".into(),
        ));
    }
    let c = op.coeffs();
    let a = -&c[0].checked_div(&c[1])?;
    let b = rhs
        .map(|b| b.checked_div(&c[1]))
        .transpose()?
        .unwrap_or_else(RatFunc::zero);
    if a.is_zero() {
        return Err(Error::UnsupportedCase("a = 0".into()));
    }
    let big_a = a.inv()?;
    let big_b = -&b.checked_div(&a)?;
    if !big_a.is_polynomial() || !big_b.is_polynomial() {
        return Err(Error::UnsupportedCase(
            "evaluation needs 1/a and b/a to be polynomials".into(),
        ));
    }
    let verdict = classify_equation(op, rhs, prefix, cfg)?;
    let s: Q = big_a.num().coeffs().iter().map(|c| c.abs()).sum();
    let beta: Q = big_b
        .num()
        .coeffs()
        .iter()
        .map(|c| c.abs())
        .fold(Q::zero(), |m, c| if c > m { c } else { m });
    let mut n = cfg.truncation.max(prefix.order()).max(8);
    loop {
        let f = extend_prefix(op, rhs, prefix, n)?;
        if f.start() < 0 {
            return Err(Error::UnsupportedCase(
                "evaluation of Laurent series".into(),
            ));
        }
        let values = enclose(&f, alpha, r, &s, &beta, p)?;
        if values.iter().all(|iv| iv.width() <= *eps) {
            return Ok(Evaluation {
                values,
                terms: n,
                verdict,
            });
        }
        if n >= MAX_EVAL_TERMS {
            return Err(Error::PrecisionUnreachable(n as usize));
        }
        n *= 2;
    }
}

fn falling(k: i64, j: usize) -> Q {
    (0..j as i64).fold(Q::one(), |acc, i| acc * q(k - i))
}

fn enclose(
    f: &TruncatedSeries,
    alpha: &Q,
    r: usize,
    s: &Q,
    beta: &Q,
    p: u64,
) -> Result<Vec<Interval>> {
    let n = f.order();
    let coeff = |k: i64| f.coeff(k).unwrap();
    let m0 = (0..n)
        .map(|k| coeff(k).abs())
        .fold(Q::zero(), |m, c| if c > m { c } else { m });
    let absa = alpha.abs();
    let mut out = Vec::new();
    for j in 0..=r {
        // exact partial sum of Σ k^(j) c_k α^(k-j)
        let mut center = Q::zero();
        if alpha.is_zero() {
            if (j as i64) < n {
                center = coeff(j as i64) * falling(j as i64, j);
            }
        } else {
            let mut pw = crate::arith::rat::qpow(alpha, -(j as i64));
            for k in 0..n {
                if k >= j as i64 {
                    center += coeff(k) * falling(k, j) * &pw;
                }
                pw *= alpha;
            }
        }
        let tail = if alpha.is_zero() {
            Q::zero()
        } else {
            tail_bound(n, &absa, j, s, beta, &m0, p)
        };
        out.push(Interval {
            lo: &center - &tail,
            hi: &center + &tail,
        });
    }
    Ok(out)
}

/// `Σ_{k>=n} T(k) k^j |α|^(k-j)` over blocks `[n p^i, n p^(i+1))`.
fn tail_bound(n: i64, absa: &Q, j: usize, s: &Q, beta: &Q, m0: &Q, p: u64) -> Q {
    let pq = q(p as i64);
    let one = Q::one();
    let geo = (&one - absa).recip();
    let mut t = m0.clone();
    let mut l = Q::from_integer(n.into());
    let mut lexp = n;
    let mut total = Q::zero();
    let absa_inv_j = crate::arith::rat::qpow(absa, -(j as i64));
    for _ in 0..64 {
        let t_next = {
            let grown = s * &t + beta;
            if grown > t {
                grown
            } else {
                t.clone()
            }
        };
        // block i: k in [l, p l), k^j <= (p l)^j
        let top = num_traits::pow(&pq * &l, j);
        let term = &t_next * &top * crate::arith::rat::qpow(absa, lexp) * &absa_inv_j * &geo;
        total += &term;
        if t_next.is_zero() {
            return total;
        }
        // ratio bound for all later blocks
        let growth = {
            let g = s + &(beta / &t_next);
            if g > one {
                g
            } else {
                one.clone()
            }
        };
        let ratio = &growth
            * num_traits::pow(pq.clone(), j)
            * crate::arith::rat::qpow(absa, (p as i64 - 1) * lexp);
        if ratio <= Q::new(1.into(), 2.into()) {
            return total + &term;
        }
        t = t_next;
        l = &l * &pq;
        lexp *= p as i64;
        if lexp > 1 << 20 {
            break;
        }
    }
    // unreachable for |α| < 1 in practice; fall back to a trivially safe huge bound
    total * q(1 << 30)
}

/// Human-readable enclosure summary.
pub fn describe_interval(iv: &Interval, digits: usize) -> serde_json::Value {
    let (lo, hi) = iv.render(digits);
    json!({"lo": lo, "hi": hi, "width": to_decimal(&iv.width(), digits + 2, true), "lo_exact": fmt_q(&iv.lo), "hi_exact": fmt_q(&iv.hi)})
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat::qf;
    use crate::arith::Poly;

    fn p(c: &[i64]) -> RatFunc {
        RatFunc::from_poly(Poly::from_i64(c))
    }

    fn moore() -> (DiffOperator, RatFunc, TruncatedSeries) {
        let m = CaseTag::mahler(2).unwrap();
        let op = DiffOperator::first_order(m.clone(), RatFunc::one());
        let pre = TruncatedSeries::from_terms(m, 1, &[(1, q(1))], 2).unwrap();
        (op, p(&[0, -1]), pre)
    }

    #[test]
    fn moore_is_hypertranscendental() {
        let (op, b, pre) = moore();
        let v = classify_equation(&op, Some(&b), &pre, &ClassifyConfig::default()).unwrap();
        assert!(v.is_hypertranscendental());
        assert_eq!(v.exactness, Exactness::Exact);
        assert!(
            v.provenance
                .iter()
                .any(|s| s.starts_with("iterate r=2: HYPER")),
            "{:?}",
            v.provenance
        );
    }

    #[test]
    fn q_hypergeometric() {
        // f2 with q = 4, a = 2
        let c = CaseTag::qdiff(q(4)).unwrap();
        let a = q(2);
        let den = Poly::new(vec![q(-1), &a * &a]);
        let op = DiffOperator::new(
            c.clone(),
            vec![
                RatFunc::new(Poly::from_i64(&[-1, 1]), den.clone()),
                RatFunc::new(Poly::new(vec![q(2), -(q(2) * &a)]), den),
                RatFunc::one(),
            ],
        );
        let pre = TruncatedSeries::from_terms(c, 1, &[(0, q(1))], 1).unwrap();
        let v = classify_equation(&op, None, &pre, &ClassifyConfig::default()).unwrap();
        assert!(v.is_hypertranscendental(), "{v:?}");
        assert_eq!(v.exactness, Exactness::Exact);
        let f = extend_prefix(&op, None, &pre, 2).unwrap();
        assert_eq!(f.coeff(1), Some(qf(1, 9)));
    }

    #[test]
    fn rational_general_order() {
        let s = CaseTag::shift(q(1)).unwrap();
        let l = DiffOperator::first_order(s.clone(), RatFunc::x())
            .mul(&DiffOperator::first_order(s.clone(), RatFunc::one()))
            .unwrap();
        let pre = TruncatedSeries::from_terms(s, 1, &[(0, q(1))], 1).unwrap();
        let v = classify_equation(&l, None, &pre, &ClassifyConfig::default()).unwrap();
        assert_eq!(v.witness(), Some(&RatFunc::one()));
        // planted 1/(1-x) for a second-order Mahler operator
        let m = CaseTag::mahler(2).unwrap();
        let g = RatFunc::new(Poly::one(), Poly::from_i64(&[1, -1]));
        let right = DiffOperator::first_order(m.clone(), g.sigma(&m).checked_div(&g).unwrap());
        let l = DiffOperator::first_order(m.clone(), RatFunc::x())
            .mul(&right)
            .unwrap();
        let pre = expand_ratfunc(&g, &m, 2).unwrap();
        let v = classify_equation(&l, None, &pre, &ClassifyConfig::default()).unwrap();
        assert_eq!(v.witness(), Some(&g));
    }

    #[test]
    fn evaluation() {
        let (op, b, pre) = moore();
        let eps = qf(1, 100_000_000);
        let ev = evaluate_mahler_derivatives(
            &op,
            Some(&b),
            &pre,
            &qf(1, 2),
            2,
            &eps,
            &ClassifyConfig::default(),
        )
        .unwrap();
        assert_eq!(ev.values.len(), 3);
        // 0.8164215090218931 from the lacunary sum
        let lo = qf(81642150, 100_000_000);
        let hi = qf(81642152, 100_000_000);
        assert!(
            ev.values[0].lo >= lo && ev.values[0].hi <= hi,
            "{:?}",
            ev.values[0].render(12)
        );
        assert!(ev.values.iter().all(|iv| iv.width() <= eps));
        // product ∏(1 - 3x^(2^n)) vanishes at 1/3
        let m = CaseTag::mahler(2).unwrap();
        let op = DiffOperator::first_order(
            m.clone(),
            RatFunc::new(Poly::one(), Poly::from_i64(&[1, -3])),
        );
        let pre = TruncatedSeries::from_terms(m, 1, &[(0, q(1))], 1).unwrap();
        let ev = evaluate_mahler_derivatives(
            &op,
            None,
            &pre,
            &qf(1, 3),
            0,
            &eps,
            &ClassifyConfig::default(),
        )
        .unwrap();
        assert!(ev.values[0].contains(&q(0)));
        assert!(ev.verdict.is_hypertranscendental());
        assert!(matches!(
            evaluate_mahler_derivatives(
                &op,
                None,
                &pre.clone(),
                &q(1),
                0,
                &eps,
                &ClassifyConfig::default()
            ),
            Err(Error::OutsideDisc)
        ));
    }
}
