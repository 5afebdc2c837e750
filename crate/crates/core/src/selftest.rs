//! Built-in smoke checks run by the `selftest` command.

use crate::arith::rat::{fmt_q, q, qf};
use crate::arith::{CaseTag, Poly, RatFunc};
use crate::classify::{classify_equation, ClassifyConfig};
use crate::dsl::{parse_operator, parse_problem};
use crate::order_one::{mult_criterion, MultWitness};
use crate::solver::extend_prefix;
use crate::verdict::Exactness;

/// `(name, passed, detail)` for each check.
pub type Check = (String, bool, String);

fn check(name: &str, f: impl FnOnce() -> crate::Result<(bool, String)>) -> Check {
    match f() {
        Ok((ok, detail)) => (name.to_string(), ok, detail),
        Err(e) => (name.to_string(), false, e.to_string()),
    }
}

pub const F1: &str = "case=mahler p=2; eq: f(x^2) - f(x) + x = 0; prefix: 1:1";
pub const F2: &str =
    "case=q q=4; eq: f(q^2 x) - ((2*2*x-2)/(4*x-1))*f(q*x) + ((x-1)/(4*x-1))*f(x) = 0; prefix: 0:1";

pub fn run() -> Vec<Check> {
    let cfg = ClassifyConfig::default();
    vec![
        check("mahler-series-powers-of-two", || {
            let p = parse_problem(F1)?;
            let s = extend_prefix(&p.op, p.rhs.as_ref(), &p.prefix_series()?.unwrap(), 64)?;
            let ones: Vec<i64> = (0..64).filter(|&k| s.coeff(k) == Some(q(1))).collect();
            let zeros = (0..64).filter(|&k| s.coeff(k) == Some(q(0))).count();
            Ok((
                ones == [1, 2, 4, 8, 16, 32] && zeros == 58,
                format!("ones at {ones:?}"),
            ))
        }),
        check("mahler-classify", || {
            let p = parse_problem(F1)?;
            let v = classify_equation(&p.op, p.rhs.as_ref(), &p.prefix_series()?.unwrap(), &cfg)?;
            Ok((
                v.is_hypertranscendental() && v.exactness == Exactness::Exact,
                v.outcome.label().into(),
            ))
        }),
        check("q-classify", || {
            let p = parse_problem(F2)?;
            let pre = p.prefix_series()?.unwrap();
            let s = extend_prefix(&p.op, None, &pre, 2)?;
            let v = classify_equation(&p.op, None, &pre, &cfg)?;
            let c1 = s.coeff(1);
            Ok((
                c1 == Some(qf(1, 9))
                    && v.is_hypertranscendental()
                    && v.exactness == Exactness::Exact,
                format!(
                    "c1 = {}, {}",
                    c1.as_ref().map_or("?".into(), fmt_q),
                    v.outcome.label()
                ),
            ))
        }),
        check("ore-product", || {
            let s = CaseTag::shift(q(1))?;
            let r = parse_operator("(S - x)(S - 1)", &s)?.render();
            Ok((r == "S^2 - (1+x)S + x", r))
        }),
        check("multiplicative-witnesses", || {
            let qc = CaseTag::qdiff(q(3))?;
            let w1 = mult_criterion(&RatFunc::from_poly(Poly::from_i64(&[0, 3])), &qc)?;
            let mc = CaseTag::mahler(2)?;
            let a = RatFunc::from_poly(Poly::from_i64(&[1, 1]));
            let w2 = mult_criterion(&a, &mc)?;
            let ok1 = w1
                .as_ref()
                .is_some_and(|w| w.c == q(3) && w.alpha == 1 && w.g.is_one());
            let ok2 = w2.as_ref().is_some_and(|w| {
                w.c == q(1)
                    && w.alpha == 0
                    && w.g == RatFunc::from_poly(Poly::from_i64(&[-1, 1]))
                    && w.verify(&a, &mc)
            });
            let show = |w: &Option<MultWitness>| {
                w.as_ref().map_or("none".into(), |w| {
                    format!("(c={}, α={}, g={})", fmt_q(&w.c), w.alpha, w.g.render("x"))
                })
            };
            Ok((ok1 && ok2, format!("{} / {}", show(&w1), show(&w2))))
        }),
        check("planted-rational", || {
            let p = parse_problem("case=shift; pair: a=1, b=1/(x+1)-1/x; prefix: -1:1")?;
            let v = classify_equation(&p.op, p.rhs.as_ref(), &p.prefix_series()?.unwrap(), &cfg)?;
            let ok = v
                .witness()
                .is_some_and(|w| p.op.apply(w) == *p.rhs.as_ref().unwrap());
            Ok((
                ok,
                v.witness().map_or("no witness".into(), |w| w.render("x")),
            ))
        }),
    ]
}

#[cfg(test)]
mod tests {
    #[test]
    fn all_pass() {
        for (name, ok, detail) in super::run() {
            assert!(ok, "{name}: {detail}");
        }
    }
}
