//! Passing from `Q(x^{1/l})` to `Q(z)` with `z = x^{1/l}`.

use num_integer::Integer;
use serde::Serialize;

use super::case::CaseTag;
use super::rat::{fmt_q, rational_root};
use super::ratfunc::RatFunc;
use crate::error::{Error, Result};

/// Largest ramification index accepted.
pub const MAX_RAMIFICATION: u64 = 4096;

/// Bookkeeping for `x = z^l`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct RamificationContext {
    pub ell: u64,
}

impl Default for RamificationContext {
    fn default() -> Self {
        RamificationContext { ell: 1 }
    }
}

/// A rational function in `x^{1/ell}`, stored as a rational function of `z = x^{1/ell}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ramified {
    pub ell: u64,
    pub f: RatFunc,
}

impl Ramified {
    pub fn plain(f: RatFunc) -> Self {
        Ramified { ell: 1, f }
    }
}

impl RamificationContext {
    pub fn new(ell: u64) -> Result<Self> {
        if ell == 0 || ell > MAX_RAMIFICATION {
            return Err(Error::NoncommensurableRamification(MAX_RAMIFICATION));
        }
        Ok(RamificationContext { ell })
    }

    /// Exponent `k` in `z` expressed as an exponent of `x`.
    pub fn x_exponent(&self, k: i64) -> (i64, i64) {
        let g = k.gcd(&(self.ell as i64));
        if g == 0 {
            return (0, 1);
        }
        (k / g, self.ell as i64 / g)
    }

    /// Case acting on `z`.
    pub fn case_in_z(&self, case: &CaseTag) -> Result<CaseTag> {
        match case {
            CaseTag::Shift { .. } if self.ell != 1 => Err(Error::Semantic(
                "ramified inputs are not supported for the shift case".into(),
            )),
            CaseTag::QDiff { q } => {
                let r = rational_root(q, self.ell).ok_or_else(|| {
                    Error::NonRationalRamifiedParameter {
                        q: fmt_q(q),
                        ell: self.ell,
                    }
                })?;
                CaseTag::qdiff(r)
            }
            other => Ok(other.clone()),
        }
    }

    /// Lift a function of `x^{1/k}` into this context.
    pub fn lift(&self, r: &Ramified) -> Result<RatFunc> {
        if self.ell % r.ell != 0 {
            return Err(Error::Internal(format!(
                "ramification {} does not divide {}",
                r.ell, self.ell
            )));
        }
        Ok(r.f.inflate((self.ell / r.ell) as usize))
    }

    /// Express `f(z)` back in the smallest ramification, returning the index used.
    pub fn reduce(&self, f: &RatFunc) -> Ramified {
        for d in (1..=self.ell).rev() {
            if self.ell % d != 0 {
                continue;
            }
            if let (Some(n), Some(dd)) = (f.num().deflate(d as usize), f.den().deflate(d as usize))
            {
                return Ramified {
                    ell: self.ell / d,
                    f: RatFunc::new(n, dd),
                };
            }
        }
        Ramified {
            ell: self.ell,
            f: f.clone(),
        }
    }

    /// Render `f(z)` in terms of `x`, writing `x^(a/b)` for fractional powers.
    pub fn render(&self, f: &RatFunc) -> String {
        let r = self.reduce(f);
        if r.ell == 1 {
            return r.f.render("x");
        }
        let ctx = RamificationContext { ell: r.ell };
        r.f.render_with(&|k| {
            let (a, b) = ctx.x_exponent(k as i64);
            if b == 1 {
                if a == 1 {
                    "x".to_string()
                } else {
                    format!("x^{a}")
                }
            } else {
                format!("x^({a}/{b})")
            }
        })
    }
}

/// Brings every item to a common ramification index and returns the case acting on `z`.
pub fn deramify(
    case: &CaseTag,
    items: &[Ramified],
) -> Result<(RamificationContext, CaseTag, Vec<RatFunc>)> {
    let mut ell: u64 = 1;
    for it in items {
        ell = ell.lcm(&it.ell);
        if ell > MAX_RAMIFICATION {
            return Err(Error::NoncommensurableRamification(MAX_RAMIFICATION));
        }
    }
    let ctx = RamificationContext::new(ell)?;
    let zcase = ctx.case_in_z(case)?;
    let lifted = items
        .iter()
        .map(|it| ctx.lift(it))
        .collect::<Result<Vec<_>>>()?;
    Ok((ctx, zcase, lifted))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::poly::Poly;
    use crate::arith::rat::q;

    #[test]
    fn mahler_keeps_p() {
        let m = CaseTag::mahler(2).unwrap();
        // x^{1/3} + 1 over Q(x^{1/3})
        let item = Ramified {
            ell: 3,
            f: RatFunc::from_poly(Poly::from_i64(&[1, 1])),
        };
        let (ctx, zc, out) = deramify(&m, &[item]).unwrap();
        assert_eq!(ctx.ell, 3);
        assert_eq!(zc, m);
        assert_eq!(out[0], RatFunc::from_poly(Poly::from_i64(&[1, 1])));
        assert_eq!(ctx.render(&out[0]), "1+x^(1/3)");
    }

    #[test]
    fn q_parameter_root() {
        let c = CaseTag::qdiff(q(8)).unwrap();
        let item = Ramified {
            ell: 3,
            f: RatFunc::one(),
        };
        let (_, zc, _) = deramify(&c, &[item]).unwrap();
        assert_eq!(zc, CaseTag::qdiff(q(2)).unwrap());
        let c2 = CaseTag::qdiff(q(2)).unwrap();
        let item = Ramified {
            ell: 2,
            f: RatFunc::one(),
        };
        assert!(matches!(
            deramify(&c2, &[item]),
            Err(Error::NonRationalRamifiedParameter { .. })
        ));
    }

    #[test]
    fn lift_then_reduce_is_identity() {
        let ctx = RamificationContext::new(6).unwrap();
        let r = Ramified {
            ell: 2,
            f: RatFunc::new(Poly::from_i64(&[1, 0, 3]), Poly::from_i64(&[2, 1])),
        };
        let lifted = ctx.lift(&r).unwrap();
        assert_eq!(ctx.reduce(&lifted), r);
    }
}
