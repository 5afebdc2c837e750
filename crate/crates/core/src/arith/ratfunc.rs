//! Rational functions in canonical form: monic denominator, coprime to the numerator.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::case::CaseTag;
use super::poly::{render_poly_with, Poly};
use super::rat::{q, Q};
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    /// Builds `num/den` and reduces it. Panics if `den` is zero.
    pub fn new(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return RatFunc::zero();
        }
        let g = num.gcd(&den);
        let (mut n, mut d) = if g.is_one() {
            (num, den)
        } else {
            (num.exact_div(&g).unwrap(), den.exact_div(&g).unwrap())
        };
        let l = d.lc();
        if !l.is_one() {
            let inv = l.recip();
            n = n.scale(&inv);
            d = d.scale(&inv);
        }
        RatFunc { num: n, den: d }
    }

    pub fn try_new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(RatFunc::new(num, den))
    }

    pub fn zero() -> Self {
        RatFunc {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        RatFunc::constant(Q::one())
    }

    pub fn constant(c: Q) -> Self {
        RatFunc {
            num: Poly::constant(c),
            den: Poly::one(),
        }
    }

    pub fn from_i64(c: i64) -> Self {
        RatFunc::constant(q(c))
    }

    pub fn x() -> Self {
        RatFunc::from_poly(Poly::x())
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFunc {
            num: p,
            den: Poly::one(),
        }
    }

    /// `x^k` for any integer `k`.
    pub fn x_pow(k: i64) -> Self {
        if k >= 0 {
            RatFunc::from_poly(Poly::monomial(Q::one(), k as usize))
        } else {
            RatFunc::new(Poly::one(), Poly::monomial(Q::one(), (-k) as usize))
        }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    /// The constant value if this is a constant.
    pub fn as_constant(&self) -> Option<Q> {
        if self.is_constant() {
            Some(self.num.coeff(0))
        } else {
            None
        }
    }

    /// `deg num - deg den`; `None` for zero.
    pub fn degree(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.num.deg() - self.den.deg())
        }
    }

    /// Order of vanishing at `x = 0`; `None` for zero.
    pub fn valuation(&self) -> Option<i64> {
        let vn = self.num.valuation()? as i64;
        let vd = self.den.valuation().unwrap_or(0) as i64;
        Some(vn - vd)
    }

    /// Coefficient of the lowest-order term of the expansion at zero.
    pub fn trailing_coefficient(&self) -> Q {
        if self.is_zero() {
            return Q::zero();
        }
        self.num.tc() / self.den.tc()
    }

    /// Coefficient of the highest-order term of the expansion at infinity.
    pub fn leading_coefficient(&self) -> Q {
        self.num.lc() / self.den.lc()
    }

    pub fn eval(&self, x: &Q) -> Result<Q> {
        let d = self.den.eval(x);
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.num.eval(x) / d)
    }

    pub fn scale(&self, c: &Q) -> RatFunc {
        if c.is_zero() {
            return RatFunc::zero();
        }
        RatFunc {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn inv(&self) -> Result<RatFunc> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(RatFunc::new(self.den.clone(), self.num.clone()))
    }

    pub fn checked_div(&self, o: &RatFunc) -> Result<RatFunc> {
        Ok(self * &o.inv()?)
    }

    pub fn pow(&self, e: i64) -> Result<RatFunc> {
        if e < 0 {
            return self.inv()?.pow(-e);
        }
        Ok(RatFunc {
            num: self.num.pow(e as usize),
            den: self.den.pow(e as usize),
        })
    }

    pub fn mul_poly(&self, p: &Poly) -> RatFunc {
        RatFunc::new(&self.num * p, self.den.clone())
    }

    /// `σ(f)` for the given case.
    pub fn sigma(&self, case: &CaseTag) -> RatFunc {
        self.sigma_pow(case, 1)
    }

    /// `σ^k(f)`, `k >= 0`.
    pub fn sigma_pow(&self, case: &CaseTag, k: u32) -> RatFunc {
        if k == 0 || self.is_constant() {
            return self.clone();
        }
        RatFunc::new(case.sigma_poly(&self.num, k), case.sigma_poly(&self.den, k))
    }

    /// `σ^{-1}(f)` when it stays inside `Q(x)`.
    pub fn sigma_inverse(&self, case: &CaseTag) -> Option<RatFunc> {
        match case {
            CaseTag::Shift { h, .. } => Some(RatFunc::new(
                self.num.taylor_shift(&-h),
                self.den.taylor_shift(&-h),
            )),
            CaseTag::QDiff { q: qv } => {
                let inv = qv.recip();
                Some(RatFunc::new(self.num.dilate(&inv), self.den.dilate(&inv)))
            }
            CaseTag::Mahler { p } => {
                let p = *p as usize;
                Some(RatFunc::new(self.num.deflate(p)?, self.den.deflate(p)?))
            }
        }
    }

    /// `d/dx f`
    pub fn d_dx(&self) -> RatFunc {
        let n = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        RatFunc::new(n, &self.den * &self.den)
    }

    /// The case derivation: `d/dx` for shift, `x d/dx` otherwise.
    pub fn derive(&self, case: &CaseTag) -> RatFunc {
        let d = self.d_dx();
        if case.is_shift() {
            d
        } else {
            d.mul_poly(&Poly::x())
        }
    }

    /// `f(x^k)`
    pub fn inflate(&self, k: usize) -> RatFunc {
        RatFunc::new(self.num.inflate(k), self.den.inflate(k))
    }

    /// Split off the power of `x`: `f = x^v * g` with `g(0)` finite and nonzero.
    pub fn split_x_power(&self) -> (i64, RatFunc) {
        if self.is_zero() {
            return (0, RatFunc::zero());
        }
        let vn = self.num.valuation().unwrap();
        let vd = self.den.valuation().unwrap_or(0);
        (
            vn as i64 - vd as i64,
            RatFunc::new(self.num.shift_down(vn), self.den.shift_down(vd)),
        )
    }

    /// Render with the given variable name.
    pub fn render(&self, var: &str) -> String {
        self.render_with(&|k| {
            if k == 1 {
                var.to_string()
            } else {
                format!("{var}^{k}")
            }
        })
    }

    /// Render with a custom monomial printer for degrees `k >= 1`. The fraction is
    /// shown with an integer, content-free denominator whose lowest coefficient is
    /// positive, e.g. `1/(1-3*x)` rather than `-1/3/(-1/3+x)`.
    pub fn render_with(&self, mono: &dyn Fn(usize) -> String) -> String {
        if self.den.is_one() {
            return render_poly_with(&self.num, mono);
        }
        let mut den = self.den.primitive();
        if den.tc().is_negative() {
            den = den.scale(&-Q::one());
        }
        let mut s = &den.lc() / &self.den.lc();
        if let Some(c) = self.num.is_constant().then(|| self.num.lc() * &s) {
            // `1/(3*x)` rather than `1/3/x`
            let k = Q::from_integer(c.denom().clone());
            den = den.scale(&k);
            s *= k;
        }
        let num = self.num.scale(&s);
        let n = render_poly_with(&num, mono);
        let nt = if num.coeffs().iter().filter(|c| !c.is_zero()).count() > 1 {
            format!("({n})")
        } else {
            n
        };
        let d = render_poly_with(&den, mono);
        let dt = if den.coeffs().iter().filter(|c| !c.is_zero()).count() > 1 || !den.lc().is_one() {
            format!("({d})")
        } else {
            d
        };
        format!("{nt}/{dt}")
    }
}

impl Add for &RatFunc {
    type Output = RatFunc;
    fn add(self, o: &RatFunc) -> RatFunc {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den == o.den {
            return RatFunc::new(&self.num + &o.num, self.den.clone());
        }
        RatFunc::new(
            &(&self.num * &o.den) + &(&o.num * &self.den),
            &self.den * &o.den,
        )
    }
}

impl Sub for &RatFunc {
    type Output = RatFunc;
    fn sub(self, o: &RatFunc) -> RatFunc {
        self + &(-o)
    }
}

impl Mul for &RatFunc {
    type Output = RatFunc;
    fn mul(self, o: &RatFunc) -> RatFunc {
        if self.is_zero() || o.is_zero() {
            return RatFunc::zero();
        }
        RatFunc::new(&self.num * &o.num, &self.den * &o.den)
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for RatFunc {
            type Output = RatFunc;
            fn $m(self, o: RatFunc) -> RatFunc {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        -&self
    }
}

impl From<Poly> for RatFunc {
    fn from(p: Poly) -> Self {
        RatFunc::from_poly(p)
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("x"))
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatFunc({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat::qf;

    fn rf(n: &[i64], d: &[i64]) -> RatFunc {
        RatFunc::new(Poly::from_i64(n), Poly::from_i64(d))
    }

    #[test]
    fn canonical_form() {
        let a = rf(&[2, 2], &[2, 0, 2]);
        assert!(a.den().lc().is_one());
        assert_eq!(a, rf(&[1, 1], &[1, 0, 1]));
        let b = rf(&[-1, 0, 1], &[-2, 2]);
        assert_eq!(b, RatFunc::from_poly(Poly::new(vec![qf(1, 2), qf(1, 2)])));
    }

    #[test]
    fn sigma_examples() {
        let shift = CaseTag::shift(q(1)).unwrap();
        let x2 = RatFunc::x_pow(2);
        assert_eq!(x2.sigma(&shift), rf(&[1, 2, 1], &[1]));
        let qd = CaseTag::qdiff(q(2)).unwrap();
        assert_eq!(RatFunc::x_pow(3).sigma(&qd), rf(&[0, 0, 0, 8], &[1]));
        let m = CaseTag::mahler(2).unwrap();
        assert_eq!(rf(&[0, 1], &[1, -1]).sigma(&m), rf(&[0, 0, 1], &[1, 0, -1]));
    }

    #[test]
    fn derive_examples() {
        let shift = CaseTag::shift(q(1)).unwrap();
        assert_eq!(RatFunc::x_pow(2).derive(&shift), rf(&[0, 2], &[1]));
        let qd = CaseTag::qdiff(q(2)).unwrap();
        assert_eq!(RatFunc::x_pow(3).derive(&qd), rf(&[0, 0, 0, 3], &[1]));
        let m = CaseTag::mahler(2).unwrap();
        assert_eq!(rf(&[1, 1], &[1]).derive(&m), RatFunc::x());
    }

    #[test]
    fn sigma_inverse_mahler_needs_deflation() {
        let m = CaseTag::mahler(2).unwrap();
        assert_eq!(rf(&[0, 0, 1], &[1]).sigma_inverse(&m), Some(RatFunc::x()));
        assert_eq!(RatFunc::x().sigma_inverse(&m), None);
    }

    #[test]
    fn rendering() {
        assert_eq!(rf(&[0, 1], &[-1, 1]).to_string(), "-x/(1-x)");
        assert_eq!(rf(&[1], &[0, 3]).to_string(), "1/(3*x)");
        assert_eq!(rf(&[2], &[3, 6]).to_string(), "2/(3+6*x)");
        assert_eq!(rf(&[1], &[0, 0, 1]).to_string(), "1/x^2");
    }
}
