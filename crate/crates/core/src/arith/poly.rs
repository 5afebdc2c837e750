//! Dense univariate polynomials over the rationals.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::rat::{fmt_q, q, Q};

/// Dense polynomial, coefficients in ascending degree order with no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<Q>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Q>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| q(c)).collect())
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(Q::one())
    }

    pub fn constant(c: Q) -> Self {
        Poly::new(vec![c])
    }

    pub fn x() -> Self {
        Poly::monomial(Q::one(), 1)
    }

    pub fn monomial(c: Q, k: usize) -> Self {
        let mut v = vec![Q::zero(); k + 1];
        v[k] = c;
        Poly::new(v)
    }

    /// `x - r`
    pub fn linear_root(r: Q) -> Self {
        Poly::new(vec![-r, Q::one()])
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Q {
        self.coeffs.get(k).cloned().unwrap_or_else(Q::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree as a signed integer with `deg 0 = -1`.
    pub fn deg(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    pub fn lc(&self) -> Q {
        self.coeffs.last().cloned().unwrap_or_else(Q::zero)
    }

    /// x-adic valuation; `None` for zero.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Lowest nonzero coefficient.
    pub fn tc(&self) -> Q {
        self.valuation()
            .map(|v| self.coeffs[v].clone())
            .unwrap_or_else(Q::zero)
    }

    pub fn eval(&self, x: &Q) -> Q {
        let mut acc = Q::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn scale(&self, c: &Q) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let l = self.lc().recip();
        self.scale(&l)
    }

    pub fn shift_up(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![Q::zero(); k];
        v.extend(self.coeffs.iter().cloned());
        Poly::new(v)
    }

    /// Divide by `x^k`, dropping lower terms.
    pub fn shift_down(&self, k: usize) -> Poly {
        if k >= self.coeffs.len() {
            return Poly::zero();
        }
        Poly::new(self.coeffs[k..].to_vec())
    }

    pub fn truncate(&self, n: usize) -> Poly {
        Poly::new(self.coeffs.iter().take(n).cloned().collect())
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * q(k as i64))
                .collect(),
        )
    }

    /// `x * d/dx`
    pub fn euler(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c * q(k as i64))
                .collect(),
        )
    }

    /// `p(x + c)` by Horner.
    pub fn taylor_shift(&self, c: &Q) -> Poly {
        if c.is_zero() {
            return self.clone();
        }
        let lin = Poly::new(vec![c.clone(), Q::one()]);
        let mut acc = Poly::zero();
        for a in self.coeffs.iter().rev() {
            acc = &(&acc * &lin) + &Poly::constant(a.clone());
        }
        acc
    }

    /// `p(c x)`
    pub fn dilate(&self, c: &Q) -> Poly {
        let mut pw = Q::one();
        let mut v = Vec::with_capacity(self.coeffs.len());
        for a in &self.coeffs {
            v.push(a * &pw);
            pw *= c;
        }
        Poly::new(v)
    }

    /// `p(x^k)`
    pub fn inflate(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![Q::zero(); (self.coeffs.len() - 1) * k + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            v[i * k] = a.clone();
        }
        Poly::new(v)
    }

    /// Inverse of [`Poly::inflate`] when every exponent is divisible by `k`.
    pub fn deflate(&self, k: usize) -> Option<Poly> {
        let mut v = Vec::new();
        for (i, a) in self.coeffs.iter().enumerate() {
            if i % k == 0 {
                v.push(a.clone());
            } else if !a.is_zero() {
                return None;
            }
        }
        Some(Poly::new(v))
    }

    /// `x^deg * p(1/x)` with respect to the given degree.
    pub fn reverse(&self, deg: usize) -> Poly {
        let mut v = vec![Q::zero(); deg + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if i <= deg {
                v[deg - i] = a.clone();
            }
        }
        Poly::new(v)
    }

    pub fn pow(&self, e: usize) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let dd = d.coeffs.len() - 1;
        if self.coeffs.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let inv = d.lc().recip();
        let mut r = self.coeffs.clone();
        let mut quo = vec![Q::zero(); r.len() - dd];
        for k in (0..quo.len()).rev() {
            let c = &r[k + dd] * &inv;
            if !c.is_zero() {
                for (j, dj) in d.coeffs.iter().enumerate() {
                    r[k + j] -= &c * dj;
                }
            }
            quo[k] = c;
        }
        r.truncate(dd);
        (Poly::new(quo), Poly::new(r))
    }

    pub fn rem(&self, d: &Poly) -> Poly {
        self.div_rem(d).1
    }

    /// Exact quotient; `None` if `d` does not divide `self`.
    pub fn exact_div(&self, d: &Poly) -> Option<Poly> {
        let (qu, r) = self.div_rem(d);
        if r.is_zero() {
            Some(qu)
        } else {
            None
        }
    }

    /// Monic greatest common divisor (`gcd(0, 0) = 0`).
    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.monic();
        let mut b = other.monic();
        while !b.is_zero() {
            let r = a.rem(&b).monic();
            a = b;
            b = r;
        }
        a
    }

    /// Extended gcd: `(g, s, t)` with `s*self + t*other = g`, `g` monic.
    pub fn xgcd(&self, other: &Poly) -> (Poly, Poly, Poly) {
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Poly::one(), Poly::zero());
        let (mut t0, mut t1) = (Poly::zero(), Poly::one());
        while !r1.is_zero() {
            let (qu, r) = r0.div_rem(&r1);
            let s = &s0 - &(&qu * &s1);
            let t = &t0 - &(&qu * &t1);
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
            t0 = std::mem::replace(&mut t1, t);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let inv = r0.lc().recip();
        (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
    }

    pub fn squarefree_part(&self) -> Poly {
        if self.is_constant() {
            return Poly::one();
        }
        let g = self.gcd(&self.derivative());
        self.exact_div(&g).expect("gcd divides").monic()
    }

    /// Resultant by the Euclidean remainder sequence.
    pub fn resultant(&self, other: &Poly) -> Q {
        if self.is_zero() || other.is_zero() {
            return Q::zero();
        }
        let m = self.deg();
        let n = other.deg();
        if n == 0 {
            return crate::arith::rat::qpow(&other.lc(), m);
        }
        if m == 0 {
            return crate::arith::rat::qpow(&self.lc(), n);
        }
        let r = self.rem(other);
        if r.is_zero() {
            return Q::zero();
        }
        let sign = if (m * n) % 2 == 1 {
            -Q::one()
        } else {
            Q::one()
        };
        let lcpow = crate::arith::rat::qpow(&other.lc(), m - r.deg());
        sign * lcpow * other.resultant(&r)
    }

    /// Bound `B` with every complex root `|z| <= B`: the smaller of Cauchy's and Fujiwara's.
    pub fn root_bound(&self) -> f64 {
        if self.deg() <= 0 {
            return 0.0;
        }
        let l = self.lc().abs();
        let n = self.coeffs.len() - 1;
        let ratios: Vec<f64> = self.coeffs[..n]
            .iter()
            .map(|c| super::rat::abs_upper_f64(&(c.abs() / &l)))
            .collect();
        let cauchy = 1.0 + ratios.iter().copied().fold(0.0, f64::max);
        // Fujiwara: 2 max_k |a_{n-k}/a_n|^{1/k}, with a_0 halved
        let fujiwara = 2.0
            * (1..=n)
                .map(|k| {
                    let r = ratios[n - k] / if k == n { 2.0 } else { 1.0 };
                    r.powf(1.0 / k as f64) * (1.0 + 1e-12)
                })
                .fold(0.0, f64::max);
        cauchy.min(fujiwara)
    }

    /// Multiply by a common denominator so all coefficients are integers with gcd 1
    /// and a positive leading coefficient.
    pub fn primitive(&self) -> Poly {
        use num_integer::Integer;
        if self.is_zero() {
            return Poly::zero();
        }
        let mut den = num_bigint::BigInt::one();
        for c in &self.coeffs {
            den = den.lcm(c.denom());
        }
        let ints: Vec<num_bigint::BigInt> = self
            .coeffs
            .iter()
            .map(|c| (c * Q::from_integer(den.clone())).to_integer())
            .collect();
        let mut g = num_bigint::BigInt::zero();
        for i in &ints {
            g = g.gcd(i);
        }
        if self.lc().is_negative() {
            g = -g;
        }
        Poly::new(ints.into_iter().map(|i| Q::new(i, g.clone())).collect())
    }

    pub fn is_monomial(&self) -> bool {
        self.coeffs.iter().filter(|c| !c.is_zero()).count() == 1
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let mut v = Vec::with_capacity(n);
        for k in 0..n {
            match (self.coeffs.get(k), o.coeffs.get(k)) {
                (Some(a), Some(b)) => v.push(a + b),
                (Some(a), None) => v.push(a.clone()),
                (None, Some(b)) => v.push(b.clone()),
                (None, None) => unreachable!(),
            }
        }
        Poly::new(v)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        self + &(-o)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![Q::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        Poly::new(v)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Poly {
            type Output = Poly;
            fn $m(self, o: Poly) -> Poly {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

/// Renders `p` in ascending order in the variable `var`, e.g. `1+x`, `-3+2*x^2`.
pub fn render_poly(p: &Poly, var: &str) -> String {
    render_poly_with(p, &|k| {
        if k == 1 {
            var.to_string()
        } else {
            format!("{var}^{k}")
        }
    })
}

/// Like [`render_poly`] with a custom rendering of the monomial of degree `k >= 1`.
pub fn render_poly_with(p: &Poly, mono: &dyn Fn(usize) -> String) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (k, c) in p.coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        let a = c.abs();
        let body = match k {
            0 => fmt_q(&a),
            _ => {
                let m = mono(k);
                if a.is_one() {
                    m
                } else {
                    format!("{}*{}", fmt_q(&a), m)
                }
            }
        };
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push(if neg { '-' } else { '+' });
        }
        out.push_str(&body);
    }
    out
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_poly(self, "x"))
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> Poly {
        Poly::from_i64(c)
    }

    #[test]
    fn division_identity() {
        let a = p(&[1, 2, 3, 4, 5]);
        let d = p(&[-1, 0, 2]);
        let (qu, r) = a.div_rem(&d);
        assert_eq!(&(&qu * &d) + &r, a);
        assert!(r.deg() < d.deg());
    }

    #[test]
    fn gcd_and_resultant() {
        let a = &p(&[-1, 1]) * &p(&[2, 1]);
        let b = &p(&[-1, 1]) * &p(&[5, 1]);
        assert_eq!(a.gcd(&b), p(&[-1, 1]));
        assert!(a.resultant(&b).is_zero());
        // Res(x - 1, x - 3) = 1 - 3 = -2
        assert_eq!(p(&[-1, 1]).resultant(&p(&[-3, 1])), q(-2));
        // Res(x^2 + 1, x) = 1
        assert_eq!(p(&[1, 0, 1]).resultant(&p(&[0, 1])), q(1));
    }

    #[test]
    fn substitutions() {
        let a = p(&[0, 0, 1]);
        assert_eq!(a.taylor_shift(&q(1)), p(&[1, 2, 1]));
        assert_eq!(p(&[0, 0, 0, 1]).dilate(&q(2)), p(&[0, 0, 0, 8]));
        assert_eq!(p(&[1, 1]).inflate(3), p(&[1, 0, 0, 1]));
        assert_eq!(p(&[1, 0, 0, 1]).deflate(3), Some(p(&[1, 1])));
        assert_eq!(p(&[1, 1, 1]).deflate(2), None);
    }

    #[test]
    fn xgcd_bezout() {
        let a = p(&[1, 0, 1]);
        let b = p(&[0, 1, 1]);
        let (g, s, t) = a.xgcd(&b);
        assert!(g.is_one());
        assert_eq!(&(&s * &a) + &(&t * &b), g);
    }

    #[test]
    fn rendering() {
        assert_eq!(p(&[1, 1]).to_string(), "1+x");
        assert_eq!(p(&[0, -1, 0, 3]).to_string(), "-x+3*x^3");
        assert_eq!(Poly::zero().to_string(), "0");
    }
}
