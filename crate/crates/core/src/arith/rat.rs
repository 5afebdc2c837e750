//! Helpers for exact rationals.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Exact `base^exp` for a possibly negative integer exponent.
pub fn qpow(base: &Q, exp: i64) -> Q {
    if exp >= 0 {
        num_traits::pow(base.clone(), exp as usize)
    } else {
        num_traits::pow(base.recip(), (-exp) as usize)
    }
}

fn exact_int_root(n: &BigInt, k: u32) -> Option<BigInt> {
    if n.is_negative() {
        if k % 2 == 0 {
            return None;
        }
        return exact_int_root(&-n, k).map(|r| -r);
    }
    let r = n.nth_root(k);
    if num_traits::pow(r.clone(), k as usize) == *n {
        Some(r)
    } else {
        None
    }
}

/// The rational `k`-th root of `x` if it exists.
pub fn rational_root(x: &Q, k: u64) -> Option<Q> {
    if k == 1 {
        return Some(x.clone());
    }
    let k32 = u32::try_from(k).ok()?;
    let n = exact_int_root(x.numer(), k32)?;
    let d = exact_int_root(x.denom(), k32)?;
    Some(Q::new(n, d))
}

/// Upper bound on |x| as f64 (rounded away from zero, finite for reasonable input).
pub fn abs_upper_f64(x: &Q) -> f64 {
    let v = x.abs().to_f64().unwrap_or(f64::MAX);
    if v == 0.0 {
        0.0
    } else {
        v * (1.0 + 1e-12) + f64::MIN_POSITIVE
    }
}

pub fn is_integer(x: &Q) -> bool {
    x.denom().is_one()
}

pub fn to_i64(x: &Q) -> Option<i64> {
    if is_integer(x) {
        x.numer().to_i64()
    } else {
        None
    }
}

pub fn lcm_i64(a: i64, b: i64) -> i64 {
    a.lcm(&b)
}

/// Binomial coefficient `C(n, j)` for integer (possibly negative) `n`.
pub fn binom(n: &Q, j: usize) -> Q {
    let mut acc = Q::one();
    for i in 0..j {
        acc = acc * (n - q(i as i64)) / q(i as i64 + 1);
    }
    acc
}

/// Render a rational as `a` or `a/b`.
pub fn fmt_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(Q::new(n, d))
    } else {
        let n: BigInt = s.parse().ok()?;
        Some(Q::from_integer(n))
    }
}

pub fn sign(x: &Q) -> Sign {
    x.numer().sign()
}

/// Decimal rendering of `x` rounded toward negative (`up = false`) or positive infinity.
pub fn to_decimal(x: &Q, digits: usize, up: bool) -> String {
    let scale = num_traits::pow(BigInt::from(10), digits);
    let scaled = x * Q::from_integer(scale.clone());
    let v = if up { scaled.ceil() } else { scaled.floor() };
    let n = v.to_integer();
    let neg = n.is_negative();
    let digits_str = n.abs().to_string();
    let padded = format!("{:0>width$}", digits_str, width = digits + 1);
    let (int_part, frac_part) = padded.split_at(padded.len() - digits);
    format!("{}{}.{}", if neg { "-" } else { "" }, int_part, frac_part)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots() {
        assert_eq!(rational_root(&q(8), 3), Some(q(2)));
        assert_eq!(rational_root(&q(2), 2), None);
        assert_eq!(rational_root(&qf(-1, 27), 3), Some(qf(-1, 3)));
        assert_eq!(rational_root(&q(-4), 2), None);
    }

    #[test]
    fn binomials() {
        assert_eq!(binom(&q(-1), 3), q(-1));
        assert_eq!(binom(&q(5), 2), q(10));
        assert_eq!(binom(&q(2), 3), q(0));
    }

    #[test]
    fn decimals() {
        assert_eq!(to_decimal(&qf(1, 3), 4, false), "0.3333");
        assert_eq!(to_decimal(&qf(1, 3), 4, true), "0.3334");
        assert_eq!(to_decimal(&qf(-1, 3), 2, false), "-0.34");
    }
}
