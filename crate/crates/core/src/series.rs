//! Truncated Laurent/Puiseux series at zero and Laurent series in `1/x` at infinity.
//!
//! A series is stored in its local parameter `t` (`t = x` at zero, `t = 1/x` at
//! infinity): index `k` stands for `t^{k/ell}`. Every exponent below `order/ell`
//! is known; everything above is unknown.

use std::fmt;

use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::arith::rat::{binom, fmt_q, q, qpow, rational_root};
use crate::arith::{CaseTag, Point, Poly, RatFunc, Q};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    case: CaseTag,
    point: Point,
    ell: u64,
    start: i64,
    coeffs: Vec<Q>,
    order: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesOp {
    Add,
    Mul,
    Div,
}

fn point_of(case: &CaseTag) -> Result<Point> {
    case.point().ok_or_else(|| {
        Error::UnsupportedCase(format!(
            "{case}: meromorphic shift solutions have no series model"
        ))
    })
}

/// First `n` coefficients of `a / b` for power series with `b[0] != 0`.
pub fn power_series_div(a: &[Q], b: &[Q], n: usize) -> Vec<Q> {
    let inv = b[0].recip();
    let mut out: Vec<Q> = Vec::with_capacity(n);
    for k in 0..n {
        let mut s = a.get(k).cloned().unwrap_or_else(Q::zero);
        for j in 1..=k.min(b.len().saturating_sub(1)) {
            if !b[j].is_zero() && !out[k - j].is_zero() {
                s -= &b[j] * &out[k - j];
            }
        }
        out.push(s * &inv);
    }
    out
}

impl TruncatedSeries {
    /// `coeffs[i]` is the coefficient of index `start + i`; indices from the end of
    /// `coeffs` up to `order` are zero.
    pub fn new(case: CaseTag, ell: u64, start: i64, coeffs: Vec<Q>, order: i64) -> Result<Self> {
        let point = point_of(&case)?;
        if ell == 0 {
            return Err(Error::Semantic(
                "ramification index must be positive".into(),
            ));
        }
        if case.is_shift() && ell != 1 {
            return Err(Error::Semantic(
                "ramified series are not supported for the shift case".into(),
            ));
        }
        let mut s = TruncatedSeries {
            case,
            point,
            ell,
            start,
            coeffs,
            order,
        };
        s.normalize();
        Ok(s)
    }

    /// `O(t^{order/ell})`.
    pub fn zero(case: CaseTag, ell: u64, order: i64) -> Result<Self> {
        TruncatedSeries::new(case, ell, order, Vec::new(), order)
    }

    /// Builds a series from sparse `(index, coefficient)` terms; unlisted indices below
    /// `order` are zero.
    pub fn from_terms(case: CaseTag, ell: u64, terms: &[(i64, Q)], order: i64) -> Result<Self> {
        let start = terms.iter().map(|t| t.0).min().unwrap_or(order).min(order);
        let mut coeffs = vec![Q::zero(); (order - start).max(0) as usize];
        for (k, c) in terms {
            if *k < order {
                coeffs[(k - start) as usize] += c;
            }
        }
        TruncatedSeries::new(case, ell, start, coeffs, order)
    }

    fn normalize(&mut self) {
        let len = (self.order - self.start).max(0) as usize;
        self.coeffs.resize(len, Q::zero());
        match self.coeffs.iter().position(|c| !c.is_zero()) {
            Some(0) => {}
            Some(p) => {
                self.coeffs.drain(..p);
                self.start += p as i64;
            }
            None => {
                self.coeffs.clear();
                self.start = self.order;
            }
        }
    }

    pub fn case(&self) -> &CaseTag {
        &self.case
    }

    pub fn point(&self) -> Point {
        self.point
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }

    /// Index of the first nonzero coefficient, `None` for a zero truncation.
    pub fn valuation(&self) -> Option<i64> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.start)
        }
    }

    /// First stored index (equals `order` for a zero truncation).
    pub fn start(&self) -> i64 {
        self.start
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of index `k`, `None` if it lies beyond the truncation.
    pub fn coeff(&self, k: i64) -> Option<Q> {
        if k >= self.order {
            None
        } else if k < self.start {
            Some(Q::zero())
        } else {
            Some(self.coeffs[(k - self.start) as usize].clone())
        }
    }

    /// Drops everything from index `order` on.
    pub fn truncate(&self, order: i64) -> Self {
        let mut s = self.clone();
        if order < s.order {
            s.order = order;
            s.normalize();
        }
        s
    }

    /// Re-expresses the series with a ramification index that is a multiple of `ell`.
    pub fn ramify(&self, ell: u64) -> Result<Self> {
        if ell % self.ell != 0 {
            return Err(Error::Internal(format!(
                "ramification {} does not divide {ell}",
                self.ell
            )));
        }
        let f = (ell / self.ell) as i64;
        if f == 1 {
            return Ok(self.clone());
        }
        let mut coeffs = vec![Q::zero(); ((self.order - self.start) * f) as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i * f as usize] = c.clone();
        }
        TruncatedSeries::new(
            self.case.clone(),
            ell,
            self.start * f,
            coeffs,
            self.order * f,
        )
    }

    /// Reads a series in `z = x^{1/ell}` (computed with `ell = 1`) as a Puiseux series.
    pub fn reinterpret_ramified(&self, ell: u64, case_in_x: CaseTag) -> Result<Self> {
        TruncatedSeries::new(case_in_x, ell, self.start, self.coeffs.clone(), self.order)
    }

    fn check_compatible(&self, o: &Self) -> Result<()> {
        if self.case != o.case || self.point != o.point {
            return Err(Error::CaseMismatch(
                self.case.spec_string(),
                o.case.spec_string(),
            ));
        }
        Ok(())
    }

    fn merged(&self, o: &Self) -> Result<(Self, Self)> {
        self.check_compatible(o)?;
        let l = self.ell.lcm(&o.ell);
        Ok((self.ramify(l)?, o.ramify(l)?))
    }

    fn with_coeffs(&self, start: i64, coeffs: Vec<Q>, order: i64) -> Self {
        let mut s = TruncatedSeries {
            case: self.case.clone(),
            point: self.point,
            ell: self.ell,
            start,
            coeffs,
            order,
        };
        s.normalize();
        s
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        let (a, b) = self.merged(o)?;
        let order = a.order.min(b.order);
        let start = a.start.min(b.start).min(order);
        let mut coeffs = vec![Q::zero(); (order - start) as usize];
        for s in [&a, &b] {
            for (i, c) in s.coeffs.iter().enumerate() {
                let k = s.start + i as i64;
                if k < order {
                    coeffs[(k - start) as usize] += c;
                }
            }
        }
        Ok(a.with_coeffs(start, coeffs, order))
    }

    pub fn neg(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|c| -c).collect();
        self.with_coeffs(self.start, coeffs, self.order)
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &Q) -> Self {
        let coeffs = self.coeffs.iter().map(|a| a * c).collect();
        self.with_coeffs(self.start, coeffs, self.order)
    }

    /// Multiplication by `t^{k/ell}`.
    pub fn shift_index(&self, k: i64) -> Self {
        self.with_coeffs(self.start + k, self.coeffs.clone(), self.order + k)
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        let (a, b) = self.merged(o)?;
        match (a.valuation(), b.valuation()) {
            (None, None) => Ok(a.with_coeffs(0, Vec::new(), a.order + b.order)),
            (None, Some(vb)) => Ok(a.with_coeffs(0, Vec::new(), a.order + vb)),
            (Some(va), None) => Ok(a.with_coeffs(0, Vec::new(), b.order + va)),
            (Some(va), Some(vb)) => {
                let order = (a.order + vb).min(b.order + va);
                let n = (order - va - vb) as usize;
                let mut c = vec![Q::zero(); n];
                for (i, ai) in a.coeffs.iter().enumerate().take(n) {
                    if ai.is_zero() {
                        continue;
                    }
                    for (j, bj) in b.coeffs.iter().enumerate().take(n - i) {
                        if !bj.is_zero() {
                            c[i + j] += ai * bj;
                        }
                    }
                }
                Ok(a.with_coeffs(va + vb, c, order))
            }
        }
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        let (a, b) = self.merged(o)?;
        let vb = b.valuation().ok_or(Error::ZeroDivisor)?;
        let rb = b.order - vb;
        match a.valuation() {
            None => Ok(a.with_coeffs(0, Vec::new(), a.order - vb)),
            Some(va) => {
                let r = (a.order - va).min(rb);
                let c = power_series_div(&a.coeffs, &b.coeffs, r as usize);
                Ok(a.with_coeffs(va - vb, c, va - vb + r))
            }
        }
    }

    /// `σ(f)`.
    pub fn sigma(&self) -> Result<Self> {
        match &self.case {
            CaseTag::Mahler { p } => {
                let p = *p as i64;
                let mut c = vec![Q::zero(); ((self.order - self.start) * p).max(0) as usize];
                for (i, a) in self.coeffs.iter().enumerate() {
                    c[i * p as usize] = a.clone();
                }
                Ok(self.with_coeffs(self.start * p, c, self.order * p))
            }
            CaseTag::QDiff { q: qv } => {
                let r = rational_root(qv, self.ell).ok_or_else(|| {
                    Error::NonRationalRamifiedParameter {
                        q: fmt_q(qv),
                        ell: self.ell,
                    }
                })?;
                let mut pw = qpow(&r, self.start);
                let mut c = Vec::with_capacity(self.coeffs.len());
                for a in &self.coeffs {
                    c.push(a * &pw);
                    pw *= &r;
                }
                Ok(self.with_coeffs(self.start, c, self.order))
            }
            CaseTag::Shift { h, .. } => {
                // x^{-k} (1 + h/x)^{-k} = Σ_j C(-k, j) h^j x^{-k-j}
                let n = self.coeffs.len();
                let mut c = vec![Q::zero(); n];
                for (i, a) in self.coeffs.iter().enumerate() {
                    if a.is_zero() {
                        continue;
                    }
                    let mk = q(-(self.start + i as i64));
                    let mut hp = Q::one();
                    for j in 0..n - i {
                        let b = binom(&mk, j);
                        if !b.is_zero() {
                            c[i + j] += a * &b * &hp;
                        }
                        hp *= h;
                    }
                }
                Ok(self.with_coeffs(self.start, c, self.order))
            }
        }
    }

    /// `σ^k(f)`.
    pub fn sigma_pow(&self, k: u32) -> Result<Self> {
        let mut s = self.clone();
        for _ in 0..k {
            s = s.sigma()?;
        }
        Ok(s)
    }

    /// The case derivation applied termwise.
    pub fn derive(&self) -> Self {
        match self.point {
            Point::Zero => {
                let l = q(self.ell as i64);
                let c = self
                    .coeffs
                    .iter()
                    .enumerate()
                    .map(|(i, a)| a * q(self.start + i as i64) / &l)
                    .collect();
                self.with_coeffs(self.start, c, self.order)
            }
            Point::Infinity => {
                // d/dx x^{-k} = -k x^{-k-1}
                let c = self
                    .coeffs
                    .iter()
                    .enumerate()
                    .map(|(i, a)| a * q(-(self.start + i as i64)))
                    .collect();
                self.with_coeffs(self.start + 1, c, self.order + 1)
            }
        }
    }

    /// Product with a rational function of `x`, keeping the order of `self` relative
    /// to its valuation.
    pub fn mul_ratfunc(&self, a: &RatFunc) -> Result<Self> {
        if a.is_zero() {
            return Ok(self.with_coeffs(0, Vec::new(), self.order));
        }
        let ell = self.ell as i64;
        let va = local_valuation(a, self.point) * ell;
        let need = match self.valuation() {
            Some(v) => self.order - v + va,
            None => va + 1,
        };
        let need_x = Integer::div_ceil(&need, &ell);
        let ea = expand_ratfunc(a, &self.case, need_x)?.ramify(self.ell)?;
        ea.mul(self)
    }

    /// Evaluates the truncation as a rational function (a Laurent polynomial).
    pub fn to_laurent(&self) -> Option<RatFunc> {
        if self.ell != 1 {
            return None;
        }
        let mut acc = RatFunc::zero();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let k = self.start + i as i64;
            let e = match self.point {
                Point::Zero => k,
                Point::Infinity => -k,
            };
            acc = &acc + &RatFunc::x_pow(e).scale(c);
        }
        Some(acc)
    }

    /// Nonzero terms as `((num, den), coeff)` with the exponent of `x` equal to `num/den`.
    pub fn terms(&self) -> Vec<((i64, i64), Q)> {
        let sgn = match self.point {
            Point::Zero => 1,
            Point::Infinity => -1,
        };
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| {
                let k = sgn * (self.start + i as i64);
                let g = k.gcd(&(self.ell as i64)).max(1);
                ((k / g, self.ell as i64 / g), c.clone())
            })
            .collect()
    }

    /// Exponent of `x` of the truncation `O(.)`, as `(num, den)`.
    pub fn order_exponent(&self) -> (i64, i64) {
        let k = match self.point {
            Point::Zero => self.order,
            Point::Infinity => -self.order,
        };
        let g = k.gcd(&(self.ell as i64)).max(1);
        (k / g, self.ell as i64 / g)
    }

    pub fn to_json(&self) -> SeriesJson {
        let (on, od) = self.order_exponent();
        SeriesJson {
            case: self.case.spec_string(),
            point: self.point,
            ramification: self.ell,
            valuation: self.valuation(),
            order: self.order,
            order_exponent: fmt_exp(on, od),
            terms: self
                .terms()
                .into_iter()
                .map(|((n, d), c)| (fmt_exp(n, d), fmt_q(&c)))
                .collect(),
            text: self.to_string(),
        }
    }
}

fn fmt_exp(n: i64, d: i64) -> String {
    if d == 1 {
        n.to_string()
    } else {
        format!("{n}/{d}")
    }
}

fn fmt_mono(n: i64, d: i64) -> String {
    match (n, d) {
        (0, _) => "1".into(),
        (1, 1) => "x".into(),
        (n, 1) if n > 0 => format!("x^{n}"),
        (n, 1) => format!("x^({n})"),
        (n, d) => format!("x^({n}/{d})"),
    }
}

/// JSON form of a series.
#[derive(Clone, Debug, Serialize)]
pub struct SeriesJson {
    pub case: String,
    pub point: Point,
    pub ramification: u64,
    pub valuation: Option<i64>,
    pub order: i64,
    pub order_exponent: String,
    pub terms: Vec<(String, String)>,
    pub text: String,
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        for ((n, d), c) in self.terms() {
            let m = fmt_mono(n, d);
            let s = if m == "1" {
                fmt_q(&c)
            } else if c.is_one() {
                m
            } else if c == -Q::one() {
                format!("-{m}")
            } else {
                format!("{}*{m}", fmt_q(&c))
            };
            parts.push(s);
        }
        let (on, od) = self.order_exponent();
        parts.push(format!("O({})", fmt_mono(on, od)));
        let mut out = String::new();
        for (i, p) in parts.iter().enumerate() {
            if i == 0 {
                out.push_str(p);
            } else if let Some(r) = p.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(r);
            } else {
                out.push_str(" + ");
                out.push_str(p);
            }
        }
        f.write_str(&out)
    }
}

/// Order of `f` at the point in the local parameter (`t = x` or `t = 1/x`).
pub fn local_valuation(f: &RatFunc, point: Point) -> i64 {
    match point {
        Point::Zero => f.valuation().unwrap_or(0),
        Point::Infinity => -f.degree().unwrap_or(0),
    }
}

/// Exact expansion of `f` at the expansion point of `case`, every index below `order` known.
pub fn expand_ratfunc(f: &RatFunc, case: &CaseTag, order: i64) -> Result<TruncatedSeries> {
    let point = point_of(case)?;
    if f.is_zero() {
        return TruncatedSeries::zero(case.clone(), 1, order);
    }
    let (start, num, den) = match point {
        Point::Zero => {
            let vn = f.num().valuation().unwrap();
            let vd = f.den().valuation().unwrap();
            (
                vn as i64 - vd as i64,
                f.num().shift_down(vn),
                f.den().shift_down(vd),
            )
        }
        Point::Infinity => {
            let dn = f.num().deg();
            let dd = f.den().deg();
            (
                dd - dn,
                f.num().reverse(dn as usize),
                f.den().reverse(dd as usize),
            )
        }
    };
    let n = (order - start).max(0) as usize;
    let c = power_series_div(num.coeffs(), den.coeffs(), n);
    TruncatedSeries::new(case.clone(), 1, start, c, order.max(start)).map(|s| {
        if order < start {
            s.truncate(order)
        } else {
            s
        }
    })
}

/// Expansion of a polynomial given by its coefficients (exact, any order).
pub fn expand_poly(p: &Poly, case: &CaseTag, order: i64) -> Result<TruncatedSeries> {
    expand_ratfunc(&RatFunc::from_poly(p.clone()), case, order)
}

/// `series_arith` dispatcher.
pub fn series_arith(
    a: &TruncatedSeries,
    b: &TruncatedSeries,
    op: SeriesOp,
) -> Result<TruncatedSeries> {
    match op {
        SeriesOp::Add => a.add(b),
        SeriesOp::Mul => a.mul(b),
        SeriesOp::Div => a.div(b),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat::qf;

    fn mahler() -> CaseTag {
        CaseTag::mahler(2).unwrap()
    }

    fn s_inf() -> CaseTag {
        CaseTag::shift(q(1)).unwrap()
    }

    fn ser(case: CaseTag, terms: &[(i64, i64)], order: i64) -> TruncatedSeries {
        let t: Vec<(i64, Q)> = terms.iter().map(|&(k, c)| (k, q(c))).collect();
        TruncatedSeries::from_terms(case, 1, &t, order).unwrap()
    }

    #[test]
    fn arithmetic_examples() {
        let a = ser(mahler(), &[(0, 1), (1, 1)], 6);
        let b = ser(mahler(), &[(0, 1), (1, -1)], 6);
        let s = a.add(&b).unwrap();
        assert_eq!(s, ser(mahler(), &[(0, 2)], 6));
        let geo = expand_ratfunc(
            &RatFunc::new(Poly::one(), Poly::from_i64(&[1, -1])),
            &mahler(),
            6,
        )
        .unwrap();
        let p = geo.mul(&ser(mahler(), &[(0, 1), (1, -1)], 6)).unwrap();
        assert_eq!(p, ser(mahler(), &[(0, 1)], 6));
        let t = ser(s_inf(), &[(1, 1)], 5);
        let t2 = t.mul(&t).unwrap();
        assert_eq!(t2.valuation(), Some(2));
        assert_eq!(t2.order(), 6);
        assert!(matches!(
            a.div(&TruncatedSeries::zero(mahler(), 1, 4).unwrap()),
            Err(Error::ZeroDivisor)
        ));
    }

    #[test]
    fn sigma_examples() {
        let f = ser(mahler(), &[(1, 1), (2, 1)], 3);
        let g = f.sigma().unwrap();
        assert_eq!(g, ser(mahler(), &[(2, 1), (4, 1)], 6));
        let q3 = CaseTag::qdiff(q(3)).unwrap();
        assert_eq!(
            ser(q3.clone(), &[(0, 1), (1, 1)], 4).sigma().unwrap(),
            ser(q3, &[(0, 1), (1, 3)], 4)
        );
        let inv = ser(s_inf(), &[(1, 1)], 6).sigma().unwrap();
        let exact = expand_ratfunc(
            &RatFunc::new(Poly::one(), Poly::from_i64(&[1, 1])),
            &s_inf(),
            6,
        )
        .unwrap();
        assert_eq!(inv, exact);
        assert_eq!(inv.coeffs(), &[q(1), q(-1), q(1), q(-1), q(1)]);
    }

    #[test]
    fn ramified_sigma_needs_rational_root() {
        let q2 = CaseTag::qdiff(q(2)).unwrap();
        let f = TruncatedSeries::from_terms(q2, 2, &[(1, q(1))], 4).unwrap();
        assert!(matches!(
            f.sigma(),
            Err(Error::NonRationalRamifiedParameter { .. })
        ));
        let q4 = CaseTag::qdiff(q(4)).unwrap();
        let f = TruncatedSeries::from_terms(q4, 2, &[(1, q(1))], 4).unwrap();
        assert_eq!(f.sigma().unwrap().coeff(1), Some(q(2)));
    }

    #[test]
    fn derive_examples() {
        let f = ser(mahler(), &[(1, 1), (4, 1)], 6);
        assert_eq!(f.derive(), ser(mahler(), &[(1, 1), (4, 4)], 6));
        let g = ser(s_inf(), &[(1, 1)], 4).derive();
        assert_eq!(g, ser(s_inf(), &[(2, -1)], 5));
        let c = ser(CaseTag::qdiff(q(2)).unwrap(), &[(0, 5)], 4).derive();
        assert!(c.is_zero());
    }

    #[test]
    fn expansion_examples() {
        let e = expand_ratfunc(
            &RatFunc::new(Poly::one(), Poly::from_i64(&[1, -1])),
            &mahler(),
            4,
        )
        .unwrap();
        assert_eq!(e.coeffs(), &[q(1), q(1), q(1), q(1)]);
        let f = RatFunc::new(Poly::x(), Poly::from_i64(&[-1, 1]));
        let e = expand_ratfunc(&f, &s_inf(), 3).unwrap();
        assert_eq!(e.to_string(), "1 + x^(-1) + x^(-2) + O(x^(-3))");
        // multiply back by (x - 1) expanded at infinity
        let back = e
            .mul(
                &expand_ratfunc(&RatFunc::from_poly(Poly::from_i64(&[-1, 1])), &s_inf(), 2)
                    .unwrap(),
            )
            .unwrap();
        assert_eq!(back.coeff(-1), Some(q(1)));
        assert_eq!(back.coeff(0), Some(q(0)));
        let x2 = expand_ratfunc(&RatFunc::x_pow(2), &mahler(), 8).unwrap();
        assert_eq!(x2.to_string(), "x^2 + O(x^8)");
    }

    #[test]
    fn mul_ratfunc_keeps_relative_order() {
        let f = ser(mahler(), &[(1, 1), (2, 1)], 10);
        let a = RatFunc::new(Poly::one(), Poly::from_i64(&[0, 1, -1]));
        let g = f.mul_ratfunc(&a).unwrap();
        assert_eq!(g.valuation(), Some(0));
        assert_eq!(g.order(), 9);
        let _ = qf(1, 2);
    }
}
