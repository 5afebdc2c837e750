//! Operators `Σ a_i ρ^i` with rational coefficients and the twisted rule `ρ a = σ(a) ρ`.

use std::fmt;

use num_traits::One;
use serde::Serialize;

use crate::arith::poly::render_poly;
use crate::arith::{CaseTag, Poly, RatFunc};
use crate::error::{Error, Result};
use crate::series::TruncatedSeries;
use crate::system::DiffSystem;

/// `Σ_{i=0}^{n} a_i ρ^i`. Coefficients are kept as given (each in canonical form), with
/// no trailing zero; the zero operator has no coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DiffOperator {
    case: CaseTag,
    coeffs: Vec<RatFunc>,
}

impl DiffOperator {
    pub fn new(case: CaseTag, mut coeffs: Vec<RatFunc>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        DiffOperator { case, coeffs }
    }

    pub fn from_polys(case: CaseTag, coeffs: Vec<Poly>) -> Self {
        DiffOperator::new(case, coeffs.into_iter().map(RatFunc::from_poly).collect())
    }

    pub fn zero(case: CaseTag) -> Self {
        DiffOperator::new(case, Vec::new())
    }

    /// The operator `a` of order zero.
    pub fn scalar(case: CaseTag, a: RatFunc) -> Self {
        DiffOperator::new(case, vec![a])
    }

    pub fn one(case: CaseTag) -> Self {
        DiffOperator::scalar(case, RatFunc::one())
    }

    /// `ρ^k`
    pub fn rho_pow(case: CaseTag, k: usize) -> Self {
        let mut c = vec![RatFunc::zero(); k + 1];
        c[k] = RatFunc::one();
        DiffOperator::new(case, c)
    }

    /// `ρ - a`
    pub fn first_order(case: CaseTag, a: RatFunc) -> Self {
        DiffOperator::new(case, vec![-a, RatFunc::one()])
    }

    pub fn case(&self) -> &CaseTag {
        &self.case
    }

    pub fn coeffs(&self) -> &[RatFunc] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> RatFunc {
        self.coeffs.get(i).cloned().unwrap_or_else(RatFunc::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Order; the zero operator has order `-1`.
    pub fn order(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    pub fn leading(&self) -> RatFunc {
        self.coeffs.last().cloned().unwrap_or_else(RatFunc::zero)
    }

    /// Largest `k` with `a_0 = .. = a_{k-1} = 0`.
    pub fn trailing_index(&self) -> usize {
        self.coeffs.iter().position(|c| !c.is_zero()).unwrap_or(0)
    }

    /// `(content, monic)` with `self = content * monic` and the leading coefficient of
    /// `monic` equal to one.
    pub fn normalize(&self) -> (RatFunc, DiffOperator) {
        if self.is_zero() {
            return (RatFunc::one(), self.clone());
        }
        let l = self.leading();
        let inv = l.inv().expect("nonzero leading coefficient");
        (l, self.scale_left(&inv))
    }

    pub fn monic(&self) -> DiffOperator {
        self.normalize().1
    }

    /// Writes `self = L' ρ^k` with `L'` having a nonzero trailing coefficient.
    pub fn strip_rho_power(&self) -> (DiffOperator, usize) {
        let k = self.trailing_index();
        (
            DiffOperator::new(self.case.clone(), self.coeffs[k..].to_vec()),
            k,
        )
    }

    /// Left multiplication by a rational function giving polynomial coefficients with
    /// no common factor and a monic leading coefficient.
    pub fn clear_denominators(&self) -> Vec<Poly> {
        if self.is_zero() {
            return Vec::new();
        }
        let mut den = Poly::one();
        for c in &self.coeffs {
            let g = den.gcd(c.den());
            den = (&den * c.den()).exact_div(&g).unwrap();
        }
        let polys: Vec<Poly> = self
            .coeffs
            .iter()
            .map(|c| (c.num() * &den).exact_div(c.den()).unwrap())
            .collect();
        let mut g = Poly::zero();
        for p in &polys {
            g = g.gcd(p);
        }
        let polys: Vec<Poly> = polys.iter().map(|p| p.exact_div(&g).unwrap()).collect();
        let inv = polys.last().unwrap().lc().recip();
        polys.iter().map(|p| p.scale(&inv)).collect()
    }

    fn check_case(&self, o: &DiffOperator) -> Result<()> {
        if self.case != o.case {
            return Err(Error::CaseMismatch(
                self.case.spec_string(),
                o.case.spec_string(),
            ));
        }
        Ok(())
    }

    pub fn add(&self, o: &DiffOperator) -> Result<DiffOperator> {
        self.check_case(o)?;
        let n = self.coeffs.len().max(o.coeffs.len());
        let c = (0..n).map(|i| &self.coeff(i) + &o.coeff(i)).collect();
        Ok(DiffOperator::new(self.case.clone(), c))
    }

    pub fn neg(&self) -> DiffOperator {
        DiffOperator::new(
            self.case.clone(),
            self.coeffs.iter().map(|c| -c.clone()).collect(),
        )
    }

    pub fn sub(&self, o: &DiffOperator) -> Result<DiffOperator> {
        self.add(&o.neg())
    }

    /// `a · L`
    pub fn scale_left(&self, a: &RatFunc) -> DiffOperator {
        DiffOperator::new(
            self.case.clone(),
            self.coeffs.iter().map(|c| c * a).collect(),
        )
    }

    /// `L ∘ M`
    pub fn mul(&self, o: &DiffOperator) -> Result<DiffOperator> {
        self.check_case(o)?;
        if self.is_zero() || o.is_zero() {
            return Ok(DiffOperator::zero(self.case.clone()));
        }
        let mut c = vec![RatFunc::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                c[i + j] = &c[i + j] + &(a * &b.sigma_pow(&self.case, i as u32));
            }
        }
        Ok(DiffOperator::new(self.case.clone(), c))
    }

    /// `(Q, R)` with `self = Q ∘ d + R` and `order R < order d`.
    pub fn right_divmod(&self, d: &DiffOperator) -> Result<(DiffOperator, DiffOperator)> {
        self.check_case(d)?;
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = d.order() as usize;
        let ld = d.leading();
        let mut quo = vec![RatFunc::zero(); (self.order() - d.order()).max(0) as usize + 1];
        let mut r = self.clone();
        while r.order() >= d.order() {
            let k = (r.order() - d.order()) as usize;
            let c = r
                .leading()
                .checked_div(&ld.sigma_pow(&self.case, k as u32))?;
            let term = DiffOperator::rho_pow(self.case.clone(), k).scale_left(&c);
            r = r.sub(&term.mul(d)?)?;
            quo[k] = &quo[k] + &c;
            debug_assert!(r.order() < (k + n) as i64);
        }
        let quo = DiffOperator::new(self.case.clone(), quo);
        if quo.mul(d)?.add(&r)? != *self {
            return Err(Error::Internal("right division identity failed".into()));
        }
        Ok((quo, r))
    }

    /// `Σ a_i σ^i(f)` for a rational function.
    pub fn apply(&self, f: &RatFunc) -> RatFunc {
        let mut acc = RatFunc::zero();
        let mut s = f.clone();
        for (i, a) in self.coeffs.iter().enumerate() {
            if i > 0 {
                s = s.sigma(&self.case);
            }
            if !a.is_zero() {
                acc = &acc + &(a * &s);
            }
        }
        acc
    }

    /// `Σ a_i σ^i(f)` on a truncated series, to its guaranteed order.
    pub fn apply_series(&self, f: &TruncatedSeries) -> Result<TruncatedSeries> {
        if *f.case() != self.case {
            return Err(Error::CaseMismatch(
                self.case.spec_string(),
                f.case().spec_string(),
            ));
        }
        let mut acc: Option<TruncatedSeries> = None;
        let mut s = f.clone();
        for (i, a) in self.coeffs.iter().enumerate() {
            if i > 0 {
                s = s.sigma()?;
            }
            if a.is_zero() {
                continue;
            }
            let t = s.mul_ratfunc(a)?;
            acc = Some(match acc {
                None => t,
                Some(x) => x.add(&t)?,
            });
        }
        match acc {
            Some(a) => Ok(a),
            None => TruncatedSeries::zero(self.case.clone(), f.ell(), i64::MAX / 8),
        }
    }

    /// Companion system `ρ(Y) = A Y` for `Y = (y, ρy, ..., ρ^{n-1} y)`.
    pub fn companion_matrix(&self) -> Result<DiffSystem> {
        if self.order() < 1 {
            return Err(Error::Semantic("companion matrix needs order >= 1".into()));
        }
        if self.coeffs[0].is_zero() {
            return Err(Error::ZeroTrailingCoefficient);
        }
        let m = self.monic();
        let n = m.order() as usize;
        let mut a = vec![vec![RatFunc::zero(); n]; n];
        for (i, row) in a.iter_mut().enumerate().take(n - 1) {
            row[i + 1] = RatFunc::one();
        }
        for j in 0..n {
            a[n - 1][j] = -m.coeffs[j].clone();
        }
        DiffSystem::new(self.case.clone(), a)
    }

    /// Builds `D = ρ - σ(g)/g` from a nonzero rational solution `g` and checks that it
    /// divides `self` on the right.
    pub fn right_factor_from_rational_solution(&self, g: &RatFunc) -> Result<DiffOperator> {
        if g.is_zero() || !self.apply(g).is_zero() {
            return Err(Error::NotASolution);
        }
        let d = DiffOperator::first_order(self.case.clone(), g.sigma(&self.case).checked_div(g)?);
        let (_, r) = self.right_divmod(&d)?;
        if !r.is_zero() {
            return Err(Error::Internal(
                "rational solution gave no right factor".into(),
            ));
        }
        Ok(d)
    }

    /// The same operator read for the case `case` (e.g. after de-ramification).
    pub fn with_case(&self, case: CaseTag) -> DiffOperator {
        DiffOperator::new(case, self.coeffs.clone())
    }

    pub fn render(&self) -> String {
        render_operator(&self.coeffs, "S")
    }

    pub fn to_json(&self) -> OperatorJson {
        OperatorJson {
            case: self.case.spec_string(),
            order: self.order(),
            coefficients: self.coeffs.iter().map(|c| c.render("x")).collect(),
            text: self.render(),
        }
    }
}

/// JSON form of an operator.
#[derive(Clone, Debug, Serialize)]
pub struct OperatorJson {
    pub case: String,
    pub order: i64,
    pub coefficients: Vec<String>,
    pub text: String,
}

fn is_simple_monomial(p: &Poly) -> bool {
    p.is_monomial() && p.lc().is_one()
}

/// Renders `Σ a_i S^i` in descending powers, e.g. `S^2 - (1+x)S + x`.
pub fn render_operator(coeffs: &[RatFunc], var: &str) -> String {
    let mut out = String::new();
    for i in (0..coeffs.len()).rev() {
        let a = &coeffs[i];
        if a.is_zero() {
            continue;
        }
        // sign as displayed: rendering normalizes the denominator, which may flip it
        let shown = a.render("x");
        let neg = shown.starts_with('-') || shown.starts_with("(-");
        let body = if neg { -a.clone() } else { a.clone() };
        let rho = match i {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{i}"),
        };
        let term = if i == 0 {
            let r = body.render("x");
            let sum = body.den().is_one()
                && body
                    .num()
                    .coeffs()
                    .iter()
                    .filter(|c| !num_traits::Zero::is_zero(*c))
                    .count()
                    > 1;
            if neg && sum {
                format!("({r})")
            } else {
                r
            }
        } else if body.is_one() {
            rho
        } else if body.is_polynomial() && (body.is_constant() || is_simple_monomial(body.num())) {
            format!("{}{rho}", render_poly(body.num(), "x"))
        } else {
            format!("({}){rho}", body.render("x"))
        };
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        out.push_str(&term);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

impl fmt::Display for DiffOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat::q;
    use crate::series::expand_ratfunc;

    fn shift1() -> CaseTag {
        CaseTag::shift(q(1)).unwrap()
    }

    fn poly(c: &[i64]) -> RatFunc {
        RatFunc::from_poly(Poly::from_i64(c))
    }

    fn op(case: CaseTag, c: &[&[i64]]) -> DiffOperator {
        DiffOperator::new(case, c.iter().map(|p| poly(p)).collect())
    }

    #[test]
    fn multiplication_examples() {
        let m = CaseTag::mahler(2).unwrap();
        let a = op(m.clone(), &[&[-1], &[1]]);
        let b = op(m.clone(), &[&[1], &[1]]);
        assert_eq!(a.mul(&b).unwrap(), op(m, &[&[-1], &[0], &[1]]));
        let rho = DiffOperator::rho_pow(shift1(), 1);
        let x = DiffOperator::scalar(shift1(), RatFunc::x());
        assert_eq!(rho.mul(&x).unwrap(), op(shift1(), &[&[0], &[1, 1]]));
        let l = op(shift1(), &[&[0, -1], &[1]])
            .mul(&op(shift1(), &[&[-1], &[1]]))
            .unwrap();
        assert_eq!(l, op(shift1(), &[&[0, 1], &[-1, -1], &[1]]));
        assert_eq!(l.render(), "S^2 - (1+x)S + x");
    }

    #[test]
    fn division_examples() {
        let l = op(shift1(), &[&[0, 1], &[-1, -1], &[1]]);
        let d = op(shift1(), &[&[-1], &[1]]);
        let (qq, r) = l.right_divmod(&d).unwrap();
        assert_eq!(qq, op(shift1(), &[&[0, -1], &[1]]));
        assert!(r.is_zero());
        let (qq, r) = d.right_divmod(&d).unwrap();
        assert_eq!(qq, DiffOperator::one(shift1()));
        assert!(r.is_zero());
        let rho2 = DiffOperator::rho_pow(shift1(), 2);
        let (_, r) = rho2.right_divmod(&op(shift1(), &[&[0, -1], &[1]])).unwrap();
        assert!(!r.is_zero());
    }

    #[test]
    fn application_examples() {
        let m = CaseTag::mahler(2).unwrap();
        let l = op(m.clone(), &[&[-1], &[1]]);
        let f = expand_ratfunc(
            &RatFunc::from_poly(Poly::from_i64(&[0, 1, 1, 0, 1, 0, 0, 0, 1])),
            &m,
            16,
        )
        .unwrap();
        let r = l.apply_series(&f).unwrap();
        assert_eq!(r.coeff(1), Some(q(-1)));
        assert_eq!(r.valuation(), Some(1));
        assert_eq!(r.order(), 16);
        let a = RatFunc::new(Poly::from_i64(&[1, 1]), Poly::x());
        let l = DiffOperator::first_order(shift1(), a);
        assert!(l.apply(&RatFunc::x()).is_zero());
    }

    #[test]
    fn companion_and_factor() {
        let l = op(shift1(), &[&[0, 1], &[-1, -1], &[1]]);
        let s = l.companion_matrix().unwrap();
        assert_eq!(s.matrix()[1][0], poly(&[0, -1]));
        assert_eq!(s.matrix()[1][1], poly(&[1, 1]));
        assert_eq!(s.matrix()[0][1], RatFunc::one());
        let zero_trailing = op(shift1(), &[&[0], &[1]]);
        assert!(matches!(
            zero_trailing.companion_matrix(),
            Err(Error::ZeroTrailingCoefficient)
        ));
        let d = l
            .right_factor_from_rational_solution(&RatFunc::one())
            .unwrap();
        assert_eq!(d, op(shift1(), &[&[-1], &[1]]));
        let q2 = CaseTag::qdiff(q(2)).unwrap();
        let l2 = op(q2.clone(), &[&[-2], &[1]]);
        assert_eq!(
            l2.right_factor_from_rational_solution(&RatFunc::x())
                .unwrap(),
            l2
        );
        assert!(matches!(
            l2.right_factor_from_rational_solution(&RatFunc::one()),
            Err(Error::NotASolution)
        ));
    }
}
