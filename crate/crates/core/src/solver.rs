//! Series solutions from coefficient recurrences.
//!
//! After clearing denominators, the operator sends `t^e` (local parameter `t`) to a
//! series whose lowest possible index `φ(e)` is strictly increasing in `e`. Its
//! coefficient there, the indicial value `χ(e)`, vanishes only on a finite set of
//! resonances. The unknown coefficients are solved row by row; resonant ones become
//! parameters that must be pinned by the prefix or by later rows.

use std::collections::BTreeSet;

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::rat::{binom, q, qpow};
use crate::arith::{CaseTag, Point, Poly, RatFunc, Q};
use crate::error::{Error, Result};
use crate::ore::DiffOperator;
use crate::series::{expand_ratfunc, TruncatedSeries};

/// Rows beyond this many are refused.
pub const MAX_ROWS: i64 = 1 << 16;

/// The triangular structure of an operator with polynomial coefficients.
#[derive(Clone, Debug)]
pub struct Recurrence {
    case: CaseTag,
    c: Vec<Poly>,
    /// Shift case: `b_k = Σ_{i>=k} C(i,k) c_i` and `μ = max(deg b_k - k)`.
    b: Vec<Poly>,
    mu: i64,
}

fn falling_neg(k: usize) -> Poly {
    // (-e)(-e-1)...(-e-k+1) as a polynomial in e
    let mut acc = Poly::one();
    for j in 0..k {
        acc = &acc * &Poly::new(vec![q(-(j as i64)), q(-1)]);
    }
    acc
}

impl Recurrence {
    pub fn new(case: CaseTag, c: Vec<Poly>) -> Result<Self> {
        if c.iter().all(|p| p.is_zero()) {
            return Err(Error::Semantic("zero operator".into()));
        }
        if case.point().is_none() {
            return Err(Error::UnsupportedCase(format!(
                "{case}: no series model for meromorphic shift solutions"
            )));
        }
        let mut b = Vec::new();
        let mut mu = i64::MIN;
        if case.is_shift() {
            for k in 0..c.len() {
                let mut s = Poly::zero();
                for (i, ci) in c.iter().enumerate().skip(k) {
                    s = &s + &ci.scale(&binom(&q(i as i64), k));
                }
                if !s.is_zero() {
                    mu = mu.max(s.deg() - k as i64);
                }
                b.push(s);
            }
        }
        Ok(Recurrence { case, c, b, mu })
    }

    pub fn from_operator(op: &DiffOperator) -> Result<(Self, RatFunc)> {
        let (polys, m) = cleared(op);
        Ok((Recurrence::new(op.case().clone(), polys)?, m))
    }

    pub fn case(&self) -> &CaseTag {
        &self.case
    }

    pub fn coeffs(&self) -> &[Poly] {
        &self.c
    }

    /// Lowest index that `L(t^e)` can reach.
    pub fn phi(&self, e: i64) -> i64 {
        match &self.case {
            CaseTag::Mahler { p } => self
                .c
                .iter()
                .enumerate()
                .filter(|(_, ci)| !ci.is_zero())
                .map(|(i, ci)| ci.valuation().unwrap() as i64 + (*p as i64).pow(i as u32) * e)
                .min()
                .unwrap(),
            CaseTag::QDiff { .. } => self.vmin() + e,
            CaseTag::Shift { .. } => e - self.mu,
        }
    }

    fn vmin(&self) -> i64 {
        self.c.iter().filter_map(|ci| ci.valuation()).min().unwrap() as i64
    }

    /// Coefficient of `t^{φ(e)}` in `L(t^e)`.
    pub fn chi(&self, e: i64) -> Q {
        match &self.case {
            CaseTag::Mahler { p } => {
                let ph = self.phi(e);
                let mut s = Q::zero();
                for (i, ci) in self.c.iter().enumerate() {
                    if let Some(v) = ci.valuation() {
                        if v as i64 + (*p as i64).pow(i as u32) * e == ph {
                            s += ci.coeff(v);
                        }
                    }
                }
                s
            }
            CaseTag::QDiff { q: qv } => self.q_indicial().eval(&qpow(qv, e)),
            CaseTag::Shift { .. } => self.shift_indicial().eval(&q(e)),
        }
    }

    /// `P_0(t) = Σ_{i : val c_i minimal} c_i[vmin] t^i`, with `χ(e) = P_0(q^e)`.
    pub fn q_indicial(&self) -> Poly {
        let v = self.vmin() as usize;
        Poly::new(self.c.iter().map(|ci| ci.coeff(v)).collect())
    }

    /// Polynomial in `e` whose value is `χ(e)` in the shift case.
    pub fn shift_indicial(&self) -> Poly {
        let h = match &self.case {
            CaseTag::Shift { h, .. } => h.clone(),
            _ => unreachable!(),
        };
        let mut s = Poly::zero();
        for (k, bk) in self.b.iter().enumerate() {
            if !bk.is_zero() && bk.deg() - k as i64 == self.mu {
                s = &s + &falling_neg(k).scale(&(bk.lc() * qpow(&h, k as i64)));
            }
        }
        s
    }

    /// All integers `e` with `χ(e) = 0`, ascending.
    pub fn resonances(&self) -> Vec<i64> {
        let mut out = BTreeSet::new();
        match &self.case {
            CaseTag::Mahler { p } => {
                let nz: Vec<(i64, i64)> = self
                    .c
                    .iter()
                    .enumerate()
                    .filter_map(|(i, ci)| ci.valuation().map(|v| (i as i64, v as i64)))
                    .collect();
                for (a, &(i, vi)) in nz.iter().enumerate() {
                    for &(j, vj) in &nz[a + 1..] {
                        let den = (*p as i64).pow(j as u32) - (*p as i64).pow(i as u32);
                        if (vi - vj) % den == 0 {
                            let e = (vi - vj) / den;
                            if self.chi(e).is_zero() {
                                out.insert(e);
                            }
                        }
                    }
                }
            }
            CaseTag::QDiff { q: qv } => {
                let p0 = self.q_indicial();
                let p0 = crate::arith::dispersion::strip_x(&p0);
                if p0.deg() > 0 {
                    let hi = p0.root_bound().ln();
                    let lo = -(p0.reverse(p0.deg() as usize).root_bound().ln());
                    let lq = qv.abs().to_f64().unwrap().ln();
                    let (a, b) = if lq > 0.0 {
                        (lo / lq, hi / lq)
                    } else {
                        (hi / lq, lo / lq)
                    };
                    for e in (a.floor() as i64 - 1)..=(b.ceil() as i64 + 1) {
                        if p0.eval(&qpow(qv, e)).is_zero() {
                            out.insert(e);
                        }
                    }
                }
            }
            CaseTag::Shift { .. } => {
                let chi = self.shift_indicial();
                if chi.deg() > 0 {
                    let r = chi.root_bound().ceil() as i64 + 1;
                    for e in -r..=r {
                        if chi.eval(&q(e)).is_zero() {
                            out.insert(e);
                        }
                    }
                }
            }
        }
        out.into_iter().collect()
    }

    /// Nonzero entries `(row, value)` of `L(t^e)` with `row < limit`.
    pub fn column(&self, e: i64, limit: i64) -> Vec<(i64, Q)> {
        let mut out: Vec<(i64, Q)> = Vec::new();
        match &self.case {
            CaseTag::Mahler { p } => {
                for (i, ci) in self.c.iter().enumerate() {
                    let s = (*p as i64).pow(i as u32) * e;
                    for (k, a) in ci.coeffs().iter().enumerate() {
                        if !a.is_zero() && s + (k as i64) < limit {
                            out.push((s + k as i64, a.clone()));
                        }
                    }
                }
            }
            CaseTag::QDiff { q: qv } => {
                let qe = qpow(qv, e);
                let mut pw = Q::one();
                for ci in &self.c {
                    for (k, a) in ci.coeffs().iter().enumerate() {
                        if !a.is_zero() && e + (k as i64) < limit {
                            out.push((e + k as i64, a * &pw));
                        }
                    }
                    pw *= &qe;
                }
            }
            CaseTag::Shift { h, .. } => {
                // c_i(x) (x + i h)^{-e} = Σ_{k,j} c_i[k] C(-e, j) (i h)^j x^{k-e-j}
                let me = q(-e);
                for (i, ci) in self.c.iter().enumerate() {
                    let ih = h * q(i as i64);
                    for (k, a) in ci.coeffs().iter().enumerate() {
                        if a.is_zero() {
                            continue;
                        }
                        // running term C(-e, j) (i h)^j, updated by (-e - j)/(j + 1) · ih
                        let mut term = Q::one();
                        let mut j = 0i64;
                        while e + j - (k as i64) < limit {
                            if term.is_zero() {
                                break;
                            }
                            out.push((e + j - k as i64, a * &term));
                            if ih.is_zero() {
                                break;
                            }
                            term *= (&me - q(j)) / q(j + 1) * &ih;
                            j += 1;
                        }
                    }
                }
            }
        }
        out.sort_by_key(|r| r.0);
        let mut merged: Vec<(i64, Q)> = Vec::new();
        for (r, v) in out {
            match merged.last_mut() {
                Some(last) if last.0 == r => last.1 += v,
                _ => merged.push((r, v)),
            }
        }
        merged.retain(|(_, v)| !v.is_zero());
        merged
    }
}

/// `m · L` with polynomial coefficients, returned with the multiplier `m`.
pub fn cleared(op: &DiffOperator) -> (Vec<Poly>, RatFunc) {
    let mut den = Poly::one();
    for c in op.coeffs() {
        let g = den.gcd(c.den());
        den = (&den * c.den()).exact_div(&g).unwrap();
    }
    let polys = op
        .coeffs()
        .iter()
        .map(|c| (c.num() * &den).exact_div(c.den()).unwrap())
        .collect();
    (polys, RatFunc::from_poly(den))
}

/// Affine expressions `v[0] + Σ v[j] p_j` in the resonant parameters.
type Affine = Vec<Q>;

fn aff_axpy(dst: &mut Affine, c: &Q, src: &Affine) {
    if dst.len() < src.len() {
        dst.resize(src.len(), Q::zero());
    }
    for (d, s) in dst.iter_mut().zip(src) {
        if !s.is_zero() {
            *d -= c * s;
        }
    }
}

#[derive(Default)]
struct Constraints {
    /// Reduced rows `(pivot parameter, row)` with `row[pivot] = 1`.
    rows: Vec<(usize, Affine)>,
}

impl Constraints {
    /// Adds `a = 0`; returns `false` if inconsistent.
    fn add(&mut self, mut a: Affine) -> bool {
        for (piv, row) in &self.rows {
            if let Some(c) = a.get(*piv).cloned() {
                if !c.is_zero() {
                    aff_axpy(&mut a, &c, row);
                }
            }
        }
        let Some(piv) = (1..a.len()).find(|&j| !a[j].is_zero()) else {
            return a.first().is_none_or(|c| c.is_zero());
        };
        let inv = a[piv].recip();
        for v in a.iter_mut() {
            *v *= &inv;
        }
        for (_, row) in self.rows.iter_mut() {
            if let Some(c) = row.get(piv).cloned() {
                if !c.is_zero() {
                    aff_axpy(row, &c, &a);
                }
            }
        }
        self.rows.push((piv, a));
        true
    }

    fn is_pivot(&self, j: usize) -> bool {
        self.rows.iter().any(|(p, _)| *p == j)
    }

    /// Parameter values for a choice of the free ones (non-pivots).
    fn solve(&self, nparams: usize, free: &[(usize, Q)]) -> Vec<Q> {
        let mut vals = vec![Q::zero(); nparams + 1];
        vals[0] = Q::one();
        for (j, v) in free {
            vals[*j] = v.clone();
        }
        for (piv, row) in &self.rows {
            let mut s = Q::zero();
            for (j, c) in row.iter().enumerate() {
                if j != *piv && !c.is_zero() {
                    s -= c * &vals[j];
                }
            }
            vals[*piv] = s;
        }
        vals
    }
}

/// Result of the row-by-row solve.
struct Solved {
    /// Coefficient of index `start + i` as an affine expression.
    y: Vec<Affine>,
    start: i64,
    /// Exponent of every parameter.
    params: Vec<i64>,
    cons: Constraints,
}

fn eval_aff(a: &Affine, vals: &[Q]) -> Q {
    a.iter()
        .zip(vals)
        .filter(|(c, _)| !c.is_zero())
        .map(|(c, v)| c * v)
        .sum()
}

/// Solves `L y = rhs` for the coefficients of index `v..n`, with indices below
/// `given_to` fixed by `given`.
fn solve_rows(
    rec: &Recurrence,
    rhs: Option<&RatFunc>,
    v: i64,
    given: &dyn Fn(i64) -> Q,
    given_to: i64,
    n: i64,
) -> Result<Solved> {
    if n <= v {
        return Ok(Solved {
            y: Vec::new(),
            start: v,
            params: Vec::new(),
            cons: Constraints::default(),
        });
    }
    let limit = rec.phi(n - 1) + 1;
    let rhs_series = match rhs {
        Some(b) if !b.is_zero() => Some(expand_ratfunc(b, &rec.case, limit)?),
        _ => None,
    };
    let mut r_lo = rec.phi(v);
    if let Some(s) = &rhs_series {
        if let Some(vb) = s.valuation() {
            r_lo = r_lo.min(vb);
        }
    }
    if limit - r_lo > MAX_ROWS {
        return Err(Error::WindowTooLarge(limit - r_lo));
    }
    let rows = (limit - r_lo) as usize;
    let mut res: Vec<Affine> = vec![vec![Q::zero()]; rows];
    if let Some(s) = &rhs_series {
        for r in r_lo..limit {
            res[(r - r_lo) as usize][0] = s.coeff(r).unwrap();
        }
    }
    let mut cons = Constraints::default();
    let mut params: Vec<i64> = Vec::new();
    let mut y: Vec<Affine> = Vec::new();
    let mut next_row = r_lo;
    for e in v..n {
        let pe = rec.phi(e);
        // rows strictly between pivots are pure consistency conditions
        while next_row < pe {
            let a = std::mem::take(&mut res[(next_row - r_lo) as usize]);
            if !cons.add(a) {
                return Err(Error::InconsistentPrefix(next_row));
            }
            next_row += 1;
        }
        let chi = rec.chi(e);
        let pivot = res[(pe - r_lo) as usize].clone();
        let ye: Affine = if e < given_to {
            vec![given(e)]
        } else if !chi.is_zero() {
            pivot.iter().map(|c| c / &chi).collect()
        } else {
            params.push(e);
            let mut a = vec![Q::zero(); params.len() + 1];
            a[params.len()] = Q::one();
            a
        };
        for (r, c) in rec.column(e, limit) {
            aff_axpy(&mut res[(r - r_lo) as usize], &c, &ye);
        }
        let a = std::mem::take(&mut res[(pe - r_lo) as usize]);
        if !cons.add(a) {
            return Err(Error::InconsistentPrefix(e));
        }
        next_row = pe + 1;
        y.push(ye);
    }
    Ok(Solved {
        y,
        start: v,
        params,
        cons,
    })
}

fn check_case(op: &DiffOperator, f: &TruncatedSeries) -> Result<()> {
    let ok = match (op.case(), f.case()) {
        (CaseTag::QDiff { .. }, CaseTag::QDiff { .. }) => true,
        (a, b) => a == b,
    };
    if !ok || op.case().point() != Some(f.point()) {
        return Err(Error::CaseMismatch(
            op.case().spec_string(),
            f.case().spec_string(),
        ));
    }
    Ok(())
}

/// Brings `(op, rhs, prefix)` to `z = x^{1/ell}` so that every exponent is integral.
pub fn deramified(
    op: &DiffOperator,
    rhs: Option<&RatFunc>,
    prefix: &TruncatedSeries,
) -> Result<(DiffOperator, Option<RatFunc>, TruncatedSeries)> {
    let ell = prefix.ell();
    if ell == 1 {
        return Ok((op.clone(), rhs.cloned(), prefix.clone()));
    }
    let ctx = crate::arith::RamificationContext::new(ell)?;
    let zcase = ctx.case_in_z(op.case())?;
    let zop = DiffOperator::new(
        zcase.clone(),
        op.coeffs()
            .iter()
            .map(|c| c.inflate(ell as usize))
            .collect(),
    );
    let zrhs = rhs.map(|b| b.inflate(ell as usize));
    let zpre = TruncatedSeries::new(
        zcase,
        1,
        prefix.start(),
        prefix.coeffs().to_vec(),
        prefix.order(),
    )?;
    Ok((zop, zrhs, zpre))
}

/// The unique extension of `prefix` to order `n` of a solution of `op y = rhs`.
///
/// Every index below `prefix.order()` is taken from the prefix (indices below its first
/// stored term are zero).
pub fn extend_prefix(
    op: &DiffOperator,
    rhs: Option<&RatFunc>,
    prefix: &TruncatedSeries,
    n: i64,
) -> Result<TruncatedSeries> {
    check_case(op, prefix)?;
    let (zop, zrhs, zpre) = deramified(op, rhs, prefix)?;
    let (rec, m) = Recurrence::from_operator(&zop)?;
    let b = zrhs.map(|b| &b * &m);
    let v = zpre.start().min(0).min(lowest_start(&rec, b.as_ref()));
    let v = v.min(zpre.order());
    let given = |e: i64| zpre.coeff(e).unwrap();
    let n = n.max(zpre.order());
    let s = solve_rows(&rec, b.as_ref(), v, &given, zpre.order(), n)?;
    let free: Vec<i64> = s
        .params
        .iter()
        .enumerate()
        .filter(|(j, _)| !s.cons.is_pivot(j + 1))
        .map(|(_, e)| *e)
        .collect();
    if !free.is_empty() {
        return Err(Error::AmbiguousPrefix(free));
    }
    let vals = s.cons.solve(s.params.len(), &[]);
    let coeffs: Vec<Q> = s.y.iter().map(|a| eval_aff(a, &vals)).collect();
    let out = TruncatedSeries::new(prefix.case().clone(), prefix.ell(), s.start, coeffs, n)?;
    // post-check on the z-level series
    let zout = TruncatedSeries::new(
        zpre.case().clone(),
        1,
        out.start(),
        out.coeffs().to_vec(),
        n,
    )?;
    let (cz, mz) = cleared(&zop);
    let mut resid = apply_cleared(&cz, &zout)?;
    if let Some(b) = zrhs_of(op, rhs, prefix.ell()) {
        resid = resid.sub(&expand_ratfunc(&(&b * &mz), zpre.case(), resid.order())?)?;
    }
    if !resid.is_zero() {
        return Err(Error::Internal(format!(
            "extended series leaves residual at index {:?}",
            resid.valuation()
        )));
    }
    Ok(out)
}

/// `Σ c_i σ^i(f)` for polynomial `c_i`; cheaper than applying rational coefficients.
fn apply_cleared(c: &[Poly], f: &TruncatedSeries) -> Result<TruncatedSeries> {
    let mut acc: Option<TruncatedSeries> = None;
    let mut s = f.clone();
    for (i, ci) in c.iter().enumerate() {
        if i > 0 {
            s = s.sigma()?;
        }
        if ci.is_zero() {
            continue;
        }
        let t = s.mul_ratfunc(&RatFunc::from_poly(ci.clone()))?;
        acc = Some(match acc {
            None => t,
            Some(x) => x.add(&t)?,
        });
    }
    acc.ok_or_else(|| Error::Internal("zero operator".into()))
}

fn zrhs_of(_op: &DiffOperator, rhs: Option<&RatFunc>, ell: u64) -> Option<RatFunc> {
    rhs.filter(|b| !b.is_zero())
        .map(|b| b.inflate(ell as usize))
}

/// Lowest index a solution of `rec y = b` can start at when the prefix is silent:
/// the smallest resonance, or the index whose pivot meets the right-hand side.
fn lowest_start(rec: &Recurrence, b: Option<&RatFunc>) -> i64 {
    let mut lo = rec.resonances().first().copied().unwrap_or(0);
    if let Some(b) = b {
        if !b.is_zero() {
            let vb = crate::series::local_valuation(b, rec.case.point().unwrap());
            // smallest e with φ(e) <= vb
            let mut e = lo.min(0);
            while rec.phi(e) > vb {
                e -= 1;
            }
            lo = lo.min(e);
        }
    }
    lo.min(0)
}

/// Smallest prefix order that pins the solution: one past the largest resonance.
pub fn minimal_prefix_order(op: &DiffOperator) -> Result<i64> {
    let (rec, _) = Recurrence::from_operator(op)?;
    Ok(rec.resonances().last().map_or(0, |e| e + 1))
}

/// Resonant exponents of `op` in its local parameter.
pub fn resonances(op: &DiffOperator) -> Result<Vec<i64>> {
    let (rec, _) = Recurrence::from_operator(op)?;
    Ok(rec.resonances())
}

/// A truncated kernel element together with the exponent of its free coefficient.
#[derive(Clone, Debug)]
pub struct KernelElement {
    pub series: TruncatedSeries,
    pub free_exponent: i64,
}

/// Bound on `hi - lo` for kernel windows.
pub const MAX_WINDOW: i64 = 4096;

/// Basis of truncated solutions of `op y = 0` with valuation in `[lo, hi]`, to order `n`.
pub fn truncated_kernel_basis(
    op: &DiffOperator,
    lo: i64,
    hi: i64,
    n: i64,
) -> Result<Vec<KernelElement>> {
    if hi - lo > MAX_WINDOW {
        return Err(Error::WindowTooLarge(hi - lo));
    }
    let (rec, _) = Recurrence::from_operator(op)?;
    let n = n.max(hi + 1);
    let zero = |_e: i64| Q::zero();
    let s = solve_rows(&rec, None, lo, &zero, lo, n)?;
    let mut out = Vec::new();
    for (j, &e) in s.params.iter().enumerate() {
        if s.cons.is_pivot(j + 1) || e > hi {
            continue;
        }
        let mut free = vec![(j + 1, Q::one())];
        for (k, _) in s.params.iter().enumerate() {
            if k != j && !s.cons.is_pivot(k + 1) {
                free.push((k + 1, Q::zero()));
            }
        }
        let vals = s.cons.solve(s.params.len(), &free);
        let coeffs: Vec<Q> = s.y.iter().map(|a| eval_aff(a, &vals)).collect();
        out.push(KernelElement {
            series: TruncatedSeries::new(op.case().clone(), 1, s.start, coeffs, n)?,
            free_exponent: e,
        });
    }
    Ok(out)
}

/// Affine solution space of `op y = rhs` to order `n` when nothing is prefixed: a
/// particular truncated solution (if any) and a kernel basis.
pub fn truncated_solution_space(
    op: &DiffOperator,
    rhs: Option<&RatFunc>,
    n: i64,
) -> Result<(Option<TruncatedSeries>, Vec<KernelElement>)> {
    let (rec, m) = Recurrence::from_operator(op)?;
    let b = rhs.map(|b| b * &m);
    let lo = lowest_start(&rec, b.as_ref());
    let zero = |_e: i64| Q::zero();
    let kernel = truncated_kernel_basis(op, lo, n - 1, n)?;
    let part = match solve_rows(&rec, b.as_ref(), lo, &zero, lo, n) {
        Ok(s) => {
            let free: Vec<(usize, Q)> = (0..s.params.len())
                .filter(|j| !s.cons.is_pivot(j + 1))
                .map(|j| (j + 1, Q::zero()))
                .collect();
            let vals = s.cons.solve(s.params.len(), &free);
            let coeffs: Vec<Q> = s.y.iter().map(|a| eval_aff(a, &vals)).collect();
            Some(TruncatedSeries::new(
                op.case().clone(),
                1,
                s.start,
                coeffs,
                n,
            )?)
        }
        Err(Error::InconsistentPrefix(_)) => None,
        Err(e) => return Err(e),
    };
    Ok((part, kernel))
}

/// Whether the point is the one where this case's series live.
pub fn expansion_point(case: &CaseTag) -> Option<Point> {
    case.point()
}
