//! Rational reconstruction of series and rational solution spaces of operators.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::arith::dispersion::{dispersion, sigma_poly_inverse, strip_x};
use crate::arith::linalg::{nullspace, rank, rank_mod_p, RANK_PRIME};
use crate::arith::rat::{q, qpow};
use crate::arith::{CaseTag, Point, Poly, RatFunc, Q};
use crate::error::{Error, Result};
use crate::ore::DiffOperator;
use crate::series::{expand_ratfunc, local_valuation, TruncatedSeries};
use crate::solver::{cleared, truncated_solution_space, Recurrence};

/// Exact Hankel determinants `det(c_{i+j})_{0<=i,j<k}` of the coefficients after the
/// valuation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HankelProfile {
    /// `(k, determinant is zero)` for `k = 1..=max_size`.
    pub sizes: Vec<(usize, bool)>,
    /// Rank of the largest Hankel matrix.
    pub rank: usize,
}

pub fn hankel_profile(f: &TruncatedSeries, max_size: usize) -> Result<HankelProfile> {
    let Some(v) = f.valuation() else {
        return Ok(HankelProfile {
            sizes: (1..=max_size).map(|k| (k, true)).collect(),
            rank: 0,
        });
    };
    let avail = (f.order() - v) as usize;
    if max_size == 0 || 2 * max_size - 1 > avail {
        return Err(Error::TruncationTooShort);
    }
    let c = f.coeffs();
    let h = |k: usize| -> Vec<Vec<Q>> {
        (0..k)
            .map(|i| (0..k).map(|j| c[i + j].clone()).collect())
            .collect()
    };
    let mut sizes = Vec::new();
    for k in 1..=max_size {
        sizes.push((k, rank(&h(k)) < k));
    }
    Ok(HankelProfile {
        sizes,
        rank: rank(&h(max_size)),
    })
}

/// `(P, Q)` with `deg P <= dn`, `deg Q <= dd` and `Q u - P = O(t^{len u})`, from the
/// first nullspace vector; `None` if there is none. Needs `len u >= dn + dd + 1`
/// for the answer to be unique.
pub fn pade(u: &[Q], dn: usize, dd: usize) -> Option<(Poly, Poly)> {
    let m = u.len();
    // unknown Q_0..Q_dd; equations: coefficient k of Q u vanishes for dn < k < m
    let rows: Vec<Vec<Q>> = (dn + 1..m)
        .map(|k| {
            (0..=dd)
                .map(|i| if i <= k { u[k - i].clone() } else { Q::zero() })
                .collect()
        })
        .collect();
    // full column rank modulo a prime already rules out any solution
    if rows.len() > dd && rank_mod_p(&rows, RANK_PRIME) == Some(dd + 1) {
        return None;
    }
    let ns = if rows.is_empty() {
        let mut e = vec![Q::zero(); dd + 1];
        e[0] = Q::one();
        vec![e]
    } else {
        nullspace(&rows, dd + 1)
    };
    // prefer the solution of least degree: the last basis vectors of rref have high
    // free columns, so pick the one whose highest nonzero index is smallest
    let qv = ns
        .into_iter()
        .min_by_key(|v| v.iter().rposition(|c| !c.is_zero()).unwrap_or(0))?;
    let qp = Poly::new(qv);
    let mut pc = vec![Q::zero(); dn + 1];
    for (k, slot) in pc.iter_mut().enumerate().take(m.min(dn + 1)) {
        let mut s = Q::zero();
        for i in 0..=k.min(dd) {
            s += qp.coeff(i) * &u[k - i];
        }
        *slot = s;
    }
    let pp = Poly::new(pc);
    let g = pp.gcd(&qp);
    if qp.is_zero() {
        return None;
    }
    if g.deg() > 0 {
        Some((pp.exact_div(&g)?, qp.exact_div(&g)?))
    } else {
        Some((pp, qp))
    }
}

/// Rational function of `x` whose local expansion is `t^v P(t)/Q(t)`.
pub fn from_local(v: i64, p: &Poly, qq: &Poly, point: Point) -> RatFunc {
    match point {
        Point::Zero => &RatFunc::new(p.clone(), qq.clone()) * &RatFunc::x_pow(v),
        Point::Infinity => {
            if p.is_zero() {
                return RatFunc::zero();
            }
            let dp = p.deg();
            let dq = qq.deg();
            let r = RatFunc::new(p.reverse(dp as usize), qq.reverse(dq as usize));
            &r * &RatFunc::x_pow(dq - dp - v)
        }
    }
}

/// Padé candidate for `f` with separate numerator/denominator bounds, accepted only if
/// its exact expansion reproduces the whole truncation.
pub fn pade_match(f: &TruncatedSeries, dn: usize, dd: usize) -> Result<Option<RatFunc>> {
    let Some(v) = f.valuation() else {
        return Ok(Some(RatFunc::zero()));
    };
    let avail = (f.order() - v) as usize;
    if avail < dn + dd + 1 {
        return Err(Error::TruncationTooShort);
    }
    let Some((p, qq)) = pade(f.coeffs(), dn, dd) else {
        return Ok(None);
    };
    if qq.coeff(0).is_zero() {
        return Ok(None);
    }
    let cand = from_local(v, &p, &qq, f.point());
    let e = expand_ratfunc(&cand, &f.case().clone(), f.order())?;
    let e = TruncatedSeries::new(
        f.case().clone(),
        f.ell(),
        e.start(),
        e.coeffs().to_vec(),
        e.order(),
    )?;
    if e == *f {
        Ok(Some(cand))
    } else {
        Ok(None)
    }
}

/// Degree-`d` reconstruction, verified against the truncation and, when given, against
/// `op y = rhs` exactly.
pub fn rational_match(
    f: &TruncatedSeries,
    d: usize,
    op: Option<(&DiffOperator, Option<&RatFunc>)>,
) -> Result<Option<RatFunc>> {
    if let Some(v) = f.valuation() {
        if f.order() - v < 2 * d as i64 + 2 {
            return Err(Error::TruncationTooShort);
        }
    }
    let Some(c) = pade_match(f, d, d)? else {
        return Ok(None);
    };
    if let Some((l, rhs)) = op {
        let r = l.apply(&c);
        let b = rhs.cloned().unwrap_or_else(RatFunc::zero);
        if r != b {
            return Ok(None);
        }
    }
    Ok(Some(c))
}

/// Bounds that were used in a rational-solution search.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SearchBounds {
    /// Universal denominator (shift/q) or the denominator-degree bound (Mahler).
    pub denominator: String,
    pub exponent_lo: i64,
    pub exponent_hi: i64,
    pub cap: i64,
}

/// Rational solutions of `op y = rhs`: `particular + span(basis)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalSpace {
    pub particular: Option<RatFunc>,
    pub basis: Vec<RatFunc>,
    /// Whether the search is a proof that nothing else exists.
    pub complete: bool,
    pub bounds: SearchBounds,
}

#[derive(Clone, Debug)]
pub struct SpaceConfig {
    /// Cap on the width of exponent ranges in the polynomial-solution step.
    pub degree_cap: i64,
    /// Mahler: denominators of degree above `orbit_bound * max(1, deg a_n)` are not searched.
    pub orbit_bound: i64,
    /// Series length used for Mahler reconstruction.
    pub truncation: i64,
}

impl Default for SpaceConfig {
    fn default() -> Self {
        SpaceConfig {
            degree_cap: 64,
            orbit_bound: 8,
            truncation: 64,
        }
    }
}

/// Universal denominator of rational solutions (Abramov; q-analogue ignores `x`).
pub fn universal_denominator(c: &[Poly], case: &CaseTag) -> Result<Poly> {
    let n = c.len() - 1;
    let mut a = c[0].clone();
    let mut b = match case {
        CaseTag::Shift { h, .. } => c[n].taylor_shift(&-(h * q(n as i64))),
        CaseTag::QDiff { q: qv } => c[n].dilate(&qpow(qv, -(n as i64))),
        CaseTag::Mahler { .. } => {
            return Err(Error::UnsupportedCase(
                "no universal denominator for the Mahler case".into(),
            ))
        }
    };
    if case.fixes_origin() {
        a = strip_x(&a);
        b = strip_x(&b);
    }
    let mut u = Poly::one();
    let disp = dispersion(&b, &a, case)?;
    for &l in disp.iter().rev() {
        let d = b.gcd(&case.sigma_poly(&a, l as u32));
        let d = if case.fixes_origin() { strip_x(&d) } else { d };
        if d.deg() <= 0 {
            continue;
        }
        for j in 0..=l {
            u = &u * &sigma_poly_inverse(&d, case, j);
        }
        b = b.exact_div(&d).unwrap();
        a = a.exact_div(&sigma_poly_inverse(&d, case, l)).unwrap();
    }
    Ok(u)
}

/// Polynomial (shift) or Laurent-polynomial (q) solutions `z` of `Σ c_i σ^i(z) = 0`.
fn laurent_solutions(c: &[Poly], case: &CaseTag, cap: i64) -> Result<(Vec<RatFunc>, i64, i64)> {
    let (lo, hi) = match case {
        CaseTag::Shift { .. } => {
            let rec = Recurrence::new(case.clone(), c.to_vec())?;
            let degs: Vec<i64> = rec
                .resonances()
                .into_iter()
                .filter(|e| *e <= 0)
                .map(|e| -e)
                .collect();
            match degs.iter().max() {
                Some(&d) => (0, d),
                None => return Ok((Vec::new(), 0, -1)),
            }
        }
        CaseTag::QDiff { q: qv } => {
            let rec = Recurrence::new(case.clone(), c.to_vec())?;
            let Some(&lo) = rec.resonances().first() else {
                return Ok((Vec::new(), 0, -1));
            };
            let maxdeg = c.iter().map(|p| p.deg()).max().unwrap();
            let pinf = Poly::new(
                c.iter()
                    .map(|p| if p.deg() == maxdeg { p.lc() } else { Q::zero() })
                    .collect(),
            );
            let pinf = strip_x(&pinf);
            let mut hi = None;
            if pinf.deg() > 0 {
                let rb = pinf.root_bound().ln();
                let rl = -(pinf.reverse(pinf.deg() as usize).root_bound().ln());
                let lq = num_traits::ToPrimitive::to_f64(&num_traits::Signed::abs(qv))
                    .unwrap()
                    .ln();
                let (a, b) = if lq > 0.0 {
                    (rl / lq, rb / lq)
                } else {
                    (rb / lq, rl / lq)
                };
                for d in (a.floor() as i64 - 1)..=(b.ceil() as i64 + 1) {
                    if pinf.eval(&qpow(qv, d)).is_zero() {
                        hi = Some(d);
                    }
                }
            }
            match hi {
                Some(h) if h >= lo => (lo, h),
                _ => return Ok((Vec::new(), lo, lo - 1)),
            }
        }
        CaseTag::Mahler { .. } => unreachable!(),
    };
    if hi - lo > cap {
        return Err(Error::DegreeBoundExceeded {
            needed: hi - lo,
            cap,
        });
    }
    let maxdeg = c.iter().map(|p| p.deg()).max().unwrap().max(0);
    let row_lo = lo;
    let nrows = (hi + maxdeg - row_lo + 1) as usize;
    let ncols = (hi - lo + 1) as usize;
    let mut m = vec![vec![Q::zero(); ncols]; nrows];
    for (col, j) in (lo..=hi).enumerate() {
        // L(x^j) as a Laurent polynomial x^{min(j,0)} * poly
        let img: Vec<(i64, Q)> = match case {
            CaseTag::Shift { h, .. } => {
                let mut acc = Poly::zero();
                for (i, ci) in c.iter().enumerate() {
                    let mono =
                        Poly::monomial(Q::one(), j as usize).taylor_shift(&(h * q(i as i64)));
                    acc = &acc + &(ci * &mono);
                }
                acc.coeffs()
                    .iter()
                    .enumerate()
                    .map(|(k, v)| (k as i64, v.clone()))
                    .collect()
            }
            CaseTag::QDiff { q: qv } => {
                let mut acc = Poly::zero();
                let qj = qpow(qv, j);
                let mut pw = Q::one();
                for ci in c {
                    acc = &acc + &ci.scale(&pw);
                    pw *= &qj;
                }
                acc.coeffs()
                    .iter()
                    .enumerate()
                    .map(|(k, v)| (k as i64 + j, v.clone()))
                    .collect()
            }
            CaseTag::Mahler { .. } => unreachable!(),
        };
        for (e, v) in img {
            m[(e - row_lo) as usize][col] = v;
        }
    }
    let ns = nullspace(&m, ncols);
    let sols = ns
        .into_iter()
        .map(|v| {
            let p = Poly::new(v);
            &RatFunc::from_poly(p) * &RatFunc::x_pow(lo)
        })
        .collect();
    Ok((sols, lo, hi))
}

/// Homogeneous rational solutions for shift/q, complete.
fn homogeneous_space_sq(op: &DiffOperator, cap: i64) -> Result<(Vec<RatFunc>, SearchBounds)> {
    let case = op.case().clone();
    let (stripped, k) = op.strip_rho_power();
    if stripped.order() == 0 {
        // a_k ρ^k y = 0 forces y = 0
        return Ok((Vec::new(), SearchBounds::default()));
    }
    let (c, _) = cleared(&stripped);
    let u = universal_denominator(&c, &case)?;
    let n = c.len() - 1;
    let shifted: Vec<Poly> = (0..=n).map(|i| case.sigma_poly(&u, i as u32)).collect();
    let mut lcm = Poly::one();
    for s in &shifted {
        let g = lcm.gcd(s);
        lcm = (&lcm * s).exact_div(&g).unwrap();
    }
    let mut c2: Vec<Poly> = c
        .iter()
        .zip(&shifted)
        .map(|(ci, si)| ci * &lcm.exact_div(si).unwrap())
        .collect();
    let mut g = Poly::zero();
    for p in &c2 {
        g = g.gcd(p);
    }
    c2 = c2.iter().map(|p| p.exact_div(&g).unwrap()).collect();
    let (zs, lo, hi) = laurent_solutions(&c2, &case, cap)?;
    let mut out = Vec::new();
    for z in zs {
        let mut y = z.checked_div(&RatFunc::from_poly(u.clone()))?;
        for _ in 0..k {
            y = y.sigma_inverse(&case).unwrap();
        }
        if !op.apply(&y).is_zero() {
            return Err(Error::Internal(
                "rational solution failed verification".into(),
            ));
        }
        out.push(y);
    }
    Ok((
        out,
        SearchBounds {
            denominator: u.to_string(),
            exponent_lo: lo,
            exponent_hi: hi,
            cap,
        },
    ))
}

/// `(ρ - σ(b)/b) ∘ L`, whose solutions are those of `L y ∈ Q·b`.
pub fn homogenize(op: &DiffOperator, b: &RatFunc) -> Result<DiffOperator> {
    let m = DiffOperator::first_order(op.case().clone(), b.sigma(op.case()).checked_div(b)?);
    m.mul(op)
}

/// Splits rational solutions of the homogenized operator into particular and kernel.
fn split_affine(
    op: &DiffOperator,
    b: &RatFunc,
    sols: Vec<RatFunc>,
) -> Result<(Option<RatFunc>, Vec<RatFunc>)> {
    let mut cs = Vec::new();
    for g in &sols {
        let c = op.apply(g).checked_div(b)?;
        let c = c.as_constant().ok_or_else(|| {
            Error::Internal("homogenized solution not mapped to a multiple of b".into())
        })?;
        cs.push(c);
    }
    let Some(j) = cs.iter().position(|c| !c.is_zero()) else {
        return Ok((None, sols));
    };
    let part = sols[j].scale(&cs[j].recip());
    let basis = sols
        .iter()
        .zip(&cs)
        .enumerate()
        .filter(|(i, _)| *i != j)
        .map(|(_, (g, c))| g - &part.scale(c))
        .collect();
    Ok((Some(part), basis))
}

/// Reduced-echelon basis so that results are canonical.
fn canonical_basis(v: Vec<RatFunc>) -> Vec<RatFunc> {
    if v.is_empty() {
        return v;
    }
    // common denominator, then row-reduce numerators as coefficient vectors
    let mut den = Poly::one();
    for f in &v {
        let g = den.gcd(f.den());
        den = (&den * f.den()).exact_div(&g).unwrap();
    }
    let nums: Vec<Poly> = v
        .iter()
        .map(|f| (f.num() * &den).exact_div(f.den()).unwrap())
        .collect();
    let width = nums.iter().map(|p| p.coeffs().len()).max().unwrap_or(0);
    let mut m: Vec<Vec<Q>> = nums
        .iter()
        .map(|p| {
            let mut r: Vec<Q> = (0..width).map(|k| p.coeff(width - 1 - k)).collect();
            r.shrink_to_fit();
            r
        })
        .collect();
    let piv = crate::arith::linalg::rref(&mut m);
    m.truncate(piv.len());
    m.into_iter()
        .map(|r| {
            let p = Poly::new(r.into_iter().rev().collect());
            RatFunc::new(p, den.clone())
        })
        .collect()
}

/// Proven bounds `(deg D, deg P)` for a rational `u = P/D` with `Σ a_i u(x^{p^i}) = b`,
/// polynomial `a_i`, `b`.
pub fn mahler_degree_bounds(a: &[Poly], b: &Poly, p: u64) -> (i64, i64) {
    let n = a.len() - 1;
    let pn = (p as i64).pow(n as u32);
    let geo = (pn - 1) / (p as i64 - 1);
    let dd = a[n].deg().max(0) / (pn - geo);
    let mut delta = i64::MIN;
    let nz: Vec<(usize, i64)> = a
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (i, c.deg()))
        .collect();
    for (x, &(i, di)) in nz.iter().enumerate() {
        for &(j, dj) in &nz[x + 1..] {
            let den = (p as i64).pow(j as u32) - (p as i64).pow(i as u32);
            delta = delta.max((di - dj).div_euclid(den));
        }
        if !b.is_zero() {
            delta = delta.max((b.deg() - di).div_euclid((p as i64).pow(i as u32)));
        }
    }
    let dn = (dd + delta.max(0)).max(0);
    (dd, dn)
}

/// Mahler bounds for a solution whose local valuation is `v`: the equation for
/// `u = x^{-v} y` is brought to polynomial coefficients first.
pub fn mahler_bounds_at_valuation(op: &DiffOperator, rhs: Option<&RatFunc>, v: i64) -> (i64, i64) {
    let p = match op.case() {
        CaseTag::Mahler { p } => *p,
        _ => unreachable!(),
    };
    let (c, m) = cleared(op);
    let b = rhs.map(|b| b * &m).unwrap_or_else(RatFunc::zero);
    // a'_i = c_i x^{v p^i}; b stays; clear denominators of b and negative powers
    let mut terms: Vec<RatFunc> = c
        .iter()
        .enumerate()
        .map(|(i, ci)| {
            &RatFunc::from_poly(ci.clone()) * &RatFunc::x_pow(v * (p as i64).pow(i as u32))
        })
        .collect();
    terms.push(b.clone());
    let mut den = Poly::one();
    for t in &terms {
        let g = den.gcd(t.den());
        den = (&den * t.den()).exact_div(&g).unwrap();
    }
    let mut polys: Vec<Poly> = terms
        .iter()
        .map(|t| (t.num() * &den).exact_div(t.den()).unwrap())
        .collect();
    let xv = polys
        .iter()
        .filter_map(|p| p.valuation())
        .min()
        .unwrap_or(0);
    polys = polys.iter().map(|p| p.shift_down(xv)).collect();
    let bp = polys.pop().unwrap();
    mahler_degree_bounds(&polys, &bp, p)
}

/// Mahler: reconstructs the rational elements of the truncated solution space.
fn mahler_space(
    op: &DiffOperator,
    rhs: Option<&RatFunc>,
    cfg: &SpaceConfig,
) -> Result<RationalSpace> {
    let (c, _) = cleared(op);
    let rec = Recurrence::new(op.case().clone(), c.clone())?;
    let mut vals = rec.resonances();
    if let Some(b) = rhs.filter(|b| !b.is_zero()) {
        let vb = local_valuation(b, Point::Zero);
        let mut e = -1024;
        while rec.phi(e) < vb && e < 1024 {
            e += 1;
        }
        vals.push(e.min(vb));
    }
    let cap = cfg.orbit_bound * c.last().unwrap().deg().max(1);
    let mut dd_max = 0;
    let mut dn_max = 0;
    for &v in &vals {
        let (dd, dn) = mahler_bounds_at_valuation(op, rhs, v);
        dd_max = dd_max.max(dd);
        dn_max = dn_max.max(dn);
    }
    let mut complete = dd_max <= cap;
    let dd = dd_max.min(cap);
    let dn = dn_max;
    let need = dn + dd + 2 + vals.iter().map(|v| v.abs()).max().unwrap_or(0);
    let order = cfg.truncation.max(need + 8);
    let (part, kernel) = truncated_solution_space(op, rhs, order)?;
    let mut basis = Vec::new();
    let mut failed = 0;
    for k in &kernel {
        match reconstruct(op, None, &k.series, dn as usize, dd as usize)? {
            Some(r) => basis.push(r),
            None => failed += 1,
        }
    }
    let mut particular = None;
    if let Some(ps) = part {
        particular = reconstruct(op, rhs, &ps, dn as usize, dd as usize)?;
        if particular.is_none() && failed > 0 {
            complete = false;
        }
    }
    if failed > 1 {
        complete = false;
    }
    Ok(RationalSpace {
        particular,
        basis: canonical_basis(basis),
        complete,
        bounds: SearchBounds {
            denominator: format!("deg <= {dd}"),
            exponent_lo: vals.iter().copied().min().unwrap_or(0),
            exponent_hi: dn,
            cap,
        },
    })
}

fn reconstruct(
    op: &DiffOperator,
    rhs: Option<&RatFunc>,
    s: &TruncatedSeries,
    dn: usize,
    dd: usize,
) -> Result<Option<RatFunc>> {
    let Some(v) = s.valuation() else {
        return Ok(Some(RatFunc::zero()));
    };
    if ((s.order() - v) as usize) < dn + dd + 1 {
        return Ok(None);
    }
    let Some(c) = pade_match(s, dn, dd)? else {
        return Ok(None);
    };
    let b = rhs.cloned().unwrap_or_else(RatFunc::zero);
    Ok(if op.apply(&c) == b { Some(c) } else { None })
}

/// All rational solutions of `op y = rhs`.
pub fn rational_solution_space(
    op: &DiffOperator,
    rhs: Option<&RatFunc>,
    cfg: &SpaceConfig,
) -> Result<RationalSpace> {
    if op.is_zero() {
        return Err(Error::Semantic("zero operator".into()));
    }
    let rhs = rhs.filter(|b| !b.is_zero());
    if op.case().is_mahler() {
        return mahler_space(op, rhs, cfg);
    }
    let (particular, basis, bounds) = match rhs {
        None => {
            let (b, bounds) = homogeneous_space_sq(op, cfg.degree_cap)?;
            (None, b, bounds)
        }
        Some(b) => {
            let h = homogenize(op, b)?;
            let (sols, bounds) = homogeneous_space_sq(&h, cfg.degree_cap)?;
            let (p, k) = split_affine(op, b, sols)?;
            (p, k, bounds)
        }
    };
    let basis = canonical_basis(basis);
    for g in &basis {
        if !op.apply(g).is_zero() {
            return Err(Error::Internal("kernel element failed verification".into()));
        }
    }
    if let Some(p) = &particular {
        if op.apply(p) != *rhs.unwrap() {
            return Err(Error::Internal(
                "particular solution failed verification".into(),
            ));
        }
    }
    Ok(RationalSpace {
        particular,
        basis,
        complete: true,
        bounds,
    })
}

/// Whether the series `f` is the expansion of an element of `particular + span(basis)`:
/// returns that element.
pub fn member_of(space: &RationalSpace, f: &TruncatedSeries) -> Result<Option<RatFunc>> {
    let case = f.case().clone();
    let n = f.order();
    let mut cols: Vec<TruncatedSeries> = Vec::new();
    for g in &space.basis {
        cols.push(expand_ratfunc(g, &case, n)?);
    }
    let target = match &space.particular {
        Some(p) => f.sub(&expand_ratfunc(p, &case, n)?)?,
        None => f.clone(),
    };
    let lo = cols
        .iter()
        .chain(std::iter::once(&target))
        .map(|s| s.start())
        .min()
        .unwrap_or(0)
        .min(n);
    let idx: Vec<i64> = (lo..n).collect();
    let m: Vec<Vec<Q>> = idx
        .iter()
        .map(|&k| cols.iter().map(|s| s.coeff(k).unwrap()).collect())
        .collect();
    let rhs: Vec<Q> = idx.iter().map(|&k| target.coeff(k).unwrap()).collect();
    let Some(lam) = crate::arith::linalg::solve_particular(&m, &rhs, cols.len()) else {
        return Ok(None);
    };
    let mut g = space.particular.clone().unwrap_or_else(RatFunc::zero);
    for (l, b) in lam.iter().zip(&space.basis) {
        g = &g + &b.scale(l);
    }
    Ok(Some(g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat::qf;

    fn p(c: &[i64]) -> RatFunc {
        RatFunc::from_poly(Poly::from_i64(c))
    }

    #[test]
    fn hankel_examples() {
        let m = CaseTag::mahler(2).unwrap();
        let ones =
            expand_ratfunc(&RatFunc::new(Poly::one(), Poly::from_i64(&[1, -1])), &m, 8).unwrap();
        let h = hankel_profile(&ones, 3).unwrap();
        assert_eq!(h.rank, 1);
        assert!(h.sizes[1].1 && h.sizes[2].1);
        let f1 = TruncatedSeries::from_terms(
            m.clone(),
            1,
            &[(1, q(1)), (2, q(1)), (4, q(1)), (8, q(1))],
            16,
        )
        .unwrap();
        let h = hankel_profile(&f1, 2).unwrap();
        assert!(!h.sizes[1].1);
        let z = TruncatedSeries::zero(m, 1, 8).unwrap();
        assert_eq!(hankel_profile(&z, 3).unwrap().rank, 0);
    }

    #[test]
    fn match_examples() {
        let m = CaseTag::mahler(2).unwrap();
        let g = RatFunc::new(Poly::one(), Poly::from_i64(&[1, -1]));
        let s = expand_ratfunc(&g, &m, 8).unwrap();
        assert_eq!(rational_match(&s, 1, None).unwrap(), Some(g));
        let mut terms = Vec::new();
        for k in 0..7 {
            terms.push((1i64 << k, q(1)));
        }
        let f1 = TruncatedSeries::from_terms(m, 1, &terms, 100).unwrap();
        for d in 0..=16 {
            assert_eq!(rational_match(&f1, d, None).unwrap(), None);
        }
        let s_inf = CaseTag::shift(q(1)).unwrap();
        let g = RatFunc::new(Poly::x(), Poly::from_i64(&[-1, 1]));
        let e = expand_ratfunc(&g, &s_inf, 6).unwrap();
        assert_eq!(rational_match(&e, 1, None).unwrap(), Some(g));
    }

    #[test]
    fn abramov_denominators() {
        let s = CaseTag::shift(q(1)).unwrap();
        // ρ(y)/y = x/(x+2) for y = 1/(x(x+1))
        let c = vec![Poly::from_i64(&[0, -1]), Poly::from_i64(&[2, 1])];
        assert_eq!(
            universal_denominator(&c, &s).unwrap(),
            Poly::from_i64(&[0, 1, 1])
        );
        let qc = CaseTag::qdiff(q(2)).unwrap();
        // y = 1/(x-1): ρ(y)/y = (x-1)/(2x-1)
        let c = vec![Poly::from_i64(&[1, -1]), Poly::from_i64(&[-1, 2])];
        let u = universal_denominator(&c, &qc).unwrap();
        assert!(u.rem(&Poly::from_i64(&[-1, 1])).is_zero());
    }

    #[test]
    fn space_examples() {
        let cfg = SpaceConfig::default();
        let s = CaseTag::shift(q(1)).unwrap();
        let a = RatFunc::new(Poly::from_i64(&[1, 1]), Poly::x());
        let sp =
            rational_solution_space(&DiffOperator::first_order(s.clone(), a), None, &cfg).unwrap();
        assert_eq!(sp.basis, vec![RatFunc::x()]);
        assert!(sp.complete);
        let q2 = CaseTag::qdiff(q(2)).unwrap();
        let sp =
            rational_solution_space(&DiffOperator::first_order(q2, p(&[2])), None, &cfg).unwrap();
        assert_eq!(sp.basis, vec![RatFunc::x()]);
        let m = CaseTag::mahler(2).unwrap();
        let sp =
            rational_solution_space(&DiffOperator::first_order(m.clone(), p(&[1])), None, &cfg)
                .unwrap();
        assert_eq!(sp.basis, vec![RatFunc::one()]);
        assert!(sp.complete);
        // telescoping: ρ(y) - y = x  ->  y = x(x-1)/2
        let sp = rational_solution_space(
            &DiffOperator::first_order(s.clone(), p(&[1])),
            Some(&p(&[0, 1])),
            &cfg,
        )
        .unwrap();
        let want = RatFunc::from_poly(Poly::new(vec![q(0), qf(-1, 2), qf(1, 2)]));
        assert_eq!(sp.particular, Some(want));
        assert_eq!(sp.basis, vec![RatFunc::one()]);
        // ρ(y) - y = 1/x has no rational solution
        let sp = rational_solution_space(
            &DiffOperator::first_order(s, p(&[1])),
            Some(&RatFunc::x_pow(-1)),
            &cfg,
        )
        .unwrap();
        assert_eq!(sp.particular, None);
        // Moore: f(x^2) - f(x) = -x has no rational solution; constants form the kernel
        let sp = rational_solution_space(
            &DiffOperator::first_order(m.clone(), p(&[1])),
            Some(&p(&[0, -1])),
            &cfg,
        )
        .unwrap();
        assert_eq!(sp.particular, None);
        assert_eq!(sp.basis, vec![RatFunc::one()]);
        assert!(sp.complete);
        // y = 1/(1-x): y(x^2)(1+x) = y(x)
        let a = RatFunc::new(Poly::one(), Poly::from_i64(&[1, 1]));
        let sp = rational_solution_space(&DiffOperator::first_order(m, a), None, &cfg).unwrap();
        assert_eq!(
            sp.basis,
            vec![RatFunc::new(Poly::one(), Poly::from_i64(&[-1, 1]))]
        );
    }

    #[test]
    fn membership() {
        let cfg = SpaceConfig::default();
        let s = CaseTag::shift(q(1)).unwrap();
        let l = DiffOperator::first_order(s.clone(), p(&[1]));
        let sp = rational_solution_space(&l, Some(&p(&[1])), &cfg).unwrap();
        let f = expand_ratfunc(&RatFunc::x(), &s, 10).unwrap();
        assert_eq!(member_of(&sp, &f).unwrap(), Some(RatFunc::x()));
        let g = expand_ratfunc(
            &RatFunc::new(Poly::from_i64(&[0, 0, 1]), Poly::from_i64(&[1, 1])),
            &s,
            10,
        )
        .unwrap();
        assert_eq!(member_of(&sp, &g).unwrap(), None);
    }
}
