//! Shared generators and independent oracles for the integration suites.
#![allow(dead_code)]

use hypertrans::arith::rat::{q, qf};
use hypertrans::arith::{CaseTag, Poly, RatFunc, Q};
use hypertrans::ore::DiffOperator;
use hypertrans::series::{expand_ratfunc, TruncatedSeries};
use hypertrans::solver::minimal_prefix_order;
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rand_poly(r: &mut ChaCha8Rng, deg: usize, range: i64) -> Poly {
    loop {
        let c: Vec<i64> = (0..=deg).map(|_| r.gen_range(-range..=range)).collect();
        let p = Poly::from_i64(&c);
        if !p.is_zero() {
            return p;
        }
    }
}

/// Product of `(x - root)` over small rational roots.
pub fn rand_split_poly(r: &mut ChaCha8Rng, max_deg: usize, roots: &[Q]) -> Poly {
    let k = r.gen_range(0..=max_deg);
    let mut p = Poly::one();
    for _ in 0..k {
        let root = roots[r.gen_range(0..roots.len())].clone();
        p = &p * &Poly::linear_root(root);
    }
    p
}

pub fn int_roots(lo: i64, hi: i64) -> Vec<Q> {
    (lo..=hi).map(q).collect()
}

pub fn q_roots() -> Vec<Q> {
    vec![q(1), q(-1), q(2), q(-2), q(3), qf(1, 2), qf(-1, 3)]
}

pub fn rand_ratfunc(r: &mut ChaCha8Rng, case: &CaseTag) -> RatFunc {
    let deg = r.gen_range(0..=2);
    let num = rand_poly(r, deg, 3);
    let roots = if case.is_shift() {
        int_roots(-3, 3)
    } else {
        q_roots()
    };
    let den = rand_split_poly(r, 2, &roots);
    let mut f = RatFunc::new(num, den);
    if !case.is_shift() {
        f = &f * &RatFunc::x_pow(r.gen_range(-1..=1));
    }
    f
}

pub fn shift_case() -> CaseTag {
    CaseTag::shift(q(1)).unwrap()
}

pub fn q_cases() -> Vec<CaseTag> {
    [q(2), q(3), q(-2), qf(1, 2), qf(2, 3)]
        .into_iter()
        .map(|v| CaseTag::qdiff(v).unwrap())
        .collect()
}

pub fn random_case(r: &mut ChaCha8Rng) -> CaseTag {
    match r.gen_range(0..4) {
        0 => shift_case(),
        1 => CaseTag::mahler(r.gen_range(2..=3)).unwrap(),
        _ => {
            let cs = q_cases();
            cs[r.gen_range(0..cs.len())].clone()
        }
    }
}

pub fn rand_operator(r: &mut ChaCha8Rng, case: &CaseTag, order: usize) -> DiffOperator {
    loop {
        let c: Vec<RatFunc> = (0..=order)
            .map(|_| {
                let deg = r.gen_range(0..=1);
                RatFunc::from_poly(rand_poly(r, deg, 3))
            })
            .collect();
        let l = DiffOperator::new(case.clone(), c);
        if l.order() == order as i64 && !l.coeff(0).is_zero() {
            return l;
        }
    }
}

/// `L·(ρ - σ(g)/g)` for a random left factor `L`; `g` is in its kernel.
pub struct Planted {
    pub op: DiffOperator,
    pub g: RatFunc,
    pub prefix: TruncatedSeries,
}

pub fn planted(r: &mut ChaCha8Rng, case: &CaseTag) -> Planted {
    let g = loop {
        let g = rand_ratfunc(r, case);
        if !g.is_zero() {
            break g;
        }
    };
    let right = DiffOperator::first_order(case.clone(), g.sigma(case).checked_div(&g).unwrap());
    let order = r.gen_range(1..=2);
    let left = rand_operator(r, case, order);
    let op = left.mul(&right).unwrap();
    let v = hypertrans::series::local_valuation(&g, case.point().unwrap());
    let n = minimal_prefix_order(&op).unwrap().max(v + 1);
    let prefix = expand_ratfunc(&g, case, n).unwrap();
    Planted { op, g, prefix }
}

/// Row reduction over `Q`, written independently of the library's linear algebra:
/// a solution `x` of `m x = b`, if any.
pub fn gauss_solve(mut m: Vec<Vec<Q>>, mut b: Vec<Q>, cols: usize) -> Option<Vec<Q>> {
    let rows = m.len();
    let mut piv = Vec::new();
    let mut r0 = 0;
    for c in 0..cols {
        let Some(p) = (r0..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r0, p);
        b.swap(r0, p);
        let inv = m[r0][c].recip();
        for j in 0..cols {
            m[r0][j] = &m[r0][j] * &inv;
        }
        b[r0] = &b[r0] * &inv;
        for i in 0..rows {
            if i != r0 && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let t = &f * &m[r0][j];
                    m[i][j] -= t;
                }
                let t = &f * &b[r0];
                b[i] -= t;
            }
        }
        piv.push(c);
        r0 += 1;
        if r0 == rows {
            break;
        }
    }
    if b[r0..].iter().any(|v| !v.is_zero()) {
        return None;
    }
    let mut x = vec![Q::zero(); cols];
    for (i, &c) in piv.iter().enumerate() {
        x[c] = b[i].clone();
    }
    Some(x)
}

/// Brute-force telescoper search for the shift `x -> x+1`: is there `h = N/D` with
/// `h(x+1) - a·h(x) = b`, `D` dividing `∏_{|r|<=w} (x-r)^mult` and
/// `deg N <= 12 + deg D`? Returns the `h` found.
pub fn brute_telescoper(a: &RatFunc, b: &RatFunc, w: i64, mult: usize) -> Option<RatFunc> {
    let mut d = Poly::one();
    for r in -w..=w {
        for _ in 0..mult {
            d = &d * &Poly::linear_root(q(r));
        }
    }
    let dn = d.deg() as usize + 12;
    let d1 = d.taylor_shift(&q(1));
    let (u, v) = (a.num().clone(), a.den().clone());
    let (s, t) = (b.num().clone(), b.den().clone());
    // v t D(x) N(x+1) - u t D(x+1) N(x) = s v D(x) D(x+1)
    let left1 = &(&v * &t) * &d;
    let left0 = &(&u * &t) * &d1;
    let rhs = &(&s * &v) * &(&d * &d1);
    let cols = dn + 1;
    let mut columns: Vec<Poly> = Vec::with_capacity(cols);
    for k in 0..cols {
        let xk = Poly::monomial(Q::one(), k);
        let c = &(&left1 * &xk.taylor_shift(&q(1))) - &(&left0 * &xk);
        columns.push(c);
    }
    let rows = columns
        .iter()
        .map(|c| c.coeffs().len())
        .max()
        .unwrap_or(0)
        .max(rhs.coeffs().len());
    let m: Vec<Vec<Q>> = (0..rows)
        .map(|i| columns.iter().map(|c| c.coeff(i)).collect())
        .collect();
    let bv: Vec<Q> = (0..rows).map(|i| rhs.coeff(i)).collect();
    let x = gauss_solve(m, bv, cols)?;
    let h = RatFunc::new(Poly::new(x), d);
    // re-verify with plain rational-function arithmetic
    let lhs = &h.sigma(&shift_case()) - &(a * &h);
    (lhs == *b).then_some(h)
}

/// `Σ_{2^n < terms} α^{2^n}` and a bound on the omitted tail (for `0 < α <= 1/2`).
pub fn f1_partial_sum(alpha: &Q, terms: u64) -> (Q, Q) {
    let mut s = Q::zero();
    let mut k = 1u64;
    while k < terms {
        s += hypertrans::arith::rat::qpow(alpha, k as i64);
        k *= 2;
    }
    // tail Σ_{m>=k} α^m <= 2 α^k for α <= 1/2
    let tail = hypertrans::arith::rat::qpow(alpha, k as i64) * q(2);
    (s, tail)
}

/// Whether `g` lies in `particular + span(basis)` (or `span(basis)` when `particular`
/// is `None`), tested on coefficient vectors over a common denominator.
pub fn in_affine_span(g: &RatFunc, particular: Option<&RatFunc>, basis: &[RatFunc]) -> bool {
    let target = match particular {
        Some(p) => g - p,
        None => g.clone(),
    };
    if target.is_zero() {
        return true;
    }
    let mut den = target.den().clone();
    for b in basis {
        let gg = den.gcd(b.den());
        den = (&den * b.den()).exact_div(&gg).unwrap();
    }
    let numer = |f: &RatFunc| -> Poly { (&(f.num() * &den)).exact_div(f.den()).unwrap() };
    let cols: Vec<Poly> = basis.iter().map(numer).collect();
    let t = numer(&target);
    let rows = cols
        .iter()
        .map(|c| c.coeffs().len())
        .chain([t.coeffs().len()])
        .max()
        .unwrap();
    let m: Vec<Vec<Q>> = (0..rows)
        .map(|i| cols.iter().map(|c| c.coeff(i)).collect())
        .collect();
    let bv: Vec<Q> = (0..rows).map(|i| t.coeff(i)).collect();
    gauss_solve(m, bv, cols.len()).is_some()
}
