//! Dense linear algebra over the rationals.

use num_traits::{One, Zero};

use super::rat::Q;

/// Row-reduces `m` in place to reduced row echelon form and returns the pivot columns.
pub fn rref(m: &mut [Vec<Q>]) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for v in m[r].iter_mut().skip(c) {
            *v *= &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, pv) in row.iter_mut().zip(pivot_row.iter()).skip(c) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &[Vec<Q>]) -> usize {
    let mut a = m.to_vec();
    rref(&mut a).len()
}

/// Basis of `{v : m v = 0}`, with `cols` the number of unknowns.
pub fn nullspace(m: &[Vec<Q>], cols: usize) -> Vec<Vec<Q>> {
    let mut a = m.to_vec();
    let pivots = rref(&mut a);
    let mut basis = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Q::zero(); cols];
        v[free] = Q::one();
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = -a[r][free].clone();
        }
        basis.push(v);
    }
    basis
}

/// One solution of `m v = b`, or `None` if inconsistent.
pub fn solve_particular(m: &[Vec<Q>], b: &[Q], cols: usize) -> Option<Vec<Q>> {
    let mut a: Vec<Vec<Q>> = m
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = rref(&mut a);
    if pivots.contains(&cols) {
        return None;
    }
    let mut v = vec![Q::zero(); cols];
    for (r, &pc) in pivots.iter().enumerate() {
        v[pc] = a[r][cols].clone();
    }
    Some(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat::q;

    #[test]
    fn nullspace_of_rank_one() {
        let m = vec![vec![q(1), q(2), q(3)], vec![q(2), q(4), q(6)]];
        let ns = nullspace(&m, 3);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            let s: Q = m[0].iter().zip(v).map(|(a, b)| a * b).sum();
            assert!(s.is_zero());
        }
    }

    #[test]
    fn particular_solution() {
        let m = vec![vec![q(1), q(1)], vec![q(1), q(-1)]];
        let v = solve_particular(&m, &[q(3), q(1)], 2).unwrap();
        assert_eq!(v, vec![q(2), q(1)]);
        let bad = vec![vec![q(1), q(1)], vec![q(1), q(1)]];
        assert!(solve_particular(&bad, &[q(1), q(2)], 2).is_none());
    }
}

/// Prime used for modular rank estimates.
pub const RANK_PRIME: u64 = 2_305_843_009_213_693_951; // 2^61 - 1

pub(crate) fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn powmod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    r
}

/// `x mod p`, or `None` if `p` divides the denominator.
pub fn reduce_mod(x: &Q, p: u64) -> Option<u64> {
    use num_bigint::BigInt;
    use num_traits::ToPrimitive;
    let pb = BigInt::from(p);
    let m = |v: &BigInt| -> u64 { (((v % &pb) + &pb) % &pb).to_u64().unwrap() };
    let d = m(x.denom());
    if d == 0 {
        return None;
    }
    Some(mulmod(m(x.numer()), powmod(d, p - 2, p), p))
}

/// `v mod p` coefficientwise, or `None` if a denominator or the leading coefficient
/// vanishes mod `p`.
pub fn poly_mod_p(v: &[Q], p: u64) -> Option<Vec<u64>> {
    let r = v
        .iter()
        .map(|x| reduce_mod(x, p))
        .collect::<Option<Vec<_>>>()?;
    (r.last().copied().unwrap_or(0) != 0).then_some(r)
}

/// Degree of `gcd(a, b)` over `Z/p` for coefficient vectors (low degree first) with
/// nonzero leading coefficients.
pub fn gcd_degree_mod_p(mut a: Vec<u64>, mut b: Vec<u64>, p: u64) -> usize {
    let trim = |v: &mut Vec<u64>| {
        while v.last() == Some(&0) {
            v.pop();
        }
    };
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let inv = powmod(*b.last().unwrap(), p - 2, p);
        while a.len() >= b.len() {
            let c = mulmod(*a.last().unwrap(), inv, p);
            let off = a.len() - b.len();
            for (i, bi) in b.iter().enumerate() {
                let s = mulmod(c, *bi, p);
                a[off + i] = (a[off + i] + p - s) % p;
            }
            trim(&mut a);
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len().saturating_sub(1)
}

/// Rank modulo `p`; a lower bound for the rank over `Q`. `None` if an entry's
/// denominator vanishes mod `p`.
pub fn rank_mod_p(m: &[Vec<Q>], p: u64) -> Option<usize> {
    let mut a: Vec<Vec<u64>> = Vec::with_capacity(m.len());
    for row in m {
        a.push(
            row.iter()
                .map(|x| reduce_mod(x, p))
                .collect::<Option<Vec<_>>>()?,
        );
    }
    let cols = a.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        let Some(pr) = (r..a.len()).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(r, pr);
        let inv = powmod(a[r][c], p - 2, p);
        for i in 0..a.len() {
            if i != r && a[i][c] != 0 {
                let f = mulmod(a[i][c], inv, p);
                for k in c..cols {
                    let s = mulmod(f, a[r][k], p);
                    a[i][k] = (a[i][k] + p - s) % p;
                }
            }
        }
        r += 1;
        if r == a.len() {
            break;
        }
    }
    Some(r)
}
