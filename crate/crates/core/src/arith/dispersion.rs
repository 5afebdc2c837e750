//! Shift and q-dispersion sets.
//!
//! For the shift case the dispersion of `(f, g)` is the set of `l >= 0` such that
//! `f(x)` and `g(x + l h)` share a root; these `l h` are roots of
//! `Res_x(f(x), g(x + y))`. For the q case the common roots of `f(x)` and `g(q^l x)`
//! correspond to roots `y = q^l` of `Res_x(f(x), g(y x))`. Both resultants are
//! available, but the sets themselves are found by a gcd scan over the integer window
//! allowed by root bounds, which avoids interpolating large resultants.

use std::collections::BTreeSet;

use num_traits::{One, Signed, ToPrimitive};

use super::case::CaseTag;
use super::linalg::{gcd_degree_mod_p, mulmod, poly_mod_p, reduce_mod, RANK_PRIME};
use super::poly::Poly;
use super::rat::{q, qpow, Q};
use crate::error::{Error, Result};

/// Newton interpolation through `(xs[i], ys[i])`.
pub fn interpolate(xs: &[Q], ys: &[Q]) -> Poly {
    let n = xs.len();
    let mut coef = ys.to_vec();
    for j in 1..n {
        for i in (j..n).rev() {
            coef[i] = (&coef[i] - &coef[i - 1]) / (&xs[i] - &xs[i - j]);
        }
    }
    let mut acc = Poly::constant(coef[n - 1].clone());
    for i in (0..n - 1).rev() {
        acc = &(&acc * &Poly::linear_root(xs[i].clone())) + &Poly::constant(coef[i].clone());
    }
    acc
}

/// `Res_x(f(x), g(x + y))` as a polynomial in `y`.
pub fn shift_resultant(f: &Poly, g: &Poly) -> Poly {
    let d = (f.deg().max(0) * g.deg().max(0)) as usize;
    let xs: Vec<Q> = (0..=d as i64).map(q).collect();
    let ys: Vec<Q> = xs.iter().map(|y| f.resultant(&g.taylor_shift(y))).collect();
    interpolate(&xs, &ys)
}

/// `Res_x(f(x), g(y x))` as a polynomial in `y`.
pub fn dilation_resultant(f: &Poly, g: &Poly) -> Poly {
    let d = (f.deg().max(0) * g.deg().max(0)) as usize;
    let xs: Vec<Q> = (1..=d as i64 + 1).map(q).collect();
    let ys: Vec<Q> = xs.iter().map(|y| f.resultant(&g.dilate(y))).collect();
    interpolate(&xs, &ys)
}

/// Removes every factor `x` from `p`.
pub fn strip_x(p: &Poly) -> Poly {
    match p.valuation() {
        Some(v) if v > 0 => p.shift_down(v),
        _ => p.clone(),
    }
}

/// `{ l >= 0 : gcd(f, σ^l g) nonconstant }`, scanning the window allowed by root bounds.
///
/// For the q case the factor `x`, fixed by the dilation, is ignored.
pub fn dispersion(f: &Poly, g: &Poly, case: &CaseTag) -> Result<BTreeSet<u64>> {
    let mut out = BTreeSet::new();
    match case {
        CaseTag::Shift { h, .. } => {
            if f.deg() <= 0 || g.deg() <= 0 {
                return Ok(out);
            }
            // a common root differs by l·h, so |l h| <= B(f) + B(g)
            let bound = f.root_bound() + g.root_bound();
            let hb = h.abs().to_f64().unwrap_or(f64::MIN_POSITIVE);
            let tmax = (bound / hb).ceil() as i64 + 1;
            let m = Modular::new(f, g);
            for t in 0..=tmax {
                let y = h * q(t);
                if m.as_ref().is_none_or(|m| m.may_share_shifted(&y))
                    && f.gcd(&g.taylor_shift(&y)).deg() > 0
                {
                    out.insert(t as u64);
                }
            }
        }
        CaseTag::QDiff { q: qv } => {
            let f = strip_x(f);
            let g = strip_x(g);
            if f.deg() <= 0 || g.deg() <= 0 {
                return Ok(out);
            }
            let rev_f = f.reverse(f.deg() as usize);
            let rev_g = g.reverse(g.deg() as usize);
            let aq = qv.abs().to_f64().unwrap_or(2.0);
            let lmax = if aq > 1.0 {
                // |q^l| <= B(g) / min|root f|
                (g.root_bound() * rev_f.root_bound()).ln() / aq.ln()
            } else {
                (f.root_bound() * rev_g.root_bound()).ln() / (1.0 / aq).ln()
            };
            let lmax = lmax.max(0.0).ceil() as i64 + 1;
            let m = Modular::new(&f, &g);
            let mut y = Q::one();
            for l in 0..=lmax {
                if m.as_ref().is_none_or(|m| m.may_share_dilated(&y))
                    && f.gcd(&g.dilate(&y)).deg() > 0
                {
                    out.insert(l as u64);
                }
                y *= qv;
            }
        }
        CaseTag::Mahler { .. } => {
            return Err(Error::UnsupportedCase(
                "dispersion is defined for shift and q cases".into(),
            ))
        }
    }
    Ok(out)
}

/// Images of `f` and `g` mod a large prime, for a cheap first test of every candidate.
struct Modular {
    f: Vec<u64>,
    g: Vec<u64>,
}

impl Modular {
    fn new(f: &Poly, g: &Poly) -> Option<Self> {
        Some(Modular {
            f: poly_mod_p(f.coeffs(), RANK_PRIME)?,
            g: poly_mod_p(g.coeffs(), RANK_PRIME)?,
        })
    }

    /// `false` proves `gcd(f, g(x + y))` constant.
    fn may_share_shifted(&self, y: &Q) -> bool {
        let p = RANK_PRIME;
        let Some(y) = reduce_mod(y, p) else {
            return true;
        };
        // Horner: g(x + y) = (...(g_n (x+y) + g_{n-1})(x+y) + ...)
        let mut acc: Vec<u64> = Vec::with_capacity(self.g.len());
        for &c in self.g.iter().rev() {
            acc.push(0);
            for i in (1..acc.len()).rev() {
                acc[i] = (acc[i - 1] + mulmod(acc[i], y, p)) % p;
            }
            acc[0] = (mulmod(acc[0], y, p) + c) % p;
        }
        gcd_degree_mod_p(self.f.clone(), acc, p) > 0
    }

    /// `false` proves `gcd(f, g(y x))` constant.
    fn may_share_dilated(&self, y: &Q) -> bool {
        let p = RANK_PRIME;
        let Some(y) = reduce_mod(y, p).filter(|&y| y != 0) else {
            return true;
        };
        let mut pw = 1;
        let gd: Vec<u64> = self
            .g
            .iter()
            .map(|&c| {
                let v = mulmod(c, pw, p);
                pw = mulmod(pw, y, p);
                v
            })
            .collect();
        gcd_degree_mod_p(self.f.clone(), gd, p) > 0
    }
}

/// `gcd(f, σ^l(g))`.
pub fn orbit_gcd(f: &Poly, g: &Poly, case: &CaseTag, l: u64) -> Poly {
    f.gcd(&case.sigma_poly(g, l as u32))
}

/// `σ^{-l}` on polynomials for shift and q cases.
pub fn sigma_poly_inverse(p: &Poly, case: &CaseTag, l: u64) -> Poly {
    match case {
        CaseTag::Shift { h, .. } => p.taylor_shift(&-(h * q(l as i64))),
        CaseTag::QDiff { q: qv } => p.dilate(&qpow(qv, -(l as i64))),
        CaseTag::Mahler { .. } => panic!("Mahler substitution has no polynomial inverse"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(f: &Poly, g: &Poly, case: &CaseTag, upto: u64) -> BTreeSet<u64> {
        (0..=upto)
            .filter(|&l| {
                let gg = if case.is_shift() {
                    orbit_gcd(f, g, case, l)
                } else {
                    orbit_gcd(&strip_x(f), &strip_x(g), case, l)
                };
                gg.deg() > 0
            })
            .collect()
    }

    #[test]
    fn spec_examples() {
        let s = CaseTag::shift(q(1)).unwrap();
        let x = Poly::from_i64(&[0, 1]);
        assert_eq!(
            dispersion(&x, &Poly::from_i64(&[-3, 1]), &s).unwrap(),
            [3].into_iter().collect()
        );
        assert!(dispersion(&x, &Poly::from_i64(&[1, 1]), &s)
            .unwrap()
            .is_empty());
        let qd = CaseTag::qdiff(q(2)).unwrap();
        assert_eq!(
            dispersion(&Poly::from_i64(&[-1, 1]), &Poly::from_i64(&[-4, 1]), &qd).unwrap(),
            [2].into_iter().collect()
        );
        assert!(dispersion(&x, &x, &CaseTag::mahler(2).unwrap()).is_err());
    }

    #[test]
    fn interpolation_recovers_polynomial() {
        let p = Poly::from_i64(&[3, -1, 0, 2]);
        let xs: Vec<Q> = (0..4).map(q).collect();
        let ys: Vec<Q> = xs.iter().map(|x| p.eval(x)).collect();
        assert_eq!(interpolate(&xs, &ys), p);
    }

    #[test]
    fn agrees_with_brute_force_on_random_instances() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let cases = [
            CaseTag::shift(q(1)).unwrap(),
            CaseTag::shift(crate::arith::rat::qf(1, 2)).unwrap(),
            CaseTag::qdiff(q(2)).unwrap(),
            CaseTag::qdiff(crate::arith::rat::qf(-1, 3)).unwrap(),
        ];
        for i in 0..200 {
            let case = &cases[i % cases.len()];
            let mk = |rng: &mut rand_chacha::ChaCha8Rng| {
                // product of linear factors with small roots, plus a random quadratic
                let mut p = Poly::one();
                for _ in 0..rng.gen_range(1..3) {
                    let r: i64 = rng.gen_range(-6..7);
                    p = &p * &Poly::from_i64(&[-r, 1]);
                }
                if rng.gen_bool(0.3) {
                    p = &p * &Poly::from_i64(&[rng.gen_range(1..4), 0, 1]);
                }
                p
            };
            let f = mk(&mut rng);
            let g = mk(&mut rng);
            let d = dispersion(&f, &g, case).unwrap();
            let b = brute(&f, &g, case, 40);
            assert_eq!(d, b, "case {case} f={f} g={g}");
        }
    }
}
