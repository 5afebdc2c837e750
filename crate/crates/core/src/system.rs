//! First-order systems `ρ(Y) = A Y` over `Q(x)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith::{CaseTag, Poly, RatFunc};
use crate::error::{Error, Result};
use crate::ore::DiffOperator;
use crate::series::TruncatedSeries;

pub type Matrix = Vec<Vec<RatFunc>>;

pub fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        RatFunc::one()
                    } else {
                        RatFunc::zero()
                    }
                })
                .collect()
        })
        .collect()
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let m = b.first().map_or(0, |r| r.len());
    let k = b.len();
    let mut out = vec![vec![RatFunc::zero(); m]; n];
    for i in 0..n {
        for l in 0..k {
            if a[i][l].is_zero() {
                continue;
            }
            for j in 0..m {
                if !b[l][j].is_zero() {
                    out[i][j] = &out[i][j] + &(&a[i][l] * &b[l][j]);
                }
            }
        }
    }
    out
}

pub fn mat_sigma(a: &Matrix, case: &CaseTag, k: u32) -> Matrix {
    a.iter()
        .map(|r| r.iter().map(|e| e.sigma_pow(case, k)).collect())
        .collect()
}

/// `v · A` for a row vector.
pub fn row_times(v: &[RatFunc], a: &Matrix) -> Vec<RatFunc> {
    mat_mul(&vec![v.to_vec()], a).remove(0)
}

/// Determinant by Gaussian elimination over `Q(x)`.
pub fn det(a: &Matrix) -> RatFunc {
    let n = a.len();
    let mut m = a.clone();
    let mut d = RatFunc::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !m[r][c].is_zero()) else {
            return RatFunc::zero();
        };
        if p != c {
            m.swap(p, c);
            d = -d;
        }
        let piv = m[c][c].clone();
        d = &d * &piv;
        let inv = piv.inv().unwrap();
        for r in c + 1..n {
            if m[r][c].is_zero() {
                continue;
            }
            let f = &m[r][c] * &inv;
            for j in c..n {
                let t = &f * &m[c][j];
                m[r][j] = &m[r][j] - &t;
            }
        }
    }
    d
}

/// Inverse by Gauss–Jordan, `None` if singular.
pub fn inverse(a: &Matrix) -> Option<Matrix> {
    let n = a.len();
    let mut m: Matrix = a
        .iter()
        .zip(identity(n))
        .map(|(r, e)| r.iter().cloned().chain(e).collect())
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !m[r][c].is_zero())?;
        m.swap(p, c);
        let inv = m[c][c].inv().unwrap();
        for v in m[c].iter_mut() {
            *v = &*v * &inv;
        }
        let pr = m[c].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r == c || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pr) {
                if !pv.is_zero() {
                    *v = &*v - &(&f * pv);
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Expresses `target` as a combination of the rows `rows` (assumed independent).
fn solve_left(rows: &[Vec<RatFunc>], target: &[RatFunc]) -> Option<Vec<RatFunc>> {
    // unknowns c with Σ c_k rows[k] = target: transpose to columns
    let k = rows.len();
    let n = target.len();
    let mut m: Matrix = (0..n)
        .map(|j| {
            let mut r: Vec<RatFunc> = rows.iter().map(|row| row[j].clone()).collect();
            r.push(target[j].clone());
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..k {
        let Some(p) = (r..n).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].inv().unwrap();
        for v in m[r].iter_mut() {
            *v = &*v * &inv;
        }
        let pr = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pr) {
                if !pv.is_zero() {
                    *v = &*v - &(&f * pv);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if m[r..].iter().any(|row| !row[k].is_zero()) {
        return None;
    }
    let mut out = vec![RatFunc::zero(); k];
    for (i, &c) in pivots.iter().enumerate() {
        out[c] = m[i][k].clone();
    }
    Some(out)
}

fn rank(rows: &[Vec<RatFunc>]) -> usize {
    let mut m = rows.to_vec();
    let n = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..n).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].inv().unwrap();
        for i in r + 1..n {
            if m[i][c].is_zero() {
                continue;
            }
            let f = &m[i][c] * &inv;
            for j in c..cols {
                let t = &f * &m[r][j];
                m[i][j] = &m[i][j] - &t;
            }
        }
        r += 1;
    }
    r
}

/// `ρ(Y) = A Y` with `det A != 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffSystem {
    case: CaseTag,
    a: Matrix,
}

/// Invertible change of unknowns `Z = T Y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaugeMatrix {
    t: Matrix,
}

impl GaugeMatrix {
    pub fn new(t: Matrix) -> Result<Self> {
        if t.iter().any(|r| r.len() != t.len()) {
            return Err(Error::DimensionMismatch {
                expected: t.len(),
                found: t.first().map_or(0, |r| r.len()),
            });
        }
        if det(&t).is_zero() {
            return Err(Error::SingularGauge);
        }
        Ok(GaugeMatrix { t })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.t
    }

    /// `self · other` (apply `other` first).
    pub fn compose(&self, other: &GaugeMatrix) -> GaugeMatrix {
        GaugeMatrix {
            t: mat_mul(&self.t, &other.t),
        }
    }
}

/// Outcome of substituting a truncated vector into a system.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verification {
    pub ok: bool,
    /// Order up to which the residual is known.
    pub verified_order: i64,
    /// First index with a nonzero residual.
    pub first_failure: Option<i64>,
}

impl DiffSystem {
    pub fn new(case: CaseTag, a: Matrix) -> Result<Self> {
        let n = a.len();
        if n == 0 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: 0,
            });
        }
        if let Some(r) = a.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: r.len(),
            });
        }
        if det(&a).is_zero() {
            return Err(Error::SingularSystem);
        }
        Ok(DiffSystem { case, a })
    }

    pub fn case(&self) -> &CaseTag {
        &self.case
    }

    pub fn matrix(&self) -> &Matrix {
        &self.a
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    pub fn det(&self) -> RatFunc {
        det(&self.a)
    }

    /// System for `ρ^l`: `A_[l] = σ^{l-1}(A) ··· σ(A) A`.
    pub fn iterate(&self, l: u32) -> DiffSystem {
        assert!(l >= 1, "iteration order must be positive");
        let mut acc = self.a.clone();
        for k in 1..l {
            acc = mat_mul(&mat_sigma(&self.a, &self.case, k), &acc);
        }
        DiffSystem {
            case: self.case.iterate(l),
            a: acc,
        }
    }

    /// `B = σ(T) A T^{-1}`.
    pub fn gauge_transform(&self, t: &GaugeMatrix) -> Result<DiffSystem> {
        if t.t.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: t.t.len(),
            });
        }
        let inv = inverse(&t.t).ok_or(Error::SingularGauge)?;
        let b = mat_mul(&mat_mul(&mat_sigma(&t.t, &self.case, 1), &self.a), &inv);
        DiffSystem::new(self.case.clone(), b)
    }

    /// `ρ - det A`.
    pub fn det_subsystem(&self) -> DiffOperator {
        DiffOperator::first_order(self.case.clone(), self.det())
    }

    /// Residual `ρ(Y) - A Y` on truncated series.
    pub fn verify_vector_solution(&self, y: &[TruncatedSeries]) -> Result<Verification> {
        if y.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: y.len(),
            });
        }
        let mut verified = i64::MAX;
        let mut first: Option<i64> = None;
        for i in 0..self.dim() {
            let mut r = y[i].sigma()?;
            for (j, yj) in y.iter().enumerate() {
                if self.a[i][j].is_zero() {
                    continue;
                }
                r = r.sub(&yj.mul_ratfunc(&self.a[i][j])?)?;
            }
            verified = verified.min(r.order());
            if let Some(v) = r.valuation() {
                first = Some(first.map_or(v, |f: i64| f.min(v)));
            }
        }
        Ok(Verification {
            ok: first.is_none(),
            verified_order: verified,
            first_failure: first,
        })
    }

    /// Rows `w_0 = v`, `w_{k+1} = σ(w_k) A` until the first linear dependency; returns
    /// the monic operator of minimal order annihilating the coordinate `v·Y`.
    pub fn minimal_operator(&self, v: &[RatFunc]) -> Result<DiffOperator> {
        let n = self.dim();
        if v.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: v.len(),
            });
        }
        if v.iter().all(|e| e.is_zero()) {
            return Err(Error::Semantic("zero vector has no annihilator".into()));
        }
        let mut rows: Vec<Vec<RatFunc>> = vec![v.to_vec()];
        loop {
            let next = row_times(
                &rows
                    .last()
                    .unwrap()
                    .iter()
                    .map(|e| e.sigma(&self.case))
                    .collect::<Vec<_>>(),
                &self.a,
            );
            if let Some(c) = solve_left(&rows, &next) {
                let mut coeffs: Vec<RatFunc> = c.into_iter().map(|e| -e).collect();
                coeffs.push(RatFunc::one());
                return Ok(DiffOperator::new(self.case.clone(), coeffs));
            }
            rows.push(next);
            if rows.len() > n {
                return Err(Error::Internal("more than n independent rows".into()));
            }
        }
    }

    /// A cyclic vector and the operator it yields. Tries `e_1`, the all-ones vector,
    /// then seeded random vectors with small integer polynomial entries.
    pub fn system_to_operator(
        &self,
        seed: u64,
        attempts: usize,
    ) -> Result<(DiffOperator, Vec<RatFunc>)> {
        let n = self.dim();
        let mut candidates: Vec<Vec<RatFunc>> = Vec::new();
        let mut e1 = vec![RatFunc::zero(); n];
        e1[0] = RatFunc::one();
        candidates.push(e1);
        candidates.push(vec![RatFunc::one(); n]);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut tried = 0;
        let mut idx = 0;
        while tried < attempts {
            let v = if idx < candidates.len() {
                idx += 1;
                candidates[idx - 1].clone()
            } else {
                // escalate degree and coefficient size with the attempt count
                let deg = (tried / 4).min(n);
                let range = 2 + tried as i64;
                (0..n)
                    .map(|_| {
                        let c: Vec<i64> =
                            (0..=deg).map(|_| rng.gen_range(-range..=range)).collect();
                        RatFunc::from_poly(Poly::from_i64(&c))
                    })
                    .collect()
            };
            tried += 1;
            if v.iter().all(|e| e.is_zero()) {
                continue;
            }
            let l = self.minimal_operator(&v)?;
            if l.order() as usize == n {
                return Ok((l, v));
            }
        }
        Err(Error::CyclicSearchExhausted(attempts))
    }

    /// Rank of the rows `v, σ(v)A, ...` (for diagnostics).
    pub fn cyclic_rank(&self, v: &[RatFunc]) -> usize {
        let mut rows = vec![v.to_vec()];
        for _ in 1..self.dim() {
            let last: Vec<RatFunc> = rows
                .last()
                .unwrap()
                .iter()
                .map(|e| e.sigma(&self.case))
                .collect();
            rows.push(row_times(&last, &self.a));
        }
        rank(&rows)
    }

    pub fn to_json(&self) -> SystemJson {
        SystemJson {
            case: self.case.spec_string(),
            dim: self.dim(),
            matrix: self
                .a
                .iter()
                .map(|r| r.iter().map(|e| e.render("x")).collect())
                .collect(),
            det: self.det().render("x"),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SystemJson {
    pub case: String,
    pub dim: usize,
    pub matrix: Vec<Vec<String>>,
    pub det: String,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat::q;

    fn p(c: &[i64]) -> RatFunc {
        RatFunc::from_poly(Poly::from_i64(c))
    }

    fn shift1() -> CaseTag {
        CaseTag::shift(q(1)).unwrap()
    }

    #[test]
    fn iteration_examples() {
        let s = DiffSystem::new(
            shift1(),
            vec![vec![p(&[0]), p(&[1])], vec![p(&[0, 1]), p(&[0])]],
        )
        .unwrap();
        assert_eq!(s.iterate(1).matrix(), s.matrix());
        let s2 = s.iterate(2);
        assert_eq!(
            s2.matrix(),
            &vec![vec![p(&[0, 1]), p(&[0])], vec![p(&[0]), p(&[1, 1])]]
        );
        assert_eq!(s2.case(), &CaseTag::shift(q(2)).unwrap());
        let m = DiffSystem::new(CaseTag::mahler(2).unwrap(), vec![vec![p(&[0, 1])]]).unwrap();
        assert_eq!(m.iterate(2).matrix()[0][0], p(&[0, 0, 0, 1]));
    }

    #[test]
    fn gauge_examples() {
        let s = DiffSystem::new(shift1(), vec![vec![p(&[0, 1])]]).unwrap();
        let t = GaugeMatrix::new(vec![vec![p(&[0, 1])]]).unwrap();
        assert_eq!(s.gauge_transform(&t).unwrap().matrix()[0][0], p(&[1, 1]));
        assert!(matches!(
            GaugeMatrix::new(vec![vec![p(&[0])]]),
            Err(Error::SingularGauge)
        ));
        // companion of (ρ - x)(ρ - 1) in the basis (y, ρy - y)
        let l = DiffOperator::from_polys(
            shift1(),
            vec![
                Poly::from_i64(&[0, 1]),
                Poly::from_i64(&[-1, -1]),
                Poly::one(),
            ],
        );
        let c = l.companion_matrix().unwrap();
        let t = GaugeMatrix::new(vec![vec![p(&[1]), p(&[0])], vec![p(&[-1]), p(&[1])]]).unwrap();
        let b = c.gauge_transform(&t).unwrap();
        assert!(b.matrix()[1][0].is_zero());
        assert_eq!(b.matrix()[0][0], p(&[1]));
        assert_eq!(b.matrix()[1][1], p(&[0, 1]));
    }

    #[test]
    fn determinant_subsystem() {
        let s = DiffSystem::new(
            shift1(),
            vec![vec![p(&[0, 1]), p(&[0])], vec![p(&[0]), p(&[1, 1])]],
        )
        .unwrap();
        assert_eq!(
            s.det_subsystem(),
            DiffOperator::first_order(shift1(), p(&[0, 1, 1]))
        );
        let id = DiffSystem::new(shift1(), identity(3)).unwrap();
        assert_eq!(
            id.det_subsystem(),
            DiffOperator::first_order(shift1(), p(&[1]))
        );
    }

    #[test]
    fn cyclic_vectors() {
        let l = DiffOperator::from_polys(
            shift1(),
            vec![
                Poly::from_i64(&[0, 1]),
                Poly::from_i64(&[-1, -1]),
                Poly::one(),
            ],
        );
        let (l2, v) = l
            .companion_matrix()
            .unwrap()
            .system_to_operator(1, 10)
            .unwrap();
        assert_eq!(l2, l);
        assert_eq!(v[0], RatFunc::one());
        let d = DiffSystem::new(
            shift1(),
            vec![vec![p(&[0, 1]), p(&[0])], vec![p(&[0]), p(&[1, 1])]],
        )
        .unwrap();
        let (op, v) = d.system_to_operator(1, 10).unwrap();
        assert_eq!(op.order(), 2);
        assert_eq!(v, vec![RatFunc::one(), RatFunc::one()]);
        // y1 = Γ(x), y2 = Γ(x+1) symbolic check: the operator kills both diagonal solutions'
        // sum exactly when it kills ρ - x and ρ - (x+1) on the right
        let r1 = op
            .right_divmod(&DiffOperator::first_order(shift1(), p(&[0, 1])))
            .unwrap()
            .1;
        let r2 = op
            .right_divmod(&DiffOperator::first_order(shift1(), p(&[1, 1])))
            .unwrap()
            .1;
        assert!(r1.is_zero() && r2.is_zero());
        let one = DiffSystem::new(shift1(), vec![vec![p(&[2, 1])]]).unwrap();
        assert_eq!(
            one.system_to_operator(0, 3).unwrap().0,
            DiffOperator::first_order(shift1(), p(&[2, 1]))
        );
    }

    #[test]
    fn vector_verification() {
        let m = CaseTag::mahler(2).unwrap();
        // f(x^2) = f(x) - x  as the system on (f, 1): ρ(f) = f - x·1, ρ(1) = 1
        let s = DiffSystem::new(
            m.clone(),
            vec![vec![p(&[1]), p(&[0, -1])], vec![p(&[0]), p(&[1])]],
        )
        .unwrap();
        let f = TruncatedSeries::from_terms(
            m.clone(),
            1,
            &[(1, q(1)), (2, q(1)), (4, q(1)), (8, q(1))],
            16,
        )
        .unwrap();
        let one = TruncatedSeries::from_terms(m.clone(), 1, &[(0, q(1))], 16).unwrap();
        let v = s.verify_vector_solution(&[f.clone(), one.clone()]).unwrap();
        assert!(v.ok);
        assert_eq!(v.verified_order, 16);
        let zero = TruncatedSeries::zero(m.clone(), 1, 16).unwrap();
        assert!(s.verify_vector_solution(&[zero.clone(), zero]).unwrap().ok);
        let bad = f
            .add(&TruncatedSeries::from_terms(m, 1, &[(5, q(1))], 16).unwrap())
            .unwrap();
        let v = s.verify_vector_solution(&[bad, one]).unwrap();
        assert!(!v.ok);
        assert_eq!(v.first_failure, Some(5));
    }
}
