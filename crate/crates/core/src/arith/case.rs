//! The three operator cases: shift, q-dilation and Mahler substitution.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use super::poly::Poly;
use super::rat::{fmt_q, q, qpow, Q};
use crate::error::{Error, Result};

/// Where solutions of a shift equation are expanded.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ShiftPoint {
    /// Laurent series in `1/x`.
    AtInfinity,
    /// No series model; only rational-function side analysis.
    Meromorphic,
}

/// Expansion point of a truncated series.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Point {
    #[serde(rename = "ZERO")]
    Zero,
    #[serde(rename = "INFINITY")]
    Infinity,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CaseTag {
    /// `x -> x + h`
    Shift { h: Q, point: ShiftPoint },
    /// `x -> q x`
    QDiff { q: Q },
    /// `x -> x^p`
    Mahler { p: u64 },
}

impl CaseTag {
    pub fn shift(h: Q) -> Result<Self> {
        if h.is_zero() {
            return Err(Error::Semantic("shift step h must be nonzero".into()));
        }
        Ok(CaseTag::Shift {
            h,
            point: ShiftPoint::AtInfinity,
        })
    }

    /// Shift case without a series model (solutions are meromorphic functions).
    pub fn shift_meromorphic(h: Q) -> Result<Self> {
        if h.is_zero() {
            return Err(Error::Semantic("shift step h must be nonzero".into()));
        }
        Ok(CaseTag::Shift {
            h,
            point: ShiftPoint::Meromorphic,
        })
    }

    pub fn qdiff(qv: Q) -> Result<Self> {
        if qv.is_zero() || qv.abs().is_one() {
            return Err(Error::Semantic(format!(
                "q = {} is zero or a root of unity",
                fmt_q(&qv)
            )));
        }
        Ok(CaseTag::QDiff { q: qv })
    }

    pub fn mahler(p: u64) -> Result<Self> {
        if p < 2 {
            return Err(Error::Semantic(format!(
                "Mahler p = {p} must be at least 2"
            )));
        }
        Ok(CaseTag::Mahler { p })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CaseTag::Shift { .. } => "shift",
            CaseTag::QDiff { .. } => "q",
            CaseTag::Mahler { .. } => "mahler",
        }
    }

    pub fn is_shift(&self) -> bool {
        matches!(self, CaseTag::Shift { .. })
    }

    pub fn is_mahler(&self) -> bool {
        matches!(self, CaseTag::Mahler { .. })
    }

    /// Expansion point of the solution field, `None` for the meromorphic shift case.
    pub fn point(&self) -> Option<Point> {
        match self {
            CaseTag::Shift {
                point: ShiftPoint::AtInfinity,
                ..
            } => Some(Point::Infinity),
            CaseTag::Shift { .. } => None,
            _ => Some(Point::Zero),
        }
    }

    /// Constant `c` in `d∘σ = c·σ∘d`.
    pub fn commutation_constant(&self) -> Q {
        match self {
            CaseTag::Mahler { p } => q(*p as i64),
            _ => Q::one(),
        }
    }

    /// Case of the iterated operator `σ^r`.
    pub fn iterate(&self, r: u32) -> CaseTag {
        match self {
            CaseTag::Shift { h, point } => CaseTag::Shift {
                h: h * q(r as i64),
                point: *point,
            },
            CaseTag::QDiff { q: qv } => CaseTag::QDiff {
                q: qpow(qv, r as i64),
            },
            CaseTag::Mahler { p } => CaseTag::Mahler { p: p.pow(r) },
        }
    }

    /// `σ^k` applied to a polynomial, `k >= 0`.
    pub fn sigma_poly(&self, f: &Poly, k: u32) -> Poly {
        if k == 0 {
            return f.clone();
        }
        match self {
            CaseTag::Shift { h, .. } => f.taylor_shift(&(h * q(k as i64))),
            CaseTag::QDiff { q: qv } => f.dilate(&qpow(qv, k as i64)),
            CaseTag::Mahler { p } => f.inflate(p.pow(k) as usize),
        }
    }

    /// Whether `x` divides `σ(x)` (true for q-dilation and Mahler).
    pub fn fixes_origin(&self) -> bool {
        !self.is_shift()
    }

    /// Parameter rendering used in reports: `shift:1`, `q:4`, `mahler:2`.
    pub fn spec_string(&self) -> String {
        match self {
            CaseTag::Shift {
                h,
                point: ShiftPoint::AtInfinity,
            } => format!("shift:{}", fmt_q(h)),
            CaseTag::Shift { h, .. } => format!("shift0:{}", fmt_q(h)),
            CaseTag::QDiff { q: qv } => format!("q:{}", fmt_q(qv)),
            CaseTag::Mahler { p } => format!("mahler:{p}"),
        }
    }

    /// Parses `shift:h`, `shift0:h`, `q:q`, `mahler:p`.
    pub fn parse(s: &str) -> Result<Self> {
        let (kind, param) = s
            .split_once(':')
            .ok_or_else(|| Error::Semantic(format!("case `{s}` must look like kind:param")))?;
        let val = super::rat::parse_q(param)
            .ok_or_else(|| Error::Semantic(format!("bad case parameter `{param}`")))?;
        match kind.trim() {
            "shift" => CaseTag::shift(val),
            "shift0" => CaseTag::shift_meromorphic(val),
            "q" | "qdiff" => CaseTag::qdiff(val),
            "mahler" => {
                let p = super::rat::to_i64(&val)
                    .filter(|p| *p >= 2)
                    .ok_or_else(|| {
                        Error::Semantic(format!("Mahler p = {param} must be an integer >= 2"))
                    })?;
                CaseTag::mahler(p as u64)
            }
            other => Err(Error::Semantic(format!("unknown case kind `{other}`"))),
        }
    }
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.spec_string())
    }
}

impl Serialize for CaseTag {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.spec_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invariants() {
        assert!(CaseTag::shift(q(0)).is_err());
        assert!(CaseTag::qdiff(q(1)).is_err());
        assert!(CaseTag::qdiff(q(-1)).is_err());
        assert!(CaseTag::qdiff(q(0)).is_err());
        assert!(CaseTag::mahler(1).is_err());
        assert!(CaseTag::qdiff(super::super::rat::qf(1, 2)).is_ok());
    }

    #[test]
    fn parse_roundtrip() {
        for s in ["shift:1", "shift0:1/2", "q:4", "mahler:3"] {
            assert_eq!(CaseTag::parse(s).unwrap().spec_string(), s);
        }
        assert!(CaseTag::parse("q:1").is_err());
    }
}
