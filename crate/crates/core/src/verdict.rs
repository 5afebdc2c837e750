//! Classification outcomes and their certificates.

use serde_json::Value;

use crate::arith::RatFunc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CertificateKind {
    TelescoperAbsent,
    MahlerMultFail,
    NoRationalMatch,
    Order1Exact,
}

impl CertificateKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            CertificateKind::TelescoperAbsent => "TELESCOPER_ABSENT",
            CertificateKind::MahlerMultFail => "MAHLER_MULT_FAIL",
            CertificateKind::NoRationalMatch => "NO_RATIONAL_MATCH",
            CertificateKind::Order1Exact => "ORDER1_EXACT",
        }
    }
}

/// Negative search data backing a hypertranscendence verdict.
#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub kind: CertificateKind,
    pub payload: Value,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    Rational { witness: RatFunc },
    Hypertranscendental { certificate: Certificate },
    Inconclusive { report: Value },
}

impl Outcome {
    pub fn label(&self) -> &'static str {
        match self {
            Outcome::Rational { .. } => "RATIONAL",
            Outcome::Hypertranscendental { .. } => "HYPERTRANSCENDENTAL",
            Outcome::Inconclusive { .. } => "INCONCLUSIVE",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Exactness {
    Exact,
    /// Knobs (e.g. `"B=8"`) whose finiteness the verdict depends on.
    Conditional(Vec<String>),
}

impl Exactness {
    pub fn label(&self) -> &'static str {
        match self {
            Exactness::Exact => "EXACT",
            Exactness::Conditional(_) => "CONDITIONAL",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub outcome: Outcome,
    pub exactness: Exactness,
    /// Pipeline trace: which stages ran, with parameters.
    pub provenance: Vec<String>,
    /// Witnesses live in `x^(1/ell)`.
    pub ell: u64,
}

impl Verdict {
    pub fn rational(witness: RatFunc, provenance: Vec<String>) -> Self {
        Verdict {
            outcome: Outcome::Rational { witness },
            exactness: Exactness::Exact,
            provenance,
            ell: 1,
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self.outcome, Outcome::Rational { .. })
    }

    pub fn is_hypertranscendental(&self) -> bool {
        matches!(self.outcome, Outcome::Hypertranscendental { .. })
    }

    pub fn witness(&self) -> Option<&RatFunc> {
        match &self.outcome {
            Outcome::Rational { witness } => Some(witness),
            _ => None,
        }
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        match &self.outcome {
            Outcome::Hypertranscendental { certificate } => Some(certificate),
            _ => None,
        }
    }
}
