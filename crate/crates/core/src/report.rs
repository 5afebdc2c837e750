//! Versioned JSON reports.

use serde_json::{json, Map, Value};

use crate::error::Error;
use crate::rationality::RationalSpace;
use crate::verdict::{Exactness, Outcome, Verdict};

pub const SCHEMA_VERSION: u32 = 1;

/// Exit status for a definite verdict (0) or an inconclusive one (2).
pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;

/// Wraps a command body: `{"schema_version", "command", "status", ...body}`.
pub fn envelope(command: &str, status: &str, body: Value) -> Value {
    let mut m = Map::new();
    m.insert("schema_version".into(), json!(SCHEMA_VERSION));
    m.insert("command".into(), json!(command));
    m.insert("status".into(), json!(status));
    if let Value::Object(b) = body {
        m.extend(b);
    } else {
        m.insert("result".into(), body);
    }
    Value::Object(m)
}

fn variable(ell: u64) -> String {
    if ell == 1 {
        "x".into()
    } else {
        format!("x^(1/{ell})")
    }
}

pub fn verdict_json(v: &Verdict) -> Value {
    let var = variable(v.ell);
    let mut m = Map::new();
    m.insert("outcome".into(), json!(v.outcome.label()));
    m.insert("exactness".into(), json!(v.exactness.label()));
    if let Exactness::Conditional(knobs) = &v.exactness {
        m.insert("conditional_on".into(), json!(knobs));
    }
    match &v.outcome {
        Outcome::Rational { witness } => {
            m.insert("witness".into(), json!(witness.render(&var)));
            m.insert("witness_variable".into(), json!(var));
        }
        Outcome::Hypertranscendental { certificate } => {
            m.insert(
                "certificate".into(),
                json!({"kind": certificate.kind.as_str(), "payload": certificate.payload}),
            );
        }
        Outcome::Inconclusive { report } => {
            m.insert("bounds".into(), report.clone());
        }
    }
    m.insert("ramification".into(), json!(v.ell));
    m.insert("provenance".into(), json!(v.provenance));
    Value::Object(m)
}

pub fn verdict_status(v: &Verdict) -> (&'static str, i32) {
    match v.outcome {
        Outcome::Inconclusive { .. } => ("inconclusive", EXIT_INCONCLUSIVE),
        _ => ("ok", EXIT_OK),
    }
}

pub fn space_json(s: &RationalSpace) -> Value {
    json!({
        "particular": s.particular.as_ref().map(|p| p.render("x")),
        "basis": s.basis.iter().map(|b| b.render("x")).collect::<Vec<_>>(),
        "dimension": s.basis.len(),
        "complete": s.complete,
        "bounds": s.bounds,
    })
}

/// Short machine name of an error variant, e.g. `"DegreeBoundExceeded"`.
pub fn error_kind(e: &Error) -> String {
    let dbg = format!("{e:?}");
    dbg.split(|c: char| !c.is_alphanumeric())
        .next()
        .unwrap_or("Error")
        .to_string()
}

pub fn error_report(command: &str, e: &Error) -> Value {
    let mut err = json!({"kind": error_kind(e), "message": e.to_string()});
    if let Error::Parse { line, column, .. } = e {
        err["line"] = json!(line);
        err["column"] = json!(column);
    }
    envelope(command, "error", json!({ "error": err }))
}

pub fn to_text(v: &Value, pretty: bool) -> String {
    if pretty {
        serde_json::to_string_pretty(v).unwrap()
    } else {
        serde_json::to_string(v).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::RatFunc;
    use crate::verdict::{Certificate, CertificateKind};

    #[test]
    fn shapes() {
        let v = Verdict::rational(RatFunc::x(), vec!["stage".into()]);
        let j = envelope("classify", "ok", verdict_json(&v));
        assert_eq!(j["schema_version"], 1);
        assert_eq!(j["outcome"], "RATIONAL");
        assert_eq!(j["witness"], "x");
        let h = Verdict {
            outcome: Outcome::Hypertranscendental {
                certificate: Certificate {
                    kind: CertificateKind::MahlerMultFail,
                    payload: json!({}),
                },
            },
            exactness: Exactness::Conditional(vec!["B=8".into()]),
            provenance: vec![],
            ell: 2,
        };
        let j = verdict_json(&h);
        assert_eq!(j["certificate"]["kind"], "MAHLER_MULT_FAIL");
        assert_eq!(j["conditional_on"][0], "B=8");
        assert_eq!(
            error_kind(&Error::DegreeBoundExceeded { needed: 1, cap: 0 }),
            "DegreeBoundExceeded"
        );
        let e = error_report(
            "x",
            &Error::Parse {
                line: 2,
                column: 3,
                message: "m".into(),
            },
        );
        assert_eq!(
            (e["error"]["line"].clone(), e["status"].clone()),
            (json!(2), json!("error"))
        );
    }
}
