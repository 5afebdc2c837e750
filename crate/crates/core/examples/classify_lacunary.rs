//! The lacunary Mahler series Σ x^(2^n): read a problem file, classify, print the report.

use hypertrans::classify::{classify_equation, ClassifyConfig};
use hypertrans::dsl::parse_problem;
use hypertrans::report::{envelope, to_text, verdict_json, verdict_status};

fn main() -> hypertrans::Result<()> {
    let problem = parse_problem(include_str!("../problems/f1.problem"))?;
    let prefix = problem
        .prefix_series()?
        .expect("the problem carries a prefix");
    let verdict = classify_equation(
        &problem.op,
        problem.rhs.as_ref(),
        &prefix,
        &ClassifyConfig::default(),
    )?;
    let (status, _) = verdict_status(&verdict);
    println!(
        "{}",
        to_text(&envelope("classify", status, verdict_json(&verdict)), true)
    );
    Ok(())
}
