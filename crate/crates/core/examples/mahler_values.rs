//! Certified enclosures of a Mahler function and its derivatives at a rational point.

use hypertrans::arith::rat::{q, qf, qpow};
use hypertrans::classify::{describe_interval, evaluate_mahler_derivatives, ClassifyConfig};
use hypertrans::dsl::parse_problem;

fn main() -> hypertrans::Result<()> {
    let p = parse_problem(include_str!("../problems/f1.problem"))?;
    let prefix = p.prefix_series()?.unwrap();
    let eps = qpow(&q(10), -12);
    for alpha in [qf(1, 2), qf(1, 3), qf(-2, 5)] {
        let ev = evaluate_mahler_derivatives(
            &p.op,
            p.rhs.as_ref(),
            &prefix,
            &alpha,
            2,
            &eps,
            &ClassifyConfig::default(),
        )?;
        println!("α = {alpha} ({} terms)", ev.terms);
        for (k, iv) in ev.values.iter().enumerate() {
            println!("  f^({k}) ∈ {}", describe_interval(iv, 14));
        }
    }
    Ok(())
}
