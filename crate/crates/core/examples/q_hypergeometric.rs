//! A second-order q-difference equation (q = 4) whose power-series solution is not
//! rational, with a sweep over the truncation to show the verdict is stable.

use hypertrans::classify::{classify_equation, ClassifyConfig};
use hypertrans::dsl::parse_problem;
use hypertrans::solver::extend_prefix;

fn main() -> hypertrans::Result<()> {
    let p = parse_problem(include_str!("../problems/f2.problem"))?;
    let prefix = p.prefix_series()?.unwrap();
    println!("operator: {}", p.op);

    let f = extend_prefix(&p.op, None, &prefix, 6)?;
    for k in 0..6 {
        println!("  c{k} = {}", f.coeff(k).unwrap());
    }

    for n in [32, 64, 96] {
        let cfg = ClassifyConfig {
            truncation: n,
            iterate: vec![1],
            ..ClassifyConfig::default()
        };
        let v = classify_equation(&p.op, None, &prefix, &cfg)?;
        println!("N = {n:3}: {} / {}", v.outcome.label(), v.exactness.label());
    }
    Ok(())
}
