//! Complete rational solution spaces in the shift and q cases, including an
//! inhomogeneous equation with a particular solution.

use hypertrans::arith::rat::{q, qf};
use hypertrans::arith::CaseTag;
use hypertrans::dsl::{parse_operator, parse_ratfunc};
use hypertrans::rationality::{rational_solution_space, universal_denominator, SpaceConfig};

fn main() -> hypertrans::Result<()> {
    let shift = CaseTag::shift(q(1))?;
    // (S - σ(g)/g) with g = 1/(x (x+2)), times a left factor
    let right = parse_operator("x*(x+2)*S - (x+1)*(x+3)", &shift)?;
    let op = parse_operator("S + x", &shift)?.mul(&right)?;
    println!("L = {op}");
    println!(
        "universal denominator: {}",
        universal_denominator(&op.clear_denominators(), &shift)?
    );
    let space = rational_solution_space(&op, None, &SpaceConfig::default())?;
    for g in &space.basis {
        println!("  kernel element {}", g.render("x"));
    }

    let qc = CaseTag::qdiff(qf(2, 3))?;
    let op = parse_operator("S - 1", &qc)?;
    let b = parse_ratfunc("x", Some(&qc))?;
    let space = rational_solution_space(&op, Some(&b), &SpaceConfig::default())?;
    println!(
        "ρ(y) - y = x with q = 2/3: particular {}, kernel dimension {}",
        space.particular.as_ref().unwrap().render("x"),
        space.basis.len()
    );
    Ok(())
}
