//! Skew-polynomial arithmetic in ρ: products do not commute, right division
//! recovers the factors, and a planted rational solution splits off a right factor.

use hypertrans::arith::rat::q;
use hypertrans::arith::CaseTag;
use hypertrans::dsl::{parse_operator, parse_ratfunc};

fn main() -> hypertrans::Result<()> {
    let case = CaseTag::shift(q(1))?;
    let a = parse_operator("S - x", &case)?;
    let b = parse_operator("x*S + 1", &case)?;

    let ab = a.mul(&b)?;
    let ba = b.mul(&a)?;
    println!("A·B = {ab}");
    println!("B·A = {ba}");

    let (quot, rem) = ab.right_divmod(&b)?;
    println!("A·B = Q·B + R with Q = {quot}, R = {rem}");
    assert_eq!(quot, a);
    assert!(rem.is_zero());

    // y = 1/x solves (x+1)ρ(y) - x·y = 0
    let l = parse_operator("(x+1)*S - x", &case)?;
    let y = parse_ratfunc("1/x", Some(&case))?;
    println!("L(1/x) = {}", l.apply(&y).render("x"));
    let factor = parse_operator("S^2 + 3", &case)?.mul(&l)?;
    let d = factor.right_factor_from_rational_solution(&y)?;
    println!("right factor from 1/x: {d}");
    let (_, rem) = factor.right_divmod(&d)?;
    assert!(rem.is_zero());
    Ok(())
}
