//! First-order equations ρ(y) = a·y + b: standard decomposition, telescopers and the
//! multiplicative criterion, each with the certificate it produces.

use hypertrans::arith::rat::q;
use hypertrans::arith::CaseTag;
use hypertrans::dsl::parse_ratfunc;
use hypertrans::order_one::{
    mahler_mult_criterion, mult_criterion, standard_decompose, telescope_solve,
};

fn main() -> hypertrans::Result<()> {
    let shift = CaseTag::shift(q(1))?;
    let r = |s: &str, c: &CaseTag| parse_ratfunc(s, Some(c));

    let sd = standard_decompose(&r("x*(x+3)/((x+1)*(x+2))", &shift)?, &shift)?;
    println!(
        "a = a*·ρ(e)/e with a* = {}, e = {}",
        sd.a_star.render("x"),
        sd.e.render("x")
    );

    // Δh = 1/(x(x+1)) telescopes; Δh = 1/x² does not (trigamma)
    for b in ["1/(x*(x+1))", "1/x^2"] {
        match telescope_solve(&r("1", &shift)?, &r(b, &shift)?, &shift)? {
            Some(t) => println!("b = {b}: h = {}, d = {}", t.h.render("x"), t.d),
            None => println!("b = {b}: no telescoper"),
        }
    }

    let qc = CaseTag::qdiff(q(3))?;
    match mult_criterion(&r("3*x*(x-9)/(x-3)", &qc)?, &qc)? {
        Some(w) => println!(
            "q = 3: c = {}, α = {}, g = {}",
            w.c,
            w.alpha,
            w.g.render("x")
        ),
        None => println!("q = 3: not of the form c·x^α·ρ(g)/g"),
    }
    for a in ["x+1", "x+2"] {
        let w = mahler_mult_criterion(&parse_ratfunc(a, None)?, 2)?;
        println!(
            "Mahler p = 2, a = {a}: {}",
            w.map_or("fails".into(), |w| format!("g = {}", w.g.render("x")))
        );
    }
    Ok(())
}
