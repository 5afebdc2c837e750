//! Extending a prefix through the recurrence, then looking for rational structure with
//! Hankel ranks and Padé approximants.

use hypertrans::dsl::parse_problem;
use hypertrans::rationality::{hankel_profile, pade_match, HankelProfile};
use hypertrans::solver::{extend_prefix, resonances};

fn main() -> hypertrans::Result<()> {
    let src =
        "case = shift h=1\ncoeffs: (2*x+x^2)/(1+x), -(3+3*x+x^2)/(2+x), 1\nprefix: 1:1, 0:1\n";
    let p = parse_problem(src)?;
    println!("resonances: {:?}", resonances(&p.op)?);
    let f = extend_prefix(&p.op, None, &p.prefix_series()?.unwrap(), 12)?;
    // exponents are in x; at infinity the series runs downward
    let terms: Vec<String> = f
        .terms()
        .iter()
        .map(|((n, d), c)| {
            if *d == 1 {
                format!("{c}·x^{n}")
            } else {
                format!("{c}·x^({n}/{d})")
            }
        })
        .collect();
    println!("f = {} + O(x^-12)", terms.join(" + "));

    let h = hankel_profile(&f, 5)?;
    println!("Hankel rank {}, singular sizes {:?}", h.rank, singular(&h));
    if let Some(w) = pade_match(&f, 2, 2)? {
        println!("Padé [2/2] matches {}", w.render("x"));
    }

    let lac = parse_problem(include_str!("../problems/f1.problem"))?;
    let g = extend_prefix(
        &lac.op,
        lac.rhs.as_ref(),
        &lac.prefix_series()?.unwrap(),
        40,
    )?;
    let h = hankel_profile(&g, 8)?;
    println!(
        "lacunary: Hankel rank {}, singular sizes {:?}",
        h.rank,
        singular(&h)
    );
    Ok(())
}

fn singular(h: &HankelProfile) -> Vec<usize> {
    h.sizes
        .iter()
        .filter(|(_, zero)| *zero)
        .map(|(k, _)| *k)
        .collect()
}
