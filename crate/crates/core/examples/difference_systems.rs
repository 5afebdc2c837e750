//! Companion systems, iteration A_[ℓ] = σ^{ℓ-1}(A)···A, gauge transforms and the
//! cyclic-vector round trip back to an operator.

use hypertrans::arith::rat::qf;
use hypertrans::arith::{CaseTag, RatFunc};
use hypertrans::dsl::{parse_operator, parse_ratfunc};
use hypertrans::system::GaugeMatrix;

fn main() -> hypertrans::Result<()> {
    let case = CaseTag::qdiff(qf(1, 2))?;
    let l = parse_operator("S^2 - (x+1)*S + x^2", &case)?;
    let sys = l.companion_matrix()?;
    println!(
        "companion of {l}:\n{}",
        serde_json::to_string_pretty(&sys.to_json()).unwrap()
    );

    let it = sys.iterate(3);
    println!("det A_[3] = {}", it.det().render("x"));
    let expect = (0..3).fold(RatFunc::one(), |acc, k| {
        &acc * &sys.det().sigma_pow(&case, k)
    });
    assert_eq!(it.det(), expect);

    let r = |s: &str| parse_ratfunc(s, Some(&case));
    let t = GaugeMatrix::new(vec![vec![r("1")?, r("x")?], vec![r("0")?, r("1+x")?]])?;
    let b = sys.gauge_transform(&t)?;
    println!("gauge-equivalent system has det {}", b.det().render("x"));

    let (op, v) = b.system_to_operator(7, 16)?;
    println!(
        "cyclic vector {:?} gives {op}",
        v.iter().map(|e| e.render("x")).collect::<Vec<_>>()
    );
    Ok(())
}
