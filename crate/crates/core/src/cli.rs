//! Command-line front end: argument parsing, dispatch and report emission.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::arith::rat::fmt_q;
use crate::arith::{CaseTag, Point, RatFunc, Q};
use crate::classify::{
    classify_equation, describe_interval, evaluate_mahler_derivatives, ClassifyConfig,
};
use crate::dsl::{parse_operator, parse_problem, parse_ratfunc, Problem};
use crate::error::{Error, Result};
use crate::order_one::{
    classify_order_one, is_standard, mult_criterion, standard_decompose, telescope_solve,
    OrderOneConfig,
};
use crate::rationality::{rational_solution_space, SpaceConfig};
use crate::report::{
    self, envelope, error_report, space_json, verdict_json, verdict_status, EXIT_ERROR,
    EXIT_INCONCLUSIVE, EXIT_OK,
};
use crate::solver::extend_prefix;
use crate::system::{DiffSystem, GaugeMatrix, Matrix};
use crate::verdict::Verdict;

#[derive(Parser, Debug)]
#[command(
    name = "hypertrans",
    version,
    about = "Decide whether a series solution of a difference equation is rational or hypertranscendental"
)]
pub struct Cli {
    #[command(flatten)]
    pub knobs: Knobs,
    /// Compact single-line JSON (the default).
    #[arg(long, global = true, conflicts_with = "pretty")]
    pub json: bool,
    /// Indented JSON.
    #[arg(long, global = true)]
    pub pretty: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Default, Clone)]
pub struct Knobs {
    /// Series truncation N.
    #[arg(long, global = true)]
    pub truncation: Option<i64>,
    /// Padé cross-check degree d.
    #[arg(long, global = true)]
    pub degree_bound: Option<usize>,
    /// Mahler denominator cap multiplier B.
    #[arg(long, global = true)]
    pub mahler_orbit_bound: Option<i64>,
    /// Iterates ρ^r to cross-check, e.g. `1,2`.
    #[arg(long, global = true, value_delimiter = ',')]
    pub iterate: Option<Vec<u32>>,
    /// Seed for randomized searches.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Classify the prefixed solution of each problem file (files run in parallel).
    Classify {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Extend the prefix to a longer truncated series.
    Series {
        /// Truncation order in the local parameter.
        #[arg(long, default_value_t = 16)]
        order: i64,
        file: PathBuf,
    },
    /// All rational solutions of the equation.
    Ratsols { file: PathBuf },
    /// Order-one analysis: standard form, telescoper, multiplicative criterion, verdict.
    Certify1 { file: PathBuf },
    /// Ore-operator arithmetic on expressions in `S` and `x`.
    Ore {
        #[arg(value_enum)]
        action: OreAction,
        /// Case as `shift:h`, `shift0:h`, `q:q` or `mahler:p`.
        #[arg(long)]
        case: String,
        /// Operands (the last one is a rational function for `apply`).
        #[arg(required = true)]
        operands: Vec<String>,
    },
    /// Difference systems ρ(Y) = A Y given row by row.
    System {
        #[arg(value_enum)]
        action: SystemAction,
        #[arg(long)]
        case: String,
        /// A matrix row, comma separated; repeat for each row.
        #[arg(long = "row")]
        rows: Vec<String>,
        /// Gauge matrix row for `gauge`; repeat for each row.
        #[arg(long = "gauge-row")]
        gauge_rows: Vec<String>,
        /// Iteration count for `iterate`.
        #[arg(short = 'r', long, default_value_t = 2)]
        r: u32,
        /// Operator for `companion`.
        #[arg(long)]
        operator: Option<String>,
    },
    /// Rigorous enclosures of f(α), f'(α), ... for a Mahler solution.
    Eval {
        file: PathBuf,
        /// Point α inside the unit disc, e.g. `1/2`.
        #[arg(long)]
        at: String,
        /// Highest derivative r.
        #[arg(long, default_value_t = 0)]
        derivs: usize,
        /// Target width, e.g. `10^-8`.
        #[arg(long, default_value = "10^-8")]
        eps: String,
    },
    /// Runs built-in consistency checks.
    Selftest,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum OreAction {
    Mul,
    Add,
    Sub,
    Divmod,
    Apply,
    Render,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum SystemAction {
    Det,
    Iterate,
    Gauge,
    Cyclic,
    Companion,
}

/// Output of one command: the JSON report and the process exit status.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: Value,
    pub code: i32,
}

impl Outcome {
    fn ok(report: Value) -> Self {
        Outcome {
            report,
            code: EXIT_OK,
        }
    }
}

fn config(knobs: &Knobs, p: Option<&Problem>) -> ClassifyConfig {
    let mut c = ClassifyConfig::default();
    if let Some(p) = p {
        let o = &p.config;
        c.truncation = o.truncation.unwrap_or(c.truncation);
        c.degree_bound = o.degree_bound.unwrap_or(c.degree_bound);
        c.orbit_bound = o.orbit_bound.unwrap_or(c.orbit_bound);
        c.iterate = o.iterate.clone().unwrap_or(c.iterate);
        c.seed = o.seed.unwrap_or(c.seed);
    }
    c.truncation = knobs.truncation.unwrap_or(c.truncation);
    c.degree_bound = knobs.degree_bound.unwrap_or(c.degree_bound);
    c.orbit_bound = knobs.mahler_orbit_bound.unwrap_or(c.orbit_bound);
    c.iterate = knobs.iterate.clone().unwrap_or(c.iterate);
    c.seed = knobs.seed.unwrap_or(c.seed);
    c
}

fn config_json(c: &ClassifyConfig) -> Value {
    json!({"N": c.truncation, "d": c.degree_bound, "B": c.orbit_bound, "iterate": c.iterate, "seed": c.seed})
}

fn load(path: &PathBuf) -> Result<Problem> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Semantic(format!("cannot read {}: {e}", path.display())))?;
    parse_problem(&text)
}

fn order_one_cfg(c: &ClassifyConfig) -> OrderOneConfig {
    OrderOneConfig {
        truncation: c.truncation,
        orbit_bound: c.orbit_bound,
    }
}

fn rf(f: &RatFunc) -> String {
    f.render("x")
}

/// Classifies one problem.
pub fn classify_problem(p: &Problem, cfg: &ClassifyConfig) -> Result<Verdict> {
    match p.prefix_series()? {
        Some(pre) => classify_equation(&p.op, p.rhs.as_ref(), &pre, cfg),
        None => match p.pair() {
            Some((a, b)) => classify_order_one(&a, &b, &p.case, None, &order_one_cfg(cfg)),
            None => Err(Error::Semantic(
                "a prefix is required for operators of order above one".into(),
            )),
        },
    }
}

fn classify_one(path: &PathBuf, knobs: &Knobs) -> Outcome {
    let res = load(path).and_then(|p| {
        let cfg = config(knobs, Some(&p));
        classify_problem(&p, &cfg).map(|v| (v, cfg, p))
    });
    match res {
        Ok((v, cfg, p)) => {
            let (status, code) = verdict_status(&v);
            let mut body = verdict_json(&v);
            body["file"] = json!(path.display().to_string());
            body["case"] = json!(p.case.spec_string());
            body["operator"] = json!(p.op.render());
            body["config"] = config_json(&cfg);
            Outcome {
                report: envelope("classify", status, body),
                code,
            }
        }
        Err(e) => {
            let mut r = error_report("classify", &e);
            r["file"] = json!(path.display().to_string());
            Outcome {
                report: r,
                code: EXIT_ERROR,
            }
        }
    }
}

fn cmd_classify(files: &[PathBuf], knobs: &Knobs) -> Outcome {
    if files.len() == 1 {
        return classify_one(&files[0], knobs);
    }
    let outs: Vec<Outcome> = files.par_iter().map(|f| classify_one(f, knobs)).collect();
    let code = if outs.iter().any(|o| o.code == EXIT_ERROR) {
        EXIT_ERROR
    } else if outs.iter().any(|o| o.code == EXIT_INCONCLUSIVE) {
        EXIT_INCONCLUSIVE
    } else {
        EXIT_OK
    };
    let status = ["ok", "error", "inconclusive"][code as usize];
    let reports: Vec<Value> = outs.into_iter().map(|o| o.report).collect();
    Outcome {
        report: envelope("classify", status, json!({ "reports": reports })),
        code,
    }
}

fn cmd_series(file: &PathBuf, order: i64, knobs: &Knobs) -> Result<Outcome> {
    let p = load(file)?;
    let _ = config(knobs, Some(&p));
    let pre = p
        .prefix_series()?
        .ok_or_else(|| Error::Semantic("the series command needs a prefix".into()))?;
    let s = extend_prefix(&p.op, p.rhs.as_ref(), &pre, order)?.truncate(order);
    let sign: i64 = if s.point() == Point::Zero { 1 } else { -1 };
    let coefficients: Vec<Value> = (s.start().min(0)..s.order())
        .map(|k| {
            let e = Q::new((sign * k).into(), (s.ell() as i64).into());
            json!([fmt_q(&e), fmt_q(&s.coeff(k).unwrap())])
        })
        .collect();
    Ok(Outcome::ok(envelope(
        "series",
        "ok",
        json!({"series": s.to_json(), "coefficients": coefficients}),
    )))
}

fn cmd_ratsols(file: &PathBuf, knobs: &Knobs) -> Result<Outcome> {
    let p = load(file)?;
    let cfg = config(knobs, Some(&p));
    let sc = SpaceConfig {
        degree_cap: 4 * cfg.truncation.max(16),
        orbit_bound: cfg.orbit_bound,
        truncation: cfg.truncation,
    };
    let space = rational_solution_space(&p.op, p.rhs.as_ref(), &sc)?;
    let code = if space.complete {
        EXIT_OK
    } else {
        EXIT_INCONCLUSIVE
    };
    let status = if space.complete { "ok" } else { "inconclusive" };
    Ok(Outcome {
        report: envelope(
            "ratsols",
            status,
            json!({"operator": p.op.render(), "rhs": p.rhs.as_ref().map(rf), "space": space_json(&space)}),
        ),
        code,
    })
}

fn step<T>(r: Result<T>, f: impl FnOnce(T) -> Value) -> Value {
    match r {
        Ok(v) => f(v),
        Err(e) => json!({"error": {"kind": report::error_kind(&e), "message": e.to_string()}}),
    }
}

fn cmd_certify1(file: &PathBuf, knobs: &Knobs) -> Result<Outcome> {
    let p = load(file)?;
    let cfg = config(knobs, Some(&p));
    let (a, b) = p
        .pair()
        .ok_or_else(|| Error::Semantic("certify1 needs an order-one equation".into()))?;
    let case = &p.case;
    let standard = step(is_standard(&a, case), |s| json!(s));
    let sd = standard_decompose(&a, case);
    let decomposition = step(
        sd.clone(),
        |d| json!({"a_star": rf(&d.a_star), "e": rf(&d.e)}),
    );
    let telescoper = step(
        sd.and_then(|d| {
            let bt = b.checked_div(&d.e.sigma(case))?;
            telescope_solve(&d.a_star, &bt, case)
        }),
        |t| match t {
            Some(t) => json!({"found": true, "h": rf(&t.h), "d": fmt_q(&t.d), "r": t.r}),
            None => json!({"found": false}),
        },
    );
    let mult = step(mult_criterion(&a, case), |w| match w {
        Some(w) => {
            json!({"found": true, "c": fmt_q(&w.c), "alpha": w.alpha, "g": rf(&w.g), "verified": w.verify(&a, case)})
        }
        None => json!({"found": false}),
    });
    let pre = p.prefix_series()?;
    let v = classify_order_one(&a, &b, case, pre.as_ref(), &order_one_cfg(&cfg))?;
    let (status, code) = verdict_status(&v);
    let mut body = verdict_json(&v);
    body["a"] = json!(rf(&a));
    body["b"] = json!(rf(&b));
    body["standard"] = standard;
    body["standard_decomposition"] = decomposition;
    body["telescoper"] = telescoper;
    body["multiplicative_witness"] = mult;
    Ok(Outcome {
        report: envelope("certify1", status, body),
        code,
    })
}

fn cmd_ore(action: OreAction, case: &str, ops: &[String]) -> Result<Outcome> {
    let case = CaseTag::parse(case)?;
    let need = match action {
        OreAction::Render => 1,
        _ => 2,
    };
    if ops.len() != need {
        return Err(Error::Semantic(
            format!("ore {action:?} takes {need} operand(s)").to_lowercase(),
        ));
    }
    let l = parse_operator(&ops[0], &case)?;
    let body = match action {
        OreAction::Render => json!({"result": l.to_json()}),
        OreAction::Mul => json!({"result": l.mul(&parse_operator(&ops[1], &case)?)?.to_json()}),
        OreAction::Add => json!({"result": l.add(&parse_operator(&ops[1], &case)?)?.to_json()}),
        OreAction::Sub => json!({"result": l.sub(&parse_operator(&ops[1], &case)?)?.to_json()}),
        OreAction::Divmod => {
            let (qq, r) = l.right_divmod(&parse_operator(&ops[1], &case)?)?;
            json!({"quotient": qq.to_json(), "remainder": r.to_json()})
        }
        OreAction::Apply => {
            let f = parse_ratfunc(&ops[1], Some(&case))?;
            json!({"result": rf(&l.apply(&f))})
        }
    };
    Ok(Outcome::ok(envelope("ore", "ok", body)))
}

/// Splits on commas outside parentheses.
fn split_top(s: &str) -> Vec<String> {
    let (mut out, mut cur, mut depth) = (Vec::new(), String::new(), 0i32);
    for c in s.chars() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(std::mem::take(&mut cur));
                continue;
            }
            _ => {}
        }
        cur.push(c);
    }
    out.push(cur);
    out
}

fn parse_matrix(rows: &[String], case: &CaseTag) -> Result<Matrix> {
    let m: Matrix = rows
        .iter()
        .map(|r| {
            split_top(r)
                .iter()
                .map(|e| parse_ratfunc(e, Some(case)))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    if m.is_empty() || m.iter().any(|r| r.len() != m.len()) {
        return Err(Error::Semantic(
            "the matrix must be square and nonempty".into(),
        ));
    }
    Ok(m)
}

#[allow(clippy::too_many_arguments)]
fn cmd_system(
    action: SystemAction,
    case: &str,
    rows: &[String],
    gauge_rows: &[String],
    r: u32,
    operator: Option<&str>,
    knobs: &Knobs,
) -> Result<Outcome> {
    let case = CaseTag::parse(case)?;
    let body = if action == SystemAction::Companion {
        let src = operator.ok_or_else(|| Error::Semantic("companion needs --operator".into()))?;
        let l = parse_operator(src, &case)?;
        json!({"operator": l.to_json(), "system": l.companion_matrix()?.to_json()})
    } else {
        let sys = DiffSystem::new(case.clone(), parse_matrix(rows, &case)?)?;
        match action {
            SystemAction::Det => {
                json!({"system": sys.to_json(), "det_operator": sys.det_subsystem().to_json()})
            }
            SystemAction::Iterate => {
                if r == 0 {
                    return Err(Error::Semantic("-r must be positive".into()));
                }
                json!({"r": r, "system": sys.iterate(r).to_json()})
            }
            SystemAction::Gauge => {
                let t = GaugeMatrix::new(parse_matrix(gauge_rows, &case)?)?;
                json!({"system": sys.gauge_transform(&t)?.to_json()})
            }
            SystemAction::Cyclic => {
                let seed = knobs.seed.unwrap_or(0);
                let (l, v) = sys.system_to_operator(seed, 64)?;
                json!({"operator": l.to_json(), "cyclic_vector": v.iter().map(rf).collect::<Vec<_>>(), "seed": seed})
            }
            SystemAction::Companion => unreachable!(),
        }
    };
    Ok(Outcome::ok(envelope("system", "ok", body)))
}

fn constant(src: &str, what: &str) -> Result<Q> {
    parse_ratfunc(src, None)?
        .as_constant()
        .ok_or_else(|| Error::Semantic(format!("{what} must be a rational constant")))
}

const VALUES_CAVEAT: &str = "For a solution that is not rational, the values f(α), f'(α), …, f^(r)(α) at nonzero algebraic α in the unit disc are algebraically independent outside a finite exceptional set of points; that set is not effectively computable and is not computed here. An enclosure containing 0 may signal an exceptional point.";

fn cmd_eval(file: &PathBuf, at: &str, derivs: usize, eps: &str, knobs: &Knobs) -> Result<Outcome> {
    let p = load(file)?;
    let cfg = config(knobs, Some(&p));
    let alpha = constant(at, "--at")?;
    let eps = constant(eps, "--eps")?;
    if eps <= Q::from_integer(0.into()) {
        return Err(Error::Semantic("--eps must be positive".into()));
    }
    let pre = p
        .prefix_series()?
        .ok_or_else(|| Error::Semantic("eval needs a prefix".into()))?;
    let ev = evaluate_mahler_derivatives(&p.op, p.rhs.as_ref(), &pre, &alpha, derivs, &eps, &cfg)?;
    let digits = (eps.denom().to_string().len() + 2).max(10);
    let values: Vec<Value> = ev
        .values
        .iter()
        .enumerate()
        .map(|(k, iv)| {
            let mut d = describe_interval(iv, digits);
            d["derivative"] = json!(k);
            d
        })
        .collect();
    let (status, code) = verdict_status(&ev.verdict);
    let mut body = json!({
        "alpha": fmt_q(&alpha),
        "eps": fmt_q(&eps),
        "terms": ev.terms,
        "values": values,
        "verdict": verdict_json(&ev.verdict),
    });
    if ev.verdict.is_hypertranscendental() {
        body["values_statement"] = json!(VALUES_CAVEAT);
    }
    Ok(Outcome {
        report: envelope("eval", status, body),
        code,
    })
}

fn cmd_selftest() -> Outcome {
    let checks = crate::selftest::run();
    let pass = checks.iter().all(|c| c.1);
    let list: Vec<Value> = checks
        .iter()
        .map(|(n, ok, d)| json!({"name": n, "pass": ok, "detail": d}))
        .collect();
    Outcome {
        report: envelope(
            "selftest",
            if pass { "ok" } else { "error" },
            json!({ "checks": list }),
        ),
        code: if pass { EXIT_OK } else { EXIT_ERROR },
    }
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    let k = &cli.knobs;
    match &cli.command {
        Command::Classify { files } => Ok(cmd_classify(files, k)),
        Command::Series { order, file } => cmd_series(file, *order, k),
        Command::Ratsols { file } => cmd_ratsols(file, k),
        Command::Certify1 { file } => cmd_certify1(file, k),
        Command::Ore {
            action,
            case,
            operands,
        } => cmd_ore(*action, case, operands),
        Command::System {
            action,
            case,
            rows,
            gauge_rows,
            r,
            operator,
        } => cmd_system(*action, case, rows, gauge_rows, *r, operator.as_deref(), k),
        Command::Eval {
            file,
            at,
            derivs,
            eps,
        } => cmd_eval(file, at, *derivs, eps, k),
        Command::Selftest => Ok(cmd_selftest()),
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Classify { .. } => "classify",
        Command::Series { .. } => "series",
        Command::Ratsols { .. } => "ratsols",
        Command::Certify1 { .. } => "certify1",
        Command::Ore { .. } => "ore",
        Command::System { .. } => "system",
        Command::Eval { .. } => "eval",
        Command::Selftest => "selftest",
    }
}

/// Runs a parsed command line; returns the rendered report and the exit status.
pub fn run_cli(cli: &Cli) -> (String, i32) {
    let out = dispatch(cli).unwrap_or_else(|e| Outcome {
        report: error_report(command_name(&cli.command), &e),
        code: EXIT_ERROR,
    });
    (report::to_text(&out.report, cli.pretty), out.code)
}

/// Parses `argv` (including the program name) and runs it. Usage errors yield the
/// clap diagnostic and status 1 (help and version requests yield status 0).
pub fn run_command<I, T>(argv: I) -> (String, i32)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(argv) {
        Ok(cli) => run_cli(&cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            (e.render().to_string(), code)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (Value, i32) {
        let mut argv = vec!["hypertrans"];
        argv.extend_from_slice(args);
        let (out, code) = run_command(argv);
        (serde_json::from_str(&out).unwrap_or(Value::Null), code)
    }

    fn tmp(name: &str, text: &str) -> String {
        let dir = std::env::temp_dir().join(format!("hypertrans-cli-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let p = dir.join(name);
        std::fs::write(&p, text).unwrap();
        p.display().to_string()
    }

    #[test]
    fn ore_mul() {
        let (j, code) = run(&["ore", "mul", "--case", "shift:1", "(S - x)", "(S - 1)"]);
        assert_eq!(code, 0);
        assert_eq!(j["result"]["text"], "S^2 - (1+x)S + x");
        let (j, code) = run(&["ore", "mul", "--case", "q:1", "S", "S"]);
        assert_eq!((code, j["status"].clone()), (1, json!("error")));
    }

    #[test]
    fn f1_series_and_classify() {
        let f = tmp(
            "f1.problem",
            "case=mahler p=2; eq: f(x^2) - f(x) + x = 0; prefix: 1:1\n",
        );
        let (j, code) = run(&["series", "--order", "16", &f]);
        assert_eq!(code, 0);
        let ones: Vec<String> = j["coefficients"]
            .as_array()
            .unwrap()
            .iter()
            .filter(|c| c[1] == "1")
            .map(|c| c[0].as_str().unwrap().to_string())
            .collect();
        assert_eq!(ones, ["1", "2", "4", "8"]);
        let (j, code) = run(&["classify", &f]);
        assert_eq!(code, 0, "{j}");
        assert_eq!(
            (j["outcome"].as_str(), j["exactness"].as_str()),
            (Some("HYPERTRANSCENDENTAL"), Some("EXACT"))
        );
    }

    #[test]
    fn usage_and_parse_errors() {
        let (_, code) = run(&["frobnicate"]);
        assert_eq!(code, 1);
        let f = tmp("bad.problem", "case=mahler p=2\neq: f(x^2) $ 1 = 0\n");
        let (j, code) = run(&["classify", &f]);
        assert_eq!(code, 1);
        assert_eq!(j["error"]["kind"], "Parse");
        assert_eq!(j["error"]["line"], 2);
    }

    #[test]
    fn system_and_certify() {
        let (j, code) = run(&[
            "system", "iterate", "--case", "shift:1", "--row", "0, 1", "--row", "x, 1", "-r", "2",
        ]);
        assert_eq!(code, 0, "{j}");
        assert_eq!(j["system"]["dim"], 2);
        let f = tmp("theta.problem", "case=q q=2; pair: a=q*x\n");
        let (j, _) = run(&["certify1", &f]);
        assert_eq!(j["multiplicative_witness"]["found"], true, "{j}");
        assert_eq!(j["multiplicative_witness"]["c"], "2");
    }
}
