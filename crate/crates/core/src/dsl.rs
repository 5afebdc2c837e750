//! Problem files and the expression language for coefficients and operators.
//!
//! ```text
//! case = mahler p=2
//! eq: f(x^2) - f(x) + x = 0
//! prefix: 1:1
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::rat::{fmt_q, q};
use crate::arith::{CaseTag, RatFunc, Q};
use crate::error::{Error, Result};
use crate::ore::DiffOperator;
use crate::series::TruncatedSeries;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Q),
    Ident(String),
    Sym(char),
    Sep,
    Eof,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(src: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let mut push = |tok| {
            out.push(Token {
                tok,
                line: l0,
                col: c0,
            })
        };
        if c == '\n' || c == ';' {
            push(Tok::Sep);
            i += 1;
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_digit() {
            let s = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[s..i].iter().collect();
            col += i - s;
            push(Tok::Num(Q::from_integer(text.parse().unwrap())));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let s = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            col += i - s;
            push(Tok::Ident(chars[s..i].iter().collect()));
            continue;
        }
        if "+-*/^(),:=".contains(c) {
            push(Tok::Sym(c));
            i += 1;
            col += 1;
            continue;
        }
        return Err(Error::Parse {
            line,
            column: col,
            message: format!("unexpected character `{c}`"),
        });
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

/// Expression tree over `x`, case parameters, `S` and `f(...)`.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(Q),
    Var(String),
    Call(Box<Expr>),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64),
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        let t = &self.toks[self.pos];
        Err(Error::Parse {
            line: t.line,
            column: t.col,
            message: message.into(),
        })
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if *self.peek() == Tok::Sym(c) {
            self.next();
            Ok(())
        } else {
            self.err(format!("expected `{c}`"))
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.next();
            true
        } else {
            false
        }
    }

    fn skip_seps(&mut self) {
        while *self.peek() == Tok::Sep {
            self.next();
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else if matches!(self.peek(), Tok::Num(_) | Tok::Ident(_) | Tok::Sym('(')) {
                // juxtaposition: `2x`, `q^2 x`, `(1+x)S`
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.power()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat('^') {
            let neg = self.eat('-');
            let e = match self.next().tok {
                Tok::Num(n) if n.is_integer() => n.to_integer().to_i64().unwrap_or(i64::MAX),
                _ => {
                    self.pos -= 1;
                    return self.err("exponent must be an integer");
                }
            };
            if e > 1 << 16 {
                return self.err("exponent too large");
            }
            return Ok(Expr::Pow(Box::new(base), if neg { -e } else { e }));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.next().tok {
            Tok::Num(n) => Ok(Expr::Num(n)),
            Tok::Ident(name) => {
                if name == "f" {
                    self.expect('(')?;
                    let arg = self.expr()?;
                    self.expect(')')?;
                    Ok(Expr::Call(Box::new(arg)))
                } else if name.len() > 1 && name.chars().all(|c| "xqhpS".contains(c)) {
                    // `xS`, `qx`: juxtaposed single-letter symbols
                    let mut it = name.chars().map(|c| Expr::Var(c.to_string()));
                    let first = it.next().unwrap();
                    Ok(it.fold(first, |acc, v| Expr::Mul(Box::new(acc), Box::new(v))))
                } else {
                    Ok(Expr::Var(name))
                }
            }
            Tok::Sym('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            _ => {
                self.pos -= 1;
                self.err("expected a number, a name or `(`")
            }
        }
    }

    /// Signed rational literal `[-] n [/ m]`.
    fn rational(&mut self) -> Result<Q> {
        let neg = self.eat('-');
        let Tok::Num(n) = self.peek().clone() else {
            return self.err("expected a rational number");
        };
        self.next();
        let mut v = n;
        if self.eat('/') {
            let Tok::Num(d) = self.peek().clone() else {
                return self.err("expected a denominator");
            };
            if d.is_zero() {
                return self.err("zero denominator");
            }
            self.next();
            v /= d;
        }
        Ok(if neg { -v } else { v })
    }

    fn ident(&mut self) -> Result<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.next();
                Ok(s)
            }
            _ => self.err("expected a name"),
        }
    }

    fn at_end_of_statement(&self) -> bool {
        matches!(self.peek(), Tok::Sep | Tok::Eof)
    }
}

/// Parses a standalone expression.
pub fn parse_expr(src: &str) -> Result<Expr> {
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
    };
    p.skip_seps();
    let e = p.expr()?;
    p.skip_seps();
    if *p.peek() != Tok::Eof {
        return p.err("trailing input");
    }
    Ok(e)
}

fn sem<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Semantic(msg.into()))
}

fn case_constant(name: &str, case: Option<&CaseTag>) -> Option<Q> {
    match (name, case) {
        ("q", Some(CaseTag::QDiff { q })) => Some(q.clone()),
        ("h", Some(CaseTag::Shift { h, .. })) => Some(h.clone()),
        ("p", Some(CaseTag::Mahler { p })) => Some(q(*p as i64)),
        _ => None,
    }
}

/// Evaluates an expression free of `f` and `S` to a rational function of `x`.
pub fn eval_ratfunc(e: &Expr, case: Option<&CaseTag>) -> Result<RatFunc> {
    Ok(match e {
        Expr::Num(n) => RatFunc::constant(n.clone()),
        Expr::Var(v) if v == "x" => RatFunc::x(),
        Expr::Var(v) => match case_constant(v, case) {
            Some(c) => RatFunc::constant(c),
            None => return sem(format!("unknown name `{v}`")),
        },
        Expr::Call(_) => return sem("f(...) is not allowed here"),
        Expr::Neg(a) => -&eval_ratfunc(a, case)?,
        Expr::Add(a, b) => &eval_ratfunc(a, case)? + &eval_ratfunc(b, case)?,
        Expr::Sub(a, b) => &eval_ratfunc(a, case)? - &eval_ratfunc(b, case)?,
        Expr::Mul(a, b) => &eval_ratfunc(a, case)? * &eval_ratfunc(b, case)?,
        Expr::Div(a, b) => eval_ratfunc(a, case)?
            .checked_div(&eval_ratfunc(b, case)?)
            .map_err(|_| Error::Semantic("division by zero".into()))?,
        Expr::Pow(a, k) => eval_ratfunc(a, case)?
            .pow(*k)
            .map_err(|_| Error::Semantic("zero to a negative power".into()))?,
    })
}

/// `Σ_i coeff_i · f(σ^i x) + constant`.
#[derive(Clone, Debug)]
struct Linear {
    f: BTreeMap<usize, RatFunc>,
    c: RatFunc,
}

impl Default for Linear {
    fn default() -> Self {
        Linear::pure(RatFunc::zero())
    }
}

impl Linear {
    fn pure(c: RatFunc) -> Self {
        Linear {
            f: BTreeMap::new(),
            c,
        }
    }

    fn is_pure(&self) -> bool {
        self.f.values().all(|v| v.is_zero())
    }

    fn combine(mut self, o: Linear, sign: i64) -> Linear {
        let s = q(sign);
        for (k, v) in o.f {
            let e = self.f.entry(k).or_insert_with(RatFunc::zero);
            *e = &*e + &v.scale(&s);
        }
        self.c = &self.c + &o.c.scale(&s);
        self
    }

    fn scale(mut self, a: &RatFunc) -> Linear {
        for v in self.f.values_mut() {
            *v = &*v * a;
        }
        self.c = &self.c * a;
        self
    }
}

/// Which `i` makes `arg = σ^i(x)`.
fn sigma_index(arg: &RatFunc, case: &CaseTag) -> Result<usize> {
    let size = |r: &RatFunc| r.num().degree().unwrap_or(0) + r.den().degree().unwrap_or(0);
    let mut s = RatFunc::x();
    for i in 0..=64 {
        if *arg == s {
            return Ok(i);
        }
        if size(&s) > size(arg) {
            break;
        }
        s = s.sigma(case);
    }
    sem(format!(
        "f({}) is not f(σ^i(x)) for this case",
        arg.render("x")
    ))
}

fn eval_linear(e: &Expr, case: &CaseTag) -> Result<Linear> {
    Ok(match e {
        Expr::Call(arg) => {
            let a = eval_ratfunc(arg, Some(case))?;
            let i = sigma_index(&a, case)?;
            let mut f = BTreeMap::new();
            f.insert(i, RatFunc::one());
            Linear {
                f,
                c: RatFunc::zero(),
            }
        }
        Expr::Neg(a) => Linear::default().combine(eval_linear(a, case)?, -1),
        Expr::Add(a, b) => eval_linear(a, case)?.combine(eval_linear(b, case)?, 1),
        Expr::Sub(a, b) => eval_linear(a, case)?.combine(eval_linear(b, case)?, -1),
        Expr::Mul(a, b) => {
            let (la, lb) = (eval_linear(a, case)?, eval_linear(b, case)?);
            match (la.is_pure(), lb.is_pure()) {
                (true, _) => lb.scale(&la.c),
                (_, true) => la.scale(&lb.c),
                _ => return sem("the equation is not linear in f"),
            }
        }
        Expr::Div(a, b) => {
            let lb = eval_linear(b, case)?;
            if !lb.is_pure() {
                return sem("cannot divide by an expression in f");
            }
            let inv =
                lb.c.inv()
                    .map_err(|_| Error::Semantic("division by zero".into()))?;
            eval_linear(a, case)?.scale(&inv)
        }
        Expr::Pow(a, k) => {
            let la = eval_linear(a, case)?;
            if !la.is_pure() {
                if *k == 1 {
                    return Ok(la);
                }
                return sem("powers of f are not linear");
            }
            Linear::pure(
                la.c.pow(*k)
                    .map_err(|_| Error::Semantic("zero to a negative power".into()))?,
            )
        }
        other => Linear::pure(eval_ratfunc(other, Some(case))?),
    })
}

/// Evaluates an expression in `S` (the operator ρ) and rational functions of `x`;
/// products are composition, and `A / r` means `r^{-1}·A`.
pub fn eval_operator(e: &Expr, case: &CaseTag) -> Result<DiffOperator> {
    Ok(match e {
        Expr::Var(v) if v == "S" => DiffOperator::rho_pow(case.clone(), 1),
        Expr::Neg(a) => eval_operator(a, case)?.neg(),
        Expr::Add(a, b) => eval_operator(a, case)?.add(&eval_operator(b, case)?)?,
        Expr::Sub(a, b) => eval_operator(a, case)?.sub(&eval_operator(b, case)?)?,
        Expr::Mul(a, b) => eval_operator(a, case)?.mul(&eval_operator(b, case)?)?,
        Expr::Div(a, b) => {
            // division by a rational function multiplies on the left by its inverse
            let d = eval_operator(b, case)?;
            let inv = (d.order() == 0).then(|| d.coeff(0).inv().ok()).flatten();
            match inv {
                Some(inv) => eval_operator(a, case)?.scale_left(&inv),
                None => return sem("operators can only be divided by nonzero rational functions"),
            }
        }
        Expr::Pow(a, k) => {
            let base = eval_operator(a, case)?;
            if base.order() == 0 {
                DiffOperator::scalar(
                    case.clone(),
                    base.coeff(0)
                        .pow(*k)
                        .map_err(|_| Error::Semantic("zero to a negative power".into()))?,
                )
            } else if *k < 0 {
                return sem("negative powers of operators");
            } else {
                let mut acc = DiffOperator::one(case.clone());
                for _ in 0..*k {
                    acc = acc.mul(&base)?;
                }
                acc
            }
        }
        Expr::Call(_) => return sem("f(...) is not allowed in operator expressions"),
        other => DiffOperator::scalar(case.clone(), eval_ratfunc(other, Some(case))?),
    })
}

/// Parses and evaluates an operator such as `"(S - x)(S - 1)"`.
pub fn parse_operator(src: &str, case: &CaseTag) -> Result<DiffOperator> {
    eval_operator(&parse_expr(src)?, case)
}

/// Parses and evaluates a rational function of `x`.
pub fn parse_ratfunc(src: &str, case: Option<&CaseTag>) -> Result<RatFunc> {
    eval_ratfunc(&parse_expr(src)?, case)
}

/// Configuration keys a problem file may set.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Overrides {
    pub truncation: Option<i64>,
    pub degree_bound: Option<usize>,
    pub orbit_bound: Option<i64>,
    pub iterate: Option<Vec<u32>>,
    pub seed: Option<u64>,
}

/// Known leading terms `(x-exponent, coefficient)`; every exponent strictly before
/// `order` (in the direction of the expansion) is known.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Prefix {
    pub terms: Vec<(Q, Q)>,
    pub order: Option<Q>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Problem {
    pub case: CaseTag,
    /// Ramification: series in `x^(1/ell)`.
    pub ell: u64,
    pub op: DiffOperator,
    pub rhs: Option<RatFunc>,
    pub prefix: Option<Prefix>,
    pub config: Overrides,
}

impl Problem {
    /// `(a, b)` with `ρ(y) = a y + b` when the operator has order one.
    pub fn pair(&self) -> Option<(RatFunc, RatFunc)> {
        if self.op.order() != 1 {
            return None;
        }
        let c = self.op.coeffs();
        let a = -&c[0].checked_div(&c[1]).ok()?;
        let b = match &self.rhs {
            Some(b) => b.checked_div(&c[1]).ok()?,
            None => RatFunc::zero(),
        };
        Some((a, b))
    }

    fn effective_ell(&self) -> Result<u64> {
        let mut ell = self.ell;
        if let Some(p) = &self.prefix {
            for e in p.terms.iter().map(|t| &t.0).chain(p.order.iter()) {
                let d = e.denom().to_u64().unwrap_or(0);
                if d == 0 {
                    return sem("bad exponent");
                }
                ell = ell.lcm(&d);
            }
        }
        Ok(ell)
    }

    /// The prefix as a truncated series in the local parameter.
    pub fn prefix_series(&self) -> Result<Option<TruncatedSeries>> {
        let Some(p) = &self.prefix else {
            return Ok(None);
        };
        let Some(point) = self.case.point() else {
            return sem("this case has no series expansion point; omit the prefix");
        };
        let ell = self.effective_ell()?;
        if ell > 1 && self.case.is_shift() {
            return sem("the shift case admits no ramified prefixes");
        }
        let sign = match point {
            crate::arith::Point::Zero => 1,
            crate::arith::Point::Infinity => -1,
        };
        let index = |e: &Q| -> i64 { (e * q(ell as i64) * q(sign)).to_integer().to_i64().unwrap() };
        let terms: Vec<(i64, Q)> = p.terms.iter().map(|(e, c)| (index(e), c.clone())).collect();
        let order = match &p.order {
            Some(o) => index(o),
            None => terms.iter().map(|t| t.0 + 1).max().unwrap_or(0),
        };
        if let Some((k, _)) = terms.iter().find(|t| t.0 >= order) {
            return sem(format!(
                "prefix term at index {k} lies beyond the stated order"
            ));
        }
        Ok(Some(TruncatedSeries::from_terms(
            self.case.clone(),
            ell,
            &terms,
            order,
        )?))
    }

    /// Canonical text; `parse_problem(render(p)) == p`.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = write!(s, "case = ");
        match &self.case {
            CaseTag::Shift { h, point } => {
                let kind = if matches!(point, crate::arith::ShiftPoint::AtInfinity) {
                    "shift"
                } else {
                    "shift0"
                };
                let _ = write!(s, "{kind} h={}", fmt_q(h));
            }
            CaseTag::QDiff { q } => {
                let _ = write!(s, "q q={}", fmt_q(q));
            }
            CaseTag::Mahler { p } => {
                let _ = write!(s, "mahler p={p}");
            }
        }
        if self.ell > 1 {
            let _ = write!(s, " ell={}", self.ell);
        }
        s.push('\n');
        let coeffs: Vec<String> = self
            .op
            .coeffs()
            .iter()
            .map(|c| format!("({})", c.render("x")))
            .collect();
        let _ = writeln!(s, "coeffs: {}", coeffs.join(", "));
        if let Some(b) = &self.rhs {
            let _ = writeln!(s, "rhs: {}", b.render("x"));
        }
        if let Some(p) = &self.prefix {
            let mut items: Vec<String> = p
                .terms
                .iter()
                .map(|(e, c)| format!("{}:{}", fmt_q(e), fmt_q(c)))
                .collect();
            if let Some(o) = &p.order {
                items.push(format!("O({})", fmt_q(o)));
            }
            let _ = writeln!(s, "prefix: {}", items.join(", "));
        }
        let c = &self.config;
        if let Some(v) = c.truncation {
            let _ = writeln!(s, "N = {v}");
        }
        if let Some(v) = c.degree_bound {
            let _ = writeln!(s, "d = {v}");
        }
        if let Some(v) = c.orbit_bound {
            let _ = writeln!(s, "B = {v}");
        }
        if let Some(v) = &c.iterate {
            let r: Vec<String> = v.iter().map(|r| r.to_string()).collect();
            let _ = writeln!(s, "iterate = {}", r.join(","));
        }
        if let Some(v) = c.seed {
            let _ = writeln!(s, "seed = {v}");
        }
        s
    }
}

fn small_int(p: &mut Parser, what: &str) -> Result<i64> {
    let v = p.rational()?;
    if !v.is_integer() || v.is_negative() {
        return p.err(format!("{what} must be a nonnegative integer"));
    }
    v.to_integer()
        .to_i64()
        .map_or_else(|| p.err(format!("{what} is too large")), Ok)
}

/// Parses a problem file.
pub fn parse_problem(src: &str) -> Result<Problem> {
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
    };
    let mut case: Option<CaseTag> = None;
    let mut ell = 1u64;
    let mut eq: Option<(Expr, Expr, (usize, usize))> = None;
    let mut coeffs: Option<Vec<Expr>> = None;
    let mut rhs: Option<Expr> = None;
    let mut pair: Option<(Expr, Expr)> = None;
    let mut prefix: Option<Prefix> = None;
    let mut config = Overrides::default();
    loop {
        p.skip_seps();
        if *p.peek() == Tok::Eof {
            break;
        }
        let key = p.ident()?;
        match key.as_str() {
            "case" => {
                p.expect('=')?;
                let kind = p.ident()?;
                let mut params: BTreeMap<String, Q> = BTreeMap::new();
                while !p.at_end_of_statement() {
                    let name = p.ident()?;
                    if !["h", "q", "p", "ell"].contains(&name.as_str()) {
                        p.pos -= 1;
                        return p.err(format!("unknown case parameter `{name}`"));
                    }
                    p.expect('=')?;
                    params.insert(name, p.rational()?);
                }
                let get = |k: &str| params.get(k).cloned();
                let allowed: &[&str] = match kind.as_str() {
                    "shift" | "shift0" => &["h"],
                    "q" => &["q", "ell"],
                    "mahler" => &["p", "ell"],
                    _ => return sem(format!("unknown case `{kind}`")),
                };
                if let Some(k) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
                    return sem(format!("parameter `{k}` does not apply to case `{kind}`"));
                }
                case = Some(match kind.as_str() {
                    "shift" => CaseTag::shift(get("h").unwrap_or_else(Q::one))?,
                    "shift0" => CaseTag::shift_meromorphic(get("h").unwrap_or_else(Q::one))?,
                    "q" => CaseTag::qdiff(
                        get("q").ok_or_else(|| Error::Semantic("case q needs q=...".into()))?,
                    )?,
                    _ => {
                        let pv = get("p")
                            .ok_or_else(|| Error::Semantic("case mahler needs p=...".into()))?;
                        match pv
                            .to_integer()
                            .to_u64()
                            .filter(|v| pv.is_integer() && *v >= 2)
                        {
                            Some(v) => CaseTag::mahler(v)?,
                            None => return sem("Mahler p must be an integer >= 2"),
                        }
                    }
                });
                if let Some(l) = get("ell") {
                    match l
                        .to_integer()
                        .to_u64()
                        .filter(|v| l.is_integer() && *v >= 1)
                    {
                        Some(v) => ell = v,
                        None => return sem("ell must be a positive integer"),
                    }
                }
            }
            "eq" => {
                p.expect(':')?;
                let t = &p.toks[p.pos];
                let at = (t.line, t.col);
                let lhs = p.expr()?;
                p.expect('=')?;
                let r = p.expr()?;
                eq = Some((lhs, r, at));
            }
            "coeffs" => {
                p.expect(':')?;
                let mut v = vec![p.expr()?];
                while p.eat(',') {
                    v.push(p.expr()?);
                }
                coeffs = Some(v);
            }
            "rhs" => {
                p.expect(':')?;
                rhs = Some(p.expr()?);
            }
            "pair" => {
                p.expect(':')?;
                let (mut a, mut b) = (None, None);
                loop {
                    let name = p.ident()?;
                    p.expect('=')?;
                    let e = p.expr()?;
                    match name.as_str() {
                        "a" => a = Some(e),
                        "b" => b = Some(e),
                        _ => {
                            return sem(format!("pair takes a= and b=, not `{name}`"));
                        }
                    }
                    if !p.eat(',') {
                        break;
                    }
                }
                match (a, b) {
                    (Some(a), b) => pair = Some((a, b.unwrap_or(Expr::Num(Q::zero())))),
                    _ => return sem("pair needs a="),
                }
            }
            "prefix" => {
                p.expect(':')?;
                let mut terms = Vec::new();
                let mut order = None;
                loop {
                    if matches!(p.peek(), Tok::Ident(s) if s == "O") {
                        p.next();
                        p.expect('(')?;
                        order = Some(p.rational()?);
                        p.expect(')')?;
                    } else {
                        let e = p.rational()?;
                        p.expect(':')?;
                        let c = p.rational()?;
                        terms.push((e, c));
                    }
                    if !p.eat(',') {
                        break;
                    }
                }
                prefix = Some(Prefix { terms, order });
            }
            "N" | "truncation" => {
                p.expect('=')?;
                config.truncation = Some(small_int(&mut p, "N")?);
            }
            "d" | "degree_bound" => {
                p.expect('=')?;
                config.degree_bound = Some(small_int(&mut p, "d")? as usize);
            }
            "B" | "mahler_orbit_bound" => {
                p.expect('=')?;
                config.orbit_bound = Some(small_int(&mut p, "B")?);
            }
            "seed" => {
                p.expect('=')?;
                config.seed = Some(small_int(&mut p, "seed")? as u64);
            }
            "iterate" => {
                p.expect('=')?;
                let mut v = vec![small_int(&mut p, "iterate")? as u32];
                while p.eat(',') {
                    v.push(small_int(&mut p, "iterate")? as u32);
                }
                if v.contains(&0) {
                    return sem("iterates must be positive");
                }
                config.iterate = Some(v);
            }
            _ => {
                p.pos -= 1;
                return p.err(format!("unknown key `{key}`"));
            }
        }
        if !p.at_end_of_statement() {
            return p.err("expected end of statement");
        }
    }
    let Some(case) = case else {
        return sem("missing `case = ...`");
    };
    if ell > 1 && case.is_shift() {
        return sem("the shift case admits no ramification");
    }
    let forms = eq.is_some() as u8 + coeffs.is_some() as u8 + pair.is_some() as u8;
    if forms != 1 {
        return sem("give exactly one of `eq:`, `coeffs:` or `pair:`");
    }
    let (op, rhs) = if let Some((l, r, _)) = eq {
        let lin = eval_linear(&l, &case)?.combine(eval_linear(&r, &case)?, -1);
        let n = lin
            .f
            .iter()
            .filter(|(_, v)| !v.is_zero())
            .map(|(k, _)| *k)
            .max();
        let Some(n) = n else {
            return sem("the equation does not involve f");
        };
        let cs: Vec<RatFunc> = (0..=n)
            .map(|i| lin.f.get(&i).cloned().unwrap_or_else(RatFunc::zero))
            .collect();
        (DiffOperator::new(case.clone(), cs), -&lin.c)
    } else if let Some(cs) = coeffs {
        let cs = cs
            .iter()
            .map(|e| eval_ratfunc(e, Some(&case)))
            .collect::<Result<Vec<_>>>()?;
        let b = match &rhs {
            Some(e) => eval_ratfunc(e, Some(&case))?,
            None => RatFunc::zero(),
        };
        (DiffOperator::new(case.clone(), cs), b)
    } else {
        let (a, b) = pair.unwrap();
        let a = eval_ratfunc(&a, Some(&case))?;
        let b = eval_ratfunc(&b, Some(&case))?;
        (DiffOperator::first_order(case.clone(), a), b)
    };
    if op.is_zero() || op.order() < 1 {
        return sem("the operator must have order at least one");
    }
    let problem = Problem {
        case,
        ell,
        op,
        rhs: if rhs.is_zero() { None } else { Some(rhs) },
        prefix,
        config,
    };
    problem.prefix_series()?;
    Ok(problem)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat::qf;
    use crate::arith::Poly;

    #[test]
    fn f1_problem() {
        let p = parse_problem("case=mahler p=2; eq: f(x^2) - f(x) + x = 0; prefix: 1:1").unwrap();
        assert_eq!(
            p.pair(),
            Some((RatFunc::one(), RatFunc::from_poly(Poly::from_i64(&[0, -1]))))
        );
        let s = p.prefix_series().unwrap().unwrap();
        assert_eq!(s.order(), 2);
        assert_eq!(s.coeff(0), Some(q(0)));
        assert_eq!(s.coeff(1), Some(q(1)));
    }

    #[test]
    fn f2_problem() {
        let p = parse_problem(
            "case=q q=4; eq: f(q^2 x) - ((2*2*x-2)/(4*x-1))*f(q*x) + ((x-1)/(4*x-1))*f(x) = 0",
        )
        .unwrap();
        assert_eq!(p.op.order(), 2);
        let c1 = p.op.coeff(1);
        assert_eq!(
            c1,
            RatFunc::new(Poly::from_i64(&[2, -4]), Poly::from_i64(&[-1, 4]))
        );
        assert_eq!(p.rhs, None);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            parse_problem("case=q q=1; pair: a=1"),
            Err(Error::Semantic(_))
        ));
        match parse_problem("case=mahler p=2\neq: f(x^2) $ 1 = 0") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (2, 12)),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_problem("case=mahler p=2; pair: a=1; colour = 3"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse_problem("case=mahler p=2; eq: f(x^3) = 0"),
            Err(Error::Semantic(_))
        ));
        assert!(matches!(
            parse_problem("case=mahler p=2; eq: f(x)*f(x) = 0"),
            Err(Error::Semantic(_))
        ));
        assert!(parse_problem("case=shift; pair: a=1, b=1; prefix: 1:1, O(-1)").is_ok());
    }

    #[test]
    fn operators() {
        let s = CaseTag::shift(q(1)).unwrap();
        let l = parse_operator("(S - x)(S - 1)", &s).unwrap();
        assert_eq!(l.render(), "S^2 - (1+x)S + x");
        assert_eq!(parse_operator(&l.render(), &s).unwrap(), l);
        for src in [
            "S - 1 - x",
            "S - (x - 1)",
            "x S - (1 - 3x)/(2 - x)",
            "-S^2 + 1/(3x)",
        ] {
            let l = parse_operator(src, &s).unwrap();
            assert_eq!(
                parse_operator(&l.render(), &s).unwrap(),
                l,
                "{}",
                l.render()
            );
        }
        assert_eq!(
            parse_operator("S - 1 - x", &s).unwrap().render(),
            "S - (1+x)"
        );
        assert_eq!(
            parse_ratfunc("1/(1-3x)", None).unwrap().render("x"),
            "1/(1-3*x)"
        );
        assert_eq!(
            parse_ratfunc("1/4-3/2*x", None).unwrap(),
            RatFunc::from_poly(Poly::new(vec![qf(1, 4), qf(-3, 2)]))
        );
    }

    #[test]
    fn ramified_prefix() {
        let p = parse_problem("case=q q=4 ell=2; pair: a=2x; prefix: 1/2:1").unwrap();
        let s = p.prefix_series().unwrap().unwrap();
        assert_eq!((s.ell(), s.start(), s.order()), (2, 1, 2));
    }

    #[test]
    fn round_trip() {
        for src in [
            "case=mahler p=2; eq: f(x^2) - f(x) + x = 0; prefix: 1:1; N = 32; iterate = 1,3",
            "case=q q=4; eq: f(q^2 x) - ((2*2*x-2)/(4*x-1))*f(q*x) + ((x-1)/(4*x-1))*f(x) = 0; prefix: 0:1",
            "case=shift h=1/2; coeffs: x, -(x+1)/(x-3), 1/7; rhs: x^2; prefix: -1:2, O(-3)",
            "case=shift0; pair: a=x, b=1",
        ] {
            let p = parse_problem(src).unwrap();
            let again = parse_problem(&p.render()).unwrap();
            assert_eq!(again, p, "{}", p.render());
        }
    }
}
