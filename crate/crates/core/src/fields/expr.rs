//! Expression language for scalar fields.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := base ('^' factor)?
//! base   := number | ident | '(' expr ')' | func '(' expr ')' | '-' factor
//! func   := exp | ln | sqrt | abs
//! ident  := x1 .. x20 | pi | e
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus, so
//! `-x1^2` is `-(x1^2)`. Exponents without variables are folded at parse
//! time; integral ones become integer powers (any sign of base), the rest
//! and every variable exponent need a positive base.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::jet::Jet;
use crate::error::{domain, Error, Result};
use crate::math;

pub const MAX_VARS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Ln,
    Sqrt,
    Abs,
}

/// Parsed expression tree. Variables are 0-based (`x1` is `Var(0)`).
#[derive(Debug, Clone, PartialEq)]
pub enum ExprAst {
    Num(f64),
    Var(usize),
    Neg(Box<ExprAst>),
    Add(Box<ExprAst>, Box<ExprAst>),
    Sub(Box<ExprAst>, Box<ExprAst>),
    Mul(Box<ExprAst>, Box<ExprAst>),
    Div(Box<ExprAst>, Box<ExprAst>),
    /// Variable exponent, `exp(e ln b)`.
    Pow(Box<ExprAst>, Box<ExprAst>),
    PowInt(Box<ExprAst>, i32),
    PowReal(Box<ExprAst>, f64),
    Call(Func, Box<ExprAst>),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
}

fn parse_err(pos: usize, msg: impl Into<String>) -> Error {
    Error::Parse { pos, msg: msg.into() }
}

fn tokenize(src: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || (c == '.' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit)) {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            // scientific suffix only when digits follow: `2e` stays `2 e`
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let text = &src[start..i];
            let v: f64 = text.parse().map_err(|_| parse_err(start, format!("bad number '{text}'")))?;
            out.push((start, Tok::Num(v)));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(src[start..i].to_string())));
        } else if "+-*/^()".contains(c) {
            out.push((i, Tok::Op(c)));
            i += 1;
        } else {
            return Err(parse_err(i, format!("unexpected character '{c}'")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: &'a [(usize, Tok)],
    pos: usize,
    end: usize,
    n: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn eat_op(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_op(&mut self, op: char) -> Result<()> {
        if self.eat_op(op) {
            Ok(())
        } else {
            Err(parse_err(self.here(), format!("expected '{op}'")))
        }
    }

    fn expr(&mut self) -> Result<ExprAst> {
        let mut lhs = self.term()?;
        loop {
            if self.eat_op('+') {
                lhs = ExprAst::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat_op('-') {
                lhs = ExprAst::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<ExprAst> {
        let mut lhs = self.factor()?;
        loop {
            if self.eat_op('*') {
                lhs = ExprAst::Mul(Box::new(lhs), Box::new(self.factor()?));
            } else if self.eat_op('/') {
                lhs = ExprAst::Div(Box::new(lhs), Box::new(self.factor()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn factor(&mut self) -> Result<ExprAst> {
        if self.eat_op('-') {
            return Ok(ExprAst::Neg(Box::new(self.factor()?)));
        }
        let base = self.base()?;
        if self.peek() == Some(&Tok::Op('^')) {
            let at = self.here();
            self.pos += 1;
            let exponent = self.factor()?;
            return make_pow(base, exponent, at);
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<ExprAst> {
        let at = self.here();
        let tok = self.peek().cloned().ok_or_else(|| parse_err(at, "unexpected end of input"))?;
        self.pos += 1;
        match tok {
            Tok::Num(v) => Ok(ExprAst::Num(v)),
            Tok::Op('(') => {
                let e = self.expr()?;
                self.expect_op(')')?;
                Ok(e)
            }
            Tok::Op(c) => Err(parse_err(at, format!("unexpected '{c}'"))),
            Tok::Ident(name) => {
                let func = match name.as_str() {
                    "exp" => Some(Func::Exp),
                    "ln" => Some(Func::Ln),
                    "sqrt" => Some(Func::Sqrt),
                    "abs" => Some(Func::Abs),
                    _ => None,
                };
                if let Some(f) = func {
                    self.expect_op('(')?;
                    let arg = self.expr()?;
                    self.expect_op(')')?;
                    return Ok(ExprAst::Call(f, Box::new(arg)));
                }
                match name.as_str() {
                    "pi" => Ok(ExprAst::Num(core::f64::consts::PI)),
                    "e" => Ok(ExprAst::Num(core::f64::consts::E)),
                    _ => self.variable(&name, at),
                }
            }
        }
    }

    fn variable(&self, name: &str, at: usize) -> Result<ExprAst> {
        let idx = name
            .strip_prefix('x')
            .filter(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()) && !d.starts_with('0'))
            .and_then(|d| d.parse::<usize>().ok())
            .ok_or_else(|| parse_err(at, format!("unknown identifier '{name}'")))?;
        if idx > MAX_VARS || idx > self.n {
            return Err(parse_err(at, format!("variable '{name}' exceeds dimension {}", self.n)));
        }
        Ok(ExprAst::Var(idx - 1))
    }
}

fn make_pow(base: ExprAst, exponent: ExprAst, at: usize) -> Result<ExprAst> {
    if exponent.has_vars() {
        return Ok(ExprAst::Pow(Box::new(base), Box::new(exponent)));
    }
    let p = exponent
        .eval_value(&[])
        .map_err(|e| parse_err(at, format!("constant exponent is undefined: {e}")))?;
    if libm::trunc(p) == p && math::abs(p) <= i32::MAX as f64 {
        Ok(ExprAst::PowInt(Box::new(base), p as i32))
    } else {
        Ok(ExprAst::PowReal(Box::new(base), p))
    }
}

/// Parses `src` over variables `x1..xn`.
pub fn parse(src: &str, n: usize) -> Result<ExprAst> {
    if n == 0 || n > MAX_VARS {
        return Err(domain(format!("expression dimension must be in 1..={MAX_VARS}, got {n}")));
    }
    let toks = tokenize(src)?;
    let mut p = Parser { toks: &toks, pos: 0, end: src.len(), n };
    let ast = p.expr()?;
    if p.pos != toks.len() {
        return Err(parse_err(p.here(), "trailing input"));
    }
    Ok(ast)
}

fn powi_value(a: f64, p: i32) -> Result<f64> {
    if a == 0.0 && p < 0 {
        return Err(domain("zero raised to a negative power"));
    }
    Ok(math::powi(a, p))
}

fn positive(a: f64, what: &str) -> Result<f64> {
    if a > 0.0 {
        Ok(a)
    } else {
        Err(domain(format!("{what} of non-positive value {a}")))
    }
}

impl ExprAst {
    pub fn has_vars(&self) -> bool {
        match self {
            ExprAst::Num(_) => false,
            ExprAst::Var(_) => true,
            ExprAst::Neg(a) | ExprAst::PowInt(a, _) | ExprAst::PowReal(a, _) | ExprAst::Call(_, a) => a.has_vars(),
            ExprAst::Add(a, b) | ExprAst::Sub(a, b) | ExprAst::Mul(a, b) | ExprAst::Div(a, b) | ExprAst::Pow(a, b) => {
                a.has_vars() || b.has_vars()
            }
        }
    }

    /// Plain value; agrees with `eval_jet(..).value`.
    pub fn eval_value(&self, x: &[f64]) -> Result<f64> {
        Ok(match self {
            ExprAst::Num(v) => *v,
            ExprAst::Var(i) => x[*i],
            ExprAst::Neg(a) => -a.eval_value(x)?,
            ExprAst::Add(a, b) => a.eval_value(x)? + b.eval_value(x)?,
            ExprAst::Sub(a, b) => a.eval_value(x)? - b.eval_value(x)?,
            ExprAst::Mul(a, b) => a.eval_value(x)? * b.eval_value(x)?,
            ExprAst::Div(a, b) => {
                let d = b.eval_value(x)?;
                if d == 0.0 {
                    return Err(domain("division by zero"));
                }
                a.eval_value(x)? / d
            }
            ExprAst::Pow(a, b) => {
                let base = positive(a.eval_value(x)?, "power base")?;
                math::exp(b.eval_value(x)? * math::ln(base))
            }
            ExprAst::PowInt(a, p) => powi_value(a.eval_value(x)?, *p)?,
            ExprAst::PowReal(a, p) => math::powf(positive(a.eval_value(x)?, "power base")?, *p),
            ExprAst::Call(f, a) => {
                let v = a.eval_value(x)?;
                match f {
                    Func::Exp => math::exp(v),
                    Func::Ln => math::ln(positive(v, "ln")?),
                    Func::Sqrt => math::sqrt(positive(v, "sqrt")?),
                    Func::Abs => {
                        if v == 0.0 {
                            return Err(domain("abs is not differentiable at 0"));
                        }
                        math::abs(v)
                    }
                }
            }
        })
    }

    /// Value, gradient and Hessian at `x`.
    pub fn eval_jet(&self, x: &[f64]) -> Result<Jet> {
        let n = x.len();
        Ok(match self {
            ExprAst::Num(v) => Jet::constant(n, *v),
            ExprAst::Var(i) => Jet::variable(n, *i, x[*i]),
            ExprAst::Neg(a) => -&a.eval_jet(x)?,
            ExprAst::Add(a, b) => &a.eval_jet(x)? + &b.eval_jet(x)?,
            ExprAst::Sub(a, b) => &a.eval_jet(x)? - &b.eval_jet(x)?,
            ExprAst::Mul(a, b) => &a.eval_jet(x)? * &b.eval_jet(x)?,
            ExprAst::Div(a, b) => (&a.eval_jet(x)? / &b.eval_jet(x)?)?,
            ExprAst::Pow(a, b) => a.eval_jet(x)?.pow(&b.eval_jet(x)?)?,
            ExprAst::PowInt(a, p) => a.eval_jet(x)?.powi(*p)?,
            ExprAst::PowReal(a, p) => a.eval_jet(x)?.powf(*p)?,
            ExprAst::Call(f, a) => {
                let j = a.eval_jet(x)?;
                match f {
                    Func::Exp => j.exp(),
                    Func::Ln => j.ln()?,
                    Func::Sqrt => j.sqrt()?,
                    Func::Abs => j.abs()?,
                }
            }
        })
    }
}
