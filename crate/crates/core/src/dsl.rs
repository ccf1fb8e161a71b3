//! A small arithmetic language for user-supplied quantile functions.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?          (right associative)
//! primary := number | 'p' | name | func '(' expr ')' | '(' expr ')'
//! ```
//!
//! `func` is one of `log`, `exp`, `sqrt`, `abs`. Any other identifier is a
//! named parameter that must be bound before evaluation.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// Parameter bindings, ordered so that rendering is deterministic.
pub type Bindings = BTreeMap<String, f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Log,
    Exp,
    Sqrt,
    Abs,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        match name {
            "log" => Some(Func::Log),
            "exp" => Some(Func::Exp),
            "sqrt" => Some(Func::Sqrt),
            "abs" => Some(Func::Abs),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Log => "log",
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }
}

/// Syntax tree of a parsed expression.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var,
    Param(String),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

// ---------------------------------------------------------------- lexing

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let ch = bytes[i];
        let start = i;
        match ch {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => out.push((Tok::Plus, start)),
            b'-' => out.push((Tok::Minus, start)),
            b'*' => out.push((Tok::Star, start)),
            b'/' => out.push((Tok::Slash, start)),
            b'^' => out.push((Tok::Caret, start)),
            b'(' => out.push((Tok::LParen, start)),
            b')' => out.push((Tok::RParen, start)),
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
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
                let lit = &text[start..i];
                let v: f64 = lit.parse().map_err(|_| Error::Syntax {
                    offset: start,
                    expected: "a decimal number".into(),
                    found: format!("`{lit}`"),
                })?;
                out.push((Tok::Num(v), start));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(text[start..i].to_string()), start));
                continue;
            }
            _ => {
                let c = text[start..].chars().next().unwrap_or('?');
                return Err(Error::Syntax {
                    offset: start,
                    expected: "an operator, number, name or parenthesis".into(),
                    found: format!("`{c}`"),
                });
            }
        }
        i += 1;
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

// ---------------------------------------------------------------- parsing

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, expected: &str) -> Result<T> {
        Err(Error::Syntax {
            offset: self.offset(),
            expected: expected.to_string(),
            found: self.peek().describe(),
        })
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let exponent = self.unary()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr> {
        let at = self.offset();
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(Expr::Num(v))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return self.fail("`)` or an operator");
                }
                self.bump();
                Ok(inner)
            }
            Tok::Ident(name) => {
                self.bump();
                if *self.peek() == Tok::LParen {
                    let func = Func::from_name(&name).ok_or(Error::UnknownFunction {
                        name: name.clone(),
                        offset: at,
                    })?;
                    self.bump();
                    let arg = self.expr()?;
                    if *self.peek() != Tok::RParen {
                        return self.fail("`)` or an operator");
                    }
                    self.bump();
                    Ok(Expr::Call(func, Box::new(arg)))
                } else if name == "p" {
                    Ok(Expr::Var)
                } else {
                    Ok(Expr::Param(name))
                }
            }
            _ => self.fail("a number, `p`, a name, a function call or `(`"),
        }
    }
}

/// Parses `text` into an expression tree.
pub fn parse(text: &str) -> Result<Expr> {
    if text.trim().is_empty() {
        return Err(Error::Syntax {
            offset: 0,
            expected: "an expression".into(),
            found: "end of input".into(),
        });
    }
    let mut parser = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let e = parser.expr()?;
    if *parser.peek() != Tok::End {
        return parser.fail("an operator or end of input");
    }
    Ok(e)
}

// ---------------------------------------------------------------- rendering

fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Bin(BinOp::Add | BinOp::Sub, ..) => 1,
        Expr::Bin(BinOp::Mul | BinOp::Div, ..) => 2,
        Expr::Neg(_) => 3,
        Expr::Bin(BinOp::Pow, ..) => 4,
        _ => 5,
    }
}

fn write_wrapped(f: &mut fmt::Formatter<'_>, e: &Expr, wrap: bool) -> fmt::Result {
    if wrap {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v:?}"),
            Expr::Var => f.write_str("p"),
            Expr::Param(name) => f.write_str(name),
            Expr::Neg(inner) => {
                f.write_str("-")?;
                write_wrapped(f, inner, precedence(inner) < 3)
            }
            Expr::Call(func, arg) => write!(f, "{}({arg})", func.name()),
            Expr::Bin(op, l, r) => {
                let me = precedence(self);
                let (sym, wrap_l, wrap_r) = match op {
                    BinOp::Pow => ("^", precedence(l) <= me, precedence(r) < 3),
                    BinOp::Add => (" + ", precedence(l) < me, precedence(r) <= me),
                    BinOp::Sub => (" - ", precedence(l) < me, precedence(r) <= me),
                    BinOp::Mul => (" * ", precedence(l) < me, precedence(r) <= me),
                    BinOp::Div => (" / ", precedence(l) < me, precedence(r) <= me),
                };
                write_wrapped(f, l, wrap_l)?;
                f.write_str(sym)?;
                write_wrapped(f, r, wrap_r)
            }
        }
    }
}

// ---------------------------------------------------------------- evaluation

fn domain_error(e: &Expr, detail: impl Into<String>) -> Error {
    Error::EvalDomain {
        expr: e.to_string(),
        detail: detail.into(),
    }
}

impl Expr {
    /// Evaluates the expression at `p` with the given parameter bindings.
    pub fn evaluate(&self, p: f64, bindings: &Bindings) -> Result<f64> {
        let v = match self {
            Expr::Num(v) => *v,
            Expr::Var => p,
            Expr::Param(name) => *bindings
                .get(name)
                .ok_or_else(|| Error::UnboundParameter(name.clone()))?,
            Expr::Neg(inner) => -inner.evaluate(p, bindings)?,
            Expr::Call(func, arg) => {
                let x = arg.evaluate(p, bindings)?;
                match func {
                    Func::Log if x <= 0.0 => {
                        return Err(domain_error(self, format!("logarithm of non-positive value {x}")))
                    }
                    Func::Log => x.ln(),
                    Func::Exp => x.exp(),
                    Func::Sqrt if x < 0.0 => {
                        return Err(domain_error(self, format!("square root of negative value {x}")))
                    }
                    Func::Sqrt => x.sqrt(),
                    Func::Abs => x.abs(),
                }
            }
            Expr::Bin(op, l, r) => {
                let a = l.evaluate(p, bindings)?;
                let b = r.evaluate(p, bindings)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div if b == 0.0 => {
                        return Err(domain_error(self, "division by zero"));
                    }
                    BinOp::Div => a / b,
                    BinOp::Pow if a == 0.0 && b < 0.0 => {
                        return Err(domain_error(self, "zero raised to a negative power"));
                    }
                    BinOp::Pow if a < 0.0 && b.fract() != 0.0 => {
                        return Err(domain_error(
                            self,
                            format!("negative base {a} raised to non-integer power {b}"),
                        ));
                    }
                    BinOp::Pow => a.powf(b),
                }
            }
        };
        if v.is_nan() {
            return Err(domain_error(self, "result is not a number"));
        }
        Ok(v)
    }

    /// Names of free parameters, sorted and deduplicated.
    pub fn parameters(&self) -> Vec<String> {
        fn walk(e: &Expr, out: &mut Vec<String>) {
            match e {
                Expr::Param(n) => out.push(n.clone()),
                Expr::Neg(i) | Expr::Call(_, i) => walk(i, out),
                Expr::Bin(_, l, r) => {
                    walk(l, out);
                    walk(r, out);
                }
                Expr::Num(_) | Expr::Var => {}
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out.sort();
        out.dedup();
        out
    }

    /// Replaces every parameter by its bound value.
    pub fn bind(&self, bindings: &Bindings) -> Result<Expr> {
        Ok(match self {
            Expr::Param(name) => Expr::Num(
                *bindings
                    .get(name)
                    .ok_or_else(|| Error::UnboundParameter(name.clone()))?,
            ),
            Expr::Num(_) | Expr::Var => self.clone(),
            Expr::Neg(i) => Expr::Neg(Box::new(i.bind(bindings)?)),
            Expr::Call(f, i) => Expr::Call(*f, Box::new(i.bind(bindings)?)),
            Expr::Bin(op, l, r) => Expr::Bin(*op, Box::new(l.bind(bindings)?), Box::new(r.bind(bindings)?)),
        })
    }
}

/// Parses `text` and evaluates it in one step.
pub fn evaluate(text: &str, p: f64, bindings: &Bindings) -> Result<f64> {
    parse(text)?.evaluate(p, bindings)
}
