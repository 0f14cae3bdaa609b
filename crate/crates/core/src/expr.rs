//! Scalar coefficient expressions `p(t)`, `q(t)`.
//!
//! Grammar (whitespace-insensitive):
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' atom)?
//! atom  := number | 't' | 'pi' | func '(' args ')' | '(' expr ')'
//! func  := sin | cos | exp | sqrt | abs | mod | neg1pow | if | eq | lt | le | gt | ge
//! ```
//!
//! Exponents and the second arguments of `mod` and of comparisons must be
//! constant. Comparisons are only valid as the first argument of `if`.

use std::f64::consts::PI;
use std::fmt;

use thiserror::Error;

use crate::timescale::membership_tol;

/// Tolerance for `neg1pow` integrality.
pub const NEG1POW_INTEGER_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("{func} expects {expected} argument(s), found {found} (offset {offset})")]
    Arity {
        func: String,
        expected: usize,
        found: usize,
        offset: usize,
    },
    #[error("exponent at offset {offset} is not constant")]
    NonConstantExponent { offset: usize },
    #[error("domain error at t = {t}: {message}")]
    Domain { t: f64, message: String },
    #[error("neg1pow argument {value} is not an integer")]
    NonIntegerNeg1Pow { value: f64 },
    #[error("{node} has no derivative on dense parts of the time scale")]
    NonDifferentiableNode { node: &'static str },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Sqrt,
    Abs,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Eq,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    fn name(self) -> &'static str {
        match self {
            CmpOp::Eq => "eq",
            CmpOp::Lt => "lt",
            CmpOp::Le => "le",
            CmpOp::Gt => "gt",
            CmpOp::Ge => "ge",
        }
    }

    fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "eq" => CmpOp::Eq,
            "lt" => CmpOp::Lt,
            "le" => CmpOp::Le,
            "gt" => CmpOp::Gt,
            "ge" => CmpOp::Ge,
            _ => return None,
        })
    }
}

/// `lhs <op> rhs` with a constant right-hand side.
#[derive(Debug, Clone, PartialEq)]
pub struct Cond {
    pub op: CmpOp,
    pub lhs: Expr,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var,
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, f64),
    Neg(Box<Expr>),
    Call(Func, Box<Expr>),
    /// `mod(e, c)`, result in `[0, c)` for `c > 0`.
    Mod(Box<Expr>, f64),
    /// `(-1)^e` for integer-valued `e`.
    Neg1Pow(Box<Expr>),
    If(Box<Cond>, Box<Expr>, Box<Expr>),
    /// Placeholder left by [`Expr::differentiate`] for `mod`/`neg1pow`;
    /// evaluating it is an error.
    Nondifferentiable(&'static str),
}

pub fn parse(text: &str) -> Result<Expr, ExprError> {
    Expr::parse(text)
}

impl Expr {
    pub fn parse(text: &str) -> Result<Expr, ExprError> {
        let tokens = lex(text)?;
        let mut p = Parser { tokens, pos: 0 };
        let e = p.expr()?;
        let tok = p.peek();
        if tok.kind != Tok::End {
            return Err(syntax(tok.offset, "unexpected trailing input"));
        }
        Ok(e)
    }

    /// True when the expression does not depend on `t`.
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Const(_) => true,
            Expr::Var | Expr::Nondifferentiable(_) => false,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.is_constant() && b.is_constant()
            }
            Expr::Pow(a, _) | Expr::Neg(a) | Expr::Call(_, a) | Expr::Mod(a, _) => a.is_constant(),
            Expr::Neg1Pow(a) => a.is_constant(),
            Expr::If(c, a, b) => c.lhs.is_constant() && a.is_constant() && b.is_constant(),
        }
    }

    pub fn eval(&self, t: f64) -> Result<f64, ExprError> {
        let v = self.eval_inner(t)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(domain(t, "non-finite result"))
        }
    }

    fn eval_inner(&self, t: f64) -> Result<f64, ExprError> {
        Ok(match self {
            Expr::Const(c) => *c,
            Expr::Var => t,
            Expr::Add(a, b) => a.eval_inner(t)? + b.eval_inner(t)?,
            Expr::Sub(a, b) => a.eval_inner(t)? - b.eval_inner(t)?,
            Expr::Mul(a, b) => a.eval_inner(t)? * b.eval_inner(t)?,
            Expr::Div(a, b) => {
                let den = b.eval_inner(t)?;
                if den == 0.0 {
                    return Err(domain(t, "division by zero"));
                }
                a.eval_inner(t)? / den
            }
            Expr::Pow(a, c) => {
                let base = a.eval_inner(t)?;
                if base < 0.0 && c.fract() != 0.0 {
                    return Err(domain(t, "negative base with fractional exponent"));
                }
                if base == 0.0 && *c < 0.0 {
                    return Err(domain(t, "zero to a negative power"));
                }
                base.powf(*c)
            }
            Expr::Neg(a) => -a.eval_inner(t)?,
            Expr::Call(f, a) => {
                let x = a.eval_inner(t)?;
                match f {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Exp => x.exp(),
                    Func::Abs => x.abs(),
                    Func::Sqrt => {
                        if x < 0.0 {
                            return Err(domain(t, "sqrt of a negative number"));
                        }
                        x.sqrt()
                    }
                }
            }
            Expr::Mod(a, c) => {
                if *c == 0.0 {
                    return Err(domain(t, "mod by zero"));
                }
                let x = a.eval_inner(t)?;
                x - c * (x / c).floor()
            }
            Expr::Neg1Pow(a) => {
                let x = a.eval_inner(t)?;
                let r = x.round();
                if (x - r).abs() > NEG1POW_INTEGER_TOL {
                    return Err(ExprError::NonIntegerNeg1Pow { value: x });
                }
                if (r / 2.0).fract() == 0.0 {
                    1.0
                } else {
                    -1.0
                }
            }
            Expr::If(cond, a, b) => {
                if cond.holds(t)? {
                    a.eval_inner(t)?
                } else {
                    b.eval_inner(t)?
                }
            }
            Expr::Nondifferentiable(node) => {
                return Err(ExprError::NonDifferentiableNode { node })
            }
        })
    }

    /// Symbolic derivative with respect to `t`. `if` keeps its condition and
    /// differentiates both branches; `mod` and `neg1pow` become
    /// [`Expr::Nondifferentiable`] and fail only when evaluated.
    pub fn differentiate(&self) -> Expr {
        use Expr::*;
        match self {
            Const(_) => Const(0.0),
            Var => Const(1.0),
            Add(a, b) => add(a.differentiate(), b.differentiate()),
            Sub(a, b) => sub(a.differentiate(), b.differentiate()),
            Mul(a, b) => add(
                mul(a.differentiate(), (**b).clone()),
                mul((**a).clone(), b.differentiate()),
            ),
            Div(a, b) => div(
                sub(
                    mul(a.differentiate(), (**b).clone()),
                    mul((**a).clone(), b.differentiate()),
                ),
                pow((**b).clone(), 2.0),
            ),
            Pow(a, c) => mul(
                mul(Const(*c), pow((**a).clone(), c - 1.0)),
                a.differentiate(),
            ),
            Neg(a) => neg(a.differentiate()),
            Call(f, a) => {
                let inner = a.differentiate();
                let u = (**a).clone();
                let outer = match f {
                    Func::Sin => Call(Func::Cos, Box::new(u)),
                    Func::Cos => neg(Call(Func::Sin, Box::new(u))),
                    Func::Exp => Call(Func::Exp, Box::new(u)),
                    Func::Sqrt => div(Const(0.5), Call(Func::Sqrt, Box::new(u))),
                    Func::Abs => div(u.clone(), Call(Func::Abs, Box::new(u))),
                };
                mul(outer, inner)
            }
            Mod(_, _) => Nondifferentiable("mod"),
            Neg1Pow(_) => Nondifferentiable("neg1pow"),
            If(c, a, b) => If(
                c.clone(),
                Box::new(a.differentiate()),
                Box::new(b.differentiate()),
            ),
            Nondifferentiable(n) => Nondifferentiable(n),
        }
    }
}

impl Cond {
    fn holds(&self, t: f64) -> Result<bool, ExprError> {
        let l = self.lhs.eval_inner(t)?;
        let r = self.rhs;
        let tol = membership_tol(t);
        Ok(match self.op {
            CmpOp::Eq => (l - r).abs() <= tol,
            CmpOp::Lt => l < r - tol,
            CmpOp::Le => l <= r + tol,
            CmpOp::Gt => l > r + tol,
            CmpOp::Ge => l >= r - tol,
        })
    }
}

fn domain(t: f64, message: &str) -> ExprError {
    ExprError::Domain {
        t,
        message: message.to_string(),
    }
}

fn syntax(offset: usize, message: &str) -> ExprError {
    ExprError::Syntax {
        offset,
        message: message.to_string(),
    }
}

fn is_zero(e: &Expr) -> bool {
    matches!(e, Expr::Const(c) if *c == 0.0)
}

fn is_one(e: &Expr) -> bool {
    matches!(e, Expr::Const(c) if *c == 1.0)
}

fn add(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        _ if is_zero(&a) => b,
        _ if is_zero(&b) => a,
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x + y),
        _ => Expr::Add(Box::new(a), Box::new(b)),
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        _ if is_zero(&b) => a,
        _ if is_zero(&a) => neg(b),
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x - y),
        _ => Expr::Sub(Box::new(a), Box::new(b)),
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        _ if is_zero(&a) || is_zero(&b) => Expr::Const(0.0),
        _ if is_one(&a) => b,
        _ if is_one(&b) => a,
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x * y),
        _ => Expr::Mul(Box::new(a), Box::new(b)),
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    if is_zero(&a) {
        return Expr::Const(0.0);
    }
    if is_one(&b) {
        return a;
    }
    Expr::Div(Box::new(a), Box::new(b))
}

fn neg(a: Expr) -> Expr {
    match a {
        Expr::Const(c) => Expr::Const(-c),
        Expr::Neg(inner) => *inner,
        other => Expr::Neg(Box::new(other)),
    }
}

fn pow(a: Expr, c: f64) -> Expr {
    if c == 0.0 {
        Expr::Const(1.0)
    } else if c == 1.0 {
        a
    } else {
        Expr::Pow(Box::new(a), c)
    }
}

// ---------------------------------------------------------------------------
// Lexer / parser

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    LParen,
    RParen,
    Comma,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    End,
}

#[derive(Debug, Clone)]
struct Token {
    kind: Tok,
    offset: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, ExprError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let kind = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
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
                let s = &text[start..i];
                let v: f64 = s
                    .parse()
                    .map_err(|_| syntax(start, &format!("malformed number '{s}'")))?;
                out.push(Token {
                    kind: Tok::Num(v),
                    offset: start,
                });
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push(Token {
                    kind: Tok::Ident(text[start..i].to_string()),
                    offset: start,
                });
                continue;
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(syntax(start, &format!("unexpected character '{ch}'")));
            }
        };
        out.push(Token { kind, offset: start });
        i += 1;
    }
    out.push(Token {
        kind: Tok::End,
        offset: text.len(),
    });
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if t.kind != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, kind: Tok, what: &str) -> Result<Token, ExprError> {
        let t = self.bump();
        if t.kind == kind {
            Ok(t)
        } else {
            Err(syntax(t.offset, &format!("expected {what}")))
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek().kind {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek().kind {
                Tok::Star => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Slash => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.peek().kind == Tok::Minus {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.atom()?;
        if self.peek().kind != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let offset = self.peek().offset;
        let exponent = self.atom()?;
        let c = constant_value(&exponent).ok_or(ExprError::NonConstantExponent { offset })?;
        Ok(Expr::Pow(Box::new(base), c))
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        let tok = self.bump();
        match tok.kind {
            Tok::Num(v) => Ok(Expr::Const(v)),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(e)
            }
            Tok::Ident(name) => match name.as_str() {
                "t" => Ok(Expr::Var),
                "pi" => Ok(Expr::Const(PI)),
                _ => self.call(&name, tok.offset),
            },
            Tok::End => Err(syntax(tok.offset, "unexpected end of input")),
            _ => Err(syntax(tok.offset, "expected a number, 't', 'pi', a function or '('")),
        }
    }

    fn call(&mut self, name: &str, offset: usize) -> Result<Expr, ExprError> {
        let arity = match name {
            "sin" | "cos" | "exp" | "sqrt" | "abs" | "neg1pow" => 1,
            "mod" => 2,
            "if" => 3,
            "eq" | "lt" | "le" | "gt" | "ge" => {
                return Err(syntax(offset, "comparisons are only allowed as an if condition"))
            }
            _ => return Err(syntax(offset, &format!("unknown identifier '{name}'"))),
        };
        self.expect(Tok::LParen, "'(' after function name")?;

        if name == "if" {
            let cond = self.cond()?;
            let mut rest = Vec::new();
            while self.peek().kind == Tok::Comma {
                self.bump();
                rest.push(self.expr()?);
            }
            self.expect(Tok::RParen, "')'")?;
            if rest.len() != 2 {
                return Err(arity_err(name, 3, rest.len() + 1, offset));
            }
            let else_branch = rest.pop().unwrap();
            let then_branch = rest.pop().unwrap();
            return Ok(Expr::If(
                Box::new(cond),
                Box::new(then_branch),
                Box::new(else_branch),
            ));
        }

        let mut args = Vec::new();
        let mut arg_offsets = Vec::new();
        if self.peek().kind != Tok::RParen {
            loop {
                arg_offsets.push(self.peek().offset);
                args.push(self.expr()?);
                if self.peek().kind == Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::RParen, "')'")?;
        if args.len() != arity {
            return Err(arity_err(name, arity, args.len(), offset));
        }
        let mut args = args.into_iter();
        let first = Box::new(args.next().unwrap());
        Ok(match name {
            "sin" => Expr::Call(Func::Sin, first),
            "cos" => Expr::Call(Func::Cos, first),
            "exp" => Expr::Call(Func::Exp, first),
            "sqrt" => Expr::Call(Func::Sqrt, first),
            "abs" => Expr::Call(Func::Abs, first),
            "neg1pow" => Expr::Neg1Pow(first),
            "mod" => {
                let m = args.next().unwrap();
                let c = constant_value(&m)
                    .ok_or_else(|| syntax(arg_offsets[1], "mod modulus must be constant"))?;
                Expr::Mod(first, c)
            }
            _ => unreachable!(),
        })
    }

    fn cond(&mut self) -> Result<Cond, ExprError> {
        let tok = self.bump();
        let op = match &tok.kind {
            Tok::Ident(n) => CmpOp::from_name(n),
            _ => None,
        }
        .ok_or_else(|| syntax(tok.offset, "if condition must be eq/lt/le/gt/ge(...)"))?;
        self.expect(Tok::LParen, "'('")?;
        let lhs = self.expr()?;
        let mut found = 1;
        let mut rhs = None;
        while self.peek().kind == Tok::Comma {
            self.bump();
            let off = self.peek().offset;
            let e = self.expr()?;
            found += 1;
            if rhs.is_none() {
                rhs = Some((e, off));
            }
        }
        self.expect(Tok::RParen, "')'")?;
        let (rhs, off) = match rhs {
            Some(r) if found == 2 => r,
            _ => return Err(arity_err(op.name(), 2, found, tok.offset)),
        };
        let rhs = constant_value(&rhs)
            .ok_or_else(|| syntax(off, "comparison right-hand side must be constant"))?;
        Ok(Cond { op, lhs, rhs })
    }
}

fn arity_err(func: &str, expected: usize, found: usize, offset: usize) -> ExprError {
    ExprError::Arity {
        func: func.to_string(),
        expected,
        found,
        offset,
    }
}

fn constant_value(e: &Expr) -> Option<f64> {
    if !e.is_constant() {
        return None;
    }
    e.eval(0.0).ok()
}

// ---------------------------------------------------------------------------
// Serialization

fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => 1,
        Expr::Mul(..) | Expr::Div(..) => 2,
        Expr::Neg(..) => 3,
        Expr::Pow(..) => 4,
        Expr::Const(c) if *c < 0.0 || c.is_sign_negative() => 3,
        _ => 5,
    }
}

struct Constant(f64);

impl fmt::Display for Constant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_sign_negative() {
            write!(f, "(-{})", -self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, e: &Expr, min_prec: u8) -> fmt::Result {
    if precedence(e) < min_prec {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => {
                if c.is_sign_negative() {
                    write!(f, "-{}", -c)
                } else {
                    write!(f, "{c}")
                }
            }
            Expr::Var => write!(f, "t"),
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                write_child(f, a, 1)?;
                f.write_str(if matches!(self, Expr::Add(..)) { " + " } else { " - " })?;
                write_child(f, b, 2)
            }
            Expr::Mul(a, b) | Expr::Div(a, b) => {
                write_child(f, a, 2)?;
                f.write_str(if matches!(self, Expr::Mul(..)) { "*" } else { "/" })?;
                write_child(f, b, 3)
            }
            Expr::Neg(a) => {
                f.write_str("-")?;
                write_child(f, a, 3)
            }
            Expr::Pow(a, c) => {
                write_child(f, a, 5)?;
                write!(f, "^{}", Constant(*c))
            }
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
            Expr::Mod(a, c) => write!(f, "mod({a}, {})", Constant(*c)),
            Expr::Neg1Pow(a) => write!(f, "neg1pow({a})"),
            Expr::If(c, a, b) => write!(
                f,
                "if({}({}, {}), {a}, {b})",
                c.op.name(),
                c.lhs,
                Constant(c.rhs)
            ),
            Expr::Nondifferentiable(n) => write!(f, "nondifferentiable({n})"),
        }
    }
}
