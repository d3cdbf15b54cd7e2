//! Expression language for curvature and torsion profiles.
//!
//! ```text
//! expr    := term (('+'|'-') term)*
//! term    := factor (('*'|'/') factor)*
//! factor  := unary ('^' factor)?
//! unary   := '-' unary | primary
//! primary := NUMBER | 's' | FUNC '(' expr ')' | '(' expr ')'
//! ```
//!
//! `^` is right-associative and binds looser than unary minus, so `-2^2`
//! is `(-2)^2`. FUNC is one of sin cos tan sqrt exp log abs.
//!
//! Expressions evaluate either to a plain value or to a value/derivative
//! pair (forward-mode dual numbers), which is how profiles supply κ′ and τ′.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result, SyntaxError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Sqrt,
    Exp,
    Log,
    Abs,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "sqrt" => Func::Sqrt,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "abs" => Func::Abs,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Sqrt => "sqrt",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Abs => "abs",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var,
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

/// Value and first derivative with respect to `s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual {
    pub v: f64,
    pub d: f64,
}

impl Dual {
    fn constant(v: f64) -> Self {
        Dual { v, d: 0.0 }
    }
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr> {
        Parser::new(src)?.parse_all()
    }

    pub fn eval(&self, s: f64) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::Var => s,
            Expr::Neg(a) => -a.eval(s),
            Expr::Binary(op, a, b) => {
                let (a, b) = (a.eval(s), b.eval(s));
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                    BinOp::Pow => a.powf(b),
                }
            }
            Expr::Call(f, a) => {
                let a = a.eval(s);
                match f {
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Tan => a.tan(),
                    Func::Sqrt => a.sqrt(),
                    Func::Exp => a.exp(),
                    Func::Log => a.ln(),
                    Func::Abs => a.abs(),
                }
            }
        }
    }

    pub fn eval_dual(&self, s: f64) -> Dual {
        match self {
            Expr::Num(v) => Dual::constant(*v),
            Expr::Var => Dual { v: s, d: 1.0 },
            Expr::Neg(a) => {
                let a = a.eval_dual(s);
                Dual { v: -a.v, d: -a.d }
            }
            Expr::Binary(op, a, b) => {
                let (a, b) = (a.eval_dual(s), b.eval_dual(s));
                match op {
                    BinOp::Add => Dual { v: a.v + b.v, d: a.d + b.d },
                    BinOp::Sub => Dual { v: a.v - b.v, d: a.d - b.d },
                    BinOp::Mul => Dual { v: a.v * b.v, d: a.d * b.v + a.v * b.d },
                    BinOp::Div => Dual { v: a.v / b.v, d: (a.d * b.v - a.v * b.d) / (b.v * b.v) },
                    BinOp::Pow => pow_dual(a, b),
                }
            }
            Expr::Call(f, a) => {
                let a = a.eval_dual(s);
                let (v, dv) = match f {
                    Func::Sin => (a.v.sin(), a.v.cos()),
                    Func::Cos => (a.v.cos(), -a.v.sin()),
                    Func::Tan => {
                        let t = a.v.tan();
                        (t, 1.0 + t * t)
                    }
                    Func::Sqrt => {
                        let r = a.v.sqrt();
                        (r, 0.5 / r)
                    }
                    Func::Exp => {
                        let e = a.v.exp();
                        (e, e)
                    }
                    Func::Log => (a.v.ln(), 1.0 / a.v),
                    Func::Abs => (a.v.abs(), a.v.signum()),
                };
                Dual { v, d: dv * a.d }
            }
        }
    }

    fn binary(op: BinOp, a: Expr, b: Expr) -> Expr {
        Expr::Binary(op, Box::new(a), Box::new(b))
    }
}

fn pow_dual(a: Dual, b: Dual) -> Dual {
    let v = a.v.powf(b.v);
    if b.d == 0.0 {
        // constant exponent: valid for negative bases with integer powers
        let d = if b.v == 0.0 { 0.0 } else { b.v * a.v.powf(b.v - 1.0) * a.d };
        Dual { v, d }
    } else {
        Dual { v, d: v * (b.d * a.v.ln() + b.v * a.d / a.v) }
    }
}

impl FromStr for Expr {
    type Err = Error;
    fn from_str(s: &str) -> Result<Expr> {
        Expr::parse(s)
    }
}

/// Prints with every binary node parenthesized; the output re-parses to
/// the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) if *v < 0.0 || (*v == 0.0 && v.is_sign_negative()) => {
                write!(f, "(-{})", -v)
            }
            Expr::Num(v) => write!(f, "{v:?}"),
            Expr::Var => f.write_str("s"),
            Expr::Neg(a) => write!(f, "-{a}"),
            Expr::Binary(op, a, b) => write!(f, "({a}{}{b})", op.symbol()),
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
    End,
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

fn syntax(column: usize, message: impl Into<String>) -> Error {
    Error::Syntax(SyntaxError { column, message: message.into() })
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i < chars.len() && chars[i] == '.' {
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let text: String = chars[start..i].iter().collect();
            let v: f64 = text.parse().map_err(|_| syntax(col, format!("malformed number `{text}`")))?;
            out.push((Tok::Num(v), col));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), col));
        } else if "+-*/^(),".contains(c) {
            out.push((Tok::Sym(c), col));
            i += 1;
        } else {
            return Err(syntax(col, format!("unexpected character `{c}`")));
        }
    }
    out.push((Tok::End, chars.len() + 1));
    Ok(out)
}

impl Parser {
    fn new(src: &str) -> Result<Self> {
        Ok(Parser { toks: lex(src)?, pos: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn column(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn parse_all(mut self) -> Result<Expr> {
        if *self.peek() == Tok::End {
            return Err(syntax(1, "empty expression"));
        }
        let e = self.expr()?;
        match self.peek() {
            Tok::End => Ok(e),
            t => Err(syntax(self.column(), format!("unexpected {}", describe(t)))),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Sym('+') => BinOp::Add,
                Tok::Sym('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            lhs = Expr::binary(op, lhs, self.term()?);
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek() {
                Tok::Sym('*') => BinOp::Mul,
                Tok::Sym('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            lhs = Expr::binary(op, lhs, self.factor()?);
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        let base = self.unary()?;
        if self.eat('^') {
            Ok(Expr::binary(BinOp::Pow, base, self.factor()?))
        } else {
            Ok(base)
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            Ok(Expr::Neg(Box::new(self.unary()?)))
        } else {
            self.primary()
        }
    }

    fn primary(&mut self) -> Result<Expr> {
        let (tok, col) = self.bump();
        match tok {
            Tok::Num(v) => Ok(Expr::Num(v)),
            Tok::Ident(name) if name == "s" => Ok(Expr::Var),
            Tok::Ident(name) => {
                let Some(func) = Func::from_name(&name) else {
                    return Err(Error::UnknownIdentifier { name, column: col });
                };
                if !self.eat('(') {
                    return Err(syntax(self.column(), format!("expected `(` after `{name}`")));
                }
                let mut args = Vec::new();
                if *self.peek() != Tok::Sym(')') {
                    args.push(self.expr()?);
                    while self.eat(',') {
                        args.push(self.expr()?);
                    }
                }
                if !self.eat(')') {
                    return Err(syntax(self.column(), format!("expected `)` to close `{name}(`")));
                }
                if args.len() != 1 {
                    return Err(Error::ArityMismatch { name, got: args.len(), column: col });
                }
                Ok(Expr::Call(func, Box::new(args.pop().unwrap())))
            }
            Tok::Sym('(') => {
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(syntax(self.column(), "expected `)`"));
                }
                Ok(e)
            }
            t => Err(syntax(col, format!("unexpected {}", describe(&t)))),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(v) => format!("number {v}"),
        Tok::Ident(n) => format!("identifier `{n}`"),
        Tok::Sym(c) => format!("`{c}`"),
        Tok::End => "end of input".to_string(),
    }
}
