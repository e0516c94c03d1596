//! A small expression language in one variable `u`, evaluated on jets.
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := unary (("*" | "/") unary)*
//! unary  := "-" unary | power
//! power  := atom ("^" unary)?
//! atom   := number | "u" | "pi" | "e" | name "(" expr ")" | "(" expr ")"
//! name   := sin | cos | tan | sqrt | exp | log | ln | atan | asinh | sinh | cosh
//! ```
//!
//! `−`, `×`, `·`, `÷` and `π` are accepted as spellings of `-`, `*`, `*`, `/`
//! and `pi`. A power with a non-integer exponent needs a positive base.

use crate::error::{Error, Result};
use crate::jets::{Elementary, Jet2};

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    U,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Tan(Box<Expr>),
    Call(Elementary, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
}

fn tokenize(text: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            c if c.is_whitespace() => i += 1,
            '0'..='9' | '.' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                // exponent part, only when followed by a digit or sign+digit
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        i = j;
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let s: String = chars[start..i].iter().collect();
                let v = s
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad number {s:?}")))?;
                out.push(Tok::Num(v));
            }
            c if c.is_alphabetic() || c == '_' => {
                if c == 'π' {
                    out.push(Tok::Ident("pi".into()));
                    i += 1;
                    continue;
                }
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push(Tok::Ident(chars[start..i].iter().collect()));
            }
            '+' | '-' | '*' | '/' | '^' => {
                out.push(Tok::Op(c));
                i += 1;
            }
            '−' => {
                out.push(Tok::Op('-'));
                i += 1;
            }
            '×' | '·' => {
                out.push(Tok::Op('*'));
                i += 1;
            }
            '÷' => {
                out.push(Tok::Op('/'));
                i += 1;
            }
            '(' => {
                out.push(Tok::LParen);
                i += 1;
            }
            ')' => {
                out.push(Tok::RParen);
                i += 1;
            }
            _ => return Err(Error::Parse(format!("unexpected character {c:?}"))),
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn eat_op(&mut self, ops: &[char]) -> Option<char> {
        match self.peek() {
            Some(Tok::Op(c)) if ops.contains(c) => {
                let c = *c;
                self.pos += 1;
                Some(c)
            }
            _ => None,
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Some(op) = self.eat_op(&['+', '-']) {
            let rhs = self.term()?;
            lhs = if op == '+' {
                Expr::Add(Box::new(lhs), Box::new(rhs))
            } else {
                Expr::Sub(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.eat_op(&['*', '/']) {
            let rhs = self.unary()?;
            lhs = if op == '*' {
                Expr::Mul(Box::new(lhs), Box::new(rhs))
            } else {
                Expr::Div(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat_op(&['-']).is_some() {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat_op(&['+']).is_some() {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat_op(&['^']).is_some() {
            let exp = self.unary()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.next() {
            Some(Tok::Num(v)) => Ok(Expr::Num(v)),
            Some(Tok::LParen) => {
                let e = self.expr()?;
                match self.next() {
                    Some(Tok::RParen) => Ok(e),
                    _ => Err(Error::Parse("missing ')'".into())),
                }
            }
            Some(Tok::Ident(name)) => match name.as_str() {
                "u" => Ok(Expr::U),
                "pi" => Ok(Expr::Num(std::f64::consts::PI)),
                "e" => Ok(Expr::Num(std::f64::consts::E)),
                _ => {
                    let f = function(&name)?;
                    if self.next() != Some(Tok::LParen) {
                        return Err(Error::Parse(format!("{name} needs '('")));
                    }
                    let arg = Box::new(self.expr()?);
                    if self.next() != Some(Tok::RParen) {
                        return Err(Error::Parse("missing ')'".into()));
                    }
                    Ok(match f {
                        None => Expr::Tan(arg),
                        Some(f) => Expr::Call(f, arg),
                    })
                }
            },
            Some(t) => Err(Error::Parse(format!("unexpected token {t:?}"))),
            None => Err(Error::Parse("unexpected end of expression".into())),
        }
    }
}

/// `None` stands for `tan`, which has no [`Elementary`] of its own.
fn function(name: &str) -> Result<Option<Elementary>> {
    Ok(Some(match name {
        "sin" => Elementary::Sin,
        "cos" => Elementary::Cos,
        "sinh" => Elementary::Sinh,
        "cosh" => Elementary::Cosh,
        "exp" => Elementary::Exp,
        "log" | "ln" => Elementary::Log,
        "sqrt" => Elementary::Sqrt,
        "atan" => Elementary::Atan,
        "asinh" => Elementary::Asinh,
        "tan" => return Ok(None),
        _ => return Err(Error::Parse(format!("unknown function {name:?}"))),
    }))
}

impl Expr {
    pub fn parse(text: &str) -> Result<Expr> {
        let mut p = Parser {
            toks: tokenize(text)?,
            pos: 0,
        };
        let e = p.expr()?;
        if p.pos != p.toks.len() {
            return Err(Error::Parse(format!("trailing input in {text:?}")));
        }
        Ok(e)
    }

    /// Evaluates with `u` bound to the given jet.
    pub fn eval(&self, u: &Jet2) -> Result<Jet2> {
        let m = u.order();
        Ok(match self {
            Expr::Num(v) => Jet2::constant(*v, m),
            Expr::U => *u,
            Expr::Neg(a) => -a.eval(u)?,
            Expr::Add(a, b) => a.eval(u)? + b.eval(u)?,
            Expr::Sub(a, b) => a.eval(u)? - b.eval(u)?,
            Expr::Mul(a, b) => a.eval(u)? * b.eval(u)?,
            Expr::Div(a, b) => a.eval(u)?.checked_div(&b.eval(u)?)?,
            Expr::Tan(a) => {
                let x = a.eval(u)?;
                x.sin().checked_div(&x.cos())?
            }
            Expr::Call(f, a) => a.eval(u)?.apply(*f)?,
            Expr::Pow(a, b) => {
                let base = a.eval(u)?;
                let e = b.eval(u)?;
                let p = e.value();
                let constant = e.coeffs()[1..].iter().all(|&c| c == 0.0);
                if constant && p.fract() == 0.0 && p.abs() <= 64.0 {
                    let mut out = Jet2::constant(1.0, m);
                    for _ in 0..(p.abs() as usize) {
                        out = out * base;
                    }
                    if p < 0.0 {
                        out = out.recip()?;
                    }
                    out
                } else {
                    (base.ln()? * e).exp()
                }
            }
        })
    }

    pub fn eval_f64(&self, u: f64) -> Result<f64> {
        Ok(self.eval(&Jet2::constant(u, 0))?.value())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::Var;

    fn at(text: &str, u: f64) -> f64 {
        Expr::parse(text).unwrap().eval_f64(u).unwrap()
    }

    #[test]
    fn precedence_and_unary_minus() {
        assert_eq!(at("1 + 2*3", 0.0), 7.0);
        assert_eq!(at("-u^2", 3.0), -9.0);
        assert_eq!(at("2^3^2", 0.0), 512.0);
        assert_eq!(at("(1+2)*3", 0.0), 9.0);
        assert_eq!(at("6/3/2", 0.0), 1.0);
        assert_eq!(at("1e-1 * 10", 0.0), 1.0);
    }

    #[test]
    fn unicode_spellings() {
        assert!((at("π/2 − u × 2 ÷ 4", 1.0) - (std::f64::consts::FRAC_PI_2 - 0.5)).abs() < 1e-15);
    }

    #[test]
    fn functions() {
        assert!((at("sin(u)^2 + cos(u)^2", 0.7) - 1.0).abs() < 1e-15);
        assert!((at("tan(u)", 0.3) - 0.3f64.tan()).abs() < 1e-15);
        assert!((at("asinh(u) - log(u + sqrt(1 + u*u))", 0.8)).abs() < 1e-15);
        assert!((at("u^0.5", 2.0) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn jet_evaluation_gives_derivatives() {
        let e = Expr::parse("u*u*u").unwrap();
        let u = Jet2::variable(Var::U, 2.0, 3).unwrap();
        let y = e.eval(&u).unwrap();
        assert_eq!(y.univariate(Var::U), vec![8.0, 12.0, 6.0, 1.0]);
    }

    #[test]
    fn errors() {
        for bad in ["", "1 +", "foo(u)", "(u", "u u", "sin u", "2 $ 3"] {
            assert!(matches!(Expr::parse(bad), Err(Error::Parse(_))), "{bad}");
        }
    }
}
