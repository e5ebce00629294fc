//! Arithmetic expressions over the boundary point `z` (also `ζ`) and the unit
//! tangent `T`.
//!
//! Grammar:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?
//! atom   := number | 'i' | 'z' | 'ζ' | 'T' | func | '(' expr ')'
//! func   := ('conj' | 'exp') ('(' expr ')')?
//! ```
//!
//! A bare `conj` or `exp` applies to `z`. Numbers accept an exponent
//! (`1.5e-3`) and an `i` suffix (`2i`).

use dbar_core::Complex64;

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(Complex64),
    Z,
    Tangent,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Conj(Box<Expr>),
    Exp(Box<Expr>),
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Num(f64),
    Imag(f64),
    Ident(String),
    Op(char),
}

fn tokenize(src: &str) -> Result<Vec<Token>, String> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut k = 0;
    while k < chars.len() {
        let ch = chars[k];
        if ch.is_whitespace() {
            k += 1;
        } else if ch.is_ascii_digit() || ch == '.' {
            let start = k;
            while k < chars.len() && (chars[k].is_ascii_digit() || chars[k] == '.') {
                k += 1;
            }
            if k < chars.len() && (chars[k] == 'e' || chars[k] == 'E') {
                let mut j = k + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    k = j;
                    while k < chars.len() && chars[k].is_ascii_digit() {
                        k += 1;
                    }
                }
            }
            let text: String = chars[start..k].iter().collect();
            let value: f64 = text.parse().map_err(|_| format!("bad number `{text}`"))?;
            let imaginary = k < chars.len()
                && chars[k] == 'i'
                && !chars.get(k + 1).is_some_and(|c| c.is_alphanumeric());
            if imaginary {
                k += 1;
                out.push(Token::Imag(value));
            } else {
                out.push(Token::Num(value));
            }
        } else if ch.is_alphabetic() {
            let start = k;
            while k < chars.len() && chars[k].is_alphanumeric() {
                k += 1;
            }
            out.push(Token::Ident(chars[start..k].iter().collect()));
        } else if "+-*/^()".contains(ch) {
            out.push(Token::Op(ch));
            k += 1;
        } else {
            return Err(format!("unexpected character `{ch}`"));
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn eat_op(&mut self, op: char) -> bool {
        if self.peek() == Some(&Token::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, String> {
        let mut lhs = self.term()?;
        loop {
            if self.eat_op('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat_op('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, String> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat_op('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat_op('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, String> {
        if self.eat_op('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat_op('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, String> {
        let base = self.atom()?;
        if self.eat_op('^') {
            return Ok(Expr::Pow(Box::new(base), Box::new(self.unary()?)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, String> {
        let token = self.peek().cloned().ok_or("unexpected end of expression")?;
        self.pos += 1;
        match token {
            Token::Num(v) => Ok(Expr::Num(Complex64::new(v, 0.0))),
            Token::Imag(v) => Ok(Expr::Num(Complex64::new(0.0, v))),
            Token::Op('(') => {
                let inner = self.expr()?;
                if !self.eat_op(')') {
                    return Err("missing `)`".into());
                }
                Ok(inner)
            }
            Token::Op(op) => Err(format!("unexpected `{op}`")),
            Token::Ident(name) => match name.as_str() {
                "i" => Ok(Expr::Num(Complex64::new(0.0, 1.0))),
                "z" | "ζ" | "zeta" => Ok(Expr::Z),
                "T" => Ok(Expr::Tangent),
                "conj" | "exp" => {
                    let arg = if self.peek() == Some(&Token::Op('(')) { self.atom()? } else { Expr::Z };
                    Ok(if name == "conj" { Expr::Conj(Box::new(arg)) } else { Expr::Exp(Box::new(arg)) })
                }
                other => Err(format!("unknown name `{other}`")),
            },
        }
    }
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr, String> {
        let mut p = Parser { tokens: tokenize(src)?, pos: 0 };
        if p.tokens.is_empty() {
            return Err("empty expression".into());
        }
        let e = p.expr()?;
        if p.pos != p.tokens.len() {
            return Err(format!("trailing input in `{src}`"));
        }
        Ok(e)
    }

    pub fn eval(&self, z: Complex64, t: Complex64) -> Complex64 {
        match self {
            Expr::Num(v) => *v,
            Expr::Z => z,
            Expr::Tangent => t,
            Expr::Neg(a) => -a.eval(z, t),
            Expr::Add(a, b) => a.eval(z, t) + b.eval(z, t),
            Expr::Sub(a, b) => a.eval(z, t) - b.eval(z, t),
            Expr::Mul(a, b) => a.eval(z, t) * b.eval(z, t),
            Expr::Div(a, b) => a.eval(z, t) / b.eval(z, t),
            Expr::Pow(a, b) => {
                let base = a.eval(z, t);
                let e = b.eval(z, t);
                if e.im == 0.0 && e.re.fract() == 0.0 && e.re.abs() <= i32::MAX as f64 {
                    base.powi(e.re as i32)
                } else {
                    base.powc(e)
                }
            }
            Expr::Conj(a) => a.eval(z, t).conj(),
            Expr::Exp(a) => a.eval(z, t).exp(),
        }
    }

    /// True when the expression does not mention `z` or `T`.
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Num(_) => true,
            Expr::Z | Expr::Tangent => false,
            Expr::Neg(a) | Expr::Conj(a) | Expr::Exp(a) => a.is_constant(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                a.is_constant() && b.is_constant()
            }
        }
    }

    pub fn constant_value(&self) -> Option<Complex64> {
        self.is_constant().then(|| self.eval(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(src: &str, z: Complex64) -> Complex64 {
        Expr::parse(src).unwrap().eval(z, Complex64::new(0.0, 1.0))
    }

    #[test]
    fn arithmetic_and_precedence() {
        let z = Complex64::new(0.3, -0.2);
        assert_eq!(ev("1 + 2 * 3", z), Complex64::new(7.0, 0.0));
        assert_eq!(ev("-2^2", z), Complex64::new(-4.0, 0.0));
        assert_eq!(ev("2^3^2", z), Complex64::new(512.0, 0.0));
        assert!((ev("z^3 + 2*z", z) - (z * z * z + 2.0 * z)).norm() < 1e-15);
        assert!((ev("(3/2)*z", z) - 1.5 * z).norm() < 1e-15);
        assert_eq!(ev("2i - 1.5e-1", z), Complex64::new(-0.15, 2.0));
        assert_eq!(ev("i*i", z), Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn functions_and_bare_forms() {
        let z = Complex64::new(0.3, -0.2);
        assert_eq!(ev("conj", z), z.conj());
        assert_eq!(ev("conj(z)", z), z.conj());
        assert!((ev("exp", z) - z.exp()).norm() < 1e-15);
        assert!((ev("exp(2*z) - 1", z) - ((2.0 * z).exp() - 1.0)).norm() < 1e-15);
        assert_eq!(ev("-i*T*2*ζ", z), 2.0 * z);
    }

    #[test]
    fn constants_and_errors() {
        assert_eq!(Expr::parse("-1").unwrap().constant_value(), Some(Complex64::new(-1.0, 0.0)));
        assert_eq!(Expr::parse("z").unwrap().constant_value(), None);
        for bad in ["", "1 +", "(z", "sin(z)", "z $ 2", "2 3"] {
            assert!(Expr::parse(bad).is_err(), "{bad}");
        }
    }
}
