//! Arithmetic expressions in `x1..x3` for coefficient and data definitions.
//!
//! Grammar: `+ - * / ^`, unary minus, parentheses, numbers, `pi`, the
//! variables `x1`, `x2`, `x3` and the functions
//! `abs sqrt sin cos exp log`. `^` is right-associative.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
enum Func {
    Abs,
    Sqrt,
    Sin,
    Cos,
    Exp,
    Log,
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Num(f64),
    Var(usize),
    Neg(Box<Node>),
    Bin(char, Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

/// A parsed expression.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    root: Node,
    source: String,
    max_var: usize,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let cs: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let st = i;
            while i < cs.len() && (cs[i].is_ascii_digit() || cs[i] == '.') {
                i += 1;
            }
            if i < cs.len() && (cs[i] == 'e' || cs[i] == 'E') {
                let mut j = i + 1;
                if j < cs.len() && (cs[j] == '+' || cs[j] == '-') {
                    j += 1;
                }
                if j < cs.len() && cs[j].is_ascii_digit() {
                    i = j;
                    while i < cs.len() && cs[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let t: String = cs[st..i].iter().collect();
            out.push(Tok::Num(t.parse().map_err(|_| Error::Parse(format!("bad number '{t}'")))?));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let st = i;
            while i < cs.len() && (cs[i].is_ascii_alphanumeric() || cs[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(cs[st..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else if c == '\u{2212}' {
            out.push(Tok::Op('-'));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character '{c}' in expression")));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
    max_var: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Node::Bin('+', Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Node::Bin('-', Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Node::Bin('*', Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Node::Bin('/', Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Node> {
        if self.eat('-') {
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node> {
        let base = self.atom()?;
        if self.eat('^') {
            let exp = self.unary()?;
            return Ok(Node::Bin('^', Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node> {
        let tok = self.peek().cloned().ok_or_else(|| Error::Parse("unexpected end of expression".into()))?;
        self.pos += 1;
        match tok {
            Tok::Num(v) => Ok(Node::Num(v)),
            Tok::Op('(') => {
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(Error::Parse("missing ')'".into()));
                }
                Ok(e)
            }
            Tok::Ident(name) => {
                let func = match name.as_str() {
                    "pi" => return Ok(Node::Num(std::f64::consts::PI)),
                    "x1" | "x2" | "x3" => {
                        let k = name[1..].parse::<usize>().unwrap() - 1;
                        self.max_var = self.max_var.max(k + 1);
                        return Ok(Node::Var(k));
                    }
                    "abs" => Func::Abs,
                    "sqrt" => Func::Sqrt,
                    "sin" => Func::Sin,
                    "cos" => Func::Cos,
                    "exp" => Func::Exp,
                    "log" => Func::Log,
                    other => return Err(Error::Parse(format!("unknown identifier '{other}'"))),
                };
                if !self.eat('(') {
                    return Err(Error::Parse(format!("'{name}' must be followed by '('")));
                }
                let arg = self.expr()?;
                if !self.eat(')') {
                    return Err(Error::Parse("missing ')'".into()));
                }
                Ok(Node::Call(func, Box::new(arg)))
            }
            Tok::Op(c) => Err(Error::Parse(format!("unexpected '{c}'"))),
        }
    }
}

fn eval(node: &Node, x: &[f64]) -> f64 {
    match node {
        Node::Num(v) => *v,
        Node::Var(k) => x.get(*k).copied().unwrap_or(0.0),
        Node::Neg(a) => -eval(a, x),
        Node::Bin(op, a, b) => {
            let (a, b) = (eval(a, x), eval(b, x));
            match op {
                '+' => a + b,
                '-' => a - b,
                '*' => a * b,
                '/' => a / b,
                _ => {
                    if b == b.round() && b.abs() < 64.0 {
                        a.powi(b as i32)
                    } else {
                        a.powf(b)
                    }
                }
            }
        }
        Node::Call(f, a) => {
            let a = eval(a, x);
            match f {
                Func::Abs => a.abs(),
                Func::Sqrt => a.sqrt(),
                Func::Sin => a.sin(),
                Func::Cos => a.cos(),
                Func::Exp => a.exp(),
                Func::Log => a.ln(),
            }
        }
    }
}

impl Expr {
    pub fn parse(src: &str) -> Result<Self> {
        let toks = tokenize(src)?;
        if toks.is_empty() {
            return Err(Error::Parse("empty expression".into()));
        }
        let mut p = Parser { toks, pos: 0, max_var: 0 };
        let root = p.expr()?;
        if p.pos != p.toks.len() {
            return Err(Error::Parse(format!("trailing input in expression '{src}'")));
        }
        Ok(Self { root, source: src.trim().to_string(), max_var: p.max_var })
    }

    /// Evaluates at `x`; missing coordinates read as 0.
    pub fn eval(&self, x: &[f64]) -> f64 {
        eval(&self.root, x)
    }

    /// Number of leading variables referenced (`x3` counts as 3).
    pub fn dimension_used(&self) -> usize {
        self.max_var
    }

    /// Constant value if the expression has no variables.
    pub fn constant(&self) -> Option<f64> {
        (self.max_var == 0).then(|| self.eval(&[]))
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(s: &str, x: &[f64]) -> f64 {
        Expr::parse(s).unwrap().eval(x)
    }

    #[test]
    fn precedence_and_functions() {
        assert_eq!(ev("1+2*3", &[]), 7.0);
        assert_eq!(ev("-2^2", &[]), -4.0);
        assert_eq!(ev("2^3^2", &[]), 512.0);
        assert_eq!(ev("(1+x1)*x2", &[2.0, 3.0]), 9.0);
        assert!((ev("sin(pi/2)+cos(0)+exp(0)+log(1)", &[]) - 3.0).abs() < 1e-15);
        assert_eq!(ev("sqrt(abs(-4))", &[]), 2.0);
        assert_eq!(ev("1e-2*100", &[]), 1.0);
        assert_eq!(ev("-(1+0.2*x1)", &[0.0]), -1.0);
    }

    #[test]
    fn errors() {
        for bad in ["", "1+", "(1", "foo(2)", "x4", "2 $ 3", "sin 2", "1 2"] {
            assert!(Expr::parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn metadata() {
        let e = Expr::parse("x3 + 1").unwrap();
        assert_eq!(e.dimension_used(), 3);
        assert_eq!(Expr::parse("2*pi").unwrap().constant(), Some(2.0 * std::f64::consts::PI));
    }
}
