//! Real-valued expressions in `z`, `zeta`, `eta`.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' '-'? integer)?
//! atom  := number | 'z' | 'zeta' | 'eta' | 'pi' | func '(' expr ')' | '(' expr ')'
//! func  := 'sqrt' | 'cos' | 'sin'
//! ```

use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Num(f64),
    Z,
    Zeta,
    Eta,
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Neg(Box<Node>),
    Powi(Box<Node>, i32),
    Sqrt(Box<Node>),
    Cos(Box<Node>),
    Sin(Box<Node>),
}

impl Node {
    pub fn eval(&self, z: f64, zeta: f64, eta: f64) -> f64 {
        match self {
            Node::Num(v) => *v,
            Node::Z => z,
            Node::Zeta => zeta,
            Node::Eta => eta,
            Node::Add(a, b) => a.eval(z, zeta, eta) + b.eval(z, zeta, eta),
            Node::Sub(a, b) => a.eval(z, zeta, eta) - b.eval(z, zeta, eta),
            Node::Mul(a, b) => a.eval(z, zeta, eta) * b.eval(z, zeta, eta),
            Node::Div(a, b) => a.eval(z, zeta, eta) / b.eval(z, zeta, eta),
            Node::Neg(a) => -a.eval(z, zeta, eta),
            Node::Powi(a, k) => a.eval(z, zeta, eta).powi(*k),
            Node::Sqrt(a) => a.eval(z, zeta, eta).sqrt(),
            Node::Cos(a) => a.eval(z, zeta, eta).cos(),
            Node::Sin(a) => a.eval(z, zeta, eta).sin(),
        }
    }

    /// Whether `z` occurs anywhere in the expression.
    pub fn uses_z(&self) -> bool {
        match self {
            Node::Z => true,
            Node::Num(_) | Node::Zeta | Node::Eta => false,
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                a.uses_z() || b.uses_z()
            }
            Node::Neg(a) | Node::Powi(a, _) | Node::Sqrt(a) | Node::Cos(a) | Node::Sin(a) => {
                a.uses_z()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at column {}: {}", self.position + 1, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
}

fn tokenize(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, ch) = chars[i];
        if ch.is_whitespace() {
            i += 1;
        } else if ch.is_ascii_digit() || ch == '.' {
            let start = i;
            while i < chars.len() && (chars[i].1.is_ascii_digit() || chars[i].1 == '.') {
                i += 1;
            }
            // exponent part, e.g. 1e-3
            if i < chars.len() && (chars[i].1 == 'e' || chars[i].1 == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j].1 == '+' || chars[j].1 == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].1.is_ascii_digit() {
                    while j < chars.len() && chars[j].1.is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let text: String = chars[start..i].iter().map(|c| c.1).collect();
            let v: f64 = text.parse().map_err(|_| ParseError {
                position: pos,
                message: format!("bad number '{text}'"),
            })?;
            out.push((pos, Tok::Num(v)));
        } else if ch.is_alphabetic() || ch == '_' {
            let start = i;
            while i < chars.len() && (chars[i].1.is_alphanumeric() || chars[i].1 == '_') {
                i += 1;
            }
            out.push((
                pos,
                Tok::Ident(chars[start..i].iter().map(|c| c.1).collect()),
            ));
        } else if "+-*/^()·".contains(ch) {
            out.push((pos, Tok::Op(if ch == '·' { '*' } else { ch })));
            i += 1;
        } else {
            return Err(ParseError {
                position: pos,
                message: format!("unexpected character '{ch}'"),
            });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.1)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map(|t| t.0).unwrap_or(self.end)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            position: self.pos(),
            message: message.into(),
        })
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Node::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Node::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Node::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Node::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Node, ParseError> {
        if self.eat('-') {
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node, ParseError> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let negative = self.eat('-');
        match self.peek() {
            Some(&Tok::Num(v)) if v.fract() == 0.0 && v.abs() <= i32::MAX as f64 => {
                self.at += 1;
                let k = v as i32;
                Ok(Node::Powi(Box::new(base), if negative { -k } else { k }))
            }
            _ => self.err("exponent must be an integer literal (use sqrt for half powers)"),
        }
    }

    fn atom(&mut self) -> Result<Node, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Num(v)) => {
                self.at += 1;
                Ok(Node::Num(v))
            }
            Some(Tok::Op('(')) => {
                self.at += 1;
                let inner = self.expr()?;
                if !self.eat(')') {
                    return self.err("expected ')'");
                }
                Ok(inner)
            }
            Some(Tok::Ident(name)) => {
                self.at += 1;
                match name.as_str() {
                    "z" => Ok(Node::Z),
                    "zeta" | "ζ" => Ok(Node::Zeta),
                    "eta" | "η" => Ok(Node::Eta),
                    "pi" | "π" => Ok(Node::Num(std::f64::consts::PI)),
                    "sqrt" | "cos" | "sin" => {
                        if !self.eat('(') {
                            return self.err(format!("expected '(' after {name}"));
                        }
                        let arg = Box::new(self.expr()?);
                        if !self.eat(')') {
                            return self.err("expected ')'");
                        }
                        Ok(match name.as_str() {
                            "sqrt" => Node::Sqrt(arg),
                            "cos" => Node::Cos(arg),
                            _ => Node::Sin(arg),
                        })
                    }
                    other => {
                        self.at -= 1;
                        self.err(format!(
                            "unknown identifier '{other}' (variables: z, zeta, eta)"
                        ))
                    }
                }
            }
            Some(Tok::Op(c)) => self.err(format!("unexpected '{c}'")),
            None => self.err("unexpected end of expression"),
        }
    }
}

pub fn parse(src: &str) -> Result<Node, ParseError> {
    let toks = tokenize(src)?;
    let mut p = Parser {
        toks,
        at: 0,
        end: src.len(),
    };
    let node = p.expr()?;
    if p.at != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(node)
}
