//! A small expression language for immersion components, coefficient
//! functions and expected closed forms.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' '-'? integer)?
//! primary := number | xN | func '(' expr ')' | '(' expr ')'
//! func    := sin | cos | sqrt | abs | sec | arccos
//! ```

use std::fmt;

use slant_core::numkit::{MapFn, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Sqrt,
    Abs,
    Sec,
    Arccos,
}

impl Func {
    pub const ALL: [Func; 6] = [
        Func::Sin,
        Func::Cos,
        Func::Sqrt,
        Func::Abs,
        Func::Sec,
        Func::Arccos,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Sec => "sec",
            Func::Arccos => "arccos",
        }
    }

    fn from_name(s: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == s)
    }

    fn apply<T: Real>(self, x: T) -> T {
        match self {
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Sqrt => x.sqrt(),
            Func::Abs => x.abs(),
            Func::Sec => x.sec(),
            Func::Arccos => x.acos(),
        }
    }
}

/// Parsed expression. Literals are non-negative; a leading minus is [`Expr::Neg`].
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    /// Zero-based parameter index; printed as `x{i+1}`.
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Call(Func, Box<Expr>),
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at offset {offset}: expected {expected}, found {found}")]
    Syntax {
        offset: usize,
        expected: String,
        found: String,
    },
    #[error("unknown symbol '{symbol}' at offset {offset}; valid parameters: {valid}")]
    UnknownSymbol {
        offset: usize,
        symbol: String,
        valid: String,
    },
    #[error("empty expression")]
    Empty,
}

impl ParseError {
    pub fn offset(&self) -> Option<usize> {
        match self {
            ParseError::Syntax { offset, .. } | ParseError::UnknownSymbol { offset, .. } => {
                Some(*offset)
            }
            ParseError::Empty => None,
        }
    }
}

impl Expr {
    pub fn eval<T: Real>(&self, x: &[T]) -> T {
        match self {
            Expr::Num(v) => T::constant(*v),
            Expr::Var(i) => x[*i].clone(),
            Expr::Neg(a) => -a.eval(x),
            Expr::Add(a, b) => a.eval(x) + b.eval(x),
            Expr::Sub(a, b) => a.eval(x) - b.eval(x),
            Expr::Mul(a, b) => a.eval(x) * b.eval(x),
            Expr::Div(a, b) => a.eval(x) / b.eval(x),
            Expr::Pow(a, n) => a.eval(x).powi(*n),
            Expr::Call(f, a) => f.apply(a.eval(x)),
        }
    }

    /// One more than the largest parameter index used, or 0.
    pub fn arity(&self) -> usize {
        match self {
            Expr::Num(_) => 0,
            Expr::Var(i) => i + 1,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.arity(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.arity().max(b.arity())
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            _ => 5,
        }
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, e: &Expr, min: u8) -> fmt::Result {
    if e.precedence() < min {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Var(i) => write!(f, "x{}", i + 1),
            Expr::Neg(a) => {
                f.write_str("-")?;
                write_operand(f, a, 3)
            }
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                write_operand(f, a, 1)?;
                f.write_str(if matches!(self, Expr::Add(..)) {
                    " + "
                } else {
                    " - "
                })?;
                write_operand(f, b, 2)
            }
            Expr::Mul(a, b) | Expr::Div(a, b) => {
                write_operand(f, a, 2)?;
                f.write_str(if matches!(self, Expr::Mul(..)) {
                    "*"
                } else {
                    "/"
                })?;
                write_operand(f, b, 3)
            }
            Expr::Pow(a, n) => {
                write_operand(f, a, 5)?;
                write!(f, "^{n}")
            }
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("'{s}'"),
            Tok::Op(c) => format!("'{c}'"),
            Tok::End => "end of input".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == b'.' {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i < bytes.len() && bytes[i] == b'.' {
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
            let s = &text[start..i];
            let v: f64 = s.parse().map_err(|_| ParseError::Syntax {
                offset: start,
                expected: "number".into(),
                found: format!("'{s}'"),
            })?;
            out.push((start, Tok::Num(v)));
        } else if c.is_ascii_alphabetic() || c == b'_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(text[start..i].to_string())));
        } else if b"+-*/^()".contains(&c) {
            out.push((i, Tok::Op(c as char)));
            i += 1;
        } else {
            let ch = text[i..].chars().next().expect("in bounds");
            return Err(ParseError::Syntax {
                offset: i,
                expected: "expression".into(),
                found: format!("'{ch}'"),
            });
        }
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    params: Option<usize>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> ParseError {
        ParseError::Syntax {
            offset: self.offset(),
            expected: expected.into(),
            found: self.peek().describe(),
        }
    }

    fn expect(&mut self, op: char) -> Result<(), ParseError> {
        if *self.peek() == Tok::Op(op) {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&format!("'{op}'")))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Op('+') => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Op('-') => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Op('*') => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Op('/') => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Op('-') {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if *self.peek() != Tok::Op('^') {
            return Ok(base);
        }
        self.bump();
        let negative = if *self.peek() == Tok::Op('-') {
            self.bump();
            true
        } else {
            false
        };
        let offset = self.offset();
        match self.bump() {
            Tok::Num(v) if v.fract() == 0.0 && v <= i32::MAX as f64 => {
                let n = v as i32;
                Ok(Expr::Pow(Box::new(base), if negative { -n } else { n }))
            }
            other => Err(ParseError::Syntax {
                offset,
                expected: "integer exponent".into(),
                found: other.describe(),
            }),
        }
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let offset = self.offset();
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(Expr::Num(v))
            }
            Tok::Op('(') => {
                self.bump();
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump();
                if let Some(func) = Func::from_name(&name) {
                    self.expect('(')?;
                    let arg = self.expr()?;
                    self.expect(')')?;
                    return Ok(Expr::Call(func, Box::new(arg)));
                }
                match variable_index(&name) {
                    Some(i) if self.params.is_none_or(|k| i < k) => Ok(Expr::Var(i)),
                    _ => Err(ParseError::UnknownSymbol {
                        offset,
                        symbol: name,
                        valid: self.valid_names(),
                    }),
                }
            }
            _ => Err(self.error("expression")),
        }
    }

    fn valid_names(&self) -> String {
        match self.params {
            Some(0) => "none".into(),
            Some(k) => (1..=k)
                .map(|i| format!("x{i}"))
                .collect::<Vec<_>>()
                .join(", "),
            None => "x1, x2, …".into(),
        }
    }
}

fn variable_index(name: &str) -> Option<usize> {
    let digits = name.strip_prefix('x')?;
    if digits.is_empty() || digits.starts_with('0') || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse::<usize>().ok().map(|i| i - 1)
}

fn parse_with(text: &str, params: Option<usize>) -> Result<Expr, ParseError> {
    if text.trim().is_empty() {
        return Err(ParseError::Empty);
    }
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        params,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.error("operator or end of input"));
    }
    Ok(e)
}

/// Parses `text`, accepting any parameter `x1, x2, …`.
pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    parse_with(text, None)
}

/// Parses `text` over the parameters `x1..x{params}`.
pub fn parse_expr_in(text: &str, params: usize) -> Result<Expr, ParseError> {
    parse_with(text, Some(params))
}

/// Vector-valued map `ℝᵏ → ℝᵐ` with one expression per component.
#[derive(Clone, Debug)]
pub struct ExprMap {
    dim_in: usize,
    components: Vec<Expr>,
}

impl ExprMap {
    /// Panics if a component uses a parameter beyond `dim_in`.
    pub fn new(dim_in: usize, components: Vec<Expr>) -> Self {
        assert!(components.iter().all(|e| e.arity() <= dim_in));
        Self { dim_in, components }
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }
}

impl MapFn for ExprMap {
    fn dim_in(&self) -> usize {
        self.dim_in
    }
    fn dim_out(&self) -> usize {
        self.components.len()
    }
    fn call<T: Real>(&self, x: &[T]) -> Vec<T> {
        self.components.iter().map(|e| e.eval(x)).collect()
    }
}
