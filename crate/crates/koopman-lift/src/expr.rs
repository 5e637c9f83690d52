//! Closed-form scalar expressions in the state variables, used for the
//! input map `g(x)` and for the symbolic input matrix built from it.
//!
//! The grammar is deliberately small: constants, state variables,
//! sums, products, nonnegative integer powers, and `sin`/`cos`/`exp`.

use std::fmt;

use thiserror::Error;

#[derive(Clone, Debug, PartialEq)]
pub enum InputExpr {
    Const(f64),
    /// State variable by 0-based index; renders as `x1`, `x2`, ...
    Var(usize),
    Sum(Vec<InputExpr>),
    Prod(Vec<InputExpr>),
    Pow(Box<InputExpr>, u32),
    Sin(Box<InputExpr>),
    Cos(Box<InputExpr>),
    Exp(Box<InputExpr>),
}

/// Syntax error in an expression string; `col` is 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("col {col}: {message}")]
pub struct ExprError {
    pub col: usize,
    pub message: String,
}

impl InputExpr {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            InputExpr::Const(c) => *c,
            InputExpr::Var(i) => x[*i],
            InputExpr::Sum(ts) => ts.iter().map(|t| t.eval(x)).sum(),
            InputExpr::Prod(fs) => fs.iter().map(|f| f.eval(x)).product(),
            InputExpr::Pow(b, k) => b.eval(x).powi(*k as i32),
            InputExpr::Sin(e) => e.eval(x).sin(),
            InputExpr::Cos(e) => e.eval(x).cos(),
            InputExpr::Exp(e) => e.eval(x).exp(),
        }
    }

    /// Largest variable index referenced, if any.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            InputExpr::Const(_) => None,
            InputExpr::Var(i) => Some(*i),
            InputExpr::Sum(es) | InputExpr::Prod(es) => {
                es.iter().filter_map(InputExpr::max_var).max()
            }
            InputExpr::Pow(e, _) | InputExpr::Sin(e) | InputExpr::Cos(e) | InputExpr::Exp(e) => {
                e.max_var()
            }
        }
    }

    /// Canonical form: constants folded, nested sums and products
    /// flattened, repeated variable factors merged into powers. Purely
    /// structural; evaluation is unchanged.
    pub fn simplify(self) -> InputExpr {
        match self {
            InputExpr::Const(c) => InputExpr::Const(c),
            InputExpr::Var(i) => InputExpr::Var(i),
            InputExpr::Sum(terms) => {
                let mut flat = Vec::new();
                let mut constant = 0.0;
                for term in terms {
                    match term.simplify() {
                        InputExpr::Const(c) => constant += c,
                        InputExpr::Sum(inner) => {
                            for e in inner {
                                match e {
                                    InputExpr::Const(c) => constant += c,
                                    other => flat.push(other),
                                }
                            }
                        }
                        other => flat.push(other),
                    }
                }
                if constant != 0.0 {
                    flat.push(InputExpr::Const(constant));
                }
                match flat.len() {
                    0 => InputExpr::Const(0.0),
                    1 => flat.pop().unwrap(),
                    _ => InputExpr::Sum(flat),
                }
            }
            InputExpr::Prod(factors) => {
                let mut simplified = Vec::new();
                for f in factors {
                    match f.simplify() {
                        InputExpr::Prod(inner) => simplified.extend(inner),
                        other => simplified.push(other),
                    }
                }
                simplify_product(simplified)
            }
            InputExpr::Pow(base, k) => {
                let base = base.simplify();
                match (base, k) {
                    (_, 0) => InputExpr::Const(1.0),
                    (b, 1) => b,
                    (InputExpr::Const(c), k) => InputExpr::Const(c.powi(k as i32)),
                    (InputExpr::Pow(inner, j), k) => InputExpr::Pow(inner, j * k),
                    (InputExpr::Prod(fs), k) => InputExpr::Prod(
                        fs.into_iter()
                            .map(|f| InputExpr::Pow(Box::new(f), k))
                            .collect(),
                    )
                    .simplify(),
                    (b, k) => InputExpr::Pow(Box::new(b), k),
                }
            }
            InputExpr::Sin(e) => match e.simplify() {
                InputExpr::Const(c) => InputExpr::Const(c.sin()),
                other => InputExpr::Sin(Box::new(other)),
            },
            InputExpr::Cos(e) => match e.simplify() {
                InputExpr::Const(c) => InputExpr::Const(c.cos()),
                other => InputExpr::Cos(Box::new(other)),
            },
            InputExpr::Exp(e) => match e.simplify() {
                InputExpr::Const(c) => InputExpr::Const(c.exp()),
                other => InputExpr::Exp(Box::new(other)),
            },
        }
    }

    /// Parse an expression string. Subtraction and division by numeric
    /// constants are accepted and rewritten into the core forms.
    pub fn parse(src: &str) -> Result<InputExpr, ExprError> {
        let mut p = Parser {
            src: src.as_bytes(),
            text: src,
            pos: 0,
        };
        p.skip_ws();
        let expr = p.expr()?;
        p.skip_ws();
        if p.pos < p.src.len() {
            return Err(p.error(format!(
                "unexpected character '{}'",
                p.text[p.pos..].chars().next().unwrap()
            )));
        }
        Ok(expr)
    }
}

/// Flattened product factors -> canonical product.
fn simplify_product(factors: Vec<InputExpr>) -> InputExpr {
    use std::collections::BTreeMap;
    let mut coeff = 1.0f64;
    let mut var_pows: BTreeMap<usize, u32> = BTreeMap::new();
    let mut rest = Vec::new();
    for f in factors {
        match f {
            InputExpr::Const(c) => coeff *= c,
            InputExpr::Var(i) => *var_pows.entry(i).or_insert(0) += 1,
            InputExpr::Pow(b, k) => match *b {
                InputExpr::Var(i) => *var_pows.entry(i).or_insert(0) += k,
                other => rest.push(InputExpr::Pow(Box::new(other), k)),
            },
            other => rest.push(other),
        }
    }
    if coeff == 0.0 {
        return InputExpr::Const(0.0);
    }
    let mut out = Vec::new();
    if coeff != 1.0 {
        out.push(InputExpr::Const(coeff));
    }
    for (i, k) in var_pows {
        out.push(match k {
            0 => continue,
            1 => InputExpr::Var(i),
            k => InputExpr::Pow(Box::new(InputExpr::Var(i)), k),
        });
    }
    out.extend(rest);
    match out.len() {
        0 => InputExpr::Const(1.0),
        1 => out.pop().unwrap(),
        _ => InputExpr::Prod(out),
    }
}

struct Parser<'a> {
    src: &'a [u8],
    text: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn error(&self, message: impl Into<String>) -> ExprError {
        ExprError {
            col: self.text[..self.pos].chars().count() + 1,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<InputExpr, ExprError> {
        let mut terms = vec![self.term()?];
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    terms.push(self.term()?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    let t = self.term()?;
                    terms.push(InputExpr::Prod(vec![InputExpr::Const(-1.0), t]));
                }
                _ => break,
            }
        }
        Ok(if terms.len() == 1 {
            terms.pop().unwrap()
        } else {
            InputExpr::Sum(terms)
        })
    }

    fn term(&mut self) -> Result<InputExpr, ExprError> {
        let mut factors = vec![self.factor()?];
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    factors.push(self.factor()?);
                }
                Some(b'/') => {
                    self.pos += 1;
                    let at = self.pos;
                    let divisor = self.factor()?;
                    match divisor {
                        InputExpr::Const(c) if c != 0.0 => {
                            factors.push(InputExpr::Const(1.0 / c));
                        }
                        InputExpr::Const(_) => {
                            self.pos = at;
                            return Err(self.error("division by zero"));
                        }
                        _ => {
                            self.pos = at;
                            return Err(
                                self.error("division is only supported by numeric constants")
                            );
                        }
                    }
                }
                _ => break,
            }
        }
        Ok(if factors.len() == 1 {
            factors.pop().unwrap()
        } else {
            InputExpr::Prod(factors)
        })
    }

    fn factor(&mut self) -> Result<InputExpr, ExprError> {
        self.skip_ws();
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                let inner = self.factor()?;
                Ok(InputExpr::Prod(vec![InputExpr::Const(-1.0), inner]))
            }
            Some(b'+') => {
                self.pos += 1;
                self.factor()
            }
            _ => {
                let atom = self.atom()?;
                self.skip_ws();
                if self.peek() == Some(b'^') {
                    self.pos += 1;
                    let k = self.exponent()?;
                    Ok(InputExpr::Pow(Box::new(atom), k))
                } else {
                    Ok(atom)
                }
            }
        }
    }

    fn exponent(&mut self) -> Result<u32, ExprError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.error("exponent must be a nonnegative integer"));
        }
        self.text[start..self.pos]
            .parse::<u32>()
            .map_err(|_| self.error("exponent out of range"))
    }

    fn atom(&mut self) -> Result<InputExpr, ExprError> {
        self.skip_ws();
        match self.peek() {
            None => Err(self.error("unexpected end of expression")),
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.skip_ws();
                if self.peek() != Some(b')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.ident(),
            Some(c) => Err(self.error(format!("unexpected character '{}'", c as char))),
        }
    }

    fn number(&mut self) -> Result<InputExpr, ExprError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.peek() == Some(b'.') {
            self.pos += 1;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
        }
        if matches!(self.peek(), Some(b'e') | Some(b'E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.peek(), Some(b'+') | Some(b'-')) {
                self.pos += 1;
            }
            let digits = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if self.pos == digits {
                // not an exponent suffix after all (e.g. "2*exp(x1)")
                self.pos = mark;
            }
        }
        self.text[start..self.pos]
            .parse::<f64>()
            .map(InputExpr::Const)
            .map_err(|_| ExprError {
                col: self.text[..start].chars().count() + 1,
                message: format!("invalid number '{}'", &self.text[start..self.pos]),
            })
    }

    fn ident(&mut self) -> Result<InputExpr, ExprError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphabetic() {
            self.pos += 1;
        }
        let name = &self.text[start..self.pos];
        match name {
            "x" => {
                let digits = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                if self.pos == digits {
                    self.pos = start;
                    return Err(self.error("expected a state index after 'x'"));
                }
                let n: usize = self.text[digits..self.pos].parse().map_err(|_| ExprError {
                    col: self.text[..start].chars().count() + 1,
                    message: "state index out of range".to_string(),
                })?;
                if n == 0 {
                    self.pos = start;
                    return Err(self.error("state variables are numbered from x1"));
                }
                Ok(InputExpr::Var(n - 1))
            }
            "sin" | "cos" | "exp" => {
                self.skip_ws();
                if self.peek() != Some(b'(') {
                    return Err(self.error(format!("expected '(' after '{name}'")));
                }
                self.pos += 1;
                let inner = self.expr()?;
                self.skip_ws();
                if self.peek() != Some(b')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                let boxed = Box::new(inner);
                Ok(match name {
                    "sin" => InputExpr::Sin(boxed),
                    "cos" => InputExpr::Cos(boxed),
                    _ => InputExpr::Exp(boxed),
                })
            }
            _ => {
                self.pos = start;
                Err(self.error(format!("unknown identifier '{name}'")))
            }
        }
    }
}

// Precedence levels for rendering: sums < products < powers < atoms.
const PREC_SUM: u8 = 0;
const PREC_PROD: u8 = 1;
const PREC_POW: u8 = 2;

impl InputExpr {
    fn precedence(&self) -> u8 {
        match self {
            InputExpr::Sum(_) => PREC_SUM,
            InputExpr::Prod(_) => PREC_PROD,
            InputExpr::Pow(..) => PREC_POW,
            InputExpr::Const(c) if *c < 0.0 => PREC_SUM,
            _ => 3,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            write!(f, "(")?;
            self.fmt_prec(f, PREC_SUM)?;
            return write!(f, ")");
        }
        match self {
            InputExpr::Const(c) => write!(f, "{c}"),
            InputExpr::Var(i) => write!(f, "x{}", i + 1),
            InputExpr::Sum(terms) => {
                for (k, t) in terms.iter().enumerate() {
                    let (neg, inner) = t.strip_sign();
                    if k == 0 {
                        if neg {
                            write!(f, "-")?;
                        }
                    } else {
                        write!(f, " {} ", if neg { '-' } else { '+' })?;
                    }
                    inner.fmt_prec(f, PREC_PROD)?;
                }
                Ok(())
            }
            InputExpr::Prod(factors) => {
                let (neg, inner) = self.strip_sign();
                if neg {
                    write!(f, "-")?;
                    return inner.fmt_prec(f, PREC_PROD);
                }
                for (k, x) in factors.iter().enumerate() {
                    if k > 0 {
                        write!(f, "*")?;
                    }
                    x.fmt_prec(f, PREC_POW)?;
                }
                Ok(())
            }
            InputExpr::Pow(b, k) => {
                b.fmt_prec(f, 3)?;
                write!(f, "^{k}")
            }
            InputExpr::Sin(e) => {
                write!(f, "sin(")?;
                e.fmt_prec(f, PREC_SUM)?;
                write!(f, ")")
            }
            InputExpr::Cos(e) => {
                write!(f, "cos(")?;
                e.fmt_prec(f, PREC_SUM)?;
                write!(f, ")")
            }
            InputExpr::Exp(e) => {
                write!(f, "exp(")?;
                e.fmt_prec(f, PREC_SUM)?;
                write!(f, ")")
            }
        }
    }

    /// Split a leading minus sign off a term for sum rendering.
    fn strip_sign(&self) -> (bool, std::borrow::Cow<'_, InputExpr>) {
        use std::borrow::Cow;
        match self {
            InputExpr::Const(c) if *c < 0.0 => (true, Cow::Owned(InputExpr::Const(-c))),
            InputExpr::Prod(fs) => {
                if let Some(InputExpr::Const(c)) = fs.first() {
                    if *c < 0.0 {
                        let mut fs = fs.clone();
                        if *c == -1.0 && fs.len() > 1 {
                            fs.remove(0);
                        } else {
                            fs[0] = InputExpr::Const(-*c);
                        }
                        let inner = if fs.len() == 1 {
                            fs.pop().unwrap()
                        } else {
                            InputExpr::Prod(fs)
                        };
                        return (true, Cow::Owned(inner));
                    }
                }
                (false, Cow::Borrowed(self))
            }
            _ => (false, Cow::Borrowed(self)),
        }
    }
}

impl fmt::Display for InputExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, PREC_SUM)
    }
}
