//! A small complex-valued expression language for frame sections.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' unary)?
//! atom  := number | 'i' | ident | ident '(' expr ')' | '(' expr ')'
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus, so `-x^2`
//! is `-(x^2)` and `2^-1` is `0.5`.

use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Abs,
    Re,
    Im,
    Conj,
}

impl Func {
    pub const ALL: [Func; 10] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Exp,
        Func::Log,
        Func::Sqrt,
        Func::Abs,
        Func::Re,
        Func::Im,
        Func::Conj,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Re => "re",
            Func::Im => "im",
            Func::Conj => "conj",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
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

/// Parsed expression. Variables carry the index of their coordinate.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    I,
    Var { name: String, slot: usize },
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {position}: expected {}", expected.join(" or "))]
    Syntax {
        position: usize,
        expected: Vec<String>,
    },
    #[error("unknown identifier `{name}` at byte {position}")]
    UnknownIdentifier { position: usize, name: String },
    #[error("`{name}` cannot be used as a coordinate name")]
    ReservedCoordinate { name: String },
}

impl ParseError {
    pub fn position(&self) -> Option<usize> {
        match self {
            ParseError::Syntax { position, .. } | ParseError::UnknownIdentifier { position, .. } => {
                Some(*position)
            }
            ParseError::ReservedCoordinate { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{what} at point {point:?}")]
pub struct DomainError {
    pub what: String,
    pub point: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
    End,
}

struct Lexer<'a> {
    src: &'a str,
    toks: Vec<(Tok, usize)>,
}

impl<'a> Lexer<'a> {
    fn run(src: &'a str) -> Result<Vec<(Tok, usize)>, ParseError> {
        let mut lx = Lexer {
            src,
            toks: Vec::new(),
        };
        let bytes = src.as_bytes();
        let mut pos = 0;
        while pos < bytes.len() {
            let c = bytes[pos];
            if c.is_ascii_whitespace() {
                pos += 1;
            } else if c.is_ascii_digit() || c == b'.' {
                pos = lx.number(pos)?;
            } else if c.is_ascii_alphabetic() || c == b'_' {
                let start = pos;
                while pos < bytes.len() && (bytes[pos].is_ascii_alphanumeric() || bytes[pos] == b'_') {
                    pos += 1;
                }
                lx.toks.push((Tok::Ident(src[start..pos].to_string()), start));
            } else if b"+-*/^()".contains(&c) {
                lx.toks.push((Tok::Sym(c as char), pos));
                pos += 1;
            } else {
                return Err(ParseError::Syntax {
                    position: pos,
                    expected: vec!["an expression character".into()],
                });
            }
        }
        lx.toks.push((Tok::End, src.len()));
        Ok(lx.toks)
    }

    fn number(&mut self, start: usize) -> Result<usize, ParseError> {
        let bytes = self.src.as_bytes();
        let mut pos = start;
        let digits = |pos: &mut usize| {
            let from = *pos;
            while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
                *pos += 1;
            }
            *pos - from
        };
        let mut mantissa = digits(&mut pos);
        if pos < bytes.len() && bytes[pos] == b'.' {
            pos += 1;
            mantissa += digits(&mut pos);
        }
        if mantissa == 0 {
            return Err(ParseError::Syntax {
                position: start,
                expected: vec!["a digit".into()],
            });
        }
        if pos < bytes.len() && (bytes[pos] == b'e' || bytes[pos] == b'E') {
            let mut q = pos + 1;
            if q < bytes.len() && (bytes[q] == b'+' || bytes[q] == b'-') {
                q += 1;
            }
            if digits(&mut q) == 0 {
                return Err(ParseError::Syntax {
                    position: q,
                    expected: vec!["exponent digits".into()],
                });
            }
            pos = q;
        }
        let value: f64 = self.src[start..pos].parse().map_err(|_| ParseError::Syntax {
            position: start,
            expected: vec!["a number".into()],
        })?;
        if !value.is_finite() {
            return Err(ParseError::Syntax {
                position: start,
                expected: vec!["a finite number".into()],
            });
        }
        self.toks.push((Tok::Num(value), start));
        Ok(pos)
    }
}

struct Parser<'c> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    coords: &'c [String],
}

const ATOM_START: [&str; 5] = ["a number", "`i`", "an identifier", "`(`", "`-`"];

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn fail<T>(&self, expected: &[&str]) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            position: self.pos(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        })
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = if self.eat('+') {
                BinOp::Add
            } else if self.eat('-') {
                BinOp::Sub
            } else {
                return Ok(lhs);
            };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.term()?));
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.eat('*') {
                BinOp::Mul
            } else if self.eat('/') {
                BinOp::Div
            } else {
                return Ok(lhs);
            };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.unary()?));
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat('-') {
            Ok(Expr::Neg(Box::new(self.unary()?)))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.eat('^') {
            Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(self.unary()?)))
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let position = self.pos();
        match self.peek().clone() {
            Tok::Num(v) => {
                self.at += 1;
                Ok(Expr::Num(v))
            }
            Tok::Ident(name) => {
                self.at += 1;
                if name == "i" {
                    return Ok(Expr::I);
                }
                if let Some(slot) = self.coords.iter().position(|c| *c == name) {
                    return Ok(Expr::Var { name, slot });
                }
                let Some(func) = Func::from_name(&name) else {
                    return Err(ParseError::UnknownIdentifier { position, name });
                };
                if !self.eat('(') {
                    return self.fail(&["`(`"]);
                }
                let arg = self.expr()?;
                if !self.eat(')') {
                    return self.fail(&["`)`", "an operator"]);
                }
                Ok(Expr::Call(func, Box::new(arg)))
            }
            Tok::Sym('(') => {
                self.at += 1;
                let inner = self.expr()?;
                if !self.eat(')') {
                    return self.fail(&["`)`", "an operator"]);
                }
                Ok(inner)
            }
            _ => self.fail(&ATOM_START),
        }
    }
}

/// Checks that a coordinate list can be used with [`parse`].
pub fn validate_coords(coords: &[String]) -> Result<(), ParseError> {
    for name in coords {
        let well_formed = name
            .chars()
            .next()
            .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
            && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
        if name == "i" || Func::from_name(name).is_some() || !well_formed {
            return Err(ParseError::ReservedCoordinate { name: name.clone() });
        }
    }
    Ok(())
}

pub fn parse(text: &str, coords: &[String]) -> Result<Expr, ParseError> {
    validate_coords(coords)?;
    let toks = Lexer::run(text)?;
    let mut p = Parser {
        toks,
        at: 0,
        coords,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.fail(&["an operator", "end of input"]);
    }
    Ok(e)
}

fn domain(what: &str, point: &[f64]) -> DomainError {
    DomainError {
        what: what.to_string(),
        point: point.to_vec(),
    }
}

/// Maps a signed-zero imaginary part to `+0` so the negative real axis takes
/// the principal branch (`arg = π`).
fn on_principal_side(z: Complex64) -> Complex64 {
    Complex64::new(z.re, z.im + 0.0)
}

fn integer_power(base: Complex64, n: i64, point: &[f64]) -> Result<Complex64, DomainError> {
    let mut acc = Complex64::new(1.0, 0.0);
    let mut sq = base;
    let mut e = n.unsigned_abs();
    while e > 0 {
        if e & 1 == 1 {
            acc *= sq;
        }
        sq *= sq;
        e >>= 1;
    }
    if n < 0 {
        if acc == Complex64::new(0.0, 0.0) {
            return Err(domain("division by zero in negative power", point));
        }
        acc = acc.inv();
    }
    Ok(acc)
}

impl Expr {
    /// Evaluates at `point`, indexed like the coordinate list given to [`parse`].
    pub fn eval(&self, point: &[f64]) -> Result<Complex64, DomainError> {
        let v = self.eval_raw(point)?;
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(domain("non-finite value", point))
        }
    }

    fn eval_raw(&self, point: &[f64]) -> Result<Complex64, DomainError> {
        Ok(match self {
            Expr::Num(v) => Complex64::new(*v, 0.0),
            Expr::I => Complex64::i(),
            Expr::Var { slot, .. } => Complex64::new(point[*slot], 0.0),
            Expr::Neg(a) => -a.eval_raw(point)?,
            Expr::Bin(op, a, b) => {
                let x = a.eval_raw(point)?;
                let y = b.eval_raw(point)?;
                match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul => x * y,
                    BinOp::Div => {
                        if y == Complex64::new(0.0, 0.0) {
                            return Err(domain("division by zero", point));
                        }
                        x / y
                    }
                    BinOp::Pow => {
                        if y.im == 0.0 && y.re.fract() == 0.0 && y.re.abs() <= 1e6 {
                            integer_power(x, y.re as i64, point)?
                        } else if x == Complex64::new(0.0, 0.0) {
                            if y.re > 0.0 {
                                x
                            } else {
                                return Err(domain("zero raised to a non-positive power", point));
                            }
                        } else {
                            (y * on_principal_side(x).ln()).exp()
                        }
                    }
                }
            }
            Expr::Call(f, a) => {
                let x = a.eval_raw(point)?;
                match f {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Tan => x.tan(),
                    Func::Exp => x.exp(),
                    Func::Log => {
                        if x == Complex64::new(0.0, 0.0) {
                            return Err(domain("log of zero", point));
                        }
                        on_principal_side(x).ln()
                    }
                    Func::Sqrt => on_principal_side(x).sqrt(),
                    Func::Abs => Complex64::new(x.norm(), 0.0),
                    Func::Re => Complex64::new(x.re, 0.0),
                    Func::Im => Complex64::new(x.im, 0.0),
                    Func::Conj => x.conj(),
                }
            }
        })
    }

    /// True when the expression contains no variables.
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Num(_) | Expr::I => true,
            Expr::Var { .. } => false,
            Expr::Neg(a) | Expr::Call(_, a) => a.is_constant(),
            Expr::Bin(_, a, b) => a.is_constant() && b.is_constant(),
        }
    }

    fn level(&self) -> u8 {
        match self {
            Expr::Bin(BinOp::Add | BinOp::Sub, ..) => 1,
            Expr::Bin(BinOp::Mul | BinOp::Div, ..) => 2,
            Expr::Neg(_) => 3,
            Expr::Bin(BinOp::Pow, ..) => 4,
            _ => 5,
        }
    }
}

fn write_at(f: &mut fmt::Formatter<'_>, e: &Expr, min_level: u8) -> fmt::Result {
    if e.level() < min_level {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v:?}"),
            Expr::I => write!(f, "i"),
            Expr::Var { name, .. } => write!(f, "{name}"),
            Expr::Neg(a) => {
                write!(f, "-")?;
                write_at(f, a, 3)
            }
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
            Expr::Bin(op, a, b) => {
                let (left, right) = match op {
                    BinOp::Add | BinOp::Sub => (1, 2),
                    BinOp::Mul | BinOp::Div => (2, 3),
                    BinOp::Pow => (5, 3),
                };
                write_at(f, a, left)?;
                match op {
                    BinOp::Pow => write!(f, "^")?,
                    _ => write!(f, " {} ", op.symbol())?,
                }
                write_at(f, b, right)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xyz() -> Vec<String> {
        ["x", "y", "z"].iter().map(|s| s.to_string()).collect()
    }

    fn val(text: &str, point: &[f64]) -> Complex64 {
        parse(text, &xyz()).unwrap().eval(point).unwrap()
    }

    #[test]
    fn call_of_variable() {
        let e = parse("exp(y)", &xyz()).unwrap();
        assert_eq!(
            e,
            Expr::Call(
                Func::Exp,
                Box::new(Expr::Var {
                    name: "y".into(),
                    slot: 1
                })
            )
        );
        assert!((e.eval(&[0.0, 1.0, 0.0]).unwrap().re - std::f64::consts::E).abs() < 1e-15);
    }

    #[test]
    fn minus_binds_looser_than_power() {
        let e = parse("-x^2", &xyz()).unwrap();
        assert!(matches!(e, Expr::Neg(ref inner) if matches!(**inner, Expr::Bin(BinOp::Pow, ..))));
        assert_eq!(e.eval(&[3.0, 0.0, 0.0]).unwrap(), Complex64::new(-9.0, 0.0));
    }

    #[test]
    fn power_is_right_associative() {
        assert_eq!(val("2^3^2", &[0.0; 3]), Complex64::new(512.0, 0.0));
        assert_eq!(val("2^-1", &[0.0; 3]), Complex64::new(0.5, 0.0));
    }

    #[test]
    fn subtraction_and_division_associate_left() {
        assert_eq!(val("8 - 4 - 2", &[0.0; 3]), Complex64::new(2.0, 0.0));
        assert_eq!(val("8/4/2", &[0.0; 3]), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn imaginary_unit_arithmetic() {
        assert_eq!(val("i*i", &[0.0; 3]), Complex64::new(-1.0, 0.0));
        assert_eq!(val("(1+i)^2", &[0.0; 3]), Complex64::new(0.0, 2.0));
        assert!((val("sqrt(-4)", &[0.0; 3]) - Complex64::new(0.0, 2.0)).norm() < 1e-15);
        assert_eq!(val("conj(2 + 3*i)", &[0.0; 3]), Complex64::new(2.0, -3.0));
        assert!((val("log(-1)", &[0.0; 3]) - Complex64::new(0.0, std::f64::consts::PI)).norm() < 1e-15);
        assert_eq!(val("abs(3 + 4*i)", &[0.0; 3]), Complex64::new(5.0, 0.0));
    }

    #[test]
    fn product_with_unit() {
        let e = parse("i*(y)", &xyz()).unwrap();
        assert_eq!(e.eval(&[0.0, 2.0, 0.0]).unwrap(), Complex64::new(0.0, 2.0));
    }

    #[test]
    fn unknown_identifier_position() {
        assert_eq!(
            parse("i*(w)", &xyz()).unwrap_err(),
            ParseError::UnknownIdentifier {
                position: 3,
                name: "w".into()
            }
        );
    }

    #[test]
    fn implicit_multiplication_is_rejected() {
        let err = parse("2x", &xyz()).unwrap_err();
        assert_eq!(err.position(), Some(1));
        assert_eq!(parse("x (y)", &xyz()).unwrap_err().position(), Some(2));
    }

    #[test]
    fn syntax_error_positions() {
        assert_eq!(parse("x +", &xyz()).unwrap_err().position(), Some(3));
        assert_eq!(parse("(x", &xyz()).unwrap_err().position(), Some(2));
        assert_eq!(parse("sin x", &xyz()).unwrap_err().position(), Some(4));
        assert_eq!(parse("x $ y", &xyz()).unwrap_err().position(), Some(2));
        assert_eq!(parse("", &xyz()).unwrap_err().position(), Some(0));
        assert_eq!(parse("1e", &xyz()).unwrap_err().position(), Some(2));
    }

    #[test]
    fn reserved_coordinates_are_rejected() {
        for bad in ["i", "exp", "2a", ""] {
            let coords = vec![bad.to_string()];
            assert!(matches!(
                parse("1", &coords),
                Err(ParseError::ReservedCoordinate { .. })
            ));
        }
    }

    #[test]
    fn domain_errors_carry_the_point() {
        let e = parse("log(x)", &xyz()).unwrap();
        let err = e.eval(&[0.0, 1.0, 2.0]).unwrap_err();
        assert_eq!(err.point, vec![0.0, 1.0, 2.0]);
        assert!(parse("1/(x - 1)", &xyz()).unwrap().eval(&[1.0, 0.0, 0.0]).is_err());
        assert!(parse("x^-1", &xyz()).unwrap().eval(&[0.0, 0.0, 0.0]).is_err());
        assert!(parse("x^0.5", &xyz()).unwrap().eval(&[0.0, 0.0, 0.0]).is_ok());
    }

    #[test]
    fn display_roundtrips() {
        for text in [
            "-x^2",
            "(-x)^2",
            "a - (b - c)",
            "2^3^2",
            "(2^3)^2",
            "x / (y * z)",
            "-(x + y)",
            "exp(i * y) * 1e-7",
            "x - -y",
            "2^-x^2",
        ] {
            let coords: Vec<String> = ["x", "y", "z", "a", "b", "c"].iter().map(|s| s.to_string()).collect();
            let e = parse(text, &coords).unwrap();
            let printed = e.to_string();
            assert_eq!(parse(&printed, &coords).unwrap(), e, "{text} -> {printed}");
        }
    }
}
