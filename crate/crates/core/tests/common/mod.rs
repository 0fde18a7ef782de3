//! Helpers shared by the integration tests: an independent reference
//! evaluator for the expression language and a random expression generator.

#![allow(dead_code)]

use num_complex::Complex64;
use rand::Rng;

pub const COORDS: [&str; 3] = ["x", "y", "z"];

pub fn coords() -> Vec<String> {
    COORDS.iter().map(|s| s.to_string()).collect()
}

/// Reference expression tree, built and evaluated without the library.
#[derive(Debug, Clone)]
pub enum Tree {
    Num(f64),
    I,
    Var(usize),
    Neg(Box<Tree>),
    Add(Box<Tree>, Box<Tree>),
    Sub(Box<Tree>, Box<Tree>),
    Mul(Box<Tree>, Box<Tree>),
    Div(Box<Tree>, Box<Tree>),
    /// Base raised to a small non-negative integer.
    IntPow(Box<Tree>, u32),
    /// Base raised to a positive non-integer constant.
    RealPow(Box<Tree>, f64),
    Call(&'static str, Box<Tree>),
}

pub const FUNCS: [&str; 10] = ["sin", "cos", "tan", "exp", "log", "sqrt", "abs", "re", "im", "conj"];

pub fn random_tree<R: Rng>(rng: &mut R, depth: u32) -> Tree {
    if depth == 0 || rng.gen_bool(0.2) {
        return match rng.gen_range(0..4) {
            0 => Tree::Num((rng.gen_range(0.0..3.0f64) * 1000.0).round() / 1000.0),
            1 => Tree::I,
            _ => Tree::Var(rng.gen_range(0..3)),
        };
    }
    let sub = |rng: &mut R| Box::new(random_tree(rng, depth - 1));
    match rng.gen_range(0..9) {
        0 => Tree::Neg(sub(rng)),
        1 => Tree::Add(sub(rng), sub(rng)),
        2 => Tree::Sub(sub(rng), sub(rng)),
        3 => Tree::Mul(sub(rng), sub(rng)),
        4 => Tree::Div(sub(rng), sub(rng)),
        5 => Tree::IntPow(sub(rng), rng.gen_range(0..4)),
        6 => Tree::RealPow(sub(rng), 0.25 + (rng.gen_range(0.0..2.0f64) * 100.0).round() / 100.0 + 0.005),
        _ => Tree::Call(FUNCS[rng.gen_range(0..FUNCS.len())], sub(rng)),
    }
}

/// Fully parenthesized text.
pub fn render(t: &Tree) -> String {
    match t {
        Tree::Num(v) => format!("{v:?}"),
        Tree::I => "i".into(),
        Tree::Var(k) => COORDS[*k].into(),
        Tree::Neg(a) => format!("(-{})", render(a)),
        Tree::Add(a, b) => format!("({} + {})", render(a), render(b)),
        Tree::Sub(a, b) => format!("({} - {})", render(a), render(b)),
        Tree::Mul(a, b) => format!("({} * {})", render(a), render(b)),
        Tree::Div(a, b) => format!("({} / {})", render(a), render(b)),
        Tree::IntPow(a, n) => format!("({}^{n})", render(a)),
        Tree::RealPow(a, p) => format!("({}^{p:?})", render(a)),
        Tree::Call(f, a) => format!("{f}({})", render(a)),
    }
}

/// Principal logarithm from `ln|z| + i atan2(im, re)`, with `-0` imaginary
/// parts read as `+0`.
fn principal_log(z: Complex64) -> Complex64 {
    let im = if z.im == 0.0 { 0.0 } else { z.im };
    Complex64::new(z.norm().ln(), im.atan2(z.re))
}

fn cexp(z: Complex64) -> Complex64 {
    let r = z.re.exp();
    Complex64::new(r * z.im.cos(), r * z.im.sin())
}

/// Reference value, or `None` where the language reports a domain error.
pub fn reference(t: &Tree, p: &[f64]) -> Option<Complex64> {
    let zero = Complex64::new(0.0, 0.0);
    let v = match t {
        Tree::Num(v) => Complex64::new(*v, 0.0),
        Tree::I => Complex64::new(0.0, 1.0),
        Tree::Var(k) => Complex64::new(p[*k], 0.0),
        Tree::Neg(a) => -reference(a, p)?,
        Tree::Add(a, b) => reference(a, p)? + reference(b, p)?,
        Tree::Sub(a, b) => reference(a, p)? - reference(b, p)?,
        Tree::Mul(a, b) => reference(a, p)? * reference(b, p)?,
        Tree::Div(a, b) => {
            let (x, y) = (reference(a, p)?, reference(b, p)?);
            if y == zero {
                return None;
            }
            x / y
        }
        Tree::IntPow(a, n) => {
            let x = reference(a, p)?;
            match n {
                0 => Complex64::new(1.0, 0.0),
                1 => x,
                2 => x * x,
                _ => x * (x * x),
            }
        }
        Tree::RealPow(a, e) => {
            let x = reference(a, p)?;
            if x == zero {
                zero
            } else {
                cexp(principal_log(x) * *e)
            }
        }
        Tree::Call(f, a) => {
            let x = reference(a, p)?;
            match *f {
                "sin" => Complex64::new(x.re.sin() * x.im.cosh(), x.re.cos() * x.im.sinh()),
                "cos" => Complex64::new(x.re.cos() * x.im.cosh(), -x.re.sin() * x.im.sinh()),
                "tan" => x.tan(),
                "exp" => cexp(x),
                "log" => {
                    if x == zero {
                        return None;
                    }
                    principal_log(x)
                }
                "sqrt" => {
                    if x == zero {
                        zero
                    } else {
                        cexp(principal_log(x) * 0.5)
                    }
                }
                "abs" => Complex64::new(x.re.hypot(x.im), 0.0),
                "re" => Complex64::new(x.re, 0.0),
                "im" => Complex64::new(x.im, 0.0),
                "conj" => x.conj(),
                other => panic!("unknown function {other}"),
            }
        }
    };
    (v.re.is_finite() && v.im.is_finite()).then_some(v)
}

/// `|a − b| / max(|b|, 1)`: relative for values of size at least one,
/// absolute below (e.g. `re(sqrt(-4))`, which is `0` or `1e-16` depending on
/// the square-root algorithm).
pub fn scaled_error(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1.0)
}

/// Golden `(text, byte offset)` pairs for malformed inputs.
pub const GOLDEN_ERRORS: [(&str, usize); 10] = [
    ("i*(w)", 3),
    ("2x", 1),
    ("x (y)", 2),
    ("x +", 3),
    ("(x", 2),
    ("sin x", 4),
    ("x $ y", 2),
    ("", 0),
    ("1e", 2),
    ("exp(x))", 6),
];
