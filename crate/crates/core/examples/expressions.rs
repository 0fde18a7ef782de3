//! Parsing and evaluating complex-valued coordinate expressions.

use cdirac::exprdsl::parse;

fn main() {
    let coords = vec!["x".to_string(), "y".to_string()];
    for text in ["exp(y) + i*x", "sqrt(x - 4)", "(1 + i)^2 * cos(x*y)", "log(-x)", "2x", "sin x"] {
        match parse(text, &coords) {
            Ok(expr) => match expr.eval(&[1.0, 0.5]) {
                Ok(v) => println!("{text:<22} -> {:<24} = {v}", expr.to_string()),
                Err(e) => println!("{text:<22} -> {:<24} : {e}", expr.to_string()),
            },
            Err(e) => println!("{text:<22} parse error: {e}"),
        }
    }
}
