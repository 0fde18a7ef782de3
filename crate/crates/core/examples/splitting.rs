//! A split instance `e^B (L_cr × L_{iω})` and recovery of its factors by
//! backward images.

use cdirac::classify::splitting_verify;
use cdirac::dirac::{canonical_cr, canonical_two_form, DiracPoint};
use cdirac::subspace::DEFAULT_TOL;
use nalgebra::DMatrix;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let l_cr = DiracPoint::from_cr(&canonical_cr(1, 1, DEFAULT_TOL))?;
    let omega = canonical_two_form(1, 1);
    let b = DMatrix::from_fn(6, 6, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Less => 0.1 * (i + 2 * j) as f64,
        std::cmp::Ordering::Greater => -0.1 * (j + 2 * i) as f64,
        std::cmp::Ordering::Equal => 0.0,
    });
    let rep = splitting_verify(&l_cr, &omega, &b)?;
    println!("product invariants      {}", rep.product);
    println!("CR factor               {}", rep.cr_factor);
    println!("presymplectic factor    {}", rep.symplectic_factor);
    println!("recovered first factor  {} (gap {:.2e})", rep.recovered, rep.factor_gap);
    println!("recovered second factor gap {:.2e}", rep.symplectic_gap);
    println!("dim ker ω = {}, additive = {}", rep.kernel_rank, rep.additive);
    println!("passed: {}", rep.passed());
    Ok(())
}
