//! Subspaces of `ℂⁿ`: spans, intersections, principal-angle gaps and the
//! pairing-orthogonal of a subspace of `V ⊕ V*`.

use cdirac::subspace::{ComplexSubspace, RealSubspace, DEFAULT_TOL};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let plane = RealSubspace::span(
        &[DVector::from_vec(vec![1.0, 0.0, 0.0]), DVector::from_vec(vec![0.0, 1.0, 1.0])],
        3,
        DEFAULT_TOL,
    )?;
    let other = RealSubspace::span(
        &[DVector::from_vec(vec![0.0, 1.0, 0.0]), DVector::from_vec(vec![0.0, 0.0, 1.0])],
        3,
        DEFAULT_TOL,
    )?;
    let meet = plane.intersect(&other)?;
    println!("dim plane ∩ other = {}", meet.dim());
    println!("dim plane + other = {}", plane.sum(&other)?.dim());
    println!("gap(plane, other) = {:.6}", plane.gap(&other)?);

    // T01 ⊕ T*10 in V ⊕ V* for V = ℝ², as a complex subspace of ℂ⁴.
    let i = Complex64::new(0.0, 1.0);
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let lj = ComplexSubspace::from_columns(
        &DMatrix::from_row_slice(4, 2, &[one, zero, i, zero, zero, one, zero, i]),
        DEFAULT_TOL,
    );
    println!("isotropy residual of L_J = {:.3e}", lj.isotropy_residual());
    println!("L_J is its own pairing-orthogonal: gap = {:.3e}", lj.gap(&lj.perp_pairing()?)?);
    println!("dim L_J ∩ conj(L_J) = {}", lj.intersect(&lj.conjugate())?.dim());
    Ok(())
}
