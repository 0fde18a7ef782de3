//! B-transforms, products and backward/forward images of linear complex
//! Dirac structures.

use cdirac::dirac::{canonical_complex_structure, canonical_two_form, DiracPoint};
use nalgebra::DMatrix;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let symp = DiracPoint::from_presymplectic(&canonical_two_form(1, 0))?;
    let cplx = DiracPoint::from_complex_structure(&canonical_complex_structure(1))?;

    let b = DMatrix::from_row_slice(2, 2, &[0.0, 0.7, -0.7, 0.0]);
    let moved = symp.b_transform_real(&b)?;
    println!("e^B L_iω: {} (gap to L_iω {:.3})", moved.invariants().triple(), moved.gap(&symp));

    let product = symp.product(&cplx);
    println!("L_iω × L_J on ℝ⁴: {}", product.invariants().triple());

    // Pull back along the line t ↦ (t, 0, 0, 0) and along a plane.
    let line = DMatrix::from_column_slice(4, 1, &[1.0, 0.0, 0.0, 0.0]);
    let plane = DMatrix::from_column_slice(4, 2, &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
    println!("backward image to a line: {}", product.backward_image(&line)?.invariants().triple());
    println!("backward image to a plane: {}", product.backward_image(&plane)?.invariants().triple());

    // Push forward along the projection ℝ⁴ → ℝ² onto the complex factor.
    let proj = DMatrix::from_row_slice(2, 4, &[0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
    match product.forward_image(&proj) {
        Ok(img) => println!("forward image onto the complex factor: {}", img.invariants().triple()),
        Err(e) => println!("forward image rejected: {e}"),
    }
    Ok(())
}
