//! Lagrangian-level operations shared by real and complex structures.
//!
//! Every function works on a [`Subspace`] of `T²ᵐ` in (vector, covector)
//! coordinates; `T` is `f64` for real Dirac structures and `Complex64` for
//! complex ones.

use nalgebra::DMatrix;

use super::DiracError;
use crate::subspace::{lift, null_space, Field, Subspace};

/// Vector block (top `m` rows) of the basis.
pub(crate) fn vector_block<T: Field>(space: &Subspace<T>) -> DMatrix<T> {
    let m = space.ambient_dim() / 2;
    space.basis().rows(0, m).into_owned()
}

/// Covector block (bottom `m` rows) of the basis.
pub(crate) fn covector_block<T: Field>(space: &Subspace<T>) -> DMatrix<T> {
    let m = space.ambient_dim() / 2;
    space.basis().rows(m, m).into_owned()
}

fn stack<T: Field>(top: &DMatrix<T>, bottom: &DMatrix<T>) -> DMatrix<T> {
    let cols = top.ncols();
    let mut out = DMatrix::zeros(top.nrows() + bottom.nrows(), cols);
    out.view_mut((0, 0), (top.nrows(), cols)).copy_from(top);
    out.view_mut((top.nrows(), 0), (bottom.nrows(), cols))
        .copy_from(bottom);
    out
}

fn hcat<T: Field>(a: &DMatrix<T>, b: &DMatrix<T>) -> DMatrix<T> {
    let rows = a.nrows().max(b.nrows());
    let mut out = DMatrix::zeros(rows, a.ncols() + b.ncols());
    out.view_mut((0, 0), (a.nrows(), a.ncols())).copy_from(a);
    out.view_mut((0, a.ncols()), (b.nrows(), b.ncols()))
        .copy_from(b);
    out
}

/// Basis of `L(E, ε) = {X + ξ | X ∈ E, ξ|_E = ι_X ε}`.
///
/// `range` has orthonormal columns and `eps` is the form in that basis. The
/// covector `ι_{e_a} ε` is extended by zero on the Hermitian complement of
/// `E`, which gives `conj(E)·εᵀ`; the annihilator of `E` completes the span.
pub fn graph_basis<T: Field>(range: &DMatrix<T>, eps: &DMatrix<T>, tol: f64) -> DMatrix<T> {
    let m = range.nrows();
    let p = range.ncols();
    let covectors = range.map(|z| z.conjugate()) * eps.transpose();
    let graph = stack(range, &covectors);
    let (ann, _) = null_space(&range.transpose(), tol, 1.0);
    let ann_lifted = stack(&DMatrix::zeros(m, ann.ncols()), &ann);
    debug_assert_eq!(p + ann.ncols(), m);
    hcat(&graph, &ann_lifted)
}

/// `L(E, ε)` as an orthonormalized subspace.
pub fn graph_space<T: Field>(range: &Subspace<T>, eps: &DMatrix<T>) -> Subspace<T> {
    let basis = graph_basis(range.basis(), eps, range.tol());
    Subspace::from_columns_scaled(&basis, range.tol(), 1.0).0
}

/// `e^B L = {X + ξ + ι_X B}`; `ι_X B = Bᵀ X` in components.
pub fn b_transform<T: Field>(space: &Subspace<T>, b: &DMatrix<T>) -> Subspace<T> {
    let x = vector_block(space);
    let xi = covector_block(space) + b.transpose() * &x;
    Subspace::from_columns_scaled(&stack(&x, &xi), space.tol(), 1.0).0
}

/// Push-forward by a linear isomorphism `g` of `V`: `X ↦ gX`, `ξ ↦ g⁻ᵀξ`.
pub fn linear_automorphism<T: Field>(
    space: &Subspace<T>,
    g: &DMatrix<f64>,
) -> Result<Subspace<T>, DiracError> {
    let m = space.ambient_dim() / 2;
    if g.shape() != (m, m) {
        return Err(DiracError::MapShape {
            expected: (m, m),
            found: g.shape(),
        });
    }
    let g_inv_t = g
        .clone()
        .try_inverse()
        .ok_or(DiracError::SingularMap)?
        .transpose();
    let x = lift::<T>(g) * vector_block(space);
    let xi = lift::<T>(&g_inv_t) * covector_block(space);
    Ok(Subspace::from_columns_scaled(&stack(&x, &xi), space.tol(), 1.0).0)
}

/// `L₁ × L₂` in interleaved coordinates `(v₁, v₂, ξ₁, ξ₂)`.
pub fn product<T: Field>(first: &Subspace<T>, second: &Subspace<T>) -> Subspace<T> {
    let m1 = first.ambient_dim() / 2;
    let m2 = second.ambient_dim() / 2;
    let m = m1 + m2;
    let (d1, d2) = (first.dim(), second.dim());
    let mut basis = DMatrix::zeros(2 * m, d1 + d2);
    basis
        .view_mut((0, 0), (m1, d1))
        .copy_from(&first.basis().rows(0, m1));
    basis
        .view_mut((m, 0), (m1, d1))
        .copy_from(&first.basis().rows(m1, m1));
    basis
        .view_mut((m1, d1), (m2, d2))
        .copy_from(&second.basis().rows(0, m2));
    basis
        .view_mut((m + m1, d1), (m2, d2))
        .copy_from(&second.basis().rows(m2, m2));
    Subspace::from_orthonormal(basis, first.tol())
}

fn check_lagrangian<T: Field>(space: &Subspace<T>, m: usize) -> Result<(), DiracError> {
    let isotropy = space.isotropy_residual();
    if space.dim() != m || isotropy > space.tol().max(1e-12) {
        return Err(DiracError::NonTransversal {
            dim: space.dim(),
            expected: m,
            isotropy,
        });
    }
    Ok(())
}

/// Backward image `φ!L = {X + φ*ξ | φX + ξ ∈ L}` along `φ: ℝⁿ → ℝᵐ`
/// (`phi` is `m × n`). The result is accepted iff it is lagrangian.
pub fn backward_image<T: Field>(
    space: &Subspace<T>,
    phi: &DMatrix<f64>,
) -> Result<Subspace<T>, DiracError> {
    let m = space.ambient_dim() / 2;
    if phi.nrows() != m {
        return Err(DiracError::MapShape {
            expected: (m, phi.ncols()),
            found: phi.shape(),
        });
    }
    let n = phi.ncols();
    let a = vector_block(space);
    let xi = covector_block(space);
    let phi_t: DMatrix<T> = lift(phi);
    // Solve φX = A c for (X, c).
    let system = hcat(&phi_t, &(-a));
    let (kernel, _) = null_space(&system, space.tol(), 1.0);
    let x = kernel.rows(0, n).into_owned();
    let c = kernel.rows(n, space.dim()).into_owned();
    let pulled = phi_t.transpose() * xi * c;
    let (result, _) = Subspace::from_columns_scaled(&stack(&x, &pulled), space.tol(), 1.0);
    check_lagrangian(&result, n)?;
    Ok(result)
}

/// Forward image `φ!L' = {φX + ξ | X + φ*ξ ∈ L'}` along `φ: ℝⁿ → ℝᵐ`.
pub fn forward_image<T: Field>(
    space: &Subspace<T>,
    phi: &DMatrix<f64>,
) -> Result<Subspace<T>, DiracError> {
    let n = space.ambient_dim() / 2;
    if phi.ncols() != n {
        return Err(DiracError::MapShape {
            expected: (phi.nrows(), n),
            found: phi.shape(),
        });
    }
    let m = phi.nrows();
    let a = vector_block(space);
    let xi = covector_block(space);
    let phi_t: DMatrix<T> = lift(phi);
    // Solve Ξ c = φᵀ ξ for (c, ξ).
    let system = hcat(&xi, &(-phi_t.transpose()));
    let (kernel, _) = null_space(&system, space.tol(), 1.0);
    let c = kernel.rows(0, space.dim()).into_owned();
    let covectors = kernel.rows(space.dim(), m).into_owned();
    let pushed = &phi_t * a * c;
    let (result, _) = Subspace::from_columns_scaled(&stack(&pushed, &covectors), space.tol(), 1.0);
    check_lagrangian(&result, m)?;
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subspace::DEFAULT_TOL;

    #[test]
    fn real_graph_of_two_form_is_lagrangian() {
        let range = Subspace::<f64>::full(2, DEFAULT_TOL);
        let omega = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        let l = graph_space(&range, &omega);
        assert_eq!(l.dim(), 2);
        assert!(l.isotropy_residual() < 1e-15);
        // X = ∂x maps to ι_X ω = dy.
        let v = nalgebra::DVector::from_column_slice(&[1.0, 0.0, 0.0, 1.0]);
        assert!(l.distance_to(&v) < 1e-14);
    }

    #[test]
    fn product_with_empty_factor_is_identity() {
        let range = Subspace::<f64>::full(2, DEFAULT_TOL);
        let l = graph_space(&range, &DMatrix::zeros(2, 2));
        let point = Subspace::<f64>::zero(0, DEFAULT_TOL);
        let p = product(&l, &point);
        assert!(p.gap(&l).unwrap() < 1e-15);
    }
}
