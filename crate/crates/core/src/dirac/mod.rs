//! Pointwise complex Dirac structures.
//!
//! A [`DiracPoint`] is a lagrangian subspace `L ⊂ (V ⊕ V*)_ℂ` with
//! `dim V = m`, stored in (vector, covector) coordinates together with its
//! range `E = pr_V L` and the skew form `ε` such that `L = L(E, ε)`.

mod invariants;
pub mod linear;
mod random;

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use crate::subspace::{
    least_squares, lift, null_space, ComplexSubspace, RealSubspace, Subspace, SubspaceError, DEFAULT_TOL,
};

pub use invariants::{admissibility, InvariantRecord, Triple, Violation};
pub(crate) use invariants::restrict_form;
pub use random::{admissible_cells, random_lagrangian, random_orthogonal, random_skew, Profile};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiracError {
    #[error(transparent)]
    Subspace(#[from] SubspaceError),
    #[error("not lagrangian: dimension {dim} (expected {expected}), isotropy residual {isotropy:.3e}")]
    NotLagrangian {
        dim: usize,
        expected: usize,
        isotropy: f64,
    },
    #[error("form is not skew-symmetric (residual {0:.3e})")]
    NonSkew(f64),
    #[error("J² ≠ −I (residual {0:.3e})")]
    NotComplexStructure(f64),
    #[error("T₁,₀ meets its conjugate in dimension {0}")]
    NotTotallyComplex(usize),
    #[error("E ∩ Ē is not conjugation stable")]
    NotTransverseCr,
    #[error("backward/forward image is not lagrangian: dimension {dim} (expected {expected}), isotropy {isotropy:.3e}")]
    NonTransversal {
        dim: usize,
        expected: usize,
        isotropy: f64,
    },
    #[error("map has shape {found:?}, expected {expected:?}")]
    MapShape {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("linear map is singular")]
    SingularMap,
    #[error("inadmissible invariants (r, s, k) = ({r}, {s}, {k}) for m = {m}: {violation}")]
    Inadmissible {
        m: usize,
        r: usize,
        s: usize,
        k: usize,
        violation: Violation,
    },
}

/// A validated lagrangian subspace of `(V ⊕ V*)_ℂ` with cached `(E, ε)`.
#[derive(Debug, Clone)]
pub struct DiracPoint {
    dim_v: usize,
    space: ComplexSubspace,
    range: ComplexSubspace,
    eps: DMatrix<Complex64>,
    skew_residual: f64,
    fit_residual: f64,
    range_marginal: bool,
}

fn skew_residual(eps: &DMatrix<Complex64>) -> f64 {
    if eps.is_empty() {
        return 0.0;
    }
    let sym = eps + eps.transpose();
    sym.norm() / eps.norm().max(1.0)
}

fn check_skew(eps: &DMatrix<Complex64>, tol: f64) -> Result<(), DiracError> {
    let res = skew_residual(eps);
    if res > tol {
        return Err(DiracError::NonSkew(res));
    }
    Ok(())
}

impl DiracPoint {
    /// Validates a subspace of `ℂ²ᵐ` as lagrangian and extracts `(E, ε)`.
    pub fn from_space(space: ComplexSubspace) -> Result<Self, DiracError> {
        let d = space.ambient_dim();
        if d % 2 != 0 {
            return Err(SubspaceError::OddAmbient(d).into());
        }
        let m = d / 2;
        let isotropy = space.isotropy_residual();
        if space.dim() != m || isotropy > space.tol().max(1e-12) {
            return Err(DiracError::NotLagrangian {
                dim: space.dim(),
                expected: m,
                isotropy,
            });
        }
        let tol = space.tol();
        let x = linear::vector_block(&space);
        let xi = linear::covector_block(&space);
        let (range, decision) = ComplexSubspace::from_columns_scaled(&x, tol, 1.0);
        let p = range.dim();
        let (eps, skew, fit) = if p == 0 {
            (DMatrix::zeros(0, 0), 0.0, 0.0)
        } else {
            // ξ_j(e_b) = Σ_a c_{aj} ε_{ab}, i.e. Cᵀ ε = R.
            let coeffs_t = (range.basis().adjoint() * &x).transpose();
            let rhs = xi.transpose() * range.basis();
            let raw = least_squares(&coeffs_t, &rhs);
            let fit = (&coeffs_t * &raw - &rhs).norm() / rhs.norm().max(1.0);
            let skew = skew_residual(&raw);
            ((&raw - raw.transpose()) * Complex64::new(0.5, 0.0), skew, fit)
        };
        Ok(Self {
            dim_v: m,
            space,
            range,
            eps,
            skew_residual: skew,
            fit_residual: fit,
            range_marginal: decision.marginal,
        })
    }

    /// `L(E, ε)`; `eps` is expressed in the stored orthonormal basis of `E`.
    pub fn from_graph(range: &ComplexSubspace, eps: &DMatrix<Complex64>) -> Result<Self, DiracError> {
        let p = range.dim();
        if eps.shape() != (p, p) {
            return Err(DiracError::MapShape {
                expected: (p, p),
                found: eps.shape(),
            });
        }
        check_skew(eps, range.tol())?;
        Self::from_space(linear::graph_space(range, eps))
    }

    /// `L_{iω} = {X + i ι_X ω}` for a real (possibly degenerate) two-form.
    pub fn from_presymplectic(omega: &DMatrix<f64>) -> Result<Self, DiracError> {
        Self::from_presymplectic_with_tol(omega, DEFAULT_TOL)
    }

    pub fn from_presymplectic_with_tol(omega: &DMatrix<f64>, tol: f64) -> Result<Self, DiracError> {
        let m = omega.nrows();
        let eps = omega.map(|w| Complex64::new(0.0, w));
        Self::from_graph(&ComplexSubspace::full(m, tol), &eps)
    }

    /// `L_J = T₀,₁ ⊕ T*₁,₀` for a linear complex structure `J` on `ℝᵐ`.
    pub fn from_complex_structure(j: &DMatrix<f64>) -> Result<Self, DiracError> {
        let m = j.nrows();
        let residual = (j * j + DMatrix::<f64>::identity(m, m)).norm();
        if j.ncols() != m || residual > 1e-8 * j.norm().max(1.0).powi(2) {
            return Err(DiracError::NotComplexStructure(residual));
        }
        // T₀,₁ = ker(J + i).
        let shifted: DMatrix<Complex64> =
            lift::<Complex64>(j) + DMatrix::<Complex64>::identity(m, m) * Complex64::i();
        let (t01, _) = null_space(&shifted, DEFAULT_TOL, 1.0);
        let range = ComplexSubspace::from_columns(&t01, DEFAULT_TOL);
        Self::from_graph(&range, &DMatrix::zeros(range.dim(), range.dim()))
    }

    /// `L_{(D,J)} = T₁,₀ ⊕ Ann T₁,₀` for a CR structure given by `T₁,₀`.
    pub fn from_cr(t10: &ComplexSubspace) -> Result<Self, DiracError> {
        let overlap = t10.intersect(&t10.conjugate())?;
        if overlap.dim() != 0 {
            return Err(DiracError::NotTotallyComplex(overlap.dim()));
        }
        Self::from_graph(t10, &DMatrix::zeros(t10.dim(), t10.dim()))
    }

    /// `L_{(S,R,J)} = L(E, 0) = E ⊕ Ann E` for a transverse CR structure.
    pub fn from_transverse_cr(range: &ComplexSubspace) -> Result<Self, DiracError> {
        let cap = range.intersect(&range.conjugate())?;
        if cap.real_points().is_err() {
            return Err(DiracError::NotTransverseCr);
        }
        Self::from_graph(range, &DMatrix::zeros(range.dim(), range.dim()))
    }

    /// Complexification `L_ℂ` of a real lagrangian subspace of `V ⊕ V*`.
    pub fn complexify_real_dirac(real: &RealSubspace) -> Result<Self, DiracError> {
        Self::from_space(real.complexify())
    }

    /// Complexified graph `L_π = {π(α) + α}` of a real bivector.
    pub fn from_poisson(pi: &DMatrix<f64>) -> Result<Self, DiracError> {
        let m = pi.nrows();
        let pc = lift::<Complex64>(pi);
        if pc.ncols() != m {
            return Err(DiracError::MapShape {
                expected: (m, m),
                found: pi.shape(),
            });
        }
        check_skew(&pc, DEFAULT_TOL)?;
        let mut basis = DMatrix::zeros(2 * m, m);
        basis
            .view_mut((0, 0), (m, m))
            .copy_from(&pc.transpose());
        basis
            .view_mut((m, 0), (m, m))
            .copy_from(&DMatrix::<Complex64>::identity(m, m));
        Self::from_space(ComplexSubspace::from_columns(&basis, DEFAULT_TOL))
    }

    /// Full covector space `V*_ℂ` (`E = 0`).
    pub fn covectors(m: usize) -> Self {
        Self::from_graph(&ComplexSubspace::zero(m, DEFAULT_TOL), &DMatrix::zeros(0, 0))
            .expect("V* is lagrangian")
    }

    pub fn dim_v(&self) -> usize {
        self.dim_v
    }

    pub fn space(&self) -> &ComplexSubspace {
        &self.space
    }

    pub fn range(&self) -> &ComplexSubspace {
        &self.range
    }

    /// `ε` in the stored orthonormal basis of [`Self::range`].
    pub fn eps(&self) -> &DMatrix<Complex64> {
        &self.eps
    }

    pub fn tol(&self) -> f64 {
        self.space.tol()
    }

    /// Skewness of `ε` before antisymmetrization.
    pub fn skew_residual(&self) -> f64 {
        self.skew_residual
    }

    /// Least-squares residual of the `ε` fit.
    pub fn fit_residual(&self) -> f64 {
        self.fit_residual
    }

    pub fn isotropy_residual(&self) -> f64 {
        self.space.isotropy_residual()
    }

    pub(crate) fn range_marginal(&self) -> bool {
        self.range_marginal
    }

    pub fn with_tol(self, tol: f64) -> Result<Self, DiracError> {
        Self::from_space(self.space.with_tol(tol))
    }

    /// Gap distance between the underlying subspaces.
    pub fn gap(&self, other: &DiracPoint) -> f64 {
        self.space.gap(&other.space).unwrap_or(1.0)
    }

    pub fn conjugate(&self) -> Self {
        Self::from_space(self.space.conjugate()).expect("conjugate of a lagrangian is lagrangian")
    }

    /// Rebuilds `L(E, ε)` from the cached range and form.
    pub fn reconstruct_from_graph(&self) -> ComplexSubspace {
        linear::graph_space(&self.range, &self.eps)
    }

    /// Complex B-transformation `e^B L`.
    pub fn b_transform(&self, b: &DMatrix<Complex64>) -> Result<Self, DiracError> {
        let m = self.dim_v;
        if b.shape() != (m, m) {
            return Err(DiracError::MapShape {
                expected: (m, m),
                found: b.shape(),
            });
        }
        check_skew(b, self.tol())?;
        Self::from_space(linear::b_transform(&self.space, b))
    }

    pub fn b_transform_real(&self, b: &DMatrix<f64>) -> Result<Self, DiracError> {
        self.b_transform(&lift(b))
    }

    /// Push-forward by a linear isomorphism of `V`.
    pub fn transform(&self, g: &DMatrix<f64>) -> Result<Self, DiracError> {
        Self::from_space(linear::linear_automorphism(&self.space, g)?)
    }

    /// `L₁ × L₂` on `V₁ ⊕ V₂`, coordinates `(v₁, v₂, ξ₁, ξ₂)`.
    pub fn product(&self, other: &DiracPoint) -> Self {
        Self::from_space(linear::product(&self.space, &other.space))
            .expect("product of lagrangians is lagrangian")
    }

    /// Backward image along `φ: ℝⁿ → ℝᵐ` (`phi` is `m × n`).
    pub fn backward_image(&self, phi: &DMatrix<f64>) -> Result<Self, DiracError> {
        Self::from_space(linear::backward_image(&self.space, phi)?)
    }

    /// Forward image of `self` (on `ℝⁿ`) along `φ: ℝⁿ → ℝᵐ`.
    pub fn forward_image(&self, phi: &DMatrix<f64>) -> Result<Self, DiracError> {
        Self::from_space(linear::forward_image(&self.space, phi)?)
    }

    /// `ℂ·im φ + E = ℂᵐ`.
    pub fn is_transversal(&self, phi: &DMatrix<f64>) -> bool {
        let image = ComplexSubspace::from_columns(&lift(phi), self.tol());
        match image.sum(&self.range) {
            Ok(s) => s.dim() == self.dim_v,
            Err(_) => false,
        }
    }

    /// Real index `dim(L ∩ L̄)`.
    pub fn real_index(&self) -> usize {
        self.space
            .intersect(&self.space.conjugate())
            .map(|s| s.dim())
            .unwrap_or(0)
    }

    /// The real operator `𝒥` with `+i`-eigenspace `L`, defined when `L ∩ L̄ = 0`.
    pub fn gc_operator(&self) -> Option<DMatrix<f64>> {
        let m = self.dim_v;
        if m == 0 {
            return Some(DMatrix::zeros(0, 0));
        }
        let l = self.space.basis();
        let mut frame = DMatrix::<Complex64>::zeros(2 * m, 2 * m);
        frame.view_mut((0, 0), (2 * m, m)).copy_from(l);
        frame
            .view_mut((0, m), (2 * m, m))
            .copy_from(&l.map(|z| z.conj()));
        let inv = frame.clone().try_inverse()?;
        let mut diag = DMatrix::<Complex64>::zeros(2 * m, 2 * m);
        for i in 0..m {
            diag[(i, i)] = Complex64::i();
            diag[(m + i, m + i)] = -Complex64::i();
        }
        let op = frame * diag * inv;
        if op.iter().map(|z| z.im.abs()).fold(0.0, f64::max) > 1e-8 {
            return None;
        }
        Some(op.map(|z| z.re))
    }

    /// Lagrangian `L₀` induced on `K⊥/K`, a linear generalized complex structure.
    pub fn reduced_gc(&self) -> Result<ReducedGc, DiracError> {
        invariants::reduced_gc(self)
    }
}

/// `L(E, ε)` for a range `E` and a skew form on its stored basis.
pub fn make_dirac(range: &ComplexSubspace, eps: &DMatrix<Complex64>) -> Result<DiracPoint, DiracError> {
    DiracPoint::from_graph(range, eps)
}

/// Real graph `L(W, ω) = {X + ξ | X ∈ W, ξ|_W = ι_X ω}`.
pub fn real_graph(range: &RealSubspace, omega: &DMatrix<f64>) -> RealSubspace {
    linear::graph_space(range, omega)
}

/// Backward image of a real lagrangian subspace.
pub fn backward_image_real(space: &RealSubspace, phi: &DMatrix<f64>) -> Result<RealSubspace, DiracError> {
    linear::backward_image(space, phi)
}

/// Standard symplectic form on `ℝ²ⁿ` with pairs `(2i, 2i+1)`, padded by
/// `kernel` zero directions.
pub fn canonical_two_form(symplectic_pairs: usize, kernel: usize) -> DMatrix<f64> {
    let m = 2 * symplectic_pairs + kernel;
    let mut w = DMatrix::zeros(m, m);
    for i in 0..symplectic_pairs {
        w[(2 * i, 2 * i + 1)] = 1.0;
        w[(2 * i + 1, 2 * i)] = -1.0;
    }
    w
}

/// Standard complex structure on `ℝ²ⁿ`: `J e_{2i} = e_{2i+1}`.
pub fn canonical_complex_structure(pairs: usize) -> DMatrix<f64> {
    let m = 2 * pairs;
    let mut j = DMatrix::zeros(m, m);
    for i in 0..pairs {
        j[(2 * i + 1, 2 * i)] = 1.0;
        j[(2 * i, 2 * i + 1)] = -1.0;
    }
    j
}

/// `T₁,₀` of a CR structure on `ℝ^{2·pairs + extra}` with
/// `D = span{e₀..e_{2·pairs}}` and the canonical `J`.
pub fn canonical_cr(pairs: usize, extra: usize, tol: f64) -> ComplexSubspace {
    let m = 2 * pairs + extra;
    let mut t = DMatrix::<Complex64>::zeros(m, pairs);
    for j in 0..pairs {
        t[(2 * j, j)] = Complex64::new(1.0, 0.0);
        t[(2 * j + 1, j)] = Complex64::new(0.0, -1.0);
    }
    ComplexSubspace::from_columns(&t, tol)
}

/// Output of [`DiracPoint::reduced_gc`].
#[derive(Debug, Clone)]
pub struct ReducedGc {
    /// `L₀` in pairing-adapted coordinates of `K⊥/K`.
    pub point: DiracPoint,
    /// Columns: the adapted frame of `K⊥/K`, lifted into `V ⊕ V*`
    /// (Euclidean-orthogonal to `K`).
    pub frame: DMatrix<f64>,
}

impl Subspace<f64> {
    /// The real subspace `Ann W`, placed in the covector block of `V ⊕ V*`.
    pub fn annihilator_in_pairing_space(&self) -> RealSubspace {
        let m = self.ambient_dim();
        let (ann, _) = null_space(&self.basis().transpose(), self.tol(), 1.0);
        let mut b = DMatrix::zeros(2 * m, ann.ncols());
        b.view_mut((m, 0), (m, ann.ncols())).copy_from(&ann);
        RealSubspace::from_columns(&b, self.tol())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subspace::DEFAULT_TOL;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn full_range_with_i_omega_has_real_index_zero() {
        let l = DiracPoint::from_presymplectic(&canonical_two_form(1, 0)).unwrap();
        assert_eq!(l.real_index(), 0);
        assert_eq!(l.range().dim(), 2);
    }

    #[test]
    fn zero_range_gives_covectors() {
        let l = DiracPoint::covectors(3);
        assert_eq!(l.real_index(), 3);
        assert!(l.space().gap(&l.space().conjugate()).unwrap() < 1e-14);
    }

    #[test]
    fn sec61_frame_from_graph() {
        // E = span{∂x, e^y ∂y + i f ∂z}, ε = i ι*_E(dx∧dy), at y = 0.3, f = y.
        let y: f64 = 0.3;
        let f = y;
        let v1 = nalgebra::DVector::from_column_slice(&[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let v2 = nalgebra::DVector::from_column_slice(&[c(0.0, 0.0), c(y.exp(), 0.0), c(0.0, f)]);
        let range = ComplexSubspace::span(&[v1, v2], 3, DEFAULT_TOL).unwrap();
        // ε(e_a, e_b) = i·(dx∧dy)(e_a, e_b) in the stored basis.
        let b = range.basis();
        let mut eps = DMatrix::zeros(2, 2);
        for a in 0..2 {
            for bb in 0..2 {
                let w = b[(0, a)] * b[(1, bb)] - b[(1, a)] * b[(0, bb)];
                eps[(a, bb)] = c(0.0, 1.0) * w;
            }
        }
        let l = make_dirac(&range, &eps).unwrap();
        // Hand-solved frame.
        let frame = [
            [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0), c(0.0, 0.0)],
            [c(0.0, 0.0), c(y.exp(), 0.0), c(0.0, f), c(0.0, -y.exp()), c(0.0, 0.0), c(0.0, 0.0)],
            [c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(f, 0.0), c(0.0, y.exp())],
        ];
        for v in frame {
            let v = nalgebra::DVector::from_column_slice(&v);
            assert!(l.space().distance_to(&v) < 1e-12 * v.norm());
        }
    }

    #[test]
    fn non_skew_form_is_rejected() {
        let eps = DMatrix::from_element(2, 2, c(1.0, 0.0));
        let err = make_dirac(&ComplexSubspace::full(2, DEFAULT_TOL), &eps).unwrap_err();
        assert!(matches!(err, DiracError::NonSkew(_)));
    }

    #[test]
    fn bad_complex_structure_is_rejected() {
        let j = DMatrix::identity(2, 2);
        assert!(matches!(
            DiracPoint::from_complex_structure(&j),
            Err(DiracError::NotComplexStructure(_))
        ));
    }

    #[test]
    fn real_t10_is_not_a_cr_structure() {
        let real_line = ComplexSubspace::from_columns(&DMatrix::identity(3, 1), DEFAULT_TOL);
        assert!(matches!(
            DiracPoint::from_cr(&real_line),
            Err(DiracError::NotTotallyComplex(1))
        ));
    }

    #[test]
    fn b_transform_by_zero_is_identity() {
        let l = DiracPoint::from_complex_structure(&canonical_complex_structure(2)).unwrap();
        let t = l.b_transform(&DMatrix::zeros(4, 4)).unwrap();
        assert!(t.gap(&l) < 1e-14);
    }

    #[test]
    fn b_transform_adds_to_eps() {
        let omega = canonical_two_form(1, 0);
        let l = DiracPoint::from_presymplectic(&omega).unwrap();
        let b = DMatrix::from_row_slice(2, 2, &[0.0, 0.7, -0.7, 0.0]);
        let t = l.b_transform_real(&b).unwrap();
        let expected = make_dirac(
            &ComplexSubspace::full(2, DEFAULT_TOL),
            &DMatrix::from_fn(2, 2, |i, j| c(b[(i, j)], omega[(i, j)])),
        )
        .unwrap();
        assert!(t.gap(&expected) < 1e-13);
    }

    #[test]
    fn gc_operator_squares_to_minus_one() {
        let l = DiracPoint::from_complex_structure(&canonical_complex_structure(2)).unwrap();
        let j = l.gc_operator().unwrap();
        let sq = &j * &j + DMatrix::<f64>::identity(8, 8);
        assert!(sq.norm() < 1e-12);
        assert!(DiracPoint::covectors(2).gc_operator().is_none());
    }

    #[test]
    fn graph_round_trip() {
        let l = DiracPoint::from_complex_structure(&canonical_complex_structure(1)).unwrap();
        let t = l.b_transform_real(&DMatrix::from_row_slice(2, 2, &[0.0, 0.4, -0.4, 0.0])).unwrap();
        let rebuilt = t.reconstruct_from_graph();
        assert!(rebuilt.gap(t.space()).unwrap() < 1e-13);
    }
}
