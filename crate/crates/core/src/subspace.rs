//! Tolerance-aware linear subspaces of `ℂᵈ` and `ℝᵈ`.
//!
//! A [`Subspace`] is stored as a matrix with orthonormal columns. Every
//! operation re-orthonormalizes its result, and every rank decision uses the
//! same rule: a singular value `σ` counts iff `σ ≥ tol · max(σ_max, scale)`,
//! where `scale` is zero for user-supplied vectors (purely relative cutoff)
//! and one when the input is already built from orthonormal frames.

use nalgebra::{ComplexField, DMatrix, DVector};
use faer::c64;
use num_complex::Complex64;
use thiserror::Error;

/// Default relative singular-value cutoff shared by the whole crate.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Factor above `tol` inside which a singular value counts as "marginal".
pub const MARGINAL_FACTOR: f64 = 100.0;

pub type ComplexSubspace = Subspace<Complex64>;
pub type RealSubspace = Subspace<f64>;

/// Scalar field usable by [`Subspace`]: `f64` or `Complex64`.
pub trait Field: ComplexField<RealField = f64> + Copy {
    const IS_COMPLEX: bool;
    fn parts(self) -> (f64, f64);
    fn from_parts(re: f64, im: f64) -> Self;
}

impl Field for f64 {
    const IS_COMPLEX: bool = false;
    fn parts(self) -> (f64, f64) {
        (self, 0.0)
    }
    fn from_parts(re: f64, _im: f64) -> Self {
        re
    }
}

impl Field for Complex64 {
    const IS_COMPLEX: bool = true;
    fn parts(self) -> (f64, f64) {
        (self.re, self.im)
    }
    fn from_parts(re: f64, im: f64) -> Self {
        Complex64::new(re, im)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SubspaceError {
    #[error("vector {index} has length {found}, expected ambient dimension {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("ambient dimensions differ: {left} vs {right}")]
    AmbientMismatch { left: usize, right: usize },
    #[error("pairing requires an even ambient dimension, got {0}")]
    OddAmbient(usize),
    #[error("subspace is not stable under conjugation (complex dim {complex_dim}, real span dim {real_dim})")]
    NotConjugationStable { complex_dim: usize, real_dim: usize },
}

/// Outcome of a numerical rank decision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankDecision {
    pub rank: usize,
    /// Some singular value fell inside `[tol, MARGINAL_FACTOR · tol]`
    /// relative to the reference scale.
    pub marginal: bool,
}

/// Decides the numerical rank of a descending singular-value list.
pub fn decide_rank(singular_values: &[f64], tol: f64, scale: f64) -> RankDecision {
    let smax = singular_values.iter().copied().fold(0.0_f64, f64::max);
    let reference = smax.max(scale);
    if reference == 0.0 {
        return RankDecision {
            rank: 0,
            marginal: false,
        };
    }
    let cutoff = tol * reference;
    let rank = singular_values.iter().filter(|&&s| s >= cutoff).count();
    let marginal = singular_values
        .iter()
        .any(|&s| s >= cutoff && s <= MARGINAL_FACTOR * cutoff);
    RankDecision { rank, marginal }
}

/// Full SVD `M = U Σ Vᴴ` with singular values in decreasing order.
///
/// nalgebra's SVD returns inaccurate factors on some small rank-deficient
/// inputs, so every decomposition in the crate goes through faer.
pub(crate) struct Svd<T: Field> {
    pub u: DMatrix<T>,
    pub singular_values: Vec<f64>,
    pub v: DMatrix<T>,
}

pub(crate) fn svd<T: Field>(m: &DMatrix<T>) -> Svd<T> {
    let (rows, cols) = m.shape();
    if T::IS_COMPLEX {
        let f = faer::Mat::<c64>::from_fn(rows, cols, |i, j| {
            let (re, im) = m[(i, j)].parts();
            c64::new(re, im)
        });
        let d = f.svd().expect("SVD converges on finite input");
        let s = d.S().column_vector();
        Svd {
            u: DMatrix::from_fn(rows, rows, |i, j| {
                let z = d.U()[(i, j)];
                T::from_parts(z.re, z.im)
            }),
            singular_values: (0..s.nrows()).map(|i| s[i].re).collect(),
            v: DMatrix::from_fn(cols, cols, |i, j| {
                let z = d.V()[(i, j)];
                T::from_parts(z.re, z.im)
            }),
        }
    } else {
        let f = faer::Mat::<f64>::from_fn(rows, cols, |i, j| m[(i, j)].parts().0);
        let d = f.svd().expect("SVD converges on finite input");
        let s = d.S().column_vector();
        Svd {
            u: DMatrix::from_fn(rows, rows, |i, j| T::from_parts(d.U()[(i, j)], 0.0)),
            singular_values: (0..s.nrows()).map(|i| s[i]).collect(),
            v: DMatrix::from_fn(cols, cols, |i, j| T::from_parts(d.V()[(i, j)], 0.0)),
        }
    }
}

/// Eigen-decomposition of a real symmetric matrix, eigenvalues ascending.
pub(crate) fn symmetric_eigen(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let f = faer::Mat::<f64>::from_fn(n, n, |i, j| 0.5 * (m[(i, j)] + m[(j, i)]));
    let e = f
        .self_adjoint_eigen(faer::Side::Lower)
        .expect("symmetric eigensolver converges on finite input");
    let s = e.S().column_vector();
    (
        (0..n).map(|i| s[i]).collect(),
        DMatrix::from_fn(n, n, |i, j| e.U()[(i, j)]),
    )
}

/// Orthonormal basis of the column span of `m`, plus the rank decision.
pub(crate) fn orthonormal_span<T: Field>(
    m: &DMatrix<T>,
    tol: f64,
    scale: f64,
) -> (DMatrix<T>, RankDecision) {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return (
            DMatrix::zeros(rows, 0),
            RankDecision {
                rank: 0,
                marginal: false,
            },
        );
    }
    let d = svd(m);
    let decision = decide_rank(&d.singular_values, tol, scale);
    (d.u.columns(0, decision.rank).into_owned(), decision)
}

/// Orthonormal basis (as columns) of the kernel of `m`.
pub(crate) fn null_space<T: Field>(
    m: &DMatrix<T>,
    tol: f64,
    scale: f64,
) -> (DMatrix<T>, RankDecision) {
    let (rows, cols) = m.shape();
    if cols == 0 {
        return (
            DMatrix::zeros(0, 0),
            RankDecision {
                rank: 0,
                marginal: false,
            },
        );
    }
    if rows == 0 {
        return (
            DMatrix::identity(cols, cols),
            RankDecision {
                rank: 0,
                marginal: false,
            },
        );
    }
    let d = svd(m);
    let decision = decide_rank(&d.singular_values, tol, scale);
    (d.v.columns(decision.rank, cols - decision.rank).into_owned(), decision)
}

/// Minimum-norm least-squares solution of `A X = B`.
pub(crate) fn least_squares<T: Field>(a: &DMatrix<T>, b: &DMatrix<T>) -> DMatrix<T> {
    let d = svd(a);
    let smax = d.singular_values.first().copied().unwrap_or(0.0);
    let k = d
        .singular_values
        .iter()
        .filter(|&&s| s > 1e-14 * smax.max(1.0))
        .count();
    let mut coeffs = d.u.columns(0, k).adjoint() * b;
    for (i, mut row) in coeffs.row_iter_mut().enumerate() {
        row /= T::from_real(d.singular_values[i]);
    }
    d.v.columns(0, k) * coeffs
}

/// The split-signature pairing matrix on `ℂ²ᵐ`: `⟨u, v⟩ = uᵀ P v` with
/// `P = [[0, I/2], [I/2, 0]]` in (vector, covector) coordinates.
pub fn pairing_gram(m: usize) -> DMatrix<Complex64> {
    pairing_gram_generic(m)
}

pub(crate) fn pairing_gram_generic<T: Field>(m: usize) -> DMatrix<T> {
    let half = T::from_real(0.5);
    let mut p = DMatrix::zeros(2 * m, 2 * m);
    for i in 0..m {
        p[(i, m + i)] = half;
        p[(m + i, i)] = half;
    }
    p
}

/// Bilinear (not sesquilinear) pairing of two generalized vectors.
pub fn pairing<T: Field>(u: &DVector<T>, v: &DVector<T>) -> T {
    let m = u.len() / 2;
    let mut acc = T::zero();
    for i in 0..m {
        acc += u[i] * v[m + i] + u[m + i] * v[i];
    }
    acc * T::from_real(0.5)
}

/// Linear subspace of `Tᵈ` held as an orthonormal column basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace<T: Field> {
    basis: DMatrix<T>,
    tol: f64,
}

impl<T: Field> Subspace<T> {
    pub fn zero(ambient_dim: usize, tol: f64) -> Self {
        Self {
            basis: DMatrix::zeros(ambient_dim, 0),
            tol,
        }
    }

    pub fn full(ambient_dim: usize, tol: f64) -> Self {
        Self {
            basis: DMatrix::identity(ambient_dim, ambient_dim),
            tol,
        }
    }

    /// Orthonormalized span of a list of vectors.
    pub fn span(vectors: &[DVector<T>], ambient_dim: usize, tol: f64) -> Result<Self, SubspaceError> {
        for (index, v) in vectors.iter().enumerate() {
            if v.len() != ambient_dim {
                return Err(SubspaceError::DimensionMismatch {
                    index,
                    expected: ambient_dim,
                    found: v.len(),
                });
            }
        }
        let m = if vectors.is_empty() {
            DMatrix::zeros(ambient_dim, 0)
        } else {
            DMatrix::from_columns(vectors)
        };
        Ok(Self::from_columns(&m, tol))
    }

    /// Orthonormalized span of the columns of `m` (purely relative cutoff).
    pub fn from_columns(m: &DMatrix<T>, tol: f64) -> Self {
        Self::from_columns_scaled(m, tol, 0.0).0
    }

    /// Span of the columns of `m` where rank is judged against
    /// `max(σ_max, scale)`; used when `m` is built from orthonormal frames.
    pub(crate) fn from_columns_scaled(m: &DMatrix<T>, tol: f64, scale: f64) -> (Self, RankDecision) {
        let (basis, decision) = orthonormal_span(m, tol, scale);
        (Self { basis, tol }, decision)
    }

    /// Wraps a matrix whose columns are already orthonormal.
    pub(crate) fn from_orthonormal(basis: DMatrix<T>, tol: f64) -> Self {
        Self { basis, tol }
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &DMatrix<T> {
        &self.basis
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    fn check_ambient(&self, other: &Self) -> Result<(), SubspaceError> {
        if self.ambient_dim() != other.ambient_dim() {
            return Err(SubspaceError::AmbientMismatch {
                left: self.ambient_dim(),
                right: other.ambient_dim(),
            });
        }
        Ok(())
    }

    /// Orthogonal projector `U Uᴴ`.
    pub fn projector(&self) -> DMatrix<T> {
        &self.basis * self.basis.adjoint()
    }

    /// `A ∩ B`, from the null space of `[A | −B]` mapped through `A`.
    pub fn intersect(&self, other: &Self) -> Result<Self, SubspaceError> {
        Ok(self.intersect_ranked(other)?.0)
    }

    pub(crate) fn intersect_ranked(&self, other: &Self) -> Result<(Self, bool), SubspaceError> {
        self.check_ambient(other)?;
        let d = self.ambient_dim();
        let (a, b) = (self.dim(), other.dim());
        if a == 0 || b == 0 {
            return Ok((Self::zero(d, self.tol), false));
        }
        let mut stacked = DMatrix::zeros(d, a + b);
        stacked.view_mut((0, 0), (d, a)).copy_from(&self.basis);
        stacked
            .view_mut((0, a), (d, b))
            .copy_from(&(-other.basis.clone()));
        let (kernel, k_dec) = null_space(&stacked, self.tol, 1.0);
        if kernel.ncols() == 0 {
            return Ok((Self::zero(d, self.tol), k_dec.marginal));
        }
        let images = &self.basis * kernel.rows(0, a);
        let (sub, s_dec) = Self::from_columns_scaled(&images, self.tol, 1.0);
        Ok((sub, k_dec.marginal || s_dec.marginal))
    }

    /// `A + B`.
    pub fn sum(&self, other: &Self) -> Result<Self, SubspaceError> {
        Ok(self.sum_ranked(other)?.0)
    }

    pub(crate) fn sum_ranked(&self, other: &Self) -> Result<(Self, bool), SubspaceError> {
        self.check_ambient(other)?;
        let d = self.ambient_dim();
        let mut stacked = DMatrix::zeros(d, self.dim() + other.dim());
        stacked
            .view_mut((0, 0), (d, self.dim()))
            .copy_from(&self.basis);
        stacked
            .view_mut((0, self.dim()), (d, other.dim()))
            .copy_from(&other.basis);
        let (sub, dec) = Self::from_columns_scaled(&stacked, self.tol, 1.0);
        Ok((sub, dec.marginal))
    }

    /// Operator-norm distance between the orthogonal projectors, i.e. the
    /// sine of the largest principal angle. Subspaces of different
    /// dimension are at distance one.
    pub fn gap(&self, other: &Self) -> Result<f64, SubspaceError> {
        self.check_ambient(other)?;
        if self.dim() != other.dim() {
            return Ok(1.0);
        }
        if self.dim() == 0 || self.dim() == self.ambient_dim() {
            return Ok(0.0);
        }
        let diff = self.projector() - other.projector();
        let largest = svd(&diff).singular_values.first().copied().unwrap_or(0.0);
        Ok(largest.min(1.0))
    }

    /// Euclidean distance from `v` to the subspace.
    pub fn distance_to(&self, v: &DVector<T>) -> f64 {
        let coeffs = self.basis.adjoint() * v;
        let residual = v - &self.basis * coeffs;
        residual.norm()
    }

    /// Hermitian-orthogonal complement.
    pub fn orthogonal_complement(&self) -> Self {
        let (kernel, _) = null_space(&self.basis.adjoint(), self.tol, 1.0);
        Self {
            basis: kernel,
            tol: self.tol,
        }
    }

    /// `{v : vᵀ P a = 0 for all a ∈ A}` under the split pairing.
    pub fn perp_pairing(&self) -> Result<Self, SubspaceError> {
        let d = self.ambient_dim();
        if d % 2 != 0 {
            return Err(SubspaceError::OddAmbient(d));
        }
        let m = d / 2;
        if self.dim() == 0 {
            return Ok(Self::full(d, self.tol));
        }
        // Rows of Aᵀ·S with S the block swap (2P), whose singular values are those of A.
        let mut swapped = DMatrix::zeros(d, self.dim());
        swapped
            .view_mut((0, 0), (m, self.dim()))
            .copy_from(&self.basis.rows(m, m));
        swapped
            .view_mut((m, 0), (m, self.dim()))
            .copy_from(&self.basis.rows(0, m));
        let (kernel, _) = null_space(&swapped.transpose(), self.tol, 1.0);
        Ok(Self {
            basis: kernel,
            tol: self.tol,
        })
    }

    /// Largest `|uᵀ P v|` over pairs of basis vectors.
    pub fn isotropy_residual(&self) -> f64 {
        let d = self.ambient_dim();
        if d % 2 != 0 || self.dim() == 0 {
            return 0.0;
        }
        let p: DMatrix<T> = pairing_gram_generic(d / 2);
        let g = self.basis.transpose() * p * &self.basis;
        g.iter().map(|z| z.modulus()).fold(0.0, f64::max)
    }

    /// Image under a linear map `ℝᵈ → ℝᵉ` (or `ℂ`), re-orthonormalized.
    pub fn map(&self, linear: &DMatrix<T>) -> Self {
        let images = linear * &self.basis;
        Self::from_columns(&images, self.tol)
    }

    /// Coordinates of the basis vectors in an orthonormal frame `frame`
    /// (columns), i.e. `frameᴴ · basis`, re-spanned.
    pub fn in_frame(&self, frame: &DMatrix<T>) -> Self {
        let coords = frame.adjoint() * &self.basis;
        Self::from_columns_scaled(&coords, self.tol, 1.0).0
    }
}

impl ComplexSubspace {
    /// Complex conjugate subspace.
    pub fn conjugate(&self) -> Self {
        Self::from_orthonormal(self.basis.map(|z| z.conj()), self.tol)
    }

    /// Real points `{v ∈ ℝᵈ : v ∈ A}` of a conjugation-stable subspace.
    pub fn real_points(&self) -> Result<RealSubspace, SubspaceError> {
        Ok(self.real_points_ranked()?.0)
    }

    pub(crate) fn real_points_ranked(&self) -> Result<(RealSubspace, bool), SubspaceError> {
        let (d, r) = self.basis.shape();
        let mut m = DMatrix::zeros(d, 2 * r);
        m.view_mut((0, 0), (d, r)).copy_from(&self.basis.map(|z| z.re));
        m.view_mut((0, r), (d, r)).copy_from(&self.basis.map(|z| z.im));
        let (sub, dec) = RealSubspace::from_columns_scaled(&m, self.tol, 1.0);
        if sub.dim() != r {
            return Err(SubspaceError::NotConjugationStable {
                complex_dim: r,
                real_dim: sub.dim(),
            });
        }
        Ok((sub, dec.marginal))
    }
}

impl RealSubspace {
    /// `W ⊗ ℂ`.
    pub fn complexify(&self) -> ComplexSubspace {
        ComplexSubspace::from_orthonormal(self.basis.map(|x| Complex64::new(x, 0.0)), self.tol)
    }
}

/// Embeds a real matrix into the scalar field `T`.
pub(crate) fn lift<T: Field>(m: &DMatrix<f64>) -> DMatrix<T> {
    m.map(T::from_real)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_one_tall_matrix_has_the_right_span() {
        let d = [
            0.26535740497259264,
            -0.1187118451523289,
            0.12361212247977532,
            -0.18198315654715475,
            0.09715270678358157,
            0.10221963534216252,
        ];
        let m = DMatrix::from_fn(6, 2, |i, j| d[i] * if j == 0 { 1.0 } else { 2.354733 });
        let (basis, decision) = orthonormal_span(&m, DEFAULT_TOL, 0.0);
        assert_eq!(decision.rank, 1);
        let v = DVector::from_column_slice(&d).normalize();
        assert!((basis.column(0).dot(&v).abs() - 1.0).abs() < 1e-12);
        let s = svd(&m);
        let sigma = DMatrix::from_fn(6, 2, |i, j| if i == j { s.singular_values[i] } else { 0.0 });
        assert!((&s.u * sigma * s.v.transpose() - &m).norm() < 1e-14);
    }

    #[test]
    fn complex_least_squares_recovers_exact_solution() {
        let a = DMatrix::from_fn(5, 3, |i, j| Complex64::new((i * 3 + j) as f64 % 7.0 - 3.0, (i + 2 * j) as f64 % 5.0 - 2.0));
        let x = DMatrix::from_fn(3, 2, |i, j| Complex64::new(i as f64 - j as f64, 0.5 * (i + j) as f64));
        let b = &a * &x;
        assert!((least_squares(&a, &b) - x).norm() < 1e-12);
    }
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cvec(entries: &[Complex64]) -> DVector<Complex64> {
        DVector::from_column_slice(entries)
    }

    fn e(d: usize, i: usize) -> DVector<Complex64> {
        let mut v = DVector::zeros(d);
        v[i] = c(1.0, 0.0);
        v
    }

    #[test]
    fn collinear_vectors_span_a_line() {
        let s = ComplexSubspace::span(
            &[cvec(&[c(1.0, 0.0), c(0.0, 0.0)]), cvec(&[c(2.0, 0.0), c(0.0, 0.0)])],
            2,
            DEFAULT_TOL,
        )
        .unwrap();
        assert_eq!(s.dim(), 1);
        let line = ComplexSubspace::span(&[e(2, 0)], 2, DEFAULT_TOL).unwrap();
        assert!(s.gap(&line).unwrap() < 1e-14);
    }

    #[test]
    fn empty_span_is_zero() {
        let s = ComplexSubspace::span(&[], 3, DEFAULT_TOL).unwrap();
        assert_eq!(s.dim(), 0);
        assert_eq!(s.ambient_dim(), 3);
    }

    #[test]
    fn nearly_parallel_pair_is_rank_one() {
        // σ₂/σ₁ = ε for (1, ±ε): well below the 1e-9 cutoff.
        let eps = 1e-15;
        let s = ComplexSubspace::span(
            &[cvec(&[c(1.0, 0.0), c(eps, 0.0)]), cvec(&[c(1.0, 0.0), c(-eps, 0.0)])],
            2,
            1e-9,
        )
        .unwrap();
        assert_eq!(s.dim(), 1);
    }

    #[test]
    fn span_rejects_wrong_length() {
        let err = ComplexSubspace::span(&[e(3, 0)], 2, DEFAULT_TOL).unwrap_err();
        assert_eq!(
            err,
            SubspaceError::DimensionMismatch {
                index: 0,
                expected: 2,
                found: 3
            }
        );
    }

    #[test]
    fn intersection_cases() {
        let a = ComplexSubspace::span(&[e(4, 0), e(4, 1)], 4, DEFAULT_TOL).unwrap();
        assert!(a.intersect(&a).unwrap().gap(&a).unwrap() < 1e-14);

        let l1 = ComplexSubspace::span(&[e(2, 0)], 2, DEFAULT_TOL).unwrap();
        let l2 = ComplexSubspace::span(&[e(2, 1)], 2, DEFAULT_TOL).unwrap();
        assert_eq!(l1.intersect(&l2).unwrap().dim(), 0);

        let v = &e(4, 0) + &e(4, 1);
        let p = ComplexSubspace::span(&[v.clone(), e(4, 2)], 4, DEFAULT_TOL).unwrap();
        let q = ComplexSubspace::span(&[v.clone(), e(4, 3)], 4, DEFAULT_TOL).unwrap();
        let pq = p.intersect(&q).unwrap();
        // Brute force: dim(P ∩ Q) = dim P + dim Q − rank[P | Q] = 2 + 2 − 3.
        let stacked = DMatrix::from_columns(&[v.clone(), e(4, 2), v.clone(), e(4, 3)]);
        let rank = stacked.rank(1e-12);
        assert_eq!(pq.dim(), 4 - rank);
        let expected = ComplexSubspace::span(&[v], 4, DEFAULT_TOL).unwrap();
        assert!(pq.gap(&expected).unwrap() < 1e-12);
    }

    #[test]
    fn conjugation_and_real_points() {
        let z = cvec(&[c(1.0, 0.0), c(0.0, 1.0)]);
        let s = ComplexSubspace::span(&[z], 2, DEFAULT_TOL).unwrap();
        let expected =
            ComplexSubspace::span(&[cvec(&[c(1.0, 0.0), c(0.0, -1.0)])], 2, DEFAULT_TOL).unwrap();
        assert!(s.conjugate().gap(&expected).unwrap() < 1e-14);
        assert!(matches!(
            s.real_points(),
            Err(SubspaceError::NotConjugationStable { .. })
        ));

        // span{e₁ + i e₂, e₁ − i e₂} is the complexification of span{e₁, e₂}.
        let both = ComplexSubspace::span(
            &[
                cvec(&[c(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0)]),
                cvec(&[c(1.0, 0.0), c(0.0, -1.0), c(0.0, 0.0)]),
            ],
            3,
            DEFAULT_TOL,
        )
        .unwrap();
        let real = both.real_points().unwrap();
        let plane = RealSubspace::from_columns(&DMatrix::identity(3, 2), DEFAULT_TOL);
        assert!(real.gap(&plane).unwrap() < 1e-14);
        assert!(plane.complexify().real_points().unwrap().gap(&plane).unwrap() < 1e-14);
    }

    #[test]
    fn pairing_values() {
        let m = 3;
        let p = pairing_gram(m);
        let u = e(2 * m, 0);
        let w = e(2 * m, m);
        assert_abs_diff_eq!((u.transpose() * &p * &w)[(0, 0)].re, 0.5);
        assert_abs_diff_eq!(pairing(&u, &e(2 * m, 1)).norm(), 0.0);
        let iu = u.map(|z| z * c(0.0, 1.0));
        let val = pairing(&iu, &w);
        assert_abs_diff_eq!(val.re, 0.0);
        assert_abs_diff_eq!(val.im, 0.5);
    }

    #[test]
    fn perp_pairing_cases() {
        let m = 3;
        let covectors: Vec<_> = (m..2 * m).map(|i| e(2 * m, i)).collect();
        let cov = ComplexSubspace::span(&covectors, 2 * m, DEFAULT_TOL).unwrap();
        assert!(cov.perp_pairing().unwrap().gap(&cov).unwrap() < 1e-14);

        let zero = ComplexSubspace::zero(2 * m, DEFAULT_TOL);
        assert_eq!(zero.perp_pairing().unwrap().dim(), 2 * m);

        let a = &e(2 * m, 0) + &e(2 * m, m);
        let line = ComplexSubspace::span(&[a.clone()], 2 * m, DEFAULT_TOL).unwrap();
        let perp = line.perp_pairing().unwrap();
        assert_eq!(perp.dim(), 2 * m - 1);
        for j in 0..perp.dim() {
            let v = perp.basis().column(j).into_owned();
            assert!(pairing(&v, &a).norm() < 1e-14);
        }

        assert!(matches!(
            ComplexSubspace::full(3, DEFAULT_TOL).perp_pairing(),
            Err(SubspaceError::OddAmbient(3))
        ));
    }

    #[test]
    fn gap_cases() {
        let l1 = ComplexSubspace::span(&[e(2, 0)], 2, DEFAULT_TOL).unwrap();
        let l2 = ComplexSubspace::span(&[e(2, 1)], 2, DEFAULT_TOL).unwrap();
        assert_eq!(l1.gap(&l1).unwrap(), 0.0);
        assert_abs_diff_eq!(l1.gap(&l2).unwrap(), 1.0, epsilon = 1e-14);

        // Oracle: spectral norm of the projector difference for two lines at
        // angle θ is sin θ (the difference has eigenvalues ±sin θ).
        let theta: f64 = 0.3;
        let rot = cvec(&[c(theta.cos(), 0.0), c(theta.sin(), 0.0)]);
        let l3 = ComplexSubspace::span(&[rot], 2, DEFAULT_TOL).unwrap();
        assert_abs_diff_eq!(l1.gap(&l3).unwrap(), 0.29552020666133955, epsilon = 1e-14);

        assert!(matches!(
            l1.gap(&ComplexSubspace::zero(3, DEFAULT_TOL)),
            Err(SubspaceError::AmbientMismatch { left: 2, right: 3 })
        ));
    }

    #[test]
    fn marginal_singular_values_are_flagged() {
        let d = decide_rank(&[1.0, 5e-9], 1e-9, 0.0);
        assert_eq!(d.rank, 2);
        assert!(d.marginal);
        let d = decide_rank(&[1.0, 1e-12], 1e-9, 0.0);
        assert_eq!(d.rank, 1);
        assert!(!d.marginal);
        assert_eq!(decide_rank(&[1e-17], 1e-9, 1.0).rank, 0);
    }
}
