//! Structural algorithms on a single complex Dirac structure: the associated
//! real Dirac structure, pointwise normal forms, extremal-type
//! normalizations, the CR-type predicate, restriction to a leaf, tetrahedron
//! coordinates and verification of the splitting statement.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dirac::{
    admissibility, restrict_form, DiracError, DiracPoint, InvariantRecord, Triple, Violation,
};
use crate::subspace::{
    lift, least_squares, null_space, svd, ComplexSubspace, RealSubspace, SubspaceError,
};

/// Gap below which two reconstructions count as the same subspace.
pub const RECONSTRUCTION_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClassifyError {
    #[error(transparent)]
    Dirac(#[from] DiracError),
    #[error(transparent)]
    Subspace(#[from] SubspaceError),
    #[error("normal form does not reconstruct the input (gap {residual:.3e})")]
    ReconstructionFailure { residual: f64 },
    #[error("type is {k}, expected 0")]
    TypeNotZero { k: usize },
    #[error("type is {k}, expected the maximal value {max}")]
    TypeNotMaximal { k: usize, max: usize },
    #[error("K does not equal the annihilator of the leaf (gap {gap:.3e})")]
    KMismatch { gap: f64 },
    #[error("structure is not of CR type: (r, s, k) = {triple}, rank Δ = {rank_delta}")]
    NotCrType { triple: Triple, rank_delta: usize },
    #[error("leaf has dimension {leaf}, expected at most {ambient}")]
    LeafDimension { leaf: usize, ambient: usize },
}

/// The associated real Dirac structure `L̂ = {X + Im ξ | X + ξ ∈ L, X real}`.
///
/// With `c = a + ib` the real-vector condition `Im(A c) = 0` is the real
/// linear system `[Im A | Re A] (a; b) = 0`.
pub fn hat(l: &DiracPoint) -> RealSubspace {
    let m = l.dim_v();
    let basis = l.space().basis();
    let a = basis.rows(0, m);
    let xi = basis.rows(m, m);
    let mut system = DMatrix::zeros(m, 2 * m);
    system
        .view_mut((0, 0), (m, m))
        .copy_from(&a.map(|z| z.im));
    system
        .view_mut((0, m), (m, m))
        .copy_from(&a.map(|z| z.re));
    let (kernel, _) = null_space(&system, l.tol(), 1.0);
    let coeffs = DMatrix::from_fn(m, kernel.ncols(), |i, j| {
        Complex64::new(kernel[(i, j)], kernel[(m + i, j)])
    });
    let x = (a * &coeffs).map(|z| z.re);
    let eta = (xi * &coeffs).map(|z| z.im);
    let mut out = DMatrix::zeros(2 * m, coeffs.ncols());
    out.view_mut((0, 0), (m, coeffs.ncols())).copy_from(&x);
    out.view_mut((m, 0), (m, coeffs.ncols())).copy_from(&eta);
    RealSubspace::from_columns(&out, l.tol())
}

/// `L(Δ, ω_Δ)` assembled directly from the invariants of `L`.
pub fn hat_from_invariants(inv: &InvariantRecord) -> RealSubspace {
    crate::dirac::real_graph(&inv.delta, &inv.omega_delta)
}

/// Orthonormal frame `[X | Y | Z]` of `V` with `X` spanning `first`,
/// `[X | Y]` spanning `outer ⊇ first`.
fn nested_frame(first: &DMatrix<f64>, outer: &RealSubspace, m: usize) -> DMatrix<f64> {
    let tol = outer.tol();
    let mut frame = DMatrix::zeros(m, m);
    let p = first.ncols();
    frame.view_mut((0, 0), (m, p)).copy_from(first);
    let proj = DMatrix::<f64>::identity(m, m) - first * first.transpose();
    let (y, _) = RealSubspace::from_columns_scaled(&(&proj * outer.basis()), tol, 1.0);
    let q = y.dim();
    frame.view_mut((0, p), (m, q)).copy_from(y.basis());
    let mut used = DMatrix::zeros(m, p + q);
    used.copy_from(&frame.columns(0, p + q));
    let (z, _) = null_space(&used.transpose(), tol, 1.0);
    frame
        .view_mut((0, p + q), (m, z.ncols()))
        .copy_from(&z);
    frame
}

/// Real `B₁` with `K(e^{−B₁} L) = Δ₀ ⊕ (K ∩ V*)`.
///
/// A frame of `K` is brought to the form `{xᵢ + αᵢ} ∪ {ζⱼ}` with `{xᵢ}` an
/// orthonormal basis of `Δ₀ = pr K` and `ζⱼ ∈ Ann D`; then
/// `B₁(xᵢ, ·) = αᵢ` on `D`, `B₁ = 0` on the complement of `Δ₀` in `D`
/// paired with itself and off `D`.
pub fn split_k_correction(l: &DiracPoint) -> DMatrix<f64> {
    let inv = l.invariants();
    split_k_correction_from(&inv)
}

fn split_k_correction_from(inv: &InvariantRecord) -> DMatrix<f64> {
    let m = inv.m;
    let k = inv.k_basis.basis();
    if k.ncols() == 0 {
        return DMatrix::zeros(m, m);
    }
    let kv = k.rows(0, m).into_owned();
    let kc = k.rows(m, m).into_owned();
    let d = svd(&kv);
    let rho = inv.rank_delta0.min(d.singular_values.len());
    if rho == 0 {
        return DMatrix::zeros(m, m);
    }
    let x = d.u.columns(0, rho).into_owned();
    let mut alpha = DMatrix::zeros(m, rho);
    for i in 0..rho {
        let col = &kc * d.v.column(i) / d.singular_values[i];
        alpha.set_column(i, &col);
    }
    let frame = nested_frame(&x, &inv.d, m);
    let dim_d = inv.d.dim().max(rho);
    // α(o_j) for every frame vector o_j of D.
    let values = alpha.transpose() * frame.columns(0, dim_d);
    let mut b = DMatrix::zeros(m, m);
    for i in 0..rho {
        for j in 0..dim_d {
            if j < rho {
                b[(i, j)] = 0.5 * (values[(i, j)] - values[(j, i)]);
            } else {
                b[(i, j)] = values[(i, j)];
                b[(j, i)] = -values[(i, j)];
            }
        }
    }
    &frame * b * frame.transpose()
}

/// Data of `L = e^B (L_{iω_Δ} × L_{(C,J)})` with respect to `V = Δ ⊕ N`.
#[derive(Debug, Clone)]
pub struct NormalForm {
    pub b: DMatrix<f64>,
    pub delta: RealSubspace,
    /// `ω_Δ` in the stored basis of `delta`; possibly degenerate.
    pub omega_delta: DMatrix<f64>,
    /// Euclidean-orthogonal complement `N` of `Δ`.
    pub complement: RealSubspace,
    /// `T₁,₀ ⊂ N_ℂ`, in coordinates of `V`.
    pub t10: ComplexSubspace,
    pub triple: Triple,
    /// Gap between the reconstruction and the input.
    pub residual: f64,
}

/// The CR block `(C, J)` of a normal form: a real basis of `C ⊂ N` and the
/// matrix of `J` in that basis.
#[derive(Debug, Clone)]
pub struct CrBlock {
    pub c: RealSubspace,
    pub j: DMatrix<f64>,
}

impl NormalForm {
    /// `e^B (L_{iω_Δ} × L_{(C,J)})` expressed in the coordinates of `V`.
    pub fn reconstruct(&self) -> Result<DiracPoint, ClassifyError> {
        let m = self.delta.ambient_dim();
        let presym = DiracPoint::from_presymplectic_with_tol(&self.omega_delta, self.delta.tol())?;
        let n = self.complement.basis();
        let t10_n = ComplexSubspace::from_columns(
            &(lift::<Complex64>(n).adjoint() * self.t10.basis()),
            self.t10.tol(),
        );
        let cr = DiracPoint::from_cr(&t10_n)?;
        let mut frame = DMatrix::zeros(m, m);
        frame
            .view_mut((0, 0), (m, self.delta.dim()))
            .copy_from(self.delta.basis());
        frame
            .view_mut((0, self.delta.dim()), (m, n.ncols()))
            .copy_from(n);
        let model = presym.product(&cr).transform(&frame)?;
        Ok(model.b_transform_real(&self.b)?)
    }

    pub fn cr_block(&self) -> Result<CrBlock, ClassifyError> {
        let c = self.t10.sum(&self.t10.conjugate())?.real_points()?;
        let q = self.t10.dim();
        if q == 0 {
            return Ok(CrBlock {
                c,
                j: DMatrix::zeros(0, 0),
            });
        }
        let t = self.t10.basis();
        let mut w = DMatrix::zeros(t.nrows(), 2 * q);
        w.view_mut((0, 0), (t.nrows(), q)).copy_from(t);
        w.view_mut((0, q), (t.nrows(), q))
            .copy_from(&t.map(|z| z.conj()));
        let cc = lift::<Complex64>(c.basis());
        // Coordinates of the real basis of C in the eigenbasis (T₁,₀, T₀,₁).
        let coords = least_squares(&w, &cc);
        let mut eig = coords.clone();
        for i in 0..q {
            for j in 0..coords.ncols() {
                eig[(i, j)] *= Complex64::i();
                eig[(q + i, j)] *= -Complex64::i();
            }
        }
        let jc = cc.adjoint() * (&w * eig);
        Ok(CrBlock {
            c,
            j: jc.map(|z| z.re),
        })
    }
}

/// Real two-form on `V` whose complex-bilinear extension restricts on
/// `Δ_ℂ ⊕ T₁,₀ ⊕ T₀,₁` to `Re γ_ΔΔ`, `γ` on the `(Δ, T₁,₀)` and
/// `(T₁,₀, T₁,₀)` blocks, their conjugates on the `T₀,₁` blocks, and zero
/// on `T₁,₀ × T₀,₁` and off `D`.
fn conjugate_symmetric_extension(
    delta: &DMatrix<f64>,
    t10: &DMatrix<Complex64>,
    gamma: &DMatrix<Complex64>,
) -> DMatrix<f64> {
    let m = delta.nrows();
    let d = delta.ncols();
    let q = t10.ncols();
    let mut w = DMatrix::<Complex64>::zeros(m, d + 2 * q);
    w.view_mut((0, 0), (m, d)).copy_from(&lift(delta));
    w.view_mut((0, d), (m, q)).copy_from(t10);
    w.view_mut((0, d + q), (m, q))
        .copy_from(&t10.map(|z| z.conj()));
    let span = d + 2 * q;
    let (z, _) = null_space(&w.adjoint(), 1e-9, 1.0);
    let mut full = DMatrix::<Complex64>::zeros(m, m);
    full.view_mut((0, 0), (m, span)).copy_from(&w);
    full.view_mut((0, span), (m, m - span))
        .copy_from(&z.columns(0, m - span));
    let mut beta = DMatrix::<Complex64>::zeros(m, m);
    for a in 0..d {
        for b in 0..d {
            beta[(a, b)] = Complex64::new(gamma[(a, b)].re, 0.0);
        }
        for j in 0..q {
            let g = gamma[(a, d + j)];
            beta[(a, d + j)] = g;
            beta[(d + j, a)] = -g;
            beta[(a, d + q + j)] = g.conj();
            beta[(d + q + j, a)] = -g.conj();
        }
    }
    for i in 0..q {
        for j in 0..q {
            let g = gamma[(d + i, d + j)];
            beta[(d + i, d + j)] = g;
            beta[(d + q + i, d + q + j)] = g.conj();
        }
    }
    // B(wₐ, w_b) = β_ab  ⇔  B = W⁻ᵀ β W⁻¹.
    let inv = least_squares(&full, &DMatrix::identity(m, m));
    let b = inv.transpose() * beta * inv;
    let re = b.map(|z| z.re);
    (&re - re.transpose()) * 0.5
}

/// `ε` of `l` evaluated on the columns of `frame ⊂ E`.
fn form_on(l: &DiracPoint, frame: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let coeffs = l.range().basis().adjoint() * frame;
    coeffs.transpose() * l.eps() * coeffs
}

/// `Δ`, its complement `N`, and `T₁,₀ = P_N E` for a structure with
/// `E = Δ_ℂ ⊕ T₁,₀`.
fn split_range(
    l: &DiracPoint,
    inv: &InvariantRecord,
) -> (RealSubspace, DMatrix<Complex64>) {
    let complement = inv.delta.orthogonal_complement();
    let n = lift::<Complex64>(complement.basis());
    let projected = &n * (n.adjoint() * l.range().basis());
    let (t10, _) = ComplexSubspace::from_columns_scaled(&projected, l.tol(), 1.0);
    (complement, t10.basis().clone())
}

fn frame_with(delta: &RealSubspace, t10: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let m = delta.ambient_dim();
    let d = delta.dim();
    let mut f = DMatrix::zeros(m, d + t10.ncols());
    f.view_mut((0, 0), (m, d))
        .copy_from(&lift::<Complex64>(delta.basis()));
    f.view_mut((0, d), (m, t10.ncols())).copy_from(t10);
    f
}

/// Pointwise normal form `L = e^B (L_{iω_Δ} × L_{(C,J)})`.
pub fn normal_form(l: &DiracPoint) -> Result<NormalForm, ClassifyError> {
    let inv = l.invariants();
    let b1 = split_k_correction_from(&inv);
    let l1 = l.b_transform_real(&(-&b1))?;
    let inv1 = l1.invariants();
    let (complement, t10) = split_range(&l1, &inv1);
    let frame = frame_with(&inv1.delta, &t10);
    let mut gamma = form_on(&l1, &frame);
    let d = inv1.delta.dim();
    for a in 0..d {
        for b in 0..d {
            gamma[(a, b)] -= Complex64::new(0.0, inv1.omega_delta[(a, b)]);
        }
    }
    let b2 = conjugate_symmetric_extension(inv1.delta.basis(), &t10, &gamma);
    let tol = l.tol();
    let mut nf = NormalForm {
        b: b1 + b2,
        delta: inv1.delta.clone(),
        omega_delta: inv1.omega_delta.clone(),
        complement,
        t10: ComplexSubspace::from_columns(&t10, tol),
        triple: inv.triple(),
        residual: 0.0,
    };
    nf.residual = nf.reconstruct()?.gap(l);
    if nf.residual >= RECONSTRUCTION_TOL {
        return Err(ClassifyError::ReconstructionFailure {
            residual: nf.residual,
        });
    }
    Ok(nf)
}

/// `L = e^B L(Δ_ℂ, iω)` for a structure of type zero.
#[derive(Debug, Clone)]
pub struct Type0NormalForm {
    pub delta: RealSubspace,
    /// `ω = Im ε|_Δ` in the stored basis of `delta`.
    pub omega: DMatrix<f64>,
    /// `Re ε|_Δ`, extended by zero off `Δ`.
    pub b: DMatrix<f64>,
    pub residual: f64,
}

impl Type0NormalForm {
    pub fn reconstruct(&self) -> Result<DiracPoint, ClassifyError> {
        let range = self.delta.complexify();
        let eps = self.omega.map(|w| Complex64::new(0.0, w));
        Ok(DiracPoint::from_graph(&range, &eps)?.b_transform_real(&self.b)?)
    }
}

pub fn type0_normal_form(l: &DiracPoint) -> Result<Type0NormalForm, ClassifyError> {
    let inv = l.invariants();
    if inv.k != 0 {
        return Err(ClassifyError::TypeNotZero { k: inv.k });
    }
    let form = restrict_form(l.range(), l.eps(), &inv.delta);
    let re = form.map(|z| z.re);
    let re = (&re - re.transpose()) * 0.5;
    let im = form.map(|z| z.im);
    let omega = (&im - im.transpose()) * 0.5;
    let basis = inv.delta.basis();
    let mut nf = Type0NormalForm {
        delta: inv.delta.clone(),
        omega,
        b: basis * re * basis.transpose(),
        residual: 0.0,
    };
    nf.residual = nf.reconstruct()?.gap(l);
    if nf.residual >= RECONSTRUCTION_TOL {
        return Err(ClassifyError::ReconstructionFailure {
            residual: nf.residual,
        });
    }
    Ok(nf)
}

/// `L = e^B L(E, 0)` for a structure of maximal type.
#[derive(Debug, Clone)]
pub struct MaxTypeNormalForm {
    pub range: ComplexSubspace,
    pub b: DMatrix<f64>,
    pub residual: f64,
}

impl MaxTypeNormalForm {
    pub fn reconstruct(&self) -> Result<DiracPoint, ClassifyError> {
        let q = self.range.dim();
        Ok(DiracPoint::from_graph(&self.range, &DMatrix::zeros(q, q))?.b_transform_real(&self.b)?)
    }
}

pub fn max_type_normal_form(l: &DiracPoint) -> Result<MaxTypeNormalForm, ClassifyError> {
    let inv = l.invariants();
    let max = (inv.m - inv.r) / 2;
    if inv.k != max {
        return Err(ClassifyError::TypeNotMaximal { k: inv.k, max });
    }
    let (_, t10) = split_range(l, &inv);
    let frame = frame_with(&inv.delta, &t10);
    let gamma = form_on(l, &frame);
    let b = conjugate_symmetric_extension(inv.delta.basis(), &t10, &gamma);
    let mut nf = MaxTypeNormalForm {
        range: l.range().clone(),
        b,
        residual: 0.0,
    };
    nf.residual = nf.reconstruct()?.gap(l);
    if nf.residual >= RECONSTRUCTION_TOL {
        return Err(ClassifyError::ReconstructionFailure {
            residual: nf.residual,
        });
    }
    Ok(nf)
}

/// `Δ = 0`, i.e. real index equals order and the type is maximal.
pub fn is_cr_type(l: &DiracPoint) -> bool {
    l.invariants().rank_delta == 0
}

/// Integer point of the invariant tetrahedron.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TetraCoord {
    pub m: usize,
    pub r: usize,
    pub s: usize,
    pub k: usize,
    /// Order of the complexified associated real Dirac structure, `s + 2k`.
    pub hat_order: usize,
}

impl TetraCoord {
    pub fn new(m: usize, t: Triple) -> Result<Self, Violation> {
        admissibility(m, t)?;
        Ok(Self {
            m,
            r: t.r,
            s: t.s,
            k: t.k,
            hat_order: t.s + 2 * t.k,
        })
    }

    pub fn triple(&self) -> Triple {
        Triple::new(self.r, self.s, self.k)
    }
}

/// Tetrahedron coordinates of `L`, plus the order of `(L̂)_ℂ` recomputed
/// directly from `hat(L)`.
pub fn tetra_coords(l: &DiracPoint) -> (TetraCoord, usize) {
    let inv = l.invariants();
    let coord = TetraCoord::new(inv.m, inv.triple())
        .expect("invariants of a lagrangian are admissible");
    let direct = DiracPoint::complexify_real_dirac(&hat(l))
        .map(|h| h.invariants().s)
        .unwrap_or(usize::MAX);
    (coord, direct)
}

/// `L' = {X + ξ|_D | X + ξ ∈ L}` on a leaf `D` with `K(L) = Ann D`, in the
/// coordinates of the stored basis of `D`.
pub fn leaf_restriction(l: &DiracPoint, leaf: &RealSubspace) -> Result<DiracPoint, ClassifyError> {
    let m = l.dim_v();
    if leaf.ambient_dim() != m {
        return Err(ClassifyError::LeafDimension {
            leaf: leaf.ambient_dim(),
            ambient: m,
        });
    }
    let inv = l.invariants();
    let ann = leaf.annihilator_in_pairing_space();
    let gap = inv.k_basis.gap(&ann)?;
    if gap >= RECONSTRUCTION_TOL {
        return Err(ClassifyError::KMismatch { gap });
    }
    let d = leaf.dim();
    let dt = lift::<Complex64>(&leaf.basis().transpose());
    let basis = l.space().basis();
    let mut restricted = DMatrix::zeros(2 * d, basis.ncols());
    restricted
        .view_mut((0, 0), (d, basis.ncols()))
        .copy_from(&(&dt * basis.rows(0, m)));
    restricted
        .view_mut((d, 0), (d, basis.ncols()))
        .copy_from(&(&dt * basis.rows(m, m)));
    let (space, _) = ComplexSubspace::from_columns_scaled(&restricted, l.tol(), 1.0);
    Ok(DiracPoint::from_space(space)?)
}

/// Outcome of [`splitting_verify`].
#[derive(Debug, Clone, Serialize)]
pub struct SplittingReport {
    pub product: Triple,
    pub cr_factor: Triple,
    pub symplectic_factor: Triple,
    /// Invariants of the backward image along the first-factor inclusion.
    pub recovered: Triple,
    /// Gap between that backward image and `e^{ι*B} L_cr`.
    pub factor_gap: f64,
    /// Gap between the second-factor backward image and `e^{ι*B} L_{iω}`.
    pub symplectic_gap: f64,
    /// `dim ker ω` compared with `r − s` of the product.
    pub kernel_rank: usize,
    pub additive: bool,
}

impl SplittingReport {
    pub fn passed(&self) -> bool {
        self.additive
            && self.recovered.r == self.cr_factor.s
            && self.recovered.s == self.cr_factor.s
            && self.factor_gap < RECONSTRUCTION_TOL
            && self.symplectic_gap < RECONSTRUCTION_TOL
            && self.kernel_rank == self.product.r - self.product.s
    }
}

fn inclusion(m: usize, offset: usize, dim: usize) -> DMatrix<f64> {
    DMatrix::from_fn(m, dim, |i, j| if i == offset + j { 1.0 } else { 0.0 })
}

fn diagonal_block(b: &DMatrix<f64>, offset: usize, dim: usize) -> DMatrix<f64> {
    b.view((offset, offset), (dim, dim)).into_owned()
}

/// Builds `L = e^B (L_cr × L_{iω})` and checks the conclusion of the
/// splitting statement: the backward image along the first-factor inclusion
/// is `e^{ι*B} L_cr` with `(r, s) = (s, s)`, invariants are additive, and
/// `ω` has a kernel of rank `r − s`.
pub fn splitting_verify(
    l_cr: &DiracPoint,
    omega: &DMatrix<f64>,
    b: &DMatrix<f64>,
) -> Result<SplittingReport, ClassifyError> {
    let inv_cr = l_cr.invariants();
    if inv_cr.rank_delta != 0 || inv_cr.r != inv_cr.s {
        return Err(ClassifyError::NotCrType {
            triple: inv_cr.triple(),
            rank_delta: inv_cr.rank_delta,
        });
    }
    let m1 = l_cr.dim_v();
    let m2 = omega.nrows();
    let m = m1 + m2;
    let presym = DiracPoint::from_presymplectic_with_tol(omega, l_cr.tol())?;
    let l = l_cr.product(&presym).b_transform_real(b)?;
    let inv = l.invariants();
    let inv_w = presym.invariants();

    let first = l.backward_image(&inclusion(m, 0, m1))?;
    let expected_first = l_cr.b_transform_real(&diagonal_block(b, 0, m1))?;
    let second = l.backward_image(&inclusion(m, m1, m2))?;
    let expected_second = presym.b_transform_real(&diagonal_block(b, m1, m2))?;

    let kernel = {
        let (k, _) = null_space(omega, l_cr.tol(), omega.norm().max(1.0));
        k.ncols()
    };
    let additive = inv.r == inv_cr.r + inv_w.r
        && inv.s == inv_cr.s + inv_w.s
        && inv.k == inv_cr.k + inv_w.k;
    Ok(SplittingReport {
        product: inv.triple(),
        cr_factor: inv_cr.triple(),
        symplectic_factor: inv_w.triple(),
        recovered: first.invariants().triple(),
        factor_gap: first.gap(&expected_first),
        symplectic_gap: second.gap(&expected_second),
        kernel_rank: kernel,
        additive,
    })
}

/// Membership residual of a vector in a real subspace, relative to its norm.
pub fn relative_distance(space: &RealSubspace, v: &DVector<f64>) -> f64 {
    let n = v.norm();
    if n == 0.0 {
        0.0
    } else {
        space.distance_to(v) / n
    }
}
