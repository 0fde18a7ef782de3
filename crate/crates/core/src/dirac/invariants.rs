use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{DiracError, DiracPoint, ReducedGc};
use crate::subspace::{
    null_space, pairing_gram_generic, symmetric_eigen, ComplexSubspace, RealSubspace,
};

/// `(real index, order, type)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Triple {
    pub r: usize,
    pub s: usize,
    pub k: usize,
}

impl Triple {
    pub fn new(r: usize, s: usize, k: usize) -> Self {
        Self { r, s, k }
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.r, self.s, self.k)
    }
}

/// Constraint violated by an inadmissible `(r, s, k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Violation {
    RealIndexExceedsDim,
    Parity,
    OrderExceedsRealIndex,
    TypeExceedsMaximum,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msg = match self {
            Violation::RealIndexExceedsDim => "real index ≤ dim violated",
            Violation::Parity => "parity violated: dim ≡ real index (mod 2)",
            Violation::OrderExceedsRealIndex => "order ≤ real index violated",
            Violation::TypeExceedsMaximum => "type ≤ (dim − real index)/2 violated",
        };
        f.write_str(msg)
    }
}

/// Checks `r ≤ m`, `m ≡ r (mod 2)`, `0 ≤ s ≤ r`, `0 ≤ k ≤ (m − r)/2`.
pub fn admissibility(m: usize, t: Triple) -> Result<(), Violation> {
    if t.r > m {
        return Err(Violation::RealIndexExceedsDim);
    }
    if (m - t.r) % 2 != 0 {
        return Err(Violation::Parity);
    }
    if t.s > t.r {
        return Err(Violation::OrderExceedsRealIndex);
    }
    if t.k > (m - t.r) / 2 {
        return Err(Violation::TypeExceedsMaximum);
    }
    Ok(())
}

/// Pointwise invariants and associated distributions of a lagrangian `L`.
#[derive(Debug, Clone)]
pub struct InvariantRecord {
    pub m: usize,
    /// Real index `dim(L ∩ L̄)`.
    pub r: usize,
    /// Order `cork D`.
    pub s: usize,
    /// Type `½(rk D − rk Δ)`.
    pub k: usize,
    pub rank_e: usize,
    pub rank_delta: usize,
    pub rank_d: usize,
    /// `dim ker ω_Δ`.
    pub rank_delta0: usize,
    /// `ω_Δ = Im ε|_Δ` on the stored basis of [`Self::delta`].
    pub omega_delta: DMatrix<f64>,
    /// `Δ = re(E ∩ Ē)`.
    pub delta: RealSubspace,
    /// `D = re(E + Ē)`.
    pub d: RealSubspace,
    /// `Δ₀ = ker ω_Δ`.
    pub delta0: RealSubspace,
    /// `K = re(L ∩ L̄) ⊂ V ⊕ V*`.
    pub k_basis: RealSubspace,
    /// Gap between `ker ω_Δ` and `pr_V K`; the two must coincide.
    pub delta0_projection_gap: f64,
    /// Some rank decision had no clear singular-value gap.
    pub marginal: bool,
}

impl InvariantRecord {
    pub fn triple(&self) -> Triple {
        Triple::new(self.r, self.s, self.k)
    }

    /// Named identity checks between the invariants.
    pub fn identity_checks(&self) -> Vec<(&'static str, bool)> {
        let (m, r, s, k) = (self.m as i64, self.r as i64, self.s as i64, self.k as i64);
        let parity_ok = (m - r) % 2 == 0;
        let two_n = m - r;
        vec![
            ("type + order = cork E", k + s == m - self.rank_e as i64),
            ("ri = order + rk Δ₀", r == s + self.rank_delta0 as i64),
            ("rk D = 2n + r − s", self.rank_d as i64 == two_n + r - s),
            ("rk Δ = 2(n − k) + r − s", self.rank_delta as i64 == two_n - 2 * k + r - s),
            ("rk Δ₀ = r − s", self.rank_delta0 as i64 == r - s),
            ("dim ≡ ri (mod 2)", parity_ok),
            ("0 ≤ order ≤ ri", s <= r),
            ("0 ≤ type ≤ (dim − ri)/2", parity_ok && k <= two_n / 2),
            ("rk D − rk Δ even", (self.rank_d as i64 - self.rank_delta as i64) % 2 == 0),
            ("pr K = ker ω_Δ", self.delta0_projection_gap < 1e-6),
        ]
    }

    pub fn identities_hold(&self) -> bool {
        self.identity_checks().iter().all(|(_, ok)| *ok)
    }
}

impl DiracPoint {
    /// Real index, order, type and the associated distributions.
    pub fn invariants(&self) -> InvariantRecord {
        compute(self).expect("intersections of equal-ambient subspaces")
    }
}

fn compute(l: &DiracPoint) -> Result<InvariantRecord, DiracError> {
    let m = l.dim_v();
    let tol = l.tol();
    let space = l.space();
    let mut marginal = l.range_marginal();

    let (cap_l, mg) = space.intersect_ranked(&space.conjugate())?;
    marginal |= mg;
    let r = cap_l.dim();
    let (k_basis, mg) = cap_l.real_points_ranked()?;
    marginal |= mg;

    let e = l.range();
    let e_bar = e.conjugate();
    let (cap_e, mg) = e.intersect_ranked(&e_bar)?;
    marginal |= mg;
    let (delta, mg) = cap_e.real_points_ranked()?;
    marginal |= mg;
    let (cup_e, mg) = e.sum_ranked(&e_bar)?;
    marginal |= mg;
    let (d, mg) = cup_e.real_points_ranked()?;
    marginal |= mg;

    let rank_e = e.dim();
    let rank_delta = delta.dim();
    let rank_d = d.dim();
    let s = m - rank_d;
    let k = rank_d.saturating_sub(rank_delta) / 2;

    let omega_delta = restrict_imaginary(e, l.eps(), &delta);
    let eps_scale = if l.eps().is_empty() {
        1.0
    } else {
        l.eps().norm().max(1.0)
    };
    let (kernel, dec) = null_space(&omega_delta, tol, eps_scale);
    marginal |= dec.marginal;
    let delta0 = if rank_delta == 0 {
        RealSubspace::zero(m, tol)
    } else {
        RealSubspace::from_columns_scaled(&(delta.basis() * kernel), tol, 1.0).0
    };

    let k_vec = k_basis.basis().rows(0, m).into_owned();
    let (projected, dec) = RealSubspace::from_columns_scaled(&k_vec, tol, 1.0);
    marginal |= dec.marginal;
    let delta0_projection_gap = delta0.gap(&projected)?;

    Ok(InvariantRecord {
        m,
        r,
        s,
        k,
        rank_e,
        rank_delta,
        rank_d,
        rank_delta0: delta0.dim(),
        omega_delta,
        delta,
        d,
        delta0,
        k_basis,
        delta0_projection_gap,
        marginal,
    })
}

/// `Im ε|_W` for a real subspace `W ⊆ E`, on the stored basis of `W`.
pub(crate) fn restrict_imaginary(
    range: &ComplexSubspace,
    eps: &DMatrix<num_complex::Complex64>,
    w: &RealSubspace,
) -> DMatrix<f64> {
    let q = w.dim();
    if q == 0 {
        return DMatrix::zeros(0, 0);
    }
    let restricted = restrict_form(range, eps, w);
    let im = restricted.map(|z| z.im);
    (&im - im.transpose()) * 0.5
}

/// `ε|_W` (complex) on the stored basis of a real subspace `W ⊆ E`.
pub(crate) fn restrict_form(
    range: &ComplexSubspace,
    eps: &DMatrix<num_complex::Complex64>,
    w: &RealSubspace,
) -> DMatrix<num_complex::Complex64> {
    let wc = w.complexify();
    let coeffs = range.basis().adjoint() * wc.basis();
    coeffs.transpose() * eps * coeffs
}

pub(super) fn reduced_gc(l: &DiracPoint) -> Result<ReducedGc, DiracError> {
    let m = l.dim_v();
    let tol = l.tol();
    let space = l.space();
    let cap = space.intersect(&space.conjugate())?;
    let k = cap.real_points()?;
    let k_perp = space.sum(&space.conjugate())?.real_points()?;
    // Euclidean complement of K inside K⊥.
    let proj = DMatrix::<f64>::identity(2 * m, 2 * m) - k.projector();
    let (q, _) = RealSubspace::from_columns_scaled(&(proj * k_perp.basis()), tol, 1.0);
    let qdim = q.dim();
    let half = qdim / 2;
    if qdim == 0 {
        let point = DiracPoint::from_space(ComplexSubspace::zero(0, tol))?;
        return Ok(ReducedGc {
            point,
            frame: DMatrix::zeros(2 * m, 0),
        });
    }
    let p: DMatrix<f64> = pairing_gram_generic(m);
    let g = q.basis().transpose() * p * q.basis();
    let (eigenvalues, eigenvectors) = symmetric_eigen(&g);
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for (i, &lambda) in eigenvalues.iter().enumerate() {
        let v = eigenvectors.column(i) / lambda.abs().sqrt();
        if lambda > 0.0 {
            pos.push(v);
        } else {
            neg.push(v);
        }
    }
    if pos.len() != half || neg.len() != half {
        return Err(DiracError::NotLagrangian {
            dim: pos.len(),
            expected: half,
            isotropy: f64::NAN,
        });
    }
    // e_i = (u_i + w_i)/2, f_i = (u_i − w_i)/2 gives the standard pairing.
    let mut adapted = DMatrix::<f64>::zeros(qdim, qdim);
    for i in 0..half {
        adapted.set_column(i, &((&pos[i] + &neg[i]) * 0.5));
        adapted.set_column(half + i, &((&pos[i] - &neg[i]) * 0.5));
    }
    let adapted_inv = adapted
        .clone()
        .try_inverse()
        .ok_or(DiracError::SingularMap)?;
    let coords = crate::subspace::lift::<num_complex::Complex64>(&(adapted_inv * q.basis().transpose()))
        * space.basis();
    let (reduced, _) = ComplexSubspace::from_columns_scaled(&coords, tol, 0.0);
    let point = DiracPoint::from_space(reduced)?;
    Ok(ReducedGc {
        point,
        frame: q.basis() * adapted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirac::{canonical_complex_structure, canonical_cr, canonical_two_form};
    use crate::subspace::DEFAULT_TOL;

    #[test]
    fn covector_space_invariants() {
        for m in 1..5 {
            let inv = DiracPoint::covectors(m).invariants();
            assert_eq!(inv.triple(), Triple::new(m, m, 0));
            assert_eq!(inv.rank_delta, 0);
            assert!(inv.identities_hold());
        }
    }

    #[test]
    fn catalog_invariants() {
        let l = DiracPoint::from_complex_structure(&canonical_complex_structure(2)).unwrap();
        assert_eq!(l.invariants().triple(), Triple::new(0, 0, 2));

        let cr = DiracPoint::from_cr(&canonical_cr(1, 1, DEFAULT_TOL)).unwrap();
        assert_eq!(cr.invariants().triple(), Triple::new(1, 1, 1));

        let omega = canonical_two_form(1, 1);
        let inv = DiracPoint::from_presymplectic(&omega).unwrap().invariants();
        assert_eq!(inv.triple(), Triple::new(1, 0, 0));
        assert!(inv.identities_hold());
    }

    #[test]
    fn complexified_symplectic_graph() {
        let range = RealSubspace::full(2, DEFAULT_TOL);
        let graph = crate::dirac::real_graph(&range, &canonical_two_form(1, 0));
        let l = DiracPoint::complexify_real_dirac(&graph).unwrap();
        assert_eq!(l.invariants().triple(), Triple::new(2, 0, 0));
    }

    #[test]
    fn admissibility_rules() {
        assert!(admissibility(3, Triple::new(1, 1, 0)).is_ok());
        assert_eq!(
            admissibility(3, Triple::new(1, 2, 0)),
            Err(Violation::OrderExceedsRealIndex)
        );
        assert_eq!(admissibility(3, Triple::new(0, 0, 1)), Err(Violation::Parity));
        assert_eq!(
            admissibility(4, Triple::new(0, 0, 3)),
            Err(Violation::TypeExceedsMaximum)
        );
        assert_eq!(
            admissibility(2, Triple::new(4, 0, 0)),
            Err(Violation::RealIndexExceedsDim)
        );
    }

    #[test]
    fn reduced_gc_cases() {
        let l = DiracPoint::from_complex_structure(&canonical_complex_structure(2)).unwrap();
        let red = l.reduced_gc().unwrap();
        assert_eq!(red.point.dim_v(), 4);
        assert_eq!(red.point.real_index(), 0);

        let red = DiracPoint::covectors(3).reduced_gc().unwrap();
        assert_eq!(red.point.dim_v(), 0);

        let cr = DiracPoint::from_cr(&canonical_cr(1, 1, DEFAULT_TOL)).unwrap();
        let red = cr.reduced_gc().unwrap();
        assert_eq!(red.point.dim_v(), 2);
        assert_eq!(red.point.real_index(), 0);
        let j = red.point.gc_operator().unwrap();
        assert!((&j * &j + DMatrix::<f64>::identity(4, 4)).norm() < 1e-10);
    }
}
