//! Seeded generators of lagrangian subspaces with prescribed invariants.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    admissibility, canonical_cr, canonical_two_form, DiracError, DiracPoint, Triple,
};
use crate::subspace::{svd, ComplexSubspace, DEFAULT_TOL};

/// What [`random_lagrangian`] should produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    /// A B-transformed, linearly moved model of the `(r, s, k)` cell.
    Cell(Triple),
    /// `L(E, ε)` with a random range of random dimension and a random form.
    Any,
}

/// Random real skew matrix with entries in `(−scale, scale)`.
pub fn random_skew<R: Rng>(rng: &mut R, m: usize, scale: f64) -> DMatrix<f64> {
    let mut b = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in (i + 1)..m {
            let v = rng.gen_range(-scale..scale);
            b[(i, j)] = v;
            b[(j, i)] = -v;
        }
    }
    b
}

/// Random orthogonal matrix (orthogonal polar factor of a random matrix).
pub fn random_orthogonal<R: Rng>(rng: &mut R, m: usize) -> DMatrix<f64> {
    if m == 0 {
        return DMatrix::zeros(0, 0);
    }
    let a = DMatrix::from_fn(m, m, |_, _| rng.gen_range(-1.0..1.0));
    let d = svd(&a);
    d.u * d.v.transpose()
}

/// Well-conditioned random isomorphism `Q₁ · diag(d) · Q₂` with `d ∈ [0.5, 2]`.
fn random_isomorphism<R: Rng>(rng: &mut R, m: usize) -> DMatrix<f64> {
    let q1 = random_orthogonal(rng, m);
    let q2 = random_orthogonal(rng, m);
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_fn(m, |_, _| {
        rng.gen_range(0.5..2.0)
    }));
    q1 * d * q2
}

fn cell_model(m: usize, t: Triple) -> Result<(DiracPoint, usize), DiracError> {
    let two_n = m - t.r;
    let delta_dim = two_n - 2 * t.k + t.r - t.s;
    let omega = canonical_two_form(two_n / 2 - t.k, t.r - t.s);
    let presymplectic = DiracPoint::from_presymplectic(&omega)?;
    let cr = DiracPoint::from_cr(&canonical_cr(t.k, t.s, DEFAULT_TOL))?;
    Ok((presymplectic.product(&cr), delta_dim))
}

/// Deterministic random lagrangian in `(ℂᵐ ⊕ ℂᵐ*)`.
///
/// For [`Profile::Cell`] the model `L_{iω} × L_{(C,J)}` of the cell is
/// B-transformed by a real two-form plus an imaginary two-form vanishing on
/// `Δ × Δ` (both with entries bounded by one), then moved by a random
/// well-conditioned linear isomorphism; none of these change `(r, s, k)`.
pub fn random_lagrangian(m: usize, seed: u64, profile: Profile) -> Result<DiracPoint, DiracError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match profile {
        Profile::Cell(t) => {
            admissibility(m, t).map_err(|violation| DiracError::Inadmissible {
                m,
                r: t.r,
                s: t.s,
                k: t.k,
                violation,
            })?;
            let (model, delta_dim) = cell_model(m, t)?;
            let real = random_skew(&mut rng, m, 1.0);
            let mut imag = random_skew(&mut rng, m, 1.0);
            for i in 0..delta_dim {
                for j in 0..delta_dim {
                    imag[(i, j)] = 0.0;
                }
            }
            let b = DMatrix::from_fn(m, m, |i, j| Complex64::new(real[(i, j)], imag[(i, j)]));
            let g = random_isomorphism(&mut rng, m);
            model.b_transform(&b)?.transform(&g)
        }
        Profile::Any => {
            let p = rng.gen_range(0..=m);
            let vectors: Vec<_> = (0..p)
                .map(|_| {
                    nalgebra::DVector::from_fn(m, |_, _| {
                        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                    })
                })
                .collect();
            let range = ComplexSubspace::span(&vectors, m, DEFAULT_TOL)?;
            let q = range.dim();
            let re = random_skew(&mut rng, q, 1.0);
            let im = random_skew(&mut rng, q, 1.0);
            let eps = DMatrix::from_fn(q, q, |i, j| Complex64::new(re[(i, j)], im[(i, j)]));
            DiracPoint::from_graph(&range, &eps)
        }
    }
}

/// All admissible `(r, s, k)` for dimension `m`, ordered by `(r, s, k)`.
pub fn admissible_cells(m: usize) -> Vec<Triple> {
    let mut out = Vec::new();
    for r in (0..=m).filter(|r| (m - r) % 2 == 0) {
        for s in 0..=r {
            for k in 0..=(m - r) / 2 {
                out.push(Triple::new(r, s, k));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cell_profiles_hit_their_cell() {
        for m in 1..=6 {
            for (i, t) in admissible_cells(m).into_iter().enumerate() {
                let l = random_lagrangian(m, 17 + i as u64, Profile::Cell(t)).unwrap();
                let inv = l.invariants();
                assert_eq!(inv.triple(), t, "m = {m}");
                assert!(inv.identities_hold(), "{:?}", inv.identity_checks());
            }
        }
    }

    #[test]
    fn symplectic_cell_is_b_transform_of_l_i_omega() {
        let l = random_lagrangian(2, 5, Profile::Cell(Triple::new(0, 0, 0))).unwrap();
        assert_eq!(l.invariants().triple(), Triple::new(0, 0, 0));
        assert_eq!(l.range().dim(), 2);
    }

    #[test]
    fn real_cell_is_conjugation_stable() {
        let l = random_lagrangian(3, 9, Profile::Cell(Triple::new(3, 3, 0))).unwrap();
        assert!(l.gap(&l.conjugate()) < 1e-12);
    }

    #[test]
    fn seeds_are_deterministic() {
        let a = random_lagrangian(5, 42, Profile::Any).unwrap();
        let b = random_lagrangian(5, 42, Profile::Any).unwrap();
        assert_eq!(a.space().basis(), b.space().basis());
        let a = random_lagrangian(4, 7, Profile::Cell(Triple::new(2, 1, 1))).unwrap();
        let b = random_lagrangian(4, 7, Profile::Cell(Triple::new(2, 1, 1))).unwrap();
        assert_eq!(a.space().basis(), b.space().basis());
    }

    #[test]
    fn inadmissible_profile_is_rejected() {
        let err = random_lagrangian(3, 0, Profile::Cell(Triple::new(0, 0, 1))).unwrap_err();
        assert!(matches!(err, DiracError::Inadmissible { .. }));
    }
}
