//! Property tests over randomly generated subspaces, lagrangians, fields and
//! expressions.

mod common;

use cdirac::classify::{hat, hat_from_invariants, is_cr_type, normal_form, tetra_coords, TetraCoord};
use cdirac::dirac::linear::{b_transform, product};
use cdirac::dirac::{admissibility, admissible_cells, random_lagrangian, random_skew, DiracPoint, Profile};
use cdirac::exprdsl::parse;
use cdirac::field::{analyze_grid, FieldSpec, FrameEntry, Grid, GridBox, GridOptions};
use cdirac::subspace::{ComplexSubspace, RealSubspace, DEFAULT_TOL};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-8;

fn complex_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(rows, cols, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

fn hcat(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let mut out = DMatrix::zeros(a.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), (a.nrows(), a.ncols())).copy_from(a);
    out.view_mut((0, a.ncols()), (b.nrows(), b.ncols())).copy_from(b);
    out
}

/// Two random subspaces of `ℂⁿ` forced to share a common part of dimension `c`.
fn overlapping(seed: u64, n: usize, c: usize, a: usize, b: usize) -> (ComplexSubspace, ComplexSubspace) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let common = complex_matrix(&mut rng, n, c);
    let extra_a = complex_matrix(&mut rng, n, a);
    let extra_b = complex_matrix(&mut rng, n, b);
    (
        ComplexSubspace::from_columns(&hcat(&common, &extra_a), DEFAULT_TOL),
        ComplexSubspace::from_columns(&hcat(&common, &extra_b), DEFAULT_TOL),
    )
}

fn cell_strategy() -> impl Strategy<Value = (usize, u64, usize)> {
    (1usize..=7, any::<u64>(), any::<usize>())
}

fn lagrangian(m: usize, seed: u64, pick: usize) -> DiracPoint {
    let cells = admissible_cells(m);
    let profile = if pick % 3 == 0 {
        Profile::Any
    } else {
        Profile::Cell(cells[pick % cells.len()])
    };
    random_lagrangian(m, seed, profile).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn grassmann_dimension_formula(seed in any::<u64>(), n in 2usize..8, c in 0usize..3, a in 0usize..4, b in 0usize..4) {
        let (x, y) = overlapping(seed, n, c.min(n), a, b);
        let meet = x.intersect(&y).unwrap();
        let join = x.sum(&y).unwrap();
        prop_assert_eq!(meet.dim() + join.dim(), x.dim() + y.dim());
    }

    #[test]
    fn pairing_orthogonal_is_an_involution(seed in any::<u64>(), m in 1usize..5, d in 0usize..9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = ComplexSubspace::from_columns(&complex_matrix(&mut rng, 2 * m, d.min(2 * m)), DEFAULT_TOL);
        let back = a.perp_pairing().unwrap().perp_pairing().unwrap();
        prop_assert!(back.gap(&a).unwrap() < TOL);
    }

    #[test]
    fn conjugation_and_real_points(seed in any::<u64>(), n in 1usize..7, d in 0usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = ComplexSubspace::from_columns(&complex_matrix(&mut rng, n, d.min(n)), DEFAULT_TOL);
        prop_assert!(a.conjugate().conjugate().gap(&a).unwrap() < 1e-14);
        let real = RealSubspace::from_columns(&DMatrix::from_fn(n, d.min(n), |_, _| rng.gen_range(-1.0..1.0)), DEFAULT_TOL);
        let stable = real.complexify();
        prop_assert_eq!(stable.real_points().unwrap().dim(), stable.dim());
    }

    #[test]
    fn gap_is_a_metric(seed in any::<u64>(), n in 2usize..7, d in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = d.min(n);
        let s: Vec<ComplexSubspace> = (0..3)
            .map(|_| ComplexSubspace::from_columns(&complex_matrix(&mut rng, n, d), DEFAULT_TOL))
            .collect();
        let g = |i: usize, j: usize| s[i].gap(&s[j]).unwrap();
        prop_assert!(g(0, 0) < 1e-12);
        prop_assert!((g(0, 1) - g(1, 0)).abs() < 1e-12);
        prop_assert!(g(0, 2) <= g(0, 1) + g(1, 2) + 1e-12);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&g(0, 1)));
    }

    #[test]
    fn random_lagrangians_are_lagrangian((m, seed, pick) in cell_strategy()) {
        let l = lagrangian(m, seed, pick);
        prop_assert_eq!(l.space().dim(), m);
        prop_assert!(l.isotropy_residual() < TOL);
        let inv = l.invariants();
        prop_assert!(admissibility(m, inv.triple()).is_ok());
        prop_assert!(inv.identities_hold());
    }

    #[test]
    fn real_b_transforms_preserve_invariants((m, seed, pick) in cell_strategy(), scale in 0.1f64..3.0) {
        let l = lagrangian(m, seed, pick);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xb);
        let b = random_skew(&mut rng, m, scale);
        let lb = l.b_transform_real(&b).unwrap();
        let (i0, i1) = (l.invariants(), lb.invariants());
        prop_assert_eq!(i0.triple(), i1.triple());
        prop_assert_eq!((i0.rank_delta, i0.rank_d), (i1.rank_delta, i1.rank_d));
        prop_assert!(i0.delta.gap(&i1.delta).unwrap() < TOL);
        prop_assert!(hat(&lb).gap(&hat(&l)).unwrap() < TOL);
    }

    #[test]
    fn products_are_additive_and_split_k((m1, s1, p1) in cell_strategy(), (m2, s2, p2) in cell_strategy()) {
        let a = lagrangian(m1, s1, p1);
        let b = lagrangian(m2, s2, p2);
        let (ia, ib) = (a.invariants(), b.invariants());
        let ip = a.product(&b).invariants();
        prop_assert_eq!((ip.r, ip.s, ip.k), (ia.r + ib.r, ia.s + ib.s, ia.k + ib.k));
        let expected = product(&ia.k_basis, &ib.k_basis);
        prop_assert!(ip.k_basis.gap(&expected).unwrap() < TOL);
    }

    #[test]
    fn graph_data_rebuilds_the_structure((m, seed, pick) in cell_strategy()) {
        let l = lagrangian(m, seed, pick);
        let rebuilt = DiracPoint::from_graph(l.range(), l.eps()).unwrap();
        prop_assert!(rebuilt.gap(&l) < TOL);
    }

    #[test]
    fn hat_is_the_graph_of_omega_delta((m, seed, pick) in cell_strategy()) {
        let l = lagrangian(m, seed, pick);
        let h = hat(&l);
        prop_assert_eq!(h.dim(), m);
        prop_assert!(h.isotropy_residual() < TOL);
        prop_assert!(h.gap(&hat_from_invariants(&l.invariants())).unwrap() < TOL);
    }

    #[test]
    fn imaginary_b_transforms_move_hat((m, seed, pick) in cell_strategy()) {
        let l = lagrangian(m, seed, pick);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x1b);
        let b = random_skew(&mut rng, m, 1.0);
        let lb = l.b_transform(&b.map(|x| Complex64::new(0.0, x))).unwrap();
        prop_assert!(hat(&lb).gap(&b_transform(&hat(&l), &b)).unwrap() < TOL);
    }

    #[test]
    fn cr_type_three_way_agreement((m, seed, pick) in cell_strategy()) {
        let l = lagrangian(m, seed, pick);
        let inv = l.invariants();
        let by_delta = inv.rank_delta == 0;
        let by_triple = inv.r == inv.s && inv.k == (m - inv.r) / 2;
        prop_assert_eq!(is_cr_type(&l), by_delta);
        prop_assert_eq!(by_delta, by_triple);
    }

    #[test]
    fn tetra_coordinates_are_consistent((m, seed, pick) in cell_strategy()) {
        let l = lagrangian(m, seed, pick);
        let (coord, direct) = tetra_coords(&l);
        prop_assert_eq!(coord.hat_order, direct);
        prop_assert!(coord.hat_order <= m);
        prop_assert!(TetraCoord::new(m, coord.triple()).is_ok());
    }

    #[test]
    fn normal_form_roundtrip((m, seed, pick) in cell_strategy()) {
        let l = lagrangian(m, seed, pick);
        let nf = normal_form(&l).unwrap();
        prop_assert!(nf.residual < TOL);
        prop_assert!(nf.reconstruct().unwrap().gap(&l) < TOL);
    }
}

/// `E = ⟨∂x, e^y ∂y + i f(y) ∂z⟩` with `f(y) = a (y − c)`.
fn order_change_field(a: f64, c: f64) -> FieldSpec {
    let f = format!("{a:?} * (y - {c:?})");
    let entry = |v: [&str; 3], w: [&str; 3]| FrameEntry {
        vector: v.iter().map(|s| s.to_string()).collect(),
        covector: w.iter().map(|s| s.to_string()).collect(),
    };
    FieldSpec::new(
        3,
        common::coords(),
        vec![
            entry(["1", "0", "0"], ["0", "i", "0"]),
            entry(["0", "exp(y)", &format!("i * ({f})")], ["-i * exp(y)", "0", "0"]),
            entry(["0", "0", "0"], ["0", &f, "i * exp(y)"]),
        ],
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn grid_strata_are_semicontinuous(a in 0.2f64..3.0, c_index in 0usize..5, res in 3usize..6) {
        let grid = Grid::uniform(GridBox::cube(3, -1.0, 1.0), res).unwrap();
        let c = grid.point(grid.linear_index(&[0, c_index % res, 0]))[1];
        let spec = order_change_field(a, c);
        let opts = GridOptions { skip_involutivity: true, ..GridOptions::default() };
        let rep = analyze_grid(&spec, &grid, &opts);
        prop_assert_eq!(rep.failed, 0);
        prop_assert_eq!(rep.classified() + rep.marginal, grid.len());
        prop_assert!(rep.semicontinuity.holds());
        prop_assert!(rep.max_hat_gap < TOL);
        let special = rep.points.iter().filter(|p| p.point[1] == c).count();
        prop_assert_eq!(rep.stratum(cdirac::dirac::Triple::new(1, 1, 0)).map_or(0, |s| s.count), special);
    }

    #[test]
    fn expression_display_is_a_fixed_point(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tree = common::random_tree(&mut rng, 5);
        let coords = common::coords();
        let first = parse(&common::render(&tree), &coords).unwrap();
        let printed = first.to_string();
        let second = parse(&printed, &coords).unwrap();
        prop_assert_eq!(&second, &first);
        prop_assert_eq!(second.to_string(), printed);
    }

    #[test]
    fn expressions_match_the_reference(seed in any::<u64>(), x in -1.5f64..1.5, y in -1.5f64..1.5, z in -1.5f64..1.5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tree = common::random_tree(&mut rng, 4);
        let expr = parse(&common::render(&tree), &common::coords()).unwrap();
        let p = [x, y, z];
        match (expr.eval(&p).ok(), common::reference(&tree, &p)) {
            (Some(a), Some(b)) => prop_assert!(common::scaled_error(a, b) < 1e-12),
            (None, None) => {}
            (a, b) => prop_assert!(false, "library {:?}, reference {:?}", a, b),
        }
    }
}
