//! Seeded property suites over random lagrangians.
//!
//! Every sample is a pure function of `(suite, dimension, seed)`; samples run
//! in parallel and are merged in seed order, so summaries are reproducible
//! byte for byte.

use std::fmt::Write;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::classify::{
    hat, hat_from_invariants, max_type_normal_form, normal_form, splitting_verify, tetra_coords,
    type0_normal_form, ClassifyError, RECONSTRUCTION_TOL,
};
use crate::dirac::linear::b_transform;
use crate::dirac::{
    admissibility, admissible_cells, backward_image_real, canonical_cr, random_lagrangian,
    random_orthogonal, random_skew, real_graph, DiracPoint, Profile, Triple,
};
use crate::subspace::{RealSubspace, DEFAULT_TOL};

/// Tolerance for gap checks between independently computed subspaces.
pub const GAP_TOL: f64 = 1e-8;
/// Tolerance for the closed-form examples of the associated real structure.
pub const EXACT_GAP_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Identities,
    Hat,
    Normalform,
    Products,
    Images,
    Splitting,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Identities => "identities",
            Suite::Hat => "hat",
            Suite::Normalform => "normalform",
            Suite::Products => "products",
            Suite::Images => "images",
            Suite::Splitting => "splitting",
            Suite::All => "all",
        }
    }

    fn members(self) -> Vec<Suite> {
        match self {
            Suite::All => vec![
                Suite::Identities,
                Suite::Hat,
                Suite::Normalform,
                Suite::Products,
                Suite::Images,
                Suite::Splitting,
            ],
            s => vec![s],
        }
    }
}

/// Outcome of one property on one sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub property: &'static str,
    /// `None` when the sample does not apply (e.g. an undefined image).
    pub passed: Option<bool>,
    /// Measured quantity, for gap-type properties.
    pub value: Option<f64>,
    pub detail: String,
}

impl Check {
    fn exact(property: &'static str, ok: bool, detail: impl Into<String>) -> Self {
        Self {
            property,
            passed: Some(ok),
            value: None,
            detail: detail.into(),
        }
    }

    fn below(property: &'static str, value: f64, tol: f64, detail: impl Into<String>) -> Self {
        Self {
            property,
            passed: Some(value < tol),
            value: Some(value),
            detail: detail.into(),
        }
    }

    fn skipped(property: &'static str, detail: impl Into<String>) -> Self {
        Self {
            property,
            passed: None,
            value: None,
            detail: detail.into(),
        }
    }

    fn failed(property: &'static str, detail: impl Into<String>) -> Self {
        Self::exact(property, false, detail)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyTally {
    pub suite: &'static str,
    pub property: &'static str,
    pub passed: usize,
    pub total: usize,
    pub skipped: usize,
    pub worst: Option<f64>,
    pub first_failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub seeds: usize,
    pub dims: Vec<usize>,
    pub properties: Vec<PropertyTally>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.properties.iter().all(|p| p.passed == p.total)
    }

    pub fn failures(&self) -> usize {
        self.properties.iter().map(|p| p.total - p.passed).sum()
    }

    pub fn tally(&self, property: &str) -> Option<&PropertyTally> {
        self.properties.iter().find(|p| p.property == property)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let width = self
            .properties
            .iter()
            .map(|p| p.property.chars().count())
            .max()
            .unwrap_or(0);
        for p in &self.properties {
            let status = if p.passed == p.total { "ok  " } else { "FAIL" };
            let pad = width - p.property.chars().count();
            let _ = write!(
                out,
                "{status} {:<11} {}{} {:>6}/{:<6}",
                p.suite,
                p.property,
                " ".repeat(pad),
                p.passed,
                p.total
            );
            if p.skipped > 0 {
                let _ = write!(out, " skipped {}", p.skipped);
            }
            if let Some(w) = p.worst {
                let _ = write!(out, " worst {w:.3e}");
            }
            out.push('\n');
            if let Some(f) = &p.first_failure {
                let _ = writeln!(out, "     first failure: {f}");
            }
        }
        let _ = writeln!(
            out,
            "{} properties, {} failures (seeds {}, dims {:?})",
            self.properties.len(),
            self.failures(),
            self.seeds,
            self.dims
        );
        out
    }
}

/// Accumulates checks in first-seen property order.
#[derive(Default)]
pub struct Tally {
    suite: &'static str,
    rows: Vec<PropertyTally>,
}

impl Tally {
    pub fn new(suite: &'static str) -> Self {
        Self {
            suite,
            rows: Vec::new(),
        }
    }

    pub fn add(&mut self, check: Check) {
        let pos = match self.rows.iter().position(|r| r.property == check.property) {
            Some(i) => i,
            None => {
                self.rows.push(PropertyTally {
                    suite: self.suite,
                    property: check.property,
                    passed: 0,
                    total: 0,
                    skipped: 0,
                    worst: None,
                    first_failure: None,
                });
                self.rows.len() - 1
            }
        };
        let row = &mut self.rows[pos];
        match check.passed {
            None => row.skipped += 1,
            Some(ok) => {
                row.total += 1;
                if ok {
                    row.passed += 1;
                } else if row.first_failure.is_none() {
                    row.first_failure = Some(check.detail);
                }
                if let Some(v) = check.value {
                    row.worst = Some(row.worst.map_or(v, |w: f64| w.max(v)));
                }
            }
        }
    }

    pub fn into_rows(self) -> Vec<PropertyTally> {
        self.rows
    }
}

fn rng(salt: u64, m: usize, seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(salt ^ (m as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ seed.rotate_left(17))
}

/// Even seeds draw an arbitrary `L(E, ε)`; odd seeds cycle through the
/// admissible cells.
pub fn sample(m: usize, seed: u64) -> (DiracPoint, Profile) {
    let profile = if seed % 2 == 0 {
        Profile::Any
    } else {
        let cells = admissible_cells(m);
        Profile::Cell(cells[(seed / 2) as usize % cells.len()])
    };
    let l = random_lagrangian(m, seed, profile).expect("admissible profile");
    (l, profile)
}

pub fn identities_sample(m: usize, seed: u64) -> Vec<Check> {
    let (l, profile) = sample(m, seed);
    let inv = l.invariants();
    let ctx = format!("m = {m}, seed = {seed}, triple {}", inv.triple());
    let mut out: Vec<Check> = inv
        .identity_checks()
        .into_iter()
        .map(|(name, ok)| Check::exact(name, ok, ctx.clone()))
        .collect();
    out.push(Check::exact(
        "admissible triple",
        admissibility(m, inv.triple()).is_ok(),
        ctx.clone(),
    ));
    if let Profile::Cell(t) = profile {
        out.push(Check::exact("requested cell reproduced", inv.triple() == t, ctx));
    }
    out
}

fn random_subspace(rng: &mut ChaCha8Rng, m: usize, dim: usize) -> RealSubspace {
    let q = random_orthogonal(rng, m);
    RealSubspace::from_columns(&q.columns(0, dim).into_owned(), DEFAULT_TOL)
}

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.gen_range(-1.0..1.0))
}

fn imaginary(w: &DMatrix<f64>) -> DMatrix<Complex64> {
    w.map(|x| Complex64::new(0.0, x))
}

pub fn hat_sample(m: usize, seed: u64) -> Vec<Check> {
    let (l, _) = sample(m, seed);
    let inv = l.invariants();
    let ctx = format!("m = {m}, seed = {seed}, triple {}", inv.triple());
    let h = hat(&l);
    let mut out = vec![
        Check::below(
            "hat = L(Δ, ω_Δ)",
            h.gap(&hat_from_invariants(&inv)).unwrap_or(1.0),
            GAP_TOL,
            ctx.clone(),
        ),
        Check::exact(
            "hat is lagrangian",
            h.dim() == m && h.isotropy_residual() < GAP_TOL,
            ctx.clone(),
        ),
    ];
    let (coord, direct) = tetra_coords(&l);
    out.push(Check::exact(
        "order of complexified hat = s + 2k",
        coord.hat_order == direct,
        ctx.clone(),
    ));

    let mut rng = rng(0x6a7, m, seed);
    let b = random_skew(&mut rng, m, 1.0);
    out.push(match l.b_transform_real(&b) {
        Ok(lb) => Check::below(
            "hat is invariant under real B-transforms",
            hat(&lb).gap(&h).unwrap_or(1.0),
            GAP_TOL,
            ctx.clone(),
        ),
        Err(e) => Check::failed("hat is invariant under real B-transforms", format!("{ctx}: {e}")),
    });
    out.push(match l.b_transform(&imaginary(&b)) {
        Ok(lb) => Check::below(
            "hat(e^{iB} L) = e^B hat(L)",
            hat(&lb).gap(&b_transform(&h, &b)).unwrap_or(1.0),
            GAP_TOL,
            ctx.clone(),
        ),
        Err(e) => Check::failed("hat(e^{iB} L) = e^B hat(L)", format!("{ctx}: {e}")),
    });

    let omega = random_skew(&mut rng, m, 1.0);
    let full = RealSubspace::full(m, DEFAULT_TOL);
    out.push(match DiracPoint::from_presymplectic(&omega) {
        Ok(liw) => Check::below(
            "hat(L_iω) = L_ω",
            hat(&liw).gap(&real_graph(&full, &omega)).unwrap_or(1.0),
            EXACT_GAP_TOL,
            ctx.clone(),
        ),
        Err(e) => Check::failed("hat(L_iω) = L_ω", format!("{ctx}: {e}")),
    });

    let w_dim = rng.gen_range(0..=m);
    let w = random_subspace(&mut rng, m, w_dim);
    let zero = DMatrix::zeros(w_dim, w_dim);
    let lr = real_graph(&w, &zero);
    out.push(match DiracPoint::complexify_real_dirac(&lr) {
        Ok(lc) => Check::below(
            "hat(L_C) = L for L = W ⊕ Ann W",
            hat(&lc).gap(&lr).unwrap_or(1.0),
            EXACT_GAP_TOL,
            ctx.clone(),
        ),
        Err(e) => Check::failed("hat(L_C) = L for L = W ⊕ Ann W", format!("{ctx}: {e}")),
    });

    let form = random_skew(&mut rng, w_dim, 1.0);
    out.push(
        match DiracPoint::complexify_real_dirac(&real_graph(&w, &form)) {
            Ok(lc) => Check::below(
                "hat(L(W, ω)_C) = L(W, 0)",
                hat(&lc).gap(&lr).unwrap_or(1.0),
                EXACT_GAP_TOL,
                ctx.clone(),
            ),
            Err(e) => Check::failed("hat(L(W, ω)_C) = L(W, 0)", format!("{ctx}: {e}")),
        },
    );
    out.push(match DiracPoint::from_graph(&w.complexify(), &imaginary(&form)) {
        Ok(li) => Check::below(
            "hat(L(W_C, iω)) = L(W, ω)",
            hat(&li).gap(&real_graph(&w, &form)).unwrap_or(1.0),
            EXACT_GAP_TOL,
            ctx.clone(),
        ),
        Err(e) => Check::failed("hat(L(W_C, iω)) = L(W, ω)", format!("{ctx}: {e}")),
    });

    let k = rng.gen_range(0..=m / 2);
    let cr = DiracPoint::from_cr(&canonical_cr(k, m - 2 * k, DEFAULT_TOL))
        .and_then(|c| c.transform(&random_isomorphism(&mut rng, m)));
    out.push(match cr {
        Ok(c) => Check::below(
            "hat(L_(D,J)) = V*",
            hat(&c).gap(&real_graph(&RealSubspace::zero(m, DEFAULT_TOL), &DMatrix::zeros(0, 0))).unwrap_or(1.0),
            EXACT_GAP_TOL,
            ctx,
        ),
        Err(e) => Check::failed("hat(L_(D,J)) = V*", format!("{ctx}: {e}")),
    });
    out
}

fn random_isomorphism(rng: &mut ChaCha8Rng, m: usize) -> DMatrix<f64> {
    let q1 = random_orthogonal(rng, m);
    let q2 = random_orthogonal(rng, m);
    let d = DMatrix::from_fn(m, m, |i, j| if i == j { rng.gen_range(0.5..2.0) } else { 0.0 });
    q1 * d * q2
}

/// Normal-form checks on one random lagrangian of cell `t`.
pub fn normalform_sample(m: usize, t: Triple, seed: u64) -> Vec<Check> {
    let ctx = format!("m = {m}, cell {t}, seed = {seed}");
    let l = match random_lagrangian(m, seed, Profile::Cell(t)) {
        Ok(l) => l,
        Err(e) => return vec![Check::failed("normal form roundtrip", format!("{ctx}: {e}"))],
    };
    let mut out = Vec::new();
    match normal_form(&l) {
        Ok(nf) => {
            out.push(Check::below("normal form roundtrip", nf.residual, RECONSTRUCTION_TOL, ctx.clone()));
            out.push(Check::exact(
                "dim N = 2k + s",
                nf.complement.dim() == 2 * t.k + t.s,
                ctx.clone(),
            ));
            let kernel = nf.omega_delta.nrows() - rank_of(&nf.omega_delta);
            out.push(Check::exact("dim ker ω_Δ = r − s", kernel == t.r - t.s, ctx.clone()));
            match nf.cr_block() {
                Ok(block) => {
                    out.push(Check::exact("dim C = 2k", block.c.dim() == 2 * t.k, ctx.clone()));
                    let q = block.j.nrows();
                    let sq = &block.j * &block.j + DMatrix::<f64>::identity(q, q);
                    out.push(Check::below("J² = −1 on C", sq.norm(), GAP_TOL, ctx.clone()));
                }
                Err(e) => out.push(Check::failed("dim C = 2k", format!("{ctx}: {e}"))),
            }
        }
        Err(e) => out.push(failure_with_residual("normal form roundtrip", &e, &ctx)),
    }
    if t.k == 0 {
        out.push(match type0_normal_form(&l) {
            Ok(nf) => Check::below("type-zero normal form roundtrip", nf.residual, RECONSTRUCTION_TOL, ctx.clone()),
            Err(e) => failure_with_residual("type-zero normal form roundtrip", &e, &ctx),
        });
    }
    if t.k == (m - t.r) / 2 {
        out.push(match max_type_normal_form(&l) {
            Ok(nf) => Check::below("maximal-type normal form roundtrip", nf.residual, RECONSTRUCTION_TOL, ctx),
            Err(e) => failure_with_residual("maximal-type normal form roundtrip", &e, &ctx),
        });
    }
    out
}

fn failure_with_residual(property: &'static str, e: &ClassifyError, ctx: &str) -> Check {
    let mut c = Check::failed(property, format!("{ctx}: {e}"));
    if let ClassifyError::ReconstructionFailure { residual } = e {
        c.value = Some(*residual);
    }
    c
}

fn rank_of(w: &DMatrix<f64>) -> usize {
    if w.is_empty() {
        return 0;
    }
    RealSubspace::from_columns_scaled(w, DEFAULT_TOL, 1.0).0.dim()
}

pub fn products_sample(m1: usize, m2: usize, seed: u64) -> Vec<Check> {
    let (a, _) = sample(m1, 2 * seed);
    let (b, _) = sample(m2, 2 * seed + 1);
    let (ia, ib) = (a.invariants(), b.invariants());
    let p = a.product(&b);
    let ip = p.invariants();
    let ctx = format!("dims ({m1}, {m2}), seed = {seed}: {} × {} -> {}", ia.triple(), ib.triple(), ip.triple());
    vec![
        Check::exact("real index additive", ip.r == ia.r + ib.r, ctx.clone()),
        Check::exact("order additive", ip.s == ia.s + ib.s, ctx.clone()),
        Check::exact("type additive", ip.k == ia.k + ib.k, ctx.clone()),
        Check::exact("product is lagrangian", p.isotropy_residual() < GAP_TOL, ctx),
    ]
}

/// Backward images of a real-index-zero structure on `ℝᵐ` (`m` even).
pub fn images_sample(m: usize, seed: u64) -> Vec<Check> {
    let mut rng = rng(0x1a6e, m, seed);
    let mut out = Vec::new();
    if m >= 2 && m % 2 == 0 {
        let k = rng.gen_range(0..=m / 2);
        let gc = random_lagrangian(m, seed, Profile::Cell(Triple::new(0, 0, k))).expect("admissible");
        let hyper = random_matrix(&mut rng, m, m - 1);
        let ctx = format!("m = {m}, seed = {seed}, type {k}");
        out.push(match gc.backward_image(&hyper) {
            Ok(img) => {
                let r = img.invariants().r;
                Check::exact("hyperplane image has real index 1", r == 1, format!("{ctx}: r = {r}"))
            }
            Err(e) => Check::failed("hyperplane image has real index 1", format!("{ctx}: {e}")),
        });
        let c = rng.gen_range(1..m);
        let phi = random_matrix(&mut rng, m, m - c);
        out.push(match gc.backward_image(&phi) {
            Ok(img) => {
                let r = img.invariants().r;
                Check::exact(
                    "codimension-c image has real index ≤ c",
                    r <= c,
                    format!("{ctx}, c = {c}: r = {r}"),
                )
            }
            Err(e) => Check::failed("codimension-c image has real index ≤ c", format!("{ctx}: {e}")),
        });
    }
    out.push(commutation_sample(m, seed, &mut rng));
    out
}

/// `gap(φ^!(hat L), hat(φ^! L))` for a random `φ: ℝᵖ → ℝᵐ`.
pub fn commutation_sample(m: usize, seed: u64, rng: &mut ChaCha8Rng) -> Check {
    const NAME: &str = "hat commutes with backward images";
    let (l, _) = sample(m, seed);
    let p = rng.gen_range(1..=m);
    let phi = random_matrix(rng, m, p);
    let ctx = format!("m = {m}, seed = {seed}, source dim {p}");
    let lhs = backward_image_real(&hat(&l), &phi);
    let rhs = l.backward_image(&phi).map(|img| hat(&img));
    match (lhs, rhs) {
        (Ok(a), Ok(b)) => Check::below(NAME, a.gap(&b).unwrap_or(1.0), GAP_TOL, ctx),
        _ => Check::skipped(NAME, ctx),
    }
}

/// A CR-type factor of size `2k + s`, a form on `ℝ^{m2}` and a real `B`.
pub fn splitting_instance(seed: u64) -> (DiracPoint, DMatrix<f64>, DMatrix<f64>) {
    let mut rng = rng(0x5b1, 0, seed);
    let k = rng.gen_range(0..=2);
    let mut s = rng.gen_range(0..=2);
    if k == 0 && s == 0 {
        s = 1;
    }
    let m1 = 2 * k + s;
    let m2 = rng.gen_range(1..=4);
    let g = random_isomorphism(&mut rng, m1);
    let l_cr = DiracPoint::from_cr(&canonical_cr(k, s, DEFAULT_TOL))
        .and_then(|l| l.transform(&g))
        .expect("isomorphisms preserve CR structures");
    let omega = random_skew(&mut rng, m2, 1.0);
    let b = random_skew(&mut rng, m1 + m2, 1.0);
    (l_cr, omega, b)
}

pub fn splitting_sample(seed: u64) -> Vec<Check> {
    let (l_cr, omega, b) = splitting_instance(seed);
    let ctx = format!("seed = {seed}, factor dims ({}, {})", l_cr.dim_v(), omega.nrows());
    match splitting_verify(&l_cr, &omega, &b) {
        Ok(rep) => {
            let ctx = format!("{ctx}: product {}, recovered {}", rep.product, rep.recovered);
            vec![
                Check::below("CR factor recovered", rep.factor_gap, RECONSTRUCTION_TOL, ctx.clone()),
                Check::exact(
                    "recovered factor has (r, s) = (s, s)",
                    rep.recovered.r == rep.product.s && rep.recovered.s == rep.product.s,
                    ctx.clone(),
                ),
                Check::below("presymplectic factor recovered", rep.symplectic_gap, RECONSTRUCTION_TOL, ctx.clone()),
                Check::exact("invariants additive", rep.additive, ctx.clone()),
                Check::exact(
                    "dim ker ω = r − s",
                    rep.kernel_rank == rep.product.r - rep.product.s,
                    ctx,
                ),
            ]
        }
        Err(e) => vec![Check::failed("CR factor recovered", format!("{ctx}: {e}"))],
    }
}

fn collect<F>(suite: Suite, jobs: Vec<(usize, u64)>, f: F) -> Vec<PropertyTally>
where
    F: Fn(usize, u64) -> Vec<Check> + Sync,
{
    let results: Vec<Vec<Check>> = jobs.par_iter().map(|&(m, seed)| f(m, seed)).collect();
    let mut tally = Tally::new(suite.name());
    for checks in results {
        for c in checks {
            tally.add(c);
        }
    }
    tally.into_rows()
}

fn grid(dims: &[usize], seeds: usize) -> Vec<(usize, u64)> {
    dims.iter()
        .flat_map(|&m| (0..seeds as u64).map(move |s| (m, s)))
        .collect()
}

/// Runs `suite` for `seeds` seeds per dimension.
pub fn run(suite: Suite, seeds: usize, dims: &[usize]) -> VerifyReport {
    let mut properties = Vec::new();
    for s in suite.members() {
        let rows = match s {
            Suite::Identities => collect(s, grid(dims, seeds), identities_sample),
            Suite::Hat => collect(s, grid(dims, seeds), hat_sample),
            Suite::Normalform => collect(s, grid(dims, seeds), |m, seed| {
                let cells = admissible_cells(m);
                normalform_sample(m, cells[seed as usize % cells.len()], seed)
            }),
            Suite::Products => {
                let jobs = (0..seeds as u64).map(|s| (0, s)).collect();
                collect(s, jobs, |_, seed| {
                    let n = dims.len() as u64;
                    let m1 = dims[(seed % n) as usize];
                    let m2 = dims[((seed / n) % n) as usize];
                    products_sample(m1, m2, seed)
                })
            }
            Suite::Images => collect(s, grid(dims, seeds), images_sample),
            Suite::Splitting => {
                let jobs = (0..seeds as u64).map(|s| (0, s)).collect();
                collect(s, jobs, |_, seed| splitting_sample(seed))
            }
            Suite::All => unreachable!("expanded by members()"),
        };
        properties.extend(rows);
    }
    VerifyReport {
        seeds,
        dims: dims.to_vec(),
        properties,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run_passes_everywhere() {
        let rep = run(Suite::All, 6, &[1, 2, 3, 4]);
        assert!(rep.passed(), "{}", rep.to_text());
        assert!(rep.tally("hat = L(Δ, ω_Δ)").unwrap().total == 24);
    }

    #[test]
    fn reports_are_reproducible() {
        let a = run(Suite::Hat, 4, &[2, 3]).to_text();
        let b = run(Suite::Hat, 4, &[2, 3]).to_text();
        assert_eq!(a, b);
    }

    #[test]
    fn tally_keeps_first_failure() {
        let mut t = Tally::new("x");
        t.add(Check::exact("p", true, "a"));
        t.add(Check::below("p", 2.0, 1.0, "b"));
        t.add(Check::below("p", 3.0, 1.0, "c"));
        t.add(Check::skipped("p", "d"));
        let rows = t.into_rows();
        assert_eq!((rows[0].passed, rows[0].total, rows[0].skipped), (1, 3, 1));
        assert_eq!(rows[0].first_failure.as_deref(), Some("b"));
        assert_eq!(rows[0].worst, Some(3.0));
    }
}
