//! Structure fields `p ↦ L(p)` over boxes in `ℝᵐ`.
//!
//! A [`FieldSpec`] holds `m` frame sections, each a `2m`-vector of DSL
//! expressions (vector components, then covector components). The module
//! evaluates the field pointwise, sweeps it over a grid, stratifies by
//! `(r, s, k)` and checks involutivity with a finite-difference Dorfman
//! bracket.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classify::{hat, hat_from_invariants};
use crate::dirac::{DiracError, DiracPoint, Triple};
use crate::exprdsl::{self, DomainError, Expr, ParseError};
use crate::subspace::{ComplexSubspace, RealSubspace, DEFAULT_TOL};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FieldError {
    #[error("frame entry {entry}, component {component}: {source}")]
    Parse {
        entry: usize,
        component: usize,
        #[source]
        source: ParseError,
    },
    #[error("coordinates: {0}")]
    Coordinates(ParseError),
    #[error("field specification: {0}")]
    Shape(String),
    #[error(transparent)]
    Eval(#[from] DomainError),
    #[error("frame has rank {rank} at {point:?}, expected {expected}")]
    FrameDegenerate {
        rank: usize,
        expected: usize,
        point: Vec<f64>,
    },
    #[error("frame span is not lagrangian at {point:?} (isotropy residual {residual:.3e})")]
    NotLagrangian { residual: f64, point: Vec<f64> },
    #[error("finite-difference stencil leaves the domain at {point:?} (h = {h:e})")]
    StencilOutsideDomain { point: Vec<f64>, h: f64 },
    #[error(transparent)]
    Dirac(#[from] DiracError),
}

/// One frame section as written in a field file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameEntry {
    pub vector: Vec<String>,
    pub covector: Vec<String>,
}

/// Axis-aligned box `[lo, hi]` in `ℝᵐ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl GridBox {
    pub fn cube(m: usize, lo: f64, hi: f64) -> Self {
        Self {
            lo: vec![lo; m],
            hi: vec![hi; m],
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(x, (lo, hi))| lo <= x && x <= hi)
    }
}

/// A parsed, validated structure field.
#[derive(Debug, Clone)]
pub struct FieldSpec {
    pub name: Option<String>,
    pub dim: usize,
    pub coords: Vec<String>,
    pub entries: Vec<FrameEntry>,
    pub declared_rank: usize,
    pub domain: Option<GridBox>,
    pub tol: f64,
    compiled: Vec<Vec<Expr>>,
}

impl FieldSpec {
    pub fn new(
        dim: usize,
        coords: Vec<String>,
        entries: Vec<FrameEntry>,
    ) -> Result<Self, FieldError> {
        if dim == 0 {
            return Err(FieldError::Shape("dim must be positive".into()));
        }
        if coords.len() != dim {
            return Err(FieldError::Shape(format!(
                "{} coordinate names for dim {dim}",
                coords.len()
            )));
        }
        exprdsl::validate_coords(&coords).map_err(FieldError::Coordinates)?;
        for (i, name) in coords.iter().enumerate() {
            if coords[..i].contains(name) {
                return Err(FieldError::Shape(format!("coordinate `{name}` repeated")));
            }
        }
        if entries.len() != dim {
            return Err(FieldError::Shape(format!(
                "frame has {} sections, expected {dim}",
                entries.len()
            )));
        }
        let mut compiled = Vec::with_capacity(dim);
        for (e, entry) in entries.iter().enumerate() {
            if entry.vector.len() != dim || entry.covector.len() != dim {
                return Err(FieldError::Shape(format!(
                    "frame entry {e} has {} vector and {} covector components, expected {dim} each",
                    entry.vector.len(),
                    entry.covector.len()
                )));
            }
            let mut section = Vec::with_capacity(2 * dim);
            for (c, text) in entry.vector.iter().chain(&entry.covector).enumerate() {
                let expr = exprdsl::parse(text, &coords).map_err(|source| FieldError::Parse {
                    entry: e,
                    component: c,
                    source,
                })?;
                section.push(expr);
            }
            compiled.push(section);
        }
        Ok(Self {
            name: None,
            dim,
            coords,
            entries,
            declared_rank: dim,
            domain: None,
            tol: DEFAULT_TOL,
            compiled,
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn with_domain(mut self, domain: GridBox) -> Self {
        self.domain = Some(domain);
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    /// Frame section `j` at `p`: `(X¹ … Xᵐ, ξ₁ … ξₘ)`.
    pub fn section(&self, j: usize, p: &[f64]) -> Result<DVector<Complex64>, DomainError> {
        let exprs = &self.compiled[j];
        let mut out = DVector::zeros(exprs.len());
        for (c, e) in exprs.iter().enumerate() {
            out[c] = e.eval(p)?;
        }
        Ok(out)
    }

    /// All frame sections at `p` as columns of a `2m × m` matrix.
    pub fn frame(&self, p: &[f64]) -> Result<DMatrix<Complex64>, DomainError> {
        let m = self.dim;
        let mut out = DMatrix::zeros(2 * m, self.compiled.len());
        for j in 0..self.compiled.len() {
            out.set_column(j, &self.section(j, p)?);
        }
        Ok(out)
    }
}

/// The lagrangian spanned by the frame at `p`.
pub fn eval_field(spec: &FieldSpec, p: &[f64]) -> Result<DiracPoint, FieldError> {
    let frame = spec.frame(p)?;
    let span = ComplexSubspace::from_columns(&frame, spec.tol);
    if span.dim() != spec.declared_rank {
        return Err(FieldError::FrameDegenerate {
            rank: span.dim(),
            expected: spec.declared_rank,
            point: p.to_vec(),
        });
    }
    DiracPoint::from_space(span).map_err(|err| match err {
        DiracError::NotLagrangian { isotropy, .. } => FieldError::NotLagrangian {
            residual: isotropy,
            point: p.to_vec(),
        },
        other => other.into(),
    })
}

/// Default finite-difference step `1e-5 · (1 + |p|∞)`.
pub fn default_step(p: &[f64]) -> f64 {
    1e-5 * (1.0 + p.iter().fold(0.0_f64, |a, x| a.max(x.abs())))
}

/// Value and central-difference Jacobian `jac[(c, b)] = ∂_b s^c` of a section.
#[derive(Debug, Clone)]
pub struct Jet {
    pub value: DVector<Complex64>,
    pub jac: DMatrix<Complex64>,
}

fn check_stencil(p: &[f64], h: f64, domain: Option<&GridBox>) -> Result<(), FieldError> {
    if let Some(dom) = domain {
        for b in 0..p.len() {
            if p[b] - h < dom.lo[b] || p[b] + h > dom.hi[b] {
                return Err(FieldError::StencilOutsideDomain {
                    point: p.to_vec(),
                    h,
                });
            }
        }
    }
    Ok(())
}

pub fn jet<F>(section: F, p: &[f64], h: f64) -> Result<Jet, FieldError>
where
    F: Fn(&[f64]) -> Result<DVector<Complex64>, DomainError>,
{
    let value = section(p)?;
    let m = p.len();
    let mut jac = DMatrix::zeros(value.len(), m);
    let mut q = p.to_vec();
    for b in 0..m {
        q[b] = p[b] + h;
        let plus = section(&q)?;
        q[b] = p[b] - h;
        let minus = section(&q)?;
        q[b] = p[b];
        jac.set_column(b, &((plus - minus) / Complex64::new(2.0 * h, 0.0)));
    }
    Ok(Jet { value, jac })
}

/// `[X + ξ, Y + η] = [X, Y] + 𝓛_X η − ι_Y dξ` from the jets of both sections.
pub fn dorfman_bracket_from_jets(a: &Jet, b: &Jet) -> DVector<Complex64> {
    let m = a.jac.ncols();
    let x = a.value.rows(0, m);
    let y = b.value.rows(0, m);
    let eta = b.value.rows(m, m);
    let dx = a.jac.rows(0, m);
    let dxi = a.jac.rows(m, m);
    let dy = b.jac.rows(0, m);
    let deta = b.jac.rows(m, m);
    let mut out = DVector::zeros(2 * m);
    for c in 0..m {
        let mut vec = Complex64::new(0.0, 0.0);
        let mut cov = Complex64::new(0.0, 0.0);
        for d in 0..m {
            vec += x[d] * dy[(c, d)] - y[d] * dx[(c, d)];
            cov += x[d] * deta[(c, d)] + eta[d] * dx[(d, c)];
            cov -= y[d] * (dxi[(c, d)] - dxi[(d, c)]);
        }
        out[c] = vec;
        out[m + c] = cov;
    }
    out
}

/// Dorfman bracket of two sections at `p`, all derivatives by central
/// differences of step `h`.
///
/// When `domain` is given, the stencil `p ± h eᵦ` must stay inside it.
pub fn dorfman_bracket_fd<F, G>(
    sec1: F,
    sec2: G,
    p: &[f64],
    h: f64,
    domain: Option<&GridBox>,
) -> Result<DVector<Complex64>, FieldError>
where
    F: Fn(&[f64]) -> Result<DVector<Complex64>, DomainError>,
    G: Fn(&[f64]) -> Result<DVector<Complex64>, DomainError>,
{
    check_stencil(p, h, domain)?;
    let a = jet(sec1, p, h)?;
    let b = jet(sec2, p, h)?;
    Ok(dorfman_bracket_from_jets(&a, &b))
}

/// Largest normalized distance from a bracket of frame sections to `L(p)`.
///
/// The distance for the pair `(i, j)` is divided by
/// `max(|[sᵢ, sⱼ]|, |sᵢ| |sⱼ|)`; the second term keeps round-off in a
/// vanishing bracket from being amplified to order one.
pub fn involutivity_residual(spec: &FieldSpec, p: &[f64], h: f64) -> Result<f64, FieldError> {
    check_stencil(p, h, spec.domain.as_ref())?;
    let l = eval_field(spec, p)?;
    let jets = (0..spec.compiled.len())
        .map(|j| jet(|q| spec.section(j, q), p, h))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(residual_from_jets(&l, &jets))
}

fn residual_from_jets(l: &DiracPoint, jets: &[Jet]) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..jets.len() {
        for j in (i + 1)..jets.len() {
            let bracket = dorfman_bracket_from_jets(&jets[i], &jets[j]);
            let scale = bracket
                .norm()
                .max(jets[i].value.norm() * jets[j].value.norm());
            if scale > 0.0 {
                worst = worst.max(l.space().distance_to(&bracket) / scale);
            }
        }
    }
    worst
}

/// Gap between the computed `K(p) = re(L ∩ L̄)` and the span of `predicted`
/// (columns in `ℝ²ᵐ`, vector part first).
pub fn k_field_check(spec: &FieldSpec, p: &[f64], predicted: &DMatrix<f64>) -> Result<f64, FieldError> {
    let l = eval_field(spec, p)?;
    let k = l.invariants().k_basis;
    let predicted = RealSubspace::from_columns(predicted, spec.tol);
    Ok(k.gap(&predicted).map_err(DiracError::from)?)
}

/// Regular grid over a box with `res[b] ≥ 2` points on axis `b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub domain: GridBox,
    pub res: Vec<usize>,
}

impl Grid {
    pub fn new(domain: GridBox, res: Vec<usize>) -> Result<Self, FieldError> {
        if res.len() != domain.dim() {
            return Err(FieldError::Shape(format!(
                "resolution has {} axes, box has {}",
                res.len(),
                domain.dim()
            )));
        }
        if res.iter().any(|&n| n < 2) {
            return Err(FieldError::Shape("resolution must be at least 2 per axis".into()));
        }
        if domain.lo.iter().zip(&domain.hi).any(|(lo, hi)| !(lo < hi)) {
            return Err(FieldError::Shape("box needs lo < hi on every axis".into()));
        }
        Ok(Self { domain, res })
    }

    pub fn uniform(domain: GridBox, n: usize) -> Result<Self, FieldError> {
        let m = domain.dim();
        Self::new(domain, vec![n; m])
    }

    pub fn len(&self) -> usize {
        self.res.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Multi-index of a linear index; the last axis varies fastest.
    pub fn multi_index(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.res.len()];
        for b in (0..self.res.len()).rev() {
            out[b] = idx % self.res[b];
            idx /= self.res[b];
        }
        out
    }

    pub fn linear_index(&self, multi: &[usize]) -> usize {
        multi
            .iter()
            .zip(&self.res)
            .fold(0, |acc, (&i, &n)| acc * n + i)
    }

    pub fn point(&self, idx: usize) -> Vec<f64> {
        self.multi_index(idx)
            .iter()
            .enumerate()
            .map(|(b, &i)| {
                let (lo, hi) = (self.domain.lo[b], self.domain.hi[b]);
                lo + (hi - lo) * (i as f64) / ((self.res[b] - 1) as f64)
            })
            .collect()
    }

    /// Axis-aligned neighbours (at most `2m`).
    pub fn neighbours(&self, idx: usize) -> Vec<usize> {
        let multi = self.multi_index(idx);
        let mut out = Vec::with_capacity(2 * multi.len());
        for b in 0..multi.len() {
            let mut q = multi.clone();
            if multi[b] > 0 {
                q[b] = multi[b] - 1;
                out.push(self.linear_index(&q));
            }
            if multi[b] + 1 < self.res[b] {
                q[b] = multi[b] + 1;
                out.push(self.linear_index(&q));
            }
        }
        out
    }

    pub fn is_interior(&self, idx: usize) -> bool {
        self.multi_index(idx)
            .iter()
            .zip(&self.res)
            .all(|(&i, &n)| i > 0 && i + 1 < n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointInvariants {
    pub r: usize,
    pub s: usize,
    pub k: usize,
    pub rank_e: usize,
    pub rank_delta: usize,
    pub rank_d: usize,
    pub rank_delta0: usize,
    pub lagrangian_residual: f64,
    /// `None` where the stencil would leave the box.
    pub involutivity_residual: Option<f64>,
    pub hat_gap: f64,
    pub identities_hold: bool,
    pub marginal: bool,
}

impl PointInvariants {
    pub fn triple(&self) -> Triple {
        Triple::new(self.r, self.s, self.k)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointRecord {
    pub index: usize,
    pub point: Vec<f64>,
    pub result: Result<PointInvariants, String>,
}

impl PointRecord {
    pub fn invariants(&self) -> Option<&PointInvariants> {
        self.result.as_ref().ok()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Stratum {
    pub triple: Triple,
    pub count: usize,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

/// Discrete upper-semicontinuity diagnostics.
///
/// `isolated` lists points above the generic (minimal) value whose
/// neighbours are all generic; `dips` lists points strictly below every
/// neighbour. The `(r, s)` checks use all classified points; the type checks
/// compare only neighbours with the same `(r, s)`.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Semicontinuity {
    pub ri_order_isolated: Vec<usize>,
    pub ri_order_dips: Vec<usize>,
    pub type_isolated: Vec<usize>,
    pub type_dips: Vec<usize>,
}

impl Semicontinuity {
    pub fn holds(&self) -> bool {
        self.ri_order_isolated.is_empty()
            && self.ri_order_dips.is_empty()
            && self.type_isolated.is_empty()
            && self.type_dips.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridReport {
    pub grid: Grid,
    pub h: Option<f64>,
    pub tol: f64,
    pub points: Vec<PointRecord>,
    /// Classified (non-marginal, successfully evaluated) points by triple.
    pub strata: Vec<Stratum>,
    pub marginal: usize,
    pub failed: usize,
    /// Points whose `rank Δ` exceeds the minimum over their neighbours.
    pub rank_delta_jumps: Vec<usize>,
    pub semicontinuity: Semicontinuity,
    pub max_hat_gap: f64,
    pub max_lagrangian_residual: f64,
    pub max_involutivity_residual: Option<f64>,
}

impl GridReport {
    pub fn stratum(&self, t: Triple) -> Option<&Stratum> {
        self.strata.iter().find(|s| s.triple == t)
    }

    pub fn classified(&self) -> usize {
        self.strata.iter().map(|s| s.count).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GridOptions {
    /// Fixed FD step; `None` uses [`default_step`] at every point.
    pub h: Option<f64>,
    /// Skip the involutivity check entirely.
    pub skip_involutivity: bool,
    /// Worker threads; `None` uses the global pool, `Some(1)` runs inline.
    pub workers: Option<usize>,
}

fn analyze_point(spec: &FieldSpec, grid: &Grid, idx: usize, opts: &GridOptions) -> PointRecord {
    let point = grid.point(idx);
    let result = (|| -> Result<PointInvariants, FieldError> {
        let l = eval_field(spec, &point)?;
        let inv = l.invariants();
        let hat_gap = hat(&l)
            .gap(&hat_from_invariants(&inv))
            .map_err(DiracError::from)?;
        let h = opts.h.unwrap_or_else(|| default_step(&point));
        let involutivity = if opts.skip_involutivity || check_stencil(&point, h, Some(&grid.domain)).is_err() {
            None
        } else {
            let jets = (0..spec.compiled.len())
                .map(|j| jet(|q| spec.section(j, q), &point, h))
                .collect::<Result<Vec<_>, _>>()?;
            Some(residual_from_jets(&l, &jets))
        };
        Ok(PointInvariants {
            r: inv.r,
            s: inv.s,
            k: inv.k,
            rank_e: inv.rank_e,
            rank_delta: inv.rank_delta,
            rank_d: inv.rank_d,
            rank_delta0: inv.rank_delta0,
            lagrangian_residual: l.isotropy_residual(),
            involutivity_residual: involutivity,
            hat_gap,
            identities_hold: inv.identities_hold(),
            marginal: inv.marginal,
        })
    })();
    PointRecord {
        index: idx,
        point,
        result: result.map_err(|e| e.to_string()),
    }
}

/// Neighbour-based upper-semicontinuity diagnostics for an integer field.
///
/// `value` returns `None` for points that take no part in the comparison;
/// `related` restricts which neighbours are compared.
fn semicontinuity_of<V, R>(grid: &Grid, value: V, related: R) -> (Vec<usize>, Vec<usize>)
where
    V: Fn(usize) -> Option<(usize, usize)>,
    R: Fn(usize, usize) -> bool,
{
    let mut isolated = Vec::new();
    let mut dips = Vec::new();
    let mut generic: BTreeMap<usize, usize> = BTreeMap::new();
    for idx in 0..grid.len() {
        if let Some((class, v)) = value(idx) {
            let g = generic.entry(class).or_insert(v);
            *g = (*g).min(v);
        }
    }
    for idx in 0..grid.len() {
        let Some((class, v)) = value(idx) else {
            continue;
        };
        let nbrs: Vec<usize> = grid
            .neighbours(idx)
            .into_iter()
            .filter(|&n| related(idx, n))
            .filter_map(|n| value(n).map(|(_, w)| w))
            .collect();
        if nbrs.is_empty() {
            continue;
        }
        let g = generic[&class];
        if v > g && nbrs.iter().all(|&w| w == g) {
            isolated.push(idx);
        }
        if nbrs.iter().all(|&w| v < w) {
            dips.push(idx);
        }
    }
    (isolated, dips)
}

/// Evaluates the field on every grid point and summarizes the result.
///
/// Output depends only on the inputs: per-point work is merged by grid
/// index regardless of the worker count.
pub fn analyze_grid(spec: &FieldSpec, grid: &Grid, opts: &GridOptions) -> GridReport {
    let run = || -> Vec<PointRecord> {
        (0..grid.len())
            .into_par_iter()
            .map(|idx| analyze_point(spec, grid, idx, opts))
            .collect()
    };
    let points: Vec<PointRecord> = match opts.workers {
        Some(1) => (0..grid.len())
            .map(|idx| analyze_point(spec, grid, idx, opts))
            .collect(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map(|pool| pool.install(run))
            .unwrap_or_else(|_| run()),
        None => run(),
    };
    summarize(grid.clone(), opts.h, spec.tol, points)
}

fn summarize(grid: Grid, h: Option<f64>, tol: f64, points: Vec<PointRecord>) -> GridReport {
    let mut strata: BTreeMap<Triple, Stratum> = BTreeMap::new();
    let mut marginal = 0;
    let mut failed = 0;
    let mut max_hat_gap = 0.0_f64;
    let mut max_lagr = 0.0_f64;
    let mut max_inv: Option<f64> = None;
    for rec in &points {
        let Some(inv) = rec.invariants() else {
            failed += 1;
            continue;
        };
        max_hat_gap = max_hat_gap.max(inv.hat_gap);
        max_lagr = max_lagr.max(inv.lagrangian_residual);
        if let Some(res) = inv.involutivity_residual {
            max_inv = Some(max_inv.unwrap_or(0.0).max(res));
        }
        if inv.marginal {
            marginal += 1;
            continue;
        }
        let entry = strata.entry(inv.triple()).or_insert_with(|| Stratum {
            triple: inv.triple(),
            count: 0,
            lo: rec.point.clone(),
            hi: rec.point.clone(),
        });
        entry.count += 1;
        for (b, x) in rec.point.iter().enumerate() {
            entry.lo[b] = entry.lo[b].min(*x);
            entry.hi[b] = entry.hi[b].max(*x);
        }
    }

    let classified = |idx: usize| -> Option<&PointInvariants> {
        points[idx].invariants().filter(|inv| !inv.marginal)
    };
    let rank_delta_jumps = (0..grid.len())
        .filter(|&idx| {
            let Some(inv) = classified(idx) else {
                return false;
            };
            grid.neighbours(idx)
                .into_iter()
                .filter_map(|n| classified(n).map(|x| x.rank_delta))
                .min()
                .is_some_and(|low| inv.rank_delta > low)
        })
        .collect();

    // (r, s) ordered lexicographically, encoded as one integer.
    let width = grid.domain.dim() + 1;
    let (ri_order_isolated, ri_order_dips) = semicontinuity_of(
        &grid,
        |idx| classified(idx).map(|x| (0, x.r * width + x.s)),
        |_, _| true,
    );
    let (type_isolated, type_dips) = semicontinuity_of(
        &grid,
        |idx| classified(idx).map(|x| (x.r * width + x.s, x.k)),
        |a, b| match (classified(a), classified(b)) {
            (Some(x), Some(y)) => (x.r, x.s) == (y.r, y.s),
            _ => false,
        },
    );

    GridReport {
        grid,
        h,
        tol,
        points,
        strata: strata.into_values().collect(),
        marginal,
        failed,
        rank_delta_jumps,
        semicontinuity: Semicontinuity {
            ri_order_isolated,
            ri_order_dips,
            type_isolated,
            type_dips,
        },
        max_hat_gap,
        max_lagrangian_residual: max_lagr,
        max_involutivity_residual: max_inv,
    }
}
