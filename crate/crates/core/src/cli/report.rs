//! Machine-readable analysis reports (JSON and CSV).

use std::io;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::classify::TetraCoord;
use crate::field::{FieldSpec, GridReport};

pub const SCHEMA: &str = "cdirac.report/1";

/// Pretty JSON with every float written as `{:.16e}` (17 significant
/// digits); non-finite floats become `null`.
struct FloatFormatter<'a>(PrettyFormatter<'a>);

fn write_float<W: ?Sized + io::Write>(w: &mut W, v: f64) -> io::Result<()> {
    if v.is_finite() {
        write!(w, "{v:.16e}")
    } else {
        w.write_all(b"null")
    }
}

impl Formatter for FloatFormatter<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        write_float(w, v)
    }
    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        write_float(w, f64::from(v))
    }
    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Serializes `value` as pretty JSON with fixed-precision floats.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FloatFormatter(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("report values serialize");
    buf.push(b'\n');
    String::from_utf8(buf).expect("JSON is UTF-8")
}

#[derive(Debug, Serialize)]
pub struct FieldInfo {
    pub name: Option<String>,
    pub dim: usize,
    pub coords: Vec<String>,
    pub tol: f64,
}

#[derive(Debug, Serialize)]
pub struct GridInfo {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub res: Vec<usize>,
    /// `null` means the per-point default `1e-5 (1 + |p|)`.
    pub h: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct StratumInfo {
    pub r: usize,
    pub s: usize,
    pub k: usize,
    pub count: usize,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub tetra: Option<TetraCoord>,
}

#[derive(Debug, Serialize)]
pub struct Diagnostics {
    pub points: usize,
    pub classified: usize,
    pub marginal: usize,
    pub failed: usize,
    pub rank_delta_jumps: Vec<usize>,
    pub semicontinuity_holds: bool,
    pub ri_order_isolated: Vec<usize>,
    pub ri_order_dips: Vec<usize>,
    pub type_isolated: Vec<usize>,
    pub type_dips: Vec<usize>,
    pub max_hat_gap: f64,
    pub max_lagrangian_residual: f64,
    pub max_involutivity_residual: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct PointRow {
    pub index: usize,
    pub point: Vec<f64>,
    pub r: Option<usize>,
    pub s: Option<usize>,
    pub k: Option<usize>,
    pub rank_delta: Option<usize>,
    pub lagrangian_residual: Option<f64>,
    pub involutivity_residual: Option<f64>,
    pub hat_gap: Option<f64>,
    pub marginal: bool,
    pub error: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct ReportFile {
    pub schema: &'static str,
    pub field: FieldInfo,
    pub grid: GridInfo,
    pub strata: Vec<StratumInfo>,
    pub diagnostics: Diagnostics,
    pub points: Vec<PointRow>,
}

impl ReportFile {
    pub fn new(spec: &FieldSpec, report: &GridReport) -> Self {
        let m = spec.dim;
        let points = report
            .points
            .iter()
            .map(|rec| {
                let inv = rec.invariants();
                PointRow {
                    index: rec.index,
                    point: rec.point.clone(),
                    r: inv.map(|x| x.r),
                    s: inv.map(|x| x.s),
                    k: inv.map(|x| x.k),
                    rank_delta: inv.map(|x| x.rank_delta),
                    lagrangian_residual: inv.map(|x| x.lagrangian_residual),
                    involutivity_residual: inv.and_then(|x| x.involutivity_residual),
                    hat_gap: inv.map(|x| x.hat_gap),
                    marginal: inv.is_some_and(|x| x.marginal),
                    error: rec.result.as_ref().err().cloned(),
                }
            })
            .collect();
        let sc = &report.semicontinuity;
        Self {
            schema: SCHEMA,
            field: FieldInfo {
                name: spec.name.clone(),
                dim: m,
                coords: spec.coords.clone(),
                tol: spec.tol,
            },
            grid: GridInfo {
                lo: report.grid.domain.lo.clone(),
                hi: report.grid.domain.hi.clone(),
                res: report.grid.res.clone(),
                h: report.h,
            },
            strata: report
                .strata
                .iter()
                .map(|st| StratumInfo {
                    r: st.triple.r,
                    s: st.triple.s,
                    k: st.triple.k,
                    count: st.count,
                    lo: st.lo.clone(),
                    hi: st.hi.clone(),
                    tetra: TetraCoord::new(m, st.triple).ok(),
                })
                .collect(),
            diagnostics: Diagnostics {
                points: report.points.len(),
                classified: report.classified(),
                marginal: report.marginal,
                failed: report.failed,
                rank_delta_jumps: report.rank_delta_jumps.clone(),
                semicontinuity_holds: sc.holds(),
                ri_order_isolated: sc.ri_order_isolated.clone(),
                ri_order_dips: sc.ri_order_dips.clone(),
                type_isolated: sc.type_isolated.clone(),
                type_dips: sc.type_dips.clone(),
                max_hat_gap: report.max_hat_gap,
                max_lagrangian_residual: report.max_lagrangian_residual,
                max_involutivity_residual: report.max_involutivity_residual,
            },
            points,
        }
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }

    /// One row per point: coordinates, r, s, k, rank_delta, lagr_res,
    /// inv_res, marginal. Missing values are empty.
    pub fn to_csv(&self) -> String {
        fn num(v: Option<f64>) -> String {
            v.filter(|x| x.is_finite())
                .map(|x| format!("{x:.16e}"))
                .unwrap_or_default()
        }
        fn int(v: Option<usize>) -> String {
            v.map(|x| x.to_string()).unwrap_or_default()
        }
        let mut out = String::new();
        let mut header: Vec<String> = self.field.coords.clone();
        header.extend(
            ["r", "s", "k", "rank_delta", "lagr_res", "inv_res", "marginal"]
                .iter()
                .map(|s| s.to_string()),
        );
        out.push_str(&header.join(","));
        out.push('\n');
        for row in &self.points {
            let mut cells: Vec<String> = row.point.iter().map(|x| num(Some(*x))).collect();
            cells.push(int(row.r));
            cells.push(int(row.s));
            cells.push(int(row.k));
            cells.push(int(row.rank_delta));
            cells.push(num(row.lagrangian_residual));
            cells.push(num(row.involutivity_residual));
            cells.push(row.marginal.to_string());
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}
