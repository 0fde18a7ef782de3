//! The tetrahedron of admissible `(r, s, k)` for a given dimension.

use std::fmt::Write;

use serde::Serialize;

use crate::classify::TetraCoord;
use crate::dirac::{admissible_cells, Triple};

#[derive(Debug, Serialize)]
pub struct LatticePoint {
    pub r: usize,
    pub s: usize,
    pub k: usize,
    pub hat_order: usize,
    pub highlighted: bool,
}

/// Section of the tetrahedron by the plane `s + 2k = c`, as a polygon with
/// vertices in `(r, s, k)` coordinates.
#[derive(Debug, Serialize)]
pub struct HatPlane {
    pub c: usize,
    pub vertices: Vec<[f64; 3]>,
}

#[derive(Debug, Serialize)]
pub struct TetraDocument {
    pub dim: usize,
    pub queries: Vec<TetraCoord>,
    pub planes: Vec<HatPlane>,
    pub lattice: Vec<LatticePoint>,
}

fn lerp(a: [f64; 3], b: [f64; 3], t: f64) -> [f64; 3] {
    [
        a[0] + t * (b[0] - a[0]),
        a[1] + t * (b[1] - a[1]),
        a[2] + t * (b[2] - a[2]),
    ]
}

/// Vertices symp. `(0,0,0)`, cplx. `(0,0,m/2)`, presymp_C `(m,0,0)`,
/// T*_C M `(m,m,0)`; `s + 2k` is `0` on the first and third, `m` on the
/// others, so the section is a quadrilateral (an edge at `c = 0` or `m`).
fn hat_plane(m: usize, c: usize) -> HatPlane {
    let mf = m as f64;
    let a = [0.0, 0.0, 0.0];
    let b = [0.0, 0.0, mf / 2.0];
    let cc = [mf, 0.0, 0.0];
    let d = [mf, mf, 0.0];
    let t = if m == 0 { 0.0 } else { c as f64 / mf };
    let mut vertices = vec![lerp(a, b, t), lerp(cc, b, t), lerp(cc, d, t), lerp(a, d, t)];
    vertices.dedup();
    if vertices.len() > 1 && vertices.first() == vertices.last() {
        vertices.pop();
    }
    HatPlane { c, vertices }
}

pub fn document(m: usize, queries: &[Triple]) -> TetraDocument {
    let queries: Vec<TetraCoord> = queries
        .iter()
        .filter_map(|&t| TetraCoord::new(m, t).ok())
        .collect();
    let mut orders: Vec<usize> = queries.iter().map(|q| q.hat_order).collect();
    orders.sort_unstable();
    orders.dedup();
    let lattice = admissible_cells(m)
        .into_iter()
        .map(|t| LatticePoint {
            r: t.r,
            s: t.s,
            k: t.k,
            hat_order: t.s + 2 * t.k,
            highlighted: queries.iter().any(|q| q.triple() == t),
        })
        .collect();
    TetraDocument {
        dim: m,
        planes: orders.into_iter().map(|c| hat_plane(m, c)).collect(),
        queries,
        lattice,
    }
}

/// Oblique projection in the orientation of the usual figure: type to the
/// right, order upwards, real index receding diagonally.
fn project(m: usize, p: [f64; 3]) -> (f64, f64) {
    let unit = 360.0 / (m.max(1) as f64);
    let (r, s, k) = (p[0], p[1], p[2]);
    let x = 80.0 + 2.0 * k * unit + 0.5 * r * unit;
    let y = 60.0 + 1.5 * (m as f64) * unit - s * unit - 0.5 * r * unit;
    (x, y)
}

impl TetraDocument {
    pub fn to_svg(&self) -> String {
        let m = self.dim;
        let mf = m as f64;
        let corner = |p: [f64; 3]| project(m, p);
        let (w, h) = (80.0 + 2.5 * 360.0 + 120.0, 120.0 + 1.5 * 360.0 + 80.0);
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}" font-family="sans-serif" font-size="14">"#
        );
        let _ = writeln!(out, r#"<title>Admissible (r, s, k) for dim {m}</title>"#);
        let vertices = [
            ("symp.", [0.0, 0.0, 0.0]),
            ("cplx.", [0.0, 0.0, mf / 2.0]),
            ("presymp.C", [mf, 0.0, 0.0]),
            ("T*C M", [mf, mf, 0.0]),
        ];
        for (i, j) in [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)] {
            let (x1, y1) = corner(vertices[i].1);
            let (x2, y2) = corner(vertices[j].1);
            let dash = if i == 2 || j == 2 { r#" stroke-dasharray="6 4""# } else { "" };
            let _ = writeln!(
                out,
                r#"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="black" stroke-width="1.5"{dash}/>"#
            );
        }
        for (label, p) in vertices {
            let (x, y) = corner(p);
            let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}">{label}</text>"#, x + 6.0, y + 18.0);
        }
        for plane in &self.planes {
            let pts: Vec<String> = plane
                .vertices
                .iter()
                .map(|&v| {
                    let (x, y) = corner(v);
                    format!("{x:.2},{y:.2}")
                })
                .collect();
            let _ = writeln!(
                out,
                r#"<polygon points="{}" fill="steelblue" fill-opacity="0.15" stroke="steelblue"/>"#,
                pts.join(" ")
            );
            if let Some(&v) = plane.vertices.first() {
                let (x, y) = corner(v);
                let _ = writeln!(
                    out,
                    r#"<text x="{:.2}" y="{:.2}" fill="steelblue">s+2k={}</text>"#,
                    x - 70.0,
                    y,
                    plane.c
                );
            }
        }
        for p in &self.lattice {
            let (x, y) = corner([p.r as f64, p.s as f64, p.k as f64]);
            let (radius, fill) = if p.highlighted { (7.0, "crimson") } else { (3.5, "gray") };
            let _ = writeln!(
                out,
                r#"<circle cx="{x:.2}" cy="{y:.2}" r="{radius}" fill="{fill}"><title>(r, s, k) = ({}, {}, {}), hat order {}</title></circle>"#,
                p.r, p.s, p.k, p.hat_order
            );
        }
        let (ox, oy) = (30.0, h - 30.0);
        let axes = [("type", 50.0, 0.0), ("order", 0.0, -50.0), ("ri", 30.0, -30.0)];
        for (label, dx, dy) in axes {
            let _ = writeln!(
                out,
                r#"<line x1="{ox}" y1="{oy}" x2="{}" y2="{}" stroke="black"/><text x="{}" y="{}">{label}</text>"#,
                ox + dx,
                oy + dy,
                ox + dx + 4.0,
                oy + dy - 4.0
            );
        }
        out.push_str("</svg>\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_and_planes() {
        let doc = document(3, &[Triple::new(1, 1, 0)]);
        assert_eq!(doc.lattice.len(), 8);
        assert_eq!(doc.queries[0].hat_order, 1);
        assert_eq!(doc.planes.len(), 1);
        assert_eq!(doc.planes[0].vertices.len(), 4);
        for v in &doc.planes[0].vertices {
            assert!((v[1] + 2.0 * v[2] - 1.0).abs() < 1e-12);
        }
        assert_eq!(doc.lattice.iter().filter(|p| p.highlighted).count(), 1);
        let svg = doc.to_svg();
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn extreme_planes_degenerate_to_edges() {
        let doc = document(4, &[Triple::new(0, 0, 0), Triple::new(0, 0, 2)]);
        assert_eq!(doc.planes[0].vertices.len(), 2);
        assert_eq!(doc.planes[1].vertices.len(), 2);
    }
}
