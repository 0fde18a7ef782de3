//! Built-in structure fields, emitted as ready-to-run field files.

use crate::field::FrameEntry;

use super::fieldfile::FieldFile;

pub struct CatalogEntry {
    pub name: &'static str,
    pub summary: &'static str,
    /// Provenance and expected behaviour, written as file comments.
    pub notes: &'static [&'static str],
    /// Where invariants are expected to jump, if anywhere.
    pub jump_set: Option<&'static str>,
    /// The frame is expected to be involutive.
    pub involutive: bool,
    pub file: FieldFile,
}

impl CatalogEntry {
    pub fn to_toml(&self) -> String {
        let mut lines = vec![self.summary, ""];
        lines.extend_from_slice(self.notes);
        let jump = self.jump_set.map(|j| format!("Declared jump set: {j}."));
        if let Some(j) = &jump {
            lines.push("");
            lines.push(j);
        }
        self.file.to_toml(&lines)
    }
}

fn section(vector: &[&str], covector: &[&str]) -> FrameEntry {
    FrameEntry {
        vector: vector.iter().map(|s| s.to_string()).collect(),
        covector: covector.iter().map(|s| s.to_string()).collect(),
    }
}

fn file(name: &str, coords: &[&str], frame: Vec<FrameEntry>) -> FieldFile {
    let m = coords.len();
    FieldFile {
        name: Some(name.to_string()),
        dim: m,
        coords: coords.iter().map(|s| s.to_string()).collect(),
        bounds: Some(vec![vec![-1.0; m], vec![1.0; m]]),
        tol: None,
        frame,
    }
}

pub fn catalog() -> Vec<CatalogEntry> {
    vec![
        CatalogEntry {
            name: "sec61",
            summary: "Order and type change with constant real index one on R^3.",
            notes: &[
                "E = <d/dx, e^y d/dy + i f(y) d/dz> with f(y) = y.",
                "Frame: d/dx + i dy, e^y d/dy + i y d/dz - i e^y dx, y dy + i e^y dz.",
                "Invariants (r, s, k) = (1, 1, 0) with rank Delta = 2 where y = 0,",
                "and (1, 0, 1) with rank Delta = 1 elsewhere.",
                "K = R (f(y) d/dx + e^y dz).",
            ],
            jump_set: Some("y = 0 (rank Delta jumps from 1 to 2)"),
            involutive: true,
            file: file(
                "sec61",
                &["x", "y", "z"],
                vec![
                    section(&["1", "0", "0"], &["0", "i", "0"]),
                    section(&["0", "exp(y)", "i*y"], &["-i*exp(y)", "0", "0"]),
                    section(&["0", "0", "0"], &["0", "y", "i*exp(y)"]),
                ],
            ),
        },
        CatalogEntry {
            name: "cr_r3",
            summary: "Constant corank-one CR structure on R^3.",
            notes: &[
                "L = T10 + Ann T10 with D = <d/dx, d/dy>, J d/dx = d/dy, T10 = d/dx - i d/dy.",
                "Invariants (1, 1, 1); CR type everywhere.",
            ],
            jump_set: None,
            involutive: true,
            file: file(
                "cr_r3",
                &["x", "y", "z"],
                vec![
                    section(&["1", "-i", "0"], &["0", "0", "0"]),
                    section(&["0", "0", "0"], &["1", "-i", "0"]),
                    section(&["0", "0", "0"], &["0", "0", "1"]),
                ],
            ),
        },
        CatalogEntry {
            name: "lj_r4",
            summary: "Generalized complex structure of a complex structure on R^4.",
            notes: &[
                "L_J = T01 + T*10 for the standard J on C^2.",
                "Invariants (0, 0, 2): maximal type.",
            ],
            jump_set: None,
            involutive: true,
            file: file(
                "lj_r4",
                &["x1", "y1", "x2", "y2"],
                vec![
                    section(&["1", "i", "0", "0"], &["0", "0", "0", "0"]),
                    section(&["0", "0", "1", "i"], &["0", "0", "0", "0"]),
                    section(&["0", "0", "0", "0"], &["1", "i", "0", "0"]),
                    section(&["0", "0", "0", "0"], &["0", "0", "1", "i"]),
                ],
            ),
        },
        CatalogEntry {
            name: "symplectic_r4",
            summary: "Generalized complex structure of the standard symplectic form on R^4.",
            notes: &[
                "L = {X + i omega(X)} with omega = dx1^dy1 + dx2^dy2.",
                "Invariants (0, 0, 0).",
            ],
            jump_set: None,
            involutive: true,
            file: file(
                "symplectic_r4",
                &["x1", "y1", "x2", "y2"],
                vec![
                    section(&["1", "0", "0", "0"], &["0", "i", "0", "0"]),
                    section(&["0", "1", "0", "0"], &["-i", "0", "0", "0"]),
                    section(&["0", "0", "1", "0"], &["0", "0", "0", "i"]),
                    section(&["0", "0", "0", "1"], &["0", "0", "-i", "0"]),
                ],
            ),
        },
        CatalogEntry {
            name: "bfield_symplectic_r4",
            summary: "B-transform of the standard symplectic structure by a non-constant closed two-form.",
            notes: &[
                "L = e^B L_{i omega}, B = cos(x1) dx1^dx2 (closed), omega standard.",
                "Invariants (0, 0, 0) everywhere.",
            ],
            jump_set: None,
            involutive: true,
            file: file(
                "bfield_symplectic_r4",
                &["x1", "y1", "x2", "y2"],
                vec![
                    section(&["1", "0", "0", "0"], &["0", "i", "cos(x1)", "0"]),
                    section(&["0", "1", "0", "0"], &["-i", "0", "0", "0"]),
                    section(&["0", "0", "1", "0"], &["-cos(x1)", "0", "0", "i"]),
                    section(&["0", "0", "0", "1"], &["0", "0", "-i", "0"]),
                ],
            ),
        },
        CatalogEntry {
            name: "gc_foliation",
            summary: "Foliation of R^5 by the hyperplanes t = const with generalized complex leaves.",
            notes: &[
                "K = Ann D for D = <d/dx1, d/dy1, d/dx2, d/dy2>.",
                "On each leaf: a symplectic pair with form (1 + t^2) dx1^dy1 times a complex pair.",
                "Invariants (1, 1, 1); the leafwise structure has type 1.",
            ],
            jump_set: None,
            involutive: true,
            file: file(
                "gc_foliation",
                &["x1", "y1", "x2", "y2", "t"],
                vec![
                    section(&["1", "0", "0", "0", "0"], &["0", "i*(1 + t^2)", "0", "0", "0"]),
                    section(&["0", "1", "0", "0", "0"], &["-i*(1 + t^2)", "0", "0", "0", "0"]),
                    section(&["0", "0", "1", "i", "0"], &["0", "0", "0", "0", "0"]),
                    section(&["0", "0", "0", "0", "0"], &["0", "0", "1", "i", "0"]),
                    section(&["0", "0", "0", "0", "0"], &["0", "0", "0", "0", "1"]),
                ],
            ),
        },
        CatalogEntry {
            name: "split_r5",
            summary: "Split instance e^B (L_cr x L_{i omega}) on R^3 x R^2.",
            notes: &[
                "L_cr: corank-one CR structure in (x, y, z); L_{i omega}: du^dv in (u, v).",
                "B = dz^du + 2x dx^dv (closed).",
                "Invariants (1, 1, 1); the backward image to (x, y, z) has (r, s) = (1, 1).",
            ],
            jump_set: None,
            involutive: true,
            file: file(
                "split_r5",
                &["x", "y", "z", "u", "v"],
                vec![
                    section(&["1", "-i", "0", "0", "0"], &["0", "0", "0", "0", "2*x"]),
                    section(&["0", "0", "0", "0", "0"], &["1", "-i", "0", "0", "0"]),
                    section(&["0", "0", "0", "0", "0"], &["0", "0", "1", "0", "0"]),
                    section(&["0", "0", "0", "1", "0"], &["0", "0", "-1", "0", "i"]),
                    section(&["0", "0", "0", "0", "1"], &["-2*x", "0", "0", "-i", "0"]),
                ],
            ),
        },
        CatalogEntry {
            name: "noninvolutive",
            summary: "Counterexample: a lagrangian family that is not involutive.",
            notes: &[
                "L = E + Ann E with E = <d/dx, d/dy + x d/dz> (epsilon = 0).",
                "[d/dx, d/dy + x d/dz] = d/dz lies outside L: the involutivity residual is of order one.",
                "Pointwise invariants (3, 1, 0).",
            ],
            jump_set: None,
            involutive: false,
            file: file(
                "noninvolutive",
                &["x", "y", "z"],
                vec![
                    section(&["1", "0", "0"], &["0", "0", "0"]),
                    section(&["0", "1", "x"], &["0", "0", "0"]),
                    section(&["0", "0", "0"], &["0", "-x", "1"]),
                ],
            ),
        },
    ]
}

pub fn find(name: &str) -> Option<CatalogEntry> {
    catalog().into_iter().find(|e| e.name == name)
}
