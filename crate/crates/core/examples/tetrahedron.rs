//! The tetrahedron of admissible `(r, s, k)` in dimension 4, as JSON and SVG.

use cdirac::cli::{report, tetra};
use cdirac::dirac::Triple;

fn main() {
    let doc = tetra::document(4, &[Triple::new(0, 0, 1), Triple::new(2, 1, 0)]);
    for q in &doc.queries {
        println!("({}, {}, {}) has hat order {}", q.r, q.s, q.k, q.hat_order);
    }
    println!("{} admissible cells", doc.lattice.len());
    let json = report::to_json(&doc);
    println!("JSON document: {} bytes", json.len());
    let path = std::env::temp_dir().join("cdirac-tetra-4.svg");
    std::fs::write(&path, doc.to_svg()).expect("writable temp dir");
    println!("SVG written to {}", path.display());
}
