//! Stratification of the order-and-type-changing field on `[−1, 1]³`.

use cdirac::cli::catalog;
use cdirac::field::{analyze_grid, Grid, GridBox, GridOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let entry = catalog::find("sec61").expect("catalog entry");
    let spec = entry.file.to_spec("", entry.name, 1e-9)?;
    let grid = Grid::uniform(GridBox::cube(3, -1.0, 1.0), 9)?;
    let report = analyze_grid(&spec, &grid, &GridOptions::default());
    for st in &report.strata {
        println!("{}: {} points, y in [{}, {}]", st.triple, st.count, st.lo[1], st.hi[1]);
    }
    println!("rank Δ jumps at {} points", report.rank_delta_jumps.len());
    println!("max involutivity residual {:.2e}", report.max_involutivity_residual.unwrap_or(0.0));
    println!("semicontinuity holds: {}", report.semicontinuity.holds());
    Ok(())
}
