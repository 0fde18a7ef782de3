//! Pointwise normal form `L = e^B (L_{iω_Δ} × L_{(C,J)})` of random
//! lagrangians, and the extremal-type forms.

use cdirac::classify::{hat, hat_from_invariants, max_type_normal_form, normal_form, type0_normal_form};
use cdirac::dirac::{admissible_cells, random_lagrangian, Profile};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let m = 5;
    for (seed, cell) in admissible_cells(m).into_iter().enumerate() {
        let l = random_lagrangian(m, seed as u64, Profile::Cell(cell))?;
        let nf = normal_form(&l)?;
        let block = nf.cr_block()?;
        let hat_gap = hat(&l).gap(&hat_from_invariants(&l.invariants()))?;
        print!(
            "{cell}: dim Δ = {}, dim C = {}, residual {:.1e}, hat gap {:.1e}",
            nf.delta.dim(),
            block.c.dim(),
            nf.residual,
            hat_gap
        );
        if cell.k == 0 {
            print!(", type-zero residual {:.1e}", type0_normal_form(&l)?.residual);
        }
        if cell.k == (m - cell.r) / 2 {
            print!(", maximal-type residual {:.1e}", max_type_normal_form(&l)?.residual);
        }
        println!();
    }
    Ok(())
}
