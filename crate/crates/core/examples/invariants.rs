//! Real index, order and type of the standard linear examples, plus the
//! identities between the associated ranks on random lagrangians.

use cdirac::dirac::{
    admissible_cells, canonical_complex_structure, canonical_cr, canonical_two_form, random_lagrangian, DiracPoint,
    Profile,
};
use cdirac::subspace::DEFAULT_TOL;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let examples = [
        ("symplectic ℝ⁴", DiracPoint::from_presymplectic(&canonical_two_form(2, 0))?),
        ("complex ℂ²", DiracPoint::from_complex_structure(&canonical_complex_structure(2))?),
        ("presymplectic ℝ³", DiracPoint::from_presymplectic(&canonical_two_form(1, 1))?),
        ("CR corank one ℝ³", DiracPoint::from_cr(&canonical_cr(1, 1, DEFAULT_TOL))?),
        ("covectors ℝ³", DiracPoint::covectors(3)),
    ];
    for (name, l) in &examples {
        let inv = l.invariants();
        println!(
            "{name:<18} (r, s, k) = {}   rk E = {}, rk Δ = {}, rk D = {}",
            inv.triple(),
            inv.rank_e,
            inv.rank_delta,
            inv.rank_d
        );
    }

    let cells = admissible_cells(4);
    println!("\n{} admissible cells in dimension 4", cells.len());
    for (seed, &cell) in cells.iter().enumerate() {
        let l = random_lagrangian(4, seed as u64, Profile::Cell(cell))?;
        let inv = l.invariants();
        let failing: Vec<&str> = inv
            .identity_checks()
            .into_iter()
            .filter(|(_, ok)| !ok)
            .map(|(n, _)| n)
            .collect();
        println!("cell {cell}: reproduced {}, failing identities {failing:?}", inv.triple() == cell);
    }
    Ok(())
}
