//! Encoded universality from the dimension of the generated Lie algebra.

use symgate::lie::universality_on_sector;
use symgate::spin::{total_spin_component, total_spin_squared, Axis, SpinSystem};
use symgate::symmetry::{sector_decompose, ControlSet, DecomposeOptions};

fn report(name: &str, controls: &ControlSet, sector: &symgate::symmetry::SymmetrySector) -> symgate::Result<()> {
    let (v, basis) = universality_on_sector(controls, sector, 1e-8)?;
    println!(
        "{name}: sector dim {}, closure_dim {} of {}, depth {}, {:?}",
        sector.dim(),
        v.closure_dim,
        v.full_unitary_dim,
        basis.generation_depth,
        v.verdict
    );
    Ok(())
}

fn main() -> symgate::Result<()> {
    // Three spins, exchange only, on the S = 1/2, Sz = +1/2 doublet.
    let s3 = SpinSystem::new(3)?;
    let sectors = sector_decompose(
        s3,
        &[total_spin_squared(s3), total_spin_component(s3, Axis::Z)],
        DecomposeOptions::default(),
    )?;
    let doublet = sectors.iter().find(|s| s.matches(&[0.75, 0.5], 1e-8)).expect("doublet");
    report("three spins, exchange", &ControlSet::all_heisenberg_pairs(s3, 1.0)?, doublet)?;

    // Four spins, exchange plus Zeeman gradients, on the Sz = 0 sector.
    let s4 = SpinSystem::new(4)?;
    let sz0 = sector_decompose(s4, &[total_spin_component(s4, Axis::Z)], DecomposeOptions::default())?
        .into_iter()
        .find(|s| s.matches(&[0.0], 1e-8))
        .expect("Sz = 0");
    let desk = ControlSet::new(s4, symgate::suite::desk_controls())?;
    report("four spins, exchange + Zeeman", &desk, &sz0)?;
    let exchange_only = ControlSet::new(s4, desk.terms()[..3].to_vec())?;
    report("four spins, exchange only", &exchange_only, &sz0)?;
    Ok(())
}
