//! Split four spins into (S², Sz) sectors and look at exchange inside the singlet.

use symgate::spin::{materialize, total_spin_component, total_spin_squared, Axis, HamiltonianTerm, SpinSystem};
use symgate::symmetry::{restrict, sector_decompose, DecomposeOptions};

fn main() -> symgate::Result<()> {
    let sys = SpinSystem::new(4)?;
    let conserved = [total_spin_squared(sys), total_spin_component(sys, Axis::Z)];
    let sectors = sector_decompose(sys, &conserved, DecomposeOptions::default())?;
    let tidy = |v: f64| if v.abs() < 1e-9 { 0.0 } else { v };
    for s in &sectors {
        println!("S^2 = {:+.3}  Sz = {:+.3}  dim {}", tidy(s.eigenvalues[0]), tidy(s.eigenvalues[1]), s.dim());
    }

    let singlet = sectors
        .iter()
        .find(|s| s.matches(&[0.0, 0.0], 1e-8))
        .expect("four spins have a singlet sector");
    for term in [HamiltonianTerm::heisenberg(0, 1, 1.0), HamiltonianTerm::heisenberg(1, 2, 1.0)] {
        let r = restrict(&materialize(sys, &term)?, singlet)?;
        println!("\n{} on the singlet (leakage {:.1e}):\n{:?}", term.name(), r.leakage, r.matrix);
    }
    Ok(())
}
