//! Which total-spin operators do exchange, XY and XXZ couplings conserve?

use symgate::spin::{ConservedOperator, HamiltonianTerm, SpinSystem};
use symgate::symmetry::{conserved_check, ControlSet};

fn main() -> symgate::Result<()> {
    let sys = SpinSystem::new(3)?;
    let families = [
        ("heisenberg", vec![HamiltonianTerm::heisenberg(0, 1, 1.0), HamiltonianTerm::heisenberg(1, 2, 0.6)]),
        ("xy", vec![HamiltonianTerm::xy(0, 1, 1.0), HamiltonianTerm::xy(1, 2, 0.6)]),
        ("xxz", vec![HamiltonianTerm::xxz(0, 1, 1.0, 0.3), HamiltonianTerm::xxz(1, 2, 0.6, -1.2)]),
        ("zeeman", vec![HamiltonianTerm::zeeman(0, 2, 1.0)]),
    ];
    let candidates = ConservedOperator::angular_momentum(sys);
    for (name, terms) in families {
        let controls = ControlSet::new(sys, terms)?;
        let line: Vec<String> = conserved_check(&controls, &candidates, 1e-12)?
            .iter()
            .map(|r| format!("{}={:<5}", r.label, r.conserved))
            .collect();
        println!("{name:<11} {}", line.join("  "));
    }
    Ok(())
}
