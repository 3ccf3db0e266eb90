//! CNOT breaks every total-spin component, so exchange alone can never reach it.

use symgate::spin::{cnot, ConservedOperator, SpinSystem};
use symgate::symmetry::{obstruction_certificates, ControlSet};

fn main() -> symgate::Result<()> {
    let sys = SpinSystem::new(2)?;
    let controls = ControlSet::all_heisenberg_pairs(sys, 1.0)?;
    let target = cnot(sys, 0, 1)?;
    let candidates = ConservedOperator::angular_momentum(sys);
    for cert in obstruction_certificates(&controls, &target, &candidates, 1e-10)? {
        println!(
            "{:<10} controls {:?}  target {:.6}  -> {:?}",
            cert.conserved_label.to_string(),
            cert.control_commutator_norms,
            cert.target_commutator_norm,
            cert.verdict
        );
    }
    Ok(())
}
