//! The built-in codes: |01>,|10> pairs, the three-spin doublet, the four-spin singlet.

use symgate::encoding::{code_four_qubit, code_three_qubit, code_two_qubit, compose_codes, LogicalCode};
use symgate::spin::{materialize, HamiltonianTerm, SpinSystem};
use symgate::symmetry::restrict_to;

fn show(name: &str, sys: SpinSystem, code: &LogicalCode) {
    println!("{name}: {} logical qubit(s) in {} physical", code.k_logical, code.n_physical);
    for (k, label) in code.codeword_labels.iter().enumerate() {
        let terms: Vec<String> = code
            .codeword(k)
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm() > 1e-12)
            .map(|(i, a)| format!("{:+.3}|{}>", a.re, sys.basis_label(i)))
            .collect();
        println!("  |{label}_L> = {}", terms.join(" "));
    }
}

fn main() -> symgate::Result<()> {
    let s2 = SpinSystem::new(2)?;
    let pair = code_two_qubit(0, 1, s2)?;
    show("pair", s2, &pair);
    for term in [HamiltonianTerm::heisenberg(0, 1, 1.0), HamiltonianTerm::zeeman(0, 1, 1.0)] {
        let r = restrict_to(&materialize(s2, &term)?, &pair.isometry)?;
        println!("  {} restricted: {:?}", term.name(), r.matrix);
    }

    let s3 = SpinSystem::new(3)?;
    show("doublet", s3, &code_three_qubit(s3)?);
    let s4 = SpinSystem::new(4)?;
    show("singlet", s4, &code_four_qubit(s4)?);

    let two_pairs = compose_codes(&[code_two_qubit(0, 1, s4)?, code_two_qubit(2, 3, s4)?], s4)?;
    show("two pairs", s4, &two_pairs);
    Ok(())
}
