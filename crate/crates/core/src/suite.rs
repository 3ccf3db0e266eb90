//! The bundled reproduction configs, one per headline result.

use std::f64::consts::FRAC_PI_4;
use std::fs;
use std::path::Path;

use crate::config::{
    CodeSection, ExperimentConfig, OutputSection, SectorSection, SweepSection, SynthesisSection, SystemSection,
    TargetSection, Task, Tolerances, SCHEMA_VERSION,
};
use crate::error::{Error, Result};
use crate::spin::{ConservedLabel, HamiltonianTerm};
use crate::synthesis::PulseSequence;

use ConservedLabel::{SSquared, Sx, Sy, Sz};

fn base(task: Task, n_qubits: usize, description: &str, controls: Vec<HamiltonianTerm>) -> ExperimentConfig {
    ExperimentConfig {
        schema_version: SCHEMA_VERSION,
        task,
        seed: 0,
        description: Some(description.into()),
        system: SystemSection { n_qubits },
        tolerances: Tolerances::default(),
        conserved: Vec::new(),
        conserved_files: Vec::new(),
        code: None,
        target: None,
        sector: None,
        synthesis: SynthesisSection::default(),
        sequence: None,
        sweep: None,
        output: OutputSection::default(),
        controls,
    }
}

fn heisenberg_pairs(n: usize) -> Vec<HamiltonianTerm> {
    (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| HamiltonianTerm::heisenberg(i, j, 1.0)))
        .collect()
}

/// Exchange on both pairs, exchange across them, and a Zeeman gradient on each pair.
pub fn desk_controls() -> Vec<HamiltonianTerm> {
    vec![
        HamiltonianTerm::heisenberg(0, 1, 1.0),
        HamiltonianTerm::heisenberg(2, 3, 1.0),
        HamiltonianTerm::heisenberg(1, 2, 1.0),
        HamiltonianTerm::zeeman(0, 1, 1.0),
        HamiltonianTerm::zeeman(2, 3, 1.0),
    ]
}

fn gate(name: &str) -> Option<TargetSection> {
    Some(TargetSection {
        gate: Some(name.into()),
        ..Default::default()
    })
}

/// `(file stem, config)` pairs in suite order.
pub fn reproduction_suite() -> Vec<(&'static str, ExperimentConfig)> {
    let mut out = Vec::new();

    let mut c = base(
        Task::CheckSymmetry,
        4,
        "Exchange on every pair conserves Sx, Sy, Sz and S^2.",
        heisenberg_pairs(4),
    );
    c.conserved = vec![Sx, Sy, Sz, SSquared];
    out.push(("01_heisenberg_conserves_spin", c));

    let mut c = base(
        Task::CheckSymmetry,
        3,
        "XY and XXZ couplings conserve Sz but not Sx, Sy or S^2.",
        vec![
            HamiltonianTerm::xy(0, 1, 0.8),
            HamiltonianTerm::xxz(1, 2, 0.7, 1.3),
            HamiltonianTerm::xxz(0, 2, 1.1, -0.4),
        ],
    );
    c.conserved = vec![Sx, Sy, Sz, SSquared];
    out.push(("02_axial_symmetry", c));

    let mut c = base(
        Task::CertifyObstruction,
        2,
        "CNOT breaks total-spin conservation, so exchange alone cannot produce it.",
        heisenberg_pairs(2),
    );
    c.conserved = vec![Sx, Sy, Sz];
    c.target = Some(TargetSection {
        gate: Some("cnot".into()),
        file: None,
        qubits: Some(vec![0, 1]),
    });
    out.push(("03_cnot_obstruction", c));

    let mut c = base(
        Task::Decompose,
        4,
        "Four spins split by (S^2, Sz); the total singlet is two-dimensional.",
        heisenberg_pairs(4),
    );
    c.conserved = vec![SSquared, Sz];
    out.push(("04_four_spin_sectors", c));

    let mut c = base(
        Task::Closure,
        3,
        "Exchange alone generates su(2) on the three-spin S=1/2, Sz=+1/2 doublet.",
        heisenberg_pairs(3),
    );
    c.conserved = vec![SSquared, Sz];
    c.sector = Some(SectorSection {
        eigenvalues: vec![0.75, 0.5],
    });
    out.push(("05_three_spin_universality", c));

    let mut c = base(
        Task::Closure,
        4,
        "Exchange plus Zeeman gradients are universal on the six-dimensional Sz=0 sector.",
        desk_controls(),
    );
    c.conserved = vec![Sz];
    c.sector = Some(SectorSection { eigenvalues: vec![0.0] });
    out.push(("06_desk_closure", c));

    let mut c = base(
        Task::Synthesize,
        2,
        "Encoded Hadamard on the |01>,|10> code from exchange and a Zeeman gradient.",
        vec![HamiltonianTerm::heisenberg(0, 1, 1.0), HamiltonianTerm::zeeman(0, 1, 1.0)],
    );
    c.conserved = vec![Sz];
    c.code = Some(CodeSection {
        provenance: None,
        blocks: vec![vec![0, 1]],
    });
    c.target = gate("hadamard");
    c.synthesis = SynthesisSection {
        length: 3,
        restarts: 8,
        ..SynthesisSection::default()
    };
    c.sweep = Some(SweepSection { lengths: vec![1, 2, 3] });
    out.push(("07_encoded_single_qubit", c));

    let mut c = base(
        Task::Verify,
        2,
        "A single exchange pulse of duration pi/4 is an encoded X and conserves all spin components.",
        vec![HamiltonianTerm::heisenberg(0, 1, 1.0), HamiltonianTerm::zeeman(0, 1, 1.0)],
    );
    c.conserved = vec![Sx, Sy, Sz, SSquared];
    c.code = Some(CodeSection {
        provenance: None,
        blocks: vec![vec![0, 1]],
    });
    c.target = gate("x");
    c.sequence = Some(PulseSequence::default().then(0, FRAC_PI_4));
    out.push(("08_verify_encoded_x", c));

    let mut c = base(
        Task::Synthesize,
        4,
        "Encoded CNOT on two |01>,|10> codes; every prefix conserves Sz.",
        desk_controls(),
    );
    c.conserved = vec![Sz];
    c.code = Some(CodeSection {
        provenance: None,
        blocks: vec![vec![0, 1], vec![2, 3]],
    });
    c.target = gate("cnot");
    c.synthesis = SynthesisSection {
        length: 16,
        restarts: 32,
        ..SynthesisSection::default()
    };
    out.push(("09_encoded_cnot", c));

    out
}

/// Writes the suite to `dir` as `<stem>.toml` files and returns the configs.
pub fn emit_reproduction_suite(dir: &Path) -> Result<Vec<ExperimentConfig>> {
    fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.display().to_string(),
        source,
    })?;
    let mut out = Vec::new();
    for (stem, cfg) in reproduction_suite() {
        let path = dir.join(format!("{stem}.toml"));
        fs::write(&path, cfg.to_toml_string()?).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        out.push(cfg);
    }
    Ok(out)
}
