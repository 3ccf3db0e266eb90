//! Acceptance criteria 1–10, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines always reach the terminal.

use std::f64::consts::{PI, TAU};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use symgate::config::ExperimentConfig;
use symgate::encoding::{code_two_qubit, compose_codes, gates};
use symgate::lie::{lie_closure, universality_on_sector, ClosureOptions};
use symgate::matrix::{c, commutator_norm, expm_hermitian, frobenius_distance, SquareMatrix};
use symgate::runner::{max_numeric_difference, run};
use symgate::spin::{
    cnot, materialize, pauli_on_site, total_spin_component, total_spin_squared, Axis, ConservedOperator,
    HamiltonianTerm, SpinSystem,
};
use symgate::symmetry::{obstruction_certificate, restrict_to, sector_decompose, ControlSet, DecomposeOptions};
use symgate::synthesis::{apply_sequence, synthesize, verify_sequence, PulseSequence, SynthesisOptions};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

fn c1_conservation() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in 2..=4 {
        let sys = SpinSystem::new(n).map_err(err)?;
        let ops = ConservedOperator::angular_momentum(sys);
        for (i, j) in pairs(n) {
            let h = materialize(sys, &HamiltonianTerm::heisenberg(i, j, 1.0)).map_err(err)?;
            for q in &ops {
                worst = worst.max(commutator_norm(&h, &q.matrix).map_err(err)?);
            }
        }
    }
    check(worst <= 1e-12, format!("max ‖[H_ij, Q]‖ = {worst:.1e}"))
}

fn c2_axial() -> Outcome {
    let (mut sz_worst, mut sx_least) = (0.0f64, f64::INFINITY);
    for n in 2..=4 {
        let sys = SpinSystem::new(n).map_err(err)?;
        let sz = total_spin_component(sys, Axis::Z);
        let sx = total_spin_component(sys, Axis::X);
        for (i, j) in pairs(n) {
            for term in [HamiltonianTerm::xy(i, j, 0.83), HamiltonianTerm::xxz(i, j, 0.83, -1.37)] {
                let h = materialize(sys, &term).map_err(err)?;
                sz_worst = sz_worst.max(commutator_norm(&h, &sz.matrix).map_err(err)?);
                sx_least = sx_least.min(commutator_norm(&h, &sx.matrix).map_err(err)?);
            }
        }
    }
    check(
        sz_worst <= 1e-12 && sx_least > 0.1,
        format!("max ‖[H, Sz]‖ = {sz_worst:.1e}, min ‖[H, Sx]‖ = {sx_least:.3}"),
    )
}

fn c3_obstruction() -> Outcome {
    let sys = SpinSystem::new(2).map_err(err)?;
    let controls = ControlSet::all_heisenberg_pairs(sys, 1.0).map_err(err)?;
    let target = cnot(sys, 0, 1).map_err(err)?;
    let sz = total_spin_component(sys, Axis::Z);
    let cert = obstruction_certificate(&controls, &target, std::slice::from_ref(&sz), 1e-10)
        .map_err(err)?
        .ok_or("no certificate")?;
    let norm_ok = cert.is_valid() && (cert.target_commutator_norm - 2f64.sqrt()).abs() <= 1e-10;

    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut worst_comm, mut least_dist) = (0.0f64, f64::INFINITY);
    for _ in 0..100 {
        let len = rng.random_range(1..=12);
        let durations: Vec<f64> = (0..len).map(|_| rng.random_range(-TAU..TAU)).collect();
        let seq = PulseSequence::from_pattern(&vec![0; len], &durations).map_err(err)?;
        let u = apply_sequence(&controls, &seq).map_err(err)?;
        worst_comm = worst_comm.max(commutator_norm(&u, &sz.matrix).map_err(err)?);
        // Phase minimization on a fine grid.
        let dist = (0..7200)
            .map(|k| {
                let phase = c(0.0, k as f64 * TAU / 7200.0).exp();
                frobenius_distance(&u, &target.scale(phase)).expect("same dim")
            })
            .fold(f64::INFINITY, f64::min);
        least_dist = least_dist.min(dist);
    }
    check(
        norm_ok && worst_comm <= 1e-8 && least_dist > 0.1,
        format!(
            "‖[CNOT, Sz]‖ = {:.12}, 100 sequences: max ‖[U, Sz]‖ = {worst_comm:.1e}, min phase distance = {least_dist:.3}",
            cert.target_commutator_norm
        ),
    )
}

fn c4_sectors() -> Outcome {
    let sys = SpinSystem::new(4).map_err(err)?;
    let sectors = sector_decompose(
        sys,
        &[total_spin_squared(sys), total_spin_component(sys, Axis::Z)],
        DecomposeOptions::default(),
    )
    .map_err(err)?;
    let singlet: Vec<_> = sectors.iter().filter(|s| s.eigenvalues[0].abs() <= 1e-8).collect();
    let dims: Vec<usize> = sectors.iter().map(|s| s.dim()).collect();
    check(
        singlet.len() == 1 && singlet[0].dim() == 2,
        format!("sector dims {dims:?}, S² = 0 sector dim {}", singlet.first().map_or(0, |s| s.dim())),
    )
}

fn c5_restriction() -> Outcome {
    let sys = SpinSystem::new(2).map_err(err)?;
    let code = code_two_qubit(0, 1, sys).map_err(err)?;
    let heis = restrict_to(&materialize(sys, &HamiltonianTerm::heisenberg(0, 1, 1.0)).map_err(err)?, &code.isometry)
        .map_err(err)?;
    let zee = restrict_to(&materialize(sys, &HamiltonianTerm::zeeman(0, 1, 1.0)).map_err(err)?, &code.isometry)
        .map_err(err)?;
    let heis_ref = SquareMatrix::from_real_rows(&[&[-1.0, 2.0], &[2.0, -1.0]]).map_err(err)?;
    let zee_ref = SquareMatrix::from_real_diagonal(&[2.0, -2.0]);
    let dh = frobenius_distance(&heis.matrix, &heis_ref).map_err(err)?;
    let dz = frobenius_distance(&zee.matrix, &zee_ref).map_err(err)?;
    check(
        dh <= 1e-12 && dz <= 1e-12 && heis.leakage <= 1e-12 && zee.leakage <= 1e-12,
        format!("heis error {dh:.1e}, zeeman error {dz:.1e}"),
    )
}

fn closure_on(controls: &ControlSet, conserved: &[ConservedOperator], values: &[f64]) -> Result<(usize, usize), String> {
    let sectors = sector_decompose(controls.sys(), conserved, DecomposeOptions::default()).map_err(err)?;
    let sector = sectors
        .iter()
        .find(|s| s.matches(values, 1e-8))
        .ok_or_else(|| format!("no sector {values:?}"))?;
    let (v, _) = universality_on_sector(controls, sector, 1e-8).map_err(err)?;
    Ok((sector.dim(), v.closure_dim))
}

fn c6_three_qubit() -> Outcome {
    let sys = SpinSystem::new(3).map_err(err)?;
    let controls = ControlSet::all_heisenberg_pairs(sys, 1.0).map_err(err)?;
    let (dim, closure) = closure_on(
        &controls,
        &[total_spin_squared(sys), total_spin_component(sys, Axis::Z)],
        &[0.75, 0.5],
    )?;
    check(dim == 2 && closure >= 3, format!("sector dim {dim}, closure_dim {closure}"))
}

fn c7_desk() -> Outcome {
    let sys = SpinSystem::new(4).map_err(err)?;
    let controls = ControlSet::new(sys, symgate::suite::desk_controls()).map_err(err)?;
    let (dim, closure) = closure_on(&controls, &[total_spin_component(sys, Axis::Z)], &[0.0])?;
    check(dim == 6 && closure >= 35, format!("sector dim {dim}, closure_dim {closure}"))
}

fn c8_synthesis() -> Outcome {
    let sys = SpinSystem::new(4).map_err(err)?;
    let controls = ControlSet::new(sys, symgate::suite::desk_controls()).map_err(err)?;
    let code = compose_codes(&[code_two_qubit(0, 1, sys).map_err(err)?, code_two_qubit(2, 3, sys).map_err(err)?], sys)
        .map_err(err)?;
    let opts = SynthesisOptions {
        length: 16,
        restarts: 32,
        ..SynthesisOptions::default()
    };
    let report = synthesize(&controls, &code, &gates::cnot(), &opts).map_err(err)?;
    let sz = total_spin_component(sys, Axis::Z);
    let audit = verify_sequence(&controls, &code, &gates::cnot(), &report.sequence, std::slice::from_ref(&sz), 10.0)
        .map_err(err)?;
    // Independent prefix products straight from the matrix exponential.
    let mut u = SquareMatrix::identity(sys.dim());
    let mut prefix_worst: f64 = 0.0;
    for p in &report.sequence.pulses {
        u = expm_hermitian(&controls.matrices()[p.control], p.duration).map_err(err)?.matmul(&u).map_err(err)?;
        prefix_worst = prefix_worst.max(commutator_norm(&u, &sz.matrix).map_err(err)?);
    }
    check(
        report.sequence.len() <= 20
            && report.restarts_used <= 32
            && report.best_infidelity <= 1e-4
            && report.leakage_norm <= 1e-4
            && audit.symmetry_audit <= 1e-8
            && prefix_worst <= 1e-8,
        format!(
            "L = {}, restarts {}, infidelity {:.1e}, leakage {:.1e}, prefix ‖[U, Sz]‖ ≤ {:.1e}",
            report.sequence.len(),
            report.restarts_used,
            report.best_infidelity,
            report.leakage_norm,
            prefix_worst.max(audit.symmetry_audit)
        ),
    )
}

fn c9_kernels() -> Outcome {
    let x = SquareMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).map_err(err)?;
    let mut worst: f64 = 0.0;
    for k in 0..64 {
        let theta = -PI + k as f64 * TAU / 63.0;
        let analytic = SquareMatrix::identity(2)
            .scale_real(theta.cos())
            .add(&x.scale(c(0.0, -theta.sin())))
            .map_err(err)?;
        worst = worst.max(frobenius_distance(&expm_hermitian(&x, theta).map_err(err)?, &analytic).map_err(err)?);
    }
    let mut dims = Vec::new();
    for n in 1..=2 {
        let sys = SpinSystem::new(n).map_err(err)?;
        let mut basis = vec![SquareMatrix::identity(sys.dim())];
        for code in 1..(1usize << (2 * n)) {
            let mut m = SquareMatrix::identity(sys.dim());
            for site in 0..n {
                let axis = match (code >> (2 * site)) & 3 {
                    0 => continue,
                    1 => Axis::X,
                    2 => Axis::Y,
                    _ => Axis::Z,
                };
                m = m.matmul(&pauli_on_site(sys, site, axis).map_err(err)?).map_err(err)?;
            }
            basis.push(m);
        }
        let closure = lie_closure(&basis, ClosureOptions { tol: 1e-8, max_elements: None }).map_err(err)?;
        dims.push((closure.dim(), sys.dim() * sys.dim()));
    }
    check(
        worst <= 1e-12 && dims.iter().all(|(a, b)| a == b),
        format!("rotation error {worst:.1e}, Pauli closures {dims:?}"),
    )
}

fn c10_determinism() -> Outcome {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/suite");
    let mut paths: Vec<_> = std::fs::read_dir(&dir)
        .map_err(err)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .collect();
    paths.sort();
    let mut worst: f64 = 0.0;
    for path in &paths {
        let first = run(&ExperimentConfig::load(path).map_err(err)?).map_err(err)?;
        let second = run(&first.config_echo).map_err(err)?;
        let d = max_numeric_difference(&first.results_value(), &second.results_value())
            .ok_or_else(|| format!("{}: reports differ in shape", path.display()))?;
        worst = worst.max(d);
    }
    check(
        paths.len() >= 7 && worst <= 1e-9,
        format!("{} configs re-run from config_echo, max difference {worst:.1e}", paths.len()),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Duration); 10] = [
        ("conservation of total spin by exchange", c1_conservation, Duration::from_secs(1)),
        ("axial symmetry of XY and XXZ", c2_axial, Duration::from_secs(1)),
        ("CNOT obstruction", c3_obstruction, Duration::from_secs(10)),
        ("four-spin singlet sector", c4_sectors, Duration::from_secs(1)),
        ("restricted actions on the pair code", c5_restriction, Duration::from_secs(1)),
        ("three-spin encoded universality", c6_three_qubit, Duration::from_secs(10)),
        ("desk-case encoded universality", c7_desk, Duration::from_secs(120)),
        ("encoded CNOT synthesis", c8_synthesis, Duration::from_secs(600)),
        ("kernel sanity", c9_kernels, Duration::from_secs(1)),
        ("end-to-end determinism", c10_determinism, Duration::from_secs(600)),
    ];
    let mut failed = 0;
    for (k, (name, f, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let elapsed = start.elapsed();
        let in_time = elapsed <= *budget;
        let (status, detail) = match (&outcome, in_time) {
            (Ok(d), true) => ("PASS", d.clone()),
            (Ok(d), false) => ("FAIL", format!("{d}; over the {:?} budget", budget)),
            (Err(d), _) => ("FAIL", d.clone()),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!(
            "criterion {:>2} {status} | {name} | {detail} | {:.3} s",
            k + 1,
            elapsed.as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all 10 acceptance criteria passed");
}
