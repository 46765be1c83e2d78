//! Acceptance criteria. Runs every criterion, prints one line per criterion
//! and exits nonzero if any of them fails.

use std::f64::consts::PI;
use std::panic::{self, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_complex::Complex64;

use sqsl::bounds::{sqsl_additive_from_r, sqsl_integral_from_r, BoundKind, RSeries};
use sqsl::evolution::{evolve, variance_h_series, Propagator, TimeGrid, Trajectory};
use sqsl::hamiltonians::{HamiltonianSpec, RngState};
use sqsl::harness::{preset, run_scenario, ExperimentConfig, ResultTable};
use sqsl::numkit::{trace_product, ComplexMatrix};
use sqsl::states::{purity, random_density, sqrt_density, DensityMatrix};
use sqsl::uncertainty::{r_value, r_value_with_sigma, sigma_method1, sigma_method2, std_dev, SignChoice};

const SIGNS: [SignChoice; 2] = [SignChoice::Plus, SignChoice::Minus];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

/// Every preset, with gue3 under three Hamiltonian seeds.
fn preset_configs() -> Vec<(String, ExperimentConfig)> {
    let mut out = Vec::new();
    for seed in [1u64, 2, 3] {
        let mut cfg = preset("gue3").unwrap();
        cfg.hamiltonian = HamiltonianSpec::Gue { dim: 3, seed };
        out.push((format!("gue3[seed={seed}]"), cfg));
    }
    for id in ["heis2_a", "heis2_b", "pst2", "qutrit_pair", "cnot2"] {
        out.push((id.to_string(), preset(id).unwrap()));
    }
    for (_, cfg) in &mut out {
        cfg.steps = 201;
        cfg.n_candidates = 5;
        cfg.signs = SIGNS.to_vec();
    }
    out
}

fn timed_run(cfg: &ExperimentConfig) -> (ResultTable, Duration) {
    let start = Instant::now();
    let table = run_scenario(cfg).unwrap();
    (table, start.elapsed())
}

fn min_diff(a: &[f64], b: &[f64]) -> (usize, f64) {
    a.iter()
        .zip(b)
        .map(|(x, y)| x - y)
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (k, d)| if d < acc.1 { (k, d) } else { acc })
}

fn trajectory(cfg: &ExperimentConfig) -> Trajectory {
    evolve(
        &cfg.initial_state.build().unwrap(),
        &cfg.hamiltonian.build().unwrap(),
        TimeGrid::new(cfg.t_end, cfg.steps).unwrap(),
    )
    .unwrap()
}

fn dominance_over_mtl() -> Outcome {
    let mut pass = true;
    let mut lines = Vec::new();
    for (name, cfg) in preset_configs() {
        let (table, elapsed) = timed_run(&cfg);
        let mtl = &table.get(BoundKind::Mtl).unwrap().values;
        for sign in SIGNS {
            let s = &table.get(BoundKind::sqsl(sign)).unwrap().values;
            let (k, d) = min_diff(s, mtl);
            let ok = d >= -1e-9;
            pass &= ok;
            if !ok {
                lines.push(format!(
                    "{name}/{}: min {d:.3e} at t={:.2}",
                    sign.name(),
                    table.times[k]
                ));
            }
        }
        if elapsed > Duration::from_secs(10) {
            pass = false;
            lines.push(format!("{name}: {elapsed:?} > 10 s"));
        }
    }
    outcome(pass, lines.join("; "))
}

fn dominance_over_theta_phi() -> Outcome {
    let (table, _) = timed_run(&preset("pst2").unwrap());
    let mut pass = true;
    let mut lines = Vec::new();
    for other in [BoundKind::Theta, BoundKind::Phi] {
        let o = &table.get(other).unwrap().values;
        for sign in SIGNS {
            let (k, d) = min_diff(&table.get(BoundKind::sqsl(sign)).unwrap().values, o);
            pass &= d >= -1e-9;
            lines.push(format!(
                "{}-{other}: min {d:.3e} at t={:.2}",
                BoundKind::sqsl(sign),
                table.times[k]
            ));
        }
    }
    outcome(pass, lines.join("; "))
}

fn theta_differs_from_phi() -> Outcome {
    let (table, _) = timed_run(&preset("pst2").unwrap());
    let th = &table.get(BoundKind::Theta).unwrap().values;
    let ph = &table.get(BoundKind::Phi).unwrap().values;
    let gap = th.iter().zip(ph).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    outcome(gap > 1e-6, format!("max |T_theta - T_phi| = {gap:.6}"))
}

fn soundness() -> Outcome {
    let mut pass = true;
    let mut checked = 0;
    let mut worst = f64::NEG_INFINITY;
    for (name, cfg) in preset_configs() {
        let (table, _) = timed_run(&cfg);
        for sign in SIGNS {
            let s = table.get(BoundKind::sqsl(sign)).unwrap();
            for k in 0..s.values.len() {
                if s.is_flagged(k) {
                    continue;
                }
                checked += 1;
                let excess = s.values[k] - table.times[k];
                worst = worst.max(excess);
                if excess > 1e-6 {
                    pass = false;
                    eprintln!(
                        "  soundness: {name}/{} node {k}: {} > t = {}",
                        sign.name(),
                        s.values[k],
                        table.times[k]
                    );
                }
            }
        }
    }
    outcome(pass, format!("{checked} unflagged nodes, max(value - t) = {worst:.4}"))
}

fn stronger_ur_monte_carlo() -> Outcome {
    let mut rng = RngState::new(500);
    let (mut violations, mut checked, mut skipped) = (0, 0, 0);
    let mut first = None;
    for _ in 0..500 {
        let dim = 2 + (rng.uniform() * 3.0) as usize;
        let rank = 1 + ((rng.uniform() * dim as f64) as usize).min(dim - 1);
        let rho = random_density(&mut rng, dim, rank);
        let a = rng.sample_hermitian(dim);
        let b = rng.sample_hermitian(dim);
        let o = rng.sample_hermitian(dim);
        let Ok(sigma) = sigma_method2(&rho, &o) else {
            skipped += 1;
            continue;
        };
        let (da, db) = (std_dev(&a, &rho).unwrap(), std_dev(&b, &rho).unwrap());
        // ½|Tr(ρ[A,B])| from the explicit commutator
        let comm = &(&a * &b) - &(&b * &a);
        let rhs = 0.5 * trace_product(rho.matrix(), &comm).unwrap().norm();
        for sign in SIGNS {
            let r = r_value_with_sigma(&rho, &a, da, &b, db, &sigma, sign).unwrap();
            if 1.0 - r <= 0.0 {
                continue;
            }
            checked += 1;
            let lhs = da * db * (1.0 - r);
            if lhs < rhs - 1e-9 {
                violations += 1;
                first.get_or_insert(format!("dim {dim}, sign {}, lhs {lhs:.4} < rhs {rhs:.4}", sign.name()));
            }
        }
    }
    outcome(
        violations == 0,
        format!(
            "{violations} violations in {checked} checks ({skipped} degenerate draws){}",
            first.map(|f| format!("; first: {f}")).unwrap_or_default()
        ),
    )
}

fn sigma_residuals() -> Outcome {
    let mut rng = RngState::new(600);
    let mut worst: f64 = 0.0;
    for k in 0..250 {
        let dim = 2 + (rng.uniform() * 3.0) as usize;
        let (rho, sigma) = if k < 200 {
            let rho = random_density(&mut rng, dim, dim);
            let o = rng.sample_hermitian(dim);
            let s = sigma_method2(&rho, &o).unwrap();
            (rho, s)
        } else {
            let rank = 1 + ((rng.uniform() * (dim - 1) as f64) as usize).min(dim - 2);
            let rho = random_density(&mut rng, dim, rank);
            let s = sigma_method1(&rho, &mut rng).unwrap();
            (rho, s)
        };
        // residuals recomputed here rather than read from the construction
        let orth = trace_product(&sqrt_density(&rho), &sigma.matrix).unwrap().norm();
        let norm = sigma.matrix.as_slice().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        worst = worst.max(orth).max((norm - 1.0).abs());
    }
    outcome(
        worst <= 1e-10,
        format!("max residual {worst:.2e} over 200 + 50 constructions"),
    )
}

fn cyclic_trace() -> Outcome {
    let mut rng = RngState::new(700);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let dim = 2 + (rng.uniform() * 3.0) as usize;
        let rank = 1 + ((rng.uniform() * dim as f64) as usize).min(dim - 1);
        let rho = random_density(&mut rng, dim, rank);
        let a = rng.sample_hermitian(dim);
        let b = rng.sample_hermitian(dim);
        let o = rng.sample_hermitian(dim);
        let (da, db) = (std_dev(&a, &rho).unwrap(), std_dev(&b, &rho).unwrap());
        for sign in SIGNS {
            let simple = r_value(&rho, &a, da, &b, db, &o, sign).unwrap();
            let sigma = sigma_method2(&rho, &o).unwrap();
            let full = r_value_with_sigma(&rho, &a, da, &b, db, &sigma, sign).unwrap();
            worst = worst.max((simple - full).abs());
        }
    }
    outcome(worst <= 1e-10, format!("max |difference| {worst:.2e} over 200 cases"))
}

fn apply(u: &ComplexMatrix, psi: &[Complex64]) -> Vec<Complex64> {
    (0..psi.len())
        .map(|i| (0..psi.len()).map(|j| u[(i, j)] * psi[j]).sum())
        .collect()
}

/// `arccos |⟨ψ|φ⟩|` as `atan2(‖φ − ⟨ψ|φ⟩ψ‖, |⟨ψ|φ⟩|)`.
fn vector_angle(psi: &[Complex64], phi: &[Complex64]) -> f64 {
    let amp: Complex64 = psi.iter().zip(phi).map(|(a, b)| a.conj() * b).sum();
    let perp = phi
        .iter()
        .zip(psi)
        .map(|(p, a)| (p - amp * a).norm_sqr())
        .sum::<f64>()
        .sqrt();
    perp.atan2(amp.norm())
}

fn random_unit_vector(rng: &mut RngState, dim: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..dim).map(|_| Complex64::new(rng.normal(), rng.normal())).collect();
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / n).collect()
}

fn pure_state_reduction() -> Outcome {
    let mut rng = RngState::new(800);
    let mut worst: f64 = 0.0;
    let mut hamiltonians: Vec<ComplexMatrix> = (0..6).map(|k| rng.sample_hermitian(2 + k % 3)).collect();
    for id in ["pst2", "heis2_b"] {
        hamiltonians.push(preset(id).unwrap().hamiltonian.build().unwrap());
    }
    for h in &hamiltonians {
        let psi = random_unit_vector(&mut rng, h.dim());
        let rho0 = DensityMatrix::pure(&psi).unwrap();
        let grid = TimeGrid::new(2.0, 201).unwrap();
        let traj = evolve(&rho0, h, grid).unwrap();
        let s = sqsl_additive_from_r(&traj, &RSeries::zeros(grid.steps()), SignChoice::Plus).unwrap();
        let prop = Propagator::new(h).unwrap();
        for k in 0..grid.steps() {
            let phi = apply(&prop.at(grid.node(k)), &psi);
            let expect = 2.0 * vector_angle(&psi, &phi) / traj.delta_h();
            worst = worst.max((s.values[k] - expect).abs());
        }
    }
    outcome(
        worst <= 1e-9,
        format!("max |error| {worst:.2e} over {} trajectories", hamiltonians.len()),
    )
}

fn conservation() -> Outcome {
    let mut worst: f64 = 0.0;
    for (_, cfg) in preset_configs() {
        let traj = trajectory(&cfg);
        let p0 = purity(&traj.rho0);
        for s in &traj.states {
            worst = worst.max((purity(s) - p0).abs() / p0);
        }
        for v in variance_h_series(&traj) {
            worst = worst.max((v.sqrt() - traj.delta_h()).abs() / traj.delta_h());
        }
    }
    outcome(worst <= 1e-9, format!("max relative drift {worst:.2e}"))
}

fn spot_values() -> Outcome {
    let traj = trajectory(&preset("cnot2").unwrap());
    let mean_err = (traj.mean_h - 0.1 * PI).abs();
    let dh_err = (traj.delta_h() - 0.3 * PI).abs();
    let gue3 = preset("gue3").unwrap().initial_state.build().unwrap();
    let p_err = (purity(&gue3) - 0.38).abs();

    let mut rng = RngState::new(2024);
    let samples: Vec<f64> = (0..2000)
        .map(|_| {
            let h = rng.sample_hermitian(4);
            h.as_slice().iter().map(|z| z.norm_sqr()).sum::<f64>()
        })
        .collect();
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let sd = (samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    let z = (mean - 4.0) / (sd / n.sqrt());

    let pass = mean_err <= 1e-10 && dh_err <= 1e-10 && p_err <= 1e-12 && z.abs() <= 5.0;
    outcome(
        pass,
        format!("cnot <H> err {mean_err:.1e}, dH err {dh_err:.1e}; gue3 purity err {p_err:.1e}; GUE Tr H^2 mean {mean:.4} (z = {z:.2})"),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let run = |sub: &str| {
        let out = dir.path().join(sub);
        let status = Command::new(env!("CARGO_BIN_EXE_sqsl"))
            .args(["preset", "pst2", "--seed", "7", "--out"])
            .arg(&out)
            .output()
            .unwrap();
        assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
        std::fs::read(out.join("pst2.csv")).unwrap()
    };
    let (a, b) = (run("a"), run("b"));
    outcome(
        a == b && !a.is_empty(),
        format!("{} bytes, identical: {}", a.len(), a == b),
    )
}

fn reciprocal_consistency() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut cases = Vec::new();
    // qubit under σx: overlap cos² t, monotone up to t = π/2
    let sx = ComplexMatrix::from_rows(&[
        vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
    ])
    .unwrap();
    cases.push((sx, vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)], 1.5));
    let mut rng = RngState::new(900);
    for dim in [3, 4] {
        let h = rng.sample_hermitian(dim);
        let psi = random_unit_vector(&mut rng, dim);
        cases.push((h, psi, 0.5));
    }
    for (h, psi, t_end) in &cases {
        let rho0 = DensityMatrix::pure(psi).unwrap();
        let grid = TimeGrid::new(*t_end, 201).unwrap();
        let traj = evolve(&rho0, h, grid).unwrap();
        let zeros = RSeries::zeros(grid.steps());
        let integral = sqsl_integral_from_r(&traj, &zeros, SignChoice::Plus).unwrap();
        if integral.valid_prefix_len() != grid.steps() {
            return outcome(false, "overlap angle not monotone on a test trajectory");
        }
        let prop = Propagator::new(h).unwrap();
        for k in 1..grid.steps() {
            let phi = apply(&prop.at(grid.node(k)), psi);
            let closed = 2.0 * vector_angle(psi, &phi) / traj.delta_h();
            worst = worst.max((integral.values[k] - closed).abs() / closed);
        }
    }
    outcome(
        worst <= 2e-3,
        format!("max relative error {worst:.2e} over {} trajectories", cases.len()),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("dominance over MTL on all presets", dominance_over_mtl),
        ("dominance over T_theta and T_phi on pst2", dominance_over_theta_phi),
        ("T_theta differs from T_phi on pst2", theta_differs_from_phi),
        ("soundness: SQSL <= elapsed time", soundness),
        ("stronger uncertainty relation, Monte Carlo", stronger_ur_monte_carlo),
        ("sigma constraint residuals", sigma_residuals),
        ("cyclic-trace equivalence of R", cyclic_trace),
        ("pure-state reduction", pure_state_reduction),
        ("conservation of purity and dH", conservation),
        ("derived spot values", spot_values),
        ("determinism of CLI output", determinism),
        ("reciprocal-form consistency", reciprocal_consistency),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let result = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        if !result.pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {} {name}: {}",
            i + 1,
            if result.pass { "PASS" } else { "FAIL" },
            result.detail
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
