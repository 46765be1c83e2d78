//! Randomized and per-preset checks of the library's invariants, reported as
//! JSON.

use serde::Serialize;
use serde_json::{json, Value};

use crate::bounds::{sqsl_additive_from_r, BoundKind, CandidateSet, RSeries};
use crate::error::Result;
use crate::evolution::{evolve, variance_h_series, Propagator, TimeGrid};
use crate::hamiltonians::RngState;
use crate::numkit::ComplexMatrix;
use num_complex::Complex64;

use crate::states::{purity, random_density, DensityMatrix};
use crate::uncertainty::{
    favorable_sign, r_value, sigma_method1, sigma_method2, std_dev, stronger_ur_check, SignChoice,
};

use super::presets::{preset, PRESET_IDS};
use super::run::{run_scenario, ResultTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// Holds by construction or by a proof; a failure is a defect.
    Invariant,
    /// Observed behaviour claimed for the presets, not a theorem.
    Empirical,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub kind: CheckKind,
    pub cases: usize,
    pub failures: usize,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Value>,
}

impl CheckOutcome {
    fn new(name: impl Into<String>, kind: CheckKind) -> Self {
        Self {
            name: name.into(),
            kind,
            cases: 0,
            failures: 0,
            passed: true,
            detail: None,
            counterexample: None,
        }
    }

    fn record(&mut self, ok: bool, dump: impl FnOnce() -> Value) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            self.passed = false;
            if self.counterexample.is_none() {
                self.counterexample = Some(dump());
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mutation: Option<&'static str>,
    /// All invariant checks passed.
    pub passed: bool,
    /// All empirical checks passed.
    pub empirical_passed: bool,
    pub checks: Vec<CheckOutcome>,
}

#[derive(Debug, Clone, Copy)]
pub struct ValidateOptions {
    pub seed: u64,
    /// Evaluate the uncertainty relation with the unfavorable sign in R.
    pub inject_sign_flip: bool,
    /// Grid size used for the per-preset checks.
    pub steps: usize,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        Self {
            seed: 20240,
            inject_sign_flip: false,
            steps: 201,
        }
    }
}

fn mat(m: &ComplexMatrix) -> Value {
    serde_json::to_value(m).expect("matrix serializes")
}

fn random_dim(rng: &mut RngState) -> usize {
    2 + (rng.uniform() * 3.0) as usize
}

fn random_rank(rng: &mut RngState, dim: usize) -> usize {
    1 + ((rng.uniform() * dim as f64) as usize).min(dim - 1)
}

/// `ΔAΔB(1 − R) ≥ ½|Tr(ρ[A,B])|` on random draws with Method-II σ.
pub fn check_stronger_ur(rng: &mut RngState, draws: usize, flip: bool) -> CheckOutcome {
    let mut out = CheckOutcome::new("stronger_uncertainty_relation", CheckKind::Invariant);
    let mut skipped = 0;
    let mut not_applicable = 0;
    for _ in 0..draws {
        let dim = random_dim(rng);
        let rank = random_rank(rng, dim);
        let rho = random_density(rng, dim, rank);
        let a = rng.sample_hermitian(dim);
        let b = rng.sample_hermitian(dim);
        let o = rng.sample_hermitian(dim);
        let sign = favorable_sign(&rho, &a, &b).expect("dims agree");
        let sign = if flip { sign.flipped() } else { sign };
        let report = sigma_method2(&rho, &o).and_then(|s| stronger_ur_check(&rho, &a, &b, &s, sign));
        match report {
            Err(_) => skipped += 1,
            Ok(rep) if !rep.applicable() => not_applicable += 1,
            Ok(rep) => out.record(rep.holds, || {
                json!({
                    "rho": mat(rho.matrix()), "a": mat(&a), "b": mat(&b), "o": mat(&o),
                    "sign": sign.name(), "lhs": rep.lhs, "rhs": rep.rhs, "r": rep.r,
                })
            }),
        }
    }
    out.detail = Some(format!(
        "sign: {}; {skipped} degenerate draws skipped, {not_applicable} with R >= 1",
        if flip { "unfavorable (mutation)" } else { "favorable" }
    ));
    out
}

/// `|Tr(ρ^{1/2}σ)| ≤ 1e−10` and `|‖σ‖₂ − 1| ≤ 1e−10` for both constructions.
pub fn check_sigma_residuals(rng: &mut RngState, method2: usize, method1: usize) -> CheckOutcome {
    let mut out = CheckOutcome::new("sigma_constraints", CheckKind::Invariant);
    let tol = 1e-10;
    for k in 0..method2 + method1 {
        let dim = random_dim(rng);
        let (rho, sigma) = if k < method2 {
            let rank = random_rank(rng, dim);
            let rho = random_density(rng, dim, rank);
            let o = rng.sample_hermitian(dim);
            (rho.clone(), sigma_method2(&rho, &o))
        } else {
            let rank = 1 + ((rng.uniform() * (dim - 1) as f64) as usize).min(dim - 2);
            let rho = random_density(rng, dim, rank);
            (rho.clone(), sigma_method1(&rho, rng))
        };
        match sigma {
            Ok(s) => out.record(s.orth_residual <= tol && s.norm_residual <= tol, || {
                json!({
                    "rho": mat(rho.matrix()), "sigma": mat(&s.matrix),
                    "orth_residual": s.orth_residual, "norm_residual": s.norm_residual,
                })
            }),
            Err(e) => out.record(false, || json!({ "rho": mat(rho.matrix()), "error": e.to_string() })),
        }
    }
    out
}

/// Trace-cyclic R against the explicit `ρ^{1/2}`-form with Method-II σ.
pub fn check_cyclic_trace(rng: &mut RngState, cases: usize) -> CheckOutcome {
    let mut out = CheckOutcome::new("cyclic_trace_equivalence", CheckKind::Invariant);
    let mut skipped = 0;
    for _ in 0..cases {
        let dim = random_dim(rng);
        let rank = random_rank(rng, dim);
        let rho = random_density(rng, dim, rank);
        let a = rng.sample_hermitian(dim);
        let b = rng.sample_hermitian(dim);
        let o = rng.sample_hermitian(dim);
        let sign = if rng.uniform() < 0.5 {
            SignChoice::Plus
        } else {
            SignChoice::Minus
        };
        let pair = (|| -> Result<(f64, f64)> {
            let (da, db) = (std_dev(&a, &rho)?, std_dev(&b, &rho)?);
            let simple = r_value(&rho, &a, da, &b, db, &o, sign)?;
            let sigma = sigma_method2(&rho, &o)?;
            let full = crate::uncertainty::r_value_with_sigma(&rho, &a, da, &b, db, &sigma, sign)?;
            Ok((simple, full))
        })();
        match pair {
            Ok((simple, full)) => out.record((simple - full).abs() <= 1e-10, || {
                json!({ "rho": mat(rho.matrix()), "a": mat(&a), "b": mat(&b), "o": mat(&o), "simple": simple, "sigma_form": full })
            }),
            Err(_) => skipped += 1,
        }
    }
    out.detail = Some(format!("{skipped} degenerate draws skipped"));
    out
}

/// Pure `ρ₀ = |ψ⟩⟨ψ|`, `R ≡ 0`: the additive bound equals
/// `2 arccos |⟨ψ|φ_t⟩| / ΔH`, with the angle taken from the propagated
/// vector `φ_t = U(t)ψ` as `atan2(‖φ_t − ⟨ψ|φ_t⟩ψ‖, |⟨ψ|φ_t⟩|)`.
pub fn check_pure_reduction(rng: &mut RngState, cases: usize) -> CheckOutcome {
    let mut out = CheckOutcome::new("pure_state_reduction", CheckKind::Invariant);
    for _ in 0..cases {
        let dim = random_dim(rng);
        let mut psi: Vec<Complex64> = (0..dim).map(|_| Complex64::new(rng.normal(), rng.normal())).collect();
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        psi.iter_mut().for_each(|z| *z /= norm);
        let h = rng.sample_hermitian(dim);
        let grid = TimeGrid::new(2.0, 51).expect("valid grid");
        let res = (|| -> Result<(f64, ComplexMatrix)> {
            let rho0 = DensityMatrix::pure(&psi)?;
            let traj = evolve(&rho0, &h, grid)?;
            let s = sqsl_additive_from_r(&traj, &RSeries::zeros(grid.steps()), SignChoice::Plus)?;
            let prop = Propagator::new(&h)?;
            let mut worst: f64 = 0.0;
            for (k, v) in s.values.iter().enumerate() {
                let u = prop.at(grid.node(k));
                let phi: Vec<Complex64> = (0..dim).map(|i| (0..dim).map(|j| u[(i, j)] * psi[j]).sum()).collect();
                let amp: Complex64 = psi.iter().zip(&phi).map(|(a, b)| a.conj() * b).sum();
                let perp = phi
                    .iter()
                    .zip(&psi)
                    .map(|(p, a)| (p - amp * a).norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                let expect = 2.0 * perp.atan2(amp.norm()) / traj.delta_h();
                worst = worst.max((v - expect).abs());
            }
            Ok((worst, rho0.matrix().clone()))
        })();
        match res {
            Ok((worst, rho0)) => out.record(
                worst <= 1e-9,
                || json!({ "rho0": mat(&rho0), "h": mat(&h), "max_error": worst }),
            ),
            Err(e) => out.record(false, || json!({ "h": mat(&h), "error": e.to_string() })),
        }
    }
    out
}

fn preset_ids() -> impl Iterator<Item = &'static str> {
    PRESET_IDS.iter().copied().filter(|id| *id != "custom")
}

/// Purity and energy variance constant along each preset trajectory.
pub fn check_conservation(steps: usize) -> CheckOutcome {
    let mut out = CheckOutcome::new("conservation", CheckKind::Invariant);
    for id in preset_ids() {
        let cfg = preset(id).expect("known preset");
        let res = (|| -> Result<(f64, f64)> {
            let traj = evolve(
                &cfg.initial_state.build()?,
                &cfg.hamiltonian.build()?,
                TimeGrid::new(cfg.t_end, steps)?,
            )?;
            let p0 = purity(&traj.rho0);
            let dp = traj
                .states
                .iter()
                .map(|s| (purity(s) - p0).abs() / p0)
                .fold(0.0, f64::max);
            let dv = variance_h_series(&traj)
                .iter()
                .map(|v| (v - traj.var_h).abs() / traj.var_h.max(f64::MIN_POSITIVE))
                .fold(0.0, f64::max);
            Ok((dp, dv))
        })();
        match res {
            Ok((dp, dv)) => out.record(
                dp <= 1e-9 && dv <= 1e-9,
                || json!({ "scenario": id, "purity_rel_error": dp, "variance_rel_error": dv }),
            ),
            Err(e) => out.record(false, || json!({ "scenario": id, "error": e.to_string() })),
        }
    }
    out
}

fn preset_tables(steps: usize) -> Vec<(&'static str, Result<ResultTable>)> {
    preset_ids()
        .map(|id| {
            let mut cfg = preset(id).expect("known preset");
            cfg.steps = steps;
            (id, run_scenario(&cfg))
        })
        .collect()
}

/// Unflagged additive SQSL values never exceed the elapsed time.
fn check_soundness(tables: &[(&str, Result<ResultTable>)]) -> CheckOutcome {
    let mut out = CheckOutcome::new("soundness", CheckKind::Invariant);
    for (id, table) in tables {
        let Ok(table) = table else {
            let msg = table.as_ref().err().map(|e| e.to_string());
            out.record(false, || json!({ "scenario": id, "error": msg }));
            continue;
        };
        for kind in [BoundKind::SqslPlus, BoundKind::SqslMinus] {
            let s = table.get(kind).expect("both signs requested");
            let bad = (0..s.values.len()).find(|&k| !s.is_flagged(k) && s.values[k] > table.times[k] + 1e-6);
            out.record(bad.is_none(), || {
                let k = bad.expect("failure has a node");
                json!({ "scenario": id, "bound": kind, "node": k, "t": table.times[k], "value": s.values[k] })
            });
        }
    }
    out
}

/// `τ_SQSL − τ_MTL ≥ −1e−9` per preset and sign.
fn check_dominance(tables: &[(&str, Result<ResultTable>)]) -> Vec<CheckOutcome> {
    let mut outs = Vec::new();
    for (id, table) in tables {
        for kind in [BoundKind::SqslPlus, BoundKind::SqslMinus] {
            let mut out = CheckOutcome::new(format!("dominance_over_mtl/{id}/{kind}"), CheckKind::Empirical);
            match table {
                Ok(table) => {
                    let (s, m) = (
                        table.get(kind).expect("requested"),
                        table.get(BoundKind::Mtl).expect("requested"),
                    );
                    let (k, d) = s
                        .values
                        .iter()
                        .zip(&m.values)
                        .map(|(a, b)| a - b)
                        .enumerate()
                        .fold((0, f64::INFINITY), |acc, (k, d)| if d < acc.1 { (k, d) } else { acc });
                    out.detail = Some(format!("min delta {d:.6e} at t = {}", table.times[k]));
                    out.record(
                        d >= -1e-9,
                        || json!({ "scenario": id, "node": k, "t": table.times[k], "delta": d }),
                    );
                }
                Err(e) => out.record(false, || json!({ "scenario": id, "error": e.to_string() })),
            }
            outs.push(out);
        }
    }
    outs
}

/// Adding a candidate observable never lowers the additive SQSL.
fn check_candidate_monotonicity(rng: &mut RngState) -> CheckOutcome {
    let mut out = CheckOutcome::new("candidate_monotonicity", CheckKind::Invariant);
    for id in ["gue3", "pst2", "heis2_b"] {
        let cfg = preset(id).expect("known preset");
        let res = (|| -> Result<Option<usize>> {
            let traj = evolve(
                &cfg.initial_state.build()?,
                &cfg.hamiltonian.build()?,
                TimeGrid::new(cfg.t_end, 101)?,
            )?;
            let cand = CandidateSet::sample(traj.dim(), 3, (rng.uniform() * 1e12) as u64)?;
            let bigger = cand.with(rng.sample_hermitian(traj.dim()))?;
            for sign in [SignChoice::Plus, SignChoice::Minus] {
                let a = crate::bounds::tau_sqsl_additive(&traj, &cand, sign)?;
                let b = crate::bounds::tau_sqsl_additive(&traj, &bigger, sign)?;
                if let Some(k) = (0..a.values.len()).find(|&k| b.values[k] < a.values[k]) {
                    return Ok(Some(k));
                }
            }
            Ok(None)
        })();
        match res {
            Ok(bad) => out.record(bad.is_none(), || json!({ "scenario": id, "node": bad })),
            Err(e) => out.record(false, || json!({ "scenario": id, "error": e.to_string() })),
        }
    }
    out
}

pub fn validate_suite(opts: ValidateOptions) -> ValidationReport {
    let mut rng = RngState::new(opts.seed);
    let mut checks = vec![
        check_stronger_ur(&mut rng, 500, opts.inject_sign_flip),
        check_sigma_residuals(&mut rng, 200, 50),
        check_cyclic_trace(&mut rng, 200),
        check_pure_reduction(&mut rng, 20),
        check_conservation(opts.steps),
        check_candidate_monotonicity(&mut rng),
    ];
    let tables = preset_tables(opts.steps);
    checks.push(check_soundness(&tables));
    checks.extend(check_dominance(&tables));
    let passed = checks
        .iter()
        .filter(|c| c.kind == CheckKind::Invariant)
        .all(|c| c.passed);
    let empirical_passed = checks
        .iter()
        .filter(|c| c.kind == CheckKind::Empirical)
        .all(|c| c.passed);
    ValidationReport {
        version: super::run::VERSION,
        mutation: opts.inject_sign_flip.then_some("sign_flip_in_r"),
        passed,
        empirical_passed,
        checks,
    }
}
