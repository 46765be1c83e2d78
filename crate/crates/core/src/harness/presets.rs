use std::path::PathBuf;

use crate::bounds::MtlEnergy;
use crate::error::{Error, Result};
use crate::evolution::DEFAULT_STEPS;
use crate::hamiltonians::{Boundary, HamiltonianSpec};
use crate::uncertainty::SignChoice;

use super::config::{BoundSelect, ExperimentConfig, InitialState, DEFAULT_CANDIDATES, DEFAULT_CANDIDATE_SEED};

pub const PRESET_IDS: &[&str] = &["gue3", "heis2_a", "heis2_b", "pst2", "qutrit_pair", "cnot2", "custom"];

/// Hamiltonian seed of the `gue3` preset.
pub const DEFAULT_GUE_SEED: u64 = 1;

pub fn describe(id: &str) -> Option<&'static str> {
    Some(match id {
        "gue3" => "3-level GUE Hamiltonian, rho0 = diag(0.2, 0.5, 0.3)",
        "heis2_a" => "two-qubit Heisenberg chain, all couplings 1, rho0 = diag(0.7, 0.1, 0.1, 0.1)",
        "heis2_b" => "two-qubit anisotropic Heisenberg chain, rho0 = diag(0.7, 0.1, 0.1, 0.1)",
        "pst2" => "two-qubit perfect-state-transfer chain, J = B = 1/2, rho0 = diag(0.7, 0.1, 0.1, 0.1)",
        "qutrit_pair" => "two qutrits under omega (N1 + N2), diagonal rho0 on six levels",
        "cnot2" => "principal CNOT Hamiltonian, rho0 = diag(0.7, 0.1, 0.1, 0.1)",
        "custom" => "user-supplied Hamiltonian and initial state (config only)",
        _ => return None,
    })
}

const HEIS_STATE: [f64; 4] = [0.7, 0.1, 0.1, 0.1];

/// Weights on the nine levels `|n1 n2⟩` (index `3 n1 + n2`); the weight on
/// index 3 is what remains after the other five.
pub const QUTRIT_PAIR_WEIGHTS: [f64; 9] = [0.175, 0.25, 0.15, 0.065, 0.0, 0.0, 0.0, 0.105, 0.255];

fn base(scenario: &str, hamiltonian: HamiltonianSpec, eigenvalues: &[f64], t_end: f64) -> ExperimentConfig {
    ExperimentConfig {
        scenario: scenario.into(),
        hamiltonian,
        initial_state: InitialState::diagonal(eigenvalues),
        t_end,
        steps: DEFAULT_STEPS,
        n_candidates: DEFAULT_CANDIDATES,
        candidate_seed: DEFAULT_CANDIDATE_SEED,
        signs: vec![SignChoice::Plus, SignChoice::Minus],
        mtl_energy: MtlEnergy::Shifted,
        bounds: BoundSelect::ALL.to_vec(),
        output_dir: PathBuf::from("out"),
    }
}

/// Built-in scenario. `custom` has no preset; it exists only in configs.
pub fn preset(id: &str) -> Result<ExperimentConfig> {
    let cfg = match id {
        "gue3" => base(
            id,
            HamiltonianSpec::Gue {
                dim: 3,
                seed: DEFAULT_GUE_SEED,
            },
            &[0.2, 0.5, 0.3],
            3.0,
        ),
        "heis2_a" => base(id, HamiltonianSpec::default_heisenberg(2), &HEIS_STATE, 3.0),
        "heis2_b" => base(
            id,
            HamiltonianSpec::Heisenberg {
                n_qubits: 2,
                lambda_z: vec![1.0, 0.5],
                lambda_zz: 0.5,
                lambda_xx: 1.0,
                lambda_yy: 0.25,
                boundary: Boundary::Open,
            },
            &HEIS_STATE,
            3.0,
        ),
        "pst2" => base(
            id,
            HamiltonianSpec::Pst {
                n_qubits: 2,
                j: vec![0.5],
                b: vec![0.5, 0.5],
            },
            &HEIS_STATE,
            2.0,
        ),
        "qutrit_pair" => base(
            id,
            HamiltonianSpec::NumberSum {
                n_subsystems: 2,
                local_dim: 3,
                omega: 1.0,
            },
            &QUTRIT_PAIR_WEIGHTS,
            3.0,
        ),
        "cnot2" => base(id, HamiltonianSpec::Cnot, &HEIS_STATE, 2.0),
        _ => return Err(Error::UnknownPreset(id.to_string())),
    };
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_examples() {
        assert_eq!(preset("gue3").unwrap().initial_state.eigenvalues, vec![0.2, 0.5, 0.3]);
        let q = preset("qutrit_pair").unwrap().initial_state.eigenvalues;
        let picked: Vec<f64> = [0, 1, 2, 3, 7, 8].iter().map(|&i| q[i]).collect();
        assert_eq!(picked, vec![0.175, 0.25, 0.15, 0.065, 0.105, 0.255]);
        assert!((q.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(preset("cnot2").unwrap().hamiltonian, HamiltonianSpec::Cnot);
        assert!(matches!(preset("custom"), Err(Error::UnknownPreset(_))));
        assert!(matches!(preset("gue4"), Err(Error::UnknownPreset(_))));
    }

    #[test]
    fn every_preset_validates() {
        for id in PRESET_IDS.iter().filter(|&&id| id != "custom") {
            preset(id).unwrap().validate().unwrap();
            assert!(describe(id).is_some());
        }
    }
}
