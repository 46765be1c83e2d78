use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bounds::MtlEnergy;
use crate::error::{Error, Result};
use crate::evolution::{TimeGrid, DEFAULT_STEPS};
use crate::hamiltonians::HamiltonianSpec;
use crate::numkit::{ComplexMatrix, HERMITIAN_TOL};
use crate::states::{make_density, DensityMatrix, DEFAULT_PSD_TOL};
use crate::uncertainty::SignChoice;

use super::presets::{preset, PRESET_IDS};

pub const DEFAULT_CANDIDATES: usize = 5;
pub const DEFAULT_CANDIDATE_SEED: u64 = 7;
pub const EIGENVALUE_SUM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum BoundSelect {
    Mtl,
    Theta,
    Phi,
    Sqsl,
}

impl BoundSelect {
    pub const ALL: [BoundSelect; 4] = [
        BoundSelect::Mtl,
        BoundSelect::Theta,
        BoundSelect::Phi,
        BoundSelect::Sqsl,
    ];
}

/// Spectral description of `ρ₀`. Without a basis the state is diagonal in
/// the computational basis; otherwise column `k` of `basis` is the
/// eigenvector carrying `eigenvalues[k]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialState {
    pub eigenvalues: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<ComplexMatrix>,
}

impl InitialState {
    pub fn diagonal(eigenvalues: &[f64]) -> Self {
        Self {
            eigenvalues: eigenvalues.to_vec(),
            basis: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let field = "initial_state.eigenvalues";
        if self.eigenvalues.is_empty() {
            return Err(Error::validation(field, "must be nonempty"));
        }
        if let Some(bad) = self.eigenvalues.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            return Err(Error::validation(
                field,
                format!("entries must be nonnegative, found {bad}"),
            ));
        }
        let sum: f64 = self.eigenvalues.iter().sum();
        if (sum - 1.0).abs() > EIGENVALUE_SUM_TOL {
            return Err(Error::validation(
                field,
                format!("must sum to 1 within {EIGENVALUE_SUM_TOL:e}, sum is {sum}"),
            ));
        }
        if let Some(b) = &self.basis {
            if b.dim() != self.eigenvalues.len() {
                return Err(Error::validation(
                    "initial_state.basis",
                    format!(
                        "is {0}x{0} but there are {1} eigenvalues",
                        b.dim(),
                        self.eigenvalues.len()
                    ),
                ));
            }
            let dev = (&b.adjoint() * b).max_abs_diff(&ComplexMatrix::identity(b.dim()));
            if dev > 1e-10 {
                return Err(Error::validation(
                    "initial_state.basis",
                    format!("is not unitary (max |B†B − I| = {dev:.3e})"),
                ));
            }
        }
        Ok(())
    }

    pub fn build(&self) -> Result<DensityMatrix> {
        self.validate()?;
        let diag = ComplexMatrix::from_real_diag(&self.eigenvalues);
        let m = match &self.basis {
            None => diag,
            Some(b) => &(b * &diag) * &b.adjoint(),
        };
        make_density(&m.hermitian_part(), DEFAULT_PSD_TOL)
    }
}

/// Fully resolved experiment description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: String,
    pub hamiltonian: HamiltonianSpec,
    pub initial_state: InitialState,
    pub t_end: f64,
    pub steps: usize,
    pub n_candidates: usize,
    pub candidate_seed: u64,
    pub signs: Vec<SignChoice>,
    pub mtl_energy: MtlEnergy,
    pub bounds: Vec<BoundSelect>,
    pub output_dir: PathBuf,
}

/// On-disk form: everything but `scenario` may be omitted and is then taken
/// from the preset.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    scenario: String,
    hamiltonian: Option<HamiltonianSpec>,
    initial_state: Option<InitialState>,
    t_end: Option<f64>,
    steps: Option<usize>,
    n_candidates: Option<usize>,
    candidate_seed: Option<u64>,
    signs: Option<Vec<SignChoice>>,
    mtl_energy: Option<MtlEnergy>,
    bounds: Option<Vec<BoundSelect>>,
    output_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn grid(&self) -> Result<TimeGrid> {
        TimeGrid::new(self.t_end, self.steps)
    }

    pub fn wants(&self, b: BoundSelect) -> bool {
        self.bounds.contains(&b)
    }

    pub fn wants_sign(&self, s: SignChoice) -> bool {
        self.signs.contains(&s)
    }

    pub fn validate(&self) -> Result<()> {
        if !PRESET_IDS.contains(&self.scenario.as_str()) {
            return Err(Error::validation(
                "scenario",
                format!("unknown id {:?}; valid ids: {}", self.scenario, PRESET_IDS.join(", ")),
            ));
        }
        self.grid()?;
        if self.n_candidates == 0 {
            return Err(Error::validation("n_candidates", "must be at least 1"));
        }
        if self.signs.is_empty() {
            return Err(Error::validation("signs", "must name at least one of plus, minus"));
        }
        if self.bounds.is_empty() {
            return Err(Error::validation("bounds", "must name at least one bound"));
        }
        self.initial_state.validate()?;
        let dim = self
            .hamiltonian
            .dim()
            .map_err(|e| Error::validation("hamiltonian", e.to_string()))?;
        if let HamiltonianSpec::Custom { matrix } = &self.hamiltonian {
            matrix
                .ensure_hermitian(HERMITIAN_TOL)
                .map_err(|e| Error::validation("hamiltonian.matrix", e.to_string()))?;
        }
        if dim != self.initial_state.eigenvalues.len() {
            return Err(Error::validation(
                "initial_state.eigenvalues",
                format!(
                    "has {} entries but the Hamiltonian acts on dimension {dim}",
                    self.initial_state.eigenvalues.len()
                ),
            ));
        }
        Ok(())
    }

    /// Duplicate-free signs in canonical order (plus before minus).
    pub(crate) fn normalize(mut self) -> Self {
        let signs: BTreeSet<_> = self.signs.iter().map(|s| matches!(s, SignChoice::Minus)).collect();
        self.signs = signs
            .into_iter()
            .map(|m| if m { SignChoice::Minus } else { SignChoice::Plus })
            .collect();
        let bounds: BTreeSet<_> = self.bounds.iter().copied().collect();
        self.bounds = bounds.into_iter().collect();
        self
    }
}

fn resolve(raw: RawConfig) -> Result<ExperimentConfig> {
    if !PRESET_IDS.contains(&raw.scenario.as_str()) {
        return Err(Error::validation(
            "scenario",
            format!("unknown id {:?}; valid ids: {}", raw.scenario, PRESET_IDS.join(", ")),
        ));
    }
    let base = if raw.scenario == "custom" {
        let hamiltonian = raw
            .hamiltonian
            .clone()
            .ok_or_else(|| Error::validation("hamiltonian", "required for the custom scenario"))?;
        let initial_state = raw
            .initial_state
            .clone()
            .ok_or_else(|| Error::validation("initial_state", "required for the custom scenario"))?;
        ExperimentConfig {
            scenario: "custom".into(),
            hamiltonian,
            initial_state,
            t_end: 3.0,
            steps: DEFAULT_STEPS,
            n_candidates: DEFAULT_CANDIDATES,
            candidate_seed: DEFAULT_CANDIDATE_SEED,
            signs: vec![SignChoice::Plus, SignChoice::Minus],
            mtl_energy: MtlEnergy::Shifted,
            bounds: BoundSelect::ALL.to_vec(),
            output_dir: PathBuf::from("out"),
        }
    } else {
        preset(&raw.scenario)?
    };
    let cfg = ExperimentConfig {
        scenario: raw.scenario,
        hamiltonian: raw.hamiltonian.unwrap_or(base.hamiltonian),
        initial_state: raw.initial_state.unwrap_or(base.initial_state),
        t_end: raw.t_end.unwrap_or(base.t_end),
        steps: raw.steps.unwrap_or(base.steps),
        n_candidates: raw.n_candidates.unwrap_or(base.n_candidates),
        candidate_seed: raw.candidate_seed.unwrap_or(base.candidate_seed),
        signs: raw.signs.unwrap_or(base.signs),
        mtl_energy: raw.mtl_energy.unwrap_or(base.mtl_energy),
        bounds: raw.bounds.unwrap_or(base.bounds),
        output_dir: raw.output_dir.unwrap_or(base.output_dir),
    }
    .normalize();
    cfg.validate()?;
    Ok(cfg)
}

/// Parses a JSON config, fills unspecified fields from the scenario preset
/// and validates the result.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let raw: RawConfig = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    resolve(raw)
}

pub fn load_config(path: impl AsRef<Path>) -> Result<ExperimentConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_config(&text)
}
