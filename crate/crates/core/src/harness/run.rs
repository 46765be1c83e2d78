use serde::Serialize;

use crate::bounds::{
    optimize_pointwise, per_candidate_r, sqsl_additive_from_r, tau_mtl, tau_phi, tau_theta, BoundKind, BoundSeries,
    CandidateSet, NodeFlags,
};
use crate::error::{Error, Result};
use crate::evolution::evolve;
use crate::hamiltonians::{HamiltonianSpec, RNG_ALGORITHM};
use crate::uncertainty::SignChoice;

use super::config::{BoundSelect, ExperimentConfig};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// `∫₀^T R dt` for one candidate observable taken alone.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidateTotal {
    pub sign: SignChoice,
    pub index: usize,
    pub integral: f64,
}

/// Columns of the output table, in order.
pub const COLUMNS: [&str; 10] = [
    "mtl",
    "theta",
    "phi",
    "sqsl_plus",
    "sqsl_minus",
    "delta_plus_mtl",
    "delta_minus_mtl",
    "delta_plus_theta",
    "delta_plus_phi",
    "flags",
];

/// Difference columns as `(name, minuend, subtrahend)`.
pub const DELTAS: [(&str, BoundKind, BoundKind); 4] = [
    ("delta_plus_mtl", BoundKind::SqslPlus, BoundKind::Mtl),
    ("delta_minus_mtl", BoundKind::SqslMinus, BoundKind::Mtl),
    ("delta_plus_theta", BoundKind::SqslPlus, BoundKind::Theta),
    ("delta_plus_phi", BoundKind::SqslPlus, BoundKind::Phi),
];

#[derive(Debug, Clone)]
pub struct ResultTable {
    pub config: ExperimentConfig,
    pub times: Vec<f64>,
    /// Present bounds in `BoundKind` order.
    pub series: Vec<BoundSeries>,
    pub candidate_totals: Vec<CandidateTotal>,
}

/// One CSV row; `None` marks a bound that was not requested.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub t: f64,
    pub values: [Option<f64>; 9],
    pub flags: Vec<String>,
}

impl ResultTable {
    pub fn get(&self, kind: BoundKind) -> Option<&BoundSeries> {
        self.series.iter().find(|s| s.kind == kind)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Named difference series, if both operands were computed.
    pub fn delta(&self, name: &str) -> Option<Vec<f64>> {
        let (_, a, b) = DELTAS.iter().find(|(n, _, _)| *n == name)?;
        let (a, b) = (self.get(*a)?, self.get(*b)?);
        Some(a.values.iter().zip(&b.values).map(|(x, y)| x - y).collect())
    }

    pub fn available_deltas(&self) -> Vec<&'static str> {
        DELTAS
            .iter()
            .filter(|(_, a, b)| self.get(*a).is_some() && self.get(*b).is_some())
            .map(|(n, _, _)| *n)
            .collect()
    }

    pub fn rows(&self) -> Vec<Row> {
        let kinds = [
            BoundKind::Mtl,
            BoundKind::Theta,
            BoundKind::Phi,
            BoundKind::SqslPlus,
            BoundKind::SqslMinus,
        ];
        let deltas: Vec<Option<Vec<f64>>> = DELTAS.iter().map(|(n, _, _)| self.delta(n)).collect();
        (0..self.len())
            .map(|k| {
                let mut values = [None; 9];
                for (slot, kind) in kinds.iter().enumerate() {
                    values[slot] = self.get(*kind).map(|s| s.values[k]);
                }
                for (i, d) in deltas.iter().enumerate() {
                    values[5 + i] = d.as_ref().map(|d| d[k]);
                }
                let flags = self
                    .series
                    .iter()
                    .flat_map(|s| s.flags[k].tokens().into_iter().map(move |t| format!("{}:{t}", s.kind)))
                    .collect();
                Row {
                    t: self.times[k],
                    values,
                    flags,
                }
            })
            .collect()
    }

    pub fn any_flags(&self) -> NodeFlags {
        self.series
            .iter()
            .flat_map(|s| s.flags.iter().copied())
            .fold(NodeFlags::empty(), |a, b| a | b)
    }

    /// Compact JSON of the config without `output_dir`, so that the same
    /// experiment written to different places renders identically.
    pub fn config_echo(&self) -> String {
        let mut v = serde_json::to_value(&self.config).expect("config serializes");
        if let Some(obj) = v.as_object_mut() {
            obj.remove("output_dir");
        }
        v.to_string()
    }

    /// `#`-line metadata: config echo, seeds, version, per-candidate totals.
    pub fn metadata(&self) -> Vec<String> {
        let mut lines = vec![
            format!("sqsl {VERSION}"),
            format!("scenario: {}", self.config.scenario),
            format!("config: {}", self.config_echo()),
            format!("rng: {RNG_ALGORITHM}"),
            format!("candidate_seed: {}", self.config.candidate_seed),
        ];
        if let HamiltonianSpec::Gue { seed, .. } = self.config.hamiltonian {
            lines.push(format!("hamiltonian_seed: {seed}"));
        }
        for sign in &self.config.signs {
            let totals: Vec<String> = self
                .candidate_totals
                .iter()
                .filter(|c| c.sign == *sign)
                .map(|c| super::output::format_number(c.integral))
                .collect();
            if !totals.is_empty() {
                lines.push(format!("candidate_r_integrals {}: {}", sign.name(), totals.join(" ")));
            }
        }
        lines
    }
}

/// Builds the Hamiltonian, evolves `ρ₀`, samples the candidate observables
/// and evaluates every requested bound. Deterministic for a fixed config.
pub fn run_scenario(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let tag = |e: Error| e.in_scenario(&cfg.scenario, None);
    cfg.validate().map_err(tag)?;
    let grid = cfg.grid().map_err(tag)?;
    let h = cfg.hamiltonian.build().map_err(tag)?;
    let rho0 = cfg.initial_state.build().map_err(tag)?;
    let traj = evolve(&rho0, &h, grid).map_err(tag)?;

    let mut series = Vec::new();
    if cfg.wants(BoundSelect::Mtl) {
        series.push(tau_mtl(&traj, cfg.mtl_energy).map_err(tag)?);
    }
    if cfg.wants(BoundSelect::Theta) {
        series.push(tau_theta(&traj).map_err(tag)?);
    }
    if cfg.wants(BoundSelect::Phi) {
        series.push(tau_phi(&traj).map_err(tag)?);
    }
    let mut candidate_totals = Vec::new();
    if cfg.wants(BoundSelect::Sqsl) {
        let cand = CandidateSet::sample(traj.dim(), cfg.n_candidates, cfg.candidate_seed).map_err(tag)?;
        for &sign in &cfg.signs {
            let r = optimize_pointwise(&traj, &cand, sign);
            series.push(sqsl_additive_from_r(&traj, &r, sign).map_err(tag)?);
            for (index, r_i) in per_candidate_r(&traj, &cand, sign).iter().enumerate() {
                let integral = *crate::bounds::cumulative_trapezoid(r_i, grid.dt())
                    .last()
                    .expect("steps >= 2");
                candidate_totals.push(CandidateTotal { sign, index, integral });
            }
        }
    }
    for s in &series {
        if let Some(k) = (0..s.values.len()).find(|&k| !s.values[k].is_finite() && s.flags[k].is_empty()) {
            return Err(Error::NonFinite {
                context: "bound series",
            }
            .in_scenario(&cfg.scenario, Some(k)));
        }
    }
    series.sort_by_key(|s| s.kind as u8);
    Ok(ResultTable {
        config: cfg.clone(),
        times: grid.nodes(),
        series,
        candidate_totals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::presets::preset;

    fn small(id: &str) -> ExperimentConfig {
        let mut cfg = preset(id).unwrap();
        cfg.steps = 41;
        cfg
    }

    #[test]
    fn cnot2_is_stationary_with_growing_sqsl() {
        let table = run_scenario(&small("cnot2")).unwrap();
        assert!(table.get(BoundKind::Mtl).unwrap().values.iter().all(|v| v.abs() < 1e-9));
        for kind in [BoundKind::SqslPlus, BoundKind::SqslMinus] {
            let v = &table.get(kind).unwrap().values;
            assert!(v.windows(2).all(|w| w[1] >= w[0]));
        }
    }

    #[test]
    fn rows_have_expected_shape() {
        let mut cfg = small("pst2");
        cfg.bounds = vec![BoundSelect::Mtl, BoundSelect::Sqsl];
        cfg.signs = vec![SignChoice::Plus];
        let table = run_scenario(&cfg).unwrap();
        let rows = table.rows();
        assert_eq!(rows.len(), 41);
        assert_eq!(rows[0].t, 0.0);
        assert!(rows.windows(2).all(|w| w[1].t > w[0].t));
        let r = &rows[10];
        assert!(r.values[0].is_some() && r.values[1].is_none() && r.values[2].is_none());
        assert!(r.values[3].is_some() && r.values[4].is_none());
        assert!(r.values[5].is_some() && r.values[6].is_none());
        assert_eq!(table.available_deltas(), vec!["delta_plus_mtl"]);
        assert_eq!(table.candidate_totals.len(), 5);
    }

    #[test]
    fn errors_are_tagged_with_scenario() {
        let mut cfg = small("pst2");
        cfg.initial_state.eigenvalues = vec![0.25; 4];
        let err = run_scenario(&cfg).unwrap_err();
        match err {
            Error::Scenario { scenario, source, .. } => {
                assert_eq!(scenario, "pst2");
                assert!(matches!(
                    *source,
                    Error::MaximallyMixed | Error::DegenerateVariance { .. }
                ));
            }
            e => panic!("{e}"),
        }
    }
}
