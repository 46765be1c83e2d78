//! Quantum speed limit bounds evaluated along a trajectory.
//!
//! Every bound is reported as a [`BoundSeries`]: one value per grid node
//! (units of time) plus a per-node flag set. Running integrals over time use
//! the composite trapezoid rule on the uniform grid.

use std::fmt;

use bitflags::bitflags;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::{TimeGrid, Trajectory};
use crate::hamiltonians::RngState;
use crate::numkit::{trace_product, ComplexMatrix};
use crate::states::{bures_angle, overlap, overlap_angle, purity, purity_angle};
use crate::uncertainty::{delta_a_squared, r_value, std_dev, SignChoice, DEGENERATE_TOL};

bitflags! {
    /// Node-level diagnostics.
    #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
    pub struct NodeFlags: u8 {
        /// Pointwise-optimized R reached or exceeded 1.
        const R_GE_ONE = 1 << 0;
        /// A ratio under `arccos sqrt(·)` or a speed radicand was negative and clamped.
        const CLAMPED = 1 << 1;
        /// No candidate observable gave a computable R; R taken as 0.
        const NO_VALID_CANDIDATE = 1 << 2;
        /// The overlap angle decreased; reciprocal form truncated here.
        const NON_MONOTONE = 1 << 3;
        /// Node lies after a truncation point; value is NaN.
        const TRUNCATED = 1 << 4;
        /// Time-averaged speed vanished; the bound is set to 0.
        const ZERO_SPEED = 1 << 5;
    }
}

impl NodeFlags {
    pub fn tokens(self) -> Vec<&'static str> {
        self.iter_names().map(|(name, _)| name).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoundKind {
    #[serde(rename = "MTL")]
    Mtl,
    #[serde(rename = "THETA")]
    Theta,
    #[serde(rename = "PHI")]
    Phi,
    #[serde(rename = "SQSL_PLUS")]
    SqslPlus,
    #[serde(rename = "SQSL_MINUS")]
    SqslMinus,
}

impl BoundKind {
    pub fn sqsl(sign: SignChoice) -> Self {
        match sign {
            SignChoice::Plus => BoundKind::SqslPlus,
            SignChoice::Minus => BoundKind::SqslMinus,
        }
    }

    pub fn column(self) -> &'static str {
        match self {
            BoundKind::Mtl => "mtl",
            BoundKind::Theta => "theta",
            BoundKind::Phi => "phi",
            BoundKind::SqslPlus => "sqsl_plus",
            BoundKind::SqslMinus => "sqsl_minus",
        }
    }
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.column())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundSeries {
    pub grid: TimeGrid,
    pub kind: BoundKind,
    pub values: Vec<f64>,
    pub flags: Vec<NodeFlags>,
}

impl BoundSeries {
    fn new(grid: TimeGrid, kind: BoundKind, values: Vec<f64>, flags: Vec<NodeFlags>) -> Self {
        debug_assert_eq!(values.len(), grid.steps());
        debug_assert_eq!(flags.len(), grid.steps());
        Self {
            grid,
            kind,
            values,
            flags,
        }
    }

    pub fn is_flagged(&self, k: usize) -> bool {
        !self.flags[k].is_empty()
    }

    /// Number of leading nodes that were not truncated.
    pub fn valid_prefix_len(&self) -> usize {
        self.flags
            .iter()
            .position(|f| f.contains(NodeFlags::TRUNCATED))
            .unwrap_or(self.values.len())
    }
}

/// Candidate observables `O` for the σ construction.
#[derive(Debug, Clone)]
pub struct CandidateSet {
    observables: Vec<ComplexMatrix>,
    seed: Option<u64>,
}

impl CandidateSet {
    pub fn new(observables: Vec<ComplexMatrix>) -> Result<Self> {
        if observables.is_empty() {
            return Err(Error::validation("candidates", "candidate set must be nonempty"));
        }
        let dim = observables[0].dim();
        for o in &observables {
            if o.dim() != dim {
                return Err(Error::DimMismatch {
                    left: dim,
                    right: o.dim(),
                });
            }
            o.ensure_hermitian(1e-12)?;
        }
        Ok(Self {
            observables,
            seed: None,
        })
    }

    /// `count` GUE samples drawn from a stream seeded with `seed`.
    pub fn sample(dim: usize, count: usize, seed: u64) -> Result<Self> {
        let mut rng = RngState::new(seed);
        let observables = (0..count).map(|_| rng.sample_hermitian(dim)).collect();
        let mut set = Self::new(observables)?;
        set.seed = Some(seed);
        Ok(set)
    }

    pub fn observables(&self) -> &[ComplexMatrix] {
        &self.observables
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.observables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observables.is_empty()
    }

    pub fn with(&self, extra: ComplexMatrix) -> Result<Self> {
        let mut obs = self.observables.clone();
        obs.push(extra);
        let mut set = Self::new(obs)?;
        set.seed = self.seed;
        Ok(set)
    }
}

/// Correction term per node together with its flags.
#[derive(Debug, Clone, PartialEq)]
pub struct RSeries {
    pub values: Vec<f64>,
    pub flags: Vec<NodeFlags>,
}

impl RSeries {
    pub fn zeros(steps: usize) -> Self {
        Self {
            values: vec![0.0; steps],
            flags: vec![NodeFlags::empty(); steps],
        }
    }

    /// Running trapezoid integral `∫₀^{t_k} R dt`.
    pub fn running_integral(&self, grid: &TimeGrid) -> Vec<f64> {
        cumulative_trapezoid(&self.values, grid.dt())
    }
}

/// Cumulative trapezoid over uniformly spaced samples.
pub fn cumulative_trapezoid(values: &[f64], dx: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in values.windows(2) {
        acc += 0.5 * (w[0] + w[1]) * dx;
        out.push(acc);
    }
    out.truncate(values.len());
    out
}

/// Zero-point of the mean energy in the MT-like denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum MtlEnergy {
    Raw,
    /// `Tr(Hρ₀) − λ_min(H)`.
    #[default]
    Shifted,
}

pub fn mtl_denominator(traj: &Trajectory, energy: MtlEnergy) -> f64 {
    let mean = match energy {
        MtlEnergy::Raw => traj.mean_h,
        MtlEnergy::Shifted => traj.mean_h - traj.h_spectrum.min(),
    };
    mean.min(traj.delta_h())
}

/// MT-like bound `L(ρ₀, ρ_t) / min(⟨H⟩, ΔH)` with the Bures angle `L`.
pub fn tau_mtl(traj: &Trajectory, energy: MtlEnergy) -> Result<BoundSeries> {
    let denom = mtl_denominator(traj, energy);
    if !(denom > DEGENERATE_TOL) {
        return Err(Error::DegenerateDenominator { value: denom });
    }
    let mut values = vec![0.0; traj.grid.steps()];
    for (k, state) in traj.states.iter().enumerate().skip(1) {
        values[k] = bures_angle(&traj.rho0, state)? / denom;
    }
    Ok(BoundSeries::new(
        traj.grid,
        BoundKind::Mtl,
        values,
        vec![NodeFlags::empty(); traj.grid.steps()],
    ))
}

/// `Tr(ρ²H²) − Tr((ρH)²)`, clamped at zero. Sets `CLAMPED` when the raw
/// value is negative beyond round-off.
fn commutator_speed_sq(rho: &ComplexMatrix, h: &ComplexMatrix, flags: &mut NodeFlags) -> f64 {
    let rh = rho * h;
    let a = trace_product(&(rho * rho), &(h * h)).expect("dims").re;
    let b = trace_product(&rh, &rh).expect("dims").re;
    let v = a - b;
    if v < -1e-12 * (1.0 + a.abs()) {
        flags.insert(NodeFlags::CLAMPED);
    }
    v.max(0.0)
}

/// `arccos sqrt(ratio)` with the ratio clamped to `[0, 1]`.
fn clamped_angle(ratio: f64, flags: &mut NodeFlags) -> f64 {
    if ratio < 0.0 {
        flags.insert(NodeFlags::CLAMPED);
    }
    ratio.clamp(0.0, 1.0).sqrt().acos()
}

/// Shared evaluation of the two purity-normalized bounds: angle over the
/// running average of the speed `sqrt(c · Tr(ρ²H² − (ρH)²) / (Tr ρ² − shift))`.
fn averaged_speed_bound(traj: &Trajectory, kind: BoundKind, shift: f64, speed_factor: f64) -> Result<BoundSeries> {
    let steps = traj.grid.steps();
    let h = &traj.hamiltonian;
    let p0 = purity(&traj.rho0);
    let mut flags = vec![NodeFlags::empty(); steps];

    let speeds: Vec<f64> = traj
        .states
        .iter()
        .zip(flags.iter_mut())
        .map(|(s, f)| {
            let num = commutator_speed_sq(s.matrix(), h, f);
            let den = purity(s) - shift;
            (speed_factor * num / den).sqrt()
        })
        .collect();
    let integral = cumulative_trapezoid(&speeds, traj.grid.dt());

    let mut values = vec![0.0; steps];
    for k in 1..steps {
        let ov = overlap(&traj.rho0, &traj.states[k])?;
        let angle = clamped_angle((ov - shift) / (p0 - shift), &mut flags[k]);
        let q = integral[k] / traj.grid.node(k);
        values[k] = if q > 1e-12 {
            angle / q
        } else {
            flags[k].insert(NodeFlags::ZERO_SPEED);
            0.0
        };
    }
    Ok(BoundSeries::new(traj.grid, kind, values, flags))
}

/// `T_Θ = Θ / Q_Θ` with `Θ = arccos sqrt((Tr ρ₀ρ_t − 1/N)/(Tr ρ₀² − 1/N))`.
pub fn tau_theta(traj: &Trajectory) -> Result<BoundSeries> {
    let n = traj.dim() as f64;
    if purity(&traj.rho0) <= 1.0 / n + 1e-10 {
        return Err(Error::MaximallyMixed);
    }
    averaged_speed_bound(traj, BoundKind::Theta, 1.0 / n, 2.0)
}

/// `T_Φ = Φ / Q_Φ` with `Φ = arccos sqrt(Tr ρ₀ρ_t / Tr ρ₀²)`.
pub fn tau_phi(traj: &Trajectory) -> Result<BoundSeries> {
    averaged_speed_bound(traj, BoundKind::Phi, 0.0, 1.0)
}

/// R at node `k` for every candidate; `None` where a candidate is degenerate.
fn candidate_r_at(traj: &Trajectory, k: usize, cand: &CandidateSet, sign: SignChoice) -> Vec<Option<f64>> {
    let rho_t = &traj.states[k];
    let a = traj.rho0.matrix();
    let delta_a = delta_a_squared(&traj.rho0, rho_t).map(f64::sqrt);
    let delta_h = std_dev(&traj.hamiltonian, rho_t);
    cand.observables()
        .iter()
        .map(|o| match (&delta_a, &delta_h) {
            (Ok(da), Ok(dh)) => r_value(rho_t, a, *da, &traj.hamiltonian, *dh, o, sign).ok(),
            _ => None,
        })
        .collect()
}

/// Pointwise maximum of R over the candidates at every node.
pub fn optimize_pointwise(traj: &Trajectory, cand: &CandidateSet, sign: SignChoice) -> RSeries {
    let steps = traj.grid.steps();
    let mut out = RSeries::zeros(steps);
    for k in 0..steps {
        let best = candidate_r_at(traj, k, cand, sign)
            .into_iter()
            .flatten()
            .fold(None, |m: Option<f64>, r| Some(m.map_or(r, |m| m.max(r))));
        match best {
            Some(r) => {
                out.values[k] = r;
                if r >= 1.0 {
                    out.flags[k].insert(NodeFlags::R_GE_ONE);
                }
            }
            None => out.flags[k].insert(NodeFlags::NO_VALID_CANDIDATE),
        }
    }
    out
}

/// R series of each candidate on its own (degenerate nodes count as 0).
pub fn per_candidate_r(traj: &Trajectory, cand: &CandidateSet, sign: SignChoice) -> Vec<Vec<f64>> {
    let steps = traj.grid.steps();
    let mut out = vec![vec![0.0; steps]; cand.len()];
    for k in 0..steps {
        for (i, r) in candidate_r_at(traj, k, cand, sign).into_iter().enumerate() {
            out[i][k] = r.unwrap_or(0.0);
        }
    }
    out
}

fn require_delta_h(traj: &Trajectory) -> Result<f64> {
    let dh = traj.delta_h();
    if dh > DEGENERATE_TOL {
        Ok(dh)
    } else {
        Err(Error::DegenerateVariance {
            operator: "H",
            value: dh,
            tol: DEGENERATE_TOL,
        })
    }
}

/// Closed-form part of the additive bound,
/// `2 (arccos sqrt(Tr ρ₀ρ_t) − arccos sqrt(Tr ρ₀²)) / ΔH`, per node.
///
/// The purity angle comes from the spectrum of `ρ₀` (see
/// [`purity_angle`]); node 0 is exactly zero.
pub fn sqsl_closed_form(traj: &Trajectory) -> Result<Vec<f64>> {
    let dh = require_delta_h(traj)?;
    let base = purity_angle(&traj.rho0);
    let mut out = vec![0.0; traj.grid.steps()];
    for (k, s) in traj.states.iter().enumerate().skip(1) {
        let ov = overlap(&traj.rho0, s)?;
        out[k] = 2.0 * (ov.clamp(0.0, 1.0).sqrt().acos() - base) / dh;
    }
    Ok(out)
}

/// Additive form from an explicit R series: closed-form term plus `∫₀^t R dt`.
pub fn sqsl_additive_from_r(traj: &Trajectory, r: &RSeries, sign: SignChoice) -> Result<BoundSeries> {
    let closed = sqsl_closed_form(traj)?;
    let integral = r.running_integral(&traj.grid);
    let values = closed.iter().zip(&integral).map(|(c, i)| c + i).collect();
    Ok(BoundSeries::new(
        traj.grid,
        BoundKind::sqsl(sign),
        values,
        r.flags.clone(),
    ))
}

pub fn tau_sqsl_additive(traj: &Trajectory, cand: &CandidateSet, sign: SignChoice) -> Result<BoundSeries> {
    require_delta_h(traj)?;
    let r = optimize_pointwise(traj, cand, sign);
    sqsl_additive_from_r(traj, &r, sign)
}

/// Reciprocal (ds₀-integral) form from an explicit R series.
///
/// The integrand `sin s / ((1 − R) cos(s/2) sqrt(1 − P cos²(s/2)))` is split
/// into the kernel `2 sin(s/2) / sqrt(1 − P cos²(s/2))`, integrated exactly on
/// each interval as `−(4/√P) arcsin(√P cos(s/2))`, and the factor `1/(1 − R)`,
/// averaged trapezoidally over the interval's end nodes.
///
/// The series is truncated at the first node where the overlap angle
/// decreases or R ≥ 1; later nodes are NaN and flagged `TRUNCATED`.
pub fn sqsl_integral_from_r(traj: &Trajectory, r: &RSeries, sign: SignChoice) -> Result<BoundSeries> {
    let dh = require_delta_h(traj)?;
    let steps = traj.grid.steps();
    let p0 = purity(&traj.rho0);
    // sqrt(P) consistent with the spectral purity angle, exactly 1 for pure states
    let sqrt_p = purity_angle(&traj.rho0).cos();
    let arcsin_term = |s: f64| (sqrt_p * (0.5 * s).cos()).clamp(-1.0, 1.0).asin();
    // (√P / 2ΔH) · (4 / √P)
    let prefactor = 2.0 / dh;

    let mut values = vec![f64::NAN; steps];
    let mut flags = r.flags.clone();
    values[0] = 0.0;
    if r.values[0] >= 1.0 {
        for f in flags.iter_mut().skip(1) {
            f.insert(NodeFlags::TRUNCATED);
        }
        return Ok(BoundSeries::new(traj.grid, BoundKind::sqsl(sign), values, flags));
    }
    let mut s_prev = 0.0;
    let mut w_prev = 1.0 / (1.0 - r.values[0]);
    let mut acc = 0.0;
    for k in 1..steps {
        let s = overlap_angle(overlap(&traj.rho0, &traj.states[k])?, p0);
        let stop = if s < s_prev - 1e-12 {
            Some(NodeFlags::NON_MONOTONE)
        } else if r.values[k] >= 1.0 {
            Some(NodeFlags::R_GE_ONE)
        } else {
            None
        };
        if let Some(why) = stop {
            flags[k].insert(why);
            for f in flags.iter_mut().skip(k) {
                f.insert(NodeFlags::TRUNCATED);
            }
            break;
        }
        let s = s.max(s_prev);
        let w = 1.0 / (1.0 - r.values[k]);
        acc += (arcsin_term(s_prev) - arcsin_term(s)) * 0.5 * (w + w_prev);
        values[k] = prefactor * acc;
        s_prev = s;
        w_prev = w;
    }
    Ok(BoundSeries::new(traj.grid, BoundKind::sqsl(sign), values, flags))
}

pub fn tau_sqsl_integral(traj: &Trajectory, cand: &CandidateSet, sign: SignChoice) -> Result<BoundSeries> {
    require_delta_h(traj)?;
    let r = optimize_pointwise(traj, cand, sign);
    sqsl_integral_from_r(traj, &r, sign)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeltaSeries {
    pub values: Vec<f64>,
    pub flags: Vec<NodeFlags>,
}

impl DeltaSeries {
    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Elementwise `a − b` with flags unioned.
pub fn delta_series(a: &BoundSeries, b: &BoundSeries) -> Result<DeltaSeries> {
    if a.grid != b.grid {
        return Err(Error::GridMismatch);
    }
    Ok(DeltaSeries {
        values: a.values.iter().zip(&b.values).map(|(x, y)| x - y).collect(),
        flags: a.flags.iter().zip(&b.flags).map(|(x, y)| *x | *y).collect(),
    })
}
