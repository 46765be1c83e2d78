//! Unitary evolution `ρ(t) = U(t) ρ₀ U(t)†` on a uniform time grid (ħ = 1).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkit::{hermitian_eig, mat_func, trace_product, ComplexMatrix, Spectrum, HERMITIAN_TOL};
use crate::states::{make_density, DensityMatrix};
use crate::uncertainty::centered_second_moment;

/// Reduced Planck constant. Fixed to one throughout.
pub const HBAR: f64 = 1.0;
pub const DEFAULT_STEPS: usize = 201;

/// Nodes `t_k = k · t_end / (steps − 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    t_end: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(t_end: f64, steps: usize) -> Result<Self> {
        if !(t_end > 0.0 && t_end.is_finite()) {
            return Err(Error::validation(
                "t_end",
                format!("must be positive and finite, got {t_end}"),
            ));
        }
        if steps < 2 {
            return Err(Error::validation("steps", format!("must be at least 2, got {steps}")));
        }
        Ok(Self { t_end, steps })
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn dt(&self) -> f64 {
        self.t_end / (self.steps - 1) as f64
    }

    pub fn node(&self, k: usize) -> f64 {
        if k + 1 == self.steps {
            self.t_end
        } else {
            k as f64 * self.dt()
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.steps).map(|k| self.node(k)).collect()
    }
}

/// Spectral propagator of a fixed Hamiltonian.
#[derive(Debug, Clone)]
pub struct Propagator {
    spectrum: Spectrum,
}

impl Propagator {
    pub fn new(h: &ComplexMatrix) -> Result<Self> {
        Ok(Self {
            spectrum: hermitian_eig(h, HERMITIAN_TOL)?,
        })
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    /// `exp(−iHt/ħ)`.
    pub fn at(&self, t: f64) -> ComplexMatrix {
        mat_func(&self.spectrum, |lambda| Complex64::new(0.0, -lambda * t / HBAR).exp())
    }
}

pub fn propagator(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    Ok(Propagator::new(h)?.at(t))
}

/// An evolved state sequence together with its generator.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub grid: TimeGrid,
    pub rho0: DensityMatrix,
    /// One state per grid node; `states[0]` is `rho0`.
    pub states: Vec<DensityMatrix>,
    pub hamiltonian: ComplexMatrix,
    pub h_spectrum: Spectrum,
    /// `Tr(Hρ₀)`.
    pub mean_h: f64,
    /// `Tr(H²ρ₀) − Tr(Hρ₀)²`.
    pub var_h: f64,
}

impl Trajectory {
    pub fn dim(&self) -> usize {
        self.rho0.dim()
    }

    /// Energy standard deviation with respect to `ρ₀`.
    pub fn delta_h(&self) -> f64 {
        self.var_h.sqrt()
    }

    pub fn times(&self) -> Vec<f64> {
        self.grid.nodes()
    }
}

fn energy_moments(h: &ComplexMatrix, rho: &ComplexMatrix) -> Result<(f64, f64)> {
    let mean = trace_product(h, rho)?.re;
    Ok((mean, centered_second_moment(h, rho)))
}

pub fn evolve(rho0: &DensityMatrix, h: &ComplexMatrix, grid: TimeGrid) -> Result<Trajectory> {
    if rho0.dim() != h.dim() {
        return Err(Error::DimMismatch {
            left: rho0.dim(),
            right: h.dim(),
        });
    }
    let prop = Propagator::new(h)?;
    let mut states = Vec::with_capacity(grid.steps());
    states.push(rho0.clone());
    for k in 1..grid.steps() {
        let u = prop.at(grid.node(k));
        let rho_t = &(&u * rho0.matrix()) * &u.adjoint();
        states.push(make_density(&rho_t.hermitian_part(), rho0.psd_tol())?);
    }
    let (mean_h, var_h) = energy_moments(h, rho0.matrix())?;
    Ok(Trajectory {
        grid,
        rho0: rho0.clone(),
        states,
        hamiltonian: h.clone(),
        h_spectrum: prop.spectrum,
        mean_h,
        var_h,
    })
}

/// Energy variance `Tr(H²ρ_t) − Tr(Hρ_t)²` at every node.
pub fn variance_h_series(traj: &Trajectory) -> Vec<f64> {
    traj.states
        .iter()
        .map(|s| energy_moments(&traj.hamiltonian, s.matrix()).expect("dims checked").1)
        .collect()
}
