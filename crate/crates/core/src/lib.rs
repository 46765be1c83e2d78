//! Mixed-state quantum speed limits for time-independent Hamiltonians.
//!
//! The crate evolves a density matrix under a fixed Hamiltonian and evaluates
//! several lower bounds on the evolution time along the trajectory: an MT-like
//! bound with the Bures angle, two purity-normalized bounds (`T_Θ`, `T_Φ`), and
//! a stronger bound built from a variance-based uncertainty relation with a
//! state-dependent correction term `R(t)`.
//!
//! ```
//! use sqsl::prelude::*;
//!
//! let h = HamiltonianSpec::Pst { n_qubits: 2, j: vec![0.5], b: vec![0.5, 0.5] }.build()?;
//! let rho0 = DensityMatrix::diagonal(&[0.7, 0.1, 0.1, 0.1])?;
//! let traj = evolve(&rho0, &h, TimeGrid::new(2.0, 101)?)?;
//!
//! let mtl = tau_mtl(&traj, MtlEnergy::Shifted)?;
//! let cand = CandidateSet::sample(4, 5, 7)?;
//! let sqsl = tau_sqsl_additive(&traj, &cand, SignChoice::Plus)?;
//! assert_eq!(mtl.values[0], 0.0);
//! assert_eq!(sqsl.values[0], 0.0);
//! # Ok::<(), sqsl::Error>(())
//! ```

pub mod bounds;
pub mod error;
pub mod evolution;
pub mod hamiltonians;
pub mod harness;
pub mod numkit;
pub mod states;
pub mod uncertainty;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::bounds::{
        delta_series, optimize_pointwise, tau_mtl, tau_phi, tau_sqsl_additive, tau_sqsl_integral, tau_theta, BoundKind,
        BoundSeries, CandidateSet, MtlEnergy, NodeFlags,
    };
    pub use crate::error::{Error, Result};
    pub use crate::evolution::{evolve, TimeGrid, Trajectory};
    pub use crate::hamiltonians::{HamiltonianSpec, RngState};
    pub use crate::numkit::ComplexMatrix;
    pub use crate::states::{bures_angle, overlap, purity, DensityMatrix};
    pub use crate::uncertainty::SignChoice;
}

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/states.md")]
    mod states {}
    #[doc = include_str!("../../../book/src/evolution.md")]
    mod evolution {}
    #[doc = include_str!("../../../book/src/uncertainty.md")]
    mod uncertainty {}
    #[doc = include_str!("../../../book/src/bounds.md")]
    mod bounds {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
}
