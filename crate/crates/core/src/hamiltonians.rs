//! Hamiltonian builders, the GUE sampler and the seeded random stream.
//!
//! Tensor products put qubit 1 (site index 0) in the leftmost factor, so a
//! computational basis index reads as a big-endian bit string.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkit::ComplexMatrix;

pub const RNG_ALGORITHM: &str = "chacha8";

/// Seeded random stream. Same seed, same samples.
#[derive(Debug, Clone)]
pub struct RngState {
    seed: u64,
    rng: ChaCha8Rng,
}

impl RngState {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn algorithm(&self) -> &'static str {
        RNG_ALGORITHM
    }

    pub fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random()
    }

    /// Matrix with i.i.d. standard complex normal entries (unit variance in
    /// both real and imaginary parts).
    pub fn sample_ginibre(&mut self, dim: usize) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                let re = self.normal();
                let im = self.normal();
                m[(i, j)] = Complex64::new(re, im);
            }
        }
        m
    }

    /// GUE sample with density proportional to `exp(-(D/2) Tr H²)`:
    /// diagonal variance `1/D`, off-diagonal real and imaginary variances
    /// `1/(2D)`, so `E[Tr H²] = D`. Exactly Hermitian.
    pub fn sample_hermitian(&mut self, dim: usize) -> ComplexMatrix {
        let scale = (1.0 / dim as f64).sqrt();
        let g = self.sample_ginibre(dim).scale(scale);
        let mut h = ComplexMatrix::zeros(dim);
        for i in 0..dim {
            h[(i, i)] = Complex64::new(g[(i, i)].re, 0.0);
            for j in (i + 1)..dim {
                let z = (g[(i, j)] + g[(j, i)].conj()) * 0.5;
                h[(i, j)] = z;
                h[(j, i)] = z.conj();
            }
        }
        h
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    I,
    X,
    Y,
    Z,
}

pub fn pauli(axis: Axis) -> ComplexMatrix {
    let o = Complex64::new(0.0, 0.0);
    let l = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let rows = match axis {
        Axis::I => [[l, o], [o, l]],
        Axis::X => [[o, l], [l, o]],
        Axis::Y => [[o, -i], [i, o]],
        Axis::Z => [[l, o], [o, -l]],
    };
    ComplexMatrix::from_row_major(rows.iter().flatten().copied().collect()).expect("2x2")
}

/// Left-associated tensor product of a nonempty operator sequence.
pub fn kron_chain<'a>(ops: impl IntoIterator<Item = &'a ComplexMatrix>) -> Result<ComplexMatrix> {
    let mut it = ops.into_iter();
    let first = it.next().ok_or(Error::Empty)?.clone();
    Ok(it.fold(first, |acc, m| acc.kron(m)))
}

/// `op` acting on `site` of an `n`-qubit register, identity elsewhere.
fn on_site(n: usize, site: usize, op: &ComplexMatrix) -> ComplexMatrix {
    let id = pauli(Axis::I);
    let factors: Vec<&ComplexMatrix> = (0..n).map(|k| if k == site { op } else { &id }).collect();
    kron_chain(factors).expect("n >= 1")
}

fn on_bond(n: usize, a: usize, b: usize, op: &ComplexMatrix) -> ComplexMatrix {
    let id = pauli(Axis::I);
    let factors: Vec<&ComplexMatrix> = (0..n).map(|k| if k == a || k == b { op } else { &id }).collect();
    kron_chain(factors).expect("n >= 1")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    #[default]
    Open,
    Periodic,
}

/// Declarative recipe for a Hamiltonian. Serialized with a `variant` tag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case", deny_unknown_fields)]
pub enum HamiltonianSpec {
    Gue {
        dim: usize,
        seed: u64,
    },
    /// `Σ λz_i σz_i + Σ_bonds (λzz σzσz − λxx σxσx − λyy σyσy)`.
    Heisenberg {
        n_qubits: usize,
        lambda_z: Vec<f64>,
        lambda_zz: f64,
        lambda_xx: f64,
        lambda_yy: f64,
        #[serde(default)]
        boundary: Boundary,
    },
    /// `Σ J_n σz_n σz_{n+1} + Σ B_n σx_n`.
    Pst {
        n_qubits: usize,
        j: Vec<f64>,
        b: Vec<f64>,
    },
    /// `Σ_i ω N_i` with `N_i` the number operator on subsystem `i`.
    NumberSum {
        n_subsystems: usize,
        local_dim: usize,
        omega: f64,
    },
    /// `π |1⟩⟨1| ⊗ |−⟩⟨−|`.
    Cnot,
    Custom {
        matrix: ComplexMatrix,
    },
}

/// `π (I − σz)/2 ⊗ (I − σx)/2`: π times the projector onto control `|1⟩`
/// and target `|−⟩`. Its propagator at `t = 1` is CNOT up to phase.
pub fn cnot_hamiltonian() -> ComplexMatrix {
    let id = pauli(Axis::I);
    let control = (&id - &pauli(Axis::Z)).scale(0.5);
    let target = (&id - &pauli(Axis::X)).scale(0.5);
    control.kron(&target).scale(PI)
}

impl HamiltonianSpec {
    pub fn default_heisenberg(n_qubits: usize) -> Self {
        HamiltonianSpec::Heisenberg {
            n_qubits,
            lambda_z: vec![1.0; n_qubits],
            lambda_zz: 1.0,
            lambda_xx: 1.0,
            lambda_yy: 1.0,
            boundary: Boundary::Open,
        }
    }

    pub fn variant_name(&self) -> &'static str {
        match self {
            HamiltonianSpec::Gue { .. } => "gue",
            HamiltonianSpec::Heisenberg { .. } => "heisenberg",
            HamiltonianSpec::Pst { .. } => "pst",
            HamiltonianSpec::NumberSum { .. } => "number_sum",
            HamiltonianSpec::Cnot => "cnot",
            HamiltonianSpec::Custom { .. } => "custom",
        }
    }

    /// Hilbert-space dimension, or `BadSpec` for nonpositive sizes.
    pub fn dim(&self) -> Result<usize> {
        let qubits = |n: usize| {
            if n == 0 || n > 6 {
                Err(Error::BadSpec(format!("n_qubits must be in 1..=6, got {n}")))
            } else {
                Ok(1usize << n)
            }
        };
        match self {
            HamiltonianSpec::Gue { dim, .. } => {
                if *dim == 0 {
                    Err(Error::BadSpec("gue dim must be positive".into()))
                } else {
                    Ok(*dim)
                }
            }
            HamiltonianSpec::Heisenberg { n_qubits, .. } | HamiltonianSpec::Pst { n_qubits, .. } => qubits(*n_qubits),
            HamiltonianSpec::NumberSum {
                n_subsystems,
                local_dim,
                ..
            } => {
                if *n_subsystems == 0 || *local_dim == 0 {
                    return Err(Error::BadSpec("number_sum sizes must be positive".into()));
                }
                local_dim
                    .checked_pow(*n_subsystems as u32)
                    .filter(|&d| d <= 4096)
                    .ok_or_else(|| Error::BadSpec("number_sum dimension too large".into()))
            }
            HamiltonianSpec::Cnot => Ok(4),
            HamiltonianSpec::Custom { matrix } => Ok(matrix.dim()),
        }
    }

    pub fn build(&self) -> Result<ComplexMatrix> {
        let dim = self.dim()?;
        let h = match self {
            HamiltonianSpec::Gue { dim, seed } => RngState::new(*seed).sample_hermitian(*dim),
            HamiltonianSpec::Heisenberg {
                n_qubits,
                lambda_z,
                lambda_zz,
                lambda_xx,
                lambda_yy,
                boundary,
            } => {
                let n = *n_qubits;
                if lambda_z.len() != n {
                    return Err(Error::BadSpec(format!(
                        "lambda_z has {} entries for {n} qubits",
                        lambda_z.len()
                    )));
                }
                let mut h = ComplexMatrix::zeros(dim);
                let z = pauli(Axis::Z);
                for (site, &lz) in lambda_z.iter().enumerate() {
                    h = &h + &on_site(n, site, &z).scale(lz);
                }
                for (a, b) in bonds(n, *boundary) {
                    h = &h + &on_bond(n, a, b, &z).scale(*lambda_zz);
                    h = &h - &on_bond(n, a, b, &pauli(Axis::X)).scale(*lambda_xx);
                    h = &h - &on_bond(n, a, b, &pauli(Axis::Y)).scale(*lambda_yy);
                }
                h
            }
            HamiltonianSpec::Pst { n_qubits, j, b } => {
                let n = *n_qubits;
                if j.len() + 1 != n || b.len() != n {
                    return Err(Error::BadSpec(format!(
                        "pst with {n} qubits needs {} couplings and {n} fields, got {} and {}",
                        n.saturating_sub(1),
                        j.len(),
                        b.len()
                    )));
                }
                let mut h = ComplexMatrix::zeros(dim);
                for (k, &jk) in j.iter().enumerate() {
                    h = &h + &on_bond(n, k, k + 1, &pauli(Axis::Z)).scale(jk);
                }
                for (k, &bk) in b.iter().enumerate() {
                    h = &h + &on_site(n, k, &pauli(Axis::X)).scale(bk);
                }
                h
            }
            HamiltonianSpec::NumberSum {
                n_subsystems,
                local_dim,
                omega,
            } => {
                // Σ_i n_i over the mixed-radix digits of the basis index.
                let diag: Vec<f64> = (0..dim)
                    .map(|mut idx| {
                        let mut total = 0usize;
                        for _ in 0..*n_subsystems {
                            total += idx % local_dim;
                            idx /= local_dim;
                        }
                        omega * total as f64
                    })
                    .collect();
                ComplexMatrix::from_real_diag(&diag)
            }
            HamiltonianSpec::Cnot => cnot_hamiltonian(),
            HamiltonianSpec::Custom { matrix } => {
                matrix.ensure_hermitian(1e-12)?;
                matrix.hermitian_part()
            }
        };
        if !h.is_finite() {
            return Err(Error::BadSpec("Hamiltonian has non-finite entries".into()));
        }
        Ok(h)
    }
}

/// Nearest-neighbour bonds. Periodic adds `(n-1, 0)`, which for two qubits
/// repeats the single bond.
fn bonds(n: usize, boundary: Boundary) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect();
    if boundary == Boundary::Periodic && n >= 2 {
        out.push((n - 1, 0));
    }
    out
}
