//! Density matrices and the state-distance quantities the bounds consume.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hamiltonians::RngState;
use crate::numkit::{hermitian_eig, mat_func, trace_product, ComplexMatrix, Spectrum};

pub const DEFAULT_PSD_TOL: f64 = 1e-10;
/// Hermiticity tolerance for density-matrix inputs.
pub const STATE_HERMITIAN_TOL: f64 = 1e-10;
/// Largest allowed `|Tr ρ - 1|` before any clamping.
pub const TRACE_TOL: f64 = 1e-8;

/// A validated density matrix together with its cached spectrum.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    spectrum: Spectrum,
    psd_tol: f64,
}

impl DensityMatrix {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn psd_tol(&self) -> f64 {
        self.psd_tol
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.spectrum.eigenvalues
    }

    /// Diagonal state in the computational basis.
    pub fn diagonal(weights: &[f64]) -> Result<Self> {
        make_density(&ComplexMatrix::from_real_diag(weights), DEFAULT_PSD_TOL)
    }

    /// `|ψ⟩⟨ψ|` for a (not necessarily normalized) vector.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::validation("psi", "state vector must be nonzero and finite"));
        }
        let m = ComplexMatrix::from_fn(psi.len(), |i, j| psi[i] * psi[j].conj() / (norm * norm));
        make_density(&m, DEFAULT_PSD_TOL)
    }

    /// Expectation `Tr(ρ X)`.
    pub fn expect(&self, op: &ComplexMatrix) -> Result<Complex64> {
        trace_product(&self.matrix, op)
    }

    /// Number of eigenvalues at or below the PSD tolerance.
    pub fn null_dim(&self) -> usize {
        self.spectrum.eigenvalues.iter().filter(|&&l| l <= self.psd_tol).count()
    }
}

/// Validates `m` as a density matrix.
///
/// Eigenvalues in `[-psd_tol, 0)` are clamped to zero and the trace is
/// renormalized when clamping moved it by at most `psd_tol`.
pub fn make_density(m: &ComplexMatrix, psd_tol: f64) -> Result<DensityMatrix> {
    let spectrum = hermitian_eig(m, STATE_HERMITIAN_TOL)?;
    let trace = m.trace().re;
    if (trace - 1.0).abs() > TRACE_TOL {
        return Err(Error::BadTrace { trace });
    }
    let min = spectrum.min();
    if min < -psd_tol {
        return Err(Error::NotPsd { min_eigenvalue: min });
    }
    if min >= 0.0 {
        return Ok(DensityMatrix {
            matrix: m.hermitian_part(),
            spectrum,
            psd_tol,
        });
    }

    let mut eigenvalues: Vec<f64> = spectrum.eigenvalues.iter().map(|&l| l.max(0.0)).collect();
    let clamped_trace: f64 = eigenvalues.iter().sum();
    if (clamped_trace - trace).abs() > psd_tol {
        return Err(Error::NotPsd { min_eigenvalue: min });
    }
    for l in &mut eigenvalues {
        *l /= clamped_trace;
    }
    let spectrum = Spectrum {
        eigenvalues,
        eigenvectors: spectrum.eigenvectors,
    };
    let matrix = mat_func(&spectrum, |x| Complex64::new(x, 0.0)).hermitian_part();
    Ok(DensityMatrix {
        matrix,
        spectrum,
        psd_tol,
    })
}

/// Purity `Tr ρ²`.
///
/// Computed as the trace form `Tr(ρρ)` so that it matches [`overlap`] of a
/// state with itself bit for bit.
pub fn purity(rho: &DensityMatrix) -> f64 {
    trace_product(&rho.matrix, &rho.matrix).expect("same dims").re
}

/// `1 − Tr ρ²` from the spectrum, as `2 Σ_{i<j} λ_i λ_j` with eigenvalues at
/// or below the PSD tolerance taken as zero. Exactly zero for a pure state.
pub fn impurity(rho: &DensityMatrix) -> f64 {
    let lam: Vec<f64> = rho
        .spectrum
        .eigenvalues
        .iter()
        .map(|&l| if l <= rho.psd_tol { 0.0 } else { l })
        .collect();
    let total: f64 = lam.iter().sum();
    let mut acc = 0.0;
    let mut prefix = 0.0;
    for &l in &lam {
        acc += l * prefix;
        prefix += l;
    }
    2.0 * acc / (total * total)
}

/// `arccos sqrt(Tr ρ²)`, evaluated as `atan2(sqrt(1 − P), sqrt(P))` with the
/// impurity taken from the spectrum so that pure states give exactly zero.
pub fn purity_angle(rho: &DensityMatrix) -> f64 {
    let imp = impurity(rho).clamp(0.0, 1.0);
    imp.sqrt().atan2((1.0 - imp).sqrt())
}

/// `Tr(ρσ)`.
pub fn overlap(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    Ok(trace_product(&rho.matrix, &sigma.matrix)?.re)
}

/// Positive square root. Eigenvalues at or below the state's PSD tolerance
/// are treated as exact zeros.
pub fn sqrt_density(rho: &DensityMatrix) -> ComplexMatrix {
    let tol = rho.psd_tol;
    mat_func(&rho.spectrum, |x| {
        Complex64::new(if x <= tol { 0.0 } else { x.sqrt() }, 0.0)
    })
}

fn check_dims(a: &DensityMatrix, b: &DensityMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(())
}

/// Square-root factor of a state restricted to its support: pairs of
/// `sqrt(λ_k)` and eigenvector index for every `λ_k` above the PSD tolerance.
fn support_roots(rho: &DensityMatrix) -> Vec<(f64, usize)> {
    rho.spectrum
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > rho.psd_tol)
        .map(|(k, &l)| (l.sqrt(), k))
        .collect()
}

/// Uhlmann root fidelity `Tr sqrt(sqrt(ρ) σ sqrt(ρ))`, clamped to `[0, 1]`.
///
/// Computed as the trace norm of `sqrt(ρ) sqrt(σ)` restricted to the two
/// supports, through the Gram matrix on the smaller support. Exact zero
/// eigenvalues of rank-deficient states then never pass through a square
/// root, which keeps the result symmetric to round-off.
pub fn uhlmann_fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_dims(rho, sigma)?;
    let (ra, rb) = (support_roots(rho), support_roots(sigma));
    let (va, vb) = (&rho.spectrum.eigenvectors, &sigma.spectrum.eigenvectors);
    let n = rho.dim();
    // c[i][j] = sqrt(a_i) sqrt(b_j) <u_i|v_j>
    let c: Vec<Vec<Complex64>> = ra
        .iter()
        .map(|&(sa, i)| {
            rb.iter()
                .map(|&(sb, j)| {
                    let ip: Complex64 = (0..n).map(|r| va[(r, i)].conj() * vb[(r, j)]).sum();
                    ip * (sa * sb)
                })
                .collect()
        })
        .collect();
    let gram = if rb.len() <= ra.len() {
        ComplexMatrix::from_fn(rb.len(), |j, k| (0..ra.len()).map(|i| c[i][j].conj() * c[i][k]).sum())
    } else {
        ComplexMatrix::from_fn(ra.len(), |i, l| (0..rb.len()).map(|j| c[i][j] * c[l][j].conj()).sum())
    };
    if gram.dim() == 0 {
        return Ok(0.0);
    }
    let spec = hermitian_eig(&gram.hermitian_part(), f64::INFINITY)?;
    let f: f64 = spec.eigenvalues.iter().map(|&m| m.max(0.0).sqrt()).sum();
    Ok(f.clamp(0.0, 1.0))
}

/// Bures angle `arccos F(ρ, σ)` in `[0, π/2]`.
pub fn bures_angle(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    Ok(uhlmann_fidelity(rho, sigma)?.acos())
}

/// Distance quantities between an initial state and an evolved one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateDistance {
    /// `Tr(ρ₀ρ_t)`.
    pub overlap: f64,
    pub fidelity: f64,
    pub bures_angle: f64,
    /// `2 arccos sqrt(Tr(ρ₀ρ_t) / Tr ρ₀²)`, in `[0, π]`.
    pub s0: f64,
}

/// The overlap angle `2 arccos(clamp(sqrt(overlap / purity), 0, 1))`.
pub fn overlap_angle(overlap: f64, purity0: f64) -> f64 {
    let ratio = (overlap / purity0).max(0.0);
    2.0 * ratio.sqrt().clamp(0.0, 1.0).acos()
}

pub fn distance(rho0: &DensityMatrix, rho_t: &DensityMatrix) -> Result<StateDistance> {
    check_dims(rho0, rho_t)?;
    let ov = overlap(rho0, rho_t)?;
    let fidelity = uhlmann_fidelity(rho0, rho_t)?;
    Ok(StateDistance {
        overlap: ov,
        fidelity,
        bures_angle: fidelity.acos(),
        s0: overlap_angle(ov, purity(rho0)),
    })
}

/// Random state of the given rank: `G P G† / Tr(...)` with `G` Ginibre and
/// `P` a rank-`rank` coordinate projector.
pub fn random_density(rng: &mut RngState, dim: usize, rank: usize) -> DensityMatrix {
    assert!(rank >= 1 && rank <= dim);
    let g = rng.sample_ginibre(dim);
    let mut proj = ComplexMatrix::zeros(dim);
    for i in 0..rank {
        proj[(i, i)] = Complex64::new(1.0, 0.0);
    }
    let w = &(&g * &proj) * &g.adjoint();
    let w = w.scale(1.0 / w.trace().re).hermitian_part();
    make_density(&w, DEFAULT_PSD_TOL).expect("Wishart draw is a valid state")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn make_density_examples() {
        assert!(DensityMatrix::diagonal(&[0.7, 0.1, 0.1, 0.1]).is_ok());
        assert!(matches!(
            DensityMatrix::diagonal(&[0.5, 0.6]),
            Err(Error::BadTrace { .. })
        ));
        let rho = DensityMatrix::diagonal(&[1.0 + 1e-12, -1e-12]).unwrap();
        assert_eq!(rho.eigenvalues()[0], 0.0);
        assert!((rho.matrix().trace().re - 1.0).abs() < 1e-15);
        assert!(matches!(
            DensityMatrix::diagonal(&[1.1, -0.1]),
            Err(Error::NotPsd { .. })
        ));
    }

    #[test]
    fn purity_examples() {
        let rho = DensityMatrix::diagonal(&[0.2, 0.5, 0.3]).unwrap();
        assert!((purity(&rho) - 0.38).abs() < 1e-12);
        let pure = DensityMatrix::pure(&[c(1.0), Complex64::new(0.0, 1.0), c(-1.0)]).unwrap();
        assert!((purity(&pure) - 1.0).abs() < 1e-12);
        let mixed = DensityMatrix::diagonal(&[0.25; 4]).unwrap();
        assert!((purity(&mixed) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn sqrt_density_examples() {
        let rho = DensityMatrix::diagonal(&[0.04, 0.96]).unwrap();
        let r = sqrt_density(&rho);
        assert!(r.max_abs_diff(&ComplexMatrix::from_real_diag(&[0.2, 0.96f64.sqrt()])) < 1e-15);

        let pure = DensityMatrix::pure(&[c(0.6), Complex64::new(0.0, 0.8)]).unwrap();
        assert!(sqrt_density(&pure).max_abs_diff(pure.matrix()) < 1e-12);

        let mut rng = RngState::new(5);
        for dim in 2..6 {
            let rho = random_density(&mut rng, dim, dim);
            let r = sqrt_density(&rho);
            assert!((&r * &r).max_abs_diff(rho.matrix()) <= 1e-9);
        }
    }

    #[test]
    fn fidelity_examples() {
        let a = DensityMatrix::diagonal(&[0.2, 0.5, 0.3]).unwrap();
        let b = DensityMatrix::diagonal(&[0.5, 0.2, 0.3]).unwrap();
        assert!((uhlmann_fidelity(&a, &a).unwrap() - 1.0).abs() < 1e-9);

        let zero = DensityMatrix::diagonal(&[1.0, 0.0]).unwrap();
        let one = DensityMatrix::diagonal(&[0.0, 1.0]).unwrap();
        assert_eq!(uhlmann_fidelity(&zero, &one).unwrap(), 0.0);
        assert!((bures_angle(&zero, &one).unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-15);

        // commuting closed form Σ sqrt(p_i q_i)
        let oracle: f64 = [0.2f64 * 0.5, 0.5 * 0.2, 0.3 * 0.3].iter().map(|x| x.sqrt()).sum();
        assert!((uhlmann_fidelity(&a, &b).unwrap() - oracle).abs() < 1e-12);
        assert!((bures_angle(&a, &b).unwrap() - oracle.acos()).abs() < 1e-10);
        assert!(bures_angle(&a, &a).unwrap() < 1e-7);
        assert!(uhlmann_fidelity(&a, &DensityMatrix::diagonal(&[0.5, 0.5]).unwrap()).is_err());
    }

    #[test]
    fn distance_examples() {
        let a = DensityMatrix::diagonal(&[0.2, 0.5, 0.3]).unwrap();
        let d = distance(&a, &a).unwrap();
        assert_eq!(d.s0, 0.0);
        assert!((d.overlap - 0.38).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn fidelity_is_symmetric(seed in any::<u64>(), dim in 2usize..5, commuting in any::<bool>()) {
            let mut rng = RngState::new(seed);
            let (a, b) = if commuting {
                let p: Vec<f64> = (0..dim).map(|_| rng.uniform() + 0.01).collect();
                let q: Vec<f64> = (0..dim).map(|_| rng.uniform() + 0.01).collect();
                let (sp, sq) = (p.iter().sum::<f64>(), q.iter().sum::<f64>());
                let p: Vec<f64> = p.iter().map(|x| x / sp).collect();
                let q: Vec<f64> = q.iter().map(|x| x / sq).collect();
                (DensityMatrix::diagonal(&p).unwrap(), DensityMatrix::diagonal(&q).unwrap())
            } else {
                (random_density(&mut rng, dim, dim), random_density(&mut rng, dim, 1 + (seed as usize) % dim))
            };
            let f1 = uhlmann_fidelity(&a, &b).unwrap();
            let f2 = uhlmann_fidelity(&b, &a).unwrap();
            prop_assert!((f1 - f2).abs() <= 1e-9);
        }

        #[test]
        fn overlap_dominates_weighted_overlap(seed in any::<u64>(), dim in 2usize..6) {
            let mut rng = RngState::new(seed);
            let r0 = random_density(&mut rng, dim, 1 + (seed as usize) % dim);
            let rt = random_density(&mut rng, dim, dim);
            let ov = overlap(&r0, &rt).unwrap();
            let sq = r0.matrix() * r0.matrix();
            let weighted = trace_product(&sq, rt.matrix()).unwrap().re;
            prop_assert!(ov >= weighted - 1e-14);
        }

        #[test]
        fn eigenvalues_sum_to_one(seed in any::<u64>(), dim in 1usize..8) {
            let mut rng = RngState::new(seed);
            let rho = random_density(&mut rng, dim, 1 + (seed as usize) % dim);
            prop_assert!((rho.eigenvalues().iter().sum::<f64>() - 1.0).abs() <= 1e-10);
            let p = purity(&rho);
            prop_assert!(p >= 1.0 / dim as f64 - 1e-10 && p <= 1.0 + 1e-10);
            let d = distance(&rho, &rho).unwrap();
            prop_assert!(d.s0 >= 0.0 && d.s0 <= std::f64::consts::PI);
        }
    }
}
