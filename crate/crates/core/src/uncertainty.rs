//! Stronger uncertainty relation machinery.
//!
//! The correction term is
//!
//! ```text
//! R = ½ |Tr(ρ^{1/2} (A/ΔA ± i B/ΔB) σ)|²,   Tr(ρ^{1/2} σ) = 0,  ‖σ‖₂ = 1,
//! ```
//!
//! and the relation reads `ΔA ΔB (1 − R) ≥ ½ |Tr(ρ[A, B])|`. With the
//! observable form `σ = ((O − ⟨O⟩)/ΔO) ρ^{1/2}` the square root cancels under
//! the cyclic trace, which is what [`r_value`] evaluates.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonians::RngState;
use crate::numkit::{hs_norm, trace_product, ComplexMatrix};
use crate::states::{sqrt_density, DensityMatrix};

/// Smallest standard deviation accepted as a denominator.
pub const DEGENERATE_TOL: f64 = 1e-8;
const OPERATOR_HERMITIAN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignChoice {
    Plus,
    Minus,
}

impl SignChoice {
    pub fn value(self) -> f64 {
        match self {
            SignChoice::Plus => 1.0,
            SignChoice::Minus => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            SignChoice::Plus => SignChoice::Minus,
            SignChoice::Minus => SignChoice::Plus,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SignChoice::Plus => "plus",
            SignChoice::Minus => "minus",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaMethod {
    OrthogonalSubspace,
    ObservableForm,
}

/// Perturbation operator with its recorded constraint residuals.
#[derive(Debug, Clone)]
pub struct SigmaOperator {
    pub matrix: ComplexMatrix,
    /// `|Tr(ρ^{1/2} σ)|`.
    pub orth_residual: f64,
    /// `|‖σ‖₂ − 1|`.
    pub norm_residual: f64,
    pub method: SigmaMethod,
}

fn check_dim(rho: &DensityMatrix, op: &ComplexMatrix) -> Result<()> {
    if rho.dim() != op.dim() {
        return Err(Error::DimMismatch {
            left: rho.dim(),
            right: op.dim(),
        });
    }
    Ok(())
}

/// `Tr(X²ρ) − Tr(Xρ)²`, clamped at zero.
///
/// Evaluated in the centered form `Tr((X − ⟨X⟩)² ρ)`, which keeps the
/// variance of near-multiples of the identity at round-off level.
pub fn variance(op: &ComplexMatrix, rho: &DensityMatrix) -> Result<f64> {
    check_dim(rho, op)?;
    op.ensure_hermitian(OPERATOR_HERMITIAN_TOL)?;
    Ok(centered_second_moment(op, rho.matrix()))
}

pub(crate) fn centered_second_moment(op: &ComplexMatrix, rho: &ComplexMatrix) -> f64 {
    let mean = trace_product(op, rho).expect("dims checked").re;
    let c = op.shift_diag(-mean);
    trace_product(&(&c * &c), rho).expect("dims checked").re.max(0.0)
}

pub fn std_dev(op: &ComplexMatrix, rho: &DensityMatrix) -> Result<f64> {
    Ok(variance(op, rho)?.sqrt())
}

/// Variance of `A = ρ₀` in the state `ρ_t`: `Tr(ρ₀²ρ_t) − Tr(ρ₀ρ_t)²`.
pub fn delta_a_squared(rho0: &DensityMatrix, rho_t: &DensityMatrix) -> Result<f64> {
    check_dim(rho0, rho_t.matrix())?;
    Ok(centered_second_moment(rho0.matrix(), rho_t.matrix()))
}

fn residuals(rho: &DensityMatrix, sigma: &ComplexMatrix) -> (f64, f64) {
    let root = sqrt_density(rho);
    let orth = trace_product(&root, sigma).expect("dims checked").norm();
    (orth, (hs_norm(sigma) - 1.0).abs())
}

/// Random Hermitian operator supported on the null space of `ρ`, normalized
/// to unit Hilbert–Schmidt norm.
pub fn sigma_method1(rho: &DensityMatrix, rng: &mut RngState) -> Result<SigmaOperator> {
    let spec = rho.spectrum();
    let null: Vec<usize> = (0..rho.dim())
        .filter(|&k| spec.eigenvalues[k] <= rho.psd_tol())
        .collect();
    if null.is_empty() {
        return Err(Error::FullRank);
    }
    let n = rho.dim();
    let proj = ComplexMatrix::from_fn(n, |i, j| {
        null.iter()
            .map(|&k| spec.eigenvectors[(i, k)] * spec.eigenvectors[(j, k)].conj())
            .sum()
    });
    loop {
        let g = rng.sample_hermitian(n);
        let compressed = (&(&proj * &g) * &proj).hermitian_part();
        let norm = hs_norm(&compressed);
        if norm > 1e-12 {
            let matrix = compressed.scale(1.0 / norm);
            let (orth_residual, norm_residual) = residuals(rho, &matrix);
            return Ok(SigmaOperator {
                matrix,
                orth_residual,
                norm_residual,
                method: SigmaMethod::OrthogonalSubspace,
            });
        }
    }
}

/// `(O − ⟨O⟩)/ΔO`, the standardized observable, with `ΔO` checked.
fn standardize(rho: &DensityMatrix, o: &ComplexMatrix) -> Result<ComplexMatrix> {
    let mean = trace_product(o, rho.matrix())?.re;
    let spread = std_dev(o, rho)?;
    if spread <= DEGENERATE_TOL {
        return Err(Error::DegenerateObservable {
            operator: "O",
            value: spread,
            tol: DEGENERATE_TOL,
        });
    }
    Ok(o.shift_diag(-mean).scale(1.0 / spread))
}

/// `σ = ((O − ⟨O⟩)/ΔO) ρ^{1/2}` for any Hermitian `O` with nonzero spread.
pub fn sigma_method2(rho: &DensityMatrix, o: &ComplexMatrix) -> Result<SigmaOperator> {
    check_dim(rho, o)?;
    let centered = standardize(rho, o)?;
    let matrix = &centered * &sqrt_density(rho);
    let (orth_residual, norm_residual) = residuals(rho, &matrix);
    Ok(SigmaOperator {
        matrix,
        orth_residual,
        norm_residual,
        method: SigmaMethod::ObservableForm,
    })
}

fn nondegenerate(operator: &'static str, value: f64) -> Result<()> {
    if value > DEGENERATE_TOL {
        Ok(())
    } else {
        Err(Error::DegenerateVariance {
            operator,
            value,
            tol: DEGENERATE_TOL,
        })
    }
}

/// `A/ΔA + s·i·B/ΔB`.
fn combined(a: &ComplexMatrix, delta_a: f64, b: &ComplexMatrix, delta_b: f64, sign: SignChoice) -> ComplexMatrix {
    &a.scale(1.0 / delta_a) + &b.scale_c(Complex64::new(0.0, sign.value() / delta_b))
}

/// Correction term in its trace-cyclic form
/// `½ |Tr(ρ (A/ΔA ± i H/ΔH) (O − ⟨O⟩)/ΔO)|²`, expectations in `rho_t`.
pub fn r_value(
    rho_t: &DensityMatrix,
    a: &ComplexMatrix,
    delta_a: f64,
    h: &ComplexMatrix,
    delta_h: f64,
    o: &ComplexMatrix,
    sign: SignChoice,
) -> Result<f64> {
    check_dim(rho_t, a)?;
    check_dim(rho_t, h)?;
    check_dim(rho_t, o)?;
    nondegenerate("A", delta_a)?;
    nondegenerate("H", delta_h)?;
    let x = combined(a, delta_a, h, delta_h, sign);
    let centered = standardize(rho_t, o)?;
    let t = trace_product(&(rho_t.matrix() * &x), &centered)?;
    Ok(0.5 * t.norm_sqr())
}

/// Correction term with an explicit σ: `½ |Tr(ρ^{1/2} (A/ΔA ± i B/ΔB) σ)|²`.
pub fn r_value_with_sigma(
    rho: &DensityMatrix,
    a: &ComplexMatrix,
    delta_a: f64,
    b: &ComplexMatrix,
    delta_b: f64,
    sigma: &SigmaOperator,
    sign: SignChoice,
) -> Result<f64> {
    check_dim(rho, a)?;
    check_dim(rho, b)?;
    check_dim(rho, &sigma.matrix)?;
    nondegenerate("A", delta_a)?;
    nondegenerate("B", delta_b)?;
    let x = combined(a, delta_a, b, delta_b, sign);
    let t = trace_product(&(&sqrt_density(rho) * &x), &sigma.matrix)?;
    Ok(0.5 * t.norm_sqr())
}

/// Sign for which the Cauchy–Schwarz estimate guarantees
/// `R ≤ 1 − |⟨[A,B]⟩| / (2 ΔA ΔB)`: `s* = −sign(Im Tr(ρ[A,B]))`.
pub fn favorable_sign(rho: &DensityMatrix, a: &ComplexMatrix, b: &ComplexMatrix) -> Result<SignChoice> {
    let c = trace_product(rho.matrix(), &a.commutator(b))?;
    Ok(if c.im > 0.0 {
        SignChoice::Minus
    } else {
        SignChoice::Plus
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UrReport {
    /// `ΔA ΔB (1 − R)`.
    pub lhs: f64,
    /// `½ |Tr(ρ[A, B])|`.
    pub rhs: f64,
    pub r: f64,
    /// `lhs ≥ rhs − 1e−9`.
    pub holds: bool,
}

impl UrReport {
    /// The relation is only asserted where `1 − R > 0`.
    pub fn applicable(&self) -> bool {
        self.r < 1.0
    }
}

pub const UR_TOL: f64 = 1e-9;

/// Evaluates both sides of `ΔA ΔB (1 − R) ≥ ½ |Tr(ρ[A, B])|`.
pub fn stronger_ur_check(
    rho: &DensityMatrix,
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    sigma: &SigmaOperator,
    sign: SignChoice,
) -> Result<UrReport> {
    let delta_a = std_dev(a, rho)?;
    let delta_b = std_dev(b, rho)?;
    let r = r_value_with_sigma(rho, a, delta_a, b, delta_b, sigma, sign)?;
    let lhs = delta_a * delta_b * (1.0 - r);
    let rhs = 0.5 * trace_product(rho.matrix(), &a.commutator(b))?.norm();
    Ok(UrReport {
        lhs,
        rhs,
        r,
        holds: lhs >= rhs - UR_TOL,
    })
}
