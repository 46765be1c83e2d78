//! Dense complex-matrix kernel: Hermitian eigendecomposition, spectral matrix
//! functions, trace forms and Hilbert–Schmidt norms.

mod eig;
mod matrix;

pub use eig::{hermitian_eig, mat_func, try_mat_func, Spectrum, JACOBI_MAX_SWEEPS, JACOBI_OFF_TOL};
pub use matrix::ComplexMatrix;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default Hermiticity tolerance for eigendecompositions of built operators.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// `Tr(AB) = Σ_ij A_ij B_ji`, without forming the product.
pub fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Complex64> {
    if a.dim() != b.dim() {
        return Err(Error::DimMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    let n = a.dim();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    Ok(acc)
}

/// Hilbert–Schmidt norm `sqrt(Tr(M M†))`.
pub fn hs_norm(m: &ComplexMatrix) -> f64 {
    m.as_slice().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonians::{pauli, Axis, RngState};
    use proptest::prelude::*;

    #[test]
    fn trace_product_examples() {
        let rho = ComplexMatrix::from_real_diag(&[0.2, 0.5, 0.3]);
        let t = trace_product(&ComplexMatrix::identity(3), &rho).unwrap();
        assert!((t.re - 1.0).abs() < 1e-15 && t.im == 0.0);
        assert_eq!(
            trace_product(&pauli(Axis::X), &pauli(Axis::Y)).unwrap(),
            Complex64::new(0.0, 0.0)
        );
        // 0.04 + 0.25 + 0.09
        assert!((trace_product(&rho, &rho).unwrap().re - 0.38).abs() < 1e-15);
        assert!(matches!(
            trace_product(&rho, &ComplexMatrix::identity(2)),
            Err(Error::DimMismatch { left: 3, right: 2 })
        ));
    }

    #[test]
    fn hs_norm_examples() {
        let m = ComplexMatrix::identity(2).scale(1.0 / 2f64.sqrt());
        assert!((hs_norm(&m) - 1.0).abs() < 1e-15);
        assert_eq!(hs_norm(&ComplexMatrix::zeros(3)), 0.0);
    }

    proptest! {
        #[test]
        fn hs_norm_squared_is_trace_form(seed in any::<u64>(), dim in 1usize..8) {
            let mut rng = RngState::new(seed);
            let a = rng.sample_hermitian(dim);
            let b = rng.sample_hermitian(dim);
            let m = &a + &b.scale_c(Complex64::new(0.0, 0.7));
            let lhs = hs_norm(&m).powi(2);
            let rhs = trace_product(&m, &m.adjoint()).unwrap().re;
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1e-300));
        }

        #[test]
        fn eig_then_identity_func_reproduces(seed in any::<u64>(), dim in 1usize..10) {
            let h = RngState::new(seed).sample_hermitian(dim);
            let s = hermitian_eig(&h, HERMITIAN_TOL).unwrap();
            prop_assert!(mat_func(&s, |x| Complex64::new(x, 0.0)).max_abs_diff(&h) <= 1e-10);
        }
    }
}
