//! Cyclic Jacobi eigensolver for small dense Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `a_pq` with a diagonal
//! unitary, then applies a real Givens rotation that zeroes the (now real)
//! pivot. Sweeps run over all pairs `p < q` until the off-diagonal Frobenius
//! norm falls below the threshold.

use num_complex::Complex64;

use super::ComplexMatrix;
use crate::error::{Error, Result};

/// Off-diagonal Frobenius threshold, relative to `max(1, ||M||_F)`.
pub const JACOBI_OFF_TOL: f64 = 1e-13;
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Eigen-decomposition `M = V diag(λ) V†` with ascending eigenvalues.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    /// Unitary matrix whose columns are the eigenvectors.
    pub eigenvectors: ComplexMatrix,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        *self.eigenvalues.last().expect("nonempty spectrum")
    }

    /// Column `k` of the eigenvector matrix.
    pub fn eigenvector(&self, k: usize) -> Vec<Complex64> {
        (0..self.dim()).map(|i| self.eigenvectors[(i, k)]).collect()
    }

    /// `V diag(λ) V†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        mat_func(self, |x| Complex64::new(x, 0.0))
    }
}

fn off_norm(a: &ComplexMatrix) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn frobenius(a: &ComplexMatrix) -> f64 {
    a.as_slice().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Hermitian eigendecomposition. `m` must satisfy `max|M - M†| <= tol`; it is
/// symmetrized before decomposition.
pub fn hermitian_eig(m: &ComplexMatrix, tol: f64) -> Result<Spectrum> {
    if !m.is_finite() {
        return Err(Error::NonFinite {
            context: "eigensolver input",
        });
    }
    m.ensure_hermitian(tol)?;
    let mut a = m.hermitian_part();
    let n = a.dim();
    let mut v = ComplexMatrix::identity(n);
    let threshold = JACOBI_OFF_TOL * frobenius(&a).max(1.0);

    let mut converged = off_norm(&a) <= threshold;
    let mut sweeps = 0;
    while !converged {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps,
                off_norm: off_norm(&a),
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        converged = off_norm(&a) <= threshold;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let eigenvalues = order.iter().map(|&k| a[(k, k)].re).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, |i, j| v[(i, order[j])]);
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let z = a[(p, q)];
    let r = z.norm();
    if r == 0.0 {
        return;
    }
    let n = a.dim();
    let phase = z / r; // e^{i phi}
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;

    let theta = (aqq - app) / (2.0 * r);
    let t = if theta.is_infinite() {
        0.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // J restricted to (p, q):
    //   [ c              s            ]
    //   [ -s e^{-i phi}  c e^{-i phi} ]
    let jpp = Complex64::new(c, 0.0);
    let jpq = Complex64::new(s, 0.0);
    let jqp = -phase.conj() * s;
    let jqq = phase.conj() * c;

    // A <- A J
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * jpp + akq * jqp;
        a[(k, q)] = akp * jpq + akq * jqq;
    }
    // A <- J† A
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
        a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);

    // V <- V J
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * jpp + vkq * jqp;
        v[(k, q)] = vkp * jpq + vkq * jqq;
    }
}

/// `V diag(f(λ)) V†`.
pub fn mat_func(spectrum: &Spectrum, f: impl Fn(f64) -> Complex64) -> ComplexMatrix {
    let v = &spectrum.eigenvectors;
    let n = spectrum.dim();
    let fl: Vec<Complex64> = spectrum.eigenvalues.iter().map(|&x| f(x)).collect();
    let mut out = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, &fk) in fl.iter().enumerate() {
                if fk != Complex64::new(0.0, 0.0) {
                    acc += v[(i, k)] * fk * v[(j, k)].conj();
                }
            }
            out[(i, j)] = acc;
        }
    }
    out
}

/// Like [`mat_func`] but reports non-finite results.
pub fn try_mat_func(spectrum: &Spectrum, f: impl Fn(f64) -> Complex64) -> Result<ComplexMatrix> {
    let out = mat_func(spectrum, f);
    if out.is_finite() {
        Ok(out)
    } else {
        Err(Error::NonFinite {
            context: "matrix function",
        })
    }
}
