//! Cyclic Jacobi eigensolver for Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `a_pq = r e^{i phi}`
//! with `D = diag(1, e^{-i phi})` on the `(p, q)` plane, then applies the
//! real symmetric Jacobi rotation that annihilates the now-real pivot. The
//! combined plane unitary is
//!
//! ```text
//! U = [ c              s            ]
//!     [ -s e^{-i phi}  c e^{-i phi} ]
//! ```
//!
//! and the update is `A <- U^H A U`, `V <- V U`.

use num_complex::Complex64;

use super::ComplexMatrix;
use crate::error::{Error, Result};

/// Sweep cap for the Jacobi iteration.
pub const MAX_SWEEPS: usize = 100;

/// Convergence threshold on the off-diagonal Frobenius mass, relative to `|A|_F`.
const OFF_TOL: f64 = 1e-13;

/// Eigenvalues in ascending order, with eigenvectors as matrix columns when
/// requested.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: Option<ComplexMatrix>,
}

impl Spectrum {
    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        *self.values.last().expect("non-empty spectrum")
    }

    /// `V diag(f(lambda)) V^H`. Panics if eigenvectors were not computed.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let v = self.vectors.as_ref().expect("spectrum computed without eigenvectors");
        let n = self.values.len();
        let fl: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n)
                .map(|k| v[(i, k)] * v[(j, k)].conj() * fl[k])
                .sum()
        })
    }

    /// `V Lambda V^H`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.apply(|l| l)
    }
}

/// Full eigendecomposition of a Hermitian matrix.
///
/// Inputs within the Hermiticity gate are symmetrized before iterating.
pub fn hermitian_eig(a: &ComplexMatrix) -> Result<Spectrum> {
    jacobi(a, true)
}

/// Eigenvalues only, ascending.
pub fn hermitian_eigvals(a: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(jacobi(a, false)?.values)
}

fn jacobi(a: &ComplexMatrix, want_vectors: bool) -> Result<Spectrum> {
    let mut a = a.gate_hermitian()?;
    let n = a.order();
    let mut v = want_vectors.then(|| ComplexMatrix::identity(n));
    for i in 0..n {
        a[(i, i)].im = 0.0;
    }

    let norm = a.frobenius_norm();
    let mut sweeps = 0;
    loop {
        let off = off_diagonal_mass(&a);
        if off <= OFF_TOL * norm {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps, off });
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut a, v.as_mut(), p, q);
            }
        }
        sweeps += 1;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = v.map(|v| ComplexMatrix::from_fn(n, n, |i, k| v[(i, order[k])]));
    Ok(Spectrum { values, vectors })
}

fn off_diagonal_mass(a: &ComplexMatrix) -> f64 {
    let n = a.order();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

fn rotate(a: &mut ComplexMatrix, v: Option<&mut ComplexMatrix>, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let phase = apq / r;
    let theta = (aqq - app) / (2.0 * r);
    let t = if theta == 0.0 {
        1.0
    } else {
        theta.signum() / (theta.abs() + theta.hypot(1.0))
    };
    let c = 1.0 / t.hypot(1.0);
    let s = t * c;

    let u_pp = Complex64::new(c, 0.0);
    let u_pq = Complex64::new(s, 0.0);
    let u_qp = -phase.conj() * s;
    let u_qq = phase.conj() * c;

    let n = a.order();
    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        let nkp = akp * u_pp + akq * u_qp;
        let nkq = akp * u_pq + akq * u_qq;
        a[(k, p)] = nkp;
        a[(p, k)] = nkp.conj();
        a[(k, q)] = nkq;
        a[(q, k)] = nkq.conj();
    }
    a[(p, p)] = Complex64::new(app - t * r, 0.0);
    a[(q, q)] = Complex64::new(aqq + t * r, 0.0);
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);

    if let Some(v) = v {
        for k in 0..n {
            let vkp = v[(k, p)];
            let vkq = v[(k, q)];
            v[(k, p)] = vkp * u_pp + vkq * u_qp;
            v[(k, q)] = vkp * u_pq + vkq * u_qq;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::EIG_TOL;
    use crate::rng::{random_hermitian, seeded};

    #[test]
    fn diagonal_input() {
        let s = hermitian_eig(&ComplexMatrix::diag_real(&[0.7, 0.3])).unwrap();
        assert_eq!(s.values, vec![0.3, 0.7]);
    }

    #[test]
    fn pauli_x_half() {
        let m = ComplexMatrix::from_real(2, &[0.0, 0.5, 0.5, 0.0]).unwrap();
        let s = hermitian_eigvals(&m).unwrap();
        assert!((s[0] + 0.5).abs() < 1e-15 && (s[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn complex_pivot() {
        // Pauli-Y: eigenvalues -1, 1.
        let mut m = ComplexMatrix::zeros(2, 2);
        m[(0, 1)] = Complex64::new(0.0, -1.0);
        m[(1, 0)] = Complex64::new(0.0, 1.0);
        let s = hermitian_eig(&m).unwrap();
        assert!((s.values[0] + 1.0).abs() < 1e-15 && (s.values[1] - 1.0).abs() < 1e-15);
        assert!(s.reconstruct().max_abs_diff(&m) < 1e-15);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_real(2, &[1.0, 2.0, 0.0, 1.0]).unwrap();
        assert!(matches!(hermitian_eig(&m), Err(Error::NonHermitian { .. })));
        let r = ComplexMatrix::zeros(2, 3);
        assert!(matches!(hermitian_eig(&r), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn zero_matrix() {
        assert_eq!(hermitian_eigvals(&ComplexMatrix::zeros(3, 3)).unwrap(), vec![0.0; 3]);
    }

    #[test]
    fn random_reconstruction_and_unitarity() {
        let mut rng = seeded(11);
        for n in [1, 2, 3, 5, 8, 12, 16] {
            let a = random_hermitian(n, &mut rng);
            let s = hermitian_eig(&a).unwrap();
            let scale = a.frobenius_norm();
            assert!(s.values.windows(2).all(|w| w[0] <= w[1]));
            assert!(s.reconstruct().max_abs_diff(&a) <= EIG_TOL * scale);
            let v = s.vectors.as_ref().unwrap();
            let vhv = &v.adjoint() * v;
            assert!(vhv.max_abs_diff(&ComplexMatrix::identity(n)) <= EIG_TOL);
        }
    }

    #[test]
    fn degenerate_spectrum() {
        // Projector of rank 2 in dimension 4 plus identity: eigenvalues {1, 1, 2, 2}.
        let h = 0.5;
        let m = ComplexMatrix::from_real(
            4,
            &[
                1.0 + h, 0.0, 0.0, h, //
                0.0, 1.0 + h, h, 0.0, //
                0.0, h, 1.0 + h, 0.0, //
                h, 0.0, 0.0, 1.0 + h,
            ],
        )
        .unwrap();
        let vals = hermitian_eigvals(&m).unwrap();
        for (got, want) in vals.iter().zip([1.0, 1.0, 2.0, 2.0]) {
            assert!((got - want).abs() < 1e-14);
        }
    }
}
