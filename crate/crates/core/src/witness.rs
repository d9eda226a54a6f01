//! Coherence witnesses.
//!
//! Two conventions are in use. A [`Convention::NullOnIncoherent`] witness has
//! zero expectation on every incoherent state, which for a Hermitian operator
//! is the same as having a zero diagonal; any nonzero expectation detects
//! coherence. A [`Convention::NonnegOnIncoherent`] witness is nonnegative on
//! incoherent states and detects by a negative expectation. Its minimum over
//! the incoherent set is attained at a basis state, i.e. it is the smallest
//! diagonal entry.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigvals, ComplexMatrix, DimSignature};
use crate::rng::{dirichlet_uniform, seeded};
use crate::states::DensityMatrix;

/// Tolerance on witness diagonal entries.
pub const DIAG_TOL: f64 = 1e-12;

/// Bound on the imaginary part of `Tr(W rho)`, relative to `max(1, |W|_F)`.
pub const IMAG_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Convention {
    NullOnIncoherent,
    NonnegOnIncoherent,
}

impl Convention {
    /// Short tag used in files: `null` or `nonneg`.
    pub fn tag(&self) -> &'static str {
        match self {
            Convention::NullOnIncoherent => "null",
            Convention::NonnegOnIncoherent => "nonneg",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        match tag {
            "null" => Some(Convention::NullOnIncoherent),
            "nonneg" => Some(Convention::NonnegOnIncoherent),
            _ => None,
        }
    }

    /// Whether an expectation value signals coherence.
    pub fn detects(&self, value: f64, tol: f64) -> bool {
        match self {
            Convention::NullOnIncoherent => value.abs() > tol,
            Convention::NonnegOnIncoherent => value < -tol,
        }
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Hermitian observable with a declared detection convention.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    mat: ComplexMatrix,
    sig: DimSignature,
    convention: Convention,
}

impl Witness {
    /// Checks Hermiticity and the signature. The convention itself is
    /// checked by [`validate`].
    pub fn new(mat: ComplexMatrix, sig: DimSignature, convention: Convention) -> Result<Self> {
        let mat = mat.gate_hermitian()?;
        sig.check_order(mat.order())?;
        Ok(Self {
            mat,
            sig,
            convention,
        })
    }

    /// `Delta(rho) - rho`: zero diagonal, and `Tr(W rho) = -sum_{i != j} |rho_ij|^2`.
    pub fn dephasing(rho: &DensityMatrix) -> Self {
        Self {
            mat: &rho.matrix().dephased() - rho.matrix(),
            sig: rho.sig().clone(),
            convention: Convention::NullOnIncoherent,
        }
    }

    /// `sum (|u><v| + |v><u|)` over basis-index pairs `u != v`.
    pub fn transitions(sig: DimSignature, pairs: &[(usize, usize)]) -> Result<Self> {
        let n = sig.total();
        let mut mat = ComplexMatrix::zeros(n, n);
        for &(u, v) in pairs {
            if u == v || u >= n || v >= n {
                return Err(Error::InvalidDims(format!(
                    "transition ({u}, {v}) is not an off-diagonal pair below {n}"
                )));
            }
            mat[(u, v)].re += 1.0;
            mat[(v, u)].re += 1.0;
        }
        Ok(Self {
            mat,
            sig,
            convention: Convention::NullOnIncoherent,
        })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn sig(&self) -> &DimSignature {
        &self.sig
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn dim(&self) -> usize {
        self.mat.order()
    }

    /// `t W`, same convention (valid for `t > 0`).
    pub fn scaled(&self, t: f64) -> Self {
        Self {
            mat: self.mat.scale(t),
            sig: self.sig.clone(),
            convention: self.convention,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub convention: Convention,
    pub hermitian_defect: f64,
    pub max_abs_diagonal: f64,
    pub min_diagonal: f64,
    /// Random incoherent states probed (null convention only).
    pub samples_checked: usize,
    /// Largest `|Tr(W sigma)|` over the probes.
    pub max_sample_abs: f64,
}

/// Checks the witness against its declared convention.
///
/// For the null convention the zero-diagonal condition is checked exactly,
/// then `samples` random incoherent states (seeded from `seed`) are probed as
/// a consistency check. For the nonnegative convention the smallest diagonal
/// entry decides.
pub fn validate(w: &Witness, samples: usize, seed: u64) -> Result<ValidationReport> {
    let hermitian_defect = w.mat.hermitian_defect();
    if hermitian_defect > crate::linalg::HERM_TOL {
        return Err(Error::NonHermitian {
            defect: hermitian_defect,
        });
    }
    let diag: Vec<f64> = w.mat.diagonal().iter().map(|z| z.re).collect();
    let max_abs_diagonal = diag.iter().map(|d| d.abs()).fold(0.0, f64::max);
    let (min_index, min_diagonal) = diag
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty diagonal");

    let mut max_sample_abs: f64 = 0.0;
    let mut samples_checked = 0;
    match w.convention {
        Convention::NullOnIncoherent => {
            if let Some((index, &value)) = diag.iter().enumerate().find(|(_, d)| d.abs() > DIAG_TOL) {
                return Err(Error::DiagonalNotZero { index, value });
            }
            let mut rng = seeded(seed);
            let scale = w.mat.frobenius_norm().max(1.0);
            for _ in 0..samples {
                let p = dirichlet_uniform(w.dim(), &mut rng);
                let value: f64 = p.iter().zip(&diag).map(|(pi, di)| pi * di).sum();
                max_sample_abs = max_sample_abs.max(value.abs());
                samples_checked += 1;
                if value.abs() > DIAG_TOL * scale {
                    return Err(Error::NonzeroOnIncoherent { seed, value });
                }
            }
        }
        Convention::NonnegOnIncoherent => {
            if min_diagonal < -DIAG_TOL {
                return Err(Error::NegativeOnIncoherent {
                    index: min_index,
                    value: min_diagonal,
                });
            }
        }
    }
    Ok(ValidationReport {
        convention: w.convention,
        hermitian_defect,
        max_abs_diagonal,
        min_diagonal,
        samples_checked,
        max_sample_abs,
    })
}

/// `Re Tr(W rho)`. Only total dimensions have to agree.
pub fn expectation(w: &Witness, rho: &DensityMatrix) -> Result<f64> {
    real_trace(&w.mat, rho.matrix())
}

pub(crate) fn real_trace(w: &ComplexMatrix, rho: &ComplexMatrix) -> Result<f64> {
    if w.order() != rho.order() {
        return Err(Error::DimMismatch(format!(
            "witness of dimension {} against state of dimension {}",
            w.order(),
            rho.order()
        )));
    }
    let t = w.trace_product(rho)?;
    if t.im.abs() > IMAG_TOL * w.frobenius_norm().max(1.0) {
        return Err(Error::NonRealTrace(t.im));
    }
    Ok(t.re)
}

/// `(lambda_min, lambda_max)`.
pub fn eig_extremes(w: &Witness) -> Result<(f64, f64)> {
    let vals = hermitian_eigvals(&w.mat)?;
    Ok((vals[0], vals[vals.len() - 1]))
}

/// Spread below which a witness is treated as a multiple of the identity.
pub fn degeneracy_tol(lambda_plus: f64) -> f64 {
    1e-10 * lambda_plus.abs().max(1.0)
}

/// Witness rescaled affinely so that its spectrum spans exactly `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedWitness {
    mat: ComplexMatrix,
    /// Largest eigenvalue of the source witness.
    pub lambda_plus: f64,
    /// Smallest eigenvalue of the source witness.
    pub lambda_minus: f64,
}

impl NormalizedWitness {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn expectation(&self, rho: &DensityMatrix) -> Result<f64> {
        real_trace(&self.mat, rho.matrix())
    }

    /// Image of one eigenvalue of the source witness.
    pub fn map_eigenvalue(&self, lambda: f64) -> f64 {
        (2.0 * lambda - (self.lambda_plus + self.lambda_minus)) / (self.lambda_plus - self.lambda_minus)
    }
}

/// `W_N = (2W - (lambda_+ + lambda_-) I) / (lambda_+ - lambda_-)`.
pub fn normalize(w: &Witness) -> Result<NormalizedWitness> {
    let (lambda_minus, lambda_plus) = eig_extremes(w)?;
    let spread = lambda_plus - lambda_minus;
    if spread <= degeneracy_tol(lambda_plus) {
        return Err(Error::DegenerateSpectrum(spread));
    }
    let shift = lambda_plus + lambda_minus;
    let n = w.dim();
    let mut mat = w.mat.scale(2.0 / spread);
    for i in 0..n {
        mat[(i, i)].re -= shift / spread;
    }
    Ok(NormalizedWitness {
        mat,
        lambda_plus,
        lambda_minus,
    })
}

#[cfg(test)]
mod tests {
    use num_complex::Complex64;

    use super::*;
    use crate::linalg::hermitian_eigvals;
    use crate::states::{isotropic, max_entangled, random_diagonal, x_state};

    fn two_qubit_witness(pairs: &[(usize, usize)]) -> Witness {
        let mut m = ComplexMatrix::zeros(4, 4);
        for &(i, j) in pairs {
            m[(i, j)] = Complex64::new(1.0, 0.0);
            m[(j, i)] = Complex64::new(1.0, 0.0);
        }
        Witness::new(m, DimSignature::qubits(2), Convention::NullOnIncoherent).unwrap()
    }

    #[test]
    fn flip_witness_is_valid_null() {
        // |00><10| + |10><00|
        let w = two_qubit_witness(&[(0, 2)]);
        let r = validate(&w, 100, 1).unwrap();
        assert_eq!(r.samples_checked, 100);
        assert_eq!(r.max_sample_abs, 0.0);
        assert_eq!(Witness::transitions(DimSignature::qubits(2), &[(0, 2)]).unwrap(), w);
        assert!(Witness::transitions(DimSignature::qubits(2), &[(1, 1)]).is_err());
        assert!(Witness::transitions(DimSignature::qubits(2), &[(0, 4)]).is_err());
    }

    #[test]
    fn identity_conventions() {
        let sig = DimSignature::qubits(1);
        let id = ComplexMatrix::identity(2);
        let nonneg = Witness::new(id.clone(), sig.clone(), Convention::NonnegOnIncoherent).unwrap();
        assert!(validate(&nonneg, 0, 0).is_ok());
        let null = Witness::new(id, sig, Convention::NullOnIncoherent).unwrap();
        assert_eq!(
            validate(&null, 10, 0).unwrap_err(),
            Error::DiagonalNotZero { index: 0, value: 1.0 }
        );
    }

    #[test]
    fn negative_diagonal_is_rejected() {
        let w = Witness::new(
            ComplexMatrix::diag_real(&[0.3, -0.1]),
            DimSignature::qubits(1),
            Convention::NonnegOnIncoherent,
        )
        .unwrap();
        assert!(matches!(
            validate(&w, 0, 0),
            Err(Error::NegativeOnIncoherent { index: 1, .. })
        ));
    }

    #[test]
    fn non_hermitian_witness_is_rejected() {
        let m = ComplexMatrix::from_real(2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(
            Witness::new(m, DimSignature::qubits(1), Convention::NullOnIncoherent),
            Err(Error::NonHermitian { .. })
        ));
    }

    #[test]
    fn dephasing_witness_of_isotropic_state() {
        let w = Witness::dephasing(&isotropic(0.6).unwrap());
        validate(&w, 50, 3).unwrap();
    }

    #[test]
    fn x_state_is_invisible_to_flip_witnesses() {
        let rho = x_state(0.9, 0.4).unwrap();
        let w = two_qubit_witness(&[(0, 2)]);
        let v = two_qubit_witness(&[(1, 3)]);
        assert_eq!(expectation(&w, &rho).unwrap(), 0.0);
        assert_eq!(expectation(&v, &rho).unwrap(), 0.0);
        let id = Witness::new(ComplexMatrix::identity(4), DimSignature::qubits(2), Convention::NonnegOnIncoherent).unwrap();
        assert!((expectation(&id, &rho).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn expectation_dimension_mismatch() {
        let w = two_qubit_witness(&[(0, 1)]);
        let rho = random_diagonal(3, 0).unwrap();
        assert!(matches!(expectation(&w, &rho), Err(Error::DimMismatch(_))));
    }

    #[test]
    fn extremes_of_isotropic_witness() {
        for v in [0.2, 0.5, 1.0] {
            let (lo, hi) = eig_extremes(&Witness::dephasing(&isotropic(v).unwrap())).unwrap();
            assert!((hi - (9.0 * v - 1.0) / 24.0).abs() < 1e-14);
            assert!((lo + (9.0 * v - 1.0) / 12.0).abs() < 1e-14);
        }
    }

    #[test]
    fn extremes_of_maximally_entangled_witness() {
        for d in 2..=4 {
            let (lo, hi) = eig_extremes(&Witness::dephasing(&max_entangled(d).unwrap())).unwrap();
            let inv = 1.0 / d as f64;
            assert!((hi - inv).abs() < 1e-14);
            assert!((lo - (inv - 1.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn normalization_maps_extremes_to_unit() {
        let w = Witness::dephasing(&max_entangled(3).unwrap());
        let wn = normalize(&w).unwrap();
        let vals = hermitian_eigvals(wn.matrix()).unwrap();
        assert!((vals[0] + 1.0).abs() < 1e-12);
        assert!((vals[vals.len() - 1] - 1.0).abs() < 1e-12);
        assert_eq!(wn.map_eigenvalue(wn.lambda_plus), 1.0);
    }

    #[test]
    fn already_normalized_is_unchanged() {
        let w = two_qubit_witness(&[(0, 3)]);
        let wn = normalize(&w).unwrap();
        assert!(wn.matrix().max_abs_diff(w.matrix()) < 1e-15);
    }

    #[test]
    fn zero_witness_is_degenerate() {
        let w = Witness::dephasing(&isotropic(1.0 / 9.0).unwrap());
        assert!(matches!(normalize(&w), Err(Error::DegenerateSpectrum(_))));
        let id = Witness::new(ComplexMatrix::identity(3), DimSignature::new(vec![3]).unwrap(), Convention::NonnegOnIncoherent).unwrap();
        assert!(matches!(normalize(&id), Err(Error::DegenerateSpectrum(_))));
        assert_eq!(eig_extremes(&id).unwrap(), (1.0, 1.0));
    }

    #[test]
    fn convention_tags() {
        for c in [Convention::NullOnIncoherent, Convention::NonnegOnIncoherent] {
            assert_eq!(Convention::from_tag(c.tag()), Some(c));
        }
        assert!(Convention::NullOnIncoherent.detects(-1e-3, 1e-9));
        assert!(!Convention::NonnegOnIncoherent.detects(1e-3, 1e-9));
        assert!(Convention::NonnegOnIncoherent.detects(-1e-3, 1e-9));
    }
}
