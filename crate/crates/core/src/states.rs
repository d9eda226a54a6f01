//! Density matrices, dephasing and the state families used throughout the
//! crate.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigvals, ComplexMatrix, DimSignature};
use crate::rng::{dirichlet_uniform, ginibre, seeded};

/// Allowed negativity of the smallest eigenvalue.
pub const PSD_TOL: f64 = 1e-10;
/// Allowed deviation of the trace from one.
pub const TRACE_TOL: f64 = 1e-10;

/// Hermitian, positive semidefinite, unit-trace matrix over a composite
/// space. Incoherence always refers to the computational product basis of
/// the signature.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
    sig: DimSignature,
}

impl DensityMatrix {
    /// Validates `mat` as-is (after the Hermitian symmetrization gate).
    pub fn new(mat: ComplexMatrix, sig: DimSignature) -> Result<Self> {
        let mat = mat.gate_hermitian().map_err(|e| match e {
            Error::NonHermitian { defect } => {
                Error::InvalidState(format!("not Hermitian (relative asymmetry {defect:.3e})"))
            }
            other => other,
        })?;
        sig.check_order(mat.order())?;
        let tr = mat.trace().re;
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
        }
        let min = hermitian_eigvals(&mat)?[0];
        if min < -PSD_TOL {
            return Err(Error::InvalidState(format!(
                "minimum eigenvalue {min:.3e} below -{PSD_TOL:e}"
            )));
        }
        Ok(Self { mat, sig })
    }

    /// Lenient constructor for matrices read from files: symmetrizes and
    /// rescales the trace to one before validating. Matrices whose trace is
    /// already one to within rounding are left untouched.
    pub fn from_loaded(mat: ComplexMatrix, sig: DimSignature) -> Result<Self> {
        let mut mat = mat.gate_hermitian().map_err(|e| match e {
            Error::NonHermitian { defect } => {
                Error::InvalidState(format!("not Hermitian (relative asymmetry {defect:.3e})"))
            }
            other => other,
        })?;
        let tr = mat.trace().re;
        if tr <= 0.0 {
            return Err(Error::InvalidState(format!("non-positive trace {tr}")));
        }
        if (tr - 1.0).abs() > mat.order() as f64 * f64::EPSILON {
            mat = mat.scale(1.0 / tr);
        }
        Self::new(mat, sig)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn sig(&self) -> &DimSignature {
        &self.sig
    }

    pub fn dim(&self) -> usize {
        self.mat.order()
    }

    /// Same matrix viewed through a different factorization of the space.
    pub fn with_signature(&self, sig: DimSignature) -> Result<Self> {
        sig.check_order(self.dim())?;
        Ok(Self {
            mat: self.mat.clone(),
            sig,
        })
    }

    /// The dephasing map: keeps populations, drops coherences.
    pub fn dephase(&self) -> Self {
        Self {
            mat: self.mat.dephased(),
            sig: self.sig.clone(),
        }
    }

    /// True iff every off-diagonal modulus is at most `tol`.
    pub fn is_incoherent(&self, tol: f64) -> bool {
        self.mat.max_off_diagonal() <= tol
    }

    /// Populations in the computational basis.
    pub fn populations(&self) -> Vec<f64> {
        self.mat.diagonal().iter().map(|z| z.re).collect()
    }

    pub fn into_parts(self) -> (ComplexMatrix, DimSignature) {
        (self.mat, self.sig)
    }
}

/// Parameterized state families.
#[derive(Debug, Clone, PartialEq)]
pub enum StateFamily {
    /// Two-qutrit family with a coherence `a` between `|00>` and `|22>` and a
    /// `b`-dependent block; `a` in `[0, 1]`, `b` in `[0, 1/2]`.
    TwoQutrit { a: f64, b: f64 },
    /// Two-qubit X state with anti-diagonal entries `alpha/4` and `beta/4`.
    XState { alpha: f64, beta: f64 },
    /// GHZ state mixed with white noise, `g |GHZ><GHZ| + (1-g) I/8`.
    NoisyGhz { g: f64 },
    /// Three-qubit X state with a `c/2` coherence between `|000>` and `|111>`
    /// and populations `(1-c)/2` on `|001>`, `|110>`.
    ThreeQubitX { c: f64 },
    /// Two-qutrit isotropic state `(1-v)/8 (I - Phi) + v Phi`.
    Isotropic { v: f64 },
    /// Maximally entangled projector in `d x d`.
    MaxEntangled { d: usize },
    /// Normalized pure state.
    Pure {
        amplitudes: Vec<Complex64>,
        dims: Vec<usize>,
    },
    /// Ginibre-distributed random state.
    Random { dims: Vec<usize>, seed: u64 },
    /// Random incoherent state with flat-Dirichlet populations.
    RandomDiagonal { dims: Vec<usize>, seed: u64 },
}

pub fn make_state(family: &StateFamily) -> Result<DensityMatrix> {
    match family {
        StateFamily::TwoQutrit { a, b } => two_qutrit(*a, *b),
        StateFamily::XState { alpha, beta } => x_state(*alpha, *beta),
        StateFamily::NoisyGhz { g } => noisy_ghz(*g),
        StateFamily::ThreeQubitX { c } => three_qubit_x(*c),
        StateFamily::Isotropic { v } => isotropic(*v),
        StateFamily::MaxEntangled { d } => max_entangled(*d),
        StateFamily::Pure { amplitudes, dims } => {
            pure_state(amplitudes, DimSignature::new(dims.clone())?)
        }
        StateFamily::Random { dims, seed } => {
            let sig = DimSignature::new(dims.clone())?;
            random_density(sig.total(), *seed)?.with_signature(sig)
        }
        StateFamily::RandomDiagonal { dims, seed } => {
            let sig = DimSignature::new(dims.clone())?;
            random_diagonal(sig.total(), *seed)?.with_signature(sig)
        }
    }
}

fn check_range(name: &'static str, value: f64, lo: f64, hi: f64, range: &'static str) -> Result<()> {
    if !(lo..=hi).contains(&value) {
        return Err(Error::OutOfRange { name, value, range });
    }
    Ok(())
}

fn real_state(n: usize, entries: &[(usize, usize, f64)], sig: DimSignature) -> Result<DensityMatrix> {
    let mut m = ComplexMatrix::zeros(n, n);
    for &(i, j, x) in entries {
        m[(i, j)] = Complex64::new(x, 0.0);
    }
    DensityMatrix::new(m, sig)
}

pub fn two_qutrit(a: f64, b: f64) -> Result<DensityMatrix> {
    check_range("a", a, 0.0, 1.0, "[0, 1]")?;
    check_range("b", b, 0.0, 0.5, "[0, 1/2]")?;
    let q = 0.25;
    real_state(
        9,
        &[
            (0, 0, q),
            (0, 8, q * a),
            (8, 0, q * a),
            (8, 8, q),
            (1, 1, q * b),
            (1, 2, q * b / 2.0),
            (2, 1, q * b / 2.0),
            (2, 2, q * b),
            (4, 4, q * (1.0 - b)),
            (4, 6, q * b),
            (6, 4, q * b),
            (6, 6, q * (1.0 - b)),
        ],
        DimSignature::new(vec![3, 3])?,
    )
}

pub fn x_state(alpha: f64, beta: f64) -> Result<DensityMatrix> {
    check_range("alpha", alpha, 0.0, 1.0, "[0, 1]")?;
    check_range("beta", beta, 0.0, 1.0, "[0, 1]")?;
    let q = 0.25;
    real_state(
        4,
        &[
            (0, 0, q),
            (1, 1, q),
            (2, 2, q),
            (3, 3, q),
            (0, 3, q * alpha),
            (3, 0, q * alpha),
            (1, 2, q * beta),
            (2, 1, q * beta),
        ],
        DimSignature::qubits(2),
    )
}

pub fn noisy_ghz(g: f64) -> Result<DensityMatrix> {
    check_range("g", g, 0.0, 1.0, "[0, 1]")?;
    let noise = (1.0 - g) / 8.0;
    let mut entries: Vec<(usize, usize, f64)> = (0..8).map(|i| (i, i, noise)).collect();
    for (i, j) in [(0, 0), (0, 7), (7, 0), (7, 7)] {
        entries.push((i, j, g / 2.0));
    }
    let mut m = ComplexMatrix::zeros(8, 8);
    for (i, j, x) in entries {
        m[(i, j)] += Complex64::new(x, 0.0);
    }
    DensityMatrix::new(m, DimSignature::qubits(3))
}

/// Accepts `c = 0` (an incoherent state) as well as `c` in `(0, 1]`.
pub fn three_qubit_x(c: f64) -> Result<DensityMatrix> {
    check_range("c", c, 0.0, 1.0, "[0, 1]")?;
    let h = 0.5;
    real_state(
        8,
        &[
            (0, 0, h * c),
            (0, 7, h * c),
            (7, 0, h * c),
            (7, 7, h * c),
            (1, 1, h * (1.0 - c)),
            (6, 6, h * (1.0 - c)),
        ],
        DimSignature::qubits(3),
    )
}

pub fn isotropic(v: f64) -> Result<DensityMatrix> {
    check_range("v", v, 0.0, 1.0, "[0, 1]")?;
    let noise = (1.0 - v) / 8.0;
    let phi = max_entangled_projector(3);
    let m = ComplexMatrix::from_fn(9, 9, |i, j| {
        let id = if i == j { 1.0 } else { 0.0 };
        Complex64::new(noise * (id - phi[(i, j)].re) + v * phi[(i, j)].re, 0.0)
    });
    DensityMatrix::new(m, DimSignature::new(vec![3, 3])?)
}

pub fn max_entangled(d: usize) -> Result<DensityMatrix> {
    if d < 2 {
        return Err(Error::OutOfRange {
            name: "d",
            value: d as f64,
            range: "d >= 2",
        });
    }
    DensityMatrix::new(max_entangled_projector(d), DimSignature::new(vec![d, d])?)
}

fn max_entangled_projector(d: usize) -> ComplexMatrix {
    let w = 1.0 / d as f64;
    ComplexMatrix::from_fn(d * d, d * d, |i, j| {
        if i % (d + 1) == 0 && j % (d + 1) == 0 {
            Complex64::new(w, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

pub fn pure_state(amplitudes: &[Complex64], sig: DimSignature) -> Result<DensityMatrix> {
    sig.check_order(amplitudes.len())?;
    let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(Error::InvalidState(format!("state vector has norm {norm}")));
    }
    let psi: Vec<Complex64> = amplitudes.iter().map(|z| z / norm).collect();
    DensityMatrix::new(ComplexMatrix::outer(&psi), sig)
}

/// `G G^H / Tr(G G^H)` for a seeded Ginibre `G`. Single-party signature.
pub fn random_density(dim: usize, seed: u64) -> Result<DensityMatrix> {
    let sig = DimSignature::new(vec![dim])?;
    let g = ginibre(dim, &mut seeded(seed));
    let gg = &g * &g.adjoint();
    let tr = gg.trace().re;
    DensityMatrix::new(gg.scale(1.0 / tr).hermitian_part(), sig)
}

/// Diagonal state with flat-Dirichlet populations. Single-party signature.
pub fn random_diagonal(dim: usize, seed: u64) -> Result<DensityMatrix> {
    let sig = DimSignature::new(vec![dim])?;
    let p = dirichlet_uniform(dim, &mut seeded(seed));
    DensityMatrix::new(ComplexMatrix::diag_real(&p), sig)
}
