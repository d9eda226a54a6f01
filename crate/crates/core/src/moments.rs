//! Coherence detection from partial-transpose moments.
//!
//! For an incoherent (diagonal) state the partial transpose is the identity
//! map, so `Tr(rho^k) = Tr[(rho^{T_B})^k]` for every `k`. A mismatch at any
//! order therefore certifies coherence. Orders 1 and 2 always agree (the
//! partial transpose preserves the trace and the Frobenius norm), so the
//! test starts at `k = 3`. The converse does not hold: an `Undetermined`
//! verdict says nothing about incoherence.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigvals, partial_transpose, power_sums, DimSignature};
use crate::states::{two_qutrit, DensityMatrix};

/// Absolute threshold on `|Tr(rho^k) - T_k|`.
pub const MOMENT_TOL: f64 = 1e-10;

/// Bipartition `M x N` with the subsystem whose indices are transposed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cut {
    sig: DimSignature,
    subsystem: usize,
}

impl Cut {
    pub fn new(m: usize, n: usize, subsystem: usize) -> Result<Self> {
        if subsystem > 1 {
            return Err(Error::DimMismatch(format!(
                "bipartite cut has subsystems 0 and 1, got {subsystem}"
            )));
        }
        Ok(Self {
            sig: DimSignature::new(vec![m, n])?,
            subsystem,
        })
    }

    /// Transpose on B.
    pub fn b(m: usize, n: usize) -> Result<Self> {
        Self::new(m, n, 1)
    }

    /// Parses `"MxN"`, transposing B.
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::InvalidDims(format!("cannot parse cut {s:?}, expected MxN"));
        let (m, n) = s.split_once(['x', 'X']).ok_or_else(bad)?;
        let m = m.trim().parse().map_err(|_| bad())?;
        let n = n.trim().parse().map_err(|_| bad())?;
        Self::b(m, n)
    }

    pub fn sig(&self) -> &DimSignature {
        &self.sig
    }

    pub fn subsystem(&self) -> usize {
        self.subsystem
    }

    pub fn order(&self) -> usize {
        self.sig.total()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Verdict {
    /// `first_k` is the lowest order with a gap beyond tolerance; `gap` is
    /// `Tr(rho^k) - T_k` there.
    Coherent { first_k: u32, gap: f64 },
    Undetermined,
}

impl Verdict {
    pub fn is_coherent(&self) -> bool {
        matches!(self, Verdict::Coherent { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentReport {
    pub cut: Cut,
    pub kmax: u32,
    /// `Tr(rho^k)` for `k = 1..=kmax`.
    pub state_moments: Vec<f64>,
    /// `T_k = Tr[(rho^{T_B})^k]` for `k = 1..=kmax`.
    pub pt_moments: Vec<f64>,
    /// Characteristic-polynomial coefficients `xi_0..=xi_kmax` of the
    /// partially transposed matrix.
    pub char_coeffs: Vec<f64>,
    /// `Tr(rho^k) - T_k` for `k = 1..=kmax`.
    pub gaps: Vec<f64>,
    pub verdict: Verdict,
}

fn check_kmax(cut: &Cut, kmax: u32) -> Result<()> {
    if kmax == 0 || kmax as usize > cut.order() {
        return Err(Error::OutOfRange {
            name: "kmax",
            value: kmax as f64,
            range: "1..=M*N",
        });
    }
    Ok(())
}

fn pt_spectrum(rho: &DensityMatrix, cut: &Cut) -> Result<Vec<f64>> {
    let pt = partial_transpose(rho.matrix(), cut.sig(), cut.subsystem())?;
    hermitian_eigvals(&pt)
}

/// `T_1..=T_kmax` from the spectrum of the partial transpose.
pub fn pt_moments(rho: &DensityMatrix, cut: &Cut, kmax: u32) -> Result<Vec<f64>> {
    check_kmax(cut, kmax)?;
    Ok(power_sums(&pt_spectrum(rho, cut)?, kmax))
}

/// `Tr(rho^k)` for `k = 1..=kmax`.
pub fn state_moments(rho: &DensityMatrix, kmax: u32) -> Result<Vec<f64>> {
    Ok(power_sums(&hermitian_eigvals(rho.matrix())?, kmax))
}

/// Newton's identities: from power sums `p_1..=p_n` to the elementary
/// symmetric polynomials `e_0 = 1, e_1, .., e_n` via
/// `e_{k+1} = 1/(k+1) sum_{l=0}^{k} (-1)^l e_{k-l} p_{l+1}`.
pub fn char_coeffs(moments: &[f64]) -> Vec<f64> {
    let mut xi = Vec::with_capacity(moments.len() + 1);
    xi.push(1.0);
    for k in 0..moments.len() {
        let mut acc = 0.0;
        for l in 0..=k {
            let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * xi[k - l] * moments[l];
        }
        xi.push(acc / (k + 1) as f64);
    }
    xi
}

fn verdict_from_gaps(gaps: &[f64], tol: f64) -> Verdict {
    gaps.iter()
        .enumerate()
        .skip(2)
        .find(|(_, g)| g.abs() > tol)
        .map(|(i, &gap)| Verdict::Coherent {
            first_k: i as u32 + 1,
            gap,
        })
        .unwrap_or(Verdict::Undetermined)
}

/// Scans `k = 3..=kmax` for the first order where the state and
/// partial-transpose moments differ by more than `tol`.
pub fn criterion(rho: &DensityMatrix, cut: &Cut, kmax: u32, tol: f64) -> Result<Verdict> {
    Ok(moment_report(rho, cut, kmax, tol)?.verdict)
}

pub fn moment_report(rho: &DensityMatrix, cut: &Cut, kmax: u32, tol: f64) -> Result<MomentReport> {
    check_kmax(cut, kmax)?;
    cut.sig().check_order(rho.dim())?;
    let state_moments = state_moments(rho, kmax)?;
    let pt_moments = pt_moments(rho, cut, kmax)?;
    let gaps: Vec<f64> = state_moments
        .iter()
        .zip(&pt_moments)
        .map(|(s, t)| s - t)
        .collect();
    Ok(MomentReport {
        cut: cut.clone(),
        kmax,
        char_coeffs: char_coeffs(&pt_moments),
        verdict: verdict_from_gaps(&gaps, tol),
        state_moments,
        pt_moments,
        gaps,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanPoint {
    pub a: f64,
    pub b: f64,
    /// `Tr(sigma^3) - T_3`.
    pub gap: f64,
}

/// Third-order gap over the two-qutrit family, `a`-major.
pub fn scan_two_qutrit(grid_a: &[f64], grid_b: &[f64]) -> Result<Vec<ScanPoint>> {
    let cut = Cut::b(3, 3)?;
    let points: Vec<(f64, f64)> = grid_a
        .iter()
        .flat_map(|&a| grid_b.iter().map(move |&b| (a, b)))
        .collect();
    points
        .into_par_iter()
        .map(|(a, b)| {
            let rho = two_qutrit(a, b)?;
            let gaps = moment_report(&rho, &cut, 3, MOMENT_TOL)?.gaps;
            Ok(ScanPoint { a, b, gap: gaps[2] })
        })
        .collect()
}

/// `n` evenly spaced points on `[lo, hi]` (endpoints included).
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}
