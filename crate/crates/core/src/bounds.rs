//! Quantitative coherence bounds.
//!
//! * [`trace_distance_coherence`]: distance from a state to the incoherent
//!   set in trace norm, minimized numerically over diagonal states.
//! * [`bound_l`], [`bound_lr`]: lower bounds on trace-distance coherence and
//!   on the robustness of coherence obtained from a single witness value.
//! * [`bound_l1`], [`bound_l2`]: two comparison bounds, from the normalized
//!   witness and from the Hilbert–Schmidt distance to the incoherent set.
//! * [`scan_isotropic`] and [`crossing`] tabulate and compare them on the
//!   two-qutrit isotropic family.

use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, trace_norm_hermitian, ComplexMatrix};
use crate::states::{isotropic, DensityMatrix};
use crate::witness::{degeneracy_tol, eig_extremes, normalize, real_trace, Witness};

/// Largest dimension accepted by [`trace_distance_coherence`].
pub const MAX_E_DIM: usize = 64;

/// Bisection stops once the bracket is narrower than this.
pub const CROSSING_TOL: f64 = 1e-6;

/// `(1/2) |a - b|_1` for two states of the same dimension.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimMismatch(format!(
            "states of dimension {} and {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    let diff = rho.matrix() - sigma.matrix();
    Ok(0.5 * trace_norm_hermitian(&diff)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceDistanceOptions {
    pub max_iterations: usize,
    /// Step at iteration `t` is `step / sqrt(t)`.
    pub step: f64,
    /// Stop when a window improves the best value by less than this,
    /// relative to that value.
    pub rel_tol: f64,
    pub window: usize,
}

impl Default for TraceDistanceOptions {
    fn default() -> Self {
        Self {
            max_iterations: 5000,
            step: 0.5,
            rel_tol: 1e-10,
            window: 500,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceDistanceResult {
    /// Trace distance from the state to `sigma_opt`.
    pub e: f64,
    /// Best diagonal state found.
    pub sigma_opt: DensityMatrix,
    /// Iterations used, summed over both starts.
    pub iterations: usize,
    /// `e` minus the best dual lower bound seen; the true minimum lies in
    /// `[e - certified_gap, e]`.
    pub certified_gap: f64,
}

/// Euclidean projection onto the probability simplex.
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (j, &x) in u.iter().enumerate() {
        cumsum += x;
        let t = (cumsum - 1.0) / (j + 1) as f64;
        if x - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

/// One evaluation of the objective at populations `p`: the value, the
/// subgradient and the dual lower bound read off the same eigensystem.
struct Probe {
    value: f64,
    grad: Vec<f64>,
    lower: f64,
}

fn probe(rho: &ComplexMatrix, p: &[f64]) -> Result<Probe> {
    let n = p.len();
    let mut diff = rho.clone();
    for (i, &pi) in p.iter().enumerate() {
        diff[(i, i)].re -= pi;
    }
    let spec = hermitian_eig(&diff)?;
    let v = spec.vectors.as_ref().expect("eigenvectors requested");
    let signs: Vec<f64> = spec
        .values
        .iter()
        .map(|&l| if l > 0.0 { 1.0 } else if l < 0.0 { -1.0 } else { 0.0 })
        .collect();
    let value = 0.5 * spec.values.iter().map(|l| l.abs()).sum::<f64>();
    // X = V sgn(L) V^H has |X| <= 1, so for every diagonal sigma
    // (1/2)|rho - sigma|_1 >= (1/2)(Tr(rho X) - max_i X_ii).
    let x = ComplexMatrix::from_fn(n, n, |i, j| {
        (0..n).map(|k| v[(i, k)] * signs[k] * v[(j, k)].conj()).sum::<Complex64>()
    });
    let x_diag: Vec<f64> = (0..n).map(|i| x[(i, i)].re).collect();
    let rho_x = rho.trace_product(&x)?.re;
    let max_diag = x_diag.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(Probe {
        value,
        grad: x_diag.iter().map(|d| -0.5 * d).collect(),
        lower: 0.5 * (rho_x - max_diag),
    })
}

struct Run {
    best: f64,
    best_p: Vec<f64>,
    lower: f64,
    iterations: usize,
}

fn subgradient_run(rho: &ComplexMatrix, start: Vec<f64>, opts: &TraceDistanceOptions) -> Result<Run> {
    let mut p = start;
    let first = probe(rho, &p)?;
    let mut run = Run {
        best: first.value,
        best_p: p.clone(),
        lower: first.lower,
        iterations: 0,
    };
    let mut grad = first.grad;
    let mut window_start = run.best;
    for t in 1..=opts.max_iterations {
        if run.best == 0.0 {
            break;
        }
        let step = opts.step / (t as f64).sqrt();
        let moved: Vec<f64> = p.iter().zip(&grad).map(|(pi, gi)| pi - step * gi).collect();
        p = project_simplex(&moved);
        let pr = probe(rho, &p)?;
        run.iterations = t;
        if pr.value < run.best {
            run.best = pr.value;
            run.best_p.clone_from(&p);
        }
        run.lower = run.lower.max(pr.lower);
        grad = pr.grad;
        if opts.window > 0 && t % opts.window == 0 {
            if window_start - run.best <= opts.rel_tol * window_start {
                break;
            }
            window_start = run.best;
        }
    }
    Ok(run)
}

/// `min_sigma (1/2)|rho - sigma|_1` over diagonal states `sigma`.
///
/// Projected subgradient descent from `diag(rho)` and from the uniform
/// distribution; the better run wins and its distance is recomputed from
/// scratch.
pub fn trace_distance_coherence(rho: &DensityMatrix, opts: &TraceDistanceOptions) -> Result<TraceDistanceResult> {
    let n = rho.dim();
    if n > MAX_E_DIM {
        return Err(Error::DimTooLarge { dim: n, max: MAX_E_DIM });
    }
    let m = rho.matrix();
    let pops = rho.populations();
    let pops = if pops.iter().all(|&x| x >= 0.0) { pops } else { project_simplex(&pops) };
    let starts = [pops, vec![1.0 / n as f64; n]];
    let mut runs = Vec::with_capacity(2);
    for start in starts {
        runs.push(subgradient_run(m, start, opts)?);
    }
    let iterations = runs.iter().map(|r| r.iterations).sum();
    let lower = runs.iter().map(|r| r.lower).fold(f64::NEG_INFINITY, f64::max);
    let best = runs
        .into_iter()
        .min_by(|a, b| a.best.total_cmp(&b.best))
        .expect("two runs");
    let sigma_opt = DensityMatrix::new(ComplexMatrix::diag_real(&best.best_p), rho.sig().clone())?;
    let e = trace_distance(rho, &sigma_opt)?;
    Ok(TraceDistanceResult {
        e,
        sigma_opt,
        iterations,
        certified_gap: (e - lower).max(0.0),
    })
}

fn spread(w: &Witness) -> Result<(f64, f64)> {
    let (lambda_minus, lambda_plus) = eig_extremes(w)?;
    let spread = lambda_plus - lambda_minus;
    if spread <= degeneracy_tol(lambda_plus) {
        return Err(Error::DegenerateSpectrum(spread));
    }
    Ok((lambda_minus, lambda_plus))
}

/// `-Tr(rho W) / (lambda_+ - lambda_-)` with the raw witness. Positive
/// values lower-bound the trace-distance coherence.
pub fn bound_l(w: &Witness, rho: &DensityMatrix) -> Result<f64> {
    let (lo, hi) = spread(w)?;
    Ok(-real_trace(w.matrix(), rho.matrix())? / (hi - lo))
}

/// `L / (1 - L)`, a robustness lower bound, for `0 <= L < 1`.
pub fn bound_lr(l: f64) -> Option<f64> {
    (0.0..1.0).contains(&l).then(|| l / (1.0 - l))
}

/// `-Tr(rho W_N)` with the normalized witness. Reported with its sign;
/// only positive values are bounds.
pub fn bound_l1(w: &Witness, rho: &DensityMatrix) -> Result<f64> {
    Ok(-normalize(w)?.expectation(rho)?)
}

/// Squared Hilbert–Schmidt distance to the incoherent set, which is the
/// squared norm of the off-diagonal part.
pub fn bound_l2(rho: &DensityMatrix) -> f64 {
    off_diagonal(rho.matrix()).map(|z| z.norm_sqr()).sum()
}

/// Sum of off-diagonal moduli.
pub fn l1_coherence(rho: &DensityMatrix) -> f64 {
    off_diagonal(rho.matrix()).map(|z| z.norm()).sum()
}

fn off_diagonal(m: &ComplexMatrix) -> impl Iterator<Item = Complex64> + '_ {
    let n = m.order();
    (0..n * n).filter(move |k| k / n != k % n).map(move |k| m.as_slice()[k])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundFlag {
    /// Witness is a multiple of the identity; no witness bound exists.
    Degenerate,
    /// `L` outside `[0, 1)`; the robustness bound is absent.
    VacuousLr,
    /// `L1 <= 0`; the witness does not certify anything.
    VacuousL1,
}

impl BoundFlag {
    pub fn tag(&self) -> &'static str {
        match self {
            BoundFlag::Degenerate => "degenerate",
            BoundFlag::VacuousLr => "vacuous_lr",
            BoundFlag::VacuousL1 => "vacuous_l1",
        }
    }
}

impl fmt::Display for BoundFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Every bound for one (witness, state) pair. Witness-derived fields are
/// `None` when the witness is degenerate.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundsReport {
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub l_wn: Option<f64>,
    pub l_r: Option<f64>,
    pub l1: Option<f64>,
    pub l2: f64,
    pub e: Option<TraceDistanceResult>,
    /// `E / (1 - E)`.
    pub e_ratio: Option<f64>,
    pub flags: Vec<BoundFlag>,
}

pub fn bounds_report(w: &Witness, rho: &DensityMatrix, e_opts: Option<&TraceDistanceOptions>) -> Result<BoundsReport> {
    let (lambda_minus, lambda_plus) = eig_extremes(w)?;
    let mut flags = Vec::new();
    let (l_wn, l1) = match (bound_l(w, rho), bound_l1(w, rho)) {
        (Ok(l), Ok(l1)) => (Some(l), Some(l1)),
        (Err(Error::DegenerateSpectrum(_)), _) | (_, Err(Error::DegenerateSpectrum(_))) => {
            flags.push(BoundFlag::Degenerate);
            (None, None)
        }
        (Err(e), _) | (_, Err(e)) => return Err(e),
    };
    let l_r = l_wn.and_then(bound_lr);
    if l_wn.is_some() && l_r.is_none() {
        flags.push(BoundFlag::VacuousLr);
    }
    if l1.is_some_and(|x| x <= 0.0) {
        flags.push(BoundFlag::VacuousL1);
    }
    let e = e_opts.map(|o| trace_distance_coherence(rho, o)).transpose()?;
    let e_ratio = e.as_ref().and_then(|r| (r.e < 1.0).then(|| r.e / (1.0 - r.e)));
    Ok(BoundsReport {
        lambda_plus,
        lambda_minus,
        l_wn,
        l_r,
        l1,
        l2: bound_l2(rho),
        e,
        e_ratio,
        flags,
    })
}

/// One row of the isotropic comparison, using the dephasing witness
/// `W = D(rho) - rho` of each state.
#[derive(Debug, Clone, PartialEq)]
pub struct IsotropicRow {
    pub v: f64,
    pub l1: Option<f64>,
    pub l2: f64,
    pub l_wn: Option<f64>,
    pub l_r: Option<f64>,
    pub flags: Vec<BoundFlag>,
}

pub fn isotropic_row(v: f64) -> Result<IsotropicRow> {
    let rho = isotropic(v)?;
    let w = Witness::dephasing(&rho);
    let r = bounds_report(&w, &rho, None)?;
    Ok(IsotropicRow {
        v,
        l1: r.l1,
        l2: r.l2,
        l_wn: r.l_wn,
        l_r: r.l_r,
        flags: r.flags,
    })
}

/// Rows in grid order.
pub fn scan_isotropic(v_grid: &[f64]) -> Result<Vec<IsotropicRow>> {
    v_grid.par_iter().map(|&v| isotropic_row(v)).collect()
}

/// Root of `f - g` on `[lo, hi]` by bisection.
pub fn crossing(lo: f64, hi: f64, f: impl Fn(f64) -> f64, g: impl Fn(f64) -> f64) -> Result<f64> {
    let h = |x: f64| f(x) - g(x);
    let (mut lo, mut hi) = (lo.min(hi), lo.max(hi));
    let (mut h_lo, h_hi) = (h(lo), h(hi));
    if h_lo == 0.0 && h_hi == 0.0 {
        return Err(Error::NoSignChange { lo, hi });
    }
    if h_lo == 0.0 {
        return Ok(lo);
    }
    if h_hi == 0.0 {
        return Ok(hi);
    }
    if !(h_lo.signum() != h_hi.signum() && h_lo.is_finite() && h_hi.is_finite()) {
        return Err(Error::NoSignChange { lo, hi });
    }
    while hi - lo > CROSSING_TOL {
        let mid = 0.5 * (lo + hi);
        let h_mid = h(mid);
        if h_mid == 0.0 {
            return Ok(mid);
        }
        if h_mid.signum() == h_lo.signum() {
            lo = mid;
            h_lo = h_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DimSignature;
    use crate::states::{max_entangled, random_diagonal};

    fn qubit(p: f64, c: Complex64) -> DensityMatrix {
        let m = ComplexMatrix::new(
            2,
            2,
            vec![Complex64::new(p, 0.0), c, c.conj(), Complex64::new(1.0 - p, 0.0)],
        )
        .unwrap();
        DensityMatrix::new(m, DimSignature::qubits(1)).unwrap()
    }

    #[test]
    fn simplex_projection() {
        assert_eq!(project_simplex(&[0.2, 0.8]), vec![0.2, 0.8]);
        let p = project_simplex(&[2.0, 0.0, -1.0]);
        assert_eq!(p, vec![1.0, 0.0, 0.0]);
        let p = project_simplex(&[0.5, 0.5, 0.5]);
        assert!(p.iter().all(|x| (x - 1.0 / 3.0).abs() < 1e-15));
    }

    #[test]
    fn trace_distance_basics() {
        let a = qubit(1.0, Complex64::new(0.0, 0.0));
        let b = qubit(0.0, Complex64::new(0.0, 0.0));
        assert!((trace_distance(&a, &b).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(trace_distance(&a, &a).unwrap(), 0.0);
        let r = qubit(0.3, Complex64::new(0.1, -0.2));
        assert!((trace_distance(&r, &r.dephase()).unwrap() - 0.05f64.sqrt()).abs() < 1e-14);
        let big = max_entangled(2).unwrap();
        assert!(matches!(trace_distance(&a, &big), Err(Error::DimMismatch(_))));
    }

    #[test]
    fn coherence_of_qubit_is_offdiagonal_modulus() {
        let rho = qubit(0.7, Complex64::new(0.2, 0.3));
        let r = trace_distance_coherence(&rho, &TraceDistanceOptions::default()).unwrap();
        assert!((r.e - 0.13f64.sqrt()).abs() < 1e-9, "{}", r.e);
        assert!(r.certified_gap < 1e-9);
    }

    #[test]
    fn diagonal_state_has_zero_coherence() {
        let rho = random_diagonal(5, 3).unwrap();
        let r = trace_distance_coherence(&rho, &TraceDistanceOptions::default()).unwrap();
        assert_eq!(r.e, 0.0);
        assert_eq!(r.sigma_opt.matrix(), rho.matrix());
    }

    #[test]
    fn e_refuses_large_dimensions() {
        let rho = random_diagonal(65, 0).unwrap();
        assert!(matches!(
            trace_distance_coherence(&rho, &TraceDistanceOptions::default()),
            Err(Error::DimTooLarge { .. })
        ));
    }

    #[test]
    fn lr_cases() {
        assert_eq!(bound_lr(0.0), Some(0.0));
        assert_eq!(bound_lr(0.5), Some(1.0));
        assert_eq!(bound_lr(1.0), None);
        assert_eq!(bound_lr(-0.1), None);
    }

    #[test]
    fn l1_and_l2_of_qubit() {
        let rho = qubit(0.4, Complex64::new(0.3, 0.0));
        assert!((l1_coherence(&rho) - 0.6).abs() < 1e-15);
        assert!((bound_l2(&rho) - 0.18).abs() < 1e-15);
    }

    #[test]
    fn max_entangled_report() {
        let rho = max_entangled(3).unwrap();
        let w = Witness::dephasing(&rho);
        let r = bounds_report(&w, &rho, None).unwrap();
        assert!((r.l_wn.unwrap() - 2.0 / 3.0).abs() < 1e-12);
        assert!((r.l_r.unwrap() - 2.0).abs() < 1e-10);
        assert!(r.flags.is_empty());
    }

    #[test]
    fn degenerate_witness_is_flagged() {
        let r = isotropic_row(1.0 / 9.0).unwrap();
        assert_eq!(r.flags, vec![BoundFlag::Degenerate]);
        assert!(r.l1.is_none() && r.l_r.is_none());
        assert!(r.l2 < 1e-30);
    }

    #[test]
    fn isotropic_endpoint() {
        let r = isotropic_row(1.0).unwrap();
        assert!((r.l1.unwrap() - 1.0).abs() < 1e-12);
        assert!((r.l2 - 2.0 / 3.0).abs() < 1e-12);
        assert!((r.l_r.unwrap() - 2.0).abs() < 1e-10);
    }

    #[test]
    fn crossing_cases() {
        let x = crossing(0.0, 1.0, |v| v - 0.5, |_| 0.0).unwrap();
        assert!((x - 0.5).abs() < 1e-6);
        assert!(matches!(crossing(0.0, 1.0, |v| v, |v| v), Err(Error::NoSignChange { .. })));
    }
}
