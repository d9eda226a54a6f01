//! Nonlinear coherence detection on several copies of a state.
//!
//! A [`Wiring`] places tensor factors (witnesses) on the `(copy, subsystem)`
//! slots of `rho^{(x)k}`. The global operator is the Kronecker product of the
//! factors in listed order, relabeled into the canonical copy-major slot
//! order `(copy 0: A, B, ..), (copy 1: A, B, ..), ..`. Because every factor
//! has a zero diagonal (or the product contains at least one such factor),
//! the expectation on any incoherent state vanishes, while coherent states
//! may give a nonzero value even when each witness alone sees nothing.
//!
//! Slot text format: `A1` is subsystem A (index 0) of copy 1 (index 0).
//! A wiring reads `W@A1,A2;V@B1,B2`.

use std::collections::HashMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{kron, permute_subsystems, ComplexMatrix, DimSignature};
use crate::states::DensityMatrix;
use crate::witness::{real_trace, Convention, Witness, IMAG_TOL};

/// Detection threshold on multi-copy expectation values.
pub const DETECT_TOL: f64 = 1e-9;

/// Largest operator dimension [`nonlinear_expectation_dense`] will build.
pub const DENSE_MAX_DIM: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Slot {
    pub copy: usize,
    pub subsystem: usize,
}

impl Slot {
    pub fn new(copy: usize, subsystem: usize) -> Self {
        Self { copy, subsystem }
    }

    /// Parses `A1`, `C3`, `B12`.
    pub fn parse(token: &str) -> Result<Self> {
        let bad = || Error::WiringInvalid(format!("bad slot token {token:?}"));
        let token = token.trim();
        let mut chars = token.chars();
        let letter = chars.next().ok_or_else(bad)?;
        if !letter.is_ascii_uppercase() {
            return Err(bad());
        }
        let copy: usize = chars.as_str().parse().map_err(|_| bad())?;
        if copy == 0 {
            return Err(bad());
        }
        Ok(Self {
            copy: copy - 1,
            subsystem: (letter as u8 - b'A') as usize,
        })
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let letter = (b'A' + self.subsystem as u8) as char;
        write!(f, "{letter}{}", self.copy + 1)
    }
}

/// One tensor factor of a wiring.
#[derive(Debug, Clone, PartialEq)]
pub struct Factor {
    pub name: String,
    pub witness: Witness,
    /// Slot of each witness subsystem, in the witness's own order.
    pub slots: Vec<Slot>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Wiring {
    copies: usize,
    factors: Vec<Factor>,
}

impl Wiring {
    pub fn new(copies: usize, factors: Vec<Factor>) -> Result<Self> {
        if copies == 0 {
            return Err(Error::WiringInvalid("at least one copy is required".into()));
        }
        if factors.is_empty() {
            return Err(Error::WiringInvalid("no factors".into()));
        }
        Ok(Self { copies, factors })
    }

    /// Parses `name@Slot,Slot;name@Slot,..`. Names are resolved in
    /// `witnesses`; `copies` defaults to the largest copy index used.
    pub fn parse(text: &str, witnesses: &[(String, Witness)], copies: Option<usize>) -> Result<Self> {
        let lookup: HashMap<&str, &Witness> = witnesses.iter().map(|(n, w)| (n.as_str(), w)).collect();
        let mut factors = Vec::new();
        for part in text.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (name, slots) = part
                .split_once('@')
                .ok_or_else(|| Error::WiringInvalid(format!("factor {part:?} lacks '@'")))?;
            let name = name.trim();
            let witness = lookup
                .get(name)
                .ok_or_else(|| Error::WiringInvalid(format!("unknown witness {name:?}")))?;
            let slots = slots.split(',').map(Slot::parse).collect::<Result<Vec<_>>>()?;
            factors.push(Factor {
                name: name.to_string(),
                witness: (*witness).clone(),
                slots,
            });
        }
        let used = factors
            .iter()
            .flat_map(|f| f.slots.iter().map(|s| s.copy + 1))
            .max()
            .unwrap_or(0);
        Self::new(copies.unwrap_or(used), factors)
    }

    pub fn copies(&self) -> usize {
        self.copies
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    /// Slots in factor order.
    pub fn slot_sequence(&self) -> Vec<Slot> {
        self.factors.iter().flat_map(|f| f.slots.iter().copied()).collect()
    }

    /// Same wiring with copy `c` renamed to `perm[c]`.
    pub fn relabel_copies(&self, perm: &[usize]) -> Result<Self> {
        crate::linalg::validate_permutation(perm, self.copies)?;
        let factors = self
            .factors
            .iter()
            .map(|f| Factor {
                slots: f
                    .slots
                    .iter()
                    .map(|s| Slot::new(perm[s.copy], s.subsystem))
                    .collect(),
                ..f.clone()
            })
            .collect();
        Self::new(self.copies, factors)
    }

    /// Checks the wiring against the single-copy signature of the state.
    pub fn validate(&self, state_sig: &DimSignature) -> Result<()> {
        let parties = state_sig.parties();
        let mut seen = vec![false; self.copies * parties];
        for f in &self.factors {
            let wdims = f.witness.sig().dims();
            if wdims.len() != f.slots.len() {
                return Err(Error::WiringInvalid(format!(
                    "factor {} has {} slots but its witness has {} subsystems",
                    f.name,
                    f.slots.len(),
                    wdims.len()
                )));
            }
            for (slot, &wd) in f.slots.iter().zip(wdims) {
                if slot.copy >= self.copies || slot.subsystem >= parties {
                    return Err(Error::WiringInvalid(format!(
                        "slot {slot} outside {} copies of {parties} subsystems",
                        self.copies
                    )));
                }
                let sd = state_sig.dims()[slot.subsystem];
                if sd != wd {
                    return Err(Error::WiringInvalid(format!(
                        "factor {} puts a dimension-{wd} factor on slot {slot} of dimension {sd}",
                        f.name
                    )));
                }
                let pos = slot.copy * parties + slot.subsystem;
                if std::mem::replace(&mut seen[pos], true) {
                    return Err(Error::WiringInvalid(format!("slot {slot} used twice")));
                }
            }
        }
        if let Some(pos) = seen.iter().position(|s| !s) {
            let slot = Slot::new(pos / parties, pos % parties);
            return Err(Error::WiringInvalid(format!("slot {slot} is not covered")));
        }
        Ok(())
    }

    /// Whether detection means a nonzero value (some factor has the null
    /// convention) or a negative one (all factors nonnegative).
    pub fn convention(&self) -> Convention {
        if self
            .factors
            .iter()
            .all(|f| f.witness.convention() == Convention::NonnegOnIncoherent)
        {
            Convention::NonnegOnIncoherent
        } else {
            Convention::NullOnIncoherent
        }
    }
}

impl fmt::Display for Wiring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, factor) in self.factors.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            write!(f, "{}@", factor.name)?;
            for (j, s) in factor.slots.iter().enumerate() {
                if j > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{s}")?;
            }
        }
        Ok(())
    }
}

/// Global operator on `rho^{(x)k}` in canonical copy-major order.
pub fn assemble(wiring: &Wiring, state_sig: &DimSignature) -> Result<ComplexMatrix> {
    wiring.validate(state_sig)?;
    let parties = state_sig.parties();
    let mut op = wiring.factors[0].witness.matrix().clone();
    for f in &wiring.factors[1..] {
        op = kron(&op, f.witness.matrix());
    }
    let seq = wiring.slot_sequence();
    let seq_sig = DimSignature::new(seq.iter().map(|s| state_sig.dims()[s.subsystem]).collect())?;
    let mut position = vec![0; seq.len()];
    for (t, s) in seq.iter().enumerate() {
        position[s.copy * parties + s.subsystem] = t;
    }
    permute_subsystems(&op, &seq_sig, &position)
}

/// `rho^{(x)k}`.
pub fn tensor_power(rho: &DensityMatrix, k: usize) -> ComplexMatrix {
    let mut out = rho.matrix().clone();
    for _ in 1..k {
        out = kron(&out, rho.matrix());
    }
    out
}

/// `Re Tr(O rho^{(x)k})` by materializing both operators.
pub fn nonlinear_expectation_dense(wiring: &Wiring, rho: &DensityMatrix) -> Result<f64> {
    let dim = rho
        .dim()
        .checked_pow(wiring.copies as u32)
        .unwrap_or(usize::MAX);
    if dim > DENSE_MAX_DIM {
        return Err(Error::DimTooLarge {
            dim,
            max: DENSE_MAX_DIM,
        });
    }
    let op = assemble(wiring, rho.sig())?;
    real_trace(&op, &tensor_power(rho, wiring.copies))
}

/// Nonzero entries of one factor, with their per-slot digits.
struct SparseFactor {
    /// Canonical positions of the factor's slots.
    positions: Vec<usize>,
    /// `(row digits, column digits, value)`.
    entries: Vec<(Vec<usize>, Vec<usize>, Complex64)>,
}

/// `Re Tr(O rho^{(x)k})` contracted factor by factor.
///
/// Neither the global operator nor `rho^{(x)k}` is formed: the sum runs over
/// the nonzero entries of each factor, and every combination contributes
/// `prod_f W_f[x_f, y_f] * prod_c rho[y_c, x_c]`.
pub fn nonlinear_expectation(wiring: &Wiring, rho: &DensityMatrix) -> Result<f64> {
    let sig = rho.sig();
    wiring.validate(sig)?;
    let parties = sig.parties();
    let k = wiring.copies;

    let factors: Vec<SparseFactor> = wiring
        .factors
        .iter()
        .map(|f| {
            let wsig = f.witness.sig();
            let m = f.witness.matrix();
            let n = m.order();
            let mut entries = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    let z = m[(i, j)];
                    if z != Complex64::new(0.0, 0.0) {
                        entries.push((wsig.digits(i), wsig.digits(j), z));
                    }
                }
            }
            SparseFactor {
                positions: f.slots.iter().map(|s| s.copy * parties + s.subsystem).collect(),
                entries,
            }
        })
        .collect();
    if factors.iter().any(|f| f.entries.is_empty()) {
        return Ok(0.0);
    }

    let mut row_digits = vec![0usize; k * parties];
    let mut col_digits = vec![0usize; k * parties];
    let mut choice = vec![0usize; factors.len()];
    let mut total = Complex64::new(0.0, 0.0);
    let rho_m = rho.matrix();
    'outer: loop {
        let mut weight = Complex64::new(1.0, 0.0);
        for (f, &c) in factors.iter().zip(&choice) {
            let (rd, cd, z) = &f.entries[c];
            for (t, &pos) in f.positions.iter().enumerate() {
                row_digits[pos] = rd[t];
                col_digits[pos] = cd[t];
            }
            weight *= z;
        }
        for copy in 0..k {
            let span = copy * parties..(copy + 1) * parties;
            let x = sig.index_of(&row_digits[span.clone()]);
            let y = sig.index_of(&col_digits[span]);
            weight *= rho_m[(y, x)];
            if weight == Complex64::new(0.0, 0.0) {
                break;
            }
        }
        total += weight;

        // Odometer over factor entries.
        for (slot, f) in choice.iter_mut().zip(&factors) {
            *slot += 1;
            if *slot < f.entries.len() {
                continue 'outer;
            }
            *slot = 0;
        }
        break;
    }

    let scale: f64 = wiring
        .factors
        .iter()
        .map(|f| f.witness.matrix().frobenius_norm())
        .product::<f64>()
        .max(1.0);
    if total.im.abs() > IMAG_TOL * scale {
        return Err(Error::NonRealTrace(total.im));
    }
    Ok(total.re)
}

/// Which slot ordering a cascade wiring was built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pattern {
    /// Single copy, one witness on the whole state.
    Linear,
    /// Subsystem-major: `A1, A2, .., B1, B2, ..`.
    Aligned,
    /// Diagonal: start `s` contributes `(s, copy 1), (s+1, copy 2), ..`.
    Cyclic,
    /// Copy-major: `A1, B1, .., A2, B2, ..`.
    Sequential,
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pattern::Linear => "linear",
            Pattern::Aligned => "aligned",
            Pattern::Cyclic => "cyclic",
            Pattern::Sequential => "sequential",
        })
    }
}

impl Pattern {
    fn order(&self, parties: usize, copies: usize) -> Vec<Slot> {
        match self {
            Pattern::Linear | Pattern::Sequential => (0..copies)
                .flat_map(|c| (0..parties).map(move |s| Slot::new(c, s)))
                .collect(),
            Pattern::Aligned => (0..parties)
                .flat_map(|s| (0..copies).map(move |c| Slot::new(c, s)))
                .collect(),
            Pattern::Cyclic => (0..parties)
                .flat_map(|s| (0..copies).map(move |j| Slot::new(j, (s + j) % parties)))
                .collect(),
        }
    }

    /// Cuts the pattern's slot order into consecutive factors, cycling
    /// through `witnesses`. Fails when the arities do not tile the slots or
    /// a factor lands on slots of the wrong dimension.
    pub fn wiring(
        &self,
        witnesses: &[(String, Witness)],
        state_sig: &DimSignature,
        copies: usize,
    ) -> Result<Wiring> {
        if witnesses.is_empty() {
            return Err(Error::WiringInvalid("no witnesses".into()));
        }
        let order = self.order(state_sig.parties(), copies);
        let mut factors = Vec::new();
        let mut rest = &order[..];
        let mut i = 0;
        while !rest.is_empty() {
            let (name, w) = &witnesses[i % witnesses.len()];
            let arity = w.sig().parties();
            if arity > rest.len() {
                return Err(Error::WiringInvalid(format!(
                    "{self} pattern: witness arities do not tile {} slots",
                    order.len()
                )));
            }
            let (head, tail) = rest.split_at(arity);
            factors.push(Factor {
                name: name.clone(),
                witness: w.clone(),
                slots: head.to_vec(),
            });
            rest = tail;
            i += 1;
        }
        let wiring = Wiring::new(copies, factors)?;
        wiring.validate(state_sig)?;
        Ok(wiring)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CascadeStep {
    pub copies: usize,
    pub pattern: Pattern,
    /// Wiring text, when the pattern could be built.
    pub wiring: Option<String>,
    pub value: Option<f64>,
    pub detected: bool,
    /// Why the step was skipped.
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CascadeReport {
    pub steps: Vec<CascadeStep>,
    pub tol: f64,
}

impl CascadeReport {
    /// First successful step, if any.
    pub fn detection(&self) -> Option<&CascadeStep> {
        self.steps.iter().find(|s| s.detected)
    }

    pub fn detected(&self) -> bool {
        self.detection().is_some()
    }
}

/// Escalating detection: each witness alone, then two copies under the
/// aligned and cyclic patterns, then three copies under the cyclic pattern.
/// Stops at the first detection.
pub fn cascade(
    witnesses: &[(String, Witness)],
    rho: &DensityMatrix,
    max_copies: usize,
    tol: f64,
) -> Result<CascadeReport> {
    if !(1..=3).contains(&max_copies) {
        return Err(Error::OutOfRange {
            name: "max_copies",
            value: max_copies as f64,
            range: "1..=3",
        });
    }
    let mut steps = Vec::new();
    let report = |steps| CascadeReport { steps, tol };

    for (name, w) in witnesses {
        if w.dim() != rho.dim() {
            steps.push(CascadeStep {
                copies: 1,
                pattern: Pattern::Linear,
                wiring: None,
                value: None,
                detected: false,
                note: Some(format!(
                    "witness {name} has dimension {}, state has {}",
                    w.dim(),
                    rho.dim()
                )),
            });
            continue;
        }
        let value = real_trace(w.matrix(), rho.matrix())?;
        let detected = w.convention().detects(value, tol);
        steps.push(CascadeStep {
            copies: 1,
            pattern: Pattern::Linear,
            wiring: Some(name.clone()),
            value: Some(value),
            detected,
            note: None,
        });
        if detected {
            return Ok(report(steps));
        }
    }

    let menu: &[(usize, Pattern)] = &[(2, Pattern::Aligned), (2, Pattern::Cyclic), (3, Pattern::Cyclic)];
    for &(copies, pattern) in menu.iter().filter(|(c, _)| *c <= max_copies) {
        match pattern.wiring(witnesses, rho.sig(), copies) {
            Ok(wiring) => {
                let value = nonlinear_expectation(&wiring, rho)?;
                let detected = wiring.convention().detects(value, tol);
                steps.push(CascadeStep {
                    copies,
                    pattern,
                    wiring: Some(wiring.to_string()),
                    value: Some(value),
                    detected,
                    note: None,
                });
                if detected {
                    return Ok(report(steps));
                }
            }
            Err(Error::WiringInvalid(why)) => steps.push(CascadeStep {
                copies,
                pattern,
                wiring: None,
                value: None,
                detected: false,
                note: Some(why),
            }),
            Err(e) => return Err(e),
        }
    }
    Ok(report(steps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{random_diagonal, x_state};

    fn flip(i: usize, j: usize, n_qubits: usize) -> Witness {
        let n = 1 << n_qubits;
        let mut m = ComplexMatrix::zeros(n, n);
        m[(i, j)] = Complex64::new(1.0, 0.0);
        m[(j, i)] = Complex64::new(1.0, 0.0);
        Witness::new(m, DimSignature::qubits(n_qubits), Convention::NullOnIncoherent).unwrap()
    }

    fn x_witnesses() -> Vec<(String, Witness)> {
        vec![("W".into(), flip(0b00, 0b10, 2)), ("V".into(), flip(0b01, 0b11, 2))]
    }

    #[test]
    fn slot_tokens() {
        assert_eq!(Slot::parse("A1").unwrap(), Slot::new(0, 0));
        assert_eq!(Slot::parse(" C3 ").unwrap(), Slot::new(2, 2));
        assert_eq!(Slot::parse("B12").unwrap(), Slot::new(11, 1));
        for bad in ["", "A", "a1", "A0", "1A", "AB1"] {
            assert!(Slot::parse(bad).is_err(), "{bad}");
        }
        assert_eq!(Slot::new(1, 2).to_string(), "C2");
    }

    #[test]
    fn parse_and_display_round_trip() {
        let ws = x_witnesses();
        let w = Wiring::parse("W@A1,A2; V@B1,B2", &ws, None).unwrap();
        assert_eq!(w.copies(), 2);
        assert_eq!(w.to_string(), "W@A1,A2;V@B1,B2");
        assert!(matches!(Wiring::parse("X@A1,A2", &ws, None), Err(Error::WiringInvalid(_))));
        assert!(matches!(Wiring::parse("W:A1,A2", &ws, None), Err(Error::WiringInvalid(_))));
    }

    #[test]
    fn validation_catches_bad_slots() {
        let ws = x_witnesses();
        let sig = DimSignature::qubits(2);
        for bad in ["W@A1,A2;V@B1,A2", "W@A1,A2", "W@A1,A2;V@B1,C2", "W@A1,A2,B1;V@B2"] {
            let w = Wiring::parse(bad, &ws, Some(2)).unwrap();
            assert!(matches!(w.validate(&sig), Err(Error::WiringInvalid(_))), "{bad}");
        }
        let qutrit = DimSignature::new(vec![2, 3]).unwrap();
        let w = Wiring::parse("W@A1,A2;V@B1,B2", &ws, None).unwrap();
        assert!(matches!(w.validate(&qutrit), Err(Error::WiringInvalid(_))));
    }

    #[test]
    fn single_copy_identity_wiring_is_the_witness() {
        let ws = vec![("W".to_string(), flip(1, 6, 3))];
        let wiring = Wiring::parse("W@A1,B1,C1", &ws, None).unwrap();
        let op = assemble(&wiring, &DimSignature::qubits(3)).unwrap();
        assert_eq!(&op, ws[0].1.matrix());
    }

    #[test]
    fn aligned_operator_is_a_relabeled_product() {
        let ws = x_witnesses();
        let wiring = Wiring::parse("W@A1,A2;V@B1,B2", &ws, None).unwrap();
        let op = assemble(&wiring, &DimSignature::qubits(2)).unwrap();
        assert_eq!(op.rows(), 16);
        assert_eq!(op.hermitian_defect(), 0.0);
        let raw = kron(ws[0].1.matrix(), ws[1].1.matrix());
        let nonzero = |m: &ComplexMatrix| m.as_slice().iter().filter(|z| z.norm() > 0.0).count();
        assert_eq!((nonzero(&op), nonzero(&raw)), (4, 4));
        assert_ne!(op, raw);
        // Copy-major bits (A1 B1 A2 B2): W flips A1 when A2 = 0, V flips B1 when B2 = 1.
        assert_eq!(op[(0b0001, 0b1101)], Complex64::new(1.0, 0.0));
        assert_eq!(op[(0b0011, 0b1100)], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn factored_matches_dense_on_x_state() {
        let rho = x_state(0.5, 0.25).unwrap();
        let ws = x_witnesses();
        for text in ["W@A1,A2;V@B1,B2", "W@A1,B2;V@B1,A2", "W@A1,B1;V@A2,B2"] {
            let w = Wiring::parse(text, &ws, None).unwrap();
            let f = nonlinear_expectation(&w, &rho).unwrap();
            let d = nonlinear_expectation_dense(&w, &rho).unwrap();
            assert!((f - d).abs() < 1e-15, "{text}: {f} vs {d}");
        }
    }

    #[test]
    fn patterns_reproduce_named_wirings() {
        let ws = x_witnesses();
        let sig = DimSignature::qubits(2);
        assert_eq!(Pattern::Aligned.wiring(&ws, &sig, 2).unwrap().to_string(), "W@A1,A2;V@B1,B2");
        assert_eq!(Pattern::Cyclic.wiring(&ws, &sig, 2).unwrap().to_string(), "W@A1,B2;V@B1,A2");
        let w3 = vec![("W".to_string(), flip(1, 7, 3))];
        let sig3 = DimSignature::qubits(3);
        assert_eq!(
            Pattern::Cyclic.wiring(&w3, &sig3, 3).unwrap().to_string(),
            "W@A1,B2,C3;W@B1,C2,A3;W@C1,A2,B3"
        );
        let w2 = vec![("W".to_string(), flip(1, 2, 2))];
        assert_eq!(
            Pattern::Sequential.wiring(&w2, &sig3, 2).unwrap().to_string(),
            "W@A1,B1;W@C1,A2;W@B2,C2"
        );
        assert!(Pattern::Aligned.wiring(&w3, &sig, 2).is_err());
    }

    #[test]
    fn cascade_on_x_state_stops_at_two_copies() {
        let rho = x_state(0.5, 0.5).unwrap();
        let r = cascade(&x_witnesses(), &rho, 3, DETECT_TOL).unwrap();
        let hit = r.detection().unwrap();
        assert_eq!((hit.copies, hit.pattern), (2, Pattern::Aligned));
        assert!((hit.value.unwrap() - 0.125).abs() < 1e-15);
        assert_eq!(r.steps.len(), 3);
    }

    #[test]
    fn cascade_never_fires_on_incoherent_states() {
        for seed in 0..20 {
            let rho = random_diagonal(4, seed).unwrap().with_signature(DimSignature::qubits(2)).unwrap();
            let r = cascade(&x_witnesses(), &rho, 3, DETECT_TOL).unwrap();
            assert!(!r.detected());
        }
    }

    #[test]
    fn cascade_rejects_too_many_copies() {
        let rho = x_state(0.5, 0.5).unwrap();
        assert!(cascade(&x_witnesses(), &rho, 4, DETECT_TOL).is_err());
    }

    #[test]
    fn mismatched_linear_witness_is_skipped() {
        let rho = random_diagonal(8, 1).unwrap().with_signature(DimSignature::qubits(3)).unwrap();
        let ws = vec![("W".to_string(), flip(1, 2, 2))];
        let r = cascade(&ws, &rho, 2, DETECT_TOL).unwrap();
        assert!(r.steps[0].note.is_some());
        assert_eq!(r.steps[1].wiring.as_deref(), Some("W@A1,A2;W@B1,B2;W@C1,C2"));
    }

    #[test]
    fn dense_route_refuses_huge_operators() {
        let rho = random_diagonal(16, 0).unwrap().with_signature(DimSignature::qubits(4)).unwrap();
        let ws = vec![("W".to_string(), flip(0, 3, 2))];
        let w = Pattern::Aligned.wiring(&ws, rho.sig(), 3).unwrap();
        assert!(matches!(nonlinear_expectation_dense(&w, &rho), Err(Error::DimTooLarge { .. })));
        assert_eq!(nonlinear_expectation(&w, &rho).unwrap(), 0.0);
    }
}
