#![allow(dead_code)]

use coherence::linalg::ComplexMatrix;
use coherence::multicopy::{Factor, Slot, Wiring};
use coherence::rng::{random_hermitian, SeededRng};
use coherence::witness::Convention;
use coherence::{DensityMatrix, DimSignature, Witness};
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;

/// `Tr(O rho^{(x)k})` by looping over every matrix element of the global
/// operator. Each entry `O[x, y]` is read off the factors directly from the
/// slot digits of `x` and `y`; nothing is assembled or permuted.
pub fn brute_expectation(wiring: &Wiring, rho: &DensityMatrix) -> Complex64 {
    let dims = rho.sig().dims();
    let parties = dims.len();
    let k = wiring.copies();
    let slot_dims: Vec<usize> = (0..k * parties).map(|s| dims[s % parties]).collect();
    let total: usize = slot_dims.iter().product();

    let digits = |mut idx: usize| {
        let mut d = vec![0; slot_dims.len()];
        for s in (0..slot_dims.len()).rev() {
            d[s] = idx % slot_dims[s];
            idx /= slot_dims[s];
        }
        d
    };
    // Index of copy c's basis state, and of factor f's local basis state.
    let copy_index = |d: &[usize], c: usize| d[c * parties..(c + 1) * parties].iter().zip(dims).fold(0, |acc, (x, n)| acc * n + x);
    let factor_index = |d: &[usize], slots: &[Slot]| {
        slots
            .iter()
            .fold(0, |acc, s| acc * dims[s.subsystem] + d[s.copy * parties + s.subsystem])
    };

    let all: Vec<Vec<usize>> = (0..total).map(digits).collect();
    let mut sum = Complex64::new(0.0, 0.0);
    for x in &all {
        for y in &all {
            let mut op = Complex64::new(1.0, 0.0);
            for f in wiring.factors() {
                op *= f.witness.matrix()[(factor_index(x, &f.slots), factor_index(y, &f.slots))];
                if op == Complex64::new(0.0, 0.0) {
                    break;
                }
            }
            if op == Complex64::new(0.0, 0.0) {
                continue;
            }
            let mut state = Complex64::new(1.0, 0.0);
            for c in 0..k {
                state *= rho.matrix()[(copy_index(y, c), copy_index(x, c))];
            }
            sum += op * state;
        }
    }
    sum
}

/// Random Hermitian matrix with its diagonal set to zero.
pub fn zero_diagonal_witness(dims: Vec<usize>, rng: &mut SeededRng) -> Witness {
    let sig = DimSignature::new(dims).unwrap();
    let n = sig.total();
    let mut m = random_hermitian(n, rng);
    for i in 0..n {
        m[(i, i)] = Complex64::new(0.0, 0.0);
    }
    Witness::new(m, sig, Convention::NullOnIncoherent).unwrap()
}

/// Random bijective wiring: shuffle all slots, cut them into factors of
/// random arity and give each factor a fresh zero-diagonal witness.
pub fn random_wiring(state_dims: &[usize], copies: usize, max_arity: usize, rng: &mut SeededRng) -> Wiring {
    let parties = state_dims.len();
    let mut slots: Vec<Slot> = (0..copies)
        .flat_map(|c| (0..parties).map(move |s| Slot::new(c, s)))
        .collect();
    slots.shuffle(rng);
    let mut factors = Vec::new();
    let mut rest = &slots[..];
    while !rest.is_empty() {
        let arity = rng.gen_range(1..=max_arity.min(rest.len()));
        let (head, tail) = rest.split_at(arity);
        let dims = head.iter().map(|s| state_dims[s.subsystem]).collect();
        factors.push(Factor {
            name: format!("W{}", factors.len()),
            witness: zero_diagonal_witness(dims, rng),
            slots: head.to_vec(),
        });
        rest = tail;
    }
    Wiring::new(copies, factors).unwrap()
}

pub fn qubit_state(p: f64, c: Complex64) -> DensityMatrix {
    let m = ComplexMatrix::new(
        2,
        2,
        vec![Complex64::new(p, 0.0), c, c.conj(), Complex64::new(1.0 - p, 0.0)],
    )
    .unwrap();
    DensityMatrix::new(m, DimSignature::qubits(1)).unwrap()
}

/// Elementary symmetric polynomials `e_0..=e_n` of `values`.
pub fn elementary_symmetric(values: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; values.len() + 1];
    e[0] = 1.0;
    for (i, &x) in values.iter().enumerate() {
        for j in (1..=i + 1).rev() {
            e[j] += x * e[j - 1];
        }
    }
    e
}
