use super::{ComplexMatrix, DimSignature};
use crate::error::{Error, Result};

/// Kronecker product `A (x) B`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (br, bc) = (b.rows(), b.cols());
    ComplexMatrix::from_fn(a.rows() * br, a.cols() * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

/// Partial transpose on one subsystem.
///
/// For a bipartite signature `(M, N)` and `subsystem = 1` this is the usual
/// `(rho^{T_B})_{ij,kl} = rho_{il,kj}`. Signatures with more parties are
/// accepted; the digits of the chosen subsystem are exchanged between row and
/// column index.
pub fn partial_transpose(
    a: &ComplexMatrix,
    sig: &DimSignature,
    subsystem: usize,
) -> Result<ComplexMatrix> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    sig.check_order(a.order())?;
    if subsystem >= sig.parties() {
        return Err(Error::DimMismatch(format!(
            "subsystem {subsystem} out of range for signature {sig}"
        )));
    }
    // Stride of the chosen digit in the flat index.
    let stride: usize = sig.dims()[subsystem + 1..].iter().product();
    let d = sig.dims()[subsystem];
    let n = a.order();
    Ok(ComplexMatrix::from_fn(n, n, |row, col| {
        let rd = (row / stride) % d;
        let cd = (col / stride) % d;
        let src_row = row - rd * stride + cd * stride;
        let src_col = col - cd * stride + rd * stride;
        a[(src_row, src_col)]
    }))
}

/// Reorders tensor factors: subsystem `k` of the result is subsystem
/// `perm[k]` of the input. The result is `P A P^T` for the corresponding
/// basis permutation `P`, so the spectrum is unchanged.
pub fn permute_subsystems(
    a: &ComplexMatrix,
    sig: &DimSignature,
    perm: &[usize],
) -> Result<ComplexMatrix> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    sig.check_order(a.order())?;
    validate_permutation(perm, sig.parties())?;
    let map = index_map(sig, perm);
    let n = a.order();
    Ok(ComplexMatrix::from_fn(n, n, |i, j| a[(map[i], map[j])]))
}

/// `map[out_index] = in_index` for the relabeling described in
/// [`permute_subsystems`].
pub(crate) fn index_map(sig: &DimSignature, perm: &[usize]) -> Vec<usize> {
    let out_sig = sig.permuted(perm);
    let mut in_digits = vec![0; sig.parties()];
    (0..sig.total())
        .map(|out| {
            for (k, d) in out_sig.digits(out).into_iter().enumerate() {
                in_digits[perm[k]] = d;
            }
            sig.index_of(&in_digits)
        })
        .collect()
}

pub(crate) fn validate_permutation(perm: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if perm.len() != n {
        return Err(Error::InvalidPermutation(perm.to_vec()));
    }
    for &p in perm {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            return Err(Error::InvalidPermutation(perm.to_vec()));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use num_complex::Complex64;

    use super::*;
    use crate::linalg::{hermitian_eigvals, EIG_TOL};
    use crate::rng::{random_hermitian, seeded};

    fn sig(d: &[usize]) -> DimSignature {
        DimSignature::new(d.to_vec()).unwrap()
    }

    #[test]
    fn kron_identities_and_basis() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(kron(&i2, &i2), ComplexMatrix::identity(4));

        let k = kron(&ComplexMatrix::basis_op(2, 0, 1), &ComplexMatrix::basis_op(2, 1, 0));
        for i in 0..4 {
            for j in 0..4 {
                let want = if (i, j) == (1, 2) { 1.0 } else { 0.0 };
                assert_eq!(k[(i, j)], Complex64::new(want, 0.0));
            }
        }
    }

    #[test]
    fn kron_of_rectangular() {
        let a = ComplexMatrix::from_fn(1, 2, |_, j| Complex64::new(j as f64 + 1.0, 0.0));
        let b = ComplexMatrix::from_fn(2, 1, |i, _| Complex64::new(0.0, i as f64 + 1.0));
        let k = kron(&a, &b);
        assert_eq!((k.rows(), k.cols()), (2, 2));
        assert_eq!(k[(1, 1)], Complex64::new(0.0, 4.0));
    }

    #[test]
    fn partial_transpose_index_rule() {
        // |00><11| -> |01><10|
        let m = ComplexMatrix::basis_op(4, 0, 3);
        let pt = partial_transpose(&m, &sig(&[2, 2]), 1).unwrap();
        assert_eq!(pt, ComplexMatrix::basis_op(4, 1, 2));
        // Transposing A instead gives |10><01|.
        let pta = partial_transpose(&m, &sig(&[2, 2]), 0).unwrap();
        assert_eq!(pta, ComplexMatrix::basis_op(4, 2, 1));
    }

    #[test]
    fn partial_transpose_fixes_diagonals() {
        let d = ComplexMatrix::diag_real(&[0.1, 0.2, 0.3, 0.05, 0.05, 0.3]);
        assert_eq!(partial_transpose(&d, &sig(&[2, 3]), 1).unwrap(), d);
        assert_eq!(partial_transpose(&d, &sig(&[2, 3]), 0).unwrap(), d);
    }

    #[test]
    fn partial_transpose_composes_to_full_transpose() {
        let mut rng = seeded(3);
        let a = random_hermitian(6, &mut rng);
        let s = sig(&[2, 3]);
        let both = partial_transpose(&partial_transpose(&a, &s, 0).unwrap(), &s, 1).unwrap();
        assert_eq!(both, a.transpose());
    }

    #[test]
    fn partial_transpose_errors() {
        let m = ComplexMatrix::identity(6);
        assert!(matches!(
            partial_transpose(&m, &sig(&[2, 2]), 1),
            Err(Error::DimMismatch(_))
        ));
        assert!(matches!(
            partial_transpose(&m, &sig(&[2, 3]), 2),
            Err(Error::DimMismatch(_))
        ));
    }

    #[test]
    fn permute_swaps_product_state() {
        let a = ComplexMatrix::diag_real(&[1.0, 0.0]);
        let b = ComplexMatrix::diag_real(&[0.0, 1.0]);
        let ab = kron(&a, &b);
        let swapped = permute_subsystems(&ab, &sig(&[2, 2]), &[1, 0]).unwrap();
        assert_eq!(swapped, kron(&b, &a));
        assert_eq!(permute_subsystems(&ab, &sig(&[2, 2]), &[0, 1]).unwrap(), ab);
    }

    #[test]
    fn permute_matches_kron_reordering_with_mixed_dims() {
        let mut rng = seeded(5);
        let a = random_hermitian(2, &mut rng);
        let b = random_hermitian(3, &mut rng);
        let c = random_hermitian(2, &mut rng);
        let abc = kron(&kron(&a, &b), &c);
        // Output order (C, A, B) = input subsystems (2, 0, 1).
        let got = permute_subsystems(&abc, &sig(&[2, 3, 2]), &[2, 0, 1]).unwrap();
        let want = kron(&kron(&c, &a), &b);
        assert!(got.max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn permute_rejects_bad_permutations() {
        let m = ComplexMatrix::identity(8);
        let s = sig(&[2, 2, 2]);
        for bad in [&[0, 1][..], &[0, 1, 1], &[0, 1, 3]] {
            assert!(matches!(
                permute_subsystems(&m, &s, bad),
                Err(Error::InvalidPermutation(_))
            ));
        }
    }

    #[test]
    fn permute_preserves_spectrum() {
        let mut rng = seeded(9);
        let s = sig(&[2, 3, 2]);
        let a = random_hermitian(12, &mut rng);
        let before = hermitian_eigvals(&a).unwrap();
        let after = hermitian_eigvals(&permute_subsystems(&a, &s, &[1, 2, 0]).unwrap()).unwrap();
        for (x, y) in before.iter().zip(&after) {
            assert!((x - y).abs() < EIG_TOL * a.frobenius_norm());
        }
    }
}
