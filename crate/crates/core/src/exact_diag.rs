//! Dense matrix realization of operator sums and Hermitian eigensolves.
//!
//! Basis state `b` is a bit string; bit `k` set means qubit `k` is spin down
//! (`σ^z = −1`). A canonical string `X^x Z^z` sends `|b⟩` to
//! `(−1)^{|b ∧ z|} |b ⊕ x⟩`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::par;
use crate::pauli::{commutator, OperatorSum, PauliString, DEFAULT_PRUNE};
use crate::spectrum::Spectrum;

/// Largest register that may be realized densely (dimension 16384).
pub const MAX_DENSE_SITES: usize = 14;

/// Relative Hermiticity tolerance accepted by [`eig_hermitian`].
pub const HERMITIAN_TOL: f64 = 1e-10;

fn guard(n_sites: usize) -> Result<()> {
    if n_sites > MAX_DENSE_SITES {
        return Err(Error::GuardExceeded {
            what: "dense matrix sites",
            requested: n_sites,
            limit: MAX_DENSE_SITES,
        });
    }
    Ok(())
}

#[inline]
fn z_sign(b: u64, z: u64) -> f64 {
    if (b & z).count_ones() & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// The `2^n × 2^n` matrix of `op`.
pub fn to_matrix(op: &OperatorSum) -> Result<DMatrix<Complex64>> {
    guard(op.n_sites())?;
    let dim = 1usize << op.n_sites();
    let terms: Vec<(u64, u64, Complex64)> = op.terms().collect();
    let columns = par::map_range(0..dim, |b| {
        let b = b as u64;
        terms
            .iter()
            .map(|&(x, z, c)| ((b ^ x) as usize, c * z_sign(b, z)))
            .collect::<Vec<_>>()
    });
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    for (col, entries) in columns.into_iter().enumerate() {
        for (row, v) in entries {
            m[(row, col)] += v;
        }
    }
    Ok(m)
}

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Largest entry of `M − M†`.
pub fn hermiticity_deviation(m: &DMatrix<Complex64>) -> f64 {
    let mut worst = 0.0f64;
    for j in 0..m.ncols() {
        for i in 0..=j.min(m.nrows().saturating_sub(1)) {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

fn check_hermitian(m: &DMatrix<Complex64>) -> Result<()> {
    if !m.is_square() {
        return Err(Error::InvalidArgument("matrix is not square".into()));
    }
    let dev = hermiticity_deviation(m);
    if dev > HERMITIAN_TOL * max_abs(m).max(1.0) {
        return Err(Error::NotHermitian { deviation: dev });
    }
    Ok(())
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn eig_hermitian(m: &DMatrix<Complex64>) -> Result<Spectrum> {
    check_hermitian(m)?;
    if m.nrows() == 0 {
        return Spectrum::new(Vec::new());
    }
    Spectrum::new(m.clone().symmetric_eigenvalues().iter().copied().collect())
}

/// Eigenvalues (ascending) and matching eigenvector columns.
pub fn eigh(m: &DMatrix<Complex64>) -> Result<(Vec<f64>, DMatrix<Complex64>)> {
    check_hermitian(m)?;
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(m.nrows(), order.len(), |i, j| {
        eig.eigenvectors[(i, order[j])]
    });
    Ok((values, vectors))
}

/// Whether `op` conserves the number of down spins on the qubits of `mask`.
pub fn conserves_magnetization(op: &OperatorSum, mask: u64) -> Result<bool> {
    let mut total = OperatorSum::zero(op.n_sites())?;
    for k in 0..op.n_sites() {
        if mask & (1u64 << k) != 0 {
            total.add_string(
                &PauliString::z_string(op.n_sites(), 1u64 << k)?,
                Complex64::new(1.0, 0.0),
            )?;
        }
    }
    Ok(commutator(op, &total)?.pruned(DEFAULT_PRUNE).is_empty())
}

/// Spectrum assembled from the blocks of fixed `popcount(b ∧ mask)`.
///
/// `op` must conserve that count; this is checked algebraically first.
pub fn sector_spectrum(op: &OperatorSum, mask: u64) -> Result<Spectrum> {
    guard(op.n_sites())?;
    if !conserves_magnetization(op, mask)? {
        return Err(Error::InvalidArgument(
            "operator does not conserve the requested magnetization".into(),
        ));
    }
    let dim = 1usize << op.n_sites();
    let sectors = mask.count_ones() as usize + 1;
    let mut members: Vec<Vec<u64>> = vec![Vec::new(); sectors];
    let mut slot = vec![0usize; dim];
    for b in 0..dim as u64 {
        let s = (b & mask).count_ones() as usize;
        slot[b as usize] = members[s].len();
        members[s].push(b);
    }
    let terms: Vec<(u64, u64, Complex64)> = op.terms().collect();
    let blocks = par::map_slice(&members, |states| -> Result<Vec<f64>> {
        let n = states.len();
        let sector = states.first().map(|&b| (b & mask).count_ones());
        let mut m = DMatrix::<Complex64>::zeros(n, n);
        for (col, &b) in states.iter().enumerate() {
            for &(x, z, c) in &terms {
                let r = b ^ x;
                // strings leaving the sector cancel in the sum
                if Some((r & mask).count_ones()) == sector {
                    m[(slot[r as usize], col)] += c * z_sign(b, z);
                }
            }
        }
        Ok(eig_hermitian(&m)?.values().to_vec())
    });
    let mut all = Vec::with_capacity(dim);
    for block in blocks {
        all.extend(block?);
    }
    Spectrum::new(all)
}

/// Full spectrum of a Hermitian operator sum.
///
/// Uses magnetization blocks when the operator conserves the total count of
/// down spins, or the count on all qubits but 0; dense otherwise.
pub fn spectrum(op: &OperatorSum) -> Result<Spectrum> {
    guard(op.n_sites())?;
    let n = op.n_sites();
    if n >= 6 {
        let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        for mask in [all, all & !1] {
            if conserves_magnetization(op, mask)? {
                return sector_spectrum(op, mask);
            }
        }
    }
    eig_hermitian(&to_matrix(op)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{Pauli, PauliString};

    fn single(p: Pauli) -> OperatorSum {
        OperatorSum::from_string(
            &PauliString::single(1, 0, p).unwrap(),
            Complex64::new(1.0, 0.0),
        )
        .unwrap()
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn single_site_matrices() {
        let z = to_matrix(&single(Pauli::Z)).unwrap();
        assert_eq!(
            z,
            DMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1.0)])
        );
        let x = to_matrix(&single(Pauli::X)).unwrap();
        assert_eq!(
            x,
            DMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)])
        );
        let y = to_matrix(&single(Pauli::Y)).unwrap();
        let i = Complex64::new(0.0, 1.0);
        assert_eq!(y, DMatrix::from_row_slice(2, 2, &[c(0.0), -i, i, c(0.0)]));
    }

    #[test]
    fn small_eigensolves() {
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(3.0), c(1.0), c(2.0)]));
        assert_eq!(eig_hermitian(&d).unwrap().values(), &[1.0, 2.0, 3.0]);
        let x = to_matrix(&single(Pauli::X)).unwrap();
        let s = eig_hermitian(&x).unwrap();
        assert!((s.values()[0] + 1.0).abs() < 1e-14 && (s.values()[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = DMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(0.0), c(0.0)]);
        assert!(matches!(eig_hermitian(&m), Err(Error::NotHermitian { .. })));
        let sp = crate::pauli::sigma_plus(1, 0).unwrap();
        assert!(eig_hermitian(&to_matrix(&sp).unwrap()).is_err());
    }

    #[test]
    fn dense_guard() {
        let big = OperatorSum::identity(15).unwrap();
        assert!(matches!(to_matrix(&big), Err(Error::GuardExceeded { .. })));
        assert!(spectrum(&big).is_err());
    }

    #[test]
    fn sectors_agree_with_dense() {
        // XX chain of 6 sites plus a field: conserves total magnetization
        let n = 6;
        let mut op = OperatorSum::zero(n).unwrap();
        for k in 0..n - 1 {
            for p in [Pauli::X, Pauli::Y] {
                let a = PauliString::single(n, k, p).unwrap();
                let b = PauliString::single(n, k + 1, p).unwrap();
                op.add_string(&a.product(&b).unwrap(), c(0.5 + k as f64 * 0.1))
                    .unwrap();
            }
            op.add_string(&PauliString::single(n, k, Pauli::Z).unwrap(), c(0.3))
                .unwrap();
        }
        let mask = (1u64 << n) - 1;
        assert!(conserves_magnetization(&op, mask).unwrap());
        let dense = eig_hermitian(&to_matrix(&op).unwrap()).unwrap();
        let blocked = sector_spectrum(&op, mask).unwrap();
        let m = crate::spectrum::spectra_match(&dense, &blocked, 1, 1e-10).unwrap();
        assert!(m.matched, "{}", m.max_dev);

        let mut broken = op.clone();
        broken
            .add_string(&PauliString::single(n, 0, Pauli::X).unwrap(), c(1.0))
            .unwrap();
        assert!(!conserves_magnetization(&broken, mask).unwrap());
        assert!(sector_spectrum(&broken, mask).is_err());
    }

    #[test]
    fn eigenpairs_have_small_residual() {
        let n = 3;
        let mut op = OperatorSum::zero(n).unwrap();
        op.add_string(&PauliString::new(n, 0b011, 0b100, 0).unwrap(), c(0.7))
            .unwrap();
        op.add_string(&PauliString::new(n, 0b110, 0b110, 0).unwrap(), c(-0.4))
            .unwrap();
        op.add_string(&PauliString::new(n, 0b000, 0b101, 0).unwrap(), c(1.1))
            .unwrap();
        let m = to_matrix(&op).unwrap();
        let (vals, vecs) = eigh(&m).unwrap();
        for (k, &lam) in vals.iter().enumerate() {
            let v = vecs.column(k);
            let r = (&m * v - v * Complex64::new(lam, 0.0)).norm();
            assert!(r < 1e-12, "residual {r}");
        }
    }
}
