//! Dense complex linear algebra used by every other module.
//!
//! States are plain `DVector<Complex64>` and operators `DMatrix<Complex64>`.
//! Composite systems are described by an ordered list of subsystem
//! dimensions; the flat index is row-major over that list (the first
//! subsystem varies slowest), which is the convention of [`tensor`].

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CVector = DVector<C64>;
pub type CMatrix = DMatrix<C64>;

/// Relative tolerance for Hermiticity checks.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Density-operator eigenvalues in `[-EIGEN_CLIP, 0)` are clipped to zero.
pub const EIGEN_CLIP: f64 = 1e-10;
/// Eigenvalues below this are skipped in entropy sums.
pub const ENTROPY_SKIP: f64 = 1e-12;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Computational basis vector `|k>` of dimension `dim`.
pub fn basis(dim: usize, k: usize) -> CVector {
    let mut v = CVector::zeros(dim);
    v[k] = ONE;
    v
}

/// `<a|b>`, antilinear in the first argument.
pub fn inner(a: &CVector, b: &CVector) -> C64 {
    a.dotc(b)
}

pub fn norm_sqr(a: &CVector) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// Largest entrywise modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

/// `max |M - M^dag|` over all entries.
pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut dev = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

fn check_square(m: &CMatrix) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(())
}

pub fn check_hermitian(m: &CMatrix) -> Result<()> {
    check_square(m)?;
    let tolerance = HERMITIAN_TOL * max_abs(m);
    let deviation = hermitian_deviation(m);
    if deviation > tolerance {
        return Err(Error::NotHermitian {
            deviation,
            tolerance,
        });
    }
    Ok(())
}

/// Spectral decomposition of a Hermitian matrix, eigenvalues ascending and
/// eigenvectors stored as orthonormal columns in matching order.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: DVector<f64>,
    pub vectors: CMatrix,
}

pub fn hermitian_eig(m: &CMatrix) -> Result<HermitianEigen> {
    check_hermitian(m)?;
    // Remove the sub-tolerance anti-Hermitian part before handing off.
    let mut sym = (m + m.adjoint()) * C64::new(0.5, 0.0);
    // Entries this small underflow when squared inside the Householder steps.
    let floor = sym.camax() * f64::EPSILON.powi(4);
    sym.apply(|x| {
        if x.norm() < floor {
            *x = ZERO;
        }
    });
    let eig = SymmetricEigen::new(sym);
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = DVector::from_iterator(n, order.iter().map(|&k| eig.eigenvalues[k]));
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok(HermitianEigen { values, vectors })
}

/// Cached spectral propagator `t -> exp(-i H t)` for a fixed Hermitian `H`
/// (hbar = 1).
#[derive(Clone, Debug)]
pub struct Propagator {
    eigen: HermitianEigen,
}

impl Propagator {
    pub fn new(h: &CMatrix) -> Result<Self> {
        Ok(Self {
            eigen: hermitian_eig(h)?,
        })
    }

    pub fn dim(&self) -> usize {
        self.eigen.values.len()
    }

    pub fn eigen(&self) -> &HermitianEigen {
        &self.eigen
    }

    pub fn evolve(&self, t: f64, psi: &CVector) -> Result<CVector> {
        if psi.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: psi.len(),
            });
        }
        if t == 0.0 {
            return Ok(psi.clone());
        }
        let v = &self.eigen.vectors;
        let mut coeffs = v.ad_mul(psi);
        for (c, &e) in coeffs.iter_mut().zip(self.eigen.values.iter()) {
            *c *= C64::from_polar(1.0, -e * t);
        }
        Ok(v * coeffs)
    }

    /// The full matrix `exp(-i H t)`.
    pub fn unitary(&self, t: f64) -> CMatrix {
        let n = self.dim();
        if t == 0.0 {
            return CMatrix::identity(n, n);
        }
        let v = &self.eigen.vectors;
        let mut scaled = v.clone();
        for (k, &e) in self.eigen.values.iter().enumerate() {
            let phase = C64::from_polar(1.0, -e * t);
            for z in scaled.column_mut(k).iter_mut() {
                *z *= phase;
            }
        }
        scaled * v.adjoint()
    }
}

/// `exp(-i h t) psi` through the eigendecomposition of `h`.
pub fn evolve(h: &CMatrix, t: f64, psi: &CVector) -> Result<CVector> {
    check_square(h)?;
    if psi.len() != h.nrows() {
        return Err(Error::DimensionMismatch {
            expected: h.nrows(),
            found: psi.len(),
        });
    }
    if t == 0.0 {
        return Ok(psi.clone());
    }
    Propagator::new(h)?.evolve(t, psi)
}

/// `exp(A)` for anti-Hermitian `A`, computed from the spectrum of the
/// Hermitian matrix `iA`.
pub fn exp_anti_hermitian(a: &CMatrix) -> Result<CMatrix> {
    let h = a * I;
    // exp(A) = exp(-i (iA))
    Ok(Propagator::new(&h)?.unitary(1.0))
}

/// Kronecker product, left factor slowest.
pub trait Tensor {
    fn tensor(&self, other: &Self) -> Self;
}

impl Tensor for CVector {
    fn tensor(&self, other: &Self) -> Self {
        self.kronecker(other)
    }
}

impl Tensor for CMatrix {
    fn tensor(&self, other: &Self) -> Self {
        self.kronecker(other)
    }
}

pub fn tensor<T: Tensor>(a: &T, b: &T) -> T {
    a.tensor(b)
}

/// Tensor product of an ordered list of factors.
pub fn tensor_all<T: Tensor + Clone>(factors: &[T]) -> Option<T> {
    let (first, rest) = factors.split_first()?;
    Some(rest.iter().fold(first.clone(), |acc, f| acc.tensor(f)))
}

fn check_dims(dims: &[usize], size: usize) -> Result<()> {
    if dims.is_empty() || dims.contains(&0) || dims.iter().product::<usize>() != size {
        return Err(Error::InconsistentDims {
            dims: dims.to_vec(),
            size,
        });
    }
    Ok(())
}

fn check_subsystems(indices: &[usize], count: usize) -> Result<()> {
    for (pos, &index) in indices.iter().enumerate() {
        if index >= count || indices[..pos].contains(&index) {
            return Err(Error::InvalidSubsystem { index, count });
        }
    }
    Ok(())
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// Reorders subsystems: subsystem `k` of the result is subsystem `order[k]`
/// of the input. `order` must be a permutation.
pub fn permute_subsystems(psi: &CVector, dims: &[usize], order: &[usize]) -> Result<CVector> {
    check_dims(dims, psi.len())?;
    if order.len() != dims.len() {
        return Err(Error::DimensionMismatch {
            expected: dims.len(),
            found: order.len(),
        });
    }
    check_subsystems(order, dims.len())?;
    let new_dims: Vec<usize> = order.iter().map(|&k| dims[k]).collect();
    let old_strides = strides(dims);
    let new_strides = strides(&new_dims);
    let mut out = CVector::zeros(psi.len());
    let mut digits = vec![0usize; dims.len()];
    for (old_index, &amp) in psi.iter().enumerate() {
        let mut rem = old_index;
        for (k, d) in digits.iter_mut().enumerate() {
            *d = rem / old_strides[k];
            rem %= old_strides[k];
        }
        let new_index: usize = order
            .iter()
            .zip(&new_strides)
            .map(|(&src, &stride)| digits[src] * stride)
            .sum();
        out[new_index] = amp;
    }
    Ok(out)
}

/// Reshapes `psi` into a `d_keep x d_rest` matrix with the `keep`
/// subsystems (in the given order) as the row index.
fn bipartition(psi: &CVector, dims: &[usize], keep: &[usize]) -> Result<(CMatrix, Vec<usize>, Vec<usize>)> {
    check_dims(dims, psi.len())?;
    check_subsystems(keep, dims.len())?;
    let rest: Vec<usize> = (0..dims.len()).filter(|k| !keep.contains(k)).collect();
    let order: Vec<usize> = keep.iter().chain(rest.iter()).copied().collect();
    let permuted = permute_subsystems(psi, dims, &order)?;
    let d_keep: usize = keep.iter().map(|&k| dims[k]).product();
    let d_rest = psi.len() / d_keep;
    let m = CMatrix::from_fn(d_keep, d_rest, |i, j| permuted[i * d_rest + j]);
    Ok((m, order, rest))
}

/// Applies `op` to the subsystems listed in `targets` (in that order),
/// leaving the others untouched.
pub fn apply_local(op: &CMatrix, targets: &[usize], psi: &CVector, dims: &[usize]) -> Result<CVector> {
    let (m, order, _) = bipartition(psi, dims, targets)?;
    if op.ncols() != m.nrows() || op.nrows() != m.nrows() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            found: op.ncols(),
        });
    }
    let r = op * m;
    let d_rest = r.ncols();
    let flat = CVector::from_fn(psi.len(), |idx, _| r[(idx / d_rest, idx % d_rest)]);
    let permuted_dims: Vec<usize> = order.iter().map(|&k| dims[k]).collect();
    let mut inverse = vec![0; order.len()];
    for (pos, &src) in order.iter().enumerate() {
        inverse[src] = pos;
    }
    permute_subsystems(&flat, &permuted_dims, &inverse)
}

/// Density operator with an attached subsystem decomposition.
#[derive(Clone, Debug)]
pub struct DensityOperator {
    matrix: CMatrix,
    dims: Vec<usize>,
}

impl DensityOperator {
    pub fn new(matrix: CMatrix, dims: Vec<usize>) -> Result<Self> {
        check_hermitian(&matrix)?;
        check_dims(&dims, matrix.nrows())?;
        Ok(Self { matrix, dims })
    }

    /// `|psi><psi| / <psi|psi>`.
    pub fn from_pure(psi: &CVector, dims: Vec<usize>) -> Result<Self> {
        check_dims(&dims, psi.len())?;
        let n = norm_sqr(psi);
        if n == 0.0 {
            return Err(Error::ZeroVector);
        }
        let matrix = (psi * psi.adjoint()).unscale(n);
        Ok(Self { matrix, dims })
    }

    /// Reduced state of a pure `psi` on `keep`, without forming `|psi><psi|`.
    pub fn reduced_from_pure(psi: &CVector, dims: &[usize], keep: &[usize]) -> Result<Self> {
        let n = norm_sqr(psi);
        if n == 0.0 {
            return Err(Error::ZeroVector);
        }
        let (m, _, _) = bipartition(psi, dims, keep)?;
        let matrix = (&m * m.adjoint()).unscale(n);
        Ok(Self {
            matrix,
            dims: keep.iter().map(|&k| dims[k]).collect(),
        })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn trace(&self) -> f64 {
        self.matrix.diagonal().iter().map(|z| z.re).sum()
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        check_subsystems(keep, self.dims.len())?;
        let rest: Vec<usize> = (0..self.dims.len()).filter(|k| !keep.contains(k)).collect();
        let st = strides(&self.dims);
        let keep_dims: Vec<usize> = keep.iter().map(|&k| self.dims[k]).collect();
        let rest_dims: Vec<usize> = rest.iter().map(|&k| self.dims[k]).collect();
        let d_keep: usize = keep_dims.iter().product();
        let d_rest: usize = rest_dims.iter().product();
        let keep_st = strides(&keep_dims);
        let rest_st = strides(&rest_dims);
        // full index of (keep multi-index, rest multi-index)
        let full_index = |ik: usize, ir: usize| -> usize {
            let mut idx = 0;
            for (pos, &sub) in keep.iter().enumerate() {
                idx += (ik / keep_st[pos]) % keep_dims[pos] * st[sub];
            }
            for (pos, &sub) in rest.iter().enumerate() {
                idx += (ir / rest_st[pos]) % rest_dims[pos] * st[sub];
            }
            idx
        };
        let mut out = CMatrix::zeros(d_keep, d_keep);
        for ir in 0..d_rest {
            let rows: Vec<usize> = (0..d_keep).map(|ik| full_index(ik, ir)).collect();
            for (i, &a) in rows.iter().enumerate() {
                for (j, &b) in rows.iter().enumerate() {
                    out[(i, j)] += self.matrix[(a, b)];
                }
            }
        }
        Ok(Self {
            matrix: out,
            dims: keep_dims,
        })
    }

    /// Eigenvalues (ascending) with the small negative window clipped to 0.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let eig = hermitian_eig(&self.matrix)?;
        eig.values
            .iter()
            .map(|&mu| {
                if mu >= 0.0 {
                    Ok(mu)
                } else if mu >= -EIGEN_CLIP {
                    Ok(0.0)
                } else {
                    Err(Error::NegativeEigenvalue(mu))
                }
            })
            .collect()
    }

    /// Von Neumann entropy in bits.
    pub fn von_neumann_entropy(&self) -> Result<f64> {
        Ok(entropy_bits(self.eigenvalues()?))
    }
}

/// `-sum p log2 p`, skipping entries below [`ENTROPY_SKIP`].
pub fn entropy_bits<I: IntoIterator<Item = f64>>(probs: I) -> f64 {
    probs
        .into_iter()
        .filter(|&p| p >= ENTROPY_SKIP)
        .map(|p| -p * p.log2())
        .sum::<f64>()
        .max(0.0)
}

/// Squared Schmidt coefficients of a normalized bipartite pure state with
/// factor dimensions `da x db`, largest first.
pub fn schmidt_probabilities(psi: &CVector, da: usize, db: usize) -> Result<Vec<f64>> {
    if da * db != psi.len() {
        return Err(Error::InconsistentDims { dims: vec![da, db], size: psi.len() });
    }
    let total = norm_sqr(psi);
    if total == 0.0 {
        return Err(Error::ZeroVector);
    }
    let m = CMatrix::from_fn(da, db, |i, j| psi[i * db + j]);
    let mut p: Vec<f64> = m.singular_values().iter().map(|s| s * s / total).collect();
    p.sort_by(|a, b| b.total_cmp(a));
    Ok(p)
}

/// Entanglement entropy in bits across the `da | db` cut.
pub fn bipartite_entropy(psi: &CVector, da: usize, db: usize) -> Result<f64> {
    Ok(entropy_bits(schmidt_probabilities(psi, da, db)?))
}

/// Phase-insensitive overlap `|<psi|phi>|^2 / (<psi|psi><phi|phi>)`.
pub fn fidelity(psi: &CVector, phi: &CVector) -> Result<f64> {
    if psi.len() != phi.len() {
        return Err(Error::DimensionMismatch {
            expected: psi.len(),
            found: phi.len(),
        });
    }
    let np = norm_sqr(psi);
    let nf = norm_sqr(phi);
    if np == 0.0 || nf == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok((inner(psi, phi).norm_sqr() / (np * nf)).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn tiny_tail_entries_do_not_poison_spectrum() {
        // product state whose tail amplitudes sit near 1e-160
        let f = 60;
        let mut a = CVector::zeros(f);
        let mut amp = 1.0_f64;
        for n in 0..f {
            a[n] = C64::new(amp, 0.0);
            amp *= 0.25 / ((n + 1) as f64).sqrt();
        }
        let a = &a / C64::new(norm_sqr(&a).sqrt(), 0.0);
        let rho = DensityOperator::reduced_from_pure(&a.kronecker(&a), &[f, f], &[0]).unwrap();
        assert!(rho.von_neumann_entropy().unwrap() < 1e-12);
    }

    #[test]
    fn schmidt_route_matches_partial_trace() {
        let psi = CVector::from_vec(vec![c(0.3, 0.1), c(-0.2, 0.5), c(0.0, 0.4), c(0.6, -0.1), c(0.1, 0.1), c(-0.3, 0.0)]);
        let psi = &psi / c(psi.norm(), 0.0);
        let svd = bipartite_entropy(&psi, 2, 3).unwrap();
        let rho = DensityOperator::reduced_from_pure(&psi, &[2, 3], &[1]).unwrap();
        assert!((svd - rho.von_neumann_entropy().unwrap()).abs() < 1e-12);
        let p = schmidt_probabilities(&psi, 2, 3).unwrap();
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12 && p[0] >= p[1]);
        assert!(schmidt_probabilities(&psi, 2, 2).is_err());
    }

    fn diag(values: &[f64]) -> CMatrix {
        CMatrix::from_diagonal(&CVector::from_iterator(values.len(), values.iter().map(|&x| c(x, 0.0))))
    }

    #[test]
    fn inner_is_antilinear_in_first_argument() {
        let a = CVector::from_vec(vec![I]);
        let b = CVector::from_vec(vec![ONE]);
        assert_eq!(inner(&a, &b), c(0.0, -1.0));
    }

    #[test]
    fn eig_identity_and_diagonal() {
        let eig = hermitian_eig(&CMatrix::identity(3, 3)).unwrap();
        assert!(eig.values.iter().all(|&v| (v - 1.0).abs() < 1e-14));
        let eig = hermitian_eig(&diag(&[2.0, -1.0])).unwrap();
        assert_eq!(eig.values.as_slice(), &[-1.0, 2.0]);
    }

    #[test]
    fn eig_pauli_x() {
        let m = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
        let eig = hermitian_eig(&m).unwrap();
        assert!((eig.values[0] + 1.0).abs() < 1e-14);
        assert!((eig.values[1] - 1.0).abs() < 1e-14);
        let minus = CVector::from_vec(vec![c(FRAC_1_SQRT_2, 0.0), c(-FRAC_1_SQRT_2, 0.0)]);
        let plus = CVector::from_vec(vec![c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)]);
        assert!((fidelity(&eig.vectors.column(0).into_owned(), &minus).unwrap() - 1.0).abs() < 1e-12);
        assert!((fidelity(&eig.vectors.column(1).into_owned(), &plus).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eig_rejects_bad_input() {
        let rect = CMatrix::zeros(2, 3);
        assert!(matches!(hermitian_eig(&rect), Err(Error::NotSquare { .. })));
        let m = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, I, ZERO]);
        assert!(matches!(hermitian_eig(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn evolve_at_zero_time_is_exact() {
        let h = CMatrix::from_row_slice(2, 2, &[c(0.3, 0.0), c(0.1, 0.2), c(0.1, -0.2), c(-1.0, 0.0)]);
        let psi = CVector::from_vec(vec![c(0.6, 0.1), c(-0.2, 0.7)]);
        assert_eq!(evolve(&h, 0.0, &psi).unwrap(), psi);
    }

    #[test]
    fn evolve_number_eigenstate_phase() {
        let omega = 1.7;
        let h = diag(&[0.0, omega, 2.0 * omega, 3.0 * omega]);
        let t = 0.83;
        let out = evolve(&h, t, &basis(4, 2)).unwrap();
        let expected = C64::from_polar(1.0, -2.0 * omega * t);
        assert!((out[2] - expected).norm() < 1e-14);
        assert!(out[0].norm() + out[1].norm() + out[3].norm() < 1e-14);
    }

    #[test]
    fn evolve_dimension_mismatch() {
        let h = CMatrix::identity(3, 3);
        assert!(matches!(
            evolve(&h, 1.0, &basis(2, 0)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn tensor_basis_bookkeeping() {
        let v = basis(2, 0).tensor(&basis(2, 1));
        assert_eq!(v, basis(4, 1));
        let id = CMatrix::identity(2, 2).tensor(&CMatrix::identity(3, 3));
        assert_eq!(id, CMatrix::identity(6, 6));
        let f = 5;
        let atom = (basis(2, 0) + basis(2, 1)).unscale(2f64.sqrt());
        let v = tensor(&atom, &basis(f, 0));
        assert!((v[0].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((v[f].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((norm_sqr(&v) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn partial_trace_of_singlet() {
        let singlet = (basis(4, 1) - basis(4, 2)).unscale(2f64.sqrt());
        let rho = DensityOperator::from_pure(&singlet, vec![2, 2]).unwrap();
        for keep in [0, 1] {
            let r = rho.partial_trace(&[keep]).unwrap();
            assert!((r.matrix()[(0, 0)].re - 0.5).abs() < 1e-15);
            assert!((r.matrix()[(1, 1)].re - 0.5).abs() < 1e-15);
            assert!(r.matrix()[(0, 1)].norm() < 1e-15);
            assert!((r.von_neumann_entropy().unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn partial_trace_rejects_bad_index() {
        let rho = DensityOperator::from_pure(&basis(4, 0), vec![2, 2]).unwrap();
        assert!(matches!(rho.partial_trace(&[2]), Err(Error::InvalidSubsystem { .. })));
        assert!(matches!(rho.partial_trace(&[0, 0]), Err(Error::InvalidSubsystem { .. })));
    }

    #[test]
    fn entropy_examples() {
        let pure = DensityOperator::from_pure(&basis(3, 1), vec![3]).unwrap();
        assert!(pure.von_neumann_entropy().unwrap().abs() < 1e-12);
        let mixed = DensityOperator::new(diag(&[0.5, 0.5]), vec![2]).unwrap();
        assert!((mixed.von_neumann_entropy().unwrap() - 1.0).abs() < 1e-14);
        // -0.9 log2 0.9 - 0.1 log2 0.1 = 0.4689955935892812
        let skewed = DensityOperator::new(diag(&[0.9, 0.1]), vec![2]).unwrap();
        assert!((skewed.von_neumann_entropy().unwrap() - 0.46900).abs() < 1e-5);
    }

    #[test]
    fn eigenvalue_clipping_window() {
        let slightly = DensityOperator::new(diag(&[1.0 + 5e-11, -5e-11]), vec![2]).unwrap();
        assert_eq!(slightly.eigenvalues().unwrap()[0], 0.0);
        let bad = DensityOperator::new(diag(&[1.1, -0.1]), vec![2]).unwrap();
        assert!(matches!(bad.von_neumann_entropy(), Err(Error::NegativeEigenvalue(_))));
    }

    #[test]
    fn fidelity_examples() {
        let psi = CVector::from_vec(vec![c(0.3, 0.4), c(-0.1, 0.8)]);
        let phased = &psi * C64::from_polar(1.0, 1.234);
        assert!((fidelity(&psi, &phased).unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(fidelity(&basis(3, 0), &basis(3, 1)).unwrap(), 0.0);
        assert!(matches!(
            fidelity(&CVector::zeros(2), &basis(2, 0)),
            Err(Error::ZeroVector)
        ));
    }

    #[test]
    fn apply_local_matches_kronecker_operator() {
        let dims = [2, 3, 2];
        let psi = CVector::from_fn(12, |i, _| c(i as f64 * 0.1 + 0.05, (i as f64).sin()));
        let op = CMatrix::from_fn(4, 4, |i, j| c((i * 4 + j) as f64, (i as f64) - (j as f64)));
        // op on subsystems (0, 2) equals P^T (op x I_3) P with the middle factor moved last
        let direct = apply_local(&op, &[0, 2], &psi, &dims).unwrap();
        let moved = permute_subsystems(&psi, &dims, &[0, 2, 1]).unwrap();
        let full = op.tensor(&CMatrix::identity(3, 3));
        let back = permute_subsystems(&(full * moved), &[2, 2, 3], &[0, 2, 1]).unwrap();
        assert!((direct - back).norm() < 1e-12);
    }

    #[test]
    fn reduced_from_pure_matches_partial_trace() {
        let dims = vec![2, 3, 2];
        let psi = CVector::from_fn(12, |i, _| c((i as f64 * 0.7).cos(), (i as f64 * 1.3).sin()));
        let full = DensityOperator::from_pure(&psi, dims.clone()).unwrap();
        for keep in [vec![0], vec![1], vec![2], vec![0, 2], vec![2, 0]] {
            let a = full.partial_trace(&keep).unwrap();
            let b = DensityOperator::reduced_from_pure(&psi, &dims, &keep).unwrap();
            assert!((a.matrix() - b.matrix()).norm() < 1e-13, "keep {keep:?}");
            assert!((a.trace() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn exp_anti_hermitian_is_unitary() {
        let a = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.3), c(0.5, 0.1), c(-0.5, 0.1), c(0.0, -0.2)]);
        let u = exp_anti_hermitian(&a).unwrap();
        assert!((u.adjoint() * &u - CMatrix::identity(2, 2)).norm() < 1e-13);
    }
}
