//! Dense complex kernels: Kronecker products, factor swaps, spectral and
//! singular value decompositions, polar parts and seeded Ginibre matrices.
//!
//! Tensor elements of `M_m ⊗ M_n` are stored with the first factor outer:
//! `S ⊗ T` is `kron(S, T)` and the pair of row indices `(i, k)` flattens to
//! `i * n + k`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Dense complex matrix. Entries are finite whenever the matrix was built
/// from external data.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

/// Dimensions `(m, n)` of the factors of `M_m ⊗ M_n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct FactorDims {
    pub m: usize,
    pub n: usize,
}

impl FactorDims {
    pub fn new(m: usize, n: usize) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::dims("FactorDims::new", "m, n >= 1", format!("({m}, {n})")));
        }
        Ok(Self { m, n })
    }

    /// Dimension `m * n` of the tensor product algebra.
    pub fn total(&self) -> usize {
        self.m * self.n
    }

    pub fn swapped(&self) -> Self {
        Self { m: self.n, n: self.m }
    }
}

impl fmt::Display for FactorDims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.m, self.n)
    }
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    /// Matrix unit `E_ij` in `M_n` (zero-based indices).
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m.0[(i, j)] = ONE;
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self(DMatrix::from_fn(rows, cols, f))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { C64::new(diag[i], 0.0) } else { ZERO })
    }

    /// Builds a matrix from row-major entries, rejecting non-finite values.
    pub fn from_row_major(rows: usize, cols: usize, entries: Vec<C64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::dims("from_row_major", rows * cols, entries.len()));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self(DMatrix::from_row_slice(rows, cols, &entries)))
    }

    pub fn from_inner(inner: DMatrix<C64>) -> Self {
        Self(inner)
    }

    pub fn inner(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<C64> {
        self.0
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, value: C64) {
        self.0[(i, j)] = value;
    }

    pub fn to_row_major(&self) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.push(self.0[(i, j)]);
            }
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self(&self.0 * factor)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Column-stacking vectorization: entry `(i, j)` lands at `i + j * rows`.
    pub fn vectorize(&self) -> DVector<C64> {
        DVector::from_column_slice(self.0.as_slice())
    }

    pub fn unvectorize(v: &DVector<C64>, rows: usize, cols: usize) -> Self {
        Self(DMatrix::from_column_slice(rows, cols, v.as_slice()))
    }

    pub fn hermitian_part(&self) -> Self {
        Self((&self.0 + self.0.adjoint()) * C64::new(0.5, 0.0))
    }

    pub fn anti_hermitian_part(&self) -> Self {
        Self((&self.0 - self.0.adjoint()) * C64::new(0.5, 0.0))
    }

    /// Embeds `self` in the top-left corner of a `rows x cols` zero matrix.
    pub fn embed(&self, rows: usize, cols: usize) -> Self {
        let mut out = Self::zeros(rows, cols);
        out.0
            .view_mut((0, 0), (self.rows(), self.cols()))
            .copy_from(&self.0);
        out
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMatrix {}x{} ", self.rows(), self.cols())?;
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for i in 0..self.rows() {
            write!(f, "  ")?;
            for j in 0..self.cols() {
                let z = self.0[(i, j)];
                write!(f, "{:>9.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl<'a> Add for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: Self) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl<'a> Sub for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: Self) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

impl<'a> Mul for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: Self) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl<'a> Neg for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix(-&self.0)
    }
}

/// Largest entrywise deviation between two matrices of the same shape.
///
/// Shape mismatches count as an infinite defect.
pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return f64::INFINITY;
    }
    a.0.iter()
        .zip(b.0.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Kronecker product; entry `((i,k),(j,l))` is `a[i,j] * b[k,l]`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ar, ac) = (a.rows(), a.cols());
    let (br, bc) = (b.rows(), b.cols());
    let mut out = DMatrix::zeros(ar * br, ac * bc);
    for j in 0..ac {
        for i in 0..ar {
            let aij = a.0[(i, j)];
            if aij == ZERO {
                continue;
            }
            for l in 0..bc {
                for k in 0..br {
                    out[(i * br + k, j * bc + l)] = aij * b.0[(k, l)];
                }
            }
        }
    }
    ComplexMatrix(out)
}

/// Conjugates `u ∈ M_m ⊗ M_n` by the perfect shuffle, so that
/// `kron(S, T)` maps to `kron(T, S)`.
pub fn swap_factors(u: &ComplexMatrix, dims: FactorDims) -> Result<ComplexMatrix> {
    let FactorDims { m, n } = dims;
    let d = m * n;
    if u.rows() != d || u.cols() != d {
        return Err(Error::dims(
            "swap_factors",
            format!("{d}x{d}"),
            format!("{}x{}", u.rows(), u.cols()),
        ));
    }
    let mut out = DMatrix::zeros(d, d);
    for i in 0..m {
        for k in 0..n {
            for j in 0..m {
                for l in 0..n {
                    out[(k * m + i, l * m + j)] = u.0[(i * n + k, j * n + l)];
                }
            }
        }
    }
    Ok(ComplexMatrix(out))
}

/// Largest singular value.
pub fn operator_norm(a: &ComplexMatrix) -> f64 {
    if a.rows() == 0 || a.cols() == 0 {
        return 0.0;
    }
    a.0.singular_values().iter().copied().fold(0.0, f64::max)
}

/// Spectral decomposition of a Hermitian matrix, eigenvalues ascending.
/// Column `c` of the returned matrix is the eigenvector of eigenvalue `c`.
pub fn hermitian_eigen(a: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    if !a.is_square() {
        return Err(Error::dims(
            "hermitian_eigen",
            "square matrix",
            format!("{}x{}", a.rows(), a.cols()),
        ));
    }
    let deviation = max_abs_diff(a, &a.adjoint());
    if deviation > 1e-12 * a.max_abs().max(1.0) {
        return Err(Error::NotHermitian(deviation));
    }
    let eig = a.hermitian_part().0.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]));
    let values = order.iter().map(|&c| eig.eigenvalues[c]).collect();
    let n = a.rows();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, ComplexMatrix(vectors)))
}

/// Smallest eigenvalue of the Hermitian part; `+inf` for empty input.
pub fn min_hermitian_eigenvalue(a: &ComplexMatrix) -> f64 {
    a.hermitian_part()
        .0
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Leading singular triple: `a * right = sigma * left`.
#[derive(Clone, Debug)]
pub struct SingularPair {
    pub sigma: f64,
    pub left: DVector<C64>,
    pub right: DVector<C64>,
}

pub fn top_singular_pair(a: &ComplexMatrix) -> SingularPair {
    let svd = a.0.clone().svd(true, true);
    let (u, v_t) = (svd.u.expect("requested U"), svd.v_t.expect("requested V^*"));
    let mut best = 0;
    for (idx, s) in svd.singular_values.iter().enumerate() {
        if *s > svd.singular_values[best] {
            best = idx;
        }
    }
    let left = u.column(best).into_owned();
    let right = v_t.row(best).adjoint();
    SingularPair {
        sigma: svd.singular_values[best],
        left,
        right,
    }
}

/// Unitary polar factor `U` of a square `g`, so that `Re Tr(g^* U)` equals
/// the trace norm of `g`. On the kernel of `g` the factor is completed to a
/// unitary by the singular vectors the decomposition returns.
pub fn polar_unitary(g: &ComplexMatrix) -> ComplexMatrix {
    let svd = g.0.clone().svd(true, true);
    let (u, v_t) = (svd.u.expect("requested U"), svd.v_t.expect("requested V^*"));
    ComplexMatrix(u * v_t)
}

/// Sum of singular values.
pub fn trace_norm(a: &ComplexMatrix) -> f64 {
    a.0.singular_values().iter().sum()
}

/// Number of singular values above `rel_threshold * sigma_max`.
pub fn numerical_rank(a: &ComplexMatrix, rel_threshold: f64) -> usize {
    let sv = a.0.singular_values();
    let top = sv.iter().copied().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_threshold * top).count()
}

/// Standard complex Gaussian sample: real and imaginary parts are
/// independent `N(0, 1/2)`, so `E|z|^2 = 1` and `E|z| = sqrt(pi)/2`.
pub fn complex_gaussian<R: rand::Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn ginibre_from_rng<R: rand::Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    let mut entries = Vec::with_capacity(rows * cols);
    for _ in 0..rows * cols {
        entries.push(complex_gaussian(rng));
    }
    ComplexMatrix(DMatrix::from_row_slice(rows, cols, &entries))
}

/// Ginibre matrix with i.i.d. standard complex Gaussian entries,
/// deterministic in `seed`.
pub fn random_ginibre(rows: usize, cols: usize, seed: u64) -> ComplexMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ginibre_from_rng(&mut rng, rows, cols)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn kron_identities() {
        assert_eq!(
            kron(&ComplexMatrix::identity(2), &ComplexMatrix::identity(2)),
            ComplexMatrix::identity(4)
        );
        let k = kron(&ComplexMatrix::unit(2, 0, 0), &ComplexMatrix::unit(2, 0, 1));
        assert_eq!(k, ComplexMatrix::unit(4, 0, 1));
        let k = kron(
            &ComplexMatrix::from_real_diagonal(&[1.0, 2.0]),
            &ComplexMatrix::from_real_diagonal(&[3.0, 4.0]),
        );
        assert_eq!(k, ComplexMatrix::from_real_diagonal(&[3.0, 4.0, 6.0, 8.0]));
    }

    #[test]
    fn kron_rectangular_layout() {
        let a = ComplexMatrix::from_row_major(1, 2, vec![c(1.0), c(2.0)]).unwrap();
        let b = ComplexMatrix::from_row_major(2, 1, vec![c(3.0), c(5.0)]).unwrap();
        let k = kron(&a, &b);
        assert_eq!(k.to_row_major(), vec![c(3.0), c(6.0), c(5.0), c(10.0)]);
    }

    #[test]
    fn swap_factors_cases() {
        let e11 = ComplexMatrix::unit(2, 0, 0);
        let e22 = ComplexMatrix::unit(2, 1, 1);
        let dims = FactorDims::new(2, 2).unwrap();
        assert_eq!(swap_factors(&kron(&e11, &e22), dims).unwrap(), kron(&e22, &e11));

        let d23 = FactorDims::new(2, 3).unwrap();
        let u = random_ginibre(6, 6, 3);
        let back = swap_factors(&swap_factors(&u, d23).unwrap(), d23.swapped()).unwrap();
        assert_eq!(back, u);
        assert_eq!(swap_factors(&ComplexMatrix::identity(6), d23).unwrap(), ComplexMatrix::identity(6));
        assert!(swap_factors(&u, FactorDims::new(2, 2).unwrap()).is_err());
    }

    #[test]
    fn operator_norm_examples() {
        assert!((operator_norm(&ComplexMatrix::identity(3)) - 1.0).abs() < 1e-12);
        let d = ComplexMatrix::from_real_diagonal(&[1.0, -2.0, 0.5]);
        assert!((operator_norm(&d) - 2.0).abs() < 1e-12);
        let flip = &ComplexMatrix::unit(2, 0, 1) + &ComplexMatrix::unit(2, 1, 0);
        assert!((operator_norm(&flip) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hermitian_eigen_examples() {
        let (vals, vecs) = hermitian_eigen(&ComplexMatrix::identity(2)).unwrap();
        assert_eq!(vals.len(), 2);
        assert!(vals.iter().all(|v| (v - 1.0).abs() < 1e-12));
        let gram = &vecs.adjoint() * &vecs;
        assert!(max_abs_diff(&gram, &ComplexMatrix::identity(2)) < 1e-12);

        let flip = &ComplexMatrix::unit(2, 0, 1) + &ComplexMatrix::unit(2, 1, 0);
        let (vals, _) = hermitian_eigen(&flip).unwrap();
        assert!((vals[0] + 1.0).abs() < 1e-12 && (vals[1] - 1.0).abs() < 1e-12);

        let (vals, _) = hermitian_eigen(&ComplexMatrix::zeros(3, 3)).unwrap();
        assert!(vals.iter().all(|v| v.abs() < 1e-15));

        assert!(matches!(
            hermitian_eigen(&ComplexMatrix::unit(2, 0, 1)),
            Err(Error::NotHermitian(_))
        ));
    }

    #[test]
    fn hermitian_eigen_reconstructs() {
        let g = random_ginibre(5, 5, 11);
        let h = g.hermitian_part();
        let (vals, v) = hermitian_eigen(&h).unwrap();
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        let lambda = ComplexMatrix::from_real_diagonal(&vals);
        let rebuilt = &(&v * &lambda) * &v.adjoint();
        assert!(max_abs_diff(&rebuilt, &h) <= 1e-10 * operator_norm(&h));
    }

    #[test]
    fn top_singular_pair_examples() {
        let p = top_singular_pair(&ComplexMatrix::from_real_diagonal(&[3.0, 1.0]));
        assert!((p.sigma - 3.0).abs() < 1e-12);
        assert!((p.left[0].norm() - 1.0).abs() < 1e-12 && (p.right[0].norm() - 1.0).abs() < 1e-12);

        let p = top_singular_pair(&ComplexMatrix::unit(2, 0, 1));
        assert!((p.sigma - 1.0).abs() < 1e-12);
        assert!((p.left[0].norm() - 1.0).abs() < 1e-12);
        assert!((p.right[1].norm() - 1.0).abs() < 1e-12);

        let two = ComplexMatrix::identity(2).scale(c(2.0));
        let p = top_singular_pair(&two);
        assert!((p.sigma - 2.0).abs() < 1e-12);
        assert!((&p.left - &p.right).norm() < 1e-12);
    }

    #[test]
    fn top_singular_pair_relation_random() {
        let a = random_ginibre(6, 6, 5);
        let p = top_singular_pair(&a);
        let lhs = a.inner() * &p.right;
        let rhs = &p.left * C64::new(p.sigma, 0.0);
        assert!((lhs - rhs).norm() <= 1e-10 * p.sigma);
        assert!((p.sigma - operator_norm(&a)).abs() < 1e-12 * p.sigma);
    }

    #[test]
    fn polar_unitary_examples() {
        let u = polar_unitary(&ComplexMatrix::identity(2));
        assert!(max_abs_diff(&u, &ComplexMatrix::identity(2)) < 1e-12);

        let u = polar_unitary(&ComplexMatrix::from_real_diagonal(&[2.0, -3.0]));
        assert!(max_abs_diff(&u, &ComplexMatrix::from_real_diagonal(&[1.0, -1.0])) < 1e-12);

        let e12 = ComplexMatrix::unit(2, 0, 1);
        let u = polar_unitary(&e12);
        assert!((u.get(0, 1) - ONE).norm() < 1e-12);
        assert!(((&e12.adjoint() * &u).trace().re - 1.0).abs() < 1e-12);
        assert!(max_abs_diff(&(&u.adjoint() * &u), &ComplexMatrix::identity(2)) < 1e-12);
    }

    #[test]
    fn polar_unitary_attains_trace_norm() {
        let g = random_ginibre(4, 4, 8);
        let u = polar_unitary(&g);
        let pairing = (&g.adjoint() * &u).trace().re;
        assert!((pairing - trace_norm(&g)).abs() < 1e-10 * trace_norm(&g));
        assert!((operator_norm(&u) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ginibre_determinism() {
        assert_eq!(random_ginibre(3, 4, 9), random_ginibre(3, 4, 9));
        assert_ne!(random_ginibre(3, 4, 9), random_ginibre(3, 4, 10));
    }

    #[test]
    fn ginibre_mean_modulus() {
        // E|z| = sqrt(pi)/2 for unit-variance complex Gaussians.
        let sample = random_ginibre(100, 100, 2024);
        let mean = sample.inner().iter().map(|z| z.norm()).sum::<f64>() / 1e4;
        let expected = std::f64::consts::PI.sqrt() / 2.0;
        assert!((mean - expected).abs() < 0.05 * expected, "mean {mean}");
        let second = sample.inner().iter().map(|z| z.norm_sqr()).sum::<f64>() / 1e4;
        assert!((second - 1.0).abs() < 0.05);
    }

    #[test]
    fn from_row_major_rejects_bad_input() {
        assert_eq!(
            ComplexMatrix::from_row_major(1, 1, vec![C64::new(f64::NAN, 0.0)]),
            Err(Error::NonFinite)
        );
        assert!(ComplexMatrix::from_row_major(2, 2, vec![ONE]).is_err());
        assert!(FactorDims::new(0, 2).is_err());
    }

    #[test]
    fn rank_and_embed() {
        let a = kron(&random_ginibre(2, 1, 1), &random_ginibre(1, 2, 2));
        assert_eq!(numerical_rank(&a, 1e-10), 1);
        let e = ComplexMatrix::identity(2).embed(3, 3);
        assert_eq!(e.get(2, 2), ZERO);
        assert_eq!(e.get(1, 1), ONE);
    }
}
