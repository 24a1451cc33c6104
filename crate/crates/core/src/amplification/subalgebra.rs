//! Unital *-subalgebras of `M_n`, their trace-preserving conditional
//! expectations, and the restriction checks built on them.
//!
//! The expectation is the Hilbert-Schmidt orthogonal projection onto the
//! span of the basis. For a unital *-subalgebra this is the unique
//! trace-preserving conditional expectation.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{amplify_right, block_amplify, left_amplify_element, AmplifiedOp};
use crate::duality::{dual_functional, left_slice, Functional, TensorElement};
use crate::error::{Error, Result};
use crate::linalg::{ginibre_from_rng, kron, max_abs_diff, numerical_rank, ComplexMatrix, FactorDims, C64, ZERO};
use crate::superop::SuperOp;

const CLOSURE_TOL: f64 = 1e-10;

fn hs_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> C64 {
    a.inner().iter().zip(b.inner().iter()).map(|(x, y)| x.conj() * y).sum()
}

#[derive(Clone, Debug)]
pub struct SubalgebraEmbedding {
    ambient_dim: usize,
    basis: Vec<ComplexMatrix>,
    orthonormal: Vec<ComplexMatrix>,
    /// Inverse Gram matrix of `basis`, for coordinates in the given basis.
    gram_inverse: DMatrix<C64>,
    expectation: SuperOp,
}

impl SubalgebraEmbedding {
    /// Validates that `basis` is linearly independent and spans a unital
    /// *-subalgebra of `M_n`.
    pub fn new(ambient_dim: usize, basis: Vec<ComplexMatrix>) -> Result<Self> {
        let n = ambient_dim;
        if n == 0 || basis.is_empty() {
            return Err(Error::InvalidEmbedding("empty basis".into()));
        }
        if basis.iter().any(|b| b.rows() != n || b.cols() != n) {
            return Err(Error::InvalidEmbedding(format!("basis elements must be {n}x{n}")));
        }
        let r = basis.len();
        let gram = DMatrix::from_fn(r, r, |a, b| hs_inner(&basis[a], &basis[b]));
        if numerical_rank(&ComplexMatrix::from_inner(gram.clone()), 1e-10) < r {
            return Err(Error::InvalidEmbedding("basis is linearly dependent".into()));
        }
        let gram_inverse = gram
            .try_inverse()
            .ok_or_else(|| Error::InvalidEmbedding("singular Gram matrix".into()))?;

        let mut orthonormal: Vec<ComplexMatrix> = Vec::with_capacity(r);
        for b in &basis {
            let mut v = b.clone();
            // Two passes of Gram-Schmidt.
            for _ in 0..2 {
                for q in &orthonormal {
                    v = &v - &q.scale(hs_inner(q, &v));
                }
            }
            let norm = v.frobenius_norm();
            orthonormal.push(v.scale(C64::new(1.0 / norm, 0.0)));
        }

        let mut nat = DMatrix::zeros(n * n, n * n);
        for q in &orthonormal {
            let v = q.vectorize();
            nat += &v * v.adjoint();
        }
        let expectation = SuperOp::from_natural(ComplexMatrix::from_inner(nat), n)?;

        let emb = Self {
            ambient_dim: n,
            basis,
            orthonormal,
            gram_inverse,
            expectation,
        };
        emb.validate()?;
        Ok(emb)
    }

    fn span_defect(&self, x: &ComplexMatrix) -> f64 {
        max_abs_diff(x, &self.expectation.apply_unchecked(x)) / x.max_abs().max(1.0)
    }

    fn validate(&self) -> Result<()> {
        let id = ComplexMatrix::identity(self.ambient_dim);
        if self.span_defect(&id) > CLOSURE_TOL {
            return Err(Error::InvalidEmbedding("span does not contain the identity".into()));
        }
        for a in &self.basis {
            if self.span_defect(&a.adjoint()) > CLOSURE_TOL {
                return Err(Error::InvalidEmbedding("span is not closed under adjoints".into()));
            }
            for b in &self.basis {
                if self.span_defect(&(a * b)) > CLOSURE_TOL {
                    return Err(Error::InvalidEmbedding("span is not closed under products".into()));
                }
            }
        }
        Ok(())
    }

    /// All of `M_n`, spanned by matrix units.
    pub fn full(n: usize) -> Result<Self> {
        let mut basis = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                basis.push(ComplexMatrix::unit(n, i, j));
            }
        }
        Self::new(n, basis)
    }

    pub fn diagonal(n: usize) -> Result<Self> {
        Self::new(n, (0..n).map(|i| ComplexMatrix::unit(n, i, i)).collect())
    }

    /// `M_{b_1} ⊕ ... ⊕ M_{b_r}` embedded block-diagonally.
    pub fn block_diagonal(blocks: &[usize]) -> Result<Self> {
        let n: usize = blocks.iter().sum();
        if blocks.contains(&0) {
            return Err(Error::InvalidEmbedding("blocks must be nonempty".into()));
        }
        let mut basis = Vec::new();
        let mut offset = 0;
        for &b in blocks {
            for i in 0..b {
                for j in 0..b {
                    basis.push(ComplexMatrix::unit(n, offset + i, offset + j));
                }
            }
            offset += b;
        }
        Self::new(n, basis)
    }

    pub fn scalars(n: usize) -> Result<Self> {
        Self::new(n, vec![ComplexMatrix::identity(n)])
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn basis(&self) -> &[ComplexMatrix] {
        &self.basis
    }

    /// Hilbert-Schmidt orthonormal basis of the same span.
    pub fn orthonormal_basis(&self) -> &[ComplexMatrix] {
        &self.orthonormal
    }

    pub fn expectation(&self) -> &SuperOp {
        &self.expectation
    }

    /// Coordinates of `x` in the given basis (least squares if `x` lies
    /// outside the span).
    pub fn coordinates(&self, x: &ComplexMatrix) -> Vec<C64> {
        let rhs: Vec<C64> = self.basis.iter().map(|b| hs_inner(b, x)).collect();
        let rhs = nalgebra::DVector::from_vec(rhs);
        (&self.gram_inverse * rhs).iter().copied().collect()
    }
}

/// A linear map `Φ₀ : N₀ → M_m` defined by its images on the basis of an
/// embedding `N₀ ⊆ M_m`.
#[derive(Clone, Debug)]
pub struct SubalgebraMap {
    embedding: SubalgebraEmbedding,
    images: Vec<ComplexMatrix>,
}

impl SubalgebraMap {
    pub fn new(embedding: SubalgebraEmbedding, images: Vec<ComplexMatrix>) -> Result<Self> {
        let n = embedding.ambient_dim;
        if images.len() != embedding.basis.len() {
            return Err(Error::dims("SubalgebraMap::new", embedding.basis.len(), images.len()));
        }
        if images.iter().any(|x| x.rows() != n || x.cols() != n) {
            return Err(Error::dims("SubalgebraMap::new", format!("{n}x{n} images"), "other shape"));
        }
        Ok(Self { embedding, images })
    }

    /// Restriction of a map on `M_m` to the subalgebra.
    pub fn restrict(phi: &SuperOp, embedding: SubalgebraEmbedding) -> Result<Self> {
        let images = embedding
            .basis
            .iter()
            .map(|b| phi.apply(b))
            .collect::<Result<Vec<_>>>()?;
        Self::new(embedding, images)
    }

    pub fn embedding(&self) -> &SubalgebraEmbedding {
        &self.embedding
    }

    /// `Φ₀(x)` through basis coordinates of `x`, without the expectation.
    pub fn apply(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let n = self.embedding.ambient_dim;
        let mut out = ComplexMatrix::zeros(n, n);
        for (c, image) in self.embedding.coordinates(x).into_iter().zip(&self.images) {
            if c != ZERO {
                out = &out + &image.scale(c);
            }
        }
        out
    }

    /// The extension `Φ₀ ∘ E` to all of `M_m`.
    pub fn extension(&self) -> SuperOp {
        let e = &self.embedding.expectation;
        SuperOp::from_fn(self.embedding.ambient_dim, |x| self.apply(&e.apply_unchecked(x)))
            .expect("square images")
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CompatDefects {
    /// `‖χ_N(Φ)(u) − χ_{N₀}(Φ)(u)‖` over the trials.
    pub intrinsic: f64,
    /// `‖χ_N(Φ)(u) − (id ⊗ E)(χ_N(Φ)(u))‖`: how far the image leaves `M ⊗ N₀`.
    pub invariance: f64,
}

impl CompatDefects {
    pub fn max(&self) -> f64 {
        self.intrinsic.max(self.invariance)
    }
}

fn random_in_tensor(
    rng: &mut ChaCha8Rng,
    outer_dim: usize,
    inner: &[ComplexMatrix],
    outer_first: bool,
) -> ComplexMatrix {
    let n = inner[0].rows();
    let mut u = ComplexMatrix::zeros(outer_dim * n, outer_dim * n);
    for b in inner {
        let s = ginibre_from_rng(rng, outer_dim, outer_dim);
        let term = if outer_first { kron(&s, b) } else { kron(b, &s) };
        u = &u + &term;
    }
    u
}

/// Amplification of `Φ` over `N₀` computed inside `M_m ⊗ N₀` only, from
/// the orthonormal basis of `N₀` and its dual functionals pulled back
/// through the expectation.
fn intrinsic_amplify(phi: &SuperOp, emb: &SubalgebraEmbedding, u: &TensorElement) -> Result<ComplexMatrix> {
    let m = phi.dim();
    let n = emb.ambient_dim;
    let mut out = ComplexMatrix::zeros(m * n, m * n);
    for q in &emb.orthonormal {
        let on_subalgebra = Functional::new(q.adjoint())?;
        let tau = emb.expectation.preadjoint(&on_subalgebra)?;
        let slice = left_slice(&tau, u)?;
        out = &out + &kron(&phi.apply_unchecked(&slice), q);
    }
    Ok(out)
}

/// Both defects of the restriction of `χ_N(Φ)` to `M_m ⊗ N₀` over `trials`
/// random elements of `M_m ⊗ N₀`.
pub fn compat_defects(
    phi: &SuperOp,
    emb: &SubalgebraEmbedding,
    trials: usize,
    seed: u64,
) -> Result<CompatDefects> {
    let m = phi.dim();
    let n = emb.ambient_dim;
    let dims = FactorDims::new(m, n)?;
    let chi: AmplifiedOp = amplify_right(phi, n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = CompatDefects { intrinsic: 0.0, invariance: 0.0 };
    for _ in 0..trials {
        let u = TensorElement::new(dims, random_in_tensor(&mut rng, m, &emb.basis, true))?;
        let ambient = chi.apply(&u)?;
        let intrinsic = intrinsic_amplify(phi, emb, &u)?;
        let projected = left_amplify_element(&emb.expectation, &ambient)?;
        out.intrinsic = out.intrinsic.max(max_abs_diff(ambient.mat(), &intrinsic));
        out.invariance = out.invariance.max(max_abs_diff(ambient.mat(), projected.mat()));
    }
    Ok(out)
}

/// Largest of the two [`compat_defects`].
pub fn compat_defect(phi: &SuperOp, emb: &SubalgebraEmbedding, trials: usize, seed: u64) -> Result<f64> {
    Ok(compat_defects(phi, emb, trials, seed)?.max())
}

/// Compares the blockwise amplification of the extension `Φ₀ ∘ E` with the
/// slice amplification of `Φ₀` computed on `M₀ ⊗ M_n`, over `trials`
/// random elements of `M₀ ⊗ M_n`.
pub fn wittstock_consistency(phi0: &SubalgebraMap, n: usize, trials: usize, seed: u64) -> Result<f64> {
    let emb = &phi0.embedding;
    let m = emb.ambient_dim;
    let dims = FactorDims::new(m, n)?;
    let extended = block_amplify(&phi0.extension(), n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let u = TensorElement::new(dims, random_in_tensor(&mut rng, n, &emb.basis, false))?;
        let lhs = extended.apply(&u)?;
        let mut rhs = ComplexMatrix::zeros(m * n, m * n);
        for k in 0..n {
            for l in 0..n {
                let slice = left_slice(&dual_functional(n, k, l), &u)?;
                rhs = &rhs + &kron(&phi0.apply(&slice), &ComplexMatrix::unit(n, k, l));
            }
        }
        worst = worst.max(max_abs_diff(lhs.mat(), &rhs));
    }
    Ok(worst)
}
