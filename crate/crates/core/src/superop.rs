//! Linear maps on `M_m` in Choi and natural form.
//!
//! Choi convention: `C(Φ) = Σ_ij E_ij ⊗ Φ(E_ij)`, so the first tensor slot
//! carries the input index. The natural form `N` acts on column-stacked
//! inputs: `vec(Φ(S)) = N vec(S)`.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::duality::Functional;
use crate::error::{Error, Result};
use crate::linalg::{
    ginibre_from_rng, max_abs_diff, min_hermitian_eigenvalue, operator_norm, ComplexMatrix, C64,
};

mod cbnorm;

pub use cbnorm::{cb_norm_lower, CbEstimate, CbOptions};

#[derive(Clone, Debug, PartialEq)]
pub struct SuperOp {
    dim: usize,
    choi: ComplexMatrix,
    natural: ComplexMatrix,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MapKind {
    CompletelyPositive,
    HermitianPreserving,
    General,
}

fn choi_to_natural(choi: &DMatrix<C64>, m: usize) -> DMatrix<C64> {
    let mut nat = DMatrix::zeros(m * m, m * m);
    for i in 0..m {
        for j in 0..m {
            for p in 0..m {
                for q in 0..m {
                    nat[(p + q * m, i + j * m)] = choi[(i * m + p, j * m + q)];
                }
            }
        }
    }
    nat
}

fn natural_to_choi(nat: &DMatrix<C64>, m: usize) -> DMatrix<C64> {
    let mut choi = DMatrix::zeros(m * m, m * m);
    for i in 0..m {
        for j in 0..m {
            for p in 0..m {
                for q in 0..m {
                    choi[(i * m + p, j * m + q)] = nat[(p + q * m, i + j * m)];
                }
            }
        }
    }
    choi
}

fn check_square(context: &'static str, c: &ComplexMatrix, size: usize) -> Result<()> {
    if c.rows() != size || c.cols() != size {
        return Err(Error::dims(context, format!("{size}x{size}"), format!("{}x{}", c.rows(), c.cols())));
    }
    Ok(())
}

impl SuperOp {
    pub fn from_choi(choi: ComplexMatrix, m: usize) -> Result<Self> {
        check_square("SuperOp::from_choi", &choi, m * m)?;
        if m == 0 {
            return Err(Error::dims("SuperOp::from_choi", "m >= 1", 0));
        }
        let natural = ComplexMatrix::from_inner(choi_to_natural(choi.inner(), m));
        Ok(Self { dim: m, choi, natural })
    }

    pub fn from_natural(natural: ComplexMatrix, m: usize) -> Result<Self> {
        check_square("SuperOp::from_natural", &natural, m * m)?;
        if m == 0 {
            return Err(Error::dims("SuperOp::from_natural", "m >= 1", 0));
        }
        let choi = ComplexMatrix::from_inner(natural_to_choi(natural.inner(), m));
        Ok(Self { dim: m, choi, natural })
    }

    /// Builds the map from its action on the matrix units of `M_m`.
    /// `f` must be linear for the result to mean anything.
    pub fn from_fn(m: usize, mut f: impl FnMut(&ComplexMatrix) -> ComplexMatrix) -> Result<Self> {
        let mut nat = DMatrix::zeros(m * m, m * m);
        for j in 0..m {
            for i in 0..m {
                let image = f(&ComplexMatrix::unit(m, i, j));
                check_square("SuperOp::from_fn image", &image, m)?;
                nat.set_column(i + j * m, &image.vectorize());
            }
        }
        Self::from_natural(ComplexMatrix::from_inner(nat), m)
    }

    pub fn identity(m: usize) -> Self {
        Self::from_natural(ComplexMatrix::identity(m * m), m).expect("square by construction")
    }

    pub fn zero(m: usize) -> Self {
        Self::from_natural(ComplexMatrix::zeros(m * m, m * m), m).expect("square by construction")
    }

    pub fn transpose_map(m: usize) -> Self {
        Self::from_fn(m, |s| s.transpose()).expect("square images")
    }

    /// `S ↦ A S A^*`.
    pub fn conjugation(a: &ComplexMatrix) -> Result<Self> {
        check_square("SuperOp::conjugation", a, a.rows())?;
        let a_star = a.adjoint();
        Self::from_fn(a.rows(), |s| &(a * s) * &a_star)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn choi(&self) -> &ComplexMatrix {
        &self.choi
    }

    pub fn natural(&self) -> &ComplexMatrix {
        &self.natural
    }

    pub fn apply(&self, s: &ComplexMatrix) -> Result<ComplexMatrix> {
        check_square("SuperOp::apply", s, self.dim)?;
        Ok(self.apply_unchecked(s))
    }

    pub(crate) fn apply_unchecked(&self, s: &ComplexMatrix) -> ComplexMatrix {
        let v = self.natural.inner() * s.vectorize();
        ComplexMatrix::unvectorize(&v, self.dim, self.dim)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &SuperOp) -> Result<SuperOp> {
        if self.dim != other.dim {
            return Err(Error::dims("SuperOp::compose", self.dim, other.dim));
        }
        Self::from_natural(&self.natural * &other.natural, self.dim)
    }

    pub fn add(&self, other: &SuperOp) -> Result<SuperOp> {
        if self.dim != other.dim {
            return Err(Error::dims("SuperOp::add", self.dim, other.dim));
        }
        Self::from_natural(&self.natural + &other.natural, self.dim)
    }

    pub fn scale(&self, factor: C64) -> SuperOp {
        Self::from_natural(self.natural.scale(factor), self.dim).expect("same shape")
    }

    /// Hilbert-Schmidt adjoint: `Tr(Y^* Φ(X)) = Tr(Φ†(Y)^* X)`.
    pub fn hs_adjoint(&self) -> SuperOp {
        Self::from_natural(self.natural.adjoint(), self.dim).expect("same shape")
    }

    /// Preadjoint `Φ_*(ρ) = ρ ∘ Φ`.
    pub fn preadjoint(&self, rho: &Functional) -> Result<Functional> {
        if rho.dim() != self.dim {
            return Err(Error::dims("SuperOp::preadjoint", self.dim, rho.dim()));
        }
        let m = self.dim;
        // Tr(F X) = vec(F^T) · vec(X), so vec(G^T) = N^T vec(F^T).
        let f_t = rho.rep().transpose().vectorize();
        let g_t: DVector<C64> = self.natural.inner().transpose() * f_t;
        Functional::new(ComplexMatrix::unvectorize(&g_t, m, m).transpose())
    }

    /// Choi test: Hermitian part has spectrum `≥ -tol` and the anti-Hermitian
    /// part has operator norm `≤ tol`.
    pub fn is_cp(&self, tol: f64) -> bool {
        operator_norm(&self.choi.anti_hermitian_part()) <= tol
            && min_hermitian_eigenvalue(&self.choi) >= -tol
    }

    /// Exact cb norm of a completely positive map, `‖Φ(I)‖`.
    ///
    /// The Choi test runs at tolerance `1e-10 * max(1, max|C|)`.
    pub fn cb_norm_cp(&self) -> Result<f64> {
        let tol = 1e-10 * self.choi.max_abs().max(1.0);
        if !self.is_cp(tol) {
            return Err(Error::NotCompletelyPositive(min_hermitian_eigenvalue(&self.choi)));
        }
        Ok(operator_norm(&self.apply_unchecked(&ComplexMatrix::identity(self.dim))))
    }

    /// Largest entrywise deviation between natural forms.
    pub fn distance(&self, other: &SuperOp) -> f64 {
        max_abs_diff(&self.natural, &other.natural)
    }

    /// `(Φ ⊗ id_k)(X)` for `X ∈ M_m ⊗ M_k`, first factor outer.
    pub fn apply_tensor_identity(&self, k: usize, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        check_square("SuperOp::apply_tensor_identity", x, self.dim * k)?;
        Ok(tensor_identity_apply(self.natural.inner(), self.dim, k, x))
    }
}

/// Applies the natural matrix `nat` of a map on `M_m` to each of the `k²`
/// blocks `B_ab[i,j] = x[(i,a),(j,b)]` of `x ∈ M_m ⊗ M_k`.
pub(crate) fn tensor_identity_apply(
    nat: &DMatrix<C64>,
    m: usize,
    k: usize,
    x: &ComplexMatrix,
) -> ComplexMatrix {
    let x = x.inner();
    let mut stacked = DMatrix::zeros(m * m, k * k);
    for a in 0..k {
        for b in 0..k {
            let col = a * k + b;
            for j in 0..m {
                for i in 0..m {
                    stacked[(i + j * m, col)] = x[(i * k + a, j * k + b)];
                }
            }
        }
    }
    let images = nat * stacked;
    let mut out = DMatrix::zeros(m * k, m * k);
    for a in 0..k {
        for b in 0..k {
            let col = a * k + b;
            for j in 0..m {
                for i in 0..m {
                    out[(i * k + a, j * k + b)] = images[(i + j * m, col)];
                }
            }
        }
    }
    ComplexMatrix::from_inner(out)
}

/// Random map on `M_m`, deterministic in `seed`.
///
/// `CompletelyPositive`: Choi `W W^*` for Ginibre `W`;
/// `HermitianPreserving`: difference of two such maps;
/// `General`: Ginibre Choi matrix.
pub fn random_superop(m: usize, seed: u64, kind: MapKind) -> SuperOp {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = m * m;
    let cp = |rng: &mut ChaCha8Rng| {
        let w = ginibre_from_rng(rng, d, d);
        &w * &w.adjoint()
    };
    let choi = match kind {
        MapKind::CompletelyPositive => cp(&mut rng),
        MapKind::HermitianPreserving => {
            let a = cp(&mut rng);
            let b = cp(&mut rng);
            &a - &b
        }
        MapKind::General => ginibre_from_rng(&mut rng, d, d),
    };
    SuperOp::from_choi(choi, m).expect("square by construction")
}
