//! Amplifications of maps on one tensor leg to `M_m ⊗ M_n`.
//!
//! * [`amplify_right`] builds `χ(Φ) = Φ ⊗ id_n` from slices: the image of
//!   `u` is reassembled from `Φ(L_τ(u))` over the coordinate functionals
//!   `τ_kl`, i.e. `χ(Φ)(u) = Σ_kl Φ(L_{τ_kl}(u)) ⊗ E_kl`.
//! * [`block_amplify`] is the blockwise `[u_kl] ↦ [Φ(u_kl)]` with the second
//!   factor outer. It shares no code with the slice construction, so each
//!   one checks the other.
//! * [`amplify_left`] is `id_m ⊗ Ψ`, built from right slices.

mod gekad;
mod subalgebra;

pub use gekad::{gekad_residual, gekad_solve, GeKadisonSolution};
pub use subalgebra::{
    compat_defect, compat_defects, wittstock_consistency, CompatDefects, SubalgebraEmbedding,
    SubalgebraMap,
};

use crate::duality::{dual_functional, left_slice, right_slice, TensorElement};
use crate::error::{Error, Result};
use crate::linalg::{kron, numerical_rank, random_ginibre, swap_factors, ComplexMatrix, FactorDims};
use crate::superop::SuperOp;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Provenance {
    SliceRight,
    Block,
    SliceLeft,
    Tensor1,
    Tensor2,
}

/// A map on `M_m ⊗ M_n` together with the factor split it was built for.
#[derive(Clone, Debug, PartialEq)]
pub struct AmplifiedOp {
    pub dims: FactorDims,
    pub op: SuperOp,
    pub provenance: Provenance,
}

impl AmplifiedOp {
    fn from_element_map(
        dims: FactorDims,
        provenance: Provenance,
        mut f: impl FnMut(&TensorElement) -> ComplexMatrix,
    ) -> Self {
        let op = SuperOp::from_fn(dims.total(), |e| {
            f(&TensorElement::new(dims, e.clone()).expect("basis element has tensor size"))
        })
        .expect("images have tensor size");
        Self { dims, op, provenance }
    }

    pub fn apply(&self, u: &TensorElement) -> Result<TensorElement> {
        if u.dims() != self.dims {
            return Err(Error::dims("AmplifiedOp::apply", self.dims, u.dims()));
        }
        TensorElement::new(self.dims, self.op.apply(u.mat())?)
    }

    /// `self ∘ other` on the same factor split.
    pub fn compose(&self, other: &AmplifiedOp, provenance: Provenance) -> Result<AmplifiedOp> {
        if self.dims != other.dims {
            return Err(Error::dims("AmplifiedOp::compose", self.dims, other.dims));
        }
        Ok(AmplifiedOp {
            dims: self.dims,
            op: self.op.compose(&other.op)?,
            provenance,
        })
    }
}

/// `χ(Φ)(u) = Σ_kl Φ(L_{τ_kl}(u)) ⊗ E_kl` for `u ∈ M_m ⊗ M_n`.
pub fn slice_amplify_element(phi: &SuperOp, u: &TensorElement) -> Result<TensorElement> {
    let dims = u.dims();
    if dims.m != phi.dim() {
        return Err(Error::dims("slice_amplify_element", phi.dim(), dims.m));
    }
    let FactorDims { m, n } = dims;
    let mut out = ComplexMatrix::zeros(m * n, m * n);
    for k in 0..n {
        for l in 0..n {
            let slice = left_slice(&dual_functional(n, k, l), u)?;
            let image = phi.apply_unchecked(&slice);
            for i in 0..m {
                for j in 0..m {
                    out.set(i * n + k, j * n + l, image.get(i, j));
                }
            }
        }
    }
    TensorElement::new(dims, out)
}

/// Slice-map amplification `χ(Φ)` of `Φ` on `M_m` to `M_m ⊗ M_n`.
pub fn amplify_right(phi: &SuperOp, n: usize) -> AmplifiedOp {
    let dims = FactorDims { m: phi.dim(), n: n.max(1) };
    AmplifiedOp::from_element_map(dims, Provenance::SliceRight, |u| {
        slice_amplify_element(phi, u).expect("dims match").into_mat()
    })
}

/// Deliberate corruptions of the block path, for harness self-tests.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BlockFault {
    /// Output block `(k, l)` receives `Φ` of input block `(l, k)`.
    TransposeBlockIndex,
}

/// `[u_kl] ↦ [Φ(u_kl)]` where `u_kl ∈ M_m` are the blocks of `u` with the
/// second factor outer.
pub fn block_amplify_element(
    phi: &SuperOp,
    u: &TensorElement,
    fault: Option<BlockFault>,
) -> Result<TensorElement> {
    let dims = u.dims();
    if dims.m != phi.dim() {
        return Err(Error::dims("block_amplify_element", phi.dim(), dims.m));
    }
    let FactorDims { m, n } = dims;
    let outer_n = swap_factors(u.mat(), dims)?;
    let mut images = ComplexMatrix::zeros(m * n, m * n);
    for k in 0..n {
        for l in 0..n {
            let (sk, sl) = match fault {
                Some(BlockFault::TransposeBlockIndex) => (l, k),
                None => (k, l),
            };
            let block = ComplexMatrix::from_fn(m, m, |i, j| outer_n.get(sk * m + i, sl * m + j));
            let image = phi.apply_unchecked(&block);
            for i in 0..m {
                for j in 0..m {
                    images.set(k * m + i, l * m + j, image.get(i, j));
                }
            }
        }
    }
    TensorElement::new(dims, swap_factors(&images, dims.swapped())?)
}

/// Blockwise amplification `Φ^(∞)` restricted to `M_m ⊗ M_n`.
pub fn block_amplify(phi: &SuperOp, n: usize) -> AmplifiedOp {
    block_amplify_with(phi, n, None)
}

pub fn block_amplify_with(phi: &SuperOp, n: usize, fault: Option<BlockFault>) -> AmplifiedOp {
    let dims = FactorDims { m: phi.dim(), n: n.max(1) };
    AmplifiedOp::from_element_map(dims, Provenance::Block, |u| {
        block_amplify_element(phi, u, fault).expect("dims match").into_mat()
    })
}

/// `(id_m ⊗ Ψ)(u) = Σ_ij E_ij ⊗ Ψ(R_{ρ_ij}(u))` for `Ψ` on `M_n`.
pub fn left_amplify_element(psi: &SuperOp, u: &TensorElement) -> Result<TensorElement> {
    let dims = u.dims();
    if dims.n != psi.dim() {
        return Err(Error::dims("left_amplify_element", psi.dim(), dims.n));
    }
    let FactorDims { m, n } = dims;
    let mut out = ComplexMatrix::zeros(m * n, m * n);
    for i in 0..m {
        for j in 0..m {
            let slice = right_slice(&dual_functional(m, i, j), u)?;
            let image = psi.apply_unchecked(&slice);
            for k in 0..n {
                for l in 0..n {
                    out.set(i * n + k, j * n + l, image.get(k, l));
                }
            }
        }
    }
    TensorElement::new(dims, out)
}

/// `id_m ⊗ Ψ` on `M_m ⊗ M_n` for `Ψ` on `M_n`.
pub fn amplify_left(psi: &SuperOp, m: usize) -> AmplifiedOp {
    let dims = FactorDims { m: m.max(1), n: psi.dim() };
    AmplifiedOp::from_element_map(dims, Provenance::SliceLeft, |u| {
        left_amplify_element(psi, u).expect("dims match").into_mat()
    })
}

/// `(Φ ⊗ id)(id ⊗ Ψ)`.
pub fn tensor1(phi: &SuperOp, psi: &SuperOp) -> AmplifiedOp {
    let right = amplify_right(phi, psi.dim());
    let left = amplify_left(psi, phi.dim());
    right.compose(&left, Provenance::Tensor1).expect("same factor split")
}

/// `(id ⊗ Ψ)(Φ ⊗ id)`.
pub fn tensor2(phi: &SuperOp, psi: &SuperOp) -> AmplifiedOp {
    let right = amplify_right(phi, psi.dim());
    let left = amplify_left(psi, phi.dim());
    left.compose(&right, Provenance::Tensor2).expect("same factor split")
}

/// Rank of the Gram matrix of `(mn)²` random elementary tensors `S_r ⊗ T_r`.
pub fn elementary_tensor_rank(dims: FactorDims) -> usize {
    let FactorDims { m, n } = dims;
    let d = m * n;
    let count = d * d;
    let seed = 0x5eed_0000 ^ ((m as u64) << 16) ^ n as u64;
    let mut columns = ComplexMatrix::zeros(d * d, count);
    for r in 0..count {
        let s = random_ginibre(m, m, seed.wrapping_add(2 * r as u64));
        let t = random_ginibre(n, n, seed.wrapping_add(2 * r as u64 + 1));
        let v = kron(&s, &t).vectorize();
        for (idx, z) in v.iter().enumerate() {
            columns.set(idx, r, *z);
        }
    }
    let gram = &columns.adjoint() * &columns;
    numerical_rank(&gram, 1e-10)
}

/// Elementary tensors span all of `M_{mn}`, so the algebraic and normal
/// tensor products coincide and no nonzero functional vanishes on the
/// former. Returns whether the span has full dimension `(mn)²`.
pub fn uniqueness_dimension_check(dims: FactorDims) -> bool {
    let d = dims.total();
    elementary_tensor_rank(dims) == d * d
}
