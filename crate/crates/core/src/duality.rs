//! Normal functionals through trace duality, module actions on them, and
//! the left and right slice maps on `M_m ⊗ M_n`.
//!
//! A functional `ρ` on `M_d` is stored as its representer `F` with
//! `ρ(S) = Tr(F S)`. Under this convention the module actions are plain
//! matrix products: `a·τ` has representer `a F` and `τ·a` has `F a`.

use crate::error::{Error, Result};
use crate::linalg::{kron, ComplexMatrix, FactorDims, C64, ZERO};

#[derive(Clone, Debug, PartialEq)]
pub struct Functional {
    rep: ComplexMatrix,
}

impl Functional {
    pub fn new(rep: ComplexMatrix) -> Result<Self> {
        if !rep.is_square() {
            return Err(Error::dims(
                "Functional::new",
                "square representer",
                format!("{}x{}", rep.rows(), rep.cols()),
            ));
        }
        Ok(Self { rep })
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            rep: ComplexMatrix::zeros(dim, dim),
        }
    }

    /// The (unnormalized) trace `S ↦ Tr(S)`.
    pub fn trace(dim: usize) -> Self {
        Self {
            rep: ComplexMatrix::identity(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.rep.rows()
    }

    pub fn rep(&self) -> &ComplexMatrix {
        &self.rep
    }

    /// `Tr(F S)`.
    pub fn eval(&self, s: &ComplexMatrix) -> Result<C64> {
        let d = self.dim();
        if s.rows() != d || s.cols() != d {
            return Err(Error::dims("eval", format!("{d}x{d}"), format!("{}x{}", s.rows(), s.cols())));
        }
        Ok(self.eval_unchecked(s))
    }

    pub(crate) fn eval_unchecked(&self, s: &ComplexMatrix) -> C64 {
        let d = self.dim();
        let mut acc = ZERO;
        for i in 0..d {
            for j in 0..d {
                acc += self.rep.get(i, j) * s.get(j, i);
            }
        }
        acc
    }
}

fn check_action(context: &'static str, a: &ComplexMatrix, dim: usize) -> Result<()> {
    if a.rows() != dim || a.cols() != dim {
        return Err(Error::dims(context, format!("{dim}x{dim}"), format!("{}x{}", a.rows(), a.cols())));
    }
    Ok(())
}

/// `a·τ`, defined by `⟨a·τ, b⟩ = ⟨τ, b a⟩`.
pub fn mod_left(a: &ComplexMatrix, tau: &Functional) -> Result<Functional> {
    check_action("mod_left", a, tau.dim())?;
    Ok(Functional { rep: a * &tau.rep })
}

/// `τ·a`, defined by `⟨τ·a, b⟩ = ⟨τ, a b⟩`.
pub fn mod_right(tau: &Functional, a: &ComplexMatrix) -> Result<Functional> {
    check_action("mod_right", a, tau.dim())?;
    Ok(Functional { rep: &tau.rep * a })
}

/// `ρ ⊗ τ` on `M_{mn}`, with `(ρ ⊗ τ)(S ⊗ T) = ρ(S) τ(T)`.
pub fn tensor_functional(rho: &Functional, tau: &Functional) -> Functional {
    Functional {
        rep: kron(&rho.rep, &tau.rep),
    }
}

/// An element of `M_m ⊗ M_n`, first factor outer.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorElement {
    dims: FactorDims,
    mat: ComplexMatrix,
}

impl TensorElement {
    pub fn new(dims: FactorDims, mat: ComplexMatrix) -> Result<Self> {
        let d = dims.total();
        if mat.rows() != d || mat.cols() != d {
            return Err(Error::dims(
                "TensorElement::new",
                format!("{d}x{d}"),
                format!("{}x{}", mat.rows(), mat.cols()),
            ));
        }
        Ok(Self { dims, mat })
    }

    /// Elementary tensor `S ⊗ T`.
    pub fn elementary(s: &ComplexMatrix, t: &ComplexMatrix) -> Result<Self> {
        if !s.is_square() || !t.is_square() {
            return Err(Error::dims("TensorElement::elementary", "square factors", "rectangular"));
        }
        let dims = FactorDims::new(s.rows(), t.rows())?;
        Ok(Self { dims, mat: kron(s, t) })
    }

    pub fn zero(dims: FactorDims) -> Self {
        let d = dims.total();
        Self {
            dims,
            mat: ComplexMatrix::zeros(d, d),
        }
    }

    pub fn dims(&self) -> FactorDims {
        self.dims
    }

    pub fn mat(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_mat(self) -> ComplexMatrix {
        self.mat
    }
}

/// Left slice `L_τ : M_m ⊗ M_n → M_m`, `L_τ(S ⊗ T) = τ(T) S`.
///
/// Entry `(i, j)` is `τ` evaluated on the inner block
/// `B_ij[k, l] = u[(i,k), (j,l)]`.
pub fn left_slice(tau: &Functional, u: &TensorElement) -> Result<ComplexMatrix> {
    let FactorDims { m, n } = u.dims;
    if tau.dim() != n {
        return Err(Error::dims("left_slice", n, tau.dim()));
    }
    let f = &tau.rep;
    let mat = &u.mat;
    let mut out = ComplexMatrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            let mut acc = ZERO;
            for k in 0..n {
                for l in 0..n {
                    acc += f.get(l, k) * mat.get(i * n + k, j * n + l);
                }
            }
            out.set(i, j, acc);
        }
    }
    Ok(out)
}

/// Right slice `R_ρ : M_m ⊗ M_n → M_n`, `R_ρ(S ⊗ T) = ρ(S) T`.
pub fn right_slice(rho: &Functional, u: &TensorElement) -> Result<ComplexMatrix> {
    let FactorDims { m, n } = u.dims;
    if rho.dim() != m {
        return Err(Error::dims("right_slice", m, rho.dim()));
    }
    let f = &rho.rep;
    let mat = &u.mat;
    let mut out = ComplexMatrix::zeros(n, n);
    for k in 0..n {
        for l in 0..n {
            let mut acc = ZERO;
            for i in 0..m {
                for j in 0..m {
                    acc += f.get(j, i) * mat.get(i * n + k, j * n + l);
                }
            }
            out.set(k, l, acc);
        }
    }
    Ok(out)
}

/// Coordinate functional `T ↦ T[k, l]`, representer `E_lk`.
pub fn dual_functional(n: usize, k: usize, l: usize) -> Functional {
    Functional {
        rep: ComplexMatrix::unit(n, l, k),
    }
}

/// Coordinate functionals `τ_kl` in row-major `(k, l)` order.
pub fn dual_basis(n: usize) -> Vec<Functional> {
    let mut out = Vec::with_capacity(n * n);
    for k in 0..n {
        for l in 0..n {
            out.push(dual_functional(n, k, l));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct SliceComponent {
    pub k: usize,
    pub l: usize,
    pub block: ComplexMatrix,
}

/// Splits `u` as `Σ_kl u^(kl) ⊗ E_kl` with `u^(kl) = L_{τ_kl}(u)`.
pub fn slice_decompose(u: &TensorElement) -> Vec<SliceComponent> {
    let n = u.dims.n;
    let mut out = Vec::with_capacity(n * n);
    for k in 0..n {
        for l in 0..n {
            let block = left_slice(&dual_functional(n, k, l), u).expect("dual basis matches n");
            out.push(SliceComponent { k, l, block });
        }
    }
    out
}

/// Inverse of [`slice_decompose`].
pub fn slice_reconstruct(dims: FactorDims, components: &[SliceComponent]) -> Result<TensorElement> {
    let FactorDims { m, n } = dims;
    let mut mat = ComplexMatrix::zeros(m * n, m * n);
    for c in components {
        if c.block.rows() != m || c.block.cols() != m || c.k >= n || c.l >= n {
            return Err(Error::dims("slice_reconstruct", format!("{m}x{m} blocks"), "mismatched component"));
        }
        for i in 0..m {
            for j in 0..m {
                let idx = (i * n + c.k, j * n + c.l);
                mat.set(idx.0, idx.1, mat.get(idx.0, idx.1) + c.block.get(i, j));
            }
        }
    }
    TensorElement::new(dims, mat)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs_diff, random_ginibre, ONE};

    fn e(n: usize, i: usize, j: usize) -> ComplexMatrix {
        ComplexMatrix::unit(n, i, j)
    }

    fn func(rep: ComplexMatrix) -> Functional {
        Functional::new(rep).unwrap()
    }

    #[test]
    fn eval_examples() {
        let s = random_ginibre(2, 2, 1);
        assert!((Functional::trace(2).eval(&s).unwrap() - s.trace()).norm() < 1e-15);
        assert_eq!(func(e(2, 1, 0)).eval(&e(2, 0, 1)).unwrap(), ONE);
        assert_eq!(Functional::zero(2).eval(&s).unwrap(), ZERO);
        assert!(Functional::zero(3).eval(&s).is_err());
    }

    #[test]
    fn module_actions() {
        let tau = func(random_ginibre(3, 3, 2));
        assert_eq!(mod_left(&ComplexMatrix::identity(3), &tau).unwrap(), tau);
        assert_eq!(mod_right(&tau, &ComplexMatrix::identity(3)).unwrap(), tau);
        let tr = Functional::trace(2);
        assert_eq!(mod_left(&e(2, 0, 0), &tr).unwrap().rep(), &e(2, 0, 0));
        assert_eq!(mod_right(&tr, &e(2, 0, 0)).unwrap().rep(), &e(2, 0, 0));
        let a = random_ginibre(3, 3, 3);
        assert_eq!(mod_left(&a, &Functional::zero(3)).unwrap(), Functional::zero(3));
        assert_eq!(mod_right(&Functional::zero(3), &a).unwrap(), Functional::zero(3));
        assert!(mod_left(&a, &Functional::zero(2)).is_err());

        let b = random_ginibre(3, 3, 4);
        let left = mod_left(&a, &tau).unwrap().eval(&b).unwrap();
        assert!((left - tau.eval(&(&b * &a)).unwrap()).norm() < 1e-12);
        let right = mod_right(&tau, &a).unwrap().eval(&b).unwrap();
        assert!((right - tau.eval(&(&a * &b)).unwrap()).norm() < 1e-12);
    }

    #[test]
    fn tensor_functional_examples() {
        let tt = tensor_functional(&Functional::trace(2), &Functional::trace(2));
        assert_eq!(tt.eval(&ComplexMatrix::identity(4)).unwrap(), C64::new(4.0, 0.0));
        let f = func(e(2, 1, 0));
        let u = kron(&e(2, 0, 1), &e(2, 0, 1));
        assert_eq!(tensor_functional(&f, &f).eval(&u).unwrap(), ONE);
        let rho = func(random_ginibre(2, 2, 5));
        assert_eq!(
            tensor_functional(&rho, &Functional::zero(3)).eval(&random_ginibre(6, 6, 6)).unwrap(),
            ZERO
        );
    }

    #[test]
    fn left_slice_examples() {
        let tau = func(e(2, 1, 0));
        let u = TensorElement::elementary(&e(2, 0, 0), &e(2, 0, 1)).unwrap();
        assert_eq!(left_slice(&tau, &u).unwrap(), e(2, 0, 0));

        let s = random_ginibre(3, 3, 7);
        let u = TensorElement::elementary(&s, &ComplexMatrix::identity(2)).unwrap();
        let sliced = left_slice(&Functional::trace(2), &u).unwrap();
        assert!(max_abs_diff(&sliced, &s.scale(C64::new(2.0, 0.0))) < 1e-14);

        assert!(left_slice(&Functional::trace(3), &u).is_err());
    }

    /// Swap matrix Σ_ij E_ij ⊗ E_ji on C² ⊗ C².
    fn swap_matrix(n: usize) -> TensorElement {
        let mut mat = ComplexMatrix::zeros(n * n, n * n);
        for i in 0..n {
            for j in 0..n {
                mat = &mat + &kron(&e(n, i, j), &e(n, j, i));
            }
        }
        TensorElement::new(FactorDims::new(n, n).unwrap(), mat).unwrap()
    }

    #[test]
    fn left_slice_of_swap_matches_entry_loop() {
        let u = swap_matrix(2);
        let tau = func(e(2, 1, 0));
        // Entry-loop oracle: L_τ(u)[i,j] = Σ_{k,l} F[l,k] u[(i,k),(j,l)]
        // with F = E_21, so only k = 0, l = 1 contributes: u[(i,0),(j,1)].
        let mut oracle = ComplexMatrix::zeros(2, 2);
        for i in 0..2 {
            for j in 0..2 {
                oracle.set(i, j, u.mat().get(i * 2, j * 2 + 1));
            }
        }
        assert_eq!(oracle, e(2, 1, 0));
        assert_eq!(left_slice(&tau, &u).unwrap(), oracle);
    }

    #[test]
    fn right_slice_examples() {
        let t = random_ginibre(3, 3, 8);
        let u = TensorElement::elementary(&e(2, 0, 1), &t).unwrap();
        let rho = func(e(2, 1, 0));
        assert!(max_abs_diff(&right_slice(&rho, &u).unwrap(), &t) < 1e-15);
        let u = TensorElement::elementary(&ComplexMatrix::identity(2), &t).unwrap();
        let sliced = right_slice(&Functional::trace(2), &u).unwrap();
        assert!(max_abs_diff(&sliced, &t.scale(C64::new(2.0, 0.0))) < 1e-14);
        let zero = TensorElement::zero(FactorDims::new(2, 3).unwrap());
        assert_eq!(right_slice(&rho, &zero).unwrap(), ComplexMatrix::zeros(3, 3));
    }

    #[test]
    fn dual_basis_properties() {
        let basis = dual_basis(2);
        assert_eq!(basis.len(), 4);
        let tau12 = &basis[1];
        assert_eq!(tau12.eval(&e(2, 0, 1)).unwrap(), ONE);
        assert_eq!(tau12.eval(&e(2, 1, 0)).unwrap(), ZERO);
        let t = random_ginibre(3, 3, 9);
        let diag_sum: C64 = (0..3).map(|k| dual_functional(3, k, k).eval(&t).unwrap()).sum();
        assert!((diag_sum - t.trace()).norm() < 1e-14);
    }

    #[test]
    fn slice_decompose_cases() {
        let s = random_ginibre(2, 2, 10);
        let u = TensorElement::elementary(&s, &e(2, 0, 1)).unwrap();
        for c in slice_decompose(&u) {
            if (c.k, c.l) == (0, 1) {
                assert_eq!(c.block, s);
            } else {
                assert_eq!(c.block, ComplexMatrix::zeros(2, 2));
            }
        }

        let dims = FactorDims::new(3, 2).unwrap();
        let u = TensorElement::new(dims, random_ginibre(6, 6, 11)).unwrap();
        let rebuilt = slice_reconstruct(dims, &slice_decompose(&u)).unwrap();
        assert!(max_abs_diff(rebuilt.mat(), u.mat()) <= 1e-13);

        let zero = TensorElement::zero(dims);
        assert!(slice_decompose(&zero).iter().all(|c| c.block.max_abs() == 0.0));
    }
}
