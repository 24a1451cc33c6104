//! Uniqueness of `Φ ⊗ id` from slice commutation, as a linear system.
//!
//! For a nonzero `n₀ ∈ M_n` the unknown map `Θ` on `M_m ⊗ M_n` is asked to
//! satisfy
//!
//! 1. `Θ ∘ Q_τ = Q_τ ∘ Θ` for every coordinate functional `τ`, where
//!    `Q_τ(u) = L_τ(u) ⊗ n₀` is the slice map `id ⊗ τn₀`;
//! 2. `Θ(S ⊗ n₀) = Φ(S) ⊗ n₀` for every matrix unit `S`.
//!
//! The unknowns are the `(mn)⁴` entries of the natural matrix of `Θ`. The
//! solution set is an affine space whose dimension is the nullity of the
//! coefficient matrix; it should be a single point, namely `χ(Φ)`.

use nalgebra::{DMatrix, DVector};

use super::amplify_right;
use crate::duality::{dual_basis, left_slice, TensorElement};
use crate::error::{Error, Result};
use crate::linalg::{kron, ComplexMatrix, FactorDims, C64};
use crate::superop::SuperOp;

/// Singular values below this fraction of the largest count as zero.
pub const RANK_THRESHOLD: f64 = 1e-8;

/// Elements with max-entry norm below this are rejected as zero.
pub const ZERO_ELEMENT_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct GeKadisonSolution {
    pub solution_space_dim: usize,
    /// `max |Θ − χ(Φ)|` over natural-matrix entries.
    pub defect: f64,
    /// `‖A t − b‖₂` of the least-squares solution.
    pub residual: f64,
    pub solution: SuperOp,
}

struct System {
    coeffs: DMatrix<C64>,
    rhs: DVector<C64>,
    dim: usize,
}

fn slice_projector(tau_index: usize, dims: FactorDims, n_elem: &ComplexMatrix) -> DMatrix<C64> {
    let tau = &dual_basis(dims.n)[tau_index];
    let d = dims.total();
    let mut q = DMatrix::zeros(d * d, d * d);
    for j in 0..d {
        for i in 0..d {
            let u = TensorElement::new(dims, ComplexMatrix::unit(d, i, j)).expect("tensor size");
            let image = kron(&left_slice(tau, &u).expect("dims"), n_elem);
            q.set_column(i + j * d, &image.vectorize());
        }
    }
    q
}

fn build_system(phi: &SuperOp, n_elem: &ComplexMatrix) -> Result<System> {
    let m = phi.dim();
    let n = n_elem.rows();
    if !n_elem.is_square() {
        return Err(Error::dims("gekad", "square element", format!("{}x{}", n_elem.rows(), n_elem.cols())));
    }
    let norm = n_elem.max_abs();
    if norm < ZERO_ELEMENT_TOL {
        return Err(Error::ZeroElement(norm));
    }
    let dims = FactorDims::new(m, n)?;
    let d = dims.total();
    let d2 = d * d;
    // Unknown t[r + c·d²] = T[r, c], the natural matrix of Θ.
    let unknowns = d2 * d2;
    let rows = n * n * d2 * d2 + m * m * d2;
    let mut coeffs = DMatrix::zeros(rows, unknowns);
    let mut rhs = DVector::zeros(rows);
    let mut row = 0;

    for tau_index in 0..n * n {
        let q = slice_projector(tau_index, dims, n_elem);
        for s in 0..d2 {
            // Θ(Q_τ e_s) − Q_τ Θ(e_s) = 0; Q_τ e_s is column s of q.
            for r in 0..d2 {
                for c in 0..d2 {
                    coeffs[(row, r + c * d2)] += q[(c, s)];
                }
                for p in 0..d2 {
                    coeffs[(row, p + s * d2)] -= q[(r, p)];
                }
                row += 1;
            }
        }
    }

    for j in 0..m {
        for i in 0..m {
            let s = ComplexMatrix::unit(m, i, j);
            let x = kron(&s, n_elem).vectorize();
            let y = kron(&phi.apply_unchecked(&s), n_elem).vectorize();
            for r in 0..d2 {
                for c in 0..d2 {
                    coeffs[(row, r + c * d2)] = x[c];
                }
                rhs[row] = y[r];
                row += 1;
            }
        }
    }
    debug_assert_eq!(row, rows);
    Ok(System { coeffs, rhs, dim: d })
}

fn flatten(theta: &SuperOp) -> DVector<C64> {
    DVector::from_column_slice(theta.natural().inner().as_slice())
}

/// Solves the uniqueness system for `Φ` on `M_m` and a nonzero `n_elem ∈ M_n`.
pub fn gekad_solve(phi: &SuperOp, n_elem: &ComplexMatrix) -> Result<GeKadisonSolution> {
    let System { coeffs, rhs, dim } = build_system(phi, n_elem)?;
    let unknowns = coeffs.ncols();
    let svd = coeffs.clone().svd(true, true);
    let top = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let cutoff = RANK_THRESHOLD * top;
    let rank = svd.singular_values.iter().filter(|&&s| s > cutoff).count();
    let t = svd
        .solve(&rhs, cutoff)
        .map_err(|e| Error::InvalidConfig(format!("least squares failed: {e}")))?;
    let residual = (&coeffs * &t - &rhs).norm();
    let d2 = dim * dim;
    let solution = SuperOp::from_natural(
        ComplexMatrix::from_inner(DMatrix::from_column_slice(d2, d2, t.as_slice())),
        dim,
    )?;
    let reference = amplify_right(phi, n_elem.rows());
    Ok(GeKadisonSolution {
        solution_space_dim: unknowns - rank,
        defect: solution.distance(&reference.op),
        residual,
        solution,
    })
}

/// `‖A t_Θ − b‖₂`: how far a given `Θ` is from satisfying both conditions.
pub fn gekad_residual(theta: &SuperOp, phi: &SuperOp, n_elem: &ComplexMatrix) -> Result<f64> {
    let System { coeffs, rhs, dim } = build_system(phi, n_elem)?;
    if theta.dim() != dim {
        return Err(Error::dims("gekad_residual", dim, theta.dim()));
    }
    Ok((&coeffs * flatten(theta) - rhs).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random_ginibre;
    use crate::superop::{random_superop, MapKind};

    #[test]
    fn unique_solution_for_matrix_unit() {
        let phi = random_superop(2, 1, MapKind::General);
        let sol = gekad_solve(&phi, &ComplexMatrix::unit(2, 0, 0)).unwrap();
        assert_eq!(sol.solution_space_dim, 0);
        assert!(sol.defect <= 1e-8, "{}", sol.defect);
        assert!(sol.residual <= 1e-8);
    }

    #[test]
    fn amplification_satisfies_conditions() {
        let phi = random_superop(2, 2, MapKind::General);
        let n_elem = random_ginibre(2, 2, 3);
        let chi = amplify_right(&phi, 2).op;
        assert!(gekad_residual(&chi, &phi, &n_elem).unwrap() <= 1e-10);
    }

    #[test]
    fn perturbation_breaks_conditions() {
        let phi = random_superop(2, 4, MapKind::General);
        let n_elem = ComplexMatrix::unit(2, 0, 0);
        let chi = amplify_right(&phi, 2).op;
        let p = random_ginibre(16, 16, 5);
        let p = p.scale(C64::new(1e-3 / crate::linalg::operator_norm(&p), 0.0));
        let perturbed = chi.add(&SuperOp::from_natural(p, 4).unwrap()).unwrap();
        assert!(gekad_residual(&perturbed, &phi, &n_elem).unwrap() >= 1e-4);
    }

    #[test]
    fn rejects_zero_element() {
        let phi = random_superop(2, 6, MapKind::General);
        assert!(matches!(
            gekad_solve(&phi, &ComplexMatrix::zeros(2, 2)),
            Err(Error::ZeroElement(_))
        ));
        let tiny = ComplexMatrix::unit(2, 0, 0).scale(C64::new(1e-13, 0.0));
        assert!(gekad_solve(&phi, &tiny).is_err());
    }

    #[test]
    fn degenerate_first_factor() {
        let phi = SuperOp::from_fn(1, |s| s.scale(C64::new(2.0, 0.0))).unwrap();
        let sol = gekad_solve(&phi, &ComplexMatrix::identity(2)).unwrap();
        assert_eq!(sol.solution_space_dim, 0);
        assert!(sol.defect <= 1e-8);
    }
}
