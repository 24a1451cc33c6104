//! Certified lower bounds on `‖Φ ⊗ id_k‖` by alternating ascent.
//!
//! For fixed unit vectors `(η, ξ)` the functional `X ↦ ⟨η, (Φ⊗id_k)(X) ξ⟩`
//! equals `Tr(G^* X)` with `G = (Φ†⊗id_k)(η ξ^*)`, and its maximum over
//! contractions is attained at the polar unitary of `G`. For fixed `X` the
//! best `(η, ξ)` is the leading singular pair of `(Φ⊗id_k)(X)`. Alternating
//! the two steps never decreases the objective.
//!
//! For maps on `M_m` the level `k = m` already attains the cb norm. That is
//! a classical fact assumed here, not checked; every estimate records the
//! level it was computed at.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{tensor_identity_apply, SuperOp};
use crate::linalg::{ginibre_from_rng, operator_norm, polar_unitary, top_singular_pair, ComplexMatrix, C64};

#[derive(Clone, Debug)]
pub struct CbOptions {
    pub restarts: usize,
    pub max_iters: usize,
    /// Stop a restart once the objective improves by less than this.
    pub tol: f64,
    pub seed: u64,
    /// Extra starting contraction, tried before the random restarts.
    pub warm_start: Option<ComplexMatrix>,
}

impl Default for CbOptions {
    fn default() -> Self {
        Self {
            restarts: 32,
            max_iters: 200,
            tol: 1e-10,
            seed: 0,
            warm_start: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CbEstimate {
    pub value: f64,
    pub level: usize,
    /// Contraction in `M_m ⊗ M_k` with `‖(Φ⊗id_k)(witness)‖ = value`.
    pub witness: ComplexMatrix,
    pub restarts: usize,
    /// Whether the best restart reached stationarity within `max_iters`.
    pub converged: bool,
}

struct Ascent {
    value: f64,
    witness: ComplexMatrix,
    converged: bool,
}

fn ascend(
    forward: &DMatrix<C64>,
    backward: &DMatrix<C64>,
    m: usize,
    k: usize,
    start: ComplexMatrix,
    opts: &CbOptions,
) -> Ascent {
    let mut x = start;
    let mut value = f64::NEG_INFINITY;
    let mut converged = false;
    for _ in 0..opts.max_iters {
        let y = tensor_identity_apply(forward, m, k, &x);
        let pair = top_singular_pair(&y);
        if pair.sigma - value < opts.tol {
            value = value.max(pair.sigma);
            converged = true;
            break;
        }
        value = pair.sigma;
        if value == 0.0 {
            converged = true;
            break;
        }
        let outer = ComplexMatrix::from_inner(&pair.left * pair.right.adjoint());
        let g = tensor_identity_apply(backward, m, k, &outer);
        x = polar_unitary(&g);
    }
    Ascent {
        value,
        witness: x,
        converged,
    }
}

/// Lower bound on `‖Φ ⊗ id_level‖`, best over `opts.restarts` random unitary
/// starts (seeded `opts.seed + r`) plus the optional warm start.
///
/// The returned value is recomputed from the witness, so it is a genuine
/// lower bound whatever the convergence state.
pub fn cb_norm_lower(phi: &SuperOp, level: usize, opts: &CbOptions) -> CbEstimate {
    let level = level.max(1);
    let m = phi.dim();
    let d = m * level;
    let forward = phi.natural().inner().clone();
    let backward = phi.natural().inner().adjoint();

    let mut starts: Vec<ComplexMatrix> = Vec::with_capacity(opts.restarts + 1);
    if let Some(w) = &opts.warm_start {
        if w.rows() == d && w.cols() == d {
            starts.push(w.clone());
        }
    }
    for r in 0..opts.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(r as u64));
        starts.push(polar_unitary(&ginibre_from_rng(&mut rng, d, d)));
    }
    if starts.is_empty() {
        starts.push(ComplexMatrix::identity(d));
    }

    let mut best: Option<Ascent> = None;
    for start in starts {
        let run = ascend(&forward, &backward, m, level, start, opts);
        if best.as_ref().is_none_or(|b| run.value > b.value) {
            best = Some(run);
        }
    }
    let best = best.expect("at least one start");
    let value = operator_norm(&tensor_identity_apply(&forward, m, level, &best.witness));
    CbEstimate {
        value,
        level,
        witness: best.witness,
        restarts: opts.restarts,
        converged: best.converged,
    }
}
