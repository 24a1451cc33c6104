//! Per-trial bodies of the suites.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Fault, Measurement, Suite, SuiteConfig, Trace};
use crate::amplification::{
    amplify_left, amplify_right, block_amplify_element, block_amplify_with, compat_defects,
    elementary_tensor_rank, gekad_solve, left_amplify_element, slice_amplify_element,
    wittstock_consistency, BlockFault, SubalgebraEmbedding, SubalgebraMap,
};
use crate::duality::{
    dual_basis, left_slice, mod_left, mod_right, right_slice, tensor_functional, Functional,
    TensorElement,
};
use crate::error::Result;
use crate::linalg::{
    kron, max_abs_diff, min_hermitian_eigenvalue, operator_norm, random_ginibre, ComplexMatrix,
    FactorDims,
};
use crate::superop::{cb_norm_lower, random_superop, CbOptions, MapKind, SuperOp};

/// Largest `m·n` at which the uniqueness system is solved.
pub const GEKAD_MAX_TOTAL_DIM: usize = 4;
/// Trials per cell for the uniqueness system.
pub const GEKAD_TRIALS: usize = 20;
/// Largest `m` and `n` at which the ascent-based isometry check runs.
pub const ISOMETRY_GENERAL_MAX_DIM: usize = 3;
/// Trials per cell that include the ascent-based isometry check.
pub const ISOMETRY_GENERAL_TRIALS: usize = 2;

const ISOMETRY_RESTARTS: usize = 32;

pub(crate) struct TrialOptions {
    pub general_isometry: bool,
    pub fault: Option<Fault>,
}

impl TrialOptions {
    fn block_fault(&self) -> Option<BlockFault> {
        match self.fault {
            Some(Fault::CorruptBlockAmplify) => Some(BlockFault::TransposeBlockIndex),
            _ => None,
        }
    }
}

pub(crate) fn trials_for(suite: Suite, m: usize, n: usize, trials: usize) -> usize {
    match suite {
        Suite::Gekad if m * n > GEKAD_MAX_TOTAL_DIM => 0,
        Suite::Gekad => trials.min(GEKAD_TRIALS),
        Suite::Uniq => 1,
        _ => trials,
    }
}

pub(crate) fn tolerance(check: &str, config: &SuiteConfig) -> f64 {
    match check {
        "isometry-general" => config.tol_general,
        _ => config.tol,
    }
}

struct Draw(ChaCha8Rng);

impl Draw {
    fn new(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }

    fn seed(&mut self) -> u64 {
        self.0.next_u64()
    }

    fn map(&mut self, m: usize, kind: MapKind) -> SuperOp {
        let s = self.seed();
        random_superop(m, s, kind)
    }

    fn matrix(&mut self, rows: usize, cols: usize) -> ComplexMatrix {
        let s = self.seed();
        random_ginibre(rows, cols, s)
    }

    fn element(&mut self, dims: FactorDims) -> TensorElement {
        let d = dims.total();
        TensorElement::new(dims, self.matrix(d, d)).expect("tensor size")
    }

    fn functional(&mut self, dim: usize) -> Functional {
        Functional::new(self.matrix(dim, dim)).expect("square")
    }
}

fn one_tensor(m: usize, a: &ComplexMatrix) -> ComplexMatrix {
    kron(&ComplexMatrix::identity(m), a)
}

pub(crate) fn run_trial(
    suite: Suite,
    m: usize,
    n: usize,
    seed: u64,
    opts: &TrialOptions,
    trace: &mut Trace,
) -> Result<Vec<Measurement>> {
    let dims = FactorDims::new(m, n)?;
    let mut draw = Draw::new(seed);
    let out = match suite {
        Suite::Aac => aac(dims, &mut draw, opts, trace)?,
        Suite::Agree => agree(dims, &mut draw, opts, trace)?,
        Suite::Mult => mult(dims, &mut draw, trace)?,
        Suite::Isometry => isometry(dims, &mut draw, opts, trace)?,
        Suite::Commute => commute(dims, &mut draw, trace)?,
        Suite::Module => module(dims, &mut draw, trace)?,
        Suite::Slices => slices(dims, &mut draw, opts, trace)?,
        Suite::Kompa => kompa(dims, &mut draw, trace)?,
        Suite::Wittstock => wittstock(dims, &mut draw, trace)?,
        Suite::Cp => cp(dims, &mut draw, opts, trace)?,
        Suite::Gekad => gekad(dims, seed, trace)?,
        Suite::Uniq => uniq(dims, trace),
    };
    Ok(out)
}

/// `χ(Φ)(S ⊗ T) = Φ(S) ⊗ T` on both constructions.
fn aac(dims: FactorDims, draw: &mut Draw, opts: &TrialOptions, trace: &mut Trace) -> Result<Vec<Measurement>> {
    let phi = draw.map(dims.m, MapKind::General);
    let s = draw.matrix(dims.m, dims.m);
    let t = draw.matrix(dims.n, dims.n);
    let u = TensorElement::elementary(&s, &t)?;
    let expected = kron(&phi.apply(&s)?, &t);
    let via_slices = slice_amplify_element(&phi, &u)?;
    let via_blocks = block_amplify_element(&phi, &u, opts.block_fault())?;
    trace.matrix("S", &s);
    trace.matrix("T", &t);
    trace.matrix("u = S⊗T", u.mat());
    trace.matrix("Φ(S)⊗T", &expected);
    trace.matrix("χ(Φ)(u) [slices]", via_slices.mat());
    trace.matrix("χ(Φ)(u) [blocks]", via_blocks.mat());
    trace.matrix("defect [slices]", &(via_slices.mat() - &expected));
    let defect = max_abs_diff(via_slices.mat(), &expected).max(max_abs_diff(via_blocks.mat(), &expected));
    Ok(vec![Measurement::new("aac", defect)])
}

/// Slice and block constructions agree as maps.
fn agree(dims: FactorDims, draw: &mut Draw, opts: &TrialOptions, trace: &mut Trace) -> Result<Vec<Measurement>> {
    let phi = draw.map(dims.m, MapKind::General);
    let chi = amplify_right(&phi, dims.n);
    let blocks = block_amplify_with(&phi, dims.n, opts.block_fault());
    trace.matrix("natural χ(Φ) [slices]", chi.op.natural());
    trace.matrix("natural Φ^(∞) [blocks]", blocks.op.natural());
    trace.matrix("defect", &(chi.op.natural() - blocks.op.natural()));
    Ok(vec![Measurement::new("agree", chi.op.distance(&blocks.op))])
}

/// Multiplicativity, linearity and unitality of `χ`.
fn mult(dims: FactorDims, draw: &mut Draw, trace: &mut Trace) -> Result<Vec<Measurement>> {
    let phi = draw.map(dims.m, MapKind::General);
    let psi = draw.map(dims.m, MapKind::General);
    let alpha = draw.matrix(1, 1).get(0, 0);
    let beta = draw.matrix(1, 1).get(0, 0);
    let chi_phi = amplify_right(&phi, dims.n);
    let chi_psi = amplify_right(&psi, dims.n);
    let of_product = amplify_right(&phi.compose(&psi)?, dims.n);
    let product = chi_phi.op.compose(&chi_psi.op)?;
    trace.matrix("natural χ(ΦΨ)", of_product.op.natural());
    trace.matrix("natural χ(Φ)χ(Ψ)", product.natural());
    let mult = of_product.op.distance(&product);

    let combo = phi.scale(alpha).add(&psi.scale(beta))?;
    let lhs = amplify_right(&combo, dims.n).op;
    let rhs = chi_phi.op.scale(alpha).add(&chi_psi.op.scale(beta))?;
    let unital = amplify_right(&SuperOp::identity(dims.m), dims.n)
        .op
        .distance(&SuperOp::identity(dims.total()));
    trace.scalar("linearity defect", lhs.distance(&rhs));
    trace.scalar("unitality defect", unital);
    Ok(vec![
        Measurement::new("mult", mult),
        Measurement::new("linearity", lhs.distance(&rhs).max(unital)),
    ])
}

/// cb norm preserved: exactly for CP maps, by ascent for Hermitian-preserving ones.
fn isometry(dims: FactorDims, draw: &mut Draw, opts: &TrialOptions, trace: &mut Trace) -> Result<Vec<Measurement>> {
    let cp_seed = draw.seed();
    let general_seed = draw.seed();
    let ascent_seed = draw.seed();

    let phi = random_superop(dims.m, cp_seed, MapKind::CompletelyPositive);
    let chi = amplify_right(&phi, dims.n);
    let base = phi.cb_norm_cp()?;
    let amplified = chi.op.cb_norm_cp()?;
    trace.scalar("‖Φ‖_cb (CP)", base);
    trace.scalar("‖χ(Φ)‖_cb (CP)", amplified);
    let mut out = vec![Measurement::new("isometry", (amplified - base).abs())];

    let small = dims.m <= ISOMETRY_GENERAL_MAX_DIM && dims.n <= ISOMETRY_GENERAL_MAX_DIM;
    if opts.general_isometry && small {
        let phi = random_superop(dims.m, general_seed, MapKind::HermitianPreserving);
        let chi = amplify_right(&phi, dims.n);
        let cb = CbOptions {
            restarts: ISOMETRY_RESTARTS,
            seed: ascent_seed,
            ..CbOptions::default()
        };
        let base = cb_norm_lower(&phi, dims.m, &cb);
        let amplified = cb_norm_lower(&chi.op, dims.total(), &cb);
        trace.scalar("cb estimate Φ (level m)", base.value);
        trace.scalar("cb estimate χ(Φ) (level mn)", amplified.value);
        trace.matrix("witness Φ", &base.witness);
        out.push(Measurement::new("isometry-general", (amplified.value - base.value).abs()));
    }
    Ok(out)
}

/// `(Φ⊗id)(id⊗Ψ) = (id⊗Ψ)(Φ⊗id)`, as maps and on a random element.
fn commute(dims: FactorDims, draw: &mut Draw, trace: &mut Trace) -> Result<Vec<Measurement>> {
    let phi = draw.map(dims.m, MapKind::General);
    let psi = draw.map(dims.n, MapKind::General);
    let right = amplify_right(&phi, dims.n);
    let left = amplify_left(&psi, dims.m);
    let t1 = right.op.compose(&left.op)?;
    let t2 = left.op.compose(&right.op)?;
    trace.matrix("natural Φ⊗̃₁Ψ", t1.natural());
    trace.matrix("natural Φ⊗̃₂Ψ", t2.natural());
    let maps = t1.distance(&t2);

    let u = draw.element(dims);
    let a = slice_amplify_element(&phi, &left_amplify_element(&psi, &u)?)?;
    let b = left_amplify_element(&psi, &slice_amplify_element(&phi, &u)?)?;
    trace.matrix("u", u.mat());
    trace.matrix("χ(Φ)(id⊗Ψ)(u)", a.mat());
    trace.matrix("(id⊗Ψ)χ(Φ)(u)", b.mat());
    Ok(vec![Measurement::new("commute", maps.max(max_abs_diff(a.mat(), b.mat())))])
}

/// Bimodule property of `χ(Φ)` and the slice-map module identities.
fn module(dims: FactorDims, draw: &mut Draw, trace: &mut Trace) -> Result<Vec<Measurement>> {
    let FactorDims { m, n } = dims;
    let phi = draw.map(m, MapKind::General);
    let u = draw.element(dims);
    let a = draw.matrix(n, n);
    let b = draw.matrix(n, n);
    let tau = draw.functional(n);
    let am = draw.matrix(m, m);
    let bm = draw.matrix(m, m);

    let sandwiched = TensorElement::new(dims, &(&one_tensor(m, &a) * u.mat()) * &one_tensor(m, &b))?;
    let lhs = slice_amplify_element(&phi, &sandwiched)?;
    let chi_u = slice_amplify_element(&phi, &u)?;
    let rhs = &(&one_tensor(m, &a) * chi_u.mat()) * &one_tensor(m, &b);
    trace.matrix("u", u.mat());
    trace.matrix("χ(Φ)((1⊗a)u(1⊗b))", lhs.mat());
    trace.matrix("(1⊗a)χ(Φ)(u)(1⊗b)", &rhs);
    let bimodule = max_abs_diff(lhs.mat(), &rhs);

    // L_τ((1⊗a)u(1⊗b)) = L_{b·τ·a}(u)
    let b_tau_a = mod_left(&b, &mod_right(&tau, &a)?)?;
    let lemma = max_abs_diff(&left_slice(&tau, &sandwiched)?, &left_slice(&b_tau_a, &u)?);
    trace.scalar("slice module lemma defect", lemma);

    // L_τ((a⊗1)u(b⊗1)) = a L_τ(u) b
    let outer = kron(&am, &ComplexMatrix::identity(n));
    let outer_b = kron(&bm, &ComplexMatrix::identity(n));
    let m_side = TensorElement::new(dims, &(&outer * u.mat()) * &outer_b)?;
    let m_defect = max_abs_diff(&left_slice(&tau, &m_side)?, &(&(&am * &left_slice(&tau, &u)?) * &bm));
    trace.scalar("M-side module defect", m_defect);

    // (1⊗a)(ρ⊗τ)(1⊗b) = ρ⊗(a·τ·b) on representers
    let rho = draw.functional(m);
    let lhs_rep = &(&one_tensor(m, &a) * tensor_functional(&rho, &tau).rep()) * &one_tensor(m, &b);
    let a_tau_b = mod_left(&a, &mod_right(&tau, &b)?)?;
    let functional_defect = max_abs_diff(&lhs_rep, tensor_functional(&rho, &a_tau_b).rep());
    trace.scalar("functional module defect", functional_defect);

    Ok(vec![Measurement::new(
        "module",
        bimodule.max(lemma).max(m_defect).max(functional_defect),
    )])
}

/// `L_τ(χ(Φ)(u)) = Φ(L_τ(u))` for every coordinate functional, on both
/// constructions, plus the pairing identity for slices.
fn slices(dims: FactorDims, draw: &mut Draw, opts: &TrialOptions, trace: &mut Trace) -> Result<Vec<Measurement>> {
    let phi = draw.map(dims.m, MapKind::General);
    let u = draw.element(dims);
    let via_slices = slice_amplify_element(&phi, &u)?;
    let via_blocks = block_amplify_element(&phi, &u, opts.block_fault())?;
    trace.matrix("u", u.mat());
    trace.matrix("χ(Φ)(u) [slices]", via_slices.mat());
    trace.matrix("χ(Φ)(u) [blocks]", via_blocks.mat());
    let mut worst: f64 = 0.0;
    for (idx, tau) in dual_basis(dims.n).iter().enumerate() {
        let expected = phi.apply(&left_slice(tau, &u)?)?;
        for (label, v) in [("slices", &via_slices), ("blocks", &via_blocks)] {
            let got = left_slice(tau, v)?;
            let defect = max_abs_diff(&got, &expected);
            if trace.is_enabled() && defect > 0.0 {
                trace.matrix(format!("L_τ{idx}(χ(Φ)(u)) − Φ(L_τ{idx}(u)) [{label}]"), &(&got - &expected));
            }
            worst = worst.max(defect);
        }
    }

    let rho = draw.functional(dims.m);
    let tau = draw.functional(dims.n);
    let whole = tensor_functional(&rho, &tau).eval(u.mat())?;
    let via_left = rho.eval(&left_slice(&tau, &u)?)?;
    let via_right = tau.eval(&right_slice(&rho, &u)?)?;
    let pairing = (whole - via_left).norm().max((whole - via_right).norm());
    trace.scalar("pairing defect", pairing);
    Ok(vec![Measurement::new("slices", worst.max(pairing))])
}

fn subalgebras(n: usize) -> Result<Vec<(String, SubalgebraEmbedding)>> {
    let mut out = vec![
        ("diagonal".to_string(), SubalgebraEmbedding::diagonal(n)?),
        ("scalars".to_string(), SubalgebraEmbedding::scalars(n)?),
    ];
    if n >= 3 {
        out.push((format!("block[1,{}]", n - 1), SubalgebraEmbedding::block_diagonal(&[1, n - 1])?));
    }
    if n >= 4 {
        out.push(("block[2,2]".to_string(), SubalgebraEmbedding::block_diagonal(&[2, n - 2])?));
    }
    Ok(out)
}

/// Restriction of `χ_N(Φ)` to `M ⊗ N₀` is `χ_{N₀}(Φ)` and stays in `M ⊗ N₀`.
fn kompa(dims: FactorDims, draw: &mut Draw, trace: &mut Trace) -> Result<Vec<Measurement>> {
    let phi = draw.map(dims.m, MapKind::General);
    let mut worst: f64 = 0.0;
    for (label, emb) in subalgebras(dims.n)? {
        let d = compat_defects(&phi, &emb, 1, draw.seed())?;
        trace.scalar(format!("{label}: intrinsic defect"), d.intrinsic);
        trace.scalar(format!("{label}: invariance defect"), d.invariance);
        worst = worst.max(d.max());
    }
    Ok(vec![Measurement::new("kompa", worst)])
}

/// Blockwise amplification of `Φ₀ ∘ E` restricted to `M₀ ⊗ M_n` equals the
/// slice amplification of `Φ₀`.
fn wittstock(dims: FactorDims, draw: &mut Draw, trace: &mut Trace) -> Result<Vec<Measurement>> {
    let mut worst: f64 = 0.0;
    for (label, emb) in subalgebras(dims.m)? {
        let images = (0..emb.basis().len()).map(|_| draw.matrix(dims.m, dims.m)).collect();
        let phi0 = SubalgebraMap::new(emb, images)?;
        let defect = wittstock_consistency(&phi0, dims.n, 1, draw.seed())?;
        trace.scalar(format!("{label}: restriction defect"), defect);
        worst = worst.max(defect);
    }
    Ok(vec![Measurement::new("wittstock", worst)])
}

/// `χ(Φ)` is CP for CP `Φ`; defect is the Choi negativity.
fn cp(dims: FactorDims, draw: &mut Draw, opts: &TrialOptions, trace: &mut Trace) -> Result<Vec<Measurement>> {
    let phi = match opts.fault {
        Some(Fault::MislabelNonCp) => SuperOp::transpose_map(dims.m),
        _ => draw.map(dims.m, MapKind::CompletelyPositive),
    };
    let chi = amplify_right(&phi, dims.n);
    let choi = chi.op.choi();
    let min_eig = min_hermitian_eigenvalue(choi);
    let skew = operator_norm(&choi.anti_hermitian_part());
    trace.matrix("Choi χ(Φ)", choi);
    trace.scalar("min eigenvalue", min_eig);
    trace.scalar("anti-Hermitian norm", skew);
    Ok(vec![Measurement::new("cp", (-min_eig).max(skew).max(0.0))])
}

/// Uniqueness system for `Θ`; alternates `n₀ = E_11` and a random `n₀`.
fn gekad(dims: FactorDims, seed: u64, trace: &mut Trace) -> Result<Vec<Measurement>> {
    let mut draw = Draw::new(seed);
    let phi = draw.map(dims.m, MapKind::General);
    let n_elem = if seed % 2 == 0 {
        ComplexMatrix::unit(dims.n, 0, 0)
    } else {
        draw.matrix(dims.n, dims.n)
    };
    let sol = gekad_solve(&phi, &n_elem)?;
    trace.matrix("n₀", &n_elem);
    trace.count("solution-space dimension", sol.solution_space_dim);
    trace.scalar("residual", sol.residual);
    trace.matrix("natural Θ − χ(Φ)", &(sol.solution.natural() - amplify_right(&phi, dims.n).op.natural()));
    Ok(vec![Measurement {
        check: "gekad",
        defect: sol.defect,
        solution_space_dim: Some(sol.solution_space_dim),
    }])
}

/// Elementary tensors span `M_{mn}`; defect is the rank deficit.
fn uniq(dims: FactorDims, trace: &mut Trace) -> Vec<Measurement> {
    let d = dims.total();
    let rank = elementary_tensor_rank(dims);
    trace.count("rank of elementary-tensor Gram matrix", rank);
    trace.count("(mn)²", d * d);
    vec![Measurement::new("uniq", (d * d - rank) as f64)]
}
