use proptest::prelude::*;
use slicemap_core::duality::{
    left_slice, mod_left, mod_right, right_slice, slice_decompose, slice_reconstruct, tensor_functional, Functional,
    TensorElement,
};
use slicemap_core::linalg::{kron, max_abs_diff, random_ginibre, ComplexMatrix, FactorDims, C64};

fn dims() -> impl Strategy<Value = FactorDims> {
    (1usize..5, 1usize..5).prop_map(|(m, n)| FactorDims::new(m, n).unwrap())
}

fn element(dims: FactorDims, seed: u64) -> TensorElement {
    let d = dims.total();
    TensorElement::new(dims, random_ginibre(d, d, seed)).unwrap()
}

fn functional(d: usize, seed: u64) -> Functional {
    Functional::new(random_ginibre(d, d, seed)).unwrap()
}

fn id(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pairing_is_consistent(dims in dims(), seed in any::<u64>()) {
        let u = element(dims, seed);
        let rho = functional(dims.m, seed ^ 1);
        let tau = functional(dims.n, seed ^ 2);
        let whole = tensor_functional(&rho, &tau).eval(u.mat()).unwrap();
        let via_left = rho.eval(&left_slice(&tau, &u).unwrap()).unwrap();
        let via_right = tau.eval(&right_slice(&rho, &u).unwrap()).unwrap();
        prop_assert!((whole - via_left).norm() <= 1e-10);
        prop_assert!((whole - via_right).norm() <= 1e-10);
    }

    #[test]
    fn left_slice_of_elementary_tensor(dims in dims(), seed in any::<u64>()) {
        let s = random_ginibre(dims.m, dims.m, seed);
        let t = random_ginibre(dims.n, dims.n, seed ^ 3);
        let tau = functional(dims.n, seed ^ 4);
        let u = TensorElement::elementary(&s, &t).unwrap();
        let expected = s.scale(tau.eval(&t).unwrap());
        prop_assert!(max_abs_diff(&left_slice(&tau, &u).unwrap(), &expected) <= 1e-12);
    }

    #[test]
    fn slice_module_identity(dims in dims(), seed in any::<u64>()) {
        let FactorDims { m, n } = dims;
        let u = element(dims, seed);
        let a = random_ginibre(n, n, seed ^ 5);
        let b = random_ginibre(n, n, seed ^ 6);
        let tau = functional(n, seed ^ 7);
        let sandwiched = TensorElement::new(dims, &(&kron(&id(m), &a) * u.mat()) * &kron(&id(m), &b)).unwrap();
        let b_tau_a = mod_left(&b, &mod_right(&tau, &a).unwrap()).unwrap();
        let lhs = left_slice(&tau, &sandwiched).unwrap();
        let rhs = left_slice(&b_tau_a, &u).unwrap();
        prop_assert!(max_abs_diff(&lhs, &rhs) <= 1e-10);
    }

    #[test]
    fn first_factor_module_property(dims in dims(), seed in any::<u64>()) {
        let FactorDims { m, n } = dims;
        let u = element(dims, seed);
        let a = random_ginibre(m, m, seed ^ 8);
        let b = random_ginibre(m, m, seed ^ 9);
        let tau = functional(n, seed ^ 10);
        let sandwiched = TensorElement::new(dims, &(&kron(&a, &id(n)) * u.mat()) * &kron(&b, &id(n))).unwrap();
        let lhs = left_slice(&tau, &sandwiched).unwrap();
        let rhs = &(&a * &left_slice(&tau, &u).unwrap()) * &b;
        prop_assert!(max_abs_diff(&lhs, &rhs) <= 1e-10);
    }

    #[test]
    fn tensor_functional_module_identity(dims in dims(), seed in any::<u64>()) {
        let FactorDims { m, n } = dims;
        let rho = functional(m, seed);
        let tau = functional(n, seed ^ 11);
        let a = random_ginibre(n, n, seed ^ 12);
        let b = random_ginibre(n, n, seed ^ 13);
        let lhs = &(&kron(&id(m), &a) * tensor_functional(&rho, &tau).rep()) * &kron(&id(m), &b);
        let a_tau_b = mod_left(&a, &mod_right(&tau, &b).unwrap()).unwrap();
        prop_assert!(max_abs_diff(&lhs, tensor_functional(&rho, &a_tau_b).rep()) <= 1e-12);
    }

    #[test]
    fn slices_are_linear(dims in dims(), seed in any::<u64>(), re in -2.0f64..2.0, im in -2.0f64..2.0) {
        let alpha = C64::new(re, im);
        let u = element(dims, seed);
        let v = element(dims, seed ^ 14);
        let tau = functional(dims.n, seed ^ 15);
        let combo = TensorElement::new(dims, &u.mat().scale(alpha) + v.mat()).unwrap();
        let lhs = left_slice(&tau, &combo).unwrap();
        let rhs = &left_slice(&tau, &u).unwrap().scale(alpha) + &left_slice(&tau, &v).unwrap();
        prop_assert!(max_abs_diff(&lhs, &rhs) <= 1e-12);
    }

    #[test]
    fn decompose_then_reconstruct(dims in dims(), seed in any::<u64>()) {
        let u = element(dims, seed);
        let back = slice_reconstruct(dims, &slice_decompose(&u)).unwrap();
        prop_assert!(max_abs_diff(back.mat(), u.mat()) <= 1e-13);
    }
}
