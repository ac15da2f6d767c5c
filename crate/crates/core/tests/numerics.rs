use proptest::prelude::*;
use tetra_bridge::numkernel::{
    c64, gamma_involution, hermitian_eig, is_rotation, mat_exp, svd3_rotations, unvec, vec,
    ComplexMat, RealMat,
};

fn real3() -> impl Strategy<Value = RealMat> {
    prop::array::uniform9(-3.0f64..3.0).prop_map(|v| RealMat::new(3, 3, v.to_vec()).unwrap())
}

fn complex(n: usize, scale: f64) -> impl Strategy<Value = ComplexMat> {
    prop::collection::vec((-scale..scale, -scale..scale), n * n).prop_map(move |v| {
        ComplexMat::new(n, n, v.into_iter().map(|(r, i)| c64(r, i)).collect()).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn svd_factors_are_rotations(m in real3()) {
        let svd = svd3_rotations(&m).unwrap();
        prop_assert!(is_rotation(&svd.s_hat, 1e-10));
        prop_assert!(is_rotation(&svd.t_hat, 1e-10));
        prop_assert!(svd.reconstruct().distance(&m) <= 1e-10 * (1.0 + m.frobenius_norm()));
        let [a, b, c] = svd.lambda;
        prop_assert!(a >= b - 1e-12 && b >= c.abs() - 1e-12);
        // |det| survives as the product of signed values
        prop_assert!((a * b * c - m.determinant()).abs() <= 1e-9 * (1.0 + m.frobenius_norm().powi(3)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn exp_times_exp_of_negation_is_identity(m in complex(4, 1.5)) {
        let e = mat_exp(&m).unwrap();
        let inv = mat_exp(&m.scale(c64(-1.0, 0.0))).unwrap();
        let scale = 1.0 + e.frobenius_norm() * inv.frobenius_norm();
        prop_assert!((&e * &inv).distance(&ComplexMat::identity(4)) <= 1e-12 * scale);
    }

    #[test]
    fn exp_commutes_with_permutation(v in prop::array::uniform16(-2.0f64..2.0), shift in 1usize..4) {
        let m = RealMat::new(4, 4, v.to_vec()).unwrap();
        let p = RealMat::from_fn(4, 4, |i, j| if (j + shift) % 4 == i { 1.0 } else { 0.0 });
        let lhs = mat_exp(&(&(&p * &m) * &p.transpose())).unwrap();
        let rhs = &(&p * &mat_exp(&m).unwrap()) * &p.transpose();
        prop_assert!(lhs.distance(&rhs) <= 1e-12 * (1.0 + rhs.frobenius_norm()));
    }

    #[test]
    fn exp_of_hermitian_matches_spectral_route(m in complex(3, 1.0)) {
        let h = &m + &m.adjoint();
        let eig = hermitian_eig(&h).unwrap();
        let d = ComplexMat::diag(&eig.eigenvalues.iter().map(|&x| c64(x.exp(), 0.0)).collect::<Vec<_>>());
        let spectral = &(&eig.eigenvectors * &d) * &eig.eigenvectors.adjoint();
        let direct = mat_exp(&h).unwrap();
        prop_assert!(direct.distance(&spectral) <= 1e-11 * (1.0 + direct.frobenius_norm()));
    }

    #[test]
    fn hermitian_eig_reconstructs(m in complex(4, 2.0)) {
        let h = &m + &m.adjoint();
        let eig = hermitian_eig(&h).unwrap();
        prop_assert!(eig.reconstruct().distance(&h) <= 1e-11 * (1.0 + h.frobenius_norm()));
        let gram = &eig.eigenvectors.adjoint() * &eig.eigenvectors;
        prop_assert!(gram.distance(&ComplexMat::identity(4)) <= 1e-12);
        prop_assert!(eig.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn gamma_is_an_involution(m in complex(9, 1.0)) {
        let twice = gamma_involution(&gamma_involution(&m).unwrap()).unwrap();
        prop_assert_eq!(twice, m);
    }

    #[test]
    fn vec_round_trip(m in complex(3, 1.0)) {
        prop_assert_eq!(unvec(&vec(&m).unwrap()).unwrap(), m);
    }
}

#[test]
fn gamma_rejects_non_square_dimension() {
    assert!(gamma_involution(&RealMat::identity(3)).is_err());
    assert!(unvec(&[1.0; 5]).is_err());
}
