use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tetra_bridge::gmap::{build_channel, compose, sic_basis};
use tetra_bridge::lindblad::{
    exp_report, gen_normal_form, h_normal, lindblad_certify, map_generator, omega_perp, Generator4,
};
use tetra_bridge::numkernel::{c64, mat_exp, match_real_spectra, ComplexMat};
use tetra_bridge::qchannel::{superoperator, unitary_lift};
use tetra_bridge::stochastic::{random_column_stochastic, random_rotation};
use tetra_bridge::tetra::{dot3, VERTICES};

fn hvec() -> impl Strategy<Value = [f64; 3]> {
    prop::array::uniform3(-2.0f64..2.0)
}

fn seeded() -> impl Strategy<Value = ChaCha8Rng> {
    any::<u64>().prop_map(ChaCha8Rng::seed_from_u64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn certification_is_invariant_under_rotation(h in hvec(), mut rng in seeded()) {
        let r = random_rotation(&mut rng);
        let rotated = Generator4::from_normal(&h, &r, 1e-9).unwrap();
        let plain = Generator4::new(h_normal(&h), 1e-9).unwrap();
        let a = lindblad_certify(&map_generator(&plain).unwrap()).unwrap();
        let b = lindblad_certify(&map_generator(&rotated).unwrap()).unwrap();
        prop_assert_eq!(a.certified(), b.certified());
        prop_assert!(match_real_spectra(&a.omega_perp_spectrum, &b.omega_perp_spectrum) <= 1e-10);

        let nf = gen_normal_form(&rotated).unwrap();
        prop_assert!(nf.reconstruct().distance(rotated.h()) <= 1e-12);
        let mut got = nf.h_vec.to_vec();
        let mut want = h.to_vec();
        got.sort_by(f64::total_cmp);
        want.sort_by(f64::total_cmp);
        for (x, y) in got.iter().zip(&want) {
            prop_assert!((x - y).abs() <= 1e-12);
        }
    }

    #[test]
    fn omega_perp_commutes_with_local_unitaries(mut rng in seeded()) {
        let u = unitary_lift(&random_rotation(&mut rng)).unwrap();
        let uu = u.kron(&u.conj());
        let w = omega_perp();
        prop_assert!((&uu * &w).distance(&(&w * &uu)) <= 1e-14);
    }

    #[test]
    fn omega_perp_spectrum_matches_vertex_rates(h in hvec()) {
        let g = Generator4::new(h_normal(&h), 1e-9).unwrap();
        let cert = lindblad_certify(&map_generator(&g).unwrap()).unwrap();
        let mut expect: Vec<f64> = (1..4).map(|i| 0.5 * dot3(&h, &VERTICES[i])).collect();
        expect.push(0.0);
        prop_assert!(match_real_spectra(&cert.omega_perp_spectrum, &expect) <= 1e-10);
        prop_assert_eq!(cert.certified(), g.is_classical_generator);
    }

    #[test]
    fn semigroup(h in hvec(), s in 0.0f64..2.0, t in 0.0f64..2.0) {
        let hn = h_normal(&h);
        let whole = mat_exp(&hn.scale(s + t)).unwrap();
        let split = &mat_exp(&hn.scale(s)).unwrap() * &mat_exp(&hn.scale(t)).unwrap();
        prop_assert!(whole.distance(&split) <= 1e-12 * (1.0 + whole.frobenius_norm()));

        let l = map_generator(&Generator4::new(hn, 1e-9).unwrap()).unwrap();
        let lifted = superoperator(&whole).unwrap();
        let direct = mat_exp(&l.scale(c64(s + t, 0.0))).unwrap();
        prop_assert!(lifted.distance(&direct) <= 1e-10 * (1.0 + direct.frobenius_norm()));
    }
}

#[test]
fn exp_report_for_certified_generators() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let g = loop {
            let h: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-2.0..2.0));
            let g = Generator4::from_normal(&h, &random_rotation(&mut rng), 1e-9).unwrap();
            let certified = lindblad_certify(&map_generator(&g).unwrap())
                .unwrap()
                .certified();
            if g.is_classical_generator && certified {
                break g;
            }
        };
        for s in exp_report(&g, &[0.1, 1.0, 5.0]).unwrap() {
            assert!(s.ok(), "{s:?}");
        }
    }
}

#[test]
fn qutrit_composition_identity() {
    let basis = sic_basis(3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let c1 = build_channel(&random_column_stochastic(9, &mut rng), &basis).unwrap();
        let c2 = build_channel(&random_column_stochastic(9, &mut rng), &basis).unwrap();
        let comp = compose(&c1, &c2).unwrap();
        assert!(comp.residual < 1e-12);
        assert!(comp.channel.completely_positive && comp.channel.trace_preserving);
    }
}

#[test]
fn qutrit_channel_acts_on_states() {
    let basis = sic_basis(3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let ch = build_channel(&random_column_stochastic(9, &mut rng), &basis).unwrap();
    let rho = ComplexMat::from_fn(3, 3, |i, j| {
        if i == j {
            c64(1.0 / 3.0, 0.0)
        } else {
            c64(0.1, 0.05 * (i as f64 - j as f64))
        }
    });
    let out = ch.act(&rho);
    assert!((out.trace() - c64(1.0, 0.0)).norm() < 1e-14);
    assert!(out.hermiticity_defect() < 1e-14);
}
