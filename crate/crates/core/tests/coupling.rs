mod common;

use common::*;
use proptest::prelude::*;
use rand::Rng;
use wgqed::photonic::Channel;
use wgqed::{CouplingBundle, GreensDecomposition, PolarizationVector, WaveguideEnv};

fn bundle_case(seed: u64) -> (wgqed::EmitterModel, WaveguideEnv, wgqed::LossModel, f64) {
    let mut r = rng(seed);
    let ng = r.random_range(1..4);
    let ne = r.random_range(1..4);
    let model = model(&mut r, ng, ne, 0.3);
    let env = env(&mut r);
    let loss = passive_loss(&mut r, 0.3);
    let e_int = r.random_range(0.5..1.5);
    (model, env, loss, e_int)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn gamma_is_ground_trace_of_w(seed in any::<u64>()) {
        let (model, env, loss, e_int) = bundle_case(seed);
        let b = CouplingBundle::new(&model, &env, &loss, e_int).unwrap();
        for x in 0..b.n_excited() {
            for y in 0..b.n_excited() {
                let traced: num_complex::Complex64 = (0..b.n_ground()).map(|n| b.w().get(x, y, n, n)).sum();
                prop_assert!((traced - b.gamma()[(x, y)]).norm() <= 1e-14);
            }
        }
    }

    #[test]
    fn v_is_antisymmetrized_w(seed in any::<u64>()) {
        let (model, env, loss, e_int) = bundle_case(seed);
        let b = CouplingBundle::new(&model, &env, &loss, e_int).unwrap();
        let (ne, ng) = (b.n_excited(), b.n_ground());
        for ch in Channel::ALL {
            let w = b.w_channel(ch);
            let v = b.v_channel(ch);
            for x in 0..ne { for y in 0..ne { for n in 0..ng { for m in 0..ng {
                let expected = w.get(x, y, n, m) - w.get(y, x, m, n).conj();
                prop_assert!((v.get(x, y, n, m) - expected).norm() <= 1e-14);
            }}}}
        }
        for x in 0..ne { for y in 0..ne { for n in 0..ng { for m in 0..ng {
            let expected = b.w().get(x, y, n, m) - b.w().get(y, x, m, n).conj();
            prop_assert!((b.v().get(x, y, n, m) - expected).norm() <= 1e-14);
        }}}}
    }

    #[test]
    fn gamma_matches_direct_green_sandwich(seed in any::<u64>()) {
        let (model, env, loss, e_int) = bundle_case(seed);
        let b = CouplingBundle::new(&model, &env, &loss, e_int).unwrap();
        let g = GreensDecomposition::new(&env, &loss).unwrap().total().conj();
        for x in 0..model.n_excited() {
            for y in 0..model.n_excited() {
                let direct: num_complex::Complex64 = (0..model.n_ground())
                    .map(|n| -g.sandwich(model.dipole(n, x), &model.dipole(n, y).conj()) / env.epsilon0)
                    .sum();
                prop_assert!((direct - b.gamma()[(x, y)]).norm() <= 1e-13);
            }
        }
    }

    #[test]
    fn common_energy_shift_leaves_bundle_unchanged(seed in any::<u64>(), offset in -5.0f64..5.0) {
        let (model, env, loss, e_int) = bundle_case(seed);
        let a = CouplingBundle::new(&model, &env, &loss, e_int).unwrap();
        let shifted = model.shifted(offset, offset);
        let b = CouplingBundle::new(&shifted, &env, &loss, e_int + offset).unwrap();
        prop_assert_eq!(a.w(), b.w());
        prop_assert_eq!(a.v(), b.v());
        prop_assert_eq!(a.gamma(), b.gamma());
        prop_assert_eq!(a.x(), b.x());
        prop_assert_eq!(a.l(), b.l());
        for (da, db) in a.delta().iter().zip(b.delta()) {
            prop_assert!((da - db).abs() <= 1e-12 * (1.0 + offset.abs()));
        }
    }

    #[test]
    fn linear_field_couples_both_directions_equally(
        fx in -1.0f64..1.0, fy in -1.0f64..1.0, fz in -1.0f64..1.0, seed in any::<u64>()
    ) {
        let env = WaveguideEnv::with_field(PolarizationVector::real(fx, fy, fz));
        let d = vector(&mut rng(seed), 1.0);
        let f = env.e_forward.conj().dot(&d).norm();
        let b = env.e_backward().conj().dot(&d).norm();
        prop_assert!((f - b).abs() <= 1e-15);
        let g = GreensDecomposition::new(&env, &wgqed::LossModel::none()).unwrap();
        prop_assert_eq!(g.part(Channel::Forward), g.part(Channel::Backward));
    }

    #[test]
    fn passive_loss_gives_nonnegative_decay(seed in any::<u64>()) {
        let (model, env, loss, e_int) = bundle_case(seed);
        let b = CouplingBundle::new(&model, &env, &loss, e_int).unwrap();
        let op = b.decay_rate_operator();
        let herm = (&op + op.adjoint()) * num_complex::Complex64::new(0.5, 0.0);
        let scale = op.iter().map(|c| c.norm()).fold(1.0, f64::max);
        for ev in herm.symmetric_eigenvalues().iter() {
            prop_assert!(*ev >= -1e-12 * scale);
        }
    }
}
