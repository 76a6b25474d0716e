use std::f64::consts::PI;

use proptest::prelude::*;
use qrouter::sampling::{random_antisymmetric_point, random_symmetric_point};
use qrouter::steady_state::steady_state_residual;
use qrouter::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn emitter() -> impl Strategy<Value = EmitterParams> {
    (10.0..30.0f64, 0.01..3.0f64, 0.01..3.0f64).prop_map(|(w, a, b)| EmitterParams::new(w, a, b).unwrap())
}

fn config() -> impl Strategy<Value = (RouterConfig, f64)> {
    (emitter(), emitter(), 0.01..5.0f64, -10.0..10.0f64, 0.1..3.0f64).prop_map(|(e1, e2, wl, det, v)| {
        let k = (e1.transition_frequency() + det * e1.total_width()).max(0.5);
        (RouterConfig::new(e1, e2, wl * 2.0 * PI * v / k, v).unwrap(), k)
    })
}

fn regular(c: &RouterConfig, k: f64) -> bool {
    interference_factors(k, c).denominator().norm() > 1e-3
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn probabilities_sum_to_one((c, k) in config()) {
        prop_assume!(regular(&c, k));
        let a = scattering_amplitudes(&c, k).unwrap();
        prop_assert!(conservation_defect(&a) < 1e-9);
        for p in a.probabilities().to_array() {
            prop_assert!((-1e-12..=1.0 + 1e-9).contains(&p));
        }
    }

    #[test]
    fn periodic_in_separation((c, k) in config(), n in 1u32..5) {
        prop_assume!(regular(&c, k));
        let shifted = c.with_separation(c.separation() + n as f64 * PI * c.group_velocity() / k).unwrap();
        let a = scattering_amplitudes(&c, k).unwrap();
        let b = scattering_amplitudes(&shifted, k).unwrap();
        prop_assert!(a.max_difference(&b) < 1e-8);
    }

    #[test]
    fn oracles_agree((c, k) in config()) {
        prop_assume!(regular(&c, k));
        let sol = steady_state_solve(&c, k).unwrap();
        prop_assert!(steady_state_residual(&sol, &c, EquationForm::Corrected) < 1e-12);
        let closed = scattering_amplitudes(&c, k).unwrap();
        let scale = closed.to_array().iter().map(|z| z.norm()).fold(1.0, f64::max);
        prop_assert!(amplitudes_from_steady_state(&sol, &c).max_difference(&closed) < 1e-11 * scale);
    }

    #[test]
    fn symmetric_case_has_no_backward_outputs(seed in any::<u64>()) {
        let s = random_symmetric_point(&mut ChaCha8Rng::seed_from_u64(seed));
        let a = scattering_amplitudes(&s.point.config, s.point.wavenumber).unwrap();
        prop_assert!(a.reflect_a.norm() < 1e-10 && a.transfer_backward_b.norm() < 1e-10);
        let (t, f) = symmetric_closed_form(s.theta, s.beta);
        let p = a.probabilities();
        prop_assert!((p.transmission - t).abs() < 1e-9 && (p.forward_transfer - f).abs() < 1e-9);
    }

    #[test]
    fn antisymmetric_standing_wave_is_transparent(seed in any::<u64>()) {
        let p = random_antisymmetric_point(&mut ChaCha8Rng::seed_from_u64(seed));
        let a = scattering_amplitudes(&p.config, p.wavenumber).unwrap().probabilities();
        prop_assert!((a.transmission - 1.0).abs() < 1e-10);
    }

    #[test]
    fn far_detuned_probe_passes(e1 in emitter(), e2 in emitter(), l in 0.01..3.0f64) {
        let c = RouterConfig::new(e1, e2, l, 1.0).unwrap();
        let k = e1.transition_frequency().max(e2.transition_frequency()) + 1e4 * c.max_width();
        let p = scattering_amplitudes(&c, k).unwrap().probabilities();
        prop_assert!(p.transmission > 1.0 - 1e-6);
    }

    #[test]
    fn line_b_decoupled_gets_nothing(w1 in 10.0..30.0f64, w2 in 10.0..30.0f64, g1 in 0.01..3.0f64,
                                     g2 in 0.01..3.0f64, l in 0.01..3.0f64, det in -5.0..5.0f64) {
        let e1 = EmitterParams::new(w1, g1, 0.0).unwrap();
        let e2 = EmitterParams::new(w2, g2, 0.0).unwrap();
        let c = RouterConfig::new(e1, e2, l, 1.0).unwrap();
        let k = w1 + det * g1;
        prop_assume!(regular(&c, k));
        let a = scattering_amplitudes(&c, k).unwrap();
        prop_assert!(a.transfer_forward_b.norm() == 0.0 && a.transfer_backward_b.norm() == 0.0);
        let p = a.probabilities();
        prop_assert!((p.transmission + p.reflection - 1.0).abs() < 1e-9);
    }

    #[test]
    fn emitter_swap_preserves_transmission((c, k) in config()) {
        // Reciprocity: transmission is the same from either end.
        prop_assume!(regular(&c, k));
        let swapped = c.with_emitters(*c.emitter2(), *c.emitter1()).unwrap();
        let a = scattering_amplitudes(&c, k).unwrap().probabilities();
        let b = scattering_amplitudes(&swapped, k).unwrap().probabilities();
        prop_assert!((a.transmission - b.transmission).abs() < 1e-9);
    }
}
