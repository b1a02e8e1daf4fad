use std::f64::consts::PI;

use approx::assert_relative_eq;
use proptest::prelude::*;
use tempus_core::clock::{clock_check, ladder_state};
use tempus_core::dynamics::{mandelstam_tamm_check, return_probability_curve};
use tempus_core::sampling::{random_hermitian, random_state, rng_for};
use tempus_core::timepovm::OscillatorPhase;
use tempus_core::widths::{check_equivalent_width_identity, overall_width};
use tempus_core::{evolve, fourier_pair, moments, Axis, AxisKind, GridState, C64};

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 48,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn evolution_is_a_unitary_group(seed in any::<u64>(), dim in 2usize..9, t1 in -3.0..3.0f64, t2 in -3.0..3.0f64) {
        let mut r = rng_for(seed, 0);
        let h = random_hermitian(&mut r, dim).unwrap();
        let psi = random_state(&mut r, dim, 1.0).unwrap();
        let a = evolve(&evolve(&psi, &h, t1).unwrap(), &h, t2).unwrap();
        let b = evolve(&psi, &h, t1 + t2).unwrap();
        prop_assert!((a.norm() - 1.0).abs() < 1e-12);
        let gap: f64 = a.amplitudes.iter().zip(&b.amplitudes).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        prop_assert!(gap < 1e-10, "gap {gap}");
    }

    #[test]
    fn mandelstam_tamm_on_random_systems(seed in any::<u64>(), dim in 2usize..11) {
        let mut r = rng_for(seed, 1);
        let h = random_hermitian(&mut r, dim).unwrap();
        let a = random_hermitian(&mut r, dim).unwrap();
        let psi = random_state(&mut r, dim, 1.0).unwrap();
        let (c, rep) = mandelstam_tamm_check(&a, &psi, &h).unwrap();
        prop_assert!(rep.pass, "{rep:?}");
        prop_assert!(c.tau * c.delta_h >= 0.5 - 1e-8);
    }

    #[test]
    fn survival_stays_above_cosine(seed in any::<u64>(), dim in 2usize..11) {
        let mut r = rng_for(seed, 2);
        let h = random_hermitian(&mut r, dim).unwrap();
        let psi = random_state(&mut r, dim, 1.0).unwrap();
        let (_, var) = moments(&h, &psi).unwrap();
        let ax = Axis::linspace(AxisKind::Time, 0.0, PI / (2.0 * var.sqrt()), 101).unwrap();
        let c = return_probability_curve(&psi, &h, ax).unwrap();
        for (i, p) in c.p_values.iter().enumerate() {
            prop_assert!(*p >= (ax.value(i) * var.sqrt()).cos().powi(2) - 1e-10);
        }
    }

    #[test]
    fn energy_offset_does_not_move_the_clock(n in 2usize..12, omega in 0.5..4.0f64, shift in -10.0..10.0f64) {
        let (psi, h) = ladder_state(n, omega, 1.0).unwrap();
        let period = 2.0 * PI / omega;
        let a = clock_check(&psi, &h, 0.0, period).unwrap();
        let b = clock_check(&psi, &h.shifted(shift), 0.0, period).unwrap();
        prop_assert!((a.delta_t - period / n as f64).abs() < 1e-9);
        prop_assert!((a.delta_t - b.delta_t).abs() < 1e-9);
        prop_assert!(a.reports.iter().chain(&b.reports).all(|r| r.pass));
    }

    #[test]
    fn plancherel_with_hbar(center in -2.0..2.0f64, width in 0.5..2.0f64, k in -3.0..3.0f64, hbar in 0.5..2.0f64) {
        let ax = Axis::centered(AxisKind::Time, 0.02, 4096).unwrap();
        let f = GridState::gaussian(ax, hbar, center, width, k).unwrap();
        let pair = fourier_pair(&f).unwrap();
        let lhs: f64 = f.density().iter().sum::<f64>() * ax.step;
        let rhs: f64 = pair.f_tilde.iter().map(|z| z.norm_sqr()).sum::<f64>() * pair.energy_axis.step;
        assert_relative_eq!(lhs, 2.0 * PI / hbar * rhs, max_relative = 1e-10);
    }

    #[test]
    fn equivalent_width_identity_with_chirp(a in 0.3..2.0f64, chirp in -1.0..1.0f64, hbar in 0.5..2.0f64) {
        let ax = Axis::centered(AxisKind::Time, 0.02, 8192).unwrap();
        let phi = GridState::from_fn(ax, hbar, |t| (C64::new(-a, chirp) * t * t).exp()).unwrap();
        let (_, _, r) = check_equivalent_width_identity(&phi).unwrap();
        prop_assert!(r.pass, "{r:?}");
    }

    #[test]
    fn overall_width_grows_with_alpha_and_ignores_shifts(w in 0.3..3.0f64, cells in 0i32..40) {
        let ax = Axis::centered(AxisKind::Energy, 0.01, 4001).unwrap();
        let dist = |s: f64| -> Vec<f64> {
            ax.values().iter().map(|x| (-(x - s) * (x - s) / (2.0 * w * w)).exp()).collect()
        };
        let d = dist(0.0);
        let mut last = 0.0;
        for alpha in [0.55, 0.7, 0.85, 0.95] {
            let v = overall_width(&d, &ax, alpha).unwrap();
            prop_assert!(v > last);
            last = v;
        }
        let shifted = dist(cells as f64 * ax.step);
        assert_relative_eq!(
            overall_width(&d, &ax, 0.8).unwrap(),
            overall_width(&shifted, &ax, 0.8).unwrap(),
            max_relative = 1e-9
        );
    }

    #[test]
    fn phase_povm_axioms(nmax in 8usize..24, bins in 2usize..40) {
        let p = OscillatorPhase::new(nmax).unwrap().povm(bins).unwrap();
        let ax = p.axioms();
        prop_assert!(ax.min_eigenvalue >= -1e-10);
        prop_assert!(ax.normalization_defect <= 1e-8);
    }
}
