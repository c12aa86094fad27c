mod common;

use einselect::channels::{
    amplitude_damping, apply_to_apparatus, phase_damping, pointer_decoherence,
};
use einselect::correlations::{
    classical_correlation, maximize_classical_correlation, mutual_information, quantum_discord,
};
use einselect::io::{format_sig, inline_path, MatrixFile};
use einselect::qstate::{
    make_x_state, partial_trace, von_neumann_entropy, DensityMatrix, Spectrum, Subsystem,
    XStateParams,
};
use einselect::sampling::{
    random_basis, random_channel, random_classical_quantum, random_state, trial_rng,
};
use proptest::prelude::*;

fn state(seed: u64, dim: usize) -> DensityMatrix {
    random_state(&mut trial_rng(seed, 0), dim)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn entropy_is_additive_on_products(a in any::<u64>(), b in any::<u64>()) {
        let (x, y) = (state(a, 2), state(b, 2));
        let joint = von_neumann_entropy(&x.tensor(&y).unwrap()).unwrap();
        let sum = von_neumann_entropy(&x).unwrap() + von_neumann_entropy(&y).unwrap();
        prop_assert!((joint - sum).abs() < 1e-10);
    }

    #[test]
    fn partial_trace_is_linear(a in any::<u64>(), b in any::<u64>(), w in 0.0..=1.0f64) {
        let (x, y) = (state(a, 4), state(b, 4));
        for keep in [Subsystem::System, Subsystem::Apparatus] {
            let lhs = partial_trace(&x.mix(&y, w).unwrap(), keep).unwrap();
            let rhs = partial_trace(&x, keep).unwrap().mix(&partial_trace(&y, keep).unwrap(), w).unwrap();
            prop_assert!(lhs.max_abs_diff(&rhs) < 1e-14);
        }
    }

    #[test]
    fn x_state_round_trip(c in 0.0..0.5f64, z in -0.5..0.5f64, w in -0.5..0.5f64) {
        let b = 0.5 - c;
        prop_assume!(w.abs() <= c && z.abs() <= b);
        let params = XStateParams::new(c, b, z, w).unwrap();
        let back = XStateParams::from_state(&make_x_state(params).unwrap()).unwrap();
        prop_assert!((back.c - c).abs() < 1e-15 && (back.b - b).abs() < 1e-15);
        prop_assert!((back.z - z).abs() < 1e-15 && (back.w - w).abs() < 1e-15);
    }

    #[test]
    fn apparatus_channels_leave_the_system_alone(seed in any::<u64>()) {
        let rho = state(seed, 4);
        let channel = random_channel(&mut trial_rng(seed, 1)).unwrap();
        let out = apply_to_apparatus(&channel, &rho).unwrap();
        let before = partial_trace(&rho, Subsystem::System).unwrap();
        let after = partial_trace(&out, Subsystem::System).unwrap();
        prop_assert!(before.max_abs_diff(&after) < 1e-14);
    }

    #[test]
    fn phase_damping_composes(seed in any::<u64>(), p1 in 0.0..=1.0f64, p2 in 0.0..=1.0f64) {
        let rho = state(seed, 4);
        let twice = apply_to_apparatus(&phase_damping(p2).unwrap(),
            &apply_to_apparatus(&phase_damping(p1).unwrap(), &rho).unwrap()).unwrap();
        let once = apply_to_apparatus(&phase_damping(1.0 - (1.0 - p1) * (1.0 - p2)).unwrap(), &rho).unwrap();
        prop_assert!(twice.max_abs_diff(&once) < 1e-14);
    }

    #[test]
    fn amplitude_damping_composes(seed in any::<u64>(), p1 in 0.0..=1.0f64, p2 in 0.0..=1.0f64) {
        let rho = state(seed, 4);
        let twice = apply_to_apparatus(&amplitude_damping(p2).unwrap(),
            &apply_to_apparatus(&amplitude_damping(p1).unwrap(), &rho).unwrap()).unwrap();
        let once = apply_to_apparatus(&amplitude_damping(1.0 - (1.0 - p1) * (1.0 - p2)).unwrap(), &rho).unwrap();
        prop_assert!(twice.max_abs_diff(&once) < 1e-14);
    }

    #[test]
    fn classical_quantum_states_are_fixed_by_their_pointer_dephasing(seed in any::<u64>(), q in 0.0..=1.0f64) {
        let (rho, pointer) = random_classical_quantum(&mut trial_rng(seed, 0), 0.1).unwrap();
        let out = apply_to_apparatus(&pointer_decoherence(&pointer, q).unwrap(), &rho).unwrap();
        prop_assert!(out.max_abs_diff(&rho) < 1e-14);
    }

    #[test]
    fn spectrum_reconstructs(seed in any::<u64>()) {
        let rho = state(seed, 4);
        let s = Spectrum::of(rho.entries());
        let err = (s.reconstruct() - rho.entries()).iter().map(|x| x.norm()).fold(0.0, f64::max);
        prop_assert!(err < 1e-10);
        prop_assert!(s.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn format_sig_keeps_twelve_digits(x in prop::num::f64::NORMAL) {
        let back: f64 = format_sig(x, 12).parse().unwrap();
        prop_assert!(((back - x) / x).abs() <= 5e-12);
    }

    #[test]
    fn matrix_file_text_round_trip(seed in any::<u64>()) {
        let rho = state(seed, 4);
        let file = MatrixFile::from_state(&rho).with_uniform_std(0.01);
        let back = MatrixFile::parse_str(&file.to_text(), &inline_path()).unwrap();
        prop_assert_eq!(back, file);
    }
}

proptest! {
    // each case runs the full optimizer
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn no_basis_beats_the_maximum(seed in any::<u64>()) {
        let rho = state(seed, 4);
        let max = maximize_classical_correlation(&rho).unwrap();
        let mut rng = trial_rng(seed, 1);
        for _ in 0..16 {
            prop_assert!(classical_correlation(&rho, &random_basis(&mut rng)).unwrap() <= max.value + 1e-9);
        }
        prop_assert!((classical_correlation(&rho, &max.basis).unwrap() - max.value).abs() < 1e-12);
    }

    #[test]
    fn discord_is_nonnegative_and_bounded_by_mutual_information(seed in any::<u64>()) {
        let rho = state(seed, 4);
        let d = quantum_discord(&rho).unwrap();
        prop_assert!(d >= 0.0);
        prop_assert!(d <= mutual_information(&rho).unwrap() + 1e-12);
    }

    #[test]
    fn apparatus_channels_do_not_increase_the_maximum(seed in any::<u64>()) {
        let rho = state(seed, 4);
        let channel = random_channel(&mut trial_rng(seed, 1)).unwrap();
        let out = apply_to_apparatus(&channel, &rho).unwrap();
        let before = maximize_classical_correlation(&rho).unwrap().value;
        let after = maximize_classical_correlation(&out).unwrap().value;
        prop_assert!(after <= before + 1e-9, "{} > {}", after, before);
    }

    #[test]
    fn correlation_matches_the_sandwich_oracle(seed in any::<u64>()) {
        let rho = state(seed, 4);
        let s = von_neumann_entropy(&partial_trace(&rho, Subsystem::System).unwrap()).unwrap();
        let basis = random_basis(&mut trial_rng(seed, 1));
        let direct = common::j_direct(&rho, s, basis.bloch());
        prop_assert!((classical_correlation(&rho, &basis).unwrap() - direct).abs() < 1e-12);
    }
}
