//! Randomized structural properties of the library, checked with proptest.
//!
//! These complement the acceptance criteria: instead of pinning values at
//! chosen operating points, they assert relations that must hold across the
//! whole parameter plane — contraction, semigroup composition, eigenstate
//! structure, mirror symmetry, normalization, and agreement between closed
//! forms and quadrature.

use std::f64::consts::PI;

use proptest::prelude::*;
use wqed::one_photon::{
    emission_probabilities, photon_waveform, r1_closed, Channel, RatioState,
};
use wqed::ops::{kraus, Operator4};
use wqed::trajectory::{sample_trajectory, TrajectoryConfig};
use wqed::two_photon::{
    bunching_report, default_modes, kernel_by_composition, noon_fidelity, noon_fidelity_ideal,
    two_photon_kernel, ChannelPair,
};
use wqed::{C64, QubitVector, SystemParams};

/// Phases away from the exact resonances, where both collective rates are
/// comfortably positive and all asymptotic quantities are well defined.
fn generic_theta() -> impl Strategy<Value = f64> {
    prop_oneof![0.02..(PI - 0.02), (PI + 0.02)..(2.0 * PI - 0.02)]
}

prop_compose! {
    fn generic_params()(
        gamma in 0.2f64..3.0,
        theta in generic_theta(),
        g_c in -2.0f64..2.0,
    ) -> SystemParams {
        SystemParams::new(gamma, theta, g_c).unwrap()
    }
}

prop_compose! {
    /// Any operating point, resonances included (gamma fixed where the
    /// property is scale-covariant anyway).
    fn any_params()(
        theta in 0.0..(2.0 * PI),
        g_c in -2.0f64..2.0,
    ) -> SystemParams {
        SystemParams::new(1.0, theta, g_c).unwrap()
    }
}

prop_compose! {
    fn arb_vector()(c in prop::array::uniform8(-1.0f64..1.0)) -> QubitVector {
        QubitVector([
            C64::new(c[0], c[1]),
            C64::new(c[2], c[3]),
            C64::new(c[4], c[5]),
            C64::new(c[6], c[7]),
        ])
    }
}

fn simpson(a: f64, b: f64, n: usize, f: impl Fn(f64) -> f64) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

proptest! {
    /// The no-click propagator never increases a norm and composes as a
    /// semigroup, at any operating point.
    #[test]
    fn no_click_propagator_contracts_and_composes(
        p in any_params(),
        v in arb_vector(),
        t1 in 0.0f64..4.0,
        t2 in 0.0f64..4.0,
    ) {
        let k1 = kraus(&p, t1).unwrap();
        let k2 = kraus(&p, t2).unwrap();
        prop_assert!(k1.apply(&v).norm() <= v.norm() * (1.0 + 1e-12));
        let defect = k1.mul(&k2).max_abs_diff(&kraus(&p, t1 + t2).unwrap());
        prop_assert!(defect <= 1e-12, "semigroup defect {defect}");
    }

    /// Parity states and the doubly excited state are exact eigenstates of
    /// the no-click evolution, with the advertised complex rates.
    #[test]
    fn decay_eigenstructure(p in any_params(), t in 0.0f64..4.0) {
        let k = kraus(&p, t).unwrap();
        let r = p.rates();

        let cases = [
            (QubitVector::psi_plus(), (-r.mu_plus * 0.5 * t).exp()),
            (QubitVector::psi_minus(), (-r.mu_minus * 0.5 * t).exp()),
            (QubitVector::ee(), C64::new((-p.gamma * t).exp(), 0.0)),
            (QubitVector::gg(), C64::ONE),
        ];
        for (state, eigenvalue) in cases {
            let evolved = k.apply(&state);
            let expected = state.scale(eigenvalue);
            for i in 0..4 {
                prop_assert!(
                    (evolved.0[i] - expected.0[i]).norm() <= 1e-12,
                    "component {i}: {} vs {}", evolved.0[i], expected.0[i]
                );
            }
        }
    }

    /// Every jump operator annihilates the ground state exactly.
    #[test]
    fn jumps_annihilate_the_ground_state(p in any_params()) {
        let gg = QubitVector::gg();
        for j in [
            Operator4::jump_right(&p),
            Operator4::jump_left(&p),
            Operator4::jump_sym(&p),
            Operator4::jump_antisym(&p),
        ] {
            prop_assert_eq!(j.apply(&gg).norm(), 0.0);
        }
    }

    /// Swapping the state chirality inverts the emission ratio, and the
    /// bare-qubit ratio never leaves [1/3, 3].
    #[test]
    fn ratio_reciprocity_and_bound(p in generic_params()) {
        let rl = r1_closed(&p, RatioState::PsiLeft);
        let rr = r1_closed(&p, RatioState::PsiRight);
        if !rl.divergent && !rr.divergent {
            prop_assert!((rl.value * rr.value - 1.0).abs() <= 1e-9);
        }
        let r_eg = r1_closed(&p, RatioState::FirstExcited);
        let r_ge = r1_closed(&p, RatioState::SecondExcited);
        prop_assert!(!r_eg.divergent && !r_ge.divergent);
        prop_assert!((r_eg.value * r_ge.value - 1.0).abs() <= 1e-9);
        prop_assert!(r_eg.value <= 3.0 + 1e-9 && r_eg.value >= 1.0 / 3.0 - 1e-9);
    }

    /// The integrated waveform probabilities reproduce the closed-form
    /// ratio of the first-excited state.
    #[test]
    fn integrated_probabilities_match_the_closed_ratio(p in generic_params()) {
        let dir = emission_probabilities(&p, &QubitVector::eg()).unwrap();
        let closed = r1_closed(&p, RatioState::FirstExcited).value;
        prop_assert!(
            (dir.p_left - closed * dir.p_right).abs() <= 1e-9 * dir.total(),
            "P_L = {}, r1 * P_R = {}", dir.p_left, closed * dir.p_right
        );
        prop_assert!((dir.total() - 1.0).abs() <= 1e-9);
    }

    /// The closed-form truncated emission integral agrees with direct
    /// quadrature of the waveform density.
    #[test]
    fn waveform_integral_matches_quadrature(
        p in generic_params(),
        c in prop::array::uniform4(-1.0f64..1.0),
        horizon in 0.5f64..8.0,
    ) {
        let state = QubitVector([
            C64::ZERO,
            C64::new(c[0], c[1]),
            C64::new(c[2], c[3]),
            C64::ZERO,
        ]);
        prop_assume!(state.norm() > 0.1);
        let state = state.normalized().unwrap();
        for channel in [Channel::Right, Channel::Left] {
            let wf = photon_waveform(&p, &state, channel).unwrap();
            let closed = wf.emission_probability_to(horizon);
            let quad = simpson(0.0, horizon, 4000, |t| wf.value(t).norm_sqr());
            prop_assert!(
                (closed - quad).abs() <= 1e-8,
                "channel {channel:?}: closed {closed} vs quadrature {quad}"
            );
        }
    }

    /// The factored two-photon kernel equals the amplitude rebuilt from
    /// survival, vertex, and one-excitation evolution.
    #[test]
    fn pair_kernel_matches_composition(
        p in generic_params(),
        t1 in 0.0f64..3.0,
        dt in 0.0f64..3.0,
    ) {
        let t2 = t1 + dt;
        for pair in ChannelPair::ALL {
            let direct = two_photon_kernel(&p, pair).value(t1, t2);
            let composed = kernel_by_composition(&p, pair, t1, t2).unwrap();
            prop_assert!(
                (direct - composed).norm() <= 1e-11,
                "{pair:?}: {direct} vs {composed}"
            );
        }
    }

    /// Pair probabilities are mirror symmetric to the last bit and sum to
    /// one away from the resonances.
    #[test]
    fn pair_probabilities_are_symmetric_and_normalized(p in generic_params()) {
        let rep = bunching_report(&p).unwrap();
        prop_assert_eq!(rep.p_rr, rep.p_ll);
        prop_assert_eq!(rep.p_rl, rep.p_lr);
        prop_assert!(!rep.partial_decay);
        let total = rep.p_parallel + rep.p_antiparallel;
        prop_assert!((total - 1.0).abs() <= 1e-9, "total {total}");
    }

    /// At a controlled antiresonance the path-entangled fidelity follows
    /// (1 - e^{-gamma t})^4 for every gamma, with the matched modes.
    #[test]
    fn noon_fidelity_follows_the_ideal_curve(
        gamma in 0.2f64..3.0,
        gt in 0.1f64..6.0,
        flip in proptest::bool::ANY,
    ) {
        // Both controlled antiresonances, theta = pi/2 (g_c = 1) and
        // theta = 3 pi / 2 (g_c = -1).
        let (theta, g_c) = if flip { (1.5 * PI, -1.0) } else { (0.5 * PI, 1.0) };
        let p = SystemParams::new(gamma, theta, g_c).unwrap();
        let t = gt / gamma;
        let modes = default_modes(gamma);
        let f = noon_fidelity(&p, t, (&modes.0, &modes.1)).unwrap();
        let ideal = noon_fidelity_ideal(gamma, t);
        prop_assert!((f - ideal).abs() <= 1e-9, "F = {f}, ideal = {ideal}");
    }

    /// A trajectory is a pure function of (operating point, seed, index):
    /// resampling reproduces clicks and final state bit for bit.
    #[test]
    fn trajectories_are_deterministic(
        p in generic_params(),
        seed in proptest::num::u64::ANY,
        idx in 0u64..1000,
    ) {
        let config = TrajectoryConfig::new(5e-3 / p.gamma, 10.0 / p.gamma).unwrap();
        let a = sample_trajectory(&p, &QubitVector::ee(), &config, seed, idx).unwrap();
        let b = sample_trajectory(&p, &QubitVector::ee(), &config, seed, idx).unwrap();
        prop_assert_eq!(a.clicks.len(), b.clicks.len());
        for (ca, cb) in a.clicks.iter().zip(&b.clicks) {
            prop_assert_eq!(ca.time.to_bits(), cb.time.to_bits());
            prop_assert_eq!(ca.channel, cb.channel);
        }
        for i in 0..4 {
            prop_assert_eq!(a.final_state.0[i].re.to_bits(), b.final_state.0[i].re.to_bits());
            prop_assert_eq!(a.final_state.0[i].im.to_bits(), b.final_state.0[i].im.to_bits());
        }
    }
}
