//! Which way does the photon go?
//!
//! A single excitation shared between the emitters radiates into the right-
//! and left-moving channels with generally different probabilities. The
//! left/right ratio has a closed form; for the bare state `|eg>` it never
//! exceeds 3, while the phase-matched superpositions `psi_L` / `psi_R` can
//! make the contrast perfect: at a controlled antiresonance all light exits
//! one way.

use wqed::one_photon::{
    emission_probabilities, photon_waveform, r1_closed, Channel, RatioState,
};
use wqed::report::fmt_sig;
use wqed::SystemParams;

fn main() {
    let pi = std::f64::consts::PI;

    // The textbook point: theta = pi/2, g_c = 0, first emitter excited.
    let p = SystemParams::new(1.0, 0.5 * pi, 0.0).unwrap();
    let eg = RatioState::FirstExcited.vector(p.theta);
    let dir = emission_probabilities(&p, &eg).unwrap();
    println!("state |eg> at theta = pi/2, g_c = 0:");
    println!("  P_right = {}", fmt_sig(dir.p_right));
    println!("  P_left  = {}", fmt_sig(dir.p_left));
    println!("  r1 = P_left / P_right = {}", fmt_sig(dir.ratio.value));
    println!(
        "  closed form agrees: {}",
        fmt_sig(r1_closed(&p, RatioState::FirstExcited).value)
    );

    // The emitted waveform itself: amplitude into each channel over time.
    println!();
    println!("waveform |f(t)|^2 from |eg> (same point):");
    let wf_r = photon_waveform(&p, &eg, Channel::Right).unwrap();
    let wf_l = photon_waveform(&p, &eg, Channel::Left).unwrap();
    println!("{:>6} {:>16} {:>16}", "t", "right", "left");
    for k in 0..=6 {
        let t = k as f64 * 0.5;
        println!(
            "{:>6} {:>16} {:>16}",
            format!("{t:.1}"),
            fmt_sig(wf_r.density(t)),
            fmt_sig(wf_l.density(t))
        );
    }

    // The bare-state ratio is bounded: scanning theta with g_c = 0 never
    // pushes r1(|eg>) above 3.
    println!();
    let mut best = (0.0, 0.0);
    for k in 0..=400 {
        let theta = k as f64 * pi / 200.0;
        let p = SystemParams::new(1.0, theta, 0.0).unwrap();
        let r = r1_closed(&p, RatioState::FirstExcited).value;
        if r > best.1 {
            best = (theta, r);
        }
    }
    println!(
        "max over theta of r1(|eg>) = {} at theta/pi = {:.3} (bound: 3)",
        fmt_sig(best.1),
        best.0 / pi
    );

    // Perfect directionality needs the controlled antiresonance and the
    // matched superposition psi_L: the left channel then closes exactly.
    let ca = SystemParams::new(1.0, 0.5 * pi, 1.0).unwrap();
    let psi_l = RatioState::PsiLeft.vector(ca.theta);
    let dir_ca = emission_probabilities(&ca, &psi_l).unwrap();
    let ratio_ca = r1_closed(&ca, RatioState::PsiLeft);
    println!();
    println!("state psi_L at the controlled antiresonance (theta = pi/2, g_c = 1):");
    println!("  P_right = {}", fmt_sig(dir_ca.p_right));
    println!("  P_left  = {}", fmt_sig(dir_ca.p_left));
    println!(
        "  r1 = {} (divergent = {})",
        fmt_sig(ratio_ca.value),
        ratio_ca.divergent
    );

    // Reciprocity: the mirrored state inverts the ratio exactly.
    let p2 = SystemParams::new(1.0, 1.1, -0.4).unwrap();
    let r_l = r1_closed(&p2, RatioState::PsiLeft).value;
    let r_r = r1_closed(&p2, RatioState::PsiRight).value;
    println!();
    println!("reciprocity at a generic point (theta = 1.1, g_c = -0.4):");
    println!("  r1(psi_L) * r1(psi_R) = {}", fmt_sig(r_l * r_r));
}
