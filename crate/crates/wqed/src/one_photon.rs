//! Single-excitation emission in closed form: survival amplitudes under the
//! no-click map, emitted waveforms per direction, emission probabilities and
//! the left/right ratio r1.

use crate::error::Result;
use crate::expsum::ExpSum;
use crate::ops::kraus;
use crate::params::SystemParams;
use crate::states::{QubitVector, EG, GE};
use crate::C64;

/// Tolerance for the single-excitation precondition on initial states.
pub const SECTOR_TOL: f64 = 1e-9;

/// A term whose rate has `Re z` at or below this floor is marginal: it never
/// decays at double precision.
pub const RATE_FLOOR: f64 = 1e-12;

/// Marginal terms with coefficients at or below this are exact-cancellation
/// residue (e.g. the dark component at resonance) and are dropped before
/// infinite-horizon integrals; larger ones are a real non-integrability.
pub const MARGINAL_COEFF_TOL: f64 = 1e-8;

/// `den <= num * DIVERGENCE_FACTOR` marks a ratio divergent: the suppressed
/// channel is zero to within double-precision arithmetic, as opposed to
/// merely large-but-finite directionality.
pub const DIVERGENCE_FACTOR: f64 = 1e-15;

/// Propagation direction of an emitted photon.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Channel {
    Right,
    Left,
}

impl Channel {
    /// Phase attached to the second qubit in this channel's jump operator:
    /// `e^{-i theta}` for right emission, `e^{+i theta}` for left.
    pub fn vertex_phase(self, theta: f64) -> C64 {
        match self {
            Channel::Right => C64::new(0.0, -theta).exp(),
            Channel::Left => C64::new(0.0, theta).exp(),
        }
    }

    pub fn other(self) -> Channel {
        match self {
            Channel::Right => Channel::Left,
            Channel::Left => Channel::Right,
        }
    }
}

impl std::fmt::Display for Channel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Channel::Right => "R",
            Channel::Left => "L",
        })
    }
}

/// Survival amplitudes `(a_eg, a_ge)` of a single-excitation state after
/// time `t` under the no-click map.
pub fn survival_amplitudes(
    p: &SystemParams,
    initial: &QubitVector,
    t: f64,
) -> Result<(C64, C64)> {
    initial.check_single_excitation(SECTOR_TOL)?;
    let v = kraus(p, t)?.apply(initial);
    Ok((v.0[EG], v.0[GE]))
}

/// The same amplitudes as functions of time. The no-click map is diagonal on
/// the Bell pair `psi_pm = (|eg> pm |ge>)/sqrt(2)` with decay `e^{-mu_pm t/2}`,
/// so each amplitude is a two-term exponential sum.
pub fn survival_expsums(p: &SystemParams, initial: &QubitVector) -> Result<(ExpSum, ExpSum)> {
    initial.check_single_excitation(SECTOR_TOL)?;
    let r = p.rates();
    let (alpha, beta) = (initial.0[EG], initial.0[GE]);
    let c_plus = 0.5 * (alpha + beta);
    let c_minus = 0.5 * (alpha - beta);
    let (z_plus, z_minus) = (0.5 * r.mu_plus, 0.5 * r.mu_minus);
    let a_eg = ExpSum::new([(c_plus, z_plus), (c_minus, z_minus)]);
    let a_ge = ExpSum::new([(c_plus, z_plus), (-c_minus, z_minus)]);
    Ok((a_eg, a_ge))
}

/// Emitted single-photon amplitude in one channel,
/// `f(t) = -i sqrt(gamma/2) [a_eg(t) + e^{-/+ i theta} a_ge(t)]`.
#[derive(Clone, Debug)]
pub struct PhotonWaveform {
    pub channel: Channel,
    pub source: QubitVector,
    pub amplitude: ExpSum,
}

impl PhotonWaveform {
    pub fn value(&self, t: f64) -> C64 {
        self.amplitude.value(t)
    }

    /// `|f(t)|^2`, the click-rate density.
    pub fn density(&self, t: f64) -> f64 {
        self.amplitude.value(t).norm_sqr()
    }

    pub fn sample_density(&self, ts: &[f64]) -> Vec<f64> {
        ts.iter().map(|&t| self.density(t)).collect()
    }

    /// Total emission probability `int_0^inf |f|^2`. Marginal terms (exact
    /// resonance residue) are dropped; a stable dark component simply never
    /// shows up here, so the probabilities of a partially stable state sum
    /// below one.
    pub fn emission_probability(&self) -> Result<f64> {
        self.amplitude
            .drop_marginal(RATE_FLOOR, MARGINAL_COEFF_TOL)?
            .l2_norm_sqr()
    }

    /// Emission probability up to a finite horizon.
    pub fn emission_probability_to(&self, t_max: f64) -> f64 {
        self.amplitude.l2_inner_to(&self.amplitude, t_max).re
    }
}

/// Closed-form waveform for a single-excitation initial state.
pub fn photon_waveform(
    p: &SystemParams,
    initial: &QubitVector,
    channel: Channel,
) -> Result<PhotonWaveform> {
    initial.check_single_excitation(SECTOR_TOL)?;
    let r = p.rates();
    let phase = channel.vertex_phase(p.theta);
    let vertex = C64::new(0.0, -1.0) * (0.5 * p.gamma).sqrt();
    let (alpha, beta) = (initial.0[EG], initial.0[GE]);
    let c_plus = 0.5 * (alpha + beta);
    let c_minus = 0.5 * (alpha - beta);
    let amplitude = ExpSum::new([
        (vertex * c_plus * (C64::ONE + phase), 0.5 * r.mu_plus),
        (vertex * c_minus * (C64::ONE - phase), 0.5 * r.mu_minus),
    ]);
    Ok(PhotonWaveform {
        channel,
        source: initial.clone(),
        amplitude,
    })
}

/// Left/right emission ratio with an explicit divergence flag, so exact
/// directionality is distinguishable from a large finite value downstream.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ratio {
    pub value: f64,
    pub divergent: bool,
}

impl Ratio {
    /// `num/den` with the divergence rule: `den` consistent with zero (at
    /// double precision) against a positive `num` is reported as infinite.
    /// `0/0` (nothing emitted either way) comes out as a quiet NaN.
    pub fn from_parts(num: f64, den: f64) -> Ratio {
        if num > 0.0 && den <= num * DIVERGENCE_FACTOR {
            Ratio {
                value: f64::INFINITY,
                divergent: true,
            }
        } else {
            Ratio {
                value: num / den,
                divergent: false,
            }
        }
    }
}

impl std::fmt::Display for Ratio {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.divergent {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.value)
        }
    }
}

/// Channel-resolved emission probabilities and their ratio `P_L / P_R`.
#[derive(Clone, Copy, Debug)]
pub struct DirectionalityResult {
    pub p_right: f64,
    pub p_left: f64,
    pub ratio: Ratio,
}

impl DirectionalityResult {
    pub fn total(&self) -> f64 {
        self.p_right + self.p_left
    }
}

/// Integrate both waveforms of an initial state.
pub fn emission_probabilities(
    p: &SystemParams,
    initial: &QubitVector,
) -> Result<DirectionalityResult> {
    let p_right = photon_waveform(p, initial, Channel::Right)?.emission_probability()?;
    let p_left = photon_waveform(p, initial, Channel::Left)?.emission_probability()?;
    Ok(DirectionalityResult {
        p_right,
        p_left,
        ratio: Ratio::from_parts(p_left, p_right),
    })
}

/// Initial states with a closed-form r1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RatioState {
    PsiLeft,
    PsiRight,
    /// `|eg>`: first qubit excited.
    FirstExcited,
    /// `|ge>`: second qubit excited.
    SecondExcited,
}

impl RatioState {
    pub fn vector(self, theta: f64) -> QubitVector {
        match self {
            RatioState::PsiLeft => QubitVector::psi_left(theta),
            RatioState::PsiRight => QubitVector::psi_right(theta),
            RatioState::FirstExcited => QubitVector::eg(),
            RatioState::SecondExcited => QubitVector::ge(),
        }
    }
}

/// Closed-form `r1 = P_L / P_R`. With `s = sin(theta)` and
/// `d = sin(theta) - g_c`:
///
///   r1(psi_L) = (1 + d^2 + s^2) / (1 + d^2 - s^2),   r1(psi_R) = 1/r1(psi_L),
///   r1(|eg>)  = (1 + d^2 + s d) / (1 + d^2 - s d),   r1(|ge>) = 1/r1(|eg>).
///
/// The psi_L denominator vanishes only at a controlled antiresonance, where
/// the ratio diverges; the |eg> form is bounded by 3.
pub fn r1_closed(p: &SystemParams, which: RatioState) -> Ratio {
    let s = p.sin_theta();
    let d = s - p.g_c;
    let base = 1.0 + d * d;
    let (num, den) = match which {
        RatioState::PsiLeft => (base + s * s, base - s * s),
        RatioState::PsiRight => (base - s * s, base + s * s),
        RatioState::FirstExcited => (base + s * d, base - s * d),
        RatioState::SecondExcited => (base - s * d, base + s * d),
    };
    Ratio::from_parts(num, den)
}

/// The same ratio from the integrated waveforms.
pub fn r1_integrated(p: &SystemParams, which: RatioState) -> Result<Ratio> {
    Ok(emission_probabilities(p, &which.vector(p.theta))?.ratio)
}
