//! Two-photon decay of the doubly excited state: ordered-time emission
//! kernels per channel pair, pair probabilities, the bunching ratio r2, and
//! the overlap with the two-photon N00N state.

use crate::error::{Error, Result};
use crate::expsum::ExpSum;
use crate::one_photon::{Channel, MARGINAL_COEFF_TOL, RATE_FLOOR};
use crate::ops::kraus;
use crate::ops::Operator4;
use crate::params::SystemParams;
use crate::states::{QubitVector, GG};
use crate::C64;

/// Ordered pair of emission directions: `first` at `t1`, `second` at `t2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ChannelPair {
    pub first: Channel,
    pub second: Channel,
}

impl ChannelPair {
    pub const RR: ChannelPair = ChannelPair {
        first: Channel::Right,
        second: Channel::Right,
    };
    pub const LL: ChannelPair = ChannelPair {
        first: Channel::Left,
        second: Channel::Left,
    };
    pub const RL: ChannelPair = ChannelPair {
        first: Channel::Right,
        second: Channel::Left,
    };
    pub const LR: ChannelPair = ChannelPair {
        first: Channel::Left,
        second: Channel::Right,
    };
    pub const ALL: [ChannelPair; 4] = [Self::RR, Self::LL, Self::RL, Self::LR];

    pub fn is_parallel(self) -> bool {
        self.first == self.second
    }
}

impl std::fmt::Display for ChannelPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}{}", self.first, self.second)
    }
}

/// Ordered-time two-photon amplitude from `|ee>`, in separable closed form:
/// `lambda(t1, t2) = prefactor * e^{-first_rate * t1} * relative(t2 - t1)`
/// on the wedge `t1 <= t2` (zero outside).
#[derive(Clone, Debug)]
pub struct TwoPhotonKernel {
    pub pair: ChannelPair,
    pub prefactor: C64,
    pub first_rate: f64,
    pub relative: ExpSum,
}

impl TwoPhotonKernel {
    pub fn value(&self, t1: f64, t2: f64) -> C64 {
        if t2 < t1 || t1 < 0.0 {
            return C64::ZERO;
        }
        self.prefactor * (-self.first_rate * t1).exp() * self.relative.value(t2 - t1)
    }
}

/// Closed-form emission kernel. Writing `p = e^{-i theta}` (right) or
/// `e^{+i theta}` (left) for each vertex, the cascade
/// `<gg| J_m K(t2-t1) J_l K(t1) |ee>` collapses to
///
///   -(gamma/2) e^{-gamma t1} [ (1+p_l)(1+p_m)/2 e^{-mu_+ D/2}
///                            + (p_l-1)(1-p_m)/2 e^{-mu_- D/2} ],  D = t2-t1,
///
/// which evaluates to the stored `prefactor * relative` form: both parallel
/// kernels share the bracket `cos^2(theta/2) E_+ + sin^2(theta/2) E_-` with
/// prefactors `-gamma e^{-/+ i theta}` (so `lambda_LL = e^{2 i theta}
/// lambda_RR`), and the antiparallel kernels are equal with the relative
/// minus sign on the `E_-` term.
pub fn two_photon_kernel(p: &SystemParams, pair: ChannelPair) -> TwoPhotonKernel {
    let r = p.rates();
    let half = 0.5 * p.theta;
    let (c2, s2) = (half.cos().powi(2), half.sin().powi(2));
    let prefactor = match pair {
        ChannelPair::RR => -p.gamma * Channel::Right.vertex_phase(p.theta),
        ChannelPair::LL => -p.gamma * Channel::Left.vertex_phase(p.theta),
        _ => C64::new(-p.gamma, 0.0),
    };
    let s_sign = if pair.is_parallel() { 1.0 } else { -1.0 };
    let relative = ExpSum::new([
        (C64::new(c2, 0.0), 0.5 * r.mu_plus),
        (C64::new(s_sign * s2, 0.0), 0.5 * r.mu_minus),
    ]);
    TwoPhotonKernel {
        pair,
        prefactor,
        first_rate: p.gamma,
        relative,
    }
}

/// The same amplitude assembled by operator composition,
/// `<gg| J_second K(t2-t1) J_first K(t1) |ee>`. Used to cross-check the
/// closed form; quadratic cost per point.
pub fn kernel_by_composition(
    p: &SystemParams,
    pair: ChannelPair,
    t1: f64,
    t2: f64,
) -> Result<C64> {
    if t2 < t1 {
        return Err(Error::InvalidInput(format!(
            "emission times out of order: t1={t1} t2={t2}"
        )));
    }
    let jump = |ch: Channel| match ch {
        Channel::Right => Operator4::jump_right(p),
        Channel::Left => Operator4::jump_left(p),
    };
    let v = kraus(p, t1)?.apply(&QubitVector::ee());
    let v = jump(pair.first).apply(&v);
    let v = kraus(p, t2 - t1)?.apply(&v);
    let v = jump(pair.second).apply(&v);
    Ok(v.0[GG])
}

/// Wedge-integrated emission probability
/// `int_0^inf dt2 int_0^t2 dt1 |lambda|^2`, separable into
/// `|prefactor|^2 / (2 first_rate)` times the L2 norm of `relative`.
pub fn pair_probability(kernel: &TwoPhotonKernel) -> Result<f64> {
    let rel = kernel
        .relative
        .drop_marginal(RATE_FLOOR, MARGINAL_COEFF_TOL)?;
    Ok(kernel.prefactor.norm_sqr() / (2.0 * kernel.first_rate) * rel.l2_norm_sqr()?)
}

/// Bunching statistics of the two-photon decay. `r2` is the antiparallel to
/// parallel probability ratio from the integrated kernels; `r2_printed` is an
/// alternative algebraic convention that disagrees with the integration (see
/// `r2_printed` docs). Both are always reported.
#[derive(Clone, Copy, Debug)]
pub struct BunchingReport {
    pub p_rr: f64,
    pub p_ll: f64,
    pub p_rl: f64,
    pub p_lr: f64,
    pub p_parallel: f64,
    pub p_antiparallel: f64,
    /// `None` when a decay rate vanishes (partial single-excitation decay):
    /// the asymptotic ratio is then reported as undefined rather than from
    /// truncated probabilities.
    pub r2: Option<f64>,
    pub r2_printed: f64,
    pub partial_decay: bool,
}

/// Alternative algebraic convention for r2, evaluated verbatim with
/// `s = sin(theta)`, `d = s - g_c`:
///
///   [(2 - s^2)(1 + d^2) + s^4] / [(2 - s^2)(1 + d^2) - s^4]
///
/// Note numerator >= denominator for all inputs, so this expression never
/// drops below 1 and cannot reproduce the integrated ratio (0 at controlled
/// antiresonance, 1/3 at plain antiresonance). It is computed and exported
/// alongside the integrated value precisely so the disagreement stays
/// visible; the integrated value is the one validated by quadrature.
pub fn r2_printed(p: &SystemParams) -> f64 {
    let s2 = p.sin_theta() * p.sin_theta();
    let d = p.sin_theta() - p.g_c;
    let base = (2.0 - s2) * (1.0 + d * d);
    (base + s2 * s2) / (base - s2 * s2)
}

/// Integrated-ratio closed form `(1 + d^2 - s^2) / (1 + d^2 + s^2)`,
/// matching the wedge integrals of the emission kernels.
pub fn r2_integrated_closed(p: &SystemParams) -> f64 {
    let s2 = p.sin_theta() * p.sin_theta();
    let d = p.sin_theta() - p.g_c;
    (1.0 + d * d - s2) / (1.0 + d * d + s2)
}

pub fn bunching_report(p: &SystemParams) -> Result<BunchingReport> {
    let rates = p.rates();
    let partial_decay = rates.gamma_plus <= RATE_FLOOR || rates.gamma_minus <= RATE_FLOOR;
    let prob = |pair| pair_probability(&two_photon_kernel(p, pair));
    let (p_rr, p_ll) = (prob(ChannelPair::RR)?, prob(ChannelPair::LL)?);
    let (p_rl, p_lr) = (prob(ChannelPair::RL)?, prob(ChannelPair::LR)?);
    let p_parallel = p_rr + p_ll;
    let p_antiparallel = p_rl + p_lr;
    Ok(BunchingReport {
        p_rr,
        p_ll,
        p_rl,
        p_lr,
        p_parallel,
        p_antiparallel,
        r2: (!partial_decay).then(|| p_antiparallel / p_parallel),
        r2_printed: r2_printed(p),
        partial_decay,
    })
}

/// A normalized output field mode against which photon records are
/// projected.
#[derive(Clone, Debug)]
pub struct OutputMode {
    pub channel: Channel,
    pub envelope: ExpSum,
}

impl OutputMode {
    /// The default mode `sqrt(gamma) e^{-gamma t / 2}`.
    pub fn exponential(channel: Channel, gamma: f64) -> OutputMode {
        OutputMode {
            channel,
            envelope: ExpSum::term(C64::new(gamma.sqrt(), 0.0), C64::new(0.5 * gamma, 0.0)),
        }
    }

    pub fn check_normalized(&self, tol: f64) -> Result<()> {
        let norm = self.envelope.l2_norm_sqr()?;
        if (norm - 1.0).abs() > tol {
            return Err(Error::ModeNotNormalized(norm));
        }
        Ok(())
    }
}

/// Overlaps of the emitted two-photon record (up to horizon `t`) with the
/// two-photon Fock states `|2 0>` and `|0 2>` of the given modes.
#[derive(Clone, Copy, Debug)]
pub struct NoonOverlap {
    /// `<2_R 0_L | field(t)>`
    pub branch_right: C64,
    /// `<0_R 2_L | field(t)>`
    pub branch_left: C64,
}

const MODE_NORM_TOL: f64 = 1e-9;

/// Overlap of one parallel-pair record with the two-photon state of `mode`:
/// `sqrt(2) * int_0^t dt2 int_0^t2 dt1 conj(xi(t1) xi(t2)) lambda(t1, t2)`
/// (the sqrt(2) is the bosonic double contraction against `(c^dag)^2/sqrt(2!)`).
/// Separability in `t1` keeps the whole computation inside the exponential
/// algebra: the inner integral is a running integral of an ExpSum, the outer
/// a finite-horizon integral of the product.
pub fn noon_branch(p: &SystemParams, t: f64, mode: &OutputMode) -> Result<C64> {
    mode.check_normalized(MODE_NORM_TOL)?;
    if !(t >= 0.0) {
        return Err(Error::NegativeTime(t));
    }
    let pair = match mode.channel {
        Channel::Right => ChannelPair::RR,
        Channel::Left => ChannelPair::LL,
    };
    let kernel = two_photon_kernel(p, pair);
    let xi_conj = mode.envelope.conj();
    let mut total = C64::ZERO;
    for &(c, z) in kernel.relative.terms() {
        // lambda splits as e^{-z t2} * e^{-(first_rate - z) t1} per term
        let inner = xi_conj
            .mul(&ExpSum::term(C64::ONE, C64::from(kernel.first_rate) - z))
            .cumulative_integral()?;
        let outer = xi_conj.mul(&ExpSum::term(c, z)).mul(&inner);
        total += outer.integral_to(t);
    }
    Ok(2f64.sqrt() * kernel.prefactor * total)
}

pub fn noon_overlap(
    p: &SystemParams,
    t: f64,
    modes: (&OutputMode, &OutputMode),
) -> Result<NoonOverlap> {
    let (right, left) = modes;
    if right.channel != Channel::Right || left.channel != Channel::Left {
        return Err(Error::InvalidInput(
            "modes must be passed as (right, left)".into(),
        ));
    }
    Ok(NoonOverlap {
        branch_right: noon_branch(p, t, right)?,
        branch_left: noon_branch(p, t, left)?,
    })
}

/// Fidelity of the emitted record with the target `(|2_R 0_L> - |0_R 2_L>)/sqrt(2)`.
pub fn noon_fidelity(p: &SystemParams, t: f64, modes: (&OutputMode, &OutputMode)) -> Result<f64> {
    let o = noon_overlap(p, t, modes)?;
    Ok(0.5 * (o.branch_right - o.branch_left).norm_sqr())
}

/// Default-mode fidelity at a controlled antiresonance in closed form:
/// `(1 - e^{-gamma t})^4`.
pub fn noon_fidelity_ideal(gamma: f64, t: f64) -> f64 {
    (1.0 - (-gamma * t).exp()).powi(4)
}

/// Both default modes for the given decay rate.
pub fn default_modes(gamma: f64) -> (OutputMode, OutputMode) {
    (
        OutputMode::exponential(Channel::Right, gamma),
        OutputMode::exponential(Channel::Left, gamma),
    )
}
