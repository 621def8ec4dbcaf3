//! Monte-Carlo jump unraveling of the decay dynamics, and the statistics of
//! the heralded entanglement protocol built on it.
//!
//! Each step of width `dt` draws one uniform number. With probability
//! `p_ch = |J_ch psi|^2 dt` the detector of channel `ch` clicks and the state
//! collapses to `J_ch psi` (renormalized); otherwise the no-click propagator
//! `K(dt)` acts (renormalized). Using the exact `K(dt)` rather than its
//! first-order expansion removes one source of discretization error; what
//! remains is the first-order treatment of the click probabilities.
//!
//! Detection is either directional (right/left movers) or interferometric
//! (symmetric/antisymmetric combinations), matching the two ways the emitted
//! field can be resolved.
//!
//! Randomness is counter-based: every (master seed, trajectory, step) triple
//! maps to one u64 through a fixed avalanche permutation, so trajectories
//! are independent streams, any one of them can be regenerated in isolation,
//! and parallel execution is bitwise identical to serial.
//!
//! Modeling note: the scattering-phase increment that accompanies a click in
//! the full input-output unitary is dropped. With vacuum input it acts only
//! on the already-recorded photon and contributes a global phase per click,
//! which no exported statistic can see.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ops::{kraus, Operator4};
use crate::params::SystemParams;
use crate::states::{QubitVector, GG};

/// Trajectory stepping is kept an order of magnitude finer than the collision
/// bound: click probabilities are first order in `dt`.
pub const MAX_GAMMA_DT: f64 = 1e-2;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
const U64_TO_F64: f64 = 1.0 / ((1u64 << 53) as f64);

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Counter-based random stream: draw `i` of trajectory `k` under master seed
/// `s` is `mix64(mix64(s + GOLDEN (k+1)) + GOLDEN (i+1))`, with no state
/// beyond the counter itself.
#[derive(Clone, Debug)]
pub struct CounterRng {
    key: u64,
    counter: u64,
}

impl CounterRng {
    pub fn for_trajectory(master_seed: u64, trajectory: u64) -> Self {
        CounterRng {
            key: mix64(master_seed.wrapping_add(GOLDEN.wrapping_mul(trajectory.wrapping_add(1)))),
            counter: 0,
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix64(self.key.wrapping_add(GOLDEN.wrapping_mul(self.counter)))
    }

    /// Uniform on [0, 1) with 53-bit resolution.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * U64_TO_F64
    }
}

/// How the outgoing field is resolved at the detectors.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Detection {
    /// right-movers vs left-movers
    #[default]
    Directional,
    /// symmetric vs antisymmetric interferometric combinations
    Parity,
}

impl Detection {
    pub fn labels(self) -> [ClickLabel; 2] {
        match self {
            Detection::Directional => [ClickLabel::Right, ClickLabel::Left],
            Detection::Parity => [ClickLabel::Plus, ClickLabel::Minus],
        }
    }

    fn jumps(self, p: &SystemParams) -> [Operator4; 2] {
        match self {
            Detection::Directional => [Operator4::jump_right(p), Operator4::jump_left(p)],
            Detection::Parity => [Operator4::jump_sym(p), Operator4::jump_antisym(p)],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClickLabel {
    Right,
    Left,
    Plus,
    Minus,
}

impl std::fmt::Display for ClickLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ClickLabel::Right => "R",
            ClickLabel::Left => "L",
            ClickLabel::Plus => "+",
            ClickLabel::Minus => "-",
        })
    }
}

/// Step width, horizon, detection basis, and the optional post-herald
/// decoupling switch (freeze the state after the first click; a what-if for
/// protocols that shut off the coupling once the herald arrives).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrajectoryConfig {
    pub dt: f64,
    pub t_max: f64,
    pub detection: Detection,
    pub freeze_after_first_click: bool,
}

impl TrajectoryConfig {
    pub fn new(dt: f64, t_max: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidInput(format!(
                "trajectory step must be positive and finite, got {dt}"
            )));
        }
        if !(t_max.is_finite() && t_max >= dt) {
            return Err(Error::InvalidInput(format!(
                "horizon must cover at least one step, got t_max = {t_max}"
            )));
        }
        Ok(TrajectoryConfig {
            dt,
            t_max,
            detection: Detection::Directional,
            freeze_after_first_click: false,
        })
    }

    pub fn with_detection(mut self, detection: Detection) -> Self {
        self.detection = detection;
        self
    }

    pub fn with_freeze_after_first_click(mut self, freeze: bool) -> Self {
        self.freeze_after_first_click = freeze;
        self
    }

    pub fn n_steps(&self) -> usize {
        ((self.t_max / self.dt).round() as usize).max(1)
    }

    fn validate_for(&self, p: &SystemParams) -> Result<()> {
        let gdt = p.gamma * self.dt;
        if !(gdt > 0.0 && gdt <= MAX_GAMMA_DT * (1.0 + 1e-12)) {
            return Err(Error::InvalidInput(format!(
                "trajectory step gamma*dt = {gdt} must lie in (0, {MAX_GAMMA_DT}]"
            )));
        }
        Ok(())
    }
}

/// One detector event: when, which channel, and the conditional state left
/// behind.
#[derive(Clone, Copy, Debug)]
pub struct Click {
    pub time: f64,
    /// detector slot, 0 or 1; see [`Detection::labels`]
    pub channel: usize,
    pub label: ClickLabel,
    pub state: QubitVector,
}

/// One unraveling: everything needed to reproduce or inspect it.
#[derive(Clone, Debug)]
pub struct TrajectoryRecord {
    pub params: SystemParams,
    pub config: TrajectoryConfig,
    pub master_seed: u64,
    pub trajectory: u64,
    pub initial: QubitVector,
    pub clicks: Vec<Click>,
    pub final_state: QubitVector,
}

impl TrajectoryRecord {
    /// Conditional state at time `t`: the last click's state (or the initial
    /// state) propagated forward by the no-click map and renormalized.
    pub fn state_at(&self, t: f64) -> Result<QubitVector> {
        if !(t >= 0.0) {
            return Err(Error::NegativeTime(t));
        }
        let mut base = &self.initial;
        let mut t0 = 0.0;
        for c in &self.clicks {
            if c.time <= t {
                base = &c.state;
                t0 = c.time;
            } else {
                break;
            }
        }
        if self.config.freeze_after_first_click && !self.clicks.is_empty() && t0 > 0.0 {
            return Ok(*base);
        }
        let k = kraus(&self.params, t - t0)?;
        k.apply(base).normalized()
    }
}

/// Runs one unraveling. Reproducible from `(params, initial, config,
/// master_seed, trajectory)` alone; trajectories with different indices are
/// independent streams of the same master seed.
pub fn sample_trajectory(
    p: &SystemParams,
    initial: &QubitVector,
    config: &TrajectoryConfig,
    master_seed: u64,
    trajectory: u64,
) -> Result<TrajectoryRecord> {
    config.validate_for(p)?;
    if (initial.norm() - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidInput(format!(
            "initial state must be normalized, got norm {}",
            initial.norm()
        )));
    }
    let dt = config.dt;
    let k = kraus(p, dt)?;
    let jumps = config.detection.jumps(p);
    let labels = config.detection.labels();
    let mut rng = CounterRng::for_trajectory(master_seed, trajectory);
    let mut psi = *initial;
    let mut clicks: Vec<Click> = Vec::new();
    for step in 0..config.n_steps() {
        // absorbed: the vacuum-coupled ground state is an exact fixed point
        if psi.0[GG].norm_sqr() >= 1.0 - 1e-15 {
            break;
        }
        let jpsi = [jumps[0].apply(&psi), jumps[1].apply(&psi)];
        let p0 = jpsi[0].norm_sqr() * dt;
        let p1 = jpsi[1].norm_sqr() * dt;
        let u = rng.next_f64();
        if u < p0 + p1 {
            let ch = usize::from(u >= p0);
            psi = jpsi[ch].normalized()?;
            clicks.push(Click {
                time: (step + 1) as f64 * dt,
                channel: ch,
                label: labels[ch],
                state: psi,
            });
            if config.freeze_after_first_click {
                break;
            }
        } else {
            psi = k.apply(&psi).normalized()?;
        }
    }
    Ok(TrajectoryRecord {
        params: *p,
        config: *config,
        master_seed,
        trajectory,
        initial: *initial,
        clicks,
        final_state: psi,
    })
}

/// Aggregate statistics of a batch of independent trajectories.
///
/// `channel_frequencies` is normalized over trajectories that clicked at
/// least once, so it sums to 1 whenever any click happened; in parity mode
/// it is the relative weight of the two interferometric channels.
/// `herald_fidelity[ch]` is the mean fidelity of the post-first-click state
/// against the four maximally entangled targets, in the order
/// `psi_plus, psi_minus, phi_plus, phi_minus`.
#[derive(Clone, Debug, PartialEq)]
pub struct HeraldStatistics {
    pub n_trajectories: usize,
    pub detection: Detection,
    pub labels: [ClickLabel; 2],
    pub n_first_clicks: usize,
    pub no_click_fraction: f64,
    pub first_click_mean: f64,
    pub first_click_se: f64,
    pub channel_counts: [usize; 2],
    pub channel_frequencies: [f64; 2],
    pub herald_fidelity: [[f64; 4]; 2],
    pub n_second_clicks: usize,
    pub second_click_mean: f64,
    pub second_click_se: f64,
    /// ordered (first, second) channel pairs: (0,0), (1,1), (0,1), (1,0)
    pub pair_counts: [usize; 4],
    pub first_click_times: Vec<f64>,
    pub second_click_waits: Vec<f64>,
}

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Samples `n_trajectories` independent unravelings (in parallel, bitwise
/// reproducible) and reduces them to protocol statistics.
pub fn herald_statistics(
    p: &SystemParams,
    initial: &QubitVector,
    config: &TrajectoryConfig,
    n_trajectories: usize,
    master_seed: u64,
) -> Result<HeraldStatistics> {
    if n_trajectories == 0 {
        return Err(Error::InvalidInput(
            "need at least one trajectory".to_string(),
        ));
    }
    let records: Result<Vec<TrajectoryRecord>> = (0..n_trajectories as u64)
        .into_par_iter()
        .map(|i| sample_trajectory(p, initial, config, master_seed, i))
        .collect();
    let records = records?;

    let targets = [
        QubitVector::psi_plus(),
        QubitVector::psi_minus(),
        QubitVector::phi_plus(),
        QubitVector::phi_minus(),
    ];
    let mut first_click_times = Vec::new();
    let mut second_click_waits = Vec::new();
    let mut channel_counts = [0usize; 2];
    let mut pair_counts = [0usize; 4];
    let mut fid_sum = [[0.0f64; 4]; 2];
    // the reduction runs in trajectory order, so results are independent of
    // the parallel schedule
    for rec in &records {
        let Some(first) = rec.clicks.first() else {
            continue;
        };
        first_click_times.push(first.time);
        channel_counts[first.channel] += 1;
        for (j, target) in targets.iter().enumerate() {
            fid_sum[first.channel][j] += target.fidelity(&first.state);
        }
        if let Some(second) = rec.clicks.get(1) {
            second_click_waits.push(second.time - first.time);
            let slot = match (first.channel, second.channel) {
                (0, 0) => 0,
                (1, 1) => 1,
                (0, 1) => 2,
                _ => 3,
            };
            pair_counts[slot] += 1;
        }
    }
    let n_first = first_click_times.len();
    let (first_mean, first_se) = mean_and_se(&first_click_times);
    let (second_mean, second_se) = mean_and_se(&second_click_waits);
    let mut herald_fidelity = [[f64::NAN; 4]; 2];
    let mut channel_frequencies = [f64::NAN; 2];
    for ch in 0..2 {
        if n_first > 0 {
            channel_frequencies[ch] = channel_counts[ch] as f64 / n_first as f64;
        }
        if channel_counts[ch] > 0 {
            for j in 0..4 {
                herald_fidelity[ch][j] = fid_sum[ch][j] / channel_counts[ch] as f64;
            }
        }
    }
    Ok(HeraldStatistics {
        n_trajectories,
        detection: config.detection,
        labels: config.detection.labels(),
        n_first_clicks: n_first,
        no_click_fraction: (n_trajectories - n_first) as f64 / n_trajectories as f64,
        first_click_mean: first_mean,
        first_click_se: first_se,
        channel_counts,
        channel_frequencies,
        herald_fidelity,
        n_second_clicks: second_click_waits.len(),
        second_click_mean: second_mean,
        second_click_se: second_se,
        pair_counts,
        first_click_times,
        second_click_waits,
    })
}

/// Two-sided Kolmogorov-Smirnov statistic of `samples` against the
/// continuous CDF `cdf`.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        d = d.max((f - i as f64 / n).abs());
        d = d.max(((i + 1) as f64 / n - f).abs());
    }
    d
}

/// Large-sample critical value of the KS statistic at the 1% level:
/// `sqrt(-ln(0.005)/2) / sqrt(n)`.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.6276 / (n as f64).sqrt()
}
