//! Self-contained numerical oracle for the acceptance harness.
//!
//! Everything here is derived once more from the analytic solution of the
//! model, with its own complex arithmetic and plain Simpson quadrature, and
//! deliberately shares no code with the library: agreement between the two
//! implementations is then a genuine cross-check, not a tautology.
//!
//! Model summary used throughout (gamma = decay rate per emitter, theta =
//! propagation phase, g_c = exchange control):
//!
//! * parity amplitudes decay as `b_+-(t) = b_+- e^{-mu_+- t / 2}` with
//!   `mu_+- = gamma (1 +- cos theta) +- i gamma (sin theta - g_c)`;
//! * emission vertex into the right/left channel from a single-excitation
//!   state `(c_eg, c_ge)`: `f_ch = -i sqrt(gamma/2) (c_eg + e^{-+ i theta} c_ge)`
//!   (upper sign: right);
//! * `|ee>` holds amplitude `e^{-gamma t}` until the first emission, which
//!   deposits `(c_eg, c_ge) = (e^{-+ i theta}, 1)` times the vertex factor.

#![allow(dead_code)]

/// Minimal complex number, written out by hand on purpose.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cx {
    pub re: f64,
    pub im: f64,
}

impl Cx {
    pub const ZERO: Cx = Cx { re: 0.0, im: 0.0 };
    pub const ONE: Cx = Cx { re: 1.0, im: 0.0 };

    pub fn new(re: f64, im: f64) -> Cx {
        Cx { re, im }
    }

    pub fn add(self, o: Cx) -> Cx {
        Cx::new(self.re + o.re, self.im + o.im)
    }

    pub fn sub(self, o: Cx) -> Cx {
        Cx::new(self.re - o.re, self.im - o.im)
    }

    pub fn mul(self, o: Cx) -> Cx {
        Cx::new(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )
    }

    pub fn scale(self, a: f64) -> Cx {
        Cx::new(self.re * a, self.im * a)
    }

    pub fn norm_sqr(self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    /// e^{self}
    pub fn exp(self) -> Cx {
        let r = self.re.exp();
        Cx::new(r * self.im.cos(), r * self.im.sin())
    }

    /// e^{i phi}
    pub fn cis(phi: f64) -> Cx {
        Cx::new(phi.cos(), phi.sin())
    }
}

/// Composite Simpson rule with `n` (forced even) subintervals.
pub fn simpson(a: f64, b: f64, n: usize, f: impl Fn(f64) -> f64) -> f64 {
    let n = if n % 2 == 0 { n } else { n + 1 }.max(2);
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + k as f64 * h);
    }
    acc * h / 3.0
}

/// Operating point; plain data, no validation (the harness passes sane
/// values).
#[derive(Clone, Copy, Debug)]
pub struct Point {
    pub gamma: f64,
    pub theta: f64,
    pub g_c: f64,
}

impl Point {
    pub fn new(gamma: f64, theta: f64, g_c: f64) -> Point {
        Point { gamma, theta, g_c }
    }

    /// -mu_+- / 2, the complex amplitude decay exponents of the parity
    /// states.
    fn exponents(&self) -> (Cx, Cx) {
        let delta = self.gamma * (self.theta.sin() - self.g_c);
        let gp = self.gamma * (1.0 + self.theta.cos());
        let gm = self.gamma * (1.0 - self.theta.cos());
        (
            Cx::new(-0.5 * gp, -0.5 * delta),
            Cx::new(-0.5 * gm, 0.5 * delta),
        )
    }
}

pub const RIGHT: usize = 0;
pub const LEFT: usize = 1;

/// Vertex phase picked up by the second emitter's amplitude: e^{-i theta}
/// for the right-moving channel, e^{+i theta} for the left-moving one.
fn vertex_phase(point: &Point, ch: usize) -> Cx {
    match ch {
        RIGHT => Cx::cis(-point.theta),
        _ => Cx::cis(point.theta),
    }
}

/// Evolve a single-excitation pair amplitude `(c_eg, c_ge)` for time `t`.
fn evolve1(point: &Point, c: (Cx, Cx), t: f64) -> (Cx, Cx) {
    let (ep, em) = point.exponents();
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let b_plus = c.0.add(c.1).scale(inv_sqrt2).mul(ep.scale(t).exp());
    let b_minus = c.0.sub(c.1).scale(inv_sqrt2).mul(em.scale(t).exp());
    (
        b_plus.add(b_minus).scale(inv_sqrt2),
        b_plus.sub(b_minus).scale(inv_sqrt2),
    )
}

/// Emission amplitude density into `ch` from the instantaneous pair
/// amplitude `(c_eg, c_ge)` (the vertex factor -i sqrt(gamma/2) included).
fn vertex(point: &Point, ch: usize, c: (Cx, Cx)) -> Cx {
    let pref = Cx::new(0.0, -(point.gamma / 2.0).sqrt());
    pref.mul(c.0.add(vertex_phase(point, ch).mul(c.1)))
}

/// One-photon waveform f_ch(t) for an initial single-excitation state.
pub fn waveform1(point: &Point, initial: (Cx, Cx), ch: usize, t: f64) -> Cx {
    vertex(point, ch, evolve1(point, initial, t))
}

/// Total emission probability into `ch`, by Simpson quadrature on [0, T].
pub fn emission_probability(point: &Point, initial: (Cx, Cx), ch: usize, t_max: f64, n: usize) -> f64 {
    simpson(0.0, t_max, n, |t| waveform1(point, initial, ch, t).norm_sqr())
}

/// Left/right emission ratio for |eg> = (1, 0), from quadrature.
pub fn r1_eg(point: &Point, t_max: f64, n: usize) -> f64 {
    let eg = (Cx::ONE, Cx::ZERO);
    let p_r = emission_probability(point, eg, RIGHT, t_max, n);
    let p_l = emission_probability(point, eg, LEFT, t_max, n);
    p_l / p_r
}

/// Ordered two-photon amplitude: first photon into `ch1` at `t1`, second
/// into `ch2` at `t2 >= t1`, starting from |ee>.
pub fn pair_amplitude(point: &Point, ch1: usize, ch2: usize, t1: f64, t2: f64) -> Cx {
    let survive_ee = (-point.gamma * t1).exp();
    let first = Cx::new(0.0, -(point.gamma / 2.0).sqrt()).scale(survive_ee);
    // J_ch |ee> deposits |ge> + e^{-+ i theta} |eg>:
    let c0 = (vertex_phase(point, ch1), Cx::ONE);
    let c_t = evolve1(point, c0, t2 - t1);
    first.mul(vertex(point, ch2, c_t))
}

/// P(ch1, ch2) over the ordered wedge 0 <= t1 <= t2 <= T, by nested Simpson.
pub fn pair_probability(point: &Point, ch1: usize, ch2: usize, t_max: f64, n: usize) -> f64 {
    simpson(0.0, t_max, n, |t1| {
        simpson(t1, t_max, n, |t2| {
            pair_amplitude(point, ch1, ch2, t1, t2).norm_sqr()
        })
    })
}

/// Antiparallel-to-parallel two-photon ratio from wedge quadrature.
pub fn r2(point: &Point, t_max: f64, n: usize) -> f64 {
    let p_rr = pair_probability(point, RIGHT, RIGHT, t_max, n);
    let p_ll = pair_probability(point, LEFT, LEFT, t_max, n);
    let p_rl = pair_probability(point, RIGHT, LEFT, t_max, n);
    let p_lr = pair_probability(point, LEFT, RIGHT, t_max, n);
    (p_rl + p_lr) / (p_rr + p_ll)
}

/// Overlap of the emitted same-direction branch with two photons in the
/// exponential reference mode xi(t) = sqrt(gamma) e^{-gamma t / 2}, up to
/// time T: B_ch = sqrt(2) * integral over the wedge of xi(t1) xi(t2) A(t1, t2).
pub fn noon_branch(point: &Point, ch: usize, t_max: f64, n: usize) -> Cx {
    let xi = |t: f64| point.gamma.sqrt() * (-0.5 * point.gamma * t).exp();
    let re = simpson(0.0, t_max, n, |t1| {
        simpson(t1, t_max, n, |t2| {
            pair_amplitude(point, ch, ch, t1, t2).re * xi(t1) * xi(t2)
        })
    });
    let im = simpson(0.0, t_max, n, |t1| {
        simpson(t1, t_max, n, |t2| {
            pair_amplitude(point, ch, ch, t1, t2).im * xi(t1) * xi(t2)
        })
    });
    Cx::new(re, im).scale(std::f64::consts::SQRT_2)
}

/// Fidelity with the path-entangled target, F = |B_R - B_L|^2 / 2.
pub fn noon_fidelity(point: &Point, t_max: f64, n: usize) -> f64 {
    let br = noon_branch(point, RIGHT, t_max, n);
    let bl = noon_branch(point, LEFT, t_max, n);
    br.sub(bl).norm_sqr() * 0.5
}

#[cfg(test)]
mod self_checks {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn quadrature_reproduces_known_ratio_values() {
        // r1(|eg>) = 3 at theta = pi/2, g_c = 0.
        let p = Point::new(1.0, 0.5 * PI, 0.0);
        assert!((r1_eg(&p, 60.0, 6000) - 3.0).abs() < 1e-8);
        // Two generic points, values pinned independently. The first has a
        // subradiant rate of 1 - cos(pi/6) ~ 0.13, so the horizon must be
        // long enough for the slow tail to fall below the tolerance.
        let p = Point::new(1.0, PI / 6.0, 0.3);
        assert!((r1_eg(&p, 200.0, 20000) - 1.212765957447).abs() < 1e-8);
        let p = Point::new(1.0, 2.2, -0.7);
        assert!((r1_eg(&p, 80.0, 8000) - 2.186425166928).abs() < 1e-8);
    }

    #[test]
    fn wedge_quadrature_reproduces_known_pair_values() {
        let p = Point::new(1.0, 0.5 * PI, 0.0);
        let p_rr = pair_probability(&p, RIGHT, RIGHT, 40.0, 800);
        let p_rl = pair_probability(&p, RIGHT, LEFT, 40.0, 800);
        assert!((p_rr - 0.375).abs() < 1e-6, "P_RR = {p_rr}");
        assert!((p_rl - 0.125).abs() < 1e-6, "P_RL = {p_rl}");
        assert!((r2(&p, 40.0, 800) - 1.0 / 3.0).abs() < 1e-6);
    }

    #[test]
    fn branch_overlap_matches_the_ideal_curve() {
        // At the controlled antiresonance with the matched reference mode,
        // F(T) = (1 - e^{-gamma T})^4.
        let p = Point::new(1.0, 0.5 * PI, 1.0);
        let f = noon_fidelity(&p, 2.0, 400);
        let ideal = (1.0 - (-2.0f64).exp()).powi(4);
        assert!((f - ideal).abs() < 1e-6, "F = {f}, ideal = {ideal}");
    }
}
