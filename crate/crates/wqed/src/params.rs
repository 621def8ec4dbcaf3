//! Operating point of the emitter pair and the rates derived from it.
//!
//! Three numbers fix everything: the single-emitter decay rate `gamma` into
//! the waveguide (both directions combined), the propagation phase `theta`
//! accumulated between the two coupling points, and the dimensionless direct
//! coupling knob `g_c` (an external qubit-qubit coupling J enters as
//! `g_c = -2 J / gamma`).

use crate::error::{Error, Result};
use crate::C64;

/// Default tolerance for classifying an operating point; recorded in every
/// report that performs a classification.
pub const CLASSIFY_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SystemParams {
    pub gamma: f64,
    pub theta: f64,
    pub g_c: f64,
}

impl SystemParams {
    pub fn new(gamma: f64, theta: f64, g_c: f64) -> Result<Self> {
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::InvalidInput(format!(
                "gamma must be positive and finite, got {gamma}"
            )));
        }
        if !theta.is_finite() || !g_c.is_finite() {
            return Err(Error::InvalidInput(
                "theta and g_c must be finite".to_string(),
            ));
        }
        Ok(SystemParams { gamma, theta, g_c })
    }

    /// `theta` given in units of pi. Half-integer multiples land exactly on
    /// the antiresonance points, which is why the CLI offers this form.
    pub fn with_theta_pi(gamma: f64, theta_over_pi: f64, g_c: f64) -> Result<Self> {
        Self::new(gamma, theta_over_pi * std::f64::consts::PI, g_c)
    }

    /// The point `theta = (n + 1/2) pi`, `g_c = (-1)^n` where the coherent
    /// exchange cancels the phase-induced one and both Bell states decay at
    /// the bare rate. Directional emission is perfect here.
    pub fn controlled_antiresonance(gamma: f64, n: i64) -> Self {
        let sign = if n.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        SystemParams {
            gamma,
            theta: (n as f64 + 0.5) * std::f64::consts::PI,
            g_c: sign,
        }
    }

    pub fn sin_theta(&self) -> f64 {
        self.theta.sin()
    }

    pub fn cos_theta(&self) -> f64 {
        self.theta.cos()
    }

    pub fn rates(&self) -> Rates {
        let gamma_plus = self.gamma * (1.0 + self.cos_theta());
        let gamma_minus = self.gamma * (1.0 - self.cos_theta());
        let delta = self.gamma * (self.sin_theta() - self.g_c);
        Rates {
            gamma_plus,
            gamma_minus,
            delta,
            mu_plus: C64::new(gamma_plus, delta),
            mu_minus: C64::new(gamma_minus, -delta),
        }
    }

    pub fn classify(&self, tol: f64) -> ConditionClass {
        let pi = std::f64::consts::PI;
        let n_res = (self.theta / pi).round();
        if (self.theta - n_res * pi).abs() <= tol {
            return ConditionClass::Resonance { n: n_res as i64 };
        }
        let n_anti = (self.theta / pi - 0.5).round();
        if (self.theta - (n_anti + 0.5) * pi).abs() <= tol {
            let n = n_anti as i64;
            let sign = if n.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            if (self.g_c - sign).abs() <= tol {
                return ConditionClass::ControlledAntiresonance { n };
            }
            return ConditionClass::Antiresonance { n };
        }
        ConditionClass::Generic
    }
}

/// Decay rates of the symmetric (`+`) and antisymmetric (`-`) Bell states and
/// the residual coherent exchange `delta = gamma (sin theta - g_c)`. The
/// complex rates `mu_pm = gamma_pm +/- i delta` govern the no-click decay
/// `e^{-mu_pm t / 2}` of the respective Bell amplitudes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rates {
    pub gamma_plus: f64,
    pub gamma_minus: f64,
    pub delta: f64,
    pub mu_plus: C64,
    pub mu_minus: C64,
}

/// Where the operating point sits relative to the special lines of the
/// `(theta, g_c)` plane.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConditionClass {
    Generic,
    /// `theta = n pi`: one Bell state decouples from the waveguide entirely.
    Resonance { n: i64 },
    /// `theta = (n + 1/2) pi` with `g_c` away from `(-1)^n`.
    Antiresonance { n: i64 },
    /// `theta = (n + 1/2) pi` and `g_c = (-1)^n`.
    ControlledAntiresonance { n: i64 },
}

impl ConditionClass {
    pub fn is_controlled_antiresonance(&self) -> bool {
        matches!(self, ConditionClass::ControlledAntiresonance { .. })
    }

    pub fn is_resonance(&self) -> bool {
        matches!(self, ConditionClass::Resonance { .. })
    }
}

impl std::fmt::Display for ConditionClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConditionClass::Generic => write!(f, "generic"),
            ConditionClass::Resonance { n } => write!(f, "resonance:{n}"),
            ConditionClass::Antiresonance { n } => write!(f, "antiresonance:{n}"),
            ConditionClass::ControlledAntiresonance { n } => {
                write!(f, "controlled-antiresonance:{n}")
            }
        }
    }
}
