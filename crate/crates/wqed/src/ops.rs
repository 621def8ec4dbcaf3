//! 4x4 operators on the pair, and the handful of named ones the model needs:
//! lowering operators, collective jump operators, the coherent exchange, and
//! the no-click propagator.

use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::states::QubitVector;
use crate::C64;

/// Row-major matrix over the `ee, eg, ge, gg` basis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Operator4(pub [[C64; 4]; 4]);

impl Operator4 {
    pub fn zero() -> Self {
        Operator4([[C64::ZERO; 4]; 4])
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        for i in 0..4 {
            m.0[i][i] = C64::ONE;
        }
        m
    }

    /// Lowering operator of qubit 1: `|ge><ee| + |gg><eg|`.
    pub fn sigma1() -> Self {
        let mut m = Self::zero();
        m.0[2][0] = C64::ONE;
        m.0[3][1] = C64::ONE;
        m
    }

    /// Lowering operator of qubit 2: `|eg><ee| + |gg><ge|`.
    pub fn sigma2() -> Self {
        let mut m = Self::zero();
        m.0[1][0] = C64::ONE;
        m.0[3][2] = C64::ONE;
        m
    }

    /// Collective jump into the right-moving channel,
    /// `-i sqrt(gamma/2) (sigma_1 + e^{-i theta} sigma_2)`.
    /// The global `-i` is kept: relative phases between composed amplitudes
    /// depend on it.
    pub fn jump_right(p: &SystemParams) -> Self {
        let pref = C64::new(0.0, -(p.gamma / 2.0).sqrt());
        let ph = C64::new(0.0, -p.theta).exp();
        Self::sigma1().add(&Self::sigma2().scale(ph)).scale(pref)
    }

    /// Collective jump into the left-moving channel,
    /// `-i sqrt(gamma/2) (sigma_1 + e^{+i theta} sigma_2)`.
    pub fn jump_left(p: &SystemParams) -> Self {
        let pref = C64::new(0.0, -(p.gamma / 2.0).sqrt());
        let ph = C64::new(0.0, p.theta).exp();
        Self::sigma1().add(&Self::sigma2().scale(ph)).scale(pref)
    }

    /// Interferometric combination `(J_R + e^{-i theta} J_L)/sqrt2`, which is
    /// proportional to `(sigma_1 + sigma_2)/sqrt2`. A click here projects the
    /// emitter pair onto the symmetric Bell state and fires at
    /// `gamma_plus |<psi_plus| . >|^2`-type rates.
    pub fn jump_sym(p: &SystemParams) -> Self {
        let ph = C64::new(0.0, -p.theta).exp();
        Self::jump_right(p)
            .add(&Self::jump_left(p).scale(ph))
            .scale(C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0))
    }

    /// `(J_R - e^{-i theta} J_L)/sqrt2`, proportional to
    /// `(sigma_1 - sigma_2)/sqrt2`; the antisymmetric partner of [`jump_sym`].
    pub fn jump_antisym(p: &SystemParams) -> Self {
        let ph = C64::new(0.0, -p.theta).exp();
        Self::jump_right(p)
            .add(&Self::jump_left(p).scale(-ph))
            .scale(C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0))
    }

    /// Waveguide-mediated exchange plus the tunable direct coupling:
    /// `(gamma/2)(sin theta - g_c)(sigma_1^dag sigma_2 + sigma_1 sigma_2^dag)`.
    /// Vanishes identically at a controlled antiresonance.
    pub fn effective_hamiltonian(p: &SystemParams) -> Self {
        let g = 0.5 * p.gamma * (p.sin_theta() - p.g_c);
        let mut m = Self::zero();
        m.0[1][2] = C64::new(g, 0.0);
        m.0[2][1] = C64::new(g, 0.0);
        m
    }

    pub fn scale(&self, a: C64) -> Self {
        let mut m = *self;
        for row in m.0.iter_mut() {
            for x in row.iter_mut() {
                *x *= a;
            }
        }
        m
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut m = *self;
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] += other.0[i][j];
            }
        }
        m
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    /// `self * other` as a composition: `(self.mul(o)).apply(v) = self(o(v))`.
    pub fn mul(&self, other: &Self) -> Self {
        let mut m = Self::zero();
        for i in 0..4 {
            for j in 0..4 {
                let mut s = C64::ZERO;
                for k in 0..4 {
                    s += self.0[i][k] * other.0[k][j];
                }
                m.0[i][j] = s;
            }
        }
        m
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zero();
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] = self.0[j][i].conj();
            }
        }
        m
    }

    pub fn apply(&self, v: &QubitVector) -> QubitVector {
        let mut out = [C64::ZERO; 4];
        for (i, o) in out.iter_mut().enumerate() {
            let mut s = C64::ZERO;
            for k in 0..4 {
                s += self.0[i][k] * v.0[k];
            }
            *o = s;
        }
        QubitVector(out)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut m = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                m = m.max((self.0[i][j] - other.0[i][j]).norm());
            }
        }
        m
    }
}

/// No-click propagator of the pair over a quiet interval `t`.
///
/// In the fixed basis it reads
///
/// ```text
///         [ e^{-gamma t}   0    0    0 ]
/// K(t) =  [ 0              a    b    0 ]      a = (E+ + E-)/2
///         [ 0              b    a    0 ]      b = (E+ - E-)/2
///         [ 0              0    0    1 ]
/// ```
///
/// with `E_pm = e^{-mu_pm t/2}`. The two Bell states diagonalize the middle
/// block, `K(t) psi_pm = E_pm psi_pm`, and `K(t+s) = K(t) K(s)`.
pub fn kraus(p: &SystemParams, t: f64) -> Result<Operator4> {
    if !(t >= 0.0) {
        return Err(Error::NegativeTime(t));
    }
    let r = p.rates();
    let e_plus = (-r.mu_plus * 0.5 * t).exp();
    let e_minus = (-r.mu_minus * 0.5 * t).exp();
    let a = (e_plus + e_minus) * 0.5;
    let b = (e_plus - e_minus) * 0.5;
    let mut m = Operator4::zero();
    m.0[0][0] = C64::new((-p.gamma * t).exp(), 0.0);
    m.0[1][1] = a;
    m.0[1][2] = b;
    m.0[2][1] = b;
    m.0[2][2] = a;
    m.0[3][3] = C64::ONE;
    Ok(m)
}
