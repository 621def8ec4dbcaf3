//! Pure states of the qubit pair in the fixed basis `ee, eg, ge, gg`.
//! The first letter is qubit 1, the one closer to the left end of the line.

use crate::error::{Error, Result};
use crate::C64;

pub const EE: usize = 0;
pub const EG: usize = 1;
pub const GE: usize = 2;
pub const GG: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QubitVector(pub [C64; 4]);

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

impl QubitVector {
    pub fn zero() -> Self {
        QubitVector([C64::ZERO; 4])
    }

    pub fn basis(i: usize) -> Self {
        let mut v = Self::zero();
        v.0[i] = C64::ONE;
        v
    }

    pub fn ee() -> Self {
        Self::basis(EE)
    }
    pub fn eg() -> Self {
        Self::basis(EG)
    }
    pub fn ge() -> Self {
        Self::basis(GE)
    }
    pub fn gg() -> Self {
        Self::basis(GG)
    }

    /// Symmetric Bell state `(|eg> + |ge>)/sqrt2`; decays at `gamma_plus`.
    pub fn psi_plus() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        QubitVector([C64::ZERO, c(s, 0.0), c(s, 0.0), C64::ZERO])
    }

    /// Antisymmetric Bell state `(|eg> - |ge>)/sqrt2`; decays at `gamma_minus`.
    pub fn psi_minus() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        QubitVector([C64::ZERO, c(s, 0.0), c(-s, 0.0), C64::ZERO])
    }

    /// `(|eg> + i |ge>)/sqrt2`. At the even controlled antiresonances this is
    /// the purely right-emitting state.
    pub fn phi_plus() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        QubitVector([C64::ZERO, c(s, 0.0), c(0.0, s), C64::ZERO])
    }

    /// `(|eg> - i |ge>)/sqrt2`, the left-emitting partner of [`phi_plus`].
    pub fn phi_minus() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        QubitVector([C64::ZERO, c(s, 0.0), c(0.0, -s), C64::ZERO])
    }

    /// `(|eg> - e^{+i theta} |ge>)/sqrt2`: dark to the right-moving modes,
    /// so it emits into the left channel only.
    pub fn psi_left(theta: f64) -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let ph = C64::new(0.0, theta).exp();
        QubitVector([C64::ZERO, c(s, 0.0), -ph * s, C64::ZERO])
    }

    /// `(|eg> - e^{-i theta} |ge>)/sqrt2`: dark to the left-moving modes.
    pub fn psi_right(theta: f64) -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let ph = C64::new(0.0, -theta).exp();
        QubitVector([C64::ZERO, c(s, 0.0), -ph * s, C64::ZERO])
    }

    pub fn from_components(ee: C64, eg: C64, ge: C64, gg: C64) -> Self {
        QubitVector([ee, eg, ge, gg])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n <= f64::MIN_POSITIVE {
            return Err(Error::InvalidInput("cannot normalize zero vector".into()));
        }
        Ok(self.scale(c(1.0 / n, 0.0)))
    }

    pub fn scale(&self, a: C64) -> Self {
        QubitVector([self.0[0] * a, self.0[1] * a, self.0[2] * a, self.0[3] * a])
    }

    pub fn add(&self, other: &Self) -> Self {
        QubitVector([
            self.0[0] + other.0[0],
            self.0[1] + other.0[1],
            self.0[2] + other.0[2],
            self.0[3] + other.0[3],
        ])
    }

    /// `<self|other>`, conjugating the left argument.
    pub fn inner(&self, other: &Self) -> C64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `|<self|other>|^2` for already normalized vectors.
    pub fn fidelity(&self, other: &Self) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// Weight outside the `{|eg>, |ge>}` span.
    pub fn single_excitation_residual(&self) -> f64 {
        (self.0[EE].norm_sqr() + self.0[GG].norm_sqr()).sqrt()
    }

    pub fn check_single_excitation(&self, tol: f64) -> Result<()> {
        let residual = self.single_excitation_residual();
        if residual > tol {
            return Err(Error::NotSingleExcitation { residual, tol });
        }
        Ok(())
    }
}
