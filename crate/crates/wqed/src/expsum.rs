//! Finite sums of complex exponentials, `f(t) = sum_k c_k e^{-z_k t}`.
//!
//! Every emission amplitude in this model lives in this class, and stays in
//! it under products and running integrals, so overlap integrals never need
//! numerical quadrature. Rates are expected to satisfy `Re z >= 0`; terms
//! with `Re z = 0` are legal (they simply never decay) but are rejected by
//! the infinite-horizon integrals unless their coefficient vanishes.

use crate::error::{Error, Result};
use crate::C64;

/// Rates closer than this are treated as equal and their coefficients are
/// summed. Keeping degenerate rates separate would put a vanishing
/// denominator into closed-form integrals; merging removes it exactly, and
/// no term of the form `t e^{-z t}` is ever needed.
pub const RATE_MERGE_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct ExpSum {
    /// `(coefficient, rate)` pairs; distinct rates after merging.
    terms: Vec<(C64, C64)>,
}

/// `(1 - e^{-x}) / x`, stable near `x = 0`.
pub(crate) fn em1_over(x: C64) -> C64 {
    if x.norm() < 0.5 {
        // series sum_{k>=0} (-x)^k / (k+1)!
        let mut term = C64::ONE;
        let mut sum = C64::ONE;
        for k in 1..25 {
            term *= -x / (k as f64 + 1.0);
            sum += term;
            if term.norm() < 1e-20 {
                break;
            }
        }
        sum
    } else {
        (C64::ONE - (-x).exp()) / x
    }
}

impl ExpSum {
    pub fn new(terms: impl IntoIterator<Item = (C64, C64)>) -> Self {
        let mut out = ExpSum { terms: Vec::new() };
        for (c, z) in terms {
            out.push(c, z);
        }
        out
    }

    pub fn zero() -> Self {
        ExpSum { terms: Vec::new() }
    }

    /// Single term `c e^{-z t}`.
    pub fn term(c: C64, z: C64) -> Self {
        Self::new([(c, z)])
    }

    /// Add one term, merging into an existing rate when closer than
    /// [`RATE_MERGE_TOL`].
    pub fn push(&mut self, c: C64, z: C64) {
        if c == C64::ZERO {
            return;
        }
        for (tc, tz) in self.terms.iter_mut() {
            if (*tz - z).norm() <= RATE_MERGE_TOL {
                *tc += c;
                return;
            }
        }
        self.terms.push((c, z));
    }

    pub fn terms(&self) -> &[(C64, C64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|(c, _)| c.norm() == 0.0)
    }

    pub fn value(&self, t: f64) -> C64 {
        self.terms.iter().map(|(c, z)| c * (-z * t).exp()).sum()
    }

    pub fn sample(&self, ts: &[f64]) -> Vec<C64> {
        ts.iter().map(|&t| self.value(t)).collect()
    }

    pub fn scale(&self, a: C64) -> Self {
        ExpSum {
            terms: self.terms.iter().map(|&(c, z)| (c * a, z)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for &(c, z) in &other.terms {
            out.push(c, z);
        }
        out
    }

    /// Pointwise product; rates add.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = ExpSum::zero();
        for &(ca, za) in &self.terms {
            for &(cb, zb) in &other.terms {
                out.push(ca * cb, za + zb);
            }
        }
        out
    }

    /// Complex conjugate of the function: `conj(c) e^{-conj(z) t}`.
    pub fn conj(&self) -> Self {
        ExpSum {
            terms: self.terms.iter().map(|&(c, z)| (c.conj(), z.conj())).collect(),
        }
    }

    /// `int_0^inf self(t) conj(other(t)) dt`
    /// `= sum_{k,l} c_k conj(d_l) / (z_k + conj(w_l))`.
    ///
    /// Errors when any contributing rate pair fails `Re(z + conj(w)) > 0`.
    pub fn l2_inner(&self, other: &Self) -> Result<C64> {
        let mut sum = C64::ZERO;
        for &(ck, zk) in &self.terms {
            for &(dl, wl) in &other.terms {
                let denom = zk + wl.conj();
                if denom.re <= 0.0 {
                    if ck.norm() * dl.norm() == 0.0 {
                        continue;
                    }
                    return Err(Error::NonIntegrable(denom.re));
                }
                sum += ck * dl.conj() / denom;
            }
        }
        Ok(sum)
    }

    /// `int_0^inf |self|^2 dt`.
    pub fn l2_norm_sqr(&self) -> Result<f64> {
        Ok(self.l2_inner(self)?.re)
    }

    /// `int_0^T self(t) conj(other(t)) dt`; finite for any rates.
    pub fn l2_inner_to(&self, other: &Self, t_max: f64) -> C64 {
        let mut sum = C64::ZERO;
        for &(ck, zk) in &self.terms {
            for &(dl, wl) in &other.terms {
                let denom = zk + wl.conj();
                sum += ck * dl.conj() * t_max * em1_over(denom * t_max);
            }
        }
        sum
    }

    /// `int_0^T self(t) dt`.
    pub fn integral_to(&self, t_max: f64) -> C64 {
        self.terms
            .iter()
            .map(|&(c, z)| c * t_max * em1_over(z * t_max))
            .sum()
    }

    /// Running integral `F(s) = int_0^s self(t) dt`, itself an exponential
    /// sum: `c e^{-z t}` integrates to `c/z - (c/z) e^{-z s}`. Fails when a
    /// term has `|z|` too small for the closed form (the primitive would be
    /// linear in `s`).
    pub fn cumulative_integral(&self) -> Result<Self> {
        let mut out = ExpSum::zero();
        for &(c, z) in &self.terms {
            if z.norm() < 1e-9 {
                return Err(Error::DegenerateRate(z.norm()));
            }
            out.push(c / z, C64::ZERO);
            out.push(-c / z, z);
        }
        Ok(out)
    }

    /// Copy with near-marginal terms removed. A term with `Re z <= rate_tol`
    /// is dropped when its coefficient is below `coeff_tol`, and reported as
    /// an error otherwise. Decaying terms are kept regardless of size.
    pub fn drop_marginal(&self, rate_tol: f64, coeff_tol: f64) -> Result<Self> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for &(c, z) in &self.terms {
            if z.re <= rate_tol {
                if c.norm() <= coeff_tol {
                    continue;
                }
                return Err(Error::MarginalTerm {
                    coeff: c.norm(),
                    rate: z.re,
                });
            }
            terms.push((c, z));
        }
        Ok(ExpSum { terms })
    }
}
