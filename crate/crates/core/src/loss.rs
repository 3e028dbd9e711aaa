// SPDX-License-Identifier: Apache-2.0

//! Edge losses on `[-1, 1]`.
//!
//! Every loss is convex with an increasing, odd derivative normalized so that
//! `ℓ′(1) = 1`. Each one also carries the constants `(c, k)` and the growth
//! regime used by the push runtime bound:
//!
//! | family  | q range  | regime | c     | k           |
//! |---------|----------|--------|-------|-------------|
//! | q-norm  | 1 < q < 2| A      | q − 1 | 2^(2 − q)   |
//! | q-norm  | q ≥ 2    | B      | q − 1 | 1           |
//! | q-Huber | 1 < q < 2| A      | q − 1 | 2^(2 − q)   |
//! | Berq    | 1 < q < 2| A      | 1     | 2^(2 − q)   |
//!
//! Regime A: `ℓ′(x + Δ) ≤ ℓ′(x) + k ℓ′(Δ)` and `ℓ″ > c`.
//! Regime B: `ℓ′` is `c`-Lipschitz and `ℓ′(x + Δ) ≥ ℓ′(x) + k ℓ′(Δ)` for `x ≥ 0`.

use crate::error::{Error, Result};

/// Default threshold for the piecewise losses.
pub const DEFAULT_DELTA: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LossKind {
    /// `|x|^q / q`.
    QNorm,
    /// Quadratic below `δ`, `q`-power above.
    QHuber,
    /// `q`-power below `δ`, quadratic above.
    Berq,
}

impl LossKind {
    pub fn name(self) -> &'static str {
        match self {
            LossKind::QNorm => "qnorm",
            LossKind::QHuber => "qhuber",
            LossKind::Berq => "berq",
        }
    }
}

impl core::str::FromStr for LossKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "qnorm" | "q-norm" => Ok(LossKind::QNorm),
            "qhuber" | "q-huber" => Ok(LossKind::QHuber),
            "berq" => Ok(LossKind::Berq),
            _ => Err(Error::Parameter("unknown loss kind")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Loss {
    kind: LossKind,
    q: f64,
    delta: f64,
    c: f64,
    k: f64,
    regime: Regime,
    // δ^(q−2) for q-Huber, δ^(2−q) for Berq, 1 otherwise.
    scale: f64,
}

/// `|x|^p` with an exact zero so that negative exponents never see `0^p`.
/// A few common exponents avoid the general power routine.
#[inline]
fn pow_abs(x: f64, p: f64) -> f64 {
    let a = libm::fabs(x);
    if a == 0.0 {
        0.0
    } else if p == 1.0 {
        a
    } else if p == 0.5 {
        libm::sqrt(a)
    } else if p == 0.25 {
        libm::sqrt(libm::sqrt(a))
    } else if p == 2.0 {
        a * a
    } else if p == 3.0 {
        a * a * a
    } else {
        libm::pow(a, p)
    }
}

impl Loss {
    /// Builds a loss of the given family. `delta` is ignored for the q-norm.
    pub fn new(kind: LossKind, q: f64, delta: f64) -> Result<Self> {
        match kind {
            LossKind::QNorm => Self::q_norm(q),
            LossKind::QHuber => Self::q_huber(q, delta),
            LossKind::Berq => Self::berq(q, delta),
        }
    }

    pub fn q_norm(q: f64) -> Result<Self> {
        if !(q > 1.0 && q.is_finite()) {
            return Err(Error::Parameter("q must be finite and greater than 1"));
        }
        let (regime, k) = if q < 2.0 {
            (Regime::A, libm::pow(2.0, 2.0 - q))
        } else {
            (Regime::B, 1.0)
        };
        Ok(Self {
            kind: LossKind::QNorm,
            q,
            delta: 0.0,
            c: q - 1.0,
            k,
            regime,
            scale: 1.0,
        })
    }

    pub fn q_huber(q: f64, delta: f64) -> Result<Self> {
        Self::check_piecewise(q, delta)?;
        Ok(Self {
            kind: LossKind::QHuber,
            q,
            delta,
            c: q - 1.0,
            k: libm::pow(2.0, 2.0 - q),
            regime: Regime::A,
            scale: libm::pow(delta, q - 2.0),
        })
    }

    pub fn berq(q: f64, delta: f64) -> Result<Self> {
        Self::check_piecewise(q, delta)?;
        Ok(Self {
            kind: LossKind::Berq,
            q,
            delta,
            c: 1.0,
            k: libm::pow(2.0, 2.0 - q),
            regime: Regime::A,
            scale: libm::pow(delta, 2.0 - q),
        })
    }

    fn check_piecewise(q: f64, delta: f64) -> Result<()> {
        if !(q > 1.0 && q < 2.0) {
            return Err(Error::Parameter("q-Huber and Berq require 1 < q < 2"));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::Parameter("delta must lie in (0, 1)"));
        }
        Ok(())
    }

    pub fn kind(&self) -> LossKind {
        self.kind
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// The piecewise threshold; zero for the q-norm.
    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    fn check_domain(x: f64) -> Result<()> {
        if (-1.0..=1.0).contains(&x) {
            Ok(())
        } else {
            Err(Error::LossDomain { value: x })
        }
    }

    /// `ℓ(x)` for `|x| ≤ 1`.
    pub fn value(&self, x: f64) -> Result<f64> {
        Self::check_domain(x)?;
        Ok(self.value_unchecked(x))
    }

    /// `ℓ′(x)` for `|x| ≤ 1`.
    pub fn deriv(&self, x: f64) -> Result<f64> {
        Self::check_domain(x)?;
        Ok(self.deriv_unchecked(x))
    }

    /// The nonnegative `x` with `ℓ′(x) = y`, for `y ∈ [0, ℓ′(1)]`.
    pub fn deriv_inverse(&self, y: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&y) {
            return Err(Error::DerivativeRange { value: y });
        }
        Ok(self.deriv_inverse_unchecked(y))
    }

    /// `ℓ(x)` by the same formulas, without the domain check.
    pub fn value_unchecked(&self, x: f64) -> f64 {
        let q = self.q;
        let a = libm::fabs(x);
        match self.kind {
            LossKind::QNorm => pow_abs(x, q) / q,
            LossKind::QHuber => {
                if a <= self.delta {
                    0.5 * self.scale * x * x
                } else {
                    pow_abs(x, q) / q + (q - 2.0) / (2.0 * q) * libm::pow(self.delta, q)
                }
            }
            LossKind::Berq => {
                if a <= self.delta {
                    self.scale * pow_abs(x, q) / q
                } else {
                    0.5 * x * x + (2.0 - q) / (2.0 * q) * self.delta * self.delta
                }
            }
        }
    }

    /// `ℓ′(x)` without the domain check. This is the solver hot path.
    #[inline]
    pub fn deriv_unchecked(&self, x: f64) -> f64 {
        let a = libm::fabs(x);
        let mag = match self.kind {
            LossKind::QNorm => pow_abs(a, self.q - 1.0),
            LossKind::QHuber => {
                if a <= self.delta {
                    self.scale * a
                } else {
                    pow_abs(a, self.q - 1.0)
                }
            }
            LossKind::Berq => {
                if a <= self.delta {
                    self.scale * pow_abs(a, self.q - 1.0)
                } else {
                    a
                }
            }
        };
        if x < 0.0 {
            -mag
        } else {
            mag
        }
    }

    /// Inverse of `ℓ′` on `y ≥ 0`, extended past `ℓ′(1)` by the same closed form.
    pub fn deriv_inverse_unchecked(&self, y: f64) -> f64 {
        let inv = 1.0 / (self.q - 1.0);
        match self.kind {
            LossKind::QNorm => pow_abs(y, inv),
            LossKind::QHuber => {
                // ℓ′(δ) = δ^(q−1)
                if y <= self.scale * self.delta {
                    y / self.scale
                } else {
                    pow_abs(y, inv)
                }
            }
            LossKind::Berq => {
                // ℓ′(δ) = δ
                if y <= self.delta {
                    pow_abs(y / self.scale, inv)
                } else {
                    y
                }
            }
        }
    }
}
