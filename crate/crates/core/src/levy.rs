//! Parametric Lévy blocks and scalar laws.
//!
//! Conventions: `E[exp(iθη(t))] = exp(-t ψ(θ))` and
//! `E[exp(-ξη(t))] = exp(-t ℓ(ξ))`, so `ℓ(ξ) = ψ(iξ)`.
//! The drift `c` of every family is the total linear drift, i.e. no
//! small-jump compensator is folded into it.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JumpOrientation {
    Positive,
    Negative,
}

impl JumpOrientation {
    pub fn sign(self) -> f64 {
        match self {
            JumpOrientation::Positive => 1.0,
            JumpOrientation::Negative => -1.0,
        }
    }
}

/// Sign attached to a stable subordinator. `Minus` denotes the negated
/// subordinator, whose Laplace exponent is the formal negation `-aξ^α`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LevyBlock {
    Drift {
        c: f64,
    },
    BrownianDrift {
        c: f64,
        sigma: f64,
    },
    /// Drift plus compound Poisson jumps of exponential size `Exp(a)`,
    /// upward or downward according to `orientation`.
    CompoundPoissonExp {
        c: f64,
        nu: f64,
        a: f64,
        orientation: JumpOrientation,
    },
    /// Drift, optional diffusion and two-sided exponential jumps: with
    /// probability `p` a jump is `+Exp(a_plus)`, otherwise `-Exp(a_minus)`.
    CompoundPoissonBilateral {
        c: f64,
        #[serde(default)]
        sigma: f64,
        nu: f64,
        p: f64,
        a_plus: f64,
        a_minus: f64,
    },
    StableSubordinator {
        a: f64,
        alpha: f64,
        sign: Sign,
    },
}

/// Open interval `(lower, upper)` of arguments with a finite Laplace exponent.
/// `lower_closed` marks the stable case, whose domain is `[0, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub lower: f64,
    pub upper: f64,
    pub lower_closed: bool,
}

impl Domain {
    pub const ALL: Domain = Domain {
        lower: f64::NEG_INFINITY,
        upper: f64::INFINITY,
        lower_closed: false,
    };

    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lower_closed {
            x >= self.lower
        } else {
            x > self.lower
        };
        x.is_finite() && above && x < self.upper
    }

    pub fn intersect(&self, other: &Domain) -> Domain {
        let (lower, lower_closed) = if self.lower > other.lower {
            (self.lower, self.lower_closed)
        } else if other.lower > self.lower {
            (other.lower, other.lower_closed)
        } else {
            (self.lower, self.lower_closed && other.lower_closed)
        };
        Domain {
            lower,
            upper: self.upper.min(other.upper),
            lower_closed,
        }
    }
}

fn finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be finite")))
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    finite(name, v)?;
    if v > 0.0 {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be > 0")))
    }
}

fn non_negative(name: &str, v: f64) -> Result<()> {
    finite(name, v)?;
    if v >= 0.0 {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be >= 0")))
    }
}

fn probability(name: &str, v: f64) -> Result<()> {
    finite(name, v)?;
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(invalid(format!("{name} must lie in [0, 1]")))
    }
}

impl LevyBlock {
    pub fn validate(&self) -> Result<()> {
        match *self {
            LevyBlock::Drift { c } => finite("c", c),
            LevyBlock::BrownianDrift { c, sigma } => {
                finite("c", c)?;
                non_negative("sigma", sigma)
            }
            LevyBlock::CompoundPoissonExp { c, nu, a, .. } => {
                finite("c", c)?;
                non_negative("nu", nu)?;
                positive("a", a)
            }
            LevyBlock::CompoundPoissonBilateral {
                c,
                sigma,
                nu,
                p,
                a_plus,
                a_minus,
            } => {
                finite("c", c)?;
                non_negative("sigma", sigma)?;
                non_negative("nu", nu)?;
                probability("p", p)?;
                positive("a_plus", a_plus)?;
                positive("a_minus", a_minus)
            }
            LevyBlock::StableSubordinator { a, alpha, .. } => {
                positive("a", a)?;
                finite("alpha", alpha)?;
                if alpha > 0.0 && alpha < 1.0 {
                    Ok(())
                } else {
                    Err(invalid("alpha must lie strictly inside (0, 1)"))
                }
            }
        }
    }

    /// True for blocks whose paths are a.s. nondecreasing.
    pub fn is_subordinator(&self) -> bool {
        match *self {
            LevyBlock::Drift { c } => c >= 0.0,
            LevyBlock::CompoundPoissonExp {
                c, nu, orientation, ..
            } => c >= 0.0 && (nu == 0.0 || orientation == JumpOrientation::Positive),
            LevyBlock::StableSubordinator { sign, .. } => sign == Sign::Plus,
            _ => false,
        }
    }

    /// True for the negated stable subordinator, whose Laplace exponent is
    /// only a formal object used by finiteness criteria.
    pub fn is_formal(&self) -> bool {
        matches!(
            self,
            LevyBlock::StableSubordinator {
                sign: Sign::Minus,
                ..
            }
        )
    }

    pub fn laplace_domain(&self) -> Domain {
        match *self {
            LevyBlock::Drift { .. } | LevyBlock::BrownianDrift { .. } => Domain::ALL,
            LevyBlock::CompoundPoissonExp { a, orientation, .. } => match orientation {
                JumpOrientation::Positive => Domain {
                    lower: -a,
                    upper: f64::INFINITY,
                    lower_closed: false,
                },
                JumpOrientation::Negative => Domain {
                    lower: f64::NEG_INFINITY,
                    upper: a,
                    lower_closed: false,
                },
            },
            LevyBlock::CompoundPoissonBilateral {
                a_plus, a_minus, ..
            } => Domain {
                lower: -a_plus,
                upper: a_minus,
                lower_closed: false,
            },
            LevyBlock::StableSubordinator { .. } => Domain {
                lower: 0.0,
                upper: f64::INFINITY,
                lower_closed: true,
            },
        }
    }

    /// Lévy–Khintchine exponent ψ(θ).
    pub fn khintchine_exponent(&self, theta: f64) -> Result<Complex64> {
        if !theta.is_finite() {
            return Err(domain("theta must be finite"));
        }
        let i = Complex64::i();
        let th = Complex64::new(theta, 0.0);
        let psi = match *self {
            LevyBlock::Drift { c } => -i * c * th,
            LevyBlock::BrownianDrift { c, sigma } => {
                -i * c * th + 0.5 * sigma * sigma * theta * theta
            }
            LevyBlock::CompoundPoissonExp {
                c,
                nu,
                a,
                orientation,
            } => {
                // ν(1 - E e^{iθY}) with Y = ±Exp(a)
                let s = orientation.sign();
                -i * c * th + nu * (1.0 - a / (a - i * s * th))
            }
            LevyBlock::CompoundPoissonBilateral {
                c,
                sigma,
                nu,
                p,
                a_plus,
                a_minus,
            } => {
                let jumps =
                    -p * i * th / (a_plus - i * th) + (1.0 - p) * i * th / (a_minus + i * th);
                -i * c * th + 0.5 * sigma * sigma * theta * theta + nu * jumps
            }
            LevyBlock::StableSubordinator { .. } => {
                return Err(domain(
                    "the characteristic exponent of a stable subordinator is not provided",
                ))
            }
        };
        Ok(psi)
    }

    /// Lévy–Laplace exponent ℓ(ξ).
    pub fn laplace_exponent(&self, xi: f64) -> Result<f64> {
        if !self.laplace_domain().contains(xi) {
            return Err(domain(format!(
                "xi = {xi} outside the Laplace domain of {self:?}"
            )));
        }
        let l = match *self {
            LevyBlock::Drift { c } => c * xi,
            LevyBlock::BrownianDrift { c, sigma } => c * xi - 0.5 * sigma * sigma * xi * xi,
            LevyBlock::CompoundPoissonExp {
                c,
                nu,
                a,
                orientation,
            } => match orientation {
                JumpOrientation::Positive => c * xi + nu * xi / (a + xi),
                JumpOrientation::Negative => c * xi - nu * xi / (a - xi),
            },
            LevyBlock::CompoundPoissonBilateral {
                c,
                sigma,
                nu,
                p,
                a_plus,
                a_minus,
            } => {
                let jumps = p * xi / (a_plus + xi) - (1.0 - p) * xi / (a_minus - xi);
                c * xi - 0.5 * sigma * sigma * xi * xi + nu * jumps
            }
            LevyBlock::StableSubordinator { a, alpha, sign } => {
                if xi == 0.0 {
                    0.0
                } else {
                    sign.value() * a * xi.powf(alpha)
                }
            }
        };
        Ok(l)
    }

    /// Mean increment per unit time, when finite.
    pub fn mean_rate(&self) -> Option<f64> {
        match *self {
            LevyBlock::Drift { c } | LevyBlock::BrownianDrift { c, .. } => Some(c),
            LevyBlock::CompoundPoissonExp {
                c,
                nu,
                a,
                orientation,
            } => Some(c + orientation.sign() * nu / a),
            LevyBlock::CompoundPoissonBilateral {
                c,
                nu,
                p,
                a_plus,
                a_minus,
                ..
            } => Some(c + nu * (p / a_plus - (1.0 - p) / a_minus)),
            LevyBlock::StableSubordinator { .. } => None,
        }
    }
}

/// Distribution of restart points (renewal regime) or switch jumps (jump regime).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScalarLaw {
    Dirac {
        y: f64,
    },
    /// `sign · Exp(rate)`.
    Exponential {
        rate: f64,
        sign: JumpOrientation,
    },
    Gaussian {
        mean: f64,
        sd: f64,
    },
    TwoPoint {
        y_a: f64,
        y_b: f64,
        prob_a: f64,
    },
}

impl ScalarLaw {
    pub const ZERO: ScalarLaw = ScalarLaw::Dirac { y: 0.0 };

    pub fn validate(&self) -> Result<()> {
        match *self {
            ScalarLaw::Dirac { y } => finite("y", y),
            ScalarLaw::Exponential { rate, .. } => positive("rate", rate),
            ScalarLaw::Gaussian { mean, sd } => {
                finite("mean", mean)?;
                non_negative("sd", sd)
            }
            ScalarLaw::TwoPoint { y_a, y_b, prob_a } => {
                finite("y_a", y_a)?;
                finite("y_b", y_b)?;
                probability("prob_a", prob_a)
            }
        }
    }

    /// Atoms `(location, mass)` of a purely discrete law, `None` otherwise.
    pub fn atoms(&self) -> Option<Vec<(f64, f64)>> {
        match *self {
            ScalarLaw::Dirac { y } => Some(vec![(y, 1.0)]),
            ScalarLaw::Gaussian { mean, sd } if sd == 0.0 => Some(vec![(mean, 1.0)]),
            ScalarLaw::TwoPoint { y_a, y_b, prob_a } => {
                Some(vec![(y_a, prob_a), (y_b, 1.0 - prob_a)])
            }
            _ => None,
        }
    }

    pub fn laplace_domain(&self) -> Domain {
        match *self {
            ScalarLaw::Exponential { rate, sign } => match sign {
                JumpOrientation::Positive => Domain {
                    lower: -rate,
                    upper: f64::INFINITY,
                    lower_closed: false,
                },
                JumpOrientation::Negative => Domain {
                    lower: f64::NEG_INFINITY,
                    upper: rate,
                    lower_closed: false,
                },
            },
            _ => Domain::ALL,
        }
    }

    /// `∫ e^{iθx} law(dx)`.
    pub fn fourier(&self, theta: f64) -> Complex64 {
        let i = Complex64::i();
        match *self {
            ScalarLaw::Dirac { y } => (i * theta * y).exp(),
            ScalarLaw::Exponential { rate, sign } => rate / (rate - i * sign.sign() * theta),
            ScalarLaw::Gaussian { mean, sd } => {
                (i * theta * mean - 0.5 * sd * sd * theta * theta).exp()
            }
            ScalarLaw::TwoPoint { y_a, y_b, prob_a } => {
                prob_a * (i * theta * y_a).exp() + (1.0 - prob_a) * (i * theta * y_b).exp()
            }
        }
    }

    /// `∫ e^{-ξx} law(dx)`.
    pub fn laplace(&self, xi: f64) -> Result<f64> {
        if !self.laplace_domain().contains(xi) {
            return Err(domain(format!(
                "xi = {xi} outside the Laplace domain of {self:?}"
            )));
        }
        let v = match *self {
            ScalarLaw::Dirac { y } => (-xi * y).exp(),
            ScalarLaw::Exponential { rate, sign } => rate / (rate + sign.sign() * xi),
            ScalarLaw::Gaussian { mean, sd } => (-xi * mean + 0.5 * sd * sd * xi * xi).exp(),
            ScalarLaw::TwoPoint { y_a, y_b, prob_a } => {
                prob_a * (-xi * y_a).exp() + (1.0 - prob_a) * (-xi * y_b).exp()
            }
        };
        Ok(v)
    }

    pub fn mean(&self) -> f64 {
        match *self {
            ScalarLaw::Dirac { y } => y,
            ScalarLaw::Exponential { rate, sign } => sign.sign() / rate,
            ScalarLaw::Gaussian { mean, .. } => mean,
            ScalarLaw::TwoPoint { y_a, y_b, prob_a } => prob_a * y_a + (1.0 - prob_a) * y_b,
        }
    }

    pub fn sd(&self) -> f64 {
        match *self {
            ScalarLaw::Dirac { .. } => 0.0,
            ScalarLaw::Exponential { rate, .. } => 1.0 / rate,
            ScalarLaw::Gaussian { sd, .. } => sd,
            ScalarLaw::TwoPoint { y_a, y_b, prob_a } => {
                (prob_a * (1.0 - prob_a)).sqrt() * (y_a - y_b).abs()
            }
        }
    }

    /// Density of the absolutely continuous laws.
    pub fn pdf(&self, x: f64) -> Option<f64> {
        match *self {
            ScalarLaw::Exponential { rate, sign } => {
                let u = sign.sign() * x;
                Some(if u >= 0.0 {
                    rate * (-rate * u).exp()
                } else {
                    0.0
                })
            }
            ScalarLaw::Gaussian { mean, sd } if sd > 0.0 => {
                let z = (x - mean) / sd;
                Some((-0.5 * z * z).exp() / (sd * (2.0 * std::f64::consts::PI).sqrt()))
            }
            _ => None,
        }
    }
}
