//! Limit laws of the renewal-regime process as `t → ∞`.
//!
//! The limit is the mixture `p0·L(x0 + η0(τ0)) + p1·L(x1 + η1(τ1))` with
//! `τ_i ~ Exp(λ_i)`, `x_i ~ g_i`, `p0 = λ1/(λ0+λ1)`. For the telegraph, Brownian
//! and exponential-jump blocks each component is piecewise exponential.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use libm::erfc;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::levy::{JumpOrientation, LevyBlock, ScalarLaw};
use crate::quad;
use crate::regime::RegimeModel;
use crate::simulate::{block_increment, sample_law};

/// Mixture representation of the limit law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitMixture {
    pub weights: [f64; 2],
    pub start_laws: [ScalarLaw; 2],
    pub blocks: [LevyBlock; 2],
    /// Rates of the exponential clocks `τ_i`.
    pub rates: [f64; 2],
}

pub fn limit_mixture(model: &RegimeModel) -> Result<LimitMixture> {
    let [l0, l1] = model.lambdas();
    Ok(LimitMixture {
        weights: [l1 / (l0 + l1), l0 / (l0 + l1)],
        start_laws: model.start_laws()?,
        blocks: model.blocks(),
        rates: [l0, l1],
    })
}

/// Exact draw from the limit law.
pub fn sample_limit<R: Rng + ?Sized>(model: &RegimeModel, rng: &mut R) -> Result<f64> {
    Ok(sample_limit_tagged(model, rng)?.1)
}

/// Like [`sample_limit`], also returning the mixture component drawn.
pub fn sample_limit_tagged<R: Rng + ?Sized>(
    model: &RegimeModel,
    rng: &mut R,
) -> Result<(usize, f64)> {
    let mix = limit_mixture(model)?;
    Ok(sample_mixture(&mix, rng))
}

fn sample_mixture<R: Rng + ?Sized>(mix: &LimitMixture, rng: &mut R) -> (usize, f64) {
    let k = if rng.random::<f64>() < mix.weights[0] {
        0
    } else {
        1
    };
    let e: f64 = rng.sample(rand_distr::Exp1);
    let tau = e / mix.rates[k];
    let x = sample_law(&mix.start_laws[k], rng);
    (k, x + block_increment(&mix.blocks[k], tau, rng))
}

/// Which half-line an exponential piece lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Positive,
    Negative,
}

/// `coef · e^{−rate·x}` on `x > 0` or on `x < 0`. Negative-side pieces have
/// `rate < 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpPiece {
    pub coef: f64,
    pub rate: f64,
    pub side: Side,
}

impl ExpPiece {
    fn pdf(&self, x: f64) -> f64 {
        match self.side {
            Side::Positive if x >= 0.0 => self.coef * (-self.rate * x).exp(),
            Side::Negative if x < 0.0 => self.coef * (-self.rate * x).exp(),
            _ => 0.0,
        }
    }

    fn mass(&self) -> f64 {
        self.coef / self.rate.abs()
    }

    fn cdf(&self, x: f64) -> f64 {
        match self.side {
            Side::Positive => {
                if x <= 0.0 {
                    0.0
                } else {
                    -self.coef / self.rate * (-self.rate * x).exp_m1()
                }
            }
            Side::Negative => self.mass() * (-self.rate * x.min(0.0)).exp(),
        }
    }

    fn fourier(&self, theta: f64) -> Complex64 {
        let z = Complex64::new(self.rate, -theta);
        match self.side {
            Side::Positive => self.coef / z,
            Side::Negative => -self.coef / z,
        }
    }

    fn mirrored(self) -> Self {
        Self {
            coef: self.coef,
            rate: -self.rate,
            side: match self.side {
                Side::Positive => Side::Negative,
                Side::Negative => Side::Positive,
            },
        }
    }

    /// `ln Φ` is used so that `e^{big}·Φ(very negative)` stays finite.
    fn gaussian_pdf(&self, x: f64, mean: f64, sd: f64) -> f64 {
        let (r, u) = (self.rate, x - mean);
        let z = u / sd - r * sd;
        let arg = -r * u + 0.5 * r * r * sd * sd;
        let tail = match self.side {
            Side::Positive => ln_norm_cdf(z),
            Side::Negative => ln_norm_cdf(-z),
        };
        self.coef * (arg + tail).exp()
    }

    fn gaussian_cdf(&self, x: f64, mean: f64, sd: f64) -> f64 {
        let (r, u) = (self.rate, x - mean);
        let z0 = u / sd;
        let z = z0 - r * sd;
        let arg = -r * u + 0.5 * r * r * sd * sd;
        let m = self.mass();
        match self.side {
            Side::Positive => m * (norm_cdf(z0) - (arg + ln_norm_cdf(z)).exp()),
            Side::Negative => m * (norm_cdf(z0) + (arg + ln_norm_cdf(-z)).exp()),
        }
    }
}

fn norm_cdf(z: f64) -> f64 {
    0.5 * erfc(-z * FRAC_1_SQRT_2)
}

/// `ln Φ(z)`; below `z = −37` `Φ` underflows and the Mills ratio
/// `Φ(−x)/φ(x) = 1/(x + 1/(x + 2/(x + …)))` is used instead.
fn ln_norm_cdf(z: f64) -> f64 {
    if z > -37.0 {
        norm_cdf(z).ln()
    } else {
        let x = -z;
        let mut denom = x;
        for k in (1..=40).rev() {
            denom = x + k as f64 / denom;
        }
        -0.5 * x * x - 0.5 * (2.0 * PI).ln() - denom.ln()
    }
}

fn norm_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

/// A measure near the origin: an atom at 0 plus exponential pieces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct BaseLaw {
    pub atom: f64,
    pub pieces: Vec<ExpPiece>,
}

impl BaseLaw {
    pub fn pdf(&self, x: f64) -> f64 {
        self.pieces.iter().map(|p| p.pdf(x)).sum()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let atom = if x >= 0.0 { self.atom } else { 0.0 };
        atom + self.pieces.iter().map(|p| p.cdf(x)).sum::<f64>()
    }

    pub fn cdf_left(&self, x: f64) -> f64 {
        let atom = if x > 0.0 { self.atom } else { 0.0 };
        atom + self.pieces.iter().map(|p| p.cdf(x)).sum::<f64>()
    }

    pub fn mass(&self) -> f64 {
        self.atom + self.pieces.iter().map(|p| p.mass()).sum::<f64>()
    }

    pub fn fourier(&self, theta: f64) -> Complex64 {
        self.pieces
            .iter()
            .map(|p| p.fourier(theta))
            .fold(Complex64::new(self.atom, 0.0), |a, b| a + b)
    }

    fn mirrored(self) -> Self {
        Self {
            atom: self.atom,
            pieces: self.pieces.into_iter().map(ExpPiece::mirrored).collect(),
        }
    }

    fn scaled(mut self, w: f64) -> Self {
        self.atom *= w;
        for p in &mut self.pieces {
            p.coef *= w;
        }
        self
    }
}

/// One mixture component: the start law convolved with a [`BaseLaw`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityComponent {
    pub start: ScalarLaw,
    pub base: BaseLaw,
}

const CONV_TOL: f64 = 1e-13;

impl DensityComponent {
    fn pdf(&self, x: f64) -> f64 {
        match self.start {
            ScalarLaw::Gaussian { mean, sd } if sd > 0.0 => {
                self.base.atom * norm_pdf((x - mean) / sd) / sd
                    + self
                        .base
                        .pieces
                        .iter()
                        .map(|p| p.gaussian_pdf(x, mean, sd))
                        .sum::<f64>()
            }
            ScalarLaw::Exponential { .. } => {
                let g = |y: f64| self.start.pdf(y).unwrap_or(0.0);
                self.base.atom * g(x) + self.convolve(|u| self.base.pdf(u), x)
            }
            _ => discrete(&self.start)
                .iter()
                .map(|&(y, w)| w * self.base.pdf(x - y))
                .sum(),
        }
    }

    fn cdf_with(&self, x: f64, left: bool) -> f64 {
        let base_cdf = |u: f64| {
            if left {
                self.base.cdf_left(u)
            } else {
                self.base.cdf(u)
            }
        };
        match self.start {
            ScalarLaw::Gaussian { mean, sd } if sd > 0.0 => {
                self.base.atom * norm_cdf((x - mean) / sd)
                    + self
                        .base
                        .pieces
                        .iter()
                        .map(|p| p.gaussian_cdf(x, mean, sd))
                        .sum::<f64>()
            }
            ScalarLaw::Exponential { .. } => self.convolve(base_cdf, x),
            _ => discrete(&self.start)
                .iter()
                .map(|&(y, w)| w * base_cdf(x - y))
                .sum(),
        }
    }

    /// `∫ g(y) f(x − y) dy` for an exponential start law `g`.
    fn convolve<F: Fn(f64) -> f64>(&self, f: F, x: f64) -> f64 {
        let ScalarLaw::Exponential { sign, .. } = self.start else {
            unreachable!()
        };
        let g = |y: f64| self.start.pdf(y).unwrap_or(0.0);
        let h = |y: f64| g(y) * f(x - y);
        match sign {
            JumpOrientation::Positive => {
                if x > 0.0 {
                    quad::integrate(h, 0.0, x, CONV_TOL) + quad::integrate_to_inf(h, x, CONV_TOL)
                } else {
                    quad::integrate_to_inf(h, 0.0, CONV_TOL)
                }
            }
            JumpOrientation::Negative => {
                if x < 0.0 {
                    quad::integrate(h, x, 0.0, CONV_TOL)
                        + quad::integrate_from_neg_inf(h, x, CONV_TOL)
                } else {
                    quad::integrate_from_neg_inf(h, 0.0, CONV_TOL)
                }
            }
        }
    }

    fn fourier(&self, theta: f64) -> Complex64 {
        self.start.fourier(theta) * self.base.fourier(theta)
    }

    fn atoms(&self) -> Vec<(f64, f64)> {
        if self.base.atom == 0.0 {
            return Vec::new();
        }
        match self.start.atoms() {
            Some(a) if !matches!(self.start, ScalarLaw::Gaussian { sd, .. } if sd > 0.0) => a
                .into_iter()
                .map(|(y, w)| (y, w * self.base.atom))
                .collect(),
            _ => Vec::new(),
        }
    }
}

fn discrete(law: &ScalarLaw) -> Vec<(f64, f64)> {
    law.atoms().expect("discrete start law")
}

/// A closed-form limit density: a finite sum of [`DensityComponent`]s.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosedDensity {
    pub components: Vec<DensityComponent>,
}

impl ClosedDensity {
    /// Density of the absolutely continuous part.
    pub fn pdf(&self, x: f64) -> f64 {
        self.components.iter().map(|c| c.pdf(x)).sum()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.components.iter().map(|c| c.cdf_with(x, false)).sum()
    }

    /// `F(x−)`.
    pub fn cdf_left(&self, x: f64) -> f64 {
        self.components.iter().map(|c| c.cdf_with(x, true)).sum()
    }

    pub fn fourier(&self, theta: f64) -> Complex64 {
        self.components
            .iter()
            .map(|c| c.fourier(theta))
            .fold(Complex64::new(0.0, 0.0), |a, b| a + b)
    }

    /// Atoms `(location, mass)`, merged by location.
    pub fn atoms(&self) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64)> = Vec::new();
        for (y, w) in self.components.iter().flat_map(|c| c.atoms()) {
            match out.iter_mut().find(|(z, _)| *z == y) {
                Some(slot) => slot.1 += w,
                None => out.push((y, w)),
            }
        }
        out.sort_by(|a, b| a.0.total_cmp(&b.0));
        out
    }

    pub fn atom_mass(&self) -> f64 {
        self.atoms().iter().map(|a| a.1).sum()
    }

    /// Total mass from the closed form.
    pub fn mass(&self) -> f64 {
        self.components.iter().map(|c| c.base.mass()).sum()
    }

    /// Points where the continuous part may be non-smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> = Vec::new();
        for c in &self.components {
            match c.start {
                ScalarLaw::Gaussian { sd, .. } if sd > 0.0 => {}
                ScalarLaw::Exponential { .. } => b.push(0.0),
                _ => b.extend(discrete(&c.start).iter().map(|a| a.0)),
            }
        }
        b.sort_by(|x, y| x.total_cmp(y));
        b.dedup();
        b
    }
}

/// Base law with Fourier transform `1/(λ + ψ(θ))` for a pure drift `c`.
fn drift_base(lambda: f64, c: f64) -> BaseLaw {
    if c == 0.0 {
        BaseLaw {
            atom: 1.0 / lambda,
            pieces: Vec::new(),
        }
    } else {
        let side = if c > 0.0 {
            Side::Positive
        } else {
            Side::Negative
        };
        BaseLaw {
            atom: 0.0,
            pieces: vec![ExpPiece {
                coef: 1.0 / c.abs(),
                rate: lambda / c,
                side,
            }],
        }
    }
}

/// Exponents `α1 < 0 < α2` and scale `A` of the Brownian-with-drift
/// resolvent `1/(λ + ψ) = A(1/(α2 − iθ) − 1/(α1 − iθ))`.
pub fn brownian_roots(lambda: f64, c: f64, sigma: f64) -> (f64, f64, f64) {
    let s2 = sigma * sigma;
    let root = (c * c + 2.0 * lambda * s2).sqrt();
    (1.0 / root, (-c - root) / s2, (-c + root) / s2)
}

fn brownian_base(lambda: f64, c: f64, sigma: f64) -> BaseLaw {
    let (a, alpha1, alpha2) = brownian_roots(lambda, c, sigma);
    BaseLaw {
        atom: 0.0,
        pieces: vec![
            ExpPiece {
                coef: a,
                rate: alpha2,
                side: Side::Positive,
            },
            ExpPiece {
                coef: a,
                rate: alpha1,
                side: Side::Negative,
            },
        ],
    }
}

/// Roots and coefficients of the exponential-jump resolvent for upward jumps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CpExpRoots {
    pub alpha1: f64,
    pub alpha2: f64,
    pub a1: f64,
    pub a2: f64,
    pub discriminant: f64,
}

/// `α_{1,2} = (ac + ν + λ ∓ √D)/(2c)` and `A1 = (a − α1)/√D`,
/// `A2 = (α2 − a)/√D`, `D = (ac + ν + λ)² − 4acλ`; requires `c ≠ 0`.
pub fn cpexp_roots(lambda: f64, c: f64, nu: f64, a: f64) -> CpExpRoots {
    let s = a * c + nu + lambda;
    let disc = s * s - 4.0 * a * c * lambda;
    let sq = disc.sqrt();
    let alpha1 = (s - sq) / (2.0 * c);
    let alpha2 = (s + sq) / (2.0 * c);
    CpExpRoots {
        alpha1,
        alpha2,
        a1: (a - alpha1) / sq,
        a2: (alpha2 - a) / sq,
        discriminant: disc,
    }
}

/// Upward jumps of rate `a`, intensity `nu`, drift `c`.
fn cpexp_up_base(lambda: f64, c: f64, nu: f64, a: f64) -> BaseLaw {
    if c == 0.0 {
        let alpha3 = a * lambda / (nu + lambda);
        return BaseLaw {
            atom: 1.0 / (nu + lambda),
            pieces: vec![ExpPiece {
                coef: a * nu / ((nu + lambda) * (nu + lambda)),
                rate: alpha3,
                side: Side::Positive,
            }],
        };
    }
    let r = cpexp_roots(lambda, c, nu, a);
    let mut pieces = vec![ExpPiece {
        coef: r.a1,
        rate: r.alpha1,
        side: Side::Positive,
    }];
    if c > 0.0 {
        pieces.push(ExpPiece {
            coef: r.a2,
            rate: r.alpha2,
            side: Side::Positive,
        });
    } else {
        pieces.push(ExpPiece {
            coef: -r.a2,
            rate: r.alpha2,
            side: Side::Negative,
        });
    }
    pieces.retain(|p| p.coef != 0.0);
    BaseLaw { atom: 0.0, pieces }
}

fn weight(l0: f64, l1: f64) -> f64 {
    l0 * l1 / (l0 + l1)
}

fn check_rates(l0: f64, l1: f64) -> Result<()> {
    if l0 > 0.0 && l1 > 0.0 && l0.is_finite() && l1.is_finite() {
        Ok(())
    } else {
        Err(invalid("switching rates must be finite and > 0"))
    }
}

fn assemble(
    l0: f64,
    l1: f64,
    bases: [BaseLaw; 2],
    starts: [ScalarLaw; 2],
) -> Result<ClosedDensity> {
    for g in &starts {
        g.validate()?;
    }
    let w = weight(l0, l1);
    let [b0, b1] = bases;
    Ok(ClosedDensity {
        components: vec![
            DensityComponent {
                start: starts[0],
                base: b0.scaled(w),
            },
            DensityComponent {
                start: starts[1],
                base: b1.scaled(w),
            },
        ],
    })
}

/// Limit law of the telegraph process with restart laws `g0, g1`.
pub fn limit_density_telegraph(
    lambda0: f64,
    lambda1: f64,
    c0: f64,
    c1: f64,
    g0: ScalarLaw,
    g1: ScalarLaw,
) -> Result<ClosedDensity> {
    check_rates(lambda0, lambda1)?;
    if c0 == 0.0 && c1 == 0.0 {
        return Err(Error::InvalidCase(
            "both drifts vanish: the limit is the start-law mixture".into(),
        ));
    }
    assemble(
        lambda0,
        lambda1,
        [drift_base(lambda0, c0), drift_base(lambda1, c1)],
        [g0, g1],
    )
}

/// Limit law for Brownian motions with drift.
#[allow(clippy::too_many_arguments)]
pub fn limit_density_brownian(
    lambda0: f64,
    lambda1: f64,
    c0: f64,
    c1: f64,
    sigma0: f64,
    sigma1: f64,
    g0: ScalarLaw,
    g1: ScalarLaw,
) -> Result<ClosedDensity> {
    check_rates(lambda0, lambda1)?;
    if !(sigma0 > 0.0 && sigma1 > 0.0) {
        return Err(Error::InvalidCase(
            "zero volatility: use the telegraph limit".into(),
        ));
    }
    assemble(
        lambda0,
        lambda1,
        [
            brownian_base(lambda0, c0, sigma0),
            brownian_base(lambda1, c1, sigma1),
        ],
        [g0, g1],
    )
}

/// Exponential-jump compound Poisson block in a form suited to the limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CpExpParams {
    pub c: f64,
    pub nu: f64,
    pub a: f64,
    pub orientation: JumpOrientation,
}

fn cpexp_base(lambda: f64, p: CpExpParams) -> Result<BaseLaw> {
    if !(p.a > 0.0 && p.nu >= 0.0 && p.c.is_finite()) {
        return Err(invalid("need a > 0, nu >= 0 and finite c"));
    }
    Ok(match p.orientation {
        JumpOrientation::Positive => cpexp_up_base(lambda, p.c, p.nu, p.a),
        JumpOrientation::Negative => cpexp_up_base(lambda, -p.c, p.nu, p.a).mirrored(),
    })
}

/// Limit law for compound Poisson blocks with exponential jumps.
pub fn limit_density_cpexp(
    lambda0: f64,
    lambda1: f64,
    block0: CpExpParams,
    block1: CpExpParams,
    g0: ScalarLaw,
    g1: ScalarLaw,
) -> Result<ClosedDensity> {
    check_rates(lambda0, lambda1)?;
    assemble(
        lambda0,
        lambda1,
        [cpexp_base(lambda0, block0)?, cpexp_base(lambda1, block1)?],
        [g0, g1],
    )
}

/// Dispatches to the closed form matching the model's blocks.
pub fn limit_density(model: &RegimeModel) -> Result<ClosedDensity> {
    let [l0, l1] = model.lambdas();
    let [g0, g1] = model.start_laws()?;
    let base = |lambda: f64, b: &LevyBlock| -> Result<BaseLaw> {
        match *b {
            LevyBlock::Drift { c } => Ok(drift_base(lambda, c)),
            LevyBlock::BrownianDrift { c, sigma } if sigma > 0.0 => {
                Ok(brownian_base(lambda, c, sigma))
            }
            LevyBlock::BrownianDrift { c, .. } => Ok(drift_base(lambda, c)),
            LevyBlock::CompoundPoissonExp {
                c,
                nu,
                a,
                orientation,
            } => cpexp_base(
                lambda,
                CpExpParams {
                    c,
                    nu,
                    a,
                    orientation,
                },
            ),
            _ => Err(Error::InvalidCase(format!(
                "no closed-form limit for {b:?}"
            ))),
        }
    };
    let bases = [base(l0, model.block(0))?, base(l1, model.block(1))?];
    if bases.iter().all(|b| b.pieces.is_empty()) {
        return Err(Error::InvalidCase(
            "both drifts vanish: the limit is the start-law mixture".into(),
        ));
    }
    assemble(l0, l1, bases, [g0, g1])
}
