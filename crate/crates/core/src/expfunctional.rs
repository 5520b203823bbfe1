//! Exponential functionals `I_∞(γ) = ∫_0^∞ e^{−γX(t)} dt` of the jump-regime
//! process: finiteness criteria, the mean, and the explicit densities for the
//! jump-telegraph process.

use serde::{Deserialize, Serialize};
use statrs::function::beta::{beta_reg, ln_beta};
use statrs::function::gamma::{gamma_lr, ln_gamma};

use crate::error::{invalid, Result};
use crate::levy::{LevyBlock, ScalarLaw};
use crate::quad;
use crate::regime::{exponent_matrix, RegimeModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Finiteness {
    Finite,
    InfiniteAs,
    Unknown,
}

/// Trace and determinant of `𝓛(γ)` together with their signs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayConditions {
    pub gamma: f64,
    pub trace: f64,
    pub det: f64,
    pub tr_ok: bool,
    pub det_ok: bool,
}

/// A `γ` at which the sufficient condition for `I_∞ < ∞` holds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub gamma: f64,
    /// `λ_i + ℓ_i(γ)` for both regimes.
    pub diagonal: [f64; 2],
    pub det: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinitenessVerdict {
    pub status: Finiteness,
    pub certificate: Option<Certificate>,
    pub case_tag: Option<String>,
}

impl FinitenessVerdict {
    fn unknown() -> Self {
        Self {
            status: Finiteness::Unknown,
            certificate: None,
            case_tag: None,
        }
    }
}

/// `Tr 𝓛(γ) > 0` and `Det 𝓛(γ) > 0`, written out in terms of the exponents.
pub fn mgf_decay_conditions(model: &RegimeModel, gamma: f64) -> Result<DecayConditions> {
    if !(gamma > 0.0) {
        return Err(invalid("gamma must be > 0"));
    }
    let [h0, h1] = model.jump_laws()?;
    let [b0, b1] = model.blocks();
    let (l0, l1) = (b0.laplace_exponent(gamma)?, b1.laplace_exponent(gamma)?);
    let (ht0, ht1) = (h0.laplace(gamma)?, h1.laplace(gamma)?);
    let [la0, la1] = model.lambdas();
    let trace = la0 + la1 + l0 + l1;
    let det = l0 * l1 + la0 * l1 + la1 * l0 + la0 * la1 * (1.0 - ht0 * ht1);
    Ok(DecayConditions {
        gamma,
        trace,
        det,
        tr_ok: trace > 0.0,
        det_ok: det > 0.0,
    })
}

fn certificate_at(model: &RegimeModel, gamma: f64) -> Option<Certificate> {
    let m = exponent_matrix(model, gamma).ok()?;
    let cond = mgf_decay_conditions(model, gamma).ok()?;
    let diagonal = [m.entries[0][0], m.entries[1][1]];
    (diagonal[0] > 0.0 && diagonal[1] > 0.0 && cond.det_ok).then_some(Certificate {
        gamma,
        diagonal,
        det: cond.det,
    })
}

const GRID_DEPTH: i32 = 40;
const BISECTION_STEPS: usize = 30;

/// Searches `γ ∈ (0, 1]` on the grid `2^{−k}`, `k = 0..=40`, then bisects
/// towards the largest admissible `γ` next to the first hit.
pub fn finiteness_certificate(model: &RegimeModel) -> FinitenessVerdict {
    if model.jump_laws().is_err() {
        return FinitenessVerdict::unknown();
    }
    for k in 0..=GRID_DEPTH {
        let gamma = 2f64.powi(-k);
        let Some(mut cert) = certificate_at(model, gamma) else {
            continue;
        };
        if k > 0 {
            let (mut ok, mut bad) = (gamma, 2.0 * gamma);
            for _ in 0..BISECTION_STEPS {
                let mid = 0.5 * (ok + bad);
                match certificate_at(model, mid) {
                    Some(c) => {
                        ok = mid;
                        cert = c;
                    }
                    None => bad = mid,
                }
            }
        }
        return FinitenessVerdict {
            status: Finiteness::Finite,
            certificate: Some(cert),
            case_tag: None,
        };
    }
    FinitenessVerdict::unknown()
}

/// Sign pattern of the stable blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StableVariant {
    /// Both blocks are subordinators.
    Plus,
    /// Block 0 is a negated subordinator.
    Minus0,
    /// Block 1 is a negated subordinator.
    Minus1,
}

/// Parameters of the stable-subordinator criterion. The switch jumps satisfy
/// `1 − E e^{−γ(Y0+Y1)} ~ b·γ^beta` as `γ → 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StableCriterion {
    pub a0: f64,
    pub a1: f64,
    pub alpha0: f64,
    pub alpha1: f64,
    pub lambda0: f64,
    pub lambda1: f64,
    pub beta: f64,
    pub b: f64,
    pub variant: StableVariant,
}

pub fn stable_finiteness(p: &StableCriterion) -> Result<FinitenessVerdict> {
    if !(p.a0 > 0.0 && p.a1 > 0.0) {
        return Err(invalid("a0, a1 must be > 0"));
    }
    if !(p.alpha0 < 1.0 && p.alpha0 >= p.alpha1 && p.alpha1 > 0.0) {
        return Err(invalid("need 1 > alpha0 >= alpha1 > 0"));
    }
    if !(p.beta > 0.0 && p.lambda0 > 0.0 && p.lambda1 > 0.0 && p.b.is_finite()) {
        return Err(invalid("need beta > 0, lambda0, lambda1 > 0 and finite b"));
    }
    let (a0, a1, l0, l1, b) = (p.a0, p.a1, p.lambda0, p.lambda1, p.b);
    let above = p.beta > p.alpha1;
    let at = p.beta == p.alpha1;
    let tag = match p.variant {
        StableVariant::Plus => {
            if above {
                Some("1a")
            } else if at {
                let ok = if p.alpha0 > p.alpha1 {
                    a1 + l1 * b >= 0.0
                } else {
                    l0 * a1 + l1 * a0 + l0 * l1 * b >= 0.0
                };
                ok.then_some("1b")
            } else {
                (b >= 0.0).then_some("1c")
            }
        }
        StableVariant::Minus0 => {
            if above {
                Some("2a")
            } else if at {
                (a1 + l1 * b > 0.0).then_some("2b")
            } else {
                (b >= 0.0).then_some("2c")
            }
        }
        StableVariant::Minus1 => {
            if at {
                (l1 * b - a1 >= 0.0).then_some("3a")
            } else if !above {
                (b >= 0.0).then_some("3b")
            } else {
                None
            }
        }
    };
    Ok(match tag {
        Some(t) => FinitenessVerdict {
            status: Finiteness::Finite,
            certificate: None,
            case_tag: Some(t.to_string()),
        },
        None => FinitenessVerdict::unknown(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpFunMean {
    Finite(f64),
    Infinite,
}

/// `E[I_∞ | ε(0) = i] = e1^{(i)}/α1 + e2^{(i)}/α2` at `ξ = 1`.
pub fn expfun_mean(model: &RegimeModel, start_regime: usize) -> Result<ExpFunMean> {
    if start_regime > 1 {
        return Err(invalid("start regime must be 0 or 1"));
    }
    let cond = mgf_decay_conditions(model, 1.0)?;
    if !(cond.tr_ok && cond.det_ok) {
        return Ok(ExpFunMean::Infinite);
    }
    let ed = exponent_matrix(model, 1.0)?.eigen_data()?;
    Ok(ExpFunMean::Finite(
        ed.e1[start_regime] / ed.alpha1 + ed.e2[start_regime] / ed.alpha2,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpFunCase {
    /// `0 < c1 < c0`: shifted Beta law on `(lower, upper)`.
    CompactBeta,
    /// `c1 = 0`: shifted Gamma law.
    ShiftedGamma,
    /// `c1 < 0 < c0`: `(t − lower)/(t − pole)` is Beta distributed.
    BetaPrime,
}

/// Density of `I_∞` given the starting regime, jump-telegraph case.
///
/// * CompactBeta: `A (t−lower)^{p−1} (upper−t)^{q−1}` on `(lower, upper)`;
/// * ShiftedGamma: `rate^p/Γ(p) (t−lower)^{p−1} e^{−rate(t−lower)}`;
/// * BetaPrime: `A (t−lower)^{p−1} (t−pole)^{−p−q}` on `(lower, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpFunDensity {
    pub case: ExpFunCase,
    pub regime: usize,
    pub lower: f64,
    /// Right end of the support (`∞` unless CompactBeta).
    pub upper: f64,
    /// Singular point left of the support (BetaPrime only, else NaN).
    pub pole: f64,
    pub p: f64,
    pub q: f64,
    /// Gamma rate (ShiftedGamma only, else NaN).
    pub rate: f64,
    /// Natural logarithm of the normalising constant.
    pub ln_norm: f64,
}

impl ExpFunDensity {
    fn compact(regime: usize, lower: f64, upper: f64, p: f64, q: f64) -> Self {
        Self {
            case: ExpFunCase::CompactBeta,
            regime,
            lower,
            upper,
            pole: f64::NAN,
            p,
            q,
            rate: f64::NAN,
            ln_norm: -(p + q - 1.0) * (upper - lower).ln() - ln_beta(p, q),
        }
    }

    fn gamma(regime: usize, lower: f64, p: f64, rate: f64) -> Self {
        Self {
            case: ExpFunCase::ShiftedGamma,
            regime,
            lower,
            upper: f64::INFINITY,
            pole: f64::NAN,
            p,
            q: f64::NAN,
            rate,
            ln_norm: p * rate.ln() - ln_gamma(p),
        }
    }

    fn beta_prime(regime: usize, lower: f64, pole: f64, p: f64, q: f64) -> Self {
        Self {
            case: ExpFunCase::BetaPrime,
            regime,
            lower,
            upper: f64::INFINITY,
            pole,
            p,
            q,
            rate: f64::NAN,
            ln_norm: q * (lower - pole).ln() - ln_beta(p, q),
        }
    }

    pub fn support(&self) -> (f64, f64) {
        (self.lower, self.upper)
    }

    /// Normalising constant `A_i`.
    pub fn norm(&self) -> f64 {
        self.ln_norm.exp()
    }

    pub fn pdf(&self, t: f64) -> f64 {
        self.pdf_offset(t - self.lower)
    }

    /// Density at `lower + s`, free of the cancellation in `t − lower`.
    pub fn pdf_offset(&self, s: f64) -> f64 {
        if !(s > 0.0 && s < self.upper - self.lower) {
            return 0.0;
        }
        let ln = match self.case {
            ExpFunCase::CompactBeta => {
                self.ln_norm
                    + (self.p - 1.0) * s.ln()
                    + (self.q - 1.0) * (self.upper - self.lower - s).ln()
            }
            ExpFunCase::ShiftedGamma => self.ln_norm + (self.p - 1.0) * s.ln() - self.rate * s,
            ExpFunCase::BetaPrime => {
                self.ln_norm + (self.p - 1.0) * s.ln()
                    - (self.p + self.q) * (self.lower - self.pole + s).ln()
            }
        };
        ln.exp()
    }

    /// Density at `upper − r`, free of the cancellation in `upper − t`;
    /// zero unless the support is bounded.
    pub fn pdf_from_upper(&self, r: f64) -> f64 {
        let span = self.upper - self.lower;
        if self.case != ExpFunCase::CompactBeta || !(r > 0.0 && r < span) {
            return 0.0;
        }
        (self.ln_norm + (self.p - 1.0) * (span - r).ln() + (self.q - 1.0) * r.ln()).exp()
    }

    pub fn cdf(&self, t: f64) -> f64 {
        if t <= self.lower {
            return 0.0;
        }
        if t >= self.upper {
            return 1.0;
        }
        let s = t - self.lower;
        match self.case {
            ExpFunCase::CompactBeta => beta_reg(self.p, self.q, s / (self.upper - self.lower)),
            ExpFunCase::ShiftedGamma => gamma_lr(self.p, self.rate * s),
            ExpFunCase::BetaPrime => beta_reg(self.p, self.q, s / (t - self.pole)),
        }
    }

    pub fn mean(&self) -> f64 {
        match self.case {
            ExpFunCase::CompactBeta => {
                self.lower + (self.upper - self.lower) * self.p / (self.p + self.q)
            }
            ExpFunCase::ShiftedGamma => self.lower + self.p / self.rate,
            ExpFunCase::BetaPrime => {
                if self.q > 1.0 {
                    self.pole + (self.lower - self.pole) * (self.p + self.q - 1.0) / (self.q - 1.0)
                } else {
                    f64::INFINITY
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpFunLaw {
    Densities([ExpFunDensity; 2]),
    InfiniteAs,
}

/// Jump-telegraph parameters `(λ_i, c_i, y_i)`, with `y_i` the jump made
/// when leaving regime `i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TelegraphParams {
    pub lambda0: f64,
    pub lambda1: f64,
    pub c0: f64,
    pub c1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl TelegraphParams {
    pub fn model(&self) -> Result<RegimeModel> {
        RegimeModel::jump_telegraph(
            self.lambda0,
            self.lambda1,
            self.c0,
            self.c1,
            self.y0,
            self.y1,
        )
    }

    /// Reads the parameters off a jump model with drift blocks and
    /// deterministic switch jumps.
    pub fn from_model(model: &RegimeModel) -> Result<Self> {
        let [h0, h1] = model.jump_laws()?;
        match (model.block(0), model.block(1), h0, h1) {
            (
                &LevyBlock::Drift { c: c0 },
                &LevyBlock::Drift { c: c1 },
                ScalarLaw::Dirac { y: y0 },
                ScalarLaw::Dirac { y: y1 },
            ) => Ok(Self {
                lambda0: model.lambda0(),
                lambda1: model.lambda1(),
                c0,
                c1,
                y0,
                y1,
            }),
            _ => Err(crate::error::Error::InvalidCase(
                "closed-form densities need drift blocks and Dirac switch jumps".into(),
            )),
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.lambda0 > 0.0 && self.lambda1 > 0.0) {
            return Err(invalid("switching rates must be > 0"));
        }
        if !(self.c0 > 0.0 && self.c0 > self.c1 && self.c1.is_finite()) {
            return Err(invalid("need c0 > 0 and c0 > c1"));
        }
        let scale = self.y0.abs().max(self.y1.abs()).max(1.0);
        if (self.y0 + self.y1).abs() > 1e-12 * scale || self.y0 > 0.0 {
            return Err(invalid("need y0 + y1 = 0 and y0 <= 0"));
        }
        Ok(())
    }
}

/// Densities `(f0, f1)` of `I_∞` for the jump-telegraph process, or
/// [`ExpFunLaw::InfiniteAs`] when `c1 < 0` and `λ0/c0 + λ1/c1 ≥ 0`.
pub fn telegraph_expfun_density(p: &TelegraphParams) -> Result<ExpFunLaw> {
    p.validate()?;
    let a = 1.0 / p.c0;
    let alpha = p.lambda0 / p.c0;
    let lower1 = a * (-p.y1).exp();
    if p.c1 == 0.0 {
        return Ok(ExpFunLaw::Densities([
            ExpFunDensity::gamma(0, a, alpha, p.lambda1 * p.y0.exp()),
            ExpFunDensity::gamma(1, lower1, alpha + 1.0, p.lambda1),
        ]));
    }
    let b = 1.0 / p.c1;
    let beta = p.lambda1 / p.c1;
    let far0 = b * (-p.y0).exp();
    if p.c1 > 0.0 {
        return Ok(ExpFunLaw::Densities([
            ExpFunDensity::compact(0, a, far0, alpha, beta + 1.0),
            ExpFunDensity::compact(1, lower1, b, alpha + 1.0, beta),
        ]));
    }
    if alpha + beta >= 0.0 {
        return Ok(ExpFunLaw::InfiniteAs);
    }
    let q = -alpha - beta;
    Ok(ExpFunLaw::Densities([
        ExpFunDensity::beta_prime(0, a, far0, alpha, q),
        ExpFunDensity::beta_prime(1, lower1, b, alpha + 1.0, q),
    ]))
}

/// Right-hand side of the integral system satisfied by `(f0, f1)` at `t`
/// for regime `regime`, evaluated by quadrature.
pub fn integral_system_rhs(
    p: &TelegraphParams,
    densities: &[ExpFunDensity; 2],
    regime: usize,
    t: f64,
) -> f64 {
    const TOL: f64 = 1e-12;
    let a = 1.0 / p.c0;
    let alpha = p.lambda0 / p.c0;
    let [f0, f1] = densities;
    if regime == 0 {
        if t <= a {
            return 0.0;
        }
        let from = t * p.y0.exp();
        let kernel = |u: f64| (u * (-p.y0).exp() - a).powf(-alpha) * f1.pdf(u);
        let lo = from.max(f1.lower);
        let integral = if f1.upper.is_finite() {
            if lo >= f1.upper {
                0.0
            } else {
                quad::integrate(kernel, lo, f1.upper, TOL)
            }
        } else {
            quad::integrate_to_inf(kernel, lo, TOL)
        };
        alpha * (t - a).powf(alpha - 1.0) * integral
    } else {
        let to = t * p.y1.exp();
        let hi = to.min(f0.upper);
        if hi <= f0.lower {
            return 0.0;
        }
        if p.c1 == 0.0 {
            let lam = p.lambda1;
            let kernel = |u: f64| (-lam * (t - u * (-p.y1).exp())).exp() * f0.pdf(u);
            return lam * quad::integrate(kernel, f0.lower, hi, TOL);
        }
        let b = 1.0 / p.c1;
        let beta = p.lambda1 / p.c1;
        let kernel = |u: f64| (u * (-p.y1).exp() - b).abs().powf(-beta) * f0.pdf(u);
        beta.abs() * (t - b).abs().powf(beta - 1.0) * quad::integrate(kernel, f0.lower, hi, TOL)
    }
}
