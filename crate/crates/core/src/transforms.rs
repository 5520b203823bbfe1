//! Closed-form transforms of `X(t)`.
//!
//! * renewal regime: characteristic function `Φ_i(t, θ) = E[e^{iθX(t)} | ε(0)=i]`
//!   and its `t → ∞` limit;
//! * jump regime: moment generating function `L_i(t, ξ) = E[e^{-ξX(t)} | ε(0)=i]`
//!   through the explicit spectral form of `exp(-t𝓛(ξ))`;
//! * switching triggered by big jumps of the driving process;
//! * subordination by an independent Markov-modulated subordinator.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, invalid, Error, Result};
use crate::levy::LevyBlock;
use crate::regime::{exponent_matrix, EigenData, ExponentMatrix, RegimeModel};

/// A transform conditioned on the starting regime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformPair<T> {
    pub phi0: T,
    pub phi1: T,
}

impl<T: Copy> TransformPair<T> {
    pub fn new(phi0: T, phi1: T) -> Self {
        Self { phi0, phi1 }
    }

    pub fn get(&self, regime: usize) -> T {
        if regime == 0 {
            self.phi0
        } else {
            self.phi1
        }
    }

    pub fn as_array(&self) -> [T; 2] {
        [self.phi0, self.phi1]
    }
}

fn check_time(t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(invalid("t must be finite and >= 0"))
    }
}

/// `(1 − e^{−κt})/κ`; `Re κ ≥ λ_i > 0` keeps the denominator away from zero.
fn decay_integral(kappa: Complex64, t: f64) -> Complex64 {
    (1.0 - (-kappa * t).exp()) / kappa
}

/// `(e^{−2λt} − e^{−(2λ+δ)t})/δ`, with a two-term expansion near the
/// removable singularity `δ = 0`.
fn crossing_term(two_lambda: f64, delta: Complex64, t: f64, eps_sing: f64) -> Complex64 {
    let base = (-two_lambda * t).exp();
    if delta.norm() < eps_sing {
        base * t * (1.0 - 0.5 * delta * t)
    } else {
        (base - (-(two_lambda + delta) * t).exp()) / delta
    }
}

/// Characteristic function of the renewal-regime process at time `t`.
pub fn renewal_char(model: &RegimeModel, t: f64, theta: f64) -> Result<TransformPair<Complex64>> {
    check_time(t)?;
    let [g0, g1] = model.start_laws()?;
    let [b0, b1] = model.blocks();
    let psi0 = b0.khintchine_exponent(theta)?;
    let psi1 = b1.khintchine_exponent(theta)?;
    let (l0, l1) = (model.lambda0(), model.lambda1());
    let two_lambda = l0 + l1;
    let eps_sing = 1e-6 * two_lambda;
    let gh0 = g0.fourier(theta);
    let gh1 = g1.fourier(theta);

    let k0 = l0 + psi0;
    let k1 = l1 + psi1;
    let d0 = decay_integral(k0, t);
    let d1 = decay_integral(k1, t);
    let x0 = crossing_term(two_lambda, psi0 - l1, t, eps_sing);
    let x1 = crossing_term(two_lambda, psi1 - l0, t, eps_sing);

    let phi00 = d0 - x0;
    let phi01 = d1 + l0 / l1 * x1;
    let phi10 = d0 + l1 / l0 * x0;
    let phi11 = d1 - x1;

    let pref = l0 * l1 / two_lambda;
    let phi0 = (-k0 * t).exp() * gh0 + pref * (phi00 * gh0 + phi01 * gh1);
    let phi1 = (-k1 * t).exp() * gh1 + pref * (phi10 * gh0 + phi11 * gh1);
    Ok(TransformPair::new(phi0, phi1))
}

/// Characteristic function of the `t → ∞` limit of the renewal-regime process.
pub fn limit_char(model: &RegimeModel, theta: f64) -> Result<Complex64> {
    let [g0, g1] = model.start_laws()?;
    let [b0, b1] = model.blocks();
    let psi0 = b0.khintchine_exponent(theta)?;
    let psi1 = b1.khintchine_exponent(theta)?;
    let (l0, l1) = (model.lambda0(), model.lambda1());
    let pref = l0 * l1 / (l0 + l1);
    Ok(pref * (g0.fourier(theta) / (l0 + psi0) + g1.fourier(theta) / (l1 + psi1)))
}

fn reject_formal(model: &RegimeModel) -> Result<()> {
    if model.has_formal_block() {
        Err(domain(
            "negated stable subordinators have no finite moment generating function",
        ))
    } else {
        Ok(())
    }
}

/// `exp(−t𝓛)·1` in the spectral form `e^{−α1 t}e1 + e^{−α2 t}e2`.
pub fn spectral_mgf(eigen: &EigenData, t: f64) -> TransformPair<f64> {
    let w1 = (-eigen.alpha1 * t).exp();
    let w2 = (-eigen.alpha2 * t).exp();
    TransformPair::new(
        w1 * eigen.e1[0] + w2 * eigen.e2[0],
        w1 * eigen.e1[1] + w2 * eigen.e2[1],
    )
}

/// Moment generating function of the jump-regime process.
pub fn jump_mgf(model: &RegimeModel, t: f64, xi: f64) -> Result<TransformPair<f64>> {
    check_time(t)?;
    reject_formal(model)?;
    let eigen = exponent_matrix(model, xi)?.eigen_data()?;
    Ok(spectral_mgf(&eigen, t))
}

/// `½e^{−st}[e^{tD} + e^{−tD} + k(e^{tD} − e^{−tD})]` written with cosh/sinh.
fn hyperbolic(s: f64, d: f64, k: f64, t: f64) -> f64 {
    let td = t * d;
    if td < 700.0 {
        (-s * t).exp() * (td.cosh() + k * td.sinh())
    } else {
        0.5 * (((d - s) * t).exp() * (1.0 + k) + (-(s + d) * t).exp() * (1.0 - k))
    }
}

/// The same transform as [`jump_mgf`], evaluated from the cosh/sinh
/// representation in terms of `λ, μ, ℓ(ξ), m(ξ)` and `D(ξ)`.
pub fn jump_mgf_hyperbolic(model: &RegimeModel, t: f64, xi: f64) -> Result<TransformPair<f64>> {
    check_time(t)?;
    reject_formal(model)?;
    let [h0, h1] = model.jump_laws()?;
    let [b0, b1] = model.blocks();
    let (l0, l1) = (b0.laplace_exponent(xi)?, b1.laplace_exponent(xi)?);
    let (ht0, ht1) = (h0.laplace(xi)?, h1.laplace(xi)?);
    let (la0, la1) = (model.lambda0(), model.lambda1());
    let lambda = model.lambda_mean();
    let mu = model.lambda_half_diff();
    let ell = 0.5 * (l0 + l1);
    let m = 0.5 * (l0 - l1);
    let d = ((m + mu) * (m + mu) + la0 * la1 * ht0 * ht1).sqrt();
    let k0 = (la0 * ht0 - mu - m) / d;
    let k1 = (la1 * ht1 + mu + m) / d;
    let s = lambda + ell;
    Ok(TransformPair::new(
        hyperbolic(s, d, k0, t),
        hyperbolic(s, d, k1, t),
    ))
}

/// Moment generating function of the classical telegraph process (drifts
/// `c0, c1`, no switch jumps).
pub fn telegraph_mgf(
    lambda0: f64,
    lambda1: f64,
    c0: f64,
    c1: f64,
    t: f64,
    xi: f64,
) -> TransformPair<f64> {
    let lambda = 0.5 * (lambda0 + lambda1);
    let mu = 0.5 * (lambda0 - lambda1);
    let a = 0.5 * (c0 + c1);
    let c = 0.5 * (c0 - c1);
    let d = ((mu + c * xi).powi(2) + lambda0 * lambda1).sqrt();
    let pre = (-t * (lambda + a * xi)).exp();
    let (ch, sh) = ((t * d).cosh(), (t * d).sinh() / d);
    TransformPair::new(
        pre * (ch + (lambda - c * xi) * sh),
        pre * (ch + (lambda + c * xi) * sh),
    )
}

/// Whether the big jump that triggers a switch is part of the path increment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TriggerConvention {
    /// The triggering jump is discarded; only the switch happens.
    #[default]
    Excluded,
    /// The triggering jump is added to the path before switching.
    Included,
}

/// Regime switching driven by the process itself: state 0 switches after a
/// jump below `−r0`, state 1 after a jump above `r1`. Both blocks must be
/// [`LevyBlock::CompoundPoissonBilateral`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BigJumpModel {
    pub block0: LevyBlock,
    pub block1: LevyBlock,
    pub r0: f64,
    pub r1: f64,
    #[serde(default)]
    pub convention: TriggerConvention,
}

/// Parameters of a bilateral block: (c, sigma, nu, p, a_plus, a_minus).
pub(crate) fn bilateral(block: &LevyBlock) -> Result<(f64, f64, f64, f64, f64, f64)> {
    match *block {
        LevyBlock::CompoundPoissonBilateral {
            c,
            sigma,
            nu,
            p,
            a_plus,
            a_minus,
        } => Ok((c, sigma, nu, p, a_plus, a_minus)),
        _ => Err(invalid(
            "big-jump switching needs compound-Poisson-bilateral blocks",
        )),
    }
}

impl BigJumpModel {
    pub fn new(
        block0: LevyBlock,
        block1: LevyBlock,
        r0: f64,
        r1: f64,
        convention: TriggerConvention,
    ) -> Result<Self> {
        let m = Self {
            block0,
            block1,
            r0,
            r1,
            convention,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        self.block0.validate()?;
        self.block1.validate()?;
        if !(self.r0 > 0.0 && self.r0.is_finite() && self.r1 > 0.0 && self.r1.is_finite()) {
            return Err(invalid("thresholds r0, r1 must be finite and > 0"));
        }
        let (_, _, nu0, p0, _, _) = bilateral(&self.block0)?;
        let (_, _, nu1, p1, _, _) = bilateral(&self.block1)?;
        if !(nu0 * (1.0 - p0) > 0.0) {
            return Err(invalid("block0 needs downward jumps (nu > 0, p < 1)"));
        }
        if !(nu1 * p1 > 0.0) {
            return Err(invalid("block1 needs upward jumps (nu > 0, p > 0)"));
        }
        Ok(())
    }

    /// Switching intensity: mass of the Lévy measure beyond the threshold.
    pub fn switch_rate(&self, regime: usize) -> Result<f64> {
        if regime == 0 {
            let (_, _, nu, p, _, am) = bilateral(&self.block0)?;
            Ok(nu * (1.0 - p) * (-am * self.r0).exp())
        } else {
            let (_, _, nu, p, ap, _) = bilateral(&self.block1)?;
            Ok(nu * p * (-ap * self.r1).exp())
        }
    }

    /// `a_0(ξ) = ∫_{x ≤ −r0} e^{−ξx} Π0(dx)`, `a_1(ξ) = ∫_{x ≥ r1} e^{−ξx} Π1(dx)`.
    pub fn tail_transform(&self, regime: usize, xi: f64) -> Result<f64> {
        if regime == 0 {
            let (_, _, nu, p, _, am) = bilateral(&self.block0)?;
            if !(xi < am) {
                return Err(domain(format!(
                    "tail integral of block0 diverges for xi = {xi} >= {am}"
                )));
            }
            Ok(nu * (1.0 - p) * am * (-(am - xi) * self.r0).exp() / (am - xi))
        } else {
            let (_, _, nu, p, ap, _) = bilateral(&self.block1)?;
            if !(xi > -ap) {
                return Err(domain(format!(
                    "tail integral of block1 diverges for xi = {xi} <= {}",
                    -ap
                )));
            }
            Ok(nu * p * ap * (-(ap + xi) * self.r1).exp() / (ap + xi))
        }
    }

    /// Laplace exponent of the block with its switching jumps removed.
    pub fn truncated_exponent(&self, regime: usize, xi: f64) -> Result<f64> {
        let block = if regime == 0 {
            &self.block0
        } else {
            &self.block1
        };
        Ok(
            block.laplace_exponent(xi)? + self.tail_transform(regime, xi)?
                - self.switch_rate(regime)?,
        )
    }

    /// Generator matrix of `(L_0, L_1)`: diagonal `a_i(ξ) + ℓ_i(ξ)`
    /// (`= λ_i + ℓ̄_i(ξ)`), off-diagonal `−λ_i` or `−a_i(ξ)` depending on the
    /// trigger convention.
    pub fn exponent_matrix(&self, xi: f64) -> Result<ExponentMatrix> {
        let a0 = self.tail_transform(0, xi)?;
        let a1 = self.tail_transform(1, xi)?;
        let l0 = self.block0.laplace_exponent(xi)?;
        let l1 = self.block1.laplace_exponent(xi)?;
        let (o0, o1) = match self.convention {
            TriggerConvention::Excluded => (self.switch_rate(0)?, self.switch_rate(1)?),
            TriggerConvention::Included => (a0, a1),
        };
        Ok(ExponentMatrix::new([[a0 + l0, -o0], [-o1, a1 + l1]]))
    }
}

/// Moment generating function of the big-jump switching process, in the
/// cosh/sinh form with `a(ξ), b(ξ)` replacing `λ, μ`.
pub fn bigjump_mgf(model: &BigJumpModel, t: f64, xi: f64) -> Result<TransformPair<f64>> {
    check_time(t)?;
    model.validate()?;
    let a0 = model.tail_transform(0, xi)?;
    let a1 = model.tail_transform(1, xi)?;
    let l0 = model.block0.laplace_exponent(xi)?;
    let l1 = model.block1.laplace_exponent(xi)?;
    let (o0, o1) = match model.convention {
        TriggerConvention::Excluded => (model.switch_rate(0)?, model.switch_rate(1)?),
        TriggerConvention::Included => (a0, a1),
    };
    let a = 0.5 * (a0 + a1);
    let b = 0.5 * (a0 - a1);
    let ell = 0.5 * (l0 + l1);
    let m = 0.5 * (l0 - l1);
    let d = ((m + b) * (m + b) + o0 * o1).sqrt();
    let s = a + ell;
    Ok(TransformPair::new(
        hyperbolic(s, d, (o0 - b - m) / d, t),
        hyperbolic(s, d, (o1 + b + m) / d, t),
    ))
}

/// Laplace transform of `X∘Z(t)` for the jump-regime process `X` time-changed
/// by an independent Markov-modulated subordinator `Z`.
///
/// Entry `[i][j]` conditions on `ε^X(0) = i` and `ε^S(0) = j`.
pub fn subordinated_mgf(
    x_model: &RegimeModel,
    z_model: &RegimeModel,
    t: f64,
    xi: f64,
) -> Result<[[f64; 2]; 2]> {
    check_time(t)?;
    reject_formal(x_model)?;
    check_subordinator_model(z_model)?;
    let eigen = exponent_matrix(x_model, xi)?.eigen_data()?;
    let [s0, s1] = z_model.blocks();
    let (la0, la1) = (z_model.lambda0(), z_model.lambda1());
    let lambda = z_model.lambda_mean();
    let mu = z_model.lambda_half_diff();
    let mut out = [[0.0; 2]; 2];
    for (alpha, e) in [(eigen.alpha1, eigen.e1), (eigen.alpha2, eigen.e2)] {
        let (ls0, ls1) = (
            s0.laplace_exponent(alpha)
                .map_err(|_| subordinator_domain(alpha))?,
            s1.laplace_exponent(alpha)
                .map_err(|_| subordinator_domain(alpha))?,
        );
        let ell = 0.5 * (ls0 + ls1);
        let m = 0.5 * (ls0 - ls1);
        let d = ((m + mu) * (m + mu) + la0 * la1).sqrt();
        let s = lambda + ell;
        let z = [
            hyperbolic(s, d, (lambda - m) / d, t),
            hyperbolic(s, d, (lambda + m) / d, t),
        ];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] += z[j] * e[i];
            }
        }
    }
    Ok(out)
}

fn subordinator_domain(alpha: f64) -> Error {
    domain(format!(
        "eigenvalue {alpha} lies outside the Laplace domain of the subordinator blocks"
    ))
}

pub(crate) fn check_subordinator_model(z_model: &RegimeModel) -> Result<()> {
    let laws = z_model.jump_laws()?;
    for b in z_model.blocks() {
        if !b.is_subordinator() {
            return Err(invalid(format!("{b:?} is not a subordinator")));
        }
    }
    for law in laws {
        if law.atoms() != Some(vec![(0.0, 1.0)]) {
            return Err(invalid(
                "subordinator model must have Dirac{0} switch jumps",
            ));
        }
    }
    Ok(())
}
