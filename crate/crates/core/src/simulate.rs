//! Exact path simulation.
//!
//! Every path owns an [`RngStream`] keyed by `(seed, path index)`, so results
//! do not depend on how paths are spread over threads.

use std::f64::consts::PI;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Binomial, Distribution, Exp1, Gamma, Poisson, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::levy::{LevyBlock, ScalarLaw};
use crate::regime::{RegimeModel, VariantKind};
use crate::transforms::{bilateral, check_subordinator_model, BigJumpModel, TriggerConvention};

/// Counter-based random stream for one path.
#[derive(Debug, Clone)]
pub struct RngStream {
    inner: ChaCha8Rng,
    seed: u64,
    stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream_id);
        Self {
            inner,
            seed,
            stream_id,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

/// Runs `f` once per path index in parallel and returns results in index
/// order. `workers = None` uses the global rayon pool.
pub fn run_paths<T, F>(n_paths: usize, seed: u64, workers: Option<usize>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut RngStream) -> T + Sync + Send,
{
    let job = || {
        (0..n_paths as u64)
            .into_par_iter()
            .map(|i| f(&mut RngStream::new(seed, i)))
            .collect()
    };
    match workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .expect("thread pool")
            .install(job),
        None => job(),
    }
}

/// A simulated trajectory summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSample {
    /// Switching times `T_1 < T_2 < …` inside `[0, t]`.
    pub switch_times: Vec<f64>,
    /// Regime of each segment; one more entry than `switch_times`.
    pub regimes: Vec<usize>,
    /// Value of the process at the end of each simulated segment.
    pub segment_ends: Vec<f64>,
    pub terminal: f64,
}

impl PathSample {
    pub fn switch_count(&self) -> usize {
        self.switch_times.len()
    }

    pub fn final_regime(&self) -> usize {
        *self.regimes.last().expect("at least one segment")
    }
}

fn exp_time<R: Rng + ?Sized>(rate: f64, rng: &mut R) -> f64 {
    let e: f64 = rng.sample(Exp1);
    e / rate
}

/// Sum of `n` independent `Exp(rate)` variables.
fn exp_sum<R: Rng + ?Sized>(n: u64, rate: f64, rng: &mut R) -> f64 {
    if n == 0 {
        0.0
    } else {
        Gamma::new(n as f64, 1.0 / rate)
            .expect("gamma params")
            .sample(rng)
    }
}

fn poisson<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    if mean <= 0.0 {
        0
    } else {
        Poisson::new(mean).expect("poisson mean").sample(rng) as u64
    }
}

/// Standard positive `alpha`-stable variable with `E e^{−ξS} = e^{−ξ^alpha}`
/// (Kanter's representation).
pub fn positive_stable<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> f64 {
    let u = PI * rng.random::<f64>();
    let w: f64 = rng.sample(Exp1);
    let a = (alpha * u).sin() / u.sin().powf(1.0 / alpha);
    let b = (((1.0 - alpha) * u).sin() / w).powf((1.0 - alpha) / alpha);
    a * b
}

/// Exact draw of the block increment over a window of length `dt`.
pub fn simulate_block<R: Rng + ?Sized>(block: &LevyBlock, dt: f64, rng: &mut R) -> Result<f64> {
    if !(dt >= 0.0 && dt.is_finite()) {
        return Err(invalid("dt must be finite and >= 0"));
    }
    block.validate()?;
    Ok(block_increment(block, dt, rng))
}

pub(crate) fn block_increment<R: Rng + ?Sized>(block: &LevyBlock, dt: f64, rng: &mut R) -> f64 {
    if dt == 0.0 {
        return 0.0;
    }
    match *block {
        LevyBlock::Drift { c } => c * dt,
        LevyBlock::BrownianDrift { c, sigma } => {
            let z: f64 = rng.sample(StandardNormal);
            c * dt + sigma * dt.sqrt() * z
        }
        LevyBlock::CompoundPoissonExp {
            c,
            nu,
            a,
            orientation,
        } => {
            let n = poisson(nu * dt, rng);
            c * dt + orientation.sign() * exp_sum(n, a, rng)
        }
        LevyBlock::CompoundPoissonBilateral {
            c,
            sigma,
            nu,
            p,
            a_plus,
            a_minus,
        } => {
            let z: f64 = rng.sample(StandardNormal);
            let n = poisson(nu * dt, rng);
            let up = if n == 0 {
                0
            } else {
                Binomial::new(n, p).expect("binomial").sample(rng)
            };
            c * dt + sigma * dt.sqrt() * z + exp_sum(up, a_plus, rng)
                - exp_sum(n - up, a_minus, rng)
        }
        LevyBlock::StableSubordinator { a, alpha, sign } => {
            sign.value() * (a * dt).powf(1.0 / alpha) * positive_stable(alpha, rng)
        }
    }
}

/// Draw from a restart or switch-jump law.
pub fn sample_law<R: Rng + ?Sized>(law: &ScalarLaw, rng: &mut R) -> f64 {
    match *law {
        ScalarLaw::Dirac { y } => y,
        ScalarLaw::Exponential { rate, sign } => sign.sign() * exp_time(rate, rng),
        ScalarLaw::Gaussian { mean, sd } => {
            let z: f64 = rng.sample(StandardNormal);
            mean + sd * z
        }
        ScalarLaw::TwoPoint { y_a, y_b, prob_a } => {
            if rng.random::<f64>() < prob_a {
                y_a
            } else {
                y_b
            }
        }
    }
}

/// Sum of `n` independent draws from `law`.
fn sample_law_sum<R: Rng + ?Sized>(law: &ScalarLaw, n: u64, rng: &mut R) -> f64 {
    match *law {
        ScalarLaw::Dirac { y } => n as f64 * y,
        ScalarLaw::Exponential { rate, sign } => sign.sign() * exp_sum(n, rate, rng),
        ScalarLaw::Gaussian { mean, sd } => {
            let z: f64 = rng.sample(StandardNormal);
            n as f64 * mean + sd * (n as f64).sqrt() * z
        }
        ScalarLaw::TwoPoint { y_a, y_b, prob_a } => {
            let hits = if n == 0 {
                0
            } else {
                Binomial::new(n, prob_a)
                    .expect("binomial params")
                    .sample(rng)
            };
            hits as f64 * y_a + (n - hits) as f64 * y_b
        }
    }
}

fn check_start(t: f64, start_regime: usize) -> Result<()> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(invalid("t must be finite and >= 0"));
    }
    if start_regime > 1 {
        return Err(invalid("start regime must be 0 or 1"));
    }
    Ok(())
}

/// Renewal-regime path: only the segment containing `t` contributes.
pub fn simulate_renewal_path<R: Rng + ?Sized>(
    model: &RegimeModel,
    t: f64,
    start_regime: usize,
    rng: &mut R,
) -> Result<PathSample> {
    check_start(t, start_regime)?;
    let laws = model.start_laws()?;
    let lambdas = model.lambdas();
    let mut regime = start_regime;
    let mut now = 0.0;
    let mut switch_times = Vec::new();
    let mut regimes = vec![regime];
    loop {
        let hold = exp_time(lambdas[regime], rng);
        if now + hold >= t {
            break;
        }
        now += hold;
        regime = 1 - regime;
        switch_times.push(now);
        regimes.push(regime);
    }
    let x = sample_law(&laws[regime], rng) + block_increment(model.block(regime), t - now, rng);
    Ok(PathSample {
        switch_times,
        regimes,
        segment_ends: vec![x],
        terminal: x,
    })
}

pub fn simulate_renewal<R: Rng + ?Sized>(
    model: &RegimeModel,
    t: f64,
    start_regime: usize,
    rng: &mut R,
) -> Result<f64> {
    Ok(simulate_renewal_path(model, t, start_regime, rng)?.terminal)
}

/// Jump-regime path. Leaving regime `i` adds a jump drawn from `h_i`.
pub fn simulate_jump_path<R: Rng + ?Sized>(
    model: &RegimeModel,
    t: f64,
    start_regime: usize,
    rng: &mut R,
) -> Result<PathSample> {
    check_start(t, start_regime)?;
    let laws = model.jump_laws()?;
    let lambdas = model.lambdas();
    let mut regime = start_regime;
    let mut now = 0.0;
    let mut x = 0.0;
    let mut path = PathSample {
        switch_times: Vec::new(),
        regimes: vec![regime],
        segment_ends: Vec::new(),
        terminal: 0.0,
    };
    loop {
        let hold = exp_time(lambdas[regime], rng);
        if now + hold >= t {
            x += block_increment(model.block(regime), t - now, rng);
            path.segment_ends.push(x);
            break;
        }
        x += block_increment(model.block(regime), hold, rng);
        path.segment_ends.push(x);
        x += sample_law(&laws[regime], rng);
        now += hold;
        regime = 1 - regime;
        path.switch_times.push(now);
        path.regimes.push(regime);
    }
    path.terminal = x;
    Ok(path)
}

/// Expected number of full switching cycles left below which
/// [`simulate_jump`] steps one holding time at a time.
pub const BATCH_MIN_CYCLES: f64 = 32.0;

/// Terminal value of a jump-regime path. Long horizons are covered in
/// batches of whole cycles: the holding times of `m` cycles are summed per
/// regime (Gamma), the batch is kept when it ends before `t`, and otherwise
/// split in half by Beta bridging until it does or one cycle is left.
pub fn simulate_jump<R: Rng + ?Sized>(
    model: &RegimeModel,
    t: f64,
    start_regime: usize,
    rng: &mut R,
) -> Result<f64> {
    check_start(t, start_regime)?;
    let laws = model.jump_laws()?;
    let lambdas = model.lambdas();
    let cycle = 1.0 / lambdas[0] + 1.0 / lambdas[1];
    let mut regime = start_regime;
    let mut left = t;
    let mut x = 0.0;
    while left / cycle >= BATCH_MIN_CYCLES {
        let other = 1 - regime;
        let mut m = (left / (2.0 * cycle)) as u64;
        let mut here = exp_sum(m, lambdas[regime], rng);
        let mut there = exp_sum(m, lambdas[other], rng);
        loop {
            if here + there < left {
                x += block_increment(model.block(regime), here, rng)
                    + block_increment(model.block(other), there, rng)
                    + sample_law_sum(&laws[regime], m, rng)
                    + sample_law_sum(&laws[other], m, rng);
                left -= here + there;
                break;
            }
            if m == 1 {
                if here >= left {
                    return Ok(x + block_increment(model.block(regime), left, rng));
                }
                x += block_increment(model.block(regime), here, rng)
                    + sample_law(&laws[regime], rng);
                return Ok(x + block_increment(model.block(other), left - here, rng));
            }
            let k = m / 2;
            let split = Beta::new(k as f64, (m - k) as f64).expect("beta params");
            let here_k = here * split.sample(rng);
            let there_k = there * split.sample(rng);
            if here_k + there_k < left {
                x += block_increment(model.block(regime), here_k, rng)
                    + block_increment(model.block(other), there_k, rng)
                    + sample_law_sum(&laws[regime], k, rng)
                    + sample_law_sum(&laws[other], k, rng);
                left -= here_k + there_k;
                here -= here_k;
                there -= there_k;
                m -= k;
            } else {
                here = here_k;
                there = there_k;
                m = k;
            }
        }
    }
    loop {
        let hold = exp_time(lambdas[regime], rng);
        if hold >= left {
            return Ok(x + block_increment(model.block(regime), left, rng));
        }
        x += block_increment(model.block(regime), hold, rng) + sample_law(&laws[regime], rng);
        left -= hold;
        regime = 1 - regime;
    }
}

/// `X(Z(t))` for independent `X` (jump regime) and subordinator `Z`.
/// `start_regimes = [ε^X(0), ε^S(0)]`.
pub fn simulate_subordinated<R: Rng + ?Sized>(
    x_model: &RegimeModel,
    z_model: &RegimeModel,
    t: f64,
    start_regimes: [usize; 2],
    rng: &mut R,
) -> Result<f64> {
    check_subordinator_model(z_model)?;
    let horizon = simulate_jump(z_model, t, start_regimes[1], rng)?;
    let mut sub = ChaCha8Rng::seed_from_u64(rng.next_u64());
    simulate_jump(x_model, horizon, start_regimes[0], &mut sub)
}

/// Substep length for segments without a closed-form integral of `e^{−X}`.
pub const EXPFUN_SUBSTEP: f64 = 1e-3;
/// Consecutive negligible segments that end an exponential-functional path.
pub const EXPFUN_QUIET_SEGMENTS: usize = 8;

/// `∫_0^Δ e^{−(x + η(s))} ds` along a freshly simulated block path; returns
/// the integral and the block increment.
fn segment_integral<R: Rng + ?Sized>(
    block: &LevyBlock,
    x: f64,
    dt: f64,
    rng: &mut R,
) -> (f64, f64) {
    match *block {
        LevyBlock::Drift { c } => {
            let integral = if c == 0.0 {
                (-x).exp() * dt
            } else {
                (-x).exp() * -(-c * dt).exp_m1() / c
            };
            (integral, c * dt)
        }
        _ => {
            let mut acc = 0.0;
            let mut inc = 0.0;
            let mut left = (-x).exp();
            let mut done = 0.0;
            while done < dt {
                let h = EXPFUN_SUBSTEP.min(dt - done);
                inc += block_increment(block, h, rng);
                let right = (-(x + inc)).exp();
                acc += 0.5 * h * (left + right);
                left = right;
                done += h;
            }
            (acc, inc)
        }
    }
}

/// One draw of `∫_0^∞ e^{−X(t)} dt` for the jump-regime process started in
/// `start_regime`. Returns the value and whether `max_horizon` was hit before
/// the stopping rule fired.
pub fn simulate_expfun<R: Rng + ?Sized>(
    model: &RegimeModel,
    start_regime: usize,
    rel_tol: f64,
    max_horizon: f64,
    rng: &mut R,
) -> Result<(f64, bool)> {
    if !(rel_tol > 0.0 && rel_tol < 1.0) {
        return Err(invalid("rel_tol must lie in (0, 1)"));
    }
    if !(max_horizon > 0.0) {
        return Err(invalid("max_horizon must be > 0"));
    }
    check_start(0.0, start_regime)?;
    if model.kind() != VariantKind::Jump {
        return Err(crate::error::Error::WrongVariant { expected: "jump" });
    }
    let laws = model.jump_laws()?;
    let lambdas = model.lambdas();
    let mut regime = start_regime;
    let mut now = 0.0;
    let mut x = 0.0;
    let mut total = 0.0;
    let mut quiet = 0;
    loop {
        let hold = exp_time(lambdas[regime], rng);
        let truncated = now + hold >= max_horizon;
        let dt = if truncated { max_horizon - now } else { hold };
        let (part, inc) = segment_integral(model.block(regime), x, dt, rng);
        total += part;
        if truncated {
            return Ok((total, true));
        }
        if part < rel_tol * total {
            quiet += 1;
            if quiet >= EXPFUN_QUIET_SEGMENTS {
                return Ok((total, false));
            }
        } else {
            quiet = 0;
        }
        x += inc + sample_law(&laws[regime], rng);
        now += hold;
        regime = 1 - regime;
    }
}

/// Big-jump switching path: in state 0 a jump below `−r0` switches to state
/// 1, in state 1 a jump above `r1` switches to state 0.
pub fn simulate_bigjump_path<R: Rng + ?Sized>(
    model: &BigJumpModel,
    t: f64,
    start_regime: usize,
    rng: &mut R,
) -> Result<PathSample> {
    check_start(t, start_regime)?;
    model.validate()?;
    let params = [bilateral(&model.block0)?, bilateral(&model.block1)?];
    let mut regime = start_regime;
    let mut now = 0.0;
    let mut x = 0.0;
    let mut path = PathSample {
        switch_times: Vec::new(),
        regimes: vec![regime],
        segment_ends: Vec::new(),
        terminal: 0.0,
    };
    loop {
        let (c, sigma, nu, p, a_plus, a_minus) = params[regime];
        let wait = exp_time(nu, rng);
        let dt = wait.min(t - now);
        let z: f64 = rng.sample(StandardNormal);
        x += c * dt + sigma * dt.sqrt() * z;
        if now + wait >= t {
            path.segment_ends.push(x);
            break;
        }
        now += wait;
        let jump = if rng.random::<f64>() < p {
            exp_time(a_plus, rng)
        } else {
            -exp_time(a_minus, rng)
        };
        let triggers = if regime == 0 {
            jump < -model.r0
        } else {
            jump > model.r1
        };
        if !triggers {
            x += jump;
            continue;
        }
        if model.convention == TriggerConvention::Included {
            x += jump;
        }
        path.segment_ends.push(x);
        regime = 1 - regime;
        path.switch_times.push(now);
        path.regimes.push(regime);
    }
    path.terminal = x;
    Ok(path)
}

pub fn simulate_bigjump<R: Rng + ?Sized>(
    model: &BigJumpModel,
    t: f64,
    start_regime: usize,
    rng: &mut R,
) -> Result<f64> {
    Ok(simulate_bigjump_path(model, t, start_regime, rng)?.terminal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy::{JumpOrientation, Sign};
    use crate::stats::{chi_square_poisson, mean_se, variance};

    fn draws<F: Fn(&mut RngStream) -> f64 + Sync + Send>(n: usize, seed: u64, f: F) -> Vec<f64> {
        run_paths(n, seed, None, f)
    }

    #[test]
    fn drift_is_deterministic() {
        let mut rng = RngStream::new(1, 0);
        assert_eq!(
            simulate_block(&LevyBlock::Drift { c: 2.0 }, 3.0, &mut rng).unwrap(),
            6.0
        );
        assert!(simulate_block(&LevyBlock::Drift { c: 2.0 }, -1.0, &mut rng).is_err());
    }

    #[test]
    fn batched_cycles_match_stepwise_paths() {
        use crate::stats::ks_two_sample;
        let laws = [
            (
                ScalarLaw::TwoPoint {
                    y_a: -1.0,
                    y_b: 0.5,
                    prob_a: 0.3,
                },
                ScalarLaw::Gaussian { mean: 0.2, sd: 0.4 },
            ),
            (
                ScalarLaw::Exponential {
                    rate: 2.0,
                    sign: JumpOrientation::Negative,
                },
                ScalarLaw::Dirac { y: 0.3 },
            ),
        ];
        let n = 20_000;
        for (k, (h0, h1)) in laws.into_iter().enumerate() {
            let m = RegimeModel::jump(
                2.0,
                1.0,
                LevyBlock::BrownianDrift { c: 0.1, sigma: 0.5 },
                LevyBlock::CompoundPoissonExp {
                    c: -0.2,
                    nu: 0.5,
                    a: 1.5,
                    orientation: JumpOrientation::Positive,
                },
                h0,
                h1,
            )
            .unwrap();
            for (start, t) in [(0, 60.0), (1, 200.0)] {
                let fast = draws(n, 40 + k as u64, |r| {
                    simulate_jump(&m, t, start, r).unwrap()
                });
                let slow = draws(n, 50 + k as u64, |r| {
                    simulate_jump_path(&m, t, start, r).unwrap().terminal
                });
                let d = ks_two_sample(&fast, &slow);
                assert!(d <= 1.63 * (2.0 / n as f64).sqrt(), "laws {k} t {t}: {d}");
            }
        }
    }

    #[test]
    fn long_horizons_are_cheap() {
        let m = RegimeModel::jump_telegraph(2.0, 1.0, 1.0, 0.5, -0.5, 0.5).unwrap();
        let mut r = RngStream::new(3, 0);
        let x = simulate_jump(&m, 1e12, 0, &mut r).unwrap();
        // long-run drift (λ1 c0 + λ0 c1 + λ0 λ1 (y0 + y1)) / (λ0 + λ1) = 2/3
        assert!((x / 1e12 - 2.0 / 3.0).abs() < 1e-4, "{x}");
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let take = |seed, id| {
            let mut r = RngStream::new(seed, id);
            (0..4).map(|_| r.next_u64()).collect::<Vec<_>>()
        };
        let (a, b, c) = (take(7, 3), take(7, 3), take(7, 4));
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let m = RegimeModel::jump_telegraph(2.0, 1.0, 1.0, 0.5, -0.5, 0.5).unwrap();
        let f = |r: &mut RngStream| simulate_jump(&m, 1.0, 0, r).unwrap();
        let one = run_paths(2000, 42, Some(1), f);
        let eight = run_paths(2000, 42, Some(8), f);
        assert!(one
            .iter()
            .zip(&eight)
            .all(|(a, b)| a.to_bits() == b.to_bits()));
    }

    #[test]
    fn brownian_variance() {
        let b = LevyBlock::BrownianDrift { c: 0.0, sigma: 1.0 };
        let xs = draws(1_000_000, 5, |r| simulate_block(&b, 1.0, r).unwrap());
        assert!((variance(&xs) - 1.0).abs() < 0.005);
    }

    #[test]
    fn stable_laplace_transform() {
        let b = LevyBlock::StableSubordinator {
            a: 1.0,
            alpha: 0.5,
            sign: Sign::Plus,
        };
        let xs = draws(1_000_000, 6, |r| {
            (-simulate_block(&b, 1.0, r).unwrap()).exp()
        });
        let m = mean_se(&xs);
        assert!(m.z_score((-1.0f64).exp()) < 3.0, "{m:?}");
        let b = LevyBlock::StableSubordinator {
            a: 2.0,
            alpha: 0.7,
            sign: Sign::Plus,
        };
        let xs = draws(200_000, 7, |r| {
            (-0.5 * simulate_block(&b, 0.3, r).unwrap()).exp()
        });
        let target = (-0.3 * 2.0 * 0.5f64.powf(0.7)).exp();
        assert!(mean_se(&xs).z_score(target) < 3.0);
    }

    #[test]
    fn compound_poisson_moments() {
        let b = LevyBlock::CompoundPoissonExp {
            c: 0.5,
            nu: 2.0,
            a: 4.0,
            orientation: JumpOrientation::Negative,
        };
        let xs = draws(200_000, 8, |r| simulate_block(&b, 2.0, r).unwrap());
        let m = mean_se(&xs);
        assert!(m.z_score(2.0 * b.mean_rate().unwrap()) < 3.0);
        let b = LevyBlock::CompoundPoissonBilateral {
            c: 0.1,
            sigma: 0.4,
            nu: 3.0,
            p: 0.3,
            a_plus: 2.0,
            a_minus: 1.0,
        };
        let xs = draws(200_000, 9, |r| {
            (-0.4 * simulate_block(&b, 1.5, r).unwrap()).exp()
        });
        let target = (-1.5 * b.laplace_exponent(0.4).unwrap()).exp();
        assert!(mean_se(&xs).z_score(target) < 3.0);
    }

    #[test]
    fn renewal_start_value() {
        let m = RegimeModel::renewal(
            1.0,
            1.0,
            LevyBlock::Drift { c: 1.0 },
            LevyBlock::Drift { c: -1.0 },
            ScalarLaw::Dirac { y: 0.7 },
            ScalarLaw::Dirac { y: 0.7 },
        )
        .unwrap();
        let mut r = RngStream::new(0, 0);
        assert_eq!(simulate_renewal(&m, 0.0, 0, &mut r).unwrap(), 0.7);
    }

    #[test]
    fn switch_count_is_poisson() {
        let lam = 1.3;
        let m = RegimeModel::jump_telegraph(lam, lam, 1.0, -1.0, 0.0, 0.0).unwrap();
        let counts = run_paths(100_000, 11, None, |r| {
            simulate_jump_path(&m, 2.0, 0, r).unwrap().switch_count() as u64
        });
        let chi = chi_square_poisson(&counts, lam * 2.0);
        assert!(chi.p_value > 0.001, "{chi:?}");
    }

    #[test]
    fn telegraph_envelope_holds_pathwise() {
        // Fig. 2 model: y0 + c1 t < X(t) < c0 t from regime 0
        let m = RegimeModel::jump_telegraph(2.0, 1.0, 1.0, 0.5, -0.5, 0.5).unwrap();
        let t = 3.0;
        let xs = draws(20_000, 12, |r| simulate_jump(&m, t, 0, r).unwrap());
        assert!(xs
            .iter()
            .all(|&x| x >= -0.5 + 0.5 * t - 1e-12 && x <= t + 1e-12));
        let m = RegimeModel::jump_telegraph(1.0, 2.0, 2.0, -1.0, 0.0, 0.0).unwrap();
        let xs = draws(20_000, 13, |r| simulate_jump(&m, t, 1, r).unwrap());
        assert!(xs.iter().all(|&x| x >= -t - 1e-12 && x <= 2.0 * t + 1e-12));
    }

    #[test]
    fn expfun_without_switching() {
        let m = RegimeModel::jump(
            1e-9,
            1e-9,
            LevyBlock::Drift { c: 1.0 },
            LevyBlock::Drift { c: 1.0 },
            ScalarLaw::ZERO,
            ScalarLaw::ZERO,
        )
        .unwrap();
        let mut r = RngStream::new(3, 0);
        let (v, truncated) = simulate_expfun(&m, 0, 1e-10, 100.0, &mut r).unwrap();
        assert!(truncated);
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn expfun_horizon_monotone() {
        let m = RegimeModel::jump_telegraph(2.0, 1.0, 1.0, 0.5, -0.5, 0.5).unwrap();
        for id in 0..200 {
            let mut prev = 0.0;
            for h in [0.5, 1.0, 2.0, 5.0, 50.0] {
                let (v, _) = simulate_expfun(&m, 0, 1e-12, h, &mut RngStream::new(4, id)).unwrap();
                assert!(v >= prev);
                prev = v;
            }
        }
    }

    #[test]
    fn subordinated_at_zero_xi_and_identity() {
        let x = RegimeModel::jump_telegraph(2.0, 1.0, 1.0, 0.5, -0.5, 0.5).unwrap();
        let z = RegimeModel::jump(
            1.0,
            1.0,
            LevyBlock::Drift { c: 1.0 },
            LevyBlock::Drift { c: 1.0 },
            ScalarLaw::ZERO,
            ScalarLaw::ZERO,
        )
        .unwrap();
        let a = draws(100_000, 14, |r| {
            simulate_subordinated(&x, &z, 1.0, [0, 0], r).unwrap()
        });
        let b = draws(100_000, 15, |r| simulate_jump(&x, 1.0, 0, r).unwrap());
        assert!(crate::stats::ks_two_sample(&a, &b) <= 0.01);
        let bad = RegimeModel::jump_telegraph(1.0, 1.0, -1.0, 1.0, 0.0, 0.0).unwrap();
        assert!(simulate_subordinated(&x, &bad, 1.0, [0, 0], &mut RngStream::new(0, 0)).is_err());
    }

    #[test]
    fn bigjump_single_regime_when_threshold_unreachable() {
        let b0 = LevyBlock::CompoundPoissonBilateral {
            c: 0.3,
            sigma: 0.2,
            nu: 2.0,
            p: 0.5,
            a_plus: 2.0,
            a_minus: 2.0,
        };
        let m = BigJumpModel::new(b0, b0, 200.0, 200.0, TriggerConvention::Excluded).unwrap();
        let xs = draws(100_000, 16, |r| {
            (-0.5 * simulate_bigjump(&m, 1.0, 0, r).unwrap()).exp()
        });
        let target = (-b0.laplace_exponent(0.5).unwrap()).exp();
        assert!(mean_se(&xs).z_score(target) < 3.0);
    }
}
