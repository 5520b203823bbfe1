//! Grid-producing tasks. Each is a direct composition of library calls.

use super::config::{RunConfig, Task};
use super::grid::Grid;
use super::{stream_seed, HarnessError};
use crate::error::{invalid, Error, Result};
use crate::expfunctional::{telegraph_expfun_density, ExpFunLaw, TelegraphParams};
use crate::limits::limit_density;
use crate::regime::{RegimeModel, VariantKind};
use crate::simulate::{run_paths, simulate_jump, simulate_renewal};
use crate::transforms::{jump_mgf, renewal_char};

fn model(cfg: &RunConfig) -> Result<&RegimeModel> {
    cfg.model
        .as_ref()
        .ok_or_else(|| invalid("a model is required"))
}

fn axis(cfg: &RunConfig, name: &str) -> Result<Vec<f64>> {
    let g = &cfg.grid;
    let a = match name {
        "t" => g.t,
        "theta" => g.theta,
        "xi" => g.xi,
        _ => g.x,
    };
    a.map(|a| a.values())
        .ok_or_else(|| invalid(format!("grid.{name} is required")))
}

/// `Φ_i(t, θ)` (renewal) or `L_i(t, ξ)` (jump) on the `t × θ` or `t × ξ` grid.
pub fn transform_grid(cfg: &RunConfig) -> Result<Grid> {
    let m = model(cfg)?;
    let ts = axis(cfg, "t")?;
    match m.kind() {
        VariantKind::Renewal => {
            let thetas = axis(cfg, "theta")?;
            let mut g = Grid::new(["t", "theta", "regime"]);
            for &t in &ts {
                for &theta in &thetas {
                    let v = renewal_char(m, t, theta)?;
                    for (i, phi) in v.as_array().into_iter().enumerate() {
                        g.push(vec![t, theta, i as f64], phi.re, phi.im);
                    }
                }
            }
            Ok(g)
        }
        VariantKind::Jump => {
            let xis = axis(cfg, "xi")?;
            let mut g = Grid::new(["t", "xi", "regime"]);
            for &t in &ts {
                for &xi in &xis {
                    let v = jump_mgf(m, t, xi)?;
                    for (i, l) in v.as_array().into_iter().enumerate() {
                        g.push(vec![t, xi, i as f64], l, 0.0);
                    }
                }
            }
            Ok(g)
        }
    }
}

/// Density of the limit law of the renewal-regime process.
pub fn limit_density_grid(cfg: &RunConfig) -> Result<Grid> {
    let d = limit_density(model(cfg)?)?;
    let mut g = Grid::new(["x"]);
    for x in axis(cfg, "x")? {
        g.push(vec![x], d.pdf(x), 0.0);
    }
    Ok(g)
}

/// Densities `f_0`, `f_1` of the exponential functional of a jump telegraph.
pub fn expfun_grid(cfg: &RunConfig) -> Result<Grid> {
    let p = TelegraphParams::from_model(model(cfg)?)?;
    let ExpFunLaw::Densities(ds) = telegraph_expfun_density(&p)? else {
        return Err(Error::InvalidCase(
            "the exponential functional is infinite almost surely".into(),
        ));
    };
    let mut g = Grid::new(["x", "regime"]);
    for x in axis(cfg, "x")? {
        for (i, d) in ds.iter().enumerate() {
            g.push(vec![x, i as f64], d.pdf(x), 0.0);
        }
    }
    Ok(g)
}

/// Simulated `X(t)` for `paths` independent paths at every `t` of the grid.
pub fn simulate_grid(cfg: &RunConfig) -> Result<Grid> {
    let m = model(cfg)?;
    let start = cfg.start_regime;
    let mut g = Grid::new(["t", "path"]);
    for (k, t) in axis(cfg, "t")?.into_iter().enumerate() {
        let seed = stream_seed(cfg.mc.seed, &format!("simulate/{k}"));
        let values: Vec<Result<f64>> =
            run_paths(cfg.mc.paths, seed, cfg.mc.workers, |r| match m.kind() {
                VariantKind::Renewal => simulate_renewal(m, t, start, r),
                VariantKind::Jump => simulate_jump(m, t, start, r),
            });
        for (i, v) in values.into_iter().enumerate() {
            g.push(vec![t, i as f64], v?, 0.0);
        }
    }
    Ok(g)
}

/// Runs a grid task; `verify` is handled by [`super::run_verify`].
pub fn run_grid_task(cfg: &RunConfig) -> std::result::Result<Grid, HarnessError> {
    let g = match cfg.task {
        Task::Transform => transform_grid(cfg),
        Task::LimitDensity => limit_density_grid(cfg),
        Task::Expfun => expfun_grid(cfg),
        Task::Simulate => simulate_grid(cfg),
        Task::Verify => return Err(HarnessError::NotAGridTask),
    };
    Ok(g?)
}
