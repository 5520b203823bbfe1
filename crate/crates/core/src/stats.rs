//! Monte-Carlo summary statistics.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, Discrete, Poisson};

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanSe {
    pub mean: f64,
    pub se: f64,
}

impl MeanSe {
    /// Number of standard errors separating the mean from `target`.
    pub fn z_score(&self, target: f64) -> f64 {
        if self.se > 0.0 {
            (self.mean - target).abs() / self.se
        } else if self.mean == target {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

pub fn mean_se(xs: &[f64]) -> MeanSe {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return MeanSe {
            mean: f64::NAN,
            se: f64::NAN,
        };
    }
    let mean = xs.iter().sum::<f64>() / n;
    let var = if xs.len() > 1 {
        xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    MeanSe {
        mean,
        se: (var / n).sqrt(),
    }
}

pub fn variance(xs: &[f64]) -> f64 {
    let m = mean_se(xs);
    m.se * m.se * xs.len() as f64
}

/// Empirical mean of `e^{iθx}` with separate standard errors for the real and
/// imaginary parts.
pub fn empirical_char(xs: &[f64], theta: f64) -> (MeanSe, MeanSe) {
    let re: Vec<f64> = xs.iter().map(|x| (theta * x).cos()).collect();
    let im: Vec<f64> = xs.iter().map(|x| (theta * x).sin()).collect();
    (mean_se(&re), mean_se(&im))
}

/// Largest per-component z-score between an empirical characteristic function
/// and `target`.
pub fn char_z_score(xs: &[f64], theta: f64, target: Complex64) -> f64 {
    let (re, im) = empirical_char(xs, theta);
    re.z_score(target.re).max(im.z_score(target.im))
}

/// Empirical mean of `e^{−ξx}`.
pub fn empirical_mgf(xs: &[f64], xi: f64) -> MeanSe {
    let v: Vec<f64> = xs.iter().map(|x| (-xi * x).exp()).collect();
    mean_se(&v)
}

/// One-sample Kolmogorov–Smirnov distance. `cdf` must be right-continuous and
/// `cdf_left(x)` return `F(x−)`, so that atoms of the reference law are
/// handled exactly.
pub fn ks_statistic<F, G>(samples: &[f64], cdf: F, cdf_left: G) -> f64
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    let mut xs = samples.to_vec();
    xs.sort_by(|a, b| a.total_cmp(b));
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < xs.len() {
        let v = xs[i];
        let mut j = i;
        while j < xs.len() && xs[j] == v {
            j += 1;
        }
        let below = i as f64 / n;
        let upto = j as f64 / n;
        d = d
            .max((cdf_left(v) - below).abs())
            .max((upto - cdf(v)).abs());
        i = j;
    }
    d
}

/// Same as [`ks_statistic`] for a continuous reference law.
pub fn ks_continuous<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    ks_statistic(samples, &cdf, &cdf)
}

/// Two-sample Kolmogorov–Smirnov distance.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut xa = a.to_vec();
    let mut xb = b.to_vec();
    xa.sort_by(|p, q| p.total_cmp(q));
    xb.sort_by(|p, q| p.total_cmp(q));
    let (na, nb) = (xa.len() as f64, xb.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < xa.len() && j < xb.len() {
        let v = xa[i].min(xb[j]);
        while i < xa.len() && xa[i] <= v {
            i += 1;
        }
        while j < xb.len() && xb[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// KS critical value at 1% significance.
pub fn ks_threshold(n: usize) -> f64 {
    1.63 / (n as f64).sqrt()
}

/// Chi-square goodness-of-fit result.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Chi-square test of counts against a Poisson law. Cells with expected count
/// below 5 are pooled into their neighbour; the last cell collects the tail.
pub fn chi_square_poisson(counts: &[u64], mean: f64) -> ChiSquare {
    let n = counts.len() as f64;
    let law = Poisson::new(mean).expect("Poisson mean must be > 0");
    let max = counts.iter().copied().max().unwrap_or(0);
    let mut observed = vec![0.0; max as usize + 1];
    for &c in counts {
        observed[c as usize] += 1.0;
    }
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let mut acc = (0.0, 0.0);
    let mut used = 0.0;
    for (k, obs) in observed.iter().enumerate() {
        let e = n * law.pmf(k as u64);
        acc.0 += obs;
        acc.1 += e;
        used += e;
        if acc.1 >= 5.0 {
            cells.push(acc);
            acc = (0.0, 0.0);
        }
    }
    acc.1 += n - used;
    match cells.last_mut() {
        Some(last) if acc.1 < 5.0 => {
            last.0 += acc.0;
            last.1 += acc.1;
        }
        _ => cells.push(acc),
    }
    let statistic: f64 = cells.iter().map(|(o, e)| (o - e) * (o - e) / e).sum();
    let dof = cells.len().saturating_sub(1).max(1);
    let p_value = 1.0 - ChiSquared::new(dof as f64).unwrap().cdf(statistic);
    ChiSquare {
        statistic,
        dof,
        p_value,
    }
}
