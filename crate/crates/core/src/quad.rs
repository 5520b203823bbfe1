//! Adaptive quadrature on top of the double-exponential rule.
//!
//! The rule itself copes with integrable endpoint singularities; interior
//! kinks are handled by global adaptive bisection: the piece with the worst
//! error estimate is split until the total estimate meets the target.

const MAX_PIECES: usize = 4000;

/// Integrates `f` over the finite interval `[a, b]` to roughly `tol` absolute error.
pub fn integrate<F>(f: F, a: f64, b: f64, tol: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    if a == b {
        return 0.0;
    }
    if a > b {
        return -integrate(f, b, a, tol);
    }
    let rule = |lo: f64, hi: f64| {
        let out = quadrature::integrate(&f, lo, hi, 0.1 * tol);
        (lo, hi, out.integral, out.error_estimate)
    };
    let mut pieces = vec![rule(a, b)];
    loop {
        let total: f64 = pieces.iter().map(|p| p.2).sum();
        let err: f64 = pieces.iter().map(|p| p.3).sum();
        if err <= tol.max(1e-15 * total.abs()) || pieces.len() >= MAX_PIECES {
            return total;
        }
        let worst = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .unwrap();
        let (lo, hi, _, _) = pieces.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        if !(mid > lo && mid < hi) {
            return total;
        }
        pieces.push(rule(lo, mid));
        pieces.push(rule(mid, hi));
    }
}

/// Integrates `f` over `[a, b]`, splitting at the supplied interior breakpoints.
pub fn integrate_pieces<F>(f: F, a: f64, b: f64, breaks: &[f64], tol: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    let mut pts: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let mut edges = Vec::with_capacity(pts.len() + 2);
    edges.push(a);
    edges.extend(pts);
    edges.push(b);
    let share = tol / (edges.len() - 1) as f64;
    edges
        .windows(2)
        .map(|w| integrate(&f, w[0], w[1], share))
        .sum()
}

/// Integrates `f` over `[a, ∞)` through the map `t = a + u / (1 - u)`.
pub fn integrate_to_inf<F>(f: F, a: f64, tol: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    integrate(
        |u| {
            if u >= 1.0 {
                return 0.0;
            }
            let w = 1.0 - u;
            f(a + u / w) / (w * w)
        },
        0.0,
        1.0,
        tol,
    )
}

/// Integrates `f` over `(-∞, b]`.
pub fn integrate_from_neg_inf<F>(f: F, b: f64, tol: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    integrate_to_inf(|s| f(-s), -b, tol)
}

/// Integrates `f` over the whole real line, split at `center`.
pub fn integrate_real_line<F>(f: F, center: f64, tol: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    integrate_from_neg_inf(&f, center, 0.5 * tol) + integrate_to_inf(&f, center, 0.5 * tol)
}
