//! One-dimensional maximization and root finding.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("invalid bracket [{lo}, {hi}]")]
    InvalidBracket { lo: f64, hi: f64 },
    #[error("no sign change on [{lo}, {hi}]: g(lo) = {g_lo}, g(hi) = {g_hi}")]
    NoSignChange { lo: f64, hi: f64, g_lo: f64, g_hi: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnimodalMaximizationResult {
    pub argmax: f64,
    pub max_value: f64,
    pub iterations: usize,
}

// 1 / golden ratio
const INV_PHI: f64 = 0.618_033_988_749_894_9;
const MAX_ITERATIONS: usize = 500;

/// Golden-section search for the maximum of a unimodal `f` on `[lo, hi]`.
///
/// Stops once the bracket is no wider than `tol`. The bracket end points are
/// compared against the interior estimate so boundary maxima come back exact.
pub fn maximize_unimodal<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<UnimodalMaximizationResult, SolverError>
where
    F: Fn(f64) -> f64,
{
    if lo >= hi || !lo.is_finite() || !hi.is_finite() {
        return Err(SolverError::InvalidBracket { lo, hi });
    }
    let tol = tol.max(f64::EPSILON * (lo.abs() + hi.abs()));

    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iterations = 0;
    while b - a > tol && iterations < MAX_ITERATIONS {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        iterations += 1;
    }

    let mid = 0.5 * (a + b);
    let mut best = (mid, f(mid));
    for x in [lo, hi] {
        let fx = f(x);
        if fx > best.1 {
            best = (x, fx);
        }
    }
    Ok(UnimodalMaximizationResult { argmax: best.0, max_value: best.1, iterations })
}

/// Central second difference `(f(x+h) - 2 f(x) + f(x-h)) / h^2`.
pub fn second_derivative_at<F>(f: F, x: f64, h: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)
}

/// Bisection on a continuous monotone `g` with a sign change over `[lo, hi]`.
pub fn find_root_monotone<G>(g: G, lo: f64, hi: f64, tol: f64) -> Result<f64, SolverError>
where
    G: Fn(f64) -> f64,
{
    if lo.partial_cmp(&hi) != Some(std::cmp::Ordering::Less) {
        return Err(SolverError::InvalidBracket { lo, hi });
    }
    let (mut a, mut b) = (lo, hi);
    let mut ga = g(a);
    let gb = g(b);
    if ga == 0.0 {
        return Ok(a);
    }
    if gb == 0.0 {
        return Ok(b);
    }
    if ga * gb > 0.0 {
        return Err(SolverError::NoSignChange { lo, hi, g_lo: ga, g_hi: gb });
    }
    let tol = tol.max(f64::EPSILON * (lo.abs() + hi.abs()));
    for _ in 0..MAX_ITERATIONS {
        if b - a <= tol {
            break;
        }
        let m = 0.5 * (a + b);
        let gm = g(m);
        if gm == 0.0 {
            return Ok(m);
        }
        if (gm > 0.0) == (ga > 0.0) {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}
