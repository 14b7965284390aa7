//! `σ = inf_{t>1} (t^β − 1)/(t^α (t−1)^{β−α})` and `C = min{1/2, σ/4}`.

use anyhow::{bail, ensure};
use serde::Serialize;

pub const DEFAULT_T_MAX: f64 = 1e6;
const GRID_POINTS: usize = 4_000;
/// Smallest `log t` on the grid.
const X_MIN: f64 = 1e-16;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SigmaResult {
    pub alpha: f64,
    pub beta: f64,
    pub t_max: f64,
    pub sigma: f64,
    pub c: f64,
    /// Minimum over `(1, t_max]` and where it sits.
    pub search_min: f64,
    pub argmin_t: f64,
    /// Limits at `t → 1⁺` and `t → ∞`.
    pub limit_at_one: f64,
    pub limit_at_infinity: f64,
    /// `g(t_max)`, `g(10 t_max)` and the extrapolation `(10 g₂ − g₁)/9`
    /// for an `O(1/t)` tail.
    pub richardson: (f64, f64, f64),
}

pub fn validate(alpha: f64, beta: f64) -> anyhow::Result<()> {
    ensure!(alpha.is_finite() && beta.is_finite(), "α and β must be finite");
    if !(beta > 0.0 && beta >= 1.0 + alpha) {
        bail!("need β > 0 and β ≥ 1 + α (got α = {alpha}, β = {beta})");
    }
    Ok(())
}

/// `ln g` at `t = e^x`, written so nothing cancels near `t = 1`.
fn log_g(alpha: f64, beta: f64, x: f64) -> f64 {
    (beta * x).exp_m1().ln() - alpha * x - (beta - alpha) * x.exp_m1().ln()
}

pub fn g(alpha: f64, beta: f64, t: f64) -> f64 {
    log_g(alpha, beta, t.ln()).exp()
}

fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() <= 1e-15 * (a.abs() + b.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    (a + b) / 2.0
}

pub fn sigma(alpha: f64, beta: f64, t_max: f64) -> anyhow::Result<SigmaResult> {
    validate(alpha, beta)?;
    ensure!(t_max > 1.0 && t_max.is_finite(), "t_max must exceed 1");
    let x_max = t_max.ln();
    ensure!(x_max > X_MIN, "t_max too close to 1");

    // log-spaced in x = log t, so both ends of (1, t_max] are resolved
    let (lo, hi) = (X_MIN.ln(), x_max.ln());
    let xs: Vec<f64> = (0..GRID_POINTS).map(|i| (lo + (hi - lo) * i as f64 / (GRID_POINTS - 1) as f64).exp()).collect();
    let values: Vec<f64> = xs.iter().map(|&x| log_g(alpha, beta, x)).collect();
    let i = values
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_finite())
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .ok_or_else(|| anyhow::anyhow!("g is not finite anywhere on the grid"))?;
    let a = xs[i.saturating_sub(1)];
    let b = xs[(i + 1).min(xs.len() - 1)];
    let x_star = golden_section(|x| log_g(alpha, beta, x), a, b);
    let (search_min, argmin_x) =
        [(log_g(alpha, beta, x_star), x_star), (values[i], xs[i])].into_iter().min_by(|p, q| p.0.total_cmp(&q.0)).unwrap();
    let search_min = search_min.exp();

    let limit_at_one = if beta - alpha == 1.0 { beta } else { f64::INFINITY };
    let limit_at_infinity = 1.0;
    let g1 = g(alpha, beta, t_max);
    let g2 = g(alpha, beta, 10.0 * t_max);
    let extrapolated = (10.0 * g2 - g1) / 9.0;

    let sigma = search_min.min(limit_at_one).min(limit_at_infinity);
    Ok(SigmaResult {
        alpha,
        beta,
        t_max,
        sigma,
        c: (sigma / 4.0).min(0.5),
        search_min,
        argmin_t: argmin_x.exp(),
        limit_at_one,
        limit_at_infinity,
        richardson: (g1, g2, extrapolated),
    })
}
