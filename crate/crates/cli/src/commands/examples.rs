//! `sigma` and the worked examples.

use anyhow::{ensure, Context};
use freqdyn::approx::Polynomial;
use freqdyn::density::{build_separated_family, build_separated_family_for, check_similarity_criterion, check_translation_separation, Sequence};
use freqdyn::geometry::{sample_grid, CompactSet, Exhaustion, ExtendedPoint};
use freqdyn::maps::{conjugate, ConformalPair, HoloMap, MapFamily, PairKind};
use freqdyn::orbit::{eventually_monotone_from, iterate_convergence};
use freqdyn::pipeline::{existence_pipeline, PipelineOptions};
use freqdyn::runaway::{check_strong_runaway, RunawayConfig};
use freqdyn::Complex;
use serde::Deserialize;
use serde_json::json;

use super::{cx, scan_rows, SCAN_COLUMNS};
use crate::config::Config;
use crate::report::{num, Report};
use crate::sigma::{self, DEFAULT_T_MAX};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SigmaSection {
    alpha: f64,
    beta: f64,
    #[serde(default = "t_max")]
    t_max: f64,
    expect_sigma: Option<f64>,
    #[serde(default = "sigma_tol")]
    tolerance: f64,
}

fn t_max() -> f64 {
    DEFAULT_T_MAX
}

fn sigma_tol() -> f64 {
    1e-9
}

#[derive(Deserialize)]
struct SigmaConfig {
    sigma: SigmaSection,
}

pub fn cmd_sigma(cfg: &Config, r: &mut Report) -> anyhow::Result<()> {
    let s = cfg.get::<SigmaConfig>()?.sigma;
    let res = sigma::sigma(s.alpha, s.beta, s.t_max)?;
    r.write_json("sigma.json", &res)?;
    let x_max = s.t_max.ln();
    let rows = (0..=400).map(|i| {
        let t = (x_max * 10f64.powf(-12.0 * (1.0 - i as f64 / 400.0))).exp();
        vec![num(t), num(sigma::g(s.alpha, s.beta, t))]
    });
    r.write_csv("sigma.csv", &["t", "g"], rows)?;

    r.verdict("sigma positive", res.sigma > 0.0, format!("σ = {}", num(res.sigma)));
    r.verdict("C = min(1/2, σ/4)", res.c == (res.sigma / 4.0).min(0.5), format!("C = {}", num(res.c)));
    let (_, g2, extrapolated) = res.richardson;
    let floor = res.sigma - 1e-6 * res.sigma;
    r.verdict(
        "tail beyond t_max",
        g2 >= floor && extrapolated >= floor,
        format!("g(10 t_max) = {}, extrapolated {}", num(g2), num(extrapolated)),
    );
    if let Some(expected) = s.expect_sigma {
        r.verdict(
            "sigma matches expectation",
            (res.sigma - expected).abs() <= s.tolerance,
            format!("|{} − {expected}| vs {}", num(res.sigma), s.tolerance),
        );
    }
    Ok(())
}

#[derive(Deserialize)]
#[serde(default, deny_unknown_fields)]
struct Example1Section {
    alpha: f64,
    beta: f64,
    root_n: u32,
    /// Defaults to `min{1/2, σ/4}`.
    c: Option<f64>,
    pairs: u64,
    base: u64,
    n_max: u64,
    nu_max: u64,
}

impl Default for Example1Section {
    fn default() -> Self {
        Example1Section { alpha: 0.0, beta: 1.0, root_n: 1, c: None, pairs: 12, base: 8, n_max: 10_000, nu_max: 3 }
    }
}

#[derive(Deserialize)]
#[serde(default, deny_unknown_fields)]
struct PipelineSection {
    enabled: bool,
    explicit: Vec<[u64; 2]>,
    base: u64,
    horizon: u64,
    nu_min: u64,
    nu_max: u64,
}

impl Default for PipelineSection {
    fn default() -> Self {
        PipelineSection { enabled: true, explicit: vec![[1, 5], [2, 5], [1, 6], [2, 6]], base: 16, horizon: 4_000, nu_min: 5, nu_max: 6 }
    }
}

#[derive(Deserialize, Default)]
#[serde(default)]
struct Example1Config {
    example1: Example1Section,
    pipeline: PipelineSection,
    fit: PipelineOptions,
}

/// First pair `n < m` of islands `D̄(n^β, n^α R_ν^{1/N})` violating
/// `m^β − n^β > n^α R_ν^{1/N} + m^α R_μ^{1/N}`, and the number of pairs checked.
pub fn disc_inequality(
    islands: &[(u64, u64)],
    alpha: f64,
    beta: f64,
    root_n: u32,
    c: f64,
) -> (u64, Option<((u64, u64), (u64, u64))>) {
    let mut sorted = islands.to_vec();
    sorted.sort_unstable();
    let radius = |n: u64, nu: u64| {
        (n as f64).powf(alpha) * Exhaustion::slit_radius(c, alpha, beta, root_n, nu).powf(1.0 / root_n as f64)
    };
    let mut checked = 0;
    for (i, &(n, nu)) in sorted.iter().enumerate() {
        let rn = radius(n, nu);
        let bn = (n as f64).powf(beta);
        for &(m, mu) in &sorted[i + 1..] {
            checked += 1;
            if !((m as f64).powf(beta) - bn > rn + radius(m, mu)) {
                return (checked, Some(((n, nu), (m, mu))));
            }
        }
    }
    (checked, None)
}

pub fn cmd_example1(cfg: &Config, r: &mut Report) -> anyhow::Result<()> {
    let Example1Config { example1: e, pipeline: p, fit } = cfg.get()?;
    let sig = sigma::sigma(e.alpha, e.beta, DEFAULT_T_MAX)?;
    let c = e.c.unwrap_or(sig.c);
    ensure!(c > 0.0, "C must be positive");
    r.verdict("sigma positive", sig.sigma > 0.0, format!("σ = {}, C = {}", num(sig.sigma), num(c)));
    let maps = MapFamily::RootShifts { alpha: e.alpha, beta: e.beta, root_n: e.root_n };
    let exhaustion = Exhaustion::slit_sectors(c, e.alpha, e.beta, e.root_n)?;

    let family = build_separated_family(e.pairs, e.n_max, e.base).context("building the separated family")?;
    let rc = RunawayConfig::from_separated(maps.clone(), exhaustion.clone(), &family, e.n_max, e.nu_max)?;
    let strong = check_strong_runaway(&rc)?;
    r.write_json("runaway.json", &strong)?;
    r.verdict("P1", strong.p1, format!("densities {:?}", strong.densities));
    r.verdict("P2", strong.p2, format!("{} islands, witness {:?}", strong.islands_inspected, strong.p2_witness));
    r.verdict("P3", strong.p3, format!("{:?}", strong.probes.iter().map(|p| (p.mu, p.largest_n)).collect::<Vec<_>>()));

    let islands = rc.islands()?;
    r.write_csv(
        "islands.csv",
        &["nu", "n", "center_re", "center_im", "radius"],
        islands.iter().map(|i| {
            vec![i.nu.to_string(), i.n.to_string(), num(i.image_bound.center.re), num(i.image_bound.center.im), num(i.image_bound.radius)]
        }),
    )?;
    let labels: Vec<(u64, u64)> = rc.levels().flat_map(|nu| rc.level(nu).into_iter().map(move |n| (n, nu))).collect();
    let (checked, violation) = disc_inequality(&labels, e.alpha, e.beta, e.root_n, c);
    r.verdict("disc inequality", violation.is_none(), format!("{checked} pairs checked, first violation {violation:?}"));

    if p.enabled {
        let pairs: Vec<(u64, u64)> = p.explicit.iter().map(|q| (q[0], q[1])).collect();
        let fam = build_separated_family_for(&pairs, p.horizon, p.base)?;
        let rc = RunawayConfig::from_separated(maps, exhaustion, &fam, p.horizon, p.nu_max)?.with_min_level(p.nu_min)?;
        let out = existence_pipeline(&rc, &fit)?;
        r.write_json("candidate.json", &json!({ "kind": "existence", "delta": out.delta, "candidate": out.candidate }))?;
        r.write_csv("scan.csv", &SCAN_COLUMNS, scan_rows(&out.scan))?;
        r.verdict(
            "existence fit certified",
            out.candidate.pass(),
            format!("degree {}, status {:?}, {} pieces", out.candidate.degree, out.candidate.status, out.target.pieces.len()),
        );
        r.verdict(
            "existence scan",
            out.pass(),
            format!("δ = {}, horizon {}, {} pairs", num(out.delta), out.scan.horizon, out.scan.pairs.len()),
        );
    }
    Ok(())
}

#[derive(Deserialize)]
#[serde(default, deny_unknown_fields)]
struct Example2Section {
    alpha: f64,
    beta: f64,
    root_n: u32,
    n_max: u64,
    radius: f64,
    grid_res: usize,
    tolerance: f64,
}

impl Default for Example2Section {
    fn default() -> Self {
        Example2Section { alpha: 0.0, beta: 1.0, root_n: 1, n_max: 50, radius: 0.9, grid_res: 16, tolerance: 1e-10 }
    }
}

#[derive(Deserialize, Default)]
#[serde(default)]
struct Example2Config {
    example2: Example2Section,
}

/// `f(φ_n(f⁻¹(w)))` written out with `f(z) = (√z − 1)/(√z + 1)`,
/// `f⁻¹(w) = ((1 + w)/(1 − w))²` and `φ_n(z) = n^α z^{1/N} + n^β`.
fn slit_conjugate_closed_form(w: Complex, alpha: f64, beta: f64, root_n: u32, n: u64) -> Complex {
    let one = Complex::new(1.0, 0.0);
    let z = ((one + w) / (one - w)).powu(2);
    let root = (z.ln() / root_n as f64).exp();
    let s = root * (n as f64).powf(alpha) + (n as f64).powf(beta);
    let q = s.sqrt();
    (q - one) / (q + one)
}

pub fn cmd_example2(cfg: &Config, r: &mut Report) -> anyhow::Result<()> {
    let e = cfg.get::<Example2Config>()?.example2;
    sigma::validate(e.alpha, e.beta)?;
    ensure!(e.radius > 0.0 && e.radius < 1.0, "radius must lie in (0, 1)");
    let pair = ConformalPair::new(PairKind::SlitToDisc);
    let grid = sample_grid(&CompactSet::disc(Complex::new(0.0, 0.0), e.radius)?, e.grid_res);
    let mut rows = vec![];
    let (mut worst_res, mut worst_mod, mut worst_trip) = (0.0f64, 0.0f64, 0.0f64);
    for n in 1..=e.n_max {
        let phi = conjugate(pair, HoloMap::root_shift(e.alpha, e.beta, e.root_n, n)?)?;
        let (mut res, mut modulus, mut trip) = (0.0f64, 0.0f64, 0.0f64);
        for &w in &grid {
            let v = phi.apply(w)?;
            res = res.max((v - slit_conjugate_closed_form(w, e.alpha, e.beta, e.root_n, n)).norm());
            modulus = modulus.max(v.norm());
            trip = trip.max((phi.inverse_apply(v)? - w).norm());
        }
        rows.push(vec![n.to_string(), num(res), num(modulus), num(trip)]);
        worst_res = worst_res.max(res);
        worst_mod = worst_mod.max(modulus);
        worst_trip = worst_trip.max(trip);
    }
    r.write_csv("residuals.csv", &["n", "conjugation_residual", "max_modulus", "round_trip"], rows)?;
    let pts = grid.len();
    r.verdict("conjugation residual", worst_res < e.tolerance, format!("{} on {pts} points", num(worst_res)));
    r.verdict("maps the disc into itself", worst_mod < 1.0, format!("max |Φ_n| = {}", num(worst_mod)));
    r.verdict("round trip", worst_trip < e.tolerance, num(worst_trip));
    Ok(())
}

#[derive(Deserialize)]
#[serde(default, deny_unknown_fields)]
struct Example3Section {
    a: f64,
    gamma: f64,
    n_max: u64,
    radius: f64,
    grid_res: usize,
    tolerance: f64,
}

impl Default for Example3Section {
    fn default() -> Self {
        Example3Section { a: 1.0, gamma: 1.0, n_max: 50, radius: 0.99, grid_res: 16, tolerance: 1e-10 }
    }
}

#[derive(Deserialize, Default)]
#[serde(default)]
struct Example3Config {
    example3: Example3Section,
}

type Mobius = [[Complex; 2]; 2];

fn mul(p: &Mobius, q: &Mobius) -> Mobius {
    let mut out = [[Complex::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = p[i][0] * q[0][j] + p[i][1] * q[1][j];
        }
    }
    out
}

/// Matrix of `w ↦ (z − 1)/(z + 1)` after `z ↦ z + ic` after `w ↦ (1 + w)/(1 − w)`.
pub fn conjugated_shift_matrix(c: f64) -> Mobius {
    let re = |x: f64| Complex::new(x, 0.0);
    let to_disc = [[re(1.0), re(-1.0)], [re(1.0), re(1.0)]];
    let shift = [[re(1.0), Complex::new(0.0, c)], [re(0.0), re(1.0)]];
    let to_half_plane = [[re(1.0), re(1.0)], [re(-1.0), re(1.0)]];
    mul(&mul(&to_disc, &shift), &to_half_plane)
}

pub fn cmd_example3(cfg: &Config, r: &mut Report) -> anyhow::Result<()> {
    let e = cfg.get::<Example3Config>()?.example3;
    ensure!(e.radius > 0.0 && e.radius < 1.0, "radius must lie in (0, 1)");
    let pair = ConformalPair::new(PairKind::CayleyDiscToHalfPlane).reversed();
    let grid = sample_grid(&CompactSet::disc(Complex::new(0.0, 0.0), e.radius)?, e.grid_res);
    let one = Complex::new(1.0, 0.0);
    let mut rows = vec![];
    let (mut worst_res, mut worst_mod, mut worst_fix, mut worst_trace) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for n in 1..=e.n_max {
        let phi = conjugate(pair, HoloMap::half_plane_shift(e.a, e.gamma, n)?)?;
        let closed = HoloMap::parabolic_disc(e.a, e.gamma, n)?;
        let m = conjugated_shift_matrix(e.a * (n as f64).powf(e.gamma));
        let (mut res, mut modulus) = (0.0f64, 0.0f64);
        for &w in &grid {
            let v = phi.apply(w)?;
            let mobius = (m[0][0] * w + m[0][1]) / (m[1][0] * w + m[1][1]);
            res = res.max((v - closed.apply(w)?).norm()).max((v - mobius).norm());
            modulus = modulus.max(v.norm());
        }
        // Φ_n(1) through the extended plane: 1 ↦ ∞ ↦ ∞ ↦ 1.
        let fixed = match pair.forward_extended(ExtendedPoint::Infinity) {
            ExtendedPoint::Finite(z) => (z - one).norm(),
            ExtendedPoint::Infinity => f64::INFINITY,
        };
        let at_one = (m[0][0] + m[0][1]) / (m[1][0] + m[1][1]);
        let fix = fixed.max((at_one - one).norm());
        let trace = m[0][0] + m[1][1];
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        let parabolic = (trace * trace - det * 4.0).norm() / det.norm();
        rows.push(vec![n.to_string(), num(res), num(modulus), num(fix), num(parabolic)]);
        worst_res = worst_res.max(res);
        worst_mod = worst_mod.max(modulus);
        worst_fix = worst_fix.max(fix);
        worst_trace = worst_trace.max(parabolic);
    }
    r.write_csv("residuals.csv", &["n", "conjugation_residual", "max_modulus", "fixed_point_error", "trace_defect"], rows)?;
    r.verdict("conjugation residual", worst_res < e.tolerance, format!("{} on {} points", num(worst_res), grid.len()));
    r.verdict("Phi_n(1) = 1", worst_fix <= 1e-12, num(worst_fix));
    r.verdict("maps the disc into itself", worst_mod < 1.0, format!("max |Φ_n| = {}", num(worst_mod)));
    r.verdict("parabolic", worst_trace <= 1e-12, format!("max |tr² − 4 det|/|det| = {}", num(worst_trace)));
    Ok(())
}

#[derive(Deserialize)]
#[serde(default, deny_unknown_fields)]
struct Example4Section {
    a_scale: [f64; 2],
    a_exponent: f64,
    b_scale: [f64; 2],
    b_exponent: f64,
    omega_exponent: f64,
    horizon: u64,
    k_max: u64,
}

impl Default for Example4Section {
    fn default() -> Self {
        Example4Section {
            a_scale: [1.0, 0.0],
            a_exponent: 0.0,
            b_scale: [1.0, 0.0],
            b_exponent: 2.0,
            omega_exponent: 1.0,
            horizon: 2_000,
            k_max: 200,
        }
    }
}

#[derive(Deserialize, Default)]
#[serde(default)]
struct Example4Config {
    example4: Example4Section,
}

pub fn cmd_example4(cfg: &Config, r: &mut Report) -> anyhow::Result<()> {
    let e = cfg.get::<Example4Config>()?.example4;
    let a = Sequence::Power { scale: cx(e.a_scale), exponent: e.a_exponent };
    let b = Sequence::Power { scale: cx(e.b_scale), exponent: e.b_exponent };
    let p = e.omega_exponent;
    let sim = check_similarity_criterion(|n| a.at(n), |n| b.at(n), |k| (k as f64).powf(p), e.horizon)?;
    let tr = check_translation_separation(|n| b.at(n), e.horizon, e.k_max)?;
    r.write_json("similarity.json", &json!({ "similarity": sim, "translation": tr }))?;
    r.write_csv(
        "translation.csv",
        &["k", "infimum"],
        tr.infima.iter().enumerate().map(|(i, v)| vec![(i + 1).to_string(), num(*v)]),
    )?;
    r.verdict("divergence", sim.divergence_pass, format!("crossings {:?}", sim.crossings));
    r.verdict("separation", sim.separation_pass, format!("first violation {:?}", sim.first_violation));
    r.verdict("translation separation", tr.pass, format!("crossings {:?}, slow growth {}", tr.crossings, tr.slow_growth));
    Ok(())
}

#[derive(Deserialize)]
#[serde(default, deny_unknown_fields)]
struct Example5Section {
    a: f64,
    gamma: f64,
    radius: f64,
    steps: usize,
    tolerance: f64,
    half_plane: bool,
    half_plane_steps: usize,
}

impl Default for Example5Section {
    fn default() -> Self {
        Example5Section { a: 1.0, gamma: 1.0, radius: 0.5, steps: 200, tolerance: 0.1, half_plane: true, half_plane_steps: 400 }
    }
}

#[derive(Deserialize, Default)]
#[serde(default)]
struct Example5Config {
    example5: Example5Section,
}

pub fn cmd_example5(cfg: &Config, r: &mut Report) -> anyhow::Result<()> {
    let e = cfg.get::<Example5Config>()?.example5;
    ensure!(e.steps >= 2, "need at least two steps");
    let q = Polynomial::monomial(1);
    let k = CompactSet::disc(Complex::new(0.0, 0.0), e.radius)?;
    let one = ExtendedPoint::Finite(Complex::new(1.0, 0.0));
    let par = iterate_convergence(&HoloMap::parabolic_disc(e.a, e.gamma, 1)?, &q, None, &k, one, e.steps)?;
    let control = iterate_convergence(&HoloMap::Identity, &q, None, &k, ExtendedPoint::Finite(Complex::new(0.0, 0.0)), e.steps)?;
    let half = if e.half_plane {
        let pair = ConformalPair::new(PairKind::CayleyDiscToHalfPlane).reversed();
        let k = CompactSet::disc(Complex::new(2.0, 0.0), 1.0)?;
        Some(iterate_convergence(&HoloMap::half_plane_shift(e.a, e.gamma, 1)?, &q, Some(pair), &k, ExtendedPoint::Infinity, e.half_plane_steps)?)
    } else {
        None
    };

    let len = e.steps.max(if e.half_plane { e.half_plane_steps } else { 0 });
    let cell = |v: Option<&f64>| v.map(|x| num(*x)).unwrap_or_default();
    let rows = (0..len).map(|i| {
        vec![
            (i + 1).to_string(),
            cell(par.errors.get(i)),
            cell(control.errors.get(i)),
            cell(half.as_ref().and_then(|h| h.errors.get(i))),
        ]
    });
    r.write_csv("errors.csv", &["n", "parabolic", "identity", "half_plane"], rows)?;

    converges(r, "parabolic", &par.errors, par.escaped, e.tolerance);
    let (lo, hi) = control.errors.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    r.verdict("identity control does not decrease", hi - lo <= 1e-12 && lo > 0.0, format!("e_n ∈ [{}, {}]", num(lo), num(hi)));
    if let Some(h) = &half {
        converges(r, "half-plane shift", &h.errors, h.escaped, e.tolerance);
    }
    Ok(())
}

fn converges(r: &mut Report, name: &str, errors: &[f64], escaped: bool, tol: f64) {
    let last = errors.last().copied().unwrap_or(f64::INFINITY);
    r.verdict(&format!("{name} converges"), !escaped && last < tol, format!("e_{} = {}, escaped {escaped}", errors.len(), num(last)));
    let from = eventually_monotone_from(errors, 0.0);
    r.verdict(
        &format!("{name} eventually monotone"),
        from.is_some_and(|i| i <= errors.len() / 2),
        format!("nonincreasing from n = {:?}", from.map(|i| i + 1)),
    );
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conjugated_shift_is_the_parabolic_closed_form() {
        let m = conjugated_shift_matrix(3.0);
        let closed = HoloMap::parabolic_disc(3.0, 1.0, 1).unwrap();
        for w in [Complex::new(0.3, -0.2), Complex::new(-0.7, 0.1), Complex::new(0.0, 0.9)] {
            let v = (m[0][0] * w + m[0][1]) / (m[1][0] * w + m[1][1]);
            assert!((v - closed.apply(w).unwrap()).norm() < 1e-14);
        }
    }

    #[test]
    fn disc_inequality_catches_large_c() {
        let islands: Vec<(u64, u64)> = (1..=20).map(|k| (8 * k, 1 + k % 3)).collect();
        assert!(disc_inequality(&islands, 0.0, 1.0, 1, 0.25).1.is_none());
        assert!(disc_inequality(&islands, 0.0, 1.0, 1, 10.0).1.is_some());
    }
}
