//! End-to-end constructions at finite truncation: build the Carleman
//! truncation, assemble the target, fit, and scan the result.

use std::thread;

use serde::{Deserialize, Serialize};

use crate::approx::{
    assemble_dense_target, assemble_existence_target, assemble_spaceable_target, enumerate_dense_polynomial,
    fit_on_compacts, gram_independence, Evaluate, FhcCandidate, GramReport, PiecewiseTarget, SpanBasis, SpanKind,
    Splits,
};
use crate::density::IndexSet;
use crate::error::{Error, Result};
use crate::geometry::sample_grid;
use crate::orbit::{combination_scan, scan_dense, CombinationReport, OrbitScanReport, ScanArgs, ScanPair};
use crate::runaway::{build_carleman_truncation, CarlemanTruncation, RunawayConfig};
use crate::Complex;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineOptions {
    pub l_max: u64,
    pub max_islands: usize,
    pub max_degree: usize,
    pub grid_res: usize,
    /// Scan tolerance as a multiple of the largest island tolerance.
    pub delta_factor: f64,
    pub envelope_constant: f64,
    /// Use `min(1, ε(w))` pointwise on islands instead of the island minimum.
    pub pointwise_islands: bool,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            l_max: 2,
            max_islands: 4,
            max_degree: 256,
            grid_res: 8,
            delta_factor: 2.0,
            envelope_constant: 1.0,
            pointwise_islands: false,
        }
    }
}

/// Scan pairs `(ν, l)` whose designed set is `A(ν, l)` (or `A(ν, l, p)`)
/// restricted to the truncation's islands. Pairs with nothing designed are
/// left out.
pub fn designed_pairs(tr: &CarlemanTruncation, splits: &Splits, l_max: u64, block: Option<u64>) -> Result<Vec<ScanPair>> {
    let horizon = island_horizon(tr);
    let mut pairs = vec![];
    for &nu in splits.by_level.keys() {
        for l in 1..=l_max {
            let Some(set) = splits.designed(nu, l, l_max, block) else { continue };
            let designed: Vec<u64> = tr.islands.iter().filter(|i| i.nu == nu && set.contains(i.n)).map(|i| i.n).collect();
            if !designed.is_empty() {
                pairs.push(ScanPair { nu, l, designed: IndexSet::new(designed, horizon)? });
            }
        }
    }
    Ok(pairs)
}

fn island_horizon(tr: &CarlemanTruncation) -> u64 {
    tr.islands.iter().map(|i| i.n).max().unwrap_or(1)
}

fn max_island_tau(target: &PiecewiseTarget, res: usize) -> f64 {
    target.pieces.iter().filter(|p| p.island.is_some()).map(|p| p.tau(res)).fold(0.0, f64::max)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExistenceOutcome {
    pub truncation: CarlemanTruncation,
    pub target: PiecewiseTarget,
    pub candidate: FhcCandidate,
    pub delta: f64,
    pub scan: OrbitScanReport,
}

impl ExistenceOutcome {
    pub fn pass(&self) -> bool {
        self.candidate.pass() && self.scan.pass() && !self.scan.pairs.is_empty()
    }
}

/// Truncation without bases, `l_max + 1` parts per level, a fitted `f`, and
/// a scan at `δ = delta_factor · max τ` up to the last island.
pub fn existence_pipeline(cfg: &RunawayConfig, opts: &PipelineOptions) -> Result<ExistenceOutcome> {
    let truncation = build_carleman_truncation(cfg, 0, Some(opts.max_islands))?;
    let splits = Splits::new(cfg, opts.l_max as usize + 1)?;
    let mut target = assemble_existence_target(&truncation, &splits, opts.l_max)?;
    if opts.pointwise_islands {
        target = target.with_pointwise_islands(1.0);
    }
    let candidate = fit_on_compacts(&target, opts.max_degree, opts.grid_res)?;
    let delta = opts.delta_factor * max_island_tau(&target, 2 * opts.grid_res);
    let pairs = designed_pairs(&truncation, &splits, opts.l_max, None)?;
    let args = scan_args(cfg, opts, delta, island_horizon(&truncation));
    let scan = scan_dense(&candidate.poly, &args, &pairs)?;
    Ok(ExistenceOutcome { truncation, target, candidate, delta, scan })
}

fn scan_args(cfg: &RunawayConfig, opts: &PipelineOptions, delta: f64, horizon: u64) -> ScanArgs {
    ScanArgs {
        maps: cfg.maps.clone(),
        exhaustion: cfg.exhaustion.clone(),
        delta,
        horizon,
        grid_res: opts.grid_res,
        envelope_constant: opts.envelope_constant,
    }
}

/// Fits each target on its own thread.
pub fn fit_members(targets: &[PiecewiseTarget], opts: &PipelineOptions) -> Result<Vec<FhcCandidate>> {
    thread::scope(|s| {
        let handles: Vec<_> =
            targets.iter().map(|t| s.spawn(move || fit_on_compacts(t, opts.max_degree, opts.grid_res))).collect();
        handles.into_iter().map(|h| h.join().expect("fit thread panicked")).collect()
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceableOutcome {
    pub truncation: CarlemanTruncation,
    pub targets: Vec<PiecewiseTarget>,
    pub basis: SpanBasis,
    pub gram: GramReport,
    /// Largest island tolerance over all members.
    pub tau: f64,
    pub combination: CombinationReport,
    /// Largest measured error over designed indices of the combination.
    pub measured_error: f64,
    /// `(1 + √H)·τ`
    pub bound: f64,
}

impl SpaceableOutcome {
    pub fn pass(&self) -> bool {
        self.basis.members.iter().all(FhcCandidate::pass)
            && self.basis.perturbation_sum < 0.5
            && self.combination.report.pass()
            && self.measured_error <= self.bound
    }
}

/// Builds `f_1..f_members` from the spaceable targets on one truncation with
/// base `K_1`, then scans `Σ α_μ f_μ` at `δ = delta_factor·(1 + √H)·τ`.
pub fn spaceable_pipeline(
    cfg: &RunawayConfig,
    opts: &PipelineOptions,
    members: u64,
    coefficients: &[Complex],
) -> Result<SpaceableOutcome> {
    let truncation = build_carleman_truncation(cfg, 1, Some(opts.max_islands))?;
    let splits = Splits::new(cfg, (opts.l_max * members) as usize + 1)?;
    let targets = (1..=members)
        .map(|mu| assemble_spaceable_target(mu, &truncation, &splits, opts.l_max, members))
        .collect::<Result<Vec<_>>>()?;
    let fitted = fit_members(&targets, opts)?;
    let basis = SpanBasis::new(fitted, SpanKind::Spaceable)?;
    let gram = gram_independence(&basis);
    let tau = targets.iter().map(|t| max_island_tau(t, 2 * opts.grid_res)).fold(0.0, f64::max);
    let bound = (1.0 + gram.h.sqrt()) * tau;
    let args = scan_args(cfg, opts, opts.delta_factor * bound, island_horizon(&truncation));
    let pairs_for = |member: usize| designed_pairs(&truncation, &splits, opts.l_max, Some(member as u64 + 1)).unwrap_or_default();
    let combination = combination_scan(&basis, coefficients, &args, &pairs_for)?;
    let measured_error = combination.report.pairs.iter().map(|p| p.max_error_designed).fold(0.0, f64::max);
    Ok(SpaceableOutcome { truncation, targets, basis, gram, tau, combination, measured_error, bound })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DenseMember {
    pub mu: u64,
    pub candidate: FhcCandidate,
    /// `sup |f_μ − P_μ|` over the verification grid of `K_{μ+1}`.
    pub base_error: f64,
    pub pass: bool,
}

/// Builds `f_μ` for `μ = 1..members`, each on a truncation with bases
/// `K_1..K_{μ+1}`, and measures `‖f_μ − P_μ‖_{K_{μ+1}}`.
pub fn dense_pipeline(cfg: &RunawayConfig, opts: &PipelineOptions, members: u64) -> Result<Vec<DenseMember>> {
    if members == 0 {
        return Err(Error::InvalidParameter("a dense basis needs at least one member".into()));
    }
    let splits = Splits::new(cfg, (opts.l_max * members) as usize + 1)?;
    let mut targets = vec![];
    for mu in 1..=members {
        let tr = build_carleman_truncation(cfg, mu + 1, Some(opts.max_islands))?;
        targets.push(assemble_dense_target(mu, &tr, &splits, opts.l_max, members)?);
    }
    let fitted = fit_members(&targets, opts)?;
    Ok(fitted
        .into_iter()
        .zip(1..=members)
        .map(|(candidate, mu)| {
            let base = &targets[(mu - 1) as usize].pieces[0].region;
            let p_mu = enumerate_dense_polynomial(mu);
            let base_error = sample_grid(base, 2 * opts.grid_res)
                .into_iter()
                .map(|z| (candidate.poly.eval(z) - p_mu.eval(z)).norm())
                .fold(0.0, f64::max);
            let pass = candidate.pass() && base_error < 1.0 / mu as f64;
            DenseMember { mu, candidate, base_error, pass }
        })
        .collect())
}
