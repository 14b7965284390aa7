//! Thin wrappers over single pipeline stages.

use std::path::PathBuf;

use anyhow::{bail, ensure, Context};
use freqdyn::approx::{
    assemble_dense_target, assemble_existence_target, assemble_spaceable_target, enumerate_dense_polynomial, fit_on_compacts,
    gram_independence, Evaluate, FhcCandidate, PiecewiseTarget, SpanBasis, SpanKind, Splits,
};
use freqdyn::density::{default_burn_in, lower_density_estimate, split, upper_density_estimate, verify_separated_family, IndexSet};
use freqdyn::geometry::sample_grid;
use freqdyn::orbit::{combination_scan, scan_dense, ScanArgs};
use freqdyn::pipeline::{designed_pairs, fit_members, PipelineOptions};
use freqdyn::runaway::{build_carleman_truncation, check_strong_runaway, check_weak_runaway, CarlemanTruncation, RunawayConfig};
use freqdyn::Complex;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{cx, scan_rows, scan_summary, SCAN_COLUMNS};
use crate::config::Config;
use crate::report::{num, Report};
use crate::setup::StageConfig;

/// Sections that determine a built candidate.
const STAGE_SECTIONS: [&str; 6] = ["maps", "exhaustion", "family", "horizons", "fit", "build"];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BuildKind {
    #[default]
    Existence,
    Spaceable,
    Dense,
}

#[derive(Deserialize)]
#[serde(default, deny_unknown_fields)]
struct BuildSection {
    kind: BuildKind,
    members: u64,
    min_lambda: f64,
}

impl Default for BuildSection {
    fn default() -> Self {
        BuildSection { kind: BuildKind::Existence, members: 3, min_lambda: 0.2 }
    }
}

#[derive(Deserialize, Default)]
#[serde(default)]
struct BuildConfig {
    #[serde(flatten)]
    stage: StageConfig,
    build: BuildSection,
}

/// `data` of `candidate.json`.
#[derive(Debug, Serialize, Deserialize)]
pub struct CandidateFile {
    pub kind: BuildKind,
    /// The config sections the candidate was built from.
    pub stage: Value,
    pub members: Vec<FhcCandidate>,
    /// `‖f_μ − P_μ‖` on `K_{μ+1}`, dense bases only.
    pub base_errors: Vec<f64>,
}

fn stage_fingerprint(cfg: &Config) -> anyhow::Result<Value> {
    let mut out = serde_json::Map::new();
    for s in STAGE_SECTIONS {
        if let Some(v) = cfg.table.get(s) {
            out.insert(s.to_string(), serde_json::to_value(v)?);
        }
    }
    Ok(Value::Object(out))
}

fn max_island_tau(target: &PiecewiseTarget, res: usize) -> f64 {
    target.pieces.iter().filter(|p| p.island.is_some()).map(|p| p.tau(res)).fold(0.0, f64::max)
}

struct Built {
    rc: RunawayConfig,
    opts: PipelineOptions,
    truncation: CarlemanTruncation,
    splits: Splits,
    targets: Vec<PiecewiseTarget>,
}

fn existence_setup(stage: &StageConfig) -> anyhow::Result<Built> {
    let rc = stage.runaway()?;
    let opts = stage.fit.clone();
    let truncation = build_carleman_truncation(&rc, 0, Some(opts.max_islands))?;
    let splits = Splits::new(&rc, opts.l_max as usize + 1)?;
    let mut target = assemble_existence_target(&truncation, &splits, opts.l_max)?;
    if opts.pointwise_islands {
        target = target.with_pointwise_islands(1.0);
    }
    Ok(Built { rc, opts, truncation, splits, targets: vec![target] })
}

fn spaceable_setup(stage: &StageConfig, members: u64) -> anyhow::Result<Built> {
    ensure!(members >= 1, "need at least one member");
    let rc = stage.runaway()?;
    let opts = stage.fit.clone();
    let truncation = build_carleman_truncation(&rc, 1, Some(opts.max_islands))?;
    let splits = Splits::new(&rc, (opts.l_max * members) as usize + 1)?;
    let targets = (1..=members)
        .map(|mu| assemble_spaceable_target(mu, &truncation, &splits, opts.l_max, members))
        .collect::<freqdyn::Result<Vec<_>>>()?;
    Ok(Built { rc, opts, truncation, splits, targets })
}

fn piece_rows(member: usize, target: &PiecewiseTarget, cand: &FhcCandidate) -> Vec<Vec<String>> {
    target
        .pieces
        .iter()
        .zip(&cand.certificates)
        .enumerate()
        .map(|(i, (p, c))| {
            let (n, nu) = p.island.as_ref().map(|s| (s.n.to_string(), s.nu.to_string())).unwrap_or_default();
            vec![
                (member + 1).to_string(),
                i.to_string(),
                n,
                nu,
                p.label.map(|l| l.to_string()).unwrap_or_default(),
                num(c.sup_error),
                num(c.envelope),
                num(c.worst_ratio),
                num(c.fine_sup_error),
                c.pass.to_string(),
            ]
        })
        .collect()
}

const PIECE_COLUMNS: [&str; 10] =
    ["member", "piece", "n", "nu", "label", "sup_error", "envelope", "worst_ratio", "fine_sup_error", "pass"];

pub fn cmd_build_fhc(cfg: &Config, r: &mut Report) -> anyhow::Result<()> {
    let BuildConfig { stage, build } = cfg.get()?;
    let stage_json = stage_fingerprint(cfg)?;
    let (members, targets, base_errors) = match build.kind {
        BuildKind::Existence => {
            let b = existence_setup(&stage)?;
            let cand = fit_on_compacts(&b.targets[0], b.opts.max_degree, b.opts.grid_res)?;
            (vec![cand], b.targets, vec![])
        }
        BuildKind::Spaceable => {
            let b = spaceable_setup(&stage, build.members)?;
            let fitted = fit_members(&b.targets, &b.opts)?;
            let basis = SpanBasis::new(fitted.clone(), SpanKind::Spaceable)?;
            let gram = gram_independence(&basis);
            r.verdict("perturbation sum < 1/2", basis.perturbation_sum < 0.5, num(basis.perturbation_sum));
            r.verdict(
                "Gram independence",
                gram.lambda_min >= build.min_lambda,
                format!("λ_min = {} vs {}", num(gram.lambda_min), build.min_lambda),
            );
            (fitted, b.targets, vec![])
        }
        BuildKind::Dense => {
            ensure!(build.members >= 1, "need at least one member");
            let rc = stage.runaway()?;
            let opts = &stage.fit;
            let splits = Splits::new(&rc, (opts.l_max * build.members) as usize + 1)?;
            let mut targets = vec![];
            for mu in 1..=build.members {
                let tr = build_carleman_truncation(&rc, mu + 1, Some(opts.max_islands))?;
                targets.push(assemble_dense_target(mu, &tr, &splits, opts.l_max, build.members)?);
            }
            let fitted = fit_members(&targets, opts)?;
            let mut errors = vec![];
            for (i, (cand, t)) in fitted.iter().zip(&targets).enumerate() {
                let mu = i as u64 + 1;
                let p_mu = enumerate_dense_polynomial(mu);
                let err = sample_grid(&t.pieces[0].region, 2 * opts.grid_res)
                    .into_iter()
                    .map(|z| (cand.poly.eval(z) - p_mu.eval(z)).norm())
                    .fold(0.0, f64::max);
                r.verdict(&format!("member {mu} base error < 1/{mu}"), err < 1.0 / mu as f64, num(err));
                errors.push(err);
            }
            (fitted, targets, errors)
        }
    };
    for (i, m) in members.iter().enumerate() {
        r.verdict(&format!("member {} certified", i + 1), m.pass(), format!("degree {}, status {:?}", m.degree, m.status));
    }
    let rows: Vec<Vec<String>> = members.iter().zip(&targets).enumerate().flat_map(|(i, (m, t))| piece_rows(i, t, m)).collect();
    r.write_csv("pieces.csv", &PIECE_COLUMNS, rows)?;
    let file = CandidateFile { kind: build.kind, stage: stage_json, members, base_errors };
    r.write_json("candidate.json", &file)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScanSection {
    /// Relative to the output root.
    candidate: PathBuf,
    /// Spaceable combinations; defaults to `(1, 0.1, 0.01, …)`.
    coefficients: Option<Vec<[f64; 2]>>,
}

#[derive(Deserialize)]
struct ScanConfig {
    #[serde(flatten)]
    stage: StageConfig,
    scan: ScanSection,
}

fn scan_args(b: &Built, delta: f64) -> ScanArgs {
    ScanArgs {
        maps: b.rc.maps.clone(),
        exhaustion: b.rc.exhaustion.clone(),
        delta,
        horizon: b.truncation.islands.iter().map(|i| i.n).max().unwrap_or(1),
        grid_res: b.opts.grid_res,
        envelope_constant: b.opts.envelope_constant,
    }
}

pub fn cmd_scan(cfg: &Config, r: &mut Report) -> anyhow::Result<()> {
    let ScanConfig { stage, scan } = cfg.get()?;
    let path = crate::output_root().join(&scan.candidate);
    let text = std::fs::read_to_string(&path).with_context(|| format!("reading candidate {}", path.display()))?;
    let doc: Value = serde_json::from_str(&text)?;
    let file: CandidateFile = serde_json::from_value(doc["data"].clone()).context("candidate file layout")?;
    ensure!(
        file.stage == stage_fingerprint(cfg)?,
        "candidate {} was built from different [maps]/[exhaustion]/[family]/[horizons]/[fit]/[build] sections",
        path.display()
    );

    let report = match file.kind {
        BuildKind::Existence => {
            let b = existence_setup(&stage)?;
            let [cand] = &file.members[..] else { bail!("an existence candidate has one member") };
            let delta = b.opts.delta_factor * max_island_tau(&b.targets[0], 2 * b.opts.grid_res);
            let pairs = designed_pairs(&b.truncation, &b.splits, b.opts.l_max, None)?;
            let report = scan_dense(&cand.poly, &scan_args(&b, delta), &pairs)?;
            r.verdict(
                "designed hits beyond burn-in",
                report.pass() && !report.pairs.is_empty(),
                format!("δ = {}, horizon {}, {} pairs", num(delta), report.horizon, report.pairs.len()),
            );
            report
        }
        BuildKind::Spaceable => {
            let members = file.members.len() as u64;
            let b = spaceable_setup(&stage, members)?;
            let basis = SpanBasis::new(file.members, SpanKind::Spaceable)?;
            let gram = gram_independence(&basis);
            let tau = b.targets.iter().map(|t| max_island_tau(t, 2 * b.opts.grid_res)).fold(0.0, f64::max);
            let bound = (1.0 + gram.h.sqrt()) * tau;
            let coefficients: Vec<Complex> = match scan.coefficients {
                Some(c) => c.into_iter().map(cx).collect(),
                None => (0..members).map(|k| Complex::new(10f64.powi(-(k as i32)), 0.0)).collect(),
            };
            let pairs_for =
                |m: usize| designed_pairs(&b.truncation, &b.splits, b.opts.l_max, Some(m as u64 + 1)).unwrap_or_default();
            let comb = combination_scan(&basis, &coefficients, &scan_args(&b, b.opts.delta_factor * bound), &pairs_for)?;
            let measured = comb.report.pairs.iter().map(|p| p.max_error_designed).fold(0.0, f64::max);
            r.verdict(
                "designed hits beyond burn-in",
                comb.report.pass() && !comb.report.pairs.is_empty(),
                format!("leading member {}, δ = {}", comb.leading + 1, num(comb.report.delta)),
            );
            r.verdict("error within (1 + √H)·τ", measured <= bound, format!("{} vs {}", num(measured), num(bound)));
            comb.report
        }
        BuildKind::Dense => bail!("dense members are certified by build-fhc; scan takes existence or spaceable candidates"),
    };
    r.write_csv("scan.csv", &SCAN_COLUMNS, scan_rows(&report))?;
    r.write_json("scan.json", &scan_summary(&report))
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum SetSpec {
    Arithmetic { start: u64, step: u64 },
    PowersOfTwo,
    Naturals,
    /// One index per line; relative paths are read from the config's directory.
    File { path: PathBuf },
}

impl SetSpec {
    fn build(&self, cfg: &Config, horizon: u64) -> anyhow::Result<IndexSet> {
        Ok(match self {
            SetSpec::Arithmetic { start, step } => IndexSet::arithmetic(*start, *step, horizon)?,
            SetSpec::PowersOfTwo => IndexSet::from_predicate(horizon, |n| n.is_power_of_two()),
            SetSpec::Naturals => IndexSet::naturals(horizon),
            SetSpec::File { path } => {
                let p = cfg.path.parent().map(|d| d.join(path)).unwrap_or_else(|| path.clone());
                let text = std::fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))?;
                IndexSet::from_lines(&text, horizon)?
            }
        })
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DensitySection {
    set: SetSpec,
    horizon: u64,
    burn_in: Option<u64>,
    expect_lower_min: Option<f64>,
    expect_lower_max: Option<f64>,
    expect_upper_max: Option<f64>,
}

#[derive(Deserialize)]
struct DensityConfig {
    density: DensitySection,
}

pub fn cmd_density(cfg: &Config, r: &mut Report) -> anyhow::Result<()> {
    let d = cfg.get::<DensityConfig>()?.density;
    let a = d.set.build(cfg, d.horizon)?;
    let burn_in = d.burn_in.unwrap_or_else(|| default_burn_in(d.horizon));
    let rep = lower_density_estimate(&a, d.horizon, burn_in)?;
    let upper = upper_density_estimate(&a, d.horizon, burn_in)?;
    r.write_csv("prefix.csv", &["n", "prefix_ratio"], rep.prefix_ratios.iter().map(|(n, x)| vec![n.to_string(), num(*x)]))?;
    r.write_json(
        "density.json",
        &json!({
            "size": a.len(),
            "lower_estimate": rep.lower_estimate,
            "upper_estimate": upper,
            "sampled_lower": rep.sampled_lower,
            "sampled_upper": rep.sampled_upper,
            "closed_form": rep.closed_form,
            "burn_in": rep.burn_in,
            "horizon": rep.horizon,
        }),
    )?;
    r.verdict(
        "estimates ordered",
        rep.lower_estimate <= upper,
        format!("lower {} ≤ upper {}", num(rep.lower_estimate), num(upper)),
    );
    if let Some(x) = d.expect_lower_min {
        r.verdict("lower estimate ≥ expected", rep.lower_estimate >= x, format!("{} vs {x}", num(rep.lower_estimate)));
    }
    if let Some(x) = d.expect_lower_max {
        r.verdict("lower estimate ≤ expected", rep.lower_estimate <= x, format!("{} vs {x}", num(rep.lower_estimate)));
    }
    if let Some(x) = d.expect_upper_max {
        r.verdict("upper estimate ≤ expected", upper <= x, format!("{} vs {x}", num(upper)));
    }
    Ok(())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SplitSection {
    set: SetSpec,
    parts: usize,
    horizon: u64,
    burn_in: Option<u64>,
    #[serde(default)]
    expected: Vec<f64>,
    #[serde(default = "split_tol")]
    tolerance: f64,
}

fn split_tol() -> f64 {
    0.01
}

#[derive(Deserialize)]
struct SplitConfig {
    split: SplitSection,
}

pub fn cmd_split(cfg: &Config, r: &mut Report) -> anyhow::Result<()> {
    let s = cfg.get::<SplitConfig>()?.split;
    ensure!(s.expected.is_empty() || s.expected.len() == s.parts, "expected needs one density per part");
    let a = s.set.build(cfg, s.horizon)?;
    let pieces = split(&a, s.parts, s.horizon)?;
    let burn_in = s.burn_in.unwrap_or_else(|| default_burn_in(s.horizon));

    let mut assignment: Vec<(u64, usize)> = pieces.iter().enumerate().flat_map(|(j, p)| p.iter().map(move |n| (n, j + 1))).collect();
    assignment.sort_unstable();
    let exact = assignment.len() == a.len() && assignment.iter().zip(a.elements()).all(|((n, _), m)| n == m);
    r.write_csv("partition.csv", &["n", "part"], assignment.iter().map(|(n, j)| [n.to_string(), j.to_string()]))?;

    let densities = pieces
        .iter()
        .map(|p| lower_density_estimate(p, s.horizon, burn_in))
        .collect::<freqdyn::Result<Vec<_>>>()?;
    r.write_csv(
        "densities.csv",
        &["part", "size", "lower_estimate", "sampled_lower", "sampled_upper"],
        densities.iter().zip(&pieces).enumerate().map(|(j, (d, p))| {
            vec![(j + 1).to_string(), p.len().to_string(), num(d.lower_estimate), num(d.sampled_lower), num(d.sampled_upper)]
        }),
    )?;
    r.verdict("partition exact", exact, format!("{} elements in {} parts", a.len(), s.parts));
    for (j, (d, want)) in densities.iter().zip(&s.expected).enumerate() {
        r.verdict(
            &format!("part {} density", j + 1),
            (d.lower_estimate - want).abs() <= s.tolerance,
            format!("{} vs {want} ± {}", num(d.lower_estimate), s.tolerance),
        );
    }
    Ok(())
}

#[derive(Deserialize)]
#[serde(default, deny_unknown_fields)]
struct SepfamilySection {
    min_density: f64,
}

impl Default for SepfamilySection {
    fn default() -> Self {
        SepfamilySection { min_density: 0.005 }
    }
}

#[derive(Deserialize, Default)]
#[serde(default)]
struct SepfamilyConfig {
    #[serde(flatten)]
    stage: StageConfig,
    sepfamily: SepfamilySection,
}

pub fn cmd_sepfamily(cfg: &Config, r: &mut Report) -> anyhow::Result<()> {
    let SepfamilyConfig { stage, sepfamily } = cfg.get()?;
    let family = stage.family.build(stage.horizons.n_max)?;
    let v = verify_separated_family(&family);
    r.write_csv(
        "family.csv",
        &["l", "nu", "n"],
        family.pairs.iter().flat_map(|((l, nu), set)| set.iter().map(move |n| [l.to_string(), nu.to_string(), n.to_string()])),
    )?;
    r.write_json("family.json", &v)?;
    r.verdict("disjoint", v.overlap.is_none(), format!("{:?}", v.overlap));
    r.verdict("n ≥ ν", v.below_level.is_none(), format!("{:?}", v.below_level));
    r.verdict("|n − m| ≥ ν + μ", v.too_close.is_none(), format!("{:?}", v.too_close));
    let worst = v.lower_densities.iter().copied().fold(f64::INFINITY, f64::min);
    r.verdict(
        "densities",
        v.lower_densities.iter().all(|&d| d > sepfamily.min_density),
        format!("min {} vs {}", num(worst), sepfamily.min_density),
    );
    Ok(())
}

#[derive(Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RunawaySection {
    expect_p1: bool,
    expect_p2: bool,
    expect_p3: bool,
    weak: bool,
    weak_nu: u64,
    weak_horizon: Option<u64>,
    weak_burn_in: Option<u64>,
    weak_min_density: f64,
    /// Turns the weak check into a negative control.
    weak_max_density: Option<f64>,
}

impl Default for RunawaySection {
    fn default() -> Self {
        RunawaySection {
            expect_p1: true,
            expect_p2: true,
            expect_p3: true,
            weak: false,
            weak_nu: 1,
            weak_horizon: None,
            weak_burn_in: None,
            weak_min_density: 0.0,
            weak_max_density: None,
        }
    }
}

#[derive(Deserialize, Default)]
#[serde(default)]
struct RunawayCmdConfig {
    #[serde(flatten)]
    stage: StageConfig,
    runaway: RunawaySection,
}

fn expectation(r: &mut Report, name: &str, observed: bool, expected: bool, detail: String) {
    let label = if expected { name.to_string() } else { format!("{name} fails (negative control)") };
    r.verdict(&label, observed == expected, format!("observed {observed}; {detail}"));
}

pub fn cmd_runaway(cfg: &Config, r: &mut Report) -> anyhow::Result<()> {
    let RunawayCmdConfig { stage, runaway: w } = cfg.get()?;
    let rc = stage.runaway()?;
    let strong = check_strong_runaway(&rc)?;
    r.write_json("runaway.json", &strong)?;
    expectation(r, "P1", strong.p1, w.expect_p1, format!("densities {:?}", strong.densities));
    expectation(r, "P2", strong.p2, w.expect_p2, format!("{} islands, witness {:?}", strong.islands_inspected, strong.p2_witness));
    expectation(r, "P3", strong.p3, w.expect_p3, format!("{:?}", strong.probes.iter().map(|p| (p.mu, p.largest_n)).collect::<Vec<_>>()));

    if w.weak {
        let horizon = w.weak_horizon.unwrap_or(rc.n_max);
        let burn_in = w.weak_burn_in.unwrap_or(horizon / 4);
        let k = rc.exhaustion.compact(w.weak_nu);
        let weak = check_weak_runaway(&rc.maps, &k, horizon, burn_in)?;
        r.write_csv(
            "weak.csv",
            &["n", "prefix_ratio"],
            weak.density.prefix_ratios.iter().map(|(n, x)| [n.to_string(), num(*x)]),
        )?;
        let d = weak.density.lower_estimate;
        match w.weak_max_density {
            Some(max) => r.verdict("weak runaway density below bound", d < max, format!("{} vs {max}", num(d))),
            None => r.verdict("weak runaway density", d > w.weak_min_density, format!("{} vs {}", num(d), w.weak_min_density)),
        }
    }
    Ok(())
}
