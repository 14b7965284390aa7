//! Weak and strong frequently-runaway checks and finite Carleman truncations.
//!
//! Islands are the sets `φ_n(K_ν)` for `n ∈ A(ν)`, represented by certified
//! enclosing discs. Every disjointness claim needs a `Disjoint` verdict;
//! `Unknown` always counts against the property being checked.

use serde::{Deserialize, Serialize};

use crate::density::{default_burn_in, lower_density_estimate, DensityReport, IndexSet, SeparatedFamily};
use crate::error::{Error, Result};
use crate::geometry::{disjointness, sample_grid, CompactSet, Disc, Disjointness, Domain, Exhaustion, DEFAULT_GRID_RES};
use crate::maps::{image_enclosing_disc, image_enclosing_disc_with, HoloMap, MapFamily, IMAGE_DISC_MARGIN};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunawayConfig {
    pub maps: MapFamily,
    pub exhaustion: Exhaustion,
    /// `family[ν − 1] = A(ν)`.
    pub family: Vec<IndexSet>,
    pub n_max: u64,
    pub nu_max: u64,
    /// First inspected level; the exhaustion is read as starting at `K_{ν_min}`.
    #[serde(default = "one")]
    pub nu_min: u64,
}

fn one() -> u64 {
    1
}

impl RunawayConfig {
    pub fn new(maps: MapFamily, exhaustion: Exhaustion, family: Vec<IndexSet>, n_max: u64, nu_max: u64) -> Result<Self> {
        if maps.domain() != exhaustion.domain {
            return Err(Error::DomainMismatch { expected: exhaustion.domain.name(), found: maps.domain().name() });
        }
        if n_max < 2 || nu_max == 0 {
            return Err(Error::InvalidParameter(format!("horizons n_max={n_max}, ν_max={nu_max}")));
        }
        if let Some(s) = family.iter().find(|s| s.horizon() < n_max) {
            return Err(Error::InvalidParameter(format!("family set known only up to {} < n_max", s.horizon())));
        }
        Ok(RunawayConfig { maps, exhaustion, family, n_max, nu_max, nu_min: 1 })
    }

    /// Binds the levels `A(ν)` of a separated family.
    pub fn from_separated(
        maps: MapFamily,
        exhaustion: Exhaustion,
        family: &SeparatedFamily,
        n_max: u64,
        nu_max: u64,
    ) -> Result<Self> {
        let levels = (1..=nu_max).map(|nu| family.level(nu)).collect();
        RunawayConfig::new(maps, exhaustion, levels, n_max, nu_max)
    }

    /// Starts the inspected levels at `nu_min`, for exhaustions whose first
    /// compacts are empty.
    pub fn with_min_level(mut self, nu_min: u64) -> Result<Self> {
        if nu_min == 0 || nu_min > self.nu_max {
            return Err(Error::InvalidParameter(format!("ν_min={nu_min} outside 1..={}", self.nu_max)));
        }
        self.nu_min = nu_min;
        Ok(self)
    }

    pub fn levels(&self) -> std::ops::RangeInclusive<u64> {
        self.nu_min..=self.nu_max
    }

    pub fn domain(&self) -> Domain {
        self.exhaustion.domain
    }

    /// `A(ν) ∩ [1, n_max]`; empty past the end of the family.
    pub fn level(&self, nu: u64) -> Vec<u64> {
        self.family
            .get((nu - 1) as usize)
            .map(|s| s.iter().take_while(|&n| n <= self.n_max).collect())
            .unwrap_or_default()
    }

    /// All inspected islands, ordered by `(ν, n)`. Islands of an empty
    /// `K_ν` are kept only when the map has an analytic image bound.
    pub fn islands(&self) -> Result<Vec<Island>> {
        let mut out = Vec::new();
        for nu in self.levels() {
            let source = self.exhaustion.compact(nu);
            for n in self.level(nu) {
                let map = self.maps.map(n);
                match image_enclosing_disc(&map, &source) {
                    Ok(image_bound) => out.push(Island { n, nu, source: source.clone(), map, image_bound }),
                    Err(_) if source.is_empty() => {}
                    Err(e) => return Err(e),
                }
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Island {
    pub n: u64,
    pub nu: u64,
    pub source: CompactSet,
    pub map: HoloMap,
    pub image_bound: Disc,
}

impl Island {
    pub fn region(&self) -> CompactSet {
        CompactSet::ClosedDisc(self.image_bound)
    }
}

/// `{n ≤ horizon : K ∩ φ_n(K) = ∅}` with its density report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakRunawayReport {
    pub disjoint: IndexSet,
    pub density: DensityReport,
}

/// Decides `K ∩ φ_n(K) = ∅` through the image enclosing disc for each
/// `n ≤ horizon`; `Unknown` counts as not disjoint.
pub fn check_weak_runaway(maps: &MapFamily, k: &CompactSet, horizon: u64, burn_in: u64) -> Result<WeakRunawayReport> {
    let domain = maps.domain();
    for z in sample_grid(k, DEFAULT_GRID_RES) {
        domain.check(z)?;
    }
    let mut elements = Vec::new();
    for n in 1..=horizon {
        let image = CompactSet::ClosedDisc(image_enclosing_disc(&maps.map(n), k)?);
        if disjointness(k, &image) == Disjointness::Disjoint {
            elements.push(n);
        }
    }
    let disjoint = IndexSet::new(elements, horizon)?;
    let density = lower_density_estimate(&disjoint, horizon, burn_in)?;
    Ok(WeakRunawayReport { disjoint, density })
}

/// The negative example: `φ_{2^k} = φ^k` for a parabolic disc automorphism
/// `φ`, identity at every other index.
pub fn dyadic_counterexample() -> MapFamily {
    MapFamily::DyadicIterates { base: HoloMap::ParabolicDisc { a: 1.0, gamma: 1.0, n: 1 } }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum P2Witness {
    /// `n` lies in both `A(ν)` and `A(μ)`.
    SharedIndex { n: u64, nu: u64, mu: u64 },
    /// The image bounds of islands `(n, ν)` and `(m, μ)` are not certified disjoint.
    Islands { first: (u64, u64), second: (u64, u64), verdict: Disjointness },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub mu: u64,
    /// Islands whose image bound is not certified to clear `K_μ`.
    pub intersecting: usize,
    pub largest_n: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrongRunawayReport {
    pub p1: bool,
    /// Lower-density estimate of each inspected `A(ν)`.
    pub densities: Vec<f64>,
    pub p2: bool,
    pub p2_witness: Option<P2Witness>,
    pub islands_inspected: usize,
    pub p3: bool,
    pub probes: Vec<ProbeReport>,
}

impl StrongRunawayReport {
    pub fn pass(&self) -> bool {
        self.p1 && self.p2 && self.p3
    }
}

/// Finite-horizon verdicts for the three strong-runaway properties.
///
/// P3 is a proxy: for each probe `K_μ` the offending islands are counted
/// and the verdict passes when the largest offender sits in the first half
/// of the horizon, so every later inspected island clears the probe.
pub fn check_strong_runaway(cfg: &RunawayConfig) -> Result<StrongRunawayReport> {
    let burn_in = default_burn_in(cfg.n_max);
    let densities: Vec<f64> = cfg
        .levels()
        .map(|nu| match cfg.family.get((nu - 1) as usize) {
            Some(s) => lower_density_estimate(s, cfg.n_max, burn_in).map(|r| r.lower_estimate),
            None => Ok(0.0),
        })
        .collect::<Result<_>>()?;
    let p1 = densities.iter().all(|&d| d > 0.0);

    let mut p2_witness = shared_index(cfg);
    let islands = cfg.islands()?;
    if p2_witness.is_none() {
        'outer: for (i, a) in islands.iter().enumerate() {
            for b in &islands[i + 1..] {
                let verdict = disjointness(&a.region(), &b.region());
                if verdict != Disjointness::Disjoint {
                    p2_witness = Some(P2Witness::Islands { first: (a.n, a.nu), second: (b.n, b.nu), verdict });
                    break 'outer;
                }
            }
        }
    }

    let probes: Vec<ProbeReport> = (1..=cfg.nu_max)
        .map(|mu| {
            let probe = cfg.exhaustion.compact(mu);
            let offenders: Vec<u64> = islands
                .iter()
                .filter(|isl| disjointness(&probe, &isl.region()) != Disjointness::Disjoint)
                .map(|isl| isl.n)
                .collect();
            ProbeReport { mu, intersecting: offenders.len(), largest_n: offenders.into_iter().max() }
        })
        .collect();
    let p3 = probes.iter().all(|p| p.largest_n.is_none_or(|n| n < cfg.n_max / 2));

    Ok(StrongRunawayReport {
        p1,
        densities,
        p2: p2_witness.is_none(),
        p2_witness,
        islands_inspected: islands.len(),
        p3,
        probes,
    })
}

fn shared_index(cfg: &RunawayConfig) -> Option<P2Witness> {
    let levels: Vec<Vec<u64>> = cfg.levels().map(|nu| cfg.level(nu)).collect();
    for (i, a) in levels.iter().enumerate() {
        for (j, b) in levels.iter().enumerate().skip(i + 1) {
            if let Some(&n) = a.iter().find(|n| b.binary_search(n).is_ok()) {
                return Some(P2Witness::SharedIndex { n, nu: cfg.nu_min + i as u64, mu: cfg.nu_min + j as u64 });
            }
        }
    }
    None
}

/// A finite piece `K_1 ∪ … ∪ K_b ∪ ⋃ φ_n(K_ν)` of a Carleman set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CarlemanTruncation {
    pub domain: Domain,
    pub bases: Vec<CompactSet>,
    /// Least `ν` from which every inspected island clears every base.
    pub k_base: u64,
    /// Islands with `ν ≥ k_base` and nonempty `K_ν`, by ascending `n`.
    pub islands: Vec<Island>,
}

impl CarlemanTruncation {
    pub fn largest_base(&self) -> Option<&CompactSet> {
        self.bases.last()
    }
}

/// Builds the truncation with bases `K_1..K_bases` (none when `bases = 0`),
/// keeping at most `max_islands` islands (smallest `n` first).
pub fn build_carleman_truncation(cfg: &RunawayConfig, bases: u64, max_islands: Option<usize>) -> Result<CarlemanTruncation> {
    let report = check_strong_runaway(cfg)?;
    if !report.pass() {
        return Err(Error::Precondition(format!(
            "strong runaway check failed (P1={}, P2={}, P3={})",
            report.p1, report.p2, report.p3
        )));
    }
    let base_sets: Vec<CompactSet> = (1..=bases).map(|mu| cfg.exhaustion.compact(mu)).collect();
    let islands = cfg.islands()?;
    let clears = |isl: &Island| base_sets.iter().all(|b| disjointness(b, &isl.region()) == Disjointness::Disjoint);

    let k_base = cfg
        .levels()
        .find(|&k| islands.iter().filter(|isl| isl.nu >= k).all(clears))
        .ok_or_else(|| {
            Error::HorizonExhausted(format!("no level ≤ ν_max = {} clears the {bases} base compact(s)", cfg.nu_max))
        })?;

    let mut kept: Vec<Island> = islands.into_iter().filter(|isl| isl.nu >= k_base && !isl.source.is_empty()).collect();
    kept.sort_by_key(|isl| isl.n);
    if let Some(cap) = max_islands {
        kept.truncate(cap);
    }

    let truncation = CarlemanTruncation { domain: cfg.domain(), bases: base_sets, k_base, islands: kept };
    reverify(&truncation)?;
    Ok(truncation)
}

/// Recomputes every image bound on a 4× finer grid and checks all pairs again.
fn reverify(tr: &CarlemanTruncation) -> Result<()> {
    let fine: Vec<CompactSet> = tr
        .islands
        .iter()
        .map(|isl| {
            let d = image_enclosing_disc_with(&isl.map, &isl.source, 4 * DEFAULT_GRID_RES, IMAGE_DISC_MARGIN)?;
            Ok(CompactSet::ClosedDisc(d))
        })
        .collect::<Result<_>>()?;
    let nb = tr.bases.len();
    let regions: Vec<&CompactSet> = tr.bases.iter().chain(fine.iter()).collect();
    for i in 0..regions.len() {
        for j in (i + 1).max(nb)..regions.len() {
            if disjointness(regions[i], regions[j]) != Disjointness::Disjoint {
                return Err(Error::RegionsNotDisjoint(i, j));
            }
        }
    }
    Ok(())
}
