//! Orbit scans: hit sets `{n : ‖f∘φ_n − P_l‖_{K_ν} < δ}`, their densities,
//! span combinations, and convergence of iterates.

use serde::{Deserialize, Serialize};

use crate::approx::{enumerate_dense_polynomial, Evaluate, LinearCombination, MemberRole, Polynomial, SpanBasis, SpanKind};
use crate::density::{lower_density_estimate, DensityReport, IndexSet};
use crate::error::{Error, Result};
use crate::geometry::{eps_to_boundary, sample_grid, CompactSet, Exhaustion, ExtendedPoint};
use crate::maps::{ConformalPair, HoloMap, MapFamily};
use crate::Complex;

/// Grid resolution used for the ε-decay burn-in.
pub const BURN_IN_GRID_RES: usize = 4;

/// `sup_{z ∈ grid(K)} |f(φ(z)) − P(z)|`.
pub fn orbit_distance(f: &impl Evaluate, m: &HoloMap, k: &CompactSet, p: &Polynomial, grid_res: usize) -> Result<f64> {
    let mut sup = 0.0f64;
    for z in sample_grid(k, grid_res) {
        let err = (f.eval(m.apply(z)?) - p.eval(z)).norm();
        sup = if err.is_nan() { f64::INFINITY } else { sup.max(err) };
    }
    Ok(sup)
}

/// Sup over the grid, abandoned as soon as it reaches `cutoff`.
fn orbit_distance_until(f: &impl Evaluate, m: &HoloMap, grid: &[Complex], targets: &[Complex], cutoff: f64) -> Result<f64> {
    let mut sup = 0.0f64;
    for (z, t) in grid.iter().zip(targets) {
        let err = (f.eval(m.apply(*z)?) - t).norm();
        if !(err < cutoff) {
            return Ok(if err.is_nan() { f64::INFINITY } else { err });
        }
        sup = sup.max(err);
    }
    Ok(sup)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanArgs {
    pub maps: MapFamily,
    pub exhaustion: Exhaustion,
    pub delta: f64,
    pub horizon: u64,
    pub grid_res: usize,
    /// Burn-in waits until `sup_{K_ν} ε(φ_n(z)) < δ / envelope_constant`.
    pub envelope_constant: f64,
}

/// One tested `(ν, l)` with its designed index set `A(ν, l)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanPair {
    pub nu: u64,
    pub l: u64,
    pub designed: IndexSet,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairScan {
    pub nu: u64,
    pub l: u64,
    pub designed: IndexSet,
    pub hits: IndexSet,
    pub burn_in: u64,
    /// Largest orbit distance over designed indices beyond the burn-in.
    pub max_error_designed: f64,
    /// `(n, error, hit)`; errors of misses may be lower bounds of the sup.
    pub rows: Vec<(u64, f64, bool)>,
    pub density: DensityReport,
    pub missed_designed: Vec<u64>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitScanReport {
    pub delta: f64,
    pub horizon: u64,
    pub pairs: Vec<PairScan>,
}

impl OrbitScanReport {
    pub fn pass(&self) -> bool {
        self.pairs.iter().all(|p| p.pass)
    }
}

/// Least `n₀` such that `sup_{K_ν} ε(φ_n(z)) < threshold` for every
/// `n₀ < n ≤ horizon`.
pub fn envelope_burn_in(args: &ScanArgs, k: &CompactSet, threshold: f64) -> Result<u64> {
    let grid = sample_grid(k, BURN_IN_GRID_RES);
    let domain = args.exhaustion.domain;
    for n in (1..=args.horizon).rev() {
        let m = args.maps.map(n);
        let mut sup = 0.0f64;
        for z in &grid {
            sup = sup.max(eps_to_boundary(domain, m.apply(*z)?)?);
        }
        if !(sup < threshold) {
            return Ok(n);
        }
    }
    Ok(0)
}

/// Scans `f` against `P_l` on `K_ν` for every tested pair.
///
/// A pair passes when every designed index beyond the burn-in is a hit and
/// the hit set has positive lower-density estimate; the estimate starts at
/// the first designed index past the burn-in.
pub fn scan(
    f: &impl Evaluate,
    args: &ScanArgs,
    dense_seq: &dyn Fn(u64) -> Polynomial,
    pairs: &[ScanPair],
) -> Result<OrbitScanReport> {
    if !(args.delta > 0.0) {
        return Err(Error::InvalidParameter(format!("δ = {}", args.delta)));
    }
    let mut out = Vec::with_capacity(pairs.len());
    for pair in pairs {
        let k = args.exhaustion.compact(pair.nu);
        let target = dense_seq(pair.l);
        let grid = sample_grid(&k, args.grid_res);
        let targets: Vec<Complex> = grid.iter().map(|z| target.eval(*z)).collect();
        let burn_in = envelope_burn_in(args, &k, args.delta / args.envelope_constant)?;

        let mut hits = Vec::new();
        let mut rows = Vec::with_capacity(args.horizon as usize);
        for n in 1..=args.horizon {
            let m = args.maps.map(n);
            let full = pair.designed.contains(n);
            let cutoff = if full { f64::INFINITY } else { args.delta };
            let err = orbit_distance_until(f, &m, &grid, &targets, cutoff)?;
            let hit = err < args.delta;
            if hit {
                hits.push(n);
            }
            rows.push((n, err, hit));
        }
        let hits = IndexSet::new(hits, args.horizon)?;
        let beyond: Vec<u64> = pair.designed.iter().filter(|&n| n > burn_in && n <= args.horizon).collect();
        let max_error_designed = beyond.iter().map(|&n| rows[(n - 1) as usize].1).fold(0.0, f64::max);
        let missed_designed: Vec<u64> = beyond.iter().copied().filter(|&n| !hits.contains(n)).collect();
        let start = beyond.first().copied().unwrap_or(burn_in + 1).max(1);
        let density = if start < args.horizon {
            lower_density_estimate(&hits, args.horizon, start)?
        } else {
            lower_density_estimate(&hits, args.horizon, args.horizon - 1)?
        };
        let pass = missed_designed.is_empty() && density.lower_estimate > 0.0;
        out.push(PairScan {
            nu: pair.nu,
            l: pair.l,
            designed: pair.designed.clone(),
            hits,
            burn_in,
            max_error_designed,
            rows,
            density,
            missed_designed,
            pass,
        });
    }
    Ok(OrbitScanReport { delta: args.delta, horizon: args.horizon, pairs: out })
}

/// `scan` against the default dense sequence `(P_l)`.
pub fn scan_dense(f: &impl Evaluate, args: &ScanArgs, pairs: &[ScanPair]) -> Result<OrbitScanReport> {
    scan(f, args, &enumerate_dense_polynomial, pairs)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CombinationReport {
    /// Member whose coefficient was normalised to 1 (0-based).
    pub leading: usize,
    pub normalized: Vec<Complex>,
    pub report: OrbitScanReport,
    /// For mixed bases: sup over designed hits of the dense part's distance
    /// to `P_l` and of the spaceable part's size, each to be below `δ/2`.
    pub split_errors: Option<(f64, f64)>,
}

/// Forms `Σ α_μ f_μ` with the leading nonzero coefficient scaled to 1 and
/// scans it. `pairs_for` gives the designed pairs of a member (0-based).
pub fn combination_scan(
    basis: &SpanBasis,
    coefficients: &[Complex],
    args: &ScanArgs,
    pairs_for: &dyn Fn(usize) -> Vec<ScanPair>,
) -> Result<CombinationReport> {
    if coefficients.len() != basis.members.len() {
        return Err(Error::InvalidParameter(format!(
            "{} coefficients for {} members",
            coefficients.len(),
            basis.members.len()
        )));
    }
    let leading = match basis.kind {
        SpanKind::Mixed => coefficients
            .iter()
            .zip(&basis.roles)
            .position(|(a, r)| a.norm() != 0.0 && matches!(r, MemberRole::Dense { .. })),
        _ => None,
    }
    .or_else(|| coefficients.iter().position(|a| a.norm() != 0.0))
    .ok_or_else(|| Error::InvalidParameter("all coefficients are zero".into()))?;
    combination_scan_led(basis, coefficients, leading, args, pairs_for)
}

/// Tries every member with a nonzero coefficient as the leading one, in
/// order, and returns the first whose scan passes along with all reports.
pub fn search_leading_member(
    basis: &SpanBasis,
    coefficients: &[Complex],
    args: &ScanArgs,
    pairs_for: &dyn Fn(usize) -> Vec<ScanPair>,
) -> Result<(Option<usize>, Vec<CombinationReport>)> {
    let mut reports = vec![];
    for (i, a) in coefficients.iter().enumerate() {
        if a.norm() == 0.0 {
            continue;
        }
        let r = combination_scan_led(basis, coefficients, i, args, pairs_for)?;
        let pass = r.report.pass() && !r.report.pairs.is_empty();
        reports.push(r);
        if pass {
            return Ok((Some(i), reports));
        }
    }
    if reports.is_empty() {
        return Err(Error::InvalidParameter("all coefficients are zero".into()));
    }
    Ok((None, reports))
}

fn combination_scan_led(
    basis: &SpanBasis,
    coefficients: &[Complex],
    leading: usize,
    args: &ScanArgs,
    pairs_for: &dyn Fn(usize) -> Vec<ScanPair>,
) -> Result<CombinationReport> {
    if coefficients.len() != basis.members.len() || leading >= coefficients.len() || coefficients[leading].norm() == 0.0 {
        return Err(Error::InvalidParameter(format!(
            "{} coefficients for {} members, leading member {leading}",
            coefficients.len(),
            basis.members.len()
        )));
    }
    let lead = coefficients[leading];
    let normalized: Vec<Complex> = coefficients.iter().map(|a| a / lead).collect();
    let comb = LinearCombination {
        terms: normalized.iter().zip(basis.polynomials()).map(|(a, p)| (*a, p.clone())).collect(),
    };
    let pairs = pairs_for(leading);
    let report = scan_dense(&comb, args, &pairs)?;

    let split_errors = if basis.kind == SpanKind::Mixed {
        let part = |dense: bool| LinearCombination {
            terms: normalized
                .iter()
                .zip(basis.polynomials())
                .zip(&basis.roles)
                .filter(|(_, r)| matches!(r, MemberRole::Dense { .. }) == dense)
                .map(|((a, p), _)| (*a, p.clone()))
                .collect(),
        };
        let (dense_part, spaceable_part) = (part(true), part(false));
        let zero = Polynomial::zero();
        let (mut d_err, mut s_err) = (0.0f64, 0.0f64);
        for pair in &report.pairs {
            let k = args.exhaustion.compact(pair.nu);
            let target = enumerate_dense_polynomial(pair.l);
            for n in pair.designed.iter().filter(|&n| n > pair.burn_in && n <= args.horizon) {
                let m = args.maps.map(n);
                d_err = d_err.max(orbit_distance(&dense_part, &m, &k, &target, args.grid_res)?);
                s_err = s_err.max(orbit_distance(&spaceable_part, &m, &k, &zero, args.grid_res)?);
            }
        }
        Some((d_err, s_err))
    } else {
        None
    };
    Ok(CombinationReport { leading, normalized, report, split_errors })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterateReport {
    /// `e_n` for `n = 1, 2, …` until `N` or until an iterate left the domain.
    pub errors: Vec<f64>,
    pub escaped: bool,
}

/// `e_n = sup_K |Q(g(φ^n z)) − Q(g(limit))|` with `g` the forward map of
/// `pair` when one is given, the identity otherwise.
pub fn iterate_convergence(
    m: &HoloMap,
    q: &Polynomial,
    pair: Option<ConformalPair>,
    k: &CompactSet,
    limit: ExtendedPoint,
    steps: usize,
) -> Result<IterateReport> {
    let g = |w: Complex| -> Result<Complex> {
        match pair {
            Some(p) => p.forward(w),
            None => Ok(w),
        }
    };
    let limit_value = match pair {
        Some(p) => p.forward_extended(limit),
        None => limit,
    };
    let ExtendedPoint::Finite(limit_value) = limit_value else {
        return Err(Error::InvalidParameter("the limit is sent to ∞".into()));
    };
    let q_limit = q.eval(limit_value);
    let mut points = sample_grid(k, crate::geometry::DEFAULT_GRID_RES);
    let mut errors = Vec::with_capacity(steps);
    for _ in 0..steps {
        let mut sup = 0.0f64;
        for z in points.iter_mut() {
            *z = match m.apply(*z) {
                Ok(w) => w,
                Err(_) => return Ok(IterateReport { errors, escaped: true }),
            };
            sup = sup.max((q.eval(g(*z)?) - q_limit).norm());
        }
        errors.push(sup);
    }
    Ok(IterateReport { errors, escaped: false })
}

/// First index from which `errors` never increases (by more than `tol`).
pub fn eventually_monotone_from(errors: &[f64], tol: f64) -> Option<usize> {
    if errors.is_empty() {
        return None;
    }
    let mut start = 0;
    for i in 1..errors.len() {
        if errors[i] > errors[i - 1] + tol {
            start = i;
        }
    }
    Some(start)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Domain;
    use crate::maps::PairKind;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn translation_args(delta: f64, horizon: u64) -> ScanArgs {
        ScanArgs {
            maps: MapFamily::Translations { step: c(2.0, 0.0) },
            exhaustion: Exhaustion::standard(Domain::WHOLE_PLANE),
            delta,
            horizon,
            grid_res: 6,
            envelope_constant: 1.0,
        }
    }

    #[test]
    fn orbit_distance_examples() {
        let p = Polynomial::from_coefficients(vec![c(1.0, 0.0), c(0.0, 2.0), c(-1.0, 0.5)]);
        let k = CompactSet::disc(c(0.3, 0.1), 0.7).unwrap();
        assert_eq!(orbit_distance(&p, &HoloMap::Identity, &k, &p, 8).unwrap(), 0.0);

        let m = HoloMap::translation(c(1.0, -1.0));
        let q = Polynomial::monomial(2);
        let base = orbit_distance(&p, &m, &k, &q, 8).unwrap();
        let s = c(-2.0, 1.5);
        let scaled = orbit_distance(&p.scaled(s), &m, &k, &q.scaled(s), 8).unwrap();
        assert!((scaled - s.norm() * base).abs() < 1e-12 * scaled);
    }

    #[test]
    fn zero_function_never_hits_a_nonzero_target() {
        let args = translation_args(0.5, 200);
        let pairs = vec![ScanPair { nu: 1, l: 2, designed: IndexSet::new(vec![], 200).unwrap() }];
        let r = scan_dense(&Polynomial::zero(), &args, &pairs).unwrap();
        assert!(r.pairs[0].hits.is_empty());
    }

    #[test]
    fn huge_delta_hits_everything() {
        let args = translation_args(1e300, 300);
        let pairs = vec![ScanPair { nu: 1, l: 3, designed: IndexSet::new(vec![], 300).unwrap() }];
        let r = scan_dense(&Polynomial::monomial(1), &args, &pairs).unwrap();
        assert_eq!(r.pairs[0].hits.len(), 300);
        assert_eq!(r.pairs[0].density.sampled_lower, 1.0);
    }

    #[test]
    fn hits_grow_with_delta() {
        let f = Polynomial::from_coefficients(vec![c(0.0, 0.0), c(0.01, 0.0)]);
        let pairs = vec![ScanPair { nu: 1, l: 1, designed: IndexSet::new(vec![], 150).unwrap() }];
        let small = scan_dense(&f, &translation_args(0.5, 150), &pairs).unwrap();
        let large = scan_dense(&f, &translation_args(2.0, 150), &pairs).unwrap();
        assert!(small.pairs[0].hits.iter().all(|n| large.pairs[0].hits.contains(n)));
        assert!(large.pairs[0].hits.len() > small.pairs[0].hits.len());
    }

    #[test]
    fn burn_in_tracks_envelope_decay() {
        // sup over D̄(0,1) of ε(z + 2n) is 2/√(1 + (2n − 1)²)
        let args = translation_args(0.1, 100);
        let k = CompactSet::disc(c(0.0, 0.0), 1.0).unwrap();
        let n0 = envelope_burn_in(&args, &k, 0.1).unwrap();
        let eps = |n: u64| 2.0 / (1.0 + (2.0 * n as f64 - 1.0).powi(2)).sqrt();
        assert!(eps(n0) >= 0.1 && eps(n0 + 1) < 0.1, "n0 = {n0}");
    }

    #[test]
    fn iterates_of_identity_do_not_move() {
        let k = CompactSet::disc(c(0.0, 0.0), 0.5).unwrap();
        let q = Polynomial::monomial(1);
        let r = iterate_convergence(&HoloMap::Identity, &q, None, &k, ExtendedPoint::Finite(c(0.0, 0.0)), 20).unwrap();
        assert!(r.errors.iter().all(|e| (e - 0.5).abs() < 1e-15));
    }

    #[test]
    fn parabolic_iterates_converge_to_the_boundary_point() {
        let k = CompactSet::disc(c(0.0, 0.0), 0.5).unwrap();
        let phi = HoloMap::parabolic_disc(1.0, 1.0, 1).unwrap();
        let r = iterate_convergence(&phi, &Polynomial::monomial(1), None, &k, ExtendedPoint::Finite(c(1.0, 0.0)), 200)
            .unwrap();
        assert!(!r.escaped);
        assert!(r.errors[199] < 0.1, "{}", r.errors[199]);
        assert!(eventually_monotone_from(&r.errors, 1e-15).unwrap() < 50);
    }

    #[test]
    fn half_plane_shift_through_cayley() {
        let k = CompactSet::disc(c(2.0, 0.0), 1.0).unwrap();
        let shift = HoloMap::half_plane_shift(1.0, 1.0, 1).unwrap();
        let pair = ConformalPair::new(PairKind::CayleyDiscToHalfPlane).reversed();
        let r = iterate_convergence(&shift, &Polynomial::monomial(1), Some(pair), &k, ExtendedPoint::Infinity, 400)
            .unwrap();
        assert!(r.errors[399] < r.errors[0] / 10.0);
        assert!(eventually_monotone_from(&r.errors, 1e-15).is_some());
    }

    #[test]
    fn monotone_tail_detection() {
        assert_eq!(eventually_monotone_from(&[3.0, 1.0, 2.0, 1.5, 1.0], 0.0), Some(2));
        assert_eq!(eventually_monotone_from(&[1.0, 1.0, 1.0], 0.0), Some(0));
    }
}
