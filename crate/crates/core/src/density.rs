//! Natural densities of index sets, the recursive halving split, separated
//! index families, and the finite-horizon similarity/translation criteria.
//!
//! Densities are estimated from a finite prefix: the lower estimate is the
//! smallest prefix ratio `card(A ∩ [1, n]) / n` over `n ∈ [burn_in, horizon]`
//! and the upper estimate the largest. These are estimates, never the true
//! `liminf`/`limsup`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Complex;

/// Thresholds standing in for "→ +∞" in the finite-horizon criteria.
pub const DIVERGENCE_THRESHOLDS: [f64; 3] = [1.0, 10.0, 100.0];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Descriptor {
    /// `{start + k·step : k ≥ 0}`
    ArithmeticProgression { start: u64, step: u64 },
    Constructed,
}

/// A strictly increasing set of positive integers, complete up to `horizon`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexSet {
    elements: Vec<u64>,
    horizon: u64,
    descriptor: Option<Descriptor>,
}

impl IndexSet {
    pub fn new(elements: Vec<u64>, horizon: u64) -> Result<Self> {
        if elements.first() == Some(&0) {
            return Err(Error::InvalidParameter("index sets hold positive integers".into()));
        }
        if elements.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter("index set is not strictly increasing".into()));
        }
        if elements.last().is_some_and(|&l| l > horizon) {
            return Err(Error::InvalidParameter(format!("index set exceeds its horizon {horizon}")));
        }
        Ok(IndexSet { elements, horizon, descriptor: None })
    }

    pub fn from_predicate(horizon: u64, pred: impl Fn(u64) -> bool) -> Self {
        IndexSet { elements: (1..=horizon).filter(|&n| pred(n)).collect(), horizon, descriptor: None }
    }

    pub fn arithmetic(start: u64, step: u64, horizon: u64) -> Result<Self> {
        if start == 0 || step == 0 {
            return Err(Error::InvalidParameter("progression needs start ≥ 1 and step ≥ 1".into()));
        }
        let elements = (0..).map(|k| start + k * step).take_while(|&n| n <= horizon).collect();
        Ok(IndexSet {
            elements,
            horizon,
            descriptor: Some(Descriptor::ArithmeticProgression { start, step }),
        })
    }

    pub fn naturals(horizon: u64) -> Self {
        IndexSet::arithmetic(1, 1, horizon).expect("valid progression")
    }

    pub fn with_descriptor(mut self, descriptor: Descriptor) -> Self {
        self.descriptor = Some(descriptor);
        self
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn descriptor(&self) -> Option<Descriptor> {
        self.descriptor
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, n: u64) -> bool {
        self.elements.binary_search(&n).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.elements.iter().copied()
    }

    /// Elements `≤ horizon`, keeping the descriptor.
    pub fn truncated(&self, horizon: u64) -> IndexSet {
        let cut = self.elements.partition_point(|&n| n <= horizon);
        IndexSet { elements: self.elements[..cut].to_vec(), horizon: horizon.min(self.horizon), descriptor: self.descriptor }
    }

    /// Union of sets, horizon = the smallest horizon involved.
    pub fn union<'a>(sets: impl IntoIterator<Item = &'a IndexSet>) -> IndexSet {
        let mut horizon = u64::MAX;
        let mut all = Vec::new();
        for s in sets {
            horizon = horizon.min(s.horizon);
            all.extend_from_slice(&s.elements);
        }
        if horizon == u64::MAX {
            horizon = 0;
        }
        all.retain(|&n| n <= horizon);
        all.sort_unstable();
        all.dedup();
        IndexSet { elements: all, horizon, descriptor: Some(Descriptor::Constructed) }
    }

    /// Newline-delimited serialization.
    pub fn to_lines(&self) -> String {
        let mut s = String::with_capacity(self.elements.len() * 6);
        for n in &self.elements {
            s.push_str(&n.to_string());
            s.push('\n');
        }
        s
    }

    pub fn from_lines(text: &str, horizon: u64) -> Result<Self> {
        let elements = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(|l| l.parse::<u64>().map_err(|e| Error::InvalidParameter(format!("bad index {l:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        IndexSet::new(elements, horizon)
    }

    fn closed_form_density(&self) -> Option<f64> {
        match self.descriptor? {
            Descriptor::ArithmeticProgression { step, .. } => Some(1.0 / step as f64),
            Descriptor::Constructed => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    /// `(n, card(A ∩ [1, n]) / n)` at log-spaced checkpoints and at the horizon.
    pub prefix_ratios: Vec<(u64, f64)>,
    /// Reported lower density: the closed form when known, else `sampled_lower`.
    pub lower_estimate: f64,
    /// Reported upper density: the closed form when known, else `sampled_upper`.
    pub upper_estimate: f64,
    pub sampled_lower: f64,
    pub sampled_upper: f64,
    pub closed_form: Option<f64>,
    pub burn_in: u64,
    pub horizon: u64,
    pub empty: bool,
}

/// Prefix-ratio extrema over `[burn_in, horizon]`.
pub fn lower_density_estimate(a: &IndexSet, horizon: u64, burn_in: u64) -> Result<DensityReport> {
    let burn_in = burn_in.max(1);
    if burn_in >= horizon {
        return Err(Error::Precondition(format!("burn-in {burn_in} must be below the horizon {horizon}")));
    }
    if horizon > a.horizon {
        return Err(Error::Precondition(format!("horizon {horizon} exceeds the set's horizon {}", a.horizon)));
    }
    let closed_form = a.closed_form_density();
    if a.is_empty() {
        return Ok(DensityReport {
            prefix_ratios: vec![(horizon, 0.0)],
            lower_estimate: 0.0,
            upper_estimate: 0.0,
            sampled_lower: 0.0,
            sampled_upper: 0.0,
            closed_form,
            burn_in,
            horizon,
            empty: true,
        });
    }

    let checkpoints = log_checkpoints(horizon, 64);
    let mut next_cp = 0;
    let mut prefix_ratios = Vec::with_capacity(checkpoints.len());
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut count = 0u64;
    let mut it = a.elements.iter().peekable();
    for n in 1..=horizon {
        while it.next_if(|&&e| e <= n).is_some() {
            count += 1;
        }
        let ratio = count as f64 / n as f64;
        if n >= burn_in {
            lo = lo.min(ratio);
            hi = hi.max(ratio);
        }
        if next_cp < checkpoints.len() && checkpoints[next_cp] == n {
            prefix_ratios.push((n, ratio));
            next_cp += 1;
        }
    }
    Ok(DensityReport {
        prefix_ratios,
        lower_estimate: closed_form.unwrap_or(lo),
        upper_estimate: closed_form.unwrap_or(hi),
        sampled_lower: lo,
        sampled_upper: hi,
        closed_form,
        burn_in,
        horizon,
        empty: false,
    })
}

pub fn upper_density_estimate(a: &IndexSet, horizon: u64, burn_in: u64) -> Result<f64> {
    Ok(lower_density_estimate(a, horizon, burn_in)?.upper_estimate)
}

/// Burn-in used when a caller only fixes the horizon.
pub fn default_burn_in(horizon: u64) -> u64 {
    (horizon / 10).max(1)
}

fn log_checkpoints(horizon: u64, count: usize) -> Vec<u64> {
    let mut cps: Vec<u64> = (0..count)
        .map(|i| (horizon as f64).powf(i as f64 / (count - 1) as f64).round() as u64)
        .map(|n| n.clamp(1, horizon))
        .collect();
    cps.push(horizon);
    cps.sort_unstable();
    cps.dedup();
    cps
}

/// Sub-sequence receiving the element of rank `k` under recursive halving:
/// odd ranks go to part 1, ranks `≡ 2 (mod 4)` to part 2, and in general
/// rank `k` goes to part `v₂(k) + 1`.
pub fn split_assignment(k: u64) -> u64 {
    assert!(k >= 1, "ranks start at 1");
    u64::from(k.trailing_zeros()) + 1
}

/// Splits `a ∩ [1, horizon]` into `parts` disjoint sets; the last part
/// absorbs every rank assigned beyond it.
pub fn split(a: &IndexSet, parts: usize, horizon: u64) -> Result<Vec<IndexSet>> {
    if parts == 0 {
        return Err(Error::InvalidParameter("split needs at least one part".into()));
    }
    let horizon = horizon.min(a.horizon);
    let mut out = vec![Vec::new(); parts];
    for (rank, n) in a.iter().take_while(|&n| n <= horizon).enumerate() {
        let j = (split_assignment(rank as u64 + 1) as usize).min(parts);
        out[j - 1].push(n);
    }
    Ok(out
        .into_iter()
        .map(|elements| IndexSet { elements, horizon, descriptor: Some(Descriptor::Constructed) })
        .collect())
}

/// Pair `(l, ν)` at position `p ≥ 1` of the Cantor diagonal order
/// `(1,1), (1,2), (2,1), (1,3), (2,2), (3,1), …`; always `ν ≤ p`.
pub fn diagonal_pair(p: u64) -> (u64, u64) {
    assert!(p >= 1);
    let mut d = 1;
    let mut start = 1;
    while start + d <= p {
        start += d;
        d += 1;
    }
    let offset = p - start;
    (1 + offset, d - offset)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparatedFamily {
    /// `((l, ν), A(l, ν))`
    pub pairs: Vec<((u64, u64), IndexSet)>,
    pub base: u64,
    pub horizon: u64,
}

impl SeparatedFamily {
    /// `A(ν) = ⋃_l A(l, ν)`.
    pub fn level(&self, nu: u64) -> IndexSet {
        let sets: Vec<&IndexSet> = self.pairs.iter().filter(|((_, v), _)| *v == nu).map(|(_, s)| s).collect();
        if sets.is_empty() {
            return IndexSet { elements: Vec::new(), horizon: self.horizon, descriptor: Some(Descriptor::Constructed) };
        }
        IndexSet::union(sets)
    }

    pub fn max_level(&self) -> u64 {
        self.pairs.iter().map(|((_, nu), _)| *nu).max().unwrap_or(0)
    }
}

/// Raw dyadic class `{M·2^{p−1}(2j+1)}` up to `horizon`.
fn raw_class(base: u64, p: u64, horizon: u64) -> Vec<u64> {
    let first = base.saturating_mul(1u64 << (p - 1).min(62));
    let step = first.saturating_mul(2);
    (0..).map(|j| first + j * step).take_while(|&n| n <= horizon).collect()
}

/// Lower bound on the density left in each raw class after pruning.
fn pruned_density_bounds(nus: &[u64], base: u64) -> Vec<f64> {
    (1..=nus.len())
        .map(|p| {
            let spacing = base as f64 * 2f64.powi(p as i32);
            let own = 1.0 / spacing;
            let loss: f64 = (p + 1..=nus.len())
                .map(|q| {
                    let s = nus[p - 1] + nus[q - 1];
                    let kills = if s <= base { 0.0 } else { (2.0 * s as f64 / spacing).ceil() };
                    kills / (base as f64 * 2f64.powi(q as i32))
                })
                .sum();
            own - loss
        })
        .collect()
}

/// Reference construction of `num_pairs` separated sets, pairs taken in
/// diagonal order.
pub fn build_separated_family(num_pairs: u64, horizon: u64, base: u64) -> Result<SeparatedFamily> {
    if num_pairs == 0 {
        return Err(Error::InvalidParameter("need num_pairs ≥ 1".into()));
    }
    let pairs: Vec<(u64, u64)> = (1..=num_pairs).map(diagonal_pair).collect();
    build_separated_family_for(&pairs, horizon, base)
}

/// Separated sets for an explicit list of `(l, ν)` pairs: pair `p` (1-based)
/// starts from the dyadic class `{M·2^{p−1}(2j+1)}` of the multiples of
/// `base`, pruned so that `n ≥ ν` and `|n − m| ≥ ν + μ`. Pruning removes
/// elements from the lower-indexed set only.
pub fn build_separated_family_for(pairs: &[(u64, u64)], horizon: u64, base: u64) -> Result<SeparatedFamily> {
    if pairs.is_empty() || base == 0 {
        return Err(Error::InvalidParameter("need at least one pair and M ≥ 1".into()));
    }
    if pairs.len() > 60 {
        return Err(Error::InvalidParameter("at most 60 pairs fit the dyadic construction".into()));
    }
    if pairs.iter().any(|&(l, nu)| l == 0 || nu == 0) {
        return Err(Error::InvalidParameter("pair labels start at 1".into()));
    }
    let nus: Vec<u64> = pairs.iter().map(|&(_, nu)| nu).collect();
    let bounds = pruned_density_bounds(&nus, base);
    if let Some((p, b)) = bounds.iter().enumerate().find(|(_, b)| **b <= 0.0) {
        return Err(Error::SeparationViolated {
            property: "density bound",
            detail: format!("pair {} keeps density ≥ {b:.3e} after pruning; increase M", p + 1),
        });
    }
    for (p, &nu) in nus.iter().enumerate() {
        if base * (1 << p) * 2 < 2 * nu {
            return Err(Error::SeparationViolated {
                property: "separation",
                detail: format!("class spacing of pair {} is below 2ν = {}", p + 1, 2 * nu),
            });
        }
    }

    let raw: Vec<Vec<u64>> = (1..=pairs.len() as u64).map(|p| raw_class(base, p, horizon)).collect();
    let mut out = Vec::with_capacity(pairs.len());
    for (p, &label) in pairs.iter().enumerate() {
        let nu = nus[p];
        let kept: Vec<u64> = raw[p]
            .iter()
            .copied()
            .filter(|&n| n >= nu)
            .filter(|&n| {
                (p + 1..pairs.len()).all(|q| {
                    let gap = nu + nus[q];
                    let later = &raw[q];
                    let i = later.partition_point(|&m| m < n);
                    let near_above = later.get(i).is_some_and(|&m| m - n < gap);
                    let near_below = i > 0 && n - later[i - 1] < gap;
                    !near_above && !near_below
                })
            })
            .collect();
        let set = IndexSet { elements: kept, horizon, descriptor: Some(Descriptor::Constructed) };
        out.push((label, set));
    }
    let family = SeparatedFamily { pairs: out, base, horizon };
    let report = verify_separated_family(&family);
    if let Some(v) = report.first_violation() {
        return Err(v);
    }
    Ok(family)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationReport {
    /// First element shared by two sets: `(element, pair index, pair index)`.
    pub overlap: Option<(u64, usize, usize)>,
    /// First element below its level: `(element, ν)`.
    pub below_level: Option<(u64, u64)>,
    /// First close pair: `(n, m, ν + μ)`.
    pub too_close: Option<(u64, u64, u64)>,
    pub lower_densities: Vec<f64>,
    pub pass: bool,
}

impl SeparationReport {
    pub fn first_violation(&self) -> Option<Error> {
        if let Some((n, i, j)) = self.overlap {
            return Some(Error::SeparationViolated {
                property: "disjointness",
                detail: format!("{n} lies in sets {} and {}", i + 1, j + 1),
            });
        }
        if let Some((n, nu)) = self.below_level {
            return Some(Error::SeparationViolated { property: "n ≥ ν", detail: format!("{n} < ν = {nu}") });
        }
        if let Some((n, m, gap)) = self.too_close {
            return Some(Error::SeparationViolated {
                property: "separation",
                detail: format!("|{n} − {m}| < ν + μ = {gap}"),
            });
        }
        None
    }
}

/// Brute-force check of disjointness, `n ≥ ν` and `|n − m| ≥ ν + μ` over
/// every pair of elements up to the family's horizon.
pub fn verify_separated_family(f: &SeparatedFamily) -> SeparationReport {
    let labelled: Vec<(u64, usize, u64)> = f
        .pairs
        .iter()
        .enumerate()
        .flat_map(|(i, ((_, nu), set))| set.iter().map(move |n| (n, i, *nu)))
        .collect();

    let mut overlap = None;
    let mut too_close = None;
    for (x, &(n, i, nu)) in labelled.iter().enumerate() {
        for &(m, j, mu) in &labelled[x + 1..] {
            if n == m && i != j {
                overlap.get_or_insert((n, i.min(j), i.max(j)));
            } else if n != m && n.abs_diff(m) < nu + mu {
                too_close.get_or_insert((n.min(m), n.max(m), nu + mu));
            }
        }
    }
    let below_level = labelled.iter().find(|(n, _, nu)| n < nu).map(|&(n, _, nu)| (n, nu));
    let burn_in = default_burn_in(f.horizon);
    let lower_densities = f
        .pairs
        .iter()
        .map(|(_, s)| lower_density_estimate(s, f.horizon, burn_in).map(|r| r.lower_estimate).unwrap_or(0.0))
        .collect();
    SeparationReport {
        pass: overlap.is_none() && below_level.is_none() && too_close.is_none(),
        overlap,
        below_level,
        too_close,
        lower_densities,
    }
}

/// Closed-form integer-indexed sequences used by the criteria.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Sequence {
    /// `scale · n^exponent`
    Power { scale: Complex, exponent: f64 },
    Constant { value: Complex },
}

impl Sequence {
    pub fn at(&self, n: u64) -> Complex {
        match self {
            Sequence::Power { scale, exponent } => scale * (n as f64).powf(*exponent),
            Sequence::Constant { value } => *value,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimilarityReport {
    /// For each threshold `T`, the index from which `|b_n| − ω_n|a_n| > T` holds up to the horizon.
    pub crossings: Vec<(f64, Option<u64>)>,
    pub divergence_pass: bool,
    /// First `(n, m)`, `n < m`, with `|b_m − b_n| < ω_{m−n}(|a_m| + |a_n|)`.
    pub first_violation: Option<(u64, u64)>,
    pub separation_pass: bool,
    pub pass: bool,
}

/// Finite-horizon proxy for the similarity criterion
/// `|b_n| − ω_n|a_n| → ∞` and `|b_m − b_n| ≥ ω_{m−n}(|a_m| + |a_n|)`.
pub fn check_similarity_criterion(
    a_seq: impl Fn(u64) -> Complex,
    b_seq: impl Fn(u64) -> Complex,
    omega_seq: impl Fn(u64) -> f64,
    horizon: u64,
) -> Result<SimilarityReport> {
    let a: Vec<f64> = (1..=horizon).map(|n| a_seq(n).norm()).collect();
    let b: Vec<Complex> = (1..=horizon).map(&b_seq).collect();
    let w: Vec<f64> = (1..=horizon).map(&omega_seq).collect();
    if let Some(i) = a.iter().position(|&x| x == 0.0) {
        return Err(Error::Precondition(format!("a_{} = 0", i + 1)));
    }
    if w.windows(2).any(|p| p[1] < p[0]) {
        return Err(Error::Precondition("ω must be nondecreasing".into()));
    }

    let excess: Vec<f64> = (0..horizon as usize).map(|i| b[i].norm() - w[i] * a[i]).collect();
    let crossings: Vec<(f64, Option<u64>)> = DIVERGENCE_THRESHOLDS
        .iter()
        .map(|&t| {
            let crossing = match excess.iter().rposition(|&v| v <= t) {
                None => Some(1),
                Some(i) if i + 1 < excess.len() => Some(i as u64 + 2),
                Some(_) => None,
            };
            (t, crossing)
        })
        .collect();
    let divergence_pass = crossings.iter().all(|(_, c)| c.is_some());

    let mut first_violation = None;
    'outer: for n in 1..=horizon as usize {
        for m in n + 1..=horizon as usize {
            let lhs = (b[m - 1] - b[n - 1]).norm();
            let rhs = w[m - n - 1] * (a[m - 1] + a[n - 1]);
            if lhs < rhs {
                first_violation = Some((n as u64, m as u64));
                break 'outer;
            }
        }
    }
    let separation_pass = first_violation.is_none();
    Ok(SimilarityReport {
        crossings,
        divergence_pass,
        first_violation,
        separation_pass,
        pass: divergence_pass && separation_pass,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TranslationReport {
    /// `inf_{n ≤ horizon − k} |b_{n+k} − b_n|` for `k = 1..=k_max`.
    pub infima: Vec<f64>,
    /// For each threshold, the least `k` from which every infimum up to `k_max` reaches it.
    pub crossings: Vec<(f64, Option<u64>)>,
    /// Set when the top threshold is only reached at `k ≥` that threshold.
    pub slow_growth: bool,
    pub pass: bool,
}

/// Finite-horizon proxy for `lim_k inf_n |b_{n+k} − b_n| = ∞`.
pub fn check_translation_separation(b_seq: impl Fn(u64) -> Complex, horizon: u64, k_max: u64) -> Result<TranslationReport> {
    if k_max == 0 || k_max >= horizon {
        return Err(Error::Precondition(format!("need 1 ≤ k_max < horizon (k_max={k_max}, horizon={horizon})")));
    }
    let b: Vec<Complex> = (1..=horizon).map(&b_seq).collect();
    let infima: Vec<f64> = (1..=k_max as usize)
        .map(|k| (0..horizon as usize - k).map(|i| (b[i + k] - b[i]).norm()).fold(f64::INFINITY, f64::min))
        .collect();
    let crossings: Vec<(f64, Option<u64>)> = DIVERGENCE_THRESHOLDS
        .iter()
        .map(|&t| {
            let crossing = match infima.iter().rposition(|&v| v < t) {
                None => Some(1),
                Some(i) if i + 1 < infima.len() => Some(i as u64 + 2),
                Some(_) => None,
            };
            (t, crossing)
        })
        .collect();
    let pass = crossings.iter().all(|(_, c)| c.is_some());
    let top = DIVERGENCE_THRESHOLDS[DIVERGENCE_THRESHOLDS.len() - 1];
    let slow_growth = crossings.last().and_then(|(_, c)| *c).is_some_and(|k| k as f64 >= top);
    Ok(TranslationReport { infima, crossings, slow_growth, pass })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn evens(h: u64) -> IndexSet {
        IndexSet::arithmetic(2, 2, h).unwrap()
    }

    #[test]
    fn density_examples() {
        let r = lower_density_estimate(&evens(1_000_000), 1_000_000, 1_000).unwrap();
        assert!((0.4999..=0.5).contains(&r.lower_estimate));
        assert!(r.sampled_lower >= 0.5 - 2.0 / 1_000.0);

        let squares = IndexSet::new((1..=1000u64).map(|k| k * k).collect(), 1_000_000).unwrap();
        let r = lower_density_estimate(&squares, 1_000_000, 1_000).unwrap();
        assert!(r.lower_estimate < 0.002);

        let mod4 = IndexSet::arithmetic(2, 4, 100_000).unwrap();
        let r = lower_density_estimate(&mod4, 100_000, 1_000).unwrap();
        assert!((0.2499..=0.25).contains(&r.lower_estimate));
        // residue-class count: card = floor((n + 2)/4), so the sampled minimum
        // over n ≥ 1000 sits at n = 1001
        assert_eq!(r.sampled_lower, 250.0 / 1001.0);
    }

    #[test]
    fn empty_set_is_flagged() {
        let e = IndexSet::new(vec![], 100).unwrap();
        let r = lower_density_estimate(&e, 100, 10).unwrap();
        assert!(r.empty);
        assert_eq!((r.lower_estimate, r.upper_estimate), (0.0, 0.0));
    }

    #[test]
    fn density_preconditions() {
        let e = evens(100);
        assert!(lower_density_estimate(&e, 100, 100).is_err());
        assert!(lower_density_estimate(&e, 200, 10).is_err());
    }

    #[test]
    fn upper_density_examples() {
        let u = upper_density_estimate(&evens(1_000_000), 1_000_000, 1_000).unwrap();
        assert!((u - 0.5).abs() < 1e-12);

        let pow2 = IndexSet::new((0..20).map(|k| 1u64 << k).collect(), 1_000_000).unwrap();
        // with burn-in 10 the maximum is attained at n = 10: {1, 2, 4, 8}
        let u = upper_density_estimate(&pow2, 1_000_000, 10).unwrap();
        assert_eq!(u, 4.0 / 10.0);
        let u = upper_density_estimate(&pow2, 1_000_000, 10_000).unwrap();
        assert!(u < 0.01);

        let union = IndexSet::union([&evens(1_000_000), &pow2]);
        let u = upper_density_estimate(&union, 1_000_000, 1_000).unwrap();
        assert!((u - 0.5).abs() < 0.002, "{u}");
    }

    /// Recursive halving, done literally: part j takes every other element
    /// (starting with the first) of what parts 1..j−1 left behind.
    fn halving_oracle(ranks: u64, depth: u64) -> Vec<u64> {
        let mut assignment = vec![0; ranks as usize];
        let mut remaining: Vec<u64> = (1..=ranks).collect();
        for j in 1..=depth {
            let (taken, rest): (Vec<_>, Vec<_>) = remaining.iter().enumerate().partition(|(i, _)| i % 2 == 0);
            for (_, k) in taken {
                assignment[(*k - 1) as usize] = j;
            }
            remaining = rest.into_iter().map(|(_, k)| *k).collect();
        }
        assignment
    }

    #[test]
    fn split_assignment_examples() {
        for (k, j) in [(1, 1), (3, 1), (5, 1), (2, 2), (6, 2), (10, 2), (4, 3), (8, 4), (12, 3)] {
            assert_eq!(split_assignment(k), j, "rank {k}");
        }
        let oracle = halving_oracle(64, 7);
        for k in 1..=64u64 {
            assert_eq!(split_assignment(k), oracle[(k - 1) as usize], "rank {k}");
        }
    }

    #[test]
    fn split_partitions_naturals() {
        let parts = split(&IndexSet::naturals(100), 2, 100).unwrap();
        let mut all: Vec<u64> = parts.iter().flat_map(|p| p.iter()).collect();
        all.sort_unstable();
        assert_eq!(all, (1..=100).collect::<Vec<_>>());
        assert!(parts[0].iter().all(|n| n % 2 == 1));
    }

    #[test]
    fn split_density_bounds() {
        let parts = split(&IndexSet::naturals(100_000), 3, 100_000).unwrap();
        let r = lower_density_estimate(&parts[0], 100_000, 1_000).unwrap();
        assert!(r.lower_estimate >= 0.49);

        let parts = split(&evens(100_000), 3, 100_000).unwrap();
        let r = lower_density_estimate(&parts[1], 100_000, 1_000).unwrap();
        assert!(r.lower_estimate >= 0.12);
    }

    #[test]
    fn split_rejects_zero_parts() {
        assert!(split(&IndexSet::naturals(10), 0, 10).is_err());
    }

    #[test]
    fn diagonal_order() {
        let first: Vec<_> = (1..=7).map(diagonal_pair).collect();
        assert_eq!(first, vec![(1, 1), (1, 2), (2, 1), (1, 3), (2, 2), (3, 1), (1, 4)]);
        for p in 1..500 {
            assert!(diagonal_pair(p).1 <= p);
        }
    }

    #[test]
    fn separated_family_single_pair() {
        let f = build_separated_family(1, 1_000, 8).unwrap();
        assert_eq!(f.pairs.len(), 1);
        let set = &f.pairs[0].1;
        assert_eq!(&set.elements()[..3], &[8, 24, 40]);
        let report = verify_separated_family(&f);
        assert!(report.pass);
        assert!(report.lower_densities[0] >= 0.04, "{:?}", report.lower_densities);
    }

    #[test]
    fn separated_family_three_pairs() {
        let f = build_separated_family(3, 10_000, 8).unwrap();
        let report = verify_separated_family(&f);
        assert!(report.pass);
        assert!(report.lower_densities.iter().all(|&d| d > 0.005), "{:?}", report.lower_densities);
    }

    #[test]
    fn separated_family_small_base_is_decided() {
        match build_separated_family(2, 10_000, 1) {
            Ok(f) => assert!(verify_separated_family(&f).pass),
            Err(Error::SeparationViolated { .. }) => {}
            Err(e) => panic!("unexpected error {e}"),
        }
    }

    #[test]
    fn explicit_pairs_family() {
        let f = build_separated_family_for(&[(1, 5), (2, 5), (1, 6)], 10_000, 16).unwrap();
        assert!(verify_separated_family(&f).pass);
        assert_eq!(f.level(5).len(), f.pairs[0].1.len() + f.pairs[1].1.len());
        assert!(f.level(1).is_empty());
        assert!(build_separated_family_for(&[(1, 9)], 100, 4).is_err());
    }

    #[test]
    fn verifier_catches_violations() {
        let a = IndexSet::new(vec![10, 20], 100).unwrap();
        let b = IndexSet::new(vec![20, 40], 100).unwrap();
        let f = SeparatedFamily { pairs: vec![((1, 1), a.clone()), ((2, 1), b)], base: 1, horizon: 100 };
        let r = verify_separated_family(&f);
        assert!(!r.pass);
        assert_eq!(r.overlap, Some((20, 0, 1)));

        let low = IndexSet::new(vec![2, 50], 100).unwrap();
        let f = SeparatedFamily { pairs: vec![((1, 3), low)], base: 1, horizon: 100 };
        let r = verify_separated_family(&f);
        assert_eq!(r.below_level, Some((2, 3)));
        assert!(matches!(r.first_violation(), Some(Error::SeparationViolated { property: "n ≥ ν", .. })));

        let close = IndexSet::new(vec![11, 50], 100).unwrap();
        let f = SeparatedFamily { pairs: vec![((1, 1), a), ((1, 2), close)], base: 1, horizon: 100 };
        assert_eq!(verify_separated_family(&f).too_close, Some((10, 11, 3)));
    }

    #[test]
    fn similarity_criterion_examples() {
        let one = |_| Complex::new(1.0, 0.0);
        let r = check_similarity_criterion(one, |n| Complex::new((n * n) as f64, 0.0), |k| k as f64, 1_000).unwrap();
        assert!(r.pass);
        assert_eq!(r.crossings[2], (100.0, Some(11)));

        let r = check_similarity_criterion(one, |n| Complex::new(n as f64, 0.0), |k| k as f64, 1_000).unwrap();
        assert!(!r.divergence_pass);

        let zero_at_7 = |n| if n == 7 { Complex::new(0.0, 0.0) } else { Complex::new(1.0, 0.0) };
        assert!(matches!(
            check_similarity_criterion(zero_at_7, |n| Complex::new(n as f64, 0.0), |k| k as f64, 100),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn translation_separation_examples() {
        let r = check_translation_separation(|n| Complex::new((n * n) as f64, 0.0), 1_000, 500).unwrap();
        for (k, inf) in r.infima.iter().enumerate().take(50) {
            let k = k as f64 + 1.0;
            assert_eq!(*inf, k * k + 2.0 * k);
        }
        assert!(r.pass && !r.slow_growth);

        let r = check_translation_separation(|n| Complex::new(n as f64, 0.0), 1_000, 500).unwrap();
        assert_eq!(r.crossings[2], (100.0, Some(100)));
        assert!(r.pass && r.slow_growth);

        let r = check_translation_separation(|n| Complex::from_polar(1.0, n as f64), 1_000, 500).unwrap();
        assert!(!r.pass);
    }

    #[test]
    fn index_set_lines_round_trip() {
        let s = IndexSet::new(vec![3, 9, 27], 30).unwrap();
        assert_eq!(IndexSet::from_lines(&s.to_lines(), 30).unwrap().elements(), s.elements());
        assert!(IndexSet::new(vec![3, 3], 10).is_err());
        assert!(IndexSet::new(vec![0, 3], 10).is_err());
        assert!(IndexSet::new(vec![11], 10).is_err());
    }
}
