use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::polynomial::{enumerate_dense_polynomial, Evaluate, Polynomial};
use crate::density::{split, IndexSet};
use crate::error::{Error, Result};
use crate::geometry::{disjointness, eps_to_boundary, sample_boundary, sample_grid, CompactSet, Disjointness, Domain, DEFAULT_GRID_RES};
use crate::maps::HoloMap;
use crate::runaway::{CarlemanTruncation, Island, RunawayConfig};
use crate::Complex;

/// What a piece asks the polynomial to match.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum PieceSpec {
    /// `z^mu`
    Monomial { mu: u32 },
    FixedPoly { poly: Polynomial },
    /// `P(φ_n⁻¹(w))` on the island `φ_n(K_ν)`.
    ComposedInverse { poly: Polynomial },
    Zero,
}

/// Admissible error on a piece.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Envelope {
    Uniform { tau: f64 },
    /// `factor · min(1, ε(w))`, evaluated at each point.
    Pointwise { domain: Domain, factor: f64 },
}

impl Envelope {
    pub fn allowed(&self, w: Complex) -> f64 {
        match self {
            Envelope::Uniform { tau } => *tau,
            Envelope::Pointwise { domain, factor } => factor * eps_to_boundary(*domain, w).map_or(0.0, |e| e.min(1.0)),
        }
    }
}

/// The source compact and map of an island piece.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IslandSupport {
    pub n: u64,
    pub nu: u64,
    pub source: CompactSet,
    pub map: HoloMap,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub region: CompactSet,
    pub spec: PieceSpec,
    pub envelope: Envelope,
    pub island: Option<IslandSupport>,
    /// Dense-sequence index `l` targeted on this island, if any.
    pub label: Option<u64>,
    /// Basis member the island is reserved for, if any.
    pub block: Option<u64>,
}

impl Piece {
    /// Sample points with target values. Island pieces are sampled as the
    /// image of the source grid, so `P(φ_n⁻¹(w))` is read off the source.
    pub fn samples(&self, res: usize) -> Vec<(Complex, Complex)> {
        match &self.island {
            Some(isl) => sample_grid(&isl.source, res)
                .into_iter()
                .filter_map(|z| isl.map.apply(z).ok().map(|w| (w, self.value_from(z, w))))
                .collect(),
            None => sample_grid(&self.region, res).into_iter().map(|w| (w, self.value_from(w, w))).collect(),
        }
    }

    /// About `count` points on the boundary of the region with target
    /// values; island boundaries are images of the source boundary.
    pub fn boundary_samples(&self, count: usize) -> Vec<(Complex, Complex)> {
        match &self.island {
            Some(isl) => sample_boundary(&isl.source, count)
                .into_iter()
                .filter_map(|z| isl.map.apply(z).ok().map(|w| (w, self.value_from(z, w))))
                .collect(),
            None => sample_boundary(&self.region, count).into_iter().map(|w| (w, self.value_from(w, w))).collect(),
        }
    }

    /// Target at `w`; island values go through the verified inverse.
    pub fn target_at(&self, w: Complex) -> Result<Complex> {
        let z = match (&self.spec, &self.island) {
            (PieceSpec::ComposedInverse { .. }, Some(isl)) => isl.map.inverse_apply(w)?,
            _ => w,
        };
        Ok(self.value_from(z, w))
    }

    fn value_from(&self, source_point: Complex, w: Complex) -> Complex {
        match &self.spec {
            PieceSpec::Monomial { mu } => w.powu(*mu),
            PieceSpec::FixedPoly { poly } => poly.eval(w),
            PieceSpec::ComposedInverse { poly } => poly.eval(source_point),
            PieceSpec::Zero => Complex::new(0.0, 0.0),
        }
    }

    /// Uniform tolerance, or the smallest pointwise allowance on the grid.
    pub fn tau(&self, res: usize) -> f64 {
        match &self.envelope {
            Envelope::Uniform { tau } => *tau,
            Envelope::Pointwise { .. } => {
                self.samples(res).iter().map(|(w, _)| self.envelope.allowed(*w)).fold(f64::INFINITY, f64::min)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseTarget {
    pub domain: Domain,
    pub pieces: Vec<Piece>,
}

impl PiecewiseTarget {
    /// Rejects non-positive tolerances, island specs without an island,
    /// and regions not certified pairwise disjoint.
    pub fn validate(&self) -> Result<()> {
        for (i, p) in self.pieces.iter().enumerate() {
            match p.envelope {
                Envelope::Uniform { tau } if !(tau > 0.0) => {
                    return Err(Error::InvalidParameter(format!("piece {i} has tolerance {tau}")));
                }
                Envelope::Pointwise { factor, .. } if !(factor > 0.0) => {
                    return Err(Error::InvalidParameter(format!("piece {i} has envelope factor {factor}")));
                }
                _ => {}
            }
            if matches!(p.spec, PieceSpec::ComposedInverse { .. }) && p.island.is_none() {
                return Err(Error::InvalidParameter(format!("piece {i} composes with an inverse but has no island")));
            }
        }
        for i in 0..self.pieces.len() {
            for j in i + 1..self.pieces.len() {
                if disjointness(&self.pieces[i].region, &self.pieces[j].region) != Disjointness::Disjoint {
                    return Err(Error::RegionsNotDisjoint(i, j));
                }
            }
        }
        Ok(())
    }

    /// The same target multiplied by `c`; tolerances are unchanged.
    pub fn scaled(&self, c: Complex) -> PiecewiseTarget {
        let pieces = self
            .pieces
            .iter()
            .map(|p| {
                let spec = match &p.spec {
                    PieceSpec::Monomial { mu } => PieceSpec::FixedPoly { poly: Polynomial::monomial(*mu as usize).scaled(c) },
                    PieceSpec::FixedPoly { poly } => PieceSpec::FixedPoly { poly: poly.scaled(c) },
                    PieceSpec::ComposedInverse { poly } => PieceSpec::ComposedInverse { poly: poly.scaled(c) },
                    PieceSpec::Zero => PieceSpec::Zero,
                };
                Piece { spec, ..p.clone() }
            })
            .collect();
        PiecewiseTarget { domain: self.domain, pieces }
    }

    /// Switches every island piece to the pointwise envelope
    /// `factor · min(1, ε(w))`, keeping the factor used at assembly.
    pub fn with_pointwise_islands(mut self, factor: f64) -> Self {
        for p in self.pieces.iter_mut().filter(|p| p.island.is_some()) {
            p.envelope = Envelope::Pointwise { domain: self.domain, factor };
        }
        self
    }
}

/// `A(ν)` split into parts by recursive halving, per level.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Splits {
    pub parts: usize,
    pub by_level: BTreeMap<u64, Vec<IndexSet>>,
}

impl Splits {
    pub fn new(cfg: &RunawayConfig, parts: usize) -> Result<Self> {
        let mut by_level = BTreeMap::new();
        for nu in cfg.levels() {
            let set = cfg.family.get((nu - 1) as usize).cloned().unwrap_or_else(|| IndexSet::new(vec![], cfg.n_max).expect("empty set"));
            by_level.insert(nu, split(&set, parts, cfg.n_max)?);
        }
        Ok(Splits { parts, by_level })
    }

    /// 1-based part of `A(ν)` holding `n`.
    pub fn part_of(&self, nu: u64, n: u64) -> Option<usize> {
        self.by_level.get(&nu)?.iter().position(|s| s.contains(n)).map(|j| j + 1)
    }

    /// Existence labelling: part `l ≤ l_max` targets `P_l`.
    pub fn existence_label(&self, nu: u64, n: u64, l_max: u64) -> Option<u64> {
        self.part_of(nu, n).map(|j| j as u64).filter(|&l| l <= l_max)
    }

    /// Block labelling: part `(p − 1)·l_max + l` is `A(ν, l, p)`.
    pub fn block_label(&self, nu: u64, n: u64, l_max: u64, members: u64) -> Option<(u64, u64)> {
        let k = self.part_of(nu, n)? as u64;
        if k > l_max * members {
            return None;
        }
        Some(((k - 1) % l_max + 1, (k - 1) / l_max + 1))
    }

    /// Indices of `A(ν, l)` (or `A(ν, l, p)` when `block` is given).
    pub fn designed(&self, nu: u64, l: u64, l_max: u64, block: Option<u64>) -> Option<&IndexSet> {
        let k = match block {
            Some(p) => (p - 1) * l_max + l,
            None => l,
        };
        self.by_level.get(&nu)?.get((k - 1) as usize)
    }
}

/// `min(1, min_{w} ε(w))` or the bare minimum over an island's sampled image.
fn min_eps(domain: Domain, points: impl IntoIterator<Item = Complex>) -> f64 {
    points.into_iter().map(|w| eps_to_boundary(domain, w).unwrap_or(0.0)).fold(f64::INFINITY, f64::min)
}

fn island_piece(isl: &Island, spec: PieceSpec, tau: f64, label: Option<u64>, block: Option<u64>) -> Piece {
    Piece {
        region: isl.region(),
        spec,
        envelope: Envelope::Uniform { tau },
        island: Some(IslandSupport { n: isl.n, nu: isl.nu, source: isl.source.clone(), map: isl.map.clone() }),
        label,
        block,
    }
}

fn island_eps(domain: Domain, isl: &Island) -> f64 {
    let pts = sample_grid(&isl.source, 2 * DEFAULT_GRID_RES).into_iter().filter_map(|z| isl.map.apply(z).ok());
    min_eps(domain, pts)
}

/// One piece per island: `P_l ∘ φ_n⁻¹` when `n ∈ A(ν, l)` with `l ≤ l_max`,
/// zero otherwise; tolerance `min_island ε`.
pub fn assemble_existence_target(tr: &CarlemanTruncation, splits: &Splits, l_max: u64) -> Result<PiecewiseTarget> {
    let pieces = tr
        .islands
        .iter()
        .map(|isl| {
            let tau = island_eps(tr.domain, isl);
            match splits.existence_label(isl.nu, isl.n, l_max) {
                Some(l) => island_piece(
                    isl,
                    PieceSpec::ComposedInverse { poly: enumerate_dense_polynomial(l) },
                    tau,
                    Some(l),
                    None,
                ),
                None => island_piece(isl, PieceSpec::Zero, tau, None, None),
            }
        })
        .collect();
    let target = PiecewiseTarget { domain: tr.domain, pieces };
    target.validate()?;
    Ok(target)
}

fn block_target(
    tr: &CarlemanTruncation,
    splits: &Splits,
    l_max: u64,
    members: u64,
    mu: u64,
    base_piece: Piece,
    factor: f64,
) -> Result<PiecewiseTarget> {
    let mut pieces = vec![base_piece];
    for isl in &tr.islands {
        let tau = factor * island_eps(tr.domain, isl).min(1.0);
        let piece = match splits.block_label(isl.nu, isl.n, l_max, members) {
            Some((l, p)) if p == mu => island_piece(
                isl,
                PieceSpec::ComposedInverse { poly: enumerate_dense_polynomial(l) },
                tau,
                Some(l),
                Some(p),
            ),
            Some((l, p)) => island_piece(isl, PieceSpec::Zero, tau, Some(l), Some(p)),
            None => island_piece(isl, PieceSpec::Zero, tau, None, None),
        };
        pieces.push(piece);
    }
    let target = PiecewiseTarget { domain: tr.domain, pieces };
    target.validate()?;
    Ok(target)
}

fn base_eps(domain: Domain, base: &CompactSet) -> f64 {
    min_eps(domain, sample_grid(base, 2 * DEFAULT_GRID_RES)).min(1.0)
}

/// `z^μ` on `K_1`, `P_l ∘ φ_n⁻¹` on islands of block `μ`, zero on the
/// others; every tolerance scaled by `3^{−μ}`.
pub fn assemble_spaceable_target(mu: u64, tr: &CarlemanTruncation, splits: &Splits, l_max: u64, members: u64) -> Result<PiecewiseTarget> {
    if mu == 0 || mu > members {
        return Err(Error::InvalidParameter(format!("member index {mu} outside 1..={members}")));
    }
    let base = tr.bases.first().ok_or_else(|| Error::Precondition("spaceable targets need the base K_1".into()))?;
    let factor = 3f64.powi(-(mu as i32));
    let base_piece = Piece {
        region: base.clone(),
        spec: PieceSpec::Monomial { mu: mu as u32 },
        envelope: Envelope::Uniform { tau: factor * base_eps(tr.domain, base) },
        island: None,
        label: None,
        block: None,
    };
    block_target(tr, splits, l_max, members, mu, base_piece, factor)
}

/// `P_μ` on the largest base `K_{μ+1}`, islands as in the spaceable case;
/// tolerances scaled by `1/μ`.
pub fn assemble_dense_target(mu: u64, tr: &CarlemanTruncation, splits: &Splits, l_max: u64, members: u64) -> Result<PiecewiseTarget> {
    if mu == 0 || mu > members {
        return Err(Error::InvalidParameter(format!("member index {mu} outside 1..={members}")));
    }
    let base = tr.largest_base().ok_or_else(|| Error::Precondition("dense targets need a base compact".into()))?;
    let factor = 1.0 / mu as f64;
    let base_piece = Piece {
        region: base.clone(),
        spec: PieceSpec::FixedPoly { poly: enumerate_dense_polynomial(mu) },
        envelope: Envelope::Uniform { tau: factor * base_eps(tr.domain, base) },
        island: None,
        label: None,
        block: None,
    };
    block_target(tr, splits, l_max, members, mu, base_piece, factor)
}
