//! Planar domains, compact sets, exhaustions and the chordal metric.
//!
//! The chordal metric uses the sphere-of-diameter-2 normalization, so
//! `chordal_distance(0, ∞) == 2`. It doubles as the error envelope
//! `ε(z) = χ(z, ∂∞G)` for the approximation pipelines.

use std::f64::consts::{PI, TAU};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Complex;

/// Inputs closer than this to the slit `(−∞, 0]` are rejected.
pub const SLIT_TOLERANCE: f64 = 1e-9;

/// Grid resolution used when a caller does not pick one.
pub const DEFAULT_GRID_RES: usize = 12;

/// Number of logarithmically spaced samples on a boundary line or ray.
pub const DEFAULT_BOUNDARY_SAMPLES: usize = 10_000;

/// A point of the extended plane `ℂ ∪ {∞}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ExtendedPoint {
    Finite(Complex),
    Infinity,
}

impl From<Complex> for ExtendedPoint {
    fn from(z: Complex) -> Self {
        ExtendedPoint::Finite(z)
    }
}

impl From<f64> for ExtendedPoint {
    fn from(x: f64) -> Self {
        ExtendedPoint::Finite(Complex::new(x, 0.0))
    }
}

/// Chordal distance on the Riemann sphere of diameter 2.
pub fn chordal_distance(z: impl Into<ExtendedPoint>, w: impl Into<ExtendedPoint>) -> f64 {
    match (z.into(), w.into()) {
        (ExtendedPoint::Infinity, ExtendedPoint::Infinity) => 0.0,
        (ExtendedPoint::Finite(z), ExtendedPoint::Infinity)
        | (ExtendedPoint::Infinity, ExtendedPoint::Finite(z)) => 2.0 / (1.0 + z.norm_sqr()).sqrt(),
        (ExtendedPoint::Finite(z), ExtendedPoint::Finite(w)) => {
            let d = 2.0 * (z - w).norm() / ((1.0 + z.norm_sqr()).sqrt() * (1.0 + w.norm_sqr()).sqrt());
            d.min(2.0)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DomainKind {
    WholePlane,
    UnitDisc,
    RightHalfPlane,
    SlitPlane,
}

/// Boundary of a domain in the extended plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Boundary {
    /// `{∞}`
    InfinityOnly,
    /// The unit circle.
    UnitCircle,
    /// The imaginary axis together with `∞`.
    ImaginaryAxis,
    /// The ray `(−∞, 0]` together with `∞`.
    NegativeRay,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Domain {
    pub kind: DomainKind,
}

impl Domain {
    pub const WHOLE_PLANE: Domain = Domain { kind: DomainKind::WholePlane };
    pub const UNIT_DISC: Domain = Domain { kind: DomainKind::UnitDisc };
    pub const RIGHT_HALF_PLANE: Domain = Domain { kind: DomainKind::RightHalfPlane };
    pub const SLIT_PLANE: Domain = Domain { kind: DomainKind::SlitPlane };

    pub fn new(kind: DomainKind) -> Self {
        Domain { kind }
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            DomainKind::WholePlane => "whole-plane",
            DomainKind::UnitDisc => "unit-disc",
            DomainKind::RightHalfPlane => "right-half-plane",
            DomainKind::SlitPlane => "slit-plane",
        }
    }

    pub fn contains(&self, z: Complex) -> bool {
        if !z.re.is_finite() || !z.im.is_finite() {
            return false;
        }
        match self.kind {
            DomainKind::WholePlane => true,
            DomainKind::UnitDisc => z.norm() < 1.0,
            DomainKind::RightHalfPlane => z.re > 0.0,
            DomainKind::SlitPlane => {
                let dist_to_slit = if z.re <= 0.0 { z.im.abs() } else { z.norm() };
                dist_to_slit > SLIT_TOLERANCE
            }
        }
    }

    pub fn boundary(&self) -> Boundary {
        match self.kind {
            DomainKind::WholePlane => Boundary::InfinityOnly,
            DomainKind::UnitDisc => Boundary::UnitCircle,
            DomainKind::RightHalfPlane => Boundary::ImaginaryAxis,
            DomainKind::SlitPlane => Boundary::NegativeRay,
        }
    }

    pub fn check(&self, z: Complex) -> Result<()> {
        if self.contains(z) {
            Ok(())
        } else {
            Err(Error::OutsideDomain(z, self.name()))
        }
    }
}

/// `ε(z) = χ(z, ∂∞G)` in closed form.
///
/// On a line through the origin the squared chordal distance from `z` to
/// `w(t)` is `4|z − w(t)|² / ((1+|z|²)(1+t²))`, whose stationary points
/// solve a real quadratic; the minimum is taken over those, the endpoints
/// and `∞`.
pub fn eps_to_boundary(domain: Domain, z: Complex) -> Result<f64> {
    domain.check(z)?;
    let to_inf = chordal_distance(z, ExtendedPoint::Infinity);
    let along = |candidates: &[f64], point: &dyn Fn(f64) -> Complex| {
        candidates.iter().map(|&t| chordal_distance(z, point(t))).fold(to_inf, f64::min)
    };
    let q = 1.0 - z.norm_sqr();
    Ok(match domain.boundary() {
        Boundary::InfinityOnly => to_inf,
        Boundary::UnitCircle => {
            let r = z.norm();
            2.0 * (1.0 - r) / (2.0 * (1.0 + r * r)).sqrt()
        }
        Boundary::NegativeRay => {
            // w = −t, t ≥ 0: x t² − (1 − |z|²) t − x = 0
            let mut ts = vec![0.0];
            ts.extend(real_roots(z.re, -q, -z.re).into_iter().filter(|t| *t >= 0.0));
            along(&ts, &|t| Complex::new(-t, 0.0))
        }
        Boundary::ImaginaryAxis => {
            // w = i s: y s² + (1 − |z|²) s − y = 0
            let mut ss = vec![0.0];
            ss.extend(real_roots(z.im, q, -z.im));
            along(&ss, &|s| Complex::new(0.0, s))
        }
    })
}

/// Real roots of `a x² + b x + c`, degenerating to the linear case.
fn real_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    if a == 0.0 {
        return if b == 0.0 { vec![] } else { vec![-c / b] };
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return vec![];
    }
    let s = disc.sqrt();
    let q = -0.5 * (b + b.signum() * s);
    if q == 0.0 {
        return vec![0.0];
    }
    vec![q / a, c / q]
}

/// `ε(z)` with `samples` logarithmically spaced boundary points on
/// one-dimensional boundaries, refined by a golden-section pass.
pub fn eps_to_boundary_with(domain: Domain, z: Complex, samples: usize) -> Result<f64> {
    domain.check(z)?;
    let to_inf = chordal_distance(z, ExtendedPoint::Infinity);
    let eps = match domain.boundary() {
        Boundary::InfinityOnly => to_inf,
        Boundary::UnitCircle => {
            let r = z.norm();
            2.0 * (1.0 - r) / (2.0 * (1.0 + r * r)).sqrt()
        }
        Boundary::NegativeRay => {
            let along = |t: f64| chordal_distance(z, Complex::new(-t, 0.0));
            to_inf.min(minimize_over_half_line(along, samples))
        }
        Boundary::ImaginaryAxis => {
            let up = |t: f64| chordal_distance(z, Complex::new(0.0, t));
            let down = |t: f64| chordal_distance(z, Complex::new(0.0, -t));
            to_inf
                .min(minimize_over_half_line(up, samples))
                .min(minimize_over_half_line(down, samples))
        }
    };
    Ok(eps)
}

/// Minimum of `f` over `t ∈ [0, ∞)` from `0` plus log-spaced samples in
/// `[1e-8, 1e8]`, then golden-section refinement around the best sample.
fn minimize_over_half_line(f: impl Fn(f64) -> f64, samples: usize) -> f64 {
    let samples = samples.max(2);
    let (lo, hi) = (-8.0_f64, 8.0_f64);
    let ts: Vec<f64> = std::iter::once(0.0)
        .chain((0..samples).map(|i| 10f64.powf(lo + (hi - lo) * i as f64 / (samples - 1) as f64)))
        .collect();
    let (best_idx, mut best) = ts
        .iter()
        .map(|&t| f(t))
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc });
    let a = ts[best_idx.saturating_sub(1)];
    let b = ts[(best_idx + 1).min(ts.len() - 1)];
    if b > a {
        best = best.min(golden_section(&f, a, b, 80));
    }
    best
}

/// Golden-section minimum of a unimodal function on `[a, b]`.
pub(crate) fn golden_section(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, iters: usize) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iters {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    fc.min(fd).min(f(a)).min(f(b))
}

/// A closed disc `D̄(center, radius)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Disc {
    pub center: Complex,
    pub radius: f64,
}

impl Disc {
    pub fn new(center: Complex, radius: f64) -> Result<Self> {
        if !(radius >= 0.0) || !radius.is_finite() || !center.re.is_finite() || !center.im.is_finite() {
            return Err(Error::InvalidParameter(format!("disc radius {radius} at {center}")));
        }
        Ok(Disc { center, radius })
    }

    pub fn contains(&self, z: Complex) -> bool {
        (z - self.center).norm() <= self.radius * (1.0 + 1e-12) + 1e-14
    }

    pub fn is_disjoint_from(&self, other: &Disc) -> bool {
        (self.center - other.center).norm() > self.radius + other.radius
    }

    pub fn scaled(&self, factor: f64) -> Disc {
        Disc { center: self.center, radius: self.radius * factor }
    }
}

/// Compact subsets of the plane used as exhaustion levels and islands.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum CompactSet {
    ClosedDisc(Disc),
    /// `{re^{iθ} : rmin ≤ r ≤ rmax, |θ| ≤ half_angle}`; empty when `rmin > rmax`.
    AnnularSector { rmin: f64, rmax: f64, half_angle: f64 },
    SampledCompact { boundary_points: Vec<Complex>, enclosing: Disc },
}

impl CompactSet {
    pub fn disc(center: Complex, radius: f64) -> Result<Self> {
        Ok(CompactSet::ClosedDisc(Disc::new(center, radius)?))
    }

    /// Annular sector around the origin. A sector with `rmin > rmax` is
    /// accepted and represents the empty set.
    pub fn annular_sector(rmin: f64, rmax: f64, half_angle: f64) -> Result<Self> {
        if !(rmin > 0.0) || !(rmax > 0.0) || !rmax.is_finite() {
            return Err(Error::InvalidParameter(format!("sector radii {rmin}..{rmax}")));
        }
        if !(0.0..=PI).contains(&half_angle) {
            return Err(Error::InvalidParameter(format!("sector half-angle {half_angle}")));
        }
        Ok(CompactSet::AnnularSector { rmin, rmax, half_angle })
    }

    pub fn sampled(boundary_points: Vec<Complex>, enclosing: Disc) -> Result<Self> {
        if let Some(p) = boundary_points.iter().find(|p| !enclosing.contains(**p)) {
            return Err(Error::InvalidParameter(format!("sample point {p} outside its enclosing disc")));
        }
        Ok(CompactSet::SampledCompact { boundary_points, enclosing })
    }

    pub fn is_empty(&self) -> bool {
        match self {
            CompactSet::ClosedDisc(_) => false,
            CompactSet::AnnularSector { rmin, rmax, .. } => rmin > rmax,
            CompactSet::SampledCompact { boundary_points, .. } => boundary_points.is_empty(),
        }
    }

    pub fn enclosing_disc(&self) -> Disc {
        match self {
            CompactSet::ClosedDisc(d) => *d,
            CompactSet::AnnularSector { rmax, .. } => Disc { center: Complex::new(0.0, 0.0), radius: *rmax },
            CompactSet::SampledCompact { enclosing, .. } => *enclosing,
        }
    }

    /// Membership test. `None` means the representation cannot decide.
    pub fn contains(&self, z: Complex) -> Option<bool> {
        match self {
            CompactSet::ClosedDisc(d) => Some(d.contains(z)),
            CompactSet::AnnularSector { rmin, rmax, half_angle } => {
                if rmin > rmax {
                    return Some(false);
                }
                let r = z.norm();
                let tol = 1e-12 * rmax.max(1.0);
                Some(r >= rmin - tol && r <= rmax + tol && (r == 0.0 || z.arg().abs() <= half_angle + 1e-12))
            }
            CompactSet::SampledCompact { boundary_points, enclosing } => {
                if !enclosing.contains(z) {
                    Some(false)
                } else if boundary_points.iter().any(|p| (p - z).norm() <= 1e-12 * (1.0 + z.norm())) {
                    Some(true)
                } else {
                    None
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Disjointness {
    Disjoint,
    Intersecting,
    Unknown,
}

/// Tri-state disjointness: exact for disc pairs, otherwise decided by
/// enclosing discs and sample-point witnesses.
pub fn disjointness(c1: &CompactSet, c2: &CompactSet) -> Disjointness {
    if c1.is_empty() || c2.is_empty() {
        return Disjointness::Disjoint;
    }
    if let (CompactSet::ClosedDisc(a), CompactSet::ClosedDisc(b)) = (c1, c2) {
        return if a.is_disjoint_from(b) { Disjointness::Disjoint } else { Disjointness::Intersecting };
    }
    if c1.enclosing_disc().is_disjoint_from(&c2.enclosing_disc()) {
        return Disjointness::Disjoint;
    }
    let witness = |a: &CompactSet, b: &CompactSet| {
        sample_grid(a, DEFAULT_GRID_RES).into_iter().any(|z| b.contains(z) == Some(true))
    };
    if witness(c1, c2) || witness(c2, c1) {
        Disjointness::Intersecting
    } else {
        Disjointness::Unknown
    }
}

/// Deterministic sample of boundary and interior points.
///
/// Discs use the center plus `res` concentric rings, ring `j` carrying
/// `8j` equally spaced points. Sectors use `res + 1` radial levels and
/// `8·res + 1` angular positions. Doubling `res` yields a superset.
pub fn sample_grid(c: &CompactSet, res: usize) -> Vec<Complex> {
    let res = res.max(1);
    match c {
        CompactSet::ClosedDisc(d) => {
            let mut pts = vec![d.center];
            if d.radius == 0.0 {
                return pts;
            }
            for j in 1..=res {
                let r = d.radius * (j as f64 / res as f64);
                let m = 8 * j;
                pts.extend((0..m).map(|k| d.center + Complex::from_polar(r, TAU * (k as f64 / m as f64))));
            }
            pts
        }
        CompactSet::AnnularSector { rmin, rmax, half_angle } => {
            if rmin > rmax {
                return Vec::new();
            }
            let levels = if rmin == rmax { 0 } else { res };
            let m = if *half_angle == 0.0 { 0 } else { 8 * res };
            let mut pts = Vec::with_capacity((levels + 1) * (m + 1));
            for i in 0..=levels {
                let r = if levels == 0 { *rmin } else { rmin + (rmax - rmin) * (i as f64 / levels as f64) };
                for k in 0..=m {
                    let theta = if m == 0 { 0.0 } else { half_angle * (2.0 * (k as f64 / m as f64) - 1.0) };
                    pts.push(Complex::from_polar(r, theta));
                }
            }
            pts
        }
        CompactSet::SampledCompact { boundary_points, .. } => boundary_points.clone(),
    }
}

/// About `count` points on the boundary of `c`, equally spaced by arc length
/// (per edge for sectors). Sampled compacts return their stored points.
pub fn sample_boundary(c: &CompactSet, count: usize) -> Vec<Complex> {
    match c {
        CompactSet::ClosedDisc(d) => {
            if d.radius == 0.0 || count == 0 {
                return vec![d.center];
            }
            (0..count).map(|k| d.center + Complex::from_polar(d.radius, TAU * (k as f64 / count as f64))).collect()
        }
        CompactSet::AnnularSector { rmin, rmax, half_angle } => {
            if rmin > rmax || count == 0 {
                return Vec::new();
            }
            let (outer, inner, radial) = (2.0 * half_angle * rmax, 2.0 * half_angle * rmin, rmax - rmin);
            let total = (outer + inner + 2.0 * radial).max(f64::MIN_POSITIVE);
            let share = |len: f64| ((count as f64 * len / total).ceil() as usize).max(1);
            let arc = |r: f64, m: usize| {
                (0..=m).map(move |k| Complex::from_polar(r, half_angle * (2.0 * (k as f64 / m as f64) - 1.0)))
            };
            let ray = |theta: f64, m: usize| {
                (1..m).map(move |k| Complex::from_polar(rmin + (rmax - rmin) * (k as f64 / m as f64), theta))
            };
            let mut pts: Vec<Complex> = arc(*rmax, share(outer)).chain(arc(*rmin, share(inner))).collect();
            pts.extend(ray(*half_angle, share(radial)).chain(ray(-half_angle, share(radial))));
            pts
        }
        CompactSet::SampledCompact { boundary_points, .. } => boundary_points.clone(),
    }
}

/// Smallest disc containing every point (incremental Welzl with a fixed
/// shuffle, so the result is deterministic).
pub fn smallest_enclosing_disc(points: &[Complex]) -> Option<Disc> {
    if points.is_empty() {
        return None;
    }
    let mut pts = points.to_vec();
    pts.shuffle(&mut ChaCha8Rng::seed_from_u64(0x5eed));
    let inside = |d: &Disc, p: Complex| (p - d.center).norm() <= d.radius * (1.0 + 1e-12) + 1e-15;
    let mut disc = Disc { center: pts[0], radius: 0.0 };
    for i in 1..pts.len() {
        if inside(&disc, pts[i]) {
            continue;
        }
        disc = Disc { center: pts[i], radius: 0.0 };
        for j in 0..i {
            if inside(&disc, pts[j]) {
                continue;
            }
            disc = disc_from_two(pts[i], pts[j]);
            for k in 0..j {
                if !inside(&disc, pts[k]) {
                    disc = disc_from_three(pts[i], pts[j], pts[k]);
                }
            }
        }
    }
    Some(disc)
}

fn disc_from_two(a: Complex, b: Complex) -> Disc {
    Disc { center: (a + b) / 2.0, radius: (a - b).norm() / 2.0 }
}

fn disc_from_three(a: Complex, b: Complex, c: Complex) -> Disc {
    let (bx, by) = (b.re - a.re, b.im - a.im);
    let (cx, cy) = (c.re - a.re, c.im - a.im);
    let d = 2.0 * (bx * cy - by * cx);
    if d.abs() < 1e-300 {
        // collinear: the farthest pair spans the disc
        let candidates = [disc_from_two(a, b), disc_from_two(a, c), disc_from_two(b, c)];
        return candidates.into_iter().fold(candidates[0], |m, x| if x.radius > m.radius { x } else { m });
    }
    let b2 = bx * bx + by * by;
    let c2 = cx * cx + cy * cy;
    let ux = (cy * b2 - by * c2) / d;
    let uy = (bx * c2 - cx * b2) / d;
    let center = Complex::new(a.re + ux, a.im + uy);
    let radius = (center - a).norm().max((center - b).norm()).max((center - c).norm());
    Disc { center, radius }
}

/// Closed-form rule producing the exhaustion level `K_ν`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ExhaustionRule {
    /// `K_ν = D̄(0, scale·ν)` on the whole plane.
    CenteredDiscs { scale: f64 },
    /// `K_ν = D̄(0, 1 − 1/(ν+1))` in the unit disc.
    ShrinkingDiscs,
    /// `K_ν = D̄(ν, ν − 1/(ν+1))` in the right half-plane.
    HalfPlaneDiscs,
    /// Annular sectors of the slit plane:
    /// `min{1/R_ν, 1} ≤ r ≤ R_ν`, `|θ| ≤ π(1 − 1/ν)` with `R_ν = (C ν^{β−α})^N`.
    SlitSectors { c: f64, alpha: f64, beta: f64, root_n: u32 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Exhaustion {
    pub domain: Domain,
    pub rule: ExhaustionRule,
}

impl Exhaustion {
    /// The default exhaustion of a domain kind.
    pub fn standard(domain: Domain) -> Self {
        let rule = match domain.kind {
            DomainKind::WholePlane => ExhaustionRule::CenteredDiscs { scale: 1.0 },
            DomainKind::UnitDisc => ExhaustionRule::ShrinkingDiscs,
            DomainKind::RightHalfPlane => ExhaustionRule::HalfPlaneDiscs,
            DomainKind::SlitPlane => ExhaustionRule::SlitSectors { c: 0.25, alpha: 0.0, beta: 1.0, root_n: 1 },
        };
        Exhaustion { domain, rule }
    }

    pub fn slit_sectors(c: f64, alpha: f64, beta: f64, root_n: u32) -> Result<Self> {
        if !(c > 0.0) || root_n == 0 {
            return Err(Error::InvalidParameter(format!("slit exhaustion C={c}, N={root_n}")));
        }
        Ok(Exhaustion { domain: Domain::SLIT_PLANE, rule: ExhaustionRule::SlitSectors { c, alpha, beta, root_n } })
    }

    /// Outer radius `R_ν` of the slit-plane sectors.
    pub fn slit_radius(c: f64, alpha: f64, beta: f64, root_n: u32, nu: u64) -> f64 {
        (c * (nu as f64).powf(beta - alpha)).powi(root_n as i32)
    }

    /// The compact `K_ν`, `ν ≥ 1`.
    pub fn compact(&self, nu: u64) -> CompactSet {
        let nu = nu.max(1);
        let v = nu as f64;
        let origin = Complex::new(0.0, 0.0);
        match self.rule {
            ExhaustionRule::CenteredDiscs { scale } => CompactSet::ClosedDisc(Disc { center: origin, radius: scale * v }),
            ExhaustionRule::ShrinkingDiscs => CompactSet::ClosedDisc(Disc { center: origin, radius: 1.0 - 1.0 / (v + 1.0) }),
            ExhaustionRule::HalfPlaneDiscs => {
                CompactSet::ClosedDisc(Disc { center: Complex::new(v, 0.0), radius: v - 1.0 / (v + 1.0) })
            }
            ExhaustionRule::SlitSectors { c, alpha, beta, root_n } => {
                let r = Self::slit_radius(c, alpha, beta, root_n, nu);
                CompactSet::AnnularSector { rmin: (1.0 / r).min(1.0), rmax: r, half_angle: PI * (1.0 - 1.0 / v) }
            }
        }
    }
}
