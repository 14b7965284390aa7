//! Holomorphic self-maps, their inverses on their images, and conformal
//! conjugation by the two closed-form pairs (Cayley and slit-to-disc).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{sample_grid, smallest_enclosing_disc, CompactSet, Disc, Domain, ExtendedPoint, DEFAULT_GRID_RES};
use crate::Complex;

/// Inflation applied to sample-hull image discs.
pub const IMAGE_DISC_MARGIN: f64 = 1.05;

const ROUND_TRIP_TOL: f64 = 1e-9;

const I: Complex = Complex { re: 0.0, im: 1.0 };
const ONE: Complex = Complex { re: 1.0, im: 0.0 };

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PairKind {
    /// `f(z) = (1+z)/(1−z)` from the unit disc onto the right half-plane.
    CayleyDiscToHalfPlane,
    /// `f(z) = (z^{1/2}−1)/(z^{1/2}+1)` from the slit plane onto the unit disc.
    SlitToDisc,
}

/// A conformal isomorphism `f : source → target` with its inverse.
/// `reversed` swaps the roles of `f` and `f⁻¹`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConformalPair {
    pub kind: PairKind,
    #[serde(default)]
    pub reversed: bool,
}

impl ConformalPair {
    pub fn new(kind: PairKind) -> Self {
        ConformalPair { kind, reversed: false }
    }

    pub fn reversed(self) -> Self {
        ConformalPair { reversed: !self.reversed, ..self }
    }

    fn natural_domains(&self) -> (Domain, Domain) {
        match self.kind {
            PairKind::CayleyDiscToHalfPlane => (Domain::UNIT_DISC, Domain::RIGHT_HALF_PLANE),
            PairKind::SlitToDisc => (Domain::SLIT_PLANE, Domain::UNIT_DISC),
        }
    }

    pub fn source(&self) -> Domain {
        let (s, t) = self.natural_domains();
        if self.reversed {
            t
        } else {
            s
        }
    }

    pub fn target(&self) -> Domain {
        let (s, t) = self.natural_domains();
        if self.reversed {
            s
        } else {
            t
        }
    }

    fn natural_forward(&self, z: Complex) -> Complex {
        match self.kind {
            PairKind::CayleyDiscToHalfPlane => (ONE + z) / (ONE - z),
            PairKind::SlitToDisc => {
                let s = principal_root(z, 2);
                (s - ONE) / (s + ONE)
            }
        }
    }

    fn natural_inverse(&self, w: Complex) -> Complex {
        match self.kind {
            PairKind::CayleyDiscToHalfPlane => (w - ONE) / (w + ONE),
            PairKind::SlitToDisc => {
                let q = (ONE + w) / (ONE - w);
                q * q
            }
        }
    }

    /// `f(z)` for `z` in the source domain.
    pub fn forward(&self, z: Complex) -> Result<Complex> {
        self.source().check(z)?;
        Ok(if self.reversed { self.natural_inverse(z) } else { self.natural_forward(z) })
    }

    /// `f` extended to the closure of the source on the Riemann sphere,
    /// without a domain check.
    pub fn forward_extended(&self, z: ExtendedPoint) -> ExtendedPoint {
        let natural_forward = !self.reversed;
        match (z, self.kind, natural_forward) {
            (ExtendedPoint::Infinity, PairKind::CayleyDiscToHalfPlane, true) => ExtendedPoint::Finite(-ONE),
            (ExtendedPoint::Infinity, _, _) => ExtendedPoint::Finite(ONE),
            (ExtendedPoint::Finite(z), _, _) => {
                let w = if natural_forward { self.natural_forward(z) } else { self.natural_inverse(z) };
                if w.is_finite() {
                    ExtendedPoint::Finite(w)
                } else {
                    ExtendedPoint::Infinity
                }
            }
        }
    }

    /// `f⁻¹(w)` for `w` in the target domain.
    pub fn inverse(&self, w: Complex) -> Result<Complex> {
        self.target().check(w)?;
        Ok(if self.reversed { self.natural_forward(w) } else { self.natural_inverse(w) })
    }
}

/// Principal branch `z^{1/n}`, `arg z ∈ (−π, π]`.
pub fn principal_root(z: Complex, n: u32) -> Complex {
    let n = n.max(1) as f64;
    if n == 1.0 {
        return z;
    }
    Complex::from_polar(z.norm().powf(1.0 / n), z.arg() / n)
}

/// The self-map families `φ_n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum HoloMap {
    Identity,
    /// `z ↦ a z + b`
    Similarity { a: Complex, b: Complex },
    /// `z ↦ k (z − a)/(1 − ā z)`
    DiscAutomorphism { k: Complex, a: Complex },
    /// `z ↦ 1 + 2(z−1)/(2 − i a n^γ (z−1))`
    ParabolicDisc { a: f64, gamma: f64, n: u64 },
    /// `z ↦ n^α z^{1/N} + n^β` on the slit plane.
    RootShift { alpha: f64, beta: f64, root_n: u32, n: u64 },
    /// `z ↦ z + i a n^γ` on the right half-plane.
    HalfPlaneShift { a: f64, gamma: f64, n: u64 },
    /// `f ∘ inner ∘ f⁻¹`
    Conjugated { pair: ConformalPair, inner: Box<HoloMap> },
    /// `base` applied `power` times.
    Iterated { base: Box<HoloMap>, power: u32 },
}

impl HoloMap {
    pub fn similarity(a: Complex, b: Complex) -> Result<Self> {
        if a.norm() == 0.0 {
            return Err(Error::InvalidParameter("similarity with a = 0".into()));
        }
        Ok(HoloMap::Similarity { a, b })
    }

    pub fn translation(b: Complex) -> Self {
        HoloMap::Similarity { a: ONE, b }
    }

    pub fn disc_automorphism(k: Complex, a: Complex) -> Result<Self> {
        if (k.norm() - 1.0).abs() > 1e-12 || a.norm() >= 1.0 {
            return Err(Error::InvalidParameter(format!("disc automorphism k={k}, a={a}")));
        }
        Ok(HoloMap::DiscAutomorphism { k, a })
    }

    pub fn parabolic_disc(a: f64, gamma: f64, n: u64) -> Result<Self> {
        if !(a > 0.0) || !(gamma >= 1.0) || n == 0 {
            return Err(Error::InvalidParameter(format!("parabolic a={a}, γ={gamma}, n={n}")));
        }
        Ok(HoloMap::ParabolicDisc { a, gamma, n })
    }

    pub fn root_shift(alpha: f64, beta: f64, root_n: u32, n: u64) -> Result<Self> {
        check_root_shift_params(alpha, beta, root_n)?;
        if n == 0 {
            return Err(Error::InvalidParameter("root shift index n = 0".into()));
        }
        Ok(HoloMap::RootShift { alpha, beta, root_n, n })
    }

    pub fn half_plane_shift(a: f64, gamma: f64, n: u64) -> Result<Self> {
        if !(a > 0.0) || !(gamma >= 1.0) || n == 0 {
            return Err(Error::InvalidParameter(format!("half-plane shift a={a}, γ={gamma}, n={n}")));
        }
        Ok(HoloMap::HalfPlaneShift { a, gamma, n })
    }

    /// Domain of definition; `None` for the identity, which acts on any domain.
    pub fn domain(&self) -> Option<Domain> {
        match self {
            HoloMap::Identity => None,
            HoloMap::Similarity { .. } => Some(Domain::WHOLE_PLANE),
            HoloMap::DiscAutomorphism { .. } | HoloMap::ParabolicDisc { .. } => Some(Domain::UNIT_DISC),
            HoloMap::RootShift { .. } => Some(Domain::SLIT_PLANE),
            HoloMap::HalfPlaneShift { .. } => Some(Domain::RIGHT_HALF_PLANE),
            HoloMap::Conjugated { pair, .. } => Some(pair.target()),
            HoloMap::Iterated { base, .. } => base.domain(),
        }
    }

    fn check_domain(&self, z: Complex) -> Result<()> {
        match self.domain() {
            Some(d) => d.check(z),
            None if z.re.is_finite() && z.im.is_finite() => Ok(()),
            None => Err(Error::OutsideDomain(z, "finite plane")),
        }
    }

    /// Closed form of an iterated similarity, if `self` is one.
    fn as_similarity(&self) -> Option<(Complex, Complex)> {
        match self {
            HoloMap::Identity => Some((ONE, Complex::new(0.0, 0.0))),
            HoloMap::Similarity { a, b } => Some((*a, *b)),
            HoloMap::Iterated { base, power } => {
                let (a, b) = base.as_similarity()?;
                let p = *power as i32;
                let ap = a.powi(p);
                let bp = if (a - ONE).norm() == 0.0 { b * *power as f64 } else { b * (ap - ONE) / (a - ONE) };
                Some((ap, bp))
            }
            _ => None,
        }
    }

    pub fn apply(&self, z: Complex) -> Result<Complex> {
        self.check_domain(z)?;
        Ok(match self {
            HoloMap::Identity => z,
            HoloMap::Similarity { a, b } => a * z + b,
            HoloMap::DiscAutomorphism { k, a } => k * (z - a) / (ONE - a.conj() * z),
            HoloMap::ParabolicDisc { a, gamma, n } => {
                let c = I * (a * (*n as f64).powf(*gamma));
                ONE + 2.0 * (z - ONE) / (2.0 - c * (z - ONE))
            }
            HoloMap::RootShift { alpha, beta, root_n, n } => {
                let nf = *n as f64;
                nf.powf(*alpha) * principal_root(z, *root_n) + nf.powf(*beta)
            }
            HoloMap::HalfPlaneShift { a, gamma, n } => z + I * (a * (*n as f64).powf(*gamma)),
            HoloMap::Conjugated { pair, inner } => pair.forward(inner.apply(pair.inverse(z)?)?)?,
            HoloMap::Iterated { base, power } => {
                if let Some((a, b)) = self.as_similarity() {
                    a * z + b
                } else {
                    let mut w = z;
                    for _ in 0..*power {
                        w = base.apply(w)?;
                    }
                    w
                }
            }
        })
    }

    fn raw_inverse(&self, w: Complex) -> Result<Complex> {
        Ok(match self {
            HoloMap::Identity => w,
            HoloMap::Similarity { a, b } => (w - b) / a,
            HoloMap::DiscAutomorphism { k, a } => {
                let u = w / k;
                (u + a) / (ONE + a.conj() * u)
            }
            HoloMap::ParabolicDisc { a, gamma, n } => {
                let c = I * (a * (*n as f64).powf(*gamma));
                ONE + 2.0 * (w - ONE) / (2.0 + c * (w - ONE))
            }
            HoloMap::RootShift { alpha, beta, root_n, n } => {
                let nf = *n as f64;
                ((w - nf.powf(*beta)) / nf.powf(*alpha)).powi(*root_n as i32)
            }
            HoloMap::HalfPlaneShift { a, gamma, n } => w - I * (a * (*n as f64).powf(*gamma)),
            HoloMap::Conjugated { pair, inner } => {
                let u = pair.inverse(w)?;
                pair.forward(inner.inverse_apply(u)?)?
            }
            HoloMap::Iterated { base, power } => {
                if let Some((a, b)) = self.as_similarity() {
                    (w - b) / a
                } else {
                    let mut z = w;
                    for _ in 0..*power {
                        z = base.inverse_apply(z)?;
                    }
                    z
                }
            }
        })
    }

    /// The unique preimage of `w`, verified by a round trip.
    pub fn inverse_apply(&self, w: Complex) -> Result<Complex> {
        let z = self.raw_inverse(w).map_err(|_| Error::NotInImage(w, f64::INFINITY))?;
        if self.check_domain(z).is_err() {
            return Err(Error::NotInImage(w, f64::INFINITY));
        }
        let back = self.apply(z)?;
        let residual = (back - w).norm();
        if residual > ROUND_TRIP_TOL * (1.0 + w.norm()) {
            return Err(Error::NotInImage(w, residual));
        }
        Ok(z)
    }
}

pub(crate) fn check_root_shift_params(alpha: f64, beta: f64, root_n: u32) -> Result<()> {
    if !(beta > 0.0) || beta < 1.0 + alpha || root_n == 0 || !alpha.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "root shift needs β > 0, β ≥ 1 + α, N ≥ 1 (got α={alpha}, β={beta}, N={root_n})"
        )));
    }
    Ok(())
}

/// `f ∘ m ∘ f⁻¹`, defined on the pair's target domain.
pub fn conjugate(pair: ConformalPair, m: HoloMap) -> Result<HoloMap> {
    if let Some(d) = m.domain() {
        if d != pair.source() {
            return Err(Error::DomainMismatch { expected: pair.source().name(), found: d.name() });
        }
    }
    Ok(HoloMap::Conjugated { pair, inner: Box::new(m) })
}

pub fn iterate(m: &HoloMap, power: u32) -> Result<HoloMap> {
    if power == 0 {
        return Err(Error::InvalidParameter("iterate power must be ≥ 1".into()));
    }
    Ok(HoloMap::Iterated { base: Box::new(m.clone()), power })
}

/// A closed disc containing `m` applied to every point of `c`, with the
/// default grid and margin.
pub fn image_enclosing_disc(m: &HoloMap, c: &CompactSet) -> Result<Disc> {
    image_enclosing_disc_with(m, c, DEFAULT_GRID_RES, IMAGE_DISC_MARGIN)
}

pub fn image_enclosing_disc_with(m: &HoloMap, c: &CompactSet, res: usize, margin: f64) -> Result<Disc> {
    let enc = c.enclosing_disc();
    if let Some((a, b)) = m.as_similarity() {
        return Ok(Disc { center: a * enc.center + b, radius: a.norm() * enc.radius });
    }
    match m {
        HoloMap::HalfPlaneShift { a, gamma, n } => {
            for z in sample_grid(c, res) {
                m.apply(z)?;
            }
            let shift = I * (a * (*n as f64).powf(*gamma));
            Ok(Disc { center: enc.center + shift, radius: enc.radius })
        }
        HoloMap::RootShift { alpha, beta, root_n, n } => {
            for z in sample_grid(c, res) {
                Domain::SLIT_PLANE.check(z)?;
            }
            let nf = *n as f64;
            let reach = enc.center.norm() + enc.radius;
            Ok(Disc {
                center: Complex::new(nf.powf(*beta), 0.0),
                radius: nf.powf(*alpha) * reach.powf(1.0 / *root_n as f64),
            })
        }
        _ => {
            let images = sample_grid(c, res).into_iter().map(|z| m.apply(z)).collect::<Result<Vec<_>>>()?;
            let hull = smallest_enclosing_disc(&images)
                .ok_or_else(|| Error::InvalidParameter("image of an empty compact".into()))?;
            Ok(hull.scaled(margin))
        }
    }
}

/// Whether every mapped sample point of `c` lands in `d`.
pub fn maps_into(m: &HoloMap, d: Domain, c: &CompactSet) -> bool {
    sample_grid(c, DEFAULT_GRID_RES).into_iter().all(|z| m.apply(z).map(|w| d.contains(w)).unwrap_or(false))
}

/// A sequence `n ↦ φ_n` of self-maps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum MapFamily {
    /// `φ_n(z) = z + n·step`
    Translations { step: Complex },
    /// `φ_n(z) = n^α z^{1/N} + n^β`
    RootShifts { alpha: f64, beta: f64, root_n: u32 },
    /// `φ_n(z) = z + i a n^γ`
    HalfPlaneShifts { a: f64, gamma: f64 },
    /// `Φ_n(z) = 1 + 2(z−1)/(2 − i a n^γ (z−1))`
    ParabolicDiscs { a: f64, gamma: f64 },
    /// `φ_{2^k} = base^k`, identity at every other index.
    DyadicIterates { base: HoloMap },
    /// The same map at every index.
    Constant { map: HoloMap },
    /// `f ∘ φ_n ∘ f⁻¹` for an inner family.
    Conjugated { pair: ConformalPair, inner: Box<MapFamily> },
}

impl MapFamily {
    pub fn map(&self, n: u64) -> HoloMap {
        match self {
            MapFamily::Translations { step } => HoloMap::translation(step * n as f64),
            MapFamily::RootShifts { alpha, beta, root_n } => {
                HoloMap::RootShift { alpha: *alpha, beta: *beta, root_n: *root_n, n }
            }
            MapFamily::HalfPlaneShifts { a, gamma } => HoloMap::HalfPlaneShift { a: *a, gamma: *gamma, n },
            MapFamily::ParabolicDiscs { a, gamma } => HoloMap::ParabolicDisc { a: *a, gamma: *gamma, n },
            MapFamily::DyadicIterates { base } => {
                if n >= 2 && n.is_power_of_two() {
                    HoloMap::Iterated { base: Box::new(base.clone()), power: n.trailing_zeros() }
                } else {
                    HoloMap::Identity
                }
            }
            MapFamily::Constant { map } => map.clone(),
            MapFamily::Conjugated { pair, inner } => {
                HoloMap::Conjugated { pair: *pair, inner: Box::new(inner.map(n)) }
            }
        }
    }

    pub fn domain(&self) -> Domain {
        match self {
            MapFamily::Translations { .. } => Domain::WHOLE_PLANE,
            MapFamily::RootShifts { .. } => Domain::SLIT_PLANE,
            MapFamily::HalfPlaneShifts { .. } => Domain::RIGHT_HALF_PLANE,
            MapFamily::ParabolicDiscs { .. } => Domain::UNIT_DISC,
            MapFamily::DyadicIterates { base } => base.domain().unwrap_or(Domain::WHOLE_PLANE),
            MapFamily::Constant { map } => map.domain().unwrap_or(Domain::WHOLE_PLANE),
            MapFamily::Conjugated { pair, .. } => pair.target(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn disc_grid(r: f64) -> Vec<Complex> {
        sample_grid(&CompactSet::disc(c(0.0, 0.0), r).unwrap(), 12)
    }

    #[test]
    fn apply_examples() {
        let z = c(0.3, -0.7);
        assert_eq!(HoloMap::Identity.apply(z).unwrap(), z);
        let p = HoloMap::parabolic_disc(1.0, 1.0, 2).unwrap();
        let w = p.apply(c(0.0, 0.0)).unwrap();
        assert_abs_diff_eq!(w.re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(w.im, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(w.norm(), 2f64.sqrt() / 2.0, epsilon = 1e-15);
        let r = HoloMap::root_shift(0.0, 1.0, 1, 5).unwrap();
        assert_eq!(r.apply(c(2.0, 0.0)).unwrap(), c(7.0, 0.0));
    }

    #[test]
    fn apply_rejects_slit_points() {
        let r = HoloMap::root_shift(0.0, 1.0, 2, 3).unwrap();
        assert!(r.apply(c(-1.0, 0.0)).is_err());
        assert!(r.apply(c(-1.0, 1e-10)).is_err());
        assert!(r.apply(c(0.0, 0.0)).is_err());
        assert!(r.apply(c(-1.0, 1e-6)).is_ok());
    }

    #[test]
    fn inverse_examples() {
        let w = c(1.5, 2.0);
        assert_eq!(HoloMap::Identity.inverse_apply(w).unwrap(), w);
        let s = HoloMap::similarity(c(2.0, 0.0), c(1.0, 0.0)).unwrap();
        assert_eq!(s.inverse_apply(c(5.0, 0.0)).unwrap(), c(2.0, 0.0));
        let r = HoloMap::root_shift(0.0, 1.0, 2, 3).unwrap();
        assert_abs_diff_eq!((r.inverse_apply(c(4.0, 0.0)).unwrap() - c(1.0, 0.0)).norm(), 0.0, epsilon = 1e-15);
        // 3 + (−1) is not of the form 3 + √z with Re √z > 0
        assert!(matches!(r.inverse_apply(c(2.0, 0.0)), Err(Error::NotInImage(..))));
    }

    #[test]
    fn parameter_invariants() {
        assert!(HoloMap::similarity(c(0.0, 0.0), c(1.0, 0.0)).is_err());
        assert!(HoloMap::disc_automorphism(c(1.1, 0.0), c(0.0, 0.0)).is_err());
        assert!(HoloMap::disc_automorphism(c(1.0, 0.0), c(1.0, 0.0)).is_err());
        assert!(HoloMap::root_shift(1.0, 1.5, 1, 1).is_err());
        assert!(HoloMap::root_shift(0.0, 0.0, 1, 1).is_err());
        assert!(HoloMap::root_shift(1.0, 2.0, 1, 1).is_ok());
    }

    #[test]
    fn conjugate_identity_is_identity() {
        for pair in [
            ConformalPair::new(PairKind::CayleyDiscToHalfPlane),
            ConformalPair::new(PairKind::SlitToDisc),
            ConformalPair::new(PairKind::CayleyDiscToHalfPlane).reversed(),
        ] {
            let m = conjugate(pair, HoloMap::Identity).unwrap();
            let grid = match pair.target().kind {
                crate::geometry::DomainKind::UnitDisc => disc_grid(0.9),
                _ => sample_grid(&CompactSet::disc(c(2.0, 0.5), 1.5).unwrap(), 12),
            };
            for z in grid {
                assert_abs_diff_eq!((m.apply(z).unwrap() - z).norm(), 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn conjugated_half_plane_shift_is_parabolic() {
        let pair = ConformalPair::new(PairKind::CayleyDiscToHalfPlane);
        for n in [1, 2, 7, 50] {
            let phi = HoloMap::half_plane_shift(1.3, 1.5, n).unwrap();
            // Φ_n = f⁻¹ ∘ φ_n ∘ f, i.e. conjugation by the reversed pair
            let conj = conjugate(pair.reversed(), phi).unwrap();
            let para = HoloMap::parabolic_disc(1.3, 1.5, n).unwrap();
            for z in disc_grid(0.9) {
                let d = (conj.apply(z).unwrap() - para.apply(z).unwrap()).norm();
                assert!(d < 1e-10, "n={n}, z={z}: {d}");
            }
        }
    }

    #[test]
    fn conjugate_rejects_domain_mismatch() {
        let pair = ConformalPair::new(PairKind::SlitToDisc);
        let m = HoloMap::parabolic_disc(1.0, 1.0, 1).unwrap();
        assert!(matches!(conjugate(pair, m), Err(Error::DomainMismatch { .. })));
    }

    #[test]
    fn slit_conjugation_maps_into_disc() {
        let pair = ConformalPair::new(PairKind::SlitToDisc);
        for n in [1, 4, 30] {
            let m = conjugate(pair, HoloMap::root_shift(0.0, 1.0, 2, n).unwrap()).unwrap();
            let disc = CompactSet::disc(c(0.0, 0.0), 0.9).unwrap();
            assert!(maps_into(&m, Domain::UNIT_DISC, &disc));
            let pts = sample_grid(&disc, 16);
            assert!(pts.len() >= 1000);
            assert!(pts.iter().all(|z| m.apply(*z).unwrap().norm() < 1.0));
        }
    }

    #[test]
    fn image_disc_examples() {
        let unit = CompactSet::disc(c(0.0, 0.0), 1.0).unwrap();
        let t = HoloMap::translation(c(6.0, 0.0));
        assert_eq!(image_enclosing_disc(&t, &unit).unwrap(), Disc { center: c(6.0, 0.0), radius: 1.0 });

        let ex = crate::geometry::Exhaustion::slit_sectors(0.25, 0.0, 1.0, 1).unwrap();
        for nu in 1..6 {
            let k = ex.compact(nu);
            let r = HoloMap::root_shift(0.0, 1.0, 1, 9).unwrap();
            let d = image_enclosing_disc(&r, &k).unwrap();
            assert_eq!(d.center, c(9.0, 0.0));
            assert_abs_diff_eq!(d.radius, 0.25 * nu as f64, epsilon = 1e-15);
        }

        let half = CompactSet::disc(c(0.0, 0.0), 0.5).unwrap();
        let p = HoloMap::parabolic_disc(1.0, 1.0, 3).unwrap();
        let d = image_enclosing_disc(&p, &half).unwrap();
        for z in sample_grid(&half, 4 * DEFAULT_GRID_RES) {
            assert!(d.contains(p.apply(z).unwrap()));
        }
    }

    #[test]
    fn maps_into_examples() {
        let d09 = CompactSet::disc(c(0.0, 0.0), 0.9).unwrap();
        assert!(maps_into(&HoloMap::Identity, Domain::UNIT_DISC, &d09));
        for n in 1..=50 {
            assert!(maps_into(&HoloMap::parabolic_disc(1.0, 1.0, n).unwrap(), Domain::UNIT_DISC, &d09));
        }
        let shift = HoloMap::similarity(c(1.0, 0.0), c(-5.0, 0.0)).unwrap();
        assert!(!maps_into(&shift, Domain::RIGHT_HALF_PLANE, &CompactSet::disc(c(1.0, 0.0), 0.5).unwrap()));
    }

    #[test]
    fn iterate_examples() {
        let m = HoloMap::parabolic_disc(1.0, 1.0, 1).unwrap();
        let once = iterate(&m, 1).unwrap();
        let twice = iterate(&m, 2).unwrap();
        for z in disc_grid(0.8) {
            assert_abs_diff_eq!((once.apply(z).unwrap() - m.apply(z).unwrap()).norm(), 0.0, epsilon = 1e-15);
            let manual = m.apply(m.apply(z).unwrap()).unwrap();
            assert_abs_diff_eq!((twice.apply(z).unwrap() - manual).norm(), 0.0, epsilon = 1e-12);
        }
        let t = iterate(&HoloMap::translation(c(1.0, 0.0)), 5).unwrap();
        assert_eq!(t.apply(c(0.5, 0.5)).unwrap(), c(5.5, 0.5));
        assert!(iterate(&m, 0).is_err());
    }

    #[test]
    fn parabolic_fixes_one() {
        for n in [1, 5, 100] {
            let p = HoloMap::parabolic_disc(2.0, 1.0, n).unwrap();
            // 1 is a boundary point, so use the formula without the domain check
            let c_ = I * (2.0 * n as f64);
            let w = ONE + 2.0 * (ONE - ONE) / (2.0 - c_ * (ONE - ONE));
            assert_abs_diff_eq!((w - ONE).norm(), 0.0, epsilon = 1e-12);
            assert!(p.apply(c(0.999, 0.0)).unwrap().norm() < 1.0);
        }
    }

    #[test]
    fn dyadic_family_schedule() {
        let base = HoloMap::parabolic_disc(1.0, 1.0, 1).unwrap();
        let fam = MapFamily::DyadicIterates { base: base.clone() };
        assert_eq!(fam.map(3), HoloMap::Identity);
        assert_eq!(fam.map(1), HoloMap::Identity);
        assert_eq!(fam.map(8), HoloMap::Iterated { base: Box::new(base), power: 3 });
    }
}
