//! Config sections shared by the stage subcommands.

use anyhow::{bail, ensure, Context};
use freqdyn::density::{build_separated_family, build_separated_family_for, SeparatedFamily};
use freqdyn::geometry::{Domain, Exhaustion, ExhaustionRule};
use freqdyn::maps::{HoloMap, MapFamily};
use freqdyn::pipeline::PipelineOptions;
use freqdyn::runaway::{dyadic_counterexample, RunawayConfig};
use freqdyn::Complex;
use serde::Deserialize;

use crate::sigma::{sigma, DEFAULT_T_MAX};

/// `[maps]`
#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum MapsSection {
    /// `z + n·step`, `step = [re, im]`
    Translations { step: [f64; 2] },
    RootShifts {
        alpha: f64,
        beta: f64,
        #[serde(default = "one_u32")]
        root_n: u32,
    },
    HalfPlaneShifts { a: f64, gamma: f64 },
    ParabolicDiscs { a: f64, gamma: f64 },
    /// The dyadic schedule of the unit-disc parabolic map.
    DyadicParabolic,
}

fn one_u32() -> u32 {
    1
}

impl Default for MapsSection {
    fn default() -> Self {
        MapsSection::Translations { step: [2.0, 0.0] }
    }
}

impl MapsSection {
    pub fn family(&self) -> anyhow::Result<MapFamily> {
        Ok(match *self {
            MapsSection::Translations { step } => {
                ensure!(step[0] != 0.0 || step[1] != 0.0, "translation step must be nonzero");
                MapFamily::Translations { step: Complex::new(step[0], step[1]) }
            }
            MapsSection::RootShifts { alpha, beta, root_n } => {
                crate::sigma::validate(alpha, beta)?;
                HoloMap::root_shift(alpha, beta, root_n, 1)?;
                MapFamily::RootShifts { alpha, beta, root_n }
            }
            MapsSection::HalfPlaneShifts { a, gamma } => {
                HoloMap::half_plane_shift(a, gamma, 1)?;
                MapFamily::HalfPlaneShifts { a, gamma }
            }
            MapsSection::ParabolicDiscs { a, gamma } => {
                HoloMap::parabolic_disc(a, gamma, 1)?;
                MapFamily::ParabolicDiscs { a, gamma }
            }
            MapsSection::DyadicParabolic => dyadic_counterexample(),
        })
    }
}

/// `[exhaustion]`
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum ExhaustionSection {
    /// The domain's default; for root shifts, slit sectors with `C = min{1/2, σ/4}`.
    #[default]
    Standard,
    CenteredDiscs { scale: f64 },
    /// Slit sectors for the configured root shifts; `c` defaults as above.
    SlitSectors { c: Option<f64> },
}

impl ExhaustionSection {
    pub fn build(&self, maps: &MapsSection) -> anyhow::Result<Exhaustion> {
        let family = maps.family()?;
        let domain = family.domain();
        match (self, maps) {
            (ExhaustionSection::Standard, MapsSection::RootShifts { alpha, beta, root_n }) => {
                let c = sigma(*alpha, *beta, DEFAULT_T_MAX)?.c;
                Ok(Exhaustion::slit_sectors(c, *alpha, *beta, *root_n)?)
            }
            (ExhaustionSection::Standard, _) => Ok(Exhaustion::standard(domain)),
            (ExhaustionSection::CenteredDiscs { scale }, _) => {
                ensure!(domain == Domain::WHOLE_PLANE, "centered discs exhaust the whole plane only");
                ensure!(*scale > 0.0, "scale must be positive");
                Ok(Exhaustion { domain, rule: ExhaustionRule::CenteredDiscs { scale: *scale } })
            }
            (ExhaustionSection::SlitSectors { c }, MapsSection::RootShifts { alpha, beta, root_n }) => {
                let c = match c {
                    Some(c) => *c,
                    None => sigma(*alpha, *beta, DEFAULT_T_MAX)?.c,
                };
                Ok(Exhaustion::slit_sectors(c, *alpha, *beta, *root_n)?)
            }
            (ExhaustionSection::SlitSectors { .. }, _) => bail!("slit sectors need maps.family = \"root_shifts\""),
        }
    }
}

/// `[family]`: the separated sets `A(l, ν)`.
#[derive(Clone, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FamilySection {
    /// Number of pairs taken in diagonal order, unless `explicit` is given.
    pub pairs: u64,
    /// `M`
    pub base: u64,
    /// Explicit `[l, ν]` labels.
    pub explicit: Vec<[u64; 2]>,
    /// Defaults to `horizons.n_max`.
    pub horizon: Option<u64>,
}

impl Default for FamilySection {
    fn default() -> Self {
        FamilySection { pairs: 6, base: 8, explicit: vec![], horizon: None }
    }
}

impl FamilySection {
    pub fn build(&self, n_max: u64) -> anyhow::Result<SeparatedFamily> {
        let horizon = self.horizon.unwrap_or(n_max);
        let family = if self.explicit.is_empty() {
            build_separated_family(self.pairs, horizon, self.base)?
        } else {
            let pairs: Vec<(u64, u64)> = self.explicit.iter().map(|p| (p[0], p[1])).collect();
            build_separated_family_for(&pairs, horizon, self.base)?
        };
        Ok(family)
    }
}

/// `[horizons]`
#[derive(Clone, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HorizonsSection {
    pub n_max: u64,
    pub nu_max: u64,
    pub nu_min: u64,
}

impl Default for HorizonsSection {
    fn default() -> Self {
        HorizonsSection { n_max: 2_000, nu_max: 2, nu_min: 1 }
    }
}

/// Everything a stage needs to build a [`RunawayConfig`] and fit.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(default)]
pub struct StageConfig {
    pub maps: MapsSection,
    pub exhaustion: ExhaustionSection,
    pub family: FamilySection,
    pub horizons: HorizonsSection,
    pub fit: PipelineOptions,
}

impl StageConfig {
    pub fn runaway(&self) -> anyhow::Result<RunawayConfig> {
        let h = &self.horizons;
        let family = self.family.build(h.n_max).context("building the separated family")?;
        let cfg = RunawayConfig::from_separated(self.maps.family()?, self.exhaustion.build(&self.maps)?, &family, h.n_max, h.nu_max)?;
        Ok(cfg.with_min_level(h.nu_min)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Config;

    #[test]
    fn defaults_build_the_translation_setup() {
        let s: StageConfig = Config::parse("", &[]).unwrap().get().unwrap();
        let cfg = s.runaway().unwrap();
        assert_eq!(cfg.exhaustion, Exhaustion::standard(Domain::WHOLE_PLANE));
        assert_eq!(cfg.nu_max, 2);
        assert_eq!(s.fit, PipelineOptions::default());
    }

    #[test]
    fn root_shift_exhaustion_takes_c_from_sigma() {
        let s: StageConfig = Config::parse(
            "[maps]\nfamily = \"root_shifts\"\nalpha = 0.0\nbeta = 2.0\n[exhaustion]\nrule = \"slit_sectors\"\n",
            &[],
        )
        .unwrap()
        .get()
        .unwrap();
        let e = s.exhaustion.build(&s.maps).unwrap();
        let ExhaustionRule::SlitSectors { c, beta, .. } = e.rule else { panic!() };
        assert!((c - 0.25).abs() < 1e-6);
        assert_eq!(beta, 2.0);
    }

    #[test]
    fn invalid_exponents_are_config_errors() {
        let s: StageConfig =
            Config::parse("[maps]\nfamily = \"root_shifts\"\nalpha = 1.0\nbeta = 1.5\n", &[]).unwrap().get().unwrap();
        assert!(s.runaway().is_err());
    }
}
