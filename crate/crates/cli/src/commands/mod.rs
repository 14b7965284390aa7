//! One function per subcommand. Each reads its sections from the config and
//! records verdicts and files on the report.

mod examples;
mod stages;

use clap::ValueEnum;
use freqdyn::orbit::OrbitScanReport;
use freqdyn::Complex;
use serde_json::{json, Value};

pub use examples::{conjugated_shift_matrix, disc_inequality};
pub use stages::{BuildKind, CandidateFile};

use crate::config::Config;
use crate::report::{num, Report};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Sigma,
    Example1,
    Example2,
    Example3,
    Example4,
    Example5,
    BuildFhc,
    Scan,
    Density,
    Split,
    Sepfamily,
    Runaway,
}

impl Command {
    pub fn name(self) -> String {
        self.to_possible_value().expect("no skipped variants").get_name().to_string()
    }

    pub fn run(self, cfg: &Config, r: &mut Report) -> anyhow::Result<()> {
        match self {
            Command::Sigma => examples::cmd_sigma(cfg, r),
            Command::Example1 => examples::cmd_example1(cfg, r),
            Command::Example2 => examples::cmd_example2(cfg, r),
            Command::Example3 => examples::cmd_example3(cfg, r),
            Command::Example4 => examples::cmd_example4(cfg, r),
            Command::Example5 => examples::cmd_example5(cfg, r),
            Command::BuildFhc => stages::cmd_build_fhc(cfg, r),
            Command::Scan => stages::cmd_scan(cfg, r),
            Command::Density => stages::cmd_density(cfg, r),
            Command::Split => stages::cmd_split(cfg, r),
            Command::Sepfamily => stages::cmd_sepfamily(cfg, r),
            Command::Runaway => stages::cmd_runaway(cfg, r),
        }
    }
}

pub(crate) fn cx(p: [f64; 2]) -> Complex {
    Complex::new(p[0], p[1])
}

pub(crate) const SCAN_COLUMNS: [&str; 7] = ["nu", "l", "n", "error", "hit", "designed", "prefix_hit_ratio"];

/// One row per `(ν, l, n)`; `prefix_hit_ratio` is `|hits ∩ [1, n]| / n`.
pub(crate) fn scan_rows(report: &OrbitScanReport) -> Vec<Vec<String>> {
    let mut rows = vec![];
    for p in &report.pairs {
        let mut hits = 0u64;
        for &(n, err, hit) in &p.rows {
            hits += hit as u64;
            rows.push(vec![
                p.nu.to_string(),
                p.l.to_string(),
                n.to_string(),
                num(err),
                (hit as u8).to_string(),
                (p.designed.contains(n) as u8).to_string(),
                num(hits as f64 / n as f64),
            ]);
        }
    }
    rows
}

/// The scan report without its per-index rows.
pub(crate) fn scan_summary(report: &OrbitScanReport) -> Value {
    let pairs: Vec<Value> = report
        .pairs
        .iter()
        .map(|p| {
            json!({
                "nu": p.nu,
                "l": p.l,
                "designed": p.designed.elements(),
                "hits": p.hits.len(),
                "burn_in": p.burn_in,
                "max_error_designed": p.max_error_designed,
                "lower_density": p.density.lower_estimate,
                "missed_designed": p.missed_designed,
                "pass": p.pass,
            })
        })
        .collect();
    json!({ "delta": report.delta, "horizon": report.horizon, "pass": report.pass(), "pairs": pairs })
}
