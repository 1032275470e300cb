//! Divergence demonstrations for locked and unlocked Gauss-Seidel.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use dsgs::solvers::divergence::{
    example1_min_coordinate, example2_random_growth, example2_spectral_radii, Example2Matrices,
};
use dsgs::solvers::SorVariant;

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DemoKind {
    Example1,
    Example2Random,
    Example2Spectral,
}

impl DemoKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "example1" => Some(DemoKind::Example1),
            "example2-random" => Some(DemoKind::Example2Random),
            "example2-spectral" => Some(DemoKind::Example2Spectral),
            _ => None,
        }
    }
}

pub struct DemoOutput {
    pub summary: String,
    pub csv: String,
    /// Whether the demonstrated property held.
    pub holds: bool,
}

/// Trace rows kept for the example-2 random walk.
const GROWTH_RECORD_EVERY: usize = 100;

pub fn demo_divergence(kind: DemoKind, tau: f64, alpha: f64, steps: usize, seed: u64) -> Result<DemoOutput> {
    let mut summary = String::new();
    let mut csv = String::new();
    let holds;
    match kind {
        DemoKind::Example1 => {
            let variants = SorVariant::all(2);
            let reports = variants
                .iter()
                .map(|v| example1_min_coordinate(tau, alpha, v, steps, seed))
                .collect::<dsgs::Result<Vec<_>>>()?;
            holds = reports.iter().all(|r| r.never_below_initial);
            writeln!(summary, "example1 tau={tau} alpha={alpha} steps={steps} x0=(1,1)").unwrap();
            for r in &reports {
                let last = r.log_min.last().copied().unwrap_or(0.0);
                writeln!(
                    summary,
                    "  {:<22} min coordinate never below initial: {}  final ln min(x) = {last:.6}",
                    r.variant, r.never_below_initial
                )
                .unwrap();
            }
            csv.push_str("step");
            for r in &reports {
                write!(csv, ",{}", r.variant).unwrap();
            }
            csv.push('\n');
            for k in 0..=steps {
                write!(csv, "{k}").unwrap();
                for r in &reports {
                    write!(csv, ",{}", r.log_min[k]).unwrap();
                }
                csv.push('\n');
            }
        }
        DemoKind::Example2Random => {
            let g = example2_random_growth(tau, alpha, steps, seed, GROWTH_RECORD_EVERY)?;
            holds = g.slope > 0.0;
            writeln!(
                summary,
                "example2-random tau={tau} alpha={alpha} steps={steps}: fitted slope of ln||x|| per step = {:.6e}",
                g.slope
            )
            .unwrap();
            csv.push_str("step,log_norm\n");
            for (k, v) in &g.log_norms {
                writeln!(csv, "{k},{v}").unwrap();
            }
        }
        DemoKind::Example2Spectral => {
            let radii = example2_spectral_radii(tau, alpha, Example2Matrices::Published)?;
            holds = radii.iter().all(|(_, r)| *r > 1.0);
            let above = radii.iter().filter(|(_, r)| *r > 1.0).count();
            writeln!(
                summary,
                "example2-spectral tau={tau} alpha={alpha}: {above} of {} orderings have spectral radius > 1",
                radii.len()
            )
            .unwrap();
            csv.push_str("ordering,spectral_radius\n");
            for (p, r) in &radii {
                let name: Vec<String> = p.iter().map(|k| format!("B{}", k + 1)).collect();
                writeln!(summary, "  {}  {r:.12}", name.join(" then ")).unwrap();
                writeln!(csv, "{},{r}", name.join(">")).unwrap();
            }
        }
    }
    Ok(DemoOutput { summary, csv, holds })
}
