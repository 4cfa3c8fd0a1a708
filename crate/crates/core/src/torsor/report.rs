//! Cross-checks between the two pipelines, growth tables and CSV output.

use std::collections::BTreeSet;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::brute::brute_force_count;
use super::enumerate::{torsor_count, torsor_points};
use super::points::{torsor_to_point, SurfacePoint, TorsorPoint};
use crate::error::Result;

/// Outcome of comparing the torsor image with the directly enumerated points.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BijectionReport {
    pub height: u64,
    pub torsor_points: u64,
    pub surface_points: u64,
    /// Torsor points whose image coincides with an earlier one.
    pub collisions: Vec<String>,
    /// Images of height above the bound, or failures of the map.
    pub bad_images: Vec<String>,
    /// Surface points not hit by any torsor point.
    pub missed: Vec<String>,
}

impl BijectionReport {
    pub fn is_bijection(&self) -> bool {
        self.collisions.is_empty() && self.bad_images.is_empty() && self.missed.is_empty()
            && self.torsor_points == self.surface_points
    }
}

pub fn bijection_check(b: u64) -> Result<BijectionReport> {
    let direct = brute_force_count(b, false, true)?.points.unwrap_or_default();
    let torsor = torsor_points(b)?;
    let mut report = BijectionReport {
        height: b,
        torsor_points: torsor.len() as u64,
        surface_points: direct.len() as u64,
        ..Default::default()
    };
    let mut image = BTreeSet::new();
    for t in &torsor {
        match torsor_to_point(t) {
            Ok(p) if p.height() > b as u128 => report.bad_images.push(format!("{t:?} -> {p} above height {b}")),
            Ok(p) => {
                if !image.insert(p) {
                    report.collisions.push(format!("{t:?} -> {p}"));
                }
            }
            Err(e) => report.bad_images.push(e.to_string()),
        }
    }
    let direct: BTreeSet<SurfacePoint> = direct.into_iter().collect();
    report.missed = direct.difference(&image).map(|p| p.to_string()).collect();
    report.bad_images.extend(image.difference(&direct).map(|p| format!("{p} not found directly")));
    Ok(report)
}

/// One line of the growth table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticRow {
    pub height: u64,
    pub count: u64,
    /// `N(B) / (B log(B)^6)`
    pub normalized: f64,
    /// `normalized / c_VH`
    pub ratio: f64,
}

/// Convergence towards the leading constant is like `1 / (log log B)^(1/6)`,
/// so at heights that can be enumerated the ratio is only meaningful up to a
/// modest constant factor.
pub const ASYMPTOTIC_NOTE: &str = "N(B)/(B log(B)^6) approaches c_VH only at rate (log log B)^(-1/6); \
     ratios at enumerable heights indicate the order of magnitude, not the limit";

pub fn asymptotic_report(heights: &[u64], c_vh: f64) -> Result<Vec<AsymptoticRow>> {
    heights
        .iter()
        .map(|&b| {
            let count = torsor_count(b)?;
            let normalized = count as f64 / (b as f64 * (b as f64).ln().powi(6));
            Ok(AsymptoticRow { height: b, count, normalized, ratio: normalized / c_vh })
        })
        .collect()
}

/// Writes points as CSV with header `x0,x1,x2,x3`, sorted.
pub fn write_points_csv(points: &[SurfacePoint], mut out: impl Write) -> Result<()> {
    let mut sorted = points.to_vec();
    sorted.sort_unstable();
    writeln!(out, "x0,x1,x2,x3")?;
    for p in sorted {
        let [a, b, c, d] = p.x;
        writeln!(out, "{a},{b},{c},{d}")?;
    }
    Ok(())
}

/// Writes torsor points as CSV with header `eta1,...,eta10`, sorted.
pub fn write_torsor_csv(points: &[TorsorPoint], mut out: impl Write) -> Result<()> {
    let mut sorted = points.to_vec();
    sorted.sort_unstable();
    let header: Vec<String> = (1..=10).map(|i| format!("eta{i}")).collect();
    writeln!(out, "{}", header.join(","))?;
    for p in sorted {
        let row: Vec<String> = p.coordinates().iter().map(|c| c.to_string()).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}
