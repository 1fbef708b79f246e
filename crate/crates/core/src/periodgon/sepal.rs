//! Sepal zones of a parabolic point. Each zone reaches infinity through one
//! sector between consecutive separatrix directions, and is bounded by the two
//! separatrices of that sector, so a sector is sepal exactly when both of its
//! separatrices end at the parabolic point.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::flow::{trace_separatrix_with, Controls, Events, FlowContext, Termination};
use crate::roots::SingularPoint;
use crate::Field;

const NUDGE: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct SepalOptions {
    /// Landing radius as a fraction of the distance to the nearest other point.
    pub radius_fraction: f64,
    pub delta: f64,
    pub controls: Controls,
}

impl Default for SepalOptions {
    fn default() -> Self {
        Self { radius_fraction: 1e-3, delta: 0.0, controls: Controls { max_steps: 20_000, ..Controls::default() }.unrecorded() }
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SepalReport {
    pub parabolic_location: (f64, f64),
    pub codim: usize,
    /// Rotation the sectors were read in.
    pub delta: f64,
    pub zone_count: usize,
    /// Sepal sectors at infinity; sector `n` lies between separatrix directions `n` and `n + 1`.
    pub sector_indices: Vec<usize>,
    /// Non sepal sectors strictly between the two sepal sectors, both ways round (codim 1 only).
    pub gap_counts: Option<(usize, usize)>,
}

/// Indices `n` with both `landed[n]` and `landed[n + 1]`, circularly.
fn sepal_sectors(landed: &[bool]) -> Vec<usize> {
    let n = landed.len();
    (0..n).filter(|&m| landed[m] && landed[(m + 1) % n]).collect()
}

pub fn sepal_zones(f: &Field, p: &SingularPoint<f64>) -> Result<SepalReport> {
    sepal_zones_with(f, p, &SepalOptions::default())
}

pub fn sepal_zones_with(f: &Field, p: &SingularPoint<f64>, opts: &SepalOptions) -> Result<SepalReport> {
    if p.is_simple() {
        return Err(Error::NotParabolic);
    }
    let ctx = FlowContext::new(*f, opts.delta);
    let target = ctx
        .points
        .iter()
        .min_by(|a, b| (a.location - p.location).norm().total_cmp(&(b.location - p.location).norm()))
        .map(|q| q.index)
        .ok_or(Error::NotParabolic)?;
    let nearest = ctx
        .points
        .iter()
        .filter(|q| q.index != target)
        .map(|q| (q.location - p.location).norm())
        .fold(f64::INFINITY, f64::min);
    let reach = if nearest.is_finite() { nearest } else { ctx.scale };
    let ev = Events { landing_override: vec![(target, opts.radius_fraction * reach)], ..Events::default().no_escape() };
    let ends = |delta: f64| {
        let c = FlowContext::new(*f, delta);
        (0..2 * f.k())
            .into_par_iter()
            .map(|n| Ok(trace_separatrix_with(&c, n, &opts.controls, &ev)?.trajectory.termination))
            .collect::<Result<Vec<Termination>>>()
    };
    // A separatrix undecided at `delta` usually lies on a center's loop through
    // infinity; the nearby rotation `delta + NUDGE` has the same sepal sectors.
    let mut delta = opts.delta;
    let mut end = ends(delta)?;
    if end.contains(&Termination::TimeBudgetExhausted) {
        delta += NUDGE;
        end = ends(delta)?;
    }
    let landed: Vec<bool> = end.iter().map(|t| *t == Termination::LandedAtPoint(target)).collect();
    let sector_indices = sepal_sectors(&landed);
    let k2 = 2 * f.k();
    let gap_counts = match (p.codim(), sector_indices.as_slice()) {
        (1, &[a, b]) => {
            let m1 = b - a - 1;
            Some((m1, k2 - 2 - m1))
        }
        _ => None,
    };
    Ok(SepalReport {
        parabolic_location: (p.location.re, p.location.im),
        codim: p.codim(),
        delta,
        zone_count: sector_indices.len(),
        sector_indices,
        gap_counts,
    })
}
