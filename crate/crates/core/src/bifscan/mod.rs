//! Sweeps of the parameter sphere: bifurcation events over the `(s, theta)` disk
//! and along `alpha`-fibers, parabolic loci, theorem checks and persistence.

mod io;
mod knot;
mod verify;

pub use io::{format_f64, to_csv, to_jsonl, write_csv, write_jsonl};
pub use knot::{knot_diagnostics, KnotDiagnostics};
pub use verify::{verify_theorems, TheoremItem, TheoremReport, VerifySamples};

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::periodgon::{build_periodgon_with, chord_alphas, domain_in, DomainOptions, Periodgon, PeriodicDomain};
use crate::flow::FlowContext;
use crate::{Field, Sphere};

#[derive(Debug, Clone, PartialEq)]
pub enum EventKind {
    /// An interior chord of the periodgon becomes horizontal at `alpha_star`.
    /// `vertices` are the chord ends, `centers` the points whose edges start there.
    HomoclinicChord { centers: (usize, usize), vertices: (usize, usize), alpha_star: f64 },
    MultiLoop { center: usize, loop_count: usize },
    /// Grid node inside the discriminant guard band, or a point of the `Delta = 0` locus.
    ParabolicDelta,
    /// The `eps0 = 0` circle `s = 0`.
    ParabolicEps0,
    /// A node that could not be processed, or a non-planar periodgon.
    Diagnostic { message: String },
}

impl EventKind {
    pub fn name(&self) -> &'static str {
        match self {
            EventKind::HomoclinicChord { .. } => "HomoclinicChord",
            EventKind::MultiLoop { .. } => "MultiLoop",
            EventKind::ParabolicDelta => "ParabolicDelta",
            EventKind::ParabolicEps0 => "ParabolicEps0",
            EventKind::Diagnostic { .. } => "Diagnostic",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BifurcationEvent {
    pub kind: EventKind,
    pub k: usize,
    pub coords: Sphere,
    pub diagnostics: BTreeMap<String, f64>,
}

impl BifurcationEvent {
    fn new(kind: EventKind, k: usize, coords: Sphere) -> Self {
        Self { kind, k, coords, diagnostics: BTreeMap::new() }
    }

    fn with(mut self, key: &str, v: f64) -> Self {
        self.diagnostics.insert(key.to_string(), v);
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanConfig {
    pub k: usize,
    /// Grid nodes in `s` (endpoints included) and `theta` (upper end excluded).
    pub s_steps: usize,
    pub theta_steps: usize,
    pub s_range: (f64, f64),
    pub theta_range: (f64, f64),
    /// Chord events are kept for `alpha_star` in this half-open window.
    pub alpha_range: (f64, f64),
    pub domain: DomainOptions,
    /// Width to which multi-loop loci are localized in `theta`; `0` disables refinement.
    pub refine_tol: f64,
    /// Worker threads; `None` uses the global pool.
    pub jobs: Option<usize>,
}

impl ScanConfig {
    /// 64 x 64 nodes over `[0.02, 0.98] x [0, 2pi/(k-1))`.
    pub fn new(k: usize) -> Self {
        Self {
            k,
            s_steps: 64,
            theta_steps: 64,
            s_range: (0.02, 0.98),
            theta_range: (0.0, TAU / (k.max(2) - 1) as f64),
            alpha_range: (0.0, TAU),
            domain: DomainOptions::scan().loops_only(),
            refine_tol: 1e-4,
            jobs: None,
        }
    }

    pub fn grid(mut self, s_steps: usize, theta_steps: usize) -> Self {
        self.s_steps = s_steps;
        self.theta_steps = theta_steps;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if self.k < 2 {
            return Err(Error::InvalidDegree(self.k));
        }
        if self.s_steps < 2 || self.theta_steps < 2 {
            return bad("grid resolution must be at least 2 in each direction");
        }
        if !(self.refine_tol >= 0.0) || !(self.domain.radius_tol > 0.0) || !(self.domain.closure_tol > 0.0) {
            return bad("tolerances must be positive");
        }
        if self.s_range.0 > self.s_range.1 || self.theta_range.0 >= self.theta_range.1 {
            return bad("empty parameter range");
        }
        if self.alpha_range.0 >= self.alpha_range.1 {
            return bad("empty alpha window");
        }
        Ok(())
    }

    /// Node coordinates in row-major order (`s` rows, `theta` columns).
    pub fn nodes(&self) -> Vec<(f64, f64)> {
        let (s0, s1) = self.s_range;
        let (t0, t1) = self.theta_range;
        let mut out = Vec::with_capacity(self.s_steps * self.theta_steps);
        for i in 0..self.s_steps {
            let s = s0 + (s1 - s0) * i as f64 / (self.s_steps - 1) as f64;
            for j in 0..self.theta_steps {
                out.push((s, t0 + (t1 - t0) * j as f64 / self.theta_steps as f64));
            }
        }
        out
    }

    fn theta_step(&self) -> f64 {
        (self.theta_range.1 - self.theta_range.0) / self.theta_steps as f64
    }
}

/// Loop count of `z_j` at `(s, theta, 0)`.
pub fn loop_count_at(k: usize, s: f64, theta: f64, j: usize, opts: &DomainOptions) -> Result<usize> {
    let f = Field::from_sphere(Sphere::new(s, theta, 0.0), k)?;
    if f.near_parabolic() {
        return Err(Error::NearParabolic { discriminant: f.discriminant().norm() });
    }
    Ok(domain_in(&FlowContext::new(f, 0.0), j, opts)?.loop_count)
}

/// Nearest theorem ray `2 pi j/(k-1)` or `(2j-1) pi/(k-1)` to `theta`.
pub fn nearest_theorem_ray(k: usize, theta: f64) -> f64 {
    let h = PI / (k - 1) as f64;
    (theta / h).round() * h
}

/// Extent of the multi-loop set of `z_j` around `theta`, bisected to `tol` in each
/// direction up to one grid step `h`.
fn refine_locus(k: usize, s: f64, theta: f64, j: usize, h: f64, cfg: &ScanConfig) -> (f64, f64) {
    let multi = |t: f64| loop_count_at(k, s, t, j, &cfg.domain).is_ok_and(|n| n > 1);
    let side = |dir: f64| {
        if multi(theta + dir * h) {
            return h;
        }
        let (mut lo, mut hi) = (0.0, h);
        while hi - lo > cfg.refine_tol {
            let mid = 0.5 * (lo + hi);
            if multi(theta + dir * mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    };
    let minus = side(-1.0);
    (theta - minus, theta + side(1.0))
}

fn node_events(cfg: &ScanConfig, s: f64, theta: f64) -> Vec<BifurcationEvent> {
    let k = cfg.k;
    let at = Sphere::new(s, theta, 0.0);
    let f = match Field::from_sphere(at, k) {
        Ok(f) => f,
        Err(e) => return vec![diagnostic(k, at, &e)],
    };
    if f.near_parabolic() {
        return vec![BifurcationEvent::new(EventKind::ParabolicDelta, k, at).with("discriminant", f.discriminant().norm())];
    }
    let (p, domains) = match build_periodgon_with(&f, &cfg.domain) {
        Ok(r) => r,
        Err(e) => return vec![diagnostic(k, at, &e)],
    };
    let mut out = multi_loop_events(cfg, s, theta, &domains);
    out.extend(chord_events(cfg, at, &p));
    out
}

fn multi_loop_events(cfg: &ScanConfig, s: f64, theta: f64, domains: &[PeriodicDomain]) -> Vec<BifurcationEvent> {
    let k = cfg.k;
    domains
        .iter()
        .filter(|d| d.loop_count > 1)
        .map(|d| {
            let ray = nearest_theorem_ray(k, theta);
            let mut e = BifurcationEvent::new(
                EventKind::MultiLoop { center: d.center_index, loop_count: d.loop_count },
                k,
                Sphere::new(s, theta, 0.0),
            )
            .with("access_angle", d.access_angle)
            .with("nearest_ray", ray);
            if cfg.refine_tol > 0.0 {
                let (lo, hi) = refine_locus(k, s, theta, d.center_index, cfg.theta_step(), cfg);
                e = e.with("theta_lo", lo).with("theta_hi", hi);
            }
            e
        })
        .collect()
}

fn chord_events(cfg: &ScanConfig, at: Sphere, p: &Periodgon) -> Vec<BifurcationEvent> {
    let k = cfg.k;
    let chords = match chord_alphas(p, k) {
        Ok(c) => c,
        Err(e) => {
            let mut d = diagnostic(k, at, &e);
            d.diagnostics.insert("closure_defect".into(), p.closure_defect());
            return vec![d];
        }
    };
    let n = p.edges.len();
    let mut out = Vec::new();
    for (c, alphas) in chords {
        let (i, j) = c.vertices;
        let centers = (p.edges[i].center_index, p.edges[j % n].center_index);
        for a in alphas {
            if a < cfg.alpha_range.0 || a >= cfg.alpha_range.1 {
                continue;
            }
            out.push(
                BifurcationEvent::new(
                    EventKind::HomoclinicChord { centers, vertices: c.vertices, alpha_star: a },
                    k,
                    Sphere::new(at.s, at.theta, a),
                )
                .with("chord_length", c.vec().norm()),
            );
        }
    }
    out.sort_by(|a, b| a.coords.alpha.total_cmp(&b.coords.alpha));
    out
}

fn diagnostic(k: usize, at: Sphere, e: &Error) -> BifurcationEvent {
    BifurcationEvent::new(EventKind::Diagnostic { message: e.to_string() }, k, at)
}

/// Events of every grid node, in row-major node order and then by increasing `alpha`.
/// Failing nodes yield a `Diagnostic` event instead of aborting the sweep.
pub fn scan_disk(cfg: &ScanConfig) -> Result<Vec<BifurcationEvent>> {
    cfg.validate()?;
    let nodes = cfg.nodes();
    let run = || nodes.par_iter().map(|&(s, t)| node_events(cfg, s, t)).collect::<Vec<_>>();
    let per_node = match cfg.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::InvalidConfig(e.to_string()))?
            .install(run),
        None => run(),
    };
    Ok(per_node.into_iter().flatten().collect())
}

/// The `s = 0` circle and the `k - 1` points `(1/2, 2 pi j/(k-1))` where `Delta` vanishes.
pub fn parabolic_loci(k: usize) -> Result<Vec<BifurcationEvent>> {
    if k < 2 {
        return Err(Error::InvalidDegree(k));
    }
    let mut out = vec![BifurcationEvent::new(EventKind::ParabolicEps0, k, Sphere::new(0.0, 0.0, 0.0))];
    for j in 0..k - 1 {
        let at = Sphere::new(0.5, TAU * j as f64 / (k - 1) as f64, 0.0);
        let f = Field::from_sphere(at, k)?;
        out.push(BifurcationEvent::new(EventKind::ParabolicDelta, k, at).with("discriminant", f.discriminant().norm()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roots::singular_points;

    #[test]
    fn parabolic_loci_are_double_roots() {
        for k in 2..=5 {
            let ev = parabolic_loci(k).unwrap();
            assert_eq!(ev.len(), k);
            assert_eq!(ev[0].kind, EventKind::ParabolicEps0);
            assert_eq!(ev[0].coords.s, 0.0);
            for e in &ev[1..] {
                assert!(e.diagnostics["discriminant"] < 1e-10);
                let f = Field::from_sphere(e.coords, k).unwrap();
                assert!(singular_points(&f).iter().any(|p| p.multiplicity == 2));
            }
        }
        let t: Vec<f64> = parabolic_loci(4).unwrap()[1..].iter().map(|e| e.coords.theta).collect();
        for (a, b) in t.iter().zip([0.0, TAU / 3.0, 2.0 * TAU / 3.0]) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn config_validation() {
        assert!(ScanConfig::new(4).validate().is_ok());
        assert!(ScanConfig::new(4).grid(1, 8).validate().is_err());
        let mut c = ScanConfig::new(4);
        c.refine_tol = -1.0;
        assert!(c.validate().is_err());
        let n = ScanConfig::new(3).grid(3, 4).nodes();
        assert_eq!(n.len(), 12);
        assert_eq!(n[0], (0.02, 0.0));
        assert_eq!(n[4].0, 0.5);
        assert!((n[3].1 - 0.75 * PI).abs() < 1e-15);
    }

    #[test]
    fn theorem_rays() {
        assert!((nearest_theorem_ray(4, 1.0) - PI / 3.0).abs() < 1e-15);
        assert_eq!(nearest_theorem_ray(5, 0.1), 0.0);
    }
}
