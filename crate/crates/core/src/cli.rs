//! Command-line front end: `polyvf <roots|periodgon|phase|scan|verify|knot>`.
//!
//! Exit codes: 0 on success (computational diagnostics such as a parameter on the
//! parabolic locus are reported in the output), 1 when `verify` finds a failing
//! item, 2 on argument and I/O errors.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::bifscan::{self, ScanConfig, VerifySamples};
use crate::error::Error;
use crate::periodgon::{build_periodgon_with, chord_alphas, horizontal_chords, DomainOptions};
use crate::render::{self, DiskOptions, PeriodgonOptions, PhaseOptions};
use crate::roots::singular_points;
use crate::{Field, Sphere};

#[derive(Debug, Parser)]
#[command(name = "polyvf", version, about = "Periods, periodgons and bifurcations of z' = z (z^k + eps1 z + eps0)")]
struct Cli {
    /// key=value file supplying defaults for any flag.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Singular points, eigenvalues and periods (JSON).
    Roots(Common),
    /// Periodgon, planarity and chords (JSON, or SVG with --format svg).
    Periodgon {
        #[command(flatten)]
        common: Common,
        /// Also write the figure here.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Phase portrait of e^{i delta} P (SVG).
    Phase {
        #[command(flatten)]
        common: Common,
        /// Orbit grid per side.
        #[arg(long)]
        orbits: Option<usize>,
    },
    /// Sweep of the (s, theta) disk (JSONL or CSV).
    Scan {
        #[command(flatten)]
        common: Common,
        /// Also write the disk figure here.
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Theorem checks; exit 1 on a failing item.
    Verify(Common),
    /// Windings of eps along the Delta = 0 curve.
    Knot {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        samples: Option<usize>,
    },
}

#[derive(Debug, Args, Default)]
struct Common {
    #[arg(long)]
    k: Option<usize>,
    /// Complex "re,im".
    #[arg(long, allow_hyphen_values = true)]
    eps1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    eps0: Option<String>,
    #[arg(long)]
    s: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    /// Rotation of the field.
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<f64>,
    /// "NxM" grid.
    #[arg(long)]
    grid: Option<String>,
    /// Rays per periodic domain boundary search.
    #[arg(long)]
    rays: Option<usize>,
    /// Relative integration tolerance.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Jsonl,
    Csv,
    Svg,
}

/// Argument or I/O problem: exit 2.
#[derive(Debug)]
struct Usage(String);

impl From<std::io::Error> for Usage {
    fn from(e: std::io::Error) -> Self {
        Usage(e.to_string())
    }
}

const CONFIG_KEYS: [&str; 15] =
    ["k", "eps1", "eps0", "s", "theta", "alpha", "delta", "grid", "rays", "tol", "out", "format", "jobs", "samples", "orbits"];

fn read_config(path: &Path) -> Result<BTreeMap<String, String>, Usage> {
    let text = std::fs::read_to_string(path).map_err(|e| Usage(format!("{}: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) =
            line.split_once('=').ok_or_else(|| Usage(format!("{}:{}: expected key=value", path.display(), n + 1)))?;
        let key = key.trim().replace('_', "-");
        if !CONFIG_KEYS.contains(&key.as_str()) {
            return Err(Usage(format!("{}:{}: unknown key {key}", path.display(), n + 1)));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

fn fill<T: std::str::FromStr>(slot: &mut Option<T>, cfg: &BTreeMap<String, String>, key: &str) -> Result<(), Usage> {
    if slot.is_none() {
        if let Some(v) = cfg.get(key) {
            *slot = Some(v.parse().map_err(|_| Usage(format!("config: bad value for {key}: {v}")))?);
        }
    }
    Ok(())
}

impl Common {
    fn merge(&mut self, cfg: &BTreeMap<String, String>) -> Result<(), Usage> {
        fill(&mut self.k, cfg, "k")?;
        fill(&mut self.eps1, cfg, "eps1")?;
        fill(&mut self.eps0, cfg, "eps0")?;
        fill(&mut self.s, cfg, "s")?;
        fill(&mut self.theta, cfg, "theta")?;
        fill(&mut self.alpha, cfg, "alpha")?;
        fill(&mut self.delta, cfg, "delta")?;
        fill(&mut self.grid, cfg, "grid")?;
        fill(&mut self.rays, cfg, "rays")?;
        fill(&mut self.tol, cfg, "tol")?;
        fill(&mut self.out, cfg, "out")?;
        if self.format.is_none() {
            if let Some(v) = cfg.get("format") {
                self.format = Some(Format::from_str(v, true).map_err(|_| Usage(format!("config: bad format {v}")))?);
            }
        }
        Ok(())
    }

    fn k(&self) -> Result<usize, Usage> {
        match self.k {
            Some(k) if k >= 2 => Ok(k),
            Some(k) => Err(Usage(format!("--k must be at least 2, got {k}"))),
            None => Err(Usage("--k is required".into())),
        }
    }

    /// Field from exactly one of the eps pair and the sphere coordinates.
    fn field(&self) -> Result<Field, Usage> {
        let k = self.k()?;
        let by_eps = self.eps1.is_some() || self.eps0.is_some();
        let by_sphere = self.s.is_some() || self.theta.is_some() || self.alpha.is_some();
        let f = match (by_eps, by_sphere) {
            (true, true) => return Err(Usage("give either --eps1/--eps0 or --s/--theta/--alpha, not both".into())),
            (false, false) => return Err(Usage("parameters missing: --eps1/--eps0 or --s/--theta/--alpha".into())),
            (true, false) => {
                let e1 = parse_complex(self.eps1.as_deref().unwrap_or("0"))?;
                let e0 = parse_complex(self.eps0.as_deref().unwrap_or("0"))?;
                Field::new(k, e1, e0)
            }
            (false, true) => {
                let s = self.s.ok_or_else(|| Usage("--s is required with sphere coordinates".into()))?;
                if !(0.0..=1.0).contains(&s) {
                    return Err(Usage(format!("--s must lie in [0, 1], got {s}")));
                }
                Field::from_sphere(Sphere::new(s, self.theta.unwrap_or(0.0), self.alpha.unwrap_or(0.0)), k)
            }
        };
        f.map_err(|e| Usage(e.to_string()))
    }

    fn grid(&self) -> Result<Option<(usize, usize)>, Usage> {
        let Some(g) = &self.grid else { return Ok(None) };
        let bad = || Usage(format!("--grid expects NxM, got {g}"));
        let (a, b) = g.split_once(['x', 'X']).ok_or_else(bad)?;
        let (a, b): (usize, usize) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
        if a == 0 || b == 0 {
            return Err(bad());
        }
        Ok(Some((a, b)))
    }

    fn tol(&self) -> Result<Option<f64>, Usage> {
        match self.tol {
            Some(t) if !(t > 0.0 && t < 1.0) => Err(Usage(format!("--tol must lie in (0, 1), got {t}"))),
            t => Ok(t),
        }
    }

    /// Domain options with `--rays` and `--tol` applied.
    fn domain(&self, base: DomainOptions) -> Result<DomainOptions, Usage> {
        let mut d = base;
        if let Some(r) = self.rays {
            d.rays = r;
        }
        if let Some(t) = self.tol()? {
            d.loop_controls.rtol = t;
            d.loop_controls.atol = 1e-2 * t;
            d.controls.rtol = t;
            d.controls.atol = 1e-2 * t;
        }
        Ok(d)
    }
}

fn parse_complex(s: &str) -> Result<Complex64, Usage> {
    let bad = || Usage(format!("expected a complex number \"re,im\", got {s:?}"));
    let mut parts = s.split(',');
    let re: f64 = parts.next().ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
    let im: f64 = match parts.next() {
        Some(p) => p.trim().parse().map_err(|_| bad())?,
        None => 0.0,
    };
    if parts.next().is_some() || !re.is_finite() || !im.is_finite() {
        return Err(bad());
    }
    Ok(Complex64::new(re, im))
}

fn c(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn error_value(e: &Error) -> Value {
    let kind = format!("{e:?}");
    let kind = kind.split([' ', '{', '(']).next().unwrap_or("Error").to_string();
    json!({ "error": kind, "message": e.to_string() })
}

fn emit(text: &str, out: Option<&Path>, stdout: &mut dyn Write) -> Result<(), Usage> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Usage(format!("{}: {e}", p.display()))),
        None => Ok(stdout.write_all(text.as_bytes())?),
    }
}

fn emit_json(v: &Value, out: Option<&Path>, stdout: &mut dyn Write) -> Result<(), Usage> {
    let mut text = serde_json::to_string_pretty(v).expect("json");
    text.push('\n');
    emit(&text, out, stdout)
}

fn field_value(f: &Field) -> Value {
    let sphere = f.to_sphere().ok().map(|(c, r)| json!({ "s": c.s, "theta": c.theta, "alpha": c.alpha, "norm": r }));
    json!({
        "k": f.k(),
        "eps1": c(f.eps1),
        "eps0": c(f.eps0),
        "sphere": sphere,
        "discriminant": c(f.discriminant()),
        "near_parabolic": f.near_parabolic(),
    })
}

fn cmd_roots(a: &Common, stdout: &mut dyn Write) -> Result<i32, Usage> {
    let f = a.field()?;
    let points: Vec<Value> = singular_points(&f)
        .iter()
        .map(|p| {
            json!({
                "index": p.index,
                "location": c(p.location),
                "multiplicity": p.multiplicity,
                "eigenvalue": p.eigenvalue.map(c),
                "period": p.period.map(c),
            })
        })
        .collect();
    let mut v = field_value(&f);
    v["points"] = Value::Array(points);
    emit_json(&v, a.out.as_deref(), stdout)?;
    Ok(0)
}

fn cmd_periodgon(a: &Common, svg: Option<&Path>, stdout: &mut dyn Write) -> Result<i32, Usage> {
    let f = a.field()?;
    let opts = a.domain(DomainOptions::default().loops_only())?;
    let mut v = field_value(&f);
    match build_periodgon_with(&f, &opts) {
        Ok((p, domains)) => {
            let figure = render::periodgon_figure(&p, &PeriodgonOptions::default());
            if let Some(path) = svg {
                emit(&figure, Some(path), stdout)?;
            }
            if a.format == Some(Format::Svg) {
                emit(&figure, a.out.as_deref(), stdout)?;
                return Ok(0);
            }
            v["periodgon"] = serde_json::to_value(&p).expect("json");
            v["domains"] = serde_json::to_value(&domains).expect("json");
            v["horizontal_chords"] = match horizontal_chords(&p) {
                Ok(ch) => serde_json::to_value(ch).expect("json"),
                Err(e) => error_value(&e),
            };
            v["chord_alphas"] = match chord_alphas(&p, f.k()) {
                Ok(list) => Value::Array(
                    list.iter().map(|(ch, al)| json!({ "vertices": [ch.vertices.0, ch.vertices.1], "alphas": al })).collect(),
                ),
                Err(e) => error_value(&e),
            };
        }
        Err(e) => v["diagnostic"] = error_value(&e),
    }
    emit_json(&v, a.out.as_deref(), stdout)?;
    Ok(0)
}

fn cmd_phase(a: &Common, orbits: Option<usize>, stdout: &mut dyn Write) -> Result<i32, Usage> {
    let f = a.field()?;
    let mut opts = PhaseOptions::default();
    if let Some(n) = orbits {
        opts.grid = n;
    }
    if let Some(t) = a.tol()? {
        opts.separatrix_controls.rtol = t;
        opts.separatrix_controls.atol = 1e-2 * t;
    }
    match render::phase_portrait(&f, a.delta.unwrap_or(0.0), &opts) {
        Ok(svg) => emit(&svg, a.out.as_deref(), stdout)?,
        Err(e) => emit_json(&error_value(&e), a.out.as_deref(), stdout)?,
    }
    Ok(0)
}

fn cmd_scan(a: &Common, svg: Option<&Path>, jobs: Option<usize>, stdout: &mut dyn Write) -> Result<i32, Usage> {
    let k = a.k()?;
    let mut cfg = ScanConfig::new(k);
    if let Some((n, m)) = a.grid()? {
        cfg = cfg.grid(n, m);
    }
    cfg.domain = a.domain(cfg.domain)?;
    if jobs == Some(0) {
        return Err(Usage("--jobs must be positive".into()));
    }
    cfg.jobs = jobs;
    cfg.validate().map_err(|e| Usage(e.to_string()))?;
    let events = bifscan::scan_disk(&cfg).map_err(|e| Usage(e.to_string()))?;
    let text = match a.format.unwrap_or(Format::Jsonl) {
        Format::Json | Format::Jsonl => bifscan::to_jsonl(&events),
        Format::Csv => bifscan::to_csv(&events).map_err(|e| Usage(e.to_string()))?,
        Format::Svg => render::bifurcation_disk(&events, k, &DiskOptions::default()).map_err(|e| Usage(e.to_string()))?,
    };
    emit(&text, a.out.as_deref(), stdout)?;
    if let Some(path) = svg {
        let disk = render::bifurcation_disk(&events, k, &DiskOptions::default()).map_err(|e| Usage(e.to_string()))?;
        emit(&disk, Some(path), stdout)?;
    }
    Ok(0)
}

fn cmd_verify(a: &Common, stdout: &mut dyn Write) -> Result<i32, Usage> {
    let k = a.k()?;
    if k < 3 {
        return Err(Usage("verify needs --k >= 3".into()));
    }
    let mut samples = VerifySamples::default();
    samples.domain = a.domain(samples.domain)?;
    if let Some((n, _)) = a.grid()? {
        samples.grid = n;
    }
    let report = bifscan::verify_theorems(k, &samples).map_err(|e| Usage(e.to_string()))?;
    let mut v = serde_json::to_value(&report).expect("json");
    v["passed"] = json!(report.passed());
    emit_json(&v, a.out.as_deref(), stdout)?;
    Ok(if report.passed() { 0 } else { 1 })
}

fn cmd_knot(a: &Common, samples: Option<usize>, stdout: &mut dyn Write) -> Result<i32, Usage> {
    let k = a.k()?;
    let n = samples.unwrap_or(64 * k);
    let d = bifscan::knot_diagnostics(k, n).map_err(|e| Usage(e.to_string()))?;
    let mut v = serde_json::to_value(d).expect("json");
    v["k"] = json!(k);
    v["samples"] = json!(n);
    emit_json(&v, a.out.as_deref(), stdout)?;
    Ok(0)
}

fn dispatch(cli: Cli, stdout: &mut dyn Write) -> Result<i32, Usage> {
    let cfg = match &cli.config {
        Some(p) => read_config(p)?,
        None => BTreeMap::new(),
    };
    let extra = |key: &str, v: Option<usize>| -> Result<Option<usize>, Usage> {
        let mut v = v;
        fill(&mut v, &cfg, key)?;
        Ok(v)
    };
    match cli.cmd {
        Cmd::Roots(mut a) => {
            a.merge(&cfg)?;
            cmd_roots(&a, stdout)
        }
        Cmd::Periodgon { common: mut a, svg } => {
            a.merge(&cfg)?;
            cmd_periodgon(&a, svg.as_deref(), stdout)
        }
        Cmd::Phase { common: mut a, orbits } => {
            a.merge(&cfg)?;
            cmd_phase(&a, extra("orbits", orbits)?, stdout)
        }
        Cmd::Scan { common: mut a, svg, jobs } => {
            a.merge(&cfg)?;
            cmd_scan(&a, svg.as_deref(), extra("jobs", jobs)?, stdout)
        }
        Cmd::Verify(mut a) => {
            a.merge(&cfg)?;
            cmd_verify(&a, stdout)
        }
        Cmd::Knot { common: mut a, samples } => {
            a.merge(&cfg)?;
            cmd_knot(&a, extra("samples", samples)?, stdout)
        }
    }
}

/// Runs the command line `argv` (program name first), writing results to `stdout`
/// unless `--out` is given. Returns the exit code.
pub fn run_with<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let text = e.render().to_string();
            let _ = if code == 0 { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli, stdout) {
        Ok(code) => code,
        Err(Usage(msg)) => {
            let _ = writeln!(stderr, "polyvf: {msg}");
            2
        }
    }
}

/// [`run_with`] on the process streams.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    run_with(argv, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}
