//! Command-line configuration and data emission.
//!
//! Options come from an optional `key = value` config file (`#` starts a
//! comment) and from flags; flags win. Numbers in CSV output carry nine
//! significant digits, rows end in `\n` and a header is always written.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use crate::free_boundary::{free_boundary, region_areas, FreeBoundary};
use crate::grid::{minimize, ContinuationSchedule, DiscreteDomain, DomainKind, MinimizeOutcome, NodeKind};
use crate::radial::{minimize_energy, nonuniqueness_level, MinimizerBranch, RadialSolution};
use crate::verification::{run_suite, SuiteConfig};
use crate::{Error, Result};

/// Directory for `grid` and `verify` output when `--output` is absent.
pub const OUT_DIR_ENV: &str = "BIHARM_OUT_DIR";
pub const MIN_PROFILE_SAMPLES: usize = 1000;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_CHECK_FAILED: i32 = 2;
pub const EXIT_NOT_CONVERGED: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Radial,
    Sweep,
    Iota,
    Grid,
    Verify,
    Profile,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    Default,
    Coarse,
    Structural,
}

/// `start:stop:step`, inclusive of `stop` up to rounding.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct U0Range {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl U0Range {
    pub fn count(&self) -> usize {
        ((self.stop - self.start) / self.step).round() as usize + 1
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.count()).map(|i| self.start + i as f64 * self.step).collect()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct ScheduleOverrides {
    pub eps_start: Option<f64>,
    pub eps_end: Option<f64>,
    pub eps_factor: Option<f64>,
    pub grad_tol: Option<f64>,
    pub max_iters: Option<usize>,
}

impl ScheduleOverrides {
    pub fn apply(&self, mut s: ContinuationSchedule) -> Result<ContinuationSchedule> {
        if let Some(v) = self.eps_end {
            s.eps_end = v;
            s.eps_start = s.eps_start.max(v);
        }
        if let Some(v) = self.eps_start {
            s.eps_start = v;
        }
        if let Some(v) = self.eps_factor {
            s.eps_factor = v;
        }
        if let Some(v) = self.grad_tol {
            s.grad_tol = v;
        }
        if let Some(v) = self.max_iters {
            s.max_iters = v;
        }
        s.validate().map_err(|e| Error::Config(e.to_string()))?;
        Ok(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub u0: Option<f64>,
    pub u0_range: Option<U0Range>,
    pub n: Option<usize>,
    pub domain: DomainKind,
    pub schedule: ScheduleOverrides,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub seed: Option<u64>,
    pub preset: Preset,
    pub samples: usize,
}

impl RunConfig {
    fn u0_values(&self) -> Vec<f64> {
        match (self.u0, self.u0_range) {
            (Some(u0), _) => vec![u0],
            (_, Some(r)) => r.values(),
            _ => Vec::new(),
        }
    }

    fn required_u0(&self) -> f64 {
        self.u0.expect("validated")
    }

    /// `--output`, else the directory in [`OUT_DIR_ENV`], else the working directory.
    fn output_dir(&self) -> PathBuf {
        self.output
            .clone()
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."))
    }
}

#[derive(Parser, Debug)]
#[command(name = "biharm", version, about = "Radial closed forms, grid minimizers and checks for the biharmonic free-boundary energy on the unit disk")]
struct Cli {
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Subcommand, Debug)]
enum CliCommand {
    /// Optimal nodal radius and energy for one boundary value.
    Radial(Flags),
    /// Radial minimization over a range of boundary values, as CSV.
    Sweep(Flags),
    /// The nonuniqueness level and its residuals.
    Iota(Flags),
    /// Grid minimization; writes field and contour CSV files.
    Grid(Flags),
    /// Runs the check suite and writes a JSON report.
    Verify(Flags),
    /// Closed-form radial profile `r,u,laplacian`, as CSV.
    Profile(Flags),
}

/// Every flag is a string here so that file and flag values share one parser.
#[derive(Args, Debug, Default)]
struct Flags {
    /// `key = value` file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    u0: Option<String>,
    /// `start:stop:step`.
    #[arg(long)]
    u0_range: Option<String>,
    /// Nodes per axis (2-D) or along the radius.
    #[arg(long)]
    n: Option<String>,
    /// radial, disk or rectangle.
    #[arg(long)]
    domain: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    eps_start: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    eps_end: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    eps_factor: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    grad_tol: Option<String>,
    #[arg(long)]
    max_iters: Option<String>,
    /// File (radial, sweep, profile, verify) or directory (grid).
    #[arg(long, short)]
    output: Option<String>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Suite size for verify: default, coarse or structural.
    #[arg(long)]
    preset: Option<String>,
    /// Profile sample count.
    #[arg(long)]
    samples: Option<String>,
}

const KEYS: [&str; 14] = [
    "u0", "u0_range", "n", "domain", "eps_start", "eps_end", "eps_factor", "grad_tol", "max_iters", "output", "format",
    "seed", "preset", "samples",
];

impl Flags {
    fn into_map(self) -> BTreeMap<&'static str, String> {
        let pairs = [
            ("u0", self.u0),
            ("u0_range", self.u0_range),
            ("n", self.n),
            ("domain", self.domain),
            ("eps_start", self.eps_start),
            ("eps_end", self.eps_end),
            ("eps_factor", self.eps_factor),
            ("grad_tol", self.grad_tol),
            ("max_iters", self.max_iters),
            ("output", self.output),
            ("format", self.format),
            ("seed", self.seed),
            ("preset", self.preset),
            ("samples", self.samples),
        ];
        pairs.into_iter().filter_map(|(k, v)| v.map(|v| (k, v))).collect()
    }
}

/// Parses `key = value` lines. Keys may use `-` or `_`.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<&'static str, String>> {
    let mut out = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Config(format!("line {}: expected `key = value`, got `{line}`", lineno + 1)));
        };
        let key = key.trim().replace('-', "_");
        let Some(&known) = KEYS.iter().find(|k| **k == key) else {
            return Err(Error::Config(format!("line {}: unknown key `{key}`", lineno + 1)));
        };
        out.insert(known, value.trim().to_string());
    }
    Ok(out)
}

fn number<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("malformed number for {key}: `{value}`")))
}

fn positive(key: &str, value: f64) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Config(format!("{key} must be positive")))
    }
}

fn parse_range(value: &str) -> Result<U0Range> {
    let parts: Vec<&str> = value.split(':').collect();
    let [a, b, s] = parts[..] else {
        return Err(Error::Config(format!("u0_range must be start:stop:step, got `{value}`")));
    };
    let r = U0Range {
        start: positive("u0", number("u0_range", a)?)?,
        stop: positive("u0", number("u0_range", b)?)?,
        step: positive("u0_range step", number("u0_range", s)?)?,
    };
    if r.stop < r.start {
        return Err(Error::Config("u0_range stop must not be below start".into()));
    }
    Ok(r)
}

/// Builds a [`RunConfig`] from `argv` (program name first) and the optional
/// `--config` file.
pub fn parse_config<I, T>(argv: I) -> Result<RunConfig>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| match e.kind() {
        clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => Error::Help(e.to_string()),
        _ => Error::Config(e.render().to_string().trim_end().to_string()),
    })?;
    let (command, flags) = match cli.command {
        CliCommand::Radial(f) => (Command::Radial, f),
        CliCommand::Sweep(f) => (Command::Sweep, f),
        CliCommand::Iota(f) => (Command::Iota, f),
        CliCommand::Grid(f) => (Command::Grid, f),
        CliCommand::Verify(f) => (Command::Verify, f),
        CliCommand::Profile(f) => (Command::Profile, f),
    };
    let mut values = match &flags.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read config file {}: {e}", path.display())))?;
            parse_config_file(&text)?
        }
        None => BTreeMap::new(),
    };
    values.extend(flags.into_map());
    build(command, &values)
}

fn build(command: Command, v: &BTreeMap<&'static str, String>) -> Result<RunConfig> {
    let get = |k: &str| v.get(k).map(String::as_str);
    let num = |k: &str| get(k).map(|s| number::<f64>(k, s)).transpose();
    let count = |k: &str| get(k).map(|s| number::<usize>(k, s)).transpose();

    let u0 = num("u0")?.map(|x| positive("u0", x)).transpose()?;
    let u0_range = get("u0_range").map(parse_range).transpose()?;
    let needs_u0 = matches!(command, Command::Radial | Command::Grid | Command::Profile);
    if needs_u0 && u0.is_none() {
        return Err(Error::Config(format!("missing required field u0 for {}", command_name(command))));
    }
    if needs_u0 && u0_range.is_some() {
        return Err(Error::Config(format!("u0_range is not accepted by {}", command_name(command))));
    }
    if command == Command::Sweep && u0.is_some() == u0_range.is_some() {
        return Err(Error::Config("sweep needs exactly one of u0 and u0_range".into()));
    }

    let domain = match get("domain") {
        Some(s) => DomainKind::parse(s).ok_or_else(|| Error::Config(format!("unknown domain `{s}`")))?,
        None => DomainKind::Radial,
    };
    let format = match get("format") {
        None | Some("csv") => Format::Csv,
        Some("json") => Format::Json,
        Some(s) => return Err(Error::Config(format!("unknown format `{s}`"))),
    };
    let preset = match get("preset") {
        None | Some("default") => Preset::Default,
        Some("coarse") => Preset::Coarse,
        Some("structural") => Preset::Structural,
        Some(s) => return Err(Error::Config(format!("unknown preset `{s}`"))),
    };
    let samples = count("samples")?.unwrap_or(1001);
    if samples < MIN_PROFILE_SAMPLES {
        return Err(Error::Config(format!("samples must be at least {MIN_PROFILE_SAMPLES}")));
    }
    let n = count("n")?;
    if let Some(n) = n {
        if n < crate::grid::MIN_NODES {
            return Err(Error::Config(format!("n must be at least {}", crate::grid::MIN_NODES)));
        }
    }
    Ok(RunConfig {
        command,
        u0,
        u0_range,
        n,
        domain,
        schedule: ScheduleOverrides {
            eps_start: num("eps_start")?,
            eps_end: num("eps_end")?,
            eps_factor: num("eps_factor")?,
            grad_tol: num("grad_tol")?,
            max_iters: count("max_iters")?,
        },
        output: get("output").map(PathBuf::from),
        format,
        seed: get("seed").map(|s| number::<u64>("seed", s)).transpose()?,
        preset,
        samples,
    })
}

fn command_name(c: Command) -> &'static str {
    match c {
        Command::Radial => "radial",
        Command::Sweep => "sweep",
        Command::Iota => "iota",
        Command::Grid => "grid",
        Command::Verify => "verify",
        Command::Profile => "profile",
    }
}

/// `%.9g`-style formatting: nine significant digits, trailing zeros dropped.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if !(-5..9).contains(&exp) {
        let m = trim_zeros(mantissa);
        return format!("{m}e{exp}");
    }
    let decimals = (8 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn csv<W: Write + ?Sized>(out: &mut W, header: &str, rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut buf = String::new();
    buf.push_str(header);
    buf.push('\n');
    for row in rows {
        buf.push_str(&row.join(","));
        buf.push('\n');
    }
    out.write_all(buf.as_bytes())?;
    Ok(())
}

fn create(path: &Path) -> Result<std::io::BufWriter<std::fs::File>> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    Ok(std::io::BufWriter::new(std::fs::File::create(path)?))
}

/// Writes to the configured output file, or to `out` when none is set.
fn emit<W: Write>(cfg: &RunConfig, out: &mut W, f: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match &cfg.output {
        Some(path) => {
            let mut file = create(path)?;
            f(&mut file)?;
            file.flush()?;
            Ok(())
        }
        None => f(out),
    }
}

#[derive(Serialize)]
struct SweepRow {
    u0: f64,
    #[serde(rename = "R")]
    radius: Option<f64>,
    energy: f64,
    branch: MinimizerBranch,
}

/// Runs the configured command. Returns the process exit code; only I/O and
/// solver setup failures surface as errors.
pub fn dispatch<W: Write>(cfg: &RunConfig, out: &mut W) -> Result<i32> {
    match cfg.command {
        Command::Radial => radial(cfg, out),
        Command::Sweep => sweep(cfg, out),
        Command::Iota => iota(out),
        Command::Grid => grid(cfg, out),
        Command::Verify => verify(cfg, out),
        Command::Profile => profile(cfg, out),
    }
}

fn radial<W: Write>(cfg: &RunConfig, out: &mut W) -> Result<i32> {
    let m = minimize_energy(cfg.required_u0())?;
    let text = match cfg.format {
        Format::Json => serde_json::to_string_pretty(&m)? + "\n",
        Format::Csv => {
            let r = m.nodal_radius.map_or_else(|| "constant".to_string(), fmt_sig);
            format!("u0={} R={} energy={} branch={}\n", fmt_sig(m.u0), r, fmt_sig(m.energy), m.branch.as_str())
        }
    };
    emit(cfg, out, |w| Ok(w.write_all(text.as_bytes())?))?;
    Ok(EXIT_OK)
}

fn sweep<W: Write>(cfg: &RunConfig, out: &mut W) -> Result<i32> {
    let rows = cfg
        .u0_values()
        .par_iter()
        .map(|&u0| {
            let m = minimize_energy(u0)?;
            Ok(SweepRow {
                u0,
                radius: m.nodal_radius,
                energy: m.energy,
                branch: m.branch,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    emit(cfg, out, |w| match cfg.format {
        Format::Json => {
            w.write_all((serde_json::to_string_pretty(&rows)? + "\n").as_bytes())?;
            Ok(())
        }
        Format::Csv => csv(
            w,
            "u0,R,energy,branch",
            rows.iter().map(|r| {
                vec![
                    fmt_sig(r.u0),
                    r.radius.map(fmt_sig).unwrap_or_default(),
                    fmt_sig(r.energy),
                    r.branch.as_str().to_string(),
                ]
            }),
        ),
    })?;
    Ok(EXIT_OK)
}

fn iota<W: Write>(out: &mut W) -> Result<i32> {
    let l = nonuniqueness_level();
    let mut s = String::new();
    writeln!(s, "R_star={:.6}", l.r_star).ok();
    writeln!(s, "iota={:.6}", l.iota).ok();
    writeln!(s, "R_star_full={}", fmt_sig(l.r_star)).ok();
    writeln!(s, "iota_full={}", fmt_sig(l.iota)).ok();
    writeln!(s, "u_star={}", fmt_sig(l.u_star)).ok();
    writeln!(s, "critical_equation_residual={:e}", l.equation_residual()).ok();
    writeln!(s, "lambert_residual={:e}", l.lambert_residual()).ok();
    writeln!(s, "bisection_gap={:e}", (l.r_star - l.r_star_bisection).abs()).ok();
    out.write_all(s.as_bytes())?;
    Ok(EXIT_OK)
}

fn default_grid_size(kind: DomainKind) -> usize {
    match kind {
        DomainKind::Radial => 2001,
        _ => 129,
    }
}

fn grid<W: Write>(cfg: &RunConfig, out: &mut W) -> Result<i32> {
    let u0 = cfg.required_u0();
    let n = cfg.n.unwrap_or_else(|| default_grid_size(cfg.domain));
    let d = DiscreteDomain::with_constant(cfg.domain, n, u0)?;
    let schedule = cfg.schedule.apply(ContinuationSchedule::for_boundary_value(u0, d.h())?)?;
    let outcome = minimize(&d, &schedule, None)?;
    let fb = free_boundary(&outcome.field);
    let dir = cfg.output_dir();
    std::fs::create_dir_all(&dir)?;
    write_field(&dir.join("field.csv"), &outcome)?;
    write_contour(&dir.join("contour.csv"), &fb)?;

    let areas = region_areas(&outcome.field);
    let mut s = String::new();
    writeln!(s, "domain={} n={} u0={}", d.kind().as_str(), n, fmt_sig(u0)).ok();
    writeln!(s, "energy={}", fmt_sig(outcome.energy)).ok();
    writeln!(s, "iterations={} stages={} converged={}", outcome.iterations, outcome.stages.len(), outcome.converged).ok();
    writeln!(
        s,
        "components={} length={} weighted_mass={} area_neg={} degenerate_gradient={}",
        fb.component_count,
        fmt_sig(fb.length),
        fmt_sig(fb.weighted_mass),
        fmt_sig(areas.negative),
        fb.degenerate_gradient
    )
    .ok();
    writeln!(s, "wrote {} and {}", dir.join("field.csv").display(), dir.join("contour.csv").display()).ok();
    out.write_all(s.as_bytes())?;
    Ok(if outcome.converged { EXIT_OK } else { EXIT_NOT_CONVERGED })
}

fn write_field(path: &Path, outcome: &MinimizeOutcome) -> Result<()> {
    let field = &outcome.field;
    let d = field.domain();
    let mut w = create(path)?;
    let inside = (0..d.node_count()).filter(|&k| d.mask()[k] != NodeKind::Exterior);
    match d.kind() {
        DomainKind::Radial => csv(
            &mut w,
            "r,u",
            inside.map(|k| vec![fmt_sig(d.radius(k)), fmt_sig(field.values()[k])]),
        )?,
        _ => csv(
            &mut w,
            "x,y,u",
            inside.map(|k| {
                let (x, y) = d.coords(k);
                vec![fmt_sig(x), fmt_sig(y), fmt_sig(field.values()[k])]
            }),
        )?,
    }
    w.flush()?;
    Ok(())
}

/// Polylines as `component,x,y` rows in vertex order; radial crossings as
/// `component,r`.
fn write_contour(path: &Path, fb: &FreeBoundary) -> Result<()> {
    let mut w = create(path)?;
    if fb.polylines.is_empty() && !fb.crossings.is_empty() {
        csv(
            &mut w,
            "component,r",
            fb.crossings.iter().enumerate().map(|(i, c)| vec![i.to_string(), fmt_sig(c.radius)]),
        )?;
    } else {
        csv(
            &mut w,
            "component,x,y",
            fb.polylines.iter().enumerate().flat_map(|(i, p)| {
                p.points().map(move |[x, y]| vec![i.to_string(), fmt_sig(x), fmt_sig(y)])
            }),
        )?;
    }
    w.flush()?;
    Ok(())
}

fn verify<W: Write>(cfg: &RunConfig, out: &mut W) -> Result<i32> {
    let mut suite = match cfg.preset {
        Preset::Default => SuiteConfig::default(),
        Preset::Coarse => SuiteConfig::coarse(),
        Preset::Structural => SuiteConfig::structural_only(),
    };
    if let Some(seed) = cfg.seed {
        suite.seed = seed;
    }
    if let Some(n) = cfg.n {
        suite.grid_n = n;
    }
    let report = run_suite(&suite);
    let path = cfg.output.clone().unwrap_or_else(|| cfg.output_dir().join("report.json"));
    let mut file = create(&path)?;
    file.write_all((report.to_json()? + "\n").as_bytes())?;
    file.flush()?;

    let mut s = String::new();
    for c in &report.checks {
        writeln!(s, "{} {} ({:.3}s)", if c.pass { "PASS" } else { "FAIL" }, c.name, c.wall_time).ok();
    }
    let failed = report.failures().count();
    writeln!(
        s,
        "{} checks, {} failed, {:.2}s; report written to {}",
        report.checks.len(),
        failed,
        report.environment.total_wall_time,
        path.display()
    )
    .ok();
    out.write_all(s.as_bytes())?;
    Ok(if failed == 0 { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn profile<W: Write>(cfg: &RunConfig, out: &mut W) -> Result<i32> {
    let u0 = cfg.required_u0();
    let sol = RadialSolution::minimizer(u0)?;
    let m = cfg.samples;
    let rows: Vec<[f64; 3]> = (0..m)
        .map(|i| {
            let r = i as f64 / (m - 1) as f64;
            match &sol {
                Some(s) => [r, s.value_unchecked(r), s.laplacian_unchecked(r)],
                None => [r, u0, 0.0],
            }
        })
        .collect();
    emit(cfg, out, |w| match cfg.format {
        Format::Json => {
            let objs: Vec<_> = rows
                .iter()
                .map(|[r, u, l]| serde_json::json!({"r": r, "u": u, "laplacian": l}))
                .collect();
            w.write_all((serde_json::to_string_pretty(&objs)? + "\n").as_bytes())?;
            Ok(())
        }
        Format::Csv => csv(w, "r,u,laplacian", rows.iter().map(|row| row.iter().map(|&x| fmt_sig(x)).collect())),
    })?;
    Ok(EXIT_OK)
}

/// Parses `argv`, dispatches, and reports usage errors on `err`. Returns the
/// process exit code.
pub fn run<I, T, W, E>(argv: I, out: &mut W, err: &mut E) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
    W: Write,
    E: Write,
{
    let cfg = match parse_config(argv) {
        Ok(cfg) => cfg,
        Err(Error::Help(text)) => {
            let _ = out.write_all(text.as_bytes());
            return EXIT_OK;
        }
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.to_string().trim_start_matches("error: "));
            return EXIT_USAGE;
        }
    };
    match dispatch(&cfg, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<RunConfig> {
        parse_config(std::iter::once("biharm").chain(args.iter().copied()))
    }

    #[test]
    fn radial_flag() {
        let c = parse(&["radial", "--u0", "0.1"]).unwrap();
        assert_eq!(c.command, Command::Radial);
        assert_eq!(c.u0, Some(0.1));
        assert_eq!(c.format, Format::Csv);
    }

    #[test]
    fn sweep_range_count() {
        let c = parse(&["sweep", "--u0-range", "0.005:0.115:0.005", "--format", "csv"]).unwrap();
        let r = c.u0_range.unwrap();
        assert_eq!(r.count(), 23);
        let v = r.values();
        assert!((v[22] - 0.115).abs() < 1e-12);
    }

    #[test]
    fn negative_u0_rejected() {
        let e = parse(&["radial", "--u0", "-1"]).unwrap_err();
        assert_eq!(e.to_string(), "u0 must be positive");
    }

    #[test]
    fn usage_errors() {
        assert!(parse(&["radial"]).unwrap_err().to_string().contains("missing required field u0"));
        assert!(parse(&["radial", "--u0", "abc"]).unwrap_err().to_string().contains("malformed number"));
        assert!(parse(&["radial", "--u0", "0.1", "--bogus", "1"]).is_err());
        assert!(parse(&["sweep"]).is_err());
        assert!(parse(&["profile", "--u0", "0.1", "--samples", "10"]).is_err());
        assert!(matches!(parse(&["--help"]), Err(Error::Help(_))));
    }

    #[test]
    fn config_file_keys() {
        let m = parse_config_file("# comment\nu0 = 0.2  # trailing\n\nmax-iters=5\n").unwrap();
        assert_eq!(m["u0"], "0.2");
        assert_eq!(m["max_iters"], "5");
        let e = parse_config_file("colour = red").unwrap_err();
        assert!(e.to_string().contains("unknown key `colour`"));
        assert!(parse_config_file("just words").is_err());
    }

    #[test]
    fn sig_formatting() {
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(0.1), "0.1");
        assert_eq!(fmt_sig(2.930619832284), "2.93061983");
        assert_eq!(fmt_sig(-1234.5), "-1234.5");
        assert_eq!(fmt_sig(1.5e-7), "1.5e-7");
        assert_eq!(fmt_sig(123456789012.0), "1.23456789e11");
        assert_eq!(fmt_sig(f64::NAN), "nan");
        for x in [0.582372685483, 3.14159265358979, 1e-5, 0.0123456789123] {
            let back: f64 = fmt_sig(x).parse().unwrap();
            assert!((back - x).abs() <= 1e-8 * x.abs());
        }
    }

    #[test]
    fn schedule_overrides_validate() {
        let base = ContinuationSchedule::single_stage(0.01, 1e-8, 10);
        let o = ScheduleOverrides { eps_factor: Some(2.0), ..Default::default() };
        assert!(o.apply(base).is_err());
        let o = ScheduleOverrides { eps_end: Some(0.001), eps_start: Some(0.1), ..Default::default() };
        let s = o.apply(base).unwrap();
        assert_eq!((s.eps_start, s.eps_end), (0.1, 0.001));
    }

    #[test]
    fn sweep_csv_matches_table() {
        let cfg = parse(&["sweep", "--u0-range", "0.01:0.02:0.01"]).unwrap();
        let mut out = Vec::new();
        assert_eq!(dispatch(&cfg, &mut out).unwrap(), 0);
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "u0,R,energy,branch");
        assert!(lines[1].starts_with("0.01,0.92403"));
        assert!(lines[2].starts_with("0.02,0.87698"));
        assert!(!text.contains('\r'));
    }
}
