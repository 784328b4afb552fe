//! Command-line front end.
//!
//! Exit codes: 0 success, 2 bad or inconsistent flags, 3 a verification
//! check failed, 4 an input/output error. Output goes to `--out`, else to
//! the directory named by `LISSAJOUS_OUT`, else to `lissajous-out`.

use crate::error::Error;
use crate::io::{self, Format, GridMeta, StateMeta, StateRecord};
use crate::manifest::OutputDir;
use crate::phase::parse_phase;
use crate::{parallel, raster, verify};
use clap::{Args, Parser, Subcommand, ValueEnum};
use lissajous_core::classical::{axis_extrema_count, closure_analysis, gcd, sample_curve};
use lissajous_core::fields::*;
use lissajous_core::semiclassical::*;
use lissajous_core::states::*;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

pub const OUT_ENV: &str = "LISSAJOUS_OUT";
pub const DEFAULT_OUT: &str = "lissajous-out";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FLAGS: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "lissajous", version, about = "Quantum Lissajous states of the two-dimensional harmonic oscillator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classical Lissajous polyline, closure and axis extrema.
    Classical(ClassicalArgs),
    /// Fock coefficients and energy of the projected state.
    State(StateArgs),
    /// Wavefunction, density and current on a grid, with heatmaps.
    Field(FieldArgs),
    /// Circulation cells and phase singularities of the current.
    Vortices(VortexArgs),
    /// Time-dependent two-mode coherent state and its centroid.
    Semiclassical(SemiclassicalArgs),
    /// Built-in numerical checks.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct StateFlags {
    /// Number of quanta N.
    #[arg(long = "N", default_value_t = 20)]
    pub n: u32,
    /// y frequency multiplier, ω_y = p ω₀.
    #[arg(long, default_value_t = 1)]
    pub p: u32,
    /// x frequency multiplier, ω_x = q ω₀.
    #[arg(long, default_value_t = 1)]
    pub q: u32,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long = "beta-abs", default_value_t = 1.0)]
    pub beta_abs: f64,
    /// Phase of β in radians; accepts `pi/K` style literals.
    #[arg(long, default_value = "0", value_parser = parse_phase, allow_hyphen_values = true)]
    pub phi: f64,
    #[arg(long, default_value_t = 1.0)]
    pub omega0: f64,
    /// Harmonic order: p and q must both be multiples of m.
    #[arg(long)]
    pub m: Option<u32>,
}

#[derive(Debug, Clone, Args)]
pub struct OutputFlags {
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct GridFlags {
    /// Nodes as NXxNY.
    #[arg(long, value_parser = parse_grid)]
    pub grid: Option<(usize, usize)>,
    /// `auto` or half-widths `X:Y`.
    #[arg(long, default_value = "auto", value_parser = parse_extent)]
    pub extent: Extent,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Extent {
    Auto,
    Half(f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Bin,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Bin => Format::Bin,
        }
    }
}

#[derive(Debug, Args)]
pub struct ClassicalArgs {
    #[command(flatten)]
    pub state: StateFlags,
    #[command(flatten)]
    pub output: OutputFlags,
    /// Polyline points over one period.
    #[arg(long, default_value_t = 2048)]
    pub samples: usize,
}

#[derive(Debug, Args)]
pub struct StateArgs {
    #[command(flatten)]
    pub state: StateFlags,
    #[command(flatten)]
    pub output: OutputFlags,
}

#[derive(Debug, Args)]
pub struct FieldArgs {
    #[command(flatten)]
    pub state: StateFlags,
    #[command(flatten)]
    pub grid: GridFlags,
    #[command(flatten)]
    pub output: OutputFlags,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: FormatArg,
}

#[derive(Debug, Args)]
pub struct VortexArgs {
    #[command(flatten)]
    pub state: StateFlags,
    #[command(flatten)]
    pub grid: GridFlags,
    #[command(flatten)]
    pub output: OutputFlags,
    /// Density floor as a fraction of max ρ.
    #[arg(long, default_value_t = DEFAULT_DENSITY_FLOOR)]
    pub floor: f64,
}

#[derive(Debug, Args)]
pub struct SemiclassicalArgs {
    #[command(flatten)]
    pub state: StateFlags,
    #[command(flatten)]
    pub grid: GridFlags,
    #[command(flatten)]
    pub output: OutputFlags,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: FormatArg,
    /// Snapshots per period.
    #[arg(long, default_value_t = DEFAULT_TIMES)]
    pub times: usize,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value = "identities", value_parser = clap::builder::PossibleValuesParser::new(verify::SUITES))]
    pub suite: String,
    #[command(flatten)]
    pub output: OutputFlags,
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected NXxNY, got {s:?}"))?;
    let n = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("bad node count {t:?}"));
    let (nx, ny) = (n(a)?, n(b)?);
    if nx < MIN_NODES || ny < MIN_NODES {
        return Err(format!("at least {MIN_NODES} nodes per axis"));
    }
    Ok((nx, ny))
}

fn parse_extent(s: &str) -> Result<Extent, String> {
    if s == "auto" {
        return Ok(Extent::Auto);
    }
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected auto or X:Y, got {s:?}"))?;
    let v = |t: &str| {
        t.parse::<f64>()
            .ok()
            .filter(|v| *v > 0.0 && v.is_finite())
            .ok_or_else(|| format!("bad half-width {t:?}"))
    };
    Ok(Extent::Half(v(a)?, v(b)?))
}

/// Failure of a subcommand, mapped onto an exit code.
#[derive(Debug)]
enum Failure {
    Flags(String),
    Verify(usize),
    Io(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Core(c) => Failure::Flags(c.to_string()),
            other => Failure::Io(other),
        }
    }
}

impl From<lissajous_core::Error> for Failure {
    fn from(e: lissajous_core::Error) -> Self {
        Failure::Flags(e.to_string())
    }
}

type Outcome = std::result::Result<(), Failure>;

/// Parses `argv` (program name first), runs the subcommand and returns the
/// exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_FLAGS } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let threads = match &cli.command {
        Command::Classical(a) => a.output.threads,
        Command::State(a) => a.output.threads,
        Command::Field(a) => a.output.threads,
        Command::Vortices(a) => a.output.threads,
        Command::Semiclassical(a) => a.output.threads,
        Command::Verify(a) => a.output.threads,
    };
    let result = parallel::with_threads(threads, || match cli.command {
        Command::Classical(a) => classical(a),
        Command::State(a) => state(a),
        Command::Field(a) => field(a),
        Command::Vortices(a) => vortices(a),
        Command::Semiclassical(a) => semiclassical(a),
        Command::Verify(a) => run_verify(a),
    });
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure::Flags(msg)) => {
            eprintln!("error: {msg}");
            EXIT_FLAGS
        }
        Err(Failure::Verify(n)) => {
            eprintln!("{n} check(s) failed");
            EXIT_VERIFY
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            EXIT_IO
        }
    }
}

fn out_dir(flags: &OutputFlags) -> Result<OutputDir, Failure> {
    let root = flags
        .out
        .clone()
        .or_else(|| std::env::var_os(OUT_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    Ok(OutputDir::create(&root)?)
}

fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

impl StateFlags {
    fn params(&self) -> Result<OscillatorParams, Failure> {
        let params = OscillatorParams::new(self.p, self.q, self.omega0)?;
        if let Some(m) = self.m {
            if m == 0 || self.p % m != 0 || self.q % m != 0 {
                return Err(Failure::Flags(format!("--m {m} does not divide both p = {} and q = {}", self.p, self.q)));
            }
            if gcd((self.p / m) as u64, (self.q / m) as u64) != 1 {
                return Err(Failure::Flags(format!(
                    "p/m = {} and q/m = {} share a factor; m must be gcd(p, q) = {}",
                    self.p / m,
                    self.q / m,
                    gcd(self.p as u64, self.q as u64)
                )));
            }
        }
        Ok(params)
    }

    fn amplitudes(&self) -> Result<AmplitudePair, Failure> {
        Ok(AmplitudePair::new(self.alpha, self.beta_abs, self.phi)?)
    }

    fn build(&self) -> Result<LissajousState, Failure> {
        Ok(build_from_amplitudes(&self.amplitudes()?, self.n, self.params()?)?)
    }

    fn record(&self, map: &mut BTreeMap<String, String>) {
        map.insert("N".into(), self.n.to_string());
        map.insert("p".into(), self.p.to_string());
        map.insert("q".into(), self.q.to_string());
        map.insert("alpha".into(), fmt_f64(self.alpha));
        map.insert("beta-abs".into(), fmt_f64(self.beta_abs));
        map.insert("phi".into(), fmt_f64(self.phi));
        map.insert("omega0".into(), fmt_f64(self.omega0));
        if let Some(m) = self.m {
            map.insert("m".into(), m.to_string());
        }
    }
}

impl GridFlags {
    fn nodes(&self, default: usize) -> (usize, usize) {
        self.grid.unwrap_or((default, default))
    }

    fn record(&self, nodes: (usize, usize), map: &mut BTreeMap<String, String>) {
        map.insert("grid".into(), format!("{}x{}", nodes.0, nodes.1));
        let extent = match self.extent {
            Extent::Auto => "auto".to_string(),
            Extent::Half(x, y) => format!("{x}:{y}"),
        };
        map.insert("extent".into(), extent);
    }

    fn for_state(&self, state: &LissajousState, map: &mut BTreeMap<String, String>) -> Result<FieldGrid, Failure> {
        let (nx, ny) = self.nodes(DEFAULT_NODES);
        self.record((nx, ny), map);
        Ok(match self.extent {
            Extent::Auto => default_extent(state, nx, ny)?,
            Extent::Half(x, y) => FieldGrid::symmetric(x, y, nx, ny)?,
        })
    }
}

fn classical(a: ClassicalArgs) -> Outcome {
    let mut params = BTreeMap::new();
    a.state.record(&mut params);
    params.insert("samples".into(), a.samples.to_string());
    let p = a.state.params()?;
    let cfg = SemiclassicalConfig::uniform(a.state.amplitudes()?, p, 1);
    let curve = cfg.classical_curve();
    let closure = closure_analysis(curve.q, curve.p, 1e-12)?;
    let period = curve.period().ok_or(Failure::Flags("open curve".into()))?;
    if a.samples < 2 {
        return Err(Failure::Flags("--samples must be at least 2".into()));
    }
    let mut csv = String::from("t,x,y\n");
    for (t, x, y) in sample_curve(&curve, 0.0, period, a.samples) {
        writeln!(csv, "{t:e},{x:e},{y:e}").unwrap();
    }
    let extrema = axis_extrema_count(&curve, (64 * p.p as usize * p.q as usize).max(20_000))?;
    println!("curve x = {:.6} cos({} t), y = {:.6} cos({} t − φ), φ = {}", curve.a, p.q, curve.b, p.p, a.state.phi);
    println!(
        "period {period:.6}, fundamental {}:{} with m = {}",
        closure.p0.unwrap_or(0),
        closure.q0.unwrap_or(0),
        closure.m.unwrap_or(1)
    );
    println!("extrema on x {} on y {}", extrema.on_x, extrema.on_y);
    let mut out = out_dir(&a.output)?;
    out.write("classical.csv", csv.as_bytes())?;
    out.finish("classical", params, None)?;
    Ok(())
}

#[derive(Serialize)]
struct HarmonicRecord {
    m: u32,
    weight: f64,
    leakage: f64,
    terms: Vec<StateRecord>,
}

fn state(a: StateArgs) -> Outcome {
    let mut params = BTreeMap::new();
    a.state.record(&mut params);
    let s = a.state.build()?;
    println!(
        "p = {} q = {} N = {} ω₀ = {} energy = {}",
        s.params.p, s.params.q, s.n, s.params.omega0, s.energy
    );
    println!("{:>4} {:>5} {:>5} {:>24} {:>24}", "K", "nx", "ny", "re", "im");
    for (k, f) in s.coeffs.iter().enumerate() {
        println!("{k:>4} {:>5} {:>5} {:>24e} {:>24e}", f.nx, f.ny, f.c.re, f.c.im);
    }
    let mut out = out_dir(&a.output)?;
    out.write("state.json", &io::to_json(&StateRecord::from(&s))?)?;
    if let Some(m) = a.state.m.filter(|&m| m >= 2) {
        let p = s.params;
        let amp = a.state.amplitudes()?;
        let hh = higher_harmonic_decomposition_at(s.n, m, p.p / m, p.q / m, &amp, p.omega0)?;
        let (_, leakage) = hh.reconstruct()?;
        println!("{m} fundamental terms, weight {}, leakage {leakage:e}", hh.weight.re);
        let record = HarmonicRecord {
            m,
            weight: hh.weight.re,
            leakage,
            terms: hh.terms.iter().map(StateRecord::from).collect(),
        };
        out.write("harmonic.json", &io::to_json(&record)?)?;
    }
    out.finish("state", params, None)?;
    Ok(())
}

fn emit_field(
    out: &mut OutputDir,
    stem: &str,
    f: &WaveField,
    format: Format,
    meta: Option<StateMeta>,
) -> Result<(), Failure> {
    let data = format!("{stem}.{}", format.name());
    io::write_field(&out.path(&data), f, format, meta)?;
    out.record(&data)?;
    out.record(&format!("{data}.json"))?;
    out.write(&format!("{stem}_rho.ppm"), &raster::encode_ppm(&f.rho, f.grid.nx, f.grid.ny)?)?;
    Ok(())
}

fn field(a: FieldArgs) -> Outcome {
    let mut params = BTreeMap::new();
    a.state.record(&mut params);
    params.insert("format".into(), Format::from(a.format).name().into());
    let s = a.state.build()?;
    let grid = a.grid.for_state(&s, &mut params)?;
    let f = parallel::eval_state(&s, &grid, Resolution::Strict)?;
    let mut out = out_dir(&a.output)?;
    emit_field(&mut out, "field", &f, a.format.into(), Some(StateMeta::from(&s)))?;
    let speed = raster::current_magnitude(&f);
    out.write("current.ppm", &raster::encode_ppm(&speed, grid.nx, grid.ny)?)?;
    let stride = (grid.nx.max(grid.ny) / 64).max(1);
    out.write("quiver.csv", raster::quiver_csv(&f, stride).as_bytes())?;
    if let Some(m) = a.state.m.filter(|&m| m >= 2) {
        let p = s.params;
        let hh = higher_harmonic_decomposition_at(s.n, m, p.p / m, p.q / m, &a.state.amplitudes()?, p.omega0)?;
        let parts = interference_decomposition(&hh, &grid)?;
        out.write("incoherent.ppm", &raster::encode_ppm(&parts.rho_incoherent, grid.nx, grid.ny)?)?;
        out.write("cross.ppm", &raster::encode_ppm(&parts.rho_cross, grid.nx, grid.ny)?)?;
    }
    println!(
        "∫ρ = {:.12} max ρ = {:.6e} max |J| = {:.6e} on {}x{}",
        quadrature(&f.rho, &grid),
        f.max_rho(),
        f.max_current(),
        grid.nx,
        grid.ny
    );
    out.finish("field", params, Some(GridMeta::from(&grid)))?;
    Ok(())
}

#[derive(Serialize)]
struct VortexRecord {
    x: f64,
    y: f64,
    winding: i32,
}

#[derive(Serialize)]
struct VortexSetRecord {
    count: usize,
    positive: usize,
    negative: usize,
    total_winding: i64,
    vortices: Vec<VortexRecord>,
}

impl From<&VortexSet> for VortexSetRecord {
    fn from(v: &VortexSet) -> Self {
        Self {
            count: v.len(),
            positive: v.positive,
            negative: v.negative,
            total_winding: v.total_winding(),
            vortices: v
                .vortices
                .iter()
                .map(|v| VortexRecord {
                    x: v.x,
                    y: v.y,
                    winding: v.winding,
                })
                .collect(),
        }
    }
}

#[derive(Serialize)]
struct VortexReport {
    floor: f64,
    smoothing: f64,
    /// Circulation cells of the averaged current; the counted vortices.
    cells: VortexSetRecord,
    /// Every plaquette phase singularity of Ψ above the floor.
    singularities: VortexSetRecord,
}

fn vortices(a: VortexArgs) -> Outcome {
    let mut params = BTreeMap::new();
    a.state.record(&mut params);
    params.insert("floor".into(), fmt_f64(a.floor));
    let s = a.state.build()?;
    let grid = a.grid.for_state(&s, &mut params)?;
    let f = parallel::eval_state(&s, &grid, Resolution::Strict)?;
    let smoothing = local_wavelength(&s);
    let cells = detect_circulation_cells(&f, a.floor, smoothing)?;
    let raw = detect_vortices(&f, a.floor)?;
    println!("count {}", cells.len());
    println!("cells +{} −{}, phase singularities {} (net winding {})", cells.positive, cells.negative, raw.len(), raw.total_winding());
    let report = VortexReport {
        floor: a.floor,
        smoothing,
        cells: VortexSetRecord::from(&cells),
        singularities: VortexSetRecord::from(&raw),
    };
    let mut out = out_dir(&a.output)?;
    out.write("vortices.json", &io::to_json(&report)?)?;
    out.finish("vortices", params, Some(GridMeta::from(&grid)))?;
    Ok(())
}

fn semiclassical(a: SemiclassicalArgs) -> Outcome {
    let mut params = BTreeMap::new();
    a.state.record(&mut params);
    params.insert("format".into(), Format::from(a.format).name().into());
    params.insert("times".into(), a.times.to_string());
    if a.times == 0 {
        return Err(Failure::Flags("--times must be positive".into()));
    }
    let cfg = SemiclassicalConfig::uniform(a.state.amplitudes()?, a.state.params()?, a.times);
    let (nx, ny) = a.grid.nodes(128);
    a.grid.record((nx, ny), &mut params);
    let grid = match a.grid.extent {
        Extent::Auto => semiclassical_extent(&cfg, 6.0, nx, ny)?,
        Extent::Half(x, y) => FieldGrid::symmetric(x, y, nx, ny)?,
    };
    let curve = cfg.classical_curve();
    let fields: Vec<WaveField> = cfg
        .times
        .par_iter()
        .map(|&t| eval_semiclassical(&cfg, t, &grid))
        .collect::<Result<_, _>>()?;
    let mut out = out_dir(&a.output)?;
    let (wx, wy) = (cfg.params.omega_x(), cfg.params.omega_y());
    let mean_energy = wx * (cfg.amp.alpha.powi(2) + 0.5) + wy * (cfg.amp.beta_abs.powi(2) + 0.5);
    let mut csv = String::from("t,x_mean,y_mean,x_classical,y_classical\n");
    let mut worst: f64 = 0.0;
    for (k, (&t, f)) in cfg.times.iter().zip(&fields).enumerate() {
        let (xm, ym) = centroid(f);
        let (xc, yc) = curve.point(t);
        worst = worst.max((xm - xc).hypot(ym - yc));
        writeln!(csv, "{t:e},{xm:e},{ym:e},{xc:e},{yc:e}").unwrap();
        let meta = StateMeta {
            provenance: "semiclassical".into(),
            p: cfg.params.p,
            q: cfg.params.q,
            n: 0,
            omega0: cfg.params.omega0,
            energy: mean_energy,
            t: Some(t),
        };
        emit_field(&mut out, &format!("snap_{k:03}"), f, a.format.into(), Some(meta))?;
    }
    out.write("trajectory.csv", csv.as_bytes())?;
    println!("{} snapshots, max centroid deviation from the classical path {worst:.3e}", cfg.times.len());
    out.finish("semiclassical", params, Some(GridMeta::from(&grid)))?;
    Ok(())
}

fn run_verify(a: VerifyArgs) -> Outcome {
    let checks = verify::run_suite(&a.suite).ok_or_else(|| Failure::Flags(format!("unknown suite {}", a.suite)))?;
    let mut failed = 0;
    for c in &checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        failed += usize::from(!c.passed);
    }
    let mut out = out_dir(&a.output)?;
    out.write("verify.json", &io::to_json(&checks)?)?;
    let mut params = BTreeMap::new();
    params.insert("suite".into(), a.suite.clone());
    out.finish("verify", params, None)?;
    if failed > 0 {
        return Err(Failure::Verify(failed));
    }
    Ok(())
}
