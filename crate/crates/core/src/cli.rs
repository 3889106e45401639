//! Command-line front end. `run` parses an argument list, executes one
//! subcommand and returns the process exit status.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::dressed::{hybrid_levels, predict_dip};
use crate::error::Error;
use crate::oracle::{compare, OracleOptions};
use crate::output::{fmt_float, manifest_path, to_json, write_file, Cell, Csv, RunManifest};
use crate::params::{
    derive, parse_config, to_config_string, Config, DerivedParams, Model, PhysicalConstants, ZeroOrderMode, MHZ,
};
use crate::sensing::{linspace, mass_sweep, scan, DeltaGrid};
use crate::steady_state::{default_branch, solve_branches, sweep_xi, SteadyBranch};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_IO: i32 = 4;

/// Inversion used by `--mode fixed` when neither flag nor config gives one.
pub const DEFAULT_FIXED_Z0: f64 = -0.99;

#[derive(Debug, Parser)]
#[command(
    name = "vitsim",
    version,
    about = "Steady states, probe spectra and mass sensing for a vibrating atom in a driven cavity"
)]
pub struct Cli {
    /// Parameter file (TOML with [system], [drive], [numerics]).
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,
    /// Suppress warnings on stderr.
    #[arg(long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Steady branches over a drive sweep.
    Steady(SteadyArgs),
    /// Probe absorption and dispersion over a detuning window.
    Spectrum(SpectrumArgs),
    /// Dressed levels and the predicted window position.
    Dressed(DressedArgs),
    /// Compare the sideband response with direct time integration.
    Oracle(OracleArgs),
    /// Mass sweep, splitting calibration and per-mass spectra.
    Sense(SenseArgs),
    /// Atomic inversion against drive strength.
    #[command(name = "z0")]
    Z0(Z0Args),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    /// Inversion held at --z0.
    Fixed,
    /// Closed-form inversion of the photon number.
    #[value(name = "self")]
    SelfConsistent,
    /// Inversion balancing the full flow.
    Exact,
}

#[derive(Debug, Args)]
pub struct ModeFlags {
    /// How the inversion is obtained.
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Inversion for --mode fixed.
    #[arg(long, value_name = "VALUE", allow_hyphen_values = true)]
    pub z0: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SteadyArgs {
    /// Lowest drive, MHz.
    #[arg(long, default_value_t = 0.0)]
    pub xi_min: f64,
    /// Highest drive, MHz (default 2g).
    #[arg(long)]
    pub xi_max: Option<f64>,
    #[arg(long, default_value_t = 200)]
    pub xi_steps: usize,
    #[command(flatten)]
    pub mode: ModeFlags,
    /// Output CSV (default stdout).
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    /// Branch index in ascending photon number (default: lowest stable).
    #[arg(long)]
    pub branch: Option<usize>,
    /// Window start in units of g (default 0.5 ω₋).
    #[arg(long)]
    pub delta_min_g: Option<f64>,
    /// Window end in units of g (default 2 ω₋).
    #[arg(long)]
    pub delta_max_g: Option<f64>,
    #[arg(long, default_value_t = 1000)]
    pub delta_steps: usize,
    #[command(flatten)]
    pub mode: ModeFlags,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DressedArgs {
    /// Use the actual atom-cavity detuning instead of resonance.
    #[arg(long)]
    pub general: bool,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long)]
    pub branch: Option<usize>,
    #[arg(long, default_value_t = 0.15)]
    pub delta_over_g: f64,
    /// Probe amplitude relative to the drive.
    #[arg(long, default_value_t = 1e-3)]
    pub eps_ratio: f64,
    #[arg(long, default_value_t = 20)]
    pub periods: usize,
    /// Relative tolerance for pass/fail.
    #[arg(long, default_value_t = 1e-3)]
    pub tolerance: f64,
    #[command(flatten)]
    pub mode: ModeFlags,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SenseArgs {
    #[arg(long, default_value_t = 0.5e-25)]
    pub mass_min_kg: f64,
    #[arg(long, default_value_t = 1.5e-25)]
    pub mass_max_kg: f64,
    #[arg(long, default_value_t = 11)]
    pub mass_steps: usize,
    /// Points per spectrum over [0.5 ω₋, 2 ω₋].
    #[arg(long, default_value_t = 1000)]
    pub delta_steps: usize,
    #[command(flatten)]
    pub mode: ModeFlags,
    /// Calibration curve CSV; the fit summary goes to `<PATH>.fit.json`.
    #[arg(long, value_name = "PATH")]
    pub out_curve: Option<PathBuf>,
    /// Directory for one spectrum CSV per mass.
    #[arg(long, value_name = "DIR")]
    pub out_spectra: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Z0Args {
    /// Highest drive in units of g.
    #[arg(long, default_value_t = 2.0)]
    pub xi_max_g: f64,
    #[arg(long, default_value_t = 200)]
    pub steps: usize,
    #[command(flatten)]
    pub mode: ModeFlags,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Numerical(String),
    Library(Error),
    Io(PathBuf, std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Library(e)
    }
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Numerical(_) => EXIT_NUMERICAL,
            Failure::Library(e) if !e.is_numerical() => EXIT_USAGE,
            Failure::Library(_) => EXIT_NUMERICAL,
            Failure::Io(..) => EXIT_IO,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) | Failure::Numerical(m) => m.clone(),
            Failure::Library(e) => e.to_string(),
            Failure::Io(p, e) => format!("{}: {e}", p.display()),
        }
    }
}

struct Context {
    argv: Vec<String>,
    config: Config,
    derived: DerivedParams<f64>,
    model: Model<f64>,
    started: Instant,
}

impl Context {
    fn g_mhz(&self) -> f64 {
        self.config.params.g / MHZ
    }

    fn mode(&self, flags: &ModeFlags, default: ZeroOrderMode) -> Result<ZeroOrderMode, Failure> {
        let from_config = self.config.numerics.mode;
        let z0 = flags
            .z0
            .or(match from_config {
                Some(ZeroOrderMode::Fixed(z)) => Some(z),
                _ => None,
            })
            .unwrap_or(DEFAULT_FIXED_Z0);
        let mode = match flags.mode {
            Some(ModeArg::Fixed) => ZeroOrderMode::Fixed(z0),
            Some(ModeArg::SelfConsistent) => ZeroOrderMode::SelfConsistent,
            Some(ModeArg::Exact) => ZeroOrderMode::Exact,
            None if flags.z0.is_some() => ZeroOrderMode::Fixed(z0),
            None => from_config.unwrap_or(default),
        };
        if flags.z0.is_some() && !matches!(mode, ZeroOrderMode::Fixed(_)) {
            return Err(Failure::Usage("--z0 only applies to --mode fixed".into()));
        }
        if let ZeroOrderMode::Fixed(z) = mode {
            if !(-1.0..0.0).contains(&z) {
                return Err(Failure::Usage(format!("--z0 must lie in [-1, 0), got {z}")));
            }
        }
        Ok(mode)
    }

    fn pick_branch(&self, branches: &[SteadyBranch<f64>], requested: Option<usize>) -> Result<usize, Failure> {
        let requested = requested.or(self.config.numerics.branch);
        match requested {
            Some(i) if i < branches.len() => Ok(i),
            Some(i) => Err(Failure::Usage(format!("branch {i} requested but only {} exist", branches.len()))),
            None => {
                default_branch(branches).ok_or_else(|| Failure::Library(Error::Degenerate("no steady branch".into())))
            }
        }
    }

    /// Writes `contents` to `out` (plus manifest), or to stdout.
    fn emit(&self, sub: &str, out: Option<&Path>, contents: &str, extra: Vec<PathBuf>) -> Result<(), Failure> {
        match out {
            None => {
                print!("{contents}");
                Ok(())
            }
            Some(path) => {
                write_file(path, contents).map_err(|e| Failure::Io(path.to_path_buf(), e))?;
                let mut outputs = vec![path.to_path_buf()];
                outputs.extend(extra);
                let manifest = RunManifest {
                    subcommand: sub.to_string(),
                    argv: self.argv.clone(),
                    version: env!("CARGO_PKG_VERSION").to_string(),
                    params: self.config.params,
                    derived: self.derived,
                    config: to_config_string(&self.config.params, &self.config.numerics),
                    outputs,
                    duration_s: self.started.elapsed().as_secs_f64(),
                };
                let mpath = manifest_path(path);
                write_file(&mpath, &to_json(&manifest)).map_err(|e| Failure::Io(mpath, e))
            }
        }
    }
}

/// Parses `args` (program name first) and runs the subcommand.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let argv: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let level = if cli.quiet { "off" } else { "warn" };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).try_init();
    if cli.quiet {
        log::set_max_level(log::LevelFilter::Off);
    }
    let argv: Vec<String> = argv.iter().map(|a| a.to_string_lossy().into_owned()).collect();

    let result = match cli.threads {
        Some(0) => Err(Failure::Usage("--threads must be at least 1".into())),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(&cli, argv)),
            Err(e) => Err(Failure::Usage(format!("cannot start thread pool: {e}"))),
        },
        None => dispatch(&cli, argv),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("error: {}", f.message());
            f.code()
        }
    }
}

fn load(cli: &Cli, argv: Vec<String>) -> Result<Context, Failure> {
    let path = cli.config.as_ref().ok_or_else(|| Failure::Usage("--config PATH is required".into()))?;
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Io(path.clone(), e))?;
    let config = parse_config(&text)?;
    for w in &config.warnings {
        log::warn!("{w}");
    }
    let derived = derive(&config.params, &PhysicalConstants::default())?;
    let model = Model::new(&config.params, &derived);
    Ok(Context { argv, config, derived, model, started: Instant::now() })
}

fn dispatch(cli: &Cli, argv: Vec<String>) -> Result<(), Failure> {
    let ctx = load(cli, argv)?;
    match &cli.command {
        Command::Steady(a) => steady(&ctx, a),
        Command::Spectrum(a) => spectrum(&ctx, a),
        Command::Dressed(a) => dressed(&ctx, a),
        Command::Oracle(a) => oracle(&ctx, a),
        Command::Sense(a) => sense(&ctx, a),
        Command::Z0(a) => z0(&ctx, a),
    }
}

fn drive_grid(lo: f64, hi: f64, steps: usize) -> Result<Vec<f64>, Failure> {
    if steps == 0 || !(hi >= lo) || lo < 0.0 || (steps > 1 && hi == lo) {
        return Err(Failure::Usage(format!("invalid drive range [{lo}, {hi}] with {steps} steps")));
    }
    Ok(linspace(lo, hi, steps))
}

fn steady(ctx: &Context, a: &SteadyArgs) -> Result<(), Failure> {
    let mode = ctx.mode(&a.mode, ZeroOrderMode::SelfConsistent)?;
    let xi_mhz = drive_grid(a.xi_min, a.xi_max.unwrap_or(2.0 * ctx.g_mhz()), a.xi_steps)?;
    let grid: Vec<f64> = xi_mhz.iter().map(|x| ctx.model.to_model(x * MHZ)).collect();
    let rows = sweep_xi(&ctx.model, &grid, mode)?;
    let mut csv = Csv::new(&["xi_mhz", "branch_index", "u", "b0_sq", "z0", "stable"]);
    for (row, xi) in rows.iter().zip(&xi_mhz) {
        for (i, b) in row.branches.iter().enumerate() {
            csv.row(&[
                Cell::F(*xi),
                Cell::U(i),
                Cell::F(b.u),
                Cell::F(b.b0_sq()),
                Cell::F(b.z0),
                Cell::S(b.stable.as_str()),
            ]);
        }
    }
    ctx.emit("steady", a.out.as_deref(), &csv.render(), vec![])
}

fn z0(ctx: &Context, a: &Z0Args) -> Result<(), Failure> {
    let mode = ctx.mode(&a.mode, ZeroOrderMode::SelfConsistent)?;
    let xi_g = drive_grid(0.0, a.xi_max_g, a.steps)?;
    let rows = sweep_xi(&ctx.model, &xi_g, mode)?;
    let mut csv = Csv::new(&["xi_over_g", "branch_index", "u", "z0"]);
    for (row, xi) in rows.iter().zip(&xi_g) {
        for (i, b) in row.branches.iter().enumerate() {
            csv.row(&[Cell::F(*xi), Cell::U(i), Cell::F(b.u), Cell::F(b.z0)]);
        }
    }
    ctx.emit("z0", a.out.as_deref(), &csv.render(), vec![])
}

fn spectrum(ctx: &Context, a: &SpectrumArgs) -> Result<(), Failure> {
    let mode = ctx.mode(&a.mode, ZeroOrderMode::Exact)?;
    let branches = solve_branches(&ctx.model, mode)?;
    let idx = ctx.pick_branch(&branches, a.branch)?;
    let p = &ctx.config.params;
    let w = predict_dip(p, &ctx.derived);
    let lo = a.delta_min_g.map(|d| d * p.g).unwrap_or(0.5 * w);
    let hi = a.delta_max_g.map(|d| d * p.g).unwrap_or(2.0 * w);
    if a.delta_steps == 0 || !(hi > lo) {
        return Err(Failure::Usage(format!("invalid detuning window [{lo}, {hi}] rad/s")));
    }
    let s = scan(p, &branches[idx], &linspace(lo, hi, a.delta_steps))?;
    if !s.poles.is_empty() {
        log::warn!("{} detunings dropped at poles", s.poles.len());
    }
    let csv = spectrum_csv(&s, p.g);
    ctx.emit("spectrum", a.out.as_deref(), &csv.render(), vec![])
}

fn spectrum_csv(s: &crate::sensing::SpectrumScan<f64>, g: f64) -> Csv {
    let mut csv = Csv::new(&["delta_over_g", "mu_p", "nu_p", "abs_l_minus", "re_l_out_minus", "im_l_out_minus"]);
    for q in &s.points {
        csv.row(&[
            Cell::F(q.delta / g),
            Cell::F(q.mu_p),
            Cell::F(q.nu_p),
            Cell::F(q.abs_l_minus),
            Cell::F(q.l_out_minus[0]),
            Cell::F(q.l_out_minus[1]),
        ]);
    }
    csv
}

#[derive(Serialize)]
struct DressedDoc {
    kappa: f64,
    omega_plus: f64,
    omega_minus: f64,
    phi: f64,
    predicted_dip_over_g: f64,
}

fn dressed(ctx: &Context, a: &DressedArgs) -> Result<(), Failure> {
    let p = &ctx.config.params;
    let l = hybrid_levels(p, &ctx.derived, a.general);
    let doc = DressedDoc {
        kappa: l.kappa / MHZ,
        omega_plus: l.omega_plus / MHZ,
        omega_minus: l.omega_minus / MHZ,
        phi: l.phi,
        predicted_dip_over_g: l.omega_minus / p.g,
    };
    ctx.emit("dressed", a.out.as_deref(), &to_json(&doc), vec![])
}

fn oracle(ctx: &Context, a: &OracleArgs) -> Result<(), Failure> {
    let mode = ctx.mode(&a.mode, ZeroOrderMode::Exact)?;
    if !(a.eps_ratio > 0.0) || !(a.delta_over_g > 0.0) {
        return Err(Failure::Usage("--eps-ratio and --delta-over-g must be positive".into()));
    }
    let branches = solve_branches(&ctx.model, mode)?;
    let idx = ctx.pick_branch(&branches, a.branch)?;
    let reference = if ctx.model.xi > 0.0 { ctx.model.xi } else { ctx.model.g };
    let model = ctx.model.with_eps(a.eps_ratio * reference);
    let opts = OracleOptions { periods: a.periods, ..OracleOptions::default() };
    let report = compare(&branches[idx], &model, a.delta_over_g, a.tolerance, &opts)?;
    ctx.emit("oracle", a.out.as_deref(), &to_json(&report), vec![])
}

#[derive(Serialize)]
struct FitDoc {
    points: usize,
    slope_mhz_per_kg: Option<f64>,
    intercept_mhz: Option<f64>,
    r_squared: Option<f64>,
    residual_std_mhz: Option<f64>,
    fit_error: Option<String>,
    excluded: Vec<Excluded>,
    spectra: Vec<SpectrumFile>,
}

#[derive(Serialize)]
struct Excluded {
    mass_kg: f64,
    reason: String,
}

#[derive(Serialize)]
struct SpectrumFile {
    mass_kg: f64,
    file: String,
}

fn sense(ctx: &Context, a: &SenseArgs) -> Result<(), Failure> {
    let mode = ctx.mode(&a.mode, ZeroOrderMode::Exact)?;
    if a.mass_steps == 0 || !(a.mass_min_kg > 0.0) || !(a.mass_max_kg >= a.mass_min_kg) {
        return Err(Failure::Usage("invalid mass range".into()));
    }
    if a.delta_steps < 5 {
        return Err(Failure::Usage("--delta-steps must be at least 5".into()));
    }
    let masses = linspace(a.mass_min_kg, a.mass_max_kg, a.mass_steps);
    let sweep = mass_sweep(&ctx.config.params, &masses, &DeltaGrid::AroundPrediction { n: a.delta_steps }, mode)?;
    let g = ctx.config.params.g;

    let mut csv = Csv::new(&["mass_kg", "splitting_mhz", "dip_over_g", "contrast"]);
    for p in &sweep.points {
        csv.row(&[
            Cell::F(p.mass),
            Cell::F(p.report.splitting / MHZ),
            Cell::F(p.report.dip / g),
            Cell::F(p.report.contrast),
        ]);
    }

    let mut extra = Vec::new();
    let mut spectra = Vec::new();
    if let Some(dir) = &a.out_spectra {
        for (k, p) in sweep.points.iter().enumerate() {
            let name = format!("spectrum_{k:03}.csv");
            let path = dir.join(&name);
            write_file(&path, &spectrum_csv(&p.scan, g).render()).map_err(|e| Failure::Io(path.clone(), e))?;
            spectra.push(SpectrumFile { mass_kg: p.mass, file: name });
            extra.push(path);
        }
    }
    let fit = FitDoc {
        points: sweep.points.len(),
        slope_mhz_per_kg: sweep.curve.as_ref().map(|c| c.slope / MHZ),
        intercept_mhz: sweep.curve.as_ref().map(|c| c.intercept / MHZ),
        r_squared: sweep.curve.as_ref().map(|c| c.r_squared),
        residual_std_mhz: sweep.curve.as_ref().map(|c| c.residual_std / MHZ),
        fit_error: sweep.fit_error.clone(),
        excluded: sweep.excluded.iter().map(|(m, r)| Excluded { mass_kg: *m, reason: r.clone() }).collect(),
        spectra,
    };
    if let Some(path) = &a.out_curve {
        let mut fpath = path.as_os_str().to_owned();
        fpath.push(".fit.json");
        let fpath = PathBuf::from(fpath);
        write_file(&fpath, &to_json(&fit)).map_err(|e| Failure::Io(fpath.clone(), e))?;
        extra.insert(0, fpath);
    } else if let Some(c) = &sweep.curve {
        log::info!("fit: slope {} MHz/kg, r^2 {}", fmt_float(c.slope / MHZ), fmt_float(c.r_squared));
    }
    ctx.emit("sense", a.out_curve.as_deref(), &csv.render(), extra)?;
    match &sweep.fit_error {
        Some(e) => Err(Failure::Numerical(e.clone())),
        None => Ok(()),
    }
}
