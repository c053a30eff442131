//! Command-line front end: geometry generation, maps and scans, ensemble
//! sweeps with fits, and the self-verification suite.
//!
//! Subcommands: `gen`, `map`, `scan`, `extrema`, `sweep`, `fit`, `verify`.
//! Global flags `--seed`, `--threads`, `--out`, `--config`; a flat
//! `key = value` config file mirrors the flags one-to-one and flags override
//! file values. Exit codes: 0 success, 1 I/O, 2 usage, 3 verification
//! failure. Angles in output files are always radians.

mod io;

pub use io::{metadata_preamble, parse_flat_config, read_scaling_csv, ConfigEcho};

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analysis::{
    self, angular_map, extremum_scaling_sweep, plane_scan, AngularGrid, ConditionKind,
    ExtremumKind, FitResult, ScalingRow, ScalingTable, CONDITION_GRID, EXTREMUM_GRID,
};
use crate::correlations::DriveParams;
use crate::error::{Error, Result};
use crate::geometry::{self, GeometryRecipe};
use crate::structure;
use crate::vec3::{self, Vec3};
use crate::verify::{self, VerifyLevel};

#[derive(Parser, Debug)]
#[command(name = "photon-stats", version, about = "Photon correlation statistics of independent two-level emitters")]
pub struct Cli {
    /// Flat `key = value` config file; flags override file values.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Master seed for geometry sampling and ensemble realizations.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Worker threads for data-parallel evaluation (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Output file path.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a geometry file (chain, lattice, or random ball).
    Gen(GenArgs),
    /// Full angular map of intensity and autocorrelations (CSV).
    Map(MapArgs),
    /// Great-circle scan of the correlation functions in a plane (CSV).
    Scan(ScanArgs),
    /// Extremum of g2 over all observation directions (JSON).
    Extrema(ExtremaArgs),
    /// Ensemble scaling sweep over s or N, with automatic fit (CSV + JSON).
    Sweep(SweepArgs),
    /// Fit a scaling law to a table produced by sweep (JSON).
    Fit(FitArgs),
    /// Run the oracle/identity verification suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    Chain,
    Ball,
    Lattice2d,
    Lattice3d,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    /// Geometry kind.
    #[arg(value_enum)]
    pub kind: GenKind,
    /// Number of emitters (chain, ball).
    #[arg(long)]
    pub n: Option<usize>,
    /// Chain spacing (dimensionless, position times wavenumber).
    #[arg(long)]
    pub spacing: Option<f64>,
    /// Chain axis: x, y, z, or three comma-separated components.
    #[arg(long)]
    pub axis: Option<String>,
    /// Ball diameter (dimensionless).
    #[arg(long)]
    pub diameter: Option<f64>,
    /// Lattice counts per axis, comma-separated (2 or 3 values).
    #[arg(long)]
    pub counts: Option<String>,
    /// Lattice spacings per axis, comma-separated.
    #[arg(long)]
    pub spacings: Option<String>,
}

#[derive(Args, Debug)]
pub struct MapArgs {
    /// Geometry file written by `gen`.
    #[arg(long)]
    pub geometry: Option<PathBuf>,
    /// Saturation parameter.
    #[arg(long)]
    pub s: Option<f64>,
    /// Resolution as PHIxTHETA (e.g. 360x180).
    #[arg(long)]
    pub res: Option<String>,
    /// Extra correlation orders as comma-separated integers (adds gm_<m> columns).
    #[arg(long)]
    pub orders: Option<String>,
    /// Laser direction: x, y, z, or three comma-separated components.
    #[arg(long)]
    pub laser: Option<String>,
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    #[arg(long)]
    pub geometry: Option<PathBuf>,
    #[arg(long)]
    pub s: Option<f64>,
    /// Normal of the scan plane: x, y, z, or components.
    #[arg(long)]
    pub normal: Option<String>,
    /// Number of scan points along the great circle.
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub orders: Option<String>,
    #[arg(long)]
    pub laser: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WhichExtremum {
    Max,
    Min,
    Both,
}

#[derive(Args, Debug)]
pub struct ExtremaArgs {
    #[arg(long)]
    pub geometry: Option<PathBuf>,
    #[arg(long)]
    pub s: Option<f64>,
    /// Correlation order (2 = exact closed form, >= 3 leading order).
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, value_enum)]
    pub which: Option<WhichExtremum>,
    /// Coarse resolution as PHIxTHETA (default 720x360).
    #[arg(long)]
    pub res: Option<String>,
    /// Refinement levels (factor 4 each, default 5).
    #[arg(long)]
    pub levels: Option<usize>,
    #[arg(long)]
    pub laser: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepStatistic {
    /// Max of g2 over the sphere.
    MaxG2,
    /// Min of g2 over the sphere.
    MinG2,
    /// |S(2k)|^2 at the best numerically found destructive direction.
    S2kAtDest,
    /// (1 + |S|^2)/|S|^4 at the best S^(2) = 0 direction.
    AntibunchExpr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RecipeKind {
    Ball,
    Chain,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Geometry recipe re-sampled per realization.
    #[arg(long, value_enum)]
    pub recipe: Option<RecipeKind>,
    /// Ball diameter (default 6 pi).
    #[arg(long)]
    pub diameter: Option<f64>,
    /// Chain spacing.
    #[arg(long)]
    pub spacing: Option<f64>,
    /// Chain axis.
    #[arg(long)]
    pub axis: Option<String>,
    /// Saturation values, comma-separated (the control axis when > 1 value).
    #[arg(long, value_name = "LIST")]
    pub s_list: Option<String>,
    /// Emitter counts, comma-separated (the control axis when > 1 value).
    #[arg(long, value_name = "LIST")]
    pub n_list: Option<String>,
    /// Realizations per control value.
    #[arg(long)]
    pub realizations: Option<usize>,
    #[arg(long, value_enum)]
    pub statistic: Option<SweepStatistic>,
    /// Coarse resolution as PHIxTHETA.
    #[arg(long)]
    pub res: Option<String>,
    /// Coarse-grid seeds for the condition finders.
    #[arg(long)]
    pub seeds: Option<usize>,
    /// Control window `lo,hi` used by the automatic fit.
    #[arg(long)]
    pub fit_window: Option<String>,
    /// Fit output path (default: <out>.fit.json).
    #[arg(long)]
    pub fit_out: Option<PathBuf>,
    #[arg(long)]
    pub laser: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FitModel {
    /// y = a x^b (log-log least squares).
    Power,
    /// y = (1 + a N^b)/(a N^b)^2 (composite antibunching model).
    Antibunch,
}

#[derive(Args, Debug)]
pub struct FitArgs {
    /// Scaling-table CSV produced by sweep.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub model: Option<FitModel>,
    /// Control window `lo,hi`.
    #[arg(long)]
    pub window: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Level {
    Fast,
    Full,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub level: Option<Level>,
    /// Print the partition table for order m as JSON and exit.
    #[arg(long, value_name = "M")]
    pub dump_partitions: Option<usize>,
}

/// Exit code for an error: 1 for I/O and file-content problems, 2 for usage.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io(_) | Error::Parse { .. } => 1,
        _ => 2,
    }
}

struct Globals {
    cfg: BTreeMap<String, String>,
    seed: u64,
    out: Option<PathBuf>,
}

impl Globals {
    fn cfg_str(&self, key: &str) -> Option<&str> {
        self.cfg.get(key).map(String::as_str)
    }

    fn cfg_parse<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.cfg.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse::<T>().map(Some).map_err(|_| {
                Error::InvalidArgument(format!("config key '{key}': cannot parse '{raw}'"))
            }),
        }
    }

    fn out_path(&self) -> Result<&Path> {
        self.out.as_deref().ok_or_else(|| {
            Error::InvalidArgument("missing output path: pass --out or set 'out' in the config file".into())
        })
    }
}

fn required<T>(value: Option<T>, flag: &str) -> Result<T> {
    value.ok_or_else(|| Error::InvalidArgument(format!("missing required flag {flag}")))
}

/// Named axis or comma-separated components; must be a unit vector.
fn parse_direction(raw: &str, flag: &str) -> Result<Vec3> {
    let v = match raw {
        "x" => [1.0, 0.0, 0.0],
        "y" => [0.0, 1.0, 0.0],
        "z" => [0.0, 0.0, 1.0],
        other => {
            let parts: Vec<&str> = other.split(',').collect();
            if parts.len() != 3 {
                return Err(Error::InvalidArgument(format!(
                    "invalid direction '{other}' for {flag}: expected x, y, z, or three comma-separated components"
                )));
            }
            let mut v = [0.0; 3];
            for (slot, p) in v.iter_mut().zip(&parts) {
                *slot = p.trim().parse::<f64>().map_err(|_| {
                    Error::InvalidArgument(format!("invalid component '{p}' for {flag}"))
                })?;
            }
            v
        }
    };
    if !vec3::is_unit(v) {
        return Err(Error::InvalidArgument(format!(
            "{flag} must be a unit vector, got norm {}",
            vec3::norm(v)
        )));
    }
    Ok(v)
}

/// `PHIxTHETA`, e.g. `360x180`; returns `(n_theta, n_phi)`.
fn parse_resolution(raw: &str, flag: &str) -> Result<(usize, usize)> {
    let err = || Error::InvalidArgument(format!("invalid resolution '{raw}' for {flag}: expected PHIxTHETA like 360x180"));
    let (w, h) = raw.split_once('x').ok_or_else(err)?;
    let n_phi: usize = w.trim().parse().map_err(|_| err())?;
    let n_theta: usize = h.trim().parse().map_err(|_| err())?;
    if n_phi == 0 || n_theta == 0 {
        return Err(err());
    }
    Ok((n_theta, n_phi))
}

fn parse_f64_list(raw: &str, flag: &str) -> Result<Vec<f64>> {
    if raw.trim().is_empty() {
        return Ok(Vec::new());
    }
    raw.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidArgument(format!("invalid number '{p}' in {flag}")))
        })
        .collect()
}

fn parse_usize_list(raw: &str, flag: &str) -> Result<Vec<usize>> {
    if raw.trim().is_empty() {
        return Ok(Vec::new());
    }
    raw.split(',')
        .map(|p| {
            p.trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidArgument(format!("invalid integer '{p}' in {flag}")))
        })
        .collect()
}

fn parse_window(raw: &str, flag: &str) -> Result<(f64, f64)> {
    let list = parse_f64_list(raw, flag)?;
    if list.len() != 2 || list[0] > list[1] {
        return Err(Error::InvalidArgument(format!(
            "invalid window '{raw}' for {flag}: expected 'lo,hi'"
        )));
    }
    Ok((list[0], list[1]))
}

fn list_echo(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v:e}")).collect::<Vec<_>>().join(",")
}

/// Entry point used by the binary; returns the process exit code.
pub fn run(cli: Cli) -> Result<i32> {
    let cfg = match &cli.config {
        Some(path) => parse_flat_config(path)?,
        None => BTreeMap::new(),
    };
    let mut globals = Globals { cfg, seed: 0, out: cli.out.clone() };
    globals.seed = match cli.seed {
        Some(s) => s,
        None => globals.cfg_parse::<u64>("seed")?.unwrap_or(0),
    };
    if globals.out.is_none() {
        globals.out = globals.cfg_str("out").map(PathBuf::from);
    }
    let threads = match cli.threads {
        Some(t) => Some(t),
        None => globals.cfg_parse::<usize>("threads")?,
    };
    if let Some(t) = threads {
        // Ignore the error when a pool already exists (repeated in-process runs).
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }

    match &cli.command {
        Command::Gen(args) => cmd_gen(args, &globals).map(|()| 0),
        Command::Map(args) => cmd_map(args, &globals).map(|()| 0),
        Command::Scan(args) => cmd_scan(args, &globals).map(|()| 0),
        Command::Extrema(args) => cmd_extrema(args, &globals).map(|()| 0),
        Command::Sweep(args) => cmd_sweep(args, &globals).map(|()| 0),
        Command::Fit(args) => cmd_fit(args, &globals).map(|()| 0),
        Command::Verify(args) => cmd_verify(args, &globals),
    }
}

fn cmd_gen(args: &GenArgs, g: &Globals) -> Result<()> {
    let out = g.out_path()?;
    let mut echo = ConfigEcho::new("gen");
    echo.set("seed", g.seed).set("out", out.display());

    let config = match args.kind {
        GenKind::Chain => {
            let n = required(args.n.or(g.cfg_parse("n")?), "--n")?;
            let spacing = args.spacing.or(g.cfg_parse("spacing")?).unwrap_or(1.0);
            let axis_raw = args
                .axis
                .clone()
                .or_else(|| g.cfg_str("axis").map(String::from))
                .unwrap_or_else(|| "x".into());
            let axis = parse_direction(&axis_raw, "--axis")?;
            echo.set("kind", "chain").set("n", n).set("spacing", format!("{spacing:e}")).set("axis", &axis_raw);
            geometry::generate_chain(n, spacing, axis)?
        }
        GenKind::Ball => {
            let n = required(args.n.or(g.cfg_parse("n")?), "--n")?;
            let diameter = required(args.diameter.or(g.cfg_parse("diameter")?), "--diameter")?;
            echo.set("kind", "ball").set("n", n).set("diameter", format!("{diameter:e}"));
            geometry::sample_ball(n, diameter, g.seed)?
        }
        GenKind::Lattice2d | GenKind::Lattice3d => {
            let dims = if args.kind == GenKind::Lattice2d { 2 } else { 3 };
            let counts_raw = required(
                args.counts.clone().or_else(|| g.cfg_str("counts").map(String::from)),
                "--counts",
            )?;
            let counts = parse_usize_list(&counts_raw, "--counts")?;
            if counts.len() != dims {
                return Err(Error::InvalidArgument(format!(
                    "--counts must list {dims} values for this lattice kind"
                )));
            }
            let spacings_raw = args
                .spacings
                .clone()
                .or_else(|| g.cfg_str("spacings").map(String::from))
                .unwrap_or_else(|| vec!["1.0"; dims].join(","));
            let spacings = parse_f64_list(&spacings_raw, "--spacings")?;
            echo.set("kind", if dims == 2 { "lattice2d" } else { "lattice3d" })
                .set("counts", &counts_raw)
                .set("spacings", &spacings_raw);
            geometry::generate_lattice(&counts, &spacings)?
        }
    };

    let body = serde_json::to_string_pretty(&config).expect("serializable") + "\n";
    io::write_with_preamble(out, &metadata_preamble(&echo, g.seed), &body)?;
    let bounding = config.positions.iter().map(|p| vec3::norm(*p)).fold(0.0, f64::max);
    println!(
        "wrote {}: N = {}, kind = {:?}, bounding radius = {:.6}",
        out.display(),
        config.len(),
        config.kind,
        bounding
    );
    Ok(())
}

/// Shared resolution of (geometry, drive, orders) for map/scan/extrema.
fn resolve_target(
    geometry: &Option<PathBuf>,
    s: Option<f64>,
    laser: &Option<String>,
    g: &Globals,
    echo: &mut ConfigEcho,
) -> Result<(geometry::EmitterConfig, DriveParams)> {
    let geometry_path = geometry
        .clone()
        .or_else(|| g.cfg_str("geometry").map(PathBuf::from));
    let geometry_path = required(geometry_path, "--geometry")?;
    let config = geometry::load_config(&geometry_path)?;
    let s = required(s.or(g.cfg_parse("s")?), "--s")?;
    let laser_raw = laser
        .clone()
        .or_else(|| g.cfg_str("laser").map(String::from))
        .unwrap_or_else(|| "z".into());
    let k_laser = parse_direction(&laser_raw, "--laser")?;
    echo.set("geometry", geometry_path.display())
        .set("s", format!("{s:e}"))
        .set("laser", &laser_raw);
    Ok((config, DriveParams::new(s, k_laser)?))
}

fn resolve_orders(orders: &Option<String>, g: &Globals) -> Result<Vec<usize>> {
    let raw = orders
        .clone()
        .or_else(|| g.cfg_str("orders").map(String::from))
        .unwrap_or_default();
    let mut orders = parse_usize_list(&raw, "--orders")?;
    orders.sort_unstable();
    orders.dedup();
    if orders.iter().any(|&m| !(1..=structure::MAX_ORDER).contains(&m)) {
        return Err(Error::InvalidArgument(format!(
            "--orders entries must lie in 1..={}",
            structure::MAX_ORDER
        )));
    }
    Ok(orders)
}

fn cmd_map(args: &MapArgs, g: &Globals) -> Result<()> {
    let out = g.out_path()?.to_path_buf();
    let mut echo = ConfigEcho::new("map");
    let (config, drive) = resolve_target(&args.geometry, args.s, &args.laser, g, &mut echo)?;
    let res_raw = args
        .res
        .clone()
        .or_else(|| g.cfg_str("res").map(String::from))
        .unwrap_or_else(|| "360x180".into());
    let (n_theta, n_phi) = parse_resolution(&res_raw, "--res")?;
    let orders = resolve_orders(&args.orders, g)?;
    echo.set("res", &res_raw).set("out", out.display());
    if !orders.is_empty() {
        echo.set("orders", orders.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(","));
    }

    let grid = AngularGrid::new(n_theta, n_phi)?;
    let records = angular_map(&config, &drive, &grid, &orders)?;
    let points: Vec<(f64, f64)> = (0..grid.len()).map(|i| grid.angles(i)).collect();
    let body = io::records_csv(&points, &records, &orders);
    io::write_with_preamble(&out, &metadata_preamble(&echo, g.seed), &body)?;
    println!("wrote {}: {} rows ({}x{} grid)", out.display(), records.len(), n_phi, n_theta);
    Ok(())
}

fn cmd_scan(args: &ScanArgs, g: &Globals) -> Result<()> {
    let out = g.out_path()?.to_path_buf();
    let mut echo = ConfigEcho::new("scan");
    let (config, drive) = resolve_target(&args.geometry, args.s, &args.laser, g, &mut echo)?;
    let normal_raw = args
        .normal
        .clone()
        .or_else(|| g.cfg_str("normal").map(String::from))
        .unwrap_or_else(|| "y".into());
    let normal = parse_direction(&normal_raw, "--normal")?;
    let points = args.points.or(g.cfg_parse("points")?).unwrap_or(720);
    let orders = resolve_orders(&args.orders, g)?;
    echo.set("normal", &normal_raw).set("points", points).set("out", out.display());

    let scan = plane_scan(&config, &drive, normal, points, &orders)?;
    // For scans the first column is the scan angle; the second is the
    // azimuth of k_obs (informational).
    let angles: Vec<(f64, f64)> = scan
        .iter()
        .map(|(angle, rec)| {
            let k = rec.k.k_obs();
            (*angle, k[1].atan2(k[0]))
        })
        .collect();
    let records: Vec<_> = scan.into_iter().map(|(_, rec)| rec).collect();
    let body = io::records_csv(&angles, &records, &orders);
    io::write_with_preamble(&out, &metadata_preamble(&echo, g.seed), &body)?;
    println!("wrote {}: {} scan points", out.display(), records.len());
    Ok(())
}

fn cmd_extrema(args: &ExtremaArgs, g: &Globals) -> Result<()> {
    let out = g.out_path()?.to_path_buf();
    let mut echo = ConfigEcho::new("extrema");
    let (config, drive) = resolve_target(&args.geometry, args.s, &args.laser, g, &mut echo)?;
    let m = args.m.or(g.cfg_parse("m")?).unwrap_or(2);
    let which = args.which.unwrap_or(WhichExtremum::Both);
    let res_raw = args
        .res
        .clone()
        .or_else(|| g.cfg_str("res").map(String::from))
        .unwrap_or_else(|| format!("{}x{}", EXTREMUM_GRID.1, EXTREMUM_GRID.0));
    let resolution = parse_resolution(&res_raw, "--res")?;
    let levels = args.levels.or(g.cfg_parse("levels")?).unwrap_or(5);
    echo.set("m", m)
        .set("which", format!("{which:?}").to_lowercase())
        .set("res", &res_raw)
        .set("levels", levels)
        .set("out", out.display());

    let mut results = Vec::new();
    let kinds: &[ExtremumKind] = match which {
        WhichExtremum::Max => &[ExtremumKind::Max],
        WhichExtremum::Min => &[ExtremumKind::Min],
        WhichExtremum::Both => &[ExtremumKind::Max, ExtremumKind::Min],
    };
    for &kind in kinds {
        let r = analysis::extremum_search_with(&config, &drive, m, kind, resolution, levels)?;
        results.push(serde_json::json!({
            "which": match kind { ExtremumKind::Max => "max", ExtremumKind::Min => "min" },
            "theta": r.theta,
            "phi": r.phi,
            "k_obs": r.k_obs,
            "value": r.value,
        }));
        println!(
            "{} g2 = {:e} at theta = {:.6}, phi = {:.6}",
            match kind { ExtremumKind::Max => "max", ExtremumKind::Min => "min" },
            r.value,
            r.theta,
            r.phi
        );
    }
    let body = serde_json::to_string_pretty(&serde_json::json!({ "m": m, "s": drive.s(), "results": results }))
        .expect("serializable")
        + "\n";
    io::write_with_preamble(&out, &metadata_preamble(&echo, g.seed), &body)?;
    Ok(())
}

fn cmd_sweep(args: &SweepArgs, g: &Globals) -> Result<()> {
    let out = g.out_path()?.to_path_buf();
    let mut echo = ConfigEcho::new("sweep");

    let recipe_kind = args.recipe.unwrap_or(RecipeKind::Ball);
    let laser_raw = args
        .laser
        .clone()
        .or_else(|| g.cfg_str("laser").map(String::from))
        .unwrap_or_else(|| "z".into());
    let k_laser = parse_direction(&laser_raw, "--laser")?;

    let s_raw = args
        .s_list
        .clone()
        .or_else(|| g.cfg_str("s-list").map(String::from))
        .unwrap_or_else(|| "1e-6".into());
    let s_list = parse_f64_list(&s_raw, "--s-list")?;
    let n_raw = args
        .n_list
        .clone()
        .or_else(|| g.cfg_str("n-list").map(String::from))
        .unwrap_or_else(|| "100".into());
    let n_list = parse_usize_list(&n_raw, "--n-list")?;
    if s_list.is_empty() {
        return Err(Error::InvalidArgument("--s-list is empty".into()));
    }
    if n_list.is_empty() {
        return Err(Error::InvalidArgument("--n-list is empty".into()));
    }
    if s_list.iter().any(|&s| !(s.is_finite() && s > 0.0)) {
        return Err(Error::InvalidArgument("--s-list entries must be positive".into()));
    }
    if s_list.len() > 1 && n_list.len() > 1 {
        return Err(Error::InvalidArgument(
            "sweep one control axis at a time: either --s-list or --n-list may have multiple values".into(),
        ));
    }

    let realizations = args.realizations.or(g.cfg_parse("realizations")?).unwrap_or(1);
    if realizations < 1 {
        return Err(Error::InvalidArgument("--realizations must be at least 1".into()));
    }
    let statistic = args.statistic.unwrap_or(SweepStatistic::MaxG2);
    let n_seeds = args.seeds.or(g.cfg_parse("seeds")?).unwrap_or(8);

    let recipe = match recipe_kind {
        RecipeKind::Ball => {
            let diameter = args
                .diameter
                .or(g.cfg_parse("diameter")?)
                .unwrap_or(6.0 * std::f64::consts::PI);
            echo.set("recipe", "ball").set("diameter", format!("{diameter:e}"));
            GeometryRecipe::Ball { n: n_list[0], diameter }
        }
        RecipeKind::Chain => {
            let spacing = args.spacing.or(g.cfg_parse("spacing")?).unwrap_or(1.0);
            let axis_raw = args
                .axis
                .clone()
                .or_else(|| g.cfg_str("axis").map(String::from))
                .unwrap_or_else(|| "x".into());
            let axis = parse_direction(&axis_raw, "--axis")?;
            echo.set("recipe", "chain").set("spacing", format!("{spacing:e}")).set("axis", &axis_raw);
            GeometryRecipe::Chain { n: n_list[0], spacing, axis }
        }
    };

    let statistic_name = match statistic {
        SweepStatistic::MaxG2 => "max_g2",
        SweepStatistic::MinG2 => "min_g2",
        SweepStatistic::S2kAtDest => "s2k_at_dest",
        SweepStatistic::AntibunchExpr => "antibunch_expr",
    };
    echo.set("statistic", statistic_name)
        .set("s-list", list_echo(&s_list))
        .set("n-list", n_list.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(","))
        .set("realizations", realizations)
        .set("laser", &laser_raw)
        .set("out", out.display());

    let control_is_n = n_list.len() > 1;
    let table = match statistic {
        SweepStatistic::MaxG2 | SweepStatistic::MinG2 => {
            let res_raw = args
                .res
                .clone()
                .or_else(|| g.cfg_str("res").map(String::from))
                .unwrap_or_else(|| format!("{}x{}", EXTREMUM_GRID.1, EXTREMUM_GRID.0));
            let resolution = parse_resolution(&res_raw, "--res")?;
            echo.set("res", &res_raw);
            let pick = |pair: (ScalingTable, ScalingTable)| match statistic {
                SweepStatistic::MaxG2 => pair.0,
                _ => pair.1,
            };
            if control_is_n {
                let mut rows = Vec::new();
                for (row_idx, &n) in n_list.iter().enumerate() {
                    let row_seed = analysis::stable_hash(g.seed, row_idx as u64);
                    let tables = extremum_scaling_sweep(
                        &recipe.with_count(n),
                        k_laser,
                        &s_list,
                        realizations,
                        row_seed,
                        resolution,
                    )?;
                    let row = &pick(tables).rows[0];
                    rows.push(ScalingRow { control: n as f64, ..*row });
                }
                ScalingTable { rows }
            } else {
                pick(extremum_scaling_sweep(
                    &recipe,
                    k_laser,
                    &s_list,
                    realizations,
                    g.seed,
                    resolution,
                )?)
            }
        }
        SweepStatistic::S2kAtDest | SweepStatistic::AntibunchExpr => {
            if s_list.len() > 1 {
                return Err(Error::InvalidArgument(format!(
                    "statistic {statistic_name} is drive-independent; sweep --n-list instead of --s-list"
                )));
            }
            let res_raw = args
                .res
                .clone()
                .or_else(|| g.cfg_str("res").map(String::from))
                .unwrap_or_else(|| format!("{}x{}", CONDITION_GRID.1, CONDITION_GRID.0));
            let resolution = parse_resolution(&res_raw, "--res")?;
            echo.set("res", &res_raw).set("seeds", n_seeds);
            let kind = match statistic {
                SweepStatistic::S2kAtDest => ConditionKind::Destructive,
                _ => ConditionKind::GeneralizedAntibunch,
            };
            analysis::condition_scaling_sweep(
                &recipe,
                k_laser,
                &n_list,
                kind,
                n_seeds,
                realizations,
                g.seed,
                resolution,
            )?
        }
    };
    table.validate()?;

    let preamble = metadata_preamble(&echo, g.seed);
    io::write_with_preamble(&out, &preamble, &io::scaling_csv(&table))?;
    println!("wrote {}: {} rows, statistic {statistic_name}", out.display(), table.rows.len());

    // Automatic fit over the requested control window.
    let window = match args
        .fit_window
        .clone()
        .or_else(|| g.cfg_str("fit-window").map(String::from))
    {
        Some(raw) => Some(parse_window(&raw, "--fit-window")?),
        None => None,
    };
    let fitted: Vec<&ScalingRow> = table
        .rows
        .iter()
        .filter(|r| window.is_none_or(|(lo, hi)| r.control >= lo && r.control <= hi))
        .collect();
    let controls: Vec<f64> = fitted.iter().map(|r| r.control).collect();
    let means: Vec<f64> = fitted.iter().map(|r| r.mean).collect();
    let min_points = if statistic == SweepStatistic::AntibunchExpr { 3 } else { 2 };
    if controls.len() >= min_points {
        let fit = match statistic {
            SweepStatistic::AntibunchExpr => analysis::antibunch_model_fit(&controls, &means)?,
            _ => analysis::power_law_fit(&controls, &means)?,
        };
        let fit_path = match &args.fit_out {
            Some(p) => p.clone(),
            None => {
                let mut p = out.as_os_str().to_owned();
                p.push(".fit.json");
                PathBuf::from(p)
            }
        };
        io::write_with_preamble(&fit_path, &preamble, &io::fit_json(&fit))?;
        println!("wrote {}: a = {:e}, b = {:.4}", fit_path.display(), fit.a, fit.b);
    } else {
        println!("skipping fit: only {} row(s) in the fit window", controls.len());
    }
    Ok(())
}

fn cmd_fit(args: &FitArgs, g: &Globals) -> Result<()> {
    let out = g.out_path()?.to_path_buf();
    let input = args
        .input
        .clone()
        .or_else(|| g.cfg_str("input").map(PathBuf::from));
    let input = required(input, "--input")?;
    let model = args.model.unwrap_or(FitModel::Power);
    let table = read_scaling_csv(&input)?;
    let window = match args.window.clone().or_else(|| g.cfg_str("window").map(String::from)) {
        Some(raw) => Some(parse_window(&raw, "--window")?),
        None => None,
    };
    let rows: Vec<&ScalingRow> = table
        .rows
        .iter()
        .filter(|r| window.is_none_or(|(lo, hi)| r.control >= lo && r.control <= hi))
        .collect();
    let controls: Vec<f64> = rows.iter().map(|r| r.control).collect();
    let means: Vec<f64> = rows.iter().map(|r| r.mean).collect();
    let fit: FitResult = match model {
        FitModel::Power => analysis::power_law_fit(&controls, &means)?,
        FitModel::Antibunch => analysis::antibunch_model_fit(&controls, &means)?,
    };
    let mut echo = ConfigEcho::new("fit");
    echo.set("input", input.display())
        .set("model", format!("{model:?}").to_lowercase())
        .set("out", out.display());
    if let Some((lo, hi)) = window {
        echo.set("window", format!("{lo:e},{hi:e}"));
    }
    io::write_with_preamble(&out, &metadata_preamble(&echo, g.seed), &io::fit_json(&fit))?;
    println!("wrote {}: a = {:e}, b = {:.4}, rms log residual = {:.4}", out.display(), fit.a, fit.b, fit.rms_log_residual);
    Ok(())
}

fn cmd_verify(args: &VerifyArgs, g: &Globals) -> Result<i32> {
    if let Some(m) = args.dump_partitions {
        let terms = structure::enumerate_partitions(m)?;
        println!("{}", serde_json::to_string_pretty(&terms).expect("serializable"));
        return Ok(0);
    }
    let level = match args.level.unwrap_or(Level::Fast) {
        Level::Fast => VerifyLevel::Fast,
        Level::Full => VerifyLevel::Full,
    };
    let _ = g;
    let reports = verify::run(level);
    let mut all_passed = true;
    for report in &reports {
        for check in &report.checks {
            println!("[{}] {}: {}", if check.passed { "PASS" } else { "FAIL" }, report.group, check.name);
        }
        all_passed &= report.passed();
    }
    if all_passed {
        println!("verify: all groups passed");
        Ok(0)
    } else {
        for report in &reports {
            if let Some(failure) = report.first_failure() {
                // Inputs printed verbatim so the case can be replayed.
                println!("first failing case ({}): {}", report.group, failure.detail);
                break;
            }
        }
        Ok(3)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn direction_parsing() {
        assert_eq!(parse_direction("x", "--axis").unwrap(), [1.0, 0.0, 0.0]);
        assert_eq!(parse_direction("0,0,1", "--laser").unwrap(), [0.0, 0.0, 1.0]);
        let err = parse_direction("q", "--axis").unwrap_err();
        assert!(err.to_string().contains("--axis"), "message names the flag: {err}");
        assert!(parse_direction("1,1,0", "--axis").is_err(), "non-unit rejected");
    }

    #[test]
    fn resolution_parsing() {
        assert_eq!(parse_resolution("360x180", "--res").unwrap(), (180, 360));
        assert!(parse_resolution("360", "--res").is_err());
        assert!(parse_resolution("0x10", "--res").is_err());
    }

    #[test]
    fn exit_codes_by_error_class() {
        assert_eq!(exit_code(&Error::InvalidArgument("x".into())), 2);
        assert_eq!(
            exit_code(&Error::Io(std::io::Error::new(std::io::ErrorKind::NotFound, "gone"))),
            1
        );
        assert_eq!(
            exit_code(&Error::Parse { path: "f".into(), message: "m".into() }),
            1
        );
    }

    #[test]
    fn cli_parses_representative_invocations() {
        use clap::Parser;
        let cli = Cli::try_parse_from([
            "photon-stats", "gen", "ball", "--n", "100", "--diameter", "18.8495559", "--seed", "7",
            "--out", "ball.json",
        ])
        .unwrap();
        assert!(matches!(cli.command, Command::Gen(_)));
        assert_eq!(cli.seed, Some(7));

        let cli = Cli::try_parse_from([
            "photon-stats", "sweep", "--statistic", "max-g2", "--s-list", "1e-6,1e-5,1e-4",
            "--realizations", "10", "--out", "t.csv",
        ])
        .unwrap();
        assert!(matches!(cli.command, Command::Sweep(_)));
    }
}
