//! `hml`: command-line front end. Each subcommand wraps one library
//! operation, writes its CSV/JSON outputs with the run configuration echoed
//! in the header, and exits with
//! 0 (pass), 1 (numeric check failed), 2 (solver failure) or 64 (usage).

use clap::{Args, Parser, Subcommand};
use hml::localmodel::{Cutoff, LocalModel};
use hml::metricdiff::{decay_scan, sf_disk_consistency, stokes_check, DiskGrid};
use hml::painleve::solve_u1;
use hml::poly::HolomorphicPoly;
use hml::report::{canonical_json, fmt17, write_csv, write_rows};
use hml::spectral::{envelope_fit, periods, QuadraticDifferential};
use hml::sunform::{gauge_fix, random_instance, report as gauge_report};
use hml::varsolve::VarGrid;
use hml::Error;
use rand::SeedableRng;
use serde::Serialize;
use serde_json::json;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "hml", version, about = "Local models of the Hitchin metric near simple branch points")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
enum Cmd {
    /// Solve the radial model ODE for u_1 and write r,u,du_dr.
    SolveU(SolveU),
    /// Scan g_app - g_sf on the disk along a ray of t and fit the decay.
    DecayScan(DecayScanArgs),
    /// Compare the disk integral of the model-vs-limit variation with the boundary form.
    StokesCheck(StokesArgs),
    /// Check the Coulomb-gauge identity on seeded random polynomial fields.
    IdentityCheck(IdentityArgs),
    /// SU(n) infinitesimal gauge fixing on seeded random block fields.
    GaugeFix(GaugeArgs),
    /// Saddle-connection periods of a planar quadratic differential.
    Periods(PeriodsArgs),
    /// Semiflat disk value against the spectral-cover integral.
    SfConsistency(SfArgs),
}

#[derive(Args, Debug, Serialize)]
struct ProfileArgs {
    #[arg(long, default_value_t = 1e-4)]
    rmin: f64,
    #[arg(long, default_value_t = 12.0)]
    rmax: f64,
    #[arg(long, default_value_t = 4000)]
    nodes: usize,
}

#[derive(Args, Debug, Serialize)]
struct SolveU {
    #[command(flatten)]
    profile: ProfileArgs,
    #[arg(long, default_value = "u1.csv")]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct DiskArgs {
    #[arg(long, default_value_t = 400)]
    nr: usize,
    #[arg(long, default_value_t = 32)]
    ntheta: usize,
}

#[derive(Args, Debug, Serialize)]
struct CutoffArgs {
    #[arg(long, default_value_t = 0.25)]
    r1: f64,
    #[arg(long, default_value_t = 1.0)]
    r2: f64,
}

#[derive(Args, Debug, Serialize)]
struct DecayScanArgs {
    #[command(flatten)]
    profile: ProfileArgs,
    #[command(flatten)]
    disk: DiskArgs,
    #[command(flatten)]
    cutoff: CutoffArgs,
    /// Ascending coefficients of Pdot, e.g. `1` or `0,1+0.5i`.
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pdot: String,
    #[arg(long, default_value_t = 3.0)]
    t_min: f64,
    #[arg(long, default_value_t = 24.0)]
    t_max: f64,
    #[arg(long, default_value_t = 12)]
    t_count: usize,
    #[arg(long, default_value_t = 1e-5)]
    var_rmin: f64,
    #[arg(long, default_value_t = 4000)]
    var_nodes: usize,
    #[arg(long, default_value = "decay.csv")]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct StokesArgs {
    #[command(flatten)]
    profile: ProfileArgs,
    #[command(flatten)]
    disk: DiskArgs,
    #[command(flatten)]
    cutoff: CutoffArgs,
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pdot: String,
    /// Comma-separated values of t.
    #[arg(long, default_value = "4,8")]
    t: String,
    #[arg(long, default_value_t = 1e-4)]
    tol: f64,
    #[arg(long, default_value = "stokes.json")]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct IdentityArgs {
    #[arg(long, default_value_t = 100)]
    count: usize,
    /// Comma-separated ranks cycled over the instances.
    #[arg(long, default_value = "2,3,4")]
    ranks: String,
    #[arg(long, default_value_t = 2)]
    degree: i32,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, default_value = "identity.json")]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct GaugeArgs {
    #[arg(long, default_value_t = 4)]
    n: usize,
    /// Number of ramified 2x2 blocks.
    #[arg(long, default_value_t = 1)]
    ell: usize,
    /// Give every ramified block after the first its own coordinate.
    #[arg(long)]
    two_coordinate: bool,
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value = "gauge.json")]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct PeriodsArgs {
    /// Ascending coefficients of q2.
    #[arg(long, default_value = "-1,0,1", allow_hyphen_values = true)]
    q2: String,
    /// Comma-separated values of t for the envelope fit.
    #[arg(long)]
    t: Option<String>,
    #[arg(long, default_value = "periods.csv")]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct SfArgs {
    #[command(flatten)]
    disk: DiskArgs,
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pdot: String,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, default_value = "sf.json")]
    out: PathBuf,
}

enum Outcome {
    Pass,
    Fail(String),
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> hml::Result<Vec<T>> {
    s.split(',')
        .map(|t| t.trim().parse::<T>().map_err(|_| Error::Invalid(format!("bad {what} value '{t}'"))))
        .collect()
}

fn config_lines(cmd: &Cmd) -> hml::Result<Vec<String>> {
    let cfg = serde_json::to_string(&canonical_json(cmd)?)?;
    Ok(vec![format!("hml {}", env!("CARGO_PKG_VERSION")), format!("config: {cfg}")])
}

fn write_report<T: Serialize>(path: &Path, cmd: &Cmd, result: &T) -> hml::Result<()> {
    let v = json!({
        "hml_version": env!("CARGO_PKG_VERSION"),
        "config": canonical_json(cmd)?,
        "result": canonical_json(result)?,
    });
    std::fs::write(path, serde_json::to_string_pretty(&v)? + "\n")?;
    Ok(())
}

fn disk(d: &DiskArgs) -> DiskGrid {
    DiskGrid { n_r: d.nr, n_theta: d.ntheta }
}

fn run(cmd: &Cmd) -> hml::Result<Outcome> {
    let header = config_lines(cmd)?;
    match cmd {
        Cmd::SolveU(a) => {
            let p = &a.profile;
            let u = solve_u1(p.rmin, p.rmax, p.nodes)?;
            u.write_csv(&a.out, &header)?;
            let window = ((3.0f64).min(p.rmax / 3.0), (10.0f64).min(p.rmax));
            let dev = u.bessel_match(window.0, window.1)?;
            let flagged = dev > 0.01;
            let side = json!({
                "nodes": u.len(),
                "residual": u.residual,
                "newton_residual": u.newton_residual,
                "iterations": u.iterations,
                "c0": u.c0,
                "bessel_match": { "window": [window.0, window.1], "max_rel_dev": dev, "flagged": flagged },
            });
            write_report(&a.out.with_extension("json"), cmd, &side)?;
            Ok(if u.residual > 1e-8 {
                Outcome::Fail(format!("ODE residual {:.3e} above 1e-8", u.residual))
            } else if flagged {
                Outcome::Fail(format!("Bessel match off by {dev:.3e} on [{}, {}]", window.0, window.1))
            } else {
                Outcome::Pass
            })
        }
        Cmd::DecayScan(a) => {
            let p = &a.profile;
            let u = solve_u1(p.rmin, p.rmax, p.nodes)?;
            let pdot = HolomorphicPoly::parse(&a.pdot)?;
            if a.t_count < 2 || !(a.t_max > a.t_min) {
                return Err(Error::Invalid("need t_count >= 2 and t_max > t_min".into()));
            }
            let ts: Vec<f64> = (0..a.t_count)
                .map(|i| a.t_min * (a.t_max / a.t_min).powf(i as f64 / (a.t_count - 1) as f64))
                .collect();
            let cutoff = Cutoff::new(a.cutoff.r1, a.cutoff.r2)?;
            let var = VarGrid { r_min: a.var_rmin, n_nodes: a.var_nodes };
            let rep = decay_scan(&u, cutoff, &pdot, &ts, disk(&a.disk), var)?;
            write_csv(&a.out, &header, "t,g_app,g_sf,diff,term_app_model,term_model_inf", rep.csv_rows())?;
            write_report(&a.out.with_extension("json"), cmd, &rep)?;
            Ok(if rep.r_squared < 0.99 {
                Outcome::Fail(format!("decay fit r^2 = {:.4} below 0.99", rep.r_squared))
            } else if !rep.strictly_decreasing || rep.gamma_fit <= 0.0 {
                Outcome::Fail("difference is not decaying".into())
            } else {
                Outcome::Pass
            })
        }
        Cmd::StokesCheck(a) => {
            let p = &a.profile;
            let u = solve_u1(p.rmin, p.rmax, p.nodes)?;
            let pdot = HolomorphicPoly::parse(&a.pdot)?;
            let cutoff = Cutoff::new(a.cutoff.r1, a.cutoff.r2)?;
            let mut rows = Vec::new();
            for t in parse_list::<f64>(&a.t, "t")? {
                let m = LocalModel::new(&u, t, cutoff)?;
                rows.push(stokes_check(&m, &pdot, disk(&a.disk))?);
            }
            write_report(&a.out, cmd, &rows)?;
            let worst = rows.iter().map(|r| r.rel_err).fold(0.0, f64::max);
            Ok(if worst > a.tol { Outcome::Fail(format!("relative error {worst:.3e} above {}", a.tol)) } else { Outcome::Pass })
        }
        Cmd::IdentityCheck(a) => {
            let ranks = parse_list::<usize>(&a.ranks, "rank")?;
            let rep = hml::defalg::coulomb_batch(a.seed, a.count, &ranks, a.degree)?;
            write_report(&a.out, cmd, &rep)?;
            let worst = rep.max_re_residual.max(rep.max_im_residual);
            Ok(if worst > a.tol { Outcome::Fail(format!("residual {worst:.3e} above {}", a.tol)) } else { Outcome::Pass })
        }
        Cmd::GaugeFix(a) => {
            let mut reps = Vec::new();
            for k in 0..a.count {
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(a.seed.wrapping_add(k as u64));
                let (phi, pd) = random_instance(&mut rng, a.n, a.ell, a.two_coordinate)?;
                let r = gauge_fix(&phi, &pd)?;
                reps.push(gauge_report(&phi, &pd, &r)?);
            }
            write_report(&a.out, cmd, &reps)?;
            let res = reps.iter().map(|r| r.residual).fold(0.0, f64::max);
            let dev = reps.iter().map(|r| r.oracle_deviation).fold(0.0, f64::max);
            Ok(if res > 1e-10 || dev > 1e-9 {
                Outcome::Fail(format!("residual {res:.3e}, oracle deviation {dev:.3e}"))
            } else {
                Outcome::Pass
            })
        }
        Cmd::Periods(a) => {
            let q = QuadraticDifferential::new(HolomorphicPoly::parse(&a.q2)?)?;
            let table = periods(&q)?;
            let rows = table
                .pairs
                .iter()
                .map(|p| vec![p.i.to_string(), p.j.to_string(), fmt17(p.z.re), fmt17(p.z.im), fmt17(p.m)]);
            write_rows(&a.out, &header, "i,j,re_Z,im_Z,M_ij", rows)?;
            let env = match &a.t {
                Some(s) => Some(envelope_fit(&table, &parse_list::<f64>(s, "t")?)?),
                None => None,
            };
            write_report(&a.out.with_extension("json"), cmd, &json!({ "table": table, "envelope": env }))?;
            Ok(Outcome::Pass)
        }
        Cmd::SfConsistency(a) => {
            let pdot = HolomorphicPoly::parse(&a.pdot)?;
            let rep = sf_disk_consistency(&pdot, disk(&a.disk))?;
            write_report(&a.out, cmd, &rep)?;
            Ok(if rep.rel_err > a.tol { Outcome::Fail(format!("lhs/rhs mismatch {:.3e}", rep.rel_err)) } else { Outcome::Pass })
        }
    }
}

fn configure_threads() -> Result<(), String> {
    if let Ok(v) = std::env::var("HML_THREADS") {
        let n: usize = v.trim().parse().map_err(|_| format!("HML_THREADS must be a positive integer, got '{v}'"))?;
        if n == 0 {
            return Err("HML_THREADS must be positive".into());
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 64 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(64);
    }
    match run(&cli.cmd) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(1)
        }
        Err(e @ (Error::Invalid(_) | Error::Domain(_))) => {
            eprintln!("error: {e}");
            ExitCode::from(64)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
