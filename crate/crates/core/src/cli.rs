//! The `perforate` command line.
//!
//! Each subcommand loads a [`RunConfig`], applies flag overrides, writes the
//! resolved config, one or more CSV files and `report.txt` into the output
//! directory, and exits with
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | runtime failure (I/O, resource cap, solver) |
//! | 2 | invalid parameters or config |
//! | 3 | a verification check failed |

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::config::{RunConfig, RESOLVED_FILE};
use crate::cutoff::verify_cutoff_rate;
use crate::error::{Error, Result};
use crate::geometry::DomainSpec;
use crate::io::{read_perforated, write_field, write_perforated};
use crate::perforation::{
    admissible_kappa, build_perforated, check_separation, check_separation_exhaustive, hole_measures,
    measure_sweep, separation_sweep, PerforatedDomain, SeparationReport, SeparationSettings,
};
use crate::process::RadiusLaw;
use crate::proxy::{homogenization_sweep, solve_instance, HomogenizationRow};
use crate::rates::{fit_rate, RateFit};
use crate::slln::{slln_sweep, SllnSettings};
use crate::sweep::{sweep_sample, validate_eps_list};

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_CHECK_FAILED: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "perforate", version, about = "Randomly perforated domains and their scaling laws")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub overrides: Overrides,
}

#[derive(Debug, Default, Args)]
pub struct Overrides {
    /// TOML run config; defaults are used for everything it omits.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Comma-separated, strictly decreasing.
    #[arg(long, global = true, value_delimiter = ',', num_args = 1..)]
    pub eps: Option<Vec<f64>>,
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Number of independent seeds per sweep.
    #[arg(long, global = true, value_name = "N")]
    pub seeds: Option<usize>,
    /// Tolerance for every slope check.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw one perforated domain (first eps, first seed).
    Sample,
    /// Safety-ball separation over seeds, or for one instance with --input.
    Separation {
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Strong-law limits of scaled counts and radius moments.
    Slln,
    /// Hole counts, volumes and surfaces against their power laws.
    Measures,
    /// W^{1,q} decay of the cutoff functions.
    Cutoff,
    /// Proxy Robin problem: distance to the unperforated solution.
    Proxy {
        /// Also write the solution fields of the first seed.
        #[arg(long)]
        dump_fields: bool,
    },
    /// Proxy Robin problem: growth of the hole-boundary trace norm.
    Trace,
    /// Power-law fit of a two-column (eps, value) CSV.
    Fit {
        #[arg(long)]
        input: PathBuf,
        /// Expected exponent; the check uses --tol.
        #[arg(long)]
        target: Option<f64>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Sample => "sample",
            Command::Separation { .. } => "separation",
            Command::Slln => "slln",
            Command::Measures => "measures",
            Command::Cutoff => "cutoff",
            Command::Proxy { .. } => "proxy",
            Command::Trace => "trace",
            Command::Fit { .. } => "fit",
        }
    }

    fn uses_proxy_sweep(&self) -> bool {
        matches!(self, Command::Proxy { .. } | Command::Trace)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Passed,
    Failed,
}

impl Outcome {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Outcome::Passed
        } else {
            Outcome::Failed
        }
    }
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Parameter(_) | Error::Config(_) | Error::Parse(_) => EXIT_INVALID,
        Error::Resource(_) | Error::Domain(_) | Error::Solver { .. } | Error::Io(_) | Error::Csv(_) => EXIT_RUNTIME,
    }
}

/// Parses `args` (program name first) and runs; returns the process exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(&cli) {
        Ok(Outcome::Passed) => EXIT_OK,
        Ok(Outcome::Failed) => EXIT_CHECK_FAILED,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Resolves the config for `cli`: file (or defaults) plus flag overrides.
pub fn resolve_config(cli: &Cli) -> Result<RunConfig> {
    let o = &cli.overrides;
    let mut cfg = match &o.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = o.seed {
        cfg.process.seed = s;
    }
    if let Some(a) = o.alpha {
        cfg.perforation.alpha = a;
    }
    if let Some(d) = &o.out {
        cfg.output.dir = d.clone();
    }
    if let Some(t) = o.tol {
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::Parameter(format!("--tol must be positive, got {t}")));
        }
        cfg.checks.set_slope_tol(t);
    }
    let proxy = cli.command.uses_proxy_sweep();
    if let Some(e) = &o.eps {
        if proxy {
            cfg.proxy.eps = e.clone();
        } else {
            cfg.perforation.eps = e.clone();
        }
    }
    if let Some(n) = o.seeds {
        if proxy {
            cfg.proxy.seeds = n;
        } else {
            cfg.process.seeds = n;
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Runs one subcommand and writes its outputs.
pub fn run(cli: &Cli) -> Result<Outcome> {
    let cfg = resolve_config(cli)?;
    let out = cfg.output.dir.clone();
    std::fs::create_dir_all(&out)?;
    std::fs::write(out.join(RESOLVED_FILE), cfg.to_toml_string()?)?;

    let mut report = String::new();
    let _ = writeln!(report, "perforate {}", cli.command.name());
    let outcome = match &cli.command {
        Command::Sample => cmd_sample(&cfg, &out, &mut report),
        Command::Separation { input } => cmd_separation(&cfg, input.as_deref(), &out, &mut report),
        Command::Slln => cmd_slln(&cfg, &out, &mut report),
        Command::Measures => cmd_measures(&cfg, &out, &mut report),
        Command::Cutoff => cmd_cutoff(&cfg, &out, &mut report),
        Command::Proxy { dump_fields } => cmd_proxy(&cfg, *dump_fields, &out, &mut report),
        Command::Trace => cmd_trace(&cfg, &out, &mut report),
        Command::Fit { input, target } => cmd_fit(&cfg, input, *target, &out, &mut report),
    }?;
    let _ = writeln!(
        report,
        "\nresult: {}",
        match outcome {
            Outcome::Passed => "PASS",
            Outcome::Failed => "FAIL",
        }
    );
    std::fs::write(out.join("report.txt"), &report)?;
    print!("{report}");
    Ok(outcome)
}

fn write_csv<const N: usize>(path: &Path, header: [&str; N], rows: impl IntoIterator<Item = [String; N]>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.flush()?;
    Ok(())
}

fn domain_notes(domain: &DomainSpec, report: &mut String) {
    let _ = writeln!(report, "domain: {domain}");
    if !domain.has_c2_boundary() {
        let _ = writeln!(
            report,
            "note: a box has no C2 boundary; results near edges and corners fall outside the smooth-domain setting"
        );
    }
}

fn check_point_cap(cfg: &RunConfig, domain: &DomainSpec, eps_min: f64) -> Result<()> {
    let expected = cfg.process.intensity * domain.bounding_box_volume() / eps_min.powi(3);
    if expected > cfg.process.point_cap {
        return Err(Error::Resource(format!(
            "expected {expected:.3e} sampled points at eps = {eps_min} exceeds process.point_cap = {:.3e}",
            cfg.process.point_cap
        )));
    }
    Ok(())
}

fn fit_line(report: &mut String, label: &str, fit: &std::result::Result<RateFit, String>) -> bool {
    match fit {
        Ok(f) => {
            let status = match f.pass {
                Some(true) => "PASS",
                Some(false) => "FAIL",
                None => "info",
            };
            let target = f.target_exponent.map(|t| format!(" target {t}")).unwrap_or_default();
            let _ = writeln!(
                report,
                "{label}: slope {:.4}{target} r2 {:.5} ({status})",
                f.slope, f.r_squared
            );
            f.pass != Some(false)
        }
        Err(e) => {
            let _ = writeln!(report, "{label}: no fit ({e}) (FAIL)");
            false
        }
    }
}

fn try_fit(pairs: &[(f64, f64)], target: Option<f64>, tol: f64) -> std::result::Result<RateFit, String> {
    fit_rate(pairs, target, tol).map_err(|e| e.to_string())
}

fn cmd_sample(cfg: &RunConfig, out: &Path, report: &mut String) -> Result<Outcome> {
    let params = cfg.process_params()?;
    let domain = cfg.domain.spec()?;
    validate_eps_list(&cfg.perforation.eps)?;
    let eps = cfg.perforation.eps[0];
    check_point_cap(cfg, &domain, eps)?;
    let sample = sweep_sample(&params, &domain, eps, 0, cfg.process.point_cap)?;
    let pd = build_perforated(&domain, &sample, eps, cfg.perforation.alpha)?;
    write_perforated(&pd, BufWriter::new(File::create(out.join("domain.txt"))?))?;
    write_csv(
        &out.join("holes.csv"),
        ["x", "y", "z", "radius"],
        pd.holes().iter().map(|h| [h.center[0], h.center[1], h.center[2], h.radius].map(|v| v.to_string())),
    )?;
    let m = hole_measures(&pd);
    domain_notes(&domain, report);
    let expected = params.intensity * domain.inner_volume(eps) / eps.powi(3);
    let _ = writeln!(report, "eps {eps} alpha {} seed {}", pd.alpha(), params.seed);
    let _ = writeln!(report, "holes: {} (expected {:.1})", pd.holes().len(), expected);
    let _ = writeln!(report, "largest radius: {:.6e}", pd.max_radius());
    let _ = writeln!(
        report,
        "total volume {:.6e}, total surface {:.6e}{}",
        m.total_volume,
        m.total_surface,
        if m.upper_bound_only { " (holes overlap: upper bounds)" } else { "" }
    );
    if pd.below_subcritical_regime() {
        let _ = writeln!(report, "note: alpha <= 3 is outside the subcritical regime");
    }
    Ok(Outcome::Passed)
}

fn describe_separation(pd: &PerforatedDomain, rep: &SeparationReport, report: &mut String) {
    let _ = writeln!(
        report,
        "eps {} holes {}: max tau*eps^alpha*r {:.4e} vs eps^(1+kappa) {:.4e} ({}), {} violating pair(s)",
        pd.eps(),
        pd.holes().len(),
        rep.max_scaled_radius,
        rep.threshold,
        if rep.radius_ok { "ok" } else { "too large" },
        rep.pair_violations
    );
    for &(i, j) in &rep.violating_pairs {
        let (a, b) = (pd.holes()[i].center, pd.holes()[j].center);
        let _ = writeln!(
            report,
            "  violating pair: holes {i} and {j} at ({}, {}, {}) and ({}, {}, {})",
            a[0], a[1], a[2], b[0], b[1], b[2]
        );
    }
    if rep.pair_violations > rep.violating_pairs.len() {
        let _ = writeln!(report, "  ... {} more", rep.pair_violations - rep.violating_pairs.len());
    }
}

fn moment_warning(law: &RadiusLaw, alpha: f64, report: &mut String) {
    let need = 3.0 / (alpha - 2.0);
    if law.moment_supremum() <= need {
        let _ = writeln!(
            report,
            "warning: radius moments are finite only below {}, but separation needs m_r > 3/(alpha-2) = {need}",
            law.moment_supremum()
        );
    }
}

fn cmd_separation(cfg: &RunConfig, input: Option<&Path>, out: &Path, report: &mut String) -> Result<Outcome> {
    let p = &cfg.perforation;
    if let Some(path) = input {
        let pd = read_perforated(BufReader::new(File::open(path)?))?;
        admissible_kappa(pd.alpha(), p.moment_exponent)?;
        domain_notes(pd.domain(), report);
        let rep = check_separation(&pd, p.tau, p.kappa, p.moment_exponent)?;
        let mut ok = rep.pass;
        if pd.holes().len() <= p.oracle_max_holes {
            let oracle = check_separation_exhaustive(&pd, p.tau, p.kappa, p.moment_exponent)?;
            if oracle != rep {
                ok = false;
                let _ = writeln!(report, "all-pairs check disagrees with the spatial hash");
            }
        }
        describe_separation(&pd, &rep, report);
        write_csv(
            &out.join("separation.csv"),
            ["eps", "holes", "pass", "radius_ok", "pair_violations"],
            [[
                pd.eps().to_string(),
                pd.holes().len().to_string(),
                rep.pass.to_string(),
                rep.radius_ok.to_string(),
                rep.pair_violations.to_string(),
            ]],
        )?;
        return Ok(Outcome::from_bool(ok));
    }

    let params = cfg.process_params()?;
    let domain = cfg.domain.spec()?;
    validate_eps_list(&p.eps)?;
    check_point_cap(cfg, &domain, *p.eps.last().expect("validated"))?;
    domain_notes(&domain, report);
    moment_warning(&params.radius_law, p.alpha, report);
    let settings = SeparationSettings {
        tau: p.tau,
        kappa: p.kappa,
        moment_exponent: p.moment_exponent,
        oracle_max_holes: p.oracle_max_holes,
        point_cap: cfg.process.point_cap,
    };
    let rows = separation_sweep(&params, &domain, p.alpha, &p.eps, cfg.process.seeds, &settings)?;
    write_csv(&out.join("separation.csv"), crate::perforation::SeparationRow::CSV_HEADER, rows.iter().map(|r| r.csv_record()))?;
    let _ = writeln!(report, "alpha {} tau {} kappa {} seeds {}", p.alpha, p.tau, p.kappa, cfg.process.seeds);
    for r in &rows {
        let _ = writeln!(
            report,
            "eps {}: pass fraction {} (radius ok {}), mean violating pairs {:.3}, oracle checked {} mismatched {}",
            r.eps, r.pass_fraction, r.radius_ok_fraction, r.mean_pair_violations, r.oracle_checked, r.oracle_mismatches
        );
    }
    let monotone = rows.windows(2).all(|w| w[1].pass_fraction >= w[0].pass_fraction);
    let finest = rows.last().expect("non-empty").pass_fraction == 1.0;
    let oracle = rows.iter().all(|r| r.oracle_mismatches == 0);
    let _ = writeln!(report, "pass fraction non-decreasing: {monotone}");
    let _ = writeln!(report, "all seeds pass at the finest eps: {finest}");
    let _ = writeln!(report, "spatial hash agrees with all-pairs check: {oracle}");
    Ok(Outcome::from_bool(monotone && finest && oracle))
}

fn cmd_slln(cfg: &RunConfig, out: &Path, report: &mut String) -> Result<Outcome> {
    let params = cfg.process_params()?;
    let domain = cfg.domain.spec()?;
    validate_eps_list(&cfg.perforation.eps)?;
    domain_notes(&domain, report);
    let k = cfg.checks.standard_errors;
    let mut ok = true;
    for &m in &cfg.slln.moments {
        let settings = SllnSettings {
            moment: m,
            n_seeds: cfg.process.seeds,
            filtered: cfg.slln.filtered,
            point_cap: cfg.process.point_cap,
        };
        let rows = slln_sweep(&params, &domain, &cfg.perforation.eps, &settings)?;
        write_csv(
            &out.join(format!("slln_m{m}.csv")),
            crate::slln::SllnRow::CSV_HEADER,
            rows.iter().map(|r| r.csv_record()),
        )?;
        let _ = writeln!(report, "m = {m}:");
        for r in &rows {
            let pass = r.count_within(k) && r.moment_within(k);
            ok &= pass;
            let _ = writeln!(
                report,
                "  eps {}: count {:.5} +- {:.5} (target {:.5}), moment {:.5} +- {:.5} (target {:.5}) {}",
                r.eps,
                r.mean_scaled_count,
                r.se_count,
                r.target_count,
                r.mean_scaled_moment,
                r.se_moment,
                r.target_moment,
                if pass { "PASS" } else { "FAIL" }
            );
        }
        if rows.first().is_some_and(|r| r.target_moment.is_infinite()) {
            let _ = writeln!(report, "  the radius moment of order {m} is infinite: no limit exists");
        }
    }
    Ok(Outcome::from_bool(ok))
}

fn cmd_measures(cfg: &RunConfig, out: &Path, report: &mut String) -> Result<Outcome> {
    let params = cfg.process_params()?;
    let domain = cfg.domain.spec()?;
    let p = &cfg.perforation;
    validate_eps_list(&p.eps)?;
    check_point_cap(cfg, &domain, *p.eps.last().expect("validated"))?;
    domain_notes(&domain, report);
    let rows = measure_sweep(&params, &domain, p.alpha, &p.eps, cfg.process.seeds, cfg.process.point_cap)?;
    write_csv(&out.join("measures.csv"), crate::perforation::MeasureRow::CSV_HEADER, rows.iter().map(|r| r.csv_record()))?;
    let series = |f: fn(&crate::perforation::MeasureRow) -> f64| rows.iter().map(|r| (r.eps, f(r))).collect::<Vec<_>>();
    let c = &cfg.checks;
    let volume = try_fit(&series(|r| r.mean_total_volume), Some(3.0 * (p.alpha - 1.0)), c.volume_slope_tol);
    let count = try_fit(&series(|r| r.mean_holes), Some(-3.0), c.count_slope_tol);
    let surface = try_fit(&series(|r| r.mean_total_surface), None, 0.0);
    let mut ok = fit_line(report, "total volume", &volume);
    ok &= fit_line(report, "hole count", &count);
    fit_line(report, "total surface", &surface);
    if let Ok(f) = &volume {
        if f.r_squared < c.min_r_squared {
            ok = false;
            let _ = writeln!(report, "total volume r2 {:.5} below {} (FAIL)", f.r_squared, c.min_r_squared);
        }
    }
    let overlapping: usize = rows.iter().map(|r| r.overlapping_instances).sum();
    if overlapping > 0 {
        let _ = writeln!(report, "note: {overlapping} instance(s) had overlapping holes; their sums are upper bounds");
    }
    Ok(Outcome::from_bool(ok))
}

fn cmd_cutoff(cfg: &RunConfig, out: &Path, report: &mut String) -> Result<Outcome> {
    let params = cfg.process_params()?;
    let domain = cfg.domain.spec()?;
    let p = &cfg.perforation;
    validate_eps_list(&p.eps)?;
    check_point_cap(cfg, &domain, *p.eps.last().expect("validated"))?;
    domain_notes(&domain, report);
    let rep = verify_cutoff_rate(
        &params,
        &domain,
        p.alpha,
        cfg.cutoff.q,
        &p.eps,
        cfg.process.seeds,
        cfg.checks.cutoff_slope_tol,
    )?;
    write_csv(&out.join("cutoff.csv"), crate::cutoff::CutoffRow::CSV_HEADER, rep.rows.iter().map(|r| r.csv_record()))?;
    for w in &rep.warnings {
        let _ = writeln!(report, "warning: {w}");
    }
    let _ = writeln!(report, "q {} alpha {} target sigma {}", cfg.cutoff.q, p.alpha, rep.target_sigma);
    let ok = fit_line(report, "W^{1,q} norm of 1 - g", &Ok(rep.fit));
    Ok(Outcome::from_bool(ok))
}

fn proxy_rows(cfg: &RunConfig, trace: bool, report: &mut String) -> Result<Vec<HomogenizationRow>> {
    let params = cfg.process_params()?;
    let domain = cfg.domain.spec()?;
    validate_eps_list(&cfg.proxy.eps)?;
    check_point_cap(cfg, &domain, *cfg.proxy.eps.last().expect("validated"))?;
    domain_notes(&domain, report);
    let _ = writeln!(
        report,
        "scalar Robin proxy (not the full coupled system), alpha {}, seeds {}",
        cfg.perforation.alpha, cfg.proxy.seeds
    );
    homogenization_sweep(
        &params,
        &domain,
        cfg.perforation.alpha,
        &cfg.proxy.problem(),
        &cfg.proxy.eps,
        cfg.proxy.seeds,
        &cfg.proxy.settings(trace, cfg.process.point_cap),
    )
}

fn cmd_proxy(cfg: &RunConfig, dump_fields: bool, out: &Path, report: &mut String) -> Result<Outcome> {
    let rows = proxy_rows(cfg, false, report)?;
    write_csv(&out.join("proxy.csv"), HomogenizationRow::CSV_HEADER, rows.iter().map(|r| r.csv_record()))?;
    for r in &rows {
        let _ = writeln!(
            report,
            "eps {}: proxy relative L2 distance {:.6e}, holes {}, spacing {:.4e}, cells {}",
            r.eps, r.rel_l2_distance, r.holes, r.spacing, r.interior_cells
        );
    }
    let decreasing = rows.windows(2).all(|w| w[1].rel_l2_distance < w[0].rel_l2_distance);
    let _ = writeln!(report, "proxy distance strictly decreasing: {decreasing}");

    if dump_fields {
        let params = cfg.process_params()?;
        let domain = cfg.domain.spec()?;
        let eps_min = *cfg.proxy.eps.last().expect("validated");
        let sample = sweep_sample(&params, &domain, eps_min, 0, cfg.process.point_cap)?;
        let settings = cfg.proxy.settings(false, cfg.process.point_cap);
        for &eps in &cfg.proxy.eps {
            let pd = build_perforated(&domain, &sample, eps, cfg.perforation.alpha)?;
            let inst = solve_instance(&pd, &cfg.proxy.problem(), &settings)?;
            for (tag, sol) in [("perforated", &inst.perforated), ("reference", &inst.reference)] {
                let path = out.join(format!("field_eps{eps}_{tag}.txt"));
                write_field(&sol.field, BufWriter::new(File::create(path)?))?;
            }
        }
        let _ = writeln!(report, "fields of seed 0 written as field_eps<eps>_<perforated|reference>.txt");
    }
    Ok(Outcome::from_bool(decreasing))
}

fn cmd_trace(cfg: &RunConfig, out: &Path, report: &mut String) -> Result<Outcome> {
    let rows = proxy_rows(cfg, true, report)?;
    write_csv(&out.join("trace.csv"), HomogenizationRow::CSV_HEADER, rows.iter().map(|r| r.csv_record()))?;
    let p = cfg.proxy.trace_exponent;
    let bound = -1.0 / (2.0 * cfg.proxy.m_theta);
    let _ = writeln!(report, "trace exponent p = {p}, bound exponent -1/(2 m_theta) = {bound:.5}");
    for r in &rows {
        let _ = writeln!(
            report,
            "eps {}: trace norm {}, holes excluded {}",
            r.eps,
            r.trace_norm.map(|t| format!("{t:.6e}")).unwrap_or_else(|| "-".into()),
            r.trace_excluded
        );
    }
    let pairs: Vec<(f64, f64)> = rows.iter().filter_map(|r| r.trace_norm.map(|t| (r.eps, t))).collect();
    let fit = try_fit(&pairs, None, 0.0);
    fit_line(report, "trace norm", &fit);
    let margin = cfg.checks.trace_slope_margin;
    let ok = match &fit {
        Ok(f) => f.slope >= bound - margin,
        Err(_) => false,
    };
    let _ = writeln!(report, "growth within bound + {margin}: {ok}");
    Ok(Outcome::from_bool(ok))
}

/// Reads `(eps, value)` rows; a non-numeric first row is taken as a header.
pub fn read_pairs(path: &Path) -> Result<Vec<(f64, f64)>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_path(path)?;
    let mut pairs = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() != 2 {
            return Err(Error::Parse(format!("row {}: expected 2 columns, got {}", i + 1, rec.len())));
        }
        let parsed = (rec[0].parse::<f64>(), rec[1].parse::<f64>());
        match parsed {
            (Ok(e), Ok(y)) => pairs.push((e, y)),
            _ if i == 0 => {}
            _ => return Err(Error::Parse(format!("row {}: not a pair of numbers", i + 1))),
        }
    }
    Ok(pairs)
}

fn cmd_fit(cfg: &RunConfig, input: &Path, target: Option<f64>, out: &Path, report: &mut String) -> Result<Outcome> {
    let pairs = read_pairs(input)?;
    let fit = fit_rate(&pairs, target, cfg.checks.fit_tol)?;
    write_csv(
        &out.join("fit.csv"),
        ["slope", "intercept", "r_squared", "n_points", "target", "pass"],
        [[
            fit.slope.to_string(),
            fit.intercept.to_string(),
            fit.r_squared.to_string(),
            fit.n_points.to_string(),
            fit.target_exponent.map(|t| t.to_string()).unwrap_or_default(),
            fit.pass.map(|p| p.to_string()).unwrap_or_default(),
        ]],
    )?;
    let _ = writeln!(report, "input: {}", input.display());
    let ok = fit_line(report, "fit", &Ok(fit));
    Ok(Outcome::from_bool(ok))
}
