//! Subcommand implementations.

use std::f64::consts::PI;
use std::path::PathBuf;

use rayon::prelude::*;
use serde_json::{json, Map, Value};
use thermal_jcm_core::experiments::{
    correction_table, fit_periods, inversion_trace, linspace, spectral_figures, FigureConfig, InversionTrace,
    PeriodEstimate, PeriodWindow, SpectralData, SweepTable, TableConfig, TimeGrid, SWEEP_POINTS,
};
use thermal_jcm_core::model::derive;
use thermal_jcm_core::oracle::{
    rabi_short_time_coefficient, verify_identity, Identity, OracleConfig, RabiFitConfig, ThermalCoherentState,
};
use thermal_jcm_core::zero_temp::{short_time_inversion, DEFAULT_N, DEFAULT_SPECTRUM_N_MAX};
use thermal_jcm_core::{ModelParams, ThermalPoint};

use crate::config::Settings;
use crate::output::{sidecar, sidecar_path, write_file, Cell, Plot, Table};
use crate::{
    CliError, Command, CompareArgs, GridArgs, InversionArgs, IoArgs, ModelArgs, PeriodArgs, ReproduceArgs,
    ShortTimeArgs, SpectrumArgs, SweepArgs, ThermalArgs, VerifyArgs, WindowArgs, THREADS_ENV,
};

type Flags = Vec<(&'static str, Option<String>)>;

fn opt<T: ToString>(v: &Option<T>) -> Option<String> {
    v.as_ref().map(|x| x.to_string())
}

fn io_flags(io: &IoArgs) -> Flags {
    vec![("out", io.out.as_ref().map(|p| p.display().to_string())), ("svg", io.svg.as_ref().map(|p| p.display().to_string()))]
}

fn model_flags(m: &ModelArgs) -> Flags {
    vec![("omega0", opt(&m.omega0)), ("omega", opt(&m.omega)), ("kappa", opt(&m.kappa)), ("alpha", opt(&m.alpha))]
}

fn thermal_flags(t: &ThermalArgs) -> Flags {
    vec![("beta", opt(&t.beta)), ("theta", opt(&t.theta))]
}

fn grid_flags(g: &GridArgs) -> Flags {
    vec![("t0", opt(&g.t0)), ("t1", opt(&g.t1)), ("steps", opt(&g.steps))]
}

fn window_flags(w: &WindowArgs) -> Flags {
    vec![("window_start", opt(&w.window_start)), ("window_end", opt(&w.window_end)), ("dt", opt(&w.dt))]
}

/// What a subcommand hands back for writing.
pub struct Product {
    pub stem: String,
    pub table: Table,
    pub plot: Option<Plot>,
    pub results: Map<String, Value>,
    /// Set when a check completed and failed; files are still written.
    pub failure: Option<String>,
    pub summary: Vec<String>,
}

impl Product {
    fn new(stem: &str, table: Table) -> Self {
        Product { stem: stem.into(), table, plot: None, results: Map::new(), failure: None, summary: Vec::new() }
    }
}

/// Thread pool honouring the thread-cap environment variable.
pub fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?;
        b = b.num_threads(n);
    }
    b.build().map_err(|e| CliError::Usage(format!("thread pool: {e}")))
}

fn model(s: &Settings, d: (f64, f64, f64, f64)) -> Result<ModelParams, CliError> {
    Ok(ModelParams::new(
        s.f64_or("omega0", d.0)?,
        s.f64_or("omega", d.1)?,
        s.f64_or("kappa", d.2)?,
        s.f64_or("alpha", d.3)?,
    )?)
}

fn thermal(s: &Settings, p: &ModelParams, default_theta: f64) -> Result<ThermalPoint, CliError> {
    if let Some(beta) = s.opt_f64("beta")? {
        return Ok(ThermalPoint::from_beta(beta, p)?);
    }
    let theta = s.f64_or("theta", default_theta)?;
    if theta < 0.0 {
        return Err(CliError::Core(thermal_jcm_core::Error::Domain { what: "theta must be >= 0", value: theta }));
    }
    Ok(ThermalPoint::from_theta(theta, p)?)
}

fn thermal_json(t: &ThermalPoint) -> Value {
    json!({
        "beta": if t.beta.is_finite() { Value::from(t.beta) } else { Value::from("inf") },
        "theta": t.theta,
        "fermion_theta": t.fermion_theta,
    })
}

fn grid(s: &Settings, d: (f64, f64, usize)) -> Result<TimeGrid, CliError> {
    Ok(TimeGrid::new(s.f64_or("t0", d.0)?, s.f64_or("t1", d.1)?, s.usize_or("steps", d.2)?)?)
}

fn window(s: &Settings, alpha: f64) -> Result<PeriodWindow, CliError> {
    let d = default_window(alpha);
    Ok(PeriodWindow {
        start: s.f64_or("window_start", d.start)?,
        end: s.f64_or("window_end", d.end)?,
        dt: s.f64_or("dt", d.dt)?,
    })
}

fn default_window(alpha: f64) -> PeriodWindow {
    if alpha.abs() <= 6.0 {
        PeriodWindow::alpha4()
    } else {
        PeriodWindow::alpha8()
    }
}

fn default_theta_hi(alpha: f64) -> f64 {
    if alpha.abs() <= 6.0 {
        PI / 32.0
    } else {
        PI / 60.0
    }
}

pub fn execute(cmd: Command) -> Result<Vec<String>, CliError> {
    let (name, io, flags) = match &cmd {
        Command::Inversion(a) => ("inversion", &a.io, inversion_flags(a)),
        Command::SweepTheta(a) => ("sweep-theta", &a.io, sweep_flags(a)),
        Command::Period(a) => ("period", &a.io, period_flags(a)),
        Command::Spectrum(a) => ("spectrum", &a.io, spectrum_flags(a)),
        Command::Gap(a) => ("gap", &a.io, spectrum_flags(a)),
        Command::ShortTime(a) => ("short-time", &a.io, short_time_flags(a)),
        Command::Verify(a) => ("verify", &a.io, verify_flags(a)),
        Command::OracleCompare(a) => ("oracle-compare", &a.io, compare_flags(a)),
        Command::Reproduce(a) => ("reproduce", &a.io, reproduce_flags(a)),
    };
    let s = Settings::resolve(io.config.as_deref(), &flags)?;
    let product = match &cmd {
        Command::Inversion(_) => run_inversion(&s)?,
        Command::SweepTheta(_) => run_sweep(&s)?,
        Command::Period(_) => run_period(&s)?,
        Command::Spectrum(_) => run_spectrum(&s, false)?,
        Command::Gap(_) => run_spectrum(&s, true)?,
        Command::ShortTime(_) => run_short_time(&s)?,
        Command::Verify(a) => run_verify(&s, a)?,
        Command::OracleCompare(_) => run_compare(&s)?,
        Command::Reproduce(_) => run_reproduce(&s)?,
    };
    emit(name, &s, product)
}

fn emit(name: &str, s: &Settings, product: Product) -> Result<Vec<String>, CliError> {
    let csv_path = PathBuf::from(s.string("out").unwrap_or_else(|| format!("{}.csv", product.stem)));
    let svg_path = s.string("svg").map(PathBuf::from);
    let csv = product.table.to_csv()?;
    let mut results = product.results;
    if let Some(f) = &product.failure {
        results.insert("failure".into(), Value::from(f.clone()));
    }
    let meta = sidecar(name, s.echo(), results, &csv_path);
    write_file(&csv_path, &csv)?;
    let json_path = sidecar_path(&csv_path);
    write_file(&json_path, &(serde_json::to_string_pretty(&meta).expect("json values are finite") + "\n"))?;
    let mut lines = product.summary;
    lines.push(format!("wrote {} and {}", csv_path.display(), json_path.display()));
    if let (Some(path), Some(plot)) = (svg_path, &product.plot) {
        write_file(&path, &plot.to_svg())?;
        lines.push(format!("wrote {}", path.display()));
    }
    match product.failure {
        Some(f) => {
            for l in &lines {
                println!("{l}");
            }
            Err(CliError::Verification(f))
        }
        None => Ok(lines),
    }
}

fn inversion_flags(a: &InversionArgs) -> Flags {
    let mut f = io_flags(&a.io);
    f.extend(model_flags(&a.model));
    f.extend(thermal_flags(&a.thermal));
    f.extend(grid_flags(&a.grid));
    f.push(("n", opt(&a.n)));
    f
}

fn inversion_product(stem: &str, params: &ModelParams, tp: &ThermalPoint, g: &TimeGrid, n: usize) -> Result<Product, CliError> {
    let d = derive(params)?;
    let trace = inversion_trace(params, &d, tp, g, n)?;
    let mut p = Product::new(stem, inversion_table(&trace));
    p.results.insert("thermal".into(), thermal_json(tp));
    p.results.insert("c".into(), Value::from(d.c));
    p.plot = Some(
        Plot::new(&format!("alpha = {}, theta = {:.5}", params.alpha, tp.theta), "t", "<sigma_z>")
            .with_series("sigma_z", trace.samples.iter().map(|s| (s.t, s.sigma_z)).collect()),
    );
    p.summary.push(format!("{} samples on [{}, {}]", trace.samples.len(), g.t0, g.t1));
    Ok(p)
}

fn inversion_table(trace: &InversionTrace) -> Table {
    let mut t = Table::new(&["t", "sigma_z", "w0_1", "w1_1", "w2_1", "w3_1", "w0_2", "w1_2", "w2_2", "w3_2"]);
    for s in &trace.samples {
        let mut row: Vec<Cell> = vec![s.t.into(), s.sigma_z.into()];
        row.extend(s.weighted.iter().flat_map(|k| k.iter().map(|&w| Cell::from(w))));
        t.push(row);
    }
    t
}

fn run_inversion(s: &Settings) -> Result<Product, CliError> {
    let params = model(s, (2.0, 4.0, 1.0, 4.0))?;
    let tp = thermal(s, &params, 0.0)?;
    let g = grid(s, (0.0, 20.0 * PI, 10_000))?;
    inversion_product("inversion", &params, &tp, &g, s.usize_or("n", DEFAULT_N)?)
}

fn period_header() -> Table {
    Table::new(&["theta", "t_max", "t_min", "T", "ln_T"])
}

fn period_row(e: &PeriodEstimate) -> Vec<Cell> {
    vec![e.theta.into(), e.t_max.into(), e.t_min.into(), e.period.into(), e.period.ln().into()]
}

fn period_flags(a: &PeriodArgs) -> Flags {
    let mut f = io_flags(&a.io);
    f.extend(model_flags(&a.model));
    f.extend(thermal_flags(&a.thermal));
    f.extend(window_flags(&a.window));
    f.push(("n", opt(&a.n)));
    f
}

fn run_period(s: &Settings) -> Result<Product, CliError> {
    let params = model(s, (2.0, 4.0, 1.0, 4.0))?;
    let tp = thermal(s, &params, 0.0)?;
    let w = window(s, params.alpha)?;
    let n = s.usize_or("n", DEFAULT_N)?;
    let d = derive(&params)?;
    let e = thermal_jcm_core::experiments::estimate_period_at(&params, &d, &tp, &w, n)?;
    let mut t = period_header();
    t.push(period_row(&e));
    let mut p = Product::new("period", t);
    p.results.insert("thermal".into(), thermal_json(&tp));
    p.results.insert("sigma_at_max".into(), Value::from(e.sigma_at_max));
    p.results.insert("sigma_at_min".into(), Value::from(e.sigma_at_min));
    p.summary.push(format!("t_max = {}, t_min = {}, T = {}", e.t_max, e.t_min, e.period));
    Ok(p)
}

fn sweep_flags(a: &SweepArgs) -> Flags {
    let mut f = io_flags(&a.io);
    f.extend(model_flags(&a.model));
    f.extend(window_flags(&a.window));
    f.extend([("theta_lo", opt(&a.theta_lo)), ("theta_hi", opt(&a.theta_hi)), ("points", opt(&a.points)), ("n", opt(&a.n))]);
    f
}

/// Sweep with the per-theta evaluations spread over the pool; output order
/// follows the theta grid.
pub fn parallel_sweep(
    params: &ModelParams,
    lo: f64,
    hi: f64,
    points: usize,
    w: &PeriodWindow,
    n: usize,
) -> Result<(Vec<PeriodEstimate>, thermal_jcm_core::experiments::FitResult), CliError> {
    if !(lo >= 0.0) || !(hi >= lo) {
        return Err(CliError::Core(thermal_jcm_core::Error::Domain { what: "theta range must satisfy 0 <= lo <= hi", value: lo }));
    }
    let table = SweepTable::new(params, w, n)?;
    let thetas = linspace(lo, hi, points);
    let pool = thread_pool()?;
    let estimates = pool.install(|| thetas.par_iter().map(|&th| table.period(th)).collect::<Result<Vec<_>, _>>())?;
    let fit = fit_periods(&estimates)?;
    Ok((estimates, fit))
}

fn sweep_product(stem: &str, params: &ModelParams, lo: f64, hi: f64, points: usize, w: &PeriodWindow, n: usize) -> Result<Product, CliError> {
    let (est, fit) = parallel_sweep(params, lo, hi, points, w, n)?;
    let mut t = period_header();
    for e in &est {
        t.push(period_row(e));
    }
    let mut p = Product::new(stem, t);
    p.results.insert(
        "fit".into(),
        json!({"intercept": fit.intercept, "slope": fit.slope, "rms_residual": fit.rms_residual}),
    );
    p.results.insert("points".into(), Value::from(points));
    let pts: Vec<(f64, f64)> = est.iter().map(|e| (e.theta, e.period.ln())).collect();
    let line: Vec<(f64, f64)> = [lo, hi].iter().map(|&x| (x, fit.intercept + fit.slope * x)).collect();
    p.plot = Some(Plot::new(&format!("alpha = {}", params.alpha), "theta", "ln T").with_series("ln T", pts).with_series("fit", line));
    p.summary.push(format!("ln T = {:.4} + {:.4} theta (rms {:.2e})", fit.intercept, fit.slope, fit.rms_residual));
    Ok(p)
}

fn run_sweep(s: &Settings) -> Result<Product, CliError> {
    let params = model(s, (2.0, 4.0, 1.0, 4.0))?;
    let w = window(s, params.alpha)?;
    let lo = s.f64_or("theta_lo", 0.0)?;
    let hi = s.f64_or("theta_hi", default_theta_hi(params.alpha))?;
    let points = s.usize_or("points", SWEEP_POINTS)?;
    sweep_product("sweep-theta", &params, lo, hi, points, &w, s.usize_or("n", DEFAULT_N)?)
}

fn spectrum_flags(a: &SpectrumArgs) -> Flags {
    let mut f = io_flags(&a.io);
    f.extend([
        ("omega0", opt(&a.omega0)),
        ("omega", opt(&a.omega)),
        ("kappa_max", opt(&a.kappa_max)),
        ("kappa_steps", opt(&a.kappa_steps)),
        ("n_max", opt(&a.n_max)),
    ]);
    f
}

fn spectral_scan(s: &Settings) -> Result<SpectralData, CliError> {
    let params = ModelParams::new(s.f64_or("omega0", 1.0)?, s.f64_or("omega", 1.0)?, 1.0, 0.0)?;
    let kmax = s.f64_or("kappa_max", 10.0)?;
    let steps = s.usize_or("kappa_steps", 2000)?;
    if !(kmax > 0.0) || steps == 0 {
        return Err(CliError::Usage("kappa_max must be > 0 and kappa_steps >= 1".into()));
    }
    Ok(spectral_figures(&params, &linspace(0.0, kmax, steps + 1), s.usize_or("n_max", DEFAULT_SPECTRUM_N_MAX)?)?)
}

fn dips_json(data: &SpectralData) -> Value {
    Value::Array(data.dips.iter().map(|d| json!({"kappa": d.kappa, "gap": d.gap})).collect())
}

fn spectrum_product(stem: &str, data: &SpectralData, log: bool) -> Product {
    let mut t = Table::new(&["kappa", "n_ground", "gap"]);
    for p in &data.points {
        t.push(vec![p.kappa.into(), p.n_ground.into(), p.gap.into()]);
    }
    let mut p = Product::new(stem, t);
    p.results.insert("dips".into(), dips_json(data));
    let mut plot = Plot::new("excitation gap", "kappa", "Delta E")
        .with_series("gap", data.points.iter().map(|q| (q.kappa, q.gap)).collect());
    if log {
        plot = plot.log_y();
    }
    p.plot = Some(plot);
    if let Some(last) = data.points.last() {
        p.summary.push(format!("ground index at kappa = {}: {}", last.kappa, last.n_ground));
    }
    p.summary.push(format!("{} refined gap dips", data.dips.len()));
    p
}

fn run_spectrum(s: &Settings, dips_only: bool) -> Result<Product, CliError> {
    let data = spectral_scan(s)?;
    if !dips_only {
        return Ok(spectrum_product("spectrum", &data, false));
    }
    let mut t = Table::new(&["kappa", "gap"]);
    for d in &data.dips {
        t.push(vec![d.kappa.into(), d.gap.into()]);
    }
    let mut p = Product::new("gap", t);
    p.plot = Some(
        Plot::new("excitation gap", "kappa", "Delta E")
            .log_y()
            .with_series("gap", data.points.iter().map(|q| (q.kappa, q.gap)).collect()),
    );
    p.summary.push(format!("{} refined gap dips", data.dips.len()));
    Ok(p)
}

fn energies_product(data: &SpectralData) -> Product {
    let levels = data.points.first().map_or(0, |p| p.lower.len());
    let mut header: Vec<String> = vec!["kappa".into(), "e00".into()];
    header.extend((0..levels).map(|n| format!("e{n}_2")));
    let mut t = Table { header, rows: Vec::new() };
    for p in &data.points {
        let mut row: Vec<Cell> = vec![p.kappa.into(), p.e00.into()];
        row.extend(p.lower.iter().map(|&e| Cell::from(e)));
        t.push(row);
    }
    let mut plot = Plot::new("ground-state candidates", "kappa", "E")
        .with_series("E00", data.points.iter().map(|p| (p.kappa, p.e00)).collect());
    for n in 0..levels {
        plot = plot.with_series(&format!("E{n},2"), data.points.iter().map(|p| (p.kappa, p.lower[n])).collect());
    }
    let mut p = Product::new("figure7", t);
    p.plot = Some(plot);
    if let Some(last) = data.points.last() {
        p.results.insert("n_ground_at_end".into(), Value::from(last.n_ground));
        p.summary.push(format!("ground index at kappa = {}: {}", last.kappa, last.n_ground));
    }
    p
}

fn short_time_flags(a: &ShortTimeArgs) -> Flags {
    let mut f = io_flags(&a.io);
    f.extend([
        ("omega0", opt(&a.omega0)),
        ("omega", opt(&a.omega)),
        ("kappa", opt(&a.kappa)),
        ("nbar", opt(&a.nbar)),
        ("phi", opt(&a.phi)),
        ("theta", opt(&a.theta)),
        ("window", opt(&a.window)),
        ("points", opt(&a.points)),
        ("dim", opt(&a.dim)),
        ("rel_tol", opt(&a.rel_tol)),
    ]);
    f
}

fn run_short_time(s: &Settings) -> Result<Product, CliError> {
    let nbar = s.f64_or("nbar", 4.0)?;
    if !(nbar >= 0.0) {
        return Err(CliError::Core(thermal_jcm_core::Error::Domain { what: "nbar must be >= 0", value: nbar }));
    }
    let kappa = s.f64_or("kappa", 1.0)?;
    let params = ModelParams::new(s.f64_or("omega0", 1.0)?, s.f64_or("omega", 1.0)?, kappa, nbar.sqrt())?;
    let phi = s.f64_or("phi", 0.0)?;
    let d = RabiFitConfig::default();
    let cfg = RabiFitConfig {
        window: s.f64_or("window", d.window)?,
        points: s.usize_or("points", d.points)?,
        dim: s.usize_or("dim", d.dim)?,
        tolerance: d.tolerance,
    };
    let rel_tol = s.f64_or("rel_tol", 0.02)?;
    let fit = rabi_short_time_coefficient(&params, phi, &cfg)?;
    // the closed form is exactly quadratic, so its value at t = 1 is 1 + q
    let q_closed = short_time_inversion(nbar, phi, kappa, 1.0, 0.0) - 1.0;
    let rel = (fit.q - q_closed).abs() / q_closed.abs();
    let mut t = Table::new(&["nbar", "phi", "q_fit", "q_closed", "rel_err"]);
    t.push(vec![nbar.into(), phi.into(), fit.q.into(), q_closed.into(), rel.into()]);
    let mut p = Product::new("short-time", t);
    p.results.insert("fit_residual".into(), Value::from(fit.residual));
    p.results.insert("cubic".into(), Value::from(fit.r));
    if let Some(theta) = s.opt_f64("theta")? {
        let q_thermal = short_time_inversion(nbar, phi, kappa, 1.0, theta) - 1.0;
        p.results.insert("thermal_q_closed_unverified".into(), Value::from(q_thermal));
    }
    p.summary.push(format!("q fit = {:.6}, closed form = {:.6}, relative error = {:.2e}", fit.q, q_closed, rel));
    if rel > rel_tol {
        p.failure = Some(format!("relative error {rel:.3e} exceeds {rel_tol}"));
    }
    Ok(p)
}

fn verify_flags(a: &VerifyArgs) -> Flags {
    let mut f = io_flags(&a.io);
    f.extend([
        ("max_power", opt(&a.max_power)),
        ("dim", opt(&a.dim)),
        ("buffer", opt(&a.buffer)),
        ("tolerance", opt(&a.tolerance)),
    ]);
    f
}

fn run_verify(s: &Settings, a: &VerifyArgs) -> Result<Product, CliError> {
    let catalog = Identity::catalog();
    if a.list {
        let mut t = Table::new(&["identity", "uses_power"]);
        for id in &catalog {
            t.push(vec![id.name().into(), id.uses_power().into()]);
        }
        let mut p = Product::new("identities", t);
        p.summary.extend(catalog.iter().map(|id| id.name()));
        return Ok(p);
    }
    let selected: Vec<Identity> = if a.identities.is_empty() || a.all {
        catalog
    } else {
        a.identities
            .iter()
            .map(|name| {
                catalog
                    .iter()
                    .copied()
                    .find(|id| id.name() == *name)
                    .ok_or_else(|| CliError::Usage(format!("unknown identity {name:?}; see verify --list")))
            })
            .collect::<Result<_, _>>()?
    };
    let base = OracleConfig::identities();
    let cfg = OracleConfig {
        dim: s.usize_or("dim", base.dim)?,
        safe_buffer: s.usize_or("buffer", base.safe_buffer)?,
        ..base
    };
    cfg.validate()?;
    let max_power = s.usize_or("max_power", 6)?;
    let tol = s.f64_or("tolerance", 1e-9)?;
    let jobs: Vec<(Identity, usize)> = selected.iter().flat_map(|&id| id.powers(max_power).map(move |n| (id, n))).collect();
    let pool = thread_pool()?;
    let devs = pool.install(|| jobs.par_iter().map(|&(id, n)| verify_identity(id, n, &cfg)).collect::<Result<Vec<_>, _>>())?;
    let mut t = Table::new(&["identity", "n", "deviation", "pass"]);
    let mut failed = Vec::new();
    let mut worst = 0.0f64;
    for (&(id, n), &dev) in jobs.iter().zip(&devs) {
        let pass = dev < tol;
        if !pass {
            failed.push(format!("{} n={n}", id.name()));
        }
        worst = worst.max(dev);
        t.push(vec![id.name().into(), n.into(), dev.into(), pass.into()]);
    }
    let mut p = Product::new("verify", t);
    p.results.insert("checks".into(), Value::from(jobs.len()));
    p.results.insert("worst_deviation".into(), Value::from(worst));
    p.summary.push(format!("{} checks, worst deviation {worst:.3e}, {} failed", jobs.len(), failed.len()));
    if !failed.is_empty() {
        p.failure = Some(format!("deviation >= {tol} for {}", failed.join(", ")));
    }
    Ok(p)
}

fn compare_flags(a: &CompareArgs) -> Flags {
    let mut f = io_flags(&a.io);
    f.extend(model_flags(&a.model));
    f.extend(thermal_flags(&a.thermal));
    f.extend(grid_flags(&a.grid));
    f.extend([("n", opt(&a.n)), ("dim", opt(&a.dim))]);
    f
}

fn run_compare(s: &Settings) -> Result<Product, CliError> {
    let params = model(s, (2.0, 4.0, 1.0, 2.0))?;
    let tp = thermal(s, &params, PI / 64.0)?;
    let g = grid(s, (0.0, 10.0, 100))?;
    let n = s.usize_or("n", DEFAULT_N)?;
    let cfg = OracleConfig::default().with_dim(s.usize_or("dim", OracleConfig::default().dim)?);
    cfg.validate()?;
    let d = derive(&params)?;
    let trace = inversion_trace(&params, &d, &tp, &g, n)?;
    let state = ThermalCoherentState::prepare_certified(params.alpha, tp.theta, &cfg)?;
    let times = g.times();
    let pool = thread_pool()?;
    let exact: Vec<f64> = pool.install(|| times.par_iter().map(|&t| 1.0 - 2.0 * state.pg(&params, &d, &tp, t)).collect());
    let mut table = Table::new(&["t", "sigma_z_series", "sigma_z_exact", "abs_diff"]);
    let mut worst = 0.0f64;
    for (sample, &e) in trace.samples.iter().zip(&exact) {
        let diff = (sample.sigma_z - e).abs();
        worst = worst.max(diff);
        table.push(vec![sample.t.into(), sample.sigma_z.into(), e.into(), diff.into()]);
    }
    let mut p = Product::new("oracle-compare", table);
    p.results.insert("thermal".into(), thermal_json(&tp));
    p.results.insert("max_abs_diff".into(), Value::from(worst));
    p.results.insert("state_norm".into(), Value::from(state.norm_sq()));
    p.plot = Some(
        Plot::new("series against brute force", "t", "<sigma_z>")
            .with_series("series", trace.samples.iter().map(|x| (x.t, x.sigma_z)).collect())
            .with_series("exact", times.iter().copied().zip(exact.iter().copied()).collect()),
    );
    p.summary.push(format!("max |series - exact| = {worst:.3e}"));
    Ok(p)
}

fn reproduce_flags(a: &ReproduceArgs) -> Flags {
    let mut f = io_flags(&a.io);
    f.extend([("figure", opt(&a.figure)), ("table", opt(&a.table))]);
    f
}

fn run_reproduce(s: &Settings) -> Result<Product, CliError> {
    let figure = s.string("figure");
    let table = s.string("table");
    let parse = |v: &str| v.parse::<u8>().map_err(|_| CliError::Usage(format!("expected a small integer, got {v:?}")));
    match (figure, table) {
        (Some(f), None) => reproduce_figure(parse(&f)?),
        (None, Some(t)) => reproduce_table(parse(&t)?),
        _ => Err(CliError::Usage("reproduce needs exactly one of --figure or --table".into())),
    }
}

fn reproduce_figure(id: u8) -> Result<Product, CliError> {
    let stem = format!("figure{id}");
    match id {
        1..=4 => {
            let cfg = FigureConfig::figure(id)?;
            inversion_product(&stem, &cfg.params, &cfg.thermal, &cfg.grid, DEFAULT_N)
        }
        5 | 6 => {
            let alpha = if id == 5 { 4.0 } else { 8.0 };
            let params = ModelParams::new(2.0, 4.0, 1.0, alpha)?;
            sweep_product(&stem, &params, 0.0, default_theta_hi(alpha), SWEEP_POINTS, &default_window(alpha), DEFAULT_N)
        }
        7..=9 => {
            let params = ModelParams::new(1.0, 1.0, 1.0, 0.0)?;
            let data = spectral_figures(&params, &linspace(0.0, 10.0, 2001), DEFAULT_SPECTRUM_N_MAX)?;
            Ok(match id {
                7 => energies_product(&data),
                8 => spectrum_product(&stem, &data, false),
                _ => spectrum_product(&stem, &data, true),
            })
        }
        _ => Err(CliError::Usage(format!("figures are numbered 1 to 9, got {id}"))),
    }
}

fn reproduce_table(id: u8) -> Result<Product, CliError> {
    let cfg = TableConfig::table(id)?;
    let rows = correction_table(&cfg)?;
    let mut t = Table::new(&["label", "min", "max"]);
    for r in &rows {
        t.push(vec![r.label.clone().into(), r.min.into(), r.max.into()]);
    }
    let mut p = Product::new(&format!("table{id}"), t);
    p.results.insert(
        "grid".into(),
        json!({"t0": cfg.grid.t0, "t1": cfg.grid.t1, "steps": cfg.grid.steps, "alpha": cfg.params.alpha, "theta": cfg.theta, "n": cfg.n}),
    );
    for r in &rows {
        p.summary.push(format!("{:<24} [{:.4}, {:.4}]", r.label, r.min, r.max));
    }
    Ok(p)
}
