//! Time traces, revival periods, period-vs-temperature fits, correction
//! tables and spectral scans.
//!
//! All routines are sequential and deterministic. Sweeps are split into a
//! shared precomputation and independent per-`theta` evaluations so a caller
//! can spread the latter over threads.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::math::{ln, sqrt};
use crate::model::{derive, DerivedParams, ModelParams, ThermalPoint};
use crate::tfd::{combine, theta_weight, CorrectionBreakdown, QEvaluator, QValues, MAX_ORDER};
use crate::zero_temp::{excitation_gap, ground_state_index, spectrum, DEFAULT_N};

/// `steps + 1` equally spaced times from `t0` to `t1` inclusive.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeGrid {
    pub t0: f64,
    pub t1: f64,
    pub steps: usize,
}

impl TimeGrid {
    pub fn new(t0: f64, t1: f64, steps: usize) -> Result<Self> {
        let g = TimeGrid { t0, t1, steps };
        g.validate()?;
        Ok(g)
    }

    /// Grid with spacing `dt`; `(t1 - t0)/dt` is rounded to an integer.
    pub fn with_spacing(t0: f64, t1: f64, dt: f64) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::Domain { what: "dt must be > 0", value: dt });
        }
        let steps = libm::round((t1 - t0) / dt);
        if !(steps >= 0.0) || !steps.is_finite() {
            return Err(Error::Domain { what: "time window must satisfy t1 >= t0", value: t1 - t0 });
        }
        Self::new(t0, t1, steps as usize)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.t0.is_finite() || !self.t1.is_finite() {
            return Err(Error::Domain { what: "grid endpoints must be finite", value: self.t1 });
        }
        if self.t0 < 0.0 {
            return Err(Error::Domain { what: "t must be >= 0", value: self.t0 });
        }
        if self.t1 < self.t0 {
            return Err(Error::Domain { what: "grid needs t1 >= t0", value: self.t1 });
        }
        if self.steps == 0 && self.t1 != self.t0 {
            return Err(Error::Domain { what: "a single-point grid needs t1 == t0", value: self.t1 });
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dt(&self) -> f64 {
        if self.steps == 0 {
            0.0
        } else {
            (self.t1 - self.t0) / self.steps as f64
        }
    }

    pub fn time(&self, k: usize) -> f64 {
        if k == self.steps {
            self.t1
        } else {
            self.t0 + k as f64 * self.dt()
        }
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.time(k)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InversionSample {
    pub t: f64,
    pub sigma_z: f64,
    /// Weighted correction of each order, `[kind][order]`.
    pub weighted: [[f64; 4]; 2],
}

#[derive(Clone, Debug, PartialEq)]
pub struct InversionTrace {
    pub samples: Vec<InversionSample>,
}

impl InversionTrace {
    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.sigma_z).collect()
    }
}

/// Third-order `<sigma_z(t)>` on every point of `grid`.
pub fn inversion_trace(
    params: &ModelParams,
    derived: &DerivedParams,
    thermal: &ThermalPoint,
    grid: &TimeGrid,
    n: usize,
) -> Result<InversionTrace> {
    grid.validate()?;
    let eval = QEvaluator::new(params, derived, n)?;
    let samples = (0..grid.len())
        .map(|k| {
            let t = grid.time(k);
            let b = CorrectionBreakdown::from_q(&eval.at(t)?, params.alpha, thermal);
            Ok(InversionSample { t, sigma_z: b.sigma_z, weighted: b.weighted })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(InversionTrace { samples })
}

/// Grid extremes of `<sigma_z>` inside a window.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PeriodEstimate {
    pub theta: f64,
    pub t_max: f64,
    pub t_min: f64,
    pub sigma_at_max: f64,
    pub sigma_at_min: f64,
    /// `(t_max + t_min) / 2`.
    pub period: f64,
}

/// Window and spacing used to locate the first revival.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PeriodWindow {
    pub start: f64,
    pub end: f64,
    pub dt: f64,
}

impl PeriodWindow {
    /// `alpha = 4` sweep window.
    pub fn alpha4() -> Self {
        PeriodWindow { start: 7.5 * PI, end: 10.0 * PI, dt: 5.0 * PI * 1e-4 }
    }

    /// `alpha = 8` sweep window.
    pub fn alpha8() -> Self {
        PeriodWindow { start: 15.0 * PI, end: 20.0 * PI, dt: 10.0 * PI * 1e-4 }
    }

    pub fn grid(&self) -> Result<TimeGrid> {
        TimeGrid::with_spacing(self.start, self.end, self.dt)
    }
}

/// First argmax and first argmin of `values`; `period` is their midpoint.
pub fn estimate_period(theta: f64, times: &[f64], values: &[f64]) -> Result<PeriodEstimate> {
    if times.len() != values.len() {
        return Err(Error::Shape("times and values differ in length"));
    }
    if values.is_empty() {
        return Err(Error::Shape("empty trace"));
    }
    let (mut imax, mut imin) = (0, 0);
    for (i, &v) in values.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::Domain { what: "non-finite trace value", value: v });
        }
        if v > values[imax] {
            imax = i;
        }
        if v < values[imin] {
            imin = i;
        }
    }
    if values[imax] == values[imin] {
        return Err(Error::NoRevival);
    }
    Ok(PeriodEstimate {
        theta,
        t_max: times[imax],
        t_min: times[imin],
        sigma_at_max: values[imax],
        sigma_at_min: values[imin],
        period: 0.5 * (times[imax] + times[imin]),
    })
}

/// Period estimate from a freshly computed trace over `window`.
pub fn estimate_period_at(
    params: &ModelParams,
    derived: &DerivedParams,
    thermal: &ThermalPoint,
    window: &PeriodWindow,
    n: usize,
) -> Result<PeriodEstimate> {
    let trace = inversion_trace(params, derived, thermal, &window.grid()?, n)?;
    estimate_period(thermal.theta, &trace.times(), &trace.values())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitResult {
    pub intercept: f64,
    pub slope: f64,
    pub rms_residual: f64,
}

/// Ordinary least squares `y = intercept + slope x`.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> Result<FitResult> {
    if xs.len() != ys.len() {
        return Err(Error::Shape("x and y differ in length"));
    }
    if xs.len() < 2 {
        return Err(Error::Shape("a line fit needs two points"));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Shape("all x values coincide"));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - intercept - slope * x;
            r * r
        })
        .sum();
    Ok(FitResult { intercept, slope, rms_residual: sqrt(ss / n) })
}

/// Default number of `theta` points in a sweep.
pub const SWEEP_POINTS: usize = 33;

/// `n_points` evenly spaced values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n_points: usize) -> Vec<f64> {
    match n_points {
        0 => Vec::new(),
        1 => alloc::vec![lo],
        _ => (0..n_points)
            .map(|k| {
                if k + 1 == n_points {
                    hi
                } else {
                    lo + (hi - lo) * k as f64 / (n_points - 1) as f64
                }
            })
            .collect(),
    }
}

/// The `Q` series on a period window. They do not depend on temperature, so
/// one table serves every point of a sweep.
#[derive(Clone, Debug)]
pub struct SweepTable {
    pub params: ModelParams,
    pub window: PeriodWindow,
    times: Vec<f64>,
    q: Vec<QValues>,
}

impl SweepTable {
    pub fn new(params: &ModelParams, window: &PeriodWindow, n: usize) -> Result<Self> {
        let derived = derive(params)?;
        let times = window.grid()?.times();
        let q = QEvaluator::new(params, &derived, n)?.table(&times)?;
        Ok(SweepTable { params: *params, window: *window, times, q })
    }

    /// Period at one temperature; both angles follow from `theta` through
    /// the same `beta`.
    pub fn period(&self, theta: f64) -> Result<PeriodEstimate> {
        let thermal = ThermalPoint::from_theta(theta, &self.params)?;
        let values: Vec<f64> = self
            .q
            .iter()
            .map(|q| CorrectionBreakdown::from_q(q, self.params.alpha, &thermal).sigma_z)
            .collect();
        estimate_period(theta, &self.times, &values)
    }
}

/// Least-squares line through `(theta, ln T)`.
pub fn fit_periods(points: &[PeriodEstimate]) -> Result<FitResult> {
    let xs: Vec<f64> = points.iter().map(|p| p.theta).collect();
    let ys: Vec<f64> = points
        .iter()
        .map(|p| {
            if p.period > 0.0 {
                Ok(ln(p.period))
            } else {
                Err(Error::Domain { what: "period must be > 0", value: p.period })
            }
        })
        .collect::<Result<_>>()?;
    fit_line(&xs, &ys)
}

/// Period at each of `n_points` temperatures in `[theta_lo, theta_hi]`, and
/// the fit of `ln T` against `theta`. Results are in `theta` order.
pub fn sweep_and_fit(
    params: &ModelParams,
    theta_lo: f64,
    theta_hi: f64,
    n_points: usize,
    window: &PeriodWindow,
    n: usize,
) -> Result<(Vec<PeriodEstimate>, FitResult)> {
    if !(theta_lo >= 0.0) || !(theta_hi >= theta_lo) {
        return Err(Error::Domain { what: "theta range must satisfy 0 <= lo <= hi", value: theta_lo });
    }
    let table = SweepTable::new(params, window, n)?;
    let points = linspace(theta_lo, theta_hi, n_points)
        .into_iter()
        .map(|th| table.period(th))
        .collect::<Result<Vec<_>>>()?;
    let fit = fit_periods(&points)?;
    Ok((points, fit))
}

/// Settings of one correction table.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TableConfig {
    pub params: ModelParams,
    pub theta: f64,
    pub grid: TimeGrid,
    pub n: usize,
}

impl TableConfig {
    pub fn table(id: u8) -> Result<Self> {
        let (alpha, theta, t_end) = match id {
            1 => (4.0, PI / 32.0, 20.0 * PI),
            2 => (8.0, PI / 60.0, 40.0 * PI),
            _ => return Err(Error::Domain { what: "table id must be 1 or 2", value: id as f64 }),
        };
        Ok(TableConfig {
            params: ModelParams::new(2.0, 4.0, 1.0, alpha)?,
            theta,
            grid: TimeGrid::new(0.0, t_end, 10_000)?,
            n: DEFAULT_N,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TableRow {
    pub label: String,
    pub order: usize,
    pub kind: u8,
    pub min: f64,
    pub max: f64,
}

fn row_label(order: usize, kind: u8) -> String {
    let prefix = match order {
        1 => "theta",
        2 => "(1/2)theta^2",
        _ => "(1/6)theta^3",
    };
    alloc::format!("{prefix}P^({order})_g{kind}")
}

/// Extremes of `theta^m/m! P^(m)_{g,k}(t)` over the grid for `m = 1..=3` and
/// both kinds, in order `(1,1), (1,2), (2,1), ...`.
pub fn correction_table(cfg: &TableConfig) -> Result<Vec<TableRow>> {
    let derived = derive(&cfg.params)?;
    let eval = QEvaluator::new(&cfg.params, &derived, cfg.n)?;
    let mut lo = [[f64::INFINITY; 4]; 2];
    let mut hi = [[f64::NEG_INFINITY; 4]; 2];
    for k in 0..cfg.grid.len() {
        let q = eval.at(cfg.grid.time(k))?;
        for kind in 0..2 {
            for order in 1..=MAX_ORDER {
                let v = theta_weight(order, cfg.theta) * combine(order, &q.q[kind], cfg.params.alpha)?;
                lo[kind][order] = lo[kind][order].min(v);
                hi[kind][order] = hi[kind][order].max(v);
            }
        }
    }
    let mut rows = Vec::with_capacity(6);
    for order in 1..=MAX_ORDER {
        for kind in 0..2 {
            rows.push(TableRow {
                label: row_label(order, kind as u8 + 1),
                order,
                kind: kind as u8 + 1,
                min: lo[kind][order],
                max: hi[kind][order],
            });
        }
    }
    Ok(rows)
}

pub fn reproduce_table(id: u8) -> Result<Vec<TableRow>> {
    correction_table(&TableConfig::table(id)?)
}

/// Settings behind the four inversion figures.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FigureConfig {
    pub params: ModelParams,
    pub thermal: ThermalPoint,
    pub grid: TimeGrid,
}

impl FigureConfig {
    pub fn figure(id: u8) -> Result<Self> {
        let (alpha, theta, t_end) = match id {
            1 => (4.0, 0.0, 20.0 * PI),
            2 => (4.0, PI / 32.0, 20.0 * PI),
            3 => (8.0, 0.0, 40.0 * PI),
            4 => (8.0, PI / 60.0, 40.0 * PI),
            _ => return Err(Error::Domain { what: "inversion figures are 1..=4", value: id as f64 }),
        };
        let params = ModelParams::new(2.0, 4.0, 1.0, alpha)?;
        Ok(FigureConfig {
            params,
            thermal: ThermalPoint::from_theta(theta, &params)?,
            grid: TimeGrid::new(0.0, t_end, 10_000)?,
        })
    }
}

/// One `kappa` of the spectral scan.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralPoint {
    pub kappa: f64,
    pub e00: f64,
    /// Lower doublet energies `E_{n,2}`, `n = 0..levels`.
    pub lower: Vec<f64>,
    /// `-1` for the bare ground state.
    pub n_ground: i64,
    pub gap: f64,
}

/// Local minimum of the gap refined around a coarse-grid dip.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GapDip {
    pub kappa: f64,
    pub gap: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralData {
    pub points: Vec<SpectralPoint>,
    pub dips: Vec<GapDip>,
}

/// Levels plotted per `kappa` in the ground-energy figure.
pub const PLOTTED_LEVELS: usize = 25;

fn golden_min<F: Fn(f64) -> Result<f64>>(f: F, mut a: f64, mut b: f64) -> Result<(f64, f64)> {
    let r = (sqrt(5.0) - 1.0) / 2.0;
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    for _ in 0..200 {
        if b - a < 1e-15 * (1.0 + a.abs()) {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 <= f2 { (x1, f1) } else { (x2, f2) })
}

/// Ground energies, ground index and gap on `kappas`, plus refined gap dips.
pub fn spectral_figures(params: &ModelParams, kappas: &[f64], n_max: usize) -> Result<SpectralData> {
    let points = kappas
        .iter()
        .map(|&kappa| {
            let p = params.with_kappa(kappa);
            let s = spectrum(&p, n_max.min(PLOTTED_LEVELS - 1));
            Ok(SpectralPoint {
                kappa,
                e00: s.e00,
                lower: s.rows.iter().map(|r| r.e_n2).collect(),
                n_ground: ground_state_index(params, kappa, n_max)?.as_index(),
                gap: excitation_gap(params, kappa, n_max)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut dips = Vec::new();
    for i in 1..points.len().saturating_sub(1) {
        let (l, m, r) = (&points[i - 1], &points[i], &points[i + 1]);
        if m.gap <= l.gap && m.gap < r.gap {
            let dip = golden_min(|k| excitation_gap(params, k, n_max), l.kappa, r.kappa)?;
            dips.push(GapDip { kappa: dip.0, gap: dip.1 });
        }
    }
    Ok(SpectralData { points, dips })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::{cos, exp, sin};
    use crate::zero_temp::timescales;

    #[test]
    fn grid_endpoints_are_exact() {
        let g = TimeGrid::new(0.0, 20.0 * PI, 10_000).unwrap();
        assert_eq!(g.len(), 10_001);
        assert_eq!(g.time(10_000), 20.0 * PI);
        assert_eq!(g.times()[0], 0.0);
        let w = PeriodWindow::alpha4().grid().unwrap();
        assert_eq!(w.steps, 5000);
        assert!(TimeGrid::new(1.0, 0.5, 3).is_err());
        assert!(TimeGrid::new(0.0, 1.0, 0).is_err());
    }

    #[test]
    fn single_point_trace() {
        let cfg = FigureConfig::figure(2).unwrap();
        let d = derive(&cfg.params).unwrap();
        let tr = inversion_trace(&cfg.params, &d, &cfg.thermal, &TimeGrid::new(0.0, 0.0, 0).unwrap(), 100).unwrap();
        assert_eq!(tr.samples.len(), 1);
        let c = cos(cfg.thermal.fermion_theta);
        assert!((tr.samples[0].sigma_z - (1.0 - 2.0 * c * c)).abs() < 1e-14);
    }

    #[test]
    fn flat_trace_has_no_revival() {
        assert_eq!(estimate_period(0.0, &[0.0, 1.0, 2.0], &[0.3; 3]), Err(Error::NoRevival));
        assert!(estimate_period(0.0, &[0.0], &[0.3, 0.1]).is_err());
    }

    #[test]
    fn envelope_period_is_two_pi_alpha() {
        // the envelope model revives at 2 pi alpha
        let alpha: f64 = 4.0;
        let w = PeriodWindow::alpha4();
        let g = w.grid().unwrap();
        let ts = g.times();
        let ys: Vec<f64> = ts
            .iter()
            .map(|&t| -exp(alpha * alpha * (cos(t / alpha) - 1.0)) * cos(alpha * t + alpha * alpha * sin(t / alpha)))
            .collect();
        let est = estimate_period(0.0, &ts, &ys).unwrap();
        let rabi_step = PI / (2.0 * alpha);
        assert!((est.period - 2.0 * PI * alpha).abs() <= rabi_step, "{}", est.period);
        assert!(est.t_max >= w.start && est.t_max <= w.end);
    }

    #[test]
    fn named_extremum_window() {
        let p = ModelParams::new(2.0, 4.0, 1.0, 4.0).unwrap();
        let table = SweepTable::new(&p, &PeriodWindow::alpha4(), 100).unwrap();
        let est = table.period(PI / 32.0).unwrap();
        // reference times are quoted to two decimals
        let two = |x: f64| libm::round(x * 100.0) / 100.0;
        assert_eq!(two(est.t_max), 28.52, "{}", est.t_max);
        assert_eq!(two(est.t_min), 28.86, "{}", est.t_min);
        assert_eq!(two(est.period), 28.69, "{}", est.period);
        assert!((est.sigma_at_max - 0.3923).abs() < 1e-3);
        assert!((est.sigma_at_min + 0.4763).abs() < 1e-3);
        assert!((est.t_max - 28.5162).abs() < 1e-4 && (est.t_min - 28.8602).abs() < 1e-4);
    }

    #[test]
    fn zero_temperature_period_near_revival_time() {
        let p = ModelParams::new(2.0, 4.0, 1.0, 4.0).unwrap();
        let est = SweepTable::new(&p, &PeriodWindow::alpha4(), 100).unwrap().period(0.0).unwrap();
        let ts = timescales(&p, 0.0).unwrap();
        // the grid extremes sit on individual Rabi wiggles, not on the envelope peak
        assert!((est.period - ts.revival).abs() < 2.0 * ts.rabi, "{} vs {}", est.period, ts.revival);
    }

    #[test]
    fn collinear_fit_is_exact() {
        let xs = [0.0, 0.1, 0.2, 0.5];
        let ys: Vec<f64> = xs.iter().map(|x| 3.25 + 0.988 * x).collect();
        let f = fit_line(&xs, &ys).unwrap();
        assert!((f.intercept - 3.25).abs() < 1e-14 && (f.slope - 0.988).abs() < 1e-13);
        assert!(f.rms_residual < 1e-14);
        assert!(fit_line(&[1.0, 1.0], &[0.0, 1.0]).is_err());
    }

    #[test]
    fn linspace_includes_both_ends() {
        let v = linspace(0.0, PI / 32.0, SWEEP_POINTS);
        assert_eq!(v.len(), 33);
        assert_eq!(v[0], 0.0);
        assert_eq!(v[32], PI / 32.0);
    }

    #[test]
    fn table_on_zero_grid_is_zero() {
        let mut cfg = TableConfig::table(1).unwrap();
        cfg.grid = TimeGrid::new(0.0, 0.0, 0).unwrap();
        for row in correction_table(&cfg).unwrap() {
            assert!(row.min.abs() < 1e-14 && row.max.abs() < 1e-14, "{row:?}");
        }
    }

    #[test]
    fn table_labels_in_order() {
        let mut cfg = TableConfig::table(1).unwrap();
        cfg.grid = TimeGrid::new(0.0, 1.0, 10).unwrap();
        let rows = correction_table(&cfg).unwrap();
        let got: Vec<(usize, u8)> = rows.iter().map(|r| (r.order, r.kind)).collect();
        assert_eq!(got, [(1, 1), (1, 2), (2, 1), (2, 2), (3, 1), (3, 2)]);
        assert_eq!(rows[2].label, "(1/2)theta^2P^(2)_g1");
    }

    #[test]
    fn spectral_scan_small() {
        let p = ModelParams::new(1.0, 1.0, 1.0, 0.0).unwrap();
        let kappas = linspace(0.0, 3.0, 301);
        let data = spectral_figures(&p, &kappas, 200).unwrap();
        assert_eq!(data.points[0].gap, 1.0);
        assert_eq!(data.points[0].n_ground, -1);
        assert_eq!(data.points[0].lower.len(), PLOTTED_LEVELS);
        // crossings at kappa = 1 and 1/(sqrt 2 - 1)
        let expect = [1.0, 1.0 / (sqrt(2.0) - 1.0)];
        assert_eq!(data.dips.len(), 2);
        for (d, e) in data.dips.iter().zip(expect) {
            assert!((d.kappa - e).abs() < 1e-6, "{d:?}");
            assert!(d.gap < 1e-6);
        }
    }
}
