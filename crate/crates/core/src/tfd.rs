//! Low-temperature expansion of the ground-state probability in powers of the
//! boson angle `theta`, through third order.
//!
//! Every correction is a fixed integer combination of the shifted Poisson
//! sums `Q_k^(l)(t)`, `l = 0..=order`:
//!
//! ```text
//! Q_1^(l) = sum_n w_n g1(n + c + l)
//! Q_2^(l) = sum_n w_n sin^2(sqrt(n+c+1+l)|k|t) / (n+c+1+l) * (n+1+l)
//! P^(m)_{g,k} = sum_l p_{m,l}(alpha^2) Q_k^(l)
//! ```
//!
//! The fermion angle is not expanded; it only weights the two kinds.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::math::{cos, powi};
use crate::model::{g1_unchecked, poisson_weights, sin_sq_over, DerivedParams, ModelParams, ThermalPoint};
use crate::zero_temp::check_sum_args;

pub const MAX_ORDER: usize = 3;
const FACTORIAL: [f64; 4] = [1.0, 1.0, 2.0, 6.0];

/// `COEFFS[order][l][j]` is the coefficient of `alpha^(2j)` multiplying
/// `Q^(l)` in the correction of that order. Shared by both kinds.
pub const COEFFS: [[[i64; 4]; 4]; 4] = [
    [[1, 0, 0, 0], [0; 4], [0; 4], [0; 4]],
    [[0, -2, 0, 0], [0, 2, 0, 0], [0; 4], [0; 4]],
    // 2(2x+1)(x-1), -2(2x+1)(2x-1), 2x(2x+1)
    [[-2, -2, 4, 0], [2, 0, -8, 0], [0, 2, 4, 0], [0; 4]],
    // -4x(2x^2-3x-4), 4x(6x^2-3x-10), -12x(2x^2+x-2), 4x^2(2x+3)
    [[0, 16, 12, -8], [0, -40, -12, 24], [0, 24, -12, -24], [0, 0, 12, 8]],
];

/// Which spectral function a series is built from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    One,
    Two,
}

impl Kind {
    pub const BOTH: [Kind; 2] = [Kind::One, Kind::Two];

    pub fn index(self) -> usize {
        match self {
            Kind::One => 0,
            Kind::Two => 1,
        }
    }

    pub fn from_number(k: u8) -> Result<Kind> {
        match k {
            1 => Ok(Kind::One),
            2 => Ok(Kind::Two),
            _ => Err(Error::Domain { what: "kind must be 1 or 2", value: k as f64 }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QSeriesSpec {
    pub kind: Kind,
    pub l: usize,
    pub n: usize,
}

impl QSeriesSpec {
    pub fn validate(&self) -> Result<()> {
        if self.l > MAX_ORDER {
            return Err(Error::Domain { what: "shift l must be in 0..=3", value: self.l as f64 });
        }
        if self.n < 1 {
            return Err(Error::Domain { what: "truncation N must be >= 1", value: self.n as f64 });
        }
        Ok(())
    }
}

#[inline]
fn q_term(kind: Kind, k: usize, l: usize, c: f64, tau: f64) -> f64 {
    match kind {
        Kind::One => g1_unchecked(k as f64 + c + l as f64, c, tau),
        Kind::Two => {
            let m = (k + 1 + l) as f64;
            sin_sq_over(k as f64 + c + 1.0 + l as f64, tau) * m
        }
    }
}

pub fn q_series(spec: QSeriesSpec, params: &ModelParams, derived: &DerivedParams, t: f64) -> Result<f64> {
    spec.validate()?;
    check_sum_args(t, spec.n)?;
    let tau = params.kappa.abs() * t;
    let w = poisson_weights(params.alpha, spec.n);
    Ok(w
        .iter()
        .enumerate()
        .map(|(k, wk)| wk * q_term(spec.kind, k, spec.l, derived.c, tau))
        .sum())
}

/// All eight series `Q_k^(l)`, `l = 0..=3`, at one time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QValues {
    /// Indexed `[kind][l]`.
    pub q: [[f64; 4]; 2],
}

/// Evaluates `QValues` on many times while reusing the Poisson weights.
#[derive(Clone, Debug)]
pub struct QEvaluator {
    weights: Vec<f64>,
    c: f64,
    kappa: f64,
}

impl QEvaluator {
    pub fn new(params: &ModelParams, derived: &DerivedParams, n: usize) -> Result<Self> {
        check_sum_args(0.0, n)?;
        Ok(QEvaluator {
            weights: poisson_weights(params.alpha, n),
            c: derived.c,
            kappa: params.kappa,
        })
    }

    pub fn at(&self, t: f64) -> Result<QValues> {
        check_sum_args(t, self.weights.len() - 1)?;
        let tau = self.kappa.abs() * t;
        let mut q = [[0.0; 4]; 2];
        for (k, wk) in self.weights.iter().enumerate() {
            for l in 0..4 {
                q[0][l] += wk * q_term(Kind::One, k, l, self.c, tau);
                q[1][l] += wk * q_term(Kind::Two, k, l, self.c, tau);
            }
        }
        Ok(QValues { q })
    }

    pub fn table(&self, grid: &[f64]) -> Result<Vec<QValues>> {
        grid.iter().map(|&t| self.at(t)).collect()
    }
}

/// Value of the polynomial coefficient multiplying `Q^(l)` at amplitude `alpha`.
pub fn coefficient(order: usize, l: usize, alpha: f64) -> Result<f64> {
    if order > MAX_ORDER {
        return Err(Error::OrderNotImplemented(order));
    }
    let x = alpha * alpha;
    if l > 3 {
        return Ok(0.0);
    }
    let row = &COEFFS[order][l];
    Ok(row.iter().rev().fold(0.0, |acc, &p| acc * x + p as f64))
}

/// `P^(order)` from the four shifted series of one kind.
pub fn combine(order: usize, q: &[f64; 4], alpha: f64) -> Result<f64> {
    if order > MAX_ORDER {
        return Err(Error::OrderNotImplemented(order));
    }
    let mut acc = 0.0;
    for (l, ql) in q.iter().enumerate().take(order + 1) {
        acc += coefficient(order, l, alpha)? * ql;
    }
    Ok(acc)
}

/// Raw correction `P^(order)_{g,kind}(t)`.
pub fn correction(
    order: usize,
    kind: Kind,
    params: &ModelParams,
    derived: &DerivedParams,
    t: f64,
    n: usize,
) -> Result<f64> {
    if order > MAX_ORDER {
        return Err(Error::OrderNotImplemented(order));
    }
    let mut q = [0.0; 4];
    for (l, slot) in q.iter_mut().enumerate().take(order + 1) {
        *slot = q_series(QSeriesSpec { kind, l, n }, params, derived, t)?;
    }
    combine(order, &q, params.alpha)
}

/// `theta^order / order!`.
pub fn theta_weight(order: usize, theta: f64) -> f64 {
    powi(theta, order as u32) / FACTORIAL[order]
}

/// Per-order, per-kind pieces of the thermal inversion at one time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrectionBreakdown {
    /// `P^(n)_{g,kind}`, indexed `[kind][n]`.
    pub raw: [[f64; 4]; 2],
    /// `theta^n/n! * (cos^2 or sin^2 of the fermion angle) * P^(n)`.
    pub weighted: [[f64; 4]; 2],
    pub pg: f64,
    pub sigma_z: f64,
}

impl CorrectionBreakdown {
    pub fn from_q(q: &QValues, alpha: f64, thermal: &ThermalPoint) -> Self {
        let fermion = [thermal.cos_sq_fermion(), thermal.sin_sq_fermion()];
        let mut raw = [[0.0; 4]; 2];
        let mut weighted = [[0.0; 4]; 2];
        let mut pg = 0.0;
        for kind in 0..2 {
            for order in 0..=MAX_ORDER {
                let p = combine(order, &q.q[kind], alpha).expect("order within table");
                raw[kind][order] = p;
                weighted[kind][order] = fermion[kind] * theta_weight(order, thermal.theta) * p;
                pg += weighted[kind][order];
            }
        }
        CorrectionBreakdown { raw, weighted, pg, sigma_z: 1.0 - 2.0 * pg }
    }

    /// Rebuilds `<sigma_z>` from the weighted parts.
    pub fn reconstruct(&self) -> f64 {
        let pg: f64 = self.weighted.iter().flat_map(|row| row.iter()).sum();
        1.0 - 2.0 * pg
    }
}

/// Third-order thermal inversion with its breakdown.
pub fn sigma_z_thermal(
    params: &ModelParams,
    derived: &DerivedParams,
    thermal: &ThermalPoint,
    t: f64,
    n: usize,
) -> Result<(f64, CorrectionBreakdown)> {
    let q = QEvaluator::new(params, derived, n)?.at(t)?;
    let b = CorrectionBreakdown::from_q(&q, params.alpha, thermal);
    Ok((b.sigma_z, b))
}

/// Extremes of `theta^order/order! * P^(order)_{g,kind}` over `grid`.
pub fn correction_range(
    order: usize,
    kind: Kind,
    params: &ModelParams,
    derived: &DerivedParams,
    theta: f64,
    grid: &[f64],
    n: usize,
) -> Result<(f64, f64)> {
    if order > MAX_ORDER {
        return Err(Error::OrderNotImplemented(order));
    }
    if grid.is_empty() {
        return Err(Error::Shape("empty time grid"));
    }
    let eval = QEvaluator::new(params, derived, n)?;
    let w = theta_weight(order, theta);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &t in grid {
        let q = eval.at(t)?;
        let v = w * combine(order, &q.q[kind.index()], params.alpha)?;
        lo = lo.min(v);
        hi = hi.max(v);
    }
    Ok((lo, hi))
}

/// Whether `(alpha, theta)` lies inside the range where the third-order
/// series has been checked against tabulated corrections.
pub fn within_validated_range(alpha: f64, theta: f64) -> bool {
    let a = alpha.abs();
    (a <= 4.0 && theta <= PI / 32.0) || (a <= 8.0 && theta <= PI / 60.0)
}

/// `cos^2` of the fermion angle, the `t = 0` ground-state probability.
pub fn initial_pg(thermal: &ThermalPoint) -> f64 {
    let c = cos(thermal.fermion_theta);
    c * c
}
