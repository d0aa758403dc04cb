//! Zero-temperature dynamics, time scales, the dressed spectrum and the
//! short-time law with counter-rotating terms.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::math::{atan2, cos, exp, sin, sqrt};
use crate::model::{g1_unchecked, poisson_weights, DerivedParams, ModelParams};

/// Default truncation of the Poisson sums (101 terms).
pub const DEFAULT_N: usize = 100;
/// Default Fock cutoff for spectral minimisation.
pub const DEFAULT_SPECTRUM_N_MAX: usize = 200;

pub(crate) fn check_sum_args(t: f64, n: usize) -> Result<()> {
    if n < 1 {
        return Err(Error::Domain { what: "truncation N must be >= 1", value: n as f64 });
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain { what: "time must be finite and >= 0", value: t });
    }
    Ok(())
}

/// Ground-state probability `P_g(t)` for an atom starting in the ground state
/// and the field in the coherent state `|alpha>`.
pub fn pg_zero(params: &ModelParams, derived: &DerivedParams, t: f64, n: usize) -> Result<f64> {
    check_sum_args(t, n)?;
    let tau = params.kappa.abs() * t;
    let w = poisson_weights(params.alpha, n);
    Ok(w
        .iter()
        .enumerate()
        .map(|(k, wk)| wk * g1_unchecked(k as f64 + derived.c, derived.c, tau))
        .sum())
}

pub fn sigma_z_zero(params: &ModelParams, derived: &DerivedParams, t: f64, n: usize) -> Result<f64> {
    Ok(1.0 - 2.0 * pg_zero(params, derived, t, n)?)
}

/// Poisson mass beyond `n`, `1 - sum_{k<=n} w_k`, summed from the tail side so
/// tiny residues are not lost to cancellation.
pub fn truncation_residue(alpha: f64, n: usize) -> f64 {
    let mean = alpha * alpha;
    if mean == 0.0 {
        return 0.0;
    }
    let upper = n + 64 + (10.0 * mean) as usize;
    let w = poisson_weights(alpha, upper);
    let mut tail = 0.0;
    for wk in w[n + 1..].iter().rev() {
        tail += wk;
    }
    tail
}

/// Large-amplitude approximation of the resonant inversion,
/// `-exp[a^2 (cos(|k|t/|a|) - 1)] cos(|a||k|t + a^2 sin(|k|t/|a|))`.
pub fn envelope_approx(alpha: f64, kappa: f64, t: f64) -> f64 {
    let a = alpha.abs();
    if a == 0.0 {
        return -1.0;
    }
    let phase = kappa.abs() * t / a;
    -exp(a * a * (cos(phase) - 1.0)) * cos(a * kappa.abs() * t + a * a * sin(phase))
}

/// Characteristic times of collapse and revival.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimescaleEstimate {
    pub collapse: f64,
    pub revival: f64,
    pub rabi: f64,
    /// Revival time with the amplitude rescaled to `|alpha| e^theta`.
    pub revival_thermal: f64,
}

impl TimescaleEstimate {
    pub fn revival_at(&self, theta: f64) -> f64 {
        self.revival * exp(theta)
    }
}

pub fn timescales(params: &ModelParams, theta: f64) -> Result<TimescaleEstimate> {
    let a = params.alpha.abs();
    let k = params.kappa.abs();
    if a == 0.0 {
        return Err(Error::Domain { what: "timescales need alpha != 0", value: params.alpha });
    }
    if k == 0.0 {
        return Err(Error::Domain { what: "timescales need kappa != 0", value: params.kappa });
    }
    let revival = 2.0 * PI * a / k;
    Ok(TimescaleEstimate {
        collapse: 1.0 / k,
        revival,
        rabi: PI / (a * k),
        revival_thermal: revival * exp(theta),
    })
}

/// One dressed doublet `{|n+1,g>, |n,e>}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectrumRow {
    pub n: usize,
    pub lambda_n: f64,
    pub e_n1: f64,
    pub e_n2: f64,
    pub theta_n: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    /// Energy of the bare ground state `|0,g>`.
    pub e00: f64,
    pub rows: Vec<SpectrumRow>,
}

fn spectrum_row(omega: f64, half_detuning: f64, kappa: f64, n: usize) -> SpectrumRow {
    let m = (n + 1) as f64;
    let lambda_n = sqrt(half_detuning * half_detuning + kappa * kappa * m);
    let centre = omega * (n as f64 + 0.5);
    SpectrumRow {
        n,
        lambda_n,
        e_n1: centre + lambda_n,
        e_n2: centre - lambda_n,
        theta_n: atan2(kappa * sqrt(m), half_detuning + lambda_n),
    }
}

/// Exact RWA spectrum up to doublet `n_max`. Valid for any `kappa`, including 0.
pub fn spectrum(params: &ModelParams, n_max: usize) -> Spectrum {
    let half = params.delta_omega() / 2.0;
    let rows = (0..=n_max)
        .map(|n| spectrum_row(params.omega, half, params.kappa, n))
        .collect();
    Spectrum { e00: -params.omega0 / 2.0, rows }
}

/// Which level carries the lowest energy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroundState {
    /// `|0,g>` with energy `-omega0/2`.
    Bare,
    /// Lower member `E_{n,2}` of doublet `n`.
    Dressed(usize),
}

impl GroundState {
    /// `-1` for the bare state, otherwise the doublet index.
    pub fn as_index(&self) -> i64 {
        match *self {
            GroundState::Bare => -1,
            GroundState::Dressed(n) => n as i64,
        }
    }
}

fn lowest_dressed(params: &ModelParams, kappa: f64, n_max: usize) -> (usize, f64) {
    let half = params.delta_omega() / 2.0;
    let mut best = (0, f64::INFINITY);
    for n in 0..=n_max {
        let e = spectrum_row(params.omega, half, kappa, n).e_n2;
        if e < best.1 {
            best = (n, e);
        }
    }
    best
}

pub fn ground_state_index(params: &ModelParams, kappa: f64, n_max: usize) -> Result<GroundState> {
    let (n, e) = lowest_dressed(params, kappa, n_max);
    if n == n_max {
        return Err(Error::IncreaseNMax { n_max });
    }
    if -params.omega0 / 2.0 <= e {
        Ok(GroundState::Bare)
    } else {
        Ok(GroundState::Dressed(n))
    }
}

/// Second-lowest minus lowest eigenvalue over all levels with `n <= n_max`.
pub fn excitation_gap(params: &ModelParams, kappa: f64, n_max: usize) -> Result<f64> {
    let (n, _) = lowest_dressed(params, kappa, n_max);
    if n == n_max {
        return Err(Error::IncreaseNMax { n_max });
    }
    let half = params.delta_omega() / 2.0;
    let mut lo = -params.omega0 / 2.0;
    let mut next = f64::INFINITY;
    let mut push = |e: f64| {
        if e < lo {
            next = lo;
            lo = e;
        } else if e < next {
            next = e;
        }
    };
    for k in 0..=n_max {
        let row = spectrum_row(params.omega, half, kappa, k);
        push(row.e_n2);
        push(row.e_n1);
    }
    Ok(next - lo)
}

/// Short-time inversion with counter-rotating terms for the atom starting
/// excited; `theta > 0` rescales the photon number by `e^{2 theta}`.
pub fn short_time_inversion(nbar: f64, phi: f64, kappa: f64, t: f64, theta: f64) -> f64 {
    let kt = kappa * t;
    let cphi = cos(phi);
    let n_eff = if theta > 0.0 { nbar * exp(2.0 * theta) } else { nbar };
    1.0 - 2.0 * kt * kt * (4.0 * n_eff * cphi * cphi + 1.0)
}
