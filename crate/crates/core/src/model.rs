//! Physical parameters, the spectral functions `g1`/`g2` and the thermal
//! parameter maps.
//!
//! Units: `hbar = 1`, `k_B = 1`. Frequencies and `kappa` are angular
//! frequencies, `beta` is an inverse frequency.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{atan, atanh, cos, exp, ln, sin, sqrt, tanh};

/// Below this argument the removable singularity of `sin^2(sqrt(x) tau) / x`
/// is evaluated from its Taylor expansion.
pub const SMALL_X: f64 = 1e-8;

/// Constants of the Jaynes-Cummings model plus the coherent amplitude of the
/// initial field.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    /// Atomic transition frequency.
    pub omega0: f64,
    /// Cavity mode frequency.
    pub omega: f64,
    /// Atom-field coupling (real).
    pub kappa: f64,
    /// Coherent amplitude (real).
    pub alpha: f64,
}

impl ModelParams {
    pub fn new(omega0: f64, omega: f64, kappa: f64, alpha: f64) -> Result<Self> {
        let params = ModelParams { omega0, omega, kappa, alpha };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega0 > 0.0) || !self.omega0.is_finite() {
            return Err(Error::Domain { what: "omega0 must be positive", value: self.omega0 });
        }
        if !(self.omega > 0.0) || !self.omega.is_finite() {
            return Err(Error::Domain { what: "omega must be positive", value: self.omega });
        }
        if !self.kappa.is_finite() {
            return Err(Error::Domain { what: "kappa must be finite", value: self.kappa });
        }
        if !self.alpha.is_finite() {
            return Err(Error::Domain { what: "alpha must be finite", value: self.alpha });
        }
        Ok(())
    }

    pub fn with_kappa(self, kappa: f64) -> Self {
        ModelParams { kappa, ..self }
    }

    pub fn with_alpha(self, alpha: f64) -> Self {
        ModelParams { alpha, ..self }
    }

    /// Detuning `omega - omega0`; defined for every coupling.
    pub fn delta_omega(&self) -> f64 {
        self.omega - self.omega0
    }

    pub fn derive(&self) -> Result<DerivedParams> {
        derive(self)
    }
}

/// Detuning and the dimensionless detuning parameter `c = (dw / 2 kappa)^2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DerivedParams {
    pub delta_omega: f64,
    pub c: f64,
}

impl DerivedParams {
    /// `dw / (2 |kappa|)`, the signed square root of `c`. It multiplies the
    /// sine part of the diagonal evolution elements and is smooth at
    /// resonance.
    pub fn signed_sqrt_c(&self, kappa: f64) -> f64 {
        self.delta_omega / (2.0 * kappa.abs())
    }
}

pub fn derive(params: &ModelParams) -> Result<DerivedParams> {
    if params.kappa == 0.0 {
        return Err(Error::DegenerateCoupling);
    }
    let delta_omega = params.omega - params.omega0;
    let ratio = delta_omega / (2.0 * params.kappa);
    Ok(DerivedParams { delta_omega, c: ratio * ratio })
}

/// `sin^2(sqrt(x) tau) / x` for `x >= 0`, with the `x -> 0` limit `tau^2`.
pub fn sin_sq_over(x: f64, tau: f64) -> f64 {
    let y2 = x * tau * tau;
    if x < SMALL_X && y2 < 1e-6 {
        // sin^2(y) = y^2 - y^4/3 + 2 y^6/45 - ...
        let t2 = tau * tau;
        t2 * (1.0 - y2 / 3.0 + 2.0 * y2 * y2 / 45.0)
    } else {
        let s = sin(sqrt(x) * tau);
        s * s / x
    }
}

/// `sin(sqrt(x) tau) / sqrt(x)` for `x >= 0`, with the `x -> 0` limit `tau`.
pub fn sin_over_sqrt(x: f64, tau: f64) -> f64 {
    let y2 = x * tau * tau;
    if x < SMALL_X && y2 < 1e-6 {
        tau * (1.0 - y2 / 6.0 + y2 * y2 / 120.0)
    } else {
        let r = sqrt(x);
        sin(r * tau) / r
    }
}

fn check_arg(x: f64) -> Result<()> {
    if x < 0.0 || x.is_nan() {
        Err(Error::Domain { what: "spectral argument x must be >= 0", value: x })
    } else {
        Ok(())
    }
}

/// `g1(x) = cos^2(sqrt(x)|kappa|t) + c sin^2(sqrt(x)|kappa|t) / x`.
pub fn g1(x: f64, c: f64, kappa: f64, t: f64) -> Result<f64> {
    check_arg(x)?;
    Ok(g1_unchecked(x, c, kappa.abs() * t))
}

/// `g2(x) = sin^2(sqrt(x)|kappa|t) (x - c) / x`.
pub fn g2(x: f64, c: f64, kappa: f64, t: f64) -> Result<f64> {
    check_arg(x)?;
    Ok(g2_unchecked(x, c, kappa.abs() * t))
}

#[inline]
pub(crate) fn g1_unchecked(x: f64, c: f64, tau: f64) -> f64 {
    let co = cos(sqrt(x) * tau);
    co * co + c * sin_sq_over(x, tau)
}

#[inline]
pub(crate) fn g2_unchecked(x: f64, c: f64, tau: f64) -> f64 {
    sin_sq_over(x, tau) * (x - c)
}

/// Poisson weights `exp(-alpha^2) alpha^(2n) / n!` for `n = 0..=n_max`,
/// accumulated in log space so large amplitudes do not underflow the prefactor.
pub fn poisson_weights(alpha: f64, n_max: usize) -> Vec<f64> {
    let mean = alpha * alpha;
    let mut weights = Vec::with_capacity(n_max + 1);
    if mean == 0.0 {
        weights.push(1.0);
        weights.resize(n_max + 1, 0.0);
        return weights;
    }
    let log_mean = ln(mean);
    let mut log_w = -mean;
    weights.push(exp(log_w));
    for n in 1..=n_max {
        log_w += log_mean - ln(n as f64);
        weights.push(exp(log_w));
    }
    weights
}

/// Inverse temperature together with the boson and fermion TFD angles.
///
/// `theta = atanh(exp(-beta omega / 2))` parametrises the two-mode squeeze of
/// the field; `fermion_theta = atan(exp(-beta omega0 / 2))` mixes the atomic
/// thermal vacuum. Zero temperature is `beta = +inf`, both angles zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThermalPoint {
    pub beta: f64,
    pub theta: f64,
    pub fermion_theta: f64,
}

impl ThermalPoint {
    pub fn zero() -> Self {
        ThermalPoint { beta: f64::INFINITY, theta: 0.0, fermion_theta: 0.0 }
    }

    pub fn from_beta(beta: f64, params: &ModelParams) -> Result<Self> {
        thermal_point(beta, params)
    }

    /// The thermal point whose boson angle is `theta`; `theta = 0` is zero
    /// temperature.
    pub fn from_theta(theta: f64, params: &ModelParams) -> Result<Self> {
        if theta == 0.0 {
            return Ok(Self::zero());
        }
        let beta = theta_to_beta(theta, params.omega)?;
        thermal_point(beta, params)
    }

    /// Angles set directly, detached from any temperature (`beta` is NaN).
    pub fn with_angles(theta: f64, fermion_theta: f64) -> Self {
        ThermalPoint { beta: f64::NAN, theta, fermion_theta }
    }

    pub fn cos_sq_fermion(&self) -> f64 {
        let c = cos(self.fermion_theta);
        c * c
    }

    pub fn sin_sq_fermion(&self) -> f64 {
        let s = sin(self.fermion_theta);
        s * s
    }
}

pub fn thermal_point(beta: f64, params: &ModelParams) -> Result<ThermalPoint> {
    if !(beta > 0.0) {
        return Err(Error::Domain { what: "beta must be > 0", value: beta });
    }
    let theta = atanh(exp(-beta * params.omega / 2.0));
    let fermion_theta = atan(exp(-beta * params.omega0 / 2.0));
    if !theta.is_finite() {
        return Err(Error::Domain { what: "beta too small: theta diverges", value: beta });
    }
    Ok(ThermalPoint { beta, theta, fermion_theta })
}

/// Inverse of `theta(beta)` for a mode of frequency `omega`.
pub fn theta_to_beta(theta: f64, omega: f64) -> Result<f64> {
    if !(theta > 0.0) || !theta.is_finite() {
        return Err(Error::Domain { what: "theta must be > 0", value: theta });
    }
    if !(omega > 0.0) {
        return Err(Error::Domain { what: "omega must be positive", value: omega });
    }
    Ok(-2.0 / omega * ln(tanh(theta)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;
    use proptest::prelude::*;

    /// Term-by-term Maclaurin sums; independent of libm's trig kernels.
    fn taylor_cos(y: f64) -> f64 {
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..60 {
            term *= -y * y / ((2 * k - 1) as f64 * (2 * k) as f64);
            sum += term;
        }
        sum
    }

    fn taylor_sin(y: f64) -> f64 {
        let mut term = y;
        let mut sum = y;
        for k in 1..60 {
            term *= -y * y / ((2 * k) as f64 * (2 * k + 1) as f64);
            sum += term;
        }
        sum
    }

    #[test]
    fn derive_examples() {
        let d = derive(&ModelParams::new(2.0, 4.0, 1.0, 4.0).unwrap()).unwrap();
        assert_eq!((d.delta_omega, d.c), (2.0, 1.0));
        let d = derive(&ModelParams::new(1.0, 1.0, 1.0, 4.0).unwrap()).unwrap();
        assert_eq!((d.delta_omega, d.c), (0.0, 0.0));
        let d = derive(&ModelParams::new(2.0, 6.0, 2.0, 4.0).unwrap()).unwrap();
        assert_eq!((d.delta_omega, d.c), (4.0, 1.0));
        let err = derive(&ModelParams::new(2.0, 6.0, 0.0, 4.0).unwrap()).unwrap_err();
        assert_eq!(err, Error::DegenerateCoupling);
    }

    #[test]
    fn params_reject_nonpositive_frequencies() {
        assert!(ModelParams::new(0.0, 1.0, 1.0, 1.0).is_err());
        assert!(ModelParams::new(1.0, -1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn g1_examples() {
        let v = g1(1.0, 1.0, 1.0, PI / 2.0).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
        for &(x, c) in &[(0.0, 0.0), (0.5, 2.0), (7.0, 1.0)] {
            assert_eq!(g1(x, c, 1.3, 0.0).unwrap(), 1.0);
        }
        // frozen from a 30-digit evaluation; re-checked against Maclaurin sums
        let v = g1(2.0, 1.0, 1.0, 1.3).unwrap();
        assert!((v - 0.534979075003214393779).abs() < 1e-14);
        let y = 2f64.sqrt() * 1.3;
        let oracle = taylor_cos(y).powi(2) + taylor_sin(y).powi(2) / 2.0;
        assert!((v - oracle).abs() < 1e-14);
    }

    #[test]
    fn g2_examples() {
        assert_eq!(g2(3.0, 1.0, 1.0, 0.0).unwrap(), 0.0);
        for &t in &[0.1, 1.0, 17.0] {
            assert_eq!(g2(1.5, 1.5, 1.0, t).unwrap(), 0.0);
        }
        let v = g2(2.0, 1.0, 1.0, 0.7).unwrap();
        assert!((v - 0.349446549723931649729).abs() < 1e-14);
        let y = 2f64.sqrt() * 0.7;
        let oracle = taylor_sin(y).powi(2) / 2.0 * (2.0 - 1.0);
        assert!((v - oracle).abs() < 1e-14);
    }

    #[test]
    fn g_negative_argument_is_domain_error() {
        assert!(matches!(g1(-0.1, 0.0, 1.0, 1.0), Err(Error::Domain { .. })));
        assert!(matches!(g2(-1e-9, 0.0, 1.0, 1.0), Err(Error::Domain { .. })));
    }

    #[test]
    fn g_limits_at_zero() {
        let (c, k, t) = (0.7, 1.2, 0.9);
        let tau = k * t;
        assert!((g1(0.0, c, k, t).unwrap() - (1.0 + c * tau * tau)).abs() < 1e-15);
        assert!((g2(0.0, c, k, t).unwrap() + c * tau * tau).abs() < 1e-15);
        // finite differences from the right agree with the limit to O(h)
        for &h in &[1e-4, 1e-5, 1e-6] {
            let d1 = (g1(h, c, k, t).unwrap() - g1(0.0, c, k, t).unwrap()).abs();
            let d2 = (g2(h, c, k, t).unwrap() - g2(0.0, c, k, t).unwrap()).abs();
            assert!(d1 < 10.0 * h && d2 < 10.0 * h, "h={h}: {d1} {d2}");
        }
    }

    #[test]
    fn small_x_branch_is_continuous() {
        for &tau in &[0.1, 1.0, 5.0] {
            let below = sin_sq_over(0.99e-8, tau);
            let above = sin_sq_over(1.01e-8, tau);
            // the true step across the switch is about slope * 2e-10
            assert!((below - above).abs() < tau.powi(4) * 2e-10 + 1e-14 * tau * tau);
            let below = sin_over_sqrt(0.99e-8, tau);
            let above = sin_over_sqrt(1.01e-8, tau);
            assert!((below - above).abs() < tau.powi(3) * 2e-10 + 1e-14 * tau);
        }
    }

    #[test]
    fn thermal_point_figure_regime() {
        let params = ModelParams::new(2.0, 4.0, 1.0, 4.0).unwrap();
        for &(theta, expected) in &[
            (PI / 32.0, 0.303182511714994245761),
            (PI / 60.0, 0.224850784696142300654),
        ] {
            let tp = ThermalPoint::from_theta(theta, &params).unwrap();
            assert!((tp.theta - theta).abs() < 1e-13);
            assert!((tp.fermion_theta - atan(sqrt(tanh(theta)))).abs() < 1e-14);
            assert!((tp.fermion_theta - expected).abs() < 1e-13);
        }
    }

    #[test]
    fn thermal_point_limits_and_errors() {
        let params = ModelParams::new(2.0, 4.0, 1.0, 4.0).unwrap();
        let tp = thermal_point(1e6, &params).unwrap();
        assert_eq!((tp.theta, tp.fermion_theta), (0.0, 0.0));
        assert!(thermal_point(0.0, &params).is_err());
        assert!(thermal_point(-1.0, &params).is_err());
        assert!(theta_to_beta(0.0, 4.0).is_err());
        assert_eq!(ThermalPoint::from_theta(0.0, &params).unwrap(), ThermalPoint::zero());
    }

    #[test]
    fn thermal_parameter_identities() {
        let params = ModelParams::new(1.3, 2.1, 1.0, 1.0).unwrap();
        for &beta in &[0.05, 0.3, 1.0, 4.0] {
            let tp = thermal_point(beta, &params).unwrap();
            let ch = (1.0 - exp(-beta * params.omega)).powf(-0.5);
            let sh = (exp(beta * params.omega) - 1.0).powf(-0.5);
            assert!((libm::cosh(tp.theta) - ch).abs() < 1e-12 * ch);
            assert!((ch * ch - sh * sh - 1.0).abs() < 1e-12 * ch * ch);
            let cf = (1.0 + exp(-beta * params.omega0)).powf(-0.5);
            assert!((cos(tp.fermion_theta) - cf).abs() < 1e-14);
        }
    }

    #[test]
    fn poisson_weights_sum_to_one() {
        for &alpha in &[0.0, 0.5, 2.0, 4.0, 8.0] {
            let w = poisson_weights(alpha, 400);
            let s: f64 = w.iter().sum();
            assert!((s - 1.0).abs() < 1e-13, "alpha={alpha}: {s}");
        }
        let w = poisson_weights(0.0, 3);
        assert_eq!(w, [1.0, 0.0, 0.0, 0.0]);
    }

    proptest! {
        #[test]
        fn g_bounds(x in 1e-3f64..50.0, c in 0.0f64..5.0, t in 0.0f64..30.0) {
            let a = g1(x, c, 1.0, t).unwrap();
            prop_assert!(a >= -1e-15 && a <= 1.0 + c / x + 1e-12);
            let s = sin_sq_over(x, t);
            prop_assert!(s <= (1.0 / x).min(t * t) + 1e-12);
            let b = g2(x, c, 1.0, t).unwrap();
            prop_assert!(b >= -c * s - 1e-12 && b <= x * s + 1e-12);
            if x - c >= 1.0 {
                prop_assert!(b >= 0.0);
            }
        }

        #[test]
        fn theta_beta_round_trip(theta in 1e-6f64..3.0, omega in 0.1f64..10.0) {
            let params = ModelParams::new(1.0, omega, 1.0, 1.0).unwrap();
            let beta = theta_to_beta(theta, omega).unwrap();
            let tp = thermal_point(beta, &params).unwrap();
            prop_assert!((tp.theta - theta).abs() <= 1e-12 * theta);
        }

        #[test]
        fn fermion_boson_relation_at_double_frequency(beta in 0.01f64..20.0, omega0 in 0.1f64..5.0) {
            let params = ModelParams::new(omega0, 2.0 * omega0, 1.0, 1.0).unwrap();
            let tp = thermal_point(beta, &params).unwrap();
            let t = libm::tan(tp.fermion_theta);
            prop_assert!((t * t - tanh(tp.theta)).abs() < 1e-13);
        }
    }
}
