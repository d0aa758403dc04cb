//! Thermal coherent states and the exact ground-state probability.

use alloc::vec;
use alloc::vec::Vec;

use super::fock::{C64, ZERO};
use super::OracleConfig;
use crate::error::{Error, Result};
use crate::math::{cos, sin, sinh, sqrt, tanh};
use crate::model::{
    g1_unchecked, g2_unchecked, poisson_weights, sin_over_sqrt, DerivedParams, ModelParams, ThermalPoint,
};
use crate::zero_temp::truncation_residue;

/// Largest tolerated Poisson mass beyond the cutoff.
pub const COHERENT_RESIDUE_MAX: f64 = 1e-10;
/// Extra levels used by the truncation-independence certificate.
pub const CERTIFICATE_EXTRA_DIM: usize = 16;
/// Allowed change of the photon distribution under the certificate.
pub const CERTIFICATE_TOL: f64 = 1e-10;

/// Truncated coherent state `|alpha>` on `dim` levels, renormalised.
pub fn coherent_vector(alpha: f64, dim: usize) -> Result<Vec<f64>> {
    if dim == 0 {
        return Err(Error::Domain { what: "dim must be >= 1", value: 0.0 });
    }
    let residue = truncation_residue(alpha, dim - 1);
    if residue > COHERENT_RESIDUE_MAX {
        return Err(Error::IncreaseDim { dim, residue });
    }
    let w = poisson_weights(alpha, dim - 1);
    let mut v: Vec<f64> = w
        .iter()
        .enumerate()
        .map(|(n, &p)| {
            let s = if alpha < 0.0 && n % 2 == 1 { -1.0 } else { 1.0 };
            s * sqrt(p)
        })
        .collect();
    let norm = sqrt(v.iter().map(|x| x * x).sum());
    v.iter_mut().for_each(|x| *x /= norm);
    Ok(v)
}

/// Product state `|u>|v>` stored as `psi[n * dim + m]`.
pub fn product_state(u: &[f64], v: &[f64]) -> Result<Vec<f64>> {
    if u.len() != v.len() {
        return Err(Error::Shape("mode vectors differ in length"));
    }
    Ok(u.iter().flat_map(|&x| v.iter().map(move |&y| x * y)).collect())
}

fn two_mode_dim(state: &[f64]) -> Result<usize> {
    let dim = sqrt(state.len() as f64) as usize;
    if dim * dim != state.len() || dim == 0 {
        return Err(Error::Shape("two-mode state length is not a square"));
    }
    Ok(dim)
}

/// `theta (mu - nu) psi` with `mu = a^dagger a~^dagger`, `nu = a a~`.
fn apply_generator(theta: f64, psi: &[f64], out: &mut [f64], dim: usize, roots: &[f64]) {
    for n in 0..dim {
        for m in 0..dim {
            let mut acc = 0.0;
            if n > 0 && m > 0 {
                acc += roots[n] * roots[m] * psi[(n - 1) * dim + m - 1];
            }
            if n + 1 < dim && m + 1 < dim {
                acc -= roots[n + 1] * roots[m + 1] * psi[(n + 1) * dim + m + 1];
            }
            out[n * dim + m] = theta * acc;
        }
    }
}

fn norm2(v: &[f64]) -> f64 {
    sqrt(v.iter().map(|x| x * x).sum())
}

/// `exp[-theta(a a~ - a~^dagger a^dagger)] psi` by a substepped Taylor series.
pub fn two_mode_squeeze_apply(theta: f64, state: &[f64], config: &OracleConfig) -> Result<Vec<f64>> {
    if !(theta >= 0.0) || !theta.is_finite() {
        return Err(Error::Domain { what: "theta must be finite and >= 0", value: theta });
    }
    let dim = two_mode_dim(state)?;
    if theta == 0.0 {
        return Ok(state.to_vec());
    }
    let roots: Vec<f64> = (0..=dim).map(|k| sqrt(k as f64)).collect();
    let steps = libm::ceil(theta * 2.0 * (dim - 1) as f64).max(1.0) as usize;
    let h = theta / steps as f64;
    let mut psi = state.to_vec();
    let mut term = vec![0.0; psi.len()];
    let mut next = vec![0.0; psi.len()];
    for _ in 0..steps {
        term.copy_from_slice(&psi);
        let scale = norm2(&psi);
        let mut k = 1;
        loop {
            apply_generator(h, &term, &mut next, dim, &roots);
            let inv = 1.0 / k as f64;
            for (t, x) in term.iter_mut().zip(&next) {
                *t = x * inv;
            }
            for (p, t) in psi.iter_mut().zip(&term) {
                *p += t;
            }
            if norm2(&term) <= config.taylor_tol * scale || k > 200 {
                break;
            }
            k += 1;
        }
    }
    let top = dim - 1;
    let leak: f64 = (0..dim)
        .map(|j| psi[top * dim + j] * psi[top * dim + j] + if j != top { psi[j * dim + top] * psi[j * dim + top] } else { 0.0 })
        .sum();
    if leak > config.taylor_tol {
        return Err(Error::IncreaseDim { dim, residue: leak });
    }
    Ok(psi)
}

/// `U_B(theta)|alpha>|alpha~>` reduced to what the probability needs: the
/// photon distribution of the physical mode.
#[derive(Clone, Debug, PartialEq)]
pub struct ThermalCoherentState {
    pub dim: usize,
    pub amplitudes: Vec<f64>,
    /// `p(n) = sum_m |Phi(n, m)|^2`.
    pub marginal: Vec<f64>,
}

impl ThermalCoherentState {
    pub fn prepare(alpha: f64, theta: f64, config: &OracleConfig) -> Result<Self> {
        config.validate()?;
        let dim = config.dim;
        let v = coherent_vector(alpha, dim)?;
        let amplitudes = two_mode_squeeze_apply(theta, &product_state(&v, &v)?, config)?;
        let marginal = (0..dim)
            .map(|n| amplitudes[n * dim..(n + 1) * dim].iter().map(|x| x * x).sum())
            .collect();
        Ok(ThermalCoherentState { dim, amplitudes, marginal })
    }

    /// Prepares the state and checks that `CERTIFICATE_EXTRA_DIM` more levels
    /// leave the photon distribution unchanged.
    pub fn prepare_certified(alpha: f64, theta: f64, config: &OracleConfig) -> Result<Self> {
        let state = Self::prepare(alpha, theta, config)?;
        let bigger = Self::prepare(alpha, theta, &config.with_dim(config.dim + CERTIFICATE_EXTRA_DIM))?;
        let diff: f64 = (0..bigger.dim)
            .map(|n| (bigger.marginal[n] - state.marginal.get(n).copied().unwrap_or(0.0)).abs())
            .sum();
        if diff > CERTIFICATE_TOL {
            return Err(Error::IncreaseDim { dim: config.dim, residue: diff });
        }
        Ok(state)
    }

    pub fn norm_sq(&self) -> f64 {
        self.marginal.iter().sum()
    }

    pub fn mean_photons(&self) -> f64 {
        self.marginal.iter().enumerate().map(|(n, p)| n as f64 * p).sum()
    }

    /// `cos^2 Theta <G1> + sin^2 Theta <G2>` at time `t`.
    pub fn pg(&self, params: &ModelParams, derived: &DerivedParams, thermal: &ThermalPoint, t: f64) -> f64 {
        let tau = params.kappa.abs() * t;
        let c = derived.c;
        let (mut e1, mut e2) = (0.0, 0.0);
        for (n, p) in self.marginal.iter().enumerate() {
            let x = n as f64 + c;
            e1 += p * g1_unchecked(x, c, tau);
            e2 += p * g2_unchecked(x + 1.0, c, tau);
        }
        thermal.cos_sq_fermion() * e1 + thermal.sin_sq_fermion() * e2
    }
}

/// Exact ground-state probability without any expansion in `theta`.
pub fn exact_pg(
    params: &ModelParams,
    derived: &DerivedParams,
    thermal: &ThermalPoint,
    t: f64,
    config: &OracleConfig,
) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::Domain { what: "time must be >= 0", value: t });
    }
    let state = ThermalCoherentState::prepare_certified(params.alpha, thermal.theta, config)?;
    Ok(state.pg(params, derived, thermal, t))
}

pub fn mean_photon_number(alpha: f64, theta: f64, config: &OracleConfig) -> Result<f64> {
    Ok(ThermalCoherentState::prepare(alpha, theta, config)?.mean_photons())
}

/// Single-mode operator `(O psi)(n) = coef[n] psi(n - shift)`.
#[derive(Clone, Debug)]
pub(crate) struct ModeOp {
    pub shift: isize,
    pub coef: Vec<C64>,
}

impl ModeOp {
    pub fn conj(&self) -> ModeOp {
        ModeOp { shift: self.shift, coef: self.coef.iter().map(|z| z.conj()).collect() }
    }

    /// Applies to mode `which` (0 or 1) of a two-mode vector.
    pub fn apply(&self, which: usize, psi: &[C64], dim: usize) -> Vec<C64> {
        let mut out = vec![ZERO; psi.len()];
        for n in 0..dim {
            for m in 0..dim {
                let (k, other) = if which == 0 { (n, m) } else { (m, n) };
                let src = k as isize - self.shift;
                if src < 0 || src >= dim as isize {
                    continue;
                }
                let src = src as usize;
                let idx = if which == 0 { src * dim + other } else { other * dim + src };
                out[n * dim + m] = self.coef[k] * psi[idx];
            }
        }
        out
    }
}

/// The four elements `u_ij` of the interaction-picture evolution, as
/// `[u11, u10, u01, u00]`.
pub(crate) fn evolution_elements(params: &ModelParams, derived: &DerivedParams, t: f64, dim: usize) -> [ModeOp; 4] {
    let tau = params.kappa.abs() * t;
    let c = derived.c;
    let s = derived.signed_sqrt_c(params.kappa);
    let sgn = if params.kappa < 0.0 { -1.0 } else { 1.0 };
    let i = C64::new(0.0, 1.0);
    let diag = |x: f64, sign: f64| C64::new(cos(sqrt(x) * tau), 0.0) + i * (sign * s * sin_over_sqrt(x, tau));
    let u11 = (0..dim).map(|n| diag(n as f64 + c + 1.0, 1.0)).collect();
    let u00 = (0..dim).map(|n| diag(n as f64 + c, -1.0)).collect();
    let u10 = (0..dim)
        .map(|n| -i * sgn * sin_over_sqrt(n as f64 + c + 1.0, tau) * sqrt((n + 1) as f64))
        .collect();
    let u01 = (0..dim)
        .map(|n| -i * sgn * sin_over_sqrt(n as f64 + c, tau) * sqrt(n as f64))
        .collect();
    [
        ModeOp { shift: 0, coef: u11 },
        ModeOp { shift: -1, coef: u10 },
        ModeOp { shift: 1, coef: u01 },
        ModeOp { shift: 0, coef: u00 },
    ]
}

/// Ground-state probability from the explicit four-component state, keeping
/// the tilde atom instead of eliminating it through unitarity of `U~`.
/// Returns `(P_g, total norm)`.
pub fn four_component_pg(
    params: &ModelParams,
    derived: &DerivedParams,
    thermal: &ThermalPoint,
    t: f64,
    config: &OracleConfig,
) -> Result<(f64, f64)> {
    let state = ThermalCoherentState::prepare(params.alpha, thermal.theta, config)?;
    let dim = state.dim;
    let phi: Vec<C64> = state.amplitudes.iter().map(|&x| C64::new(x, 0.0)).collect();
    let [u11, u10, u01, u00] = evolution_elements(params, derived, t, dim);
    let [v11, v10, v01, v00] = [u11.conj(), u10.conj(), u01.conj(), u00.conj()];
    let (s, c) = (sin(thermal.fermion_theta), cos(thermal.fermion_theta));
    // (s u_{i1} u~_{j1} + c u_{i0} u~_{j0}) Phi, tilde operators on mode 1
    let component = |ua: &ModeOp, va: &ModeOp, ub: &ModeOp, vb: &ModeOp| -> Vec<C64> {
        let x = ua.apply(0, &va.apply(1, &phi, dim), dim);
        let y = ub.apply(0, &vb.apply(1, &phi, dim), dim);
        x.iter().zip(&y).map(|(p, q)| p * s + q * c).collect()
    };
    let norm = |v: &[C64]| -> f64 { v.iter().map(|z| z.norm_sqr()).sum() };
    let psi_11 = component(&u11, &v11, &u10, &v10);
    let psi_10 = component(&u11, &v01, &u10, &v00);
    let psi_01 = component(&u01, &v11, &u00, &v10);
    let psi_00 = component(&u01, &v01, &u00, &v00);
    let pg = norm(&psi_00) + norm(&psi_01);
    Ok((pg, pg + norm(&psi_11) + norm(&psi_10)))
}

/// Which thermal vacuum to reduce.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ThermalTarget {
    /// Two-mode squeezed vacuum with boson angle `theta`.
    Boson { theta: f64 },
    /// `cos Theta |0,0~> + sin Theta |1,1~>`.
    Fermion { fermion_theta: f64 },
}

/// Builds the thermal vacuum, traces out the tilde register and returns the
/// largest deviation from the canonical ensemble.
pub fn reduced_thermal_density_checks(target: ThermalTarget, config: &OracleConfig) -> Result<f64> {
    match target {
        ThermalTarget::Boson { theta } => {
            config.validate()?;
            let dim = config.dim;
            let mut vac = vec![0.0; dim * dim];
            vac[0] = 1.0;
            let psi = two_mode_squeeze_apply(theta, &vac, config)?;
            // exp(-beta omega) = tanh^2 theta
            let x = tanh(theta) * tanh(theta);
            let mut worst: f64 = 0.0;
            let mut geometric = 1.0 - x;
            for n in 0..dim {
                for k in 0..dim {
                    let rho: f64 = (0..dim).map(|m| psi[n * dim + m] * psi[k * dim + m]).sum();
                    let want = if n == k { geometric } else { 0.0 };
                    worst = worst.max((rho - want).abs());
                }
                geometric *= x;
            }
            Ok(worst)
        }
        ThermalTarget::Fermion { fermion_theta } => {
            use super::fock::{Basis, FockMatrix, Register};
            let regs = [Register::Fermion, Register::Fermion];
            let up = |k| FockMatrix::raising(&regs, Basis::Physical, k);
            let mut vac = vec![ZERO; 4];
            vac[0] = C64::new(1.0, 0.0);
            // c^dagger c~^dagger |0,0~>
            let pair = up(0)?.apply(&up(1)?.apply(&vac)?)?;
            let psi: Vec<C64> = vac
                .iter()
                .zip(&pair)
                .map(|(v, p)| v * cos(fermion_theta) + p * sin(fermion_theta))
                .collect();
            let want = [cos(fermion_theta) * cos(fermion_theta), sin(fermion_theta) * sin(fermion_theta)];
            let mut worst: f64 = 0.0;
            for i in 0..2 {
                for k in 0..2 {
                    let rho: C64 = (0..2).map(|j| psi[i * 2 + j] * psi[k * 2 + j].conj()).sum();
                    let w = if i == k { want[i] } else { 0.0 };
                    worst = worst.max((rho - w).norm());
                }
            }
            Ok(worst)
        }
    }
}

/// `alpha^2 e^{2 theta} + sinh^2 theta`, the displaced-thermal closed form;
/// only ever used as a cross-check.
pub fn mean_photon_closed_form(alpha: f64, theta: f64) -> f64 {
    alpha * alpha * libm::exp(2.0 * theta) + sinh(theta) * sinh(theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::derive;
    use crate::zero_temp::pg_zero;
    use core::f64::consts::PI;

    fn cfg() -> OracleConfig {
        OracleConfig::default()
    }

    #[test]
    fn coherent_examples() {
        let v = coherent_vector(0.0, 10).unwrap();
        assert_eq!(v[0], 1.0);
        assert!(v[1..].iter().all(|&x| x == 0.0));
        let v = coherent_vector(2.0, 48).unwrap();
        let mut fact = 1.0;
        for (n, &amp) in v.iter().enumerate() {
            if n > 0 {
                fact *= n as f64;
            }
            let want = libm::exp(-2.0) * libm::pow(2.0, n as f64) / sqrt(fact);
            assert!((amp - want).abs() < 1e-14, "{n}");
        }
        let mean: f64 = v.iter().enumerate().map(|(n, a)| n as f64 * a * a).sum();
        assert!((mean - 4.0).abs() < 1e-10);
        assert!(matches!(coherent_vector(4.0, 20), Err(Error::IncreaseDim { .. })));
    }

    #[test]
    fn squeeze_identity_at_zero() {
        let v = coherent_vector(1.0, 16).unwrap();
        let psi = product_state(&v, &v).unwrap();
        assert_eq!(two_mode_squeeze_apply(0.0, &psi, &cfg()).unwrap(), psi);
    }

    #[test]
    fn squeezed_vacuum_amplitudes() {
        let dim = 40;
        let mut vac = vec![0.0; dim * dim];
        vac[0] = 1.0;
        let theta = 0.4;
        let psi = two_mode_squeeze_apply(theta, &vac, &cfg().with_dim(dim)).unwrap();
        let (t, ch) = (tanh(theta), libm::cosh(theta));
        for n in 0..dim {
            for m in 0..dim {
                let want = if n == m { libm::pow(t, n as f64) / ch } else { 0.0 };
                assert!((psi[n * dim + m] - want).abs() < 1e-13, "{n} {m}");
            }
        }
    }

    #[test]
    fn squeeze_preserves_norm() {
        let v = coherent_vector(2.0, 48).unwrap();
        for &theta in &[0.05, 0.2, 0.3] {
            let psi = two_mode_squeeze_apply(theta, &product_state(&v, &v).unwrap(), &cfg()).unwrap();
            assert!((norm2(&psi) - 1.0).abs() < 1e-10, "{theta}");
        }
    }

    #[test]
    fn squeeze_leakage_guard() {
        let v = coherent_vector(1.0, 14).unwrap();
        let psi = product_state(&v, &v).unwrap();
        let err = two_mode_squeeze_apply(1.5, &psi, &cfg().with_dim(14)).unwrap_err();
        assert!(matches!(err, Error::IncreaseDim { .. }));
    }

    #[test]
    fn mean_photons_of_thermal_coherent_state() {
        let got = mean_photon_number(2.0, 0.3, &cfg()).unwrap();
        assert!((got - mean_photon_closed_form(2.0, 0.3)).abs() < 1e-8, "{got}");
    }

    #[test]
    fn exact_pg_limits() {
        let p = ModelParams::new(2.0, 4.0, 1.0, 2.0).unwrap();
        let d = derive(&p).unwrap();
        let zero = ThermalPoint::zero();
        for &t in &[0.0, 1.0, 5.0, 20.0] {
            let e = exact_pg(&p, &d, &zero, t, &cfg()).unwrap();
            assert!((e - pg_zero(&p, &d, t, 100).unwrap()).abs() < 1e-10);
        }
        let tp = ThermalPoint::from_theta(PI / 32.0, &p).unwrap();
        let e = exact_pg(&p, &d, &tp, 0.0, &cfg()).unwrap();
        assert!((e - tp.cos_sq_fermion()).abs() < 1e-12);
    }

    #[test]
    fn four_component_form_matches_reduced_form() {
        for &(w0, w, k, alpha) in &[(2.0, 4.0, 1.0, 2.0), (1.0, 1.0, -0.7, 1.5), (3.0, 2.0, 0.5, 1.0)] {
            let p = ModelParams::new(w0, w, k, alpha).unwrap();
            let d = derive(&p).unwrap();
            let tp = ThermalPoint::with_angles(0.2, 0.5);
            let state = ThermalCoherentState::prepare(alpha, 0.2, &cfg()).unwrap();
            for &t in &[0.0, 0.8, 3.0, 7.5] {
                let (pg4, norm) = four_component_pg(&p, &d, &tp, t, &cfg()).unwrap();
                let reduced = state.pg(&p, &d, &tp, t);
                assert!((pg4 - reduced).abs() < 1e-12, "{t}: {pg4} vs {reduced}");
                assert!((norm - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn reduced_density_checks() {
        let c = cfg();
        assert_eq!(reduced_thermal_density_checks(ThermalTarget::Boson { theta: 0.0 }, &c).unwrap(), 0.0);
        let dev = reduced_thermal_density_checks(ThermalTarget::Boson { theta: 0.3 }, &c).unwrap();
        assert!(dev < 1e-10, "{dev}");
        for &th in &[0.0, 0.3, PI / 4.0 - 1e-3] {
            let dev = reduced_thermal_density_checks(ThermalTarget::Fermion { fermion_theta: th }, &c).unwrap();
            assert!(dev < 1e-15, "{dev}");
        }
    }

    #[test]
    fn certificate_trips_on_tight_cutoff() {
        // residue fine at dim 24 for alpha = 2 but the squeeze broadens the state
        let r = ThermalCoherentState::prepare_certified(2.0, 0.9, &cfg().with_dim(24));
        assert!(matches!(r, Err(Error::IncreaseDim { .. })));
    }
}
