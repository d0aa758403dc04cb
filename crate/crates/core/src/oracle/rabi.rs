//! Short-time behaviour with the counter-rotating terms kept.
//!
//! `H = omega0/2 sigma_z + omega a^dagger a + kappa sigma_x (a + a^dagger)` is
//! propagated from `|e>|alpha e^{i phi}>` and the curvature of `<sigma_z>` at
//! `t = 0` is fitted.

use alloc::vec::Vec;

use super::fock::{Basis, FockMatrix, Register, C64, ZERO};
use super::state::coherent_vector;
use crate::error::{Error, Result};
use crate::math::{cos, sin, sqrt};
use crate::model::ModelParams;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RabiFitConfig {
    /// Fit window `[0, window]`.
    pub window: f64,
    /// Samples in the window, endpoints included.
    pub points: usize,
    /// Boson levels.
    pub dim: usize,
    /// Largest accepted RMS residual of the polynomial fit.
    pub tolerance: f64,
}

impl Default for RabiFitConfig {
    fn default() -> Self {
        RabiFitConfig { window: 0.05, points: 41, dim: 48, tolerance: 1e-5 }
    }
}

/// `<sigma_z>(t) - 1 ~ q t^2 + r t^3 + s t^4` on the window.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RabiFit {
    pub q: f64,
    pub r: f64,
    pub s: f64,
    pub residual: f64,
}

fn hamiltonian(params: &ModelParams, dim: usize) -> Result<FockMatrix> {
    let regs = [Register::Fermion, Register::Boson { dim }];
    let b = Basis::Physical;
    let sz = FockMatrix::diagonal(&regs, b, |occ| C64::new(if occ[0] == 1 { 1.0 } else { -1.0 }, 0.0));
    let n = FockMatrix::number(&regs, b, 1);
    let sm = FockMatrix::lowering(&regs, b, 0)?;
    let sx = &sm + &sm.adjoint();
    let a = FockMatrix::lowering(&regs, b, 1)?;
    let x = &a + &a.adjoint();
    let h = &sz.scale_re(params.omega0 / 2.0) + &n.scale_re(params.omega);
    Ok(&h + &(&sx * &x).scale_re(params.kappa))
}

/// `exp(-i H dt) psi` by a Taylor series.
fn step(h: &FockMatrix, psi: &[C64], dt: f64) -> Result<Vec<C64>> {
    let mut out = psi.to_vec();
    let mut term = psi.to_vec();
    for k in 1..100 {
        let hv = h.apply(&term)?;
        let f = C64::new(0.0, -dt / k as f64);
        term = hv.into_iter().map(|z| z * f).collect();
        let mut big: f64 = 0.0;
        for (o, t) in out.iter_mut().zip(&term) {
            *o += t;
            big = big.max(t.norm());
        }
        if big < 1e-17 {
            break;
        }
    }
    Ok(out)
}

/// Solves the 3x3 normal equations by Gaussian elimination with pivoting.
fn solve3(mut m: [[f64; 4]; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[piv][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, piv);
        for row in 0..3 {
            if row != col {
                let f = m[row][col] / m[col][col];
                for k in col..4 {
                    m[row][k] -= f * m[col][k];
                }
            }
        }
    }
    Some([m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2]])
}

/// Fits the short-time curvature of `<sigma_z>` for the initial state
/// `|e>|alpha e^{i phi}>`, with `alpha = params.alpha`.
pub fn rabi_short_time_coefficient(params: &ModelParams, phi: f64, config: &RabiFitConfig) -> Result<RabiFit> {
    params.validate()?;
    if config.points < 5 || !(config.window > 0.0) {
        return Err(Error::Domain { what: "fit needs >= 5 points on a positive window", value: config.points as f64 });
    }
    let dim = config.dim;
    let amp = coherent_vector(params.alpha, dim)?;
    // fermion register is most significant: excited block starts at dim
    let mut psi = alloc::vec![ZERO; 2 * dim];
    for (n, &c) in amp.iter().enumerate() {
        let ph = n as f64 * phi;
        psi[dim + n] = C64::new(c * cos(ph), c * sin(ph));
    }
    let h = hamiltonian(params, dim)?;
    let dt = config.window / (config.points - 1) as f64;
    let sigma_z = |psi: &[C64]| -> f64 {
        let up: f64 = psi[dim..].iter().map(|z| z.norm_sqr()).sum();
        let down: f64 = psi[..dim].iter().map(|z| z.norm_sqr()).sum();
        up - down
    };
    let mut samples = Vec::with_capacity(config.points);
    samples.push((0.0, sigma_z(&psi) - 1.0));
    for k in 1..config.points {
        psi = step(&h, &psi, dt)?;
        let top = psi[dim - 1].norm_sqr() + psi[2 * dim - 1].norm_sqr();
        if top > 1e-20 {
            return Err(Error::IncreaseDim { dim, residue: top });
        }
        samples.push((k as f64 * dt, sigma_z(&psi) - 1.0));
    }
    // scale time to the window so the normal equations stay well conditioned
    let mut m = [[0.0; 4]; 3];
    for &(t, y) in &samples {
        let u = t / config.window;
        let basis = [u * u, u * u * u, u * u * u * u];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += basis[i] * basis[j];
            }
            m[i][3] += basis[i] * y;
        }
    }
    let coef = solve3(m).ok_or(Error::Shape("singular fit"))?;
    let mut ss = 0.0;
    for &(t, y) in &samples {
        let u = t / config.window;
        let fit = coef[0] * u * u + coef[1] * u * u * u + coef[2] * u * u * u * u;
        ss += (y - fit) * (y - fit);
    }
    let residual = sqrt(ss / samples.len() as f64);
    if residual > config.tolerance {
        return Err(Error::FitResidual { residual, tolerance: config.tolerance });
    }
    let w = config.window;
    Ok(RabiFit { q: coef[0] / (w * w), r: coef[1] / (w * w * w), s: coef[2] / (w * w * w * w), residual })
}
