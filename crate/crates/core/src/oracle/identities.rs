//! Operator identities used by the low-temperature expansion, each checked
//! as a matrix equation.
//!
//! Notation: `A = mu - nu`, `C = mu + nu`, `mu = a^dagger a~^dagger`,
//! `nu = a a~`, `B = a^dagger a + c`, `D = a^dagger a + a~^dagger a~ + 1`.
//! The polynomial identities are evaluated in the scaled basis where every
//! matrix element is an integer, so with integer `c` both sides are exact and
//! any deviation is a real discrepancy rather than roundoff.

use alloc::vec::Vec;

use super::fock::{Basis, FockMatrix, Register, C64};
use super::state::evolution_elements;
use super::OracleConfig;
use crate::error::{Error, Result};
use crate::model::{derive, ModelParams};

/// Catalog entries. Variants marked "power" use the `n` passed to
/// [`verify_identity`]; the others ignore it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Identity {
    /// `[a, a^dagger] = 1`.
    CanonicalCommutator,
    /// `[A, B] = -C`.
    CommAB,
    /// Written-out `[A, B^n]` for `n = 1..=4` (power).
    CommABnExplicit,
    /// `[A, B^n] = (B-1)^n mu - (B+1)^n nu - B^n A` (power).
    CommABn,
    /// `mu B^n = (B-1)^n mu` (power).
    MuShift,
    /// `nu B^n = (B+1)^n nu` (power).
    NuShift,
    /// `[A, mu] = -D`.
    CommAMu,
    /// `[A, nu] = -D`.
    CommANu,
    /// `[mu, nu] = -D`.
    CommMuNu,
    /// `[A, C] = -2D`.
    CommAC,
    /// `[A, D] = -2C`.
    CommAD,
    /// `(B-1)^n [A,mu] - (B+1)^n [A,nu] = -((B-1)^n - (B+1)^n) D` (power).
    SnClosedForm,
    /// `[A, [A, B^n]] = R_n + S_n` (power).
    DoubleCommutator,
    /// `R_n` as a binomial sum of `[A, B^k] X` terms (power).
    RnBinomial,
    /// `[A, R_n]` as a binomial sum (power).
    CommARn,
    /// `[A, S_n]` as a sum over odd binomial terms (power).
    CommASn,
    /// Second-order normal-ordering rules, `1..=4` (power).
    SecondOrder(u8),
    /// Third-order normal-ordering rules, `1..=11` (power).
    Arrangement(u8),
    /// `nu D = (D + 2) nu`.
    NuD,
    /// Column orthonormality of the tilde evolution matrix.
    TildeUnitarity,
    /// Closed-form `u_ij` against a series exponential of the 2x2 generator.
    EvolutionMatrix,
}

impl Identity {
    pub fn catalog() -> Vec<Identity> {
        use Identity::*;
        let mut v = alloc::vec![
            CanonicalCommutator,
            CommAB,
            CommABnExplicit,
            CommABn,
            MuShift,
            NuShift,
            CommAMu,
            CommANu,
            CommMuNu,
            CommAC,
            CommAD,
            SnClosedForm,
            DoubleCommutator,
            RnBinomial,
            CommARn,
            CommASn,
        ];
        v.extend((1..=4).map(SecondOrder));
        v.extend((1..=11).map(Arrangement));
        v.extend([NuD, TildeUnitarity, EvolutionMatrix]);
        v
    }

    pub fn uses_power(&self) -> bool {
        use Identity::*;
        matches!(
            self,
            CommABnExplicit
                | CommABn
                | MuShift
                | NuShift
                | SnClosedForm
                | DoubleCommutator
                | RnBinomial
                | CommARn
                | CommASn
                | SecondOrder(_)
                | Arrangement(_)
        )
    }

    /// Powers the catalog is exercised at, up to `max_n`.
    pub fn powers(&self, max_n: usize) -> core::ops::RangeInclusive<usize> {
        match self {
            Identity::CommABnExplicit => 1..=max_n.min(4),
            _ if self.uses_power() => 1..=max_n,
            _ => 0..=0,
        }
    }

    /// Ladder operators per mode on the longest product, which bounds how far
    /// from the kept block the truncation edge can be felt.
    fn ladder_degree(&self) -> usize {
        use Identity::*;
        match self {
            CommARn | CommASn | Arrangement(_) => 4,
            DoubleCommutator | RnBinomial | SecondOrder(_) => 3,
            _ => 2,
        }
    }

    pub fn name(&self) -> alloc::string::String {
        use alloc::format;
        match self {
            Identity::SecondOrder(k) => format!("second_order_{k}"),
            Identity::Arrangement(k) => format!("arrangement_{k}"),
            other => {
                let dbg = format!("{other:?}");
                let mut out = alloc::string::String::new();
                for (i, ch) in dbg.chars().enumerate() {
                    if ch.is_ascii_uppercase() {
                        if i > 0 {
                            out.push('_');
                        }
                        out.push(ch.to_ascii_lowercase());
                    } else {
                        out.push(ch);
                    }
                }
                out
            }
        }
    }
}

/// Operators of the two boson modes in the scaled basis.
struct Ops {
    id: FockMatrix,
    a: FockMatrix,
    ad: FockMatrix,
    mu: FockMatrix,
    nu: FockMatrix,
    big_a: FockMatrix,
    b: FockMatrix,
    c: FockMatrix,
    d: FockMatrix,
}

impl Ops {
    fn new(dim: usize, c_shift: f64) -> Result<Ops> {
        let regs = [Register::Boson { dim }, Register::Boson { dim }];
        let basis = Basis::Scaled;
        let a = FockMatrix::lowering(&regs, basis, 0)?;
        let ad = FockMatrix::raising(&regs, basis, 0)?;
        let at = FockMatrix::lowering(&regs, basis, 1)?;
        let atd = FockMatrix::raising(&regs, basis, 1)?;
        let mu = &ad * &atd;
        let nu = &a * &at;
        let n1 = FockMatrix::number(&regs, basis, 0);
        let n2 = FockMatrix::number(&regs, basis, 1);
        Ok(Ops {
            id: FockMatrix::identity(&regs, basis),
            big_a: &mu - &nu,
            c: &mu + &nu,
            d: (&n1 + &n2).shifted(1.0),
            b: n1.shifted(c_shift),
            a,
            ad,
            mu,
            nu,
        })
    }

    fn comm(&self, x: &FockMatrix, y: &FockMatrix) -> FockMatrix {
        x.commutator(y).expect("same space")
    }

    /// `(B + s)^n`.
    fn bpow(&self, s: f64, n: usize) -> FockMatrix {
        self.b.shifted(s).powi(n as u32)
    }

    /// `[A, B^k]` computed directly.
    fn comm_a_bk(&self, k: usize) -> FockMatrix {
        self.comm(&self.big_a, &self.bpow(0.0, k))
    }

    /// `R_n` from its definition.
    fn r_n(&self, n: usize) -> FockMatrix {
        let t1 = &self.comm(&self.big_a, &self.bpow(-1.0, n)) * &self.mu;
        let t2 = &self.comm(&self.big_a, &self.bpow(1.0, n)) * &self.nu;
        let t3 = &self.comm_a_bk(n) * &self.big_a;
        &(&t1 - &t2) - &t3
    }

    /// `S_n` from its definition.
    fn s_n(&self, n: usize) -> FockMatrix {
        let t1 = &self.bpow(-1.0, n) * &self.comm(&self.big_a, &self.mu);
        let t2 = &self.bpow(1.0, n) * &self.comm(&self.big_a, &self.nu);
        &t1 - &t2
    }

    /// `X_k`: `C` for odd `k`, `A` for even `k`.
    fn x_k(&self, k: usize) -> &FockMatrix {
        if k % 2 == 1 {
            &self.c
        } else {
            &self.big_a
        }
    }
}

fn binom(n: usize, k: usize) -> f64 {
    let mut r = 1.0;
    for i in 0..k {
        r = r * (n - i) as f64 / (i + 1) as f64;
    }
    r
}

fn sign(k: usize) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Both sides of a polynomial identity at power `n`.
fn sides(id: Identity, n: usize, o: &Ops) -> Result<(FockMatrix, FockMatrix)> {
    use Identity::*;
    let a = &o.big_a;
    let (mu, nu, b, c, d) = (&o.mu, &o.nu, &o.b, &o.c, &o.d);
    let neg = |m: &FockMatrix| m.scale_re(-1.0);
    let bp = |s: f64| o.bpow(s, n);
    Ok(match id {
        CanonicalCommutator => (o.comm(&o.a, &o.ad), o.id.clone()),
        CommAB => (o.comm(a, b), neg(c)),
        CommABnExplicit => {
            let lhs = o.comm_a_bk(n);
            let b2 = b * b;
            let b3 = &b2 * b;
            let rhs = match n {
                1 => neg(c),
                2 => a - &(b * c).scale_re(2.0),
                3 => &(&neg(c) + &(b * a).scale_re(3.0)) - &(&b2 * c).scale_re(3.0),
                4 => {
                    let t = a - &(b * c).scale_re(4.0);
                    &(&t + &(&b2 * a).scale_re(6.0)) - &(&b3 * c).scale_re(4.0)
                }
                _ => return Err(Error::Domain { what: "explicit [A,B^n] forms cover n = 1..=4", value: n as f64 }),
            };
            (lhs, rhs)
        }
        CommABn => {
            let rhs = &(&(&bp(-1.0) * mu) - &(&bp(1.0) * nu)) - &(&bp(0.0) * a);
            (o.comm_a_bk(n), rhs)
        }
        MuShift => (mu * &bp(0.0), &bp(-1.0) * mu),
        NuShift => (nu * &bp(0.0), &bp(1.0) * nu),
        CommAMu => (o.comm(a, mu), neg(d)),
        CommANu => (o.comm(a, nu), neg(d)),
        CommMuNu => (o.comm(mu, nu), neg(d)),
        CommAC => (o.comm(a, c), d.scale_re(-2.0)),
        CommAD => (o.comm(a, d), c.scale_re(-2.0)),
        SnClosedForm => (o.s_n(n), neg(&(&(&bp(-1.0) - &bp(1.0)) * d))),
        DoubleCommutator => (o.comm(a, &o.comm_a_bk(n)), &o.r_n(n) + &o.s_n(n)),
        RnBinomial => {
            let mut rhs = o.id.scale_re(0.0);
            for k in 1..n {
                let term = &o.comm_a_bk(n - k) * o.x_k(k);
                rhs = &rhs + &term.scale_re(binom(n, k) * sign(k));
            }
            (o.r_n(n), rhs)
        }
        CommARn => {
            let mut rhs = o.id.scale_re(0.0);
            for k in 1..n {
                let m = n - k;
                let rs = &o.r_n(m) + &o.s_n(m);
                let x = o.x_k(k);
                let term = &(&rs * x) + &(&o.comm_a_bk(m) * &o.comm(a, x));
                rhs = &rhs + &term.scale_re(binom(n, k) * sign(k));
            }
            (o.comm(a, &o.r_n(n)), rhs)
        }
        CommASn => {
            let mut rhs = &(&bp(1.0) - &bp(-1.0)) * &o.comm(a, d);
            for k in (1..=n).step_by(2) {
                let term = &o.comm_a_bk(n - k) * d;
                rhs = &rhs + &term.scale_re(2.0 * binom(n, k));
            }
            (o.comm(a, &o.s_n(n)), rhs)
        }
        SecondOrder(k) => {
            let mu2 = mu * mu;
            let nu2 = nu * nu;
            match k {
                1 => (&bp(-2.0) * &mu2, &mu2 * &bp(0.0)),
                2 => {
                    let inner = &(&neg(d) - &(mu * a)) - &(a * mu);
                    let rhs = &(&mu2 * &bp(1.0)).scale_re(-2.0) + &(&(mu * &bp(0.0)) * nu).scale_re(2.0);
                    (&bp(-1.0) * &inner, rhs)
                }
                3 => {
                    let inner = &(&(a * a) - &(nu * mu)) - &(mu * nu);
                    let rhs = &(&(&(&mu2 * &bp(2.0)) - &(&(mu * &bp(1.0)) * nu).scale_re(4.0))
                        - &(&bp(0.0) * d).scale_re(2.0))
                        + &(&bp(0.0) * &nu2);
                    (&bp(0.0) * &inner, rhs)
                }
                4 => {
                    let inner = &(d + &(nu * a)) + &(a * nu);
                    let rhs = &(&(&(mu * &bp(2.0)) * nu).scale_re(2.0) - &(&bp(1.0) * &nu2).scale_re(2.0))
                        + &(&bp(1.0) * d).scale_re(2.0);
                    (&bp(1.0) * &inner, rhs)
                }
                _ => return Err(Error::Domain { what: "second-order rule index is 1..=4", value: k as f64 }),
            }
        }
        Arrangement(k) => {
            let b0 = bp(0.0);
            let b1 = bp(1.0);
            let b2 = bp(2.0);
            let mu2 = mu * mu;
            let nu2 = nu * nu;
            let d1 = d.shifted(1.0);
            let d2 = d.shifted(2.0);
            match k {
                1 => (&b0 * &(&mu2 * mu), &(&mu2 * mu) * &bp(3.0)),
                2 => (&b0 * &(&mu2 * nu), &(&mu2 * &b2) * nu),
                3 => (&b0 * &(&(mu * nu) * mu), &(&(&mu2 * &b2) * nu) + &(&(mu * &b1) * d)),
                4 => (&b0 * &(mu * &nu2), &(mu * &b1) * &nu2),
                5 => (
                    &b0 * &(nu * &mu2),
                    &(&(&mu2 * &b2) * nu) + &(&(mu * &b1) * &d1).scale_re(2.0),
                ),
                6 => (&b0 * &(&(nu * mu) * nu), &(&(mu * &b1) * &nu2) + &(&(&b0 * d) * nu)),
                7 => (
                    &b0 * &(&nu2 * mu),
                    &(&(mu * &b1) * &nu2) + &(&(&b0 * &d1) * nu).scale_re(2.0),
                ),
                8 => (&b0 * &(d * mu), &(mu * &b1) * &d2),
                9 => (&b0 * mu, mu * &b1),
                10 => (&b0 * &(a * d), &(&(mu * &b1) * d) - &(&(&b0 * &d2) * nu)),
                11 => (&b0 * &(d * a), &(&(mu * &b1) * &d2) - &(&(&b0 * d) * nu)),
                _ => return Err(Error::Domain { what: "arrangement rule index is 1..=11", value: k as f64 }),
            }
        }
        NuD => (nu * d, &d.shifted(2.0) * nu),
        TildeUnitarity | EvolutionMatrix => unreachable!("handled separately"),
    })
}

/// Parameters of the evolution-matrix checks; `c = 1`, off resonance.
fn evolution_params() -> ModelParams {
    ModelParams { omega0: 2.0, omega: 4.0, kappa: 1.0, alpha: 0.0 }
}

const EVOLUTION_T: f64 = 0.7;

fn tilde_unitarity(config: &OracleConfig) -> Result<f64> {
    let dim = config.dim;
    let p = evolution_params();
    let d = derive(&p)?;
    let regs = [Register::Boson { dim }];
    let ops = evolution_elements(&p, &d, EVOLUTION_T, dim);
    let as_matrix = |op: &super::state::ModeOp| {
        let mut m = FockMatrix::zeros(&regs, Basis::Physical);
        for (n, &c) in op.coef.iter().enumerate() {
            let src = n as isize - op.shift;
            if src >= 0 && (src as usize) < dim {
                m.set(n, src as usize, c);
            }
        }
        m
    };
    let [t11, t10, t01, t00] = [&ops[0], &ops[1], &ops[2], &ops[3]].map(|o| as_matrix(&o.conj()));
    let id = FockMatrix::identity(&regs, Basis::Physical);
    let zero = id.scale_re(0.0);
    let h = |x: &FockMatrix, y: &FockMatrix| &x.adjoint() * y;
    let keep = |occ: &[usize]| occ[0] <= config.safe_excitation();
    let checks = [
        (&h(&t11, &t11) + &h(&t01, &t01), &id),
        (&h(&t10, &t10) + &h(&t00, &t00), &id),
        (&h(&t11, &t10) + &h(&t01, &t00), &zero),
        (&h(&t10, &t11) + &h(&t00, &t01), &zero),
    ];
    let mut worst: f64 = 0.0;
    for (lhs, rhs) in checks.iter() {
        worst = worst.max(lhs.max_deviation_where(rhs, keep)?);
    }
    Ok(worst)
}

fn evolution_matrix(config: &OracleConfig) -> Result<f64> {
    let dim = config.dim;
    let p = evolution_params();
    let d = derive(&p)?;
    // atom register: level 1 is the excited state, listed first in U
    let regs = [Register::Fermion, Register::Boson { dim }];
    let idx = |excited: bool, n: usize| if excited { dim + n } else { n };
    let mut gen = FockMatrix::zeros(&regs, Basis::Physical);
    let half = d.delta_omega / 2.0;
    for n in 0..dim {
        gen.set(idx(true, n), idx(true, n), C64::new(-half, 0.0));
        gen.set(idx(false, n), idx(false, n), C64::new(half, 0.0));
        if n + 1 < dim {
            let g = p.kappa * libm::sqrt((n + 1) as f64);
            // kappa a: |n+1, g> -> |n, e>; kappa a^dagger: |n, e> -> |n+1, g>
            gen.set(idx(true, n), idx(false, n + 1), C64::new(g, 0.0));
            gen.set(idx(false, n + 1), idx(true, n), C64::new(g, 0.0));
        }
    }
    let series = gen.exp_scaled(C64::new(0.0, -EVOLUTION_T), config.taylor_tol * 1e-3);
    let ops = evolution_elements(&p, &d, EVOLUTION_T, dim);
    let mut closed = FockMatrix::zeros(&regs, Basis::Physical);
    for (k, op) in ops.iter().enumerate() {
        let (row_e, col_e) = [(true, true), (true, false), (false, true), (false, false)][k];
        for (n, &c) in op.coef.iter().enumerate() {
            let src = n as isize - op.shift;
            if src >= 0 && (src as usize) < dim {
                closed.set(idx(row_e, n), idx(col_e, src as usize), c);
            }
        }
    }
    series.max_deviation_where(&closed, |occ| occ[1] <= config.safe_excitation())
}

/// Max physical-basis deviation between the two sides of `id` at power `n`,
/// over states with total excitation `<= dim - safe_buffer`.
pub fn verify_identity(id: Identity, n: usize, config: &OracleConfig) -> Result<f64> {
    config.validate()?;
    if config.safe_buffer < id.ladder_degree() {
        return Err(Error::Domain {
            what: "safe_buffer below the ladder degree of this identity",
            value: config.safe_buffer as f64,
        });
    }
    match id {
        Identity::TildeUnitarity => return tilde_unitarity(config),
        Identity::EvolutionMatrix => return evolution_matrix(config),
        _ => {}
    }
    let ops = Ops::new(config.dim, config.identity_c)?;
    let (lhs, rhs) = sides(id, n, &ops)?;
    let cap = config.safe_excitation();
    lhs.max_deviation_where(&rhs, |occ| occ.iter().sum::<usize>() <= cap)
}
