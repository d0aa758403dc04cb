//! Dense operators on a truncated multi-register Fock basis.
//!
//! Basis states are ordered with the first register most significant. A
//! boson register of size `dim` holds `0..dim` quanta; a fermion register
//! holds 0 or 1 and picks up a Jordan-Wigner sign from fermions to its left.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::math::{exp, sqrt};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Register {
    Boson { dim: usize },
    Fermion,
}

impl Register {
    pub fn levels(&self) -> usize {
        match *self {
            Register::Boson { dim } => dim,
            Register::Fermion => 2,
        }
    }
}

/// `Physical` is the orthonormal number basis. `Scaled` rescales boson state
/// `|n>` by `sqrt(n!)`, which turns every ladder matrix element into an
/// integer: `a` has `n` on the superdiagonal and `a^dagger` has ones on the
/// subdiagonal. Products of polynomial operators are then exact in `f64`
/// while the entries stay below `2^53`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Basis {
    Physical,
    Scaled,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FockMatrix {
    registers: Vec<Register>,
    basis: Basis,
    size: usize,
    data: Vec<C64>,
}

fn space_size(registers: &[Register]) -> usize {
    registers.iter().map(Register::levels).product()
}

impl FockMatrix {
    pub fn zeros(registers: &[Register], basis: Basis) -> Self {
        let size = space_size(registers);
        FockMatrix {
            registers: registers.to_vec(),
            basis,
            size,
            data: vec![ZERO; size * size],
        }
    }

    pub fn identity(registers: &[Register], basis: Basis) -> Self {
        let mut m = Self::zeros(registers, basis);
        for i in 0..m.size {
            m.data[i * m.size + i] = ONE;
        }
        m
    }

    /// Diagonal operator whose entry is `f(occupations)`.
    pub fn diagonal<F: Fn(&[usize]) -> C64>(registers: &[Register], basis: Basis, f: F) -> Self {
        let mut m = Self::zeros(registers, basis);
        let mut occ = vec![0; registers.len()];
        for i in 0..m.size {
            m.decode_into(i, &mut occ);
            m.data[i * m.size + i] = f(&occ);
        }
        m
    }

    pub fn number(registers: &[Register], basis: Basis, which: usize) -> Self {
        Self::diagonal(registers, basis, |occ| C64::new(occ[which] as f64, 0.0))
    }

    /// Annihilator on register `which`.
    pub fn lowering(registers: &[Register], basis: Basis, which: usize) -> Result<Self> {
        if which >= registers.len() {
            return Err(Error::Shape("register index out of range"));
        }
        let mut m = Self::zeros(registers, basis);
        let mut occ = vec![0; registers.len()];
        for col in 0..m.size {
            m.decode_into(col, &mut occ);
            let n = occ[which];
            if n == 0 {
                continue;
            }
            let amp = match registers[which] {
                Register::Boson { .. } => match basis {
                    Basis::Physical => sqrt(n as f64),
                    Basis::Scaled => n as f64,
                },
                Register::Fermion => jordan_wigner_sign(registers, &occ, which),
            };
            occ[which] = n - 1;
            let row = m.encode(&occ);
            m.data[row * m.size + col] = C64::new(amp, 0.0);
        }
        Ok(m)
    }

    pub fn raising(registers: &[Register], basis: Basis, which: usize) -> Result<Self> {
        let low = Self::lowering(registers, basis, which)?;
        match (registers[which], basis) {
            (Register::Boson { .. }, Basis::Scaled) => {
                // ones on the subdiagonal of this register
                let mut m = Self::zeros(registers, basis);
                let mut occ = vec![0; registers.len()];
                for col in 0..m.size {
                    m.decode_into(col, &mut occ);
                    if occ[which] + 1 >= registers[which].levels() {
                        continue;
                    }
                    occ[which] += 1;
                    let row = m.encode(&occ);
                    m.data[row * m.size + col] = ONE;
                }
                Ok(m)
            }
            _ => Ok(low.adjoint()),
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[row * self.size + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: C64) {
        self.data[row * self.size + col] = value;
    }

    pub fn decode(&self, index: usize) -> Vec<usize> {
        let mut occ = vec![0; self.registers.len()];
        self.decode_into(index, &mut occ);
        occ
    }

    fn decode_into(&self, mut index: usize, occ: &mut [usize]) {
        for (slot, reg) in occ.iter_mut().zip(&self.registers).rev() {
            let l = reg.levels();
            *slot = index % l;
            index /= l;
        }
    }

    pub fn encode(&self, occ: &[usize]) -> usize {
        occ.iter()
            .zip(&self.registers)
            .fold(0, |acc, (&n, reg)| acc * reg.levels() + n)
    }

    /// Sum of occupations over all registers.
    pub fn total_excitation(&self, index: usize) -> usize {
        self.decode(index).iter().sum()
    }

    fn check_shape(&self, other: &Self) -> Result<()> {
        if self.registers != other.registers || self.basis != other.basis {
            return Err(Error::Shape("operators live on different spaces"));
        }
        Ok(())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        let n = self.size;
        // ladder products are banded, so walk only the nonzeros of `other`
        let sparse_rows: Vec<Vec<(usize, C64)>> = (0..n)
            .map(|k| {
                other.data[k * n..(k + 1) * n]
                    .iter()
                    .enumerate()
                    .filter(|(_, &b)| b != ZERO)
                    .map(|(j, &b)| (j, b))
                    .collect()
            })
            .collect();
        let mut out = Self::zeros(&self.registers, self.basis);
        for i in 0..n {
            let row = &self.data[i * n..(i + 1) * n];
            let dst = &mut out.data[i * n..(i + 1) * n];
            for (k, &a) in row.iter().enumerate() {
                if a == ZERO {
                    continue;
                }
                for &(j, b) in &sparse_rows[k] {
                    dst[j] += a * b;
                }
            }
        }
        Ok(out)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(C64, C64) -> C64) -> Result<Self> {
        self.check_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect();
        Ok(FockMatrix { registers: self.registers.clone(), basis: self.basis, size: self.size, data })
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, s: C64) -> Self {
        FockMatrix {
            registers: self.registers.clone(),
            basis: self.basis,
            size: self.size,
            data: self.data.iter().map(|&a| a * s).collect(),
        }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    /// `self + s * identity`.
    pub fn shifted(&self, s: f64) -> Self {
        let mut m = self.clone();
        for i in 0..self.size {
            m.data[i * self.size + i] += s;
        }
        m
    }

    /// Conjugate transpose. Only meaningful in the physical basis.
    pub fn adjoint(&self) -> Self {
        let n = self.size;
        let mut m = Self::zeros(&self.registers, self.basis);
        for i in 0..n {
            for j in 0..n {
                m.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        m
    }

    pub fn powi(&self, k: u32) -> Self {
        let mut acc = Self::identity(&self.registers, self.basis);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.try_mul(other)?.try_sub(&other.try_mul(self)?)
    }

    pub fn apply(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.size {
            return Err(Error::Shape("vector length does not match operator"));
        }
        let n = self.size;
        let mut out = vec![ZERO; n];
        for (i, o) in out.iter_mut().enumerate() {
            let row = &self.data[i * n..(i + 1) * n];
            *o = row.iter().zip(v).filter(|(a, _)| **a != ZERO).map(|(a, b)| a * b).sum();
        }
        Ok(out)
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().filter(|&&a| a != ZERO).count()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    /// Largest absolute row sum, an upper bound on the operator norm.
    pub fn norm_inf(&self) -> f64 {
        let n = self.size;
        (0..n)
            .map(|i| self.data[i * n..(i + 1) * n].iter().map(|a| a.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `sqrt(prod n_r!)` over boson registers: the factor relating scaled and
    /// physical matrix elements.
    fn log_scale(&self, index: usize) -> f64 {
        let occ = self.decode(index);
        occ.iter()
            .zip(&self.registers)
            .filter(|(_, r)| matches!(r, Register::Boson { .. }))
            .map(|(&n, _)| 0.5 * ln_factorial(n))
            .sum()
    }

    /// Matrix element in the physical basis, whatever the storage basis.
    pub fn physical_element(&self, row: usize, col: usize) -> C64 {
        let v = self.get(row, col);
        match self.basis {
            Basis::Physical => v,
            Basis::Scaled if v == ZERO => v,
            Basis::Scaled => v * exp(self.log_scale(row) - self.log_scale(col)),
        }
    }

    /// Max `|self - other|` over physical-basis elements whose row and column
    /// both satisfy `keep`.
    pub fn max_deviation_where<F: Fn(&[usize]) -> bool>(&self, other: &Self, keep: F) -> Result<f64> {
        let diff = self.try_sub(other)?;
        let n = self.size;
        let kept: Vec<bool> = (0..n).map(|i| keep(&self.decode(i))).collect();
        let mut worst: f64 = 0.0;
        for i in (0..n).filter(|&i| kept[i]) {
            for j in (0..n).filter(|&j| kept[j]) {
                worst = worst.max(diff.physical_element(i, j).norm());
            }
        }
        Ok(worst)
    }

    /// `exp(z * self)` by scaled Taylor series.
    pub fn exp_scaled(&self, z: C64, tol: f64) -> Self {
        let norm = self.norm_inf() * z.norm();
        let steps = (norm.max(1.0) * 2.0) as usize + 1;
        let h = self.scale(z / steps as f64);
        let mut step = Self::identity(&self.registers, self.basis);
        let mut term = step.clone();
        for k in 1..200 {
            term = (&term * &h).scale_re(1.0 / k as f64);
            step = &step + &term;
            if term.max_abs() < tol {
                break;
            }
        }
        step.powi(steps as u32)
    }
}

fn jordan_wigner_sign(registers: &[Register], occ: &[usize], which: usize) -> f64 {
    let parity: usize = registers[..which]
        .iter()
        .zip(occ)
        .filter(|(r, _)| matches!(r, Register::Fermion))
        .map(|(_, &n)| n)
        .sum();
    if parity % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

pub(crate) fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| crate::math::ln(k as f64)).sum()
}

impl<'a> Mul<&'a FockMatrix> for &'a FockMatrix {
    type Output = FockMatrix;
    fn mul(self, rhs: &'a FockMatrix) -> FockMatrix {
        self.try_mul(rhs).expect("operator shapes agree")
    }
}

impl<'a> Add<&'a FockMatrix> for &'a FockMatrix {
    type Output = FockMatrix;
    fn add(self, rhs: &'a FockMatrix) -> FockMatrix {
        self.try_add(rhs).expect("operator shapes agree")
    }
}

impl<'a> Sub<&'a FockMatrix> for &'a FockMatrix {
    type Output = FockMatrix;
    fn sub(self, rhs: &'a FockMatrix) -> FockMatrix {
        self.try_sub(rhs).expect("operator shapes agree")
    }
}
