//! Arithmetic backends for evaluating the coefficient recurrence.
//!
//! Inputs (α, β) always enter as `f64` and are lifted exactly into the
//! backend; only the internal arithmetic changes. The extended backend is a
//! software float with a configurable mantissa width.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, RoundingMode, Sign};
use serde::{Deserialize, Serialize};

/// Mantissa bits of IEEE binary64.
pub const DOUBLE_BITS: u32 = 53;

/// Arithmetic backend selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Precision {
    /// Binary64 hardware floats.
    #[default]
    Double,
    /// Software floats with `bits` mantissa bits.
    Extended { bits: u32 },
    /// Start in binary64 and escalate (128, 256, ... up to `max_bits`) for
    /// any evaluation whose sign is not certified by its error bound.
    Adaptive { max_bits: u32 },
}

impl Precision {
    /// Backend for a requested mantissa width; 53 bits or less selects `Double`.
    pub fn from_bits(bits: u32) -> Self {
        if bits <= DOUBLE_BITS {
            Precision::Double
        } else {
            Precision::Extended { bits }
        }
    }

    /// Escalation ladder tried, in order, for one evaluation.
    pub fn ladder(self) -> Vec<Precision> {
        match self {
            Precision::Double | Precision::Extended { .. } => vec![self],
            Precision::Adaptive { max_bits } => {
                let mut out = vec![Precision::Double];
                let mut bits = 128;
                while bits < max_bits {
                    out.push(Precision::Extended { bits });
                    bits *= 2;
                }
                out.push(Precision::Extended {
                    bits: max_bits.max(DOUBLE_BITS + 1),
                });
                out
            }
        }
    }

    /// Unit roundoff 2^(1-p) / 2 of the widest backend in the ladder.
    pub fn unit_roundoff(self) -> f64 {
        let bits = match self {
            Precision::Double => DOUBLE_BITS,
            Precision::Extended { bits } => bits,
            Precision::Adaptive { max_bits } => max_bits,
        };
        0.5 * 2f64.powi(1 - bits as i32)
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Precision::Double => write!(f, "double"),
            Precision::Extended { bits } => write!(f, "extended-{bits}"),
            Precision::Adaptive { max_bits } => write!(f, "adaptive-{max_bits}"),
        }
    }
}

/// Minimal real-number interface needed by the recurrence.
pub trait Scalar:
    Clone
    + Send
    + Sync
    + fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Exact lift of an `f64` into the same backend (and width) as `self`.
    fn lift(&self, x: f64) -> Self;
    fn to_f64(&self) -> f64;
    /// Natural log of |self|; `-inf` for zero.
    fn ln_abs(&self) -> f64;
    fn signum_i8(&self) -> i8;
    fn is_finite(&self) -> bool;
    fn unit_roundoff(&self) -> f64;
    /// Multiply by 2^k exactly.
    fn mul_pow2(&self, k: i32) -> Self;
}

impl Scalar for f64 {
    #[inline]
    fn lift(&self, x: f64) -> Self {
        x
    }
    #[inline]
    fn to_f64(&self) -> f64 {
        *self
    }
    #[inline]
    fn ln_abs(&self) -> f64 {
        self.abs().ln()
    }
    #[inline]
    fn signum_i8(&self) -> i8 {
        if *self > 0.0 {
            1
        } else if *self < 0.0 {
            -1
        } else {
            0
        }
    }
    #[inline]
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
    #[inline]
    fn unit_roundoff(&self) -> f64 {
        f64::EPSILON / 2.0
    }
    #[inline]
    fn mul_pow2(&self, k: i32) -> Self {
        self * 2f64.powi(k)
    }
}

const RM: RoundingMode = RoundingMode::ToEven;

/// Software float carrying its own mantissa width.
#[derive(Clone)]
pub struct Extended {
    value: BigFloat,
    bits: usize,
}

impl Extended {
    pub fn new(x: f64, bits: u32) -> Self {
        Self {
            value: BigFloat::from_f64(x, bits as usize),
            bits: bits as usize,
        }
    }

    pub fn bits(&self) -> u32 {
        self.bits as u32
    }

    pub fn as_bigfloat(&self) -> &BigFloat {
        &self.value
    }

    fn wrap(&self, value: BigFloat) -> Self {
        Self {
            value,
            bits: self.bits,
        }
    }

    /// (sign, top mantissa word, binary exponent) with value = ±top·2^(e-64).
    fn parts(&self) -> Option<(i8, u64, i64)> {
        if self.value.is_zero() {
            return None;
        }
        let (words, _, sign, exp, _) = self.value.as_raw_parts()?;
        let top = *words.last()?;
        let s = if sign == Sign::Neg { -1 } else { 1 };
        Some((s, top, exp as i64))
    }
}

impl fmt::Debug for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Extended({:e}, {} bits)", self.to_f64(), self.bits)
    }
}

impl Add for Extended {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let v = self.value.add(&rhs.value, self.bits, RM);
        self.wrap(v)
    }
}

impl Sub for Extended {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let v = self.value.sub(&rhs.value, self.bits, RM);
        self.wrap(v)
    }
}

impl Mul for Extended {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let v = self.value.mul(&rhs.value, self.bits, RM);
        self.wrap(v)
    }
}

impl Div for Extended {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let v = self.value.div(&rhs.value, self.bits, RM);
        self.wrap(v)
    }
}

impl Neg for Extended {
    type Output = Self;
    fn neg(self) -> Self {
        let v = -&self.value;
        self.wrap(v)
    }
}

impl Scalar for Extended {
    fn lift(&self, x: f64) -> Self {
        Self::new(x, self.bits as u32)
    }

    fn to_f64(&self) -> f64 {
        if self.value.is_nan() {
            return f64::NAN;
        }
        if self.value.is_inf_pos() {
            return f64::INFINITY;
        }
        if self.value.is_inf_neg() {
            return f64::NEG_INFINITY;
        }
        match self.parts() {
            None => 0.0,
            Some((s, top, e)) => {
                let e = (e - 64).clamp(-2000, 2000) as i32;
                // split the scaling so intermediate powers stay finite
                let half = e / 2;
                f64::from(s) * (top as f64) * 2f64.powi(half) * 2f64.powi(e - half)
            }
        }
    }

    fn ln_abs(&self) -> f64 {
        match self.parts() {
            None => f64::NEG_INFINITY,
            Some((_, top, e)) => (top as f64).ln() + ((e - 64) as f64) * std::f64::consts::LN_2,
        }
    }

    fn signum_i8(&self) -> i8 {
        match self.parts() {
            None => 0,
            Some((s, _, _)) => s,
        }
    }

    fn is_finite(&self) -> bool {
        !(self.value.is_nan() || self.value.is_inf())
    }

    fn unit_roundoff(&self) -> f64 {
        0.5 * 2f64.powi(1 - self.bits as i32)
    }

    fn mul_pow2(&self, k: i32) -> Self {
        let mut v = self.value.clone();
        if let Some(e) = v.exponent() {
            v.set_exponent(e + k);
        }
        self.wrap(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extended_roundtrips_f64() {
        for &x in &[1.0, -3.25, 1e-300, 6.02e23, -7.605_551_275_463_989] {
            let e = Extended::new(x, 200);
            assert_eq!(e.to_f64(), x);
            assert!((e.ln_abs() - x.abs().ln()).abs() < 1e-12);
        }
        assert_eq!(Extended::new(0.0, 128).to_f64(), 0.0);
        assert_eq!(Extended::new(0.0, 128).signum_i8(), 0);
    }

    #[test]
    fn extended_resolves_cancellation_double_cannot() {
        let big = 1.0e16;
        let d = (big + 1.0) - big;
        assert_eq!(d, 0.0);
        let e = Extended::new(big, 128);
        let r = (e.clone() + e.lift(1.0)) - e;
        assert_eq!(r.to_f64(), 1.0);
    }

    #[test]
    fn pow2_scaling_is_exact() {
        let e = Extended::new(3.0, 100).mul_pow2(-500).mul_pow2(500);
        assert_eq!(e.to_f64(), 3.0);
        assert_eq!(3.0f64.mul_pow2(-500).mul_pow2(500), 3.0);
    }

    #[test]
    fn adaptive_ladder_escalates() {
        let l = Precision::Adaptive { max_bits: 512 }.ladder();
        assert_eq!(
            l,
            vec![
                Precision::Double,
                Precision::Extended { bits: 128 },
                Precision::Extended { bits: 256 },
                Precision::Extended { bits: 512 }
            ]
        );
        assert_eq!(Precision::from_bits(53), Precision::Double);
        assert_eq!(Precision::from_bits(80), Precision::Extended { bits: 80 });
    }
}
