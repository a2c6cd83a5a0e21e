//! Fixed-point reals: an integer mantissa scaled by `2^bits`.
//!
//! Arithmetic truncates toward negative infinity. Values that must stay
//! exact (quadratic surds) live in [`crate::surd`]; this type is the common
//! currency for everything downstream of them.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub const DEFAULT_BITS: u32 = 256;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HpReal {
    mant: BigInt,
    bits: u32,
}

fn pow2(bits: u32) -> BigInt {
    BigInt::one() << bits as usize
}

impl HpReal {
    pub fn from_mantissa(mant: BigInt, bits: u32) -> Self {
        HpReal { mant, bits }
    }

    pub fn zero(bits: u32) -> Self {
        HpReal { mant: BigInt::zero(), bits }
    }

    pub fn from_int(n: &BigInt, bits: u32) -> Self {
        HpReal { mant: n << bits as usize, bits }
    }

    pub fn from_i64(n: i64, bits: u32) -> Self {
        Self::from_int(&BigInt::from(n), bits)
    }

    /// `floor(num / den * 2^bits) / 2^bits`.
    pub fn from_ratio(num: &BigInt, den: &BigInt, bits: u32) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let (n, d) = if den.is_negative() { (-num, -den) } else { (num.clone(), den.clone()) };
        HpReal { mant: (n << bits as usize).div_floor(&d), bits }
    }

    /// Exact conversion of a finite double (truncated below `2^-bits`).
    pub fn from_f64(x: f64, bits: u32) -> Self {
        assert!(x.is_finite(), "non-finite input");
        if x == 0.0 {
            return Self::zero(bits);
        }
        let raw = x.abs().to_bits();
        let exp = ((raw >> 52) & 0x7ff) as i64;
        let frac = raw & ((1u64 << 52) - 1);
        let (m, e) = if exp == 0 { (frac, -1074) } else { (frac | (1u64 << 52), exp - 1075) };
        let mut mant = BigInt::from(m);
        let shift = e + bits as i64;
        if shift >= 0 {
            mant <<= shift as usize;
        } else {
            mant >>= (-shift) as usize;
        }
        if x < 0.0 {
            mant = -mant;
        }
        HpReal { mant, bits }
    }

    /// `floor(sqrt(n) * 2^bits)`.
    pub fn sqrt_int(n: &BigInt, bits: u32) -> Self {
        assert!(!n.is_negative(), "sqrt of negative");
        let scaled: BigInt = n << (2 * bits as usize);
        HpReal { mant: scaled.sqrt(), bits }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mant
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn with_bits(&self, bits: u32) -> Self {
        let mant = if bits >= self.bits {
            &self.mant << (bits - self.bits) as usize
        } else {
            self.mant.div_floor(&pow2(self.bits - bits))
        };
        HpReal { mant, bits }
    }

    fn check(&self, other: &Self) {
        assert_eq!(self.bits, other.bits, "precision mismatch");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check(other);
        HpReal { mant: &self.mant + &other.mant, bits: self.bits }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check(other);
        HpReal { mant: &self.mant - &other.mant, bits: self.bits }
    }

    pub fn neg(&self) -> Self {
        HpReal { mant: -&self.mant, bits: self.bits }
    }

    pub fn abs(&self) -> Self {
        HpReal { mant: self.mant.abs(), bits: self.bits }
    }

    pub fn mul_int(&self, k: &BigInt) -> Self {
        HpReal { mant: &self.mant * k, bits: self.bits }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check(other);
        HpReal { mant: (&self.mant * &other.mant).div_floor(&pow2(self.bits)), bits: self.bits }
    }

    pub fn div(&self, other: &Self) -> Self {
        self.check(other);
        assert!(!other.mant.is_zero(), "division by zero");
        let num: BigInt = &self.mant << self.bits as usize;
        let (n, d) = if other.mant.is_negative() { (-num, -&other.mant) } else { (num, other.mant.clone()) };
        HpReal { mant: n.div_floor(&d), bits: self.bits }
    }

    pub fn floor(&self) -> BigInt {
        self.mant.div_floor(&pow2(self.bits))
    }

    /// Fractional part in `[0, 1)`.
    pub fn frac(&self) -> Self {
        HpReal { mant: self.mant.mod_floor(&pow2(self.bits)), bits: self.bits }
    }

    /// Distance to the nearest integer, `||x||`.
    pub fn dist_to_int(&self) -> Self {
        let one = pow2(self.bits);
        let f = self.mant.mod_floor(&one);
        let g = &one - &f;
        HpReal { mant: if f <= g { f } else { g }, bits: self.bits }
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        const KEEP: u32 = 64;
        if self.bits <= KEEP {
            return self.mant.to_f64().unwrap_or(f64::NAN) * (-(self.bits as f64)).exp2();
        }
        let drop = self.bits - KEEP;
        let top = &self.mant >> drop as usize;
        top.to_f64().unwrap_or(f64::NAN) * (-(KEEP as f64)).exp2()
    }

    /// Top 128 bits of the fractional part, i.e. `floor({x} * 2^128)`.
    pub fn to_u128_frac(&self) -> u128 {
        let f = self.frac().mant;
        let v = if self.bits >= 128 {
            f >> (self.bits - 128) as usize
        } else {
            f << (128 - self.bits) as usize
        };
        v.to_u128().expect("fraction fits 128 bits")
    }

    /// `pi` to `bits` fractional bits via Machin's formula.
    pub fn pi(bits: u32) -> Self {
        let guard = 32;
        let b = bits + guard;
        let atan_inv = |k: i64| -> BigInt {
            // atan(1/k) scaled by 2^b
            let one = pow2(b);
            let k = BigInt::from(k);
            let k2 = &k * &k;
            let mut term = one / &k;
            let mut sum = term.clone();
            let mut n = 1i64;
            while !term.is_zero() {
                term /= &k2;
                let t = &term / BigInt::from(2 * n + 1);
                if n % 2 == 1 {
                    sum -= t;
                } else {
                    sum += t;
                }
                n += 1;
            }
            sum
        };
        let v = BigInt::from(16) * atan_inv(5) - BigInt::from(4) * atan_inv(239);
        HpReal { mant: v >> guard as usize, bits }
    }

    /// Euler's number to `bits` fractional bits.
    pub fn e(bits: u32) -> Self {
        let guard = 32;
        let b = bits + guard;
        let mut term = pow2(b);
        let mut sum = term.clone();
        let mut k = 1u64;
        while !term.is_zero() {
            term /= BigInt::from(k);
            sum += &term;
            k += 1;
        }
        HpReal { mant: sum >> guard as usize, bits }
    }
}

impl PartialOrd for HpReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HpReal {
    fn cmp(&self, other: &Self) -> Ordering {
        self.check(other);
        self.mant.cmp(&other.mant)
    }
}

/// Point on the torus stored as a 128-bit binary fraction of a turn.
///
/// Wrapping addition and multiplication are exact modulo 1, so
/// `turn_mul(a, n)` equals `n` steps of `a` added to itself bit for bit.
pub type Turn = u128;

pub const TURN_SCALE: f64 = 340282366920938463463374607431768211456.0; // 2^128

#[inline]
pub fn turn_to_f64(t: Turn) -> f64 {
    // keep 53 significant bits; the conversion rounds to nearest
    (t >> 64) as f64 / 18446744073709551616.0 + ((t as u64) as f64) / TURN_SCALE
}

#[inline]
pub fn f64_to_turn(x: f64) -> Turn {
    let f = x - x.floor();
    let hi = (f * 18446744073709551616.0) as u64;
    let rem = f - hi as f64 / 18446744073709551616.0;
    let lo = (rem * TURN_SCALE).max(0.0) as u64;
    ((hi as u128) << 64).wrapping_add(lo as u128)
}

#[inline]
pub fn turn_mul(a: Turn, n: u64) -> Turn {
    a.wrapping_mul(n as u128)
}

/// `||t||` as a double.
#[inline]
pub fn turn_dist(t: Turn) -> f64 {
    let d = if t >> 127 == 0 { t } else { t.wrapping_neg() };
    turn_to_f64(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_match_f64() {
        assert!((HpReal::pi(256).to_f64() - std::f64::consts::PI).abs() < 1e-15);
        assert!((HpReal::e(256).to_f64() - std::f64::consts::E).abs() < 1e-15);
        assert!((HpReal::sqrt_int(&BigInt::from(2), 256).to_f64() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn frac_and_dist() {
        let x = HpReal::from_f64(-0.25, 64);
        assert_eq!(x.frac().to_f64(), 0.75);
        assert_eq!(x.dist_to_int().to_f64(), 0.25);
        assert_eq!(x.floor(), BigInt::from(-1));
        let y = HpReal::from_f64(2.7, 128);
        assert!((y.dist_to_int().to_f64() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn turn_roundtrip() {
        for &x in &[0.0, 0.1, 0.5, 0.999999, 0.123456789012345] {
            assert!((turn_to_f64(f64_to_turn(x)) - x).abs() < 1e-16);
        }
        let a = HpReal::sqrt_int(&BigInt::from(2), 256).frac().to_u128_frac();
        assert!((turn_to_f64(a) - (2f64.sqrt() - 1.0)).abs() < 3e-16);
        let mut acc: Turn = 0;
        for _ in 0..1000 {
            acc = acc.wrapping_add(a);
        }
        assert_eq!(acc, turn_mul(a, 1000));
    }
}
