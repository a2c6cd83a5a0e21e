//! Exact arithmetic in real quadratic fields and a small expression parser.
//!
//! Expressions such as `(sqrt(5)-1)/2`, `sqrt2`, `3/7` or `e` evaluate to a
//! [`Real`]: exact when the value lives in some `Q(sqrt d)`, otherwise a
//! fixed-point approximation carrying an error bound in ulps.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::hp::HpReal;

/// `r + s * sqrt(d)`, with `d` squarefree-reduced and not a perfect square.
/// `d == 0` marks a rational value (then `s == 0`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quadratic {
    pub r: BigRational,
    pub s: BigRational,
    pub d: BigInt,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Splits `n = k^2 * m` removing small square factors.
fn square_reduce(n: &BigInt) -> (BigInt, BigInt) {
    let mut m = n.clone();
    let mut k = BigInt::one();
    let mut p = BigInt::from(2);
    let limit = BigInt::from(100_000);
    while &p * &p <= m && p < limit {
        let p2 = &p * &p;
        while (&m % &p2).is_zero() {
            m /= &p2;
            k *= &p;
        }
        p += 1;
    }
    let r = m.sqrt();
    if &r * &r == m {
        k *= r;
        m = BigInt::one();
    }
    (k, m)
}

impl Quadratic {
    pub fn rational(q: BigRational) -> Self {
        Quadratic { r: q, s: rat(0), d: BigInt::zero() }
    }

    pub fn from_int(n: i64) -> Self {
        Self::rational(rat(n))
    }

    /// `sqrt(q)` for a non-negative rational; rational when `q` is a square.
    pub fn sqrt_rational(q: &BigRational) -> Result<Self> {
        if q.is_negative() {
            return Err(Error::Parse("square root of a negative number".into()));
        }
        // sqrt(a/b) = sqrt(a*b)/b
        let a = q.numer() * q.denom();
        let (k, m) = square_reduce(&a);
        let coef = BigRational::new(k, q.denom().clone());
        if m.is_one() || m.is_zero() {
            Ok(Self::rational(if m.is_zero() { rat(0) } else { coef }))
        } else {
            Ok(Quadratic { r: rat(0), s: coef, d: m })
        }
    }

    pub fn is_rational(&self) -> bool {
        self.s.is_zero()
    }

    fn normalize(mut self) -> Self {
        if self.s.is_zero() {
            self.d = BigInt::zero();
        }
        self
    }

    fn field(&self, other: &Self) -> Option<BigInt> {
        match (self.is_rational(), other.is_rational()) {
            (true, true) => Some(BigInt::zero()),
            (true, false) => Some(other.d.clone()),
            (false, true) => Some(self.d.clone()),
            (false, false) => (self.d == other.d).then(|| self.d.clone()),
        }
    }

    pub fn add(&self, o: &Self) -> Option<Self> {
        let d = self.field(o)?;
        Some(Quadratic { r: &self.r + &o.r, s: &self.s + &o.s, d }.normalize())
    }

    pub fn neg(&self) -> Self {
        Quadratic { r: -&self.r, s: -&self.s, d: self.d.clone() }
    }

    pub fn mul(&self, o: &Self) -> Option<Self> {
        let d = self.field(o)?;
        let dd = BigRational::from_integer(d.clone());
        Some(
            Quadratic {
                r: &self.r * &o.r + &self.s * &o.s * dd,
                s: &self.r * &o.s + &self.s * &o.r,
                d,
            }
            .normalize(),
        )
    }

    pub fn inv(&self) -> Option<Self> {
        let dd = BigRational::from_integer(self.d.clone());
        let norm = &self.r * &self.r - &self.s * &self.s * dd;
        if norm.is_zero() {
            return None;
        }
        Some(Quadratic { r: &self.r / &norm, s: -&self.s / &norm, d: self.d.clone() }.normalize())
    }

    /// Integer form `(a + b sqrt d) / c` with `c > 0`.
    pub fn integer_form(&self) -> (BigInt, BigInt, BigInt) {
        let c = self.r.denom().lcm(self.s.denom());
        let a = (&self.r * BigRational::from_integer(c.clone())).to_integer();
        let b = (&self.s * BigRational::from_integer(c.clone())).to_integer();
        (a, b, c)
    }

    /// Exact floor of `(a + b sqrt d) / c * 2^shift`.
    pub fn floor_scaled(&self, shift: u32) -> BigInt {
        let (a, b, c) = self.integer_form();
        let a = a << shift as usize;
        let b = b << shift as usize;
        if b.is_zero() {
            return a.div_floor(&c);
        }
        // b sqrt d lies strictly inside (lo, lo + 1)
        let m = (&b * &b * &self.d).sqrt();
        let lo = if b.is_positive() { m } else { -m - 1 };
        (a + lo).div_floor(&c)
    }

    pub fn floor(&self) -> BigInt {
        self.floor_scaled(0)
    }

    pub fn to_hp(&self, bits: u32) -> HpReal {
        HpReal::from_mantissa(self.floor_scaled(bits), bits)
    }

    pub fn to_f64(&self) -> f64 {
        self.to_hp(128).to_f64()
    }

    pub fn frac(&self) -> Self {
        let f = self.floor();
        Quadratic { r: &self.r - BigRational::from_integer(f), s: self.s.clone(), d: self.d.clone() }
    }
}

/// A parsed real: exact in a quadratic field, or approximate.
#[derive(Clone, Debug, PartialEq)]
pub enum Real {
    Exact(Quadratic),
    /// True value lies within `err_ulps * 2^-bits` of `value`.
    Approx { value: HpReal, err_ulps: u64 },
}

impl Real {
    pub fn from_int(n: i64) -> Self {
        Real::Exact(Quadratic::from_int(n))
    }

    pub fn to_hp(&self, bits: u32) -> HpReal {
        match self {
            Real::Exact(q) => q.to_hp(bits),
            Real::Approx { value, .. } => value.with_bits(bits),
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.to_hp(128).to_f64()
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, Real::Exact(q) if q.is_rational())
    }

    fn approx(&self, bits: u32) -> (HpReal, f64) {
        match self {
            Real::Exact(q) => (q.to_hp(bits), 1.0),
            Real::Approx { value, err_ulps } => {
                if value.bits() == bits {
                    (value.clone(), *err_ulps as f64)
                } else {
                    let scale = (bits as f64 - value.bits() as f64).exp2();
                    (value.with_bits(bits), *err_ulps as f64 * scale + 1.0)
                }
            }
        }
    }

    fn mk(value: HpReal, err: f64) -> Self {
        Real::Approx { value, err_ulps: err.ceil().min(u64::MAX as f64) as u64 }
    }

    pub fn add(&self, o: &Self, bits: u32) -> Self {
        if let (Real::Exact(a), Real::Exact(b)) = (self, o) {
            if let Some(c) = a.add(b) {
                return Real::Exact(c);
            }
        }
        let (a, ea) = self.approx(bits);
        let (b, eb) = o.approx(bits);
        Self::mk(a.add(&b), ea + eb)
    }

    pub fn neg(&self) -> Self {
        match self {
            Real::Exact(q) => Real::Exact(q.neg()),
            Real::Approx { value, err_ulps } => Real::Approx { value: value.neg(), err_ulps: err_ulps + 1 },
        }
    }

    pub fn sub(&self, o: &Self, bits: u32) -> Self {
        self.add(&o.neg(), bits)
    }

    pub fn mul(&self, o: &Self, bits: u32) -> Self {
        if let (Real::Exact(a), Real::Exact(b)) = (self, o) {
            if let Some(c) = a.mul(b) {
                return Real::Exact(c);
            }
        }
        let (a, ea) = self.approx(bits);
        let (b, eb) = o.approx(bits);
        let ulp = (-(bits as f64)).exp2();
        let ma = a.to_f64().abs();
        let mb = b.to_f64().abs();
        let err = ma * eb + mb * ea + ea * eb * ulp + 1.0;
        Self::mk(a.mul(&b), err * (1.0 + 1e-9))
    }

    pub fn div(&self, o: &Self, bits: u32) -> Result<Self> {
        if let Real::Exact(b) = o {
            if b.r.is_zero() && b.s.is_zero() {
                return Err(Error::Parse("division by zero".into()));
            }
            if let Some(binv) = b.inv() {
                if let Real::Exact(a) = self {
                    if let Some(c) = a.mul(&binv) {
                        return Ok(Real::Exact(c));
                    }
                }
                return Ok(self.mul(&Real::Exact(binv), bits));
            }
        }
        let (a, ea) = self.approx(bits);
        let (b, eb) = o.approx(bits);
        let ulp = (-(bits as f64)).exp2();
        let mb = b.to_f64().abs();
        if mb <= eb * ulp * 2.0 {
            return Err(Error::Parse("division by a value indistinguishable from zero".into()));
        }
        let ma = a.to_f64().abs();
        let err = (ea + ma / mb * eb) / (mb - eb * ulp) + 2.0;
        Ok(Self::mk(a.div(&b), err * (1.0 + 1e-9)))
    }

    pub fn sqrt(&self, bits: u32) -> Result<Self> {
        if let Real::Exact(q) = self {
            if q.is_rational() {
                return Ok(Real::Exact(Quadratic::sqrt_rational(&q.r)?));
            }
        }
        let (a, ea) = self.approx(bits);
        if a.mantissa().is_negative() {
            return Err(Error::Parse("square root of a negative number".into()));
        }
        let m = (a.mantissa() << bits as usize).sqrt();
        let root = HpReal::from_mantissa(m, bits);
        let x = a.to_f64().max((-(bits as f64)).exp2());
        let ulp = (-(bits as f64)).exp2();
        let err = (ea * ulp).sqrt() / ulp + ea / (2.0 * x.sqrt()) + 2.0;
        Ok(Self::mk(root, err.min(u64::MAX as f64)))
    }

    pub fn frac(&self, bits: u32) -> Self {
        match self {
            Real::Exact(q) => Real::Exact(q.frac()),
            Real::Approx { value, err_ulps } => Real::Approx { value: value.with_bits(bits).frac(), err_ulps: *err_ulps },
        }
    }

    /// Fractional part as a 128-bit turn.
    pub fn to_turn(&self) -> u128 {
        self.to_hp(192).to_u128_frac()
    }
}

struct Parser<'a> {
    s: &'a [u8],
    i: usize,
    bits: u32,
}

impl<'a> Parser<'a> {
    fn ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.i).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn err<T>(&self, msg: &str) -> Result<T> {
        Err(Error::Parse(format!("{msg} at offset {} in {:?}", self.i, String::from_utf8_lossy(self.s))))
    }

    fn expr(&mut self) -> Result<Real> {
        let mut v = self.term()?;
        loop {
            if self.eat(b'+') {
                let t = self.term()?;
                v = v.add(&t, self.bits);
            } else if self.eat(b'-') {
                let t = self.term()?;
                v = v.sub(&t, self.bits);
            } else {
                return Ok(v);
            }
        }
    }

    fn term(&mut self) -> Result<Real> {
        let mut v = self.unary()?;
        loop {
            if self.eat(b'*') {
                let t = self.unary()?;
                v = v.mul(&t, self.bits);
            } else if self.eat(b'/') {
                let t = self.unary()?;
                v = v.div(&t, self.bits)?;
            } else {
                return Ok(v);
            }
        }
    }

    fn unary(&mut self) -> Result<Real> {
        if self.eat(b'-') {
            return Ok(self.unary()?.neg());
        }
        if self.eat(b'+') {
            return self.unary();
        }
        let base = self.atom()?;
        if self.eat(b'^') {
            let e = self.atom()?;
            let n = match &e {
                Real::Exact(q) if q.is_rational() && q.r.is_integer() => q.r.to_integer().to_i64(),
                _ => None,
            };
            let n = match n {
                Some(n) if (0..=64).contains(&n) => n,
                _ => return self.err("exponent must be an integer in 0..=64"),
            };
            let mut acc = Real::from_int(1);
            for _ in 0..n {
                acc = acc.mul(&base, self.bits);
            }
            return Ok(acc);
        }
        Ok(base)
    }

    fn number(&mut self) -> Result<Real> {
        let start = self.i;
        while self.i < self.s.len() && (self.s[self.i].is_ascii_digit() || self.s[self.i] == b'.') {
            self.i += 1;
        }
        let lit = std::str::from_utf8(&self.s[start..self.i]).unwrap();
        let mut exp10: i64 = 0;
        if self.i < self.s.len() && (self.s[self.i] == b'e' || self.s[self.i] == b'E') {
            let save = self.i;
            self.i += 1;
            let es = self.i;
            if self.i < self.s.len() && (self.s[self.i] == b'+' || self.s[self.i] == b'-') {
                self.i += 1;
            }
            let ds = self.i;
            while self.i < self.s.len() && self.s[self.i].is_ascii_digit() {
                self.i += 1;
            }
            if ds == self.i {
                self.i = save;
            } else {
                exp10 = std::str::from_utf8(&self.s[es..self.i]).unwrap().parse().map_err(|_| Error::Parse("bad exponent".into()))?;
            }
        }
        let (int, frac) = match lit.split_once('.') {
            Some((a, b)) => (a, b),
            None => (lit, ""),
        };
        if int.is_empty() && frac.is_empty() || frac.contains('.') {
            return self.err("malformed number");
        }
        let digits = format!("{int}{frac}");
        let n: BigInt = digits.parse().map_err(|_| Error::Parse(format!("malformed number {lit:?}")))?;
        let e = exp10 - frac.len() as i64;
        if e.abs() > 4000 {
            return self.err("exponent out of range");
        }
        let ten = BigInt::from(10);
        let q = if e >= 0 {
            BigRational::from_integer(n * num_traits::pow(ten, e as usize))
        } else {
            BigRational::new(n, num_traits::pow(ten, (-e) as usize))
        };
        Ok(Real::Exact(Quadratic::rational(q)))
    }

    fn atom(&mut self) -> Result<Real> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(b'(') => {
                self.i += 1;
                let v = self.expr()?;
                if !self.eat(b')') {
                    return self.err("expected ')'");
                }
                Ok(v)
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.i;
                while self.i < self.s.len() && self.s[self.i].is_ascii_alphanumeric() {
                    self.i += 1;
                }
                let id = std::str::from_utf8(&self.s[start..self.i]).unwrap().to_ascii_lowercase();
                let bits = self.bits;
                if self.peek() == Some(b'(') {
                    self.i += 1;
                    let arg = self.expr()?;
                    if !self.eat(b')') {
                        return self.err("expected ')'");
                    }
                    return match id.as_str() {
                        "sqrt" => arg.sqrt(bits),
                        "frac" => Ok(arg.frac(bits)),
                        _ => self.err(&format!("unknown function {id:?}")),
                    };
                }
                let sqrt5 = || Real::Exact(Quadratic::sqrt_rational(&rat(5)).unwrap());
                match id.as_str() {
                    "e" => Ok(Real::Approx { value: HpReal::e(bits), err_ulps: 2 }),
                    "pi" => Ok(Real::Approx { value: HpReal::pi(bits), err_ulps: 2 }),
                    "phi" => Ok(sqrt5().add(&Real::from_int(1), bits).div(&Real::from_int(2), bits)?),
                    "golden" => Ok(sqrt5().sub(&Real::from_int(1), bits).div(&Real::from_int(2), bits)?),
                    s if s.starts_with("sqrt") && s.len() > 4 && s[4..].bytes().all(|b| b.is_ascii_digit()) => {
                        let n: BigInt = s[4..].parse().unwrap();
                        Ok(Real::Exact(Quadratic::sqrt_rational(&BigRational::from_integer(n))?))
                    }
                    _ => self.err(&format!("unknown constant {id:?}")),
                }
            }
            _ => self.err("unexpected token"),
        }
    }
}

/// Parses a real-valued expression.
pub fn parse_real(src: &str, bits: u32) -> Result<Real> {
    let mut p = Parser { s: src.as_bytes(), i: 0, bits: bits.max(64) };
    let v = p.expr()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(v)
}

/// Parses a comma-separated list of expressions at nesting depth 0.
pub fn parse_real_list(src: &str, bits: u32) -> Result<Vec<Real>> {
    split_top_level(src).iter().map(|s| parse_real(s, bits)).collect()
}

pub(crate) fn split_top_level(src: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in src.chars() {
        match ch {
            '(' | '[' => {
                depth += 1;
                cur.push(ch)
            }
            ')' | ']' => {
                depth -= 1;
                cur.push(ch)
            }
            ',' | ';' if depth == 0 => out.push(std::mem::take(&mut cur).trim().to_string()),
            _ => cur.push(ch),
        }
    }
    if !cur.trim().is_empty() || !out.is_empty() {
        out.push(cur.trim().to_string());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_is_exact() {
        let g = parse_real("(sqrt(5)-1)/2", 256).unwrap();
        assert_eq!(g, parse_real("golden", 256).unwrap());
        assert!((g.to_f64() - 0.6180339887498949).abs() < 1e-15);
        match g {
            Real::Exact(q) => assert_eq!(q.d, BigInt::from(5)),
            _ => panic!("expected exact"),
        }
    }

    #[test]
    fn sqrt_reduction() {
        let a = parse_real("sqrt(8) - 2*sqrt2", 256).unwrap();
        assert!(a.is_rational());
        assert_eq!(a.to_f64(), 0.0);
        let b = parse_real("sqrt(9/4)", 256).unwrap();
        assert_eq!(b.to_f64(), 1.5);
    }

    #[test]
    fn floor_of_negative_surd() {
        let x = parse_real("1 - sqrt2", 256).unwrap();
        match x {
            Real::Exact(q) => assert_eq!(q.floor(), BigInt::from(-1)),
            _ => panic!(),
        }
    }

    #[test]
    fn approx_mixing() {
        let x = parse_real("sqrt2 + sqrt3", 256).unwrap();
        assert!(matches!(x, Real::Approx { .. }));
        assert!((x.to_f64() - (2f64.sqrt() + 3f64.sqrt())).abs() < 1e-15);
        let e = parse_real("e - 2", 256).unwrap();
        assert!((e.to_f64() - (std::f64::consts::E - 2.0)).abs() < 1e-15);
    }

    #[test]
    fn decimals_and_lists() {
        let v = parse_real_list("1.5, 5/3", 128).unwrap();
        assert_eq!(v.len(), 2);
        assert_eq!(v[0].to_f64(), 1.5);
        assert!((v[1].to_f64() - 5.0 / 3.0).abs() < 1e-15);
        assert!(parse_real("1e-3", 64).unwrap().to_f64() == 1e-3);
        assert!(parse_real("2 +", 64).is_err());
        assert!(parse_real("sqrt(-1)", 64).is_err());
    }
}
