//! Continued fractions, convergents, Ostrowski digits and approximation
//! margins for numbers in `(0, 1)`.
//!
//! Convention: `alpha = 1/(a1 + 1/(a2 + ...))`, `q0 = 1`, `q1 = a1`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hp::HpReal;
use crate::sum::NeumaierSum;
use crate::surd::{Quadratic, Real};

#[derive(Clone, Debug)]
enum Engine {
    /// `(p + sqrt(disc)) / q`, with `q | disc - p^2`.
    Surd { p: BigInt, q: BigInt, disc: BigInt, seen: HashMap<(BigInt, BigInt), usize> },
    /// Endpoints `lo_n/lo_d`, `hi_n/hi_d` of an interval known to contain the value.
    Interval { lo: (BigInt, BigInt), hi: (BigInt, BigInt) },
    Periodic,
    Stopped,
}

/// Lazily extended continued fraction of the fractional part of a real.
#[derive(Clone, Debug)]
pub struct ContinuedFraction {
    value: HpReal,
    quotients: Vec<BigInt>,
    engine: Engine,
    period: Option<(usize, usize)>,
    exhausted_at: Option<usize>,
    bits: u32,
}

impl ContinuedFraction {
    pub fn new(src: &Real, bits: u32) -> Result<Self> {
        let frac = src.frac(bits);
        let value = frac.to_hp(bits);
        let engine = match &frac {
            Real::Exact(q) if q.is_rational() => return Err(Error::RationalInput { at: 0 }),
            Real::Exact(q) => surd_engine(q)?,
            Real::Approx { value, err_ulps } => {
                let den = BigInt::one() << value.bits() as usize;
                let e = BigInt::from(*err_ulps);
                let lo = (value.mantissa() - &e).max(BigInt::zero());
                let hi = (value.mantissa() + &e).min(den.clone());
                if lo.is_zero() || hi == den {
                    return Err(Error::PrecisionExhausted { depth: 0, reason: "value too close to an integer".into() });
                }
                Engine::Interval { lo: (lo, den.clone()), hi: (hi, den) }
            }
        };
        Ok(ContinuedFraction { value, quotients: Vec::new(), engine, period: None, exhausted_at: None, bits })
    }

    pub fn from_str(expr: &str, bits: u32) -> Result<Self> {
        Self::new(&crate::surd::parse_real(expr, bits)?, bits)
    }

    pub fn value(&self) -> &HpReal {
        &self.value
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// `a1, a2, ...` computed so far.
    pub fn quotients(&self) -> &[BigInt] {
        &self.quotients
    }

    /// `(start, length)` of the repeating block, 0-based into `quotients`.
    pub fn period(&self) -> Option<(usize, usize)> {
        self.period
    }

    /// Depth at which interval arithmetic stopped being conclusive.
    pub fn precision_exhausted(&self) -> Option<usize> {
        self.exhausted_at
    }

    /// Computes quotients up to `depth`, returning how many are available.
    pub fn extend(&mut self, depth: usize) -> Result<usize> {
        while self.quotients.len() < depth {
            match self.step()? {
                Some(a) => self.quotients.push(a),
                None => break,
            }
        }
        Ok(self.quotients.len())
    }

    fn step(&mut self) -> Result<Option<BigInt>> {
        let n = self.quotients.len();
        match &mut self.engine {
            Engine::Periodic => {
                let (s, l) = self.period.unwrap();
                Ok(Some(self.quotients[s + (n - s) % l].clone()))
            }
            Engine::Stopped => Ok(None),
            Engine::Surd { p, q, disc, seen } => {
                if let Some(&first) = seen.get(&(p.clone(), q.clone())) {
                    self.period = Some((first, n - first));
                    self.engine = Engine::Periodic;
                    return self.step();
                }
                seen.insert((p.clone(), q.clone()), n);
                let s = disc.sqrt();
                let a = if q.is_positive() {
                    (&*p + &s).div_floor(q)
                } else {
                    (-&*p - &s - BigInt::one()).div_floor(&-&*q)
                };
                let np = &a * &*q - &*p;
                let nq = (&*disc - &np * &np) / &*q;
                *p = np;
                *q = nq;
                Ok(Some(a))
            }
            Engine::Interval { lo, hi } => {
                // Gauss map applied to both endpoints: x -> 1/x - floor(1/x)
                let inv = |(n, d): &(BigInt, BigInt)| -> (BigInt, BigInt) { (d.clone(), n.clone()) };
                let l = inv(lo);
                let h = inv(hi);
                let al = l.0.div_floor(&l.1);
                let ah = h.0.div_floor(&h.1);
                let limit = BigInt::one() << (self.bits / 2) as usize;
                if al != ah {
                    self.exhausted_at = Some(n);
                    self.engine = Engine::Stopped;
                    return Ok(None);
                }
                if al > limit {
                    return Err(Error::RationalInput { at: n });
                }
                let rl = &l.0 - &al * &l.1;
                let rh = &h.0 - &ah * &h.1;
                if rl.is_zero() || rh.is_zero() {
                    self.exhausted_at = Some(n + 1);
                    self.engine = Engine::Stopped;
                    return Ok(Some(al));
                }
                *lo = (rl, l.1);
                *hi = (rh, h.1);
                Ok(Some(al))
            }
        }
    }
}

fn surd_engine(x: &Quadratic) -> Result<Engine> {
    // x = (a + b sqrt d)/c with c > 0, in (0, 1)
    let (a, b, c) = x.integer_form();
    let (mut p, mut q, mut disc) = if b.is_positive() {
        (a, c, &b * &b * &x.d)
    } else {
        (-a, -c, &b * &b * &x.d)
    };
    if !(&disc - &p * &p).is_multiple_of(&q) {
        let aq = q.abs();
        p *= &aq;
        disc = disc * &aq * &aq;
        q *= aq;
    }
    // first complete quotient 1/x = (-p + sqrt disc) / ((disc - p^2)/q)
    let nq = (&disc - &p * &p) / &q;
    p = -p;
    q = nq;
    if q.is_zero() {
        return Err(Error::RationalInput { at: 0 });
    }
    Ok(Engine::Surd { p, q, disc, seen: HashMap::new() })
}

/// Convergent numerators and denominators.
#[derive(Clone, Debug, Serialize)]
pub struct ConvergentTable {
    /// `a1..a_depth`.
    pub quotients: Vec<BigInt>,
    /// `p_0..p_depth`.
    pub p: Vec<BigInt>,
    /// `q_0..q_depth`.
    pub q: Vec<BigInt>,
}

impl ConvergentTable {
    pub fn from_quotients(quotients: &[BigInt]) -> Self {
        let mut p = vec![BigInt::zero()];
        let mut q = vec![BigInt::one()];
        if let Some(a1) = quotients.first() {
            p.push(BigInt::one());
            q.push(a1.clone());
        }
        for a in quotients.iter().skip(1) {
            let n = q.len();
            p.push(a * &p[n - 1] + &p[n - 2]);
            q.push(a * &q[n - 1] + &q[n - 2]);
        }
        ConvergentTable { quotients: quotients.to_vec(), p, q }
    }

    /// Builds the table and checks `q_{n+1} ||q_n alpha|| in [1/2, 1]`.
    ///
    /// The lower bound is checked only where `q_{n+1} > q_n`; at `n = 0`
    /// with `a1 = 1` the two denominators coincide and the bound need not hold.
    pub fn build(cf: &mut ContinuedFraction, depth: usize) -> Result<Self> {
        let got = cf.extend(depth)?;
        if got < depth {
            return Err(Error::PrecisionExhausted {
                depth: got,
                reason: format!("only {got} quotients are certified at {} bits", cf.bits()),
            });
        }
        let t = Self::from_quotients(&cf.quotients()[..depth]);
        for (n, c) in t.chain_products(cf.value()).iter().enumerate() {
            let lower_applies = t.q[n + 1] > t.q[n];
            if *c > 1.0 + 1e-12 || (lower_applies && *c < 0.5 - 1e-12) {
                return Err(Error::PrecisionExhausted {
                    depth: n,
                    reason: format!("convergent chain value {c} outside [1/2, 1]"),
                });
            }
        }
        Ok(t)
    }

    pub fn depth(&self) -> usize {
        self.quotients.len()
    }

    /// `q_{n+1} * ||q_n alpha||` for `n = 0..depth-1`.
    pub fn chain_products(&self, alpha: &HpReal) -> Vec<f64> {
        (0..self.depth())
            .map(|n| {
                let d = alpha.mul_int(&self.q[n]).dist_to_int();
                d.mul_int(&self.q[n + 1]).to_f64()
            })
            .collect()
    }

    /// Denominators as `u64`, stopping at the first that overflows.
    pub fn q_u64(&self) -> Vec<u64> {
        self.q.iter().map_while(|q| q.to_u64()).collect()
    }
}

/// Greedy Ostrowski digits `b_0..b_m` with `n = sum b_k q_k`.
pub fn ostrowski_digits(n: u64, table: &ConvergentTable) -> Result<Vec<u64>> {
    let nn = BigInt::from(n);
    let m = match table.q.iter().rposition(|q| *q <= nn) {
        Some(m) => m,
        None => return Ok(vec![]),
    };
    if m + 1 >= table.q.len() {
        return Err(Error::Depth { needed: n.to_string(), available: table.q.last().unwrap().to_string() });
    }
    let mut rem = n;
    let mut digits = vec![0u64; m + 1];
    for k in (0..=m).rev() {
        let qk = table.q[k].to_u64().unwrap();
        digits[k] = rem / qk;
        rem %= qk;
    }
    debug_assert_eq!(rem, 0);
    Ok(digits)
}

#[derive(Clone, Debug, Serialize)]
pub struct BadMargin {
    /// `min |q| * ||q theta - x||` over `1 <= |q| <= q_max`.
    pub margin: f64,
    pub argmin_q: i64,
    pub q_max: u64,
}

/// Inhomogeneous approximation margin; `x = 0` gives the homogeneous one.
pub fn bad_margin(theta: &HpReal, x: &HpReal, q_max: u64) -> BadMargin {
    assert!(q_max >= 1, "q_max must be positive");
    let bits = theta.bits();
    let one = BigInt::one() << bits as usize;
    let half = &one >> 1usize;
    let t = theta.frac().mantissa().clone();
    let xm = x.with_bits(bits).frac().mantissa().clone();
    let dist = |v: &BigInt| -> f64 {
        let d = if *v <= half { v.clone() } else { &one - v };
        HpReal::from_mantissa(d, bits).to_f64()
    };
    // acc_plus = q t - x, acc_minus = -q t - x, both reduced mod 1
    let mut plus = (&one - &xm).mod_floor(&one);
    let mut minus = plus.clone();
    let mut best = f64::INFINITY;
    let mut arg = 0i64;
    for q in 1..=q_max {
        plus += &t;
        if plus >= one {
            plus -= &one;
        }
        minus -= &t;
        if minus.is_negative() {
            minus += &one;
        }
        for (sign, acc) in [(1i64, &plus), (-1i64, &minus)] {
            let v = q as f64 * dist(acc);
            if v < best {
                best = v;
                arg = sign * q as i64;
            }
        }
    }
    BadMargin { margin: best, argmin_q: arg, q_max }
}

#[derive(Clone, Debug, Serialize)]
pub struct TypeProbe {
    pub eta: f64,
    pub eps: f64,
    /// `min_k k^(eta - eps) ||k alpha||`.
    pub inf_below: f64,
    /// `min_k k^(eta + eps) ||k alpha||`.
    pub inf_above: f64,
    pub argmin_below: u64,
    pub argmin_above: u64,
}

pub fn type_probe(alpha: &HpReal, q_max: u64, eta: f64, eps: f64) -> TypeProbe {
    let mut r = TypeProbe { eta, eps, inf_below: f64::INFINITY, inf_above: f64::INFINITY, argmin_below: 0, argmin_above: 0 };
    for_each_dist(alpha, q_max, |k, d| {
        let kf = k as f64;
        let lo = kf.powf(eta - eps) * d;
        let hi = kf.powf(eta + eps) * d;
        if lo < r.inf_below {
            r.inf_below = lo;
            r.argmin_below = k;
        }
        if hi < r.inf_above {
            r.inf_above = hi;
            r.argmin_above = k;
        }
    });
    r
}

/// `sum_{k=1}^{terms} 1 / (k^(eta + delta) ||k alpha||)`.
pub fn series_partial_sum(alpha: &HpReal, eta: f64, delta: f64, terms: u64) -> f64 {
    let mut s = NeumaierSum::new();
    for_each_dist(alpha, terms, |k, d| s.add(1.0 / ((k as f64).powf(eta + delta) * d)));
    s.value()
}

/// Calls `f(k, ||k alpha||)` for `k = 1..=k_max` using exact integer steps.
pub fn for_each_dist(alpha: &HpReal, k_max: u64, mut f: impl FnMut(u64, f64)) {
    let bits = alpha.bits();
    let one = BigInt::one() << bits as usize;
    let half = &one >> 1usize;
    let t = alpha.frac().mantissa().clone();
    let mut acc = BigInt::zero();
    for k in 1..=k_max {
        acc += &t;
        if acc >= one {
            acc -= &one;
        }
        let d = if acc <= half { acc.clone() } else { &one - &acc };
        f(k, HpReal::from_mantissa(d, bits).to_f64());
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hp::DEFAULT_BITS;

    fn cf(expr: &str, depth: usize) -> ContinuedFraction {
        let mut c = ContinuedFraction::from_str(expr, DEFAULT_BITS).unwrap();
        c.extend(depth).unwrap();
        c
    }

    fn ints(v: &[BigInt]) -> Vec<i64> {
        v.iter().map(|x| x.to_i64().unwrap()).collect()
    }

    #[test]
    fn golden_all_ones() {
        let c = cf("(sqrt(5)-1)/2", 50);
        assert!(ints(c.quotients()).iter().all(|&a| a == 1));
        assert_eq!(c.period(), Some((0, 1)));
    }

    #[test]
    fn sqrt2_all_twos() {
        let c = cf("sqrt2 - 1", 40);
        assert!(ints(c.quotients()).iter().all(|&a| a == 2));
    }

    #[test]
    fn sqrt3_period() {
        let c = cf("sqrt(3)-1", 12);
        assert_eq!(ints(c.quotients()), vec![1, 2, 1, 2, 1, 2, 1, 2, 1, 2, 1, 2]);
        assert_eq!(c.period(), Some((0, 2)));
    }

    #[test]
    fn integer_part_discarded() {
        assert_eq!(ints(cf("sqrt2", 5).quotients()), vec![2; 5]);
    }

    #[test]
    fn rational_rejected() {
        assert_eq!(ContinuedFraction::from_str("3/7", 256).unwrap_err(), Error::RationalInput { at: 0 });
        assert!(matches!(ContinuedFraction::from_str("0.25", 256), Err(Error::RationalInput { .. })));
    }

    #[test]
    fn e_quotients_until_precision_runs_out() {
        let mut c = ContinuedFraction::from_str("e", 256).unwrap();
        let got = c.extend(500).unwrap();
        assert!(got > 40 && got < 500, "got {got}");
        assert!(c.precision_exhausted().is_some());
        let want = [1i64, 2, 1, 1, 4, 1, 1, 6, 1, 1, 8];
        assert_eq!(&ints(c.quotients())[..want.len()], &want);
    }

    #[test]
    fn golden_denominators() {
        let mut c = ContinuedFraction::from_str("golden", 256).unwrap();
        let t = ConvergentTable::build(&mut c, 10).unwrap();
        assert_eq!(ints(&t.q[..6]), vec![1, 1, 2, 3, 5, 8]);
        let mut c = ContinuedFraction::from_str("sqrt2-1", 256).unwrap();
        let t = ConvergentTable::build(&mut c, 10).unwrap();
        assert_eq!(ints(&t.q[..4]), vec![1, 2, 5, 12]);
        assert_eq!(ints(&t.p[..4]), vec![0, 1, 2, 5]);
    }

    #[test]
    fn ostrowski_example() {
        let mut c = ContinuedFraction::from_str("golden", 256).unwrap();
        let t = ConvergentTable::build(&mut c, 12).unwrap();
        let b = ostrowski_digits(4, &t).unwrap();
        assert_eq!(b, vec![0, 1, 0, 1]);
        assert!(ostrowski_digits(1_000_000, &t).is_err());
    }

    #[test]
    fn golden_margin_matches_brute_force() {
        let g = HpReal::from_f64((5f64.sqrt() - 1.0) / 2.0, 256);
        let bm = bad_margin(&g, &HpReal::zero(256), 2000);
        // oracle in plain doubles
        let a = (5f64.sqrt() - 1.0) / 2.0;
        let brute = (1..=2000).map(|q| q as f64 * ((q as f64 * a) - (q as f64 * a).round()).abs()).fold(f64::INFINITY, f64::min);
        assert!((bm.margin - brute).abs() < 1e-9);
        // attained at q = 1: 1 - golden
        assert!((bm.margin - (1.5 - 5f64.sqrt() / 2.0)).abs() < 1e-15);
        assert_eq!(bm.argmin_q.abs(), 1);
    }

    #[test]
    fn series_grows_slowly_for_golden() {
        let g = ContinuedFraction::from_str("golden", 256).unwrap();
        let s1 = series_partial_sum(g.value(), 1.0, 1.0, 1000);
        let s2 = series_partial_sum(g.value(), 1.0, 1.0, 100_000);
        assert!(s2 > s1 && s2 - s1 < 0.1 * s1, "{s1} {s2}");
    }
}
