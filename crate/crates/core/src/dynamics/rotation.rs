//! Rotation vectors and exact orbit arithmetic.

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hp::{turn_dist, turn_mul, turn_to_f64, HpReal, Turn};
use crate::surd::{parse_real_list, Real};

#[derive(Clone, Debug, PartialEq)]
pub struct RotationVector {
    comps: Vec<HpReal>,
    turns: [Turn; 2],
    exprs: Vec<String>,
    sources: Vec<Real>,
}

impl RotationVector {
    pub fn new(reals: &[Real], bits: u32) -> Result<Self> {
        if reals.is_empty() || reals.len() > 2 {
            return Err(Error::Config(format!("rotation vector needs 1 or 2 components, got {}", reals.len())));
        }
        if let Some(i) = reals.iter().position(Real::is_rational) {
            return Err(Error::Config(format!("rotation component {} is rational", i + 1)));
        }
        let comps: Vec<HpReal> = reals.iter().map(|r| r.frac(bits).to_hp(bits)).collect();
        let mut turns = [0; 2];
        for (t, r) in turns.iter_mut().zip(reals) {
            *t = r.to_turn();
        }
        let exprs = comps.iter().map(|c| format!("{:.17}", c.to_f64())).collect();
        Ok(RotationVector { comps, turns, exprs, sources: reals.to_vec() })
    }

    /// Parses `"sqrt2-1, sqrt3-1"`-style input.
    pub fn parse(src: &str, bits: u32) -> Result<Self> {
        let mut v = Self::new(&parse_real_list(src, bits)?, bits)?;
        v.exprs = crate::surd::split_top_level(src);
        Ok(v)
    }

    pub fn rho(&self) -> usize {
        self.comps.len()
    }

    pub fn component(&self, i: usize) -> &HpReal {
        &self.comps[i]
    }

    pub fn source(&self, i: usize) -> &Real {
        &self.sources[i]
    }

    pub fn exprs(&self) -> &[String] {
        &self.exprs
    }

    /// Components as 128-bit turns; the unused slot is 0 for `rho = 1`.
    pub fn turns(&self) -> [Turn; 2] {
        self.turns
    }

    pub fn as_f64(&self) -> [f64; 2] {
        self.turns.map(turn_to_f64)
    }

    /// Searches for `|k0 + k1 a1 + k2 a2| < 2^-certify_bits` with
    /// `max |k_i| <= bound`. Returns the first relation found.
    pub fn integer_relation(&self, bound: i64, certify_bits: u32) -> Option<[i64; 3]> {
        let thresh = (-(certify_bits.min(110) as f64)).exp2();
        let [a1, a2] = self.turns;
        let hit = |k1: i64, k2: i64| -> Option<[i64; 3]> {
            let v = a1.wrapping_mul(k1 as u128).wrapping_add(a2.wrapping_mul(k2 as u128));
            if turn_dist(v) < thresh {
                let f = turn_to_f64(a1) * k1 as f64 + turn_to_f64(a2) * k2 as f64;
                Some([-(f.round() as i64), k1, k2])
            } else {
                None
            }
        };
        if self.rho() == 1 {
            return (1..=bound).find_map(|k| hit(k, 0));
        }
        (-bound..=bound).into_par_iter().find_map_first(|k1| {
            (-bound..=bound).filter(|&k2| k1 != 0 || k2 != 0).find_map(|k2| hit(k1, k2))
        })
    }
}

/// `{x_i + n alpha_i}` computed from the exact product `n alpha_i`.
pub fn rotate(alpha: &RotationVector, x: &[HpReal], n: i64) -> Vec<HpReal> {
    assert_eq!(x.len(), alpha.rho(), "dimension mismatch");
    let k = BigInt::from(n);
    x.iter()
        .zip(&alpha.comps)
        .map(|(xi, ai)| xi.with_bits(ai.bits()).add(&ai.mul_int(&k)).frac())
        .collect()
}

/// Same as [`rotate`] on 128-bit turns.
#[inline]
pub fn rotate_turns(alpha: &RotationVector, x: [Turn; 2], n: i64) -> [Turn; 2] {
    let [a1, a2] = alpha.turns;
    let (m, neg) = (n.unsigned_abs(), n < 0);
    let step = |a: Turn| {
        let s = turn_mul(a, m);
        if neg {
            s.wrapping_neg()
        } else {
            s
        }
    };
    [x[0].wrapping_add(step(a1)), x[1].wrapping_add(step(a2))]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hp::f64_to_turn;

    fn alpha(s: &str) -> RotationVector {
        RotationVector::parse(s, 256).unwrap()
    }

    #[test]
    fn rotate_two_steps() {
        let a = alpha("sqrt2 - 1");
        let x = rotate(&a, &[HpReal::zero(256)], 2);
        assert!((x[0].to_f64() - (2.0 * 2f64.sqrt() - 2.0)).abs() < 1e-15);
        let back = rotate(&a, &x, -2);
        assert!(back[0].dist_to_int().to_f64() < 1e-70);
    }

    #[test]
    fn identity_at_zero() {
        let a = alpha("sqrt2-1, sqrt3-1");
        let x = vec![HpReal::from_f64(0.3, 256), HpReal::from_f64(0.7, 256)];
        assert_eq!(rotate(&a, &x, 0), x);
    }

    #[test]
    fn exact_against_single_steps() {
        let a = alpha("golden, sqrt2-1");
        let mut y = vec![HpReal::zero(256), HpReal::from_f64(0.25, 256)];
        for _ in 0..10_000 {
            y = rotate(&a, &y, 1);
        }
        let z = rotate(&a, &[HpReal::zero(256), HpReal::from_f64(0.25, 256)], 10_000);
        for (u, v) in y.iter().zip(&z) {
            assert!(u.sub(v).dist_to_int().to_f64() < (-200f64).exp2());
        }
    }

    #[test]
    fn turns_agree_with_high_precision() {
        let a = alpha("sqrt2-1, sqrt3-1");
        let t = rotate_turns(&a, [f64_to_turn(0.1), f64_to_turn(0.2)], -12345);
        let h = rotate(&a, &[HpReal::from_f64(0.1, 256), HpReal::from_f64(0.2, 256)], -12345);
        for i in 0..2 {
            assert!((turn_to_f64(t[i]) - h[i].to_f64()).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_rational_and_finds_relations() {
        assert!(RotationVector::parse("1/2", 256).is_err());
        let a = alpha("sqrt2-1, 2*sqrt2");
        assert!(a.integer_relation(10, 90).is_some());
        let b = alpha("sqrt2-1, sqrt3-1");
        assert!(b.integer_relation(200, 90).is_none());
    }
}
