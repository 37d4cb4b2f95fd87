//! Nonnegative ball arithmetic on big binary floats.
//!
//! A [`Ball`] represents the interval `[(mid − rad)·2^exp, (mid + rad)·2^exp]`.
//! Operations propagate the radius rigorously. Real-valued sequence terms
//! such as `q₀·rⁿ` or `exp(n^θ)` are carried as balls, so every
//! fractional-part extraction can check how much precision remains.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};

use super::real::Real;
use super::unit::{UnitPoint, Wide};
use crate::error::{exhausted, Error, Result};

/// Nonnegative real enclosed as `(mid ± rad)·2^exp`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ball {
    mid: BigUint,
    rad: BigUint,
    exp: i64,
    prec: u32,
}

impl Ball {
    /// Exact nonnegative integer.
    pub fn from_int(n: &BigUint, prec: u32) -> Self {
        Ball {
            mid: n.clone(),
            rad: BigUint::zero(),
            exp: 0,
            prec,
        }
        .normalized()
    }

    /// Encloses a nonnegative real descriptor with about `prec` significant bits.
    pub fn from_real(x: &Real, prec: u32) -> Result<Self> {
        if x.to_f64() < 0.0 {
            return Err(Error::InvalidInput("ball values must be nonnegative".into()));
        }
        let mut bits = prec + 64;
        loop {
            let e = x.enclose(bits);
            let lo = e.lo.to_biguint().unwrap_or_default();
            let hi = e.hi.to_biguint().unwrap_or_default();
            if lo.bits() >= prec as u64 || bits > prec + 4096 {
                // value ∈ [lo, hi]·2^-bits ⊂ [lo ± (hi − lo)]
                let rad = &hi - &lo;
                return Ok(Ball {
                    mid: lo,
                    rad,
                    exp: -(bits as i64),
                    prec,
                }
                .normalized());
            }
            bits += 256;
        }
    }

    /// `n^(a/b)` for positive integers, enclosed with `prec` fractional bits.
    pub fn rational_power(n: u64, a: u32, b: u32, prec: u32) -> Self {
        let base = num_traits::pow(BigUint::from(n), a as usize);
        let scaled = base << (b as usize * prec as usize);
        let s = scaled.nth_root(b);
        let exact = num_traits::pow(s.clone(), b as usize) == (num_traits::pow(BigUint::from(n), a as usize) << (b as usize * prec as usize));
        Ball {
            mid: s,
            rad: if exact { BigUint::zero() } else { BigUint::one() },
            exp: -(prec as i64),
            prec,
        }
        .normalized()
    }

    fn normalized(mut self) -> Self {
        let keep = self.prec as u64 + 8;
        let bits = self.mid.bits();
        if bits > keep {
            let k = (bits - keep) as usize;
            let truncated = !(&self.mid & ((BigUint::one() << k) - 1u32)).is_zero();
            let rad_truncated = !(&self.rad & ((BigUint::one() << k) - 1u32)).is_zero();
            self.mid >>= k;
            self.rad >>= k;
            if truncated || rad_truncated {
                self.rad += 1u32;
            }
            self.exp += k as i64;
        }
        self
    }

    /// Product of two balls.
    pub fn mul(&self, other: &Ball) -> Ball {
        let mid = &self.mid * &other.mid;
        let rad = &self.mid * &other.rad + &other.mid * &self.rad + &self.rad * &other.rad;
        Ball {
            mid,
            rad,
            exp: self.exp + other.exp,
            prec: self.prec.max(other.prec),
        }
        .normalized()
    }

    /// `self^n` by repeated squaring.
    pub fn pow(&self, mut n: u64) -> Ball {
        let mut acc = Ball::from_int(&BigUint::one(), self.prec);
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// `exp(self)` with rigorous radius.
    pub fn exp(&self) -> Result<Ball> {
        let approx = self.to_f64();
        if !(0.0..=1e6).contains(&approx) {
            return Err(Error::InvalidInput(format!("exp argument {approx} out of range")));
        }
        // reduce: t / 2^k < 2^-8
        let k = (approx.max(1e-300).log2().ceil() as i64 + 8).max(0) as u32;
        let work = self.prec + k + 32;
        // fixed point with `work` fractional bits
        let shift = -self.exp + k as i64 - work as i64;
        let to_fixed = |x: &BigUint| -> BigUint {
            if shift >= 0 {
                x >> shift as usize
            } else {
                x << (-shift) as usize
            }
        };
        let t = to_fixed(&self.mid);
        let t_rad = to_fixed(&self.rad) + 1u32;
        let one = BigUint::one() << work as usize;
        // Taylor series of exp(t) for 0 ≤ t < 2^-8 (fixed point)
        let mut sum = one.clone();
        let mut term = one.clone();
        let mut i = 1u32;
        loop {
            term = (&term * &t) >> work as usize;
            term /= i;
            if term.is_zero() {
                break;
            }
            sum += &term;
            i += 1;
        }
        // truncation of each term (≤ i ulps) + tail bound (≤ 1 ulp) + sensitivity to t
        // d/dt exp(t) ≤ 2 on [0, 2^-8], so an input radius r adds ≤ 2r (+ slack).
        let rad = BigUint::from(i + 2) + (t_rad << 1usize);
        let mut ball = Ball {
            mid: sum,
            rad,
            exp: -(work as i64),
            prec: work,
        };
        for _ in 0..k {
            ball = ball.mul(&ball);
        }
        ball.prec = self.prec;
        Ok(ball.normalized())
    }

    /// Approximate value.
    pub fn to_f64(&self) -> f64 {
        self.ln().exp()
    }

    /// Approximate natural logarithm (−∞ for zero).
    pub fn ln(&self) -> f64 {
        if self.mid.is_zero() {
            return f64::NEG_INFINITY;
        }
        let bits = self.mid.bits() as i64;
        let s = (bits - 60).max(0);
        let top = (&self.mid >> s as usize).to_f64().unwrap_or(f64::NAN);
        top.ln() + ((s + self.exp) as f64) * std::f64::consts::LN_2
    }

    /// Guarded comparison; `None` when the balls overlap.
    pub fn try_cmp(&self, other: &Ball) -> Option<Ordering> {
        let e = self.exp.min(other.exp);
        let scale = |x: &BigUint, ex: i64| -> BigInt { BigInt::from(x << (ex - e) as usize) };
        let (a, ra) = (scale(&self.mid, self.exp), scale(&self.rad, self.exp));
        let (b, rb) = (scale(&other.mid, other.exp), scale(&other.rad, other.exp));
        if &a + &ra < &b - &rb {
            Some(Ordering::Less)
        } else if &a - &ra > &b + &rb {
            Some(Ordering::Greater)
        } else if ra == BigInt::zero() && rb == BigInt::zero() && a == b {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// Fractional part of `self · x` as a 128-bit enclosure.
    pub fn frac_mul(&self, x: &UnitPoint) -> Result<Wide> {
        let frac_bits = x.precision() as i64 - self.exp;
        if frac_bits <= 0 {
            // the product is an integer multiple of 2^(exp − B) ≥ 1 … only if exact
            if self.rad.is_zero() && x.is_exact() {
                return Ok(Wide::exact(0));
            }
            return Err(exhausted("forming {q·x} for a real term", x.precision()));
        }
        let mid = &self.mid * x.mantissa();
        let rad = &self.rad * x.mantissa() + &self.mid * x.radius() + &self.rad * x.radius();
        // value ∈ [mid − rad, mid + rad] / 2^frac_bits
        if rad.bits() as i64 + 64 > frac_bits {
            return Err(exhausted("forming {q·x} for a real term", x.precision()));
        }
        let modulus = BigUint::one() << frac_bits as usize;
        let lo = (&mid + &modulus - (&rad % &modulus)) % &modulus;
        let p = frac_bits.max(64) as u32;
        let point = UnitPoint::from_mantissa(lo << (p as i64 - frac_bits) as usize, p)?;
        let w = point.to_wide();
        let rad_units = if frac_bits >= 128 {
            ((rad << 1usize) >> (frac_bits - 128) as usize) + 2u32
        } else {
            (rad << 1usize) << (128 - frac_bits) as usize
        };
        Ok(Wide {
            v: w.v,
            rad: w.rad.saturating_add(rad_units.to_u128().unwrap_or(u128::MAX)),
        })
    }

    /// Midpoint rounded down to an integer, when the enclosure is narrower than 1.
    pub fn floor_int(&self) -> Option<BigUint> {
        if self.exp >= 0 {
            if self.rad.is_zero() {
                return Some(&self.mid << self.exp as usize);
            }
            return None;
        }
        let s = (-self.exp) as usize;
        let lo = (&self.mid - (&self.rad).min(&self.mid)) >> s;
        let hi = (&self.mid + &self.rad) >> s;
        (lo == hi).then_some(lo)
    }
}
