//! Points of the circle `ℝ/ℤ` in exact fixed-point form.
//!
//! [`UnitPoint`] holds a `B`-bit mantissa together with an enclosure radius.
//! The radius is zero for exactly representable points such as random `x`
//! samples. [`Wide`] is a 128-bit working copy used in hot loops. Every
//! comparison goes through interval bounds, and a comparison that cannot be
//! decided is reported instead of rounded.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

use super::real::Real;
use crate::error::{exhausted, Error, Result};

/// Default working precision in bits.
pub const DEFAULT_PRECISION: u32 = 4096;
/// Smallest admissible precision.
pub const MIN_PRECISION: u32 = 64;

/// An element of `[0, 1)` stored as `mantissa / 2^precision`.
///
/// The represented real lies in `[mantissa, mantissa + radius] / 2^precision`
/// (mod 1); `radius == 0` means the point is exact.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UnitPoint {
    mantissa: BigUint,
    radius: BigUint,
    precision: u32,
}

fn check_precision(bits: u32) -> Result<()> {
    if bits < MIN_PRECISION {
        return Err(Error::InvalidInput(format!(
            "precision {bits} below the minimum of {MIN_PRECISION} bits"
        )));
    }
    Ok(())
}

impl UnitPoint {
    /// The exact point `0`.
    pub fn zero(precision: u32) -> Result<Self> {
        check_precision(precision)?;
        Ok(Self {
            mantissa: BigUint::zero(),
            radius: BigUint::zero(),
            precision,
        })
    }

    /// Fractional part of a real descriptor, enclosed at `precision` bits.
    pub fn from_real(value: &Real, precision: u32) -> Result<Self> {
        check_precision(precision)?;
        let enc = value.enclose(precision);
        let modulus = BigInt::one() << precision as usize;
        let lo = enc.lo.mod_floor(&modulus);
        let radius = (&enc.hi - &enc.lo)
            .to_biguint()
            .expect("enclosure is ordered");
        Ok(Self {
            mantissa: lo.to_biguint().expect("reduced mod 2^B"),
            radius,
            precision,
        })
    }

    /// Exact dyadic point `mantissa / 2^precision` (reduced mod 1).
    pub fn from_mantissa(mantissa: BigUint, precision: u32) -> Result<Self> {
        check_precision(precision)?;
        let mask = (BigUint::one() << precision as usize) - 1u32;
        Ok(Self {
            mantissa: mantissa & mask,
            radius: BigUint::zero(),
            precision,
        })
    }

    /// Lebesgue-uniform random point with all `precision` bits random.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, precision: u32) -> Result<Self> {
        check_precision(precision)?;
        let words = precision.div_ceil(64) as usize;
        let mut digits: Vec<u64> = (0..words).map(|_| rng.random()).collect();
        let extra = words as u32 * 64 - precision;
        if extra > 0 {
            let last = digits.last_mut().expect("at least one word");
            *last >>= extra;
        }
        Ok(Self {
            mantissa: BigUint::from_slice(
                &digits
                    .iter()
                    .flat_map(|w| [*w as u32, (*w >> 32) as u32])
                    .collect::<Vec<u32>>(),
            ),
            radius: BigUint::zero(),
            precision,
        })
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn mantissa(&self) -> &BigUint {
        &self.mantissa
    }

    pub fn radius(&self) -> &BigUint {
        &self.radius
    }

    /// `true` when the point is known exactly.
    pub fn is_exact(&self) -> bool {
        self.radius.is_zero()
    }

    /// Approximate value for reporting.
    pub fn to_f64(&self) -> f64 {
        let shift = self.precision.saturating_sub(64);
        let top = (&self.mantissa >> shift as usize).to_u64().unwrap_or(0);
        top as f64 / 2f64.powi((self.precision - shift) as i32)
    }

    /// Top 128 bits as a [`Wide`] enclosure.
    pub fn to_wide(&self) -> Wide {
        if self.precision >= 128 {
            let s = (self.precision - 128) as usize;
            let v = &self.mantissa >> s;
            let upper = (&self.mantissa + &self.radius) >> s;
            let mut rad = upper - &v;
            if s > 0 && !(self.radius.is_zero() && (&self.mantissa & ((BigUint::one() << s) - 1u32)).is_zero()) {
                rad += 1u32;
            }
            Wide {
                v: low_u128(&v),
                rad: rad.to_u128().unwrap_or(u128::MAX),
            }
        } else {
            let s = 128 - self.precision;
            Wide {
                v: low_u128(&self.mantissa) << s,
                rad: self
                    .radius
                    .to_u128()
                    .and_then(|r| r.checked_mul(1u128 << s))
                    .unwrap_or(u128::MAX),
            }
        }
    }

    /// Fractional part of `q·x` for a nonnegative integer `q`, as a [`Wide`].
    ///
    /// Errors when the enclosure of the product is wider than 2^-64, which
    /// happens once `q` has more than `precision − 64` bits.
    pub fn frac_mul(&self, q: &BigUint) -> Result<Wide> {
        let p = self.precision as usize;
        let prod_rad = q * &self.radius;
        if prod_rad.bits() as usize + 64 > p {
            return Err(exhausted(
                format!("forming {{q·x}} with a {}-bit multiplier", q.bits()),
                self.precision,
            ));
        }
        let mask = (BigUint::one() << p) - 1u32;
        let prod = (q * &self.mantissa) & mask;
        let point = UnitPoint {
            mantissa: prod,
            radius: prod_rad,
            precision: self.precision,
        };
        Ok(point.to_wide())
    }

    /// Fractional part of `2^k·x`, read directly from the mantissa bits.
    pub fn frac_mul_pow2(&self, k: u64) -> Result<Wide> {
        if !self.radius.is_zero() {
            return self.frac_mul(&(BigUint::one() << k as usize));
        }
        Pow2Reader::new(self).frac(k)
    }

    /// Circle distance `∥self − other∥` as an approximate float (reporting only).
    pub fn dist_f64(&self, other: &UnitPoint) -> f64 {
        self.to_wide().sub(&other.to_wide()).dist_interval().mid_f64()
    }
}

/// Reads `{2^k·x}` for an exact point `x` without touching the whole
/// mantissa on every call; used when many consecutive dyadic shifts of
/// the same point are needed.
#[derive(Debug, Clone)]
pub struct Pow2Reader {
    digits: Vec<u64>,
    precision: u64,
}

impl Pow2Reader {
    /// Caches the mantissa of an exact point.
    pub fn new(x: &UnitPoint) -> Self {
        debug_assert!(x.is_exact());
        Pow2Reader {
            digits: x.mantissa.to_u64_digits(),
            precision: x.precision as u64,
        }
    }

    /// Fractional part of `2^k·x` as a 128-bit enclosure.
    pub fn frac(&self, k: u64) -> Result<Wide> {
        let p = self.precision;
        if k + 64 > p {
            return Err(exhausted(format!("forming {{2^{k}·x}}"), p as u32));
        }
        let digits = &self.digits;
        // bits [p − k − 128, p − k) of the mantissa, zero-extended below 0
        let bit = |i: i64| -> u64 {
            if i < 0 {
                return 0;
            }
            let i = i as u64;
            digits.get((i / 64) as usize).map_or(0, |w| (w >> (i % 64)) & 1)
        };
        let lo_index = (p - k) as i64 - 128;
        let v = if lo_index >= 0 && lo_index % 64 == 0 {
            let w = (lo_index / 64) as usize;
            let a = *digits.get(w).unwrap_or(&0) as u128;
            let b = *digits.get(w + 1).unwrap_or(&0) as u128;
            a | (b << 64)
        } else {
            extract_window(digits, lo_index, &bit)
        };
        Ok(Wide {
            v,
            rad: if lo_index > 0 { 1 } else { 0 },
        })
    }
}

fn extract_window(digits: &[u64], lo_index: i64, bit: &dyn Fn(i64) -> u64) -> u128 {
    // General (unaligned) 128-bit window starting at bit `lo_index`.
    let mut v: u128 = 0;
    if lo_index >= 0 {
        let word = (lo_index / 64) as usize;
        let off = (lo_index % 64) as u32;
        let get = |i: usize| *digits.get(i).unwrap_or(&0) as u128;
        let a = get(word) >> off;
        let b = get(word + 1) << (64 - off);
        let c = get(word + 2) << (128 - off);
        v = a | b | c;
    } else {
        for i in 0..128i64 {
            v |= (bit(lo_index + i) as u128) << i;
        }
    }
    v
}

fn low_u128(x: &BigUint) -> u128 {
    let d = x.to_u64_digits();
    let a = *d.first().unwrap_or(&0) as u128;
    let b = *d.get(1).unwrap_or(&0) as u128;
    a | (b << 64)
}

/// 128-bit circle point enclosure: the value lies in `[v, v + rad] / 2^128` (mod 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Wide {
    pub v: u128,
    pub rad: u128,
}

/// Enclosure `[lo, hi] / 2^128` of a distance to the nearest integer; both ≤ 2^127.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DistInterval {
    pub lo: u128,
    pub hi: u128,
}

/// Half of the circle in 2^-128 units.
pub const HALF: u128 = 1u128 << 127;

impl Wide {
    /// Exact point.
    pub const fn exact(v: u128) -> Self {
        Wide { v, rad: 0 }
    }

    /// `n·self` mod 1; `None` if the radius overflows.
    pub fn mul_int(&self, n: u64) -> Option<Wide> {
        Some(Wide {
            v: self.v.wrapping_mul(n as u128),
            rad: self.rad.checked_mul(n as u128)?,
        })
    }

    /// `self − other` mod 1.
    pub fn sub(&self, other: &Wide) -> Wide {
        Wide {
            v: self.v.wrapping_sub(other.v).wrapping_sub(other.rad),
            rad: self.rad.saturating_add(other.rad),
        }
    }

    /// `self + other` mod 1.
    pub fn add(&self, other: &Wide) -> Wide {
        Wide {
            v: self.v.wrapping_add(other.v),
            rad: self.rad.saturating_add(other.rad),
        }
    }

    /// Enclosure of `∥self∥`.
    pub fn dist_interval(&self) -> DistInterval {
        dist_interval_u128(self.v, self.rad)
    }

    pub fn to_f64(&self) -> f64 {
        self.v as f64 / 2f64.powi(128)
    }
}

fn dist_u128(t: u128) -> u128 {
    if t <= HALF {
        t
    } else {
        t.wrapping_neg()
    }
}

fn dist_interval_u128(a: u128, rad: u128) -> DistInterval {
    if rad >= HALF {
        return DistInterval { lo: 0, hi: HALF };
    }
    let b = a.wrapping_add(rad);
    let (da, db) = (dist_u128(a), dist_u128(b));
    let mut lo = da.min(db);
    let mut hi = da.max(db);
    let wraps_zero = b < a; // passes through 0 ≡ 1
    let crosses_half = if a <= b { a <= HALF && HALF <= b } else { HALF >= a || HALF <= b };
    if wraps_zero {
        lo = 0;
    }
    if crosses_half {
        hi = HALF;
    }
    DistInterval { lo, hi }
}

impl DistInterval {
    pub fn mid_f64(&self) -> f64 {
        (self.lo as f64 + self.hi as f64) / 2.0 / 2f64.powi(128)
    }

    /// Decides `dist < threshold`; `None` when the enclosures overlap.
    pub fn lt(&self, t: &Threshold) -> Option<bool> {
        if t.above_half {
            return Some(true);
        }
        if self.hi < t.lo {
            Some(true)
        } else if self.lo >= t.hi {
            Some(false)
        } else {
            None
        }
    }
}

/// A distance threshold `ε` enclosed in 2^-128 units.
///
/// Thresholds above one half accept every point (`∥·∥ ≤ 1/2`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Threshold {
    pub lo: u128,
    pub hi: u128,
    pub above_half: bool,
    exact: Option<num_rational::BigRational>,
}

impl Threshold {
    /// Encloses a nonnegative rational threshold.
    pub fn from_rational(eps: &num_rational::BigRational) -> Result<Self> {
        use num_traits::Signed;
        if eps.is_negative() {
            return Err(Error::InvalidInput("negative threshold".into()));
        }
        let half = num_rational::BigRational::new(1.into(), 2.into());
        if *eps > half {
            return Ok(Threshold {
                lo: HALF,
                hi: HALF,
                above_half: true,
                exact: Some(eps.clone()),
            });
        }
        let enc = Real::Rational(eps.clone()).enclose(128);
        Ok(Threshold {
            lo: enc.lo.to_u128().expect("≤ 2^127"),
            hi: enc.hi.to_u128().expect("≤ 2^127"),
            above_half: false,
            exact: Some(eps.clone()),
        })
    }

    /// The exact rational this threshold encloses.
    pub fn exact(&self) -> Option<&num_rational::BigRational> {
        self.exact.as_ref()
    }
}

/// Nearest-integer distance `∥t∥` for a finite float.
///
/// Computed exactly on the binary value of `t`: the result is the exact
/// distance of that dyadic rational to ℤ.
pub fn nearest_int_dist(t: f64) -> Result<f64> {
    if !t.is_finite() {
        return Err(Error::NonFinite(t));
    }
    let frac = t - t.floor(); // exact for binary floats
    Ok(frac.min(1.0 - frac))
}

/// Nearest-integer distance of an exact real descriptor, enclosed at `bits`.
pub fn nearest_int_dist_real(t: &Real, bits: u32) -> Result<DistInterval> {
    Ok(UnitPoint::from_real(t, bits)?.to_wide().dist_interval())
}

/// Evaluates `∥n·α − γ∥ < ε` with an interval guard.
///
/// The 128-bit fast path is tried first. If it is inconclusive, the
/// comparison is redone on the full-precision mantissas. Precision
/// exhaustion is reported only if that also fails.
#[derive(Debug, Clone)]
pub struct CircleOrbit {
    alpha: UnitPoint,
    gamma: UnitPoint,
    alpha_w: Wide,
    gamma_w: Wide,
}

impl CircleOrbit {
    pub fn new(alpha: &Real, gamma: &Real, precision: u32) -> Result<Self> {
        let alpha = UnitPoint::from_real(alpha, precision)?;
        let gamma = UnitPoint::from_real(gamma, precision)?;
        Ok(Self::from_points(alpha, gamma))
    }

    pub fn from_points(alpha: UnitPoint, gamma: UnitPoint) -> Self {
        let alpha_w = alpha.to_wide();
        let gamma_w = gamma.to_wide();
        Self {
            alpha,
            gamma,
            alpha_w,
            gamma_w,
        }
    }

    pub fn precision(&self) -> u32 {
        self.alpha.precision()
    }

    /// 128-bit enclosure of `n·α − γ`.
    pub fn wide(&self, n: u64) -> Wide {
        match self.alpha_w.mul_int(n) {
            Some(w) => w.sub(&self.gamma_w),
            None => Wide { v: 0, rad: u128::MAX },
        }
    }

    /// Enclosure of `∥n·α − γ∥` (128-bit).
    pub fn dist(&self, n: u64) -> DistInterval {
        self.wide(n).dist_interval()
    }

    /// Approximate `∥n·α − γ∥` as a float.
    pub fn dist_f64(&self, n: u64) -> f64 {
        self.dist(n).mid_f64()
    }

    /// Guarded decision of `∥n·α − γ∥ < ε`.
    pub fn dist_lt(&self, n: u64, eps: &Threshold) -> Result<bool> {
        if let Some(b) = self.dist(n).lt(eps) {
            return Ok(b);
        }
        self.dist_lt_exact(n, eps)
    }

    /// Guarded decision of `∥n·α − γ∥ ≥ ε`, i.e. the complement of [`Self::dist_lt`].
    pub fn dist_ge(&self, n: u64, eps: &Threshold) -> Result<bool> {
        Ok(!self.dist_lt(n, eps)?)
    }

    fn dist_lt_exact(&self, n: u64, eps: &Threshold) -> Result<bool> {
        let p = self.precision() as usize;
        let modulus = BigUint::one() << p;
        let nn = BigUint::from(n);
        let v = (&nn * self.alpha.mantissa() + (&modulus << 1usize) - self.gamma.mantissa() - self.gamma.radius()) % &modulus;
        let rad = &nn * self.alpha.radius() + self.gamma.radius();
        let half = BigUint::one() << (p - 1);
        let (dlo, dhi) = dist_interval_big(&v, &rad, &modulus, &half);
        let e = eps
            .exact()
            .ok_or_else(|| exhausted("comparing against an inexact threshold", self.precision()))?;
        let enc = Real::Rational(e.clone()).enclose(self.precision());
        let (elo, ehi) = (
            enc.lo.to_biguint().unwrap_or_default(),
            enc.hi.to_biguint().unwrap_or_default(),
        );
        if dhi < elo {
            Ok(true)
        } else if dlo >= ehi {
            Ok(false)
        } else {
            Err(exhausted(
                format!("deciding ∥{n}·α − γ∥ < ε"),
                self.precision(),
            ))
        }
    }
}

fn dist_interval_big(a: &BigUint, rad: &BigUint, modulus: &BigUint, half: &BigUint) -> (BigUint, BigUint) {
    if rad >= half {
        return (BigUint::zero(), half.clone());
    }
    let d = |t: &BigUint| if t <= half { t.clone() } else { modulus - t };
    let end = a + rad;
    let wraps = &end >= modulus;
    let b = if wraps { &end - modulus } else { end.clone() };
    let (da, db) = (d(a), d(&b));
    let mut lo = da.clone().min(db.clone());
    let mut hi = da.max(db);
    let crosses_half = if !wraps { a <= half && half <= &b } else { half >= a || half <= &b };
    if wraps {
        lo = BigUint::zero();
    }
    if crosses_half {
        hi = half.clone();
    }
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn nearest_int_distance_examples() {
        assert_eq!(nearest_int_dist(0.5).unwrap(), 0.5);
        assert_eq!(nearest_int_dist(3.25).unwrap(), 0.25);
        assert!((nearest_int_dist(-0.1).unwrap() - 0.1).abs() < 1e-16);
        assert!(nearest_int_dist(f64::NAN).is_err());
        assert!(nearest_int_dist(f64::INFINITY).is_err());
    }

    #[test]
    fn nearest_int_distance_is_shift_invariant() {
        for &t in &[0.1, 0.37, -2.75, 1e-9] {
            for m in -5..5 {
                assert!((nearest_int_dist(t).unwrap() - nearest_int_dist(t + m as f64).unwrap()).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn real_distance_enclosures() {
        let d = nearest_int_dist_real(&"-0.1".parse().unwrap(), 256).unwrap();
        assert!((d.mid_f64() - 0.1).abs() < 1e-15);
        let h = nearest_int_dist_real(&Real::ratio(7, 2), 256).unwrap();
        assert_eq!((h.lo, h.hi), (HALF, HALF));
    }

    #[test]
    fn precision_floor_is_enforced() {
        assert!(UnitPoint::zero(63).is_err());
        assert!(UnitPoint::zero(64).is_ok());
    }

    #[test]
    fn random_points_fill_the_precision() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let x = UnitPoint::random(&mut rng, 100).unwrap();
        assert!(x.mantissa().bits() <= 100);
        assert!(x.is_exact());
    }

    #[test]
    fn pow2_window_matches_general_product() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let x = UnitPoint::random(&mut rng, 700).unwrap();
        for k in [0u64, 1, 5, 63, 64, 65, 100, 500, 571, 572, 600, 636] {
            let a = x.frac_mul_pow2(k).unwrap();
            let b = x.frac_mul(&(BigUint::one() << k as usize)).unwrap();
            assert_eq!(a.v, b.v, "k = {k}");
        }
        assert!(x.frac_mul_pow2(637).is_err());
    }

    #[test]
    fn orbit_distance_decisions() {
        let orbit = CircleOrbit::new(&Real::ratio(1, 2), &Real::integer(0), 256).unwrap();
        let eps = Threshold::from_rational(&num_rational::BigRational::new(1.into(), 10.into())).unwrap();
        let hits: Vec<u64> = (1..=10).filter(|&n| orbit.dist_lt(n, &eps).unwrap()).collect();
        assert_eq!(hits, vec![2, 4, 6, 8, 10]);
        let half = Threshold::from_rational(&num_rational::BigRational::new(1.into(), 2.into())).unwrap();
        // ∥n/2∥ < 1/2 only for even n
        assert!(!orbit.dist_lt(1, &half).unwrap());
        assert!(orbit.dist_lt(2, &half).unwrap());
    }

    #[test]
    fn wraparound_distance_interval() {
        let w = Wide { v: u128::MAX - 5, rad: 10 };
        let d = w.dist_interval();
        assert_eq!(d.lo, 0);
        assert_eq!(d.hi, 6);
    }
}
