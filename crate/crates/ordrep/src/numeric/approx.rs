use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint, ToBigInt};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::Rational;

/// Dyadic interval: the true value lies in [(m - e) / 2^bits, (m + e) / 2^bits].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VerifiedApprox {
    mantissa: BigInt,
    bits: u32,
    radius: BigUint,
}

impl VerifiedApprox {
    pub fn new(mantissa: BigInt, bits: u32, radius: BigUint) -> Self {
        VerifiedApprox { mantissa, bits, radius }
    }

    pub fn exact_zero() -> Self {
        VerifiedApprox::new(BigInt::zero(), 0, BigUint::zero())
    }

    /// Interval [f, f+1] / 2^bits given f = floor(v * 2^bits).
    pub fn from_floor(f: BigInt, bits: u32) -> Self {
        VerifiedApprox::new(2 * f + 1, bits + 1, BigUint::one())
    }

    /// Encloses the rational `x` with half-width `half` (a rational >= 0).
    pub fn enclose(x: &Rational, half: &Rational, bits: u32) -> Self {
        let scale = Rational::from_integer(BigInt::one() << bits);
        let m = (x * &scale).round().to_integer();
        let e: BigInt = (half * &scale).ceil().to_integer() + 1;
        VerifiedApprox::new(m, bits, e.to_biguint().unwrap_or_default())
    }

    pub fn precision_bits(&self) -> u32 {
        self.bits
    }
    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }
    pub fn radius_ulps(&self) -> &BigUint {
        &self.radius
    }

    pub fn midpoint(&self) -> Rational {
        Rational::new(self.mantissa.clone(), BigInt::one() << self.bits)
    }

    pub fn radius(&self) -> Rational {
        Rational::new(self.radius.to_bigint().unwrap(), BigInt::one() << self.bits)
    }

    pub fn is_exact(&self) -> bool {
        self.radius.is_zero()
    }

    pub fn lower_ulps(&self) -> BigInt {
        &self.mantissa - self.radius.to_bigint().unwrap()
    }

    pub fn upper_ulps(&self) -> BigInt {
        &self.mantissa + self.radius.to_bigint().unwrap()
    }

    /// Same interval (or a superset when rounding) expressed at `bits`.
    pub fn at_bits(&self, bits: u32) -> Self {
        if bits >= self.bits {
            let sh = bits - self.bits;
            VerifiedApprox::new(&self.mantissa << sh, bits, &self.radius << sh)
        } else {
            let sh = self.bits - bits;
            let den = BigInt::one() << sh;
            let (qt, rem) = self.mantissa.div_mod_floor(&den);
            let extra = if rem.is_zero() { 0u32 } else { 1 };
            let rad = (&self.radius >> sh) + BigUint::from(1u32 + extra);
            VerifiedApprox::new(qt, bits, rad)
        }
    }

    pub fn neg(&self) -> Self {
        VerifiedApprox::new(-&self.mantissa, self.bits, self.radius.clone())
    }

    pub fn add(&self, other: &Self) -> Self {
        let b = self.bits.max(other.bits);
        let (x, y) = (self.at_bits(b), other.at_bits(b));
        VerifiedApprox::new(x.mantissa + y.mantissa, b, x.radius + y.radius)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul_int(&self, n: &BigInt) -> Self {
        VerifiedApprox::new(&self.mantissa * n, self.bits, &self.radius * n.magnitude())
    }

    /// Answered only when the intervals are disjoint (or both exact).
    pub fn try_cmp(&self, other: &Self) -> Option<Ordering> {
        let b = self.bits.max(other.bits);
        let (x, y) = (self.at_bits(b), other.at_bits(b));
        if x.upper_ulps() < y.lower_ulps() {
            Some(Ordering::Less)
        } else if x.lower_ulps() > y.upper_ulps() {
            Some(Ordering::Greater)
        } else if x.is_exact() && y.is_exact() {
            Some(x.mantissa.cmp(&y.mantissa))
        } else {
            None
        }
    }

    /// Splits off the integer part when the interval sits inside [k, k+1).
    pub fn split_floor(&self) -> Option<(BigInt, VerifiedApprox)> {
        let unit = BigInt::one() << self.bits;
        let lo = self.lower_ulps().div_floor(&unit);
        let hi_val = self.upper_ulps();
        let hi = hi_val.div_floor(&unit);
        if lo != hi {
            return None;
        }
        let m = &self.mantissa - &lo * &unit;
        Some((lo, VerifiedApprox::new(m, self.bits, self.radius.clone())))
    }

    pub fn is_negative(&self) -> bool {
        self.upper_ulps().is_negative()
    }
}
