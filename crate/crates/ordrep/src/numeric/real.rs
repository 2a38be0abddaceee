use std::cmp::Ordering;
use std::fmt;
use std::sync::atomic::{AtomicU32, Ordering as AtomicOrdering};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::approx::VerifiedApprox;
use super::quadratic::{quad_compare, QuadraticReal};
use super::{NumericError, Rational};

static PRECISION_CEILING: AtomicU32 = AtomicU32::new(4096);

/// Upper limit for precision escalation, in bits.
pub fn precision_ceiling() -> u32 {
    PRECISION_CEILING.load(AtomicOrdering::Relaxed)
}

pub fn set_precision_ceiling(bits: u32) {
    PRECISION_CEILING.store(bits.max(64), AtomicOrdering::Relaxed);
}

/// Anything that can hand out enclosing intervals at a requested precision.
pub trait ApproxSource {
    fn approx_at(&self, bits: u32) -> VerifiedApprox;
    fn refinable(&self) -> bool;
}

impl ApproxSource for QuadraticReal {
    fn approx_at(&self, bits: u32) -> VerifiedApprox {
        VerifiedApprox::from_floor(self.floor_scaled_pow2(bits), bits)
    }
    fn refinable(&self) -> bool {
        true
    }
}

impl ApproxSource for VerifiedApprox {
    fn approx_at(&self, bits: u32) -> VerifiedApprox {
        if bits >= self.precision_bits() {
            self.clone()
        } else {
            self.at_bits(bits)
        }
    }
    fn refinable(&self) -> bool {
        false
    }
}

/// A real number that is either exact or carried as a verified interval.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Real {
    Exact(QuadraticReal),
    Approx(VerifiedApprox),
}

impl Real {
    pub fn zero() -> Self {
        Real::Exact(QuadraticReal::from_int(0))
    }
    pub fn one() -> Self {
        Real::Exact(QuadraticReal::from_int(1))
    }
    pub fn from_rational(x: &Rational) -> Self {
        Real::Exact(QuadraticReal::from_rational(x))
    }

    pub fn as_exact(&self) -> Option<&QuadraticReal> {
        match self {
            Real::Exact(x) => Some(x),
            Real::Approx(_) => None,
        }
    }

    pub fn approx_at(&self, bits: u32) -> VerifiedApprox {
        match self {
            Real::Exact(x) => x.approx_at(bits),
            Real::Approx(a) => a.approx_at(bits),
        }
    }

    fn working_bits(&self, other: &Real) -> u32 {
        let b = |r: &Real| match r {
            Real::Exact(_) => 0,
            Real::Approx(a) => a.precision_bits(),
        };
        b(self).max(b(other)).max(64) + 4
    }

    pub fn cmp_real(&self, other: &Real) -> Result<Ordering, NumericError> {
        if let (Real::Exact(x), Real::Exact(y)) = (self, other) {
            match quad_compare(x, y) {
                Ok(o) => return Ok(o),
                Err(NumericError::IncomparableRadicands(..)) => {
                    let ceiling = precision_ceiling();
                    let mut bits = 128;
                    loop {
                        if let Some(o) = x.approx_at(bits).try_cmp(&y.approx_at(bits)) {
                            return Ok(o);
                        }
                        if bits >= ceiling {
                            return Err(NumericError::PrecisionExhausted(bits * 2));
                        }
                        bits = (bits * 2).min(ceiling);
                    }
                }
                Err(e) => return Err(e),
            }
        }
        let bits = self.working_bits(other);
        self.approx_at(bits)
            .try_cmp(&other.approx_at(bits))
            .ok_or(NumericError::AmbiguousComparison)
    }

    pub fn lt(&self, other: &Real) -> Result<bool, NumericError> {
        Ok(self.cmp_real(other)? == Ordering::Less)
    }

    pub fn le(&self, other: &Real) -> Result<bool, NumericError> {
        Ok(self.cmp_real(other)? != Ordering::Greater)
    }

    pub fn add(&self, other: &Real) -> Real {
        if let (Real::Exact(x), Real::Exact(y)) = (self, other) {
            if let Ok(z) = x.add(y) {
                return Real::Exact(z);
            }
            return Real::Approx(x.approx_at(512).add(&y.approx_at(512)));
        }
        let bits = self.working_bits(other);
        Real::Approx(self.approx_at(bits).add(&other.approx_at(bits)))
    }

    pub fn neg(&self) -> Real {
        match self {
            Real::Exact(x) => Real::Exact(x.neg()),
            Real::Approx(a) => Real::Approx(a.neg()),
        }
    }

    pub fn sub(&self, other: &Real) -> Real {
        self.add(&other.neg())
    }

    pub fn mul_rational(&self, c: &Rational) -> Real {
        match self {
            Real::Exact(x) => Real::Exact(
                x.mul(&QuadraticReal::from_rational(c)).expect("rational factor"),
            ),
            Real::Approx(a) => {
                let bits = a.precision_bits() + 8;
                let num = a.at_bits(bits).mul_int(c.numer());
                let den = c.denom();
                let m = num.mantissa() / den;
                let e = num.radius_ulps() / den.magnitude() + 2u32;
                Real::Approx(VerifiedApprox::new(m, bits, e))
            }
        }
    }

    /// Decimal rendering with `sig` significant digits, rounded half up.
    pub fn to_decimal(&self, sig: usize) -> String {
        match self {
            Real::Exact(x) => {
                let neg = x.signum() == Ordering::Less;
                let a = x.abs();
                format_significant(|k| a.floor_scaled_pow10(k), neg, sig)
            }
            Real::Approx(v) => {
                let mid = v.midpoint();
                let neg = mid.is_negative();
                let a = mid.abs();
                format_significant(
                    |k| (&a * Rational::from_integer(BigInt::from(10u32).pow(k))).floor().to_integer(),
                    neg,
                    sig,
                )
            }
        }
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal(30))
    }
}

fn format_significant(floor_at: impl Fn(u32) -> BigInt, negative: bool, sig: usize) -> String {
    let sig = sig.max(1) as u32;
    let int_part = floor_at(0);
    let k = if !int_part.is_zero() {
        let len = int_part.to_string().len() as u32;
        sig.saturating_sub(len)
    } else {
        let mut z = 1u32;
        loop {
            if !floor_at(z).is_zero() {
                break z - 1 + sig;
            }
            if z > 5000 {
                return "0".to_string();
            }
            z += 1;
        }
    };
    let m = floor_at(k + 1);
    if m.is_zero() {
        return "0".to_string();
    }
    let rounded = (m + 5u32) / 10u32;
    let unit = BigInt::from(10u32).pow(k);
    let ip = &rounded / &unit;
    let fp = &rounded % &unit;
    let sign = if negative { "-" } else { "" };
    if k == 0 {
        format!("{sign}{ip}")
    } else {
        format!("{sign}{ip}.{:0>width$}", fp.to_string(), width = k as usize)
    }
}

/// A value in [0,1) together with the integer removed to get there.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UnitValue {
    value: Real,
    integer_part: BigInt,
}

impl UnitValue {
    pub fn value(&self) -> &Real {
        &self.value
    }
    pub fn integer_part(&self) -> &BigInt {
        &self.integer_part
    }
    pub fn into_real(self) -> Real {
        self.value
    }
    pub(crate) fn from_parts(value: Real, integer_part: BigInt) -> Self {
        UnitValue { value, integer_part }
    }
}

/// n·x − ⌊n·x⌋, exactly.
pub fn quad_frac_mul(x: &QuadraticReal, n: u64) -> UnitValue {
    let nx = x.mul_int(&BigInt::from(n));
    let k = nx.floor();
    let v = nx.sub(&QuadraticReal::new(k.clone(), BigInt::zero(), 1, BigInt::one()).unwrap()).unwrap();
    UnitValue { value: Real::Exact(v), integer_part: k }
}

/// n·x mod 1 from interval approximations, escalating precision until the
/// wrap point is excluded.
pub fn approx_frac_mul(
    x: &dyn ApproxSource,
    n: u64,
    target_precision: u32,
) -> Result<UnitValue, NumericError> {
    if n == 0 {
        return Ok(UnitValue { value: Real::Approx(VerifiedApprox::exact_zero()), integer_part: BigInt::zero() });
    }
    let ceiling = precision_ceiling();
    let nbits = 64 - n.leading_zeros();
    let mut bits = (target_precision + nbits + 8).min(ceiling);
    loop {
        let src = if x.refinable() { x.approx_at(bits) } else { x.approx_at(u32::MAX) };
        let a = src.mul_int(&BigInt::from(n));
        if let Some((k, f)) = a.split_floor() {
            let tight = f.precision_bits() < target_precision
                || f.radius_ulps().bits() as u32 <= f.precision_bits() - target_precision;
            if tight || !x.refinable() {
                return Ok(UnitValue { value: Real::Approx(f), integer_part: k });
            }
        }
        if !x.refinable() || bits >= ceiling {
            return Err(NumericError::PrecisionExhausted(bits.saturating_mul(2)));
        }
        bits = (bits * 2).min(ceiling);
    }
}

/// Multiplier x in an orbit x∗A.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Multiplier {
    Quadratic(QuadraticReal),
    Approx(VerifiedApprox),
}

impl Multiplier {
    pub fn quadratic(x: QuadraticReal) -> Result<Self, NumericError> {
        if x.is_rational() {
            return Err(NumericError::RationalMultiplier);
        }
        Ok(Multiplier::Quadratic(x))
    }

    pub fn phi() -> Self {
        Multiplier::Quadratic(QuadraticReal::phi())
    }

    pub fn frac_mul(&self, n: u64) -> Result<UnitValue, NumericError> {
        match self {
            Multiplier::Quadratic(x) => Ok(quad_frac_mul(x, n)),
            Multiplier::Approx(a) => approx_frac_mul(a, n, 64),
        }
    }

    pub fn as_real(&self) -> Real {
        match self {
            Multiplier::Quadratic(x) => Real::Exact(x.clone()),
            Multiplier::Approx(a) => Real::Approx(a.clone()),
        }
    }
}

impl ApproxSource for Multiplier {
    fn approx_at(&self, bits: u32) -> VerifiedApprox {
        match self {
            Multiplier::Quadratic(x) => x.approx_at(bits),
            Multiplier::Approx(a) => a.approx_at(bits),
        }
    }
    fn refinable(&self) -> bool {
        matches!(self, Multiplier::Quadratic(_))
    }
}

impl fmt::Display for Multiplier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Multiplier::Quadratic(x) => write!(f, "{x}"),
            Multiplier::Approx(a) => write!(f, "dec:{}", Real::Approx(a.clone()).to_decimal(40)),
        }
    }
}

