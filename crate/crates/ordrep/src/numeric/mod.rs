//! Exact quadratic arithmetic and verified intervals for fractional parts.

mod approx;
mod hit;
mod parse;
mod quadratic;
mod real;

use num_bigint::{BigInt, BigUint};
use num_integer::Roots;
use num_traits::{One, Zero};
use thiserror::Error;

pub use approx::VerifiedApprox;
pub use hit::first_hit;
pub use parse::{parse_decimal, parse_multiplier, parse_quadratic, parse_rational, parse_real};
pub use quadratic::{quad_compare, QuadraticReal};
pub use real::{
    approx_frac_mul, precision_ceiling, quad_frac_mul, set_precision_ceiling, ApproxSource,
    Multiplier, Real, UnitValue,
};

pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumericError {
    #[error("incomparable radicands {0} and {1}")]
    IncomparableRadicands(u64, u64),
    #[error("precision budget exhausted; at least {0} bits required")]
    PrecisionExhausted(u32),
    #[error("comparison is ambiguous at the available precision")]
    AmbiguousComparison,
    #[error("rational multipliers are not supported")]
    RationalMultiplier,
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse number literal {0:?}")]
    Parse(String),
    #[error("{0}")]
    InvalidArgument(String),
}

/// F_n with F_0 = 0, F_1 = 1.
pub fn fibonacci(n: u64) -> BigUint {
    let (mut a, mut b) = (BigUint::zero(), BigUint::one());
    for _ in 0..n {
        let c = &a + &b;
        a = b;
        b = c;
    }
    a
}

/// F_n when it fits in a u64.
pub fn fibonacci_u64(n: u64) -> Option<u64> {
    fibonacci(n).try_into().ok()
}

/// φ·F_n − F_{n+1}.
pub fn golden_gap(n: u64) -> QuadraticReal {
    let f = BigInt::from(fibonacci(n));
    let g = BigInt::from(fibonacci(n + 1));
    QuadraticReal::phi()
        .mul_int(&f)
        .sub(&QuadraticReal::new(g, BigInt::zero(), 1, BigInt::one()).unwrap())
        .unwrap()
}

pub fn is_triangular(i: u64) -> bool {
    let m = 8 * (i as u128) + 1;
    let s = m.sqrt();
    s * s == m
}
