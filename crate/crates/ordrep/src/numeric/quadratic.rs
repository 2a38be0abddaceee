use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{NumericError, Rational};

/// Exact number of the form (p + q√d)/r.
///
/// Irrational values keep `d` squarefree and at least 2. Rational values have
/// `q = 0` and `d = 1`; they combine with any radicand.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadraticReal {
    p: BigInt,
    q: BigInt,
    d: u64,
    r: BigInt,
}

fn squarefree_split(d: u64) -> (u64, u64) {
    // d = s^2 * core
    let mut core = 1u64;
    let mut s = 1u64;
    let mut rest = d;
    let mut f = 2u64;
    while f * f <= rest {
        let mut e = 0;
        while rest % f == 0 {
            rest /= f;
            e += 1;
        }
        s *= f.pow(e / 2);
        if e % 2 == 1 {
            core *= f;
        }
        f += 1;
    }
    core *= rest;
    (s, core)
}

/// floor(q * sqrt(d)) for d >= 1.
pub(crate) fn floor_q_sqrt(q: &BigInt, d: u64) -> BigInt {
    let sq = q * q * BigInt::from(d);
    let s = sq.sqrt();
    if q.is_negative() {
        if &s * &s == sq {
            -s
        } else {
            -s - 1
        }
    } else {
        s
    }
}

/// Sign of a + b·√d.
fn sign_of(a: &BigInt, b: &BigInt, d: u64) -> Ordering {
    let sa = a.sign();
    let sb = b.sign();
    use num_bigint::Sign::*;
    match (sa, sb) {
        (NoSign, NoSign) => Ordering::Equal,
        (_, NoSign) => a.cmp(&BigInt::zero()),
        (NoSign, _) => b.cmp(&BigInt::zero()),
        (Plus, Plus) => Ordering::Greater,
        (Minus, Minus) => Ordering::Less,
        _ => {
            let a2 = a * a;
            let b2d = b * b * BigInt::from(d);
            if sa == Plus {
                a2.cmp(&b2d)
            } else {
                b2d.cmp(&a2)
            }
        }
    }
}

impl QuadraticReal {
    pub fn new(p: BigInt, q: BigInt, d: u64, r: BigInt) -> Result<Self, NumericError> {
        if r.is_zero() {
            return Err(NumericError::DivisionByZero);
        }
        if d == 0 && !q.is_zero() {
            return Err(NumericError::InvalidArgument("radicand must be positive".into()));
        }
        let (s, core) = if d == 0 { (0, 1) } else { squarefree_split(d) };
        let (mut p, mut q) = (p, q * BigInt::from(s));
        let mut d = core;
        if d == 1 {
            p += &q;
            q = BigInt::zero();
        }
        if q.is_zero() {
            d = 1;
        }
        let mut r = r;
        if r.is_negative() {
            p = -p;
            q = -q;
            r = -r;
        }
        let g = p.gcd(&q).gcd(&r);
        if !g.is_one() && !g.is_zero() {
            p /= &g;
            q /= &g;
            r /= &g;
        }
        Ok(QuadraticReal { p, q, d, r })
    }

    pub fn from_rational(x: &Rational) -> Self {
        QuadraticReal::new(x.numer().clone(), BigInt::zero(), 1, x.denom().clone())
            .expect("rational denominators are nonzero")
    }

    pub fn from_int(n: i64) -> Self {
        QuadraticReal::new(BigInt::from(n), BigInt::zero(), 1, BigInt::one()).unwrap()
    }

    pub fn sqrt(d: u64) -> Result<Self, NumericError> {
        QuadraticReal::new(BigInt::zero(), BigInt::one(), d, BigInt::one())
    }

    /// The golden ratio (1+√5)/2.
    pub fn phi() -> Self {
        QuadraticReal::new(BigInt::one(), BigInt::one(), 5, BigInt::from(2)).unwrap()
    }

    pub fn p(&self) -> &BigInt {
        &self.p
    }
    pub fn q(&self) -> &BigInt {
        &self.q
    }
    pub fn d(&self) -> u64 {
        self.d
    }
    pub fn r(&self) -> &BigInt {
        &self.r
    }

    pub fn is_rational(&self) -> bool {
        self.q.is_zero()
    }

    pub fn as_rational(&self) -> Option<Rational> {
        self.is_rational()
            .then(|| Rational::new(self.p.clone(), self.r.clone()))
    }

    fn common_d(&self, other: &Self) -> Result<u64, NumericError> {
        match (self.is_rational(), other.is_rational()) {
            (true, true) => Ok(1),
            (true, false) => Ok(other.d),
            (false, true) => Ok(self.d),
            (false, false) if self.d == other.d => Ok(self.d),
            _ => Err(NumericError::IncomparableRadicands(self.d, other.d)),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, NumericError> {
        let d = self.common_d(other)?;
        QuadraticReal::new(
            &self.p * &other.r + &other.p * &self.r,
            &self.q * &other.r + &other.q * &self.r,
            d,
            &self.r * &other.r,
        )
    }

    pub fn neg(&self) -> Self {
        QuadraticReal { p: -&self.p, q: -&self.q, d: self.d, r: self.r.clone() }
    }

    pub fn sub(&self, other: &Self) -> Result<Self, NumericError> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self, NumericError> {
        let d = self.common_d(other)?;
        let p = &self.p * &other.p + &self.q * &other.q * BigInt::from(d);
        let q = &self.p * &other.q + &self.q * &other.p;
        QuadraticReal::new(p, q, d, &self.r * &other.r)
    }

    pub fn mul_int(&self, n: &BigInt) -> Self {
        QuadraticReal::new(&self.p * n, &self.q * n, self.d, self.r.clone()).unwrap()
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = QuadraticReal::from_int(1);
        for _ in 0..k {
            acc = acc.mul(self).expect("same radicand");
        }
        acc
    }

    pub fn signum(&self) -> Ordering {
        sign_of(&self.p, &self.q, self.d)
    }

    pub fn floor(&self) -> BigInt {
        let f = if self.q.is_zero() { BigInt::zero() } else { floor_q_sqrt(&self.q, self.d) };
        (&self.p + f).div_floor(&self.r)
    }

    /// floor(self * 2^bits)
    pub fn floor_scaled_pow2(&self, bits: u32) -> BigInt {
        let s = BigInt::one() << bits;
        self.mul_int(&s).floor()
    }

    /// floor(self * 10^k)
    pub fn floor_scaled_pow10(&self, k: u32) -> BigInt {
        self.mul_int(&BigInt::from(10u32).pow(k)).floor()
    }

    pub fn abs(&self) -> Self {
        if self.signum() == Ordering::Less {
            self.neg()
        } else {
            self.clone()
        }
    }
}

/// Exact comparison by the sign of the difference.
pub fn quad_compare(a: &QuadraticReal, b: &QuadraticReal) -> Result<Ordering, NumericError> {
    Ok(a.sub(b)?.signum())
}

impl fmt::Display for QuadraticReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.q.is_zero() {
            if self.r.is_one() {
                write!(f, "{}", self.p)
            } else {
                write!(f, "{}/{}", self.p, self.r)
            }
        } else {
            let sign = if self.q.is_negative() { '-' } else { '+' };
            write!(f, "({}{}{}*sqrt({}))/{}", self.p, sign, self.q.abs(), self.d, self.r)
        }
    }
}
