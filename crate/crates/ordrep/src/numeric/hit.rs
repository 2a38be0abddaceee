use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::real::{ApproxSource, Multiplier, Real};
use super::NumericError;

const WORK_BITS: u32 = 192;

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_ceil(b)
}

/// Smallest t >= 0 with l <= (a·t mod m) <= r, for 0 <= l <= r < m.
pub(crate) fn first_multiple_in(a: &BigInt, m: &BigInt, l: &BigInt, r: &BigInt) -> Option<BigInt> {
    if l.is_zero() {
        return Some(BigInt::zero());
    }
    let a = a.mod_floor(m);
    if a.is_zero() {
        return None;
    }
    let t = ceil_div(l, &a);
    if &a * &t <= *r {
        return Some(t);
    }
    let lo = (-r).mod_floor(&a);
    let hi = (-l).mod_floor(&a);
    if lo > hi {
        return None;
    }
    let k = first_multiple_in(&m.mod_floor(&a), &a, &lo, &hi)?;
    Some(ceil_div(&(l + m * k), &a))
}

/// Smallest t >= 0 with (b + a·t) mod m in the cyclic range [l, r].
fn first_shifted(a: &BigInt, b: &BigInt, m: &BigInt, l: &BigInt, r: &BigInt) -> Option<BigInt> {
    let l2 = (l - b).mod_floor(m);
    let r2 = (r - b).mod_floor(m);
    if l2 <= r2 {
        first_multiple_in(a, m, &l2, &r2)
    } else {
        let top = m - 1;
        let x = first_multiple_in(a, m, &l2, &top);
        let y = first_multiple_in(a, m, &BigInt::zero(), &r2);
        match (x, y) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, y) => x.or(y),
        }
    }
}

/// Smallest n in [start, bound] with frac(n·x) in the open interval (lo, hi).
///
/// Candidates come from a fixed-point search over a slightly widened window
/// and are then confirmed with the exact (or verified) fractional part.
pub fn first_hit(
    x: &Multiplier,
    lo: &Real,
    hi: &Real,
    start: u64,
    bound: u64,
) -> Result<Option<u64>, NumericError> {
    let modulus = BigInt::one() << WORK_BITS;
    let xa = x.approx_at(WORK_BITS).at_bits(WORK_BITS);
    let alpha = xa.mantissa().mod_floor(&modulus);
    let err = BigInt::from(xa.radius_ulps().clone());
    let delta = BigInt::from(bound) * &err + 2;
    let lo_l: BigInt = lo.approx_at(WORK_BITS).at_bits(WORK_BITS).lower_ulps() - &delta;
    let hi_u: BigInt = hi.approx_at(WORK_BITS).at_bits(WORK_BITS).upper_ulps() + &delta;
    let full = &hi_u - &lo_l >= modulus;
    let (l, r) = (lo_l.mod_floor(&modulus), hi_u.mod_floor(&modulus));

    let mut s = start;
    while s <= bound {
        let t = if full {
            BigInt::zero()
        } else {
            let beta = (BigInt::from(s) * xa.mantissa()).mod_floor(&modulus);
            let cand = if l <= r {
                first_shifted(&alpha, &beta, &modulus, &l, &r)
            } else {
                let a = first_shifted(&alpha, &beta, &modulus, &l, &(&modulus - 1));
                let b = first_shifted(&alpha, &beta, &modulus, &BigInt::zero(), &r);
                match (a, b) {
                    (Some(a), Some(b)) => Some(a.min(b)),
                    (a, b) => a.or(b),
                }
            };
            match cand {
                Some(t) => t,
                None => return Ok(None),
            }
        };
        let n = BigInt::from(s) + t;
        if n > BigInt::from(bound) {
            return Ok(None);
        }
        let n: u64 = n.try_into().expect("n <= bound");
        let v = x.frac_mul(n)?;
        if lo.lt(v.value())? && v.value().lt(hi)? {
            return Ok(Some(n));
        }
        s = n + 1;
    }
    Ok(None)
}
