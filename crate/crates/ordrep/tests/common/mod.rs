#![allow(dead_code)]

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

/// Newton iteration for floor(sqrt(n)); deliberately independent of the library.
pub fn newton_isqrt(n: &BigInt) -> BigInt {
    if n.is_zero() {
        return BigInt::zero();
    }
    let mut x = n.clone();
    loop {
        let y = (&x + n / &x) >> 1;
        if y >= x {
            return x;
        }
        x = y;
    }
}

/// floor(10^digits * frac(n * (a + b*sqrt(d)) / c)) using only integer Newton roots.
pub fn frac_digits(a: i64, b: i64, d: u64, c: i64, n: u64, digits: u32) -> BigInt {
    let scale = BigInt::from(10u32).pow(digits + 30);
    let root = newton_isqrt(&(BigInt::from(d) * &scale * &scale));
    let v = (BigInt::from(a) * &scale + BigInt::from(b) * root) * BigInt::from(n) / BigInt::from(c);
    let f = ((&v % &scale) + &scale) % &scale;
    f / BigInt::from(10u32).pow(30)
}

/// Parse a decimal like "0.854102" into (value * 10^digits) for comparison.
pub fn decimal_close(got: &str, want: &str, tol_digits: usize) -> bool {
    let g: Vec<char> = got.chars().collect();
    let w: Vec<char> = want.chars().collect();
    let n = tol_digits.min(g.len()).min(w.len());
    g[..n] == w[..n]
}

pub fn abs_diff_lt(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() < tol && a.is_finite()
}

pub fn bigint_abs(x: &BigInt) -> BigInt {
    x.abs()
}
