use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::approx::VerifiedApprox;
use super::quadratic::QuadraticReal;
use super::real::{Multiplier, Real};
use super::{NumericError, Rational};

fn bad(s: &str) -> NumericError {
    NumericError::Parse(s.to_string())
}

fn int(s: &str) -> Result<BigInt, NumericError> {
    s.parse::<BigInt>().map_err(|_| bad(s))
}

/// "p/q" or "p".
pub fn parse_rational(s: &str) -> Result<Rational, NumericError> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    match s.split_once('/') {
        Some((p, q)) => {
            let q = int(q)?;
            if q.is_zero() {
                return Err(NumericError::DivisionByZero);
            }
            Ok(Rational::new(int(p)?, q))
        }
        None => Ok(Rational::from_integer(int(&s)?)),
    }
}

/// "phi", "phi^k", "sqrt(d)", "(p+q*sqrt(d))/r", or a rational.
pub fn parse_quadratic(s: &str) -> Result<QuadraticReal, NumericError> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if s == "phi" {
        return Ok(QuadraticReal::phi());
    }
    if let Some(k) = s.strip_prefix("phi^") {
        let k: u32 = k.parse().map_err(|_| bad(&s))?;
        return Ok(QuadraticReal::phi().pow(k));
    }
    let Some(at) = s.find("sqrt(") else {
        return Ok(QuadraticReal::from_rational(&parse_rational(&s)?));
    };
    let close = s[at..].find(')').map(|i| i + at).ok_or_else(|| bad(&s))?;
    let d: u64 = s[at + 5..close].parse().map_err(|_| bad(&s))?;
    let mut head = &s[..at];
    let mut tail = &s[close + 1..];
    let wrapped = head.starts_with('(');
    if wrapped {
        head = &head[1..];
        tail = tail.strip_prefix(')').ok_or_else(|| bad(&s))?;
    }
    let r = match tail {
        "" => BigInt::one(),
        t => int(t.strip_prefix('/').ok_or_else(|| bad(&s))?)?,
    };
    let coeff = head.strip_suffix('*').unwrap_or(head);
    let split = coeff
        .char_indices()
        .rev()
        .find(|&(i, c)| i > 0 && (c == '+' || c == '-'))
        .map(|(i, _)| i);
    let (p, qs) = match split {
        Some(i) => (int(&coeff[..i])?, &coeff[i..]),
        None => (BigInt::zero(), coeff),
    };
    let q = match qs {
        "" | "+" => BigInt::one(),
        "-" => -BigInt::one(),
        t => int(t.strip_prefix('+').unwrap_or(t))?,
    };
    QuadraticReal::new(p, q, d, r)
}

/// "dec:3.14159~50": the value lies within 10^-50 of the written decimal.
pub fn parse_decimal(s: &str) -> Result<VerifiedApprox, NumericError> {
    let body = s.trim().strip_prefix("dec:").ok_or_else(|| bad(s))?;
    let (digits, claim) = match body.split_once('~') {
        Some((d, c)) => (d, Some(c.parse::<u32>().map_err(|_| bad(s))?)),
        None => (body, None),
    };
    let (ip, fp) = digits.split_once('.').unwrap_or((digits, ""));
    if fp.chars().any(|c| !c.is_ascii_digit()) {
        return Err(bad(s));
    }
    let frac_len = fp.len() as u32;
    let claim = claim.unwrap_or(frac_len);
    let neg = ip.starts_with('-');
    let mag = int(&format!("{}{}", ip.trim_start_matches('-'), fp))?;
    let num = if neg { -mag } else { mag };
    let value = Rational::new(num, BigInt::from(10u32).pow(frac_len));
    let half = Rational::new(BigInt::one(), BigInt::from(10u32).pow(claim));
    let bits = claim * 10 / 3 + 16;
    Ok(VerifiedApprox::enclose(&value, &half, bits))
}

pub fn parse_multiplier(s: &str) -> Result<Multiplier, NumericError> {
    if s.trim().starts_with("dec:") {
        Ok(Multiplier::Approx(parse_decimal(s)?))
    } else {
        Multiplier::quadratic(parse_quadratic(s)?)
    }
}

pub fn parse_real(s: &str) -> Result<Real, NumericError> {
    if s.trim().starts_with("dec:") {
        Ok(Real::Approx(parse_decimal(s)?))
    } else {
        Ok(Real::Exact(parse_quadratic(s)?))
    }
}
