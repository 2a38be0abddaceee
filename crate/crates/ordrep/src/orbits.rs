//! Index sets A, their truncations and sumsets, and orbit truncations of x∗A.

use std::fmt;

use thiserror::Error;

use crate::numeric::{
    first_hit, parse_quadratic, Multiplier, NumericError, QuadraticReal, Real, UnitValue,
};

/// Search bound used when a spec does not carry its own.
pub const DEFAULT_SEARCH_BOUND: u64 = 1 << 62;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OrbitError {
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error("search bound {bound} exceeded after {found} elements")]
    SearchBoundExceeded { bound: u64, found: usize },
    #[error("index list must be strictly increasing")]
    NotIncreasing,
    #[error("cannot parse index set {0:?}")]
    Parse(String),
    #[error("{0}")]
    InvalidArgument(String),
}

#[derive(Clone, Debug, PartialEq)]
pub enum IndexSetSpec {
    Explicit(Vec<u64>),
    FibEven { shift: i64 },
    Powers(u64),
    Sumset { h: usize, inner: Box<IndexSetSpec> },
    MonotoneApproach { x: QuadraticReal, count: usize },
    Constructed(Vec<u64>),
}

fn strictly_increasing(a: &[u64]) -> bool {
    a.windows(2).all(|w| w[0] < w[1])
}

fn parse_list(s: &str) -> Result<Vec<u64>, OrbitError> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    let v = s
        .split(',')
        .map(|t| t.trim().parse::<u64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| OrbitError::Parse(s.to_string()))?;
    if !strictly_increasing(&v) {
        return Err(OrbitError::NotIncreasing);
    }
    Ok(v)
}

impl IndexSetSpec {
    pub fn parse(s: &str) -> Result<Self, OrbitError> {
        let s = s.trim();
        let err = || OrbitError::Parse(s.to_string());
        if let Some(rest) = s.strip_prefix("explicit:") {
            return Ok(IndexSetSpec::Explicit(parse_list(rest)?));
        }
        if let Some(rest) = s.strip_prefix("constructed:") {
            return Ok(IndexSetSpec::Constructed(parse_list(rest)?));
        }
        if let Some(rest) = s.strip_prefix("fibeven") {
            let shift = match rest {
                "" => 0,
                r => r.strip_prefix('+').unwrap_or(r).parse::<i64>().map_err(|_| err())?,
            };
            return Ok(IndexSetSpec::FibEven { shift });
        }
        if let Some(rest) = s.strip_prefix("powers:") {
            let b: u64 = rest.trim().parse().map_err(|_| err())?;
            if b < 2 {
                return Err(OrbitError::InvalidArgument("power base must be at least 2".into()));
            }
            return Ok(IndexSetSpec::Powers(b));
        }
        if let Some(rest) = s.strip_prefix("sumset:h=") {
            let open = rest.find('(').ok_or_else(err)?;
            let h: usize = rest[..open].parse().map_err(|_| err())?;
            let inner = rest[open + 1..].strip_suffix(')').ok_or_else(err)?;
            if h == 0 {
                return Err(OrbitError::InvalidArgument("sumset needs h >= 1".into()));
            }
            return Ok(IndexSetSpec::Sumset { h, inner: Box::new(IndexSetSpec::parse(inner)?) });
        }
        if let Some(rest) = s.strip_prefix("monotone:x=") {
            let (x, count) = rest.rsplit_once(",count=").ok_or_else(err)?;
            let x = parse_quadratic(x)?;
            let count = count.parse().map_err(|_| err())?;
            return Ok(IndexSetSpec::MonotoneApproach { x, count });
        }
        Err(err())
    }
}

fn join(v: &[u64]) -> String {
    v.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

impl fmt::Display for IndexSetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IndexSetSpec::Explicit(v) => write!(f, "explicit:{}", join(v)),
            IndexSetSpec::Constructed(v) => write!(f, "constructed:{}", join(v)),
            IndexSetSpec::FibEven { shift: 0 } => write!(f, "fibeven"),
            IndexSetSpec::FibEven { shift } if *shift > 0 => write!(f, "fibeven+{shift}"),
            IndexSetSpec::FibEven { shift } => write!(f, "fibeven{shift}"),
            IndexSetSpec::Powers(b) => write!(f, "powers:{b}"),
            IndexSetSpec::Sumset { h, inner } => write!(f, "sumset:h={h}({inner})"),
            IndexSetSpec::MonotoneApproach { x, count } => {
                write!(f, "monotone:x={x},count={count}")
            }
        }
    }
}

/// Elements of the set up to `limit`; for monotone approaches, the first
/// `min(count, limit)` elements.
pub fn enumerate(spec: &IndexSetSpec, limit: u64) -> Result<Vec<u64>, OrbitError> {
    Ok(match spec {
        IndexSetSpec::Explicit(v) | IndexSetSpec::Constructed(v) => {
            if !strictly_increasing(v) {
                return Err(OrbitError::NotIncreasing);
            }
            v.iter().copied().filter(|&a| a <= limit).collect()
        }
        IndexSetSpec::FibEven { shift } => {
            let mut out = Vec::new();
            let (mut a, mut b) = (0u128, 1u128);
            for n in 1.. {
                (a, b) = (b, a + b);
                if n % 2 != 0 {
                    continue;
                }
                let v = a as i128 + *shift as i128;
                if v > limit as i128 {
                    break;
                }
                if v >= 0 {
                    out.push(v as u64);
                }
            }
            out
        }
        IndexSetSpec::Powers(b) => {
            let mut out = Vec::new();
            let mut p = 1u64;
            while p <= limit {
                out.push(p);
                match p.checked_mul(*b) {
                    Some(q) => p = q,
                    None => break,
                }
            }
            out
        }
        IndexSetSpec::Sumset { h, inner } => sumset(&enumerate(inner, limit)?, *h, limit),
        IndexSetSpec::MonotoneApproach { x, count } => {
            let n = (*count as u64).min(limit) as usize;
            monotone_approach(x, n, DEFAULT_SEARCH_BOUND)?
        }
    })
}

/// {a_1 + … + a_h : a_i ∈ A} ∩ [0, cap], sorted and deduplicated.
pub fn sumset(a: &[u64], h: usize, cap: u64) -> Vec<u64> {
    fn walk(a: &[u64], h: usize, from: usize, acc: u64, cap: u64, out: &mut Vec<u64>) {
        if h == 0 {
            out.push(acc);
            return;
        }
        for i in from..a.len() {
            let s = match acc.checked_add(a[i]) {
                Some(s) if s <= cap => s,
                _ => break,
            };
            walk(a, h - 1, i, s, cap, out);
        }
    }
    let mut sorted = a.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut out = Vec::new();
    walk(&sorted, h, 0, 0, cap, &mut out);
    out.sort_unstable();
    out.dedup();
    out
}

/// Truncation of x∗A in index order.
#[derive(Clone, Debug, PartialEq)]
pub struct Orbit {
    multiplier: Multiplier,
    entries: Vec<(u64, UnitValue)>,
}

impl Orbit {
    pub fn multiplier(&self) -> &Multiplier {
        &self.multiplier
    }
    pub fn entries(&self) -> &[(u64, UnitValue)] {
        &self.entries
    }
    pub fn len(&self) -> usize {
        self.entries.len()
    }
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
    pub fn indices(&self) -> Vec<u64> {
        self.entries.iter().map(|(a, _)| *a).collect()
    }
    pub fn values(&self) -> Vec<Real> {
        self.entries.iter().map(|(_, v)| v.value().clone()).collect()
    }
    /// The first `n` entries.
    pub fn prefix(&self, n: usize) -> Orbit {
        Orbit {
            multiplier: self.multiplier.clone(),
            entries: self.entries[..n.min(self.entries.len())].to_vec(),
        }
    }
}

pub fn orbit(x: &Multiplier, a: &[u64]) -> Result<Orbit, OrbitError> {
    if !strictly_increasing(a) {
        return Err(OrbitError::NotIncreasing);
    }
    let entries = a
        .iter()
        .map(|&n| Ok((n, x.frac_mul(n)?)))
        .collect::<Result<Vec<_>, NumericError>>()?;
    Ok(Orbit { multiplier: x.clone(), entries })
}

/// Greedy indices whose fractional parts rise to 1, each step at least
/// halving the distance to 1.
pub fn monotone_approach(
    x: &QuadraticReal,
    count: usize,
    search_bound: u64,
) -> Result<Vec<u64>, OrbitError> {
    let m = Multiplier::quadratic(x.clone())?;
    let one = Real::one();
    let half = crate::numeric::Rational::new(1.into(), 2.into());
    let mut out = Vec::with_capacity(count);
    let mut last: Option<(u64, Real)> = None;
    while out.len() < count {
        let (lo, from) = match &last {
            None => (Real::zero(), 1),
            Some((a, v)) => (one.add(v).mul_rational(&half), a + 1),
        };
        let n = first_hit(&m, &lo, &one, from, search_bound)?.ok_or(
            OrbitError::SearchBoundExceeded { bound: search_bound, found: out.len() },
        )?;
        out.push(n);
        last = Some((n, m.frac_mul(n)?.into_real()));
    }
    Ok(out)
}
