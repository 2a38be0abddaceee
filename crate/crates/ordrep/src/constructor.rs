//! Realizing countable order types as x∗A: interval layouts, Weyl hits,
//! thin constructions, density and the thickening stages.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::numeric::{first_hit, Multiplier, NumericError, Rational, Real};
use crate::orbits::{orbit, Orbit, OrbitError};
use crate::ordertype::{eps_derived, sort_distinct, two_sided_signature, DerivedParams, OrderTypeError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConstructorError {
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error(transparent)]
    Orbit(#[from] OrbitError),
    #[error(transparent)]
    OrderType(#[from] OrderTypeError),
    #[error("no hit found below search bound {0}")]
    BoundExceeded(u64),
    #[error("thin bound leaves no room for element {0} below the search bound")]
    ThinnessInfeasible(usize),
    #[error("invalid order type: {0}")]
    InvalidSpec(String),
    #[error("cannot parse {0:?}")]
    Parse(String),
    #[error("{targets} targets but {multipliers} multipliers")]
    LengthMismatch { targets: usize, multipliers: usize },
    #[error("thickening needs ordinal targets")]
    NotOrdinal,
    #[error("thickness target rejected: {0}")]
    InadmissibleTheta(String),
    #[error("no limit point found at this scale")]
    NoLimitPoint,
    #[error("orbit is not ordinal-like at this scale")]
    NotOrdinalLike,
    #[error("multipliers look linearly dependent over Q: {0}")]
    LinearDependence(String),
}

fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

fn pow2(m: u32) -> Rational {
    Rational::from_integer(BigInt::one() << m as usize)
}

/// Open interval (lo, hi) inside (0, 1).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntervalSpec {
    pub lo: Rational,
    pub hi: Rational,
}

impl IntervalSpec {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self, ConstructorError> {
        if lo.is_negative() || hi > Rational::one() || lo >= hi {
            return Err(ConstructorError::InvalidSpec(format!("bad interval ({lo}, {hi})")));
        }
        Ok(IntervalSpec { lo, hi })
    }

    pub fn length(&self) -> Rational {
        &self.hi - &self.lo
    }

    fn scaled(&self, a: &Rational, b: &Rational) -> IntervalSpec {
        let w = self.length();
        IntervalSpec { lo: &self.lo + &w * a, hi: &self.lo + &w * b }
    }

    fn middle_half(&self) -> IntervalSpec {
        self.scaled(&rat(1, 4), &rat(3, 4))
    }

    pub fn contains(&self, v: &Real) -> Result<bool, NumericError> {
        Ok(Real::from_rational(&self.lo).lt(v)? && v.lt(&Real::from_rational(&self.hi))?)
    }

    /// Strictly below `other` with a positive gap.
    pub fn precedes(&self, other: &IntervalSpec) -> bool {
        self.hi < other.lo
    }
}

impl fmt::Display for IntervalSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lo, self.hi)
    }
}

/// Open interval with real endpoints.
#[derive(Clone, Debug, PartialEq)]
pub struct RealInterval {
    pub lo: Real,
    pub hi: Real,
}

impl RealInterval {
    pub fn length(&self) -> Real {
        self.hi.sub(&self.lo)
    }
    pub fn contains(&self, v: &Real) -> Result<bool, NumericError> {
        Ok(self.lo.lt(v)? && v.lt(&self.hi)?)
    }
}

pub const MAX_CNF_EXPONENT: u32 = 4;
pub const MAX_CNF_COEFFICIENT: u64 = 9;

#[derive(Clone, Debug, PartialEq)]
pub enum OrderTypeSpec {
    Finite(u64),
    /// ω^e·c terms with strictly decreasing exponents.
    Cnf(Vec<(u32, u64)>),
    Integers,
    Rationals,
    Explicit(Vec<IntervalSpec>),
}

impl OrderTypeSpec {
    pub fn cnf(terms: Vec<(u32, u64)>) -> Result<Self, ConstructorError> {
        if terms.is_empty() {
            return Err(ConstructorError::InvalidSpec("empty normal form".into()));
        }
        for (i, &(e, c)) in terms.iter().enumerate() {
            if e > MAX_CNF_EXPONENT || c == 0 || c > MAX_CNF_COEFFICIENT {
                return Err(ConstructorError::InvalidSpec(format!("term omega^{e}*{c} out of range")));
            }
            if i > 0 && terms[i - 1].0 <= e {
                return Err(ConstructorError::InvalidSpec("exponents must decrease".into()));
            }
        }
        if terms.len() == 1 && terms[0].0 == 0 {
            return Ok(OrderTypeSpec::Finite(terms[0].1));
        }
        Ok(OrderTypeSpec::Cnf(terms))
    }

    /// "3", "omega", "omega^2*3+omega+2", "Z", "Q" or
    /// "intervals:(1/3,2/3);(3/4,7/8)".
    pub fn parse(s: &str) -> Result<Self, ConstructorError> {
        let s = s.trim();
        let err = || ConstructorError::Parse(s.to_string());
        match s {
            "Z" => return Ok(OrderTypeSpec::Integers),
            "Q" => return Ok(OrderTypeSpec::Rationals),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("intervals:") {
            let mut out = Vec::new();
            for part in rest.split(';') {
                let inner = part.trim().strip_prefix('(').and_then(|p| p.strip_suffix(')')).ok_or_else(err)?;
                let (a, b) = inner.split_once(',').ok_or_else(err)?;
                let lo = crate::numeric::parse_rational(a.trim()).map_err(|_| err())?;
                let hi = crate::numeric::parse_rational(b.trim()).map_err(|_| err())?;
                out.push(IntervalSpec::new(lo, hi)?);
            }
            return Ok(OrderTypeSpec::Explicit(out));
        }
        if let Ok(n) = s.parse::<u64>() {
            return Ok(OrderTypeSpec::Finite(n));
        }
        let mut terms = Vec::new();
        for term in s.split('+') {
            let term = term.trim();
            let (base, coeff) = match term.split_once('*') {
                Some((b, c)) => (b.trim(), c.trim().parse::<u64>().map_err(|_| err())?),
                None => (term, 1),
            };
            let exp = if base == "omega" {
                1
            } else if let Some(e) = base.strip_prefix("omega^") {
                e.parse::<u32>().map_err(|_| err())?
            } else {
                terms.push((0, base.parse::<u64>().map_err(|_| err())? * coeff));
                continue;
            };
            terms.push((exp, coeff));
        }
        OrderTypeSpec::cnf(terms)
    }

    pub fn is_ordinal(&self) -> bool {
        matches!(self, OrderTypeSpec::Finite(_) | OrderTypeSpec::Cnf(_))
    }
}

impl fmt::Display for OrderTypeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrderTypeSpec::Finite(n) => write!(f, "{n}"),
            OrderTypeSpec::Cnf(terms) => {
                let parts: Vec<String> = terms
                    .iter()
                    .map(|&(e, c)| {
                        let base = match e {
                            0 => return c.to_string(),
                            1 => "omega".to_string(),
                            _ => format!("omega^{e}"),
                        };
                        if c == 1 {
                            base
                        } else {
                            format!("{base}*{c}")
                        }
                    })
                    .collect();
                write!(f, "{}", parts.join("+"))
            }
            OrderTypeSpec::Integers => write!(f, "Z"),
            OrderTypeSpec::Rationals => write!(f, "Q"),
            OrderTypeSpec::Explicit(v) => {
                let parts: Vec<String> = v.iter().map(|i| format!("({},{})", i.lo, i.hi)).collect();
                write!(f, "intervals:{}", parts.join(";"))
            }
        }
    }
}

/// Position of an enumerated element within its order type.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ElementKey {
    Index(u64),
    Cnf { slot: usize, coords: Vec<u64> },
    Int(i64),
    Rat(Rational),
}

/// Gap insertion: each new element takes the middle third of the gap
/// between its placed neighbours.
fn gap_insertion(keys: &[ElementKey]) -> Vec<IntervalSpec> {
    let mut placed: Vec<(ElementKey, IntervalSpec)> = Vec::new();
    let mut out = Vec::with_capacity(keys.len());
    for k in keys {
        let pos = placed.partition_point(|(p, _)| p < k);
        let lo = if pos == 0 { Rational::zero() } else { placed[pos - 1].1.hi.clone() };
        let hi = if pos == placed.len() { Rational::one() } else { placed[pos].1.lo.clone() };
        let gap = IntervalSpec { lo, hi };
        let iv = gap.scaled(&rat(1, 3), &rat(2, 3));
        placed.insert(pos, (k.clone(), iv.clone()));
        out.push(iv);
    }
    out
}

/// Tuples of ℕ^dim with coordinate sum `total`, lexicographically.
fn compositions(total: u64, dim: usize) -> Vec<Vec<u64>> {
    if dim == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, dim - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Tuples of ℕ^dim by coordinate sum, then lexicographically.
pub fn diagonal_tuples(dim: usize, count: usize) -> Vec<Vec<u64>> {
    let mut out = Vec::with_capacity(count);
    let mut total = 0;
    while out.len() < count {
        out.extend(compositions(total, dim).into_iter().take(count - out.len()));
        total += 1;
    }
    out
}

fn cnf_layout(terms: &[(u32, u64)], count: usize) -> Vec<(ElementKey, IntervalSpec)> {
    let slots: Vec<u32> = terms.iter().flat_map(|&(e, c)| std::iter::repeat(e).take(c as usize)).collect();
    let t = slots.len() as i64;
    let mut out = Vec::with_capacity(count);
    let mut d = 0u64;
    while out.len() < count {
        for (s, &e) in slots.iter().enumerate() {
            if (s as u64) > d {
                break;
            }
            for coords in compositions(d - s as u64, e as usize) {
                if out.len() == count {
                    break;
                }
                let mut iv = IntervalSpec { lo: rat(s as i64, t), hi: rat(s as i64 + 1, t) };
                for &m in &coords {
                    let m = m as u32;
                    iv = iv.scaled(&(Rational::one() - pow2(m).recip()), &(Rational::one() - pow2(m + 1).recip()));
                }
                out.push((ElementKey::Cnf { slot: s, coords }, iv.middle_half()));
            }
        }
        d += 1;
        if slots.iter().all(|&e| e == 0) && d as usize > slots.len() {
            break;
        }
    }
    out
}

fn int_interval(z: i64) -> IntervalSpec {
    let block = if z > 0 {
        let k = (z - 1) as u32;
        IntervalSpec { lo: Rational::one() - pow2(k + 1).recip(), hi: Rational::one() - pow2(k + 2).recip() }
    } else {
        let k = (-z) as u32;
        IntervalSpec { lo: pow2(k + 2).recip(), hi: pow2(k + 1).recip() }
    };
    block.middle_half()
}

/// Stern–Brocot order in (0,1), breadth first.
fn stern_brocot(count: usize) -> Vec<Rational> {
    let mut out = Vec::with_capacity(count);
    let mut level: Vec<(Rational, Rational)> = vec![(Rational::zero(), Rational::one())];
    while out.len() < count {
        let mut next = Vec::with_capacity(level.len() * 2);
        for (a, b) in level {
            let m = Rational::new(a.numer() + b.numer(), a.denom() + b.denom());
            out.push(m.clone());
            next.push((a, m.clone()));
            next.push((m, b));
        }
        level = next;
    }
    out.truncate(count);
    out
}

/// The first `count` elements of the order type with their intervals, in
/// enumeration order.
pub fn layout(spec: &OrderTypeSpec, count: usize) -> Result<Vec<(ElementKey, IntervalSpec)>, ConstructorError> {
    if count == 0 {
        return Err(ConstructorError::InvalidSpec("count must be positive".into()));
    }
    Ok(match spec {
        OrderTypeSpec::Finite(n) => {
            let keys: Vec<ElementKey> = (0..(*n).min(count as u64)).map(ElementKey::Index).collect();
            keys.iter().cloned().zip(gap_insertion(&keys)).collect()
        }
        OrderTypeSpec::Cnf(terms) => cnf_layout(terms, count),
        OrderTypeSpec::Integers => (0..count as i64)
            .map(|i| {
                let z = if i % 2 == 1 { (i + 1) / 2 } else { -i / 2 };
                (ElementKey::Int(z), int_interval(z))
            })
            .collect(),
        OrderTypeSpec::Rationals => {
            let keys: Vec<ElementKey> = stern_brocot(count).into_iter().map(ElementKey::Rat).collect();
            keys.iter().cloned().zip(gap_insertion(&keys)).collect()
        }
        OrderTypeSpec::Explicit(v) => {
            let mut sorted: Vec<&IntervalSpec> = v.iter().collect();
            sorted.sort_by(|a, b| a.lo.cmp(&b.lo));
            if sorted.windows(2).any(|p| !p[0].precedes(p[1])) {
                return Err(ConstructorError::InvalidSpec("explicit intervals overlap".into()));
            }
            v.iter().take(count).map(|iv| (ElementKey::Rat(iv.lo.clone()), iv.clone())).collect()
        }
    })
}

pub fn intervals_for(spec: &OrderTypeSpec, count: usize) -> Result<Vec<IntervalSpec>, ConstructorError> {
    Ok(layout(spec, count)?.into_iter().map(|(_, iv)| iv).collect())
}

/// Smallest n in [start, bound] with n·x_i mod 1 in interval i for every i.
pub fn find_hit(xs: &[Multiplier], intervals: &[IntervalSpec], start: u64, bound: u64) -> Result<u64, ConstructorError> {
    if xs.is_empty() || xs.len() != intervals.len() {
        return Err(ConstructorError::LengthMismatch { targets: intervals.len(), multipliers: xs.len() });
    }
    let lo = Real::from_rational(&intervals[0].lo);
    let hi = Real::from_rational(&intervals[0].hi);
    let mut from = start;
    loop {
        let n = first_hit(&xs[0], &lo, &hi, from, bound)?.ok_or(ConstructorError::BoundExceeded(bound))?;
        let mut ok = true;
        for (x, iv) in xs.iter().zip(intervals).skip(1) {
            if !iv.contains(&x.frac_mul(n)?.into_real())? {
                ok = false;
                break;
            }
        }
        if ok {
            return Ok(n);
        }
        if n >= bound {
            return Err(ConstructorError::BoundExceeded(bound));
        }
        from = n + 1;
    }
}

/// Ψ in "|A ∩ [0,n)| ≤ Ψ(n)".
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ThinBound {
    Sqrt,
    Log2,
    /// Ψ(n) is the value at the last breakpoint ≤ n, 0 before the first.
    Table(Vec<(u64, u64)>),
    Unbounded,
}

impl ThinBound {
    pub fn eval(&self, n: u64) -> u64 {
        match self {
            ThinBound::Sqrt => {
                let r = n.isqrt();
                if r * r == n { r } else { r + 1 }
            }
            ThinBound::Log2 => ceil_log2(n.saturating_add(1)),
            ThinBound::Table(t) => {
                let i = t.partition_point(|&(b, _)| b <= n);
                if i == 0 { 0 } else { t[i - 1].1 }
            }
            ThinBound::Unbounded => u64::MAX,
        }
    }

    /// "sqrt", "log2", "none" or "table:0=1,100=2".
    pub fn parse(s: &str) -> Result<Self, ConstructorError> {
        let s = s.trim();
        let err = || ConstructorError::Parse(s.to_string());
        match s {
            "sqrt" => return Ok(ThinBound::Sqrt),
            "log2" => return Ok(ThinBound::Log2),
            "none" => return Ok(ThinBound::Unbounded),
            _ => {}
        }
        let rest = s.strip_prefix("table:").ok_or_else(err)?;
        let mut t = Vec::new();
        for kv in rest.split(',') {
            let (a, b) = kv.split_once('=').ok_or_else(err)?;
            t.push((a.trim().parse().map_err(|_| err())?, b.trim().parse().map_err(|_| err())?));
        }
        if t.windows(2).any(|p: &[(u64, u64)]| p[0].0 >= p[1].0 || p[0].1 > p[1].1) {
            return Err(ConstructorError::InvalidSpec("table must increase".into()));
        }
        Ok(ThinBound::Table(t))
    }

    /// Smallest e ≤ bound with Ψ(e+1) ≥ k.
    fn room_for(&self, k: u64, bound: u64) -> Option<u64> {
        if self.eval(bound.saturating_add(1)) < k {
            return None;
        }
        let (mut lo, mut hi) = (0u64, bound);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if self.eval(mid + 1) >= k {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        Some(lo)
    }
}

impl fmt::Display for ThinBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThinBound::Sqrt => write!(f, "sqrt"),
            ThinBound::Log2 => write!(f, "log2"),
            ThinBound::Unbounded => write!(f, "none"),
            ThinBound::Table(t) => {
                let parts: Vec<String> = t.iter().map(|(a, b)| format!("{a}={b}")).collect();
                write!(f, "table:{}", parts.join(","))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Origin {
    /// Interval index per coordinate.
    Interval(Vec<usize>),
    /// Added by thickening stage m.
    Stage(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Element {
    pub n: u64,
    pub origin: Origin,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstructedSet {
    pub targets: Vec<OrderTypeSpec>,
    pub multipliers: Vec<Multiplier>,
    /// Layout per coordinate.
    pub intervals: Vec<Vec<IntervalSpec>>,
    pub elements: Vec<Element>,
    pub thin: ThinBound,
    pub experimental: bool,
}

impl ConstructedSet {
    pub fn values(&self) -> Vec<u64> {
        self.elements.iter().map(|e| e.n).collect()
    }

    /// |A ∩ [0,n)|
    pub fn count_below(&self, n: u64) -> usize {
        self.elements.partition_point(|e| e.n < n)
    }

    /// (n, |A ∩ [0,n)|) just past every element.
    pub fn counting_samples(&self) -> Vec<(u64, usize)> {
        self.elements.iter().enumerate().map(|(i, e)| (e.n + 1, i + 1)).collect()
    }

    pub fn respects_thinness(&self) -> bool {
        self.counting_samples().iter().all(|&(n, c)| c as u64 <= self.thin.eval(n))
    }

    pub fn orbit(&self, coordinate: usize) -> Result<Orbit, ConstructorError> {
        Ok(orbit(&self.multipliers[coordinate], &self.values())?)
    }
}

/// Rejects small integer relations c_0 + Σ c_i x_i ≈ 0 with |c| ≤ 6.
pub fn check_independence(xs: &[Multiplier]) -> Result<(), ConstructorError> {
    if xs.len() < 2 {
        return Ok(());
    }
    const C: i64 = 6;
    let tol = Real::from_rational(&Rational::new(BigInt::one(), BigInt::one() << 40));
    let vals: Vec<Real> = xs.iter().map(|x| x.as_real()).collect();
    let k = vals.len();
    let mut coeffs = vec![-C; k];
    loop {
        if coeffs.iter().any(|&c| c != 0) {
            let s = vals
                .iter()
                .zip(&coeffs)
                .fold(Real::zero(), |acc, (v, &c)| acc.add(&v.mul_rational(&Rational::from_integer(c.into()))));
            for c0 in -C * (k as i64 + 1)..=C * (k as i64 + 1) {
                let t = s.add(&Real::from_rational(&Rational::from_integer(c0.into())));
                let small = t.lt(&tol).unwrap_or(true) && tol.neg().lt(&t).unwrap_or(true);
                if small {
                    return Err(ConstructorError::LinearDependence(format!("coefficients {coeffs:?}, constant {c0}")));
                }
            }
        }
        let mut i = 0;
        while i < k {
            coeffs[i] += 1;
            if coeffs[i] <= C {
                break;
            }
            coeffs[i] = -C;
            i += 1;
        }
        if i == k {
            return Ok(());
        }
    }
}

/// A with x_i∗A laid out along the targets, one element per index tuple in
/// diagonal order, kept below Ψ.
///
/// For a single multiplier every interval of the layout receives exactly one
/// orbit point. With several multipliers the output is experimental: only
/// coordinatewise membership is guaranteed.
pub fn construct_a(
    targets: &[OrderTypeSpec],
    xs: &[Multiplier],
    thin: &ThinBound,
    count: usize,
    bound: u64,
) -> Result<ConstructedSet, ConstructorError> {
    if targets.len() != xs.len() || xs.is_empty() {
        return Err(ConstructorError::LengthMismatch { targets: targets.len(), multipliers: xs.len() });
    }
    check_independence(xs)?;
    let k = xs.len();
    let tuples = if k == 1 { (0..count as u64).map(|i| vec![i]).collect() } else { diagonal_tuples(k, count) };
    let needed = tuples.iter().flatten().copied().max().map_or(0, |m| m as usize + 1);
    let intervals = targets.iter().map(|t| intervals_for(t, needed)).collect::<Result<Vec<_>, _>>()?;
    let mut elements: Vec<Element> = Vec::with_capacity(tuples.len());
    for (j, tuple) in tuples.iter().enumerate() {
        if tuple.iter().zip(&intervals).any(|(&m, ivs)| m as usize >= ivs.len()) {
            // finite targets run out of intervals
            continue;
        }
        let ivs: Vec<IntervalSpec> = tuple.iter().zip(&intervals).map(|(&m, ivs)| ivs[m as usize].clone()).collect();
        let after = elements.last().map_or(0, |e| e.n + 1);
        let room = thin.room_for(elements.len() as u64 + 1, bound).ok_or(ConstructorError::ThinnessInfeasible(j))?;
        let n = find_hit(xs, &ivs, after.max(room), bound)?;
        elements.push(Element { n, origin: Origin::Interval(tuple.iter().map(|&m| m as usize).collect()) });
    }
    Ok(ConstructedSet {
        targets: targets.to_vec(),
        multipliers: xs.to_vec(),
        intervals,
        elements,
        thin: thin.clone(),
        experimental: k > 1,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensitySample {
    pub n: u64,
    pub count: usize,
    pub ratio: f64,
}

/// |A ∩ [0,n)| and its ratio to n at n = 1, 2, 4, … ≤ limit.
pub fn density_profile(a: &[u64], limit: u64) -> Vec<DensitySample> {
    let mut sorted = a.to_vec();
    sorted.sort_unstable();
    let mut out = Vec::new();
    let mut n = 1u64;
    while n <= limit {
        let count = sorted.partition_point(|&e| e < n);
        out.push(DensitySample { n, count, ratio: count as f64 / n as f64 });
        match n.checked_mul(2) {
            Some(m) => n = m,
            None => break,
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct GapPartition {
    pub intervals: Vec<RealInterval>,
    pub total: Real,
}

/// Complementary intervals of the truncated orbit x∗(A ∩ first N): the
/// successor gaps, the gap below the least point and the gap above the
/// greatest.
pub fn gap_partition(x: &Multiplier, a: &[u64], n: usize, params: &DerivedParams) -> Result<GapPartition, ConstructorError> {
    let a = &a[..n.min(a.len())];
    let values = orbit(x, a)?.values();
    let points: Vec<Real> = sort_distinct(&values)?.into_iter().filter(|v| !matches!(v.cmp_real(&Real::zero()), Ok(std::cmp::Ordering::Equal))).collect();
    if !two_sided_signature(&points, params)?.ordinal_like() {
        return Err(ConstructorError::NotOrdinalLike);
    }
    let mut bounds = vec![Real::zero()];
    bounds.extend(points);
    bounds.push(Real::one());
    let intervals: Vec<RealInterval> =
        bounds.windows(2).map(|w| RealInterval { lo: w[0].clone(), hi: w[1].clone() }).collect();
    let total = intervals.iter().fold(Real::zero(), |acc, iv| acc.add(&iv.length()));
    Ok(GapPartition { intervals, total })
}

/// Least representative of the ε-derived set of the orbit.
pub fn smallest_limit_point(o: &Orbit, params: &DerivedParams) -> Result<Real, ConstructorError> {
    let points = sort_distinct(&o.values())?;
    eps_derived(&points, params)?.into_iter().next().ok_or(ConstructorError::NoLimitPoint)
}

/// Θ in "|A ∩ [0,n)| > Θ(n) infinitely often".
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ThickTarget {
    /// ⌈n / ⌈log2(n+2)⌉⌉
    NOverLog2,
    /// ⌈√n⌉
    Sqrt,
    /// ⌈n·p/q⌉, never admissible
    Linear(u64, u64),
    Table(Vec<(u64, u64)>),
}

fn ceil_log2(n: u64) -> u64 {
    if n <= 1 { 0 } else { 64 - (n - 1).leading_zeros() as u64 }
}

impl ThickTarget {
    pub fn eval(&self, n: u64) -> u64 {
        match self {
            ThickTarget::NOverLog2 => n.div_ceil(ceil_log2(n.saturating_add(2))),
            ThickTarget::Sqrt => ThinBound::Sqrt.eval(n),
            ThickTarget::Linear(p, q) => ((n as u128 * *p as u128).div_ceil(*q as u128)) as u64,
            ThickTarget::Table(t) => ThinBound::Table(t.clone()).eval(n),
        }
    }

    /// "n/log2", "sqrt", "linear:1/4" or "table:0=1,100=5".
    pub fn parse(s: &str) -> Result<Self, ConstructorError> {
        let s = s.trim();
        let err = || ConstructorError::Parse(s.to_string());
        match s {
            "n/log2" => return Ok(ThickTarget::NOverLog2),
            "sqrt" => return Ok(ThickTarget::Sqrt),
            _ => {}
        }
        if let Some(r) = s.strip_prefix("linear:") {
            let (p, q) = r.split_once('/').ok_or_else(err)?;
            let p: u64 = p.trim().parse().map_err(|_| err())?;
            let q: u64 = q.trim().parse().map_err(|_| err())?;
            if q == 0 {
                return Err(err());
            }
            return Ok(ThickTarget::Linear(p, q));
        }
        match ThinBound::parse(s)? {
            ThinBound::Table(t) => Ok(ThickTarget::Table(t)),
            _ => Err(err()),
        }
    }

    /// Θ(n) < n on the probe range and Θ(n)/n falling at 2^10, 2^20, 2^30, 2^40.
    pub fn check_admissible(&self) -> Result<(), ConstructorError> {
        if let ThickTarget::Linear(p, q) = self {
            return Err(ConstructorError::InadmissibleTheta(format!("Θ(n)/n stays at {p}/{q}")));
        }
        let probes = [1u64 << 10, 1 << 20, 1 << 30, 1 << 40];
        let ratios: Vec<Rational> = probes.iter().map(|&n| Rational::new(self.eval(n).into(), n.into())).collect();
        if probes.iter().any(|&n| self.eval(n) >= n) {
            return Err(ConstructorError::InadmissibleTheta("Θ(n) ≥ n".into()));
        }
        if ratios.windows(2).any(|r| r[1] >= r[0]) {
            return Err(ConstructorError::InadmissibleTheta("Θ(n)/n does not decrease".into()));
        }
        Ok(())
    }
}

impl fmt::Display for ThickTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThickTarget::NOverLog2 => write!(f, "n/log2"),
            ThickTarget::Sqrt => write!(f, "sqrt"),
            ThickTarget::Linear(p, q) => write!(f, "linear:{p}/{q}"),
            ThickTarget::Table(t) => write!(f, "{}", ThinBound::Table(t.clone())),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub stage: usize,
    pub n: u64,
    pub count: usize,
    pub theta: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Thickened {
    pub set: ConstructedSet,
    pub limit_points: Vec<Real>,
    /// windows[m][i] is stage m's window for coordinate i.
    pub windows: Vec<Vec<RealInterval>>,
    pub witnesses: Vec<Witness>,
}

/// Adds stage sets A_m′ of hits in J_m = (z − z/2^m, z), stage m running from
/// the previous witness until its own count beats Θ.
pub fn thicken(
    a: &ConstructedSet,
    theta: &ThickTarget,
    stages: usize,
    params: &DerivedParams,
    bound: u64,
) -> Result<Thickened, ConstructorError> {
    if !a.targets.iter().all(OrderTypeSpec::is_ordinal) {
        return Err(ConstructorError::NotOrdinal);
    }
    theta.check_admissible()?;
    if stages == 0 {
        return Ok(Thickened { set: a.clone(), limit_points: Vec::new(), windows: Vec::new(), witnesses: Vec::new() });
    }
    let zs = (0..a.multipliers.len())
        .map(|i| smallest_limit_point(&a.orbit(i)?, params))
        .collect::<Result<Vec<_>, _>>()?;
    let mut windows = Vec::with_capacity(stages);
    let mut witnesses = Vec::with_capacity(stages);
    let mut added: Vec<Element> = Vec::new();
    let mut from = 0u64;
    for m in 0..stages {
        let scale = Rational::new(BigInt::one(), BigInt::one() << m);
        let win: Vec<RealInterval> =
            zs.iter().map(|z| RealInterval { lo: z.sub(&z.mul_rational(&scale)), hi: z.clone() }).collect();
        let mut count = 0usize;
        let mut n = from;
        let witness = loop {
            let hit = next_window_hit(&a.multipliers, &win, n, bound)?;
            count += 1;
            added.push(Element { n: hit, origin: Origin::Stage(m) });
            n = hit + 1;
            // between hits the count is flat while Θ grows
            if count as u64 > theta.eval(n) {
                break n;
            }
        };
        witnesses.push(Witness { stage: m, n: witness, count, theta: theta.eval(witness) });
        windows.push(win);
        from = witness;
    }
    let mut elements = a.elements.clone();
    for e in added {
        if !elements.iter().any(|x| x.n == e.n) {
            elements.push(e);
        }
    }
    elements.sort_by_key(|e| e.n);
    let set = ConstructedSet { elements, thin: ThinBound::Unbounded, ..a.clone() };
    Ok(Thickened { set, limit_points: zs, windows, witnesses })
}

fn next_window_hit(xs: &[Multiplier], win: &[RealInterval], start: u64, bound: u64) -> Result<u64, ConstructorError> {
    let mut from = start;
    loop {
        let n = first_hit(&xs[0], &win[0].lo, &win[0].hi, from, bound)?.ok_or(ConstructorError::BoundExceeded(bound))?;
        let mut ok = true;
        for (x, iv) in xs.iter().zip(win).skip(1) {
            if !iv.contains(&x.frac_mul(n)?.into_real())? {
                ok = false;
                break;
            }
        }
        if ok {
            return Ok(n);
        }
        from = n + 1;
    }
}
