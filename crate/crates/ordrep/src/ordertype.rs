//! Finite-scale order-type estimates: ε-derived sets, iterated rank, descent
//! statistics and a two-sided accumulation detector.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::One;
use thiserror::Error;

use crate::numeric::{Multiplier, NumericError, Rational, Real};
use crate::orbits::{orbit, sumset, Orbit, OrbitError};

pub const DEFAULT_RANK_CEILING: usize = 10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OrderTypeError {
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error(transparent)]
    Orbit(#[from] OrbitError),
    #[error("points must be sorted ascending and pairwise distinct")]
    NotSortedDistinct,
    #[error("rank exceeds ceiling {0}; check the derivation parameters")]
    RankCeiling(usize),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("orbit has {len} entries, fewer than the threshold {threshold}")]
    TooShort { len: usize, threshold: usize },
    #[error("orbit is empty")]
    EmptyOrbit,
    #[error("ω^h check failed:\n{0}")]
    OmegaPowerMismatch(Box<OmegaPowerReport>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivedParams {
    pub epsilon: Rational,
    pub min_mass: usize,
    pub merge_radius: Rational,
}

impl DerivedParams {
    pub fn new(epsilon: Rational, min_mass: usize, merge_radius: Rational) -> Result<Self, OrderTypeError> {
        let zero = Rational::from_integer(0.into());
        if epsilon <= zero || epsilon >= Rational::one() {
            return Err(OrderTypeError::InvalidParams("epsilon must lie in (0,1)".into()));
        }
        if min_mass < 2 {
            return Err(OrderTypeError::InvalidParams("min_mass must be at least 2".into()));
        }
        if merge_radius < zero || merge_radius > epsilon {
            return Err(OrderTypeError::InvalidParams("merge_radius must lie in [0, epsilon]".into()));
        }
        Ok(DerivedParams { epsilon, min_mass, merge_radius })
    }

    /// ε with the merge radius tied to it.
    pub fn with_epsilon(epsilon: Rational, min_mass: usize) -> Result<Self, OrderTypeError> {
        DerivedParams::new(epsilon.clone(), min_mass, epsilon)
    }
}

impl Default for DerivedParams {
    fn default() -> Self {
        let eps = Rational::new(BigInt::one(), BigInt::from(64));
        DerivedParams { epsilon: eps.clone(), min_mass: 3, merge_radius: eps }
    }
}

/// Stable merge sort with a fallible comparator; returns the permutation.
pub(crate) fn sort_indices(values: &[Real]) -> Result<Vec<usize>, NumericError> {
    fn merge_sort(idx: &mut Vec<usize>, values: &[Real]) -> Result<(), NumericError> {
        if idx.len() < 2 {
            return Ok(());
        }
        let mut right = idx.split_off(idx.len() / 2);
        merge_sort(idx, values)?;
        merge_sort(&mut right, values)?;
        let left = std::mem::take(idx);
        let (mut i, mut j) = (0, 0);
        while i < left.len() && j < right.len() {
            if values[right[j]].cmp_real(&values[left[i]])? == Ordering::Less {
                idx.push(right[j]);
                j += 1;
            } else {
                idx.push(left[i]);
                i += 1;
            }
        }
        idx.extend_from_slice(&left[i..]);
        idx.extend_from_slice(&right[j..]);
        Ok(())
    }
    let mut idx: Vec<usize> = (0..values.len()).collect();
    merge_sort(&mut idx, values)?;
    Ok(idx)
}

/// Sorts ascending and drops exact duplicates.
pub fn sort_distinct(values: &[Real]) -> Result<Vec<Real>, NumericError> {
    let idx = sort_indices(values)?;
    let mut out: Vec<Real> = Vec::with_capacity(values.len());
    for i in idx {
        match out.last() {
            Some(last) if last.cmp_real(&values[i])? == Ordering::Equal => {}
            _ => out.push(values[i].clone()),
        }
    }
    Ok(out)
}

fn check_sorted(points: &[Real]) -> Result<(), OrderTypeError> {
    for w in points.windows(2) {
        if !w[0].lt(&w[1])? {
            return Err(OrderTypeError::NotSortedDistinct);
        }
    }
    Ok(())
}

/// Strict `a < b`, with comparisons that stay unresolved at working
/// precision counting as ties.
fn below(a: &Real, b: &Real) -> Result<bool, OrderTypeError> {
    match a.cmp_real(b) {
        Ok(o) => Ok(o == Ordering::Less),
        Err(NumericError::AmbiguousComparison) => Ok(false),
        Err(e) => Err(e.into()),
    }
}

/// A representative together with the run of points beneath it.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Cluster {
    pub value: Real,
    pub basin: usize,
    pub low: Real,
}

/// Candidates are points of `points ∪ {1}` with at least `min_mass` input
/// points directly beneath them, each within ε and each step shorter than
/// the gap up to the next point. A candidate is absorbed by its successor
/// when the successor lies within the merge radius and its own run reaches
/// down to the candidate, so a chain collapses to its supremum.
pub(crate) fn derive_clusters(points: &[Real], params: &DerivedParams) -> Result<Vec<Cluster>, OrderTypeError> {
    check_sorted(points)?;
    let one = Real::one();
    let mut pool = points.to_vec();
    match pool.last() {
        Some(p) if !p.lt(&one)? => {}
        _ => pool.push(one),
    }
    let eps = Real::from_rational(&params.epsilon);
    let merge = Real::from_rational(&params.merge_radius);
    let n = pool.len();
    let gaps: Vec<Real> = (0..n.saturating_sub(1)).map(|i| pool[i + 1].sub(&pool[i])).collect();
    let gap_above = |i: usize| gaps.get(i);

    let mut out = Vec::new();
    for idx in 0..n {
        let mut size = 0;
        let mut reach = Real::zero();
        let mut low = idx;
        let mut j = idx;
        while j > 0 {
            j -= 1;
            reach = reach.add(&gaps[j]);
            if !below(&reach, &eps)? {
                break;
            }
            if let Some(up) = gap_above(idx) {
                if !below(&gaps[j], up)? {
                    break;
                }
            }
            size += 1;
            low = j;
        }
        if size < params.min_mass {
            continue;
        }
        if idx + 1 < n {
            let g = &gaps[idx];
            let reaches_down = below(g, &eps)? && gap_above(idx + 1).map_or(Ok(true), |up| below(g, up))?;
            if !below(&merge, g)? && reaches_down {
                continue;
            }
        }
        out.push(Cluster { value: pool[idx].clone(), basin: size, low: pool[low].clone() });
    }
    Ok(out)
}

/// Finite-scale proxy for the derived set of `points`.
pub fn eps_derived(points: &[Real], params: &DerivedParams) -> Result<Vec<Real>, OrderTypeError> {
    Ok(derive_clusters(points, params)?.into_iter().map(|c| c.value).collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrderSignature {
    pub cb_rank: usize,
    pub levels: Vec<Vec<Real>>,
    pub top_tail_count: usize,
    pub is_monotone: bool,
}

impl fmt::Display for OrderSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "rank {} (finite-scale estimate)", self.cb_rank)?;
        for (j, level) in self.levels.iter().enumerate() {
            let vals: Vec<String> = level.iter().map(|v| v.to_decimal(8)).collect();
            writeln!(f, "  level {}: [{}]", j + 1, vals.join(", "))?;
        }
        write!(f, "  top tail {}, monotone {}", self.top_tail_count, self.is_monotone)
    }
}

pub fn cb_signature(points: &[Real], params: &DerivedParams, monotone: bool) -> Result<OrderSignature, OrderTypeError> {
    cb_signature_with_ceiling(points, params, monotone, DEFAULT_RANK_CEILING)
}

pub fn cb_signature_with_ceiling(
    points: &[Real],
    params: &DerivedParams,
    monotone: bool,
    ceiling: usize,
) -> Result<OrderSignature, OrderTypeError> {
    let mut levels = Vec::new();
    let mut current = points.to_vec();
    loop {
        let next = eps_derived(&current, params)?;
        if next.is_empty() {
            break;
        }
        if levels.len() == ceiling {
            return Err(OrderTypeError::RankCeiling(ceiling));
        }
        levels.push(next.clone());
        current = next;
    }
    Ok(OrderSignature { cb_rank: levels.len(), levels, top_tail_count: 0, is_monotone: monotone })
}

/// For each entry, how many later entries have a smaller value.
pub fn descent_counts(orbit: &Orbit) -> Result<Vec<usize>, OrderTypeError> {
    let values = orbit.values();
    let order = sort_indices(&values)?;
    let n = values.len();
    let mut rank = vec![0usize; n];
    let mut r = 0;
    for (k, &i) in order.iter().enumerate() {
        if k > 0 && values[order[k - 1]].cmp_real(&values[i])? != Ordering::Equal {
            r += 1;
        }
        rank[i] = r;
    }
    let mut tree = vec![0usize; r + 2];
    let mut counts = vec![0; n];
    for i in (0..n).rev() {
        let mut k = rank[i];
        let mut s = 0;
        while k > 0 {
            s += tree[k];
            k &= k - 1;
        }
        counts[i] = s;
        let mut k = rank[i] + 1;
        while k < tree.len() {
            tree[k] += 1;
            k += k & k.wrapping_neg();
        }
    }
    Ok(counts)
}

/// Entries with at least `threshold` later entries below them.
pub fn top_tail_count(orbit: &Orbit, threshold: usize) -> Result<usize, OrderTypeError> {
    if orbit.len() < threshold {
        return Err(OrderTypeError::TooShort { len: orbit.len(), threshold });
    }
    Ok(descent_counts(orbit)?.into_iter().filter(|&c| c >= threshold).count())
}

/// Signature of an orbit, with monotonicity and the top tail filled in.
pub fn orbit_signature(orbit: &Orbit, params: &DerivedParams, tail_threshold: usize) -> Result<OrderSignature, OrderTypeError> {
    let counts = descent_counts(orbit)?;
    let monotone = counts.iter().all(|&c| c == 0);
    let points = sort_distinct(&orbit.values())?;
    let mut sig = cb_signature(&points, params, monotone)?;
    sig.top_tail_count = if monotone { 0 } else { counts.iter().filter(|&&c| c >= tail_threshold).count() };
    Ok(sig)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Below,
    Above,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SidedRep {
    pub value: Real,
    pub side: Side,
    pub basin: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TwoSidedSignature {
    pub representatives: Vec<SidedRep>,
}

impl TwoSidedSignature {
    /// No accumulation from above survives: consistent with a well order.
    pub fn ordinal_like(&self) -> bool {
        self.representatives.iter().all(|r| r.side == Side::Below)
    }
}

/// Accumulation points seen from either side. Runs from below and from above
/// whose spans overlap describe one accumulation point; the side with the
/// larger run wins, ties going to the side below.
pub fn two_sided_signature(points: &[Real], params: &DerivedParams) -> Result<TwoSidedSignature, OrderTypeError> {
    let one = Real::one();
    let below = derive_clusters(points, params)?;
    let mirrored: Vec<Real> = points.iter().rev().map(|p| one.sub(p)).collect();
    let above = derive_clusters(&mirrored, params)?;

    // (span low, span high, rep)
    let mut spans: Vec<(Real, Real, SidedRep)> = Vec::new();
    for c in below {
        spans.push((c.low, c.value.clone(), SidedRep { value: c.value, side: Side::Below, basin: c.basin }));
    }
    for c in above {
        let v = one.sub(&c.value);
        let hi = one.sub(&c.low);
        spans.push((v.clone(), hi, SidedRep { value: v, side: Side::Above, basin: c.basin }));
    }
    let lows: Vec<Real> = spans.iter().map(|s| s.0.clone()).collect();
    let order = sort_indices(&lows)?;

    let mut reps = Vec::new();
    let mut group: Option<(Real, SidedRep)> = None;
    for i in order {
        let (lo, hi, rep) = spans[i].clone();
        group = match group {
            Some((ghi, best)) if lo.le(&ghi)? => {
                let ghi = if hi.lt(&ghi)? { ghi } else { hi };
                let better = rep.basin > best.basin
                    || (rep.basin == best.basin && rep.side == Side::Below && best.side == Side::Above);
                Some((ghi, if better { rep } else { best }))
            }
            Some((_, best)) => {
                reps.push(best);
                Some((hi, rep))
            }
            None => Some((hi, rep)),
        };
    }
    if let Some((_, best)) = group {
        reps.push(best);
    }
    let values: Vec<Real> = reps.iter().map(|r| r.value.clone()).collect();
    let order = sort_indices(&values)?;
    Ok(TwoSidedSignature { representatives: order.into_iter().map(|i| reps[i].clone()).collect() })
}

#[derive(Clone, Debug, PartialEq)]
pub struct OmegaPowerReport {
    pub h: usize,
    pub cap: u64,
    pub points: usize,
    pub signature: OrderSignature,
    pub unmatched: Vec<Real>,
}

impl OmegaPowerReport {
    pub fn passed(&self) -> bool {
        self.signature.cb_rank == self.h && self.unmatched.is_empty()
    }
}

impl fmt::Display for OmegaPowerReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "h = {}, cap = {}, {} points", self.h, self.cap, self.points)?;
        writeln!(f, "expected rank {}, observed {}", self.h, self.signature.cb_rank)?;
        if !self.unmatched.is_empty() {
            let v: Vec<String> = self.unmatched.iter().map(|r| r.to_decimal(8)).collect();
            writeln!(f, "unmatched level-1 representatives: [{}]", v.join(", "))?;
        }
        write!(f, "{}", self.signature)
    }
}

/// Checks that x∗hA looks like ω^h: rank h, and every level-1 representative
/// within ε of 1 or of a point of x∗rA for some r < h.
pub fn verify_omega_power(
    x: &Multiplier,
    a: &[u64],
    h: usize,
    cap: u64,
    params: &DerivedParams,
) -> Result<OmegaPowerReport, OrderTypeError> {
    let set = sumset(a, h, cap);
    let o = orbit(x, &set)?;
    let signature = orbit_signature(&o, params, usize::MAX)?;

    let mut targets = vec![Real::one()];
    for r in 1..h {
        targets.extend(orbit(x, &sumset(a, r, cap))?.values());
    }
    let eps = Real::from_rational(&params.epsilon);
    let mut unmatched = Vec::new();
    if let Some(level1) = signature.levels.first() {
        for rep in level1 {
            let mut hit = false;
            for t in &targets {
                let d = rep.sub(t);
                if d.lt(&eps)? && d.neg().lt(&eps)? {
                    hit = true;
                    break;
                }
            }
            if !hit {
                unmatched.push(rep.clone());
            }
        }
    }
    let report = OmegaPowerReport { h, cap, points: set.len(), signature, unmatched };
    if report.passed() {
        Ok(report)
    } else {
        Err(OrderTypeError::OmegaPowerMismatch(Box::new(report)))
    }
}
