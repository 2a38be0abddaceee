//! Infinite words over {0,…,b−1}: shift order, morphisms, subword complexity
//! and the periodicity detector.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::numeric::{is_triangular, Rational, Real, UnitValue, VerifiedApprox};
use crate::ordertype::{cb_signature, sort_distinct, DerivedParams, OrderSignature, OrderTypeError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WordError {
    #[error("letter {letter} is outside the alphabet of size {alphabet}")]
    LetterOutOfAlphabet { letter: u32, alphabet: u32 },
    #[error("alphabet size {0} is not supported")]
    InvalidAlphabet(u32),
    #[error("morphism images must be nonempty")]
    EmptyImage,
    #[error("census window too small: tail_start + n must not exceed prefix_len")]
    BadWindow,
    #[error("successor graph inconsistent: {0}")]
    Inconsistent(String),
    #[error("shifts {0} and {1} agree on the whole fuel window; more fuel needed")]
    NeedMoreFuel(u64, u64),
    #[error("eventually periodic words have two expansions; refusing rational word")]
    RationalWord,
    #[error("subword budget exhausted: {0}")]
    BudgetExhausted(String),
    #[error("cannot parse word {0:?}")]
    Parse(String),
    #[error(transparent)]
    OrderType(#[from] OrderTypeError),
}

fn digit_char(l: u8) -> char {
    std::char::from_digit(l as u32, 36).unwrap_or('?')
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FiniteWord {
    letters: Vec<u8>,
    alphabet: u32,
}

impl FiniteWord {
    pub fn new(letters: Vec<u8>, alphabet: u32) -> Result<Self, WordError> {
        if !(2..=256).contains(&alphabet) {
            return Err(WordError::InvalidAlphabet(alphabet));
        }
        if let Some(&l) = letters.iter().find(|&&l| l as u32 >= alphabet) {
            return Err(WordError::LetterOutOfAlphabet { letter: l as u32, alphabet });
        }
        Ok(FiniteWord { letters, alphabet })
    }

    /// Digit string such as "0130".
    pub fn from_digits(s: &str, alphabet: u32) -> Result<Self, WordError> {
        let letters = s
            .chars()
            .map(|c| c.to_digit(36).map(|d| d as u8).ok_or_else(|| WordError::Parse(s.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        FiniteWord::new(letters, alphabet)
    }

    pub fn letters(&self) -> &[u8] {
        &self.letters
    }
    pub fn alphabet(&self) -> u32 {
        self.alphabet
    }
    pub fn len(&self) -> usize {
        self.letters.len()
    }
    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn concat(&self, other: &FiniteWord) -> FiniteWord {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        FiniteWord { letters, alphabet: self.alphabet.max(other.alphabet) }
    }
}

impl fmt::Display for FiniteWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.letters.iter().try_for_each(|&l| write!(f, "{}", digit_char(l)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Morphism {
    images: Vec<FiniteWord>,
    target: u32,
}

impl Morphism {
    pub fn new(images: Vec<FiniteWord>, target: u32) -> Result<Self, WordError> {
        if images.len() < 2 {
            return Err(WordError::InvalidAlphabet(images.len() as u32));
        }
        for im in &images {
            if im.is_empty() {
                return Err(WordError::EmptyImage);
            }
            FiniteWord::new(im.letters.clone(), target)?;
        }
        let images = images.into_iter().map(|w| FiniteWord { letters: w.letters, alphabet: target }).collect();
        Ok(Morphism { images, target })
    }

    pub fn source_alphabet(&self) -> u32 {
        self.images.len() as u32
    }
    pub fn target_alphabet(&self) -> u32 {
        self.target
    }
    pub fn image(&self, letter: u8) -> &FiniteWord {
        &self.images[letter as usize]
    }

    fn uniform_len(&self) -> Option<u64> {
        let l = self.images[0].len();
        self.images.iter().all(|w| w.len() == l).then_some(l as u64)
    }

    fn check_letter(&self, l: u8) -> Result<(), WordError> {
        if l as u32 >= self.source_alphabet() {
            return Err(WordError::LetterOutOfAlphabet { letter: l as u32, alphabet: self.source_alphabet() });
        }
        Ok(())
    }

    pub fn apply(&self, w: &FiniteWord) -> Result<FiniteWord, WordError> {
        let mut out = Vec::new();
        for &l in &w.letters {
            self.check_letter(l)?;
            out.extend_from_slice(&self.images[l as usize].letters);
        }
        Ok(FiniteWord { letters: out, alphabet: self.target })
    }
}

/// D: d ↦ 0 1^{d+1}, from base b to base 2.
pub fn morphism_d(b: u32) -> Result<Morphism, WordError> {
    if !(2..=256).contains(&b) {
        return Err(WordError::InvalidAlphabet(b));
    }
    let images = (0..b)
        .map(|d| {
            let mut v = vec![0u8];
            v.extend(std::iter::repeat(1).take(d as usize + 1));
            FiniteWord { letters: v, alphabet: 2 }
        })
        .collect();
    Morphism::new(images, 2)
}

/// B_i: 0 ↦ 1 2^{i+1}, 1 ↦ 2 2^{i+1}, from base 2 to base 3.
pub fn spacer_morphism(i: usize) -> Morphism {
    let img = |head: u8| {
        let mut v = vec![head];
        v.extend(std::iter::repeat(2).take(i + 1));
        FiniteWord { letters: v, alphabet: 3 }
    };
    Morphism::new(vec![img(1), img(2)], 3).expect("valid spacer")
}

const CHUNK: u64 = 4096;

enum Blocks {
    /// block k = 0 1^k
    ZeroOnes,
    /// block k = 3^k x_{k mod K} 0
    BigOrdinal(Vec<Vec<u8>>),
}

impl Blocks {
    fn block(&self, k: u64) -> Vec<u8> {
        match self {
            Blocks::ZeroOnes => {
                let mut v = vec![0u8];
                v.extend(std::iter::repeat(1).take(k as usize));
                v
            }
            Blocks::BigOrdinal(xs) => {
                let mut v = vec![3u8; k as usize];
                v.extend_from_slice(&xs[(k % xs.len() as u64) as usize]);
                v.push(0);
                v
            }
        }
    }

    fn block_len(&self, k: u64) -> u64 {
        match self {
            Blocks::ZeroOnes => k + 1,
            Blocks::BigOrdinal(xs) => k + xs[(k % xs.len() as u64) as usize].len() as u64 + 1,
        }
    }
}

enum Rule {
    Periodic { prefix: Vec<u8>, cycle: Vec<u8> },
    Triangular,
    Product { blocks: Blocks, starts: Mutex<Vec<u64>> },
    Morphic { morphism: Morphism, inner: LazyWord, checkpoints: Mutex<Vec<u64>> },
    Shifted { offset: u64, inner: LazyWord },
}

/// Infinite word described by a rule, with positional access.
#[derive(Clone)]
pub struct LazyWord {
    rule: Arc<Rule>,
    alphabet: u32,
}

impl fmt::Debug for LazyWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let head: String = self.segment(0, 24).into_iter().map(digit_char).collect();
        write!(f, "LazyWord(b={}, {head}…)", self.alphabet)
    }
}

impl LazyWord {
    pub fn periodic(prefix: &[u8], cycle: &[u8], alphabet: u32) -> Result<Self, WordError> {
        if cycle.is_empty() {
            return Err(WordError::Parse("empty cycle".into()));
        }
        FiniteWord::new(prefix.to_vec(), alphabet)?;
        FiniteWord::new(cycle.to_vec(), alphabet)?;
        Ok(LazyWord {
            rule: Arc::new(Rule::Periodic { prefix: prefix.to_vec(), cycle: cycle.to_vec() }),
            alphabet,
        })
    }

    /// ∏ 0 1^k written as a concatenation product.
    pub fn zero_ones_product() -> Self {
        LazyWord {
            rule: Arc::new(Rule::Product { blocks: Blocks::ZeroOnes, starts: Mutex::new(vec![0]) }),
            alphabet: 2,
        }
    }

    pub fn alphabet(&self) -> u32 {
        self.alphabet
    }

    fn is_explicitly_periodic(&self) -> bool {
        match &*self.rule {
            Rule::Periodic { .. } => true,
            Rule::Shifted { inner, .. } => inner.is_explicitly_periodic(),
            Rule::Morphic { inner, .. } => inner.is_explicitly_periodic(),
            _ => false,
        }
    }

    pub fn letter_at(&self, i: u64) -> u8 {
        self.segment(i, 1)[0]
    }

    pub fn prefix(&self, len: u64) -> Vec<u8> {
        self.segment(0, len)
    }

    /// Letters start..start+len.
    pub fn segment(&self, start: u64, len: u64) -> Vec<u8> {
        let mut out = Vec::with_capacity(len as usize);
        match &*self.rule {
            Rule::Periodic { prefix, cycle } => {
                let p = prefix.len() as u64;
                let c = cycle.len() as u64;
                for i in start..start + len {
                    out.push(if i < p { prefix[i as usize] } else { cycle[((i - p) % c) as usize] });
                }
            }
            Rule::Triangular => {
                for i in start..start + len {
                    out.push(if is_triangular(i) { 0 } else { 1 });
                }
            }
            Rule::Product { blocks, starts } => {
                let (mut k, at) = locate_block(blocks, starts, start);
                let mut skip = (start - at) as usize;
                while (out.len() as u64) < len {
                    let b = blocks.block(k);
                    let need = len as usize - out.len();
                    let take = (b.len() - skip).min(need);
                    out.extend_from_slice(&b[skip..skip + take]);
                    skip = 0;
                    k += 1;
                }
            }
            Rule::Morphic { morphism, inner, checkpoints } => {
                let (mut j, at) = locate_preimage(morphism, inner, checkpoints, start);
                let mut skip = (start - at) as usize;
                while (out.len() as u64) < len {
                    let need = len as usize - out.len();
                    let run = inner.segment(j, (need as u64).min(CHUNK));
                    for &l in &run {
                        let im = &morphism.image(l).letters;
                        if skip >= im.len() {
                            skip -= im.len();
                            continue;
                        }
                        let take = (im.len() - skip).min(len as usize - out.len());
                        out.extend_from_slice(&im[skip..skip + take]);
                        skip = 0;
                        if out.len() as u64 == len {
                            break;
                        }
                    }
                    j += run.len() as u64;
                }
            }
            Rule::Shifted { offset, inner } => return inner.segment(offset + start, len),
        }
        out
    }
}

/// Block index containing position `pos` and that block's start.
fn locate_block(blocks: &Blocks, starts: &Mutex<Vec<u64>>, pos: u64) -> (u64, u64) {
    if let Blocks::ZeroOnes = blocks {
        // block k starts at k(k+1)/2
        let mut k = (((8.0 * pos as f64 + 1.0).sqrt() - 1.0) / 2.0) as u64;
        while k * (k + 1) / 2 > pos {
            k -= 1;
        }
        while (k + 1) * (k + 2) / 2 <= pos {
            k += 1;
        }
        return (k, k * (k + 1) / 2);
    }
    let mut s = starts.lock().expect("block index");
    while *s.last().unwrap() <= pos {
        let k = s.len() as u64 - 1;
        let next = s.last().unwrap() + blocks.block_len(k);
        s.push(next);
    }
    let k = s.partition_point(|&x| x <= pos) - 1;
    (k as u64, s[k])
}

/// Inner index j whose image covers output position `pos`, with the image start.
fn locate_preimage(m: &Morphism, inner: &LazyWord, checkpoints: &Mutex<Vec<u64>>, pos: u64) -> (u64, u64) {
    if let Some(l) = m.uniform_len() {
        let j = pos / l;
        return (j, j * l);
    }
    let mut cp = checkpoints.lock().expect("morphic index");
    while *cp.last().unwrap() <= pos {
        let c = cp.len() as u64 - 1;
        let run = inner.segment(c * CHUNK, CHUNK);
        let add: u64 = run.iter().map(|&l| m.image(l).len() as u64).sum();
        let next = cp.last().unwrap() + add;
        cp.push(next);
    }
    let c = cp.partition_point(|&x| x <= pos) - 1;
    let mut j = c as u64 * CHUNK;
    let mut at = cp[c];
    drop(cp);
    for l in inner.segment(j, CHUNK) {
        let w = m.image(l).len() as u64;
        if at + w > pos {
            break;
        }
        at += w;
        j += 1;
    }
    (j, at)
}

pub fn triangular_word() -> LazyWord {
    LazyWord { rule: Arc::new(Rule::Triangular), alphabet: 2 }
}

pub fn shift(w: &LazyWord, k: u64) -> LazyWord {
    if k == 0 {
        return w.clone();
    }
    if let Rule::Shifted { offset, inner } = &*w.rule {
        return shift(inner, offset + k);
    }
    LazyWord { rule: Arc::new(Rule::Shifted { offset: k, inner: w.clone() }), alphabet: w.alphabet }
}

pub fn morphism_apply_lazy(m: &Morphism, w: &LazyWord) -> Result<LazyWord, WordError> {
    if w.alphabet > m.source_alphabet() {
        return Err(WordError::LetterOutOfAlphabet { letter: w.alphabet - 1, alphabet: m.source_alphabet() });
    }
    Ok(LazyWord {
        rule: Arc::new(Rule::Morphic { morphism: m.clone(), inner: w.clone(), checkpoints: Mutex::new(vec![0]) }),
        alphabet: m.target,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CompareResult {
    Less,
    Greater,
    Unresolved,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompareOutcome {
    pub result: CompareResult,
    pub first_diff_index: Option<u64>,
    pub distance: Option<Rational>,
}

impl CompareOutcome {
    fn at(i: u64, a: u8, b: u8) -> Self {
        CompareOutcome {
            result: if a < b { CompareResult::Less } else { CompareResult::Greater },
            first_diff_index: Some(i),
            distance: Some(Rational::new(BigInt::one(), BigInt::one() << i as usize)),
        }
    }
    fn unresolved() -> Self {
        CompareOutcome { result: CompareResult::Unresolved, first_diff_index: None, distance: None }
    }
}

pub(crate) fn compare_slices(a: &[u8], b: &[u8], offset: u64) -> Option<CompareOutcome> {
    a.iter()
        .zip(b)
        .position(|(x, y)| x != y)
        .map(|i| CompareOutcome::at(offset + i as u64, a[i], b[i]))
}

pub fn lex_compare(u: &LazyWord, v: &LazyWord, fuel: u64) -> CompareOutcome {
    let mut at = 0;
    while at < fuel {
        let n = CHUNK.min(fuel - at);
        if let Some(o) = compare_slices(&u.segment(at, n), &v.segment(at, n), at) {
            return o;
        }
        at += n;
    }
    CompareOutcome::unresolved()
}

/// Finite words are comparable only when they differ somewhere in their
/// common length.
pub fn lex_compare_finite(u: &FiniteWord, v: &FiniteWord) -> CompareOutcome {
    compare_slices(&u.letters, &v.letters, 0).unwrap_or_else(CompareOutcome::unresolved)
}

/// Length-n subwords starting at or after `tail_start` in the first
/// `prefix_len` letters.
pub fn subword_census(w: &LazyWord, n: usize, prefix_len: usize, tail_start: usize) -> Result<BTreeSet<FiniteWord>, WordError> {
    if tail_start + n > prefix_len {
        return Err(WordError::BadWindow);
    }
    let seg = w.segment(tail_start as u64, (prefix_len - tail_start) as u64);
    Ok(census_of(&seg, n, w.alphabet))
}

fn census_of(seg: &[u8], n: usize, alphabet: u32) -> BTreeSet<FiniteWord> {
    if n == 0 {
        return BTreeSet::from([FiniteWord { letters: Vec::new(), alphabet }]);
    }
    seg.windows(n).map(|s| FiniteWord { letters: s.to_vec(), alphabet }).collect()
}

pub fn complexity(w: &LazyWord, n: usize, prefix_len: usize, tail_start: usize) -> Result<usize, WordError> {
    Ok(subword_census(w, n, prefix_len, tail_start)?.len())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Periodicity {
    EventuallyPeriodic { period: usize, preperiod: usize, plateau: usize, complexities: Vec<usize> },
    NoPlateauFound { complexities: Vec<usize> },
}

/// Looks for the first m with C(m) = C(m+1) and reads the period off the
/// successor graph on S(m).
pub fn periodicity_detect(w: &LazyWord, max_n: usize, prefix_len: usize, tail_start: usize) -> Result<Periodicity, WordError> {
    if max_n < 2 {
        return Err(WordError::BadWindow);
    }
    if tail_start + max_n > prefix_len {
        return Err(WordError::BadWindow);
    }
    let seg = w.segment(tail_start as u64, (prefix_len - tail_start) as u64);
    let mut complexities = Vec::with_capacity(max_n);
    let mut censuses = Vec::with_capacity(max_n);
    for n in 1..=max_n {
        let c = census_of(&seg, n, w.alphabet);
        complexities.push(c.len());
        censuses.push(c);
    }
    let Some(m) = (1..max_n).find(|&m| complexities[m - 1] == complexities[m]) else {
        return Ok(Periodicity::NoPlateauFound { complexities });
    };
    let s_m = &censuses[m - 1];
    let s_next = &censuses[m];
    let mut succ: BTreeMap<&FiniteWord, FiniteWord> = BTreeMap::new();
    for u in s_m {
        let ext: Vec<&FiniteWord> = s_next.iter().filter(|v| v.letters.starts_with(&u.letters)).collect();
        if ext.len() != 1 {
            return Err(WordError::Inconsistent(format!("{u} has out-degree {}", ext.len())));
        }
        let next = FiniteWord { letters: ext[0].letters[1..].to_vec(), alphabet: w.alphabet };
        if !s_m.contains(&next) {
            return Err(WordError::Inconsistent(format!("successor {next} of {u} is not in S({m})")));
        }
        succ.insert(u, next);
    }
    let start = s_m.iter().next().expect("census nonempty");
    let mut seen = BTreeSet::new();
    let mut cur = start.clone();
    while seen.insert(cur.clone()) {
        cur = succ[&cur].clone();
    }
    if &cur != start || seen.len() != s_m.len() {
        return Err(WordError::Inconsistent(format!("successor graph on S({m}) is not a single cycle")));
    }
    let period = seen.len();
    let full = w.prefix(prefix_len as u64);
    let preperiod = (0..full.len().saturating_sub(period))
        .rev()
        .find(|&i| full[i] != full[i + period])
        .map_or(0, |i| i + 1);
    Ok(Periodicity::EventuallyPeriodic { period, preperiod, plateau: m, complexities })
}

fn digits_to_unit(letters: &[u8], b: u32) -> UnitValue {
    let bb = BigInt::from(b);
    let mut p = BigInt::zero();
    for &l in letters {
        p = p * &bb + BigInt::from(l);
    }
    let den = bb.pow(letters.len() as u32);
    let x = Rational::new(2 * p + 1, 2 * &den);
    let half = Rational::new(BigInt::one(), 2 * den);
    let bits = ((letters.len() as f64) * (b as f64).log2()).ceil() as u32 + 8;
    UnitValue::from_parts(Real::Approx(VerifiedApprox::enclose(&x, &half, bits)), BigInt::zero())
}

/// Σ w_i b^{-i-1} over the first `digits` letters, enclosing the tail.
pub fn word_to_unit(w: &LazyWord, digits: u64) -> UnitValue {
    digits_to_unit(&w.prefix(digits), w.alphabet)
}

/// Signature of the shifts σ^0 W, …, σ^{N−1} W read as base-b reals.
pub fn shift_order_signature(w: &LazyWord, n: u64, fuel: u64, params: &DerivedParams) -> Result<OrderSignature, WordError> {
    if w.is_explicitly_periodic() {
        return Err(WordError::RationalWord);
    }
    let seg = w.prefix(n + fuel);
    let window = |k: u64| &seg[k as usize..(k + fuel) as usize];
    let mut order: Vec<u64> = (0..n).collect();
    order.sort_by(|&a, &b| window(a).cmp(window(b)));
    for p in order.windows(2) {
        if window(p[0]) == window(p[1]) {
            return Err(WordError::NeedMoreFuel(p[0].min(p[1]), p[0].max(p[1])));
        }
    }
    let monotone = order.windows(2).all(|p| p[0] < p[1]);
    let values: Vec<Real> = (0..n).map(|k| digits_to_unit(window(k), w.alphabet).into_real()).collect();
    let points = sort_distinct(&values).map_err(OrderTypeError::from)?;
    Ok(cb_signature(&points, params, monotone)?)
}

/// The product word ∏ 3^k x_k 0 over all short subwords x_k of the spacer
/// images B_i(w_i), listed by length and then lexicographically.
///
/// Subwords are drawn from the first `subword_budget` letters of each image,
/// with lengths up to half the budget. After the list runs out, blocks reuse
/// it cyclically while the run of 3s keeps growing.
pub fn big_ordinal_word(inputs: &[LazyWord], subword_budget: usize) -> Result<LazyWord, WordError> {
    Ok(big_ordinal_parts(inputs, subword_budget)?.0)
}

/// The product word together with its subword list.
pub fn big_ordinal_parts(inputs: &[LazyWord], subword_budget: usize) -> Result<(LazyWord, Vec<Vec<u8>>), WordError> {
    if inputs.is_empty() {
        return Err(WordError::BudgetExhausted("no input words".into()));
    }
    if subword_budget < 2 {
        return Err(WordError::BudgetExhausted(format!("budget {subword_budget} yields no subwords")));
    }
    let max_len = subword_budget / 2;
    let mut found: BTreeSet<(usize, Vec<u8>)> = BTreeSet::new();
    for (i, w) in inputs.iter().enumerate() {
        if w.alphabet != 2 {
            return Err(WordError::InvalidAlphabet(w.alphabet));
        }
        let image = morphism_apply_lazy(&spacer_morphism(i), w)?;
        let window = image.prefix(subword_budget as u64);
        for len in 1..=max_len {
            for s in window.windows(len) {
                found.insert((len, s.to_vec()));
            }
        }
    }
    let mut xs = vec![vec![1u8], vec![2u8]];
    xs.extend(found.into_iter().map(|(_, s)| s).filter(|s| s != &[1] && s != &[2]));
    let word = LazyWord {
        rule: Arc::new(Rule::Product { blocks: Blocks::BigOrdinal(xs.clone()), starts: Mutex::new(vec![0]) }),
        alphabet: 4,
    };
    Ok((word, xs))
}

/// Position in V where the block carrying subword `x` places it.
pub fn big_ordinal_positions(xs: &[Vec<u8>]) -> HashMap<Vec<u8>, u64> {
    let mut at = 0u64;
    let mut out = HashMap::with_capacity(xs.len());
    for (k, x) in xs.iter().enumerate() {
        out.entry(x.clone()).or_insert(at + k as u64);
        at += k as u64 + x.len() as u64 + 1;
    }
    out
}

fn split_top(s: &str, sep: char) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut from = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            c if c == sep && depth == 0 => {
                parts.push(&s[from..i]);
                from = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&s[from..]);
    parts
}

fn call<'a>(s: &'a str, name: &str) -> Option<&'a str> {
    s.strip_prefix(name)?.strip_prefix('(')?.strip_suffix(')')
}

fn digits(s: &str) -> Result<Vec<u8>, WordError> {
    s.chars()
        .map(|c| c.to_digit(36).map(|d| d as u8).ok_or_else(|| WordError::Parse(s.to_string())))
        .collect()
}

/// Default budget for "bigV(...)" when none is given.
pub const DEFAULT_SUBWORD_BUDGET: usize = 64;

/// Word grammar: "tri", "periodic:prefix=001,cycle=011[,b=3]", "product:01^k",
/// "morphD(w)", "B<i>(w)", "shift:<k>(w)", "bigV(w0;w1;...[;budget=N])".
pub fn parse_word(s: &str) -> Result<LazyWord, WordError> {
    let s = s.trim();
    let err = || WordError::Parse(s.to_string());
    if s == "tri" {
        return Ok(triangular_word());
    }
    if s == "product:01^k" {
        return Ok(LazyWord::zero_ones_product());
    }
    if let Some(rest) = s.strip_prefix("periodic:") {
        let mut prefix = Vec::new();
        let mut cycle = None;
        let mut b = None;
        for kv in rest.split(',') {
            let (k, v) = kv.split_once('=').ok_or_else(err)?;
            match k.trim() {
                "prefix" => prefix = digits(v.trim())?,
                "cycle" => cycle = Some(digits(v.trim())?),
                "b" => b = Some(v.trim().parse::<u32>().map_err(|_| err())?),
                _ => return Err(err()),
            }
        }
        let cycle = cycle.ok_or_else(err)?;
        let top = prefix.iter().chain(&cycle).copied().max().unwrap_or(0) as u32 + 1;
        return LazyWord::periodic(&prefix, &cycle, b.unwrap_or(top.max(2)));
    }
    if let Some(inner) = call(s, "morphD") {
        let w = parse_word(inner)?;
        return morphism_apply_lazy(&morphism_d(w.alphabet)?, &w);
    }
    if let Some(rest) = s.strip_prefix("shift:") {
        let open = rest.find('(').ok_or_else(err)?;
        let k: u64 = rest[..open].parse().map_err(|_| err())?;
        let inner = rest[open + 1..].strip_suffix(')').ok_or_else(err)?;
        return Ok(shift(&parse_word(inner)?, k));
    }
    if let Some(inner) = call(s, "bigV") {
        let mut words = Vec::new();
        let mut budget = DEFAULT_SUBWORD_BUDGET;
        for part in split_top(inner, ';') {
            match part.trim().strip_prefix("budget=") {
                Some(n) => budget = n.parse().map_err(|_| err())?,
                None => words.push(parse_word(part)?),
            }
        }
        return big_ordinal_word(&words, budget);
    }
    if let Some(rest) = s.strip_prefix('B') {
        let open = rest.find('(').ok_or_else(err)?;
        let i: usize = rest[..open].parse().map_err(|_| err())?;
        let inner = rest[open + 1..].strip_suffix(')').ok_or_else(err)?;
        return morphism_apply_lazy(&spacer_morphism(i), &parse_word(inner)?);
    }
    Err(err())
}

/// Digit string of the first `len` letters.
pub fn prefix_string(w: &LazyWord, len: u64) -> String {
    w.prefix(len).into_iter().map(digit_char).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbeddingCheck {
    pub input: usize,
    /// Window length separating the first shifts of B_i(w_i).
    pub window: usize,
    pub pairs_checked: usize,
    pub violations: Vec<(u64, u64)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BigOrdinalReport {
    pub budget: usize,
    pub subwords: usize,
    pub blocks_checked: usize,
    /// Blocks whose run of leading 3s differs from their index.
    pub bad_blocks: Vec<usize>,
    /// k with the boundary 0 3^k seen other than once.
    pub repeated_boundaries: Vec<usize>,
    pub embeddings: Vec<EmbeddingCheck>,
}

impl BigOrdinalReport {
    pub fn passed(&self) -> bool {
        self.bad_blocks.is_empty()
            && self.repeated_boundaries.is_empty()
            && self.embeddings.iter().all(|e| e.violations.is_empty())
    }
}

/// Smallest L with the length-L windows at 0..shifts pairwise distinct.
fn separating_window(w: &LazyWord, shifts: usize, cap: usize) -> Result<usize, WordError> {
    let seg = w.prefix((shifts + cap) as u64);
    let mut len = 1;
    while len <= cap {
        let distinct: BTreeSet<&[u8]> = (0..shifts).map(|j| &seg[j..j + len]).collect();
        if distinct.len() == shifts {
            return Ok(len);
        }
        len += 1;
    }
    Err(WordError::NeedMoreFuel(0, shifts as u64))
}

/// Builds V from the inputs with a budget large enough that each of the
/// first `shifts` shifts of B_i(w_i) owns a block, checks the block shape on
/// the first `blocks` blocks and compares shift order on both sides at `fuel`.
pub fn verify_big_ordinal(inputs: &[LazyWord], shifts: usize, blocks: usize, fuel: u64) -> Result<BigOrdinalReport, WordError> {
    let images = inputs
        .iter()
        .enumerate()
        .map(|(i, w)| morphism_apply_lazy(&spacer_morphism(i), w))
        .collect::<Result<Vec<_>, _>>()?;
    let mut window = 1;
    for img in &images {
        window = window.max(separating_window(img, shifts, 4096)?);
    }
    let budget = (2 * window).max(shifts + window);
    let (v, xs) = big_ordinal_parts(inputs, budget)?;

    let span: u64 = (0..blocks).map(|k| (k + xs[k % xs.len()].len() + 1) as u64).sum();
    let pre = v.prefix(span + blocks as u64 + 1);
    let mut bad_blocks = Vec::new();
    let mut at = 0usize;
    for k in 0..blocks {
        let lead = pre[at..].iter().take_while(|&&l| l == 3).count();
        if lead != k {
            bad_blocks.push(k);
        }
        at += k + xs[k % xs.len()].len() + 1;
    }
    let mut seen = vec![0usize; blocks + 1];
    for i in 0..span as usize {
        if pre[i] == 0 {
            let run = pre[i + 1..].iter().take_while(|&&l| l == 3).count();
            if run < seen.len() {
                seen[run] += 1;
            }
        }
    }
    let repeated_boundaries = (1..blocks).filter(|&k| seen[k] != 1).collect();

    let positions = big_ordinal_positions(&xs);
    let mut embeddings = Vec::new();
    for (i, img) in images.iter().enumerate() {
        let seg = img.prefix(shifts as u64 + fuel);
        let mut v_segs = Vec::with_capacity(shifts);
        for j in 0..shifts {
            let x = &seg[j..j + window];
            let pos = *positions.get(x).ok_or_else(|| WordError::BudgetExhausted(format!("shift {j} of input {i} has no block")))?;
            v_segs.push(v.segment(pos, fuel));
        }
        let mut violations = Vec::new();
        let mut pairs = 0;
        for a in 0..shifts {
            for b in a + 1..shifts {
                pairs += 1;
                let (fa, fb) = (a as u64, b as u64);
                let left = compare_slices(&seg[a..a + fuel as usize], &seg[b..b + fuel as usize], 0);
                let right = compare_slices(&v_segs[a], &v_segs[b], 0);
                match (left, right) {
                    (Some(l), Some(r)) if l.result == r.result => {}
                    _ => violations.push((fa, fb)),
                }
            }
        }
        embeddings.push(EmbeddingCheck { input: i, window, pairs_checked: pairs, violations });
    }
    Ok(BigOrdinalReport { budget, subwords: xs.len(), blocks_checked: blocks, bad_blocks, repeated_boundaries, embeddings })
}
