//! Batch front-end: manifests in, deterministic JSON or CSV reports out.

pub mod dump;
pub mod manifest;

use std::time::Instant;

use ordrep::constructor::{
    construct_a, density_profile, thicken, ConstructedSet, ConstructorError, Origin, OrderTypeSpec, ThickTarget, ThinBound,
};
use ordrep::numeric::{
    golden_gap, parse_multiplier, parse_rational, precision_ceiling, set_precision_ceiling, Multiplier, NumericError, Real,
};
use ordrep::orbits::{enumerate, orbit, IndexSetSpec, OrbitError, DEFAULT_SEARCH_BOUND};
use ordrep::ordertype::{
    descent_counts, orbit_signature, sort_distinct, two_sided_signature, verify_omega_power, DerivedParams,
    OmegaPowerReport, OrderSignature, OrderTypeError, Side, TwoSidedSignature,
};
use ordrep::words::{
    lex_compare_finite, morphism_d, parse_word, periodicity_detect, prefix_string, shift_order_signature,
    subword_census, verify_big_ordinal, CompareResult, FiniteWord, Periodicity, WordError,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use thiserror::Error;

pub use dump::{dump_points, parse_points, Point};
pub use manifest::{Check, Command, Format, RunManifest};

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const CHECK_FAILED: i32 = 1;
    pub const PARSE: i32 = 2;
    pub const MODULE: i32 = 3;
    pub const IO: i32 = 4;
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{0}")]
    Module(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => exit::PARSE,
            CliError::Module(_) => exit::MODULE,
            CliError::Io(_) => exit::IO,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Parse(_) => "parse",
            CliError::Module(_) => "module",
            CliError::Io(_) => "io",
        }
    }

    pub fn to_json(&self) -> String {
        json!({ "error": { "kind": self.kind(), "code": self.exit_code(), "message": self.to_string() } }).to_string()
    }
}

fn parse_err(e: impl std::fmt::Display) -> CliError {
    CliError::Parse(e.to_string())
}

macro_rules! module_errors {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Module(e.to_string())
            }
        }
    )*};
}
module_errors!(NumericError, OrbitError, OrderTypeError, WordError, ConstructorError);

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    /// Everything except timing; identical manifests give identical payloads.
    pub payload: Value,
    pub elapsed_ms: u128,
    pub passed: Option<bool>,
    pub csv: Option<String>,
}

impl Report {
    pub fn payload_json(&self) -> String {
        serde_json::to_string_pretty(&self.payload).expect("payload serializes")
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Json => {
                let mut full = self.payload.clone();
                full["timing"] = json!({ "elapsed_ms": self.elapsed_ms as u64 });
                Ok(serde_json::to_string_pretty(&full).expect("report serializes") + "\n")
            }
            Format::Csv => self.csv.clone().ok_or_else(|| CliError::Parse("csv output is not available for this command".into())),
        }
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed == Some(false) {
            exit::CHECK_FAILED
        } else {
            exit::OK
        }
    }
}

fn dec(v: &Real) -> String {
    v.to_decimal(dump::DIGITS)
}

fn require<'a>(v: &'a Option<String>, name: &str) -> Result<&'a str, CliError> {
    v.as_deref().ok_or_else(|| CliError::Parse(format!("missing field `{name}`")))
}

fn params_of(m: &RunManifest) -> Result<DerivedParams, CliError> {
    let d = DerivedParams::default();
    let eps = match &m.epsilon {
        Some(s) => parse_rational(s).map_err(parse_err)?,
        None => d.epsilon.clone(),
    };
    let merge = match (&m.merge_radius, &m.epsilon) {
        (Some(s), _) => parse_rational(s).map_err(parse_err)?,
        (None, Some(_)) => eps.clone(),
        (None, None) => d.merge_radius.clone(),
    };
    DerivedParams::new(eps, m.min_mass.unwrap_or(d.min_mass), merge).map_err(parse_err)
}

fn signature_json(s: &OrderSignature) -> Value {
    json!({
        "cb_rank": s.cb_rank,
        "levels": s.levels.iter().map(|l| l.iter().map(dec).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "top_tail_count": s.top_tail_count,
        "is_monotone": s.is_monotone,
    })
}

fn two_sided_json(t: &TwoSidedSignature) -> Value {
    json!({
        "ordinal_like": t.ordinal_like(),
        "representatives": t.representatives.iter().map(|r| json!({
            "value": dec(&r.value),
            "side": match r.side { Side::Below => "below", Side::Above => "above" },
            "basin": r.basin,
        })).collect::<Vec<_>>(),
    })
}

fn omega_json(r: &OmegaPowerReport) -> Value {
    json!({
        "h": r.h,
        "cap": r.cap,
        "points": r.points,
        "signature": signature_json(&r.signature),
        "unmatched": r.unmatched.iter().map(dec).collect::<Vec<_>>(),
        "passed": r.passed(),
    })
}

/// Runs one manifest.
pub fn run(m: &RunManifest) -> Result<Report, CliError> {
    let started = Instant::now();
    if let Some(bits) = m.precision_ceiling {
        set_precision_ceiling(bits);
    }
    let params = params_of(m)?;
    let command = m.command()?;
    let out = match command {
        Command::Orbit => run_orbit(m)?,
        Command::Analyze => run_analyze(m, &params)?,
        Command::Words => run_words(m, &params)?,
        Command::Construct => run_construct(m, &params)?,
        Command::Thicken => run_thicken(m, &params)?,
        Command::Verify => run_verify(m, &params)?,
    };
    let payload = json!({
        "tool": "ordrep",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "inputs": m,
        "parameters": {
            "epsilon": params.epsilon.to_string(),
            "min_mass": params.min_mass,
            "merge_radius": params.merge_radius.to_string(),
            "precision_ceiling": precision_ceiling(),
        },
        "result": out.result,
    });
    Ok(Report { payload, elapsed_ms: started.elapsed().as_millis(), passed: out.passed, csv: out.csv })
}

struct Outcome {
    result: Value,
    passed: Option<bool>,
    csv: Option<String>,
}

impl Outcome {
    fn plain(result: Value) -> Self {
        Outcome { result, passed: None, csv: None }
    }
}

fn orbit_inputs(m: &RunManifest) -> Result<(Multiplier, IndexSetSpec, Vec<u64>), CliError> {
    let x = parse_multiplier(require(&m.x, "x")?).map_err(parse_err)?;
    let spec = IndexSetSpec::parse(require(&m.set, "set")?).map_err(parse_err)?;
    let a = enumerate(&spec, m.limit.unwrap_or(u64::MAX))?;
    Ok((x, spec, a))
}

fn run_orbit(m: &RunManifest) -> Result<Outcome, CliError> {
    let (x, spec, a) = orbit_inputs(m)?;
    let o = orbit(&x, &a)?;
    Ok(Outcome {
        result: json!({
            "multiplier": x.to_string(),
            "set": spec.to_string(),
            "count": o.len(),
            "points": dump::points(&o),
        }),
        passed: None,
        csv: Some(dump_points(&o, Format::Csv)),
    })
}

fn run_analyze(m: &RunManifest, params: &DerivedParams) -> Result<Outcome, CliError> {
    let (x, spec, a) = orbit_inputs(m)?;
    let o = orbit(&x, &a)?;
    let sig = orbit_signature(&o, params, m.tail_threshold.unwrap_or(10))?;
    let points = sort_distinct(&o.values())?;
    let two = two_sided_signature(&points, params)?;
    let counts = descent_counts(&o)?;
    Ok(Outcome::plain(json!({
        "multiplier": x.to_string(),
        "set": spec.to_string(),
        "count": o.len(),
        "signature": signature_json(&sig),
        "two_sided": two_sided_json(&two),
        "descent_counts": counts,
    })))
}

fn periodicity_json(p: &Periodicity) -> Value {
    match p {
        Periodicity::EventuallyPeriodic { period, preperiod, plateau, .. } => json!({
            "verdict": "eventually_periodic", "period": period, "preperiod": preperiod, "plateau": plateau,
        }),
        Periodicity::NoPlateauFound { .. } => json!({ "verdict": "no_plateau_found" }),
    }
}

fn run_words(m: &RunManifest, params: &DerivedParams) -> Result<Outcome, CliError> {
    let spec = require(&m.word, "word")?;
    let w = parse_word(spec).map_err(parse_err)?;
    let max_n = m.max_n.unwrap_or(8);
    let prefix_len = m.prefix_len.unwrap_or(10_000);
    let tail_start = m.tail_start.unwrap_or(prefix_len / 2);
    let mut table = Vec::with_capacity(max_n);
    let mut csv = String::from("n,complexity\n");
    for n in 1..=max_n {
        let c = subword_census(&w, n, prefix_len, tail_start)?.len();
        csv.push_str(&format!("{n},{c}\n"));
        table.push(json!({ "n": n, "complexity": c }));
    }
    let mut result = json!({
        "word": spec,
        "alphabet": w.alphabet(),
        "prefix": prefix_string(&w, m.dump.unwrap_or(64)),
        "prefix_len": prefix_len,
        "tail_start": tail_start,
        "complexity": table,
    });
    if max_n >= 2 {
        result["periodicity"] = periodicity_json(&periodicity_detect(&w, max_n, prefix_len, tail_start)?);
    }
    if let Some(n) = m.shifts {
        let sig = shift_order_signature(&w, n, m.fuel.unwrap_or(2000), params)?;
        result["shift_signature"] = signature_json(&sig);
    }
    Ok(Outcome { result, passed: None, csv: Some(csv) })
}

fn build_set(m: &RunManifest) -> Result<ConstructedSet, CliError> {
    let targets = m.targets.iter().map(|t| OrderTypeSpec::parse(t).map_err(parse_err)).collect::<Result<Vec<_>, _>>()?;
    let xs_src: Vec<&str> = if m.xs.is_empty() { m.x.iter().map(String::as_str).collect() } else { m.xs.iter().map(String::as_str).collect() };
    let xs = xs_src.iter().map(|x| parse_multiplier(x).map_err(parse_err)).collect::<Result<Vec<_>, _>>()?;
    let thin = ThinBound::parse(m.thin.as_deref().unwrap_or("none")).map_err(parse_err)?;
    Ok(construct_a(&targets, &xs, &thin, m.count.unwrap_or(20), m.bound.unwrap_or(DEFAULT_SEARCH_BOUND))?)
}

fn set_json(a: &ConstructedSet, params: &DerivedParams) -> Result<Value, CliError> {
    let elements: Vec<Value> = a
        .elements
        .iter()
        .map(|e| match &e.origin {
            Origin::Interval(t) => json!({ "n": e.n, "intervals": t }),
            Origin::Stage(s) => json!({ "n": e.n, "stage": s }),
        })
        .collect();
    let mut signatures = Vec::new();
    for i in 0..a.multipliers.len() {
        let o = a.orbit(i)?;
        let sig = orbit_signature(&o, params, 10)?;
        let two = two_sided_signature(&sort_distinct(&o.values())?, params)?;
        signatures.push(json!({ "signature": signature_json(&sig), "two_sided": two_sided_json(&two) }));
    }
    let top = a.elements.last().map_or(1, |e| e.n + 1);
    let density: Vec<Value> = density_profile(&a.values(), top.next_power_of_two())
        .into_iter()
        .map(|s| json!({ "n": s.n, "count": s.count, "ratio": s.ratio }))
        .collect();
    Ok(json!({
        "targets": a.targets.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
        "multipliers": a.multipliers.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
        "thin": a.thin.to_string(),
        "experimental": a.experimental,
        "intervals": a.intervals.iter().map(|v| v.iter().map(|i| i.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "elements": elements,
        "respects_thinness": a.respects_thinness(),
        "density": density,
        "orbits": signatures,
    }))
}

fn set_csv(a: &ConstructedSet) -> String {
    let mut csv = String::from("index,element\n");
    for (i, e) in a.elements.iter().enumerate() {
        csv.push_str(&format!("{i},{}\n", e.n));
    }
    csv
}

fn run_construct(m: &RunManifest, params: &DerivedParams) -> Result<Outcome, CliError> {
    let a = build_set(m)?;
    Ok(Outcome { result: set_json(&a, params)?, passed: None, csv: Some(set_csv(&a)) })
}

fn run_thicken(m: &RunManifest, params: &DerivedParams) -> Result<Outcome, CliError> {
    let a = build_set(m)?;
    let theta = ThickTarget::parse(m.theta.as_deref().unwrap_or("n/log2")).map_err(parse_err)?;
    let t = thicken(&a, &theta, m.stages.unwrap_or(3), params, m.bound.unwrap_or(DEFAULT_SEARCH_BOUND))?;
    let superset = a.values().iter().all(|n| t.set.values().binary_search(n).is_ok());
    let beaten = t.witnesses.iter().all(|w| w.count as u64 > w.theta);
    let mut result = set_json(&t.set, params)?;
    result["thickening"] = json!({
        "theta": theta.to_string(),
        "original_size": a.elements.len(),
        "superset": superset,
        "limit_points": t.limit_points.iter().map(dec).collect::<Vec<_>>(),
        "windows": t.windows.iter().map(|ws| ws.iter().map(|w| json!({ "lo": dec(&w.lo), "hi": dec(&w.hi) })).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "witnesses": t.witnesses.iter().map(|w| json!({ "stage": w.stage, "n": w.n, "count": w.count, "theta": w.theta })).collect::<Vec<_>>(),
    });
    Ok(Outcome { result, passed: Some(superset && beaten), csv: Some(set_csv(&t.set)) })
}

fn run_verify(m: &RunManifest, params: &DerivedParams) -> Result<Outcome, CliError> {
    let check = m.check.ok_or_else(|| CliError::Parse("missing field `check`".into()))?;
    match check {
        Check::GoldenGap => verify_golden_gap(m.n_min.unwrap_or(2), m.n_max.unwrap_or(40)),
        Check::OmegaPower => {
            let x = parse_multiplier(m.x.as_deref().unwrap_or("phi")).map_err(parse_err)?;
            let spec = IndexSetSpec::parse(require(&m.set, "set")?).map_err(parse_err)?;
            let a = enumerate(&spec, m.limit.unwrap_or(u64::MAX))?;
            let h = m.h.ok_or_else(|| CliError::Parse("missing field `h`".into()))?;
            let report = match verify_omega_power(&x, &a, h, m.cap.unwrap_or(100_000), params) {
                Ok(r) => r,
                Err(OrderTypeError::OmegaPowerMismatch(r)) => *r,
                Err(e) => return Err(e.into()),
            };
            let passed = report.passed();
            Ok(Outcome { result: json!({ "set": spec.to_string(), "a": a, "report": omega_json(&report) }), passed: Some(passed), csv: None })
        }
        Check::MorphismD => verify_morphism_d(m),
        Check::BigOrdinal => {
            let srcs = if m.words.is_empty() { vec!["tri".to_string(), "morphD(tri)".to_string()] } else { m.words.clone() };
            let inputs = srcs.iter().map(|s| parse_word(s).map_err(parse_err)).collect::<Result<Vec<_>, _>>()?;
            let r = verify_big_ordinal(
                &inputs,
                m.shifts.unwrap_or(200) as usize,
                m.blocks.unwrap_or(50),
                m.fuel.unwrap_or(10_000),
            )?;
            Ok(Outcome {
                result: json!({
                    "words": srcs,
                    "budget": r.budget,
                    "subwords": r.subwords,
                    "blocks_checked": r.blocks_checked,
                    "bad_blocks": r.bad_blocks,
                    "repeated_boundaries": r.repeated_boundaries,
                    "embeddings": r.embeddings.iter().map(|e| json!({
                        "input": e.input, "window": e.window, "pairs_checked": e.pairs_checked, "violations": e.violations,
                    })).collect::<Vec<_>>(),
                    "passed": r.passed(),
                }),
                passed: Some(r.passed()),
                csv: None,
            })
        }
    }
}

fn verify_golden_gap(lo: u64, hi: u64) -> Result<Outcome, CliError> {
    if lo > hi {
        return Err(CliError::Parse("n_min exceeds n_max".into()));
    }
    let gaps: Vec<_> = (lo..=hi).map(golden_gap).collect();
    let alternating = gaps.windows(2).all(|w| w[0].signum() != w[1].signum() && w[0].signum() != std::cmp::Ordering::Equal);
    let mut decreasing = true;
    for w in gaps.windows(2) {
        if w[1].abs().sub(&w[0].abs())?.signum() != std::cmp::Ordering::Less {
            decreasing = false;
        }
    }
    let rows: Vec<Value> = (lo..=hi)
        .zip(&gaps)
        .map(|(n, g)| {
            let sign = match g.signum() {
                std::cmp::Ordering::Less => -1,
                std::cmp::Ordering::Equal => 0,
                std::cmp::Ordering::Greater => 1,
            };
            json!({ "n": n, "sign": sign, "gap": g.to_string() })
        })
        .collect();
    let passed = alternating && decreasing;
    Ok(Outcome {
        result: json!({ "rows": rows, "alternating": alternating, "decreasing": decreasing, "passed": passed }),
        passed: Some(passed),
        csv: None,
    })
}

fn verify_morphism_d(m: &RunManifest) -> Result<Outcome, CliError> {
    let b = m.base.unwrap_or(4);
    let d = morphism_d(b)?;
    let word = FiniteWord::from_digits(m.word.as_deref().unwrap_or("0130"), b).map_err(parse_err)?;
    let image = d.apply(&word)?;
    let pairs = m.pairs.unwrap_or(1000);
    let mut rng = ChaCha8Rng::seed_from_u64(m.seed.unwrap_or(7));
    let (mut resolved, mut agree, mut clean) = (0usize, 0usize, true);
    while resolved < pairs {
        let mut gen = || {
            let len = rng.gen_range(1..24);
            let letters: Vec<u8> = (0..len).map(|_| rng.gen_range(0..b) as u8).collect();
            FiniteWord::new(letters, b)
        };
        let (u, v) = (gen()?, gen()?);
        let plain = lex_compare_finite(&u, &v).result;
        let (du, dv) = (d.apply(&u)?, d.apply(&v)?);
        clean &= [&du, &dv].iter().all(|w| {
            let l = w.letters();
            !l.windows(2).any(|p| p == [0, 0]) && l.split(|&c| c == 0).all(|run| run.len() <= b as usize)
        });
        let mapped = lex_compare_finite(&du, &dv).result;
        if plain == CompareResult::Unresolved || mapped == CompareResult::Unresolved {
            continue;
        }
        resolved += 1;
        agree += usize::from(plain == mapped);
    }
    let passed = agree == resolved && clean;
    Ok(Outcome {
        result: json!({
            "base": b,
            "word": word.to_string(),
            "image": image.to_string(),
            "pairs": resolved,
            "agreeing": agree,
            "prefix_constraints_hold": clean,
            "passed": passed,
        }),
        passed: Some(passed),
        csv: None,
    })
}
