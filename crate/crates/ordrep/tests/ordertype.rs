use num_bigint::BigInt;
use ordrep::numeric::*;
use ordrep::orbits::*;
use ordrep::ordertype::*;
use proptest::prelude::*;

const SCALE: u32 = 40;

fn dy(k: i128) -> Real {
    Real::from_rational(&Rational::new(BigInt::from(k), BigInt::from(1i128 << SCALE)))
}

fn params(eps_den: i64, m: usize) -> DerivedParams {
    DerivedParams::with_epsilon(Rational::new(1.into(), eps_den.into()), m).unwrap()
}

/// The same rule written directly over integer points k / 2^SCALE.
fn oracle(points: &[i128], eps: i128, m: usize, merge: i128) -> Vec<i128> {
    let one = 1i128 << SCALE;
    let mut pool = points.to_vec();
    if pool.last().map_or(true, |&p| p < one) {
        pool.push(one);
    }
    let n = pool.len();
    let up = |i: usize| if i + 1 < n { pool[i + 1] - pool[i] } else { i128::MAX };
    let mut out = Vec::new();
    for i in 0..n {
        let mut size = 0;
        for j in (0..i).rev() {
            if pool[i] - pool[j] >= eps || pool[j + 1] - pool[j] >= up(i) {
                break;
            }
            size += 1;
        }
        if size < m {
            continue;
        }
        if i + 1 < n {
            let g = pool[i + 1] - pool[i];
            if g <= merge && g < eps && g < up(i + 1) {
                continue;
            }
        }
        out.push(pool[i]);
    }
    out
}

fn geometric(offset: f64, from: u32, to: u32) -> Vec<Real> {
    let base = (offset * (1u64 << SCALE) as f64) as i128;
    (from..=to).map(|i| dy(base - (1i128 << (SCALE - i)))).collect()
}

#[test]
fn eps_derived_examples() {
    let pts = geometric(1.0, 1, 20);
    assert_eq!(eps_derived(&pts, &params(8, 3)).unwrap(), vec![Real::one()]);

    let scattered: Vec<Real> = (0..10).map(|i| dy((i * 2 + 1) << (SCALE - 5))).collect();
    assert!(eps_derived(&scattered, &params(64, 3)).unwrap().is_empty());

    let mut pts = geometric(0.25, 3, 20);
    pts.extend(geometric(0.75, 3, 20));
    let reps = eps_derived(&pts, &params(16, 3)).unwrap();
    assert_eq!(reps, vec![dy((1 << (SCALE - 2)) - (1 << (SCALE - 20))), dy((3 << (SCALE - 2)) - (1 << (SCALE - 20)))]);
}

#[test]
fn eps_derived_rejects_unsorted() {
    let pts = vec![dy(5), dy(3)];
    assert_eq!(eps_derived(&pts, &DerivedParams::default()), Err(OrderTypeError::NotSortedDistinct));
}

#[test]
fn params_validation() {
    let r = |n: i64, d: i64| Rational::new(n.into(), d.into());
    assert!(DerivedParams::new(r(1, 64), 1, r(1, 64)).is_err());
    assert!(DerivedParams::new(r(1, 64), 3, r(1, 32)).is_err());
    assert!(DerivedParams::new(r(1, 1), 3, r(1, 64)).is_err());
    assert!(DerivedParams::new(r(1, 64), 3, r(1, 128)).is_ok());
}

fn point_sets() -> impl Strategy<Value = Vec<i128>> {
    prop::collection::btree_set(0i128..(1 << SCALE), 0..60).prop_map(|s| s.into_iter().collect())
}

fn clustered_sets() -> impl Strategy<Value = Vec<i128>> {
    prop::collection::vec((0i128..(1 << SCALE), 1u32..12, 2u32..10), 1..6).prop_map(|specs| {
        let mut v: Vec<i128> = specs
            .into_iter()
            .flat_map(|(top, len, step)| (1..=len).map(move |i| top - (1i128 << (SCALE - step - i))))
            .filter(|&p| p >= 0)
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    })
}

proptest! {
    #[test]
    fn eps_derived_matches_oracle(pts in prop_oneof![point_sets(), clustered_sets()], e in 3u32..8, m in 2usize..5, shrink in 0u32..3) {
        let eps = 1i128 << (SCALE - e);
        let merge = eps >> shrink;
        let p = DerivedParams::new(
            Rational::new(1.into(), BigInt::from(1u64 << e)),
            m,
            Rational::new(1.into(), BigInt::from(1u64 << (e + shrink))),
        ).unwrap();
        let reals: Vec<Real> = pts.iter().map(|&k| dy(k)).collect();
        let got = eps_derived(&reals, &p).unwrap();
        let want: Vec<Real> = oracle(&pts, eps, m, merge).into_iter().map(dy).collect();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn eps_derived_structural(pts in prop_oneof![point_sets(), clustered_sets()], m in 2usize..6) {
        let reals: Vec<Real> = pts.iter().map(|&k| dy(k)).collect();
        let p = DerivedParams::with_epsilon(Rational::new(1.into(), 32.into()), m).unwrap();
        let out = eps_derived(&reals, &p).unwrap();
        prop_assert!(out.len() <= reals.len());
        prop_assert!(out.windows(2).all(|w| w[0].lt(&w[1]).unwrap()));
        let stricter = DerivedParams::with_epsilon(Rational::new(1.into(), 32.into()), m + 1).unwrap();
        let fewer = eps_derived(&reals, &stricter).unwrap();
        prop_assert!(fewer.iter().all(|r| out.contains(r)));
        let sig = cb_signature(&reals, &p, false).unwrap();
        prop_assert_eq!(sig.cb_rank, sig.levels.len());
        prop_assert!(sig.levels.iter().all(|l| !l.is_empty()));
    }

    #[test]
    fn descent_counts_of_sorted_and_reversed(a in prop::collection::btree_set(1u64..100_000, 1..40)) {
        let a: Vec<u64> = a.into_iter().collect();
        let o = orbit(&Multiplier::phi(), &a).unwrap();
        let vals = o.values();
        let brute: Vec<usize> = (0..vals.len())
            .map(|i| (i + 1..vals.len()).filter(|&j| vals[j].lt(&vals[i]).unwrap()).count())
            .collect();
        prop_assert_eq!(descent_counts(&o).unwrap(), brute);
    }
}

#[test]
fn descent_counts_examples() {
    let inc = orbit(&Multiplier::phi(), &[1, 3, 8, 21, 55]).unwrap();
    assert_eq!(descent_counts(&inc).unwrap(), vec![0; 5]);
    assert_eq!(top_tail_count(&inc, 5).unwrap(), 0);
    let one = orbit(&Multiplier::phi(), &[7]).unwrap();
    assert_eq!(descent_counts(&one).unwrap(), vec![0]);
    let fib = enumerate(&IndexSetSpec::FibEven { shift: 0 }, 1 << 30).unwrap();
    // Walking the monotone points in reverse order gives n-1, n-2, ..., 0.
    let rev: Vec<u64> = fib.iter().rev().map(|&a| a).collect();
    let m = Multiplier::phi();
    let entries: Vec<Real> = rev.iter().map(|&a| m.frac_mul(a).unwrap().into_real()).collect();
    let n = entries.len();
    let brute: Vec<usize> = (0..n).map(|i| (i + 1..n).filter(|&j| entries[j].lt(&entries[i]).unwrap()).count()).collect();
    assert_eq!(brute, (0..n).rev().collect::<Vec<_>>());
    assert!(top_tail_count(&inc, 6).is_err());
}

fn odd_power_orbit(k: u32, len: usize) -> Orbit {
    let x = Multiplier::quadratic(QuadraticReal::phi().pow(k)).unwrap();
    let a = enumerate(&IndexSetSpec::FibEven { shift: 1 }, u64::MAX / 16).unwrap();
    orbit(&x, &a[..len]).unwrap()
}

#[test]
fn odd_powers_have_top_tail() {
    let o = odd_power_orbit(3, 20);
    let c = descent_counts(&o).unwrap();
    assert_eq!(&c[..2], &[18, 18]);
    assert!(c[2..].iter().all(|&x| x == 0));
    assert_eq!(top_tail_count(&o, 10).unwrap(), 2);
    assert_eq!(top_tail_count(&odd_power_orbit(5, 25), 10).unwrap(), 4);
    assert_eq!(top_tail_count(&odd_power_orbit(5, 20), 10).unwrap(), 4);
    assert_eq!(top_tail_count(&odd_power_orbit(7, 25), 10).unwrap(), 6);
}

#[test]
fn top_tail_stable_under_appending() {
    let short = top_tail_count(&odd_power_orbit(3, 20), 10).unwrap();
    let long = top_tail_count(&odd_power_orbit(3, 30), 10).unwrap();
    assert_eq!(short, long);
}

fn fib_z(to: u64) -> Vec<Real> {
    let a: Vec<u64> = (2..=to).map(|n| fibonacci_u64(n).unwrap()).collect();
    let mut a = a;
    a.dedup();
    let o = orbit(&Multiplier::phi(), &a).unwrap();
    sort_distinct(&o.values()).unwrap()
}

#[test]
fn fibonacci_orbit_is_z_like() {
    let pts = fib_z(30);
    let p = DerivedParams::default();
    let sig = cb_signature(&pts, &p, false).unwrap();
    assert_eq!(sig.cb_rank, 1);
    assert_eq!(sig.levels[0].len(), 2);
    assert!(sig.levels[0][0].lt(&Real::from_rational(&p.epsilon)).unwrap());
    assert_eq!(sig.levels[0][1], Real::one());

    let two = two_sided_signature(&pts, &p).unwrap();
    let sides: Vec<Side> = two.representatives.iter().map(|r| r.side).collect();
    assert_eq!(sides, vec![Side::Above, Side::Below]);
    assert_eq!(two.representatives[0].value, Real::zero());
    assert_eq!(two.representatives[1].value, Real::one());
    assert!(!two.ordinal_like());
}

#[test]
fn omega_sets_are_ordinal_like() {
    let a = enumerate(&IndexSetSpec::FibEven { shift: 0 }, 1 << 40).unwrap();
    let o = orbit(&Multiplier::phi(), &a).unwrap();
    let pts = sort_distinct(&o.values()).unwrap();
    let two = two_sided_signature(&pts, &DerivedParams::default()).unwrap();
    assert!(two.ordinal_like());
    assert_eq!(two.representatives.len(), 1);
    let sig = orbit_signature(&o, &DerivedParams::default(), 10).unwrap();
    assert_eq!((sig.cb_rank, sig.is_monotone, sig.top_tail_count), (1, true, 0));
}

#[test]
fn empty_signature() {
    let sig = cb_signature(&[], &DerivedParams::default(), true).unwrap();
    assert_eq!(sig.cb_rank, 0);
    assert!(sig.levels.is_empty());
}

#[test]
fn rank_ceiling_is_enforced() {
    let pts = geometric(1.0, 1, 20);
    let p = params(8, 3);
    assert!(cb_signature_with_ceiling(&pts, &p, true, 1).is_ok());
    let mut nested = Vec::new();
    for top in 1..=12 {
        nested.extend(geometric(top as f64 / 16.0, 8, 20));
    }
    let nested = sort_distinct(&nested).unwrap();
    assert!(cb_signature_with_ceiling(&nested, &params(8, 3), false, 0).is_err());
}

#[test]
fn omega_power_trivial_case() {
    let phi = Multiplier::phi();
    let p = DerivedParams::with_epsilon(Rational::new(1.into(), 4.into()), 3).unwrap();
    let r = verify_omega_power(&phi, &[1, 3, 8, 21, 55], 1, 1000, &p).unwrap();
    assert_eq!(r.signature.cb_rank, 1);
    assert_eq!(r.signature.levels[0], vec![Real::one()]);
    for count in 6..12 {
        let a = monotone_approach(&QuadraticReal::sqrt(7).unwrap(), count, DEFAULT_SEARCH_BOUND).unwrap();
        let x = parse_multiplier("sqrt(7)").unwrap();
        assert!(verify_omega_power(&x, &a, 1, u64::MAX, &p).is_ok(), "count {count}");
    }
}

#[test]
fn omega_power_on_deep_prefixes() {
    let phi = QuadraticReal::phi();
    let a = monotone_approach(&phi, 16, DEFAULT_SEARCH_BOUND).unwrap();
    let p = DerivedParams::default();
    for h in 1..=3 {
        let r = verify_omega_power(&Multiplier::phi(), &a, h, u64::MAX, &p);
        assert!(r.is_ok(), "h = {h}: {:?}", r.err().map(|e| e.to_string()));
    }
}

#[test]
fn omega_power_mismatch_reports_details() {
    let a = monotone_approach(&QuadraticReal::phi(), 8, DEFAULT_SEARCH_BOUND).unwrap();
    match verify_omega_power(&Multiplier::phi(), &a, 3, 100_000, &DerivedParams::default()) {
        Err(OrderTypeError::OmegaPowerMismatch(r)) => {
            assert_eq!(r.h, 3);
            assert!(r.to_string().contains("expected rank 3"));
        }
        other => panic!("unexpected {other:?}"),
    }
}
