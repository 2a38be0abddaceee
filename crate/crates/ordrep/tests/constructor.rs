mod common;

use common::frac_digits;
use num_bigint::BigInt;
use ordrep::constructor::*;
use ordrep::numeric::*;
use ordrep::orbits::*;
use ordrep::ordertype::*;
use proptest::prelude::*;

fn r(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn iv(lo: (i64, i64), hi: (i64, i64)) -> IntervalSpec {
    IntervalSpec::new(r(lo.0, lo.1), r(hi.0, hi.1)).unwrap()
}

fn sqrt2() -> Multiplier {
    Multiplier::quadratic(QuadraticReal::sqrt(2).unwrap()).unwrap()
}

/// frac(n·(a+b√d)/c) in [lo, hi] judged on 40 oracle digits.
fn oracle_in(a: i64, b: i64, d: u64, c: i64, n: u64, iv: &IntervalSpec) -> bool {
    let digits = 40;
    let f = frac_digits(a, b, d, c, n, digits);
    let scale = BigInt::from(10u32).pow(digits);
    let lo = iv.lo.numer() * &scale;
    let hi = iv.hi.numer() * &scale;
    let fl = &f * iv.lo.denom();
    let fh = &f * iv.hi.denom();
    fl > lo && fh < hi
}

#[test]
fn parse_specs() {
    assert_eq!(OrderTypeSpec::parse("3").unwrap(), OrderTypeSpec::Finite(3));
    assert_eq!(OrderTypeSpec::parse("omega").unwrap(), OrderTypeSpec::Cnf(vec![(1, 1)]));
    assert_eq!(
        OrderTypeSpec::parse("omega^2*3+omega+2").unwrap(),
        OrderTypeSpec::Cnf(vec![(2, 3), (1, 1), (0, 2)])
    );
    assert_eq!(OrderTypeSpec::parse("Z").unwrap(), OrderTypeSpec::Integers);
    assert_eq!(OrderTypeSpec::parse("Q").unwrap(), OrderTypeSpec::Rationals);
    assert!(OrderTypeSpec::parse("omega+omega^2").is_err());
    assert!(OrderTypeSpec::parse("omega^5").is_err());
    assert!(OrderTypeSpec::parse("omega*10").is_err());
    for s in ["omega^2*3+omega+2", "omega^4", "7", "Z", "Q", "intervals:(1/3,2/3);(3/4,7/8)"] {
        assert_eq!(OrderTypeSpec::parse(s).unwrap().to_string(), s);
    }
}

#[test]
fn layout_examples() {
    let f = intervals_for(&OrderTypeSpec::Finite(2), 2).unwrap();
    assert_eq!(f[0], iv((1, 3), (2, 3)));
    assert!(f[0].precedes(&f[1]));
    let w = intervals_for(&OrderTypeSpec::parse("omega").unwrap(), 3).unwrap();
    assert_eq!(w, vec![iv((1, 8), (3, 8)), iv((9, 16), (11, 16)), iv((25, 32), (27, 32))]);
    let z = intervals_for(&OrderTypeSpec::Integers, 2).unwrap();
    let half = r(1, 2);
    assert!(z.iter().any(|i| i.hi <= half) && z.iter().any(|i| i.lo >= half));
    assert!(z[0].precedes(&z[1]) || z[1].precedes(&z[0]));
    assert!(intervals_for(&OrderTypeSpec::Finite(3), 0).is_err());
    assert_eq!(intervals_for(&OrderTypeSpec::Finite(3), 10).unwrap().len(), 3);
}

#[test]
fn hits() {
    let phi = Multiplier::phi();
    let i = iv((9, 10), (95, 100));
    assert_eq!(find_hit(&[phi.clone()], &[i.clone()], 1, 1000).unwrap(), 8);
    assert_eq!(find_hit(&[sqrt2()], &[iv((4, 10), (45, 100))], 1, 1000).unwrap(), 1);
    let j = iv((6, 10), (63, 100));
    let n = find_hit(&[phi.clone()], &[j.clone()], 2, 1000).unwrap();
    let scan = (2..1000).find(|&n| oracle_in(1, 1, 5, 2, n, &j)).unwrap();
    assert_eq!(n, scan);
    assert_eq!(find_hit(&[phi], &[iv((9, 10), (901, 1000))], 1, 5), Err(ConstructorError::BoundExceeded(5)));
}

#[test]
fn hits_in_two_coordinates() {
    let xs = [Multiplier::phi(), sqrt2()];
    let ivs = [iv((1, 4), (1, 2)), iv((1, 2), (3, 4))];
    let n = find_hit(&xs, &ivs, 1, 100000).unwrap();
    assert!(oracle_in(1, 1, 5, 2, n, &ivs[0]) && oracle_in(0, 1, 2, 1, n, &ivs[1]));
    assert!((1..n).all(|m| !(oracle_in(1, 1, 5, 2, m, &ivs[0]) && oracle_in(0, 1, 2, 1, m, &ivs[1]))));
}

#[test]
fn independence_heuristic() {
    let phi = Multiplier::phi();
    let sqrt5 = Multiplier::quadratic(QuadraticReal::sqrt(5).unwrap()).unwrap();
    assert!(matches!(check_independence(&[phi.clone(), sqrt5]), Err(ConstructorError::LinearDependence(_))));
    assert!(check_independence(&[phi, sqrt2()]).is_ok());
}

#[test]
fn thin_bounds() {
    assert_eq!(ThinBound::Sqrt.eval(9), 3);
    assert_eq!(ThinBound::Sqrt.eval(10), 4);
    assert_eq!(ThinBound::Log2.eval(1), 1);
    assert_eq!(ThinBound::Log2.eval(7), 3);
    assert_eq!(ThinBound::Log2.eval(8), 4);
    let t = ThinBound::parse("table:0=1,100=2,10000=3").unwrap();
    assert_eq!((t.eval(0), t.eval(99), t.eval(100), t.eval(1 << 40)), (1, 1, 2, 3));
    assert!(ThinBound::parse("table:5=3,4=4").is_err());
    assert_eq!(ThickTarget::NOverLog2.eval(3), 1);
    assert_eq!(ThickTarget::NOverLog2.eval(14), 4);
}

fn omega_set(count: usize) -> ConstructedSet {
    construct_a(&[OrderTypeSpec::parse("omega").unwrap()], &[sqrt2()], &ThinBound::Sqrt, count, DEFAULT_SEARCH_BOUND)
        .unwrap()
}

#[test]
fn omega_construction() {
    let a = omega_set(20);
    assert_eq!(a.elements.len(), 20);
    assert!(!a.experimental);
    assert!(a.respects_thinness());
    let ivs = &a.intervals[0];
    for e in &a.elements {
        let Origin::Interval(t) = &e.origin else { panic!() };
        assert!(oracle_in(0, 1, 2, 1, e.n, &ivs[t[0]]));
    }
    let o = a.orbit(0).unwrap();
    let sig = orbit_signature(&o, &DerivedParams::default(), 10).unwrap();
    assert_eq!(sig.cb_rank, 1, "{sig}");
    assert!(sig.is_monotone);
}

#[test]
fn finite_construction() {
    let a = construct_a(&[OrderTypeSpec::Finite(3)], &[Multiplier::phi()], &ThinBound::Sqrt, 10, 1 << 40).unwrap();
    assert_eq!(a.elements.len(), 3);
    let ivs = &a.intervals[0];
    for (k, e) in a.elements.iter().enumerate() {
        assert!(oracle_in(1, 1, 5, 2, e.n, &ivs[k]));
    }
}

#[test]
fn integers_construction_is_two_sided() {
    let a = construct_a(&[OrderTypeSpec::Integers], &[sqrt2()], &ThinBound::Unbounded, 30, DEFAULT_SEARCH_BOUND).unwrap();
    let pts = sort_distinct(&a.orbit(0).unwrap().values()).unwrap();
    let two = two_sided_signature(&pts, &DerivedParams::default()).unwrap();
    assert!(!two.ordinal_like(), "{two:?}");
    assert!(two.representatives.iter().any(|r| r.side == Side::Above));
    assert!(two.representatives.iter().any(|r| r.side == Side::Below));
}

#[test]
fn two_multipliers_are_experimental() {
    let t = OrderTypeSpec::parse("omega").unwrap();
    let a = construct_a(&[t.clone(), t], &[Multiplier::phi(), sqrt2()], &ThinBound::Unbounded, 6, 1 << 40).unwrap();
    assert!(a.experimental);
    for e in &a.elements {
        let Origin::Interval(tuple) = &e.origin else { panic!() };
        for (i, x) in a.multipliers.iter().enumerate() {
            let v = x.frac_mul(e.n).unwrap().into_real();
            assert!(a.intervals[i][tuple[i]].contains(&v).unwrap());
        }
    }
}

#[test]
fn density() {
    let all: Vec<u64> = (0..1024).collect();
    assert!(density_profile(&all, 1024).iter().all(|s| s.ratio == 1.0));
    let pows: Vec<u64> = (0..40).map(|i| 1u64 << i).collect();
    for s in density_profile(&pows, 1 << 20) {
        let j = s.n.trailing_zeros() as usize;
        assert_eq!(s.count, j);
    }
    let a = omega_set(20);
    let prof = density_profile(&a.values(), a.values().last().unwrap() + 1);
    assert!(prof.last().unwrap().ratio < 0.05);
}

#[test]
fn gaps() {
    let fib = enumerate(&IndexSetSpec::FibEven { shift: 0 }, u64::MAX).unwrap();
    let a = &fib[..20];
    let g = gap_partition(&Multiplier::phi(), a, 20, &DerivedParams::default()).unwrap();
    assert_eq!(g.intervals.len(), 21);
    assert!(Real::from_rational(&r(99, 100)).le(&g.total).unwrap());
    let pts = orbit(&Multiplier::phi(), a).unwrap().values();
    for w in g.intervals.windows(2) {
        assert!(w[0].hi.le(&w[1].lo).unwrap());
    }
    for p in &pts {
        assert!(g.intervals.iter().all(|i| !i.contains(p).unwrap()));
    }
    let single = gap_partition(&Multiplier::phi(), &[1], 1, &DerivedParams::default()).unwrap();
    assert_eq!(single.intervals.len(), 2);
    assert_eq!(single.total.cmp_real(&Real::one()).unwrap(), std::cmp::Ordering::Equal);
    let empty = gap_partition(&Multiplier::phi(), &[], 0, &DerivedParams::default()).unwrap();
    assert_eq!(empty.intervals, vec![RealInterval { lo: Real::zero(), hi: Real::one() }]);

    let z: Vec<u64> = (2..=30).map(|n| fibonacci_u64(n).unwrap()).collect();
    assert_eq!(
        gap_partition(&Multiplier::phi(), &z, 29, &DerivedParams::default()),
        Err(ConstructorError::NotOrdinalLike)
    );
}

#[test]
fn limit_points() {
    let p = DerivedParams::default();
    let fib = enumerate(&IndexSetSpec::FibEven { shift: 0 }, u64::MAX).unwrap();
    let z = smallest_limit_point(&orbit(&Multiplier::phi(), &fib[..20]).unwrap(), &p).unwrap();
    assert!(Real::from_rational(&r(63, 64)).lt(&z).unwrap());
    let zz: Vec<u64> = (2..=30).map(|n| fibonacci_u64(n).unwrap()).collect();
    let z = smallest_limit_point(&orbit(&Multiplier::phi(), &zz).unwrap(), &p).unwrap();
    assert!(z.lt(&Real::from_rational(&r(1, 64))).unwrap());
    let scattered = orbit(&Multiplier::phi(), &[1, 2, 3, 4, 5]).unwrap();
    assert_eq!(smallest_limit_point(&scattered, &p), Err(ConstructorError::NoLimitPoint));
}

#[test]
fn thickening() {
    let a = omega_set(20);
    let p = DerivedParams::default();
    let t = thicken(&a, &ThickTarget::NOverLog2, 3, &p, DEFAULT_SEARCH_BOUND).unwrap();
    let before = a.values();
    let after = t.set.values();
    assert!(before.iter().all(|n| after.binary_search(n).is_ok()));
    assert_eq!(t.witnesses.len(), 3);
    for w in &t.witnesses {
        assert!(w.count as u64 > w.theta);
        assert_eq!(w.theta, ThickTarget::NOverLog2.eval(w.n));
    }
    assert!(t.witnesses.windows(2).all(|w| w[0].n < w[1].n));
    for m in 1..t.windows.len() {
        assert!(t.windows[m - 1][0].lo.le(&t.windows[m][0].lo).unwrap());
        assert!(t.windows[m][0].hi.le(&t.windows[m - 1][0].hi).unwrap());
    }
    let sig = orbit_signature(&t.set.orbit(0).unwrap(), &p, 10).unwrap();
    println!("witnesses {:?}\n{sig}", t.witnesses);
    assert_eq!(sig.cb_rank, 1, "{sig}");

    assert_eq!(thicken(&a, &ThickTarget::NOverLog2, 0, &p, 1 << 40).unwrap().set, a);
    assert!(matches!(
        thicken(&a, &ThickTarget::Linear(1, 4), 3, &p, 1 << 40),
        Err(ConstructorError::InadmissibleTheta(_))
    ));
    let zset = construct_a(&[OrderTypeSpec::Integers], &[sqrt2()], &ThinBound::Unbounded, 5, 1 << 40).unwrap();
    assert_eq!(thicken(&zset, &ThickTarget::NOverLog2, 3, &p, 1 << 40), Err(ConstructorError::NotOrdinal));
}

fn spec_strategy() -> impl Strategy<Value = OrderTypeSpec> {
    prop_oneof![
        (1u64..8).prop_map(OrderTypeSpec::Finite),
        Just(OrderTypeSpec::Integers),
        Just(OrderTypeSpec::Rationals),
        prop::collection::btree_map(0u32..=4, 1u64..=3, 1..3).prop_map(|m| {
            OrderTypeSpec::cnf(m.into_iter().rev().collect()).unwrap()
        }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn layouts_are_order_faithful(spec in spec_strategy(), count in 1usize..40) {
        let lay = layout(&spec, count).unwrap();
        for (i, (ka, a)) in lay.iter().enumerate() {
            prop_assert!(a.lo < a.hi && a.lo > Rational::from_integer(0.into()) && a.hi < Rational::from_integer(1.into()));
            for (kb, b) in &lay[i + 1..] {
                prop_assert_ne!(ka, kb);
                prop_assert_eq!(ka < kb, a.precedes(b));
                prop_assert_eq!(kb < ka, b.precedes(a));
            }
        }
    }

    #[test]
    fn diagonal_covers_small_tuples(dim in 1usize..4) {
        let tuples = diagonal_tuples(dim, 200);
        let distinct: std::collections::BTreeSet<_> = tuples.iter().collect();
        prop_assert_eq!(distinct.len(), tuples.len());
        for w in tuples.windows(2) {
            prop_assert!(w[0].iter().sum::<u64>() <= w[1].iter().sum::<u64>());
        }
    }

    #[test]
    fn hits_are_minimal(lo in 1i64..90, w in 2i64..10, start in 1u64..50) {
        let i = iv((lo, 100), (lo + w, 100));
        let n = find_hit(&[sqrt2()], &[i.clone()], start, 1 << 20).unwrap();
        prop_assert!(oracle_in(0, 1, 2, 1, n, &i));
        prop_assert!((start..n).all(|m| !oracle_in(0, 1, 2, 1, m, &i)));
    }

    #[test]
    fn thin_constructions_respect_psi(count in 1usize..25, log in proptest::bool::ANY) {
        let thin = if log { ThinBound::Log2 } else { ThinBound::Sqrt };
        let a = construct_a(&[OrderTypeSpec::parse("omega").unwrap()], &[sqrt2()], &thin, count.min(if log { 12 } else { 25 }), DEFAULT_SEARCH_BOUND).unwrap();
        prop_assert!(a.respects_thinness());
        prop_assert!(a.elements.windows(2).all(|w| w[0].n < w[1].n));
    }
}

