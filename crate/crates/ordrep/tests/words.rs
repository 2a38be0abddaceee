use num_bigint::BigInt;
use ordrep::numeric::*;
use ordrep::ordertype::*;
use ordrep::words::*;
use proptest::prelude::*;
use std::collections::BTreeSet;

fn fw(s: &str, b: u32) -> FiniteWord {
    FiniteWord::from_digits(s, b).unwrap()
}

fn p011() -> LazyWord {
    LazyWord::periodic(&[], &[0, 1, 1], 2).unwrap()
}

/// Triangular indicator by explicit enumeration of k(k+1)/2.
fn tri_oracle(len: usize) -> Vec<u8> {
    let mut v = vec![1u8; len];
    let mut k = 0usize;
    while k * (k + 1) / 2 < len {
        v[k * (k + 1) / 2] = 0;
        k += 1;
    }
    v
}

fn oracle_complexity(seg: &[u8], n: usize) -> usize {
    let mut seen = BTreeSet::new();
    for i in 0..=seg.len() - n {
        seen.insert(seg[i..i + n].to_vec());
    }
    seen.len()
}

#[test]
fn triangular_prefix_and_letters() {
    let w = triangular_word();
    assert_eq!(prefix_string(&w, 16), "0010110111011110");
    assert_eq!(w.letter_at(0), 0);
    assert_eq!(w.letter_at(2), 1);
    assert_eq!(w.letter_at(6), 0);
    assert_eq!(w.letter_at(7), 1);
    assert_eq!(w.prefix(5000), tri_oracle(5000));
    assert_eq!(LazyWord::zero_ones_product().prefix(5000), tri_oracle(5000));
    assert_eq!(p011().letter_at(5), 1);
}

#[test]
fn shifts() {
    let w = triangular_word();
    assert_eq!(shift(&w, 0).prefix(50), w.prefix(50));
    assert!(prefix_string(&shift(&w, 1), 9).starts_with("010110111"));
    assert_eq!(shift(&p011(), 3).prefix(30), p011().prefix(30));
    assert_eq!(shift(&shift(&w, 17), 40).prefix(200), shift(&w, 57).prefix(200));
}

#[test]
fn comparisons() {
    let a = LazyWord::periodic(&[0], &[1], 2).unwrap();
    let b = LazyWord::periodic(&[1], &[0], 2).unwrap();
    let o = lex_compare(&a, &b, 10);
    assert_eq!(o.result, CompareResult::Less);
    assert_eq!(o.first_diff_index, Some(0));
    assert_eq!(o.distance, Some(Rational::from_integer(1.into())));

    let t = triangular_word();
    let o = lex_compare(&t, &shift(&t, 1), 100);
    assert_eq!((o.result, o.first_diff_index), (CompareResult::Less, Some(1)));
    assert_eq!(o.distance, Some(Rational::new(1.into(), 2.into())));

    let p = LazyWord::periodic(&[], &[0, 1], 2).unwrap();
    assert_eq!(lex_compare(&p, &p, 100).result, CompareResult::Unresolved);
}

#[test]
fn morphisms() {
    let d = morphism_d(4).unwrap();
    assert_eq!(d.apply(&fw("0130", 4)).unwrap().to_string(), "010110111101");
    assert!(d.apply(&FiniteWord::new(vec![], 4).unwrap()).unwrap().is_empty());
    assert_eq!(spacer_morphism(0).apply(&fw("01", 2)).unwrap().to_string(), "1222");
    assert_eq!(spacer_morphism(0).image(0).to_string(), "12");
    assert_eq!(spacer_morphism(0).image(1).to_string(), "22");
    assert_eq!(spacer_morphism(1).image(0).to_string(), "122");
    assert_eq!(spacer_morphism(1).image(1).to_string(), "222");
    assert_eq!(spacer_morphism(2).image(0).len(), 4);
    assert!(matches!(
        morphism_d(2).unwrap().apply(&fw("012", 3)),
        Err(WordError::LetterOutOfAlphabet { letter: 2, alphabet: 2 })
    ));
}

#[test]
fn lazy_morphic_image_matches_finite() {
    let t = triangular_word();
    let d = morphism_d(2).unwrap();
    let lazy = morphism_apply_lazy(&d, &t).unwrap();
    let finite = d.apply(&FiniteWord::new(t.prefix(20000), 2).unwrap()).unwrap();
    assert_eq!(lazy.prefix(30000), finite.letters()[..30000]);
    // random access past several index checkpoints
    for start in [0u64, 1, 4095, 4096, 9000, 17777, 25000] {
        assert_eq!(lazy.segment(start, 500), finite.letters()[start as usize..start as usize + 500]);
    }
}

#[test]
fn census_and_complexity() {
    let s = subword_census(&p011(), 2, 100, 50).unwrap();
    let got: Vec<String> = s.iter().map(|w| w.to_string()).collect();
    assert_eq!(got, ["01", "10", "11"]);
    assert_eq!(complexity(&p011(), 3, 100, 50).unwrap(), 3);
    let t = triangular_word();
    assert_eq!(complexity(&t, 1, 10000, 5000).unwrap(), 2);
    let zero = LazyWord::periodic(&[], &[0], 2).unwrap();
    let only: Vec<String> = subword_census(&zero, 3, 50, 0).unwrap().iter().map(|w| w.to_string()).collect();
    assert_eq!(only, ["000"]);
    assert_eq!(subword_census(&t, 5, 10, 6), Err(WordError::BadWindow));

    let seg = &tri_oracle(10000)[5000..];
    for n in 1..=12 {
        assert_eq!(complexity(&t, n, 10000, 5000).unwrap(), oracle_complexity(seg, n));
    }
}

#[test]
fn periodicity() {
    match periodicity_detect(&p011(), 8, 200, 100).unwrap() {
        Periodicity::EventuallyPeriodic { period, preperiod, plateau, .. } => {
            assert_eq!((period, preperiod, plateau), (3, 0, 2));
        }
        other => panic!("{other:?}"),
    }
    let zero = LazyWord::periodic(&[], &[0], 2).unwrap();
    assert!(matches!(
        periodicity_detect(&zero, 4, 100, 50).unwrap(),
        Periodicity::EventuallyPeriodic { period: 1, preperiod: 0, .. }
    ));
    let pre = LazyWord::periodic(&[1, 1, 0, 1], &[0, 0, 1], 2).unwrap();
    assert!(matches!(
        periodicity_detect(&pre, 8, 300, 150).unwrap(),
        Periodicity::EventuallyPeriodic { period: 3, preperiod: 2, .. }
    ));
    match periodicity_detect(&triangular_word(), 12, 10000, 5000).unwrap() {
        Periodicity::NoPlateauFound { complexities } => {
            assert!(complexities.windows(2).all(|p| p[0] < p[1]));
        }
        other => panic!("{other:?}"),
    }
}

fn rat(n: i64, d: i64) -> Real {
    Real::from_rational(&Rational::new(n.into(), d.into()))
}

#[test]
fn unit_values() {
    let zero = LazyWord::periodic(&[], &[0], 2).unwrap();
    let v = word_to_unit(&zero, 40).into_real();
    assert!(v.lt(&rat(1, 1 << 39)).unwrap() && rat(-1, 1 << 39).lt(&v).unwrap());

    let alt = LazyWord::periodic(&[], &[1, 0], 2).unwrap();
    let v = word_to_unit(&alt, 60).into_real();
    let third = rat(2, 3);
    assert!(v.sub(&third).lt(&rat(1, 1 << 50)).unwrap());
    assert!(third.sub(&v).lt(&rat(1, 1 << 50)).unwrap());

    // exact binary value of the 30-letter prefix
    let bits = tri_oracle(30);
    let num = bits.iter().fold(BigInt::from(0), |acc, &b| acc * 2 + b);
    let exact = Real::from_rational(&Rational::new(num, BigInt::from(1u64 << 30)));
    let v = word_to_unit(&triangular_word(), 30).into_real();
    assert!(v.sub(&exact).lt(&rat(1, 1 << 29)).unwrap());
    assert!(exact.le(&v.add(&rat(1, 1 << 31))).unwrap());
    assert_eq!(v.to_decimal(6), "0.179184");
}

#[test]
fn triangular_shift_signature_is_omega_squared() {
    let sig = shift_order_signature(&triangular_word(), 300, 2000, &DerivedParams::default()).unwrap();
    assert_eq!(sig.cb_rank, 2, "{sig}");
    assert!(!sig.is_monotone);
    // level-1 points sit at 1^a 0 1^ω = 1 − 2^{−a−1}
    for a in 0..3 {
        let target = rat((1 << (a + 1)) - 1, 1 << (a + 1));
        let near = sig.levels[0]
            .iter()
            .any(|v| v.sub(&target).lt(&rat(1, 64)).unwrap() && target.sub(v).lt(&rat(1, 64)).unwrap());
        assert!(near, "no level-1 point near 1-2^-{}: {sig}", a + 1);
    }
}

#[test]
fn rational_words_refused() {
    assert_eq!(
        shift_order_signature(&p011(), 10, 100, &DerivedParams::default()),
        Err(WordError::RationalWord)
    );
}

fn blocks_of(v: &[u8]) -> Vec<&[u8]> {
    v.split_inclusive(|&l| l == 0).collect()
}

#[test]
fn big_ordinal_blocks() {
    let inputs = [triangular_word(), morphism_apply_lazy(&morphism_d(2).unwrap(), &triangular_word()).unwrap()];
    let v = big_ordinal_word(&inputs, 40).unwrap();
    assert_eq!(v.alphabet(), 4);
    let pre = v.prefix(3000);
    let blocks = blocks_of(&pre);
    assert_eq!(blocks[0], [1, 0]);
    assert_eq!(blocks[1][0], 3);
    for (k, b) in blocks.iter().enumerate().take(blocks.len() - 1) {
        let lead = b.iter().take_while(|&&l| l == 3).count();
        assert_eq!(lead, k);
        assert!(b[lead..b.len() - 1].iter().all(|&l| l == 1 || l == 2));
    }
    assert!(matches!(big_ordinal_word(&inputs, 1), Err(WordError::BudgetExhausted(_))));
    assert!(matches!(big_ordinal_word(&[], 40), Err(WordError::BudgetExhausted(_))));
}

#[test]
fn grammar() {
    assert_eq!(prefix_string(&parse_word("tri").unwrap(), 16), "0010110111011110");
    assert_eq!(prefix_string(&parse_word("periodic:prefix=001,cycle=011").unwrap(), 9), "001011011");
    assert_eq!(prefix_string(&parse_word("product:01^k").unwrap(), 10), "0010110111");
    assert_eq!(prefix_string(&parse_word("morphD(tri)").unwrap(), 10), "0101011010");
    assert_eq!(prefix_string(&parse_word("shift:2(tri)").unwrap(), 5), "10110");
    assert_eq!(prefix_string(&parse_word("B1(tri)").unwrap(), 6), "122122");
    let v = parse_word("bigV(tri;morphD(tri);budget=20)").unwrap();
    assert_eq!(prefix_string(&v, 7), "1032033");
    assert!(parse_word("nonsense").is_err());
}

fn word_strategy(b: u32) -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0u8..b as u8, 0..24)
}

proptest! {
    #[test]
    fn d_is_order_embedding(b in 2u32..6, u in word_strategy(5), v in word_strategy(5)) {
        let u: Vec<u8> = u.into_iter().map(|l| l % b as u8).collect();
        let v: Vec<u8> = v.into_iter().map(|l| l % b as u8).collect();
        // pad to comparability with a distinct tail letter
        let mut u = u; u.push(0); u.extend(std::iter::repeat(0).take(8));
        let mut v = v; v.push(1); v.extend(std::iter::repeat(0).take(8));
        let (fu, fv) = (FiniteWord::new(u, b).unwrap(), FiniteWord::new(v, b).unwrap());
        let d = morphism_d(b).unwrap();
        let plain = lex_compare_finite(&fu, &fv).result;
        let mapped = lex_compare_finite(&d.apply(&fu).unwrap(), &d.apply(&fv).unwrap()).result;
        if plain != CompareResult::Unresolved && mapped != CompareResult::Unresolved {
            prop_assert_eq!(plain, mapped);
        }
    }

    #[test]
    fn morphism_distributes(i in 0usize..4, u in word_strategy(2), v in word_strategy(2)) {
        let m = spacer_morphism(i);
        let (fu, fv) = (FiniteWord::new(u, 2).unwrap(), FiniteWord::new(v, 2).unwrap());
        prop_assert_eq!(m.apply(&fu.concat(&fv)).unwrap(), m.apply(&fu).unwrap().concat(&m.apply(&fv).unwrap()));
    }

    #[test]
    fn d_images_have_no_double_zero_or_long_runs(b in 2u32..6, u in word_strategy(5)) {
        let u: Vec<u8> = u.into_iter().map(|l| l % b as u8).collect();
        let img = morphism_d(b).unwrap().apply(&FiniteWord::new(u, b).unwrap()).unwrap();
        let l = img.letters();
        prop_assert!(!l.windows(2).any(|p| p == [0, 0]));
        prop_assert!(l.split(|&x| x == 0).all(|run| run.len() <= b as usize));
    }

    #[test]
    fn shift_composes(a in 0u64..500, c in 0u64..500) {
        let t = triangular_word();
        prop_assert_eq!(shift(&shift(&t, a), c).prefix(64), shift(&t, a + c).prefix(64));
    }

    #[test]
    fn unit_values_follow_word_order(a in 0u64..400, c in 0u64..400) {
        prop_assume!(a != c);
        let t = triangular_word();
        let (u, v) = (shift(&t, a), shift(&t, c));
        let o = lex_compare(&u, &v, 200);
        let (x, y) = (word_to_unit(&u, 200).into_real(), word_to_unit(&v, 200).into_real());
        match o.result {
            CompareResult::Less => prop_assert!(x.lt(&y).unwrap()),
            CompareResult::Greater => prop_assert!(y.lt(&x).unwrap()),
            CompareResult::Unresolved => {}
        }
    }
}

#[test]
fn big_ordinal_verification_small() {
    let inputs = [triangular_word(), parse_word("morphD(tri)").unwrap()];
    let rep = verify_big_ordinal(&inputs, 40, 30, 2000).unwrap();
    assert!(rep.passed(), "{rep:?}");
    assert_eq!(rep.embeddings.len(), 2);
    assert_eq!(rep.embeddings[0].pairs_checked, 40 * 39 / 2);
}

