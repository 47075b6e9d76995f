use ca_verify::criteria::{analyze, permutive_bruteforce, AnalysisReport};
use ca_verify::decide::{count_preimages, decide_injective, decide_surjective};
use ca_verify::poly::{interpolate_prime, FunctionTable, UniPoly};
use ca_verify::rule::{CyclicWord, RuleTable};
use ca_verify::{Caps, Modulus, Residue};
use proptest::prelude::*;

fn rule_strategy() -> impl Strategy<Value = RuleTable> {
    (2u32..=4, 0usize..=2).prop_flat_map(|(m, d)| {
        let size = (m as usize).pow(d as u32 + 1);
        proptest::collection::vec(0..m, size).prop_map(move |t| RuleTable::new(Modulus::new(m).unwrap(), d, t).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn injective_implies_surjective(r in rule_strategy()) {
        let caps = Caps::default();
        let inj = decide_injective(&r, &caps).unwrap();
        let sur = decide_surjective(&r, &caps).unwrap();
        prop_assert!(!inj.verdict || sur.verdict);
    }

    #[test]
    fn negative_verdicts_carry_valid_witnesses(r in rule_strategy()) {
        let caps = Caps::default();
        for dec in [decide_injective(&r, &caps).unwrap(), decide_surjective(&r, &caps).unwrap()] {
            prop_assert_eq!(dec.verdict, dec.witness.is_none());
            if let Some(w) = dec.witness {
                prop_assert!(w.validate(&r), "{:?}", w);
            }
        }
    }

    #[test]
    fn surjective_rules_are_balanced(r in rule_strategy(), word in proptest::collection::vec(0u32..2, 1..5)) {
        if decide_surjective(&r, &Caps::default()).unwrap().verdict {
            prop_assert_eq!(count_preimages(&r, &word).unwrap(), r.context_count() as u128);
        }
    }

    #[test]
    fn permutive_at_an_end_implies_surjective(r in rule_strategy()) {
        let d = r.diameter();
        if permutive_bruteforce(&r, 1) || permutive_bruteforce(&r, d + 1) {
            prop_assert!(decide_surjective(&r, &Caps::default()).unwrap().verdict);
        }
    }

    #[test]
    fn periodic_image_matches_unrolled_image(r in rule_strategy(), x in proptest::collection::vec(0u32..2, 1..6)) {
        let m = r.modulus();
        let w = CyclicWord::new(m, x.clone()).unwrap();
        let img = r.apply_periodic(&w);
        prop_assert_eq!(img.period(), x.len());
        let n = x.len();
        let long = w.unroll(3 * n + r.diameter());
        let direct = r.f_star(&long);
        // the image of the periodic point is periodic with the same period
        for i in 0..direct.len() - n {
            prop_assert_eq!(direct[i], direct[i + n]);
        }
        prop_assert!(CyclicWord::new(m, direct[..n].to_vec()).unwrap().rotation_equivalent(&img));
    }

    #[test]
    fn analysis_round_trips(r in rule_strategy()) {
        let rep = analyze(&r, None, &Caps::default(), false).unwrap();
        let text = serde_json::to_string(&rep).unwrap();
        let back: AnalysisReport = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back, &rep);
        prop_assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }

    #[test]
    fn interpolation_round_trips(p in prop::sample::select(vec![2u32, 3, 5, 7, 11]), seed in any::<u64>()) {
        let m = Modulus::new(p).unwrap();
        let values: Vec<Residue> = (0..p).map(|i| ((seed >> (i % 60)) as u32 ^ i.wrapping_mul(2654435761)) % p).collect();
        let t = FunctionTable::new(m, values).unwrap();
        let poly = interpolate_prime(&t).unwrap();
        prop_assert!(poly.degree().is_none_or(|d| d < p as usize));
        prop_assert_eq!(poly.table(), t);
    }

    #[test]
    fn polynomial_tables_are_representable(coeffs in proptest::collection::vec(0u64..8, 1..6)) {
        let m = Modulus::new(8).unwrap();
        let p = UniPoly::new(m, coeffs);
        let found = ca_verify::poly::representability_search(&p.table(), &Caps::default()).unwrap();
        prop_assert_eq!(found.map(|q| q.table()), Some(p.table()));
    }
}
