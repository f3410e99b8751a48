use mcg_core::braid::{solve_braid, ArtinGenerator, BraidWord};
use mcg_core::mcg_punctured::{solve, GeneratorWord, PuncturedGenerator, Verdict};
use mcg_core::closed::solve_closed;
use mcg_core::oracle::{artin_identity_check, closed_identity_check, punctured_identity_check};
use proptest::prelude::*;

fn artin_word(n: usize, max: usize) -> impl Strategy<Value = Vec<ArtinGenerator>> {
    prop::collection::vec((1..n, any::<bool>()).prop_map(|(i, inv)| ArtinGenerator::new(i, inv)), 0..max)
}

fn punctured_word(g: usize, max: usize) -> impl Strategy<Value = Vec<PuncturedGenerator>> {
    let all = PuncturedGenerator::all(g);
    prop::collection::vec(prop::sample::select(all), 0..max)
}

/// `u · v · u⁻¹ · v⁻¹`-style words are mostly non-trivial; `u · u⁻¹` folded
/// with a relation in the middle is trivial. Mix both.
fn with_identity<T: Clone>(u: Vec<T>, inv: impl Fn(&T) -> T) -> Vec<T> {
    let back: Vec<T> = u.iter().rev().map(inv).collect();
    [u, back].concat()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn braid_matches_artin(n in 3usize..7, seed in 0usize..4, w in artin_word(7, 24)) {
        let w: Vec<ArtinGenerator> = w.into_iter().filter(|s| s.index < n).collect();
        let w = if seed == 0 { with_identity(w, |s| s.inv()) } else { w };
        let bw = BraidWord::new(n, w.clone()).unwrap();
        let rep = solve_braid(&bw, false).unwrap();
        prop_assert_eq!(rep.verdict == Verdict::Identity, artin_identity_check(n, &w), "{}", bw);
        prop_assert_eq!(rep.growth_violations, 0);
    }

    #[test]
    fn punctured_matches_free_group(g in 2usize..5, seed in 0usize..4, w in punctured_word(4, 16)) {
        let w: Vec<PuncturedGenerator> = w.into_iter().filter(|h| h.check(g).is_ok()).collect();
        let w = if seed == 0 { with_identity(w, |h| h.inv()) } else { w };
        let gw = GeneratorWord::new(g, w.clone()).unwrap();
        let rep = solve(&gw, false).unwrap();
        prop_assert_eq!(rep.verdict == Verdict::Identity, punctured_identity_check(g, &w), "{}", gw);
        prop_assert_eq!(rep.growth_violations, 0);
    }

    #[test]
    fn closed_matches_surface_group(seed in 0usize..3, w in punctured_word(3, 13)) {
        let w = if seed == 0 { with_identity(w, |h| h.inv()) } else { w };
        let gw = GeneratorWord::new(3, w.clone()).unwrap();
        let rep = solve_closed(&gw, false).unwrap();
        prop_assert_eq!(rep.verdict == Verdict::Identity, closed_identity_check(3, &w).unwrap(), "{}", gw);
        prop_assert_eq!(rep.growth_violations, 0);
    }
}

#[test]
fn even_chain_relation() {
    // b1 a1 x1 x2 b3 a3 is a chain of six curves; the 14th power of their
    // product is the twist about the puncture, trivial on both surfaces.
    let chain = "b1 a1 x1 x2 b3 a3 ";
    let w = GeneratorWord::parse(3, &chain.repeat(14)).unwrap();
    assert_eq!(solve_closed(&w, false).unwrap().verdict, Verdict::Identity);
    assert!(closed_identity_check(3, &w.gens).unwrap());
    assert_eq!(solve(&w, false).unwrap().verdict, Verdict::Identity);
    assert!(punctured_identity_check(3, &w.gens));
    let short = GeneratorWord::parse(3, &chain.repeat(7)).unwrap();
    assert_eq!(solve_closed(&short, false).unwrap().verdict, Verdict::NonIdentity);
    assert!(!closed_identity_check(3, &short.gens).unwrap());
}
