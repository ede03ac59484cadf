use proptest::prelude::*;

use pairinv::bracket::{
    contract_to_traceless, expand_traceless, kontsevich_bracket, kontsevich_bracket_sums, poisson_bracket,
    traceless_bracket, NecklaceSum,
};
use pairinv::necklace::{canonicalize, Letter, Word};
use pairinv::numeric::{sample, SamplerConfig, SamplerKind};
use pairinv::ring::{generator_set, GenPoly};
use pairinv::Q;

fn word(max: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(any::<bool>(), 1..=max).prop_map(|bits| {
        Word::from_letters(bits.into_iter().map(|b| if b { Letter::First } else { Letter::Second }))
    })
}

fn genpoly(max_var: usize) -> impl Strategy<Value = GenPoly> {
    prop::collection::vec((1..=max_var, 0..3u32, -5i64..=5), 1..5).prop_map(|terms| {
        let mut p = GenPoly::zero();
        for (i, e, c) in terms {
            p = p.add(&GenPoly::var(i).pow(e).scale(&Q::from_integer(c.into())));
        }
        p
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_form_ignores_rotation(w in word(12), k in 0usize..12) {
        prop_assert_eq!(canonicalize(w), canonicalize(w.rotate(k % w.len())));
    }

    #[test]
    fn bracket_is_antisymmetric(a in word(6), b in word(6)) {
        let ab = kontsevich_bracket(a, b);
        let ba = kontsevich_bracket(b, a);
        prop_assert!(ab.add(&ba).is_zero());
    }

    #[test]
    fn bracket_satisfies_jacobi(a in word(4), b in word(4), c in word(4)) {
        let s = |w: Word| NecklaceSum::single(canonicalize(w));
        let jac = |x: Word, y: Word, z: Word| kontsevich_bracket_sums(&s(x), &kontsevich_bracket_sums(&s(y), &s(z)));
        let total = jac(a, b, c).add(&jac(b, c, a)).add(&jac(c, a, b));
        prop_assert!(total.is_zero());
    }

    #[test]
    fn traceless_bracket_matches_contraction(a in word(5), b in word(5), n in 2usize..=4) {
        let generic = poisson_bracket(&expand_traceless(a, n), &expand_traceless(b, n)).unwrap();
        prop_assert_eq!(contract_to_traceless(&generic), traceless_bracket(a, b, n));
    }

    #[test]
    fn substitution_is_a_homomorphism(p in genpoly(9), q in genpoly(9), trial in 0u64..50) {
        let gens = generator_set(3).unwrap();
        let pt = sample(SamplerKind::Generic, 3, &SamplerConfig::with_seed(trial), trial).unwrap().point();
        let vals = pt.generator_values(&gens);
        let eval = |f: &GenPoly| pairinv::numeric::eval_genpoly(f, &vals);
        prop_assert_eq!(eval(&p.mul(&q)), eval(&p) * eval(&q));
    }
}
