//! Semantic preservation of each transform on random inputs, decided by the
//! tree evaluator (which enumerates second-order quantifiers directly and
//! never applies a transform).

use kromlab::eval::{Evaluator, Limits, Route};
use kromlab::harness::{enumerate_structures, random_formula, random_prenex_fo, Profile};
use kromlab::transforms::{drop_innermost_universal, expand_exists_r, skolemize_fo, strip_universal_blocks};
use kromlab::{classify, FragmentTag, Quantifier, SoFormula, Vocabulary};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn vocab(i: u64) -> Vocabulary {
    let consts: Vec<String> = if i % 3 == 0 { vec!["c".into()] } else { vec![] };
    match i % 2 {
        0 => Vocabulary::new(consts, [("P".to_string(), 1)]).unwrap(),
        _ => Vocabulary::new(consts, [("E".to_string(), 2)]).unwrap(),
    }
}

/// `lhs` by the tree route equals `rhs` by the default route on every
/// structure with at most `max_n` elements.
fn preserved(lhs: &SoFormula, rhs: &SoFormula, max_n: usize) {
    let v = lhs.signature().unwrap().union(&rhs.signature().unwrap()).unwrap();
    let mut ev = Evaluator::new(Limits::default());
    for n in 1..=max_n {
        for s in enumerate_structures(&v, n, 1 << 12).unwrap() {
            let want = ev.check_route(lhs, &s, Route::Tree).unwrap();
            assert_eq!(ev.check(rhs, &s).unwrap(), want, "{lhs}\n  vs {rhs}\non {s}");
        }
    }
}

#[test]
fn strip_universal_blocks_preserves_truth() {
    for i in 0..500u64 {
        let tag = match i % 4 {
            0 => FragmentTag::PiKrom(1),
            1 => FragmentTag::SigmaKrom(2),
            2 => FragmentTag::SigmaKromR(2),
            _ => FragmentTag::PiKromR(3),
        };
        let p = Profile::new(tag, vocab(i), 1 + i as usize % 4, 10_000 + i).with_max_arity(1 + (i as usize / 4) % 2);
        let f = random_formula(&p).unwrap();
        let out = strip_universal_blocks(f.as_clausal().unwrap()).unwrap();
        assert!(out.so_prefix.last().map_or(true, |q| q.quantifier == Quantifier::Exists));
        let out = SoFormula::Clausal(out);
        assert!(classify(&out).unwrap().is_krom_family(), "{out}");
        preserved(&f, &out, 2);
    }
}

#[test]
fn drop_innermost_universal_under_an_existential_block() {
    for i in 0..500u64 {
        let tag = if i % 2 == 0 { FragmentTag::SigmaKrom(2) } else { FragmentTag::SigmaKromR(2) };
        let p = Profile::new(tag, vocab(i), 1 + i as usize % 4, 20_000 + i).with_max_arity(1 + (i as usize / 2) % 2);
        let f = random_formula(&p).unwrap();
        let out = drop_innermost_universal(f.as_clausal().unwrap()).unwrap();
        let out = SoFormula::Clausal(out);
        let tag = classify(&out).unwrap();
        assert!(
            matches!(tag, FragmentTag::SigmaKrom(1) | FragmentTag::SigmaKromR(1)),
            "{out} is {tag}"
        );
        preserved(&f, &out, 2);
    }
}

#[test]
fn guard_expansion_with_two_guards() {
    for i in 0..200u64 {
        let p = Profile::new(FragmentTag::SigmaKromR(1), vocab(i), 1 + i as usize % 4, 30_000 + i)
            .with_so_vars(2)
            .with_guards(2)
            .with_max_arity(1 + (i as usize / 2) % 2);
        let f = random_formula(&p).unwrap();
        let out = SoFormula::Disjunction(expand_exists_r(f.as_clausal().unwrap()).unwrap());
        preserved(&f, &out, 2);
    }
}

#[test]
fn skolemization_with_constants() {
    let mut rng = ChaCha8Rng::seed_from_u64(40_000);
    for i in 0..200u64 {
        let p = random_prenex_fo(&mut rng, &vocab(3 * i), 3, 3, 3);
        let src = SoFormula::General(p.to_expr());
        let out = SoFormula::General(skolemize_fo(&p).unwrap().to_expr());
        preserved(&src, &out, 2);
        let uni = skolemize_fo(&p).unwrap().universal_form();
        assert_eq!(uni.arity, p.variables().len());
    }
}
