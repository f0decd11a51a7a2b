use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::TestRunner;
use serrekit::functor_words::{evaluate, normalize, parse_word_in, Cat, FunctorWord, Generator, Letter, Model};

/// Random well-typed word ending (on the right) in `source`.
fn random_word(source: Cat, picks: &[(usize, i64)]) -> FunctorWord {
    let mut current = source;
    let mut letters = Vec::new();
    for &(k, e) in picks {
        let options: Vec<Generator> =
            Generator::ALL.iter().copied().filter(|g| g.target_from(current).is_some()).collect();
        let g = options[k % options.len()];
        let endo = g.target_from(current) == Some(current);
        let exponent = match (endo, g.invertible_on(current)) {
            (false, _) => 1,
            (true, true) => e,
            (true, false) => e.abs(),
        };
        let letter = Letter::new(g, exponent, current).unwrap();
        current = letter.target;
        letters.push(letter);
    }
    letters.reverse();
    FunctorWord { letters, shift: 0, source, target: current }
}

fn cat_strategy() -> impl Strategy<Value = Cat> {
    prop_oneof![Just(Cat::C), Just(Cat::D), Just(Cat::RC), Just(Cat::RD)]
}

fn picks() -> impl Strategy<Value = Vec<(usize, i64)>> {
    prop::collection::vec((0usize..32, prop_oneof![-2i64..=-1, 1i64..=2]), 0..6)
}

proptest! {
    #[test]
    fn print_then_parse_is_identity(cat in cat_strategy(), p in picks(), shift in -3i64..3) {
        let mut w = random_word(cat, &p);
        w.shift = shift;
        let back = parse_word_in(&w.to_string(), Some(cat)).unwrap();
        prop_assert_eq!(back, w);
    }

    #[test]
    fn normalize_is_idempotent(cat in cat_strategy(), p in picks(), m in 1i64..5, d in 1i64..5) {
        let w = random_word(cat, &p);
        for params in [None, Some((m.max(d), d))] {
            let once = normalize(&w, params).unwrap();
            prop_assert_eq!(normalize(&once, params).unwrap(), once);
        }
    }
}

#[test]
fn evaluation_is_a_homomorphism() {
    let models = [Model::from_spec("ci:P5:2,3").unwrap(), Model::from_spec("ci:P3:4").unwrap()];
    let mut runner = TestRunner::deterministic();
    let strategy = (cat_strategy(), picks(), picks());
    let mut checked = 0;
    while checked < 100 {
        let (cat, p1, p2) = strategy.new_tree(&mut runner).unwrap().current();
        let inner = random_word(cat, &p2);
        let outer = random_word(inner.target, &p1);
        let whole = outer.compose(&inner).unwrap();
        let model = &models[checked % models.len()];
        let (Ok(a), Ok(b), Ok(ab)) = (evaluate(&outer, model), evaluate(&inner, model), evaluate(&whole, model)) else {
            continue;
        };
        assert!(a.compose(&b).compare(&ab).is_equal(), "{whole} in {}", model.name);
        checked += 1;
    }
}

#[test]
fn normal_forms_evaluate_like_the_input() {
    let model = Model::from_spec("ci:P5:2,3").unwrap();
    let params = Some((model.presentation.m(), model.presentation.d()));
    let mut runner = TestRunner::deterministic();
    for _ in 0..60 {
        let (cat, p) = (cat_strategy(), picks()).new_tree(&mut runner).unwrap().current();
        let w = random_word(cat, &p);
        let Ok(before) = evaluate(&w, &model) else { continue };
        for params in [None, params] {
            let n = normalize(&w, params).unwrap();
            assert!(evaluate(&n, &model).unwrap().compare(&before).is_equal(), "{w} -> {n}");
        }
    }
}
