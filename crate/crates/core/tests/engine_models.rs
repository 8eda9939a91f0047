use std::collections::BTreeMap;

use coxeter_proper::enumerate::{count_proper, cross_check_model};
use coxeter_proper::perm::{all_elements, Family, ModelElement};
use coxeter_proper::proper::{is_proper_element, is_proper_model};
use coxeter_proper::{Engine, MaxW0Table, TypeLabel};

#[test]
fn length_descent_multisets_agree() {
    for (label, order) in [(TypeLabel::A(4), 120), (TypeLabel::B(3), 48), (TypeLabel::B(4), 384), (TypeLabel::D(4), 192)] {
        let c = cross_check_model(label, 1).unwrap();
        assert_eq!(c.elements(), order, "{label}");
        assert!(c.passed(), "{label}: {:?} vs {:?}", c.engine, c.model);
    }
}

/// Applies an engine word to the model identity, generator by generator.
fn model_from_word(family: Family, n: usize, word: &[usize]) -> ModelElement {
    let mut w = ModelElement::identity(family, n);
    for &i in word.iter().rev() {
        w.left_multiply(family, i).unwrap();
    }
    w
}

#[test]
fn generator_bridge_matches_elementwise() {
    for (label, family, n) in [(TypeLabel::A(3), Family::A, 4), (TypeLabel::B(3), Family::B, 3), (TypeLabel::D(4), Family::D, 4)] {
        let engine = Engine::standard(label).unwrap();
        let table = MaxW0Table::closed(label).unwrap();
        let mut images = BTreeMap::new();
        let mut stack = vec![engine.identity()];
        let mut seen = std::collections::HashSet::from([engine.key(&stack[0])]);
        while let Some(g) = stack.pop() {
            let word = engine.canonical_word(&g);
            let w = model_from_word(family, n, &word);
            let (len, des) = w.length_and_descents(family).unwrap();
            assert_eq!(len as usize, g.length(), "{label} {word:?}");
            assert_eq!(des as usize, engine.left_descents(&g).unwrap().len(), "{label} {word:?}");
            assert_eq!(is_proper_model(family, &w).unwrap(), is_proper_element(&engine, &table, &g).unwrap());
            assert!(images.insert(format!("{w:?}"), word).is_none(), "two elements map to one model element");
            for i in 0..engine.rank() {
                let h = engine.left_multiply(i, &g);
                if seen.insert(engine.key(&h)) {
                    stack.push(h);
                }
            }
        }
        assert_eq!(images.len(), all_elements(family, n).len());
    }
}

#[test]
fn proper_counts_agree_with_models() {
    for (label, family, n) in [(TypeLabel::A(5), Family::A, 6), (TypeLabel::B(4), Family::B, 4), (TypeLabel::D(5), Family::D, 5)] {
        let live = count_proper(label, 1).unwrap().total_proper();
        let model = all_elements(family, n).iter().filter(|w| is_proper_model(family, w).unwrap()).count() as u64;
        assert_eq!(live, model, "{label}");
    }
}
