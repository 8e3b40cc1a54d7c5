mod common;

use common::*;
use mdstack::io::{build, build_fan, fan_to_text, parse_document, stack_to_text};
use mdstack::stack::{graded_fingerprint, overall, rigidify, validate, StackData, Verdict};
use mdstack::toric::{canonical_from_fan, fan_to_stack, validate_fan};

#[test]
fn every_file_parses_and_round_trips() {
    for p in corpus_files() {
        let text = std::fs::read_to_string(&p).unwrap();
        let doc = parse_document(&text).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
        if doc.stack.is_some() {
            let x = build(&doc).unwrap();
            let again = build(&parse_document(&stack_to_text(&x)).unwrap()).unwrap();
            assert_eq!(again, x, "{}", p.display());
            assert_eq!(stack_to_text(&again), stack_to_text(&x));
        }
        if doc.fan.is_some() {
            let fan = build_fan(&doc).unwrap();
            let again = build_fan(&parse_document(&fan_to_text(&fan)).unwrap()).unwrap();
            assert_eq!(again, fan, "{}", p.display());
            assert_eq!(
                overall(&validate_fan(&fan)),
                Verdict::Pass,
                "{}",
                p.display()
            );
        }
    }
}

#[test]
fn expected_verdicts() {
    for (name, x) in corpus_stacks() {
        let expected = match name.as_str() {
            "dicyclic-n2" => Verdict::Fail,
            "a2mu2-canonical" => Verdict::Unknown,
            _ => Verdict::Pass,
        };
        assert_eq!(overall(&validate(&x)), expected, "{name}");
    }
}

#[test]
fn fans_match_stack_files() {
    for (fan, stack) in [
        ("p2-fan", "p2"),
        ("p1xp1-fan", "p1xp1"),
        ("p121-fan", "p121"),
        ("a2mu2-fan", "a2mu2-canonical"),
    ] {
        let from_fan = fan_to_stack(&corpus_fan(fan)).unwrap();
        assert!(same(&from_fan, &corpus_stack(stack)), "{fan} vs {stack}");
        assert!(same(
            &canonical_from_fan(&corpus_fan(fan)).unwrap(),
            &from_fan
        ));
    }
}

#[test]
fn named_examples() {
    assert!(same(
        &corpus_stack("p2"),
        &StackData::weighted_projective(&[1, 1, 1])
    ));
    assert!(same(
        &corpus_stack("p121"),
        &StackData::weighted_projective(&[1, 2, 1])
    ));
    assert!(same(&corpus_stack("point"), &StackData::point()));
    let g = rigidify(&corpus_stack("gerby-p1")).unwrap();
    assert!(same(&g.rigidified, &corpus_stack("p1")));
    assert_eq!(g.roots.len(), 1);
    assert_ne!(
        graded_fingerprint(&corpus_stack("p1-root2")),
        graded_fingerprint(&corpus_stack("p1-root3"))
    );
}
