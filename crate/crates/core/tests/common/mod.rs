//! Generators shared by the integration test targets.
#![allow(dead_code)]

use corotype::{Coroutine, Length, Program, Type};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

/// A runner with a fixed seed, so every run explores the same cases.
pub fn seeded_runner(cases: u32) -> TestRunner {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn concrete() -> impl Strategy<Value = Type> {
    prop::sample::select(vec!["A", "B", "Int", "String"]).prop_map(Type::concrete)
}

fn var_name() -> impl Strategy<Value = String> {
    prop::sample::select(vec!["x", "y", "z", "w"]).prop_map(str::to_string)
}

/// Lengths without `Fresh` and without `dec` of a literal, which could
/// reach `dec(0)`.
pub fn length() -> impl Strategy<Value = Length> {
    let leaf = prop_oneof![
        (0u64..5).prop_map(Length::Lit),
        prop::sample::select(vec!["i", "j", "n"]).prop_map(Length::var),
        Just(Length::Star),
    ];
    prop_oneof![
        3 => leaf,
        1 => prop::sample::select(vec!["i", "j"]).prop_map(|v| Length::dec(Length::var(v))),
        1 => ((1u64..5).prop_map(Length::Lit), prop::sample::select(vec!["i", "n"]))
            .prop_map(|(a, b)| Length::min(a, Length::var(b))),
    ]
}

fn atom() -> impl Strategy<Value = Type> {
    prop_oneof![
        4 => concrete(),
        3 => var_name().prop_map(Type::Var),
        1 => prop::sample::select(vec!["p", "q"]).prop_map(Type::reference),
    ]
}

/// Arbitrary well-formed type expressions, not yet normalized. List
/// elements are atoms or tuples, which is what the concrete syntax allows.
pub fn any_type() -> impl Strategy<Value = Type> {
    let leaf = prop_oneof![6 => atom(), 1 => Just(Type::Void)];
    leaf.prop_recursive(4, 40, 4, |inner| {
        let tuple = prop::collection::vec(inner.clone(), 2..4).prop_map(Type::Tuple);
        let list_elem = prop_oneof![atom(), tuple.clone()];
        prop_oneof![
            2 => prop::collection::vec(inner.clone(), 0..4).prop_map(Type::Seq),
            2 => tuple,
            2 => (list_elem, length()).prop_map(|(e, l)| Type::list(e, l)),
            2 => (
                inner.clone(),
                inner,
                prop::option::of(prop::sample::select(vec!["c", "d", "rec"])),
                any::<bool>(),
            )
                .prop_map(|(recv, yld, label, starred)| {
                    let starred = starred && label.is_some();
                    Coroutine {
                        recv,
                        yld,
                        label: label.map(str::to_string),
                        starred,
                    }
                    .into_type()
                }),
        ]
    })
}

pub fn normalized_type() -> impl Strategy<Value = Type> {
    any_type().prop_map(|t| t.normalize())
}

/// Offered types for matching: a single atomic unit, as a yield would be.
pub fn offered_type() -> impl Strategy<Value = Type> {
    normalized_type().prop_filter_map("void has no head", |t| t.head().cloned())
}

/// Generalizes `offered` into a pattern by replacing some subterms with
/// fresh pattern variables and some literal lengths with length variables.
/// Pattern variables are prefixed `v` so they never clash with names used
/// in offered types.
pub fn generalize(offered: &Type, choices: &mut impl Iterator<Item = u8>) -> Type {
    let mut counter = 0;
    generalize_inner(offered, choices, &mut counter)
}

fn generalize_inner(t: &Type, choices: &mut impl Iterator<Item = u8>, counter: &mut u32) -> Type {
    let choice = choices.next().unwrap_or(255);
    if choice < 60 {
        *counter += 1;
        return Type::var(format!("v{counter}"));
    }
    match t {
        Type::Seq(items) => Type::Seq(
            items
                .iter()
                .map(|i| generalize_inner(i, choices, counter))
                .collect(),
        ),
        Type::Tuple(items) => Type::Tuple(
            items
                .iter()
                .map(|i| generalize_inner(i, choices, counter))
                .collect(),
        ),
        Type::List(elem, len) => {
            let elem = generalize_inner(elem, choices, counter);
            let len = if choices.next().unwrap_or(255) < 128 {
                *counter += 1;
                Length::var(format!("m{counter}"))
            } else {
                len.clone()
            };
            Type::list(elem, len)
        }
        Type::Coroutine(c) => Coroutine {
            recv: generalize_inner(&c.recv, choices, counter),
            yld: generalize_inner(&c.yld, choices, counter),
            label: None,
            starred: false,
        }
        .into_type(),
        other => other.clone(),
    }
}

/// Replaces every `Fresh` length with `*`, undoing what matching an
/// unbounded list does.
pub fn fresh_to_star(t: &Type) -> Type {
    t.map_lengths(&mut |l| replace_fresh(l))
}

fn replace_fresh(l: &Length) -> Length {
    match l {
        Length::Fresh(_) => Length::Star,
        Length::Dec(inner) => Length::dec(replace_fresh(inner)),
        Length::Min(a, b) => Length::min(replace_fresh(a), replace_fresh(b)),
        other => other.clone(),
    }
}

// Ground, star-free programs.

fn ground_value() -> impl Strategy<Value = Type> {
    prop_oneof![
        4 => prop::sample::select(vec!["A", "B"]).prop_map(Type::concrete),
        1 => Just(Type::Tuple(vec![Type::concrete("A"), Type::concrete("B")])),
        1 => (prop::sample::select(vec!["A", "B"]), 1u64..3)
            .prop_map(|(e, n)| Type::list(Type::concrete(e), Length::Lit(n))),
    ]
}

/// Small coroutines drawn from a narrow pool, so that yielded and consumed
/// coroutines often coincide with demanded ones.
fn small_coroutine() -> impl Strategy<Value = Type> {
    let side = prop_oneof![
        1 => Just(Type::Void),
        2 => prop::sample::select(vec!["A", "B"]).prop_map(Type::concrete),
    ];
    (side.clone(), side).prop_map(|(r, y)| Type::coroutine(r, y))
}

fn ground_item() -> impl Strategy<Value = Type> {
    prop_oneof![4 => ground_value(), 1 => small_coroutine()]
}

fn ground_coroutine() -> impl Strategy<Value = Type> {
    let recv = prop_oneof![
        3 => Just(Type::Void),
        3 => prop::collection::vec(ground_value(), 1..3).prop_map(Type::Seq),
        1 => small_coroutine().prop_map(|c| Type::Seq(vec![c])),
    ];
    let yld = prop::collection::vec(ground_item(), 0..4).prop_map(Type::Seq);
    prop_oneof![
        4 => (recv, yld).prop_map(|(r, y)| Type::coroutine(r, y)),
        1 => small_coroutine(),
    ]
}

/// Programs of one to six ground, unstarred coroutines without references.
pub fn ground_program() -> impl Strategy<Value = Program> {
    prop::collection::vec(ground_coroutine(), 1..7).prop_map(|types| {
        Program::from_coroutines(types.into_iter().map(|t| match t.normalize() {
            Type::Coroutine(c) => *c,
            _ => unreachable!("generated coroutines stay coroutines"),
        }))
    })
}
