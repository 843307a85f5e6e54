//! Properties shared by the proptest suite and the acceptance target. Each
//! property is a plain function so both can drive it with their own runner.

#![allow(dead_code)]

use std::f64::consts::PI;

use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestError, TestRunner};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use rsfol::fixtures;
use rsfol::fol::{fol_bleu, logically_equivalent, normalize, parse_query, Atom, ConjunctiveQuery, Variable};
use rsfol::geometry::{
    eval_directional, eval_facing, eval_is_close, eval_rcc, rcc8_relation, Direction, Facing, OrientedBox,
    PredicateContext, Rcc8, Tolerances,
};
use rsfol::inference::{naive_score, score_query, score_query_with, Scene, SearchStrategy, DEFAULT_FLOOR};
use rsfol::vocab::Vocabulary;

pub const TOL: f64 = 1e-12;

/// Boxes on a 2 px grid with a few fixed sizes and angles, so that touching,
/// containment and equality come up regularly.
pub fn arb_box() -> impl Strategy<Value = OrientedBox> {
    (
        0i32..40,
        0i32..40,
        prop::sample::select(vec![2.0, 4.0, 6.0, 10.0, 20.0]),
        prop::sample::select(vec![2.0, 4.0, 6.0, 10.0, 20.0]),
        prop_oneof![Just(0.0), Just(PI / 2.0), Just(PI / 4.0), -PI..PI],
    )
        .prop_map(|(x, y, w, h, t)| OrientedBox::new(x as f64 * 2.0, y as f64 * 2.0, w, h, t).unwrap())
}

pub fn arb_seed() -> impl Strategy<Value = u64> {
    any::<u64>()
}

fn instance(seed: u64) -> (Scene, ConjunctiveQuery) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scene = fixtures::random_scene(&mut rng, "p", 6);
    let query = fixtures::random_query(&mut rng, 4, 5);
    (scene, query)
}

fn ctx() -> PredicateContext {
    PredicateContext::default()
}

pub fn rcc_exactly_one(a: OrientedBox, b: OrientedBox) -> Result<(), TestCaseError> {
    let c = ctx();
    let holding: Vec<Rcc8> = Rcc8::ALL.into_iter().filter(|r| eval_rcc(*r, &a, &b, &c) == 1.0).collect();
    prop_assert_eq!(holding.len(), 1, "{:?} {:?} -> {:?}", a, b, holding);
    Ok(())
}

pub fn rcc_converse(a: OrientedBox, b: OrientedBox) -> Result<(), TestCaseError> {
    let t = Tolerances::default();
    prop_assert_eq!(rcc8_relation(&b, &a, &t), rcc8_relation(&a, &b, &t).converse(), "{:?} {:?}", a, b);
    prop_assert_eq!(rcc8_relation(&a, &a, &t), Rcc8::EQ);
    Ok(())
}

pub fn mirror_identities(a: OrientedBox, b: OrientedBox) -> Result<(), TestCaseError> {
    use Direction::*;
    prop_assert_eq!(eval_directional(LeftOf, &a, &b), eval_directional(RightOf, &b, &a));
    prop_assert_eq!(eval_directional(IsAbove, &a, &b), eval_directional(IsBelow, &b, &a));
    prop_assert!(eval_directional(LeftOf, &a, &b) + eval_directional(RightOf, &a, &b) <= 1.0);
    prop_assert!(eval_directional(IsAbove, &a, &b) + eval_directional(IsBelow, &a, &b) <= 1.0);
    prop_assert!((eval_is_close(&a, &b) - eval_is_close(&b, &a)).abs() < TOL);
    for f in [Facing::Same, Facing::Opposite] {
        prop_assert!((eval_facing(f, &a, &b) - eval_facing(f, &b, &a)).abs() < TOL);
    }
    let close = eval_is_close(&a, &b);
    prop_assert!(close > 0.0 && close <= 1.0);
    Ok(())
}

pub fn translation_invariance(a: OrientedBox, b: OrientedBox, dx: i32, dy: i32) -> Result<(), TestCaseError> {
    let (dx, dy) = (dx as f64 * 2.0, dy as f64 * 2.0);
    let (ta, tb) = (a.translated(dx, dy), b.translated(dx, dy));
    let t = Tolerances::default();
    prop_assert_eq!(rcc8_relation(&a, &b, &t), rcc8_relation(&ta, &tb, &t));
    for d in [Direction::LeftOf, Direction::RightOf, Direction::IsAbove, Direction::IsBelow] {
        prop_assert_eq!(eval_directional(d, &a, &b), eval_directional(d, &ta, &tb));
    }
    prop_assert!((eval_is_close(&a, &b) - eval_is_close(&ta, &tb)).abs() < 1e-9);
    Ok(())
}

pub fn parse_round_trip(seed: u64) -> Result<(), TestCaseError> {
    let (_, q) = instance(seed);
    let text = q.render();
    let back = parse_query(&text).map_err(|e| TestCaseError::fail(format!("{text}: {e}")))?;
    prop_assert_eq!(&back, &q);
    prop_assert_eq!(fol_bleu(&text, &back.render()).unwrap(), 1.0);
    Ok(())
}

/// Adds macro atoms over the query's variables before normalizing twice.
pub fn normalize_idempotent(seed: u64) -> Result<(), TestCaseError> {
    let (_, q) = instance(seed);
    let mut atoms = q.atoms().to_vec();
    let vars: Vec<Variable> = q.variables().to_vec();
    let rel = ["aligned", "in_column", "clustered"][(seed % 3) as usize];
    atoms.push(Atom::Macro { relation: rel.into(), vars: vars.clone() });
    atoms.push(Atom::Macro { relation: "isolated_from".into(), vars: vec![vars[0].clone()] });
    let v = Vocabulary::dota();
    let raw = ConjunctiveQuery::new(atoms).unwrap();
    let once = normalize(&raw, &v).unwrap();
    let twice = normalize(&once, &v).unwrap();
    prop_assert_eq!(&once, &twice);
    let expanded = once.atoms().iter().all(|a| !matches!(a, Atom::Macro { .. }));
    prop_assert!(expanded, "macro left after normalization");
    Ok(())
}

/// Probability lies in [0, 1] and equals the witness product.
pub fn score_bounds(seed: u64) -> Result<(), TestCaseError> {
    let (scene, q) = instance(seed);
    let r = score_query(&q, &scene, &ctx(), DEFAULT_FLOOR).unwrap();
    prop_assert!((0.0..=1.0).contains(&r.probability));
    match &r.witness {
        Some(w) => {
            prop_assert!(r.probability > 0.0);
            prop_assert!((w.product() - r.probability).abs() < TOL);
            prop_assert_eq!(w.assignment.len(), q.variables().len());
        }
        None => prop_assert_eq!(r.probability, 0.0),
    }
    Ok(())
}

/// A class with no detection above the floor zeroes the whole query.
pub fn annihilation(seed: u64) -> Result<(), TestCaseError> {
    let (mut scene, q) = instance(seed);
    let victim = q.class_of(&q.variables()[0]).unwrap().to_string();
    scene.detections.retain(|d| d.label != victim);
    for (i, d) in scene.detections.iter_mut().enumerate() {
        d.index = i;
    }
    let r = score_query(&q, &scene, &ctx(), DEFAULT_FLOOR).unwrap();
    prop_assert_eq!(r.probability, 0.0);
    prop_assert!(r.witness.is_none());
    Ok(())
}

/// Extra detections never lower the score of a query without isolation atoms.
pub fn monotone_in_detections(seed: u64, extra: OrientedBox, conf: u8) -> Result<(), TestCaseError> {
    let (mut scene, q) = instance(seed);
    let isolated = q.atoms().iter().any(|a| matches!(a, Atom::Isolated { .. }));
    if isolated {
        return Ok(());
    }
    let before = score_query(&q, &scene, &ctx(), DEFAULT_FLOOR).unwrap().probability;
    let label = q.class_of(&q.variables()[0]).unwrap().to_string();
    scene.push(&label, conf as f64 / 20.0, extra);
    let after = score_query(&q, &scene, &ctx(), DEFAULT_FLOOR).unwrap().probability;
    prop_assert!(after >= before, "{} < {}", after, before);
    Ok(())
}

/// Shuffling atoms leaves the score, the witness and logical meaning unchanged.
pub fn atom_order_invariance(seed: u64) -> Result<(), TestCaseError> {
    let (scene, q) = instance(seed);
    let mut atoms = q.atoms().to_vec();
    atoms.shuffle(&mut ChaCha8Rng::seed_from_u64(seed ^ 0x5eed));
    let shuffled = ConjunctiveQuery::new(atoms).unwrap();
    prop_assert!(logically_equivalent(&q, &shuffled).unwrap());
    let a = score_query(&q, &scene, &ctx(), DEFAULT_FLOOR).unwrap();
    let b = score_query(&shuffled, &scene, &ctx(), DEFAULT_FLOOR).unwrap();
    prop_assert!((a.probability - b.probability).abs() < TOL);
    prop_assert_eq!(a.witness.map(|w| w.assignment), b.witness.map(|w| w.assignment));
    Ok(())
}

/// Factorized search, exhaustive search and the brute-force oracle agree.
pub fn oracle_agreement(scene: &Scene, q: &ConjunctiveQuery) -> Result<(), TestCaseError> {
    let fast = score_query(q, scene, &ctx(), DEFAULT_FLOOR).unwrap();
    let full = score_query_with(q, scene, &ctx(), DEFAULT_FLOOR, SearchStrategy::Exhaustive).unwrap();
    let oracle = naive_score(q, scene, &ctx(), DEFAULT_FLOOR, u128::MAX).unwrap();
    prop_assert!((fast.probability - oracle).abs() < TOL, "{}: {} vs {}", q.render(), fast.probability, oracle);
    prop_assert!((full.probability - oracle).abs() < TOL);
    prop_assert_eq!(fast.witness, full.witness);
    Ok(())
}

pub fn oracle_seeded(seed: u64) -> Result<(), TestCaseError> {
    let (scene, q) = instance(seed);
    oracle_agreement(&scene, &q)
}

/// Runs `test` for `cases` generated inputs and returns the number of
/// violations (0 or 1, since the runner stops at the first failure) along
/// with the failure message.
pub fn run_property<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String>
where
    S::Value: std::fmt::Debug,
{
    let mut runner = TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() });
    match runner.run(&strategy, test) {
        Ok(()) => Ok(()),
        Err(TestError::Fail(reason, value)) => Err(format!("{reason} for {value:?}")),
        Err(TestError::Abort(reason)) => Err(format!("aborted: {reason}")),
    }
}

/// Every property, with its case count. Names are stable for reporting.
pub fn all_properties() -> Vec<(&'static str, Result<(), String>)> {
    vec![
        ("rcc8 exactly one relation", run_property(10_000, (arb_box(), arb_box()), |(a, b)| rcc_exactly_one(a, b))),
        ("rcc8 converse", run_property(10_000, (arb_box(), arb_box()), |(a, b)| rcc_converse(a, b))),
        ("mirror identities", run_property(10_000, (arb_box(), arb_box()), |(a, b)| mirror_identities(a, b))),
        (
            "translation invariance",
            run_property(2_000, (arb_box(), arb_box(), -50i32..50, -50i32..50), |(a, b, dx, dy)| {
                translation_invariance(a, b, dx, dy)
            }),
        ),
        ("parse round trip", run_property(500, arb_seed(), parse_round_trip)),
        ("normalize idempotent", run_property(500, arb_seed(), normalize_idempotent)),
        ("score bounds", run_property(500, arb_seed(), score_bounds)),
        ("annihilation", run_property(500, arb_seed(), annihilation)),
        (
            "monotone in detections",
            run_property(500, (arb_seed(), arb_box(), 1u8..=20), |(s, b, c)| monotone_in_detections(s, b, c)),
        ),
        ("atom order invariance", run_property(500, arb_seed(), atom_order_invariance)),
        ("oracle agreement", run_property(500, arb_seed(), oracle_seeded)),
    ]
}
