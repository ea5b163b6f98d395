use proptest::prelude::*;
use serde_json::json;

use super::*;

fn schema() -> DomainSchema<f64> {
    DomainSchema::from_json(
        &json!({
            "parameters": [
                {"name": "temperature", "kind": "numeric", "range": [35, 42], "proximity_radius": 0.3},
                {"name": "headache", "kind": "ordinal",
                 "levels": ["none", "small", "moderate", "strong"], "proximity_radius": 1},
                {"name": "cough", "kind": "categorical", "labels": ["no", "yes"],
                 "proximity_radius": {"no": ["yes"]}},
                {"name": "pregnant", "kind": "categorical", "labels": ["false", "true"]},
                {"name": "gender", "kind": "categorical", "labels": ["female", "male"]}
            ],
            "solutions": ["a", "b"]
        })
        .to_string(),
    )
    .unwrap()
}

fn iv(lo: f64, hi: f64) -> Value<f64> {
    Value::interval(lo, hi).unwrap()
}

#[test]
fn components_equal_examples() {
    let s = schema();
    assert!(components_equal(("temperature", &iv(37.5, 37.9)), ("temperature", &iv(37.7, 38.2)), &s).unwrap());
    assert!(!components_equal(("temperature", &iv(36.0, 36.5)), ("temperature", &iv(38.0, 38.5)), &s).unwrap());
    let small = Value::level(1);
    let small_to_moderate = Value::Ordinal(LevelRange::new(1, 2).unwrap());
    assert!(components_equal(("headache", &small), ("headache", &small_to_moderate), &s).unwrap());
    assert!(components_equal(("pulse", &small), ("headache", &small), &s).is_err());
}

#[test]
fn subvector_examples() {
    let s = schema();
    let record = CaseVector::new()
        .with("pregnant", Value::label("false"))
        .with("gender", Value::label("male"));
    let y = CaseVector::new()
        .with("pregnant", Value::label("true"))
        .with("gender", Value::label("male"));
    assert!(is_subvector(&CaseVector::new(), &record, &s).unwrap());
    assert!(!is_subvector(&y, &record, &s).unwrap());
    assert!(is_subvector(&record, &record, &s).unwrap());
}

#[test]
fn interval_subvector_is_not_transitive() {
    // chained overlaps [36,37] ~ [37,38] ~ [38,39] do not make the ends overlap
    let s = schema();
    let y = CaseVector::new().with("temperature", iv(36.0, 37.0));
    let x = CaseVector::new().with("temperature", iv(37.0, 38.0));
    let z = CaseVector::new().with("temperature", iv(38.0, 39.0));
    assert!(is_subvector(&y, &x, &s).unwrap());
    assert!(is_subvector(&x, &z, &s).unwrap());
    assert!(!is_subvector(&y, &z, &s).unwrap());
}

#[test]
fn distance_hand_computed() {
    let s: DomainSchema<f64> = DomainSchema::from_json(
        &json!({
            "parameters": [
                {"name": "temp", "kind": "numeric", "range": [35, 41]},
                {"name": "cough", "kind": "categorical", "labels": ["no", "yes"]}
            ],
            "solutions": ["a", "b"]
        })
        .to_string(),
    )
    .unwrap();
    let a = CaseVector::new().with("temp", Value::number(37.0)).with("cough", Value::label("no"));
    let b = CaseVector::new().with("temp", Value::number(40.0)).with("cough", Value::label("yes"));
    assert!((distance(&a, &b, &s).unwrap() - 0.75).abs() < 1e-12);
    assert_eq!(distance(&a, &a, &s).unwrap(), 0.0);
    // temp missing in one vector: (0.5 + 1) / 2
    let c = CaseVector::new().with("cough", Value::label("yes"));
    assert!((distance(&a, &c, &s).unwrap() - 0.75).abs() < 1e-12);
}

#[test]
fn omega_contains_examples() {
    let s = schema();
    let center = CaseVector::new().with("temperature", Value::number(37.7));
    let at = |t: f64| CaseVector::new().with("temperature", Value::number(t));
    assert!(omega_contains(&s, &center, &at(37.9)).unwrap());
    assert!(!omega_contains(&s, &center, &at(38.1)).unwrap());
    assert!(omega_contains(&s, &center, &center).unwrap());

    let small = CaseVector::new().with("headache", Value::level(1));
    let lvl = |i| CaseVector::new().with("headache", Value::level(i));
    assert!(omega_contains(&s, &small, &lvl(2)).unwrap());
    assert!(!omega_contains(&s, &small, &lvl(3)).unwrap());

    assert!(omega_contains(&s, &small, &center).is_err());
}

#[test]
fn omega_sample_stays_in_measurement_window() {
    let s = schema();
    let center = CaseVector::new().with("temperature", Value::number(37.7));
    let samples = omega_sample(&s, &center, 1000, 11).unwrap();
    assert_eq!(samples.len(), 1000);
    for x in &samples {
        let Some(Value::Numeric(t)) = x.get("temperature") else { panic!() };
        assert!(t.lo >= 37.4 && t.hi <= 38.0, "{t:?}");
    }
    assert!(omega_sample(&s, &center, 0, 1).is_err());
}

#[test]
fn categorical_neighbor_map_is_directional() {
    let s = schema();
    let no = CaseVector::new().with("cough", Value::label("no"));
    let yes = CaseVector::new().with("cough", Value::label("yes"));
    assert!(omega_contains(&s, &no, &yes).unwrap());
    assert!(!omega_contains(&s, &yes, &no).unwrap());
}

#[test]
fn generic_over_f32() {
    let s: DomainSchema<f32> = DomainSchema::from_json(
        &json!({
            "parameters": [{"name": "t", "kind": "numeric", "range": [0, 4], "proximity_radius": 0.5}],
            "solutions": ["a", "b"]
        })
        .to_string(),
    )
    .unwrap();
    let a = CaseVector::new().with("t", Value::number(1.0_f32));
    let b = CaseVector::new().with("t", Value::number(3.0_f32));
    assert_eq!(distance(&a, &b, &s).unwrap(), 0.5_f32);
    assert!(omega_sample(&s, &a, 50, 3)
        .unwrap()
        .iter()
        .all(|x| omega_contains(&s, &a, x).unwrap()));
}

fn arb_value(name: &'static str) -> BoxedStrategy<Value<f64>> {
    match name {
        "temperature" => (35.0..42.0f64, 0.0..1.5f64)
            .prop_map(|(lo, w)| Value::interval(lo, (lo + w).min(42.0)).unwrap())
            .boxed(),
        "headache" => (0usize..4, 0usize..2)
            .prop_map(|(lo, w)| Value::Ordinal(LevelRange::new(lo, (lo + w).min(3)).unwrap()))
            .boxed(),
        "cough" => prop_oneof![
            Just(Value::label("no")),
            Just(Value::label("yes")),
            Just(Value::labels(["no", "yes"]))
        ]
        .boxed(),
        "pregnant" => prop_oneof![Just(Value::label("false")), Just(Value::label("true"))].boxed(),
        _ => prop_oneof![Just(Value::label("female")), Just(Value::label("male"))].boxed(),
    }
}

const NAMES: [&str; 5] = ["cough", "gender", "headache", "pregnant", "temperature"];

fn arb_vector() -> impl Strategy<Value = CaseVector<f64>> {
    let parts: Vec<_> = NAMES
        .iter()
        .map(|&n| proptest::option::of(arb_value(n)).prop_map(move |v| (n, v)))
        .collect();
    parts.prop_map(|parts| {
        parts
            .into_iter()
            .filter_map(|(n, v)| v.map(|v| (n.to_string(), v)))
            .collect()
    })
}

/// Point-valued vectors: degenerate intervals, single levels, single labels.
fn arb_point_vector() -> impl Strategy<Value = CaseVector<f64>> {
    (
        proptest::option::of(prop_oneof![Just(36.0), Just(37.5), Just(39.0)]),
        proptest::option::of(0usize..4),
        proptest::option::of(prop_oneof![Just("no"), Just("yes")]),
    )
        .prop_map(|(t, h, c)| {
            let mut v = CaseVector::new();
            if let Some(t) = t {
                v.set("temperature", Value::number(t));
            }
            if let Some(h) = h {
                v.set("headache", Value::level(h));
            }
            if let Some(c) = c {
                v.set("cough", Value::label(c));
            }
            v
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn subvector_reflexive(x in arb_vector()) {
        prop_assert!(is_subvector(&x, &x, &schema()).unwrap());
    }

    #[test]
    fn subvector_transitive_on_points(
        x in arb_point_vector(), y in arb_point_vector(), z in arb_point_vector()
    ) {
        let s = schema();
        if is_subvector(&x, &y, &s).unwrap() && is_subvector(&y, &z, &s).unwrap() {
            prop_assert!(is_subvector(&x, &z, &s).unwrap());
        }
    }

    #[test]
    fn components_equal_symmetric(a in arb_value("temperature"), b in arb_value("temperature")) {
        let s = schema();
        prop_assert_eq!(
            components_equal(("temperature", &a), ("temperature", &b), &s).unwrap(),
            components_equal(("temperature", &b), ("temperature", &a), &s).unwrap()
        );
    }

    #[test]
    fn distance_is_a_bounded_symmetric_premetric(a in arb_vector(), b in arb_vector()) {
        let s = schema();
        let ab = distance(&a, &b, &s).unwrap();
        prop_assert_eq!(ab, distance(&b, &a, &s).unwrap());
        prop_assert!((0.0..=1.0).contains(&ab));
        prop_assert_eq!(distance(&a, &a, &s).unwrap(), 0.0);
    }

    #[test]
    fn omega_samples_stay_in_omega(center in arb_vector(), seed in any::<u64>()) {
        let s = schema();
        prop_assume!(!center.is_empty());
        let first = omega_sample(&s, &center, 20, seed).unwrap();
        for x in &first {
            prop_assert!(omega_contains(&s, &center, x).unwrap());
        }
        prop_assert_eq!(first, omega_sample(&s, &center, 20, seed).unwrap());
    }
}
