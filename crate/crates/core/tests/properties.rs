use std::path::Path;

use proptest::prelude::*;
use watson_core::decision_model::DecisionModel;
use watson_core::feature_space::{Gower, Metric, RawVector};
use watson_core::local_explainer::{explain_local, PerturbationConfig};
use watson_core::{CaseVector, Domain};

fn domain() -> Domain {
    Domain::from_path(Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/respiratory.json")).unwrap()
}

const ORDINALS: [(&str, [&str; 4]); 3] = [
    ("headache", ["none", "small", "moderate", "strong"]),
    ("general_aches", ["none", "slight", "moderate", "severe"]),
    ("exhaustion", ["none", "small", "moderate", "extreme"]),
];

const BINARY: [&str; 5] = ["weakness", "cough", "stuffy_runny_nose", "sneezing", "allergy_anamnesis"];

/// Partial case vectors over the fixture domain; `None` leaves a parameter out.
fn case() -> impl Strategy<Value = CaseVector> {
    (
        proptest::option::of(350u32..=420),
        proptest::collection::vec(proptest::option::of(0usize..4), 3),
        proptest::collection::vec(proptest::option::of(any::<bool>()), 5),
    )
        .prop_map(|(t, ords, bins)| {
            let mut raw = serde_json::Map::new();
            if let Some(t) = t {
                raw.insert("temperature".into(), serde_json::json!(f64::from(t) / 10.0));
            }
            for ((name, levels), o) in ORDINALS.iter().zip(ords) {
                if let Some(i) = o {
                    raw.insert((*name).into(), levels[i].into());
                }
            }
            for (name, b) in BINARY.iter().zip(bins) {
                if let Some(b) = b {
                    raw.insert((*name).into(), if b { "yes" } else { "no" }.into());
                }
            }
            let raw: RawVector<f64> = serde_json::from_value(serde_json::Value::Object(raw)).unwrap();
            domain().schema().parse_vector(&raw).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn classification_respects_vetoes_and_nearness(x in case()) {
        let d = domain();
        let model = d.model();
        let got = model.classify(&x);
        if &got == d.schema().fallback() {
            for id in d.schema().solution_ids() {
                prop_assert!(model.vetoed(&x, id) || d.typical(id).is_none());
            }
        } else {
            prop_assert!(!model.vetoed(&x, &got));
            let best = Gower.distance(d.schema(), &x, &d.typical(&got).unwrap().vector);
            for id in d.schema().solution_ids() {
                if model.vetoed(&x, id) {
                    continue;
                }
                let other = Gower.distance(d.schema(), &x, &d.typical(id).unwrap().vector);
                prop_assert!(best <= other);
            }
        }
    }

    #[test]
    fn gower_is_a_bounded_symmetric_dissimilarity(a in case(), b in case()) {
        let d = domain();
        let s = d.schema();
        let ab = Gower.distance(s, &a, &b);
        prop_assert!((0.0..=1.0).contains(&ab));
        prop_assert!((ab - Gower.distance(s, &b, &a)).abs() < 1e-12);
        prop_assert!(Gower.distance(s, &a, &a).abs() < 1e-12);
    }

    #[test]
    fn explanations_are_reproducible(x in case(), seed in any::<u64>()) {
        let d = domain();
        let full = watson_core::decision_model::complete_with_typical(&x, d.typical(&"flu".into()).unwrap());
        let target = d.model().classify(&full);
        let cfg = PerturbationConfig { samples: 200, ..PerturbationConfig::default() }.with_seed(seed);
        let a = explain_local(d.model(), d.schema(), &Gower, &full, &target, &cfg).unwrap();
        let b = explain_local(d.model(), d.schema(), &Gower, &full, &target, &cfg).unwrap();
        prop_assert_eq!(a, b);
    }
}
