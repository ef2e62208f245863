use proptest::prelude::*;

use percept_eval::annotation::{
    parse_annotation, serialize_annotation, Component, FacetKey, Facets, SceneAnnotation, SceneType,
};
use percept_eval::grpo::{grpo_objective, GrpoConfig, Rollout, RolloutGroup};
use percept_eval::harness::leaderboard::{highlight_column, Highlight};
use percept_eval::metrics::{plcc, srcc, VrSeries};

fn term() -> impl Strategy<Value = String> {
    prop_oneof![
        Just("N/A".to_string()),
        Just("grid".to_string()),
        Just("marbled".to_string()),
        "[A-Za-z][A-Za-z ,/-]{0,14}",
    ]
}

fn facets() -> impl Strategy<Value = Facets> {
    proptest::collection::vec(proptest::collection::vec(term(), 0..4), 9).prop_map(|lists| {
        let mut f = Facets::default();
        for (key, list) in FacetKey::ALL.into_iter().zip(lists) {
            *f.get_mut(key) = list;
        }
        f
    })
}

fn annotation() -> impl Strategy<Value = SceneAnnotation> {
    (
        any::<bool>(),
        "[A-Za-z][A-Za-z ]{0,20}",
        proptest::collection::vec(("[A-Za-z][A-Za-z0-9 ]{0,12}", facets()), 0..4),
        facets(),
    )
        .prop_map(|(composite, name, comps, scene)| {
            let mut ann = SceneAnnotation::new(
                if composite {
                    SceneType::Composite
                } else {
                    SceneType::Single
                },
                name,
            );
            for (n, f) in comps {
                let mut c = Component::new(n);
                c.facets = f;
                ann.components.push(c);
            }
            if ann.components.is_empty() {
                ann.scene_facets = Some(scene);
            }
            ann
        })
}

proptest! {
    #[test]
    fn annotations_round_trip(ann in annotation()) {
        let text = serialize_annotation(&ann);
        let back = parse_annotation(text.as_bytes()).unwrap();
        prop_assert_eq!(back, ann);
    }

    #[test]
    fn parsing_arbitrary_bytes_never_panics(bytes in proptest::collection::vec(any::<u8>(), 0..256)) {
        let _ = parse_annotation(&bytes);
    }

    #[test]
    fn parsing_arbitrary_json_never_panics(
        text in r#"\{("(SceneType|SceneName|Components|DescriptionContent|ComponentName)": ?(\[\]|"[a-z ]{0,8}"|\{\}|null|1|\[\{\}\]),? ?){0,5}\}"#
    ) {
        let _ = parse_annotation(text.as_bytes());
    }

    #[test]
    fn correlations_are_symmetric(
        pairs in proptest::collection::vec((-100.0f64..100.0, -100.0f64..100.0), 2..40)
    ) {
        let (x, y): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let (Ok(a), Ok(b)) = (VrSeries::new(x.clone(), y.clone()), VrSeries::new(y, x)) else {
            return Ok(());
        };
        if let (Ok(p1), Ok(p2)) = (plcc(&a), plcc(&b)) {
            prop_assert!((p1 - p2).abs() < 1e-12);
            prop_assert!((-1.0..=1.0).contains(&p1));
        }
        if let (Ok(s1), Ok(s2)) = (srcc(&a), srcc(&b)) {
            prop_assert!((s1 - s2).abs() < 1e-12);
        }
    }

    #[test]
    fn plcc_invariant_under_positive_affine_maps(
        pairs in proptest::collection::vec((-100.0f64..100.0, -100.0f64..100.0), 3..40),
        scale in 0.01f64..100.0,
        shift in -1000.0f64..1000.0,
    ) {
        let (x, y): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let mapped: Vec<f64> = x.iter().map(|v| scale * v + shift).collect();
        let negated: Vec<f64> = x.iter().map(|v| -v).collect();
        let base = VrSeries::new(x, y.clone()).unwrap();
        let Ok(p) = plcc(&base) else { return Ok(()) };
        let p_mapped = plcc(&VrSeries::new(mapped, y.clone()).unwrap()).unwrap();
        prop_assert!((p - p_mapped).abs() < 1e-9, "{} vs {}", p, p_mapped);
        let p_neg = plcc(&VrSeries::new(negated, y).unwrap()).unwrap();
        prop_assert!((p + p_neg).abs() < 1e-9);
    }

    #[test]
    fn srcc_invariant_under_monotone_maps(
        pairs in proptest::collection::vec((-5.0f64..5.0, -100.0f64..100.0), 3..40),
    ) {
        let (x, y): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let cubed: Vec<f64> = x.iter().map(|v| v * v * v + 2.0 * v).collect();
        let Ok(s) = srcc(&VrSeries::new(x, y.clone()).unwrap()) else { return Ok(()) };
        let s_cubed = srcc(&VrSeries::new(cubed, y).unwrap()).unwrap();
        prop_assert!((s - s_cubed).abs() < 1e-12);
    }

    #[test]
    fn objective_ignores_rollout_order(
        rollouts in proptest::collection::vec(
            (0.0f64..1.0, proptest::collection::vec((-4.0f64..-0.01, -4.0f64..-0.01), 1..5)),
            2..6
        ),
        rotate in 0usize..6,
        beta in prop_oneof![Just(0.0), Just(0.001), 0.0f64..0.1],
    ) {
        let build = |rs: &[(f64, Vec<(f64, f64)>)]| {
            RolloutGroup::new(
                rs.iter()
                    .map(|(r, toks)| {
                        let (new, old) = toks.iter().copied().unzip();
                        Rollout::new(new, old, *r)
                    })
                    .collect(),
            )
            .unwrap()
        };
        let cfg = GrpoConfig { kl_beta: beta, ..GrpoConfig::default() };
        let a = grpo_objective(&build(&rollouts), &cfg).unwrap();
        let mut shuffled = rollouts.clone();
        let k = rotate % shuffled.len();
        shuffled.rotate_left(k);
        shuffled.reverse();
        let b = grpo_objective(&build(&shuffled), &cfg).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()), "{} vs {}", a, b);
    }

    #[test]
    fn wide_clip_reduces_to_unclipped_surrogate(
        rewards in proptest::collection::vec(0.0f64..1.0, 2..6),
        seed_tokens in proptest::collection::vec((-3.0f64..-0.5, -0.3f64..0.3), 6..30),
        weighted in any::<bool>(),
    ) {
        // per-token log-ratio within +/-0.3 keeps every ratio inside (0.001, 1.999)
        let g = rewards.len();
        let per = seed_tokens.len() / g;
        prop_assume!(per >= 1);
        let mut rollouts = Vec::new();
        for (i, &r) in rewards.iter().enumerate() {
            let toks = &seed_tokens[i * per..(i + 1) * per];
            let old: Vec<f64> = toks.iter().map(|t| t.0).collect();
            let new: Vec<f64> = toks.iter().map(|t| (t.0 + t.1).min(0.0)).collect();
            rollouts.push(Rollout::new(new, old, r));
        }
        let group = RolloutGroup::new(rollouts).unwrap();
        let cfg = GrpoConfig {
            clip_epsilon: 0.999,
            apply_reward_weight: weighted,
            ..GrpoConfig::default()
        };
        let n = rewards.len() as f64;
        let mean = rewards.iter().sum::<f64>() / n;
        let std = (rewards.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / n).sqrt();
        let adv: Vec<f64> = rewards
            .iter()
            .map(|r| if std == 0.0 { 0.0 } else { (r - mean) / std.max(1e-8) })
            .collect();
        let mut total = 0.0;
        let mut tokens = 0.0;
        for (ro, a) in group.rollouts.iter().zip(&adv) {
            let w = if weighted { ro.reward } else { 1.0 };
            for (nw, od) in ro.token_logprob_new.iter().zip(&ro.token_logprob_old) {
                total += w * (nw - od).exp() * a;
                tokens += 1.0;
            }
        }
        let expected = total / tokens;
        let got = grpo_objective(&group, &cfg).unwrap();
        prop_assert!((got - expected).abs() < 1e-9, "{} vs {}", got, expected);
    }

    #[test]
    fn highlight_invariants(
        col in proptest::collection::vec(proptest::option::of(0u8..6), 0..10)
    ) {
        let col: Vec<Option<f64>> = col.into_iter().map(|v| v.map(f64::from)).collect();
        let marks = highlight_column(&col);
        prop_assert_eq!(marks.len(), col.len());
        let max = col.iter().flatten().copied().reduce(f64::max);
        for (v, m) in col.iter().zip(&marks) {
            match (v, m) {
                (None, h) => prop_assert_eq!(*h, Highlight::None),
                (Some(x), Highlight::Best) => prop_assert_eq!(Some(*x), max),
                (Some(x), Highlight::SecondBest) => prop_assert!(Some(*x) < max),
                (Some(x), Highlight::None) => prop_assert!(Some(*x) != max),
            }
        }
        let best_count = marks.iter().filter(|m| **m == Highlight::Best).count();
        if best_count > 1 {
            prop_assert!(!marks.contains(&Highlight::SecondBest));
        }
    }
}
