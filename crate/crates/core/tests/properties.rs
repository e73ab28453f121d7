use std::f64::consts::{PI, SQRT_2};

use bellspace::inequalities::{chsh_conditional, chsh_partial};
use bellspace::lhv::{
    born_targets, factorizability_fit, lhv_predicted_probs, m_separability_search, m_separability_search_target, margin,
    no_signaling_report, product_table, LhvModel, SeparabilityOptions,
};
use bellspace::measure::{setting_event, x_variable, xy_variable, y_variable, MeasureTable};
use bellspace::prob_space::{Event, FiniteProbabilitySpace, RandomVariable};
use bellspace::singlet::{conditional_joint_probs, correlation, spectral_coefficients, OutcomeProbs, Sign};
use bellspace::{chsh_measure, ChshAngles, DetectorAngle, JointMeasure, SettingPair, SettingsDistribution};
use proptest::prelude::*;

const TSIRELSON_GAP: f64 = (2.0 * SQRT_2 - 2.0) / 16.0;

fn angle() -> impl Strategy<Value = f64> {
    -2.0 * PI..2.0 * PI
}

fn angles() -> impl Strategy<Value = ChshAngles> {
    (angle(), angle(), angle(), angle()).prop_map(|(a0, a1, b0, b1)| ChshAngles::new(a0, a1, b0, b1))
}

fn weights(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(1e-3..1.0f64, n).prop_map(|raw| {
        let total: f64 = raw.iter().sum();
        let mut w: Vec<f64> = raw.iter().map(|v| v / total).collect();
        let head: f64 = w[..w.len() - 1].iter().sum();
        *w.last_mut().unwrap() = 1.0 - head;
        w
    })
}

fn settings() -> impl Strategy<Value = SettingsDistribution> {
    weights(4).prop_map(|w| SettingsDistribution::new([w[0], w[1], w[2], w[3]]).unwrap())
}

fn unit() -> impl Strategy<Value = f64> {
    0.0..=1.0f64
}

fn models(sizes: std::ops::Range<usize>) -> impl Strategy<Value = LhvModel> {
    sizes.prop_flat_map(|l| {
        let responses = || prop::collection::vec(unit(), l);
        (weights(l), responses(), responses(), responses(), responses())
            .prop_map(|(rho, p0, p1, q0, q1)| LhvModel::new(rho, [p0, p1], [q0, q1]).unwrap())
    })
}

fn pairs() -> [SettingPair; 4] {
    SettingPair::TABLE_ORDER
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

proptest! {
    #[test]
    fn expectation_is_linear(w in weights(6), xs in prop::array::uniform6(-5.0..5.0f64),
                             ys in prop::array::uniform6(-5.0..5.0f64), a in -3.0..3.0f64, b in -3.0..3.0f64) {
        let space = FiniteProbabilitySpace::new((0..6usize).collect(), w).unwrap();
        let x = RandomVariable::new(move |&k: &usize| xs[k]);
        let y = RandomVariable::new(move |&k: &usize| ys[k]);
        let combo = x.scale(a) + y.scale(b);
        let lhs = space.expectation(&combo);
        let rhs = a * space.expectation(&x) + b * space.expectation(&y);
        prop_assert!(close(lhs, rhs, 1e-12));
    }

    #[test]
    fn partial_expectations_partition(w in weights(6), xs in prop::array::uniform6(-5.0..5.0f64), mask in 0u8..64) {
        let space = FiniteProbabilitySpace::new((0..6usize).collect(), w).unwrap();
        let x = RandomVariable::new(move |&k: &usize| xs[k]);
        let event = Event::new(move |&k: &usize| mask & (1 << k) != 0);
        let total = space.partial_expectation(&x, &event) + space.partial_expectation(&x, &event.complement());
        prop_assert!(close(total, space.expectation(&x), 1e-12));
        // the relation needs P(A) > 0; every weight here is positive
        prop_assert_eq!(space.verify_expectation_relation(&x, &event), mask != 0);
    }

    #[test]
    fn conditional_terms_are_born_correlations(a in angles(), s in settings()) {
        let m = chsh_measure(a, s);
        let report = chsh_conditional(&m).unwrap();
        for pair in pairs() {
            let (da, db) = a.pair(pair);
            prop_assert!(close(report.term(pair), correlation(da, db), 1e-12));
        }
    }

    #[test]
    fn partial_is_conditional_times_setting_probability(a in angles(), s in settings()) {
        let m = chsh_measure(a, s);
        let xy = xy_variable();
        for pair in pairs() {
            let event = setting_event(pair);
            let partial = m.space().partial_expectation(&xy, &event);
            let conditional = m.space().conditional_expectation(&xy, &event).unwrap();
            prop_assert!(close(partial, s.get(pair) * conditional, 1e-12));
        }
    }

    #[test]
    fn conditional_chsh_within_tsirelson(a in angles()) {
        let r = chsh_conditional(&chsh_measure(a, SettingsDistribution::uniform())).unwrap();
        prop_assert!(r.combined_value <= 2.0 * SQRT_2 + 1e-9);
    }

    #[test]
    fn no_signaling_everywhere(a in angles(), s in settings()) {
        let report = no_signaling_report(&chsh_measure(a, s));
        prop_assert!(report.max_deviation <= 1e-12);
        prop_assert!(report.skipped_pairs.is_empty());
    }

    #[test]
    fn joint_probabilities_depend_on_difference(a in angle(), b in angle(), shift in angle()) {
        let base = conditional_joint_probs(DetectorAngle::new(a), DetectorAngle::new(b));
        let moved = conditional_joint_probs(DetectorAngle::new(a + shift), DetectorAngle::new(b + shift));
        for k in 0..4 {
            prop_assert!(close(base.0[k], moved.0[k], 1e-12));
        }
        let plus_x = base.get(Sign::Plus, Sign::Plus) + base.get(Sign::Plus, Sign::Minus);
        let plus_y = base.get(Sign::Plus, Sign::Plus) + base.get(Sign::Minus, Sign::Plus);
        prop_assert!(close(plus_x, 0.5, 1e-12) && close(plus_y, 0.5, 1e-12));
        prop_assert!(close(base.total(), 1.0, 1e-12));
    }

    #[test]
    fn spectral_route_matches_closed_form(a in angle(), b in angle()) {
        let (da, db) = (DetectorAngle::new(a), DetectorAngle::new(b));
        let spectral = spectral_coefficients(da, db);
        let closed = conditional_joint_probs(da, db);
        prop_assert!(close(spectral.norm_squared(), 1.0, 1e-12));
        for k in 0..4 {
            prop_assert!(close(spectral.born_probs().0[k], closed.0[k], 1e-12));
        }
    }

    #[test]
    fn measure_marginals(a in angles(), s in settings()) {
        let m = chsh_measure(a, s);
        prop_assert!(close(m.total_mass(), 1.0, 1e-12));
        for pair in pairs() {
            prop_assert!(close(m.pair_mass(pair), s.get(pair), 1e-12));
            let event = setting_event(pair);
            prop_assert!(m.space().partial_expectation(&x_variable(), &event).abs() <= 1e-12);
            prop_assert!(m.space().partial_expectation(&y_variable(), &event).abs() <= 1e-12);
        }
    }

    #[test]
    fn measure_json_round_trip(a in angles(), s in settings()) {
        let m = chsh_measure(a, s);
        let table: MeasureTable = serde_json::from_str(&m.to_json()).unwrap();
        let back = JointMeasure::try_from(table).unwrap();
        prop_assert_eq!(back.columns(), m.columns());
        prop_assert_eq!(back.settings(), m.settings());
    }

    #[test]
    fn lhv_predictions_are_distributions(model in models(1..12)) {
        for i in 0..2 {
            for j in 0..2 {
                let p = lhv_predicted_probs(&model, i, j);
                prop_assert!(p.0.iter().all(|&v| (-1e-15..=1.0 + 1e-15).contains(&v)));
                prop_assert!(close(p.total(), 1.0, 1e-12));
            }
        }
        let back = LhvModel::from_json(&model.to_json()).unwrap();
        prop_assert_eq!(back, model);
    }

    #[test]
    fn single_pair_is_reproduced_exactly(a in angles(), pi in 0u8..2, pj in 0u8..2) {
        let pair = SettingPair::new(pi, pj);
        let (da, db) = a.pair(pair);
        let (s, c) = (da.radians() - db.radians()).sin_cos();
        let mut p_response = [vec![0.5, 0.5], vec![0.5, 0.5]];
        let mut q_response = [vec![0.5, 0.5], vec![0.5, 0.5]];
        p_response[usize::from(pi)] = vec![1.0, 0.0];
        q_response[usize::from(pj)] = vec![c * c, s * s];
        let model = LhvModel::new(vec![0.5, 0.5], p_response, q_response).unwrap();
        let opts = SeparabilityOptions::new(2, 1, 0).only_pair(pair);
        let (m, _) = margin(&model, &born_targets(&a), &opts);
        prop_assert!(m <= 1e-12);
    }

    #[test]
    fn factorizable_iff_product(params in prop::array::uniform4(unit())) {
        let product = JointMeasure::from_columns(ChshAngles::tsirelson(), product_table(params)).unwrap();
        let fit = factorizability_fit(&product).unwrap();
        prop_assert!(fit.residual <= 1e-10);
        let rebuilt = product_table(fit.params());
        let worst = rebuilt.iter().flatten().zip(product.columns().iter().flatten())
            .map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        prop_assert!(worst <= 1e-5);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn partial_chsh_never_exceeds_two(a in angles()) {
        let r = chsh_partial(&chsh_measure(a, SettingsDistribution::uniform()));
        prop_assert!(r.combined_value <= 2.0);
        prop_assert!(r.satisfied);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn tsirelson_lower_bound_holds(l in 2usize..10, restarts in 1usize..4, seed in any::<u64>()) {
        let r = m_separability_search(&ChshAngles::tsirelson(), &SeparabilityOptions::new(l, restarts, seed)).unwrap();
        prop_assert!(r.m_hat >= TSIRELSON_GAP - 1e-9, "m_hat {}", r.m_hat);
    }

    #[test]
    fn refining_the_grid_never_hurts(a in angles(), l in 2usize..6, seed in any::<u64>()) {
        let search = |l| m_separability_search(&a, &SeparabilityOptions::new(l, 2, seed)).unwrap().m_hat;
        prop_assert!(search(2 * l) <= search(l) + 1e-15);
    }

    #[test]
    fn single_pair_search_reaches_zero(a in angles(), pi in 0u8..2, pj in 0u8..2, seed in any::<u64>()) {
        let opts = SeparabilityOptions::new(4, 2, seed).only_pair(SettingPair::new(pi, pj));
        let r = m_separability_search(&a, &opts).unwrap();
        prop_assert!(r.m_hat <= 1e-6, "m_hat {}", r.m_hat);
    }

    #[test]
    fn separable_targets_reach_zero(source in models(1..4), seed in any::<u64>()) {
        let target: [OutcomeProbs; 4] = [(0, 0), (0, 1), (1, 0), (1, 1)].map(|(i, j)| lhv_predicted_probs(&source, i, j));
        let r = m_separability_search_target(&target, &SeparabilityOptions::new(8, 4, seed)).unwrap();
        prop_assert!(r.m_hat <= 1e-6, "m_hat {}", r.m_hat);
    }
}
