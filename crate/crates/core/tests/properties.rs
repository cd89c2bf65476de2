mod common;

use proptest::prelude::*;

use bellstat::entropy::{
    combine, entropy_from_multiplicity, entropy_inequality, multiplicity_inequality, product_inequality, Multiplicity,
    MultiplicityVector, K_NATURAL,
};
use bellstat::model::Axis;
use bellstat::model::{
    exact_probability, outcome_populations, wigner_check, AxisLabel, PairOutcome, PopulationTable, Sign,
};
use bellstat::quantum::{singlet_prediction, SingletPrediction};

fn label() -> impl Strategy<Value = AxisLabel> {
    prop::sample::select(AxisLabel::ALL.to_vec())
}

fn sign() -> impl Strategy<Value = Sign> {
    prop::sample::select(Sign::ALL.to_vec())
}

fn outcome() -> impl Strategy<Value = PairOutcome> {
    (label(), sign(), label(), sign()).prop_map(|(a, s, b, t)| PairOutcome::new(a, s, b, t))
}

fn table() -> impl Strategy<Value = PopulationTable> {
    prop::array::uniform8(0u64..1_000_000)
        .prop_filter("nonempty", |c| c.iter().any(|&n| n > 0))
        .prop_map(PopulationTable::new)
}

fn omegas() -> impl Strategy<Value = MultiplicityVector> {
    prop::array::uniform8(-6.0f64..6.0).prop_map(|e| MultiplicityVector::new(e.map(|x| 10f64.powf(x))).unwrap())
}

proptest! {
    #[test]
    fn classical_tables_never_violate(t in table()) {
        prop_assert!(wigner_check(&t).unwrap().holds);
    }

    #[test]
    fn outcome_classes_partition_the_table(t in table(), a in label(), b in label()) {
        let sum: u64 = Sign::ALL
            .iter()
            .flat_map(|&s| Sign::ALL.map(move |r| PairOutcome::new(a, s, b, r)))
            .map(|o| exact_probability(&t, o).unwrap().numerator)
            .sum();
        prop_assert_eq!(sum, t.total().unwrap());
    }

    #[test]
    fn flipping_both_signs_maps_to_the_mirror_populations(o in outcome()) {
        let mirrored: Vec<usize> = outcome_populations(o).indices().iter().map(|i| 9 - i).collect();
        let mut flipped = outcome_populations(o.flipped()).indices();
        flipped.reverse();
        prop_assert_eq!(mirrored, flipped);
    }

    #[test]
    fn outcome_mapping_matches_oracle(o in outcome()) {
        let oracle = common::populations_for(
            o.alice_axis.index(), o.alice_sign.value(), o.bob_axis.index(), o.bob_sign.value());
        prop_assert_eq!(outcome_populations(o).indices(), oracle);
    }

    #[test]
    fn exact_and_float_probabilities_agree(t in table(), o in outcome()) {
        let e = exact_probability(&t, o).unwrap();
        let direct = t.sum_over(outcome_populations(o)).unwrap() as f64 / t.total().unwrap() as f64;
        prop_assert!((e.value() - direct).abs() <= 1e-15 * direct.max(f64::MIN_POSITIVE));
    }

    #[test]
    fn entropy_is_additive(a in -300.0f64..300.0, b in -300.0f64..300.0) {
        let (a, b) = (Multiplicity::new(a.exp()).unwrap(), Multiplicity::new(b.exp()).unwrap());
        let joint = entropy_from_multiplicity(combine(a, b), K_NATURAL).s;
        let sum = entropy_from_multiplicity(a, K_NATURAL).s + entropy_from_multiplicity(b, K_NATURAL).s;
        prop_assert!((joint - sum).abs() <= 1e-9 * sum.abs().max(1.0));
    }

    #[test]
    fn product_and_entropy_forms_agree(v in omegas()) {
        prop_assert_eq!(product_inequality(&v).holds, entropy_inequality(&v, K_NATURAL).holds);
    }

    #[test]
    fn sum_form_holds_for_equal_vectors(w in -6.0f64..6.0) {
        let v = MultiplicityVector::equal(10f64.powf(w)).unwrap();
        let r = multiplicity_inequality(&v, 0.0);
        prop_assert!(r.holds);
        prop_assert_eq!(r.equal_multiplicity, Some(true));
    }

    #[test]
    fn singlet_prediction_matches_state_vector(
        alice in (0.0f64..std::f64::consts::PI, 0.0f64..std::f64::consts::TAU),
        bob in (0.0f64..std::f64::consts::PI, 0.0f64..std::f64::consts::TAU),
    ) {
        let unit = |(t, p): (f64, f64)| [t.sin() * p.cos(), t.sin() * p.sin(), t.cos()];
        let (ua, ub) = (unit(alice), unit(bob));
        let pred = singlet_prediction(&Axis::new(AxisLabel::A, ua).unwrap(), &Axis::new(AxisLabel::B, ub).unwrap());
        for (s, t) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
            let oracle = common::state_vector_probability(ua, s, ub, t);
            let got = pred.probability(
                if s > 0.0 { Sign::Plus } else { Sign::Minus },
                if t > 0.0 { Sign::Plus } else { Sign::Minus },
            );
            prop_assert!((got - oracle).abs() < 1e-12, "{got} vs {oracle}");
        }
    }
}

#[test]
fn singlet_grid_matches_state_vector() {
    for k in 0..100 {
        let deg = 180.0 * k as f64 / 99.0;
        let pred = SingletPrediction::for_angle(deg.to_radians());
        let (a, b) = (common::in_plane(0.0), common::in_plane(deg));
        let oracle = [
            common::state_vector_probability(a, 1.0, b, 1.0),
            common::state_vector_probability(a, 1.0, b, -1.0),
            common::state_vector_probability(a, -1.0, b, 1.0),
            common::state_vector_probability(a, -1.0, b, -1.0),
        ];
        for (got, want) in pred.as_array().iter().zip(oracle) {
            assert!((got - want).abs() < 1e-12, "{deg}: {got} vs {want}");
        }
        assert!((pred.as_array().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}
