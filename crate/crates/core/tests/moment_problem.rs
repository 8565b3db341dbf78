use forest_spectra::moments::{
    admissible_interval, canonical_representation, classify, markov_bounds, principal_representations,
    AtomicMeasure, MomentSequence, Regularity,
};
use proptest::prelude::*;

fn measure() -> impl Strategy<Value = AtomicMeasure> {
    prop::collection::vec((0.0f64..=1.0, 0.01f64..1.0), 1..7).prop_map(|pairs| {
        let (atoms, weights): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        AtomicMeasure::new(atoms, weights).unwrap()
    })
}

fn seq(mu: &AtomicMeasure, l: usize) -> MomentSequence {
    MomentSequence::new(0.0, 1.0, mu.moments(l)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn markov_bounds_bracket_the_tail(mu in measure(), l in 1usize..=4, xi in 0.001f64..0.999) {
        let ms = seq(&mu, l);
        let b = markov_bounds(&ms, xi).unwrap();
        prop_assert!(b.lower <= mu.mass_above(xi) + 1e-9, "{b:?} vs {}", mu.mass_above(xi));
        prop_assert!(mu.mass_from(xi) <= b.upper + 1e-9, "{b:?} vs {}", mu.mass_from(xi));
        prop_assert!(b.lower <= b.upper + 1e-12);
    }

    #[test]
    fn representations_reproduce_moments(mu in measure(), l in 1usize..=4, xi in 0.001f64..0.999) {
        let ms = seq(&mu, l);
        if let Regularity::Regular = classify(&ms).unwrap() {
            let (lo, hi) = principal_representations(&ms).unwrap();
            let c = canonical_representation(&ms, xi).unwrap();
            for k in 0..=l {
                prop_assert!((lo.moment(k) - ms.moments[k]).abs() <= 1e-9);
                prop_assert!((hi.moment(k) - ms.moments[k]).abs() <= 1e-9);
                prop_assert!((c.measure.moment(k) - ms.moments[k]).abs() <= 1e-9);
            }
            prop_assert!(c.measure.atoms.contains(&xi));
            let (m_lo, m_hi) = admissible_interval(&ms).unwrap();
            let next = mu.moment(l + 1);
            prop_assert!(m_lo - 1e-9 <= next && next <= m_hi + 1e-9);
        }
    }

    #[test]
    fn markov_window_shrinks_with_order(mu in measure(), xi in 0.001f64..0.999) {
        let mut prev = (f64::NEG_INFINITY, f64::INFINITY);
        for l in 1..=4 {
            let b = markov_bounds(&seq(&mu, l), xi).unwrap();
            prop_assert!(b.lower >= prev.0 - 1e-9 && b.upper <= prev.1 + 1e-9);
            prev = (b.lower, b.upper);
        }
    }
}

#[test]
fn general_interval_matches_unit_interval() {
    let mu = AtomicMeasure::new(vec![0.4, 0.6, 0.75, 0.9], vec![0.2, 0.3, 0.1, 0.4]).unwrap();
    let (a, b) = (0.3, 1.0);
    let ms = MomentSequence::new(a, b, mu.moments(3)).unwrap();
    let unit = AtomicMeasure::new(
        mu.atoms.iter().map(|x| (x - a) / (b - a)).collect(),
        mu.weights.clone(),
    )
    .unwrap();
    let ref_ms = seq(&unit, 3);
    for xi in [0.35, 0.5, 0.8] {
        let x = markov_bounds(&ms, xi).unwrap();
        let y = markov_bounds(&ref_ms, (xi - a) / (b - a)).unwrap();
        assert!((x.lower - y.lower).abs() < 1e-10 && (x.upper - y.upper).abs() < 1e-10);
    }
}
