use forest_spectra::maxent::{maxent_fit, moment_integrals, objective, tail_probability, DEFAULT_MAX_ITER};
use forest_spectra::moments::MomentSequence;
use proptest::prelude::*;

fn interval() -> impl Strategy<Value = (f64, f64)> {
    prop_oneof![Just((0.0, 1.0)), (0.0f64..0.6).prop_map(|a| (a, 1.0))]
}

fn betas(k: std::ops::RangeInclusive<usize>, r: f64) -> impl Strategy<Value = Vec<f64>> {
    k.prop_flat_map(move |k| prop::collection::vec(-r..r, k))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn gradient_matches_central_differences((a, b) in interval(), beta in betas(1..=4, 4.0)) {
        let k = beta.len();
        // Targets from the uniform law on [a, b].
        let target: Vec<f64> = (0..=k)
            .map(|j| (b.powi(j as i32 + 1) - a.powi(j as i32 + 1)) / ((j as f64 + 1.0) * (b - a)))
            .collect();
        let ms = MomentSequence::new(a, b, target).unwrap();
        let obj = objective(&ms, &beta).unwrap();
        let gmax = obj.gradient.iter().fold(0.0f64, |acc, g| acc.max(g.abs()));
        for j in 0..k {
            let h = 1e-6 * beta[j].abs().max(1.0);
            let mut p = beta.clone();
            p[j] += h;
            let fp = objective(&ms, &p).unwrap().value;
            p[j] -= 2.0 * h;
            let fm = objective(&ms, &p).unwrap().value;
            let fd = (fp - fm) / (2.0 * h);
            prop_assert!((fd - obj.gradient[j]).abs() <= 1e-5 * gmax, "j={j} fd={fd} g={}", obj.gradient[j]);
        }
    }

    #[test]
    fn fit_recovers_multipliers((a, b) in interval(), beta in betas(1..=4, 3.0)) {
        let k = beta.len();
        let mi = moment_integrals(&beta, a, b, k).unwrap();
        let mut m = mi.moments.clone();
        m[0] = 1.0;
        let ms = MomentSequence::new(a, b, m).unwrap();
        let fit = maxent_fit(&ms, None, DEFAULT_MAX_ITER).unwrap();
        prop_assert!(fit.converged);
        let back = moment_integrals(&fit.beta, a, b, k).unwrap();
        for j in 1..=k {
            prop_assert!((back.moments[j] - ms.moments[j]).abs() <= 1e-7);
        }
        if a == 0.0 {
            for (x, y) in fit.beta.iter().zip(&beta) {
                prop_assert!((x - y).abs() <= 1e-5, "{:?} vs {:?}", fit.beta, beta);
            }
        }
        let t = tail_probability(&fit, 0.5 * (a + b));
        prop_assert!((0.0..=1.0).contains(&t));
    }
}

#[test]
fn objective_decreases_along_newton_iterates() {
    let mi = moment_integrals(&[4.0, -6.0, 3.0], 0.0, 1.0, 3).unwrap();
    let mut m = mi.moments.clone();
    m[0] = 1.0;
    let ms = MomentSequence::new(0.0, 1.0, m).unwrap();
    let mut prev = f64::INFINITY;
    for cap in 0..12 {
        let fit = maxent_fit(&ms, None, cap).unwrap();
        let v = objective(&ms, &fit.beta).unwrap().value;
        assert!(v <= prev + 1e-12, "cap {cap}: {v} > {prev}");
        prev = v;
    }
}

#[test]
fn warm_start_needs_fewer_iterations() {
    let mi = moment_integrals(&[2.0, 1.0], 0.1, 1.0, 2).unwrap();
    let mut m = mi.moments.clone();
    m[0] = 1.0;
    let ms = MomentSequence::new(0.1, 1.0, m).unwrap();
    let cold = maxent_fit(&ms, None, DEFAULT_MAX_ITER).unwrap();
    let warm = maxent_fit(&ms, Some(&[2.01, 0.99]), DEFAULT_MAX_ITER).unwrap();
    assert!(warm.converged && warm.iterations < cold.iterations);
}
