use proptest::prelude::*;
use quantrate::gmi::{capacity, coeff_a, coeff_b, gamma, gamma_uniform, gmi_rate};
use quantrate::highres::{gamma_bar, optimal_loading, rate_optimal_loading};
use quantrate::numerics::Tolerance;
use quantrate::{SymmetricQuantizer, UniformSpec};

fn quantizer() -> impl Strategy<Value = SymmetricQuantizer> {
    (1usize..12)
        .prop_flat_map(|k| {
            (
                prop::collection::vec(0.01f64..1.0, k - 1),
                prop::collection::vec(0.01f64..3.0, k),
            )
        })
        .prop_map(|(gaps, mut points)| {
            let thresholds: Vec<f64> = gaps
                .iter()
                .scan(0.0, |acc, g| {
                    *acc += g;
                    Some(*acc)
                })
                .collect();
            points.sort_by(f64::total_cmp);
            SymmetricQuantizer::new(thresholds, points).unwrap()
        })
}

proptest! {
    #[test]
    fn gmi_never_exceeds_capacity(q in quantizer(), snr_db in -20.0f64..50.0) {
        let snr = 10f64.powf(snr_db / 10.0);
        let g = gamma(&q);
        prop_assert!((0.0..1.0).contains(&g));
        prop_assert!(gmi_rate(g, snr).unwrap() <= capacity(snr).unwrap() + 1e-12);
    }

    #[test]
    fn coefficients_satisfy_cauchy_schwarz(q in quantizer()) {
        // A^2 <= B is gamma >= 0
        let (a, b) = (coeff_a(&q), coeff_b(&q));
        prop_assert!(a > 0.0 && b > 0.0);
        prop_assert!(a * a <= b * (1.0 + 1e-12));
    }

    #[test]
    fn optimal_loading_beats_any_other(e in 1u32..7, l in 0.5f64..7.0, snr_db in -10.0f64..40.0) {
        let k = 1usize << e;
        let snr = 10f64.powf(snr_db / 10.0);
        let star = rate_optimal_loading(k, &Tolerance::default()).unwrap();
        let best = gmi_rate(gamma_uniform(&UniformSpec::from_loading(k, star).unwrap()), snr).unwrap();
        let other = gmi_rate(gamma_uniform(&UniformSpec::from_loading(k, l).unwrap()), snr).unwrap();
        prop_assert!(best >= other - 1e-12);
    }

    #[test]
    fn gamma_bar_bounds_the_large_k_gamma(l in 1.0f64..5.0) {
        // granular error only adds to the overload-only limit
        let g = gamma_uniform(&UniformSpec::from_loading(1 << 12, l).unwrap());
        prop_assert!(g >= gamma_bar(l).unwrap() - 1e-15);
    }
}

#[test]
fn finer_quantizers_lower_optimal_gamma() {
    let tol = Tolerance::default();
    let gammas: Vec<f64> = (2..=10)
        .map(|b| optimal_loading(1 << (b - 1), &tol).unwrap().gamma_at_star)
        .collect();
    assert!(gammas.windows(2).all(|w| w[1] < w[0]));
    // each extra bit buys roughly a factor of four
    let last = gammas[gammas.len() - 1] / gammas[gammas.len() - 2];
    assert!(last > 0.2 && last < 0.3, "{last}");
}
