use gaitbrac::eval::{auc, confusion_matrix, fpr_at_fixed_tpr, roc_curve, trapezoid_area};
use gaitbrac::models::{train_lasso, LassoParams};
use proptest::prelude::*;

fn scored() -> impl Strategy<Value = (Vec<f64>, Vec<bool>)> {
    (3usize..40).prop_flat_map(|n| {
        (
            prop::collection::vec(prop_oneof![(0u8..8).prop_map(|v| v as f64 / 4.0), -10.0f64..10.0], n),
            prop::collection::vec(any::<bool>(), n).prop_map(|mut l| {
                l[0] = true;
                l[1] = false;
                l
            }),
        )
    })
}

proptest! {
    #[test]
    fn auc_of_negated_scores_is_complement((s, l) in scored()) {
        let neg: Vec<f64> = s.iter().map(|v| -v).collect();
        let sum = auc(&s, &l).unwrap() + auc(&neg, &l).unwrap();
        prop_assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn auc_ignores_monotone_transforms((s, l) in scored()) {
        let t: Vec<f64> = s.iter().map(|v| (v / 3.0).exp() * 2.0 + 7.0).collect();
        prop_assert_eq!(auc(&s, &l).unwrap(), auc(&t, &l).unwrap());
    }

    #[test]
    fn auc_equals_roc_area((s, l) in scored()) {
        let area = trapezoid_area(&roc_curve(&s, &l).unwrap());
        prop_assert!((area - auc(&s, &l).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn roc_runs_corner_to_corner((s, l) in scored()) {
        let roc = roc_curve(&s, &l).unwrap();
        let first = roc.first().unwrap();
        let last = roc.last().unwrap();
        prop_assert_eq!((first.fpr, first.tpr), (0.0, 0.0));
        prop_assert_eq!((last.fpr, last.tpr), (1.0, 1.0));
        for w in roc.windows(2) {
            prop_assert!(w[1].fpr >= w[0].fpr && w[1].tpr >= w[0].tpr);
            prop_assert!(w[1].threshold < w[0].threshold);
        }
    }

    #[test]
    fn confusion_cells_cover_every_row((s, l) in scored(), cutoff in -10.0f64..10.0) {
        let c = confusion_matrix(&s, &l, cutoff).unwrap();
        prop_assert_eq!(c.total(), s.len());
        prop_assert_eq!(c.tp + c.fn_, l.iter().filter(|&&x| x).count());
    }

    #[test]
    fn fpr_grows_with_target_tpr((s, l) in scored(), a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(fpr_at_fixed_tpr(&s, &l, lo).unwrap() <= fpr_at_fixed_tpr(&s, &l, hi).unwrap());
    }
}

#[test]
fn lasso_path_shrinks_the_l1_norm() {
    let x: Vec<Vec<f64>> = (0..40)
        .map(|i| {
            let t = i as f64;
            vec![(t * 0.37).sin(), (t * 0.11).cos() * 2.0, t / 40.0, ((t * 1.7).sin() * 3.0).round()]
        })
        .collect();
    let y: Vec<f64> = x.iter().map(|r| 4.0 * r[0] - 2.0 * r[1] + 0.5 * r[3] + 1.0).collect();
    let norms: Vec<f64> = [0.01, 0.1, 1.0]
        .into_iter()
        .map(|alpha| {
            let fit = train_lasso(&x, &y, LassoParams { alpha, tol: 1e-10, max_sweeps: 100_000 }).unwrap();
            assert!(fit.converged);
            fit.weights.iter().map(|w| w.abs()).sum()
        })
        .collect();
    assert!(norms[0] > norms[1] && norms[1] > norms[2], "{norms:?}");

    let huge = train_lasso(&x, &y, LassoParams { alpha: 1e6, ..LassoParams::default() }).unwrap();
    assert!(huge.weights.iter().all(|&w| w == 0.0));
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    assert!((huge.intercept - mean).abs() < 1e-12);
}
