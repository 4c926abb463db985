use gaitbrac_web::{roc_view, walk_view};

#[test]
fn walk_view_shows_slower_cadence_after_drinking() {
    let v = walk_view(2.0, 430.0, 7, "Phone").unwrap();
    assert_eq!(v.before().len(), 400);
    assert_eq!(v.freqs().len(), 200);
    assert!((v.peak_before() - 2.0).abs() <= 0.125);
    assert!((v.peak_after() - 1.5).abs() <= 0.125);
}

#[test]
fn walk_view_rejects_bad_input() {
    assert!(walk_view(2.0, 100.0, 1, "Ring").is_err());
    assert!(walk_view(5.0, 100.0, 1, "Phone").is_err());
}

#[test]
fn roc_view_on_small_cohort() {
    let r = roc_view(12, 3, 240, "dt", "Phone").unwrap();
    assert_eq!(r.scores().len(), 12);
    assert_eq!(r.fpr().first(), Some(&0.0));
    assert_eq!(r.tpr().last(), Some(&1.0));
    assert!((0.0..=1.0).contains(&r.auc()));
    assert!(roc_view(12, 3, 300, "dt", "all").is_err());
    assert!(roc_view(12, 3, 240, "lasso", "all").is_err());
}
