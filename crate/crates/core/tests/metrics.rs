use ufscov_core::lab::{gen_redundant, lab_rng, RedundancySpec};
use ufscov_core::metrics::{evaluate, kappa, knn_eval, knn_predict, overall_accuracy, KnnParams, LabelVector};
use ufscov_core::{Dataset, FeatureSet, PointCloud};

use rand_distr::{Distribution, StandardNormal};

fn lv(s: &[&str]) -> LabelVector {
    LabelVector::new(s.iter().copied()).unwrap()
}

fn chars(s: &str) -> LabelVector {
    LabelVector::new(s.chars().map(String::from)).unwrap()
}

// Expected values computed with sklearn.metrics.
#[test]
fn reference_kappa_values() {
    let cases: [(LabelVector, LabelVector, f64, f64); 4] = [
        (chars("AABB"), chars("ABAB"), 0.5, 0.0),
        (chars("aabbbcc"), chars("abbbcca"), 0.5714285714285714, 0.34375),
        (
            lv(&["1", "1", "0", "0", "0", "2", "2", "2", "2"]),
            lv(&["1", "0", "0", "0", "2", "2", "2", "1", "2"]),
            0.6666666666666666,
            0.4807692307692307,
        ),
        (chars("xxxxy"), chars("xxxyy"), 0.8, 0.5454545454545454),
    ];
    for (t, p, oa, k) in &cases {
        assert!((overall_accuracy(t, p).unwrap() - oa).abs() < 1e-12);
        assert!((kappa(t, p).unwrap() - k).abs() < 1e-12);
    }
}

#[test]
fn perfect_agreement() {
    let t = chars("abcabc");
    let r = evaluate(&t, &t).unwrap();
    assert_eq!(r.overall_accuracy, 1.0);
    assert_eq!(r.kappa, 1.0);
    assert_eq!(r.per_class_counts.len(), 3);
    assert!(r.per_class_counts.iter().all(|c| c.truth == 2 && c.correct == 2));
}

#[test]
fn one_nearest_neighbour_reproduces_training_labels() {
    let d = gen_redundant(60, &RedundancySpec::independent(2, 4)).unwrap();
    let cloud = PointCloud::from_columns(d.columns()).unwrap();
    let labels: Vec<String> = (0..60).map(|i| format!("c{}", i % 3)).collect();
    assert_eq!(knn_predict(&cloud, &labels, &cloud, 1), labels);
}

#[test]
fn separable_clusters_are_classified_perfectly() {
    let mut rng = lab_rng(8);
    let (mut x, mut y, mut labels) = (Vec::new(), Vec::new(), Vec::new());
    for (cls, (cx, cy)) in [("a", (0.2, 0.2)), ("b", (0.8, 0.8)), ("c", (0.2, 0.8))] {
        for _ in 0..40 {
            let dx: f64 = StandardNormal.sample(&mut rng);
            let dy: f64 = StandardNormal.sample(&mut rng);
            x.push(cx + 0.03 * dx);
            y.push(cy + 0.03 * dy);
            labels.push(cls);
        }
    }
    let d = Dataset::new(vec!["x".into(), "y".into()], vec![x, y]).unwrap();
    let labels = lv(&labels);
    let s = knn_eval(&d, &labels, &d.all_features(), &KnnParams::default()).unwrap();
    assert_eq!(s.runs.len(), 20);
    assert_eq!(s.oa_mean, 1.0);
    assert_eq!(s.kappa_mean, 1.0);
    assert_eq!(s.oa_sd, 0.0);
    // stratified: 8 test rows per class
    assert_eq!(s.runs[0].n_test, 24);

    let again = knn_eval(&d, &labels, &FeatureSet::new(vec![0, 1]).unwrap(), &KnnParams::default()).unwrap();
    assert_eq!(s, again);
}

#[test]
fn length_mismatch_is_rejected() {
    assert!(overall_accuracy(&chars("ab"), &chars("abc")).is_err());
}

/// Butterfly data labelled by a rule on the informative features only.
fn labelled_butterfly(seed: u64) -> (Dataset, LabelVector) {
    let d = gen_redundant(1000, &RedundancySpec::butterfly(seed)).unwrap();
    let c = d.columns();
    let labels = (0..d.n_rows()).map(|i| {
        let a = usize::from(c[0][i] > 0.5);
        let b = usize::from(c[1][i] + c[2][i] > 1.0);
        format!("c{}", 2 * a + b)
    });
    let labels = LabelVector::new(labels).unwrap();
    (d, labels)
}

#[test]
fn selected_features_classify_as_well_as_all() {
    use ufscov_core::{argmin_prefix, rescale_unit, sfs, Engine};
    let (d, labels) = labelled_butterfly(5);
    let (d, _) = rescale_unit(&d);
    let trace = sfs(&d, Engine::Auto).unwrap();
    let params = KnnParams::default();
    let selected = knn_eval(&d, &labels, &argmin_prefix(&trace), &params).unwrap();
    let all = knn_eval(&d, &labels, &d.all_features(), &params).unwrap();
    assert!((selected.oa_mean - all.oa_mean).abs() < 0.05, "{} vs {}", selected.oa_mean, all.oa_mean);

    let curve = ufscov_core::metrics::stepwise_eval(&trace, &d, &labels, &params).unwrap();
    assert_eq!(curve.len(), 8);
    assert!((curve[2].oa_mean - curve[7].oa_mean).abs() < 0.05);
}
