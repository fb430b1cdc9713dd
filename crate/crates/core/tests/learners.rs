use proptest::prelude::*;
use shallow_art::learners::linear::{fit_svm_traced, svm_objective, LinearModel};
use shallow_art::learners::{self, AttributeMatrix, LearnerConfig, LearnerKind, Task, TrainingMatrix};
use shallow_art::Pcg32;

fn arb_problem(max_value: u8) -> impl Strategy<Value = (Vec<Vec<u8>>, Vec<u8>)> {
    (1usize..12, 1usize..6).prop_flat_map(move |(n, d)| {
        (
            prop::collection::vec(prop::collection::vec(0..=max_value, d), n),
            prop::collection::vec(any::<u8>(), n),
        )
    })
}

proptest! {
    #[test]
    fn fit_is_reproducible((rows, t) in arb_problem(3), seed in any::<u64>()) {
        let x = AttributeMatrix::from_rows(&rows).unwrap();
        let y: Vec<f64> = t.iter().map(|v| f64::from(v & 1)).collect();
        for kind in LearnerKind::ALL {
            let cfg = LearnerConfig::classifier(kind);
            let a = learners::fit(&cfg, TrainingMatrix::new(&x, &y).unwrap(), seed).unwrap();
            let b = learners::fit(&cfg, TrainingMatrix::new(&x, &y).unwrap(), seed).unwrap();
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn regression_predictions_in_range((rows, t) in arb_problem(255), probe in prop::collection::vec(any::<u8>(), 5), seed in any::<u64>()) {
        let x = AttributeMatrix::from_rows(&rows).unwrap();
        let y: Vec<f64> = t.iter().map(|&v| f64::from(v)).collect();
        let probe = &probe[..x.cols()];
        for kind in [LearnerKind::DecisionTree, LearnerKind::RandomForest] {
            let cfg = LearnerConfig::new(kind, Task::Regression);
            let m = learners::fit(&cfg, TrainingMatrix::new(&x, &y).unwrap(), seed).unwrap();
            let p = m.predict(probe).unwrap();
            prop_assert!((0.0..=255.0).contains(&p));
        }
    }

    #[test]
    fn classifiers_predict_a_class((rows, t) in arb_problem(255), probe in prop::collection::vec(any::<u8>(), 5), seed in any::<u64>()) {
        let x = AttributeMatrix::from_rows(&rows).unwrap();
        let y: Vec<f64> = t.iter().map(|v| f64::from(v & 1)).collect();
        let probe = &probe[..x.cols()];
        for kind in LearnerKind::ALL {
            let m = learners::fit(&LearnerConfig::classifier(kind), TrainingMatrix::new(&x, &y).unwrap(), seed).unwrap();
            let p = m.predict(probe).unwrap();
            prop_assert!(p == 0.0 || p == 1.0);
        }
    }
}

/// Descent is asserted where the Pegasos suboptimality scale R^2 / (lambda T)
/// is at most 10; with fewer steps the 1/(lambda t) schedule may still be
/// overshooting on raw intensities.
#[test]
fn svm_objective_descends_on_fixed_instances() {
    let instances: Vec<(Vec<Vec<u8>>, Vec<f64>)> = vec![
        (
            vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]],
            vec![0.0, 0.0, 0.0, 1.0],
        ),
        (
            vec![vec![0, 1], vec![1, 0], vec![1, 1], vec![0, 0]],
            vec![0.0, 1.0, 1.0, 0.0],
        ),
        (
            (0..20u8).map(|i| vec![i, 20 - i, i % 3]).collect(),
            (0..20).map(|i| f64::from(u8::from(i >= 10))).collect(),
        ),
        (vec![vec![200, 3], vec![10, 250], vec![120, 120]], vec![1.0, 0.0, 1.0]),
    ];
    let mut checked = 0;
    for (i, (rows, y)) in instances.iter().enumerate() {
        let x = AttributeMatrix::from_rows(rows).unwrap();
        let r_sq = rows
            .iter()
            .map(|r| 1.0 + r.iter().map(|&v| f64::from(v).powi(2)).sum::<f64>())
            .fold(0.0, f64::max);
        for lambda in [1e-4, 0.05, 0.1, 0.5, 1.0] {
            for epochs in [5u32, 50] {
                let (model, trace) = fit_svm_traced(&x, y, lambda, epochs, &mut Pcg32::from_seed(i as u64));
                assert_eq!(
                    trace.initial_objective,
                    svm_objective(&LinearModel::zeros(x.cols()), &x, y, lambda)
                );
                assert_eq!(model.weights.len(), x.cols());
                let steps = f64::from(epochs) * rows.len() as f64;
                if r_sq / (lambda * steps) > 10.0 {
                    continue;
                }
                assert!(
                    trace.last_epoch_mean_objective <= trace.initial_objective,
                    "instance {i}, lambda {lambda}, epochs {epochs}: {} > {}",
                    trace.last_epoch_mean_objective,
                    trace.initial_objective
                );
                checked += 1;
            }
        }
    }
    assert!(checked >= 20, "only {checked} combinations in range");
}

#[test]
fn stump_example() {
    let x = AttributeMatrix::from_rows(&[vec![0u8], vec![1]]).unwrap();
    let y = [0.0, 1.0];
    let m = learners::fit(
        &LearnerConfig::classifier(LearnerKind::DecisionTree),
        TrainingMatrix::new(&x, &y).unwrap(),
        0,
    )
    .unwrap();
    assert_eq!(m.predict(&[0]).unwrap(), 0.0);
    assert_eq!(m.predict(&[1]).unwrap(), 1.0);
    match m {
        learners::LearnerModel::Tree(t) => {
            assert_eq!(t.depth(), 1);
            assert!(matches!(t.nodes()[0], learners::Node::Split { feature: 0, threshold, .. } if threshold == 0.5));
        }
        other => panic!("expected a tree, got {other:?}"),
    }
}

#[test]
fn linear_learners_reject_regression() {
    for kind in [LearnerKind::Perceptron, LearnerKind::LinearSvm] {
        assert!(LearnerConfig::new(kind, Task::Regression).validate().is_err());
    }
}
