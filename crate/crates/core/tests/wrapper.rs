use proptest::prelude::*;
use shallow_art::learners::{self, AttributeMatrix, TrainingMatrix};
use shallow_art::wrapper::{wm_complete, wm_fit, wm_load, wm_predict, wm_save};
use shallow_art::{
    flatten_split, left_half, mix64, Dataset, Error, Family, GeneratorConfig, Image, ImageSpec, LearnerConfig,
    LearnerKind, Seed, Task,
};

fn lines_dataset(n: u64) -> (ImageSpec, Vec<Image>) {
    let spec = ImageSpec::bw(8, 8).unwrap();
    let cfg = GeneratorConfig::new(Family::HorizontalLines)
        .with_spec(spec)
        .with_count(3);
    (spec, (0..n).map(|i| cfg.generate(Seed(17), i).unwrap()).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn completion_preserves_left_half(left in prop::collection::vec(0u8..=1, 32), kind in prop::sample::select(LearnerKind::ALL.to_vec())) {
        let (spec, imgs) = lines_dataset(10);
        let ds = Dataset::from_train_images(spec, &imgs).unwrap();
        let (wm, _) = wm_fit(&ds, &LearnerConfig::classifier(kind), 4, 1).unwrap();
        let left = Image::from_pixels(spec.half(), left).unwrap();
        let out = wm_complete(&wm, &left).unwrap();
        prop_assert_eq!(left_half(&out).unwrap(), left);
    }

    #[test]
    fn determinism_over_seeds(base in any::<u64>()) {
        let (spec, imgs) = lines_dataset(6);
        let ds = Dataset::from_train_images(spec, &imgs).unwrap();
        let cfg = LearnerConfig::classifier(LearnerKind::RandomForest);
        let a = wm_save(&wm_fit(&ds, &cfg, base, 1).unwrap().0);
        let b = wm_save(&wm_fit(&ds, &cfg, base, 3).unwrap().0);
        prop_assert_eq!(a, b);
    }
}

#[test]
fn per_output_isolation() {
    // Model i depends only on the attributes and label column i.
    let (spec, imgs) = lines_dataset(12);
    let ds = Dataset::from_train_images(spec, &imgs).unwrap();
    let cfg = LearnerConfig::classifier(LearnerKind::RandomForest);
    let (wm, _) = wm_fit(&ds, &cfg, 21, 2).unwrap();
    let samples: Vec<_> = imgs.iter().map(|i| flatten_split(i).unwrap()).collect();
    let x = AttributeMatrix::from_rows(&samples.iter().map(|s| s.attributes.clone()).collect::<Vec<_>>()).unwrap();
    for i in [0, 5, 31] {
        let y: Vec<f64> = samples.iter().map(|s| f64::from(s.labels[i])).collect();
        let alone = learners::fit(&cfg, TrainingMatrix::new(&x, &y).unwrap(), mix64(21, i as u64)).unwrap();
        assert_eq!(wm.models()[i], alone);
    }
}

#[test]
fn training_images_are_reconstructed() {
    let (spec, imgs) = lines_dataset(15);
    let ds = Dataset::from_train_images(spec, &imgs).unwrap();
    let (wm, _) = wm_fit(&ds, &LearnerConfig::classifier(LearnerKind::DecisionTree), 0, 1).unwrap();
    for img in &imgs {
        assert_eq!(&wm_complete(&wm, &left_half(img).unwrap()).unwrap(), img);
    }
}

#[test]
fn known_rows_predicted_exactly() {
    let spec = ImageSpec::bw(16, 16).unwrap();
    let cfg = GeneratorConfig::new(Family::HorizontalLines)
        .with_spec(spec)
        .with_count(4);
    let imgs: Vec<Image> = (0..60).map(|i| cfg.generate(Seed(8), i).unwrap()).collect();
    let ds = Dataset::from_train_images(spec, &imgs).unwrap();
    let (wm, _) = wm_fit(&ds, &LearnerConfig::classifier(LearnerKind::DecisionTree), 0, 1).unwrap();
    let mut left = Image::white(spec.half());
    for y in [3, 9] {
        for x in 0..8 {
            left.set_pixel(x, y, &[1]);
        }
    }
    let labels = wm_predict(&wm, left.pixels()).unwrap();
    for (i, v) in labels.iter().enumerate() {
        let row = i / 8;
        assert_eq!(*v, f64::from(u8::from(row == 3 || row == 9)), "label {i}");
    }
}

#[test]
fn rgb_completion_in_range() {
    let spec = ImageSpec::rgb(8, 8).unwrap();
    let cfg = GeneratorConfig::new(Family::TriangleColor).with_spec(spec);
    let imgs: Vec<Image> = (0..10).map(|i| cfg.generate(Seed(2), i).unwrap()).collect();
    let ds = Dataset::from_train_images(spec, &imgs).unwrap();
    let learner = LearnerConfig::new(LearnerKind::RandomForest, Task::Regression);
    let (wm, _) = wm_fit(&ds, &learner, 0, 1).unwrap();
    let probe = Image::from_pixels(spec.half(), (0..96).map(|v| (v * 37 % 256) as u8).collect()).unwrap();
    let out = wm_complete(&wm, &probe).unwrap();
    assert_eq!(out.spec(), spec);
    assert!(wm_predict(&wm, probe.pixels())
        .unwrap()
        .iter()
        .all(|v| (0.0..=255.0).contains(v)));
}

#[test]
fn container_errors_are_distinct() {
    let (spec, imgs) = lines_dataset(4);
    let ds = Dataset::from_train_images(spec, &imgs).unwrap();
    let (wm, _) = wm_fit(&ds, &LearnerConfig::classifier(LearnerKind::Perceptron), 0, 1).unwrap();
    let bytes = wm_save(&wm);
    assert_eq!(wm_load(&bytes).unwrap(), wm);
    let mut bad = bytes.clone();
    bad[0] = b'X';
    assert!(matches!(wm_load(&bad), Err(Error::BadMagic)));
    let mut future = bytes.clone();
    future[4..8].copy_from_slice(&99u32.to_le_bytes());
    assert!(matches!(wm_load(&future), Err(Error::UnsupportedVersion { .. })));
    assert!(matches!(wm_load(&bytes[..bytes.len() - 3]), Err(Error::Truncated(_))));
}
