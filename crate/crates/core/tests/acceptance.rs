//! End-to-end acceptance checks. Each test prints one `[PASS]`/`[FAIL]`
//! line with the measured value next to its threshold.
//!
//! Run with `cargo test -p shallow-art --test acceptance -- --nocapture`.
//! The full-resolution smoke run (criterion 10) only executes when
//! `SHALLOW_ART_FULL_SCALE=1` is set.

use shallow_art::dataset::{flatten_split, left_half, load_image, save_image, Dataset, Partition};
use shallow_art::imagegen::{Family, GeneratorConfig};
use shallow_art::learners::linear::fit_perceptron;
use shallow_art::learners::tree::root_split;
use shallow_art::learners::{self, AttributeMatrix, LearnerConfig, LearnerKind, Task, TrainingMatrix};
use shallow_art::metrics::{pixel_accuracy, region_mean, right_corner_patches};
use shallow_art::rng::{mix64, Pcg32, Seed};
use shallow_art::{assemble, Image, ImageSpec, WrapperModel};

fn report(id: &str, pass: bool, detail: String) {
    println!("[{}] criterion {id}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {id} failed: {detail}");
}

fn corpus(cfg: &GeneratorConfig, seed: u64, range: std::ops::Range<u64>) -> Vec<Image> {
    range.map(|i| cfg.generate(Seed(seed), i).unwrap()).collect()
}

/// Train on `train`, keep `test` in the test partition, return the model
/// and the held-out images.
fn split_dataset(spec: ImageSpec, train: &[Image], test: &[Image]) -> Dataset {
    let mut ds = Dataset::new(spec).unwrap();
    for img in train {
        ds.push(img, Partition::Train).unwrap();
    }
    for img in test {
        // Duplicates of training images are rejected, which keeps the sets disjoint.
        ds.push(img, Partition::Test).unwrap();
    }
    ds
}

fn mean_heldout_accuracy(wm: &WrapperModel, test: &[Image]) -> f64 {
    let total: f64 = test
        .iter()
        .map(|img| {
            let completed = wm.complete(&left_half(img).unwrap()).unwrap();
            pixel_accuracy(&completed, img).unwrap()
        })
        .sum();
    total / test.len() as f64
}

#[test]
fn c01_horizontal_line_reconstruction() {
    let spec = ImageSpec::bw(64, 64).unwrap();
    let cfg = GeneratorConfig::new(Family::HorizontalLines)
        .with_spec(spec)
        .with_count(20);
    let train = corpus(&cfg, 2024, 0..50);
    let test = corpus(&cfg, 2024, 1000..1010);
    let ds = split_dataset(spec, &train, &test);
    for kind in [LearnerKind::DecisionTree, LearnerKind::RandomForest] {
        let (wm, _) = WrapperModel::fit(&ds, &LearnerConfig::classifier(kind), 7, 1).unwrap();
        let acc = mean_heldout_accuracy(&wm, &test);
        report(
            "1",
            acc >= 0.99,
            format!("{kind} WM held-out accuracy {acc:.4} (>= 0.99)"),
        );
    }
}

#[test]
fn c02_mirrored_halves() {
    let spec = ImageSpec::bw(64, 64).unwrap();
    let mirrored = |seed: u64| {
        let mut rng = Pcg32::from_seed(seed);
        let mut img = Image::white(spec);
        for y in 0..64 {
            for x in 0..32 {
                let v = [rng.below(2) as u8];
                img.set_pixel(x, y, &v);
                img.set_pixel(63 - x, y, &v);
            }
        }
        img
    };
    let train: Vec<Image> = (0..50).map(|i| mirrored(mix64(5, i))).collect();
    let test: Vec<Image> = (100..110).map(|i| mirrored(mix64(5, i))).collect();
    let ds = split_dataset(spec, &train, &test);
    let cfg = LearnerConfig::classifier(LearnerKind::DecisionTree);
    let (wm, _) = WrapperModel::fit(&ds, &cfg, 1, 1).unwrap();
    let acc = mean_heldout_accuracy(&wm, &test);
    report(
        "2",
        acc >= 0.99,
        format!("mirrored tree WM held-out accuracy {acc:.4} (>= 0.99)"),
    );
}

fn random_bw(spec: ImageSpec, rng: &mut Pcg32) -> Image {
    let pixels = (0..spec.pixel_count()).map(|_| rng.below(2) as u8).collect();
    Image::from_pixels(spec, pixels).unwrap()
}

#[test]
fn c03_wrapper_independence() {
    let spec = ImageSpec::bw(4, 4).unwrap();
    let mut rng = Pcg32::from_seed(33);
    let mut images: Vec<Image> = Vec::new();
    while images.len() < 8 {
        let img = random_bw(spec, &mut rng);
        if !images.contains(&img) {
            images.push(img);
        }
    }
    let ds = Dataset::from_train_images(spec, &images).unwrap();
    let samples: Vec<_> = images.iter().map(|i| flatten_split(i).unwrap()).collect();
    let x = AttributeMatrix::from_rows(&samples.iter().map(|s| s.attributes.clone()).collect::<Vec<_>>()).unwrap();
    let inputs: Vec<Vec<u8>> = (0..256u32)
        .map(|v| (0..8).map(|b| ((v >> b) & 1) as u8).collect())
        .collect();
    let base_seed = 99;
    let mut mismatches = 0;
    for kind in LearnerKind::ALL {
        let cfg = LearnerConfig::classifier(kind);
        let (wm, _) = WrapperModel::fit(&ds, &cfg, base_seed, 2).unwrap();
        for i in 0..8 {
            let y: Vec<f64> = samples.iter().map(|s| f64::from(s.labels[i])).collect();
            let alone = learners::fit(&cfg, TrainingMatrix::new(&x, &y).unwrap(), mix64(base_seed, i as u64)).unwrap();
            for input in &inputs {
                let a = wm.models()[i].predict(input).unwrap();
                let b = alone.predict(input).unwrap();
                if a.to_bits() != b.to_bits() {
                    mismatches += 1;
                }
            }
        }
    }
    report(
        "3",
        mismatches == 0,
        format!("{mismatches} mismatching predictions over 4 kinds x 8 outputs x 256 inputs (== 0)"),
    );
}

#[test]
fn c04_schedule_determinism() {
    let spec = ImageSpec::bw(16, 16).unwrap();
    let cfg = GeneratorConfig::new(Family::HorizontalLines)
        .with_spec(spec)
        .with_count(5);
    let images = corpus(&cfg, 4, 0..20);
    let ds = Dataset::from_train_images(spec, &images).unwrap();
    for kind in LearnerKind::ALL {
        let learner = LearnerConfig::classifier(kind);
        let bytes: Vec<Vec<u8>> = [1usize, 2, 8]
            .iter()
            .map(|&w| WrapperModel::fit(&ds, &learner, 12345, w).unwrap().0.to_bytes())
            .collect();
        let same = bytes.windows(2).all(|w| w[0] == w[1]);
        report("4", same, format!("{kind} WM bytes identical for workers 1, 2, 8"));
    }
}

/// Weighted impurity decrease of `x[f] <= t`, computed from scratch.
fn split_gain(rows: &[Vec<u8>], y: &[f64], f: usize, t: f64, task: Task) -> Option<f64> {
    let imp = |ys: &[f64]| -> f64 {
        let n = ys.len() as f64;
        match task {
            Task::Classification => {
                let p = ys.iter().filter(|&&v| v == 1.0).count() as f64 / n;
                1.0 - p * p - (1.0 - p) * (1.0 - p)
            }
            Task::Regression => {
                let m = ys.iter().sum::<f64>() / n;
                ys.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n
            }
        }
    };
    let (l, r): (Vec<usize>, Vec<usize>) = (0..rows.len()).partition(|&i| f64::from(rows[i][f]) <= t);
    if l.is_empty() || r.is_empty() {
        return None;
    }
    let ly: Vec<f64> = l.iter().map(|&i| y[i]).collect();
    let ry: Vec<f64> = r.iter().map(|&i| y[i]).collect();
    let n = y.len() as f64;
    Some(imp(y) - ly.len() as f64 / n * imp(&ly) - ry.len() as f64 / n * imp(&ry))
}

/// Best gain over every feature and every integer threshold 0..=255.
fn exhaustive_best(rows: &[Vec<u8>], y: &[f64], task: Task) -> Option<f64> {
    let d = rows[0].len();
    let mut best: Option<f64> = None;
    for f in 0..d {
        for t in 0..=255u32 {
            if let Some(g) = split_gain(rows, y, f, f64::from(t), task) {
                best = Some(best.map_or(g, |b: f64| b.max(g)));
            }
        }
    }
    best
}

#[test]
fn c05_tree_oracle_equivalence() {
    let mut rng = Pcg32::from_seed(555);
    let mut worst_gap = 0.0f64;
    let mut training_errors = 0;
    let mut fits = 0;
    for case in 0..200 {
        let n = 2 + rng.below_usize(15);
        let d = 1 + rng.below_usize(4);
        let vmax = 1 + rng.below(4);
        let task = if case % 2 == 0 {
            Task::Classification
        } else {
            Task::Regression
        };
        let rows: Vec<Vec<u8>> = (0..n)
            .map(|_| (0..d).map(|_| rng.below(vmax + 1) as u8).collect())
            .collect();
        // Targets are a function of the row, so identical rows never conflict.
        let table: Vec<f64> = (0..256)
            .map(|_| match task {
                Task::Classification => f64::from(rng.below(2)),
                Task::Regression => f64::from(rng.below(256)),
            })
            .collect();
        let key = |r: &[u8]| r.iter().fold(0usize, |k, &v| k * 5 + v as usize) % 256;
        let y: Vec<f64> = rows.iter().map(|r| table[key(r)]).collect();
        let x = AttributeMatrix::from_rows(&rows).unwrap();
        let greedy = root_split(&x, &y, task).map(|s| s.gain);
        let oracle = exhaustive_best(&rows, &y, task);
        match (greedy, oracle) {
            (Some(g), Some(o)) => worst_gap = worst_gap.max((g - o).abs() / o.abs().max(1.0)),
            (None, None) => {}
            _ => worst_gap = f64::INFINITY,
        }
        let cfg = LearnerConfig::new(LearnerKind::DecisionTree, task);
        let model = learners::fit(&cfg, TrainingMatrix::new(&x, &y).unwrap(), case).unwrap();
        fits += 1;
        training_errors += rows
            .iter()
            .zip(&y)
            .filter(|(r, &t)| model.predict(r).unwrap() != t)
            .count();
    }
    report(
        "5",
        worst_gap <= 1e-9,
        format!("max relative gap greedy vs exhaustive root gain {worst_gap:.3e} over 200 datasets (<= 1e-9)"),
    );
    report(
        "5",
        training_errors == 0,
        format!("{training_errors} training errors over {fits} uncapped trees (== 0)"),
    );
}

#[test]
fn c06_perceptron_convergence() {
    let mut rng = Pcg32::from_seed(606);
    let mut violations = Vec::new();
    let mut instances = 0;
    while instances < 100 {
        let n = 1 + rng.below_usize(20);
        let d = 1 + rng.below_usize(5);
        // Separator u = (w, b) over augmented inputs (x, 1).
        let w: Vec<f64> = (0..d).map(|_| rng.next_f64() * 2.0 - 1.0).collect();
        let b = (rng.next_f64() * 2.0 - 1.0) * 5.0;
        let u_norm = (w.iter().map(|v| v * v).sum::<f64>() + b * b).sqrt();
        let mut rows = Vec::new();
        let mut y = Vec::new();
        let mut gamma = f64::INFINITY;
        let mut r_sq = 0.0f64;
        let mut attempts = 0;
        while rows.len() < n && attempts < 10_000 {
            attempts += 1;
            let x: Vec<u8> = (0..d).map(|_| rng.below(11) as u8).collect();
            let act = b + w.iter().zip(&x).map(|(wi, &xi)| wi * f64::from(xi)).sum::<f64>();
            let margin = act.abs() / u_norm;
            if margin < 0.05 {
                continue;
            }
            gamma = gamma.min(margin);
            r_sq = r_sq.max(1.0 + x.iter().map(|&v| f64::from(v).powi(2)).sum::<f64>());
            y.push(if act > 0.0 { 1.0 } else { 0.0 });
            rows.push(x);
        }
        if rows.len() < n {
            continue;
        }
        instances += 1;
        let bound = (r_sq / (gamma * gamma)).ceil() as usize;
        let x = AttributeMatrix::from_rows(&rows).unwrap();
        let (model, trace) = fit_perceptron(&x, &y, u32::try_from(bound + 1).unwrap_or(u32::MAX));
        let errors = rows.iter().zip(&y).filter(|(r, &t)| model.classify(r) != t).count();
        if errors != 0 || trace.updates > bound {
            violations.push((instances, errors, trace.updates, bound));
        }
    }
    report(
        "6",
        violations.is_empty(),
        format!(
            "{} of 100 separable instances missed zero error within ceil((R/gamma)^2) updates (== 0)",
            violations.len()
        ),
    );
}

#[test]
fn c07_white_fringe() {
    let spec = ImageSpec::rgb(64, 64).unwrap();
    let cfg = GeneratorConfig::new(Family::TriangleColor).with_spec(spec);
    let train = corpus(&cfg, 77, 0..200);
    let test = corpus(&cfg, 77, 5000..5010);
    let ds = split_dataset(spec, &train, &test);
    let learner = LearnerConfig::new(LearnerKind::DecisionTree, Task::Regression);
    let (wm, report_) = WrapperModel::fit(&ds, &learner, 3, 1).unwrap();
    let patches = right_corner_patches(64, 64, 8);
    let mut sum = 0.0;
    let mut count = 0usize;
    for img in &test {
        let completed = wm.complete(&left_half(img).unwrap()).unwrap();
        for rect in patches {
            for v in region_mean(&completed, rect).unwrap() {
                sum += v;
                count += 1;
            }
        }
    }
    let mean = sum / count as f64;
    report(
        "7",
        mean >= 240.0,
        format!(
            "regression-tree WM corner-patch mean {mean:.2} (>= 240), trained in {:.1}s",
            report_.total_secs
        ),
    );
}

#[test]
fn c08_count_contracts() {
    let bw = flatten_split(&Image::white(ImageSpec::BW_DEFAULT)).unwrap();
    let rgb = flatten_split(&Image::white(ImageSpec::RGB_DEFAULT)).unwrap();
    report(
        "8",
        (bw.attributes.len(), bw.labels.len()) == (31_250, 31_250),
        format!(
            "250x250 BW split {}/{} (31250/31250)",
            bw.attributes.len(),
            bw.labels.len()
        ),
    );
    report(
        "8",
        (rgb.attributes.len(), rgb.labels.len()) == (60_000, 60_000),
        format!(
            "200x200 RGB split {}/{} (60000/60000)",
            rgb.attributes.len(),
            rgb.labels.len()
        ),
    );

    let lines = GeneratorConfig::new(Family::HorizontalLines);
    let ds = Dataset::from_train_images(ImageSpec::BW_DEFAULT, &corpus(&lines, 8, 0..3)).unwrap();
    let (wm, rep) = WrapperModel::fit(&ds, &LearnerConfig::classifier(LearnerKind::DecisionTree), 8, 1).unwrap();
    report(
        "8",
        wm.len() == 31_250 && rep.outputs_trained == 31_250,
        format!("250x250 BW WM holds {} models (31250)", wm.len()),
    );

    let tri = GeneratorConfig::new(Family::TriangleColor);
    let ds = Dataset::from_train_images(ImageSpec::RGB_DEFAULT, &corpus(&tri, 8, 0..2)).unwrap();
    let learner = LearnerConfig::new(LearnerKind::DecisionTree, Task::Regression);
    let (wm, rep) = WrapperModel::fit(&ds, &learner, 8, 1).unwrap();
    report(
        "8",
        wm.len() == 60_000 && rep.outputs_trained == 60_000,
        format!("200x200 RGB WM holds {} models (60000)", wm.len()),
    );
}

#[test]
fn c09_round_trips() {
    // PNG identity over 100 generated images from every family.
    let mut png_failures = 0;
    for i in 0..100u64 {
        let family = Family::ALL[(i % 5) as usize];
        let spec = match family.encoding() {
            shallow_art::Encoding::Bw => ImageSpec::bw(40, 30).unwrap(),
            shallow_art::Encoding::Rgb => ImageSpec::rgb(40, 30).unwrap(),
        };
        let mut cfg = GeneratorConfig::new(family).with_spec(spec).with_count(6);
        cfg.diameter = 9.0;
        let img = cfg.generate(Seed(90), i).unwrap();
        let back = load_image(&save_image(&img).unwrap(), spec).unwrap();
        png_failures += usize::from(back != img);
    }
    report(
        "9",
        png_failures == 0,
        format!("{png_failures} PNG round-trip mismatches of 100 (== 0)"),
    );

    // Wrapper container identity on 100 random inputs, for every learner kind.
    let spec = ImageSpec::bw(8, 8).unwrap();
    let cfg = GeneratorConfig::new(Family::Circles).with_spec(spec).with_count(3);
    let mut gen = cfg;
    gen.diameter = 3.0;
    let ds = Dataset::from_train_images(spec, &corpus(&gen, 91, 0..12)).unwrap();
    let mut rng = Pcg32::from_seed(92);
    let inputs: Vec<Vec<u8>> = (0..100)
        .map(|_| (0..32).map(|_| rng.below(2) as u8).collect())
        .collect();
    let mut wm_failures = 0;
    for kind in LearnerKind::ALL {
        let (wm, _) = WrapperModel::fit(&ds, &LearnerConfig::classifier(kind), 5, 1).unwrap();
        let back = WrapperModel::from_bytes(&wm.to_bytes()).unwrap();
        for input in &inputs {
            let a = wm.predict(input).unwrap();
            let b = back.predict(input).unwrap();
            wm_failures += usize::from(a.iter().zip(&b).any(|(p, q)| p.to_bits() != q.to_bits()));
        }
    }
    report(
        "9",
        wm_failures == 0,
        format!("{wm_failures} WM save/load prediction mismatches of 400 (== 0)"),
    );

    // flatten/assemble identity on every family.
    let mut split_failures = 0;
    for family in Family::ALL {
        let cfg = GeneratorConfig::new(family);
        for i in 0..3 {
            let img = cfg.generate(Seed(93), i).unwrap();
            let s = flatten_split(&img).unwrap();
            let rebuilt = assemble(img.spec(), &left_half(&img).unwrap(), &s.labels).unwrap();
            split_failures += usize::from(rebuilt != img);
        }
    }
    report(
        "9",
        split_failures == 0,
        format!("{split_failures} flatten/assemble mismatches of 15 (== 0)"),
    );
}

#[test]
fn c10_full_scale_smoke() {
    if std::env::var("SHALLOW_ART_FULL_SCALE").ok().as_deref() != Some("1") {
        println!("[SKIP] criterion 10: set SHALLOW_ART_FULL_SCALE=1 to run the 250x250 pipeline");
        return;
    }
    let spec = ImageSpec::BW_DEFAULT;
    let cfg = GeneratorConfig::new(Family::HorizontalLines);
    let train = corpus(&cfg, 10, 0..50);
    let test = corpus(&cfg, 10, 1000..1010);
    let ds = split_dataset(spec, &train, &test);
    let (wm, rep) = WrapperModel::fit(&ds, &LearnerConfig::classifier(LearnerKind::DecisionTree), 10, 1).unwrap();
    let acc = mean_heldout_accuracy(&wm, &test);
    report(
        "10",
        acc >= 0.99 && wm.len() == 31_250,
        format!(
            "250x250 tree WM held-out accuracy {acc:.4} (>= 0.99), trained in {:.1}s",
            rep.total_secs
        ),
    );
}
