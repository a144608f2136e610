//! One-vs-one linear SVM on three Gaussian blobs, with cross-validated
//! parameter search.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use rfprint::classify::{default_grid, evaluate, grid_search_cv, stratified_split, svm_train, SvmParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let noise = Normal::new(0.0, 0.6)?;
    let centres = [("left", [-2.0, 0.0]), ("right", [2.0, 0.0]), ("top", [0.0, 2.5])];
    let mut x = Vec::new();
    let mut y = Vec::new();
    for (label, c) in centres {
        for _ in 0..40 {
            x.push(vec![c[0] + noise.sample(&mut rng), c[1] + noise.sample(&mut rng)]);
            y.push(label.to_string());
        }
    }

    let split = stratified_split(&y, 0.25, 1)?;
    let pick = |idx: &[usize]| -> (Vec<Vec<f64>>, Vec<String>) { (idx.iter().map(|&i| x[i].clone()).collect(), idx.iter().map(|&i| y[i].clone()).collect()) };
    let (x_train, y_train) = pick(&split.train);
    let (x_test, y_test) = pick(&split.test);

    let model = svm_train(&x_train, &y_train, &SvmParams::linear(1.0))?;
    println!("classes {:?}, {} machines", model.classes, model.machines.len());
    for m in &model.machines {
        println!(
            "  {} vs {}: {} support vectors, {} iterations",
            model.classes[m.positive],
            model.classes[m.negative],
            m.support_vectors.len(),
            m.iterations
        );
    }
    let metrics = evaluate(&model, &x_test, &y_test)?;
    println!("held-out accuracy {:.3}", metrics.accuracy);

    let search = grid_search_cv(&x_train, &y_train, &default_grid(), 5, 1)?;
    println!("grid search picked C = {}, kernel {}", search.best.c, search.best.kernel);
    Ok(())
}
