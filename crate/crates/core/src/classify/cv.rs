//! Stratified splitting and grid-search cross-validation.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{svm_train, ClassifyError, Kernel, SvmParams};

/// Train/test partition of row indices, both sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

fn indices_by_class<S: AsRef<str>>(labels: &[S]) -> BTreeMap<&str, Vec<usize>> {
    let mut by: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, l) in labels.iter().enumerate() {
        by.entry(l.as_ref()).or_default().push(i);
    }
    by
}

/// Seeded stratified hold-out split. Each class contributes
/// `round(count · test_fraction)` rows to the test set, clamped so that a
/// class with two or more rows keeps at least one on each side.
pub fn stratified_split<S: AsRef<str>>(labels: &[S], test_fraction: f64, seed: u64) -> Result<Split, ClassifyError> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(ClassifyError::Data(format!("test fraction {test_fraction} outside (0, 1)")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (label, mut idx) in indices_by_class(labels) {
        if idx.len() < 2 {
            return Err(ClassifyError::Data(format!(
                "class {label:?} has {} sample(s); at least 2 are needed to split",
                idx.len()
            )));
        }
        idx.shuffle(&mut rng);
        let n_test = ((idx.len() as f64 * test_fraction).round() as usize).clamp(1, idx.len() - 1);
        test.extend_from_slice(&idx[..n_test]);
        train.extend_from_slice(&idx[n_test..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok(Split { train, test })
}

/// Assigns every row to one of `folds` folds, round-robin within each
/// shuffled class. Returns the fold index per row.
pub fn stratified_folds<S: AsRef<str>>(labels: &[S], folds: usize, seed: u64) -> Result<Vec<usize>, ClassifyError> {
    if folds < 2 {
        return Err(ClassifyError::Data(format!("need at least 2 folds, got {folds}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignment = vec![0usize; labels.len()];
    for (label, mut idx) in indices_by_class(labels) {
        if idx.len() < folds {
            return Err(ClassifyError::Stratification {
                label: label.to_string(),
                count: idx.len(),
                folds,
            });
        }
        idx.shuffle(&mut rng);
        for (pos, i) in idx.into_iter().enumerate() {
            assignment[i] = pos % folds;
        }
    }
    Ok(assignment)
}

/// Default search space: C ∈ {1e-1, 1, 1e2, 1e5} with a linear kernel and an
/// RBF kernel for γ ∈ {1e-4, 1e-2, 1}. The linear entries carry γ = 1e-4.
pub fn default_grid() -> Vec<SvmParams> {
    let mut grid = Vec::new();
    for c in [1e-1, 1.0, 1e2, 1e5] {
        grid.push(SvmParams::linear(c));
        for gamma in [1e-4, 1e-2, 1.0] {
            grid.push(SvmParams::rbf(c, gamma));
        }
    }
    grid
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSearchResult {
    pub best: SvmParams,
    /// Mean validation accuracy per grid point, in grid order.
    pub table: Vec<(SvmParams, f64)>,
}

fn kernel_rank(k: Kernel) -> u8 {
    match k {
        Kernel::Linear => 0,
        Kernel::Rbf => 1,
    }
}

/// Preference among equally accurate points: smaller C, linear before RBF,
/// smaller gamma.
fn prefer(a: &SvmParams, b: &SvmParams) -> Ordering {
    a.c.total_cmp(&b.c)
        .then(kernel_rank(a.kernel).cmp(&kernel_rank(b.kernel)))
        .then(a.gamma.total_cmp(&b.gamma))
}

pub fn grid_search_cv<S: AsRef<str>>(
    x: &[Vec<f64>],
    y: &[S],
    grid: &[SvmParams],
    folds: usize,
    seed: u64,
) -> Result<GridSearchResult, ClassifyError> {
    if grid.is_empty() {
        return Err(ClassifyError::Params("empty parameter grid".into()));
    }
    if x.len() != y.len() {
        return Err(ClassifyError::Data(format!("{} feature rows but {} labels", x.len(), y.len())));
    }
    let assignment = stratified_folds(y, folds, seed)?;
    let mut table = Vec::with_capacity(grid.len());
    for params in grid {
        params.validate()?;
        let mut total = 0.0;
        for fold in 0..folds {
            let (mut tx, mut ty, mut vx, mut vy) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
            for (i, &f) in assignment.iter().enumerate() {
                if f == fold {
                    vx.push(x[i].clone());
                    vy.push(y[i].as_ref());
                } else {
                    tx.push(x[i].clone());
                    ty.push(y[i].as_ref());
                }
            }
            let model = svm_train(&tx, &ty, params)?;
            let correct = vx
                .iter()
                .zip(&vy)
                .filter(|(r, l)| model.predict_one(r).map(|p| p == **l).unwrap_or(false))
                .count();
            total += correct as f64 / vx.len() as f64;
        }
        table.push((*params, total / folds as f64));
    }
    let best = table
        .iter()
        .max_by(|a, b| a.1.total_cmp(&b.1).then_with(|| prefer(&b.0, &a.0)))
        .map(|(p, _)| *p)
        .expect("non-empty grid");
    Ok(GridSearchResult { best, table })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn blobs(per_class: usize, seed: u64) -> (Vec<Vec<f64>>, Vec<String>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut x = Vec::new();
        let mut y = Vec::new();
        for (c, centre) in [-3.0, 3.0].iter().enumerate() {
            for _ in 0..per_class {
                x.push(vec![centre + rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]);
                y.push(format!("c{c}"));
            }
        }
        (x, y)
    }

    #[test]
    fn split_is_disjoint_and_proportional() {
        let labels: Vec<String> = (0..53).map(|i| format!("k{}", i % 3)).collect();
        let s = stratified_split(&labels, 0.2, 5).unwrap();
        let mut all: Vec<usize> = s.train.iter().chain(&s.test).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..53).collect::<Vec<_>>());
        for k in 0..3 {
            let name = format!("k{k}");
            let total = labels.iter().filter(|l| **l == name).count() as f64;
            let in_test = s.test.iter().filter(|&&i| labels[i] == name).count() as f64;
            assert!((in_test - total * 0.2).abs() <= 1.0);
        }
        assert_eq!(s, stratified_split(&labels, 0.2, 5).unwrap());
    }

    #[test]
    fn split_rejects_singletons() {
        assert!(stratified_split(&["a", "a", "b"], 0.5, 1).is_err());
    }

    #[test]
    fn folds_require_enough_samples() {
        let err = stratified_folds(&["a", "a", "b", "b", "b"], 3, 0).unwrap_err();
        assert_eq!(err, ClassifyError::Stratification { label: "a".into(), count: 2, folds: 3 });
    }

    #[test]
    fn single_point_grid() {
        let (x, y) = blobs(10, 1);
        let p = SvmParams::linear(1.0);
        let r = grid_search_cv(&x, &y, &[p], 5, 3).unwrap();
        assert_eq!(r.best, p);
        assert_eq!(r.table.len(), 1);
        assert_eq!(r.table[0].1, 1.0);
    }

    #[test]
    fn underfitting_c_loses() {
        // Unbalanced but separable: with C = 1e-6 the dual is pinned at the
        // box and the bias follows the majority class.
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut x = Vec::new();
        let mut y = Vec::new();
        for i in 0..40 {
            let cls = usize::from(i >= 30);
            let centre = if cls == 0 { -2.0 } else { 2.0 };
            x.push(vec![centre + rng.gen_range(-1.0..1.0)]);
            y.push(format!("c{cls}"));
        }
        let grid = [SvmParams::linear(1e-6), SvmParams::linear(1e5)];
        let r = grid_search_cv(&x, &y, &grid, 5, 7).unwrap();
        let acc = |i: usize| r.table[i].1;
        assert!(acc(1) > acc(0), "{:?}", r.table);
        assert_eq!(r.best.c, 1e5);
    }

    #[test]
    fn ties_prefer_small_c_then_linear() {
        let (x, y) = blobs(10, 4);
        let grid = [SvmParams::rbf(10.0, 0.01), SvmParams::linear(10.0), SvmParams::linear(1e5)];
        let r = grid_search_cv(&x, &y, &grid, 2, 1).unwrap();
        assert!(r.table.iter().all(|(_, a)| *a == 1.0));
        assert_eq!(r.best, SvmParams::linear(10.0));
    }

    #[test]
    fn default_grid_contains_reported_configuration() {
        let g = default_grid();
        assert_eq!(g.len(), 16);
        assert!(g.iter().any(|p| p.kernel == Kernel::Linear && p.c == 1e5 && p.gamma == 1e-4));
    }
}
