//! PCA dimensionality reduction and standard scaling of MFP vectors.
//!
//! Both use the population (`1/N`) variance convention. PCA components are
//! sign-normalized so that each component's largest-magnitude entry is
//! positive, which makes fitted models reproducible byte for byte.

use nalgebra::{DMatrix, SymmetricEigen};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum FeatureError {
    #[error("need at least {need} rows, got {got}")]
    TooFewRows { need: usize, got: usize },
    #[error("rows have inconsistent or zero width")]
    Ragged,
    #[error("requested {k} components but at most {max} are available (N-1 = {n_minus_1}, D = {d}, numerical rank {rank})")]
    Rank {
        k: usize,
        max: usize,
        n_minus_1: usize,
        d: usize,
        rank: usize,
    },
    #[error("all features are constant; nothing to decompose")]
    Degenerate,
    #[error("dimension mismatch: model expects {expected}, got {got}")]
    Shape { expected: usize, got: usize },
    #[error("variance threshold {0} must lie in (0, 1]")]
    Threshold(f64),
    #[error("non-finite feature value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },
}

/// How many components to keep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PcaTarget {
    Components(usize),
    /// Smallest `k` whose cumulative explained variance reaches `tau`,
    /// optionally capped.
    Threshold { tau: f64, cap: Option<usize> },
}

/// Slack applied when comparing cumulative variance with the threshold, so
/// `tau = 1.0` selects the full numerical rank despite rounding in the sums.
pub const THRESHOLD_SLACK: f64 = 1e-12;

/// Eigenvalues below this fraction of the largest count as zero.
const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct PcaModel {
    pub mean: Vec<f64>,
    /// `k` rows of length `D`, orthonormal.
    pub components: Vec<Vec<f64>>,
    /// Population variance along each component.
    pub explained_variance: Vec<f64>,
    pub explained_variance_ratio: Vec<f64>,
}

impl PcaModel {
    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn n_components(&self) -> usize {
        self.components.len()
    }

    pub fn transform_row(&self, x: &[f64]) -> Result<Vec<f64>, FeatureError> {
        if x.len() != self.dim() {
            return Err(FeatureError::Shape {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(self
            .components
            .iter()
            .map(|c| c.iter().zip(x).zip(&self.mean).map(|((c, x), m)| c * (x - m)).sum())
            .collect())
    }

    /// `componentsᵀ · y + mean`.
    pub fn inverse_transform_row(&self, y: &[f64]) -> Result<Vec<f64>, FeatureError> {
        if y.len() != self.n_components() {
            return Err(FeatureError::Shape {
                expected: self.n_components(),
                got: y.len(),
            });
        }
        let mut out = self.mean.clone();
        for (c, &w) in self.components.iter().zip(y) {
            for (o, ci) in out.iter_mut().zip(c) {
                *o += w * ci;
            }
        }
        Ok(out)
    }
}

fn check_matrix(x: &[Vec<f64>], min_rows: usize) -> Result<usize, FeatureError> {
    if x.len() < min_rows {
        return Err(FeatureError::TooFewRows {
            need: min_rows,
            got: x.len(),
        });
    }
    let d = x[0].len();
    if d == 0 || x.iter().any(|r| r.len() != d) {
        return Err(FeatureError::Ragged);
    }
    for (row, r) in x.iter().enumerate() {
        if let Some(col) = r.iter().position(|v| !v.is_finite()) {
            return Err(FeatureError::NonFinite { row, col });
        }
    }
    Ok(d)
}

fn column_means(x: &[Vec<f64>], d: usize) -> Vec<f64> {
    let mut mean = vec![0.0; d];
    for r in x {
        for (m, v) in mean.iter_mut().zip(r) {
            *m += v;
        }
    }
    let n = x.len() as f64;
    mean.iter_mut().for_each(|m| *m /= n);
    mean
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Flips `v` so its largest-magnitude entry (first one on ties) is positive.
fn normalize_sign(v: &mut [f64]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v[best] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Principal directions and variances of centred data, largest first.
/// Returns at most `min(N, D)` pairs.
fn principal_axes(centered: &[Vec<f64>], d: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = centered.len();
    let nf = n as f64;
    let mut pairs: Vec<(f64, Vec<f64>)> = if d <= n {
        // Thin SVD of the data: right singular vectors, variance σ²/N.
        let m = DMatrix::from_fn(n, d, |i, j| centered[i][j]);
        let svd = m.svd(false, true);
        let vt = svd.v_t.expect("requested V^T");
        svd.singular_values
            .iter()
            .enumerate()
            .map(|(i, s)| (s * s / nf, vt.row(i).iter().copied().collect()))
            .collect()
    } else {
        // Wide data: eigen-decompose the N×N Gram matrix and map each
        // eigenvector u back to a direction Cᵀu / |Cᵀu|.
        let mut gram = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let g = dot(&centered[i], &centered[j]);
                gram[(i, j)] = g;
                gram[(j, i)] = g;
            }
        }
        let eig = SymmetricEigen::new(gram);
        eig.eigenvalues
            .iter()
            .enumerate()
            .map(|(k, &mu)| {
                let u = eig.eigenvectors.column(k);
                let mut v = vec![0.0; d];
                for (i, row) in centered.iter().enumerate() {
                    let ui = u[i];
                    for (vj, cij) in v.iter_mut().zip(row) {
                        *vj += ui * cij;
                    }
                }
                let norm = dot(&v, &v).sqrt();
                if norm > 0.0 {
                    v.iter_mut().for_each(|x| *x /= norm);
                }
                (mu.max(0.0) / nf, v)
            })
            .collect()
    };
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    pairs.into_iter().unzip()
}

pub fn pca_fit(x: &[Vec<f64>], target: PcaTarget) -> Result<PcaModel, FeatureError> {
    let d = check_matrix(x, 2)?;
    let n = x.len();
    let mean = column_means(x, d);
    let centered: Vec<Vec<f64>> = x.iter().map(|r| r.iter().zip(&mean).map(|(v, m)| v - m).collect()).collect();
    let total: f64 = centered.iter().map(|r| dot(r, r)).sum::<f64>() / n as f64;
    if total <= 0.0 {
        return Err(FeatureError::Degenerate);
    }

    let (variances, directions) = principal_axes(&centered, d);
    let lead = variances[0];
    let rank = variances.iter().take_while(|&&v| v > lead * RANK_TOL).count();
    let max_k = (n - 1).min(d).min(rank);
    let ratios: Vec<f64> = variances.iter().map(|v| v / total).collect();

    let k = match target {
        PcaTarget::Components(k) => {
            if k == 0 || k > max_k {
                return Err(FeatureError::Rank {
                    k,
                    max: max_k,
                    n_minus_1: n - 1,
                    d,
                    rank,
                });
            }
            k
        }
        PcaTarget::Threshold { tau, cap } => {
            if !(tau > 0.0 && tau <= 1.0) {
                return Err(FeatureError::Threshold(tau));
            }
            let mut cum = 0.0;
            let mut chosen = max_k;
            for (i, r) in ratios.iter().take(max_k).enumerate() {
                cum += r;
                if cum >= tau - THRESHOLD_SLACK {
                    chosen = i + 1;
                    break;
                }
            }
            match cap {
                Some(c) => chosen.min(c.max(1)),
                None => chosen,
            }
        }
    };

    let components = directions
        .into_iter()
        .take(k)
        .map(|mut v| {
            normalize_sign(&mut v);
            v
        })
        .collect();
    Ok(PcaModel {
        mean,
        components,
        explained_variance: variances[..k].to_vec(),
        explained_variance_ratio: ratios[..k].to_vec(),
    })
}

pub fn pca_transform(model: &PcaModel, x: &[Vec<f64>]) -> Result<Vec<Vec<f64>>, FeatureError> {
    x.iter().map(|r| model.transform_row(r)).collect()
}

/// Prefix sums of the explained-variance ratios.
pub fn cumulative_explained_variance(model: &PcaModel) -> Vec<f64> {
    model
        .explained_variance_ratio
        .iter()
        .scan(0.0, |acc, r| {
            *acc += r;
            Some(*acc)
        })
        .collect()
}

/// Zero-mean, unit-variance scaling. Constant columns map to 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Scaler {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
    pub constant: Vec<bool>,
}

impl Scaler {
    pub fn transform_row(&self, x: &[f64]) -> Result<Vec<f64>, FeatureError> {
        if x.len() != self.means.len() {
            return Err(FeatureError::Shape {
                expected: self.means.len(),
                got: x.len(),
            });
        }
        Ok(x.iter()
            .zip(&self.means)
            .zip(&self.stds)
            .zip(&self.constant)
            .map(|(((v, m), s), &c)| if c { 0.0 } else { (v - m) / s })
            .collect())
    }
}

pub fn scaler_fit(x: &[Vec<f64>]) -> Result<Scaler, FeatureError> {
    let d = check_matrix(x, 2)?;
    let n = x.len() as f64;
    let means = column_means(x, d);
    let mut stds = vec![0.0; d];
    for r in x {
        for ((s, v), m) in stds.iter_mut().zip(r).zip(&means) {
            *s += (v - m) * (v - m);
        }
    }
    stds.iter_mut().for_each(|s| *s = (*s / n).sqrt());
    let constant = stds
        .iter()
        .zip(&means)
        .map(|(s, m)| *s <= 1e-12 * m.abs().max(f64::MIN_POSITIVE) || *s == 0.0)
        .collect();
    Ok(Scaler { means, stds, constant })
}

pub fn scaler_transform(s: &Scaler, x: &[Vec<f64>]) -> Result<Vec<Vec<f64>>, FeatureError> {
    x.iter().map(|r| s.transform_row(r)).collect()
}
