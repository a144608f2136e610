//! Soft-margin C-SVC trained by sequential minimal optimization.
//!
//! Each binary machine solves
//!
//! ```text
//! min_α  ½ αᵀQα − eᵀα   s.t.  0 ≤ α_i ≤ C,  yᵀα = 0,   Q_ij = y_i y_j K(x_i, x_j)
//! ```
//!
//! two coordinates at a time, choosing the pair with second-order working
//! set selection and stopping when the maximal KKT violation gap drops
//! below `tol`. Multiclass problems use one machine per class pair with
//! majority voting.

use std::fmt;
use std::str::FromStr;

use super::ClassifyError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kernel {
    Linear,
    Rbf,
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kernel::Linear => "linear",
            Kernel::Rbf => "rbf",
        })
    }
}

impl FromStr for Kernel {
    type Err = ClassifyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "linear" => Ok(Kernel::Linear),
            "rbf" => Ok(Kernel::Rbf),
            _ => Err(ClassifyError::Params(format!("unknown kernel {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvmParams {
    pub c: f64,
    pub kernel: Kernel,
    /// RBF width. Recorded but unused for the linear kernel.
    pub gamma: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams {
            c: 1.0e5,
            kernel: Kernel::Linear,
            gamma: 1.0e-4,
            tol: 1.0e-3,
            max_iter: 10_000_000,
        }
    }
}

impl SvmParams {
    pub fn linear(c: f64) -> Self {
        SvmParams {
            c,
            ..Default::default()
        }
    }

    pub fn rbf(c: f64, gamma: f64) -> Self {
        SvmParams {
            c,
            kernel: Kernel::Rbf,
            gamma,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), ClassifyError> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if !ok(self.c) {
            return Err(ClassifyError::Params(format!("C must be positive, got {}", self.c)));
        }
        if !ok(self.gamma) {
            return Err(ClassifyError::Params(format!("gamma must be positive, got {}", self.gamma)));
        }
        if !ok(self.tol) {
            return Err(ClassifyError::Params(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(ClassifyError::Params("max_iter must be positive".into()));
        }
        Ok(())
    }

    pub(crate) fn kernel_value(&self, a: &[f64], b: &[f64]) -> f64 {
        match self.kernel {
            Kernel::Linear => a.iter().zip(b).map(|(x, y)| x * y).sum(),
            Kernel::Rbf => {
                let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
                (-self.gamma * d2).exp()
            }
        }
    }
}

/// Binary decision function for the class pair `(positive, negative)`:
/// `f(x) = Σ α_i y_i K(sv_i, x) + bias`; `f(x) > 0` votes for `positive`.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryMachine {
    pub positive: usize,
    pub negative: usize,
    pub support_vectors: Vec<Vec<f64>>,
    /// Dual coefficients `α_i ∈ (0, C]` of the retained support vectors.
    pub alphas: Vec<f64>,
    /// `+1` for the positive class, `-1` for the negative class.
    pub signs: Vec<f64>,
    pub bias: f64,
    /// Condensed `Σ α_i y_i x_i`, present for the linear kernel.
    pub weights: Option<Vec<f64>>,
    pub iterations: usize,
    pub converged: bool,
}

impl BinaryMachine {
    pub fn decision(&self, params: &SvmParams, x: &[f64]) -> f64 {
        match &self.weights {
            Some(w) => w.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + self.bias,
            None => {
                self.support_vectors
                    .iter()
                    .zip(&self.alphas)
                    .zip(&self.signs)
                    .map(|((sv, a), y)| a * y * params.kernel_value(sv, x))
                    .sum::<f64>()
                    + self.bias
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvmModel {
    /// Ordered (sorted) class labels; machine votes index into this list.
    pub classes: Vec<String>,
    /// One machine per unordered pair `(i, j)`, `i < j`, in lexicographic order.
    pub machines: Vec<BinaryMachine>,
    pub params: SvmParams,
    pub dim: usize,
}

impl SvmModel {
    pub fn predict_index(&self, x: &[f64]) -> Result<usize, ClassifyError> {
        if x.len() != self.dim {
            return Err(ClassifyError::Shape {
                expected: self.dim,
                got: x.len(),
            });
        }
        let mut votes = vec![0usize; self.classes.len()];
        for m in &self.machines {
            if m.decision(&self.params, x) > 0.0 {
                votes[m.positive] += 1;
            } else {
                votes[m.negative] += 1;
            }
        }
        // Ties go to the lowest class index.
        let mut best = 0;
        for (i, &v) in votes.iter().enumerate() {
            if v > votes[best] {
                best = i;
            }
        }
        Ok(best)
    }

    pub fn predict_one(&self, x: &[f64]) -> Result<&str, ClassifyError> {
        Ok(&self.classes[self.predict_index(x)?])
    }
}

/// Result of one dual solve.
pub(crate) struct DualSolution {
    pub alpha: Vec<f64>,
    /// Decision bias `b` (`f = Σ α y K + b`).
    pub bias: f64,
    pub iterations: usize,
    pub converged: bool,
}

const TAU: f64 = 1e-12;

fn snap_to_bounds(a: f64, c: f64) -> f64 {
    let eps = c * TAU;
    if a <= eps {
        0.0
    } else if a >= c - eps {
        c
    } else {
        a
    }
}

/// SMO on a precomputed kernel matrix `k` (row-major `n × n`).
pub(crate) fn solve_dual(k: &[f64], y: &[f64], c: f64, tol: f64, max_iter: usize) -> DualSolution {
    let n = y.len();
    let q = |i: usize, j: usize| y[i] * y[j] * k[i * n + j];
    let mut alpha = vec![0.0f64; n];
    // Gradient of the objective, Qα − e.
    let mut grad = vec![-1.0f64; n];
    let mut iterations = 0;
    let mut converged = false;

    while iterations < max_iter {
        // First index: maximal violator in I_up.
        let mut gmax = f64::NEG_INFINITY;
        let mut i_sel = usize::MAX;
        for t in 0..n {
            let in_up = (y[t] > 0.0 && alpha[t] < c) || (y[t] < 0.0 && alpha[t] > 0.0);
            if in_up {
                let v = -y[t] * grad[t];
                if v >= gmax {
                    gmax = v;
                    i_sel = t;
                }
            }
        }
        // Second index: best second-order gain in I_low.
        let mut gmax2 = f64::NEG_INFINITY;
        let mut j_sel = usize::MAX;
        let mut best_obj = f64::INFINITY;
        for t in 0..n {
            let in_low = (y[t] > 0.0 && alpha[t] > 0.0) || (y[t] < 0.0 && alpha[t] < c);
            if !in_low {
                continue;
            }
            let v = y[t] * grad[t];
            if v >= gmax2 {
                gmax2 = v;
            }
            if i_sel == usize::MAX {
                continue;
            }
            let grad_diff = gmax + v;
            if grad_diff > 0.0 {
                let quad = k[i_sel * n + i_sel] + k[t * n + t] - 2.0 * k[i_sel * n + t];
                let quad = if quad > 0.0 { quad } else { TAU };
                let obj = -(grad_diff * grad_diff) / quad;
                if obj <= best_obj {
                    best_obj = obj;
                    j_sel = t;
                }
            }
        }
        if gmax + gmax2 < tol || i_sel == usize::MAX || j_sel == usize::MAX {
            converged = true;
            break;
        }
        iterations += 1;

        let (i, j) = (i_sel, j_sel);
        let (old_i, old_j) = (alpha[i], alpha[j]);
        if y[i] != y[j] {
            let quad = q(i, i) + q(j, j) + 2.0 * q(i, j);
            let quad = if quad > 0.0 { quad } else { TAU };
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let quad = q(i, i) + q(j, j) - 2.0 * q(i, j);
            let quad = if quad > 0.0 { quad } else { TAU };
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        // Cancellation in the clipping above can leave residues like 1e-16
        // that would otherwise count as free vectors when fixing the bias.
        for t in [i, j] {
            alpha[t] = snap_to_bounds(alpha[t], c);
        }
        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        for t in 0..n {
            grad[t] += q(i, t) * di + q(j, t) * dj;
        }
    }

    // Bias from free vectors, else the midpoint of the feasible interval.
    let mut ub = f64::INFINITY;
    let mut lb = f64::NEG_INFINITY;
    let mut free_sum = 0.0;
    let mut free = 0usize;
    for t in 0..n {
        let yg = y[t] * grad[t];
        if alpha[t] >= c {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            free += 1;
            free_sum += yg;
        }
    }
    let rho = if free > 0 { free_sum / free as f64 } else { (ub + lb) / 2.0 };
    DualSolution {
        alpha,
        bias: -rho,
        iterations,
        converged,
    }
}

pub(crate) fn kernel_matrix(x: &[&[f64]], params: &SvmParams) -> Vec<f64> {
    let n = x.len();
    let mut k = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v = params.kernel_value(x[i], x[j]);
            k[i * n + j] = v;
            k[j * n + i] = v;
        }
    }
    k
}

fn train_pair(x: &[Vec<f64>], idx: &[usize], signs: &[f64], pos: usize, neg: usize, params: &SvmParams) -> BinaryMachine {
    let rows: Vec<&[f64]> = idx.iter().map(|&i| x[i].as_slice()).collect();
    let k = kernel_matrix(&rows, params);
    let sol = solve_dual(&k, signs, params.c, params.tol, params.max_iter);
    let mut support_vectors = Vec::new();
    let mut alphas = Vec::new();
    let mut sv_signs = Vec::new();
    for (t, &a) in sol.alpha.iter().enumerate() {
        if a > 0.0 {
            support_vectors.push(rows[t].to_vec());
            alphas.push(a);
            sv_signs.push(signs[t]);
        }
    }
    let weights = match params.kernel {
        Kernel::Linear => {
            let dim = x.first().map_or(0, Vec::len);
            let mut w = vec![0.0; dim];
            for ((sv, a), y) in support_vectors.iter().zip(&alphas).zip(&sv_signs) {
                for (wi, xi) in w.iter_mut().zip(sv) {
                    *wi += a * y * xi;
                }
            }
            Some(w)
        }
        Kernel::Rbf => None,
    };
    BinaryMachine {
        positive: pos,
        negative: neg,
        support_vectors,
        alphas,
        signs: sv_signs,
        bias: sol.bias,
        weights,
        iterations: sol.iterations,
        converged: sol.converged,
    }
}

/// Trains one-vs-one machines. Classes are sorted lexicographically.
/// Training is deterministic: identical inputs give identical models.
pub fn svm_train<S: AsRef<str>>(x: &[Vec<f64>], y: &[S], params: &SvmParams) -> Result<SvmModel, ClassifyError> {
    params.validate()?;
    if x.len() != y.len() {
        return Err(ClassifyError::Data(format!("{} feature rows but {} labels", x.len(), y.len())));
    }
    if x.len() < 2 {
        return Err(ClassifyError::Data(format!("need at least 2 samples, got {}", x.len())));
    }
    let dim = x[0].len();
    if x.iter().any(|r| r.len() != dim) {
        return Err(ClassifyError::Data("feature rows have different lengths".into()));
    }
    for (i, r) in x.iter().enumerate() {
        if r.iter().any(|v| !v.is_finite()) {
            return Err(ClassifyError::Data(format!("non-finite feature in row {i}")));
        }
    }
    let mut classes: Vec<String> = y.iter().map(|s| s.as_ref().to_string()).collect();
    classes.sort();
    classes.dedup();
    if classes.len() < 2 {
        return Err(ClassifyError::DegenerateLabels(classes.len()));
    }
    let class_of: Vec<usize> = y
        .iter()
        .map(|s| classes.binary_search_by(|c| c.as_str().cmp(s.as_ref())).unwrap())
        .collect();

    let mut machines = Vec::with_capacity(classes.len() * (classes.len() - 1) / 2);
    for a in 0..classes.len() {
        for b in a + 1..classes.len() {
            let mut idx = Vec::new();
            let mut signs = Vec::new();
            for (i, &c) in class_of.iter().enumerate() {
                if c == a {
                    idx.push(i);
                    signs.push(1.0);
                } else if c == b {
                    idx.push(i);
                    signs.push(-1.0);
                }
            }
            machines.push(train_pair(x, &idx, &signs, a, b, params));
        }
    }
    Ok(SvmModel {
        classes,
        machines,
        params: *params,
        dim,
    })
}

pub fn svm_predict(model: &SvmModel, x: &[Vec<f64>]) -> Result<Vec<String>, ClassifyError> {
    x.iter().map(|r| model.predict_one(r).map(str::to_string)).collect()
}
