//! C-support-vector classification, cross-validation and metrics.

mod cv;
mod metrics;
mod svm;

pub use cv::{default_grid, grid_search_cv, stratified_folds, stratified_split, GridSearchResult, Split};
pub use metrics::{evaluate, Metrics};
pub use svm::{svm_predict, svm_train, BinaryMachine, Kernel, SvmModel, SvmParams};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ClassifyError {
    #[error("need at least two distinct labels, found {0}")]
    DegenerateLabels(usize),
    #[error("invalid data: {0}")]
    Data(String),
    #[error("dimension mismatch: model expects {expected} features, got {got}")]
    Shape { expected: usize, got: usize },
    #[error("invalid SVM parameters: {0}")]
    Params(String),
    #[error("class {label:?} has {count} samples, fewer than {folds} folds")]
    Stratification { label: String, count: usize, folds: usize },
}
