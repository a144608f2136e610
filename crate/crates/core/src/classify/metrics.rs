use super::{ClassifyError, SvmModel};

/// Classification summary. `confusion[t][p]` counts samples of true class
/// `t` predicted as `p`, indexed by `classes`.
#[derive(Debug, Clone, PartialEq)]
pub struct Metrics {
    pub classes: Vec<String>,
    pub accuracy: f64,
    pub confusion: Vec<Vec<usize>>,
    /// TP / (TP + FP); `None` when the class was never predicted.
    pub precision: Vec<Option<f64>>,
    /// TP / (TP + FN); `None` when the class has no true samples.
    pub recall: Vec<Option<f64>>,
}

impl Metrics {
    /// Builds metrics over an explicit class list. Labels outside `classes`
    /// are rejected.
    pub fn from_predictions<S: AsRef<str>, T: AsRef<str>>(
        classes: &[String],
        truth: &[S],
        predicted: &[T],
    ) -> Result<Metrics, ClassifyError> {
        if truth.is_empty() {
            return Err(ClassifyError::Data("empty test set".into()));
        }
        if truth.len() != predicted.len() {
            return Err(ClassifyError::Data(format!("{} labels but {} predictions", truth.len(), predicted.len())));
        }
        let index = |s: &str| {
            classes
                .iter()
                .position(|c| c == s)
                .ok_or_else(|| ClassifyError::Data(format!("label {s:?} not among model classes")))
        };
        let n = classes.len();
        let mut confusion = vec![vec![0usize; n]; n];
        for (t, p) in truth.iter().zip(predicted) {
            confusion[index(t.as_ref())?][index(p.as_ref())?] += 1;
        }
        let correct: usize = (0..n).map(|i| confusion[i][i]).sum();
        let precision = (0..n)
            .map(|c| {
                let predicted: usize = (0..n).map(|t| confusion[t][c]).sum();
                (predicted > 0).then(|| confusion[c][c] as f64 / predicted as f64)
            })
            .collect();
        let recall = (0..n)
            .map(|c| {
                let actual: usize = confusion[c].iter().sum();
                (actual > 0).then(|| confusion[c][c] as f64 / actual as f64)
            })
            .collect();
        Ok(Metrics {
            classes: classes.to_vec(),
            accuracy: correct as f64 / truth.len() as f64,
            confusion,
            precision,
            recall,
        })
    }

    pub fn total(&self) -> usize {
        self.confusion.iter().flatten().sum()
    }

    pub fn class_index(&self, label: &str) -> Option<usize> {
        self.classes.iter().position(|c| c == label)
    }
}

pub fn evaluate<S: AsRef<str>>(model: &SvmModel, x_test: &[Vec<f64>], y_test: &[S]) -> Result<Metrics, ClassifyError> {
    if x_test.is_empty() {
        return Err(ClassifyError::Data("empty test set".into()));
    }
    let predicted = super::svm_predict(model, x_test)?;
    Metrics::from_predictions(&model.classes, y_test, &predicted)
}
