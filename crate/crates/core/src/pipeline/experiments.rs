use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::hint::black_box;
use std::path::Path;
use std::time::Instant;

use crate::classify::{stratified_split, Metrics, Split};
use crate::dsp::{welch_psd, MfpExtractor, WindowKind};
use crate::iq::{load_iq, IqRecording};
use crate::manifest::{Manifest, ManifestRow, SampleKind};
use crate::simulate::{WorkflowKind, BASELINE_DISTANCE_MM, BASELINE_SPEED_MM_S};

use super::{
    Classifier, ExperimentKind, FeatureExtractor, FittedTransform, ModelFile, PcaScope, PipelineConfig, PipelineError, RecordingSource, Report, Sample, Table,
    FORMAT_VERSION,
};

fn source_digest(source: &dyn RecordingSource) -> String {
    Manifest::new(source.rows().to_vec()).digest()
}

fn samples_at(source: &dyn RecordingSource, extractor: &FeatureExtractor, indices: &[usize]) -> Result<Vec<Sample>, PipelineError> {
    indices
        .iter()
        .map(|&i| {
            let rec = source.load(i)?;
            Ok(Sample {
                row: source.rows()[i].clone(),
                mfp: extractor.mfp(&rec)?,
            })
        })
        .collect()
}

fn take<T: Clone>(v: &[T], idx: &[usize]) -> Vec<T> {
    idx.iter().map(|&i| v[i].clone()).collect()
}

/// Seeded stratified split, fit on the training part, score the rest.
pub fn holdout(cfg: &PipelineConfig, mfps: &[Vec<f64>], labels: &[String]) -> Result<(Classifier, Split, Metrics), PipelineError> {
    holdout_with(cfg, mfps, labels, None)
}

/// [`holdout`], optionally reusing a transform fitted elsewhere; only the
/// SVM is then fitted here.
pub fn holdout_with(
    cfg: &PipelineConfig,
    mfps: &[Vec<f64>],
    labels: &[String],
    transform: Option<&FittedTransform>,
) -> Result<(Classifier, Split, Metrics), PipelineError> {
    if mfps.is_empty() {
        return Err(PipelineError::Data("no samples".into()));
    }
    let split = split_of(cfg, labels)?;
    let (x, y) = (take(mfps, &split.train), take(labels, &split.train));
    let clf = match transform {
        Some(t) => Classifier::fit_with_transform(cfg, t.clone(), &x, &y)?,
        None => Classifier::fit(cfg, &x, &y)?,
    };
    let predicted = clf.predict_all(&take(mfps, &split.test))?;
    let metrics = Metrics::from_predictions(&clf.svm.classes, &take(labels, &split.test), &predicted)
        .map_err(|e| PipelineError::classify("scoring", e))?;
    Ok((clf, split, metrics))
}

fn split_of(cfg: &PipelineConfig, labels: &[String]) -> Result<Split, PipelineError> {
    stratified_split(labels, cfg.test_fraction, cfg.seed).map_err(|e| PipelineError::classify("split", e))
}

/// One report column: its name, the context used in error messages, and
/// its samples.
struct Column {
    name: String,
    context: String,
    mfps: Vec<Vec<f64>>,
    labels: Vec<String>,
}

/// Holdout metrics per column. With a global PCA scope the transform is
/// fitted once on the union of the columns' training splits.
fn score_columns(cfg: &PipelineConfig, columns: &[Column]) -> Result<Vec<(String, Metrics)>, PipelineError> {
    let shared = match cfg.pca_scope {
        PcaScope::PerColumn => None,
        PcaScope::Global => {
            let mut train = Vec::new();
            for c in columns {
                let split = split_of(cfg, &c.labels).map_err(|e| e.with_context(&c.context))?;
                train.extend(take(&c.mfps, &split.train));
            }
            Some(FittedTransform::fit(cfg, &train).map_err(|e| e.with_context("global PCA"))?)
        }
    };
    columns
        .iter()
        .map(|c| {
            let (_, _, m) = holdout_with(cfg, &c.mfps, &c.labels, shared.as_ref()).map_err(|e| e.with_context(&c.context))?;
            Ok((c.name.clone(), m))
        })
        .collect()
}

/// Fits on the training split of every row in `source`.
pub fn train(source: &dyn RecordingSource, cfg: &PipelineConfig) -> Result<ModelFile, PipelineError> {
    if source.is_empty() {
        return Err(PipelineError::Data("manifest has no rows".into()));
    }
    let extractor = FeatureExtractor::new(cfg)?;
    let labels: Vec<String> = source.rows().iter().map(|r| r.label.clone()).collect();
    let split = split_of(cfg, &labels)?;
    let train_rows = samples_at(source, &extractor, &split.train)?;
    let mfps: Vec<Vec<f64>> = train_rows.iter().map(|s| s.mfp.clone()).collect();
    let y: Vec<&str> = train_rows.iter().map(|s| s.row.label.as_str()).collect();
    let classifier = Classifier::fit(cfg, &mfps, &y)?;
    let predicted = classifier.predict_all(&mfps)?;
    let correct = predicted.iter().zip(&y).filter(|(p, t)| p == t).count();
    Ok(ModelFile {
        format_version: FORMAT_VERSION,
        config: cfg.clone(),
        classifier,
        manifest_digest: source_digest(source),
        training_rows: split.train.len(),
        training_accuracy: correct as f64 / split.train.len() as f64,
    })
}

pub fn predict_recording(model: &ModelFile, rec: &IqRecording) -> Result<String, PipelineError> {
    let mfp = FeatureExtractor::new(&model.config)?.mfp(rec)?;
    model.classifier.predict_mfp(&mfp).map(str::to_string)
}

pub fn predict(model: &ModelFile, path: impl AsRef<Path>) -> Result<String, PipelineError> {
    let path = path.as_ref();
    let rec = load_iq(path, model.config.sample_rate_hz).map_err(|source| PipelineError::Ingest {
        path: path.to_path_buf(),
        source,
    })?;
    predict_recording(model, &rec)
}

/// Report order for class rows: movement labels by axis count then name,
/// workflow labels in template order, anything else after.
fn display_order(labels: impl IntoIterator<Item = String>) -> Vec<String> {
    let mut v: Vec<String> = labels.into_iter().collect();
    v.sort();
    v.dedup();
    let rank = |l: &str| match l.parse::<WorkflowKind>() {
        Ok(k) => (0, WorkflowKind::ALL.iter().position(|w| *w == k).unwrap(), String::new()),
        Err(_) => (1, l.len(), l.to_string()),
    };
    v.sort_by_key(|l| rank(l));
    v
}

/// Precision and recall tables over `columns`, each with its own metrics.
fn metrics_tables(report: &mut Report, rows: &[String], columns: Vec<(String, Metrics)>, precision_name: &str) {
    let names: Vec<String> = columns.iter().map(|(c, _)| c.clone()).collect();
    for (table_name, use_precision) in [(precision_name, true), ("recall", false)] {
        let mut t = Table::new(table_name, names.clone());
        for label in rows {
            let values = columns
                .iter()
                .map(|(_, m)| {
                    m.class_index(label)
                        .and_then(|i| if use_precision { m.precision[i] } else { m.recall[i] })
                })
                .collect();
            t.rows.push((label.clone(), values));
        }
        t.footer = Some(("Accuracy".into(), columns.iter().map(|(_, m)| Some(m.accuracy)).collect()));
        report.tables.push(t);
    }
    report.metrics = columns;
}

/// Scores `model` on the rows of `source`. When `source` is the manifest the
/// model was trained on, only the held-out rows are used.
pub fn eval(source: &dyn RecordingSource, model: &ModelFile) -> Result<Report, PipelineError> {
    if source.is_empty() {
        return Err(PipelineError::Data("manifest has no rows".into()));
    }
    let cfg = &model.config;
    let labels: Vec<String> = source.rows().iter().map(|r| r.label.clone()).collect();
    let held_out = source_digest(source) == model.manifest_digest;
    let indices = if held_out {
        stratified_split(&labels, cfg.test_fraction, cfg.seed)
            .map_err(|e| PipelineError::classify("split", e))?
            .test
    } else {
        (0..source.len()).collect()
    };
    let extractor = FeatureExtractor::new(cfg)?;
    let samples = samples_at(source, &extractor, &indices)?;
    let mut truth = Vec::new();
    let mut predicted = Vec::new();
    for s in &samples {
        truth.push(s.row.label.clone());
        predicted.push(model.classifier.predict_mfp(&s.mfp)?.to_string());
    }
    let metrics = Metrics::from_predictions(&model.classifier.svm.classes, &truth, &predicted)
        .map_err(|e| PipelineError::classify("scoring", e))?;
    let mut report = Report::new(ExperimentKind::Eval);
    let column = if held_out { "held-out" } else { "all rows" };
    metrics_tables(&mut report, &display_order(model.classifier.svm.classes.iter().cloned()), vec![(column.into(), metrics)], "precision");
    report.summary.push(format!(
        "{} rows scored ({}); training accuracy {:.4}",
        samples.len(),
        if held_out { "held-out split of the training manifest" } else { "manifest differs from training manifest" },
        model.training_accuracy
    ));
    Ok(report)
}

fn fmt_value(v: f64) -> String {
    format!("{v}")
}

fn is_baseline(r: &ManifestRow) -> bool {
    r.kind == SampleKind::Movement && r.speed_mm_s == Some(BASELINE_SPEED_MM_S) && r.distance_mm == Some(BASELINE_DISTANCE_MM)
}

/// Movement experiments. `Baseline` uses the 12.5 mm/s, 1 mm cell; the
/// distance sweep holds speed at 12.5 mm/s; the speed sweep holds
/// distance at 1 mm. Every column is split, fitted and scored on its own.
pub fn movement_report(source: &dyn RecordingSource, cfg: &PipelineConfig, kind: ExperimentKind) -> Result<Report, PipelineError> {
    let rows = source.rows();
    let mut groups: Vec<(f64, Vec<usize>)> = Vec::new();
    let mut push = |key: f64, i: usize| match groups.iter_mut().find(|(k, _)| *k == key) {
        Some((_, v)) => v.push(i),
        None => groups.push((key, vec![i])),
    };
    for (i, r) in rows.iter().enumerate() {
        if r.kind != SampleKind::Movement {
            continue;
        }
        match kind {
            ExperimentKind::Baseline if is_baseline(r) => push(0.0, i),
            ExperimentKind::DistanceSweep if r.speed_mm_s == Some(BASELINE_SPEED_MM_S) => {
                if let Some(d) = r.distance_mm {
                    push(d, i)
                }
            }
            ExperimentKind::SpeedSweep if r.distance_mm == Some(BASELINE_DISTANCE_MM) => {
                if let Some(s) = r.speed_mm_s {
                    push(s, i)
                }
            }
            ExperimentKind::Baseline | ExperimentKind::DistanceSweep | ExperimentKind::SpeedSweep => {}
            other => return Err(PipelineError::Config(format!("{other} is not a movement experiment"))),
        }
    }
    if groups.is_empty() {
        return Err(PipelineError::Data(format!("no movement rows match the {kind} conditions")));
    }
    groups.sort_by(|a, b| a.0.total_cmp(&b.0));

    let extractor = FeatureExtractor::new(cfg)?;
    let mut columns = Vec::new();
    let mut all_labels = Vec::new();
    for (key, idx) in &groups {
        let name = match kind {
            ExperimentKind::Baseline => format!("{} mm/s, {} mm", fmt_value(BASELINE_SPEED_MM_S), fmt_value(BASELINE_DISTANCE_MM)),
            ExperimentKind::DistanceSweep => format!("{} mm", fmt_value(*key)),
            _ => format!("{} mm/s", fmt_value(*key)),
        };
        let samples = samples_at(source, &extractor, idx)?;
        let labels: Vec<String> = samples.iter().map(|s| s.row.label.clone()).collect();
        all_labels.extend(labels.iter().cloned());
        columns.push(Column {
            context: name.clone(),
            name,
            mfps: samples.into_iter().map(|s| s.mfp).collect(),
            labels,
        });
    }
    let columns = score_columns(cfg, &columns)?;
    let mut report = Report::new(kind);
    metrics_tables(&mut report, &display_order(all_labels), columns, "precision");
    let acc = &report.tables[0].footer.as_ref().unwrap().1;
    let mean = acc.iter().flatten().sum::<f64>() / acc.len() as f64;
    report.summary.push(format!("mean accuracy over {} column(s): {mean:.4}", acc.len()));
    Ok(report)
}

/// Per-set workflow recovery. Sets 1, 2 and 3 are expected; a missing set
/// is reported as a warning rather than an error.
pub fn workflow_eval(source: &dyn RecordingSource, cfg: &PipelineConfig) -> Result<Report, PipelineError> {
    let mut sets: BTreeMap<u8, Vec<usize>> = BTreeMap::new();
    for (i, r) in source.rows().iter().enumerate() {
        if r.kind == SampleKind::Workflow {
            let id = r.set_id.ok_or_else(|| PipelineError::Data(format!("workflow row {} has no set_id", r.path)))?;
            sets.entry(id).or_default().push(i);
        }
    }
    if sets.is_empty() {
        return Err(PipelineError::Data("manifest contains no workflow rows".into()));
    }
    let mut report = Report::new(ExperimentKind::Workflow);
    for expected in 1..=3u8 {
        if !sets.contains_key(&expected) {
            report.warnings.push(format!("workflow set {expected} missing from manifest; report is partial"));
        }
    }
    let extractor = FeatureExtractor::new(cfg)?;
    let mut columns = Vec::new();
    for (id, idx) in &sets {
        let samples = samples_at(source, &extractor, idx)?;
        columns.push(Column {
            name: format!("Set {id}"),
            context: format!("workflow set {id}"),
            labels: samples.iter().map(|s| s.row.label.clone()).collect(),
            mfps: samples.into_iter().map(|s| s.mfp).collect(),
        });
    }
    let columns = score_columns(cfg, &columns)?;
    let mut rows: Vec<String> = WorkflowKind::ALL.iter().map(|k| k.label().to_string()).collect();
    for (_, m) in &columns {
        for c in display_order(m.classes.iter().cloned()) {
            if !rows.contains(&c) {
                rows.push(c);
            }
        }
    }
    metrics_tables(&mut report, &rows, columns, "recovery_rate");
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StftSweepOptions {
    pub windows: Vec<WindowKind>,
    pub fft_lens: Vec<usize>,
    /// Timed repetitions per configuration.
    pub timing_runs: usize,
}

impl Default for StftSweepOptions {
    fn default() -> Self {
        StftSweepOptions {
            windows: vec![WindowKind::Blackman, WindowKind::Hamming, WindowKind::Hann],
            fft_lens: vec![8192, 16384, 32768],
            timing_runs: 100,
        }
    }
}

/// Accuracy and mean STFT+MFP time for every window and FFT length.
///
/// Uses the baseline movement rows when the source has any, otherwise
/// every row. The band-pass output does not depend on the swept
/// parameters, so each recording is filtered once and timing covers the
/// STFT and frame-averaging stage on the first recording. Runs are
/// interleaved across configurations so slow drift affects all alike.
pub fn stft_sweep(source: &dyn RecordingSource, cfg: &PipelineConfig, opts: &StftSweepOptions) -> Result<Report, PipelineError> {
    if opts.windows.is_empty() || opts.fft_lens.is_empty() {
        return Err(PipelineError::Config("empty STFT sweep grid".into()));
    }
    if opts.timing_runs == 0 {
        return Err(PipelineError::Config("timing_runs must be positive".into()));
    }
    let mut indices: Vec<usize> = (0..source.len()).filter(|&i| is_baseline(&source.rows()[i])).collect();
    if indices.is_empty() {
        indices = (0..source.len()).collect();
    }
    if indices.is_empty() {
        return Err(PipelineError::Data("manifest has no rows".into()));
    }
    let extractor = FeatureExtractor::new(cfg)?;
    let mut configs = Vec::new();
    for &w in &opts.windows {
        for &n in &opts.fft_lens {
            let c = PipelineConfig {
                window: w,
                fft_len: n,
                hop: None,
                ..cfg.clone()
            };
            c.validate()?;
            let ex = MfpExtractor::new(n, c.hop(), w).map_err(|e| PipelineError::dsp("stft setup", e))?;
            configs.push((c, ex));
        }
    }

    let mut mfps: Vec<Vec<Vec<f64>>> = vec![Vec::with_capacity(indices.len()); configs.len()];
    let mut labels = Vec::with_capacity(indices.len());
    let mut timing_input = None;
    for &i in &indices {
        let rec = source.load(i)?;
        let filtered = extractor.filtered(&rec)?;
        for (slot, (_, ex)) in mfps.iter_mut().zip(&configs) {
            let m = ex
                .mfp(&filtered, cfg.sample_rate_hz)
                .map_err(|e| PipelineError::dsp("stft", e).with_context(&source.rows()[i].path))?;
            slot.push(m.values);
        }
        labels.push(source.rows()[i].label.clone());
        if timing_input.is_none() {
            timing_input = Some(filtered);
        }
    }

    let input = timing_input.expect("at least one row");
    let mut total_s = vec![0.0f64; configs.len()];
    for (_, ex) in &configs {
        black_box(ex.mfp(&input, cfg.sample_rate_hz).map_err(|e| PipelineError::dsp("stft", e))?);
    }
    // Rotate the starting configuration each run so no setting always
    // runs first or last.
    for run in 0..opts.timing_runs {
        for j in 0..configs.len() {
            let k = (run + j) % configs.len();
            let start = Instant::now();
            let out = configs[k].1.mfp(black_box(&input), cfg.sample_rate_hz);
            total_s[k] += start.elapsed().as_secs_f64();
            black_box(out).map_err(|e| PipelineError::dsp("stft", e))?;
        }
    }

    let columns: Vec<String> = opts.fft_lens.iter().map(|n| n.to_string()).collect();
    let mut acc_table = Table::new("accuracy", columns.clone());
    let mut time_table = Table::new("time_ms", columns);
    let mut best: Option<(f64, String)> = None;
    let mut metrics = Vec::new();
    for (wi, w) in opts.windows.iter().enumerate() {
        let mut acc_row = Vec::new();
        let mut time_row = Vec::new();
        for (ni, n) in opts.fft_lens.iter().enumerate() {
            let k = wi * opts.fft_lens.len() + ni;
            let name = format!("{w}/{n}");
            let (_, _, m) = holdout(&configs[k].0, &mfps[k], &labels).map_err(|e| e.with_context(&name))?;
            if best.as_ref().is_none_or(|(a, _)| m.accuracy > *a) {
                best = Some((m.accuracy, name.clone()));
            }
            acc_row.push(Some(m.accuracy));
            time_row.push(Some(1e3 * total_s[k] / opts.timing_runs as f64));
            metrics.push((name, m));
        }
        let label = capitalized(&w.to_string());
        acc_table.rows.push((label.clone(), acc_row));
        time_table.rows.push((label, time_row));
    }
    let mut report = Report::new(ExperimentKind::StftSweep);
    report.tables = vec![acc_table, time_table];
    report.metrics = metrics;
    let (best_acc, best_name) = best.expect("non-empty grid");
    report.summary.push(format!("best accuracy {best_acc:.4} at {best_name}"));
    report.summary.push(format!(
        "timing: mean of {} runs of STFT + mean frequency profile on a {}-sample input",
        opts.timing_runs,
        input.len()
    ));
    Ok(report)
}

fn capitalized(s: &str) -> String {
    let mut c = s.chars();
    c.next().map(|f| f.to_ascii_uppercase().to_string() + c.as_str()).unwrap_or_default()
}

/// Default Welch segment length for band exploration.
pub const BAND_EXPLORE_FFT_LEN: usize = 4096;

/// Averaged raw (unfiltered) spectrum of a dataset with the frequencies
/// where it stays within 20 dB of its maximum.
#[derive(Debug, Clone, PartialEq)]
pub struct PsdSummary {
    /// Ascending, `-fs/2 .. fs/2`.
    pub freqs_hz: Vec<f64>,
    pub psd: Vec<f64>,
    pub samples: usize,
    /// Local maxima within 20 dB of the global maximum, strongest first.
    pub peaks_hz: Vec<f64>,
    /// Smallest and largest `|f|` with power within 20 dB of the maximum.
    pub rolloff_low_hz: f64,
    pub rolloff_high_hz: f64,
    pub band_low_hz: f64,
    pub band_high_hz: f64,
    pub warnings: Vec<String>,
}

const ROLLOFF_DB: f64 = 20.0;
const MAX_PEAKS: usize = 16;

impl PsdSummary {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "averaged PSD over {} recording(s), {} bins", self.samples, self.psd.len());
        let _ = writeln!(s, "configured band: {} - {} Hz", self.band_low_hz, self.band_high_hz);
        let _ = writeln!(s, "-{ROLLOFF_DB} dB extent: {:.0} - {:.0} Hz", self.rolloff_low_hz, self.rolloff_high_hz);
        let peaks: Vec<String> = self.peaks_hz.iter().map(|f| format!("{f:.0}")).collect();
        let _ = writeln!(s, "peaks (Hz): {}", peaks.join(", "));
        for w in &self.warnings {
            let _ = writeln!(s, "warning: {w}");
        }
        s
    }

    /// `freq_hz,psd,psd_db` with dB relative to the maximum.
    pub fn to_csv(&self) -> String {
        let max = self.psd.iter().cloned().fold(0.0, f64::max);
        let mut s = String::from("freq_hz,psd,psd_db\n");
        for (f, p) in self.freqs_hz.iter().zip(&self.psd) {
            let db = 10.0 * (p / max).log10();
            let _ = writeln!(s, "{f},{p},{db}");
        }
        s
    }
}

pub fn band_explore(source: &dyn RecordingSource, cfg: &PipelineConfig, fft_len: usize) -> Result<PsdSummary, PipelineError> {
    if source.is_empty() {
        return Err(PipelineError::Data("manifest has no rows".into()));
    }
    let mut acc = vec![0.0; fft_len];
    for i in 0..source.len() {
        let rec = source.load(i)?;
        if rec.sample_rate_hz() != cfg.sample_rate_hz {
            return Err(PipelineError::Data(format!("{}: sample rate differs from configuration", source.rows()[i].path)));
        }
        let p = welch_psd(&rec, fft_len, cfg.window).map_err(|e| PipelineError::dsp("welch", e).with_context(&source.rows()[i].path))?;
        acc.iter_mut().zip(&p).for_each(|(a, v)| *a += v);
    }
    let n = source.len() as f64;
    acc.iter_mut().for_each(|a| *a /= n);
    Ok(summarize_psd(&acc, cfg, source.len()))
}

fn summarize_psd(psd_unshifted: &[f64], cfg: &PipelineConfig, samples: usize) -> PsdSummary {
    let n = psd_unshifted.len();
    let fs = cfg.sample_rate_hz;
    // fftshift so frequencies ascend.
    let half = n.div_ceil(2);
    let order: Vec<usize> = (half..n).chain(0..half).collect();
    let freqs_hz: Vec<f64> = order
        .iter()
        .map(|&k| if k < half { k as f64 } else { k as f64 - n as f64 } * fs / n as f64)
        .collect();
    let psd: Vec<f64> = order.iter().map(|&k| psd_unshifted[k]).collect();
    let max = psd.iter().cloned().fold(0.0, f64::max);
    let threshold = max * 10f64.powf(-ROLLOFF_DB / 10.0);

    let strong: Vec<usize> = (0..n).filter(|&i| max > 0.0 && psd[i] >= threshold).collect();
    let rolloff_low_hz = strong.iter().map(|&i| freqs_hz[i].abs()).fold(f64::INFINITY, f64::min);
    let rolloff_high_hz = strong.iter().map(|&i| freqs_hz[i].abs()).fold(0.0, f64::max);

    let mut peaks: Vec<usize> = strong
        .iter()
        .copied()
        .filter(|&i| (i == 0 || psd[i] > psd[i - 1]) && (i + 1 == n || psd[i] >= psd[i + 1]))
        .collect();
    peaks.sort_by(|&a, &b| psd[b].total_cmp(&psd[a]));
    peaks.truncate(MAX_PEAKS);
    let peaks_hz: Vec<f64> = peaks.iter().map(|&i| freqs_hz[i]).collect();

    let mut warnings = Vec::new();
    if max == 0.0 {
        warnings.push("spectrum is identically zero".to_string());
    } else {
        let (lo, hi) = (cfg.band_low_hz, cfg.band_high_hz);
        if rolloff_high_hz > hi {
            warnings.push(format!("power within {ROLLOFF_DB} dB of the peak extends to {rolloff_high_hz:.0} Hz, above the {hi} Hz band edge"));
        }
        if rolloff_low_hz < lo {
            warnings.push(format!("power within {ROLLOFF_DB} dB of the peak starts at {rolloff_low_hz:.0} Hz, below the {lo} Hz band edge"));
        }
        for f in &peaks_hz {
            if f.abs() < lo || f.abs() > hi {
                warnings.push(format!("peak at {f:.0} Hz lies outside the configured band"));
            }
        }
    }
    PsdSummary {
        freqs_hz,
        psd,
        samples,
        peaks_hz,
        rolloff_low_hz: if rolloff_low_hz.is_finite() { rolloff_low_hz } else { 0.0 },
        rolloff_high_hz,
        band_low_hz: cfg.band_low_hz,
        band_high_hz: cfg.band_high_hz,
        warnings,
    }
}
