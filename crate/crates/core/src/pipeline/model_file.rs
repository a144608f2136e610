//! Versioned text model format.
//!
//! One `key=value` pair per line in a fixed order. Scalars use Rust's
//! shortest round-trip float formatting; vectors are base64 of
//! little-endian `f64` bytes. Writing the same model twice gives the same
//! bytes.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use base64::engine::general_purpose::STANDARD;
use base64::Engine as _;

use crate::classify::{BinaryMachine, Kernel, SvmModel, SvmParams};
use crate::features::{PcaModel, Scaler};

use super::{Classifier, FittedTransform, PipelineConfig, PipelineError};

pub const FORMAT_NAME: &str = "rfprint-model";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct ModelFile {
    pub format_version: u32,
    pub config: PipelineConfig,
    pub classifier: Classifier,
    /// SHA-256 of the training manifest.
    pub manifest_digest: String,
    pub training_rows: usize,
    /// Accuracy on the training split, recomputable from the manifest.
    pub training_accuracy: f64,
}

fn encode_f64s(v: &[f64]) -> String {
    let mut bytes = Vec::with_capacity(v.len() * 8);
    for x in v {
        bytes.extend_from_slice(&x.to_le_bytes());
    }
    STANDARD.encode(bytes)
}

fn bad(detail: impl Into<String>) -> PipelineError {
    PipelineError::ModelFile(detail.into())
}

fn decode_f64s(key: &str, s: &str, expected: usize) -> Result<Vec<f64>, PipelineError> {
    let bytes = STANDARD.decode(s).map_err(|e| bad(format!("{key}: {e}")))?;
    if bytes.len() != expected * 8 {
        return Err(bad(format!("{key}: expected {expected} values, found {} bytes", bytes.len())));
    }
    Ok(bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect())
}

struct Fields(BTreeMap<String, String>);

impl Fields {
    fn str(&self, key: &str) -> Result<&str, PipelineError> {
        self.0.get(key).map(String::as_str).ok_or_else(|| bad(format!("missing key {key}")))
    }

    fn num<T: std::str::FromStr>(&self, key: &str) -> Result<T, PipelineError>
    where
        T::Err: std::fmt::Display,
    {
        self.str(key)?.parse().map_err(|e| bad(format!("{key}: {e}")))
    }

    fn vec(&self, key: &str, n: usize) -> Result<Vec<f64>, PipelineError> {
        decode_f64s(key, self.str(key)?, n)
    }

    fn matrix(&self, key: &str, rows: usize, cols: usize) -> Result<Vec<Vec<f64>>, PipelineError> {
        let flat = self.vec(key, rows * cols)?;
        Ok(if cols == 0 {
            vec![Vec::new(); rows]
        } else {
            flat.chunks_exact(cols).map(<[f64]>::to_vec).collect()
        })
    }
}

impl ModelFile {
    pub fn to_text(&self) -> Result<String, PipelineError> {
        let mut s = String::new();
        let mut kv = |k: &str, v: &dyn std::fmt::Display| {
            let _ = writeln!(s, "{k}={v}");
        };
        kv("format", &FORMAT_NAME);
        kv("format_version", &self.format_version);
        kv("manifest_digest", &self.manifest_digest);
        kv("training_rows", &self.training_rows);
        kv("training_accuracy", &format!("{:?}", self.training_accuracy));
        for (k, v) in self.config.to_pairs() {
            kv(&format!("config.{k}"), &v);
        }

        let FittedTransform { pca, scaler } = &self.classifier.transform;
        let k = pca.n_components();
        kv("pca.dim", &pca.dim());
        kv("pca.components", &k);
        kv("pca.mean", &encode_f64s(&pca.mean));
        kv("pca.vectors", &encode_f64s(&pca.components.concat()));
        kv("pca.explained_variance", &encode_f64s(&pca.explained_variance));
        kv("pca.explained_variance_ratio", &encode_f64s(&pca.explained_variance_ratio));
        kv("scaler.dim", &scaler.means.len());
        kv("scaler.means", &encode_f64s(&scaler.means));
        kv("scaler.stds", &encode_f64s(&scaler.stds));
        let constant: String = scaler.constant.iter().map(|&c| if c { '1' } else { '0' }).collect();
        kv("scaler.constant", &constant);

        let svm = &self.classifier.svm;
        kv("svm.dim", &svm.dim);
        kv("svm.kernel", &svm.params.kernel);
        kv("svm.c", &format!("{:?}", svm.params.c));
        kv("svm.gamma", &format!("{:?}", svm.params.gamma));
        kv("svm.tol", &format!("{:?}", svm.params.tol));
        kv("svm.max_iter", &svm.params.max_iter);
        kv("svm.classes", &svm.classes.len());
        for (i, c) in svm.classes.iter().enumerate() {
            if c.contains(['\n', '\r']) {
                return Err(bad(format!("class label {c:?} contains a line break")));
            }
            kv(&format!("svm.class.{i}"), c);
        }
        kv("svm.machines", &svm.machines.len());
        for (i, m) in svm.machines.iter().enumerate() {
            let p = format!("svm.machine.{i}");
            kv(&format!("{p}.positive"), &m.positive);
            kv(&format!("{p}.negative"), &m.negative);
            kv(&format!("{p}.bias"), &format!("{:?}", m.bias));
            kv(&format!("{p}.iterations"), &m.iterations);
            kv(&format!("{p}.converged"), &m.converged);
            kv(&format!("{p}.support_vectors"), &m.support_vectors.len());
            kv(&format!("{p}.alphas"), &encode_f64s(&m.alphas));
            kv(&format!("{p}.signs"), &encode_f64s(&m.signs));
            kv(&format!("{p}.vectors"), &encode_f64s(&m.support_vectors.concat()));
            match &m.weights {
                Some(w) => kv(&format!("{p}.weights"), &encode_f64s(w)),
                None => kv(&format!("{p}.weights"), &"none"),
            }
        }
        Ok(s)
    }

    pub fn from_text(text: &str) -> Result<Self, PipelineError> {
        let mut map = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| bad(format!("line {}: expected key=value", n + 1)))?;
            if map.insert(k.to_string(), v.to_string()).is_some() {
                return Err(bad(format!("line {}: duplicate key {k}", n + 1)));
            }
        }
        let f = Fields(map);
        if f.str("format")? != FORMAT_NAME {
            return Err(bad(format!("not a {FORMAT_NAME} file")));
        }
        let format_version: u32 = f.num("format_version")?;
        if format_version != FORMAT_VERSION {
            return Err(bad(format!("unsupported format version {format_version} (this build reads {FORMAT_VERSION})")));
        }

        let config_pairs: BTreeMap<String, String> = f
            .0
            .iter()
            .filter_map(|(k, v)| k.strip_prefix("config.").map(|k| (k.to_string(), v.clone())))
            .collect();
        let config = PipelineConfig::from_pairs(&config_pairs)?;

        let d: usize = f.num("pca.dim")?;
        let k: usize = f.num("pca.components")?;
        let pca = PcaModel {
            mean: f.vec("pca.mean", d)?,
            components: f.matrix("pca.vectors", k, d)?,
            explained_variance: f.vec("pca.explained_variance", k)?,
            explained_variance_ratio: f.vec("pca.explained_variance_ratio", k)?,
        };
        let sd: usize = f.num("scaler.dim")?;
        let constant = f
            .str("scaler.constant")?
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(bad("scaler.constant: expected 0/1 flags")),
            })
            .collect::<Result<Vec<bool>, _>>()?;
        if constant.len() != sd {
            return Err(bad("scaler.constant: wrong length"));
        }
        let scaler = Scaler {
            means: f.vec("scaler.means", sd)?,
            stds: f.vec("scaler.stds", sd)?,
            constant,
        };

        let dim: usize = f.num("svm.dim")?;
        let params = SvmParams {
            c: f.num("svm.c")?,
            kernel: f.str("svm.kernel")?.parse::<Kernel>().map_err(|e| bad(e.to_string()))?,
            gamma: f.num("svm.gamma")?,
            tol: f.num("svm.tol")?,
            max_iter: f.num("svm.max_iter")?,
        };
        let n_classes: usize = f.num("svm.classes")?;
        let classes = (0..n_classes)
            .map(|i| f.str(&format!("svm.class.{i}")).map(str::to_string))
            .collect::<Result<Vec<_>, _>>()?;
        let n_machines: usize = f.num("svm.machines")?;
        let mut machines = Vec::with_capacity(n_machines);
        for i in 0..n_machines {
            let p = format!("svm.machine.{i}");
            let n_sv: usize = f.num(&format!("{p}.support_vectors"))?;
            let weights = match f.str(&format!("{p}.weights"))? {
                "none" => None,
                _ => Some(f.vec(&format!("{p}.weights"), dim)?),
            };
            let m = BinaryMachine {
                positive: f.num(&format!("{p}.positive"))?,
                negative: f.num(&format!("{p}.negative"))?,
                support_vectors: f.matrix(&format!("{p}.vectors"), n_sv, dim)?,
                alphas: f.vec(&format!("{p}.alphas"), n_sv)?,
                signs: f.vec(&format!("{p}.signs"), n_sv)?,
                bias: f.num(&format!("{p}.bias"))?,
                weights,
                iterations: f.num(&format!("{p}.iterations"))?,
                converged: f.num(&format!("{p}.converged"))?,
            };
            if m.positive >= n_classes || m.negative >= n_classes {
                return Err(bad(format!("{p}: class index out of range")));
            }
            machines.push(m);
        }
        if pca.n_components() != sd || sd != dim {
            return Err(bad(format!("stage dimensions disagree: pca {k}, scaler {sd}, svm {dim}")));
        }

        Ok(ModelFile {
            format_version,
            config,
            classifier: Classifier {
                transform: FittedTransform { pca, scaler },
                svm: SvmModel { classes, machines, params, dim },
            },
            manifest_digest: f.str("manifest_digest")?.to_string(),
            training_rows: f.num("training_rows")?,
            training_accuracy: f.num("training_accuracy")?,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), PipelineError> {
        let path = path.as_ref();
        fs::write(path, self.to_text()?).map_err(|e| bad(format!("cannot write {}: {e}", path.display())))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, PipelineError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| bad(format!("cannot read {}: {e}", path.display())))?;
        Self::from_text(&text).map_err(|e| match e {
            PipelineError::ModelFile(d) => bad(format!("{}: {d}", path.display())),
            other => other,
        })
    }
}
