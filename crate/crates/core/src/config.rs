//! Run configuration and its flat `key = value` manifest form.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::clustering::InitMethod;
use crate::error::{Error, Result};
use crate::extraction::DEFAULT_MAX_LEN;
use crate::smoothing::Weighting;
use crate::table::FeatureSelection;

/// Where a side's label map comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum LabelSource {
    /// Learn classes with the exchange algorithm.
    Clusters { classes: usize },
    /// Read a `word<TAB>label` file.
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub source: PathBuf,
    pub target: PathBuf,
    pub alignment: PathBuf,
    pub source_labels: LabelSource,
    pub target_labels: LabelSource,
    pub iterations: usize,
    pub init: String,
    pub seed: u64,
    pub max_len: usize,
    pub features: FeatureSelection,
    pub weighting: Weighting,
    pub subsample: f64,
    pub output: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            source: PathBuf::new(),
            target: PathBuf::new(),
            alignment: PathBuf::new(),
            source_labels: LabelSource::Clusters { classes: 100 },
            target_labels: LabelSource::Clusters { classes: 100 },
            iterations: 30,
            init: "top-frequent".to_owned(),
            seed: 0,
            max_len: DEFAULT_MAX_LEN,
            features: FeatureSelection::default(),
            weighting: Weighting::CountNormalized,
            subsample: 1.0,
            output: PathBuf::from("out"),
        }
    }
}

fn label_fields(src: &LabelSource) -> (String, String) {
    match src {
        LabelSource::Clusters { classes } => (classes.to_string(), String::new()),
        LabelSource::File(path) => (String::new(), path.display().to_string()),
    }
}

impl RunConfig {
    pub fn init_method(&self) -> Result<InitMethod> {
        InitMethod::parse(&self.init, self.seed)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.subsample > 0.0 && self.subsample <= 1.0) {
            return Err(Error::Config(format!(
                "subsample {} outside (0, 1]",
                self.subsample
            )));
        }
        if self.max_len == 0 {
            return Err(Error::Config("max_len must be positive".into()));
        }
        for labels in [&self.source_labels, &self.target_labels] {
            if let LabelSource::Clusters { classes: 0 } = labels {
                return Err(Error::Config("class count must be positive".into()));
            }
        }
        self.init_method()?;
        Ok(())
    }

    /// Serializes every parameter in a fixed key order.
    pub fn to_manifest(&self) -> String {
        let (src_k, src_file) = label_fields(&self.source_labels);
        let (tgt_k, tgt_file) = label_fields(&self.target_labels);
        let fields: [(&str, String); 16] = [
            ("source", self.source.display().to_string()),
            ("target", self.target.display().to_string()),
            ("alignment", self.alignment.display().to_string()),
            ("source_classes", src_k),
            ("target_classes", tgt_k),
            ("source_labels", src_file),
            ("target_labels", tgt_file),
            ("iterations", self.iterations.to_string()),
            ("init", self.init.clone()),
            ("seed", self.seed.to_string()),
            ("max_len", self.max_len.to_string()),
            ("features", self.features.list()),
            ("feature_order", self.features.names().join(" ")),
            ("weighting", self.weighting.name().to_owned()),
            ("subsample", format!("{}", self.subsample)),
            ("output", self.output.display().to_string()),
        ];
        let mut out = String::new();
        for (k, v) in fields {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }

    pub fn from_manifest(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        let bad = |k: &str, v: &str| Error::Config(format!("bad manifest value `{k} = {v}`"));
        let mut src_k = None;
        let mut tgt_k = None;
        let mut src_file = None;
        let mut tgt_file = None;
        for line in text
            .lines()
            .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        {
            let (k, v) = line
                .split_once(" = ")
                .or_else(|| line.strip_suffix(" =").map(|k| (k, "")))
                .ok_or_else(|| Error::Config(format!("malformed manifest line `{line}`")))?;
            match k {
                "source" => cfg.source = v.into(),
                "target" => cfg.target = v.into(),
                "alignment" => cfg.alignment = v.into(),
                "source_classes" if !v.is_empty() => {
                    src_k = Some(v.parse().map_err(|_| bad(k, v))?)
                }
                "target_classes" if !v.is_empty() => {
                    tgt_k = Some(v.parse().map_err(|_| bad(k, v))?)
                }
                "source_labels" if !v.is_empty() => src_file = Some(PathBuf::from(v)),
                "target_labels" if !v.is_empty() => tgt_file = Some(PathBuf::from(v)),
                "source_classes" | "target_classes" | "source_labels" | "target_labels" => {}
                "iterations" => cfg.iterations = v.parse().map_err(|_| bad(k, v))?,
                "init" => cfg.init = v.to_owned(),
                "seed" => cfg.seed = v.parse().map_err(|_| bad(k, v))?,
                "max_len" => cfg.max_len = v.parse().map_err(|_| bad(k, v))?,
                "features" => cfg.features = FeatureSelection::parse(v)?,
                "feature_order" => {}
                "weighting" => cfg.weighting = Weighting::parse(v).ok_or_else(|| bad(k, v))?,
                "subsample" => cfg.subsample = v.parse().map_err(|_| bad(k, v))?,
                "output" => cfg.output = v.into(),
                other => return Err(Error::Config(format!("unknown manifest key `{other}`"))),
            }
        }
        let pick = |k: Option<usize>, f: Option<PathBuf>, side: &str| match (k, f) {
            (Some(classes), None) => Ok(LabelSource::Clusters { classes }),
            (None, Some(path)) => Ok(LabelSource::File(path)),
            _ => Err(Error::Config(format!(
                "manifest must give exactly one of {side}_classes and {side}_labels"
            ))),
        };
        cfg.source_labels = pick(src_k, src_file, "source")?;
        cfg.target_labels = pick(tgt_k, tgt_file, "target")?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load_manifest(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_manifest(&text)
    }
}

/// Writes the manifest for `config` to `path`.
pub fn emit_manifest(config: &RunConfig, path: &Path) -> Result<()> {
    fs::write(path, config.to_manifest()).map_err(|e| Error::io(path, e))
}
