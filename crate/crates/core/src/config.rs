//! Flat `key = value` run configuration shared by the CLI commands.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::engine::{TrackerConfig, Variant};
use crate::error::{Error, Result};

pub const KEYS: [&str; 19] = [
    "delta1",
    "delta2",
    "beam",
    "search_scale",
    "scales",
    "scale_penalty",
    "ltm_capacity",
    "stm_capacity",
    "gate_k",
    "radius_mult",
    "template_size",
    "attention_stride",
    "use_prior",
    "dataset",
    "output",
    "variant",
    "model",
    "seed",
    "presence_threshold",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub tracker: TrackerConfig,
    pub dataset: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub variant: Variant,
    pub model: Option<PathBuf>,
    pub seed: u64,
    pub presence_threshold: f64,
    explicit: BTreeSet<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            tracker: TrackerConfig::default(),
            dataset: None,
            output: None,
            variant: Variant::Bs3t,
            model: None,
            seed: 0,
            presence_threshold: crate::metrics::DEFAULT_PRESENCE_THRESHOLD,
            explicit: BTreeSet::new(),
        }
    }
}

fn num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("{key}: cannot parse {value:?}")))
}

fn boolean(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(Error::Config(format!("{key}: expected true or false, found {value:?}"))),
    }
}

impl RunConfig {
    /// Parses a config file body. Blank lines and `#` comments are skipped.
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut cfg = RunConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(path, i + 1, format!("expected key = value, found {line:?}")))?;
            cfg.set(key.trim(), value.trim())?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let t = &mut self.tracker;
        match key {
            "delta1" => t.delta1 = num(key, value)?,
            "delta2" => t.delta2 = num(key, value)?,
            "beam" => t.beam = num(key, value)?,
            "search_scale" => t.search_scale = num(key, value)?,
            "scales" => {
                t.scales = value
                    .split(',')
                    .map(|s| num(key, s.trim()))
                    .collect::<Result<Vec<f64>>>()?
            }
            "scale_penalty" => t.scale_penalty = num(key, value)?,
            "ltm_capacity" => t.ltm_capacity = num(key, value)?,
            "stm_capacity" => t.stm_capacity = num(key, value)?,
            "gate_k" => t.gate_k = num(key, value)?,
            "radius_mult" => t.radius_mult = num(key, value)?,
            "template_size" => t.template_size = num(key, value)?,
            "attention_stride" => t.attention_stride = num(key, value)?,
            "use_prior" => t.use_prior = boolean(key, value)?,
            "dataset" => self.dataset = Some(PathBuf::from(value)),
            "output" => self.output = Some(PathBuf::from(value)),
            "variant" => self.variant = value.parse()?,
            "model" => self.model = Some(PathBuf::from(value)),
            "seed" => self.seed = num(key, value)?,
            "presence_threshold" => self.presence_threshold = num(key, value)?,
            _ => return Err(Error::Config(format!("unknown key {key:?}"))),
        }
        self.explicit.insert(key.to_string());
        Ok(())
    }

    /// Applies a `key=value` override.
    pub fn set_pair(&mut self, pair: &str) -> Result<()> {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override {pair:?} is not key=value")))?;
        self.set(k.trim(), v.trim())
    }

    /// Resolves the beam from the variant and checks every field. An explicit
    /// `beam` must agree with the variant.
    pub fn finalize(mut self) -> Result<Self> {
        let want = self.variant.beam();
        if self.explicit.contains("beam") && self.tracker.beam != want {
            return Err(Error::Config(format!(
                "beam = {} conflicts with variant {} (beam {want})",
                self.tracker.beam, self.variant
            )));
        }
        self.tracker.beam = want;
        self.tracker.validate()?;
        if !(0.0..=1.0).contains(&self.presence_threshold) {
            return Err(Error::Config(format!(
                "presence_threshold = {} must lie in [0, 1]",
                self.presence_threshold
            )));
        }
        Ok(self)
    }

    /// Requirements that depend on the command: the TSN variant needs a model.
    pub fn require_model(&self) -> Result<&Path> {
        self.model
            .as_deref()
            .ok_or_else(|| Error::Config(format!("variant {} requires a model path", self.variant)))
    }

    /// Echo in the same `key=value` form the parser reads.
    pub fn to_text(&self) -> String {
        let t = &self.tracker;
        let mut s = String::new();
        let scales: Vec<String> = t.scales.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(s, "delta1={}", t.delta1);
        let _ = writeln!(s, "delta2={}", t.delta2);
        let _ = writeln!(s, "beam={}", t.beam);
        let _ = writeln!(s, "search_scale={}", t.search_scale);
        let _ = writeln!(s, "scales={}", scales.join(","));
        let _ = writeln!(s, "scale_penalty={}", t.scale_penalty);
        let _ = writeln!(s, "ltm_capacity={}", t.ltm_capacity);
        let _ = writeln!(s, "stm_capacity={}", t.stm_capacity);
        let _ = writeln!(s, "gate_k={}", t.gate_k);
        let _ = writeln!(s, "radius_mult={}", t.radius_mult);
        let _ = writeln!(s, "template_size={}", t.template_size);
        let _ = writeln!(s, "attention_stride={}", t.attention_stride);
        let _ = writeln!(s, "use_prior={}", t.use_prior);
        if let Some(p) = &self.dataset {
            let _ = writeln!(s, "dataset={}", p.display());
        }
        if let Some(p) = &self.output {
            let _ = writeln!(s, "output={}", p.display());
        }
        let _ = writeln!(s, "variant={}", self.variant);
        if let Some(p) = &self.model {
            let _ = writeln!(s, "model={}", p.display());
        }
        let _ = writeln!(s, "seed={}", self.seed);
        let _ = writeln!(s, "presence_threshold={}", self.presence_threshold);
        s
    }
}
