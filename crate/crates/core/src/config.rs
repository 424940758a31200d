//! Run configuration: built-in defaults, then an optional flat JSON config
//! file, then command-line flags. Later layers win.
//!
//! Config keys mirror the flag names:
//!
//! ```json
//! { "delta": 4, "uncertainty": 1, "noise": 0.5, "alpha": 0.1, "steps": 10,
//!   "out": "fig.csv", "format": "csv", "seed": 7, "samples": 1000,
//!   "eq5-literal": false,
//!   "wundt": { "reward_threshold": 0.5, "aversion_threshold": 1.5,
//!              "reward_max": 1.0, "aversion_max": 1.2, "gradient": 5.0 } }
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::belief::{HabituationParams, DEFAULT_LEARNING_RATE};
use crate::error::{Error, Result};
use crate::experiments::emit::OutputFormat;
use crate::experiments::figures::FigureOverrides;
use crate::valence::WundtParams;

pub const DEFAULT_DELTA: f64 = 4.0;
pub const DEFAULT_UNCERTAINTY: f64 = 1.0;
pub const DEFAULT_NOISE: f64 = 0.5;
pub const DEFAULT_STEPS: u32 = 10;
pub const DEFAULT_SEED: u64 = 7;
pub const DEFAULT_SAMPLES: usize = 1000;

/// One configuration layer. Every field is optional; unset fields fall
/// through to the layer below.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ConfigLayer {
    pub delta: Option<f64>,
    pub uncertainty: Option<f64>,
    pub noise: Option<f64>,
    pub alpha: Option<f64>,
    pub steps: Option<u32>,
    pub out: Option<PathBuf>,
    pub format: Option<String>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub eq5_literal: Option<bool>,
    pub wundt: Option<WundtParams>,
}

impl ConfigLayer {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|source| Error::Json {
            context: format!("config file {}", path.display()),
            source,
        })
    }

    /// `self` over `below`.
    pub fn over(self, below: ConfigLayer) -> ConfigLayer {
        ConfigLayer {
            delta: self.delta.or(below.delta),
            uncertainty: self.uncertainty.or(below.uncertainty),
            noise: self.noise.or(below.noise),
            alpha: self.alpha.or(below.alpha),
            steps: self.steps.or(below.steps),
            out: self.out.or(below.out),
            format: self.format.or(below.format),
            seed: self.seed.or(below.seed),
            samples: self.samples.or(below.samples),
            eq5_literal: self.eq5_literal.or(below.eq5_literal),
            wundt: self.wundt.or(below.wundt),
        }
    }

    /// The explicitly set values as figure overrides (no built-in defaults).
    pub fn figure_overrides(&self) -> FigureOverrides {
        FigureOverrides {
            delta: self.delta,
            uncertainty: self.uncertainty,
            noise: self.noise,
            alpha: self.alpha,
            steps: self.steps,
            values: None,
            wundt: self.wundt,
            eq5_literal: self.eq5_literal,
        }
    }
}

/// Fully validated settings for one command.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: HabituationParams,
    pub wundt: Option<WundtParams>,
    pub out: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub seed: u64,
    pub samples: usize,
    pub eq5_literal: bool,
}

impl RunConfig {
    pub fn resolve(layer: &ConfigLayer) -> Result<Self> {
        let params = HabituationParams::new(
            layer.delta.unwrap_or(DEFAULT_DELTA),
            layer.uncertainty.unwrap_or(DEFAULT_UNCERTAINTY),
            layer.noise.unwrap_or(DEFAULT_NOISE),
            layer.alpha.unwrap_or(DEFAULT_LEARNING_RATE),
            layer.steps.unwrap_or(DEFAULT_STEPS),
        )?;
        let format = layer.format.as_deref().map(str::parse).transpose()?;
        let samples = layer.samples.unwrap_or(DEFAULT_SAMPLES);
        if samples == 0 {
            return Err(Error::domain("samples", 0.0, "must be >= 1"));
        }
        Ok(Self {
            params,
            wundt: layer.wundt,
            out: layer.out.clone(),
            format,
            seed: layer.seed.unwrap_or(DEFAULT_SEED),
            samples,
            eq5_literal: layer.eq5_literal.unwrap_or(false),
        })
    }

    pub fn wundt_or_default(&self) -> WundtParams {
        self.wundt.unwrap_or_default()
    }

    /// Output format: explicit flag, else the `--out` extension, else CSV.
    pub fn output_format(&self) -> OutputFormat {
        self.format
            .or_else(|| self.out.as_deref().and_then(OutputFormat::from_path))
            .unwrap_or(OutputFormat::Csv)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence_flags_over_file_over_defaults() {
        let file: ConfigLayer = serde_json::from_str(r#"{"delta": 6, "noise": 0.25, "steps": 3}"#).unwrap();
        let flags = ConfigLayer {
            delta: Some(8.0),
            ..Default::default()
        };
        let run = RunConfig::resolve(&flags.over(file)).unwrap();
        assert_eq!(run.params.initial_prediction_error(), 8.0);
        assert_eq!(run.params.noise(), 0.25);
        assert_eq!(run.params.exposures(), 3);
        assert_eq!(run.params.initial_uncertainty(), DEFAULT_UNCERTAINTY);
        assert_eq!(run.params.learning_rate(), 0.1);
        assert_eq!(run.seed, DEFAULT_SEED);
    }

    #[test]
    fn unknown_keys_and_bad_values_rejected() {
        assert!(serde_json::from_str::<ConfigLayer>(r#"{"deltaa": 1}"#).is_err());
        let bad_wundt = r#"{"wundt": {"reward_threshold": 0.5, "aversion_threshold": 1.5, "reward_max": 2.0, "aversion_max": 1.2, "gradient": 5.0}}"#;
        assert!(serde_json::from_str::<ConfigLayer>(bad_wundt).is_err());
        let layer = ConfigLayer {
            noise: Some(-1.0),
            ..Default::default()
        };
        assert!(RunConfig::resolve(&layer).is_err());
        let layer = ConfigLayer {
            format: Some("png".into()),
            ..Default::default()
        };
        assert!(RunConfig::resolve(&layer).is_err());
    }

    #[test]
    fn kebab_case_literal_flag() {
        let layer: ConfigLayer = serde_json::from_str(r#"{"eq5-literal": true}"#).unwrap();
        assert_eq!(layer.eq5_literal, Some(true));
    }

    #[test]
    fn output_format_inference() {
        let mut run = RunConfig::resolve(&ConfigLayer::default()).unwrap();
        assert_eq!(run.output_format(), OutputFormat::Csv);
        run.out = Some("x.svg".into());
        assert_eq!(run.output_format(), OutputFormat::Svg);
        run.format = Some(OutputFormat::Json);
        assert_eq!(run.output_format(), OutputFormat::Json);
    }

    #[test]
    fn missing_file_is_io_error() {
        assert!(matches!(
            ConfigLayer::from_file(Path::new("/nonexistent/config.json")),
            Err(Error::Io { .. })
        ));
    }
}
