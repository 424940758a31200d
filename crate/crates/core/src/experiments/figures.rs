//! Figure datasets built from the versioned defaults in `defaults/figures.json`.
//!
//! | id   | series over            | fixed                 | metric              |
//! |------|------------------------|-----------------------|---------------------|
//! | fig1 | initial prediction err | initial uncertainty   | gain                |
//! | fig2 | initial uncertainty    | prediction error 4    | gain                |
//! | fig3 | initial uncertainty    | prediction error 10   | gain                |
//! | fig4 | initial uncertainty    | (none)                | acceptable range    |

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::dataset::Dataset;
use super::sweep::{sweep_with, Metric, SweepParameter, SweepSpec};
use crate::belief::HabituationParams;
use crate::error::{Error, Result};
use crate::par::Execution;
use crate::valence::WundtParams;

const DEFAULTS_JSON: &str = include_str!("../../defaults/figures.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FigureId {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
}

impl FigureId {
    pub const ALL: [FigureId; 4] = [FigureId::Fig1, FigureId::Fig2, FigureId::Fig3, FigureId::Fig4];
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FigureId::Fig1 => "fig1",
            FigureId::Fig2 => "fig2",
            FigureId::Fig3 => "fig3",
            FigureId::Fig4 => "fig4",
        })
    }
}

impl FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig1" => Ok(FigureId::Fig1),
            "fig2" => Ok(FigureId::Fig2),
            "fig3" => Ok(FigureId::Fig3),
            "fig4" => Ok(FigureId::Fig4),
            other => Err(Error::UnknownFigure(other.to_owned())),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FigureDefaults {
    pub version: u32,
    pub noise: f64,
    pub learning_rate: f64,
    pub fig1: PredictionErrorFamily,
    pub fig2: UncertaintyFamily,
    pub fig3: UncertaintyFamily,
    pub fig4: RangeFamily,
    pub wundt: WundtParams,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredictionErrorFamily {
    pub initial_uncertainty: f64,
    pub prediction_errors: Vec<f64>,
    pub exposures: u32,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UncertaintyFamily {
    pub initial_prediction_error: f64,
    pub uncertainties: Vec<f64>,
    pub exposures: u32,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeFamily {
    pub uncertainties: Vec<f64>,
    pub exposures: u32,
}

/// Shipped figure defaults.
pub fn figure_defaults() -> &'static FigureDefaults {
    static DEFAULTS: OnceLock<FigureDefaults> = OnceLock::new();
    DEFAULTS.get_or_init(|| {
        serde_json::from_str(DEFAULTS_JSON).expect("bundled defaults/figures.json is valid")
    })
}

/// Fully resolved inputs of one figure; stored as the dataset provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FigureSetup {
    pub figure: FigureId,
    pub defaults_version: u32,
    pub varying: SweepParameter,
    pub values: Vec<f64>,
    pub initial_prediction_error: f64,
    pub initial_uncertainty: f64,
    pub noise: f64,
    pub learning_rate: f64,
    pub exposures: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wundt: Option<WundtParams>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub literal_range: bool,
}

/// Optional replacements for a figure's defaults.
///
/// `delta` and `uncertainty` set the fixed parameter of the figure, or
/// replace the series set with a single value when that parameter is the one
/// being varied. `values` replaces the series set outright.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FigureOverrides {
    pub delta: Option<f64>,
    pub uncertainty: Option<f64>,
    pub noise: Option<f64>,
    pub alpha: Option<f64>,
    pub steps: Option<u32>,
    pub values: Option<Vec<f64>>,
    pub wundt: Option<WundtParams>,
    #[serde(rename = "eq5-literal", alias = "eq5_literal")]
    pub eq5_literal: Option<bool>,
}

impl FigureOverrides {
    /// Parses an override map, rejecting unknown keys and ill-typed values.
    pub fn from_map(map: &serde_json::Map<String, serde_json::Value>) -> Result<Self> {
        const KNOWN: [&str; 9] = [
            "delta", "uncertainty", "noise", "alpha", "steps", "values", "wundt", "eq5-literal",
            "eq5_literal",
        ];
        if let Some(key) = map.keys().find(|k| !KNOWN.contains(&k.as_str())) {
            return Err(Error::InvalidOverride {
                key: key.clone(),
                reason: "unknown parameter".into(),
            });
        }
        for (key, value) in map {
            let single = serde_json::Map::from_iter([(key.clone(), value.clone())]);
            serde_json::from_value::<FigureOverrides>(serde_json::Value::Object(single)).map_err(
                |e| Error::InvalidOverride {
                    key: key.clone(),
                    reason: e.to_string(),
                },
            )?;
        }
        serde_json::from_value(serde_json::Value::Object(map.clone())).map_err(|e| {
            Error::InvalidOverride {
                key: "<map>".into(),
                reason: e.to_string(),
            }
        })
    }
}

/// Applies `overrides` to the shipped defaults for `id`.
pub fn resolve_figure(id: FigureId, overrides: &FigureOverrides) -> Result<FigureSetup> {
    let d = figure_defaults();
    let mut setup = match id {
        FigureId::Fig1 => FigureSetup {
            figure: id,
            defaults_version: d.version,
            varying: SweepParameter::InitialPredictionError,
            values: d.fig1.prediction_errors.clone(),
            initial_prediction_error: d.fig1.prediction_errors[0],
            initial_uncertainty: d.fig1.initial_uncertainty,
            noise: d.noise,
            learning_rate: d.learning_rate,
            exposures: d.fig1.exposures,
            wundt: None,
            literal_range: false,
        },
        FigureId::Fig2 | FigureId::Fig3 => {
            let family = if id == FigureId::Fig2 { &d.fig2 } else { &d.fig3 };
            FigureSetup {
                figure: id,
                defaults_version: d.version,
                varying: SweepParameter::InitialUncertainty,
                values: family.uncertainties.clone(),
                initial_prediction_error: family.initial_prediction_error,
                initial_uncertainty: family.uncertainties[0],
                noise: d.noise,
                learning_rate: d.learning_rate,
                exposures: family.exposures,
                wundt: None,
                literal_range: false,
            }
        }
        FigureId::Fig4 => FigureSetup {
            figure: id,
            defaults_version: d.version,
            varying: SweepParameter::InitialUncertainty,
            values: d.fig4.uncertainties.clone(),
            initial_prediction_error: 0.0,
            initial_uncertainty: d.fig4.uncertainties[0],
            noise: d.noise,
            learning_rate: d.learning_rate,
            exposures: d.fig4.exposures,
            wundt: Some(d.wundt),
            literal_range: false,
        },
    };

    let varies_delta = setup.varying == SweepParameter::InitialPredictionError;
    if let Some(delta) = overrides.delta {
        setup.initial_prediction_error = delta;
        if varies_delta {
            setup.values = vec![delta];
        }
    }
    if let Some(unc) = overrides.uncertainty {
        setup.initial_uncertainty = unc;
        if !varies_delta {
            setup.values = vec![unc];
        }
    }
    if let Some(values) = &overrides.values {
        setup.values = values.clone();
    }
    if let Some(noise) = overrides.noise {
        setup.noise = noise;
    }
    if let Some(alpha) = overrides.alpha {
        setup.learning_rate = alpha;
    }
    if let Some(steps) = overrides.steps {
        setup.exposures = steps;
    }
    if let Some(wundt) = overrides.wundt {
        if id != FigureId::Fig4 {
            return Err(Error::InvalidOverride {
                key: "wundt".into(),
                reason: format!("{id} does not use Wundt parameters"),
            });
        }
        setup.wundt = Some(wundt);
    }
    if let Some(literal) = overrides.eq5_literal {
        if literal && id != FigureId::Fig4 {
            return Err(Error::InvalidOverride {
                key: "eq5-literal".into(),
                reason: format!("{id} does not plot the acceptable range"),
            });
        }
        setup.literal_range = literal;
    }
    setup.to_sweep()?.validate()?;
    Ok(setup)
}

impl FigureSetup {
    fn metric(&self) -> Metric {
        match self.figure {
            FigureId::Fig4 => Metric::AcceptableRange,
            _ => Metric::Gain,
        }
    }

    /// The equivalent sweep.
    pub fn to_sweep(&self) -> Result<SweepSpec> {
        let fixed = HabituationParams::new(
            self.initial_prediction_error,
            self.initial_uncertainty,
            self.noise,
            self.learning_rate,
            self.exposures,
        )
        .map_err(|e| Error::InvalidOverride {
            key: "parameters".into(),
            reason: e.to_string(),
        })?;
        Ok(SweepSpec {
            parameter: self.varying,
            values: self.values.clone(),
            fixed,
            wundt: self.wundt,
            metric: self.metric(),
            steps: self.exposures,
            literal_range: self.literal_range,
        })
    }
}

fn caption(setup: &FigureSetup) -> String {
    match setup.figure {
        FigureId::Fig1 => format!(
            "{}: information gain for different initial prediction errors (S_pl={}, S_l={}, alpha={})",
            setup.figure, setup.initial_uncertainty, setup.noise, setup.learning_rate
        ),
        FigureId::Fig2 | FigureId::Fig3 => format!(
            "{}: information gain for different initial uncertainties (delta_i={}, S_l={}, alpha={})",
            setup.figure, setup.initial_prediction_error, setup.noise, setup.learning_rate
        ),
        FigureId::Fig4 => format!(
            "{}: acceptable prediction error range for different initial uncertainties (S_l={}, alpha={})",
            setup.figure, setup.noise, setup.learning_rate
        ),
    }
}

/// Builds a dataset from a resolved setup.
pub fn build_figure(setup: &FigureSetup, exec: Execution) -> Result<Dataset> {
    let swept = sweep_with(&setup.to_sweep()?, exec)?;
    Dataset::new(
        caption(setup),
        swept.axes().clone(),
        swept.series().to_vec(),
        super::dataset::Provenance::Figure(setup.clone()),
    )
}

pub fn reproduce_figure(id: FigureId, overrides: &FigureOverrides) -> Result<Dataset> {
    reproduce_figure_with(id, overrides, Execution::default())
}

pub fn reproduce_figure_with(id: FigureId, overrides: &FigureOverrides, exec: Execution) -> Result<Dataset> {
    let setup = resolve_figure(id, overrides)?;
    build_figure(&setup, exec)
}
