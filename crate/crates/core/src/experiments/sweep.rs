use serde::{Deserialize, Serialize};

use super::dataset::{Axes, Axis, Dataset, Provenance, Series};
use crate::belief::HabituationParams;
use crate::dynamics::{prediction_error_at, uncertainty_at};
use crate::error::{Error, Result};
use crate::gain::step_gain;
use crate::par::Execution;
use crate::valence::{acceptable_prediction_error_with, valence, RangeFormula, WundtParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    InitialPredictionError,
    InitialUncertainty,
    Noise,
    LearningRate,
}

impl SweepParameter {
    pub fn symbol(self) -> &'static str {
        match self {
            SweepParameter::InitialPredictionError => "delta_i",
            SweepParameter::InitialUncertainty => "S_pl",
            SweepParameter::Noise => "S_l",
            SweepParameter::LearningRate => "alpha",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Some(match name {
            "delta" | "delta_i" | "initial_prediction_error" => SweepParameter::InitialPredictionError,
            "uncertainty" | "S_pl" | "initial_uncertainty" => SweepParameter::InitialUncertainty,
            "noise" | "S_l" => SweepParameter::Noise,
            "alpha" | "learning_rate" => SweepParameter::LearningRate,
            _ => return None,
        })
    }

    /// Copy of `params` with this parameter set to `value`.
    pub fn apply(self, params: HabituationParams, value: f64) -> Result<HabituationParams> {
        match self {
            SweepParameter::InitialPredictionError => params.with_initial_prediction_error(value),
            SweepParameter::InitialUncertainty => params.with_initial_uncertainty(value),
            SweepParameter::Noise => params.with_noise(value),
            SweepParameter::LearningRate => params.with_learning_rate(value),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Gain,
    PredictionError,
    Uncertainty,
    Valence,
    AcceptableRange,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::Gain => "gain",
            Metric::PredictionError => "prediction_error",
            Metric::Uncertainty => "uncertainty",
            Metric::Valence => "valence",
            Metric::AcceptableRange => "acceptable_range",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Some(match name {
            "gain" => Metric::Gain,
            "prediction_error" => Metric::PredictionError,
            "uncertainty" => Metric::Uncertainty,
            "valence" => Metric::Valence,
            "acceptable_range" => Metric::AcceptableRange,
            _ => return None,
        })
    }

    pub fn needs_wundt(self) -> bool {
        matches!(self, Metric::Valence | Metric::AcceptableRange)
    }

    pub fn y_axis(self) -> Axis {
        match self {
            Metric::Gain => Axis::new("information gain G_n", "nats"),
            Metric::PredictionError => Axis::new("prediction error delta_n", "feature units"),
            Metric::Uncertainty => Axis::new("uncertainty S_pn", "squared feature units"),
            Metric::Valence => Axis::new("valence V(G_n)", ""),
            Metric::AcceptableRange => {
                Axis::new("acceptable prediction error delta_g^2", "squared feature units")
            }
        }
    }

    /// Prediction error and uncertainty start at `n = 0`; the per-exposure
    /// metrics start at the first exposure.
    pub fn first_exposure(self) -> u32 {
        match self {
            Metric::PredictionError | Metric::Uncertainty => 0,
            _ => 1,
        }
    }
}

/// One series per value of `parameter`, all other parameters taken from
/// `fixed`. `steps` replaces `fixed.exposures`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
    pub fixed: HabituationParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wundt: Option<WundtParams>,
    pub metric: Metric,
    pub steps: u32,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub literal_range: bool,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::InvalidOverride {
                key: "values".into(),
                reason: "at least one value is required".into(),
            });
        }
        if self.steps < 1 {
            return Err(Error::domain("steps", f64::from(self.steps), "must be >= 1"));
        }
        if self.metric.needs_wundt() && self.wundt.is_none() {
            return Err(Error::MetricMismatch {
                metric: self.metric.name().into(),
                reason: "requires Wundt parameters".into(),
            });
        }
        if self.literal_range && self.metric != Metric::AcceptableRange {
            return Err(Error::MetricMismatch {
                metric: self.metric.name().into(),
                reason: "the literal range formula only applies to acceptable_range".into(),
            });
        }
        if self.metric == Metric::AcceptableRange
            && self.parameter == SweepParameter::InitialPredictionError
        {
            return Err(Error::MetricMismatch {
                metric: self.metric.name().into(),
                reason: "the acceptable range does not depend on the initial prediction error".into(),
            });
        }
        for &v in &self.values {
            self.parameter.apply(self.fixed, v)?;
        }
        Ok(())
    }

    fn formula(&self) -> RangeFormula {
        if self.literal_range {
            RangeFormula::Literal
        } else {
            RangeFormula::Consistent
        }
    }
}

/// Metric values over exposures for a single parameter tuple.
pub fn evaluate_series(
    params: &HabituationParams,
    wundt: Option<&WundtParams>,
    metric: Metric,
    steps: u32,
    formula: RangeFormula,
) -> Result<Vec<(f64, f64)>> {
    let need_wundt = || {
        wundt.ok_or_else(|| Error::MetricMismatch {
            metric: metric.name().into(),
            reason: "requires Wundt parameters".into(),
        })
    };
    (metric.first_exposure()..=steps)
        .map(|n| {
            let x = f64::from(n);
            let y = match metric {
                Metric::Gain => step_gain(params, n)?,
                Metric::PredictionError => prediction_error_at(params, x)?,
                Metric::Uncertainty => uncertainty_at(params, x)?,
                Metric::Valence => valence(step_gain(params, n)?, need_wundt()?),
                Metric::AcceptableRange => {
                    acceptable_prediction_error_with(params, need_wundt()?, n, formula)?
                }
            };
            Ok((x, y))
        })
        .collect()
}

pub fn series_label(parameter: SweepParameter, value: f64) -> String {
    format!("{}={}", parameter.symbol(), value)
}

pub fn sweep(spec: &SweepSpec) -> Result<Dataset> {
    sweep_with(spec, Execution::default())
}

pub fn sweep_with(spec: &SweepSpec, exec: Execution) -> Result<Dataset> {
    spec.validate()?;
    let fixed = spec.fixed.with_exposures(spec.steps)?;
    let formula = spec.formula();
    let evaluated = exec.map(&spec.values, |&value| -> Result<Series> {
        let params = spec.parameter.apply(fixed, value)?;
        Ok(Series {
            label: series_label(spec.parameter, value),
            points: evaluate_series(&params, spec.wundt.as_ref(), spec.metric, spec.steps, formula)?,
        })
    });
    let series = evaluated.into_iter().collect::<Result<Vec<_>>>()?;
    Dataset::new(
        format!("{} sweep over {}", spec.metric.name(), spec.parameter.symbol()),
        Axes {
            x: Axis::new("exposure n", ""),
            y: spec.metric.y_axis(),
        },
        series,
        Provenance::Sweep(spec.clone()),
    )
}
