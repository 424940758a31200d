use serde::{Deserialize, Serialize};

use super::figures::FigureSetup;
use super::sweep::SweepSpec;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub name: String,
    pub unit: String,
}

impl Axis {
    pub fn new(name: &str, unit: &str) -> Self {
        Self {
            name: name.to_owned(),
            unit: unit.to_owned(),
        }
    }

    /// `name [unit]`, or just the name when unitless.
    pub fn caption(&self) -> String {
        if self.unit.is_empty() {
            self.name.clone()
        } else {
            format!("{} [{}]", self.name, self.unit)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axes {
    pub x: Axis,
    pub y: Axis,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// Parameters that fully determine a dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    Figure(FigureSetup),
    Sweep(SweepSpec),
}

impl Provenance {
    /// Rebuilds the dataset this provenance describes.
    pub fn regenerate(&self) -> Result<Dataset> {
        match self {
            Provenance::Figure(setup) => super::figures::build_figure(setup, Default::default()),
            Provenance::Sweep(spec) => super::sweep::sweep(spec),
        }
    }
}

/// A labelled family of curves.
///
/// Every series is non-empty with strictly increasing finite `x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDataset")]
pub struct Dataset {
    label: String,
    axes: Axes,
    series: Vec<Series>,
    provenance: Provenance,
}

#[derive(Deserialize)]
struct RawDataset {
    label: String,
    axes: Axes,
    series: Vec<Series>,
    provenance: Provenance,
}

impl TryFrom<RawDataset> for Dataset {
    type Error = Error;

    fn try_from(raw: RawDataset) -> Result<Self> {
        Dataset::new(raw.label, raw.axes, raw.series, raw.provenance)
    }
}

impl Dataset {
    pub fn new(label: String, axes: Axes, series: Vec<Series>, provenance: Provenance) -> Result<Self> {
        if series.is_empty() {
            return Err(Error::Dataset(format!("`{label}` has no series")));
        }
        for s in &series {
            if s.points.is_empty() {
                return Err(Error::Dataset(format!("series `{}` is empty", s.label)));
            }
            if s.points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
                return Err(Error::Dataset(format!("series `{}` has a non-finite point", s.label)));
            }
            if s.points.windows(2).any(|w| !(w[1].0 > w[0].0)) {
                return Err(Error::Dataset(format!(
                    "series `{}` has non-increasing x values",
                    s.label
                )));
            }
        }
        Ok(Self {
            label,
            axes,
            series,
            provenance,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn axes(&self) -> &Axes {
        &self.axes
    }

    pub fn series(&self) -> &[Series] {
        &self.series
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn point_count(&self) -> usize {
        self.series.iter().map(|s| s.points.len()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::figures::{reproduce_figure, FigureId};

    fn sample() -> Dataset {
        reproduce_figure(FigureId::Fig2, &Default::default()).unwrap()
    }

    fn rebuild(points: Vec<(f64, f64)>) -> Result<Dataset> {
        let d = sample();
        Dataset::new(
            "t".into(),
            d.axes().clone(),
            vec![Series {
                label: "s".into(),
                points,
            }],
            d.provenance().clone(),
        )
    }

    #[test]
    fn invariants_enforced() {
        assert!(rebuild(vec![]).is_err());
        assert!(rebuild(vec![(1.0, 0.0), (1.0, 1.0)]).is_err());
        assert!(rebuild(vec![(2.0, 0.0), (1.0, 1.0)]).is_err());
        assert!(rebuild(vec![(1.0, f64::NAN)]).is_err());
        assert!(rebuild(vec![(1.0, 0.0), (2.0, 1.0)]).is_ok());
        let d = sample();
        assert!(Dataset::new("x".into(), d.axes().clone(), vec![], d.provenance().clone()).is_err());
    }

    #[test]
    fn json_rejects_invalid_dataset() {
        let d = sample();
        let mut value = serde_json::to_value(&d).unwrap();
        value["series"][0]["points"] = serde_json::json!([]);
        assert!(serde_json::from_value::<Dataset>(value).is_err());
    }

    #[test]
    fn provenance_regenerates() {
        let d = sample();
        assert_eq!(d.provenance().regenerate().unwrap(), d);
    }
}
