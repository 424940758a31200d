use serde::Serialize;

use crate::belief::HabituationParams;
use crate::dynamics::{prediction_error_at, uncertainty_at};
use crate::error::Result;
use crate::gain::step_gain;
use crate::valence::{acceptable_prediction_error_with, valence, RangeFormula, WundtParams};

/// State after exposure `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectoryRow {
    pub n: u32,
    pub prediction_error: f64,
    pub uncertainty: f64,
    pub gain: f64,
    pub valence: Option<f64>,
    pub acceptable_range: Option<f64>,
}

/// Rows for `n = 1..=exposures`. Valence and acceptable range are filled when
/// Wundt parameters are given.
pub fn trajectory(
    params: &HabituationParams,
    wundt: Option<&WundtParams>,
    formula: RangeFormula,
) -> Result<Vec<TrajectoryRow>> {
    (1..=params.exposures())
        .map(|n| {
            let gain = step_gain(params, n)?;
            let (valence, acceptable_range) = match wundt {
                Some(w) => (
                    Some(valence(gain, w)),
                    Some(acceptable_prediction_error_with(params, w, n, formula)?),
                ),
                None => (None, None),
            };
            Ok(TrajectoryRow {
                n,
                prediction_error: prediction_error_at(params, f64::from(n))?,
                uncertainty: uncertainty_at(params, f64::from(n))?,
                gain,
                valence,
                acceptable_range,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_follow_closed_forms() {
        let p = HabituationParams::new(4.0, 1.0, 0.5, 0.1, 5).unwrap();
        let w = WundtParams::default();
        let rows = trajectory(&p, Some(&w), RangeFormula::Consistent).unwrap();
        assert_eq!(rows.len(), 5);
        assert_eq!(rows[0].n, 1);
        assert!((rows[0].gain - 0.2300497).abs() < 1e-7);
        assert!((rows[0].uncertainty - 0.5 / 0.6).abs() < 1e-15);
        assert!(rows[0].valence.unwrap() < rows[0].gain.max(1.0));
        assert!(rows.windows(2).all(|r| r[1].acceptable_range > r[0].acceptable_range));
        let bare = trajectory(&p, None, RangeFormula::Consistent).unwrap();
        assert!(bare.iter().all(|r| r.valence.is_none() && r.acceptable_range.is_none()));
    }
}
