//! Wundt-curve valence and the acceptable prediction error range.
//!
//! Valence is a reward sigmoid minus an aversion sigmoid of the information
//! gain. Past the peak the curve falls through zero at a single gain `G*`;
//! the acceptable range is the squared initial prediction error whose gain
//! at exposure `n` equals `G*`.

use serde::{Deserialize, Serialize};

use crate::belief::HabituationParams;
use crate::error::{finite, positive, Error, Result};
use crate::gain::gain_terms;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawWundt")]
pub struct WundtParams {
    reward_threshold: f64,
    aversion_threshold: f64,
    reward_max: f64,
    aversion_max: f64,
    gradient: f64,
}

#[derive(Deserialize)]
struct RawWundt {
    reward_threshold: f64,
    aversion_threshold: f64,
    reward_max: f64,
    aversion_max: f64,
    gradient: f64,
}

impl TryFrom<RawWundt> for WundtParams {
    type Error = Error;

    fn try_from(raw: RawWundt) -> Result<Self> {
        WundtParams::new(
            raw.reward_threshold,
            raw.aversion_threshold,
            raw.reward_max,
            raw.aversion_max,
            raw.gradient,
        )
    }
}

impl Default for WundtParams {
    fn default() -> Self {
        Self {
            reward_threshold: 0.5,
            aversion_threshold: 1.5,
            reward_max: 1.0,
            aversion_max: 1.2,
            gradient: 5.0,
        }
    }
}

impl WundtParams {
    /// Validated constructor: aversion must peak higher and engage later than
    /// reward, and the curve must cross zero from above.
    pub fn new(
        reward_threshold: f64,
        aversion_threshold: f64,
        reward_max: f64,
        aversion_max: f64,
        gradient: f64,
    ) -> Result<Self> {
        let w = Self::relaxed(
            reward_threshold,
            aversion_threshold,
            reward_max,
            aversion_max,
            gradient,
        )?;
        if !(w.aversion_max > w.reward_max) {
            return Err(Error::Shape(format!(
                "aversion_max ({}) must exceed reward_max ({})",
                w.aversion_max, w.reward_max
            )));
        }
        if !(w.aversion_threshold > w.reward_threshold) {
            return Err(Error::Shape(format!(
                "aversion_threshold ({}) must exceed reward_threshold ({})",
                w.aversion_threshold, w.reward_threshold
            )));
        }
        // (h_a e^{cG_r} - h_r e^{cG_a}) / (h_r - h_a) > 0  <=>  h_r > h_a e^{-c(G_a - G_r)}
        let decay = (-w.gradient * (w.aversion_threshold - w.reward_threshold)).exp();
        if !(w.reward_max > w.aversion_max * decay) {
            return Err(Error::Shape(
                "valence never becomes positive: reward_max <= aversion_max * exp(-c (G_a - G_r))"
                    .into(),
            ));
        }
        Ok(w)
    }

    /// Only checks that every field is finite and the maxima and gradient are
    /// positive. Curves built this way may have no zero crossing.
    pub fn relaxed(
        reward_threshold: f64,
        aversion_threshold: f64,
        reward_max: f64,
        aversion_max: f64,
        gradient: f64,
    ) -> Result<Self> {
        Ok(Self {
            reward_threshold: finite("reward_threshold", reward_threshold)?,
            aversion_threshold: finite("aversion_threshold", aversion_threshold)?,
            reward_max: positive("reward_max", reward_max)?,
            aversion_max: positive("aversion_max", aversion_max)?,
            gradient: positive("gradient", gradient)?,
        })
    }

    pub fn reward_threshold(&self) -> f64 {
        self.reward_threshold
    }

    pub fn aversion_threshold(&self) -> f64 {
        self.aversion_threshold
    }

    pub fn reward_max(&self) -> f64 {
        self.reward_max
    }

    pub fn aversion_max(&self) -> f64 {
        self.aversion_max
    }

    pub fn gradient(&self) -> f64 {
        self.gradient
    }

    /// Same curve translated along the gain axis.
    pub fn shifted(&self, by: f64) -> Result<Self> {
        Self::new(
            self.reward_threshold + by,
            self.aversion_threshold + by,
            self.reward_max,
            self.aversion_max,
            self.gradient,
        )
    }
}

fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Valence of a given information gain (nats).
pub fn valence(gain: f64, wundt: &WundtParams) -> f64 {
    let c = wundt.gradient;
    wundt.reward_max * logistic(c * (gain - wundt.reward_threshold))
        - wundt.aversion_max * logistic(c * (gain - wundt.aversion_threshold))
}

/// `G*` from the closed form `(1/c) ln((h_a e^{c G_r} - h_r e^{c G_a}) / (h_r - h_a))`,
/// rearranged around `G_a` so large `c * G` does not overflow.
pub fn crossing_closed_form(wundt: &WundtParams) -> Result<f64> {
    let c = wundt.gradient;
    let num = wundt.reward_max
        - wundt.aversion_max * (c * (wundt.reward_threshold - wundt.aversion_threshold)).exp();
    let den = wundt.aversion_max - wundt.reward_max;
    let arg = num / den;
    if !(arg > 0.0 && arg.is_finite()) {
        return Err(Error::Shape("closed-form crossing argument is not positive".into()));
    }
    Ok(wundt.aversion_threshold + arg.ln() / c)
}

/// Gain at which valence turns from positive to negative, by bracketed bisection.
pub fn positive_gain_crossing(wundt: &WundtParams) -> Result<f64> {
    let v = |g: f64| valence(g, wundt);
    let step0 = 1.0 / wundt.gradient;
    let no_crossing = || Error::Shape("valence has no positive-to-negative crossing".into());

    let mut lo = wundt.reward_threshold.min(wundt.aversion_threshold);
    let mut step = step0;
    let mut tries = 0;
    while !(v(lo) > 0.0) {
        lo -= step;
        step *= 2.0;
        tries += 1;
        if tries > 60 {
            return Err(no_crossing());
        }
    }
    let mut hi = wundt.reward_threshold.max(wundt.aversion_threshold);
    step = step0;
    tries = 0;
    while !(v(hi) < 0.0) {
        hi += step;
        step *= 2.0;
        tries += 1;
        if tries > 60 {
            return Err(no_crossing());
        }
    }

    // Bisect until the bracket cannot shrink further in f64.
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if v(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let root = if v(lo).abs() <= v(hi).abs() { lo } else { hi };
    Ok(root)
}

/// Which expression produces the acceptable prediction error range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RangeFormula {
    /// `(2 G* - A_n) / B_n` with `G*` the numerical zero crossing.
    #[default]
    Consistent,
    /// `|(1/c) ln((h_a e^{G_r} - h_r e^{G_a}) / (h_r - h_a)) - A_n| / B_n`, evaluated
    /// exactly as printed in the original model (no `c` in the exponents, no
    /// factor 2). Kept for comparison output only; its zero does not satisfy `V = 0`.
    Literal,
}

/// Squared initial prediction error at which the gain of exposure `n` sits on
/// the valence zero crossing.
pub fn acceptable_prediction_error(
    params: &HabituationParams,
    wundt: &WundtParams,
    n: u32,
) -> Result<f64> {
    acceptable_prediction_error_with(params, wundt, n, RangeFormula::Consistent)
}

pub fn acceptable_prediction_error_with(
    params: &HabituationParams,
    wundt: &WundtParams,
    n: u32,
    formula: RangeFormula,
) -> Result<f64> {
    let terms = gain_terms(params, n)?;
    if !(terms.b_term > 0.0) {
        return Err(Error::Degenerate(
            "mean-shift coefficient B is zero (learning rate 0); acceptable range undefined",
        ));
    }
    match formula {
        RangeFormula::Consistent => {
            let target = 2.0 * positive_gain_crossing(wundt)?;
            if target < terms.a_term {
                return Err(Error::Shape(format!(
                    "2 G* = {target} is below the variance-contraction term A_{n} = {}",
                    terms.a_term
                )));
            }
            Ok((target - terms.a_term) / terms.b_term)
        }
        RangeFormula::Literal => {
            let arg = (wundt.aversion_max * wundt.reward_threshold.exp()
                - wundt.reward_max * wundt.aversion_threshold.exp())
                / (wundt.reward_max - wundt.aversion_max);
            if !(arg > 0.0 && arg.is_finite()) {
                return Err(Error::Shape(
                    "literal range formula has a non-positive logarithm argument".into(),
                ));
            }
            Ok((arg.ln() / wundt.gradient - terms.a_term).abs() / terms.b_term)
        }
    }
}
