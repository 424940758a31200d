//! Closed-form prediction error and uncertainty trajectories, their decay
//! rates in (continuous) exposure count, and the uncertainty crossover law.

use crate::belief::HabituationParams;
use crate::error::{positive, Error, Result};
use crate::gain::GainTerms;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayRates {
    /// d(delta_n)/dn
    pub prediction_error_rate: f64,
    /// d(S_pn)/dn
    pub uncertainty_rate: f64,
}

fn exposure_count(n: f64) -> Result<f64> {
    if n.is_finite() && n >= 0.0 {
        Ok(n)
    } else {
        Err(Error::domain("n", n, "exposure count must be finite and >= 0"))
    }
}

/// `delta_n = delta_i * S_l / g(n)`.
pub fn prediction_error_at(params: &HabituationParams, n: f64) -> Result<f64> {
    let n = exposure_count(n)?;
    Ok(params.initial_prediction_error() * params.noise() / params.g(n))
}

/// `S_pn = S_pl * S_l / g(n)`.
pub fn uncertainty_at(params: &HabituationParams, n: f64) -> Result<f64> {
    let n = exposure_count(n)?;
    Ok(params.initial_uncertainty() * params.noise() / params.g(n))
}

pub fn decay_rates(params: &HabituationParams, n: f64) -> Result<DecayRates> {
    let n = exposure_count(n)?;
    let alpha = params.learning_rate();
    let spl = params.initial_uncertainty();
    let sl = params.noise();
    let ratio = spl / sl;
    let pe_denom = alpha * n * ratio + 1.0;
    let unc_denom = alpha * n / sl + 1.0 / spl;
    Ok(DecayRates {
        prediction_error_rate: -alpha * params.initial_prediction_error() * ratio
            / (pe_denom * pe_denom),
        uncertainty_rate: -(alpha / sl) / (unc_denom * unc_denom),
    })
}

fn crossover_inputs(s_p1: f64, s_p2: f64, noise: f64, learning_rate: f64) -> Result<()> {
    positive("s_p1", s_p1)?;
    positive("s_p2", s_p2)?;
    positive("noise", noise)?;
    positive("learning_rate", learning_rate)?;
    Ok(())
}

/// Whether the first-exposure gain curves of two initial uncertainties
/// intersect as the prediction error grows: `s_p1 * s_p2 > (noise / learning_rate)^2`.
pub fn crossover_exists(s_p1: f64, s_p2: f64, noise: f64, learning_rate: f64) -> Result<bool> {
    crossover_inputs(s_p1, s_p2, noise, learning_rate)?;
    let bound = noise / learning_rate;
    Ok(s_p1 * s_p2 > bound * bound)
}

/// Gain terms of exposure `n` for initial uncertainty `spl`.
pub fn terms_for(spl: f64, noise: f64, learning_rate: f64, n: u32) -> Result<GainTerms> {
    let params = HabituationParams::new(0.0, spl, noise, learning_rate, n.max(1))?;
    crate::gain::gain_terms(&params, n)
}

/// Squared prediction error at which the first-exposure gain curves of two
/// initial uncertainties cross.
pub fn crossover_delta(s_p1: f64, s_p2: f64, noise: f64, learning_rate: f64) -> Result<f64> {
    crossover_delta_at(s_p1, s_p2, noise, learning_rate, 1)
}

/// Same crossing for exposure `n`. Only `n = 1` carries the existence law
/// checked by [`crossover_exists`]; other `n` are solved directly and fail
/// when the solution is not positive.
pub fn crossover_delta_at(
    s_p1: f64,
    s_p2: f64,
    noise: f64,
    learning_rate: f64,
    n: u32,
) -> Result<f64> {
    crossover_inputs(s_p1, s_p2, noise, learning_rate)?;
    if s_p1 == s_p2 {
        return Err(Error::Degenerate("equal uncertainties never cross"));
    }
    if n == 1 && !crossover_exists(s_p1, s_p2, noise, learning_rate)? {
        let bound = noise / learning_rate;
        return Err(Error::NoCrossover {
            product: s_p1 * s_p2,
            bound: bound * bound,
        });
    }
    let first = terms_for(s_p1, noise, learning_rate, n)?;
    let second = terms_for(s_p2, noise, learning_rate, n)?;
    let delta_sq = (second.a_term - first.a_term) / (first.b_term - second.b_term);
    if !(delta_sq.is_finite() && delta_sq > 0.0) {
        let bound = noise / learning_rate;
        return Err(Error::NoCrossover {
            product: s_p1 * s_p2,
            bound: bound * bound,
        });
    }
    Ok(delta_sq)
}
