//! Gaussian beliefs over a stimulus feature and their tempered-likelihood updates.
//!
//! The likelihood of each observation is raised to the power `learning_rate`
//! before being combined with the prior. With a Gaussian prior `N(mean, variance)`
//! and Gaussian likelihood of known variance `noise`, the posterior stays Gaussian.

use serde::{Deserialize, Serialize};

use crate::error::{finite, non_negative, positive, Error, Result};

/// Default learning rate used by the figure scenarios.
pub const DEFAULT_LEARNING_RATE: f64 = 0.1;

/// Belief about the mean of a stimulus feature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBelief")]
pub struct GaussianBelief {
    mean: f64,
    variance: f64,
}

#[derive(Deserialize)]
struct RawBelief {
    mean: f64,
    variance: f64,
}

impl TryFrom<RawBelief> for GaussianBelief {
    type Error = Error;

    fn try_from(raw: RawBelief) -> Result<Self> {
        GaussianBelief::new(raw.mean, raw.variance)
    }
}

impl GaussianBelief {
    pub fn new(mean: f64, variance: f64) -> Result<Self> {
        Ok(Self {
            mean: finite("mean", mean)?,
            variance: positive("variance", variance)?,
        })
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    pub fn std_dev(&self) -> f64 {
        self.variance.sqrt()
    }

    /// Log density at `x`.
    pub fn ln_pdf(&self, x: f64) -> f64 {
        let d = x - self.mean;
        -0.5 * (std::f64::consts::TAU * self.variance).ln() - d * d / (2.0 * self.variance)
    }
}

/// Likelihood side of the model: the observed data mean and its variance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StimulusModel {
    pub data_mean: f64,
    pub noise: f64,
}

impl StimulusModel {
    pub fn new(data_mean: f64, noise: f64) -> Result<Self> {
        Ok(Self {
            data_mean: finite("data_mean", data_mean)?,
            noise: positive("noise", noise)?,
        })
    }
}

/// Scenario driving every closed form: initial prediction error, initial
/// uncertainty, likelihood noise, learning rate and number of exposures.
///
/// The prior mean is placed at zero and the data mean at
/// `initial_prediction_error`, so `|prior mean - data mean|` is the initial
/// prediction error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct HabituationParams {
    initial_prediction_error: f64,
    initial_uncertainty: f64,
    noise: f64,
    learning_rate: f64,
    exposures: u32,
}

#[derive(Deserialize)]
struct RawParams {
    initial_prediction_error: f64,
    initial_uncertainty: f64,
    noise: f64,
    learning_rate: f64,
    exposures: u32,
}

impl TryFrom<RawParams> for HabituationParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        if raw.learning_rate == 0.0 {
            return HabituationParams::without_learning(
                raw.initial_prediction_error,
                raw.initial_uncertainty,
                raw.noise,
                raw.exposures,
            );
        }
        HabituationParams::new(
            raw.initial_prediction_error,
            raw.initial_uncertainty,
            raw.noise,
            raw.learning_rate,
            raw.exposures,
        )
    }
}

impl HabituationParams {
    pub fn new(
        initial_prediction_error: f64,
        initial_uncertainty: f64,
        noise: f64,
        learning_rate: f64,
        exposures: u32,
    ) -> Result<Self> {
        let params = Self {
            initial_prediction_error: non_negative(
                "initial_prediction_error",
                initial_prediction_error,
            )?,
            initial_uncertainty: positive("initial_uncertainty", initial_uncertainty)?,
            noise: positive("noise", noise)?,
            learning_rate: positive("learning_rate", learning_rate)?,
            exposures: exposures_at_least_one(exposures)?,
        };
        if !(params.g(1.0) > params.g(0.0)) {
            return Err(Error::Degenerate(
                "alpha * S_pl underflows against noise; g_n is not increasing",
            ));
        }
        Ok(params)
    }

    /// The `learning_rate = 0` limit. Only the gain closed forms accept it;
    /// they evaluate to zero everywhere.
    pub fn without_learning(
        initial_prediction_error: f64,
        initial_uncertainty: f64,
        noise: f64,
        exposures: u32,
    ) -> Result<Self> {
        Ok(Self {
            initial_prediction_error: non_negative(
                "initial_prediction_error",
                initial_prediction_error,
            )?,
            initial_uncertainty: positive("initial_uncertainty", initial_uncertainty)?,
            noise: positive("noise", noise)?,
            learning_rate: 0.0,
            exposures: exposures_at_least_one(exposures)?,
        })
    }

    pub fn initial_prediction_error(&self) -> f64 {
        self.initial_prediction_error
    }

    pub fn initial_uncertainty(&self) -> f64 {
        self.initial_uncertainty
    }

    pub fn noise(&self) -> f64 {
        self.noise
    }

    pub fn learning_rate(&self) -> f64 {
        self.learning_rate
    }

    pub fn exposures(&self) -> u32 {
        self.exposures
    }

    pub fn with_initial_prediction_error(self, value: f64) -> Result<Self> {
        self.rebuild(value, self.initial_uncertainty, self.noise, self.learning_rate, self.exposures)
    }

    pub fn with_initial_uncertainty(self, value: f64) -> Result<Self> {
        self.rebuild(self.initial_prediction_error, value, self.noise, self.learning_rate, self.exposures)
    }

    pub fn with_noise(self, value: f64) -> Result<Self> {
        self.rebuild(self.initial_prediction_error, self.initial_uncertainty, value, self.learning_rate, self.exposures)
    }

    pub fn with_learning_rate(self, value: f64) -> Result<Self> {
        self.rebuild(self.initial_prediction_error, self.initial_uncertainty, self.noise, value, self.exposures)
    }

    pub fn with_exposures(self, value: u32) -> Result<Self> {
        self.rebuild(self.initial_prediction_error, self.initial_uncertainty, self.noise, self.learning_rate, value)
    }

    fn rebuild(self, delta: f64, spl: f64, sl: f64, alpha: f64, n: u32) -> Result<Self> {
        if alpha == 0.0 {
            Self::without_learning(delta, spl, sl, n)
        } else {
            Self::new(delta, spl, sl, alpha, n)
        }
    }

    /// `g(x) = learning_rate * initial_uncertainty * x + noise`.
    pub fn g(&self, x: f64) -> f64 {
        self.learning_rate * self.initial_uncertainty * x + self.noise
    }

    /// Initial prior, centred at zero.
    pub fn prior(&self) -> GaussianBelief {
        GaussianBelief {
            mean: 0.0,
            variance: self.initial_uncertainty,
        }
    }

    pub fn stimulus(&self) -> StimulusModel {
        StimulusModel {
            data_mean: self.initial_prediction_error,
            noise: self.noise,
        }
    }

    /// Belief after `n` identical exposures.
    pub fn belief_after(&self, n: u32) -> Result<GaussianBelief> {
        batch_update(
            self.prior(),
            self.initial_prediction_error,
            n,
            self.noise,
            self.learning_rate,
        )
    }
}

fn exposures_at_least_one(n: u32) -> Result<u32> {
    if n >= 1 {
        Ok(n)
    } else {
        Err(Error::domain("exposures", n as f64, "must be >= 1"))
    }
}

/// Posterior after one observation with a tempered likelihood.
pub fn single_update(
    prior: GaussianBelief,
    observation: f64,
    noise: f64,
    learning_rate: f64,
) -> Result<GaussianBelief> {
    finite("observation", observation)?;
    positive("noise", noise)?;
    positive("learning_rate", learning_rate)?;
    let weighted = learning_rate * prior.variance;
    let denom = weighted + noise;
    GaussianBelief::new(
        (weighted * observation + noise * prior.mean) / denom,
        prior.variance * noise / denom,
    )
}

/// Posterior after `n` identical observations at `data_mean`. `n = 0` returns the prior.
pub fn batch_update(
    prior: GaussianBelief,
    data_mean: f64,
    n: u32,
    noise: f64,
    learning_rate: f64,
) -> Result<GaussianBelief> {
    finite("data_mean", data_mean)?;
    positive("noise", noise)?;
    positive("learning_rate", learning_rate)?;
    if n == 0 {
        return Ok(prior);
    }
    let weighted = learning_rate * f64::from(n) * prior.variance;
    let denom = weighted + noise;
    GaussianBelief::new(
        (weighted * data_mean + noise * prior.mean) / denom,
        prior.variance * noise / denom,
    )
}
