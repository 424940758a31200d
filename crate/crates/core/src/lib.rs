//! Bayesian model of habituation to novelty.
//!
//! Repeated exposure to the same stimulus updates a Gaussian belief through a
//! likelihood tempered by a learning rate. The information gain of each
//! exposure (arousal) decays as the belief converges, and the range of
//! prediction errors that still feel pleasant (positive Wundt-curve valence)
//! widens.
//!
//! - [`belief`]: tempered conjugate updates
//! - [`gain`]: per-exposure information gain and a quadrature KL oracle
//! - [`dynamics`]: prediction error / uncertainty trajectories and the crossover law
//! - [`valence`]: Wundt curve, zero crossing and acceptable prediction error
//! - [`experiments`]: figure datasets, sweeps, CSV/JSON/SVG output
//! - [`verify`]: seeded oracle suite
//! - [`cli`]: command-line front end

pub mod belief;
pub mod cli;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod gain;
pub mod par;
pub mod valence;
pub mod verify;

pub use belief::{batch_update, single_update, GaussianBelief, HabituationParams, StimulusModel};
pub use dynamics::{crossover_delta, crossover_exists, decay_rates, prediction_error_at, uncertainty_at, DecayRates};
pub use error::{Error, Result};
pub use gain::{gain_terms, gain_trajectory, kl_gaussian, kl_numeric, step_gain, GainTerms};
pub use par::Execution;
pub use valence::{acceptable_prediction_error, positive_gain_crossing, valence, RangeFormula, WundtParams};
