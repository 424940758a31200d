//! Per-exposure information gain.
//!
//! The gain of exposure `n` is the KL divergence from the belief after `n - 1`
//! exposures to the belief after `n` exposures, `KL(post_n || post_{n-1})`, in
//! nats. With `g(x) = alpha * S_pl * x + S_l` it has the closed form
//! `G_n = (A + B * delta^2) / 2` where
//!
//! ```text
//! A = r - ln r - 1,   r = g(n-1) / g(n)
//! B = alpha^2 * S_pl * S_l / (g(n-1) * g(n)^2)
//! ```

use crate::belief::{GaussianBelief, HabituationParams};
use crate::error::{Error, Result};

pub const DEFAULT_QUADRATURE_POINTS: usize = 4001;
pub const DEFAULT_HALF_WIDTH_SIGMAS: f64 = 10.0;
/// Largest acceptable residual estimate for [`kl_numeric`].
pub const QUADRATURE_TOLERANCE: f64 = 1e-9;

/// Variance-contraction and mean-shift coefficients of one exposure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainTerms {
    pub a_term: f64,
    pub b_term: f64,
    pub g_prev: f64,
    pub g_curr: f64,
}

impl GainTerms {
    /// Gain for a given initial prediction error.
    pub fn gain(&self, prediction_error: f64) -> f64 {
        0.5 * (self.a_term + self.b_term * prediction_error * prediction_error)
    }
}

fn check_step(n: u32) -> Result<()> {
    if n < 1 {
        return Err(Error::domain("n", f64::from(n), "exposure index must be >= 1"));
    }
    Ok(())
}

pub fn gain_terms(params: &HabituationParams, n: u32) -> Result<GainTerms> {
    check_step(n)?;
    let n = f64::from(n);
    let g_prev = params.g(n - 1.0);
    let g_curr = params.g(n);
    // r - 1 = -alpha * S_pl / g(n); ln_1p keeps A accurate when r is close to 1.
    let r_minus_one = (g_prev - g_curr) / g_curr;
    let a_term = r_minus_one - r_minus_one.ln_1p();
    let alpha = params.learning_rate();
    let b_term = alpha * alpha * params.initial_uncertainty() * params.noise()
        / (g_prev * g_curr * g_curr);
    Ok(GainTerms {
        a_term: a_term.max(0.0),
        b_term,
        g_prev,
        g_curr,
    })
}

/// Information gain of exposure `n` (nats).
pub fn step_gain(params: &HabituationParams, n: u32) -> Result<f64> {
    Ok(gain_terms(params, n)?.gain(params.initial_prediction_error()))
}

/// `(n, G_n)` for `n = 1..=exposures`.
pub fn gain_trajectory(params: &HabituationParams) -> Result<Vec<(u32, f64)>> {
    (1..=params.exposures())
        .map(|n| Ok((n, step_gain(params, n)?)))
        .collect()
}

/// Analytic `KL(p || q)` between two Gaussians (nats).
pub fn kl_gaussian(p: &GaussianBelief, q: &GaussianBelief) -> f64 {
    let ratio = p.variance() / q.variance();
    let shift = p.mean() - q.mean();
    // ratio - 1 - ln(ratio), written to survive ratio ~ 1.
    let contraction = (ratio - 1.0) - (ratio - 1.0).ln_1p();
    0.5 * (contraction.max(0.0) + shift * shift / q.variance())
}

/// Gain of exposure `n` evaluated as the analytic KL between the updated beliefs.
pub fn step_gain_from_beliefs(params: &HabituationParams, n: u32) -> Result<f64> {
    check_step(n)?;
    Ok(kl_gaussian(
        &params.belief_after(n)?,
        &params.belief_after(n - 1)?,
    ))
}

/// `KL(p || q)` by composite Simpson quadrature of `p ln(p/q)`.
///
/// The window spans `half_width_sigmas` standard deviations around both
/// means. The returned value is rejected when the residual estimate (Simpson
/// against trapezoid on the same grid, the integrand left at the window
/// edges, and the normalization defect of `p` on the grid) exceeds [`QUADRATURE_TOLERANCE`] scaled by `max(1, KL)`.
pub fn kl_numeric(
    p: &GaussianBelief,
    q: &GaussianBelief,
    half_width_sigmas: f64,
    points: usize,
) -> Result<f64> {
    if points < 1001 || points % 2 == 0 {
        return Err(Error::domain("points", points as f64, "must be odd and >= 1001"));
    }
    if !(half_width_sigmas >= 8.0) || !half_width_sigmas.is_finite() {
        return Err(Error::domain(
            "half_width_sigmas",
            half_width_sigmas,
            "must be finite and >= 8",
        ));
    }
    let (sp, sq) = (p.std_dev(), q.std_dev());
    let lo = (p.mean() - half_width_sigmas * sp).min(q.mean() - half_width_sigmas * sq);
    let hi = (p.mean() + half_width_sigmas * sp).max(q.mean() + half_width_sigmas * sq);
    let h = (hi - lo) / (points - 1) as f64;

    let half_log_ratio = 0.5 * (q.variance() / p.variance()).ln();
    let norm = (std::f64::consts::TAU * p.variance()).sqrt().recip();
    let integrand = |mu: f64| {
        let zp = (mu - p.mean()) / sp;
        let zq = (mu - q.mean()) / sq;
        let density = norm * (-0.5 * zp * zp).exp();
        if density == 0.0 {
            (0.0, 0.0)
        } else {
            (density, density * (half_log_ratio - 0.5 * zp * zp + 0.5 * zq * zq))
        }
    };

    let mut simpson = Neumaier::default();
    let mut trapezoid = Neumaier::default();
    let mut mass = Neumaier::default();
    for i in 0..points {
        let (density, f) = integrand(lo + i as f64 * h);
        let edge = i == 0 || i == points - 1;
        let weight = if edge { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
        simpson.add(f * weight);
        mass.add(density * weight);
        trapezoid.add(if edge { 0.5 * f } else { f });
    }
    let value = simpson.total() * h / 3.0;
    let trap = trapezoid.total() * h;
    let mass = mass.total() * h / 3.0;

    let edge_mass = (integrand(lo).1.abs() + integrand(hi).1.abs()) * sp;
    let residual = (value - trap).abs() + edge_mass + (mass - 1.0).abs() * value.abs().max(1.0);
    let tolerance = QUADRATURE_TOLERANCE * value.abs().max(1.0);
    if !(residual <= tolerance) {
        return Err(Error::Accuracy {
            residual,
            tolerance,
        });
    }
    Ok(value)
}

/// Compensated summation.
#[derive(Default)]
struct Neumaier {
    sum: f64,
    compensation: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.compensation
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn fig1(delta: f64) -> HabituationParams {
        HabituationParams::new(delta, 1.0, 0.5, 0.1, 10).unwrap()
    }

    fn belief(m: f64, v: f64) -> GaussianBelief {
        GaussianBelief::new(m, v).unwrap()
    }

    #[test]
    fn no_learning_has_zero_terms() {
        let p = HabituationParams::without_learning(4.0, 1.0, 0.5, 5).unwrap();
        let t = gain_terms(&p, 3).unwrap();
        assert_eq!(t.a_term, 0.0);
        assert_eq!(t.b_term, 0.0);
        assert!(gain_trajectory(&p).unwrap().iter().all(|&(_, g)| g == 0.0));
    }

    /// The variance part of the Gaussian KL is A/2 and the mean-shift part is B*delta^2/2.
    #[test]
    fn terms_match_kl_decomposition() {
        for (n, a, b) in [(1, 0.0156549, 0.0277778), (2, 0.0112935, 0.0170068)] {
            let params = fig1(4.0);
            let t = gain_terms(&params, n).unwrap();
            assert_abs_diff_eq!(t.a_term, a, epsilon = 5e-8);
            assert_abs_diff_eq!(t.b_term, b, epsilon = 5e-8);

            let post = params.belief_after(n).unwrap();
            let prev = params.belief_after(n - 1).unwrap();
            let r = post.variance() / prev.variance();
            let variance_part = r - r.ln() - 1.0;
            let shift = post.mean() - prev.mean();
            let shift_part = shift * shift / prev.variance();
            assert_abs_diff_eq!(t.a_term, variance_part, epsilon = 1e-14);
            assert_abs_diff_eq!(t.b_term * 16.0, shift_part, epsilon = 1e-13);
        }
    }

    #[test]
    fn zero_prediction_error_gives_half_a() {
        let p = fig1(0.0);
        for n in 1..=10 {
            let t = gain_terms(&p, n).unwrap();
            assert_eq!(step_gain(&p, n).unwrap(), 0.5 * t.a_term);
        }
    }

    #[test]
    fn figure_one_spot_values() {
        assert_abs_diff_eq!(step_gain(&fig1(4.0), 1).unwrap(), 0.2300497, epsilon = 1e-7);
        assert_abs_diff_eq!(step_gain(&fig1(10.0), 1).unwrap(), 1.3967163, epsilon = 1e-7);
        assert_abs_diff_eq!(step_gain(&fig1(4.0), 2).unwrap(), 0.14170, epsilon = 5e-6);
        for delta in [4.0, 10.0] {
            let p = fig1(delta);
            assert_abs_diff_eq!(
                step_gain(&p, 1).unwrap(),
                step_gain_from_beliefs(&p, 1).unwrap(),
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn step_zero_is_rejected() {
        assert!(gain_terms(&fig1(4.0), 0).is_err());
        assert!(step_gain(&fig1(4.0), 0).is_err());
    }

    #[test]
    fn trajectory_decreases_and_larger_error_dominates() {
        let small = gain_trajectory(&fig1(4.0).with_exposures(50).unwrap()).unwrap();
        let large = gain_trajectory(&fig1(10.0).with_exposures(50).unwrap()).unwrap();
        assert_eq!(small.len(), 50);
        for w in small.windows(2) {
            assert!(w[1].1 < w[0].1);
        }
        assert!(small.last().unwrap().1 < 1e-3);
        for (s, l) in small.iter().zip(&large) {
            assert!(l.1 > s.1);
        }
    }

    #[test]
    fn kl_gaussian_examples() {
        let p = belief(0.3, 1.7);
        assert_eq!(kl_gaussian(&p, &p), 0.0);
        assert_abs_diff_eq!(kl_gaussian(&belief(0.0, 1.0), &belief(1.0, 1.0)), 0.5, epsilon = 1e-15);
        let wide = kl_gaussian(&belief(0.0, 2.0), &belief(0.0, 1.0));
        assert_abs_diff_eq!(wide, 0.1534264, epsilon = 1e-7);
        let numeric = kl_numeric(&belief(0.0, 2.0), &belief(0.0, 1.0), 10.0, 4001).unwrap();
        assert_abs_diff_eq!(wide, numeric, epsilon = 1e-12);
    }

    #[test]
    fn kl_numeric_examples() {
        let p = belief(-2.0, 0.4);
        assert_abs_diff_eq!(kl_numeric(&p, &p, 10.0, 4001).unwrap(), 0.0, epsilon = 1e-12);
        let unit = kl_numeric(&belief(0.0, 1.0), &belief(1.0, 1.0), 10.0, 4001).unwrap();
        assert_abs_diff_eq!(unit, 0.5, epsilon = 1e-9);
        let params = fig1(4.0);
        let oracle = kl_numeric(
            &params.belief_after(1).unwrap(),
            &params.belief_after(0).unwrap(),
            DEFAULT_HALF_WIDTH_SIGMAS,
            DEFAULT_QUADRATURE_POINTS,
        )
        .unwrap();
        assert_abs_diff_eq!(oracle, step_gain(&params, 1).unwrap(), epsilon = 1e-9);
    }

    #[test]
    fn kl_numeric_variance_ratio_range() {
        for ratio in [1e-3, 1e-2, 0.1, 0.5, 2.0, 10.0, 1e2, 1e3] {
            for shift in [0.0, 0.5, 3.0] {
                let p = belief(shift, ratio);
                let q = belief(0.0, 1.0);
                let numeric = kl_numeric(&p, &q, 10.0, 4001).unwrap();
                assert_abs_diff_eq!(numeric, kl_gaussian(&p, &q), epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn kl_numeric_preconditions() {
        let p = belief(0.0, 1.0);
        assert!(matches!(kl_numeric(&p, &p, 10.0, 1000), Err(Error::Domain { .. })));
        assert!(matches!(kl_numeric(&p, &p, 10.0, 999), Err(Error::Domain { .. })));
        assert!(matches!(kl_numeric(&p, &p, 7.9, 4001), Err(Error::Domain { .. })));
        assert!(matches!(kl_numeric(&p, &p, f64::NAN, 4001), Err(Error::Domain { .. })));
    }

    #[test]
    fn kl_numeric_reports_unresolved_grid() {
        // p is far narrower than the grid spacing forced by q's window.
        let p = belief(0.0, 1e-10);
        let q = belief(0.0, 1e4);
        match kl_numeric(&p, &q, 8.0, 1001) {
            Err(Error::Accuracy { residual, tolerance }) => assert!(residual > tolerance),
            other => panic!("expected accuracy error, got {other:?}"),
        }
    }
}
