//! Seeded oracle suite behind the `verify` subcommand.
//!
//! Each check draws its parameter tuples from one ChaCha stream seeded by
//! the caller, evaluates them (in parallel when available), and reduces in
//! input order, so a fixed seed always renders the same report.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::belief::{batch_update, single_update, HabituationParams};
use crate::dynamics::{crossover_exists, decay_rates, prediction_error_at, uncertainty_at};
use crate::error::Result;
use crate::gain::{kl_numeric, step_gain, step_gain_from_beliefs};
use crate::par::Execution;
use crate::valence::{
    acceptable_prediction_error, crossing_closed_form, positive_gain_crossing, valence, WundtParams,
};

/// Oracle agreement required between closed form, analytic KL and quadrature.
pub const KL_TOLERANCE: f64 = 1e-9;
/// Relative agreement required between folded and batch updates.
pub const SEQUENTIAL_TOLERANCE: f64 = 1e-12;
pub const ROOT_TOLERANCE: f64 = 1e-10;
pub const DERIVATIVE_TOLERANCE: f64 = 1e-6;
pub const FD_STEP: f64 = 1e-5;
/// Smallest `alpha * S_pl / S_l` used for the finite-difference check. Below
/// it the trajectories move less than `FD_STEP * 1e-3` per step and rounding in
/// the central difference alone exceeds `DERIVATIVE_TOLERANCE`.
pub const FD_MIN_RATE: f64 = 1e-3;
pub const CROSSOVER_SCAN_POINTS: usize = 10_000;

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub samples: usize,
    pub seed: u64,
    pub quadrature_points: usize,
    pub half_width_sigmas: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            samples: 1000,
            seed: 7,
            quadrature_points: crate::gain::DEFAULT_QUADRATURE_POINTS,
            half_width_sigmas: crate::gain::DEFAULT_HALF_WIDTH_SIGMAS,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub seed: u64,
    pub samples: usize,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn render(&self) -> String {
        let mut out = format!("verify: seed={} samples={}\n", self.seed, self.samples);
        for c in &self.checks {
            out.push_str(&format!(
                "{} {:<26} {}\n",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.detail
            ));
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        out.push_str(&format!(
            "summary: {} passed, {} failed\n",
            self.checks.len() - failed,
            failed
        ));
        out
    }
}

/// A random scenario from the standard grid: log-uniform `S_pl, S_l` in
/// `[1e-2, 1e2]`, `delta_i` in `[0, 20]`, `alpha` in `[0.01, 1]`, `n` in `[1, 30]`.
#[derive(Debug, Clone, Copy)]
pub struct GridSample {
    pub params: HabituationParams,
    pub n: u32,
}

pub fn log_uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    rng.gen_range(lo.ln()..hi.ln()).exp()
}

pub fn draw_grid(rng: &mut impl Rng, count: usize) -> Vec<GridSample> {
    (0..count)
        .map(|_| {
            let spl = log_uniform(rng, 1e-2, 1e2);
            let sl = log_uniform(rng, 1e-2, 1e2);
            let delta = rng.gen_range(0.0..=20.0);
            let alpha = rng.gen_range(0.01..=1.0);
            let n = rng.gen_range(1..=30);
            GridSample {
                params: HabituationParams::new(delta, spl, sl, alpha, 31)
                    .expect("grid ranges are valid"),
                n,
            }
        })
        .collect()
}

/// A random valid Wundt curve.
pub fn draw_wundt(rng: &mut impl Rng) -> WundtParams {
    loop {
        let gr = rng.gen_range(-1.0..2.0);
        let gap = rng.gen_range(0.2..3.0);
        let hr = rng.gen_range(0.2..2.0);
        let ha = hr * (1.0 + rng.gen_range(0.05..1.0));
        let c = rng.gen_range(0.5..20.0);
        if let Ok(w) = WundtParams::new(gr, gr + gap, hr, ha, c) {
            return w;
        }
    }
}

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

fn sci(x: f64) -> String {
    format!("{x:.3e}")
}

pub fn run(config: &VerifyConfig) -> VerifyReport {
    run_with(config, Execution::default())
}

pub fn run_with(config: &VerifyConfig, exec: Execution) -> VerifyReport {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let grid = draw_grid(&mut rng, config.samples);
    let checks = vec![
        check_kl_oracle(config, &grid, exec),
        check_sequential(&grid, exec),
        check_monotone(&grid, exec),
        check_steepening(&mut rng, &grid, exec),
        check_crossover(&mut rng, config.samples.div_ceil(2), exec),
        check_range_growth(&mut rng, &grid, exec),
        check_valence_roots(&mut rng, 100, exec),
        check_derivatives(&mut rng, &grid, exec),
    ];
    VerifyReport {
        seed: config.seed,
        samples: config.samples,
        checks,
    }
}

fn check_kl_oracle(config: &VerifyConfig, grid: &[GridSample], exec: Execution) -> CheckResult {
    let diffs = exec.map(grid, |s| -> Result<f64> {
        let closed = step_gain(&s.params, s.n)?;
        let analytic = step_gain_from_beliefs(&s.params, s.n)?;
        let numeric = kl_numeric(
            &s.params.belief_after(s.n)?,
            &s.params.belief_after(s.n - 1)?,
            config.half_width_sigmas,
            config.quadrature_points,
        )?;
        Ok(max_of([
            (closed - analytic).abs(),
            (closed - numeric).abs(),
            (analytic - numeric).abs(),
        ]))
    });
    let errors = diffs.iter().filter(|d| d.is_err()).count();
    let worst = max_of(diffs.iter().filter_map(|d| d.as_ref().ok().copied()));
    CheckResult {
        name: "kl_oracle",
        passed: errors == 0 && worst <= KL_TOLERANCE,
        detail: format!(
            "{} tuples, max pairwise |diff| = {} (tol {}), quadrature errors = {errors}",
            grid.len(),
            sci(worst),
            sci(KL_TOLERANCE)
        ),
    }
}

fn check_sequential(grid: &[GridSample], exec: Execution) -> CheckResult {
    let diffs = exec.map(grid, |s| -> Result<f64> {
        let prior = s.params.prior();
        let x = s.params.initial_prediction_error();
        let (noise, alpha) = (s.params.noise(), s.params.learning_rate());
        let mut worst = 0.0f64;
        let mut folded = prior;
        for n in 1..=50 {
            folded = single_update(folded, x, noise, alpha)?;
            let batch = batch_update(prior, x, n, noise, alpha)?;
            let scale = x.abs().max(prior.mean().abs()).max(f64::MIN_POSITIVE);
            worst = worst
                .max((folded.mean() - batch.mean()).abs() / scale)
                .max((folded.variance() - batch.variance()).abs() / batch.variance());
        }
        Ok(worst)
    });
    let worst = max_of(diffs.iter().map(|d| *d.as_ref().unwrap_or(&f64::INFINITY)));
    CheckResult {
        name: "sequential_batch",
        passed: worst <= SEQUENTIAL_TOLERANCE,
        detail: format!("n = 1..50, max relative diff = {} (tol {})", sci(worst), sci(SEQUENTIAL_TOLERANCE)),
    }
}

fn check_monotone(grid: &[GridSample], exec: Execution) -> CheckResult {
    let violations: usize = exec
        .map(grid, |s| {
            (1..30)
                .filter(|&n| {
                    let here = step_gain(&s.params, n).unwrap_or(f64::NAN);
                    let next = step_gain(&s.params, n + 1).unwrap_or(f64::NAN);
                    !(next < here && next >= 0.0)
                })
                .count()
        })
        .into_iter()
        .sum();
    CheckResult {
        name: "monotone_habituation",
        passed: violations == 0,
        detail: format!("G_(n+1) < G_n over n = 1..30: {violations} violations"),
    }
}

fn check_steepening(rng: &mut ChaCha8Rng, grid: &[GridSample], exec: Execution) -> CheckResult {
    let bumps: Vec<f64> = grid.iter().map(|_| rng.gen_range(0.1..=5.0)).collect();
    let pairs: Vec<(GridSample, f64)> = grid.iter().copied().zip(bumps).collect();
    let violations: usize = exec
        .map(&pairs, |(s, bump)| {
            let Ok(larger) = s.params.with_initial_prediction_error(s.params.initial_prediction_error() + bump)
            else {
                return 1;
            };
            (1..30)
                .filter(|&n| {
                    let diff = |p: &HabituationParams| {
                        step_gain(p, n + 1).unwrap_or(f64::NAN) - step_gain(p, n).unwrap_or(f64::NAN)
                    };
                    !(diff(&larger) < diff(&s.params))
                })
                .count()
        })
        .into_iter()
        .sum();
    CheckResult {
        name: "decay_steepening",
        passed: violations == 0,
        detail: format!("larger delta_i decays faster: {violations} violations"),
    }
}

/// Brute-force crossover detector: scans the first-exposure gains of two
/// uncertainties, each evaluated as the analytic KL between updated beliefs,
/// for a change in ordering.
pub fn scan_for_crossover(s_p1: f64, s_p2: f64, noise: f64, alpha: f64, points: usize) -> Result<bool> {
    let gain = |spl: f64, delta: f64| -> Result<f64> {
        step_gain_from_beliefs(&HabituationParams::new(delta, spl, noise, alpha, 1)?, 1)
    };
    // G(delta) = c0 + c1 delta^2 per curve; the scale only sets the scan window.
    let (a0, b0) = (gain(s_p1, 0.0)?, gain(s_p2, 0.0)?);
    let (a1, b1) = (gain(s_p1, 1.0)? - a0, gain(s_p2, 1.0)? - b0);
    let scale = ((b0 - a0) / (a1 - b1)).abs().sqrt();
    let upper = 10.0 * if scale.is_finite() && scale > 0.0 { scale } else { 1.0 };
    let mut previous: Option<bool> = None;
    for i in 1..=points {
        let delta = upper * i as f64 / points as f64;
        let first_larger = gain(s_p1, delta)? > gain(s_p2, delta)?;
        if previous.is_some_and(|p| p != first_larger) {
            return Ok(true);
        }
        previous = Some(first_larger);
    }
    Ok(false)
}

fn check_crossover(rng: &mut ChaCha8Rng, count: usize, exec: Execution) -> CheckResult {
    let tuples: Vec<[f64; 4]> = (0..count)
        .map(|_| {
            [
                log_uniform(rng, 1e-2, 1e3),
                log_uniform(rng, 1e-2, 1e3),
                log_uniform(rng, 1e-2, 1e1),
                rng.gen_range(0.01..=1.0),
            ]
        })
        .collect();
    let results = exec.map(&tuples, |&[s1, s2, sl, alpha]| -> Result<bool> {
        Ok(crossover_exists(s1, s2, sl, alpha)?
            == scan_for_crossover(s1, s2, sl, alpha, CROSSOVER_SCAN_POINTS)?)
    });
    let disagreements = results.iter().filter(|r| !matches!(r, Ok(true))).count();
    let crossing = tuples
        .iter()
        .filter(|[s1, s2, sl, a]| crossover_exists(*s1, *s2, *sl, *a).unwrap_or(false))
        .count();
    CheckResult {
        name: "crossover_law",
        passed: disagreements == 0,
        detail: format!(
            "{count} tuples ({crossing} crossing), {disagreements} disagreements with a {CROSSOVER_SCAN_POINTS}-point scan"
        ),
    }
}

fn check_range_growth(rng: &mut ChaCha8Rng, grid: &[GridSample], exec: Execution) -> CheckResult {
    let wundt = WundtParams::default();
    let factors: Vec<f64> = grid.iter().map(|_| rng.gen_range(1.1..=10.0)).collect();
    let pairs: Vec<(GridSample, f64)> = grid.iter().copied().zip(factors).collect();
    let outcome = exec.map(&pairs, |(s, factor)| {
        let Ok(larger) = s.params.with_initial_uncertainty(s.params.initial_uncertainty() * factor)
        else {
            return (0usize, 0usize);
        };
        let (mut checked, mut violations) = (0, 0);
        for n in 1..30 {
            let range = |p: &HabituationParams, n| acceptable_prediction_error(p, &wundt, n);
            // Only exposures where both curves admit a non-negative range.
            let (Ok(a0), Ok(a1), Ok(b0), Ok(b1)) = (
                range(&s.params, n),
                range(&s.params, n + 1),
                range(&larger, n),
                range(&larger, n + 1),
            ) else {
                continue;
            };
            checked += 1;
            if !(a1 > a0 && b1 > b0 && b1 - b0 > a1 - a0) {
                violations += 1;
            }
        }
        (checked, violations)
    });
    let checked: usize = outcome.iter().map(|o| o.0).sum();
    let violations: usize = outcome.iter().map(|o| o.1).sum();
    CheckResult {
        name: "acceptable_range_growth",
        passed: violations == 0 && checked > 0,
        detail: format!("{checked} exposure steps checked, {violations} violations"),
    }
}

fn check_valence_roots(rng: &mut ChaCha8Rng, count: usize, exec: Execution) -> CheckResult {
    let mut curves = vec![WundtParams::default()];
    curves.extend((0..count).map(|_| draw_wundt(rng)));
    let errors = exec.map(&curves, |w| -> Result<(f64, f64)> {
        let root = positive_gain_crossing(w)?;
        Ok((valence(root, w).abs(), (root - crossing_closed_form(w)?).abs()))
    });
    let failures = errors.iter().filter(|e| e.is_err()).count();
    let worst_v = max_of(errors.iter().filter_map(|e| e.as_ref().ok().map(|e| e.0)));
    let worst_g = max_of(errors.iter().filter_map(|e| e.as_ref().ok().map(|e| e.1)));
    CheckResult {
        name: "valence_crossing",
        passed: failures == 0 && worst_v < ROOT_TOLERANCE && worst_g < ROOT_TOLERANCE,
        detail: format!(
            "{} curves, max |V(G*)| = {}, max |G* - closed form| = {}",
            curves.len(),
            sci(worst_v),
            sci(worst_g)
        ),
    }
}

fn check_derivatives(rng: &mut ChaCha8Rng, grid: &[GridSample], exec: Execution) -> CheckResult {
    let points: Vec<(GridSample, f64)> = grid
        .iter()
        .map(|s| (*s, rng.gen_range(0.5..=30.0)))
        .filter(|(s, _)| {
            s.params.learning_rate() * s.params.initial_uncertainty() / s.params.noise() >= FD_MIN_RATE
        })
        .collect();
    let errors = exec.map(&points, |(s, n)| -> Result<f64> {
        let p = &s.params;
        let rates = decay_rates(p, *n)?;
        let h = FD_STEP;
        let fd_pe = (prediction_error_at(p, n + h)? - prediction_error_at(p, n - h)?) / (2.0 * h);
        let fd_unc = (uncertainty_at(p, n + h)? - uncertainty_at(p, n - h)?) / (2.0 * h);
        let rel = |exact: f64, approx: f64| {
            if exact == 0.0 {
                approx.abs()
            } else {
                ((approx - exact) / exact).abs()
            }
        };
        Ok(rel(rates.prediction_error_rate, fd_pe).max(rel(rates.uncertainty_rate, fd_unc)))
    });
    let worst = max_of(errors.iter().map(|e| *e.as_ref().unwrap_or(&f64::INFINITY)));
    CheckResult {
        name: "decay_rate_derivatives",
        passed: worst <= DERIVATIVE_TOLERANCE,
        detail: format!(
            "{} points, central differences (h = {}), max relative error = {} (tol {})",
            points.len(),
            sci(FD_STEP),
            sci(worst),
            sci(DERIVATIVE_TOLERANCE)
        ),
    }
}
