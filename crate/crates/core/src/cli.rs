//! Command-line front end.
//!
//! Exit codes: 0 success, 1 validation or usage error, 2 verification
//! failure, 3 I/O error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::belief::{batch_update, HabituationParams};
use crate::config::{ConfigLayer, RunConfig};
use crate::error::{Error, Result};
use crate::experiments::emit::{emit, format_table_value, render};
use crate::experiments::figures::{reproduce_figure, FigureId};
use crate::experiments::sweep::{sweep, Metric, SweepParameter, SweepSpec};
use crate::experiments::Dataset;
use crate::gain::gain_terms;
use crate::valence::{
    acceptable_prediction_error_with, positive_gain_crossing, valence, RangeFormula,
};
use crate::verify::{self, VerifyConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_VERIFICATION: i32 = 2;
pub const EXIT_IO: i32 = 3;

const TABLE_DIGITS: usize = 6;

#[derive(Debug, Parser)]
#[command(name = "habituation", version, about = "Bayesian habituation-to-novelty simulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Flat JSON config file; flags override it.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Initial prediction error delta_i.
    #[arg(long, global = true, allow_negative_numbers = true)]
    delta: Option<f64>,

    /// Initial uncertainty S_pl (prior variance).
    #[arg(long, global = true, allow_negative_numbers = true)]
    uncertainty: Option<f64>,

    /// Likelihood noise S_l (data variance).
    #[arg(long, global = true, allow_negative_numbers = true)]
    noise: Option<f64>,

    /// Learning rate alpha.
    #[arg(long, global = true, allow_negative_numbers = true)]
    alpha: Option<f64>,

    /// Number of exposures N.
    #[arg(long, global = true)]
    steps: Option<u32>,

    /// Output file (figure, sweep).
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Output format: csv, json or svg.
    #[arg(long, global = true)]
    format: Option<String>,

    /// Seed for randomized checks.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Number of random parameter tuples for `verify`.
    #[arg(long, global = true)]
    samples: Option<usize>,

    /// Also evaluate the acceptable range with the literal printed formula.
    #[arg(long = "eq5-literal", global = true)]
    eq5_literal: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the information gain trajectory.
    Gain,
    /// Print the posterior belief after each exposure.
    Update,
    /// Reproduce a figure dataset and write it.
    Figure {
        /// fig1, fig2, fig3 or fig4
        id: String,
    },
    /// Evaluate a metric over a list of values of one parameter.
    Sweep {
        /// JSON sweep spec; the flags below are ignored when given.
        #[arg(long, value_name = "PATH")]
        spec: Option<PathBuf>,
        /// delta, uncertainty, noise or alpha
        #[arg(long)]
        vary: Option<String>,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        values: Vec<f64>,
        /// gain, prediction_error, uncertainty, valence or acceptable_range
        #[arg(long, default_value = "gain")]
        metric: String,
    },
    /// Print the Wundt curve, its zero crossing and the acceptable range table.
    Valence,
    /// Run the oracle suite and print a pass/fail summary.
    Verify,
}

impl Cli {
    fn flag_layer(&self) -> ConfigLayer {
        ConfigLayer {
            delta: self.delta,
            uncertainty: self.uncertainty,
            noise: self.noise,
            alpha: self.alpha,
            steps: self.steps,
            out: self.out.clone(),
            format: self.format.clone(),
            seed: self.seed,
            samples: self.samples,
            eq5_literal: self.eq5_literal.then_some(true),
            wundt: None,
        }
    }
}

enum Failure {
    Error(Error),
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

/// Runs the CLI against the process's standard streams.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with_io(argv, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with_io<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    EXIT_VALIDATION
                }
            };
        }
    };
    match execute(&cli, out, err) {
        Ok(()) => EXIT_OK,
        Err(Failure::Verification) => EXIT_VERIFICATION,
        Err(Failure::Error(e)) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::Io { .. } => EXIT_IO,
                _ => EXIT_VALIDATION,
            }
        }
    }
}

fn io_error(source: std::io::Error) -> Error {
    Error::Io {
        path: PathBuf::from("<stdout>"),
        source,
    }
}

fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> std::result::Result<(), Failure> {
    let file = match &cli.config {
        Some(path) => ConfigLayer::from_file(path)?,
        None => ConfigLayer::default(),
    };
    let layer = cli.flag_layer().over(file);
    let run = RunConfig::resolve(&layer)?;
    if run.params.learning_rate() > 1.0 {
        let _ = writeln!(
            err,
            "warning: learning rate {} > 1 amplifies the likelihood beyond standard Bayes; results are outside the analysed range",
            run.params.learning_rate()
        );
    }
    match &cli.command {
        Command::Gain => print_gain(&run, out)?,
        Command::Update => print_updates(&run, out)?,
        Command::Figure { id } => {
            let id: FigureId = id.parse()?;
            let dataset = reproduce_figure(id, &layer.figure_overrides())?;
            write_dataset(&dataset, &run, out, err)?;
        }
        Command::Sweep {
            spec,
            vary,
            values,
            metric,
        } => {
            let spec = match spec {
                Some(path) => read_sweep_spec(path)?,
                None => sweep_from_flags(&run, vary.as_deref(), values, metric)?,
            };
            write_dataset(&sweep(&spec)?, &run, out, err)?;
        }
        Command::Valence => print_valence(&run, out)?,
        Command::Verify => {
            let report = verify::run(&VerifyConfig {
                samples: run.samples,
                seed: run.seed,
                ..Default::default()
            });
            out.write_all(report.render().as_bytes()).map_err(io_error)?;
            if !report.passed() {
                return Err(Failure::Verification);
            }
        }
    }
    Ok(())
}

fn scenario_line(p: &HabituationParams) -> String {
    format!(
        "# delta_i={} S_pl={} S_l={} alpha={} N={}\n",
        p.initial_prediction_error(),
        p.initial_uncertainty(),
        p.noise(),
        p.learning_rate(),
        p.exposures()
    )
}

fn table_row(cells: &[String]) -> String {
    let mut row = String::new();
    for (i, c) in cells.iter().enumerate() {
        if i == 0 {
            row.push_str(&format!("{c:>4}"));
        } else {
            row.push_str(&format!("  {c:>12}"));
        }
    }
    row.push('\n');
    row
}

fn t(v: f64) -> String {
    format_table_value(v, TABLE_DIGITS)
}

fn print_gain(run: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let p = &run.params;
    let mut text = scenario_line(p);
    text.push_str(&table_row(&["n".into(), "G_n".into(), "A_n".into(), "B_n".into()]));
    for n in 1..=p.exposures() {
        let terms = gain_terms(p, n)?;
        text.push_str(&table_row(&[
            n.to_string(),
            t(terms.gain(p.initial_prediction_error())),
            t(terms.a_term),
            t(terms.b_term),
        ]));
    }
    out.write_all(text.as_bytes()).map_err(io_error)
}

fn print_updates(run: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let p = &run.params;
    let stim = p.stimulus();
    let mut text = scenario_line(p);
    text.push_str(&table_row(&[
        "n".into(),
        "mean".into(),
        "variance".into(),
        "pred_error".into(),
    ]));
    for n in 0..=p.exposures() {
        let b = batch_update(p.prior(), stim.data_mean, n, stim.noise, p.learning_rate())?;
        text.push_str(&table_row(&[
            n.to_string(),
            t(b.mean()),
            t(b.variance()),
            t((b.mean() - stim.data_mean).abs()),
        ]));
    }
    out.write_all(text.as_bytes()).map_err(io_error)
}

fn print_valence(run: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let p = &run.params;
    let w = run.wundt_or_default();
    let g_star = positive_gain_crossing(&w)?;
    let mut text = format!(
        "# Wundt G_r={} G_a={} h_r={} h_a={} c={}\n",
        w.reward_threshold(),
        w.aversion_threshold(),
        w.reward_max(),
        w.aversion_max(),
        w.gradient()
    );
    text.push_str(&table_row(&["i".into(), "G".into(), "V(G)".into()]));
    let upper = 1.5 * g_star.max(w.aversion_threshold());
    for i in 0..=30 {
        let g = upper * f64::from(i) / 30.0;
        text.push_str(&table_row(&[i.to_string(), t(g), t(valence(g, &w))]));
    }
    text.push_str(&format!("# zero crossing G* = {}\n", t(g_star)));
    text.push_str(&scenario_line(p));
    let mut header = vec!["n".to_string(), "delta_g^2".into(), "delta_g".into()];
    if run.eq5_literal {
        header.push("literal".into());
    }
    text.push_str(&table_row(&header));
    for n in 1..=p.exposures() {
        let range = acceptable_prediction_error_with(p, &w, n, RangeFormula::Consistent)?;
        let mut row = vec![n.to_string(), t(range), t(range.sqrt())];
        if run.eq5_literal {
            row.push(t(acceptable_prediction_error_with(p, &w, n, RangeFormula::Literal)?));
        }
        text.push_str(&table_row(&row));
    }
    out.write_all(text.as_bytes()).map_err(io_error)
}

fn read_sweep_spec(path: &std::path::Path) -> Result<SweepSpec> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| Error::Json {
        context: format!("sweep spec {}", path.display()),
        source,
    })
}

fn sweep_from_flags(
    run: &RunConfig,
    vary: Option<&str>,
    values: &[f64],
    metric: &str,
) -> Result<SweepSpec> {
    let vary = vary.ok_or_else(|| Error::InvalidOverride {
        key: "vary".into(),
        reason: "either --spec or --vary is required".into(),
    })?;
    let parameter = SweepParameter::parse(vary).ok_or_else(|| Error::InvalidOverride {
        key: "vary".into(),
        reason: format!("unknown parameter `{vary}`"),
    })?;
    let metric_kind = Metric::parse(metric).ok_or_else(|| Error::MetricMismatch {
        metric: metric.into(),
        reason: "unknown metric".into(),
    })?;
    Ok(SweepSpec {
        parameter,
        values: values.to_vec(),
        fixed: run.params,
        wundt: metric_kind.needs_wundt().then(|| run.wundt_or_default()),
        metric: metric_kind,
        steps: run.params.exposures(),
        literal_range: run.eq5_literal,
    })
}

fn write_dataset(
    dataset: &Dataset,
    run: &RunConfig,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<()> {
    let format = run.output_format();
    match &run.out {
        Some(path) => {
            emit(dataset, format, path)?;
            let _ = writeln!(
                err,
                "wrote {} series ({} points) to {}",
                dataset.series().len(),
                dataset.point_count(),
                path.display()
            );
            Ok(())
        }
        None => {
            let text = render(dataset, format)?;
            out.write_all(text.as_bytes()).map_err(io_error)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut argv = vec!["habituation"];
        argv.extend_from_slice(args);
        let code = run_with_io(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn gain_table_first_row() {
        let (code, out, _) = run_capture(&[
            "gain", "--delta", "4", "--uncertainty", "1", "--noise", "0.5", "--alpha", "0.1",
            "--steps", "5",
        ]);
        assert_eq!(code, EXIT_OK);
        let row = out.lines().find(|l| l.trim_start().starts_with("1 ")).unwrap();
        assert!(row.contains("0.230050"), "{row}");
        assert_eq!(out.lines().count(), 2 + 5);
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run_capture(&["frobnicate"]).0, EXIT_VALIDATION);
        let (code, _, err) = run_capture(&["gain", "--bogus"]);
        assert_eq!(code, EXIT_VALIDATION);
        assert!(!err.is_empty());
        assert_eq!(run_capture(&["gain", "--noise", "-1"]).0, EXIT_VALIDATION);
        assert_eq!(run_capture(&["figure", "fig9"]).0, EXIT_VALIDATION);
        assert_eq!(run_capture(&["sweep", "--vary", "noise", "--values", "0.5", "--metric", "nope"]).0, EXIT_VALIDATION);
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run_capture(&["--help"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("verify"));
    }

    #[test]
    fn alpha_above_one_warns() {
        let (code, _, err) = run_capture(&["gain", "--alpha", "2"]);
        assert_eq!(code, EXIT_OK);
        assert!(err.contains("warning"));
    }

    #[test]
    fn io_failure_exits_three() {
        let (code, _, err) = run_capture(&["figure", "fig1", "--out", "/nonexistent/dir/f.csv"]);
        assert_eq!(code, EXIT_IO);
        assert!(err.contains("/nonexistent/dir/f.csv"));
        assert_eq!(run_capture(&["gain", "--config", "/nonexistent.json"]).0, EXIT_IO);
    }

    #[test]
    fn update_prints_prior_first() {
        let (code, out, _) = run_capture(&["update", "--steps", "2"]);
        assert_eq!(code, EXIT_OK);
        let rows: Vec<&str> = out.lines().skip(2).collect();
        assert_eq!(rows.len(), 3);
        assert!(rows[0].contains("1.00000"));
        assert!(rows[1].contains("0.666667") && rows[1].contains("0.833333"));
    }

    #[test]
    fn valence_table_with_literal_column() {
        let (code, out, _) = run_capture(&["valence", "--steps", "2", "--eq5-literal"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("G* = 1.82026"));
        assert!(out.contains("130.495"));
        assert!(out.contains("literal"));
    }

    #[test]
    fn sweep_from_flags_to_stdout() {
        let (code, out, _) = run_capture(&[
            "sweep", "--vary", "alpha", "--values", "0.05,0.1,0.2", "--steps", "3",
        ]);
        assert_eq!(code, EXIT_OK);
        assert_eq!(out.lines().count(), 1 + 9);
        assert!(out.starts_with("series,x,y\n"));
        let (code, _, _) = run_capture(&["sweep", "--metric", "gain"]);
        assert_eq!(code, EXIT_VALIDATION);
    }

    #[test]
    fn small_verify_passes() {
        let (code, out, _) = run_capture(&["verify", "--samples", "40", "--seed", "3"]);
        assert_eq!(code, EXIT_OK, "{out}");
        assert!(out.contains("summary: 8 passed, 0 failed"));
    }
}
