//! Command-line interface.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::channels::DecayRate;
use crate::correlations::CorrelationRecord;
use crate::dynamics::{emergence_time, sweep, ChannelFamily, DEFAULT_GRID_POINTS};
use crate::error::{Error, Result};
use crate::io::{
    bands_csv, format_sig, monte_carlo_bands, report_csv, to_json, write_text, Deviations, Emit,
    Format, MonteCarloBands, MonteCarloConfig, RunConfig, StateSource, StateSpec, CSV_HEADER,
    DEFAULT_SAMPLES,
};
use crate::verify::{run_suite, Suite};

#[derive(Parser)]
#[command(
    name = "einselect",
    version,
    about = "Pointer-basis emergence from classical correlations under decoherence"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep a state through a channel family and report J, J^max and discord per strength.
    Sweep {
        #[command(flatten)]
        input: StateArgs,
        #[command(flatten)]
        channel: ChannelArgs,
        /// Recorded in the run configuration; the sweep itself draws no random numbers.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Closed-form emergence time of an X state under phase damping, cross-checked by a sweep.
    Emergence {
        /// state1, state2, remark, bell or x:c,b,z,w
        #[arg(long, default_value = "state1")]
        state: StateSpec,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
        grid: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Maximize the classical correlation of a single state, optionally after a channel.
    Maximize {
        #[command(flatten)]
        input: StateArgs,
        #[arg(long, default_value = "pd")]
        channel: ChannelFamily,
        /// Channel strength applied before maximizing.
        #[arg(long, default_value_t = 0.0)]
        p: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run a randomized property suite: theorem1, theorem2, lemma1 or remark.
    Verify {
        suite: Suite,
        /// Defaults: theorem1 1000, theorem2 200, lemma1 500, remark 201 grid points.
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Sweep a measured density matrix, with Monte Carlo bands when it carries uncertainties.
    Analyze {
        #[arg(long)]
        matrix_file: PathBuf,
        #[command(flatten)]
        channel: ChannelArgs,
        /// Monte Carlo samples; 0 disables the bands.
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Args)]
struct StateArgs {
    /// state1, state2, remark, bell or x:c,b,z,w
    #[arg(long, conflicts_with = "matrix_file")]
    state: Option<StateSpec>,
    /// Density matrix in the text format (dim / real / imag blocks).
    #[arg(long)]
    matrix_file: Option<PathBuf>,
}

impl StateArgs {
    fn source(&self) -> StateSource {
        match (&self.state, &self.matrix_file) {
            (_, Some(path)) => StateSource::MatrixFile(path.clone()),
            (Some(spec), None) => StateSource::Spec(*spec),
            (None, None) => RunConfig::default().state,
        }
    }
}

#[derive(Args)]
struct ChannelArgs {
    /// pd, ad, pointer or pointer:THETA,PHI
    #[arg(long, default_value = "pd")]
    channel: ChannelFamily,
    /// Decay rate γ in p(t) = 1 - exp(-γt).
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    /// Number of evenly spaced strengths in [0, 1].
    #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
    grid: usize,
}

#[derive(Args)]
struct OutputArgs {
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    format: Format,
}

impl OutputArgs {
    fn write(&self, stdout: &mut dyn Write, text: &str) -> Result<()> {
        match &self.out {
            Some(path) => write_text(path, text),
            None => stdout.write_all(text.as_bytes()).map_err(|e| Error::Io {
                path: "<stdout>".into(),
                source: e,
            }),
        }
    }
}

fn run_config(
    source: StateSource,
    ch: &ChannelArgs,
    samples: usize,
    seed: u64,
    out: &OutputArgs,
) -> Result<RunConfig> {
    let config = RunConfig {
        state: source,
        channel: ch.channel,
        gamma: ch.gamma,
        grid_points: ch.grid,
        samples,
        seed,
        out: out.out.clone(),
        format: out.format,
        ..RunConfig::default()
    };
    config.validate()?;
    Ok(config)
}

fn report_deviations(dev: &Option<Deviations>) {
    if let Some(d) = dev {
        eprintln!(
            "input deviations: hermiticity {:.3e}, trace {:.3e}, min eigenvalue {:.3e}, projection distance {:.3e}",
            d.hermiticity, d.trace, d.min_eigenvalue, d.projection_distance
        );
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| format_sig(v, 12)).unwrap_or_default()
}

#[derive(Serialize)]
struct EmergenceOutput {
    state: String,
    gamma: f64,
    emerges: bool,
    tau_e: Option<f64>,
    p_e: Option<f64>,
    tau_d: f64,
    p_at_tau_d: f64,
    /// Transition found by sweeping the state under phase damping.
    detected_p: Option<f64>,
    /// Closed form and sweep agree to within 1e-6 in p (or both report none).
    agrees: bool,
}

#[derive(Serialize)]
struct Analysis<'a> {
    report: &'a crate::dynamics::TrajectoryReport,
    deviations: Option<Deviations>,
    bands: Option<&'a MonteCarloBands>,
}

fn bands_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("report");
    out.with_file_name(format!("{stem}.bands.csv"))
}

/// Executes a parsed command, sending anything without `--out` to `stdout`.
pub fn run(cli: Cli, stdout: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Sweep {
            input,
            channel,
            seed,
            output,
        } => {
            let config = run_config(input.source(), &channel, 0, seed, &output)?;
            let loaded = config.state.load()?;
            report_deviations(&loaded.deviations);
            let report = sweep(
                &loaded.state,
                config.channel,
                &config.grid()?,
                &config.sweep_config()?,
            )?;
            output.write(stdout, &Emit::Trajectory(&report).render(output.format)?)
        }
        Command::Emergence {
            state,
            gamma,
            grid,
            output,
        } => {
            let params = state
                .x_params()
                .ok_or_else(|| Error::UnknownState(state.to_string()))?;
            let rate = DecayRate::new(gamma)?;
            let closed = emergence_time(params, rate)?;
            let ch = ChannelArgs {
                channel: ChannelFamily::PhaseDamping,
                gamma,
                grid,
            };
            let config = run_config(StateSource::Spec(state), &ch, 0, 0, &output)?;
            let report = sweep(
                &state.build()?,
                ChannelFamily::PhaseDamping,
                &config.grid()?,
                &config.sweep_config()?,
            )?;
            let detected_p = report.transition_p;
            let agrees = match (closed.as_ref().map(|e| e.p_e), detected_p) {
                (Some(a), Some(b)) => (a - b).abs() <= 1e-6,
                (None, None) => true,
                _ => false,
            };
            let result = EmergenceOutput {
                state: state.to_string(),
                gamma,
                emerges: closed.is_some(),
                tau_e: closed.as_ref().map(|e| e.tau_e),
                p_e: closed.as_ref().map(|e| e.p_e),
                tau_d: rate.tau_d(),
                p_at_tau_d: rate.strength_at(rate.tau_d()),
                detected_p,
                agrees,
            };
            let text = match output.format {
                Format::Json => to_json(&result)?,
                Format::Csv => format!(
                    "emerges,tau_e,p_e,tau_d,p_at_tau_d,detected_p,agrees\n{},{},{},{},{},{},{}\n",
                    result.emerges,
                    opt(result.tau_e),
                    opt(result.p_e),
                    format_sig(result.tau_d, 12),
                    format_sig(result.p_at_tau_d, 12),
                    opt(result.detected_p),
                    result.agrees
                ),
            };
            output.write(stdout, &text)
        }
        Command::Maximize {
            input,
            channel,
            p,
            output,
        } => {
            let loaded = input.source().load()?;
            report_deviations(&loaded.deviations);
            let rho = channel.evolve(&loaded.state, p)?;
            let record = CorrelationRecord::compute(p, &rho, &Default::default())?;
            let text = match output.format {
                Format::Json => to_json(&record)?,
                Format::Csv => {
                    let row = [
                        record.p,
                        record.j_z,
                        record.j_x,
                        record.j_max,
                        record.opt_theta,
                        record.opt_phi,
                        record.mutual_info,
                        record.discord,
                    ]
                    .map(|x| format_sig(x, 12))
                    .join(",");
                    format!("{CSV_HEADER}\n{row}\n")
                }
            };
            output.write(stdout, &text)
        }
        Command::Verify {
            suite,
            trials,
            seed,
            output,
        } => {
            let trials = trials.unwrap_or(match suite {
                Suite::Theorem1 => 1000,
                Suite::Theorem2 => 200,
                Suite::Lemma1 => 500,
                Suite::Remark => DEFAULT_GRID_POINTS,
            });
            let outcome = run_suite(suite, trials, seed)?;
            output.write(stdout, &Emit::Verification(&outcome).render(output.format)?)?;
            if outcome.passed() {
                Ok(())
            } else {
                Err(Error::Verification {
                    suite: suite.to_string(),
                    trials: outcome.trials,
                    failures: outcome.failures,
                })
            }
        }
        Command::Analyze {
            matrix_file,
            channel,
            samples,
            seed,
            output,
        } => {
            let config = run_config(
                StateSource::MatrixFile(matrix_file),
                &channel,
                samples,
                seed,
                &output,
            )?;
            let loaded = config.state.load()?;
            report_deviations(&loaded.deviations);
            let grid = config.grid()?;
            let sweep_config = config.sweep_config()?;
            let report = sweep(&loaded.state, config.channel, &grid, &sweep_config)?;
            let matrix = loaded.matrix.as_ref().expect("matrix input");
            let bands = match (samples, &matrix.std) {
                (0, _) => None,
                (_, None) => {
                    eprintln!("no uncertainties in the matrix file; skipping Monte Carlo bands");
                    None
                }
                (n, Some(_)) => Some(monte_carlo_bands(
                    matrix,
                    &MonteCarloConfig {
                        family: config.channel,
                        grid,
                        sweep: sweep_config,
                        samples: n,
                        seed,
                    },
                )?),
            };
            match output.format {
                Format::Json => output.write(
                    stdout,
                    &to_json(&Analysis {
                        report: &report,
                        deviations: loaded.deviations,
                        bands: bands.as_ref(),
                    })?,
                ),
                Format::Csv => {
                    let main = report_csv(&report)?;
                    match (&bands, &output.out) {
                        (None, _) => output.write(stdout, &main),
                        (Some(b), Some(path)) => {
                            let text = bands_csv(b)?;
                            output.write(stdout, &main)?;
                            write_text(&bands_path(path), &text)
                        }
                        (Some(b), None) => {
                            output.write(stdout, &format!("{main}\n{}", bands_csv(b)?))
                        }
                    }
                }
            }
        }
    }
}

/// Parses `args` (including the program name) and runs them. Returns the
/// process exit code: 0 success, 1 invalid input, 2 data quality, 3
/// verification failure.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
