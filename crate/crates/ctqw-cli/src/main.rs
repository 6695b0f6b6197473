//! Command-line surface for the walk simulator: deterministic CSV datasets
//! for each experiment plus the acceptance checklist.
//!
//! Exit codes: 0 success, 1 invalid input, 2 runtime or numerical failure
//! (including failed verification), 3 I/O failure.

mod config;
mod csv;

use std::fmt;
use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use ctqw::experiments::{
    dynamic_trace, evolve_profiles, fig2_sweep, fig3_traces, fig4a_peaks, fig4b_sweep,
    fig5_compare, quadratic_prefactor, transfer_probe_times,
};
use ctqw::states::{DistributionSpec, Family};

use config::{Config, FloatList};
use csv::{fmt_real, CsvOut};

#[derive(Debug)]
pub enum CliError {
    Walk(ctqw::Error),
    Io { context: String, source: io::Error },
    Config(String),
    VerifyFailed(usize),
}

impl CliError {
    fn io(context: impl Into<String>, source: io::Error) -> Self {
        CliError::Io {
            context: context.into(),
            source,
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Walk(ctqw::Error::InvalidInput(_)) | CliError::Config(_) => 1,
            CliError::Walk(_) | CliError::VerifyFailed(_) => 2,
            CliError::Io { .. } => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Walk(e) => write!(f, "{e}"),
            CliError::Io { context, source } => write!(f, "{context}: {source}"),
            CliError::Config(msg) => write!(f, "{msg}"),
            CliError::VerifyFailed(count) => write!(f, "{count} acceptance criteria failed"),
        }
    }
}

impl From<ctqw::Error> for CliError {
    fn from(e: ctqw::Error) -> Self {
        CliError::Walk(e)
    }
}

#[derive(Parser)]
#[command(
    name = "ctqw",
    version,
    about = "Continuous-time quantum walk experiments on cycle and switchable graphs"
)]
struct Cli {
    /// Flat `key = value` config file; command-line flags override it
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output CSV path (stdout when omitted)
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Probability profiles of an evolving state at chosen probe times
    Evolve {
        /// Cycle size
        #[arg(long)]
        n: Option<usize>,
        /// Initial standard deviation in vertices
        #[arg(long)]
        sigma0: Option<f64>,
        /// delta, gaussian, logistic, gumbel, lorentz, or uniform
        #[arg(long)]
        family: Option<String>,
        /// Center vertex of the initial state
        #[arg(long)]
        center: Option<usize>,
        /// Comma-separated probe times (default: 0, tau/2, tau)
        #[arg(long)]
        times: Option<FloatList>,
    },
    /// One-vertex antipodal transfer sweep with power-law fits
    Fig2 {
        #[arg(long)]
        even_min: Option<usize>,
        #[arg(long)]
        even_max: Option<usize>,
        #[arg(long)]
        odd_min: Option<usize>,
        #[arg(long)]
        odd_max: Option<usize>,
    },
    /// Fidelity-over-time traces for several gaussian widths
    Fig3 {
        #[arg(long)]
        n: Option<usize>,
        /// Comma-separated list of widths
        #[arg(long)]
        sigma0s: Option<FloatList>,
        /// Number of sample times (overrides --dt-divisor)
        #[arg(long)]
        points: Option<usize>,
        /// Sampling density knob; the trace uses 6x this many points
        #[arg(long)]
        dt_divisor: Option<usize>,
    },
    /// Long-horizon fidelity peak envelopes
    Fig4a {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        sigma0s: Option<FloatList>,
        /// Track peaks to 10^4 transfer times instead of 10^2
        #[arg(long)]
        full_horizon: bool,
        /// Samples per peak-search window
        #[arg(long)]
        dt_divisor: Option<usize>,
    },
    /// First-transfer fidelity over n/sigma0 plus the transfer-time fit
    Fig4b {
        #[arg(long)]
        ratio_min: Option<usize>,
        #[arg(long)]
        ratio_max: Option<usize>,
        #[arg(long)]
        ratio_step: Option<usize>,
        #[arg(long)]
        sigma0_min: Option<usize>,
        #[arg(long)]
        sigma0_max: Option<usize>,
    },
    /// Distributed-family comparison at the first transfer and full period
    Fig5 {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        sigma0: Option<f64>,
    },
    /// Railroad-switch protocol trace
    Dynamic {
        #[arg(long)]
        small_n: Option<usize>,
        #[arg(long)]
        outer_n: Option<usize>,
        #[arg(long)]
        sigma0: Option<f64>,
        /// Extra confinement periods before the first switch
        #[arg(long)]
        extra_periods: Option<usize>,
        /// Probes per protocol stage
        #[arg(long)]
        probes_per_stage: Option<usize>,
        /// Directory for stage1/stage2/stage3 edge-list files
        #[arg(long)]
        stages_dir: Option<PathBuf>,
    },
    /// Run the acceptance checklist and print one line per criterion
    Verify {
        /// Extend the long-time storage check to 10^4 transfer times
        #[arg(long)]
        full_horizon: bool,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let ok = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let _ = e.print();
            return if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = Config::load(cli.config.as_deref())?;
    let out = cli.out.as_deref();
    match cli.command {
        Command::Evolve {
            n,
            sigma0,
            family,
            center,
            times,
        } => {
            let n = cfg.resolve(n, "n", 200)?;
            let sigma0 = cfg.resolve(sigma0, "sigma0", 10.0)?;
            let family = Family::parse(&cfg.resolve(family, "family", "gaussian".to_string())?)?;
            let center = cfg.resolve(center, "center", 0)?;
            let times = cfg.resolve_opt(times, "times")?;
            let dist = DistributionSpec::new(family, n, center, sigma0)?;
            let times = match times {
                Some(list) => list.0,
                None => transfer_probe_times(&dist)?,
            };
            let blocks = evolve_profiles(&dist, &times)?;
            let mut csv = CsvOut::create(out)?;
            csv.preamble(
                "time,vertex,probability",
                "evolve",
                &format!(
                    "n={n} sigma0={sigma0} family={family} center={center} times={}",
                    join_reals(&times)
                ),
            )?;
            if dist.narrow_graph_warning() {
                csv.line("# warning: n < 10 sigma0, localization assumption is marginal")?;
            }
            for block in &blocks {
                for (vertex, p) in block.profile.iter().enumerate() {
                    csv.row(&[fmt_real(block.time), vertex.to_string(), fmt_real(*p)])?;
                }
            }
            csv.finish()
        }
        Command::Fig2 {
            even_min,
            even_max,
            odd_min,
            odd_max,
        } => {
            let even = (
                cfg.resolve(even_min, "even-min", 4)?,
                cfg.resolve(even_max, "even-max", 200)?,
            );
            let odd = (
                cfg.resolve(odd_min, "odd-min", 5)?,
                cfg.resolve(odd_max, "odd-max", 199)?,
            );
            let data = fig2_sweep(even, odd)?;
            let mut csv = CsvOut::create(out)?;
            csv.preamble(
                "n,parity,tau,p_b_tau",
                "fig2",
                &format!("even={}..{} odd={}..{}", even.0, even.1, odd.0, odd.1),
            )?;
            for row in &data.rows {
                let parity = if row.n % 2 == 0 { "even" } else { "odd" };
                csv.row(&[
                    row.n.to_string(),
                    parity.to_string(),
                    fmt_real(row.tau),
                    fmt_real(row.p_b_tau),
                ])?;
            }
            for fit in [&data.fit_even, &data.fit_odd] {
                csv.line(&format!(
                    "# fit parity={} exponent={} prefactor={} r_squared={}",
                    fit.parity.as_str(),
                    fmt_real(fit.exponent),
                    fmt_real(fit.prefactor),
                    fmt_real(fit.r_squared)
                ))?;
            }
            csv.line(&format!(
                "# fit tau_vs_n slope={} intercept={} r_squared={}",
                fmt_real(data.tau_fit.slope),
                fmt_real(data.tau_fit.intercept),
                fmt_real(data.tau_fit.r_squared)
            ))?;
            csv.finish()
        }
        Command::Fig3 {
            n,
            sigma0s,
            points,
            dt_divisor,
        } => {
            let n = cfg.resolve(n, "n", 200)?;
            let sigma0s = cfg
                .resolve_opt(sigma0s, "sigma0s")?
                .map_or(vec![1.0, 5.0, 10.0], |l| l.0);
            let divisor = cfg.resolve(dt_divisor, "dt-divisor", 200)?;
            let points = cfg.resolve(points, "points", 6 * divisor)?;
            let data = fig3_traces(n, &sigma0s, points)?;
            let mut csv = CsvOut::create(out)?;
            csv.preamble(
                "sigma0,time,fidelity",
                "fig3",
                &format!("n={n} sigma0s={} points={points}", join_reals(&sigma0s)),
            )?;
            csv.line(&format!("# transfer_times={}", join_reals(&data.taus)))?;
            for (s, values) in data.sigma0s.iter().zip(&data.values) {
                for (t, v) in data.times.iter().zip(values) {
                    csv.row(&[fmt_real(*s), fmt_real(*t), fmt_real(*v)])?;
                }
            }
            csv.finish()
        }
        Command::Fig4a {
            n,
            sigma0s,
            full_horizon,
            dt_divisor,
        } => {
            let n = cfg.resolve(n, "n", 100)?;
            let sigma0s = cfg
                .resolve_opt(sigma0s, "sigma0s")?
                .map_or(vec![5.0, 6.0, 7.0, 8.0, 9.0, 10.0], |l| l.0);
            let full = cfg.resolve_switch(full_horizon, "full-horizon")?;
            let samples = cfg.resolve(dt_divisor, "dt-divisor", 200)?;
            let max_multiple = if full { 10_000 } else { 100 };
            let series = fig4a_peaks(n, &sigma0s, max_multiple, samples)?;
            let mut csv = CsvOut::create(out)?;
            csv.preamble(
                "sigma0,peak_index,peak_time,peak_value",
                "fig4a",
                &format!(
                    "n={n} sigma0s={} max_multiple={max_multiple} dt_divisor={samples}",
                    join_reals(&sigma0s)
                ),
            )?;
            let absent: usize = series
                .iter()
                .map(|s| s.peaks.iter().filter(|p| p.is_none()).count())
                .sum();
            if absent > 0 {
                csv.line(&format!(
                    "# warning: {absent} windows contained no interior maximum"
                ))?;
            }
            for s in &series {
                csv.line(&format!(
                    "# sigma0={} tau={}",
                    fmt_real(s.sigma0),
                    fmt_real(s.tau)
                ))?;
                for peak in s.peaks.iter().flatten() {
                    csv.row(&[
                        fmt_real(s.sigma0),
                        peak.index.to_string(),
                        fmt_real(peak.time),
                        fmt_real(peak.value),
                    ])?;
                }
            }
            csv.finish()
        }
        Command::Fig4b {
            ratio_min,
            ratio_max,
            ratio_step,
            sigma0_min,
            sigma0_max,
        } => {
            let lo = cfg.resolve(ratio_min, "ratio-min", 10)?;
            let hi = cfg.resolve(ratio_max, "ratio-max", 100)?;
            let step = cfg.resolve(ratio_step, "ratio-step", 1)?.max(1);
            let s_lo = cfg.resolve(sigma0_min, "sigma0-min", 5)?;
            let s_hi = cfg.resolve(sigma0_max, "sigma0-max", 10)?;
            let ratios: Vec<usize> = (lo..=hi).step_by(step).collect();
            let sigma0s: Vec<usize> = (s_lo..=s_hi).collect();
            let data = fig4b_sweep(&ratios, &sigma0s)?;
            let mut csv = CsvOut::create(out)?;
            csv.preamble(
                "n_over_sigma0,sigma0,n,tau,fidelity_at_tau",
                "fig4b",
                &format!("ratios={lo}..{hi} step={step} sigma0={s_lo}..{s_hi}"),
            )?;
            for row in &data.rows {
                csv.row(&[
                    row.ratio.to_string(),
                    fmt_real(row.sigma0 as f64),
                    row.n.to_string(),
                    fmt_real(row.tau),
                    fmt_real(row.fidelity_at_tau),
                ])?;
            }
            let points: Vec<(f64, f64)> = data.rows.iter().map(|r| (r.n as f64, r.tau)).collect();
            csv.line(&format!(
                "# fit tau_quadratic prefactor={} loglog_exponent={} loglog_prefactor={}",
                fmt_real(quadratic_prefactor(&points)?),
                fmt_real(-data.tau_power_fit.exponent),
                fmt_real(data.tau_power_fit.prefactor)
            ))?;
            csv.finish()
        }
        Command::Fig5 { n, sigma0 } => {
            let n = cfg.resolve(n, "n", 200)?;
            let sigma0 = cfg.resolve(sigma0, "sigma0", 10.0)?;
            let rows = fig5_compare(n, sigma0)?;
            let mut csv = CsvOut::create(out)?;
            csv.preamble(
                "family,tau,fidelity_at_tau,second_peak_time,fidelity_at_2tau",
                "fig5",
                &format!("n={n} sigma0={sigma0}"),
            )?;
            for row in &rows {
                csv.row(&[
                    row.family.to_string(),
                    fmt_real(row.tau),
                    fmt_real(row.fidelity_at_tau),
                    fmt_real(row.second_peak_time),
                    fmt_real(row.fidelity_at_2tau),
                ])?;
            }
            csv.finish()
        }
        Command::Dynamic {
            small_n,
            outer_n,
            sigma0,
            extra_periods,
            probes_per_stage,
            stages_dir,
        } => {
            let small_n = cfg.resolve(small_n, "small-n", 20)?;
            let outer_n = cfg.resolve(outer_n, "outer-n", 60)?;
            let sigma0 = cfg.resolve(sigma0, "sigma0", 1.0)?;
            let extra = cfg.resolve(extra_periods, "extra-periods", 0)?;
            let probes = cfg.resolve(probes_per_stage, "probes-per-stage", 20)?;
            let stages_dir = cfg.resolve_opt(stages_dir, "stages-dir")?;
            let data = dynamic_trace(small_n, outer_n, sigma0, extra, probes)?;
            if let Some(dir) = stages_dir {
                std::fs::create_dir_all(&dir)
                    .map_err(|e| CliError::io(format!("creating {}", dir.display()), e))?;
                let geom = &data.protocol.geometry;
                for (name, topo) in [
                    ("stage1", &geom.stage1),
                    ("stage2", &geom.stage2),
                    ("stage3", &geom.stage3),
                ] {
                    let path = dir.join(name);
                    let file = std::fs::File::create(&path)
                        .map_err(|e| CliError::io(format!("opening {}", path.display()), e))?;
                    topo.write_edge_list(io::BufWriter::new(file))
                        .map_err(|e| CliError::io(format!("writing {}", path.display()), e))?;
                }
            }
            let mut csv = CsvOut::create(out)?;
            csv.preamble(
                "time,center_vertex,component,component_mass,total_probability,goal_fidelity",
                "dynamic",
                &format!(
                    "small_n={small_n} outer_n={outer_n} sigma0={sigma0} extra_periods={extra} probes_per_stage={probes}"
                ),
            )?;
            let p = &data.protocol;
            csv.line(&format!(
                "# tau_s={} tau_e={} t1={} t2={} final_fidelity={}",
                fmt_real(p.tau_s),
                fmt_real(p.tau_e),
                fmt_real(p.t1),
                fmt_real(p.t2),
                fmt_real(data.final_fidelity)
            ))?;
            csv.line(
                "# goal_fidelity is the squared overlap with the initial profile re-centered at c",
            )?;
            for row in &data.rows {
                csv.row(&[
                    fmt_real(row.time),
                    row.center_vertex.to_string(),
                    row.component.to_string(),
                    fmt_real(row.component_mass),
                    fmt_real(row.total_probability),
                    fmt_real(row.goal_fidelity),
                ])?;
            }
            csv.finish()
        }
        Command::Verify { full_horizon } => {
            let full = cfg.resolve_switch(full_horizon, "full-horizon")?;
            let reports = ctqw::acceptance::run_all(full);
            let failed = reports.iter().filter(|r| !r.passed).count();
            for report in &reports {
                println!("{}", report.summary());
            }
            println!(
                "{} of {} criteria passed{}",
                reports.len() - failed,
                reports.len(),
                if full { " (full horizon)" } else { "" }
            );
            if failed > 0 {
                Err(CliError::VerifyFailed(failed))
            } else {
                Ok(())
            }
        }
    }
}

fn join_reals(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}
