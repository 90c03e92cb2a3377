//! Command-line front end: scenario batches, β-model fitting, single-shot
//! admission checks and trace utilities.

mod output;
mod scenario;

pub use output::SummaryRow;
pub use scenario::{parse_scenarios, resolve, Defaults, ScenarioSpec};

use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, Subcommand};
use thiserror::Error;

use crate::admission::{
    cbac_decide, pro_ibmac_decide, BetaSource, CoefficientPreset, Policy,
};
use crate::betafit::{fit_beta_model, goodness, BetaPoint};
use crate::measurement::{iaar, RateState, SessionRate};
use crate::simlink::run_simulation;
use crate::traffic::{load_trace, synth_trace, SynthParams};

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad inputs: scenario/CSV parse failures, missing files. Exit 2.
    #[error("{0}")]
    Config(String),
    /// Failures while running or writing outputs. Exit 3.
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

/// Default output directory: `--out`, else `QOEMBAC_OUT`, else `.`.
fn out_dir(flag: &Option<PathBuf>) -> PathBuf {
    flag.clone()
        .or_else(|| std::env::var_os("QOEMBAC_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

#[derive(Debug, Parser)]
#[command(name = "qoembac", version, about = "Admission-control experiments for bursty video traffic")]
pub struct Cli {
    /// Output directory for CSV bundles.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Overrides every scenario seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Also write per-packet CSVs (large).
    #[arg(long, global = true)]
    pub packets_csv: bool,
    /// Suppress progress output.
    #[arg(long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run every scenario in a batch file and write CSV bundles.
    Simulate { file: PathBuf },
    /// Fit β-model coefficients to observed (c_l, n, β) points.
    Fit {
        csv: PathBuf,
        /// Also evaluate a named preset on the same points.
        #[arg(long)]
        preset: Option<String>,
    },
    /// Decide a single admission from a measured-state CSV.
    Admit {
        #[arg(long)]
        state: PathBuf,
        /// Peak rate of the new session, bits/s.
        #[arg(long)]
        xnew: f64,
        /// Link capacity, bits/s.
        #[arg(long)]
        cl: f64,
        #[arg(long)]
        policy: String,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        preset: Option<String>,
    },
    /// Trace utilities.
    Trace {
        #[command(subcommand)]
        command: TraceCommand,
    },
}

#[derive(Debug, Subcommand)]
pub enum TraceCommand {
    /// Synthesize a VBR trace file.
    Synth {
        #[arg(long)]
        mean_mbps: f64,
        #[arg(long, default_value_t = 1.0)]
        burstiness: f64,
        /// Trace duration in seconds.
        #[arg(long)]
        duration: f64,
        #[arg(long, default_value_t = 30.0)]
        fps: f64,
        #[arg(long, default_value_t = 30)]
        gop: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output trace file.
        #[arg(long)]
        output: PathBuf,
    },
    /// Print summary statistics of a trace file.
    Inspect { file: PathBuf },
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Simulate { file } => cmd_simulate(cli, file),
        Command::Fit { csv, preset } => cmd_fit(cli, csv, preset.as_deref()),
        Command::Admit { state, xnew, cl, policy, beta, preset } => {
            cmd_admit(cli, state, *xnew, *cl, policy, *beta, preset.as_deref())
        }
        Command::Trace { command } => match command {
            TraceCommand::Synth { mean_mbps, burstiness, duration, fps, gop, seed, output } => {
                cmd_trace_synth(cli, *mean_mbps, *burstiness, *duration, *fps, *gop, *seed, output)
            }
            TraceCommand::Inspect { file } => cmd_trace_inspect(cli, file),
        },
    }
}

fn say(cli: &Cli, msg: &str) {
    if !cli.quiet {
        println!("{msg}");
    }
}

fn cmd_simulate(cli: &Cli, file: &Path) -> Result<(), CliError> {
    let text = std::fs::read_to_string(file)
        .map_err(|e| CliError::Config(format!("scenario file {file:?}: {e}")))?;
    let parsed = parse_scenarios(&text)?;
    let out = out_dir(&cli.out);
    let mut rollup = String::from(output::SUMMARY_HEADER);
    for spec in &parsed.scenarios {
        let resolved = resolve(spec, &parsed.defaults, cli.seed, cli.packets_csv)?;
        for variant in &resolved.variants {
            let report = run_simulation(&variant.config, &resolved.traces)
                .map_err(|e| match e {
                    crate::simlink::SimError::UnknownTrace(_)
                    | crate::simlink::SimError::InvalidConfig(_) => CliError::Config(e.to_string()),
                    other => CliError::Runtime(other.to_string()),
                })?;
            for w in &report.warnings {
                say(cli, &format!("warning: {}: {w}", resolved.name));
            }
            let qoe_rows = output::session_qoe(&report, &resolved.traces)?;
            let dir = out.join(&resolved.name).join(&variant.label);
            output::write_file(&dir.join("admissions.csv"), &output::admissions_csv(&report))?;
            output::write_file(&dir.join("rates.csv"), &output::rates_csv(&report))?;
            output::write_file(&dir.join("qoe.csv"), &output::qoe_csv(&qoe_rows))?;
            if cli.packets_csv {
                output::write_file(&dir.join("packets.csv"), &output::packets_csv(&report))?;
            }
            let row = output::summarize(&resolved.name, &variant.label, &report, &qoe_rows);
            let line = output::summary_line(&row);
            output::write_file(
                &dir.join("summary.csv"),
                &format!("{}{}", output::SUMMARY_HEADER, line),
            )?;
            rollup.push_str(&line);
            say(
                cli,
                &format!(
                    "{}/{}: admitted {} of {}, drop_ratio {:.4}",
                    resolved.name,
                    variant.label,
                    row.admitted,
                    row.requests,
                    row.drop_ratio
                ),
            );
        }
    }
    output::write_file(&out.join("summary.csv"), &rollup)?;
    Ok(())
}

/// Parses `c_l_mbps,n,beta` rows (header required).
fn parse_points(text: &str) -> Result<Vec<BetaPoint<f64>>, CliError> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| CliError::Config("empty points CSV".into()))?;
    if !header.to_ascii_lowercase().replace(' ', "").starts_with("c_l_mbps,n,beta") {
        return Err(CliError::Config(format!(
            "points CSV must start with header `c_l_mbps,n,beta`, got {header:?}"
        )));
    }
    let mut points = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if cols.len() != 3 {
            return Err(CliError::Config(format!("line {}: expected 3 columns", i + 2)));
        }
        let parse_f = |s: &str| {
            f64::from_str(s)
                .map_err(|e| CliError::Config(format!("line {}: {s:?}: {e}", i + 2)))
        };
        let c_l = parse_f(cols[0])?;
        let n: usize = cols[1]
            .parse()
            .map_err(|e| CliError::Config(format!("line {}: {:?}: {e}", i + 2, cols[1])))?;
        let beta = parse_f(cols[2])?;
        points.push(
            BetaPoint::new(c_l, n, beta)
                .map_err(|e| CliError::Config(format!("line {}: {e}", i + 2)))?,
        );
    }
    Ok(points)
}

fn cmd_fit(cli: &Cli, csv: &Path, preset: Option<&str>) -> Result<(), CliError> {
    let text = std::fs::read_to_string(csv)
        .map_err(|e| CliError::Config(format!("points CSV {csv:?}: {e}")))?;
    let points = parse_points(&text)?;
    let fit = fit_beta_model(&points).map_err(|e| CliError::Config(e.to_string()))?;
    println!("alpha = {}", fit.alpha);
    println!("delta = {}", fit.delta);
    println!("r_squared = {}", fit.r_squared);
    println!("adj_r_squared = {}", fit.adj_r_squared);
    println!("rmse = {}", fit.rmse);
    println!("n_points = {}", fit.n_points);
    let mut csv_out = String::from("model,alpha,delta,r_squared,adj_r_squared,rmse,n_points\n");
    csv_out.push_str(&format!(
        "fit,{},{},{},{},{},{}\n",
        fit.alpha, fit.delta, fit.r_squared, fit.adj_r_squared, fit.rmse, fit.n_points
    ));
    if let Some(name) = preset {
        let preset: CoefficientPreset =
            name.parse().map_err(|e| CliError::Config(format!("{e}")))?;
        let model = crate::BetaModel { clamp: false, ..preset.model() };
        let (r2, rmse) = goodness(&model, &points);
        println!("preset {} -> r_squared = {r2}, rmse = {rmse}", preset.name());
        csv_out.push_str(&format!(
            "{},{},{},{},,{},{}\n",
            preset.name(),
            model.alpha,
            model.delta,
            r2,
            rmse,
            points.len()
        ));
    }
    output::write_file(&out_dir(&cli.out).join("fit.csv"), &csv_out)?;
    Ok(())
}

/// Parses `session_id,x_bps,p,x_min,x_max` rows (header required).
fn parse_state(text: &str) -> Result<RateState<f64>, CliError> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| CliError::Config("empty state CSV".into()))?;
    if !header.to_ascii_lowercase().replace(' ', "").starts_with("session_id,x_bps,p,x_min,x_max") {
        return Err(CliError::Config(format!(
            "state CSV must start with header `session_id,x_bps,p,x_min,x_max`, got {header:?}"
        )));
    }
    let mut per_session = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if cols.len() != 5 {
            return Err(CliError::Config(format!("line {}: expected 5 columns", i + 2)));
        }
        let err = |e: String| CliError::Config(format!("line {}: {e}", i + 2));
        per_session.push(SessionRate {
            session_id: cols[0].parse().map_err(|e| err(format!("{e}")))?,
            rate: cols[1].parse().map_err(|e| err(format!("{e}")))?,
            activity: cols[2].parse().map_err(|e| err(format!("{e}")))?,
            rate_min: cols[3].parse().map_err(|e| err(format!("{e}")))?,
            rate_max: cols[4].parse().map_err(|e| err(format!("{e}")))?,
        });
    }
    RateState::new(0.0, per_session).map_err(|e| CliError::Config(e.to_string()))
}

fn cmd_admit(
    _cli: &Cli,
    state_path: &Path,
    x_new: f64,
    c_l: f64,
    policy: &str,
    beta: Option<f64>,
    preset: Option<&str>,
) -> Result<(), CliError> {
    let text = std::fs::read_to_string(state_path)
        .map_err(|e| CliError::Config(format!("state CSV {state_path:?}: {e}")))?;
    let state = parse_state(&text)?;
    let policy: Policy = policy.parse().map_err(|e| CliError::Config(format!("{e}")))?;
    let decision = match policy {
        Policy::Cbac => cbac_decide(iaar(&state), x_new, c_l, 0.0),
        Policy::ProIbmac => {
            let source = match (beta, preset) {
                (Some(b), None) => BetaSource::Fixed(b),
                (None, Some(name)) => {
                    let p: CoefficientPreset =
                        name.parse().map_err(|e| CliError::Config(format!("{e}")))?;
                    BetaSource::Model(p.model())
                }
                (None, None) => {
                    return Err(CliError::Config("pro-ibmac needs --beta or --preset".into()))
                }
                (Some(_), Some(_)) => {
                    return Err(CliError::Config("--beta and --preset are mutually exclusive".into()))
                }
            };
            pro_ibmac_decide(&state, x_new, c_l, &source)
        }
        Policy::None => return Err(CliError::Config("policy none takes no decision".into())),
    };
    println!("{}", if decision.accepted { "accept" } else { "reject" });
    match policy {
        Policy::Cbac => println!("calr_bps = {}", decision.measured),
        _ => println!("pro_iaar_bps = {}", decision.measured),
    }
    if let Some(b) = decision.beta_used {
        println!("beta = {b}");
    }
    if let Some(e) = &decision.error {
        println!("note = {e}");
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_trace_synth(
    cli: &Cli,
    mean_mbps: f64,
    burstiness: f64,
    duration: f64,
    fps: f64,
    gop: usize,
    seed: u64,
    output: &Path,
) -> Result<(), CliError> {
    let seed = cli.seed.unwrap_or(seed);
    let trace = synth_trace(&SynthParams {
        mean_bitrate: mean_mbps * 1e6,
        burstiness,
        duration,
        fps,
        gop,
        seed,
    })
    .map_err(|e| CliError::Config(e.to_string()))?;
    let mut text = String::from("# index type size_bytes psnr_db\n");
    for f in trace.frames() {
        text.push_str(&format!(
            "{} {:?} {} {}\n",
            f.index, f.frame_type, f.size, f.ref_psnr
        ));
    }
    output::write_file(output, &text)?;
    say(cli, &format!("wrote {} frames to {}", trace.frames().len(), output.display()));
    Ok(())
}

fn cmd_trace_inspect(_cli: &Cli, file: &Path) -> Result<(), CliError> {
    let text = std::fs::read_to_string(file)
        .map_err(|e| CliError::Config(format!("trace file {file:?}: {e}")))?;
    let trace = load_trace(&text).map_err(|e| CliError::Config(e.to_string()))?;
    let mean_bps = trace.total_bytes() as f64 * 8.0 / trace.duration();
    let peak = crate::traffic::peak_wire_rate(&trace, 1024, 1.0);
    println!("frames = {}", trace.frames().len());
    println!("duration_s = {}", trace.duration());
    println!("total_bytes = {}", trace.total_bytes());
    println!("mean_payload_bps = {mean_bps}");
    println!("peak_wire_bps_1s = {peak}");
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_points_round_trip() {
        let pts = parse_points("c_l_mbps,n,beta\n22,15,0.96\n40,30,0.83\n").unwrap();
        assert_eq!(pts.len(), 2);
        assert_eq!(pts[1].n, 30);
        assert!(parse_points("wrong,header\n1,2,3\n").is_err());
        assert!(parse_points("c_l_mbps,n,beta\n22,15\n").is_err());
    }

    #[test]
    fn parse_state_round_trip() {
        let s = parse_state(
            "session_id,x_bps,p,x_min,x_max\n1,2000000,0.5,0,4000000\n2,1000000,1.0,0,1000000\n",
        )
        .unwrap();
        assert_eq!(s.n(), 2);
        assert_eq!(iaar(&s), 3_000_000.0);
        assert!(parse_state("bad\n").is_err());
    }
}
