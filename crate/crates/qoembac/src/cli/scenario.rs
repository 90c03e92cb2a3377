//! Scenario files: TOML with one `[[scenario]]` section per run plus an
//! optional `[defaults]` table.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use serde::Deserialize;

use crate::admission::{BetaSource, CoefficientPreset, Policy};
use crate::simlink::{every_second_arrivals, SimConfig};
use crate::traffic::{load_trace, synth_trace, SynthParams, VideoTrace};

use super::CliError;

#[derive(Debug, Deserialize, Default, Clone)]
#[serde(deny_unknown_fields)]
pub struct Defaults {
    pub duration_s: Option<f64>,
    pub tick_s: Option<f64>,
    pub queue_capacity: Option<usize>,
    pub prop_delay_ms: Option<f64>,
    pub payload_limit: Option<u64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Deserialize, Clone)]
#[serde(deny_unknown_fields)]
pub struct SynthSpec {
    pub mean_mbps: f64,
    #[serde(default = "default_burstiness")]
    pub burstiness: f64,
    /// Defaults to the scenario duration.
    pub duration_s: Option<f64>,
    #[serde(default = "default_fps")]
    pub fps: f64,
    #[serde(default = "default_gop")]
    pub gop: usize,
    pub seed: Option<u64>,
}

fn default_burstiness() -> f64 {
    1.0
}
fn default_fps() -> f64 {
    30.0
}
fn default_gop() -> usize {
    30
}

#[derive(Debug, Deserialize, Clone)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub name: String,
    pub capacity_mbps: f64,
    pub policies: Vec<String>,
    /// β from a named coefficient preset...
    pub preset: Option<String>,
    /// ...or one fixed β...
    pub beta: Option<f64>,
    /// ...or a β sweep (one Pro-IBMAC variant per value).
    pub betas: Option<Vec<f64>>,
    pub trace_file: Option<String>,
    pub synth: Option<SynthSpec>,
    /// Declared x_new; auto-derived from the trace when absent.
    pub peak_rate_mbps: Option<f64>,
    pub duration_s: Option<f64>,
    pub tick_s: Option<f64>,
    pub queue_capacity: Option<usize>,
    pub prop_delay_ms: Option<f64>,
    pub payload_limit: Option<u64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default)]
    pub defaults: Defaults,
    #[serde(rename = "scenario")]
    pub scenarios: Vec<ScenarioSpec>,
}

/// One concrete simulator run derived from a scenario section.
pub struct Variant {
    /// Directory-safe label, e.g. `cbac` or `pro-ibmac_b0.89`.
    pub label: String,
    pub config: SimConfig,
}

pub struct ResolvedScenario {
    pub name: String,
    pub traces: HashMap<String, Arc<VideoTrace>>,
    pub variants: Vec<Variant>,
}

pub fn parse_scenarios(text: &str) -> Result<ScenarioFile, CliError> {
    let file: ScenarioFile =
        toml::from_str(text).map_err(|e| CliError::Config(format!("scenario file: {e}")))?;
    if file.scenarios.is_empty() {
        return Err(CliError::Config("scenario file defines no scenarios".into()));
    }
    let mut names = HashSet::new();
    for s in &file.scenarios {
        if !names.insert(s.name.clone()) {
            return Err(CliError::Config(format!("duplicate scenario name {:?}", s.name)));
        }
    }
    Ok(file)
}

/// Resolves a scenario into runnable variants over a shared trace map and
/// an identical arrival schedule per variant.
pub fn resolve(
    spec: &ScenarioSpec,
    defaults: &Defaults,
    seed_override: Option<u64>,
    record_packets: bool,
) -> Result<ResolvedScenario, CliError> {
    let duration = spec.duration_s.or(defaults.duration_s).unwrap_or(500.0);
    let tick = spec.tick_s.or(defaults.tick_s).unwrap_or(1.0);
    let queue_capacity = spec.queue_capacity.or(defaults.queue_capacity).unwrap_or(5300);
    let prop_delay = spec.prop_delay_ms.or(defaults.prop_delay_ms).unwrap_or(10.0) / 1e3;
    let payload_limit = spec.payload_limit.or(defaults.payload_limit).unwrap_or(1024);
    let seed = seed_override.or(spec.seed).or(defaults.seed).unwrap_or(0);
    let c_l = spec.capacity_mbps * 1e6;

    let trace = match (&spec.trace_file, &spec.synth) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                CliError::Config(format!("scenario {:?}: trace file {path:?}: {e}", spec.name))
            })?;
            Arc::new(load_trace(&text).map_err(|e| {
                CliError::Config(format!("scenario {:?}: trace file {path:?}: {e}", spec.name))
            })?)
        }
        (None, Some(synth)) => {
            let params = SynthParams {
                mean_bitrate: synth.mean_mbps * 1e6,
                burstiness: synth.burstiness,
                duration: synth.duration_s.unwrap_or(duration),
                fps: synth.fps,
                gop: synth.gop,
                seed: synth.seed.unwrap_or(seed),
            };
            Arc::new(
                synth_trace(&params)
                    .map_err(|e| CliError::Config(format!("scenario {:?}: {e}", spec.name)))?,
            )
        }
        _ => {
            return Err(CliError::Config(format!(
                "scenario {:?}: exactly one of trace_file or synth required",
                spec.name
            )))
        }
    };
    let trace_id = "src".to_string();
    let traces = HashMap::from([(trace_id.clone(), trace)]);

    let peak_rate = spec.peak_rate_mbps.map(|m| m * 1e6);
    let arrivals = every_second_arrivals(duration, &trace_id, seed, peak_rate);

    let preset_source = || -> Result<Option<BetaSource<f64>>, CliError> {
        match (&spec.preset, spec.beta) {
            (Some(p), None) => {
                let preset: CoefficientPreset =
                    p.parse().map_err(|e| CliError::Config(format!("scenario {:?}: {e}", spec.name)))?;
                Ok(Some(BetaSource::Model(preset.model())))
            }
            (None, Some(b)) => Ok(Some(BetaSource::Fixed(b))),
            (None, None) => Ok(None),
            (Some(_), Some(_)) => Err(CliError::Config(format!(
                "scenario {:?}: preset and beta are mutually exclusive",
                spec.name
            ))),
        }
    };

    let base = SimConfig {
        c_l,
        prop_delay,
        queue_capacity,
        payload_limit,
        tick,
        duration,
        arrivals,
        policy: Policy::None,
        beta: BetaSource::Fixed(1.0),
        seed,
        record_packets,
    };

    let mut variants = Vec::new();
    for pol in &spec.policies {
        let policy: Policy = pol
            .parse()
            .map_err(|e| CliError::Config(format!("scenario {:?}: {e}", spec.name)))?;
        match (policy, &spec.betas) {
            (Policy::ProIbmac, Some(betas)) if !betas.is_empty() => {
                for &b in betas {
                    variants.push(Variant {
                        label: format!("{}_b{b}", policy.name()),
                        config: SimConfig {
                            policy,
                            beta: BetaSource::Fixed(b),
                            ..base.clone()
                        },
                    });
                }
            }
            (Policy::ProIbmac, _) => {
                let beta = preset_source()?.ok_or_else(|| {
                    CliError::Config(format!(
                        "scenario {:?}: pro-ibmac needs preset, beta or betas",
                        spec.name
                    ))
                })?;
                variants.push(Variant {
                    label: policy.name().to_string(),
                    config: SimConfig { policy, beta, ..base.clone() },
                });
            }
            _ => variants.push(Variant {
                label: policy.name().to_string(),
                config: SimConfig { policy, ..base.clone() },
            }),
        }
    }
    if variants.is_empty() {
        return Err(CliError::Config(format!("scenario {:?}: no policies", spec.name)));
    }
    Ok(ResolvedScenario { name: spec.name.clone(), traces, variants })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
[defaults]
duration_s = 60.0
seed = 5

[[scenario]]
name = "a"
capacity_mbps = 22.0
policies = ["cbac", "pro-ibmac"]
preset = "mad-cif"
[scenario.synth]
mean_mbps = 1.4
burstiness = 4.0

[[scenario]]
name = "sweep"
capacity_mbps = 22.0
policies = ["pro-ibmac"]
betas = [0.96, 0.89]
[scenario.synth]
mean_mbps = 1.4
"#;

    #[test]
    fn parses_and_resolves() {
        let file = parse_scenarios(SAMPLE).unwrap();
        assert_eq!(file.scenarios.len(), 2);
        let a = resolve(&file.scenarios[0], &file.defaults, None, false).unwrap();
        assert_eq!(a.variants.len(), 2);
        assert_eq!(a.variants[0].config.duration, 60.0);
        let sweep = resolve(&file.scenarios[1], &file.defaults, None, false).unwrap();
        assert_eq!(sweep.variants.len(), 2);
        assert_eq!(sweep.variants[0].label, "pro-ibmac_b0.96");
        // identical arrivals across variants
        assert_eq!(
            a.variants[0].config.arrivals.len(),
            a.variants[1].config.arrivals.len()
        );
    }

    #[test]
    fn duplicate_names_rejected() {
        let bad = SAMPLE.replace("name = \"sweep\"", "name = \"a\"");
        assert!(parse_scenarios(&bad).is_err());
    }

    #[test]
    fn missing_source_rejected() {
        let file = parse_scenarios(
            "[[scenario]]\nname='x'\ncapacity_mbps=10.0\npolicies=['cbac']\n",
        )
        .unwrap();
        assert!(resolve(&file.scenarios[0], &Defaults::default(), None, false).is_err());
    }
}
