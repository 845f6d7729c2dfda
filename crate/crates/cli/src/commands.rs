//! `run`, `verify` and `sweep`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use maxbid_core::repeated::export::{format_payoff, write_trace_csv, TraceSummary};
use maxbid_core::repeated::longrun_payoff;
use maxbid_core::stage::Payoff;
use maxbid_core::strategies::StrategySpec;
use maxbid_core::verify::{
    convergence_round, f_robust_test, le_test, robust_le_test, CheckOptions, Convergence, GameState, PrefixFamily,
    PrefixProfiles, ProfileSpec, Scenario, Verdict,
};
use rayon::prelude::*;

use crate::config::{CheckKind, Config};
use crate::CliError;

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub horizon: Option<u32>,
    /// Replaces the floor of every MaxBid strategy.
    pub floor: Option<u32>,
    pub out: Option<PathBuf>,
    pub tolerance: Option<Payoff>,
    pub jobs: Option<usize>,
}

impl Overrides {
    pub fn apply(&self, config: &mut Config) {
        if let Some(h) = self.horizon {
            config.horizon = h;
        }
        if let Some(f) = self.floor {
            config.floor = f;
            config.profile = match &config.profile {
                ProfileSpec::Uniform(s) => ProfileSpec::Uniform(with_floor(s, f)),
                ProfileSpec::PerPlayer(v) => ProfileSpec::PerPlayer(v.iter().map(|s| with_floor(s, f)).collect()),
            };
            if let Some(PrefixProfiles::Explicit(list)) = &mut config.prefixes {
                for g in list.iter_mut() {
                    for s in g.iter_mut() {
                        *s = with_floor(s, f);
                    }
                }
            }
        }
        if let Some(o) = &self.out {
            config.out = o.clone();
        }
        if let Some(t) = self.tolerance {
            config.tolerance = t;
        }
        if self.jobs.is_some() {
            config.jobs = self.jobs;
        }
    }
}

fn with_floor(spec: &StrategySpec, floor: u32) -> StrategySpec {
    match spec {
        StrategySpec::MaxBid(c) => {
            let mut c = c.clone();
            c.floor = floor;
            StrategySpec::MaxBid(c)
        }
        StrategySpec::Compose { prefix, suffix, rounds } => {
            StrategySpec::compose(with_floor(prefix, floor), with_floor(suffix, floor), *rounds)
        }
        other => other.clone(),
    }
}

fn write_file(dir: &Path, name: &str, contents: &[u8]) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}

fn single_scenario(config: &Config) -> Result<Scenario, CliError> {
    let states = config.states.expand();
    let [state] = states.as_slice() else {
        return Err(CliError::Usage(format!("`run` needs exactly one state, got {}", states.len())));
    };
    let [schedule] = config.schedules.as_slice() else {
        return Err(CliError::Usage("`run` takes a single `schedule`".into()));
    };
    let strategies = config.profile.for_state(state)?;
    Ok(Scenario::new(state.clone(), strategies, config.horizon)?.with_schedule(schedule.clone()))
}

/// Plays one scenario; writes `trace.csv` and `summary.json` to the output
/// directory and prints the summary.
pub fn cmd_run(config: &Config, stdout: &mut dyn Write) -> Result<bool, CliError> {
    let scenario = single_scenario(config)?;
    let trace = scenario.run()?;
    let game = scenario.state.game();
    let mut csv = Vec::new();
    write_trace_csv(&trace, game.as_ref(), scenario.state.is_auction(), &mut csv)
        .map_err(|e| CliError::io(&config.out, e))?;
    write_file(&config.out, "trace.csv", &csv)?;
    let summary = TraceSummary::of(scenario.state.to_string(), &trace).to_json();
    write_file(&config.out, "summary.json", summary.as_bytes())?;
    writeln!(stdout, "{summary}").map_err(|e| CliError::io(Path::new("<stdout>"), e))?;
    Ok(true)
}

pub fn run_check(config: &Config) -> Result<Verdict, CliError> {
    let check = config.check.ok_or_else(|| CliError::Usage("`verify` needs `check = le|robust|f_robust`".into()))?;
    let states = config.states.expand();
    let family = config.deviation_family();
    let opts = CheckOptions { horizon: config.horizon, tolerance: config.tolerance, budget: config.budget };
    let prefixes = || -> Result<PrefixFamily, CliError> {
        let profiles = config
            .prefixes
            .clone()
            .ok_or_else(|| CliError::Usage(format!("`check = {check:?}` needs `prefixes`").to_lowercase()))?;
        Ok(PrefixFamily { profiles, rounds: config.prefix_rounds.clone() })
    };
    let verdict = match check {
        CheckKind::Le => le_test(&config.profile, &states, &family, &opts)?,
        CheckKind::Robust => robust_le_test(&config.profile, &states, &prefixes()?, &family, &opts)?,
        CheckKind::FRobust => {
            f_robust_test(&config.profile, &states, &config.schedules, &prefixes()?, &family, &opts)?
        }
    };
    Ok(verdict)
}

/// Runs the configured check; prints the verdict document and writes it to
/// `verdict.json`. Succeeds iff the check passes.
pub fn cmd_verify(config: &Config, stdout: &mut dyn Write) -> Result<bool, CliError> {
    let verdict = run_check(config)?;
    let json = verdict.to_json();
    write_file(&config.out, "verdict.json", json.as_bytes())?;
    writeln!(stdout, "{json}").map_err(|e| CliError::io(Path::new("<stdout>"), e))?;
    Ok(verdict.pass)
}

/// Plays the profile at every configured state and tabulates the outcome in
/// `sweep.csv`: steady state, convergence (auctions) and long-run payoffs.
pub fn cmd_sweep(config: &Config, stdout: &mut dyn Write) -> Result<bool, CliError> {
    let [schedule] = config.schedules.as_slice() else {
        return Err(CliError::Usage("`sweep` takes a single `schedule`".into()));
    };
    let states = config.states.expand();
    let rows: Vec<Vec<String>> = states
        .par_iter()
        .map(|state| sweep_row(config, state, schedule))
        .collect::<Result<_, CliError>>()?;
    let players = states.iter().map(GameState::players).max().unwrap_or(0);
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["state".to_string(), "steady_state".into(), "convergence".into()];
    for i in 1..=players {
        header.push(format!("longrun_{i}"));
        header.push(format!("exact_{i}"));
    }
    let io = |e: csv::Error| CliError::io(&config.out, e.into());
    w.write_record(&header).map_err(io)?;
    for row in &rows {
        let mut row = row.clone();
        row.resize(header.len(), String::new());
        w.write_record(&row).map_err(io)?;
    }
    let data = w.into_inner().map_err(|e| CliError::io(&config.out, e.into_error()))?;
    write_file(&config.out, "sweep.csv", &data)?;
    stdout.write_all(&data).map_err(|e| CliError::io(Path::new("<stdout>"), e))?;
    Ok(true)
}

fn sweep_row(
    config: &Config,
    state: &GameState,
    schedule: &maxbid_core::failures::FailureSchedule,
) -> Result<Vec<String>, CliError> {
    let strategies = config.profile.for_state(state)?;
    let trace = Scenario::new(state.clone(), strategies, config.horizon)?.with_schedule(schedule.clone()).run()?;
    let steady = serde_json::to_value(trace.steady_state())
        .ok()
        .and_then(|v| v.get("kind").and_then(|k| k.as_str()).map(str::to_string))
        .unwrap_or_default();
    let convergence = match state {
        GameState::Auction(v) => match convergence_round(&trace, v) {
            Convergence::ConvergedAt { round } => format!("converged at {round}"),
            Convergence::NotConverged { absorbed } => format!("absorbed elsewhere {absorbed:?}"),
            Convergence::Density { fraction } => format!("density {fraction:.4}"),
        },
        GameState::Matrix(_) => String::new(),
    };
    let mut row = vec![state.to_string(), steady, convergence];
    for i in 0..state.players() {
        let (p, exact) = longrun_payoff(&trace, i);
        row.push(format_payoff(&p));
        row.push(exact.to_string());
    }
    Ok(row)
}
