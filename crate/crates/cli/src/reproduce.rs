//! Pinned reproductions with stored expectations.

use std::io::Write;
use std::path::Path;

use maxbid_core::failures::{FailureSchedule, SignalMap, SignalOverride};
use maxbid_core::repeated::{longrun_payoff, PlayTrace, Signal, SteadyState};
use maxbid_core::stage::{one_stage_equilibrium, verify_game_nash, Auction, MatrixState, Payoff, ValuationState};
use maxbid_core::stage::{ACTION_B, ACTION_N};
use maxbid_core::strategies::{MaxBidConfig, StrategySpec, WindowFunction, DEFAULT_FLOOR};
use maxbid_core::verify::{
    convergence_round, deviation_gain, f_robust_test, le_test, robust_le_test, CheckOptions, Convergence,
    DeviationFamily, GameState, PrefixFamily, PrefixProfiles, ProfileSpec, Scenario, Verdict,
};

use crate::commands::Overrides;
use crate::CliError;

pub const IDS: &[&str] = &["2.1", "3.5", "3.6", "3.7", "eq2-sweep", "thm-3.1", "thm-3.2", "thm-3.3", "thm-3.9"];

struct Ctx<'a> {
    overrides: &'a Overrides,
}

impl Ctx<'_> {
    fn horizon(&self, pinned: u32) -> u32 {
        self.overrides.horizon.unwrap_or(pinned)
    }

    fn maxbid(&self, window: WindowFunction) -> StrategySpec {
        StrategySpec::MaxBid(MaxBidConfig { window, floor: self.overrides.floor.unwrap_or(DEFAULT_FLOOR) })
    }

    fn opts(&self, horizon: u32) -> CheckOptions {
        let mut o = CheckOptions { horizon: self.horizon(horizon), ..CheckOptions::default() };
        if let Some(t) = self.overrides.tolerance {
            o.tolerance = t;
        }
        o
    }
}

fn mismatch(id: &str, what: String) -> CliError {
    CliError::Mismatch(format!("reproduce {id}: {what}"))
}

fn auction(values: &[u32], m: u32) -> GameState {
    GameState::Auction(ValuationState::new(values.to_vec(), m).expect("pinned state is valid"))
}

fn play(state: GameState, strategies: Vec<StrategySpec>, horizon: u32) -> Result<PlayTrace, CliError> {
    Ok(Scenario::new(state, strategies, horizon)?.run()?)
}

/// First round where the recorded profiles leave `expected`.
fn compare_rows(id: &str, trace: &PlayTrace, expected: &[&[u32]]) -> Result<(), CliError> {
    for (k, want) in expected.iter().enumerate() {
        let round = k as u32 + 1;
        if round > trace.horizon() {
            return Err(mismatch(id, format!("round {round}: expected bids {want:?}, trace ends at {}", trace.horizon())));
        }
        let got = trace.profile(round);
        if got != *want {
            return Err(mismatch(id, format!("round {round}: expected bids {want:?}, got {got:?}")));
        }
    }
    Ok(())
}

fn compare_bids(id: &str, trace: &PlayTrace, player: usize, expected: &[u32]) -> Result<(), CliError> {
    for (k, &want) in expected.iter().enumerate() {
        let round = k as u32 + 1;
        let got = (round <= trace.horizon()).then(|| trace.action(round, player));
        if got != Some(want) {
            return Err(mismatch(id, format!("round {round}: expected player {} to bid {want}, got {got:?}", player + 1)));
        }
    }
    Ok(())
}

fn expect_payoff(id: &str, trace: &PlayTrace, player: usize, want: Payoff) -> Result<(), CliError> {
    match longrun_payoff(trace, player) {
        (p, true) if p == want => Ok(()),
        (p, exact) => Err(mismatch(
            id,
            format!("player {} long-run payoff: expected {want} exactly, got {p} (exact={exact})", player + 1),
        )),
    }
}

fn expect_pass(id: &str, v: &Verdict) -> Result<String, CliError> {
    match v.violations().next() {
        None => Ok(format!("{} rows pass ({})", v.rows.len(), v.scope)),
        Some(w) => Err(mismatch(
            id,
            format!("player {} at {} [{}; {}] gains {} via {}", w.player, w.state, w.schedule, w.prefix, w.outcome.gain, w.deviation),
        )),
    }
}

fn sweep_states(players: usize, max_m: u32) -> Vec<ValuationState> {
    (2..=max_m).flat_map(|m| ValuationState::enumerate(players, m)).filter(|v| v.second_highest() >= 2).collect()
}

fn long_family() -> DeviationFamily {
    DeviationFamily::Union(vec![
        DeviationFamily::Witnesses,
        DeviationFamily::ConstantAll,
        DeviationFamily::PeriodicExhaustive { max_prefix: 1, max_period: 3 },
    ])
}

fn constant_prefixes() -> PrefixFamily {
    PrefixFamily { profiles: PrefixProfiles::ConstantAll, rounds: vec![1, 2, 5] }
}

/// The three schedules of the failure-robust sweep.
pub fn pinned_schedules() -> Vec<FailureSchedule> {
    let three_rounds = (1..=3)
        .flat_map(|round| (0..2).map(move |p| SignalOverride::fixed(round, p, Signal::auction(2, 2))))
        .collect();
    vec![
        FailureSchedule::identity(),
        FailureSchedule::new(vec![SignalOverride::map(1, 0, SignalMap::conceal_ties())], 2).expect("valid"),
        FailureSchedule::new(three_rounds, 4).expect("valid"),
    ]
}

fn r(n: i64, d: i64) -> Payoff {
    Payoff::new(n, d)
}

fn alternation_game(id: &str, c: &Ctx) -> Result<String, CliError> {
    let h = c.horizon(100);
    for s in [MatrixState::A, MatrixState::B] {
        let t = play(GameState::Matrix(s), vec![StrategySpec::Ex21; 2], h)?;
        expect_payoff(id, &t, 0, r(3, 1))?;
        expect_payoff(id, &t, 1, r(3, 1))?;
    }
    let prefixed = vec![StrategySpec::compose(StrategySpec::Constant(ACTION_N), StrategySpec::Ex21, 1); 2];
    let scenario = Scenario::new(GameState::Matrix(MatrixState::A), prefixed, h)?;
    let g = deviation_gain(&scenario, 0, &StrategySpec::Constant(ACTION_B))?;
    if !(g.exact && g.baseline == r(0, 1) && g.deviated == r(1, 1)) {
        return Err(mismatch(id, format!("after (n,n) in A: expected 0 -> 1 by b forever, got {} -> {}", g.baseline, g.deviated)));
    }
    Ok("payoff 3 for both players in A and B; after an (n,n) round, b forever gains 1 in A".into())
}

fn full_history_pair(id: &str, c: &Ctx) -> Result<String, CliError> {
    let state = ValuationState::new(vec![7, 5], 7).expect("valid");
    let t = play(GameState::Auction(state.clone()), vec![c.maxbid(WindowFunction::FullHistory); 2], c.horizon(100))?;
    compare_rows(id, &t, &[&[1, 1], &[2, 2], &[3, 3], &[4, 4], &[5, 4], &[5, 4]])?;
    match convergence_round(&t, &state) {
        Convergence::ConvergedAt { round: 5 } => {}
        other => return Err(mismatch(id, format!("expected convergence at round 5, got {other:?}"))),
    }
    expect_payoff(id, &t, 0, r(2, 1))?;
    expect_payoff(id, &t, 1, r(0, 1))?;
    Ok("bids (1,1),(2,2),(3,3),(4,4),(5,4),...; converged at round 5; payoffs (2, 0)".into())
}

fn window_one_vs_cycle(id: &str, c: &Ctx) -> Result<String, CliError> {
    let window_one = c.maxbid(WindowFunction::Constant(1));
    let deviator = StrategySpec::periodic(vec![], vec![1, 1, 3]);
    let t = play(auction(&[7, 5], 7), vec![window_one.clone(), deviator], c.horizon(100))?;
    compare_bids(id, &t, 0, &[1, 2, 2, 4, 3, 2, 4, 3, 2, 4, 3])?;
    expect_payoff(id, &t, 1, r(2, 3))?;
    let base = play(auction(&[7, 5], 7), vec![window_one; 2], c.horizon(100))?;
    let (b, _) = longrun_payoff(&base, 1);
    Ok(format!("player 1 bids 1,2,2,4,3,2,4,3,2,4,3; deviator earns 2/3 (undeviated: {b})"))
}

fn prefixed_pair(id: &str, c: &Ctx) -> Result<String, CliError> {
    let full = c.maxbid(WindowFunction::FullHistory);
    let profile = vec![
        StrategySpec::compose(StrategySpec::Constant(2), full.clone(), 1),
        StrategySpec::compose(StrategySpec::Constant(5), full, 1),
    ];
    let scenario = Scenario::new(auction(&[7, 3], 7), profile, c.horizon(100))?;
    let t = scenario.run()?;
    compare_rows(id, &t, &[&[2, 5], &[6, 2], &[6, 2], &[6, 2]])?;
    expect_payoff(id, &t, 0, r(1, 1))?;
    let g = deviation_gain(&scenario, 0, &StrategySpec::Constant(5))?;
    if !(g.exact && g.deviated == r(2, 1)) {
        return Err(mismatch(id, format!("constant 5: expected payoff 2, got {} (exact={})", g.deviated, g.exact)));
    }
    Ok("bids (2,5),(6,2),(6,2),...; player 1 earns 1, constant 5 earns 2".into())
}

fn one_shot_sweep(id: &str) -> Result<String, CliError> {
    let mut count = 0;
    for n in 2..=3 {
        for v in sweep_states(n, 6) {
            let verdict = verify_game_nash(&Auction::new(v.clone()), &one_stage_equilibrium(&v).0);
            if !verdict.is_pass() {
                return Err(mismatch(id, format!("{v}: {verdict:?}")));
            }
            count += 1;
        }
    }
    Ok(format!("{count} states: the one-shot profile is a Nash equilibrium"))
}

fn full_history_convergence(id: &str, c: &Ctx) -> Result<String, CliError> {
    let mut count = 0;
    for n in 2..=3 {
        for v in sweep_states(n, 6) {
            let t = play(GameState::Auction(v.clone()), vec![c.maxbid(WindowFunction::FullHistory); n], c.horizon(200))?;
            let eq = one_stage_equilibrium(&v).0;
            let ok = matches!(
                (convergence_round(&t, &v), t.steady_state()),
                (Convergence::ConvergedAt { round }, SteadyState::Absorbed { profile, .. })
                    if round <= 3 * v.max_value() && *profile == eq
            );
            if !ok {
                return Err(mismatch(id, format!("{v}: {:?}", convergence_round(&t, &v))));
            }
            count += 1;
        }
    }
    Ok(format!("{count} states converge to the one-shot profile within 3m rounds"))
}

fn half_states() -> Vec<GameState> {
    sweep_states(2, 5).into_iter().map(GameState::Auction).collect()
}

fn half_window_le(id: &str, c: &Ctx) -> Result<String, CliError> {
    let p = ProfileSpec::Uniform(c.maxbid(WindowFunction::HalfSliding));
    expect_pass(id, &le_test(&p, &half_states(), &long_family(), &c.opts(10_000))?)
}

fn half_window_robust(id: &str, c: &Ctx) -> Result<String, CliError> {
    let p = ProfileSpec::Uniform(c.maxbid(WindowFunction::HalfSliding));
    expect_pass(id, &robust_le_test(&p, &half_states(), &constant_prefixes(), &long_family(), &c.opts(10_000))?)
}

fn half_window_f_robust(id: &str, c: &Ctx) -> Result<String, CliError> {
    let p = ProfileSpec::Uniform(c.maxbid(WindowFunction::HalfSliding));
    let v = f_robust_test(&p, &half_states(), &pinned_schedules(), &constant_prefixes(), &long_family(), &c.opts(10_000))?;
    expect_pass(id, &v)
}

/// Runs the reproduction `id`. A mismatch is reported as an error naming the
/// first diverging round or value.
pub fn cmd_reproduce(id: &str, overrides: &Overrides, stdout: &mut dyn Write) -> Result<bool, CliError> {
    let c = Ctx { overrides };
    let report = match id {
        "2.1" => alternation_game(id, &c)?,
        "3.5" => full_history_pair(id, &c)?,
        "3.6" => window_one_vs_cycle(id, &c)?,
        "3.7" => prefixed_pair(id, &c)?,
        "eq2-sweep" => one_shot_sweep(id)?,
        "thm-3.1" => full_history_convergence(id, &c)?,
        "thm-3.2" => half_window_le(id, &c)?,
        "thm-3.3" => half_window_robust(id, &c)?,
        "thm-3.9" => half_window_f_robust(id, &c)?,
        other => return Err(CliError::Usage(format!("unknown example `{other}`; expected one of {}", IDS.join(", ")))),
    };
    writeln!(stdout, "reproduce {id}: PASS: {report}").map_err(|e| CliError::io(Path::new("<stdout>"), e))?;
    Ok(true)
}
