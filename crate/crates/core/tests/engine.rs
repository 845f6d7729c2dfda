use maxbid_core::repeated::{
    average_payoff, longrun_payoff, prefix_compose, run, AuctionMonitor, Monitor, PlayTrace, Signal, SteadyState,
};
use maxbid_core::repeated::Strategy as Player;
use maxbid_core::stage::{stage_payoffs, Action, Auction, Payoff, ValuationState};
use maxbid_core::strategies::{MaxBidConfig, StrategySpec, WindowFunction};
use maxbid_core::verify::{GameState, Scenario};
use maxbid_core::Error;
use proptest::prelude::*;

fn state(values: &[u32], m: u32) -> ValuationState {
    ValuationState::new(values.to_vec(), m).unwrap()
}

fn maxbid(window: WindowFunction) -> StrategySpec {
    StrategySpec::MaxBid(MaxBidConfig::with_window(window))
}

fn play(v: &ValuationState, strategies: Vec<StrategySpec>, horizon: u32) -> PlayTrace {
    Scenario::new(GameState::Auction(v.clone()), strategies, horizon).unwrap().run().unwrap()
}

#[test]
fn full_history_pair_at_7_5_absorbs_within_ten_rounds() {
    let t = play(&state(&[7, 5], 7), vec![maxbid(WindowFunction::FullHistory); 2], 10);
    assert_eq!(t.actions_of(0), vec![1, 2, 3, 4, 5, 5, 5, 5, 5, 5]);
    assert_eq!(t.actions_of(1), vec![1, 2, 3, 4, 4, 4, 4, 4, 4, 4]);
    assert_eq!(t.steady_state(), &SteadyState::Absorbed { profile: vec![5, 4], since: 5 });
    assert_eq!(longrun_payoff(&t, 0), (Payoff::from_integer(2), true));
    assert_eq!(longrun_payoff(&t, 1), (Payoff::from_integer(0), true));
}

#[test]
fn horizon_one_is_undetermined_until_play_settles() {
    let v = state(&[7, 5], 7);
    let t = play(&v, vec![maxbid(WindowFunction::FullHistory); 2], 1);
    assert_eq!(t.horizon(), 1);
    assert_eq!(t.steady_state(), &SteadyState::Undetermined);
    assert_eq!(longrun_payoff(&t, 0), (Payoff::from_integer(3), false));
    let t = play(&v, vec![maxbid(WindowFunction::FullHistory); 2], 3);
    assert_eq!(t.steady_state(), &SteadyState::Undetermined);
}

#[test]
fn bidding_one_forever_is_absorbed_from_the_start() {
    for (values, m) in [(vec![7, 5], 7), (vec![2, 2, 2], 2)] {
        let v = state(&values, m);
        let t = play(&v, vec![StrategySpec::Constant(1); values.len()], 1);
        assert_eq!(t.steady_state(), &SteadyState::Absorbed { profile: vec![1; values.len()], since: 1 });
    }
}

#[test]
fn window_one_against_a_periodic_deviator_cycles() {
    let v = state(&[7, 5], 7);
    let t = play(&v, vec![maxbid(WindowFunction::Constant(1)), StrategySpec::periodic(vec![], vec![1, 1, 3])], 30);
    assert_eq!(t.actions_of(0)[..9], [1, 2, 2, 4, 3, 2, 4, 3, 2]);
    let SteadyState::Periodic { cycle, entry } = t.steady_state() else { panic!("{:?}", t.steady_state()) };
    assert!(*entry <= 4);
    let mut rotated = cycle.clone();
    let k = rotated.iter().position(|p| p == &vec![4, 1]).unwrap();
    rotated.rotate_left(k);
    assert_eq!(rotated, vec![vec![4, 1], vec![3, 1], vec![2, 3]]);
    assert_eq!(longrun_payoff(&t, 1), (Payoff::new(2, 3), true));
    for cycles in 1..=8 {
        let through = entry - 1 + 3 * cycles;
        let tail: Payoff = (*entry..=through).map(|r| t.payoff(r, 1)).sum();
        assert_eq!(tail / Payoff::from_integer(3 * cycles as i64), Payoff::new(2, 3));
    }
    assert_eq!(average_payoff(&t, 1, 30).unwrap(), (1..=30).map(|r| t.payoff(r, 1)).sum::<Payoff>() / 30);
}

#[test]
fn losers_earn_nothing() {
    let t = play(&state(&[7, 5], 7), vec![StrategySpec::Constant(4), StrategySpec::Constant(1)], 20);
    assert_eq!(average_payoff(&t, 1, 20).unwrap(), Payoff::from_integer(0));
}

#[test]
fn out_of_range_bid_names_round_and_player() {
    let v = state(&[3, 2], 3);
    let err = Scenario::new(GameState::Auction(v), vec![StrategySpec::Constant(1), StrategySpec::periodic(vec![1, 2], vec![4])], 10)
        .unwrap()
        .run()
        .unwrap_err();
    assert_eq!(err, Error::ActionOutOfRange { round: 3, player: 2, action: 4 });
    assert!(err.to_string().contains("round 3: player 2"));
}

#[test]
fn prefix_composition_reproduces_the_switching_example() {
    let full = maxbid(WindowFunction::FullHistory);
    let t = play(
        &state(&[7, 3], 7),
        vec![
            StrategySpec::compose(StrategySpec::Constant(2), full.clone(), 1),
            StrategySpec::compose(StrategySpec::Constant(5), full, 1),
        ],
        6,
    );
    assert_eq!(t.actions_of(0), vec![2, 6, 6, 6, 6, 6]);
    assert_eq!(t.actions_of(1), vec![5, 2, 2, 2, 2, 2]);
}

#[test]
fn floor_one_breaks_the_half_window_truce_at_3_1() {
    let v = state(&[3, 1], 3);
    let with = |floor| {
        let s = StrategySpec::MaxBid(MaxBidConfig::new(WindowFunction::HalfSliding, floor).unwrap());
        play(&v, vec![s; 2], 40)
    };
    let (one, two) = (with(1), with(2));
    assert_eq!(two.steady_state(), &SteadyState::Absorbed { profile: vec![2, 1], since: 2 });
    assert_eq!(one.actions_of(0)[..4], [1, 2, 2, 1]);
    assert_ne!(one.steady_state(), two.steady_state());
}

/// Feeds each player a scripted signal sequence and garbage to everyone else.
struct Replay {
    inner: AuctionMonitor,
    player: usize,
    script: Vec<Signal>,
}

impl Monitor for Replay {
    fn players(&self) -> usize {
        self.inner.players()
    }

    fn actions(&self) -> &[Action] {
        self.inner.actions()
    }

    fn initial_signal(&self, player: usize) -> Signal {
        self.inner.initial_signal(player)
    }

    fn signal(&self, round: u32, player: usize, history: &[Action]) -> Signal {
        if player == self.player {
            // Past the script only classification probes ask; answer truthfully.
            match self.script.get(round as usize - 1) {
                Some(&s) => s,
                None => self.inner.signal(round, player, history),
            }
        } else {
            let m = self.inner.actions().len() as u32;
            Signal::auction(1 + round % m, 1 + round % 2)
        }
    }

    fn memoryless_from(&self) -> Option<u32> {
        None
    }
}

fn build(specs: &[StrategySpec]) -> Vec<Box<dyn Player>> {
    specs.iter().map(StrategySpec::build).collect()
}

fn specs_for(kind: u8, m: u32) -> StrategySpec {
    match kind % 4 {
        0 => maxbid(WindowFunction::FullHistory),
        1 => maxbid(WindowFunction::HalfSliding),
        2 => maxbid(WindowFunction::Constant(1)),
        _ => StrategySpec::periodic(vec![1], vec![m, 1, 2.min(m)]),
    }
}

fn arb_state() -> impl Strategy<Value = ValuationState> {
    (2usize..=3, 2u32..=7).prop_flat_map(|(n, m)| {
        proptest::collection::vec(1..=m, n).prop_map(move |values| ValuationState::new(values, m).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn identical_configurations_give_identical_traces(v in arb_state(), kinds in proptest::collection::vec(0u8..4, 3)) {
        let specs: Vec<_> = (0..v.players()).map(|i| specs_for(kinds[i], v.max_value())).collect();
        prop_assert_eq!(play(&v, specs.clone(), 200), play(&v, specs, 200));
    }

    #[test]
    fn a_player_sees_only_their_own_signals(v in arb_state(), kinds in proptest::collection::vec(0u8..4, 3)) {
        let specs: Vec<_> = (0..v.players()).map(|i| specs_for(kinds[i], v.max_value())).collect();
        let original = play(&v, specs.clone(), 120);
        for player in 0..v.players() {
            let stub = Replay { inner: AuctionMonitor::new(v.clone()), player, script: original.signals_of(player) };
            let replayed = run(&Auction::new(v.clone()), &stub, build(&specs), 120).unwrap();
            prop_assert_eq!(replayed.actions_of(player), original.actions_of(player));
        }
    }

    #[test]
    fn running_average_approaches_the_absorbed_payoff(v in arb_state(), horizon in 60u32..400) {
        let t = play(&v, vec![maxbid(WindowFunction::FullHistory); v.players()], horizon);
        let SteadyState::Absorbed { profile, since } = t.steady_state().clone() else {
            return Err(TestCaseError::fail(format!("{v}: {:?}", t.steady_state())));
        };
        let stage = stage_payoffs(&v, &profile).unwrap();
        let bound = Payoff::from_integer(since as i64 * v.max_value() as i64);
        for player in 0..v.players() {
            for through in (since..=horizon).step_by(7) {
                let gap = average_payoff(&t, player, through).unwrap() - stage.get(player);
                let gap = if gap < Payoff::from_integer(0) { -gap } else { gap };
                prop_assert!(gap <= bound / Payoff::from_integer(through as i64));
            }
        }
    }

    #[test]
    fn composition_follows_prefix_then_suffix(
        rounds in 0u32..6,
        value in 1u32..8,
        script in proptest::collection::vec((1u32..8, 1u32..3), 1..20),
        g_kind in 0u8..4,
        f_kind in 0u8..4,
    ) {
        let g = specs_for(g_kind, 7);
        let f = specs_for(f_kind, 7);
        let mut composed = prefix_compose(g.build(), f.build(), rounds);
        let (mut alone_g, mut alone_f) = (g.build(), f.build());
        let initial = Signal::Valuation(value);
        let mut action = composed.start(initial);
        let (mut ag, mut af) = (alone_g.start(initial), alone_f.start(initial));
        for (k, &(max_bid, count)) in script.iter().enumerate() {
            let round = k as u32 + 1;
            prop_assert_eq!(action, if round <= rounds { ag } else { af }, "round {}", round);
            let signal = Signal::auction(max_bid, count);
            let next = composed.next(signal, action);
            ag = alone_g.next(signal, action);
            af = alone_f.next(signal, action);
            action = next;
        }
    }
}
