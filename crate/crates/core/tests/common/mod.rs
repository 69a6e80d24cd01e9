#![allow(dead_code)]

pub mod oracle;

use duelkit::action::ActionRequest;
use duelkit::card::{CardIdx, Subkind};
use duelkit::engine::{apply_action, legal_requests};
use duelkit::pool::CardPool;
use duelkit::state::{CardUid, EngineConfig, GameState, Phase, PlayerId, PokemonInPlay};

/// Every pool card once, topped up to 60 with basic energy.
pub fn everything_deck(pool: &CardPool) -> Vec<CardIdx> {
    let mut out: Vec<CardIdx> = (0..pool.len()).map(|i| CardIdx(i as u16)).collect();
    let energy = ["Fire Energy", "Psychic Energy", "Lightning Energy", "Metal Energy", "Darkness Energy"]
        .map(|e| pool.by_name(e).unwrap());
    for e in energy.iter().cycle().take(60 - out.len()) {
        out.push(*e);
    }
    out
}

/// Hand-built position: turn 3, player 0 to act, both setups done, empty
/// boards and hands.
pub struct Pos<'p> {
    pub pool: &'p CardPool,
    pub st: GameState,
}

impl<'p> Pos<'p> {
    pub fn new(pool: &'p CardPool) -> Self {
        let deck = everything_deck(pool);
        let mut st = GameState::blank([("a", &deck), ("b", &deck)], 7, EngineConfig::default());
        st.phase = Phase::TurnMain;
        st.turn_number = 3;
        st.active_player = 0;
        st.first_player = 0;
        for ps in &mut st.players {
            ps.setup_done = true;
        }
        Pos { pool, st }
    }

    /// Pulls a copy of `name` out of `p`'s deck.
    pub fn take(&mut self, p: PlayerId, name: &str) -> CardUid {
        let idx = self.pool.by_name(name).unwrap_or_else(|| panic!("no card {name}"));
        let deck = &mut self.st.players[p].deck;
        let at = deck
            .iter()
            .position(|&u| self.st.cards[u.0 as usize] == idx)
            .unwrap_or_else(|| panic!("no {name} left in deck {p}"));
        deck.remove(at)
    }

    fn place(&mut self, p: PlayerId, name: &str) -> PokemonInPlay {
        let uid = self.take(p, name);
        let fi = self.st.players[p].take_field_index();
        PokemonInPlay::new(uid, 1, fi)
    }

    pub fn active(&mut self, p: PlayerId, name: &str) -> u32 {
        let m = self.place(p, name);
        let fi = m.field_index;
        self.st.players[p].active = Some(m);
        fi
    }

    pub fn bench(&mut self, p: PlayerId, name: &str) -> u32 {
        let m = self.place(p, name);
        let fi = m.field_index;
        self.st.players[p].bench.push(m);
        fi
    }

    pub fn hand(&mut self, p: PlayerId, name: &str) {
        let uid = self.take(p, name);
        self.st.players[p].hand.push(uid);
    }

    pub fn attach(&mut self, p: PlayerId, fi: u32, name: &str) {
        let uid = self.take(p, name);
        self.st.players[p].pokemon_mut(fi).unwrap().attached_energy.push(uid);
    }

    /// Prizes are drawn from the deck's Items, which no test plays.
    pub fn prizes(&mut self, p: PlayerId, n: usize) {
        for _ in 0..n {
            let deck = &self.st.players[p].deck;
            let at = deck
                .iter()
                .position(|&u| self.st.def(self.pool, u).subkind == Subkind::Item)
                .expect("an Item left");
            let uid = self.st.players[p].deck.remove(at);
            self.st.players[p].prizes.push(uid);
        }
    }

    pub fn mon(&mut self, p: PlayerId, fi: u32) -> &mut PokemonInPlay {
        self.st.players[p].pokemon_mut(fi).unwrap()
    }

    pub fn legal(&self) -> Vec<ActionRequest> {
        legal_requests(self.pool, &self.st)
    }

    pub fn has_tool(&self, tool: &str) -> bool {
        self.legal().iter().any(|r| r.tool == tool)
    }

    pub fn apply(&mut self, req: &ActionRequest) {
        if let Err(e) = apply_action(self.pool, &mut self.st, req) {
            panic!("{req:?} rejected: {e}");
        }
    }

    /// Answers pending prompts with the first listed choice.
    pub fn settle_prompts(&mut self) {
        while self.st.pending.is_some() && !self.st.is_finished() {
            let first = self.legal().remove(0);
            self.apply(&first);
        }
    }
}

pub fn req(tool: &str, args: &[(&str, serde_json::Value)]) -> ActionRequest {
    args.iter()
        .fold(ActionRequest::new(tool), |r, (k, v)| r.arg(k, v.clone()))
}

/// Independent count: every card uid sits in exactly one zone of its owner.
pub fn conservation_errors(st: &GameState) -> Option<String> {
    let mut seen = vec![0u8; st.cards.len()];
    let mut owner_ok = true;
    for (p, ps) in st.players.iter().enumerate() {
        let mut zone: Vec<CardUid> = Vec::new();
        zone.extend(&ps.deck);
        zone.extend(&ps.hand);
        zone.extend(&ps.discard);
        zone.extend(&ps.prizes);
        for m in ps.active.iter().chain(&ps.bench) {
            zone.extend(&m.stack);
            zone.extend(&m.attached_energy);
            zone.extend(m.attached_tool);
        }
        if let Some((s, _)) = st.stadium {
            if (s.0 as usize) / 60 == p {
                zone.push(s);
            }
        }
        for u in zone {
            owner_ok &= (u.0 as usize) / 60 == p;
            seen[u.0 as usize] += 1;
        }
    }
    let bad: Vec<usize> = (0..seen.len()).filter(|&i| seen[i] != 1).collect();
    (!bad.is_empty() || !owner_ok).then(|| format!("uids not held exactly once: {bad:?}, owners ok: {owner_ok}"))
}

fn collect_strings(v: &serde_json::Value, out: &mut Vec<String>) {
    match v {
        serde_json::Value::String(s) => out.push(s.clone()),
        serde_json::Value::Array(a) => a.iter().for_each(|x| collect_strings(x, out)),
        serde_json::Value::Object(o) => o.values().for_each(|x| collect_strings(x, out)),
        _ => {}
    }
}

/// Card ids `viewer` is entitled to see.
fn visible_ids(pool: &CardPool, st: &GameState, viewer: PlayerId) -> std::collections::HashSet<String> {
    let id = |u: &CardUid| st.def(pool, *u).card_id.clone();
    let mut out = std::collections::HashSet::new();
    out.extend(st.players[viewer].hand.iter().map(id));
    for (p, ps) in st.players.iter().enumerate() {
        out.extend(ps.discard.iter().map(id));
        if st.phase == Phase::Setup && p != viewer {
            continue;
        }
        for m in ps.active.iter().chain(&ps.bench) {
            out.extend(m.stack.iter().map(id));
        }
    }
    if let Some((s, _)) = st.stadium {
        out.insert(id(&s));
    }
    if let Some(prompt) = st.pending_prompt().filter(|p| p.chooser == viewer) {
        out.extend(prompt.candidates.iter().filter_map(|c| c.card).map(|i| pool.get(i).card_id.clone()));
    }
    out
}

/// Card ids in `viewer`'s serialized observation that it may not see.
pub fn leaked_ids(pool: &CardPool, st: &GameState, viewer: PlayerId, json: &serde_json::Value) -> Vec<String> {
    let all: std::collections::HashSet<&str> = pool.cards().iter().map(|c| c.card_id.as_str()).collect();
    let ok = visible_ids(pool, st, viewer);
    let mut strings = Vec::new();
    collect_strings(json, &mut strings);
    strings
        .into_iter()
        .filter(|s| all.contains(s.as_str()) && !ok.contains(s))
        .collect()
}

/// The same state with the opponent's hand, deck and prizes dealt again
/// from their combined contents.
pub fn reshuffle_hidden(st: &GameState, viewer: PlayerId, rng: &mut impl rand::Rng) -> GameState {
    use rand::seq::SliceRandom;
    let mut out = st.clone();
    let ps = &mut out.players[1 - viewer];
    let (h, d) = (ps.hand.len(), ps.deck.len());
    let mut pile: Vec<CardUid> = ps.hand.drain(..).chain(ps.deck.drain(..)).chain(ps.prizes.drain(..)).collect();
    pile.shuffle(rng);
    ps.prizes = pile.split_off(h + d);
    ps.deck = pile.split_off(h);
    ps.hand = pile;
    out
}

#[derive(Debug, Default)]
pub struct FuzzStats {
    pub games: usize,
    pub actions: usize,
    pub observations_checked: usize,
    pub finished: usize,
    /// One line per failed check.
    pub failures: Vec<String>,
}

impl FuzzStats {
    pub fn count(&self, kind: &str) -> usize {
        self.failures.iter().filter(|f| f.starts_with(kind)).count()
    }
}

/// Plays one uniform-random game, checking soundness, conservation and
/// structure after every action and hidden-information leaks every
/// `leak_every` actions (0 disables).
pub fn fuzz_game(
    lib: &duelkit::pool::DeckLibrary,
    decks: [&duelkit::pool::Deck; 2],
    seed: u64,
    leak_every: usize,
    stats: &mut FuzzStats,
) {
    use duelkit::observation::build_observation;
    use rand::{Rng, SeedableRng};
    let pool = &lib.pool;
    stats.games += 1;
    let mut st = duelkit::engine::setup_game(pool, decks, seed, EngineConfig::default()).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut steps = 0usize;
    while !st.is_finished() {
        if leak_every > 0 && steps.is_multiple_of(leak_every) {
            for viewer in 0..2 {
                let obs = build_observation(pool, &st, viewer, true);
                let json = serde_json::to_value(&obs).unwrap();
                let leaked = leaked_ids(pool, &st, viewer, &json);
                if !leaked.is_empty() {
                    stats.failures.push(format!("leak: game {seed} step {steps} viewer {viewer}: {leaked:?}"));
                }
                let other = reshuffle_hidden(&st, viewer, &mut rng);
                if build_observation(pool, &other, viewer, true) != obs {
                    stats.failures.push(format!("leak: game {seed} step {steps} viewer {viewer} sees hidden order"));
                }
                stats.observations_checked += 1;
            }
        }
        let legal = legal_requests(pool, &st);
        if legal.is_empty() {
            stats.failures.push(format!("stuck: game {seed} step {steps}"));
            return;
        }
        let pick = &legal[rng.random_range(0..legal.len())];
        if let Err(e) = apply_action(pool, &mut st, pick) {
            stats.failures.push(format!("unsound: game {seed} step {steps}: {pick:?}: {e}"));
            return;
        }
        stats.actions += 1;
        steps += 1;
        if let Some(e) = conservation_errors(&st) {
            stats.failures.push(format!("conservation: game {seed} step {steps}: {e}"));
        }
        let v = duelkit::state::structural_violations(pool, &st);
        if !v.is_empty() {
            stats.failures.push(format!("structure: game {seed} step {steps}: {v:?}"));
        }
        if steps > 200_000 {
            stats.failures.push(format!("unfinished: game {seed}"));
            return;
        }
    }
    stats.finished += 1;
}

/// States taken every `stride` actions from uniform random games.
pub fn sample_states(lib: &duelkit::pool::DeckLibrary, want: usize, stride: usize, seed: u64) -> Vec<GameState> {
    let decks = &lib.decks;
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
    let mut out = Vec::new();
    let mut g = 0u64;
    while out.len() < want {
        let (a, b) = (&decks[g as usize % decks.len()], &decks[(g as usize / decks.len()) % decks.len()]);
        let mut st = duelkit::engine::setup_game(&lib.pool, [a, b], seed.wrapping_add(g), EngineConfig::default()).unwrap();
        let mut step = 0;
        while !st.is_finished() && out.len() < want {
            if step % stride == 0 {
                let mut s = st.clone();
                s.action_log.clear();
                out.push(s);
            }
            let legal = duelkit::engine::legal_requests(&lib.pool, &st);
            let pick = legal[rand::Rng::random_range(&mut rng, 0..legal.len())].clone();
            duelkit::engine::apply_action(&lib.pool, &mut st, &pick).unwrap();
            step += 1;
        }
        g += 1;
    }
    out
}

/// Step-by-step Glicko-2 update on the 1500/173.7178 scale, solving for the
/// new volatility by bisection.
pub fn glicko_oracle(r: f64, rd: f64, sigma: f64, games: &[(f64, f64, f64)], tau: f64) -> (f64, f64, f64) {
    use std::f64::consts::PI;
    let q = 173.7178;
    let mu = (r - 1500.0) / q;
    let phi = rd / q;
    let g = |p: f64| 1.0 / (1.0 + 3.0 * p * p / (PI * PI)).sqrt();
    let mut v_inv = 0.0;
    let mut sum = 0.0;
    for &(rj, rdj, s) in games {
        let (mj, pj) = ((rj - 1500.0) / q, rdj / q);
        let ej = 1.0 / (1.0 + (-g(pj) * (mu - mj)).exp());
        v_inv += g(pj).powi(2) * ej * (1.0 - ej);
        sum += g(pj) * (s - ej);
    }
    let v = 1.0 / v_inv;
    let delta = v * sum;
    let a = (sigma * sigma).ln();
    let f = |x: f64| {
        let ex = x.exp();
        ex * (delta * delta - phi * phi - v - ex) / (2.0 * (phi * phi + v + ex).powi(2)) - (x - a) / (tau * tau)
    };
    // f is decreasing; bracket the root then halve.
    let (mut lo, mut hi) = (a - 1.0, a + 1.0);
    while f(lo) < 0.0 {
        lo -= 1.0;
    }
    while f(hi) > 0.0 {
        hi += 1.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let sigma2 = (0.5 * (lo + hi) / 2.0).exp();
    let phi_star = (phi * phi + sigma2 * sigma2).sqrt();
    let phi2 = 1.0 / (1.0 / (phi_star * phi_star) + 1.0 / v).sqrt();
    let mu2 = mu + phi2 * phi2 * sum;
    (mu2 * q + 1500.0, phi2 * q, sigma2)
}

/// Expected score on the rating scale, with the opponent's deviation.
pub fn expected_oracle(diff: f64, opp_rd: f64) -> f64 {
    use std::f64::consts::PI;
    let phi = opp_rd / 173.7178;
    let g = 1.0 / (1.0 + 3.0 * phi * phi / (PI * PI)).sqrt();
    1.0 / (1.0 + (-g * diff / 173.7178).exp())
}

/// Round-robin manifest for two agents on one deck.
pub fn pair_manifest(a: duelkit::agents::AgentSpec, b: duelkit::agents::AgentSpec, games: u32, seed: u64, deck: &str) -> duelkit::tournament::Manifest {
    duelkit::tournament::Manifest {
        mode: duelkit::tournament::Mode::RoundRobin,
        master_seed: seed,
        deck: Some(deck.into()),
        deck_pairs: vec![],
        workers: 0,
        log_observations: false,
        harness: Default::default(),
        engine: Default::default(),
        games_per_pair: Some(games),
        participants: vec![a, b],
        rounds: None,
        games_per_anchor: None,
        evolving: None,
        anchors: vec![],
    }
}

/// Final hashes and the ratings file of a Random mirror series.
pub fn random_mirror_run(lib: &duelkit::pool::DeckLibrary, games: u32, seed: u64) -> (Vec<String>, Vec<u8>) {
    use duelkit::agents::AgentSpec;
    let m = pair_manifest(AgentSpec::random("random-a"), AgentSpec::random("random-b"), games, seed, "miraidon-like");
    let tmp = tempfile::tempdir().unwrap();
    let rep = duelkit::tournament::run_round_robin(lib, &m, tmp.path()).unwrap();
    let hashes = rep.records.iter().map(|r| r.final_hash.clone()).collect();
    (hashes, std::fs::read(tmp.path().join("ratings.json")).unwrap())
}

/// Plays one Faulty agent (one bad attempt in `every`) against Random over
/// consecutive games until it has made at least `min_attempts` attempts,
/// returning its totals.
pub fn faulty_accounting(lib: &duelkit::pool::DeckLibrary, every: u32, query_every: u32, min_attempts: u64) -> duelkit::harness::DecisionAccounting {
    use duelkit::agents::{FaultyAgent, RandomAgent};
    use duelkit::runner::{agent_seed, play_unlogged, GameSetup};
    let deck = lib.deck("charizard-like").unwrap();
    let mut total = duelkit::harness::DecisionAccounting::default();
    let mut a = FaultyAgent::new(every, query_every, 900);
    let mut g = 0u64;
    while total.action_attempts < min_attempts {
        let setup = GameSetup {
            pool: &lib.pool,
            decks: [deck, deck],
            agent_ids: ["faulty".into(), "random".into()],
            seed: 900 + g,
            engine: EngineConfig::default(),
            harness: Default::default(),
            match_id: format!("faulty-{g}"),
        };
        let mut b = RandomAgent::new(agent_seed(setup.seed, 1));
        let out = play_unlogged(&setup, [&mut a, &mut b]).unwrap();
        total.merge(&out.accounting[0]);
        g += 1;
    }
    total
}
