//! Round-robin match harness with latency instrumentation.
//!
//! A match pits two agents (planner + evaluation variant) against each other
//! on one map. Dynamic variants adapt their weight vector once per root
//! decision, then search with the weights frozen. Every decision is metered;
//! the record keeps per-agent latency and evaluation-cost statistics plus a
//! digest of the full action stream, so two runs can be compared byte for
//! byte.
//!
//! Budgets come in two modes. `Wall` enforces the real clock and is what a
//! live deployment uses; it also carries the forfeit rule (a decision that
//! overruns its budget tenfold loses the match on the spot). `Virtual`
//! converts the millisecond budget into a node allowance with seeded jitter,
//! which makes whole tournaments bit-reproducible across machines and thread
//! counts — that mode is the default for experiments.

mod bench;

pub use bench::{generate_state_corpus, measure_eval_overhead, BenchError, KindTiming, TimingStats};

use std::cell::Cell;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::adaptive::{AdaptiveEvalState, OptimizerConfig};
use crate::config::{hex, AgentSpec, BudgetMode, ConfigError, EvalVariant, PlannerKind, RunConfig};
use crate::eval::{evaluate, EvalParams};
use crate::game::{
    builtin_map, load_map, load_stats, GameState, JointAction, MapError, MapSpec, Player,
    UnitTypeTable, Winner,
};
use crate::search::{
    idabcd_decide, idrtminimax_decide, portfolio_decide, Decision, LeafMode, MoveGenLimits,
    PortfolioConfig, SearchBudget, TimeSource,
};

/// A decision exceeding `wall_ms * FORFEIT_FACTOR` loses the match outright.
pub const FORFEIT_FACTOR: f64 = 10.0;

#[derive(Debug, Error)]
pub enum TournamentError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("map `{name}`: {why}")]
    Map { name: String, why: String },
    #[error("stats file `{path}`: {why}")]
    Stats { path: String, why: String },
}

/// How decision budgets are enforced (resolved form of [`BudgetMode`]).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BudgetKind {
    Wall,
    Virtual { nodes_per_ms: u64, jitter: f64 },
}

/// Everything a single match needs besides the map and the two agents.
#[derive(Clone, Debug)]
pub struct MatchSettings {
    pub max_cycles: u32,
    pub budget: SearchBudget,
    pub mode: BudgetKind,
    pub params: EvalParams,
    pub optimizer: OptimizerConfig,
    pub portfolio: PortfolioConfig,
    pub limits: MoveGenLimits,
    pub leaf: LeafMode,
}

impl MatchSettings {
    pub fn from_config(cfg: &RunConfig) -> MatchSettings {
        let t = &cfg.tournament;
        MatchSettings {
            max_cycles: t.max_cycles,
            budget: SearchBudget {
                wall_ms: t.wall_ms,
                ..cfg.planner.budget()
            },
            mode: match t.budget {
                BudgetMode::Wall => BudgetKind::Wall,
                BudgetMode::Virtual => BudgetKind::Virtual {
                    nodes_per_ms: t.nodes_per_ms,
                    jitter: t.jitter,
                },
            },
            params: cfg.eval.params(),
            optimizer: cfg.eval.optimizer.clone(),
            portfolio: cfg.planner.portfolio(),
            limits: cfg.planner.limits,
            leaf: cfg.planner.leaf,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AgentMatchStats {
    pub decisions: u64,
    /// Mean/max milliseconds per decision. Under a virtual budget these are
    /// derived from node counts (nodes / nodes_per_ms), so they reproduce.
    pub mean_ms: f64,
    pub max_ms: f64,
    pub nodes: u64,
    pub eval_calls: u64,
    /// Total nanoseconds spent in the evaluation function. Under a virtual
    /// budget this column holds the call count so records stay reproducible.
    pub eval_ns: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchRecord {
    pub map: String,
    pub agent0: String,
    pub agent1: String,
    pub seed: u64,
    pub winner: Winner,
    pub end_cycle: u32,
    /// `ELIMINATION`, `CYCLE_CAP`, or `FORFEIT`.
    pub reason: String,
    /// Seat that overran its wall budget tenfold, if any.
    pub forfeit: Option<usize>,
    pub stats: [AgentMatchStats; 2],
    /// SHA-256 over the match header and every committed joint action.
    pub digest: String,
}

impl MatchRecord {
    pub fn points_for_seat(&self, seat: usize) -> f64 {
        self.winner.points_for(Player::from_index(seat))
    }
}

struct DecideOutcome {
    decision: Decision,
    eval_calls: u64,
    eval_ns: u64,
}

/// One seat's brain: state in, metered decision out. Boxed so the match loop
/// can also drive test doubles (scripted or deliberately slow seats).
type Decider<'a> = Box<dyn FnMut(&GameState, TimeSource) -> DecideOutcome + 'a>;

fn make_decider<'a>(
    spec: AgentSpec,
    seat: Player,
    settings: &'a MatchSettings,
    state0: &GameState,
) -> Decider<'a> {
    let mut adaptive = if spec.eval.dynamic {
        Some(
            AdaptiveEvalState::with_defaults(
                spec.eval.kind,
                settings.optimizer.clone(),
                settings.params.clone(),
                seat,
                state0,
            )
            .expect("optimizer config was validated"),
        )
    } else {
        None
    };
    let static_weights = settings.params.initial_weights(spec.eval.kind);
    Box::new(move |state: &GameState, source: TimeSource| {
        // Dynamic variants take exactly one optimizer step per root decision,
        // against the observed root state; the search then runs on a frozen
        // snapshot of the weights.
        if let Some(a) = adaptive.as_mut() {
            a.adapt_and_evaluate(state);
        }
        let weights = adaptive
            .as_ref()
            .map(|a| a.weights().clone())
            .unwrap_or_else(|| static_weights.clone());
        let kind = spec.eval.kind;
        let params = &settings.params;
        let timed = matches!(settings.mode, BudgetKind::Wall);
        let calls = Cell::new(0u64);
        let nanos = Cell::new(0u64);
        let eval = |s: &GameState| -> f64 {
            calls.set(calls.get() + 1);
            if timed {
                let t = Instant::now();
                let v = evaluate(s, kind, params, &weights, seat).s_eval;
                nanos.set(nanos.get() + t.elapsed().as_nanos() as u64);
                v
            } else {
                evaluate(s, kind, params, &weights, seat).s_eval
            }
        };
        let decision = match spec.planner {
            PlannerKind::IdAbcd => idabcd_decide(
                state,
                seat,
                &settings.budget,
                source,
                &settings.limits,
                settings.leaf,
                &eval,
            ),
            PlannerKind::IdRtMinimax => idrtminimax_decide(
                state,
                seat,
                &settings.budget,
                source,
                &settings.limits,
                settings.leaf,
                &eval,
            ),
            PlannerKind::Portfolio => portfolio_decide(
                state,
                seat,
                &settings.portfolio,
                &settings.budget,
                source,
                &eval,
            ),
        };
        DecideOutcome {
            decision,
            eval_calls: calls.get(),
            eval_ns: nanos.get(),
        }
    })
}

/// Runs one match to completion. Public entry points build real planner
/// deciders; tests may inject their own.
fn run_match_core(
    map_name: &str,
    state0: GameState,
    names: [String; 2],
    seed: u64,
    settings: &MatchSettings,
    mut deciders: [Decider<'_>; 2],
) -> MatchRecord {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hasher = Sha256::new();
    hasher.update(map_name.as_bytes());
    hasher.update([0u8]);
    hasher.update(names[0].as_bytes());
    hasher.update([0u8]);
    hasher.update(names[1].as_bytes());
    hasher.update([0u8]);
    hasher.update(seed.to_le_bytes());

    let mut stats = [AgentMatchStats::default(); 2];
    let mut total_ms = [0.0f64; 2];
    let mut state = state0;
    let outcome: (Winner, u32, String, Option<usize>);
    loop {
        if let Some(r) = state.winner() {
            outcome = (r.winner, r.end_cycle, r.reason.to_string(), None);
            break;
        }
        let mut joint: [JointAction; 2] = [Vec::new(), Vec::new()];
        let mut forfeited: Option<usize> = None;
        for seat in Player::BOTH {
            let i = seat.index();
            // A seat with no idle units has nothing to decide; skipping it
            // here (rather than asking for an empty decision) keeps the
            // jitter stream aligned with actual decisions.
            if !state.has_idle_units(seat) {
                continue;
            }
            let source = match settings.mode {
                BudgetKind::Wall => TimeSource::Wall,
                BudgetKind::Virtual { nodes_per_ms, jitter } => {
                    let factor = 1.0 - jitter + rng.gen::<f64>() * (2.0 * jitter);
                    let nodes = (settings.budget.wall_ms * nodes_per_ms) as f64 * factor;
                    TimeSource::Nodes(nodes.max(1.0) as u64)
                }
            };
            let t0 = Instant::now();
            let out = (deciders[i])(&state, source);
            let wall_elapsed = t0.elapsed().as_secs_f64() * 1e3;
            let ms = match settings.mode {
                BudgetKind::Wall => wall_elapsed,
                BudgetKind::Virtual { nodes_per_ms, .. } => {
                    out.decision.nodes_visited as f64 / nodes_per_ms as f64
                }
            };
            stats[i].decisions += 1;
            total_ms[i] += ms;
            if ms > stats[i].max_ms {
                stats[i].max_ms = ms;
            }
            stats[i].nodes += out.decision.nodes_visited;
            stats[i].eval_calls += out.eval_calls;
            stats[i].eval_ns += match settings.mode {
                BudgetKind::Wall => out.eval_ns,
                BudgetKind::Virtual { .. } => out.eval_calls,
            };
            joint[i] = out.decision.actions;
            if matches!(settings.mode, BudgetKind::Wall)
                && wall_elapsed > settings.budget.wall_ms as f64 * FORFEIT_FACTOR
            {
                forfeited = Some(i);
                break;
            }
        }
        if let Some(i) = forfeited {
            let opponent = Player::from_index(i).opponent();
            outcome = (
                Winner::from_player(opponent),
                state.cycle(),
                "FORFEIT".to_string(),
                Some(i),
            );
            break;
        }
        for (i, actions) in joint.iter().enumerate() {
            hasher.update(state.cycle().to_le_bytes());
            hasher.update([i as u8]);
            hasher.update(format!("{actions:?}").as_bytes());
        }
        state = state
            .advance(&joint)
            .expect("planners only emit legal joint actions");
    }
    for i in 0..2 {
        stats[i].mean_ms = total_ms[i] / stats[i].decisions.max(1) as f64;
    }
    let (winner, end_cycle, reason, forfeit) = outcome;
    MatchRecord {
        map: map_name.to_string(),
        agent0: names[0].clone(),
        agent1: names[1].clone(),
        seed,
        winner,
        end_cycle,
        reason,
        forfeit,
        stats,
        digest: hex(&hasher.finalize()),
    }
}

pub fn run_match(
    map_name: &str,
    map: &MapSpec,
    table: Arc<UnitTypeTable>,
    agents: [AgentSpec; 2],
    seed: u64,
    settings: &MatchSettings,
) -> MatchRecord {
    let state0 = GameState::new(map, table, settings.max_cycles);
    let deciders = [
        make_decider(agents[0], Player::P0, settings, &state0),
        make_decider(agents[1], Player::P1, settings, &state0),
    ];
    run_match_core(
        map_name,
        state0,
        [agents[0].name(), agents[1].name()],
        seed,
        settings,
        deciders,
    )
}

/// Per-match seed: a hash of the master seed and the match coordinates, so
/// every game is independent yet the whole schedule replays from one number.
/// The pair indices are seat-agnostic — swapping seats halfway through a
/// pairing does not change the seeds being played.
pub fn match_seed(master: u64, map: &str, a: usize, b: usize, game: u32) -> u64 {
    let mut h = Sha256::new();
    h.update(master.to_le_bytes());
    h.update(map.as_bytes());
    h.update([0u8]);
    h.update((a.min(b) as u64).to_le_bytes());
    h.update((a.max(b) as u64).to_le_bytes());
    h.update(game.to_le_bytes());
    let d = h.finalize();
    u64::from_le_bytes(d[..8].try_into().expect("digest is 32 bytes"))
}

pub fn resolve_map(name: &str) -> Result<MapSpec, TournamentError> {
    match builtin_map(name) {
        Ok(m) => Ok(m),
        Err(MapError::UnknownBuiltin(_)) => {
            let text = std::fs::read_to_string(name).map_err(|e| TournamentError::Map {
                name: name.to_string(),
                why: format!("not a built-in map and not a readable file: {e}"),
            })?;
            load_map(&text).map_err(|e| TournamentError::Map {
                name: name.to_string(),
                why: e.to_string(),
            })
        }
        Err(e) => Err(TournamentError::Map {
            name: name.to_string(),
            why: e.to_string(),
        }),
    }
}

pub fn resolve_stats(file: Option<&std::path::Path>) -> Result<Arc<UnitTypeTable>, TournamentError> {
    match file {
        None => Ok(UnitTypeTable::default_table()),
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| TournamentError::Stats {
                path: path.display().to_string(),
                why: e.to_string(),
            })?;
            let table = load_stats(&text).map_err(|e| TournamentError::Stats {
                path: path.display().to_string(),
                why: e.to_string(),
            })?;
            Ok(Arc::new(table))
        }
    }
}

#[derive(Clone, Debug)]
pub struct TournamentRun {
    pub agents: Vec<AgentSpec>,
    pub maps: Vec<String>,
    pub records: Vec<MatchRecord>,
}

impl TournamentRun {
    pub fn score_table(&self) -> ScoreTable {
        let names: Vec<String> = self.agents.iter().map(|a| a.name()).collect();
        ScoreTable::from_records(&names, &self.maps, &self.records)
    }
}

/// Runs the full round robin described by the config: every unordered agent
/// pair plays `games_per_pairing` games on every map, seats swapping after
/// the first half. Matches run on a private thread pool sized by
/// `parallel_matches`; records come back in schedule order, and with a
/// virtual budget they are byte-identical no matter the thread count.
pub fn run_round_robin(cfg: &RunConfig) -> Result<TournamentRun, TournamentError> {
    cfg.validate()?;
    let agents = cfg.parsed_agents()?;
    let table = resolve_stats(cfg.engine.stats_file.as_deref())?;
    let settings = MatchSettings::from_config(cfg);
    let t = &cfg.tournament;
    let mut maps = Vec::new();
    for name in &t.maps {
        maps.push((name.clone(), resolve_map(name)?));
    }

    struct Job {
        map_idx: usize,
        seat0: usize,
        seat1: usize,
        seed: u64,
    }
    let mut jobs = Vec::new();
    for (map_idx, (name, _)) in maps.iter().enumerate() {
        for i in 0..agents.len() {
            for j in (i + 1)..agents.len() {
                for g in 0..t.games_per_pairing {
                    let (seat0, seat1) = if g < t.games_per_pairing / 2 { (i, j) } else { (j, i) };
                    jobs.push(Job {
                        map_idx,
                        seat0,
                        seat1,
                        seed: match_seed(t.seed, name, i, j, g),
                    });
                }
            }
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(t.parallel_matches as usize)
        .build()
        .expect("worker pool");
    let records: Vec<MatchRecord> = pool.install(|| {
        jobs.par_iter()
            .map(|job| {
                let (name, spec) = &maps[job.map_idx];
                run_match(
                    name,
                    spec,
                    table.clone(),
                    [agents[job.seat0], agents[job.seat1]],
                    job.seed,
                    &settings,
                )
            })
            .collect()
    });
    Ok(TournamentRun {
        agents,
        maps: t.maps.clone(),
        records,
    })
}

/// Normalized results: win = 1 point, draw = ½, loss = 0, averaged per game.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScoreTable {
    pub agents: Vec<String>,
    pub maps: Vec<String>,
    /// `per_map[m][a]` — agent `a`'s mean points per game on map `m`.
    pub per_map: Vec<Vec<f64>>,
    /// `overall[a]` — mean points per game across all maps.
    pub overall: Vec<f64>,
    /// `pairing_points[a][b]` — points `a` took off `b`; a pairing's two
    /// entries always sum to the number of games played between the two.
    pub pairing_points: Vec<Vec<f64>>,
    pub pairing_games: Vec<Vec<u32>>,
}

impl ScoreTable {
    pub fn from_records(agents: &[String], maps: &[String], records: &[MatchRecord]) -> ScoreTable {
        let n = agents.len();
        let idx = |name: &str| -> usize {
            agents
                .iter()
                .position(|a| a == name)
                .unwrap_or_else(|| panic!("record references unknown agent `{name}`"))
        };
        let map_idx = |name: &str| -> usize {
            maps.iter()
                .position(|m| m == name)
                .unwrap_or_else(|| panic!("record references unknown map `{name}`"))
        };
        let mut per_map_points = vec![vec![0.0f64; n]; maps.len()];
        let mut per_map_games = vec![vec![0u32; n]; maps.len()];
        let mut pairing_points = vec![vec![0.0f64; n]; n];
        let mut pairing_games = vec![vec![0u32; n]; n];
        for r in records {
            let (a0, a1, m) = (idx(&r.agent0), idx(&r.agent1), map_idx(&r.map));
            let p0 = r.points_for_seat(0);
            let p1 = r.points_for_seat(1);
            per_map_points[m][a0] += p0;
            per_map_points[m][a1] += p1;
            per_map_games[m][a0] += 1;
            per_map_games[m][a1] += 1;
            pairing_points[a0][a1] += p0;
            pairing_points[a1][a0] += p1;
            pairing_games[a0][a1] += 1;
            pairing_games[a1][a0] += 1;
        }
        let per_map: Vec<Vec<f64>> = per_map_points
            .iter()
            .zip(&per_map_games)
            .map(|(pts, games)| {
                pts.iter()
                    .zip(games)
                    .map(|(p, g)| if *g == 0 { 0.0 } else { p / *g as f64 })
                    .collect()
            })
            .collect();
        let overall: Vec<f64> = (0..n)
            .map(|a| {
                let pts: f64 = per_map_points.iter().map(|row| row[a]).sum();
                let games: u32 = per_map_games.iter().map(|row| row[a]).sum();
                if games == 0 { 0.0 } else { pts / games as f64 }
            })
            .collect();
        ScoreTable {
            agents: agents.to_vec(),
            maps: maps.to_vec(),
            per_map,
            overall,
            pairing_points,
            pairing_games,
        }
    }

    pub fn agent_index(&self, name: &str) -> Option<usize> {
        self.agents.iter().position(|a| a == name)
    }

    /// Mean points per game `a` scored against `b`.
    pub fn pairing_score(&self, a: usize, b: usize) -> f64 {
        let games = self.pairing_games[a][b];
        if games == 0 {
            0.0
        } else {
            self.pairing_points[a][b] / games as f64
        }
    }
}

/// Formats with six significant digits and no trailing zeros, so CSV cells
/// are compact yet reproducible.
pub fn fmt6(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let mag = x.abs().log10().floor() as i32;
    let decimals = (5 - mag).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn planner_column(agent0: &str, agent1: &str) -> String {
    let p0 = agent0.split(':').next().unwrap_or("");
    let p1 = agent1.split(':').next().unwrap_or("");
    if p0 == p1 {
        p0.to_string()
    } else {
        "mixed".to_string()
    }
}

/// One row per match, in schedule order.
pub fn matches_csv(records: &[MatchRecord]) -> String {
    let mut out = String::from(
        "map,planner,agent0,agent1,seed,winner,cycles,mean_ms_a0,mean_ms_a1,eval_ns_a0,eval_ns_a1\n",
    );
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            r.map,
            planner_column(&r.agent0, &r.agent1),
            r.agent0,
            r.agent1,
            r.seed,
            r.winner,
            r.end_cycle,
            fmt6(r.stats[0].mean_ms),
            fmt6(r.stats[1].mean_ms),
            r.stats[0].eval_ns,
            r.stats[1].eval_ns,
        ));
    }
    out
}

/// Score grid: one row per (map, planner), one column per evaluation
/// variant, plus `overall` rows pooling the maps. Cells are mean points per
/// game; a blank cell means that agent did not play.
pub fn score_csv(table: &ScoreTable) -> String {
    let mut out = String::from("map,planner");
    for v in EvalVariant::ALL {
        out.push(',');
        out.push_str(&v.code());
    }
    out.push('\n');
    let planners: Vec<PlannerKind> = PlannerKind::ALL
        .into_iter()
        .filter(|p| {
            table
                .agents
                .iter()
                .any(|a| a.split(':').next() == Some(p.code()))
        })
        .collect();
    let mut push_rows = |map_label: &str, scores: &[f64]| {
        for p in &planners {
            out.push_str(map_label);
            out.push(',');
            out.push_str(p.code());
            for v in EvalVariant::ALL {
                out.push(',');
                let name = format!("{}:{}", p.code(), v.code());
                if let Some(i) = table.agent_index(&name) {
                    out.push_str(&fmt6(scores[i]));
                }
            }
            out.push('\n');
        }
    };
    for (m, map) in table.maps.iter().enumerate() {
        push_rows(map, &table.per_map[m]);
    }
    if table.maps.len() > 1 {
        push_rows("overall", &table.overall);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::Script;

    fn tiny_config() -> RunConfig {
        let mut cfg = RunConfig::default();
        cfg.tournament.agents = vec![
            "idrtminimax:L".to_string(),
            "idrtminimax:DL".to_string(),
            "idabcd:S".to_string(),
        ];
        cfg.tournament.games_per_pairing = 4;
        cfg.tournament.wall_ms = 2;
        cfg.tournament.nodes_per_ms = 100;
        cfg.tournament.max_cycles = 60;
        cfg.tournament.parallel_matches = 2;
        cfg
    }

    #[test]
    fn round_robin_plays_every_pair_with_balanced_seats() {
        let run = run_round_robin(&tiny_config()).unwrap();
        // 3 agents -> 3 pairings, 4 games each.
        assert_eq!(run.records.len(), 12);
        let names: Vec<String> = run.agents.iter().map(|a| a.name()).collect();
        for (i, a) in names.iter().enumerate() {
            for b in names.iter().skip(i + 1) {
                let head_to_head: Vec<&MatchRecord> = run
                    .records
                    .iter()
                    .filter(|r| {
                        (&r.agent0 == a && &r.agent1 == b) || (&r.agent0 == b && &r.agent1 == a)
                    })
                    .collect();
                assert_eq!(head_to_head.len(), 4);
                let a_first = head_to_head.iter().filter(|r| &r.agent0 == a).count();
                assert_eq!(a_first, 2, "seats must swap halfway");
            }
        }
        for r in &run.records {
            assert_eq!(r.digest.len(), 64);
            assert!(r.end_cycle <= 60);
            assert!(r.stats[0].decisions > 0);
            assert!(r.forfeit.is_none());
        }
        let table = run.score_table();
        let total: f64 = table.overall.iter().map(|s| s * 8.0).sum();
        assert!((total - 12.0).abs() < 1e-9, "one point per match");
    }

    #[test]
    fn virtual_budgets_reproduce_across_thread_counts() {
        let mut one = tiny_config();
        one.tournament.parallel_matches = 1;
        let mut four = tiny_config();
        four.tournament.parallel_matches = 4;
        let a = run_round_robin(&one).unwrap();
        let b = run_round_robin(&four).unwrap();
        assert_eq!(a.records, b.records);
        assert_eq!(matches_csv(&a.records), matches_csv(&b.records));
    }

    fn stub_settings(mode: BudgetKind, max_cycles: u32) -> MatchSettings {
        let mut cfg = RunConfig::default();
        cfg.tournament.wall_ms = 5;
        let mut s = MatchSettings::from_config(&cfg);
        s.mode = mode;
        s.max_cycles = max_cycles;
        s
    }

    fn scripted(script: Script, seat: Player) -> Decider<'static> {
        Box::new(move |state: &GameState, _| DecideOutcome {
            decision: Decision {
                actions: script.action(state, seat),
                value: 0.0,
                completed_depth: 1,
                nodes_visited: 1,
                elapsed_ms: 0.0,
            },
            eval_calls: 0,
            eval_ns: 0,
        })
    }

    fn passive() -> Decider<'static> {
        Box::new(|_, _| DecideOutcome {
            decision: Decision {
                actions: Vec::new(),
                value: 0.0,
                completed_depth: 0,
                nodes_visited: 1,
                elapsed_ms: 0.0,
            },
            eval_calls: 0,
            eval_ns: 0,
        })
    }

    #[test]
    fn worker_rush_eliminates_a_passive_defender() {
        let map = builtin_map("m1").unwrap();
        let settings = stub_settings(
            BudgetKind::Virtual { nodes_per_ms: 1, jitter: 0.0 },
            4000,
        );
        let state0 = GameState::new(&map, UnitTypeTable::default_table(), settings.max_cycles);
        let record = run_match_core(
            "m1",
            state0,
            ["rush".to_string(), "sit".to_string()],
            1,
            &settings,
            [scripted(Script::WorkerRush, Player::P0), passive()],
        );
        assert_eq!(record.winner, Winner::P0);
        assert_eq!(record.reason, "ELIMINATION");
        assert!(record.end_cycle < 4000);
    }

    #[test]
    fn overrunning_the_wall_budget_forfeits_the_match() {
        let map = builtin_map("m1").unwrap();
        let settings = stub_settings(BudgetKind::Wall, 100);
        let state0 = GameState::new(&map, UnitTypeTable::default_table(), settings.max_cycles);
        let sleeper: Decider<'static> = Box::new(|_, _| {
            std::thread::sleep(std::time::Duration::from_millis(60));
            DecideOutcome {
                decision: Decision {
                    actions: Vec::new(),
                    value: 0.0,
                    completed_depth: 0,
                    nodes_visited: 1,
                    elapsed_ms: 60.0,
                },
                eval_calls: 0,
                eval_ns: 0,
            }
        });
        let record = run_match_core(
            "m1",
            state0,
            ["slow".to_string(), "sit".to_string()],
            1,
            &settings,
            [sleeper, passive()],
        );
        assert_eq!(record.forfeit, Some(0));
        assert_eq!(record.reason, "FORFEIT");
        assert_eq!(record.winner, Winner::P1);
        let table = ScoreTable::from_records(
            &["slow".to_string(), "sit".to_string()],
            &["m1".to_string()],
            std::slice::from_ref(&record),
        );
        assert_eq!(table.overall, vec![0.0, 1.0]);
    }

    fn fake_record(map: &str, agent0: &str, agent1: &str, winner: Winner) -> MatchRecord {
        MatchRecord {
            map: map.to_string(),
            agent0: agent0.to_string(),
            agent1: agent1.to_string(),
            seed: 0,
            winner,
            end_cycle: 10,
            reason: "CYCLE_CAP".to_string(),
            forfeit: None,
            stats: [AgentMatchStats::default(); 2],
            digest: String::new(),
        }
    }

    #[test]
    fn score_table_normalizes_points_per_game() {
        let agents = vec!["a".to_string(), "b".to_string()];
        let maps = vec!["m1".to_string()];
        let records = vec![
            fake_record("m1", "a", "b", Winner::P0),
            fake_record("m1", "a", "b", Winner::P0),
            fake_record("m1", "b", "a", Winner::P1),
            fake_record("m1", "b", "a", Winner::Draw),
        ];
        let t = ScoreTable::from_records(&agents, &maps, &records);
        assert!((t.overall[0] - 0.875).abs() < 1e-12);
        assert!((t.overall[1] - 0.125).abs() < 1e-12);
        assert!((t.pairing_score(0, 1) - 0.875).abs() < 1e-12);
        let games = t.pairing_games[0][1] as f64;
        assert!((t.pairing_points[0][1] + t.pairing_points[1][0] - games).abs() < 1e-12);

        let draws = vec![
            fake_record("m1", "a", "b", Winner::Draw),
            fake_record("m1", "b", "a", Winner::Draw),
        ];
        let t = ScoreTable::from_records(&agents, &maps, &draws);
        assert_eq!(t.overall, vec![0.5, 0.5]);
    }

    #[test]
    fn match_seeds_depend_on_coordinates_not_seats() {
        let s = match_seed(7, "m1", 0, 1, 0);
        assert_eq!(s, match_seed(7, "m1", 1, 0, 0));
        assert_ne!(s, match_seed(7, "m1", 0, 1, 1));
        assert_ne!(s, match_seed(7, "m2", 0, 1, 0));
        assert_ne!(s, match_seed(8, "m1", 0, 1, 0));
        assert_ne!(s, match_seed(7, "m1", 0, 2, 0));
    }

    #[test]
    fn csv_formatting_is_compact_and_six_digit() {
        assert_eq!(fmt6(0.0), "0");
        assert_eq!(fmt6(0.875), "0.875");
        assert_eq!(fmt6(1.0 / 3.0), "0.333333");
        assert_eq!(fmt6(12.34567891), "12.3457");
        assert_eq!(fmt6(123456789.0), "123456789");
        assert_eq!(fmt6(-0.5), "-0.5");

        let records = vec![fake_record("m1", "idabcd:L", "idabcd:DL", Winner::P0)];
        let csv = matches_csv(&records);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "map,planner,agent0,agent1,seed,winner,cycles,mean_ms_a0,mean_ms_a1,eval_ns_a0,eval_ns_a1"
        );
        assert_eq!(lines.next().unwrap(), "m1,idabcd,idabcd:L,idabcd:DL,0,P0,10,0,0,0,0");

        let table = ScoreTable::from_records(
            &["idabcd:L".to_string(), "idabcd:DL".to_string()],
            &["m1".to_string()],
            &records,
        );
        let score = score_csv(&table);
        let mut lines = score.lines();
        assert_eq!(lines.next().unwrap(), "map,planner,L,S,SQ,DL,DS,DSQ");
        assert_eq!(lines.next().unwrap(), "m1,idabcd,1,,,0,,");
    }
}
