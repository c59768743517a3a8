//! Portfolio greedy search: per-unit script assignment improved by
//! hill-climbing, with a maximin fallback over uniform script choices.
//!
//! The planner first scores every uniform script pairing into a table (also
//! the audit trail exposed by the report), seeds both sides with their best
//! uniform answer to the first script, then alternates per-unit improvement
//! passes: each unit tries every script while the rest of the assignment
//! stays fixed, keeping the best playout value against the opponent's
//! current assignment. The final action is chosen from all fully evaluated
//! candidate assignments by the highest worst-case value against uniform
//! opponent scripts — a hill-climbed assignment only replaces a uniform one
//! if it is more robust, not just better against the assumed opponent.

use super::{
    scripts::Script, terminal_value, Decision, Expired, Meter, SearchBudget, TimeSource,
};
use crate::game::{
    GameState, JointAction, Player, UnitAction, UnitId, Verb,
};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PortfolioConfig {
    pub scripts: Vec<Script>,
    /// Improvement passes over both sides' assignments.
    pub response_iterations: u32,
}

impl Default for PortfolioConfig {
    fn default() -> Self {
        PortfolioConfig {
            scripts: Script::ALL.to_vec(),
            response_iterations: 1,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PortfolioConfigError {
    #[error("portfolio needs at least two scripts to choose between")]
    TooFewScripts,
    #[error("portfolio scripts must be distinct")]
    DuplicateScript,
    #[error("response_iterations must be >= 1")]
    NoIterations,
}

impl PortfolioConfig {
    /// Checks the constraints a configured portfolio must meet. The search
    /// itself also runs degenerate setups (e.g. a single script) so they can
    /// be exercised directly.
    pub fn validate(&self) -> Result<(), PortfolioConfigError> {
        if self.scripts.len() < 2 {
            return Err(PortfolioConfigError::TooFewScripts);
        }
        for (i, s) in self.scripts.iter().enumerate() {
            if self.scripts[..i].contains(s) {
                return Err(PortfolioConfigError::DuplicateScript);
            }
        }
        if self.response_iterations == 0 {
            return Err(PortfolioConfigError::NoIterations);
        }
        Ok(())
    }
}

/// Audit record of one portfolio decision.
#[derive(Clone, Debug, PartialEq)]
pub struct PortfolioReport {
    pub scripts: Vec<Script>,
    /// `table[i][j]`: playout value of own uniform `scripts[i]` against
    /// opponent uniform `scripts[j]`. NaN where the budget ran out.
    pub table: Vec<Vec<f64>>,
    pub seed_own: Script,
    pub seed_opp: Script,
    pub passes_completed: u32,
    /// Candidate assignments that survived full robust evaluation.
    pub candidates: usize,
    /// Worst-case value of the chosen candidate over uniform opponents.
    pub robust_value: f64,
    pub budget_exhausted: bool,
}

/// Unit-to-script map; units not listed (e.g. trained mid-playout) follow
/// the default script.
#[derive(Clone, Debug)]
struct Assignment {
    by_id: Vec<(UnitId, Script)>, // ascending id
    default: Script,
}

impl Assignment {
    fn uniform(script: Script) -> Assignment {
        Assignment {
            by_id: Vec::new(),
            default: script,
        }
    }

    fn per_unit(ids: &[UnitId], script: Script) -> Assignment {
        Assignment {
            by_id: ids.iter().map(|&id| (id, script)).collect(),
            default: script,
        }
    }

    fn get(&self, id: UnitId) -> Script {
        self.by_id
            .binary_search_by_key(&id, |(uid, _)| *uid)
            .map(|i| self.by_id[i].1)
            .unwrap_or(self.default)
    }

    fn set(&mut self, id: UnitId, script: Script) {
        if let Ok(i) = self.by_id.binary_search_by_key(&id, |(uid, _)| *uid) {
            self.by_id[i].1 = script;
        }
    }
}

/// Assembles one side's joint action: every idle unit takes the action its
/// assigned script proposes for it, and productions the mixed assignment
/// can no longer afford fall back to IDLE.
fn side_joint(state: &GameState, player: Player, assignment: &Assignment) -> JointAction {
    let mut team_cache: Vec<(Script, JointAction)> = Vec::new();
    let mut joint = Vec::new();
    let mut budget = state.player_resources(player);
    for unit in state.units_of(player).filter(|u| u.is_idle()) {
        let script = assignment.get(unit.id);
        let cached = match team_cache.iter().position(|(s, _)| *s == script) {
            Some(i) => i,
            None => {
                team_cache.push((script, script.action(state, player)));
                team_cache.len() - 1
            }
        };
        let mut action = team_cache[cached]
            .1
            .iter()
            .find(|a| a.unit_id == unit.id)
            .copied()
            .unwrap_or(UnitAction {
                unit_id: unit.id,
                verb: Verb::Idle,
                duration: 1,
            });
        if let Verb::Produce(kind, _) = action.verb {
            let cost = state.stats().get(kind).cost;
            if cost <= budget {
                budget -= cost;
            } else {
                action.verb = Verb::Idle;
                action.duration = 1;
            }
        }
        joint.push(action);
    }
    joint
}

/// Scripted playout of up to `horizon` cycles; ends early on a result.
fn playout_value(
    root: &GameState,
    max_player: Player,
    own: &Assignment,
    opp: &Assignment,
    horizon: u32,
    meter: &mut Meter,
    eval: &dyn Fn(&GameState) -> f64,
) -> Result<f64, Expired> {
    let mut current = root.clone();
    for _ in 0..horizon {
        if let Some(result) = current.winner() {
            return Ok(terminal_value(&result, max_player));
        }
        meter.tick();
        if meter.expired() {
            return Err(Expired);
        }
        let mut joints = [Vec::new(), Vec::new()];
        joints[max_player.index()] = side_joint(&current, max_player, own);
        joints[max_player.opponent().index()] =
            side_joint(&current, max_player.opponent(), opp);
        current = current
            .advance(&joints)
            .expect("assembled script actions are legal");
    }
    Ok(match current.winner() {
        Some(result) => terminal_value(&result, max_player),
        None => eval(&current),
    })
}

pub fn portfolio_decide(
    state: &GameState,
    max_player: Player,
    cfg: &PortfolioConfig,
    budget: &SearchBudget,
    source: TimeSource,
    eval: &dyn Fn(&GameState) -> f64,
) -> Decision {
    portfolio_decide_with_report(state, max_player, cfg, budget, source, eval).0
}

/// Full portfolio search; the report carries the uniform pairing table and
/// the robustness audit of the chosen assignment.
pub fn portfolio_decide_with_report(
    state: &GameState,
    max_player: Player,
    cfg: &PortfolioConfig,
    budget: &SearchBudget,
    source: TimeSource,
    eval: &dyn Fn(&GameState) -> f64,
) -> (Decision, PortfolioReport) {
    let scripts = &cfg.scripts;
    assert!(!scripts.is_empty(), "portfolio needs at least one script");
    let mut meter = Meter::start(budget, source);
    let horizon = budget.playout_horizon;
    let n = scripts.len();

    let bail_report = |table: Vec<Vec<f64>>, exhausted: bool| PortfolioReport {
        scripts: scripts.clone(),
        table,
        seed_own: scripts[0],
        seed_opp: scripts[0],
        passes_completed: 0,
        candidates: 0,
        robust_value: f64::NAN,
        budget_exhausted: exhausted,
    };

    if !state.has_idle_units(max_player) || state.winner().is_some() {
        let table = vec![vec![f64::NAN; n]; n];
        return (Decision::idle_pass(&meter), bail_report(table, false));
    }

    // Uniform pairing table; also the audit baseline for the final choice.
    let mut table = vec![vec![f64::NAN; n]; n];
    for i in 0..n {
        for j in 0..n {
            let own = Assignment::uniform(scripts[i]);
            let opp = Assignment::uniform(scripts[j]);
            match playout_value(state, max_player, &own, &opp, horizon, &mut meter, eval) {
                Ok(value) => table[i][j] = value,
                Err(Expired) => {
                    // Too little budget to even scout: play the first script.
                    let actions = side_joint(state, max_player, &own_first(scripts));
                    let decision = Decision {
                        actions,
                        value: 0.0,
                        completed_depth: 0,
                        nodes_visited: meter.nodes(),
                        elapsed_ms: meter.elapsed_ms(),
                    };
                    return (decision, bail_report(table, true));
                }
            }
        }
    }

    let seed_own_idx = argmax_by(n, |i| table[i][0]);
    let seed_opp_idx = argmin_by(n, |j| table[0][j]);
    let seed_own = scripts[seed_own_idx];
    let seed_opp = scripts[seed_opp_idx];

    let own_ids: Vec<UnitId> = state.units_of(max_player).map(|u| u.id).collect();
    let opp_ids: Vec<UnitId> = state
        .units_of(max_player.opponent())
        .map(|u| u.id)
        .collect();
    let mut own_asgn = Assignment::per_unit(&own_ids, seed_own);
    let mut opp_asgn = Assignment::per_unit(&opp_ids, seed_opp);

    // Alternating per-unit hill-climbing; each completed pass contributes a
    // candidate assignment.
    let mut passes_completed = 0u32;
    let mut snapshots: Vec<Assignment> = Vec::new();
    'improve: for _ in 0..cfg.response_iterations {
        for &unit_id in &own_ids {
            let mut best = (own_asgn.get(unit_id), f64::NEG_INFINITY);
            for &script in scripts {
                own_asgn.set(unit_id, script);
                match playout_value(state, max_player, &own_asgn, &opp_asgn, horizon, &mut meter, eval)
                {
                    Ok(value) => {
                        if value > best.1 {
                            best = (script, value);
                        }
                    }
                    Err(Expired) => {
                        own_asgn.set(unit_id, best.0);
                        break 'improve;
                    }
                }
            }
            own_asgn.set(unit_id, best.0);
        }
        for &unit_id in &opp_ids {
            let mut best = (opp_asgn.get(unit_id), f64::INFINITY);
            for &script in scripts {
                opp_asgn.set(unit_id, script);
                match playout_value(state, max_player, &own_asgn, &opp_asgn, horizon, &mut meter, eval)
                {
                    Ok(value) => {
                        if value < best.1 {
                            best = (script, value);
                        }
                    }
                    Err(Expired) => {
                        opp_asgn.set(unit_id, best.0);
                        break 'improve;
                    }
                }
            }
            opp_asgn.set(unit_id, best.0);
        }
        passes_completed += 1;
        snapshots.push(own_asgn.clone());
    }

    // Robust selection: highest worst case against uniform opponents, over
    // the uniform rows (already in the table) and the pass snapshots.
    let mut candidates: Vec<(Assignment, f64)> = (0..n)
        .map(|i| {
            let worst = table[i].iter().copied().fold(f64::INFINITY, f64::min);
            (Assignment::uniform(scripts[i]), worst)
        })
        .collect();
    for snapshot in snapshots {
        let mut worst = f64::INFINITY;
        let mut complete = true;
        for &script in scripts {
            let opp = Assignment::uniform(script);
            match playout_value(state, max_player, &snapshot, &opp, horizon, &mut meter, eval) {
                Ok(value) => worst = worst.min(value),
                Err(Expired) => {
                    complete = false;
                    break;
                }
            }
        }
        if complete {
            candidates.push((snapshot, worst));
        }
    }
    let chosen = argmax_by(candidates.len(), |i| candidates[i].1);
    let (assignment, robust_value) = &candidates[chosen];

    let decision = Decision {
        actions: side_joint(state, max_player, assignment),
        value: *robust_value,
        completed_depth: passes_completed,
        nodes_visited: meter.nodes(),
        elapsed_ms: meter.elapsed_ms(),
    };
    let report = PortfolioReport {
        scripts: scripts.clone(),
        table,
        seed_own,
        seed_opp,
        passes_completed,
        candidates: candidates.len(),
        robust_value: *robust_value,
        budget_exhausted: meter.expired(),
    };
    (decision, report)
}

fn own_first(scripts: &[Script]) -> Assignment {
    Assignment::uniform(scripts[0])
}

/// Index of the largest value, earliest on ties.
fn argmax_by(n: usize, f: impl Fn(usize) -> f64) -> usize {
    let mut best = 0;
    for i in 1..n {
        if f(i) > f(best) {
            best = i;
        }
    }
    best
}

/// Index of the smallest value, earliest on ties.
fn argmin_by(n: usize, f: impl Fn(usize) -> f64) -> usize {
    let mut best = 0;
    for i in 1..n {
        if f(i) < f(best) {
            best = i;
        }
    }
    best
}
