//! Real-time planners: scripted baselines, two depth-limited look-ahead
//! searches over the durative action model, and portfolio greedy search.
//!
//! All planners observe a common budget protocol: a [`Meter`] counts node
//! visits and answers expiry queries against either wall-clock time or a
//! virtual node allowance. Virtual budgets make decisions a pure function of
//! the inputs, which the tournament layer relies on for reproducible runs.

mod abcd;
mod minimax;
mod movegen;
mod portfolio;
mod scripts;

pub use abcd::idabcd_decide;
pub use minimax::idrtminimax_decide;
pub use movegen::enumerate_joint_actions;
pub use portfolio::{
    portfolio_decide, portfolio_decide_with_report, PortfolioConfig, PortfolioConfigError,
    PortfolioReport,
};
pub use scripts::Script;

use crate::game::{GameState, JointAction, Player};
use serde::{Deserialize, Serialize};
use std::time::Instant;
use thiserror::Error;

/// Per-decision resource limits shared by the planners.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchBudget {
    /// Wall-clock allowance per decision, in milliseconds.
    pub wall_ms: u64,
    /// Hard cap on iterative-deepening depth.
    pub max_depth: u32,
    /// Cycle horizon for playout-based leaf evaluation.
    pub playout_horizon: u32,
    /// Subtracted from the wall allowance so a decision returns early enough
    /// to be acted on.
    pub safety_margin_ms: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            wall_ms: 100,
            max_depth: 10,
            playout_horizon: 100,
            safety_margin_ms: 5,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BudgetError {
    #[error("search budget invalid: {0}")]
    Bad(String),
}

impl SearchBudget {
    pub fn validate(&self) -> Result<(), BudgetError> {
        if self.wall_ms == 0 || self.wall_ms <= self.safety_margin_ms {
            return Err(BudgetError::Bad(format!(
                "wall_ms ({}) must exceed safety_margin_ms ({})",
                self.wall_ms, self.safety_margin_ms
            )));
        }
        if self.max_depth == 0 {
            return Err(BudgetError::Bad("max_depth must be >= 1".into()));
        }
        if self.playout_horizon == 0 {
            return Err(BudgetError::Bad("playout_horizon must be >= 1".into()));
        }
        Ok(())
    }
}

/// What the budget is measured in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TimeSource {
    /// Real elapsed time against `wall_ms - safety_margin_ms`.
    Wall,
    /// A fixed allowance of node visits; deterministic across machines.
    Nodes(u64),
}

/// Budget meter threaded through a search. `tick` marks one visited node.
#[derive(Debug)]
pub struct Meter {
    source: TimeSource,
    deadline_ms: u64,
    start: Instant,
    nodes: u64,
}

impl Meter {
    pub fn start(budget: &SearchBudget, source: TimeSource) -> Meter {
        Meter {
            source,
            deadline_ms: budget.wall_ms.saturating_sub(budget.safety_margin_ms),
            start: Instant::now(),
            nodes: 0,
        }
    }

    #[inline]
    pub fn tick(&mut self) {
        self.nodes += 1;
    }

    pub fn expired(&self) -> bool {
        match self.source {
            TimeSource::Nodes(allowance) => self.nodes >= allowance,
            TimeSource::Wall => self.start.elapsed().as_millis() as u64 >= self.deadline_ms,
        }
    }

    pub fn nodes(&self) -> u64 {
        self.nodes
    }

    pub fn elapsed_ms(&self) -> f64 {
        self.start.elapsed().as_secs_f64() * 1e3
    }
}

/// Leaf handling for the look-ahead searches: evaluate the frontier state
/// directly, or roll it out with a script pair first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LeafMode {
    Eval,
    Playout { script: Script },
}

/// Caps on joint-action enumeration. Per-unit ordering is aggressive-first,
/// so a cap keeps attacks and harvests and drops movement alternatives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MoveGenLimits {
    /// Maximum actions considered per unit (IDLE always kept).
    pub per_unit: usize,
    /// Maximum joint actions per node.
    pub total: usize,
}

impl Default for MoveGenLimits {
    fn default() -> Self {
        MoveGenLimits {
            per_unit: 8,
            total: 128,
        }
    }
}

/// Outcome of one planner invocation.
#[derive(Clone, Debug, PartialEq)]
pub struct Decision {
    /// Joint action for the deciding player's idle units.
    pub actions: JointAction,
    /// Root value of the chosen action under the deepest completed search.
    pub value: f64,
    /// Deepest completed iteration; at least 1 whenever there was anything
    /// to decide (a cut-short depth-1 sweep still reports 1).
    pub completed_depth: u32,
    pub nodes_visited: u64,
    pub elapsed_ms: f64,
}

impl Decision {
    fn idle_pass(meter: &Meter) -> Decision {
        Decision {
            actions: Vec::new(),
            value: 0.0,
            completed_depth: 0,
            nodes_visited: meter.nodes(),
            elapsed_ms: meter.elapsed_ms(),
        }
    }
}

/// Signals that the meter expired mid-search; partial results are discarded
/// by the caller.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Expired;

/// Value of a game already decided, from `max_player`'s perspective. Terminal
/// values sit outside the open (-1, 1) band of evaluations, so a found win
/// beats any heuristic score.
pub(crate) fn terminal_value(result: &crate::game::GameResult, max_player: Player) -> f64 {
    match result.winner.points_for(max_player) {
        p if p == 1.0 => 1.0,
        p if p == 0.0 => -1.0,
        _ => 0.0,
    }
}

/// Puts the playout script's own joint action first in the root order.
///
/// Early-game positions often score identically under every root action:
/// the playout policy converges to the same future regardless of the first
/// step, so the argmax degenerates to enumeration order and the executed
/// behaviour becomes a move-generator artifact (units drift instead of
/// harvesting). Seeding the order with the script's choice makes flat
/// regions play the policy itself, while any genuinely better line still
/// wins on value. Ordering never changes computed values, so eval-leaf
/// search is left alone.
pub(crate) fn seed_root_order(
    roots: &mut Vec<JointAction>,
    state: &GameState,
    max_player: Player,
    leaf: &LeafMode,
) {
    let LeafMode::Playout { script } = leaf else {
        return;
    };
    let preferred = script.action(state, max_player);
    if preferred.is_empty() {
        return;
    }
    match roots.iter().position(|a| *a == preferred) {
        Some(i) => roots[..=i].rotate_right(1),
        None => roots.insert(0, preferred),
    }
}

/// Shared iterative-deepening driver. `child_value` scores one root action
/// at one depth (given the running alpha and whether expiry is suspended for
/// the guaranteed first depth-1 child). Returns the best action, its value,
/// and the deepest completed iteration; an interrupted iteration is
/// discarded, except that a partial depth-1 sweep stands as the depth-1
/// result (its best child is exact for the prefix it covered). The previous
/// iteration's best action is searched first.
pub(crate) fn iterate_deepening<F>(
    max_depth: u32,
    root_actions: &mut Vec<JointAction>,
    mut child_value: F,
) -> Option<(JointAction, f64, u32)>
where
    F: FnMut(&JointAction, u32, f64, bool) -> Result<f64, Expired>,
{
    let mut committed: Option<(JointAction, f64, u32)> = None;
    for depth in 1..=max_depth {
        let mut alpha = f64::NEG_INFINITY;
        let mut best: Option<(usize, f64)> = None;
        let mut expired = false;
        for (i, action) in root_actions.iter().enumerate() {
            let force = depth == 1 && i == 0 && committed.is_none();
            match child_value(action, depth, alpha, force) {
                Ok(value) => {
                    if best.map_or(true, |(_, bv)| value > bv) {
                        best = Some((i, value));
                    }
                    alpha = alpha.max(value);
                }
                Err(Expired) => {
                    expired = true;
                    break;
                }
            }
        }
        if expired {
            if committed.is_none() {
                if let Some((i, value)) = best {
                    committed = Some((root_actions[i].clone(), value, 1));
                }
            }
            break;
        }
        let (best_index, best_value) = best.expect("root actions are never empty");
        committed = Some((root_actions[best_index].clone(), best_value, depth));
        let front = root_actions.remove(best_index);
        root_actions.insert(0, front);
        if best_value >= 1.0 {
            break; // proven win; deeper search cannot improve
        }
    }
    committed
}

/// Playout-or-eval leaf used by both look-ahead planners.
pub(crate) fn leaf_value(
    state: &GameState,
    max_player: Player,
    leaf: &LeafMode,
    horizon: u32,
    eval: &dyn Fn(&GameState) -> f64,
) -> f64 {
    match leaf {
        LeafMode::Eval => eval(state),
        LeafMode::Playout { script } => {
            // Mean over the trajectory's tail half rather than the end state
            // alone. Harvest, return, and production completions step the
            // material score at discrete cycles, so a single fixed-horizon
            // snapshot rewards phase-shifting those completions across the
            // cutoff more than real progress; averaging damps the jumps.
            let tail_from = horizon - horizon / 2;
            let mut p0 = |s: &GameState, p: Player| script.action(s, p);
            let mut p1 = |s: &GameState, p: Player| script.action(s, p);
            let mut step = 0u32;
            let mut acc = 0.0;
            let mut samples = 0u32;
            let (_, result) = crate::game::run_playout_observed(
                state,
                &mut p0,
                &mut p1,
                horizon,
                &mut |s| {
                    step += 1;
                    if step >= tail_from {
                        acc += eval(s);
                        samples += 1;
                    }
                },
            );
            match result {
                Some(r) => terminal_value(&r, max_player),
                None => acc / f64::from(samples.max(1)),
            }
        }
    }
}
