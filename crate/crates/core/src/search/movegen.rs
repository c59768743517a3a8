//! Joint-action enumeration for the look-ahead planners.

use super::MoveGenLimits;
use crate::game::{GameState, JointAction, Player, UnitAction, UnitChoices, Verb};

/// Rank used to keep the most forcing actions when a unit's choices are
/// capped. Mirrors the order `legal_actions` generates, with IDLE last.
fn verb_rank(verb: &Verb) -> u8 {
    match verb {
        Verb::Attack(_) => 0,
        Verb::Harvest(_) => 1,
        Verb::Return => 2,
        Verb::Produce(_, _) => 3,
        Verb::Move(_) => 4,
        Verb::Idle => 5,
    }
}

fn capped_choices(mut choices: UnitChoices, per_unit: usize) -> UnitChoices {
    debug_assert!(choices
        .actions
        .windows(2)
        .all(|w| verb_rank(&w[0].verb) <= verb_rank(&w[1].verb)));
    let per_unit = per_unit.max(2);
    if choices.actions.len() > per_unit {
        // Keep the strongest choices plus IDLE, which is always last.
        let idle = *choices.actions.last().expect("IDLE is always present");
        choices.actions.truncate(per_unit - 1);
        choices.actions.push(idle);
    }
    choices
}

/// Enumerates joint actions for `player`'s idle units in ascending unit id,
/// as the cross product of per-unit choices. Production choices deeper in
/// the assignment honor the resources already committed by earlier units.
/// Returns `[[]]` (one empty joint action) when the player has nothing to
/// assign, so callers can treat "no idle units" uniformly.
pub fn enumerate_joint_actions(
    state: &GameState,
    player: Player,
    limits: &MoveGenLimits,
) -> Vec<JointAction> {
    let choices: Vec<UnitChoices> = state
        .legal_actions(player)
        .into_iter()
        .map(|c| capped_choices(c, limits.per_unit))
        .collect();
    if choices.is_empty() {
        return vec![Vec::new()];
    }
    let total = limits.total.max(1);
    let mut out: Vec<JointAction> = Vec::new();
    let mut current: Vec<UnitAction> = Vec::with_capacity(choices.len());
    let budget = state.player_resources(player);
    dfs(state, &choices, 0, budget, &mut current, &mut out, total);
    debug_assert!(!out.is_empty(), "IDLE-for-all is always enumerable");
    out
}

fn dfs(
    state: &GameState,
    choices: &[UnitChoices],
    level: usize,
    budget: u32,
    current: &mut Vec<UnitAction>,
    out: &mut Vec<JointAction>,
    total: usize,
) {
    if out.len() == total {
        return;
    }
    if level == choices.len() {
        out.push(current.clone());
        return;
    }
    for action in &choices[level].actions {
        let mut remaining = budget;
        if let Verb::Produce(kind, _) = action.verb {
            let cost = state.stats().get(kind).cost;
            if cost > remaining {
                continue;
            }
            remaining -= cost;
        }
        current.push(*action);
        dfs(state, choices, level + 1, remaining, current, out, total);
        current.pop();
        if out.len() == total {
            return;
        }
    }
}
