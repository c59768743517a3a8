//! 180-degree board rotation with player swap.
//!
//! `mirror_state` keeps unit ids and flips everything spatial, so a policy
//! can be conjugated through it: P1's mirrored policy is
//! `mirror_joint_action(policy(mirror_state(s), P0))`. Symmetry tests compare
//! a state against its own mirror with `states_mirror_equal`, which ignores
//! unit ids.

use super::state::{GameState, JointAction, Unit, UnitAction, Verb};
use super::{Player, Pos, ResourcePile};

fn mirror_pos(state: &GameState, pos: Pos) -> Pos {
    Pos::new(state.width() - 1 - pos.x, state.height() - 1 - pos.y)
}

fn mirror_verb(state: &GameState, verb: Verb) -> Verb {
    match verb {
        Verb::Idle => Verb::Idle,
        Verb::Move(dir) => Verb::Move(dir.mirrored()),
        Verb::Attack(id) => Verb::Attack(id),
        Verb::Harvest(pos) => Verb::Harvest(mirror_pos(state, pos)),
        Verb::Return => Verb::Return,
        Verb::Produce(kind, dir) => Verb::Produce(kind, dir.mirrored()),
    }
}

/// Rotates the board 180 degrees and swaps ownership. Unit ids survive.
pub fn mirror_state(state: &GameState) -> GameState {
    let mut mirrored = state.clone();
    let verbs: Vec<Option<Verb>> = state
        .units()
        .iter()
        .map(|u| u.current_action.map(|v| mirror_verb(state, v)))
        .collect();
    for (unit, verb) in mirrored.units_mut().iter_mut().zip(verbs) {
        unit.owner = unit.owner.opponent();
        unit.pos = Pos::new(state.width() - 1 - unit.pos.x, state.height() - 1 - unit.pos.y);
        unit.current_action = verb;
    }
    for pile in mirrored.piles_mut() {
        pile.pos = Pos::new(state.width() - 1 - pile.pos.x, state.height() - 1 - pile.pos.y);
    }
    mirrored.swap_player_resources();
    mirrored
}

/// Maps a joint action computed on `mirror_state(s)` back onto `s`.
pub fn mirror_joint_action(mirrored: &GameState, joint: &JointAction) -> JointAction {
    joint
        .iter()
        .map(|a| UnitAction {
            unit_id: a.unit_id,
            verb: mirror_verb(mirrored, a.verb),
            duration: a.duration,
        })
        .collect()
}

/// Id-free equality: `a` and `b` describe the same board when each unit in
/// one has a unique counterpart in the other with equal owner, kind, position,
/// hp, carried load, remaining busy time, and action shape (attack targets
/// compared by the target's cell rather than its id).
pub fn states_mirror_equal(a: &GameState, b: &GameState) -> bool {
    if a.cycle() != b.cycle()
        || a.player_resources(Player::P0) != b.player_resources(Player::P0)
        || a.player_resources(Player::P1) != b.player_resources(Player::P1)
        || a.free_resources() != b.free_resources()
    {
        return false;
    }
    let mut piles_a: Vec<ResourcePile> = a.piles().to_vec();
    let mut piles_b: Vec<ResourcePile> = b.piles().to_vec();
    piles_a.sort_by_key(|p| (p.pos, p.amount));
    piles_b.sort_by_key(|p| (p.pos, p.amount));
    if piles_a != piles_b {
        return false;
    }
    let key = |state: &GameState, u: &Unit| {
        let action = u.current_action.map(|v| match v {
            Verb::Attack(id) => {
                let target = state.unit(id).map(|t| t.pos).unwrap_or(Pos::new(-1, -1));
                (4u8, target, None)
            }
            Verb::Idle => (0, Pos::new(0, 0), None),
            Verb::Move(d) => (1, Pos::new(0, 0), Some(d)),
            Verb::Harvest(p) => (2, p, None),
            Verb::Return => (3, Pos::new(0, 0), None),
            Verb::Produce(k, d) => (5, Pos::new(k.index() as i32, 0), Some(d)),
        });
        (u.owner, u.pos, u.kind, u.hp, u.carried, u.busy_until, action)
    };
    let mut keys_a: Vec<_> = a.units().iter().map(|u| key(a, u)).collect();
    let mut keys_b: Vec<_> = b.units().iter().map(|u| key(b, u)).collect();
    keys_a.sort();
    keys_b.sort();
    keys_a == keys_b
}
