//! Deterministic scripted policies: the rush baselines and the building
//! blocks of portfolio search and playout leaves.
//!
//! Role assignment is recomputed from the state every call, so scripts are
//! stateless: the lowest-id worker harvests; under the combat rushes the
//! second worker builds one barracks (then joins the economy) and any
//! further workers fight. Movement is greedy: the step that most reduces
//! Manhattan distance to the goal, ties broken in N, E, S, W order; a unit
//! that can only move away stays put.

use crate::game::{
    action_duration, Dir, GameState, JointAction, Player, Pos, Unit, UnitAction, UnitKind, Verb,
};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Script {
    WorkerRush,
    LightRush,
    RangedRush,
    HeavyRush,
}

impl Script {
    pub const ALL: [Script; 4] = [
        Script::WorkerRush,
        Script::LightRush,
        Script::RangedRush,
        Script::HeavyRush,
    ];

    /// Short codes used in agent specs and CSV output.
    pub fn code(self) -> &'static str {
        match self {
            Script::WorkerRush => "WR",
            Script::LightRush => "LR",
            Script::RangedRush => "RR",
            Script::HeavyRush => "HR",
        }
    }

    pub fn from_code(code: &str) -> Option<Script> {
        Script::ALL.iter().copied().find(|s| s.code() == code)
    }

    /// The combat kind this script trains, if any.
    pub fn rush_kind(self) -> Option<UnitKind> {
        match self {
            Script::WorkerRush => None,
            Script::LightRush => Some(UnitKind::Light),
            Script::RangedRush => Some(UnitKind::Range),
            Script::HeavyRush => Some(UnitKind::Heavy),
        }
    }

    /// Computes this script's joint action for `player`'s idle units.
    /// The result is always accepted by [`GameState::advance`].
    pub fn action(self, state: &GameState, player: Player) -> JointAction {
        let workers: Vec<u32> = state
            .units_of(player)
            .filter(|u| u.kind == UnitKind::Worker)
            .map(|u| u.id)
            .collect();
        let harvester = workers.first().copied();
        let builder = workers.get(1).copied();
        let rax_alive = state
            .units_of(player)
            .any(|u| u.kind == UnitKind::Rax);
        let rax_pending = state.units_of(player).any(|u| {
            matches!(u.current_action, Some(Verb::Produce(UnitKind::Rax, _)))
        });

        let mut joint = Vec::new();
        // Production must respect the shared resource pool across this very
        // assignment; the engine rejects overdrafts.
        let mut budget = state.player_resources(player);
        for unit in state.units_of(player).filter(|u| u.is_idle()) {
            let verb = match unit.kind {
                UnitKind::MainBase => self.base_verb(state, player, unit, &workers),
                UnitKind::Rax => self.rax_verb(state, player, unit),
                UnitKind::Worker => {
                    if Some(unit.id) == harvester {
                        economy_verb(state, player, unit)
                    } else if self != Script::WorkerRush && Some(unit.id) == builder {
                        builder_verb(state, player, unit, rax_alive || rax_pending)
                    } else {
                        fight_verb(state, player, unit)
                    }
                }
                _ => fight_verb(state, player, unit),
            };
            let verb = match verb {
                Verb::Produce(kind, dir) => {
                    let cost = state.stats().get(kind).cost;
                    if cost <= budget {
                        budget -= cost;
                        Verb::Produce(kind, dir)
                    } else {
                        Verb::Idle
                    }
                }
                other => other,
            };
            joint.push(UnitAction {
                unit_id: unit.id,
                verb,
                duration: action_duration(state.stats().get(unit.kind), &verb),
            });
        }
        joint
    }

    fn base_verb(self, state: &GameState, player: Player, unit: &Unit, workers: &[u32]) -> Verb {
        let want_worker = match self {
            Script::WorkerRush => true,
            _ => workers.len() < 2,
        };
        if want_worker {
            produce_verb(state, player, unit, UnitKind::Worker)
        } else {
            Verb::Idle
        }
    }

    fn rax_verb(self, state: &GameState, player: Player, unit: &Unit) -> Verb {
        match self.rush_kind() {
            Some(kind) => produce_verb(state, player, unit, kind),
            None => Verb::Idle,
        }
    }
}

/// Picks the first free adjacent cell in canonical direction order.
fn free_adjacent_dir(state: &GameState, from: Pos) -> Option<Dir> {
    Dir::ALL.into_iter().find(|&dir| {
        let target = from.step(dir);
        state.in_bounds(target) && !state.is_occupied(target)
    })
}

fn produce_verb(state: &GameState, player: Player, unit: &Unit, kind: UnitKind) -> Verb {
    if state.player_resources(player) < state.stats().get(kind).cost {
        return Verb::Idle;
    }
    match free_adjacent_dir(state, unit.pos) {
        Some(dir) => Verb::Produce(kind, dir),
        None => Verb::Idle,
    }
}

/// Greedy step toward `goal`: strictly distance-reducing moves first, then
/// equal-distance sidesteps, ties in N, E, S, W order. `None` when every
/// free neighbor increases the distance (or none is free).
fn greedy_step(state: &GameState, from: Pos, goal: Pos) -> Option<Dir> {
    let current = from.manhattan(goal);
    let mut best: Option<(u32, Dir)> = None;
    for dir in Dir::ALL {
        let target = from.step(dir);
        if !state.in_bounds(target) || state.is_occupied(target) {
            continue;
        }
        let dist = target.manhattan(goal);
        if best.map_or(true, |(bd, _)| dist < bd) {
            best = Some((dist, dir));
        }
    }
    match best {
        Some((dist, dir)) if dist <= current => Some(dir),
        _ => None,
    }
}

/// Attack the nearest enemy in range, otherwise close in on it.
fn fight_verb(state: &GameState, player: Player, unit: &Unit) -> Verb {
    let spec = state.stats().get(unit.kind);
    let target = state
        .units_of(player.opponent())
        .min_by_key(|e| (unit.pos.manhattan(e.pos), e.id));
    let Some(target) = target else {
        return Verb::Idle;
    };
    if spec.attack_damage > 0 && unit.pos.manhattan(target.pos) <= spec.attack_range {
        return Verb::Attack(target.id);
    }
    if !spec.can_move {
        return Verb::Idle;
    }
    match greedy_step(state, unit.pos, target.pos) {
        Some(dir) => Verb::Move(dir),
        None => Verb::Idle,
    }
}

/// Harvest loop: gather from the nearest pile, deliver to the nearest base.
/// Falls back to fighting when there is nothing left to gather.
fn economy_verb(state: &GameState, player: Player, unit: &Unit) -> Verb {
    if unit.carried > 0 {
        let base = state
            .units_of(player)
            .filter(|u| u.kind == UnitKind::MainBase)
            .min_by_key(|b| (unit.pos.manhattan(b.pos), b.id));
        let Some(base) = base else {
            return fight_verb(state, player, unit);
        };
        if unit.pos.manhattan(base.pos) == 1 {
            return Verb::Return;
        }
        return match greedy_step(state, unit.pos, base.pos) {
            Some(dir) => Verb::Move(dir),
            None => Verb::Idle,
        };
    }
    if let Some(pile) = state
        .piles()
        .iter()
        .filter(|p| p.amount > 0)
        .find(|p| unit.pos.manhattan(p.pos) == 1)
    {
        return Verb::Harvest(pile.pos);
    }
    let nearest = state
        .piles()
        .iter()
        .enumerate()
        .filter(|(_, p)| p.amount > 0)
        .min_by_key(|(i, p)| (unit.pos.manhattan(p.pos), *i));
    match nearest {
        Some((_, pile)) => match greedy_step(state, unit.pos, pile.pos) {
            Some(dir) => Verb::Move(dir),
            None => Verb::Idle,
        },
        None => fight_verb(state, player, unit),
    }
}

/// The second worker: put up one rax, then join the economy.
fn builder_verb(state: &GameState, player: Player, unit: &Unit, rax_exists: bool) -> Verb {
    if rax_exists {
        return economy_verb(state, player, unit);
    }
    let cost = state.stats().get(UnitKind::Rax).cost;
    if state.player_resources(player) >= cost {
        if let Some(dir) = free_adjacent_dir(state, unit.pos) {
            return Verb::Produce(UnitKind::Rax, dir);
        }
    }
    economy_verb(state, player, unit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{builtin_map, run_script_playout, UnitTypeTable};
    use crate::testutil::state_with;

    fn verb_of(joint: &JointAction, unit_id: u32) -> Verb {
        joint
            .iter()
            .find(|a| a.unit_id == unit_id)
            .expect("unit assigned")
            .verb
    }

    #[test]
    fn worker_rush_harvests_and_trains() {
        let state = state_with(
            &[
                (Player::P0, UnitKind::MainBase, (2, 2), 0, 0),
                (Player::P0, UnitKind::Worker, (1, 1), 0, 0),
                (Player::P1, UnitKind::MainBase, (13, 13), 0, 0),
            ],
            [1, 0],
            &[((0, 1), 8)],
        );
        let joint = Script::WorkerRush.action(&state, Player::P0);
        assert_eq!(joint.len(), 2);
        assert_eq!(
            verb_of(&joint, 0),
            Verb::Produce(UnitKind::Worker, Dir::N),
            "base trains into the first free cell"
        );
        assert_eq!(verb_of(&joint, 1), Verb::Harvest(Pos::new(0, 1)));
    }

    #[test]
    fn carrying_worker_returns_or_walks_home() {
        let adjacent = state_with(
            &[
                (Player::P0, UnitKind::MainBase, (2, 2), 0, 0),
                (Player::P0, UnitKind::Worker, (2, 1), 0, 1),
                (Player::P1, UnitKind::MainBase, (13, 13), 0, 0),
            ],
            [0, 0],
            &[((0, 1), 8)],
        );
        let joint = Script::WorkerRush.action(&adjacent, Player::P0);
        assert_eq!(verb_of(&joint, 1), Verb::Return);

        let far = state_with(
            &[
                (Player::P0, UnitKind::MainBase, (2, 2), 0, 0),
                (Player::P0, UnitKind::Worker, (6, 2), 0, 1),
                (Player::P1, UnitKind::MainBase, (13, 13), 0, 0),
            ],
            [0, 0],
            &[((0, 1), 8)],
        );
        let joint = Script::WorkerRush.action(&far, Player::P0);
        assert_eq!(verb_of(&joint, 1), Verb::Move(Dir::W));
    }

    #[test]
    fn combat_rush_caps_workers_at_two() {
        let state = state_with(
            &[
                (Player::P0, UnitKind::MainBase, (2, 2), 0, 0),
                (Player::P0, UnitKind::Worker, (1, 1), 0, 0),
                (Player::P0, UnitKind::Worker, (8, 8), 0, 0),
                (Player::P1, UnitKind::MainBase, (13, 13), 0, 0),
            ],
            [10, 0],
            &[((0, 1), 8)],
        );
        let joint = Script::LightRush.action(&state, Player::P0);
        assert_eq!(verb_of(&joint, 0), Verb::Idle, "two workers are enough");

        let one_worker = state_with(
            &[
                (Player::P0, UnitKind::MainBase, (2, 2), 0, 0),
                (Player::P0, UnitKind::Worker, (1, 1), 0, 0),
                (Player::P1, UnitKind::MainBase, (13, 13), 0, 0),
            ],
            [10, 0],
            &[((0, 1), 8)],
        );
        let joint = Script::LightRush.action(&one_worker, Player::P0);
        assert!(matches!(
            verb_of(&joint, 0),
            Verb::Produce(UnitKind::Worker, _)
        ));
    }

    #[test]
    fn second_worker_builds_one_rax_then_gathers() {
        let state = state_with(
            &[
                (Player::P0, UnitKind::MainBase, (2, 2), 0, 0),
                (Player::P0, UnitKind::Worker, (1, 1), 0, 0),
                (Player::P0, UnitKind::Worker, (6, 6), 0, 0),
                (Player::P1, UnitKind::MainBase, (13, 13), 0, 0),
            ],
            [5, 0],
            &[((0, 1), 8)],
        );
        let joint = Script::LightRush.action(&state, Player::P0);
        assert_eq!(verb_of(&joint, 2), Verb::Produce(UnitKind::Rax, Dir::N));

        // Rax standing: the builder reverts to the economy.
        let with_rax = state_with(
            &[
                (Player::P0, UnitKind::MainBase, (2, 2), 0, 0),
                (Player::P0, UnitKind::Worker, (1, 1), 0, 0),
                (Player::P0, UnitKind::Rax, (6, 5), 0, 0),
                (Player::P0, UnitKind::Worker, (6, 6), 0, 0),
                (Player::P1, UnitKind::MainBase, (13, 13), 0, 0),
            ],
            [5, 0],
            &[((0, 1), 8)],
        );
        let joint = Script::LightRush.action(&with_rax, Player::P0);
        let builder_verb = verb_of(&joint, 3);
        assert!(
            matches!(builder_verb, Verb::Move(_)),
            "builder walks toward the pile, got {builder_verb:?}"
        );
    }

    #[test]
    fn rax_trains_the_rush_kind() {
        let state = state_with(
            &[
                (Player::P0, UnitKind::Rax, (5, 5), 0, 0),
                (Player::P1, UnitKind::MainBase, (13, 13), 0, 0),
            ],
            [6, 0],
            &[],
        );
        for script in [Script::LightRush, Script::RangedRush, Script::HeavyRush] {
            let joint = script.action(&state, Player::P0);
            match verb_of(&joint, 0) {
                Verb::Produce(kind, _) => assert_eq!(Some(kind), script.rush_kind()),
                other => panic!("expected production, got {other:?}"),
            }
        }
        let joint = Script::WorkerRush.action(&state, Player::P0);
        assert_eq!(verb_of(&joint, 0), Verb::Idle);
    }

    #[test]
    fn fighters_attack_in_range_and_close_otherwise() {
        let state = state_with(
            &[
                (Player::P0, UnitKind::Light, (5, 5), 0, 0),
                (Player::P0, UnitKind::Range, (2, 5), 0, 0),
                (Player::P1, UnitKind::Worker, (5, 6), 0, 0),
            ],
            [0, 0],
            &[],
        );
        let joint = Script::LightRush.action(&state, Player::P0);
        assert_eq!(verb_of(&joint, 0), Verb::Attack(2));
        // The ranged unit is 4 cells out (range 3): it closes in eastward.
        assert_eq!(verb_of(&joint, 1), Verb::Move(Dir::E));
    }

    #[test]
    fn production_respects_the_shared_pool() {
        let state = state_with(
            &[
                (Player::P0, UnitKind::MainBase, (2, 2), 0, 0),
                (Player::P0, UnitKind::MainBase, (10, 10), 0, 0),
                (Player::P1, UnitKind::Worker, (15, 15), 0, 0),
            ],
            [1, 0],
            &[],
        );
        let joint = Script::WorkerRush.action(&state, Player::P0);
        let produced = joint
            .iter()
            .filter(|a| matches!(a.verb, Verb::Produce(_, _)))
            .count();
        assert_eq!(produced, 1, "one worker affordable");
        state
            .advance(&[joint, Vec::new()])
            .expect("script action is legal");
    }

    #[test]
    fn scripts_are_legal_and_deterministic_over_long_playouts() {
        let map = builtin_map("m1").unwrap();
        let state = crate::game::GameState::new(&map, UnitTypeTable::default_table(), 5000);
        for (s0, s1) in [
            (Script::WorkerRush, Script::LightRush),
            (Script::RangedRush, Script::HeavyRush),
        ] {
            let (end_a, result_a) = run_script_playout(&state, s0, s1, 800);
            let (end_b, result_b) = run_script_playout(&state, s0, s1, 800);
            assert_eq!(end_a, end_b, "identical inputs, identical playout");
            assert_eq!(result_a, result_b);
            assert!(end_a.cycle() > 0);
        }
    }

    #[test]
    fn worker_rush_runs_an_economy() {
        let map = builtin_map("m1").unwrap();
        let state = crate::game::GameState::new(&map, UnitTypeTable::default_table(), 5000);
        let before: u32 = state.piles().iter().map(|p| p.amount).sum();
        let (end, _) = run_script_playout(&state, Script::WorkerRush, Script::WorkerRush, 200);
        let after: u32 = end.piles().iter().map(|p| p.amount).sum();
        // Banked amounts may be zero at any instant (the rush spends every
        // resource on training), so economic progress shows up as depleted
        // piles and a grown army instead.
        assert!(after < before, "piles should deplete: {after} vs {before}");
        assert!(end.units().len() > state.units().len(), "training happened");
    }

    #[test]
    fn codes_round_trip() {
        for script in Script::ALL {
            assert_eq!(Script::from_code(script.code()), Some(script));
        }
        assert_eq!(Script::from_code("XX"), None);
    }
}

