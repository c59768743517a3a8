//! Game state and the cycle-step transition function.
//!
//! Action model: an idle unit is assigned an action at cycle `c`; the action
//! registers with `busy_until = c + duration` and resolves during the advance
//! that moves the clock to that cycle. Resolution within one cycle:
//!
//! 1. attacks are gathered against pre-resolution positions, damage is summed;
//! 2. moves, productions, harvests, and returns resolve in ascending acting
//!    unit id with incrementally updated occupancy, so cell conflicts go to
//!    the lowest id and later claims cancel to idle;
//! 3. gathered damage lands simultaneously, then dead units are removed
//!    (mutual kills are possible).
//!
//! Production costs are deducted when the action registers; a production that
//! completes onto an occupied cell cancels and refunds its cost.

use super::stats::{UnitTypeSpec, UnitTypeTable};
use super::{Dir, EndReason, GameResult, MapSpec, Player, Pos, ResourcePile, UnitKind, Winner};
use serde::{Deserialize, Serialize};
use std::sync::Arc;
use thiserror::Error;

pub type UnitId = u32;

/// Action verbs. `Harvest` names the pile cell, `Produce` the spawned kind
/// and the placement direction relative to the producer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verb {
    Idle,
    Move(Dir),
    Attack(UnitId),
    Harvest(Pos),
    Return,
    Produce(UnitKind, Dir),
}

/// One unit's assigned action, with its duration in cycles.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitAction {
    pub unit_id: UnitId,
    pub verb: Verb,
    pub duration: u32,
}

/// A player's simultaneous assignment for its idle units this cycle.
pub type JointAction = Vec<UnitAction>;

/// Duration of `verb` when performed by a unit with stats `spec`.
pub fn action_duration(spec: &UnitTypeSpec, verb: &Verb) -> u32 {
    match verb {
        Verb::Idle => 1,
        Verb::Move(_) => spec.move_period,
        Verb::Attack(_) => spec.attack_period,
        Verb::Harvest(_) | Verb::Return => spec.move_period,
        Verb::Produce(_, _) => spec.produce_period,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Unit {
    pub id: UnitId,
    pub owner: Player,
    pub kind: UnitKind,
    pub pos: Pos,
    pub hp: i32,
    pub carried: u32,
    pub busy_until: u32,
    pub current_action: Option<Verb>,
}

impl Unit {
    pub fn is_idle(&self) -> bool {
        self.current_action.is_none()
    }
}

/// Legal choices for one idle unit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitChoices {
    pub unit_id: UnitId,
    pub actions: Vec<UnitAction>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ActionError {
    #[error("unit {unit} does not exist")]
    NoSuchUnit { unit: UnitId },
    #[error("unit {unit} belongs to the other player")]
    WrongOwner { unit: UnitId },
    #[error("unit {unit} is busy until cycle {busy_until}")]
    Busy { unit: UnitId, busy_until: u32 },
    #[error("unit {unit} was assigned twice")]
    DuplicateAssignment { unit: UnitId },
    #[error("unit {unit}: illegal {verb:?}: {why}")]
    Illegal {
        unit: UnitId,
        verb: Verb,
        why: String,
    },
    #[error("unit {unit}: {verb:?} duration {given} does not match the unit's period {expected}")]
    WrongDuration {
        unit: UnitId,
        verb: Verb,
        given: u32,
        expected: u32,
    },
    #[error("game is already over")]
    GameOver,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StateError {
    #[error("state dimensions must be within 8..=64, found {width}x{height}")]
    Dimensions { width: i32, height: i32 },
    #[error("cell ({x}, {y}) is out of bounds")]
    OutOfBounds { x: i32, y: i32 },
    #[error("cell ({x}, {y}) is claimed twice")]
    Occupancy { x: i32, y: i32 },
    #[error("unit ids must be strictly ascending at id {id}")]
    IdOrder { id: UnitId },
    #[error("unit {id} hp {hp} outside 1..={max_hp}")]
    HpRange { id: UnitId, hp: i32, max_hp: i32 },
    #[error("unit {id} carries resources but cannot harvest")]
    BadCarried { id: UnitId },
    #[error("unit {id} has an action with a completion cycle in the past")]
    StaleAction { id: UnitId },
}

/// Full observable game state. A value type: `advance` returns the successor.
#[derive(Clone, Debug, PartialEq)]
pub struct GameState {
    cycle: u32,
    width: i32,
    height: i32,
    units: Vec<Unit>, // ascending id
    piles: Vec<ResourcePile>,
    player_resources: [u32; 2],
    free_resources: u32,
    max_cycles: u32,
    next_unit_id: UnitId,
    stats: Arc<UnitTypeTable>,
}

impl GameState {
    /// Initial state of a map. Unit ids follow map declaration order.
    pub fn new(map: &MapSpec, stats: Arc<UnitTypeTable>, max_cycles: u32) -> GameState {
        let units = map
            .initial_units
            .iter()
            .enumerate()
            .map(|(i, u)| Unit {
                id: i as UnitId,
                owner: u.owner,
                kind: u.kind,
                pos: u.pos,
                hp: stats.get(u.kind).max_hp,
                carried: 0,
                busy_until: 0,
                current_action: None,
            })
            .collect::<Vec<_>>();
        let free_resources = map.resource_piles.iter().map(|p| p.amount).sum();
        GameState {
            cycle: 0,
            width: map.width,
            height: map.height,
            units,
            piles: map.resource_piles.clone(),
            player_resources: [0, 0],
            free_resources,
            max_cycles,
            next_unit_id: map.initial_units.len() as UnitId,
            stats,
        }
    }

    /// Rebuilds a state from raw parts (snapshot loading, hand-built test
    /// positions), validating the engine's structural invariants.
    pub fn from_parts(
        width: i32,
        height: i32,
        cycle: u32,
        max_cycles: u32,
        units: Vec<Unit>,
        piles: Vec<ResourcePile>,
        player_resources: [u32; 2],
        stats: Arc<UnitTypeTable>,
    ) -> Result<GameState, StateError> {
        if !(8..=64).contains(&width) || !(8..=64).contains(&height) {
            return Err(StateError::Dimensions { width, height });
        }
        let mut seen_cells: Vec<Pos> = Vec::new();
        let mut claim = |pos: Pos| -> Result<(), StateError> {
            if pos.x < 0 || pos.y < 0 || pos.x >= width || pos.y >= height {
                return Err(StateError::OutOfBounds { x: pos.x, y: pos.y });
            }
            if seen_cells.contains(&pos) {
                return Err(StateError::Occupancy { x: pos.x, y: pos.y });
            }
            seen_cells.push(pos);
            Ok(())
        };
        let mut max_id = None;
        for unit in &units {
            if let Some(prev) = max_id {
                if unit.id <= prev {
                    return Err(StateError::IdOrder { id: unit.id });
                }
            }
            max_id = Some(unit.id);
            claim(unit.pos)?;
            let spec = stats.get(unit.kind);
            if unit.hp < 1 || unit.hp > spec.max_hp {
                return Err(StateError::HpRange {
                    id: unit.id,
                    hp: unit.hp,
                    max_hp: spec.max_hp,
                });
            }
            if unit.carried > 0 && spec.harvest_amount == 0 {
                return Err(StateError::BadCarried { id: unit.id });
            }
            if unit.current_action.is_some() && unit.busy_until <= cycle {
                return Err(StateError::StaleAction { id: unit.id });
            }
        }
        for pile in &piles {
            claim(pile.pos)?;
        }
        let free_resources = piles.iter().map(|p| p.amount).sum();
        let next_unit_id = max_id.map_or(0, |m| m + 1);
        Ok(GameState {
            cycle,
            width,
            height,
            units,
            piles,
            player_resources,
            free_resources,
            max_cycles,
            next_unit_id,
            stats,
        })
    }

    pub fn cycle(&self) -> u32 {
        self.cycle
    }

    pub fn width(&self) -> i32 {
        self.width
    }

    pub fn height(&self) -> i32 {
        self.height
    }

    pub fn max_cycles(&self) -> u32 {
        self.max_cycles
    }

    pub fn stats(&self) -> &Arc<UnitTypeTable> {
        &self.stats
    }

    pub fn units(&self) -> &[Unit] {
        &self.units
    }

    pub fn unit(&self, id: UnitId) -> Option<&Unit> {
        self.units
            .binary_search_by_key(&id, |u| u.id)
            .ok()
            .map(|i| &self.units[i])
    }

    pub fn units_of(&self, player: Player) -> impl Iterator<Item = &Unit> {
        self.units.iter().filter(move |u| u.owner == player)
    }

    pub fn piles(&self) -> &[ResourcePile] {
        &self.piles
    }

    pub fn player_resources(&self, player: Player) -> u32 {
        self.player_resources[player.index()]
    }

    /// Sum of all remaining pile amounts.
    pub fn free_resources(&self) -> u32 {
        self.free_resources
    }

    pub fn in_bounds(&self, pos: Pos) -> bool {
        pos.x >= 0 && pos.y >= 0 && pos.x < self.width && pos.y < self.height
    }

    /// True if a unit or a resource pile sits on `pos`.
    pub fn is_occupied(&self, pos: Pos) -> bool {
        self.units.iter().any(|u| u.pos == pos) || self.piles.iter().any(|p| p.pos == pos)
    }

    pub fn has_idle_units(&self, player: Player) -> bool {
        self.units
            .iter()
            .any(|u| u.owner == player && u.is_idle())
    }

    pub(crate) fn units_mut(&mut self) -> &mut [Unit] {
        &mut self.units
    }

    pub(crate) fn piles_mut(&mut self) -> &mut [ResourcePile] {
        &mut self.piles
    }

    pub(crate) fn swap_player_resources(&mut self) {
        self.player_resources.swap(0, 1);
    }

    fn occupancy(&self) -> Grid {
        let mut grid = Grid::new(self.width, self.height);
        for u in &self.units {
            grid.set(u.pos);
        }
        for p in &self.piles {
            grid.set(p.pos);
        }
        grid
    }

    /// Legal action choices per idle unit of `player`, ascending unit id.
    /// IDLE is always available; other verbs appear when their preconditions
    /// hold against the current state.
    pub fn legal_actions(&self, player: Player) -> Vec<UnitChoices> {
        let occupied = self.occupancy();
        let mut out = Vec::new();
        for unit in self.units.iter().filter(|u| u.owner == player && u.is_idle()) {
            let spec = self.stats.get(unit.kind);
            let mut actions = Vec::new();
            let mut push = |verb: Verb| {
                actions.push(UnitAction {
                    unit_id: unit.id,
                    verb,
                    duration: action_duration(spec, &verb),
                })
            };

            if spec.attack_damage > 0 {
                for target in &self.units {
                    if target.owner != player
                        && unit.pos.manhattan(target.pos) <= spec.attack_range
                    {
                        push(Verb::Attack(target.id));
                    }
                }
            }
            if spec.harvest_amount > 0 && unit.carried == 0 {
                for pile in &self.piles {
                    if pile.amount > 0 && unit.pos.manhattan(pile.pos) == 1 {
                        push(Verb::Harvest(pile.pos));
                    }
                }
            }
            if unit.carried > 0
                && self.units.iter().any(|b| {
                    b.owner == player
                        && b.kind == UnitKind::MainBase
                        && unit.pos.manhattan(b.pos) == 1
                })
            {
                push(Verb::Return);
            }
            for &kind in &spec.produces {
                if self.player_resources[player.index()] >= self.stats.get(kind).cost {
                    for dir in Dir::ALL {
                        let target = unit.pos.step(dir);
                        if self.in_bounds(target) && !occupied.get(target) {
                            push(Verb::Produce(kind, dir));
                        }
                    }
                }
            }
            if spec.can_move {
                for dir in Dir::ALL {
                    let target = unit.pos.step(dir);
                    if self.in_bounds(target) && !occupied.get(target) {
                        push(Verb::Move(dir));
                    }
                }
            }
            push(Verb::Idle);
            out.push(UnitChoices {
                unit_id: unit.id,
                actions,
            });
        }
        out
    }

    /// Applies both players' assignments, advances the clock one cycle, and
    /// resolves every action whose completion cycle has been reached.
    pub fn advance(&self, joint: &[JointAction; 2]) -> Result<GameState, ActionError> {
        if self.winner().is_some() {
            return Err(ActionError::GameOver);
        }
        let mut next = self.clone();
        for player in Player::BOTH {
            next.register(player, &joint[player.index()])?;
        }
        next.cycle += 1;
        next.resolve();
        Ok(next)
    }

    /// Winner if the game is over: a player wins when the opponent has no
    /// units; the cycle cap forces a draw. Elimination takes precedence.
    pub fn winner(&self) -> Option<GameResult> {
        let count0 = self.units_of(Player::P0).count();
        let count1 = self.units_of(Player::P1).count();
        match (count0 == 0, count1 == 0) {
            (true, true) => Some(GameResult {
                winner: Winner::Draw,
                end_cycle: self.cycle,
                reason: EndReason::Elimination,
            }),
            (false, true) => Some(GameResult {
                winner: Winner::P0,
                end_cycle: self.cycle,
                reason: EndReason::Elimination,
            }),
            (true, false) => Some(GameResult {
                winner: Winner::P1,
                end_cycle: self.cycle,
                reason: EndReason::Elimination,
            }),
            (false, false) if self.cycle >= self.max_cycles => Some(GameResult {
                winner: Winner::Draw,
                end_cycle: self.max_cycles,
                reason: EndReason::CycleCap,
            }),
            _ => None,
        }
    }

    fn register(&mut self, player: Player, actions: &JointAction) -> Result<(), ActionError> {
        let mut seen: Vec<UnitId> = Vec::with_capacity(actions.len());
        for action in actions {
            let idx = self
                .units
                .binary_search_by_key(&action.unit_id, |u| u.id)
                .map_err(|_| ActionError::NoSuchUnit { unit: action.unit_id })?;
            if self.units[idx].owner != player {
                return Err(ActionError::WrongOwner { unit: action.unit_id });
            }
            if !self.units[idx].is_idle() {
                return Err(ActionError::Busy {
                    unit: action.unit_id,
                    busy_until: self.units[idx].busy_until,
                });
            }
            if seen.contains(&action.unit_id) {
                return Err(ActionError::DuplicateAssignment { unit: action.unit_id });
            }
            seen.push(action.unit_id);
            self.check_legal(idx, action)?;

            if let Verb::Produce(kind, _) = action.verb {
                // Cost is committed up front; a cancelled completion refunds it.
                self.player_resources[player.index()] -= self.stats.get(kind).cost;
            }
            let unit = &mut self.units[idx];
            unit.current_action = Some(action.verb);
            unit.busy_until = self.cycle + action.duration;
        }
        Ok(())
    }

    fn check_legal(&self, idx: usize, action: &UnitAction) -> Result<(), ActionError> {
        let unit = &self.units[idx];
        let spec = self.stats.get(unit.kind);
        let expected = action_duration(spec, &action.verb);
        if action.duration != expected {
            return Err(ActionError::WrongDuration {
                unit: unit.id,
                verb: action.verb,
                given: action.duration,
                expected,
            });
        }
        let illegal = |why: &str| ActionError::Illegal {
            unit: unit.id,
            verb: action.verb,
            why: why.to_string(),
        };
        match action.verb {
            Verb::Idle => Ok(()),
            Verb::Move(dir) => {
                if !spec.can_move {
                    return Err(illegal("unit cannot move"));
                }
                let target = unit.pos.step(dir);
                if !self.in_bounds(target) {
                    return Err(illegal("target cell out of bounds"));
                }
                if self.is_occupied(target) {
                    return Err(illegal("target cell occupied"));
                }
                Ok(())
            }
            Verb::Attack(target_id) => {
                if spec.attack_damage == 0 {
                    return Err(illegal("unit cannot attack"));
                }
                let target = self
                    .unit(target_id)
                    .ok_or_else(|| illegal("no such target"))?;
                if target.owner == unit.owner {
                    return Err(illegal("target is friendly"));
                }
                if unit.pos.manhattan(target.pos) > spec.attack_range {
                    return Err(illegal("target out of range"));
                }
                Ok(())
            }
            Verb::Harvest(pile_pos) => {
                if spec.harvest_amount == 0 {
                    return Err(illegal("unit cannot harvest"));
                }
                if unit.carried > 0 {
                    return Err(illegal("already carrying"));
                }
                if unit.pos.manhattan(pile_pos) != 1 {
                    return Err(illegal("pile not adjacent"));
                }
                match self.piles.iter().find(|p| p.pos == pile_pos) {
                    Some(p) if p.amount > 0 => Ok(()),
                    _ => Err(illegal("no resources at pile cell")),
                }
            }
            Verb::Return => {
                if unit.carried == 0 {
                    return Err(illegal("nothing carried"));
                }
                let near_base = self.units.iter().any(|b| {
                    b.owner == unit.owner
                        && b.kind == UnitKind::MainBase
                        && unit.pos.manhattan(b.pos) == 1
                });
                if near_base {
                    Ok(())
                } else {
                    Err(illegal("no friendly base adjacent"))
                }
            }
            Verb::Produce(kind, dir) => {
                if !spec.produces.contains(&kind) {
                    return Err(illegal("unit cannot produce that kind"));
                }
                if self.player_resources[unit.owner.index()] < self.stats.get(kind).cost {
                    return Err(illegal("insufficient resources"));
                }
                let target = unit.pos.step(dir);
                if !self.in_bounds(target) {
                    return Err(illegal("target cell out of bounds"));
                }
                if self.is_occupied(target) {
                    return Err(illegal("target cell occupied"));
                }
                Ok(())
            }
        }
    }

    fn resolve(&mut self) {
        let due: Vec<usize> = (0..self.units.len())
            .filter(|&i| self.units[i].current_action.is_some() && self.units[i].busy_until <= self.cycle)
            .collect();
        if due.is_empty() {
            return;
        }

        // Phase 1: gather attack damage against pre-resolution positions.
        let mut damage = vec![0i32; self.units.len()];
        for &i in &due {
            if let Some(Verb::Attack(target_id)) = self.units[i].current_action {
                let attacker = &self.units[i];
                let spec = self.stats.get(attacker.kind);
                if let Ok(t) = self.units.binary_search_by_key(&target_id, |u| u.id) {
                    if attacker.pos.manhattan(self.units[t].pos) <= spec.attack_range {
                        damage[t] += spec.attack_damage;
                    }
                }
            }
        }

        // Phase 2: spatial effects in ascending acting-unit id.
        let mut occupied = self.occupancy();
        let mut spawned: Vec<Unit> = Vec::new();
        for &i in &due {
            let verb = self.units[i].current_action.expect("due actions are set");
            match verb {
                Verb::Idle | Verb::Attack(_) => {}
                Verb::Move(dir) => {
                    let from = self.units[i].pos;
                    let target = from.step(dir);
                    if self.in_bounds(target) && !occupied.get(target) {
                        occupied.clear(from);
                        occupied.set(target);
                        self.units[i].pos = target;
                    }
                }
                Verb::Harvest(pile_pos) => {
                    let spec_amount = self.stats.get(self.units[i].kind).harvest_amount;
                    if self.units[i].carried == 0 && self.units[i].pos.manhattan(pile_pos) == 1 {
                        if let Some(pile) = self.piles.iter_mut().find(|p| p.pos == pile_pos) {
                            let taken = spec_amount.min(pile.amount);
                            pile.amount -= taken;
                            self.units[i].carried += taken;
                        }
                    }
                }
                Verb::Return => {
                    let unit_pos = self.units[i].pos;
                    let owner = self.units[i].owner;
                    let near_base = self.units.iter().any(|b| {
                        b.owner == owner
                            && b.kind == UnitKind::MainBase
                            && unit_pos.manhattan(b.pos) == 1
                    });
                    if near_base {
                        self.player_resources[owner.index()] += self.units[i].carried;
                        self.units[i].carried = 0;
                    }
                }
                Verb::Produce(kind, dir) => {
                    let target = self.units[i].pos.step(dir);
                    let owner = self.units[i].owner;
                    if self.in_bounds(target) && !occupied.get(target) {
                        occupied.set(target);
                        spawned.push(Unit {
                            id: self.next_unit_id,
                            owner,
                            kind,
                            pos: target,
                            hp: self.stats.get(kind).max_hp,
                            carried: 0,
                            busy_until: self.cycle,
                            current_action: None,
                        });
                        self.next_unit_id += 1;
                    } else {
                        // Blocked completion: cancel and refund.
                        self.player_resources[owner.index()] += self.stats.get(kind).cost;
                    }
                }
            }
            self.units[i].current_action = None;
        }

        // Phase 3: damage lands simultaneously; the fallen are removed.
        for (i, dmg) in damage.iter().enumerate() {
            self.units[i].hp -= dmg;
        }
        self.units.retain(|u| u.hp > 0);
        self.units.extend(spawned);
        self.units.sort_by_key(|u| u.id);
        self.piles.retain(|p| p.amount > 0);
        self.free_resources = self.piles.iter().map(|p| p.amount).sum();
    }
}

struct Grid {
    width: i32,
    cells: Vec<bool>,
}

impl Grid {
    fn new(width: i32, height: i32) -> Grid {
        Grid {
            width,
            cells: vec![false; (width * height) as usize],
        }
    }

    fn idx(&self, pos: Pos) -> usize {
        (pos.y * self.width + pos.x) as usize
    }

    fn get(&self, pos: Pos) -> bool {
        self.cells[self.idx(pos)]
    }

    fn set(&mut self, pos: Pos) {
        let i = self.idx(pos);
        self.cells[i] = true;
    }

    fn clear(&mut self, pos: Pos) {
        let i = self.idx(pos);
        self.cells[i] = false;
    }
}
