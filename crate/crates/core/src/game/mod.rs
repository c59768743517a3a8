//! Deterministic, fully observable grid-combat game model.
//!
//! Two players command units on a rectangular grid. Actions are durative and
//! simultaneous: an assigned action occupies its unit for a fixed number of
//! cycles and resolves when the clock reaches its completion cycle. All
//! resolution rules are tie-broken deterministically (lowest unit id wins),
//! so a game is a pure function of the map, the unit-stat table, and the
//! action stream.

mod map;
mod mirror;
mod playout;
mod stats;
mod state;

pub use map::{builtin_map, load_map, InitialUnit, MapError, MapSpec, ResourcePile};
pub use mirror::{mirror_joint_action, mirror_state, states_mirror_equal};
pub use playout::{run_playout, run_playout_observed, run_script_playout, Policy};
pub use stats::{load_stats, StatsError, UnitTypeSpec, UnitTypeTable};
pub use state::{
    action_duration, ActionError, GameState, JointAction, StateError, Unit, UnitAction,
    UnitChoices, UnitId, Verb,
};

use serde::{Deserialize, Serialize};

/// One of the two competing sides.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Player {
    P0,
    P1,
}

impl Player {
    pub const BOTH: [Player; 2] = [Player::P0, Player::P1];

    pub fn opponent(self) -> Player {
        match self {
            Player::P0 => Player::P1,
            Player::P1 => Player::P0,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Player::P0 => 0,
            Player::P1 => 1,
        }
    }

    pub fn from_index(i: usize) -> Player {
        match i {
            0 => Player::P0,
            1 => Player::P1,
            _ => panic!("player index out of range: {i}"),
        }
    }
}

impl std::fmt::Display for Player {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "P{}", self.index())
    }
}

/// Grid cell. `x` grows east, `y` grows south; (0, 0) is the north-west corner.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Pos {
    pub x: i32,
    pub y: i32,
}

impl Pos {
    pub fn new(x: i32, y: i32) -> Pos {
        Pos { x, y }
    }

    pub fn manhattan(self, other: Pos) -> u32 {
        self.x.abs_diff(other.x) + self.y.abs_diff(other.y)
    }

    pub fn step(self, dir: Dir) -> Pos {
        let (dx, dy) = dir.offset();
        Pos::new(self.x + dx, self.y + dy)
    }
}

/// Cardinal direction. The canonical tie-break order is N, E, S, W.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Dir {
    N,
    E,
    S,
    W,
}

impl Dir {
    pub const ALL: [Dir; 4] = [Dir::N, Dir::E, Dir::S, Dir::W];

    pub fn offset(self) -> (i32, i32) {
        match self {
            Dir::N => (0, -1),
            Dir::E => (1, 0),
            Dir::S => (0, 1),
            Dir::W => (-1, 0),
        }
    }

    /// Direction after a 180-degree rotation of the board.
    pub fn mirrored(self) -> Dir {
        match self {
            Dir::N => Dir::S,
            Dir::E => Dir::W,
            Dir::S => Dir::N,
            Dir::W => Dir::E,
        }
    }
}

/// The six unit kinds. The declaration order is the canonical component order
/// used by evaluation breakdowns and weight vectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum UnitKind {
    #[serde(rename = "MAINBASE")]
    MainBase,
    #[serde(rename = "RAX")]
    Rax,
    #[serde(rename = "WORKER")]
    Worker,
    #[serde(rename = "LIGHT")]
    Light,
    #[serde(rename = "RANGE")]
    Range,
    #[serde(rename = "HEAVY")]
    Heavy,
}

impl UnitKind {
    pub const ALL: [UnitKind; 6] = [
        UnitKind::MainBase,
        UnitKind::Rax,
        UnitKind::Worker,
        UnitKind::Light,
        UnitKind::Range,
        UnitKind::Heavy,
    ];

    pub fn index(self) -> usize {
        match self {
            UnitKind::MainBase => 0,
            UnitKind::Rax => 1,
            UnitKind::Worker => 2,
            UnitKind::Light => 3,
            UnitKind::Range => 4,
            UnitKind::Heavy => 5,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            UnitKind::MainBase => "MAINBASE",
            UnitKind::Rax => "RAX",
            UnitKind::Worker => "WORKER",
            UnitKind::Light => "LIGHT",
            UnitKind::Range => "RANGE",
            UnitKind::Heavy => "HEAVY",
        }
    }

    pub fn from_name(name: &str) -> Option<UnitKind> {
        UnitKind::ALL.iter().copied().find(|k| k.name() == name)
    }

    /// Mobile kinds are the ones Lanchester's attrition factor applies to.
    pub fn is_mobile_class(self) -> bool {
        matches!(
            self,
            UnitKind::Worker | UnitKind::Light | UnitKind::Range | UnitKind::Heavy
        )
    }
}

/// Final outcome of a finished game.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameResult {
    pub winner: Winner,
    pub end_cycle: u32,
    pub reason: EndReason,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Winner {
    P0,
    P1,
    Draw,
}

impl Winner {
    pub fn from_player(p: Player) -> Winner {
        match p {
            Player::P0 => Winner::P0,
            Player::P1 => Winner::P1,
        }
    }

    /// Tournament points for the given seat: win 1, draw 0.5, loss 0.
    pub fn points_for(self, p: Player) -> f64 {
        match (self, p) {
            (Winner::Draw, _) => 0.5,
            (Winner::P0, Player::P0) | (Winner::P1, Player::P1) => 1.0,
            _ => 0.0,
        }
    }
}

impl std::fmt::Display for Winner {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Winner::P0 => write!(f, "P0"),
            Winner::P1 => write!(f, "P1"),
            Winner::Draw => write!(f, "DRAW"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EndReason {
    Elimination,
    CycleCap,
}

impl std::fmt::Display for EndReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EndReason::Elimination => write!(f, "ELIMINATION"),
            EndReason::CycleCap => write!(f, "CYCLE_CAP"),
        }
    }
}
