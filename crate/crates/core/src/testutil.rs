//! Shared helpers for in-crate unit tests.

use crate::game::{GameState, Player, Pos, ResourcePile, Unit, UnitKind, UnitTypeTable};

/// Builds a 16x16 state with default stats from terse unit descriptions:
/// `(owner, kind, (x, y), hp, carried)`. Pass `hp = 0` for full health.
pub fn state_with(
    units: &[(Player, UnitKind, (i32, i32), i32, u32)],
    player_resources: [u32; 2],
    piles: &[((i32, i32), u32)],
) -> GameState {
    let stats = UnitTypeTable::default_table();
    let units = units
        .iter()
        .enumerate()
        .map(|(i, &(owner, kind, (x, y), hp, carried))| Unit {
            id: i as u32,
            owner,
            kind,
            pos: Pos::new(x, y),
            hp: if hp == 0 { stats.get(kind).max_hp } else { hp },
            carried,
            busy_until: 0,
            current_action: None,
        })
        .collect();
    let piles = piles
        .iter()
        .map(|&((x, y), amount)| ResourcePile {
            pos: Pos::new(x, y),
            amount,
        })
        .collect();
    GameState::from_parts(16, 16, 0, 10_000, units, piles, player_resources, stats)
        .expect("test state must be valid")
}

/// Relative closeness: |a - b| <= tol * max(1, |a|, |b|).
pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * 1.0_f64.max(a.abs()).max(b.abs())
}
