//! Map documents: grid dimensions, neutral resource piles, initial units.

use super::{Player, Pos, UnitKind};
use serde::Deserialize;
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapSpec {
    pub width: i32,
    pub height: i32,
    pub resource_piles: Vec<ResourcePile>,
    pub initial_units: Vec<InitialUnit>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, Deserialize)]
pub struct ResourcePile {
    pub pos: Pos,
    pub amount: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InitialUnit {
    pub owner: Player,
    pub kind: UnitKind,
    pub pos: Pos,
}

#[derive(Debug, Error)]
pub enum MapError {
    #[error("map parse error: {0}")]
    Parse(String),
    #[error("map schema must be 1, found {0}")]
    Schema(u64),
    #[error("map dimensions must be within 8..=64, found {width}x{height}")]
    Dimensions { width: i32, height: i32 },
    #[error("{what} at ({x}, {y}) is out of bounds")]
    OutOfBounds { what: &'static str, x: i32, y: i32 },
    #[error("two map entries occupy ({x}, {y})")]
    Overlap { x: i32, y: i32 },
    #[error("unit owner must be 0 or 1, found {0}")]
    BadOwner(u64),
    #[error("resource pile at ({x}, {y}) must hold at least 1")]
    EmptyPile { x: i32, y: i32 },
    #[error("unknown builtin map {0:?} (expected m1, m2, or m3)")]
    UnknownBuiltin(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MapFile {
    schema: u64,
    width: i32,
    height: i32,
    #[serde(default)]
    resources: Vec<PileEntry>,
    #[serde(default)]
    units: Vec<UnitEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PileEntry {
    x: i32,
    y: i32,
    amount: u32,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct UnitEntry {
    owner: u64,
    kind: UnitKind,
    x: i32,
    y: i32,
}

/// Parses and validates a map document.
pub fn load_map(text: &str) -> Result<MapSpec, MapError> {
    let file: MapFile = serde_json::from_str(text).map_err(|e| MapError::Parse(e.to_string()))?;
    if file.schema != 1 {
        return Err(MapError::Schema(file.schema));
    }
    if !(8..=64).contains(&file.width) || !(8..=64).contains(&file.height) {
        return Err(MapError::Dimensions {
            width: file.width,
            height: file.height,
        });
    }
    let in_bounds = |p: Pos| p.x >= 0 && p.y >= 0 && p.x < file.width && p.y < file.height;
    let mut occupied: Vec<Pos> = Vec::new();
    let mut claim = |p: Pos| -> Result<(), MapError> {
        if occupied.contains(&p) {
            return Err(MapError::Overlap { x: p.x, y: p.y });
        }
        occupied.push(p);
        Ok(())
    };

    let mut resource_piles = Vec::new();
    for pile in &file.resources {
        let pos = Pos::new(pile.x, pile.y);
        if !in_bounds(pos) {
            return Err(MapError::OutOfBounds {
                what: "resource pile",
                x: pos.x,
                y: pos.y,
            });
        }
        if pile.amount == 0 {
            return Err(MapError::EmptyPile { x: pos.x, y: pos.y });
        }
        claim(pos)?;
        resource_piles.push(ResourcePile { pos, amount: pile.amount });
    }

    let mut initial_units = Vec::new();
    for unit in &file.units {
        let pos = Pos::new(unit.x, unit.y);
        if !in_bounds(pos) {
            return Err(MapError::OutOfBounds {
                what: "unit",
                x: pos.x,
                y: pos.y,
            });
        }
        let owner = match unit.owner {
            0 => Player::P0,
            1 => Player::P1,
            other => return Err(MapError::BadOwner(other)),
        };
        claim(pos)?;
        initial_units.push(InitialUnit {
            owner,
            kind: unit.kind,
            pos,
        });
    }

    Ok(MapSpec {
        width: file.width,
        height: file.height,
        resource_piles,
        initial_units,
    })
}

/// The three bundled benchmark maps: `m1` 16x16, `m2` 24x24, `m3` 32x32.
/// Each is mirror-symmetric under 180-degree rotation.
pub fn builtin_map(name: &str) -> Result<MapSpec, MapError> {
    let text = match name {
        "m1" => include_str!("../../assets/m1.json"),
        "m2" => include_str!("../../assets/m2.json"),
        "m3" => include_str!("../../assets/m3.json"),
        other => return Err(MapError::UnknownBuiltin(other.to_string())),
    };
    load_map(text)
}
