//! Per-kind unit statistics, loadable from JSON so tests can substitute
//! small synthetic tables.

use super::UnitKind;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};
use thiserror::Error;

/// Static properties of one unit kind. Action durations come from the acting
/// unit's period for the verb: MOVE, HARVEST, and RETURN take `move_period`
/// cycles, ATTACK takes `attack_period`, PRODUCE takes `produce_period`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitTypeSpec {
    pub kind: UnitKind,
    pub cost: u32,
    pub max_hp: i32,
    pub attack_damage: i32,
    pub attack_range: u32,
    pub move_period: u32,
    pub attack_period: u32,
    pub produce_period: u32,
    pub harvest_amount: u32,
    pub can_move: bool,
    pub produces: Vec<UnitKind>,
}

/// Complete stat table, one spec per kind.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitTypeTable {
    specs: [UnitTypeSpec; 6],
}

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("unit stats parse error: {0}")]
    Parse(String),
    #[error("unit stats schema must be 1, found {0}")]
    Schema(u64),
    #[error("unit stats missing kind {0}")]
    MissingKind(&'static str),
    #[error("unit stats has unknown kind {0:?}")]
    UnknownKind(String),
    #[error("invalid stats for {kind}: {what}")]
    Invalid { kind: &'static str, what: String },
}

impl UnitTypeTable {
    /// Builds a table from one spec per kind, in any order.
    pub fn from_specs(mut specs: Vec<UnitTypeSpec>) -> Result<UnitTypeTable, StatsError> {
        specs.sort_by_key(|s| s.kind.index());
        for kind in UnitKind::ALL {
            if !specs.iter().any(|s| s.kind == kind) {
                return Err(StatsError::MissingKind(kind.name()));
            }
        }
        if specs.len() != 6 {
            return Err(StatsError::Parse("duplicate kind entries".into()));
        }
        let table = UnitTypeTable {
            specs: specs.try_into().expect("six specs"),
        };
        table.validate()?;
        Ok(table)
    }

    pub fn get(&self, kind: UnitKind) -> &UnitTypeSpec {
        &self.specs[kind.index()]
    }

    pub fn specs(&self) -> &[UnitTypeSpec; 6] {
        &self.specs
    }

    /// The bundled default table, parsed once from the embedded asset.
    pub fn default_table() -> Arc<UnitTypeTable> {
        static TABLE: OnceLock<Arc<UnitTypeTable>> = OnceLock::new();
        TABLE
            .get_or_init(|| {
                Arc::new(load_stats(DEFAULT_STATS_JSON).expect("embedded stats table is valid"))
            })
            .clone()
    }

    fn validate(&self) -> Result<(), StatsError> {
        for spec in &self.specs {
            let kind = spec.kind.name();
            let fail = |what: &str| StatsError::Invalid {
                kind,
                what: what.to_string(),
            };
            if spec.cost == 0 {
                return Err(fail("cost must be >= 1"));
            }
            if spec.max_hp < 1 {
                return Err(fail("max_hp must be >= 1"));
            }
            if spec.can_move && spec.move_period == 0 {
                return Err(fail("mobile kinds need move_period >= 1"));
            }
            if spec.attack_damage > 0 && spec.attack_period == 0 {
                return Err(fail("armed kinds need attack_period >= 1"));
            }
            if !spec.produces.is_empty() && spec.produce_period == 0 {
                return Err(fail("producer kinds need produce_period >= 1"));
            }
        }
        let base = self.get(UnitKind::MainBase);
        if base.produces != vec![UnitKind::Worker] {
            return Err(StatsError::Invalid {
                kind: "MAINBASE",
                what: "must produce exactly [WORKER]".into(),
            });
        }
        let rax = self.get(UnitKind::Rax);
        let combat = [UnitKind::Light, UnitKind::Range, UnitKind::Heavy];
        if rax.produces.len() != 3 || !combat.iter().all(|k| rax.produces.contains(k)) {
            return Err(StatsError::Invalid {
                kind: "RAX",
                what: "must produce exactly {LIGHT, RANGE, HEAVY}".into(),
            });
        }
        Ok(())
    }
}

pub const DEFAULT_STATS_JSON: &str = include_str!("../../assets/unit_stats.json");

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecEntry {
    cost: u32,
    max_hp: i32,
    attack_damage: i32,
    attack_range: u32,
    move_period: u32,
    attack_period: u32,
    produce_period: u32,
    harvest_amount: u32,
    can_move: bool,
    produces: Vec<UnitKind>,
}

#[derive(Deserialize)]
struct StatsFile {
    schema: u64,
    #[serde(flatten)]
    kinds: BTreeMap<String, SpecEntry>,
}

/// Parses a stats file: `{"schema": 1, "<KIND>": {fields...}, ...}`.
pub fn load_stats(text: &str) -> Result<UnitTypeTable, StatsError> {
    let file: StatsFile = serde_json::from_str(text).map_err(|e| StatsError::Parse(e.to_string()))?;
    if file.schema != 1 {
        return Err(StatsError::Schema(file.schema));
    }
    let mut specs = Vec::new();
    for (name, entry) in file.kinds {
        let kind = UnitKind::from_name(&name).ok_or(StatsError::UnknownKind(name))?;
        specs.push(UnitTypeSpec {
            kind,
            cost: entry.cost,
            max_hp: entry.max_hp,
            attack_damage: entry.attack_damage,
            attack_range: entry.attack_range,
            move_period: entry.move_period,
            attack_period: entry.attack_period,
            produce_period: entry.produce_period,
            harvest_amount: entry.harvest_amount,
            can_move: entry.can_move,
            produces: entry.produces,
        });
    }
    UnitTypeTable::from_specs(specs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_table_parses_and_validates() {
        let table = UnitTypeTable::default_table();
        assert_eq!(table.get(UnitKind::MainBase).max_hp, 10);
        assert_eq!(table.get(UnitKind::MainBase).cost, 10);
        assert_eq!(table.get(UnitKind::Rax).cost, 5);
        assert_eq!(table.get(UnitKind::Worker).max_hp, 1);
        assert_eq!(table.get(UnitKind::Light).attack_damage, 2);
        assert_eq!(table.get(UnitKind::Range).attack_range, 3);
        assert_eq!(table.get(UnitKind::Heavy).max_hp, 8);
        assert_eq!(table.get(UnitKind::Heavy).cost, 3);
    }

    #[test]
    fn rejects_wrong_schema() {
        let text = DEFAULT_STATS_JSON.replacen("\"schema\": 1", "\"schema\": 2", 1);
        assert!(matches!(load_stats(&text), Err(StatsError::Schema(2))));
    }

    #[test]
    fn rejects_missing_kind() {
        let v: serde_json::Value = serde_json::from_str(DEFAULT_STATS_JSON).unwrap();
        let mut map = v.as_object().unwrap().clone();
        map.remove("HEAVY");
        let text = serde_json::to_string(&map).unwrap();
        assert!(matches!(load_stats(&text), Err(StatsError::MissingKind("HEAVY"))));
    }

    #[test]
    fn rejects_immobile_mover() {
        let text = DEFAULT_STATS_JSON.replacen("\"move_period\": 10", "\"move_period\": 0", 1);
        match load_stats(&text) {
            Err(StatsError::Invalid { kind: "WORKER", .. }) => {}
            other => panic!("expected invalid WORKER, got {other:?}"),
        }
    }

    #[test]
    fn rejects_base_producing_combat_units() {
        let text = DEFAULT_STATS_JSON.replacen("\"produces\": [\"WORKER\"]", "\"produces\": [\"LIGHT\"]", 1);
        assert!(load_stats(&text).is_err());
    }
}
