//! The adaptable weight vector: one weight per unit kind plus the two
//! resource classes.

use crate::game::UnitKind;
use serde::{Deserialize, Serialize};

/// Identifies one tracked component. Order matches [`Component::ALL`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Component {
    MainBase,
    Rax,
    Worker,
    Light,
    Range,
    Heavy,
    /// Banked (mined) resource stock.
    OwnedRes,
    /// Resources carried by workers in transit.
    CarriedRes,
}

impl Component {
    pub const ALL: [Component; 8] = [
        Component::MainBase,
        Component::Rax,
        Component::Worker,
        Component::Light,
        Component::Range,
        Component::Heavy,
        Component::OwnedRes,
        Component::CarriedRes,
    ];

    pub fn index(self) -> usize {
        match self {
            Component::MainBase => 0,
            Component::Rax => 1,
            Component::Worker => 2,
            Component::Light => 3,
            Component::Range => 4,
            Component::Heavy => 5,
            Component::OwnedRes => 6,
            Component::CarriedRes => 7,
        }
    }

    pub fn of_kind(kind: UnitKind) -> Component {
        Component::ALL[kind.index()]
    }

    pub fn name(self) -> &'static str {
        match self {
            Component::MainBase => "MAINBASE",
            Component::Rax => "RAX",
            Component::Worker => "WORKER",
            Component::Light => "LIGHT",
            Component::Range => "RANGE",
            Component::Heavy => "HEAVY",
            Component::OwnedRes => "RES_MINED",
            Component::CarriedRes => "RES_CARRIED",
        }
    }
}

/// Weights applied when recombining component scores into a base score.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightVector {
    pub main_base: f64,
    pub rax: f64,
    pub worker: f64,
    pub light: f64,
    pub range: f64,
    pub heavy: f64,
    pub owned_res: f64,
    pub carried_res: f64,
}

impl WeightVector {
    pub fn uniform(value: f64) -> WeightVector {
        WeightVector {
            main_base: value,
            rax: value,
            worker: value,
            light: value,
            range: value,
            heavy: value,
            owned_res: value,
            carried_res: value,
        }
    }

    pub fn get(&self, c: Component) -> f64 {
        self.as_array()[c.index()]
    }

    pub fn set(&mut self, c: Component, value: f64) {
        match c {
            Component::MainBase => self.main_base = value,
            Component::Rax => self.rax = value,
            Component::Worker => self.worker = value,
            Component::Light => self.light = value,
            Component::Range => self.range = value,
            Component::Heavy => self.heavy = value,
            Component::OwnedRes => self.owned_res = value,
            Component::CarriedRes => self.carried_res = value,
        }
    }

    /// All eight weights in canonical component order.
    pub fn as_array(&self) -> [f64; 8] {
        [
            self.main_base,
            self.rax,
            self.worker,
            self.light,
            self.range,
            self.heavy,
            self.owned_res,
            self.carried_res,
        ]
    }

    pub fn from_array(a: [f64; 8]) -> WeightVector {
        WeightVector {
            main_base: a[0],
            rax: a[1],
            worker: a[2],
            light: a[3],
            range: a[4],
            heavy: a[5],
            owned_res: a[6],
            carried_res: a[7],
        }
    }

    /// The six per-kind weights in canonical kind order.
    pub fn kind_weights(&self) -> [f64; 6] {
        [
            self.main_base,
            self.rax,
            self.worker,
            self.light,
            self.range,
            self.heavy,
        ]
    }
}
