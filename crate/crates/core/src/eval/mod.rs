//! Static evaluation functions over game states.
//!
//! Every base function reduces a player's position to a weighted sum of eight
//! tracked components: the six unit kinds plus two resource classes (mined
//! stock and carried load). Breakdowns keep the raw, weight-free component
//! scores so the adaptive layer can observe them; `total` is the weighted
//! recombination. Two base scores are compared through a shifted sigmoid into
//! the open interval (-1, 1).

mod weights;

pub use weights::{Component, WeightVector};

use crate::game::{GameState, Player, UnitKind, Verb};
use serde::{Deserialize, Serialize};

/// The three base evaluation functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalKind {
    Lanchester,
    Simple,
    SimpleSqrt,
}

impl EvalKind {
    pub const ALL: [EvalKind; 3] = [EvalKind::Lanchester, EvalKind::Simple, EvalKind::SimpleSqrt];

    /// Short codes used by agent specs: L, S, SQ.
    pub fn code(self) -> &'static str {
        match self {
            EvalKind::Lanchester => "L",
            EvalKind::Simple => "S",
            EvalKind::SimpleSqrt => "SQ",
        }
    }

    pub fn from_code(code: &str) -> Option<EvalKind> {
        EvalKind::ALL.iter().copied().find(|k| k.code() == code)
    }
}

/// Lanchester-style aggregation parameters. Unit weights double as the
/// initial values of the adaptable weight vector; carried and mined resources
/// default to weight 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LanchesterParams {
    pub base: f64,
    pub barracks: f64,
    pub worker: f64,
    pub light: f64,
    pub ranged: f64,
    pub heavy: f64,
    pub attrition_exponent: f64,
    pub carried: f64,
    pub mined: f64,
}

impl Default for LanchesterParams {
    fn default() -> Self {
        LanchesterParams {
            base: 0.129,
            barracks: 0.231,
            worker: 0.181,
            light: 1.75,
            ranged: 1.679,
            heavy: 3.9,
            attrition_exponent: 0.7,
            carried: 1.0,
            mined: 1.0,
        }
    }
}

impl LanchesterParams {
    pub fn initial_weights(&self) -> WeightVector {
        WeightVector {
            main_base: self.base,
            rax: self.barracks,
            worker: self.worker,
            light: self.light,
            range: self.ranged,
            heavy: self.heavy,
            owned_res: self.mined,
            carried_res: self.carried,
        }
    }
}

/// Parameters of the Simple and SimpleSqrt functions: `r` weighs the mined
/// stock, `r_w` carried loads, `u_b` live unit material.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimpleParams {
    pub r: f64,
    pub r_w: f64,
    pub u_b: f64,
}

impl Default for SimpleParams {
    fn default() -> Self {
        SimpleParams {
            r: 20.0,
            r_w: 10.0,
            u_b: 40.0,
        }
    }
}

impl SimpleParams {
    /// Uniform per-kind weights: every kind starts at `u_b`.
    pub fn initial_weights(&self) -> WeightVector {
        WeightVector {
            main_base: self.u_b,
            rax: self.u_b,
            worker: self.u_b,
            light: self.u_b,
            range: self.u_b,
            heavy: self.u_b,
            owned_res: self.r,
            carried_res: self.r_w,
        }
    }
}

/// Bundle of all base-function parameters.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalParams {
    pub lanchester: LanchesterParams,
    pub simple: SimpleParams,
}

impl EvalParams {
    pub fn initial_weights(&self, kind: EvalKind) -> WeightVector {
        match kind {
            EvalKind::Lanchester => self.lanchester.initial_weights(),
            EvalKind::Simple | EvalKind::SimpleSqrt => self.simple.initial_weights(),
        }
    }
}

/// One side's decomposed base score. `total` recombines the raw parts with
/// the weight vector used for the call.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoreBreakdown {
    /// Raw (unweighted) per-kind unit scores, canonical kind order.
    pub unit_scores: [f64; 6],
    /// Raw mined stock: banked resources plus spend committed to
    /// production in flight. Crediting the pipeline keeps the score steady
    /// while a bank resource turns into a queued unit, so fixed-horizon
    /// look-ahead doesn't punish sides mid-production.
    pub res_mined: f64,
    /// Raw carried load summed over the player's units.
    pub res_carried: f64,
    /// Mobile units alive; drives Lanchester's attrition factor.
    pub active_units: u32,
    /// Weighted total base score.
    pub total: f64,
}

impl ScoreBreakdown {
    /// The eight tracked component scores in canonical component order.
    pub fn components(&self) -> [f64; 8] {
        [
            self.unit_scores[0],
            self.unit_scores[1],
            self.unit_scores[2],
            self.unit_scores[3],
            self.unit_scores[4],
            self.unit_scores[5],
            self.res_mined,
            self.res_carried,
        ]
    }
}

/// Result of comparing the two sides' base scores.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub s_base_max: f64,
    pub s_base_min: f64,
    /// Normalized value in (-1, 1) from the max player's perspective.
    pub s_eval: f64,
}

/// Numerically stable logistic function, evaluated branch-wise so neither
/// branch exponentiates a positive argument.
pub fn sigmoid(x: f64) -> f64 {
    assert!(x.is_finite(), "sigmoid input must be finite, got {x}");
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Maps a pair of base scores to `2 * sigmoid(s_max - s_min) - 1`.
///
/// The result is kept strictly inside (-1, 1): for score gaps large enough
/// that the sigmoid rounds to 0 or 1 in f64, the value saturates one ulp
/// short of the bound, preserving the open-interval contract and the sign.
pub fn normalize_eval(s_base_max: f64, s_base_min: f64) -> EvalResult {
    assert!(
        s_base_max.is_finite() && s_base_min.is_finite(),
        "normalize_eval inputs must be finite"
    );
    let raw = 2.0 * sigmoid(s_base_max - s_base_min) - 1.0;
    let s_eval = raw.clamp(-1.0 + f64::EPSILON, 1.0 - f64::EPSILON);
    EvalResult {
        s_base_max,
        s_base_min,
        s_eval,
    }
}

fn raw_components<F: Fn(UnitKind, i32, i32, u32) -> f64>(
    state: &GameState,
    player: Player,
    unit_term: F,
) -> ScoreBreakdown {
    let stats = state.stats();
    let mut unit_scores = [0.0f64; 6];
    let mut carried = 0u32;
    let mut in_flight = 0u32;
    let mut active = 0u32;
    for unit in state.units_of(player) {
        let spec = stats.get(unit.kind);
        unit_scores[unit.kind.index()] += unit_term(unit.kind, unit.hp, spec.max_hp, spec.cost);
        carried += unit.carried;
        if let Some(Verb::Produce(kind, _)) = unit.current_action {
            in_flight += stats.get(kind).cost;
        }
        if unit.kind.is_mobile_class() {
            active += 1;
        }
    }
    ScoreBreakdown {
        unit_scores,
        res_mined: (state.player_resources(player) + in_flight) as f64,
        res_carried: carried as f64,
        active_units: active,
        total: 0.0,
    }
}

/// Lanchester base score: buildings contribute weighted raw hp, the four
/// mobile kinds contribute hp fractions for light and heavy and raw hp
/// otherwise, scaled as a group by `active_units ^ attrition_exponent`;
/// carried and mined resources are added with their own weights.
pub fn lanchester_score(
    state: &GameState,
    player: Player,
    params: &LanchesterParams,
    weights: &WeightVector,
) -> ScoreBreakdown {
    let mut b = raw_components(state, player, |kind, hp, max_hp, _cost| match kind {
        UnitKind::Light | UnitKind::Heavy => hp as f64 / max_hp as f64,
        _ => hp as f64,
    });
    let buildings = b.unit_scores[0] * weights.main_base + b.unit_scores[1] * weights.rax;
    let mobile = b.unit_scores[2] * weights.worker
        + b.unit_scores[3] * weights.light
        + b.unit_scores[4] * weights.range
        + b.unit_scores[5] * weights.heavy;
    let attrition = (b.active_units as f64).powf(params.attrition_exponent);
    b.total = buildings
        + attrition * mobile
        + b.res_carried * weights.carried_res
        + b.res_mined * weights.owned_res;
    b
}

fn simple_like(
    state: &GameState,
    player: Player,
    weights: &WeightVector,
    sqrt_health: bool,
) -> ScoreBreakdown {
    let mut b = raw_components(state, player, |_kind, hp, max_hp, cost| {
        let ratio = hp as f64 / max_hp as f64;
        cost as f64 * if sqrt_health { ratio.sqrt() } else { ratio }
    });
    let mut total = b.res_mined * weights.owned_res + b.res_carried * weights.carried_res;
    for (i, kind_weight) in weights.kind_weights().iter().enumerate() {
        total += b.unit_scores[i] * kind_weight;
    }
    b.total = total;
    b
}

/// Simple base score: mined stock, carried loads, and per-unit material
/// (cost times health fraction) under their respective weights.
pub fn simple_score(
    state: &GameState,
    player: Player,
    _params: &SimpleParams,
    weights: &WeightVector,
) -> ScoreBreakdown {
    simple_like(state, player, weights, false)
}

/// Simple with the health fraction square-rooted, softening the penalty for
/// damaged units.
pub fn simple_sqrt_score(
    state: &GameState,
    player: Player,
    _params: &SimpleParams,
    weights: &WeightVector,
) -> ScoreBreakdown {
    simple_like(state, player, weights, true)
}

/// Upper bound on either side's Simple score: every resource in the game,
/// free or banked or invested in units, converted at the unit weight.
pub fn simple_upper_bound(state: &GameState, params: &SimpleParams) -> f64 {
    let stats = state.stats();
    let side = |player: Player| -> f64 {
        let units: u32 = state
            .units_of(player)
            .map(|u| stats.get(u.kind).cost + u.carried)
            .sum();
        (state.player_resources(player) + units) as f64
    };
    let richest = side(Player::P0).max(side(Player::P1));
    (state.free_resources() as f64 + richest) * params.u_b
}

/// Computes one side's base score with the selected function.
pub fn base_score(
    state: &GameState,
    player: Player,
    kind: EvalKind,
    params: &EvalParams,
    weights: &WeightVector,
) -> ScoreBreakdown {
    match kind {
        EvalKind::Lanchester => lanchester_score(state, player, &params.lanchester, weights),
        EvalKind::Simple => simple_score(state, player, &params.simple, weights),
        EvalKind::SimpleSqrt => simple_sqrt_score(state, player, &params.simple, weights),
    }
}

/// The raw component scores one side exposes to the adaptive layer.
pub fn component_scores(
    state: &GameState,
    player: Player,
    kind: EvalKind,
    params: &EvalParams,
) -> [f64; 8] {
    base_score(state, player, kind, params, &params.initial_weights(kind)).components()
}

/// Evaluates a state from `max_player`'s perspective: both sides are scored
/// with the same weights and compared through `normalize_eval`.
pub fn evaluate(
    state: &GameState,
    kind: EvalKind,
    params: &EvalParams,
    weights: &WeightVector,
    max_player: Player,
) -> EvalResult {
    let own = base_score(state, max_player, kind, params, weights).total;
    let opp = base_score(state, max_player.opponent(), kind, params, weights).total;
    normalize_eval(own, opp)
}

#[cfg(test)]
mod tests;
