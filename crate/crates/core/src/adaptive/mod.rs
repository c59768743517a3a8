//! Online per-component weight adaptation for the evaluation functions.
//!
//! Each of the eight tracked components (six unit kinds, two resource
//! classes) carries two exponentially averaged moment pairs driven by the
//! relative change of its raw score between consecutive observations:
//!
//! * the learning pair sees the signed relative delta and yields an adaptive
//!   step size `L_t`,
//! * the decay pair sees the delta's magnitude and yields an adaptive decay
//!   rate `D_t`, clamped to `[0, d_max]`.
//!
//! A component's weight then updates multiplicatively:
//! `w1 = (w0 + L_t * delta) * (1 - D_t)`, clamped to `[w_floor, w_ceil]`.
//! A component whose score did not change keeps its weight bit-identical;
//! its moments still advance so volatility history is preserved.

mod history;

pub use history::{HistoryEntry, WeightHistory};

use crate::eval::{
    base_score, component_scores, normalize_eval, EvalKind, EvalParams, EvalResult, WeightVector,
};
use crate::game::{GameState, Player};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Hyperparameters of the adaptation loop.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerConfig {
    /// First-moment averaging factor, `0 <= beta1 < 1`.
    pub beta1: f64,
    /// Second-moment averaging factor, `0 <= beta2 < 1`.
    pub beta2: f64,
    /// Denominator guard inside the rate computation.
    pub eps: f64,
    /// Base learning-rate scale multiplying the corrected moment ratio.
    pub eta0: f64,
    /// Base decay scale multiplying the corrected decay-moment ratio.
    pub d0: f64,
    /// Upper clamp for the adaptive decay rate, `0 <= d_max < 1`.
    pub d_max: f64,
    /// Lower clamp for every weight.
    pub w_floor: f64,
    /// Upper clamp for every weight.
    pub w_ceil: f64,
    /// Relative deltas divide by `max(|previous|, delta_guard)`.
    pub delta_guard: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            eta0: 1e-4,
            d0: 1e-4,
            d_max: 0.01,
            w_floor: 1e-3,
            w_ceil: 1e3,
            delta_guard: 1.0,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum AdaptiveError {
    #[error("optimizer config invalid: {0}")]
    BadConfig(String),
    #[error("bias correction requires at least one update (step = 0)")]
    StepZero,
    #[error("initial weight {component} = {value} outside [{floor}, {ceil}]")]
    WeightOutOfRange {
        component: &'static str,
        value: f64,
        floor: f64,
        ceil: f64,
    },
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<(), AdaptiveError> {
        let bad = |what: &str| Err(AdaptiveError::BadConfig(what.to_string()));
        if !(0.0..1.0).contains(&self.beta1) {
            return bad("beta1 must be in [0, 1)");
        }
        if !(0.0..1.0).contains(&self.beta2) {
            return bad("beta2 must be in [0, 1)");
        }
        if !(self.eps > 0.0) {
            return bad("eps must be > 0");
        }
        if self.eta0 < 0.0 || self.d0 < 0.0 {
            return bad("eta0 and d0 must be >= 0");
        }
        if !(0.0..1.0).contains(&self.d_max) {
            return bad("d_max must be in [0, 1)");
        }
        if !(self.w_floor > 0.0) || !(self.w_ceil > self.w_floor) {
            return bad("need 0 < w_floor < w_ceil");
        }
        if !(self.delta_guard > 0.0) {
            return bad("delta_guard must be > 0");
        }
        Ok(())
    }
}

/// Moment accumulators for one component: a learning pair and a decay pair,
/// plus the shared update count.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AdamWMomentState {
    pub m_lr: f64,
    pub v_lr: f64,
    pub m_dr: f64,
    pub v_dr: f64,
    pub step: u64,
}

/// Bias-corrected moments.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrectedMoments {
    pub m_lr: f64,
    pub v_lr: f64,
    pub m_dr: f64,
    pub v_dr: f64,
}

/// Relative score change `(current - previous) / max(|previous|, guard)`.
pub fn score_delta(current: f64, previous: f64, guard: f64) -> f64 {
    (current - previous) / previous.abs().max(guard)
}

/// One exponential-average update. The learning pair sees the signed delta,
/// the decay pair its magnitude; both second moments see the square.
pub fn update_moments(ms: AdamWMomentState, g: f64, cfg: &OptimizerConfig) -> AdamWMomentState {
    AdamWMomentState {
        m_lr: cfg.beta1 * ms.m_lr + (1.0 - cfg.beta1) * g,
        v_lr: cfg.beta2 * ms.v_lr + (1.0 - cfg.beta2) * g * g,
        m_dr: cfg.beta1 * ms.m_dr + (1.0 - cfg.beta1) * g.abs(),
        v_dr: cfg.beta2 * ms.v_dr + (1.0 - cfg.beta2) * g * g,
        step: ms.step + 1,
    }
}

/// Divides the raw moments by `1 - beta^step` so early estimates are not
/// biased toward zero.
pub fn bias_correct(
    ms: &AdamWMomentState,
    cfg: &OptimizerConfig,
) -> Result<CorrectedMoments, AdaptiveError> {
    if ms.step == 0 {
        return Err(AdaptiveError::StepZero);
    }
    let t = ms.step as i32;
    let c1 = 1.0 - cfg.beta1.powi(t);
    let c2 = 1.0 - cfg.beta2.powi(t);
    Ok(CorrectedMoments {
        m_lr: ms.m_lr / c1,
        v_lr: ms.v_lr / c2,
        m_dr: ms.m_dr / c1,
        v_dr: ms.v_dr / c2,
    })
}

/// Adaptive step size and decay rate:
/// `L_t = eta0 * m_lr / sqrt(v_lr + eps)`, and the analogous decay ratio
/// scaled by `d0` and clamped to `[0, d_max]`.
pub fn adaptive_rates(cm: &CorrectedMoments, cfg: &OptimizerConfig) -> (f64, f64) {
    let l_t = cfg.eta0 * cm.m_lr / (cm.v_lr + cfg.eps).sqrt();
    let d_raw = cfg.d0 * cm.m_dr / (cm.v_dr + cfg.eps).sqrt();
    (l_t, d_raw.clamp(0.0, cfg.d_max))
}

/// Applies one weight update
/// `w1 = (w0 + l * (s1 - s0) / max(|s0|, guard)) * (1 - d)`,
/// clamped into the configured weight range.
pub fn update_weight(w0: f64, l: f64, d: f64, s1: f64, s0: f64, cfg: &OptimizerConfig) -> f64 {
    let delta = score_delta(s1, s0, cfg.delta_guard);
    ((w0 + l * delta) * (1.0 - d)).clamp(cfg.w_floor, cfg.w_ceil)
}

/// Full trace of one component step, for histories and trajectory checks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComponentTrace {
    pub delta: f64,
    pub moments: AdamWMomentState,
    pub corrected: CorrectedMoments,
    pub l_t: f64,
    pub d_t: f64,
    pub weight: f64,
}

/// Advances one component through the whole chain: delta, moments, bias
/// correction, rates, weight update. A zero delta leaves the weight
/// untouched (bit-identical) while still advancing the moments.
pub fn step_component(
    ms: &mut AdamWMomentState,
    weight: &mut f64,
    current: f64,
    previous: f64,
    cfg: &OptimizerConfig,
) -> ComponentTrace {
    let delta = score_delta(current, previous, cfg.delta_guard);
    *ms = update_moments(*ms, delta, cfg);
    let corrected = bias_correct(ms, cfg).expect("step >= 1 after update");
    let (l_t, d_t) = adaptive_rates(&corrected, cfg);
    if delta != 0.0 {
        *weight = update_weight(*weight, l_t, d_t, current, previous, cfg);
    }
    ComponentTrace {
        delta,
        moments: *ms,
        corrected,
        l_t,
        d_t,
        weight: *weight,
    }
}

/// Wraps a base evaluation function with per-component weight adaptation for
/// one side. Call [`AdaptiveEvalState::adapt_and_evaluate`] once per observed
/// root state; searches in between should score successors with the frozen
/// [`AdaptiveEvalState::weights`].
#[derive(Clone, Debug)]
pub struct AdaptiveEvalState {
    kind: EvalKind,
    player: Player,
    cfg: OptimizerConfig,
    params: EvalParams,
    weights: WeightVector,
    last_scores: [f64; 8],
    moments: [AdamWMomentState; 8],
    history: Option<WeightHistory>,
}

impl AdaptiveEvalState {
    /// Initializes adaptation against a first observed state. The initial
    /// weights must already lie inside the configured clamp range.
    pub fn init(
        kind: EvalKind,
        initial_weights: WeightVector,
        cfg: OptimizerConfig,
        params: EvalParams,
        player: Player,
        state0: &GameState,
    ) -> Result<AdaptiveEvalState, AdaptiveError> {
        cfg.validate()?;
        for (component, value) in crate::eval::Component::ALL
            .iter()
            .zip(initial_weights.as_array())
        {
            if !(cfg.w_floor..=cfg.w_ceil).contains(&value) {
                return Err(AdaptiveError::WeightOutOfRange {
                    component: component.name(),
                    value,
                    floor: cfg.w_floor,
                    ceil: cfg.w_ceil,
                });
            }
        }
        let last_scores = component_scores(state0, player, kind, &params);
        Ok(AdaptiveEvalState {
            kind,
            player,
            cfg,
            params,
            weights: initial_weights,
            last_scores,
            moments: [AdamWMomentState::default(); 8],
            history: None,
        })
    }

    /// Convenience constructor from the base function's default weights.
    pub fn with_defaults(
        kind: EvalKind,
        cfg: OptimizerConfig,
        params: EvalParams,
        player: Player,
        state0: &GameState,
    ) -> Result<AdaptiveEvalState, AdaptiveError> {
        let weights = params.initial_weights(kind);
        AdaptiveEvalState::init(kind, weights, cfg, params, player, state0)
    }

    pub fn kind(&self) -> EvalKind {
        self.kind
    }

    pub fn player(&self) -> Player {
        self.player
    }

    pub fn weights(&self) -> &WeightVector {
        &self.weights
    }

    pub fn params(&self) -> &EvalParams {
        &self.params
    }

    pub fn moments(&self) -> &[AdamWMomentState; 8] {
        &self.moments
    }

    pub fn last_scores(&self) -> &[f64; 8] {
        &self.last_scores
    }

    /// Keeps the most recent `cap` adaptation snapshots for export.
    pub fn enable_history(&mut self, cap: usize) {
        self.history = Some(WeightHistory::new(cap));
    }

    pub fn history(&self) -> Option<&WeightHistory> {
        self.history.as_ref()
    }

    /// One adaptation step against an observed state: updates every
    /// component's moments and weight from the change since the previous
    /// observation, then evaluates the state under the updated weights.
    pub fn adapt_and_evaluate(&mut self, state: &GameState) -> EvalResult {
        let current = component_scores(state, self.player, self.kind, &self.params);
        let mut weights = self.weights.as_array();
        let mut l_rates = [0.0f64; 8];
        let mut d_rates = [0.0f64; 8];
        for i in 0..8 {
            let trace = step_component(
                &mut self.moments[i],
                &mut weights[i],
                current[i],
                self.last_scores[i],
                &self.cfg,
            );
            l_rates[i] = trace.l_t;
            d_rates[i] = trace.d_t;
        }
        self.weights = WeightVector::from_array(weights);
        self.last_scores = current;

        let own = base_score(state, self.player, self.kind, &self.params, &self.weights).total;
        let opp = base_score(
            state,
            self.player.opponent(),
            self.kind,
            &self.params,
            &self.weights,
        )
        .total;
        let result = normalize_eval(own, opp);
        if let Some(history) = &mut self.history {
            history.push(HistoryEntry {
                cycle: state.cycle(),
                weights: self.weights,
                l_rates,
                d_rates,
                s_eval: result.s_eval,
            });
        }
        result
    }

    /// Scores a state under the current (frozen) weights without adapting.
    pub fn evaluate_frozen(&self, state: &GameState) -> EvalResult {
        crate::eval::evaluate(state, self.kind, &self.params, &self.weights, self.player)
    }
}
