//! Evaluation-cost benchmark: how much slower is a dynamic (adapting)
//! evaluation than its static base?
//!
//! The measurement mirrors deployment: a planner adapts its weights once per
//! root decision and then evaluates thousands of leaves with the weights
//! frozen. So for each corpus state the dynamic pass pays one
//! `adapt_and_evaluate` followed by frozen evaluations, while the static pass
//! makes the same number of plain evaluation calls. The ratio of mean
//! per-call cost is the adaptation overhead.

use std::hint::black_box;
use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::adaptive::{AdaptiveEvalState, OptimizerConfig};
use crate::eval::{evaluate, EvalKind, EvalParams};
use crate::game::{GameState, MapSpec, Player, UnitTypeTable};
use crate::search::Script;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BenchError {
    #[error("state corpus has {0} states; need at least 100 for stable timing")]
    CorpusTooSmall(usize),
    #[error("{0} calls per function is too few; need at least 1000")]
    TooFewCalls(u64),
}

#[derive(Clone, Debug, Serialize)]
pub struct KindTiming {
    pub kind: EvalKind,
    pub calls: u64,
    pub static_mean_ns: f64,
    pub static_p99_ns: f64,
    pub dynamic_mean_ns: f64,
    pub dynamic_p99_ns: f64,
    /// dynamic mean / static mean.
    pub overhead_ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct TimingStats {
    pub corpus_states: usize,
    pub calls_per_function: u64,
    pub kinds: Vec<KindTiming>,
}

impl TimingStats {
    pub fn max_ratio(&self) -> f64 {
        self.kinds
            .iter()
            .map(|k| k.overhead_ratio)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Samples mid-game states from scripted playouts. Deterministic in the
/// seed; no state is terminal.
pub fn generate_state_corpus(
    map: &MapSpec,
    table: Arc<UnitTypeTable>,
    count: usize,
    seed: u64,
) -> Vec<GameState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut corpus = Vec::with_capacity(count);
    while corpus.len() < count {
        let s0 = Script::ALL[rng.gen_range(0..Script::ALL.len())];
        let s1 = Script::ALL[rng.gen_range(0..Script::ALL.len())];
        let stride = rng.gen_range(23..61);
        let mut next_snapshot = rng.gen_range(5..40);
        let mut state = GameState::new(map, table.clone(), 4_000);
        while corpus.len() < count && state.cycle() < 800 {
            if state.winner().is_some() {
                break;
            }
            if state.cycle() >= next_snapshot {
                corpus.push(state.clone());
                next_snapshot += stride;
            }
            let joint = [
                s0.action(&state, Player::P0),
                s1.action(&state, Player::P1),
            ];
            state = state.advance(&joint).expect("script actions are legal");
        }
    }
    corpus
}

struct PassTiming {
    total_ns: u64,
    samples: Vec<u64>,
}

fn p99(samples: &mut [u64]) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    samples.sort_unstable();
    samples[(samples.len() - 1) * 99 / 100] as f64
}

/// `eval_one(state, first_call_for_state)` must perform exactly one
/// evaluation. Batch time gives the mean; every `stride`-th call is also
/// timed individually for the tail estimate.
fn timed_pass(
    corpus: &[GameState],
    per_state: usize,
    stride: usize,
    mut eval_one: impl FnMut(&GameState, bool) -> f64,
) -> PassTiming {
    let mut sum = 0.0;
    let mut samples = Vec::with_capacity(corpus.len() * per_state / stride + 1);
    let mut call = 0usize;
    let t0 = Instant::now();
    for state in corpus {
        for rep in 0..per_state {
            if call % stride == 0 {
                let t = Instant::now();
                sum += eval_one(black_box(state), rep == 0);
                samples.push(t.elapsed().as_nanos() as u64);
            } else {
                sum += eval_one(black_box(state), rep == 0);
            }
            call += 1;
        }
    }
    let total_ns = t0.elapsed().as_nanos() as u64;
    black_box(sum);
    PassTiming { total_ns, samples }
}

/// Times static vs dynamic evaluation for all three kinds over the corpus,
/// making at least `calls_per_function` calls to each. Run this on an
/// otherwise idle thread: the numbers are wall-clock.
pub fn measure_eval_overhead(
    corpus: &[GameState],
    params: &EvalParams,
    optimizer: &OptimizerConfig,
    calls_per_function: u64,
) -> Result<TimingStats, BenchError> {
    if corpus.len() < 100 {
        return Err(BenchError::CorpusTooSmall(corpus.len()));
    }
    if calls_per_function < 1_000 {
        return Err(BenchError::TooFewCalls(calls_per_function));
    }
    let per_state = (calls_per_function as usize).div_ceil(corpus.len());
    let calls = (per_state * corpus.len()) as u64;
    let stride = (calls as usize / 20_000).max(1);
    let mut kinds = Vec::new();
    for kind in EvalKind::ALL {
        let weights = params.initial_weights(kind);
        let static_eval = |s: &GameState, _first: bool| {
            evaluate(s, kind, params, &weights, Player::P0).s_eval
        };
        // Warm-up passes touch every state once and are discarded.
        timed_pass(corpus, 1, stride, static_eval);
        let stat = timed_pass(corpus, per_state, stride, static_eval);

        let mut ads = AdaptiveEvalState::with_defaults(
            kind,
            optimizer.clone(),
            params.clone(),
            Player::P0,
            &corpus[0],
        )
        .expect("optimizer config is valid");
        let mut dynamic_eval = |s: &GameState, first: bool| {
            if first {
                ads.adapt_and_evaluate(s).s_eval
            } else {
                ads.evaluate_frozen(s).s_eval
            }
        };
        timed_pass(corpus, 1, stride, &mut dynamic_eval);
        let dynamic = timed_pass(corpus, per_state, stride, &mut dynamic_eval);

        let static_mean = stat.total_ns as f64 / calls as f64;
        let dynamic_mean = dynamic.total_ns as f64 / calls as f64;
        let mut stat_samples = stat.samples;
        let mut dyn_samples = dynamic.samples;
        kinds.push(KindTiming {
            kind,
            calls,
            static_mean_ns: static_mean,
            static_p99_ns: p99(&mut stat_samples),
            dynamic_mean_ns: dynamic_mean,
            dynamic_p99_ns: p99(&mut dyn_samples),
            overhead_ratio: dynamic_mean / static_mean,
        });
    }
    Ok(TimingStats {
        corpus_states: corpus.len(),
        calls_per_function: calls,
        kinds,
    })
}
