//! Iterative-deepening real-time minimax over frame plies.
//!
//! Each game cycle is a frame of two plies: the deciding player commits a
//! joint action, the opponent answers, and the paired actions advance the
//! state. Every ply costs one depth step — including pass plies for a side
//! with nothing to decide — so at equal depth this search looks less far
//! ahead than the durative alpha-beta, which is exactly the baseline
//! behavior wanted from it. When the depth budget runs out between the two
//! plies of a frame, the frame is completed with an opponent pass and the
//! resulting state is evaluated, so odd depths degrade to a greedy
//! own-action look-ahead instead of losing the committed action.

use super::{
    enumerate_joint_actions, iterate_deepening, leaf_value, seed_root_order, terminal_value,
    Decision, Expired,
    LeafMode, Meter, MoveGenLimits, SearchBudget, TimeSource,
};
use crate::game::{GameState, JointAction, Player};

struct Ctx<'a> {
    meter: Meter,
    eval: &'a dyn Fn(&GameState) -> f64,
    limits: &'a MoveGenLimits,
    leaf: LeafMode,
    horizon: u32,
    max_player: Player,
    /// Who commits first within each frame. The public planner always uses
    /// the deciding player; tests split the two roles to check zero-sum
    /// symmetry on a fixed tree shape.
    first_mover: Player,
    force: bool,
}

impl Ctx<'_> {
    fn check(&self) -> Result<(), Expired> {
        if !self.force && self.meter.expired() {
            Err(Expired)
        } else {
            Ok(())
        }
    }

    fn joint(&self, first: &JointAction, second: &JointAction) -> [JointAction; 2] {
        let mut out = [Vec::new(), Vec::new()];
        out[self.first_mover.index()] = first.clone();
        out[self.first_mover.opponent().index()] = second.clone();
        out
    }

    fn leaf(&self, state: &GameState) -> f64 {
        leaf_value(state, self.max_player, &self.leaf, self.horizon, self.eval)
    }
}

/// Start of a frame: the first mover's ply.
fn frame_node(
    ctx: &mut Ctx,
    state: &GameState,
    depth: u32,
    alpha: f64,
    beta: f64,
) -> Result<f64, Expired> {
    ctx.meter.tick();
    ctx.check()?;
    if let Some(result) = state.winner() {
        return Ok(terminal_value(&result, ctx.max_player));
    }
    if depth == 0 {
        return Ok(ctx.leaf(state));
    }
    let mover = ctx.first_mover;
    let actions = enumerate_joint_actions(state, mover, ctx.limits);
    fold_plies(ctx, mover, actions, alpha, beta, |ctx, a, alpha, beta| {
        reply_node(ctx, state, a, depth - 1, alpha, beta)
    })
}

/// Second ply of a frame: the opponent answers the committed action; the
/// pair advances the state. At depth zero the frame completes with a pass.
fn reply_node(
    ctx: &mut Ctx,
    state: &GameState,
    committed: &JointAction,
    depth: u32,
    alpha: f64,
    beta: f64,
) -> Result<f64, Expired> {
    ctx.meter.tick();
    ctx.check()?;
    if depth == 0 {
        let child = state
            .advance(&ctx.joint(committed, &Vec::new()))
            .expect("enumerated action is legal");
        return Ok(match child.winner() {
            Some(result) => terminal_value(&result, ctx.max_player),
            None => ctx.leaf(&child),
        });
    }
    let mover = ctx.first_mover.opponent();
    let actions = enumerate_joint_actions(state, mover, ctx.limits);
    fold_plies(ctx, mover, actions, alpha, beta, |ctx, b, alpha, beta| {
        let child = state
            .advance(&ctx.joint(committed, b))
            .expect("enumerated action is legal");
        frame_node(ctx, &child, depth - 1, alpha, beta)
    })
}

/// Alpha-beta fold over one ply's actions, maximizing when the mover is the
/// max player.
fn fold_plies<F>(
    ctx: &mut Ctx,
    mover: Player,
    actions: Vec<JointAction>,
    mut alpha: f64,
    mut beta: f64,
    mut child: F,
) -> Result<f64, Expired>
where
    F: FnMut(&mut Ctx, &JointAction, f64, f64) -> Result<f64, Expired>,
{
    let maximizing = mover == ctx.max_player;
    let mut best = if maximizing {
        f64::NEG_INFINITY
    } else {
        f64::INFINITY
    };
    for action in &actions {
        let value = child(ctx, action, alpha, beta)?;
        if maximizing {
            best = best.max(value);
            alpha = alpha.max(best);
        } else {
            best = best.min(value);
            beta = beta.min(best);
        }
        if alpha >= beta {
            break;
        }
    }
    Ok(best)
}

/// Exhaustive root value with the max player and the first mover chosen
/// independently; test hook for the zero-sum identity.
#[cfg(test)]
pub(crate) fn minimax_root_value(
    state: &GameState,
    max_player: Player,
    first_mover: Player,
    depth: u32,
    limits: &MoveGenLimits,
    eval: &dyn Fn(&GameState) -> f64,
) -> f64 {
    let budget = SearchBudget::default();
    let mut ctx = Ctx {
        meter: Meter::start(&budget, TimeSource::Nodes(u64::MAX)),
        eval,
        limits,
        leaf: LeafMode::Eval,
        horizon: budget.playout_horizon,
        max_player,
        first_mover,
        force: false,
    };
    frame_node(
        &mut ctx,
        state,
        depth,
        f64::NEG_INFINITY,
        f64::INFINITY,
    )
    .expect("unlimited meter cannot expire")
}

/// Decides `max_player`'s next joint action by iterative deepening over
/// frame plies.
pub fn idrtminimax_decide(
    state: &GameState,
    max_player: Player,
    budget: &SearchBudget,
    source: TimeSource,
    limits: &MoveGenLimits,
    leaf: LeafMode,
    eval: &dyn Fn(&GameState) -> f64,
) -> Decision {
    let mut ctx = Ctx {
        meter: Meter::start(budget, source),
        eval,
        limits,
        leaf,
        horizon: budget.playout_horizon,
        max_player,
        first_mover: max_player,
        force: false,
    };
    if !state.has_idle_units(max_player) || state.winner().is_some() {
        return Decision::idle_pass(&ctx.meter);
    }
    let mut root_actions = enumerate_joint_actions(state, max_player, ctx.limits);
    seed_root_order(&mut root_actions, state, max_player, &ctx.leaf);

    let committed = iterate_deepening(budget.max_depth, &mut root_actions, |a, depth, alpha, force| {
        ctx.force = force;
        let result = reply_node(&mut ctx, state, a, depth - 1, alpha, f64::INFINITY);
        ctx.force = false;
        result
    });

    match committed {
        Some((actions, value, completed_depth)) => Decision {
            actions,
            value,
            completed_depth,
            nodes_visited: ctx.meter.nodes(),
            elapsed_ms: ctx.meter.elapsed_ms(),
        },
        None => Decision::idle_pass(&ctx.meter),
    }
}
