//! Policy-driven playouts: step the engine until a horizon or a winner.

use super::state::{GameState, JointAction};
use super::{GameResult, Player};

/// A deterministic per-cycle action policy for one side.
pub trait Policy {
    fn act(&mut self, state: &GameState, player: Player) -> JointAction;
}

impl<F: FnMut(&GameState, Player) -> JointAction> Policy for F {
    fn act(&mut self, state: &GameState, player: Player) -> JointAction {
        self(state, player)
    }
}

/// Runs up to `horizon` cycles (at least 1) with one policy per side and
/// returns the reached state plus the result when the game ended within the
/// horizon. Policies are only consulted for sides with idle units.
pub fn run_playout(
    state: &GameState,
    p0: &mut dyn Policy,
    p1: &mut dyn Policy,
    horizon: u32,
) -> (GameState, Option<GameResult>) {
    run_playout_observed(state, p0, p1, horizon, &mut |_| {})
}

/// [`run_playout`] with a hook that sees every intermediate state, in cycle
/// order, right after each advance. A terminal state is still observed once
/// before the early return.
pub fn run_playout_observed(
    state: &GameState,
    p0: &mut dyn Policy,
    p1: &mut dyn Policy,
    horizon: u32,
    observe: &mut dyn FnMut(&GameState),
) -> (GameState, Option<GameResult>) {
    assert!(horizon >= 1, "playout horizon must be >= 1");
    let mut current = state.clone();
    for _ in 0..horizon {
        if let Some(result) = current.winner() {
            return (current, Some(result));
        }
        let a0 = if current.has_idle_units(Player::P0) {
            p0.act(&current, Player::P0)
        } else {
            Vec::new()
        };
        let a1 = if current.has_idle_units(Player::P1) {
            p1.act(&current, Player::P1)
        } else {
            Vec::new()
        };
        current = current
            .advance(&[a0, a1])
            .expect("policies must produce legal actions");
        observe(&current);
    }
    let result = current.winner();
    (current, result)
}

/// Script-vs-script playout; see [`crate::search::Script`].
pub fn run_script_playout(
    state: &GameState,
    script0: crate::search::Script,
    script1: crate::search::Script,
    horizon: u32,
) -> (GameState, Option<GameResult>) {
    let mut p0 = move |s: &GameState, p: Player| script0.action(s, p);
    let mut p1 = move |s: &GameState, p: Player| script1.action(s, p);
    run_playout(state, &mut p0, &mut p1, horizon)
}
