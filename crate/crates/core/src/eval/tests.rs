use super::*;
use crate::game::Player::{P0, P1};
use crate::testutil::{close, state_with};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

fn defaults() -> EvalParams {
    EvalParams::default()
}

// ── sigmoid and normalization ──────────────────────────────────────────────

#[test]
fn sigmoid_known_values() {
    assert_eq!(sigmoid(0.0), 0.5);
    let expected = 1.0 / (1.0 + (-10.0f64).exp());
    assert!(close(sigmoid(10.0), expected, 1e-15));
    assert!(close(sigmoid(10.0), 0.9999546021312976, 1e-12));
}

#[test]
fn sigmoid_stable_at_extremes() {
    for x in [-800.0, -37.0, 37.0, 800.0] {
        let y = sigmoid(x);
        assert!(y.is_finite());
        assert!((0.0..=1.0).contains(&y));
    }
    assert!(sigmoid(-800.0) >= 0.0);
    assert!(sigmoid(800.0) <= 1.0);
}

#[test]
#[should_panic(expected = "finite")]
fn sigmoid_rejects_non_finite() {
    sigmoid(f64::NAN);
}

#[test]
fn normalize_equal_scores_is_zero() {
    assert_eq!(normalize_eval(7.3, 7.3).s_eval, 0.0);
}

#[test]
fn normalize_known_value() {
    let r = normalize_eval(10.0, 0.0);
    assert!(close(r.s_eval, 0.9999092042625951, 1e-12));
    assert_eq!(r.s_base_max, 10.0);
    assert_eq!(r.s_base_min, 0.0);
}

#[test]
fn normalize_antisymmetric_and_strictly_bounded() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100_000 {
        let a: f64 = rng.gen_range(-1.0e3..1.0e3);
        let b: f64 = rng.gen_range(-1.0e3..1.0e3);
        let fwd = normalize_eval(a, b).s_eval;
        let rev = normalize_eval(b, a).s_eval;
        assert!((fwd + rev).abs() <= 1e-12, "antisymmetry broke at ({a}, {b})");
        assert!(fwd > -1.0 && fwd < 1.0, "bound broke at ({a}, {b}): {fwd}");
    }
    // Saturating gaps stay strictly inside the interval.
    let big = normalize_eval(1.0e6, -1.0e6);
    assert!(big.s_eval > 0.0 && big.s_eval < 1.0);
}

// ── Lanchester ──────────────────────────────────────────────────────────────

#[test]
fn lanchester_hand_value_base_and_two_light() {
    let state = state_with(
        &[
            (P0, UnitKind::MainBase, (2, 2), 0, 0),
            (P0, UnitKind::Light, (5, 5), 0, 0),
            (P0, UnitKind::Light, (6, 5), 0, 0),
        ],
        [0, 0],
        &[],
    );
    let params = LanchesterParams::default();
    let b = lanchester_score(&state, P0, &params, &params.initial_weights());
    let expected = 0.129 * 10.0 + 2.0f64.powf(0.7) * (1.75 + 1.75);
    assert!(close(b.total, expected, 1e-9), "got {} want {expected}", b.total);
    assert!(close(b.total, 6.9758, 5e-5));
    assert_eq!(b.active_units, 2);
    assert_eq!(b.unit_scores[UnitKind::MainBase.index()], 10.0);
    assert_eq!(b.unit_scores[UnitKind::Light.index()], 2.0);
}

#[test]
fn lanchester_empty_side_scores_zero() {
    let state = state_with(&[(P1, UnitKind::Worker, (4, 4), 0, 0)], [0, 0], &[]);
    let params = LanchesterParams::default();
    let b = lanchester_score(&state, P0, &params, &params.initial_weights());
    assert_eq!(b.total, 0.0);
    assert_eq!(b.active_units, 0);
}

#[test]
fn lanchester_mined_term_linear() {
    let params = LanchesterParams::default();
    let lo = state_with(&[(P0, UnitKind::MainBase, (2, 2), 0, 0)], [3, 0], &[]);
    let hi = state_with(&[(P0, UnitKind::MainBase, (2, 2), 0, 0)], [7, 0], &[]);
    let w = params.initial_weights();
    let delta = lanchester_score(&hi, P0, &params, &w).total
        - lanchester_score(&lo, P0, &params, &w).total;
    assert!(close(delta, 4.0 * params.mined, 1e-12));
}

// ── Simple and SimpleSqrt ──────────────────────────────────────────────────

#[test]
fn simple_hand_value_worker_carrying() {
    // r = 5 banked, one full-health worker carrying 1:
    // 5*20 + 1*10 + 40*1*1 = 150.
    let state = state_with(&[(P0, UnitKind::Worker, (4, 4), 0, 1)], [5, 0], &[]);
    let params = SimpleParams::default();
    let b = simple_score(&state, P0, &params, &params.initial_weights());
    assert!(close(b.total, 150.0, 1e-12), "got {}", b.total);
    assert_eq!(b.res_mined, 5.0);
    assert_eq!(b.res_carried, 1.0);
}

#[test]
fn simple_empty_side_scores_zero() {
    let state = state_with(&[(P1, UnitKind::MainBase, (9, 9), 0, 0)], [0, 4], &[]);
    let params = SimpleParams::default();
    assert_eq!(simple_score(&state, P0, &params, &params.initial_weights()).total, 0.0);
}

#[test]
fn simple_and_sqrt_hand_values_half_health_light() {
    // Light at 2/4 hp, cost 2: Simple 40*2*(1/2) = 40,
    // SimpleSqrt 40*2*sqrt(1/2) = 56.5685...
    let state = state_with(&[(P0, UnitKind::Light, (4, 4), 2, 0)], [0, 0], &[]);
    let params = SimpleParams::default();
    let w = params.initial_weights();
    let s = simple_score(&state, P0, &params, &w).total;
    let sq = simple_sqrt_score(&state, P0, &params, &w).total;
    assert!(close(s, 40.0, 1e-12), "simple got {s}");
    assert!(close(sq, 80.0 * 0.5f64.sqrt(), 1e-12), "sqrt got {sq}");
    assert!(close(sq, 56.5685, 5e-5));
}

#[test]
fn sqrt_with_banked_resources() {
    let state = state_with(&[(P0, UnitKind::Light, (4, 4), 2, 0)], [3, 0], &[]);
    let params = SimpleParams::default();
    let sq = simple_sqrt_score(&state, P0, &params, &params.initial_weights()).total;
    assert!(close(sq, 60.0 + 80.0 * 0.5f64.sqrt(), 1e-12));
}

#[test]
fn upper_bound_hand_value() {
    // No units, free pile 20: (20 + max(0, 0)) * 40 = 800.
    let state = state_with(&[], [0, 0], &[((0, 0), 20)]);
    assert!(close(simple_upper_bound(&state, &SimpleParams::default()), 800.0, 1e-12));
    let empty = state_with(&[], [0, 0], &[]);
    assert_eq!(simple_upper_bound(&empty, &SimpleParams::default()), 0.0);
}

#[test]
fn evaluate_symmetric_state_is_zero() {
    let state = state_with(
        &[
            (P0, UnitKind::Worker, (1, 1), 0, 0),
            (P1, UnitKind::Worker, (14, 14), 0, 0),
        ],
        [2, 2],
        &[],
    );
    let params = defaults();
    for kind in EvalKind::ALL {
        let w = params.initial_weights(kind);
        assert_eq!(evaluate(&state, kind, &params, &w, P0).s_eval, 0.0);
    }
}

#[test]
fn evaluate_matches_composition() {
    let state = state_with(
        &[
            (P0, UnitKind::MainBase, (2, 2), 0, 0),
            (P0, UnitKind::Light, (5, 5), 3, 0),
            (P1, UnitKind::Worker, (12, 12), 0, 1),
        ],
        [4, 1],
        &[((0, 0), 9)],
    );
    let params = defaults();
    for kind in EvalKind::ALL {
        let w = params.initial_weights(kind);
        let own = base_score(&state, P0, kind, &params, &w).total;
        let opp = base_score(&state, P1, kind, &params, &w).total;
        let direct = evaluate(&state, kind, &params, &w, P0);
        assert_eq!(direct.s_eval, normalize_eval(own, opp).s_eval);
        assert!(direct.s_eval > 0.0, "max side is ahead for {kind:?}");
        let flipped = evaluate(&state, kind, &params, &w, P1);
        assert!((direct.s_eval + flipped.s_eval).abs() <= 1e-12);
    }
}

#[test]
fn zero_weights_zero_everything() {
    let state = state_with(
        &[(P0, UnitKind::Heavy, (3, 3), 5, 0), (P1, UnitKind::Worker, (9, 9), 0, 1)],
        [6, 2],
        &[],
    );
    let params = defaults();
    let zero = WeightVector::uniform(0.0);
    for kind in EvalKind::ALL {
        assert_eq!(base_score(&state, P0, kind, &params, &zero).total, 0.0);
        assert_eq!(evaluate(&state, kind, &params, &zero, P0).s_eval, 0.0);
    }
}

// ── property tests ──────────────────────────────────────────────────────────

fn arbitrary_state(seed: u64) -> crate::game::GameState {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let stats = crate::game::UnitTypeTable::default_table();
    let mut cells: Vec<(i32, i32)> = Vec::new();
    let mut units = Vec::new();
    let n = rng.gen_range(0..10);
    for _ in 0..n {
        let pos = loop {
            let c = (rng.gen_range(0..16), rng.gen_range(0..16));
            if !cells.contains(&c) {
                cells.push(c);
                break c;
            }
        };
        let kind = UnitKind::ALL[rng.gen_range(0..6)];
        let max_hp = stats.get(kind).max_hp;
        let harvests = stats.get(kind).harvest_amount > 0;
        units.push((
            if rng.gen_bool(0.5) { P0 } else { P1 },
            kind,
            pos,
            rng.gen_range(1..=max_hp),
            if harvests && rng.gen_bool(0.3) { 1 } else { 0 },
        ));
    }
    let mut piles = Vec::new();
    for _ in 0..rng.gen_range(0..3) {
        let pos = loop {
            let c = (rng.gen_range(0..16), rng.gen_range(0..16));
            if !cells.contains(&c) {
                cells.push(c);
                break c;
            }
        };
        piles.push((pos, rng.gen_range(1..30)));
    }
    state_with(&units, [rng.gen_range(0..20), rng.gen_range(0..20)], &piles)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn breakdown_recombines(seed in 0u64..10_000) {
        let state = arbitrary_state(seed);
        let params = defaults();
        for kind in EvalKind::ALL {
            let w = params.initial_weights(kind);
            for player in [P0, P1] {
                let b = base_score(&state, player, kind, &params, &w);
                let recombined = match kind {
                    EvalKind::Lanchester => {
                        let attrition = (b.active_units as f64).powf(params.lanchester.attrition_exponent);
                        b.unit_scores[0] * w.main_base
                            + b.unit_scores[1] * w.rax
                            + attrition
                                * (b.unit_scores[2] * w.worker
                                    + b.unit_scores[3] * w.light
                                    + b.unit_scores[4] * w.range
                                    + b.unit_scores[5] * w.heavy)
                            + b.res_carried * w.carried_res
                            + b.res_mined * w.owned_res
                    }
                    _ => {
                        let kw = w.kind_weights();
                        b.unit_scores.iter().zip(kw).map(|(s, kweight)| s * kweight).sum::<f64>()
                            + b.res_mined * w.owned_res
                            + b.res_carried * w.carried_res
                    }
                };
                prop_assert!(close(b.total, recombined, 1e-9));
                prop_assert!(b.total >= 0.0);
            }
        }
    }

    #[test]
    fn sqrt_dominates_simple_until_full_health(seed in 0u64..10_000) {
        let state = arbitrary_state(seed);
        let params = SimpleParams::default();
        let w = params.initial_weights();
        for player in [P0, P1] {
            let s = simple_score(&state, player, &params, &w).total;
            let sq = simple_sqrt_score(&state, player, &params, &w).total;
            prop_assert!(sq >= s - 1e-12);
            let all_full = state.units_of(player).all(|u| u.hp == state.stats().get(u.kind).max_hp);
            if all_full {
                prop_assert!(close(s, sq, 1e-12));
            }
        }
    }

    #[test]
    fn simple_below_upper_bound(seed in 0u64..10_000) {
        let state = arbitrary_state(seed);
        let params = SimpleParams::default();
        let w = params.initial_weights();
        let bound = simple_upper_bound(&state, &params);
        for player in [P0, P1] {
            prop_assert!(simple_score(&state, player, &params, &w).total <= bound + 1e-9);
        }
    }

    #[test]
    fn hp_monotonicity(seed in 0u64..5_000) {
        let state = arbitrary_state(seed);
        let params = defaults();
        // Damaging any single unit must not raise its side's base score.
        let target = state.units().first().map(|u| (u.id, u.owner, u.hp));
        if let Some((id, owner, hp)) = target {
            if hp > 1 {
                let mut hurt = state.clone();
                for u in hurt.units_mut() {
                    if u.id == id {
                        u.hp -= 1;
                    }
                }
                for kind in EvalKind::ALL {
                    let w = params.initial_weights(kind);
                    let before = base_score(&state, owner, kind, &params, &w).total;
                    let after = base_score(&hurt, owner, kind, &params, &w).total;
                    prop_assert!(after <= before + 1e-12);
                }
            }
        }
    }
}
