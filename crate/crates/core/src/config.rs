//! Run configuration: one JSON document that pins everything a match,
//! tournament, or benchmark needs — engine limits, evaluation parameters,
//! optimizer constants, planner budgets, and the tournament roster.
//!
//! Configs are strict: unknown keys are rejected so a typo cannot silently
//! fall back to a default. `digest()` hashes the canonical serialization and
//! is recorded in output manifests so a result can be traced back to the
//! exact settings that produced it.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::adaptive::OptimizerConfig;
use crate::eval::{EvalKind, EvalParams, LanchesterParams, SimpleParams};
use crate::search::{LeafMode, MoveGenLimits, PortfolioConfig, Script, SearchBudget};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("config is not valid JSON: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid config: {field}: {why}")]
    Invalid { field: String, why: String },
}

fn invalid(field: &str, why: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field: field.to_string(),
        why: why.into(),
    }
}

/// Which planner drives an agent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlannerKind {
    IdAbcd,
    IdRtMinimax,
    Portfolio,
}

impl PlannerKind {
    pub const ALL: [PlannerKind; 3] = [
        PlannerKind::IdAbcd,
        PlannerKind::IdRtMinimax,
        PlannerKind::Portfolio,
    ];

    pub fn code(self) -> &'static str {
        match self {
            PlannerKind::IdAbcd => "idabcd",
            PlannerKind::IdRtMinimax => "idrtminimax",
            PlannerKind::Portfolio => "portfolio",
        }
    }

    pub fn from_code(code: &str) -> Option<PlannerKind> {
        PlannerKind::ALL.iter().copied().find(|p| p.code() == code)
    }
}

impl fmt::Display for PlannerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// An evaluation variant: one of the three base functions, either with its
/// fixed initial weights or with online weight adaptation enabled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EvalVariant {
    pub kind: EvalKind,
    pub dynamic: bool,
}

impl EvalVariant {
    pub const ALL: [EvalVariant; 6] = [
        EvalVariant { kind: EvalKind::Lanchester, dynamic: false },
        EvalVariant { kind: EvalKind::Simple, dynamic: false },
        EvalVariant { kind: EvalKind::SimpleSqrt, dynamic: false },
        EvalVariant { kind: EvalKind::Lanchester, dynamic: true },
        EvalVariant { kind: EvalKind::Simple, dynamic: true },
        EvalVariant { kind: EvalKind::SimpleSqrt, dynamic: true },
    ];

    pub fn code(self) -> String {
        if self.dynamic {
            format!("D{}", self.kind.code())
        } else {
            self.kind.code().to_string()
        }
    }

    pub fn from_code(code: &str) -> Option<EvalVariant> {
        let (dynamic, base) = match code.strip_prefix('D') {
            Some(rest) => (true, rest),
            None => (false, code),
        };
        EvalKind::from_code(base).map(|kind| EvalVariant { kind, dynamic })
    }
}

impl fmt::Display for EvalVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.code())
    }
}

/// A tournament contestant: `planner:variant`, e.g. `"idabcd:DL"`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AgentSpec {
    pub planner: PlannerKind,
    pub eval: EvalVariant,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AgentParseError {
    #[error("agent `{0}` must look like `planner:variant`, e.g. `idabcd:DL`")]
    Shape(String),
    #[error("unknown planner `{0}` (expected idabcd, idrtminimax, or portfolio)")]
    Planner(String),
    #[error("unknown eval variant `{0}` (expected L, S, SQ, DL, DS, or DSQ)")]
    Variant(String),
}

impl AgentSpec {
    pub fn parse(text: &str) -> Result<AgentSpec, AgentParseError> {
        let (planner, variant) = text
            .split_once(':')
            .ok_or_else(|| AgentParseError::Shape(text.to_string()))?;
        let planner = PlannerKind::from_code(planner)
            .ok_or_else(|| AgentParseError::Planner(planner.to_string()))?;
        let eval = EvalVariant::from_code(variant)
            .ok_or_else(|| AgentParseError::Variant(variant.to_string()))?;
        Ok(AgentSpec { planner, eval })
    }

    pub fn name(&self) -> String {
        format!("{}:{}", self.planner, self.eval)
    }
}

impl fmt::Display for AgentSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.planner, self.eval)
    }
}

/// Whether decision budgets are enforced on the wall clock or on a virtual
/// clock that converts the millisecond budget into a node allowance.
/// Virtual budgets make whole matches bit-reproducible across machines.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BudgetMode {
    Wall,
    Virtual,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EngineConfig {
    /// Optional unit-stat override file; `None` means the built-in table.
    pub stats_file: Option<PathBuf>,
    /// Cycle cap for single matches run outside a tournament.
    pub max_cycles: u32,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            stats_file: None,
            max_cycles: 10_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    pub lanchester: LanchesterParams,
    pub simple: SimpleParams,
    pub optimizer: OptimizerConfig,
}

impl EvalConfig {
    pub fn params(&self) -> EvalParams {
        EvalParams {
            lanchester: self.lanchester.clone(),
            simple: self.simple.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlannerConfig {
    /// Planner used by the `match` command (tournament agents carry their own).
    pub planner: PlannerKind,
    pub wall_ms: u64,
    /// Depth cap; iterative deepening normally stops on budget well before it.
    pub max_depth: u32,
    pub playout_horizon: u32,
    pub safety_margin_ms: u64,
    /// Portfolio hill-climbing sweeps per decision.
    pub response_iterations: u32,
    /// Portfolio script pool.
    pub scripts: Vec<Script>,
    /// How the tree planners score their frontier: direct evaluation, or a
    /// scripted rollout first. Rollouts are the deployment default — a
    /// material evaluation has no gradient toward a distant enemy, so
    /// eval-only leaves stall on anything but close-quarters maps.
    pub leaf: LeafMode,
    /// Joint-action enumeration caps for the tree planners.
    pub limits: MoveGenLimits,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        PlannerConfig {
            planner: PlannerKind::IdRtMinimax,
            wall_ms: 100,
            max_depth: 30,
            playout_horizon: 100,
            safety_margin_ms: 5,
            response_iterations: 1,
            scripts: Script::ALL.to_vec(),
            leaf: LeafMode::Playout {
                script: Script::WorkerRush,
            },
            limits: MoveGenLimits::default(),
        }
    }
}

impl PlannerConfig {
    pub fn budget(&self) -> SearchBudget {
        SearchBudget {
            wall_ms: self.wall_ms,
            max_depth: self.max_depth,
            playout_horizon: self.playout_horizon,
            safety_margin_ms: self.safety_margin_ms,
        }
    }

    pub fn portfolio(&self) -> PortfolioConfig {
        PortfolioConfig {
            scripts: self.scripts.clone(),
            response_iterations: self.response_iterations,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TournamentConfig {
    /// Built-in map names (`m1`, `m2`, `m3`) or JSON map file paths.
    pub maps: Vec<String>,
    /// Contestants as `planner:variant` strings; every pair plays every map.
    pub agents: Vec<String>,
    /// Games per (map, pair); seats swap after the first half, so keep it even.
    pub games_per_pairing: u32,
    /// Per-decision budget in milliseconds.
    pub wall_ms: u64,
    pub max_cycles: u32,
    pub seed: u64,
    /// Worker threads for match execution; results are order-stable
    /// regardless of this value.
    pub parallel_matches: u32,
    pub budget: BudgetMode,
    /// Virtual-clock conversion rate: nodes granted per budgeted millisecond.
    pub nodes_per_ms: u64,
    /// Virtual-clock noise: each decision's node allowance is scaled by a
    /// seeded factor in `[1 - jitter, 1 + jitter)`.
    pub jitter: f64,
}

impl Default for TournamentConfig {
    fn default() -> Self {
        TournamentConfig {
            maps: vec!["m1".to_string()],
            agents: EvalVariant::ALL
                .iter()
                .map(|v| format!("idrtminimax:{}", v.code()))
                .collect(),
            games_per_pairing: 10,
            wall_ms: 20,
            max_cycles: 2_000,
            seed: 7,
            parallel_matches: 4,
            budget: BudgetMode::Virtual,
            nodes_per_ms: 1_000,
            jitter: 0.2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: PathBuf::from("out"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub schema: Schema,
    pub engine: EngineConfig,
    pub eval: EvalConfig,
    pub planner: PlannerConfig,
    pub tournament: TournamentConfig,
    pub output: OutputConfig,
}

/// Wrapper so `schema` serializes as a bare version number but still
/// defaults correctly when omitted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Schema(pub u32);

impl Default for Schema {
    fn default() -> Self {
        Schema(SCHEMA_VERSION)
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<RunConfig, ConfigError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<RunConfig, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        let cfg = RunConfig::from_json(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Canonical serialization: serde_json preserves struct field order, so
    /// two equal configs always produce identical bytes.
    pub fn canonical_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("config serializes");
        text.push('\n');
        text
    }

    /// Hex SHA-256 of the canonical serialization.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.canonical_json().as_bytes());
        hex(&h.finalize())
    }

    pub fn parsed_agents(&self) -> Result<Vec<AgentSpec>, ConfigError> {
        self.tournament
            .agents
            .iter()
            .map(|a| {
                AgentSpec::parse(a)
                    .map_err(|e| invalid("tournament.agents", e.to_string()))
            })
            .collect()
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.schema.0 != SCHEMA_VERSION {
            return Err(invalid(
                "schema",
                format!("unsupported version {} (this build reads {SCHEMA_VERSION})", self.schema.0),
            ));
        }
        if self.engine.max_cycles == 0 {
            return Err(invalid("engine.max_cycles", "must be >= 1"));
        }
        self.eval
            .optimizer
            .validate()
            .map_err(|e| invalid("eval.optimizer", e.to_string()))?;
        for (name, w) in [
            ("eval.lanchester.initial_weights", self.eval.lanchester.initial_weights()),
            ("eval.simple.initial_weights", self.eval.simple.initial_weights()),
        ] {
            for (c, v) in w.as_array().iter().enumerate() {
                if !v.is_finite() || *v <= 0.0 {
                    return Err(invalid(name, format!("component {c} must be finite and > 0, got {v}")));
                }
            }
        }
        self.planner
            .budget()
            .validate()
            .map_err(|e| invalid("planner", e.to_string()))?;
        let agents = self.parsed_agents()?;
        let needs_portfolio = self.planner.planner == PlannerKind::Portfolio
            || agents.iter().any(|a| a.planner == PlannerKind::Portfolio);
        if needs_portfolio {
            self.planner
                .portfolio()
                .validate()
                .map_err(|e| invalid("planner.scripts", e.to_string()))?;
        }
        let t = &self.tournament;
        if t.maps.is_empty() {
            return Err(invalid("tournament.maps", "need at least one map"));
        }
        if agents.len() < 2 {
            return Err(invalid("tournament.agents", "need at least two agents"));
        }
        for (i, a) in agents.iter().enumerate() {
            if agents[..i].contains(a) {
                return Err(invalid(
                    "tournament.agents",
                    format!("duplicate agent `{}`", a.name()),
                ));
            }
        }
        if t.games_per_pairing < 2 || t.games_per_pairing % 2 != 0 {
            return Err(invalid(
                "tournament.games_per_pairing",
                "must be even and >= 2 so seats can swap",
            ));
        }
        if t.wall_ms == 0 {
            return Err(invalid("tournament.wall_ms", "must be >= 1"));
        }
        if t.max_cycles == 0 {
            return Err(invalid("tournament.max_cycles", "must be >= 1"));
        }
        if t.parallel_matches == 0 {
            return Err(invalid("tournament.parallel_matches", "must be >= 1"));
        }
        if t.nodes_per_ms == 0 {
            return Err(invalid("tournament.nodes_per_ms", "must be >= 1"));
        }
        if !(0.0..1.0).contains(&t.jitter) {
            return Err(invalid("tournament.jitter", "must lie in [0, 1)"));
        }
        Ok(())
    }
}

pub fn hex(bytes: &[u8]) -> String {
    let mut s = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        use std::fmt::Write;
        write!(s, "{b:02x}").unwrap();
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_validates_and_round_trips() {
        let cfg = RunConfig::default();
        cfg.validate().unwrap();
        let text = cfg.canonical_json();
        let back = RunConfig::from_json(&text).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.digest(), cfg.digest());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = RunConfig::from_json(r#"{"tournament": {"gmaes_per_pairing": 4}}"#).unwrap_err();
        assert!(matches!(err, ConfigError::Parse(_)), "got {err:?}");
    }

    #[test]
    fn agent_grammar_parses_all_planners_and_variants() {
        for p in PlannerKind::ALL {
            for v in EvalVariant::ALL {
                let name = format!("{}:{}", p.code(), v.code());
                let spec = AgentSpec::parse(&name).unwrap();
                assert_eq!(spec.planner, p);
                assert_eq!(spec.eval, v);
                assert_eq!(spec.name(), name);
            }
        }
        assert_eq!(
            AgentSpec::parse("idabcd").unwrap_err(),
            AgentParseError::Shape("idabcd".to_string())
        );
        assert_eq!(
            AgentSpec::parse("alphabeta:L").unwrap_err(),
            AgentParseError::Planner("alphabeta".to_string())
        );
        assert_eq!(
            AgentSpec::parse("idabcd:XL").unwrap_err(),
            AgentParseError::Variant("XL".to_string())
        );
    }

    #[test]
    fn validation_names_the_offending_field() {
        let mut cfg = RunConfig::default();
        cfg.tournament.games_per_pairing = 3;
        let err = cfg.validate().unwrap_err();
        assert!(err.to_string().contains("tournament.games_per_pairing"), "{err}");

        let mut cfg = RunConfig::default();
        cfg.tournament.agents.push(cfg.tournament.agents[0].clone());
        let err = cfg.validate().unwrap_err();
        assert!(err.to_string().contains("duplicate"), "{err}");

        let mut cfg = RunConfig::default();
        cfg.eval.optimizer.beta1 = 1.5;
        let err = cfg.validate().unwrap_err();
        assert!(err.to_string().contains("eval.optimizer"), "{err}");

        let mut cfg = RunConfig::default();
        cfg.schema = Schema(99);
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn digest_tracks_content_not_formatting() {
        let cfg = RunConfig::default();
        // Same settings spelled differently (re-ordered keys, no whitespace).
        let text = r#"{"tournament":{"seed":7},"schema":1}"#;
        let parsed = RunConfig::from_json(text).unwrap();
        assert_eq!(parsed.digest(), cfg.digest());

        let mut changed = cfg.clone();
        changed.tournament.seed = 8;
        assert_ne!(changed.digest(), cfg.digest());
    }

    #[test]
    fn variant_codes_round_trip() {
        for v in EvalVariant::ALL {
            assert_eq!(EvalVariant::from_code(&v.code()), Some(v));
        }
        assert_eq!(EvalVariant::from_code("D"), None);
        assert_eq!(EvalVariant::from_code(""), None);
    }
}
