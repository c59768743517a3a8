//! `rtslab` — batch front-end for the evaluation laboratory.
//!
//! Subcommands: `match` (one game, record JSON), `tournament` (round-robin
//! from a config file, CSV + manifest artifacts), `bench-eval` (adaptation
//! overhead timing), `validate-config` (parse and check only).
//!
//! Exit codes: 0 success, 2 usage, 3 configuration, 4 runtime.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use rtslab_core::config::{hex, AgentSpec, RunConfig, SCHEMA_VERSION};
use rtslab_core::game::Winner;
use rtslab_core::tournament::{
    fmt6, generate_state_corpus, matches_csv, measure_eval_overhead, resolve_map, resolve_stats,
    run_match, run_round_robin, score_csv, MatchSettings,
};

/// Overrides `tournament.parallel_matches` when set.
const WORKERS_ENV: &str = "RTSLAB_WORKERS";

#[derive(Parser)]
#[command(name = "rtslab", version, about = "Real-time strategy evaluation laboratory")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Play a single match and write its record as JSON.
    Match(MatchArgs),
    /// Run the round-robin tournament described by a config file.
    Tournament(TournamentArgs),
    /// Measure the overhead of adaptive over frozen evaluation.
    BenchEval(BenchArgs),
    /// Parse and validate a config file without running anything.
    ValidateConfig(ValidateArgs),
}

#[derive(Args)]
struct MatchArgs {
    /// Built-in map name (m1, m2, m3) or a map JSON file.
    #[arg(long)]
    map: String,
    /// First seat, as planner:variant (e.g. idrtminimax:DL).
    #[arg(long)]
    p0: String,
    /// Second seat, same grammar.
    #[arg(long)]
    p1: String,
    /// Per-decision budget in milliseconds.
    #[arg(long = "budget-ms")]
    budget_ms: Option<u64>,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Record destination.
    #[arg(long, default_value = "match.json")]
    out: PathBuf,
}

#[derive(Args)]
struct TournamentArgs {
    /// Run configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Artifact directory; defaults to the config's `output.dir`.
    #[arg(long = "out-dir")]
    out_dir: Option<PathBuf>,
    /// Print the planned match count and exit without playing.
    #[arg(long = "dry-run")]
    dry_run: bool,
    /// Manifest from a previous run; verifies the config hash before playing
    /// and the matches CSV hash after, failing if either differs.
    #[arg(long)]
    replay: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Corpus descriptor JSON: {"map": .., "count": .., "seed": ..}.
    #[arg(long, group = "source")]
    corpus: Option<PathBuf>,
    /// Generate the corpus from this map instead of a descriptor file.
    #[arg(long = "generate-corpus", group = "source", required_unless_present = "corpus")]
    generate_corpus: Option<String>,
    /// States in a generated corpus (at least 100).
    #[arg(long = "corpus-count", default_value_t = 100)]
    corpus_count: usize,
    #[arg(long = "corpus-seed", default_value_t = 7)]
    corpus_seed: u64,
    /// Timed calls per evaluation function (at least 1000).
    #[arg(long)]
    reps: u64,
    /// Timing report destination.
    #[arg(long, default_value = "bench.json")]
    out: PathBuf,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    config: PathBuf,
}

/// Post-parse failures: configuration problems exit 3, runtime ones 4.
enum Failure {
    Config(String),
    Runtime(String),
}

impl Failure {
    fn config(e: impl std::fmt::Display) -> Failure {
        Failure::Config(e.to_string())
    }

    fn runtime(e: impl std::fmt::Display) -> Failure {
        Failure::Runtime(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Match(args) => cmd_match(&args),
        Cmd::Tournament(args) => cmd_tournament(&args),
        Cmd::BenchEval(args) => cmd_bench_eval(&args),
        Cmd::ValidateConfig(args) => cmd_validate_config(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(4)
        }
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)
            .map_err(|e| Failure::runtime(format!("cannot create {}: {e}", parent.display())))?;
    }
    std::fs::write(path, contents)
        .map_err(|e| Failure::runtime(format!("cannot write {}: {e}", path.display())))
}

fn sha256_hex(text: &str) -> String {
    let mut h = Sha256::new();
    h.update(text.as_bytes());
    hex(&h.finalize())
}

fn cmd_match(args: &MatchArgs) -> Result<(), Failure> {
    let p0 = AgentSpec::parse(&args.p0).map_err(|e| Failure::config(format!("--p0: {e}")))?;
    let p1 = AgentSpec::parse(&args.p1).map_err(|e| Failure::config(format!("--p1: {e}")))?;
    let map = resolve_map(&args.map).map_err(Failure::config)?;

    let mut cfg = RunConfig::default();
    if let Some(ms) = args.budget_ms {
        cfg.tournament.wall_ms = ms;
    }
    cfg.validate().map_err(Failure::config)?;
    let mut settings = MatchSettings::from_config(&cfg);
    // Standalone matches run to the engine cap, not the tournament one.
    settings.max_cycles = cfg.engine.max_cycles;
    let table = resolve_stats(cfg.engine.stats_file.as_deref()).map_err(Failure::config)?;

    let record = run_match(&args.map, &map, table, [p0, p1], args.seed, &settings);
    let json = serde_json::to_string_pretty(&record).expect("record serializes");
    write_file(&args.out, &format!("{json}\n"))?;

    let outcome = match record.winner {
        Winner::P0 => format!("{} wins", record.agent0),
        Winner::P1 => format!("{} wins", record.agent1),
        Winner::Draw => "draw".to_string(),
    };
    println!(
        "{} {} vs {} seed {}: {} at cycle {} ({}) digest {} -> {}",
        record.map,
        record.agent0,
        record.agent1,
        record.seed,
        outcome,
        record.end_cycle,
        record.reason,
        &record.digest[..12],
        args.out.display()
    );
    Ok(())
}

/// Everything needed to reproduce a run: the full config plus digests to
/// verify both the inputs and the outputs of a replay.
#[derive(Serialize, Deserialize)]
struct Manifest {
    schema: u32,
    crate_version: String,
    config_sha256: String,
    master_seed: u64,
    agents: Vec<String>,
    maps: Vec<String>,
    matches: usize,
    matches_csv_sha256: String,
    config: serde_json::Value,
}

fn cmd_tournament(args: &TournamentArgs) -> Result<(), Failure> {
    let mut cfg = RunConfig::load(&args.config).map_err(Failure::config)?;
    if let Ok(raw) = std::env::var(WORKERS_ENV) {
        let workers: u32 = raw
            .parse()
            .ok()
            .filter(|w| *w >= 1)
            .ok_or_else(|| Failure::Config(format!("{WORKERS_ENV}={raw}: need an integer >= 1")))?;
        cfg.tournament.parallel_matches = workers;
    }

    let t = &cfg.tournament;
    let pairings = t.agents.len() * (t.agents.len() - 1) / 2;
    let planned = pairings * t.maps.len() * t.games_per_pairing as usize;
    if args.dry_run {
        println!(
            "dry run: {planned} matches ({pairings} pairings x {} maps x {} games)",
            t.maps.len(),
            t.games_per_pairing
        );
        return Ok(());
    }

    let expected = match &args.replay {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::config(format!("cannot read {}: {e}", path.display())))?;
            let manifest: Manifest = serde_json::from_str(&text)
                .map_err(|e| Failure::config(format!("{} is not a manifest: {e}", path.display())))?;
            if manifest.config_sha256 != cfg.digest() {
                return Err(Failure::Config(format!(
                    "replay refused: manifest config {} != supplied config {}",
                    &manifest.config_sha256[..12],
                    &cfg.digest()[..12]
                )));
            }
            Some(manifest)
        }
        None => None,
    };

    let run = run_round_robin(&cfg).map_err(Failure::config)?;
    let table = run.score_table();
    let matches = matches_csv(&run.records);
    let scores = score_csv(&table);

    let manifest = Manifest {
        schema: SCHEMA_VERSION,
        crate_version: env!("CARGO_PKG_VERSION").to_string(),
        config_sha256: cfg.digest(),
        master_seed: cfg.tournament.seed,
        agents: cfg.tournament.agents.clone(),
        maps: cfg.tournament.maps.clone(),
        matches: run.records.len(),
        matches_csv_sha256: sha256_hex(&matches),
        config: serde_json::from_str(&cfg.canonical_json()).expect("canonical config is JSON"),
    };

    let dir = args.out_dir.clone().unwrap_or_else(|| cfg.output.dir.clone());
    write_file(&dir.join("matches.csv"), &matches)?;
    write_file(&dir.join("scores.csv"), &scores)?;
    let records = serde_json::to_string_pretty(&run.records).expect("records serialize");
    write_file(&dir.join("records.json"), &format!("{records}\n"))?;
    let manifest_json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    write_file(&dir.join("manifest.json"), &format!("{manifest_json}\n"))?;

    for (i, name) in table.agents.iter().enumerate() {
        println!("{} {}", fmt6(table.overall[i]), name);
    }
    println!(
        "{} matches -> {}/{{matches.csv,scores.csv,records.json,manifest.json}}",
        run.records.len(),
        dir.display()
    );

    if let Some(previous) = expected {
        if previous.matches_csv_sha256 != manifest.matches_csv_sha256 {
            return Err(Failure::Runtime(format!(
                "replay diverged: matches CSV {} != manifest {}",
                &manifest.matches_csv_sha256[..12],
                &previous.matches_csv_sha256[..12]
            )));
        }
        println!("replay verified: matches CSV identical to manifest");
    }
    Ok(())
}

/// Deterministic corpus recipe; the states themselves are derived.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CorpusSpec {
    map: String,
    #[serde(default = "default_corpus_count")]
    count: usize,
    #[serde(default = "default_corpus_seed")]
    seed: u64,
}

fn default_corpus_count() -> usize {
    100
}

fn default_corpus_seed() -> u64 {
    7
}

fn cmd_bench_eval(args: &BenchArgs) -> Result<(), Failure> {
    let spec = match (&args.corpus, &args.generate_corpus) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::config(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| Failure::config(format!("{}: {e}", path.display())))?
        }
        (None, Some(map)) => CorpusSpec {
            map: map.clone(),
            count: args.corpus_count,
            seed: args.corpus_seed,
        },
        (None, None) => unreachable!("clap enforces the corpus source group"),
    };

    let map = resolve_map(&spec.map).map_err(Failure::config)?;
    let table = resolve_stats(None).map_err(Failure::config)?;
    let corpus = generate_state_corpus(&map, table, spec.count, spec.seed);
    let cfg = RunConfig::default();
    let stats = measure_eval_overhead(&corpus, &cfg.eval.params(), &cfg.eval.optimizer, args.reps)
        .map_err(Failure::config)?;

    let json = serde_json::to_string_pretty(&stats).expect("timings serialize");
    write_file(&args.out, &format!("{json}\n"))?;
    for k in &stats.kinds {
        println!(
            "{}: static {:.1} ns/call, dynamic {:.1} ns/call, overhead x{:.4}",
            k.kind.code(),
            k.static_mean_ns,
            k.dynamic_mean_ns,
            k.overhead_ratio
        );
    }
    println!(
        "max overhead x{:.4} over {} calls/function on {} states -> {}",
        stats.max_ratio(),
        stats.calls_per_function,
        stats.corpus_states,
        args.out.display()
    );
    Ok(())
}

fn cmd_validate_config(args: &ValidateArgs) -> Result<(), Failure> {
    let cfg = RunConfig::load(&args.config).map_err(Failure::config)?;
    let agents = cfg.parsed_agents().map_err(Failure::config)?;
    let t = &cfg.tournament;
    let planned = agents.len() * (agents.len() - 1) / 2 * t.maps.len() * t.games_per_pairing as usize;
    println!(
        "ok: schema {}, {} agents, {} maps, {} planned matches, digest {}",
        cfg.schema.0,
        agents.len(),
        t.maps.len(),
        planned,
        &cfg.digest()[..12]
    );
    Ok(())
}
