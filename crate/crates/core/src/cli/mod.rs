//! Command-line front end.
//!
//! Every subcommand writes one JSON report (or DOT text) to standard output.
//! Exit codes: 0 success, 1 usage or input error, 2 indeterminate or
//! truncated result, 3 invariant violation or table mismatch.

pub mod files;
pub mod report;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::automaton::{explore, to_dot};
use crate::game::{measure, play, validate, GameSpec, Player, Strategy};
use crate::groups::{invariant_subspace, reachable_invariant, GroupKind, Reachability};
use crate::strategy::{
    find_strong, find_weak, verify_table, Finding, SearchConfig, StrategyError, DEFAULT_SEARCH_CAP,
};

use files::{AlphabetFile, FileError, GameFile, StrategyFile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INDETERMINATE: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "qgame",
    version,
    about = "Sequential quantum games over unitary action groups"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StrengthArg {
    Strong,
    Weak,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Play two strategies and report the trajectory, distribution and verdict.
    Play {
        game: PathBuf,
        strategy_p1: PathBuf,
        strategy_p2: PathBuf,
    },
    /// Search for a strong or weak winning strategy.
    Analyze {
        game: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        player: u8,
        #[arg(long, value_enum, default_value_t = StrengthArg::Strong)]
        strength: StrengthArg,
        /// Maximum playouts for the query.
        #[arg(long, default_value_t = DEFAULT_SEARCH_CAP, value_parser = clap::value_parser!(u64).range(1..))]
        cap: u64,
    },
    /// Check the strong-winning-strategy table on concrete instances.
    VerifyTheorems {
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u8).range(2..=4))]
        max_n: u8,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=3))]
        max_m: u8,
        #[arg(long, default_value_t = DEFAULT_SEARCH_CAP, value_parser = clap::value_parser!(u64).range(1..))]
        cap: u64,
    },
    /// Invariant subspace of player 2's group and a reachable invariant state.
    Invariants { game: PathBuf },
    /// Reachable-state automaton as Graphviz DOT.
    ExportDot {
        game: PathBuf,
        alphabet: PathBuf,
        /// Rounds to explore; defaults to the whole game.
        #[arg(long)]
        depth: Option<usize>,
    },
}

/// What a command printed and how it exits.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CommandOutput {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl CommandOutput {
    fn ok(stdout: String) -> Self {
        Self {
            stdout,
            stderr: String::new(),
            code: EXIT_OK,
        }
    }

    fn json(v: &Value, code: i32) -> Self {
        let mut stdout = serde_json::to_string_pretty(v).unwrap_or_default();
        stdout.push('\n');
        Self {
            stdout,
            stderr: String::new(),
            code,
        }
    }

    fn fail(code: i32, message: impl std::fmt::Display) -> Self {
        Self {
            stdout: String::new(),
            stderr: format!("error: {message}\n"),
            code,
        }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> CommandOutput
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(cli.command),
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                CommandOutput {
                    stdout: String::new(),
                    stderr: text,
                    code: EXIT_USAGE,
                }
            } else {
                CommandOutput::ok(text)
            }
        }
    }
}

pub fn execute(command: Command) -> CommandOutput {
    let result = match command {
        Command::Play {
            game,
            strategy_p1,
            strategy_p2,
        } => cmd_play(&game, &strategy_p1, &strategy_p2),
        Command::Analyze {
            game,
            player,
            strength,
            cap,
        } => {
            let player = if player == 1 {
                Player::One
            } else {
                Player::Two
            };
            cmd_analyze(&game, player, strength, cap)
        }
        Command::VerifyTheorems { max_n, max_m, cap } => {
            cmd_verify_theorems(usize::from(max_n), usize::from(max_m), cap)
        }
        Command::Invariants { game } => cmd_invariants(&game),
        Command::ExportDot {
            game,
            alphabet,
            depth,
        } => cmd_export_dot(&game, &alphabet, depth),
    };
    result.unwrap_or_else(|e| e)
}

type CmdResult = Result<CommandOutput, CommandOutput>;

fn read(path: &Path) -> Result<String, CommandOutput> {
    std::fs::read_to_string(path)
        .map_err(|e| CommandOutput::fail(EXIT_USAGE, format!("{}: {e}", path.display())))
}

fn input_error(e: FileError) -> CommandOutput {
    CommandOutput::fail(EXIT_USAGE, e)
}

fn strategy_error(e: StrategyError) -> CommandOutput {
    match e {
        StrategyError::Internal(_) => CommandOutput::fail(EXIT_INVARIANT, e),
        other => CommandOutput::fail(EXIT_USAGE, other),
    }
}

fn load_game(path: &Path) -> Result<(GameFile, GameSpec), CommandOutput> {
    let source = path.display().to_string();
    let file = GameFile::parse(&source, &read(path)?).map_err(input_error)?;
    let spec = file.to_spec(&source).map_err(input_error)?;
    Ok((file, spec))
}

fn load_strategy(
    path: &Path,
    spec: &GameSpec,
    expected: Player,
) -> Result<Strategy, CommandOutput> {
    let source = path.display().to_string();
    let file: StrategyFile = files::parse_json(&source, &read(path)?).map_err(input_error)?;
    if file.player != expected {
        return Err(input_error(FileError {
            source,
            path: "player".into(),
            message: format!("expected {expected}, found {}", file.player),
        }));
    }
    let s = file.to_strategy(&source, spec.dim()).map_err(input_error)?;
    validate(spec, &s).map_err(|v| {
        let path = match v {
            crate::game::Violation::Length { .. } => "moves".to_string(),
            crate::game::Violation::Dimension { index }
            | crate::game::Violation::Inadmissible { index }
            | crate::game::Violation::Undecided { index } => format!("moves[{index}]"),
        };
        input_error(FileError {
            source: source.clone(),
            path,
            message: v.to_string(),
        })
    })?;
    Ok(s)
}

pub fn cmd_play(game: &Path, s1: &Path, s2: &Path) -> CmdResult {
    let (file, spec) = load_game(game)?;
    let a = load_strategy(s1, &spec, Player::One)?;
    let b = load_strategy(s2, &spec, Player::Two)?;
    let p = play(&spec, &a, &b).map_err(|e| CommandOutput::fail(EXIT_USAGE, e))?;
    let outcome = measure(&p, &spec);
    Ok(CommandOutput::json(
        &report::play(&file.hash(), &p, &outcome),
        EXIT_OK,
    ))
}

pub fn cmd_analyze(game: &Path, player: Player, strength: StrengthArg, cap: u64) -> CmdResult {
    let (file, spec) = load_game(game)?;
    let cfg = SearchConfig { cap };
    let verdict = match strength {
        StrengthArg::Strong => find_strong(&spec, player, cfg),
        StrengthArg::Weak => find_weak(&spec, player, cfg),
    }
    .map_err(strategy_error)?;
    let code = match verdict.result {
        Finding::Indeterminate { .. } => EXIT_INDETERMINATE,
        _ => EXIT_OK,
    };
    Ok(CommandOutput::json(
        &report::analysis(&file.hash(), &verdict),
        code,
    ))
}

pub fn cmd_verify_theorems(max_n: usize, max_m: usize, cap: u64) -> CmdResult {
    let table = verify_table(max_n, max_m, SearchConfig { cap }).map_err(strategy_error)?;
    let params = format!("verify-theorems max_n={max_n} max_m={max_m} cap={cap}");
    let hash = hex::encode(Sha256::digest(params.as_bytes()));
    let code = if table.all_pass {
        EXIT_OK
    } else {
        EXIT_INVARIANT
    };
    Ok(CommandOutput::json(&report::table(&hash, &table), code))
}

pub fn cmd_invariants(game: &Path) -> CmdResult {
    let (file, spec) = load_game(game)?;
    let gb = spec.group(Player::Two);
    let basis = invariant_subspace(gb);
    let note = match gb.kind() {
        GroupKind::Unitary => Some("U(n) fixes no nonzero vector; the invariant subspace is empty"),
        _ if basis.is_empty() => Some("the invariant subspace is empty"),
        _ => None,
    };
    let reachable = match reachable_invariant(spec.group(Player::One), gb, &spec.initial_state())
        .map_err(|e| CommandOutput::fail(EXIT_USAGE, e))?
    {
        Reachability::Found { mover, state } => json!({
            "status": "found",
            "mover": report::strategy(&Strategy::new(Player::One, vec![mover]))["moves"][0].clone(),
            "state": report::state(&state),
        }),
        Reachability::Absent => json!({
            "status": "absent",
            "message": "no reachable invariant state",
        }),
        Reachability::Indeterminate(reason) => json!({
            "status": "indeterminate",
            "message": reason,
        }),
    };
    Ok(CommandOutput::json(
        &report::invariants(&file.hash(), &basis, note, reachable),
        EXIT_OK,
    ))
}

pub fn cmd_export_dot(game: &Path, alphabet: &Path, depth: Option<usize>) -> CmdResult {
    let (_, spec) = load_game(game)?;
    let source = alphabet.display().to_string();
    let file: AlphabetFile = files::parse_json(&source, &read(alphabet)?).map_err(input_error)?;
    let (a, b) = file.to_moves(&source, spec.dim()).map_err(input_error)?;
    let depth = depth.unwrap_or(spec.schedule().total_rounds());
    let automaton =
        explore(&spec, &a, &b, depth).map_err(|e| CommandOutput::fail(EXIT_USAGE, e))?;
    let mut out = CommandOutput::ok(to_dot(&automaton));
    if automaton.truncated {
        out.stderr = format!(
            "warning: exploration truncated at {} nodes\n",
            crate::automaton::MAX_NODES
        );
        out.code = EXIT_INDETERMINATE;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn usage_errors() {
        let out = run(["qgame", "verify-theorems", "--max-n", "9"]);
        assert_eq!(out.code, EXIT_USAGE);
        assert!(out.stdout.is_empty());
        let out = run(["qgame", "analyze", "g.json", "--player", "3"]);
        assert_eq!(out.code, EXIT_USAGE);
        let out = run(["qgame", "analyze", "g.json", "--player", "1", "--cap", "0"]);
        assert_eq!(out.code, EXIT_USAGE);
        let out = run(["qgame", "--help"]);
        assert_eq!(out.code, EXIT_OK);
        assert!(out.stdout.contains("export-dot"));
    }

    #[test]
    fn small_table_report() {
        let out = run(["qgame", "verify-theorems", "--max-n", "2", "--max-m", "1"]);
        assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
        let v: Value = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(v["all_pass"], json!(true));
        assert_eq!(v["rows"].as_array().unwrap().len(), 8);
        assert_eq!(v["tool_version"], json!(report::TOOL_VERSION));
    }

    #[test]
    fn missing_file() {
        let out = run(["qgame", "invariants", "/nonexistent/game.json"]);
        assert_eq!(out.code, EXIT_USAGE);
        assert!(out.stderr.contains("/nonexistent/game.json"));
    }
}
