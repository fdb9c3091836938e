//! JSON file formats: games, strategies and move alphabets.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::automaton::NamedMove;
use crate::game::{GameError, GameSpec, Player, Schedule, Strategy};
use crate::gate::{GateTerm, Move};
use crate::groups::{ActionGroup, GroupKind, DEFAULT_CLOSURE_CAP};

/// A failure tied to a location in an input document.
#[derive(Clone, Debug, PartialEq)]
pub struct FileError {
    /// Source file (or a role name such as `game`).
    pub source: String,
    /// Key path inside the document, `.` when the whole document is at fault.
    pub path: String,
    pub message: String,
}

impl std::fmt::Display for FileError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: at {}: {}", self.source, self.path, self.message)
    }
}

impl FileError {
    fn new(source: &str, path: impl Into<String>, message: impl ToString) -> Self {
        Self {
            source: source.to_string(),
            path: path.into(),
            message: message.to_string(),
        }
    }
}

/// Parses JSON, reporting the key path of the first mismatch.
pub fn parse_json<T: DeserializeOwned>(source: &str, text: &str) -> Result<T, FileError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        FileError::new(source, path, e.into_inner())
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ScheduleFile {
    Canonical { m: usize },
    Noncanonical { m: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupKindFile {
    Symmetric,
    Unitary,
    Generated,
}

/// Kept as a plain struct so deserialization errors keep their full key path.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupFile {
    pub kind: GroupKindFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<GateTerm>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closure_cap: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameFile {
    pub dimension: usize,
    pub initial: usize,
    pub target_p1: usize,
    pub target_p2: usize,
    pub schedule: ScheduleFile,
    pub group_a: GroupFile,
    pub group_b: GroupFile,
}

fn build_group(source: &str, key: &str, n: usize, g: &GroupFile) -> Result<ActionGroup, FileError> {
    if g.kind != GroupKindFile::Generated {
        if g.generators.is_some() {
            return Err(FileError::new(
                source,
                format!("{key}.generators"),
                "only generated groups take generators",
            ));
        }
        if g.closure_cap.is_some() {
            return Err(FileError::new(
                source,
                format!("{key}.closure_cap"),
                "only generated groups take a closure cap",
            ));
        }
    }
    match g.kind {
        GroupKindFile::Symmetric => Ok(ActionGroup::symmetric(n)),
        GroupKindFile::Unitary => Ok(ActionGroup::unitary(n)),
        GroupKindFile::Generated => {
            let generators = g.generators.as_deref().unwrap_or_default();
            if generators.is_empty() {
                return Err(FileError::new(
                    source,
                    format!("{key}.generators"),
                    "at least one generator is required",
                ));
            }
            let moves = generators
                .iter()
                .enumerate()
                .map(|(i, t)| {
                    Move::new(t.clone(), n)
                        .map_err(|e| FileError::new(source, format!("{key}.generators[{i}]"), e))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let group =
                ActionGroup::generated(n, moves).map_err(|e| FileError::new(source, key, e))?;
            match g.closure_cap {
                Some(cap) => group
                    .with_closure_cap(cap)
                    .map_err(|e| FileError::new(source, format!("{key}.closure_cap"), e)),
                None => Ok(group),
            }
        }
    }
}

fn group_file(g: &ActionGroup) -> GroupFile {
    match g.kind() {
        GroupKind::Symmetric => GroupFile {
            kind: GroupKindFile::Symmetric,
            generators: None,
            closure_cap: None,
        },
        GroupKind::Unitary => GroupFile {
            kind: GroupKindFile::Unitary,
            generators: None,
            closure_cap: None,
        },
        GroupKind::Generated(gens) => GroupFile {
            kind: GroupKindFile::Generated,
            generators: Some(gens.iter().map(|m| m.term().clone()).collect()),
            closure_cap: (g.closure_cap() != DEFAULT_CLOSURE_CAP).then_some(g.closure_cap()),
        },
    }
}

impl GameFile {
    pub fn parse(source: &str, text: &str) -> Result<Self, FileError> {
        parse_json(source, text)
    }

    pub fn to_spec(&self, source: &str) -> Result<GameSpec, FileError> {
        let n = self.dimension;
        let schedule = match self.schedule {
            ScheduleFile::Canonical { m } => Schedule::Canonical(m),
            ScheduleFile::Noncanonical { m } => Schedule::Noncanonical(m),
        };
        let a = build_group(source, "group_a", n, &self.group_a)?;
        let b = build_group(source, "group_b", n, &self.group_b)?;
        GameSpec::new(
            n,
            self.initial,
            self.target_p1,
            self.target_p2,
            schedule,
            a,
            b,
        )
        .map_err(|e| {
            let path = match &e {
                GameError::ZeroDimension => "dimension".to_string(),
                GameError::IndexOutOfRange { field, .. } => field.to_string(),
                GameError::SameTargets(_) => "target_p2".to_string(),
                GameError::ZeroRounds => "schedule.m".to_string(),
                _ => ".".to_string(),
            };
            FileError::new(source, path, e)
        })
    }

    pub fn from_spec(spec: &GameSpec) -> Self {
        let schedule = match spec.schedule() {
            Schedule::Canonical(m) => ScheduleFile::Canonical { m },
            Schedule::Noncanonical(m) => ScheduleFile::Noncanonical { m },
        };
        Self {
            dimension: spec.dim(),
            initial: spec.initial(),
            target_p1: spec.target(Player::One),
            target_p2: spec.target(Player::Two),
            schedule,
            group_a: group_file(spec.group(Player::One)),
            group_b: group_file(spec.group(Player::Two)),
        }
    }

    /// SHA-256 of the compact re-serialization, so formatting does not matter.
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(self).unwrap_or_default();
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategyFile {
    pub player: Player,
    pub moves: Vec<GateTerm>,
}

impl StrategyFile {
    pub fn from_strategy(s: &Strategy) -> Self {
        Self {
            player: s.owner(),
            moves: s.moves().iter().map(|m| m.term().clone()).collect(),
        }
    }

    pub fn to_strategy(&self, source: &str, n: usize) -> Result<Strategy, FileError> {
        let moves = self
            .moves
            .iter()
            .enumerate()
            .map(|(i, t)| {
                Move::new(t.clone(), n)
                    .map_err(|e| FileError::new(source, format!("moves[{i}]"), e))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Strategy::new(self.player, moves))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlphabetEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub term: GateTerm,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlphabetFile {
    pub player1: Vec<AlphabetEntry>,
    pub player2: Vec<AlphabetEntry>,
}

impl AlphabetFile {
    /// Both alphabets; an entry without a name is shown under its term label.
    pub fn to_moves(
        &self,
        source: &str,
        n: usize,
    ) -> Result<(Vec<NamedMove>, Vec<NamedMove>), FileError> {
        let convert = |key: &str, entries: &[AlphabetEntry]| {
            entries
                .iter()
                .enumerate()
                .map(|(i, e)| {
                    let m = Move::new(e.term.clone(), n)
                        .map_err(|err| FileError::new(source, format!("{key}[{i}].term"), err))?;
                    let mut named = NamedMove::from(m);
                    if let Some(name) = &e.name {
                        named.name = name.clone();
                    }
                    Ok(named)
                })
                .collect::<Result<Vec<_>, FileError>>()
        };
        Ok((
            convert("player1", &self.player1)?,
            convert("player2", &self.player2)?,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FOURIER7_GAME: &str = r#"{
        "dimension": 7, "initial": 0, "target_p1": 6, "target_p2": 0,
        "schedule": {"type": "noncanonical", "m": 2},
        "group_a": {"kind": "unitary"},
        "group_b": {"kind": "generated", "generators": [{"gate": "T", "i": 0, "j": 1}], "closure_cap": 100}
    }"#;

    #[test]
    fn round_trip() {
        let file = GameFile::parse("game", FOURIER7_GAME).unwrap();
        let spec = file.to_spec("game").unwrap();
        let back = GameFile::from_spec(&spec);
        assert_eq!(back, file);
        let text = serde_json::to_string(&back).unwrap();
        let again = GameFile::parse("game", &text)
            .unwrap()
            .to_spec("game")
            .unwrap();
        assert_eq!(again, spec);
        assert_eq!(GameFile::parse("game", &text).unwrap().hash(), file.hash());
    }

    #[test]
    fn key_paths() {
        let bad = FOURIER7_GAME.replace(r#""i": 0"#, r#""i": "zero""#);
        let e = GameFile::parse("game", &bad).unwrap_err();
        assert!(e.path.starts_with("group_b.generators[0]"), "{e}");

        let bad = FOURIER7_GAME.replace(r#""j": 1"#, r#""j": 9"#);
        let e = GameFile::parse("game", &bad)
            .unwrap()
            .to_spec("game")
            .unwrap_err();
        assert_eq!(e.path, "group_b.generators[0]");

        let bad = FOURIER7_GAME.replace(r#""target_p2": 0"#, r#""target_p2": 6"#);
        let e = GameFile::parse("game", &bad)
            .unwrap()
            .to_spec("game")
            .unwrap_err();
        assert_eq!(e.path, "target_p2");

        let bad = FOURIER7_GAME.replace("noncanonical", "sideways");
        let e = GameFile::parse("game", &bad).unwrap_err();
        assert_eq!(e.path, "schedule.type");
    }

    #[test]
    fn non_unitary_matrix_is_rejected() {
        let bad = FOURIER7_GAME.replace(
            r#"{"gate": "T", "i": 0, "j": 1}"#,
            r#"{"gate": "MATRIX", "rows": [[[2,0],[0,0]],[[0,0],[1,0]]]}"#,
        );
        let e = GameFile::parse("game", &bad)
            .unwrap()
            .to_spec("game")
            .unwrap_err();
        assert_eq!(e.path, "group_b.generators[0]");
    }
}
