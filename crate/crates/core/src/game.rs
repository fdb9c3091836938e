//! Game definitions, strategies, deterministic playout and measurement.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gate::Move;
use crate::groups::{contains, ActionGroup, Membership};
use crate::linalg::{LinalgError, StateVector, UnitaryMatrix};

/// Probability at or above which a measurement outcome counts as certain.
pub const SURE_WIN_THRESHOLD: f64 = 1.0 - 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Player {
    One,
    Two,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::One => Player::Two,
            Player::Two => Player::One,
        }
    }

    pub fn number(self) -> u8 {
        match self {
            Player::One => 1,
            Player::Two => 2,
        }
    }
}

impl TryFrom<u8> for Player {
    type Error = String;

    fn try_from(v: u8) -> Result<Self, Self::Error> {
        match v {
            1 => Ok(Player::One),
            2 => Ok(Player::Two),
            other => Err(format!("player must be 1 or 2, got {other}")),
        }
    }
}

impl From<Player> for u8 {
    fn from(p: Player) -> u8 {
        p.number()
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "player {}", self.number())
    }
}

/// Order of play. Player 1 always moves first; a canonical game has `2m`
/// rounds ending with player 2, a noncanonical one `2m + 1` rounds ending
/// with player 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Schedule {
    Canonical(usize),
    Noncanonical(usize),
}

impl Schedule {
    pub fn m(self) -> usize {
        match self {
            Schedule::Canonical(m) | Schedule::Noncanonical(m) => m,
        }
    }

    pub fn total_rounds(self) -> usize {
        match self {
            Schedule::Canonical(m) => 2 * m,
            Schedule::Noncanonical(m) => 2 * m + 1,
        }
    }

    pub fn rounds_for(self, p: Player) -> usize {
        match (self, p) {
            (Schedule::Noncanonical(m), Player::One) => m + 1,
            _ => self.m(),
        }
    }

    /// Who acts at zero-based round `r`.
    pub fn mover(self, r: usize) -> Player {
        if r.is_multiple_of(2) {
            Player::One
        } else {
            Player::Two
        }
    }

    pub fn is_canonical(self) -> bool {
        matches!(self, Schedule::Canonical(_))
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GameError {
    #[error("dimension must be positive")]
    ZeroDimension,
    #[error("{field} = {value} is out of range for dimension {n}")]
    IndexOutOfRange {
        field: &'static str,
        value: usize,
        n: usize,
    },
    #[error("targets of the two players must differ (both {0})")]
    SameTargets(usize),
    #[error("m must be at least 1")]
    ZeroRounds,
    #[error("{player} group has dimension {found}, game has dimension {n}")]
    GroupDimension {
        player: Player,
        n: usize,
        found: usize,
    },
    #[error("strategy belongs to {found}, expected {expected}")]
    WrongOwner { expected: Player, found: Player },
    #[error("{player} strategy: {violation}")]
    Invalid {
        player: Player,
        violation: Violation,
    },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// The game rules: dimension, initial and target basis states, schedule and
/// both action groups.
#[derive(Clone, Debug, PartialEq)]
pub struct GameSpec {
    n: usize,
    initial: usize,
    target_p1: usize,
    target_p2: usize,
    schedule: Schedule,
    group_a: ActionGroup,
    group_b: ActionGroup,
}

impl GameSpec {
    pub fn new(
        n: usize,
        initial: usize,
        target_p1: usize,
        target_p2: usize,
        schedule: Schedule,
        group_a: ActionGroup,
        group_b: ActionGroup,
    ) -> Result<Self, GameError> {
        if n == 0 {
            return Err(GameError::ZeroDimension);
        }
        for (field, value) in [
            ("initial", initial),
            ("target_p1", target_p1),
            ("target_p2", target_p2),
        ] {
            if value >= n {
                return Err(GameError::IndexOutOfRange { field, value, n });
            }
        }
        if target_p1 == target_p2 {
            return Err(GameError::SameTargets(target_p1));
        }
        if schedule.m() == 0 {
            return Err(GameError::ZeroRounds);
        }
        for (player, g) in [(Player::One, &group_a), (Player::Two, &group_b)] {
            if g.dim() != n {
                return Err(GameError::GroupDimension {
                    player,
                    n,
                    found: g.dim(),
                });
            }
        }
        Ok(Self {
            n,
            initial,
            target_p1,
            target_p2,
            schedule,
            group_a,
            group_b,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn initial_state(&self) -> StateVector {
        match StateVector::basis(self.n, self.initial) {
            Ok(v) => v,
            Err(_) => unreachable!("initial index validated at construction"),
        }
    }

    pub fn target(&self, p: Player) -> usize {
        match p {
            Player::One => self.target_p1,
            Player::Two => self.target_p2,
        }
    }

    pub fn schedule(&self) -> Schedule {
        self.schedule
    }

    pub fn group(&self, p: Player) -> &ActionGroup {
        match p {
            Player::One => &self.group_a,
            Player::Two => &self.group_b,
        }
    }

    pub fn rounds_for(&self, p: Player) -> usize {
        self.schedule.rounds_for(p)
    }

    /// Copy of this game with a different schedule.
    pub fn with_schedule(&self, schedule: Schedule) -> Result<Self, GameError> {
        Self::new(
            self.n,
            self.initial,
            self.target_p1,
            self.target_p2,
            schedule,
            self.group_a.clone(),
            self.group_b.clone(),
        )
    }
}

/// One player's ordered sequence of moves.
#[derive(Clone, Debug, PartialEq)]
pub struct Strategy {
    owner: Player,
    moves: Vec<Move>,
}

impl Strategy {
    pub fn new(owner: Player, moves: Vec<Move>) -> Self {
        Self { owner, moves }
    }

    /// `len` identity moves.
    pub fn identity(owner: Player, len: usize, n: usize) -> Result<Self, LinalgError> {
        let id = Move::identity(n)?;
        Ok(Self::new(owner, vec![id; len]))
    }

    pub fn owner(&self) -> Player {
        self.owner
    }

    pub fn moves(&self) -> &[Move] {
        &self.moves
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    /// Same strategy with move `index` replaced.
    pub fn with_move(&self, index: usize, m: Move) -> Strategy {
        let mut moves = self.moves.clone();
        moves[index] = m;
        Strategy::new(self.owner, moves)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Violation {
    #[error("expected {expected} moves, found {found}")]
    Length { expected: usize, found: usize },
    #[error("move {index} has the wrong dimension")]
    Dimension { index: usize },
    #[error("move {index} is not in the action group")]
    Inadmissible { index: usize },
    #[error("membership of move {index} could not be decided (closure truncated)")]
    Undecided { index: usize },
}

/// Checks length and admissibility of every move; reports the first violation.
pub fn validate(spec: &GameSpec, s: &Strategy) -> Result<(), Violation> {
    let expected = spec.rounds_for(s.owner);
    if s.moves.len() != expected {
        return Err(Violation::Length {
            expected,
            found: s.moves.len(),
        });
    }
    let group = spec.group(s.owner);
    for (index, m) in s.moves.iter().enumerate() {
        if m.dim() != spec.n {
            return Err(Violation::Dimension { index });
        }
        match contains(group, m.matrix()) {
            Membership::Yes => {}
            Membership::No => return Err(Violation::Inadmissible { index }),
            Membership::Indeterminate => return Err(Violation::Undecided { index }),
        }
    }
    Ok(())
}

/// The state after every round; `trajectory[0]` is `|q0>`.
#[derive(Clone, Debug, PartialEq)]
pub struct Playout {
    trajectory: Vec<StateVector>,
}

impl Playout {
    pub fn trajectory(&self) -> &[StateVector] {
        &self.trajectory
    }

    pub fn final_state(&self) -> &StateVector {
        match self.trajectory.last() {
            Some(v) => v,
            None => unreachable!("trajectory holds at least the initial state"),
        }
    }
}

/// Interleaves the two move lists in schedule order.
pub(crate) fn interleave<'a>(
    schedule: Schedule,
    p1: &'a [UnitaryMatrix],
    p2: &'a [UnitaryMatrix],
) -> impl Iterator<Item = &'a UnitaryMatrix> + 'a {
    (0..schedule.total_rounds()).map(move |r| match schedule.mover(r) {
        Player::One => &p1[r / 2],
        Player::Two => &p2[r / 2],
    })
}

/// Plays `A1, B1, A2, B2, ...` (and `A_{m+1}` if noncanonical) from `|q0>`.
pub fn play(spec: &GameSpec, s1: &Strategy, s2: &Strategy) -> Result<Playout, GameError> {
    for (expected, s) in [(Player::One, s1), (Player::Two, s2)] {
        if s.owner != expected {
            return Err(GameError::WrongOwner {
                expected,
                found: s.owner,
            });
        }
        validate(spec, s).map_err(|violation| GameError::Invalid {
            player: expected,
            violation,
        })?;
    }
    let a: Vec<UnitaryMatrix> = s1.moves.iter().map(|m| m.matrix().clone()).collect();
    let b: Vec<UnitaryMatrix> = s2.moves.iter().map(|m| m.matrix().clone()).collect();
    let mut trajectory = vec![spec.initial_state()];
    for u in interleave(spec.schedule, &a, &b) {
        let next = u.apply(&trajectory[trajectory.len() - 1])?;
        trajectory.push(next);
    }
    Ok(Playout { trajectory })
}

/// Applies moves in order to a starting state, with no game rules attached.
pub fn run_moves(
    start: &StateVector,
    moves: &[&UnitaryMatrix],
) -> Result<StateVector, LinalgError> {
    let mut state = start.clone();
    for u in moves {
        state = u.apply(&state)?;
    }
    Ok(state)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Player1SureWin,
    Player2SureWin,
    Probabilistic,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub distribution: Vec<f64>,
    pub verdict: Verdict,
}

/// True iff measuring `state` yields `target` with certainty.
pub fn surely_yields(state: &StateVector, target: usize) -> bool {
    state
        .amplitudes()
        .get(target)
        .is_some_and(|a| a.norm_sqr() >= SURE_WIN_THRESHOLD)
}

/// Whether `p` surely wins from a final state.
pub fn wins(spec: &GameSpec, state: &StateVector, p: Player) -> bool {
    surely_yields(state, spec.target(p))
}

/// Computational-basis measurement statistics and the win verdict.
pub fn measure(p: &Playout, spec: &GameSpec) -> Outcome {
    let state = p.final_state();
    let verdict = if wins(spec, state, Player::One) {
        Verdict::Player1SureWin
    } else if wins(spec, state, Player::Two) {
        Verdict::Player2SureWin
    } else {
        Verdict::Probabilistic
    };
    Outcome {
        distribution: state.probabilities(),
        verdict,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gate::GateTerm;
    use crate::linalg::states_equal_up_to_phase;

    fn example_spec(schedule: Schedule) -> GameSpec {
        GameSpec::new(
            7,
            0,
            6,
            0,
            schedule,
            ActionGroup::unitary(7),
            ActionGroup::symmetric(7),
        )
        .unwrap()
    }

    fn t06_f7_dag() -> Move {
        Move::transposition(7, 0, 6)
            .unwrap()
            .compose(&Move::qft_dag(7).unwrap())
            .unwrap()
    }

    #[test]
    fn spec_validation() {
        let s = ActionGroup::symmetric(3);
        let mk = |init, a, b, m| {
            GameSpec::new(3, init, a, b, Schedule::Canonical(m), s.clone(), s.clone())
        };
        assert_eq!(mk(0, 1, 1, 1).unwrap_err(), GameError::SameTargets(1));
        assert!(matches!(
            mk(3, 1, 0, 1),
            Err(GameError::IndexOutOfRange {
                field: "initial",
                ..
            })
        ));
        assert_eq!(mk(0, 1, 2, 0).unwrap_err(), GameError::ZeroRounds);
        let wrong = GameSpec::new(
            3,
            0,
            1,
            2,
            Schedule::Canonical(1),
            s.clone(),
            ActionGroup::symmetric(2),
        );
        assert!(matches!(
            wrong,
            Err(GameError::GroupDimension {
                player: Player::Two,
                ..
            })
        ));
    }

    #[test]
    fn schedule_counts() {
        let c = Schedule::Canonical(3);
        assert_eq!(
            (
                c.total_rounds(),
                c.rounds_for(Player::One),
                c.rounds_for(Player::Two)
            ),
            (6, 3, 3)
        );
        let nc = Schedule::Noncanonical(3);
        assert_eq!(
            (
                nc.total_rounds(),
                nc.rounds_for(Player::One),
                nc.rounds_for(Player::Two)
            ),
            (7, 4, 3)
        );
        assert_eq!(nc.mover(6), Player::One);
        assert_eq!(c.mover(5), Player::Two);
    }

    #[test]
    fn example_two_playout() {
        let spec = example_spec(Schedule::Noncanonical(2));
        let s1 = Strategy::new(
            Player::One,
            vec![
                Move::qft(7).unwrap(),
                Move::identity(7).unwrap(),
                t06_f7_dag(),
            ],
        );
        let s2 = Strategy::new(
            Player::Two,
            vec![
                Move::transposition(7, 2, 5).unwrap(),
                Move::new(
                    GateTerm::Compose {
                        terms: vec![GateTerm::transposition(0, 1), GateTerm::transposition(3, 6)],
                    },
                    7,
                )
                .unwrap(),
            ],
        );
        let p = play(&spec, &s1, &s2).unwrap();
        assert_eq!(p.trajectory().len(), 6);
        assert!(
            states_equal_up_to_phase(p.final_state(), &StateVector::basis(7, 6).unwrap()).unwrap()
        );
        let o = measure(&p, &spec);
        assert_eq!(o.verdict, Verdict::Player1SureWin);
    }

    #[test]
    fn example_one_playouts() {
        let spec = example_spec(Schedule::Canonical(2));
        let s1 = Strategy::new(Player::One, vec![Move::qft(7).unwrap(), t06_f7_dag()]);
        let s2 = Strategy::new(
            Player::Two,
            vec![
                Move::identity(7).unwrap(),
                Move::transposition(7, 0, 6).unwrap(),
            ],
        );
        let p = play(&spec, &s1, &s2).unwrap();
        assert!(
            states_equal_up_to_phase(p.final_state(), &StateVector::basis(7, 0).unwrap()).unwrap()
        );
        assert_eq!(measure(&p, &spec).verdict, Verdict::Player2SureWin);

        let s1 = Strategy::new(
            Player::One,
            vec![Move::qft(7).unwrap(), Move::identity(7).unwrap()],
        );
        let s2 = Strategy::identity(Player::Two, 2, 7).unwrap();
        let o = measure(&play(&spec, &s1, &s2).unwrap(), &spec);
        assert_eq!(o.verdict, Verdict::Probabilistic);
        assert!((o.distribution[6] - 1.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn identity_play_keeps_initial_state() {
        let g = ActionGroup::symmetric(4);
        let spec = GameSpec::new(4, 2, 0, 1, Schedule::Noncanonical(3), g.clone(), g).unwrap();
        let s1 = Strategy::identity(Player::One, 4, 4).unwrap();
        let s2 = Strategy::identity(Player::Two, 3, 4).unwrap();
        let p = play(&spec, &s1, &s2).unwrap();
        assert_eq!(p.final_state(), &StateVector::basis(4, 2).unwrap());
        assert_eq!(measure(&p, &spec).verdict, Verdict::Probabilistic);
    }

    #[test]
    fn validation_reports() {
        let spec = example_spec(Schedule::Canonical(2));
        let long = Strategy::identity(Player::One, 3, 7).unwrap();
        assert_eq!(
            validate(&spec, &long),
            Err(Violation::Length {
                expected: 2,
                found: 3
            })
        );
        let bad = Strategy::new(
            Player::Two,
            vec![Move::identity(7).unwrap(), Move::qft(7).unwrap()],
        );
        assert_eq!(
            validate(&spec, &bad),
            Err(Violation::Inadmissible { index: 1 })
        );
        let good = Strategy::new(
            Player::One,
            vec![Move::qft(7).unwrap(), Move::qft(7).unwrap()],
        );
        assert_eq!(validate(&spec, &good), Ok(()));
        let err = play(&spec, &good, &bad).unwrap_err();
        assert!(matches!(
            err,
            GameError::Invalid {
                player: Player::Two,
                ..
            }
        ));
        assert!(matches!(
            play(&spec, &bad, &good),
            Err(GameError::WrongOwner { .. })
        ));
    }

    #[test]
    fn undecided_membership_is_rejected() {
        let gens = vec![
            Move::transposition(5, 0, 1).unwrap(),
            Move::transposition(5, 1, 2).unwrap(),
        ];
        let capped = ActionGroup::generated(5, gens)
            .unwrap()
            .with_closure_cap(2)
            .unwrap();
        let spec = GameSpec::new(
            5,
            0,
            1,
            2,
            Schedule::Canonical(1),
            ActionGroup::symmetric(5),
            capped,
        )
        .unwrap();
        let s = Strategy::new(Player::Two, vec![Move::transposition(5, 3, 4).unwrap()]);
        assert_eq!(validate(&spec, &s), Err(Violation::Undecided { index: 0 }));
    }
}
