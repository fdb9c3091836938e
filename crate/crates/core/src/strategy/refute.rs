//! Counter-strategy constructions.
//!
//! Each construction answers a claimed strong winning strategy with two
//! opponent strategies that differ in exactly one move. Played against the
//! claim, the two final states cannot both be the claimant's target:
//!
//! * `FinalSwap`: the opponent's last move is `I` or `T_{qA,qB}`. If the
//!   state before it is the claimant's target, the swap moves it to the
//!   other target.
//! * `UndoLast`: the opponent's last move is `X^-1` or `X^-1 T_{qA,qB}`,
//!   where `X` is the claimant's final move; the claimant's last move then
//!   cancels and the same swap argument applies.
//! * `FirstMoveSplit`: player 1 opens with `T_{q0,qA}` or `T_{q0,qB}`. Both
//!   games continue with the same unitary `C`, which cannot send the two
//!   orthogonal kets `|qA>`, `|qB>` to the same target.

use crate::game::{wins, GameSpec, Player, Schedule, Strategy, Violation};
use crate::gate::Move;
use crate::groups::{contains, contains_symmetric, ActionGroup, GroupKind, Membership};
use crate::linalg::StateVector;

use super::StrategyError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Construction {
    FinalSwap,
    UndoLast,
    FirstMoveSplit,
}

impl Construction {
    pub fn describe(self) -> &'static str {
        match self {
            Construction::FinalSwap => "opponent ends with I or T_{qA,qB}",
            Construction::UndoLast => {
                "opponent ends with X^-1 or X^-1 T_{qA,qB}, X the claimant's last move"
            }
            Construction::FirstMoveSplit => "player 1 opens with T_{q0,qA} or T_{q0,qB}",
        }
    }

    /// Constructions available against a claimant under a schedule, in the order tried.
    pub fn applicable(claimant: Player, schedule: Schedule) -> &'static [Construction] {
        match (claimant, schedule) {
            (Player::One, Schedule::Canonical(_)) => &[Construction::FinalSwap],
            (Player::One, Schedule::Noncanonical(_)) => &[Construction::UndoLast],
            (Player::Two, Schedule::Canonical(_)) => {
                &[Construction::UndoLast, Construction::FirstMoveSplit]
            }
            (Player::Two, Schedule::Noncanonical(_)) => &[Construction::FinalSwap],
        }
    }
}

/// Two opponent strategies differing in one move, with the final states they
/// produce against the claim.
#[derive(Clone, Debug, PartialEq)]
pub struct CounterexamplePair {
    pub construction: Construction,
    pub sigma: Strategy,
    pub sigma_prime: Strategy,
    pub finals: [StateVector; 2],
}

impl CounterexamplePair {
    /// The opponent strategy under which the claimant does not surely win.
    pub fn defeating(&self, spec: &GameSpec, claimant: Player) -> Option<&Strategy> {
        if !wins(spec, &self.finals[0], claimant) {
            Some(&self.sigma)
        } else if !wins(spec, &self.finals[1], claimant) {
            Some(&self.sigma_prime)
        } else {
            None
        }
    }

    /// Index of the single move where the two strategies differ.
    pub fn differing_move(&self) -> Option<usize> {
        let diffs: Vec<usize> = self
            .sigma
            .moves()
            .iter()
            .zip(self.sigma_prime.moves())
            .enumerate()
            .filter(|(_, (a, b))| !a.matrix().approx_eq(b.matrix(), 1e-12))
            .map(|(i, _)| i)
            .collect();
        match diffs.as_slice() {
            [i] => Some(*i),
            _ => None,
        }
    }
}

/// `T_{i,j}`, or `I` when the indices coincide.
pub(crate) fn swap_or_identity(n: usize, i: usize, j: usize) -> Result<Move, StrategyError> {
    if i == j {
        Ok(Move::identity(n)?)
    } else {
        Ok(Move::transposition(n, i, j)?)
    }
}

/// The two differing moves and their position for one construction.
fn construction_moves(
    spec: &GameSpec,
    claimed: &Strategy,
    c: Construction,
) -> Result<(usize, Move, Move), StrategyError> {
    let n = spec.dim();
    let claimant = claimed.owner();
    let opp_rounds = spec.rounds_for(claimant.opponent());
    let swap = Move::transposition(n, spec.target(Player::One), spec.target(Player::Two))?;
    Ok(match c {
        Construction::FinalSwap => (opp_rounds - 1, Move::identity(n)?, swap),
        Construction::UndoLast => {
            let last = match claimed.moves().last() {
                Some(m) => m.adjoint(),
                None => {
                    return Err(StrategyError::MissingHypothesis(
                        "claimed strategy is empty".into(),
                    ))
                }
            };
            let with_swap = last.compose(&swap)?;
            (opp_rounds - 1, last, with_swap)
        }
        Construction::FirstMoveSplit => {
            let q0 = spec.initial();
            (
                0,
                swap_or_identity(n, q0, spec.target(Player::One))?,
                swap_or_identity(n, q0, spec.target(Player::Two))?,
            )
        }
    })
}

/// Builds the opponent pair prescribed for `claimed`, trying each applicable
/// construction whose moves are admissible for the opponent.
pub fn construct_counterexample(
    spec: &GameSpec,
    claimed: &Strategy,
) -> Result<CounterexamplePair, StrategyError> {
    let claimant = claimed.owner();
    let expected = spec.rounds_for(claimant);
    if claimed.len() != expected {
        return Err(StrategyError::Invalid {
            player: claimant,
            violation: Violation::Length {
                expected,
                found: claimed.len(),
            },
        });
    }
    if let Some(index) = claimed.moves().iter().position(|m| m.dim() != spec.dim()) {
        return Err(StrategyError::Invalid {
            player: claimant,
            violation: Violation::Dimension { index },
        });
    }
    let opponent = claimant.opponent();
    let opp_group = spec.group(opponent);
    let mut missing = Vec::new();
    for &c in Construction::applicable(claimant, spec.schedule()) {
        let (index, a, b) = construction_moves(spec, claimed, c)?;
        let admissible = [&a, &b]
            .iter()
            .all(|m| contains(opp_group, m.matrix()) == Membership::Yes);
        if !admissible {
            missing.push(format!("{} ({} / {})", c.describe(), a.label(), b.label()));
            continue;
        }
        let base = Strategy::identity(opponent, spec.rounds_for(opponent), spec.dim())?;
        let sigma = base.with_move(index, a);
        let sigma_prime = base.with_move(index, b);
        let final_of = |opp: &Strategy| -> Result<StateVector, StrategyError> {
            let p = match claimant {
                Player::One => play_unvalidated(spec, claimed, opp)?,
                Player::Two => play_unvalidated(spec, opp, claimed)?,
            };
            Ok(p)
        };
        let finals = [final_of(&sigma)?, final_of(&sigma_prime)?];
        let pair = CounterexamplePair {
            construction: c,
            sigma,
            sigma_prime,
            finals,
        };
        if pair.defeating(spec, claimant).is_none() {
            return Err(StrategyError::Internal(format!(
                "construction '{}' left the claimant winning in both games",
                c.describe()
            )));
        }
        return Ok(pair);
    }
    Err(StrategyError::MissingHypothesis(format!(
        "{} lacks the moves required by: {}",
        opponent,
        missing.join("; ")
    )))
}

/// Final state with both strategies taken as given (the claim may come from a
/// truncated closure; the opponent moves were checked above).
fn play_unvalidated(
    spec: &GameSpec,
    s1: &Strategy,
    s2: &Strategy,
) -> Result<StateVector, StrategyError> {
    let a: Vec<_> = s1.moves().iter().map(|m| m.matrix().clone()).collect();
    let b: Vec<_> = s2.moves().iter().map(|m| m.matrix().clone()).collect();
    let mut state = spec.initial_state();
    for u in crate::game::interleave(spec.schedule(), &a, &b) {
        state = u.apply(&state)?;
    }
    Ok(state)
}

/// Whether every element of `a` lies in `b`.
pub fn is_subgroup(a: &ActionGroup, b: &ActionGroup) -> Membership {
    if a.dim() != b.dim() {
        return Membership::No;
    }
    if matches!(b.kind(), GroupKind::Unitary) {
        return Membership::Yes;
    }
    match a.kind() {
        GroupKind::Unitary => Membership::No,
        GroupKind::Symmetric => contains_symmetric(b),
        GroupKind::Generated(gens) => {
            let mut verdict = Membership::Yes;
            for g in gens {
                match contains(b, g.matrix()) {
                    Membership::No => return Membership::No,
                    Membership::Indeterminate => verdict = Membership::Indeterminate,
                    Membership::Yes => {}
                }
            }
            verdict
        }
    }
}

/// Group-level check that some construction applies to every strategy the
/// claimant could choose. Returns the construction whose hypotheses hold.
pub fn universal_construction(
    spec: &GameSpec,
    claimant: Player,
) -> Result<Option<Construction>, StrategyError> {
    let n = spec.dim();
    let opp_group = spec.group(claimant.opponent());
    let (qa, qb, q0) = (
        spec.target(Player::One),
        spec.target(Player::Two),
        spec.initial(),
    );
    let has = |m: Move| contains(opp_group, m.matrix()) == Membership::Yes;
    for &c in Construction::applicable(claimant, spec.schedule()) {
        let holds = match c {
            Construction::FinalSwap => has(Move::transposition(n, qa, qb)?),
            Construction::UndoLast => {
                is_subgroup(spec.group(claimant), opp_group) == Membership::Yes
                    && has(Move::transposition(n, qa, qb)?)
            }
            Construction::FirstMoveSplit => {
                has(swap_or_identity(n, q0, qa)?) && has(swap_or_identity(n, q0, qb)?)
            }
        };
        if holds {
            return Ok(Some(c));
        }
    }
    Ok(None)
}
