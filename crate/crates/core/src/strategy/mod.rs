//! Strong and weak winning strategies.
//!
//! Searches enumerate strategy profiles lexicographically in closure order and
//! share one playout budget per query; running out of budget yields
//! [`Finding::Indeterminate`], never a guess. Opponent profiles are walked
//! depth-first so the states of a shared prefix are computed once.

mod refute;
mod table;

use std::borrow::Cow;

use serde::Serialize;
use thiserror::Error;

use crate::game::{validate, wins, GameError, GameSpec, Player, Schedule, Strategy, Violation};
use crate::gate::Move;
use crate::groups::{
    close, contains_symmetric, invariant_subspace, reachable_invariant, ActionGroup, GroupError,
    GroupKind, Membership, Reachability,
};
use crate::linalg::{in_span, LinalgError, StateVector, UnitaryMatrix};

pub use refute::{
    construct_counterexample, is_subgroup, universal_construction, Construction, CounterexamplePair,
};
pub use table::{
    verify_table, InstanceCheck, InstanceReport, RowReport, TableReport, TableRow, MAX_TABLE_M,
    MAX_TABLE_N, TABLE_ROWS,
};

/// Default total playouts per query.
pub const DEFAULT_SEARCH_CAP: u64 = 1_000_000;

#[derive(Debug, Error)]
pub enum StrategyError {
    #[error("player {player}: {violation}")]
    Invalid {
        player: Player,
        violation: Violation,
    },
    #[error("missing hypothesis: {0}")]
    MissingHypothesis(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error("table bounds: {0}")]
    Bounds(String),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    /// Maximum playouts for one query.
    pub cap: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            cap: DEFAULT_SEARCH_CAP,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Strength {
    Strong,
    Weak,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exhaustion,
    ProofConstruction,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SearchSummary {
    pub candidates: u64,
    pub playouts: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Evidence {
    Summary(SearchSummary),
    /// A construction whose hypotheses hold for every claim, shown on one claim.
    Counterexample {
        claim: Strategy,
        pair: Box<CounterexamplePair>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub enum Finding {
    Exists {
        witness: Strategy,
        co_witness: Option<Strategy>,
    },
    NotExists {
        method: Method,
        evidence: Evidence,
    },
    Indeterminate {
        reason: String,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnalysisVerdict {
    pub player: Player,
    pub strength: Strength,
    pub result: Finding,
    pub summary: SearchSummary,
}

impl AnalysisVerdict {
    pub fn exists(&self) -> Option<bool> {
        match self.result {
            Finding::Exists { .. } => Some(true),
            Finding::NotExists { .. } => Some(false),
            Finding::Indeterminate { .. } => None,
        }
    }

    pub fn witness(&self) -> Option<&Strategy> {
        match &self.result {
            Finding::Exists { witness, .. } => Some(witness),
            _ => None,
        }
    }
}

/// How a strong-winning check was settled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckRoute {
    InvariantShortcut,
    Enumeration,
    ProofConstruction,
}

#[derive(Clone, Debug, PartialEq)]
pub enum StrongCheck {
    Holds {
        route: CheckRoute,
    },
    Fails {
        route: CheckRoute,
        counter: Strategy,
    },
    Indeterminate {
        reason: String,
    },
}

impl StrongCheck {
    pub fn holds(&self) -> Option<bool> {
        match self {
            StrongCheck::Holds { .. } => Some(true),
            StrongCheck::Fails { .. } => Some(false),
            StrongCheck::Indeterminate { .. } => None,
        }
    }
}

struct Budget {
    cap: u64,
    used: u64,
}

impl Budget {
    fn new(cap: u64) -> Self {
        Self { cap, used: 0 }
    }

    fn spend(&mut self) -> bool {
        if self.used >= self.cap {
            return false;
        }
        self.used += 1;
        true
    }

    fn exhausted(&self) -> bool {
        self.used >= self.cap
    }

    fn reason(&self) -> String {
        format!("search cap of {} playouts exhausted", self.cap)
    }
}

/// Moves available to one player during a search.
pub(crate) struct Pool<'a> {
    moves: Cow<'a, [Move]>,
    complete: bool,
    note: String,
}

impl<'a> Pool<'a> {
    /// The whole closure, or just `I` when the group cannot be enumerated.
    pub(crate) fn of(g: &'a ActionGroup) -> Result<Self, StrategyError> {
        if matches!(g.kind(), GroupKind::Unitary) {
            return Ok(Self {
                moves: Cow::Owned(vec![Move::identity(g.dim())?]),
                complete: false,
                note: format!("U({}) is not enumerable", g.dim()),
            });
        }
        let closure = close(g)?;
        Ok(Self {
            moves: Cow::Borrowed(closure.elements()),
            complete: closure.is_complete(),
            note: format!("closure truncated at {} elements", closure.len()),
        })
    }

    pub(crate) fn moves(&self) -> &[Move] {
        &self.moves
    }

    pub(crate) fn is_complete(&self) -> bool {
        self.complete
    }

    /// `|pool|^rounds`, saturating.
    pub(crate) fn profiles(&self, rounds: usize) -> u64 {
        let base = self.moves.len() as u64;
        u32::try_from(rounds)
            .ok()
            .and_then(|r| base.checked_pow(r))
            .unwrap_or(u64::MAX)
    }
}

/// Lexicographic counter over `len` digits in base `base`, last digit fastest.
struct Odometer {
    digits: Vec<usize>,
    base: usize,
    started: bool,
}

impl Odometer {
    fn new(base: usize, len: usize) -> Self {
        Self {
            digits: vec![0; len],
            base,
            started: false,
        }
    }
}

impl Iterator for Odometer {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.base == 0 {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(self.digits.clone());
        }
        for d in self.digits.iter_mut().rev() {
            *d += 1;
            if *d < self.base {
                return Some(self.digits.clone());
            }
            *d = 0;
        }
        None
    }
}

enum Walk {
    Finished,
    Stopped(Vec<usize>),
    OutOfBudget,
}

/// Fixed moves for one player; the other player's moves are enumerated.
struct Walker<'a> {
    schedule: Schedule,
    owner: Player,
    owner_moves: &'a [&'a UnitaryMatrix],
    pool: &'a [Move],
}

impl Walker<'_> {
    /// Visits every opponent profile until `stop` returns true on a final state.
    fn run(
        &self,
        start: &StateVector,
        budget: &mut Budget,
        stop: &mut dyn FnMut(&StateVector) -> bool,
    ) -> Result<Walk, LinalgError> {
        let mut picks = Vec::new();
        self.step(0, start, &mut picks, budget, stop)
    }

    fn step(
        &self,
        round: usize,
        state: &StateVector,
        picks: &mut Vec<usize>,
        budget: &mut Budget,
        stop: &mut dyn FnMut(&StateVector) -> bool,
    ) -> Result<Walk, LinalgError> {
        if round == self.schedule.total_rounds() {
            if !budget.spend() {
                return Ok(Walk::OutOfBudget);
            }
            return Ok(if stop(state) {
                Walk::Stopped(picks.clone())
            } else {
                Walk::Finished
            });
        }
        if self.schedule.mover(round) == self.owner {
            let next = self.owner_moves[round / 2].apply(state)?;
            return self.step(round + 1, &next, picks, budget, stop);
        }
        for (k, m) in self.pool.iter().enumerate() {
            picks.push(k);
            let next = m.matrix().apply(state)?;
            let walk = self.step(round + 1, &next, picks, budget, stop)?;
            picks.pop();
            if !matches!(walk, Walk::Finished) {
                return Ok(walk);
            }
        }
        Ok(Walk::Finished)
    }
}

fn strategy_from(owner: Player, pool: &[Move], picks: &[usize]) -> Strategy {
    Strategy::new(owner, picks.iter().map(|&k| pool[k].clone()).collect())
}

/// Everything about the opponent a strong check needs, computed once per query.
struct Opposition<'a> {
    spec: &'a GameSpec,
    claimant: Player,
    pool: Pool<'a>,
    invariant: Vec<StateVector>,
    cap: u64,
}

impl<'a> Opposition<'a> {
    fn new(spec: &'a GameSpec, claimant: Player, cfg: SearchConfig) -> Result<Self, StrategyError> {
        let group = spec.group(claimant.opponent());
        Ok(Self {
            spec,
            claimant,
            pool: Pool::of(group)?,
            invariant: invariant_subspace(group),
            cap: cfg.cap,
        })
    }

    fn opponent(&self) -> Player {
        self.claimant.opponent()
    }

    /// One playout against `I` everywhere, valid when every state the
    /// opponent acts on is fixed by the whole opponent group.
    fn shortcut(
        &self,
        moves: &[&UnitaryMatrix],
        budget: &mut Budget,
    ) -> Result<Option<StrongCheck>, StrategyError> {
        if self.invariant.is_empty() {
            return Ok(None);
        }
        let schedule = self.spec.schedule();
        let mut state = self.spec.initial_state();
        for r in 0..schedule.total_rounds() {
            if schedule.mover(r) == self.claimant {
                state = moves[r / 2].apply(&state)?;
            } else if !in_span(&self.invariant, &state)? {
                return Ok(None);
            }
        }
        if !budget.spend() {
            return Ok(Some(StrongCheck::Indeterminate {
                reason: budget.reason(),
            }));
        }
        let route = CheckRoute::InvariantShortcut;
        Ok(Some(if wins(self.spec, &state, self.claimant) {
            StrongCheck::Holds { route }
        } else {
            let n = self.spec.dim();
            let rounds = self.spec.rounds_for(self.opponent());
            StrongCheck::Fails {
                route,
                counter: Strategy::identity(self.opponent(), rounds, n)?,
            }
        }))
    }

    fn enumerate(
        &self,
        moves: &[&UnitaryMatrix],
        budget: &mut Budget,
    ) -> Result<Walk, StrategyError> {
        let walker = Walker {
            schedule: self.spec.schedule(),
            owner: self.claimant,
            owner_moves: moves,
            pool: self.pool.moves(),
        };
        let (spec, claimant) = (self.spec, self.claimant);
        Ok(walker.run(&spec.initial_state(), budget, &mut |s| {
            !wins(spec, s, claimant)
        })?)
    }

    fn check(&self, claim: &Strategy, budget: &mut Budget) -> Result<StrongCheck, StrategyError> {
        let moves: Vec<&UnitaryMatrix> = claim.moves().iter().map(Move::matrix).collect();
        if let Some(done) = self.shortcut(&moves, budget)? {
            return Ok(done);
        }
        let rounds = self.spec.rounds_for(self.opponent());
        let profiles = self.pool.profiles(rounds);
        let fails = |picks: Vec<usize>, route| StrongCheck::Fails {
            route,
            counter: strategy_from(self.opponent(), self.pool.moves(), &picks),
        };
        if self.pool.is_complete() && profiles <= self.cap {
            return Ok(match self.enumerate(&moves, budget)? {
                Walk::Finished => StrongCheck::Holds {
                    route: CheckRoute::Enumeration,
                },
                Walk::Stopped(picks) => fails(picks, CheckRoute::Enumeration),
                Walk::OutOfBudget => StrongCheck::Indeterminate {
                    reason: budget.reason(),
                },
            });
        }
        match construct_counterexample(self.spec, claim) {
            Ok(pair) => {
                let counter = pair
                    .defeating(self.spec, self.claimant)
                    .cloned()
                    .ok_or_else(|| {
                        StrategyError::Internal(
                            "counterexample pair does not defeat the claim".into(),
                        )
                    })?;
                return Ok(StrongCheck::Fails {
                    route: CheckRoute::ProofConstruction,
                    counter,
                });
            }
            Err(StrategyError::MissingHypothesis(_)) => {}
            Err(e) => return Err(e),
        }
        // Partial enumeration can still refute soundly.
        Ok(match self.enumerate(&moves, budget)? {
            Walk::Stopped(picks) => fails(picks, CheckRoute::Enumeration),
            Walk::OutOfBudget => StrongCheck::Indeterminate {
                reason: budget.reason(),
            },
            Walk::Finished => StrongCheck::Indeterminate {
                reason: if self.pool.is_complete() {
                    format!(
                        "{profiles} opponent profiles exceed the search cap of {}",
                        self.cap
                    )
                } else {
                    format!("opponent moves cannot be enumerated: {}", self.pool.note)
                },
            },
        })
    }
}

fn check_claim(spec: &GameSpec, s: &Strategy) -> Result<(), StrategyError> {
    validate(spec, s).map_err(|violation| StrategyError::Invalid {
        player: s.owner(),
        violation,
    })
}

/// Whether `s` wins against every opponent strategy.
///
/// Tried in order: the invariance shortcut, full enumeration of the opponent
/// closure (when complete and within the cap), the counter-strategy
/// constructions, and partial enumeration.
pub fn is_strong_winning(
    spec: &GameSpec,
    s: &Strategy,
    cfg: SearchConfig,
) -> Result<StrongCheck, StrategyError> {
    check_claim(spec, s)?;
    let opposition = Opposition::new(spec, s.owner(), cfg)?;
    opposition.check(s, &mut Budget::new(cfg.cap))
}

/// Brute-force re-verification against every opponent profile; `None` when
/// the opponent closure is incomplete or the profiles exceed the cap.
pub fn verify_by_enumeration(
    spec: &GameSpec,
    s: &Strategy,
    cfg: SearchConfig,
) -> Result<Option<bool>, StrategyError> {
    check_claim(spec, s)?;
    let opposition = Opposition::new(spec, s.owner(), cfg)?;
    let rounds = spec.rounds_for(s.owner().opponent());
    if !opposition.pool.is_complete() || opposition.pool.profiles(rounds) > cfg.cap {
        return Ok(None);
    }
    let moves: Vec<&UnitaryMatrix> = s.moves().iter().map(Move::matrix).collect();
    Ok(
        match opposition.enumerate(&moves, &mut Budget::new(cfg.cap))? {
            Walk::Finished => Some(true),
            Walk::Stopped(_) => Some(false),
            Walk::OutOfBudget => None,
        },
    )
}

/// Searches the player's strategies for a strong winning one.
pub fn find_strong(
    spec: &GameSpec,
    player: Player,
    cfg: SearchConfig,
) -> Result<AnalysisVerdict, StrategyError> {
    let owner_pool = Pool::of(spec.group(player))?;
    let opposition = Opposition::new(spec, player, cfg)?;
    let mut budget = Budget::new(cfg.cap);
    let rounds = spec.rounds_for(player);
    let mut candidates = 0u64;
    let verdict = |result, candidates, budget: &Budget| AnalysisVerdict {
        player,
        strength: Strength::Strong,
        result,
        summary: SearchSummary {
            candidates,
            playouts: budget.used,
        },
    };

    if owner_pool.is_complete() && owner_pool.profiles(rounds) <= cfg.cap {
        let mut by_proof = false;
        let mut undecided: Option<String> = None;
        for digits in Odometer::new(owner_pool.moves().len(), rounds) {
            candidates += 1;
            let claim = strategy_from(player, owner_pool.moves(), &digits);
            match opposition.check(&claim, &mut budget)? {
                StrongCheck::Holds { .. } => {
                    let result = Finding::Exists {
                        witness: claim,
                        co_witness: None,
                    };
                    return Ok(verdict(result, candidates, &budget));
                }
                StrongCheck::Fails { route, .. } => {
                    by_proof |= route == CheckRoute::ProofConstruction;
                }
                StrongCheck::Indeterminate { reason } => {
                    if budget.exhausted() {
                        return Ok(verdict(
                            Finding::Indeterminate { reason },
                            candidates,
                            &budget,
                        ));
                    }
                    undecided.get_or_insert(reason);
                }
            }
        }
        let result = match undecided {
            Some(reason) => Finding::Indeterminate { reason },
            None => Finding::NotExists {
                method: if by_proof {
                    Method::ProofConstruction
                } else {
                    Method::Exhaustion
                },
                evidence: Evidence::Summary(SearchSummary {
                    candidates,
                    playouts: budget.used,
                }),
            },
        };
        return Ok(verdict(result, candidates, &budget));
    }

    // The player's strategies cannot all be listed.
    if let Some(evidence) = universal_refutation(spec, player)? {
        let result = Finding::NotExists {
            method: Method::ProofConstruction,
            evidence,
        };
        return Ok(verdict(result, candidates, &budget));
    }
    let mut tried: Vec<Strategy> = Vec::new();
    if player == Player::One {
        if let Some(w) = witness_noncanonical(spec)? {
            tried.push(w);
        }
    }
    let pool_claims = Odometer::new(owner_pool.moves().len(), rounds)
        .map(|d| strategy_from(player, owner_pool.moves(), &d));
    for claim in tried.into_iter().chain(pool_claims) {
        if budget.exhausted() {
            break;
        }
        candidates += 1;
        if let StrongCheck::Holds { .. } = opposition.check(&claim, &mut budget)? {
            let result = Finding::Exists {
                witness: claim,
                co_witness: None,
            };
            return Ok(verdict(result, candidates, &budget));
        }
    }
    let reason = if owner_pool.is_complete() {
        format!(
            "{} candidate strategies exceed the search cap of {}",
            owner_pool.profiles(rounds),
            cfg.cap
        )
    } else {
        format!(
            "player {} moves cannot be enumerated: {}",
            player, owner_pool.note
        )
    };
    Ok(verdict(
        Finding::Indeterminate { reason },
        candidates,
        &budget,
    ))
}

/// Evidence that no strategy of `claimant` is strongly winning, from a
/// construction whose hypotheses hold at the group level.
pub fn universal_refutation(
    spec: &GameSpec,
    claimant: Player,
) -> Result<Option<Evidence>, StrategyError> {
    if universal_construction(spec, claimant)?.is_none() {
        return Ok(None);
    }
    let claim = Strategy::identity(claimant, spec.rounds_for(claimant), spec.dim())?;
    let pair = construct_counterexample(spec, &claim)?;
    Ok(Some(Evidence::Counterexample {
        claim,
        pair: Box::new(pair),
    }))
}

/// The prescribed weak pair, tried before any search.
fn constructed_weak_pair(
    spec: &GameSpec,
    player: Player,
) -> Result<(Strategy, Strategy), StrategyError> {
    let n = spec.dim();
    let (q0, qa, qb) = (
        spec.initial(),
        spec.target(Player::One),
        spec.target(Player::Two),
    );
    let r1 = spec.rounds_for(Player::One);
    let r2 = spec.rounds_for(Player::Two);
    Ok(match player {
        Player::One => (
            Strategy::identity(Player::One, r1, n)?
                .with_move(r1 - 1, Move::transposition(n, qa, qb)?),
            Strategy::identity(Player::Two, r2, n)?
                .with_move(0, refute::swap_or_identity(n, q0, qb)?),
        ),
        Player::Two => (
            Strategy::identity(Player::Two, r2, n)?
                .with_move(r2 - 1, refute::swap_or_identity(n, q0, qb)?),
            Strategy::identity(Player::One, r1, n)?,
        ),
    })
}

fn weak_pair_wins(
    spec: &GameSpec,
    player: Player,
    witness: &Strategy,
    co: &Strategy,
) -> Result<bool, StrategyError> {
    if validate(spec, witness).is_err() || validate(spec, co).is_err() {
        return Ok(false);
    }
    let playout = match player {
        Player::One => crate::game::play(spec, witness, co)?,
        Player::Two => crate::game::play(spec, co, witness)?,
    };
    Ok(wins(spec, playout.final_state(), player))
}

/// Searches for a strategy that wins against at least one opponent strategy.
pub fn find_weak(
    spec: &GameSpec,
    player: Player,
    cfg: SearchConfig,
) -> Result<AnalysisVerdict, StrategyError> {
    let mut budget = Budget::new(cfg.cap);
    let mut candidates = 0u64;
    let verdict = |result, candidates, budget: &Budget| AnalysisVerdict {
        player,
        strength: Strength::Weak,
        result,
        summary: SearchSummary {
            candidates,
            playouts: budget.used,
        },
    };
    let (witness, co) = constructed_weak_pair(spec, player)?;
    candidates += 1;
    budget.spend();
    if weak_pair_wins(spec, player, &witness, &co)? {
        let result = Finding::Exists {
            witness,
            co_witness: Some(co),
        };
        return Ok(verdict(result, candidates, &budget));
    }

    let owner_pool = Pool::of(spec.group(player))?;
    let opp_pool = Pool::of(spec.group(player.opponent()))?;
    let rounds = spec.rounds_for(player);
    for digits in Odometer::new(owner_pool.moves().len(), rounds) {
        candidates += 1;
        let claim = strategy_from(player, owner_pool.moves(), &digits);
        let moves: Vec<&UnitaryMatrix> = claim.moves().iter().map(Move::matrix).collect();
        let walker = Walker {
            schedule: spec.schedule(),
            owner: player,
            owner_moves: &moves,
            pool: opp_pool.moves(),
        };
        match walker.run(&spec.initial_state(), &mut budget, &mut |s| {
            wins(spec, s, player)
        })? {
            Walk::Finished => {}
            Walk::Stopped(picks) => {
                let co = strategy_from(player.opponent(), opp_pool.moves(), &picks);
                let result = Finding::Exists {
                    witness: claim,
                    co_witness: Some(co),
                };
                return Ok(verdict(result, candidates, &budget));
            }
            Walk::OutOfBudget => {
                let result = Finding::Indeterminate {
                    reason: budget.reason(),
                };
                return Ok(verdict(result, candidates, &budget));
            }
        }
    }
    let result = if owner_pool.is_complete() && opp_pool.is_complete() {
        Finding::NotExists {
            method: Method::Exhaustion,
            evidence: Evidence::Summary(SearchSummary {
                candidates,
                playouts: budget.used,
            }),
        }
    } else {
        let note = if owner_pool.is_complete() {
            &opp_pool.note
        } else {
            &owner_pool.note
        };
        Finding::Indeterminate {
            reason: format!("strategies cannot be enumerated: {note}"),
        }
    };
    Ok(verdict(result, candidates, &budget))
}

/// Player 1's witness in a noncanonical game: reach a state fixed by all of
/// player 2's moves, wait, then rotate it onto the target.
pub fn witness_noncanonical(spec: &GameSpec) -> Result<Option<Strategy>, StrategyError> {
    if spec.schedule().is_canonical() {
        return Ok(None);
    }
    let ga = spec.group(Player::One);
    let gb = spec.group(Player::Two);
    let mover = match reachable_invariant(ga, gb, &spec.initial_state())? {
        Reachability::Found { mover, .. } => mover,
        Reachability::Absent | Reachability::Indeterminate(_) => return Ok(None),
    };
    let n = spec.dim();
    let (q0, qa) = (spec.initial(), spec.target(Player::One));
    let undo = mover.adjoint();
    let last = if q0 == qa {
        undo
    } else if contains_symmetric(ga) == Membership::Yes {
        Move::transposition(n, q0, qa)?.compose(&undo)?
    } else {
        return Ok(None);
    };
    let rounds = spec.rounds_for(Player::One);
    let strategy = Strategy::identity(Player::One, rounds, n)?
        .with_move(0, mover)
        .with_move(rounds - 1, last);
    Ok(Some(strategy))
}
