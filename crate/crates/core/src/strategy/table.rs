//! The summary matrix of strong-winning-strategy existence, checked on
//! concrete instances.
//!
//! Every row is instantiated with enumerable groups for each `n` and `m` in
//! range; rows whose statement ranges over `U(n)` get an extra instance with
//! the named unitary group, which can only be settled by witnesses and
//! counter-strategy constructions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{
    construct_counterexample, find_strong, universal_construction, Evidence, Finding, Method, Pool,
    SearchConfig, StrategyError,
};
use crate::game::{GameSpec, Player, Schedule, Strategy};
use crate::gate::Move;
use crate::groups::{ActionGroup, GroupKind};
use crate::linalg::{ComplexMatrix, UnitaryMatrix, C64};

pub const MAX_TABLE_N: usize = 4;
pub const MAX_TABLE_M: usize = 3;
/// Claims sampled per refuted instance.
const SAMPLED_CLAIMS: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Shape {
    SameClassical,
    SameQuantum,
    ClassicalUnderQuantum,
    QuantumOverClassical,
    InvariantWithSymmetric,
    InvariantAtTarget,
}

#[derive(Clone, Copy, Debug)]
pub struct TableRow {
    pub number: u8,
    pub label: &'static str,
    /// Expected existence for players 1 and 2.
    pub expected: [bool; 2],
    canonical: bool,
    shape: Shape,
}

pub const TABLE_ROWS: [TableRow; 8] = [
    TableRow {
        number: 1,
        label: "Canonical & same group (classical vs. classical)",
        expected: [false, false],
        canonical: true,
        shape: Shape::SameClassical,
    },
    TableRow {
        number: 2,
        label: "Canonical & same group (quantum vs. quantum)",
        expected: [false, false],
        canonical: true,
        shape: Shape::SameQuantum,
    },
    TableRow {
        number: 3,
        label: "Noncanonical & same group (classical vs. classical)",
        expected: [false, false],
        canonical: false,
        shape: Shape::SameClassical,
    },
    TableRow {
        number: 4,
        label: "Noncanonical & same group (quantum vs. quantum)",
        expected: [false, false],
        canonical: false,
        shape: Shape::SameQuantum,
    },
    TableRow {
        number: 5,
        label: "Canonical & S_n <= A < B <= U(n)",
        expected: [false, false],
        canonical: true,
        shape: Shape::ClassicalUnderQuantum,
    },
    TableRow {
        number: 6,
        label: "Canonical & S_n <= B < A <= U(n)",
        expected: [false, false],
        canonical: true,
        shape: Shape::QuantumOverClassical,
    },
    TableRow {
        number: 7,
        label: "Noncanonical & B < A & S_n <= A & psi invariant",
        expected: [true, false],
        canonical: false,
        shape: Shape::InvariantWithSymmetric,
    },
    TableRow {
        number: 8,
        label: "Noncanonical & B < A & psi invariant & q0 = qA",
        expected: [true, false],
        canonical: false,
        shape: Shape::InvariantAtTarget,
    },
];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InstanceCheck {
    pub player: Player,
    pub expected: bool,
    /// `None` when the search was indeterminate.
    pub observed: Option<bool>,
    pub method: &'static str,
    pub detail: String,
    /// Random claims refuted by construction (zero when not applicable).
    pub sampled_refutations: usize,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InstanceReport {
    pub n: usize,
    pub m: usize,
    pub groups: String,
    pub witness_checked: bool,
    pub checks: Vec<InstanceCheck>,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RowReport {
    pub row: u8,
    pub label: &'static str,
    pub expected: [bool; 2],
    pub instances: Vec<InstanceReport>,
    pub witness_checked: bool,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TableReport {
    pub max_n: usize,
    pub max_m: usize,
    pub rows: Vec<RowReport>,
    pub all_pass: bool,
}

fn symmetric(n: usize) -> ActionGroup {
    ActionGroup::symmetric(n)
}

fn adjacent(n: usize) -> Result<Vec<Move>, StrategyError> {
    (0..n - 1)
        .map(|i| Move::transposition(n, i, i + 1).map_err(Into::into))
        .collect()
}

fn diagonal(phases: &[C64]) -> Result<Move, StrategyError> {
    let n = phases.len();
    let m = ComplexMatrix::from_fn(n, n, |i, j| {
        if i == j {
            phases[i]
        } else {
            C64::new(0.0, 0.0)
        }
    });
    Ok(Move::from_matrix(UnitaryMatrix::new(m)?))
}

/// A finite group strictly between `S_n` and `U(n)` that reaches the uniform
/// state: `<S_n, F_n>` for `n <= 3`. For `n = 4` that closure is too big, and
/// `<S_4, H (x) H>` (order 384) is used instead.
fn quantum(n: usize) -> Result<ActionGroup, StrategyError> {
    let mut gens = adjacent(n)?;
    if n <= 3 {
        gens.push(Move::qft(n)?);
    } else {
        let h = 1.0 / (n as f64).sqrt();
        let walsh = ComplexMatrix::from_fn(n, n, |i, j| {
            let sign = if (i & j).count_ones() % 2 == 0 {
                1.0
            } else {
                -1.0
            };
            C64::new(sign * h, 0.0)
        });
        gens.push(Move::from_matrix(UnitaryMatrix::new(walsh)?));
    }
    Ok(ActionGroup::generated(n, gens)?)
}

/// Row 8 groups with `A` lacking `S_n`, `B < A`, and `|q0>` reachable to a `B`-invariant state.
fn target_invariant_groups(n: usize) -> Result<(ActionGroup, ActionGroup), StrategyError> {
    let one = C64::new(1.0, 0.0);
    if n == 2 {
        let s = diagonal(&[one, C64::new(0.0, 1.0)])?;
        let z = diagonal(&[one, -one])?;
        return Ok((
            ActionGroup::generated(2, vec![s])?,
            ActionGroup::generated(2, vec![z])?,
        ));
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let hadamard = ComplexMatrix::from_fn(n, n, |i, j| match (i, j) {
        (0, 0) | (0, 1) | (1, 0) => C64::new(h, 0.0),
        (1, 1) => C64::new(-h, 0.0),
        (i, j) if i == j => one,
        _ => C64::new(0.0, 0.0),
    });
    let swap = Move::transposition(n, 0, 1)?;
    let a = ActionGroup::generated(
        n,
        vec![
            swap.clone(),
            Move::from_matrix(UnitaryMatrix::new(hadamard)?),
        ],
    )?;
    Ok((a, ActionGroup::generated(n, vec![swap])?))
}

fn group_name(g: &ActionGroup) -> String {
    let n = g.dim();
    match g.kind() {
        GroupKind::Symmetric => format!("S_{n}"),
        GroupKind::Unitary => format!("U({n})"),
        GroupKind::Generated(gens) => {
            let names: Vec<String> = gens.iter().map(Move::label).collect();
            format!("<{}>", names.join(", "))
        }
    }
}

/// The spec for one instance; `unitary` swaps the row's quantum group for `U(n)`.
fn instance_spec(
    row: &TableRow,
    n: usize,
    m: usize,
    unitary: bool,
) -> Result<GameSpec, StrategyError> {
    let schedule = if row.canonical {
        Schedule::Canonical(m)
    } else {
        Schedule::Noncanonical(m)
    };
    let q = || -> Result<ActionGroup, StrategyError> {
        if unitary {
            Ok(ActionGroup::unitary(n))
        } else {
            quantum(n)
        }
    };
    let (q0, qa, qb, a, b) = match row.shape {
        Shape::SameClassical => (0, n - 1, 0, symmetric(n), symmetric(n)),
        Shape::SameQuantum => (0, n - 1, 0, q()?, q()?),
        Shape::ClassicalUnderQuantum => (0, n - 1, 0, symmetric(n), q()?),
        Shape::QuantumOverClassical => (0, n - 1, 0, q()?, symmetric(n)),
        Shape::InvariantWithSymmetric => (0, n - 1, 0, q()?, symmetric(n)),
        Shape::InvariantAtTarget => {
            let (a, b) = target_invariant_groups(n)?;
            (0, 0, 1, a, b)
        }
    };
    Ok(GameSpec::new(n, q0, qa, qb, schedule, a, b)?)
}

fn has_unitary_variant(row: &TableRow) -> bool {
    !matches!(row.shape, Shape::SameClassical | Shape::InvariantAtTarget)
}

/// Draws a claim for `player` from its group: closure elements, or Haar-random unitaries.
fn sample_claim(
    spec: &GameSpec,
    player: Player,
    rng: &mut ChaCha8Rng,
) -> Result<Strategy, StrategyError> {
    let n = spec.dim();
    let group = spec.group(player);
    let rounds = spec.rounds_for(player);
    let moves = if matches!(group.kind(), GroupKind::Unitary) {
        (0..rounds)
            .map(|_| Ok(Move::from_matrix(UnitaryMatrix::random(n, rng)?)))
            .collect::<Result<Vec<_>, StrategyError>>()?
    } else {
        let pool = Pool::of(group)?;
        let elements = pool.moves();
        (0..rounds)
            .map(|_| elements[rng.random_range(0..elements.len())].clone())
            .collect()
    };
    Ok(Strategy::new(player, moves))
}

/// Refutes sampled claims by construction; `Ok(None)` when no construction applies.
fn refute_samples(
    spec: &GameSpec,
    player: Player,
    seed: u64,
) -> Result<Option<Result<usize, String>>, StrategyError> {
    if universal_construction(spec, player)?.is_none() {
        return Ok(None);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 0..SAMPLED_CLAIMS {
        let claim = sample_claim(spec, player, &mut rng)?;
        let pair = construct_counterexample(spec, &claim)?;
        if pair.defeating(spec, player).is_none() || pair.differing_move().is_none() {
            return Ok(Some(Err(format!("sampled claim {k} was not refuted"))));
        }
    }
    Ok(Some(Ok(SAMPLED_CLAIMS)))
}

fn check_player(
    spec: &GameSpec,
    player: Player,
    expected: bool,
    witness_checked: bool,
    seed: u64,
    cfg: SearchConfig,
) -> Result<InstanceCheck, StrategyError> {
    let verdict = find_strong(spec, player, cfg)?;
    let observed = verdict.exists();
    let (mut method, mut detail) = match &verdict.result {
        Finding::Exists { witness, .. } => {
            let labels: Vec<String> = witness.moves().iter().map(Move::label).collect();
            ("exhaustion", format!("witness ({})", labels.join(", ")))
        }
        Finding::NotExists { method, evidence } => (
            match method {
                Method::Exhaustion => "exhaustion",
                Method::ProofConstruction => "proof-construction",
            },
            match evidence {
                Evidence::Counterexample { pair, .. } => {
                    format!("every claim answered by: {}", pair.construction.describe())
                }
                Evidence::Summary(s) => {
                    format!("{} candidates, {} playouts", s.candidates, s.playouts)
                }
            },
        ),
        Finding::Indeterminate { reason } => ("indeterminate", reason.clone()),
    };
    if witness_checked {
        method = "witness-checked";
    }
    let mut passed = observed == Some(expected);
    let mut sampled = 0;
    if observed == Some(false) {
        match refute_samples(spec, player, seed)? {
            Some(Ok(k)) => sampled = k,
            Some(Err(why)) => {
                passed = false;
                detail = why;
            }
            None => {}
        }
    }
    Ok(InstanceCheck {
        player,
        expected,
        observed,
        method,
        detail,
        sampled_refutations: sampled,
        passed,
    })
}

fn check_instance(
    row: &TableRow,
    n: usize,
    m: usize,
    unitary: bool,
    cfg: SearchConfig,
) -> Result<InstanceReport, StrategyError> {
    let spec = instance_spec(row, n, m, unitary)?;
    let exhaustive = [Player::One, Player::Two]
        .iter()
        .try_fold(true, |acc, &p| {
            let pool = Pool::of(spec.group(p))?;
            Ok::<bool, StrategyError>(
                acc && pool.is_complete() && pool.profiles(spec.rounds_for(p)) <= cfg.cap,
            )
        })?;
    let witness_checked = !exhaustive;
    let mut checks = Vec::new();
    for (i, player) in [Player::One, Player::Two].into_iter().enumerate() {
        let seed = (u64::from(row.number) << 16) | ((n as u64) << 8) | ((m as u64) << 2) | i as u64;
        checks.push(check_player(
            &spec,
            player,
            row.expected[i],
            witness_checked,
            seed,
            cfg,
        )?);
    }
    let passed = checks.iter().all(|c| c.passed);
    Ok(InstanceReport {
        n,
        m,
        groups: format!(
            "A={}, B={}",
            group_name(spec.group(Player::One)),
            group_name(spec.group(Player::Two))
        ),
        witness_checked,
        checks,
        passed,
    })
}

/// Checks every row for `2 <= n <= max_n` and `1 <= m <= max_m`.
pub fn verify_table(
    max_n: usize,
    max_m: usize,
    cfg: SearchConfig,
) -> Result<TableReport, StrategyError> {
    if !(2..=MAX_TABLE_N).contains(&max_n) || !(1..=MAX_TABLE_M).contains(&max_m) {
        return Err(StrategyError::Bounds(format!(
            "need 2 <= max_n <= {MAX_TABLE_N} and 1 <= max_m <= {MAX_TABLE_M}, got {max_n} and {max_m}"
        )));
    }
    let mut rows = Vec::new();
    for row in &TABLE_ROWS {
        let mut instances = Vec::new();
        for n in 2..=max_n {
            for m in 1..=max_m {
                instances.push(check_instance(row, n, m, false, cfg)?);
                if has_unitary_variant(row) {
                    instances.push(check_instance(row, n, m, true, cfg)?);
                }
            }
        }
        let passed = instances.iter().all(|i| i.passed);
        rows.push(RowReport {
            row: row.number,
            label: row.label,
            expected: row.expected,
            witness_checked: instances.iter().any(|i| i.witness_checked),
            instances,
            passed,
        });
    }
    let all_pass = rows.iter().all(|r| r.passed);
    Ok(TableReport {
        max_n,
        max_m,
        rows,
        all_pass,
    })
}
