//! Action groups: the move repertoires players draw from.
//!
//! Finite groups are presented by generators and enumerated by product
//! saturation; `S_n` and `U(n)` are named. Membership is three-valued because
//! enumeration stops at a cap.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use thiserror::Error;

use crate::gate::{permutation_term, GateTerm, Move};
use crate::linalg::{
    in_span, null_space, ComplexMatrix, LinalgError, StateVector, UnitaryMatrix, UNITARY_TOL,
};

pub const DEFAULT_CLOSURE_CAP: usize = 50_000;

/// Entrywise tolerance for matching a matrix against group elements.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// Grid used to hash non-permutation elements.
const KEY_GRID: f64 = 1e7;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GroupError {
    #[error("generator {index} has dimension {found}, group has dimension {n}")]
    GeneratorDimension {
        index: usize,
        n: usize,
        found: usize,
    },
    #[error("U({0}) is not enumerable")]
    NotEnumerable(usize),
    #[error("closure cap must be positive")]
    ZeroCap,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Three-valued answer for questions that need an enumeration which may
/// have been truncated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Membership {
    Yes,
    No,
    Indeterminate,
}

impl Membership {
    pub fn is_yes(self) -> bool {
        self == Membership::Yes
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum GroupKind {
    /// The group generated by these moves.
    Generated(Vec<Move>),
    /// All `n!` permutation matrices.
    Symmetric,
    /// The full unitary group; never enumerated.
    Unitary,
}

/// A player's move repertoire, a subgroup of `U(n)`.
#[derive(Clone)]
pub struct ActionGroup {
    n: usize,
    kind: GroupKind,
    closure_cap: usize,
    closure: Arc<OnceLock<GroupClosure>>,
}

impl PartialEq for ActionGroup {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.kind == other.kind && self.closure_cap == other.closure_cap
    }
}

impl fmt::Debug for ActionGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ActionGroup")
            .field("n", &self.n)
            .field("kind", &self.kind)
            .field("closure_cap", &self.closure_cap)
            .finish()
    }
}

impl ActionGroup {
    fn with_kind(n: usize, kind: GroupKind) -> Self {
        Self {
            n,
            kind,
            closure_cap: DEFAULT_CLOSURE_CAP,
            closure: Arc::new(OnceLock::new()),
        }
    }

    pub fn symmetric(n: usize) -> Self {
        Self::with_kind(n, GroupKind::Symmetric)
    }

    pub fn unitary(n: usize) -> Self {
        Self::with_kind(n, GroupKind::Unitary)
    }

    pub fn generated(n: usize, generators: Vec<Move>) -> Result<Self, GroupError> {
        for (index, g) in generators.iter().enumerate() {
            if g.dim() != n {
                return Err(GroupError::GeneratorDimension {
                    index,
                    n,
                    found: g.dim(),
                });
            }
        }
        Ok(Self::with_kind(n, GroupKind::Generated(generators)))
    }

    /// The group generated by the adjacent transpositions `T_{i,i+1}`, which is `S_n`.
    pub fn adjacent_transpositions(n: usize) -> Result<Self, GroupError> {
        let gens = (0..n.saturating_sub(1))
            .map(|i| Move::transposition(n, i, i + 1))
            .collect::<Result<Vec<_>, _>>()?;
        Self::generated(n, gens)
    }

    pub fn with_closure_cap(self, cap: usize) -> Result<Self, GroupError> {
        if cap == 0 {
            return Err(GroupError::ZeroCap);
        }
        Ok(Self::with_kind(self.n, self.kind).set_cap(cap))
    }

    fn set_cap(mut self, cap: usize) -> Self {
        self.closure_cap = cap;
        self
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> &GroupKind {
        &self.kind
    }

    pub fn closure_cap(&self) -> usize {
        self.closure_cap
    }

    pub fn is_enumerable(&self) -> bool {
        !matches!(self.kind, GroupKind::Unitary)
    }

    /// Generators whose common fixed space is the group's invariant subspace.
    /// `None` for `U(n)`.
    fn invariance_generators(&self) -> Option<Vec<UnitaryMatrix>> {
        match &self.kind {
            GroupKind::Generated(g) => Some(g.iter().map(|m| m.matrix().clone()).collect()),
            GroupKind::Symmetric => Some(
                (0..self.n.saturating_sub(1))
                    .filter_map(|i| UnitaryMatrix::transposition(self.n, i, i + 1).ok())
                    .collect(),
            ),
            GroupKind::Unitary => None,
        }
    }
}

/// Hash key for deduplicating group elements: exact for permutations,
/// rounded to a `1e-7` grid otherwise.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum ElementKey {
    Perm(Vec<usize>),
    Grid(Vec<(i64, i64)>),
}

fn element_key(u: &UnitaryMatrix) -> ElementKey {
    if let Some(p) = u.permutation() {
        return ElementKey::Perm(p.to_vec());
    }
    let n = u.dim();
    let mut key = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let z = u.get(i, j);
            key.push((
                (z.re * KEY_GRID).round() as i64,
                (z.im * KEY_GRID).round() as i64,
            ));
        }
    }
    ElementKey::Grid(key)
}

/// The enumerated elements of a group, identity first.
#[derive(Clone, Debug)]
pub struct GroupClosure {
    elements: Vec<Move>,
    complete: bool,
    index: HashMap<ElementKey, usize>,
}

impl GroupClosure {
    fn new() -> Self {
        Self {
            elements: Vec::new(),
            complete: false,
            index: HashMap::new(),
        }
    }

    fn insert(&mut self, m: Move) -> bool {
        let key = element_key(m.matrix());
        if self.index.contains_key(&key) {
            return false;
        }
        self.index.insert(key, self.elements.len());
        self.elements.push(m);
        true
    }

    pub fn elements(&self) -> &[Move] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// False when enumeration stopped at the cap before saturating.
    pub fn is_complete(&self) -> bool {
        self.complete
    }

    /// Position of an element equal to `u` within `MEMBERSHIP_TOL`.
    pub fn position(&self, u: &UnitaryMatrix) -> Option<usize> {
        if let Some(&i) = self.index.get(&element_key(u)) {
            if self.elements[i].matrix().approx_eq(u, MEMBERSHIP_TOL) {
                return Some(i);
            }
        }
        // Grid keys can split near rounding boundaries; fall back to a scan.
        self.elements
            .iter()
            .position(|e| e.matrix().approx_eq(u, MEMBERSHIP_TOL))
    }
}

/// Enumerates the group: breadth-first left multiplication by generators for
/// generated groups, lexicographic permutations for `S_n`.
pub fn close(g: &ActionGroup) -> Result<&GroupClosure, GroupError> {
    if let Some(c) = g.closure.get() {
        return Ok(c);
    }
    let closure = match &g.kind {
        GroupKind::Unitary => return Err(GroupError::NotEnumerable(g.n)),
        GroupKind::Symmetric => close_symmetric(g.n, g.closure_cap),
        GroupKind::Generated(gens) => close_generated(g.n, gens, g.closure_cap)?,
    };
    Ok(g.closure.get_or_init(|| closure))
}

fn close_symmetric(n: usize, cap: usize) -> GroupClosure {
    let mut out = GroupClosure::new();
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        if out.len() == cap {
            out.complete = false;
            return out;
        }
        let term = permutation_term(&perm);
        let matrix = match UnitaryMatrix::from_permutation(perm.clone()) {
            Ok(m) => m,
            Err(_) => unreachable!("lexicographic enumeration yields permutations"),
        };
        out.insert(Move::from_parts(term, matrix));
        if !next_permutation(&mut perm) {
            out.complete = true;
            return out;
        }
    }
}

fn close_generated(n: usize, gens: &[Move], cap: usize) -> Result<GroupClosure, GroupError> {
    let mut out = GroupClosure::new();
    out.insert(Move::from_parts(
        GateTerm::Identity,
        UnitaryMatrix::identity(n)?,
    ));
    let mut cursor = 0;
    while cursor < out.len() {
        for g in gens {
            let x = &out.elements[cursor];
            let product = g.matrix().compose(x.matrix())?;
            if out.index.contains_key(&element_key(&product)) {
                continue;
            }
            if out.len() == cap {
                out.complete = false;
                return Ok(out);
            }
            let term = g.term().then_after(x.term());
            out.insert(Move::from_parts(term, product));
        }
        cursor += 1;
    }
    out.complete = true;
    Ok(out)
}

fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Whether `u` is an element of the group.
pub fn contains(g: &ActionGroup, u: &UnitaryMatrix) -> Membership {
    if u.dim() != g.n {
        return Membership::No;
    }
    match &g.kind {
        GroupKind::Unitary => {
            if u.unitarity_deviation() <= UNITARY_TOL {
                Membership::Yes
            } else {
                Membership::No
            }
        }
        GroupKind::Symmetric => {
            if u.permutation_within(MEMBERSHIP_TOL).is_some() {
                Membership::Yes
            } else {
                Membership::No
            }
        }
        GroupKind::Generated(_) => match close(g) {
            Ok(c) if c.position(u).is_some() => Membership::Yes,
            Ok(c) if c.is_complete() => Membership::No,
            _ => Membership::Indeterminate,
        },
    }
}

/// Whether `S_n` is a subgroup, decided by membership of every adjacent
/// transposition.
pub fn contains_symmetric(g: &ActionGroup) -> Membership {
    match g.kind {
        GroupKind::Unitary | GroupKind::Symmetric => return Membership::Yes,
        GroupKind::Generated(_) => {}
    }
    let mut verdict = Membership::Yes;
    for i in 0..g.n.saturating_sub(1) {
        let t = match UnitaryMatrix::transposition(g.n, i, i + 1) {
            Ok(t) => t,
            Err(_) => return Membership::Indeterminate,
        };
        match contains(g, &t) {
            Membership::No => return Membership::No,
            Membership::Indeterminate => verdict = Membership::Indeterminate,
            Membership::Yes => {}
        }
    }
    verdict
}

/// Orthonormal basis of the states fixed by every element of the group.
///
/// Computed as the common kernel of `(B_i - I)` over generators; a vector
/// fixed by the generators is fixed by every product and inverse. `U(n)`
/// fixes no state when `n > 1`.
pub fn invariant_subspace(g: &ActionGroup) -> Vec<StateVector> {
    let gens = match g.invariance_generators() {
        Some(gens) => gens,
        None if g.n == 1 => vec![],
        None => return vec![],
    };
    let blocks: Vec<ComplexMatrix> = gens
        .iter()
        .filter_map(|u| u.matrix().minus_identity().ok())
        .collect();
    match ComplexMatrix::vstack(g.n, &blocks) {
        Ok(stacked) => null_space(&stacked),
        Err(_) => vec![],
    }
}

/// Result of looking for a first move that lands in the opponent's invariant subspace.
#[derive(Clone, Debug, PartialEq)]
pub enum Reachability {
    Found { mover: Move, state: StateVector },
    Absent,
    Indeterminate(String),
}

/// Searches `ga` for a move `U` with `U q0` invariant under `gb`.
///
/// For `U(n)` the Fourier transform (and `F_n T_{0,q0}`) are tried first;
/// otherwise any invariant state is reached by completing it to a unitary.
pub fn reachable_invariant(
    ga: &ActionGroup,
    gb: &ActionGroup,
    q0: &StateVector,
) -> Result<Reachability, GroupError> {
    let invariant = invariant_subspace(gb);
    if invariant.is_empty() {
        return Ok(Reachability::Absent);
    }
    let n = ga.n;
    if q0.dim() != n || gb.n != n {
        return Err(LinalgError::DimensionMismatch {
            expected: n,
            found: q0.dim(),
        }
        .into());
    }
    match &ga.kind {
        GroupKind::Unitary => {
            let mut candidates = vec![Move::qft(n)?];
            if let Some(k) = q0.as_basis_index().filter(|&k| k != 0) {
                candidates.push(Move::qft(n)?.compose(&Move::transposition(n, 0, k)?)?);
            }
            for c in candidates {
                let state = c.matrix().apply(q0)?;
                if in_span(&invariant, &state)? {
                    return Ok(Reachability::Found { mover: c, state });
                }
            }
            let psi = invariant[0].clone();
            let col = q0.as_basis_index();
            let u = match col {
                Some(k) => UnitaryMatrix::with_column(&psi, k)?,
                // Non-basis start: map q0 -> |0> -> psi.
                None => UnitaryMatrix::with_column(&psi, 0)?
                    .compose(&UnitaryMatrix::with_column(q0, 0)?.adjoint())?,
            };
            let state = u.apply(q0)?;
            Ok(Reachability::Found {
                mover: Move::from_matrix(u),
                state,
            })
        }
        _ => {
            let closure = close(ga)?;
            for m in closure.elements() {
                let state = m.matrix().apply(q0)?;
                if in_span(&invariant, &state)? {
                    return Ok(Reachability::Found {
                        mover: m.clone(),
                        state,
                    });
                }
            }
            if closure.is_complete() {
                Ok(Reachability::Absent)
            } else {
                Ok(Reachability::Indeterminate(format!(
                    "closure truncated at {} elements",
                    closure.len()
                )))
            }
        }
    }
}
