//! Reachable-state automata and their DOT rendering.
//!
//! Nodes are states up to global phase; edges carry the names of the moves
//! that connect them, with parallel edges merged into one comma-separated label.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use thiserror::Error;

use crate::game::{GameSpec, Player};
use crate::gate::Move;
use crate::linalg::{LinalgError, StateVector, UnitaryMatrix, C64};

/// Exploration stops adding nodes beyond this count.
pub const MAX_NODES: usize = 10_000;
const KEY_SCALE: f64 = 1e7;
/// Amplitudes below this magnitude never fix the phase.
const PHASE_ANCHOR_MIN: f64 = 1e-6;

#[derive(Debug, Error, PartialEq)]
pub enum AutomatonError {
    #[error("move alphabet for {0} is empty")]
    EmptyAlphabet(Player),
    #[error("depth {depth} exceeds the {total} rounds of the game")]
    DepthExceeded { depth: usize, total: usize },
    #[error("move '{name}' has dimension {found}, game has {expected}")]
    Dimension {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// A move under the name it is displayed with.
#[derive(Clone, Debug, PartialEq)]
pub struct NamedMove {
    pub name: String,
    pub unitary: UnitaryMatrix,
}

impl NamedMove {
    pub fn new(name: impl Into<String>, unitary: UnitaryMatrix) -> Self {
        Self {
            name: name.into(),
            unitary,
        }
    }
}

impl From<Move> for NamedMove {
    fn from(m: Move) -> Self {
        Self {
            name: m.label(),
            unitary: m.matrix().clone(),
        }
    }
}

/// Phase-canonical rounded amplitudes.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeKey(Vec<(i64, i64)>);

/// Rotates the first non-negligible amplitude onto the positive real axis and
/// rounds every entry to the `1e-7` grid.
pub fn node_key(v: &StateVector) -> NodeKey {
    let amps = v.amplitudes();
    let rot = amps
        .iter()
        .find(|a| a.norm() > PHASE_ANCHOR_MIN)
        .map_or(C64::new(1.0, 0.0), |a| a.conj() / a.norm());
    NodeKey(
        amps.iter()
            .map(|a| {
                let z = a * rot;
                (grid(z.re), grid(z.im))
            })
            .collect(),
    )
}

fn grid(x: f64) -> i64 {
    // Rounding maps -0.0 and 0.0 to the same integer.
    (x * KEY_SCALE).round() as i64
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Marks {
    pub initial: bool,
    pub target_p1: bool,
    pub target_p2: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateNode {
    pub key: NodeKey,
    /// Basis index (`"3"`) or `"psi_k"` in discovery order.
    pub label: String,
    /// The state as first reached.
    pub state: StateVector,
    pub marks: Marks,
}

impl StateNode {
    fn dot_id(&self) -> String {
        match self.label.parse::<usize>() {
            Ok(k) => format!("q{k}"),
            Err(_) => self.label.clone(),
        }
    }

    fn display(&self) -> String {
        match self.label.strip_prefix("psi_") {
            Some(k) => format!("|ψ{k}⟩"),
            None => format!("|{}⟩", self.label),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransitionEdge {
    /// Indices into [`Automaton::nodes`].
    pub from: usize,
    pub to: usize,
    /// Sorted, deduplicated move names.
    pub labels: Vec<String>,
}

impl TransitionEdge {
    pub fn label(&self) -> String {
        self.labels.join(", ")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Automaton {
    pub nodes: Vec<StateNode>,
    pub edges: Vec<TransitionEdge>,
    /// Set when the node limit stopped exploration early.
    pub truncated: bool,
}

impl Automaton {
    pub fn node(&self, label: &str) -> Option<&StateNode> {
        self.nodes.iter().find(|n| n.label == label)
    }

    pub fn edge(&self, from: &str, to: &str) -> Option<&TransitionEdge> {
        let f = self.nodes.iter().position(|n| n.label == from)?;
        let t = self.nodes.iter().position(|n| n.label == to)?;
        self.edges.iter().find(|e| e.from == f && e.to == t)
    }
}

struct Builder<'a> {
    spec: &'a GameSpec,
    nodes: Vec<StateNode>,
    index: HashMap<NodeKey, usize>,
    edges: BTreeMap<(usize, usize), BTreeSet<String>>,
    psi_count: usize,
    truncated: bool,
}

impl Builder<'_> {
    fn intern(&mut self, state: StateVector) -> Option<usize> {
        let key = node_key(&state);
        if let Some(&i) = self.index.get(&key) {
            return Some(i);
        }
        if self.nodes.len() >= MAX_NODES {
            self.truncated = true;
            return None;
        }
        let basis = state.as_basis_index();
        let label = match basis {
            Some(k) => k.to_string(),
            None => {
                self.psi_count += 1;
                format!("psi_{}", self.psi_count)
            }
        };
        let marks = Marks {
            initial: basis == Some(self.spec.initial()),
            target_p1: basis == Some(self.spec.target(Player::One)),
            target_p2: basis == Some(self.spec.target(Player::Two)),
        };
        let i = self.nodes.len();
        self.index.insert(key.clone(), i);
        self.nodes.push(StateNode {
            key,
            label,
            state,
            marks,
        });
        Some(i)
    }
}

fn check_alphabet(
    spec: &GameSpec,
    p: Player,
    alphabet: &[NamedMove],
) -> Result<(), AutomatonError> {
    if alphabet.is_empty() {
        return Err(AutomatonError::EmptyAlphabet(p));
    }
    for m in alphabet {
        if m.unitary.dim() != spec.dim() {
            return Err(AutomatonError::Dimension {
                name: m.name.clone(),
                expected: spec.dim(),
                found: m.unitary.dim(),
            });
        }
    }
    Ok(())
}

/// Round-by-round breadth-first exploration from `|q0>`: at each round every
/// alphabet move of the player to move is applied to every state reached in
/// the previous round.
pub fn explore(
    spec: &GameSpec,
    alphabet_a: &[NamedMove],
    alphabet_b: &[NamedMove],
    depth: usize,
) -> Result<Automaton, AutomatonError> {
    check_alphabet(spec, Player::One, alphabet_a)?;
    check_alphabet(spec, Player::Two, alphabet_b)?;
    let schedule = spec.schedule();
    if depth > schedule.total_rounds() {
        return Err(AutomatonError::DepthExceeded {
            depth,
            total: schedule.total_rounds(),
        });
    }
    let mut b = Builder {
        spec,
        nodes: Vec::new(),
        index: HashMap::new(),
        edges: BTreeMap::new(),
        psi_count: 0,
        truncated: false,
    };
    let start = b.intern(spec.initial_state()).into_iter();
    let mut frontier: BTreeSet<usize> = start.collect();
    for round in 0..depth {
        let alphabet = match schedule.mover(round) {
            Player::One => alphabet_a,
            Player::Two => alphabet_b,
        };
        let mut next = BTreeSet::new();
        for &from in &frontier {
            for mv in alphabet {
                let state = mv.unitary.apply(&b.nodes[from].state)?;
                if let Some(to) = b.intern(state) {
                    b.edges
                        .entry((from, to))
                        .or_default()
                        .insert(mv.name.clone());
                    next.insert(to);
                }
            }
        }
        frontier = next;
    }
    let edges = b
        .edges
        .into_iter()
        .map(|((from, to), labels)| TransitionEdge {
            from,
            to,
            labels: labels.into_iter().collect(),
        })
        .collect();
    Ok(Automaton {
        nodes: b.nodes,
        edges,
        truncated: b.truncated,
    })
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Graphviz text. Nodes are emitted in key order and edges by endpoint keys,
/// so equal automata give identical bytes. Player 1's target is filled,
/// player 2's target has a double border.
pub fn to_dot(a: &Automaton) -> String {
    let mut order: Vec<usize> = (0..a.nodes.len()).collect();
    order.sort_by(|&x, &y| a.nodes[x].key.cmp(&a.nodes[y].key));
    let mut out = String::new();
    out.push_str("digraph automaton {\n");
    out.push_str("  rankdir=LR;\n");
    out.push_str("  node [shape=circle];\n");
    out.push_str("  __start [shape=point, label=\"\"];\n");
    for &i in &order {
        let node = &a.nodes[i];
        let mut attrs = vec![format!("label={}", quote(&node.display()))];
        if node.marks.target_p1 {
            attrs.push("style=filled".into());
            attrs.push("fillcolor=\"#f4c7d0\"".into());
        }
        if node.marks.target_p2 {
            attrs.push("peripheries=2".into());
        }
        let _ = writeln!(out, "  {} [{}];", quote(&node.dot_id()), attrs.join(", "));
    }
    for &i in &order {
        if a.nodes[i].marks.initial {
            let _ = writeln!(out, "  __start -> {};", quote(&a.nodes[i].dot_id()));
        }
    }
    let mut edges: Vec<&TransitionEdge> = a.edges.iter().collect();
    edges.sort_by(|x, y| {
        (&a.nodes[x.from].key, &a.nodes[x.to].key).cmp(&(&a.nodes[y.from].key, &a.nodes[y.to].key))
    });
    for e in edges {
        let _ = writeln!(
            out,
            "  {} -> {} [label={}];",
            quote(&a.nodes[e.from].dot_id()),
            quote(&a.nodes[e.to].dot_id()),
            quote(&e.label())
        );
    }
    out.push_str("}\n");
    out
}
