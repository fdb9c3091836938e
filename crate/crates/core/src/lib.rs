//! Sequential zero-sum quantum games whose move sets are groups of unitary
//! operators.
//!
//! Games are played on the computational basis of `C^n`; each player draws
//! moves from an [`groups::ActionGroup`]. The crate plays games out, decides
//! strong and weak winning strategies by exhaustive search or by explicit
//! counter-strategy constructions, and exports reachable-state automata as
//! Graphviz DOT.

pub mod automaton;
pub mod cli;
pub mod game;
pub mod gate;
pub mod groups;
pub mod linalg;
pub mod strategy;

pub use game::{GameSpec, Player, Schedule, Strategy};
pub use gate::{GateTerm, Move};
pub use groups::{ActionGroup, Membership};
pub use linalg::{StateVector, UnitaryMatrix};
