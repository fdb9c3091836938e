//! Symbolic gate terms and moves.
//!
//! A [`Move`] pairs a certified unitary with the term it was built from, so
//! witnesses found by search can be reported in the same vocabulary the
//! game files use.

use serde::{Deserialize, Serialize};

use crate::linalg::{ComplexMatrix, LinalgError, UnitaryMatrix, C64};

/// The closed gate vocabulary: `I`, `T`, `QFT`, `QFT_DAG`, `MATRIX`, `COMPOSE`.
///
/// `COMPOSE [a, b, c]` denotes the matrix product `a * b * c`, so `c` acts first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "gate")]
pub enum GateTerm {
    #[serde(rename = "I")]
    Identity,
    #[serde(rename = "T")]
    Transposition { i: usize, j: usize },
    #[serde(rename = "QFT")]
    Qft,
    #[serde(rename = "QFT_DAG")]
    QftDag,
    /// Row-major entries as `[re, im]` pairs.
    #[serde(rename = "MATRIX")]
    Matrix { rows: Vec<Vec<[f64; 2]>> },
    #[serde(rename = "COMPOSE")]
    Compose { terms: Vec<GateTerm> },
}

impl GateTerm {
    pub fn transposition(i: usize, j: usize) -> Self {
        GateTerm::Transposition { i, j }
    }

    pub fn matrix(u: &UnitaryMatrix) -> Self {
        let n = u.dim();
        GateTerm::Matrix {
            rows: (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            let z = u.get(i, j);
                            [z.re, z.im]
                        })
                        .collect()
                })
                .collect(),
        }
    }

    /// Flattening product `self * other`; identities are dropped.
    pub fn then_after(&self, other: &GateTerm) -> GateTerm {
        let mut terms = Vec::new();
        for t in [self, other] {
            match t {
                GateTerm::Identity => {}
                GateTerm::Compose { terms: inner } => terms.extend(inner.iter().cloned()),
                t => terms.push(t.clone()),
            }
        }
        match terms.len() {
            0 => GateTerm::Identity,
            1 => terms.pop().unwrap_or(GateTerm::Identity),
            _ => GateTerm::Compose { terms },
        }
    }

    pub fn adjoint(&self) -> GateTerm {
        match self {
            GateTerm::Identity => GateTerm::Identity,
            GateTerm::Transposition { i, j } => GateTerm::Transposition { i: *i, j: *j },
            GateTerm::Qft => GateTerm::QftDag,
            GateTerm::QftDag => GateTerm::Qft,
            GateTerm::Matrix { rows } => {
                let n = rows.len();
                GateTerm::Matrix {
                    rows: (0..n)
                        .map(|i| {
                            (0..rows.get(i).map_or(0, Vec::len))
                                .map(|j| {
                                    let [re, im] = rows[j][i];
                                    [re, -im]
                                })
                                .collect()
                        })
                        .collect(),
                }
            }
            GateTerm::Compose { terms } => GateTerm::Compose {
                terms: terms.iter().rev().map(GateTerm::adjoint).collect(),
            },
        }
    }

    /// Evaluates the term as an `n x n` unitary.
    pub fn evaluate(&self, n: usize) -> Result<UnitaryMatrix, LinalgError> {
        match self {
            GateTerm::Identity => UnitaryMatrix::identity(n),
            GateTerm::Transposition { i, j } => UnitaryMatrix::transposition(n, *i, *j),
            GateTerm::Qft => UnitaryMatrix::qft(n),
            GateTerm::QftDag => Ok(UnitaryMatrix::qft(n)?.adjoint()),
            GateTerm::Matrix { rows } => {
                if rows.len() != n {
                    return Err(LinalgError::DimensionMismatch {
                        expected: n,
                        found: rows.len(),
                    });
                }
                let rows = rows
                    .iter()
                    .map(|r| r.iter().map(|&[re, im]| C64::new(re, im)).collect())
                    .collect();
                UnitaryMatrix::new(ComplexMatrix::from_rows(rows)?)
            }
            GateTerm::Compose { terms } => {
                let mut acc = UnitaryMatrix::identity(n)?;
                for t in terms {
                    acc = acc.compose(&t.evaluate(n)?)?;
                }
                Ok(acc)
            }
        }
    }

    /// Display name used on automaton edges: `I`, `T_{0,6}`, `F7`, `F7†`, `M`,
    /// and space-joined products such as `T_{0,6} F7†`.
    pub fn label(&self, n: usize) -> String {
        match self {
            GateTerm::Identity => "I".to_string(),
            GateTerm::Transposition { i, j } => format!("T_{{{},{}}}", i.min(j), i.max(j)),
            GateTerm::Qft => format!("F{n}"),
            GateTerm::QftDag => format!("F{n}†"),
            GateTerm::Matrix { .. } => "M".to_string(),
            GateTerm::Compose { terms } if terms.is_empty() => "I".to_string(),
            GateTerm::Compose { terms } => terms
                .iter()
                .map(|t| t.label(n))
                .collect::<Vec<_>>()
                .join(" "),
        }
    }
}

/// A move: a unitary together with the term that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct Move {
    term: GateTerm,
    matrix: UnitaryMatrix,
}

impl Move {
    pub fn new(term: GateTerm, n: usize) -> Result<Self, LinalgError> {
        let matrix = term.evaluate(n)?;
        Ok(Self { term, matrix })
    }

    /// Wraps an already-built unitary as a `MATRIX` term.
    pub fn from_matrix(matrix: UnitaryMatrix) -> Self {
        Self {
            term: GateTerm::matrix(&matrix),
            matrix,
        }
    }

    /// Trusts the caller that `term` evaluates to `matrix`.
    pub(crate) fn from_parts(term: GateTerm, matrix: UnitaryMatrix) -> Self {
        Self { term, matrix }
    }

    pub fn identity(n: usize) -> Result<Self, LinalgError> {
        Self::new(GateTerm::Identity, n)
    }

    pub fn transposition(n: usize, i: usize, j: usize) -> Result<Self, LinalgError> {
        Self::new(GateTerm::transposition(i, j), n)
    }

    pub fn qft(n: usize) -> Result<Self, LinalgError> {
        Self::new(GateTerm::Qft, n)
    }

    pub fn qft_dag(n: usize) -> Result<Self, LinalgError> {
        Self::new(GateTerm::QftDag, n)
    }

    pub fn term(&self) -> &GateTerm {
        &self.term
    }

    pub fn matrix(&self) -> &UnitaryMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn label(&self) -> String {
        self.term.label(self.dim())
    }

    /// `self * other`: `other` acts first.
    pub fn compose(&self, other: &Move) -> Result<Move, LinalgError> {
        Ok(Move {
            term: self.term.then_after(&other.term),
            matrix: self.matrix.compose(&other.matrix)?,
        })
    }

    pub fn adjoint(&self) -> Move {
        Move {
            term: self.term.adjoint(),
            matrix: self.matrix.adjoint(),
        }
    }
}

/// Writes a permutation `|k> -> |perm[k]>` as a product of transpositions.
pub(crate) fn permutation_term(perm: &[usize]) -> GateTerm {
    // Left-multiplying by T_{i, cur(i)} fixes i; the recorded factors multiply
    // back to the permutation in recording order.
    let mut cur = perm.to_vec();
    let mut factors = Vec::new();
    for i in 0..cur.len() {
        let c = cur[i];
        if c != i {
            factors.push(GateTerm::transposition(i, c));
            for x in cur.iter_mut() {
                if *x == i {
                    *x = c;
                } else if *x == c {
                    *x = i;
                }
            }
        }
    }
    match factors.len() {
        0 => GateTerm::Identity,
        1 => factors.pop().unwrap_or(GateTerm::Identity),
        _ => GateTerm::Compose { terms: factors },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_shape() {
        let t = GateTerm::Compose {
            terms: vec![GateTerm::transposition(0, 6), GateTerm::QftDag],
        };
        let s = serde_json::to_string(&t).unwrap();
        assert_eq!(
            s,
            r#"{"gate":"COMPOSE","terms":[{"gate":"T","i":0,"j":6},{"gate":"QFT_DAG"}]}"#
        );
        let back: GateTerm = serde_json::from_str(&s).unwrap();
        assert_eq!(back, t);
        let id: GateTerm = serde_json::from_str(r#"{"gate":"I"}"#).unwrap();
        assert_eq!(id, GateTerm::Identity);
    }

    #[test]
    fn labels() {
        let m = Move::transposition(7, 0, 6)
            .unwrap()
            .compose(&Move::qft_dag(7).unwrap())
            .unwrap();
        assert_eq!(m.label(), "T_{0,6} F7†");
        assert_eq!(GateTerm::transposition(6, 0).label(7), "T_{0,6}");
        assert_eq!(GateTerm::Qft.label(7), "F7");
    }

    #[test]
    fn compose_term_evaluates_to_product() {
        let a = Move::qft(5).unwrap();
        let b = Move::transposition(5, 1, 3).unwrap();
        let ab = a.compose(&b).unwrap();
        let re = ab.term().evaluate(5).unwrap();
        assert!(re.approx_eq(ab.matrix(), 1e-12));
        let adj = ab.adjoint();
        assert!(adj
            .term()
            .evaluate(5)
            .unwrap()
            .approx_eq(adj.matrix(), 1e-12));
        assert!(adj.compose(&ab).unwrap().matrix().is_identity());
    }

    #[test]
    fn matrix_term_adjoint() {
        let u = UnitaryMatrix::qft(3).unwrap();
        let t = GateTerm::matrix(&u);
        let adj = t.adjoint().evaluate(3).unwrap();
        assert!(adj.approx_eq(&u.adjoint(), 1e-15));
    }

    #[test]
    fn permutation_terms_rebuild_permutations() {
        let perms: [&[usize]; 4] = [&[0, 1, 2, 3], &[1, 0, 2, 3], &[2, 0, 3, 1], &[3, 2, 1, 0]];
        for p in perms {
            let t = permutation_term(p);
            let u = t.evaluate(p.len()).unwrap();
            assert_eq!(u.permutation(), Some(p), "{t:?}");
        }
    }
}
