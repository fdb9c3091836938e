//! Dense complex linear algebra for the small, fixed dimensions games are
//! played in: state vectors, certified unitaries, kernels and gate
//! constructors.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

pub type C64 = Complex64;

/// Max-entry deviation of `U†U` from `I` accepted at construction.
pub const UNITARY_TOL: f64 = 1e-9;
/// Accepted deviation of a state's Euclidean norm from 1.
pub const NORM_TOL: f64 = 1e-9;
/// Two states are phase-equal when `|<u|v>| >= 1 - PHASE_TOL`.
pub const PHASE_TOL: f64 = 1e-9;
/// Pivot threshold for kernel elimination, and the residual bound on kernel vectors.
pub const KERNEL_TOL: f64 = 1e-8;
/// Entries this close to a permutation pattern are snapped to it exactly.
const PERM_SNAP_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("dimension must be positive")]
    ZeroDimension,
    #[error("index {index} out of range for dimension {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("transposition needs two distinct indices, got {0} twice")]
    DegenerateTransposition(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("ragged matrix: row {row} has {found} entries, expected {expected}")]
    Ragged {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("matrix is not unitary: max |U†U - I| = {deviation:e}")]
    NotUnitary { deviation: f64 },
    #[error("state norm is {norm}, expected 1")]
    NotNormalized { norm: f64 },
}

pub type Result<T> = std::result::Result<T, LinalgError>;

/// A unit vector in `C^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amps: Vec<C64>,
}

impl StateVector {
    /// Wraps amplitudes that are already unit-norm.
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(LinalgError::ZeroDimension);
        }
        let norm = l2_norm(&amps);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(LinalgError::NotNormalized { norm });
        }
        Ok(Self { amps })
    }

    /// Scales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(amps: Vec<C64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(LinalgError::ZeroDimension);
        }
        let norm = l2_norm(&amps);
        if norm < KERNEL_TOL {
            return Err(LinalgError::NotNormalized { norm });
        }
        Ok(Self {
            amps: amps.into_iter().map(|a| a / norm).collect(),
        })
    }

    /// The computational basis ket `|k>` of `C^n`.
    pub fn basis(n: usize, k: usize) -> Result<Self> {
        if n == 0 {
            return Err(LinalgError::ZeroDimension);
        }
        if k >= n {
            return Err(LinalgError::IndexOutOfRange { index: k, n });
        }
        let mut amps = vec![C64::new(0.0, 0.0); n];
        amps[k] = C64::new(1.0, 0.0);
        Ok(Self { amps })
    }

    /// The equal superposition `(1/sqrt n) sum |k>`.
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(LinalgError::ZeroDimension);
        }
        let a = C64::new(1.0 / (n as f64).sqrt(), 0.0);
        Ok(Self { amps: vec![a; n] })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        l2_norm(&self.amps)
    }

    /// `<self|other>`, conjugate-linear in `self`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        check_dim(self.dim(), other.dim())?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Born-rule probabilities in the computational basis.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Multiplies by `e^{i theta}`.
    pub fn with_phase(&self, theta: f64) -> StateVector {
        let p = C64::from_polar(1.0, theta);
        StateVector {
            amps: self.amps.iter().map(|a| a * p).collect(),
        }
    }

    /// The index `k` if this state is `|k>` up to global phase.
    pub fn as_basis_index(&self) -> Option<usize> {
        self.amps
            .iter()
            .position(|a| a.norm_sqr() >= 1.0 - PHASE_TOL)
    }
}

impl fmt::Display for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.amps.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{:.6}{:+.6}i", a.re, a.im)?;
        }
        write!(f, ")")
    }
}

/// True iff `|<u|v>| >= 1 - PHASE_TOL`.
pub fn states_equal_up_to_phase(u: &StateVector, v: &StateVector) -> Result<bool> {
    Ok(u.inner(v)?.norm() >= 1.0 - PHASE_TOL)
}

/// Squared length of the projection of `v` onto the span of an orthonormal family.
pub fn projection_weight(basis: &[StateVector], v: &StateVector) -> Result<f64> {
    let mut w = 0.0;
    for b in basis {
        w += b.inner(v)?.norm_sqr();
    }
    Ok(w)
}

/// True when `v` lies (to within `PHASE_TOL` of its weight) in the span of `basis`.
pub fn in_span(basis: &[StateVector], v: &StateVector) -> Result<bool> {
    Ok(projection_weight(basis, v)? >= 1.0 - PHASE_TOL)
}

/// A general dense row-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<C64>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let nrows = rows.len();
        let mut data = Vec::with_capacity(nrows * cols);
        for (r, row) in rows.into_iter().enumerate() {
            if row.len() != cols {
                return Err(LinalgError::Ragged {
                    row: r,
                    expected: cols,
                    found: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(Self {
            rows: nrows,
            cols,
            data,
        })
    }

    /// Builds from a generator function over `(row, col)`.
    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        check_dim(self.cols, other.rows)?;
        let mut out = ComplexMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let orow = &other.data[k * other.cols..(k + 1) * other.cols];
                let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (o, b) in out_row.iter_mut().zip(orow) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[C64]) -> Result<Vec<C64>> {
        check_dim(self.cols, v.len())?;
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn adjoint(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    /// `self - I`; requires a square matrix.
    pub fn minus_identity(&self) -> Result<ComplexMatrix> {
        if self.rows != self.cols {
            return Err(LinalgError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let mut m = self.clone();
        for i in 0..self.rows {
            m.data[i * self.cols + i] -= C64::new(1.0, 0.0);
        }
        Ok(m)
    }

    /// Stacks blocks vertically; all blocks need the same column count.
    pub fn vstack(cols: usize, blocks: &[ComplexMatrix]) -> Result<ComplexMatrix> {
        let mut data = Vec::new();
        let mut rows = 0;
        for b in blocks {
            check_dim(cols, b.cols)?;
            data.extend_from_slice(&b.data);
            rows += b.rows;
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    /// Largest entry modulus of `self - other`.
    pub fn max_deviation(&self, other: &ComplexMatrix) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Column-to-row map if this is a permutation matrix within `tol`.
    #[allow(clippy::needless_range_loop)]
    fn permutation_within(&self, tol: f64) -> Option<Vec<usize>> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut perm = vec![usize::MAX; n];
        let mut row_used = vec![false; n];
        for j in 0..n {
            for i in 0..n {
                let a = self.get(i, j);
                if (a - C64::new(1.0, 0.0)).norm() <= tol {
                    if perm[j] != usize::MAX || row_used[i] {
                        return None;
                    }
                    perm[j] = i;
                    row_used[i] = true;
                } else if a.norm() > tol {
                    return None;
                }
            }
            if perm[j] == usize::MAX {
                return None;
            }
        }
        Some(perm)
    }
}

/// An `n x n` matrix certified unitary at construction.
///
/// Permutation matrices additionally carry the exact permutation
/// (`perm[k]` is the row holding the 1 of column `k`, i.e. `|k> -> |perm[k]>`),
/// so products of permutations never accumulate rounding.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryMatrix {
    matrix: ComplexMatrix,
    perm: Option<Vec<usize>>,
}

impl UnitaryMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if matrix.rows != matrix.cols {
            return Err(LinalgError::NotSquare {
                rows: matrix.rows,
                cols: matrix.cols,
            });
        }
        if matrix.rows == 0 {
            return Err(LinalgError::ZeroDimension);
        }
        let deviation = unitarity_deviation(&matrix);
        if deviation > UNITARY_TOL {
            return Err(LinalgError::NotUnitary { deviation });
        }
        Ok(Self::snapped(matrix))
    }

    pub fn from_rows(rows: Vec<Vec<C64>>) -> Result<Self> {
        Self::new(ComplexMatrix::from_rows(rows)?)
    }

    /// Exact permutation matrix sending `|k>` to `|perm[k]>`.
    pub fn from_permutation(perm: Vec<usize>) -> Result<Self> {
        let n = perm.len();
        if n == 0 {
            return Err(LinalgError::ZeroDimension);
        }
        let mut seen = vec![false; n];
        for &p in &perm {
            if p >= n {
                return Err(LinalgError::IndexOutOfRange { index: p, n });
            }
            if seen[p] {
                return Err(LinalgError::NotUnitary { deviation: 1.0 });
            }
            seen[p] = true;
        }
        Ok(Self::permutation_unchecked(perm))
    }

    fn permutation_unchecked(perm: Vec<usize>) -> Self {
        let n = perm.len();
        let mut m = ComplexMatrix::zeros(n, n);
        for (col, &row) in perm.iter().enumerate() {
            m.data[row * n + col] = C64::new(1.0, 0.0);
        }
        Self {
            matrix: m,
            perm: Some(perm),
        }
    }

    fn snapped(matrix: ComplexMatrix) -> Self {
        match matrix.permutation_within(PERM_SNAP_TOL) {
            Some(p) => Self::permutation_unchecked(p),
            None => Self { matrix, perm: None },
        }
    }

    pub fn identity(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(LinalgError::ZeroDimension);
        }
        Ok(Self::permutation_unchecked((0..n).collect()))
    }

    /// `T_{i,j}`: swaps `|i>` and `|j>`, fixes every other basis ket.
    pub fn transposition(n: usize, i: usize, j: usize) -> Result<Self> {
        if n == 0 {
            return Err(LinalgError::ZeroDimension);
        }
        for idx in [i, j] {
            if idx >= n {
                return Err(LinalgError::IndexOutOfRange { index: idx, n });
            }
        }
        if i == j {
            return Err(LinalgError::DegenerateTransposition(i));
        }
        let mut perm: Vec<usize> = (0..n).collect();
        perm.swap(i, j);
        Ok(Self::permutation_unchecked(perm))
    }

    /// The discrete Fourier matrix `F_n`, entry `(j,k) = w^{jk}/sqrt n`, `w = e^{2 pi i/n}`.
    pub fn qft(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(LinalgError::ZeroDimension);
        }
        let scale = 1.0 / (n as f64).sqrt();
        // Reduce jk mod n before exponentiating so large products keep full precision.
        let m = ComplexMatrix::from_fn(n, n, |j, k| {
            let e = (j * k) % n;
            C64::from_polar(scale, 2.0 * PI * e as f64 / n as f64)
        });
        Self::new(m)
    }

    /// Haar-distributed unitary via Gram-Schmidt on a complex Gaussian matrix.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        if n == 0 {
            return Err(LinalgError::ZeroDimension);
        }
        let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
        while cols.len() < n {
            let mut v: Vec<C64> = (0..n)
                .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                .collect();
            if orthonormalize_against(&mut v, &cols) {
                cols.push(v);
            }
        }
        Self::new(ComplexMatrix::from_fn(n, n, |i, j| cols[j][i]))
    }

    /// Any unitary whose column `col` is `target`; the remaining columns
    /// complete an orthonormal basis from the standard basis in index order.
    pub fn with_column(target: &StateVector, col: usize) -> Result<Self> {
        let n = target.dim();
        if col >= n {
            return Err(LinalgError::IndexOutOfRange { index: col, n });
        }
        let mut cols: Vec<Vec<C64>> = vec![target.amps.clone()];
        for k in 0..n {
            if cols.len() == n {
                break;
            }
            let mut e = vec![C64::new(0.0, 0.0); n];
            e[k] = C64::new(1.0, 0.0);
            if orthonormalize_against(&mut e, &cols) {
                cols.push(e);
            }
        }
        if cols.len() != n {
            return Err(LinalgError::NotUnitary { deviation: 1.0 });
        }
        // cols[0] is the target; the rest fill the other slots in order.
        let mut order: Vec<usize> = (1..n).collect();
        order.insert(col, 0);
        Self::new(ComplexMatrix::from_fn(n, n, |i, j| cols[order[j]][i]))
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.matrix.get(i, j)
    }

    /// The exact permutation, when this matrix is one.
    pub fn permutation(&self) -> Option<&[usize]> {
        self.perm.as_deref()
    }

    /// Permutation pattern within `tol`, for matrices assembled from floats.
    pub fn permutation_within(&self, tol: f64) -> Option<Vec<usize>> {
        match &self.perm {
            Some(p) => Some(p.clone()),
            None => self.matrix.permutation_within(tol),
        }
    }

    /// Matrix product `self * other` (apply `other` first).
    pub fn compose(&self, other: &UnitaryMatrix) -> Result<UnitaryMatrix> {
        check_dim(self.dim(), other.dim())?;
        if let (Some(p), Some(q)) = (&self.perm, &other.perm) {
            return Ok(Self::permutation_unchecked(
                q.iter().map(|&k| p[k]).collect(),
            ));
        }
        Self::new(self.matrix.mul(&other.matrix)?)
    }

    /// Conjugate transpose, which is also the group inverse.
    pub fn adjoint(&self) -> UnitaryMatrix {
        match &self.perm {
            Some(p) => {
                let mut inv = vec![0; p.len()];
                for (k, &pk) in p.iter().enumerate() {
                    inv[pk] = k;
                }
                Self::permutation_unchecked(inv)
            }
            None => Self {
                matrix: self.matrix.adjoint(),
                perm: None,
            },
        }
    }

    /// `U v`.
    pub fn apply(&self, v: &StateVector) -> Result<StateVector> {
        check_dim(self.dim(), v.dim())?;
        if let Some(p) = &self.perm {
            let mut amps = vec![C64::new(0.0, 0.0); v.dim()];
            for (k, &pk) in p.iter().enumerate() {
                amps[pk] = v.amps[k];
            }
            return Ok(StateVector { amps });
        }
        Ok(StateVector {
            amps: self.matrix.mul_vec(&v.amps)?,
        })
    }

    pub fn max_deviation(&self, other: &UnitaryMatrix) -> f64 {
        self.matrix.max_deviation(&other.matrix)
    }

    /// Entrywise equality within `tol` (no global-phase quotient).
    pub fn approx_eq(&self, other: &UnitaryMatrix, tol: f64) -> bool {
        if let (Some(p), Some(q)) = (&self.perm, &other.perm) {
            return p == q;
        }
        self.max_deviation(other) <= tol
    }

    pub fn is_identity(&self) -> bool {
        match &self.perm {
            Some(p) => p.iter().enumerate().all(|(k, &pk)| k == pk),
            None => false,
        }
    }

    pub fn unitarity_deviation(&self) -> f64 {
        unitarity_deviation(&self.matrix)
    }
}

/// Orthonormal basis of `{x : M x = 0}`.
///
/// Gauss-Jordan elimination with full pivoting; pivots below `KERNEL_TOL`
/// count as zero. Each returned vector has its first significant amplitude
/// real and positive.
pub fn null_space(m: &ComplexMatrix) -> Vec<StateVector> {
    let (rows, cols) = (m.rows, m.cols);
    let mut a = m.data.clone();
    let mut colperm: Vec<usize> = (0..cols).collect();
    let mut rank = 0;

    while rank < rows.min(cols) {
        let k = rank;
        let (mut pi, mut pj, mut best) = (k, k, 0.0);
        for i in k..rows {
            for j in k..cols {
                let mag = a[i * cols + j].norm();
                if mag > best {
                    (pi, pj, best) = (i, j, mag);
                }
            }
        }
        if best <= KERNEL_TOL {
            break;
        }
        if pi != k {
            for j in 0..cols {
                a.swap(k * cols + j, pi * cols + j);
            }
        }
        if pj != k {
            for i in 0..rows {
                a.swap(i * cols + k, i * cols + pj);
            }
            colperm.swap(k, pj);
        }
        let pivot = a[k * cols + k];
        for j in k..cols {
            a[k * cols + j] /= pivot;
        }
        for i in 0..rows {
            if i == k {
                continue;
            }
            let f = a[i * cols + k];
            if f == C64::new(0.0, 0.0) {
                continue;
            }
            for j in k..cols {
                let pivot_row = a[k * cols + j];
                a[i * cols + j] -= f * pivot_row;
            }
        }
        rank += 1;
    }

    let mut basis: Vec<Vec<C64>> = Vec::new();
    for free in rank..cols {
        let mut x = vec![C64::new(0.0, 0.0); cols];
        x[colperm[free]] = C64::new(1.0, 0.0);
        for i in 0..rank {
            x[colperm[i]] = -a[i * cols + free];
        }
        if orthonormalize_against(&mut x, &basis) {
            basis.push(x);
        }
    }

    basis
        .into_iter()
        .map(|mut v| {
            fix_phase(&mut v);
            StateVector { amps: v }
        })
        .collect()
}

/// Rotates the global phase so the first amplitude above `1e-7` is real positive.
pub(crate) fn fix_phase(v: &mut [C64]) {
    if let Some(a) = v.iter().find(|a| a.norm() > 1e-7).copied() {
        let rot = a.conj() / a.norm();
        for x in v.iter_mut() {
            *x *= rot;
        }
    }
}

/// Two passes of modified Gram-Schmidt against an orthonormal family, then
/// normalization. Returns false if `v` is (numerically) in their span.
fn orthonormalize_against(v: &mut [C64], family: &[Vec<C64>]) -> bool {
    let start = l2_norm(v);
    for _ in 0..2 {
        for b in family {
            let c: C64 = b.iter().zip(v.iter()).map(|(x, y)| x.conj() * y).sum();
            for (x, y) in v.iter_mut().zip(b) {
                *x -= c * y;
            }
        }
    }
    let norm = l2_norm(v);
    if norm <= 1e-6 * start.max(1.0) {
        return false;
    }
    for x in v.iter_mut() {
        *x /= norm;
    }
    true
}

fn unitarity_deviation(m: &ComplexMatrix) -> f64 {
    let n = m.rows;
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let mut s = C64::new(0.0, 0.0);
            for k in 0..n {
                s += m.get(k, i).conj() * m.get(k, j);
            }
            if i == j {
                s -= C64::new(1.0, 0.0);
            }
            worst = worst.max(s.norm());
        }
    }
    worst
}

fn l2_norm(v: &[C64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(LinalgError::DimensionMismatch { expected, found });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn close_vec(a: &StateVector, b: &StateVector, tol: f64) -> bool {
        a.dim() == b.dim()
            && a.amplitudes()
                .iter()
                .zip(b.amplitudes())
                .all(|(x, y)| (x - y).norm() <= tol)
    }

    #[test]
    fn basis_states() {
        let v = StateVector::basis(7, 0).unwrap();
        assert_eq!(v.amplitudes()[0], c(1.0));
        assert!(v.amplitudes()[1..].iter().all(|a| *a == c(0.0)));
        let v = StateVector::basis(2, 1).unwrap();
        assert_eq!(v.amplitudes(), &[c(0.0), c(1.0)]);
        let v = StateVector::basis(7, 6).unwrap();
        assert_eq!(v.as_basis_index(), Some(6));
        assert_eq!(
            StateVector::basis(3, 3),
            Err(LinalgError::IndexOutOfRange { index: 3, n: 3 })
        );
    }

    #[test]
    fn transposition_matches_swapped_identity() {
        let t = UnitaryMatrix::transposition(7, 3, 5).unwrap();
        // Rows of the 7x7 matrix for T_{3,5}: identity with rows 3 and 5 exchanged.
        let expected = [
            [1, 0, 0, 0, 0, 0, 0],
            [0, 1, 0, 0, 0, 0, 0],
            [0, 0, 1, 0, 0, 0, 0],
            [0, 0, 0, 0, 0, 1, 0],
            [0, 0, 0, 0, 1, 0, 0],
            [0, 0, 0, 1, 0, 0, 0],
            [0, 0, 0, 0, 0, 0, 1],
        ];
        for (i, row) in expected.iter().enumerate() {
            for (j, &e) in row.iter().enumerate() {
                assert_eq!(t.get(i, j), c(e as f64));
            }
        }
        let b3 = StateVector::basis(7, 3).unwrap();
        let b5 = StateVector::basis(7, 5).unwrap();
        assert_eq!(t.apply(&b3).unwrap(), b5);
        assert_eq!(t.apply(&b5).unwrap(), b3);

        let t2 = UnitaryMatrix::transposition(2, 0, 1).unwrap();
        let b0 = StateVector::basis(2, 0).unwrap();
        assert_eq!(t2.apply(&t2.apply(&b0).unwrap()).unwrap(), b0);

        assert_eq!(
            UnitaryMatrix::transposition(4, 2, 2),
            Err(LinalgError::DegenerateTransposition(2))
        );
        assert!(matches!(
            UnitaryMatrix::transposition(4, 0, 4),
            Err(LinalgError::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn transposition_fixes_other_kets() {
        for n in 2..6 {
            for i in 0..n {
                for j in (i + 1)..n {
                    let t = UnitaryMatrix::transposition(n, i, j).unwrap();
                    for k in 0..n {
                        let img = t.apply(&StateVector::basis(n, k).unwrap()).unwrap();
                        let want = if k == i {
                            j
                        } else if k == j {
                            i
                        } else {
                            k
                        };
                        assert_eq!(img, StateVector::basis(n, want).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn qft_small_cases() {
        let f7 = UnitaryMatrix::qft(7).unwrap();
        let psi = f7.apply(&StateVector::basis(7, 0).unwrap()).unwrap();
        assert!(close_vec(&psi, &StateVector::uniform(7).unwrap(), 1e-12));

        let f1 = UnitaryMatrix::qft(1).unwrap();
        assert!(f1.is_identity());

        let f2 = UnitaryMatrix::qft(2).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let want = [[h, h], [h, -h]];
        for (i, row) in want.iter().enumerate() {
            for (j, &w) in row.iter().enumerate() {
                assert!((f2.get(i, j) - c(w)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn qft_entries_follow_root_of_unity_formula() {
        for n in 1..=16 {
            let f = UnitaryMatrix::qft(n).unwrap();
            for j in 0..n {
                for k in 0..n {
                    let theta = 2.0 * PI * (j * k) as f64 / n as f64;
                    let want = C64::from_polar(1.0 / (n as f64).sqrt(), theta);
                    assert!((f.get(j, k) - want).norm() <= 1e-12, "n={n} ({j},{k})");
                }
            }
        }
    }

    #[test]
    fn apply_and_compose() {
        let id = UnitaryMatrix::identity(7).unwrap();
        let v = StateVector::uniform(7).unwrap();
        assert_eq!(id.apply(&v).unwrap(), v);

        let f7 = UnitaryMatrix::qft(7).unwrap();
        let b0 = StateVector::basis(7, 0).unwrap();
        let back = f7.adjoint().apply(&f7.apply(&b0).unwrap()).unwrap();
        assert!(close_vec(&back, &b0, 1e-12));

        let t06 = UnitaryMatrix::transposition(7, 0, 6).unwrap();
        let op = t06.compose(&f7.adjoint()).unwrap();
        let out = op.apply(&StateVector::uniform(7).unwrap()).unwrap();
        assert!(close_vec(&out, &StateVector::basis(7, 6).unwrap(), 1e-12));

        assert_eq!(id.compose(&f7).unwrap(), f7);
        let t35 = UnitaryMatrix::transposition(7, 3, 5).unwrap();
        assert!(t35.compose(&t35).unwrap().is_identity());

        let small = UnitaryMatrix::identity(3).unwrap();
        assert!(matches!(
            small.compose(&f7),
            Err(LinalgError::DimensionMismatch { .. })
        ));
        assert!(matches!(
            small.apply(&b0),
            Err(LinalgError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn adjoints() {
        let id = UnitaryMatrix::identity(4).unwrap();
        assert_eq!(id.adjoint(), id);
        let f7 = UnitaryMatrix::qft(7).unwrap();
        assert!(f7.adjoint().compose(&f7).unwrap().is_identity());
        let t = UnitaryMatrix::transposition(5, 1, 4).unwrap();
        assert_eq!(t.adjoint(), t);
    }

    #[test]
    fn float_products_snap_to_permutations() {
        let f = UnitaryMatrix::qft(5).unwrap();
        let f2 = f.compose(&f).unwrap();
        // F^2 sends |k> to |-k mod n>.
        assert_eq!(f2.permutation(), Some(&[0, 4, 3, 2, 1][..]));
    }

    #[test]
    fn rejects_non_unitary() {
        let m = ComplexMatrix::from_rows(vec![vec![c(1.0), c(1.0)], vec![c(0.0), c(1.0)]]).unwrap();
        assert!(matches!(
            UnitaryMatrix::new(m),
            Err(LinalgError::NotUnitary { .. })
        ));
    }

    #[test]
    fn null_space_trivial_and_full() {
        assert!(null_space(&ComplexMatrix::identity(4)).is_empty());
        let ker = null_space(&ComplexMatrix::zeros(3, 3));
        assert_eq!(ker.len(), 3);
        for (i, u) in ker.iter().enumerate() {
            for (j, v) in ker.iter().enumerate() {
                let ip = u.inner(v).unwrap();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((ip - c(want)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn null_space_of_adjacent_transpositions_is_uniform_ray() {
        let n = 7;
        let blocks: Vec<ComplexMatrix> = (0..n - 1)
            .map(|i| {
                UnitaryMatrix::transposition(n, i, i + 1)
                    .unwrap()
                    .matrix()
                    .minus_identity()
                    .unwrap()
            })
            .collect();
        let stacked = ComplexMatrix::vstack(n, &blocks).unwrap();
        let ker = null_space(&stacked);
        assert_eq!(ker.len(), 1);
        assert!(states_equal_up_to_phase(&ker[0], &StateVector::uniform(n).unwrap()).unwrap());
        let r = stacked.mul_vec(ker[0].amplitudes()).unwrap();
        assert!(r.iter().all(|x| x.norm() <= KERNEL_TOL));
    }

    #[test]
    fn phase_equality() {
        let v = StateVector::uniform(7).unwrap();
        assert!(states_equal_up_to_phase(&v, &v).unwrap());
        assert!(states_equal_up_to_phase(&v, &v.with_phase(PI)).unwrap());
        let b0 = StateVector::basis(7, 0).unwrap();
        let overlap = b0.inner(&v).unwrap().norm();
        assert!((overlap - 1.0 / 7f64.sqrt()).abs() < 1e-15);
        assert!(!states_equal_up_to_phase(&b0, &v).unwrap());
    }

    #[test]
    fn with_column_places_target() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..6 {
            let u = UnitaryMatrix::random(n, &mut rng).unwrap();
            let target = u.apply(&StateVector::basis(n, 0).unwrap()).unwrap();
            for col in 0..n {
                let w = UnitaryMatrix::with_column(&target, col).unwrap();
                let img = w.apply(&StateVector::basis(n, col).unwrap()).unwrap();
                assert!(close_vec(&img, &target, 1e-12));
            }
        }
        let b2 = StateVector::basis(3, 2).unwrap();
        let w = UnitaryMatrix::with_column(&b2, 0).unwrap();
        assert_eq!(w.apply(&StateVector::basis(3, 0).unwrap()).unwrap(), b2);
    }
}
