//! Independent reference computations and randomized property checks shared
//! by the integration targets.
#![allow(dead_code)]

use std::collections::HashSet;
use std::f64::consts::PI;

use num_complex::Complex64 as C;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use qgame::automaton::{explore, node_key, to_dot, NamedMove};
use qgame::game::{measure, play};
use qgame::groups::{close, contains};
use qgame::{
    ActionGroup, GameSpec, Membership, Move, Player, Schedule, StateVector, Strategy, UnitaryMatrix,
};

pub type Mat = Vec<Vec<C>>;

pub fn data(name: &str) -> String {
    format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

pub fn golden(name: &str) -> String {
    format!("{}/tests/golden/{name}", env!("CARGO_MANIFEST_DIR"))
}

// Plain dense arithmetic, written without the library.

pub fn o_identity(n: usize) -> Mat {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        C::new(1.0, 0.0)
                    } else {
                        C::new(0.0, 0.0)
                    }
                })
                .collect()
        })
        .collect()
}

pub fn o_fourier(n: usize) -> Mat {
    let s = 1.0 / (n as f64).sqrt();
    (0..n)
        .map(|j| {
            (0..n)
                .map(|k| C::from_polar(s, 2.0 * PI * (j * k) as f64 / n as f64))
                .collect()
        })
        .collect()
}

pub fn o_swap(n: usize, a: usize, b: usize) -> Mat {
    let mut m = o_identity(n);
    m.swap(a, b);
    m
}

pub fn o_dagger(m: &Mat) -> Mat {
    let n = m.len();
    (0..n)
        .map(|i| (0..n).map(|j| m[j][i].conj()).collect())
        .collect()
}

pub fn o_mul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

pub fn o_apply(m: &Mat, v: &[C]) -> Vec<C> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

pub fn o_basis(n: usize, k: usize) -> Vec<C> {
    (0..n)
        .map(|i| {
            if i == k {
                C::new(1.0, 0.0)
            } else {
                C::new(0.0, 0.0)
            }
        })
        .collect()
}

/// Applies `moves` left to right starting from `|k>`.
pub fn o_run(n: usize, k: usize, moves: &[Mat]) -> Vec<C> {
    moves.iter().fold(o_basis(n, k), |v, m| o_apply(m, &v))
}

pub fn o_close_to(a: &Mat, b: &Mat, tol: f64) -> bool {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .all(|(x, y)| (x - y).norm() <= tol)
}

fn o_key(m: &Mat) -> Vec<(i64, i64)> {
    m.iter()
        .flatten()
        .map(|z| ((z.re * 1e6).round() as i64, (z.im * 1e6).round() as i64))
        .collect()
}

/// Breadth-first closure of the generators under multiplication.
pub fn o_closure(gens: &[Mat], limit: usize) -> Vec<Mat> {
    let n = gens[0].len();
    let mut elems = vec![o_identity(n)];
    let mut seen: HashSet<Vec<(i64, i64)>> = elems.iter().map(o_key).collect();
    let mut i = 0;
    while i < elems.len() && elems.len() <= limit {
        let x = elems[i].clone();
        for g in gens {
            let y = o_mul(g, &x);
            if seen.insert(o_key(&y)) {
                elems.push(y);
            }
        }
        i += 1;
    }
    elems
}

pub fn to_mat(u: &UnitaryMatrix) -> Mat {
    let n = u.dim();
    (0..n)
        .map(|i| (0..n).map(|j| u.get(i, j)).collect())
        .collect()
}

// Random inputs.

pub fn random_state(n: usize, rng: &mut ChaCha8Rng) -> StateVector {
    let amps: Vec<C> = (0..n)
        .map(|_| C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    StateVector::normalized(amps).unwrap_or_else(|_| StateVector::basis(n, 0).unwrap())
}

pub fn random_permutation(n: usize, rng: &mut ChaCha8Rng) -> UnitaryMatrix {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    UnitaryMatrix::from_permutation(p).unwrap()
}

// One randomized case of each property; `Err` describes the violation.

pub fn prop_unitarity(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let n = rng.random_range(1..=6);
    let u = UnitaryMatrix::random(n, rng).map_err(|e| e.to_string())?;
    let w = UnitaryMatrix::random(n, rng).map_err(|e| e.to_string())?;
    let uw = u.compose(&w).map_err(|e| e.to_string())?;
    for m in [&u, &w, &uw, &u.adjoint()] {
        let d = m.unitarity_deviation();
        if d > 1e-9 {
            return Err(format!("unitarity deviation {d:e} at n={n}"));
        }
    }
    let v = random_state(n, rng);
    let out = uw.apply(&v).map_err(|e| e.to_string())?;
    if (out.norm() - 1.0).abs() > 1e-9 {
        return Err(format!("norm {} after applying a unitary", out.norm()));
    }
    let back = uw.adjoint().apply(&out).map_err(|e| e.to_string())?;
    let err = back.inner(&v).map_err(|e| e.to_string())?;
    if (err - C::new(1.0, 0.0)).norm() > 1e-9 {
        return Err("U† U v != v".into());
    }
    Ok(())
}

pub fn prop_distribution(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let n = rng.random_range(2..=5);
    let m = rng.random_range(1..=3);
    let schedule = if rng.random_bool(0.5) {
        Schedule::Canonical(m)
    } else {
        Schedule::Noncanonical(m)
    };
    let q0 = rng.random_range(0..n);
    let qa = rng.random_range(0..n);
    let qb = (qa + rng.random_range(1..n)) % n;
    let spec = GameSpec::new(
        n,
        q0,
        qa,
        qb,
        schedule,
        ActionGroup::unitary(n),
        ActionGroup::unitary(n),
    )
    .map_err(|e| e.to_string())?;
    let mut strategy = |p: Player| -> Result<Strategy, String> {
        let moves = (0..schedule.rounds_for(p))
            .map(|_| UnitaryMatrix::random(n, rng).map(Move::from_matrix))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| e.to_string())?;
        Ok(Strategy::new(p, moves))
    };
    let s1 = strategy(Player::One)?;
    let s2 = strategy(Player::Two)?;
    let playout = play(&spec, &s1, &s2).map_err(|e| e.to_string())?;
    let dist = measure(&playout, &spec).distribution;
    let total: f64 = dist.iter().sum();
    if (total - 1.0).abs() > 1e-9 || dist.iter().any(|&p| p < -1e-15) {
        return Err(format!("distribution {dist:?} sums to {total}"));
    }
    for s in playout.trajectory() {
        if (s.norm() - 1.0).abs() > 1e-9 {
            return Err("trajectory state lost normalization".into());
        }
    }
    Ok(())
}

pub fn prop_keying(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let n = rng.random_range(1..=6);
    let v = random_state(n, rng);
    let theta = rng.random_range(-PI..PI);
    if node_key(&v) != node_key(&v.with_phase(theta)) {
        return Err(format!("key changed under phase {theta}"));
    }
    let w = random_state(n, rng);
    let same = (v.inner(&w).map_err(|e| e.to_string())?.norm() - 1.0).abs() < 1e-6;
    if !same && node_key(&v) == node_key(&w) {
        return Err("distinct states share a key".into());
    }
    Ok(())
}

fn random_named(n: usize, prefix: &str, rng: &mut ChaCha8Rng) -> Vec<NamedMove> {
    let k = rng.random_range(1..=3);
    (0..k)
        .map(|i| {
            let u = if rng.random_bool(0.5) {
                random_permutation(n, rng)
            } else if rng.random_bool(0.5) {
                UnitaryMatrix::qft(n).unwrap()
            } else {
                UnitaryMatrix::random(n, rng).unwrap()
            };
            NamedMove::new(format!("{prefix}{i}"), u)
        })
        .collect()
}

pub fn prop_dot_stable(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let n = rng.random_range(2..=4);
    let m = rng.random_range(1..=2);
    let schedule = if rng.random_bool(0.5) {
        Schedule::Canonical(m)
    } else {
        Schedule::Noncanonical(m)
    };
    let a = random_named(n, "a", rng);
    let b = random_named(n, "b", rng);
    let build = || {
        GameSpec::new(
            n,
            0,
            n - 1,
            0,
            schedule,
            ActionGroup::unitary(n),
            ActionGroup::unitary(n),
        )
    };
    let first = explore(
        &build().map_err(|e| e.to_string())?,
        &a,
        &b,
        schedule.total_rounds(),
    )
    .map_err(|e| e.to_string())?;
    let second = explore(
        &build().map_err(|e| e.to_string())?,
        &a.clone(),
        &b.clone(),
        schedule.total_rounds(),
    )
    .map_err(|e| e.to_string())?;
    let (d1, d2) = (to_dot(&first), to_dot(&second));
    if d1 != d2 || d1 != to_dot(&first) {
        return Err("DOT output differs between identical explorations".into());
    }
    Ok(())
}

pub fn prop_group_axioms(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let n = rng.random_range(2..=4);
    let k = rng.random_range(1..=2);
    let mut gens: Vec<UnitaryMatrix> = (0..k).map(|_| random_permutation(n, rng)).collect();
    if rng.random_bool(0.3) {
        // A diagonal phase of order 4 keeps the group finite but non-permutation.
        let mut d = o_identity(n);
        d[0][0] = C::new(0.0, 1.0);
        gens.push(UnitaryMatrix::from_rows(d).map_err(|e| e.to_string())?);
    }
    let g = ActionGroup::generated(n, gens.iter().cloned().map(Move::from_matrix).collect())
        .map_err(|e| e.to_string())?;
    let closure = close(&g).map_err(|e| e.to_string())?;
    if !closure.is_complete() {
        return Err("small closure hit its cap".into());
    }
    let oracle = o_closure(&gens.iter().map(to_mat).collect::<Vec<_>>(), 100_000);
    if oracle.len() != closure.len() {
        return Err(format!(
            "closure order {} but oracle order {}",
            closure.len(),
            oracle.len()
        ));
    }
    let elems = closure.elements();
    let yes = |u: &UnitaryMatrix| contains(&g, u) == Membership::Yes;
    if !yes(&UnitaryMatrix::identity(n).unwrap()) {
        return Err("identity missing".into());
    }
    for _ in 0..4 {
        let x = elems[rng.random_range(0..elems.len())].matrix();
        let y = elems[rng.random_range(0..elems.len())].matrix();
        if !yes(&x.compose(y).map_err(|e| e.to_string())?) {
            return Err("not closed under products".into());
        }
        if !yes(&x.adjoint()) {
            return Err("not closed under inverses".into());
        }
        let x3 = x
            .compose(y)
            .and_then(|xy| xy.compose(x))
            .map_err(|e| e.to_string())?;
        let x3b = x
            .compose(&y.compose(x).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        if !x3.approx_eq(&x3b, 1e-9) {
            return Err("products are not associative".into());
        }
    }
    if gens.iter().any(|u| !yes(u)) {
        return Err("generator missing".into());
    }
    Ok(())
}

pub type Check = fn(&mut ChaCha8Rng) -> Result<(), String>;

pub const PROPERTIES: [(&str, Check); 5] = [
    ("unitarity preservation", prop_unitarity),
    ("distribution normalization", prop_distribution),
    ("phase-canonical node keying", prop_keying),
    ("DOT byte-stability", prop_dot_stable),
    ("closure group axioms", prop_group_axioms),
];
