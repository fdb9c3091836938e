//! JSON report bodies.

use serde_json::{json, Value};

use crate::game::{Outcome, Playout, Strategy};
use crate::linalg::StateVector;
use crate::strategy::{
    AnalysisVerdict, CounterexamplePair, Evidence, Finding, Method, TableReport,
};

use super::files::StrategyFile;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn state(v: &StateVector) -> Value {
    Value::Array(v.amplitudes().iter().map(|a| json!([a.re, a.im])).collect())
}

pub fn strategy(s: &Strategy) -> Value {
    let mut v = serde_json::to_value(StrategyFile::from_strategy(s)).unwrap_or(Value::Null);
    if let Value::Object(map) = &mut v {
        let labels: Vec<String> = s.moves().iter().map(|m| m.label()).collect();
        map.insert("labels".into(), json!(labels));
    }
    v
}

fn with_header(command: &str, spec_hash: &str, body: Value) -> Value {
    let mut out = json!({
        "command": command,
        "tool_version": TOOL_VERSION,
        "spec_hash": spec_hash,
    });
    if let (Value::Object(head), Value::Object(rest)) = (&mut out, body) {
        head.extend(rest);
    }
    out
}

pub fn play(spec_hash: &str, p: &Playout, o: &Outcome) -> Value {
    with_header(
        "play",
        spec_hash,
        json!({
            "trajectory": p.trajectory().iter().map(state).collect::<Vec<_>>(),
            "final_state": state(p.final_state()),
            "distribution": o.distribution,
            "verdict": o.verdict,
        }),
    )
}

fn pair(p: &CounterexamplePair) -> Value {
    json!({
        "construction": p.construction.describe(),
        "sigma": strategy(&p.sigma),
        "sigma_prime": strategy(&p.sigma_prime),
        "finals": [state(&p.finals[0]), state(&p.finals[1])],
    })
}

pub fn analysis(spec_hash: &str, v: &AnalysisVerdict) -> Value {
    let body = match &v.result {
        Finding::Exists {
            witness,
            co_witness,
        } => json!({
            "result": "exists",
            "witness": strategy(witness),
            "co_witness": co_witness.as_ref().map(strategy),
        }),
        Finding::NotExists { method, evidence } => {
            let evidence = match evidence {
                Evidence::Summary(s) => json!({
                    "kind": "search_summary",
                    "candidates": s.candidates,
                    "playouts": s.playouts,
                }),
                Evidence::Counterexample { claim, pair: p } => json!({
                    "kind": "counterexample",
                    "claim": strategy(claim),
                    "pair": pair(p),
                }),
            };
            json!({
                "result": "not_exists",
                "method": match method {
                    Method::Exhaustion => "exhaustion",
                    Method::ProofConstruction => "proof_construction",
                },
                "evidence": evidence,
            })
        }
        Finding::Indeterminate { reason } => json!({
            "result": "indeterminate",
            "reason": reason,
        }),
    };
    let mut out = with_header(
        "analyze",
        spec_hash,
        json!({
            "player": v.player,
            "strength": v.strength,
            "summary": v.summary,
        }),
    );
    if let (Value::Object(head), Value::Object(rest)) = (&mut out, body) {
        head.extend(rest);
    }
    out
}

pub fn table(spec_hash: &str, t: &TableReport) -> Value {
    let body = serde_json::to_value(t).unwrap_or(Value::Null);
    with_header("verify-theorems", spec_hash, body)
}

pub fn invariants(
    spec_hash: &str,
    basis: &[StateVector],
    note: Option<&str>,
    reachable: Value,
) -> Value {
    with_header(
        "invariants",
        spec_hash,
        json!({
            "invariant_dimension": basis.len(),
            "invariant_basis": basis.iter().map(state).collect::<Vec<_>>(),
            "note": note,
            "reachable": reachable,
        }),
    )
}
