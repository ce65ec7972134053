//! JSON interchange forms of sets, systems, matrices, transcripts and reports.
//!
//! Numbers are carried as arbitrary-precision JSON integers, so entries of any
//! size survive a round trip.

use num_bigint::{BigInt, BigUint};
use serde_json::{json, Map, Number, Value};

use crate::diophantine::DiophantineSystem;
use crate::error::{Error, Result};
use crate::ops::IntegerMatrix;
use crate::oracle::{BoundReport, OperationKind};
use crate::set::{LinearComponent, Metrics, SemilinearSet};
use crate::vector::NatVector;

fn schema(msg: impl Into<String>) -> Error {
    Error::Schema(msg.into())
}

fn number(s: String) -> Value {
    Value::Number(s.parse::<Number>().expect("decimal integer"))
}

pub fn nat_to_json(v: &BigUint) -> Value {
    number(v.to_string())
}

pub fn int_to_json(v: &BigInt) -> Value {
    number(v.to_string())
}

pub fn int_from_json(v: &Value) -> Result<BigInt> {
    let Value::Number(n) = v else {
        return Err(schema(format!("expected an integer, found {v}")));
    };
    n.as_str()
        .parse::<BigInt>()
        .map_err(|_| schema(format!("expected an integer, found {n}")))
}

pub fn nat_from_json(v: &Value) -> Result<BigUint> {
    let i = int_from_json(v)?;
    i.to_biguint()
        .ok_or_else(|| Error::NegativeEntry(i.to_string()))
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| schema(format!("{what} must be an array")))
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key)
        .ok_or_else(|| schema(format!("missing field \"{key}\"")))
}

pub fn vector_to_json(v: &NatVector) -> Value {
    Value::Array(v.entries().iter().map(nat_to_json).collect())
}

pub fn vector_from_json(v: &Value) -> Result<NatVector> {
    let entries = array(v, "vector")?
        .iter()
        .map(nat_from_json)
        .collect::<Result<Vec<_>>>()?;
    NatVector::new(entries)
}

fn vectors_from_json(v: &Value, dim: usize, what: &str) -> Result<Vec<NatVector>> {
    array(v, what)?
        .iter()
        .map(|x| {
            let x = vector_from_json(x)?;
            crate::error::check_dim(dim, x.dim())?;
            Ok(x)
        })
        .collect()
}

/// Canonical JSON form: components and vectors in sorted order.
pub fn set_to_json(s: &SemilinearSet) -> Value {
    let comps: Vec<Value> = s
        .components()
        .iter()
        .map(|c| {
            json!({
                "constants": c.constants().iter().map(vector_to_json).collect::<Vec<_>>(),
                "periods": c.periods().iter().map(vector_to_json).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({ "k": s.dim(), "components": comps })
}

/// Accepts components and vectors in any order; the result is normalized.
pub fn set_from_json(v: &Value) -> Result<SemilinearSet> {
    let dim = field(v, "k")?
        .as_u64()
        .ok_or_else(|| schema("\"k\" must be a non-negative integer"))? as usize;
    let comps = array(field(v, "components")?, "components")?
        .iter()
        .map(|c| {
            let constants = vectors_from_json(field(c, "constants")?, dim, "constants")?;
            let periods = match c.get("periods") {
                Some(p) => vectors_from_json(p, dim, "periods")?,
                None => Vec::new(),
            };
            LinearComponent::new(constants, periods)
        })
        .collect::<Result<Vec<_>>>()?;
    SemilinearSet::new(dim, comps)
}

pub fn metrics_to_json(m: &Metrics) -> Value {
    json!({
        "index_size": m.index_size,
        "max_period_card": m.max_period_card,
        "max_period_norm": nat_to_json(&m.max_period_norm),
        "max_const_norm": nat_to_json(&m.max_const_norm),
        "nu": nat_to_json(&m.nu),
    })
}

fn int_matrix(v: &Value, what: &str) -> Result<Vec<Vec<BigInt>>> {
    array(v, what)?
        .iter()
        .map(|row| array(row, what)?.iter().map(int_from_json).collect())
        .collect()
}

fn int_matrix_to_json(rows: &[Vec<BigInt>]) -> Value {
    Value::Array(
        rows.iter()
            .map(|r| Value::Array(r.iter().map(int_to_json).collect()))
            .collect(),
    )
}

/// `{"A": [[..]], "b": [..]}`; a missing `b` means the homogeneous system.
pub fn system_from_json(v: &Value) -> Result<DiophantineSystem> {
    let a = int_matrix(field(v, "A")?, "A")?;
    match v.get("b") {
        Some(b) => {
            let rhs = array(b, "b")?
                .iter()
                .map(int_from_json)
                .collect::<Result<Vec<_>>>()?;
            DiophantineSystem::new(a, rhs)
        }
        None => DiophantineSystem::homogeneous(a),
    }
}

pub fn system_to_json(sys: &DiophantineSystem) -> Value {
    json!({
        "A": int_matrix_to_json(sys.matrix()),
        "b": sys.rhs().iter().map(int_to_json).collect::<Vec<_>>(),
    })
}

/// `{"H": [[..]]}`.
pub fn matrix_from_json(v: &Value) -> Result<IntegerMatrix> {
    IntegerMatrix::new(int_matrix(field(v, "H")?, "H")?)
}

pub fn matrix_to_json(h: &IntegerMatrix) -> Value {
    json!({ "H": int_matrix_to_json(h.rows()) })
}

/// An operation record `{"op", "inputs", "output"}`, plus `"H"` for preimages.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transcript {
    pub op: OperationKind,
    pub inputs: Vec<SemilinearSet>,
    pub output: SemilinearSet,
    pub matrix: Option<IntegerMatrix>,
}

pub fn transcript_from_json(v: &Value) -> Result<Transcript> {
    let op = field(v, "op")?
        .as_str()
        .ok_or_else(|| schema("\"op\" must be a string"))?
        .parse::<OperationKind>()?;
    let inputs = array(field(v, "inputs")?, "inputs")?
        .iter()
        .map(set_from_json)
        .collect::<Result<Vec<_>>>()?;
    let output = set_from_json(field(v, "output")?)?;
    let matrix = match v.get("H") {
        Some(_) => Some(matrix_from_json(v)?),
        None => None,
    };
    Ok(Transcript {
        op,
        inputs,
        output,
        matrix,
    })
}

pub fn transcript_to_json(t: &Transcript) -> Value {
    let mut m = Map::new();
    m.insert("op".into(), json!(t.op.name()));
    m.insert(
        "inputs".into(),
        Value::Array(t.inputs.iter().map(set_to_json).collect()),
    );
    m.insert("output".into(), set_to_json(&t.output));
    if let Some(h) = &t.matrix {
        m.insert("H".into(), int_matrix_to_json(h.rows()));
    }
    Value::Object(m)
}

pub fn report_to_json(r: &BoundReport) -> Value {
    let params: Map<String, Value> = r
        .parameters
        .iter()
        .map(|(k, v)| (k.clone(), Value::String(v.clone())))
        .collect();
    let checks: Vec<Value> = r
        .checks
        .iter()
        .map(|c| {
            json!({
                "quantity": c.quantity,
                "formula": c.formula,
                "measured": nat_to_json(&c.measured),
                "scale": if c.log_scale { "log2" } else { "linear" },
                "lower": c.lower,
                "upper": c.upper,
                "status": c.status.name(),
            })
        })
        .collect();
    json!({
        "op": r.kind.name(),
        "k": r.dim,
        "operands": r.operands.iter().map(metrics_to_json).collect::<Vec<_>>(),
        "parameters": params,
        "q_from": r.q_source,
        "result": metrics_to_json(&r.result),
        "checks": checks,
        "status": r.status.name(),
        "precision": r.precision,
    })
}
