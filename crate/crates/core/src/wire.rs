//! JSON forms of fields, matrices, polynomials, jobs and reports.
//!
//! Elements travel as strings (`"3"`, `"-1/2"`). Objects are built with
//! `serde_json::Value`, whose maps keep keys sorted, so output is
//! byte-deterministic.

use serde::Deserialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::field::{Field, FieldElement, FieldError};
use crate::matrix::Matrix;
use crate::oracle::ComparisonReport;
use crate::poly::Polynomial;
use crate::quadsum::{
    BlockPairing, CaseClassification, Certificate, Decision, FailingWitness, NecessaryOutcome, NecessaryReport,
    QuadParams, VerificationReport,
};

#[derive(Debug, Clone, Error)]
pub enum WireError {
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

fn malformed(s: impl Into<String>) -> WireError {
    WireError::Malformed(s.into())
}

/// `"Q"` or `{"GF": p}`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum FieldSpec {
    Named(String),
    Prime {
        #[serde(rename = "GF")]
        gf: u64,
    },
}

impl FieldSpec {
    fn resolve(self) -> Result<Field, WireError> {
        match self {
            FieldSpec::Named(s) => parse_field_name(&s),
            FieldSpec::Prime { gf } => Ok(Field::prime(gf)?),
        }
    }
}

/// `Q`, `QQ`, `GF(p)`, `gfp`, `GFp` or a bare prime.
pub fn parse_field_name(s: &str) -> Result<Field, WireError> {
    let t = s.trim().to_ascii_lowercase();
    if t == "q" || t == "qq" || t == "rationals" {
        return Ok(Field::Rationals);
    }
    let digits = t
        .strip_prefix("gf")
        .map(|r| r.trim_start_matches('(').trim_end_matches(')'))
        .unwrap_or(&t);
    let p: u64 = digits.parse().map_err(|_| malformed(format!("unknown field {s:?}")))?;
    Ok(Field::prime(p)?)
}

pub fn field_to_json(field: Field) -> Value {
    match field {
        Field::Rationals => json!("Q"),
        Field::Prime(p) => json!({ "GF": p }),
    }
}

pub fn field_from_json(v: &Value) -> Result<Field, WireError> {
    FieldSpec::deserialize(v)
        .map_err(|_| malformed(format!("bad field descriptor {v}")))?
        .resolve()
}

pub fn element_to_json(x: &FieldElement) -> Value {
    Value::String(x.to_string())
}

pub fn element_from_json(field: Field, v: &Value) -> Result<FieldElement, WireError> {
    match v {
        Value::String(s) => Ok(field.parse(s)?),
        Value::Number(n) => Ok(field.parse(&n.to_string())?),
        _ => Err(malformed(format!("bad field element {v}"))),
    }
}

pub fn matrix_to_json(m: &Matrix) -> Value {
    let entries: Vec<Value> = m
        .to_rows()
        .iter()
        .map(|r| Value::Array(r.iter().map(element_to_json).collect()))
        .collect();
    json!({ "rows": m.rows(), "cols": m.cols(), "entries": entries })
}

/// Either the full `{"rows","cols","entries"}` form or a bare list of rows.
pub fn matrix_from_json(field: Field, v: &Value) -> Result<Matrix, WireError> {
    let (rows_v, shape) = match v {
        Value::Array(rows) => (rows, None),
        Value::Object(o) => {
            let rows = o
                .get("entries")
                .and_then(Value::as_array)
                .ok_or_else(|| malformed("matrix object needs an \"entries\" list"))?;
            let dim = |k: &str| o.get(k).and_then(Value::as_u64).map(|x| x as usize);
            (rows, Some((dim("rows"), dim("cols"))))
        }
        _ => return Err(malformed("matrix must be a list of rows or an object")),
    };
    let mut data = Vec::new();
    let mut cols = None;
    for row in rows_v {
        let row = row.as_array().ok_or_else(|| malformed("matrix row must be a list"))?;
        if *cols.get_or_insert(row.len()) != row.len() {
            return Err(malformed("ragged matrix rows"));
        }
        for x in row {
            data.push(element_from_json(field, x)?);
        }
    }
    let rows = rows_v.len();
    let cols = cols.unwrap_or(0);
    if let Some((r, c)) = shape {
        if r.is_some_and(|r| r != rows) || (rows > 0 && c.is_some_and(|c| c != cols)) {
            return Err(malformed("declared shape does not match entries"));
        }
    }
    Matrix::new(field, rows, cols, data).map_err(|e| malformed(e.to_string()))
}

/// Coefficients as strings, constant term first.
pub fn poly_to_json(f: &Polynomial) -> Value {
    Value::Array(f.coeffs().iter().map(element_to_json).collect())
}

pub fn params_to_json(p: &QuadParams) -> Value {
    json!({
        "a": element_to_json(&p.a),
        "b": element_to_json(&p.b),
        "c": element_to_json(&p.c),
        "d": element_to_json(&p.d),
    })
}

/// Missing keys default to `(1, 0, 0, 0)`.
pub fn params_from_json(field: Field, v: Option<&Value>) -> Result<QuadParams, WireError> {
    let mut params = QuadParams::idempotent_square_zero(field);
    let Some(v) = v else { return Ok(params) };
    let o = v.as_object().ok_or_else(|| malformed("params must be an object"))?;
    for (k, x) in o {
        let e = element_from_json(field, x)?;
        match k.as_str() {
            "a" => params.a = e,
            "b" => params.b = e,
            "c" => params.c = e,
            "d" => params.d = e,
            other => return Err(malformed(format!("unknown parameter {other:?}"))),
        }
    }
    Ok(params)
}

/// One decision job: a square matrix with its field and parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JobSpec {
    pub field: Field,
    pub matrix: Matrix,
    pub params: QuadParams,
}

pub fn parse_job(text: &str) -> Result<JobSpec, WireError> {
    let v: Value = serde_json::from_str(text).map_err(|e| malformed(format!("invalid JSON: {e}")))?;
    let field = field_from_json(v.get("field").ok_or_else(|| malformed("missing \"field\""))?)?;
    let matrix = matrix_from_json(field, v.get("matrix").ok_or_else(|| malformed("missing \"matrix\""))?)?;
    if !matrix.is_square() || matrix.rows() == 0 {
        return Err(malformed(format!(
            "matrix must be square and nonempty, got {}x{}",
            matrix.rows(),
            matrix.cols()
        )));
    }
    let params = params_from_json(field, v.get("params"))?;
    Ok(JobSpec { field, matrix, params })
}

pub fn job_to_json(job: &JobSpec) -> Value {
    json!({
        "field": field_to_json(job.field),
        "matrix": matrix_to_json(&job.matrix),
        "params": params_to_json(&job.params),
    })
}

pub fn classification_to_json(c: &CaseClassification) -> Value {
    json!({
        "case": c.case.to_string(),
        "alpha": element_to_json(&c.alpha),
        "beta": element_to_json(&c.beta),
        "shift": element_to_json(&c.shift),
        "reduced_a": element_to_json(&c.reduced_a),
        "reduced_c": element_to_json(&c.reduced_c),
        "scale": c.scale.as_ref().map(element_to_json),
        "swapped": c.swapped,
    })
}

pub fn pairing_to_json(p: &BlockPairing) -> Value {
    json!({
        "pairs": p.pairs.iter().map(|&(a, b)| json!({ "at_1": a, "at_0": b })).collect::<Vec<_>>(),
        "singletons": p.singletons.iter().map(|&(e, s)| json!({ "eigenvalue": e, "size": s })).collect::<Vec<_>>(),
    })
}

pub fn failing_witness_to_json(w: &FailingWitness) -> Value {
    match w {
        FailingWitness::InvariantFactor { index, factor } => json!({
            "kind": "invariant_factor",
            "index": index,
            "factor": poly_to_json(factor),
            "message": w.to_string(),
        }),
        FailingWitness::Intertwining(v) => json!({
            "kind": "intertwining",
            "n": v.n,
            "offset": v.p,
            "larger_at": if v.u_exceeds_v { 0 } else { 1 },
            "left": v.left,
            "right": v.right,
            "message": w.to_string(),
        }),
    }
}

pub fn diagnostics_to_json(d: &Decision) -> Value {
    json!({
        "invariant_factors": d.invariant_factors.iter().map(poly_to_json).collect::<Vec<_>>(),
        "g_factors": d.g_factors.iter().map(poly_to_json).collect::<Vec<_>>(),
        "nullity_at_0": d.nullity_at_0,
        "nullity_at_1": d.nullity_at_1,
        "pairing": d.pairing.as_ref().map(pairing_to_json),
        "failing_witness": d.failing_witness.as_ref().map(failing_witness_to_json),
    })
}

pub fn decision_to_json(field: Field, params: &QuadParams, c: &CaseClassification, d: &Decision) -> Value {
    json!({
        "decision": if d.yes { "yes" } else { "no" },
        "case": c.case.to_string(),
        "field": field_to_json(field),
        "params": params_to_json(params),
        "classification": classification_to_json(c),
        "diagnostics": diagnostics_to_json(d),
    })
}

pub fn unsupported_to_json(
    field: Field,
    params: &QuadParams,
    c: &CaseClassification,
    necessary: Option<&NecessaryReport>,
) -> Value {
    json!({
        "decision": "unsupported_case",
        "case": c.case.to_string(),
        "field": field_to_json(field),
        "params": params_to_json(params),
        "classification": classification_to_json(c),
        "necessary": necessary.map(necessary_to_json),
    })
}

pub fn certificate_to_json(field: Field, cert: &Certificate) -> Value {
    json!({
        "decision": "yes",
        "case": cert.classification.case.to_string(),
        "field": field_to_json(field),
        "A": matrix_to_json(&cert.a),
        "B": matrix_to_json(&cert.b),
        "params": params_to_json(&cert.params),
        "classification": classification_to_json(&cert.classification),
        "diagnostics": diagnostics_to_json(&cert.decision),
    })
}

/// The parts of a certificate that verification needs. The field defaults to
/// `default_field` when the certificate does not name one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertificateClaim {
    pub field: Field,
    pub a: Matrix,
    pub b: Matrix,
    pub params: QuadParams,
}

pub fn certificate_from_json(text: &str, default_field: Option<Field>) -> Result<CertificateClaim, WireError> {
    let v: Value = serde_json::from_str(text).map_err(|e| malformed(format!("invalid JSON: {e}")))?;
    let field = match v.get("field") {
        Some(f) => field_from_json(f)?,
        None => default_field.ok_or_else(|| malformed("certificate has no \"field\""))?,
    };
    let get = |k: &str| v.get(k).ok_or_else(|| malformed(format!("certificate has no {k:?}")));
    Ok(CertificateClaim {
        field,
        a: matrix_from_json(field, get("A")?)?,
        b: matrix_from_json(field, get("B")?)?,
        params: params_from_json(field, v.get("params"))?,
    })
}

pub fn verification_to_json(r: &VerificationReport) -> Value {
    json!({
        "pass": r.pass,
        "dimensions": r.dimensions,
        "sum": r.sum,
        "first_quadratic": r.first_quadratic,
        "second_quadratic": r.second_quadratic,
        "commutation": r.commutation,
    })
}

pub fn necessary_to_json(r: &NecessaryReport) -> Value {
    let (outcome, violation) = match &r.outcome {
        NecessaryOutcome::NotApplicable => ("not_applicable", Value::Null),
        NecessaryOutcome::Inconclusive => ("passes", Value::Null),
        NecessaryOutcome::NotDecomposable(v) => (
            "not_decomposable",
            json!({
                "n": v.n,
                "larger_at": element_to_json(if v.u_exceeds_v { &r.alpha } else { &r.beta }),
                "left": v.left,
                "right": v.right,
            }),
        ),
    };
    json!({
        "alpha": element_to_json(&r.alpha),
        "beta": element_to_json(&r.beta),
        "nullity_at_alpha": r.at_alpha,
        "nullity_at_beta": r.at_beta,
        "outcome": outcome,
        "violation": violation,
    })
}

pub fn comparison_to_json(r: &ComparisonReport) -> Value {
    json!({
        "field": field_to_json(r.field),
        "n": r.n,
        "matrices": r.matrices,
        "idempotents": r.idempotents,
        "square_zero": r.square_zero,
        "atlas_members": r.atlas_members,
        "decide_yes": r.decide_yes,
        "mismatch_count": r.mismatches.len(),
        "mismatches": r.mismatches.iter().map(|m| json!({
            "matrix": matrix_to_json(&m.matrix),
            "decide": m.decide,
            "atlas": m.atlas,
        })).collect::<Vec<_>>(),
    })
}
