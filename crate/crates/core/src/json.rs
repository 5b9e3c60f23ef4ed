//! JSON documents.
//!
//! Every document is an envelope
//! `{"schema": "albert-orbits/1", "field": "q" | "fp:P", "kind": ..., "value": ...}`.
//! Scalars are written as strings (`"-3/2"`, or the residue in `[0, p)`);
//! integers are also accepted on input.

use serde_json::{json, Map, Value};

use crate::albert::AlbertElement;
use crate::field::{Field, FieldError, Mat, Scalar};
use crate::group::{GElement, GroupElement};
use crate::octonion::Octonion;
use crate::orbits::{Branch, ReductionTrace, TraceStep};
use crate::pvs::{BinaryCubic, PairElement};

pub const SCHEMA: &str = "albert-orbits/1";

#[derive(Debug, thiserror::Error)]
pub enum JsonError {
    #[error("invalid JSON: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("unsupported schema {0:?}, expected {SCHEMA:?}")]
    Schema(String),
    #[error("{path}: {reason}")]
    Shape { path: String, reason: String },
    #[error("{path}: {source}")]
    Scalar { path: String, source: FieldError },
    #[error("document is a {found}, expected a {expected}")]
    Kind { found: String, expected: String },
}

fn shape(path: &str, reason: impl Into<String>) -> JsonError {
    JsonError::Shape { path: path.to_string(), reason: reason.into() }
}

/// Types with a JSON form over a field `F`.
pub trait Json<F: Field>: Sized {
    /// The `kind` tag used in document envelopes.
    const KIND: &'static str;
    fn to_json(&self) -> Value;
    fn from_json(field: &F, v: &Value, path: &str) -> Result<Self, JsonError>;
}

/// The envelope fields of a parsed document.
#[derive(Clone, Debug)]
pub struct RawDocument {
    pub field: String,
    pub kind: String,
    pub value: Value,
}

pub fn read_document(text: &str) -> Result<RawDocument, JsonError> {
    let v: Value = serde_json::from_str(text)?;
    let obj = v.as_object().ok_or_else(|| shape("$", "expected an object"))?;
    let get = |k: &str| obj.get(k).ok_or_else(|| shape("$", format!("missing key {k:?}")));
    let schema = get("schema")?.as_str().ok_or_else(|| shape("$.schema", "expected a string"))?;
    if schema != SCHEMA {
        return Err(JsonError::Schema(schema.to_string()));
    }
    let field = get("field")?.as_str().ok_or_else(|| shape("$.field", "expected a string"))?.to_string();
    let kind = get("kind")?.as_str().ok_or_else(|| shape("$.kind", "expected a string"))?.to_string();
    Ok(RawDocument { field, kind, value: get("value")?.clone() })
}

impl RawDocument {
    pub fn decode<F: Field, T: Json<F>>(&self, field: &F) -> Result<T, JsonError> {
        if self.kind != T::KIND {
            return Err(JsonError::Kind { found: self.kind.clone(), expected: T::KIND.to_string() });
        }
        if self.field != field.descriptor() {
            return Err(shape("$.field", format!("document is over {}, expected {}", self.field, field.descriptor())));
        }
        T::from_json(field, &self.value, "$.value")
    }
}

/// Wraps a value in a document envelope.
pub fn document<F: Field, T: Json<F>>(field: &F, x: &T) -> Value {
    json!({ "schema": SCHEMA, "field": field.descriptor(), "kind": T::KIND, "value": x.to_json() })
}

/// An envelope around a free-form report (outputs that are never read back).
pub fn report<F: Field>(field: &F, kind: &str, value: Value) -> Value {
    json!({ "schema": SCHEMA, "field": field.descriptor(), "kind": kind, "value": value })
}

pub fn scalar_to_json<S: Scalar>(s: &S) -> Value {
    Value::String(s.to_string())
}

pub fn scalar_from_json<F: Field>(field: &F, v: &Value, path: &str) -> Result<F::Elem, JsonError> {
    let text = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) if n.is_i64() || n.is_u64() => n.to_string(),
        _ => return Err(shape(path, "expected a scalar string")),
    };
    field.parse(&text).map_err(|source| JsonError::Scalar { path: path.to_string(), source })
}

fn array<'a>(v: &'a Value, path: &str, len: usize) -> Result<&'a Vec<Value>, JsonError> {
    let a = v.as_array().ok_or_else(|| shape(path, "expected an array"))?;
    if a.len() != len {
        return Err(shape(path, format!("expected {len} entries, found {}", a.len())));
    }
    Ok(a)
}

fn object<'a>(v: &'a Value, path: &str, keys: &[&str]) -> Result<&'a Map<String, Value>, JsonError> {
    let o = v.as_object().ok_or_else(|| shape(path, "expected an object"))?;
    for k in keys {
        if !o.contains_key(*k) {
            return Err(shape(path, format!("missing key {k:?}")));
        }
    }
    Ok(o)
}

fn scalars<F: Field>(field: &F, v: &Value, path: &str, len: usize) -> Result<Vec<F::Elem>, JsonError> {
    array(v, path, len)?
        .iter()
        .enumerate()
        .map(|(i, e)| scalar_from_json(field, e, &format!("{path}[{i}]")))
        .collect()
}

pub fn matrix_to_json<S: Scalar>(m: &Mat<S>) -> Value {
    Value::Array((0..m.rows()).map(|i| Value::Array(m.row(i).iter().map(scalar_to_json).collect())).collect())
}

pub fn matrix_from_json<F: Field>(field: &F, v: &Value, path: &str, n: usize) -> Result<Mat<F::Elem>, JsonError> {
    let rows = array(v, path, n)?
        .iter()
        .enumerate()
        .map(|(i, r)| scalars(field, r, &format!("{path}[{i}]"), n))
        .collect::<Result<Vec<_>, _>>()?;
    Mat::from_rows(field, rows).map_err(|e| shape(path, e.to_string()))
}

impl<F: Field> Json<F> for Octonion<F::Elem> {
    const KIND: &'static str = "octonion";

    fn to_json(&self) -> Value {
        Value::Array(self.coords().iter().map(scalar_to_json).collect())
    }

    fn from_json(field: &F, v: &Value, path: &str) -> Result<Self, JsonError> {
        Ok(Octonion::from_coords(scalars(field, v, path, 8)?).expect("length 8"))
    }
}

impl<F: Field> Json<F> for AlbertElement<F::Elem> {
    const KIND: &'static str = "albert";

    fn to_json(&self) -> Value {
        json!({
            "s": self.s.iter().map(scalar_to_json).collect::<Vec<_>>(),
            "x": self.x.iter().map(|o| Json::<F>::to_json(o)).collect::<Vec<_>>(),
        })
    }

    fn from_json(field: &F, v: &Value, path: &str) -> Result<Self, JsonError> {
        let o = object(v, path, &["s", "x"])?;
        let s = scalars(field, &o["s"], &format!("{path}.s"), 3)?;
        let xs = array(&o["x"], &format!("{path}.x"), 3)?;
        let mut x = Vec::with_capacity(3);
        for (i, e) in xs.iter().enumerate() {
            x.push(Octonion::from_json(field, e, &format!("{path}.x[{i}]"))?);
        }
        let [s1, s2, s3]: [F::Elem; 3] = s.try_into().expect("3");
        let x: [Octonion<F::Elem>; 3] = x.try_into().map_err(|_| shape(path, "3 octonions"))?;
        let mut a = AlbertElement::diag(s1, s2, s3);
        a.x = x;
        Ok(a)
    }
}

impl<F: Field> Json<F> for PairElement<F::Elem> {
    const KIND: &'static str = "pair";

    fn to_json(&self) -> Value {
        json!({ "x1": Json::<F>::to_json(&self.x1), "x2": Json::<F>::to_json(&self.x2) })
    }

    fn from_json(field: &F, v: &Value, path: &str) -> Result<Self, JsonError> {
        let o = object(v, path, &["x1", "x2"])?;
        Ok(PairElement::new(
            AlbertElement::from_json(field, &o["x1"], &format!("{path}.x1"))?,
            AlbertElement::from_json(field, &o["x2"], &format!("{path}.x2"))?,
        ))
    }
}

impl<F: Field> Json<F> for BinaryCubic<F::Elem> {
    const KIND: &'static str = "binary-cubic";

    fn to_json(&self) -> Value {
        Value::Array(self.coeffs().iter().map(scalar_to_json).collect())
    }

    fn from_json(field: &F, v: &Value, path: &str) -> Result<Self, JsonError> {
        let [a, b, c, d]: [F::Elem; 4] = scalars(field, v, path, 4)?.try_into().expect("4");
        Ok(BinaryCubic::new(a, b, c, d))
    }
}

/// `{"g1": {"matrix": 27x27, "multiplier": s}, "g2": 2x2}`. On input the
/// multiplier is recomputed from the matrix and must agree.
impl<F: Field> Json<F> for GElement<F::Elem> {
    const KIND: &'static str = "group-element";

    fn to_json(&self) -> Value {
        json!({
            "g1": { "matrix": matrix_to_json(self.g1.matrix()), "multiplier": scalar_to_json(self.g1.multiplier()) },
            "g2": matrix_to_json(&self.g2),
        })
    }

    fn from_json(field: &F, v: &Value, path: &str) -> Result<Self, JsonError> {
        let o = object(v, path, &["g1", "g2"])?;
        let p1 = format!("{path}.g1");
        let g1 = object(&o["g1"], &p1, &["matrix", "multiplier"])?;
        let mat = matrix_from_json(field, &g1["matrix"], &format!("{p1}.matrix"), 27)?;
        let mult = scalar_from_json(field, &g1["multiplier"], &format!("{p1}.multiplier"))?;
        let g1 = GroupElement::from_matrix(mat).map_err(|e| shape(&p1, e.to_string()))?;
        if *g1.multiplier() != mult {
            return Err(shape(&p1, format!("multiplier {mult} does not match det(g e) = {}", g1.multiplier())));
        }
        let g2 = matrix_from_json(field, &o["g2"], &format!("{path}.g2"), 2)?;
        GElement::new(g1, g2).map_err(|e| shape(path, e.to_string()))
    }
}

fn branch_name(b: Branch) -> &'static str {
    match b {
        Branch::RankDeficient => "rank-deficient",
        Branch::Irreducible => "irreducible",
    }
}

impl<F: Field> Json<F> for ReductionTrace<F::Elem> {
    const KIND: &'static str = "reduction-trace";

    fn to_json(&self) -> Value {
        let steps: Vec<Value> = self
            .steps
            .iter()
            .map(|s| json!({ "label": s.label, "element": Json::<F>::to_json(&s.element) }))
            .collect();
        json!({
            "branch": branch_name(self.branch),
            "input": Json::<F>::to_json(&self.input),
            "output": Json::<F>::to_json(&self.output),
            "steps": steps,
            "accumulated": Json::<F>::to_json(&self.accumulated),
        })
    }

    fn from_json(field: &F, v: &Value, path: &str) -> Result<Self, JsonError> {
        let o = object(v, path, &["branch", "input", "output", "steps", "accumulated"])?;
        let branch = match o["branch"].as_str() {
            Some("rank-deficient") => Branch::RankDeficient,
            Some("irreducible") => Branch::Irreducible,
            _ => return Err(shape(&format!("{path}.branch"), "expected \"rank-deficient\" or \"irreducible\"")),
        };
        let sp = format!("{path}.steps");
        let raw = o["steps"].as_array().ok_or_else(|| shape(&sp, "expected an array"))?;
        let mut steps = Vec::with_capacity(raw.len());
        for (i, s) in raw.iter().enumerate() {
            let p = format!("{sp}[{i}]");
            let so = object(s, &p, &["label", "element"])?;
            let label = so["label"].as_str().ok_or_else(|| shape(&format!("{p}.label"), "expected a string"))?;
            let element = GElement::from_json(field, &so["element"], &format!("{p}.element"))?;
            steps.push(TraceStep { label: label.to_string(), element });
        }
        Ok(ReductionTrace {
            branch,
            input: PairElement::from_json(field, &o["input"], &format!("{path}.input"))?,
            output: PairElement::from_json(field, &o["output"], &format!("{path}.output"))?,
            steps,
            accumulated: GElement::from_json(field, &o["accumulated"], &format!("{path}.accumulated"))?,
        })
    }
}
