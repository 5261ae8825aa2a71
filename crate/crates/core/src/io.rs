//! JSON forms of contexts, operators, tensors and terms.
//!
//! Scalars are written by the scalar type itself: exact values as `"p/q"`
//! strings, floats as numbers. Readers accept either form for both modes.
//!
//! ```text
//! context   {"dim": n, "phi": [[..]]?, "tolerance": t?}
//! operator  [[..]] | {"matrix": [[..]], "kind": "self-adjoint" | "skew-adjoint" | "general"}
//! tensor    {"dim": n, "entries": [n⁴ values]} | {"build": "S" | "Lambda", "operator": ..}
//! term      {"build": .., "sign": ±1, "operator": .., "weight": w?}
//! ```

use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Serialize, Serializer};
use serde_json::{json, Map, Value};

use crate::curvature::{Build, CanonicalTerm, CurvatureTensor, Sign};
use crate::error::{Error, Result};
use crate::linalg::{Operator, OperatorKind, SpaceContext, DEFAULT_TOLERANCE};
use crate::matrix::Matrix;
use crate::reduce::Decomposition;
use crate::scalar::Scalar;

pub fn scalar<S: Scalar, Z: Serializer>(v: &S, z: Z) -> std::result::Result<Z::Ok, Z::Error> {
    v.to_json().serialize(z)
}

pub fn scalars<S: Scalar, Z: Serializer>(v: &[S], z: Z) -> std::result::Result<Z::Ok, Z::Error> {
    let mut seq = z.serialize_seq(Some(v.len()))?;
    for x in v {
        seq.serialize_element(&x.to_json())?;
    }
    seq.end()
}

pub fn opt_scalars<S: Scalar, Z: Serializer>(v: &Option<Vec<S>>, z: Z) -> std::result::Result<Z::Ok, Z::Error> {
    match v {
        Some(v) => scalars(v, z),
        None => z.serialize_none(),
    }
}

impl<S: Scalar> Serialize for Matrix<S> {
    fn serialize<Z: Serializer>(&self, z: Z) -> std::result::Result<Z::Ok, Z::Error> {
        let rows: Vec<Vec<Value>> =
            (0..self.rows()).map(|i| self.row(i).iter().map(Scalar::to_json).collect()).collect();
        rows.serialize(z)
    }
}

impl<S: Scalar> Serialize for Operator<S> {
    fn serialize<Z: Serializer>(&self, z: Z) -> std::result::Result<Z::Ok, Z::Error> {
        let mut m = z.serialize_map(Some(2))?;
        m.serialize_entry("kind", &self.kind())?;
        m.serialize_entry("matrix", self.matrix())?;
        m.end()
    }
}

impl<S: Scalar> Serialize for CurvatureTensor<S> {
    fn serialize<Z: Serializer>(&self, z: Z) -> std::result::Result<Z::Ok, Z::Error> {
        let mut m = z.serialize_map(None)?;
        m.serialize_entry("dim", &self.dim())?;
        let entries: Vec<Value> = self.entries().iter().map(Scalar::to_json).collect();
        m.serialize_entry("entries", &entries)?;
        if let Some(p) = self.provenance() {
            m.serialize_entry("provenance", &json!({"build": p.build, "operator": p.operator}))?;
        }
        m.end()
    }
}

impl<S: Scalar> Serialize for CanonicalTerm<S> {
    fn serialize<Z: Serializer>(&self, z: Z) -> std::result::Result<Z::Ok, Z::Error> {
        let mut m = z.serialize_map(None)?;
        m.serialize_entry("build", &self.build)?;
        m.serialize_entry("sign", &self.sign)?;
        m.serialize_entry("operator", &self.op)?;
        if !self.weight.is_one() {
            m.serialize_entry("weight", &self.weight.to_json())?;
        }
        m.end()
    }
}

pub fn context_json<S: Scalar>(ctx: &SpaceContext<S>) -> Value {
    let mut m = Map::new();
    m.insert("dim".into(), json!(ctx.dim()));
    if !ctx.phi_is_identity() {
        m.insert("phi".into(), serde_json::to_value(ctx.phi()).expect("matrices serialize"));
    }
    if ctx.tolerance() != DEFAULT_TOLERANCE {
        m.insert("tolerance".into(), json!(ctx.tolerance()));
    }
    Value::Object(m)
}

fn malformed(what: &str) -> Error {
    Error::Parse(format!("malformed {what}"))
}

fn field<'a>(v: &'a Value, key: &str, what: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| Error::Parse(format!("{what} is missing \"{key}\"")))
}

pub fn parse_scalars<S: Scalar>(v: &Value) -> Result<Vec<S>> {
    v.as_array().ok_or_else(|| malformed("scalar list"))?.iter().map(S::from_json).collect()
}

pub fn parse_matrix<S: Scalar>(v: &Value) -> Result<Matrix<S>> {
    let rows = v.as_array().ok_or_else(|| malformed("matrix"))?;
    let rows: Vec<Vec<S>> = rows.iter().map(parse_scalars).collect::<Result<_>>()?;
    let cols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != cols) {
        return Err(Error::Parse("matrix rows have different lengths".into()));
    }
    Ok(Matrix::from_rows(rows))
}

pub fn parse_context<S: Scalar>(v: &Value) -> Result<SpaceContext<S>> {
    let tolerance = match v.get("tolerance") {
        Some(t) => t.as_f64().ok_or_else(|| malformed("tolerance"))?,
        None => DEFAULT_TOLERANCE,
    };
    let ctx = match v.get("phi") {
        Some(phi) => SpaceContext::new(parse_matrix(phi)?, tolerance)?,
        None => {
            let dim = field(v, "dim", "context")?.as_u64().ok_or_else(|| malformed("dim"))? as usize;
            SpaceContext::euclidean(dim)?.with_tolerance(tolerance)?
        }
    };
    if let Some(d) = v.get("dim") {
        if d.as_u64() != Some(ctx.dim() as u64) {
            return Err(Error::Context("dim disagrees with phi".into()));
        }
    }
    Ok(ctx)
}

fn parse_kind(v: &Value) -> Result<OperatorKind> {
    serde_json::from_value(v.clone()).map_err(|_| malformed("operator kind"))
}

/// Reads an operator. Without an explicit kind the most specific one that
/// holds is used (self-adjoint, then skew-adjoint, then general).
pub fn parse_operator<S: Scalar>(ctx: &SpaceContext<S>, v: &Value) -> Result<Operator<S>> {
    let (matrix, kind) = match v {
        Value::Array(_) => (parse_matrix(v)?, None),
        Value::Object(o) => {
            let kind = o.get("kind").map(parse_kind).transpose()?;
            (parse_matrix(field(v, "matrix", "operator")?)?, kind)
        }
        _ => return Err(malformed("operator")),
    };
    ctx.check_dim(&matrix)?;
    let kind = kind.unwrap_or_else(|| {
        [OperatorKind::SelfAdjoint, OperatorKind::SkewAdjoint]
            .into_iter()
            .find(|&k| ctx.has_kind(&matrix, k))
            .unwrap_or(OperatorKind::General)
    });
    Operator::new(ctx, matrix, kind)
}

pub fn parse_build(v: &Value) -> Result<Build> {
    serde_json::from_value(v.clone()).map_err(|_| malformed("build (expected \"S\" or \"Lambda\")"))
}

pub fn parse_sign(v: &Value) -> Result<Sign> {
    match v {
        Value::Number(n) => n.as_i64().and_then(|x| Sign::try_from(x as i8).ok()),
        Value::String(s) => match s.trim() {
            "+" | "+1" | "1" => Some(Sign::Plus),
            "-" | "-1" => Some(Sign::Minus),
            _ => None,
        },
        _ => None,
    }
    .ok_or_else(|| malformed("sign"))
}

/// Reads a term. The build defaults to the one matching the operator kind.
pub fn parse_term<S: Scalar>(ctx: &SpaceContext<S>, v: &Value) -> Result<CanonicalTerm<S>> {
    let mut op = parse_operator(ctx, field(v, "operator", "term")?)?;
    let build = match v.get("build") {
        Some(b) => parse_build(b)?,
        None => Build::for_kind(op.kind()),
    };
    // An inferred kind may be ambiguous (the zero matrix is both).
    let wanted = build.canonical_kind();
    if op.kind() != wanted && ctx.has_kind(op.matrix(), wanted) {
        op = Operator::new(ctx, op.matrix().clone(), wanted)?;
    }
    let sign = v.get("sign").map(parse_sign).transpose()?.unwrap_or(Sign::Plus);
    let term = CanonicalTerm::new(build, sign, op)?;
    Ok(match v.get("weight") {
        Some(w) => {
            let w = S::from_json(w)?;
            if w <= S::zero() {
                return Err(Error::Parse("term weight must be positive".into()));
            }
            term.with_weight(w)
        }
        None => term,
    })
}

pub fn parse_tensor<S: Scalar>(ctx: &SpaceContext<S>, v: &Value) -> Result<CurvatureTensor<S>> {
    if let Some(entries) = v.get("entries") {
        if let Some(d) = v.get("dim") {
            if d.as_u64() != Some(ctx.dim() as u64) {
                return Err(Error::Context("tensor dim disagrees with the context".into()));
            }
        }
        return CurvatureTensor::from_entries(ctx, parse_scalars(entries)?);
    }
    if v.get("operator").is_some() {
        return parse_term(ctx, v)?.tensor(ctx);
    }
    Err(malformed("tensor"))
}

/// A term if the value looks like one, otherwise a raw tensor.
pub fn parse_term_or_tensor<S: Scalar>(ctx: &SpaceContext<S>, v: &Value) -> Result<CurvatureTensor<S>> {
    if v.get("entries").is_some() {
        parse_tensor(ctx, v)
    } else {
        parse_term(ctx, v)?.tensor(ctx)
    }
}

/// `{"target"?: tensor, "terms": [term, ..]}` or a bare list of terms.
pub fn parse_decomposition<S: Scalar>(ctx: &SpaceContext<S>, v: &Value) -> Result<Decomposition<S>> {
    let terms = match v {
        Value::Array(items) => items,
        _ => field(v, "terms", "decomposition")?.as_array().ok_or_else(|| malformed("term list"))?,
    };
    let terms = terms.iter().map(|t| parse_term(ctx, t)).collect::<Result<_>>()?;
    let target = v.get("target").map(|t| parse_tensor(ctx, t)).transpose()?;
    Ok(Decomposition::new(target, terms))
}
