//! JSON encoding of geometries, braidings, curvature data and J^{(n)}.
//!
//! Complex numbers are `[re, im]`, matrices are row-major nested arrays and a
//! rank-r central tensor is an r-fold nested array indexed upper indices
//! first.

use std::path::Path;

use serde_json::{json, Map, Value};

use crate::braiding::{sigma_from_tau, Braiding};
use crate::calculus::FrameGeometry;
use crate::connection::CurvatureData;
use crate::error::{Error, Result};
use crate::fixtures::Fixture;
use crate::frametensor::{pow, unflatten, CentralTensor};
use crate::matalg::{AlgebraElement, C64};

/// A parsed input file.
#[derive(Clone, Debug)]
pub enum Input {
    Geometry(Box<FrameGeometry>),
    /// `{ "n", "S" }` with no calculus data.
    Braiding(Braiding),
}

impl Input {
    pub fn braiding(&self) -> Result<Braiding> {
        match self {
            Input::Geometry(g) => Braiding::new(g.s.clone()),
            Input::Braiding(b) => Ok(b.clone()),
        }
    }

    pub fn geometry(&self) -> Option<&FrameGeometry> {
        match self {
            Input::Geometry(g) => Some(g),
            Input::Braiding(_) => None,
        }
    }
}

pub fn complex_to_value(z: C64) -> Value {
    json!([z.re, z.im])
}

fn parse_err(ctx: &str, what: &str) -> Error {
    Error::Parse(format!("{ctx}: {what}"))
}

pub fn value_to_complex(v: &Value, ctx: &str) -> Result<C64> {
    let arr = v.as_array().ok_or_else(|| parse_err(ctx, "expected [re, im]"))?;
    if arr.len() != 2 {
        return Err(parse_err(ctx, "expected [re, im]"));
    }
    let re = arr[0].as_f64().ok_or_else(|| parse_err(ctx, "real part is not a number"))?;
    let im = arr[1].as_f64().ok_or_else(|| parse_err(ctx, "imaginary part is not a number"))?;
    Ok(C64::new(re, im))
}

pub fn matrix_to_value(a: &AlgebraElement) -> Value {
    let n = a.dim();
    Value::Array(
        (0..n)
            .map(|r| Value::Array((0..n).map(|c| complex_to_value(a.entry(r, c))).collect()))
            .collect(),
    )
}

pub fn value_to_matrix(v: &Value, dim: usize, ctx: &str) -> Result<AlgebraElement> {
    let rows = v.as_array().ok_or_else(|| parse_err(ctx, "expected a matrix"))?;
    if rows.len() != dim {
        return Err(parse_err(ctx, &format!("expected {dim} rows, got {}", rows.len())));
    }
    let mut parsed = Vec::with_capacity(dim);
    for (r, row) in rows.iter().enumerate() {
        let cols = row.as_array().ok_or_else(|| parse_err(ctx, "expected a matrix row"))?;
        if cols.len() != dim {
            return Err(parse_err(ctx, &format!("row {r} has {} entries, expected {dim}", cols.len())));
        }
        parsed.push(
            cols.iter()
                .map(|z| value_to_complex(z, ctx))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    Ok(AlgebraElement::from_rows(&parsed))
}

/// Nested array of depth `depth` over `n`, leaves produced by `leaf(flat)`.
fn nest(n: usize, depth: usize, leaf: &mut dyn FnMut(usize) -> Value) -> Value {
    fn go(n: usize, depth: usize, prefix: usize, leaf: &mut dyn FnMut(usize) -> Value) -> Value {
        if depth == 0 {
            return leaf(prefix);
        }
        Value::Array((0..n).map(|i| go(n, depth - 1, prefix * n + i, leaf)).collect())
    }
    go(n, depth, 0, leaf)
}

/// Collects the leaves of a nested array of depth `depth` and width `n`.
fn unnest<'a>(v: &'a Value, n: usize, depth: usize, ctx: &str) -> Result<Vec<&'a Value>> {
    let mut out = Vec::with_capacity(pow(n, depth));
    fn go<'a>(v: &'a Value, n: usize, depth: usize, ctx: &str, out: &mut Vec<&'a Value>) -> Result<()> {
        if depth == 0 {
            out.push(v);
            return Ok(());
        }
        let arr = v.as_array().ok_or_else(|| parse_err(ctx, "expected a nested array"))?;
        if arr.len() != n {
            return Err(parse_err(ctx, &format!("expected {n} entries per axis, got {}", arr.len())));
        }
        for x in arr {
            go(x, n, depth - 1, ctx, out)?;
        }
        Ok(())
    }
    go(v, n, depth, ctx, &mut out)?;
    Ok(out)
}

pub fn tensor_to_value(t: &CentralTensor) -> Value {
    nest(t.n(), t.rank(), &mut |flat| complex_to_value(t.data()[flat]))
}

/// A leaf that is itself a matrix is a noncentral entry and is reported under
/// `central_name`.
pub fn value_to_tensor(v: &Value, n: usize, rank: usize, ctx: &str, central_name: &'static str) -> Result<CentralTensor> {
    let leaves = unnest(v, n, rank, ctx)?;
    let mut data = Vec::with_capacity(leaves.len());
    for (flat, leaf) in leaves.into_iter().enumerate() {
        let is_matrix = leaf
            .as_array()
            .and_then(|a| a.first())
            .is_some_and(|x| x.as_array().is_some_and(|r| r.first().is_some_and(Value::is_array)));
        if is_matrix {
            return Err(Error::Invariant {
                name: central_name,
                detail: format!("{ctx} entry {:?} is a matrix, central tensors need complex entries", unflatten(flat, n, rank)),
            });
        }
        data.push(value_to_complex(leaf, ctx)?);
    }
    CentralTensor::from_data(n, rank, data)
}

pub fn geometry_to_value(g: &FrameGeometry) -> Value {
    let mut m = Map::new();
    m.insert("matrix_dim".into(), json!(g.dim));
    m.insert("frame_dim".into(), json!(g.n));
    m.insert("lambda".into(), Value::Array(g.lambda.iter().map(matrix_to_value).collect()));
    m.insert("P".into(), tensor_to_value(&g.p));
    m.insert("S".into(), tensor_to_value(&g.s));
    if let Some(t) = &g.tau {
        m.insert("tau".into(), tensor_to_value(t));
    }
    m.insert("F".into(), tensor_to_value(&g.f));
    m.insert("K".into(), tensor_to_value(&g.k));
    if let Some(metric) = &g.metric {
        m.insert("metric".into(), tensor_to_value(metric));
    }
    if let Some(w) = &g.omega {
        m.insert("omega".into(), nest(g.n, 3, &mut |flat| matrix_to_value(&w[flat])));
    }
    if let Some(c) = &g.chi {
        m.insert("chi".into(), tensor_to_value(c));
    }
    Value::Object(m)
}

pub fn braiding_to_value(b: &Braiding) -> Value {
    json!({ "n": b.n(), "S": tensor_to_value(b.s()) })
}

fn get_usize(obj: &Map<String, Value>, key: &str) -> Result<usize> {
    let v = obj.get(key).ok_or_else(|| parse_err(key, "missing"))?;
    let x = v.as_u64().ok_or_else(|| parse_err(key, "expected a positive integer"))?;
    if x == 0 {
        return Err(parse_err(key, "must be positive"));
    }
    Ok(x as usize)
}

fn optional_tensor(
    obj: &Map<String, Value>,
    key: &str,
    n: usize,
    rank: usize,
    central_name: &'static str,
) -> Result<Option<CentralTensor>> {
    obj.get(key)
        .filter(|v| !v.is_null())
        .map(|v| value_to_tensor(v, n, rank, key, central_name))
        .transpose()
}

/// Parses a geometry without validating its invariants.
pub fn value_to_geometry(v: &Value) -> Result<FrameGeometry> {
    let obj = v.as_object().ok_or_else(|| parse_err("geometry", "expected a JSON object"))?;
    let dim = get_usize(obj, "matrix_dim")?;
    let n = get_usize(obj, "frame_dim")?;
    let lambda_v = obj
        .get("lambda")
        .and_then(Value::as_array)
        .ok_or_else(|| parse_err("lambda", "expected an array of matrices"))?;
    if lambda_v.len() != n {
        return Err(parse_err("lambda", &format!("expected {n} matrices, got {}", lambda_v.len())));
    }
    let lambda = lambda_v
        .iter()
        .enumerate()
        .map(|(a, m)| value_to_matrix(m, dim, &format!("lambda[{a}]")))
        .collect::<Result<Vec<_>>>()?;
    let p = optional_tensor(obj, "P", n, 4, "P_central")?.ok_or_else(|| parse_err("P", "missing"))?;
    let tau = optional_tensor(obj, "tau", n, 4, "tau_central")?;
    let s = match (optional_tensor(obj, "S", n, 4, "S_central")?, &tau) {
        (Some(s), _) => s,
        (None, Some(t)) => sigma_from_tau(t, &p)?.s().clone(),
        (None, None) => return Err(parse_err("S", "one of \"S\" or \"tau\" is required")),
    };
    let f = optional_tensor(obj, "F", n, 3, "F_central")?.unwrap_or_else(|| CentralTensor::zeros(n, 3));
    let k = optional_tensor(obj, "K", n, 2, "K_central")?.unwrap_or_else(|| CentralTensor::zeros(n, 2));
    let metric = optional_tensor(obj, "metric", n, 2, "metric_central")?;
    let chi = optional_tensor(obj, "chi", n, 3, "chi_central")?;
    let omega = match obj.get("omega").filter(|v| !v.is_null()) {
        Some(w) => Some(
            unnest(w, n, 3, "omega")?
                .into_iter()
                .enumerate()
                .map(|(flat, m)| value_to_matrix(m, dim, &format!("omega{:?}", unflatten(flat, n, 3))))
                .collect::<Result<Vec<_>>>()?,
        ),
        None => None,
    };
    Ok(FrameGeometry {
        dim,
        n,
        lambda,
        p,
        s,
        tau,
        f,
        k,
        metric,
        omega,
        chi,
    })
}

/// Parses and validates a geometry or braiding-only file.
pub fn parse_input(text: &str, tol: f64) -> Result<Input> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let obj = v.as_object().ok_or_else(|| parse_err("input", "expected a JSON object"))?;
    if obj.contains_key("lambda") || obj.contains_key("matrix_dim") {
        let g = value_to_geometry(&v)?;
        g.validate(tol)?;
        return Ok(Input::Geometry(Box::new(g)));
    }
    let n = get_usize(obj, "n")?;
    let s = optional_tensor(obj, "S", n, 4, "S_central")?.ok_or_else(|| parse_err("S", "missing"))?;
    Ok(Input::Braiding(Braiding::new(s)?))
}

pub fn load_input(path: &Path, tol: f64) -> Result<Input> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    parse_input(&text, tol)
}

/// Loads a file that must hold a full geometry.
pub fn load_geometry(path: &Path, tol: f64) -> Result<FrameGeometry> {
    match load_input(path, tol)? {
        Input::Geometry(g) => Ok(*g),
        Input::Braiding(_) => Err(Error::Parse(format!("{}: expected a geometry, found a braiding-only file", path.display()))),
    }
}

pub fn to_pretty_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

pub fn curvature_to_value(c: &CurvatureData) -> Value {
    let n = c.n;
    json!({
        "R": nest(n, 4, &mut |flat| matrix_to_value(&c.r[flat])),
        "Ricci": c.ricci.as_ref().map(|r| nest(n, 2, &mut |flat| matrix_to_value(&r[flat]))),
        "centrality_residual": c.centrality_residual,
    })
}

pub fn fixture_to_value(f: &Fixture) -> Value {
    match f {
        Fixture::Geometry(g) => geometry_to_value(g),
        Fixture::Braiding(b) => braiding_to_value(b),
    }
}

pub fn jn_to_value(order: usize, j: &CentralTensor) -> Value {
    json!({ "order": order, "n": j.n(), "J": tensor_to_value(j) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{su2_flip_geometry, su2_torsionfree_connection};

    #[test]
    fn geometry_round_trip_is_exact() {
        let (g, _) = su2_torsionfree_connection();
        let text = to_pretty_json(&geometry_to_value(&g));
        let back = match parse_input(&text, 1e-9).unwrap() {
            Input::Geometry(b) => *b,
            Input::Braiding(_) => panic!("expected geometry"),
        };
        assert_eq!(back, g);
        assert_eq!(to_pretty_json(&geometry_to_value(&back)), text);
    }

    #[test]
    fn omega_round_trip() {
        let mut g = su2_flip_geometry();
        g.omega = Some(g.lambda.iter().cycle().take(27).cloned().collect());
        let v = geometry_to_value(&g);
        assert_eq!(value_to_geometry(&v).unwrap(), g);
    }

    #[test]
    fn rejects_noncentral_and_malformed() {
        let mut v = geometry_to_value(&su2_flip_geometry());
        v["F"][0][0][0] = json!([[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]);
        assert!(matches!(
            value_to_geometry(&v),
            Err(Error::Invariant { name: "F_central", .. })
        ));
        assert!(matches!(parse_input("{not json", 1e-9), Err(Error::Parse(_))));
        assert!(matches!(parse_input("{\"matrix_dim\": 2}", 1e-9), Err(Error::Parse(_))));
    }

    #[test]
    fn tau_is_resolved() {
        let mut v = geometry_to_value(&su2_flip_geometry());
        let obj = v.as_object_mut().unwrap();
        obj.remove("S");
        let two = CentralTensor::identity(3, 2).scale(C64::new(2.0, 0.0));
        obj.insert("tau".into(), tensor_to_value(&two));
        let g = value_to_geometry(&v).unwrap();
        assert_eq!(g.s, CentralTensor::flip(3));
    }

    #[test]
    fn braiding_files() {
        let b = Braiding::flip(2);
        let text = to_pretty_json(&braiding_to_value(&b));
        match parse_input(&text, 1e-9).unwrap() {
            Input::Braiding(back) => assert_eq!(back.s(), b.s()),
            Input::Geometry(_) => panic!("expected braiding"),
        }
    }
}
