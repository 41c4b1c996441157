//! JSON encodings of states and observables.
//!
//! ```text
//! state:      {"basis_v": B, "basis_w": B, "representation": "tensor"|"fiber",
//!              "amplitudes": [[[re, im], ...], ...]}
//! observable: {"basis": B, "matrix": [[[re, im], ...], ...]}
//! B:          {"dim": d, "order": n, "quad_nodes": m}
//! ```
//!
//! Matrices are row-major. Tensor rows index the first factor's basis;
//! fiber rows index grid points. Decoding errors carry the JSON pointer of
//! the offending field.

use nalgebra::DMatrix;
use serde_json::{json, Map, Value};

use crate::{
    BasisDescriptor, Error, FiberState, HermiteBasis, Observable, Result, TensorState, C64,
};

/// A decoded state file in either representation.
#[derive(Debug, Clone, PartialEq)]
pub enum StateData {
    Tensor(TensorState),
    Fiber(FiberState),
}

impl StateData {
    pub fn representation(&self) -> &'static str {
        match self {
            StateData::Tensor(_) => "tensor",
            StateData::Fiber(_) => "fiber",
        }
    }

    pub fn basis_v(&self) -> &HermiteBasis {
        match self {
            StateData::Tensor(s) => s.basis_v(),
            StateData::Fiber(f) => f.basis_v(),
        }
    }

    pub fn basis_w(&self) -> &HermiteBasis {
        match self {
            StateData::Tensor(s) => s.basis_w(),
            StateData::Fiber(f) => f.basis_w(),
        }
    }

    /// The tensor form, converting a fiber by projection.
    pub fn to_tensor(&self) -> TensorState {
        match self {
            StateData::Tensor(s) => s.clone(),
            StateData::Fiber(f) => crate::from_fiber(f),
        }
    }

    pub fn amplitudes(&self) -> &DMatrix<C64> {
        match self {
            StateData::Tensor(s) => s.amplitudes(),
            StateData::Fiber(f) => f.values(),
        }
    }
}

pub fn descriptor_to_json(d: BasisDescriptor) -> Value {
    json!({"dim": d.dim, "order": d.order, "quad_nodes": d.quad_nodes})
}

pub fn matrix_to_json(m: &DMatrix<C64>) -> Value {
    Value::Array(
        m.row_iter()
            .map(|row| Value::Array(row.iter().map(|z| json!([z.re, z.im])).collect()))
            .collect(),
    )
}

pub fn state_to_json(s: &StateData) -> Value {
    let mut obj = Map::new();
    obj.insert(
        "basis_v".into(),
        descriptor_to_json(s.basis_v().descriptor()),
    );
    obj.insert(
        "basis_w".into(),
        descriptor_to_json(s.basis_w().descriptor()),
    );
    obj.insert("representation".into(), Value::from(s.representation()));
    obj.insert("amplitudes".into(), matrix_to_json(s.amplitudes()));
    Value::Object(obj)
}

pub fn observable_to_json(q: &Observable) -> Value {
    let mut obj = Map::new();
    obj.insert("basis".into(), descriptor_to_json(q.basis().descriptor()));
    obj.insert("matrix".into(), matrix_to_json(q.matrix()));
    Value::Object(obj)
}

/// Parse JSON text; syntax errors are reported at the document root.
pub fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::schema("", format!("invalid JSON: {e}")))
}

fn field<'a>(v: &'a Value, ptr: &str, key: &str) -> Result<&'a Value> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::schema(ptr, "expected an object"))?;
    obj.get(key)
        .ok_or_else(|| Error::schema(format!("{ptr}/{key}"), "missing field"))
}

fn parse_basis(v: &Value, ptr: &str) -> Result<HermiteBasis> {
    let mut dims = [0usize; 3];
    for (slot, key) in dims.iter_mut().zip(["dim", "order", "quad_nodes"]) {
        let x = field(v, ptr, key)?;
        *slot = x
            .as_u64()
            .and_then(|n| usize::try_from(n).ok())
            .ok_or_else(|| {
                Error::schema(format!("{ptr}/{key}"), "expected a nonnegative integer")
            })?;
    }
    HermiteBasis::new(dims[0], dims[1], dims[2]).map_err(|e| Error::schema(ptr, e.to_string()))
}

fn parse_matrix(v: &Value, ptr: &str, rows: usize, cols: usize) -> Result<DMatrix<C64>> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::schema(ptr, "expected an array of rows"))?;
    if arr.len() != rows {
        return Err(Error::schema(
            ptr,
            format!("expected {rows} rows, found {}", arr.len()),
        ));
    }
    let mut m = DMatrix::zeros(rows, cols);
    for (r, row) in arr.iter().enumerate() {
        let rp = format!("{ptr}/{r}");
        let row = row
            .as_array()
            .ok_or_else(|| Error::schema(&rp, "expected an array of [re, im] pairs"))?;
        if row.len() != cols {
            return Err(Error::schema(
                &rp,
                format!("expected {cols} entries, found {}", row.len()),
            ));
        }
        for (c, z) in row.iter().enumerate() {
            let zp = format!("{rp}/{c}");
            let pair = z
                .as_array()
                .filter(|p| p.len() == 2)
                .ok_or_else(|| Error::schema(&zp, "expected a [re, im] pair"))?;
            let mut parts = [0.0; 2];
            for (k, x) in pair.iter().enumerate() {
                parts[k] = x.as_f64().filter(|x| x.is_finite()).ok_or_else(|| {
                    Error::schema(format!("{zp}/{k}"), "expected a finite number")
                })?;
            }
            m[(r, c)] = C64::new(parts[0], parts[1]);
        }
    }
    Ok(m)
}

pub fn state_from_json(v: &Value) -> Result<StateData> {
    let basis_v = parse_basis(field(v, "", "basis_v")?, "/basis_v")?;
    let basis_w = parse_basis(field(v, "", "basis_w")?, "/basis_w")?;
    let repr = field(v, "", "representation")?
        .as_str()
        .ok_or_else(|| Error::schema("/representation", "expected a string"))?;
    let amps = field(v, "", "amplitudes")?;
    match repr {
        "tensor" => {
            let m = parse_matrix(amps, "/amplitudes", basis_v.size(), basis_w.size())?;
            Ok(StateData::Tensor(TensorState::new(&basis_v, &basis_w, m)?))
        }
        "fiber" => {
            let m = parse_matrix(amps, "/amplitudes", basis_v.num_points(), basis_w.size())?;
            Ok(StateData::Fiber(FiberState::new(&basis_v, &basis_w, m)?))
        }
        other => Err(Error::schema(
            "/representation",
            format!("expected \"tensor\" or \"fiber\", found {other:?}"),
        )),
    }
}

pub fn observable_from_json(v: &Value) -> Result<Observable> {
    let basis = parse_basis(field(v, "", "basis")?, "/basis")?;
    let m = parse_matrix(
        field(v, "", "matrix")?,
        "/matrix",
        basis.size(),
        basis.size(),
    )?;
    Observable::new(&basis, m).map_err(|e| Error::schema("/matrix", e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::to_fiber;

    fn pointer_of(e: Error) -> String {
        match e {
            Error::Schema { pointer, .. } => pointer,
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn state_round_trip() {
        let b = HermiteBasis::new(1, 3, 6).unwrap();
        let s = TensorState::random(&b, &b, 1, None).unwrap();
        for data in [StateData::Tensor(s.clone()), StateData::Fiber(to_fiber(&s))] {
            let text = serde_json::to_string(&state_to_json(&data)).unwrap();
            let back = state_from_json(&parse_json(&text).unwrap()).unwrap();
            assert_eq!(back, data);
        }
    }

    #[test]
    fn observable_round_trip() {
        let b = HermiteBasis::new(1, 3, 6).unwrap();
        let q = Observable::random(&b, 3);
        let back = observable_from_json(&observable_to_json(&q)).unwrap();
        assert_eq!(back, q);
    }

    #[test]
    fn schema_errors_name_the_field() {
        let b = HermiteBasis::new(1, 2, 4).unwrap();
        let s = TensorState::random(&b, &b, 1, None).unwrap();
        let good = state_to_json(&StateData::Fiber(to_fiber(&s)));

        let mut v = good.clone();
        v["amplitudes"].as_array_mut().unwrap().pop();
        assert_eq!(pointer_of(state_from_json(&v).unwrap_err()), "/amplitudes");

        let mut v = good.clone();
        v["amplitudes"][1][0] = json!([1.0, "x"]);
        assert_eq!(
            pointer_of(state_from_json(&v).unwrap_err()),
            "/amplitudes/1/0/1"
        );

        let mut v = good.clone();
        v["basis_w"]["quad_nodes"] = json!(1);
        assert_eq!(pointer_of(state_from_json(&v).unwrap_err()), "/basis_w");

        let mut v = good.clone();
        v.as_object_mut().unwrap().remove("representation");
        assert_eq!(
            pointer_of(state_from_json(&v).unwrap_err()),
            "/representation"
        );

        let mut v = good;
        v["representation"] = json!("dense");
        assert_eq!(
            pointer_of(state_from_json(&v).unwrap_err()),
            "/representation"
        );

        assert_eq!(pointer_of(parse_json("{").unwrap_err()), "");

        let mut q = observable_to_json(&Observable::identity(&b));
        q["matrix"][0][1] = json!([0.5, 0.0]);
        assert_eq!(pointer_of(observable_from_json(&q).unwrap_err()), "/matrix");
    }
}
