//! State JSON format: `{"dim": 2|4, "entries": [[re, im], ...]}` row-major,
//! written with 17 significant digits.

use num_complex::Complex64;
use serde_json::Value;

use crate::error::Error;
use crate::matrix::ComplexMatrix;
use crate::states::{QubitState, TwoQubitState};

/// Serializes a matrix to the state JSON format.
pub fn matrix_to_json(m: &ComplexMatrix<f64>) -> String {
    let mut out = String::new();
    out.push_str(&format!("{{\n  \"dim\": {},\n  \"entries\": [\n", m.dim()));
    let n = m.dim() * m.dim();
    for (idx, e) in m.entries().iter().enumerate() {
        let sep = if idx + 1 < n { "," } else { "" };
        out.push_str(&format!("    [{:.16e}, {:.16e}]{}\n", e.re, e.im, sep));
    }
    out.push_str("  ]\n}\n");
    out
}

fn number(v: &Value, what: &str) -> Result<f64, Error> {
    v.as_f64()
        .ok_or_else(|| Error::Format(format!("{what} is not a number")))
}

/// Parses the state JSON format into a raw matrix (no density validation).
pub fn matrix_from_json(text: &str) -> Result<ComplexMatrix<f64>, Error> {
    let v: Value =
        serde_json::from_str(text).map_err(|e| Error::Format(format!("invalid JSON: {e}")))?;
    let dim = v
        .get("dim")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::Format("missing integer field `dim`".into()))? as usize;
    if dim != 2 && dim != 4 {
        return Err(Error::Format(format!("dim must be 2 or 4, got {dim}")));
    }
    let entries = v
        .get("entries")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Format("missing array field `entries`".into()))?;
    if entries.len() != dim * dim {
        return Err(Error::Format(format!(
            "expected {} entries, got {}",
            dim * dim,
            entries.len()
        )));
    }
    let mut data = Vec::with_capacity(entries.len());
    for (i, e) in entries.iter().enumerate() {
        let pair = e
            .as_array()
            .filter(|p| p.len() == 2)
            .ok_or_else(|| Error::Format(format!("entry {i} is not a [re, im] pair")))?;
        let re = number(&pair[0], "real part")?;
        let im = number(&pair[1], "imaginary part")?;
        if !re.is_finite() || !im.is_finite() {
            return Err(Error::Format(format!("entry {i} is not finite")));
        }
        data.push(Complex64::new(re, im));
    }
    Ok(ComplexMatrix::from_row_major(dim, &data))
}

/// Parses and validates a two-qubit state file.
pub fn two_qubit_state_from_json(text: &str) -> Result<TwoQubitState<f64>, Error> {
    TwoQubitState::new(matrix_from_json(text)?)
}

/// Parses a separable-decomposition file: a JSON array of
/// `{"weight": p, "alice": <state>, "bob": <state>}` objects with 2x2 states.
pub fn components_from_json(
    text: &str,
) -> Result<Vec<(f64, QubitState<f64>, QubitState<f64>)>, Error> {
    let v: Value =
        serde_json::from_str(text).map_err(|e| Error::Format(format!("invalid JSON: {e}")))?;
    let arr = v
        .as_array()
        .ok_or_else(|| Error::Format("expected a JSON array of components".into()))?;
    let mut out = Vec::with_capacity(arr.len());
    for (i, comp) in arr.iter().enumerate() {
        let weight = comp
            .get("weight")
            .and_then(Value::as_f64)
            .ok_or_else(|| Error::Format(format!("component {i}: missing `weight`")))?;
        let parse_side = |key: &str| -> Result<QubitState<f64>, Error> {
            let side = comp
                .get(key)
                .ok_or_else(|| Error::Format(format!("component {i}: missing `{key}`")))?;
            QubitState::new(matrix_from_json(&side.to_string())?)
        };
        out.push((weight, parse_side("alice")?, parse_side("bob")?));
    }
    Ok(out)
}
