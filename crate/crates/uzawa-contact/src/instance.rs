//! Instance file format: a JSON document
//!
//! ```json
//! { "d": 2, "m": 1, "K": [..d*d row-major..], "p": [..d..],
//!   "N": [..m*d row-major..], "h": [..m..], "meta": { } }
//! ```
//!
//! Reals are serialized with shortest round-trip precision, so an
//! export/import round trip reproduces every matrix bit for bit.

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, SymMatrix};
use crate::problem::ContactQp;
use serde::{Deserialize, Serialize};

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    d: usize,
    m: usize,
    #[serde(rename = "K")]
    stiffness: Vec<f64>,
    p: Vec<f64>,
    #[serde(rename = "N")]
    constraint: Vec<f64>,
    h: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    meta: Option<serde_json::Value>,
}

/// Serializes an instance to the JSON document above.
pub fn to_json(qp: &ContactQp, meta: Option<serde_json::Value>) -> String {
    let file = InstanceFile {
        d: qp.dim(),
        m: qp.ncon(),
        stiffness: qp.stiffness().as_slice().to_vec(),
        p: qp.load().to_vec(),
        constraint: qp.constraint_matrix().as_slice().to_vec(),
        h: qp.gap_offset().to_vec(),
        meta,
    };
    serde_json::to_string_pretty(&file).expect("instance serialization cannot fail")
}

/// Parses an instance document, checking every array length against the
/// declared `d` and `m`.
pub fn from_json(text: &str) -> Result<(ContactQp, Option<serde_json::Value>)> {
    let file: InstanceFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if file.d == 0 || file.m == 0 {
        return Err(Error::Parse("d and m must be at least 1".into()));
    }
    let check = |name: &str, got: usize, want: usize| -> Result<()> {
        if got != want {
            return Err(Error::Parse(format!(
                "field `{name}` has {got} entries, expected {want}"
            )));
        }
        Ok(())
    };
    check("K", file.stiffness.len(), file.d * file.d)?;
    check("p", file.p.len(), file.d)?;
    check("N", file.constraint.len(), file.m * file.d)?;
    check("h", file.h.len(), file.m)?;

    let k = SymMatrix::from_row_major(file.d, file.stiffness)?;
    let n = DenseMatrix::from_row_major(file.m, file.d, file.constraint)?;
    let qp = ContactQp::new(k, file.p, n, file.h)?;
    Ok((qp, file.meta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::{build_benchmark, paper_spec};

    #[test]
    fn round_trip_preserves_instance() {
        let qp = build_benchmark(&paper_spec(3).unwrap()).unwrap();
        let json = to_json(&qp, None);
        let (back, meta) = from_json(&json).unwrap();
        assert!(meta.is_none());
        assert_eq!(back.dim(), 12);
        assert_eq!(back.ncon(), 3);
        assert_eq!(back.stiffness().as_slice(), qp.stiffness().as_slice());
        assert_eq!(back.load(), qp.load());
        assert_eq!(
            back.constraint_matrix().as_slice(),
            qp.constraint_matrix().as_slice()
        );
        assert_eq!(back.gap_offset(), qp.gap_offset());
    }

    #[test]
    fn missing_field_names_the_field() {
        let text = r#"{"d":1,"m":1,"K":[2.0],"p":[4.0],"N":[1.0]}"#;
        match from_json(text) {
            Err(Error::Parse(msg)) => assert!(msg.contains('h'), "message: {msg}"),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn length_mismatch_is_reported() {
        let text = r#"{"d":2,"m":1,"K":[1.0,0.0,0.0,1.0],"p":[1.0],"N":[1.0,0.0],"h":[0.0]}"#;
        match from_json(text) {
            Err(Error::Parse(msg)) => assert!(msg.contains("`p`"), "message: {msg}"),
            other => panic!("expected parse error, got {other:?}"),
        }
    }
}
