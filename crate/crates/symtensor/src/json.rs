use crate::{SymTensor, TensorError};
use combinat::OccupationVector;
use serde::{Deserialize, Serialize};

/// One `(α, value)` pair of the JSON form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymTensorEntry {
    pub alpha: Vec<u32>,
    pub value: f64,
}

/// JSON form `{"n":…, "d":…, "entries":[…]}`; unmentioned entries are zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymTensorJson {
    pub n: u32,
    pub d: usize,
    pub entries: Vec<SymTensorEntry>,
}

impl SymTensorJson {
    /// Validates shapes and rejects duplicate occupation vectors.
    pub fn to_tensor(&self) -> Result<SymTensor, TensorError> {
        let keys: Vec<OccupationVector> =
            self.entries.iter().map(|e| OccupationVector::new(e.alpha.clone())).collect();
        SymTensor::from_entries(
            self.n,
            self.d,
            keys.iter().zip(self.entries.iter().map(|e| e.value)),
        )
        .map_err(|e| match e {
            TensorError::Shape(s) => TensorError::Parse(s),
            other => other,
        })
    }
}
