//! Operator and state dumps: a JSON header describing column-major arrays
//! stored in a companion binary file as little-endian f64, re/im
//! interleaved.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::models::ModelSpec;
use crate::statespace::{HamiltonianOperator, StateVector};
use crate::{Error, Result, C64};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArrayInfo {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
    /// Byte offset of the array in the payload.
    pub offset: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorHeader {
    pub model: String,
    pub params: BTreeMap<String, f64>,
    #[serde(rename = "V")]
    pub sites: usize,
    pub dim: usize,
    /// Unshifted ground energy.
    #[serde(rename = "E0")]
    pub e0: f64,
    pub width: f64,
    pub ground_degeneracy: usize,
    pub anti_degeneracy: usize,
    pub gap_to_next: f64,
    pub arrays: Vec<ArrayInfo>,
}

/// Column-major complex array.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexArray {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<C64>,
}

impl ComplexArray {
    pub fn from_real_columns(name: &str, columns: &[Vec<f64>]) -> Self {
        let rows = columns.first().map_or(0, Vec::len);
        Self {
            name: name.into(),
            rows,
            cols: columns.len(),
            data: columns
                .iter()
                .flat_map(|c| c.iter().map(|&x| C64::new(x, 0.0)))
                .collect(),
        }
    }

    pub fn column(&self, j: usize) -> &[C64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }
}

/// Writes `arrays` to `payload` and returns their descriptors.
pub fn write_arrays(arrays: &[ComplexArray], mut payload: impl Write) -> Result<Vec<ArrayInfo>> {
    let mut offset = 0u64;
    let mut infos = Vec::with_capacity(arrays.len());
    for a in arrays {
        if a.data.len() != a.rows * a.cols {
            return Err(Error::DimensionMismatch {
                expected: a.rows * a.cols,
                found: a.data.len(),
            });
        }
        let mut buf = Vec::with_capacity(16 * a.data.len());
        for z in &a.data {
            buf.extend_from_slice(&z.re.to_le_bytes());
            buf.extend_from_slice(&z.im.to_le_bytes());
        }
        payload.write_all(&buf)?;
        infos.push(ArrayInfo {
            name: a.name.clone(),
            rows: a.rows,
            cols: a.cols,
            offset,
        });
        offset += buf.len() as u64;
    }
    Ok(infos)
}

/// Reads arrays described by `infos` from a payload.
pub fn read_arrays(infos: &[ArrayInfo], mut payload: impl Read) -> Result<Vec<ComplexArray>> {
    let mut bytes = Vec::new();
    payload.read_to_end(&mut bytes)?;
    infos
        .iter()
        .map(|info| {
            let n = info.rows * info.cols;
            let start = info.offset as usize;
            let end = start + 16 * n;
            let chunk = bytes
                .get(start..end)
                .ok_or_else(|| Error::Format(format!("payload too short for `{}`", info.name)))?;
            let data = chunk
                .chunks_exact(16)
                .map(|c| {
                    C64::new(
                        f64::from_le_bytes(c[..8].try_into().unwrap()),
                        f64::from_le_bytes(c[8..].try_into().unwrap()),
                    )
                })
                .collect();
            Ok(ComplexArray {
                name: info.name.clone(),
                rows: info.rows,
                cols: info.cols,
                data,
            })
        })
        .collect()
}

/// Dumps the spectrum (if available) and the ground/anti-ground bases of
/// `h`: the header goes to `header` as JSON and the arrays to `payload`.
pub fn write_operator_dump(
    h: &HamiltonianOperator,
    spec: Option<&ModelSpec>,
    with_spectrum: bool,
    header: impl Write,
    payload: impl Write,
) -> Result<OperatorHeader> {
    let mut arrays = Vec::new();
    if with_spectrum {
        arrays.push(ComplexArray::from_real_columns(
            "spectrum",
            &[h.spectrum()?.energies.clone()],
        ));
    }
    arrays.push(ComplexArray::from_real_columns("ground_basis", &h.ground_space().basis));
    arrays.push(ComplexArray::from_real_columns(
        "anti_ground_basis",
        &h.anti_ground_space().basis,
    ));
    let infos = write_arrays(&arrays, payload)?;
    let head = OperatorHeader {
        model: h.name().to_string(),
        params: spec.map(|s| s.params.clone()).unwrap_or_default(),
        sites: h.sites(),
        dim: h.dim(),
        e0: -h.shift() / h.sign(),
        width: h.width(),
        ground_degeneracy: h.ground_space().degeneracy,
        anti_degeneracy: h.anti_ground_space().degeneracy,
        gap_to_next: h.ground_space().gap_to_next,
        arrays: infos,
    };
    serde_json::to_writer_pretty(header, &head)?;
    Ok(head)
}

/// Dumps states as the columns of one array named `states`.
pub fn write_state_dump(states: &[StateVector], payload: impl Write) -> Result<ArrayInfo> {
    let rows = states.first().map_or(0, StateVector::dim);
    let a = ComplexArray {
        name: "states".into(),
        rows,
        cols: states.len(),
        data: states.iter().flat_map(|s| s.amplitudes().iter().copied()).collect(),
    };
    Ok(write_arrays(&[a], payload)?.remove(0))
}

/// Serializes `value` as one NDJSON line.
pub fn write_ndjson<T: Serialize>(mut w: impl Write, value: &T) -> Result<()> {
    serde_json::to_writer(&mut w, value)?;
    w.write_all(b"\n")?;
    Ok(())
}
