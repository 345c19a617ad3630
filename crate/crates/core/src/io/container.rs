//! `TLT1` binary tensor container.
//!
//! Layout: magic `TLT1`, a `u8` order `N` in `2..=8`, `N` little-endian `u64`
//! dims, a `u8` dtype code, then the entries in column-major order, little-endian.

use std::path::Path;

use num_complex::Complex64;

use crate::completion::ObservationMask;
use crate::error::{Error, Result};
use crate::tensor::{ComplexTensor, DenseTensor, RealTensor};

pub const MAGIC: &[u8; 4] = b"TLT1";
pub const MIN_ORDER: usize = 2;
pub const MAX_ORDER: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u8)]
pub enum Dtype {
    Float64 = 0,
    Float32 = 1,
    Complex128 = 2,
    Bool = 3,
}

impl Dtype {
    fn from_code(code: u8) -> Option<Self> {
        Some(match code {
            0 => Dtype::Float64,
            1 => Dtype::Float32,
            2 => Dtype::Complex128,
            3 => Dtype::Bool,
            _ => return None,
        })
    }

    pub fn size(self) -> usize {
        match self {
            Dtype::Float64 => 8,
            Dtype::Float32 => 4,
            Dtype::Complex128 => 16,
            Dtype::Bool => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TensorData {
    Float64(RealTensor),
    Float32(DenseTensor<f32>),
    Complex128(ComplexTensor),
    Mask(DenseTensor<bool>),
}

impl TensorData {
    pub fn dims(&self) -> &[usize] {
        match self {
            TensorData::Float64(t) => t.dims(),
            TensorData::Float32(t) => t.dims(),
            TensorData::Complex128(t) => t.dims(),
            TensorData::Mask(t) => t.dims(),
        }
    }

    pub fn dtype(&self) -> Dtype {
        match self {
            TensorData::Float64(_) => Dtype::Float64,
            TensorData::Float32(_) => Dtype::Float32,
            TensorData::Complex128(_) => Dtype::Complex128,
            TensorData::Mask(_) => Dtype::Bool,
        }
    }

    /// Real data as float64; float32 is widened, masks become 0/1.
    pub fn into_real(self) -> Result<RealTensor> {
        match self {
            TensorData::Float64(t) => Ok(t),
            TensorData::Float32(t) => Ok(t.map(|&v| f64::from(v))),
            TensorData::Mask(t) => Ok(t.map(|&b| if b { 1.0 } else { 0.0 })),
            TensorData::Complex128(_) => Err(Error::Parameter(
                "expected real data, container holds complex128".into(),
            )),
        }
    }
}

pub fn encode(data: &TensorData) -> Result<Vec<u8>> {
    let dims = data.dims();
    if !(MIN_ORDER..=MAX_ORDER).contains(&dims.len()) {
        return Err(Error::InvalidDims {
            dims: dims.to_vec(),
            reason: format!("container order must lie in {MIN_ORDER}..={MAX_ORDER}"),
        });
    }
    let n: usize = dims.iter().product();
    let mut out = Vec::with_capacity(6 + 8 * dims.len() + n * data.dtype().size());
    out.extend_from_slice(MAGIC);
    out.push(dims.len() as u8);
    for &d in dims {
        out.extend_from_slice(&(d as u64).to_le_bytes());
    }
    out.push(data.dtype() as u8);
    match data {
        TensorData::Float64(t) => t.as_slice().iter().for_each(|v| out.extend_from_slice(&v.to_le_bytes())),
        TensorData::Float32(t) => t.as_slice().iter().for_each(|v| out.extend_from_slice(&v.to_le_bytes())),
        TensorData::Complex128(t) => t.as_slice().iter().for_each(|z| {
            out.extend_from_slice(&z.re.to_le_bytes());
            out.extend_from_slice(&z.im.to_le_bytes());
        }),
        TensorData::Mask(t) => out.extend(t.as_slice().iter().map(|&b| u8::from(b))),
    }
    Ok(out)
}

fn take<'a>(bytes: &'a [u8], pos: &mut usize, len: usize, what: &str) -> Result<&'a [u8]> {
    let end = pos.checked_add(len).filter(|&e| e <= bytes.len()).ok_or_else(|| {
        Error::format(
            *pos as u64,
            format!("truncated {what}: need {len} bytes, {} remain", bytes.len().saturating_sub(*pos)),
        )
    })?;
    let s = &bytes[*pos..end];
    *pos = end;
    Ok(s)
}

pub fn decode(bytes: &[u8]) -> Result<TensorData> {
    let mut pos = 0;
    let magic = take(bytes, &mut pos, 4, "magic")?;
    if magic != MAGIC {
        return Err(Error::format(0, format!("bad magic {magic:?}, expected \"TLT1\"")));
    }
    let order = take(bytes, &mut pos, 1, "order")?[0] as usize;
    if !(MIN_ORDER..=MAX_ORDER).contains(&order) {
        return Err(Error::format(4, format!("order {order} outside {MIN_ORDER}..={MAX_ORDER}")));
    }
    let dims_at = pos;
    let mut dims = Vec::with_capacity(order);
    for _ in 0..order {
        let raw = u64::from_le_bytes(take(bytes, &mut pos, 8, "dims")?.try_into().expect("8 bytes"));
        let d = usize::try_from(raw)
            .ok()
            .filter(|&d| d > 0)
            .ok_or_else(|| Error::format((pos - 8) as u64, format!("invalid dimension {raw}")))?;
        dims.push(d);
    }
    let code_at = pos as u64;
    let code = take(bytes, &mut pos, 1, "dtype")?[0];
    let dtype = Dtype::from_code(code).ok_or_else(|| Error::format(code_at, format!("unsupported dtype code {code}")))?;
    let n = dims
        .iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .and_then(|n| n.checked_mul(dtype.size()).map(|b| (n, b)));
    let Some((n, payload_len)) = n else {
        return Err(Error::format(dims_at as u64, format!("dims {dims:?} overflow")));
    };
    let payload_at = pos;
    let actual = bytes.len() - payload_at;
    if actual != payload_len {
        return Err(Error::format(
            payload_at as u64,
            format!("payload of {dims:?} {dtype:?} needs {payload_len} bytes, file has {actual}"),
        ));
    }
    let payload = &bytes[payload_at..];
    let shape_err = |e: Error| Error::format(dims_at as u64, e.to_string());
    Ok(match dtype {
        Dtype::Float64 => TensorData::Float64(
            DenseTensor::new(
                dims,
                payload.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect(),
            )
            .map_err(shape_err)?,
        ),
        Dtype::Float32 => TensorData::Float32(
            DenseTensor::new(
                dims,
                payload.chunks_exact(4).map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes"))).collect(),
            )
            .map_err(shape_err)?,
        ),
        Dtype::Complex128 => TensorData::Complex128(
            DenseTensor::new(
                dims,
                payload
                    .chunks_exact(16)
                    .map(|c| {
                        Complex64::new(
                            f64::from_le_bytes(c[..8].try_into().expect("8 bytes")),
                            f64::from_le_bytes(c[8..].try_into().expect("8 bytes")),
                        )
                    })
                    .collect(),
            )
            .map_err(shape_err)?,
        ),
        Dtype::Bool => {
            let mut data = Vec::with_capacity(n);
            for (i, &b) in payload.iter().enumerate() {
                match b {
                    0 => data.push(false),
                    1 => data.push(true),
                    _ => {
                        return Err(Error::format(
                            (payload_at + i) as u64,
                            format!("mask byte {b} is neither 0 nor 1"),
                        ))
                    }
                }
            }
            TensorData::Mask(DenseTensor::new(dims, data).map_err(shape_err)?)
        }
    })
}

pub fn read_container(path: impl AsRef<Path>) -> Result<TensorData> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&bytes)
}

pub fn write_container(path: impl AsRef<Path>, data: &TensorData) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, encode(data)?).map_err(|e| Error::io(path, e))
}

/// Reads a real tensor (float64, or float32 widened).
pub fn read_real(path: impl AsRef<Path>) -> Result<RealTensor> {
    match read_container(path)? {
        TensorData::Mask(_) => Err(Error::Parameter("expected a data tensor, container holds a mask".into())),
        other => other.into_real(),
    }
}

pub fn write_real(path: impl AsRef<Path>, x: &RealTensor) -> Result<()> {
    write_container(path, &TensorData::Float64(x.clone()))
}

pub fn read_mask(path: impl AsRef<Path>) -> Result<ObservationMask> {
    match read_container(path)? {
        TensorData::Mask(m) => Ok(ObservationMask::new(m)),
        other => Err(Error::Parameter(format!(
            "expected a mask container, found {:?}",
            other.dtype()
        ))),
    }
}

pub fn write_mask(path: impl AsRef<Path>, mask: &ObservationMask) -> Result<()> {
    write_container(path, &TensorData::Mask(mask.as_tensor().clone()))
}
