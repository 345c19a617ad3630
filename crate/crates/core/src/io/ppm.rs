//! Binary PPM (P6) frames as `H × W × 3 × T` tensors scaled to `[0, 1]`.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::tensor::RealTensor;

/// One decoded 8-bit RGB frame.
#[derive(Clone, Debug, PartialEq)]
pub struct Frame {
    pub height: usize,
    pub width: usize,
    /// Interleaved RGB in row-major pixel order, as stored in the file.
    pub rgb: Vec<u8>,
}

struct Header<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Header<'_> {
    fn skip_space(&mut self) {
        loop {
            match self.bytes.get(self.pos) {
                Some(b) if b.is_ascii_whitespace() => self.pos += 1,
                Some(b'#') => {
                    while self.bytes.get(self.pos).is_some_and(|&b| b != b'\n') {
                        self.pos += 1;
                    }
                }
                _ => return,
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        self.skip_space();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::format(start as u64, format!("expected {what}")))
    }
}

pub fn decode_ppm(bytes: &[u8]) -> Result<Frame> {
    if bytes.get(..2) != Some(b"P6") {
        return Err(Error::format(0, "not a binary PPM (P6) file"));
    }
    let mut h = Header { bytes, pos: 2 };
    let width = h.number("width")?;
    let height = h.number("height")?;
    let maxval_at = h.pos;
    let maxval = h.number("maxval")?;
    if maxval != 255 {
        return Err(Error::format(maxval_at as u64, format!("maxval {maxval}, only 255 is supported")));
    }
    if width == 0 || height == 0 {
        return Err(Error::format(2, format!("empty image {width}x{height}")));
    }
    match bytes.get(h.pos) {
        Some(b) if b.is_ascii_whitespace() => h.pos += 1,
        _ => return Err(Error::format(h.pos as u64, "expected whitespace after maxval")),
    }
    let need = width * height * 3;
    let have = bytes.len() - h.pos;
    if have < need {
        return Err(Error::format(
            h.pos as u64,
            format!("pixel data needs {need} bytes, file has {have}"),
        ));
    }
    Ok(Frame {
        height,
        width,
        rgb: bytes[h.pos..h.pos + need].to_vec(),
    })
}

pub fn encode_ppm(frame: &Frame) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", frame.width, frame.height).into_bytes();
    out.extend_from_slice(&frame.rgb);
    out
}

/// `v/255` import scaling.
pub fn byte_to_unit(v: u8) -> f64 {
    f64::from(v) / 255.0
}

/// Inverse of [`byte_to_unit`] with round-half-up and clamping to `[0, 255]`.
pub fn unit_to_byte(v: f64) -> u8 {
    let s = (v * 255.0 + 0.5).floor();
    if s.is_nan() {
        0
    } else {
        s.clamp(0.0, 255.0) as u8
    }
}

fn with_path(path: &Path, e: Error) -> Error {
    match e {
        Error::Format { offset, message } => Error::Format {
            offset,
            message: format!("{}: {message}", path.display()),
        },
        other => other,
    }
}

pub fn read_ppm(path: impl AsRef<Path>) -> Result<Frame> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_ppm(&bytes).map_err(|e| with_path(path, e))
}

/// `.ppm` files of `dir` in lexicographic filename order.
pub fn list_frames(dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    let mut paths = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        let is_ppm = path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| e.eq_ignore_ascii_case("ppm"));
        if is_ppm && path.is_file() {
            paths.push(path);
        }
    }
    paths.sort_by(|a, b| a.file_name().cmp(&b.file_name()));
    Ok(paths)
}

/// Imports every `.ppm` frame of `dir` into an `H × W × 3 × T` tensor.
pub fn import_ppm_dir(dir: impl AsRef<Path>) -> Result<RealTensor> {
    let dir = dir.as_ref();
    let paths = list_frames(dir)?;
    if paths.is_empty() {
        return Err(Error::Parameter(format!("no .ppm frames in {}", dir.display())));
    }
    let frames = paths.iter().map(read_ppm).collect::<Result<Vec<_>>>()?;
    let (height, width) = (frames[0].height, frames[0].width);
    for (f, p) in frames.iter().zip(&paths) {
        if (f.height, f.width) != (height, width) {
            return Err(Error::shape(format!(
                "{} is {}x{}, first frame is {}x{}",
                p.display(),
                f.width,
                f.height,
                width,
                height
            )));
        }
    }
    let t = frames.len();
    let mut data = vec![0.0; height * width * 3 * t];
    for (k, f) in frames.iter().enumerate() {
        for r in 0..height {
            for c in 0..width {
                for ch in 0..3 {
                    let v = f.rgb[(r * width + c) * 3 + ch];
                    data[r + height * (c + width * (ch + 3 * k))] = byte_to_unit(v);
                }
            }
        }
    }
    RealTensor::new(vec![height, width, 3, t], data)
}

/// Writes `frame_0000.ppm`, `frame_0001.ppm`, … into `dir`, creating it if needed.
/// Accepts `H × W × 3 × T` or a single `H × W × 3` frame.
pub fn export_ppm_dir(x: &RealTensor, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    let d = x.dims();
    let frames = match d.len() {
        3 => 1,
        4 => d[3],
        _ => 0,
    };
    if frames == 0 || d[2] != 3 {
        return Err(Error::shape(format!("PPM export needs H×W×3×T, got {d:?}")));
    }
    let (height, width) = (d[0], d[1]);
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let v = x.as_slice();
    let mut written = Vec::with_capacity(frames);
    for k in 0..frames {
        let mut rgb = vec![0u8; height * width * 3];
        for r in 0..height {
            for c in 0..width {
                for ch in 0..3 {
                    rgb[(r * width + c) * 3 + ch] = unit_to_byte(v[r + height * (c + width * (ch + 3 * k))]);
                }
            }
        }
        let path = dir.join(format!("frame_{k:04}.ppm"));
        std::fs::write(&path, encode_ppm(&Frame { height, width, rgb })).map_err(|e| Error::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_with_comments() {
        let mut bytes = b"P6 # made by hand\n2 1\n# depth\n255\n".to_vec();
        bytes.extend_from_slice(&[1, 2, 3, 4, 5, 6]);
        let f = decode_ppm(&bytes).unwrap();
        assert_eq!((f.width, f.height), (2, 1));
        assert_eq!(f.rgb, vec![1, 2, 3, 4, 5, 6]);
        assert_eq!(decode_ppm(&encode_ppm(&f)).unwrap(), f);
    }

    #[test]
    fn rejects_other_formats() {
        assert!(decode_ppm(b"P3\n1 1\n255\n0 0 0").is_err());
        assert!(decode_ppm(b"P6\n1 1\n65535\n\0\0\0\0\0\0").is_err());
        let err = decode_ppm(b"P6\n2 2\n255\n\0\0\0").unwrap_err().to_string();
        assert!(err.contains("needs 12 bytes"), "{err}");
    }

    #[test]
    fn quantization() {
        assert_eq!(unit_to_byte(1.0), 255);
        assert_eq!(unit_to_byte(2.0), 255);
        assert_eq!(unit_to_byte(-0.3), 0);
        assert_eq!(unit_to_byte(f64::NAN), 0);
        assert_eq!(unit_to_byte(0.5), 128);
        for b in 0..=255u8 {
            assert_eq!(unit_to_byte(byte_to_unit(b)), b);
        }
    }
}
