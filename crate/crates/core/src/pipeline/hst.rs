//! The HST1 container: a flat little-endian list of per-sentence
//! `tokens x dim x epochs` float32 tensors.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::PointCloud;

pub const MAGIC: &[u8; 4] = b"HST1";
pub const VERSION: u32 = 1;

/// Hidden states of one sentence across training epochs.
#[derive(Debug, Clone, PartialEq)]
pub struct StateTensor {
    pub sentence_id: String,
    n_tokens: usize,
    state_dim: usize,
    n_epochs: usize,
    /// Row-major `(token, dim, epoch)`.
    data: Vec<f32>,
}

impl StateTensor {
    pub fn new(
        sentence_id: impl Into<String>,
        n_tokens: usize,
        state_dim: usize,
        n_epochs: usize,
        data: Vec<f32>,
    ) -> Result<Self> {
        let sentence_id = sentence_id.into();
        let expected = n_tokens
            .checked_mul(state_dim)
            .and_then(|x| x.checked_mul(n_epochs))
            .ok_or_else(|| Error::ShapeMismatch(format!("{sentence_id}: shape overflows")))?;
        if data.len() != expected {
            return Err(Error::ShapeMismatch(format!(
                "{sentence_id}: {n_tokens}x{state_dim}x{n_epochs} needs {expected} values, got {}",
                data.len()
            )));
        }
        if let Some(offset) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue { sentence_id, offset });
        }
        Ok(Self {
            sentence_id,
            n_tokens,
            state_dim,
            n_epochs,
            data,
        })
    }

    /// Stacks one `tokens x dim` cloud per epoch.
    pub fn from_epochs(sentence_id: impl Into<String>, epochs: &[PointCloud]) -> Result<Self> {
        let sentence_id = sentence_id.into();
        let first = epochs
            .first()
            .ok_or_else(|| Error::ShapeMismatch(format!("{sentence_id}: no epochs")))?;
        let (t, d, e) = (first.len(), first.dim(), epochs.len());
        if let Some(bad) = epochs.iter().position(|c| c.len() != t || c.dim() != d) {
            return Err(Error::ShapeMismatch(format!(
                "{sentence_id}: epoch {bad} is not {t}x{d}"
            )));
        }
        let mut data = vec![0f32; t * d * e];
        for (k, cloud) in epochs.iter().enumerate() {
            for (i, p) in cloud.points().enumerate() {
                for (j, &x) in p.iter().enumerate() {
                    data[(i * d + j) * e + k] = x as f32;
                }
            }
        }
        Self::new(sentence_id, t, d, e, data)
    }

    pub fn n_tokens(&self) -> usize {
        self.n_tokens
    }

    pub fn state_dim(&self) -> usize {
        self.state_dim
    }

    pub fn n_epochs(&self) -> usize {
        self.n_epochs
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn get(&self, token: usize, dim: usize, epoch: usize) -> f32 {
        self.data[(token * self.state_dim + dim) * self.n_epochs + epoch]
    }

    /// The `tokens x dim` cloud at `epoch`, labelled by token index.
    pub fn slice_epoch(&self, epoch: usize) -> Result<PointCloud> {
        if epoch >= self.n_epochs {
            return Err(Error::EpochOutOfRange {
                epoch,
                sentence_id: self.sentence_id.clone(),
                n_epochs: self.n_epochs,
            });
        }
        if self.state_dim == 0 {
            return Err(Error::ShapeMismatch(format!("{}: state dimension 0", self.sentence_id)));
        }
        let coords = (0..self.n_tokens)
            .flat_map(|t| (0..self.state_dim).map(move |d| (t, d)))
            .map(|(t, d)| self.get(t, d, epoch) as f64)
            .collect();
        PointCloud::from_flat(coords, self.state_dim)?.with_labels((0..self.n_tokens as i64).collect())
    }
}

fn to_u32(value: usize, what: &str, id: &str) -> Result<u32> {
    u32::try_from(value).map_err(|_| Error::ShapeMismatch(format!("{id}: {what} {value} exceeds u32")))
}

pub fn encode_state_file(tensors: &[StateTensor]) -> Result<Vec<u8>> {
    let payload: usize = tensors.iter().map(|t| 18 + t.sentence_id.len() + 4 * t.data.len()).sum();
    let mut out = Vec::with_capacity(12 + payload);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&to_u32(tensors.len(), "tensor count", "file")?.to_le_bytes());
    for t in tensors {
        let id = t.sentence_id.as_bytes();
        let len = u16::try_from(id.len()).map_err(|_| {
            Error::InvalidArgument(format!("sentence id of {} bytes exceeds 65535", id.len()))
        })?;
        out.extend_from_slice(&len.to_le_bytes());
        out.extend_from_slice(id);
        for (v, what) in [(t.n_tokens, "n_tokens"), (t.state_dim, "state_dim"), (t.n_epochs, "n_epochs")] {
            out.extend_from_slice(&to_u32(v, what, &t.sentence_id)?.to_le_bytes());
        }
        for v in &t.data {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    Ok(out)
}

pub fn write_state_file(path: impl AsRef<Path>, tensors: &[StateTensor]) -> Result<()> {
    let bytes = encode_state_file(tensors)?;
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    file.write_all(&bytes)?;
    file.flush()?;
    Ok(())
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize, what: impl FnOnce() -> String) -> Result<&'a [u8]> {
        if self.bytes.len() - self.pos < n {
            return Err(Error::TruncatedFile(what()));
        }
        let out = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    fn u16(&mut self, what: impl FnOnce() -> String) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2, what)?.try_into().unwrap()))
    }

    fn u32(&mut self, what: impl FnOnce() -> String) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }
}

pub fn decode_state_file(bytes: &[u8]) -> Result<Vec<StateTensor>> {
    if bytes.len() < 4 || &bytes[..4] != MAGIC {
        return Err(Error::BadMagic);
    }
    let mut cur = Cursor { bytes, pos: 4 };
    let version = cur.u32(|| "the file header".into())?;
    if version != VERSION {
        return Err(Error::UnsupportedVersion(version));
    }
    let count = cur.u32(|| "the file header".into())? as usize;
    let mut tensors = Vec::with_capacity(count.min(1 << 16));
    for index in 0..count {
        let header = || format!("the header of tensor #{index}");
        let id_len = cur.u16(header)? as usize;
        let id_bytes = cur.take(id_len, header)?;
        let id = std::str::from_utf8(id_bytes)
            .map_err(|_| Error::ShapeMismatch(format!("sentence id of tensor #{index} is not UTF-8")))?
            .to_string();
        let named = || format!("sentence {id}");
        let n_tokens = cur.u32(named)? as usize;
        let state_dim = cur.u32(named)? as usize;
        let n_epochs = cur.u32(named)? as usize;
        let n = n_tokens
            .checked_mul(state_dim)
            .and_then(|x| x.checked_mul(n_epochs))
            .and_then(|x| x.checked_mul(4))
            .ok_or_else(|| Error::ShapeMismatch(format!("{id}: header shape overflows")))?;
        let raw = cur.take(n, named)?;
        let data = raw
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
            .collect();
        tensors.push(StateTensor::new(id, n_tokens, state_dim, n_epochs, data)?);
    }
    if cur.pos != bytes.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} trailing bytes after {count} tensors",
            bytes.len() - cur.pos
        )));
    }
    Ok(tensors)
}

pub fn read_state_file(path: impl AsRef<Path>) -> Result<Vec<StateTensor>> {
    decode_state_file(&std::fs::read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tensor(id: &str, t: usize, d: usize, e: usize) -> StateTensor {
        let data = (0..t * d * e).map(|i| i as f32 * 0.25 - 3.0).collect();
        StateTensor::new(id, t, d, e, data).unwrap()
    }

    #[test]
    fn empty_container() {
        let bytes = encode_state_file(&[]).unwrap();
        assert_eq!(bytes, b"HST1\x01\x00\x00\x00\x00\x00\x00\x00");
        assert!(decode_state_file(&bytes).unwrap().is_empty());
    }

    #[test]
    fn header_layout() {
        let bytes = encode_state_file(&[tensor("ab", 1, 2, 1)]).unwrap();
        assert_eq!(&bytes[12..14], &[2, 0]);
        assert_eq!(&bytes[14..16], b"ab");
        assert_eq!(&bytes[16..28], &[1, 0, 0, 0, 2, 0, 0, 0, 1, 0, 0, 0]);
        assert_eq!(&bytes[28..32], &(-3.0f32).to_le_bytes());
        assert_eq!(bytes.len(), 36);
    }

    #[test]
    fn one_float_short_names_the_sentence() {
        let mut bytes = encode_state_file(&[tensor("s0", 2, 2, 2), tensor("s1", 3, 2, 2)]).unwrap();
        bytes.truncate(bytes.len() - 4);
        match decode_state_file(&bytes) {
            Err(Error::TruncatedFile(what)) => assert!(what.contains("s1"), "{what}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_magic_version_and_trailing_bytes() {
        assert_eq!(decode_state_file(b"HST2\x01\0\0\0\0\0\0\0"), Err(Error::BadMagic));
        assert_eq!(decode_state_file(b"HS"), Err(Error::BadMagic));
        assert_eq!(decode_state_file(b"HST1\x02\0\0\0\0\0\0\0"), Err(Error::UnsupportedVersion(2)));
        let mut bytes = encode_state_file(&[tensor("x", 1, 1, 1)]).unwrap();
        bytes.push(0);
        assert!(matches!(decode_state_file(&bytes), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn rejects_non_finite_payload() {
        let mut bytes = encode_state_file(&[tensor("nan", 2, 1, 1)]).unwrap();
        let n = bytes.len();
        bytes[n - 4..].copy_from_slice(&f32::NAN.to_le_bytes());
        assert_eq!(
            decode_state_file(&bytes),
            Err(Error::NonFiniteValue { sentence_id: "nan".into(), offset: 1 })
        );
    }

    #[test]
    fn slices_are_token_by_dim() {
        let t = tensor("s", 3, 2, 4);
        let c = t.slice_epoch(2).unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(c.point(1), &[t.get(1, 0, 2) as f64, t.get(1, 1, 2) as f64]);
        assert_eq!(c.labels(), Some(&[0i64, 1, 2][..]));
        assert!(matches!(t.slice_epoch(4), Err(Error::EpochOutOfRange { epoch: 4, .. })));
        let back = StateTensor::from_epochs("s", &(0..4).map(|e| t.slice_epoch(e).unwrap()).collect::<Vec<_>>()).unwrap();
        assert_eq!(back, t);
    }
}
