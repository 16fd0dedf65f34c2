//! Versioned little-endian binary snapshot format.
//!
//! Layout: magic `UNMTSNAP`, u32 version, four u64 dims, u64 step, then for
//! a u8 mask flag (when 1, followed by one byte per vocabulary entry for L1
//! and then for L2), then for each tensor in `PARAM_NAMES` order: u64 rows,
//! u64 cols, rows·cols f64.

use sha2::{Digest, Sha256};

use super::{ModelDims, ModelSnapshot, OutputMask, Params, Tensor};
use crate::corpus::Lang;
use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"UNMTSNAP";
const VERSION: u32 = 2;

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take(&mut self, n: usize) -> Result<&[u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len());
        let end = end.ok_or_else(|| Error::Snapshot("truncated".into()))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn usize(&mut self) -> Result<usize> {
        usize::try_from(self.u64()?).map_err(|_| Error::Snapshot("dimension overflow".into()))
    }
}

impl ModelSnapshot {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(64 + self.params.len() * 8);
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        let d = self.dims;
        for v in [d.vocab_size, d.embed_dim, d.hidden_dim, d.max_decode_len] {
            out.extend_from_slice(&(v as u64).to_le_bytes());
        }
        out.extend_from_slice(&self.step.to_le_bytes());
        match &self.output_mask {
            None => out.push(0),
            Some(m) => {
                out.push(1);
                for lang in [Lang::L1, Lang::L2] {
                    out.extend(m.allowed(lang).iter().map(|&b| b as u8));
                }
            }
        }
        for t in self.params.tensors() {
            out.extend_from_slice(&(t.rows as u64).to_le_bytes());
            out.extend_from_slice(&(t.cols as u64).to_le_bytes());
            for x in &t.data {
                out.extend_from_slice(&x.to_le_bytes());
            }
        }
        out
    }

    pub fn from_bytes(buf: &[u8]) -> Result<Self> {
        let mut r = Reader { buf, pos: 0 };
        if r.take(8)? != MAGIC {
            return Err(Error::Snapshot("bad magic".into()));
        }
        let version = u32::from_le_bytes(r.take(4)?.try_into().unwrap());
        if version != VERSION {
            return Err(Error::Snapshot(format!("unsupported version {version}")));
        }
        let dims = ModelDims {
            vocab_size: r.usize()?,
            embed_dim: r.usize()?,
            hidden_dim: r.usize()?,
            max_decode_len: r.usize()?,
        };
        dims.validate()?;
        let step = r.u64()?;
        let output_mask = match r.take(1)?[0] {
            0 => None,
            1 => {
                let mut flags = [Vec::new(), Vec::new()];
                for f in &mut flags {
                    *f = r
                        .take(dims.vocab_size)?
                        .iter()
                        .map(|&b| match b {
                            0 => Ok(false),
                            1 => Ok(true),
                            _ => Err(Error::Snapshot("bad mask byte".into())),
                        })
                        .collect::<Result<_>>()?;
                }
                let [l1, l2] = flags;
                Some(OutputMask::from_flags(l1, l2).map_err(|e| Error::Snapshot(e.to_string()))?)
            }
            _ => return Err(Error::Snapshot("bad mask flag".into())),
        };
        let mut params = Params::zeros(&dims);
        for (name, t) in super::PARAM_NAMES.iter().zip(params.tensors_mut()) {
            let (rows, cols) = (r.usize()?, r.usize()?);
            if (rows, cols) != t.shape() {
                return Err(Error::Shape {
                    param: name.to_string(),
                    expected: t.shape(),
                    got: (rows, cols),
                });
            }
            let raw = r.take(rows * cols * 8)?;
            *t = Tensor {
                rows,
                cols,
                data: raw
                    .chunks_exact(8)
                    .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
                    .collect(),
            };
        }
        if r.pos != buf.len() {
            return Err(Error::Snapshot("trailing bytes".into()));
        }
        if let Some(name) = params.first_non_finite() {
            return Err(Error::Numeric {
                param: name.to_string(),
            });
        }
        Ok(ModelSnapshot {
            dims,
            params,
            step,
            output_mask,
        })
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let buf = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&buf)
    }

    /// First 16 hex digits of the SHA-256 of the serialized snapshot.
    pub fn fingerprint(&self) -> String {
        let digest = Sha256::digest(self.to_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use crate::seq2seq::{init_model, ModelDims, ModelSnapshot};

    #[test]
    fn bytes_round_trip_bit_exact() {
        let mut m = init_model(ModelDims::new(20), 5).unwrap();
        m.step = 17;
        m.params.w_out.data[3] = f64::MIN_POSITIVE;
        let bytes = m.to_bytes();
        let back = ModelSnapshot::from_bytes(&bytes).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.to_bytes(), bytes);
        assert_eq!(back.fingerprint(), m.fingerprint());
    }

    #[test]
    fn corrupt_input_rejected() {
        let m = init_model(ModelDims::new(20), 5).unwrap();
        let bytes = m.to_bytes();
        assert!(ModelSnapshot::from_bytes(&bytes[..bytes.len() - 1]).is_err());
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(ModelSnapshot::from_bytes(&bad).is_err());
        let mut extra = bytes;
        extra.push(0);
        assert!(ModelSnapshot::from_bytes(&extra).is_err());
    }
}
