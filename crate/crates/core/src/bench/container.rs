//! Versioned binary container shared by checkpoints and encoded datasets.
//!
//! Layout (integers little-endian):
//! `magic[8] | version u32 | meta_len u64 | meta (UTF-8 "key=value" lines) |
//! blob_count u32 | blobs | sha256[32]`, where each blob is
//! `name_len u32 | name | kind u8 | rows u64 | cols u64 | values`.
//! Values are IEEE-754 doubles (kind 0) or u32 (kind 1), row-major. The
//! trailing digest covers every preceding byte.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::tensor::Matrix;

const DIGEST_LEN: usize = 32;

#[derive(Clone, Debug, PartialEq)]
pub enum BlobData {
    F64(Matrix),
    U32 { rows: usize, cols: usize, values: Vec<u32> },
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Container {
    pub meta: BTreeMap<String, String>,
    pub blobs: Vec<(String, BlobData)>,
}

impl Container {
    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.meta.insert(key.to_owned(), value.to_string());
    }

    pub fn get(&self, key: &str) -> Result<&str> {
        self.meta.get(key).map(String::as_str).ok_or_else(|| Error::Integrity(format!("missing metadata `{key}`")))
    }

    pub fn parse<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        let raw = self.get(key)?;
        raw.parse().map_err(|_| Error::Integrity(format!("metadata `{key}` has unreadable value `{raw}`")))
    }

    pub fn push_matrix(&mut self, name: impl Into<String>, m: &Matrix) {
        self.blobs.push((name.into(), BlobData::F64(m.clone())));
    }

    pub fn push_u32(&mut self, name: impl Into<String>, rows: usize, cols: usize, values: Vec<u32>) {
        self.blobs.push((name.into(), BlobData::U32 { rows, cols, values }));
    }

    fn blob(&self, name: &str) -> Result<&BlobData> {
        self.blobs
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, b)| b)
            .ok_or_else(|| Error::Integrity(format!("missing blob `{name}`")))
    }

    pub fn matrix(&self, name: &str) -> Result<&Matrix> {
        match self.blob(name)? {
            BlobData::F64(m) => Ok(m),
            BlobData::U32 { .. } => Err(Error::Integrity(format!("blob `{name}` holds integers, expected doubles"))),
        }
    }

    pub fn u32s(&self, name: &str) -> Result<(usize, usize, &[u32])> {
        match self.blob(name)? {
            BlobData::U32 { rows, cols, values } => Ok((*rows, *cols, values)),
            BlobData::F64(_) => Err(Error::Integrity(format!("blob `{name}` holds doubles, expected integers"))),
        }
    }

    pub fn to_bytes(&self, magic: &[u8; 8], version: u32) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(magic);
        out.extend_from_slice(&version.to_le_bytes());
        let mut meta = String::new();
        for (k, v) in &self.meta {
            meta.push_str(k);
            meta.push('=');
            meta.push_str(v);
            meta.push('\n');
        }
        out.extend_from_slice(&(meta.len() as u64).to_le_bytes());
        out.extend_from_slice(meta.as_bytes());
        out.extend_from_slice(&(self.blobs.len() as u32).to_le_bytes());
        for (name, blob) in &self.blobs {
            out.extend_from_slice(&(name.len() as u32).to_le_bytes());
            out.extend_from_slice(name.as_bytes());
            match blob {
                BlobData::F64(m) => {
                    out.push(0);
                    out.extend_from_slice(&(m.rows() as u64).to_le_bytes());
                    out.extend_from_slice(&(m.cols() as u64).to_le_bytes());
                    for v in m.data() {
                        out.extend_from_slice(&v.to_le_bytes());
                    }
                }
                BlobData::U32 { rows, cols, values } => {
                    out.push(1);
                    out.extend_from_slice(&(*rows as u64).to_le_bytes());
                    out.extend_from_slice(&(*cols as u64).to_le_bytes());
                    for v in values {
                        out.extend_from_slice(&v.to_le_bytes());
                    }
                }
            }
        }
        let digest = Sha256::digest(&out);
        out.extend_from_slice(&digest);
        out
    }

    pub fn from_bytes(bytes: &[u8], magic: &[u8; 8], version: u32) -> Result<Container> {
        if bytes.len() < magic.len() + 4 + DIGEST_LEN {
            return Err(Error::Integrity(format!("file is truncated ({} bytes)", bytes.len())));
        }
        let (body, digest) = bytes.split_at(bytes.len() - DIGEST_LEN);
        let mut r = Reader { buf: body, pos: 0 };
        if r.take(8)? != magic {
            return Err(Error::Integrity("wrong file type (bad magic bytes)".into()));
        }
        let found = r.u32()?;
        if found != version {
            return Err(Error::Integrity(format!("format version {found} is not supported (expected {version})")));
        }
        if Sha256::digest(body).as_slice() != digest {
            return Err(Error::Integrity("checksum mismatch: file is corrupted or truncated".into()));
        }
        let meta_len = r.len_u64()?;
        let meta_text = std::str::from_utf8(r.take(meta_len)?)
            .map_err(|_| Error::Integrity("metadata is not UTF-8".into()))?;
        let mut meta = BTreeMap::new();
        for line in meta_text.lines() {
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Integrity(format!("bad metadata line `{line}`")))?;
            meta.insert(k.to_owned(), v.to_owned());
        }
        let count = r.u32()? as usize;
        let mut blobs = Vec::with_capacity(count.min(1024));
        for _ in 0..count {
            let name_len = r.u32()? as usize;
            let name = std::str::from_utf8(r.take(name_len)?)
                .map_err(|_| Error::Integrity("blob name is not UTF-8".into()))?
                .to_owned();
            let kind = r.take(1)?[0];
            let rows = r.len_u64()?;
            let cols = r.len_u64()?;
            let n = rows.checked_mul(cols).ok_or_else(|| Error::Integrity(format!("blob `{name}` shape overflows")))?;
            let blob = match kind {
                0 => {
                    let raw = r.take(n.checked_mul(8).ok_or_else(|| Error::Integrity("blob too large".into()))?)?;
                    let data = raw.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect();
                    BlobData::F64(Matrix::new(rows, cols, data)?)
                }
                1 => {
                    let raw = r.take(n.checked_mul(4).ok_or_else(|| Error::Integrity("blob too large".into()))?)?;
                    let values = raw.chunks_exact(4).map(|c| u32::from_le_bytes(c.try_into().expect("4 bytes"))).collect();
                    BlobData::U32 { rows, cols, values }
                }
                other => return Err(Error::Integrity(format!("blob `{name}` has unknown kind {other}"))),
            };
            blobs.push((name, blob));
        }
        if r.pos != body.len() {
            return Err(Error::Integrity(format!("{} unexpected trailing bytes", body.len() - r.pos)));
        }
        Ok(Container { meta, blobs })
    }

    pub fn write(&self, path: &Path, magic: &[u8; 8], version: u32) -> Result<()> {
        fs::write(path, self.to_bytes(magic, version))?;
        Ok(())
    }

    pub fn read(path: &Path, magic: &[u8; 8], version: u32) -> Result<Container> {
        Container::from_bytes(&fs::read(path)?, magic, version)
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len());
        let end = end.ok_or_else(|| Error::Integrity(format!("truncated: needed {n} bytes at offset {}", self.pos)))?;
        let out = &self.buf[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn len_u64(&mut self) -> Result<usize> {
        let v = u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes"));
        usize::try_from(v).map_err(|_| Error::Integrity(format!("length {v} does not fit in memory")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MAGIC: &[u8; 8] = b"TESTBLOB";

    fn sample() -> Container {
        let mut c = Container::default();
        c.set("name", "x");
        c.set("n", 3);
        c.push_matrix("w", &Matrix::from_rows(&[[1.0, -0.0], [f64::MIN_POSITIVE, 1e300]]));
        c.push_u32("ids", 1, 3, vec![0, 7, u32::MAX]);
        c
    }

    #[test]
    fn round_trip() {
        let c = sample();
        let bytes = c.to_bytes(MAGIC, 3);
        let back = Container::from_bytes(&bytes, MAGIC, 3).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.parse::<usize>("n").unwrap(), 3);
        assert_eq!(back.to_bytes(MAGIC, 3), bytes);
    }

    #[test]
    fn every_flipped_byte_is_caught() {
        let bytes = sample().to_bytes(MAGIC, 3);
        for i in 0..bytes.len() {
            let mut bad = bytes.clone();
            bad[i] ^= 0x01;
            assert!(matches!(Container::from_bytes(&bad, MAGIC, 3), Err(Error::Integrity(_))), "byte {i}");
        }
        for cut in [0, 5, bytes.len() / 2, bytes.len() - 1] {
            assert!(matches!(Container::from_bytes(&bytes[..cut], MAGIC, 3), Err(Error::Integrity(_))));
        }
    }

    #[test]
    fn version_and_magic_gates() {
        let bytes = sample().to_bytes(MAGIC, 3);
        let err = Container::from_bytes(&bytes, MAGIC, 4).unwrap_err().to_string();
        assert!(err.contains("version 3"), "{err}");
        assert!(Container::from_bytes(&bytes, b"OTHERFMT", 3).is_err());
    }
}
