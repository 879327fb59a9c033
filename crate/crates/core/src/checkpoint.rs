//! Versioned binary model container. The byte layout is described in
//! `docs/checkpoint.md`; every integer and float is little-endian.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use crate::data::Vocabulary;
use crate::encoder::EmbeddingTable;
use crate::head::{IdfTable, Stopwords};
use crate::model::Model;
use crate::numkit::Tensor;
use crate::optim::TrainConfig;
use crate::{Error, Result};

pub const MAGIC: &[u8; 8] = b"CTRNCKPT";
pub const VERSION: u32 = 1;

/// Everything needed to score new text: configuration, vocabulary, the
/// model (including its fixed embedding table) and, when the model uses
/// overlap features, the IDF table and stopwords they were computed with.
#[derive(Clone, Debug)]
pub struct Checkpoint {
    pub config: TrainConfig,
    pub vocab: Vocabulary,
    pub model: Model,
    pub overlap: Option<(IdfTable, Stopwords)>,
}

struct Writer(Vec<u8>);

impl Writer {
    fn u8(&mut self, v: u8) {
        self.0.push(v);
    }
    fn u32(&mut self, v: usize) {
        self.0.extend_from_slice(&(v as u32).to_le_bytes());
    }
    fn u64(&mut self, v: usize) {
        self.0.extend_from_slice(&(v as u64).to_le_bytes());
    }
    fn str(&mut self, s: &str) {
        self.u32(s.len());
        self.0.extend_from_slice(s.as_bytes());
    }
    fn f64s(&mut self, v: &[f64]) {
        for x in v {
            self.0.extend_from_slice(&x.to_le_bytes());
        }
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.buf.len() - self.pos < n {
            return Err(Error::Checkpoint(format!("truncated at byte {}", self.pos)));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }
    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }
    fn u32(&mut self) -> Result<usize> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")) as usize)
    }
    fn u64(&mut self) -> Result<usize> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")) as usize)
    }
    fn str(&mut self) -> Result<String> {
        let n = self.u32()?;
        String::from_utf8(self.take(n)?.to_vec())
            .map_err(|_| Error::Checkpoint(format!("invalid UTF-8 before byte {}", self.pos)))
    }
    fn f64s(&mut self, n: usize) -> Result<Vec<f64>> {
        let bytes = self.take(n.checked_mul(8).ok_or_else(|| Error::Checkpoint("size overflow".into()))?)?;
        Ok(bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect())
    }
}

impl Checkpoint {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer(Vec::new());
        w.0.extend_from_slice(MAGIC);
        w.u32(VERSION as usize);
        w.str(&self.config.to_text());

        let tokens = self.vocab.regular_tokens();
        w.u32(tokens.len());
        for t in tokens {
            w.str(t);
        }

        let table = self.model.embedding().as_tensor();
        w.u32(table.shape()[0]);
        w.u32(table.shape()[1]);
        w.f64s(table.data());

        match &self.overlap {
            None => w.u8(0),
            Some((idf, stop)) => {
                w.u8(1);
                w.u64(idf.n_docs());
                let mut df: Vec<_> = idf.document_frequencies().iter().collect();
                df.sort();
                w.u32(df.len());
                for (tok, n) in df {
                    w.str(tok);
                    w.u64(*n);
                }
                let words = stop.to_sorted_vec();
                w.u32(words.len());
                for s in &words {
                    w.str(s);
                }
            }
        }

        let params = self.model.params();
        w.u32(params.len());
        for (name, _, slot) in params {
            w.str(&name);
            let shape = slot.value.shape();
            w.u32(shape.len());
            for &s in shape {
                w.u32(s);
            }
            w.f64s(slot.value.data());
        }
        w.0
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader { buf: bytes, pos: 0 };
        if r.take(MAGIC.len()).ok() != Some(MAGIC.as_slice()) {
            return Err(Error::Checkpoint("not a checkpoint file (bad magic)".into()));
        }
        let version = r.u32()? as u32;
        if version != VERSION {
            return Err(Error::Checkpoint(format!(
                "unsupported checkpoint version {version} (this build reads {VERSION})"
            )));
        }
        let config = TrainConfig::from_text(&r.str()?)
            .map_err(|e| Error::Checkpoint(format!("config section: {e}")))?;

        let n_tokens = r.u32()?;
        let tokens = (0..n_tokens).map(|_| r.str()).collect::<Result<Vec<_>>>()?;
        let vocab = Vocabulary::from_tokens(tokens);

        let (rows, cols) = (r.u32()?, r.u32()?);
        let data = r.f64s(rows * cols)?;
        let table = Tensor::from_vec(&[rows, cols], data)
            .and_then(EmbeddingTable::from_tensor)
            .map_err(|e| Error::Checkpoint(format!("embedding section: {e}")))?;
        if rows != vocab.len() {
            return Err(Error::Checkpoint(format!(
                "embedding has {rows} rows for a vocabulary of {}",
                vocab.len()
            )));
        }

        let overlap = match r.u8()? {
            0 => None,
            1 => {
                let n_docs = r.u64()?;
                let n = r.u32()?;
                let mut df = HashMap::with_capacity(n);
                for _ in 0..n {
                    let tok = r.str()?;
                    df.insert(tok, r.u64()?);
                }
                let n_stop = r.u32()?;
                let words = (0..n_stop).map(|_| r.str()).collect::<Result<Vec<_>>>()?;
                Some((IdfTable::from_parts(n_docs, df), Stopwords::from_text(&words.join("\n"))))
            }
            other => return Err(Error::Checkpoint(format!("bad overlap flag {other}"))),
        };

        let mut model = Model::new(config.model_config(), table, 0)
            .map_err(|e| Error::Checkpoint(format!("config section: {e}")))?;
        let expected = model.params().len();
        let n_params = r.u32()?;
        if n_params != expected {
            return Err(Error::Checkpoint(format!(
                "{n_params} parameter blobs, configuration implies {expected}"
            )));
        }
        for _ in 0..n_params {
            let name = r.str()?;
            let ndim = r.u32()?;
            let shape = (0..ndim).map(|_| r.u32()).collect::<Result<Vec<_>>>()?;
            let data = r.f64s(shape.iter().product())?;
            let slot = model
                .param_mut(&name)
                .ok_or_else(|| Error::Checkpoint(format!("unknown parameter `{name}`")))?;
            if slot.value.shape() != shape.as_slice() {
                return Err(Error::Checkpoint(format!(
                    "parameter `{name}` has shape {shape:?}, expected {:?}",
                    slot.value.shape()
                )));
            }
            if data.iter().any(|v| !v.is_finite()) {
                return Err(Error::Checkpoint(format!("parameter `{name}` is not finite")));
            }
            slot.value.data_mut().copy_from_slice(&data);
        }
        if r.pos != bytes.len() {
            return Err(Error::Checkpoint(format!("{} trailing bytes", bytes.len() - r.pos)));
        }
        Ok(Checkpoint {
            config,
            vocab,
            model,
            overlap,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_bytes())?;
        Ok(())
    }

    /// Any failure, including a missing file, is reported as a checkpoint
    /// error.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = fs::read(path).map_err(|e| Error::Checkpoint(format!("{}: {e}", path.display())))?;
        Checkpoint::from_bytes(&bytes)
    }
}
