use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::numkit::{gemm_acc, gemm_tn_acc, GradSlot, Tensor};
use crate::{Error, Result};

pub const PAD_ID: u32 = 0;
pub const OOV_ID: u32 = 1;

/// Fixed word vectors, `vocab_size × n`. Row [`PAD_ID`] is all zeros and the
/// table never receives gradient updates.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingTable {
    table: Tensor,
}

impl EmbeddingTable {
    /// Wraps a `vocab_size × n` matrix, zeroing the PAD row.
    pub fn from_tensor(mut table: Tensor) -> Result<Self> {
        let (rows, _) = table.dims2("embedding table")?;
        if rows < 2 {
            return Err(Error::shape("embedding table needs PAD and OOV rows"));
        }
        table.row_mut(PAD_ID as usize).fill(0.0);
        Ok(EmbeddingTable { table })
    }

    /// Seeded uniform vectors in `±scale` for every row except PAD.
    pub fn random(vocab_size: usize, dim: usize, scale: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut table = Tensor::zeros(&[vocab_size.max(2), dim]);
        for v in table.data_mut()[dim..].iter_mut() {
            *v = rng.gen_range(-scale..=scale);
        }
        EmbeddingTable { table }
    }

    pub fn vocab_size(&self) -> usize {
        self.table.rows()
    }

    pub fn dim(&self) -> usize {
        self.table.row_len()
    }

    pub fn row(&self, id: u32) -> Result<&[f64]> {
        if id as usize >= self.vocab_size() {
            return Err(Error::Vocabulary {
                id,
                size: self.vocab_size(),
            });
        }
        Ok(self.table.row(id as usize))
    }

    pub fn as_tensor(&self) -> &Tensor {
        &self.table
    }

    /// Stacks the rows for `ids` into an `L × n` matrix.
    pub fn gather(&self, ids: &[u32]) -> Result<Tensor> {
        let n = self.dim();
        let mut data = Vec::with_capacity(ids.len() * n);
        for &id in ids {
            data.extend_from_slice(self.row(id)?);
        }
        Tensor::from_vec(&[ids.len(), n], data)
    }
}

/// Trainable `n × m` map from word vectors to model inputs. No bias, so PAD
/// rows project to zero.
#[derive(Clone, Debug, PartialEq)]
pub struct Projection {
    pub weight: GradSlot,
}

impl Projection {
    pub fn new<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Self {
        Projection {
            weight: GradSlot::glorot(&[n, m], n, m, rng),
        }
    }

    pub fn from_tensor(weight: Tensor) -> Result<Self> {
        weight.dims2("projection")?;
        Ok(Projection {
            weight: GradSlot::new(weight),
        })
    }

    pub fn output_dim(&self) -> usize {
        self.weight.value.shape()[1]
    }
}

/// Row `t` of the result is `table[ids[t]] · proj`.
pub fn embed_project(ids: &[u32], table: &EmbeddingTable, proj: &Projection) -> Result<Tensor> {
    let (n, m) = proj.weight.value.dims2("projection")?;
    if n != table.dim() {
        return Err(Error::shape(format!(
            "projection expects {n}-dim embeddings, table has {}",
            table.dim()
        )));
    }
    let rows = table.gather(ids)?;
    let mut out = vec![0.0; ids.len() * m];
    gemm_acc(rows.data(), proj.weight.value.data(), &mut out, ids.len(), n, m);
    Tensor::from_vec(&[ids.len(), m], out)
}

/// Accumulates `table[ids]ᵀ · grad_out` into the projection gradient.
pub fn embed_project_backward(
    ids: &[u32],
    table: &EmbeddingTable,
    proj: &mut Projection,
    grad_out: &Tensor,
) -> Result<()> {
    let (n, m) = proj.weight.value.dims2("projection")?;
    if grad_out.shape() != [ids.len(), m] {
        return Err(Error::shape("embed_project backward: upstream shape"));
    }
    let rows = table.gather(ids)?;
    gemm_tn_acc(
        rows.data(),
        grad_out.data(),
        proj.weight.grad.data_mut(),
        ids.len(),
        n,
        m,
    );
    Ok(())
}
