//! Embedding + projection, quasi-recurrent gate convolutions, fo-pooling and
//! the cross-temporal pair cell.
//!
//! Both sides of a pair are gated by the same kind of convolution banks. The
//! question side then runs two recurrences over its candidate `Z_q`: one with
//! its own gates and one with the answer's forget/output gates taken at the
//! aligned step (see [`align_step`]). The two hidden sequences are multiplied
//! elementwise. The answer side mirrors this with the question's gates. The
//! crossing adds no weights: a CTRN has exactly the parameters of a QRNN.

mod align;
mod cross;
mod embedding;
mod gates;
mod recurrence;

pub use align::{align_step, alignment};
pub use cross::{ctrn_cells, ctrn_cells_backward, ctrn_pair, CtrnOutput, PairState};
pub use embedding::{
    embed_project, embed_project_backward, EmbeddingTable, Projection, OOV_ID, PAD_ID,
};
pub use gates::{compute_gates, compute_gates_backward, GateBanks, GateBundle, GateGrads};
pub use recurrence::{fo_pool, fo_pool_backward, fo_pool_raw, CellTrace};
