//! Cross temporal recurrent networks (CTRN) for ranking question-answer pairs.
//!
//! A CTRN is a quasi-recurrent encoder whose convolved forget and output gates
//! are cross-applied between the two sides of a pair: the question is pooled
//! once with its own gates and once with the answer's gates, and the two
//! hidden sequences are fused by an elementwise product (and vice versa for
//! the answer). The crate contains everything needed to train and evaluate
//! such a ranker from scratch:
//!
//! - [`numkit`]: dense f64 tensors, causal 1D convolution, activations and
//!   their hand-written backward passes, plus a finite-difference checker.
//! - [`encoder`]: embedding + projection, gate convolutions, fo-pooling and
//!   the cross-temporal pair cell.
//! - [`head`]: masked mean pooling, the dense stack with its 2-class softmax,
//!   the pointwise cross-entropy loss, dropout and word-overlap features.
//! - [`model`]: the full pair scorer with its parameter registry.
//! - [`optim`]: Adam, early stopping and the training loop.
//! - [`data`]: tokenization, vocabularies, embedding files, TSV corpora,
//!   negative sampling, batching and a synthetic keyword corpus.
//! - [`metrics`]: P@1, MRR, MAP and TREC run files.
//! - [`bench`]: the parameter accountant, a reference LSTM and the runtime
//!   harness.
//! - [`checkpoint`]: the binary model container.
//! - [`cli`]: configuration resolution and the subcommands behind the `ctrn`
//!   binary.
//!
//! Runnable walkthroughs for each capability live in `examples/`.

pub mod bench;
pub mod checkpoint;
pub mod cli;
pub mod data;
pub mod encoder;
mod error;
pub mod head;
pub mod metrics;
pub mod model;
pub mod numkit;
pub mod optim;

pub use error::{Error, Result};
pub use model::{EncoderKind, Model, ModelConfig, PairExample};
