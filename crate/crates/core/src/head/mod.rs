//! Temporal mean pooling, the dense stack with its 2-class softmax, the
//! pointwise cross-entropy objective, dropout and word-overlap features.

mod dropout;
mod loss;
mod mlp;
mod overlap;
mod pool;

pub use dropout::{dropout, Dropout};
pub use loss::{cross_entropy_logit_grad, loss, pointwise_cross_entropy, LossReport, SCORE_EPS};
pub use mlp::{score, softmax2, Activation, Dense, MlpRecord, MlpStack, PooledPair, POSITIVE_CLASS};
pub use overlap::{overlap_features, IdfTable, Stopwords};
pub use pool::{mean_pool, mean_pool_backward};
