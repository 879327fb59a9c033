//! Parameter accounting, a reference LSTM pair scorer and the runtime
//! harness comparing recurrent encoders.

mod lstm;
mod params;
mod runtime;

pub use lstm::LstmBaseline;
pub use params::{budget, budget_table, param_count, registry_count, Dims, ModelKind, ParamBudget};
pub use runtime::{median, time_models, write_csv, BenchConfig, RuntimeSample};
