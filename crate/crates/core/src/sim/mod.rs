//! Ground-truthed data generation.

mod additive;
mod cpn;
mod dag;
mod noise;
mod spec;

pub use additive::{
    additive_sem_generate, additive_sem_generate_with, EdgeFunction, EdgeShape, Pnl,
};
pub use cpn::{cpn_generate, sample_category, softmax, CpnSpec, Layer, MlpNetwork};
pub use dag::random_dag;
pub use noise::{sample_beta, sample_gamma, NoiseSpec};
pub use spec::{simulate, DataKind, SimSpec};
