//! Observations, scaling and basis embedding.

mod embed;
mod legendre;
mod table;

pub use embed::{embed_dataset, prepare, BasisSpec, EmbeddedData};
pub use legendre::{legendre_eval, legendre_terms};
pub use table::{Column, DataTable, VarKind, Variable};
