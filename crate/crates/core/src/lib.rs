pub mod birational;
pub mod ring;
pub mod toric;
pub mod strata;
pub mod volume;
pub mod equivariant;
pub mod error;
pub mod scenario;
pub mod cli;
pub mod corpus;
