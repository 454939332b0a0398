pub mod applications;
pub mod block_encoding;
pub mod centering;
pub mod circuit;
pub mod cli;
pub mod data_encoding;
pub mod datasets;
pub mod error;
pub mod io;
pub mod linalg;
pub mod matrix;
pub mod mc;
pub mod reference;
pub mod spectral;
pub mod suite;
