//! Dirac brackets for second-class constraints and generalized canonical
//! quantization on the torus, checked symbolically and by a spectral oracle.

pub mod mechanics;
pub mod models;
pub mod symcore;
pub mod quantize;
pub mod oracle;
pub mod cli;
