//! p-linear schemes for constant-term sequences of Laurent polynomial powers
//! and for power-series coefficients of rational functions, built from the
//! Cartier operator mod p^r. Evaluating a term at index N takes O(log N)
//! matrix products.

pub mod cartier;
pub mod engine;
pub mod parse;
pub mod polytope;
pub mod ring;
pub mod scheme;
