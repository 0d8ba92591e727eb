//! Zero-cycles, symbols and Galois cohomology over finite point models.

pub mod abgroup;
pub mod cycles;
pub mod gcoh;
pub mod points;
pub mod symbols;
pub mod tower;
