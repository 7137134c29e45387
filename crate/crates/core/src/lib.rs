//! Arithmetic of Markoff-type K3 surfaces in ℙ¹×ℙ¹×ℙ¹.

pub mod arith;
pub mod brauer;
pub mod counting;
pub mod forms;
pub mod galois_h1;
pub mod gf;
pub mod ring;
pub mod serde_big;
pub mod poly;
pub mod zeta;
pub mod lattice;
pub mod matrix;
pub mod padic;
pub mod rational;
