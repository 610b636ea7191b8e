//! Exact arithmetic for Suslin matrices and the elementary Spin group over
//! commutative rings: the orbit correspondence between `Um_n(R)/E_n(R)` and
//! unit-sphere points modulo `Epin`, Vaserstein symbols, and the composition
//! laws on Suslin-type matrices built from quaternion and octonion blocks.

pub mod clifford;
pub mod composition;
pub mod epin;
pub mod error;
pub mod matrix;
pub mod orbit;
pub mod ring;
pub mod sampling;
pub mod suslin;
pub mod vaserstein;
pub mod verify;

pub use error::{Error, Result};
