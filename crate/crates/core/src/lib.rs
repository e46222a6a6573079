//! Exact-arithmetic toolkit for clique numbers of Paley graphs over `F_{p^r}`.
//!
//! The crate is organised bottom-up:
//!
//! * [`ffield`] builds `F_{p^r}` as a quotient ring with a canonical modulus.
//! * [`paley`] builds the Paley graph on top of a field and searches cliques.
//! * [`digits`] holds base-`p` digit logic: Lucas binomials, the choice of the
//!   auxiliary parameter `n`, and the exponent sets `L(n)` and `M`.
//! * [`polyfq`] provides dense polynomials over `F_q`, hyper-derivatives and
//!   exact linear algebra.
//! * [`stepanov`] builds and checks polynomial certificates for clique bounds.
//! * [`bounds`] evaluates the known upper bounds with integer-only logic.

pub mod bounds;
pub mod digits;
pub mod error;
pub mod ffield;
pub mod paley;
pub mod polyfq;
pub mod stepanov;

pub use error::{Error, Result};
pub use ffield::{FieldDesc, FieldElem};
pub use paley::{Clique, PaleyGraph};
