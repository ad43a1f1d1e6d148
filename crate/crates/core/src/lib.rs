//! Densities of squarefree and coprime polynomial values.
//!
//! The library computes local solution counts modulo primes and prime
//! squares (over `Z` and over `F_q[t]`), assembles them into truncated
//! Euler products, and measures the same densities empirically over
//! finite boxes so the two routes can be cross-checked.

pub mod arith;
pub mod density;
pub mod ecdisc;
pub mod finite;
pub mod hp;
pub mod localcount;
pub mod mpoly;
pub mod qclasses;
pub mod unipoly;

mod error;

pub use error::Error;

pub type Result<T> = std::result::Result<T, Error>;
