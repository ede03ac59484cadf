//! Exact computation of trace invariants of pairs of matrices.
//!
//! The pipeline: necklace words ([`necklace`]), the necklace Poisson
//! bracket ([`bracket`]), the generator ring and its expression table
//! ([`ring`]), Cayley–Hamilton reduction ([`reduce`]), the breaking-pair
//! relation miner ([`miner`]), Hilbert series bookkeeping ([`hilbert`]),
//! the exact numeric oracle ([`numeric`]) and substitution maps onto the
//! commuting and Calogero–Moser varieties ([`maps`]).

pub mod bracket;
pub mod error;
pub mod hilbert;
pub mod maps;
pub mod miner;
pub mod ncpoly;
pub mod necklace;
pub mod numeric;
pub mod par;
pub mod reduce;
pub mod ring;

pub use error::{Error, Result};

/// Exact rational coefficients.
pub type Q = num_rational::BigRational;

#[cfg(test)]
pub(crate) fn q(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

pub(crate) fn qi(n: i64) -> Q {
    Q::from_integer(n.into())
}

/// Matrix sizes with generator tables.
pub fn check_size(n: usize) -> Result<()> {
    if (2..=4).contains(&n) {
        Ok(())
    } else {
        Err(Error::UnsupportedSize(n))
    }
}
