//! Exact q-series engine for vanishing coefficients in quotients of
//! q-Pochhammer products.
//!
//! * [`series`]: truncated Laurent series over an integer coefficient ring.
//! * [`products`]: q-Pochhammer quotients, theta series, Lambert series and
//!   the specialized 1psi1 identity.
//! * [`vanishing`]: theorem families, predicted zero classes, verification
//!   and parameter scans.
//! * [`partitions`]: restricted partition counts, the signed theta sum and
//!   the even/odd part-count split.
//! * [`cli`]: the `qvanish` command-line front end.
//!
//! ```
//! use qvanish::products::{expand_product, PochhammerFactor, ProductSpec};
//! use qvanish::Series;
//!
//! // (q^3, q^5; q^8)_inf / (q, q^7; q^8)_inf has no q^(4n+3) terms
//! let f = ProductSpec::new(
//!     vec![PochhammerFactor::plain(3, 8)?, PochhammerFactor::plain(5, 8)?],
//!     vec![PochhammerFactor::plain(1, 8)?, PochhammerFactor::plain(7, 8)?],
//! );
//! let s: Series = expand_product(&f, 2000)?;
//! assert!((3..2000).step_by(4).all(|e| s.get(e).unwrap() == &0.into()));
//! # Ok::<(), qvanish::Error>(())
//! ```

pub mod cli;
pub mod error;
pub mod partitions;
pub mod products;
pub mod series;
pub mod vanishing;

pub use error::{Error, Result};
pub use series::{CoeffRing, LaurentSeries, Sign};

/// Exact coefficient type used throughout.
pub type Coefficient = num_bigint::BigInt;

/// Laurent series with arbitrary-precision coefficients.
pub type Series = LaurentSeries<Coefficient>;

/// Fixed-width series, fine for low orders only.
pub type Series64 = LaurentSeries<i64>;
